use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qhedr_core::circuit::gates;
use qhedr_core::exec::Exec;
use qhedr_core::experiments::random::random_state;
use qhedr_core::quantum::seeded_rng;
use std::hint::black_box;

fn gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_gate");
    group.sample_size(20);
    let h = gates::h(0).base_matrix();
    let t = gates::t(0).base_matrix();
    for n in [12usize, 14, 16, 18] {
        let psi = random_state(n, &mut seeded_rng(n as u64));
        for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &psi, |b, psi| {
                b.iter(|| {
                    let mut s = psi.clone();
                    for q in 0..n {
                        s.apply_matrix_with(exec, &h, &[q], &[]);
                    }
                    s.apply_matrix_with(exec, &t, &[n - 1], &[0]);
                    black_box(s)
                })
            });
        }
    }
    group.finish();
}

fn trial_fanout(c: &mut Criterion) {
    use qhedr_core::circuit::simulate_statevector;
    use qhedr_core::experiments::random::random_circuit;
    let mut group = c.benchmark_group("random_trials");
    group.sample_size(20);
    for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(label, |b| {
            b.iter(|| {
                exec.map(256, |i| {
                    let mut rng = seeded_rng(i as u64);
                    let c = random_circuit(3, 12, 4, false, &mut rng);
                    let psi = random_state(3, &mut rng);
                    simulate_statevector(&c, &psi).map(|s| s.norm_sqr()).unwrap_or(0.0)
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, gate_application, trial_fanout);
criterion_main!(benches);
