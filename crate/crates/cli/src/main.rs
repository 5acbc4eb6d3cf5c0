use clap::{Args, Parser, Subcommand, ValueEnum};
use qhedr_core::experiments::{
    cmd_multi_t_demo, cmd_qotp_hiding, cmd_qpce_demo, cmd_random_homomorphic, cmd_swap_trick,
    ExperimentConfig, OutputFormat, Report,
};
use qhedr_core::qpce::Interpretation;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qhedr", version, about = "Encrypted principal component extraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-qubit extraction circuit: sampled histogram and amplitude estimate.
    QpceDemo(Opts),
    /// Exhaustive branches of the two-T-gate circuit.
    MultiTDemo(Opts),
    /// Key-averaged ciphertexts against the maximally mixed state.
    QotpHiding(Opts),
    /// Random circuits evaluated under encryption.
    RandomHomomorphic(Opts),
    /// Convergence of the swap-based exponentiation step.
    SwapTrick(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long = "precision-bits", default_value_t = 2)]
    precision_bits: usize,
    #[arg(long, default_value = "eq7")]
    interpretation: Interpretation,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Density matrix CSV (alternating real/imaginary columns).
    #[arg(long)]
    rho: Option<PathBuf>,
    /// Circuit JSON file.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Directory for report files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            shots: self.shots,
            seed: self.seed,
            tau: self.tau,
            eta: self.eta,
            precision_bits: self.precision_bits,
            interpretation: self.interpretation,
            trials: self.trials,
            output: match self.output {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
            rho: self.rho.clone(),
            circuit: self.circuit.clone(),
        }
    }
}

fn emit(report: &Report, opts: &Opts, format: OutputFormat) -> qhedr_core::Result<()> {
    match &opts.out {
        Some(dir) => {
            for p in report.write(dir, format)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => match format {
            OutputFormat::Json => println!("{}", report.to_json()?),
            OutputFormat::Csv => {
                for (name, t) in &report.tables {
                    println!("# {name}");
                    print!("{}", t.to_csv()?);
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, run): (&Opts, fn(&ExperimentConfig) -> qhedr_core::Result<Report>) = match &cli.command {
        Command::QpceDemo(o) => (o, cmd_qpce_demo),
        Command::MultiTDemo(o) => (o, cmd_multi_t_demo),
        Command::QotpHiding(o) => (o, cmd_qotp_hiding),
        Command::RandomHomomorphic(o) => (o, cmd_random_homomorphic),
        Command::SwapTrick(o) => (o, cmd_swap_trick),
    };
    let cfg = opts.config();
    let result = run(&cfg).and_then(|r| emit(&r, opts, cfg.output).map(|_| r));
    match result {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} ({})", c.name, c.detail);
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
