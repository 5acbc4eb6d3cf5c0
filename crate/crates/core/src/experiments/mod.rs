//! Reproducible experiment drivers behind the `qhedr` command line.
//!
//! Each driver is deterministic under `(seed, config)`; independent trials
//! draw their seeds from [`crate::quantum::derive_seed`] and may run in
//! parallel, while report assembly stays sequential.

mod hiding;
mod homomorphic;
mod multi_t;
mod qpce_demo;
pub mod random;
mod report;
mod swap;

pub use hiding::cmd_qotp_hiding;
pub use homomorphic::cmd_random_homomorphic;
pub use multi_t::{cmd_multi_t_demo, htht_circuit, ReferenceRow, REFERENCE_ROWS};
pub use qpce_demo::cmd_qpce_demo;
pub use report::{Check, ExperimentConfig, OutputFormat, Report, Table};
pub use swap::cmd_swap_trick;
