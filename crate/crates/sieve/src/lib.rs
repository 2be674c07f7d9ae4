//! The tetrahedral sieve: runs the four conditions over a range of primes,
//! reports the survivors with their rank-zero certificates, recomputes the
//! cohomological and group-theoretic dimension claims, and classifies tame
//! inertia traces.

pub mod config;
pub mod inertia;
pub mod report;
pub mod sieve;
pub mod verify;

pub use inertia::{classify_inertia, Branch, InertiaClassification, InertiaError};
pub use report::{emit_report, parse_structured, Format, ReportError, SieveRun};
pub use sieve::{evaluate_prime, run_sieve, Mode, SieveError, SieveOptions, SieveReport, Stage, Summary};
pub use verify::{all_pass, emit_rows, group_rows, verify_all, VerifyRow};
