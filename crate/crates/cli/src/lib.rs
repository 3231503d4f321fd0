//! Configuration, coefficient ingestion and the verbs behind the `chdg` binary.

pub mod coefficients;
pub mod config;
pub mod driver;

pub use coefficients::{ingest_coefficients, parse_coefficients};
pub use config::{parse_config, parse_number, RunConfig};
pub use driver::{execute, mesh_info, run, spectra, sweep, RunOutcome, Status};
