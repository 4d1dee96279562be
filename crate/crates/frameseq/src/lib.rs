//! File formats, report emission and the analysis pipeline behind the
//! `frameseq` binary.
//!
//! Every run is driven by an [`AnalysisConfig`]; command line flags are
//! turned into one before anything is computed. Reports are JSON with sorted
//! keys and carry the schema tag, the config hash and the root seed, so
//! identical configs give byte-identical output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod gallery;
pub mod run;
pub mod selftest;
pub mod tables;

pub use config::{AnalysisConfig, SCHEMA};
pub use run::{run, Artifact, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] frameseq_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(frameseq_core::Error::Inconsistent(_)) => EXIT_INCONSISTENT,
            _ => EXIT_USAGE,
        }
    }
}
