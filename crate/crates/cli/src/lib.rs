//! Command-line experiments on top of [`hmimo`].
//!
//! A run is a [`SweepSpec`] (read from TOML, patched by flags) turned into
//! rows by [`run::run`] and written by [`emit::write_outputs`].

use std::path::{Path, PathBuf};

pub mod emit;
pub mod run;
pub mod spec;
pub mod svg;

pub use run::{
    channel_sample, field_sample, lattice_dump, run_capacity_vs_distance, run_dof_vs_distance,
    run_dof_vs_power,
};
pub use spec::{Format, Overrides, SweepKind, SweepSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HMIMO_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad specs, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}

impl From<hmimo::Error> for CliError {
    fn from(e: hmimo::Error) -> Self {
        use hmimo::Error as E;
        match e {
            E::NonFinite(_) | E::EigenFailure | E::NonPositiveBaseline(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Spec(e.to_string()),
        }
    }
}

/// Output directory: the spec's (or `--out`), else `$HMIMO_OUT_DIR`, else `.`.
pub fn output_dir(spec: &SweepSpec, env: Option<&Path>) -> PathBuf {
    spec.output
        .dir
        .clone()
        .or_else(|| env.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Run `spec` and write its files; returns the paths written.
pub fn execute(spec: &SweepSpec, env_out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    spec.validate()?;
    let table = run::run(spec)?;
    emit::write_outputs(spec, &table, &output_dir(spec, env_out))
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
