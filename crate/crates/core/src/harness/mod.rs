//! Expression parsing, configuration and suite running for the command line.

pub mod config;
pub mod expr;
pub mod suites;

pub use config::{RunConfig, Tolerances};
pub use expr::{parse, Expr};
pub use suites::{run_named, run_suites, RunSummary, SuiteOutcome, SUITES};

use std::io::Write;
use std::path::Path;

/// Write via a temporary file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
