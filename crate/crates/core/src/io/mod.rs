//! Text formats: instance files, model export, cut dumps, quantile caches and
//! benchmark tables. Every format starts with a versioned header line.

pub mod bench;
pub mod export;
pub mod instance;
pub mod quantiles;

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub use bench::{BenchRow, BenchTable};
pub use export::{export_model, write_cuts, ExportStyle};
pub use instance::{instance_hash, parse_instance, write_instance};
pub use quantiles::{parse_quantiles, write_quantiles};

/// Write `contents` through a temporary file in the target directory and
/// rename it into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
