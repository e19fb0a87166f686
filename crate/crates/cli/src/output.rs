//! File emission: CSV tables and JSON metadata records.
//!
//! Reals are written in the shortest form that parses back to the same
//! double (`{:?}`), independent of locale.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qwalk_core::{Distribution, RescaledDistribution};

use crate::error::{CliError, Result};

pub fn real(v: f64) -> String {
    format!("{v:?}")
}

/// `<out>` with its extension replaced by `json`.
pub fn metadata_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// `<out stem>.<suffix>` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Write `header` then `rows` as CSV.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    let fail = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(&row).map_err(fail)?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

pub const DISTRIBUTION_HEADER: [&str; 4] = ["x", "rescaled_x", "prob", "stderr"];

/// Every lattice site `x` in `[-t, t]` with `x + t` even, ascending.
pub fn write_distribution(path: &Path, rescaled: &RescaledDistribution, with_stderr: bool) -> Result<()> {
    let base: &Distribution = rescaled.base();
    let t = base.horizon() as i64;
    let stderr = base.stderr().filter(|_| with_stderr);
    let rows = (-t..=t).step_by(2).map(|x| {
        vec![
            x.to_string(),
            real(rescaled.rescaled_position(x)),
            real(base.mass(x)),
            stderr.map(|se| real(se[(x + t) as usize])).unwrap_or_default(),
        ]
    });
    write_csv(path, &DISTRIBUTION_HEADER, rows)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

/// Version and RNG fields shared by every metadata record.
pub fn provenance() -> serde_json::Value {
    serde_json::json!({
        "software": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "rng": qwalk_core::rng::RNG_ALGORITHM,
    })
}
