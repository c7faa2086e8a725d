//! Atomic file emission with embedded configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file for {}", path.display()))?;
    tmp.write_all(bytes).with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `# `-prefixed configuration lines followed by `body`.
pub fn with_header(config: &ExperimentConfig, extra: &[String], body: &str) -> String {
    let mut out = String::new();
    for line in config.header_lines().iter().chain(extra) {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(body);
    out
}

/// Sends text to `--out` (atomically) or to stdout.
pub fn emit_text(config: &ExperimentConfig, text: &str) -> anyhow::Result<Option<PathBuf>> {
    match &config.output {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            Ok(Some(path.clone()))
        }
        None => {
            print!("{text}");
            Ok(None)
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    version: &'static str,
    result: &'a T,
}

/// Path of the `.json` file describing a raster.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `bytes` to `path` and the configuration plus `result` to the
/// sidecar next to it.
pub fn emit_with_sidecar<T: Serialize>(
    config: &ExperimentConfig,
    path: &Path,
    bytes: &[u8],
    result: &T,
) -> anyhow::Result<PathBuf> {
    write_atomic(path, bytes)?;
    let side = sidecar_path(path);
    let mut json = serde_json::to_string_pretty(&Sidecar { config, version: env!("CARGO_PKG_VERSION"), result })?;
    json.push('\n');
    write_atomic(&side, json.as_bytes())?;
    Ok(side)
}

pub fn read_file(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}
