//! Artifact writing: atomic files, fixed float formatting, output directory.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "OPDYN_OUT_DIR";

/// Resolves an output path: absolute paths and explicit directories win,
/// otherwise the file lands in `$OPDYN_OUT_DIR` (or the working directory).
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() || path.parent().is_some_and(|p| !p.as_os_str().is_empty()) {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes via a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot move output into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// 17 significant digits: enough to reload every `f64` exactly.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row; cells are written verbatim.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}
