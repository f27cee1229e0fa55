//! Deterministic artifact output: canonical JSON with fixed-width floats,
//! provenance envelopes, atomic file writes, and small CSV helpers.
//!
//! Identical inputs must produce byte-identical files, so every f64 is
//! serialized through one fixed 17-significant-digit format and files are
//! written to a temporary sibling and renamed into place.

use std::fs;
use std::io::{self, Write as IoWrite};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// The one float format every artifact uses: scientific with 16 fractional
/// digits, i.e. 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }
}

/// Serialize to compact JSON with canonical float formatting.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(io::Error::other(format!("serialization failed: {e}"))))?;
    String::from_utf8(buf).map_err(|e| {
        Error::Io(io::Error::other(format!(
            "serialized JSON is not UTF-8: {e}"
        )))
    })
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance wrapper every JSON artifact is embedded in.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub tool_version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub payload: T,
}

impl<T: Serialize> ReportEnvelope<T> {
    pub fn new(config_sha256: String, seed: u64, payload: T) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_sha256,
            seed,
            payload,
        }
    }
}

/// Write bytes to `path` atomically: temp sibling file, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| {
        Error::Io(io::Error::other(format!(
            "cannot create {}: {e}",
            dir.display()
        )))
    })?;
    let file_name = path.file_name().ok_or_else(|| {
        Error::Io(io::Error::other(format!(
            "{} has no file name",
            path.display()
        )))
    })?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| {
        Error::Io(io::Error::other(format!(
            "cannot create {}: {e}",
            tmp.display()
        )))
    })?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| {
        Error::Io(io::Error::other(format!(
            "cannot write {}: {e}",
            tmp.display()
        )))
    })?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        Error::Io(io::Error::other(format!(
            "cannot move {} into place: {e}",
            tmp.display()
        )))
    })
}

/// A CSV table with a provenance comment header. Floats go through
/// [`fmt_f64`]; nothing here ever needs quoting.
pub struct CsvTable {
    lines: Vec<String>,
}

impl CsvTable {
    pub fn new(config_sha256: &str, columns: &[&str]) -> Self {
        let version = env!("CARGO_PKG_VERSION");
        Self {
            lines: vec![
                format!("# robinlab {version} config {config_sha256}"),
                columns.join(","),
            ],
        }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut content = self.lines.join("\n");
        content.push('\n');
        write_atomic(path, content.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_canonical_format() {
        for x in [0.1, -1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn canonical_json_is_reproducible_and_fixed_width() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
        }
        let s = S {
            a: 1.0 / 3.0,
            b: vec![0.1, 2.0],
        };
        let one = to_canonical_json(&s).unwrap();
        let two = to_canonical_json(&s).unwrap();
        assert_eq!(one, two);
        assert!(one.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn atomic_writes_land_and_replace() {
        let dir = std::env::temp_dir().join(format!("robinlab-report-{}", std::process::id()));
        let path = dir.join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sha_matches_the_known_empty_digest() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
