//! Deterministic output formatting: CSV with 17-significant-digit scientific
//! notation (round-trip exact for f64), LF line endings, and the optional
//! run manifest.

use std::fs;
use std::io::Write;
use std::path::Path;

/// 17 significant digits in scientific notation.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write to the path, or stdout when absent.
pub fn emit(out: Option<&Path>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

/// FNV-1a 64-bit hash of the raw config bytes, hex encoded.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Manifest written next to the results (`<out>.manifest.json`).
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config_path: &'a Path,
    pub config_hash: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub jobs: usize,
}

pub fn write_manifest(out: &Path, m: &Manifest) -> std::io::Result<()> {
    let tol = m
        .tol
        .map(sci)
        .map(|s| format!("\"{s}\""))
        .unwrap_or_else(|| "null".into());
    let body = format!(
        "{{\n  \"tool\": \"tgreens\",\n  \"version\": \"{}\",\n  \"command\": \"{}\",\n  \
         \"config_path\": {:?},\n  \"config_hash\": \"fnv1a64:{}\",\n  \"seed\": {},\n  \
         \"tol\": {},\n  \"jobs\": {}\n}}\n",
        env!("CARGO_PKG_VERSION"),
        m.command,
        m.config_path.display().to_string(),
        m.config_hash,
        m.seed,
        tol,
        m.jobs,
    );
    let mut path = out.as_os_str().to_owned();
    path.push(".manifest.json");
    fs::write(path, body)
}
