//! Primary outputs are deterministic; run metadata goes to a sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Command line as typed and after merging the config file.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub argv: Vec<String>,
    pub effective: Vec<String>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes `bytes` to `path` plus `<path>.meta.json`, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8], meta: &Meta) -> Result<(), String> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| format!("writing stdout: {e}"));
    };
    fs::write(path, bytes).map_err(|e| format!("writing {}: {e}", path.display()))?;
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let sidecar = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "unix_time": unix_time,
        "argv": meta.argv,
        "effective_args": meta.effective,
    });
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| e.to_string())?;
    fs::write(&side, text + "\n").map_err(|e| format!("writing {}: {e}", side.display()))
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    Ok(text.into_bytes())
}
