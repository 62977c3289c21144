//! On-disk wrappers for certificates and run reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use hamel_core::ProbeCertificate;
use serde::{Deserialize, Serialize};

use crate::definition::sha256_hex;
use crate::CliError;

pub const CERTIFICATE_FORMAT: &str = "hamel-certificate/1";
pub const RUN_REPORT_FORMAT: &str = "hamel-run-report/1";
pub const TOOL_VERSION: &str = concat!("hamel ", env!("CARGO_PKG_VERSION"));

/// A certificate with a digest of its payload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: String,
    pub tool_version: String,
    pub inputs_digest: String,
    pub payload: ProbeCertificate,
    pub payload_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub format: String,
    pub tool_version: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub timing_ms: BTreeMap<String, u64>,
    pub certificates: Vec<CertificateFile>,
}

/// Compact JSON with object keys in sorted order.
pub fn canonical_json(value: &serde_json::Value) -> String {
    // serde_json's default map is ordered by key
    value.to_string()
}

pub fn payload_digest(payload: &ProbeCertificate) -> String {
    let value = serde_json::to_value(payload).expect("certificates serialize");
    sha256_hex(canonical_json(&value).as_bytes())
}

impl CertificateFile {
    pub fn new(payload: ProbeCertificate, inputs_digest: &str) -> Self {
        Self {
            format: CERTIFICATE_FORMAT.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            inputs_digest: inputs_digest.to_owned(),
            payload_sha256: payload_digest(&payload),
            payload,
        }
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
