//! Output sinks and number formatting shared by the subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

/// A float serialized as a JSON number with 17 significant digits;
/// non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn fmt17(x: f64) -> String {
    polylab::io::format_f64(x)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub polylab: &'static str,
    pub polylab_cli: &'static str,
}

/// Provenance record written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub versions: Versions,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Micros, true)
}

/// Where a command's primary output goes. With a path, the manifest is
/// written to `<path>.manifest.json`; on stdout it goes to stderr.
pub struct Sink {
    path: Option<PathBuf>,
    started: DateTime<Utc>,
    seed: Option<u64>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, seed: Option<u64>) -> Self {
        Sink { path, started: Utc::now(), seed }
    }

    pub fn emit(self, bytes: &[u8]) -> io::Result<()> {
        let label = match &self.path {
            Some(p) => {
                fs::write(p, bytes)?;
                p.display().to_string()
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                "-".to_string()
            }
        };
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            seed: self.seed,
            versions: Versions {
                polylab: polylab::VERSION,
                polylab_cli: env!("CARGO_PKG_VERSION"),
            },
            started: timestamp(self.started),
            finished: timestamp(Utc::now()),
            outputs: vec![OutputDigest {
                path: label,
                sha256: sha256_hex(bytes),
                bytes: bytes.len(),
            }],
        };
        let text = to_json(&manifest);
        match &self.path {
            Some(p) => fs::write(manifest_path(p), text),
            None => io::stderr().lock().write_all(text.as_bytes()),
        }
    }
}

pub fn manifest_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
