use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use jumplmi::certificates::RateCertificate;
use jumplmi::Error;

pub const MANIFEST: &str = "manifest.json";

/// Error carrying the process exit code: 2 input, 3 unsupported, 4 failed
/// verification, 1 anything else.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Unsupported(String),
    Verification(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Unsupported(_) => 3,
            Failure::Verification(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(s) | Failure::Unsupported(s) | Failure::Verification(s) => f.write_str(s),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) => Failure::Unsupported(e.to_string()),
            Error::VerificationFailed(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: &impl Serialize, seed: u64, outputs: Vec<PathBuf>) -> Self {
        Self {
            command: command.into(),
            parameters: serde_json::to_value(parameters).unwrap_or(serde_json::Value::Null),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: outputs
                .iter()
                .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned()))
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), Failure> {
        write_json(&dir.join(MANIFEST), self)
    }
}

/// `dir/name`, creating `dir` if needed.
pub fn in_dir(dir: &Path, name: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(anyhow::Error::new(e).context(format!("creating {}", dir.display()))))?;
    Ok(dir.join(name))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.into()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Io(anyhow::Error::new(e).context(format!("writing {}", path.display()))))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Io(anyhow::Error::new(e).context(format!("writing {}", path.display())));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Io(e.into()))
}

pub fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn read_certificate(path: &Path) -> Result<RateCertificate<f64>, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}
