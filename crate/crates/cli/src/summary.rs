use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thinlab::RasterSet;

use crate::error::CliError;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub config_path: Option<String>,
    /// The full resolved configuration, defaults included.
    pub config: BTreeMap<String, String>,
    pub wall_time: f64,
    pub metrics: BTreeMap<String, f64>,
    /// Quantities that came out non-finite, e.g. divergent estimates.
    pub flags: Vec<String>,
    pub assertions: Vec<Assertion>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(SUMMARY_FILE);
        write_atomic(&path, serde_json::to_string_pretty(self)?.as_bytes())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read summary {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed summary {}: {e}", path.display())))
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Collects metrics, checks and artifacts while a scenario runs.
pub struct Recorder {
    pub out: PathBuf,
    summary: RunSummary,
}

impl Recorder {
    pub fn new(out: PathBuf, scenario: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        Self {
            out,
            summary: RunSummary {
                scenario: scenario.to_string(),
                seed,
                config_path: None,
                config,
                wall_time: 0.0,
                metrics: BTreeMap::new(),
                flags: Vec::new(),
                assertions: Vec::new(),
                artifacts: Vec::new(),
                passed: true,
            },
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.summary.metrics.insert(name.to_string(), value);
        } else {
            self.summary.flags.push(format!("{name} = {value}"));
        }
    }

    pub fn flag(&mut self, text: impl Into<String>) {
        self.summary.flags.push(text.into());
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.summary.passed &= passed;
        self.summary.assertions.push(Assertion { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        write_atomic(&self.out.join(name), contents.as_bytes())?;
        self.summary.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }

    /// The raster as PGM plus its bounding-box sidecar.
    pub fn raster(&mut self, name: &str, set: &RasterSet) -> Result<(), CliError> {
        let path = self.out.join(name);
        set.write_pgm(&path)?;
        self.summary.artifacts.push(name.to_string());
        let side = Path::new(name).with_extension("json");
        self.summary.artifacts.push(side.to_string_lossy().into_owned());
        Ok(())
    }

    pub fn finish(mut self, wall_time: f64, config_path: Option<String>) -> RunSummary {
        self.summary.wall_time = wall_time;
        self.summary.config_path = config_path;
        self.summary
    }
}
