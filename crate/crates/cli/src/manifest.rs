use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Serialize)]
struct Timing {
    stage: String,
    seconds: f64,
}

/// `manifest.json`: what ran, on what, with which settings, and what it
/// produced. Written once the input has been parsed, whether or not the
/// command succeeds.
#[derive(Debug, Serialize)]
pub struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    source: Option<String>,
    config: serde_json::Value,
    outputs: Vec<String>,
    wall_seconds: f64,
    timings: Vec<Timing>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip)]
    dir: PathBuf,
    #[serde(skip)]
    started: Instant,
    #[serde(skip)]
    stage: Instant,
    #[serde(skip)]
    armed: bool,
}

impl Manifest {
    pub fn new(dir: &Path) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: String::new(),
            source: None,
            config: serde_json::Value::Null,
            outputs: Vec::new(),
            wall_seconds: 0.0,
            timings: Vec::new(),
            status: "ok".into(),
            error: None,
            dir: dir.to_path_buf(),
            started: Instant::now(),
            stage: Instant::now(),
            armed: false,
        }
    }

    /// Called once inputs parse; from here on a manifest is always written.
    pub fn arm(&mut self, command: &str, source: Option<&str>, config: impl Serialize) {
        self.command = command.into();
        self.source = source.map(str::to_string);
        self.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        self.armed = true;
        self.stage = Instant::now();
    }

    pub fn armed(&self) -> bool {
        self.armed
    }

    /// Records the time since the previous stage.
    pub fn stage(&mut self, name: &str) {
        self.timings.push(Timing {
            stage: name.into(),
            seconds: self.stage.elapsed().as_secs_f64(),
        });
        self.stage = Instant::now();
    }

    /// Writes `contents` to `name` under the output directory and records it.
    pub fn output(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn finish(&mut self, error: Option<String>) {
        self.wall_seconds = self.started.elapsed().as_secs_f64();
        if let Some(e) = error {
            self.status = "error".into();
            self.error = Some(e);
        }
    }

    pub fn write(&self) -> anyhow::Result<()> {
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
