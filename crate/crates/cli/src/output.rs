use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Files written by one command, recorded in its manifest.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Record files produced by a library export.
    pub fn record(&mut self, names: impl IntoIterator<Item = String>) {
        self.written.extend(names);
    }

    /// `<command>_manifest.json` with the invocation, parsed arguments and outputs.
    pub fn finish(mut self, command: &str, args: &impl Serialize, extra: serde_json::Value) -> Result<()> {
        let manifest = Manifest {
            tool: "nft",
            version: env!("CARGO_PKG_VERSION"),
            command,
            argv: std::env::args().collect(),
            args: serde_json::to_value(args)?,
            outputs: self.written.clone(),
            extra,
        };
        self.write_json(&format!("{command}_manifest.json"), &manifest)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    argv: Vec<String>,
    args: serde_json::Value,
    outputs: Vec<String>,
    extra: serde_json::Value,
}
