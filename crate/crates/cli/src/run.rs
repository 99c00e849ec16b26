use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vdp_core::Params;

use crate::error::{CliError, CliResult};

/// Everything needed to regenerate a command's outputs. Contains no
/// timestamps or host details, so identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Subcommand and its flags, config entries already merged in.
    pub args: Vec<String>,
    pub params: Option<Params>,
    pub sampling: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path.display(), e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Output directory plus the manifest being assembled for one command.
pub struct Run {
    out: PathBuf,
    pub jobs: usize,
    pub manifest: RunManifest,
}

impl Run {
    pub fn new(out: &Path, jobs: usize, args: Vec<String>) -> CliResult<Self> {
        std::fs::create_dir_all(out).map_err(|e| CliError::file(out.display(), e))?;
        let subcommand = args.first().cloned().unwrap_or_default();
        Ok(Self {
            out: out.to_path_buf(),
            jobs,
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand,
                args,
                params: None,
                sampling: BTreeMap::new(),
                notes: vec!["deterministic: no random seeds are used".into()],
                outputs: vec![],
            },
        })
    }

    pub fn params(&mut self, p: Params) {
        self.manifest.params = Some(p);
    }

    pub fn sampling(&mut self, key: &str, value: impl Into<Value>) {
        self.manifest.sampling.insert(key.into(), value.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.manifest.notes.push(text.into());
    }

    /// Creates `name` in the output directory and hands a buffered writer to `body`.
    pub fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
        let path = self.out.join(name);
        let fail = |e| CliError::file(path.display(), e);
        let mut w = BufWriter::new(File::create(&path).map_err(fail)?);
        body(&mut w).and_then(|_| w.flush()).map_err(fail)?;
        self.manifest.outputs.push(name.into());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(name, |w| writeln!(w, "{text}"))
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        self.write(name, |w| w.write_all(bytes))
    }

    /// Writes `<tag>.manifest.json` and reports the files produced.
    pub fn finish(self, tag: &str) -> CliResult<()> {
        let name = format!("{tag}.manifest.json");
        let path = self.out.join(&name);
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&path, format!("{text}\n")).map_err(|e| CliError::file(path.display(), e))?;
        for f in self.manifest.outputs.iter().chain(std::iter::once(&name)) {
            println!("wrote {}", self.out.join(f).display());
        }
        Ok(())
    }
}
