use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult, Context, Outcome};

pub const MANIFEST_SCHEMA: &str = "qcantor-manifest/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool: String,
    pub version: String,
    /// Arguments after the program name; replaying them reproduces the outputs.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    #[serde(default)]
    pub notes: serde_json::Map<String, serde_json::Value>,
    pub wall_clock_ms: u128,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub(crate) fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn digests(paths: &[PathBuf]) -> CliResult<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| Ok(FileDigest { path: p.clone(), sha256: sha256_file(p)? }))
        .collect()
}

impl Manifest {
    pub(crate) fn build(
        cli: &crate::Cli,
        args: &[String],
        ctx: &Context,
        outputs: &[PathBuf],
        elapsed: Duration,
    ) -> CliResult<Self> {
        Ok(Manifest {
            schema: MANIFEST_SCHEMA.into(),
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            args: args.to_vec(),
            config: serde_json::to_value(cli)?,
            seeds: ctx.seeds.clone(),
            inputs: digests(&ctx.inputs)?,
            outputs: digests(outputs)?,
            notes: ctx.notes.clone(),
            wall_clock_ms: elapsed.as_millis(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let m: Manifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(CliError::Usage(format!("unsupported manifest schema {:?}", m.schema)));
        }
        Ok(m)
    }
}

/// Checks the recorded inputs, replays the arguments and compares output checksums.
pub(crate) fn rerun(path: &Path) -> CliResult<Outcome> {
    let m = Manifest::load(path)?;
    for input in &m.inputs {
        let now = sha256_file(&input.path)?;
        if now != input.sha256 {
            return Err(CliError::Mismatch(format!("input {} changed", input.path.display())));
        }
    }
    let mut argv = vec![m.tool.clone()];
    argv.extend(m.args.iter().cloned());
    let mut outcome = crate::run(argv)?;
    let mut report = Vec::new();
    for out in &m.outputs {
        let now = sha256_file(&out.path)?;
        if now != out.sha256 {
            return Err(CliError::Mismatch(format!("output {} differs", out.path.display())));
        }
        report.push(serde_json::json!({ "path": out.path, "sha256": now, "identical": true }));
    }
    outcome.stdout = serde_json::to_string_pretty(&serde_json::json!({ "reproduced": true, "outputs": report }))? + "\n";
    Ok(outcome)
}
