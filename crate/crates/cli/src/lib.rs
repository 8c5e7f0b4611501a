//! Command-line front end for `qcantor`.
//!
//! Every command that writes to a file also writes `<out>.manifest.json`,
//! which records the arguments, resolved configuration, seeds and SHA-256
//! checksums of all inputs and outputs. `qcantor rerun <manifest>` replays it.

pub mod args;
mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

pub use args::Cli;
pub use manifest::{sha256_file, FileDigest, Manifest, MANIFEST_SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qcantor::Error),
    #[error("{0}")]
    Usage(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("re-run differs from the manifest: {0}")]
    Mismatch(String),
}

impl CliError {
    /// 2 for bad input or preconditions, 3 for unreachable precision, 4 for resource limits.
    pub fn exit_code(&self) -> i32 {
        use qcantor::Error as E;
        match self {
            CliError::Core(E::PrecisionUnreachable(_) | E::HorizonExceeded { .. }) => 3,
            CliError::Resource(_) => 4,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(qcantor::Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(qcantor::Error::Json(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// One produced file, or stdout when `path` is `None`.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

/// Inputs read, seeds used and artifacts produced by one command.
#[derive(Debug, Default)]
pub struct Context {
    pub inputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub artifacts: Vec<Artifact>,
    pub notes: serde_json::Map<String, serde_json::Value>,
    pub max_terms: usize,
}

impl Context {
    pub fn read_input(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path)?;
        self.inputs.push(path.to_path_buf());
        Ok(text)
    }

    pub fn emit(&mut self, path: Option<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.artifacts.push(Artifact { path, bytes: bytes.into() });
    }

    pub fn check_terms(&self, n: usize) -> CliResult<()> {
        if n > self.max_terms {
            return Err(CliError::Resource(format!("{n} terms requested, limit is {}", self.max_terms)));
        }
        Ok(())
    }
}

/// What a run printed and which files it wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<PathBuf>,
    pub manifest: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> CliResult<Outcome>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli, &argv[1.min(argv.len())..])
}

/// Runs a parsed command; `args` are recorded in the manifest.
pub fn execute(cli: Cli, args: &[String]) -> CliResult<Outcome> {
    if let args::Command::Rerun(r) = &cli.command {
        return manifest::rerun(&r.manifest);
    }
    let started = Instant::now();
    let mut ctx = Context { max_terms: cli.max_terms, ..Context::default() };
    commands::dispatch(&cli.command, &mut ctx)?;
    let mut outcome = Outcome::default();
    for a in &ctx.artifacts {
        match &a.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, &a.bytes)?;
                outcome.files.push(p.clone());
            }
            None => outcome.stdout.push_str(&String::from_utf8_lossy(&a.bytes)),
        }
    }
    if let Some(primary) = outcome.files.first().cloned() {
        let m = Manifest::build(&cli, args, &ctx, &outcome.files, started.elapsed())?;
        let path = manifest::manifest_path(&primary);
        std::fs::write(&path, serde_json::to_vec_pretty(&m)?)?;
        outcome.manifest = Some(path);
    }
    Ok(outcome)
}
