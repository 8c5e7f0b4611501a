use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "qcantor", version, about = "Q-Cantor series expansions: generation, expansion and normality statistics")]
pub struct Cli {
    /// Largest number of terms any command may generate.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub max_terms: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Write a prefix of a basic sequence.
    Seq(SeqArgs),
    /// Expand a rational in a basic sequence.
    Expand(ExpandArgs),
    /// Sum a digit prefix back to an exact rational.
    Value(ValueArgs),
    /// Block-count normality report.
    Stats(StatsArgs),
    /// Cell rectangles E_B × I_{D,B}.
    Grid(GridArgs),
    /// Orbit points, star discrepancy and density fits.
    Orbit(OrbitArgs),
    /// Hot-spot counts for an interval or a dyadic grid.
    Hotspot(HotspotArgs),
    /// Word complexity, block entropy and determinism diagnostics.
    Complexity(ComplexityArgs),
    /// Run a counterexample construction or a rebase.
    Repro(ReproArgs),
    /// Re-run a command from its manifest and compare checksums.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args, Serialize)]
pub struct QSource {
    /// Generator spec: a JSON file, inline JSON, or a preset name.
    #[arg(long, conflicts_with = "bases")]
    pub spec: Option<String>,
    /// File of whitespace-separated bases.
    #[arg(long)]
    pub bases: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct XSource {
    /// File of whitespace-separated digits.
    #[arg(long, conflicts_with = "x")]
    pub digits: Option<PathBuf>,
    /// A rational `p/q` in [0,1).
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeqArgs {
    #[command(flatten)]
    pub q: QSource,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub q: QSource,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ValueArgs {
    #[command(flatten)]
    pub q: QSource,
    #[arg(long)]
    pub digits: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    pub q: QSource,
    #[command(flatten)]
    pub x: XSource,
    #[arg(long)]
    pub n: usize,
    /// Largest block length.
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    #[arg(long, default_value = "1/20")]
    pub tol: String,
    /// Expectations below this are reported but not judged.
    #[arg(long, default_value = "10")]
    pub theta: String,
    /// Omit the base-conditioned rows.
    #[arg(long)]
    pub no_uniform: bool,
    /// File of 1-based window indices to leave out.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// `doubling`, or a rotation-coding generator spec.
    #[arg(long, default_value = "doubling")]
    pub model: String,
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    /// Highlight one digit block such as `0-1` (SVG only).
    #[arg(long)]
    pub digit_block: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub q: QSource,
    #[command(flatten)]
    pub x: XSource,
    /// Number of orbit points `n = 0..N−1`.
    #[arg(long)]
    pub n: usize,
    /// Width of interval-valued points.
    #[arg(long, default_value = "1/1099511627776")]
    pub eps: String,
    /// `uniform:K` or `two-step:C`.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub weyl: u32,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct HotspotArgs {
    #[command(flatten)]
    pub q: QSource,
    #[command(flatten)]
    pub x: XSource,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "1/1099511627776")]
    pub eps: String,
    #[arg(long, default_value = "0")]
    pub a: String,
    #[arg(long, default_value = "1")]
    pub b: String,
    #[arg(long, default_value = "1")]
    pub sigma: String,
    #[arg(long, default_value = "1")]
    pub c: String,
    /// File of orbit indices `n` to leave out.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
    /// Scan every open dyadic interval down to this level instead of `(a, b)`.
    #[arg(long)]
    pub dyadic: Option<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub q: QSource,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    /// Comma-separated exclusion densities; `0` is reported but not judged.
    #[arg(long, default_value = "0,1/10,1/5,3/10")]
    pub eps: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Ex31,
    Ex32,
    Ex35,
    Ex36i,
    Ex36ii,
    Rebase,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub which: Which,
    /// Construction spec as a JSON file or inline JSON; replaces the flags below.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Threshold constant `C` for the ex32 variant.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub g: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Base-4 (or source-base) digit file replacing Champernowne's digits.
    #[arg(long)]
    pub source_digits: Option<PathBuf>,
    #[arg(long)]
    pub source_base: Option<u64>,
    /// Comma-separated periodic pattern for `rebase`.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Output prefix; files `<out>.bases.txt`, `<out>.digits.txt` and `<out>.json` are written.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
}
