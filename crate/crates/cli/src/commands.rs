use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qcantor::complexity::determinism_check;
use qcantor::constructions::{self, ConstructionOutput, ConstructionSpec, DigitSource, Diagnostics, DEFAULT_K_MAX};
use qcantor::distribution::{
    dyadic_hotspot_scan, empirical_vs_density, hotspot_nu, star_discrepancy, weyl_sums, HotSpotQuery, OrbitSample,
    PiecewiseDensity,
};
use qcantor::expansion::{digits_of, value_of, CantorReal};
use qcantor::generators::{generate, parse_integers, write_integers, GeneratorSpec};
use qcantor::normality::{cell_rectangles, normality_report, rectangles_csv, rectangles_svg, CellModel, ReportConfig};
use qcantor::rational::{format_rational, parse_rational, rat, Exact};
use qcantor::windows::ExclusionSet;
use qcantor::{Error, Rational};
use serde::Serialize;

use crate::args::*;
use crate::{CliError, CliResult, Context};

pub(crate) fn dispatch(cmd: &Command, ctx: &mut Context) -> CliResult<()> {
    match cmd {
        Command::Seq(a) => seq(a, ctx),
        Command::Expand(a) => expand(a, ctx),
        Command::Value(a) => value(a, ctx),
        Command::Stats(a) => stats(a, ctx),
        Command::Grid(a) => grid(a, ctx),
        Command::Orbit(a) => orbit(a, ctx),
        Command::Hotspot(a) => hotspot(a, ctx),
        Command::Complexity(a) => complexity(a, ctx),
        Command::Repro(a) => repro(a, ctx),
        Command::Rerun(_) => unreachable!("handled before dispatch"),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn format_of(out: &OutArgs, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(usage(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// A JSON file, inline JSON, or a preset name.
fn load_spec(ctx: &mut Context, s: &str) -> CliResult<GeneratorSpec> {
    let text = if Path::new(s).is_file() {
        ctx.read_input(Path::new(s))?
    } else if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        return GeneratorSpec::preset(s).ok_or_else(|| usage(format!("{s:?} is neither a file, JSON, nor a preset")));
    };
    let spec: GeneratorSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Core(Error::InvalidSpec(e.to_string())))?;
    spec.validate()?;
    if let GeneratorSpec::File { path } = &spec {
        ctx.inputs.push(path.clone());
    }
    Ok(spec)
}

fn read_ints(ctx: &mut Context, path: &Path) -> CliResult<Vec<u64>> {
    let text = ctx.read_input(path)?;
    Ok(parse_integers(&text)?)
}

/// The first `n` bases.
fn bases(ctx: &mut Context, q: &QSource, n: usize) -> CliResult<Vec<u64>> {
    ctx.check_terms(n)?;
    match (&q.spec, &q.bases) {
        (Some(s), _) => {
            let spec = load_spec(ctx, s)?;
            Ok(generate(&spec, n)?)
        }
        (None, Some(p)) => {
            let mut v = read_ints(ctx, p)?;
            if v.len() < n {
                return Err(Error::SourceExhausted { needed: n, available: v.len() }.into());
            }
            v.truncate(n);
            Ok(v)
        }
        (None, None) => Err(usage("give --spec or --bases")),
    }
}

/// Digit file contents, or the first `n` digits of `--x`.
fn digits(ctx: &mut Context, x: &XSource, q: &[u64], n: usize) -> CliResult<Vec<u64>> {
    match (&x.digits, &x.x) {
        (Some(p), _) => {
            let mut v = read_ints(ctx, p)?;
            if v.len() < n {
                return Err(Error::SourceExhausted { needed: n, available: v.len() }.into());
            }
            v.truncate(n);
            Ok(v)
        }
        (None, Some(s)) => Ok(digits_of(&parse_rational(s)?, q, n)?),
        (None, None) => Err(usage("give --digits or --x")),
    }
}

fn exclusion(ctx: &mut Context, path: &Option<PathBuf>) -> CliResult<ExclusionSet> {
    match path {
        None => Ok(ExclusionSet::None),
        Some(p) => {
            let v = read_ints(ctx, p)?;
            Ok(ExclusionSet::from_indices(v.into_iter().map(|i| i as usize)))
        }
    }
}

fn seq(a: &SeqArgs, ctx: &mut Context) -> CliResult<()> {
    let q = bases(ctx, &a.q, a.n)?;
    let body = match format_of(&a.out, Format::Text, &[Format::Text, Format::Json])? {
        Format::Json => json(&serde_json::json!({ "n": a.n, "bases": q }))?,
        _ => write_integers(&q),
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn expand(a: &ExpandArgs, ctx: &mut Context) -> CliResult<()> {
    let q = bases(ctx, &a.q, a.n)?;
    let d = digits_of(&parse_rational(&a.x)?, &q, a.n)?;
    let body = match format_of(&a.out, Format::Text, &[Format::Text, Format::Json])? {
        Format::Json => json(&serde_json::json!({ "x": a.x, "n": a.n, "digits": d }))?,
        _ => write_integers(&d),
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn value(a: &ValueArgs, ctx: &mut Context) -> CliResult<()> {
    let q = bases(ctx, &a.q, a.n)?;
    let d = read_ints(ctx, &a.digits)?;
    let v = value_of(&d, &q, a.n)?;
    let body = match format_of(&a.out, Format::Text, &[Format::Text, Format::Json])? {
        Format::Json => json(&serde_json::json!({ "n": a.n, "value": Exact::from(&v) }))?,
        _ => format_rational(&v) + "\n",
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn stats(a: &StatsArgs, ctx: &mut Context) -> CliResult<()> {
    if a.block_len == 0 {
        return Err(usage("--block-len must be at least 1"));
    }
    let len = a.n + a.block_len - 1;
    let q = bases(ctx, &a.q, len)?;
    let d = digits(ctx, &a.x, &q, len)?;
    let excl = exclusion(ctx, &a.exclude)?;
    let mut cfg = ReportConfig::new(a.block_len, parse_rational(&a.tol)?);
    cfg.theta = parse_rational(&a.theta)?;
    cfg.include_un = !a.no_uniform;
    let report = normality_report(&q, &d, a.n, &cfg, &excl)?;
    let body = match format_of(&a.out, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Csv => report.to_csv(),
        _ => json(&report)?,
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn parse_block(s: &str) -> CliResult<Vec<u64>> {
    s.split(['-', ','])
        .map(|t| t.trim().parse::<u64>().map_err(|_| usage(format!("bad block {s:?}"))))
        .collect()
}

fn grid(a: &GridArgs, ctx: &mut Context) -> CliResult<()> {
    let model = if a.model == "doubling" { CellModel::doubling() } else { CellModel::from_spec(&load_spec(ctx, &a.model)?)? };
    let rects = cell_rectangles(&model, a.block_len)?;
    let only = a.digit_block.as_deref().map(parse_block).transpose()?;
    let body = match format_of(&a.out, Format::Svg, &[Format::Svg, Format::Csv, Format::Json])? {
        Format::Csv => rectangles_csv(&rects),
        Format::Json => json(&rects)?,
        _ => rectangles_svg(&rects, only.as_deref()),
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn orbit_sample(ctx: &mut Context, q: &QSource, x: &XSource, n: usize, eps: &Rational) -> CliResult<OrbitSample> {
    match (&x.x, &x.digits) {
        (Some(s), _) => {
            let bs = bases(ctx, q, n)?;
            let y = CantorReal::exact(parse_rational(s)?, bs)?;
            Ok(OrbitSample::from_orbit(&y, n, eps)?)
        }
        (None, Some(p)) => {
            let d = read_ints(ctx, p)?;
            let bs = bases(ctx, q, d.len())?;
            let y = CantorReal::explicit(d, bs)?;
            Ok(OrbitSample::from_orbit(&y, n, eps)?)
        }
        (None, None) => Err(usage("give --digits or --x")),
    }
}

fn parse_density(s: &str) -> CliResult<PiecewiseDensity> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| usage(format!("bad density {s:?}")))?;
    Ok(match kind {
        "uniform" => PiecewiseDensity::uniform(arg.parse().map_err(|_| usage(format!("bad cell count {arg:?}")))?)?,
        "two-step" | "two_step" => PiecewiseDensity::two_step(&parse_rational(arg)?)?,
        _ => return Err(usage(format!("unknown density {kind:?}"))),
    })
}

#[derive(Serialize)]
struct OrbitReport {
    n: usize,
    max_width: Exact,
    discrepancy: qcantor::distribution::Discrepancy,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    weyl: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<qcantor::distribution::DensityFit>,
}

fn orbit(a: &OrbitArgs, ctx: &mut Context) -> CliResult<()> {
    let eps = parse_rational(&a.eps)?;
    let sample = orbit_sample(ctx, &a.q, &a.x, a.n, &eps)?;
    let format = format_of(&a.out, Format::Json, &[Format::Json, Format::Csv])?;
    let density = a.density.as_deref().map(parse_density).transpose()?;
    let body = match format {
        Format::Csv => match &density {
            Some(d) => empirical_vs_density(&sample, d)?.to_csv(),
            None => sample.to_csv(),
        },
        _ => json(&OrbitReport {
            n: sample.len(),
            max_width: Exact::from(&sample.max_width()),
            discrepancy: star_discrepancy(&sample)?,
            weyl: weyl_sums(&sample, a.weyl)?,
            density: density.as_ref().map(|d| empirical_vs_density(&sample, d)).transpose()?,
        })?,
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn hotspot(a: &HotspotArgs, ctx: &mut Context) -> CliResult<()> {
    let eps = parse_rational(&a.eps)?;
    let sample = orbit_sample(ctx, &a.q, &a.x, a.n, &eps)?;
    let excl = exclusion(ctx, &a.exclude)?;
    let c = parse_rational(&a.c)?;
    format_of(&a.out, Format::Json, &[Format::Json])?;
    let body = match a.dyadic {
        Some(level) => json(&dyadic_hotspot_scan(&sample, level, &c, &excl)?)?,
        None => {
            let mut query = HotSpotQuery::new(parse_rational(&a.a)?, parse_rational(&a.b)?);
            query.sigma = parse_rational(&a.sigma)?;
            query.c = c;
            query.exclusion = excl;
            json(&hotspot_nu(&sample, &query)?)?
        }
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn complexity(a: &ComplexityArgs, ctx: &mut Context) -> CliResult<()> {
    let len = a.n + a.k_max.saturating_sub(1);
    let q = bases(ctx, &a.q, len)?;
    let eps: Vec<Rational> = a.eps.split(',').map(|t| parse_rational(t.trim())).collect::<Result<_, _>>()?;
    let report = determinism_check(&q, a.n, &eps, a.k_max)?;
    let body = match format_of(&a.out, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Csv => report.to_csv(),
        _ => json(&report)?,
    };
    ctx.emit(a.out.out.clone(), body);
    Ok(())
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| usage(format!("--{flag} is required")))
}

fn repro_spec(a: &ReproArgs, ctx: &mut Context) -> CliResult<ConstructionSpec> {
    if let Some(s) = &a.spec {
        let text = if Path::new(s).is_file() { ctx.read_input(Path::new(s))? } else { s.clone() };
        let spec: ConstructionSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Core(Error::InvalidSpec(e.to_string())))?;
        if spec.name() != format!("{:?}", a.which).to_lowercase() {
            return Err(usage(format!("spec kind {} does not match {:?}", spec.name(), a.which)));
        }
        return Ok(spec);
    }
    let source = match &a.source_digits {
        Some(p) => DigitSource::Digits { digits: read_ints(ctx, p)? },
        None => DigitSource::Champernowne,
    };
    let n = need(&a.n, "n")?;
    let seed = || need(&a.seed, "seed");
    Ok(match a.which {
        Which::Ex31 => ConstructionSpec::Ex31 { y4: source, n },
        Which::Ex32 => ConstructionSpec::Ex32 { y4: source, n, c: a.c.as_deref().map(parse_rational).transpose()? },
        Which::Ex35 => ConstructionSpec::Ex35 {
            a: need(&a.a, "a")?,
            b: need(&a.b, "b")?,
            eps: parse_rational(&need(&a.eps, "eps")?)?,
            seed: seed()?,
            n,
        },
        Which::Ex36i => ConstructionSpec::Ex36i { g: need(&a.g, "g")?, k_max: a.k_max.unwrap_or(DEFAULT_K_MAX), seed: seed()?, n },
        Which::Ex36ii => ConstructionSpec::Ex36ii { g: need(&a.g, "g")?, k_max: a.k_max.unwrap_or(DEFAULT_K_MAX), seed: seed()?, n },
        Which::Rebase => ConstructionSpec::Rebase {
            source,
            source_base: need(&a.source_base, "source-base")?,
            pattern: parse_block(&need(&a.pattern, "pattern")?)?,
            n,
        },
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn repro(a: &ReproArgs, ctx: &mut Context) -> CliResult<()> {
    let spec = repro_spec(a, ctx)?;
    let n = match &spec {
        ConstructionSpec::Ex31 { n, .. }
        | ConstructionSpec::Ex32 { n, .. }
        | ConstructionSpec::Ex35 { n, .. }
        | ConstructionSpec::Ex36i { n, .. }
        | ConstructionSpec::Ex36ii { n, .. }
        | ConstructionSpec::Rebase { n, .. } => *n,
    };
    ctx.check_terms(n)?;
    match &spec {
        ConstructionSpec::Ex35 { seed, .. } | ConstructionSpec::Ex36i { seed, .. } | ConstructionSpec::Ex36ii { seed, .. } => {
            ctx.seeds.push(*seed)
        }
        _ => {}
    }
    let c = constructions::build(&spec)?;
    ctx.notes.insert("resolved_spec".into(), serde_json::to_value(&c.spec)?);
    // the summary goes first so the manifest is named after it
    ctx.emit(Some(with_suffix(&a.out, ".json")), json(&serde_json::json!({ "spec": c.spec, "diagnostics": c.diagnostics }))?);
    match &c.output {
        ConstructionOutput::Cantor { bases, digits } => {
            ctx.emit(Some(with_suffix(&a.out, ".bases.txt")), write_integers(bases));
            ctx.emit(Some(with_suffix(&a.out, ".digits.txt")), write_integers(digits));
        }
        ConstructionOutput::GPower { g, exponents, g_digits } => {
            let exps: Vec<u64> = exponents.iter().map(|&e| e as u64).collect();
            let gd: Vec<u64> = g_digits.iter().map(|&d| d as u64).collect();
            ctx.emit(Some(with_suffix(&a.out, ".exponents.txt")), write_integers(&exps));
            ctx.emit(Some(with_suffix(&a.out, &format!(".base{g}-digits.txt"))), write_integers(&gd));
        }
    }
    if let Diagnostics::Split(d) = &c.diagnostics {
        let half = d.half_mass_target.to_rational()?;
        // density on [0, ½) and [½, 1) carrying the target mass of [0, ½)
        let low = &half * rat(2, 1);
        let high = rat(2, 1) - &low;
        ctx.notes.insert(
            "density_targets".into(),
            serde_json::json!({ "[0,1/2)": format_rational(&low), "[1/2,1)": format_rational(&high) }),
        );
        ctx.notes.insert("m_ratio_target".into(), serde_json::to_value(&d.m_ratio_target)?);
    }
    let mut summary = String::new();
    let _ = writeln!(summary, "{} n={n}", c.spec.name());
    ctx.emit(None, summary);
    Ok(())
}
