//! Command-line front end. Exit codes: 0 success, 1 a check failed, 2 usage
//! error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::counting::{catalan, motzkin_number};
use crate::error::Error;
use crate::fluctuation::{default_workers, run_mc, McBands, McConfig};
use crate::grid::TimeGrid;
use crate::identities::{run_all, run_suite, IdentityConfig, SUITES};
use crate::oracles::excursion::{excursion_fdd_density, limit_density, limit_laplace};
use crate::oracles::fbm::{fbm_density, fbm_transition};
use crate::oracles::laplace::{laplace_joint, laplace_level_increments, laplace_level_increments_centered};
use crate::oracles::semicircle::{sulanke_coeffs, sulanke_evaluators, SULANKE_TOLERANCE};
use crate::path::enumerate_paths;
use crate::sampler::{worker_quotas, RandomSource, SamplerMode, UniformSampler};

pub const SEED_ENV: &str = "MOTZKIN_SEED";
pub const WORKERS_ENV: &str = "MOTZKIN_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "motzkin", version, about = "Motzkin path counting, sampling and fluctuation limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    Motzkin,
    Catalan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    /// Free Brownian motion marginal at `--t`.
    Fbm,
    /// Free Brownian motion transition from `(--s, --x)` to `(--t, --y)`.
    Transition,
    /// Brownian excursion at grid times.
    Excursion,
    /// Excursion scaled by `1/sqrt(3)`.
    Limit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Motzkin or Catalan numbers.
    Count(CountArgs),
    /// List all Motzkin paths of a length.
    Enumerate(EnumerateArgs),
    /// Draw uniform Motzkin paths.
    Sample(SampleArgs),
    /// Run the analytic identity suites and report the worst errors.
    VerifyIdentities(VerifyArgs),
    /// Sulanke polynomial value or coefficients.
    Sulanke(SulankeArgs),
    /// Finite-n and limiting Laplace transforms.
    Laplace(LaplaceArgs),
    /// Point evaluation of a density.
    Density(DensityArgs),
    /// Monte Carlo check of the fluctuation limit.
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "motzkin")]
    pub kind: CountKind,
    /// Print every value from 0 to n.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, visible_alias = "count", default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value = "cycle")]
    pub mode: SamplerMode,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    /// Run one suite only.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suite: Option<String>,
}

#[derive(Debug, Args)]
pub struct SulankeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Print the exact coefficients instead of a value.
    #[arg(long)]
    pub coeffs: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    /// Path length; omit together with `--limit`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "")]
    pub grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Ascent weights; switches to the joint `(F, G)` transform.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Centered and scaled level transform.
    #[arg(long)]
    pub centered: bool,
    /// Limit transform instead of finite n.
    #[arg(long)]
    pub limit: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value = "excursion")]
    pub kind: DensityKind,
    #[arg(long, default_value = "")]
    pub grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: usize,
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub grid: String,
    #[arg(long, env = SEED_ENV, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "cycle")]
    pub mode: SamplerMode,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-sample `(F, G)` rows.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Outcome of a subcommand before it becomes an exit code.
enum Failure {
    Usage(String),
    Check(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::InvalidPartition(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// `f64` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_list(s: &str, name: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("--{name}: {p:?}: {e}"))))
        .collect()
}

fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

/// Parse `argv` (including the program name) and run. Output goes to `out`,
/// diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Check(m)) => {
            let _ = writeln!(err, "check failed: {m}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "i/o error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Count(a) => count(a, out),
        Command::Enumerate(a) => enumerate(a, out),
        Command::Sample(a) => sample(a, out),
        Command::VerifyIdentities(a) => verify(a, out, err),
        Command::Sulanke(a) => sulanke(a, out),
        Command::Laplace(a) => laplace(a, out),
        Command::Density(a) => density(a, out),
        Command::Mc(a) => mc(a, out, err),
    }
}

fn count(a: CountArgs, out: &mut dyn Write) -> Outcome {
    let value = |n: usize| -> std::result::Result<String, Failure> {
        Ok(match a.kind {
            CountKind::Motzkin => motzkin_number(n)?.to_string(),
            CountKind::Catalan => catalan(n as u64).to_string(),
        })
    };
    let range: Vec<usize> = if a.all { (0..=a.n).collect() } else { vec![a.n] };
    for n in range {
        let v = value(n)?;
        match a.format {
            Format::Text => writeln!(out, "{v}")?,
            Format::Json => writeln!(out, "{}", json!({ "n": n, "kind": format!("{:?}", a.kind).to_lowercase(), "value": v }))?,
        }
    }
    Ok(true)
}

fn enumerate(a: EnumerateArgs, out: &mut dyn Write) -> Outcome {
    let mut out = BufWriter::new(out);
    for p in enumerate_paths(a.n) {
        match a.format {
            Format::Text => writeln!(out, "{}", p.to_text())?,
            Format::Json => writeln!(out, "{}", p.to_json_value())?,
        }
    }
    out.flush()?;
    Ok(true)
}

fn sample(a: SampleArgs, out: &mut dyn Write) -> Outcome {
    let workers = a.workers.unwrap_or_else(default_workers).max(1);
    let sampler = UniformSampler::new(a.n, a.mode);
    let mut out = BufWriter::new(out);
    // Worker streams in worker order, the same paths as `sample_many`.
    for (w, quota) in worker_quotas(a.samples, workers).into_iter().enumerate() {
        let mut rng = RandomSource::for_worker(a.seed, w);
        for _ in 0..quota {
            let p = sampler.sample(&mut rng);
            match a.format {
                Format::Text => writeln!(out, "{}", p.to_text())?,
                Format::Json => writeln!(out, "{}", p.to_json_value())?,
            }
        }
    }
    out.flush()?;
    Ok(true)
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let config = IdentityConfig { max_n: a.max_n, trials: a.trials, seed: a.seed };
    let records = match &a.suite {
        Some(name) => run_suite(name, &config).expect("validated by clap")?,
        None => run_all(&config)?,
    };
    let pass = records.iter().all(|r| r.pass);
    write_json(out, &json!({ "config": config, "pass": pass, "records": records }))?;
    for r in records.iter().filter(|r| !r.pass) {
        writeln!(err, "FAIL {} n={} err={} tol={}", r.identity, r.n, fmt_f64(r.max_rel_err), r.tolerance)?;
    }
    Ok(pass)
}

fn sulanke(a: SulankeArgs, out: &mut dyn Write) -> Outcome {
    if a.coeffs {
        let c = sulanke_coeffs(a.n)?;
        match a.format {
            Format::Text => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", parts.join(" "))?;
            }
            Format::Json => write_json(out, &json!({ "n": a.n, "coeffs": c }))?,
        }
        return Ok(true);
    }
    let e = sulanke_evaluators(a.n, a.t);
    let pass = e.max_rel_err <= SULANKE_TOLERANCE;
    match a.format {
        Format::Text => writeln!(out, "{}", fmt_f64(e.recurrence))?,
        Format::Json => write_json(out, &json!({ "value": e.recurrence, "evaluators": e, "pass": pass }))?,
    }
    Ok(pass)
}

fn emit_value(out: &mut dyn Write, format: Format, value: f64, detail: serde_json::Value) -> std::io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{}", fmt_f64(value)),
        Format::Json => {
            let mut obj = detail;
            obj["value"] = json!(value);
            write_json(out, &obj)
        }
    }
}

fn laplace(a: LaplaceArgs, out: &mut dyn Write) -> Outcome {
    let grid = TimeGrid::parse(&a.grid)?;
    let blocks = grid.d() + 1;
    let w = match &a.w {
        Some(s) => parse_list(s, "w")?,
        None => vec![0.0; blocks],
    };
    let z = a.z.as_deref().map(|s| parse_list(s, "z")).transpose()?;
    let detail = json!({ "n": a.n, "grid": grid.times(), "w": w, "z": z, "centered": a.centered, "limit": a.limit });
    let value = if a.limit {
        if a.n.is_some() {
            return Err(Failure::Usage("--limit takes no --n".into()));
        }
        let z = z.unwrap_or_else(|| vec![0.0; blocks]);
        limit_laplace(&grid, &z, &w)?
    } else {
        let n = a.n.ok_or_else(|| Failure::Usage("--n is required unless --limit is given".into()))?;
        match z {
            Some(z) => laplace_joint(n, &grid, &z, &w)?,
            None if a.centered => laplace_level_increments_centered(n, &grid, &w)?,
            None => laplace_level_increments(n, &grid, &w)?,
        }
    };
    emit_value(out, a.format, value, detail)?;
    Ok(true)
}

fn density(a: DensityArgs, out: &mut dyn Write) -> Outcome {
    let x = parse_list(&a.x, "x")?;
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this density")));
    let single = |x: &[f64]| -> std::result::Result<f64, Failure> {
        match x {
            [v] => Ok(*v),
            _ => Err(Failure::Usage("--x takes one value for this density".into())),
        }
    };
    let value = match a.kind {
        DensityKind::Fbm => fbm_density(need(a.t, "t")?, single(&x)?)?,
        DensityKind::Transition => fbm_transition(need(a.s, "s")?, single(&x)?, need(a.t, "t")?, need(a.y, "y")?)?,
        DensityKind::Excursion => excursion_fdd_density(&TimeGrid::parse(&a.grid)?, &x)?,
        DensityKind::Limit => limit_density(&TimeGrid::parse(&a.grid)?, &x)?,
    };
    let detail = json!({ "kind": format!("{:?}", a.kind).to_lowercase(), "grid": a.grid, "x": x, "s": a.s, "t": a.t, "y": a.y });
    emit_value(out, a.format, value, detail)?;
    Ok(true)
}

fn mc(a: McArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let grid = TimeGrid::parse(&a.grid)?;
    let config = McConfig {
        n: a.n,
        samples: a.samples,
        grid,
        seed: a.seed,
        workers: a.workers.unwrap_or_else(default_workers).max(1),
        mode: a.mode,
        bands: McBands::default(),
    };
    let outcome = run_mc(&config)?;
    match &a.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            write_json(&mut f, &outcome.report)?;
            f.flush()?;
        }
        None => write_json(out, &outcome.report)?,
    }
    if let Some(path) = &a.csv {
        let mut f = BufWriter::new(File::create(path)?);
        outcome.samples.write_csv(&mut f)?;
        f.flush()?;
    }
    for c in outcome.report.checks.iter().filter(|c| !c.pass) {
        writeln!(err, "FAIL {} t={:?} value={} reference={} band={}", c.name, c.t, fmt_f64(c.value), c.reference, c.band)?;
    }
    Ok(outcome.report.pass)
}
