//! The `pivotlab` command line.
//!
//! Every subcommand is a thin wrapper: it validates flags, calls into the
//! library and renders rows as CSV (10 significant digits) or JSON (shortest
//! round-trip binary64). Exit codes: 0 success, 2 usage, 3 I/O.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::ensembles::{sample, EnsembleSpec, Family, Matrix, MatrixJson};
use crate::error::Error;
use crate::exact::{self, AreaMethod, SphereRegion};
use crate::gepp::{factorize, PivotRule};
use crate::montecarlo::{self, EstimateResult, McOptions};
use crate::rng::RandomStream;

pub const SEED_ENV: &str = "PIVOTLAB_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Column order of every estimate CSV.
pub const ESTIMATE_HEADER: &str = "label,beta,rule,trials,p_hat,std_err,ci_lo,ci_hi,seed";

#[derive(Debug, Parser)]
#[command(
    name = "pivotlab",
    version,
    about = "Pivot-movement probabilities for GEPP on random matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form pivot probabilities and quadrature cross-checks.
    Exact(ExactArgs),
    /// Monte Carlo estimate of the first-step swap probability.
    Estimate(EstimateArgs),
    /// Monte Carlo estimates of P(|Z_1|+...+|Z_b| > sqrt2 |Z_{b+1}|), b = 1..10.
    Table1(Table1Args),
    /// Exact 2x2 β-Hermite pivot probability over a β grid.
    Sweep(SweepArgs),
    /// Uniform points on the unit sphere labelled by pivot region.
    Regions(RegionsArgs),
    /// Factor one sampled (or supplied) matrix and report PA = LU diagnostics.
    Factorize(FactorizeArgs),
    /// Histogram of GEPP-induced permutations, swap and cycle counts.
    Census(CensusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    L1,
    Modulus,
}

impl From<RuleArg> for PivotRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::L1 => PivotRule::L1,
            RuleArg::Modulus => PivotRule::Modulus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    Iid,
    Goe,
    Gue,
    Gse,
    Hbeta,
}

impl From<EnsembleArg> for Family {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Iid => Family::IidGaussian,
            EnsembleArg::Goe => Family::Goe,
            EnsembleArg::Gue => Family::Gue,
            EnsembleArg::Gse => Family::Gse,
            EnsembleArg::Hbeta => Family::HBeta,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Random seed; falls back to $PIVOTLAB_SEED, then 0.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Cap on worker threads. Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl SeedArgs {
    fn options(&self) -> Result<McOptions, CliError> {
        match self.workers {
            Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
            w => Ok(McOptions {
                workers: w,
                ..McOptions::default()
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Report p_β for the 2x2 β-Hermite ensemble at this β.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Report the 2x2 GUE swap probability under L1 pivoting.
    #[arg(long)]
    pub gue_l1: bool,
    /// Report spherical-area quadrature cross-checks.
    #[arg(long)]
    pub quadrature: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleSel {
    #[arg(long, value_enum, default_value = "gue")]
    pub ensemble: EnsembleArg,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// β for the hbeta ensemble.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value = "l1")]
    pub rule: RuleArg,
}

impl EnsembleSel {
    fn spec(&self, beta: Option<f64>) -> Result<EnsembleSpec, CliError> {
        Ok(EnsembleSpec::new(self.ensemble.into(), self.n, beta)?)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub sel: EnsembleSel,
    /// β grid LO:HI:STEP (hbeta only); one row per grid point.
    #[arg(long, conflicts_with = "beta")]
    pub beta_range: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// β grid LO:HI:STEP with 0 < LO < HI.
    #[arg(long, required_unless_present = "beta", conflicts_with = "beta")]
    pub beta_range: Option<String>,
    /// Single β instead of a grid.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    /// Number of points.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub sel: EnsembleSel,
    /// Factor the matrix in this JSON file instead of sampling one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Random seed; falls back to $PIVOTLAB_SEED, then 0.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub sel: EnsembleSel,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Formats `v` with 10 significant digits, keeping trailing zeros.
pub fn fmt_sig10(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    // rounding can carry into the next decade (9.9999999999 -> 10.00000000)
    let decimals = 9 - exp;
    let s = if (0..=20).contains(&decimals) {
        format!("{v:.*}", decimals as usize)
    } else {
        return format!("{v:.9e}");
    };
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if digits > 10 && decimals > 0 {
        format!("{v:.*}", decimals as usize - 1)
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

pub fn estimate_csv_row(r: &EstimateResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.label,
        fmt_opt(r.beta),
        r.rule.map(|x| x.name()).unwrap_or(""),
        r.trials,
        fmt_sig10(r.p_hat),
        fmt_sig10(r.std_err),
        fmt_sig10(r.ci95.0),
        fmt_sig10(r.ci95.1),
        r.seed
    )
}

fn render_estimates(rows: &[EstimateResult], format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => {
            let mut s = String::from(ESTIMATE_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&estimate_csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(rows)?,
    })
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

/// Parses `LO:HI:STEP` into grid points `LO, LO+STEP, …, ≤ HI`.
pub fn parse_beta_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid --beta-range '{text}', expected LO:HI:STEP with 0 < LO < HI, STEP > 0"
        ))
    };
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if !(lo > 0.0 && hi > lo && step > 0.0 && hi.is_finite()) {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(bad());
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

fn check_beta(beta: f64) -> Result<f64, CliError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(beta)
    } else {
        Err(CliError::Usage(format!("--beta must be positive, got {beta}")))
    }
}

fn check_trials(trials: u64) -> Result<u64, CliError> {
    if trials == 0 {
        Err(CliError::Usage("--trials must be positive".into()))
    } else {
        Ok(trials)
    }
}

#[derive(Serialize)]
struct ExactRow {
    quantity: String,
    value: f64,
    method: &'static str,
}

pub fn cmd_exact(args: &ExactArgs) -> Result<String, CliError> {
    let mut rows = Vec::new();
    let everything = args.beta.is_none() && !args.gue_l1 && !args.quadrature;
    let betas: Vec<f64> = match args.beta {
        Some(b) => vec![check_beta(b)?],
        None if everything => vec![1.0, 2.0, 4.0],
        None => vec![],
    };
    for b in betas {
        rows.push(ExactRow {
            quantity: format!("p_hbeta[beta={b}]"),
            value: exact::pivot_prob_hbeta(b)?,
            method: "incomplete_beta",
        });
    }
    if args.gue_l1 || everything {
        rows.push(ExactRow {
            quantity: "p_gue_l1".into(),
            value: exact::gue_l1_pivot_prob(),
            method: "closed_form",
        });
    }
    if args.quadrature || everything {
        for (region, name) in [
            (SphereRegion::L1Cone, "l1_cone"),
            (SphereRegion::ModulusCone, "modulus_cone"),
        ] {
            rows.push(ExactRow {
                quantity: format!("sphere_fraction[{name}]"),
                value: exact::spherical_area_quadrature(region),
                method: "quadrature_folded",
            });
            rows.push(ExactRow {
                quantity: format!("sphere_fraction[{name}]"),
                value: exact::first_octant_area(region, AreaMethod::Raw) / std::f64::consts::FRAC_PI_2,
                method: "quadrature_2d",
            });
        }
    }
    Ok(match args.out.format {
        Format::Csv => {
            let mut s = String::from("quantity,value,method\n");
            for r in &rows {
                s.push_str(&format!("{},{},{}\n", r.quantity, fmt_sig10(r.value), r.method));
            }
            s
        }
        Format::Json => to_json(&rows)?,
    })
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<String, CliError> {
    let trials = check_trials(args.trials)?;
    let opts = args.seed.options()?;
    let root = RandomStream::new(args.seed.seed, 0);
    let rule = args.sel.rule.into();
    let rows = match &args.beta_range {
        Some(range) => {
            if args.sel.ensemble != EnsembleArg::Hbeta {
                return Err(CliError::Usage("--beta-range applies only to --ensemble hbeta".into()));
            }
            parse_beta_range(range)?
                .into_iter()
                .enumerate()
                .map(|(i, b)| {
                    let spec = args.sel.spec(Some(b))?;
                    let mut r = montecarlo::estimate_pivot_prob(&spec, rule, trials, &root.child(i as u64), &opts)?;
                    r.seed = args.seed.seed;
                    Ok(r)
                })
                .collect::<Result<Vec<_>, CliError>>()?
        }
        None => {
            let spec = args.sel.spec(args.sel.beta)?;
            vec![montecarlo::estimate_pivot_prob(&spec, rule, trials, &root, &opts)?]
        }
    };
    render_estimates(&rows, args.out.format)
}

pub fn cmd_table1(args: &Table1Args) -> Result<String, CliError> {
    let trials = check_trials(args.trials)?;
    let rows = montecarlo::table1_sweep(trials, &RandomStream::new(args.seed.seed, 0), &args.seed.options()?)?;
    render_estimates(&rows, args.out.format)
}

#[derive(Serialize)]
struct SweepRow {
    beta: f64,
    p_exact: f64,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let grid = match (&args.beta_range, args.beta) {
        (Some(r), _) => parse_beta_range(r)?,
        (None, Some(b)) => vec![check_beta(b)?],
        (None, None) => return Err(CliError::Usage("sweep needs --beta-range or --beta".into())),
    };
    let rows = grid
        .into_iter()
        .map(|beta| {
            Ok(SweepRow {
                beta,
                p_exact: exact::pivot_prob_hbeta(beta)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match args.out.format {
        Format::Csv => {
            let mut s = String::from("beta,p_exact\n");
            for r in &rows {
                s.push_str(&format!("{},{}\n", r.beta, fmt_sig10(r.p_exact)));
            }
            s
        }
        Format::Json => to_json(&rows)?,
    })
}

#[derive(Serialize)]
struct RegionRow {
    x: f64,
    y: f64,
    z: f64,
    in_l1_region: u8,
    in_modulus_region: u8,
}

pub fn cmd_regions(args: &RegionsArgs) -> Result<String, CliError> {
    let count = check_trials(args.trials)?;
    let pts = montecarlo::sphere_region_samples(count, &RandomStream::new(args.seed.seed, 0), &args.seed.options()?)?;
    Ok(match args.out.format {
        Format::Csv => {
            let mut s = String::with_capacity(60 * pts.len() + 64);
            s.push_str("x,y,z,in_l1_region,in_modulus_region\n");
            for p in &pts {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_sig10(p.x),
                    fmt_sig10(p.y),
                    fmt_sig10(p.z),
                    u8::from(p.in_l1_region),
                    u8::from(p.in_modulus_region)
                ));
            }
            s
        }
        Format::Json => {
            let rows: Vec<RegionRow> = pts
                .iter()
                .map(|p| RegionRow {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    in_l1_region: p.in_l1_region.into(),
                    in_modulus_region: p.in_modulus_region.into(),
                })
                .collect();
            to_json(&rows)?
        }
    })
}

/// Relative residual budget for `PA = LU`: `1e-12 · n · max|a_ij|`.
pub fn residual_bound(a: &Matrix) -> f64 {
    1e-12 * a.n() as f64 * a.max_modulus()
}

pub fn cmd_factorize(args: &FactorizeArgs) -> Result<String, CliError> {
    let a = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let j: MatrixJson =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad matrix file: {e}")))?;
            Matrix::from_json(&j)?
        }
        None => {
            let spec = args.sel.spec(args.sel.beta)?;
            sample(&spec, &mut RandomStream::new(args.seed, 0))?
        }
    };
    let rule: PivotRule = args.sel.rule.into();
    let f = factorize(&a, rule);
    let residual = f.residual(&a)?;
    let bound = residual_bound(&a);
    let report = json!({
        "n": a.n(),
        "ensemble": a.spec(),
        "rule": rule,
        "seed": args.input.is_none().then_some(args.seed),
        "perm": f.perm.one_based(),
        "pivots": f.pivots.iter().map(|p| p + 1).collect::<Vec<_>>(),
        "swaps": f.swaps,
        "cycles": f.cycle_count(),
        "singular": f.singular,
        "residual": residual,
        "max_abs_entry": a.max_modulus(),
        "residual_bound": bound,
        "within_bound": residual <= bound,
        "matrix": a.to_json(),
    });
    to_json(&report)
}

pub fn cmd_census(args: &CensusArgs) -> Result<String, CliError> {
    let trials = check_trials(args.trials)?;
    let spec = args.sel.spec(args.sel.beta)?;
    let c = montecarlo::permutation_census(
        &spec,
        args.sel.rule.into(),
        trials,
        &RandomStream::new(args.seed.seed, 0),
        &args.seed.options()?,
    )?;
    Ok(match args.out.format {
        Format::Csv => {
            let t = c.trials as f64;
            let mut s = String::from("section,key,count,frequency\n");
            if let Some(h) = &c.permutations {
                for (perm, &count) in h {
                    let key: Vec<String> = perm.iter().map(ToString::to_string).collect();
                    s.push_str(&format!(
                        "permutation,{},{},{}\n",
                        key.join(" "),
                        count,
                        fmt_sig10(count as f64 / t)
                    ));
                }
            }
            for (k, &count) in c.swaps.iter().enumerate() {
                s.push_str(&format!("swaps,{k},{count},{}\n", fmt_sig10(count as f64 / t)));
            }
            for (k, &count) in c.cycles.iter().enumerate().skip(1) {
                s.push_str(&format!("cycles,{k},{count},{}\n", fmt_sig10(count as f64 / t)));
            }
            s
        }
        Format::Json => to_json(&c)?,
    })
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Exact(a) => emit(&cmd_exact(a)?, a.out.output.as_ref(), stdout),
        Command::Estimate(a) => emit(&cmd_estimate(a)?, a.out.output.as_ref(), stdout),
        Command::Table1(a) => emit(&cmd_table1(a)?, a.out.output.as_ref(), stdout),
        Command::Sweep(a) => emit(&cmd_sweep(a)?, a.out.output.as_ref(), stdout),
        Command::Regions(a) => emit(&cmd_regions(a)?, a.out.output.as_ref(), stdout),
        Command::Factorize(a) => emit(&cmd_factorize(a)?, a.output.as_ref(), stdout),
        Command::Census(a) => emit(&cmd_census(a)?, a.out.output.as_ref(), stdout),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("pivotlab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig10_formatting() {
        assert_eq!(fmt_sig10(1.0 / 3f64.sqrt()), "0.5773502692");
        assert_eq!(fmt_sig10(2.0 / 3.0), "0.6666666667");
        assert_eq!(fmt_sig10(4.0 / (3.0 * 3f64.sqrt())), "0.7698003589");
        assert_eq!(fmt_sig10(0.5), "0.5000000000");
        assert_eq!(fmt_sig10(-0.25), "-0.2500000000");
        assert_eq!(fmt_sig10(0.000471404520791), "0.0004714045208");
        assert_eq!(fmt_sig10(12.5), "12.50000000");
        assert_eq!(fmt_sig10(0.99999999999), "1.000000000");
        assert_eq!(fmt_sig10(0.0), "0");
        assert_eq!(fmt_sig10(1e-30), "1.000000000e-30");
    }

    #[test]
    fn beta_range_parsing() {
        let g = parse_beta_range("0.5:8:0.25").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], 0.5);
        assert_eq!(*g.last().unwrap(), 8.0);
        assert!(parse_beta_range("0:8:0.25").is_err());
        assert!(parse_beta_range("2:1:0.25").is_err());
        assert!(parse_beta_range("1:2:0").is_err());
        assert!(parse_beta_range("1:2").is_err());
        assert!(parse_beta_range("a:2:1").is_err());
    }
}
