//! Command-line front-end for `hdr-core`.
//!
//! Everything except process exit lives here so the commands can be driven
//! from tests without spawning a binary.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdr_core::format::fmt_sig;
use hdr_core::{
    disparities, hdr_for_family, hdr_updown_grid, intensity, level_set, variance_ci, CiResult,
    Family, GridSpec, HdrError, HdrResult, OptimizerConfig, Params, VariancePivot,
};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DIGITS: usize = 15;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<HdrError> for CliError {
    /// Bad names, parameters and probabilities are the caller's fault;
    /// everything else is a failed computation.
    fn from(e: HdrError) -> Self {
        match e {
            HdrError::UnknownFamily(_)
            | HdrError::UnknownParameter { .. }
            | HdrError::MissingParameter { .. }
            | HdrError::ParameterDomain { .. }
            | HdrError::CoverDomain(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "hdrtool",
    version,
    about = "Highest density regions and shortest confidence intervals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the HDR of a named distribution
    Hdr(HdrArgs),
    /// Shortest confidence intervals
    #[command(subcommand)]
    Ci(CiCommand),
    /// Probability mass of the density super-level set {x : f(x) >= a}
    Intensity(IntensityArgs),
    /// Accuracy and throughput over a set of benchmark distributions
    Benchmark(BenchmarkArgs),
}

#[derive(Subcommand, Debug)]
pub enum CiCommand {
    /// Shortest CI for a normal variance from the sum of squared deviations
    Variance(VarianceArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotArg {
    Chisq,
    Invgamma,
}

#[derive(Args, Debug, Clone)]
pub struct DistArgs {
    /// Distribution family, e.g. chisq, gamma, beta
    #[arg(long)]
    pub dist: String,
    /// Family parameter as key=value (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

impl DistArgs {
    fn params(&self) -> Params {
        self.params.iter().cloned().collect()
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub gradtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub steptol: f64,
    #[arg(long, default_value_t = 100)]
    pub iterlim: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<OptimizerConfig, CliError> {
        if !(self.gradtol > 0.0 && self.steptol > 0.0 && self.iterlim > 0) {
            return Err(CliError::Usage(
                "--gradtol, --steptol and --iterlim must be positive".into(),
            ));
        }
        Ok(OptimizerConfig {
            gradtol: self.gradtol,
            steptol: self.steptol,
            iterlim: self.iterlim,
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct HdrArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Minimum coverage probability in [0, 1]
    #[arg(long)]
    pub cover: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VarianceArgs {
    /// Sample size
    #[arg(long)]
    pub n: usize,
    /// Sum of squared deviations from the sample mean
    #[arg(long)]
    pub sumsq: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = PivotArg::Chisq)]
    pub pivot: PivotArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone)]
pub struct IntensityArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Density level
    #[arg(long)]
    pub at: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Args, Debug, Clone)]
pub struct BenchmarkArgs {
    /// Cases as family:key=value,key=value (repeatable); defaults to four
    /// reference cases
    #[arg(long = "cases", value_name = "CASE", num_args = 1..)]
    pub cases: Vec<String>,
    #[arg(long, default_value_t = 0.95)]
    pub cover: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Also compare boundaries against the grid oracle
    #[arg(long)]
    pub oracle: bool,
    /// Report speed relative to sorting 10^6 integers (machine dependent)
    #[arg(long)]
    pub baseline: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
}

pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty parameter name in '{s}'"));
    }
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("parameter '{k}' has non-numeric value '{v}'"))?;
    Ok((k.to_string(), v))
}

/// Parse `family` or `family:key=value,key=value`.
pub fn parse_case(s: &str) -> Result<(String, Params), CliError> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = Params::new();
    for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = parse_param(kv).map_err(CliError::Usage)?;
        params.insert(k, v);
    }
    Ok((name.trim().to_string(), params))
}

fn case_name(name: &str, params: &Params) -> String {
    if params.is_empty() {
        return name.to_string();
    }
    let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{name}({})", inner.join(","))
}

// ---------------------------------------------------------------------------
// hdr

/// Human-readable rendering of an HDR.
pub fn render_text(result: &HdrResult) -> String {
    let mut out = String::new();
    out.push_str("\n        Highest Density Region (HDR)\n\n");
    let _ = writeln!(
        out,
        "{:.2}% HDR for {}",
        100.0 * result.cover_prob,
        result.description
    );
    if !result.method.is_empty() {
        let _ = writeln!(out, "{}", result.method);
    }
    out.push('\n');
    if result.is_empty() {
        out.push_str("{}\n");
    } else {
        for part in result.region.parts() {
            let _ = writeln!(out, "{part}");
        }
        if !result.points.is_empty() {
            let pts: Vec<String> = result.points.iter().map(|&p| fmt_sig(p, DIGITS)).collect();
            let _ = writeln!(out, "{{{}}}", pts.join(", "));
        }
    }
    out.push('\n');
    out
}

pub fn render_json(result: &HdrResult) -> String {
    serde_json::to_string_pretty(result).expect("HdrResult serialises")
}

pub fn run_hdr(args: &HdrArgs) -> Result<String, CliError> {
    let cfg = args.solver.config()?;
    let r = hdr_for_family(&args.dist.dist, &args.dist.params(), args.cover, &cfg)?;
    Ok(match args.format {
        OutputFormat::Text => render_text(&r),
        OutputFormat::Json => render_json(&r) + "\n",
    })
}

// ---------------------------------------------------------------------------
// ci variance

pub fn render_ci_text(ci: &CiResult, n: usize, pivot: PivotArg) -> String {
    let pivot = match pivot {
        PivotArg::Chisq => "chi-squared",
        PivotArg::Invgamma => "inverse gamma",
    };
    let mut out = String::new();
    out.push_str("\n        Shortest Confidence Interval\n\n");
    let _ = writeln!(
        out,
        "{:.2}% CI for the variance of a normal sample of size {n} ({pivot} pivot)",
        100.0 * ci.level
    );
    if !ci.method.is_empty() {
        let _ = writeln!(out, "{}", ci.method);
    }
    let _ = writeln!(out, "\n{}\n", ci.interval);
    out
}

pub fn ci_json(ci: &CiResult) -> serde_json::Value {
    json!({
        "interval": [fmt_sig(ci.interval.lower(), DIGITS).parse::<f64>().unwrap_or(f64::NAN),
                     fmt_sig(ci.interval.upper(), DIGITS).parse::<f64>().unwrap_or(f64::NAN)],
        "level": ci.level,
        "theta": hdr_core::format::round_sig(ci.theta, DIGITS),
        "pivot_interval": [hdr_core::format::round_sig(ci.pivot_lower, DIGITS),
                           hdr_core::format::round_sig(ci.pivot_upper, DIGITS)],
        "method": ci.method,
        "iterations": ci.iterations,
        "code": ci.code.map(|c| c.code()),
    })
}

pub fn run_ci_variance(args: &VarianceArgs) -> Result<String, CliError> {
    let cfg = args.solver.config()?;
    if args.n < 2 {
        return Err(CliError::Usage(format!(
            "--n must be at least 2, got {}",
            args.n
        )));
    }
    if !(args.sumsq > 0.0 && args.sumsq.is_finite()) {
        return Err(CliError::Usage(format!(
            "--sumsq must be positive, got {}",
            args.sumsq
        )));
    }
    if !(0.0..=1.0).contains(&args.level) {
        return Err(CliError::Usage(format!(
            "--level must lie in [0, 1], got {}",
            args.level
        )));
    }
    let pivot = match args.pivot {
        PivotArg::Chisq => VariancePivot::ChisqPivot,
        PivotArg::Invgamma => VariancePivot::InvGammaPivot,
    };
    let ci = variance_ci(args.n, args.sumsq, args.level, pivot, &cfg)?;
    Ok(match args.format {
        OutputFormat::Text => render_ci_text(&ci, args.n, args.pivot),
        OutputFormat::Json => serde_json::to_string_pretty(&ci_json(&ci)).expect("json") + "\n",
    })
}

// ---------------------------------------------------------------------------
// intensity

pub fn run_intensity(args: &IntensityArgs) -> Result<String, CliError> {
    let fam = Family::parse(&args.dist.dist, &args.dist.params())?;
    let bundle = fam.bundle();
    let shape = fam.shape()?;
    let h = intensity(&bundle, &shape, args.at)?;
    let set = level_set(&bundle, &shape, args.at)?;
    Ok(match args.format {
        OutputFormat::Text => format!(
            "H({}) = {} for {}\nlevel set {}\n",
            fmt_sig(args.at, DIGITS),
            fmt_sig(h, DIGITS),
            fam.description(),
            set
        ),
        OutputFormat::Json => {
            let v = json!({
                "at": args.at,
                "intensity": hdr_core::format::round_sig(h, DIGITS),
                "level_set": set,
                "distribution": fam.description(),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    })
}

// ---------------------------------------------------------------------------
// benchmark

pub const DEFAULT_CASES: [&str; 4] = [
    "chisq:df=4,ncp=2",
    "gamma:shape=3,scale=4",
    "beta:shape1=0.4,shape2=0.6",
    "beta:shape1=0.03,shape2=0.05",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub case_name: String,
    pub prob_disparity: f64,
    pub density_disparity: f64,
    pub interval_count: usize,
    pub outside_support: bool,
    /// HDRs per second.
    pub throughput: f64,
    /// HDRs computed in the time of one baseline sort.
    pub relative_speed: Option<f64>,
    /// Largest boundary distance to the grid oracle, in grid cells.
    pub oracle_cells: Option<f64>,
    pub skipped: Option<String>,
}

impl BenchmarkRow {
    fn skipped(case_name: String, reason: String) -> Self {
        Self {
            case_name,
            prob_disparity: f64::NAN,
            density_disparity: f64::NAN,
            interval_count: 0,
            outside_support: false,
            throughput: f64::NAN,
            relative_speed: None,
            oracle_cells: None,
            skipped: Some(reason),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkOptions {
    pub cases: Vec<(String, Params)>,
    pub cover: f64,
    pub reps: usize,
    pub oracle: bool,
    pub baseline: bool,
}

/// Seconds to sort 10^6 pseudo-random integers into descending order.
pub fn baseline_seconds() -> f64 {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut v: Vec<u64> = (0..1_000_000)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        })
        .collect();
    let start = Instant::now();
    v.sort_unstable_by(|a, b| b.cmp(a));
    std::hint::black_box(&v);
    start.elapsed().as_secs_f64()
}

fn oracle_gap(bundle: &hdr_core::ProbabilityBundle, r: &HdrResult, cover: f64) -> Option<f64> {
    let grid = GridSpec::for_bundle(bundle, hdr_core::oracle::DEFAULT_GRID_SIZE).ok()?;
    let reference = hdr_updown_grid(cover, bundle, &grid).ok()?;
    let (a, b) = (r.region.boundary_points(), reference.boundary_points());
    if a.len() != b.len() {
        return Some(f64::INFINITY);
    }
    let h = grid.cell_width();
    Some(
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs() / h)
            .fold(0.0, f64::max),
    )
}

pub fn run_benchmark(opts: &BenchmarkOptions) -> Result<Vec<BenchmarkRow>, CliError> {
    if !(0.0..=1.0).contains(&opts.cover) {
        return Err(HdrError::CoverDomain(opts.cover).into());
    }
    if opts.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    let cfg = OptimizerConfig::default();
    let baseline = opts.baseline.then(baseline_seconds);
    let mut rows = Vec::new();
    for (name, params) in &opts.cases {
        let label = case_name(name, params);
        let fam = match Family::parse(name, params) {
            Ok(f) => f,
            Err(e @ HdrError::Unsupported(_)) => {
                rows.push(BenchmarkRow::skipped(label, e.to_string()));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let bundle = fam.bundle();
        let first = match hdr_for_family(name, params, opts.cover, &cfg) {
            Ok(r) => r,
            Err(e) => {
                rows.push(BenchmarkRow::skipped(label, e.to_string()));
                continue;
            }
        };
        let start = Instant::now();
        for _ in 0..opts.reps {
            let r = hdr_for_family(name, params, opts.cover, &cfg)?;
            std::hint::black_box(&r);
        }
        let secs = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        let throughput = opts.reps as f64 / secs;

        // scored from F and f alone
        let d = disparities(&bundle, &first.region, opts.cover);
        rows.push(BenchmarkRow {
            case_name: label,
            prob_disparity: d.prob,
            density_disparity: d.density.unwrap_or(f64::NAN),
            interval_count: d.interval_count,
            outside_support: d.outside_support,
            throughput,
            relative_speed: baseline.map(|b| throughput * b),
            oracle_cells: if opts.oracle {
                oracle_gap(&bundle, &first, opts.cover)
            } else {
                None
            },
            skipped: None,
        });
    }
    Ok(rows)
}

fn sci(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:.3e}")
    }
}

fn opt_num(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "NA".into(), |v| format!("{v:.digits$}"))
}

pub fn render_rows_csv(rows: &[BenchmarkRow]) -> String {
    let mut out = String::from(
        "case,prob_disparity,density_disparity,intervals,outside_support,throughput,relative_speed,oracle_cells,skipped\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{},{},{},{},{}",
            r.case_name,
            sci(r.prob_disparity),
            sci(r.density_disparity),
            r.interval_count,
            r.outside_support,
            if r.throughput.is_nan() {
                "NA".into()
            } else {
                format!("{:.1}", r.throughput)
            },
            opt_num(r.relative_speed, 3),
            opt_num(r.oracle_cells, 2),
            r.skipped.as_deref().unwrap_or(""),
        );
    }
    out
}

pub fn render_rows_text(rows: &[BenchmarkRow], cover: f64) -> String {
    let width = rows
        .iter()
        .map(|r| r.case_name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = format!("Coverage {:.2}%\n", 100.0 * cover);
    let _ = writeln!(
        out,
        "{:<width$}  {:>10}  {:>10}  {:>4}  {:>7}  {:>12}  {:>8}  {:>6}",
        "case", "prob disp", "dens disp", "ints", "outside", "HDRs/s", "rel spd", "cells"
    );
    for r in rows {
        if let Some(why) = &r.skipped {
            let _ = writeln!(out, "{:<width$}  skipped: {why}", r.case_name);
            continue;
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:>4}  {:>7}  {:>12.1}  {:>8}  {:>6}",
            r.case_name,
            sci(r.prob_disparity),
            sci(r.density_disparity),
            r.interval_count,
            if r.outside_support { "yes" } else { "no" },
            r.throughput,
            opt_num(r.relative_speed, 3),
            opt_num(r.oracle_cells, 2),
        );
    }
    out
}

pub fn run_benchmark_command(args: &BenchmarkArgs) -> Result<String, CliError> {
    let specs: Vec<&str> = if args.cases.is_empty() {
        DEFAULT_CASES.to_vec()
    } else {
        args.cases.iter().map(String::as_str).collect()
    };
    let cases = specs
        .into_iter()
        .map(parse_case)
        .collect::<Result<Vec<_>, _>>()?;
    let opts = BenchmarkOptions {
        cases,
        cover: args.cover,
        reps: args.reps,
        oracle: args.oracle,
        baseline: args.baseline,
    };
    let rows = run_benchmark(&opts)?;
    Ok(match args.format {
        TableFormat::Csv => render_rows_csv(&rows),
        TableFormat::Text => render_rows_text(&rows, args.cover),
    })
}

// ---------------------------------------------------------------------------

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Hdr(a) => run_hdr(a),
        Command::Ci(CiCommand::Variance(a)) => run_ci_variance(a),
        Command::Intensity(a) => run_intensity(a),
        Command::Benchmark(a) => run_benchmark_command(a),
    }
}

/// Outcome of one invocation: exit code plus the text bound for stdout and
/// stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => {
            let mut stderr = format!("error: {}\n", e.message());
            if let CliError::Usage(_) = e {
                stderr.push_str("\nFor more information, try '--help'.\n");
            }
            Outcome {
                code: e.exit_code(),
                stdout: String::new(),
                stderr,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse() {
        assert_eq!(parse_param("df=30").unwrap(), ("df".to_string(), 30.0));
        assert!(parse_param("df").is_err());
        assert!(parse_param("df=abc").is_err());
        assert!(parse_param("=3").is_err());
    }

    #[test]
    fn cases_parse() {
        let (name, p) = parse_case("beta:shape1=0.4,shape2=0.6").unwrap();
        assert_eq!(name, "beta");
        assert_eq!(p["shape1"], 0.4);
        assert_eq!(p["shape2"], 0.6);
        let (name, p) = parse_case("normal").unwrap();
        assert_eq!(name, "normal");
        assert!(p.is_empty());
        assert_eq!(
            case_name("beta", &parse_case("beta:shape1=0.4,shape2=0.6").unwrap().1),
            "beta(shape1=0.4,shape2=0.6)"
        );
    }

    #[test]
    fn error_classes() {
        assert_eq!(
            CliError::from(HdrError::CoverDomain(1.5)).exit_code(),
            EXIT_USAGE
        );
        assert_eq!(
            CliError::from(HdrError::UnknownFamily("x".into())).exit_code(),
            EXIT_USAGE
        );
        assert_eq!(
            CliError::from(HdrError::MissingDensity).exit_code(),
            EXIT_COMPUTE
        );
    }

    #[test]
    fn text_rendering_frames_the_region() {
        let r = hdr_for_family(
            "chisq",
            &hdr_core::params([("df", 30.0)]),
            0.98,
            &OptimizerConfig::default(),
        )
        .unwrap();
        let text = render_text(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "");
        assert_eq!(lines[1].trim(), "Highest Density Region (HDR)");
        assert_eq!(
            lines[3],
            "98.00% HDR for chi-squared distribution with 30 degrees-of-freedom"
        );
        assert!(lines[4].starts_with("Computed using Newton optimisation with"));
        assert!(lines[6].starts_with("[13.93248651973"));
        assert!(text.ends_with("]\n\n"));
    }

    #[test]
    fn empty_region_renders_braces() {
        let r = hdr_for_family("normal", &Params::new(), 0.0, &OptimizerConfig::default()).unwrap();
        assert!(render_text(&r).contains("\n{}\n"));
    }

    #[test]
    fn baseline_is_positive() {
        assert!(baseline_seconds() > 0.0);
    }
}
