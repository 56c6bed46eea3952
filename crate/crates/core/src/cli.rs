//! `bernamp` command-line front end.
//!
//! Exit codes: 0 ok, 1 validation failure, 2 bad flags, 3 capacity guard,
//! 4 solver non-convergence, 5 I/O.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bern::{AmpParams, CornerDist};
use crate::bounds::{bounds_report_with, DEFAULT_REGIME_DELTA};
use crate::error::Error;
use crate::renyi::{r_alpha, Alpha};
use crate::solver::{exact_post, SolverConfig, SolverStatus, Strategy};
use crate::sweep::{
    run_sweep, write_csv, write_json, EpsGrid, EpsScale, ExactPolicy, OutputFormat, ParamsGrid, Preset, SweepSpec,
    AUTO_EXACT_MAX_D, AUTO_EXACT_MAX_DK,
};
use crate::validate::{self, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_MAX_ITERS: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Sets the worker-pool size when present.
pub const THREADS_ENV: &str = "BERNAMP_THREADS";

#[derive(Parser, Debug)]
#[command(name = "bernamp", version, about = "Privacy amplification of Rényi-DP parameters released via Bernoulli samples")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bounds at one point.
    Bounds(BoundsArgs),
    /// Exact amplification with its witness pair.
    Exact(ExactArgs),
    /// Bounds (and exact values) over a parameter grid.
    Sweep(SweepArgs),
    /// Built-in self-test.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    c: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Both)]
    solver: SolverArg,
    #[arg(long)]
    grid_steps: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let def = SolverConfig::default();
        SolverConfig {
            strategy: match self.solver {
                SolverArg::Grid => Strategy::DenseGrid,
                SolverArg::Multistart => Strategy::MultistartAscent,
                SolverArg::Both => Strategy::Both,
            },
            grid_steps: self.grid_steps.unwrap_or(def.grid_steps),
            restarts: self.restarts.unwrap_or(def.restarts),
            max_iters: self.max_iters.unwrap_or(def.max_iters),
            seed: self.seed.unwrap_or(def.seed),
            ..def
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = DEFAULT_REGIME_DELTA)]
    regime_delta: f64,
    #[command(flatten)]
    output: OutputArgs,
    /// Flat `key = value` file mirroring the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Allow instances beyond d <= 3, d*k <= 12.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Comma-separated lists; override the preset's values.
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long)]
    eps_steps: Option<usize>,
    #[arg(long, value_enum)]
    eps_scale: Option<ScaleArg>,
    #[arg(long, value_enum, default_value_t = ExactArg::Auto)]
    exact: ExactArg,
    #[arg(long, default_value_t = DEFAULT_REGIME_DELTA)]
    regime_delta: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    level: LevelArg,
    /// Run against a negated r_α to show the checks bite.
    #[arg(long, hide = true)]
    canary: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SolverArg {
    Grid,
    Multistart,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PresetArg {
    #[value(name = "paper-k1")]
    PaperK1,
    #[value(name = "paper-multik")]
    PaperMultik,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScaleArg {
    Log,
    Linear,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExactArg {
    Auto,
    Always,
    Never,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LevelArg {
    Fast,
    Full,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage { name, reason } => Failure::new(EXIT_USAGE, format!("--{}: {reason}", name.replace('_', "-"))),
            Error::Capacity { .. } => Failure::new(EXIT_CAPACITY, e.to_string()),
            other => Failure::new(EXIT_USAGE, other.to_string()),
        }
    }
}

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    let target = path.map_or("standard output".to_string(), |p| p.display().to_string());
    Failure::new(EXIT_IO, format!("cannot write {target}: {e}"))
}

/// Turns `key = value` lines into flags, skipping keys already given on the command line.
fn config_flags(path: &Path, given: &[String]) -> Result<Vec<OsString>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read --config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::new(EXIT_USAGE, format!("--config {}:{}: expected key = value", path.display(), n + 1))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.split(',').map(str::trim).collect::<Vec<_>>().join(",");
        let value = value.as_str();
        if key == "config" {
            return Err(Failure::new(EXIT_USAGE, "--config: nested config files are not supported"));
        }
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn parse(args: Vec<OsString>, stdout: &mut dyn Write) -> Result<Cli, Failure> {
    let mut args = args;
    if let Some(path) = find_config(&args) {
        if args.len() >= 2 {
            let given: Vec<String> = args
                .iter()
                .filter_map(|a| a.to_str()?.strip_prefix("--").map(|f| f.split('=').next().unwrap_or(f).to_string()))
                .collect();
            let extra = config_flags(&path, &given)?;
            let tail = args.split_off(2);
            args.extend(extra);
            args.extend(tail);
        }
    }
    Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = write!(stdout, "{}", e.render());
                Failure::new(EXIT_OK, String::new())
            }
            _ => {
                let rendered = e.render().to_string();
                let first = rendered.lines().next().unwrap_or("invalid arguments");
                let first = first.strip_prefix("error: ").unwrap_or(first).to_string();
                Failure::new(EXIT_USAGE, first)
            }
        }
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = parse(args, stdout).and_then(|cli| {
        configure_threads();
        match cli.command {
            Command::Bounds(a) => cmd_bounds(&a, stdout),
            Command::Exact(a) => cmd_exact(&a, stdout),
            Command::Sweep(a) => cmd_sweep(&a, stdout),
            Command::Validate(a) => cmd_validate(&a, stdout),
        }
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(stderr, "error: {}", f.message);
            }
            f.code
        }
    }
}

fn point_params(p: &PointArgs) -> Result<AmpParams, Failure> {
    let params = AmpParams::new(p.c, p.alpha, p.eps, p.d, p.k)?;
    params.require_interior()?;
    Ok(params)
}

/// Output sink, opened before any work so bad paths fail early.
fn open_output<'a>(out: &OutputArgs, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    match &out.out {
        None => Ok(Box::new(stdout)),
        Some(path) => {
            let f = File::create(path).map_err(|e| io_failure(Some(path), e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_bounds(a: &BoundsArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let params = point_params(&a.point)?;
    if !(a.regime_delta.is_finite() && a.regime_delta > 0.0) {
        return Err(Failure::new(EXIT_USAGE, "--regime-delta: must be finite and > 0"));
    }
    let b = bounds_report_with(&params, None, a.regime_delta)?;
    let mut w = open_output(&a.output, stdout)?;
    let path = a.output.out.as_deref();
    match a.output.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut w, &b).map_err(|e| io_failure(path, e.into()))?;
            writeln!(w).map_err(|e| io_failure(path, e))?;
        }
        FormatArg::Csv => {
            let mut cw = csv::Writer::from_writer(&mut w);
            let rows = [
                vec!["c", "alpha", "d", "k", "epsilon", "lower", "asymptote", "ppi", "gap", "regime"]
                    .into_iter()
                    .map(String::from)
                    .collect::<Vec<_>>(),
                vec![
                    num(params.c()),
                    num(params.alpha().value()),
                    params.d().to_string(),
                    params.k().to_string(),
                    num(b.eps),
                    num(b.lower_two_point),
                    num(b.upper_asymptote),
                    num(b.upper_ppi),
                    num(b.gap_upper_lower),
                    b.regime_hint.as_str().to_string(),
                ],
            ];
            for r in rows {
                cw.write_record(r).map_err(|e| io_failure(path, e.into()))?;
            }
            cw.flush().map_err(|e| io_failure(path, e))?;
        }
    }
    w.flush().map_err(|e| io_failure(path, e))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ExactReport {
    c: f64,
    alpha: f64,
    d: usize,
    k: usize,
    epsilon: f64,
    value: f64,
    status: &'static str,
    residual_pq: f64,
    residual_qp: f64,
    argmax_p: Vec<f64>,
    argmax_q: Vec<f64>,
}

fn linear_masses(p: &CornerDist) -> Vec<f64> {
    p.masses().to_linear()
}

fn cmd_exact(a: &ExactArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let params = point_params(&a.point)?;
    if !a.force && (params.d() > AUTO_EXACT_MAX_D || params.dk() > AUTO_EXACT_MAX_DK) {
        let (guard, limit, value) = if params.d() > AUTO_EXACT_MAX_D {
            ("exact dimension d (override with --force)", AUTO_EXACT_MAX_D, params.d())
        } else {
            ("exact size d*k (override with --force)", AUTO_EXACT_MAX_DK, params.dk())
        };
        return Err(Error::Capacity { guard, limit, value }.into());
    }
    let cfg = a.solver.config();
    cfg.validate()?;
    let mut w = open_output(&a.output, stdout)?;
    let r = exact_post(&params, &cfg)?;
    let rep = ExactReport {
        c: params.c(),
        alpha: params.alpha().value(),
        d: params.d(),
        k: params.k(),
        epsilon: params.eps(),
        value: r.value,
        status: r.status.as_str(),
        residual_pq: r.feasibility_residuals.0,
        residual_qp: r.feasibility_residuals.1,
        argmax_p: linear_masses(&r.argmax_p),
        argmax_q: linear_masses(&r.argmax_q),
    };
    let path = a.output.out.as_deref();
    match a.output.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut w, &rep).map_err(|e| io_failure(path, e.into()))?;
            writeln!(w).map_err(|e| io_failure(path, e))?;
        }
        FormatArg::Csv => {
            let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
            let mut cw = csv::Writer::from_writer(&mut w);
            let header = [
                "c",
                "alpha",
                "d",
                "k",
                "epsilon",
                "value",
                "status",
                "residual_pq",
                "residual_qp",
                "argmax_p",
                "argmax_q",
            ];
            cw.write_record(header).map_err(|e| io_failure(path, e.into()))?;
            cw.write_record([
                num(rep.c),
                num(rep.alpha),
                rep.d.to_string(),
                rep.k.to_string(),
                num(rep.epsilon),
                num(rep.value),
                rep.status.to_string(),
                num(rep.residual_pq),
                num(rep.residual_qp),
                join(&rep.argmax_p),
                join(&rep.argmax_q),
            ])
            .map_err(|e| io_failure(path, e.into()))?;
            cw.flush().map_err(|e| io_failure(path, e))?;
        }
    }
    w.flush().map_err(|e| io_failure(path, e))?;
    Ok(if r.status == SolverStatus::MaxIters {
        EXIT_MAX_ITERS
    } else {
        EXIT_OK
    })
}

fn sweep_spec(a: &SweepArgs) -> Result<SweepSpec, Failure> {
    let mut grid = match a.preset {
        Some(PresetArg::PaperK1) => Preset::PaperK1.params_grid(),
        Some(PresetArg::PaperMultik) => Preset::PaperMultiK.params_grid(),
        None => ParamsGrid {
            c: vec![],
            alpha: vec![],
            d: vec![],
            k: vec![1],
        },
    };
    if !a.c.is_empty() {
        grid.c = a.c.clone();
    }
    if !a.alpha.is_empty() {
        grid.alpha = a.alpha.clone();
    }
    if !a.d.is_empty() {
        grid.d = a.d.clone();
    }
    if !a.k.is_empty() {
        grid.k = a.k.clone();
    }
    for (name, empty) in [("c", grid.c.is_empty()), ("alpha", grid.alpha.is_empty()), ("d", grid.d.is_empty())] {
        if empty {
            return Err(Failure::new(EXIT_USAGE, format!("--{name}: required without --preset")));
        }
    }
    let def = EpsGrid::default();
    let mut spec = SweepSpec::new(grid);
    spec.eps_grid = EpsGrid {
        min: a.eps_min.unwrap_or(def.min),
        max: a.eps_max.unwrap_or(def.max),
        steps: a.eps_steps.unwrap_or(def.steps),
        scale: match a.eps_scale {
            Some(ScaleArg::Linear) => EpsScale::Linear,
            _ => EpsScale::Log,
        },
    };
    spec.include_exact = match a.exact {
        ExactArg::Auto => ExactPolicy::Auto,
        ExactArg::Always => ExactPolicy::Always,
        ExactArg::Never => ExactPolicy::Never,
    };
    spec.solver = a.solver.config();
    spec.regime_delta = a.regime_delta;
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let spec = sweep_spec(a)?;
    let mut w = open_output(&a.output, stdout)?;
    let rows = run_sweep(&spec)?;
    let path = a.output.out.as_deref();
    let format = match a.output.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    match format {
        OutputFormat::Csv => write_csv(&mut w, &spec, &rows),
        OutputFormat::Json => write_json(&mut w, &spec, &rows),
    }
    .and_then(|_| w.flush())
    .map_err(|e| io_failure(path, e))?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let level = match a.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let negated = |p: f64, al: Alpha| -r_alpha(p, al).unwrap_or(f64::NAN);
    let report = if a.canary {
        validate::run_with(level, &negated)
    } else {
        validate::run(level)
    };
    let out = |e| io_failure(None, e);
    for c in &report.checks {
        writeln!(stdout, "{}", c.line()).map_err(out)?;
    }
    let failures = report.failures();
    if failures.is_empty() {
        writeln!(stdout, "all {} checks passed", report.checks.len()).map_err(out)?;
        Ok(EXIT_OK)
    } else {
        let ids: Vec<_> = failures.iter().map(|c| c.id).collect();
        writeln!(stdout, "failed: {}", ids.join(", ")).map_err(out)?;
        Ok(EXIT_VALIDATION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bounds_zero_eps() {
        let (code, out, _) = run_str(&["bernamp", "bounds", "--c", "0.1", "--alpha", "50", "--d", "1", "--k", "1", "--eps", "0"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[9], "I");
    }

    #[test]
    fn bad_c_names_flag() {
        let (code, _, err) = run_str(&["bernamp", "bounds", "--c", "0", "--alpha", "50", "--d", "1", "--eps", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--c"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_str(&["bernamp", "bounds", "--bogus", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn exact_guard_and_override() {
        let base = ["bernamp", "exact", "--c", "0.1", "--alpha", "5", "--eps", "1", "--d", "4"];
        let (code, _, err) = run_str(&base);
        assert_eq!(code, EXIT_CAPACITY);
        assert!(err.contains("--force"));
        let (code, _, _) = run_str(&[&base[..], &["--d", "11", "--force"]].concat());
        assert_eq!(code, EXIT_CAPACITY);
    }

    #[test]
    fn config_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.conf");
        std::fs::write(&path, "# comment\nc = 0.1\nalpha=50\nd = 1\neps = 0 # trailing\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, err) = run_str(&["bernamp", "bounds", "--config", p]);
        assert_eq!(code, 0, "{err}");
        assert!(out.lines().nth(1).unwrap().contains(",I"));
        // flags win over the file
        let (code, out, _) = run_str(&["bernamp", "bounds", "--config", p, "--eps", "1e6"]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1).unwrap().ends_with(",III"));
        std::fs::write(&path, "no equals sign\n").unwrap();
        assert_eq!(run_str(&["bernamp", "bounds", "--config", p]).0, EXIT_USAGE);
    }
}
