//! Command-line front end. Data goes to the output stream, diagnostics to the
//! error stream. Exit codes: 0 success, 2 usage, 3 input, 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::aluthge::{iterate_trace, AluthgeConfig};
use crate::ensemble::{generate, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_aluthge_iterate, estimate_aluthge_power, estimate_gelfand, estimate_numrad_power,
    Method, PowerSchedule, SpectralEstimate, ToleranceConfig,
};
use crate::io::{fmt_f64, read_matrix};
use crate::matrix::{operator_norm, spectral_radius_oracle, ComplexMatrix};
use crate::normaloid::{
    normaloid_check, verify_characterizations_with, VerifyConfig, DEFAULT_DECISION_RTOL,
};
use crate::numrange::{default_tolerance, fov_boundary, numerical_radius, peripheral_angle, Angle};
use crate::orbitopt::{minimize_orbit, ObjectiveKind, OrbitObjective, OrbitResult};

#[derive(Parser, Debug)]
#[command(
    name = "specrad",
    version,
    about = "Spectral radius estimators built on Aluthge transforms"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one spectral-radius estimator.
    Estimate(WithMatrix<EstimateOpts>),
    /// Minimize an objective over the similarity orbit `e^A T e^{-A}`.
    Orbit(WithMatrix<OrbitOpts>),
    /// CSV of `‖Δλⁿ(T)‖` (and optionally `w`) along the Aluthge iterates.
    Trace(WithMatrix<TraceOpts>),
    /// Normaloid verdict as JSON.
    Normaloid(WithMatrix<NormaloidOpts>),
    /// CSV of numerical-range boundary points.
    Fov(WithMatrix<FovOpts>),
    /// Run a subcommand over a seeded ensemble; one CSV row per matrix.
    Ensemble(EnsembleOpts),
    /// All estimators against the eigenvalue oracle.
    Compare(WithMatrix<CompareOpts>),
}

#[derive(Args, Debug)]
struct WithMatrix<T: Args> {
    /// Matrix file (JSON or plain text).
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    opts: T,
}

/// The subcommands accepted after `ensemble --run`, without `--matrix`.
#[derive(Parser, Debug)]
#[command(name = "run", no_binary_name = true)]
struct RunCli {
    #[command(subcommand)]
    command: RunCommand,
}

#[derive(Subcommand, Debug)]
enum RunCommand {
    Estimate(EstimateOpts),
    Orbit(OrbitOpts),
    Trace(TraceOpts),
    Normaloid(NormaloidOpts),
    Fov(FovOpts),
    Compare(CompareOpts),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Gelfand,
    AluthgeIterate,
    AluthgePower,
    NumradPower,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gelfand => Method::Gelfand,
            MethodArg::AluthgeIterate => Method::AluthgeIterate,
            MethodArg::AluthgePower => Method::AluthgePower,
            MethodArg::NumradPower => Method::NumradPower,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct EstimatorParams {
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Aluthge iterations inside the power estimators.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1024)]
    k_max: u32,
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

impl EstimatorParams {
    fn run(&self, t: &ComplexMatrix, method: Method) -> Result<SpectralEstimate> {
        let cfg = AluthgeConfig::new(self.lambda)?;
        let schedule = || PowerSchedule::doubling(self.k_max);
        match method {
            Method::Gelfand => estimate_gelfand(t, &schedule()?),
            Method::AluthgeIterate => {
                let tol = ToleranceConfig {
                    rtol: self.rtol,
                    max_iterations: self.max_iters,
                    ..Default::default()
                };
                estimate_aluthge_iterate(t, &cfg, &tol)
            }
            Method::AluthgePower => estimate_aluthge_power(t, &cfg, self.n, &schedule()?),
            Method::NumradPower => estimate_numrad_power(t, &cfg, self.n, &schedule()?),
        }
    }
}

#[derive(Args, Debug)]
struct EstimateOpts {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[command(flatten)]
    params: EstimatorParams,
    /// JSON output (default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV of the estimate trace.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    DeltaNorm,
    DeltaNumrad,
    RotatedRealpartNorm,
    RotatedRealpartNumrad,
    PlainNorm,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::DeltaNorm => ObjectiveKind::DeltaNorm,
            ObjectiveArg::DeltaNumrad => ObjectiveKind::DeltaNumrad,
            ObjectiveArg::RotatedRealpartNorm => ObjectiveKind::RotatedRealpartNorm,
            ObjectiveArg::RotatedRealpartNumrad => ObjectiveKind::RotatedRealpartNumrad,
            ObjectiveArg::PlainNorm => ObjectiveKind::PlainNorm,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum ThetaArg {
    Auto,
    Value(f64),
}

fn parse_theta(s: &str) -> std::result::Result<ThetaArg, String> {
    if s == "auto" {
        return Ok(ThetaArg::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(ThetaArg::Value(v)),
        _ => Err(format!("expected `auto` or a finite angle, got {s:?}")),
    }
}

#[derive(Args, Debug)]
struct OrbitOpts {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Rotation angle for the rotated objectives; `auto` uses the peripheral angle.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    theta: Option<ThetaArg>,
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    #[arg(long, default_value_t = 8.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OrbitOpts {
    fn objective(&self, t: &ComplexMatrix) -> Result<OrbitObjective> {
        let kind = ObjectiveKind::from(self.objective);
        let theta = match (kind.is_rotated(), self.theta) {
            (true, None | Some(ThetaArg::Auto)) => Some(peripheral_angle(t)?),
            (true, Some(ThetaArg::Value(v))) => Some(Angle::new(v)),
            (false, None) => None,
            (false, Some(_)) => {
                return Err(Error::InvalidArgument(
                    "--theta applies only to the rotated objectives".into(),
                ))
            }
        };
        let n = if kind == ObjectiveKind::PlainNorm {
            0
        } else {
            self.n
        };
        OrbitObjective::new(kind, self.lambda, n, theta)
    }

    fn run(&self, t: &ComplexMatrix) -> Result<(OrbitObjective, OrbitResult)> {
        let obj = self.objective(t)?;
        let res = minimize_orbit(t, &obj, self.budget, self.radius, self.seed)?;
        Ok((obj, res))
    }
}

#[derive(Args, Debug)]
struct TraceOpts {
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Add a numerical-radius column.
    #[arg(long)]
    with_numrad: bool,
}

#[derive(Args, Debug)]
struct NormaloidOpts {
    /// Also run the orbit and power characterization checks.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DECISION_RTOL)]
    decision_rtol: f64,
}

impl NormaloidOpts {
    fn run(&self, t: &ComplexMatrix) -> Result<crate::normaloid::NormaloidVerdict> {
        if self.verify {
            let cfg = VerifyConfig {
                budget: self.budget,
                seed: self.seed,
                decision_rtol: self.decision_rtol,
                ..VerifyConfig::default()
            };
            verify_characterizations_with(t, &cfg)
        } else {
            normaloid_check(t, self.decision_rtol)
        }
    }
}

#[derive(Args, Debug)]
struct FovOpts {
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args, Debug)]
struct CompareOpts {
    #[command(flatten)]
    params: EstimatorParams,
}

#[derive(Args, Debug)]
struct EnsembleOpts {
    #[arg(long)]
    kind: EnsembleKind,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kind-specific parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    /// Subcommand and flags applied to every matrix (default: compare).
    #[arg(long, num_args = 1.., allow_hyphen_values = true, trailing_var_arg = true)]
    run: Vec<String>,
}

impl clap::builder::ValueParserFactory for EnsembleKind {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| {
            s.parse::<EnsembleKind>().map_err(|e| e.to_string())
        })
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its data to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli.command))),
        None => execute(&cli.command),
    };
    match result.and_then(|data| out.write_all(data.as_bytes()).map_err(Error::from)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "specrad: {e}");
            e.exit_code()
        }
    }
}

fn load(m: &std::path::Path) -> Result<ComplexMatrix> {
    read_matrix(m).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", m.display()),
        )),
        other => other,
    })
}

fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Estimate(c) => estimate_output(&load(&c.matrix)?, &c.opts),
        Command::Orbit(c) => {
            let t = load(&c.matrix)?;
            let (obj, res) = c.opts.run(&t)?;
            let r = spectral_radius_oracle(&t)?;
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(
                    &json!({ "objective": obj, "r_oracle": r, "result": res })
                )
                .expect("orbit output serializes")
            ))
        }
        Command::Trace(c) => {
            let t = load(&c.matrix)?;
            let trace = iterate_trace(
                &t,
                &AluthgeConfig::new(c.opts.lambda)?,
                c.opts.iters,
                c.opts.with_numrad,
            )?;
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            Ok(String::from_utf8(buf).expect("csv is utf-8"))
        }
        Command::Normaloid(c) => Ok(format!("{}\n", c.opts.run(&load(&c.matrix)?)?.to_json())),
        Command::Fov(c) => {
            let pts = fov_boundary(&load(&c.matrix)?, c.opts.samples)?;
            let rows = pts.iter().map(|z| vec![fmt_f64(z.re), fmt_f64(z.im)]);
            to_csv(&["re", "im"], rows)
        }
        Command::Compare(c) => compare_output(&load(&c.matrix)?, &c.opts.params),
        Command::Ensemble(e) => ensemble_output(e),
    }
}

fn to_csv<S: AsRef<str>>(
    header: &[S],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))
        .map_err(crate::aluthge::csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(crate::aluthge::csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn estimate_output(t: &ComplexMatrix, opts: &EstimateOpts) -> Result<String> {
    let est = opts.params.run(t, opts.method.into())?;
    if opts.csv {
        let rows = est
            .trace
            .iter()
            .map(|(i, v)| vec![i.to_string(), fmt_f64(*v)]);
        to_csv(&["index", "estimate"], rows)
    } else {
        Ok(format!("{}\n", est.to_json()))
    }
}

fn compare_output(t: &ComplexMatrix, params: &EstimatorParams) -> Result<String> {
    let r = spectral_radius_oracle(t)?;
    let rows = Method::ALL
        .iter()
        .map(|&m| {
            let est = params.run(t, m)?;
            Ok(vec![
                m.name().to_string(),
                fmt_f64(est.value),
                fmt_f64(r),
                fmt_f64(est.value - r),
                fmt_f64((est.value - r) / r.max(f64::MIN_POSITIVE)),
                est.converged.to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    to_csv(
        &[
            "method",
            "value",
            "r_oracle",
            "abs_gap",
            "rel_gap",
            "converged",
        ],
        rows,
    )
}

/// Columns contributed by one `--run` command, after `index,seed,dim,r_oracle`.
fn run_columns(cmd: &RunCommand) -> Vec<String> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    match cmd {
        RunCommand::Estimate(o) => s(&[Method::from(o.method).name(), "gap", "converged"]),
        RunCommand::Orbit(_) => s(&["best_value", "gap", "evaluations", "boundary_hit"]),
        RunCommand::Trace(o) => {
            let mut c = s(&["final_norm", "gap", "max_norm_increase"]);
            if o.with_numrad {
                c.push("final_numerical_radius".into());
            }
            c
        }
        RunCommand::Normaloid(o) => {
            let mut c = s(&["norm", "relative_gap", "is_normaloid"]);
            if o.verify {
                c.push("checks_agree".into());
            }
            c
        }
        RunCommand::Fov(_) => s(&["numerical_radius", "gap"]),
        RunCommand::Compare(_) => {
            let mut c = vec!["norm".to_string()];
            for m in Method::ALL {
                c.push(m.name().to_string());
                c.push(format!("{}_gap", m.name()));
            }
            c
        }
    }
}

fn run_row(cmd: &RunCommand, t: &ComplexMatrix, r: f64) -> Result<Vec<String>> {
    Ok(match cmd {
        RunCommand::Estimate(o) => {
            let est = o.params.run(t, o.method.into())?;
            vec![
                fmt_f64(est.value),
                fmt_f64(est.value - r),
                est.converged.to_string(),
            ]
        }
        RunCommand::Orbit(o) => {
            let (_, res) = o.run(t)?;
            vec![
                fmt_f64(res.best_value),
                fmt_f64(res.best_value - r),
                res.evaluations.to_string(),
                res.boundary_hit.to_string(),
            ]
        }
        RunCommand::Trace(o) => {
            let trace = iterate_trace(t, &AluthgeConfig::new(o.lambda)?, o.iters, o.with_numrad)?;
            let last = *trace.norms.last().expect("non-empty trace");
            let mut row = vec![
                fmt_f64(last),
                fmt_f64(last - r),
                fmt_f64(trace.max_norm_increase()),
            ];
            if let Some(ws) = &trace.numerical_radii {
                row.push(fmt_f64(*ws.last().expect("non-empty trace")));
            }
            row
        }
        RunCommand::Normaloid(o) => {
            let v = o.run(t)?;
            let mut row = vec![
                fmt_f64(v.norm),
                fmt_f64(v.relative_gap),
                v.is_normaloid.to_string(),
            ];
            if o.verify {
                row.push(v.all_agree().to_string());
            }
            row
        }
        RunCommand::Fov(_) => {
            let w = numerical_radius(t, default_tolerance(t)?)?.w;
            vec![fmt_f64(w), fmt_f64(w - r)]
        }
        RunCommand::Compare(o) => {
            let mut row = vec![fmt_f64(operator_norm(t)?)];
            for m in Method::ALL {
                let v = o.params.run(t, m)?.value;
                row.push(fmt_f64(v));
                row.push(fmt_f64(v - r));
            }
            row
        }
    })
}

fn ensemble_output(e: &EnsembleOpts) -> Result<String> {
    let run_args = if e.run.is_empty() {
        vec!["compare".to_string()]
    } else {
        e.run.clone()
    };
    let run = RunCli::try_parse_from(&run_args)
        .map_err(|err| {
            Error::InvalidArgument(format!("--run: {}", err.render().to_string().trim()))
        })?
        .command;

    let mut header: Vec<String> = ["index", "seed", "dim", "r_oracle"]
        .map(String::from)
        .to_vec();
    header.extend(run_columns(&run));

    let rows = (0..e.count)
        .into_par_iter()
        .map(|i| {
            let seed = e.seed ^ i as u64;
            let spec = EnsembleSpec {
                kind: e.kind,
                dim: e.dim,
                seed,
                params: e.params.clone(),
            };
            let t = generate(&spec)?;
            let r = spectral_radius_oracle(&t)?;
            let mut row = vec![
                i.to_string(),
                seed.to_string(),
                e.dim.to_string(),
                fmt_f64(r),
            ];
            row.extend(run_row(&run, &t, r)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    to_csv(&header, rows)
}
