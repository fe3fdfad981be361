//! `spinrelax` command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O
//! failure. `SPINRELAX_THREADS` caps the worker pool.

mod plot;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinrelax::dynamics::{default_dt, integrate_master, Trajectory};
use spinrelax::model::theta_from_physical;
use spinrelax::output::{format_sig, write_sweep_csv, write_trajectory_csv};
use spinrelax::spectrum::DEFAULT_DEGENERACY_TOL;
use spinrelax::sweep::{find_bifurcations_with, DEFAULT_BISECTION_TOL, DEFAULT_SCAN_POINTS};
use spinrelax::verify::{run_suite, Suite, SuiteSummary};
use spinrelax::{
    analyze_spectrum, build_bloch_matrix, check_relaxation_inequalities, sweep_temperature, trace_branch,
    weak_coupling_constants, DensityState, Error, Regime, SweepRecord, SystemParams, TraceDirection,
};

use plot::{line_plot, Series};

const THREADS_ENV: &str = "SPINRELAX_THREADS";

#[derive(Parser)]
#[command(name = "spinrelax", version, about = "Strong-coupling relaxation of a spin-boson two-level system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, regime, relaxation constants and longitudinal directions at one temperature.
    Spectrum {
        #[command(flatten)]
        params: PointArgs,
        /// Emit the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Uniform temperature sweep written as CSV or JSON.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Critical temperatures, region structure and direction jumps as JSON.
    Bifurcations {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Bisection tolerance in θ.
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
        /// Discriminant pre-scan density (at least 2000).
        #[arg(long, default_value_t = DEFAULT_SCAN_POINTS)]
        scan_points: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Longitudinal direction followed through a sweep, with its jumps.
    Direction {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Trace::Both)]
        trace: Trace,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Integrate the master equation from a given Bloch vector.
    Simulate {
        #[command(flatten)]
        params: PointArgs,
        /// Initial Bloch vector rx,ry,rz with |r| ≤ 1.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        rho0: [f64; 3],
        /// Defaults to 20 over the smallest positive relaxation rate.
        #[arg(long)]
        tau_max: Option<f64>,
        /// Defaults to 1e-3/max(1, γ, Ω0).
        #[arg(long)]
        dt: Option<f64>,
        /// Write every k-th step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare strong-coupling constants with the weak-coupling baseline.
    WeakCompare {
        #[command(flatten)]
        params: PointArgs,
    },
    /// Randomized verification suites.
    Verify {
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    eps_tilde: f64,
    #[arg(long)]
    eta: f64,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Dimensionless temperature k_B T/ħΩ0.
    #[arg(long, required_unless_present = "kelvin", conflicts_with = "kelvin")]
    theta: Option<f64>,
    /// Temperature in kelvin; needs --hbar-omega0.
    #[arg(long, requires = "hbar_omega0")]
    kelvin: Option<f64>,
    /// ħΩ0 in meV; converts --kelvin to θ.
    #[arg(long, requires = "kelvin")]
    hbar_omega0: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    theta_min: f64,
    #[arg(long, default_value_t = 3.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 601)]
    n_points: usize,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    Up,
    Down,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Prop1,
    Prop2,
    Inequalities,
    Dynamics,
    All,
}

enum Failure {
    Input(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected rx,ry,rz, got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(v)
}

impl ModelArgs {
    fn at(&self, theta: f64) -> Result<SystemParams, Failure> {
        Ok(SystemParams::new(self.eps_tilde, self.eta, theta)?)
    }
}

impl PointArgs {
    fn params(&self) -> Result<SystemParams, Failure> {
        let theta = match (self.theta, self.kelvin, self.hbar_omega0) {
            (Some(t), _, _) => t,
            (None, Some(k), Some(e)) => theta_from_physical(k, e)?,
            _ => return Err(Failure::Input("need --theta or --kelvin with --hbar-omega0".into())),
        };
        self.model.at(theta)
    }
}

impl GridArgs {
    fn range(&self) -> (f64, f64) {
        (self.theta_min, self.theta_max)
    }
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Opens `path`, or stdout when absent, and hands it to `f`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_err(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    with_output(path, |w| writeln!(w, "{text}"))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// `plot.svg` → `plot-ratio.svg`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "svg".into());
    path.with_file_name(format!("{stem}-{suffix}.{ext}"))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format_sig(v, 12)).unwrap_or_else(|| "-".into())
}

fn cmd_spectrum(params: &PointArgs, json: bool) -> Outcome {
    let p = params.params()?;
    let a = build_bloch_matrix(&p);
    let report = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL)?;
    if json {
        return write_json(None, &report);
    }
    let ineq = check_relaxation_inequalities(&report);
    let mut s = String::new();
    s += &format!(
        "eps_tilde {}  eta {}  theta {}  gamma {}\n",
        format_sig(p.eps_tilde(), 12),
        format_sig(p.eta(), 12),
        format_sig(p.theta(), 12),
        format_sig(a.gamma_theta, 12)
    );
    s += &format!("regime {}  discriminant {}\n", report.regime, format_sig(report.discriminant, 12));
    for (k, z) in report.eigenvalues.iter().enumerate() {
        let sign = if z.im < 0.0 { "-" } else { "+" };
        s += &format!("lambda{} {} {sign} {}i\n", k + 1, format_sig(z.re, 12), format_sig(z.im.abs(), 12));
    }
    for (k, (g, l)) in report.gamma_l.iter().zip(&report.directions).enumerate() {
        let dir = match l {
            Some(l) => format!("({}, {}, {})", format_sig(l[0], 12), format_sig(l[1], 12), format_sig(l[2], 12)),
            None => "undefined (branch point)".into(),
        };
        s += &format!("Gamma_L{} {}  l {}\n", k + 1, format_sig(*g, 12), dir);
    }
    s += &format!("Gamma_T {}\n", fmt_opt(report.gamma_t));
    s += &format!("omega {}\n", fmt_opt(report.oscillation_freq));
    s += &format!("Gamma_L/Gamma_T {}\n", fmt_opt(report.ratio()));
    s += &format!("relaxation inequalities hold: {}\n", ineq.all_hold());
    with_output(None, |w| w.write_all(s.as_bytes()))
}

fn nan_or(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn sweep_plots(records: &[SweepRecord], svg: &Path) -> Outcome {
    let thetas: Vec<f64> = records.iter().map(|r| r.theta).collect();
    let col = |f: &dyn Fn(&SweepRecord) -> Option<f64>| records.iter().map(|r| nan_or(f(r))).collect::<Vec<_>>();
    let rates = vec![
        Series::new("Γ_L (1)", thetas.clone(), col(&|r| r.gamma_l.first().copied())),
        Series::new("Γ_L (2)", thetas.clone(), col(&|r| r.gamma_l.get(1).copied())),
        Series::new("Γ_L (3)", thetas.clone(), col(&|r| r.gamma_l.get(2).copied())),
        Series::new("Γ_T", thetas.clone(), col(&|r| r.gamma_t)),
    ];
    write_text(svg, &line_plot("Relaxation constants", "θ", "rate / Ω0", &rates))?;
    let ratio = vec![Series::new("Γ_L/Γ_T", thetas, col(&|r| r.ratio))];
    write_text(&sibling(svg, "ratio"), &line_plot("Γ_L/Γ_T", "θ", "ratio", &ratio))
}

fn cmd_sweep(model: &ModelArgs, grid: &GridArgs, out: &OutArgs, format: Format) -> Outcome {
    model.at(0.0)?;
    let records = sweep_temperature(model.eps_tilde, model.eta, grid.range(), grid.n_points)?;
    match format {
        Format::Csv => with_output(out.out.as_deref(), |w| write_sweep_csv(w, &records))?,
        Format::Json => write_json(out.out.as_deref(), &records)?,
    }
    match &out.svg {
        Some(svg) => sweep_plots(&records, svg),
        None => Ok(()),
    }
}

fn cmd_bifurcations(model: &ModelArgs, grid: &GridArgs, tol: f64, scan_points: usize, out: &OutArgs) -> Outcome {
    model.at(0.0)?;
    let report = find_bifurcations_with(model.eps_tilde, model.eta, grid.range(), tol, scan_points)?;
    let records = sweep_temperature(model.eps_tilde, model.eta, grid.range(), grid.n_points)?;
    let report = report.with_jumps(&records)?;
    write_json(out.out.as_deref(), &report)?;
    match &out.svg {
        Some(svg) => sweep_plots(&records, svg),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct DirectionReport {
    eps_tilde: f64,
    eta: f64,
    paths: Vec<spinrelax::BranchPath>,
    jumps: Vec<spinrelax::DirectionJump>,
}

fn cmd_direction(model: &ModelArgs, grid: &GridArgs, trace: Trace, out: &OutArgs) -> Outcome {
    model.at(0.0)?;
    let records = sweep_temperature(model.eps_tilde, model.eta, grid.range(), grid.n_points)?;
    let traces: &[TraceDirection] = match trace {
        Trace::Up => &[TraceDirection::Upward],
        Trace::Down => &[TraceDirection::Downward],
        Trace::Both => &[TraceDirection::Upward, TraceDirection::Downward],
    };
    let mut report = DirectionReport {
        eps_tilde: model.eps_tilde,
        eta: model.eta,
        paths: Vec::new(),
        jumps: Vec::new(),
    };
    for &t in traces {
        let (path, jumps) = trace_branch(&records, t)?;
        report.paths.push(path);
        report.jumps.extend(jumps);
    }
    write_json(out.out.as_deref(), &report)?;
    if let Some(svg) = &out.svg {
        let mut series = Vec::new();
        for path in &report.paths {
            let tag = match path.trace {
                TraceDirection::Upward => "up",
                TraceDirection::Downward => "down",
            };
            for (k, axis) in ["x", "y", "z"].iter().enumerate() {
                let ys = path.directions.iter().map(|l| l[k]).collect();
                series.push(Series::new(format!("l_{axis} ({tag})"), path.thetas.clone(), ys));
            }
        }
        write_text(svg, &line_plot("Longitudinal direction", "θ", "component", &series))?;
    }
    Ok(())
}

fn default_tau_max(params: &SystemParams) -> Result<f64, Failure> {
    let report = analyze_spectrum(&build_bloch_matrix(params), DEFAULT_DEGENERACY_TOL)?;
    let slowest = report
        .eigenvalues
        .iter()
        .map(|z| z.re)
        .filter(|&r| r > 1e-12)
        .fold(f64::INFINITY, f64::min);
    Ok(if slowest.is_finite() { 20.0 / slowest } else { 20.0 / params.omega0() })
}

fn cmd_simulate(
    params: &PointArgs,
    rho0: [f64; 3],
    tau_max: Option<f64>,
    dt: Option<f64>,
    stride: usize,
    out: &OutArgs,
) -> Outcome {
    let p = params.params()?;
    if stride == 0 {
        return Err(Failure::Input("stride must be positive".into()));
    }
    let rho = DensityState::new(rho0)?;
    let tau_max = match tau_max {
        Some(t) => t,
        None => default_tau_max(&p)?,
    };
    let traj = integrate_master(&rho, &p, tau_max, dt.unwrap_or_else(|| default_dt(&p)))?;
    let last = traj.len() - 1;
    let keep: Vec<usize> = (0..traj.len()).filter(|&k| k % stride == 0 || k == last).collect();
    let thinned = Trajectory {
        taus: keep.iter().map(|&k| traj.taus[k]).collect(),
        states: keep.iter().map(|&k| traj.states[k]).collect(),
    };
    with_output(out.out.as_deref(), |w| write_trajectory_csv(w, &thinned))?;
    if let Some(svg) = &out.svg {
        let series = ["r_x", "r_y", "r_z"]
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let ys = thinned.states.iter().map(|s| s.bloch_vector[k]).collect();
                Series::new(*name, thinned.taus.clone(), ys)
            })
            .collect::<Vec<_>>();
        write_text(svg, &line_plot("Bloch vector", "τ", "component", &series))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RateSet {
    gamma_l: f64,
    gamma_t: Option<f64>,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct WeakRates {
    gamma_weak: f64,
    gamma_l: f64,
    gamma_t: f64,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct WeakComparison {
    params: SystemParams,
    gamma: f64,
    regime: Regime,
    strong: Vec<RateSet>,
    weak: WeakRates,
    note: Option<String>,
}

fn cmd_weak_compare(params: &PointArgs) -> Outcome {
    let p = params.params()?;
    let (weak, note) = match weak_coupling_constants(&p) {
        Ok(w) => (w, None),
        Err(Error::WeakCouplingZeroTemperature { limit }) => {
            let msg = Error::WeakCouplingZeroTemperature { limit }.to_string();
            eprintln!("note: {msg}");
            (limit, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    let a = build_bloch_matrix(&p);
    let report = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL)?;
    let strong = report
        .gamma_l
        .iter()
        .map(|&g| RateSet {
            gamma_l: g,
            gamma_t: report.gamma_t,
            ratio: report.gamma_t.filter(|&t| t != 0.0).map(|t| g / t),
        })
        .collect();
    let cmp = WeakComparison {
        params: p,
        gamma: a.gamma_theta,
        regime: report.regime,
        strong,
        weak: WeakRates {
            gamma_weak: weak.gamma_weak,
            gamma_l: weak.gamma_l,
            gamma_t: weak.gamma_t,
            ratio: weak.ratio(),
        },
        note,
    };
    write_json(None, &cmp)
}

fn summary_table(summaries: &[SuiteSummary]) -> String {
    let mut s = format!(
        "{:<14}{:>10}{:>10}{:>10}{:>10}{:>16}  {}\n",
        "suite", "samples", "checked", "skipped", "failures", "worst_residual", "status"
    );
    for x in summaries {
        s += &format!(
            "{:<14}{:>10}{:>10}{:>10}{:>10}{:>16}  {}\n",
            x.suite.as_str(),
            x.samples,
            x.checked,
            x.skipped,
            x.failures,
            format!("{:.3e}", x.worst_residual),
            if x.passed() { "PASS" } else { "FAIL" }
        );
    }
    for x in summaries {
        if let Some(c) = &x.first_counterexample {
            s += &format!(
                "first counterexample [{}]: seed={} index={} {}\n  {}\n",
                x.suite, c.seed, c.index, c.input, c.detail
            );
        }
    }
    s
}

fn cmd_verify(samples: u64, seed: u64, suite: SuiteArg, json: bool, out: Option<&Path>) -> Outcome {
    if samples == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    let suites: Vec<Suite> = match suite {
        SuiteArg::Prop1 => vec![Suite::Prop1],
        SuiteArg::Prop2 => vec![Suite::Prop2],
        SuiteArg::Inequalities => vec![Suite::Inequalities],
        SuiteArg::Dynamics => vec![Suite::Dynamics],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let summaries = suites
        .into_iter()
        .map(|s| run_suite(s, samples, seed))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        write_json(out, &summaries)?;
    } else {
        let table = summary_table(&summaries);
        with_output(out, |w| w.write_all(table.as_bytes()))?;
    }
    if summaries.iter().all(SuiteSummary::passed) {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Spectrum { params, json } => cmd_spectrum(params, *json),
        Command::Sweep { model, grid, out, format } => cmd_sweep(model, grid, out, *format),
        Command::Bifurcations {
            model,
            grid,
            tol,
            scan_points,
            out,
        } => cmd_bifurcations(model, grid, *tol, *scan_points, out),
        Command::Direction { model, grid, trace, out } => cmd_direction(model, grid, *trace, out),
        Command::Simulate {
            params,
            rho0,
            tau_max,
            dt,
            stride,
            out,
        } => cmd_simulate(params, *rho0, *tau_max, *dt, *stride, out),
        Command::WeakCompare { params } => cmd_weak_compare(params),
        Command::Verify {
            samples,
            seed,
            suite,
            json,
            out,
        } => cmd_verify(*samples, *seed, *suite, *json, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
