use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctc_probe::kernels::{EinsteinCylinder, Geometry, PoincareAdS2, TimeMachine};
use ctc_probe::quadrature::QuadratureConfig;
use ctc_probe::response::{self, DetectorConfig, ResponseResult, TimeMachineOptions};
use ctc_probe::sweep::{run_sweep, ImageCount, SweepConfig, SweepMode, SweepTable};
use ctc_probe::validation::{run_all, SuiteConfig};
use ctc_probe::{plot, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

/// Detector response in Minkowski, Einstein-cylinder, AdS2 and time-machine spacetimes.
///
/// All inputs are dimensionless: times in units of the switching width T.
#[derive(Parser)]
#[command(name = "ctc-probe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Excitation probability at one parameter point.
    Response(ResponseArgs),
    /// Time-machine response across a circumference or curvature grid, as CSV.
    Sweep(SweepArgs),
    /// Render a sweep CSV as SVG.
    Plot(PlotArgs),
    /// Run the cross-check suite and emit a JSON-lines report.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryKind {
    Minkowski,
    Ec,
    Ads2,
    Tm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Circumference,
    Curvature,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Circumference => SweepMode::Circumference,
            ModeArg::Curvature => SweepMode::Curvature,
        }
    }
}

#[derive(Args, Clone)]
struct QuadratureArgs {
    /// Relative tolerance; the absolute tolerance is set 100 times smaller.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated decreasing regulator values.
    #[arg(long = "eps-ladder", value_delimiter = ',')]
    eps_ladder: Option<Vec<f64>>,
}

impl QuadratureArgs {
    fn apply(&self, cfg: &mut QuadratureConfig<f64>) -> Result<(), Error> {
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::Input(format!("--tol must be positive, got {tol}")));
            }
            cfg.rel_tol = tol;
            cfg.abs_tol = tol * 1e-2;
        }
        if let Some(ladder) = &self.eps_ladder {
            cfg.eps_ladder = ladder.clone();
        }
        cfg.validate()
    }
}

#[derive(Args)]
struct ResponseArgs {
    #[arg(long, value_enum)]
    geometry: GeometryKind,
    /// Energy gap omega = Omega T.
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    /// Curvature w = T / R.
    #[arg(long)]
    w: Option<f64>,
    /// Circumference or period l = L / T.
    #[arg(long)]
    ell: Option<f64>,
    /// Time-machine warp as A = 1 + delta.
    #[arg(long, conflicts_with_all = ["w", "warp"])]
    delta: Option<f64>,
    /// Time-machine warp A.
    #[arg(long = "A", id = "warp", conflicts_with = "w")]
    warp: Option<f64>,
    /// Zero-mode constant of the Einstein cylinder.
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    /// Image pairs in the time-machine sum, or "auto".
    #[arg(long = "N", default_value = "10")]
    n: String,
    /// Tail tolerance for N = auto.
    #[arg(long = "tail-tol", default_value_t = 1e-6)]
    tail_tol: f64,
    /// Static trajectory radius.
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Cut the Gaussian to [-5/2, 5/2] with steps of this width.
    #[arg(long = "window-eps")]
    window_eps: Option<f64>,
    /// Print the full result as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "N")]
    n: Option<String>,
    /// Comma-separated swept values.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// CSV destination; standard output if absent here and in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV written by `sweep`.
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Labels the horizontal axis.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Logarithmic horizontal axis.
    #[arg(long = "log-x")]
    log_x: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Comma-separated groups or checks to run.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    only: Option<Vec<String>>,
    /// Replace every bound.
    #[arg(long)]
    bound: Option<f64>,
    /// JSON-lines report destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

enum Failure {
    Library(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

fn require(value: Option<f64>, flag: &str, geometry: &str) -> Result<f64, Error> {
    value.ok_or_else(|| Error::Input(format!("--{flag} is required for --geometry {geometry}")))
}

fn geometry(args: &ResponseArgs) -> Result<Geometry<f64>, Error> {
    Ok(match args.geometry {
        GeometryKind::Minkowski => Geometry::Minkowski,
        GeometryKind::Ec => Geometry::EinsteinCylinder(EinsteinCylinder::new(
            require(args.ell, "ell", "ec")?,
            args.gamma,
        )?),
        GeometryKind::Ads2 => {
            Geometry::PoincareAdS2(PoincareAdS2::new(require(args.w, "w", "ads2")?)?)
        }
        GeometryKind::Tm => {
            let ell = require(args.ell, "ell", "tm")?;
            let tm = match (args.w, args.delta, args.warp) {
                (Some(w), None, None) => TimeMachine::from_curvature(w, ell)?,
                (None, Some(d), None) => TimeMachine::new(1.0 + d, ell)?,
                (None, None, Some(a)) => TimeMachine::new(a, ell)?,
                _ => {
                    return Err(Error::Input(
                        "--geometry tm needs exactly one of --w, --delta, --A".into(),
                    ))
                }
            };
            Geometry::TimeMachine(tm)
        }
    })
}

fn print_response(r: &ResponseResult<f64>, geometry: &Geometry<f64>) {
    println!("geometry: {}", geometry.name());
    println!("P/lambda^2: {:.12}", r.probability);
    println!("imaginary residue: {:.3e}", r.imaginary_residue);
    let method = serde_json::to_value(r.method).unwrap_or_default();
    println!("method: {}", method.as_str().unwrap_or_default());
    println!("quadrature error: {:.3e}", r.quadrature_error);
    if let (Some(x), None) = (&r.extrapolation, &r.image_sum) {
        println!("eps_residual: {:.3e}", x.residual);
    }
    if let Some(s) = &r.image_sum {
        println!("N: {}", s.truncation_n);
        println!("tail_estimate: {:.3e}", s.tail_estimate);
        println!("onset: {}", s.onset);
        println!("eps_residual: {:.3e}", s.eps_residual);
    }
    if r.clipped_mass > 0.0 {
        println!("clipped mass: {:.3e}", r.clipped_mass);
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

fn cmd_response(args: ResponseArgs) -> Result<(), Failure> {
    let mut cfg = QuadratureConfig::default();
    args.quadrature.apply(&mut cfg)?;
    let geometry = geometry(&args)?;
    let det = DetectorConfig::new(args.omega).with_xi(args.xi);
    let opts = TimeMachineOptions {
        truncation: args.n.parse::<ImageCount>()?.into(),
        tail_tol: args.tail_tol,
    };
    let result = match args.window_eps {
        Some(eps) => response::response_truncated_switching(&det, &geometry, eps, &cfg, &opts)?,
        None => response::response(&det, &geometry, &cfg, &opts)?,
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("serializable result")
        );
    } else {
        print_response(&result, &geometry);
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::from_json(&read_file(path)?)?,
        None => SweepConfig {
            mode: args
                .mode
                .ok_or_else(|| Error::Input("--mode is required without --config".into()))?
                .into(),
            omega: args
                .omega
                .ok_or_else(|| Error::Input("--omega is required without --config".into()))?,
            w: None,
            ell: None,
            gamma: 0.01,
            n: ImageCount::Fixed(10),
            tail_tol: 1e-6,
            grid: Vec::new(),
            quadrature: QuadratureConfig::default(),
            output_path: None,
        },
    };
    if let Some(m) = args.mode {
        cfg.mode = m.into();
    }
    if let Some(v) = args.omega {
        cfg.omega = v;
    }
    if args.w.is_some() {
        cfg.w = args.w;
    }
    if args.ell.is_some() {
        cfg.ell = args.ell;
    }
    if let Some(g) = args.gamma {
        cfg.gamma = g;
    }
    if let Some(n) = &args.n {
        cfg.n = n.parse()?;
    }
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    if args.out.is_some() {
        cfg.output_path = args.out;
    }
    args.quadrature.apply(&mut cfg.quadrature)?;
    let table = run_sweep(&cfg)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    match &cfg.output_path {
        Some(path) => write_file(path, &buf)?,
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| Error::Input(format!("writing CSV: {e}")))?,
    }
    for row in table.rows.iter().filter(|r| r.status != "ok") {
        eprintln!("{}: {}", row.swept, row.status);
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), Failure> {
    let text = read_file(&args.csv)?;
    let table = SweepTable::read_csv(text.as_bytes())?;
    let opts = plot::PlotOptions {
        mode: args.mode.map(Into::into),
        log_x: args.log_x,
    };
    let svg = plot::render_svg(&table, opts)?;
    write_file(&args.out, svg.as_bytes())?;
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let mut config = SuiteConfig {
        only: args.only,
        bound: args.bound,
        ..Default::default()
    };
    args.quadrature.apply(&mut config.quadrature)?;
    let report = run_all(&config)?;
    let mut buf = Vec::new();
    report.write_jsonl(&mut buf).expect("in-memory write");
    match &args.out {
        Some(path) => write_file(path, &buf)?,
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| Error::Input(format!("writing report: {e}")))?,
    }
    let failed: Vec<&str> = report
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name.as_str())
        .collect();
    if failed.is_empty() {
        eprintln!("{} checks passed", report.outcomes.len());
        Ok(())
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Err(Failure::Validation)
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("CTC_PROBE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Input(format!(
            "CTC_PROBE_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads()
        .map_err(Failure::from)
        .and_then(|()| match cli.command {
            Command::Response(a) => cmd_response(a),
            Command::Sweep(a) => cmd_sweep(a),
            Command::Plot(a) => cmd_plot(a),
            Command::Validate(a) => cmd_validate(a),
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            if e.is_convergence() {
                ExitCode::from(EXIT_CONVERGENCE)
            } else {
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}
