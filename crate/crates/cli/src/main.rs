mod report;
mod verify;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use qkdrate_core::qubit::linalg::CMat4;
use qkdrate_core::{
    diagonal_data, rate_from_data, run, symmetric_rate, DataMatrix, Error, MeasurementModel,
    OptimizerSettings, RateOptions, SimConfig, StateSpec, SymmetricObservation, TwoQubitState,
};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "qkdrate", version, about = "Calibration-robust key rates for entanglement-based BB84")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key rate from a QBER or from a data-matrix file
    Rate(RateArgs),
    /// Closed-form key rate over a QBER range, as CSV
    Sweep(SweepArgs),
    /// Monte Carlo run of the measurement stage
    Simulate(SimulateArgs),
    /// Run the built-in oracle checks
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OptimizerArgs {
    /// Upper end of the x2, x4 search box
    #[arg(long, default_value_t = 8.0)]
    xmax: f64,
    /// Grid points per search axis
    #[arg(long, default_value_t = 21)]
    grid: usize,
}

impl OptimizerArgs {
    fn settings(&self) -> Result<OptimizerSettings, CliError> {
        let s = OptimizerSettings {
            x_max: self.xmax,
            grid: self.grid,
            ..Default::default()
        };
        s.validate().map_err(CliError::from)?;
        Ok(s)
    }
}

#[derive(Args)]
struct RateArgs {
    /// Quantum bit error rate in [0, 0.5]
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    qber: Option<f64>,
    /// Data matrix JSON file: {"d": [[1, ., .], [., ., .], [., ., .]]}
    #[arg(long)]
    data: Option<PathBuf>,
    /// Run the numerical optimizer even for diagonal data
    #[arg(long)]
    optimize: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    qber_min: f64,
    #[arg(long, default_value_t = 0.5)]
    qber_max: f64,
    #[arg(long, default_value_t = 51)]
    steps: usize,
    /// Output CSV path; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Werner-state visibility in [0, 1]
    #[arg(long, conflicts_with = "state", required_unless_present = "state")]
    visibility: Option<f64>,
    /// Density matrix JSON file: {"re": 4x4, "im": 4x4}
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sharpness of Alice's first measurement (Z axis)
    #[arg(long, default_value_t = 1.0)]
    eta_a: f64,
    #[arg(long, default_value_t = 0.0)]
    bias_a: f64,
    /// Sharpness of Alice's second measurement
    #[arg(long, default_value_t = 1.0)]
    eta_a2: f64,
    #[arg(long, default_value_t = 0.0)]
    bias_a2: f64,
    /// Angle in radians between Alice's two axes, in the X-Z plane
    #[arg(long, default_value_t = FRAC_PI_2)]
    angle_a: f64,
    /// Sharpness of Bob's first measurement (Z axis)
    #[arg(long, default_value_t = 1.0)]
    eta_b: f64,
    #[arg(long, default_value_t = 0.0)]
    bias_b: f64,
    /// Sharpness of Bob's second measurement (X axis)
    #[arg(long, default_value_t = 1.0)]
    eta_b2: f64,
    #[arg(long, default_value_t = 0.0)]
    bias_b2: f64,
    /// Write the estimated data matrix here as JSON
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    optimize: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Larger grids and sample counts
    #[arg(long)]
    deep: bool,
}

#[derive(Debug)]
enum CliError {
    Verification,
    Invalid(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Invalid(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification => write!(f, "verification failed"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible data: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. }
            | Error::InfeasibleData(_)
            | Error::NoFeasiblePoint
            | Error::UndefinedCells(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct DataFile {
    d: [[f64; 3]; 3],
}

fn load_data_matrix(path: &Path) -> Result<DataMatrix, CliError> {
    let raw: DataFile = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(DataMatrix::new(raw.d)?)
}

#[derive(Deserialize)]
struct StateFile {
    re: [[f64; 4]; 4],
    #[serde(default)]
    im: [[f64; 4]; 4],
}

fn load_state(path: &Path) -> Result<TwoQubitState, CliError> {
    let raw: StateFile = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let mut rho = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            rho.0[i][j] = Complex64::new(raw.re[i][j], raw.im[i][j]);
        }
    }
    Ok(TwoQubitState::new(rho)?)
}

fn print_report(report: &qkdrate_core::KeyRateReport, json: bool) -> Result<(), CliError> {
    let text = if json {
        serde_json::to_string_pretty(report).expect("report serializes") + "\n"
    } else {
        report::human(report)
    };
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_rate(args: &RateArgs) -> Result<(), CliError> {
    let settings = args.optimizer.settings()?;
    let report = match (&args.qber, &args.data) {
        (Some(q), None) if !args.optimize => symmetric_rate(*q)?,
        (Some(q), None) => {
            let d = diagonal_data(SymmetricObservation::from_qber(*q)?);
            let opts = RateOptions {
                force_optimizer: true,
                optimizer: settings,
            };
            rate_from_data(&d, &opts)?
        }
        (None, Some(path)) => {
            let d = load_data_matrix(path)?;
            let opts = RateOptions {
                force_optimizer: args.optimize,
                optimizer: settings,
            };
            rate_from_data(&d, &opts)?
        }
        _ => return Err(CliError::Invalid("give exactly one of --qber or --data".into())),
    };
    print_report(&report, args.json)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let (lo, hi) = (args.qber_min, args.qber_max);
    if !(0.0 <= lo && lo < hi && hi <= 0.5) {
        return Err(CliError::Invalid(format!(
            "need 0 <= qber-min < qber-max <= 0.5, got [{lo}, {hi}]"
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Invalid("steps must be at least 2".into()));
    }
    let csv = report::sweep_csv(lo, hi, args.steps)?;
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let state = match (&args.visibility, &args.state) {
        (Some(v), None) => StateSpec::Werner { visibility: *v },
        (None, Some(path)) => StateSpec::Explicit(load_state(path)?),
        _ => return Err(CliError::Invalid("give exactly one of --visibility or --state".into())),
    };
    let z = [0.0, 0.0, 1.0];
    let alice2_axis = [args.angle_a.sin(), 0.0, args.angle_a.cos()];
    let config = SimConfig {
        state,
        alice: [
            MeasurementModel::new(z, args.eta_a, args.bias_a)?,
            MeasurementModel::along(alice2_axis, args.eta_a2, args.bias_a2)?,
        ],
        bob: [
            MeasurementModel::new(z, args.eta_b, args.bias_b)?,
            MeasurementModel::new([1.0, 0.0, 0.0], args.eta_b2, args.bias_b2)?,
        ],
        rounds: args.rounds,
        seed: args.seed,
    };
    let settings = args.optimizer.settings()?;
    let estimate = run(&config)?;
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&estimate).expect("estimate serializes") + "\n";
        write_file(path, &json)?;
    }
    let d = estimate.data_matrix()?;
    let opts = RateOptions {
        force_optimizer: args.optimize,
        optimizer: settings,
    };
    print_report(&rate_from_data(&d, &opts)?, args.json)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let lines = verify::run_all(args.deep);
    let mut out = io::stdout().lock();
    let mut failed = false;
    for line in &lines {
        failed |= !line.passed;
        writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    if failed {
        Err(CliError::Verification)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rate(a) => cmd_rate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qkdrate: {e}");
            ExitCode::from(e.code())
        }
    }
}
