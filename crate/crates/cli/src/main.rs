use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qkr_core::classical::phase_portrait;
use qkr_core::sweep::{
    calibrate, read_records, run_sweep, write_portrait, write_sweep, CalibrationMode,
    PortraitPreset, SweepPreset, PORTRAIT_PRESETS, SWEEP_PRESETS,
};
use qkr_core::{EnsembleSpec, Error, Method, PhysicalConstants, RotorParams, Spacing, SweepConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qkr", version, about = "Early-time energy sweeps for the atom-optics kicked rotor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean energy against kbar for one or more methods, as CSV.
    Sweep(SweepArgs),
    /// Standard-map phase portrait, as `phi,p` CSV.
    Portrait(PortraitArgs),
    /// Recover kappa/kbar from a sweep CSV.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct Common {
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "QKR_WORKERS")]
    workers: Option<usize>,
    /// Output file; standard output when omitted or `-`.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Override the lattice wavelength (nm).
    #[arg(long)]
    wavelength_nm: Option<f64>,
    /// Override the atomic mass (kg).
    #[arg(long)]
    cs_mass_kg: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Load parameters of a named figure; explicit flags still win.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    kbar_min: Option<f64>,
    #[arg(long)]
    kbar_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Kick strength over kbar, `k = κ/kbar`.
    #[arg(long, alias = "kick-ratio")]
    kappa_ratio: Option<f64>,
    /// Initial momentum width (2-photon recoils).
    #[arg(long)]
    sigma_p: Option<f64>,
    /// Kicks applied by the simulated methods.
    #[arg(long)]
    n_kicks: Option<u32>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', value_enum)]
    methods: Option<Vec<MethodArg>>,
    #[arg(long)]
    n_traj: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pulse_width_ns: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PortraitArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    kbar: Option<f64>,
    #[arg(long, alias = "kick-ratio")]
    kappa_ratio: Option<f64>,
    #[arg(long)]
    sigma_p: Option<f64>,
    #[arg(long)]
    n_iter: Option<u32>,
    #[arg(long, default_value_t = 200)]
    n_traj: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Sweep CSV; standard input when `-`.
    #[arg(long, short)]
    input: PathBuf,
    /// Thermal width; taken from the records when omitted.
    #[arg(long)]
    sigma_p: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Plateau)]
    mode: ModeArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MethodArg {
    Analytic1,
    Analytic2,
    AnalyticBroad,
    Classical,
    QuantumDelta,
    QuantumPulse,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Plateau,
    Difference,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic1 => Method::Analytic1,
            MethodArg::Analytic2 => Method::Analytic2,
            MethodArg::AnalyticBroad => Method::AnalyticBroad,
            MethodArg::Classical => Method::Classical,
            MethodArg::QuantumDelta => Method::QuantumDelta,
            MethodArg::QuantumPulse => Method::QuantumPulse,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::PulseLongerThanPeriod { .. } => EXIT_USAGE,
            Error::Schema(_) | Error::Calibration(_) | Error::Io { .. } => EXIT_SCHEMA,
            Error::Truncation { .. } | Error::InvalidState(_) | Error::EmptyEnsemble => {
                EXIT_NUMERICAL
            }
        };
        Self { code, message: e.to_string() }
    }
}

fn constants(common: &Common) -> Result<PhysicalConstants, Failure> {
    let c = PhysicalConstants::with_overrides(common.wavelength_nm, common.cs_mass_kg)?;
    if common.wavelength_nm.is_none() && common.cs_mass_kg.is_none() {
        c.check_recoil_band()?;
    }
    Ok(c)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure {
                code: EXIT_NUMERICAL,
                message: format!("{}: {e}", p.display()),
            }),
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut config = match &args.preset {
        Some(name) => SweepPreset::find(name)
            .ok_or_else(|| {
                let names: Vec<&str> = SWEEP_PRESETS.iter().map(|p| p.name).collect();
                Failure::usage(format!("unknown preset '{name}' (known: {})", names.join(", ")))
            })?
            .config(),
        None => SweepConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg { config.$field = v.into(); })*
        };
    }
    set!(
        kbar_min <- args.kbar_min,
        kbar_max <- args.kbar_max,
        steps <- args.steps,
        kick_ratio <- args.kappa_ratio,
        sigma_p <- args.sigma_p,
        n_kicks <- args.n_kicks,
        n_traj <- args.n_traj,
        seed <- args.seed,
        pulse_width_ns <- args.pulse_width_ns,
    );
    if let Some(s) = args.spacing {
        config.spacing = match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        };
    }
    if let Some(m) = args.methods {
        config.methods = m.into_iter().map(Method::from).collect();
    }
    config.workers = args.common.workers;
    config.constants = constants(&args.common)?;

    let rows = run_sweep(&config)?;
    let out = open_output(args.common.output.as_deref())?;
    write_sweep(&rows, &config, out)?;

    let numerical = rows.iter().find_map(|r| match &r.outcome {
        Err(e @ (Error::Truncation { .. } | Error::InvalidState(_) | Error::EmptyEnsemble)) => {
            Some(e)
        }
        _ => None,
    });
    match numerical {
        Some(e) => Err(Failure { code: EXIT_NUMERICAL, message: e.to_string() }),
        None => Ok(()),
    }
}

fn portrait(args: PortraitArgs) -> Result<(), Failure> {
    let preset = match &args.preset {
        Some(name) => Some(*PortraitPreset::find(name).ok_or_else(|| {
            let names: Vec<&str> = PORTRAIT_PRESETS.iter().map(|p| p.name).collect();
            Failure::usage(format!("unknown preset '{name}' (known: {})", names.join(", ")))
        })?),
        None => None,
    };
    let pick = |flag: Option<f64>, from: fn(&PortraitPreset) -> f64, what: &str| {
        flag.or(preset.as_ref().map(from))
            .ok_or_else(|| Failure::usage(format!("--{what} is required without --preset")))
    };
    let kbar = pick(args.kbar, |p| p.kbar, "kbar")?;
    let k = pick(args.kappa_ratio, |p| p.kick_ratio, "kappa-ratio")?;
    let sigma_p = pick(args.sigma_p, |p| p.sigma_p, "sigma-p")?;
    let n_iter = args.n_iter.or(preset.map(|p| p.n_iter)).unwrap_or(100);
    constants(&args.common)?;

    let params = RotorParams::new(kbar, k, sigma_p)?;
    let spec = EnsembleSpec::new(args.n_traj, args.seed, sigma_p)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.common.workers {
        if n == 0 {
            return Err(Failure::usage("worker count must be positive"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::usage(e.to_string()))?;
    let points = pool.install(|| phase_portrait(&spec, &params, n_iter))?;
    write_portrait(&points, open_output(args.common.output.as_deref())?)?;
    Ok(())
}

fn calibrate_cmd(args: CalibrateArgs) -> Result<(), Failure> {
    let mut text = Vec::new();
    let read = if args.input.as_os_str() == "-" {
        io::stdin().read_to_end(&mut text)
    } else {
        File::open(&args.input).and_then(|mut f| f.read_to_end(&mut text))
    };
    read.map_err(|e| Failure {
        code: EXIT_SCHEMA,
        message: format!("{}: {e}", args.input.display()),
    })?;
    let rows = read_records(&text[..])?;
    let sigma_p = args.sigma_p.unwrap_or(rows[0].sigma_p);
    let mode = match args.mode {
        ModeArg::Plateau => CalibrationMode::Plateau,
        ModeArg::Difference => CalibrationMode::Difference,
    };
    let est = calibrate(&rows, sigma_p, mode)?;
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "kappa_ratio,uncertainty,n_records")
        .and_then(|_| writeln!(out, "{},{},{}", est.value, est.uncertainty, est.n_records))
        .and_then(|_| out.flush())
        .map_err(|e| Failure { code: EXIT_NUMERICAL, message: e.to_string() })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Portrait(a) => portrait(a),
        Command::Calibrate(a) => calibrate_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qkr: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
