//! Parameter sweeps over `kbar`, figure presets, and the CSV record and
//! portrait formats.
//!
//! A sweep evaluates every `(kbar, method)` pair of its grid. Rows come out
//! sorted by `kbar` then method, and each simulated row is produced from
//! per-trajectory random streams with an index-ordered reduction, so the
//! CSV is byte-identical for any worker count.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{energy_one_kick, energy_two_kicks, energy_two_kicks_broad, AnalyticInputs};
use crate::classical::{evolve_classical_ensemble, PortraitPoint};
use crate::ensemble::{
    energy_from_momenta, estimate_kick_ratio_difference, estimate_kick_ratio_plateau,
    EnergyRecord, EnsembleSpec, KickRatioEstimate, Method,
};
use crate::error::{Error, Result};
use crate::params::{PhysicalConstants, RotorParams};
use crate::quantum::{simulate_delta_ensemble, simulate_pulse_ensemble};

/// Header of the energy-record CSV.
pub const RECORD_HEADER: &str = "kbar,kappa_ratio,sigma_p,n_kicks,method,energy,std_err,n_traj,seed,error";
/// Header of the phase-portrait CSV.
pub const PORTRAIT_HEADER: &str = "phi,p";

pub const DEFAULT_PULSE_WIDTH_NS: f64 = 480.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(Error::invalid(format!("unknown spacing '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub kbar_min: f64,
    pub kbar_max: f64,
    pub steps: usize,
    pub spacing: Spacing,
    pub kick_ratio: f64,
    pub sigma_p: f64,
    /// Kick count for the simulated methods; analytic rows carry their own.
    pub n_kicks: u32,
    pub methods: Vec<Method>,
    pub n_traj: usize,
    pub seed: u64,
    pub pulse_width_ns: f64,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    pub constants: PhysicalConstants,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kbar_min: 0.05,
            kbar_max: 5.0,
            steps: 50,
            spacing: Spacing::Log,
            kick_ratio: 7.0,
            sigma_p: 1.8,
            n_kicks: 2,
            methods: vec![Method::Analytic2],
            n_traj: 10_000,
            seed: 1,
            pulse_width_ns: DEFAULT_PULSE_WIDTH_NS,
            workers: None,
            constants: PhysicalConstants::caesium(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kbar_min.is_finite() && self.kbar_min > 0.0) {
            return Err(Error::invalid("kbar grid minimum must be positive"));
        }
        if !(self.kbar_max.is_finite() && self.kbar_max >= self.kbar_min) {
            return Err(Error::invalid("kbar grid maximum must be at least the minimum"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("kbar grid needs at least one step"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        if self.methods.iter().any(Method::is_simulation) && self.n_traj == 0 {
            return Err(Error::invalid("simulated methods need n_traj >= 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("worker count must be positive"));
        }
        if !(self.pulse_width_ns.is_finite() && self.pulse_width_ns >= 0.0) {
            return Err(Error::invalid("pulse width must be non-negative"));
        }
        RotorParams::new(self.kbar_min, self.kick_ratio, self.sigma_p)?;
        Ok(())
    }

    pub fn kbar_grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.kbar_min];
        }
        let last = (self.steps - 1) as f64;
        let mut grid: Vec<f64> = (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.kbar_min + (self.kbar_max - self.kbar_min) * t,
                    Spacing::Log => {
                        (self.kbar_min.ln() + (self.kbar_max / self.kbar_min).ln() * t).exp()
                    }
                }
            })
            .collect();
        grid[0] = self.kbar_min;
        grid[self.steps - 1] = self.kbar_max;
        grid
    }

    fn sorted_methods(&self) -> Vec<Method> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

/// One `(kbar, method)` cell of a sweep; failures are kept, not dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub kbar: f64,
    pub method: Method,
    pub n_kicks: u32,
    pub outcome: std::result::Result<EnergyRecord, Error>,
}

fn analytic_record(inputs: &AnalyticInputs, method: Method, n_kicks: u32, energy: f64) -> EnergyRecord {
    EnergyRecord {
        kbar: inputs.kbar,
        kick_ratio: inputs.kick_ratio,
        sigma_p: inputs.sigma_p,
        n_kicks,
        method,
        energy,
        std_err: 0.0,
        n_traj: 0,
        seed: 0,
    }
}

/// Evaluates one method at one `kbar`.
pub fn evaluate(config: &SweepConfig, kbar: f64, method: Method) -> Result<EnergyRecord> {
    let params = RotorParams::new(kbar, config.kick_ratio, config.sigma_p)?;
    let inputs = AnalyticInputs::from(&params);
    let spec = || EnsembleSpec::new(config.n_traj, config.seed, config.sigma_p);
    match method {
        Method::Analytic1 => Ok(analytic_record(&inputs, method, 1, energy_one_kick(&inputs))),
        Method::Analytic2 => Ok(analytic_record(&inputs, method, 2, energy_two_kicks(&inputs))),
        Method::AnalyticBroad => Ok(analytic_record(
            &inputs,
            method,
            2,
            energy_two_kicks_broad(&inputs),
        )),
        Method::Classical => {
            let spec = spec()?;
            let ens = evolve_classical_ensemble(&spec, &params, config.n_kicks)?;
            let (energy, std_err) = energy_from_momenta(&ens)?;
            Ok(EnergyRecord {
                kbar,
                kick_ratio: config.kick_ratio,
                sigma_p: config.sigma_p,
                n_kicks: config.n_kicks,
                method,
                energy,
                std_err,
                n_traj: config.n_traj,
                seed: config.seed,
            })
        }
        Method::QuantumDelta => simulate_delta_ensemble(&spec()?, &params, config.n_kicks),
        Method::QuantumPulse => {
            let params = params.with_pulse_width(config.pulse_width_ns / 1e9)?;
            simulate_pulse_ensemble(&spec()?, &params, &config.constants, config.n_kicks)
        }
    }
}

fn row_kicks(config: &SweepConfig, method: Method) -> u32 {
    match method {
        Method::Analytic1 => 1,
        Method::Analytic2 | Method::AnalyticBroad => 2,
        _ => config.n_kicks,
    }
}

/// Runs the whole grid on a dedicated pool of `config.workers` threads.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let methods = config.sorted_methods();
    let cells: Vec<(f64, Method)> = config
        .kbar_grid()
        .into_iter()
        .flat_map(|k| methods.iter().map(move |&m| (k, m)))
        .collect();
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&(kbar, method)| SweepRow {
                kbar,
                method,
                n_kicks: row_kicks(config, method),
                outcome: evaluate(config, kbar, method),
            })
            .collect()
    }))
}

/// Serialised form of a record row. Energy columns are empty on error rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub kbar: f64,
    pub kappa_ratio: f64,
    pub sigma_p: f64,
    pub n_kicks: u32,
    pub method: Method,
    pub energy: Option<f64>,
    pub std_err: Option<f64>,
    pub n_traj: usize,
    pub seed: u64,
    pub error: Option<String>,
}

impl CsvRow {
    pub fn from_row(row: &SweepRow, config: &SweepConfig) -> Self {
        match &row.outcome {
            Ok(r) => Self::from(r),
            Err(e) => Self {
                kbar: row.kbar,
                kappa_ratio: config.kick_ratio,
                sigma_p: config.sigma_p,
                n_kicks: row.n_kicks,
                method: row.method,
                energy: None,
                std_err: None,
                n_traj: if row.method.is_simulation() { config.n_traj } else { 0 },
                seed: if row.method.is_simulation() { config.seed } else { 0 },
                error: Some(e.to_string()),
            },
        }
    }

    /// The record, if this row carries one.
    pub fn record(&self) -> Option<EnergyRecord> {
        if self.error.is_some() {
            return None;
        }
        Some(EnergyRecord {
            kbar: self.kbar,
            kick_ratio: self.kappa_ratio,
            sigma_p: self.sigma_p,
            n_kicks: self.n_kicks,
            method: self.method,
            energy: self.energy?,
            std_err: self.std_err.unwrap_or(0.0),
            n_traj: self.n_traj,
            seed: self.seed,
        })
    }
}

impl From<&EnergyRecord> for CsvRow {
    fn from(r: &EnergyRecord) -> Self {
        Self {
            kbar: r.kbar,
            kappa_ratio: r.kick_ratio,
            sigma_p: r.sigma_p,
            n_kicks: r.n_kicks,
            method: r.method,
            energy: Some(r.energy),
            std_err: Some(r.std_err),
            n_traj: r.n_traj,
            seed: r.seed,
            error: None,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Schema(e.to_string())
}

pub fn write_records<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RECORD_HEADER.split(',')).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(())
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], config: &SweepConfig, out: W) -> Result<()> {
    let rows: Vec<CsvRow> = rows.iter().map(|r| CsvRow::from_row(r, config)).collect();
    write_records(&rows, out)
}

/// Parses a record CSV, insisting on the exact header.
pub fn read_records<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_error)?;
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != RECORD_HEADER {
        return Err(Error::Schema(format!(
            "expected header '{RECORD_HEADER}', found '{found}'"
        )));
    }
    let rows = r
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Schema(format!("row {}: {e}", i + 2))))
        .collect::<Result<Vec<CsvRow>>>()?;
    if rows.is_empty() {
        return Err(Error::Schema("no records".into()));
    }
    Ok(rows)
}

pub fn write_portrait<W: Write>(points: &[PortraitPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PORTRAIT_HEADER.split(',')).map_err(csv_error)?;
    for q in points {
        w.write_record(&[q.phi.to_string(), q.p.to_string()])
            .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    /// Two-kick plateau at `kbar ≥ 1` inverted through the broad formula.
    Plateau,
    /// Difference of the one- and two-kick plateaus.
    Difference,
}

impl std::str::FromStr for CalibrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plateau" => Ok(CalibrationMode::Plateau),
            "difference" => Ok(CalibrationMode::Difference),
            _ => Err(Error::invalid(format!("unknown calibration mode '{s}'"))),
        }
    }
}

/// Calibrates `κ/kbar` from record rows; error rows are ignored.
pub fn calibrate(rows: &[CsvRow], sigma_p: f64, mode: CalibrationMode) -> Result<KickRatioEstimate> {
    let records: Vec<EnergyRecord> = rows.iter().filter_map(CsvRow::record).collect();
    match mode {
        CalibrationMode::Plateau => estimate_kick_ratio_plateau(&records, sigma_p),
        CalibrationMode::Difference => {
            let (one, two): (Vec<EnergyRecord>, Vec<EnergyRecord>) =
                records.into_iter().filter(|r| r.n_kicks <= 2).partition(|r| r.n_kicks == 1);
            let two: Vec<EnergyRecord> = two.into_iter().filter(|r| r.n_kicks == 2).collect();
            estimate_kick_ratio_difference(&one, &two)
        }
    }
}

/// Parameters of a figure's theory curves.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPreset {
    pub name: &'static str,
    pub kick_ratio: f64,
    pub sigma_p: f64,
    pub methods: &'static [Method],
}

const FIG1: &[Method] = &[Method::Analytic2, Method::AnalyticBroad, Method::QuantumPulse];
const FIG2: &[Method] = &[Method::Analytic1, Method::Analytic2];
const FIG3: &[Method] = &[Method::Analytic1, Method::Analytic2, Method::AnalyticBroad];
const FIG4: &[Method] = &[Method::Analytic2, Method::AnalyticBroad];

pub const SWEEP_PRESETS: &[SweepPreset] = &[
    SweepPreset { name: "fig1-a", kick_ratio: 7.0, sigma_p: 1.8, methods: FIG1 },
    SweepPreset { name: "fig1-b", kick_ratio: 7.0, sigma_p: 3.2, methods: FIG1 },
    SweepPreset { name: "fig2", kick_ratio: 5.2, sigma_p: 4.2, methods: FIG2 },
    SweepPreset { name: "fig3-a", kick_ratio: 7.5, sigma_p: 3.35, methods: FIG3 },
    SweepPreset { name: "fig3-b", kick_ratio: 6.4, sigma_p: 3.35, methods: FIG3 },
    SweepPreset { name: "fig3-c", kick_ratio: 5.6, sigma_p: 3.35, methods: FIG3 },
    SweepPreset { name: "fig3-d", kick_ratio: 4.5, sigma_p: 3.35, methods: FIG3 },
    SweepPreset { name: "fig4-a", kick_ratio: 5.8, sigma_p: 3.3, methods: FIG4 },
    SweepPreset { name: "fig4-b", kick_ratio: 5.8, sigma_p: 4.2, methods: FIG4 },
    SweepPreset { name: "fig4-c", kick_ratio: 5.8, sigma_p: 5.3, methods: FIG4 },
    SweepPreset { name: "fig4-d", kick_ratio: 5.8, sigma_p: 6.0, methods: FIG4 },
];

impl SweepPreset {
    pub fn find(name: &str) -> Option<&'static SweepPreset> {
        SWEEP_PRESETS.iter().find(|p| p.name == name)
    }

    /// Default config with this preset's parameters applied.
    pub fn config(&self) -> SweepConfig {
        SweepConfig {
            kick_ratio: self.kick_ratio,
            sigma_p: self.sigma_p,
            methods: self.methods.to_vec(),
            ..SweepConfig::default()
        }
    }
}

/// Phase-space portrait parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitPreset {
    pub name: &'static str,
    pub kbar: f64,
    pub kick_ratio: f64,
    pub sigma_p: f64,
    pub n_iter: u32,
}

pub const PORTRAIT_PRESETS: &[PortraitPreset] = &[
    PortraitPreset { name: "fig5-top", kbar: 0.001, kick_ratio: 5.5, sigma_p: 3.6, n_iter: 100 },
    PortraitPreset { name: "fig5-middle", kbar: 0.3, kick_ratio: 5.5, sigma_p: 3.6, n_iter: 100 },
    PortraitPreset { name: "fig5-bottom", kbar: 3.0, kick_ratio: 5.5, sigma_p: 3.6, n_iter: 100 },
];

impl PortraitPreset {
    pub fn find(name: &str) -> Option<&'static PortraitPreset> {
        PORTRAIT_PRESETS.iter().find(|p| p.name == name)
    }
}
