//! Initial-condition sampling, energy estimation and kick-strength
//! calibration.
//!
//! Each trajectory draws from its own ChaCha8 stream selected by
//! `(seed, trajectory index)`, so an ensemble is the same no matter how the
//! trajectories are scheduled across threads.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub seed: u64,
    /// Initial momentum spread, 2-photon recoils.
    pub sigma_p: f64,
}

impl EnsembleSpec {
    pub fn new(n_traj: usize, seed: u64, sigma_p: f64) -> Result<Self> {
        let spec = Self {
            n_traj,
            seed,
            sigma_p,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::invalid("ensemble needs at least one trajectory"));
        }
        if !(self.sigma_p.is_finite() && self.sigma_p >= 0.0) {
            return Err(Error::invalid(format!(
                "sigma_p must be non-negative, got {}",
                self.sigma_p
            )));
        }
        Ok(())
    }

    /// Initial `(φ₀, p₀)` of one trajectory.
    pub fn initial_condition(&self, index: usize) -> (f64, f64) {
        let mut rng = trajectory_rng(self.seed, index);
        let phi = TAU * rng.random::<f64>();
        let z: f64 = rng.sample(StandardNormal);
        (phi, self.sigma_p * z)
    }
}

/// The random stream owned by trajectory `index`.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Uniform phases on `[0, 2π)` and Gaussian momenta (2-photon recoils).
pub fn sample_initial_conditions(spec: &EnsembleSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    Ok((0..spec.n_traj)
        .into_par_iter()
        .map(|i| spec.initial_condition(i))
        .collect())
}

/// Where a row of energies came from.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One-kick quasilinear energy.
    Analytic1,
    /// Finite-width two-kick energy.
    Analytic2,
    /// Broad-distribution two-kick energy.
    AnalyticBroad,
    Classical,
    QuantumDelta,
    QuantumPulse,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Analytic1,
        Method::Analytic2,
        Method::AnalyticBroad,
        Method::Classical,
        Method::QuantumDelta,
        Method::QuantumPulse,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic1 => "analytic1",
            Method::Analytic2 => "analytic2",
            Method::AnalyticBroad => "analytic_broad",
            Method::Classical => "classical",
            Method::QuantumDelta => "quantum_delta",
            Method::QuantumPulse => "quantum_pulse",
        }
    }

    pub fn is_simulation(&self) -> bool {
        matches!(
            self,
            Method::Classical | Method::QuantumDelta | Method::QuantumPulse
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}

/// Final momenta of an ensemble, 2-photon recoils. For the quantum methods
/// each entry is the rms momentum `√<p²>` of one evolved state, so that
/// [`energy_from_momenta`] still yields the ensemble energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumEnsemble {
    pub momenta: Vec<f64>,
    pub method: Method,
    pub n_kicks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub kbar: f64,
    #[serde(rename = "kappa_ratio")]
    pub kick_ratio: f64,
    pub sigma_p: f64,
    pub n_kicks: u32,
    pub method: Method,
    /// 2-photon recoil energy units.
    pub energy: f64,
    pub std_err: f64,
    pub n_traj: usize,
    pub seed: u64,
}

impl EnergyRecord {
    pub fn rms_momentum(&self) -> f64 {
        (2.0 * self.energy).sqrt()
    }
}

/// `(mean(p²)/2, std err)` in 2-photon recoil energy units.
pub fn energy_from_momenta(ensemble: &MomentumEnsemble) -> Result<(f64, f64)> {
    let e: Vec<f64> = ensemble.momenta.iter().map(|p| 0.5 * p * p).collect();
    stats::mean_and_std_err(&e).ok_or(Error::EmptyEnsemble)
}

/// Kick-induced energy after removing the thermal part `σ_p²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickEnergy {
    pub energy: f64,
    /// Set when noise pushed the input below the thermal energy. The value
    /// is reported unclamped.
    pub below_thermal: bool,
}

pub fn subtract_thermal(energy: f64, sigma_p: f64) -> KickEnergy {
    let e = energy - 0.5 * sigma_p * sigma_p;
    KickEnergy {
        energy: e,
        below_thermal: e < 0.0,
    }
}

/// A calibrated `κ/kbar` with its propagated uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickRatioEstimate {
    pub value: f64,
    pub uncertainty: f64,
    pub n_records: usize,
}

/// Only records at `kbar ≥ 1` sit on the quasilinear plateau.
pub const PLATEAU_KBAR: f64 = 1.0;

struct PlateauMean {
    mean: f64,
    uncertainty: f64,
    count: usize,
}

fn plateau_mean<'a>(records: impl Iterator<Item = &'a EnergyRecord>) -> Option<PlateauMean> {
    let rows: Vec<&EnergyRecord> = records.filter(|r| r.kbar >= PLATEAU_KBAR).collect();
    let energies: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let (mean, scatter) = stats::mean_and_std_err(&energies)?;
    let uncertainty = if rows.len() >= 2 {
        scatter
    } else {
        rows[0].std_err
    };
    Some(PlateauMean {
        mean,
        uncertainty,
        count: rows.len(),
    })
}

/// Treat radicands that are negative only through rounding as zero.
fn checked_sqrt(radicand: f64, scale: f64, what: &str) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand > -1e-12 * scale.abs().max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Calibration(format!(
            "{what} is negative ({radicand:.6})"
        )))
    }
}

fn propagate(value: f64, slope_numerator: f64, sigma: f64) -> f64 {
    if value > 0.0 {
        slope_numerator * sigma / value
    } else {
        f64::INFINITY
    }
}

/// Inverts the broad-distribution two-kick energy: `k = √(2(Ē − σ_p²/2))`
/// with `Ē` the unweighted mean over two-kick records at `kbar ≥ 1`.
pub fn estimate_kick_ratio_plateau(
    records: &[EnergyRecord],
    sigma_p: f64,
) -> Result<KickRatioEstimate> {
    let m = plateau_mean(records.iter().filter(|r| r.n_kicks == 2)).ok_or_else(|| {
        Error::Calibration("no two-kick records with kbar >= 1".to_string())
    })?;
    let thermal = 0.5 * sigma_p * sigma_p;
    let value = checked_sqrt(2.0 * (m.mean - thermal), m.mean, "plateau energy minus thermal energy")?;
    Ok(KickRatioEstimate {
        value,
        uncertainty: propagate(value, 1.0, m.uncertainty),
        n_records: m.count,
    })
}

/// One/two-kick difference method: `k = √(4(Ē₂ − Ē₁))` over `kbar ≥ 1`.
pub fn estimate_kick_ratio_difference(
    one_kick: &[EnergyRecord],
    two_kick: &[EnergyRecord],
) -> Result<KickRatioEstimate> {
    let e1 = plateau_mean(one_kick.iter())
        .ok_or_else(|| Error::Calibration("no one-kick records with kbar >= 1".to_string()))?;
    let e2 = plateau_mean(two_kick.iter())
        .ok_or_else(|| Error::Calibration("no two-kick records with kbar >= 1".to_string()))?;
    let value = checked_sqrt(
        4.0 * (e2.mean - e1.mean),
        e2.mean,
        "two-kick minus one-kick energy",
    )?;
    let sigma = e1.uncertainty.hypot(e2.uncertainty);
    Ok(KickRatioEstimate {
        value,
        uncertainty: propagate(value, 2.0, sigma),
        n_records: e1.count + e2.count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(kbar: f64, n_kicks: u32, energy: f64) -> EnergyRecord {
        EnergyRecord {
            kbar,
            kick_ratio: 0.0,
            sigma_p: 0.0,
            n_kicks,
            method: Method::Analytic2,
            energy,
            std_err: 0.0,
            n_traj: 0,
            seed: 0,
        }
    }

    #[test]
    fn zero_spread_gives_zero_momenta() {
        let spec = EnsembleSpec::new(100, 9, 0.0).unwrap();
        let s = sample_initial_conditions(&spec).unwrap();
        assert!(s.iter().all(|&(phi, p)| p == 0.0 && (0.0..TAU).contains(&phi)));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = EnsembleSpec::new(1000, 42, 3.0).unwrap();
        let a = sample_initial_conditions(&spec).unwrap();
        let b = sample_initial_conditions(&spec).unwrap();
        assert_eq!(a, b);
        let seq: Vec<_> = (0..1000).map(|i| spec.initial_condition(i)).collect();
        assert_eq!(a, seq);
        let other = sample_initial_conditions(&EnsembleSpec::new(1000, 43, 3.0).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn sampling_thread_count_independent() {
        let spec = EnsembleSpec::new(5000, 7, 2.0).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| sample_initial_conditions(&spec).unwrap());
        let b = many.install(|| sample_initial_conditions(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_spec_rejected() {
        assert!(EnsembleSpec::new(0, 1, 1.0).is_err());
        assert!(EnsembleSpec::new(1, 1, -1.0).is_err());
    }

    #[test]
    fn gaussian_width() {
        let sigma = 3.35;
        let n = 1_000_000;
        let spec = EnsembleSpec::new(n, 2024, sigma).unwrap();
        let s = sample_initial_conditions(&spec).unwrap();
        let p: Vec<f64> = s.iter().map(|x| x.1).collect();
        let m = stats::mean(&p).unwrap();
        let sq: Vec<f64> = p.iter().map(|v| (v - m) * (v - m)).collect();
        let sd = (stats::pairwise_sum(&sq) / (n - 1) as f64).sqrt();
        // standard error of σ is σ/√(2n) ≈ 0.07%; 0.5% is ~7 standard errors
        assert!((sd / sigma - 1.0).abs() < 5e-3, "sd = {sd}");
        assert!(m.abs() < 5.0 * sigma / (n as f64).sqrt());
        let phases: Vec<f64> = s.iter().map(|x| x.0).collect();
        assert!((stats::mean(&phases).unwrap() - std::f64::consts::PI).abs() < 0.01);
    }

    #[test]
    fn energy_examples() {
        let e = MomentumEnsemble {
            momenta: vec![2.0, -2.0],
            method: Method::Classical,
            n_kicks: 0,
        };
        assert_eq!(energy_from_momenta(&e).unwrap(), (2.0, 0.0));
        let zero = MomentumEnsemble {
            momenta: vec![0.0; 10],
            method: Method::Classical,
            n_kicks: 0,
        };
        assert_eq!(energy_from_momenta(&zero).unwrap(), (0.0, 0.0));
        let empty = MomentumEnsemble {
            momenta: vec![],
            method: Method::Classical,
            n_kicks: 0,
        };
        assert_eq!(energy_from_momenta(&empty), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn thermal_energy_of_gaussian() {
        let spec = EnsembleSpec::new(200_000, 5, 4.2).unwrap();
        let momenta = sample_initial_conditions(&spec)
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        let ens = MomentumEnsemble {
            momenta,
            method: Method::Classical,
            n_kicks: 0,
        };
        let (e, se) = energy_from_momenta(&ens).unwrap();
        assert!((e - 8.82).abs() < 3.0 * se, "{e} ± {se}");
    }

    #[test]
    fn thermal_subtraction() {
        let k = subtract_thermal(8.82, 4.2);
        assert!(k.energy.abs() < 1e-12 && !k.below_thermal);
        assert_relative_eq!(subtract_thermal(50.62, 1.8).energy, 49.0, max_relative = 1e-12);
        let k = subtract_thermal(0.0, 1.0);
        assert_eq!(k.energy, -0.5);
        assert!(k.below_thermal);
    }

    #[test]
    fn plateau_inversion() {
        let (k, s) = (7.5, 3.35);
        let e = 0.5 * s * s + 0.5 * k * k;
        let recs: Vec<_> = [0.5, 1.0, 2.0, 3.0]
            .iter()
            .map(|&kb| record(kb, 2, e))
            .collect();
        let est = estimate_kick_ratio_plateau(&recs, s).unwrap();
        assert_relative_eq!(est.value, 7.5, max_relative = 1e-12);
        assert_eq!(est.n_records, 3);

        let recs = vec![record(1.5, 2, 0.5 * s * s), record(2.5, 2, 0.5 * s * s)];
        assert_eq!(estimate_kick_ratio_plateau(&recs, s).unwrap().value, 0.0);
    }

    #[test]
    fn plateau_errors() {
        let recs = vec![record(0.5, 2, 30.0)];
        assert!(matches!(
            estimate_kick_ratio_plateau(&recs, 1.0),
            Err(Error::Calibration(_))
        ));
        let recs = vec![record(2.0, 2, 1.0)];
        assert!(matches!(
            estimate_kick_ratio_plateau(&recs, 3.0),
            Err(Error::Calibration(_))
        ));
        // one-kick rows do not count
        let recs = vec![record(2.0, 1, 30.0)];
        assert!(estimate_kick_ratio_plateau(&recs, 1.0).is_err());
    }

    #[test]
    fn difference_inversion() {
        let one = vec![record(1.0, 1, 10.0), record(2.0, 1, 10.0)];
        let two = vec![record(1.0, 2, 16.76), record(2.0, 2, 16.76)];
        let est = estimate_kick_ratio_difference(&one, &two).unwrap();
        assert_relative_eq!(est.value, 5.2, max_relative = 1e-12);
        assert_eq!(estimate_kick_ratio_difference(&one, &one).unwrap().value, 0.0);
        assert!(matches!(
            estimate_kick_ratio_difference(&two, &one),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("analytic3".parse::<Method>().is_err());
    }
}
