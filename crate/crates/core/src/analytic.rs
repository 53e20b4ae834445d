//! Closed-form ensemble energies after one and two kicks, and the critical
//! `kbar` below which the two-kick energy leaves the quasilinear value.
//!
//! All energies are in 2-photon recoil energies. The kicking strength
//! enters through `k = κ/kbar`, which keeps every expression finite as
//! `kbar → 0`: `κ_q = 2κ sin(kbar/2)/kbar = 2k sin(kbar/2)` and
//! `κ_2q = 2k sin(kbar)`.

use std::f64::consts::TAU;

use crate::bessel::{j0, j1, j2};
use crate::error::{Error, Result};
use crate::params::{PhysicalConstants, RotorParams, HBAR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticInputs {
    pub kbar: f64,
    pub kick_ratio: f64,
    pub sigma_p: f64,
}

impl AnalyticInputs {
    pub fn new(kbar: f64, kick_ratio: f64, sigma_p: f64) -> Result<Self> {
        let p = RotorParams::new(kbar, kick_ratio, sigma_p)?;
        Ok(Self::from(&p))
    }

    pub fn kappa(&self) -> f64 {
        self.kick_ratio * self.kbar
    }

    pub fn sigma_rho(&self) -> f64 {
        self.kbar * self.sigma_p
    }

    /// `κ_q = 2κ sin(kbar/2) / kbar`.
    pub fn kappa_q(&self) -> f64 {
        2.0 * self.kick_ratio * (0.5 * self.kbar).sin()
    }

    /// `κ_2q = 2κ sin(kbar) / kbar`.
    pub fn kappa_2q(&self) -> f64 {
        2.0 * self.kick_ratio * self.kbar.sin()
    }

    fn thermal(&self) -> f64 {
        0.5 * self.sigma_p * self.sigma_p
    }
}

impl From<&RotorParams> for AnalyticInputs {
    fn from(p: &RotorParams) -> Self {
        Self {
            kbar: p.kbar,
            kick_ratio: p.kick_ratio,
            sigma_p: p.sigma_p,
        }
    }
}

/// Energy gained per kick without correlations, `k²/4`.
pub fn quasilinear_rate(kick_ratio: f64) -> f64 {
    0.25 * kick_ratio * kick_ratio
}

/// `σ_p²/2 + k²/4`, the same for every `kbar`.
pub fn energy_one_kick(inputs: &AnalyticInputs) -> f64 {
    inputs.thermal() + quasilinear_rate(inputs.kick_ratio)
}

/// Two-kick energy when the initial momenta are spread over many lattice
/// periods: `(σ_ρ² + κ²)/(2kbar²) = σ_p²/2 + k²/2`.
pub fn energy_two_kicks_broad(inputs: &AnalyticInputs) -> f64 {
    inputs.thermal() + 2.0 * quasilinear_rate(inputs.kick_ratio)
}

/// Two-kick energy of a Gaussian momentum ensemble of arbitrary width,
/// `E₂ = B / (2kbar²)` with
///
/// ```text
/// B = σ_ρ² + κ²/2 + (κ²/2)(1 − J₂(κ_2q) e^{−2σ_ρ²})
///     − 2κ J₁(κ_q) σ_ρ² e^{−σ_ρ²/2}
///     + κ² (J₀(κ_q) − J₂(κ_q)) cos(kbar/2) e^{−σ_ρ²/2}
/// ```
///
/// evaluated here with every term divided through by `kbar²`. The `J₁`
/// term carries a factor 2: that is the value produced by exact
/// evolution of plane waves averaged over the Gaussian (see the
/// `two_kick_reference` test). For `σ_ρ ≫ 1` this reduces to
/// [`energy_two_kicks_broad`]; as `kbar → 0` it tends to `σ_p²/2 + k²`.
pub fn energy_two_kicks(inputs: &AnalyticInputs) -> f64 {
    let k = inputs.kick_ratio;
    let kbar = inputs.kbar;
    let sp2 = inputs.sigma_p * inputs.sigma_p;
    let sr2 = inputs.sigma_rho() * inputs.sigma_rho();
    let (kq, k2q) = (inputs.kappa_q(), inputs.kappa_2q());
    let damp_one = (-0.5 * sr2).exp();
    let damp_two = (-2.0 * sr2).exp();

    let b = sp2 + 0.5 * k * k + 0.5 * k * k * (1.0 - j2(k2q) * damp_two)
        - 2.0 * k * kbar * sp2 * j1(kq) * damp_one
        + k * k * (j0(kq) - j2(kq)) * (0.5 * kbar).cos() * damp_one;
    0.5 * b
}

/// Total momentum spread after one kick, 2-photon recoils:
/// `σ_tot² = σ_p² + k²/2`.
pub fn sigma_total(kick_ratio: f64, sigma_p: f64) -> f64 {
    (sigma_p * sigma_p + 0.5 * kick_ratio * kick_ratio).sqrt()
}

/// `kbar` at which an atom with momentum `σ_tot` crosses one lattice period
/// `λ/2` between kicks: `kbar_crit = 2π/σ_tot`.
pub fn kbar_critical(kick_ratio: f64, sigma_p: f64) -> Result<f64> {
    let s = checked_sigma_total(kick_ratio, sigma_p)?;
    Ok(TAU / s)
}

/// The same threshold evaluated in SI units, `T_crit = λM/(2σ_tot)` and
/// `kbar_crit = 8ω_r T_crit`. Used to cross-check [`kbar_critical`].
pub fn kbar_critical_si(
    kick_ratio: f64,
    sigma_p: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    checked_sigma_total(kick_ratio, sigma_p)?;
    let hbar_k = HBAR * constants.wavenumber();
    // σ₁² = 2 (κ/kbar)² (ħk_l)²
    let sigma1_sq = 2.0 * kick_ratio * kick_ratio * hbar_k * hbar_k;
    let sigma_p_si = sigma_p * constants.two_photon_recoil();
    let sigma_tot = (sigma_p_si * sigma_p_si + sigma1_sq).sqrt();
    let t_crit = constants.wavelength() * constants.mass() / (2.0 * sigma_tot);
    constants.kbar_from_period(t_crit)
}

fn checked_sigma_total(kick_ratio: f64, sigma_p: f64) -> Result<f64> {
    if !(kick_ratio >= 0.0 && sigma_p >= 0.0) {
        return Err(Error::invalid("kick ratio and sigma_p must be non-negative"));
    }
    let s = sigma_total(kick_ratio, sigma_p);
    if s == 0.0 {
        return Err(Error::invalid(
            "kbar_crit undefined for zero kick ratio and zero momentum spread",
        ));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn inputs(kbar: f64, k: f64, sp: f64) -> AnalyticInputs {
        AnalyticInputs::new(kbar, k, sp).unwrap()
    }

    #[test]
    fn one_kick() {
        assert_relative_eq!(energy_one_kick(&inputs(1.0, 0.0, 1.8)), 1.62, max_relative = 1e-14);
        assert_relative_eq!(energy_one_kick(&inputs(1.0, 5.2, 4.2)), 15.58, max_relative = 1e-14);
        let e = energy_one_kick(&inputs(0.1, 5.2, 4.2));
        for kbar in [1.0, 10.0] {
            assert_eq!(energy_one_kick(&inputs(kbar, 5.2, 4.2)), e);
        }
    }

    #[test]
    fn broad_two_kick() {
        assert_relative_eq!(energy_two_kicks_broad(&inputs(1.0, 7.0, 1.8)), 26.12, max_relative = 1e-14);
        assert_relative_eq!(energy_two_kicks_broad(&inputs(1.0, 0.0, 1.8)), 1.62, max_relative = 1e-14);
        let i = inputs(0.4, 3.3, 2.1);
        assert_relative_eq!(
            energy_two_kicks_broad(&i) - energy_one_kick(&i),
            quasilinear_rate(3.3),
            max_relative = 1e-12
        );
    }

    #[test]
    fn quasilinear_rate_examples() {
        assert_eq!(quasilinear_rate(0.0), 0.0);
        assert_eq!(quasilinear_rate(7.0), 12.25);
        let i = inputs(2.0, 7.0, 1.8);
        assert_relative_eq!(energy_two_kicks_broad(&i) - 1.62, 2.0 * quasilinear_rate(7.0), max_relative = 1e-13);
    }

    #[test]
    fn two_kick_limits() {
        assert_relative_eq!(energy_two_kicks(&inputs(1e-6, 7.0, 1.8)), 50.62, max_relative = 1e-9);
        let i = inputs(5.0, 7.0, 1.8);
        assert_relative_eq!(energy_two_kicks(&i), energy_two_kicks_broad(&i), max_relative = 1e-12);
        for (kbar, sp) in [(0.01, 1.0), (0.7, 3.0), (4.0, 0.2)] {
            assert_relative_eq!(energy_two_kicks(&inputs(kbar, 0.0, sp)), 0.5 * sp * sp, max_relative = 1e-14);
        }
    }

    #[test]
    fn kappa_q_limits() {
        let i = inputs(1e-7, 7.0, 1.0);
        assert_relative_eq!(i.kappa_q() / i.kappa(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(i.kappa_2q() / i.kappa(), 2.0, max_relative = 1e-12);
        // continuity across the small-kbar region
        let a = energy_two_kicks(&inputs(1e-6, 7.0, 1.8));
        let b = energy_two_kicks(&inputs(1.0000001e-6, 7.0, 1.8));
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn ballistic_limit() {
        let e = energy_two_kicks(&inputs(1e-4, 7.0, 1.8)) - 1.62;
        assert!((e / 49.0 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn interior_minimum() {
        for sp in [1.8, 3.2] {
            let grid: Vec<f64> = (0..400)
                .map(|i| (0.02f64.ln() + (5.0f64 / 0.02).ln() * i as f64 / 399.0).exp())
                .collect();
            let e: Vec<f64> = grid.iter().map(|&kb| energy_two_kicks(&inputs(kb, 7.0, sp))).collect();
            let (imin, _) = e
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            assert!(grid[imin] > 0.05 && grid[imin] < 1.0);
            assert!(e[imin] < e[0] && e[imin] < e[399]);
        }
    }

    #[test]
    fn kbar_critical_values() {
        let a = kbar_critical(7.0, 1.8).unwrap();
        let b = kbar_critical(7.0, 3.2).unwrap();
        assert_relative_eq!(a, 1.1929620821119138, max_relative = 1e-12);
        assert_relative_eq!(b, 1.0660190392063433, max_relative = 1e-12);
        assert!(a > b);
        assert!(kbar_critical(0.0, 0.0).is_err());
        assert!(kbar_critical(7.0, 1e6).unwrap() < 1e-5);
    }

    #[test]
    fn kbar_critical_si_route_agrees() {
        let c = PhysicalConstants::caesium();
        for (k, sp) in [(7.0, 1.8), (7.0, 3.2), (5.8, 6.0), (0.0, 2.0), (4.5, 0.0)] {
            let closed = kbar_critical(k, sp).unwrap();
            let si = kbar_critical_si(k, sp, &c).unwrap();
            assert!((si / closed - 1.0).abs() < 1e-10, "{k} {sp}: {closed} vs {si}");
        }
        assert!(kbar_critical_si(0.0, 0.0, &c).is_err());
    }

    proptest! {
        #[test]
        fn broad_limit_when_spread_is_large(kbar in 0.5f64..6.0, k in 0.0f64..10.0, sp in 0.0f64..8.0) {
            let i = inputs(kbar, k, sp);
            prop_assume!(i.sigma_rho().powi(2) > 60.0);
            let broad = energy_two_kicks_broad(&i);
            prop_assert!(((energy_two_kicks(&i) - broad) / broad).abs() < 1e-10);
        }

        #[test]
        fn kbar_critical_decreases(k in 0.1f64..10.0, sp in 0.1f64..8.0, d in 0.01f64..2.0) {
            let base = kbar_critical(k, sp).unwrap();
            prop_assert!(kbar_critical(k + d, sp).unwrap() < base);
            prop_assert!(kbar_critical(k, sp + d).unwrap() < base);
        }
    }
}
