//! Kicking with rectangular pulses of fixed laboratory width.
//!
//! The pulse area is held at the delta-kick strength: during the pulse the
//! potential is `−(κ/α) cos φ` for a scaled duration `α = τ_p/T`. With `τ_p`
//! fixed, `α` grows as `kbar` shrinks and reaches one half near `kbar = 0.1`
//! for 480 ns pulses. Each period starts with its pulse.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::delta::record;
use super::propagator::Propagator;
use super::state::{energy_of_state, init_plane_wave, QuantumState};
use super::default_half_width;
use crate::ensemble::{EnergyRecord, EnsembleSpec, Method, MomentumEnsemble};
use crate::error::{Error, Result};
use crate::params::{PhysicalConstants, RotorParams};
use crate::stats;

/// Floor for the number of Strang substeps per pulse.
pub const MIN_SUBSTEPS: usize = 64;
/// Ceiling for the adaptive substep search.
pub const MAX_SUBSTEPS: usize = 4096;
/// Relative change in energy at which the substep doubling stops.
pub const SUBSTEP_TOLERANCE: f64 = 1e-4;
/// Trajectories used to choose the substep count.
const PILOT_TRAJECTORIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    alpha: f64,
    n_sub: usize,
    amplitude: f64,
}

impl PulseSchedule {
    /// Schedule for kick strength `κ` spread over a pulse fraction `α`.
    pub fn new(kappa: f64, alpha: f64, n_sub: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!(
                "pulse fraction must lie in (0, 1], got {alpha}"
            )));
        }
        if n_sub == 0 {
            return Err(Error::invalid("pulse needs at least one substep"));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid(format!("kick strength {kappa} is invalid")));
        }
        Ok(Self {
            alpha,
            n_sub,
            amplitude: kappa / alpha,
        })
    }

    pub fn for_params(
        params: &RotorParams,
        constants: &PhysicalConstants,
        n_sub: usize,
    ) -> Result<Self> {
        let alpha = params
            .pulse_fraction(constants)?
            .ok_or_else(|| Error::invalid("pulse simulation needs a pulse width"))?;
        Self::new(params.kappa(), alpha, n_sub)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    /// Potential strength during the pulse, `κ/α`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `amplitude · α`, equal to `κ`.
    pub fn pulse_area(&self) -> f64 {
        self.amplitude * self.alpha
    }

    pub fn with_substeps(self, n_sub: usize) -> Result<Self> {
        Self::new(self.pulse_area(), self.alpha, n_sub)
    }
}

pub fn apply_pulse_period(
    state: &QuantumState,
    params: &RotorParams,
    schedule: &PulseSchedule,
) -> Result<QuantumState> {
    Propagator::new().pulse_period(state, params.kbar, schedule)
}

fn evolve_pulsed(
    prop: &mut Propagator,
    state: QuantumState,
    kbar: f64,
    schedule: &PulseSchedule,
    n_kicks: u32,
) -> Result<QuantumState> {
    let mut state = state;
    for _ in 0..n_kicks {
        state = prop.pulse_period(&state, kbar, schedule)?;
    }
    Ok(state)
}

fn trajectory_energies(
    spec: &EnsembleSpec,
    params: &RotorParams,
    schedule: &PulseSchedule,
    n_kicks: u32,
    count: usize,
) -> Result<Vec<f64>> {
    let half_width = default_half_width(n_kicks, params.kick_ratio);
    (0..count)
        .into_par_iter()
        .map_init(Propagator::new, |prop, i| {
            let (_, p0) = spec.initial_condition(i);
            let state = init_plane_wave(p0, half_width)?;
            let state = evolve_pulsed(prop, state, params.kbar, schedule, n_kicks)?;
            energy_of_state(&state)
        })
        .collect()
}

/// Doubles the substep count from [`MIN_SUBSTEPS`] until the mean energy of
/// a fixed pilot subset changes by less than [`SUBSTEP_TOLERANCE`].
pub fn select_substeps(
    spec: &EnsembleSpec,
    params: &RotorParams,
    schedule: &PulseSchedule,
    n_kicks: u32,
) -> Result<usize> {
    if n_kicks == 0 || schedule.amplitude() == 0.0 {
        return Ok(MIN_SUBSTEPS);
    }
    let pilot = spec.n_traj.min(PILOT_TRAJECTORIES);
    let mean_energy = |n_sub: usize| -> Result<f64> {
        let sched = schedule.with_substeps(n_sub)?;
        let e = trajectory_energies(spec, params, &sched, n_kicks, pilot)?;
        Ok(stats::mean(&e).unwrap_or(0.0))
    };
    let mut n_sub = MIN_SUBSTEPS;
    let mut previous = mean_energy(n_sub)?;
    while n_sub < MAX_SUBSTEPS {
        n_sub *= 2;
        let next = mean_energy(n_sub)?;
        if (next - previous).abs() <= SUBSTEP_TOLERANCE * next.abs() {
            break;
        }
        previous = next;
    }
    Ok(n_sub)
}

/// Same protocol as the delta-kick ensemble with each kick replaced by a
/// full pulse period. Entry `i` is `√⟨p²⟩` of trajectory `i`.
pub fn evolve_pulse_ensemble(
    spec: &EnsembleSpec,
    params: &RotorParams,
    constants: &PhysicalConstants,
    n_kicks: u32,
) -> Result<MomentumEnsemble> {
    spec.validate()?;
    let schedule = PulseSchedule::for_params(params, constants, MIN_SUBSTEPS)?;
    let n_sub = select_substeps(spec, params, &schedule, n_kicks)?;
    let schedule = schedule.with_substeps(n_sub)?;
    let energies = trajectory_energies(spec, params, &schedule, n_kicks, spec.n_traj)?;
    Ok(MomentumEnsemble {
        momenta: energies.iter().map(|e| (2.0 * e).sqrt()).collect(),
        method: Method::QuantumPulse,
        n_kicks,
    })
}

pub fn simulate_pulse_ensemble(
    spec: &EnsembleSpec,
    params: &RotorParams,
    constants: &PhysicalConstants,
    n_kicks: u32,
) -> Result<EnergyRecord> {
    let ens = evolve_pulse_ensemble(spec, params, constants, n_kicks)?;
    record(spec, params, &ens)
}

/// Fraction of one lattice period `λ/2` covered during a single pulse by
/// an atom moving at `p_rms` (2-photon recoils): `kbar · p_rms · α / 2π`.
pub fn traversal_fraction(
    p_rms: f64,
    params: &RotorParams,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let alpha = params
        .pulse_fraction(constants)?
        .ok_or_else(|| Error::invalid("traversal fraction needs a pulse width"))?;
    Ok(params.kbar * p_rms.abs() * alpha / TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_free, apply_kick};

    #[test]
    fn schedule_invariants() {
        let s = PulseSchedule::new(3.5, 0.25, 64).unwrap();
        assert!((s.amplitude() * s.alpha() - 3.5).abs() < 1e-12);
        assert!(PulseSchedule::new(1.0, 0.0, 64).is_err());
        assert!(PulseSchedule::new(1.0, 1.5, 64).is_err());
        assert!(PulseSchedule::new(1.0, 0.5, 0).is_err());
        assert!(PulseSchedule::new(1.0, 1.0, 1).is_ok());
    }

    #[test]
    fn zero_strength_equals_free_period() {
        let params = RotorParams::new(0.8, 0.0, 1.0).unwrap();
        let s = apply_kick(&init_plane_wave(0.3, 16).unwrap(), 2.0).unwrap();
        let sched = PulseSchedule::new(0.0, 0.2, 64).unwrap();
        assert_eq!(apply_pulse_period(&s, &params, &sched).unwrap(), apply_free(&s, 0.8));
    }

    #[test]
    fn pulse_period_is_unitary() {
        let params = RotorParams::new(0.1, 7.0, 1.8).unwrap();
        let sched = PulseSchedule::new(params.kappa(), 0.5, 64).unwrap();
        let mut s = init_plane_wave(2.7, 20).unwrap();
        for _ in 0..2 {
            let next = apply_pulse_period(&s, &params, &sched).unwrap();
            assert!((next.norm_sqr() - s.norm_sqr()).abs() < 1e-10);
            s = next;
        }
    }

    #[test]
    fn short_pulse_approaches_delta_kick() {
        let params = RotorParams::new(1.0, 5.0, 1.0).unwrap();
        let s0 = init_plane_wave(0.8, 30).unwrap();
        let delta = apply_free(&apply_kick(&s0, 5.0).unwrap(), 1.0);
        let sched = PulseSchedule::new(params.kappa(), 1e-4, 4).unwrap();
        let pulsed = apply_pulse_period(&s0, &params, &sched).unwrap();
        let overlap: num_complex::Complex64 = delta
            .amplitudes()
            .iter()
            .zip(pulsed.amplitudes().iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() > 1.0 - 1e-6, "overlap {}", overlap.norm());
    }

    #[test]
    fn traversal_is_linear() {
        let c = PhysicalConstants::caesium();
        let p = RotorParams::new(1.0, 7.0, 3.2).unwrap().with_pulse_width(480e-9).unwrap();
        assert_eq!(traversal_fraction(0.0, &p, &c).unwrap(), 0.0);
        let a = traversal_fraction(8.0, &p, &c).unwrap();
        let p2 = p.with_pulse_width(960e-9).unwrap();
        assert!((traversal_fraction(8.0, &p2, &c).unwrap() - 2.0 * a).abs() < 1e-15);
        let bare = RotorParams::new(1.0, 7.0, 3.2).unwrap();
        assert!(traversal_fraction(1.0, &bare, &c).is_err());
    }

    #[test]
    fn pulse_longer_than_period_is_rejected() {
        let c = PhysicalConstants::caesium();
        let spec = EnsembleSpec::new(10, 1, 1.8).unwrap();
        let p = RotorParams::new(0.04, 7.0, 1.8).unwrap().with_pulse_width(480e-9).unwrap();
        assert!(matches!(
            simulate_pulse_ensemble(&spec, &p, &c, 2),
            Err(Error::PulseLongerThanPeriod { .. })
        ));
    }

    #[test]
    fn zero_kick_gives_thermal_energy() {
        let c = PhysicalConstants::caesium();
        let spec = EnsembleSpec::new(2000, 3, 1.8).unwrap();
        let p = RotorParams::new(0.5, 0.0, 1.8).unwrap().with_pulse_width(480e-9).unwrap();
        let r = simulate_pulse_ensemble(&spec, &p, &c, 2).unwrap();
        assert!((r.energy - 1.62).abs() < 3.0 * r.std_err);
    }
}
