use rayon::prelude::*;

use super::propagator::Propagator;
use super::state::{energy_of_state, init_plane_wave, QuantumState};
use super::default_half_width;
use crate::ensemble::{energy_from_momenta, EnergyRecord, EnsembleSpec, Method, MomentumEnsemble};
use crate::error::Result;
use crate::params::RotorParams;

/// `n_kicks` delta kicks with free evolution between them. Measurement
/// follows the last kick directly since free evolution leaves `⟨p²⟩`
/// unchanged.
pub(crate) fn evolve_delta(
    prop: &mut Propagator,
    state: QuantumState,
    params: &RotorParams,
    n_kicks: u32,
) -> Result<QuantumState> {
    let mut state = state;
    for i in 0..n_kicks {
        state = prop.kick(&state, params.kick_ratio)?;
        if i + 1 < n_kicks {
            state = prop.free(&state, params.kbar);
        }
    }
    Ok(state)
}

/// Incoherent ensemble of plane waves with Gaussian momenta. Entry `i` of
/// the result is `√⟨p²⟩` of trajectory `i` after the kicks.
pub fn evolve_delta_ensemble(
    spec: &EnsembleSpec,
    params: &RotorParams,
    n_kicks: u32,
) -> Result<MomentumEnsemble> {
    spec.validate()?;
    let half_width = default_half_width(n_kicks, params.kick_ratio);
    let momenta = (0..spec.n_traj)
        .into_par_iter()
        .map_init(Propagator::new, |prop, i| {
            let (_, p0) = spec.initial_condition(i);
            let state = evolve_delta(prop, init_plane_wave(p0, half_width)?, params, n_kicks)?;
            Ok((2.0 * energy_of_state(&state)?).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MomentumEnsemble {
        momenta,
        method: Method::QuantumDelta,
        n_kicks,
    })
}

pub fn simulate_delta_ensemble(
    spec: &EnsembleSpec,
    params: &RotorParams,
    n_kicks: u32,
) -> Result<EnergyRecord> {
    let ens = evolve_delta_ensemble(spec, params, n_kicks)?;
    record(spec, params, &ens)
}

pub(crate) fn record(
    spec: &EnsembleSpec,
    params: &RotorParams,
    ens: &MomentumEnsemble,
) -> Result<EnergyRecord> {
    let (energy, std_err) = energy_from_momenta(ens)?;
    Ok(EnergyRecord {
        kbar: params.kbar,
        kick_ratio: params.kick_ratio,
        sigma_p: spec.sigma_p,
        n_kicks: ens.n_kicks,
        method: ens.method,
        energy,
        std_err,
        n_traj: spec.n_traj,
        seed: spec.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{energy_two_kicks, AnalyticInputs};

    #[test]
    fn no_kick_strength_gives_thermal_energy() {
        let spec = EnsembleSpec::new(4000, 1, 1.8).unwrap();
        let params = RotorParams::new(0.5, 0.0, 1.8).unwrap();
        let r = simulate_delta_ensemble(&spec, &params, 2).unwrap();
        assert!((r.energy - 1.62).abs() < 3.0 * r.std_err);
    }

    #[test]
    fn one_kick_is_exact_per_trajectory() {
        let spec = EnsembleSpec::new(300, 4, 2.5).unwrap();
        let params = RotorParams::new(0.3, 5.0, 2.5).unwrap();
        let ens = evolve_delta_ensemble(&spec, &params, 1).unwrap();
        for (i, p) in ens.momenta.iter().enumerate() {
            let p0 = spec.initial_condition(i).1;
            assert!((0.5 * p * p - (0.5 * p0 * p0 + 6.25)).abs() < 1e-9);
        }
    }

    #[test]
    fn two_kicks_match_analytic() {
        let (kbar, k, sp) = (2.0, 7.0, 1.8);
        let spec = EnsembleSpec::new(20_000, 77, sp).unwrap();
        let params = RotorParams::new(kbar, k, sp).unwrap();
        let r = simulate_delta_ensemble(&spec, &params, 2).unwrap();
        let expected = energy_two_kicks(&AnalyticInputs::new(kbar, k, sp).unwrap());
        assert!((r.energy - expected).abs() < 3.0 * r.std_err, "{} ± {} vs {expected}", r.energy, r.std_err);
    }
}
