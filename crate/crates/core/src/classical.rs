//! The classical delta-kicked rotor.
//!
//! One step of the standard map applies the kick and then the free drift:
//!
//! ```text
//! ρ' = ρ − κ sin φ
//! φ' = φ + ρ'
//! ```
//!
//! The drift uses the *updated* momentum. This is the order under which two
//! steps give `ρ₂ = ρ₀ − κ sin φ₀ − κ sin φ₁`. Phases stay unwrapped during
//! evolution; only portraits reduce them to `[0, 2π)`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::ensemble::{EnsembleSpec, Method, MomentumEnsemble};
use crate::error::{Error, Result};
use crate::params::RotorParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub phi: f64,
    pub rho: f64,
}

impl ClassicalState {
    pub fn new(phi: f64, rho: f64) -> Self {
        Self { phi, rho }
    }
}

pub fn standard_map_step(state: ClassicalState, kappa: f64) -> ClassicalState {
    let rho = state.rho - kappa * state.phi.sin();
    ClassicalState {
        phi: state.phi + rho,
        rho,
    }
}

/// Exact inverse of [`standard_map_step`].
pub fn inverse_standard_map_step(state: ClassicalState, kappa: f64) -> ClassicalState {
    let phi = state.phi - state.rho;
    ClassicalState {
        phi,
        rho: state.rho + kappa * phi.sin(),
    }
}

fn evolve(mut state: ClassicalState, kappa: f64, n_kicks: u32) -> ClassicalState {
    for _ in 0..n_kicks {
        state = standard_map_step(state, kappa);
    }
    state
}

/// Final momenta (2-photon recoils) after `n_kicks` steps of the map for
/// each sampled trajectory.
pub fn evolve_classical_ensemble(
    spec: &EnsembleSpec,
    params: &RotorParams,
    n_kicks: u32,
) -> Result<MomentumEnsemble> {
    spec.validate()?;
    let (kbar, kappa) = (params.kbar, params.kappa());
    let momenta = (0..spec.n_traj)
        .into_par_iter()
        .map(|i| {
            let (phi, p) = spec.initial_condition(i);
            evolve(ClassicalState::new(phi, kbar * p), kappa, n_kicks).rho / kbar
        })
        .collect();
    Ok(MomentumEnsemble {
        momenta,
        method: Method::Classical,
        n_kicks,
    })
}

/// One phase-space point: `φ` reduced to `[0, 2π)`, `p` in 2-photon recoils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitPoint {
    pub phi: f64,
    pub p: f64,
}

/// Every iterate of every trajectory, initial point included:
/// `n_traj · (n_iter + 1)` points, trajectory-major.
pub fn phase_portrait(
    spec: &EnsembleSpec,
    params: &RotorParams,
    n_iter: u32,
) -> Result<Vec<PortraitPoint>> {
    spec.validate()?;
    if n_iter == 0 {
        return Err(Error::invalid("portrait needs at least one iteration"));
    }
    let (kbar, kappa) = (params.kbar, params.kappa());
    let per_traj: Vec<Vec<PortraitPoint>> = (0..spec.n_traj)
        .into_par_iter()
        .map(|i| {
            let (phi, p) = spec.initial_condition(i);
            let mut s = ClassicalState::new(phi, kbar * p);
            let mut out = Vec::with_capacity(n_iter as usize + 1);
            out.push(point(s, kbar));
            for _ in 0..n_iter {
                s = standard_map_step(s, kappa);
                out.push(point(s, kbar));
            }
            out
        })
        .collect();
    Ok(per_traj.into_iter().flatten().collect())
}

fn point(s: ClassicalState, kbar: f64) -> PortraitPoint {
    let mut phi = s.phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if phi >= TAU {
        phi = 0.0;
    }
    PortraitPoint { phi, p: s.rho / kbar }
}
