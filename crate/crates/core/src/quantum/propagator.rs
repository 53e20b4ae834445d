use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::pulse::PulseSchedule;
use super::state::QuantumState;
use super::{LOSS_TOLERANCE, MAX_HALF_WIDTH, TAIL_TOLERANCE};
use crate::error::{Error, Result};

/// FFT plans and cached potential phases for one grid size.
struct Grid {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    cos_phi: Vec<f64>,
    /// `e^{i s cos φ_j}` keyed by the bits of `s`.
    potentials: HashMap<u64, Arc<Vec<Complex64>>>,
    scratch: Vec<Complex64>,
}

impl Grid {
    fn new(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            cos_phi: (0..len)
                .map(|j| (TAU * j as f64 / len as f64).cos())
                .collect(),
            potentials: HashMap::new(),
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    fn potential(&mut self, strength: f64) -> Arc<Vec<Complex64>> {
        let cos_phi = &self.cos_phi;
        self.potentials
            .entry(strength.to_bits())
            .or_insert_with(|| {
                Arc::new(
                    cos_phi
                        .iter()
                        .map(|&c| Complex64::from_polar(1.0, strength * c))
                        .collect(),
                )
            })
            .clone()
    }

    /// Momentum amplitudes to phase-grid values, `ψ_j = Σ_n c_n e^{i n φ_j}`.
    fn phase_space(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    fn momentum_space(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / buf.len() as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }
}

/// Grid index `j` represents ladder site `centre + wrap(j)`, with `wrap`
/// folding `[len/2, len)` onto negative offsets.
struct Embedding {
    centre: i64,
    len: usize,
}

impl Embedding {
    fn for_state(state: &QuantumState) -> Self {
        // strictly more than twice the window
        let len = (2 * state.len() + 1).next_power_of_two();
        Self {
            centre: state.n_min() + state.len() as i64 / 2,
            len,
        }
    }

    fn index(&self, n: i64) -> usize {
        (n - self.centre).rem_euclid(self.len as i64) as usize
    }

    fn site(&self, j: usize) -> i64 {
        let half = self.len / 2;
        let offset = if j < half {
            j as i64
        } else {
            j as i64 - self.len as i64
        };
        self.centre + offset
    }

    fn embed(&self, state: &QuantumState) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (j, c) in state.amplitudes().iter().enumerate() {
            buf[self.index(state.n_min() + j as i64)] = *c;
        }
        buf
    }

    fn extract(&self, state: &QuantumState, buf: &[Complex64]) -> QuantumState {
        let amps = (0..state.len())
            .map(|j| buf[self.index(state.n_min() + j as i64)])
            .collect();
        state.with_amplitudes(amps)
    }
}

/// Free-evolution phases `e^{−i kbar (n+β)² t / 2}` for every grid index.
fn kinetic_phases(emb: &Embedding, beta: f64, kbar: f64, duration: f64) -> Vec<Complex64> {
    (0..emb.len)
        .map(|j| {
            let p = emb.site(j) as f64 + beta;
            Complex64::from_polar(1.0, -0.5 * kbar * duration * p * p)
        })
        .collect()
}

fn multiply(buf: &mut [Complex64], phases: &[Complex64]) {
    for (c, f) in buf.iter_mut().zip(phases) {
        *c *= f;
    }
}

/// Reusable evolution engine: FFT plans and potential tables are cached
/// per grid size. Not shared between threads; create one per worker.
pub struct Propagator {
    planner: FftPlanner<f64>,
    grids: HashMap<usize, Grid>,
}

impl Default for Propagator {
    fn default() -> Self {
        Self::new()
    }
}

impl Propagator {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
            grids: HashMap::new(),
        }
    }

    fn grid(&mut self, len: usize) -> &mut Grid {
        let planner = &mut self.planner;
        self.grids
            .entry(len)
            .or_insert_with(|| Grid::new(planner, len))
    }

    /// Runs `op` on the state's grid, doubling the ladder window until no
    /// probability reaches the edges or leaves the window.
    fn with_expansion<F>(&mut self, state: &QuantumState, mut op: F) -> Result<QuantumState>
    where
        F: FnMut(&mut Grid, &Embedding, &QuantumState, &mut Vec<Complex64>),
    {
        let mut current = state.clone();
        loop {
            let emb = Embedding::for_state(&current);
            let mut buf = emb.embed(&current);
            op(self.grid(emb.len), &emb, &current, &mut buf);
            let out = emb.extract(&current, &buf);
            let lost = current.norm_sqr() - out.norm_sqr();
            let edge = out.edge_mass();
            if lost.abs() < LOSS_TOLERANCE && edge < TAIL_TOLERANCE {
                return Ok(out);
            }
            if current.half_width() >= MAX_HALF_WIDTH {
                return Err(Error::Truncation {
                    tail_mass: edge.max(lost.abs()),
                    half_width: current.half_width(),
                });
            }
            current = current.expanded();
        }
    }

    /// One delta kick `e^{ik cos φ}`.
    pub fn kick(&mut self, state: &QuantumState, kick_ratio: f64) -> Result<QuantumState> {
        if kick_ratio == 0.0 {
            return Ok(state.clone());
        }
        self.with_expansion(state, |grid, _, _, buf| {
            let pot = grid.potential(kick_ratio);
            grid.phase_space(buf);
            multiply(buf, &pot);
            grid.momentum_space(buf);
        })
    }

    /// Free evolution over one scaled period.
    pub fn free(&self, state: &QuantumState, kbar: f64) -> QuantumState {
        self.free_for(state, kbar, 1.0)
    }

    /// Free evolution over `duration` scaled periods.
    pub fn free_for(&self, state: &QuantumState, kbar: f64, duration: f64) -> QuantumState {
        let mut out = state.clone();
        let beta = state.beta();
        let n_min = state.n_min();
        for (j, c) in out.amplitudes_mut().iter_mut().enumerate() {
            let p = (n_min + j as i64) as f64 + beta;
            *c *= Complex64::from_polar(1.0, -0.5 * kbar * duration * p * p);
        }
        out
    }

    /// One kicking period with a rectangular pulse on `[0, α)` followed by
    /// free evolution for `1 − α`. The pulse Hamiltonian
    /// `ρ²/2 − (κ/α) cos φ` is integrated by Strang splitting (half
    /// potential, kinetic, half potential) with `n_sub` substeps.
    pub fn pulse_period(
        &mut self,
        state: &QuantumState,
        kbar: f64,
        schedule: &PulseSchedule,
    ) -> Result<QuantumState> {
        let alpha = schedule.alpha();
        if schedule.amplitude() == 0.0 {
            return Ok(self.free(state, kbar));
        }
        let n_sub = schedule.n_sub();
        let dt = alpha / n_sub as f64;
        // phase per unit scaled time is amplitude / kbar
        let strength = schedule.amplitude() / kbar;
        let after = self.with_expansion(state, |grid, emb, current, buf| {
            let half = grid.potential(0.5 * strength * dt);
            let full = grid.potential(strength * dt);
            let kinetic = kinetic_phases(emb, current.beta(), kbar, dt);
            grid.phase_space(buf);
            multiply(buf, &half);
            for s in 0..n_sub {
                grid.momentum_space(buf);
                multiply(buf, &kinetic);
                grid.phase_space(buf);
                multiply(buf, if s + 1 == n_sub { &half } else { &full });
            }
            grid.momentum_space(buf);
        })?;
        Ok(self.free_for(&after, kbar, 1.0 - alpha))
    }
}

/// One delta kick of strength `k = κ/kbar`: `c_{n+m} ← Σ i^m J_m(k) c_n`.
pub fn apply_kick(state: &QuantumState, kick_ratio: f64) -> Result<QuantumState> {
    Propagator::new().kick(state, kick_ratio)
}

/// Free evolution over one scaled period, `c_n ← e^{−i kbar (n+β)²/2} c_n`.
pub fn apply_free(state: &QuantumState, kbar: f64) -> QuantumState {
    Propagator::new().free(state, kbar)
}
