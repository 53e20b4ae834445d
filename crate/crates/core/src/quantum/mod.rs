//! Quantum kicked rotor on a momentum ladder.
//!
//! A plane wave of momentum `p₀ = n₀ + β` (2-photon recoils) only couples to
//! momenta `n + β`, since the kick potential is `2π`-periodic in `φ`. The
//! state is therefore a quasimomentum `β ∈ [−½, ½)` plus amplitudes on an
//! integer window `[n_min, n_max]`.
//!
//! Kicks are applied on a `2^q`-point phase grid through an FFT; the
//! contract is the Bessel convolution `⟨n+m| e^{ik cos φ} |n⟩ = i^m J_m(k)`.
//! Whenever an operation would push probability to the window edges the
//! window is doubled and the operation redone.

mod delta;
mod propagator;
mod pulse;
mod state;

pub use delta::{evolve_delta_ensemble, simulate_delta_ensemble};
pub use propagator::{apply_free, apply_kick, Propagator};
pub use pulse::{
    apply_pulse_period, evolve_pulse_ensemble, simulate_pulse_ensemble, traversal_fraction,
    PulseSchedule, MAX_SUBSTEPS, MIN_SUBSTEPS,
};
pub use state::{energy_of_state, init_plane_wave, QuantumState};

/// Ladder half-width used for an ensemble: `ceil(n_kicks · k) + 32`.
pub fn default_half_width(n_kicks: u32, kick_ratio: f64) -> usize {
    (n_kicks as f64 * kick_ratio).ceil() as usize + 32
}

/// Largest ladder half-width tried before reporting truncation.
pub const MAX_HALF_WIDTH: usize = 1 << 16;

/// Edge probability allowed after any operation.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Probability allowed to leave the window in one operation.
pub const LOSS_TOLERANCE: f64 = 1e-12;
