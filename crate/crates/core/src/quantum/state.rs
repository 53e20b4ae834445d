use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    beta: f64,
    n_min: i64,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// State from raw parts; `amplitudes[j]` sits at ladder site `n_min + j`.
    pub fn from_parts(beta: f64, n_min: i64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if !(-0.5..0.5).contains(&beta) {
            return Err(Error::InvalidState(format!(
                "quasimomentum {beta} outside [-0.5, 0.5)"
            )));
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty ladder".into()));
        }
        Ok(Self {
            beta,
            n_min,
            amplitudes,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.amplitudes.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Amplitude at ladder site `n`; zero outside the window.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[(n - self.n_min) as usize]
        }
    }

    /// Momentum of ladder site `n`, 2-photon recoils.
    pub fn momentum(&self, n: i64) -> f64 {
        n as f64 + self.beta
    }

    /// Half the window width, rounded down.
    pub fn half_width(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|c_{n_min}|² + |c_{n_max}|²`.
    pub fn edge_mass(&self) -> f64 {
        let first = self.amplitudes[0].norm_sqr();
        if self.amplitudes.len() == 1 {
            return first;
        }
        first + self.amplitudes[self.amplitudes.len() - 1].norm_sqr()
    }

    /// `⟨p²⟩`, 2-photon recoils squared, without a norm check.
    pub fn mean_square_momentum(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let p = self.momentum(self.n_min + j as i64);
                c.norm_sqr() * p * p
            })
            .sum()
    }

    /// Same window grown by `extra` sites on each side.
    pub fn padded(&self, extra: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut amplitudes = Vec::with_capacity(self.len() + 2 * extra);
        amplitudes.extend(std::iter::repeat_n(zero, extra));
        amplitudes.extend_from_slice(&self.amplitudes);
        amplitudes.extend(std::iter::repeat_n(zero, extra));
        Self {
            beta: self.beta,
            n_min: self.n_min - extra as i64,
            amplitudes,
        }
    }

    /// Window doubled about its centre.
    pub fn expanded(&self) -> Self {
        self.padded(self.half_width().max(1))
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self {
            beta: self.beta,
            n_min: self.n_min,
            amplitudes,
        }
    }
}

/// Plane wave at `p₀ = n₀ + β` with `n₀ = floor(p₀ + ½)`, on the window
/// `n₀ ± half_width`.
pub fn init_plane_wave(p0: f64, half_width: usize) -> Result<QuantumState> {
    if half_width < 1 {
        return Err(Error::invalid("ladder half-width must be at least 1"));
    }
    if !p0.is_finite() {
        return Err(Error::invalid(format!("initial momentum {p0} is not finite")));
    }
    let n0 = (p0 + 0.5).floor();
    let mut beta = p0 - n0;
    // p0 + 0.5 can round up across an integer
    if beta >= 0.5 {
        beta -= 1.0;
    }
    let n0 = (p0 - beta).round() as i64;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
    amplitudes[half_width] = Complex64::new(1.0, 0.0);
    QuantumState::from_parts(beta, n0 - half_width as i64, amplitudes)
}

/// `Σ |c_n|² (n + β)² / 2`, 2-photon recoil energy units.
pub fn energy_of_state(state: &QuantumState) -> Result<f64> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidState(format!(
            "norm {norm} deviates from 1"
        )));
    }
    Ok(0.5 * state.mean_square_momentum())
}
