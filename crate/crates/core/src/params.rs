//! Physical constants for Caesium on the 852 nm line and the conversions
//! between laboratory units and the scaled rotor units.
//!
//! The effective Planck constant is `kbar = 8 ω_r T` with the single-photon
//! recoil frequency `ω_r = ħ k_l² / 2M`, `k_l = 2π/λ`. Scaled momentum is
//! `ρ = kbar · p` where `p` is in 2-photon recoils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Caesium-133 mass, kg.
pub const CS_MASS_KG: f64 = 132.905_451_961 * ATOMIC_MASS_UNIT;
/// D2 line wavelength used for the standing wave, nm.
pub const CS_WAVELENGTH_NM: f64 = 852.0;

/// Accepted band for `ω_r / 2π` with the Caesium defaults, Hz.
pub const RECOIL_BAND_HZ: (f64, f64) = (2.05e3, 2.08e3);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    wavelength_nm: f64,
    cs_mass_kg: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::caesium()
    }
}

impl PhysicalConstants {
    pub fn caesium() -> Self {
        Self {
            wavelength_nm: CS_WAVELENGTH_NM,
            cs_mass_kg: CS_MASS_KG,
        }
    }

    /// Constants with optional overrides of the `wavelength_nm` and
    /// `cs_mass_kg` configuration keys. Missing keys keep the Caesium value.
    pub fn with_overrides(wavelength_nm: Option<f64>, cs_mass_kg: Option<f64>) -> Result<Self> {
        let c = Self {
            wavelength_nm: wavelength_nm.unwrap_or(CS_WAVELENGTH_NM),
            cs_mass_kg: cs_mass_kg.unwrap_or(CS_MASS_KG),
        };
        if !(c.wavelength_nm.is_finite() && c.wavelength_nm > 0.0) {
            return Err(Error::invalid(format!(
                "wavelength_nm must be positive, got {}",
                c.wavelength_nm
            )));
        }
        if !(c.cs_mass_kg.is_finite() && c.cs_mass_kg > 0.0) {
            return Err(Error::invalid(format!(
                "cs_mass_kg must be positive, got {}",
                c.cs_mass_kg
            )));
        }
        Ok(c)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength_nm * 1e-9
    }

    pub fn mass(&self) -> f64 {
        self.cs_mass_kg
    }

    /// Laser wavenumber `k_l = 2π/λ`, 1/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength()
    }

    /// Single-photon recoil frequency `ω_r = ħ k_l² / 2M`, rad/s.
    pub fn recoil_frequency(&self) -> f64 {
        let k = self.wavenumber();
        HBAR * k * k / (2.0 * self.cs_mass_kg)
    }

    /// Momentum unit `2ħk_l`, kg m/s.
    pub fn two_photon_recoil(&self) -> f64 {
        2.0 * HBAR * self.wavenumber()
    }

    /// Checks that `ω_r / 2π` falls in [`RECOIL_BAND_HZ`]. Only meaningful
    /// for the Caesium defaults.
    pub fn check_recoil_band(&self) -> Result<()> {
        let f = self.recoil_frequency() / (2.0 * std::f64::consts::PI);
        if f < RECOIL_BAND_HZ.0 || f > RECOIL_BAND_HZ.1 {
            return Err(Error::invalid(format!(
                "recoil frequency {f:.1} Hz outside [{}, {}] Hz",
                RECOIL_BAND_HZ.0, RECOIL_BAND_HZ.1
            )));
        }
        Ok(())
    }

    /// `kbar = 8 ω_r T`.
    pub fn kbar_from_period(&self, period: f64) -> Result<f64> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(format!(
                "kicking period must be positive, got {period}"
            )));
        }
        Ok(8.0 * self.recoil_frequency() * period)
    }

    pub fn period_from_kbar(&self, kbar: f64) -> Result<f64> {
        check_kbar(kbar)?;
        Ok(kbar / (8.0 * self.recoil_frequency()))
    }

    /// Pulse fraction `α = τ_p / T` for a pulse of fixed laboratory width.
    pub fn pulse_fraction(&self, kbar: f64, pulse_width: f64) -> Result<f64> {
        if !(pulse_width.is_finite() && pulse_width >= 0.0) {
            return Err(Error::invalid(format!(
                "pulse width must be non-negative, got {pulse_width}"
            )));
        }
        let period = self.period_from_kbar(kbar)?;
        let alpha = pulse_width / period;
        if alpha > 1.0 {
            return Err(Error::PulseLongerThanPeriod {
                pulse_width,
                period,
            });
        }
        Ok(alpha)
    }
}

fn check_kbar(kbar: f64) -> Result<()> {
    if !(kbar.is_finite() && kbar > 0.0) {
        return Err(Error::invalid(format!("kbar must be positive, got {kbar}")));
    }
    Ok(())
}

/// `ρ = kbar · p`.
pub fn scaled_momentum(p: f64, kbar: f64) -> f64 {
    kbar * p
}

/// `p = ρ / kbar`.
pub fn unscaled_momentum(rho: f64, kbar: f64) -> f64 {
    rho / kbar
}

/// Dimensionless rotor parameters. The kicking strength is carried as the
/// ratio `κ/kbar`, which is what an experiment holds fixed at constant laser
/// power while the period is scanned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorParams {
    pub kbar: f64,
    pub kick_ratio: f64,
    pub sigma_p: f64,
    /// Laboratory pulse width in seconds; `None` for ideal delta kicks.
    pub pulse_width: Option<f64>,
}

impl RotorParams {
    pub fn new(kbar: f64, kick_ratio: f64, sigma_p: f64) -> Result<Self> {
        check_kbar(kbar)?;
        if !(kick_ratio.is_finite() && kick_ratio >= 0.0) {
            return Err(Error::invalid(format!(
                "kick ratio must be non-negative, got {kick_ratio}"
            )));
        }
        if !(sigma_p.is_finite() && sigma_p >= 0.0) {
            return Err(Error::invalid(format!(
                "sigma_p must be non-negative, got {sigma_p}"
            )));
        }
        Ok(Self {
            kbar,
            kick_ratio,
            sigma_p,
            pulse_width: None,
        })
    }

    pub fn with_pulse_width(mut self, pulse_width: f64) -> Result<Self> {
        if !(pulse_width.is_finite() && pulse_width >= 0.0) {
            return Err(Error::invalid(format!(
                "pulse width must be non-negative, got {pulse_width}"
            )));
        }
        self.pulse_width = Some(pulse_width);
        Ok(self)
    }

    /// Kicking strength `κ = (κ/kbar) · kbar`.
    pub fn kappa(&self) -> f64 {
        self.kick_ratio * self.kbar
    }

    /// Scaled momentum spread `σ_ρ = kbar · σ_p`.
    pub fn sigma_rho(&self) -> f64 {
        self.kbar * self.sigma_p
    }

    /// `Some(α)` when a pulse width is set, failing if the pulse does not
    /// fit inside one period.
    pub fn pulse_fraction(&self, constants: &PhysicalConstants) -> Result<Option<f64>> {
        self.pulse_width
            .map(|w| constants.pulse_fraction(self.kbar, w))
            .transpose()
    }
}
