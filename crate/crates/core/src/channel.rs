//! Downlink loss budget.
//!
//! All losses are positive dB; the channel transmissivity is
//! `10^(-total_db / 10)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{slant_range, OrbitConfig};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct LinkBudgetParams<T> {
    pub wavelength_m: T,
    /// Transmitter aperture diameter.
    pub tx_aperture_m: T,
    /// Receiver aperture diameter.
    pub rx_aperture_m: T,
    /// Atmospheric transmittance at zenith, in (0, 1].
    pub zenith_transmittance: T,
    /// Turbulence, pointing, optics and detector losses, lumped.
    pub other_loss_db: T,
}

impl<T: Real> Default for LinkBudgetParams<T> {
    fn default() -> Self {
        Self {
            wavelength_m: T::lit(1550e-9),
            tx_aperture_m: T::lit(0.08),
            rx_aperture_m: T::lit(0.70),
            zenith_transmittance: T::lit(0.9),
            other_loss_db: T::lit(20.0),
        }
    }
}

impl<T: Real> LinkBudgetParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, field: &'static str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, "must be a finite value > 0"))
            }
        };
        positive(self.wavelength_m, "link.wavelength_m")?;
        positive(self.tx_aperture_m, "link.tx_aperture_m")?;
        positive(self.rx_aperture_m, "link.rx_aperture_m")?;
        if !(self.zenith_transmittance > T::zero() && self.zenith_transmittance <= T::one()) {
            return Err(Error::invalid(
                "link.zenith_transmittance",
                "must lie in (0, 1]",
            ));
        }
        if !(self.other_loss_db >= T::zero()) || !self.other_loss_db.is_finite() {
            return Err(Error::invalid("link.other_loss_db", "must be a finite value >= 0"));
        }
        Ok(())
    }
}

/// Per-term channel losses at one elevation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown<T> {
    pub atm_db: T,
    pub diff_db: T,
    pub other_db: T,
    pub total_db: T,
}

impl<T: Real> LossBreakdown<T> {
    pub fn transmissivity(&self) -> T {
        transmissivity(self.total_db)
    }
}

/// Linear transmissivity of a `loss_db` channel.
pub fn transmissivity<T: Real>(loss_db: T) -> T {
    T::lit(10.0).powf(-loss_db / T::lit(10.0))
}

/// Slab-atmosphere extinction: the zenith transmittance raised to sec(90° − θ), in dB.
pub fn atmospheric_loss_db<T: Real>(elevation_deg: T, tau_zenith: T) -> Result<T> {
    if !(elevation_deg > T::zero() && elevation_deg <= T::lit(90.0)) {
        return Err(Error::domain(
            "elevation_deg",
            elevation_deg.as_f64(),
            "0 < elevation <= 90 for the slab atmosphere",
        ));
    }
    if !(tau_zenith > T::zero() && tau_zenith <= T::one()) {
        return Err(Error::domain(
            "zenith_transmittance",
            tau_zenith.as_f64(),
            "0 < tau <= 1",
        ));
    }
    if tau_zenith == T::one() {
        return Ok(T::zero());
    }
    // sec(90° - θ) = 1 / sin θ
    Ok(-T::lit(10.0) * tau_zenith.log10() / elevation_deg.to_radians().sin())
}

/// Far-field half divergence angle 1.22·λ/D_T of a flat-top circular aperture.
pub fn divergence_half_angle<T: Real>(params: &LinkBudgetParams<T>) -> T {
    T::lit(1.22) * params.wavelength_m / params.tx_aperture_m
}

/// Geometric spreading loss −20·log₁₀(D_R / (D_T + ω·R')).
///
/// Negative (a gain) when the receiver is larger than the spread beam; the
/// model is not clamped there.
pub fn diffraction_loss_db<T: Real>(params: &LinkBudgetParams<T>, slant_range_m: T) -> Result<T> {
    if !(slant_range_m > T::zero()) || !slant_range_m.is_finite() {
        return Err(Error::domain(
            "slant_range_m",
            slant_range_m.as_f64(),
            "range > 0",
        ));
    }
    let spot = params.tx_aperture_m + divergence_half_angle(params) * slant_range_m;
    Ok(-T::lit(20.0) * (params.rx_aperture_m / spot).log10())
}

/// End-to-end loss at `elevation_deg` for a satellite on `orbit`.
pub fn total_loss_db<T: Real>(
    elevation_deg: T,
    params: &LinkBudgetParams<T>,
    orbit: &OrbitConfig<T>,
) -> Result<LossBreakdown<T>> {
    let range = slant_range(elevation_deg, orbit)?;
    loss_at(elevation_deg, range, params)
}

/// Loss breakdown for a known elevation/range pair.
pub fn loss_at<T: Real>(
    elevation_deg: T,
    slant_range_m: T,
    params: &LinkBudgetParams<T>,
) -> Result<LossBreakdown<T>> {
    let atm_db = atmospheric_loss_db(elevation_deg, params.zenith_transmittance)?;
    let diff_db = diffraction_loss_db(params, slant_range_m)?;
    let other_db = params.other_loss_db;
    Ok(LossBreakdown {
        atm_db,
        diff_db,
        other_db,
        total_db: atm_db + diff_db + other_db,
    })
}
