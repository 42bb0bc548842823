//! Circular-orbit overpass geometry over a static spherical Earth.
//!
//! Angles are in degrees at every public interface and converted to radians
//! internally. A pass is described by its closest approach: either the maximum
//! elevation reached or, equivalently, the ground-track offset `d_min` between
//! the sub-satellite track and the station.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Circular orbit around a spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct OrbitConfig<T> {
    pub altitude_m: T,
    pub earth_radius_m: T,
    /// G·M in m³/s².
    pub gravitational_parameter: T,
}

impl<T: Real> Default for OrbitConfig<T> {
    fn default() -> Self {
        Self {
            altitude_m: T::lit(500e3),
            earth_radius_m: T::lit(6_371e3),
            gravitational_parameter: T::lit(6.67430e-11) * T::lit(5.972e24),
        }
    }
}

impl<T: Real> OrbitConfig<T> {
    pub fn new(altitude_m: T, earth_radius_m: T, gravitational_parameter: T) -> Result<Self> {
        let orbit = Self {
            altitude_m,
            earth_radius_m,
            gravitational_parameter,
        };
        orbit.validate()?;
        Ok(orbit)
    }

    /// Circular orbit at `altitude_m` with the default Earth constants.
    pub fn at_altitude(altitude_m: T) -> Result<Self> {
        Self::new(
            altitude_m,
            Self::default().earth_radius_m,
            Self::default().gravitational_parameter,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m > T::zero()) || !self.altitude_m.is_finite() {
            return Err(Error::invalid("orbit.altitude_m", "must be a finite value > 0"));
        }
        if !(self.earth_radius_m > T::zero()) || !self.earth_radius_m.is_finite() {
            return Err(Error::invalid("orbit.earth_radius_m", "must be a finite value > 0"));
        }
        if !(self.gravitational_parameter > T::zero()) || !self.gravitational_parameter.is_finite()
        {
            return Err(Error::invalid(
                "orbit.gravitational_parameter",
                "must be a finite value > 0",
            ));
        }
        Ok(())
    }

    /// Orbital radius measured from the Earth's centre.
    pub fn orbit_radius_m(&self) -> T {
        self.earth_radius_m + self.altitude_m
    }

    /// Earth-central angle between the station and the sub-satellite point
    /// when the satellite sits on the station's horizon.
    pub fn horizon_central_angle_rad(&self) -> T {
        (self.earth_radius_m / self.orbit_radius_m()).acos()
    }
}

/// Period of the circular orbit, 2π·sqrt(r³/GM).
pub fn orbital_period<T: Real>(orbit: &OrbitConfig<T>) -> T {
    let r = orbit.orbit_radius_m();
    T::TAU() * (r * r * r / orbit.gravitational_parameter).sqrt()
}

/// Mean motion of the circular orbit in rad/s.
pub fn orbital_angular_rate<T: Real>(orbit: &OrbitConfig<T>) -> T {
    T::TAU() / orbital_period(orbit)
}

fn check_elevation<T: Real>(elevation_deg: T) -> Result<T> {
    if elevation_deg >= T::zero() && elevation_deg <= T::lit(90.0) {
        Ok(elevation_deg.to_radians())
    } else {
        Err(Error::domain(
            "elevation_deg",
            elevation_deg.as_f64(),
            "0 <= elevation <= 90",
        ))
    }
}

/// Line-of-sight distance from the station to a satellite seen at `elevation_deg`.
pub fn slant_range<T: Real>(elevation_deg: T, orbit: &OrbitConfig<T>) -> Result<T> {
    let el = check_elevation(elevation_deg)?;
    let re = orbit.earth_radius_m;
    let ratio = orbit.orbit_radius_m() / re;
    let cos_el = el.cos();
    Ok(re * ((ratio * ratio - cos_el * cos_el).sqrt() - el.sin()))
}

/// Law-of-cosines slant range keyed on the Earth-central angle.
pub fn slant_range_from_central_angle<T: Real>(central_angle_rad: T, orbit: &OrbitConfig<T>) -> T {
    let re = orbit.earth_radius_m;
    let r = orbit.orbit_radius_m();
    let two = T::lit(2.0);
    (re * re + r * r - two * re * r * central_angle_rad.cos())
        .max(T::zero())
        .sqrt()
}

/// Earth-central angle γ = arccos(R_e·cosθ / (R_e + h)) − θ, in radians.
pub fn central_angle_from_elevation<T: Real>(elevation_deg: T, orbit: &OrbitConfig<T>) -> Result<T> {
    let el = check_elevation(elevation_deg)?;
    let gamma = (orbit.earth_radius_m * el.cos() / orbit.orbit_radius_m()).acos() - el;
    Ok(gamma.max(T::zero()))
}

/// Elevation (degrees) of a satellite at Earth-central angle `central_angle_rad`.
///
/// Negative once the satellite has set below the horizon.
pub fn elevation_from_central_angle<T: Real>(central_angle_rad: T, orbit: &OrbitConfig<T>) -> T {
    let ratio = orbit.earth_radius_m / orbit.orbit_radius_m();
    (central_angle_rad.cos() - ratio)
        .atan2(central_angle_rad.sin())
        .to_degrees()
}

/// Largest ground-track offset that still reaches `theta_min_deg` at closest approach.
pub fn max_offset_for_elevation<T: Real>(theta_min_deg: T, orbit: &OrbitConfig<T>) -> Result<T> {
    Ok(orbit.earth_radius_m * central_angle_from_elevation(theta_min_deg, orbit)?)
}

/// Closest-approach description of one overpass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassGeometry<T> {
    theta_max_deg: T,
    theta_min_deg: T,
    gamma_min_rad: T,
    d_min_m: T,
}

impl<T: Real> PassGeometry<T> {
    /// Pass peaking at `theta_max_deg`, keyed on the operational floor `theta_min_deg`.
    ///
    /// A peak below the floor is accepted here; [`pass_profile`] rejects it.
    pub fn new(theta_max_deg: T, theta_min_deg: T, orbit: &OrbitConfig<T>) -> Result<Self> {
        if !(theta_max_deg > T::zero() && theta_max_deg <= T::lit(90.0)) {
            return Err(Error::domain(
                "theta_max_deg",
                theta_max_deg.as_f64(),
                "0 < theta_max <= 90",
            ));
        }
        Self::check_floor(theta_min_deg)?;
        let gamma_min_rad = central_angle_from_elevation(theta_max_deg, orbit)?;
        Ok(Self {
            theta_max_deg,
            theta_min_deg,
            gamma_min_rad,
            d_min_m: orbit.earth_radius_m * gamma_min_rad,
        })
    }

    /// Pass whose ground track misses the station by `d_min_m` of arc.
    pub fn from_offset(d_min_m: T, theta_min_deg: T, orbit: &OrbitConfig<T>) -> Result<Self> {
        Self::check_floor(theta_min_deg)?;
        let gamma_min_rad = d_min_m / orbit.earth_radius_m;
        if !(d_min_m >= T::zero()) || gamma_min_rad > orbit.horizon_central_angle_rad() {
            return Err(Error::domain(
                "d_min_m",
                d_min_m.as_f64(),
                "0 <= offset <= horizon arc",
            ));
        }
        let theta_max_deg = elevation_from_central_angle(gamma_min_rad, orbit)
            .max(T::zero())
            .min(T::lit(90.0));
        Ok(Self {
            theta_max_deg,
            theta_min_deg,
            gamma_min_rad,
            d_min_m,
        })
    }

    fn check_floor(theta_min_deg: T) -> Result<()> {
        if theta_min_deg >= T::zero() && theta_min_deg < T::lit(90.0) {
            Ok(())
        } else {
            Err(Error::domain(
                "theta_min_deg",
                theta_min_deg.as_f64(),
                "0 <= theta_min < 90",
            ))
        }
    }

    pub fn theta_max_deg(&self) -> T {
        self.theta_max_deg
    }

    pub fn theta_min_deg(&self) -> T {
        self.theta_min_deg
    }

    /// Earth-central angle at closest approach.
    pub fn gamma_min_rad(&self) -> T {
        self.gamma_min_rad
    }

    /// Ground-track offset arc length.
    pub fn d_min_m(&self) -> T {
        self.d_min_m
    }

    /// Half-width of the contact window, or `None` if the pass stays below the floor.
    pub fn contact_half_window_s(&self, orbit: &OrbitConfig<T>) -> Option<T> {
        if self.theta_max_deg < self.theta_min_deg {
            return None;
        }
        let gamma_floor = central_angle_from_elevation(self.theta_min_deg, orbit).ok()?;
        // cos γ(t) = cos γ_min · cos(ωt), solved for γ(t) = γ_floor
        let cos_wt = gamma_floor.cos() / self.gamma_min_rad.cos();
        if cos_wt >= T::one() {
            return Some(T::zero());
        }
        Some(cos_wt.acos() / orbital_angular_rate(orbit))
    }

    /// Elevation and slant range at time `t_s` from closest approach.
    pub fn position_at(&self, t_s: T, orbit: &OrbitConfig<T>) -> (T, T) {
        let wt = orbital_angular_rate(orbit) * t_s.abs();
        let cos_gamma = (self.gamma_min_rad.cos() * wt.cos()).min(T::one()).max(-T::one());
        let gamma = cos_gamma.acos();
        (
            elevation_from_central_angle(gamma, orbit),
            slant_range_from_central_angle(gamma, orbit),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassSample<T> {
    /// Seconds from closest approach.
    pub t_s: T,
    pub elevation_deg: T,
    pub slant_range_m: T,
}

/// Elevation/range time series over one contact window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassProfile<T> {
    pub samples: Vec<PassSample<T>>,
    pub step_s: T,
}

impl<T: Real> PassProfile<T> {
    /// Time of the last sample, i.e. the half-width of the contact window.
    pub fn half_window_s(&self) -> T {
        self.samples.last().map_or(T::zero(), |s| s.t_s)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Samples a pass on the grid `t = k·step_s` inside the contact window, plus
/// both window endpoints where the elevation crosses the floor.
pub fn pass_profile<T: Real>(
    geom: &PassGeometry<T>,
    orbit: &OrbitConfig<T>,
    step_s: T,
) -> Result<PassProfile<T>> {
    if !(step_s > T::zero()) || !step_s.is_finite() {
        return Err(Error::invalid("step_s", "must be a finite value > 0"));
    }
    let t_end = geom
        .contact_half_window_s(orbit)
        .ok_or(Error::EmptyProfile {
            theta_max_deg: geom.theta_max_deg.as_f64(),
            theta_min_deg: geom.theta_min_deg.as_f64(),
        })?;

    let floor = geom.theta_min_deg;
    let sample = |t: T| {
        let (elevation_deg, slant_range_m) = geom.position_at(t, orbit);
        PassSample {
            t_s: t,
            elevation_deg: elevation_deg.max(floor),
            slant_range_m,
        }
    };

    if t_end <= T::zero() {
        return Ok(PassProfile {
            samples: vec![sample(T::zero())],
            step_s,
        });
    }

    // Grid points closer than this to an endpoint are dropped to avoid a
    // degenerate interval.
    let merge = step_s * T::lit(1e-6);
    let n = (t_end / step_s).floor().to_i64().unwrap_or(0);
    let mut samples = Vec::with_capacity(2 * n as usize + 3);
    samples.push(sample(-t_end));
    for k in -n..=n {
        let t = step_s * T::lit(k as f64);
        if (t_end - t.abs()) > merge {
            samples.push(sample(t));
        }
    }
    samples.push(sample(t_end));
    Ok(PassProfile { samples, step_s })
}
