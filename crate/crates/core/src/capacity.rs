//! Secret-key capacity of the downlink.
//!
//! Rates are asymptotic upper bounds: the repeaterless PLOB capacity
//! `-log2(1 - T)` bits per channel use, or one of the linear protocol
//! scalings, multiplied by the source pulse rate. Per-pass key lengths are
//! trapezoidal integrals of the rate over the contact window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{loss_at, transmissivity, LinkBudgetParams};
use crate::error::{Error, Result};
use crate::geometry::{
    max_offset_for_elevation, orbital_period, pass_profile, OrbitConfig, PassGeometry,
};
use crate::scalar::{trapezoid, Real};

/// Seconds in a Julian year.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Key bits consumed by one AES-256 key.
pub const AES256_KEY_BITS: f64 = 256.0;

/// Rate-loss scaling used to turn transmissivity into key bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProtocolScaling {
    /// Repeaterless bound, −log₂(1 − T).
    #[default]
    Plob,
    /// One-way switching CV-QKD, T/ln 4.
    CvOneWay,
    /// Two-way CV-QKD with coherent states and homodyne detection, T/(4 ln 2).
    CvTwoWay,
    /// BB84 with an ideal single-photon source, T/2.
    Bb84SinglePhoton,
    /// BB84 with weak coherent pulses and decoy states, T/(2e).
    Bb84WcpDecoy,
    /// Measurement-device-independent QKD, T/(2e²).
    Mdi,
}

impl ProtocolScaling {
    pub const ALL: [ProtocolScaling; 6] = [
        ProtocolScaling::Plob,
        ProtocolScaling::CvOneWay,
        ProtocolScaling::CvTwoWay,
        ProtocolScaling::Bb84SinglePhoton,
        ProtocolScaling::Bb84WcpDecoy,
        ProtocolScaling::Mdi,
    ];

    /// Slope of the key rate in T as T → 0.
    pub fn linear_coefficient<T: Real>(self) -> T {
        let ln2 = T::LN_2();
        let two = T::lit(2.0);
        let e = T::E();
        match self {
            ProtocolScaling::Plob => T::one() / ln2,
            ProtocolScaling::CvOneWay => T::one() / (two * ln2),
            ProtocolScaling::CvTwoWay => T::one() / (T::lit(4.0) * ln2),
            ProtocolScaling::Bb84SinglePhoton => T::one() / two,
            ProtocolScaling::Bb84WcpDecoy => T::one() / (two * e),
            ProtocolScaling::Mdi => T::one() / (two * e * e),
        }
    }

    /// Key bits per channel use at transmissivity `t`.
    pub fn key_per_use<T: Real>(self, t: T) -> Result<T> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::domain("transmissivity", t.as_f64(), "0 <= T <= 1"));
        }
        match self {
            ProtocolScaling::Plob => {
                if t >= T::one() {
                    return Err(Error::domain(
                        "transmissivity",
                        t.as_f64(),
                        "T < 1 (a lossless channel has unbounded capacity)",
                    ));
                }
                Ok(-(-t).ln_1p() / T::LN_2())
            }
            other => Ok(t * other.linear_coefficient()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct SourceConfig<T> {
    pub pulse_rate_hz: T,
    pub protocol: ProtocolScaling,
}

impl<T: Real> Default for SourceConfig<T> {
    fn default() -> Self {
        Self {
            pulse_rate_hz: T::lit(1e9),
            protocol: ProtocolScaling::Plob,
        }
    }
}

impl<T: Real> SourceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.pulse_rate_hz > T::zero() && self.pulse_rate_hz.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(
                "source.pulse_rate_hz",
                "must be a finite value > 0",
            ))
        }
    }
}

/// Secret-key rate in bits/s for a channel with `total_loss_db` of loss.
pub fn plob_rate<T: Real>(total_loss_db: T, source: &SourceConfig<T>) -> Result<T> {
    if !(total_loss_db >= T::zero()) {
        return Err(Error::domain(
            "total_loss_db",
            total_loss_db.as_f64(),
            "loss >= 0 dB",
        ));
    }
    let k = source.protocol.key_per_use(transmissivity(total_loss_db))?;
    Ok(k * source.pulse_rate_hz)
}

/// Orbit, link budget and source bundled for capacity calculations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct LinkModel<T> {
    pub orbit: OrbitConfig<T>,
    pub link: LinkBudgetParams<T>,
    pub source: SourceConfig<T>,
}

impl<T: Real> Default for LinkModel<T> {
    fn default() -> Self {
        Self {
            orbit: OrbitConfig::default(),
            link: LinkBudgetParams::default(),
            source: SourceConfig::default(),
        }
    }
}

impl<T: Real> LinkModel<T> {
    pub fn new(
        orbit: OrbitConfig<T>,
        link: LinkBudgetParams<T>,
        source: SourceConfig<T>,
    ) -> Result<Self> {
        let model = Self {
            orbit,
            link,
            source,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.orbit.validate()?;
        self.link.validate()?;
        self.source.validate()
    }

    /// Key rate at a point of the pass. Zero at or below the horizon.
    pub fn key_rate_at(&self, elevation_deg: T, slant_range_m: T) -> Result<T> {
        if elevation_deg <= T::zero() {
            return Ok(T::zero());
        }
        let loss = loss_at(elevation_deg, slant_range_m, &self.link)?;
        plob_rate(loss.total_db, &self.source)
    }

    /// Key length of one overpass: the rate integrated over the contact window.
    ///
    /// A pass that never clears the elevation floor yields zero bits.
    pub fn pass_skl(&self, geom: &PassGeometry<T>, step_s: T) -> Result<T> {
        let profile = match pass_profile(geom, &self.orbit, step_s) {
            Ok(p) => p,
            Err(Error::EmptyProfile { .. }) => return Ok(T::zero()),
            Err(e) => return Err(e),
        };
        let ts: Vec<T> = profile.samples.iter().map(|s| s.t_s).collect();
        let rates = profile
            .samples
            .iter()
            .map(|s| self.key_rate_at(s.elevation_deg, s.slant_range_m))
            .collect::<Result<Vec<_>>>()?;
        Ok(trapezoid(&ts, &rates))
    }

    /// Per-pass key length sampled uniformly in ground-track offset on `[0, d⁺_min]`.
    pub fn skl_vs_offset(&self, theta_min_deg: T, n_points: usize, step_s: T) -> Result<CapacityCurve<T>> {
        if n_points < 2 {
            return Err(Error::invalid("n_points", "need at least 2 curve points"));
        }
        let d_plus = max_offset_for_elevation(theta_min_deg, &self.orbit)?;
        let last = T::lit((n_points - 1) as f64);
        let points = (0..n_points)
            .into_par_iter()
            .map(|i| {
                let d_min_m = if i + 1 == n_points {
                    d_plus
                } else {
                    d_plus * T::lit(i as f64) / last
                };
                let geom = PassGeometry::from_offset(d_min_m, theta_min_deg, &self.orbit)?;
                Ok(CurvePoint {
                    d_min_m,
                    skl_bits: self.pass_skl(&geom, step_s)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CapacityCurve {
            points,
            theta_min_deg,
        })
    }

    /// Like [`skl_vs_offset`](Self::skl_vs_offset) with the point count chosen so
    /// that neighbouring offsets are at most `offset_step_m` apart.
    pub fn skl_vs_offset_spaced(
        &self,
        theta_min_deg: T,
        offset_step_m: T,
        step_s: T,
    ) -> Result<CapacityCurve<T>> {
        if !(offset_step_m > T::zero()) {
            return Err(Error::invalid("offset_step_m", "must be > 0"));
        }
        let d_plus = max_offset_for_elevation(theta_min_deg, &self.orbit)?;
        let intervals = (d_plus / offset_step_m).ceil().to_usize().unwrap_or(1).max(1);
        self.skl_vs_offset(theta_min_deg, intervals + 1, step_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub d_min_m: T,
    pub skl_bits: T,
}

/// Per-pass key length as a function of ground-track offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCurve<T> {
    pub points: Vec<CurvePoint<T>>,
    pub theta_min_deg: T,
}

impl<T: Real> CapacityCurve<T> {
    /// Largest sampled offset.
    pub fn d_plus_m(&self) -> T {
        self.points.last().map_or(T::zero(), |p| p.d_min_m)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| CurvePoint {
                    d_min_m: p.d_min_m,
                    skl_bits: p.skl_bits * factor,
                })
                .collect(),
            theta_min_deg: self.theta_min_deg,
        }
    }
}

/// Area under the key-length-vs-offset curve, in bit-metres.
///
/// This is the quantity that, divided by the latitude circumference and
/// multiplied by the orbit count, gives the annual key volume.
pub fn skl_integral<T: Real>(curve: &CapacityCurve<T>) -> T {
    let ds: Vec<T> = curve.points.iter().map(|p| p.d_min_m).collect();
    let skl: Vec<T> = curve.points.iter().map(|p| p.skl_bits).collect();
    trapezoid(&ds, &skl)
}

/// Orbits completed in one Julian year.
pub fn orbits_per_year<T: Real>(orbit: &OrbitConfig<T>) -> T {
    T::lit(SECONDS_PER_YEAR) / orbital_period(orbit)
}

/// Clear-sky annual key volume at one station latitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualCapacityReport<T> {
    pub latitude_deg: T,
    /// Circumference of the parallel through the station.
    pub l_lat_m: T,
    pub n_year: T,
    pub skl_year_bits: T,
}

/// Annual key volume when the offset of each pass is uniformly distributed
/// along the station's parallel.
pub fn annual_capacity<T: Real>(
    latitude_deg: T,
    skl_int: T,
    orbit: &OrbitConfig<T>,
) -> Result<AnnualCapacityReport<T>> {
    if !(latitude_deg.abs() < T::lit(90.0)) {
        return Err(Error::domain(
            "latitude_deg",
            latitude_deg.as_f64(),
            "|latitude| < 90",
        ));
    }
    let l_lat_m = T::TAU() * orbit.earth_radius_m * latitude_deg.to_radians().cos();
    let n_year = orbits_per_year(orbit);
    Ok(AnnualCapacityReport {
        latitude_deg,
        l_lat_m,
        n_year,
        skl_year_bits: n_year * skl_int / l_lat_m,
    })
}

/// Converts a PLOB-bounded key volume into the volume under another
/// protocol's low-transmissivity scaling.
pub fn rescale_plob_capacity<T: Real>(plob_bits: T, protocol: ProtocolScaling) -> T {
    plob_bits * protocol.linear_coefficient::<T>() / ProtocolScaling::Plob.linear_coefficient::<T>()
}

/// Number of AES-256 keys a key volume can seed.
pub fn aes256_keys<T: Real>(bits: T) -> T {
    bits / T::lit(AES256_KEY_BITS)
}
