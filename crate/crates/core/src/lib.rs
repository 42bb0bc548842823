//! Feasibility models for satellite quantum key distribution downlinks.
//!
//! The crate covers four layers:
//!
//! * [`geometry`]: circular-orbit overpass geometry (slant range, Earth-central
//!   angles, elevation-vs-time profiles, contact windows, ground-track offsets).
//! * [`channel`]: downlink loss budget in dB (slab atmosphere, far-field
//!   diffraction, lumped other losses).
//! * [`capacity`]: repeaterless (PLOB) key-rate bound, per-pass key length,
//!   key length versus ground-track offset and annual clear-sky capacity.
//! * [`weather`] and [`diversity`]: hourly cloud-cover statistics and optical
//!   ground station site-diversity analysis.
//!
//! The physical models are generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). The aliases at the crate root fix the
//! scalar to `f64`, which is what the weather and diversity layers use.

// `!(x > 0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod diversity;
pub mod error;
pub mod geometry;
pub mod scalar;
pub mod weather;

pub use error::{Error, Result};
pub use scalar::Real;

pub use capacity::{
    AnnualCapacityReport, CapacityCurve, CurvePoint, LinkModel, ProtocolScaling, SourceConfig,
};
pub use channel::{LinkBudgetParams, LossBreakdown};
pub use diversity::{CombinationReport, SiteCombination, WeightedCapacityReport};
pub use geometry::{OrbitConfig, PassGeometry, PassProfile, PassSample};
pub use weather::{CloudSample, DataQualityReport, MonthlyStats, SiteInfo, SiteSeries, WeatherData};

/// Orbit parameters in double precision.
pub type Orbit = OrbitConfig<f64>;
/// Link budget parameters in double precision.
pub type LinkBudget = LinkBudgetParams<f64>;
/// Loss breakdown in double precision.
pub type Losses = LossBreakdown<f64>;
/// Source configuration in double precision.
pub type Source = SourceConfig<f64>;
/// Pass geometry in double precision.
pub type Pass = PassGeometry<f64>;
/// Pass profile in double precision.
pub type Profile = PassProfile<f64>;
/// Key-length-vs-offset curve in double precision.
pub type Curve = CapacityCurve<f64>;
/// Annual capacity report in double precision.
pub type AnnualReport = AnnualCapacityReport<f64>;
/// Complete link model in double precision.
pub type Model = LinkModel<f64>;
