//! Scenario file: a TOML document whose every key is optional.
//!
//! ```toml
//! theta_min_deg = 10.0
//! weather_csv_path = "weather.csv"
//! overpass_hours = [0, 12]
//!
//! [orbit]
//! altitude_m = 500e3
//!
//! [[sites]]
//! id = "Dublin"
//! latitude_deg = 53.35
//! longitude_deg = -6.25
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use satqkd_core::{LinkBudget, Orbit, SiteInfo, Source};

use crate::error::{CliError, ErrorKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub orbit: Orbit,
    pub link: LinkBudget,
    pub source: Source,
    pub theta_min_deg: f64,
    pub sites: Vec<SiteInfo>,
    pub weather_csv_path: Option<PathBuf>,
    pub overpass_hours: Vec<u32>,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
    /// Integration step along a pass.
    pub time_step_s: f64,
    /// Spacing of the ground-track offset grid.
    pub offset_step_m: f64,
    pub running_average_days: usize,
    /// Maximum elevations of the passes emitted by `pass-profile`.
    pub profile_max_elevations_deg: Vec<f64>,
    /// Clear-sky annual volume used to weight diversity results. When absent,
    /// the mean annual capacity over the configured sites is used.
    pub clear_sky_annual_bits: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            orbit: Orbit::default(),
            link: LinkBudget::default(),
            source: Source::default(),
            theta_min_deg: 10.0,
            sites: default_sites(),
            weather_csv_path: None,
            overpass_hours: vec![0, 12],
            output_dir: PathBuf::from("reports"),
            output_format: OutputFormat::Csv,
            time_step_s: 1.0,
            offset_step_m: 1_000.0,
            running_average_days: 30,
            profile_max_elevations_deg: vec![90.0, 60.0, 30.0],
            clear_sky_annual_bits: None,
        }
    }
}

pub fn default_sites() -> Vec<SiteInfo> {
    vec![
        SiteInfo::new("Dublin", 53.35, -6.25),
        SiteInfo::new("Galway", 53.54, -8.98),
        SiteInfo::new("Cork", 51.85, -8.48),
        SiteInfo::new("Waterford", 52.25, -7.08),
    ]
}

/// Reads, defaults and validates a scenario file.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::new(ErrorKind::Config, format!("{}: {e}", path.display()))
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_scenario_str(&text, base)
        .map_err(|e| e.context(&path.display().to_string()))
}

/// Parses scenario text, resolving relative paths against `base_dir`.
pub fn parse_scenario_str(text: &str, base_dir: &Path) -> Result<ScenarioConfig> {
    let mut config: ScenarioConfig = toml::from_str(text)
        .map_err(|e| CliError::new(ErrorKind::Config, e.to_string().trim_end().to_owned()))?;
    if let Some(p) = config.weather_csv_path.take() {
        config.weather_csv_path = Some(resolve(base_dir, p));
    }
    config.output_dir = resolve(base_dir, std::mem::take(&mut config.output_dir));
    config.validate()?;
    Ok(config)
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn check(ok: bool, field: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(field, reason))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.orbit.validate().map_err(CliError::from_validation)?;
        self.link.validate().map_err(CliError::from_validation)?;
        self.source.validate().map_err(CliError::from_validation)?;

        check(
            (0.0..90.0).contains(&self.theta_min_deg),
            "theta_min_deg",
            "must lie in [0, 90)",
        )?;
        check(
            self.time_step_s > 0.0 && self.time_step_s.is_finite(),
            "time_step_s",
            "must be a finite value > 0",
        )?;
        check(
            self.offset_step_m > 0.0 && self.offset_step_m.is_finite(),
            "offset_step_m",
            "must be a finite value > 0",
        )?;
        check(self.running_average_days > 0, "running_average_days", "must be >= 1")?;
        check(
            self.profile_max_elevations_deg
                .iter()
                .all(|&e| e > 0.0 && e <= 90.0),
            "profile_max_elevations_deg",
            "every elevation must lie in (0, 90]",
        )?;
        if let Some(bits) = self.clear_sky_annual_bits {
            check(
                bits >= 0.0 && bits.is_finite(),
                "clear_sky_annual_bits",
                "must be a finite value >= 0",
            )?;
        }

        check(!self.overpass_hours.is_empty(), "overpass_hours", "must not be empty")?;
        check(
            self.overpass_hours.iter().all(|h| matches!(h, 0 | 12)),
            "overpass_hours",
            "allowed values are 0 and 12",
        )?;
        let hours: BTreeSet<_> = self.overpass_hours.iter().collect();
        check(
            hours.len() == self.overpass_hours.len(),
            "overpass_hours",
            "duplicate hour",
        )?;

        let mut ids = BTreeSet::new();
        for site in &self.sites {
            check(
                !site.id.is_empty() && !site.id.contains('+'),
                "sites.id",
                "must be non-empty and must not contain '+'",
            )?;
            check(ids.insert(site.id.as_str()), "sites.id", "duplicate site id")?;
            check(
                site.latitude_deg.abs() < 90.0,
                "sites.latitude_deg",
                "must lie in (-90, 90)",
            )?;
            check(
                site.longitude_deg.abs() <= 180.0,
                "sites.longitude_deg",
                "must lie in [-180, 180]",
            )?;
        }
        Ok(())
    }

    /// Weather file path, checked for existence, for commands that need one.
    pub fn weather_csv(&self) -> Result<&Path> {
        if self.sites.is_empty() {
            return Err(CliError::config("sites", "at least one site is required"));
        }
        let path = self
            .weather_csv_path
            .as_deref()
            .ok_or_else(|| CliError::config("weather_csv_path", "required by this command"))?;
        if !path.exists() {
            return Err(crate::error::missing_path("weather_csv_path", path));
        }
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_scenario_str("", Path::new("")).unwrap();
        assert_eq!(cfg, ScenarioConfig {
            output_dir: PathBuf::from("reports"),
            ..Default::default()
        });
        assert_eq!(cfg.link.wavelength_m, 1550e-9);
        assert_eq!(cfg.orbit.altitude_m, 500e3);
        assert_eq!(cfg.link.tx_aperture_m, 0.08);
        assert_eq!(cfg.link.rx_aperture_m, 0.70);
        assert_eq!(cfg.link.zenith_transmittance, 0.9);
        assert_eq!(cfg.link.other_loss_db, 20.0);
    }

    #[test]
    fn overrides_and_paths() {
        let cfg = parse_scenario_str(
            "theta_min_deg = 0\nweather_csv_path = \"w.csv\"\noutput_dir = \"/tmp/out\"\n\n[source]\nprotocol = \"BB84_WCP_DECOY\"\n",
            Path::new("/data/scn"),
        )
        .unwrap();
        assert_eq!(cfg.theta_min_deg, 0.0);
        assert_eq!(cfg.weather_csv_path.as_deref(), Some(Path::new("/data/scn/w.csv")));
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/out"));
        assert_eq!(cfg.source.protocol, satqkd_core::ProtocolScaling::Bb84WcpDecoy);
    }

    #[test]
    fn field_errors() {
        let field = |text: &str| parse_scenario_str(text, Path::new("")).unwrap_err().field;
        assert_eq!(field("[orbit]\naltitude_m = -1\n").as_deref(), Some("orbit.altitude_m"));
        assert_eq!(field("[link]\nzenith_transmittance = 1.5\n").as_deref(), Some("link.zenith_transmittance"));
        assert_eq!(field("overpass_hours = [6]\n").as_deref(), Some("overpass_hours"));
        assert_eq!(field("theta_min_deg = 90\n").as_deref(), Some("theta_min_deg"));
    }

    #[test]
    fn unknown_and_malformed_keys_rejected() {
        for text in ["altitude = 3\n", "[orbit]\nheight = 1\n", "theta_min_deg = \n"] {
            let err = parse_scenario_str(text, Path::new("")).unwrap_err();
            assert_eq!(err.kind, ErrorKind::Config, "{text}");
            assert!(err.message.contains("line"), "{}", err.message);
        }
    }
}
