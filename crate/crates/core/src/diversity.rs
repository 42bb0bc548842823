//! Optical ground station site diversity.
//!
//! For each day a single downlink is made at a fixed overpass hour, to
//! whichever station in the combination reports the least cloud. Key volume
//! scales linearly with the clear fraction of the sky at the chosen station.

use std::fmt;

use chrono::{NaiveDate, NaiveTime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weather::WeatherData;

/// Ordered set of distinct stations; the order is the tie-break priority.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SiteCombination(Vec<String>);

impl SiteCombination {
    pub fn new<I, S>(sites: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sites: Vec<String> = sites.into_iter().map(Into::into).collect();
        if sites.is_empty() {
            return Err(Error::invalid("combination", "needs at least one site"));
        }
        for (i, s) in sites.iter().enumerate() {
            if s.is_empty() || s.contains('+') {
                return Err(Error::invalid("combination", format!("bad site id `{s}`")));
            }
            if sites[..i].contains(s) {
                return Err(Error::invalid("combination", format!("site `{s}` listed twice")));
            }
        }
        Ok(Self(sites))
    }

    /// Parses a `+`-joined label such as `Dublin+Cork`.
    pub fn parse(label: &str) -> Result<Self> {
        Self::new(label.split('+').map(str::trim))
    }

    pub fn sites(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, site_id: &str) -> bool {
        self.0.iter().any(|s| s == site_id)
    }

    pub fn label(&self) -> String {
        self.0.join("+")
    }
}

impl fmt::Display for SiteCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl TryFrom<Vec<String>> for SiteCombination {
    type Error = Error;

    fn try_from(sites: Vec<String>) -> Result<Self> {
        Self::new(sites)
    }
}

impl From<SiteCombination> for Vec<String> {
    fn from(c: SiteCombination) -> Self {
        c.0
    }
}

/// Every non-empty subset of `sites`, ordered by size and then
/// lexicographically by position in `sites`.
pub fn enumerate_combinations<S: AsRef<str>>(sites: &[S]) -> Result<Vec<SiteCombination>> {
    fn extend(start: usize, size: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            extend(i + 1, size, n, current, out);
            current.pop();
        }
    }

    let n = sites.len();
    let mut index_sets = Vec::with_capacity((1usize << n.min(20)) - 1);
    for size in 1..=n {
        extend(0, size, n, &mut Vec::with_capacity(size), &mut index_sets);
    }
    index_sets
        .into_iter()
        .map(|idx| SiteCombination::new(idx.into_iter().map(|i| sites[i].as_ref())))
        .collect()
}

/// Station chosen for one downlink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<'a> {
    pub site_id: &'a str,
    pub cloud_cover_pct: f64,
}

/// The least-cloudy station of `combination` at `timestamp`; ties go to the
/// station listed first. `None` when any station lacks a record.
pub fn select_min_cover_site<'a>(
    combination: &'a SiteCombination,
    timestamp: chrono::NaiveDateTime,
    data: &WeatherData,
) -> Result<Option<Selection<'a>>> {
    let mut best: Option<Selection<'a>> = None;
    for site_id in combination.sites() {
        let series = data
            .get(site_id)
            .ok_or_else(|| Error::UnknownSite(site_id.clone()))?;
        let Some(cloud_cover_pct) = series.value_at(timestamp) else {
            log::debug!("`{site_id}` has no record at {timestamp}; skipping day for {combination}");
            return Ok(None);
        };
        if best.is_none_or(|b| cloud_cover_pct < b.cloud_cover_pct) {
            best = Some(Selection {
                site_id,
                cloud_cover_pct,
            });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteCount {
    pub site_id: String,
    pub count: usize,
}

/// Selection tallies and mean minimum cloud cover for one combination at one
/// overpass hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub combination: SiteCombination,
    pub overpass_hour: u32,
    /// Days each station was selected, in combination order.
    pub counts: Vec<SiteCount>,
    pub total_days: usize,
    /// Days excluded because a station had no record at the overpass hour.
    pub skipped_days: Vec<NaiveDate>,
    pub mean_min_cloud_pct: f64,
    /// Mean clear-sky fraction at the selected station, `1 - mean_min_cloud_pct / 100`.
    pub availability: f64,
}

impl CombinationReport {
    pub fn count_for(&self, site_id: &str) -> Option<usize> {
        self.counts
            .iter()
            .find(|c| c.site_id == site_id)
            .map(|c| c.count)
    }
}

/// Availability implied by a mean minimum cloud cover.
pub fn availability_from_mean_min(mean_min_cloud_pct: f64) -> f64 {
    1.0 - mean_min_cloud_pct / 100.0
}

/// Runs the daily min-cover selection at `overpass_hour` over every day of
/// the data set's span.
pub fn combination_report(
    combination: &SiteCombination,
    overpass_hour: u32,
    data: &WeatherData,
) -> Result<CombinationReport> {
    let time = NaiveTime::from_hms_opt(overpass_hour, 0, 0)
        .ok_or_else(|| Error::invalid("overpass_hour", format!("{overpass_hour} not in 0..=23")))?;
    let (first, last) = data.date_span().ok_or_else(|| Error::EmptySelection {
        what: "weather data set".into(),
    })?;

    let mut counts = vec![0usize; combination.len()];
    let mut skipped_days = Vec::new();
    let mut total_days = 0usize;
    let mut sum = 0.0;
    for day in first.iter_days().take_while(|d| *d <= last) {
        match select_min_cover_site(combination, day.and_time(time), data)? {
            Some(sel) => {
                let idx = combination
                    .sites()
                    .iter()
                    .position(|s| s == sel.site_id)
                    .expect("selected site belongs to the combination");
                counts[idx] += 1;
                total_days += 1;
                sum += sel.cloud_cover_pct;
            }
            None => skipped_days.push(day),
        }
    }
    if total_days == 0 {
        return Err(Error::EmptySelection {
            what: format!("{combination} at {overpass_hour:02}:00 (no day has all sites)"),
        });
    }
    if !skipped_days.is_empty() {
        log::warn!(
            "{combination} at {overpass_hour:02}:00: {} day(s) skipped for missing records",
            skipped_days.len()
        );
    }
    let mean_min_cloud_pct = sum / total_days as f64;
    Ok(CombinationReport {
        counts: combination
            .sites()
            .iter()
            .zip(counts)
            .map(|(site_id, count)| SiteCount {
                site_id: site_id.clone(),
                count,
            })
            .collect(),
        combination: combination.clone(),
        overpass_hour,
        total_days,
        skipped_days,
        mean_min_cloud_pct,
        availability: availability_from_mean_min(mean_min_cloud_pct),
    })
}

/// Reports for every (hour, combination) pair, hour-major in the given order.
pub fn diversity_reports(
    combinations: &[SiteCombination],
    overpass_hours: &[u32],
    data: &WeatherData,
) -> Result<Vec<CombinationReport>> {
    let jobs: Vec<(u32, &SiteCombination)> = overpass_hours
        .iter()
        .flat_map(|&h| combinations.iter().map(move |c| (h, c)))
        .collect();
    jobs.into_par_iter()
        .map(|(h, c)| combination_report(c, h, data))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCapacityReport {
    pub combination: SiteCombination,
    pub overpass_hour: u32,
    pub clear_sky_annual_bits: f64,
    pub availability: f64,
    pub weighted_annual_bits: f64,
}

/// Clear-sky annual key volume scaled by the combination's availability.
pub fn weighted_annual_capacity(report: &CombinationReport, clear_sky_bits: f64) -> WeightedCapacityReport {
    WeightedCapacityReport {
        combination: report.combination.clone(),
        overpass_hour: report.overpass_hour,
        clear_sky_annual_bits: clear_sky_bits,
        availability: report.availability,
        weighted_annual_bits: clear_sky_bits * report.availability,
    }
}
