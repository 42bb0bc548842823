// Shared fixtures for the integration suites.
#![allow(dead_code)]

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satqkd_core::weather::{CloudSample, SiteInfo, SiteSeries, WeatherData};

pub const SITES: [&str; 4] = ["Dublin", "Galway", "Cork", "Waterford"];

/// Cloud cover per site per day at the overpass hour. `None` marks a missing record.
#[derive(Debug, Clone)]
pub struct DailyGrid {
    pub sites: Vec<String>,
    pub start: NaiveDate,
    pub hour: u32,
    pub values: Vec<Vec<Option<f64>>>,
}

impl DailyGrid {
    pub fn days(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn timestamp(&self, day: usize, hour: u32) -> NaiveDateTime {
        (self.start + Duration::days(day as i64))
            .and_hms_opt(hour, 0, 0)
            .unwrap()
    }

    /// Series holding the grid value at the overpass hour plus filler at
    /// another hour, so that lookups must hit the right timestamp.
    pub fn to_weather(&self) -> WeatherData {
        let other = (self.hour + 6) % 24;
        let series = self
            .sites
            .iter()
            .zip(&self.values)
            .map(|(id, vals)| {
                let mut records = Vec::new();
                for (d, v) in vals.iter().enumerate() {
                    let mut day = vec![(self.hour, *v), (other, Some(100.0 - v.unwrap_or(50.0)))];
                    day.sort_by_key(|(h, _)| *h);
                    for (h, v) in day {
                        if let Some(v) = v {
                            records.push(CloudSample {
                                timestamp: self.timestamp(d, h),
                                cloud_cover_pct: v,
                            });
                        }
                    }
                }
                SiteSeries::new(SiteInfo::new(id.clone(), 52.0, -7.0), records).unwrap()
            })
            .collect();
        WeatherData::from_series(series)
    }
}

/// Random grid; integer percentages so that ties occur.
pub fn random_grid(seed: u64, n_sites: usize, days: usize, hour: u32, missing_prob: f64) -> DailyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n_sites)
        .map(|_| {
            (0..days)
                .map(|_| {
                    if rng.gen::<f64>() < missing_prob {
                        None
                    } else if rng.gen::<f64>() < 0.5 {
                        Some(rng.gen_range(0..=100) as f64)
                    } else {
                        Some((rng.gen::<f64>() * 1000.0).round() / 10.0)
                    }
                })
                .collect()
        })
        .collect();
    DailyGrid {
        sites: SITES[..n_sites].iter().map(|s| s.to_string()).collect(),
        start: NaiveDate::from_ymd_opt(2018, 1, 1).unwrap(),
        hour,
        values,
    }
}

/// Independent recomputation of a combination report over the raw grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub counts: Vec<usize>,
    pub total_days: usize,
    pub mean_min: f64,
}

pub fn brute_force(grid: &DailyGrid, members: &[usize]) -> BruteForce {
    let mut counts = vec![0; members.len()];
    let mut total = 0;
    let mut sum = 0.0;
    'days: for day in 0..grid.days() {
        let mut best_slot = usize::MAX;
        let mut best = f64::INFINITY;
        for (slot, &site) in members.iter().enumerate() {
            match grid.values[site][day] {
                None => continue 'days,
                Some(v) if v < best => {
                    best = v;
                    best_slot = slot;
                }
                Some(_) => {}
            }
        }
        counts[best_slot] += 1;
        total += 1;
        sum += best;
    }
    BruteForce {
        counts,
        total_days: total,
        mean_min: sum / total as f64,
    }
}

/// All non-empty index subsets as bitmasks, ordered by popcount then by
/// lexicographic index order.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Complete hourly series for `n_sites` over `days` days starting 2019-12-20,
/// so that month boundaries are crossed.
pub fn random_hourly(seed: u64, n_sites: usize, days: usize) -> WeatherData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2019, 12, 20)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let series = SITES[..n_sites]
        .iter()
        .map(|id| {
            let mut level: f64 = rng.gen_range(0.0..100.0);
            let records = (0..days * 24)
                .map(|h| {
                    level = (level + rng.gen_range(-15.0..15.0)).clamp(0.0, 100.0);
                    CloudSample {
                        timestamp: start + Duration::hours(h as i64),
                        cloud_cover_pct: (level * 10.0).round() / 10.0,
                    }
                })
                .collect();
            SiteSeries::new(SiteInfo::new(*id, 52.0, -7.0), records).unwrap()
        })
        .collect();
    WeatherData::from_series(series)
}
