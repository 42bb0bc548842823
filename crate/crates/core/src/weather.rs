//! Hourly cloud-cover series and their descriptive statistics.
//!
//! Timestamps are local civil time at hour resolution and are used as-is.
//! Missing hours are never imputed; statistics work over the samples present.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOURS_PER_DAY: usize = 24;

/// Column names of the weather CSV.
pub const SITE_COLUMN: &str = "name";
pub const DATETIME_COLUMN: &str = "datetime";
pub const CLOUD_COLUMN: &str = "cloudcover";

const DATETIME_FORMATS: [&str; 4] = [
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteInfo {
    pub id: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl SiteInfo {
    pub fn new(id: impl Into<String>, latitude_deg: f64, longitude_deg: f64) -> Self {
        Self {
            id: id.into(),
            latitude_deg,
            longitude_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudSample {
    pub timestamp: NaiveDateTime,
    pub cloud_cover_pct: f64,
}

/// One station's hourly cloud cover, strictly increasing in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSeries {
    pub site: SiteInfo,
    records: Vec<CloudSample>,
}

impl SiteSeries {
    pub fn new(site: SiteInfo, records: Vec<CloudSample>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !(0.0..=100.0).contains(&r.cloud_cover_pct) {
                return Err(Error::invalid(
                    "cloud_cover_pct",
                    format!("{} at {} outside [0, 100]", r.cloud_cover_pct, r.timestamp),
                ));
            }
            if i > 0 && records[i - 1].timestamp >= r.timestamp {
                return Err(Error::invalid(
                    "timestamp",
                    format!("{} not after {}", r.timestamp, records[i - 1].timestamp),
                ));
            }
        }
        Ok(Self { site, records })
    }

    pub fn id(&self) -> &str {
        &self.site.id
    }

    pub fn records(&self) -> &[CloudSample] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn value_at(&self, timestamp: NaiveDateTime) -> Option<f64> {
        self.records
            .binary_search_by_key(&timestamp, |r| r.timestamp)
            .ok()
            .map(|i| self.records[i].cloud_cover_pct)
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.records.first().map(|r| r.timestamp.date())
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.records.last().map(|r| r.timestamp.date())
    }

    /// Calendar days from the first to the last record, inclusive.
    pub fn coverage_days(&self) -> usize {
        match (self.first_date(), self.last_date()) {
            (Some(a), Some(b)) => (b - a).num_days() as usize + 1,
            _ => 0,
        }
    }

    fn filtered(&self, month: Option<u32>) -> impl Iterator<Item = &CloudSample> {
        self.records
            .iter()
            .filter(move |r| month.is_none_or(|m| r.timestamp.month() == m))
    }
}

/// A run of missing hours between two consecutive records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub after: NaiveDateTime,
    pub before: NaiveDateTime,
    pub missing_hours: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteQuality {
    pub site_id: String,
    pub records: usize,
    pub first: Option<NaiveDateTime>,
    pub last: Option<NaiveDateTime>,
    pub coverage_days: usize,
    pub missing_hours: u64,
    pub gaps: Vec<Gap>,
    /// Line numbers of rows with an empty cloud-cover cell.
    pub blank_rows: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataQualityReport {
    pub sites: Vec<SiteQuality>,
    /// Rows naming a site outside the expected set.
    pub ignored_rows: usize,
}

impl DataQualityReport {
    pub fn for_series(series: &[SiteSeries]) -> Self {
        Self {
            sites: series.iter().map(|s| site_quality(s, Vec::new())).collect(),
            ignored_rows: 0,
        }
    }
}

fn site_quality(series: &SiteSeries, blank_rows: Vec<u64>) -> SiteQuality {
    let gaps: Vec<Gap> = series
        .records
        .windows(2)
        .filter_map(|w| {
            let hours = (w[1].timestamp - w[0].timestamp).num_hours();
            (hours > 1).then(|| Gap {
                after: w[0].timestamp,
                before: w[1].timestamp,
                missing_hours: hours as u64 - 1,
            })
        })
        .collect();
    SiteQuality {
        site_id: series.id().to_owned(),
        records: series.len(),
        first: series.records.first().map(|r| r.timestamp),
        last: series.records.last().map(|r| r.timestamp),
        coverage_days: series.coverage_days(),
        missing_hours: gaps.iter().map(|g| g.missing_hours).sum(),
        gaps,
        blank_rows,
    }
}

/// The series of a set of stations, in the order the stations were declared.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherData {
    pub series: Vec<SiteSeries>,
    pub quality: DataQualityReport,
}

impl WeatherData {
    pub fn from_series(series: Vec<SiteSeries>) -> Self {
        let quality = DataQualityReport::for_series(&series);
        Self { series, quality }
    }

    pub fn get(&self, site_id: &str) -> Option<&SiteSeries> {
        self.series.iter().find(|s| s.id() == site_id)
    }

    pub fn site_ids(&self) -> Vec<String> {
        self.series.iter().map(|s| s.id().to_owned()).collect()
    }

    pub fn all(&self) -> Vec<&SiteSeries> {
        self.series.iter().collect()
    }

    /// First and last calendar day covered by any series.
    pub fn date_span(&self) -> Option<(NaiveDate, NaiveDate)> {
        let first = self.series.iter().filter_map(|s| s.first_date()).min()?;
        let last = self.series.iter().filter_map(|s| s.last_date()).max()?;
        Some((first, last))
    }
}

fn parse_datetime(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    DATETIME_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
}

/// Loads a weather CSV from disk. See [`read_weather_csv`].
pub fn load_weather_csv(path: impl AsRef<Path>, expected_sites: &[SiteInfo]) -> Result<WeatherData> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_weather_csv(file, expected_sites)
}

/// Parses hourly cloud cover for `expected_sites` from CSV with the columns
/// `name`, `datetime` and `cloudcover` (extra columns are ignored).
///
/// Rows for other sites are counted and skipped. Rows with an empty cloud
/// cover cell are recorded as blanks in the quality report.
pub fn read_weather_csv<R: Read>(reader: R, expected_sites: &[SiteInfo]) -> Result<WeatherData> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Schema(format!("missing required column `{name}`")))
    };
    let (site_col, time_col, cloud_col) =
        (column(SITE_COLUMN)?, column(DATETIME_COLUMN)?, column(CLOUD_COLUMN)?);

    let mut records: BTreeMap<&str, Vec<CloudSample>> =
        expected_sites.iter().map(|s| (s.id.as_str(), Vec::new())).collect();
    let mut blanks: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut ignored_rows = 0;

    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let site = row.get(site_col).unwrap_or_default();
        let Some(samples) = records.get_mut(site) else {
            ignored_rows += 1;
            continue;
        };

        let raw_time = row.get(time_col).unwrap_or_default();
        let timestamp = parse_datetime(raw_time).ok_or_else(|| Error::Record {
            line,
            message: format!("unparseable datetime `{raw_time}`"),
        })?;
        if timestamp.minute() != 0 || timestamp.second() != 0 {
            return Err(Error::Record {
                line,
                message: format!("datetime `{raw_time}` is not on the hour"),
            });
        }
        let raw_cloud = row.get(cloud_col).unwrap_or_default();
        if raw_cloud.is_empty() {
            blanks.entry(site.to_owned()).or_default().push(line);
            continue;
        }
        let cloud_cover_pct: f64 = raw_cloud.parse().map_err(|_| Error::Record {
            line,
            message: format!("unparseable cloudcover `{raw_cloud}`"),
        })?;
        if !(0.0..=100.0).contains(&cloud_cover_pct) {
            return Err(Error::Record {
                line,
                message: format!("cloudcover {cloud_cover_pct} outside [0, 100]"),
            });
        }
        if let Some(prev) = samples.last() {
            if prev.timestamp == timestamp {
                return Err(Error::Record {
                    line,
                    message: format!("duplicate timestamp {timestamp} for site `{site}`"),
                });
            }
            if prev.timestamp > timestamp {
                return Err(Error::Record {
                    line,
                    message: format!(
                        "timestamp {timestamp} for site `{site}` precedes {}",
                        prev.timestamp
                    ),
                });
            }
        }
        samples.push(CloudSample {
            timestamp,
            cloud_cover_pct,
        });
    }

    let mut series = Vec::with_capacity(expected_sites.len());
    let mut quality = DataQualityReport {
        sites: Vec::with_capacity(expected_sites.len()),
        ignored_rows,
    };
    for info in expected_sites {
        let samples = records.remove(info.id.as_str()).unwrap_or_default();
        if samples.is_empty() {
            return Err(Error::Schema(format!("no records for site `{}`", info.id)));
        }
        let s = SiteSeries {
            site: info.clone(),
            records: samples,
        };
        quality.sites.push(site_quality(
            &s,
            blanks.remove(&info.id).unwrap_or_default(),
        ));
        series.push(s);
    }
    Ok(WeatherData { series, quality })
}

/// Quantile of sorted data by linear interpolation between order statistics.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Box-plot summary of one calendar month pooled over all years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyStats {
    pub site_id: String,
    pub month: u32,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl MonthlyStats {
    fn from_values(site_id: &str, month: u32, mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            site_id: site_id.to_owned(),
            month,
            count: values.len(),
            min: values[0],
            q1: quantile_sorted(&values, 0.25),
            median: quantile_sorted(&values, 0.5),
            q3: quantile_sorted(&values, 0.75),
            max: values[values.len() - 1],
        }
    }
}

/// Monthly box statistics over the pooled hourly samples. Months without data
/// are omitted.
pub fn monthly_box_stats(series: &SiteSeries) -> Result<Vec<MonthlyStats>> {
    if series.is_empty() {
        return Err(Error::EmptySelection {
            what: format!("site `{}`", series.id()),
        });
    }
    let mut by_month: [Vec<f64>; 12] = Default::default();
    for r in &series.records {
        by_month[r.timestamp.month0() as usize].push(r.cloud_cover_pct);
    }
    Ok(by_month
        .into_iter()
        .enumerate()
        .filter_map(|(m0, values)| {
            if values.is_empty() {
                log::warn!("site `{}` has no data in month {}", series.id(), m0 + 1);
                None
            } else {
                Some(MonthlyStats::from_values(series.id(), m0 as u32 + 1, values))
            }
        })
        .collect())
}

fn check_month(month: Option<u32>) -> Result<()> {
    match month {
        Some(m) if !(1..=12).contains(&m) => Err(Error::invalid("month", format!("{m} not in 1..=12"))),
        _ => Ok(()),
    }
}

/// Mean cloud cover for each hour of the day, optionally restricted to one month.
pub fn hourly_mean_profile(series: &SiteSeries, month: Option<u32>) -> Result<[f64; HOURS_PER_DAY]> {
    check_month(month)?;
    let mut sums = [0.0; HOURS_PER_DAY];
    let mut counts = [0usize; HOURS_PER_DAY];
    for r in series.filtered(month) {
        let h = r.timestamp.hour() as usize;
        sums[h] += r.cloud_cover_pct;
        counts[h] += 1;
    }
    let mut out = [0.0; HOURS_PER_DAY];
    for h in 0..HOURS_PER_DAY {
        if counts[h] == 0 {
            return Err(Error::EmptySelection {
                what: format!(
                    "site `{}` at hour {h}{}",
                    series.id(),
                    month.map(|m| format!(" in month {m}")).unwrap_or_default()
                ),
            });
        }
        out[h] = sums[h] / counts[h] as f64;
    }
    Ok(out)
}

/// Lowest site-mean cloud cover available at each hour across `series`.
pub fn cross_site_min_profile(
    series: &[&SiteSeries],
    month: Option<u32>,
) -> Result<[f64; HOURS_PER_DAY]> {
    if series.is_empty() {
        return Err(Error::EmptySelection {
            what: "cross-site profile over zero sites".into(),
        });
    }
    let mut out = [f64::INFINITY; HOURS_PER_DAY];
    for s in series {
        let profile = hourly_mean_profile(s, month)?;
        for (o, p) in out.iter_mut().zip(profile) {
            *o = o.min(p);
        }
    }
    Ok(out)
}

/// Per-day minimum cloud cover over `series` at `hour`. Days on which any
/// site lacks a record at that hour are skipped.
pub fn daily_min_at_hour(series: &[&SiteSeries], hour: u32) -> Result<Vec<(NaiveDate, f64)>> {
    let time = NaiveTime::from_hms_opt(hour, 0, 0)
        .ok_or_else(|| Error::invalid("hour", format!("{hour} not in 0..=23")))?;
    let Some(first) = series.iter().filter_map(|s| s.first_date()).min() else {
        return Ok(Vec::new());
    };
    let last = series
        .iter()
        .filter_map(|s| s.last_date())
        .max()
        .unwrap_or(first);
    Ok(first
        .iter_days()
        .take_while(|d| *d <= last)
        .filter_map(|day| {
            let ts = day.and_time(time);
            series
                .iter()
                .map(|s| s.value_at(ts))
                .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
                .map(|m| (day, m))
        })
        .collect())
}

/// Trailing mean over `window` consecutive samples, dated at the last sample
/// of each window. Returns `len - window + 1` points (none if the input is
/// shorter than the window).
pub fn running_average(values: &[(NaiveDate, f64)], window: usize) -> Result<Vec<(NaiveDate, f64)>> {
    if window == 0 {
        return Err(Error::invalid("window_days", "must be >= 1"));
    }
    if values.len() < window {
        return Ok(Vec::new());
    }
    Ok(values
        .windows(window)
        .map(|w| {
            let sum: f64 = w.iter().map(|(_, v)| v).sum();
            (w[window - 1].0, sum / window as f64)
        })
        .collect())
}

/// Running average of the cross-site minimum at `hour`.
pub fn running_min_average(
    series: &[&SiteSeries],
    hour: u32,
    window_days: usize,
) -> Result<Vec<(NaiveDate, f64)>> {
    running_average(&daily_min_at_hour(series, hour)?, window_days)
}

/// Pearson product-moment correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::EmptySelection {
            what: "correlation over fewer than 2 samples".into(),
        });
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 {
        return Err(Error::UndefinedCorrelation { series: "a".into() });
    }
    if sbb == 0.0 {
        return Err(Error::UndefinedCorrelation { series: "b".into() });
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// What each site contributes to a correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationMode {
    /// Every hourly sample present at both sites.
    #[default]
    Raw,
    /// The 24-point mean-by-hour profiles.
    HourlyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub site_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.site_ids.iter().position(|s| s == a)?;
        let j = self.site_ids.iter().position(|s| s == b)?;
        Some(self.values[i][j])
    }
}

fn paired_values(a: &SiteSeries, b: &SiteSeries, month: Option<u32>) -> (Vec<f64>, Vec<f64>) {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut ib = b.filtered(month).peekable();
    for ra in a.filtered(month) {
        while ib.peek().is_some_and(|rb| rb.timestamp < ra.timestamp) {
            ib.next();
        }
        if let Some(rb) = ib.peek() {
            if rb.timestamp == ra.timestamp {
                xs.push(ra.cloud_cover_pct);
                ys.push(rb.cloud_cover_pct);
            }
        }
    }
    (xs, ys)
}

/// Symmetric site-by-site correlation matrix with a unit diagonal.
pub fn correlation_matrix(
    series: &[&SiteSeries],
    mode: CorrelationMode,
    month: Option<u32>,
) -> Result<CorrelationMatrix> {
    check_month(month)?;
    let n = series.len();
    let profiles = match mode {
        CorrelationMode::HourlyProfile => series
            .iter()
            .map(|s| hourly_mean_profile(s, month))
            .collect::<Result<Vec<_>>>()?,
        CorrelationMode::Raw => Vec::new(),
    };
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let r = match mode {
                CorrelationMode::Raw => {
                    let (a, b) = paired_values(series[i], series[j], month);
                    pearson_correlation(&a, &b)
                }
                CorrelationMode::HourlyProfile => pearson_correlation(&profiles[i], &profiles[j]),
            }
            .map_err(|e| match e {
                Error::UndefinedCorrelation { series: which } => Error::UndefinedCorrelation {
                    series: if which == "a" { series[i].id() } else { series[j].id() }.to_owned(),
                },
                other => other,
            })?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        site_ids: series.iter().map(|s| s.id().to_owned()).collect(),
        values,
    })
}
