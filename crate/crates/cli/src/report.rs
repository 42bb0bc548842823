//! Flat report rows and their CSV/JSON encodings.
//!
//! Every numeric value is rounded to nine significant digits when a row is
//! built, so the in-memory report, the file and a re-parse of the file agree
//! exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::{CliError, ErrorKind, Result};

/// Rounds to nine significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassProfileRow {
    pub theta_max_deg: f64,
    pub t_s: f64,
    pub elevation_deg: f64,
    pub slant_range_m: f64,
    /// Empty at the horizon, where the slab model diverges.
    pub total_loss_db: Option<f64>,
    pub key_rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassSummaryRow {
    pub theta_max_deg: f64,
    pub theta_min_deg: f64,
    pub d_min_m: f64,
    pub half_window_s: f64,
    pub skl_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub elevation_deg: f64,
    pub slant_range_m: f64,
    pub atm_db: f64,
    pub diff_db: f64,
    pub other_db: f64,
    pub total_db: f64,
    pub transmissivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub theta_min_deg: f64,
    pub d_min_m: f64,
    pub skl_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummaryRow {
    pub theta_min_deg: f64,
    pub d_plus_m: f64,
    pub skl_integral_bit_m: f64,
    /// Area relative to the curve at the configured elevation floor.
    pub area_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualRow {
    pub site_id: String,
    pub latitude_deg: f64,
    pub l_lat_m: f64,
    pub n_year: f64,
    pub skl_integral_bit_m: f64,
    pub skl_year_bits: f64,
    pub aes256_keys: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub site_id: String,
    pub month: u32,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// One hour of a mean-by-hour profile. `series` is a site id or `min` for
/// the cross-site minimum; `month` is empty for the whole year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyRow {
    pub series: String,
    pub month: Option<u32>,
    pub hour: u32,
    pub mean_cloud_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub mode: String,
    pub site_a: String,
    pub site_b: String,
    pub r: f64,
}

/// Running average of the daily minimum over `series` (sites joined by `+`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningAverageRow {
    pub overpass_hour: u32,
    pub series: String,
    pub date: NaiveDate,
    pub mean_cloud_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub site_id: String,
    pub records: usize,
    pub first: Option<NaiveDateTime>,
    pub last: Option<NaiveDateTime>,
    pub coverage_days: usize,
    pub missing_hours: u64,
    pub gaps: usize,
    pub blank_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub site_id: String,
    pub after: NaiveDateTime,
    pub before: NaiveDateTime,
    pub missing_hours: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCountRow {
    pub overpass_hour: u32,
    pub combination: String,
    pub site_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationRow {
    pub overpass_hour: u32,
    pub combination: String,
    pub size: usize,
    pub total_days: usize,
    pub skipped_days: usize,
    pub mean_min_cloud_pct: f64,
    pub availability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRow {
    pub overpass_hour: u32,
    pub combination: String,
    pub clear_sky_annual_bits: f64,
    pub availability: f64,
    pub weighted_annual_bits: f64,
}

macro_rules! report_data {
    ($($variant:ident($row:ty)),+ $(,)?) => {
        /// Rows of one report file.
        #[derive(Debug, Clone, PartialEq)]
        pub enum ReportData {
            $($variant(Vec<$row>),)+
        }

        impl ReportData {
            pub fn len(&self) -> usize {
                match self {
                    $(ReportData::$variant(rows) => rows.len(),)+
                }
            }

            pub fn is_empty(&self) -> bool {
                self.len() == 0
            }

            pub fn encode(&self, format: OutputFormat) -> Result<Vec<u8>> {
                match self {
                    $(ReportData::$variant(rows) => encode_rows(rows, format),)+
                }
            }

            /// Decodes `bytes` as rows of the same kind as `self`.
            pub fn decode_like(&self, bytes: &[u8], format: OutputFormat) -> Result<Self> {
                Ok(match self {
                    $(ReportData::$variant(_) => ReportData::$variant(decode_rows(bytes, format)?),)+
                })
            }
        }
    };
}

report_data! {
    PassProfile(PassProfileRow),
    PassSummary(PassSummaryRow),
    Loss(LossRow),
    Curve(CurveRow),
    CurveSummary(CurveSummaryRow),
    Annual(AnnualRow),
    Box(BoxRow),
    Hourly(HourlyRow),
    Correlation(CorrelationRow),
    RunningAverage(RunningAverageRow),
    Quality(QualityRow),
    Gap(GapRow),
    SelectionCount(SelectionCountRow),
    Combination(CombinationRow),
    Weighted(WeightedRow),
}

/// A named report with its one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: &'static str,
    pub summary: String,
    pub data: ReportData,
}

impl Report {
    pub fn new(name: &'static str, summary: impl Into<String>, data: ReportData) -> Self {
        Self {
            name,
            summary: summary.into(),
            data,
        }
    }

    pub fn file_name(&self, format: OutputFormat) -> String {
        format!("{}.{}", self.name, format.extension())
    }

    pub fn write_to(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        let path = dir.join(self.file_name(format));
        let bytes = self.data.encode(format)?;
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Reads a file written by [`Report::write_to`] back into rows.
    pub fn read_back(&self, path: &Path, format: OutputFormat) -> Result<ReportData> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.data.decode_like(&bytes, format)
    }
}

fn encode_rows<R: Serialize>(rows: &[R], format: OutputFormat) -> Result<Vec<u8>> {
    let encode_err = |e: &dyn std::fmt::Display| CliError::new(ErrorKind::Data, format!("encoding report: {e}"));
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| encode_err(&e))?;
            }
            w.into_inner().map_err(|e| encode_err(&e))
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(|e| encode_err(&e))?;
            out.write_all(b"\n").expect("writing to a Vec");
            Ok(out)
        }
    }
}

fn decode_rows<R: DeserializeOwned>(bytes: &[u8], format: OutputFormat) -> Result<Vec<R>> {
    let decode_err = |e: &dyn std::fmt::Display| CliError::new(ErrorKind::Data, format!("decoding report: {e}"));
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(bytes)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| decode_err(&e)),
        OutputFormat::Json => serde_json::from_slice(bytes).map_err(|e| decode_err(&e)),
    }
}
