use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use log::{debug, info};

use satqkd_core::capacity::{aes256_keys, annual_capacity, skl_integral};
use satqkd_core::channel::{loss_at, total_loss_db};
use satqkd_core::diversity::{diversity_reports, enumerate_combinations, weighted_annual_capacity};
use satqkd_core::geometry::{pass_profile, slant_range};
use satqkd_core::weather::{
    correlation_matrix, cross_site_min_profile, hourly_mean_profile, load_weather_csv,
    monthly_box_stats, running_min_average, CorrelationMode,
};
use satqkd_core::{CombinationReport, Curve, Error, Model, Pass, WeatherData};

use crate::config::{OutputFormat, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Elevation, range, loss and key rate along passes of given maximum elevation.
    PassProfile,
    /// Loss budget versus elevation.
    LossCurve,
    /// Per-pass key length versus ground-track offset.
    SklCurve,
    /// Clear-sky annual key volume per site.
    Annual,
    /// Cloud-cover statistics of the weather file.
    WeatherStats,
    /// Site-diversity selection and cloud-weighted capacity.
    Diversity,
}

/// Computes every report of `command`.
pub fn run_command(config: &ScenarioConfig, command: Command) -> Result<Vec<Report>> {
    let model = Model {
        orbit: config.orbit,
        link: config.link,
        source: config.source,
    };
    match command {
        Command::PassProfile => pass_profiles(config, &model),
        Command::LossCurve => loss_curve(config).map(|r| vec![r]),
        Command::SklCurve => skl_curves(config, &model),
        Command::Annual => annual(config, &model).map(|r| vec![r]),
        Command::WeatherStats => weather_stats(config, &load_weather(config)?),
        Command::Diversity => diversity(config, &model, &load_weather(config)?),
    }
}

/// Writes reports into `dir`, creating it if needed. Files are written in
/// report order.
pub fn write_reports(reports: &[Report], dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    reports.iter().map(|r| r.write_to(dir, format)).collect()
}

fn load_weather(config: &ScenarioConfig) -> Result<WeatherData> {
    let path = config.weather_csv()?;
    let data = load_weather_csv(path, &config.sites)?;
    info!(
        "loaded {} sites from {} ({} rows ignored)",
        data.series.len(),
        path.display(),
        data.quality.ignored_rows
    );
    Ok(data)
}

fn pass_profiles(config: &ScenarioConfig, model: &Model) -> Result<Vec<Report>> {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &max in &config.profile_max_elevations_deg {
        let geom = Pass::new(max, config.theta_min_deg, &model.orbit)?;
        let profile = pass_profile(&geom, &model.orbit, config.time_step_s)
            .map_err(|e| CliError::from(e).context(&format!("pass at {max} deg")))?;
        for s in &profile.samples {
            let loss = if s.elevation_deg > 0.0 {
                Some(loss_at(s.elevation_deg, s.slant_range_m, &model.link)?.total_db)
            } else {
                None
            };
            rows.push(PassProfileRow {
                theta_max_deg: max,
                t_s: sig9(s.t_s),
                elevation_deg: sig9(s.elevation_deg),
                slant_range_m: sig9(s.slant_range_m),
                total_loss_db: loss.map(sig9),
                key_rate_bps: sig9(model.key_rate_at(s.elevation_deg, s.slant_range_m)?),
            });
        }
        summary.push(PassSummaryRow {
            theta_max_deg: max,
            theta_min_deg: config.theta_min_deg,
            d_min_m: sig9(geom.d_min_m()),
            half_window_s: sig9(profile.half_window_s()),
            skl_bits: sig9(model.pass_skl(&geom, config.time_step_s)?),
        });
    }
    let windows: Vec<String> = summary
        .iter()
        .map(|s| format!("{}deg +/-{:.1}s {:.3e}b", s.theta_max_deg, s.half_window_s, s.skl_bits))
        .collect();
    Ok(vec![
        Report::new(
            "pass_profile",
            format!("{} samples over {} passes", rows.len(), summary.len()),
            ReportData::PassProfile(rows),
        ),
        Report::new(
            "pass_summary",
            windows.join(", "),
            ReportData::PassSummary(summary),
        ),
    ])
}

fn loss_curve(config: &ScenarioConfig) -> Result<Report> {
    let rows = (1..=90)
        .map(|deg| {
            let el = f64::from(deg);
            let loss = total_loss_db(el, &config.link, &config.orbit)?;
            Ok(LossRow {
                elevation_deg: el,
                slant_range_m: sig9(slant_range(el, &config.orbit)?),
                atm_db: sig9(loss.atm_db),
                diff_db: sig9(loss.diff_db),
                other_db: sig9(loss.other_db),
                total_db: sig9(loss.total_db),
                transmissivity: sig9(loss.transmissivity()),
            })
        })
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let zenith = rows.last().map_or(f64::NAN, |r| r.total_db);
    Ok(Report::new(
        "loss_curve",
        format!("{} elevations, zenith loss {zenith:.2} dB", rows.len()),
        ReportData::Loss(rows),
    ))
}

fn curve(config: &ScenarioConfig, model: &Model, theta_min_deg: f64) -> Result<Curve> {
    let curve = model.skl_vs_offset_spaced(theta_min_deg, config.offset_step_m, config.time_step_s)?;
    debug!(
        "curve at {theta_min_deg} deg: {} offsets up to {:.0} m",
        curve.points.len(),
        curve.d_plus_m()
    );
    Ok(curve)
}

fn skl_curves(config: &ScenarioConfig, model: &Model) -> Result<Vec<Report>> {
    let mut floors = vec![0.0];
    if config.theta_min_deg != 0.0 {
        floors.push(config.theta_min_deg);
    }
    let curves = floors
        .iter()
        .map(|&f| curve(config, model, f))
        .collect::<Result<Vec<_>>>()?;
    let reference = skl_integral(curves.last().expect("at least one floor"));

    let rows: Vec<CurveRow> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(|p| CurveRow {
                theta_min_deg: c.theta_min_deg,
                d_min_m: sig9(p.d_min_m),
                skl_bits: sig9(p.skl_bits),
            })
        })
        .collect();
    let summary: Vec<CurveSummaryRow> = curves
        .iter()
        .map(|c| {
            let area = skl_integral(c);
            CurveSummaryRow {
                theta_min_deg: c.theta_min_deg,
                d_plus_m: sig9(c.d_plus_m()),
                skl_integral_bit_m: sig9(area),
                area_ratio: sig9(area / reference),
            }
        })
        .collect();
    let line = summary
        .iter()
        .map(|s| {
            format!(
                "{}deg d+ {:.0} km area {:.4e} ratio {:.4}",
                s.theta_min_deg,
                s.d_plus_m / 1e3,
                s.skl_integral_bit_m,
                s.area_ratio
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(vec![
        Report::new(
            "skl_curve",
            format!("{} points over {} curves", rows.len(), curves.len()),
            ReportData::Curve(rows),
        ),
        Report::new("skl_summary", line, ReportData::CurveSummary(summary)),
    ])
}

fn annual_rows(config: &ScenarioConfig, model: &Model) -> Result<Vec<AnnualRow>> {
    let area = skl_integral(&curve(config, model, config.theta_min_deg)?);
    config
        .sites
        .iter()
        .map(|site| {
            let report = annual_capacity(site.latitude_deg, area, &model.orbit)?;
            Ok(AnnualRow {
                site_id: site.id.clone(),
                latitude_deg: site.latitude_deg,
                l_lat_m: sig9(report.l_lat_m),
                n_year: sig9(report.n_year),
                skl_integral_bit_m: sig9(area),
                skl_year_bits: sig9(report.skl_year_bits),
                aes256_keys: sig9(aes256_keys(report.skl_year_bits)),
            })
        })
        .collect()
}

fn mean_annual_bits(rows: &[AnnualRow]) -> Result<f64> {
    if rows.is_empty() {
        return Err(CliError::config("sites", "at least one site is required"));
    }
    Ok(sig9(rows.iter().map(|r| r.skl_year_bits).sum::<f64>() / rows.len() as f64))
}

fn annual(config: &ScenarioConfig, model: &Model) -> Result<Report> {
    let rows = annual_rows(config, model)?;
    let mean = mean_annual_bits(&rows)?;
    Ok(Report::new(
        "annual",
        format!("{} sites, mean {mean:.4e} bits/year", rows.len()),
        ReportData::Annual(rows),
    ))
}

fn weather_stats(config: &ScenarioConfig, data: &WeatherData) -> Result<Vec<Report>> {
    let all = data.all();

    let mut boxes = Vec::new();
    for s in &all {
        boxes.extend(monthly_box_stats(s)?.into_iter().map(|m| BoxRow {
            site_id: m.site_id,
            month: m.month,
            count: m.count,
            min: sig9(m.min),
            q1: sig9(m.q1),
            median: sig9(m.median),
            q3: sig9(m.q3),
            max: sig9(m.max),
        }));
    }

    let mut hourly = Vec::new();
    let months = std::iter::once(None).chain((1..=12).map(Some));
    for month in months {
        let mut push = |series: &str, profile: [f64; 24]| {
            hourly.extend(profile.iter().zip(0..).map(|(&v, hour)| HourlyRow {
                series: series.to_owned(),
                month,
                hour,
                mean_cloud_pct: sig9(v),
            }))
        };
        for s in &all {
            if let Some(p) = skip_empty(hourly_mean_profile(s, month))? {
                push(s.id(), p);
            }
        }
        if let Some(p) = skip_empty(cross_site_min_profile(&all, month))? {
            push("min", p);
        }
    }

    let mut correlations = Vec::new();
    for (mode, name) in [
        (CorrelationMode::Raw, "raw"),
        (CorrelationMode::HourlyProfile, "hourly-profile"),
    ] {
        let m = correlation_matrix(&all, mode, None)?;
        for (i, a) in m.site_ids.iter().enumerate() {
            for (j, b) in m.site_ids.iter().enumerate() {
                correlations.push(CorrelationRow {
                    mode: name.to_owned(),
                    site_a: a.clone(),
                    site_b: b.clone(),
                    r: sig9(m.values[i][j]),
                });
            }
        }
    }

    let mut running = Vec::new();
    let window = config.running_average_days;
    for &hour in &config.overpass_hours {
        let mut push = |label: String, values: Vec<(chrono::NaiveDate, f64)>| {
            running.extend(values.into_iter().map(|(date, v)| RunningAverageRow {
                overpass_hour: hour,
                series: label.clone(),
                date,
                mean_cloud_pct: sig9(v),
            }))
        };
        for s in &all {
            push(s.id().to_owned(), running_min_average(&[*s], hour, window)?);
        }
        if all.len() > 1 {
            push(data.site_ids().join("+"), running_min_average(&all, hour, window)?);
        }
    }

    let quality: Vec<QualityRow> = data
        .quality
        .sites
        .iter()
        .map(|q| QualityRow {
            site_id: q.site_id.clone(),
            records: q.records,
            first: q.first,
            last: q.last,
            coverage_days: q.coverage_days,
            missing_hours: q.missing_hours,
            gaps: q.gaps.len(),
            blank_rows: q.blank_rows.len(),
        })
        .collect();
    let gaps: Vec<GapRow> = data
        .quality
        .sites
        .iter()
        .flat_map(|q| {
            q.gaps.iter().map(|g| GapRow {
                site_id: q.site_id.clone(),
                after: g.after,
                before: g.before,
                missing_hours: g.missing_hours,
            })
        })
        .collect();

    let missing: u64 = quality.iter().map(|q| q.missing_hours).sum();
    let blanks: usize = quality.iter().map(|q| q.blank_rows).sum();
    Ok(vec![
        Report::new(
            "weather_box",
            format!("{} site-months", boxes.len()),
            ReportData::Box(boxes),
        ),
        Report::new(
            "weather_hourly",
            format!("{} profile rows", hourly.len()),
            ReportData::Hourly(hourly),
        ),
        Report::new(
            "weather_correlation",
            format!("{} site pairs x 2 modes", correlations.len() / 2),
            ReportData::Correlation(correlations),
        ),
        Report::new(
            "weather_running_average",
            format!("{} rows, {window}-day window", running.len()),
            ReportData::RunningAverage(running),
        ),
        Report::new(
            "weather_quality",
            format!(
                "{} sites, {missing} missing hours, {blanks} blank rows, {} ignored rows",
                quality.len(),
                data.quality.ignored_rows
            ),
            ReportData::Quality(quality),
        ),
        Report::new(
            "weather_gaps",
            format!("{} gaps", gaps.len()),
            ReportData::Gap(gaps),
        ),
    ])
}

/// Treats "no data in this month" as absent rather than fatal.
fn skip_empty<T>(r: satqkd_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::EmptySelection { what }) => {
            debug!("skipping profile: no data for {what}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn diversity(config: &ScenarioConfig, model: &Model, data: &WeatherData) -> Result<Vec<Report>> {
    let combos = enumerate_combinations(&data.site_ids())?;
    let reports = diversity_reports(&combos, &config.overpass_hours, data)?;
    let clear_sky = match config.clear_sky_annual_bits {
        Some(bits) => bits,
        None => mean_annual_bits(&annual_rows(config, model)?)?,
    };

    let counts: Vec<SelectionCountRow> = reports
        .iter()
        .flat_map(|r| {
            r.counts.iter().map(|c| SelectionCountRow {
                overpass_hour: r.overpass_hour,
                combination: r.combination.label(),
                site_id: c.site_id.clone(),
                count: c.count,
            })
        })
        .collect();
    let combinations: Vec<CombinationRow> = reports
        .iter()
        .map(|r| CombinationRow {
            overpass_hour: r.overpass_hour,
            combination: r.combination.label(),
            size: r.combination.len(),
            total_days: r.total_days,
            skipped_days: r.skipped_days.len(),
            mean_min_cloud_pct: sig9(r.mean_min_cloud_pct),
            availability: sig9(r.availability),
        })
        .collect();
    let weighted: Vec<WeightedRow> = reports
        .iter()
        .map(|r| {
            let w = weighted_annual_capacity(r, clear_sky);
            WeightedRow {
                overpass_hour: w.overpass_hour,
                combination: w.combination.label(),
                clear_sky_annual_bits: sig9(w.clear_sky_annual_bits),
                availability: sig9(w.availability),
                weighted_annual_bits: sig9(w.weighted_annual_bits),
            }
        })
        .collect();

    let best = best_by_size(&reports, &config.overpass_hours);
    Ok(vec![
        Report::new(
            "diversity_counts",
            format!("{} selection tallies", counts.len()),
            ReportData::SelectionCount(counts),
        ),
        Report::new(
            "diversity_combinations",
            format!("{} combinations; best: {best}", combinations.len()),
            ReportData::Combination(combinations),
        ),
        Report::new(
            "diversity_weighted",
            format!("{} rows, clear sky {clear_sky:.4e} bits/year", weighted.len()),
            ReportData::Weighted(weighted),
        ),
    ])
}

/// Lowest mean minimum cloud cover for each combination size and hour.
fn best_by_size(reports: &[CombinationReport], hours: &[u32]) -> String {
    let max_size = reports.iter().map(|r| r.combination.len()).max().unwrap_or(0);
    let mut parts = Vec::new();
    for &hour in hours {
        for size in 1..=max_size {
            let best = reports
                .iter()
                .filter(|r| r.overpass_hour == hour && r.combination.len() == size)
                .min_by(|a, b| a.mean_min_cloud_pct.total_cmp(&b.mean_min_cloud_pct));
            if let Some(r) = best {
                parts.push(format!("{hour:02}h {} {:.1}%", r.combination, r.mean_min_cloud_pct));
            }
        }
    }
    parts.join(", ")
}
