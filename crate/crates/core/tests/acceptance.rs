//! Acceptance suite. Each criterion prints one PASS/FAIL line to stderr
//! (written directly, so it shows even when test output is captured).

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use satqkd_core::capacity::{
    aes256_keys, annual_capacity, rescale_plob_capacity, skl_integral, LinkModel, ProtocolScaling,
};
use satqkd_core::channel::{total_loss_db, LinkBudgetParams};
use satqkd_core::diversity::{
    availability_from_mean_min, combination_report, enumerate_combinations, SiteCombination,
};
use satqkd_core::geometry::{max_offset_for_elevation, pass_profile, OrbitConfig, PassGeometry};
use satqkd_core::weather::{
    correlation_matrix, cross_site_min_profile, hourly_mean_profile, load_weather_csv,
    monthly_box_stats, running_min_average, CorrelationMode, SiteInfo,
};
use satqkd_core::{Curve, Model};

const TIME_STEP_S: f64 = 1.0;
const OFFSET_STEP_M: f64 = 1_000.0;

fn verdict(id: u8, title: &str, pass: bool, detail: impl AsRef<str>) {
    let line = format!(
        "[{}] AC{id:02} {title}: {}\n",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "AC{id:02} {title}: {}", detail.as_ref());
}

fn skip(id: u8, title: &str, why: &str) {
    let line = format!("[SKIP] AC{id:02} {title}: {why}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

struct Curves {
    floor_10: Curve,
    floor_0: Curve,
    elapsed: Duration,
}

fn curves() -> &'static Curves {
    static CURVES: OnceLock<Curves> = OnceLock::new();
    CURVES.get_or_init(|| {
        let model = Model::default();
        let start = Instant::now();
        let floor_10 = model
            .skl_vs_offset_spaced(10.0, OFFSET_STEP_M, TIME_STEP_S)
            .unwrap();
        let elapsed = start.elapsed();
        let floor_0 = model
            .skl_vs_offset_spaced(0.0, OFFSET_STEP_M, TIME_STEP_S)
            .unwrap();
        Curves {
            floor_10,
            floor_0,
            elapsed,
        }
    })
}

#[test]
fn ac01_zenith_link_budget() {
    let orbit = OrbitConfig::default();
    let clear = total_loss_db(90.0_f64, &LinkBudgetParams::default(), &orbit).unwrap();
    let hazy_params = LinkBudgetParams {
        zenith_transmittance: 0.7,
        ..Default::default()
    };
    let hazy = total_loss_db(90.0_f64, &hazy_params, &orbit).unwrap();
    verdict(
        1,
        "zenith link budget",
        (clear.total_db - 45.0).abs() <= 0.2 && (hazy.total_db - 46.0).abs() <= 0.3,
        format!(
            "tau 0.9: {:.3} dB (45 +/- 0.2); tau 0.7: {:.3} dB (46 +/- 0.3)",
            clear.total_db, hazy.total_db
        ),
    );
}

#[test]
fn ac02_contact_windows() {
    let orbit = OrbitConfig::default();
    let start = Instant::now();
    let window = |max: f64| {
        let geom = PassGeometry::new(max, 10.0, &orbit).unwrap();
        pass_profile(&geom, &orbit, TIME_STEP_S).unwrap().half_window_s()
    };
    let w = [window(90.0), window(60.0), window(30.0)];
    let elapsed = start.elapsed();
    let ok = (w[0] - 221.0).abs() <= 2.0
        && (w[1] - 218.0).abs() <= 2.0
        && (w[2] - 198.0).abs() <= 3.0
        && elapsed < Duration::from_secs(1);
    verdict(
        2,
        "contact windows",
        ok,
        format!(
            "+/-{:.2} s / +/-{:.2} s / +/-{:.2} s (221+/-2, 218+/-2, 198+/-3) in {elapsed:?}",
            w[0], w[1], w[2]
        ),
    );
}

#[test]
fn ac03_max_viable_offset() {
    let d = max_offset_for_elevation(10.0, &OrbitConfig::default()).unwrap();
    verdict(
        3,
        "max viable offset",
        (1_480e3..=1_580e3).contains(&d),
        format!("d+ = {:.1} km in [1480, 1580] km", d / 1e3),
    );
}

#[test]
fn ac04_capacity_integral() {
    let c = curves();
    let area = skl_integral(&c.floor_10);
    verdict(
        4,
        "capacity integral",
        rel(area, 4.96e12) <= 0.02 && c.elapsed < Duration::from_secs(10),
        format!(
            "SKL_int = {area:.4e} bit m (4.96e12 +/- 2%) over {} offsets in {:?}",
            c.floor_10.points.len(),
            c.elapsed
        ),
    );
}

#[test]
fn ac05_elevation_floor_ratio() {
    let c = curves();
    let ratio = skl_integral(&c.floor_0) / skl_integral(&c.floor_10);
    verdict(
        5,
        "elevation-floor ratio",
        (ratio - 1.12).abs() <= 0.015,
        format!("area(0 deg)/area(10 deg) = {ratio:.4} (1.12 +/- 0.015)"),
    );
}

#[test]
fn ac06_annual_clear_sky_capacity() {
    let orbit = OrbitConfig::default();
    let area = skl_integral(&curves().floor_10);
    let table = [
        ("Dublin", 53.35, 1.15e9),
        ("Galway", 53.54, 1.16e9),
        ("Cork", 51.85, 1.11e9),
        ("Waterford", 52.25, 1.12e9),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    let mut sum = 0.0;
    for (site, lat, expected) in table {
        let bits = annual_capacity(lat, area, &orbit).unwrap().skl_year_bits;
        ok &= rel(bits, expected) <= 0.03;
        sum += bits;
        detail.push(format!("{site} {bits:.3e}"));
    }
    let mean = sum / 4.0;
    ok &= rel(mean, 1.13e9) <= 0.03;
    detail.push(format!("mean {mean:.3e} (each +/- 3%)"));
    verdict(6, "annual clear-sky capacity", ok, detail.join(", "));
}

#[test]
fn ac07_weighting_identity() {
    const CLEAR_SKY: f64 = 1.13e9;
    // (row, mean min cloud midnight, Case I, mean min cloud midday, Case II)
    // The Case II single-site row is the best single midday site (61.3%).
    let rows = [
        ("Dublin", 61.7, 0.43e9, 61.3, 0.44e9),
        ("Dublin+Cork", 51.1, 0.56e9, 59.6, 0.45e9),
        ("Dublin+Waterford", 52.8, 0.53e9, 53.5, 0.53e9),
        ("Dublin+Cork+Waterford", 46.1, 0.61e9, 49.9, 0.57e9),
        ("Dublin+Cork+Galway+Waterford", 44.4, 0.63e9, 48.1, 0.59e9),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, night, case_i, day, case_ii) in rows {
        let a = CLEAR_SKY * availability_from_mean_min(night);
        let b = CLEAR_SKY * availability_from_mean_min(day);
        ok &= (a - case_i).abs() <= 0.01e9 && (b - case_ii).abs() <= 0.01e9;
        detail.push(format!("{label} {:.3}/{:.3}", a / 1e9, b / 1e9));
    }
    // Dublin's own midday mean (67.9%) gives 0.363e9, not the tabulated 0.44e9.
    let dublin_midday = CLEAR_SKY * availability_from_mean_min(67.9);
    ok &= (dublin_midday - 0.363e9).abs() <= 0.001e9;
    verdict(
        7,
        "weighting identity",
        ok,
        format!("{} (1e9 bits, +/- 0.01)", detail.join(", ")),
    );
}

#[test]
fn ac08_diversity_oracle_equivalence() {
    let grid = common::random_grid(2018, 4, 100, 0, 0.0);
    let data = grid.to_weather();
    let combos = enumerate_combinations(&common::SITES).unwrap();
    let mut exact = combos.len() == 15;
    for (combo, members) in combos.iter().zip(common::subsets(4)) {
        let report = combination_report(combo, 0, &data).unwrap();
        let oracle = common::brute_force(&grid, &members);
        let counts: Vec<usize> = report.counts.iter().map(|c| c.count).collect();
        exact &= counts == oracle.counts
            && report.total_days == oracle.total_days
            && report.mean_min_cloud_pct == oracle.mean_min;
    }

    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (any::<u64>(), 1usize..=4, 1usize..40, prop_oneof![Just(0u32), Just(12u32)]);
    let trials = runner.run(&strategy, |(seed, n, days, hour)| {
        let grid = common::random_grid(seed, n, days, hour, 0.0);
        let data = grid.to_weather();
        let combos = enumerate_combinations(&grid.sites).unwrap();
        let reports: Vec<_> = combos
            .iter()
            .map(|c| combination_report(c, hour, &data).unwrap())
            .collect();
        for (c, r) in combos.iter().zip(&reports) {
            // conservation
            prop_assert_eq!(r.counts.iter().map(|s| s.count).sum::<usize>(), r.total_days);
            prop_assert_eq!(r.total_days, days);
            prop_assert!((r.availability + r.mean_min_cloud_pct / 100.0 - 1.0).abs() < 1e-15);
            // tie-break permutation only moves tallies
            let rev = SiteCombination::new(c.sites().iter().rev().cloned()).unwrap();
            let rr = combination_report(&rev, hour, &data).unwrap();
            prop_assert_eq!(rr.mean_min_cloud_pct, r.mean_min_cloud_pct);
            // superset dominance
            for (big, rb) in combos.iter().zip(&reports) {
                if c.sites().iter().all(|s| big.contains(s)) {
                    prop_assert!(rb.mean_min_cloud_pct <= r.mean_min_cloud_pct);
                    prop_assert!(rb.availability >= r.availability);
                }
            }
        }
        if let Some(single) = reports.first() {
            let site = &data.series[0];
            let mean = (0..days)
                .map(|d| site.value_at(grid.timestamp(d, hour)).unwrap())
                .sum::<f64>()
                / days as f64;
            prop_assert_eq!(single.mean_min_cloud_pct, mean);
        }
        Ok(())
    });
    verdict(
        8,
        "diversity oracle equivalence",
        exact && trials.is_ok(),
        format!(
            "15 reports on 4 sites x 100 days exact: {exact}; 1000 randomized trials: {}",
            trials.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())
        ),
    );
}

#[test]
fn ac09_weather_statistics_properties() {
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&(any::<u64>(), 2usize..60, 1usize..=30), |(seed, days, window)| {
        let data = common::random_hourly(seed, 4, days);
        let all = data.all();
        for s in &all {
            for m in monthly_box_stats(s).unwrap() {
                prop_assert!(m.min <= m.q1 && m.q1 <= m.median);
                prop_assert!(m.median <= m.q3 && m.q3 <= m.max);
            }
        }
        for mode in [CorrelationMode::Raw, CorrelationMode::HourlyProfile] {
            if let Ok(m) = correlation_matrix(&all, mode, None) {
                for i in 0..all.len() {
                    prop_assert_eq!(m.values[i][i], 1.0);
                    for j in 0..all.len() {
                        prop_assert_eq!(m.values[i][j], m.values[j][i]);
                        prop_assert!(m.values[i][j].abs() <= 1.0);
                    }
                }
            }
        }
        let min = cross_site_min_profile(&all, None).unwrap();
        for s in &all {
            let p = hourly_mean_profile(s, None).unwrap();
            prop_assert!(min.iter().zip(p.iter()).all(|(m, v)| m <= v));
        }
        let ra = running_min_average(&all, 0, window).unwrap();
        prop_assert_eq!(ra.len(), (days + 1).saturating_sub(window));
        Ok(())
    });
    verdict(
        9,
        "weather statistics properties",
        result.is_ok(),
        format!(
            "200 randomized fixtures: {}",
            result.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())
        ),
    );
}

#[test]
fn ac10_numerical_hygiene() {
    let model = LinkModel::<f64>::default();
    let mut worst_pass: f64 = 0.0;
    for max in [90.0, 60.0, 30.0, 15.0] {
        let geom = PassGeometry::new(max, 10.0, &model.orbit).unwrap();
        let coarse = model.pass_skl(&geom, 1.0).unwrap();
        let fine = model.pass_skl(&geom, 0.5).unwrap();
        worst_pass = worst_pass.max(rel(coarse, fine));
    }
    let coarse = skl_integral(&curves().floor_10);
    let fine = skl_integral(
        &model
            .skl_vs_offset_spaced(10.0, OFFSET_STEP_M / 2.0, TIME_STEP_S / 2.0)
            .unwrap(),
    );
    let integral_change = rel(coarse, fine);
    let mut worst_linear: f64 = 0.0;
    for i in 1..=1000 {
        let t = i as f64 * 1e-5;
        let k = ProtocolScaling::Plob.key_per_use(t).unwrap();
        worst_linear = worst_linear.max((k - 1.44 * t).abs() / k);
    }
    verdict(
        10,
        "numerical hygiene",
        worst_pass < 1e-3 && integral_change < 1e-3 && worst_linear < 0.01,
        format!(
            "pass_skl halving {:.2e}, skl_integral halving {:.2e} (< 1e-3); |K - 1.44T|/K max {:.2e} for T < 0.01",
            worst_pass, integral_change, worst_linear
        ),
    );
}

#[test]
fn ac11_dataset_dependent_targets() {
    const TITLE: &str = "dataset-dependent targets";
    let Ok(path) = std::env::var("SATQKD_WEATHER_CSV") else {
        skip(11, TITLE, "set SATQKD_WEATHER_CSV to a 2018-2022 hourly export to run");
        return;
    };
    let sites = [
        SiteInfo::new("Dublin", 53.35, -6.25),
        SiteInfo::new("Galway", 53.54, -8.98),
        SiteInfo::new("Cork", 51.85, -8.48),
        SiteInfo::new("Waterford", 52.25, -7.08),
    ];
    let data = load_weather_csv(&path, &sites).unwrap();
    let median = |site: &str, month: u32| {
        monthly_box_stats(data.get(site).unwrap())
            .unwrap()
            .into_iter()
            .find(|m| m.month == month)
            .unwrap()
            .median
    };
    let cork_march = median("Cork", 3);
    let galway_jan = median("Galway", 1);
    let mut ok = (cork_march - 54.13).abs() <= 0.05 && (galway_jan - 75.97).abs() <= 0.05;

    let means = [
        (0, "Dublin", 61.7),
        (0, "Dublin+Cork", 51.1),
        (0, "Dublin+Cork+Waterford", 46.1),
        (0, "Dublin+Galway+Cork+Waterford", 44.4),
        (12, "Waterford", 61.3),
        (12, "Dublin+Waterford", 53.5),
        (12, "Dublin+Cork+Waterford", 49.9),
        (12, "Dublin+Galway+Cork+Waterford", 48.1),
    ];
    let mut detail = vec![format!("medians Cork/Mar {cork_march:.2}, Galway/Jan {galway_jan:.2}")];
    for (hour, label, expected) in means {
        let r = combination_report(&SiteCombination::parse(label).unwrap(), hour, &data).unwrap();
        ok &= (r.mean_min_cloud_pct - expected).abs() <= 0.1;
        detail.push(format!("{label}@{hour:02} {:.1}", r.mean_min_cloud_pct));
    }
    for mode in [CorrelationMode::Raw, CorrelationMode::HourlyProfile] {
        let m = correlation_matrix(&data.all(), mode, None).unwrap();
        detail.push(format!(
            "{mode:?} r(Dublin,Waterford) {:.5} r(Cork,Waterford) {:.5}",
            m.get("Dublin", "Waterford").unwrap(),
            m.get("Cork", "Waterford").unwrap()
        ));
    }
    verdict(11, TITLE, ok, detail.join("; "));
}

#[test]
fn ac12_aes_key_count() {
    let bits = rescale_plob_capacity(0.53e9, ProtocolScaling::Bb84WcpDecoy);
    let keys = aes256_keys(bits);
    verdict(
        12,
        "AES-256 key count",
        (2.5e5..=2.7e5).contains(&keys),
        format!("{keys:.0} keys/year from 0.53e9 PLOB bits (2.5e5..2.7e5)"),
    );
}
