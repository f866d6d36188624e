use super::{load_calendar, write_json_report};
use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::econometrics::{
    after_market_returns, align_series, hypothesis_test, read_prices_csv, split_by_year, EconError,
};
use finsent::sentindex::read_series_csv;
use serde::Serialize;
use std::fs::File;

/// One measure's fit within one year's row.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureFit {
    pub beta: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub stars: String,
    pub r_squared: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct YearRow {
    pub year: i32,
    pub n_observations: usize,
    /// `None` when the year has too few aligned days for that measure.
    pub s1: Option<MeasureFit>,
    pub s2: Option<MeasureFit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegressReport {
    pub duration: String,
    pub returns: String,
    pub years: Vec<YearRow>,
    pub pooled: YearRow,
}

fn fit_measure(
    returns: &[(chrono::NaiveDate, f64)],
    sentiment: &[(chrono::NaiveDate, f64)],
) -> Result<Option<MeasureFit>> {
    match hypothesis_test(returns, sentiment) {
        Ok(fit) => Ok(Some(MeasureFit {
            beta: fit.beta,
            std_error: fit.beta_std_error,
            p_value: fit.p_value,
            stars: fit.stars.to_string(),
            r_squared: fit.r_squared,
        })),
        Err(EconError::TooFewAlignedDays { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Regress after-market returns on the daily sentiment series, per year
/// and pooled, for both measures.
pub fn run_regress(settings: &Settings) -> Result<RegressReport> {
    let manifest = Manifest::for_run(settings);
    let series_path = settings.require(&settings.series, "series")?;
    let series = read_series_csv(
        File::open(&series_path).with_context(|| format!("cannot open series {}", series_path.display()))?,
    )?;
    let prices_path = settings.require(&settings.prices, "prices")?;
    let bars = read_prices_csv(
        File::open(&prices_path).with_context(|| format!("cannot open prices {}", prices_path.display()))?,
    )?;
    let calendar = load_calendar(settings)?;

    let returns = after_market_returns(&bars, &calendar, settings.returns)?;
    if !returns.gaps.is_empty() {
        eprintln!("warning: {} return gaps (missing next-day bars)", returns.gaps.len());
    }
    let phase = series.phase(settings.duration);
    let sent_s1 = phase.measure(false);
    let sent_s2 = phase.measure(true);

    // the pooled fit is the gate: if nothing aligns, surface the ranges
    let pooled_s2 = hypothesis_test(&returns.values, &sent_s2).map_err(|e| anyhow::anyhow!("{e}"))?;
    let pooled_s1 = fit_measure(&returns.values, &sent_s1)?;
    let pooled = YearRow {
        year: 0,
        n_observations: pooled_s2.n,
        s1: pooled_s1,
        s2: Some(MeasureFit {
            beta: pooled_s2.beta,
            std_error: pooled_s2.beta_std_error,
            p_value: pooled_s2.p_value,
            stars: pooled_s2.stars.to_string(),
            r_squared: pooled_s2.r_squared,
        }),
    };

    let mut years = Vec::new();
    let joined = align_series(&returns.values, &sent_s2);
    for (year, rows) in split_by_year(&joined) {
        use chrono::Datelike;
        let year_returns: Vec<(chrono::NaiveDate, f64)> = rows.iter().map(|&(d, r, _)| (d, r)).collect();
        let year_s1: Vec<(chrono::NaiveDate, f64)> = sent_s1
            .iter()
            .filter(|(d, _)| d.year() == year)
            .copied()
            .collect();
        let year_s2: Vec<(chrono::NaiveDate, f64)> = rows.iter().map(|&(d, _, s)| (d, s)).collect();
        years.push(YearRow {
            year,
            n_observations: rows.len(),
            s1: fit_measure(&year_returns, &year_s1)?,
            s2: fit_measure(&year_returns, &year_s2)?,
        });
    }

    let report = RegressReport {
        duration: settings.duration.to_string(),
        returns: settings.returns.to_string(),
        years,
        pooled,
    };
    write_json_report(settings, &manifest, "regress.json", &report)?;

    println!(
        "regress: {} returns vs {} sentiment ({} duration)",
        report.returns, settings.measure.as_str(), report.duration
    );
    println!("{:<6} {:>6} {:>12} {:<4} {:>10} {:>12} {:<4} {:>10}", "year", "n", "beta_s1", "", "r2_s1", "beta_s2", "", "r2_s2");
    let fmt_fit = |fit: &Option<MeasureFit>| -> (String, String, String) {
        match fit {
            Some(f) => (format!("{:.5}", f.beta), f.stars.clone(), format!("{:.4}", f.r_squared)),
            None => ("-".into(), "".into(), "-".into()),
        }
    };
    for row in report.years.iter().chain(std::iter::once(&report.pooled)) {
        let (b1, st1, r1) = fmt_fit(&row.s1);
        let (b2, st2, r2) = fmt_fit(&row.s2);
        let label = if row.year == 0 { "all".to_string() } else { row.year.to_string() };
        println!(
            "{label:<6} {:>6} {b1:>12} {st1:<4} {r1:>10} {b2:>12} {st2:<4} {r2:>10}",
            row.n_observations
        );
    }
    Ok(report)
}
