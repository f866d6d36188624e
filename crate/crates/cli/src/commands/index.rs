use super::{create_output, load_calendar};
use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::sentindex::{
    bucket_series, read_events_csv, write_series_csv, Constituency, ExclusionReport,
};
use serde::Serialize;
use std::fs::File;

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub events: usize,
    pub market_days: usize,
    pub after_market_days: usize,
    pub exclusions: ExclusionReport,
}

/// Bucket events into daily market / after-market scores and write the
/// series file.
pub fn run_index(settings: &Settings) -> Result<IndexReport> {
    let manifest = Manifest::for_run(settings);
    let events_path = settings.require(&settings.events, "events")?;
    let events = read_events_csv(
        File::open(&events_path).with_context(|| format!("cannot open events {}", events_path.display()))?,
        settings.tz()?,
    )?;
    let calendar = load_calendar(settings)?;
    let constituency = match &settings.constituency {
        Some(path) => Some(
            Constituency::from_csv_reader(
                File::open(path).with_context(|| format!("cannot open constituency {}", path.display()))?,
            )
            .with_context(|| format!("invalid constituency {}", path.display()))?,
        ),
        None => None,
    };

    let (series, exclusions) = bucket_series(&events, &calendar, constituency.as_ref(), settings.policy)?;
    let (_, file) = create_output(settings, &manifest, "series.csv")?;
    write_series_csv(file, &series, settings.ma_window)?;

    let report = IndexReport {
        events: events.len(),
        market_days: series.market.points.len(),
        after_market_days: series.after_market.points.len(),
        exclusions,
    };
    println!(
        "index: {} events -> {} market days, {} after-market days",
        report.events, report.market_days, report.after_market_days
    );
    println!(
        "index: excluded {} out-of-constituency, {} after calendar end; {} bucketed",
        exclusions.out_of_constituency, exclusions.after_calendar_end, exclusions.bucketed
    );
    Ok(report)
}
