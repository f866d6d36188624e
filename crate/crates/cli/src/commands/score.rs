use super::{create_output, load_entity_db, load_lexicon};
use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::calendar::parse_timestamp;
use finsent::classifier::{predict, TrainedPackage};
use finsent::corpus::{read_headlines_csv, recognize_record};
use finsent::lexicon::annotate;
use finsent::sentindex::{write_events_csv, SentimentEvent};
use serde::Serialize;
use std::fs::File;

#[derive(Clone, Debug, Serialize)]
pub struct ScoreReport {
    pub headlines: usize,
    pub events: usize,
    pub headlines_without_mentions: usize,
}

/// Predict a sentiment for every recognized (headline, entity) instance
/// and write the timestamped events file.
pub fn run_score(settings: &Settings) -> Result<ScoreReport> {
    let manifest = Manifest::for_run(settings);
    let model_path = settings.require(&settings.model, "model")?;
    let package = TrainedPackage::read_json(
        File::open(&model_path).with_context(|| format!("cannot open model {}", model_path.display()))?,
    )
    .with_context(|| format!("invalid model file {}", model_path.display()))?;
    let db = load_entity_db(&settings.require(&settings.entity_db, "entity-db")?)?;
    let (lexicon, _) = load_lexicon(&settings.require(&settings.lexicon, "lexicon")?)?;
    let headlines_path = settings.require(&settings.headlines, "headlines")?;
    let records = read_headlines_csv(
        File::open(&headlines_path)
            .with_context(|| format!("cannot open headlines {}", headlines_path.display()))?,
    )?;
    let tz = settings.tz()?;

    let mut events: Vec<SentimentEvent> = Vec::new();
    let mut report = ScoreReport {
        headlines: records.len(),
        events: 0,
        headlines_without_mentions: 0,
    };
    for record in &records {
        let (mentions, instances) = recognize_record(&db, record);
        if mentions.is_empty() {
            report.headlines_without_mentions += 1;
            continue;
        }
        let raw_ts = record.timestamp.as_deref().ok_or_else(|| {
            anyhow::anyhow!("headline `{}` has no timestamp; scoring requires one", record.id)
        })?;
        let timestamp = parse_timestamp(raw_ts, tz)
            .with_context(|| format!("headline `{}`", record.id))?;
        for inst in &instances {
            let seq = annotate(&lexicon, inst);
            let vector = package.space.transform(&seq);
            let (label, _) = predict(&package.model, &vector);
            events.push(SentimentEvent {
                id: record.id.clone(),
                timestamp,
                symbol: inst.target_symbol.clone(),
                label,
            });
        }
        report.events += instances.len();
    }

    let (_, file) = create_output(settings, &manifest, "events.csv")?;
    write_events_csv(file, &events)?;

    println!(
        "score: {} headlines -> {} events ({} headlines without mentions)",
        report.headlines, report.events, report.headlines_without_mentions
    );
    Ok(report)
}
