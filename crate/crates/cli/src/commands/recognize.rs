use super::{create_output, load_entity_db};
use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::corpus::{read_headlines_csv, recognize_record, write_instances_csv, write_mentions_csv};
use finsent::gazetteer::{AnnotatedInstance, EntityMention};
use serde::Serialize;
use std::fs::File;

#[derive(Clone, Debug, Serialize)]
pub struct RecognizeReport {
    pub headlines: usize,
    pub mentions: usize,
    pub instances: usize,
    pub headlines_without_mentions: usize,
    /// Gold labels whose symbol was not recognized in the headline.
    pub unmatched_label_symbols: usize,
}

/// Recognize entities in every headline and write the mentions and
/// per-entity instances files.
pub fn run_recognize(settings: &Settings) -> Result<RecognizeReport> {
    let manifest = Manifest::for_run(settings);
    let db = load_entity_db(&settings.require(&settings.entity_db, "entity-db")?)?;
    let headlines_path = settings.require(&settings.headlines, "headlines")?;
    let records = read_headlines_csv(
        File::open(&headlines_path)
            .with_context(|| format!("cannot open headlines {}", headlines_path.display()))?,
    )?;

    let mut all_mentions: Vec<(String, EntityMention)> = Vec::new();
    let mut all_instances: Vec<AnnotatedInstance> = Vec::new();
    let mut report = RecognizeReport {
        headlines: records.len(),
        mentions: 0,
        instances: 0,
        headlines_without_mentions: 0,
        unmatched_label_symbols: 0,
    };
    for record in &records {
        let (mentions, instances) = recognize_record(&db, record);
        if mentions.is_empty() {
            report.headlines_without_mentions += 1;
        }
        report.unmatched_label_symbols += record
            .labels
            .keys()
            .filter(|sym| !mentions.iter().any(|m| &m.symbol == *sym))
            .count();
        report.mentions += mentions.len();
        report.instances += instances.len();
        all_mentions.extend(mentions.into_iter().map(|m| (record.id.clone(), m)));
        all_instances.extend(instances);
    }

    let (_, file) = create_output(settings, &manifest, "mentions.csv")?;
    write_mentions_csv(file, &all_mentions)?;
    let (_, file) = create_output(settings, &manifest, "instances.csv")?;
    write_instances_csv(file, &all_instances)?;

    println!(
        "recognize: {} headlines -> {} mentions, {} instances",
        report.headlines, report.mentions, report.instances
    );
    println!(
        "recognize: {} headlines without mentions, {} gold labels without a recognized symbol",
        report.headlines_without_mentions, report.unmatched_label_symbols
    );
    Ok(report)
}
