use super::{create_output, load_lexicon, write_json_report};
use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::classifier::{evaluate_protocol, train, EvalReport, ProtocolConfig, TrainedPackage};
use finsent::corpus::read_instances_csv;
use finsent::lexicon::{annotate, FeatureSequence, MergedLexicon};
use finsent::vectorizer::VectorSpace;
use serde::Serialize;
use std::fs::File;
use std::io::Write;

#[derive(Clone, Debug, Serialize)]
pub struct TrainReport {
    pub instances: usize,
    pub labeled: usize,
    pub dimension: usize,
}

fn labeled_sequences(settings: &Settings, lexicon: &MergedLexicon) -> Result<(usize, Vec<FeatureSequence>)> {
    let path = settings.require(&settings.instances, "instances")?;
    let instances = read_instances_csv(
        File::open(&path).with_context(|| format!("cannot open instances {}", path.display()))?,
    )?;
    let total = instances.len();
    let seqs: Vec<FeatureSequence> = instances
        .iter()
        .filter(|inst| inst.gold_label.is_some())
        .map(|inst| annotate(lexicon, inst))
        .collect();
    anyhow::ensure!(
        !seqs.is_empty(),
        "no labeled instances in {} (label column is empty)",
        path.display()
    );
    Ok((total, seqs))
}

/// Fit the vector space and model on the full labeled corpus and write
/// the model file.
pub fn run_train(settings: &Settings) -> Result<TrainReport> {
    let manifest = Manifest::for_run(settings);
    let (lexicon, _) = load_lexicon(&settings.require(&settings.lexicon, "lexicon")?)?;
    let (total, seqs) = labeled_sequences(settings, &lexicon)?;

    let space = VectorSpace::fit(settings.representation, &seqs)?;
    let data: Vec<_> = seqs
        .iter()
        .map(|s| (space.transform(s), s.label.expect("labeled")))
        .collect();
    let model = train(&space, &data, &settings.train_config())?;
    let dimension = model.dimension;
    let package = TrainedPackage::new(model, space)?;

    let model_path = settings
        .model
        .clone()
        .unwrap_or_else(|| settings.out.join("model.json"));
    if let Some(dir) = model_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let file = File::create(&model_path)
        .with_context(|| format!("cannot create model file {}", model_path.display()))?;
    package.write_json(file)?;

    let report = TrainReport {
        instances: total,
        labeled: data.len(),
        dimension,
    };
    println!(
        "train: {} labeled instances (of {}), {} {} columns -> {}",
        report.labeled,
        report.instances,
        report.dimension,
        settings.representation,
        model_path.display()
    );
    let _ = manifest;
    Ok(report)
}

/// Run the repeated-split protocol and write the per-split CSV and the
/// summary JSON.
pub fn run_eval(settings: &Settings) -> Result<EvalReport> {
    let manifest = Manifest::for_run(settings);
    let (lexicon, _) = load_lexicon(&settings.require(&settings.lexicon, "lexicon")?)?;
    let (_, seqs) = labeled_sequences(settings, &lexicon)?;

    let cfg = ProtocolConfig {
        repr: settings.representation,
        splits: settings.splits,
        train_frac: settings.train_frac,
        train: settings.train_config(),
    };
    let report = evaluate_protocol(&seqs, &cfg)?;

    let (_, file) = create_output(settings, &manifest, "eval_splits.csv")?;
    let mut wtr = csv::Writer::from_writer(file);
    wtr.write_record(["split", "class", "accuracy", "f1"])?;
    for row in &report.per_split {
        wtr.write_record([
            row.split.to_string(),
            row.class.to_string(),
            row.accuracy.to_string(),
            row.f1.to_string(),
        ])?;
    }
    wtr.flush()?;

    #[derive(Serialize)]
    struct Summary<'a> {
        representation: String,
        loss: String,
        splits: usize,
        train_frac: f64,
        per_class: &'a [finsent::classifier::ClassSummary],
        overall_accuracy: &'a finsent::classifier::MetricSummary,
    }
    write_json_report(
        settings,
        &manifest,
        "eval_summary.json",
        &Summary {
            representation: settings.representation.to_string(),
            loss: settings.loss.to_string(),
            splits: report.splits,
            train_frac: settings.train_frac,
            per_class: &report.per_class,
            overall_accuracy: &report.overall_accuracy,
        },
    )?;

    let mut line = format!(
        "eval: {}+{} over {} splits; median accuracy",
        settings.representation, settings.loss, report.splits
    );
    for class in &report.per_class {
        line.push_str(&format!(" {}={:.4}", class.class, class.accuracy.median));
    }
    println!("{line}");
    std::io::stdout().flush().ok();
    Ok(report)
}
