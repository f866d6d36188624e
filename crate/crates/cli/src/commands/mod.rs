//! Pipeline command implementations shared by the binary and tests.

mod index;
mod recognize;
mod regress;
mod score;
mod train;
mod var;

pub use index::{run_index, IndexReport};
pub use recognize::{run_recognize, RecognizeReport};
pub use regress::{run_regress, MeasureFit, RegressReport, YearRow};
pub use score::{run_score, ScoreReport};
pub use train::{run_eval, run_train, TrainReport};
pub use var::{run_var, VarReport, VarRow};

use crate::config::Settings;
use crate::manifest::Manifest;
use anyhow::{Context, Result};
use finsent::calendar::TradingCalendar;
use finsent::gazetteer::EntityDatabase;
use finsent::lexicon::{merge_dictionaries, MergedLexicon};
use serde::Serialize;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

fn load_entity_db(path: &Path) -> Result<EntityDatabase> {
    let file = File::open(path).with_context(|| format!("cannot open entity db {}", path.display()))?;
    let db = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        EntityDatabase::from_csv_reader(file)
    } else {
        EntityDatabase::from_json_reader(file)
    };
    db.with_context(|| format!("invalid entity db {}", path.display()))
}

fn load_lexicon(path: &Path) -> Result<(MergedLexicon, usize)> {
    let file = File::open(path).with_context(|| format!("cannot open lexicon {}", path.display()))?;
    let entries = finsent::lexicon::load_tsv(file)
        .with_context(|| format!("invalid lexicon {}", path.display()))?;
    let (lexicon, warnings) = merge_dictionaries(&entries);
    for w in &warnings {
        eprintln!("warning: lexicon merge tie: {w}");
    }
    Ok((lexicon, warnings.len()))
}

fn load_calendar(settings: &Settings) -> Result<TradingCalendar> {
    let path = settings.require(&settings.calendar, "calendar")?;
    let file = File::open(&path).with_context(|| format!("cannot open calendar {}", path.display()))?;
    TradingCalendar::from_csv_reader(file, settings.session_hours()?, settings.tz()?)
        .with_context(|| format!("invalid calendar {}", path.display()))
}

/// Create `settings.out/name`, with the manifest comment line already
/// written for CSV outputs.
fn create_output(settings: &Settings, manifest: &Manifest, name: &str) -> Result<(PathBuf, File)> {
    std::fs::create_dir_all(&settings.out)
        .with_context(|| format!("cannot create output dir {}", settings.out.display()))?;
    let path = settings.out.join(name);
    let mut file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    if name.ends_with(".csv") {
        file.write_all(manifest.csv_line().as_bytes())?;
    }
    Ok((path, file))
}

/// Write a JSON report `{ "manifest": ..., "report": ... }`.
fn write_json_report<T: Serialize>(
    settings: &Settings,
    manifest: &Manifest,
    name: &str,
    report: &T,
) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        manifest: &'a Manifest,
        report: &'a T,
    }
    let (path, mut file) = create_output(settings, manifest, name)?;
    let text = serde_json::to_string_pretty(&Envelope { manifest, report })?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(path)
}
