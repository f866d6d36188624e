//! Headline and instance file formats shared by the pipeline commands.
//!
//! Headlines CSV: `id,timestamp,headline,labels` where `timestamp` and
//! `labels` may be empty; `labels` packs gold annotations as
//! `SYM=positive;SYM2=neutral`. Instances CSV: `id,target,tokens,label`
//! with space-joined tokens.

use crate::gazetteer::{attach_labels, expand_instances, AnnotatedInstance, EntityDatabase, EntityMention};
use crate::Sentiment;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("headlines CSV must have an `id,timestamp,headline,labels` header")]
    HeadlinesHeader,
    #[error("instances CSV must have an `id,target,tokens,label` header")]
    InstancesHeader,
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// One raw headline with optional timestamp and gold labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadlineRecord {
    pub id: String,
    /// Unparsed timestamp text; interpretation is left to the caller.
    pub timestamp: Option<String>,
    pub text: String,
    /// Gold sentiment per entity symbol, possibly empty.
    pub labels: BTreeMap<String, Sentiment>,
}

fn parse_labels(cell: &str, row: usize) -> Result<BTreeMap<String, Sentiment>, CorpusError> {
    let mut labels = BTreeMap::new();
    for part in cell.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (symbol, label) = part.split_once('=').ok_or_else(|| CorpusError::BadRow {
            row,
            message: format!("label `{part}` is not SYMBOL=sentiment"),
        })?;
        let label = label.parse::<Sentiment>().map_err(|e| CorpusError::BadRow {
            row,
            message: e.to_string(),
        })?;
        labels.insert(symbol.trim().to_string(), label);
    }
    Ok(labels)
}

fn format_labels(labels: &BTreeMap<String, Sentiment>) -> String {
    labels
        .iter()
        .map(|(sym, label)| format!("{sym}={label}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Read the headlines CSV.
pub fn read_headlines_csv<R: Read>(reader: R) -> Result<Vec<HeadlineRecord>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["id", "timestamp", "headline", "labels"];
        for (i, name) in want.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(CorpusError::HeadlinesHeader);
            }
        }
    }
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 2;
        let timestamp = row.get(1).map(str::trim).filter(|t| !t.is_empty()).map(String::from);
        records.push(HeadlineRecord {
            id: row.get(0).unwrap_or("").trim().to_string(),
            timestamp,
            text: row.get(2).unwrap_or("").to_string(),
            labels: parse_labels(row.get(3).unwrap_or(""), row_no)?,
        });
    }
    Ok(records)
}

pub fn write_headlines_csv<W: Write>(writer: W, records: &[HeadlineRecord]) -> Result<(), CorpusError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "timestamp", "headline", "labels"])?;
    for r in records {
        wtr.write_record([
            r.id.as_str(),
            r.timestamp.as_deref().unwrap_or(""),
            r.text.as_str(),
            &format_labels(&r.labels),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Recognize one headline and expand it into labeled instances.
pub fn recognize_record(
    db: &EntityDatabase,
    record: &HeadlineRecord,
) -> (Vec<EntityMention>, Vec<AnnotatedInstance>) {
    let mentions = db.recognize(&record.text);
    let mut instances = expand_instances(&record.id, &record.text, &mentions);
    attach_labels(&mut instances, &record.labels);
    (mentions, instances)
}

/// Write instances as `id,target,tokens,label` (tokens space-joined).
pub fn write_instances_csv<W: Write>(writer: W, instances: &[AnnotatedInstance]) -> Result<(), CorpusError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "target", "tokens", "label"])?;
    for inst in instances {
        wtr.write_record([
            inst.headline_id.as_str(),
            inst.target_symbol.as_str(),
            &inst.tokens.join(" "),
            inst.gold_label.map(|l| l.as_str()).unwrap_or(""),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_instances_csv<R: Read>(reader: R) -> Result<Vec<AnnotatedInstance>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["id", "target", "tokens", "label"];
        for (i, name) in want.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(CorpusError::InstancesHeader);
            }
        }
    }
    let mut instances = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 2;
        let label_cell = row.get(3).unwrap_or("").trim();
        let gold_label = if label_cell.is_empty() {
            None
        } else {
            Some(label_cell.parse::<Sentiment>().map_err(|e| CorpusError::BadRow {
                row: row_no,
                message: e.to_string(),
            })?)
        };
        instances.push(AnnotatedInstance {
            headline_id: row.get(0).unwrap_or("").trim().to_string(),
            target_symbol: row.get(1).unwrap_or("").trim().to_string(),
            tokens: row
                .get(2)
                .unwrap_or("")
                .split_whitespace()
                .map(String::from)
                .collect(),
            gold_label,
        });
    }
    Ok(instances)
}

/// Write mentions as `id,symbol,start,end,phrase`.
pub fn write_mentions_csv<W: Write>(
    writer: W,
    mentions: &[(String, EntityMention)],
) -> Result<(), CorpusError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "symbol", "start", "end", "phrase"])?;
    for (id, m) in mentions {
        wtr.write_record([
            id.as_str(),
            m.symbol.as_str(),
            &m.span_start.to_string(),
            &m.span_end.to_string(),
            m.matched_phrase.as_str(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
