//! Entity recognition over raw headlines from a curated phrase database.
//!
//! Recognition happens *before* any text normalization: the database phrases
//! are matched against the raw headline, case-insensitively, at word
//! boundaries. Each recognized headline is then expanded into one instance
//! per distinct entity, with the entity in focus replaced by the reserved
//! `TARGET` token and every other recognized entity by `OTHER`, after which
//! punctuation is stripped and the text is whitespace-tokenized.

mod db;
mod instance;
mod matcher;

pub use db::{EntityDatabase, EntityRecord};
pub use instance::{expand_instances, normalize_tokens, AnnotatedInstance, OTHER_TOKEN, TARGET_TOKEN};

use crate::Sentiment;
use serde::{Deserialize, Serialize};

/// One recognized entity occurrence in a raw headline.
///
/// Offsets are character (not byte) positions; `span_start..span_end` is the
/// half-open span of the matched phrase in the original headline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub symbol: String,
    pub span_start: usize,
    pub span_end: usize,
    /// The headline substring that matched (original casing preserved).
    pub matched_phrase: String,
}

/// Errors from loading or validating an entity database.
#[derive(Debug, thiserror::Error)]
pub enum GazetteerError {
    #[error("entity database JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entity database CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("entity database CSV must have a `symbol,phrase` header")]
    CsvHeader,
    #[error("phrase `{phrase}` is listed under both `{first}` and `{second}`")]
    DuplicatePhrase {
        phrase: String,
        first: String,
        second: String,
    },
    #[error("record `{symbol}` contains an empty phrase")]
    EmptyPhrase { symbol: String },
    #[error("record `{symbol}` has no matchable phrases")]
    NoPhrases { symbol: String },
    #[error("record `{symbol}` has an empty symbol or official name")]
    BadRecord { symbol: String },
}

/// Attach gold labels from a symbol → sentiment map to expanded instances.
pub fn attach_labels(
    instances: &mut [AnnotatedInstance],
    labels: &std::collections::BTreeMap<String, Sentiment>,
) {
    for inst in instances {
        inst.gold_label = labels.get(&inst.target_symbol).copied();
    }
}
