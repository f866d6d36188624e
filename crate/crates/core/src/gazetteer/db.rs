use super::GazetteerError;
use aho_corasick::AhoCorasick;
use serde::Deserialize;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::Read;

/// One entity and the surface phrases that refer to it in news media.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityRecord {
    /// Ticker-like key, unique within a database.
    pub symbol: String,
    pub official_name: Option<String>,
    /// All matchable phrases, including the official name when present.
    pub phrases: Vec<String>,
}

/// Immutable phrase database with a prebuilt multi-pattern matcher.
///
/// The database is safe to share across threads; `recognize` is a pure
/// function of the headline.
#[derive(Debug)]
pub struct EntityDatabase {
    records: BTreeMap<String, EntityRecord>,
    /// Phrases in matcher pattern order, parallel to `pattern_symbols`.
    patterns: Vec<String>,
    pattern_symbols: Vec<String>,
    /// None when the database is empty (the automaton needs >= 1 pattern).
    pub(super) automaton: Option<AhoCorasick>,
}

#[derive(Deserialize)]
struct JsonEntity {
    #[serde(default)]
    official_name: Option<String>,
    #[serde(default)]
    other_forms: Vec<String>,
}

impl EntityDatabase {
    /// Build a database from records, validating phrase invariants.
    ///
    /// Every phrase must be non-empty after trimming, every record must keep
    /// at least one phrase, and no two records may share a case-folded
    /// phrase. Phrase duplicates within one record are collapsed.
    pub fn from_records<I>(records: I) -> Result<Self, GazetteerError>
    where
        I: IntoIterator<Item = EntityRecord>,
    {
        let mut map: BTreeMap<String, EntityRecord> = BTreeMap::new();
        // case-folded phrase -> owning symbol
        let mut owners: BTreeMap<String, String> = BTreeMap::new();
        let mut patterns = Vec::new();
        let mut pattern_symbols = Vec::new();

        for rec in records {
            let symbol = rec.symbol.trim().to_string();
            if symbol.is_empty() {
                return Err(GazetteerError::BadRecord { symbol: rec.symbol });
            }
            let mut phrases = Vec::new();
            for phrase in &rec.phrases {
                let phrase = phrase.trim();
                if phrase.is_empty() {
                    return Err(GazetteerError::EmptyPhrase { symbol });
                }
                let folded = phrase.to_ascii_lowercase();
                match owners.entry(folded) {
                    Entry::Occupied(prev) => {
                        if prev.get() != &symbol {
                            return Err(GazetteerError::DuplicatePhrase {
                                phrase: phrase.to_string(),
                                first: prev.get().clone(),
                                second: symbol,
                            });
                        }
                        // same record listed the phrase twice; collapse
                    }
                    Entry::Vacant(slot) => {
                        slot.insert(symbol.clone());
                        phrases.push(phrase.to_string());
                        patterns.push(phrase.to_string());
                        pattern_symbols.push(symbol.clone());
                    }
                }
            }
            if phrases.is_empty() {
                return Err(GazetteerError::NoPhrases { symbol });
            }
            map.insert(
                symbol.clone(),
                EntityRecord {
                    symbol,
                    official_name: rec.official_name.map(|n| n.trim().to_string()),
                    phrases,
                },
            );
        }

        let automaton = if patterns.is_empty() {
            None
        } else {
            Some(
                AhoCorasick::builder()
                    .ascii_case_insensitive(true)
                    .build(&patterns)
                    .expect("phrase set fits automaton limits"),
            )
        };

        Ok(EntityDatabase {
            records: map,
            patterns,
            pattern_symbols,
            automaton,
        })
    }

    /// Load the JSON format: `{"SYM": {"official_name": ..., "other_forms": [...]}}`.
    ///
    /// The official name, when present, is itself a matchable phrase.
    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self, GazetteerError> {
        let parsed: BTreeMap<String, JsonEntity> = serde_json::from_reader(reader)?;
        let records = parsed.into_iter().map(|(symbol, ent)| {
            let mut phrases = Vec::new();
            if let Some(name) = &ent.official_name {
                phrases.push(name.clone());
            }
            phrases.extend(ent.other_forms);
            EntityRecord {
                symbol,
                official_name: ent.official_name,
                phrases,
            }
        });
        Self::from_records(records)
    }

    /// Load the flat two-column CSV format (`symbol,phrase` header required).
    ///
    /// Rows with the same symbol accumulate into one record.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, GazetteerError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(reader);
        {
            let headers = rdr.headers()?;
            if headers.len() < 2
                || headers.get(0).map(str::trim) != Some("symbol")
                || headers.get(1).map(str::trim) != Some("phrase")
            {
                return Err(GazetteerError::CsvHeader);
            }
        }
        let mut order: Vec<String> = Vec::new();
        let mut phrases: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for row in rdr.records() {
            let row = row?;
            let symbol = row.get(0).unwrap_or("").trim().to_string();
            let phrase = row.get(1).unwrap_or("").to_string();
            if !phrases.contains_key(&symbol) {
                order.push(symbol.clone());
            }
            phrases.entry(symbol).or_default().push(phrase);
        }
        let records = order.into_iter().map(|symbol| {
            let phrases = phrases.remove(&symbol).unwrap_or_default();
            EntityRecord {
                symbol,
                official_name: None,
                phrases,
            }
        });
        Self::from_records(records)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Total number of matchable phrases across all records.
    pub fn phrase_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn get(&self, symbol: &str) -> Option<&EntityRecord> {
        self.records.get(symbol)
    }

    pub fn records(&self) -> impl Iterator<Item = &EntityRecord> {
        self.records.values()
    }

    pub(super) fn pattern_symbol(&self, pattern: usize) -> &str {
        &self.pattern_symbols[pattern]
    }
}
