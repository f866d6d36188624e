//! Word-level sentiment lexicon: merging of constituent dictionaries and
//! token-stream annotation.
//!
//! Eight lexical feature classes come from the source dictionaries; `Number`,
//! `Target`, and `Other` are structural, and `Plain` marks out-of-lexicon
//! tokens. Annotation deliberately performs no lemmatization or stemming:
//! distinct inflections ("rally" vs "rallies") carry distinct annotations,
//! so a lexicon that only lists "rally" maps "rallies" to `Plain`.

use crate::gazetteer::{AnnotatedInstance, OTHER_TOKEN, TARGET_TOKEN};
use crate::Sentiment;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

/// Word-level feature vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureClass {
    Positive,
    Neutral,
    Negative,
    Up,
    Down,
    PositiveIfUp,
    NegativeIfUp,
    Negator,
    Number,
    Target,
    Other,
    Plain,
}

impl FeatureClass {
    pub const ALL: [FeatureClass; 12] = [
        FeatureClass::Positive,
        FeatureClass::Neutral,
        FeatureClass::Negative,
        FeatureClass::Up,
        FeatureClass::Down,
        FeatureClass::PositiveIfUp,
        FeatureClass::NegativeIfUp,
        FeatureClass::Negator,
        FeatureClass::Number,
        FeatureClass::Target,
        FeatureClass::Other,
        FeatureClass::Plain,
    ];

    /// True for the eight classes a lexicon entry may carry.
    pub fn is_lexical(self) -> bool {
        !matches!(
            self,
            FeatureClass::Number | FeatureClass::Target | FeatureClass::Other | FeatureClass::Plain
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureClass::Positive => "Positive",
            FeatureClass::Neutral => "Neutral",
            FeatureClass::Negative => "Negative",
            FeatureClass::Up => "Up",
            FeatureClass::Down => "Down",
            FeatureClass::PositiveIfUp => "PositiveIfUp",
            FeatureClass::NegativeIfUp => "NegativeIfUp",
            FeatureClass::Negator => "Negator",
            FeatureClass::Number => "Number",
            FeatureClass::Target => "Target",
            FeatureClass::Other => "Other",
            FeatureClass::Plain => "Plain",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap()
    }

    /// Merge precedence within one source rank: direction-dependency beats
    /// directionality beats negation beats prior sentiment. Lower is stronger.
    fn class_rank(self) -> u8 {
        match self {
            FeatureClass::PositiveIfUp | FeatureClass::NegativeIfUp => 0,
            FeatureClass::Up | FeatureClass::Down => 1,
            FeatureClass::Negator => 2,
            FeatureClass::Positive | FeatureClass::Negative | FeatureClass::Neutral => 3,
            // structural classes never enter a merge
            _ => u8::MAX,
        }
    }
}

impl fmt::Display for FeatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureClass {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureClass::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| LexiconError::UnknownFeature(s.trim().to_string()))
    }
}

/// Origin dictionary of a lexicon entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LexiconSource {
    Lm,
    Mpqa,
    Gi,
    Malo,
    Custom,
}

impl LexiconSource {
    pub const ALL: [LexiconSource; 5] = [
        LexiconSource::Lm,
        LexiconSource::Mpqa,
        LexiconSource::Gi,
        LexiconSource::Malo,
        LexiconSource::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LexiconSource::Lm => "LM",
            LexiconSource::Mpqa => "MPQA",
            LexiconSource::Gi => "GI",
            LexiconSource::Malo => "MALO",
            LexiconSource::Custom => "CUSTOM",
        }
    }

    /// Cross-dictionary precedence: CUSTOM beats LM beats the mutually
    /// unranked rest. Lower is stronger.
    fn rank(self) -> u8 {
        match self {
            LexiconSource::Custom => 0,
            LexiconSource::Lm => 1,
            LexiconSource::Mpqa | LexiconSource::Gi | LexiconSource::Malo => 2,
        }
    }
}

impl fmt::Display for LexiconSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexiconSource {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexiconSource::ALL
            .iter()
            .copied()
            .find(|src| src.as_str() == s.trim())
            .ok_or_else(|| LexiconError::UnknownSource(s.trim().to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("unknown feature class `{0}`")]
    UnknownFeature(String),
    #[error("unknown lexicon source `{0}`")]
    UnknownSource(String),
    #[error("lexicon entry for `{word}` uses structural feature class {class}")]
    StructuralClass { word: String, class: FeatureClass },
    #[error("lexicon entry has an empty word")]
    EmptyWord,
    #[error("lexicon TSV must have a `word\tfeature\tsource` header")]
    TsvHeader,
    #[error("lexicon TSV line {line}: {message}")]
    TsvLine { line: usize, message: String },
    #[error("lexicon TSV read error: {0}")]
    Io(#[from] std::io::Error),
}

/// One word → feature annotation from one source dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub feature: FeatureClass,
    pub source: LexiconSource,
}

impl LexiconEntry {
    /// Validates the class is lexical and case-folds the word.
    pub fn new(word: &str, feature: FeatureClass, source: LexiconSource) -> Result<Self, LexiconError> {
        if !feature.is_lexical() {
            return Err(LexiconError::StructuralClass {
                word: word.to_string(),
                class: feature,
            });
        }
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            return Err(LexiconError::EmptyWord);
        }
        Ok(LexiconEntry { word, feature, source })
    }
}

/// A tie between two entries that source and class precedence could not
/// resolve; the earlier entry in input order was kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeWarning {
    pub word: String,
    pub kept: (FeatureClass, LexiconSource),
    pub dropped: (FeatureClass, LexiconSource),
}

impl fmt::Display for MergeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "`{}`: kept {}/{} over {}/{} by input order",
            self.word, self.kept.0, self.kept.1, self.dropped.0, self.dropped.1
        )
    }
}

/// Immutable word → feature map with per-word provenance.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MergedLexicon {
    classes: HashMap<String, FeatureClass>,
    provenance: HashMap<String, LexiconSource>,
}

/// Per-class entry counts of a merged lexicon.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LexiconStats {
    pub counts: [usize; 12],
    pub total: usize,
}

impl LexiconStats {
    pub fn count(&self, class: FeatureClass) -> usize {
        self.counts[class.index()]
    }
}

impl MergedLexicon {
    pub fn class_of(&self, word: &str) -> Option<FeatureClass> {
        self.classes.get(word).copied()
    }

    pub fn source_of(&self, word: &str) -> Option<LexiconSource> {
        self.provenance.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Count of merged words per feature class, plus the total.
    pub fn stats(&self) -> LexiconStats {
        let mut stats = LexiconStats::default();
        for class in self.classes.values() {
            stats.counts[class.index()] += 1;
            stats.total += 1;
        }
        stats
    }
}

/// Merge dictionary entries into a single word → class map.
///
/// The winner per word is chosen by source precedence first
/// (CUSTOM > LM > {MPQA, GI, MALO}), then by class precedence within equal
/// source rank ({PositiveIfUp, NegativeIfUp} > {Up, Down} > Negator >
/// {Positive, Negative, Neutral}); any remaining tie keeps the earliest
/// entry in input order and records a [`MergeWarning`].
pub fn merge_dictionaries(entries: &[LexiconEntry]) -> (MergedLexicon, Vec<MergeWarning>) {
    let mut lex = MergedLexicon::default();
    let mut warnings = Vec::new();
    for entry in entries {
        match lex.classes.get(&entry.word) {
            None => {
                lex.classes.insert(entry.word.clone(), entry.feature);
                lex.provenance.insert(entry.word.clone(), entry.source);
            }
            Some(&held_class) => {
                let held_source = lex.provenance[&entry.word];
                let held = (held_source.rank(), held_class.class_rank());
                let new = (entry.source.rank(), entry.feature.class_rank());
                if new < held {
                    lex.classes.insert(entry.word.clone(), entry.feature);
                    lex.provenance.insert(entry.word.clone(), entry.source);
                } else if new == held {
                    warnings.push(MergeWarning {
                        word: entry.word.clone(),
                        kept: (held_class, held_source),
                        dropped: (entry.feature, entry.source),
                    });
                }
            }
        }
    }
    (lex, warnings)
}

/// Ordered feature literals for one instance, parallel to its tokens.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSequence {
    pub literals: Vec<FeatureClass>,
    pub surface: Vec<String>,
    pub label: Option<Sentiment>,
}

impl FeatureSequence {
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// True for integers, decimals, and digit-comma groupings ("26", "85.56",
/// "1,200", "1,200.50").
pub fn is_number_token(token: &str) -> bool {
    let (int_part, frac_part) = match token.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (token, None),
    };
    if let Some(frac) = frac_part {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    if int_part.is_empty() {
        return false;
    }
    let groups: Vec<&str> = int_part.split(',').collect();
    if groups.len() == 1 {
        return groups[0].bytes().all(|b| b.is_ascii_digit());
    }
    // comma-grouped: 1-3 leading digits, then groups of exactly 3
    if groups[0].is_empty() || groups[0].len() > 3 || !groups[0].bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    groups[1..]
        .iter()
        .all(|g| g.len() == 3 && g.bytes().all(|b| b.is_ascii_digit()))
}

/// Map tokens to feature literals: reserved markers to `Target`/`Other`,
/// numeric literals to `Number`, lexicon hits to their merged class, and
/// everything else to `Plain`. No stop-word removal, no lemmatization.
pub fn annotate_tokens(lex: &MergedLexicon, tokens: &[String], label: Option<Sentiment>) -> FeatureSequence {
    let literals = tokens
        .iter()
        .map(|tok| {
            if tok == TARGET_TOKEN {
                FeatureClass::Target
            } else if tok == OTHER_TOKEN {
                FeatureClass::Other
            } else if is_number_token(tok) {
                FeatureClass::Number
            } else {
                lex.class_of(tok).unwrap_or(FeatureClass::Plain)
            }
        })
        .collect();
    FeatureSequence {
        literals,
        surface: tokens.to_vec(),
        label,
    }
}

/// Annotate an expanded instance, carrying its gold label along.
pub fn annotate(lex: &MergedLexicon, instance: &AnnotatedInstance) -> FeatureSequence {
    annotate_tokens(lex, &instance.tokens, instance.gold_label)
}

/// Load lexicon entries from TSV with a `word<TAB>feature<TAB>source` header.
///
/// Unknown feature or source strings are rejected with the offending line
/// number.
pub fn load_tsv<R: Read>(reader: R) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut content = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut content)?;
    let mut lines = content.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() || line.starts_with('#') => continue,
            Some((_, line)) => break line,
            None => return Err(LexiconError::TsvHeader),
        }
    };
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "word" || cols[1] != "feature" || cols[2] != "source" {
        return Err(LexiconError::TsvHeader);
    }
    let mut entries = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(LexiconError::TsvLine {
                line: idx + 1,
                message: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let feature = fields[1].parse::<FeatureClass>().map_err(|e| LexiconError::TsvLine {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let source = fields[2].parse::<LexiconSource>().map_err(|e| LexiconError::TsvLine {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let entry = LexiconEntry::new(fields[0], feature, source).map_err(|e| LexiconError::TsvLine {
            line: idx + 1,
            message: e.to_string(),
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(word: &str, feature: FeatureClass, source: LexiconSource) -> LexiconEntry {
        LexiconEntry::new(word, feature, source).unwrap()
    }

    fn toy_lexicon(entries: &[(&str, FeatureClass)]) -> MergedLexicon {
        let entries: Vec<LexiconEntry> = entries
            .iter()
            .map(|(w, f)| entry(w, *f, LexiconSource::Custom))
            .collect();
        merge_dictionaries(&entries).0
    }

    #[test]
    fn direction_dependency_beats_prior_sentiment_at_equal_source_rank() {
        let entries = vec![
            entry("profit", FeatureClass::PositiveIfUp, LexiconSource::Malo),
            entry("profit", FeatureClass::Positive, LexiconSource::Gi),
        ];
        let (lex, warnings) = merge_dictionaries(&entries);
        assert_eq!(lex.class_of("profit"), Some(FeatureClass::PositiveIfUp));
        assert_eq!(lex.source_of("profit"), Some(LexiconSource::Malo));
        assert!(warnings.is_empty());
    }

    #[test]
    fn singleton_entry_passes_through() {
        let entries = vec![entry("loss", FeatureClass::NegativeIfUp, LexiconSource::Malo)];
        let (lex, _) = merge_dictionaries(&entries);
        assert_eq!(lex.class_of("loss"), Some(FeatureClass::NegativeIfUp));
    }

    #[test]
    fn custom_source_beats_lm() {
        let entries = vec![
            entry("rally", FeatureClass::Up, LexiconSource::Custom),
            entry("rally", FeatureClass::Positive, LexiconSource::Lm),
        ];
        let (lex, _) = merge_dictionaries(&entries);
        assert_eq!(lex.class_of("rally"), Some(FeatureClass::Up));
        assert_eq!(lex.source_of("rally"), Some(LexiconSource::Custom));
        // and the same outcome with the entries reversed
        let reversed: Vec<LexiconEntry> = vec![
            entry("rally", FeatureClass::Positive, LexiconSource::Lm),
            entry("rally", FeatureClass::Up, LexiconSource::Custom),
        ];
        let (lex, _) = merge_dictionaries(&reversed);
        assert_eq!(lex.class_of("rally"), Some(FeatureClass::Up));
    }

    #[test]
    fn source_precedence_is_checked_before_class_precedence() {
        // LM prior sentiment outranks MPQA directionality
        let entries = vec![
            entry("gain", FeatureClass::Up, LexiconSource::Mpqa),
            entry("gain", FeatureClass::Positive, LexiconSource::Lm),
        ];
        let (lex, _) = merge_dictionaries(&entries);
        assert_eq!(lex.class_of("gain"), Some(FeatureClass::Positive));
    }

    #[test]
    fn unresolvable_tie_keeps_first_entry_and_warns() {
        let entries = vec![
            entry("flat", FeatureClass::Neutral, LexiconSource::Mpqa),
            entry("flat", FeatureClass::Negative, LexiconSource::Gi),
        ];
        let (lex, warnings) = merge_dictionaries(&entries);
        assert_eq!(lex.class_of("flat"), Some(FeatureClass::Neutral));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].kept, (FeatureClass::Neutral, LexiconSource::Mpqa));
        assert_eq!(warnings[0].dropped, (FeatureClass::Negative, LexiconSource::Gi));
    }

    #[test]
    fn structural_class_entries_are_rejected() {
        assert!(matches!(
            LexiconEntry::new("26", FeatureClass::Number, LexiconSource::Gi),
            Err(LexiconError::StructuralClass { .. })
        ));
        assert!(matches!(
            LexiconEntry::new("x", FeatureClass::Plain, LexiconSource::Gi),
            Err(LexiconError::StructuralClass { .. })
        ));
    }

    #[test]
    fn annotate_maps_markers_numbers_hits_and_misses() {
        let lex = toy_lexicon(&[("stock", FeatureClass::Neutral), ("rallies", FeatureClass::Up)]);
        let tokens: Vec<String> = ["TARGET", "stock", "rallies"].iter().map(|s| s.to_string()).collect();
        let seq = annotate_tokens(&lex, &tokens, None);
        assert_eq!(
            seq.literals,
            [FeatureClass::Target, FeatureClass::Neutral, FeatureClass::Up]
        );

        let lex = toy_lexicon(&[("rally", FeatureClass::Up), ("ends", FeatureClass::Down)]);
        let tokens: Vec<String> = ["OTHER", "rally", "ends"].iter().map(|s| s.to_string()).collect();
        let seq = annotate_tokens(&lex, &tokens, None);
        assert_eq!(seq.literals, [FeatureClass::Other, FeatureClass::Up, FeatureClass::Down]);
    }

    #[test]
    fn annotate_six_token_fixture_by_hand() {
        // hand-applied mapping: TARGET->Target, q3->Plain, net->Plain,
        // up->Up, 26->Number, pc->Plain
        let lex = toy_lexicon(&[("up", FeatureClass::Up)]);
        let tokens: Vec<String> = ["TARGET", "q3", "net", "up", "26", "pc"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let seq = annotate_tokens(&lex, &tokens, None);
        assert_eq!(
            seq.literals,
            [
                FeatureClass::Target,
                FeatureClass::Plain,
                FeatureClass::Plain,
                FeatureClass::Up,
                FeatureClass::Number,
                FeatureClass::Plain,
            ]
        );
        assert_eq!(seq.len(), tokens.len());
    }

    #[test]
    fn no_lemmatization_rallies_misses_a_rally_only_lexicon() {
        let lex = toy_lexicon(&[("rally", FeatureClass::Up)]);
        let tokens = vec!["rallies".to_string()];
        let seq = annotate_tokens(&lex, &tokens, None);
        assert_eq!(seq.literals, [FeatureClass::Plain]);
    }

    #[test]
    fn number_detection() {
        for tok in ["26", "85.56", "4480.0", "1,200", "1,200.50", "0", "123,456,789"] {
            assert!(is_number_token(tok), "{tok} should be a number");
        }
        for tok in ["q3", "71%", "rs", "85.", ".56", "1,20", "12,3456", "", "26pc", "1.2.3"] {
            assert!(!is_number_token(tok), "{tok} should not be a number");
        }
    }

    #[test]
    fn stats_count_per_class() {
        let (empty, _) = merge_dictionaries(&[]);
        assert_eq!(empty.stats().total, 0);
        assert!(empty.stats().counts.iter().all(|&c| c == 0));

        let lex = toy_lexicon(&[
            ("good", FeatureClass::Positive),
            ("rally", FeatureClass::Up),
            ("not", FeatureClass::Negator),
        ]);
        let stats = lex.stats();
        assert_eq!(stats.total, 3);
        assert_eq!(stats.count(FeatureClass::Positive), 1);
        assert_eq!(stats.count(FeatureClass::Up), 1);
        assert_eq!(stats.count(FeatureClass::Negator), 1);
        assert_eq!(stats.count(FeatureClass::Down), 0);
    }

    #[test]
    fn tsv_round_trip_and_errors() {
        let tsv = "word\tfeature\tsource\nrally\tUp\tCUSTOM\nProfit\tPositiveIfUp\tMALO\n";
        let entries = load_tsv(tsv.as_bytes()).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[1].word, "profit"); // case-folded

        let bad = "word\tfeature\tsource\nrally\tUpward\tCUSTOM\n";
        match load_tsv(bad.as_bytes()) {
            Err(LexiconError::TsvLine { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("Upward"));
            }
            other => panic!("expected TsvLine error, got {other:?}"),
        }

        assert!(matches!(
            load_tsv("word,feature,source\n".as_bytes()),
            Err(LexiconError::TsvHeader)
        ));
    }

    #[test]
    fn merge_is_order_insensitive_for_distinct_ranks() {
        let entries = vec![
            entry("profit", FeatureClass::PositiveIfUp, LexiconSource::Malo),
            entry("profit", FeatureClass::Positive, LexiconSource::Gi),
            entry("profit", FeatureClass::Neutral, LexiconSource::Lm),
        ];
        // LM source rank beats MALO/GI regardless of order
        let mut permutations = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        for perm in permutations.drain(..) {
            let shuffled: Vec<LexiconEntry> = perm.iter().map(|&i| entries[i].clone()).collect();
            let (lex, _) = merge_dictionaries(&shuffled);
            assert_eq!(lex.class_of("profit"), Some(FeatureClass::Neutral), "perm failed");
        }
    }
}
