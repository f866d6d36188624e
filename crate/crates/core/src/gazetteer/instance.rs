use super::EntityMention;
use crate::Sentiment;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Reserved token for the entity a training instance is about.
pub const TARGET_TOKEN: &str = "TARGET";
/// Reserved token for every other recognized entity in the same headline.
pub const OTHER_TOKEN: &str = "OTHER";

/// One per-entity view of a headline, normalized and tokenized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedInstance {
    pub headline_id: String,
    pub target_symbol: String,
    /// Whitespace tokens with entity mentions replaced by `TARGET`/`OTHER`,
    /// punctuation removed, and everything else lowercased.
    pub tokens: Vec<String>,
    pub gold_label: Option<Sentiment>,
}

/// Normalize a text fragment: strip punctuation and special characters
/// (keeping a decimal point between digits), lowercase, and split on
/// whitespace.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut cleaned = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else if c.is_whitespace() {
            cleaned.push(' ');
        } else if c == '.'
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
        {
            cleaned.push('.');
        }
        // every other punctuation or special character is dropped
    }
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Expand a recognized headline into one instance per distinct symbol.
///
/// In the instance for symbol `S`, every mention of `S` becomes a `TARGET`
/// token and every mention of any other symbol becomes `OTHER`; replacement
/// happens before normalization so the reserved tokens survive it. Instances
/// are ordered by each symbol's first mention offset. An empty mention list
/// yields an empty instance list.
pub fn expand_instances(
    headline_id: &str,
    headline: &str,
    mentions: &[EntityMention],
) -> Vec<AnnotatedInstance> {
    let mut sorted: Vec<&EntityMention> = mentions.iter().collect();
    sorted.sort_by_key(|m| m.span_start);

    let mut symbols_in_order: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for m in &sorted {
        if seen.insert(m.symbol.as_str()) {
            symbols_in_order.push(m.symbol.as_str());
        }
    }

    let chars: Vec<char> = headline.chars().collect();
    symbols_in_order
        .into_iter()
        .map(|target| {
            let mut tokens = Vec::new();
            let mut cursor = 0usize;
            for m in &sorted {
                let segment: String = chars[cursor..m.span_start].iter().collect();
                tokens.extend(normalize_tokens(&segment));
                tokens.push(if m.symbol == target { TARGET_TOKEN } else { OTHER_TOKEN }.to_string());
                cursor = m.span_end;
            }
            let tail: String = chars[cursor..].iter().collect();
            tokens.extend(normalize_tokens(&tail));
            AnnotatedInstance {
                headline_id: headline_id.to_string(),
                target_symbol: target.to_string(),
                tokens,
                gold_label: None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gazetteer::{EntityDatabase, EntityRecord};

    fn mention(symbol: &str, start: usize, end: usize, phrase: &str) -> EntityMention {
        EntityMention {
            symbol: symbol.to_string(),
            span_start: start,
            span_end: end,
            matched_phrase: phrase.to_string(),
        }
    }

    #[test]
    fn two_entity_headline_expands_to_target_other_and_other_target() {
        let headline = "Negative on Chambal, Advanta: Mitesh Thacker";
        let mentions = vec![
            mention("CHMB", 12, 19, "Chambal"),
            mention("ADVA", 21, 28, "Advanta"),
        ];
        let instances = expand_instances("h1", headline, &mentions);
        assert_eq!(instances.len(), 2);
        assert_eq!(instances[0].target_symbol, "CHMB");
        assert_eq!(
            instances[0].tokens,
            ["negative", "on", "TARGET", "OTHER", "mitesh", "thacker"]
        );
        assert_eq!(instances[1].target_symbol, "ADVA");
        assert_eq!(
            instances[1].tokens,
            ["negative", "on", "OTHER", "TARGET", "mitesh", "thacker"]
        );
    }

    #[test]
    fn single_mention_yields_one_instance_without_other() {
        let headline = "Hold Abbott India Ltd., target Rs 4480.0";
        let db = EntityDatabase::from_records([EntityRecord {
            symbol: "ABBT".into(),
            official_name: None,
            phrases: vec!["Abbott India Ltd.".into(), "Abbott India".into()],
        }])
        .unwrap();
        let mentions = db.recognize(headline);
        let instances = expand_instances("h2", headline, &mentions);
        assert_eq!(instances.len(), 1);
        let tokens = &instances[0].tokens;
        assert_eq!(tokens.iter().filter(|t| *t == TARGET_TOKEN).count(), 1);
        assert_eq!(tokens.iter().filter(|t| *t == OTHER_TOKEN).count(), 0);
        // decimal point survives, other punctuation does not
        assert!(tokens.contains(&"4480.0".to_string()));
    }

    #[test]
    fn same_symbol_twice_becomes_one_instance_with_both_positions_target() {
        // hand enumeration on a 6-token fixture:
        //   SBI gains while SBI raises funds
        //   0..3 TARGET / 16..19 TARGET
        let headline = "SBI gains while SBI raises funds";
        let mentions = vec![mention("SBIN", 0, 3, "SBI"), mention("SBIN", 16, 19, "SBI")];
        let instances = expand_instances("h3", headline, &mentions);
        assert_eq!(instances.len(), 1);
        assert_eq!(
            instances[0].tokens,
            ["TARGET", "gains", "while", "TARGET", "raises", "funds"]
        );
    }

    #[test]
    fn empty_mentions_yield_no_instances() {
        assert!(expand_instances("h4", "Markets end flat", &[]).is_empty());
    }

    #[test]
    fn normalization_strips_punctuation_keeps_decimals_lowercases() {
        assert_eq!(
            normalize_tokens("Abbott India Q3 net up 26 pc at Rs 85.56 crore"),
            ["abbott", "india", "q3", "net", "up", "26", "pc", "at", "rs", "85.56", "crore"]
        );
        assert_eq!(normalize_tokens("up 71% to Rs 51 crore"), ["up", "71", "to", "rs", "51", "crore"]);
        assert_eq!(normalize_tokens("M&A street"), ["ma", "street"]);
        assert_eq!(normalize_tokens("rally ends."), ["rally", "ends"]);
        assert_eq!(normalize_tokens("1,200 pts"), ["1200", "pts"]);
        assert_eq!(normalize_tokens("... ::"), Vec::<String>::new());
    }

    #[test]
    fn instances_follow_first_mention_offset_order() {
        let headline = "Hindalco, Tata Steel rally; Hindalco leads";
        let mentions = vec![
            mention("HALC", 0, 8, "Hindalco"),
            mention("TISC", 10, 20, "Tata Steel"),
            mention("HALC", 28, 36, "Hindalco"),
        ];
        let instances = expand_instances("h5", headline, &mentions);
        assert_eq!(instances.len(), 2);
        assert_eq!(instances[0].target_symbol, "HALC");
        assert_eq!(instances[1].target_symbol, "TISC");
        assert_eq!(
            instances[0].tokens,
            ["TARGET", "OTHER", "rally", "TARGET", "leads"]
        );
        assert_eq!(
            instances[1].tokens,
            ["OTHER", "TARGET", "rally", "OTHER", "leads"]
        );
    }
}
