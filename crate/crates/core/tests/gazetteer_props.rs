//! Property tests for entity recognition and instance expansion.

use finsent::gazetteer::{
    expand_instances, normalize_tokens, EntityDatabase, EntityMention, EntityRecord, OTHER_TOKEN,
    TARGET_TOKEN,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// O(n² · |phrases|) oracle: scan every character substring, keep
/// boundary-aligned case-folded phrase matches, then apply the documented
/// longest-then-leftmost greedy selection.
fn brute_force_recognize(phrases: &[(String, String)], headline: &str) -> Vec<(usize, usize, String)> {
    let chars: Vec<char> = headline.chars().collect();
    let mut candidates: Vec<(usize, usize, String)> = Vec::new();
    for start in 0..chars.len() {
        for end in (start + 1)..=chars.len() {
            let boundary_before = start == 0 || !chars[start - 1].is_alphanumeric();
            let boundary_after = end == chars.len() || !chars[end].is_alphanumeric();
            if !boundary_before || !boundary_after {
                continue;
            }
            let sub: String = chars[start..end].iter().collect::<String>().to_ascii_lowercase();
            for (symbol, phrase) in phrases {
                if sub == phrase.to_ascii_lowercase() {
                    candidates.push((start, end, symbol.clone()));
                }
            }
        }
    }
    candidates.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    let mut taken: Vec<(usize, usize, String)> = Vec::new();
    for cand in candidates {
        if taken.iter().all(|t| cand.1 <= t.0 || cand.0 >= t.1) {
            taken.push(cand);
        }
    }
    taken.sort_by_key(|t| t.0);
    taken
}

/// A pool of words, a database built over phrases drawn from the pool,
/// and a headline mixing pool words with filler.
fn scenario() -> impl Strategy<Value = (Vec<(String, String)>, String)> {
    let word = prop::sample::select(vec![
        "alpha", "beta", "gamma", "delta", "steel", "bank", "cement", "power", "auto", "idea",
        "q3", "rs", "85.56",
    ]);
    let phrase = prop::collection::vec(word.clone(), 1..=3).prop_map(|ws| ws.join(" "));
    let phrases = prop::collection::vec(phrase, 1..=10).prop_map(|list| {
        let mut seen = BTreeSet::new();
        list.into_iter()
            .filter(|p| seen.insert(p.to_ascii_lowercase()))
            .enumerate()
            .map(|(i, p)| (format!("S{i}"), p))
            .collect::<Vec<(String, String)>>()
    });
    let sep = prop::sample::select(vec![" ", ", ", ": ", "; ", " & "]);
    let headline = prop::collection::vec((word, sep), 1..=12).prop_map(|parts| {
        let mut text = String::new();
        for (i, (w, s)) in parts.iter().enumerate() {
            text.push_str(w);
            if i + 1 < parts.len() {
                text.push_str(s);
            }
        }
        text
    });
    (phrases, headline)
}

fn build_db(phrases: &[(String, String)]) -> EntityDatabase {
    EntityDatabase::from_records(phrases.iter().map(|(symbol, phrase)| EntityRecord {
        symbol: symbol.clone(),
        official_name: None,
        phrases: vec![phrase.clone()],
    }))
    .unwrap()
}

proptest! {
    #[test]
    fn recognize_matches_the_brute_force_oracle((phrases, headline) in scenario()) {
        let db = build_db(&phrases);
        let got: Vec<(usize, usize, String)> = db
            .recognize(&headline)
            .into_iter()
            .map(|m| (m.span_start, m.span_end, m.symbol))
            .collect();
        let want = brute_force_recognize(&phrases, &headline);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn mentions_are_disjoint_and_case_folded_db_phrases((phrases, headline) in scenario()) {
        let db = build_db(&phrases);
        let mentions = db.recognize(&headline);
        let phrase_set: BTreeSet<String> =
            phrases.iter().map(|(_, p)| p.to_ascii_lowercase()).collect();
        for m in &mentions {
            prop_assert!(m.span_start < m.span_end);
            prop_assert!(m.span_end <= headline.chars().count());
            prop_assert!(phrase_set.contains(&m.matched_phrase.to_ascii_lowercase()));
        }
        for pair in mentions.windows(2) {
            prop_assert!(pair[0].span_end <= pair[1].span_start);
        }
    }

    #[test]
    fn recognize_ignores_record_order((phrases, headline) in scenario()) {
        let db = build_db(&phrases);
        let mut reversed = phrases.clone();
        reversed.reverse();
        let db_rev = build_db(&reversed);
        prop_assert_eq!(db.recognize(&headline), db_rev.recognize(&headline));
    }

    #[test]
    fn expansion_counts_and_marker_layout((phrases, headline) in scenario()) {
        let db = build_db(&phrases);
        let mentions = db.recognize(&headline);
        let instances = expand_instances("h", &headline, &mentions);
        let distinct: BTreeSet<&str> = mentions.iter().map(|m| m.symbol.as_str()).collect();
        prop_assert_eq!(instances.len(), distinct.len());
        for inst in &instances {
            let targets = inst.tokens.iter().filter(|t| *t == TARGET_TOKEN).count();
            let others = inst.tokens.iter().filter(|t| *t == OTHER_TOKEN).count();
            let own = mentions.iter().filter(|m| m.symbol == inst.target_symbol).count();
            prop_assert_eq!(targets, own);
            prop_assert_eq!(targets + others, mentions.len());
            prop_assert!(targets >= 1);
        }
    }

    #[test]
    fn reinserting_phrases_reproduces_the_normalized_headline((phrases, headline) in scenario()) {
        let db = build_db(&phrases);
        let mentions: Vec<EntityMention> = db.recognize(&headline);
        let instances = expand_instances("h", &headline, &mentions);
        for inst in instances {
            let mut rebuilt: Vec<String> = Vec::new();
            let mut next_mention = mentions.iter();
            for token in &inst.tokens {
                if token == TARGET_TOKEN || token == OTHER_TOKEN {
                    let m = next_mention.next().expect("marker without mention");
                    rebuilt.extend(normalize_tokens(&m.matched_phrase));
                } else {
                    rebuilt.push(token.clone());
                }
            }
            prop_assert_eq!(rebuilt, normalize_tokens(&headline));
        }
    }
}
