//! Entity-aware sentiment extraction from financial news headlines.
//!
//! The pipeline runs in five stages, each usable on its own:
//!
//! 1. [`gazetteer`] — recognize financial entities in raw headlines from a
//!    phrase database and expand each headline into per-entity instances in
//!    which the entity in focus becomes a `TARGET` token and co-occurring
//!    entities become `OTHER` tokens.
//! 2. [`lexicon`] — merge word-level sentiment dictionaries under fixed
//!    precedence rules and map instance tokens to feature literals.
//! 3. [`vectorizer`] — turn feature sequences into sparse vectors, either as
//!    positional bits or as a unigram + bigram + trigram count ensemble.
//! 4. [`classifier`] — train linear models (multinomial logistic or
//!    one-vs-rest squared hinge) and evaluate them under a repeated
//!    random-split protocol with median reporting.
//! 5. [`sentindex`] and [`econometrics`] — aggregate timestamped predictions
//!    into daily market / after-market sentiment scores and regress
//!    after-market index returns on them (OLS hypothesis tests and lagged
//!    dynamic regressions ranked by BIC).
//!
//! See the `book/` directory for a guided tour; its code blocks are compiled
//! and run as doctests of this crate.

pub mod calendar;
pub mod classifier;
pub mod corpus;
pub mod econometrics;
pub mod gazetteer;
pub mod lexicon;
pub mod sentindex;
pub mod vectorizer;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Sentiment class of one entity mention.
///
/// The declaration order (positive, negative, neutral) is the canonical class
/// order everywhere: classifier weight rows, score vectors, and argmax
/// tie-breaking all follow it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];

    /// Position in the canonical class order.
    pub fn index(self) -> usize {
        match self {
            Sentiment::Positive => 0,
            Sentiment::Negative => 1,
            Sentiment::Neutral => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Sentiment> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for unrecognized sentiment label strings.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sentiment label `{0}` (expected positive, negative, or neutral)")]
pub struct ParseSentimentError(pub String);

impl FromStr for Sentiment {
    type Err = ParseSentimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(Sentiment::Positive),
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            other => Err(ParseSentimentError(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_order_is_positive_negative_neutral() {
        assert_eq!(Sentiment::ALL[0], Sentiment::Positive);
        assert_eq!(Sentiment::ALL[1], Sentiment::Negative);
        assert_eq!(Sentiment::ALL[2], Sentiment::Neutral);
        for (i, s) in Sentiment::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(Sentiment::from_index(i), Some(*s));
        }
    }

    #[test]
    fn label_round_trip() {
        for s in Sentiment::ALL {
            assert_eq!(s.as_str().parse::<Sentiment>().unwrap(), s);
        }
        assert!(" Positive ".parse::<Sentiment>().is_ok());
        assert!("bullish".parse::<Sentiment>().is_err());
    }
}
