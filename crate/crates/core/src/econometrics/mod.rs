//! After-market returns and the regression machinery that tests whether
//! sentiment carries information about them.

mod linalg;
mod ols;
mod tdist;
mod var;

pub use ols::{
    align_series, bic, hypothesis_test, ols, split_by_year, Coefficient, HypothesisTest,
    RegressionResult, MIN_ALIGNED_DAYS,
};
pub use tdist::{stars_four_level, stars_three_level, two_sided_p};
pub use var::{var_fit, var_fit_common, var_scan, VarFit, VarSpec};

use crate::calendar::TradingCalendar;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum EconError {
    #[error("column `{name}` has {got} rows, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("{n} observations cannot identify {params} parameters")]
    TooFewObservations { n: usize, params: usize },
    #[error("design is rank deficient; collinear columns: {columns:?}")]
    RankDeficient { columns: Vec<String> },
    #[error("only {n} aligned days (need {required}); returns cover {left:?}, sentiment covers {right:?}")]
    TooFewAlignedDays {
        n: usize,
        required: usize,
        left: Option<(NaiveDate, NaiveDate)>,
        right: Option<(NaiveDate, NaiveDate)>,
    },
    #[error("lag specification must have p1 + p2 >= 1")]
    EmptySpec,
    #[error("sample of {n} is too short for spec {spec} (need at least {needed})")]
    InsufficientSample { n: usize, needed: usize, spec: VarSpec },
    #[error("non-positive price on {day}")]
    NonPositivePrice { day: NaiveDate },
    #[error("duplicate price bar for {0}")]
    DuplicateBar(NaiveDate),
    #[error("prices CSV must have a `date,open,close` header")]
    PricesHeader,
    #[error("prices CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("prices row {row}: {message}")]
    BadRow { row: usize, message: String },
}

/// Daily open and close of the index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceBar {
    pub trading_day: NaiveDate,
    pub open: f64,
    pub close: f64,
}

impl PriceBar {
    pub fn new(trading_day: NaiveDate, open: f64, close: f64) -> Result<Self, EconError> {
        if !(open > 0.0 && close > 0.0 && open.is_finite() && close.is_finite()) {
            return Err(EconError::NonPositivePrice { day: trading_day });
        }
        Ok(PriceBar {
            trading_day,
            open,
            close,
        })
    }
}

/// After-market log return for day `i`: `ln(open_{i+1}) − ln(close_i)`.
pub fn after_market_log_return(prev: &PriceBar, next: &PriceBar) -> f64 {
    next.open.ln() - prev.close.ln()
}

/// After-market percentage return for day `i`:
/// `(open_{i+1} − close_i) / close_i`.
pub fn after_market_pct_return(prev: &PriceBar, next: &PriceBar) -> f64 {
    (next.open - prev.close) / prev.close
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    Log,
    Pct,
}

impl fmt::Display for ReturnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReturnKind::Log => "log",
            ReturnKind::Pct => "pct",
        })
    }
}

impl FromStr for ReturnKind {
    type Err = EconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log" => Ok(ReturnKind::Log),
            "pct" | "percent" | "percentage" => Ok(ReturnKind::Pct),
            other => Err(EconError::BadRow {
                row: 0,
                message: format!("unknown return kind `{other}` (expected log or pct)"),
            }),
        }
    }
}

/// Dated after-market returns plus the calendar day-pairs that could not
/// be computed.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnSeries {
    pub kind: ReturnKind,
    /// Return of day `i`, dated at day `i`.
    pub values: Vec<(NaiveDate, f64)>,
    /// Days whose next-trading-day bar is missing.
    pub gaps: Vec<NaiveDate>,
    /// Price bars on dates absent from the calendar.
    pub off_calendar: Vec<NaiveDate>,
}

/// Compute after-market returns over consecutive calendar trading days.
///
/// A return for day `i` needs both day `i`'s bar and the next trading
/// day's bar; missing neighbors are reported as gaps, not errors.
pub fn after_market_returns(
    bars: &[PriceBar],
    calendar: &TradingCalendar,
    kind: ReturnKind,
) -> Result<ReturnSeries, EconError> {
    let mut by_day: BTreeMap<NaiveDate, &PriceBar> = BTreeMap::new();
    let mut off_calendar = Vec::new();
    for bar in bars {
        if by_day.insert(bar.trading_day, bar).is_some() {
            return Err(EconError::DuplicateBar(bar.trading_day));
        }
        if !calendar.is_trading_day(bar.trading_day) {
            off_calendar.push(bar.trading_day);
        }
    }

    let mut values = Vec::new();
    let mut gaps = Vec::new();
    for i in 0..calendar.len().saturating_sub(1) {
        let day = calendar.day(i);
        let next = calendar.day(i + 1);
        match (by_day.get(&day), by_day.get(&next)) {
            (Some(prev), Some(next_bar)) => {
                let r = match kind {
                    ReturnKind::Log => after_market_log_return(prev, next_bar),
                    ReturnKind::Pct => after_market_pct_return(prev, next_bar),
                };
                values.push((day, r));
            }
            (Some(_), None) => gaps.push(day),
            (None, _) => {}
        }
    }
    Ok(ReturnSeries {
        kind,
        values,
        gaps,
        off_calendar,
    })
}

/// Read prices CSV with header `date,open,close`.
pub fn read_prices_csv<R: Read>(reader: R) -> Result<Vec<PriceBar>, EconError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["date", "open", "close"];
        for (i, name) in want.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(EconError::PricesHeader);
            }
        }
    }
    let mut bars = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 2;
        let bad = |message: String| EconError::BadRow { row: row_no, message };
        let day = NaiveDate::parse_from_str(row.get(0).unwrap_or("").trim(), "%Y-%m-%d")
            .map_err(|e| bad(format!("bad date: {e}")))?;
        let open: f64 = row
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| bad(format!("bad open: {e}")))?;
        let close: f64 = row
            .get(2)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| bad(format!("bad close: {e}")))?;
        bars.push(PriceBar::new(day, open, close)?);
    }
    Ok(bars)
}
