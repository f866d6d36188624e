//! Aggregation of timestamped entity sentiments into daily market and
//! after-market index series.
//!
//! Two bucket-level scores are defined over the positive / neutral /
//! negative counts of a window:
//!
//! * `s1 = (pos − neg) / (pos + neg)` — the classic buy/sell balance;
//! * `s2 = (pos − neg) / (pos + neu + neg)` — the same difference relative
//!   to all decisions, so neutral flow attenuates the score.
//!
//! The market window of trading day `i` is `[open_i, close_i)` and the
//! after-market window is `[close_i, open_{i+1})` where `i+1` is the next
//! trading day: weekends and holidays fold into the preceding day's
//! after-market window.

use crate::calendar::{parse_timestamp, CalendarError, TradingCalendar};
use crate::Sentiment;
use chrono::{DateTime, Datelike, FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

/// Which intraday window a bucket covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionPhase {
    Market,
    AfterMarket,
}

impl SessionPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            SessionPhase::Market => "market",
            SessionPhase::AfterMarket => "after_market",
        }
    }
}

impl fmt::Display for SessionPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SessionPhase {
    type Err = SentIndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "market" => Ok(SessionPhase::Market),
            "after_market" | "after-market" | "aftermarket" => Ok(SessionPhase::AfterMarket),
            other => Err(SentIndexError::BadPhase(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SentIndexError {
    #[error("unknown session phase `{0}` (expected market or after_market)")]
    BadPhase(String),
    #[error("event at {timestamp} precedes the calendar start ({start} open)")]
    EventBeforeCalendar {
        timestamp: DateTime<FixedOffset>,
        start: NaiveDate,
    },
    #[error("session windows of {0} and the next trading day overlap")]
    WindowsOverlap(NaiveDate),
    #[error("events CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("events CSV must have an `id,timestamp,symbol,label` header")]
    EventsHeader,
    #[error("series CSV must have a `date,duration,pos,neu,neg,s1,s2` header")]
    SeriesHeader,
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error(transparent)]
    Time(#[from] CalendarError),
    #[error("constituency CSV must have a `year,symbol` header")]
    ConstituencyHeader,
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Primary sentiment measure `(pos − neg) / (pos + neg)`.
///
/// Undefined (`None`) when there are no positive or negative counts.
pub fn s1(pos: u64, neg: u64) -> Option<f64> {
    if pos + neg == 0 {
        None
    } else {
        Some((pos as f64 - neg as f64) / (pos as f64 + neg as f64))
    }
}

/// Alternate sentiment measure `(pos − neg) / (pos + neu + neg)`.
///
/// Neutral counts attenuate the score; undefined when all counts are zero.
pub fn s2(pos: u64, neu: u64, neg: u64) -> Option<f64> {
    let total = pos + neu + neg;
    if total == 0 {
        None
    } else {
        Some((pos as f64 - neg as f64) / total as f64)
    }
}

/// One timestamped entity-sentiment prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentEvent {
    pub id: String,
    pub timestamp: DateTime<FixedOffset>,
    pub symbol: String,
    pub label: Sentiment,
}

/// Counts of one (trading day, phase) bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SentimentBucket {
    pub pos: u64,
    pub neu: u64,
    pub neg: u64,
}

impl SentimentBucket {
    pub fn add(&mut self, label: Sentiment) {
        match label {
            Sentiment::Positive => self.pos += 1,
            Sentiment::Negative => self.neg += 1,
            Sentiment::Neutral => self.neu += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.pos + self.neu + self.neg
    }

    pub fn s1(&self) -> Option<f64> {
        s1(self.pos, self.neg)
    }

    pub fn s2(&self) -> Option<f64> {
        s2(self.pos, self.neu, self.neg)
    }
}

/// What to emit for calendar days whose bucket received no events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmptyBucketPolicy {
    /// Omit the day from the series (default).
    Skip,
    /// Emit the day with zero counts and both scores set to 0.
    Zero,
}

impl FromStr for EmptyBucketPolicy {
    type Err = SentIndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "skip" => Ok(EmptyBucketPolicy::Skip),
            "zero" => Ok(EmptyBucketPolicy::Zero),
            other => Err(SentIndexError::BadRow {
                row: 0,
                message: format!("unknown empty-bucket policy `{other}`"),
            }),
        }
    }
}

/// Per-year index membership used to filter events.
#[derive(Clone, Debug, Default)]
pub struct Constituency {
    per_year: HashMap<i32, BTreeSet<String>>,
}

impl Constituency {
    pub fn insert(&mut self, year: i32, symbol: &str) {
        self.per_year.entry(year).or_default().insert(symbol.to_string());
    }

    /// Membership test; a year with no defined set admits nothing.
    pub fn contains(&self, year: i32, symbol: &str) -> bool {
        self.per_year.get(&year).is_some_and(|set| set.contains(symbol))
    }

    /// Load from CSV with header `year,symbol`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, SentIndexError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(reader);
        {
            let headers = rdr.headers()?;
            if headers.get(0).map(str::trim) != Some("year")
                || headers.get(1).map(str::trim) != Some("symbol")
            {
                return Err(SentIndexError::ConstituencyHeader);
            }
        }
        let mut out = Constituency::default();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let year: i32 = row.get(0).unwrap_or("").trim().parse().map_err(|_| {
                SentIndexError::BadRow {
                    row: i + 2,
                    message: format!("bad year `{}`", row.get(0).unwrap_or("")),
                }
            })?;
            out.insert(year, row.get(1).unwrap_or("").trim());
        }
        Ok(out)
    }
}

/// One day of a per-phase series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub day: NaiveDate,
    pub pos: u64,
    pub neu: u64,
    pub neg: u64,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
}

/// Daily scores for one phase; days strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentimentSeries {
    pub phase: SessionPhase,
    pub points: Vec<SeriesPoint>,
}

impl SentimentSeries {
    /// (day, value) pairs of the chosen measure, defined points only.
    pub fn measure(&self, use_s2: bool) -> Vec<(NaiveDate, f64)> {
        self.points
            .iter()
            .filter_map(|p| {
                let v = if use_s2 { p.s2 } else { p.s1 };
                v.map(|v| (p.day, v))
            })
            .collect()
    }
}

/// The market and after-market series of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BucketedSeries {
    pub market: SentimentSeries,
    pub after_market: SentimentSeries,
}

impl BucketedSeries {
    pub fn phase(&self, phase: SessionPhase) -> &SentimentSeries {
        match phase {
            SessionPhase::Market => &self.market,
            SessionPhase::AfterMarket => &self.after_market,
        }
    }
}

/// Counts of events that were not assigned to any bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExclusionReport {
    /// Symbol absent from the constituency of the bucket's year.
    pub out_of_constituency: usize,
    /// Timestamp at or after the final session close (no next open exists).
    pub after_calendar_end: usize,
    pub bucketed: usize,
}

/// Assign events to (trading day, phase) buckets and build both series.
///
/// Events before the first session open are an error; events at or after
/// the final session close have no bucket and land in the exclusion
/// report, as do events whose symbol is outside the constituency of the
/// bucket's calendar year (when a constituency is supplied).
pub fn bucket_series(
    events: &[SentimentEvent],
    calendar: &TradingCalendar,
    constituency: Option<&Constituency>,
    policy: EmptyBucketPolicy,
) -> Result<(BucketedSeries, ExclusionReport), SentIndexError> {
    let n_days = calendar.len();
    let opens: Vec<DateTime<FixedOffset>> = (0..n_days).map(|i| calendar.session_open(i)).collect();
    let closes: Vec<DateTime<FixedOffset>> = (0..n_days).map(|i| calendar.session_close(i)).collect();
    for i in 0..n_days - 1 {
        if closes[i] > opens[i + 1] {
            return Err(SentIndexError::WindowsOverlap(calendar.day(i)));
        }
    }

    let mut sorted: Vec<&SentimentEvent> = events.iter().collect();
    sorted.sort_by_key(|e| e.timestamp);

    let mut buckets: BTreeMap<(NaiveDate, SessionPhase), SentimentBucket> = BTreeMap::new();
    let mut report = ExclusionReport::default();

    for event in sorted {
        let t = event.timestamp;
        if t < opens[0] {
            return Err(SentIndexError::EventBeforeCalendar {
                timestamp: t,
                start: calendar.first_day(),
            });
        }
        if t >= closes[n_days - 1] {
            report.after_calendar_end += 1;
            continue;
        }
        // largest i with open_i <= t; t < open_{i+1} by construction
        let i = opens.partition_point(|o| *o <= t) - 1;
        let day = calendar.day(i);
        let phase = if t < closes[i] {
            SessionPhase::Market
        } else {
            SessionPhase::AfterMarket
        };
        if let Some(cons) = constituency {
            if !cons.contains(day.year(), &event.symbol) {
                report.out_of_constituency += 1;
                continue;
            }
        }
        buckets.entry((day, phase)).or_default().add(event.label);
        report.bucketed += 1;
    }

    let build = |phase: SessionPhase, buckets: &BTreeMap<(NaiveDate, SessionPhase), SentimentBucket>| {
        let mut points = Vec::new();
        let phase_days: Vec<NaiveDate> = buckets
            .keys()
            .filter(|(_, p)| *p == phase)
            .map(|(d, _)| *d)
            .collect();
        match policy {
            EmptyBucketPolicy::Skip => {
                for day in phase_days {
                    let b = buckets[&(day, phase)];
                    points.push(SeriesPoint {
                        day,
                        pos: b.pos,
                        neu: b.neu,
                        neg: b.neg,
                        s1: b.s1(),
                        s2: b.s2(),
                    });
                }
            }
            EmptyBucketPolicy::Zero => {
                if let (Some(&first), Some(&last)) = (phase_days.first(), phase_days.last()) {
                    for &day in calendar.days() {
                        if day < first || day > last {
                            continue;
                        }
                        match buckets.get(&(day, phase)) {
                            Some(b) => points.push(SeriesPoint {
                                day,
                                pos: b.pos,
                                neu: b.neu,
                                neg: b.neg,
                                s1: b.s1(),
                                s2: b.s2(),
                            }),
                            None => points.push(SeriesPoint {
                                day,
                                pos: 0,
                                neu: 0,
                                neg: 0,
                                s1: Some(0.0),
                                s2: Some(0.0),
                            }),
                        }
                    }
                }
            }
        }
        SentimentSeries { phase, points }
    };

    let series = BucketedSeries {
        market: build(SessionPhase::Market, &buckets),
        after_market: build(SessionPhase::AfterMarket, &buckets),
    };
    Ok((series, report))
}

/// Trailing mean over the last `window` points; `None` until `window`
/// points exist.
pub fn moving_average(values: &[f64], window: usize) -> Vec<Option<f64>> {
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::with_capacity(values.len());
    let mut running = 0.0;
    for (i, &v) in values.iter().enumerate() {
        running += v;
        if i + 1 > window {
            running -= values[i - window];
        }
        if i + 1 >= window {
            out.push(Some(running / window as f64));
        } else {
            out.push(None);
        }
    }
    out
}

/// Read events CSV (`id,timestamp,symbol,label`); naive timestamps are
/// interpreted in `tz`.
pub fn read_events_csv<R: Read>(reader: R, tz: FixedOffset) -> Result<Vec<SentimentEvent>, SentIndexError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["id", "timestamp", "symbol", "label"];
        for (i, name) in want.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(SentIndexError::EventsHeader);
            }
        }
    }
    let mut events = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 2;
        let timestamp = parse_timestamp(row.get(1).unwrap_or(""), tz)?;
        let label = row
            .get(3)
            .unwrap_or("")
            .parse::<Sentiment>()
            .map_err(|e| SentIndexError::BadRow {
                row: row_no,
                message: e.to_string(),
            })?;
        events.push(SentimentEvent {
            id: row.get(0).unwrap_or("").to_string(),
            timestamp,
            symbol: row.get(2).unwrap_or("").trim().to_string(),
            label,
        });
    }
    Ok(events)
}

pub fn write_events_csv<W: Write>(writer: W, events: &[SentimentEvent]) -> Result<(), SentIndexError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "timestamp", "symbol", "label"])?;
    for e in events {
        wtr.write_record([
            e.id.as_str(),
            &e.timestamp.to_rfc3339(),
            e.symbol.as_str(),
            e.label.as_str(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Write both series as `date,duration,pos,neu,neg,s1,s2`, optionally with
/// trailing `s1_ma{w},s2_ma{w}` moving-average columns.
pub fn write_series_csv<W: Write>(
    writer: W,
    series: &BucketedSeries,
    ma_window: Option<usize>,
) -> Result<(), SentIndexError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec![
        "date".to_string(),
        "duration".to_string(),
        "pos".to_string(),
        "neu".to_string(),
        "neg".to_string(),
        "s1".to_string(),
        "s2".to_string(),
    ];
    if let Some(w) = ma_window {
        header.push(format!("s1_ma{w}"));
        header.push(format!("s2_ma{w}"));
    }
    wtr.write_record(&header)?;
    for s in [&series.market, &series.after_market] {
        // moving averages run over defined points only
        let (ma1, ma2) = match ma_window {
            Some(w) => (
                spread_ma(&s.points, w, |p| p.s1),
                spread_ma(&s.points, w, |p| p.s2),
            ),
            None => (Vec::new(), Vec::new()),
        };
        for (i, p) in s.points.iter().enumerate() {
            let mut record = vec![
                p.day.to_string(),
                s.phase.to_string(),
                p.pos.to_string(),
                p.neu.to_string(),
                p.neg.to_string(),
                fmt_opt(p.s1),
                fmt_opt(p.s2),
            ];
            if ma_window.is_some() {
                record.push(fmt_opt(ma1[i]));
                record.push(fmt_opt(ma2[i]));
            }
            wtr.write_record(&record)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Moving average of a measure across points where it is defined, mapped
/// back onto the full point list.
fn spread_ma(
    points: &[SeriesPoint],
    window: usize,
    measure: impl Fn(&SeriesPoint) -> Option<f64>,
) -> Vec<Option<f64>> {
    let defined: Vec<(usize, f64)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| measure(p).map(|v| (i, v)))
        .collect();
    let values: Vec<f64> = defined.iter().map(|&(_, v)| v).collect();
    let ma = moving_average(&values, window);
    let mut out = vec![None; points.len()];
    for ((i, _), m) in defined.iter().zip(ma) {
        out[*i] = m;
    }
    out
}

/// Read a series CSV back (moving-average columns, if present, are
/// ignored).
pub fn read_series_csv<R: Read>(reader: R) -> Result<BucketedSeries, SentIndexError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["date", "duration", "pos", "neu", "neg", "s1", "s2"];
        for (i, name) in want.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(SentIndexError::SeriesHeader);
            }
        }
    }
    let mut market = Vec::new();
    let mut after = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 2;
        let bad = |message: String| SentIndexError::BadRow { row: row_no, message };
        let day = NaiveDate::parse_from_str(row.get(0).unwrap_or("").trim(), "%Y-%m-%d")
            .map_err(|e| bad(format!("bad date: {e}")))?;
        let phase: SessionPhase = row.get(1).unwrap_or("").parse()?;
        let parse_count = |idx: usize| -> Result<u64, SentIndexError> {
            row.get(idx)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad count: {e}")))
        };
        let parse_score = |idx: usize| -> Result<Option<f64>, SentIndexError> {
            let cell = row.get(idx).unwrap_or("").trim();
            if cell.is_empty() {
                Ok(None)
            } else {
                cell.parse().map(Some).map_err(|e| bad(format!("bad score: {e}")))
            }
        };
        let point = SeriesPoint {
            day,
            pos: parse_count(2)?,
            neu: parse_count(3)?,
            neg: parse_count(4)?,
            s1: parse_score(5)?,
            s2: parse_score(6)?,
        };
        match phase {
            SessionPhase::Market => market.push(point),
            SessionPhase::AfterMarket => after.push(point),
        }
    }
    Ok(BucketedSeries {
        market: SentimentSeries {
            phase: SessionPhase::Market,
            points: market,
        },
        after_market: SentimentSeries {
            phase: SessionPhase::AfterMarket,
            points: after,
        },
    })
}
