//! Trading calendar: the ordered set of open market days with per-day
//! session hours in a fixed exchange-local timezone.
//!
//! Default session hours are 09:30–15:30. These are the sentiment-window
//! boundaries, not the exchange's printed trading hours (09:15–15:30);
//! both are configurable globally and per day.

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, NaiveTime, TimeZone};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Read;

#[derive(Debug, thiserror::Error)]
pub enum CalendarError {
    #[error("calendar CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("calendar CSV must have a `date[,open,close]` header")]
    Header,
    #[error("calendar row {row}: bad date `{value}`")]
    BadDate { row: usize, value: String },
    #[error("calendar row {row}: bad time `{value}` (expected HH:MM)")]
    BadTime { row: usize, value: String },
    #[error("calendar has duplicate trading day {0}")]
    DuplicateDay(NaiveDate),
    #[error("calendar is empty")]
    Empty,
    #[error("session close {close} is not after open {open} on {day}")]
    InvertedSession {
        day: NaiveDate,
        open: NaiveTime,
        close: NaiveTime,
    },
    #[error("bad timezone offset `{0}` (expected e.g. +05:30)")]
    BadOffset(String),
    #[error("unparseable timestamp `{0}`")]
    BadTimestamp(String),
}

/// Session open/close times within one trading day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHours {
    pub open: NaiveTime,
    pub close: NaiveTime,
}

impl Default for SessionHours {
    fn default() -> Self {
        SessionHours {
            open: NaiveTime::from_hms_opt(9, 30, 0).unwrap(),
            close: NaiveTime::from_hms_opt(15, 30, 0).unwrap(),
        }
    }
}

impl SessionHours {
    pub fn new(open: NaiveTime, close: NaiveTime) -> Self {
        SessionHours { open, close }
    }
}

/// Parse a `+05:30` style UTC offset.
pub fn parse_offset(s: &str) -> Result<FixedOffset, CalendarError> {
    let bad = || CalendarError::BadOffset(s.to_string());
    let s = s.trim();
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => return Err(bad()),
    };
    let (h, m) = rest.split_once(':').ok_or_else(bad)?;
    let h: i32 = h.parse().map_err(|_| bad())?;
    let m: i32 = m.parse().map_err(|_| bad())?;
    if h > 23 || m > 59 {
        return Err(bad());
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(bad)
}

/// Parse an event timestamp. RFC 3339 strings keep their own offset;
/// naive `YYYY-MM-DD HH:MM[:SS]` (or with `T`) strings are interpreted in
/// the given zone.
pub fn parse_timestamp(s: &str, tz: FixedOffset) -> Result<DateTime<FixedOffset>, CalendarError> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return tz
                .from_local_datetime(&naive)
                .single()
                .ok_or_else(|| CalendarError::BadTimestamp(s.to_string()));
        }
    }
    Err(CalendarError::BadTimestamp(s.to_string()))
}

/// Sorted, immutable list of trading days with session-hour overrides.
#[derive(Clone, Debug)]
pub struct TradingCalendar {
    days: Vec<NaiveDate>,
    position: HashMap<NaiveDate, usize>,
    overrides: HashMap<NaiveDate, SessionHours>,
    pub default_hours: SessionHours,
    pub tz: FixedOffset,
}

impl TradingCalendar {
    pub fn new(
        mut days: Vec<NaiveDate>,
        default_hours: SessionHours,
        tz: FixedOffset,
    ) -> Result<Self, CalendarError> {
        if days.is_empty() {
            return Err(CalendarError::Empty);
        }
        days.sort();
        for pair in days.windows(2) {
            if pair[0] == pair[1] {
                return Err(CalendarError::DuplicateDay(pair[0]));
            }
        }
        let position = days.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Ok(TradingCalendar {
            days,
            position,
            overrides: HashMap::new(),
            default_hours,
            tz,
        })
    }

    /// Load from CSV with header `date[,open,close]`; empty open/close
    /// cells fall back to the default hours.
    pub fn from_csv_reader<R: Read>(
        reader: R,
        default_hours: SessionHours,
        tz: FixedOffset,
    ) -> Result<Self, CalendarError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(reader);
        {
            let headers = rdr.headers()?;
            if headers.get(0).map(str::trim) != Some("date") {
                return Err(CalendarError::Header);
            }
        }
        let mut days = Vec::new();
        let mut overrides = HashMap::new();
        for (row_idx, row) in rdr.records().enumerate() {
            let row = row?;
            let row_no = row_idx + 2;
            let date_str = row.get(0).unwrap_or("").trim();
            let date = NaiveDate::parse_from_str(date_str, "%Y-%m-%d").map_err(|_| {
                CalendarError::BadDate {
                    row: row_no,
                    value: date_str.to_string(),
                }
            })?;
            let parse_time = |cell: Option<&str>| -> Result<Option<NaiveTime>, CalendarError> {
                match cell.map(str::trim) {
                    None | Some("") => Ok(None),
                    Some(v) => NaiveTime::parse_from_str(v, "%H:%M").map(Some).map_err(|_| {
                        CalendarError::BadTime {
                            row: row_no,
                            value: v.to_string(),
                        }
                    }),
                }
            };
            let open = parse_time(row.get(1))?;
            let close = parse_time(row.get(2))?;
            if open.is_some() || close.is_some() {
                let hours = SessionHours {
                    open: open.unwrap_or(default_hours.open),
                    close: close.unwrap_or(default_hours.close),
                };
                if hours.close <= hours.open {
                    return Err(CalendarError::InvertedSession {
                        day: date,
                        open: hours.open,
                        close: hours.close,
                    });
                }
                overrides.insert(date, hours);
            }
            days.push(date);
        }
        let mut cal = Self::new(days, default_hours, tz)?;
        cal.overrides = overrides;
        Ok(cal)
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn first_day(&self) -> NaiveDate {
        self.days[0]
    }

    pub fn last_day(&self) -> NaiveDate {
        *self.days.last().unwrap()
    }

    pub fn is_trading_day(&self, date: NaiveDate) -> bool {
        self.position.contains_key(&date)
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.position.get(&date).copied()
    }

    pub fn day(&self, index: usize) -> NaiveDate {
        self.days[index]
    }

    /// Next trading day strictly after `date` (gaps allowed).
    pub fn next_trading_day(&self, date: NaiveDate) -> Option<NaiveDate> {
        let idx = self.days.partition_point(|&d| d <= date);
        self.days.get(idx).copied()
    }

    pub fn hours_on(&self, date: NaiveDate) -> SessionHours {
        self.overrides.get(&date).copied().unwrap_or(self.default_hours)
    }

    pub fn session_open(&self, index: usize) -> DateTime<FixedOffset> {
        let day = self.days[index];
        self.instant(day, self.hours_on(day).open)
    }

    pub fn session_close(&self, index: usize) -> DateTime<FixedOffset> {
        let day = self.days[index];
        self.instant(day, self.hours_on(day).close)
    }

    fn instant(&self, day: NaiveDate, time: NaiveTime) -> DateTime<FixedOffset> {
        self.tz
            .from_local_datetime(&day.and_time(time))
            .single()
            .expect("fixed offsets have no ambiguous local times")
    }
}
