use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::ledger::{Timestamp, SECONDS_PER_DAY};

/// An inclusive range of UTC calendar days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DateWindowError {
    #[error("window end {end} precedes start {start}")]
    Reversed { start: NaiveDate, end: NaiveDate },
    #[error("cannot parse date range {0:?}: expected YYYY-MM-DD..YYYY-MM-DD")]
    Parse(String),
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, DateWindowError> {
        if end < start {
            return Err(DateWindowError::Reversed { start, end });
        }
        Ok(DateWindow { start, end })
    }

    pub fn single(day: NaiveDate) -> Self {
        DateWindow {
            start: day,
            end: day,
        }
    }

    /// Number of days covered, at least 1.
    pub fn days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }

    /// Half-open instant range `[start 00:00, end+1 00:00)`.
    pub fn instant_bounds(&self) -> (Timestamp, Timestamp) {
        let lo = Timestamp::start_of_day(self.start);
        (lo, lo.plus_seconds(self.days() * SECONDS_PER_DAY))
    }

    pub fn iter_days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.days()).map(move |i| start + chrono::Days::new(i as u64))
    }
}

impl fmt::Display for DateWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for DateWindow {
    type Err = DateWindowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| DateWindowError::Parse(s.to_string()))?;
        let parse = |x: &str| {
            NaiveDate::parse_from_str(x.trim(), "%Y-%m-%d")
                .map_err(|_| DateWindowError::Parse(s.to_string()))
        };
        DateWindow::new(parse(a)?, parse(b)?)
    }
}
