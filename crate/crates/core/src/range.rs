use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Inclusive `start:end:step` range.
///
/// The end point is included when the step divides the span (up to a
/// relative slack of 1e-9 of a step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

const DIVIDE_SLACK: f64 = 1e-9;

impl RangeSpec {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(Error::InvalidRange("non-finite bound".into()));
        }
        if step <= 0.0 {
            return Err(Error::InvalidRange(format!(
                "step must be positive, got {step}"
            )));
        }
        if end < start {
            return Err(Error::InvalidRange(format!(
                "end {end} is below start {start}"
            )));
        }
        Ok(Self { start, end, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = (self.end - self.start) / self.step;
        let whole = (span + DIVIDE_SLACK).floor();
        let count = whole as usize + 1;
        let hits_end = (span - whole).abs() < DIVIDE_SLACK;
        (0..count)
            .map(|i| {
                if hits_end && i + 1 == count {
                    self.end
                } else {
                    self.start + i as f64 * self.step
                }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(Error::InvalidRange(format!(
                "expected start:end:step, got `{s}`"
            )));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidRange(format!("`{t}` is not a number in `{s}`")))
        };
        Self::new(num(a)?, num(b)?, num(c)?)
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}
