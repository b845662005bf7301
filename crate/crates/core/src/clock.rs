//! Clock identifiers and valuations.

use std::fmt;

use crate::error::ClockError;

/// Index of a clock within a model's clock set `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub usize);

impl ClockId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Assignment of a non-negative elapsed time to every clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockValuation {
    values: Vec<f64>,
}

impl ClockValuation {
    /// The initial valuation: all clocks at 0.
    pub fn zero(clocks: usize) -> Self {
        ClockValuation {
            values: vec![0.0; clocks],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, ClockError> {
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(ClockError::BadValue(v));
            }
        }
        Ok(ClockValuation { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, clock: ClockId) -> f64 {
        self.values[clock.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Every clock advanced by `delta` (ν ⊕ δ).
    pub fn advance(&self, delta: f64) -> Result<ClockValuation, ClockError> {
        if delta < 0.0 || delta.is_nan() {
            return Err(ClockError::NegativeDelta(delta));
        }
        Ok(ClockValuation {
            values: self.values.iter().map(|v| v + delta).collect(),
        })
    }

    /// Clocks in `subset` put back to 0, all others unchanged.
    pub fn reset(
        &self,
        subset: impl IntoIterator<Item = ClockId>,
    ) -> Result<ClockValuation, ClockError> {
        let mut out = self.clone();
        for c in subset {
            if c.0 >= out.values.len() {
                return Err(ClockError::ClockOutOfRange {
                    clock: c.0,
                    len: out.values.len(),
                });
            }
            out.values[c.0] = 0.0;
        }
        Ok(out)
    }
}
