use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// A real number stored as `sign · e^logmag`, so secular values spanning
/// hundreds of orders of magnitude stay comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaledValue {
    pub sign: i8,
    pub logmag: f64,
}

impl LogScaledValue {
    pub const ZERO: LogScaledValue = LogScaledValue {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };

    /// `value · e^shift`, with the shift kept in log space.
    pub fn from_scaled(value: f64, shift: f64) -> Self {
        if value == 0.0 {
            return Self::ZERO;
        }
        LogScaledValue {
            sign: if value > 0.0 { 1 } else { -1 },
            logmag: value.abs().ln() + shift,
        }
    }

    pub fn from_f64(value: f64) -> Self {
        Self::from_scaled(value, 0.0)
    }

    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.logmag.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// True when the two values have opposite nonzero signs.
    pub fn straddles(self, other: LogScaledValue) -> bool {
        self.sign * other.sign < 0
    }

    /// Orders by magnitude only.
    pub fn cmp_magnitude(&self, other: &LogScaledValue) -> Ordering {
        self.logmag.total_cmp(&other.logmag)
    }
}
