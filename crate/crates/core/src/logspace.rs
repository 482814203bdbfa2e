//! Signed log-magnitude numbers for quantities like `exp(-300)` that leave
//! the double-precision range.

use serde::{Deserialize, Serialize};
use std::ops::{Mul, Neg};

/// A real number stored as `sign * exp(ln_abs)`. Zero has `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_abs: x.abs().ln(),
                sign: x.signum(),
            }
        }
    }

    pub fn from_ln(ln_abs: f64, sign: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue {
                ln_abs,
                sign: sign.signum(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    /// Materialize; may underflow to 0 or overflow to infinity.
    pub fn value(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn abs(&self) -> Self {
        LogValue {
            ln_abs: self.ln_abs,
            sign: self.sign.abs(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        *self * LogValue::from_f64(factor)
    }

    /// Sum of two signed values without leaving log space.
    pub fn add(&self, other: &LogValue) -> LogValue {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.ln_abs - big.ln_abs).exp();
        let factor = if big.sign == small.sign {
            1.0 + ratio
        } else {
            1.0 - ratio
        };
        if factor == 0.0 {
            return Self::ZERO;
        }
        let ln_factor = if big.sign == small.sign {
            ratio.ln_1p()
        } else {
            (-ratio).ln_1p()
        };
        LogValue::from_ln(big.ln_abs + ln_factor, big.sign)
    }

    pub fn sub(&self, other: &LogValue) -> LogValue {
        self.add(&-*other)
    }

    pub fn sqrt(&self) -> LogValue {
        assert!(self.sign >= 0.0, "sqrt of negative LogValue");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogValue::from_ln(0.5 * self.ln_abs, 1.0)
    }

    pub fn recip(&self) -> LogValue {
        LogValue::from_ln(-self.ln_abs, self.sign)
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue::from_ln(self.ln_abs + rhs.ln_abs, self.sign * rhs.sign)
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            ln_abs: self.ln_abs,
            sign: -self.sign,
        }
    }
}
