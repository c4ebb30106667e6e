//! Log-domain arithmetic for nonnegative quantities.
//!
//! Kernel values on hyperbolic space pair factors like `e^{-lambda1 t}` with
//! volume weights like `sinh^{n-1} r ~ e^{(n-1)r}`, and the two meet near
//! `r = (n-1)t`. Either factor alone leaves f64 range long before the product
//! does, so every kernel quantity is carried as a log-magnitude and only
//! converted to a plain value at the user-facing boundary.

use std::ops::{Add, Div, Mul};

/// A nonnegative real stored as `(log magnitude, zero flag)`.
///
/// The zero flag is authoritative: when set, `log_mag()` reports `-inf` and
/// the stored magnitude is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    log_mag: f64,
    zero: bool,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { log_mag: f64::NEG_INFINITY, zero: true };

    /// Wraps an explicit log-magnitude. `log_mag` must be finite.
    pub fn from_log(log_mag: f64) -> Self {
        debug_assert!(log_mag.is_finite(), "non-finite log magnitude {log_mag}");
        LogScalar { log_mag, zero: false }
    }

    /// Converts a plain value; nonpositive inputs collapse to zero.
    pub fn from_value(v: f64) -> Self {
        if v > 0.0 {
            LogScalar::from_log(v.ln())
        } else {
            LogScalar::ZERO
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.zero {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    /// Explicit conversion back to a plain value. May underflow to 0 or
    /// overflow to `inf`; storage itself never does.
    pub fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.log_mag.exp()
        }
    }

    /// `self / other` as a plain value, evaluated as `exp(log a - log b)`.
    pub fn ratio_to(&self, other: LogScalar) -> f64 {
        if self.zero {
            return 0.0;
        }
        debug_assert!(!other.zero, "ratio against zero");
        (self.log_mag - other.log_mag).exp()
    }

    /// Positive part of a difference: `(self - rhs)_+`.
    pub fn sub_positive(&self, rhs: LogScalar) -> LogScalar {
        if self.zero {
            return LogScalar::ZERO;
        }
        if rhs.zero {
            return *self;
        }
        let d = rhs.log_mag - self.log_mag;
        if d >= 0.0 {
            LogScalar::ZERO
        } else {
            LogScalar::from_log(self.log_mag + log1m_exp(d))
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        if self.zero || rhs.zero {
            LogScalar::ZERO
        } else {
            LogScalar::from_log(self.log_mag + rhs.log_mag)
        }
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        debug_assert!(!rhs.zero, "division by zero LogScalar");
        if self.zero {
            LogScalar::ZERO
        } else {
            LogScalar::from_log(self.log_mag - rhs.log_mag)
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        if self.zero {
            return rhs;
        }
        if rhs.zero {
            return self;
        }
        LogScalar::from_log(log_add_exp(self.log_mag, rhs.log_mag))
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.log_mag().partial_cmp(&other.log_mag())
    }
}

/// `log(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log(1 - e^x)` for `x < 0`.
pub fn log1m_exp(x: f64) -> f64 {
    debug_assert!(x < 0.0);
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `log(sinh r)` for `r > 0`, valid uniformly in `r`:
/// `log sinh r = r - log 2 + log(1 - e^{-2r})`.
pub fn log_sinh(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    r - std::f64::consts::LN_2 + (-(-2.0 * r).exp_m1()).ln()
}

/// `log(cosh r)`, overflow-free for any finite `r`.
pub fn log_cosh(r: f64) -> f64 {
    let a = r.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}
