//! Log-domain complex arithmetic.
//!
//! Kernel pairings routinely produce magnitudes like `e^{-720}` (a pairing at
//! |z-w| = 38) and the p-localization sweeps raise them to powers up to 16.
//! Ordinary doubles underflow near `e^{-745}`, so every magnitude in the crate
//! is carried as a natural log plus a phase, and only collapsed to an ordinary
//! complex number after cancellations have happened.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex scalar stored as (log-magnitude, phase).
///
/// `log_mag = -inf` encodes exact zero; the phase of zero is normalized to 0.
/// Phase is kept in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

/// Wrap an angle into `(-pi, pi]`.
fn wrap_phase(theta: f64) -> f64 {
    if !theta.is_finite() {
        return 0.0;
    }
    let two_pi = std::f64::consts::TAU;
    let mut t = theta % two_pi;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    } else if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_mag,
            phase: wrap_phase(phase),
        }
    }

    /// `e^{x + iy}` for a complex exponent `x + iy`.
    pub fn exp_of(re: f64, im: f64) -> Self {
        Self::new(re, im)
    }

    /// A nonnegative real `r` as a log-domain value.
    pub fn from_real(r: f64) -> Self {
        if r == 0.0 {
            Self::ZERO
        } else if r > 0.0 {
            Self::new(r.ln(), 0.0)
        } else {
            Self::new((-r).ln(), std::f64::consts::PI)
        }
    }

    pub fn from_complex(c: Complex64) -> Self {
        let m = c.norm();
        if m == 0.0 {
            Self::ZERO
        } else {
            Self::new(m.ln(), c.arg())
        }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    /// Magnitude as an ordinary double (may underflow/overflow; prefer `log_mag`).
    pub fn mag(self) -> f64 {
        self.log_mag.exp()
    }

    pub fn is_zero(self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }

    pub fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag - rhs.log_mag, self.phase - rhs.phase)
    }

    /// Raise the magnitude to a real power, scaling the phase accordingly.
    /// For non-integer `p` this is the principal branch.
    pub fn powf(self, p: f64) -> LogComplex {
        if self.is_zero() {
            return if p > 0.0 { Self::ZERO } else { Self::ONE };
        }
        Self::new(self.log_mag * p, self.phase * p)
    }

    /// |self| as a log-domain nonnegative real.
    pub fn abs(self) -> LogComplex {
        LogComplex {
            log_mag: self.log_mag,
            phase: 0.0,
        }
    }

    pub fn conj(self) -> LogComplex {
        Self::new(self.log_mag, -self.phase)
    }

    pub fn scale_mag(self, factor_log: f64) -> LogComplex {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag + factor_log, self.phase)
    }
}

/// Running-max rescaled accumulator for sums of `LogComplex` terms.
///
/// Terms are accumulated in the order given; repeated runs over the same term
/// sequence are bit-identical. The accumulator keeps the running maximum
/// log-magnitude and a complex residual scaled by `e^{-max}`, so sums of
/// wildly different magnitudes neither overflow nor silently vanish.
#[derive(Clone, Debug)]
pub struct LogSum {
    max_log: f64,
    acc: Complex64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max_log: f64::NEG_INFINITY,
            acc: Complex64::new(0.0, 0.0),
        }
    }

    pub fn add(&mut self, term: LogComplex) {
        if term.is_zero() {
            return;
        }
        if term.log_mag > self.max_log {
            // rescale the residual to the new maximum
            if self.max_log > f64::NEG_INFINITY {
                self.acc *= (self.max_log - term.log_mag).exp();
            }
            self.max_log = term.log_mag;
        }
        self.acc += Complex64::from_polar((term.log_mag - self.max_log).exp(), term.phase);
    }

    /// Add an ordinary real value (sign respected).
    pub fn add_real(&mut self, v: f64) {
        self.add(LogComplex::from_real(v));
    }

    pub fn value(&self) -> LogComplex {
        if self.max_log == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        let m = self.acc.norm();
        if m == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.max_log + m.ln(), self.acc.arg())
    }

    /// Merge another accumulator into this one (used by deterministic
    /// tree reductions: children are merged in index order).
    pub fn merge(&mut self, other: &LogSum) {
        if other.max_log == f64::NEG_INFINITY {
            return;
        }
        if other.max_log > self.max_log {
            if self.max_log > f64::NEG_INFINITY {
                self.acc *= (self.max_log - other.max_log).exp();
            }
            self.max_log = other.max_log;
            self.acc += other.acc;
        } else {
            self.acc += other.acc * (other.max_log - self.max_log).exp();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn multiply_adds_log_magnitudes() {
        let a = LogComplex::new(-350.0, 0.7);
        let b = LogComplex::new(-400.0, -2.1);
        let c = a.mul(b);
        assert_relative_eq!(c.log_mag, -750.0, max_relative = 1e-15);
        assert_relative_eq!(c.phase, 0.7 - 2.1, max_relative = 1e-12);
    }

    #[test]
    fn zero_absorbs() {
        let a = LogComplex::new(3.0, 1.0);
        assert!(LogComplex::ZERO.mul(a).is_zero());
        assert!(a.mul(LogComplex::ZERO).is_zero());
        let mut s = LogSum::new();
        s.add(LogComplex::ZERO);
        assert!(s.value().is_zero());
    }

    #[test]
    fn round_trip_within_double_range() {
        for &(lm, ph) in &[(0.0, 0.0), (-700.0, 1.3), (699.0, -3.0), (-1.0, 3.14159)] {
            let x = LogComplex::new(lm, ph);
            let back = LogComplex::from_complex(x.to_complex());
            assert_relative_eq!(back.log_mag, x.log_mag, epsilon = 1e-14 * lm.abs().max(1.0));
            assert_relative_eq!(back.phase, x.phase, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_stays_in_principal_range() {
        let x = LogComplex::new(0.0, 10.0 * std::f64::consts::PI + 0.1);
        assert!(x.phase > -std::f64::consts::PI && x.phase <= std::f64::consts::PI);
        assert_relative_eq!(x.phase, 0.1, epsilon = 1e-10);
    }

    #[test]
    fn logsum_handles_spread_magnitudes() {
        // e^{-600} + e^{-600} = 2 e^{-600}, plus a term 500 nats below
        let mut s = LogSum::new();
        s.add(LogComplex::new(-600.0, 0.0));
        s.add(LogComplex::new(-600.0, 0.0));
        s.add(LogComplex::new(-1100.0, 0.0));
        let v = s.value();
        assert_relative_eq!(v.log_mag, -600.0 + 2.0f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn logsum_cancellation() {
        let mut s = LogSum::new();
        s.add(LogComplex::new(-50.0, 0.0));
        s.add(LogComplex::new(-50.0, std::f64::consts::PI)); // the negative of the first
        let v = s.value();
        // exact cancellation up to rounding: far below the term scale
        assert!(v.is_zero() || v.log_mag < -50.0 - 30.0);
    }

    #[test]
    fn merge_matches_sequential_accumulation() {
        let terms: Vec<LogComplex> = (0..40)
            .map(|i| LogComplex::new(-3.0 * i as f64, 0.37 * i as f64))
            .collect();
        let mut all = LogSum::new();
        for t in &terms {
            all.add(*t);
        }
        let mut left = LogSum::new();
        let mut right = LogSum::new();
        for t in &terms[..17] {
            left.add(*t);
        }
        for t in &terms[17..] {
            right.add(*t);
        }
        left.merge(&right);
        assert_relative_eq!(left.value().log_mag, all.value().log_mag, max_relative = 1e-12);
        assert_relative_eq!(left.value().phase, all.value().phase, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn mul_associative_commutative(
            la in -500.0f64..500.0, pa in -3.0f64..3.0,
            lb in -500.0f64..500.0, pb in -3.0f64..3.0,
            lc in -500.0f64..500.0, pc in -3.0f64..3.0,
        ) {
            let (a, b, c) = (LogComplex::new(la, pa), LogComplex::new(lb, pb), LogComplex::new(lc, pc));
            let ab_c = a.mul(b).mul(c);
            let a_bc = a.mul(b.mul(c));
            prop_assert!((ab_c.log_mag - a_bc.log_mag).abs() <= 1e-12 * ab_c.log_mag.abs().max(1.0));
            let ba = b.mul(a);
            prop_assert!((a.mul(b).log_mag - ba.log_mag).abs() <= 1e-12 * ba.log_mag.abs().max(1.0));
            prop_assert!((a.mul(b).phase - ba.phase).abs() < 1e-9);
        }

        #[test]
        fn round_trip_random(lm in -690.0f64..690.0, ph in -3.1f64..3.1) {
            let x = LogComplex::new(lm, ph);
            let back = LogComplex::from_complex(x.to_complex());
            prop_assert!((back.log_mag - lm).abs() <= 1e-13 * lm.abs().max(1.0));
        }
    }
}
