//! Diagonal operators supported on the lacunary powers 2^m (n = 1): the
//! coefficient-sequence catalog, the envelope function F behind the
//! non-compactness example, and the kernel-pairing series. Factorials of the
//! lacunary degrees overflow f64 almost immediately, so every sum runs in
//! the log domain.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::logc::{LogComplex, LogSum};
use num_complex::Complex64;

/// Coefficient sequence gamma_m attached to the monomial degree 2^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaSpec {
    Constant { value: f64 },
    /// gamma_m = value * ratio^m, |ratio| <= 1 so the sequence stays bounded.
    Geometric { value: f64, ratio: f64 },
    /// Listed head, then `tail` for every later index.
    Explicit { values: Vec<f64>, tail: f64 },
}

impl GammaSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            GammaSpec::Constant { value } => value.is_finite(),
            GammaSpec::Geometric { value, ratio } => {
                value.is_finite() && ratio.is_finite() && ratio.abs() <= 1.0
            }
            GammaSpec::Explicit { values, tail } => {
                tail.is_finite() && values.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::InvalidSpec(
                "lacunary coefficients must be finite and bounded".into(),
            ))
        }
    }

    pub fn gamma(&self, m: usize) -> f64 {
        match self {
            GammaSpec::Constant { value } => *value,
            GammaSpec::Geometric { value, ratio } => value * ratio.powi(m as i32),
            GammaSpec::Explicit { values, tail } => values.get(m).copied().unwrap_or(*tail),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            GammaSpec::Constant { value } => value.abs(),
            GammaSpec::Geometric { value, .. } => value.abs(),
            GammaSpec::Explicit { values, tail } => values
                .iter()
                .map(|v| v.abs())
                .fold(tail.abs(), f64::max),
        }
    }
}

// ── log-factorials of lacunary degrees ──

/// ln k!. Exact cumulative sum up to 256; Stirling with three correction
/// terms beyond (relative error < 1e-15 there).
fn ln_factorial(k: u64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    if k <= 256 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64;
    let tau = std::f64::consts::TAU;
    x * x.ln() - x + 0.5 * (tau * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Term count safeguard: degree 2^m at m = 55 already dwarfs any t this
/// laboratory evaluates.
const MAX_LACUNARY_INDEX: usize = 55;

/// F(t) = e^{-t} sum_m t^{2^m} / (2^m)!, the Berezin profile of the
/// unit-coefficient lacunary operator at t = |z|^2. Terms below
/// tol * max-term are dropped once the degree passes the Poisson peak at t.
pub fn lacunary_f(t: f64, tol: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LabError::Config("lacunary argument must be finite and >= 0".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(LabError::Config("truncation tolerance must be in (0, 1)".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let log_tol = tol.ln();
    let mut sum = LogSum::new();
    let mut max_log = f64::NEG_INFINITY;
    for m in 0..=MAX_LACUNARY_INDEX {
        let degree = 1u64 << m;
        let log_term = degree as f64 * t.ln() - ln_factorial(degree) - t;
        max_log = max_log.max(log_term);
        sum.add(LogComplex::new(log_term, 0.0));
        if degree as f64 > t && log_term < max_log + log_tol {
            return Ok(sum.value().mag());
        }
    }
    Err(LabError::ConvergenceFailure(format!(
        "lacunary series not past its peak after {MAX_LACUNARY_INDEX} terms (t = {t})"
    )))
}

/// sum_m gamma_m u^{2^m} / (2^m)! with u = conj(z) w; the kernel pairing is
/// this times e^{-(|z|^2+|w|^2)/2}. Truncated when log-terms fall 60 nats
/// below the running max past the series peak.
pub fn series_pairing(gamma: &GammaSpec, u: Complex64) -> Result<LogComplex> {
    gamma.validate()?;
    let r = u.norm();
    let sup = gamma.sup_abs();
    if r == 0.0 || sup == 0.0 {
        return Ok(LogComplex::ZERO);
    }
    let (log_r, arg) = (r.ln(), u.arg());
    let log_sup = sup.ln();
    let mut sum = LogSum::new();
    let mut max_log = f64::NEG_INFINITY;
    for m in 0..=MAX_LACUNARY_INDEX {
        let degree = 1u64 << m;
        // bound on this and (past the peak) every later term, independent of
        // individual gamma_m zeros
        let envelope = log_sup + degree as f64 * log_r - ln_factorial(degree);
        let g = gamma.gamma(m);
        if g != 0.0 {
            let log_term = g.abs().ln() + degree as f64 * log_r - ln_factorial(degree);
            let phase = degree as f64 * arg + if g < 0.0 { std::f64::consts::PI } else { 0.0 };
            sum.add(LogComplex::new(log_term, phase));
            max_log = max_log.max(log_term);
        }
        // the term envelope peaks where the degree crosses |u|
        if degree as f64 > r && envelope < max_log - 60.0 {
            return Ok(sum.value());
        }
    }
    Err(LabError::ConvergenceFailure(format!(
        "lacunary pairing series not past its peak after {MAX_LACUNARY_INDEX} terms (|u| = {r})"
    )))
}
