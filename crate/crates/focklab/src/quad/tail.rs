//! Integrals over the exterior (or interior) of a ball, plus exact Gaussian
//! tails.
//!
//! Exterior integrals use a polar change of variables around the ball center
//! with the radius ladder providing the truncation sequence. The angular rule
//! is a periodic trapezoid whose point count scales with the circumference,
//! since an off-center Gaussian bump of unit width occupies an angular window
//! of only ~1/radius.
//!
//! For integrands that are exactly off-center Gaussians the exterior mass has
//! a closed form in terms of the Marcum Q function; `log_gaussian_tail`
//! evaluates it in the log domain so separations of 40+ (tail masses like
//! e^{-800}) remain meaningful.

use crate::error::{LabError, Result};
use crate::logc::{LogComplex, LogSum};
use crate::point::CPoint;
use crate::quad::integrate::{Classification, IntegralVerdict, QuadratureConfig};
use crate::quad::rules::legendre_on;
use num_complex::Complex64;

fn angular_count(radius: f64) -> usize {
    ((13.0 * radius).ceil() as usize).clamp(64, 2048)
}

/// Integral of f over {|w - center| >= r} in C^n (n = 1 or 2), with ladder
/// classification on the outer truncation radius.
pub fn tail_integral<F>(
    f: F,
    n: usize,
    center: &CPoint,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralVerdict>
where
    F: Fn(&CPoint) -> LogComplex + Sync,
{
    cfg.validate()?;
    center.check_n(n)?;
    if r < 0.0 {
        return Err(LabError::Config("tail radius must be >= 0".into()));
    }
    if n > 2 {
        return Err(LabError::Config(
            "tail_integral supports n = 1 and n = 2".into(),
        ));
    }

    let mut log_partials = Vec::with_capacity(cfg.radius_ladder.len());
    let mut ladder_values = Vec::with_capacity(cfg.radius_ladder.len());
    let mut cum = LogSum::new();
    let mut inner = r;
    for &step in &cfg.radius_ladder {
        let outer = r + step;
        let seg = if n == 1 {
            polar_segment(&f, center, inner, outer, cfg)?
        } else {
            hopf_segment(&f, center, inner, outer, cfg)?
        };
        cum.merge(&seg);
        let v = cum.value();
        log_partials.push(v.log_mag);
        ladder_values.push(v.to_complex().re);
        inner = outer;
    }

    let total = cum.value();
    let classification = classify_tail_ladder(&log_partials, cfg);
    let value = match classification {
        Classification::Divergent => f64::INFINITY,
        _ => total.to_complex().re,
    };
    Ok(IntegralVerdict {
        value,
        log_value: total.log_mag,
        total,
        classification,
        ladder_values,
    })
}

fn classify_tail_ladder(log_partials: &[f64], cfg: &QuadratureConfig) -> Classification {
    if log_partials.len() < 2 {
        return Classification::Inconclusive;
    }
    let total = *log_partials.last().unwrap();
    let mut log_incr = Vec::with_capacity(log_partials.len() - 1);
    for k in 1..log_partials.len() {
        let (hi, lo) = (log_partials[k], log_partials[k - 1]);
        if lo == f64::NEG_INFINITY {
            log_incr.push(hi);
        } else if hi <= lo {
            log_incr.push(f64::NEG_INFINITY);
        } else {
            log_incr.push(hi + (1.0 - (lo - hi).exp()).max(f64::MIN_POSITIVE).ln());
        }
    }
    let last = *log_incr.last().unwrap();
    let prev = log_incr[log_incr.len().saturating_sub(2)];
    if total == f64::NEG_INFINITY {
        return Classification::Converged; // identically zero tail
    }
    if last <= total + cfg.rel_tol.ln() && prev <= total + (cfg.rel_tol * 10.0).ln() {
        return Classification::Converged;
    }
    let lg = cfg.divergence_growth_factor.ln();
    let k = log_incr.len() - 1;
    if k >= 1
        && log_incr[k] > f64::NEG_INFINITY
        && log_incr[k] >= log_incr[k - 1] + lg
        && (k < 2 || log_incr[k - 1] >= log_incr[k - 2] + lg)
    {
        return Classification::Divergent;
    }
    Classification::Inconclusive
}

/// Annulus integral inner <= |w - center| <= outer for n = 1.
fn polar_segment<F>(
    f: &F,
    center: &CPoint,
    inner: f64,
    outer: f64,
    cfg: &QuadratureConfig,
) -> Result<LogSum>
where
    F: Fn(&CPoint) -> LogComplex + Sync,
{
    let radial = legendre_on(cfg.legendre_order, inner, outer);
    let ntheta = angular_count(outer);
    let dtheta = std::f64::consts::TAU / ntheta as f64;
    let c0 = center.coords()[0];
    let mut sum = LogSum::new();
    for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
        if rho <= 0.0 {
            continue;
        }
        for j in 0..ntheta {
            let th = dtheta * j as f64;
            let w = CPoint::scalar(c0 + Complex64::from_polar(rho, th));
            let lf = f(&w);
            if lf.log_mag.is_nan() || lf.phase.is_nan() {
                return Err(LabError::NonFiniteSample { at: w.to_reals() });
            }
            sum.add(LogComplex::new(
                lf.log_mag + rho.ln() + wr.ln() + dtheta.ln(),
                lf.phase,
            ));
        }
    }
    Ok(sum)
}

/// Shell integral for n = 2 via the Hopf-style parametrization
/// u = rho (e^{i a} cos h, e^{i b} sin h), dV = rho^3 cos h sin h drho dh da db.
fn hopf_segment<F>(
    f: &F,
    center: &CPoint,
    inner: f64,
    outer: f64,
    cfg: &QuadratureConfig,
) -> Result<LogSum>
where
    F: Fn(&CPoint) -> LogComplex + Sync,
{
    let radial = legendre_on(32.min(cfg.legendre_order), inner, outer);
    let eta = legendre_on(16, 0.0, std::f64::consts::FRAC_PI_2);
    let nang = ((4.0 * outer).ceil() as usize).clamp(24, 96);
    let dang = std::f64::consts::TAU / nang as f64;
    let mut sum = LogSum::new();
    for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
        if rho <= 0.0 {
            continue;
        }
        for (&h, &wh) in eta.nodes.iter().zip(&eta.weights) {
            let (ch, sh) = (h.cos(), h.sin());
            let jac = rho.powi(3) * ch * sh;
            if jac <= 0.0 {
                continue;
            }
            let log_jw = jac.ln() + wr.ln() + wh.ln() + 2.0 * dang.ln();
            for ja in 0..nang {
                let a = dang * ja as f64;
                let e1 = Complex64::from_polar(rho * ch, a);
                for jb in 0..nang {
                    let b = dang * jb as f64;
                    let e2 = Complex64::from_polar(rho * sh, b);
                    let w = CPoint::new(vec![
                        center.coords()[0] + e1,
                        center.coords()[1] + e2,
                    ])
                    .expect("dim ok");
                    let lf = f(&w);
                    if lf.log_mag.is_nan() || lf.phase.is_nan() {
                        return Err(LabError::NonFiniteSample { at: w.to_reals() });
                    }
                    sum.add(LogComplex::new(lf.log_mag + log_jw, lf.phase));
                }
            }
        }
    }
    Ok(sum)
}

/// Integral of f over the closed ball {|w - center| <= r}, n = 1 only.
pub fn ball_integral<F>(f: F, center: &CPoint, r: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(&CPoint) -> LogComplex + Sync,
{
    cfg.validate()?;
    center.check_n(1)?;
    if r < 0.0 {
        return Err(LabError::Config("ball radius must be >= 0".into()));
    }
    let sum = polar_segment(&f, center, 0.0, r, cfg)?;
    Ok(sum.value().to_complex().re)
}

// ── exact Gaussian tails via Marcum Q ──

/// ln I_nu(t) for nu in {0, 1}, t >= 0, in the log domain; series for small
/// t, large-argument asymptotics beyond.
pub fn log_bessel_i(nu: u32, t: f64) -> f64 {
    debug_assert!(nu <= 1);
    debug_assert!(t >= 0.0);
    if t == 0.0 {
        return if nu == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if t <= 30.0 {
        // I_nu(t) = (t/2)^nu sum_k (t^2/4)^k / (k! (k+nu)!), k = 0 term is 1
        let q = t * t / 4.0;
        let mut term = 1.0;
        let mut sum = term;
        for k in 1..200 {
            term *= q / (k as f64 * (k + nu as usize) as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        let norm = if nu == 1 { (t / 2.0).ln() } else { 0.0 };
        norm + sum.ln()
    } else {
        // I_nu(t) ~ e^t / sqrt(2 pi t) * (1 - (4nu^2-1)/(8t) + ...)
        let mu = 4.0 * (nu as f64) * (nu as f64);
        let x = 8.0 * t;
        let corr = 1.0 - (mu - 1.0) / x + (mu - 1.0) * (mu - 9.0) / (2.0 * x * x)
            - (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / (6.0 * x * x * x);
        t - 0.5 * (std::f64::consts::TAU * t).ln() + corr.ln()
    }
}

/// ln Q_n(a, b): generalized Marcum Q of integer order n in {1, 2}, the
/// probability that a 2n-dimensional standard Gaussian centered at distance
/// `a` from the origin lands outside radius `b`.
pub fn log_marcum_q(n: u32, a: f64, b: f64) -> f64 {
    debug_assert!(n == 1 || n == 2);
    debug_assert!(a >= 0.0 && b >= 0.0);
    if b == 0.0 {
        return 0.0;
    }
    if a < 1e-12 {
        // central case: Q_n(0,b) = e^{-b^2/2} sum_{k<n} (b^2/2)^k / k!
        let h = b * b / 2.0;
        let poly: f64 = match n {
            1 => 1.0,
            _ => 1.0 + h,
        };
        return -h + poly.ln();
    }
    // integrand x (x/a)^{n-1} e^{-(x^2+a^2)/2} I_{n-1}(a x) on [b, hi]
    let hi = a.max(b) + 45.0;
    let mut sum = LogSum::new();
    let seg_w = 1.5;
    let mut lo = b;
    while lo < hi {
        let up = (lo + seg_w).min(hi);
        let rule = legendre_on(24, lo, up);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if x <= 0.0 {
                continue;
            }
            let log_val = x.ln()
                + (n - 1) as f64 * (x.ln() - a.ln())
                - (x * x + a * a) / 2.0
                + log_bessel_i(n - 1, a * x)
                + w.ln();
            sum.add(LogComplex::new(log_val, 0.0));
        }
        lo = up;
    }
    sum.value().log_mag.min(0.0)
}

/// ln of the exterior Gaussian mass
/// int_{|w - z| >= r} e^{-|w - m|^2 / 2} dV(w) = (2 pi)^n Q_n(|z - m|, r)
/// over C^n.
pub fn log_gaussian_tail(n: u32, dist: f64, r: f64) -> f64 {
    n as f64 * std::f64::consts::TAU.ln() + log_marcum_q(n, dist, r)
}
