//! Bounded-vs-divergent classification of a functional sampled on rays.
//!
//! The suprema of interest run over all of C^n; the classifier approximates
//! them by sampling along a fixed set of unit directions at the ladder radii
//! (plus the origin, always). Every in-scope divergent functional grows like
//! e^{c R^2} along some ray, so superlinear growth of the log across the last
//! three radii is the divergence signature; a merely linear-in-R log (growth
//! like e^{cR}) stays inconclusive.

use crate::error::{LabError, Result};
use crate::point::CPoint;

/// Verdict on sup_z q(z).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "estimate")]
pub enum SupVerdict {
    /// Sampled max stabilized; the estimate is the max over all samples.
    Bounded(f64),
    Divergent,
    Inconclusive,
}

/// Classify sup of q over rays. `q` must return the functional's value
/// (nonnegative; +inf allowed and treated as divergence evidence).
pub fn classify_sup_over_rays<F>(
    q: F,
    n: usize,
    ray_directions: &[CPoint],
    radius_ladder: &[f64],
) -> Result<SupVerdict>
where
    F: Fn(&CPoint) -> f64 + Sync,
{
    if ray_directions.is_empty() {
        return Err(LabError::Config("ray set must be non-empty".into()));
    }
    if radius_ladder.len() < 3 || radius_ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Config(
            "radius ladder must be strictly increasing with at least 3 rungs".into(),
        ));
    }
    for d in ray_directions {
        d.check_n(n)?;
        if (d.norm() - 1.0).abs() > 1e-9 {
            return Err(LabError::Config("ray directions must be unit vectors".into()));
        }
    }

    let eval = |z: &CPoint| -> Result<f64> {
        let v = q(z);
        if v.is_nan() {
            return Err(LabError::NonFiniteSample { at: z.to_reals() });
        }
        Ok(v)
    };

    let origin_val = eval(&CPoint::zero(n))?;
    let mut all_max = origin_val;
    let mut prev_max = origin_val; // max over radii strictly below the top rung
    let mut last_max = f64::NEG_INFINITY; // max at the top rung
    let m = radius_ladder.len();

    for dir in ray_directions {
        let vals: Vec<f64> = radius_ladder
            .iter()
            .map(|&r| eval(&dir.scale_re(r)))
            .collect::<Result<_>>()?;
        if vals.iter().any(|v| v.is_infinite()) {
            return Ok(SupVerdict::Divergent);
        }
        for (k, &v) in vals.iter().enumerate() {
            all_max = all_max.max(v);
            if k + 1 < m {
                prev_max = prev_max.max(v);
            } else {
                last_max = last_max.max(v);
            }
        }
        // log slopes across the last three rungs
        let lg = |x: f64| x.max(1e-300).ln();
        let (r0, r1, r2) = (radius_ladder[m - 3], radius_ladder[m - 2], radius_ladder[m - 1]);
        let s1 = (lg(vals[m - 2]) - lg(vals[m - 3])) / (r1 - r0);
        let s2 = (lg(vals[m - 1]) - lg(vals[m - 2])) / (r2 - r1);
        if s1 > 0.0 && s2 >= (1.1 * s1).max(0.05) {
            return Ok(SupVerdict::Divergent);
        }
    }

    if last_max <= prev_max * (1.0 + 1e-6) + 1e-300 {
        Ok(SupVerdict::Bounded(all_max))
    } else {
        Ok(SupVerdict::Inconclusive)
    }
}

/// Default ray set: 16 phase directions for n = 1, 32 hashed unit vectors
/// plus complex axes for n >= 2.
pub fn default_rays(n: usize) -> Vec<CPoint> {
    crate::quad::integrate::probe_directions(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> Vec<f64> {
        vec![4.0, 6.0, 8.0, 10.0, 12.0]
    }

    #[test]
    fn decaying_gaussian_is_bounded_with_estimate_one() {
        let v = classify_sup_over_rays(
            |z: &CPoint| (-z.norm_sqr()).exp(),
            1,
            &default_rays(1),
            &ladder(),
        )
        .unwrap();
        match v {
            SupVerdict::Bounded(est) => assert!((est - 1.0).abs() < 1e-12),
            other => panic!("expected bounded, got {other:?}"),
        }
    }

    #[test]
    fn slow_quadratic_growth_is_divergent() {
        let v = classify_sup_over_rays(
            |z: &CPoint| (0.01 * z.norm_sqr()).exp(),
            1,
            &default_rays(1),
            &ladder(),
        )
        .unwrap();
        assert_eq!(v, SupVerdict::Divergent);
    }

    #[test]
    fn affine_symbol_exponent_above_threshold_diverges() {
        // growth exponent 0.9375 |z|^2 arises for the scalar symbol a = 0.5
        // at p = 3, above the finiteness threshold 4/(1 + 0.5)
        let v = classify_sup_over_rays(
            |z: &CPoint| (0.9375 * z.norm_sqr()).exp(),
            1,
            &default_rays(1),
            &ladder(),
        )
        .unwrap();
        assert_eq!(v, SupVerdict::Divergent);
    }

    #[test]
    fn constant_functional_is_bounded() {
        let v = classify_sup_over_rays(|_: &CPoint| 2.75, 1, &default_rays(1), &ladder()).unwrap();
        assert_eq!(v, SupVerdict::Bounded(2.75));
    }

    #[test]
    fn linear_log_growth_is_inconclusive() {
        let v = classify_sup_over_rays(
            |z: &CPoint| (0.2 * z.norm()).exp(),
            1,
            &default_rays(1),
            &ladder(),
        )
        .unwrap();
        assert_eq!(v, SupVerdict::Inconclusive);
    }

    #[test]
    fn infinite_sample_is_divergent() {
        let v = classify_sup_over_rays(
            |z: &CPoint| {
                if z.norm() > 9.0 {
                    f64::INFINITY
                } else {
                    1.0
                }
            },
            1,
            &default_rays(1),
            &ladder(),
        )
        .unwrap();
        assert_eq!(v, SupVerdict::Divergent);
    }

    #[test]
    fn nan_sample_is_an_error() {
        let r = classify_sup_over_rays(|_: &CPoint| f64::NAN, 1, &default_rays(1), &ladder());
        assert!(matches!(r, Err(LabError::NonFiniteSample { .. })));
    }

    #[test]
    fn two_dim_rays_cover_axes() {
        let rays = default_rays(2);
        assert!(rays.len() >= 32);
        for r in &rays {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
        let v = classify_sup_over_rays(
            |z: &CPoint| (-z.norm_sqr()).exp(),
            2,
            &rays,
            &ladder(),
        )
        .unwrap();
        assert!(matches!(v, SupVerdict::Bounded(_)));
    }
}
