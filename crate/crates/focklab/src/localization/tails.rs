//! Tail mass of a pairing row outside balls, and the weak-localization probe.
//!
//! `wl_tail` integrates |<T k_z, k_w>| over {|w - z| >= r}. For the families
//! whose pairing magnitude is an off-center Gaussian in w (identity,
//! translation, dilation, affine composition) the tail is exact through the
//! Gaussian exterior mass; every other family integrates the pairing over the
//! ball exterior directly, truncated at r + 9.5 where the remaining mass is
//! below quadrature noise for all catalog symbols.
//!
//! The probe scans both the operator row and the adjoint row (the pairing
//! with its arguments swapped): one-sided decay does not rule out an operator
//! that moves kernel mass, and the swapped row is what catches it.

use crate::error::{LabError, Result};
use crate::logc::LogComplex;
use crate::operators::{pairing, OperatorSpec};
use crate::point::CPoint;
use crate::quad::{log_gaussian_tail, tail_integral, Classification, QuadratureConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Mutex;

/// Tail curves vanish when the final rung is below this fraction of the
/// initial mass (and the curve is monotone); they persist at or above
/// `WL_PERSIST_RATIO`. The gap in between is reported as inconclusive.
pub const WL_VANISH_RATIO: f64 = 1e-3;
pub const WL_PERSIST_RATIO: f64 = 0.1;

#[derive(Clone, Copy, PartialEq, Eq)]
enum TailSide {
    Direct,
    Swapped,
}

// e^{log_c} e^{-|w - m|^2 / 2}: the pairing row magnitude, when Gaussian.
struct GaussProfile {
    m: CPoint,
    log_c: f64,
}

fn gaussian_profile(op: &OperatorSpec, z: &CPoint, side: TailSide) -> Option<GaussProfile> {
    match op {
        OperatorSpec::Identity => Some(GaussProfile { m: z.clone(), log_c: 0.0 }),
        OperatorSpec::Translation { a } => {
            let m = match side {
                TailSide::Direct => z.add(a),
                TailSide::Swapped => z.sub(a),
            };
            Some(GaussProfile { m, log_c: 0.0 })
        }
        OperatorSpec::Dilation { r } => Some(GaussProfile {
            // self-adjoint: both rows complete the square the same way
            m: z.scale_re(-*r),
            log_c: (r * r - 1.0) * z.norm_sqr() / 2.0,
        }),
        OperatorSpec::AffineComposition { a, b } => match side {
            TailSide::Direct => {
                let m = a.adjoint().apply(z);
                let log_c = (m.norm_sqr() - z.norm_sqr()) / 2.0 + b.inner(z).re;
                Some(GaussProfile { m, log_c })
            }
            TailSide::Swapped => {
                let m = a.apply(z).add(b);
                let log_c = (m.norm_sqr() - z.norm_sqr()) / 2.0;
                Some(GaussProfile { m, log_c })
            }
        },
        _ => None,
    }
}

// Mass center of the direct pairing row, for families whose row is an
// exact Gaussian. The decay sampler chases this center to build pairs
// along which the pairing refuses to decay.
pub(crate) fn direct_mass_center(op: &OperatorSpec, z: &CPoint) -> Option<CPoint> {
    gaussian_profile(op, z, TailSide::Direct).map(|gp| gp.m)
}

fn exterior_tail_config(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        legendre_order: cfg.legendre_order.min(32),
        radius_ladder: vec![4.5, 9.5],
        ..cfg.clone()
    }
}

// Integral of the pairing row magnitude over {|w - z| >= r} by exterior
// quadrature; used when no Gaussian profile applies.
fn exterior_pairing_mass(
    op: &OperatorSpec,
    z: &CPoint,
    r: f64,
    side: TailSide,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = op.dim().unwrap_or(z.n());
    let tcfg = exterior_tail_config(cfg);
    let err: Mutex<Option<LabError>> = Mutex::new(None);
    let f = |w: &CPoint| -> LogComplex {
        let pv = match side {
            TailSide::Direct => pairing(op, z, w, cfg),
            TailSide::Swapped => pairing(op, w, z, cfg),
        };
        match pv {
            Ok(v) => v.value.abs(),
            Err(e) => {
                err.lock().unwrap().get_or_insert(e);
                LogComplex::ZERO
            }
        }
    };
    let verdict = tail_integral(f, n, z, r, &tcfg)?;
    if let Some(e) = err.into_inner().unwrap() {
        return Err(e);
    }
    Ok(match verdict.classification {
        Classification::Divergent => f64::INFINITY,
        _ => verdict.value.max(0.0),
    })
}

fn wl_tail_side(
    op: &OperatorSpec,
    z: &CPoint,
    r: f64,
    side: TailSide,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if r < 0.0 {
        return Err(LabError::Config("tail radius must be >= 0".into()));
    }
    if let Some(n) = op.dim() {
        z.check_n(n)?;
    }
    if let Some(gp) = gaussian_profile(op, z, side) {
        let n = z.n() as u32;
        let dist = z.dist_sqr(&gp.m).sqrt();
        return Ok((gp.log_c + log_gaussian_tail(n, dist, r)).exp());
    }
    exterior_pairing_mass(op, z, r, side, cfg)
}

/// int_{|w - z| >= r} |<T k_z, k_w>| dV(w). For the identity at any z this is
/// (2 pi)^n e^{-r^2/2}.
pub fn wl_tail(op: &OperatorSpec, z: &CPoint, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    op.validate()?;
    wl_tail_side(op, z, r, TailSide::Direct, cfg)
}

/// Same tail for the swapped row |<T k_w, k_z>|, i.e. the direct tail of the
/// adjoint.
pub fn wl_tail_swapped(
    op: &OperatorSpec,
    z: &CPoint,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    op.validate()?;
    wl_tail_side(op, z, r, TailSide::Swapped, cfg)
}

/// Verdict of the weak-localization probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WlVerdict {
    /// Both rows' tail curves decrease monotonically to below
    /// `WL_VANISH_RATIO` of their initial mass.
    Wl,
    /// Some row keeps at least `WL_PERSIST_RATIO` of its initial mass at the
    /// final radius.
    NotWl,
    Inconclusive,
}

/// Sup-over-z tail curves for both pairing rows, with the band verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WlProbe {
    pub r_ladder: Vec<f64>,
    /// sup over the z-sample set of wl_tail(op, z, r), per rung.
    pub direct_curve: Vec<f64>,
    pub swapped_curve: Vec<f64>,
    pub verdict: WlVerdict,
}

enum SideBand {
    Vanishing,
    Persisting,
    Ambiguous,
}

fn side_band(curve: &[f64]) -> SideBand {
    if curve.iter().any(|v| !v.is_finite()) {
        return SideBand::Persisting; // a divergent tail certainly does not vanish
    }
    let initial = curve[0];
    let fin = *curve.last().unwrap();
    if initial <= 1e-300 {
        return SideBand::Ambiguous;
    }
    let monotone = curve
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-6) + 1e-300);
    if monotone && fin < WL_VANISH_RATIO * initial {
        SideBand::Vanishing
    } else if fin >= WL_PERSIST_RATIO * initial {
        SideBand::Persisting
    } else {
        SideBand::Ambiguous
    }
}

/// z-sample set for the sup: the origin plus every ray at a spread of radii.
/// The far sample at 2.5x the ladder top catches operators that move kernel
/// mass a long way (their tails only stop vanishing far out). Families whose
/// pairing needs inner quadrature sample a thinner grid to stay tractable.
pub fn wl_sample_points(
    op: &OperatorSpec,
    rays: &[CPoint],
    cfg: &QuadratureConfig,
) -> Vec<CPoint> {
    let n = rays.first().map_or(1, CPoint::n);
    let mut radii: Vec<f64>;
    let rays_used: Vec<&CPoint>;
    if pairing_needs_inner_quadrature(op) {
        radii = vec![4.0, 8.0, 12.0];
        rays_used = rays.iter().step_by(2).collect();
    } else {
        radii = cfg.radius_ladder.clone();
        let rmax = radii.last().copied().unwrap_or(12.0);
        radii.push(2.5 * rmax);
        rays_used = rays.iter().collect();
    }
    let mut pts = vec![CPoint::zero(n)];
    for u in rays_used {
        for &s in &radii {
            pts.push(u.scale_re(s));
        }
    }
    pts
}

/// Whether evaluating one pairing costs an inner quadrature (convolution
/// symbols built from line integrals, measures with a density or lattice).
pub fn pairing_needs_inner_quadrature(op: &OperatorSpec) -> bool {
    use crate::symbols::{MeasureSpec, PhiSpec};
    match op {
        OperatorSpec::ConvolutionSymbol { phi } => matches!(
            phi,
            PhiSpec::FromDensity { .. } | PhiSpec::FromMultiplier { .. }
        ),
        OperatorSpec::ToeplitzMeasure { measure } => matches!(
            measure,
            MeasureSpec::Density { .. } | MeasureSpec::Lattice { .. }
        ),
        _ => false,
    }
}

/// Weak-localization probe: sup-tail curves over the sampled z-set at each
/// rung of `r_ladder`, for the operator row and the swapped row.
pub fn wl_probe(
    op: &OperatorSpec,
    r_ladder: &[f64],
    rays: &[CPoint],
    cfg: &QuadratureConfig,
) -> Result<WlProbe> {
    op.validate()?;
    if r_ladder.len() < 2 || r_ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Config(
            "wl radius ladder must be strictly increasing with at least 2 rungs".into(),
        ));
    }
    if r_ladder[0] < 0.0 {
        return Err(LabError::Config("wl radii must be >= 0".into()));
    }
    if rays.is_empty() {
        return Err(LabError::Config("ray set must be non-empty".into()));
    }
    let n = op.dim().unwrap_or_else(|| rays[0].n());
    for u in rays {
        u.check_n(n)?;
        if (u.norm() - 1.0).abs() > 1e-9 {
            return Err(LabError::Config("ray directions must be unit vectors".into()));
        }
    }

    let samples = wl_sample_points(op, rays, cfg);
    let mut curves = [Vec::new(), Vec::new()];
    for (idx, side) in [TailSide::Direct, TailSide::Swapped].into_iter().enumerate() {
        let rows: Vec<Vec<f64>> = samples
            .par_iter()
            .map(|z| -> Result<Vec<f64>> {
                r_ladder
                    .iter()
                    .map(|&r| wl_tail_side(op, z, r, side, cfg))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut curve = vec![f64::NEG_INFINITY; r_ladder.len()];
        for row in &rows {
            for (c, v) in curve.iter_mut().zip(row) {
                *c = c.max(*v);
            }
        }
        curves[idx] = curve;
    }
    let [direct_curve, swapped_curve] = curves;

    let verdict = match (side_band(&direct_curve), side_band(&swapped_curve)) {
        (SideBand::Persisting, _) | (_, SideBand::Persisting) => WlVerdict::NotWl,
        (SideBand::Vanishing, SideBand::Vanishing) => WlVerdict::Wl,
        _ => WlVerdict::Inconclusive,
    };
    Ok(WlProbe {
        r_ladder: r_ladder.to_vec(),
        direct_curve,
        swapped_curve,
        verdict,
    })
}
