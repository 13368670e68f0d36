//! The operator-family catalog. Every diagnostic in the laboratory is
//! driven by an `OperatorSpec`: a tagged union naming one family plus its
//! parameters, with a canonical JSON form (tag `family`, complex scalars as
//! [re, im] pairs). The pairing <T k_z, k_w> has a closed form for every
//! family except measure densities, which fall back to quadrature.

pub mod composition;
pub mod lacunary;

use serde::{Deserialize, Serialize};

use crate::cmatrix::CMatrix;
use crate::error::{LabError, Result};
use crate::fock::{kernel_pairing, normalized_kernel};
use crate::logc::LogComplex;
use crate::point::CPoint;
use crate::quad::{gauss_weighted_integral, QuadratureConfig};
use crate::symbols::{MeasureSpec, PhiSpec};

pub use composition::{
    boundedness_gate, composition_exponent_g, dilation_plocalization_closed_form,
    svd_localization_verdict, Boundedness, LpMembership, LpVerdict,
};
pub use lacunary::{lacunary_f, series_pairing, GammaSpec};

/// One operator family with its parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity,
    /// Weighted translation f -> f(. - a) k_a.
    Translation { a: CPoint },
    /// Reflected dilation f -> f(-r .), one variable.
    Dilation { r: f64 },
    /// Composition f -> f(A . + B); must pass the boundedness gate.
    AffineComposition { a: CMatrix, b: CPoint },
    /// Diagonal operator on the monomials of degree 2^m, one variable.
    Lacunary { gamma: GammaSpec },
    /// Kernel-integral operator with convolution-type symbol phi, one
    /// variable.
    ConvolutionSymbol { phi: PhiSpec },
    /// Kernel-integral operator against a positive-type measure.
    ToeplitzMeasure { measure: MeasureSpec },
}

impl OperatorSpec {
    /// Structural invariants, including the boundedness gate for
    /// composition symbols: no diagnostic runs on an unbounded operator.
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::Identity | OperatorSpec::Translation { .. } => Ok(()),
            OperatorSpec::Dilation { r } => {
                if (0.0..1.0).contains(r) {
                    Ok(())
                } else {
                    Err(LabError::InvalidSpec("dilation parameter must lie in [0, 1)".into()))
                }
            }
            OperatorSpec::AffineComposition { a, b } => {
                b.check_n(a.n())?;
                match boundedness_gate(a, b)? {
                    Boundedness::Bounded => Ok(()),
                    Boundedness::Unbounded { witness } => {
                        Err(LabError::UnboundedOperator { witness })
                    }
                }
            }
            OperatorSpec::Lacunary { gamma } => gamma.validate(),
            OperatorSpec::ConvolutionSymbol { phi } => phi.validate(),
            OperatorSpec::ToeplitzMeasure { measure } => measure.validate(),
        }
    }

    /// Ambient dimension the family is defined on; None means any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::Identity => None,
            OperatorSpec::Translation { a } => Some(a.n()),
            OperatorSpec::Dilation { .. } => Some(1),
            OperatorSpec::AffineComposition { a, .. } => Some(a.n()),
            OperatorSpec::Lacunary { .. } => Some(1),
            OperatorSpec::ConvolutionSymbol { .. } => Some(1),
            OperatorSpec::ToeplitzMeasure { measure } => Some(measure.dim()),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            OperatorSpec::Identity => "identity",
            OperatorSpec::Translation { .. } => "translation",
            OperatorSpec::Dilation { .. } => "dilation",
            OperatorSpec::AffineComposition { .. } => "affine_composition",
            OperatorSpec::Lacunary { .. } => "lacunary",
            OperatorSpec::ConvolutionSymbol { .. } => "convolution_symbol",
            OperatorSpec::ToeplitzMeasure { .. } => "toeplitz_measure",
        }
    }

    fn check_point(&self, z: &CPoint) -> Result<()> {
        if let Some(n) = self.dim() {
            z.check_n(n)?;
        }
        Ok(())
    }

    /// The adjoint as a catalog member, where it is one: translations
    /// reverse the shift, convolution symbols reflect-conjugate, measures
    /// conjugate; dilations and real lacunary coefficients are self-adjoint.
    /// Affine compositions with drift have no catalog adjoint (their adjoint
    /// pairing is evaluated by the swap rule instead).
    pub fn adjoint_spec(&self) -> Option<OperatorSpec> {
        match self {
            OperatorSpec::Identity => Some(OperatorSpec::Identity),
            OperatorSpec::Translation { a } => {
                Some(OperatorSpec::Translation { a: a.scale_re(-1.0) })
            }
            OperatorSpec::Dilation { r } => Some(OperatorSpec::Dilation { r: *r }),
            OperatorSpec::AffineComposition { a, b } => {
                if b.norm() == 0.0 {
                    Some(OperatorSpec::AffineComposition { a: a.adjoint(), b: b.clone() })
                } else {
                    None
                }
            }
            OperatorSpec::Lacunary { gamma } => {
                Some(OperatorSpec::Lacunary { gamma: gamma.clone() })
            }
            OperatorSpec::ConvolutionSymbol { phi } => phi
                .adjoint_symbol()
                .map(|phi| OperatorSpec::ConvolutionSymbol { phi }),
            OperatorSpec::ToeplitzMeasure { measure } => {
                Some(OperatorSpec::ToeplitzMeasure { measure: measure.conjugated() })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMethod {
    ClosedForm,
    Quadrature,
}

/// A kernel pairing <T k_z, k_w> with its provenance and accuracy estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingValue {
    pub value: LogComplex,
    pub method: PairingMethod,
    pub est_rel_err: f64,
}

fn closed(value: LogComplex, est_rel_err: f64) -> PairingValue {
    PairingValue { value, method: PairingMethod::ClosedForm, est_rel_err }
}

/// <T k_z, k_w> for the family described by `op`. The quadrature config is
/// only consulted by measure densities.
pub fn pairing(
    op: &OperatorSpec,
    z: &CPoint,
    w: &CPoint,
    cfg: &QuadratureConfig,
) -> Result<PairingValue> {
    op.validate()?;
    op.check_point(z)?;
    z.check_dim(w)?;
    match op {
        OperatorSpec::Identity => Ok(closed(kernel_pairing(z, w)?, 1e-15)),
        OperatorSpec::Translation { a } => {
            // V_a k_z = e^{-i Im<a, z>} k_{z + a}
            let phase = -a.inner(z).im;
            let v = kernel_pairing(&z.add(a), w)?.mul(LogComplex::exp_of(0.0, phase));
            Ok(closed(v, 1e-15))
        }
        OperatorSpec::Dilation { r } => {
            let ip = w.inner(&z.scale_re(-*r));
            let v = LogComplex::exp_of(ip.re - (z.norm_sqr() + w.norm_sqr()) / 2.0, ip.im);
            Ok(closed(v, 1e-15))
        }
        OperatorSpec::AffineComposition { a, b } => {
            // <C k_z, k_w> = e^{-(|z|^2+|w|^2)/2} e^{<w, A* z> + <B, z>}
            let ip = w.inner(&a.adjoint().apply(z)) + b.inner(z);
            let v = LogComplex::exp_of(ip.re - (z.norm_sqr() + w.norm_sqr()) / 2.0, ip.im);
            Ok(closed(v, 1e-14))
        }
        OperatorSpec::Lacunary { gamma } => {
            let u = z.as_scalar().conj() * w.as_scalar();
            let series = series_pairing(gamma, u)?;
            Ok(closed(series.scale_mag(-(z.norm_sqr() + w.norm_sqr()) / 2.0), 1e-13))
        }
        OperatorSpec::ConvolutionSymbol { phi } => {
            let arg = w.as_scalar() - z.as_scalar().conj();
            let v = kernel_pairing(z, w)?.mul(phi.eval(arg)?);
            Ok(closed(v, phi.eval_rel_err()))
        }
        OperatorSpec::ToeplitzMeasure { measure } => {
            let applied = measure.apply_to_normalized_kernel(z, w, cfg)?;
            let value = applied.scale_mag(-w.norm_sqr() / 2.0);
            Ok(match measure {
                MeasureSpec::Density { .. } => PairingValue {
                    value,
                    method: PairingMethod::Quadrature,
                    est_rel_err: cfg.rel_tol.max(1e-12),
                },
                // finite or windowed sums are closed-form up to a Gaussian
                // window remainder far below float precision
                _ => closed(value, 1e-12),
            })
        }
    }
}

/// Berezin transform value <T k_z, k_z>.
pub fn berezin(op: &OperatorSpec, z: &CPoint, cfg: &QuadratureConfig) -> Result<LogComplex> {
    Ok(pairing(op, z, z, cfg)?.value)
}

/// (T k_z)(u) as an entire function of u, needed for the substitution side
/// of the pairing-integral identity.
pub fn apply_to_kz(
    op: &OperatorSpec,
    z: &CPoint,
    u: &CPoint,
    cfg: &QuadratureConfig,
) -> Result<LogComplex> {
    op.validate()?;
    op.check_point(z)?;
    z.check_dim(u)?;
    match op {
        OperatorSpec::Identity => normalized_kernel(z, u),
        OperatorSpec::Translation { a } => {
            let phase = -a.inner(z).im;
            Ok(normalized_kernel(&z.add(a), u)?.mul(LogComplex::exp_of(0.0, phase)))
        }
        OperatorSpec::Dilation { r } => normalized_kernel(z, &u.scale_re(-*r)),
        OperatorSpec::AffineComposition { a, b } => normalized_kernel(z, &a.apply(u).add(b)),
        OperatorSpec::Lacunary { gamma } => {
            let s = series_pairing(gamma, z.as_scalar().conj() * u.as_scalar())?;
            Ok(s.scale_mag(-z.norm_sqr() / 2.0))
        }
        OperatorSpec::ConvolutionSymbol { phi } => {
            let arg = u.as_scalar() - z.as_scalar().conj();
            Ok(normalized_kernel(z, u)?.mul(phi.eval(arg)?))
        }
        OperatorSpec::ToeplitzMeasure { measure } => {
            measure.apply_to_normalized_kernel(z, u, cfg)
        }
    }
}

/// Log of the normalized weighted pairing integral
/// pi^{-n} int |<T k_z, k_w>|^p e^{(p/2-1)|z-w|^2} dV(w), for the families
/// with a closed form. Translations are z-free; dilations and compositions
/// depend on z through their exponent.
pub fn eq31_log_closed_form(op: &OperatorSpec, z: &CPoint, p: f64) -> Result<Option<f64>> {
    op.validate()?;
    op.check_point(z)?;
    Ok(match op {
        OperatorSpec::Identity => Some(0.0),
        OperatorSpec::Translation { a } => Some(p * (p - 2.0) * a.norm_sqr() / 4.0),
        OperatorSpec::Dilation { r } => {
            Some(-p * (1.0 + r) * z.norm_sqr() * (1.0 - (1.0 + r) * p / 4.0))
        }
        OperatorSpec::AffineComposition { a, b } => Some(composition_exponent_g(a, b, z, p)?),
        _ => None,
    })
}

/// Where the weighted pairing integrand concentrates, per family; quadrature
/// seeds start here.
pub fn eq31_center_seed(op: &OperatorSpec, z: &CPoint, p: f64) -> CPoint {
    match op {
        OperatorSpec::Translation { a } => z.add(&a.scale_re(p / 2.0)),
        OperatorSpec::Dilation { r } => z.scale_re(-(r * p / 2.0 + p / 2.0 - 1.0)),
        OperatorSpec::AffineComposition { a, .. } => {
            // the Gaussian substitution centers at (p/2) A* z - (p/2 - 1) z
            a.adjoint().apply(z).scale_re(p / 2.0).sub(&z.scale_re(p / 2.0 - 1.0))
        }
        _ => z.clone(),
    }
}

/// <T k_z, k_w> recomputed as int (T k_z)(v) conj(k_w(v)) dmu(v) by raw
/// quadrature, bypassing every closed form. Slow; exists to cross-check the
/// closed forms and the measure path.
pub fn pairing_by_quadrature(
    op: &OperatorSpec,
    z: &CPoint,
    w: &CPoint,
    cfg: &QuadratureConfig,
) -> Result<LogComplex> {
    op.validate()?;
    op.check_point(z)?;
    z.check_dim(w)?;
    // where |(T k_z)(v) k_w(v)| e^{-|v|^2} peaks, per family
    let center = match op {
        OperatorSpec::Translation { a } => w.add(z).add(a).scale_re(0.5),
        OperatorSpec::Dilation { r } => w.sub(&z.scale_re(*r)).scale_re(0.5),
        OperatorSpec::AffineComposition { a, .. } => {
            w.add(&a.adjoint().apply(z)).scale_re(0.5)
        }
        _ => w.add(z).scale_re(0.5),
    };
    let n = z.n();
    let f = |v: &CPoint| -> LogComplex {
        let lhs = match apply_to_kz(op, z, v, cfg) {
            Ok(x) => x,
            Err(_) => return LogComplex::ZERO,
        };
        let kw = match normalized_kernel(w, v) {
            Ok(x) => x,
            Err(_) => return LogComplex::ZERO,
        };
        lhs.mul(kw.conj()).scale_mag(-v.norm_sqr())
    };
    let verdict = gauss_weighted_integral(f, n, 0.0, &center, cfg)?;
    Ok(verdict.total.scale_mag(-(n as f64) * std::f64::consts::PI.ln()))
}

/// |Berezin| value below this counts as vanished along a ladder tail.
pub const BEREZIN_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BerezinVanish {
    /// |<T k_z, k_z>| fell and stayed below the floor on every sampled ray.
    Vanishes,
    /// Some ray kept |<T k_z, k_z>| above the floor across the whole ladder.
    Persists { ray: CPoint },
    Inconclusive,
}

/// Samples |<T k_z, k_z>| along rays at the ladder radii. The verdict is
/// relative to the sampled rays: a transform may vanish along every generic
/// direction yet persist along an exceptional one, and supplying that ray
/// flips the verdict.
pub fn berezin_vanish_probe(
    op: &OperatorSpec,
    rays: &[CPoint],
    ladder: &[f64],
    cfg: &QuadratureConfig,
) -> Result<BerezinVanish> {
    if rays.is_empty() {
        return Err(LabError::Config("ray set must be non-empty".into()));
    }
    if ladder.len() < 2
        || ladder[0] <= 0.0
        || ladder.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(LabError::Config(
            "radius ladder must be positive, strictly increasing, with at least 2 rungs".into(),
        ));
    }
    for ray in rays {
        if (ray.norm() - 1.0).abs() > 1e-9 {
            return Err(LabError::Config("rays must be unit vectors".into()));
        }
    }
    let mut all_vanish = true;
    for ray in rays {
        let vals = ladder
            .iter()
            .map(|&t| Ok(berezin(op, &ray.scale_re(t), cfg)?.mag()))
            .collect::<Result<Vec<f64>>>()?;
        if vals.iter().all(|&v| v >= BEREZIN_FLOOR) {
            return Ok(BerezinVanish::Persists { ray: ray.clone() });
        }
        let k = vals.len();
        if !(vals[k - 1] < BEREZIN_FLOOR && vals[k - 2] < BEREZIN_FLOOR) {
            all_vanish = false;
        }
    }
    Ok(if all_vanish { BerezinVanish::Vanishes } else { BerezinVanish::Inconclusive })
}

#[cfg(test)]
mod tests;
