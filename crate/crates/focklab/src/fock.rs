//! Kernels of the Gaussian-weighted space of entire functions on C^n, the
//! normalized kernel, the unitary weighted-translation action, and a
//! pointwise-growth bound used as a sanity oracle for symbol functions.
//!
//! Conventions: the inner product on points is linear in the first slot,
//! `<z, w> = sum z_j conj(w_j)`; the Gaussian measure is
//! `dmu = pi^{-n} e^{-|w|^2} dV(w)`; all kernel values are returned in the
//! log domain because `|k_z(zeta)|` spans e^{+-|z|^2/2}.

use crate::error::{LabError, Result};
use crate::logc::LogComplex;
use crate::point::CPoint;
use crate::quad::{gauss_weighted_integral, Classification, QuadratureConfig};

/// Weight exponent and integrability exponent for the growth-bound check.
#[derive(Clone, Copy, Debug)]
pub struct FockParams {
    pub alpha: f64,
    pub p: f64,
}

impl Default for FockParams {
    fn default() -> Self {
        FockParams { alpha: 1.0, p: 2.0 }
    }
}

impl FockParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.p > 0.0) {
            return Err(LabError::Config("alpha and p must be positive".into()));
        }
        Ok(())
    }
}

/// Reproducing kernel K_z(zeta) = e^{<zeta, z>}.
pub fn kernel(z: &CPoint, zeta: &CPoint) -> Result<LogComplex> {
    z.check_dim(zeta)?;
    let ip = zeta.inner(z);
    Ok(LogComplex::exp_of(ip.re, ip.im))
}

/// Normalized kernel k_z(zeta) = K_z(zeta) e^{-|z|^2/2}, a unit vector.
pub fn normalized_kernel(z: &CPoint, zeta: &CPoint) -> Result<LogComplex> {
    z.check_dim(zeta)?;
    let ip = zeta.inner(z);
    Ok(LogComplex::exp_of(ip.re - z.norm_sqr() / 2.0, ip.im))
}

/// Pairing of two normalized kernels,
/// <k_z, k_w> = e^{<w, z> - (|z|^2 + |w|^2)/2}; its magnitude is the
/// Gaussian off-diagonal factor e^{-|z-w|^2/2}.
pub fn kernel_pairing(z: &CPoint, w: &CPoint) -> Result<LogComplex> {
    z.check_dim(w)?;
    let ip = w.inner(z);
    Ok(LogComplex::exp_of(
        ip.re - (z.norm_sqr() + w.norm_sqr()) / 2.0,
        ip.im,
    ))
}

/// The weighted-translation unitary: (U_z f)(w) = f(z - w) k_z(w).
/// U_z is a self-inverse isometry of the space.
pub fn u_action<F>(z: &CPoint, f: F, w: &CPoint) -> Result<LogComplex>
where
    F: Fn(&CPoint) -> LogComplex,
{
    z.check_dim(w)?;
    let kz = normalized_kernel(z, w)?;
    Ok(f(&z.sub(w)).mul(kz))
}

/// Outcome of the pointwise growth-bound check.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// The computed integral norm of f.
    pub norm: f64,
    /// max over the grid of |f(z)| e^{-alpha |z|^2 / 2} / norm; the bound
    /// holds iff this is <= 1.
    pub max_ratio: f64,
    pub pass: bool,
    pub samples: usize,
}

/// Checks |f(z)| <= ||f|| e^{alpha |z|^2 / 2} on a deterministic grid, where
/// the norm is the Gaussian-weighted p-norm normalized so that ||1|| = 1:
/// ||f||^p = (p alpha / (2 pi))^n int |f|^p e^{-p alpha |w|^2 / 2} dV.
pub fn pointwise_bound_check<F>(
    f: F,
    n: usize,
    params: &FockParams,
    cfg: &QuadratureConfig,
) -> Result<BoundReport>
where
    F: Fn(&CPoint) -> LogComplex + Sync,
{
    params.validate()?;
    let (p, alpha) = (params.p, params.alpha);
    let verdict = gauss_weighted_integral(
        |w: &CPoint| LogComplex::new(p * f(w).log_mag, 0.0),
        n,
        -p * alpha / 2.0,
        &CPoint::zero(n),
        cfg,
    )?;
    if verdict.classification == Classification::Divergent {
        return Err(LabError::NormDiverged);
    }
    let log_norm_p =
        verdict.log_value + n as f64 * (p * alpha / std::f64::consts::TAU).ln();
    let log_norm = log_norm_p / p;

    let mut max_log_ratio = f64::NEG_INFINITY;
    let mut samples = 0;
    let radii = [0.0, 0.5, 1.0, 2.0, 3.0];
    for dir in crate::quad::default_rays(n) {
        for &r in &radii {
            let z = dir.scale_re(r);
            let lr = f(&z).log_mag - alpha * z.norm_sqr() / 2.0 - log_norm;
            if lr.is_nan() {
                return Err(LabError::NonFiniteSample { at: z.to_reals() });
            }
            max_log_ratio = max_log_ratio.max(lr);
            samples += 1;
        }
    }
    Ok(BoundReport {
        norm: log_norm.exp(),
        max_ratio: max_log_ratio.exp(),
        pass: max_log_ratio <= 1e-6,
        samples,
    })
}
