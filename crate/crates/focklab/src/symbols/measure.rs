//! Measure symbols for the kernel-integral operators: finite atomic
//! measures, the square lattice, and a small catalog of radial densities
//! with declared growth. Includes the ball-mass (Carleson-type) check that
//! gates density diagnostics, and the translation-covariance identity check
//! for the associated operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fock::normalized_kernel;
use crate::logc::{LogComplex, LogSum};
use crate::point::CPoint;
use crate::quad::{ball_integral, gauss_weighted_integral, QuadratureConfig};

/// Atom of a discrete measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassPoint {
    pub at: CPoint,
    /// complex weight as [re, im]
    pub weight: [f64; 2],
}

/// Radial density catalog; the variant doubles as the declared growth class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    Constant { value: f64 },
    /// e^{rate |z|} — grows, fails the ball-mass criterion.
    RadialExp { rate: f64 },
    /// e^{-rate |z|^2}, rate >= 0.
    RadialGaussian { rate: f64 },
}

impl DensityKind {
    pub fn eval(&self, z: &CPoint) -> Complex64 {
        let v = match *self {
            DensityKind::Constant { value } => value,
            DensityKind::RadialExp { rate } => (rate * z.norm()).exp(),
            DensityKind::RadialGaussian { rate } => (-rate * z.norm_sqr()).exp(),
        };
        Complex64::new(v, 0.0)
    }

    /// Whether ball masses stay uniformly bounded (known per catalog entry).
    pub fn ball_mass_bounded(&self) -> bool {
        match *self {
            DensityKind::Constant { .. } => true,
            DensityKind::RadialExp { rate } => rate <= 0.0,
            DensityKind::RadialGaussian { rate } => rate >= 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// Finitely many atoms.
    Discrete { points: Vec<MassPoint> },
    /// weight * sum of unit masses on spacing * (Z + iZ), n = 1.
    Lattice { spacing: f64, weight: [f64; 2] },
    /// h(z) dV(z) with h from the radial catalog, n = 1 for quadratures.
    Density { h: DensityKind },
}

impl MeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Discrete { points } => {
                if points.is_empty() {
                    return Err(LabError::InvalidSpec("discrete measure needs atoms".into()));
                }
                if points.iter().any(|p| !p.weight[0].is_finite() || !p.weight[1].is_finite()) {
                    return Err(LabError::InvalidSpec("atom weights must be finite".into()));
                }
                let n = points[0].at.n();
                if points.iter().any(|p| p.at.n() != n) {
                    return Err(LabError::DimMismatch { expected: n, got: 0 });
                }
                Ok(())
            }
            MeasureSpec::Lattice { spacing, .. } => {
                if !(*spacing > 0.0) {
                    return Err(LabError::InvalidSpec("lattice spacing must be positive".into()));
                }
                Ok(())
            }
            MeasureSpec::Density { .. } => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Discrete { points } => points[0].at.n(),
            _ => 1,
        }
    }

    /// Gate for operator diagnostics: densities must have bounded ball
    /// masses (the declared growth class decides; see carleson_check for
    /// the measured version).
    pub fn diagnostics_ready(&self) -> Result<()> {
        self.validate()?;
        if let MeasureSpec::Density { h } = self {
            if !h.ball_mass_bounded() {
                return Err(LabError::InvalidSpec(
                    "density grows: ball-mass criterion fails, diagnostics disabled".into(),
                ));
            }
        }
        Ok(())
    }

    /// Complex-conjugate measure: conj weights, same support. The adjoint of
    /// the kernel-integral operator for nu is the operator for conj(nu).
    pub fn conjugated(&self) -> MeasureSpec {
        match self {
            MeasureSpec::Discrete { points } => MeasureSpec::Discrete {
                points: points
                    .iter()
                    .map(|p| MassPoint { at: p.at.clone(), weight: [p.weight[0], -p.weight[1]] })
                    .collect(),
            },
            MeasureSpec::Lattice { spacing, weight } => MeasureSpec::Lattice {
                spacing: *spacing,
                weight: [weight[0], -weight[1]],
            },
            // catalog densities are real-valued
            MeasureSpec::Density { h } => MeasureSpec::Density { h: h.clone() },
        }
    }

    /// Lattice points within `radius` of `center` (n = 1), with the lattice
    /// weight attached.
    fn lattice_window(spacing: f64, weight: [f64; 2], center: Complex64, radius: f64) -> Vec<(Complex64, Complex64)> {
        let w = Complex64::new(weight[0], weight[1]);
        let jlo = ((center.re - radius) / spacing).ceil() as i64;
        let jhi = ((center.re + radius) / spacing).floor() as i64;
        let klo = ((center.im - radius) / spacing).ceil() as i64;
        let khi = ((center.im + radius) / spacing).floor() as i64;
        let mut out = vec![];
        for j in jlo..=jhi {
            for k in klo..=khi {
                let p = Complex64::new(j as f64 * spacing, k as f64 * spacing);
                if (p - center).norm() <= radius {
                    out.push((p, w));
                }
            }
        }
        out
    }

    /// |nu|(B(z, r)).
    pub fn ball_mass(&self, z: &CPoint, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.validate()?;
        match self {
            MeasureSpec::Discrete { points } => Ok(points
                .iter()
                .filter(|p| p.at.dist_sqr(z) <= r * r)
                .map(|p| Complex64::new(p.weight[0], p.weight[1]).norm())
                .sum()),
            MeasureSpec::Lattice { spacing, weight } => {
                z.check_n(1)?;
                let pts = Self::lattice_window(*spacing, *weight, z.as_scalar(), r);
                Ok(pts.iter().map(|(_, w)| w.norm()).sum())
            }
            MeasureSpec::Density { h } => {
                z.check_n(1)?;
                let hh = h.clone();
                ball_integral(
                    move |u: &CPoint| LogComplex::from_real(hh.eval(u).norm()),
                    z,
                    r,
                    cfg,
                )
            }
        }
    }

    /// T_nu f(u) = int K_w(u) f(w) e^{-|w|^2} d nu(w), applied to the
    /// normalized kernel k_z. The integrand is a Gaussian peaked at
    /// (u + z)/2, which drives the lattice window and the quadrature seed.
    pub fn apply_to_normalized_kernel(
        &self,
        z: &CPoint,
        u: &CPoint,
        cfg: &QuadratureConfig,
    ) -> Result<LogComplex> {
        self.validate()?;
        z.check_dim(u)?;
        let term = |v: &CPoint| -> Result<LogComplex> {
            // K_v(u) k_z(v) e^{-|v|^2}
            let ip = u.inner(v);
            Ok(LogComplex::exp_of(ip.re - v.norm_sqr(), ip.im)
                .mul(normalized_kernel(z, v)?))
        };
        match self {
            MeasureSpec::Discrete { points } => {
                let mut sum = LogSum::new();
                for p in points {
                    p.at.check_dim(z)?;
                    sum.add(term(&p.at)?.mul(LogComplex::from_complex(Complex64::new(
                        p.weight[0], p.weight[1],
                    ))));
                }
                Ok(sum.value())
            }
            MeasureSpec::Lattice { spacing, weight } => {
                z.check_n(1)?;
                let center = (u.as_scalar() + z.as_scalar()) / 2.0;
                let mut sum = LogSum::new();
                for (p, w) in Self::lattice_window(*spacing, *weight, center, 9.5) {
                    let v = CPoint::scalar(p);
                    sum.add(term(&v)?.mul(LogComplex::from_complex(w)));
                }
                Ok(sum.value())
            }
            MeasureSpec::Density { h } => {
                z.check_n(1)?;
                let hh = h.clone();
                let (zc, uc) = (z.clone(), u.clone());
                let seed = z.add(u).scale_re(0.5);
                let verdict = gauss_weighted_integral(
                    move |v: &CPoint| {
                        let ip = uc.inner(v);
                        LogComplex::exp_of(ip.re - v.norm_sqr(), ip.im)
                            .mul(normalized_kernel(&zc, v).unwrap())
                            .mul(LogComplex::from_complex(hh.eval(v)))
                    },
                    1,
                    0.0,
                    &seed,
                    cfg,
                )?;
                if verdict.value.is_infinite() {
                    return Err(LabError::QuadratureDiverged(
                        "kernel-integral application diverged".into(),
                    ));
                }
                Ok(verdict.total)
            }
        }
    }
}

/// Outcome of the ball-mass sup check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CarlesonVerdict {
    Pass { sup: f64 },
    Fail { witness: CPoint },
    Inconclusive,
}

/// Estimates sup_z |nu|(B(z, r)) along 16 rays times the radius ladder.
/// Pass needs the running maximum to stabilize; a ray whose masses keep
/// growing at a sustained log-slope is a failure witness.
pub fn carleson_check(
    measure: &MeasureSpec,
    r: f64,
    ladder: &[f64],
    cfg: &QuadratureConfig,
) -> Result<CarlesonVerdict> {
    if !(r > 0.0) {
        return Err(LabError::Config("ball radius must be positive".into()));
    }
    if ladder.len() < 3 {
        return Err(LabError::Config("ladder needs at least 3 rungs".into()));
    }
    measure.validate()?;
    let n = measure.dim();
    let mut sup = measure.ball_mass(&CPoint::zero(n), r, cfg)?;
    let mut stable = true;
    for k in 0..16 {
        let theta = std::f64::consts::TAU * k as f64 / 16.0;
        let dir = CPoint::scalar(Complex64::from_polar(1.0, theta));
        let dir = if n == 1 {
            dir
        } else {
            let mut coords = vec![Complex64::new(0.0, 0.0); n];
            coords[k % n] = Complex64::from_polar(1.0, theta);
            CPoint::new(coords)?
        };
        let masses: Vec<f64> = ladder
            .iter()
            .map(|&rad| measure.ball_mass(&dir.scale_re(rad), r, cfg))
            .collect::<Result<_>>()?;
        let m = masses.len();
        let lg = |v: f64| v.max(1e-300).ln();
        let s1 = lg(masses[m - 2]) - lg(masses[m - 3]);
        let s2 = lg(masses[m - 1]) - lg(masses[m - 2]);
        if s1 > 0.0 && s2 >= (1.1 * s1).max(0.05) {
            return Ok(CarlesonVerdict::Fail {
                witness: dir.scale_re(ladder[m - 1]),
            });
        }
        let ray_max = masses.iter().cloned().fold(f64::MIN, f64::max);
        sup = sup.max(ray_max);
        // stabilized: the last rung no longer raises the ray maximum
        if masses[m - 1] > masses[..m - 1].iter().cloned().fold(f64::MIN, f64::max) * (1.0 + 1e-6) + 1e-300
        {
            stable = false;
        }
    }
    if stable {
        Ok(CarlesonVerdict::Pass { sup })
    } else {
        Ok(CarlesonVerdict::Inconclusive)
    }
}

/// Checks the translation-covariance identity for the kernel-integral
/// operator: conjugating by the weighted translation at z equals applying
/// the operator of the reflected measure to the constant 1. Returns the max
/// absolute deviation between the two sides over `w_samples`.
pub fn toeplitz_covariance_check(
    measure: &MeasureSpec,
    z: &CPoint,
    w_samples: &[CPoint],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    measure.validate()?;
    let n = measure.dim();
    z.check_n(n)?;
    let mut max_dev: f64 = 0.0;
    for w in w_samples {
        w.check_n(n)?;
        // left: (U_z T_nu U_z 1)(w) = (T_nu k_z)(z - w) k_z(w)
        let lhs = measure
            .apply_to_normalized_kernel(z, &z.sub(w), cfg)?
            .mul(normalized_kernel(z, w)?)
            .to_complex();
        // right: T of the image measure under t -> z - t, applied to 1:
        // int K_{z-t}(w) e^{-|z-t|^2} d nu(t)
        let rhs = match measure {
            MeasureSpec::Discrete { points } => {
                let mut sum = LogSum::new();
                for p in points {
                    let s = z.sub(&p.at);
                    let ip = w.inner(&s);
                    sum.add(
                        LogComplex::exp_of(ip.re - s.norm_sqr(), ip.im).mul(
                            LogComplex::from_complex(Complex64::new(p.weight[0], p.weight[1])),
                        ),
                    );
                }
                sum.value().to_complex()
            }
            MeasureSpec::Lattice { spacing, weight } => {
                // mass of the t-integrand sits where z - t is near w/2
                let center = z.as_scalar() - w.as_scalar() / 2.0;
                let mut sum = LogSum::new();
                for (p, wt) in MeasureSpec::lattice_window(*spacing, *weight, center, 9.5) {
                    let s = z.sub(&CPoint::scalar(p));
                    let ip = w.inner(&s);
                    sum.add(LogComplex::exp_of(ip.re - s.norm_sqr(), ip.im)
                        .mul(LogComplex::from_complex(wt)));
                }
                sum.value().to_complex()
            }
            MeasureSpec::Density { h } => {
                let hh = h.clone();
                let (zc, wc) = (z.clone(), w.clone());
                let seed = z.sub(&w.scale_re(0.5));
                let verdict = gauss_weighted_integral(
                    move |t: &CPoint| {
                        let s = zc.sub(t);
                        let ip = wc.inner(&s);
                        LogComplex::exp_of(ip.re - s.norm_sqr(), ip.im)
                            .mul(LogComplex::from_complex(hh.eval(t)))
                    },
                    1,
                    0.0,
                    &seed,
                    cfg,
                )?;
                verdict.total.to_complex()
            }
        };
        max_dev = max_dev.max((lhs - rhs).norm());
    }
    Ok(max_dev)
}
