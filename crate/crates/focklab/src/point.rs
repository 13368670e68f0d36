//! Points of complex n-space (n <= 4) and the Hermitian pairing convention.

use crate::error::{LabError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of `C^n`. The pairing convention throughout the crate is
/// `<z, w> = sum_j z_j * conj(w_j)`, linear in the first slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct CPoint {
    coords: Vec<Complex64>,
}

impl CPoint {
    pub const MAX_DIM: usize = 4;

    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > Self::MAX_DIM {
            return Err(LabError::Config(format!(
                "dimension must be 1..={}, got {}",
                Self::MAX_DIM,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LabError::Config("non-finite coordinate".into()));
        }
        Ok(CPoint { coords })
    }

    /// 1-D point from a single complex number.
    pub fn scalar(z: Complex64) -> Self {
        CPoint { coords: vec![z] }
    }

    pub fn zero(n: usize) -> Self {
        CPoint {
            coords: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// The single coordinate of a 1-D point.
    pub fn as_scalar(&self) -> Complex64 {
        debug_assert_eq!(self.coords.len(), 1);
        self.coords[0]
    }

    pub fn check_dim(&self, other: &CPoint) -> Result<()> {
        if self.n() != other.n() {
            Err(LabError::DimMismatch {
                expected: self.n(),
                got: other.n(),
            })
        } else {
            Ok(())
        }
    }

    pub fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            Err(LabError::DimMismatch {
                expected: n,
                got: self.n(),
            })
        } else {
            Ok(())
        }
    }

    /// Scale by a real factor.
    pub fn scale_re(&self, s: f64) -> CPoint {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `<self, other> = sum_j self_j * conj(other_j)`.
    pub fn inner(&self, other: &CPoint) -> Complex64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dist_sqr(&self, other: &CPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    pub fn add(&self, other: &CPoint) -> CPoint {
        CPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CPoint) -> CPoint {
        CPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> CPoint {
        CPoint {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn conj(&self) -> CPoint {
        CPoint {
            coords: self.coords.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Unit vector in the direction of `self`; `None` for the zero point.
    pub fn normalize(&self) -> Option<CPoint> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(Complex64::new(1.0 / n, 0.0)))
        }
    }

    /// View as 2n real coordinates (re, im interleaved).
    pub fn to_reals(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.n());
        for c in &self.coords {
            v.push(c.re);
            v.push(c.im);
        }
        v
    }

    pub fn from_reals(reals: &[f64]) -> Self {
        debug_assert!(reals.len() % 2 == 0);
        CPoint {
            coords: reals
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        }
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| format!("{:+.6}{:+.6}i", c.re, c.im))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl TryFrom<Vec<[f64; 2]>> for CPoint {
    type Error = LabError;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        CPoint::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<CPoint> for Vec<[f64; 2]> {
    fn from(p: CPoint) -> Self {
        p.coords.iter().map(|c| [c.re, c.im]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_is_hermitian() {
        let z = CPoint::new(vec![c(1.0, 2.0), c(-0.5, 0.3)]).unwrap();
        let w = CPoint::new(vec![c(0.7, -1.1), c(2.0, 0.0)]).unwrap();
        let zw = z.inner(&w);
        let wz = w.inner(&z);
        assert_relative_eq!(zw.re, wz.re, max_relative = 1e-14);
        assert_relative_eq!(zw.im, -wz.im, max_relative = 1e-14);
        assert_relative_eq!(z.inner(&z).re, z.norm_sqr(), max_relative = 1e-14);
        assert!(z.inner(&z).im.abs() < 1e-15);
    }

    #[test]
    fn dimension_limits_enforced() {
        assert!(CPoint::new(vec![]).is_err());
        assert!(CPoint::new(vec![c(0.0, 0.0); 5]).is_err());
        assert!(CPoint::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(CPoint::new(vec![c(0.0, 0.0); 4]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let z = CPoint::new(vec![c(1.0, -2.0), c(0.25, 0.0)]).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.25,0.0]]");
        let back: CPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn real_coordinate_round_trip() {
        let z = CPoint::new(vec![c(0.1, 0.2), c(0.3, 0.4)]).unwrap();
        assert_eq!(CPoint::from_reals(&z.to_reals()), z);
    }
}
