//! The closed catalog of real-line profiles usable as multipliers m or
//! densities g. Keeping this an enum (rather than accepting closures from
//! the CLI) gives every profile a canonical JSON form and lets the
//! quadrature know about discontinuities and support up front.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// Constant value c.
    Constant { re: f64, im: f64 },
    /// height * 1_{[lo, hi]}.
    Indicator { lo: f64, hi: f64, height: f64 },
    /// coef * e^{-rate x^2}, rate > 0.
    Gaussian { coef: f64, rate: f64 },
    /// (1 + x^2)^{-1}.
    RationalTail,
    /// e^{-2 i a x}.
    ComplexExponential { a: f64 },
    /// -i sgn(x).
    SignAntisymmetric,
}

impl Profile {
    pub fn eval(&self, x: f64) -> Complex64 {
        match *self {
            Profile::Constant { re, im } => Complex64::new(re, im),
            Profile::Indicator { lo, hi, height } => {
                if x >= lo && x <= hi {
                    Complex64::new(height, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Profile::Gaussian { coef, rate } => Complex64::new(coef * (-rate * x * x).exp(), 0.0),
            Profile::RationalTail => Complex64::new(1.0 / (1.0 + x * x), 0.0),
            Profile::ComplexExponential { a } => Complex64::new(0.0, -2.0 * a * x).exp(),
            Profile::SignAntisymmetric => Complex64::new(0.0, -x.signum()),
        }
    }

    /// Points where the profile jumps; quadrature panels must not straddle
    /// these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Profile::Indicator { lo, hi, .. } => vec![lo, hi],
            Profile::SignAntisymmetric => vec![0.0],
            _ => vec![],
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.breakpoints().is_empty()
    }

    /// Compact support, when the profile has one.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Profile::Indicator { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Whether the profile is integrable on the line (required of densities).
    pub fn l1_finite(&self) -> bool {
        match *self {
            Profile::Constant { re, im } => re == 0.0 && im == 0.0,
            Profile::Indicator { .. } | Profile::Gaussian { .. } | Profile::RationalTail => true,
            Profile::ComplexExponential { .. } | Profile::SignAntisymmetric => false,
        }
    }

    /// Sup of |profile| on the line (all catalog entries are bounded).
    pub fn sup_abs(&self) -> f64 {
        match *self {
            Profile::Constant { re, im } => Complex64::new(re, im).norm(),
            Profile::Indicator { height, .. } => height.abs(),
            Profile::Gaussian { coef, .. } => coef.abs(),
            Profile::RationalTail => 1.0,
            Profile::ComplexExponential { .. } | Profile::SignAntisymmetric => 1.0,
        }
    }

    /// x -> conj(self(x)), when the result is again a catalog entry. Needed
    /// for multiplier adjoints.
    pub fn conjugated(&self) -> Option<Profile> {
        match *self {
            Profile::Constant { re, im } => Some(Profile::Constant { re, im: -im }),
            Profile::Indicator { .. } | Profile::Gaussian { .. } | Profile::RationalTail => {
                Some(self.clone())
            }
            Profile::ComplexExponential { a } => Some(Profile::ComplexExponential { a: -a }),
            // conj(-i sgn) = i sgn is not in the catalog
            Profile::SignAntisymmetric => None,
        }
    }

    /// x -> conj(self(-x)), when the result is again a catalog entry. Needed
    /// for density adjoints.
    pub fn reflected_conjugated(&self) -> Option<Profile> {
        match *self {
            Profile::Constant { re, im } => Some(Profile::Constant { re, im: -im }),
            Profile::Indicator { lo, hi, height } => {
                Some(Profile::Indicator { lo: -hi, hi: -lo, height })
            }
            Profile::Gaussian { .. } | Profile::RationalTail | Profile::SignAntisymmetric => {
                Some(self.clone())
            }
            Profile::ComplexExponential { a } => Some(Profile::ComplexExponential { a }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_evaluations() {
        let m = Profile::SignAntisymmetric;
        assert_eq!(m.eval(2.0), Complex64::new(0.0, -1.0));
        assert_eq!(m.eval(-2.0), Complex64::new(0.0, 1.0));
        let g = Profile::Indicator { lo: -1.0, hi: 1.0, height: 0.5 };
        assert_eq!(g.eval(0.3).re, 0.5);
        assert_eq!(g.eval(1.5).re, 0.0);
        let r = Profile::RationalTail;
        assert_eq!(r.eval(3.0).re, 0.1);
    }

    #[test]
    fn integrability_flags() {
        assert!(Profile::Gaussian { coef: 1.0, rate: 1.0 }.l1_finite());
        assert!(Profile::RationalTail.l1_finite());
        assert!(!Profile::SignAntisymmetric.l1_finite());
        assert!(Profile::Constant { re: 0.0, im: 0.0 }.l1_finite());
        assert!(!Profile::Constant { re: 1.0, im: 0.0 }.l1_finite());
    }

    #[test]
    fn json_round_trip() {
        let specs = vec![
            Profile::Constant { re: 0.5, im: -0.25 },
            Profile::Indicator { lo: -40.0, hi: 40.0, height: 1.0 },
            Profile::Gaussian { coef: 0.7071, rate: 0.25 },
            Profile::RationalTail,
            Profile::ComplexExponential { a: 1.5 },
            Profile::SignAntisymmetric,
        ];
        for s in specs {
            let j = serde_json::to_string(&s).unwrap();
            let back: Profile = serde_json::from_str(&j).unwrap();
            assert_eq!(s, back);
        }
    }
}
