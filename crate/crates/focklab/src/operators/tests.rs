use super::*;
use crate::symbols::{DensityKind, MassPoint, Profile};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(re: f64, im: f64) -> CPoint {
    CPoint::scalar(c(re, im))
}

fn pt2(a: Complex64, b: Complex64) -> CPoint {
    CPoint::new(vec![a, b]).unwrap()
}

fn cfg1() -> QuadratureConfig {
    QuadratureConfig::default_for(1)
}

fn delta_at(re: f64, im: f64, weight: [f64; 2]) -> OperatorSpec {
    OperatorSpec::ToeplitzMeasure {
        measure: MeasureSpec::Discrete {
            points: vec![MassPoint { at: pt(re, im), weight }],
        },
    }
}

// ── pairing closed forms ──

#[test]
fn pairing_examples_match_hand_values() {
    let cfg = cfg1();
    let z = pt(0.7, 0.2);

    // <k_z, k_z> = 1 for any z
    let p = pairing(&OperatorSpec::Identity, &z, &z, &cfg).unwrap();
    assert_eq!(p.method, PairingMethod::ClosedForm);
    let v = p.value.to_complex();
    assert!((v - c(1.0, 0.0)).norm() < 1e-14);

    // shifting the vacuum state by a and pairing at w = a gives exactly 1
    let op = OperatorSpec::Translation { a: pt(1.0, 0.0) };
    let v = pairing(&op, &pt(0.0, 0.0), &pt(1.0, 0.0), &cfg).unwrap().value;
    assert!((v.to_complex() - c(1.0, 0.0)).norm() < 1e-14);

    // the unit symbol reproduces the kernel pairing: magnitude e^{-|z-w|^2/2}
    let op = OperatorSpec::ConvolutionSymbol { phi: PhiSpec::One };
    let v = pairing(&op, &pt(1.0, 0.0), &pt(0.0, 1.0), &cfg).unwrap().value;
    assert!((v.mag() - (-1.0f64).exp()).abs() < 1e-14);

    // reflected dilation at real points: e^{-r z w - (z^2 + w^2)/2}
    let op = OperatorSpec::Dilation { r: 0.5 };
    let v = pairing(&op, &pt(1.0, 0.0), &pt(-0.5, 0.0), &cfg).unwrap().value;
    assert!((v.to_complex() - c((-0.375f64).exp(), 0.0)).norm() < 1e-14);

    // a unit point mass at the origin pairs to k_z(0) conj(k_w(0))
    let op = delta_at(0.0, 0.0, [1.0, 0.0]);
    let v = pairing(&op, &pt(1.0, 0.0), &pt(0.0, 1.0), &cfg).unwrap().value;
    assert!((v.to_complex() - c((-1.0f64).exp(), 0.0)).norm() < 1e-14);
}

#[test]
fn berezin_identity_and_point_mass() {
    let cfg = cfg1();
    for z in [pt(0.0, 0.0), pt(1.0, 2.0)] {
        let v = berezin(&OperatorSpec::Identity, &z, &cfg).unwrap();
        assert!((v.to_complex() - c(1.0, 0.0)).norm() < 1e-13);
    }
    // point mass at 0: |k_z(0)|^2 = e^{-|z|^2}
    let z = pt(1.3, -0.4);
    let v = berezin(&delta_at(0.0, 0.0, [1.0, 0.0]), &z, &cfg).unwrap();
    assert!((v.mag() - (-z.norm_sqr()).exp()).abs() < 1e-14);
}

#[test]
fn lacunary_berezin_equals_f_profile() {
    let cfg = cfg1();
    let op = OperatorSpec::Lacunary { gamma: GammaSpec::Constant { value: 1.0 } };
    for z in [pt(0.3, 0.0), pt(1.0, 0.0), pt(0.0, 0.8), pt(1.1, -0.9)] {
        let b = berezin(&op, &z, &cfg).unwrap();
        let f = lacunary_f(z.norm_sqr(), 1e-14).unwrap();
        assert!(
            (b.mag() - f).abs() <= 1e-12 * f.max(1e-300),
            "berezin {} vs profile {}",
            b.mag(),
            f
        );
        // z-bar z is real, so the diagonal pairing carries no phase
        assert!((b.to_complex().im).abs() < 1e-13 * f.max(1e-300));
    }
}

// ── the weighted pairing integral identity ──

fn eq31_rhs_by_quadrature(op: &OperatorSpec, z: &CPoint, p: f64, cfg: &QuadratureConfig) -> f64 {
    // the weight stays centered at z; the seed only tells the quadrature
    // where the integrand mass sits
    let center = eq31_center_seed(op, z, p);
    let f = |w: &CPoint| -> LogComplex {
        match pairing(op, z, w, cfg) {
            Ok(pv) => pv
                .value
                .abs()
                .powf(p)
                .scale_mag((p / 2.0 - 1.0) * z.sub(w).norm_sqr()),
            Err(_) => LogComplex::ZERO,
        }
    };
    let v = gauss_weighted_integral(f, z.n(), 0.0, &center, cfg).unwrap();
    v.log_value - (z.n() as f64) * std::f64::consts::PI.ln()
}

fn eq31_lhs_by_quadrature(op: &OperatorSpec, z: &CPoint, p: f64, cfg: &QuadratureConfig) -> f64 {
    // int |(T k_z)(z - w)|^p |k_z(w)|^p e^{-|w|^2} dV(w) / pi^n
    let center = z.sub(&eq31_center_seed(op, z, p));
    let f = |w: &CPoint| -> LogComplex {
        let t = match apply_to_kz(op, z, &z.sub(w), cfg) {
            Ok(x) => x,
            Err(_) => return LogComplex::ZERO,
        };
        let kz = match normalized_kernel(z, w) {
            Ok(x) => x,
            Err(_) => return LogComplex::ZERO,
        };
        t.abs().powf(p).mul(kz.abs().powf(p)).scale_mag(-w.norm_sqr())
    };
    let v = gauss_weighted_integral(f, z.n(), 0.0, &center, cfg).unwrap();
    v.log_value - (z.n() as f64) * std::f64::consts::PI.ln()
}

#[test]
fn pairing_integral_identity_holds_for_closed_families() {
    let cfg = cfg1();
    let z = pt(0.4, -0.3);
    let ops = [
        OperatorSpec::Identity,
        OperatorSpec::Translation { a: pt(1.0, 0.0) },
        OperatorSpec::Dilation { r: 0.5 },
        OperatorSpec::AffineComposition {
            a: CMatrix::diag(&[c(0.3, 0.2)]),
            b: CPoint::zero(1),
        },
    ];
    for op in &ops {
        for p in [2.5, 3.0] {
            let g = eq31_log_closed_form(op, &z, p).unwrap().unwrap();
            let rhs = eq31_rhs_by_quadrature(op, &z, p, &cfg);
            let lhs = eq31_lhs_by_quadrature(op, &z, p, &cfg);
            assert!(
                ((rhs - g).exp() - 1.0).abs() <= 1e-6,
                "{}: weighted integral {} vs closed form {} (p = {})",
                op.family_name(),
                rhs,
                g,
                p
            );
            assert!(
                ((lhs - g).exp() - 1.0).abs() <= 1e-6,
                "{}: substitution side {} vs closed form {} (p = {})",
                op.family_name(),
                lhs,
                g,
                p
            );
        }
    }
}

#[test]
fn eq31_closed_forms_and_seeds() {
    let z = pt(1.0, 0.0);
    assert_eq!(eq31_log_closed_form(&OperatorSpec::Identity, &z, 3.0).unwrap(), Some(0.0));

    // translations are z-free: p(p-2)|a|^2/4
    let op = OperatorSpec::Translation { a: pt(1.0, 0.0) };
    let g = eq31_log_closed_form(&op, &z, 4.0).unwrap().unwrap();
    assert!((g - 2.0).abs() < 1e-14);

    // at the dilation threshold p = 4/(1+r) the closed form is z-free zero
    let op = OperatorSpec::Dilation { r: 0.5 };
    for z in [pt(0.0, 0.0), pt(2.0, -1.0)] {
        let g = eq31_log_closed_form(&op, &z, 4.0 / 1.5).unwrap().unwrap();
        assert!(g.abs() < 1e-12);
    }

    let op = OperatorSpec::Lacunary { gamma: GammaSpec::Constant { value: 1.0 } };
    assert_eq!(eq31_log_closed_form(&op, &z, 3.0).unwrap(), None);

    let op = OperatorSpec::Translation { a: pt(2.0, 0.0) };
    let seed = eq31_center_seed(&op, &pt(0.5, 0.0), 3.0);
    assert!((seed.as_scalar() - c(3.5, 0.0)).norm() < 1e-14);
    let op = OperatorSpec::Dilation { r: 0.5 };
    let seed = eq31_center_seed(&op, &pt(1.0, 0.0), 2.0);
    assert!((seed.as_scalar() - c(-0.5, 0.0)).norm() < 1e-14);
}

// ── quadrature agreement ──

#[test]
fn quadrature_pairing_agrees_with_closed_forms() {
    let cfg = cfg1();
    let z = pt(0.2, 0.4);
    let w = pt(-0.3, 0.6);
    let ops = [
        OperatorSpec::Identity,
        OperatorSpec::Translation { a: pt(1.0, 0.0) },
        OperatorSpec::Dilation { r: 0.5 },
        OperatorSpec::AffineComposition {
            a: CMatrix::diag(&[c(0.3, 0.2)]),
            b: CPoint::scalar(c(0.1, -0.2)),
        },
        OperatorSpec::Lacunary { gamma: GammaSpec::Constant { value: 1.0 } },
        OperatorSpec::ConvolutionSymbol { phi: PhiSpec::One },
        OperatorSpec::ConvolutionSymbol { phi: PhiSpec::Exponential { a: 0.5 } },
        delta_at(0.3, 0.0, [0.5, 0.2]),
    ];
    for op in &ops {
        let direct = pairing(op, &z, &w, &cfg).unwrap().value.to_complex();
        let quad = pairing_by_quadrature(op, &z, &w, &cfg).unwrap().to_complex();
        assert!(
            (direct - quad).norm() <= 1e-6 * direct.norm().max(1e-12),
            "{}: closed {} vs quadrature {}",
            op.family_name(),
            direct,
            quad
        );
    }
}

// ── adjoints ──

#[test]
fn adjoint_pairing_swaps_arguments() {
    let cfg = cfg1();
    let pts = [(pt(0.3, -0.5), pt(0.8, 0.4)), (pt(-0.6, 0.1), pt(0.2, 0.9))];
    let ops = [
        OperatorSpec::Translation { a: pt(0.7, -0.2) },
        OperatorSpec::Dilation { r: 0.3 },
        OperatorSpec::AffineComposition {
            a: CMatrix::diag(&[c(0.4, 0.1)]),
            b: CPoint::zero(1),
        },
        OperatorSpec::Lacunary { gamma: GammaSpec::Geometric { value: 0.8, ratio: 0.5 } },
        OperatorSpec::ConvolutionSymbol { phi: PhiSpec::Exponential { a: 0.5 } },
        OperatorSpec::ConvolutionSymbol {
            phi: PhiSpec::FromMultiplier { m: Profile::Gaussian { coef: 1.0, rate: 0.5 } },
        },
        delta_at(0.3, 0.0, [0.5, 0.2]),
    ];
    for op in &ops {
        let adj = op.adjoint_spec().unwrap_or_else(|| {
            panic!("{} should have a catalog adjoint", op.family_name())
        });
        for (z, w) in &pts {
            // <T* k_z, k_w> = conj(<T k_w, k_z>)
            let lhs = pairing(&adj, z, w, &cfg).unwrap().value.to_complex();
            let rhs = pairing(op, w, z, &cfg).unwrap().value.to_complex().conj();
            assert!(
                (lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1e-12),
                "{}: adjoint pairing {} vs swapped {}",
                op.family_name(),
                lhs,
                rhs
            );
        }
    }

    // drifted compositions fall outside the catalog; so does the odd
    // antiderivative symbol
    let op = OperatorSpec::AffineComposition {
        a: CMatrix::diag(&[c(0.4, 0.1)]),
        b: CPoint::scalar(c(0.3, 0.0)),
    };
    assert!(op.adjoint_spec().is_none());
    let op = OperatorSpec::ConvolutionSymbol { phi: PhiSpec::ErfAntiderivative };
    assert!(op.adjoint_spec().is_none());
}

#[test]
fn translation_pairing_obeys_epsilon_bound() {
    let cfg = cfg1();
    let pts = [
        (pt(0.0, 0.0), pt(1.0, 0.0)),
        (pt(0.5, -1.2), pt(-0.7, 0.3)),
        (pt(2.0, 1.0), pt(1.5, 1.5)),
    ];
    for a in [pt(1.0, 0.0), pt(2.0, 1.0)] {
        let op = OperatorSpec::Translation { a: a.clone() };
        for eps in [1.3, 2.0] {
            for (z, w) in &pts {
                let mag = pairing(&op, z, w, &cfg).unwrap().value.mag();
                let bound = ((eps / 2.0 - 0.5) * a.norm_sqr()
                    + (0.5 / eps - 0.5) * z.sub(w).norm_sqr())
                .exp();
                assert!(
                    mag <= bound * (1.0 + 1e-12),
                    "|pairing| {} exceeds bound {} (eps {})",
                    mag,
                    bound,
                    eps
                );
            }
        }
    }
}

// ── vanishing probe ──

#[test]
fn vanish_probe_flags_each_regime() {
    let cfg = cfg1();
    let real_ray = vec![pt(1.0, 0.0)];

    // e^{a z} symbol: on the diagonal phi(z - conj z) = phi(2i Im z), which
    // is unimodular along the real axis
    let op = OperatorSpec::ConvolutionSymbol { phi: PhiSpec::Exponential { a: 0.5 } };
    let v = berezin_vanish_probe(&op, &real_ray, &[1.0, 2.0, 3.0], &cfg).unwrap();
    assert_eq!(v, BerezinVanish::Persists { ray: pt(1.0, 0.0) });

    // dilation diagonal decays like e^{-(1+r)|z|^2}
    let op = OperatorSpec::Dilation { r: 0.5 };
    let v = berezin_vanish_probe(&op, &real_ray, &[1.0, 2.5, 3.5], &cfg).unwrap();
    assert_eq!(v, BerezinVanish::Vanishes);

    // a ladder stopping right at the floor crossing decides nothing
    let v = berezin_vanish_probe(&op, &real_ray, &[1.0, 2.0, 2.2], &cfg).unwrap();
    assert_eq!(v, BerezinVanish::Inconclusive);

    // identity composition persists along any ray
    let op = OperatorSpec::AffineComposition {
        a: CMatrix::identity(1),
        b: CPoint::zero(1),
    };
    let v = berezin_vanish_probe(&op, &real_ray, &[1.0, 4.0, 8.0], &cfg).unwrap();
    assert!(matches!(v, BerezinVanish::Persists { .. }));
}

#[test]
fn vanish_probe_is_ray_relative_for_unitary_composition() {
    // diag(1, e^{i pi/2}) fixes e_1 pointwise: its diagonal is identically 1
    // there, yet decays along every direction with no e_1 component. The
    // verdict is honest relative to the supplied rays.
    let cfg = QuadratureConfig::default_for(2);
    let op = OperatorSpec::AffineComposition {
        a: CMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)]),
        b: CPoint::zero(2),
    };
    let e0 = pt2(c(1.0, 0.0), c(0.0, 0.0));
    let e1 = pt2(c(0.0, 0.0), c(1.0, 0.0));
    let ladder = [2.0, 4.0, 5.0];

    let v = berezin_vanish_probe(&op, &[e0.clone(), e1.clone()], &ladder, &cfg).unwrap();
    assert_eq!(v, BerezinVanish::Persists { ray: e0.clone() });

    let s = 0.5f64.sqrt();
    let tilted = vec![pt2(c(s, 0.0), c(s, 0.0)), e1];
    let v = berezin_vanish_probe(&op, &tilted, &ladder, &cfg).unwrap();
    assert_eq!(v, BerezinVanish::Vanishes);
}

#[test]
fn vanish_probe_rejects_bad_arguments() {
    let cfg = cfg1();
    let op = OperatorSpec::Identity;
    assert!(berezin_vanish_probe(&op, &[], &[1.0, 2.0], &cfg).is_err());
    assert!(berezin_vanish_probe(&op, &[pt(2.0, 0.0)], &[1.0, 2.0], &cfg).is_err());
    assert!(berezin_vanish_probe(&op, &[pt(1.0, 0.0)], &[1.0], &cfg).is_err());
    assert!(berezin_vanish_probe(&op, &[pt(1.0, 0.0)], &[2.0, 1.0], &cfg).is_err());
}

// ── validation and serialization ──

#[test]
fn validate_rejects_bad_parameters() {
    assert!(OperatorSpec::Dilation { r: 1.0 }.validate().is_err());
    assert!(OperatorSpec::Dilation { r: -0.1 }.validate().is_err());

    let op = OperatorSpec::AffineComposition {
        a: CMatrix::diag(&[c(1.2, 0.0)]),
        b: CPoint::zero(1),
    };
    assert!(matches!(op.validate(), Err(LabError::UnboundedOperator { .. })));

    let op = OperatorSpec::Lacunary {
        gamma: GammaSpec::Geometric { value: 1.0, ratio: 1.5 },
    };
    assert!(op.validate().is_err());

    // dimension checks flow through the pairing entry point
    let cfg = cfg1();
    let z2 = pt2(c(1.0, 0.0), c(0.0, 0.0));
    let op = OperatorSpec::Dilation { r: 0.5 };
    assert!(pairing(&op, &z2, &z2, &cfg).is_err());
}

#[test]
fn spec_round_trips_canonical_json() {
    // the documented command-line form
    let op: OperatorSpec =
        serde_json::from_str(r#"{"family":"translation","a":[[1,0]]}"#).unwrap();
    match &op {
        OperatorSpec::Translation { a } => {
            assert_eq!(a.as_scalar(), c(1.0, 0.0));
        }
        _ => panic!("wrong family"),
    }

    assert_eq!(
        serde_json::to_string(&OperatorSpec::Identity).unwrap(),
        r#"{"family":"identity"}"#
    );

    let ops = [
        OperatorSpec::Identity,
        OperatorSpec::Translation { a: pt(1.0, -2.0) },
        OperatorSpec::Dilation { r: 0.25 },
        OperatorSpec::AffineComposition {
            a: CMatrix::diag(&[c(0.3, 0.2), c(0.1, 0.0)]),
            b: CPoint::new(vec![c(0.0, 0.0), c(0.5, 0.5)]).unwrap(),
        },
        OperatorSpec::Lacunary { gamma: GammaSpec::Geometric { value: 1.0, ratio: -0.5 } },
        OperatorSpec::ConvolutionSymbol { phi: PhiSpec::SincBeta { beta: 4 } },
        OperatorSpec::ToeplitzMeasure {
            measure: MeasureSpec::Lattice { spacing: 1.0, weight: [1.0, 0.0] },
        },
        OperatorSpec::ToeplitzMeasure {
            measure: MeasureSpec::Density { h: DensityKind::Constant { value: 1.0 } },
        },
    ];
    for op in &ops {
        let j = serde_json::to_string(op).unwrap();
        let back: OperatorSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(j, serde_json::to_string(&back).unwrap(), "unstable: {}", j);
    }
}
