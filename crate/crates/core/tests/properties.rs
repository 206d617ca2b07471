//! Randomized invariants.

use num_complex::Complex64 as C64;
use projhull::compacta::{apply_matrix, sample, CurveGenerator, ProjectivePoint};
use projhull::extremal::truncated_extremal;
use projhull::families::{certify_exclusion, Family};
use projhull::optimizer::SolverConfig;
use projhull::rng;
use projhull::spectrum::GradedAlgebraOnK;
use proptest::prelude::*;

fn circle_value(r: f64) -> f64 {
    r.max(1.0).ln() - 0.5 * ((1.0 + r * r) / 2.0).ln()
}

fn affine() -> impl Strategy<Value = C64> {
    (-2.5f64..2.5, -2.5f64..2.5).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_contains_circle_value(z in affine(), d in 1usize..7) {
        let k = sample(&CurveGenerator::unit_circle(), 96).unwrap();
        let x = ProjectivePoint::from_affine(0, &[z]).unwrap();
        let cfg = SolverConfig::default();
        let r = truncated_extremal(&k, &x, d, &cfg).unwrap();
        prop_assert!(r.lam_lo <= r.lam_hi + 1e-12);
        prop_assert!(r.width() <= cfg.log_slack(d) + 1e-9);
        let v = circle_value(z.norm());
        prop_assert!(r.lam_lo <= v + 1e-9 && v <= r.lam_hi + 1e-9, "{:?} vs {}", r, v);
    }

    #[test]
    fn shrinking_k_raises_extremal(z in affine(), d in 1usize..5, stride in 2usize..4) {
        let k = sample(&CurveGenerator::unit_circle(), 96).unwrap();
        let idx: Vec<usize> = (0..96).step_by(stride).collect();
        let sub = k.subset(&idx).unwrap();
        let x = ProjectivePoint::from_affine(0, &[z]).unwrap();
        let cfg = SolverConfig::default();
        let big = truncated_extremal(&k, &x, d, &cfg).unwrap();
        let small = truncated_extremal(&sub, &x, d, &cfg).unwrap();
        prop_assert!(big.lam_lo <= small.lam_hi + 1e-9);
    }

    #[test]
    fn unitary_invariance(seed in 0u64..1000, z in affine(), d in 1usize..5) {
        let k = sample(&CurveGenerator::exp_graph(0.5, 20), 48).unwrap();
        let u = rng::unitary(&mut rng::stream(seed, "prop-unitary"), 3);
        let uk = k.apply_unitary(&u).unwrap();
        let x = ProjectivePoint::from_affine(0, &[z, C64::new(0.3, -0.2)]).unwrap();
        let ux = apply_matrix(&u, &x).unwrap();
        let cfg = SolverConfig::default();
        let a = truncated_extremal(&k, &x, d, &cfg).unwrap();
        let b = truncated_extremal(&uk, &ux, d, &cfg).unwrap();
        if a.is_bracketed() && b.is_bracketed() {
            let slack = a.width() + b.width() + 1e-8;
            prop_assert!(a.lam_lo <= b.lam_hi + slack && b.lam_lo <= a.lam_hi + slack, "{:?} {:?}", a, b);
        } else {
            prop_assert_eq!(a.is_bracketed(), b.is_bracketed());
        }
    }

    #[test]
    fn nonpositive_on_k(i in 0usize..64, d in 1usize..8) {
        let k = sample(&CurveGenerator::unit_circle(), 64).unwrap();
        let x = k.points()[i].clone();
        let r = truncated_extremal(&k, &x, d, &SolverConfig::default()).unwrap();
        prop_assert!(r.lam_lo <= 1e-9, "{:?}", r);
    }

    #[test]
    fn degree_norm_submultiplicative(seed in 0u64..10_000, d1 in 1usize..5, d2 in 1usize..5) {
        let k = sample(&CurveGenerator::unit_circle(), 64).unwrap();
        let alg = GradedAlgebraOnK::new(k, SolverConfig::default()).unwrap();
        let mut r = rng::stream(seed, "prop-mul");
        let p = rng::polynomial(&mut r, 1, d1);
        let q = rng::polynomial(&mut r, 1, d2);
        let pq = p.mul(&q).unwrap();
        let lhs = alg.degree_norm(&pq).unwrap();
        let rhs = alg.degree_norm(&p).unwrap() * alg.degree_norm(&q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn hom_norm_scales_homogeneously(re in -2.0f64..2.0, im in -2.0f64..2.0, lam_re in -3.0f64..3.0, lam_im in -3.0f64..3.0, d in 1usize..5) {
        let lam = C64::new(lam_re, lam_im);
        prop_assume!(lam.norm() > 0.05);
        let k = sample(&CurveGenerator::unit_circle(), 64).unwrap();
        let alg = GradedAlgebraOnK::new(k, SolverConfig::default()).unwrap();
        let z = vec![C64::new(1.0, 0.0), C64::new(re, im)];
        let zl: Vec<C64> = z.iter().map(|c| c * lam).collect();
        let a = alg.hom_norm(&z, d).unwrap();
        let b = alg.hom_norm(&zl, d).unwrap();
        let s = lam.norm().powi(d as i32);
        prop_assert!((b.lo / (s * a.lo) - 1.0).abs() < 1e-12);
        prop_assert!((b.hi / (s * a.hi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certificates_recheck_and_stay_positive(re in -0.45f64..0.45, im in -0.45f64..0.45, dw_re in -3.0f64..3.0, dw_im in -3.0f64..3.0) {
        let k = sample(&CurveGenerator::exp_graph(0.5, 40), 128).unwrap();
        let fam = Family::exp(40);
        let z = C64::new(re, im);
        let x = [z, fam.value(z) + C64::new(dw_re, dw_im)];
        let cert = certify_exclusion(&k, x, &fam, &[1, 2, 5, 10]).unwrap();
        prop_assert!(cert.recheck() < 1e-12);
        for rec in &cert.records {
            prop_assert!(rec.c > 0.0 && rec.sup_k > 0.0);
        }
    }
}
