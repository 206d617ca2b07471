//! Independent reference computations, frozen.

use num_complex::Complex64 as C64;
use projhull::compacta::{sample, CurveGenerator, ProjectivePoint, SampledCompactum};
use projhull::extremal::truncated_extremal;
use projhull::families::{certify_exclusion, Family, Verdict};
use projhull::jensen::{green_for_compactum, DISK_GREEN_MASS};
use projhull::optimizer::SolverConfig;
use projhull::poly::HomogeneousPolynomial;
use rand::{Rng, SeedableRng};

fn circle_value(r: f64) -> f64 {
    r.max(1.0).ln() - 0.5 * ((1.0 + r * r) / 2.0).ln()
}

/// Best ratio `|P(x)|/max_K |P|` (FS norms) over random coefficient vectors,
/// polished by coordinate-wise random perturbation. A lower bound for
/// `exp(d·Λ^{(d)})` computed without any LP.
fn random_search(k: &SampledCompactum, x: &ProjectivePoint, d: usize, seed: u64) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = d + 1;
    let ratio = |c: &[C64]| {
        let p = HomogeneousPolynomial::new(1, d, c.to_vec()).unwrap();
        let sup = k.points().iter().map(|q| p.fs_section_norm(q.rep()).unwrap()).fold(0.0, f64::max);
        p.fs_section_norm(x.rep()).unwrap() / sup
    };
    let mut best: Vec<C64> = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut best_r = ratio(&best);
    for _ in 0..4000 {
        let c: Vec<C64> = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let r = ratio(&c);
        if r > best_r {
            best = c;
            best_r = r;
        }
    }
    let mut step = 0.1;
    for _ in 0..6000 {
        let c: Vec<C64> = best
            .iter()
            .map(|b| b + C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * step)
            .collect();
        let r = ratio(&c);
        if r > best_r {
            best = c;
            best_r = r;
        } else {
            step *= 0.999;
        }
    }
    best_r
}

#[test]
fn circle_low_degree_matches_search_and_closed_form() {
    let k = sample(&CurveGenerator::unit_circle(), 64).unwrap();
    let cfg = SolverConfig::default();
    for (i, z) in [C64::new(0.0, 0.0), C64::new(0.5, 0.2), C64::new(1.7, -0.4)].into_iter().enumerate() {
        let x = ProjectivePoint::from_affine(0, &[z]).unwrap();
        for d in [1, 2] {
            let r = truncated_extremal(&k, &x, d, &cfg).unwrap();
            let search = random_search(&k, &x, d, 100 + i as u64).ln() / d as f64;
            assert!(search <= r.lam_hi + 1e-9, "z={z} d={d}: search {search} above {r:?}");
            assert!(search >= r.lam_lo - 5e-3, "z={z} d={d}: search {search} far below {r:?}");
            // the circle value is attained by 1 or Z_1^d at every degree
            let v = circle_value(z.norm());
            assert!(r.lam_lo <= v + 1e-9 && v <= r.lam_hi + 1e-9, "z={z} d={d}");
        }
    }
}

/// Composite Simpson rule on `[0, 1]` for `-ln r · 2r/(1+r²)²`.
fn green_mass_quadrature(n: usize) -> f64 {
    let f = |r: f64| if r == 0.0 { 0.0 } else { -r.ln() * 2.0 * r / (1.0 + r * r).powi(2) };
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn disk_green_mass_is_half_ln2() {
    let q = green_mass_quadrature(200_000);
    assert!((q - 0.346_573_590_279_972_65).abs() < 1e-9, "{q}");
    assert!((DISK_GREEN_MASS - q).abs() < 1e-9);
    let k = sample(&CurveGenerator::unit_circle(), 256).unwrap();
    let g = green_for_compactum(&k, C64::new(0.0, 0.0), 0.02).unwrap();
    assert!((g.mass - q).abs() < 1e-3, "{}", g.mass);
}

fn exp_tail(d: usize) -> f64 {
    let mut term = 1.0;
    for n in 1..=d {
        term *= 0.5 / n as f64;
    }
    let mut s = 0.0;
    for n in d + 1..60 {
        term *= 0.5 / n as f64;
        s += term;
    }
    s
}

#[test]
fn exp_tails_frozen() {
    assert!((exp_tail(10) / 1.276_248_9e-11 - 1.0).abs() < 1e-7);
    assert!((exp_tail(20) / 9.549_931e-27 - 1.0).abs() < 1e-6);
}

#[test]
fn exp_graph_certificate_table_frozen() {
    let k = sample(&CurveGenerator::exp_graph(0.5, 40), 256).unwrap();
    let ladder = [2, 4, 5, 8, 10, 16, 20];
    let cert = certify_exclusion(&k, [C64::new(0.0, 0.0), C64::new(2.0, 0.0)], &Family::exp(40), &ladder).unwrap();
    let frozen = [6.4928, 7.7047, 8.4397, 10.7364, 12.2859, 16.9248, 19.9986];
    for (rec, c) in cert.records.iter().zip(frozen) {
        assert!((rec.c / c - 1.0).abs() < 2e-5, "d={} c={} frozen {c}", rec.d, rec.c);
        // off the graph at z=0, |P(x)| = 1 and sup_K is the tail sum at |z| = 1/2
        let tail = exp_tail(rec.d);
        assert!((rec.c - tail.powf(-1.0 / rec.d as f64)).abs() / rec.c < 1e-3, "d={}", rec.d);
    }
    assert!(cert.recheck() < 1e-12);
    // the verdict compares the top two rungs, so it needs a doubling ladder
    let doubling = certify_exclusion(&k, [C64::new(0.0, 0.0), C64::new(2.0, 0.0)], &Family::exp(40), &[1, 2, 5, 10, 20]).unwrap();
    assert_eq!(doubling.verdict, Verdict::Diverging);
    assert!(doubling.sampled_growth && doubling.analytic_growth);
}

#[test]
fn polydisk_norms_frozen() {
    let one = C64::new(1.0, 0.0);
    // (Z_0 + Z_1)^2: l1 = 4, attained at Z = (1, 1)
    let sq = HomogeneousPolynomial::from_terms(1, 2, &[(&[2, 0], one), (&[1, 1], 2.0 * one), (&[0, 2], one)]).unwrap();
    assert_eq!(sq.coeff_l1_norm(), 4.0);
    assert!((sq.polydisk_sup_lower(16).unwrap() - 4.0).abs() < 1e-12);
    // Z_0^2 - Z_1^2: l1 = 2, sup 2 at Z = (1, i)
    let diff = HomogeneousPolynomial::from_terms(1, 2, &[(&[2, 0], one), (&[0, 2], -one)]).unwrap();
    assert!((diff.polydisk_sup_lower(16).unwrap() - 2.0).abs() < 1e-12);
    // ((n+1)·4^{n+1})^d for n = 1, d = 2
    assert_eq!(((2 * 4u32.pow(2)) as f64).powi(2), 1024.0);
}
