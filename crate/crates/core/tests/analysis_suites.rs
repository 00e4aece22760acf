use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superquant::kahler::{
    build_form, dolbeault_check, moment_map, verify_axioms, verify_moment_identity, EvenBlock, SuperKahlerData,
};
use superquant::potential::{ConvexPotential, SampleBox, DEFAULT_TAU};

fn suite() -> Vec<ConvexPotential> {
    let dsl = [
        ("x1^2 + x1*x2 + x2^2 + exp(x1)", 2, 0),
        ("sqrt(1 + x1^2 + x2^2) + x1^2 + 0.5*x2^2", 1, 1),
        ("x1^2 + x2^2 + x3^2 + exp(0.5*(x1 + x2 - x3))", 1, 2),
    ];
    let mut out = vec![
        ConvexPotential::quadratic(2, 0).unwrap(),
        ConvexPotential::quadratic(1, 1).unwrap(),
        ConvexPotential::hyperbolic(2, 0, &[3.0, -2.0], 0.5).unwrap(),
        ConvexPotential::hyperbolic(1, 1, &[2.5, -2.0], 1.5).unwrap(),
    ];
    for (text, n, m) in dsl {
        let f = ConvexPotential::from_expression(text, n, m).unwrap();
        let f = f.certify(&SampleBox::cube(n + m, 2.0), 9, DEFAULT_TAU).unwrap().unwrap();
        out.push(f);
    }
    out
}

fn random_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect()
}

fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[j] += h;
            q[j] -= h;
            (f(&p) - f(&q)) / (2.0 * h)
        })
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn ad_matches_finite_differences() {
    for (idx, f) in suite().iter().enumerate() {
        for x in random_points(f.dim(), 100, 17 + idx as u64) {
            let jet = f.eval_jet2(&x).unwrap();
            let g = fd_gradient(&|p| f.value(p), &x, 1e-5);
            for j in 0..f.dim() {
                assert!(rel_err(jet.gradient[j], g[j]) < 1e-5, "gradient {f:?} at {x:?}");
            }
            for j in 0..f.dim() {
                let col = fd_gradient(&|p| f.eval_jet2(p).unwrap().gradient[j], &x, 1e-5);
                for i in 0..f.dim() {
                    assert!(rel_err(jet.hessian[(i, j)], col[i]) < 1e-5, "hessian {f:?} at {x:?}");
                }
            }
        }
    }
}

#[test]
fn kahler_suite_passes_on_certified_potentials() {
    for (idx, f) in suite().iter().enumerate() {
        let k = 2;
        let form = build_form(f, k).unwrap();
        let points = random_points(f.dim(), 25, 100 + idx as u64);
        let axioms = verify_axioms(&form, &points);
        assert!(axioms.passed, "{axioms:?}");
        for j in 0..f.dim() {
            let mut u = vec![0.0; f.dim()];
            u[j] = 1.0;
            let r = verify_moment_identity(&form, &u, &[0.0; 2], &points).unwrap();
            assert!(r.passed, "{r:?}");
        }
        for s in 0..k {
            let mut w = vec![0.0; k];
            w[s] = 1.0;
            let r = verify_moment_identity(&form, &vec![0.0; f.dim()], &w, &points).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let d = dolbeault_check(&form, &points);
        assert!(d.passed, "{d:?}");
    }
}

#[test]
fn moment_even_part_matches_finite_difference_gradient() {
    for (idx, f) in suite().iter().enumerate() {
        let form = build_form(f, 1).unwrap();
        for x in random_points(f.dim(), 20, 300 + idx as u64) {
            let mv = moment_map(&form, &x, &[0.25]).unwrap();
            let g = fd_gradient(&|p| f.value(p), &x, 1e-6);
            for j in 0..f.dim() {
                assert!((mv.even_part[j] + g[j]).abs() < 1e-6 * g[j].abs().max(1.0));
            }
            assert_eq!(mv.odd_part, vec![0.5]);
        }
    }
}

#[test]
fn asymmetric_even_block_fails_closedness() {
    let f = ConvexPotential::quadratic(2, 0).unwrap();
    let skew = Arc::new(|x: &[f64]| DMatrix::from_row_slice(2, 2, &[2.0, 2.0 + x[0], 2.0 - x[0], 5.0]));
    let form = SuperKahlerData::from_raw_parts(f, vec![1.0], vec![1.0], EvenBlock::Explicit(skew)).unwrap();
    let report = verify_axioms(&form, &random_points(2, 10, 5));
    assert!(!report.check("closedness").unwrap().passed);
}

proptest! {
    #[test]
    fn hessian_is_exactly_symmetric(x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let f = ConvexPotential::from_expression("x1*x2*x3 + exp(x1*x2) + sqrt(x3^2 + 1)/(x1^2 + 2)", 3, 0).unwrap();
        let h = f.eval_jet2(&x).unwrap().hessian;
        prop_assert_eq!(h.clone(), h.transpose());
    }

    #[test]
    fn moment_map_is_minus_gradient_and_twice_xi(x in prop::collection::vec(-3.0f64..3.0, 2), xi in -2.0f64..2.0) {
        let f = ConvexPotential::hyperbolic(1, 1, &[0.5, -1.0], 0.75).unwrap();
        let form = build_form(&f, 1).unwrap();
        let mv = moment_map(&form, &x, &[xi]).unwrap();
        let g = f.gradient(&x).unwrap();
        prop_assert_eq!(mv.even_part, vec![-g[0], -g[1]]);
        prop_assert_eq!(mv.odd_part, vec![2.0 * xi]);
    }

    #[test]
    fn gradient_is_strictly_monotone(a in prop::collection::vec(-3.0f64..3.0, 2), b in prop::collection::vec(-3.0f64..3.0, 2)) {
        let f = ConvexPotential::hyperbolic(2, 0, &[3.0, -2.0], 1.5).unwrap();
        let ga = f.gradient(&a).unwrap();
        let gb = f.gradient(&b).unwrap();
        let dot: f64 = (0..2).map(|j| (ga[j] - gb[j]) * (a[j] - b[j])).sum();
        prop_assert!(dot >= 0.0);
        if a != b {
            prop_assert!(dot > 0.0);
        }
    }
}
