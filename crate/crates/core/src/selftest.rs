//! A quick invariant sweep across every module, used by `superquant selftest`.
//!
//! The blade sign table can be deliberately corrupted through
//! [`SelfTestOptions::sign_fault`] so that callers can confirm the sweep
//! actually notices broken algebra.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bergman::{classify_weight, weighted_norm_integral, ClassifyParams, TruncationSchedule, Verdict};
use crate::grassmann::{blade_product, i_power_reduced, joint_derivation_kernel, real, star, Blade, GrassmannElement, Sign};
use crate::kahler::{build_form, dolbeault_check, verify_axioms, verify_moment_identity};
use crate::potential::ConvexPotential;
use crate::reps::{lambda_module_checks, odd_triviality_check, SuperHilbertSample, Weight};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelfTestOptions {
    /// Flip the sign of the product `ζ₁·ζ₂` in the table under test.
    pub sign_fault: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub passed: bool,
    pub checks: Vec<SelfCheck>,
}

type Product = Option<(Sign, Blade)>;

fn table_product(a: Blade, b: Blade, fault: bool) -> Product {
    let p = blade_product(a, b).expect("same k");
    let first_pair = a.slots() == [1] && b.slots() == [2];
    match p {
        Some((s, blade)) if fault && first_pair => Some((s.flip(), blade)),
        other => other,
    }
}

fn all_blades(k: usize) -> Vec<Blade> {
    (0u32..1 << (2 * k))
        .map(|m| {
            let slots: Vec<usize> = (0..2 * k).filter(|b| m & (1 << b) != 0).map(|b| b + 1).collect();
            Blade::new(k, &slots).expect("valid slots")
        })
        .collect()
}

fn then(p: Product, c: Blade, fault: bool) -> Product {
    let (s, ab) = p?;
    let (t, abc) = table_product(ab, c, fault)?;
    Some((s.times(t), abc))
}

fn sign_table(fault: bool) -> Result<String, String> {
    for k in 1..=3 {
        let bs = all_blades(k);
        for &a in &bs {
            for &b in &bs {
                let ab = table_product(a, b, fault);
                let ba = table_product(b, a, fault);
                let expected = ba.map(|(s, x)| {
                    let odd = a.degree() * b.degree() % 2 == 1;
                    (if odd { s.flip() } else { s }, x)
                });
                if ab != expected {
                    return Err(format!("super-commutativity fails for {:?} and {:?} at k={k}", a.slots(), b.slots()));
                }
                for &c in &bs {
                    let left = then(ab, c, fault);
                    let right = table_product(b, c, fault).and_then(|(s, bc)| {
                        table_product(a, bc, fault).map(|(t, abc)| (s.times(t), abc))
                    });
                    if left != right {
                        return Err(format!("associativity fails at k={k}"));
                    }
                }
            }
        }
    }
    Ok("associativity and super-commutativity of blade products, k <= 3".into())
}

fn algebra() -> Result<String, String> {
    for k in 0..=3 {
        let top = Blade::top(k).map_err(|e| e.to_string())?;
        for b in all_blades(k) {
            let m = GrassmannElement::monomial(real(1), b);
            let lhs = m.multiply(&star(b)).map_err(|e| e.to_string())?;
            if lhs != GrassmannElement::monomial(i_power_reduced(b.degree()), top) {
                return Err(format!("star relation fails for {:?}", b.slots()));
            }
            for slot in 1..=2 * k {
                if m.derivation(slot).map_err(|e| e.to_string())?.berezin_top() != real(0) {
                    return Err("Berezin integral of a derivative is nonzero".into());
                }
            }
        }
        let kernel = joint_derivation_kernel(k).map_err(|e| e.to_string())?;
        if kernel != vec![GrassmannElement::one(k).map_err(|e| e.to_string())?] {
            return Err(format!("derivation kernel is not the constants at k={k}"));
        }
        let lm = lambda_module_checks(k).map_err(|e| e.to_string())?;
        if !lm.passed {
            return Err(format!("module checks fail at k={k}"));
        }
    }
    Ok("star relation, Berezin, kernel and module checks, k <= 3".into())
}

fn differentiation() -> Result<String, String> {
    let f = ConvexPotential::hyperbolic(1, 1, &[0.5, -1.0], 0.75).map_err(|e| e.to_string())?;
    let h = 1e-5;
    let mut worst = 0.0f64;
    for x in [[0.0, 0.0], [1.5, -0.3], [-2.0, 0.7]] {
        let g = f.gradient(&x).map_err(|e| e.to_string())?;
        for j in 0..2 {
            let (mut p, mut q) = (x, x);
            p[j] += h;
            q[j] -= h;
            let fd = (f.value(&p) - f.value(&q)) / (2.0 * h);
            worst = worst.max((g[j] - fd).abs() / fd.abs().max(1.0));
        }
    }
    if worst < 1e-6 {
        Ok(format!("gradient against central differences, worst {worst:.1e}"))
    } else {
        Err(format!("gradient mismatch {worst:e}"))
    }
}

fn quadrature() -> Result<String, String> {
    let f = ConvexPotential::quadratic(1, 0).map_err(|e| e.to_string())?;
    let v = weighted_norm_integral(&[0.0], &f, &TruncationSchedule::default()).map_err(|e| e.to_string())?;
    let value = v.value().ok_or("Gaussian integral did not converge")?;
    let exact = (std::f64::consts::PI / 2.0).sqrt();
    let rel = (value - exact).abs() / exact;
    if rel < 1e-6 {
        Ok(format!("Gaussian integral, relative error {rel:.1e}"))
    } else {
        Err(format!("Gaussian integral off by {rel:e}"))
    }
}

fn kahler() -> Result<String, String> {
    let f = ConvexPotential::quadratic(1, 1).map_err(|e| e.to_string())?;
    let form = build_form(&f, 2).map_err(|e| e.to_string())?;
    let pts = vec![vec![0.0, 0.0], vec![1.0, -0.5], vec![-1.5, 2.0]];
    let mut ok = verify_axioms(&form, &pts).passed && dolbeault_check(&form, &pts).passed;
    ok &= verify_moment_identity(&form, &[1.0, 0.5], &[0.0, 1.0], &pts)
        .map_err(|e| e.to_string())?
        .passed;
    if ok {
        Ok("axioms, moment identity and Dolbeault check on the quadratic potential".into())
    } else {
        Err("super Kahler checks fail on the quadratic potential".into())
    }
}

fn classification() -> Result<String, String> {
    let params = ClassifyParams::default();
    let f1 = ConvexPotential::quadratic(1, 0).map_err(|e| e.to_string())?;
    let f2 = ConvexPotential::hyperbolic(1, 0, &[2.0], 0.5).map_err(|e| e.to_string())?;
    let cases = [(&f1, 0, Verdict::Occurs), (&f1, 3, Verdict::Occurs), (&f2, 2, Verdict::Occurs), (&f2, 0, Verdict::DoesNotOccur)];
    for (f, t, expected) in cases {
        let w = Weight::new(vec![t], vec![]);
        let c = classify_weight(&w, f, &params).map_err(|e| e.to_string())?;
        if c.verdict != expected {
            return Err(format!("weight {w} classified {} instead of {expected}", c.verdict));
        }
    }
    Ok("four weights on the quadratic and hyperbolic potentials".into())
}

fn unitarity(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = SuperHilbertSample::random(2, 2, &mut rng).map_err(|e| e.to_string())?;
    let r = odd_triviality_check(&v, 20, &mut rng);
    if r.passed {
        Ok(format!("identity residual {:.1e} on a random 2|2 form", r.identity_residual))
    } else {
        Err("odd triviality check fails on a positive form".into())
    }
}

pub fn run(options: SelfTestOptions) -> SelfTestReport {
    let checks: Vec<(&str, Result<String, String>)> = vec![
        ("sign_table", sign_table(options.sign_fault)),
        ("grassmann", algebra()),
        ("differentiation", differentiation()),
        ("quadrature", quadrature()),
        ("kahler", kahler()),
        ("classification", classification()),
        ("unitarity", unitarity(options.seed)),
    ];
    let checks: Vec<SelfCheck> = checks
        .into_iter()
        .map(|(name, r)| {
            let (passed, detail) = match r {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SelfCheck {
                name: name.into(),
                passed,
                detail,
            }
        })
        .collect();
    SelfTestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
