//! The invariant super Kähler form determined by a convex potential.
//!
//! On `M = ℝ^{n+m} × (T_n × ℝ^m) × ℂ^{0|k}` with even coordinates `(x, y)` and
//! odd coordinates `(ξ, η)`, every invariant exact super Kähler form has the
//! shape
//!
//! ```text
//! ω = Σ_{p,q} ∂²F/∂x_p∂x_q dx_p ∧ dy_q + Σ_r (a_r (dξ_r)² + b_r (dη_r)²)
//! ```
//!
//! with `F` strictly convex and `a_r = b_r > 0`. Rescaling `ζ_r` brings the odd
//! coefficients to 1, which is the normalized form stored in
//! [`SuperKahlerData`]. Forms are represented only by this coefficient data.
//!
//! The moment map is `Φ(x, y, ξ, η) = (−F′(x), 2ξ)`. The identity
//! `d(Φ, v) = ι(v♯)ω` with `v♯ = Σ u_q ∂/∂y_q + Σ w_s ∂/∂ξ_s` holds with the
//! contraction convention `ι(∂/∂y_q)(dx_p ∧ dy_q) = −dx_p`, see
//! [`INTERIOR_PRODUCT_CONVENTION`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{imag_unit, to_f64_pair, Blade, GrassmannElement};
use crate::potential::ConvexPotential;

pub const INTERIOR_PRODUCT_CONVENTION: &str = "i(d/dy_q)(dx_p ^ dy_q) = -dx_p";

pub const MOMENT_TOLERANCE: f64 = 1e-8;
pub const DOLBEAULT_TOLERANCE: f64 = 1e-7;
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-7;
pub const CLOSEDNESS_STEP: f64 = 1e-4;

pub type EvenMatrixFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Coefficient matrix of the `dx_p ∧ dy_q` part.
#[derive(Clone)]
pub enum EvenBlock {
    /// The AD Hessian of the potential.
    Hessian,
    /// An arbitrary matrix field, used to exercise the axiom checks.
    Explicit(EvenMatrixFn),
}

impl fmt::Debug for EvenBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvenBlock::Hessian => f.write_str("Hessian"),
            EvenBlock::Explicit(_) => f.write_str("Explicit(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuperKahlerData {
    potential: ConvexPotential,
    k: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    zeta_scaling: Vec<f64>,
    even: EvenBlock,
}

/// Value of the moment map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub even_part: Vec<f64>,
    pub odd_part: Vec<f64>,
}

/// Builds the normalized form with all odd coefficients equal to 1.
pub fn build_form(potential: &ConvexPotential, k: usize) -> Result<SuperKahlerData> {
    build_form_with(potential, &vec![1.0; k], &vec![1.0; k])
}

/// Builds the form from pre-normalized odd coefficients `a_r (dξ_r)² + b_r (dη_r)²`
/// and rescales `ζ_r` by `1/√a_r`.
pub fn build_form_with(potential: &ConvexPotential, a: &[f64], b: &[f64]) -> Result<SuperKahlerData> {
    if !potential.is_certified() {
        return Err(Error::Uncertified(
            "potential has no strict convexity certificate".into(),
        ));
    }
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    for (r, (&ar, &br)) in a.iter().zip(b).enumerate() {
        if !(ar > 0.0 && ar.is_finite()) || !(br > 0.0 && br.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "odd coefficients must be positive, got a_{0} = {ar}, b_{0} = {br}",
                r + 1
            )));
        }
        if ar != br {
            return Err(Error::InvalidParameter(format!(
                "a (1,1)-form needs a_{0} = b_{0}, got {ar} and {br}",
                r + 1
            )));
        }
    }
    Ok(SuperKahlerData {
        potential: potential.clone(),
        k: a.len(),
        a: vec![1.0; a.len()],
        b: vec![1.0; b.len()],
        zeta_scaling: a.iter().map(|v| 1.0 / v.sqrt()).collect(),
        even: EvenBlock::Hessian,
    })
}

impl SuperKahlerData {
    /// Assembles form data without any validation or normalization. Intended
    /// for feeding deliberately broken data to [`verify_axioms`].
    pub fn from_raw_parts(potential: ConvexPotential, a: Vec<f64>, b: Vec<f64>, even: EvenBlock) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(SuperKahlerData {
            potential,
            k: a.len(),
            zeta_scaling: vec![1.0; a.len()],
            a,
            b,
            even,
        })
    }

    pub fn potential(&self) -> &ConvexPotential {
        &self.potential
    }

    /// `(n, m, k)`
    pub fn dims(&self) -> (usize, usize, usize) {
        let (n, m) = self.potential.dims();
        (n, m, self.k)
    }

    pub fn odd_coefficients(&self) -> (&[f64], &[f64]) {
        (&self.a, &self.b)
    }

    /// Factor applied to each `ζ_r` during normalization.
    pub fn zeta_scaling(&self) -> &[f64] {
        &self.zeta_scaling
    }

    pub fn even_block(&self) -> &EvenBlock {
        &self.even
    }

    /// Coefficient matrix `G_pq` of `dx_p ∧ dy_q` at `x`.
    pub fn even_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        match &self.even {
            EvenBlock::Hessian => Ok(self.potential.eval_jet2(x)?.hessian),
            EvenBlock::Explicit(f) => {
                let dim = self.potential.dim();
                if x.len() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        found: x.len(),
                    });
                }
                let g = f(x);
                if g.nrows() != dim || g.ncols() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        found: g.nrows(),
                    });
                }
                Ok(g)
            }
        }
    }
}

/// `Φ = (−F′(x), 2ξ)`. The `y` and `η` coordinates do not enter.
pub fn moment_map(form: &SuperKahlerData, x: &[f64], xi: &[f64]) -> Result<MomentValue> {
    if xi.len() != form.k {
        return Err(Error::Dimension {
            expected: form.k,
            found: xi.len(),
        });
    }
    let g = form.potential.gradient(x)?;
    Ok(MomentValue {
        even_part: g.iter().map(|v| -v).collect(),
        odd_part: xi.iter().map(|v| 2.0 * v).collect(),
    })
}

/// Outcome of one check over a set of sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    /// Largest residual seen; for positivity this is the smallest eigenvalue
    /// or coefficient instead.
    pub worst_residual: f64,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    fn residual(name: &str, tolerance: f64, results: Vec<(Vec<f64>, std::result::Result<f64, String>)>) -> CheckReport {
        let samples = results.len();
        let mut worst = 0.0f64;
        let mut witness = None;
        let mut note = None;
        for (point, r) in results {
            match r {
                Ok(v) if v > worst || (v.is_nan() && !worst.is_nan()) => {
                    worst = v;
                    witness = Some(point);
                }
                Ok(_) => {}
                Err(e) => {
                    if note.is_none() {
                        note = Some(e);
                        worst = f64::INFINITY;
                        witness = Some(point);
                    }
                }
            }
        }
        CheckReport {
            name: name.to_string(),
            passed: worst < tolerance,
            tolerance,
            worst_residual: worst,
            witness,
            samples,
            note,
        }
    }
}

/// All checks of one verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerReport {
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl KahlerReport {
    pub fn new(checks: Vec<CheckReport>) -> KahlerReport {
        KahlerReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Concatenates two reports.
    pub fn merge(mut self, other: KahlerReport) -> KahlerReport {
        self.checks.extend(other.checks);
        KahlerReport::new(self.checks)
    }
}

fn positivity(form: &SuperKahlerData, points: &[Vec<f64>]) -> CheckReport {
    let mut results: Vec<(Vec<f64>, std::result::Result<f64, String>)> = points
        .par_iter()
        .map(|x| {
            let r = form.even_matrix(x).map_err(|e| e.to_string()).map(|g| {
                let sym = (&g + g.transpose()) * 0.5;
                SymmetricEigen::new(sym).eigenvalues.min()
            });
            (x.clone(), r)
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut note = None;
    for (point, r) in results.drain(..) {
        match r {
            Ok(v) if v < worst => {
                worst = v;
                witness = Some(point);
            }
            Ok(_) => {}
            Err(e) if note.is_none() => {
                note = Some(e);
                worst = f64::NEG_INFINITY;
                witness = Some(point);
            }
            Err(_) => {}
        }
    }
    for (r, v) in form.a.iter().chain(&form.b).enumerate() {
        if *v < worst || v.is_nan() {
            worst = *v;
            witness = None;
            note = Some(format!("odd coefficient #{} is {v}", r + 1));
        }
    }
    CheckReport {
        name: "positivity".into(),
        passed: worst > 0.0,
        tolerance: 0.0,
        worst_residual: worst,
        witness,
        samples: points.len(),
        note,
    }
}

/// Central difference of the even block along `e_s`.
fn even_derivative(form: &SuperKahlerData, x: &[f64], s: usize, h: f64) -> Result<DMatrix<f64>> {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[s] += h;
    minus[s] -= h;
    Ok((form.even_matrix(&plus)? - form.even_matrix(&minus)?) / (2.0 * h))
}

fn closedness_residual(form: &SuperKahlerData, x: &[f64]) -> Result<f64> {
    let g = form.even_matrix(x)?;
    let dim = g.nrows();
    let scale = g.amax().max(1.0);
    let mut worst = (&g - g.transpose()).amax() / scale;
    let derivs: Vec<DMatrix<f64>> = (0..dim)
        .map(|s| even_derivative(form, x, s, CLOSEDNESS_STEP))
        .collect::<Result<_>>()?;
    let dscale = derivs.iter().map(|d| d.amax()).fold(1.0f64, f64::max);
    for s in 0..dim {
        for p in 0..dim {
            for q in 0..dim {
                let r = (derivs[s][(p, q)] - derivs[p][(s, q)]).abs() / dscale;
                worst = worst.max(r);
            }
        }
    }
    Ok(worst)
}

fn closedness(form: &SuperKahlerData, points: &[Vec<f64>]) -> CheckReport {
    let results = points
        .par_iter()
        .map(|x| (x.clone(), closedness_residual(form, x).map_err(|e| e.to_string())))
        .collect();
    CheckReport::residual("closedness", CLOSEDNESS_TOLERANCE, results)
}

fn consistency(form: &SuperKahlerData) -> CheckReport {
    let balanced = form.a.len() == form.k && form.b.len() == form.k;
    CheckReport {
        name: "consistency".into(),
        passed: balanced,
        tolerance: 0.0,
        worst_residual: 0.0,
        witness: None,
        samples: 0,
        note: Some("even and odd blocks carry no cross terms by construction".into()),
    }
}

/// Positivity, closedness and consistency of the form at the sample points.
pub fn verify_axioms(form: &SuperKahlerData, points: &[Vec<f64>]) -> KahlerReport {
    KahlerReport::new(vec![positivity(form, points), closedness(form, points), consistency(form)])
}

/// Coefficients of `d(Φ, v)` on `dx_p` and `dξ_s`.
fn moment_differential(form: &SuperKahlerData, x: &[f64], u: &[f64], w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = form.potential.eval_jet2(x)?.hessian;
    let dim = u.len();
    let even = (0..dim).map(|p| -(0..dim).map(|q| h[(p, q)] * u[q]).sum::<f64>()).collect();
    let odd = w.iter().map(|ws| 2.0 * ws).collect();
    Ok((even, odd))
}

/// Coefficients of `ι(v♯)ω` on `dx_p` and `dξ_s`.
fn contraction(form: &SuperKahlerData, x: &[f64], u: &[f64], w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = form.even_matrix(x)?;
    let dim = u.len();
    let even = (0..dim).map(|p| -(0..dim).map(|q| g[(p, q)] * u[q]).sum::<f64>()).collect();
    let odd = w.iter().zip(&form.a).map(|(ws, ar)| 2.0 * ar * ws).collect();
    Ok((even, odd))
}

/// Compares `d(Φ, v)` with `ι(v♯)ω` for `v = (u, w)` at each sample point.
pub fn verify_moment_identity(form: &SuperKahlerData, u: &[f64], w: &[f64], points: &[Vec<f64>]) -> Result<KahlerReport> {
    let dim = form.potential.dim();
    if u.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: u.len(),
        });
    }
    if w.len() != form.k {
        return Err(Error::Dimension {
            expected: form.k,
            found: w.len(),
        });
    }
    let per_point: Vec<(Vec<f64>, std::result::Result<(f64, f64), String>)> = points
        .par_iter()
        .map(|x| {
            let r = moment_differential(form, x, u, w)
                .and_then(|lhs| Ok((lhs, contraction(form, x, u, w)?)))
                .map(|((le, lo), (re, ro))| {
                    let even = le.iter().zip(&re).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    let odd = lo.iter().zip(&ro).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    (even, odd)
                })
                .map_err(|e| e.to_string());
            (x.clone(), r)
        })
        .collect();
    let even = per_point.iter().map(|(x, r)| (x.clone(), r.clone().map(|v| v.0))).collect();
    let odd = per_point.into_iter().map(|(x, r)| (x, r.map(|v| v.1))).collect();
    Ok(KahlerReport::new(vec![
        CheckReport::residual("moment_even", MOMENT_TOLERANCE, even),
        CheckReport::residual("moment_odd", MOMENT_TOLERANCE, odd),
    ]))
}

/// The odd potential `H = −i Σ ζ_r ζ̄_r`.
pub fn odd_potential(k: usize) -> Result<GrassmannElement> {
    let mut h = GrassmannElement::zero(k)?;
    for r in 1..=k {
        let term = GrassmannElement::generator(k, r)?.multiply(&GrassmannElement::generator(k, k + r)?)?;
        h = h.try_add(&term)?;
    }
    Ok(h.scale(&-imag_unit()))
}

/// `i ∂_{ζ̄_s} ∂_{ζ_r} H` as a real `k × k` matrix.
pub fn odd_levi_form(k: usize) -> Result<DMatrix<f64>> {
    let h = odd_potential(k)?;
    let unit = Blade::unit(k)?;
    let mut out = DMatrix::zeros(k, k);
    for r in 1..=k {
        let dr = h.derivation(r)?;
        for s in 1..=k {
            let c = dr.derivation(k + s)?.coefficient(&unit) * imag_unit();
            let (re, im) = to_f64_pair(&c);
            if im != 0.0 {
                return Err(Error::Domain("odd Levi form is not real".into()));
            }
            out[(r - 1, s - 1)] = re;
        }
    }
    Ok(out)
}

/// Wirtinger mixed partials `∂²F/∂z_j∂z̄_k` of `F(x)` viewed as a function of
/// `z = x + iy`, as (real, imaginary) matrices.
fn wirtinger(potential: &ConvexPotential, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let dim = x.len();
    let mut lifted = x.to_vec();
    lifted.extend(std::iter::repeat_n(0.0, dim));
    let h = potential.expr().jet2(&lifted)?.hessian;
    let re = DMatrix::from_fn(dim, dim, |j, k| 0.25 * (h[(j, k)] + h[(dim + j, dim + k)]));
    let im = DMatrix::from_fn(dim, dim, |j, k| 0.25 * (h[(j, dim + k)] - h[(dim + j, k)]));
    Ok((re, im))
}

/// Checks `∂²F/∂z_j∂z̄_k = ¼ ∂²F/∂x_j∂x_k` at the sample points and
/// `i ∂∂̄H = Σ a_r (dξ_r)²`-coefficients for the odd potential.
pub fn dolbeault_check(form: &SuperKahlerData, points: &[Vec<f64>]) -> KahlerReport {
    let potential = &form.potential;
    let results = points
        .par_iter()
        .map(|x| {
            let r = (|| -> Result<f64> {
                let (re, im) = wirtinger(potential, x)?;
                let quarter = potential.eval_jet2(x)?.hessian * 0.25;
                let scale = quarter.amax().max(1.0);
                Ok(((re - quarter).amax().max(im.amax())) / scale)
            })()
            .map_err(|e| e.to_string());
            (x.clone(), r)
        })
        .collect();
    let even = CheckReport::residual("dolbeault_even", DOLBEAULT_TOLERANCE, results);
    let odd = match odd_levi_form(form.k) {
        Ok(c) => {
            let target = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&form.a));
            CheckReport::residual("dolbeault_odd", DOLBEAULT_TOLERANCE, vec![(vec![], Ok((c - target).amax()))])
        }
        Err(e) => CheckReport::residual("dolbeault_odd", DOLBEAULT_TOLERANCE, vec![(vec![], Err(e.to_string()))]),
    };
    KahlerReport::new(vec![even, odd])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{SampleBox, DEFAULT_TAU};

    fn pts2() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![-0.3, 0.7]]
    }

    #[test]
    fn f1_form_and_moment_map() {
        let f = ConvexPotential::quadratic(2, 0).unwrap();
        let w = build_form(&f, 2).unwrap();
        assert_eq!(w.odd_coefficients(), (&[1.0, 1.0][..], &[1.0, 1.0][..]));
        assert_eq!(w.even_matrix(&[0.3, 0.4]).unwrap(), DMatrix::identity(2, 2) * 2.0);
        let mv = moment_map(&build_form(&f, 1).unwrap(), &[1.0, -1.0], &[0.5]).unwrap();
        assert_eq!(mv.even_part, vec![-2.0, 2.0]);
        assert_eq!(mv.odd_part, vec![1.0]);
    }

    #[test]
    fn f2_moment_at_origin_is_mu() {
        let f = ConvexPotential::hyperbolic(2, 0, &[3.0, -2.0], 0.5).unwrap();
        let mv = moment_map(&build_form(&f, 1).unwrap(), &[0.0, 0.0], &[0.0]).unwrap();
        assert_eq!(mv.even_part, vec![3.0, -2.0]);
        assert_eq!(mv.odd_part, vec![0.0]);
    }

    #[test]
    fn normalization_rescales_zeta() {
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let w = build_form_with(&f, &[4.0, 9.0], &[4.0, 9.0]).unwrap();
        assert_eq!(w.odd_coefficients().0, &[1.0, 1.0]);
        assert_eq!(w.zeta_scaling(), &[0.5, 1.0 / 3.0]);
        assert!(build_form_with(&f, &[1.0], &[2.0]).is_err());
        assert!(build_form_with(&f, &[-1.0], &[-1.0]).is_err());
    }

    #[test]
    fn uncertified_potential_is_rejected() {
        let f = ConvexPotential::from_expression("x1^4", 1, 0).unwrap();
        assert!(matches!(build_form(&f, 1), Err(Error::Uncertified(_))));
        let refuted = f.certify(&SampleBox::cube(1, 1.0), 11, DEFAULT_TAU).unwrap();
        assert!(refuted.is_err());
    }

    #[test]
    fn axioms_hold_for_f1() {
        let f = ConvexPotential::quadratic(2, 0).unwrap();
        let report = verify_axioms(&build_form(&f, 2).unwrap(), &pts2());
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn skew_perturbation_breaks_closedness() {
        let f = ConvexPotential::quadratic(2, 0).unwrap();
        let even: EvenMatrixFn = Arc::new(|x: &[f64]| DMatrix::from_row_slice(2, 2, &[2.0, 2.0 + x[0], 2.0 - x[0], 5.0]));
        let w = SuperKahlerData::from_raw_parts(f, vec![1.0], vec![1.0], EvenBlock::Explicit(even)).unwrap();
        let report = verify_axioms(&w, &pts2());
        assert!(!report.check("closedness").unwrap().passed);
        assert!(report.check("positivity").unwrap().passed);
    }

    #[test]
    fn negative_odd_coefficient_breaks_positivity() {
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let w = SuperKahlerData::from_raw_parts(f, vec![-1.0], vec![-1.0], EvenBlock::Hessian).unwrap();
        let report = verify_axioms(&w, &[vec![0.0]]);
        let p = report.check("positivity").unwrap();
        assert!(!p.passed);
        assert_eq!(p.worst_residual, -1.0);
    }

    #[test]
    fn moment_identity_examples() {
        let f = ConvexPotential::quadratic(2, 0).unwrap();
        let w = build_form(&f, 1).unwrap();
        assert!(verify_moment_identity(&w, &[1.0, 0.0], &[0.0], &pts2()).unwrap().passed);
        assert!(verify_moment_identity(&w, &[0.0, 0.0], &[1.0], &pts2()).unwrap().passed);
        assert!(verify_moment_identity(&w, &[0.0, 0.0], &[0.0], &pts2()).unwrap().passed);
        let (e, o) = contraction(&w, &[0.2, 0.1], &[1.0, 0.0], &[1.0]).unwrap();
        assert_eq!(e, vec![-2.0, 0.0]);
        assert_eq!(o, vec![2.0]);
    }

    #[test]
    fn unnormalized_odd_block_fails_moment_identity() {
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let w = SuperKahlerData::from_raw_parts(f, vec![3.0], vec![3.0], EvenBlock::Hessian).unwrap();
        let r = verify_moment_identity(&w, &[0.0], &[1.0], &[vec![0.0]]).unwrap();
        assert!(r.check("moment_even").unwrap().passed);
        assert!(!r.check("moment_odd").unwrap().passed);
    }

    #[test]
    fn dolbeault_examples() {
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let (re, im) = wirtinger(&f, &[0.7]).unwrap();
        assert_eq!(re[(0, 0)], 0.5);
        assert_eq!(im[(0, 0)], 0.0);
        let f2 = ConvexPotential::hyperbolic(2, 0, &[3.0, -2.0], 0.5).unwrap();
        let (re, _) = wirtinger(&f2, &[0.0, 0.0]).unwrap();
        assert_eq!(re[(0, 0)], 0.125);
        assert_eq!(re[(1, 1)], 0.125);
        let c = ConvexPotential::from_expression("3", 1, 0).unwrap();
        let (re, _) = wirtinger(&c, &[1.0]).unwrap();
        assert_eq!(re[(0, 0)], 0.0);
        let report = dolbeault_check(&build_form(&f2, 3).unwrap(), &pts2());
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn odd_levi_form_is_identity() {
        for k in 0..=4 {
            assert_eq!(odd_levi_form(k).unwrap(), DMatrix::identity(k, k));
        }
        assert_eq!(odd_potential(1).unwrap().to_string(), "-i*zeta1*zbar1");
    }

    #[test]
    fn moment_map_dimension_errors() {
        let f = ConvexPotential::quadratic(2, 0).unwrap();
        let w = build_form(&f, 1).unwrap();
        assert!(moment_map(&w, &[0.0], &[0.0]).is_err());
        assert!(moment_map(&w, &[0.0, 0.0], &[]).is_err());
    }
}
