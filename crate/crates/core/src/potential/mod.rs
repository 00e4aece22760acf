//! Strictly convex potentials `F: ℝ^{n+m} → ℝ`.
//!
//! A potential is an [`Expr`] over `x1..x{n+m}` (the first `n` coordinates
//! belong to the torus factor, the remaining `m` to the flat factor) together
//! with a convexity certificate. The two built-in families carry closed-form
//! certificates; parsed expressions are certified by sampling the Hessian on a
//! grid, which is a sampled certificate and not a proof.

mod expr;
mod jet;

use nalgebra::{DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use expr::{parse, parse_in, Expr};
pub use jet::Jet2;

use crate::error::{Error, Result};

/// Default eigenvalue threshold for grid certification.
pub const DEFAULT_TAU: f64 = 1e-8;

/// Axis-aligned box `[lo_j, hi_j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn cube(dim: usize, half_width: f64) -> SampleBox {
        SampleBox {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::Dimension {
                expected: self.lo.len(),
                found: self.hi.len(),
            });
        }
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::InvalidParameter(format!("box bounds [{l}, {h}] not ordered and finite")));
            }
        }
        Ok(())
    }

    /// Tensor grid with `density` points per axis, endpoints included.
    pub fn grid(&self, density: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                if density <= 1 {
                    vec![0.5 * (l + h)]
                } else {
                    (0..density)
                        .map(|i| l + (h - l) * i as f64 / (density - 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut points = vec![Vec::with_capacity(axes.len())];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexityCertificate {
    ClosedForm {
        reason: String,
    },
    GridSampled {
        sample_box: SampleBox,
        density: usize,
        tau: f64,
        min_eigenvalue: f64,
    },
}

/// A grid point where the Hessian failed to clear `tau`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub point: Vec<f64>,
    /// `None` when the potential could not be evaluated at `point`.
    pub min_eigenvalue: Option<f64>,
    pub tau: f64,
    pub sample_box: SampleBox,
    pub reason: String,
}

/// Where the potential came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSource {
    /// `Σ x_j²`
    Quadratic,
    /// `Σ (−μ_j x_j + ε √(x_j² + 1))`
    Hyperbolic { mu: Vec<f64>, epsilon: f64 },
    Expression { text: String },
}

/// Closed-form image of the gradient map, known for the built-in families.
#[derive(Clone, Debug, PartialEq)]
pub enum GradientImage {
    Everything,
    /// Open box `∏ (lo_j, hi_j)`.
    OpenBox { lo: Vec<f64>, hi: Vec<f64> },
}

impl GradientImage {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            GradientImage::Everything => true,
            GradientImage::OpenBox { lo, hi } => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l < v && v < h),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPotential {
    expr: Expr,
    source: PotentialSource,
    n: usize,
    m: usize,
    certificate: Option<ConvexityCertificate>,
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n + m == 0 {
        return Err(Error::InvalidParameter("potential needs n + m >= 1".into()));
    }
    Ok(())
}

impl ConvexPotential {
    /// `F₁(x) = x₁² + … + x_{n+m}²`, certified in closed form (Hessian `2I`).
    pub fn quadratic(n: usize, m: usize) -> Result<ConvexPotential> {
        check_dims(n, m)?;
        let expr = (0..n + m)
            .map(|j| Expr::Pow(Box::new(Expr::var(j)), 2))
            .reduce(|a, b| a + b)
            .expect("at least one variable");
        Ok(ConvexPotential {
            expr,
            source: PotentialSource::Quadratic,
            n,
            m,
            certificate: Some(ConvexityCertificate::ClosedForm {
                reason: "Hessian is 2I".into(),
            }),
        })
    }

    /// `F₂(x) = Σ (−μ_j x_j + ε √(x_j² + 1))`, certified in closed form
    /// (Hessian `diag ε (x_j² + 1)^{-3/2}`). `mu` has length `n + m`.
    pub fn hyperbolic(n: usize, m: usize, mu: &[f64], epsilon: f64) -> Result<ConvexPotential> {
        check_dims(n, m)?;
        if mu.len() != n + m {
            return Err(Error::Dimension {
                expected: n + m,
                found: mu.len(),
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        let expr = mu
            .iter()
            .enumerate()
            .map(|(j, &mu_j)| {
                let linear = Expr::constant(-mu_j) * Expr::var(j);
                let radical = Expr::Sqrt(Box::new(Expr::Pow(Box::new(Expr::var(j)), 2) + Expr::constant(1.0)));
                linear + Expr::constant(epsilon) * radical
            })
            .reduce(|a, b| a + b)
            .expect("at least one variable");
        Ok(ConvexPotential {
            expr,
            source: PotentialSource::Hyperbolic {
                mu: mu.to_vec(),
                epsilon,
            },
            n,
            m,
            certificate: Some(ConvexityCertificate::ClosedForm {
                reason: "Hessian is diag(ε (x_j² + 1)^(-3/2)) with ε > 0".into(),
            }),
        })
    }

    /// Parses `text` over `x1..x{n+m}`. The result is uncertified until
    /// [`ConvexPotential::certify`] succeeds.
    pub fn from_expression(text: &str, n: usize, m: usize) -> Result<ConvexPotential> {
        check_dims(n, m)?;
        let expr = parse_in(text, n + m)?;
        Ok(ConvexPotential {
            expr,
            source: PotentialSource::Expression { text: text.to_string() },
            n,
            m,
            certificate: None,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn source(&self) -> &PotentialSource {
        &self.source
    }

    /// `(n, m)`: torus and flat dimensions.
    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn certificate(&self) -> Option<&ConvexityCertificate> {
        self.certificate.as_ref()
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    /// Value, gradient and Hessian at `x` by forward-mode AD.
    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.expr.jet2(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(self.eval_jet2(x)?.gradient)
    }

    /// Closed-form image of `F′` for the built-in families.
    pub fn gradient_image(&self) -> Option<GradientImage> {
        match &self.source {
            PotentialSource::Quadratic => Some(GradientImage::Everything),
            PotentialSource::Hyperbolic { mu, epsilon } => Some(GradientImage::OpenBox {
                lo: mu.iter().map(|m| -m - epsilon).collect(),
                hi: mu.iter().map(|m| -m + epsilon).collect(),
            }),
            PotentialSource::Expression { .. } => None,
        }
    }

    /// Certifies strict convexity by sampling; built-ins keep their
    /// closed-form certificate.
    pub fn certify(
        &self,
        sample_box: &SampleBox,
        density: usize,
        tau: f64,
    ) -> Result<std::result::Result<ConvexPotential, Refutation>> {
        if matches!(self.certificate, Some(ConvexityCertificate::ClosedForm { .. })) {
            return Ok(Ok(self.clone()));
        }
        Ok(certify_strict_convexity(self, sample_box, density, tau)?.map(|certificate| {
            let mut out = self.clone();
            out.certificate = Some(certificate);
            out
        }))
    }
}

/// Smallest Hessian eigenvalue at `x`.
pub fn min_hessian_eigenvalue(f: &ConvexPotential, x: &[f64]) -> Result<f64> {
    let h = f.eval_jet2(x)?.hessian;
    Ok(SymmetricEigen::new(h).eigenvalues.min())
}

/// Samples the Hessian on a `density`-per-axis grid over `sample_box` and
/// checks that its minimum eigenvalue exceeds `tau` everywhere. Built-in
/// potentials return their closed-form certificate without sampling.
///
/// The witness of a refutation is the grid point with the smallest
/// eigenvalue (first in grid order on ties); unevaluable points take
/// precedence.
pub fn certify_strict_convexity(
    f: &ConvexPotential,
    sample_box: &SampleBox,
    density: usize,
    tau: f64,
) -> Result<std::result::Result<ConvexityCertificate, Refutation>> {
    if let Some(c @ ConvexityCertificate::ClosedForm { .. }) = f.certificate() {
        return Ok(Ok(c.clone()));
    }
    sample_box.validate()?;
    if sample_box.dim() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            found: sample_box.dim(),
        });
    }
    if density == 0 {
        return Err(Error::InvalidParameter("grid density must be >= 1".into()));
    }
    let points = sample_box.grid(density);
    let samples: Vec<(usize, Option<f64>, String)> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| match min_hessian_eigenvalue(f, p) {
            Ok(ev) => (i, Some(ev), String::new()),
            Err(e) => (i, None, e.to_string()),
        })
        .collect();

    if let Some((i, _, reason)) = samples.iter().find(|(_, ev, _)| ev.is_none()) {
        return Ok(Err(Refutation {
            point: points[*i].clone(),
            min_eigenvalue: None,
            tau,
            sample_box: sample_box.clone(),
            reason: format!("evaluation failed: {reason}"),
        }));
    }
    let (argmin, min_ev) = samples
        .iter()
        .map(|(i, ev, _)| (*i, ev.expect("checked above")))
        .fold((0usize, f64::INFINITY), |acc, (i, ev)| if ev < acc.1 { (i, ev) } else { acc });
    if min_ev > tau {
        Ok(Ok(ConvexityCertificate::GridSampled {
            sample_box: sample_box.clone(),
            density,
            tau,
            min_eigenvalue: min_ev,
        }))
    } else {
        Ok(Err(Refutation {
            point: points[argmin].clone(),
            min_eigenvalue: Some(min_ev),
            tau,
            sample_box: sample_box.clone(),
            reason: format!("minimum Hessian eigenvalue {min_ev:e} <= tau {tau:e}"),
        }))
    }
}
