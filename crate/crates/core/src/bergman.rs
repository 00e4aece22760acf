//! Convergence of the weighted norms `∫ e^{−2λ·x − 2F(x)} dx` and the two
//! occurrence oracles built on them.
//!
//! A holomorphic section `e^{−λz} ζ_P` has squared norm proportional to the
//! integral above, so the representation with weight `λ` occurs exactly when
//! the integral converges. For strictly convex `F` this is equivalent to
//! `−λ` lying in the (open) image of `F′`, i.e. to the convex function
//! `G(x) = F(x) + λ·x` attaining its minimum. The first oracle integrates on
//! expanding boxes, the second runs a damped Newton iteration on `G`; a
//! weight is classified only when both agree.
//!
//! The `y` directions contribute a constant factor. Torus directions carry
//! the Haar measure of total volume 1 and flat directions are integrated
//! against the same normalized character pairing, so the factor is 1.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{to_f64_pair, Blade, Coeff, GrassmannElement, Parity};
use crate::potential::{ConvexPotential, Expr};
use crate::reps::Weight;

pub const WEIGHT_CONVENTION: &str = "exp(-2*lambda.x - 2*F(x))";
pub const HAAR_CONVENTION: &str = "torus and y directions contribute factor 1";
pub const DEFAULT_DELTA: f64 = 1e-3;

/// Expanding-box quadrature plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TruncationSchedule {
    pub initial_radius: f64,
    pub growth: f64,
    pub max_doublings: usize,
    /// Gauss–Legendre nodes per axis per panel.
    pub order: usize,
    /// Panel width on the initial box.
    pub initial_panel_width: f64,
    /// Panels on each side of every new shell.
    pub shell_panels: usize,
    pub relative_tolerance: f64,
    pub divergence_ratio: f64,
    pub divergence_run: usize,
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        TruncationSchedule {
            initial_radius: 4.0,
            growth: 2.0,
            max_doublings: 6,
            order: 32,
            initial_panel_width: 1.0,
            shell_panels: 8,
            relative_tolerance: 1e-6,
            divergence_ratio: 10.0,
            divergence_run: 3,
        }
    }
}

impl TruncationSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("truncation schedule: {what}")));
        if !(self.initial_radius > 0.0 && self.initial_radius.is_finite()) {
            return bad("initial radius must be > 0");
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return bad("growth factor must be > 1");
        }
        if self.max_doublings < 3 {
            return bad("at least 3 doublings are needed");
        }
        if self.order == 0 || self.shell_panels == 0 {
            return bad("order and shell panels must be >= 1");
        }
        if !(self.initial_panel_width > 0.0) {
            return bad("panel width must be > 0");
        }
        if !(self.relative_tolerance > 0.0) || !(self.divergence_ratio > 1.0) || self.divergence_run == 0 {
            return bad("tolerance, ratio and run length must be positive");
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.max_doublings)
            .map(|j| self.initial_radius * self.growth.powi(j as i32))
            .collect()
    }

    /// Axis panels in creation order: the initial box first, then each shell.
    fn panels(&self) -> (Vec<(f64, f64)>, Vec<usize>) {
        let r0 = self.initial_radius;
        let count = ((2.0 * r0) / self.initial_panel_width).ceil().max(1.0) as usize;
        let width = 2.0 * r0 / count as f64;
        let mut panels: Vec<(f64, f64)> = (0..count)
            .map(|i| (-r0 + width * i as f64, -r0 + width * (i + 1) as f64))
            .collect();
        let mut ends = vec![panels.len()];
        let radii = self.radii();
        for w in radii.windows(2) {
            let (inner, outer) = (w[0], w[1]);
            let step = (outer - inner) / self.shell_panels as f64;
            for i in 0..self.shell_panels {
                let a = inner + step * i as f64;
                let b = inner + step * (i + 1) as f64;
                panels.push((-b, -a));
                panels.push((a, b));
            }
            ends.push(panels.len());
        }
        (panels, ends)
    }
}

/// Outcome of a convergence test.
///
/// For the quadrature oracle `history` holds the natural logarithms of the
/// successive truncations and `growth_witness` the logarithms of the last
/// truncations that grew by the divergence ratio. For the Newton oracle
/// `history` holds the values of `F(x) + λ·x` along the iterates,
/// `witness` the minimizer and `growth_witness` the norms of the last
/// iterates before they left the escape radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    Converges {
        value: f64,
        error_estimate: f64,
        history: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<f64>>,
    },
    Diverges {
        growth_witness: Vec<f64>,
    },
    Inconclusive {
        reason: String,
        history: Vec<f64>,
    },
}

impl ConvergenceVerdict {
    pub fn converges(&self) -> bool {
        matches!(self, ConvergenceVerdict::Converges { .. })
    }

    pub fn diverges(&self) -> bool {
        matches!(self, ConvergenceVerdict::Diverges { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ConvergenceVerdict::Converges { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            ConvergenceVerdict::Converges { witness, .. } => witness.as_deref(),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    const EMPTY: LogSum = LogSum {
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };

    fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.scaled += (v - self.max).exp();
        }
    }

    fn merge(&mut self, o: LogSum) {
        if o.max == f64::NEG_INFINITY {
            return;
        }
        if o.max > self.max {
            self.scaled = self.scaled * (self.max - o.max).exp() + o.scaled;
            self.max = o.max;
        } else {
            self.scaled += o.scaled * (o.max - self.max).exp();
        }
    }

    fn ln(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

/// Nodes and log-weights of one panel.
type PanelRule = Vec<(f64, f64)>;

fn panel_rules(panels: &[(f64, f64)], order: usize) -> Vec<PanelRule> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order validated"));
    panels
        .iter()
        .map(|&(a, b)| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            rule.as_node_weight_pairs()
                .iter()
                .map(|&(t, w)| (mid + half * t, (w * half).ln()))
                .collect()
        })
        .collect()
}

fn cell_log_integral(f: &ConvexPotential, lambda: &[f64], rules: &[&PanelRule]) -> std::result::Result<LogSum, String> {
    let d = rules.len();
    let order = rules[0].len();
    let total = order.pow(d as u32);
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut acc = LogSum::EMPTY;
    for _ in 0..total {
        let mut logw = 0.0;
        for a in 0..d {
            let (node, lw) = rules[a][idx[a]];
            x[a] = node;
            logw += lw;
        }
        let fx = f.value(&x);
        if !fx.is_finite() {
            return Err(format!("potential is not finite at {x:?}"));
        }
        let linear: f64 = lambda.iter().zip(&x).map(|(l, xi)| l * xi).sum();
        acc.push(logw - 2.0 * linear - 2.0 * fx);
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < order {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(acc)
}

/// One-dimensional panel integral of `e^{−2λ_a t − 2g(t)}` in log form, used
/// when the potential splits into a sum of single-variable terms.
fn axis_log_integral(g: &Expr, axis: usize, d: usize, lambda: f64, rule: &PanelRule) -> std::result::Result<f64, String> {
    let mut x = vec![0.0; d];
    let mut acc = LogSum::EMPTY;
    for &(node, lw) in rule {
        x[axis] = node;
        let gx = g.eval(&x);
        if !gx.is_finite() {
            return Err(format!("potential is not finite at x{} = {node}", axis + 1));
        }
        acc.push(lw - 2.0 * lambda * node - 2.0 * gx);
    }
    Ok(acc.ln())
}

/// Integrates `e^{−2λ·x − 2F(x)}` on the boxes `[−R_j, R_j]^{n+m}`.
pub fn weighted_norm_integral(lambda: &[f64], f: &ConvexPotential, schedule: &TruncationSchedule) -> Result<ConvergenceVerdict> {
    schedule.validate()?;
    let d = f.dim();
    if lambda.len() != d {
        return Err(Error::Dimension {
            expected: d,
            found: lambda.len(),
        });
    }
    let (panels, ends) = schedule.panels();
    let rules = panel_rules(&panels, schedule.order);
    let mut total = LogSum::EMPTY;
    let mut history: Vec<f64> = Vec::new();
    let ln_ratio = schedule.divergence_ratio.ln();
    let split = f.expr().additive_split(d);
    let mut factors: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (level, &end) in ends.iter().enumerate() {
        let start = if level == 0 { 0 } else { ends[level - 1] };
        let cells: Vec<Vec<usize>> = multi_indices(end, d)
            .filter(|c| c.iter().any(|&i| i >= start))
            .collect();
        let parts: Vec<std::result::Result<LogSum, String>> = match &split {
            Some(axes) => {
                for (a, g) in axes.iter().enumerate() {
                    for rule in &rules[factors[a].len()..end] {
                        match axis_log_integral(g, a, d, lambda[a], rule) {
                            Ok(v) => factors[a].push(v),
                            Err(reason) => {
                                return Ok(ConvergenceVerdict::Inconclusive {
                                    reason: format!("quadrature failure: {reason}"),
                                    history,
                                })
                            }
                        }
                    }
                }
                cells
                    .iter()
                    .map(|c| {
                        let mut s = LogSum::EMPTY;
                        s.push(c.iter().enumerate().map(|(a, &i)| factors[a][i]).sum());
                        Ok(s)
                    })
                    .collect()
            }
            None => cells
                .par_iter()
                .map(|c| {
                    let rs: Vec<&PanelRule> = c.iter().map(|&i| &rules[i]).collect();
                    cell_log_integral(f, lambda, &rs)
                })
                .collect(),
        };
        for p in parts {
            match p {
                Ok(s) => total.merge(s),
                Err(reason) => {
                    return Ok(ConvergenceVerdict::Inconclusive {
                        reason: format!("quadrature failure: {reason}"),
                        history,
                    })
                }
            }
        }
        let current = total.ln();
        if !current.is_finite() && current != f64::NEG_INFINITY {
            return Ok(ConvergenceVerdict::Inconclusive {
                reason: "non-finite truncation value".into(),
                history,
            });
        }
        if let Some(&prev) = history.last() {
            if current < prev {
                return Ok(ConvergenceVerdict::Inconclusive {
                    reason: "truncation values decreased".into(),
                    history,
                });
            }
        }
        history.push(current);
        let h = history.len();
        if h >= 2 {
            let rel = 1.0 - (history[h - 2] - current).exp();
            if rel <= schedule.relative_tolerance {
                return Ok(ConvergenceVerdict::Converges {
                    value: current.exp(),
                    error_estimate: rel,
                    history,
                    witness: None,
                });
            }
        }
        let run = schedule.divergence_run;
        if h > run && history[h - run - 1..].windows(2).all(|w| w[1] - w[0] >= ln_ratio) {
            return Ok(ConvergenceVerdict::Diverges {
                growth_witness: history[h - run - 1..].to_vec(),
            });
        }
    }
    Ok(ConvergenceVerdict::Inconclusive {
        reason: "neither converged nor grew steadily within the schedule".into(),
        history,
    })
}

fn multi_indices(base: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(d as u32).unwrap_or(0);
    (0..total).map(move |mut flat| {
        let mut out = vec![0; d];
        for slot in out.iter_mut().rev() {
            *slot = flat % base;
            flat /= base;
        }
        out
    })
}

/// Damped Newton parameters for the attainment oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonParams {
    pub gradient_tolerance: f64,
    pub step_tolerance: f64,
    pub escape_radius: f64,
    pub max_iterations: usize,
    pub armijo: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            gradient_tolerance: 1e-10,
            step_tolerance: 1e-6,
            escape_radius: 1e6,
            max_iterations: 500,
            armijo: 1e-4,
        }
    }
}

/// Decides whether `G(x) = F(x) + λ·x` attains its infimum.
///
/// Converges when a point with `‖∇G‖` below the gradient tolerance is
/// reached and the Newton step there is small; Diverges when the iterates
/// leave the escape radius.
pub fn legendre_attainment(lambda: &[f64], f: &ConvexPotential, params: &NewtonParams) -> Result<ConvergenceVerdict> {
    legendre_attainment_from(lambda, f, params, &vec![0.0; f.dim()])
}

/// [`legendre_attainment`] started from `start` instead of the origin.
pub fn legendre_attainment_from(
    lambda: &[f64],
    f: &ConvexPotential,
    params: &NewtonParams,
    start: &[f64],
) -> Result<ConvergenceVerdict> {
    let d = f.dim();
    if start.len() != d {
        return Err(Error::Dimension {
            expected: d,
            found: start.len(),
        });
    }
    if lambda.len() != d {
        return Err(Error::Dimension {
            expected: d,
            found: lambda.len(),
        });
    }
    if !f.is_certified() {
        return Err(Error::Uncertified("attainment needs a certified potential".into()));
    }
    let lam = DVector::from_column_slice(lambda);
    let objective = |x: &DVector<f64>| -> Option<f64> {
        let v = f.value(x.as_slice()) + lam.dot(x);
        v.is_finite().then_some(v)
    };
    let mut x = DVector::from_column_slice(start);
    let mut history = Vec::new();
    let mut norms = Vec::new();
    for _ in 0..params.max_iterations {
        let jet = match f.eval_jet2(x.as_slice()) {
            Ok(j) => j,
            Err(e) => {
                return Ok(ConvergenceVerdict::Inconclusive {
                    reason: format!("evaluation failed: {e}"),
                    history,
                })
            }
        };
        let g = &jet.gradient + &lam;
        let gval = jet.value + lam.dot(&x);
        history.push(gval);
        let gnorm = g.norm();
        let direction = match Cholesky::new(jet.hessian.clone()) {
            Some(ch) => -ch.solve(&g),
            None => -g.clone(),
        };
        if gnorm < params.gradient_tolerance && direction.norm() <= params.step_tolerance * x.norm().max(1.0) {
            return Ok(ConvergenceVerdict::Converges {
                value: gval,
                error_estimate: gnorm,
                history,
                witness: Some(x.iter().copied().collect()),
            });
        }
        let slope = g.dot(&direction);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let trial = &x + &direction * t;
            if trial.norm() > params.escape_radius {
                accepted = Some(trial);
                break;
            }
            match objective(&trial) {
                Some(v) if v <= gval + params.armijo * t * slope => {
                    accepted = Some(trial);
                    break;
                }
                _ => t *= 0.5,
            }
        }
        let Some(next) = accepted else {
            if gnorm < params.gradient_tolerance {
                return Ok(ConvergenceVerdict::Converges {
                    value: gval,
                    error_estimate: gnorm,
                    history,
                    witness: Some(x.iter().copied().collect()),
                });
            }
            return Ok(ConvergenceVerdict::Inconclusive {
                reason: "line search stalled".into(),
                history,
            });
        };
        x = next;
        norms.push(x.norm());
        if x.norm() > params.escape_radius {
            let keep = norms.len().saturating_sub(4);
            return Ok(ConvergenceVerdict::Diverges {
                growth_witness: norms[keep..].to_vec(),
            });
        }
    }
    Ok(ConvergenceVerdict::Inconclusive {
        reason: "iteration cap reached".into(),
        history,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Occurs,
    DoesNotOccur,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Occurs => "occurs",
            Verdict::DoesNotOccur => "does_not_occur",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Joint verdict of both oracles at a single `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Converge,
    Diverge,
    Undecided,
    Disagree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub lambda: Vec<f64>,
    pub agreement: Agreement,
    pub integral: ConvergenceVerdict,
    pub attainment: ConvergenceVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub weight: Weight,
    pub verdict: Verdict,
    /// The centre first, then `λ₂ ± δ e_j` in the order `+e₁, −e₁, +e₂, …`.
    pub probes: Vec<Probe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<String>,
}

impl Classification {
    pub fn has_discrepancy(&self) -> bool {
        self.discrepancy.is_some()
    }

    pub fn centre(&self) -> &Probe {
        &self.probes[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyParams {
    pub delta: f64,
    pub schedule: TruncationSchedule,
    pub newton: NewtonParams,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            delta: DEFAULT_DELTA,
            schedule: TruncationSchedule::default(),
            newton: NewtonParams::default(),
        }
    }
}

fn probe(lambda: Vec<f64>, f: &ConvexPotential, params: &ClassifyParams) -> Result<Probe> {
    let integral = weighted_norm_integral(&lambda, f, &params.schedule)?;
    let attainment = legendre_attainment(&lambda, f, &params.newton)?;
    let agreement = match (&integral, &attainment) {
        (a, b) if a.converges() && b.converges() => Agreement::Converge,
        (a, b) if a.diverges() && b.diverges() => Agreement::Diverge,
        (a, b) if (a.converges() && b.diverges()) || (a.diverges() && b.converges()) => Agreement::Disagree,
        _ => Agreement::Undecided,
    };
    Ok(Probe {
        lambda,
        agreement,
        integral,
        attainment,
    })
}

/// Classifies one weight. Torus components are tested at the point itself;
/// flat components additionally at `λ₂ ± δ e_j`, since occurrence on the
/// flat factor asks for convergence on a neighbourhood.
pub fn classify_weight(weight: &Weight, f: &ConvexPotential, params: &ClassifyParams) -> Result<Classification> {
    let (n, m) = f.dims();
    weight.check_dims(n, m)?;
    if !(params.delta > 0.0 && params.delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be > 0, got {}", params.delta)));
    }
    let centre = weight.as_vector();
    let mut points = vec![centre.clone()];
    for j in 0..m {
        for sign in [1.0, -1.0] {
            let mut p = centre.clone();
            p[n + j] += sign * params.delta;
            points.push(p);
        }
    }
    let probes: Vec<Probe> = points
        .into_iter()
        .map(|p| probe(p, f, params))
        .collect::<Result<_>>()?;
    let disagreements: Vec<String> = probes
        .iter()
        .filter(|p| p.agreement == Agreement::Disagree)
        .map(|p| format!("oracles disagree at lambda = {:?}", p.lambda))
        .collect();
    let verdict = if !disagreements.is_empty() {
        Verdict::Inconclusive
    } else if probes[0].agreement == Agreement::Diverge {
        Verdict::DoesNotOccur
    } else if probes.iter().all(|p| p.agreement == Agreement::Converge) {
        Verdict::Occurs
    } else {
        Verdict::Inconclusive
    };
    Ok(Classification {
        weight: weight.clone(),
        verdict,
        probes,
        discrepancy: (!disagreements.is_empty()).then(|| disagreements.join("; ")),
    })
}

/// Classifies every weight, in input order.
pub fn classify_all(weights: &[Weight], f: &ConvexPotential, params: &ClassifyParams) -> Result<Vec<Classification>> {
    weights.par_iter().map(|w| classify_weight(w, f, params)).collect()
}

/// A section `c · e^{−λz} ζ_P` with `P` a set of holomorphic slots.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionCoefficient {
    pub weight: Weight,
    pub blade: Blade,
    pub scalar: Coeff,
}

impl SectionCoefficient {
    pub fn new(weight: Weight, blade: Blade, scalar: Coeff) -> Result<Self> {
        if !blade.is_holomorphic() {
            return Err(Error::InvalidParameter(
                "section blades may only contain holomorphic generators".into(),
            ));
        }
        Ok(SectionCoefficient { weight, blade, scalar })
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.blade.degree())
    }

    fn odd_part(&self) -> GrassmannElement {
        GrassmannElement::monomial(self.scalar.clone(), self.blade)
    }
}

/// Exact odd factor `∫ s_odd · star(t_odd)` of `⟨s, t⟩`.
fn berezin_pairing(s: &SectionCoefficient, t: &SectionCoefficient) -> Result<Coeff> {
    let t_star = t.odd_part().star_element();
    Ok(s.odd_part().multiply(&t_star)?.berezin_top())
}

/// `⟨s, s⟩` split into the even integral (times `|c|²`) and the odd phase
/// `i^{|s|}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionNorm {
    pub verdict: ConvergenceVerdict,
    /// `(re, im)` of the Berezin factor of `ζ_P · star(ζ_P)`.
    pub berezin_factor: (f64, f64),
}

pub fn section_norm(s: &SectionCoefficient, f: &ConvexPotential, schedule: &TruncationSchedule) -> Result<SectionNorm> {
    let (n, m) = f.dims();
    s.weight.check_dims(n, m)?;
    let unit = SectionCoefficient {
        scalar: crate::grassmann::real(1),
        ..s.clone()
    };
    let berezin_factor = to_f64_pair(&berezin_pairing(&unit, &unit)?);
    let (re, im) = to_f64_pair(&s.scalar);
    let modulus = re * re + im * im;
    let verdict = if modulus == 0.0 {
        ConvergenceVerdict::Converges {
            value: 0.0,
            error_estimate: 0.0,
            history: vec![],
            witness: None,
        }
    } else {
        match weighted_norm_integral(&s.weight.as_vector(), f, schedule)? {
            ConvergenceVerdict::Converges {
                value,
                error_estimate,
                history,
                witness,
            } => ConvergenceVerdict::Converges {
                value: modulus * value,
                error_estimate,
                history,
                witness,
            },
            other => other,
        }
    };
    Ok(SectionNorm { verdict, berezin_factor })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub passed: bool,
    pub consistency_passed: bool,
    pub hermitian_residual: f64,
    pub hermitian_passed: bool,
    pub positivity_passed: bool,
    /// `⟨s_i, s_j⟩` as `(re, im)`.
    pub gram: Vec<Vec<(f64, f64)>>,
}

/// Checks consistency, super Hermitian symmetry and super positivity of the
/// `L²` pairing on a finite family of sections.
pub fn metric_axioms_check(
    family: &[SectionCoefficient],
    f: &ConvexPotential,
    schedule: &TruncationSchedule,
) -> Result<MetricReport> {
    let mut integrals: BTreeMap<String, f64> = BTreeMap::new();
    for s in family {
        let key = s.weight.key();
        if integrals.contains_key(&key) {
            continue;
        }
        match weighted_norm_integral(&s.weight.as_vector(), f, schedule)? {
            ConvergenceVerdict::Converges { value, .. } => {
                integrals.insert(key, value);
            }
            _ => {
                return Err(Error::Rejected(format!(
                    "section with weight {} has no convergent norm",
                    s.weight
                )))
            }
        }
    }
    let n = family.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, s) in family.iter().enumerate() {
        for (j, t) in family.iter().enumerate() {
            if s.weight != t.weight {
                continue;
            }
            let (re, im) = to_f64_pair(&berezin_pairing(s, t)?);
            gram[i][j] = Complex64::new(re, im) * integrals[&s.weight.key()];
        }
    }
    let mut consistency = true;
    let mut herm = 0.0f64;
    let mut positivity = true;
    for i in 0..n {
        let pi = family[i].parity();
        for j in 0..n {
            let pj = family[j].parity();
            if pi != pj && gram[i][j] != Complex64::new(0.0, 0.0) {
                consistency = false;
            }
            let sign = if pi == Parity::Odd && pj == Parity::Odd { -1.0 } else { 1.0 };
            let r = (gram[i][j] - gram[j][i].conj() * sign).norm();
            let scale = gram[i][j].norm().max(1.0);
            herm = herm.max(r / scale);
        }
        let phase = if pi == Parity::Odd {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let v = gram[i][i] * phase;
        let zero = to_f64_pair(&family[i].scalar) == (0.0, 0.0);
        let ok = if zero {
            v.norm() == 0.0
        } else {
            v.re > 0.0 && v.im.abs() <= 1e-12 * v.re
        };
        positivity &= ok;
    }
    let hermitian_passed = herm < 1e-10;
    Ok(MetricReport {
        passed: consistency && hermitian_passed && positivity,
        consistency_passed: consistency,
        hermitian_residual: herm,
        hermitian_passed,
        positivity_passed: positivity,
        gram: gram.iter().map(|row| row.iter().map(|z| (z.re, z.im)).collect()).collect(),
    })
}
