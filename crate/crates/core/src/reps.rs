//! Irreducible unitary representations of `G = T_n × ℝ^m × ⋀_k`, their
//! occurrence in the quantization, and finite-dimensional super-unitarity.
//!
//! Irreducibles are labelled by a weight `λ = (λ₁, λ₂) ∈ ℤⁿ × ℝᵐ` and a parity.
//! Flat weight components are exact rationals so that the label group law is
//! exact.

use std::fmt;

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bergman::{classify_all, legendre_attainment_from, ClassifyParams, Classification, ConvergenceVerdict, Verdict};
use crate::error::{Error, Result};
use crate::grassmann::{joint_derivation_kernel, parse_decimal, Blade, GrassmannElement, Rational};
use crate::potential::ConvexPotential;

pub const CHARACTER_CONVENTION: &str = "chi_lambda(r) = exp(2*pi*i*lambda1.r_torus + i*lambda2.r_flat)";

/// `(λ₁, λ₂) ∈ ℤⁿ × ℚᵐ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub torus: Vec<i64>,
    #[serde(serialize_with = "ser_rationals", deserialize_with = "de_rationals")]
    pub flat: Vec<Rational>,
}

fn ser_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn de_rationals<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
    let raw: Vec<String> = Vec::deserialize(d)?;
    raw.iter()
        .map(|t| parse_rational(t).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{t}`"))))
        .collect()
}

/// Parses `3`, `-0.5`, `1.75e1` or `7/4` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num = parse_rational(a)?;
        let den = parse_rational(b)?;
        return (!den.is_zero()).then(|| num / den);
    }
    match t.strip_prefix('-') {
        Some(rest) => parse_decimal(rest).map(|r| -r),
        None => parse_decimal(t.strip_prefix('+').unwrap_or(t)),
    }
}

impl Weight {
    pub fn new(torus: Vec<i64>, flat: Vec<Rational>) -> Weight {
        Weight { torus, flat }
    }

    /// Exact conversion of binary floating-point flat components.
    pub fn from_f64(torus: Vec<i64>, flat: &[f64]) -> Result<Weight> {
        let flat = flat
            .iter()
            .map(|&v| BigRational::from_float(v).ok_or_else(|| Error::NonFinite(format!("flat weight {v}"))))
            .collect::<Result<_>>()?;
        Ok(Weight { torus, flat })
    }

    pub fn zero(n: usize, m: usize) -> Weight {
        Weight {
            torus: vec![0; n],
            flat: vec![Rational::zero(); m],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.torus.len(), self.flat.len())
    }

    pub fn check_dims(&self, n: usize, m: usize) -> Result<()> {
        if self.dims() != (n, m) {
            return Err(Error::Dimension {
                expected: n + m,
                found: self.torus.len() + self.flat.len(),
            });
        }
        Ok(())
    }

    /// `(λ₁, λ₂)` as one real vector.
    pub fn as_vector(&self) -> Vec<f64> {
        self.torus
            .iter()
            .map(|&v| v as f64)
            .chain(self.flat.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Canonical text used as a map key.
    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn add(&self, other: &Weight) -> Result<Weight> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension {
                expected: self.torus.len() + self.flat.len(),
                found: other.torus.len() + other.flat.len(),
            });
        }
        Ok(Weight {
            torus: self.torus.iter().zip(&other.torus).map(|(a, b)| a + b).collect(),
            flat: self.flat.iter().zip(&other.flat).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn neg(&self) -> Weight {
        Weight {
            torus: self.torus.iter().map(|a| -a).collect(),
            flat: self.flat.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let torus: Vec<String> = self.torus.iter().map(i64::to_string).collect();
        let flat: Vec<String> = self.flat.iter().map(Rational::to_string).collect();
        write!(f, "({}; {})", torus.join(", "), flat.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LabelParity {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl LabelParity {
    pub fn times(self, o: LabelParity) -> LabelParity {
        if self == o {
            LabelParity::Plus
        } else {
            LabelParity::Minus
        }
    }

    pub fn flip(self) -> LabelParity {
        match self {
            LabelParity::Plus => LabelParity::Minus,
            LabelParity::Minus => LabelParity::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            LabelParity::Plus => "+",
            LabelParity::Minus => "-",
        }
    }
}

/// The irreducible `V_λ^±`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub weight: Weight,
    pub parity: LabelParity,
}

impl IrrepLabel {
    pub fn new(weight: Weight, parity: LabelParity) -> IrrepLabel {
        IrrepLabel { weight, parity }
    }
}

/// `V_λ^ε ⊗ V_μ^δ = V_{λ+μ}^{εδ}`.
pub fn tensor(a: &IrrepLabel, b: &IrrepLabel) -> Result<IrrepLabel> {
    Ok(IrrepLabel {
        weight: a.weight.add(&b.weight)?,
        parity: a.parity.times(b.parity),
    })
}

/// The parity switch `Π`.
pub fn pi_switch(a: &IrrepLabel) -> IrrepLabel {
    IrrepLabel {
        weight: a.weight.clone(),
        parity: a.parity.flip(),
    }
}

/// `χ_λ(r) = exp(2πi λ₁·r_torus + i λ₂·r_flat)`; `r_torus` is read mod `ℤⁿ`.
pub fn character_eval(weight: &Weight, r_torus: &[f64], r_flat: &[f64]) -> Result<Complex64> {
    weight.check_dims(r_torus.len(), r_flat.len())?;
    let turns: f64 = weight
        .torus
        .iter()
        .zip(r_torus)
        .map(|(&l, &r)| {
            let frac = r - r.floor();
            (l as f64 * frac).fract()
        })
        .sum();
    let flat: f64 = weight
        .flat
        .iter()
        .zip(r_flat)
        .map(|(l, r)| l.to_f64().unwrap_or(f64::NAN) * r)
        .sum();
    Ok(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns.fract() + flat))
}

/// A finite set of weights: an integer box on the torus part times lists of
/// flat values, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightBox {
    Grid {
        torus: Vec<(i64, i64)>,
        #[serde(serialize_with = "ser_nested", deserialize_with = "de_nested")]
        flat: Vec<Vec<Rational>>,
    },
    Points(Vec<Weight>),
}

fn ser_nested<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = v.iter().map(|row| row.iter().map(|r| r.to_string()).collect()).collect();
    text.serialize(s)
}

fn de_nested<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
    let raw: Vec<Vec<String>> = Vec::deserialize(d)?;
    raw.iter()
        .map(|row| {
            row.iter()
                .map(|t| parse_rational(t).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{t}`"))))
                .collect()
        })
        .collect()
}

impl WeightBox {
    /// Weights in row-major order, the torus axes varying slowest.
    pub fn weights(&self) -> Result<Vec<Weight>> {
        match self {
            WeightBox::Points(p) => Ok(p.clone()),
            WeightBox::Grid { torus, flat } => {
                for &(lo, hi) in torus {
                    if lo > hi {
                        return Err(Error::InvalidParameter(format!("torus range [{lo}, {hi}] is not ordered")));
                    }
                }
                let mut out = vec![Weight::new(vec![], vec![])];
                for &(lo, hi) in torus {
                    out = out
                        .into_iter()
                        .flat_map(|w| {
                            (lo..=hi).map(move |v| {
                                let mut w = w.clone();
                                w.torus.push(v);
                                w
                            })
                        })
                        .collect();
                }
                for axis in flat {
                    out = out
                        .into_iter()
                        .flat_map(|w| {
                            axis.iter().map(move |v| {
                                let mut w = w.clone();
                                w.flat.push(v.clone());
                                w
                            })
                        })
                        .collect();
                }
                Ok(out)
            }
        }
    }
}

/// Labels of the report headers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub character: String,
    pub norm_weight: String,
    pub haar_volume: String,
    pub interior_product: String,
    pub norm_macro: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            character: CHARACTER_CONVENTION.into(),
            norm_weight: crate::bergman::WEIGHT_CONVENTION.into(),
            haar_volume: crate::bergman::HAAR_CONVENTION.into(),
            interior_product: crate::kahler::INTERIOR_PRODUCT_CONVENTION.into(),
            norm_macro: "script F = 2F".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceEntry {
    pub weight: Weight,
    pub parity: LabelParity,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_data: Option<Classification>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceReport {
    pub conventions: Conventions,
    pub entries: Vec<OccurrenceEntry>,
    pub inconclusive: Vec<Weight>,
    pub discrepancies: Vec<String>,
}

impl OccurrenceReport {
    pub fn occurring(&self) -> Vec<&Weight> {
        self.entries
            .iter()
            .filter(|e| e.verdict == Verdict::Occurs)
            .map(|e| &e.weight)
            .collect()
    }
}

/// Classifies every weight of the box; `(λ, −)` never occurs.
pub fn occurrences(f: &ConvexPotential, weights: &WeightBox, params: &ClassifyParams) -> Result<OccurrenceReport> {
    if !f.is_certified() {
        return Err(Error::Uncertified("occurrence needs a certified potential".into()));
    }
    let list = weights.weights()?;
    let classes = classify_all(&list, f, params)?;
    let mut entries = Vec::with_capacity(2 * classes.len());
    let mut inconclusive = Vec::new();
    let mut discrepancies = Vec::new();
    for c in classes {
        if c.verdict == Verdict::Inconclusive {
            inconclusive.push(c.weight.clone());
        }
        if let Some(d) = &c.discrepancy {
            discrepancies.push(format!("{}: {d}", c.weight));
        }
        let minus = OccurrenceEntry {
            weight: c.weight.clone(),
            parity: LabelParity::Minus,
            verdict: Verdict::DoesNotOccur,
            oracle_data: None,
        };
        entries.push(OccurrenceEntry {
            weight: c.weight.clone(),
            parity: LabelParity::Plus,
            verdict: c.verdict,
            oracle_data: Some(c),
        });
        entries.push(minus);
    }
    Ok(OccurrenceReport {
        conventions: Conventions::default(),
        entries,
        inconclusive,
        discrepancies,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub label: IrrepLabel,
    /// Copies in `𝓗 ⊕ Π𝓗`.
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attainment_point: Option<Vec<f64>>,
    pub unique_attainment: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub conventions: Conventions,
    pub confirmed: bool,
    pub entries: Vec<ModelEntry>,
    pub discrepancies: Vec<String>,
}

const MULTI_START_RADIUS: f64 = 3.0;
const SAME_POINT_TOLERANCE: f64 = 1e-7;

/// Newton runs from several starts reach one point, and the gradient is
/// strictly monotone around it.
fn unique_attainment(f: &ConvexPotential, lambda: &[f64], x_star: &[f64], params: &ClassifyParams) -> Result<bool> {
    let d = f.dim();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        for s in [MULTI_START_RADIUS, -MULTI_START_RADIUS] {
            let mut p = x_star.to_vec();
            p[j] += s;
            starts.push(p);
        }
    }
    for start in &starts {
        match legendre_attainment_from(lambda, f, &params.newton, start)? {
            ConvergenceVerdict::Converges { witness: Some(x), .. } => {
                let dist = x.iter().zip(x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if dist > SAME_POINT_TOLERANCE * x_star.iter().map(|v| v.abs()).fold(1.0, f64::max) {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    let g_star = f.gradient(x_star)?;
    for p in &starts {
        let g = f.gradient(p)?;
        let dot: f64 = (0..d).map(|j| (g[j] - g_star[j]) * (p[j] - x_star[j])).sum();
        if !(dot > 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that every label `(λ, ±)` of the box occurs exactly once in the
/// doubled space `𝓗 ⊕ Π𝓗`.
pub fn gelfand_model_check(f: &ConvexPotential, weights: &WeightBox, params: &ClassifyParams) -> Result<ModelReport> {
    let report = occurrences(f, weights, params)?;
    let mut entries = Vec::new();
    let mut confirmed = report.discrepancies.is_empty();
    for e in report.entries.iter().filter(|e| e.parity == LabelParity::Plus) {
        let c = e.oracle_data.as_ref().expect("plus entries carry oracle data");
        let occurs = c.verdict == Verdict::Occurs;
        let point = c.centre().attainment.witness().map(<[f64]>::to_vec);
        let unique = match (&point, occurs) {
            (Some(x), true) => unique_attainment(f, &c.centre().lambda, x, params)?,
            _ => false,
        };
        // (λ,+) sits in 𝓗 and (λ,−) in Π𝓗; the odd copies in 𝓗 never occur.
        let multiplicity = usize::from(occurs && unique);
        for parity in [LabelParity::Plus, LabelParity::Minus] {
            confirmed &= multiplicity == 1;
            entries.push(ModelEntry {
                label: IrrepLabel::new(e.weight.clone(), parity),
                multiplicity,
                attainment_point: point.clone(),
                unique_attainment: unique,
            });
        }
    }
    Ok(ModelReport {
        conventions: report.conventions,
        confirmed,
        entries,
        discrepancies: report.discrepancies,
    })
}

/// Default bound on `even_dim` and `odd_dim`.
pub const MAX_SAMPLE_DIM: usize = 8;

/// `ℂ^{p|q}` with the super Hermitian form `B(v, w) = w† M v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperHilbertSample {
    pub even_dim: usize,
    pub odd_dim: usize,
    pub form: DMatrix<Complex64>,
}

fn random_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_hpd<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let a = random_complex(rng, dim, dim);
    &a * a.adjoint() + DMatrix::identity(dim, dim)
}

impl SuperHilbertSample {
    /// Checks the block structure: even block Hermitian positive definite,
    /// odd block `i` times Hermitian positive definite, no cross terms.
    pub fn new(even_dim: usize, odd_dim: usize, form: DMatrix<Complex64>) -> Result<Self> {
        let s = SuperHilbertSample {
            even_dim,
            odd_dim,
            form,
        };
        s.validate()?;
        Ok(s)
    }

    /// Skips validation, for exercising the checks on indefinite forms.
    pub fn new_unchecked(even_dim: usize, odd_dim: usize, form: DMatrix<Complex64>) -> Self {
        SuperHilbertSample {
            even_dim,
            odd_dim,
            form,
        }
    }

    pub fn random<R: Rng>(even_dim: usize, odd_dim: usize, rng: &mut R) -> Result<Self> {
        if even_dim > MAX_SAMPLE_DIM || odd_dim > MAX_SAMPLE_DIM {
            return Err(Error::Resource(format!(
                "sample dimension {even_dim}|{odd_dim} exceeds {MAX_SAMPLE_DIM}|{MAX_SAMPLE_DIM}"
            )));
        }
        let dim = even_dim + odd_dim;
        let mut form = DMatrix::zeros(dim, dim);
        form.view_mut((0, 0), (even_dim, even_dim)).copy_from(&random_hpd(rng, even_dim));
        let odd = random_hpd(rng, odd_dim) * Complex64::i();
        form.view_mut((even_dim, even_dim), (odd_dim, odd_dim)).copy_from(&odd);
        SuperHilbertSample::new(even_dim, odd_dim, form)
    }

    pub fn dim(&self) -> usize {
        self.even_dim + self.odd_dim
    }

    pub fn is_odd_index(&self, i: usize) -> bool {
        i >= self.even_dim
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if self.form.nrows() != dim || self.form.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: self.form.nrows(),
            });
        }
        for i in 0..dim {
            for j in 0..dim {
                if self.is_odd_index(i) != self.is_odd_index(j) && self.form[(i, j)] != Complex64::new(0.0, 0.0) {
                    return Err(Error::InvalidParameter("form mixes parities".into()));
                }
            }
        }
        let p = self.even_dim;
        let q = self.odd_dim;
        let even = self.form.view((0, 0), (p, p)).clone_owned();
        let odd = self.form.view((p, p), (q, q)).clone_owned() * -Complex64::i();
        for (name, block) in [("even", even), ("odd", odd)] {
            if max_modulus(&(&block - block.adjoint())) > 1e-12 * max_modulus(&block).max(1.0) {
                return Err(Error::InvalidParameter(format!("{name} block is not (i times) Hermitian")));
            }
            if block.nrows() > 0 && !(block.clone().symmetric_eigenvalues().min() > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} block is not positive definite")));
            }
        }
        Ok(())
    }

    /// `B(v, w) = w† M v`.
    pub fn pairing(&self, v: &DVector<Complex64>, w: &DVector<Complex64>) -> Complex64 {
        (w.adjoint() * &self.form * v)[(0, 0)]
    }

    /// Allowed entries of an even (block diagonal) or odd (off diagonal)
    /// operator.
    fn operator_slots(&self, odd: bool) -> Vec<(usize, usize)> {
        let dim = self.dim();
        let mut out = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                if (self.is_odd_index(r) != self.is_odd_index(c)) == odd {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Real basis of `𝔲_B` in the given parity, as operators.
    pub fn u_b_basis(&self, odd: bool) -> Vec<DMatrix<Complex64>> {
        let dim = self.dim();
        let slots = self.operator_slots(odd);
        let unknowns = 2 * slots.len();
        if unknowns == 0 {
            return vec![];
        }
        let unit = |j: usize| -> DMatrix<Complex64> {
            let mut u = DMatrix::zeros(dim, dim);
            let (r, c) = slots[j / 2];
            u[(r, c)] = if j.is_multiple_of(2) { Complex64::new(1.0, 0.0) } else { Complex64::i() };
            u
        };
        let rows = 2 * dim * dim;
        let mut a = DMatrix::<f64>::zeros(rows.max(unknowns), unknowns);
        for j in 0..unknowns {
            let r = self.u_b_defect(&unit(j), odd);
            for (idx, z) in r.iter().enumerate() {
                a[(2 * idx, j)] = z.re;
                a[(2 * idx + 1, j)] = z.im;
            }
        }
        let svd = SVD::new(a, false, true);
        let v_t = svd.v_t.expect("requested V");
        let smax = svd.singular_values.max().max(1.0);
        (0..unknowns)
            .filter(|&i| svd.singular_values[i] <= 1e-10 * smax)
            .map(|i| {
                let mut u = DMatrix::zeros(dim, dim);
                for j in 0..unknowns {
                    u += unit(j) * Complex64::new(v_t[(i, j)], 0.0);
                }
                u
            })
            .collect()
    }

    /// `M U + U† M D` with `D = diag((−1)^{|u||v|})`; zero iff `U ∈ 𝔲_B`.
    fn u_b_defect(&self, u: &DMatrix<Complex64>, odd: bool) -> DMatrix<Complex64> {
        let dim = self.dim();
        let signs = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j && odd && self.is_odd_index(j) {
                Complex64::new(-1.0, 0.0)
            } else if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.form * u + u.adjoint() * &self.form * signs
    }

    /// Random element of `𝔲_B` from the nullspace basis.
    pub fn random_u_b<R: Rng>(&self, odd: bool, rng: &mut R) -> DMatrix<Complex64> {
        let dim = self.dim();
        self.u_b_basis(odd)
            .into_iter()
            .fold(DMatrix::zeros(dim, dim), |acc, b| acc + b * Complex64::new(rng.random_range(-1.0..1.0), 0.0))
    }

    pub fn random_homogeneous<R: Rng>(&self, odd: bool, rng: &mut R) -> DVector<Complex64> {
        DVector::from_fn(self.dim(), |i, _| {
            if self.is_odd_index(i) == odd {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Largest entry modulus.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Parity of a homogeneous operator, `None` if it mixes parities.
pub fn operator_parity(u: &DMatrix<Complex64>, v: &SuperHilbertSample) -> Option<bool> {
    let zero = Complex64::new(0.0, 0.0);
    let mut even_part = false;
    let mut odd_part = false;
    for r in 0..u.nrows() {
        for c in 0..u.ncols() {
            if u[(r, c)] != zero {
                if v.is_odd_index(r) == v.is_odd_index(c) {
                    even_part = true;
                } else {
                    odd_part = true;
                }
            }
        }
    }
    match (even_part, odd_part) {
        (true, true) => None,
        (false, true) => Some(true),
        _ => Some(false),
    }
}

/// Largest entry of `B(u v, w) + (−1)^{|u||v|} B(v, u w)` over basis vectors.
pub fn u_b_membership(u: &DMatrix<Complex64>, v: &SuperHilbertSample) -> Result<f64> {
    if u.nrows() != v.dim() || u.ncols() != v.dim() {
        return Err(Error::Dimension {
            expected: v.dim(),
            found: u.nrows(),
        });
    }
    let odd = operator_parity(u, v).ok_or(Error::NonHomogeneous)?;
    Ok(max_modulus(&v.u_b_defect(u, odd)))
}

/// Result of searching the unit sphere of `𝔲_B` coordinates for `A² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentSearch {
    /// Final iterate, with unit coordinate vector.
    pub operator: DMatrix<Complex64>,
    /// `max |(A²)_ij|` at the final iterate.
    pub residual: f64,
}

impl NilpotentSearch {
    /// A nonzero solution of `A² = 0` was reached.
    pub fn found(&self) -> bool {
        self.residual < NILPOTENT_FOUND_RESIDUAL
    }
}

/// Residual below which a unit-sphere iterate is accepted as a solution.
pub const NILPOTENT_FOUND_RESIDUAL: f64 = 1e-12;

fn assemble(basis: &[DMatrix<Complex64>], c: &DVector<f64>) -> DMatrix<Complex64> {
    let dim = basis.first().map_or(0, |b| b.nrows());
    basis
        .iter()
        .zip(c.iter())
        .fold(DMatrix::zeros(dim, dim), |acc, (b, &ci)| acc + b * Complex64::new(ci, 0.0))
}

fn squared_residual(basis: &[DMatrix<Complex64>], c: &DVector<f64>) -> (DMatrix<Complex64>, DVector<f64>) {
    let a = assemble(basis, c);
    let sq = &a * &a;
    let mut r = DVector::zeros(2 * sq.len());
    for (idx, z) in sq.iter().enumerate() {
        r[2 * idx] = z.re;
        r[2 * idx + 1] = z.im;
    }
    (a, r)
}

/// Levenberg–Marquardt minimization of `‖A(c)²‖` over `‖c‖ = 1`, where
/// `A(c) = Σ c_i N_i`. Since `A ↦ A²` is homogeneous, nonzero solutions of
/// `A² = 0` exist exactly when the minimum on the sphere is zero.
pub fn search_odd_nilpotent(basis: &[DMatrix<Complex64>], c0: &[f64], iterations: usize) -> NilpotentSearch {
    let p = basis.len();
    let mut c = DVector::from_column_slice(c0);
    if p == 0 || c.norm() == 0.0 {
        let dim = basis.first().map_or(0, |b| b.nrows());
        return NilpotentSearch {
            operator: DMatrix::zeros(dim, dim),
            residual: f64::INFINITY,
        };
    }
    c /= c.norm();
    let mut mu = 1e-3;
    let (_, mut r) = squared_residual(basis, &c);
    for _ in 0..iterations {
        if r.amax() < NILPOTENT_FOUND_RESIDUAL {
            break;
        }
        let a = assemble(basis, &c);
        let mut jac = DMatrix::<f64>::zeros(r.len(), p);
        for (j, b) in basis.iter().enumerate() {
            let d = &a * b + b * &a;
            for (idx, z) in d.iter().enumerate() {
                jac[(2 * idx, j)] = z.re;
                jac[(2 * idx + 1, j)] = z.im;
            }
        }
        let proj = DMatrix::identity(p, p) - &c * c.transpose();
        let jt = &jac * &proj;
        let normal = jt.transpose() * &jt;
        let rhs = -(jt.transpose() * &r);
        let mut improved = false;
        for _ in 0..30 {
            let damped = &normal + DMatrix::identity(p, p) * mu;
            let Some(step) = damped.cholesky().map(|ch| ch.solve(&rhs)) else {
                mu *= 10.0;
                continue;
            };
            let mut trial = &c + &proj * step;
            trial /= trial.norm();
            let (_, tr) = squared_residual(basis, &trial);
            if tr.norm() < r.norm() {
                c = trial;
                r = tr;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let (a, r) = squared_residual(basis, &c);
    NilpotentSearch {
        operator: a,
        residual: r.amax(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddTrivialityReport {
    pub passed: bool,
    pub trials: usize,
    pub odd_basis_dimension: usize,
    pub identity_residual: f64,
    pub max_membership_residual: f64,
    /// Largest `max |A_ij|` among solutions of `A² = 0` found in `𝔲_B`;
    /// zero when the only solution reached is `A = 0`.
    pub max_nilpotent_norm: f64,
    /// Smallest `max |(A²)_ij|` reached on the unit sphere of coordinates.
    pub min_sphere_residual: f64,
}

/// Sphere searches per sample in [`odd_triviality_check`].
pub const NILPOTENT_SEARCHES: usize = 4;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-12;
pub const NILPOTENT_TOLERANCE: f64 = 1e-10;

/// Samples odd `A ∈ 𝔲_B` and homogeneous `v`, checks
/// `B(Av, Av) = (−1)^{|v|} B(A²v, v)`, and searches for odd `A ∈ 𝔲_B` with
/// `A² = 0`, which must all vanish. Each search runs on the unit sphere of
/// `𝔲_B` coordinates; a search that ends with `A² ≈ 0` there is a nonzero
/// nilpotent and fails the check.
pub fn odd_triviality_check<R: Rng>(v: &SuperHilbertSample, trials: usize, rng: &mut R) -> OddTrivialityReport {
    let basis = v.u_b_basis(true);
    let mut identity = 0.0f64;
    let mut membership = 0.0f64;
    let mut nilpotent = 0.0f64;
    let mut sphere = f64::INFINITY;
    for t in 0..trials {
        let a = v.random_u_b(true, rng);
        membership = membership.max(max_modulus(&v.u_b_defect(&a, true)));
        let odd_v = t % 2 == 1;
        let x = v.random_homogeneous(odd_v, rng);
        let ax = &a * &x;
        let a2x = &a * &ax;
        let lhs = v.pairing(&ax, &ax);
        let sign = if odd_v { -1.0 } else { 1.0 };
        let rhs = v.pairing(&a2x, &x) * sign;
        identity = identity.max((lhs - rhs).norm() / lhs.norm().max(1.0));
        if !basis.is_empty() && t < NILPOTENT_SEARCHES {
            let c0: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let search = search_odd_nilpotent(&basis, &c0, 100);
            sphere = sphere.min(search.residual);
            if search.found() {
                nilpotent = nilpotent.max(max_modulus(&search.operator));
            }
        }
    }
    OddTrivialityReport {
        passed: identity < IDENTITY_TOLERANCE && membership < MEMBERSHIP_TOLERANCE && nilpotent < NILPOTENT_TOLERANCE,
        trials,
        odd_basis_dimension: basis.len(),
        identity_residual: identity,
        max_membership_residual: membership,
        max_nilpotent_norm: nilpotent,
        min_sphere_residual: sphere,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaModuleReport {
    pub k: usize,
    pub passed: bool,
    pub filtration_drops: bool,
    pub kernel_dimension: usize,
    pub kernel_is_constants: bool,
    pub nontrivial_witness: Option<String>,
}

/// Structural checks on the Grassmann algebra as a module over the odd
/// derivations.
pub fn lambda_module_checks(k: usize) -> Result<LambdaModuleReport> {
    if k > 4 {
        return Err(Error::Resource(format!("lambda module checks support k <= 4, got {k}")));
    }
    let mut drops = true;
    let mut witness = None;
    for mask in 0u32..1 << (2 * k) {
        let slots: Vec<usize> = (0..2 * k).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
        let blade = Blade::new(k, &slots)?;
        let e = GrassmannElement::monomial(crate::grassmann::real(1), blade);
        for slot in 1..=2 * k {
            let d = e.derivation(slot)?;
            if !d.is_zero() {
                drops &= d.filtration_degree() < blade.degree();
                if witness.is_none() {
                    witness = Some(format!("D_{slot}({e}) = {d}"));
                }
            }
        }
    }
    let kernel = joint_derivation_kernel(k)?;
    let constants = kernel.len() == 1 && kernel[0] == GrassmannElement::one(k)?;
    Ok(LambdaModuleReport {
        k,
        passed: drops && constants && (k == 0 || witness.is_some()),
        filtration_drops: drops,
        kernel_dimension: kernel.len(),
        kernel_is_constants: constants,
        nontrivial_witness: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    fn label(torus: &[i64], p: LabelParity) -> IrrepLabel {
        IrrepLabel::new(Weight::new(torus.to_vec(), vec![]), p)
    }

    #[test]
    fn tensor_law_examples() {
        let a = label(&[1, 2], LabelParity::Plus);
        let b = label(&[3, -1], LabelParity::Minus);
        assert_eq!(tensor(&a, &b).unwrap(), label(&[4, 1], LabelParity::Minus));
        let zero = label(&[0, 0], LabelParity::Plus);
        assert_eq!(tensor(&zero, &b).unwrap(), b);
        let c = label(&[5, -7], LabelParity::Minus);
        let inv = IrrepLabel::new(c.weight.neg(), LabelParity::Minus);
        assert_eq!(tensor(&c, &inv).unwrap(), zero);
        assert!(tensor(&a, &label(&[1], LabelParity::Plus)).is_err());
    }

    #[test]
    fn parity_switch() {
        let a = label(&[2], LabelParity::Plus);
        assert_eq!(pi_switch(&a), label(&[2], LabelParity::Minus));
        assert_eq!(pi_switch(&pi_switch(&a)), a);
    }

    #[test]
    fn characters() {
        let z = Weight::zero(1, 1);
        assert_eq!(character_eval(&z, &[0.3], &[1.7]).unwrap(), Complex64::new(1.0, 0.0));
        let l = Weight::new(vec![1], vec![]);
        let v = character_eval(&l, &[0.5], &[]).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let flat = Weight::new(vec![], vec![q("1/2")]);
        let v = character_eval(&flat, &[], &[std::f64::consts::PI]).unwrap();
        assert!((v - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(q("-0.5"), q("-1/2"));
        assert_eq!(q("1.75"), q("7/4"));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn weight_serde_round_trip() {
        let w = Weight::new(vec![1, -2], vec![q("-1/2"), q("1.75")]);
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"torus":[1,-2],"flat":["-1/2","7/4"]}"#);
        assert_eq!(serde_json::from_str::<Weight>(&text).unwrap(), w);
    }

    #[test]
    fn weight_box_enumeration() {
        let b = WeightBox::Grid {
            torus: vec![(-1, 1)],
            flat: vec![vec![q("0"), q("0.5")]],
        };
        let ws = b.weights().unwrap();
        assert_eq!(ws.len(), 6);
        assert_eq!(ws[1], Weight::new(vec![-1], vec![q("1/2")]));
        assert!(WeightBox::Grid {
            torus: vec![(1, 0)],
            flat: vec![]
        }
        .weights()
        .is_err());
        assert!(WeightBox::Points(vec![]).weights().unwrap().is_empty());
    }

    #[test]
    fn occurrence_never_reports_minus() {
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let b = WeightBox::Grid {
            torus: vec![(-1, 1)],
            flat: vec![],
        };
        let r = occurrences(&f, &b, &ClassifyParams::default()).unwrap();
        assert_eq!(r.entries.len(), 6);
        for e in &r.entries {
            match e.parity {
                LabelParity::Plus => assert_eq!(e.verdict, Verdict::Occurs),
                LabelParity::Minus => assert_eq!(e.verdict, Verdict::DoesNotOccur),
            }
        }
    }

    #[test]
    fn model_check_small_cases() {
        let p = ClassifyParams::default();
        let f = ConvexPotential::quadratic(1, 0).unwrap();
        let b = WeightBox::Grid {
            torus: vec![(-1, 1)],
            flat: vec![],
        };
        let r = gelfand_model_check(&f, &b, &p).unwrap();
        assert!(r.confirmed);
        assert_eq!(r.entries.len(), 6);
        assert!(r.entries.iter().all(|e| e.multiplicity == 1));
        let g = ConvexPotential::hyperbolic(1, 0, &[0.0], 0.25).unwrap();
        assert!(!gelfand_model_check(&g, &b, &p).unwrap().confirmed);
        assert!(gelfand_model_check(&g, &WeightBox::Points(vec![]), &p).unwrap().confirmed);
    }

    fn one_one() -> SuperHilbertSample {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::i();
        SuperHilbertSample::new(1, 1, m).unwrap()
    }

    #[test]
    fn membership_examples() {
        let v = one_one();
        assert_eq!(u_b_membership(&DMatrix::zeros(2, 2), &v).unwrap(), 0.0);
        let u = DMatrix::from_diagonal_element(2, 2, Complex64::i());
        assert_eq!(u_b_membership(&u, &v).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let even = random_complex(&mut rng, 2, 2).map(|_| Complex64::new(0.0, 0.0));
        let mut generic = even.clone();
        generic[(0, 0)] = Complex64::new(0.3, 0.1);
        generic[(1, 1)] = Complex64::new(-0.7, 0.2);
        assert!(u_b_membership(&generic, &v).unwrap() > 0.1);
        let mut mixed = DMatrix::zeros(2, 2);
        mixed[(0, 0)] = Complex64::new(1.0, 0.0);
        mixed[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(u_b_membership(&mixed, &v), Err(Error::NonHomogeneous)));
    }

    #[test]
    fn odd_u_b_on_one_one_has_no_nonzero_nilpotents() {
        let v = one_one();
        let basis = v.u_b_basis(true);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(u_b_membership(b, &v).unwrap() < 1e-14);
        }
        let search = search_odd_nilpotent(&basis, &[0.8, -0.3], 200);
        assert!(!search.found());
        assert!(search.residual > 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = odd_triviality_check(&v, 20, &mut rng);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn indefinite_form_admits_nilpotents() {
        // both blocks indefinite
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(-1.0, 0.0);
        m[(2, 2)] = Complex64::i();
        m[(3, 3)] = -Complex64::i();
        let v = SuperHilbertSample::new_unchecked(2, 2, m.clone());
        assert!(SuperHilbertSample::new(2, 2, m).is_err());
        let basis = v.u_b_basis(true);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut largest = 0.0f64;
        for _ in 0..10 {
            let c0: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let search = search_odd_nilpotent(&basis, &c0, 200);
            if search.found() {
                largest = largest.max(max_modulus(&search.operator));
            }
        }
        assert!(largest > 1e-3, "{largest}");
    }

    #[test]
    fn lambda_module() {
        let r = lambda_module_checks(1).unwrap();
        assert!(r.passed);
        assert_eq!(r.nontrivial_witness.as_deref(), Some("D_1(zeta1) = 1"));
        let r = lambda_module_checks(2).unwrap();
        assert_eq!(r.kernel_dimension, 1);
        assert!(r.passed);
        assert!(lambda_module_checks(5).is_err());
    }
}
