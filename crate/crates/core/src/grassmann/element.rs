use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::blade::{blade_product, Blade, Sign};
use super::coeff::{i_power_reduced, Coeff};
use crate::error::{Error, Result};

/// Parity of a Grassmann element. Zero counts as even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_degree(degree: usize) -> Parity {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Group law on `{+, -}`; anything involving `Mixed` stays mixed.
    pub fn combine(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

/// Element of the complex Grassmann algebra on `2k` odd generators with
/// exact coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannElement {
    k: usize,
    terms: BTreeMap<Blade, Coeff>,
}

impl GrassmannElement {
    pub fn zero(k: usize) -> Result<Self> {
        Blade::unit(k)?;
        Ok(GrassmannElement {
            k,
            terms: BTreeMap::new(),
        })
    }

    pub fn scalar(k: usize, c: Coeff) -> Result<Self> {
        Ok(Self::monomial(c, Blade::unit(k)?))
    }

    pub fn one(k: usize) -> Result<Self> {
        Self::scalar(k, Coeff::one())
    }

    pub fn monomial(c: Coeff, blade: Blade) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(blade, c);
        }
        GrassmannElement {
            k: blade.pairs(),
            terms,
        }
    }

    /// Generator at 1-based `slot` with coefficient one.
    pub fn generator(k: usize, slot: usize) -> Result<Self> {
        Ok(Self::monomial(Coeff::one(), Blade::generator(k, slot)?))
    }

    pub fn from_terms(k: usize, terms: impl IntoIterator<Item = (Blade, Coeff)>) -> Result<Self> {
        let mut out = Self::zero(k)?;
        for (b, c) in terms {
            if b.pairs() != k {
                return Err(Error::Dimension {
                    expected: k,
                    found: b.pairs(),
                });
            }
            out.accumulate(b, c);
        }
        Ok(out)
    }

    pub fn pairs(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: &Blade) -> Coeff {
        self.terms.get(blade).cloned().unwrap_or_else(Coeff::zero)
    }

    fn accumulate(&mut self, blade: Blade, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&blade) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&blade);
                }
            }
            None => {
                self.terms.insert(blade, c);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::Dimension {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    pub fn parity(&self) -> Parity {
        let mut parities = self.terms.keys().map(|b| Parity::of_degree(b.degree()));
        match parities.next() {
            None => Parity::Even,
            Some(first) => {
                if parities.all(|p| p == first) {
                    first
                } else {
                    Parity::Mixed
                }
            }
        }
    }

    /// Largest blade degree present (0 for the zero element).
    pub fn filtration_degree(&self) -> usize {
        self.terms.keys().map(Blade::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = GrassmannElement {
            k: self.k,
            terms: BTreeMap::new(),
        };
        for (b, v) in &self.terms {
            out.accumulate(*b, v * c);
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.accumulate(*b, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Bilinear extension of [`blade_product`].
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = GrassmannElement {
            k: self.k,
            terms: BTreeMap::new(),
        };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((sign, blade)) = blade_product(*a, *b)? {
                    let prod = ca * cb;
                    out.accumulate(blade, if sign == Sign::Minus { -prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Antilinear extension of [`star`]: `(Σ c_b b)* = Σ conj(c_b) b*`.
    pub fn star_element(&self) -> Self {
        let mut out = GrassmannElement {
            k: self.k,
            terms: BTreeMap::new(),
        };
        for (b, c) in &self.terms {
            let (coef, blade) = star_parts(*b);
            out.accumulate(blade, coef * c.conj());
        }
        out
    }

    /// Coefficient of `ζ_top`.
    pub fn berezin_top(&self) -> Coeff {
        match Blade::top(self.k) {
            Ok(t) => self.coefficient(&t),
            Err(_) => Coeff::zero(),
        }
    }

    /// Left odd derivation `∂/∂(slot)`: removes the slot from every blade that
    /// contains it, with sign `(-1)^{#slots before it}`.
    pub fn derivation(&self, slot: usize) -> Result<Self> {
        if slot == 0 || slot > 2 * self.k {
            return Err(Error::IndexOutOfRange {
                index: slot,
                max: 2 * self.k,
            });
        }
        let bit = 1u32 << (slot - 1);
        let mut out = GrassmannElement {
            k: self.k,
            terms: BTreeMap::new(),
        };
        for (b, c) in &self.terms {
            if b.mask() & bit == 0 {
                continue;
            }
            let before = (b.mask() & (bit - 1)).count_ones();
            let reduced = Blade::from_mask(self.k, b.mask() & !bit);
            out.accumulate(reduced, if before % 2 == 1 { -c.clone() } else { c.clone() });
        }
        Ok(out)
    }

    /// Keeps only blades of degree ≤ `s`.
    pub fn truncate(&self, s: usize) -> Self {
        GrassmannElement {
            k: self.k,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.degree() <= s)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }
}

/// Coefficient and complementary blade of `star(blade)`, so that
/// `blade · (coef · complement) = i^{deg mod 2} · ζ_top`.
fn star_parts(blade: Blade) -> (Coeff, Blade) {
    let comp = blade.complement();
    let (sign, _) = blade_product(blade, comp)
        .expect("complement shares k")
        .expect("complement is disjoint");
    let c = i_power_reduced(blade.degree());
    (if sign == Sign::Minus { -c } else { c }, comp)
}

/// Star of a single blade.
pub fn star(blade: Blade) -> GrassmannElement {
    let (c, comp) = star_parts(blade);
    GrassmannElement::monomial(c, comp)
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        GrassmannElement {
            k: self.k,
            terms: self.terms.iter().map(|(b, c)| (*b, -c.clone())).collect(),
        }
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

/// Panics on mismatched `k`; use [`GrassmannElement::try_add`] otherwise.
impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.try_add(rhs).expect("mismatched generator counts")
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.try_sub(rhs).expect("mismatched generator counts")
    }
}
