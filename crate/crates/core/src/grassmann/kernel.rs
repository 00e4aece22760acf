//! Exact kernel computations over the blade basis.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::blade::Blade;
use super::coeff::Coeff;
use super::element::GrassmannElement;
use crate::error::{Error, Result};

/// Default cap on `k` for computations over the full `2^{2k}` blade basis.
pub const DEFAULT_BASIS_BOUND: usize = 6;

type SparseRow = BTreeMap<usize, BigRational>;

/// Null space of a sparse rational matrix, as a list of sparse vectors.
pub fn rational_kernel(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Vec<SparseRow> {
    // pivot column -> row whose leading entry is 1 at that column
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for mut row in rows {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, lead_val)) = row.iter().next() else {
                break;
            };
            match pivots.get(&lead) {
                Some(prow) => {
                    let factor = lead_val.clone();
                    for (c, v) in prow {
                        let e = row.entry(*c).or_insert_with(BigRational::zero);
                        *e -= &factor * v;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    let inv = lead_val.recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }

    // back substitution to reduced row echelon form
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    for &p in &cols {
        let prow = pivots[&p].clone();
        for (&q, qrow) in pivots.range_mut(..p) {
            debug_assert!(q < p);
            if let Some(f) = qrow.get(&p).cloned() {
                for (c, v) in &prow {
                    let e = qrow.entry(*c).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        qrow.remove(c);
                    }
                }
            }
        }
    }

    (0..ncols)
        .filter(|c| !pivots.contains_key(c))
        .map(|free| {
            let mut v = SparseRow::new();
            v.insert(free, BigRational::one());
            for (&p, prow) in &pivots {
                if let Some(x) = prow.get(&free) {
                    v.insert(p, -x.clone());
                }
            }
            v
        })
        .collect()
}

fn check_bound(k: usize, bound: usize) -> Result<()> {
    if k > bound {
        return Err(Error::Resource(format!(
            "k = {k} exceeds the configured basis bound {bound} (2^{} blades)",
            2 * k
        )));
    }
    Ok(())
}

/// Basis of `{f : ∂_i f = 0 for every odd slot i}` using the default bound.
pub fn joint_derivation_kernel(k: usize) -> Result<Vec<GrassmannElement>> {
    joint_derivation_kernel_bounded(k, DEFAULT_BASIS_BOUND)
}

pub fn joint_derivation_kernel_bounded(k: usize, bound: usize) -> Result<Vec<GrassmannElement>> {
    check_bound(k, bound)?;
    let dim = 1usize << (2 * k);
    // rows indexed by (slot, target blade)
    let mut rows: BTreeMap<(usize, u32), SparseRow> = BTreeMap::new();
    for mask in 0..dim as u32 {
        let basis = GrassmannElement::monomial(Coeff::one(), Blade::from_mask(k, mask));
        for slot in 1..=2 * k {
            for (target, c) in basis.derivation(slot)?.terms() {
                debug_assert!(c.im.is_zero());
                rows.entry((slot, target.mask()))
                    .or_default()
                    .insert(mask as usize, c.re.clone());
            }
        }
    }
    rational_kernel(rows.into_values(), dim)
        .into_iter()
        .map(|v| {
            GrassmannElement::from_terms(
                k,
                v.into_iter()
                    .map(|(col, x)| (Blade::from_mask(k, col as u32), Complex::new(x, BigRational::zero()))),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::coeff::rational;
    use super::*;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, rational(v, 1))).collect()
    }

    #[test]
    fn kernel_of_small_matrix() {
        // x0 + x1 = 0, x1 - x2 = 0 → kernel spanned by (-1, 1, 1)
        let k = rational_kernel(vec![row(&[(0, 1), (1, 1)]), row(&[(1, 1), (2, -1)])], 3);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], row(&[(0, -1), (1, 1), (2, 1)]));
    }

    #[test]
    fn kernel_with_dependent_rows() {
        let k = rational_kernel(
            vec![row(&[(0, 2), (1, 4)]), row(&[(0, 1), (1, 2)]), row(&[])],
            3,
        );
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn joint_kernel_is_constants() {
        for k in 0..=3 {
            let basis = joint_derivation_kernel(k).unwrap();
            assert_eq!(basis.len(), 1, "k = {k}");
            assert_eq!(basis[0], GrassmannElement::one(k).unwrap());
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(joint_derivation_kernel(7), Err(Error::Resource(_))));
        assert!(joint_derivation_kernel_bounded(2, 1).is_err());
    }
}
