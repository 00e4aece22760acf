use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest generator-pair count a [`Blade`] can address (2k slots in a `u32`).
pub const MAX_PAIRS: usize = 16;

/// A canonical monomial in the odd generators.
///
/// Slots `1..=k` hold the holomorphic generators (ζ, also written ξ) and
/// slots `k+1..=2k` the conjugate ones (ζ̄, also written η). The monomial is
/// always stored with strictly ascending slots; bit `s - 1` of the mask marks
/// slot `s`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade {
    mask: u32,
    k: u8,
}

/// Sign of a reordering, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

fn check_pairs(k: usize) -> Result<()> {
    if k > MAX_PAIRS {
        return Err(Error::Resource(format!(
            "k = {k} exceeds the blade capacity of {MAX_PAIRS} generator pairs"
        )));
    }
    Ok(())
}

impl Blade {
    /// The unit blade (empty index set).
    pub fn unit(k: usize) -> Result<Blade> {
        check_pairs(k)?;
        Ok(Blade { mask: 0, k: k as u8 })
    }

    /// `ζ_top = ζ₁⋯ζ_k ζ̄₁⋯ζ̄_k`.
    pub fn top(k: usize) -> Result<Blade> {
        check_pairs(k)?;
        Ok(Blade {
            mask: full_mask(k),
            k: k as u8,
        })
    }

    /// Builds a blade from 1-based slots, which must be strictly ascending.
    pub fn new(k: usize, slots: &[usize]) -> Result<Blade> {
        check_pairs(k)?;
        let mut mask = 0u32;
        let mut prev = 0usize;
        for &s in slots {
            if s == 0 || s > 2 * k {
                return Err(Error::IndexOutOfRange { index: s, max: 2 * k });
            }
            if s <= prev {
                return Err(Error::InvalidParameter(format!(
                    "blade slots must be strictly ascending, got {slots:?}"
                )));
            }
            prev = s;
            mask |= 1 << (s - 1);
        }
        Ok(Blade { mask, k: k as u8 })
    }

    /// Single generator at 1-based `slot`.
    pub fn generator(k: usize, slot: usize) -> Result<Blade> {
        Blade::new(k, &[slot])
    }

    pub(crate) fn from_mask(k: usize, mask: u32) -> Blade {
        debug_assert!(k <= MAX_PAIRS && mask & !full_mask(k) == 0);
        Blade { mask, k: k as u8 }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn pairs(&self) -> usize {
        self.k as usize
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_unit(&self) -> bool {
        self.mask == 0
    }

    pub fn is_top(&self) -> bool {
        self.mask == full_mask(self.pairs())
    }

    pub fn contains(&self, slot: usize) -> bool {
        slot >= 1 && slot <= 2 * self.pairs() && self.mask & (1 << (slot - 1)) != 0
    }

    /// True when no conjugate (ζ̄) slot is present.
    pub fn is_holomorphic(&self) -> bool {
        self.mask >> self.pairs() == 0
    }

    /// Ascending 1-based slots.
    pub fn slots(&self) -> Vec<usize> {
        (0..2 * self.pairs())
            .filter(|b| self.mask & (1 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    /// The blade made of every slot missing from `self`.
    pub fn complement(&self) -> Blade {
        Blade {
            mask: full_mask(self.pairs()) & !self.mask,
            k: self.k,
        }
    }
}

fn full_mask(k: usize) -> u32 {
    if k == 0 {
        0
    } else {
        u32::MAX >> (32 - 2 * k)
    }
}

/// Number of transpositions needed to sort the concatenation `a ++ b`, i.e.
/// pairs `(i in a, j in b)` with `i > j`.
pub(crate) fn concat_inversions(a: u32, b: u32) -> u32 {
    let mut count = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        count += (a >> j >> 1).count_ones();
    }
    count
}

/// Product of two blades: `None` when they share a generator, otherwise the
/// reordering sign and the sorted union.
pub fn blade_product(a: Blade, b: Blade) -> Result<Option<(Sign, Blade)>> {
    if a.k != b.k {
        return Err(Error::Dimension {
            expected: a.pairs(),
            found: b.pairs(),
        });
    }
    if a.mask & b.mask != 0 {
        return Ok(None);
    }
    let sign = Sign::from_parity(concat_inversions(a.mask, b.mask) % 2 == 1);
    Ok(Some((
        sign,
        Blade {
            mask: a.mask | b.mask,
            k: a.k,
        },
    )))
}

impl Ord for Blade {
    /// Graded lexicographic: lower degree first, then lexicographic on the
    /// ascending slot lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| {
                let diff = self.mask ^ other.mask;
                if diff == 0 {
                    Ordering::Equal
                } else if self.mask & (diff & diff.wrapping_neg()) != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Blade(k={}, {:?})", self.k, self.slots())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(k: usize, s: &[usize]) -> Blade {
        Blade::new(k, s).unwrap()
    }

    #[test]
    fn repeated_generator_is_zero() {
        assert_eq!(blade_product(b(2, &[1, 2]), b(2, &[2])).unwrap(), None);
    }

    #[test]
    fn single_transposition() {
        assert_eq!(
            blade_product(b(2, &[2]), b(2, &[1])).unwrap(),
            Some((Sign::Minus, b(2, &[1, 2])))
        );
        assert_eq!(
            blade_product(b(2, &[1]), b(2, &[2])).unwrap(),
            Some((Sign::Plus, b(2, &[1, 2])))
        );
    }

    #[test]
    fn mismatched_pairs() {
        assert!(matches!(
            blade_product(b(1, &[1]), b(2, &[2])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_slots() {
        assert!(Blade::new(2, &[2, 1]).is_err());
        assert!(Blade::new(2, &[1, 1]).is_err());
        assert!(matches!(
            Blade::new(2, &[5]),
            Err(Error::IndexOutOfRange { index: 5, max: 4 })
        ));
        assert!(Blade::new(17, &[]).is_err());
    }

    #[test]
    fn inversion_count_matches_brute_force() {
        // count inversions of the literal concatenated sequence
        for a in 0u32..64 {
            for c in 0u32..64 {
                if a & c != 0 {
                    continue;
                }
                let seq: Vec<u32> = (0..6)
                    .filter(|i| a & (1 << i) != 0)
                    .chain((0..6).filter(|i| c & (1 << i) != 0))
                    .collect();
                let mut inv = 0;
                for i in 0..seq.len() {
                    for j in i + 1..seq.len() {
                        if seq[i] > seq[j] {
                            inv += 1;
                        }
                    }
                }
                assert_eq!(concat_inversions(a, c), inv);
            }
        }
    }

    #[test]
    fn ordering_is_graded_lex() {
        let mut v = vec![b(2, &[2, 3]), b(2, &[1, 4]), b(2, &[]), b(2, &[3]), b(2, &[1, 2])];
        v.sort();
        assert_eq!(
            v,
            vec![b(2, &[]), b(2, &[3]), b(2, &[1, 2]), b(2, &[1, 4]), b(2, &[2, 3])]
        );
    }

    #[test]
    fn complement_and_top() {
        let t = Blade::top(2).unwrap();
        assert_eq!(t.slots(), vec![1, 2, 3, 4]);
        assert_eq!(b(2, &[1, 3]).complement(), b(2, &[2, 4]));
        assert!(Blade::unit(2).unwrap().complement().is_top());
        assert!(b(2, &[1, 2]).is_holomorphic());
        assert!(!b(2, &[1, 3]).is_holomorphic());
    }
}
