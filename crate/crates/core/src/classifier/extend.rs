//! Extendibility and the duality for non-extendible pairs.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset};

/// Least `x ∉ A` with `(A ∪ {x}) + B = A + B`, searched inside `within`.
pub(crate) fn extension_within(g: &FiniteAbelianGroup, a: Bits, b: Bits, within: Bits) -> Option<usize> {
    let s = g.sum_bits(a, b);
    within
        .difference(a)
        .iter()
        .find(|&x| g.translate_bits(b, x).is_subset(s))
}

pub(crate) fn extension(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Option<usize> {
    extension_within(g, a, b, g.full_bits())
}

pub(crate) fn is_non_extendible_pair(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> bool {
    extension(g, a, b).is_none() && extension(g, b, a).is_none()
}

/// Extension witnesses for each side of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extendibility {
    /// Some `a0 ∉ A` with `(A ∪ {a0}) + B = A + B`.
    pub a: Option<GroupElement>,
    /// Some `b0 ∉ B` with `A + (B ∪ {b0}) = A + B`.
    pub b: Option<GroupElement>,
}

impl Extendibility {
    pub fn pair_is_extendible(&self) -> bool {
        self.a.is_some() || self.b.is_some()
    }
}

pub fn is_extendible(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<Extendibility> {
    g.owns(a)?;
    g.owns(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    Ok(Extendibility {
        a: extension(g, a.bits(), b.bits()).map(GroupElement::from_index),
        b: extension(g, b.bits(), a.bits()).map(GroupElement::from_index),
    })
}

/// `-B + complement(A+B)`, which always lies inside `complement(A)` and
/// equals it exactly when `A` is non-extendible.
pub fn half_dual(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    g.owns(a)?;
    g.owns(b)?;
    let c = g.complement_bits(g.sum_bits(a.bits(), b.bits()));
    Ok(g.set(g.sum_bits(g.neg_bits(b.bits()), c)))
}

/// The pairs `(-A, C)` and `(-B, C)` with `C = complement(A+B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPairs {
    pub complement: GroupSubset,
    pub neg_a: GroupSubset,
    pub neg_b: GroupSubset,
    /// `|A+B| - |A| - |B|`, shared by all three pairs.
    pub excess: i64,
}

pub fn dual_pairs(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<DualPairs> {
    let ext = is_extendible(g, a, b)?;
    if ext.pair_is_extendible() {
        return Err(Error::Precondition("the pair is extendible".into()));
    }
    let s = g.sum_bits(a.bits(), b.bits());
    if s == g.full_bits() {
        return Err(Error::Precondition("A+B is the whole group".into()));
    }
    let c = g.complement_bits(s);
    let (na, nb) = (g.neg_bits(a.bits()), g.neg_bits(b.bits()));
    let excess = s.len() as i64 - a.len() as i64 - b.len() as i64;
    let fail = |what: &str| Err(Error::Internal(format!("duality failed: {what}")));
    if g.sum_bits(nb, c) != g.complement_bits(a.bits()) {
        return fail("-B + C differs from the complement of A");
    }
    if g.sum_bits(na, c) != g.complement_bits(b.bits()) {
        return fail("-A + C differs from the complement of B");
    }
    for (x, name) in [(na, "(-A, C)"), (nb, "(-B, C)")] {
        if !is_non_extendible_pair(g, x, c) {
            return fail(&format!("{name} is extendible"));
        }
        let dual_excess = g.sum_bits(x, c).len() as i64 - x.len() as i64 - c.len() as i64;
        if dual_excess != excess {
            return fail(&format!("{name} has excess {dual_excess}, expected {excess}"));
        }
    }
    Ok(DualPairs {
        complement: g.set(c),
        neg_a: g.set(na),
        neg_b: g.set(nb),
        excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn s(grp: &FiniteAbelianGroup, xs: &[usize]) -> GroupSubset {
        grp.subset(xs.iter().copied()).unwrap()
    }

    #[test]
    fn extendibility_examples() {
        let z7 = z(7);
        let e = is_extendible(&z7, &s(&z7, &[0, 1]), &s(&z7, &[0, 2])).unwrap();
        assert_eq!(e.b.map(GroupElement::index), Some(1));
        assert_eq!(e.a, None);
        let e = is_extendible(&z7, &s(&z7, &[0, 1, 3, 4]), &s(&z7, &[0, 1, 2, 3])).unwrap();
        assert!(e.a.is_some() && e.b.is_some());
        let e = is_extendible(&z7, &s(&z7, &[0, 1, 3]), &s(&z7, &[1, 2, 3, 5])).unwrap();
        assert!(!e.pair_is_extendible());
    }

    #[test]
    fn half_dual_on_one_sided_example() {
        let z7 = z(7);
        let (a, b) = (s(&z7, &[0, 1]), s(&z7, &[0, 2]));
        assert_eq!(half_dual(&z7, &a, &b).unwrap().indices(), vec![2, 3, 4, 5, 6]);
        assert!(matches!(dual_pairs(&z7, &a, &b), Err(Error::Precondition(_))));
    }

    #[test]
    fn dual_pairs_exhaustive_z8_excess_zero() {
        let z8 = z(8);
        let mut hits = 0;
        for m in 1u128..256 {
            for k in 1u128..256 {
                let (a, b) = (z8.set(Bits(m)), z8.set(Bits(k)));
                let sum = z8.sum_bits(a.bits(), b.bits());
                if sum.len() != a.len() + b.len() || sum == z8.full_bits() {
                    continue;
                }
                if !is_non_extendible_pair(&z8, a.bits(), b.bits()) {
                    continue;
                }
                let d = dual_pairs(&z8, &a, &b).unwrap();
                assert_eq!(d.excess, 0);
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn non_extendible_iff_half_dual_is_full() {
        let z6 = z(6);
        for m in 1u128..64 {
            for k in 1u128..64 {
                let (a, b) = (z6.set(Bits(m)), z6.set(Bits(k)));
                let hd = half_dual(&z6, &a, &b).unwrap();
                let comp = z6.complement(&a).unwrap();
                assert!(hd.is_subset(&comp));
                let a_non_ext = extension(&z6, a.bits(), b.bits()).is_none();
                assert_eq!(a_non_ext, hd == comp);
            }
        }
    }
}
