//! Critical pairs `|A+B| = |A|+|B|-1`: Kemperman decompositions and the
//! reduction of periodic sumsets.

use std::fmt;

use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset, Subgroup};
use crate::structure::{progression_with, qp_splits};
use crate::sumset::{is_periodic_bits, nu_counts, stabilizer_bits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KstType {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for KstType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Data backing the type of the aperiodic parts `(A0, B0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KstWitness {
    /// `|A0| = 1` or `|B0| = 1`.
    Singleton,
    /// Both parts are progressions with difference `d`.
    Progression { d: GroupElement },
    /// `g0` is the only unique expression element of `A0 + B0` and
    /// `B0 = (g0 - ((g1+H) \ A0)) ∪ {g0 - g1}`.
    UniqueElement { g0: GroupElement, g1: GroupElement },
    /// `B0 = g0 - ((g1+H) \ A0)`, so `A0 + B0 = (g0+H) \ {g0}`.
    PuncturedCoset { g0: GroupElement, g1: GroupElement },
}

/// A Kemperman decomposition of a critical pair, with the certificate of
/// the quotient pair when the quasi-period is proper.
#[derive(Clone, Debug)]
pub struct KstCertificate {
    pub group: FiniteAbelianGroup,
    pub a: GroupSubset,
    pub b: GroupSubset,
    pub quasi_period: Subgroup,
    pub a1: GroupSubset,
    pub a0: GroupSubset,
    pub b1: GroupSubset,
    pub b0: GroupSubset,
    pub kind: KstType,
    pub witness: KstWitness,
    pub recursion: Option<Box<KstCertificate>>,
    /// `0 = H_0 < H_1 < ... < H_n = G`, with `H_1` the quasi-period.
    pub chain: Vec<Subgroup>,
}

impl KstCertificate {
    /// Types along the recursion, outermost first.
    pub fn type_chain(&self) -> Vec<KstType> {
        let mut out = vec![self.kind];
        let mut cur = self;
        while let Some(next) = &cur.recursion {
            out.push(next.kind);
            cur = next;
        }
        out
    }
}

/// Nontrivial subgroups, largest first, ties by carrier encoding. The
/// trivial group is its own only candidate.
pub(crate) fn search_order(g: &FiniteAbelianGroup) -> Vec<&Subgroup> {
    let mut hs: Vec<&Subgroup> = g
        .all_subgroups()
        .iter()
        .filter(|h| !h.is_trivial() || g.is_trivial())
        .collect();
    hs.sort_by(|x, y| y.order().cmp(&x.order()).then(x.bits().cmp(&y.bits())));
    hs
}

/// Representations `(a, b)` of the unique expression elements of `A + B`.
pub(crate) fn unique_representations(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Vec<(usize, usize)> {
    let counts = nu_counts(g, a, b);
    let mut out = Vec::new();
    for x in a.iter() {
        for y in b.iter() {
            if counts[g.add_idx(x, y)] == 1 {
                out.push((x, y));
            }
        }
    }
    out
}

fn check_pair(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    g.owns(a)?;
    g.owns(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    Ok(())
}

pub fn kst_classify(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<KstCertificate> {
    check_pair(g, a, b)?;
    let s = g.sum_bits(a.bits(), b.bits());
    if s.len() + 1 != a.len() + b.len() {
        return Err(Error::Precondition(format!(
            "|A+B| = {} but |A|+|B|-1 = {}",
            s.len(),
            a.len() + b.len() - 1
        )));
    }
    if is_periodic_bits(g, s) && unique_representations(g, a.bits(), b.bits()).is_empty() {
        return Err(Error::Precondition(
            "A+B is periodic with no unique expression element".into(),
        ));
    }
    classify_with(g, a.bits(), b.bits(), &search_order(g))
}

/// Searches quasi-periods in the given order; the first that admits a
/// decomposition with critical quotient pair, a once-represented coset
/// for `A0 + B0`, no unique expression element outside it, and a type
/// I-IV pair of aperiodic parts wins. The quotient is classified
/// with the default order.
pub(crate) fn classify_with(
    g: &FiniteAbelianGroup,
    a: Bits,
    b: Bits,
    order: &[&Subgroup],
) -> Result<KstCertificate> {
    let unique = unique_representations(g, a, b);
    for &h in order {
        let splits_a: Vec<(Bits, Bits)> = qp_splits(a, h).into_iter().filter(|s| !s.1.is_empty()).collect();
        let splits_b: Vec<(Bits, Bits)> = qp_splits(b, h).into_iter().filter(|s| !s.1.is_empty()).collect();
        if splits_a.is_empty() || splits_b.is_empty() {
            continue;
        }
        let q = g.quotient_map(h)?;
        let t = q.target();
        let (pa, pb) = (q.push_bits(a), q.push_bits(b));
        if t.sum_bits(pa, pb).len() + 1 != pa.len() + pb.len() {
            continue;
        }
        let counts = nu_counts(t, pa, pb);
        for &(a1, a0) in &splits_a {
            for &(b1, b0) in &splits_b {
                let c = t.add_idx(q.map_idx(a0.min().unwrap()), q.map_idx(b0.min().unwrap()));
                if counts[c] != 1 {
                    continue;
                }
                if unique.iter().any(|&(x, y)| a1.contains(x) || b1.contains(y)) {
                    continue;
                }
                let Some((kind, witness)) = kst_type(g, h, a0, b0) else {
                    continue;
                };
                let (recursion, chain) = if h.bits() == g.full_bits() {
                    let chain = if h.is_trivial() {
                        vec![h.clone()]
                    } else {
                        vec![g.trivial_subgroup(), h.clone()]
                    };
                    (None, chain)
                } else {
                    let sub = classify_with(t, pa, pb, &search_order(t))?;
                    let mut chain = vec![g.trivial_subgroup()];
                    chain.extend(sub.chain.iter().map(|k| g.subgroup_of_bits(q.pull_bits(k.bits()))));
                    (Some(Box::new(sub)), chain)
                };
                return Ok(KstCertificate {
                    group: g.clone(),
                    a: g.set(a),
                    b: g.set(b),
                    quasi_period: h.clone(),
                    a1: g.set(a1),
                    a0: g.set(a0),
                    b1: g.set(b1),
                    b0: g.set(b0),
                    kind,
                    witness,
                    recursion,
                    chain,
                });
            }
        }
    }
    Err(Error::Internal(format!(
        "no Kemperman decomposition found for A={:?}, B={:?} in {g}",
        a, b
    )))
}

/// Type of the aperiodic parts, tried in the order I, II, III, IV.
pub(crate) fn kst_type(g: &FiniteAbelianGroup, h: &Subgroup, a0: Bits, b0: Bits) -> Option<(KstType, KstWitness)> {
    if a0.len() == 1 || b0.len() == 1 {
        return Some((KstType::I, KstWitness::Singleton));
    }
    let need = a0.len() + b0.len() - 1;
    if let Some(d) = (1..g.order()).find(|&d| {
        g.order_idx(d) >= need
            && progression_with(g, a0, d).is_some()
            && progression_with(g, b0, d).is_some()
    }) {
        return Some((KstType::II, KstWitness::Progression { d: GroupElement::from_index(d) }));
    }
    let counts = nu_counts(g, a0, b0);
    let singles: Vec<usize> = (0..g.order()).filter(|&x| counts[x] == 1).collect();
    let coset = h.coset_of(a0.min()?);
    let holes = coset.difference(a0);
    if a0.len() + b0.len() == h.order() + 1 && singles.len() == 1 {
        let g0 = singles[0];
        let base = g.translate_bits(g.neg_bits(holes), g0);
        if let Some(g1) = a0.iter().find(|&g1| base.with(g.sub_idx(g0, g1)) == b0) {
            let e = GroupElement::from_index;
            return Some((KstType::III, KstWitness::UniqueElement { g0: e(g0), g1: e(g1) }));
        }
    }
    if singles.is_empty() && stabilizer_bits(g, a0).len() == 1 {
        let neg_holes = g.neg_bits(holes);
        if let Some(g0) = (0..g.order()).find(|&g0| g.translate_bits(neg_holes, g0) == b0) {
            let e = GroupElement::from_index;
            let g1 = a0.min()?;
            return Some((KstType::IV, KstWitness::PuncturedCoset { g0: e(g0), g1: e(g1) }));
        }
    }
    None
}

/// A critical pair with periodic sumset and no unique expression element,
/// lifted to its quotient.
#[derive(Clone, Debug)]
pub struct PeriodicReduction {
    pub quasi_period: Subgroup,
    /// `|A+B| + |H| - |A| - |B|`, the number of elements missing from
    /// `A+H` and `B+H` together.
    pub hole_count: usize,
    pub quotient_a: GroupSubset,
    pub quotient_b: GroupSubset,
    pub quotient_certificate: KstCertificate,
    /// The holes may sit anywhere in `A+H` and `B+H`; the pair stays critical.
    pub holes_unconstrained: bool,
}

pub fn kst_periodic_reduce(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<PeriodicReduction> {
    check_pair(g, a, b)?;
    let s = g.sum_bits(a.bits(), b.bits());
    if s.len() + 1 > a.len() + b.len() {
        return Err(Error::Precondition(format!(
            "|A+B| = {} exceeds |A|+|B|-1 = {}",
            s.len(),
            a.len() + b.len() - 1
        )));
    }
    let period = stabilizer_bits(g, s);
    if period.len() == 1 {
        return Err(Error::Precondition("A+B is aperiodic".into()));
    }
    if !unique_representations(g, a.bits(), b.bits()).is_empty() {
        return Err(Error::Precondition(
            "A+B has a unique expression element; classify it directly".into(),
        ));
    }
    let h = g.subgroup_of_bits(period);
    let q = g.quotient_map(&h)?;
    let t = q.target();
    let (pa, pb, ps) = (q.push_bits(a.bits()), q.push_bits(b.bits()), q.push_bits(s));
    if ps.len() + 1 != pa.len() + pb.len() || is_periodic_bits(t, ps) {
        return Err(Error::Internal(format!(
            "quotient of a periodic critical pair is not an aperiodic critical pair in {t}"
        )));
    }
    let hole_count = s.len() + h.order() - a.len() - b.len();
    let quotient_certificate = classify_with(t, pa, pb, &search_order(t))?;
    Ok(PeriodicReduction {
        hole_count,
        holes_unconstrained: hole_count < h.order(),
        quotient_a: t.set(pa),
        quotient_b: t.set(pb),
        quotient_certificate,
        quasi_period: h,
    })
}
