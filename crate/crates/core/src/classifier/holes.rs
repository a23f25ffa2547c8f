//! Where the holes of a pair with `|A+B| = |A|+|B|` sit inside the critical
//! pair obtained by filling them.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset, Subgroup};
use crate::structure::progression_with;

use super::beyond::{find_extension, Side};
use super::extend::{extension, extension_within};
use super::kst::{kst_classify, unique_representations, KstCertificate, KstType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoleCase {
    /// One element was deleted from one side; `admissible` lists every
    /// element of that side of the critical pair whose deletion leaves the
    /// sumset unchanged.
    ExtendiblePair { side: Side, hole: GroupElement, admissible: GroupSubset },
    /// Case A: type II with both holes the second term of their progression
    /// with difference `d`.
    SecondTerms { d: GroupElement },
    /// Case B: type IV, and the aperiodic parts less the holes, translated
    /// into the quasi-period, are the dual of the non-extendible type V
    /// pair `type_v` inside the quasi-period.
    DualOfTypeV {
        quasi_period: Subgroup,
        a0: GroupSubset,
        b0: GroupSubset,
        type_v: (GroupSubset, GroupSubset),
    },
    /// Case C: type I with singleton aperiodic parts and holes in the
    /// periodic parts, over a quotient pair of type II. `delta` is the
    /// quotient difference and `position` the common index (0 or 1) of the
    /// hole cosets in their progressions.
    QuotientProgression { delta: GroupElement, position: usize },
}

impl HoleCase {
    pub fn tag(&self) -> &'static str {
        match self {
            HoleCase::ExtendiblePair { .. } => "ExtendiblePair",
            HoleCase::SecondTerms { .. } => "A",
            HoleCase::DualOfTypeV { .. } => "B",
            HoleCase::QuotientProgression { .. } => "C",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HolePlacement {
    pub a_prime: GroupSubset,
    pub b_prime: GroupSubset,
    /// Element added to `A`, if any.
    pub alpha: Option<GroupElement>,
    /// Element added to `B`, if any.
    pub beta: Option<GroupElement>,
    /// The single element of `(A'+B') \ (A+B)`, for non-extendible pairs.
    pub gamma: Option<GroupElement>,
    /// Kemperman decomposition of `(A', B')`; absent when `A'+B'` has no
    /// unique expression element.
    pub kst: Option<KstCertificate>,
    pub case: HoleCase,
}

pub fn hole_placement(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<HolePlacement> {
    g.owns(a)?;
    g.owns(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    if g.sum_bits(a.bits(), b.bits()).len() != a.len() + b.len() {
        return Err(Error::Precondition("|A+B| must equal |A|+|B|".into()));
    }
    let (x, y) = (a.bits(), b.bits());
    if let Some((side, hole)) = extension(g, x, y)
        .map(|h| (Side::A, h))
        .or_else(|| extension(g, y, x).map(|h| (Side::B, h)))
    {
        return extendible_placement(g, x, y, side, hole);
    }
    let Some((alpha, beta)) = find_extension(g, x, y) else {
        return Err(Error::Precondition("no one-step extension to a critical pair exists".into()));
    };
    non_extendible_placement(g, x, y, alpha, beta)
}

fn extendible_placement(g: &FiniteAbelianGroup, a: Bits, b: Bits, side: Side, hole: usize) -> Result<HolePlacement> {
    let (a2, b2) = match side {
        Side::A => (a.with(hole), b),
        Side::B => (a, b.with(hole)),
    };
    let unique = unique_representations(g, a2, b2);
    let kst = if unique.is_empty() {
        None
    } else {
        Some(kst_classify(g, &g.set(a2), &g.set(b2))?)
    };
    let admissible = match (&kst, side) {
        (None, Side::A) => a2,
        (None, Side::B) => b2,
        (Some(c), Side::A) => admissible_part(g, c.a1.bits(), c.a0.bits(), c, true),
        (Some(c), Side::B) => admissible_part(g, c.b1.bits(), c.b0.bits(), c, false),
    };
    let e = GroupElement::from_index;
    Ok(HolePlacement {
        a_prime: g.set(a2),
        b_prime: g.set(b2),
        alpha: (side == Side::A).then(|| e(hole)),
        beta: (side == Side::B).then(|| e(hole)),
        gamma: None,
        kst,
        case: HoleCase::ExtendiblePair { side, hole: e(hole), admissible: g.set(admissible) },
    })
}

/// Periodic part plus the aperiodic part less the exclusions of its type.
fn admissible_part(g: &FiniteAbelianGroup, part1: Bits, part0: Bits, c: &KstCertificate, on_a: bool) -> Bits {
    use super::kst::KstWitness;
    let excluded = match (c.kind, c.witness) {
        (KstType::I, _) => part0,
        (KstType::II, KstWitness::Progression { d }) => {
            let p = progression_with(g, part0, d.index()).expect("type II part is a progression");
            Bits::singleton(p.first.index()).with(p.last(g).index())
        }
        (KstType::III, KstWitness::UniqueElement { g0, g1 }) => {
            // the unique expression of g0 is g1 + (g0 - g1)
            if on_a {
                Bits::singleton(g1.index())
            } else {
                Bits::singleton(g.sub_idx(g0.index(), g1.index()))
            }
        }
        _ => Bits::EMPTY,
    };
    part1.union(part0.difference(excluded))
}

fn non_extendible_placement(
    g: &FiniteAbelianGroup,
    a: Bits,
    b: Bits,
    alpha: usize,
    beta: usize,
) -> Result<HolePlacement> {
    let (a2, b2) = (a.with(alpha), b.with(beta));
    let s = g.sum_bits(a, b);
    let s2 = g.sum_bits(a2, b2);
    let extra = s2.difference(s);
    if extra.len() != 1 || a2 == a || b2 == b {
        return Err(Error::Internal(format!(
            "non-extendible pair with extension ({alpha}, {beta}) does not add exactly one sum"
        )));
    }
    let gamma = extra.min().unwrap();
    let kst = kst_classify(g, &g.set(a2), &g.set(b2)).map_err(|e| {
        Error::Internal(format!("critical pair from a non-extendible pair failed to classify: {e}"))
    })?;
    let cases = matching_cases(g, a, b, alpha, beta, gamma, &kst)?;
    let Some(case) = cases.into_iter().next() else {
        return Err(Error::Internal(format!(
            "holes ({alpha}, {beta}) in {g} match none of the three cases (type {})",
            kst.kind
        )));
    };
    let e = GroupElement::from_index;
    Ok(HolePlacement {
        a_prime: g.set(a2),
        b_prime: g.set(b2),
        alpha: Some(e(alpha)),
        beta: Some(e(beta)),
        gamma: Some(e(gamma)),
        kst: Some(kst),
        case,
    })
}

/// Every one of the cases A, B, C that the holes satisfy, in that order.
pub(crate) fn matching_cases(
    g: &FiniteAbelianGroup,
    a: Bits,
    b: Bits,
    alpha: usize,
    beta: usize,
    gamma: usize,
    kst: &KstCertificate,
) -> Result<Vec<HoleCase>> {
    let mut out = Vec::new();
    let (a0, b0) = (kst.a0.bits(), kst.b0.bits());
    if let Some(d) = case_a(g, kst, alpha, beta) {
        out.push(HoleCase::SecondTerms { d: GroupElement::from_index(d) });
    }
    if kst.kind == KstType::IV && a0.contains(alpha) && b0.contains(beta) {
        if let Some(case) = case_b(g, &kst.quasi_period, a0.without(alpha), b0.without(beta)) {
            out.push(case);
        }
    }
    if let Some(case) = case_c(g, a, b, alpha, beta, gamma, kst)? {
        out.push(case);
    }
    Ok(out)
}

/// Position of `x` in the progression `s` with difference `d`.
fn position(g: &FiniteAbelianGroup, s: Bits, d: usize, x: usize) -> Option<usize> {
    let p = progression_with(g, s, d)?;
    let mut t = p.first.index();
    for i in 0..p.length {
        if t == x {
            return Some(i);
        }
        t = g.add_idx(t, d);
    }
    None
}

fn case_a(g: &FiniteAbelianGroup, kst: &KstCertificate, alpha: usize, beta: usize) -> Option<usize> {
    if kst.kind != KstType::II {
        return None;
    }
    let (a0, b0) = (kst.a0.bits(), kst.b0.bits());
    let (la, lb) = (a0.len(), b0.len());
    if la < 3 || lb < 3 || (la == 3 && lb == 3) {
        return None;
    }
    (1..g.order()).find(|&d| {
        g.order_idx(d) + 1 >= la + lb
            && position(g, a0, d, alpha) == Some(1)
            && position(g, b0, d, beta) == Some(1)
    })
}

fn is_type_v_in(g: &FiniteAbelianGroup, h: &Subgroup, x: Bits, y: Bits) -> bool {
    let s = g.sum_bits(x, y);
    (x.len() == 2 || y.len() == 2)
        && s.len() == x.len() + y.len()
        && s.len() + 2 <= h.order()
        && extension_within(g, x, y, h.bits()).is_none()
        && extension_within(g, y, x, h.bits()).is_none()
}

fn case_b(g: &FiniteAbelianGroup, h: &Subgroup, a0: Bits, b0: Bits) -> Option<HoleCase> {
    let (x0, y0) = (a0.min()?, b0.min()?);
    let x = g.translate_bits(a0, g.neg_idx(x0));
    let y = g.translate_bits(b0, g.neg_idx(y0));
    if !x.is_subset(h.bits()) || !y.is_subset(h.bits()) {
        return None;
    }
    let c = h.bits().difference(g.sum_bits(x, y));
    [g.neg_bits(x), g.neg_bits(y)]
        .into_iter()
        .map(|p| (p, c))
        .find(|&(p, q)| is_type_v_in(g, h, p, q))
        .map(|(p, q)| HoleCase::DualOfTypeV {
            quasi_period: h.clone(),
            a0: g.set(a0),
            b0: g.set(b0),
            type_v: (g.set(p), g.set(q)),
        })
}

fn case_c(
    g: &FiniteAbelianGroup,
    a: Bits,
    b: Bits,
    alpha: usize,
    beta: usize,
    gamma: usize,
    kst: &KstCertificate,
) -> Result<Option<HoleCase>> {
    let (a0, b0) = (kst.a0.bits(), kst.b0.bits());
    if kst.kind != KstType::I || a0.len() != 1 || b0.len() != 1 {
        return Ok(None);
    }
    if !kst.a1.bits().contains(alpha) || !kst.b1.bits().contains(beta) {
        return Ok(None);
    }
    let Some(rec) = &kst.recursion else { return Ok(None) };
    if rec.kind != KstType::II {
        return Ok(None);
    }
    let h = &kst.quasi_period;
    let q = g.quotient_map(h)?;
    let t = q.target();
    let (fa, fb) = (q.map_idx(alpha), q.map_idx(beta));
    let (ra0, rb0) = (rec.a0.bits(), rec.b0.bits());
    if !ra0.contains(fa) || !rb0.contains(fb) {
        return Ok(None);
    }
    let (x0, y0) = (a0.min().unwrap(), b0.min().unwrap());
    let (s1, s2) = (g.add_idx(x0, beta), g.add_idx(y0, alpha));
    let meet_at_gamma = s1 == s2 && s1 == gamma && !g.sum_bits(a, b).contains(gamma);
    let need = ra0.len() + rb0.len();
    let at = |pos: usize| {
        (1..t.order()).find(|&d| {
            t.order_idx(d) + 1 >= need && position(t, ra0, d, fa) == Some(pos) && position(t, rb0, d, fb) == Some(pos)
        })
    };
    let found = if h.order() > 2 {
        at(1).filter(|_| meet_at_gamma).map(|d| (d, 1))
    } else {
        let first = at(0).filter(|_| !(ra0.len() == 2 && rb0.len() == 2 && s1 == s2));
        let second = at(1).filter(|_| meet_at_gamma && (ra0.len() >= 3 || rb0.len() >= 3));
        first.map(|d| (d, 0)).or(second.map(|d| (d, 1)))
    };
    Ok(found.map(|(d, position)| HoleCase::QuotientProgression {
        delta: GroupElement::from_index(d),
        position,
    }))
}
