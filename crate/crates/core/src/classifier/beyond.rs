//! Pairs with `|A+B| = |A|+|B|`: one-step extension to a critical pair,
//! the structured types V-VIII, and the periodic branch.

use std::fmt;

use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset, Subgroup};
use crate::structure::{progression_with, qp_splits};
use crate::sumset::{is_periodic_bits, nu_counts, stabilizer_bits};

use super::kst::search_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BeyondType {
    V,
    VI,
    VII,
    VIII,
}

impl fmt::Display for BeyondType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// A type together with the data that exhibits it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BeyondWitness {
    /// A part of size two with `|A0+B0| = |A0|+|B0| <= |H|-2`.
    V,
    /// `A0 = b0 + B0`, both of size three, `|2A0| > 5`.
    VI { b0: GroupElement },
    /// The size-three part is on `side`; for side A,
    /// `B0 = b0 + ((2a0 - complement(2A0)) ∩ H)`.
    VII { side: Side, a0: GroupElement, b0: GroupElement },
    /// Klein subgroup `klein` with progressions of difference `d` mod it.
    VIII {
        klein: Subgroup,
        h_d1: Subgroup,
        h_d2: Subgroup,
        d: GroupElement,
        /// Members of the first and last terms of each progression.
        first_a: GroupElement,
        last_a: GroupElement,
        first_b: GroupElement,
        last_b: GroupElement,
    },
}

impl BeyondWitness {
    pub fn kind(&self) -> BeyondType {
        match self {
            BeyondWitness::V => BeyondType::V,
            BeyondWitness::VI { .. } => BeyondType::VI,
            BeyondWitness::VII { .. } => BeyondType::VII,
            BeyondWitness::VIII { .. } => BeyondType::VIII,
        }
    }
}

/// Decompositions with common quasi-period whose aperiodic parts have one
/// or more of the types V-VIII. `types[0]` is the primary type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredMatch {
    pub quasi_period: Subgroup,
    pub a1: GroupSubset,
    pub a0: GroupSubset,
    pub b1: GroupSubset,
    pub b0: GroupSubset,
    pub types: Vec<BeyondWitness>,
}

impl StructuredMatch {
    pub fn kind(&self) -> BeyondType {
        self.types[0].kind()
    }

    pub fn has_type(&self, t: BeyondType) -> bool {
        self.types.iter().any(|w| w.kind() == t)
    }
}

#[derive(Clone, Debug)]
pub enum BeyondOutcome {
    /// `|A∪{α} + B∪{β}| = |A∪{α}| + |B∪{β}| - 1`; `structured` carries a
    /// simultaneous type V-VIII match when one exists.
    Extendible {
        alpha: GroupElement,
        beta: GroupElement,
        structured: Option<StructuredMatch>,
    },
    Structured(StructuredMatch),
    /// `A` and `B` are periodic with the maximal period of `A+B`; the
    /// quotient pair is classified in turn.
    PeriodicBranch {
        quasi_period: Subgroup,
        quotient: Box<BeyondCertificate>,
    },
}

#[derive(Clone, Debug)]
pub struct BeyondCertificate {
    pub group: FiniteAbelianGroup,
    pub a: GroupSubset,
    pub b: GroupSubset,
    pub outcome: BeyondOutcome,
}

impl BeyondCertificate {
    /// Short label such as `"extendible"`, `"VII"` or `"periodic"`.
    pub fn label(&self) -> String {
        match &self.outcome {
            BeyondOutcome::Extendible { .. } => "extendible".into(),
            BeyondOutcome::Structured(m) => m.kind().to_string(),
            BeyondOutcome::PeriodicBranch { .. } => "periodic".into(),
        }
    }

    /// The structured match, primary or auxiliary.
    pub fn structured(&self) -> Option<&StructuredMatch> {
        match &self.outcome {
            BeyondOutcome::Extendible { structured, .. } => structured.as_ref(),
            BeyondOutcome::Structured(m) => Some(m),
            BeyondOutcome::PeriodicBranch { .. } => None,
        }
    }
}

/// First `(α, β)` in canonical order satisfying the one-step extension.
pub(crate) fn find_extension(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Option<(usize, usize)> {
    let s = g.sum_bits(a, b);
    for alpha in 0..g.order() {
        let a2 = a.with(alpha);
        let s_alpha = s.union(g.translate_bits(b, alpha));
        for beta in 0..g.order() {
            let b2 = b.with(beta);
            let total = s_alpha
                .union(g.translate_bits(a, beta))
                .with(g.add_idx(alpha, beta));
            if total.len() + 1 == a2.len() + b2.len() {
                return Some((alpha, beta));
            }
        }
    }
    None
}

pub fn beyond_classify(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<BeyondCertificate> {
    g.owns(a)?;
    g.owns(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    let s = g.sum_bits(a.bits(), b.bits());
    if s.len() != a.len() + b.len() {
        return Err(Error::Precondition(format!(
            "|A+B| = {} but |A|+|B| = {}",
            s.len(),
            a.len() + b.len()
        )));
    }
    classify_bits(g, a.bits(), b.bits())
}

fn classify_bits(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Result<BeyondCertificate> {
    let s = g.sum_bits(a, b);
    let ext = find_extension(g, a, b);
    let period = stabilizer_bits(g, s);
    let outcome = if period.len() == 1 {
        let structured = structured_match(g, a, b)?;
        match (ext, structured) {
            (Some((alpha, beta)), structured) => BeyondOutcome::Extendible {
                alpha: GroupElement::from_index(alpha),
                beta: GroupElement::from_index(beta),
                structured,
            },
            (None, Some(m)) => BeyondOutcome::Structured(m),
            (None, None) => {
                return Err(Error::Internal(format!(
                    "no outcome for A={a:?}, B={b:?} in {g}: neither the extension nor a type V-VIII decomposition"
                )))
            }
        }
    } else if let Some((alpha, beta)) = ext {
        BeyondOutcome::Extendible {
            alpha: GroupElement::from_index(alpha),
            beta: GroupElement::from_index(beta),
            structured: None,
        }
    } else {
        let h = g.subgroup_of_bits(period);
        let q = g.quotient_map(&h)?;
        let t = q.target();
        let (pa, pb) = (q.push_bits(a), q.push_bits(b));
        let ok = h.saturate(a) == a
            && h.saturate(b) == b
            && !is_periodic_bits(t, q.push_bits(s))
            && t.sum_bits(pa, pb).len() == pa.len() + pb.len();
        if !ok {
            return Err(Error::Internal(format!(
                "periodic sumset without the extension fails the periodic branch for A={a:?}, B={b:?} in {g}"
            )));
        }
        BeyondOutcome::PeriodicBranch {
            quasi_period: h,
            quotient: Box::new(classify_bits(t, pa, pb)?),
        }
    };
    Ok(BeyondCertificate {
        group: g.clone(),
        a: g.set(a),
        b: g.set(b),
        outcome,
    })
}

/// Largest quasi-period admitting decompositions whose quotient pair is
/// critical, whose aperiodic parts meet in a coset represented once, and
/// whose aperiodic parts have a type V-VIII.
pub(crate) fn structured_match(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Result<Option<StructuredMatch>> {
    for h in search_order(g) {
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
                let types = beyond_types(g, h, a0, b0)?;
                if !types.is_empty() {
                    return Ok(Some(StructuredMatch {
                        quasi_period: h.clone(),
                        a1: g.set(a1),
                        a0: g.set(a0),
                        b1: g.set(b1),
                        b0: g.set(b0),
                        types,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Every type among V-VIII that `(A0, B0)` has inside `H`, in that order.
pub(crate) fn beyond_types(g: &FiniteAbelianGroup, h: &Subgroup, a0: Bits, b0: Bits) -> Result<Vec<BeyondWitness>> {
    let sum = g.sum_bits(a0, b0);
    if sum.len() != a0.len() + b0.len() {
        return Ok(Vec::new());
    }
    let e = GroupElement::from_index;
    let mut out = Vec::new();
    if (a0.len() == 2 || b0.len() == 2) && sum.len() + 2 <= h.order() {
        out.push(BeyondWitness::V);
    }
    if a0.len() == 3 && b0.len() == 3 && g.sum_bits(a0, a0).len() > 5 {
        let m = a0.min().unwrap();
        if let Some(t) = b0
            .iter()
            .map(|y| g.sub_idx(m, y))
            .filter(|&t| g.translate_bits(b0, t) == a0)
            .min()
        {
            out.push(BeyondWitness::VI { b0: e(t) });
        }
    }
    if sum.len() + 3 == h.order() && sum.len() >= 6 {
        if let Some((x, y)) = type_vii(g, h, a0, b0) {
            out.push(BeyondWitness::VII { side: Side::A, a0: e(x), b0: e(y) });
        } else if let Some((y, x)) = type_vii(g, h, b0, a0) {
            out.push(BeyondWitness::VII { side: Side::B, a0: e(x), b0: e(y) });
        }
    }
    if let Some(w) = type_viii(g, h, a0, b0)? {
        out.push(w);
    }
    Ok(out)
}

/// `(a0, b0)` with `Y = b0 + ((2a0 - complement(2X)) ∩ H)`, for `|X| = 3`.
fn type_vii(g: &FiniteAbelianGroup, h: &Subgroup, x: Bits, y: Bits) -> Option<(usize, usize)> {
    if x.len() != 3 {
        return None;
    }
    let two_x = g.sum_bits(x, x);
    if two_x.len() <= 5 {
        return None;
    }
    let comp = g.complement_bits(two_x);
    for a0 in x.iter() {
        let k = g.translate_bits(g.neg_bits(comp), g.add_idx(a0, a0)).intersection(h.bits());
        let Some(k0) = k.min() else { continue };
        if k.len() != y.len() {
            continue;
        }
        if let Some(b0) = y
            .iter()
            .map(|v| g.sub_idx(v, k0))
            .filter(|&b0| g.translate_bits(k, b0) == y)
            .min()
        {
            return Some((a0, b0));
        }
    }
    None
}

fn is_klein(g: &FiniteAbelianGroup, k: &Subgroup) -> bool {
    k.order() == 4 && k.bits().iter().all(|x| x == 0 || g.order_idx(x) == 2)
}

fn type_viii(g: &FiniteAbelianGroup, h: &Subgroup, a0: Bits, b0: Bits) -> Result<Option<BeyondWitness>> {
    for k in g.all_subgroups().iter().filter(|k| is_klein(g, k) && k.is_subgroup_of(h)) {
        let q = g.quotient_map(k)?;
        let t = q.target();
        let (pa, pb) = (q.push_bits(a0), q.push_bits(b0));
        if pa.len() < 2 || pb.len() < 2 {
            continue;
        }
        // differences ordered by their least lift into G
        for d in (0..g.order()).filter(|&d| !k.bits().contains(d)) {
            let delta = q.map_idx(d);
            if q.pull_bits(Bits::singleton(delta)).min() != Some(d) {
                continue;
            }
            if t.order_idx(delta) < pa.len() + pb.len() - 1 {
                continue;
            }
            let (Some(prog_a), Some(prog_b)) = (progression_with(t, pa, delta), progression_with(t, pb, delta)) else {
                continue;
            };
            let Some(ends_a) = end_pieces(g, &q, a0, prog_a.first.index(), delta, pa.len()) else {
                continue;
            };
            let Some(ends_b) = end_pieces(g, &q, b0, prog_b.first.index(), delta, pb.len()) else {
                continue;
            };
            let diff = |p: Bits| {
                let v = p.to_vec();
                g.sub_idx(v[1], v[0])
            };
            let (d1, d2) = (diff(ends_a.0), diff(ends_a.1));
            if d1 == d2 || diff(ends_b.0) != d1 || diff(ends_b.1) != d2 {
                continue;
            }
            let e = GroupElement::from_index;
            let h_of = |x: usize| g.subgroup_of_bits(Bits::singleton(0).with(x));
            return Ok(Some(BeyondWitness::VIII {
                klein: k.clone(),
                h_d1: h_of(d1),
                h_d2: h_of(d2),
                d: e(d),
                first_a: e(ends_a.0.min().unwrap()),
                last_a: e(ends_a.1.min().unwrap()),
                first_b: e(ends_b.0.min().unwrap()),
                last_b: e(ends_b.1.min().unwrap()),
            }));
        }
    }
    Ok(None)
}

/// For a set whose image is a progression, checks that interior terms
/// lift to full cosets and returns the two-element end pieces.
fn end_pieces(
    g: &FiniteAbelianGroup,
    q: &crate::group::QuotientMap,
    set: Bits,
    first: usize,
    delta: usize,
    len: usize,
) -> Option<(Bits, Bits)> {
    let t = q.target();
    let mut term = first;
    let mut ends = (Bits::EMPTY, Bits::EMPTY);
    for i in 0..len {
        let coset = q.pull_bits(Bits::singleton(term));
        let piece = set.intersection(coset);
        if i == 0 || i + 1 == len {
            if piece.len() != 2 {
                return None;
            }
            if i == 0 {
                ends.0 = piece;
            } else {
                ends.1 = piece;
            }
        } else if piece != coset {
            return None;
        }
        term = t.add_idx(term, delta);
    }
    let _ = g;
    Some(ends)
}
