//! Structural predicates: progressions, d-components, quasi-progressions,
//! quasi-periodic decompositions and the matching dichotomy.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset, Subgroup};
use crate::sumset::{progression_cover, quasi_periodic_cover};

/// `{a0, a0+d, ..., a0+(l-1)d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProgressionView {
    pub first: GroupElement,
    pub difference: GroupElement,
    pub length: usize,
}

impl ProgressionView {
    /// Terms in progression order.
    pub fn terms(&self, g: &FiniteAbelianGroup) -> Vec<GroupElement> {
        let mut x = self.first.index();
        let mut out = Vec::with_capacity(self.length);
        for _ in 0..self.length {
            out.push(GroupElement::from_index(x));
            x = g.add_idx(x, self.difference.index());
        }
        out
    }

    pub fn last(&self, g: &FiniteAbelianGroup) -> GroupElement {
        *self.terms(g).last().expect("length is at least 1")
    }

    pub fn to_set(&self, g: &FiniteAbelianGroup) -> GroupSubset {
        g.set(self.terms(g).into_iter().map(GroupElement::index).collect())
    }

    /// The same set read with difference `-d`.
    pub fn reversed(&self, g: &FiniteAbelianGroup) -> ProgressionView {
        ProgressionView {
            first: self.last(g),
            difference: GroupElement::from_index(g.neg_idx(self.difference.index())),
            length: self.length,
        }
    }
}

/// Reads `s` as a progression with difference `d`, if it is one.
/// A full `<d>`-coset starts at its least element.
pub(crate) fn progression_with(g: &FiniteAbelianGroup, s: Bits, d: usize) -> Option<ProgressionView> {
    if d == 0 || s.is_empty() {
        return None;
    }
    let n = g.order_idx(d);
    if s.len() > n {
        return None;
    }
    let first = if s.len() == n {
        s.min()?
    } else {
        s.iter().find(|&x| !s.contains(g.sub_idx(x, d)))?
    };
    let mut x = first;
    for _ in 0..s.len() {
        if !s.contains(x) {
            return None;
        }
        x = g.add_idx(x, d);
    }
    Some(ProgressionView {
        first: GroupElement::from_index(first),
        difference: GroupElement::from_index(d),
        length: s.len(),
    })
}

/// Some progression representation of `S`, using the least difference
/// that works. Singletons get the least nonzero difference.
pub fn as_progression(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<Option<ProgressionView>> {
    g.owns(s)?;
    if s.is_empty() {
        return Err(Error::Precondition("progression of the empty set".into()));
    }
    Ok((1..g.order()).find_map(|d| progression_with(g, s.bits(), d)))
}

/// Whether `S` is a progression with difference `d` (either orientation).
pub fn is_progression(g: &FiniteAbelianGroup, s: &GroupSubset, d: GroupElement) -> Result<bool> {
    g.owns(s)?;
    g.element(d.index())?;
    Ok(progression_with(g, s.bits(), d.index()).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    Progression(ProgressionView),
    /// A whole `<d>`-coset, which has no end terms.
    FullCoset(GroupSubset),
}

#[derive(Clone, Debug)]
pub struct ComponentProfile {
    pub difference: GroupElement,
    pub components: Vec<Component>,
    pub c_d: usize,
    pub l_d: usize,
    pub h_d: usize,
}

fn nonzero_difference(g: &FiniteAbelianGroup, d: GroupElement) -> Result<usize> {
    g.element(d.index())?;
    if d.index() == 0 {
        Err(Error::Precondition("difference must be nonzero".into()))
    } else {
        Ok(d.index())
    }
}

/// Maximal progressions with difference `d` inside `S`, ordered by first term.
pub fn d_components(g: &FiniteAbelianGroup, s: &GroupSubset, d: GroupElement) -> Result<ComponentProfile> {
    g.owns(s)?;
    let d = nonzero_difference(g, d)?;
    let bits = s.bits();
    let mut components = Vec::new();
    let mut seen = Bits::EMPTY;
    for x in bits.iter() {
        if seen.contains(x) {
            continue;
        }
        let coset = g.translate_bits(g.cyclic_bits(d), x);
        if coset.is_subset(bits) {
            seen = seen.union(coset);
            components.push(Component::FullCoset(g.set(coset)));
            continue;
        }
        // walk back to the start of the run containing x, then forward
        let mut start = x;
        while bits.contains(g.sub_idx(start, d)) {
            start = g.sub_idx(start, d);
        }
        let mut len = 0;
        let mut y = start;
        while bits.contains(y) {
            seen.insert(y);
            len += 1;
            y = g.add_idx(y, d);
        }
        components.push(Component::Progression(ProgressionView {
            first: GroupElement::from_index(start),
            difference: GroupElement::from_index(d),
            length: len,
        }));
    }
    components.sort_by_key(|c| match c {
        Component::Progression(p) => p.first.index(),
        Component::FullCoset(c) => c.bits().min().unwrap_or(0),
    });
    let c_d = components
        .iter()
        .filter(|c| matches!(c, Component::Progression(_)))
        .count();
    let (l_d, h_d) = if bits.is_empty() {
        (0, 0)
    } else {
        let (h, p) = quasi_progression_cover(g, bits, d);
        (p.len(), h)
    };
    Ok(ComponentProfile {
        difference: GroupElement::from_index(d),
        components,
        c_d,
        l_d,
        h_d,
    })
}

/// Number of aperiodic `d`-components, via `|S + {0,d}| - |S|`.
pub(crate) fn c_d_bits(g: &FiniteAbelianGroup, s: Bits, d: usize) -> usize {
    s.union(g.translate_bits(s, d)).len() - s.len()
}

/// Smallest quasi-progression with difference `d` containing `s`,
/// ties broken by least encoding. Returns `(holes, P)`.
pub(crate) fn quasi_progression_cover(g: &FiniteAbelianGroup, s: Bits, d: usize) -> (usize, Bits) {
    let h = g.cyclic_bits(d);
    let mut cosets: Vec<Bits> = Vec::new();
    for x in s.iter() {
        let c = g.translate_bits(h, x);
        if !cosets.contains(&c) {
            cosets.push(c);
        }
    }
    let filled = cosets.iter().fold(Bits::EMPTY, |acc, &c| acc.union(c));
    cosets
        .iter()
        .map(|&c| {
            let part = s.intersection(c);
            let (_, ap) = progression_cover(g, part, d).expect("part lies in one <d>-coset");
            let p = filled.difference(c).union(ap);
            (p.len() - s.len(), p)
        })
        .min()
        .expect("s is nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiProgression {
    pub p: GroupSubset,
    pub l_d: usize,
    pub h_d: usize,
}

pub fn minimal_quasi_progression(
    g: &FiniteAbelianGroup,
    s: &GroupSubset,
    d: GroupElement,
) -> Result<QuasiProgression> {
    g.owns(s)?;
    let d = nonzero_difference(g, d)?;
    if s.is_empty() {
        return Err(Error::Precondition("quasi-progression of the empty set".into()));
    }
    let (h_d, p) = quasi_progression_cover(g, s.bits(), d);
    Ok(QuasiProgression {
        p: g.set(p),
        l_d: p.len(),
        h_d,
    })
}

/// `h_d(S)`.
pub(crate) fn h_d_bits(g: &FiniteAbelianGroup, s: Bits, d: usize) -> usize {
    quasi_progression_cover(g, s, d).0
}

/// `S = A1 ∪ A0` with `A1` periodic under the quasi-period and `A0`
/// inside a single coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPeriodicDecomposition {
    pub quasi_period: Subgroup,
    pub periodic: GroupSubset,
    pub aperiodic: GroupSubset,
    pub reduced: bool,
}

/// Whether some nontrivial quasi-period gives a nonempty periodic part.
pub(crate) fn is_quasi_periodic_bits(g: &FiniteAbelianGroup, s: Bits) -> bool {
    !s.is_empty()
        && g.all_subgroups()
            .iter()
            .any(|h| quasi_periodic_cover(s, h).is_some_and(|(c, _)| c == 0))
}

pub fn is_quasi_periodic(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<bool> {
    g.owns(s)?;
    Ok(is_quasi_periodic_bits(g, s.bits()))
}

/// All `(A1, A0)` splits of `s` for quasi-period `h`: `A0 = ∅` first,
/// then by least element of `A0`. Empty when two cosets are partial.
pub(crate) fn qp_splits(s: Bits, h: &Subgroup) -> Vec<(Bits, Bits)> {
    let met = h.cosets_met(s);
    let partial: Vec<usize> = met
        .iter()
        .copied()
        .filter(|&c| !h.coset_bits(c).is_subset(s))
        .collect();
    match partial.as_slice() {
        [] => {
            let mut out = vec![(s, Bits::EMPTY)];
            let mut full: Vec<Bits> = met.iter().map(|&c| h.coset_bits(c)).collect();
            full.sort_by_key(|c| Bits::min(*c));
            out.extend(full.into_iter().map(|c| (s.difference(c), c)));
            out
        }
        [c] => {
            let a0 = s.intersection(h.coset_bits(*c));
            vec![(s.difference(a0), a0)]
        }
        _ => Vec::new(),
    }
}

fn decomposition(g: &FiniteAbelianGroup, h: &Subgroup, a1: Bits, a0: Bits) -> QuasiPeriodicDecomposition {
    QuasiPeriodicDecomposition {
        quasi_period: h.clone(),
        periodic: g.set(a1),
        aperiodic: g.set(a0),
        reduced: !is_quasi_periodic_bits(g, a0),
    }
}

pub fn quasi_periodic_decompositions(
    g: &FiniteAbelianGroup,
    s: &GroupSubset,
    h: &Subgroup,
) -> Result<Vec<QuasiPeriodicDecomposition>> {
    g.owns(s)?;
    g.owns(&h.carrier())?;
    if h.is_trivial() {
        return Err(Error::Precondition("quasi-period must be nontrivial".into()));
    }
    Ok(qp_splits(s.bits(), h)
        .into_iter()
        .map(|(a1, a0)| decomposition(g, h, a1, a0))
        .collect())
}

/// A reduced decomposition with quasi-period `H' ≤ H` and aperiodic part
/// inside the aperiodic part of a decomposition for `H`. Prefers the
/// largest `H'`, then the least aperiodic part.
pub fn reduce_decomposition(
    g: &FiniteAbelianGroup,
    s: &GroupSubset,
    h: &Subgroup,
) -> Result<QuasiPeriodicDecomposition> {
    let splits = quasi_periodic_decompositions(g, s, h)?;
    if splits.is_empty() {
        return Err(Error::Precondition(format!(
            "{s} has no quasi-periodic decomposition with quasi-period {}",
            h.carrier()
        )));
    }
    let allowed: Vec<Bits> = splits.iter().map(|d| d.aperiodic.bits()).collect();
    let mut candidates: Vec<&Subgroup> = g
        .all_subgroups()
        .iter()
        .filter(|k| !k.is_trivial() && k.is_subgroup_of(h))
        .collect();
    candidates.sort_by(|x, y| y.order().cmp(&x.order()).then(x.bits().cmp(&y.bits())));
    let mut best: Option<(usize, Bits, Bits, &Subgroup)> = None;
    for k in candidates {
        if best.as_ref().is_some_and(|b| b.0 > k.order()) {
            break;
        }
        for (a1, a0) in qp_splits(s.bits(), k) {
            if !allowed.iter().any(|&p| a0.is_subset(p)) || is_quasi_periodic_bits(g, a0) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((_, b0, _, bk)) => (a0, k.bits()) < (*b0, bk.bits()),
            };
            if better {
                best = Some((k.order(), a0, a1, k));
            }
        }
    }
    let (_, a0, a1, k) = best.ok_or_else(|| {
        Error::Internal(format!("no reduced decomposition found for {s}"))
    })?;
    Ok(decomposition(g, k, a1, a0))
}

/// The two outcomes of the matching dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    /// `a + b = c` and `a' + b' = c'` with `a ≠ a'`, `b ≠ b'`, `c ≠ c'`.
    Disjoint {
        a: GroupElement,
        a2: GroupElement,
        b: GroupElement,
        b2: GroupElement,
        c: GroupElement,
        c2: GroupElement,
    },
    /// `|A| = |B| = |C| = 2` and `a + B = b + A = C`.
    Pair { a: GroupElement, b: GroupElement },
}

pub fn matching_configurations(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    c: &GroupSubset,
) -> Result<MatchOutcome> {
    for s in [a, b, c] {
        g.owns(s)?;
    }
    let (ab, bb, cb) = (a.bits(), b.bits(), c.bits());
    if ab.len() < 2 || bb.len() < 2 || cb.len() < 2 {
        return Err(Error::Precondition("A, B and C need at least two elements".into()));
    }
    if !cb.is_subset(g.sum_bits(ab, bb)) {
        return Err(Error::Precondition("C must lie inside A + B".into()));
    }
    let meets = |s: Bits, t: usize| !g.translate_bits(s, t).intersection(cb).is_empty();
    if !ab.iter().all(|x| meets(bb, x)) || !bb.iter().all(|y| meets(ab, y)) {
        return Err(Error::Precondition(
            "every a + B and b + A must meet C".into(),
        ));
    }

    let reps: Vec<(usize, usize, usize)> = ab
        .iter()
        .flat_map(|x| bb.iter().map(move |y| (x, y)))
        .filter_map(|(x, y)| {
            let z = g.add_idx(x, y);
            cb.contains(z).then_some((x, y, z))
        })
        .collect();
    // the first representation without a partner conflicts with all
    // others, which bounds the quadratic scan by |R|(|A|+|B|+|C|)
    for (i, &(x, y, z)) in reps.iter().enumerate() {
        if let Some(&(x2, y2, z2)) = reps[i + 1..]
            .iter()
            .find(|&&(x2, y2, z2)| x2 != x && y2 != y && z2 != z)
        {
            let e = GroupElement::from_index;
            return Ok(MatchOutcome::Disjoint {
                a: e(x),
                a2: e(x2),
                b: e(y),
                b2: e(y2),
                c: e(z),
                c2: e(z2),
            });
        }
    }
    if ab.len() == 2 && bb.len() == 2 && cb.len() == 2 {
        for x in ab.iter() {
            for y in bb.iter() {
                if g.translate_bits(bb, x) == cb && g.translate_bits(ab, y) == cb {
                    return Ok(MatchOutcome::Pair {
                        a: GroupElement::from_index(x),
                        b: GroupElement::from_index(y),
                    });
                }
            }
        }
    }
    Err(Error::Internal("matching dichotomy produced no outcome".into()))
}
