//! Sumset arithmetic: sums, representation sets, periods, layers,
//! the e-transform and distances to structured families.

use std::fmt;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset, Subgroup};

fn same_group(g: &FiniteAbelianGroup, sets: &[&GroupSubset]) -> Result<()> {
    sets.iter().try_for_each(|s| g.owns(s))
}

fn nonempty(s: &GroupSubset, what: &str) -> Result<()> {
    if s.is_empty() {
        Err(Error::Precondition(format!("{what} must be nonempty")))
    } else {
        Ok(())
    }
}

/// `A + B`. Empty input gives empty output.
pub fn sumset(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    same_group(g, &[a, b])?;
    Ok(g.set(g.sum_bits(a.bits(), b.bits())))
}

/// `g + S`.
pub fn translate(g: &FiniteAbelianGroup, s: &GroupSubset, x: GroupElement) -> Result<GroupSubset> {
    g.owns(s)?;
    g.element(x.index())?;
    Ok(g.set(g.translate_bits(s.bits(), x.index())))
}

/// `-S`.
pub fn negate(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<GroupSubset> {
    g.owns(s)?;
    Ok(g.set(g.neg_bits(s.bits())))
}

/// The representation set `(x - A) ∩ B` of `x` in `A + B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuWitness {
    pub target: GroupElement,
    pub witnesses: GroupSubset,
    pub multiplicity: usize,
}

pub fn nu(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    x: GroupElement,
) -> Result<NuWitness> {
    same_group(g, &[a, b])?;
    g.element(x.index())?;
    let w = nu_bits(g, a.bits(), b.bits(), x.index());
    Ok(NuWitness {
        target: x,
        witnesses: g.set(w),
        multiplicity: w.len(),
    })
}

#[inline]
pub(crate) fn nu_bits(g: &FiniteAbelianGroup, a: Bits, b: Bits, x: usize) -> Bits {
    let mut out = Bits::EMPTY;
    for y in a.iter() {
        let t = g.sub_idx(x, y);
        if b.contains(t) {
            out.insert(t);
        }
    }
    out
}

/// `|ν_x(A,B)|` for every `x`, indexed by canonical index.
pub(crate) fn nu_counts(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Vec<u32> {
    let mut counts = vec![0u32; g.order()];
    for x in a.iter() {
        for y in b.iter() {
            counts[g.add_idx(x, y)] += 1;
        }
    }
    counts
}

/// Multiplicity of every element of the group.
pub fn nu_profile(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<Vec<u32>> {
    same_group(g, &[a, b])?;
    Ok(nu_counts(g, a.bits(), b.bits()))
}

/// Elements of `A + B` with exactly one representation.
pub(crate) fn unique_expression_bits(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> Bits {
    nu_counts(g, a, b)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 1)
        .map(|(x, _)| x)
        .collect()
}

pub fn unique_expression_elements(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
) -> Result<GroupSubset> {
    same_group(g, &[a, b])?;
    Ok(g.set(unique_expression_bits(g, a.bits(), b.bits())))
}

pub(crate) fn stabilizer_bits(g: &FiniteAbelianGroup, s: Bits) -> Bits {
    let Some(s0) = s.min() else {
        return g.full_bits();
    };
    let mut h = Bits::EMPTY;
    for x in s.iter() {
        let t = g.sub_idx(x, s0);
        if g.translate_bits(s, t) == s {
            h.insert(t);
        }
    }
    h
}

/// The maximal period `{x : x + S = S}`.
pub fn stabilizer(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<Subgroup> {
    g.owns(s)?;
    if s.is_empty() {
        return Err(Error::Domain("stabilizer of the empty set".into()));
    }
    Ok(g.subgroup_of_bits(stabilizer_bits(g, s.bits())))
}

#[inline]
pub(crate) fn is_periodic_bits(g: &FiniteAbelianGroup, s: Bits) -> bool {
    stabilizer_bits(g, s).len() > 1
}

/// The witness that `S ∪ {γ}` is periodic.
#[derive(Clone, Debug)]
pub struct Puncture {
    pub gamma: GroupElement,
    pub period: Subgroup,
}

#[derive(Clone, Debug)]
pub struct PeriodicityFlags {
    pub is_periodic: bool,
    pub is_aperiodic: bool,
    pub punctured: Option<Puncture>,
}

pub fn periodicity_flags(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<PeriodicityFlags> {
    let h = stabilizer(g, s)?;
    let punctured = puncture_bits(g, s.bits()).map(|(gamma, period)| Puncture {
        gamma: GroupElement::from_index(gamma),
        period: g.subgroup_of_bits(period),
    });
    Ok(PeriodicityFlags {
        is_periodic: !h.is_trivial(),
        is_aperiodic: h.is_trivial(),
        punctured,
    })
}

/// Least `γ ∉ S` with `S ∪ {γ}` periodic, with that period.
pub(crate) fn puncture_bits(g: &FiniteAbelianGroup, s: Bits) -> Option<(usize, Bits)> {
    g.complement_bits(s).iter().find_map(|gamma| {
        let h = stabilizer_bits(g, s.with(gamma));
        (h.len() > 1).then_some((gamma, h))
    })
}

/// `N_i(A,B)` layers and their classes by representation set.
#[derive(Clone, Debug)]
pub struct LayerDecomposition {
    pub a: GroupSubset,
    pub b: GroupSubset,
    /// `layers[0] = A`; the final entry is empty unless `max_i` cut the run.
    pub layers: Vec<GroupSubset>,
    /// `classes[i]` lists `(U, N_i^U)` sorted by `U`; `classes[0]` is empty.
    pub classes: Vec<Vec<(GroupSubset, GroupSubset)>>,
}

impl LayerDecomposition {
    /// `N_i^{≤U}`: the union of classes `N_i^V` with `V ⊆ U`.
    pub fn below(&self, i: usize, u: &GroupSubset) -> GroupSubset {
        let bits = self
            .classes
            .get(i)
            .into_iter()
            .flatten()
            .filter(|(v, _)| v.is_subset(u))
            .fold(Bits::EMPTY, |acc, (_, n)| acc.union(n.bits()));
        u.with_bits(bits)
    }
}

pub fn layers(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    max_i: usize,
) -> Result<LayerDecomposition> {
    same_group(g, &[a, b])?;
    if !(a.contains(g.zero()) && b.contains(g.zero())) {
        return Err(Error::Precondition("layers require 0 in both A and B".into()));
    }
    let mut out = LayerDecomposition {
        a: *a,
        b: *b,
        layers: vec![*a],
        classes: vec![Vec::new()],
    };
    let mut prev = a.bits();
    for _ in 1..=max_i {
        let cur = g.sum_bits(prev, b.bits());
        let layer = cur.difference(prev);
        let mut classes: Vec<(Bits, Bits)> = Vec::new();
        for x in layer.iter() {
            let u = nu_bits(g, prev, b.bits(), x);
            match classes.iter_mut().find(|(v, _)| *v == u) {
                Some((_, n)) => n.insert(x),
                None => classes.push((u, Bits::singleton(x))),
            }
        }
        classes.sort();
        out.layers.push(g.set(layer));
        out.classes
            .push(classes.into_iter().map(|(u, n)| (g.set(u), g.set(n))).collect());
        if layer.is_empty() {
            break;
        }
        prev = cur;
    }
    Ok(out)
}

/// `A(e) = (e+B) ∪ A` and `B(e) = (e+B) ∩ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ETransformResult {
    pub e: GroupElement,
    pub a_e: GroupSubset,
    pub b_e: GroupSubset,
}

pub fn e_transform(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    e: GroupElement,
) -> Result<ETransformResult> {
    same_group(g, &[a, b])?;
    g.element(e.index())?;
    let shifted = g.translate_bits(b.bits(), e.index());
    let b_e = shifted.intersection(a.bits());
    if b_e.is_empty() {
        return Err(Error::Precondition(format!("e = {e} is not in A - B")));
    }
    Ok(ETransformResult {
        e,
        a_e: g.set(shifted.union(a.bits())),
        b_e: g.set(b_e),
    })
}

/// A family of subsets that distances are measured against.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    Periodic,
    PeriodicBy(Subgroup),
    QuasiPeriodic,
    QuasiPeriodicBy(Subgroup),
    Progression,
    ProgressionBy(GroupElement),
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Periodic => write!(f, "P"),
            FamilySpec::PeriodicBy(h) => write!(f, "P:{}", h.carrier()),
            FamilySpec::QuasiPeriodic => write!(f, "QP"),
            FamilySpec::QuasiPeriodicBy(h) => write!(f, "QP:{}", h.carrier()),
            FamilySpec::Progression => write!(f, "AP"),
            FamilySpec::ProgressionBy(d) => write!(f, "AP:{d}"),
        }
    }
}

/// Distance to a family with a minimizing superset; `None` means infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distance {
    pub value: Option<usize>,
    pub witness: Option<GroupSubset>,
}

impl Distance {
    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }

    /// Infinite distances compare above every finite one.
    pub fn at_most(&self, n: usize) -> bool {
        self.value.is_some_and(|v| v <= n)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "inf"),
        }
    }
}

/// `d^⊆(A, family)`: fewest elements to add to land in the family.
pub fn d_subset(g: &FiniteAbelianGroup, a: &GroupSubset, family: &FamilySpec) -> Result<Distance> {
    g.owns(a)?;
    nonempty(a, "A")?;
    let best = match family {
        FamilySpec::Periodic => nontrivial(g)
            .filter_map(|h| periodic_cover(a.bits(), h))
            .min(),
        FamilySpec::PeriodicBy(h) => {
            g.owns(&h.carrier())?;
            periodic_cover(a.bits(), h).or(Some((0, a.bits())))
        }
        FamilySpec::QuasiPeriodic => nontrivial(g)
            .filter_map(|h| quasi_periodic_cover(a.bits(), h))
            .min(),
        FamilySpec::QuasiPeriodicBy(h) => {
            g.owns(&h.carrier())?;
            quasi_periodic_cover(a.bits(), h)
        }
        FamilySpec::Progression => (1..g.order())
            .filter_map(|d| progression_cover(g, a.bits(), d))
            .min(),
        FamilySpec::ProgressionBy(d) => {
            g.element(d.index())?;
            if d.index() == 0 {
                return Err(Error::Precondition("progression difference must be nonzero".into()));
            }
            progression_cover(g, a.bits(), d.index())
        }
    };
    Ok(match best {
        Some((v, w)) => Distance {
            value: Some(v),
            witness: Some(g.set(w)),
        },
        None => Distance {
            value: None,
            witness: None,
        },
    })
}

fn nontrivial(g: &FiniteAbelianGroup) -> impl Iterator<Item = &Subgroup> {
    g.all_subgroups().iter().filter(|h| !h.is_trivial())
}

/// Cheapest `H`-periodic superset: `A + H`. `None` for trivial `H`
/// so callers can treat trivial periods separately.
fn periodic_cover(a: Bits, h: &Subgroup) -> Option<(usize, Bits)> {
    if h.is_trivial() {
        return None;
    }
    let w = h.saturate(a);
    Some((w.len() - a.len(), w))
}

/// Cheapest superset with quasi-period `H` and nonempty periodic part.
pub(crate) fn quasi_periodic_cover(a: Bits, h: &Subgroup) -> Option<(usize, Bits)> {
    if h.is_trivial() {
        return None;
    }
    let met = h.cosets_met(a);
    let filled = h.saturate(a);
    if met.len() == 1 {
        return Some((filled.len() - a.len(), filled));
    }
    // every met coset is filled except one, left as the aperiodic part
    met.iter()
        .map(|&c| {
            let coset = h.coset_bits(c);
            let w = filled.difference(coset).union(a.intersection(coset));
            (w.len() - a.len(), w)
        })
        .min()
}

/// Cheapest progression with difference `d` containing `A`.
pub(crate) fn progression_cover(g: &FiniteAbelianGroup, a: Bits, d: usize) -> Option<(usize, Bits)> {
    let a0 = a.min()?;
    let n = g.order_idx(d);
    // position of each element along the <d>-coset through a0
    let mut pos = vec![usize::MAX; g.order()];
    let mut walk = Vec::with_capacity(n);
    let mut x = a0;
    for k in 0..n {
        pos[x] = k;
        walk.push(x);
        x = g.add_idx(x, d);
    }
    let mut ks: Vec<usize> = Vec::with_capacity(a.len());
    for y in a.iter() {
        if pos[y] == usize::MAX {
            return None;
        }
        ks.push(pos[y]);
    }
    ks.sort_unstable();
    if ks.len() == n {
        return Some((0, a));
    }
    // a cover starts just after some element and wraps to the one before it
    (0..ks.len())
        .map(|i| {
            let start = ks[(i + 1) % ks.len()];
            let end = ks[i];
            let len = (end + n - start) % n + 1;
            let w: Bits = (0..len).map(|j| walk[(start + j) % n]).collect();
            (len - a.len(), w)
        })
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f).unwrap()
    }

    fn s(grp: &FiniteAbelianGroup, xs: &[usize]) -> GroupSubset {
        grp.subset(xs.iter().copied()).unwrap()
    }

    /// Oracle: direct double loop over coordinates.
    fn sum_oracle(grp: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Vec<usize> {
        let mut out: Vec<usize> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| grp.add(x, y).unwrap().index()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn sumset_examples() {
        let z6 = g(&[6]);
        let r = sumset(&z6, &s(&z6, &[0, 1]), &s(&z6, &[0, 2])).unwrap();
        assert_eq!(r.indices(), vec![0, 1, 2, 3]);
        let z5 = g(&[5]);
        let a = s(&z5, &[0, 1, 2]);
        assert_eq!(sumset(&z5, &a, &a).unwrap().indices(), vec![0, 1, 2, 3, 4]);
        assert_eq!(sumset(&z5, &a, &s(&z5, &[0])).unwrap(), a);
        assert!(sumset(&z5, &a, &s(&z6, &[0])).is_err());
        let h = g(&[2, 3]);
        for m in 1u128..64 {
            let a = h.set(Bits(m));
            let b = h.set(Bits(m.rotate_left(3) & 63 | 1));
            assert_eq!(sumset(&h, &a, &b).unwrap().indices(), sum_oracle(&h, &a, &b));
        }
    }

    #[test]
    fn nu_examples() {
        let z5 = g(&[5]);
        let w = nu(&z5, &s(&z5, &[0, 1, 2]), &s(&z5, &[0, 1]), z5.element(2).unwrap()).unwrap();
        assert_eq!(w.multiplicity, 2);
        let w = nu(&z5, &s(&z5, &[0]), &s(&z5, &[0]), z5.element(3).unwrap()).unwrap();
        assert_eq!(w.multiplicity, 0);
        let z7 = g(&[7]);
        let a = s(&z7, &[0, 1, 3]);
        assert_eq!(nu(&z7, &a, &a, z7.zero()).unwrap().multiplicity, 1);
        assert_eq!(nu(&z7, &a, &z7.empty_set(), z7.zero()).unwrap().multiplicity, 0);
    }

    #[test]
    fn stabilizer_examples() {
        let z6 = g(&[6]);
        let brute = |set: &GroupSubset| -> Vec<usize> {
            z6.elements()
                .filter(|&x| translate(&z6, set, x).unwrap() == *set)
                .map(GroupElement::index)
                .collect()
        };
        for xs in [&[0, 2, 4][..], &[0, 1], &[0, 1, 2, 3, 4, 5], &[1, 4]] {
            let set = s(&z6, xs);
            assert_eq!(stabilizer(&z6, &set).unwrap().carrier().indices(), brute(&set));
        }
        assert!(stabilizer(&z6, &z6.empty_set()).is_err());
    }

    #[test]
    fn periodicity_examples() {
        let z6 = g(&[6]);
        let f = periodicity_flags(&z6, &s(&z6, &[0, 2, 4])).unwrap();
        assert!(f.is_periodic && !f.is_aperiodic);
        let f = periodicity_flags(&z6, &s(&z6, &[0, 1, 2, 3, 4])).unwrap();
        assert!(f.is_aperiodic);
        assert_eq!(f.punctured.unwrap().gamma.index(), 5);
        let f = periodicity_flags(&z6, &z6.full_set()).unwrap();
        assert!(f.punctured.is_none());
        // punctured periodic sets are never periodic
        for m in 1u128..64 {
            let f = periodicity_flags(&z6, &z6.set(Bits(m))).unwrap();
            if f.punctured.is_some() {
                assert!(!f.is_periodic, "{m:b}");
            }
        }
    }

    #[test]
    fn layer_examples() {
        let z5 = g(&[5]);
        let l = layers(&z5, &s(&z5, &[0]), &s(&z5, &[0, 1]), 10).unwrap();
        let got: Vec<Vec<usize>> = l.layers.iter().map(GroupSubset::indices).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2], vec![3], vec![4], vec![]]);

        let l = layers(&z5, &s(&z5, &[0]), &s(&z5, &[0, 1, 2]), 1).unwrap();
        assert_eq!(l.layers[1].indices(), vec![1, 2]);
        let classes: Vec<(Vec<usize>, Vec<usize>)> = l.classes[1]
            .iter()
            .map(|(u, n)| (u.indices(), n.indices()))
            .collect();
        assert_eq!(classes, vec![(vec![1], vec![1]), (vec![2], vec![2])]);

        let l = layers(&z5, &s(&z5, &[0, 2]), &s(&z5, &[0]), 4).unwrap();
        assert_eq!(l.layers.len(), 2);
        assert!(l.layers[1].is_empty());
        assert!(layers(&z5, &s(&z5, &[1]), &s(&z5, &[0]), 3).is_err());
    }

    #[test]
    fn layer_identity_for_every_class() {
        let z8 = g(&[8]);
        let b = s(&z8, &[0, 1, 3]);
        let a = s(&z8, &[0, 4]);
        let l = layers(&z8, &a, &b, 5).unwrap();
        let mut prev = a.bits();
        for i in 1..l.layers.len() {
            let cur = z8.sum_bits(prev, b.bits());
            for (u, _) in &l.classes[i] {
                let lhs = z8.sum_bits(prev, b.bits().difference(u.bits()));
                let rhs = cur.difference(l.below(i, u).bits());
                assert_eq!(lhs, rhs);
            }
            prev = cur;
        }
    }

    #[test]
    fn e_transform_examples() {
        let z7 = g(&[7]);
        let a = s(&z7, &[0, 1, 3]);
        let b = s(&z7, &[0, 1]);
        let r = e_transform(&z7, &a, &b, z7.zero()).unwrap();
        assert_eq!((r.a_e.indices(), r.b_e.indices()), (vec![0, 1, 3], vec![0, 1]));
        let r = e_transform(&z7, &a, &b, z7.element(3).unwrap()).unwrap();
        assert_eq!((r.a_e.indices(), r.b_e.indices()), (vec![0, 1, 3, 4], vec![3]));
        assert!(e_transform(&z7, &a, &b, z7.element(5).unwrap()).is_err());
    }

    #[test]
    fn d_subset_examples() {
        let z6 = g(&[6]);
        let h = z6.subgroup_from_set(&s(&z6, &[0, 2, 4])).unwrap();
        let d = d_subset(&z6, &s(&z6, &[0, 2]), &FamilySpec::PeriodicBy(h)).unwrap();
        assert_eq!(d.value, Some(1));
        assert_eq!(d.witness.unwrap().indices(), vec![0, 2, 4]);

        let h = z6.subgroup_from_set(&s(&z6, &[0, 3])).unwrap();
        let d = d_subset(&z6, &s(&z6, &[0, 1, 3]), &FamilySpec::QuasiPeriodicBy(h)).unwrap();
        assert_eq!(d.value, Some(0));

        let z7 = g(&[7]);
        let d = d_subset(&z7, &s(&z7, &[0, 1, 3]), &FamilySpec::ProgressionBy(z7.element(1).unwrap()))
            .unwrap();
        assert_eq!(d.value, Some(1));
        assert_eq!(d.witness.unwrap().indices(), vec![0, 1, 2, 3]);

        // periodic sets do not exist in a group of prime order except G
        let d = d_subset(&z7, &s(&z7, &[0, 1, 3]), &FamilySpec::Periodic).unwrap();
        assert_eq!(d.value, Some(4));
        // a set spanning two <3>-cosets of Z/6 is no progression with difference 3
        let d = d_subset(&z6, &s(&z6, &[0, 1]), &FamilySpec::ProgressionBy(z6.element(3).unwrap()))
            .unwrap();
        assert!(!d.is_finite());
    }

    /// Oracle: scan every superset of `A` for family membership.
    fn brute_distance(
        grp: &FiniteAbelianGroup,
        a: Bits,
        member: impl Fn(Bits) -> bool,
    ) -> Option<usize> {
        let n = grp.order();
        (0u128..1 << n)
            .map(Bits)
            .filter(|&w| a.is_subset(w) && member(w))
            .map(|w| w.len() - a.len())
            .min()
    }

    fn is_ap(grp: &FiniteAbelianGroup, w: Bits, d: usize) -> bool {
        w.iter().any(|a0| {
            let mut x = a0;
            let mut p = Bits::EMPTY;
            for _ in 0..grp.order_idx(d) {
                p.insert(x);
                if p == w {
                    return true;
                }
                x = grp.add_idx(x, d);
            }
            false
        })
    }

    fn is_qp(h: &Subgroup, w: Bits) -> bool {
        let met = h.cosets_met(w);
        let partial = met.iter().filter(|&&c| !h.coset_bits(c).is_subset(w)).count();
        partial <= 1 && met.len() > partial
    }

    #[test]
    fn d_subset_matches_superset_scan() {
        for f in [&[6][..], &[2, 4], &[8], &[3, 3]] {
            let grp = g(f);
            for m in 1u128..1 << grp.order() {
                let a = Bits(m);
                let set = grp.set(a);
                let per = d_subset(&grp, &set, &FamilySpec::Periodic).unwrap().value;
                let want = brute_distance(&grp, a, |w| is_periodic_bits(&grp, w));
                assert_eq!(per, want);
                let qp = d_subset(&grp, &set, &FamilySpec::QuasiPeriodic).unwrap().value;
                let want = brute_distance(&grp, a, |w| {
                    grp.all_subgroups().iter().any(|h| !h.is_trivial() && is_qp(h, w))
                });
                assert_eq!(qp, want);
                for d in 1..grp.order() {
                    let got = progression_cover(&grp, a, d).map(|x| x.0);
                    let want = brute_distance(&grp, a, |w| is_ap(&grp, w, d));
                    assert_eq!(got, want, "{f:?} {a:?} d={d}");
                }
            }
        }
    }
}
