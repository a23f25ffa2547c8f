//! The representation graph of a pair, its edge count under negation of one
//! side, and the resulting lower bounds for `|A+B|`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupSubset};
use crate::sumset::nu_counts;

pub type Rational = Ratio<i128>;

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Clique sizes of the graph on `A × B` joining pairs with equal sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueProfile {
    /// `ν_x(A,B)` for each `x ∈ A+B`, in element order.
    pub multiplicities: Vec<usize>,
    /// Number of cliques of each size.
    pub counts: BTreeMap<usize, usize>,
    pub edge_count: usize,
}

fn profile_bits(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> CliqueProfile {
    let multiplicities: Vec<usize> = nu_counts(g, a, b).into_iter().filter(|&m| m > 0).map(|m| m as usize).collect();
    let mut counts = BTreeMap::new();
    for &m in &multiplicities {
        *counts.entry(m).or_insert(0) += 1;
    }
    let edge_count = counts.iter().map(|(&i, &n)| n * choose2(i)).sum();
    CliqueProfile { multiplicities, counts, edge_count }
}

pub fn clique_profile(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<CliqueProfile> {
    nonempty_pair(g, a, b)?;
    Ok(profile_bits(g, a.bits(), b.bits()))
}

fn nonempty_pair(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    g.owns(a)?;
    g.owns(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    Ok(())
}

/// Two adjacent edges `{v1,v2}`, `{v2,v3}` whose images share a component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionCounterexample {
    pub vertices: [(usize, usize); 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphBijectionReport {
    pub edges_sum: usize,
    pub edges_difference: usize,
    pub counterexample: Option<BijectionCounterexample>,
    /// The image of every edge is an edge and the map is injective.
    pub maps_edges_injectively: bool,
}

impl GraphBijectionReport {
    pub fn holds(&self) -> bool {
        self.edges_sum == self.edges_difference && self.counterexample.is_none() && self.maps_edges_injectively
    }
}

/// Checks the edge map `{(a,b),(a',b')} ↦ {(a,-b'),(a',-b)}` from the
/// graph of `(A, B)` to the graph of `(A, -B)`.
pub fn verify_graph_bijection(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> Result<GraphBijectionReport> {
    nonempty_pair(g, a, b)?;
    let neg_b = g.neg_bits(b.bits());
    let mut cliques: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.order()];
    for x in a.bits().iter() {
        for y in b.bits().iter() {
            cliques[g.add_idx(x, y)].push((x, y));
        }
    }
    let mut images = std::collections::BTreeSet::new();
    let mut maps_edges_injectively = true;
    for clique in &cliques {
        for (i, &(a1, b1)) in clique.iter().enumerate() {
            for &(a2, b2) in &clique[i + 1..] {
                let (p, q) = ((a1, g.neg_idx(b2)), (a2, g.neg_idx(b1)));
                let is_edge = p != q && g.sub_idx(p.0, b2) == g.sub_idx(q.0, b1);
                let key = if p < q { (p, q) } else { (q, p) };
                maps_edges_injectively &= is_edge && images.insert(key);
            }
        }
    }
    let mut counterexample = None;
    'outer: for clique in &cliques {
        for &v1 in clique {
            for &v2 in clique {
                for &v3 in clique {
                    if v1 == v2 || v2 == v3 || v1 == v3 {
                        continue;
                    }
                    // components a1 - b2 and a2 - b3
                    if g.sub_idx(v1.0, v2.1) == g.sub_idx(v2.0, v3.1) {
                        counterexample = Some(BijectionCounterexample { vertices: [v1, v2, v3] });
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(GraphBijectionReport {
        edges_sum: profile_bits(g, a.bits(), b.bits()).edge_count,
        edges_difference: profile_bits(g, a.bits(), neg_b).edge_count,
        counterexample,
        maps_edges_injectively,
    })
}

fn rat_string<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn rats_string<S: serde::Serializer>(rs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&format!("{}/{}", r.numer(), r.denom()))?;
    }
    seq.end()
}

/// The derived quantities and the three lower bounds for a pair whose
/// difference multiplicities are at most `k` off an exceptional set `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsParams {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    /// Exceptional set actually used: the exact set of `x` with
    /// `ν_x(A,-B) > k`.
    #[serde(rename = "T", serialize_with = "indices")]
    pub t: GroupSubset,
    pub delta: i128,
    #[serde(rename = "M")]
    pub m: i128,
    pub x: i128,
    pub delta0: i128,
    /// `⌈ab/|A+B|⌉ - 1`.
    pub l: i128,
    /// Two lower bounds on `|A+B|`, strongest first.
    #[serde(serialize_with = "rats_string")]
    pub sumset_bounds: Vec<Rational>,
    /// The three chained lower bounds on `|T|`, strongest first.
    #[serde(serialize_with = "rats_string")]
    pub exceptional_bounds: Vec<Rational>,
    #[serde(serialize_with = "rat_string")]
    pub sumset_floor_bound: Rational,
    pub actual_sumset: usize,
    #[serde(rename = "actual_T")]
    pub actual_t: usize,
}

fn indices<S: serde::Serializer>(t: &GroupSubset, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(t.indices())
}

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// The floor-form lower bound on `|A+B|`.
pub fn floor_bound(ab: i128, m: i128) -> Rational {
    let d = Integer::div_floor(&(m + ab), &ab);
    let d1 = Integer::div_floor(&(m + 2 * ab), &ab);
    Rational::new(2 * ab, d1) - Rational::new(m, d * d1)
}

/// The same bound written through the congruence solution `x`.
pub fn floor_bound_x_form(ab: i128, m: i128, x: i128) -> Rational {
    Rational::new(ab * ab * (m + 2 * x), (m + ab + x) * (m + x))
}

/// The intermediate bound `2ab/(l+1) - M/(l(l+1))` for `l >= 1`.
pub fn layer_bound(ab: i128, m: i128, l: i128) -> Rational {
    Rational::new(2 * ab, l + 1) - Rational::new(m, l * (l + 1))
}

pub fn multiplicity_bounds(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    t: &GroupSubset,
    k: usize,
) -> Result<BoundsParams> {
    nonempty_pair(g, a, b)?;
    g.owns(t)?;
    if !(a.len() >= b.len() && b.len() > k && k >= 1) {
        return Err(Error::Precondition(format!(
            "need |A| >= |B| > k >= 1, got |A|={}, |B|={}, k={k}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < t.len() {
        return Err(Error::Precondition(format!("need |A| >= |T|, got |T|={}", t.len())));
    }
    let diff = nu_counts(g, a.bits(), g.neg_bits(b.bits()));
    let violators: Bits = (0..g.order()).filter(|&x| diff[x] as usize > k).collect();
    let offending: Vec<usize> = violators.difference(t.bits()).iter().collect();
    if !offending.is_empty() {
        return Err(Error::Precondition(format!(
            "ν_x(A,-B) exceeds {k} outside T at {offending:?}"
        )));
    }
    let (ai, bi, ki, ti) = (a.len() as i128, b.len() as i128, k as i128, violators.len() as i128);
    let ab = ai * bi;
    let c = g.sum_bits(a.bits(), b.bits()).len() as i128;
    let delta = (bi * (ai - ti)).mod_floor(&ki);
    let m = ti * bi * (bi - ki) + (ki - 1) * ab - delta * (ki - delta);
    let x = (-m).mod_floor(&ab);
    let x = if x == 0 { ab } else { x };
    let delta0 = (-ab).mod_floor(&c);
    let l = Integer::div_ceil(&ab, &c) - 1;
    let sumset_bounds = vec![Rational::new(ab * ab, m + ab), Rational::new(ai * ai * bi, ti * (bi - ki) + ki * ai)];
    let denom = c * bi * (bi - ki);
    let exceptional_bounds = vec![
        Rational::new(ab * ab - delta0 * delta0 - c * (ki * ab - delta0 - delta * (ki - delta)), denom),
        Rational::new(ab * ab - delta0 * delta0 - c * (ki * ab - delta0), denom),
        r(ai) * Rational::new(ab - ki * c, c * (bi - ki)),
    ];
    let sumset_floor_bound = floor_bound(ab, m);
    let x_form = floor_bound_x_form(ab, m, x);
    if sumset_floor_bound != x_form {
        return Err(Error::Internal(format!("floor bound forms disagree: {sumset_floor_bound} vs {x_form}")));
    }
    Ok(BoundsParams {
        a: a.len(),
        b: b.len(),
        k,
        t: g.set(violators),
        delta,
        m,
        x,
        delta0,
        l,
        sumset_bounds,
        exceptional_bounds,
        sumset_floor_bound,
        actual_sumset: c as usize,
        actual_t: violators.len(),
    })
}

/// `ab - |T|b(b-k) + δ(k-δ)`, when `0 <= |T|b(b-k) - δ(k-δ) < ab`; it then
/// agrees with the congruence solution `x`.
pub fn special_x_estimate(p: &BoundsParams) -> Option<i128> {
    let (a, b, k, t) = (p.a as i128, p.b as i128, p.k as i128, p.actual_t as i128);
    let core = t * b * (b - k) - p.delta * (k - p.delta);
    if core < 0 || core >= a * b {
        return None;
    }
    let x = a * b - core;
    debug_assert_eq!(x, p.x);
    Some(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SidonReport {
    pub is_sidon: bool,
    pub doubling: usize,
    /// `|S|(|S|+1)/2`, which `|2S|` is at least whenever `S` is Sidon.
    pub lower_bound: usize,
    pub attains_bound: bool,
}

/// Whether every nonzero difference of `S` is represented at most once.
pub fn sidon_check(g: &FiniteAbelianGroup, s: &GroupSubset) -> Result<SidonReport> {
    g.owns(s)?;
    if s.is_empty() {
        return Err(Error::Precondition("S must be nonempty".into()));
    }
    let diff = nu_counts(g, s.bits(), g.neg_bits(s.bits()));
    let is_sidon = diff.iter().skip(1).all(|&c| c <= 1);
    let doubling = g.sum_bits(s.bits(), s.bits()).len();
    let n = s.len();
    let lower_bound = n * (n + 1) / 2;
    if is_sidon && n >= 2 {
        let p = multiplicity_bounds(g, s, s, &g.set(Bits::singleton(0)), 1)?;
        if p.sumset_floor_bound != r(lower_bound as i128) || doubling < lower_bound {
            return Err(Error::Internal(format!(
                "Sidon set with |2S| = {doubling} misses the bound {lower_bound} (floor bound = {})",
                p.sumset_floor_bound
            )));
        }
    }
    Ok(SidonReport { is_sidon, doubling, lower_bound, attains_bound: is_sidon && doubling == lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: u32) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn s(g: &FiniteAbelianGroup, xs: &[usize]) -> GroupSubset {
        g.subset(xs.iter().copied()).unwrap()
    }

    fn brute_edges(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> usize {
        let v: Vec<(usize, usize)> = a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).collect();
        let mut n = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if g.add_idx(v[i].0, v[i].1) == g.add_idx(v[j].0, v[j].1) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn profile_examples() {
        let z7 = z(7);
        let a = s(&z7, &[0, 1, 3]);
        let p = clique_profile(&z7, &a, &a).unwrap();
        assert_eq!(p.multiplicities, vec![1, 2, 1, 2, 2, 1]);
        assert_eq!(p.edge_count, 3);
        let neg = s(&z7, &[0, 6, 4]);
        let p = clique_profile(&z7, &a, &neg).unwrap();
        assert_eq!(p.multiplicities[0], 3);
        assert_eq!(p.counts[&1], 6);
        assert_eq!(p.edge_count, 3);
        let p = clique_profile(&z7, &s(&z7, &[2]), &a).unwrap();
        assert!(p.multiplicities.iter().all(|&m| m == 1));
        assert_eq!(p.edge_count, 0);
    }

    #[test]
    fn edge_count_matches_brute_force_exhaustively() {
        for g in [z(5), z(6), FiniteAbelianGroup::new(&[2, 4]).unwrap(), z(8)] {
            let top = 1u128 << g.order();
            for m in 1..top {
                for k in (1..top).step_by(3) {
                    let p = profile_bits(&g, Bits(m), Bits(k));
                    assert_eq!(p.edge_count, brute_edges(&g, Bits(m), Bits(k)));
                    assert_eq!(p.multiplicities.iter().sum::<usize>(), Bits(m).len() * Bits(k).len());
                    assert_eq!(p.counts.values().sum::<usize>(), g.sum_bits(Bits(m), Bits(k)).len());
                }
            }
        }
    }

    #[test]
    fn graph_bijection_exhaustive_small() {
        for g in [z(6), z(7), FiniteAbelianGroup::new(&[2, 4]).unwrap()] {
            let top = 1u128 << g.order();
            for m in 1..top {
                for k in 1..top {
                    let rep = verify_graph_bijection(&g, &g.set(Bits(m)), &g.set(Bits(k))).unwrap();
                    assert!(rep.holds(), "{g} {m:b} {k:b}: {rep:?}");
                }
            }
        }
    }

    #[test]
    fn sidon_parameters() {
        let z7 = z(7);
        let a = s(&z7, &[0, 1, 3]);
        let p = multiplicity_bounds(&z7, &a, &a, &s(&z7, &[0]), 1).unwrap();
        assert_eq!((p.delta, p.m, p.x, p.delta0), (0, 6, 3, 3));
        assert_eq!(p.sumset_floor_bound, r(6));
        assert_eq!(p.sumset_bounds, vec![Rational::new(27, 5), Rational::new(27, 5)]);
        assert_eq!(p.exceptional_bounds[0], r(1));
        assert_eq!(p.exceptional_bounds[1], r(1));
        assert_eq!(p.exceptional_bounds[2], Rational::new(3, 4));
        assert_eq!(special_x_estimate(&p), Some(3));
    }

    #[test]
    fn hypothesis_violation_lists_offenders() {
        let z7 = z(7);
        let a = s(&z7, &[0, 1, 2]);
        let err = multiplicity_bounds(&z7, &a, &a, &s(&z7, &[0]), 1).unwrap_err();
        assert!(err.to_string().contains("[1, 6]"), "{err}");
        assert!(multiplicity_bounds(&z7, &a, &s(&z7, &[0, 1, 2, 3]), &s(&z7, &[0]), 1).is_err());
    }

    #[test]
    fn passed_superset_is_canonicalized() {
        let z7 = z(7);
        let a = s(&z7, &[0, 1, 3]);
        let p = multiplicity_bounds(&z7, &a, &a, &s(&z7, &[0, 2, 5]), 1).unwrap();
        assert_eq!(p.t.indices(), vec![0]);
        assert_eq!(p.actual_t, 1);
    }

    #[test]
    fn special_x_precondition() {
        let z11 = z(11);
        let a = s(&z11, &[0, 1, 2, 3, 4]);
        let p = multiplicity_bounds(&z11, &a, &s(&z11, &[0, 1]), &s(&z11, &[0, 1, 2, 3]), 1).unwrap();
        assert_eq!((p.m, p.x), (8, 2));
        assert_eq!(special_x_estimate(&p), Some(2));
        let p = multiplicity_bounds(&z11, &a, &a, &s(&z11, &[0, 1, 2, 9, 10]), 2).unwrap();
        assert_eq!(special_x_estimate(&p), None);
    }

    #[test]
    fn sidon_examples() {
        let z7 = z(7);
        let rep = sidon_check(&z7, &s(&z7, &[0, 1, 3])).unwrap();
        assert!(rep.is_sidon && rep.attains_bound);
        assert_eq!(rep.doubling, 6);
        assert!(!sidon_check(&z7, &s(&z7, &[0, 1, 2])).unwrap().is_sidon);
        assert!(sidon_check(&z7, &s(&z7, &[4])).unwrap().is_sidon);
    }

    fn group_and_pair() -> impl Strategy<Value = (u32, u128, u128, usize)> {
        (5u32..=24).prop_flat_map(|n| {
            let all: Vec<usize> = (0..n as usize).collect();
            let pick = move |hi: usize| proptest::sample::subsequence(all.clone(), 1..=hi).prop_map(|v| v.into_iter().collect::<Bits>().0);
            (Just(n), pick(n as usize / 2 + 1), pick(n as usize / 2 + 1), 1usize..4)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 400, max_global_rejects: 20_000, ..ProptestConfig::default() })]

        #[test]
        fn bounds_hold_whenever_hypotheses_do((n, m, k, kk) in group_and_pair()) {
            let g = z(n);
            let (x, y) = (g.set(Bits(m)), g.set(Bits(k)));
            let (a, b) = if x.len() >= y.len() { (x, y) } else { (y, x) };
            prop_assume!(b.len() > kk);
            let diff = nu_counts(&g, a.bits(), g.neg_bits(b.bits()));
            let t: Bits = (0..g.order()).filter(|&v| diff[v] as usize > kk).collect();
            prop_assume!(t.len() <= a.len());
            let p = multiplicity_bounds(&g, &a, &b, &g.set(t), kk).unwrap();
            let c = r(p.actual_sumset as i128);
            prop_assert!(p.m >= 0 && p.m % 2 == 0);
            prop_assert!(c >= p.sumset_bounds[0] && p.sumset_bounds[0] >= p.sumset_bounds[1]);
            prop_assert!(c >= p.sumset_floor_bound);
            prop_assert!(r(p.actual_t as i128) >= p.exceptional_bounds[0]);
            prop_assert!(p.exceptional_bounds[0] >= p.exceptional_bounds[1] && p.exceptional_bounds[1] >= p.exceptional_bounds[2]);
            if let Some(x) = special_x_estimate(&p) {
                prop_assert_eq!(x, p.x);
            }
            let ab = (p.a * p.b) as i128;
            prop_assert_eq!(c, Rational::new(ab + p.delta0, p.l + 1));
        }

        #[test]
        fn layer_bound_is_monotone_below_the_threshold(ab in 2i128..400, m2 in 0i128..400) {
            let m = 2 * m2;
            let top = (m + ab) / ab;
            for l in 2..=top {
                prop_assert!(layer_bound(ab, m, l) >= layer_bound(ab, m, l - 1));
            }
        }

        #[test]
        fn graph_bijection_random((n, m, k, _) in group_and_pair()) {
            let g = z(n);
            let rep = verify_graph_bijection(&g, &g.set(Bits(m)), &g.set(Bits(k))).unwrap();
            prop_assert!(rep.holds());
        }
    }
}
