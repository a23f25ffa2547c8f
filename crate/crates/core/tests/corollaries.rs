//! Distance consequences of the structure theorem, checked on every
//! qualifying pair of small cyclic and non-cyclic groups.

use sumset_core::bits::Bits;
use sumset_core::classifier::is_extendible;
use sumset_core::group::{FiniteAbelianGroup, GroupSubset};
use sumset_core::structure::is_quasi_periodic;
use sumset_core::sumset::{d_subset, sumset, FamilySpec};

fn groups() -> Vec<FiniteAbelianGroup> {
    let mut out: Vec<FiniteAbelianGroup> = (5..=13).map(|n| FiniteAbelianGroup::cyclic(n).unwrap()).collect();
    out.push(FiniteAbelianGroup::new(&[2, 4]).unwrap());
    out.push(FiniteAbelianGroup::new(&[3, 3]).unwrap());
    out.push(FiniteAbelianGroup::new(&[2, 6]).unwrap());
    out
}

fn dist(g: &FiniteAbelianGroup, s: &GroupSubset, f: &FamilySpec) -> Option<usize> {
    d_subset(g, s, f).unwrap().value
}

fn generates(g: &FiniteAbelianGroup, s: &GroupSubset) -> bool {
    let m = s.min().unwrap();
    let diffs = g.subset_of_elements(s.iter().map(|x| g.sub(x, m).unwrap())).unwrap();
    g.subgroup_generated(&diffs).unwrap().order() == g.order()
}

/// Pairs with `|A+B| = |A|+|B|`, up to swapping `A` and `B`.
fn excess_zero_pairs(g: &FiniteAbelianGroup) -> Vec<(GroupSubset, GroupSubset, GroupSubset)> {
    let top = 1u128 << g.order();
    let mut out = Vec::new();
    for m in 1..top {
        for k in m..top {
            let (a, b) = (g.set(Bits(m)), g.set(Bits(k)));
            let s = sumset(g, &a, &b).unwrap();
            if s.len() == a.len() + b.len() {
                out.push((a, b, s));
            }
        }
    }
    out
}

#[test]
fn non_extendible_aperiodic_generating_pairs_are_one_step_from_a_common_family() {
    let mut hits = 0;
    for g in groups() {
        let families: Vec<FamilySpec> = g
            .all_subgroups()
            .iter()
            .filter(|h| !h.is_trivial() && h.order() < g.order())
            .map(|h| FamilySpec::QuasiPeriodicBy(h.clone()))
            .chain(g.elements().skip(1).map(FamilySpec::ProgressionBy))
            .collect();
        for (a, b, s) in excess_zero_pairs(&g) {
            let c = g.complement(&s).unwrap();
            let sizes = [a.len(), b.len(), c.len()];
            if sizes.iter().any(|&n| n < 3) || sizes.iter().filter(|&&n| n == 3).count() > 1 {
                continue;
            }
            if is_extendible(&g, &a, &b).unwrap().pair_is_extendible() {
                continue;
            }
            if is_quasi_periodic(&g, &a).unwrap() || is_quasi_periodic(&g, &b).unwrap() {
                continue;
            }
            if !generates(&g, &a) || !generates(&g, &b) {
                continue;
            }
            let six = [s.clone(), c, a.clone(), g.complement(&a).unwrap(), b.clone(), g.complement(&b).unwrap()];
            let found = families.iter().any(|f| six.iter().all(|x| dist(&g, x, f) == Some(1)));
            assert!(found, "{g} A={a} B={b}");
            hits += 1;
        }
    }
    assert!(hits > 0, "hypotheses never met");
}

#[test]
fn far_from_periodic_pairs_are_close_to_a_common_progression() {
    let mut hits = 0;
    for g in groups() {
        for (a, b, s) in excess_zero_pairs(&g) {
            if dist(&g, &a, &FamilySpec::QuasiPeriodic).is_some_and(|d| d < 2)
                || dist(&g, &b, &FamilySpec::QuasiPeriodic).is_some_and(|d| d < 2)
            {
                continue;
            }
            let p = [
                dist(&g, &g.complement(&a).unwrap(), &FamilySpec::Periodic),
                dist(&g, &g.complement(&b).unwrap(), &FamilySpec::Periodic),
                dist(&g, &s, &FamilySpec::Periodic),
            ];
            let p: Vec<usize> = p.iter().map(|d| d.unwrap_or(usize::MAX)).collect();
            if p.iter().any(|&d| d < 3) || p.iter().filter(|&&d| d == 3).count() > 1 {
                continue;
            }
            let found = g.elements().skip(1).any(|d| {
                let f = FamilySpec::ProgressionBy(d);
                [&s, &a, &b].iter().all(|x| dist(&g, x, &f).is_some_and(|v| v <= 1))
            });
            assert!(found, "{g} A={a} B={b}");
            hits += 1;
        }
    }
    assert!(hits > 0, "hypotheses never met");
}
