use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bits::Bits;
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset};
use crate::sumset::{d_subset, FamilySpec};

fn z(n: u32) -> FiniteAbelianGroup {
    FiniteAbelianGroup::cyclic(n).unwrap()
}

fn s(g: &FiniteAbelianGroup, xs: &[usize]) -> GroupSubset {
    g.subset(xs.iter().copied()).unwrap()
}

fn small_groups() -> Vec<FiniteAbelianGroup> {
    let mut out: Vec<FiniteAbelianGroup> = (2..=8).map(z).collect();
    out.push(FiniteAbelianGroup::trivial());
    out.push(FiniteAbelianGroup::new(&[2, 2]).unwrap());
    out.push(FiniteAbelianGroup::new(&[2, 4]).unwrap());
    out
}

fn pairs(g: &FiniteAbelianGroup) -> impl Iterator<Item = (GroupSubset, GroupSubset)> + '_ {
    let top = 1u128 << g.order();
    (1..top).flat_map(move |m| (1..top).map(move |k| (g.set(Bits(m)), g.set(Bits(k)))))
}

fn critical_with_proviso(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> bool {
    let sum = g.sum_bits(a.bits(), b.bits());
    if sum.len() + 1 != a.len() + b.len() {
        return false;
    }
    let periodic = crate::sumset::is_periodic_bits(g, sum);
    !periodic || !kst::unique_representations(g, a.bits(), b.bits()).is_empty()
}

#[test]
fn kst_examples() {
    let z5 = z(5);
    let c = kst_classify(&z5, &s(&z5, &[0, 1]), &s(&z5, &[0, 1])).unwrap();
    assert_eq!(c.kind, KstType::II);
    assert_eq!(c.quasi_period.order(), 5);
    assert!(c.a1.is_empty() && c.b1.is_empty());
    assert!(matches!(c.witness, KstWitness::Progression { d } if d.index() == 1 || d.index() == 4));

    let z6 = z(6);
    let c = kst_classify(&z6, &s(&z6, &[0, 3, 1]), &s(&z6, &[0, 3])).unwrap();
    assert_eq!(c.kind, KstType::I);
    assert_eq!(c.quasi_period.bits(), Bits::from_iter([0, 3]));
    assert_eq!(c.a1.indices(), vec![0, 3]);
    assert_eq!(c.a0.indices(), vec![1]);
    assert_eq!(c.b0.indices(), vec![0, 3]);

    let c = kst_classify(&z5, &s(&z5, &[0, 1, 2]), &s(&z5, &[0, 1, 3])).unwrap();
    assert_eq!(c.kind, KstType::III);
    assert!(matches!(c.witness, KstWitness::UniqueElement { g0, .. } if g0.index() == 4));

    let z7 = z(7);
    let c = kst_classify(&z7, &s(&z7, &[0, 1, 3]), &s(&z7, &[1, 2, 3, 5])).unwrap();
    assert_eq!(c.kind, KstType::IV);
    assert!(matches!(c.witness, KstWitness::PuncturedCoset { g0, .. } if g0.index() == 0));
}

#[test]
fn kst_rejects_non_critical_and_proviso() {
    let z6 = z(6);
    let r = kst_classify(&z6, &s(&z6, &[0, 1]), &s(&z6, &[0, 2]));
    assert!(matches!(r, Err(crate::error::Error::Precondition(_))));
    // {0,1,3,4} + {0,1} = G, periodic with every element twice represented
    let r = kst_classify(&z6, &s(&z6, &[0, 3, 1, 4]), &s(&z6, &[0, 3]));
    assert!(matches!(r, Err(crate::error::Error::Precondition(_))));
}

#[test]
fn kst_completeness_and_verification() {
    for g in small_groups() {
        for (a, b) in pairs(&g) {
            if !critical_with_proviso(&g, &a, &b) {
                continue;
            }
            let cert = kst_classify(&g, &a, &b).unwrap_or_else(|e| panic!("{g} {a} {b}: {e}"));
            let v = verify_kst_certificate(&a, &b, &cert);
            assert!(v.ok(), "{g} {a} {b}: {:?}", v.failures);
        }
    }
}

#[test]
fn kst_type_is_independent_of_search_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in [z(6), z(7), FiniteAbelianGroup::new(&[2, 4]).unwrap()] {
        for (a, b) in pairs(&g) {
            if !critical_with_proviso(&g, &a, &b) {
                continue;
            }
            let base = kst_classify(&g, &a, &b).unwrap().kind;
            let mut order = search_order(&g);
            for _ in 0..3 {
                order.shuffle(&mut rng);
                let c = classify_with(&g, a.bits(), b.bits(), &order).unwrap();
                assert_eq!(c.kind, base, "{g} {a} {b}");
            }
        }
    }
}

#[test]
fn mutated_certificates_are_rejected() {
    let z7 = z(7);
    let (a, b) = (s(&z7, &[0, 1, 3]), s(&z7, &[1, 2, 3, 5]));
    let cert = kst_classify(&z7, &a, &b).unwrap();
    for kind in [KstType::I, KstType::II, KstType::III] {
        let mut bad = cert.clone();
        bad.kind = kind;
        assert!(!verify_kst_certificate(&a, &b, &bad).ok());
    }
    let mut bad = cert.clone();
    bad.witness = KstWitness::PuncturedCoset { g0: GroupElement::from_index(1), g1: GroupElement::from_index(0) };
    assert!(!verify_kst_certificate(&a, &b, &bad).ok());
    let mut bad = cert.clone();
    bad.quasi_period = z7.trivial_subgroup();
    assert!(!verify_kst_certificate(&a, &b, &bad).ok());
    let mut bad = cert;
    bad.chain.pop();
    assert!(!verify_kst_certificate(&a, &b, &bad).ok());
}

#[test]
fn mutated_type_tags_are_rejected_exhaustively() {
    let all = [KstType::I, KstType::II, KstType::III, KstType::IV];
    for g in [z(5), z(6), z(7)] {
        for (a, b) in pairs(&g) {
            if !critical_with_proviso(&g, &a, &b) {
                continue;
            }
            let cert = kst_classify(&g, &a, &b).unwrap();
            for kind in all.into_iter().filter(|&k| k != cert.kind) {
                let mut bad = cert.clone();
                bad.kind = kind;
                assert!(!verify_kst_certificate(&a, &b, &bad).ok());
            }
        }
    }
}

#[test]
fn type_iv_occurs_only_at_the_top() {
    for g in small_groups() {
        for (a, b) in pairs(&g) {
            if !critical_with_proviso(&g, &a, &b) {
                continue;
            }
            let chain = kst_classify(&g, &a, &b).unwrap().type_chain();
            assert!(chain.iter().skip(1).all(|&t| t != KstType::IV), "{g} {a} {b}: {chain:?}");
        }
    }
}

#[test]
fn periodic_reduction_recovers_the_saturations() {
    let z9 = z(9);
    // B+H = {0,1,3,4,6,7} with two holes
    let (a, b) = (s(&z9, &[0, 3, 6]), s(&z9, &[0, 1, 3, 4]));
    let r = kst_periodic_reduce(&z9, &a, &b).unwrap();
    assert_eq!(r.quasi_period.bits(), Bits::from_iter([0, 3, 6]));
    assert_eq!(r.hole_count, 6 + 3 - 3 - 4);
    assert_eq!(r.quotient_a.len(), 1);
    assert_eq!(r.quotient_b.len(), 2);
    assert!(r.holes_unconstrained);
    assert_eq!(r.quotient_certificate.kind, KstType::I);

    let z6 = z(6);
    // whole group sumset: degenerate quotient
    let (a, b) = (s(&z6, &[0, 1, 3, 4]), s(&z6, &[0, 1, 2]));
    let r = kst_periodic_reduce(&z6, &a, &b).unwrap();
    assert_eq!(r.quasi_period.order(), 6);
    assert_eq!(r.hole_count, 6 + 6 - 4 - 3);
    assert!(r.quotient_a.len() == 1 && r.quotient_b.len() == 1);

    let z5 = z(5);
    let r = kst_periodic_reduce(&z5, &s(&z5, &[0, 1]), &s(&z5, &[0, 1]));
    assert!(r.is_err());
}

#[test]
fn periodic_reduction_round_trip() {
    let g = FiniteAbelianGroup::new(&[2, 4]).unwrap();
    for (a, b) in pairs(&g) {
        let sum = g.sum_bits(a.bits(), b.bits());
        if sum.len() + 1 > a.len() + b.len() {
            continue;
        }
        let Ok(r) = kst_periodic_reduce(&g, &a, &b) else { continue };
        let h = &r.quasi_period;
        assert_eq!(g.sum_bits(h.saturate(a.bits()), h.saturate(b.bits())), sum);
        let q = g.quotient_map(h).unwrap();
        assert_eq!(r.quotient_a, q.push(&a));
        assert_eq!(r.quotient_b, q.push(&b));
    }
}

#[test]
fn beyond_examples() {
    let z7 = z(7);
    let c = beyond_classify(&z7, &s(&z7, &[0, 1]), &s(&z7, &[0, 2])).unwrap();
    assert!(matches!(c.outcome, BeyondOutcome::Extendible { .. }));

    let a = s(&z7, &[0, 1, 3]);
    let c = beyond_classify(&z7, &a, &a).unwrap();
    assert!(verify_beyond_certificate(&a, &a, &c).ok());
    let m = kst_free_structured(&z7, &a, &a);
    assert!(m.has_type(BeyondType::VI));

    let z9 = z(9);
    let (a, b) = (s(&z9, &[0, 1, 3]), s(&z9, &[1, 2, 4]));
    assert_eq!(z9.sum_bits(a.bits(), b.bits()), Bits::from_iter([1, 2, 3, 4, 5, 7]));
    let m = kst_free_structured(&z9, &a, &b);
    assert!(m.has_type(BeyondType::VII));
}

/// Structured match regardless of whether the extension also holds.
fn kst_free_structured(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset) -> StructuredMatch {
    beyond::structured_match(g, a.bits(), b.bits()).unwrap().expect("structured match")
}

pub(crate) fn type_viii_example() -> (FiniteAbelianGroup, GroupSubset, GroupSubset) {
    let g = FiniteAbelianGroup::new(&[2, 2, 5]).unwrap();
    let e = |c: [u32; 3]| g.element_from_coords(&c).unwrap();
    let mut a = vec![e([0, 0, 0]), e([1, 0, 0])];
    a.extend([e([0, 0, 1]), e([1, 0, 1]), e([0, 1, 1]), e([1, 1, 1])]);
    a.extend([e([0, 0, 2]), e([0, 1, 2])]);
    let b = vec![e([0, 0, 0]), e([1, 0, 0]), e([0, 0, 1]), e([0, 1, 1])];
    let (a, b) = (g.subset_of_elements(a).unwrap(), g.subset_of_elements(b).unwrap());
    (g, a, b)
}

#[test]
fn type_viii_example_classifies() {
    let (g, a, b) = type_viii_example();
    assert_eq!(g.sum_bits(a.bits(), b.bits()).len(), 12);
    let c = beyond_classify(&g, &a, &b).unwrap();
    assert!(verify_beyond_certificate(&a, &b, &c).ok());
    let m = kst_free_structured(&g, &a, &b);
    let w = m.types.iter().find(|w| w.kind() == BeyondType::VIII).expect("type VIII");
    let BeyondWitness::VIII { klein, h_d1, h_d2, .. } = w else { unreachable!() };
    let gen = |c: [u32; 3]| g.subgroup_generated(&g.subset_of_elements([g.element_from_coords(&c).unwrap()]).unwrap()).unwrap();
    assert_eq!(klein.order(), 4);
    assert_eq!(h_d1.bits(), gen([1, 0, 0]).bits());
    assert_eq!(h_d2.bits(), gen([0, 1, 0]).bits());
}

#[test]
fn beyond_completeness_and_verification() {
    for g in small_groups() {
        for (a, b) in pairs(&g) {
            if g.sum_bits(a.bits(), b.bits()).len() != a.len() + b.len() {
                continue;
            }
            let cert = beyond_classify(&g, &a, &b).unwrap_or_else(|e| panic!("{g} {a} {b}: {e}"));
            let v = verify_beyond_certificate(&a, &b, &cert);
            assert!(v.ok(), "{g} {a} {b}: {:?}", v.failures);
        }
    }
}

#[test]
fn beyond_rejects_wrong_cardinality() {
    let z7 = z(7);
    assert!(beyond_classify(&z7, &s(&z7, &[0, 1]), &s(&z7, &[0, 1])).is_err());
}

#[test]
fn mutated_beyond_certificates_are_rejected() {
    let z9 = z(9);
    let (a, b) = (s(&z9, &[0, 1, 3]), s(&z9, &[1, 2, 4]));
    let m = kst_free_structured(&z9, &a, &b);
    let mut bad = m.clone();
    bad.types = vec![BeyondWitness::V];
    let cert = BeyondCertificate { group: z9.clone(), a, b, outcome: BeyondOutcome::Structured(bad) };
    assert!(!verify_beyond_certificate(&a, &b, &cert).ok());
    let cert = BeyondCertificate {
        outcome: BeyondOutcome::Extendible {
            alpha: GroupElement::from_index(8),
            beta: GroupElement::from_index(8),
            structured: None,
        },
        ..cert
    };
    assert!(!verify_beyond_certificate(&a, &b, &cert).ok());
}

#[test]
fn type_viii_distance_consequences() {
    let (g, a, b) = type_viii_example();
    let m = kst_free_structured(&g, &a, &b);
    let Some(BeyondWitness::VIII { h_d1, h_d2, .. }) = m.types.iter().find(|w| w.kind() == BeyondType::VIII) else {
        panic!("no type VIII");
    };
    let sum = g.set(g.sum_bits(a.bits(), b.bits()));
    let sets = [a, b, sum, g.complement(&a).unwrap(), g.complement(&b).unwrap(), g.complement(&sum).unwrap()];
    for h in [h_d1, h_d2] {
        for c in &sets {
            let qp = d_subset(&g, c, &FamilySpec::QuasiPeriodicBy(h.clone())).unwrap();
            let p = d_subset(&g, c, &FamilySpec::PeriodicBy(h.clone())).unwrap();
            assert_eq!(qp.value, Some(1), "{c} QP");
            assert_eq!(p.value, Some(2), "{c} P");
        }
    }
}

#[test]
fn dual_pairs_are_involutive() {
    let z8 = z(8);
    for (a, b) in pairs(&z8) {
        let sum = z8.sum_bits(a.bits(), b.bits());
        if sum == z8.full_bits() || !is_non_extendible_pair(&z8, a.bits(), b.bits()) {
            continue;
        }
        let d = dual_pairs(&z8, &a, &b).unwrap();
        let c = d.complement;
        let back = dual_pairs(&z8, &d.neg_b, &c).unwrap();
        // -(-B) = B and the complement of -B + C is A
        assert_eq!(back.neg_a, b);
        assert_eq!(back.complement, a);
        assert_eq!(back.excess, d.excess);
    }
}

#[test]
fn extension_witness_for_non_extendible_pairs_fills_both_sides() {
    for g in [z(7), z(8)] {
        for (a, b) in pairs(&g) {
            if g.sum_bits(a.bits(), b.bits()).len() != a.len() + b.len() || !is_non_extendible_pair(&g, a.bits(), b.bits()) {
                continue;
            }
            if let Some((x, y)) = find_extension(&g, a.bits(), b.bits()) {
                assert!(!a.bits().contains(x) && !b.bits().contains(y));
            }
        }
    }
}

