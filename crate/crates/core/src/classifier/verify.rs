//! Certificate checking. Everything here is recomputed from the group
//! operations and coset labels; nothing is shared with the search code.

use crate::bits::Bits;
use crate::group::{FiniteAbelianGroup, GroupSubset, Subgroup};

use super::beyond::{BeyondCertificate, BeyondOutcome, BeyondWitness, Side, StructuredMatch};
use super::kst::{KstCertificate, KstType, KstWitness};

/// Outcome of a certificate check, with a line per failed condition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub failures: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(what());
        }
    }

    fn nest(&mut self, prefix: &str, inner: Verification) {
        self.failures.extend(inner.failures.into_iter().map(|f| format!("{prefix}: {f}")));
    }
}

fn plus(g: &FiniteAbelianGroup, x: Bits, y: Bits) -> Bits {
    let mut out = Bits::EMPTY;
    for a in x.iter() {
        for b in y.iter() {
            out.insert(g.add_idx(a, b));
        }
    }
    out
}

fn shift(g: &FiniteAbelianGroup, x: Bits, t: usize) -> Bits {
    x.iter().map(|a| g.add_idx(a, t)).collect()
}

fn minus(g: &FiniteAbelianGroup, x: Bits) -> Bits {
    x.iter().map(|a| g.neg_idx(a)).collect()
}

/// Number of pairs `(a, b)` with `a + b = x`, for every `x`.
fn representation_counts(g: &FiniteAbelianGroup, x: Bits, y: Bits) -> Vec<usize> {
    let mut counts = vec![0; g.order()];
    for a in x.iter() {
        for b in y.iter() {
            counts[g.add_idx(a, b)] += 1;
        }
    }
    counts
}

fn unique_sums(g: &FiniteAbelianGroup, x: Bits, y: Bits) -> Vec<usize> {
    representation_counts(g, x, y)
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == 1)
        .map(|(i, _)| i)
        .collect()
}

fn is_periodic(g: &FiniteAbelianGroup, x: Bits) -> bool {
    (1..g.order()).any(|t| shift(g, x, t) == x)
}

fn coset_labels(h: &Subgroup, x: Bits) -> Vec<usize> {
    let mut ids: Vec<usize> = x.iter().map(|a| h.coset_id(a)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Coset-level sum counts of `(A, B)` modulo `H`: the number of coset
/// pairs landing in each coset, and the number of distinct sum cosets.
fn coset_sums(g: &FiniteAbelianGroup, h: &Subgroup, a: Bits, b: Bits) -> (Vec<usize>, usize, usize, usize) {
    let (ca, cb) = (coset_labels(h, a), coset_labels(h, b));
    let rep = |id: usize| h.coset_bits(id).min().unwrap();
    let mut counts = vec![0; h.coset_count()];
    for &x in &ca {
        for &y in &cb {
            counts[h.coset_id(g.add_idx(rep(x), rep(y)))] += 1;
        }
    }
    let distinct = counts.iter().filter(|&&c| c > 0).count();
    (counts, distinct, ca.len(), cb.len())
}

/// Whether `s` is `{x, x+d, ..., x+(|s|-1)d}` for some `x`, with distinct terms.
fn is_ap(g: &FiniteAbelianGroup, s: Bits, d: usize) -> bool {
    if d == 0 || s.is_empty() {
        return false;
    }
    s.iter().any(|x| {
        let mut t = x;
        let mut built = Bits::EMPTY;
        for _ in 0..s.len() {
            built.insert(t);
            t = g.add_idx(t, d);
        }
        built == s
    })
}

fn decomposition(
    v: &mut Verification,
    g: &FiniteAbelianGroup,
    h: &Subgroup,
    name: &str,
    whole: Bits,
    p1: Bits,
    p0: Bits,
) {
    v.check(p1.union(p0) == whole && p1.intersection(p0).is_empty(), || {
        format!("{name}1 and {name}0 do not partition {name}")
    });
    v.check(h.bits().iter().all(|t| shift(g, p1, t) == p1), || format!("{name}1 is not H-periodic"));
    v.check(!p0.is_empty(), || format!("{name}0 is empty"));
    v.check(coset_labels(h, p0).len() <= 1, || format!("{name}0 meets several H-cosets"));
}

/// The coset of `A0 + B0` has a single coset representation, and
/// `|φA+φB| - |φA| - |φB|` equals `excess`.
fn quotient_conditions(
    v: &mut Verification,
    g: &FiniteAbelianGroup,
    h: &Subgroup,
    (a, b, a0, b0): (Bits, Bits, Bits, Bits),
    excess: i64,
) {
    let (counts, distinct, na, nb) = coset_sums(g, h, a, b);
    if let (Some(x), Some(y)) = (a0.min(), b0.min()) {
        let c = h.coset_id(g.add_idx(x, y));
        v.check(counts[c] == 1, || format!("coset of A0+B0 has {} coset representations", counts[c]));
    }
    let got = distinct as i64 - na as i64 - nb as i64;
    v.check(got == excess, || format!("quotient sumset excess is {got}, expected {excess}"));
}

pub fn verify_kst_certificate(a: &GroupSubset, b: &GroupSubset, cert: &KstCertificate) -> Verification {
    let mut v = Verification::default();
    let g = &cert.group;
    let h = &cert.quasi_period;
    v.check(cert.a == *a && cert.b == *b, || "certificate is for a different pair".into());
    if g.owns(a).is_err() || g.owns(b).is_err() {
        return v;
    }
    let (ab, bb) = (a.bits(), b.bits());
    let (a1, a0, b1, b0) = (cert.a1.bits(), cert.a0.bits(), cert.b1.bits(), cert.b0.bits());
    v.check(!h.is_trivial() || g.is_trivial(), || "quasi-period is trivial".into());
    v.check(plus(g, ab, bb).len() + 1 == ab.len() + bb.len(), || "pair is not critical".into());
    decomposition(&mut v, g, h, "A", ab, a1, a0);
    decomposition(&mut v, g, h, "B", bb, b1, b0);
    if !v.ok() {
        return v;
    }
    quotient_conditions(&mut v, g, h, (ab, bb, a0, b0), -1);
    let counts = representation_counts(g, ab, bb);
    for x in a1.iter() {
        for y in bb.iter() {
            v.check(counts[g.add_idx(x, y)] != 1, || format!("{x}+{y} is a unique expression with {x} in A1"));
        }
    }
    for x in ab.iter() {
        for y in b1.iter() {
            v.check(counts[g.add_idx(x, y)] != 1, || format!("{x}+{y} is a unique expression with {y} in B1"));
        }
    }
    let s0 = plus(g, a0, b0);
    v.check(s0.len() + 1 == a0.len() + b0.len(), || {
        format!("|A0+B0| = {} but |A0|+|B0|-1 = {}", s0.len(), a0.len() + b0.len() - 1)
    });
    kst_type_conditions(&mut v, g, h, a0, b0, cert.kind, cert.witness);
    kst_recursion(&mut v, cert);
    v
}

fn kst_type_conditions(
    v: &mut Verification,
    g: &FiniteAbelianGroup,
    h: &Subgroup,
    a0: Bits,
    b0: Bits,
    kind: KstType,
    witness: KstWitness,
) {
    let singles = unique_sums(g, a0, b0);
    let coset = h.coset_bits(h.coset_id(a0.min().unwrap()));
    let holes = coset.difference(a0);
    match (kind, witness) {
        (KstType::I, KstWitness::Singleton) => {
            v.check(a0.len() == 1 || b0.len() == 1, || "type I needs a singleton part".into());
        }
        (KstType::II, KstWitness::Progression { d }) => {
            let d = d.index();
            v.check(a0.len() >= 2 && b0.len() >= 2, || "type II needs parts of size at least 2".into());
            v.check(is_ap(g, a0, d) && is_ap(g, b0, d), || format!("parts are not progressions with difference {d}"));
            v.check(g.order_idx(d) + 1 >= a0.len() + b0.len(), || format!("order of {d} is too small"));
            v.check(is_ap(g, plus(g, a0, b0), d), || "A0+B0 is not a progression".into());
            v.check(singles.len() == 2, || format!("type II has {} unique expression elements", singles.len()));
        }
        (KstType::III, KstWitness::UniqueElement { g0, g1 }) => {
            let (g0, g1) = (g0.index(), g1.index());
            v.check(a0.len() + b0.len() == h.order() + 1, || "type III needs |A0|+|B0| = |H|+1".into());
            v.check(singles == [g0], || format!("unique expression elements are {singles:?}, not [{g0}]"));
            v.check(a0.contains(g1), || "g1 is not in A0".into());
            let form = shift(g, minus(g, holes), g0).with(g.sub_idx(g0, g1));
            v.check(form == b0, || "B0 is not (g0 - ((g1+H) minus A0)) with g0 - g1".into());
        }
        (KstType::IV, KstWitness::PuncturedCoset { g0, g1 }) => {
            let (g0, g1) = (g0.index(), g1.index());
            v.check(!is_periodic(g, a0), || "type IV needs A0 aperiodic".into());
            v.check(singles.is_empty(), || "type IV has a unique expression element".into());
            v.check(coset.contains(g1), || "g1 is not in the coset of A0".into());
            v.check(shift(g, minus(g, holes), g0) == b0, || "B0 is not g0 - ((g1+H) minus A0)".into());
            let punctured = h.coset_bits(h.coset_id(g0)).without(g0);
            v.check(plus(g, a0, b0) == punctured, || "A0+B0 is not a punctured coset".into());
        }
        (kind, w) => v.failures.push(format!("type {kind} does not match witness {w:?}")),
    }
}

fn kst_recursion(v: &mut Verification, cert: &KstCertificate) {
    let g = &cert.group;
    let h = &cert.quasi_period;
    let chain = &cert.chain;
    v.check(chain.first().is_some_and(|k| k.is_trivial()), || "chain does not start at 0".into());
    v.check(chain.last().is_some_and(|k| k.order() == g.order()), || "chain does not end at G".into());
    v.check(chain.windows(2).all(|w| w[0].is_subgroup_of(&w[1]) && w[0].order() < w[1].order()), || {
        "chain is not strictly increasing".into()
    });
    if !g.is_trivial() {
        v.check(chain.get(1).is_some_and(|k| k.bits() == h.bits()), || "chain does not pass through H".into());
    }
    match &cert.recursion {
        None => v.check(h.order() == g.order(), || "proper quasi-period without a quotient certificate".into()),
        Some(rec) => {
            v.check(h.order() < g.order(), || "quotient certificate for the whole group".into());
            let Ok(q) = g.quotient_map(h) else {
                v.failures.push("quotient map unavailable".into());
                return;
            };
            v.check(rec.group.key() == q.target().key(), || "quotient certificate lives in the wrong group".into());
            let (pa, pb) = (q.push(&cert.a), q.push(&cert.b));
            let inner = verify_kst_certificate(&pa, &pb, rec);
            v.nest("quotient", inner);
            let lifted: Vec<Bits> = rec.chain.iter().map(|k| q.pull_bits(k.bits())).collect();
            let ours: Vec<Bits> = chain.iter().skip(1).map(|k| k.bits()).collect();
            v.check(lifted == ours, || "chain is not the pullback of the quotient chain".into());
        }
    }
}

pub fn verify_beyond_certificate(a: &GroupSubset, b: &GroupSubset, cert: &BeyondCertificate) -> Verification {
    let mut v = Verification::default();
    let g = &cert.group;
    v.check(cert.a == *a && cert.b == *b, || "certificate is for a different pair".into());
    if g.owns(a).is_err() || g.owns(b).is_err() {
        return v;
    }
    let (ab, bb) = (a.bits(), b.bits());
    let s = plus(g, ab, bb);
    v.check(s.len() == ab.len() + bb.len(), || "|A+B| differs from |A|+|B|".into());
    match &cert.outcome {
        BeyondOutcome::Extendible { alpha, beta, structured } => {
            let (a2, b2) = (ab.with(alpha.index()), bb.with(beta.index()));
            v.check(plus(g, a2, b2).len() + 1 == a2.len() + b2.len(), || {
                format!("adding {} and {} does not give a critical pair", alpha.index(), beta.index())
            });
            if let Some(m) = structured {
                let mut inner = Verification::default();
                structured_conditions(&mut inner, g, ab, bb, m);
                v.nest("auxiliary match", inner);
            }
        }
        BeyondOutcome::Structured(m) => {
            v.check(!is_periodic(g, s), || "structured outcome with periodic sumset".into());
            structured_conditions(&mut v, g, ab, bb, m);
        }
        BeyondOutcome::PeriodicBranch { quasi_period: h, quotient } => {
            v.check(!h.is_trivial(), || "periodic branch with trivial period".into());
            v.check(h.bits().iter().all(|t| shift(g, s, t) == s), || "A+B is not H-periodic".into());
            v.check(h.bits().iter().all(|t| shift(g, ab, t) == ab && shift(g, bb, t) == bb), || {
                "A or B is not H-periodic".into()
            });
            let (_, distinct, na, nb) = coset_sums(g, h, ab, bb);
            v.check(distinct == na + nb, || "quotient pair is not of excess zero".into());
            let Ok(q) = g.quotient_map(h) else {
                v.failures.push("quotient map unavailable".into());
                return v;
            };
            let t = q.target();
            v.check(!is_periodic(t, q.push_bits(s)), || "quotient sumset is periodic".into());
            v.check(quotient.group.key() == t.key(), || "quotient certificate lives in the wrong group".into());
            let inner = verify_beyond_certificate(&q.push(a), &q.push(b), quotient);
            v.nest("quotient", inner);
        }
    }
    v
}

fn structured_conditions(v: &mut Verification, g: &FiniteAbelianGroup, ab: Bits, bb: Bits, m: &StructuredMatch) {
    let h = &m.quasi_period;
    let (a1, a0, b1, b0) = (m.a1.bits(), m.a0.bits(), m.b1.bits(), m.b0.bits());
    v.check(!h.is_trivial(), || "quasi-period is trivial".into());
    decomposition(v, g, h, "A", ab, a1, a0);
    decomposition(v, g, h, "B", bb, b1, b0);
    if !v.ok() {
        return;
    }
    quotient_conditions(v, g, h, (ab, bb, a0, b0), -1);
    let s0 = plus(g, a0, b0);
    v.check(s0.len() == a0.len() + b0.len(), || "|A0+B0| differs from |A0|+|B0|".into());
    v.check(!m.types.is_empty(), || "no type recorded".into());
    for w in &m.types {
        beyond_type_conditions(v, g, h, a0, b0, w);
    }
}

fn beyond_type_conditions(v: &mut Verification, g: &FiniteAbelianGroup, h: &Subgroup, a0: Bits, b0: Bits, w: &BeyondWitness) {
    let s0 = plus(g, a0, b0);
    match w {
        BeyondWitness::V => {
            v.check(a0.len() == 2 || b0.len() == 2, || "type V needs a part of size 2".into());
            v.check(s0.len() + 2 <= h.order(), || "type V needs |A0+B0| <= |H|-2".into());
        }
        BeyondWitness::VI { b0: t } => {
            v.check(a0.len() == 3 && b0.len() == 3, || "type VI needs parts of size 3".into());
            v.check(shift(g, b0, t.index()) == a0, || "A0 is not a translate of B0".into());
            v.check(plus(g, a0, a0).len() > 5, || "type VI needs |2A0| > 5".into());
        }
        BeyondWitness::VII { side, a0: x, b0: y } => {
            let (three, other, pivot, offset) = match side {
                Side::A => (a0, b0, x.index(), y.index()),
                Side::B => (b0, a0, y.index(), x.index()),
            };
            v.check(three.len() == 3 && three.contains(pivot), || "type VII pivot is not in the size-3 part".into());
            let two = plus(g, three, three);
            v.check(two.len() > 5, || "type VII needs the doubled part to exceed 5".into());
            let comp = g.full_bits().difference(two);
            let core = shift(g, minus(g, comp), g.add_idx(pivot, pivot)).intersection(h.bits());
            v.check(shift(g, core, offset) == other, || "type VII form does not hold".into());
            v.check(s0.len() + 3 == h.order() && s0.len() >= 6, || "type VII needs |A0+B0| = |H|-3 >= 6".into());
        }
        BeyondWitness::VIII { klein, h_d1, h_d2, d, first_a, last_a, first_b, last_b } => {
            let kb = klein.bits();
            v.check(kb.len() == 4 && kb.iter().all(|x| g.add_idx(x, x) == 0) && kb.is_subset(h.bits()), || {
                "H_b is not a Klein subgroup of H".into()
            });
            for (name, sub) in [("H_d1", h_d1), ("H_d2", h_d2)] {
                v.check(sub.order() == 2 && sub.bits().is_subset(kb), || format!("{name} is not of order 2 in H_b"));
            }
            v.check(h_d1.bits() != h_d2.bits(), || "H_d1 equals H_d2".into());
            let d = d.index();
            let reach = (1..=g.order()).find(|&k| kb.contains(g.times(k, d))).unwrap_or(0);
            let coset = |x: usize| shift(g, kb, x);
            let mut check_side = |name: &str, part: Bits, first: usize, last: usize, other_len: usize| {
                let len = coset_labels(klein, part).len();
                v.check(len >= 2, || format!("{name}0 meets fewer than two H_b-cosets"));
                v.check(reach + 1 >= len + other_len, || "order of d modulo H_b is too small".into());
                let mut term = first;
                let mut covered = Bits::EMPTY;
                for i in 0..len {
                    let piece = part.intersection(coset(term));
                    covered = covered.union(piece);
                    if i == 0 {
                        v.check(piece == shift(g, h_d1.bits(), first), || format!("first piece of {name}0 is not an H_d1-coset"));
                    } else if i + 1 == len {
                        v.check(piece == shift(g, h_d2.bits(), last) && coset(term) == coset(last), || {
                            format!("last piece of {name}0 is not an H_d2-coset at the last term")
                        });
                    } else {
                        v.check(piece == coset(term), || format!("interior piece of {name}0 is not a full coset"));
                    }
                    term = g.add_idx(term, d);
                }
                v.check(covered == part, || format!("{name}0 is not a progression of H_b-cosets"));
            };
            let (la, lb) = (coset_labels(klein, a0).len(), coset_labels(klein, b0).len());
            check_side("A", a0, first_a.index(), last_a.index(), lb);
            check_side("B", b0, first_b.index(), last_b.index(), la);
        }
    }
}

trait Times {
    fn times(&self, k: usize, x: usize) -> usize;
}

impl Times for FiniteAbelianGroup {
    fn times(&self, k: usize, x: usize) -> usize {
        (0..k).fold(0, |acc, _| self.add_idx(acc, x))
    }
}
