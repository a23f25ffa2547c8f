//! Exhaustive checks of structural statements about small sumsets.
//!
//! Each statement counts the instances meeting its hypotheses and checks
//! the conclusion on every one of them. A statement with no qualifying
//! instance is reported as vacuous, never as passed. Hypotheses such as
//! non-extendibility or quasi-periodicity are always decided exactly; only
//! the instance space is ever sampled, and sampling is flagged.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::Config;
use super::enumerate::{enumerate, translation_canonical, EnumerationTask};
use super::record::Status;
use crate::bits::Bits;
use crate::bounds::{sidon_check, multiplicity_bounds, verify_graph_bijection};
use crate::classifier::{extension, find_extension, is_non_extendible_pair};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::structure::{c_d_bits, h_d_bits, is_quasi_periodic_bits, progression_with, qp_splits};
use crate::sumset::{d_subset, layers, nu_counts, progression_cover, stabilizer_bits, FamilySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Kneser,
    Kst,
    Beyond,
    Lemmas,
    Bounds,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "all" => Suite::All,
            "kneser" => Suite::Kneser,
            "kst" => Suite::Kst,
            "beyond" => Suite::Beyond,
            "lemmas" => Suite::Lemmas,
            "bounds" => Suite::Bounds,
            _ => {
                return Err(Error::Parse(format!(
                    "suite {s:?} is not one of all, kneser, kst, beyond, lemmas, bounds"
                )))
            }
        })
    }
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(usize)]
enum St {
    Kneser,
    Cover,
    Multiplicity,
    MultiplicityTransfer,
    LayerShift,
    Duality,
    Matching,
    QpFromGenerated,
    QpTransfer,
    GeneratedAgree,
    GeneratingTransfer,
    TwoCoset,
    PuncturedQp,
    ProgressionTransfer,
    TwoComponent,
    AlmostProgression,
    TripleMultiplicity,
    NearProgression,
    CriticalCoverage,
    BeyondCoverage,
    EdgeBijection,
    DifferenceBounds,
    SidonBound,
}

const COUNT: usize = St::SidonBound as usize + 1;

const TABLE: [(St, &str, &str); COUNT] = [
    (St::Kneser, "kneser", "the image of A+B modulo its period has size at least |φA|+|φB|-1"),
    (St::Cover, "cover", "|A|+|B| > |G| forces A+B = G"),
    (
        St::Multiplicity,
        "multiplicity",
        "|A+B| < |A|+|B|-r forces more than r representations everywhere on A+B",
    ),
    (
        St::MultiplicityTransfer,
        "multiplicity_transfer",
        "a lower bound t on representations in X+Y carries to (X+(i-1)Y, Y) on X+iY",
    ),
    (St::LayerShift, "layer_shift", "N_{i+1}^U - U lies in N_i^{<=U}"),
    (
        St::Duality,
        "nonextendible_duality",
        "A is non-extendible iff -B + complement(A+B) = complement(A); duals of non-extendible pairs are non-extendible",
    ),
    (
        St::Matching,
        "matching",
        "a set C met by every a+B and b+A has two disjoint representations, or everything has size 2",
    ),
    (
        St::QpFromGenerated,
        "qp_from_generated_subgroup",
        "a non-extendible B has a quasi-periodic decomposition with quasi-period <A>",
    ),
    (
        St::QpTransfer,
        "qp_transfer",
        "a quasi-periodic A with maximally periodic part transfers its quasi-period to B: critical quotient, A0+B0 in a coset represented once, |A0+B0| = |A0|+|B0|",
    ),
    (
        St::GeneratedAgree,
        "generated_subgroups_agree",
        "non-quasi-periodic non-extendible pairs have <A> = <B>",
    ),
    (
        St::GeneratingTransfer,
        "generating_transfer",
        "a generating non-quasi-periodic A makes B, A+B and its complement generating and non-quasi-periodic",
    ),
    (
        St::TwoCoset,
        "two_coset_remainder",
        "a periodic part plus two coset pieces puts all six sets at quasi-periodic distance 1 and extends",
    ),
    (
        St::PuncturedQp,
        "punctured_qp_transfer",
        "A at quasi-periodic distance 1 puts all six sets at distance 1 and extends",
    ),
    (
        St::ProgressionTransfer,
        "progression_transfer",
        "A a progression with difference d gives h_d(B) = 1, h_d(A+B) = h_d(complement) = 0 and extends",
    ),
    (
        St::TwoComponent,
        "two_component_transfer",
        "c_d(A) = 2 gives c_d(B), c_d(A+B) <= 2, or an extension with the six sets near quasi-periodic or B a progression",
    ),
    (
        St::AlmostProgression,
        "almost_progression_transfer",
        "A one hole from a progression extends, with h_d(B) <= 1, some h_d'(B) = 0 or all six sets near quasi-periodic",
    ),
    (
        St::TripleMultiplicity,
        "triple_multiplicity_bound",
        "|A| = 3 generating with every sum represented twice gives |B| >= |G| - C(m+4, 2)",
    ),
    (
        St::NearProgression,
        "near_progression_prime",
        "in Z/p, |B| >= 4 and |A+B| = |A|+|B| <= p-4 put A and B within one element of progressions with a common difference",
    ),
    (
        St::CriticalCoverage,
        "critical_pair_coverage",
        "every critical pair gets a verifying decomposition certificate",
    ),
    (
        St::BeyondCoverage,
        "equal_sum_coverage",
        "every pair with |A+B| = |A|+|B| extends, has a type V-VIII decomposition, or reduces periodically",
    ),
    (
        St::EdgeBijection,
        "edge_bijection",
        "M(A,B) and M(A,-B) have equally many edges; adjacent edges land in distinct components",
    ),
    (
        St::DifferenceBounds,
        "difference_multiplicity_bounds",
        "|A+B| and |T| meet the three lower bounds; M is even and nonnegative",
    ),
    (St::SidonBound, "sidon_bound", "a Sidon set S has |2S| >= |S|(|S|+1)/2"),
];

/// Outcome for one statement across all groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatementReport {
    pub name: &'static str,
    pub summary: &'static str,
    /// Instances meeting the hypotheses.
    pub hits: u64,
    pub failures: u64,
    pub vacuous: bool,
    /// Part of the instance space was sampled instead of enumerated.
    pub sampled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub groups: Vec<String>,
    pub statements: Vec<StatementReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.statements.iter().all(|s| s.failures == 0)
    }

    pub fn get(&self, name: &str) -> Option<&StatementReport> {
        self.statements.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "groups: {}", self.groups.join(" "))?;
        for s in &self.statements {
            let status = if s.failures > 0 {
                "FAIL"
            } else if s.vacuous {
                "VACUOUS"
            } else {
                "ok"
            };
            let sampled = if s.sampled { " (sampled)" } else { "" };
            writeln!(
                f,
                "{status:>7}  {:<30} hits={:<9} failures={}{sampled}",
                s.name, s.hits, s.failures
            )?;
            if let Some(msg) = &s.first_failure {
                writeln!(f, "         first failure: {msg}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    hits: u64,
    failures: u64,
    sampled: bool,
    first_failure: Option<String>,
}

#[derive(Clone, Debug)]
struct Tallies(Vec<Tally>);

impl Tallies {
    fn new() -> Tallies {
        Tallies(vec![Tally::default(); COUNT])
    }

    fn record(&mut self, st: St, ok: bool, what: impl FnOnce() -> String) {
        let t = &mut self.0[st as usize];
        t.hits += 1;
        if !ok {
            t.failures += 1;
            if t.first_failure.is_none() {
                t.first_failure = Some(what());
            }
        }
    }

    fn sampled(&mut self, st: St) {
        self.0[st as usize].sampled = true;
    }

    /// Earlier tallies keep their first failure.
    fn merge(mut self, other: Tallies) -> Tallies {
        for (t, o) in self.0.iter_mut().zip(other.0) {
            t.hits += o.hits;
            t.failures += o.failures;
            t.sampled |= o.sampled;
            if t.first_failure.is_none() {
                t.first_failure = o.first_failure;
            }
        }
        self
    }
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, with_zero: bool) -> Bits {
    loop {
        let s = Bits(rng.random::<u128>() & full_mask(n));
        let s = if with_zero { s.with(0) } else { s };
        if !s.is_empty() {
            return s;
        }
    }
}

/// Runs `check` on every pair from `sides` (or on samples when there are
/// too many), splitting the work by the first set.
fn over_pairs<F>(
    g: &FiniteAbelianGroup,
    config: &Config,
    with_zero: bool,
    sampled_flags: &[St],
    check: F,
) -> Tallies
where
    F: Fn(Bits, Bits, &mut Tallies) + Sync,
{
    let n = g.order();
    let free = if with_zero { n - 1 } else { n };
    let exhaustive = n <= config.suite_max_order && 2 * free < 64 && (1u64 << (2 * free)) <= config.max_pairs;
    if exhaustive {
        let side: Vec<Bits> = (0..1u128 << free)
            .map(|m| if with_zero { Bits(m << 1 | 1) } else { Bits(m) })
            .filter(|s| !s.is_empty())
            .collect();
        let parts: Vec<Tallies> = side
            .par_iter()
            .map(|&a| {
                let mut t = Tallies::new();
                for &b in &side {
                    check(a, b, &mut t);
                }
                t
            })
            .collect();
        parts.into_iter().fold(Tallies::new(), Tallies::merge)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ n as u64);
        let pairs: Vec<(Bits, Bits)> = (0..config.samples)
            .map(|_| (random_set(&mut rng, n, with_zero), random_set(&mut rng, n, with_zero)))
            .collect();
        let parts: Vec<Tallies> = pairs
            .par_chunks(256)
            .map(|chunk| {
                let mut t = Tallies::new();
                for &(a, b) in chunk {
                    check(a, b, &mut t);
                }
                t
            })
            .collect();
        let mut t = parts.into_iter().fold(Tallies::new(), Tallies::merge);
        for &st in sampled_flags {
            t.sampled(st);
        }
        t
    }
}

fn show(g: &FiniteAbelianGroup, a: Bits, b: Bits) -> String {
    format!("{g} A={} B={}", g.set(a), g.set(b))
}

fn generated(g: &FiniteAbelianGroup, s: Bits) -> Bits {
    g.subgroup_generated(&g.set(s)).expect("own subset").bits()
}

fn distance(g: &FiniteAbelianGroup, s: Bits, family: &FamilySpec) -> Option<usize> {
    if s.is_empty() {
        return None;
    }
    d_subset(g, &g.set(s), family).expect("own subset").value
}

/// Facts about one pair, computed on first use.
struct Facts<'g> {
    g: &'g FiniteAbelianGroup,
    a: Bits,
    b: Bits,
    s: Bits,
    comp: Bits,
    excess: i64,
    aperiodic: bool,
    non_extendible: OnceCell<bool>,
    a_qp: OnceCell<bool>,
    generating_a: OnceCell<bool>,
    far_from_periodic: OnceCell<bool>,
    extends: OnceCell<bool>,
    six_near_qp: OnceCell<bool>,
}

impl<'g> Facts<'g> {
    fn new(g: &'g FiniteAbelianGroup, a: Bits, b: Bits) -> Facts<'g> {
        let s = g.sum_bits(a, b);
        Facts {
            g,
            a,
            b,
            s,
            comp: g.complement_bits(s),
            excess: s.len() as i64 - a.len() as i64 - b.len() as i64,
            aperiodic: stabilizer_bits(g, s).len() == 1,
            non_extendible: OnceCell::new(),
            a_qp: OnceCell::new(),
            generating_a: OnceCell::new(),
            far_from_periodic: OnceCell::new(),
            extends: OnceCell::new(),
            six_near_qp: OnceCell::new(),
        }
    }

    fn non_extendible(&self) -> bool {
        *self.non_extendible.get_or_init(|| is_non_extendible_pair(self.g, self.a, self.b))
    }

    fn a_qp(&self) -> bool {
        *self.a_qp.get_or_init(|| is_quasi_periodic_bits(self.g, self.a))
    }

    fn generating_a(&self) -> bool {
        *self.generating_a.get_or_init(|| generated(self.g, self.a) == self.g.full_bits())
    }

    /// `d(A+B, periodic) >= 3`.
    fn far_from_periodic(&self) -> bool {
        *self
            .far_from_periodic
            .get_or_init(|| distance(self.g, self.s, &FamilySpec::Periodic).is_none_or(|d| d >= 3))
    }

    /// Adding one element to each side gives a critical pair.
    fn extends(&self) -> bool {
        *self.extends.get_or_init(|| find_extension(self.g, self.a, self.b).is_some())
    }

    fn six(&self) -> [Bits; 6] {
        let g = self.g;
        [self.a, self.b, self.s, g.complement_bits(self.a), g.complement_bits(self.b), self.comp]
    }

    /// Every one of the six sets is at quasi-periodic distance exactly 1.
    fn six_near_qp(&self) -> bool {
        *self.six_near_qp.get_or_init(|| {
            self.six()
                .iter()
                .all(|&c| distance(self.g, c, &FamilySpec::QuasiPeriodic) == Some(1))
        })
    }

    fn show(&self) -> String {
        show(self.g, self.a, self.b)
    }
}

fn kneser(g: &FiniteAbelianGroup, a: Bits, b: Bits, t: &mut Tallies) {
    let s = g.sum_bits(a, b);
    let h = g.subgroup_of_bits(stabilizer_bits(g, s));
    // |φ(A+B)| >= |φA| + |φB| - 1, scaled by |H|
    let ok = s.len() + h.order() >= h.saturate(a).len() + h.saturate(b).len();
    t.record(St::Kneser, ok, || show(g, a, b));
}

fn props(f: &Facts, t: &mut Tallies) {
    let (g, a, b, s) = (f.g, f.a, f.b, f.s);
    let n = g.order();
    if a.len() + b.len() > n {
        t.record(St::Cover, s.len() == n, || f.show());
    }
    let counts = nu_counts(g, a, b);
    let least = s.iter().map(|x| counts[x]).min().unwrap_or(0) as i64;
    let r = a.len() as i64 + b.len() as i64 - s.len() as i64 - 1;
    if r >= 1 {
        t.record(St::Multiplicity, least > r, || f.show());
    }
    if least >= 2 {
        let mut ok = true;
        let mut x = a;
        for _ in 2..=3 {
            x = g.sum_bits(x, b);
            let c = nu_counts(g, x, b);
            ok &= g.sum_bits(x, b).iter().all(|z| c[z] as i64 >= least);
        }
        t.record(St::MultiplicityTransfer, ok, || f.show());
    }
    let lay = layers(g, &g.set(a), &g.set(b), n).expect("0 lies in both sets");
    if lay.classes.len() > 2 && lay.classes[2..].iter().any(|c| !c.is_empty()) {
        let mut ok = true;
        for i in 1..lay.classes.len() - 1 {
            for (u, ni) in &lay.classes[i + 1] {
                let shifted = g.sum_bits(ni.bits(), g.neg_bits(u.bits()));
                ok &= shifted.is_subset(lay.below(i, u).bits());
            }
        }
        t.record(St::LayerShift, ok, || f.show());
    }
    if !f.comp.is_empty() {
        let half_a = g.sum_bits(g.neg_bits(b), f.comp);
        let half_b = g.sum_bits(g.neg_bits(a), f.comp);
        let non_a = extension(g, a, b).is_none();
        let non_b = extension(g, b, a).is_none();
        let mut ok = non_a == (half_a == g.complement_bits(a)) && non_b == (half_b == g.complement_bits(b));
        if non_a && non_b {
            ok &= is_non_extendible_pair(g, g.neg_bits(a), f.comp) && is_non_extendible_pair(g, g.neg_bits(b), f.comp);
        }
        t.record(St::Duality, ok, || f.show());
    }
}

/// `A = A' ∪ A2 ∪ A1` with `A'` nonempty of maximal period `H` and each
/// `Ai` inside one `H`-coset.
fn periodic_plus_two_cosets(g: &FiniteAbelianGroup, a: Bits) -> bool {
    g.all_subgroups().iter().filter(|h| !h.is_trivial()).any(|h| {
        let met = h.cosets_met(a);
        let (full, partial): (Vec<usize>, Vec<usize>) =
            met.iter().partition(|&&c| h.coset_bits(c).is_subset(a));
        if partial.len() > 2 {
            return false;
        }
        let spare = 2 - partial.len();
        // move up to `spare` full cosets out of A'
        let k = full.len();
        (0u32..1 << k).any(|out| {
            if out.count_ones() as usize > spare || out.count_ones() as usize == k {
                return false;
            }
            let kept: Bits = full
                .iter()
                .enumerate()
                .filter(|(i, _)| out >> i & 1 == 0)
                .fold(Bits::EMPTY, |acc, (_, &c)| acc.union(h.coset_bits(c)));
            stabilizer_bits(g, kept) == h.bits()
        })
    })
}

fn lemmas(f: &Facts, t: &mut Tallies) {
    let g = f.g;
    let (a, b, s, comp) = (f.a, f.b, f.s, f.comp);
    let n = g.order();
    let full = g.full_bits();

    if a.len() == 3 {
        let counts = nu_counts(g, a, b);
        if f.generating_a() && s.iter().all(|x| counts[x] >= 2) {
            let k = (f.excess + 4).max(0) as usize;
            let bound = n as i64 - (k * k.saturating_sub(1) / 2) as i64;
            t.record(St::TripleMultiplicity, b.len() as i64 >= bound, || f.show());
        }
    }

    if f.excess != 0 {
        return;
    }

    if g.is_cyclic() && is_prime(n) && a.len() >= b.len() && b.len() >= 4 && s.len() + 4 <= n {
        let ok = (1..n).any(|d| {
            progression_cover(g, a, d).is_some_and(|c| c.0 <= 1) && progression_cover(g, b, d).is_some_and(|c| c.0 <= 1)
        });
        t.record(St::NearProgression, ok, || f.show());
    }

    if !f.aperiodic {
        return;
    }

    if a.len() >= 3 && extension(g, b, a).is_none() {
        let h = g.subgroup_of_bits(generated(g, a));
        t.record(St::QpFromGenerated, !qp_splits(b, &h).is_empty(), || f.show());
    }

    for d in 1..n {
        if a.len() >= 3 && progression_with(g, a, d).is_some() {
            let ok =
                h_d_bits(g, b, d) == 1 && h_d_bits(g, s, d) == 0 && h_d_bits(g, comp, d) == 0 && f.extends();
            t.record(St::ProgressionTransfer, ok, || format!("{} d={d}", f.show()));
        }
    }

    if !f.non_extendible() {
        return;
    }

    for h in g.all_subgroups().iter().filter(|h| !h.is_trivial()) {
        for (a1, a0) in qp_splits(a, h) {
            if a1.is_empty() || a0.is_empty() || stabilizer_bits(g, a1) != h.bits() {
                continue;
            }
            let q = g.quotient_map(h).expect("own subgroup");
            let tq = q.target();
            let (pa, pb) = (q.push_bits(a), q.push_bits(b));
            let counts = nu_counts(tq, pa, pb);
            let critical = tq.sum_bits(pa, pb).len() + 1 == pa.len() + pb.len();
            let ok = qp_splits(b, h).into_iter().any(|(_, b0)| {
                !b0.is_empty()
                    && critical
                    && counts[tq.add_idx(q.map_idx(a0.min().unwrap()), q.map_idx(b0.min().unwrap()))] == 1
                    && g.sum_bits(a0, b0).len() == a0.len() + b0.len()
            });
            t.record(St::QpTransfer, ok, || format!("{} H={}", f.show(), h.carrier()));
        }
    }

    if a.len() >= 3 && b.len() >= 3 && !f.a_qp() && !is_quasi_periodic_bits(g, b) {
        t.record(St::GeneratedAgree, generated(g, a) == generated(g, b), || f.show());
    }

    if a.len() < 3 || b.len() < 3 || !f.generating_a() {
        return;
    }

    if comp.len() >= 3 && !f.a_qp() {
        let ok = !is_quasi_periodic_bits(g, b)
            && generated(g, b) == full
            && !is_quasi_periodic_bits(g, s)
            && !is_quasi_periodic_bits(g, comp)
            && comp
                .iter()
                .all(|gamma| generated(g, g.translate_bits(comp, g.neg_idx(gamma))) == full);
        t.record(St::GeneratingTransfer, ok, || f.show());
    }

    if !f.far_from_periodic() {
        return;
    }

    if !f.a_qp() && periodic_plus_two_cosets(g, a) {
        t.record(St::TwoCoset, f.six_near_qp() && f.extends(), || f.show());
    }

    if (a.len() >= 4 || b.len() >= 4) && distance(g, a, &FamilySpec::QuasiPeriodic) == Some(1) {
        t.record(St::PuncturedQp, f.six_near_qp() && f.extends(), || f.show());
    }

    if f.a_qp() {
        return;
    }

    if a.len() >= 4 {
        for d in 1..n {
            if c_d_bits(g, a, d) != 2 {
                continue;
            }
            let small = c_d_bits(g, b, d) <= 2 && c_d_bits(g, s, d) <= 2;
            let ok = small
                || (f.extends() && (f.six_near_qp() || distance(g, b, &FamilySpec::Progression) == Some(0)));
            t.record(St::TwoComponent, ok, || format!("{} d={d}", f.show()));
        }
    }

    let threes = [a.len(), b.len(), comp.len()].iter().filter(|&&x| x == 3).count();
    if threes <= 1 {
        for d in 1..n {
            if progression_cover(g, a, d).is_none_or(|c| c.0 != 1) {
                continue;
            }
            let ok = f.extends()
                && (h_d_bits(g, b, d) <= 1 || (1..n).any(|e| h_d_bits(g, b, e) == 0) || f.six_near_qp());
            t.record(St::AlmostProgression, ok, || format!("{} d={d}", f.show()));
        }
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

const PROP_STATEMENTS: [St; 5] = [St::Cover, St::Multiplicity, St::MultiplicityTransfer, St::LayerShift, St::Duality];
const LEMMA_STATEMENTS: [St; 11] = [
    St::QpFromGenerated,
    St::QpTransfer,
    St::GeneratedAgree,
    St::GeneratingTransfer,
    St::TwoCoset,
    St::PuncturedQp,
    St::ProgressionTransfer,
    St::TwoComponent,
    St::AlmostProgression,
    St::TripleMultiplicity,
    St::NearProgression,
];

/// Sets `C ⊆ A+B` of size at least 2 met by every `a+B` and `b+A`, on
/// translation classes of pairs. Large sumsets have their subsets sampled.
fn matching(g: &FiniteAbelianGroup, config: &Config) -> Tallies {
    let n = g.order();
    let side: Vec<Bits> = (1..=full_mask(n))
        .map(Bits)
        .filter(|&s| s.len() >= 2 && s.contains(0) && translation_canonical(g, s) == s)
        .collect();
    let parts: Vec<Tallies> = side
        .par_iter()
        .map(|&a| {
            let mut t = Tallies::new();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ a.0 as u64);
            for &b in &side {
                let s = g.sum_bits(a, b);
                let elems = s.to_vec();
                let subsets: Vec<u64> = if elems.len() <= 10 {
                    (0..1u64 << elems.len()).collect()
                } else {
                    t.sampled(St::Matching);
                    (0..256).map(|_| rng.random::<u64>() & ((1u64 << elems.len()) - 1)).collect()
                };
                for m in subsets {
                    let c: Bits = elems
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| m >> i & 1 == 1)
                        .map(|(_, &x)| x)
                        .collect();
                    if c.len() < 2 {
                        continue;
                    }
                    let met = a.iter().all(|x| !g.translate_bits(b, x).intersection(c).is_empty())
                        && b.iter().all(|y| !g.translate_bits(a, y).intersection(c).is_empty());
                    if !met {
                        continue;
                    }
                    t.record(St::Matching, matching_conclusion(g, a, b, c), || {
                        format!("{} C={}", show(g, a, b), g.set(c))
                    });
                }
            }
            t
        })
        .collect();
    parts.into_iter().fold(Tallies::new(), Tallies::merge)
}

fn matching_conclusion(g: &FiniteAbelianGroup, a: Bits, b: Bits, c: Bits) -> bool {
    let reps: Vec<(usize, usize, usize)> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| (x, y, g.add_idx(x, y))))
        .filter(|r| c.contains(r.2))
        .collect();
    let disjoint = reps.iter().enumerate().any(|(i, p)| {
        reps[i + 1..]
            .iter()
            .any(|q| p.0 != q.0 && p.1 != q.1 && p.2 != q.2)
    });
    if disjoint {
        return true;
    }
    a.len() == 2
        && b.len() == 2
        && c.len() == 2
        && a.iter().any(|x| {
            b.iter()
                .any(|y| g.translate_bits(b, x) == c && g.translate_bits(a, y) == c)
        })
}

fn coverage(g: &FiniteAbelianGroup, config: &Config, r: i64, st: St) -> Result<Tallies> {
    let task = EnumerationTask::new(g.clone()).with_r(r).with_parallelism(config.parallelism);
    let mut t = Tallies::new();
    for rec in enumerate(&task, config)? {
        t.record(st, rec.verification == Status::Pass, || {
            format!("{} A={:?} B={:?}: {:?}", rec.group, rec.a, rec.b, rec.failures)
        });
    }
    Ok(t)
}

fn edge_bijection(g: &FiniteAbelianGroup, a: Bits, b: Bits, t: &mut Tallies) {
    let report = verify_graph_bijection(g, &g.set(a), &g.set(b)).expect("nonempty pair");
    t.record(St::EdgeBijection, report.holds(), || show(g, a, b));
}

fn difference_bounds(g: &FiniteAbelianGroup, config: &Config) -> Tallies {
    let mut t = Tallies::new();
    t.sampled(St::DifferenceBounds);
    let n = g.order();
    if n < 3 {
        return t;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(n as u64));
    let mut done = 0;
    let mut tries = 0;
    while done < config.samples && tries < 50 * config.samples {
        tries += 1;
        let (mut a, mut b) = (random_set(&mut rng, n, false), random_set(&mut rng, n, false));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        if b.len() < 2 {
            continue;
        }
        let k = rng.random_range(1..b.len());
        let diff = nu_counts(g, a, g.neg_bits(b));
        let tset: Bits = (0..n).filter(|&x| diff[x] as usize > k).collect();
        if tset.len() > a.len() {
            continue;
        }
        done += 1;
        let p = match multiplicity_bounds(g, &g.set(a), &g.set(b), &g.set(tset), k) {
            Ok(p) => p,
            Err(e) => {
                t.record(St::DifferenceBounds, false, || format!("{} k={k}: {e}", show(g, a, b)));
                continue;
            }
        };
        let sum = num_rational::Ratio::from_integer(p.actual_sumset as i128);
        let tt = num_rational::Ratio::from_integer(p.actual_t as i128);
        let ok = p.sumset_bounds.iter().all(|x| sum >= *x)
            && sum >= p.sumset_floor_bound
            && p.exceptional_bounds.iter().all(|x| tt >= *x)
            && p.m >= 0
            && p.m % 2 == 0;
        t.record(St::DifferenceBounds, ok, || format!("{} k={k}", show(g, a, b)));
    }
    t
}

fn sidon(g: &FiniteAbelianGroup) -> Tallies {
    let mut t = Tallies::new();
    let n = g.order().min(20);
    if n < g.order() {
        t.sampled(St::SidonBound);
    }
    for m in 0..1u128 << (n - 1) {
        let s = Bits(m << 1 | 1);
        if s.len() < 2 {
            continue;
        }
        match sidon_check(g, &g.set(s)) {
            Ok(r) if !r.is_sidon => {}
            Ok(r) => t.record(St::SidonBound, r.doubling >= r.lower_bound, || g.set(s).to_string()),
            Err(e) => t.record(St::SidonBound, false, || format!("{}: {e}", g.set(s))),
        }
    }
    t
}

/// Pairs in `Z/p` with `|A| >= |B| > 1` and `|A+B| = |A|+|B| <= p-4`,
/// up to translation, with no common difference `d` putting both within
/// one element of a progression. The known result also needs `|B| >= 4`;
/// counterexamples meeting that are counted separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearProgressionReport {
    pub p: usize,
    pub pairs_checked: u64,
    /// Candidates for manual review, as `(A, B)`.
    pub counterexamples: Vec<(Vec<usize>, Vec<usize>)>,
    /// Counterexamples with `|B| >= 4`.
    pub with_large_b: usize,
}

pub fn near_progression_check(p: u32) -> Result<NearProgressionReport> {
    let g = FiniteAbelianGroup::cyclic(p)?;
    let n = g.order();
    if !is_prime(n) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if n > 24 {
        return Err(Error::Resource(format!("Z/{p} is too large to enumerate")));
    }
    let limit = n.saturating_sub(4);
    let side: Vec<Bits> = (0..1u128 << (n - 1))
        .map(|m| Bits(m << 1 | 1))
        .filter(|&s| s.len() >= 2 && s.len() < limit && translation_canonical(&g, s) == s)
        .collect();
    let parts: Vec<(u64, Vec<(Vec<usize>, Vec<usize>)>)> = side
        .par_iter()
        .map(|&a| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for &b in side.iter().filter(|b| b.len() <= a.len() && a.len() + b.len() <= limit) {
                if g.sum_bits(a, b).len() != a.len() + b.len() {
                    continue;
                }
                checked += 1;
                let ok = (1..n).any(|d| {
                    progression_cover(&g, a, d).is_some_and(|c| c.0 <= 1)
                        && progression_cover(&g, b, d).is_some_and(|c| c.0 <= 1)
                });
                if !ok {
                    bad.push((a.to_vec(), b.to_vec()));
                }
            }
            (checked, bad)
        })
        .collect();
    Ok(NearProgressionReport {
        p: n,
        pairs_checked: parts.iter().map(|x| x.0).sum(),
        with_large_b: parts.iter().flat_map(|x| &x.1).filter(|c| c.1.len() >= 4).count(),
        counterexamples: parts.into_iter().flat_map(|x| x.1).collect(),
    })
}

/// Checks the selected statements on every listed group. Failures are
/// reported, not raised; errors come only from enumeration budgets.
pub fn verify_suite(groups: &[FiniteAbelianGroup], suite: Suite, config: &Config) -> Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let mut selected: Vec<St> = Vec::new();
    let mut total = Tallies::new();
    for g in groups {
        let t = pool.install(|| run_group(g, suite, config, &mut selected))?;
        total = total.merge(t);
    }
    let statements = TABLE
        .iter()
        .filter(|(st, _, _)| selected.contains(st))
        .map(|&(st, name, summary)| {
            let t = &total.0[st as usize];
            StatementReport {
                name,
                summary,
                hits: t.hits,
                failures: t.failures,
                vacuous: t.hits == 0,
                sampled: t.sampled,
                first_failure: t.first_failure.clone(),
            }
        })
        .collect();
    Ok(SuiteReport {
        groups: groups.iter().map(|g| g.to_string()).collect(),
        statements,
    })
}

fn run_group(g: &FiniteAbelianGroup, suite: Suite, config: &Config, selected: &mut Vec<St>) -> Result<Tallies> {
    let mut select = |sts: &[St]| {
        for &st in sts {
            if !selected.contains(&st) {
                selected.push(st);
            }
        }
    };
    let mut t = Tallies::new();
    if suite.includes(Suite::Kneser) {
        select(&[St::Kneser]);
        t = t.merge(over_pairs(g, config, false, &[St::Kneser], |a, b, t| kneser(g, a, b, t)));
    }
    if suite.includes(Suite::Kst) {
        select(&[St::CriticalCoverage]);
        t = t.merge(coverage(g, config, -1, St::CriticalCoverage)?);
    }
    if suite.includes(Suite::Beyond) {
        select(&[St::BeyondCoverage]);
        t = t.merge(coverage(g, config, 0, St::BeyondCoverage)?);
    }
    if suite.includes(Suite::Lemmas) {
        select(&PROP_STATEMENTS);
        select(&[St::Matching]);
        select(&LEMMA_STATEMENTS);
        let flags: Vec<St> = PROP_STATEMENTS.iter().chain(&LEMMA_STATEMENTS).copied().collect();
        t = t.merge(over_pairs(g, config, true, &flags, |a, b, t| {
            let f = Facts::new(g, a, b);
            props(&f, t);
            lemmas(&f, t);
        }));
        if g.order() <= config.suite_max_order {
            t = t.merge(matching(g, config));
        }
    }
    if suite.includes(Suite::Bounds) {
        select(&[St::EdgeBijection, St::DifferenceBounds, St::SidonBound]);
        t = t.merge(over_pairs(g, config, false, &[St::EdgeBijection], |a, b, t| {
            edge_bijection(g, a, b, t)
        }));
        t = t.merge(difference_bounds(g, config));
        t = t.merge(sidon(g));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn quick() -> Config {
        Config {
            samples: 300,
            ..Config::default()
        }
    }

    #[test]
    fn triple_bound_on_z7() {
        let r = verify_suite(&[z(7)], Suite::Lemmas, &quick()).unwrap();
        let s = r.get("triple_multiplicity_bound").unwrap();
        assert!(s.hits > 0 && s.failures == 0, "{r}");
    }

    #[test]
    fn progression_transfer_on_z8() {
        let r = verify_suite(&[z(8)], Suite::Lemmas, &quick()).unwrap();
        let s = r.get("progression_transfer").unwrap();
        assert!(s.hits > 0 && s.failures == 0, "{r}");
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn kneser_on_z9() {
        let r = verify_suite(&[z(9)], Suite::Kneser, &quick()).unwrap();
        let s = r.get("kneser").unwrap();
        assert_eq!(s.hits, (511 * 511) as u64);
        assert_eq!(s.failures, 0);
        assert!(!s.sampled);
    }

    #[test]
    fn matching_conclusions() {
        let g = z(7);
        // (0,0) and (1,1) land on distinct elements of C
        assert!(matching_conclusion(&g, Bits(0b11), Bits(0b11), Bits(0b101)));
        // only the size-2 alternative: 1+B = 1+A = C
        assert!(matching_conclusion(&g, Bits(0b11), Bits(0b11), Bits(0b110)));
        assert!(!matching_conclusion(&g, Bits(0b111), Bits(0b11), Bits(0b11)));
    }

    #[test]
    fn large_groups_are_sampled_and_flagged() {
        let config = Config {
            suite_max_order: 6,
            samples: 200,
            ..Config::default()
        };
        let r = verify_suite(&[z(8)], Suite::Kneser, &config).unwrap();
        let s = r.get("kneser").unwrap();
        assert!(s.sampled);
        assert_eq!(s.hits, 200);
    }

    #[test]
    fn two_element_pairs_break_the_near_progression_claim() {
        // {0,1} is near a progression only for d in {1,5,6,10}, {0,3} only for d in {3,4,7,8}
        let r = near_progression_check(11).unwrap();
        assert!(r.counterexamples.contains(&(vec![0, 1], vec![0, 3])));
        assert_eq!(r.with_large_b, 0);
        assert!(near_progression_check(5).unwrap().counterexamples.is_empty());
        assert!(near_progression_check(9).is_err());
    }
}
