use std::time::Instant;

use serde::Serialize;

use crate::classifier::{
    beyond_classify, kst_classify, kst_periodic_reduce, verify_beyond_certificate, verify_kst_certificate,
    BeyondCertificate, BeyondOutcome, BeyondWitness, KstCertificate, KstWitness, PeriodicReduction, Side,
    StructuredMatch, Verification,
};
use crate::error::Result;
use crate::group::{FiniteAbelianGroup, GroupSubset, Subgroup};
use crate::sumset::stabilizer_bits;

/// One enumerated pair with its classification. Field order is the JSON
/// key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub group: String,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub sumset_size: usize,
    /// `|A+B| - |A| - |B|`.
    pub r: i64,
    pub outcome: Outcome,
    pub verification: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

impl PairRecord {
    /// Key for summary tables: the outermost type, `"extendible"`, `"periodic"`,
    /// `"none"` or `"error"`.
    pub fn type_label(&self) -> String {
        match &self.outcome {
            Outcome::Kst { certificate, .. } => certificate.kind.clone(),
            Outcome::KstPeriodic { .. } => "periodic".into(),
            Outcome::Beyond(v) => v.label.clone(),
            Outcome::Unclassified => "none".into(),
            Outcome::Error { .. } => "error".into(),
        }
    }

    /// The KST type chain, or the equal-sum label followed by any
    /// simultaneous type V-VIII matches.
    pub fn matched_types(&self) -> Vec<String> {
        match &self.outcome {
            Outcome::Kst { type_chain, .. } => type_chain.clone(),
            Outcome::Beyond(v) => {
                let mut out = vec![v.label.clone()];
                for w in v.structured.iter().flat_map(|s| &s.witnesses) {
                    let name = w.name().to_string();
                    if !out.contains(&name) {
                        out.push(name);
                    }
                }
                out
            }
            _ => vec![self.type_label()],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to verify: the pair is outside the classified range.
    None,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Kst {
        type_chain: Vec<String>,
        certificate: CertificateView,
    },
    KstPeriodic {
        quasi_period: Vec<usize>,
        hole_count: usize,
        holes_unconstrained: bool,
        quotient_group: String,
        quotient_a: Vec<usize>,
        quotient_b: Vec<usize>,
        certificate: CertificateView,
    },
    Beyond(BeyondView),
    Unclassified,
    Error {
        message: String,
    },
}

/// Serializable form of a decomposition certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateView {
    pub group: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub quasi_period: Vec<usize>,
    #[serde(rename = "A1")]
    pub a1: Vec<usize>,
    #[serde(rename = "A0")]
    pub a0: Vec<usize>,
    #[serde(rename = "B1")]
    pub b1: Vec<usize>,
    #[serde(rename = "B0")]
    pub b0: Vec<usize>,
    pub witnesses: Vec<WitnessView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recursion: Option<Box<CertificateView>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum WitnessView {
    Singleton,
    Progression { d: usize },
    UniqueElement { g0: usize, g1: usize },
    PuncturedCoset { g0: usize, g1: usize },
    V,
    VI { b0: usize },
    VII { side: Side, a0: usize, b0: usize },
    VIII {
        klein: Vec<usize>,
        h_d1: Vec<usize>,
        h_d2: Vec<usize>,
        d: usize,
        first_a: usize,
        last_a: usize,
        first_b: usize,
        last_b: usize,
    },
}

impl WitnessView {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessView::Singleton => "singleton",
            WitnessView::Progression { .. } => "progression",
            WitnessView::UniqueElement { .. } => "unique_element",
            WitnessView::PuncturedCoset { .. } => "punctured_coset",
            WitnessView::V => "V",
            WitnessView::VI { .. } => "VI",
            WitnessView::VII { .. } => "VII",
            WitnessView::VIII { .. } => "VIII",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeyondView {
    pub group: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structured: Option<CertificateView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_period: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Box<BeyondView>>,
}

fn idx(s: &GroupSubset) -> Vec<usize> {
    s.indices()
}

fn sub(h: &Subgroup) -> Vec<usize> {
    h.carrier().indices()
}

impl From<&KstCertificate> for CertificateView {
    fn from(c: &KstCertificate) -> Self {
        let w = match c.witness {
            KstWitness::Singleton => WitnessView::Singleton,
            KstWitness::Progression { d } => WitnessView::Progression { d: d.index() },
            KstWitness::UniqueElement { g0, g1 } => WitnessView::UniqueElement {
                g0: g0.index(),
                g1: g1.index(),
            },
            KstWitness::PuncturedCoset { g0, g1 } => WitnessView::PuncturedCoset {
                g0: g0.index(),
                g1: g1.index(),
            },
        };
        CertificateView {
            group: c.group.to_string(),
            kind: c.kind.to_string(),
            quasi_period: sub(&c.quasi_period),
            a1: idx(&c.a1),
            a0: idx(&c.a0),
            b1: idx(&c.b1),
            b0: idx(&c.b0),
            witnesses: vec![w],
            recursion: c.recursion.as_deref().map(|r| Box::new(r.into())),
        }
    }
}

fn structured_view(g: &FiniteAbelianGroup, m: &StructuredMatch) -> CertificateView {
    let witnesses = m
        .types
        .iter()
        .map(|w| match w {
            BeyondWitness::V => WitnessView::V,
            BeyondWitness::VI { b0 } => WitnessView::VI { b0: b0.index() },
            BeyondWitness::VII { side, a0, b0 } => WitnessView::VII {
                side: *side,
                a0: a0.index(),
                b0: b0.index(),
            },
            BeyondWitness::VIII {
                klein,
                h_d1,
                h_d2,
                d,
                first_a,
                last_a,
                first_b,
                last_b,
            } => WitnessView::VIII {
                klein: sub(klein),
                h_d1: sub(h_d1),
                h_d2: sub(h_d2),
                d: d.index(),
                first_a: first_a.index(),
                last_a: last_a.index(),
                first_b: first_b.index(),
                last_b: last_b.index(),
            },
        })
        .collect();
    CertificateView {
        group: g.to_string(),
        kind: m.kind().to_string(),
        quasi_period: sub(&m.quasi_period),
        a1: idx(&m.a1),
        a0: idx(&m.a0),
        b1: idx(&m.b1),
        b0: idx(&m.b0),
        witnesses,
        recursion: None,
    }
}

impl From<&BeyondCertificate> for BeyondView {
    fn from(c: &BeyondCertificate) -> Self {
        let mut v = BeyondView {
            group: c.group.to_string(),
            label: c.label(),
            alpha: None,
            beta: None,
            structured: c.structured().map(|m| structured_view(&c.group, m)),
            quasi_period: None,
            quotient: None,
        };
        match &c.outcome {
            BeyondOutcome::Extendible { alpha, beta, .. } => {
                v.alpha = Some(alpha.index());
                v.beta = Some(beta.index());
            }
            BeyondOutcome::Structured(_) => {}
            BeyondOutcome::PeriodicBranch { quasi_period, quotient } => {
                v.quasi_period = Some(sub(quasi_period));
                v.quotient = Some(Box::new(quotient.as_ref().into()));
            }
        }
        v
    }
}

/// Checks a periodic reduction against quantities recomputed from scratch.
pub fn verify_periodic_reduction(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    red: &PeriodicReduction,
) -> Verification {
    let mut v = Verification::default();
    let h = &red.quasi_period;
    let s = g.sum_bits(a.bits(), b.bits());
    if stabilizer_bits(g, s) != h.bits() {
        v.failures.push("quasi-period is not the maximal period of A+B".into());
    }
    let holes = h.saturate(a.bits()).len() - a.len() + h.saturate(b.bits()).len() - b.len();
    if holes != red.hole_count {
        v.failures.push(format!("hole count {} but A+H and B+H miss {holes}", red.hole_count));
    }
    match g.quotient_map(h) {
        Ok(q) => {
            if q.push(a) != red.quotient_a || q.push(b) != red.quotient_b {
                v.failures.push("quotient sets are not the images of A and B".into());
            }
        }
        Err(e) => v.failures.push(e.to_string()),
    }
    let inner = verify_kst_certificate(&red.quotient_a, &red.quotient_b, &red.quotient_certificate);
    v.failures.extend(inner.failures.into_iter().map(|f| format!("quotient: {f}")));
    v
}

fn finish(v: Verification) -> (Status, Vec<String>) {
    if v.ok() {
        (Status::Pass, Vec::new())
    } else {
        (Status::Fail, v.failures)
    }
}

fn classify_outcome(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    r: i64,
) -> Result<(Outcome, Status, Vec<String>)> {
    if r >= 1 {
        return Ok((Outcome::Unclassified, Status::None, Vec::new()));
    }
    if r == 0 {
        let cert = beyond_classify(g, a, b)?;
        let (status, failures) = finish(verify_beyond_certificate(a, b, &cert));
        return Ok((Outcome::Beyond((&cert).into()), status, failures));
    }
    let s = g.sum_bits(a.bits(), b.bits());
    let periodic_no_unique = stabilizer_bits(g, s).len() > 1
        && crate::sumset::nu_counts(g, a.bits(), b.bits()).iter().all(|&c| c != 1);
    if r == -1 && !periodic_no_unique {
        let cert = kst_classify(g, a, b)?;
        let (status, failures) = finish(verify_kst_certificate(a, b, &cert));
        let outcome = Outcome::Kst {
            type_chain: cert.type_chain().iter().map(|t| t.to_string()).collect(),
            certificate: (&cert).into(),
        };
        return Ok((outcome, status, failures));
    }
    let red = kst_periodic_reduce(g, a, b)?;
    let (status, failures) = finish(verify_periodic_reduction(g, a, b, &red));
    let outcome = Outcome::KstPeriodic {
        quasi_period: sub(&red.quasi_period),
        hole_count: red.hole_count,
        holes_unconstrained: red.holes_unconstrained,
        quotient_group: red.quotient_certificate.group.to_string(),
        quotient_a: idx(&red.quotient_a),
        quotient_b: idx(&red.quotient_b),
        certificate: (&red.quotient_certificate).into(),
    };
    Ok((outcome, status, failures))
}

/// Classifies and verifies one pair: `r <= -1` by the critical-pair
/// classifier, `r = 0` by the equal-sum classifier, `r >= 1` left as is.
pub fn classify_pair(g: &FiniteAbelianGroup, a: &GroupSubset, b: &GroupSubset, timing: bool) -> PairRecord {
    let start = Instant::now();
    let size = g.sum_bits(a.bits(), b.bits()).len();
    let r = size as i64 - a.len() as i64 - b.len() as i64;
    let (outcome, verification, failures) = match classify_outcome(g, a, b, r) {
        Ok(x) => x,
        Err(e) => (Outcome::Error { message: e.to_string() }, Status::Error, Vec::new()),
    };
    PairRecord {
        group: g.to_string(),
        a: idx(a),
        b: idx(b),
        sumset_size: size,
        r,
        outcome,
        verification,
        failures,
        elapsed_us: timing.then(|| start.elapsed().as_micros() as u64),
    }
}
