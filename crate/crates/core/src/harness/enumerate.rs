use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::config::Config;
use super::record::{classify_pair, PairRecord};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{Automorphism, FiniteAbelianGroup, GroupSubset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dedup {
    None,
    Translations,
    TranslationsAndAutomorphisms,
}

impl FromStr for Dedup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dedup> {
        match s {
            "none" => Ok(Dedup::None),
            "translations" => Ok(Dedup::Translations),
            "automorphisms" | "translations+automorphisms" => Ok(Dedup::TranslationsAndAutomorphisms),
            _ => Err(Error::Parse(format!(
                "dedup mode {s:?} is not one of none, translations, automorphisms"
            ))),
        }
    }
}

impl fmt::Display for Dedup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dedup::None => "none",
            Dedup::Translations => "translations",
            Dedup::TranslationsAndAutomorphisms => "translations+automorphisms",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationTask {
    pub group: FiniteAbelianGroup,
    pub min_a: usize,
    pub max_a: usize,
    pub min_b: usize,
    pub max_b: usize,
    /// Keep only pairs with `|A+B| - |A| - |B| = r`.
    pub r: Option<i64>,
    pub dedup: Dedup,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
    /// Record per-pair wall time. Off by default since it breaks
    /// byte-identical reruns.
    pub timing: bool,
}

impl EnumerationTask {
    pub fn new(group: FiniteAbelianGroup) -> EnumerationTask {
        let n = group.order();
        EnumerationTask {
            group,
            min_a: 1,
            max_a: n,
            min_b: 1,
            max_b: n,
            r: None,
            dedup: Dedup::Translations,
            parallelism: 1,
            timing: false,
        }
    }

    pub fn with_r(mut self, r: i64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_dedup(mut self, dedup: Dedup) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn with_parallelism(mut self, p: usize) -> Self {
        self.parallelism = p;
        self
    }
}

/// Least translate of `s`, which contains 0.
pub(crate) fn translation_canonical(g: &FiniteAbelianGroup, s: Bits) -> Bits {
    s.iter()
        .map(|x| g.translate_bits(s, g.neg_idx(x)))
        .min()
        .unwrap_or(s)
}

fn side_candidates(g: &FiniteAbelianGroup, dedup: Dedup, min: usize, max: usize) -> Vec<Bits> {
    let n = g.order();
    let top: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut out = Vec::new();
    let mut m: u128 = 1;
    loop {
        let s = Bits(m);
        let len = s.len();
        let keep = (min..=max).contains(&len)
            && match dedup {
                Dedup::None => true,
                _ => s.contains(0) && translation_canonical(g, s) == s,
            };
        if keep {
            out.push(s);
        }
        if m == top {
            break;
        }
        m += 1;
    }
    out
}

/// The dedup-canonical pairs matching the size filters, in canonical
/// order, grouped by `A`. The sumset filter is not applied here.
pub fn candidate_pairs(task: &EnumerationTask, config: &Config) -> Result<Vec<(GroupSubset, Vec<GroupSubset>)>> {
    let g = &task.group;
    if g.order() > config.max_order {
        return Err(Error::Resource(format!(
            "{g} has order {} above the budget {}",
            g.order(),
            config.max_order
        )));
    }
    // side lists come from scanning every subset
    if g.order() > 24 {
        return Err(Error::Resource(format!("{g} is too large to list subsets")));
    }
    let a_side = side_candidates(g, task.dedup, task.min_a, task.max_a);
    let b_side = side_candidates(g, task.dedup, task.min_b, task.max_b);
    let total = (a_side.len() as u64).saturating_mul(b_side.len() as u64);
    if total > config.max_pairs {
        return Err(Error::Resource(format!(
            "{total} candidate pairs exceed the budget {}",
            config.max_pairs
        )));
    }
    let autos: Vec<Automorphism> = match task.dedup {
        Dedup::TranslationsAndAutomorphisms => g.automorphisms_within(config.max_automorphism_candidates)?,
        _ => Vec::new(),
    };
    let out = a_side
        .iter()
        .map(|&a| {
            let bs = b_side
                .iter()
                .filter(|&&b| autos.iter().all(|phi| orbit_key(g, phi, a, b) >= (a, b)))
                .map(|&b| g.set(b))
                .collect();
            (g.set(a), bs)
        })
        .collect();
    Ok(out)
}

fn orbit_key(g: &FiniteAbelianGroup, phi: &Automorphism, a: Bits, b: Bits) -> (Bits, Bits) {
    (
        translation_canonical(g, phi.apply_bits(a)),
        translation_canonical(g, phi.apply_bits(b)),
    )
}

/// Every dedup-canonical pair matching the filters, classified and
/// verified. Work is split by `A`; the merged output is in canonical
/// order whatever the parallelism.
pub fn enumerate(task: &EnumerationTask, config: &Config) -> Result<Vec<PairRecord>> {
    let parts = candidate_pairs(task, config)?;
    let g = &task.group;
    let work = |(a, bs): &(GroupSubset, Vec<GroupSubset>)| -> Vec<PairRecord> {
        bs.iter()
            .filter(|b| {
                task.r.is_none_or(|r| {
                    g.sum_bits(a.bits(), b.bits()).len() as i64 - a.len() as i64 - b.len() as i64 == r
                })
            })
            .map(|b| classify_pair(g, a, b, task.timing))
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(task.parallelism)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let chunks: Vec<Vec<PairRecord>> = pool.install(|| parts.par_iter().map(work).collect());
    Ok(chunks.into_iter().flatten().collect())
}
