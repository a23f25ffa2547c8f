use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset};

/// Whether `map` is injective on `A ∪ B` and preserves and reflects every
/// additive relation `a1 + b1 = a2 + b2`.
pub fn is_freiman_isomorphism(
    g: &FiniteAbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    target: &FiniteAbelianGroup,
    map: &BTreeMap<GroupElement, GroupElement>,
) -> Result<bool> {
    g.owns(a)?;
    g.owns(b)?;
    let domain = a.union(b);
    let mut image = vec![0usize; g.order()];
    for x in domain.iter() {
        let y = map
            .get(&x)
            .ok_or_else(|| Error::Domain(format!("map is undefined at {}", x.index())))?;
        if y.index() >= target.order() {
            return Err(Error::Domain(format!("image {} is outside {target}", y.index())));
        }
        image[x.index()] = y.index();
    }
    let mut seen = vec![false; target.order()];
    for x in domain.iter() {
        if std::mem::replace(&mut seen[image[x.index()]], true) {
            return Ok(false);
        }
    }
    let pairs: Vec<(usize, usize)> = a.iter().flat_map(|x| b.iter().map(move |y| (x.index(), y.index()))).collect();
    for (i, &(a1, b1)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[i + 1..] {
            let here = g.add_idx(a1, b1) == g.add_idx(a2, b2);
            let there = target.add_idx(image[a1], image[b1]) == target.add_idx(image[a2], image[b2]);
            if here != there {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
