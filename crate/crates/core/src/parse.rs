//! Text literals for groups, elements and subsets.
//!
//! Groups: `z7`, `z2xz4`, `trivial`. Elements: a canonical index such as
//! `5`, or coordinates such as `(1,0,3)`. Subsets: `{0,1,3}`,
//! `{(0,1),(1,1)}`, `{}`.

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupSubset};

pub fn parse_group(text: &str) -> Result<FiniteAbelianGroup> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if t == "trivial" {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let mut factors = Vec::new();
    for part in t.split('x') {
        let n = part
            .strip_prefix('z')
            .map(|p| p.strip_prefix('/').unwrap_or(p))
            .ok_or_else(|| Error::Parse(format!("group factor {part:?} should look like z6")))?;
        let n: u32 = n
            .parse()
            .map_err(|_| Error::Parse(format!("group factor {part:?} has no valid order")))?;
        factors.push(n);
    }
    FiniteAbelianGroup::new(&factors)
}

pub fn parse_element(g: &FiniteAbelianGroup, text: &str) -> Result<GroupElement> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad coordinate {c:?} in {t:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        return g.element_from_coords(&coords);
    }
    let i: usize = t.parse().map_err(|_| Error::Parse(format!("bad element {t:?}")))?;
    g.element(i)
}

pub fn parse_set(g: &FiniteAbelianGroup, text: &str) -> Result<GroupSubset> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("set literal {t:?} must be wrapped in braces")))?;
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {t:?}")))?
            }
            ',' if depth == 0 => {
                items.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {t:?}")));
    }
    items.push(&inner[start..]);
    if items.len() == 1 && items[0].trim().is_empty() {
        return Ok(g.empty_set());
    }
    let elems = items
        .into_iter()
        .map(|s| parse_element(g, s))
        .collect::<Result<Vec<_>>>()?;
    g.subset_of_elements(elems)
}

/// Inverse of [`parse_element`]: an index for cyclic presentations,
/// coordinates otherwise.
pub fn format_element(g: &FiniteAbelianGroup, x: GroupElement) -> String {
    if g.factors().len() <= 1 {
        return x.index().to_string();
    }
    let c: Vec<String> = g.coords(x).iter().map(u32::to_string).collect();
    format!("({})", c.join(","))
}

pub fn format_set(g: &FiniteAbelianGroup, s: &GroupSubset) -> String {
    let parts: Vec<String> = s.iter().map(|x| format_element(g, x)).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups() {
        assert_eq!(parse_group("z6").unwrap().factors(), &[6]);
        assert_eq!(parse_group("Z2 x Z4").unwrap().factors(), &[2, 4]);
        assert_eq!(parse_group("z/3xz/3").unwrap().factors(), &[3, 3]);
        assert!(parse_group("trivial").unwrap().is_trivial());
        for bad in ["", "6", "zz6", "z6x", "z1", "q5"] {
            assert!(parse_group(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sets_round_trip() {
        let g = parse_group("z2xz4").unwrap();
        let s = parse_set(&g, "{(0,1), (1,3),5}").unwrap();
        assert_eq!(s.indices(), vec![1, 5, 7]);
        assert_eq!(format_set(&g, &s), "{(0,1),(1,1),(1,3)}");
        assert_eq!(parse_set(&g, &format_set(&g, &s)).unwrap(), s);
        assert!(parse_set(&g, "{}").unwrap().is_empty());
        let z7 = parse_group("z7").unwrap();
        assert_eq!(format_set(&z7, &parse_set(&z7, "{3,0,1}").unwrap()), "{0,1,3}");
    }

    #[test]
    fn malformed_literals() {
        let g = parse_group("z7").unwrap();
        for bad in ["0,1", "{0,1", "{a}", "{0,,1}", "{7}", "{(0,1)}", "{(0}"] {
            assert!(parse_set(&g, bad).is_err(), "{bad}");
        }
        assert!(matches!(parse_set(&g, "{a}"), Err(Error::Parse(_))));
        assert!(matches!(parse_set(&g, "{9}"), Err(Error::Domain(_))));
    }
}
