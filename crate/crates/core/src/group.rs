//! Finite abelian groups in product-of-cyclic form, their subsets,
//! subgroups and quotient maps.
//!
//! Elements are addressed by a mixed-radix canonical index with the first
//! coordinate most significant, so index order is lexicographic order of
//! coordinate tuples. Every deterministic output sorts by this index.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bits::{Bits, MAX_ORDER};
use crate::error::{Error, Result};

/// Exact fingerprint of a group presentation: one byte per factor plus the
/// factor count. Used to reject mixing subsets of different groups.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GroupKey(u64);

impl GroupKey {
    fn of(factors: &[u32]) -> GroupKey {
        let mut key = factors.len() as u64;
        for &f in factors {
            key = key << 8 | (f as u64 & 0xff);
        }
        GroupKey(key)
    }
}

/// An element, identified by its canonical index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement(u32);

impl GroupElement {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> GroupElement {
        GroupElement(i as u32)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of a specific group.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSubset {
    key: GroupKey,
    bits: Bits,
}

impl GroupSubset {
    #[inline]
    pub(crate) fn from_parts(key: GroupKey, bits: Bits) -> GroupSubset {
        GroupSubset { key, bits }
    }

    #[inline]
    pub fn bits(&self) -> Bits {
        self.bits
    }

    #[inline]
    pub fn group_key(&self) -> GroupKey {
        self.key
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: GroupElement) -> bool {
        self.bits.contains(x.index())
    }

    pub fn iter(&self) -> impl Iterator<Item = GroupElement> {
        self.bits.iter().map(GroupElement::from_index)
    }

    /// Sorted canonical indices.
    pub fn indices(&self) -> Vec<usize> {
        self.bits.to_vec()
    }

    pub fn min(&self) -> Option<GroupElement> {
        self.bits.min().map(GroupElement::from_index)
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.bits.is_subset(other.bits)
    }

    pub fn union(&self, other: &GroupSubset) -> GroupSubset {
        self.with_bits(self.bits.union(other.bits))
    }

    pub fn intersection(&self, other: &GroupSubset) -> GroupSubset {
        self.with_bits(self.bits.intersection(other.bits))
    }

    pub fn difference(&self, other: &GroupSubset) -> GroupSubset {
        self.with_bits(self.bits.difference(other.bits))
    }

    pub fn with(&self, x: GroupElement) -> GroupSubset {
        self.with_bits(self.bits.with(x.index()))
    }

    pub fn without(&self, x: GroupElement) -> GroupSubset {
        self.with_bits(self.bits.without(x.index()))
    }

    #[inline]
    pub(crate) fn with_bits(&self, bits: Bits) -> GroupSubset {
        GroupSubset { key: self.key, bits }
    }
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.bits)
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl PartialOrd for GroupSubset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupSubset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits.cmp(&other.bits)
    }
}

/// A subgroup together with its coset structure.
#[derive(Clone)]
pub struct Subgroup {
    carrier: GroupSubset,
    coset_of: Arc<[u8]>,
    transversal: Arc<[u8]>,
    cosets: Arc<[Bits]>,
}

impl Subgroup {
    pub fn carrier(&self) -> GroupSubset {
        self.carrier
    }

    #[inline]
    pub fn bits(&self) -> Bits {
        self.carrier.bits
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.carrier.contains(x)
    }

    pub fn coset_count(&self) -> usize {
        self.transversal.len()
    }

    /// Coset id of `x`; ids are ordered by least coset member.
    #[inline]
    pub fn coset_id(&self, x: usize) -> usize {
        self.coset_of[x] as usize
    }

    /// Least element of each coset, in coset-id order.
    pub fn transversal(&self) -> Vec<GroupElement> {
        self.transversal
            .iter()
            .map(|&r| GroupElement::from_index(r as usize))
            .collect()
    }

    #[inline]
    pub fn coset_bits(&self, id: usize) -> Bits {
        self.cosets[id]
    }

    /// The coset `x + H`.
    #[inline]
    pub fn coset_of(&self, x: usize) -> Bits {
        self.cosets[self.coset_of[x] as usize]
    }

    /// `S + H`.
    pub fn saturate(&self, s: Bits) -> Bits {
        let mut seen = 0u128;
        let mut out = Bits::EMPTY;
        for x in s.iter() {
            let c = self.coset_of[x] as u32;
            if seen >> c & 1 == 0 {
                seen |= 1 << c;
                out = out.union(self.cosets[c as usize]);
            }
        }
        out
    }

    /// Ids of cosets met by `s`.
    pub fn cosets_met(&self, s: Bits) -> Vec<usize> {
        let mut seen = 0u128;
        for x in s.iter() {
            seen |= 1 << self.coset_of[x];
        }
        Bits(seen).to_vec()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.bits().is_subset(other.bits())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier
    }
}

impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.carrier)
    }
}

/// The natural homomorphism `G -> G/H`, realized onto a group in
/// invariant-factor form.
#[derive(Clone)]
pub struct QuotientMap {
    kernel: Subgroup,
    target: FiniteAbelianGroup,
    image: Arc<[u8]>,
}

impl QuotientMap {
    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    #[inline]
    pub fn map(&self, x: GroupElement) -> GroupElement {
        GroupElement::from_index(self.image[x.index()] as usize)
    }

    #[inline]
    pub(crate) fn map_idx(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    pub fn push_bits(&self, s: Bits) -> Bits {
        let mut out = Bits::EMPTY;
        for x in s.iter() {
            out.insert(self.image[x] as usize);
        }
        out
    }

    /// Pushforward `phi(S)`.
    pub fn push(&self, s: &GroupSubset) -> GroupSubset {
        GroupSubset::from_parts(self.target.key(), self.push_bits(s.bits))
    }

    /// Full preimage of a target subset (a union of kernel cosets).
    pub fn pull_bits(&self, t: Bits) -> Bits {
        let mut out = Bits::EMPTY;
        for (x, &img) in self.image.iter().enumerate() {
            if t.contains(img as usize) {
                out.insert(x);
            }
        }
        out
    }

    pub fn pull(&self, t: &GroupSubset, source: &FiniteAbelianGroup) -> GroupSubset {
        source.set(self.pull_bits(t.bits))
    }
}

impl fmt::Debug for QuotientMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuotientMap {{ kernel: {:?}, target: {} }}",
            self.kernel.carrier, self.target
        )
    }
}

struct Lattice {
    subgroups: Vec<Subgroup>,
    by_carrier: HashMap<u128, usize>,
    quotients: Vec<OnceLock<QuotientMap>>,
}

struct GroupData {
    factors: Vec<u32>,
    order: usize,
    key: GroupKey,
    add: Box<[u8]>,
    neg: Box<[u8]>,
    lattice: OnceLock<Lattice>,
}

/// A finite abelian group `Z/f1 x Z/f2 x ... x Z/fk`.
///
/// Cheap to clone; all tables are shared.
#[derive(Clone)]
pub struct FiniteAbelianGroup(Arc<GroupData>);

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.0.key == other.0.key
    }
}

impl Eq for FiniteAbelianGroup {}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteAbelianGroup({self})")
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.factors.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self.0.factors.iter().map(|n| format!("z{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FiniteAbelianGroup {
    /// Builds `Z/f1 x ... x Z/fk`. The empty list gives the trivial group.
    pub fn new(factors: &[u32]) -> Result<FiniteAbelianGroup> {
        if let Some(&bad) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::InvalidGroup(format!(
                "cyclic factor {bad} must be at least 2"
            )));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &f| acc.checked_mul(f as usize))
            .filter(|&n| n <= MAX_ORDER)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "group order exceeds the representable maximum of {MAX_ORDER}"
                ))
            })?;

        let coords: Vec<Vec<u32>> = (0..order).map(|i| decode(factors, i)).collect();
        let mut add = vec![0u8; order * order].into_boxed_slice();
        let mut neg = vec![0u8; order].into_boxed_slice();
        for x in 0..order {
            let cx = &coords[x];
            let nx: Vec<u32> = cx
                .iter()
                .zip(factors)
                .map(|(&c, &f)| (f - c) % f)
                .collect();
            neg[x] = encode(factors, &nx) as u8;
            for y in 0..order {
                let s: Vec<u32> = cx
                    .iter()
                    .zip(&coords[y])
                    .zip(factors)
                    .map(|((&a, &b), &f)| (a + b) % f)
                    .collect();
                add[x * order + y] = encode(factors, &s) as u8;
            }
        }
        Ok(FiniteAbelianGroup(Arc::new(GroupData {
            factors: factors.to_vec(),
            order,
            key: GroupKey::of(factors),
            add,
            neg,
            lattice: OnceLock::new(),
        })))
    }

    pub fn trivial() -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(&[]).expect("trivial group is valid")
    }

    pub fn cyclic(n: u32) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(&[n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.0.factors
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.order
    }

    #[inline]
    pub fn key(&self) -> GroupKey {
        self.0.key
    }

    pub fn is_trivial(&self) -> bool {
        self.0.order == 1
    }

    pub fn is_cyclic(&self) -> bool {
        // product of cyclic factors is cyclic iff they are pairwise coprime
        let f = &self.0.factors;
        (0..f.len()).all(|i| (i + 1..f.len()).all(|j| num_integer::gcd(f[i], f[j]) == 1))
    }

    // ---- elements ----

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index < self.0.order {
            Ok(GroupElement::from_index(index))
        } else {
            Err(Error::Domain(format!(
                "element index {index} is outside {self} (order {})",
                self.0.order
            )))
        }
    }

    pub fn element_from_coords(&self, coords: &[u32]) -> Result<GroupElement> {
        if coords.len() != self.0.factors.len() {
            return Err(Error::Domain(format!(
                "{self} expects {} coordinates, got {}",
                self.0.factors.len(),
                coords.len()
            )));
        }
        if let Some((c, f)) = coords
            .iter()
            .zip(&self.0.factors)
            .find(|(&c, &f)| c >= f)
        {
            return Err(Error::Domain(format!("coordinate {c} out of range for Z/{f}")));
        }
        Ok(GroupElement::from_index(encode(&self.0.factors, coords)))
    }

    pub fn coords(&self, x: GroupElement) -> Vec<u32> {
        decode(&self.0.factors, x.index())
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.0.order).map(GroupElement::from_index)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(0)
    }

    fn check(&self, x: GroupElement) -> Result<()> {
        self.element(x.index()).map(|_| ())
    }

    pub fn add(&self, x: GroupElement, y: GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(GroupElement::from_index(self.add_idx(x.index(), y.index())))
    }

    pub fn neg(&self, x: GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement::from_index(self.neg_idx(x.index())))
    }

    pub fn sub(&self, x: GroupElement, y: GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(GroupElement::from_index(self.sub_idx(x.index(), y.index())))
    }

    /// `n * x`.
    pub fn mul(&self, n: usize, x: GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        let mut acc = 0;
        for _ in 0..n {
            acc = self.add_idx(acc, x.index());
        }
        Ok(GroupElement::from_index(acc))
    }

    /// Least `n >= 1` with `n * x = 0`.
    pub fn element_order(&self, x: GroupElement) -> Result<usize> {
        self.check(x)?;
        Ok(self.order_idx(x.index()))
    }

    #[inline]
    pub(crate) fn add_idx(&self, x: usize, y: usize) -> usize {
        self.0.add[x * self.0.order + y] as usize
    }

    #[inline]
    pub(crate) fn neg_idx(&self, x: usize) -> usize {
        self.0.neg[x] as usize
    }

    #[inline]
    pub(crate) fn sub_idx(&self, x: usize, y: usize) -> usize {
        self.add_idx(x, self.neg_idx(y))
    }

    pub(crate) fn order_idx(&self, x: usize) -> usize {
        let mut n = 1;
        let mut acc = x;
        while acc != 0 {
            acc = self.add_idx(acc, x);
            n += 1;
        }
        n
    }

    // ---- subsets ----

    pub fn set(&self, bits: Bits) -> GroupSubset {
        debug_assert!(bits.is_subset(Bits::full(self.0.order)));
        GroupSubset::from_parts(self.0.key, bits)
    }

    pub fn subset<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<GroupSubset> {
        let mut bits = Bits::EMPTY;
        for i in indices {
            self.element(i)?;
            bits.insert(i);
        }
        Ok(self.set(bits))
    }

    pub fn subset_of_elements<I: IntoIterator<Item = GroupElement>>(
        &self,
        elements: I,
    ) -> Result<GroupSubset> {
        self.subset(elements.into_iter().map(GroupElement::index))
    }

    pub fn empty_set(&self) -> GroupSubset {
        self.set(Bits::EMPTY)
    }

    pub fn full_set(&self) -> GroupSubset {
        self.set(Bits::full(self.0.order))
    }

    pub fn complement(&self, s: &GroupSubset) -> Result<GroupSubset> {
        self.owns(s)?;
        Ok(self.set(Bits::full(self.0.order).difference(s.bits)))
    }

    /// Checks that `s` belongs to this group.
    pub fn owns(&self, s: &GroupSubset) -> Result<()> {
        if s.key == self.0.key {
            Ok(())
        } else {
            Err(Error::Domain(format!("subset does not belong to {self}")))
        }
    }

    #[inline]
    pub(crate) fn full_bits(&self) -> Bits {
        Bits::full(self.0.order)
    }

    #[inline]
    pub(crate) fn complement_bits(&self, s: Bits) -> Bits {
        self.full_bits().difference(s)
    }

    pub(crate) fn sum_bits(&self, a: Bits, b: Bits) -> Bits {
        if a.is_empty() || b.is_empty() {
            return Bits::EMPTY;
        }
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let full = self.full_bits();
        let mut out = Bits::EMPTY;
        for x in small.iter() {
            out = out.union(self.translate_bits(large, x));
            if out == full {
                break;
            }
        }
        out
    }

    #[inline]
    pub(crate) fn translate_bits(&self, s: Bits, g: usize) -> Bits {
        let row = &self.0.add[g * self.0.order..(g + 1) * self.0.order];
        let mut out = Bits::EMPTY;
        for y in s.iter() {
            out.insert(row[y] as usize);
        }
        out
    }

    pub(crate) fn neg_bits(&self, s: Bits) -> Bits {
        s.iter().map(|x| self.neg_idx(x)).collect()
    }


    /// Cyclic subgroup `<g>` as bits.
    pub(crate) fn cyclic_bits(&self, g: usize) -> Bits {
        let mut out = Bits::singleton(0);
        let mut acc = g;
        while acc != 0 {
            out.insert(acc);
            acc = self.add_idx(acc, g);
        }
        out
    }

    fn closure_bits(&self, s: Bits) -> Bits {
        let mut span = Bits::singleton(0);
        for x in s.iter() {
            if !span.contains(x) {
                span = self.sum_bits(span, self.cyclic_bits(x));
            }
        }
        span
    }

    // ---- subgroups ----

    fn lattice(&self) -> &Lattice {
        self.0.lattice.get_or_init(|| {
            let subgroups = self.compute_subgroups();
            let by_carrier = subgroups
                .iter()
                .enumerate()
                .map(|(i, h)| (h.bits().0, i))
                .collect();
            let quotients = (0..subgroups.len()).map(|_| OnceLock::new()).collect();
            Lattice {
                subgroups,
                by_carrier,
                quotients,
            }
        })
    }

    fn compute_subgroups(&self) -> Vec<Subgroup> {
        let trivial = Bits::singleton(0);
        let mut seen: HashSet<u128> = HashSet::from([trivial.0]);
        let mut queue = VecDeque::from([trivial]);
        let mut found = vec![trivial];
        while let Some(h) = queue.pop_front() {
            for g in 0..self.0.order {
                if h.contains(g) {
                    continue;
                }
                let k = self.sum_bits(h, self.cyclic_bits(g));
                if seen.insert(k.0) {
                    found.push(k);
                    queue.push_back(k);
                }
            }
        }
        found.sort_by_key(|b| (b.len(), b.0));
        found.into_iter().map(|b| self.build_subgroup(b)).collect()
    }

    /// Every subgroup exactly once, sorted by (order, carrier encoding).
    pub fn all_subgroups(&self) -> &[Subgroup] {
        &self.lattice().subgroups
    }

    /// Like [`all_subgroups`](Self::all_subgroups) but refuses groups above
    /// an enumeration budget.
    pub fn all_subgroups_within(&self, max_order: usize) -> Result<&[Subgroup]> {
        if self.0.order > max_order {
            return Err(Error::Resource(format!(
                "{self} has order {} above the enumeration budget {max_order}",
                self.0.order
            )));
        }
        Ok(self.all_subgroups())
    }

    fn build_subgroup(&self, carrier: Bits) -> Subgroup {
        let n = self.0.order;
        let mut coset_of = vec![u8::MAX; n];
        let mut transversal = Vec::new();
        let mut cosets = Vec::new();
        for x in 0..n {
            if coset_of[x] != u8::MAX {
                continue;
            }
            let id = transversal.len() as u8;
            let coset = self.translate_bits(carrier, x);
            for y in coset.iter() {
                coset_of[y] = id;
            }
            transversal.push(x as u8);
            cosets.push(coset);
        }
        Subgroup {
            carrier: self.set(carrier),
            coset_of: coset_of.into(),
            transversal: transversal.into(),
            cosets: cosets.into(),
        }
    }

    /// Wraps a carrier set as a subgroup after checking closure.
    pub fn subgroup_from_set(&self, carrier: &GroupSubset) -> Result<Subgroup> {
        self.owns(carrier)?;
        let b = carrier.bits;
        let closed = b.contains(0)
            && b.iter()
                .all(|x| b.contains(self.neg_idx(x)) && self.translate_bits(b, x) == b);
        if !closed {
            return Err(Error::Domain(format!("{carrier} is not a subgroup of {self}")));
        }
        Ok(self.subgroup_of_bits(b))
    }

    /// Caller guarantees `carrier` is a subgroup.
    pub(crate) fn subgroup_of_bits(&self, carrier: Bits) -> Subgroup {
        if let Some(l) = self.0.lattice.get() {
            if let Some(&i) = l.by_carrier.get(&carrier.0) {
                return l.subgroups[i].clone();
            }
        }
        self.build_subgroup(carrier)
    }

    /// The least subgroup containing `s`.
    pub fn subgroup_generated(&self, s: &GroupSubset) -> Result<Subgroup> {
        self.owns(s)?;
        Ok(self.subgroup_of_bits(self.closure_bits(s.bits)))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup_of_bits(Bits::singleton(0))
    }

    pub fn whole(&self) -> Subgroup {
        self.subgroup_of_bits(self.full_bits())
    }

    /// The natural homomorphism onto `G/H` (cached per subgroup).
    pub fn quotient_map(&self, h: &Subgroup) -> Result<QuotientMap> {
        self.owns(&h.carrier)?;
        let lattice = self.lattice();
        match lattice.by_carrier.get(&h.bits().0) {
            Some(&i) => Ok(lattice.quotients[i]
                .get_or_init(|| self.build_quotient(&lattice.subgroups[i]))
                .clone()),
            None => Err(Error::Domain(format!("{h:?} is not a subgroup of {self}"))),
        }
    }

    fn build_quotient(&self, h: &Subgroup) -> QuotientMap {
        let m = h.coset_count();
        let reps: Vec<usize> = h.transversal.iter().map(|&r| r as usize).collect();
        let cadd = |i: usize, j: usize| h.coset_id(self.add_idx(reps[i], reps[j]));
        let mut order_of = vec![1usize; m];
        for (q, slot) in order_of.iter_mut().enumerate() {
            let mut acc = q;
            while acc != 0 {
                acc = cadd(acc, q);
                *slot += 1;
            }
        }
        let factors_desc = invariant_factors(m, &order_of);
        let basis = find_basis(m, &factors_desc, &order_of, &cadd)
            .expect("a finite abelian group has a basis matching its invariant factors");
        let factors_asc: Vec<u32> = factors_desc.iter().rev().map(|&f| f as u32).collect();
        let basis_asc: Vec<usize> = basis.into_iter().rev().collect();
        let target = FiniteAbelianGroup::new(&factors_asc).expect("quotient of a valid group");

        let mut coset_to_target = vec![0u8; m];
        for t in 0..target.order() {
            let c = target.coords(GroupElement::from_index(t));
            let mut acc = 0;
            for (&ci, &q) in c.iter().zip(&basis_asc) {
                for _ in 0..ci {
                    acc = cadd(acc, q);
                }
            }
            coset_to_target[acc] = t as u8;
        }
        let image: Vec<u8> = (0..self.0.order)
            .map(|x| coset_to_target[h.coset_id(x)])
            .collect();
        QuotientMap {
            kernel: h.clone(),
            target,
            image: image.into(),
        }
    }

    // ---- automorphisms ----

    /// Every automorphism, in lexicographic order of the images of the unit
    /// coordinate vectors. Refuses when the number of candidate images
    /// exceeds `budget`.
    pub fn automorphisms_within(&self, budget: u64) -> Result<Vec<Automorphism>> {
        let f = &self.0.factors;
        let options: Vec<Vec<usize>> = f
            .iter()
            .map(|&fi| (0..self.0.order).filter(|&x| fi as usize % self.order_idx(x) == 0).collect())
            .collect();
        let candidates = options.iter().try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64));
        if candidates.is_none_or(|c| c > budget) {
            return Err(Error::Resource(format!(
                "{self} has too many candidate automorphisms for the budget {budget}"
            )));
        }
        let coords: Vec<Vec<u32>> = (0..self.0.order).map(|x| decode(f, x)).collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; f.len()];
        loop {
            let images: Vec<usize> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            let mut map = vec![0u8; self.0.order];
            for (x, c) in coords.iter().enumerate() {
                let mut acc = 0;
                for (&ci, &im) in c.iter().zip(&images) {
                    for _ in 0..ci {
                        acc = self.add_idx(acc, im);
                    }
                }
                map[x] = acc as u8;
            }
            if map.iter().skip(1).all(|&y| y != 0) {
                out.push(Automorphism(map.into()));
            }
            let Some(i) = (0..f.len()).rev().find(|&i| pick[i] + 1 < options[i].len()) else {
                break;
            };
            pick[i] += 1;
            pick[i + 1..].iter_mut().for_each(|p| *p = 0);
        }
        Ok(out)
    }
}

/// A group automorphism as an index permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism(Box<[u8]>);

impl Automorphism {
    pub fn apply(&self, x: GroupElement) -> GroupElement {
        GroupElement::from_index(self.0[x.index()] as usize)
    }

    pub fn apply_set(&self, s: &GroupSubset) -> GroupSubset {
        s.with_bits(self.apply_bits(s.bits))
    }

    pub(crate) fn apply_bits(&self, s: Bits) -> Bits {
        s.iter().map(|x| self.0[x] as usize).collect()
    }
}

fn decode(factors: &[u32], mut index: usize) -> Vec<u32> {
    let mut out = vec![0u32; factors.len()];
    for (slot, &f) in out.iter_mut().zip(factors).rev() {
        *slot = (index % f as usize) as u32;
        index /= f as usize;
    }
    out
}

fn encode(factors: &[u32], coords: &[u32]) -> usize {
    coords
        .iter()
        .zip(factors)
        .fold(0usize, |acc, (&c, &f)| acc * f as usize + c as usize)
}

fn prime_factors(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors, largest first, from counts of `p^k`-torsion.
fn invariant_factors(m: usize, order_of: &[usize]) -> Vec<usize> {
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    let mut primes = Vec::new();
    for (p, e) in prime_factors(m) {
        // torsion[k] = #{q : p^k q = 0}
        let torsion: Vec<usize> = (0..=e)
            .map(|k| {
                let pk = p.pow(k);
                order_of.iter().filter(|&&o| pk % o == 0).count()
            })
            .collect();
        // rank_at_least[k-1] = number of cyclic p-factors of order >= p^k
        let rank_at_least: Vec<u32> = (1..=e as usize)
            .map(|k| ilog(torsion[k] / torsion[k - 1], p))
            .collect();
        let width = rank_at_least.first().copied().unwrap_or(0);
        let exps: Vec<u32> = (0..width)
            .map(|j| rank_at_least.iter().filter(|&&r| r > j).count() as u32)
            .collect();
        primes.push(p);
        per_prime.push(exps);
    }
    let width = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    (0..width)
        .map(|j| {
            primes
                .iter()
                .zip(&per_prime)
                .map(|(&p, exps)| p.pow(exps.get(j).copied().unwrap_or(0)))
                .product()
        })
        .collect()
}

fn ilog(mut n: usize, p: usize) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

fn find_basis(
    m: usize,
    factors_desc: &[usize],
    order_of: &[usize],
    cadd: &dyn Fn(usize, usize) -> usize,
) -> Option<Vec<usize>> {
    fn extend(
        i: usize,
        span: &[bool],
        chosen: &mut Vec<usize>,
        m: usize,
        factors: &[usize],
        order_of: &[usize],
        cadd: &dyn Fn(usize, usize) -> usize,
    ) -> bool {
        if i == factors.len() {
            return true;
        }
        for q in 0..m {
            if order_of[q] != factors[i] {
                continue;
            }
            let mut next = vec![false; m];
            let mut size = 0;
            for s in (0..m).filter(|&s| span[s]) {
                let mut acc = s;
                for _ in 0..factors[i] {
                    if !next[acc] {
                        next[acc] = true;
                        size += 1;
                    }
                    acc = cadd(acc, q);
                }
            }
            let old = span.iter().filter(|&&b| b).count();
            if size != old * factors[i] {
                continue;
            }
            chosen.push(q);
            if extend(i + 1, &next, chosen, m, factors, order_of, cadd) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut span = vec![false; m];
    span[0] = true;
    let mut chosen = Vec::new();
    extend(0, &span, &mut chosen, m, factors_desc, order_of, cadd).then_some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f).unwrap()
    }

    #[test]
    fn make_group_examples() {
        assert_eq!(g(&[]).order(), 1);
        assert_eq!(g(&[6]).order(), 6);
        assert_eq!(g(&[2, 2, 5]).order(), 20);
        assert!(matches!(FiniteAbelianGroup::new(&[1]), Err(Error::InvalidGroup(_))));
        assert!(matches!(FiniteAbelianGroup::new(&[0, 3]), Err(Error::InvalidGroup(_))));
        assert!(matches!(FiniteAbelianGroup::new(&[16, 16]), Err(Error::Resource(_))));
    }

    #[test]
    fn automorphism_counts() {
        let count = |f: &[u32]| g(f).automorphisms_within(1 << 20).unwrap().len();
        assert_eq!(count(&[]), 1);
        assert_eq!(count(&[7]), 6);
        assert_eq!(count(&[12]), 4);
        assert_eq!(count(&[2, 2]), 6);
        assert_eq!(count(&[2, 4]), 8);
        assert_eq!(count(&[3, 3]), 48);
        assert_eq!(count(&[2, 2, 2]), 168);
        assert!(matches!(g(&[2, 2, 2]).automorphisms_within(100), Err(Error::Resource(_))));
    }

    #[test]
    fn automorphisms_are_homomorphisms() {
        let h = g(&[2, 6]);
        for phi in h.automorphisms_within(1 << 20).unwrap() {
            for x in h.elements() {
                for y in h.elements() {
                    assert_eq!(phi.apply(h.add(x, y).unwrap()), h.add(phi.apply(x), phi.apply(y)).unwrap());
                }
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let z6 = g(&[6]);
        let x = z6.add(z6.element(4).unwrap(), z6.element(5).unwrap()).unwrap();
        assert_eq!(x.index(), 3);
        let k = g(&[2, 2]);
        let e = k.element_from_coords(&[1, 1]).unwrap();
        assert_eq!(k.neg(e).unwrap(), e);
        for x in z6.elements() {
            assert_eq!(z6.add(x, z6.zero()).unwrap(), x);
        }
        assert!(matches!(z6.add(GroupElement(7), z6.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn element_order_examples() {
        let z6 = g(&[6]);
        assert_eq!(z6.element_order(z6.element(2).unwrap()).unwrap(), 3);
        assert_eq!(z6.element_order(z6.zero()).unwrap(), 1);
        let h = g(&[2, 4]);
        let x = h.element_from_coords(&[1, 1]).unwrap();
        // iterate addition until zero
        let mut acc = x;
        let mut n = 1;
        while acc != h.zero() {
            acc = h.add(acc, x).unwrap();
            n += 1;
        }
        assert_eq!(n, 4);
        assert_eq!(h.element_order(x).unwrap(), 4);
    }

    #[test]
    fn codec_roundtrip_and_ordering() {
        let h = g(&[2, 4]);
        assert_eq!(h.element_from_coords(&[1, 1]).unwrap().index(), 5);
        for x in h.elements() {
            assert_eq!(h.element_from_coords(&h.coords(x)).unwrap(), x);
        }
        assert!(h.element_from_coords(&[2, 0]).is_err());
        assert!(h.element_from_coords(&[1]).is_err());
    }

    /// Brute-force oracle: closure of every subset of the group.
    fn subgroups_by_brute_force(grp: &FiniteAbelianGroup) -> Vec<Bits> {
        let n = grp.order();
        let mut out: Vec<Bits> = (0u128..1 << n)
            .map(|m| grp.closure_bits(Bits(m)))
            .collect();
        out.sort_by_key(|b| (b.len(), b.0));
        out.dedup();
        out
    }

    #[test]
    fn all_subgroups_examples() {
        let z6 = g(&[6]);
        let orders: Vec<usize> = z6.all_subgroups().iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        let k = g(&[2, 2]);
        let orders: Vec<usize> = k.all_subgroups().iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 4]);
        assert_eq!(g(&[]).all_subgroups().len(), 1);
        for f in [&[6][..], &[2, 2], &[2, 4], &[3, 3], &[2, 2, 2], &[12]] {
            let grp = g(f);
            let listed: Vec<Bits> = grp.all_subgroups().iter().map(Subgroup::bits).collect();
            assert_eq!(listed, subgroups_by_brute_force(&grp), "{f:?}");
        }
        assert!(matches!(g(&[12]).all_subgroups_within(10), Err(Error::Resource(_))));
    }

    #[test]
    fn subgroup_generated_examples() {
        let z6 = g(&[6]);
        let s = z6.subset([2]).unwrap();
        assert_eq!(z6.subgroup_generated(&s).unwrap().carrier().indices(), vec![0, 2, 4]);
        let s = z6.subset([2, 3]).unwrap();
        assert_eq!(z6.subgroup_generated(&s).unwrap().order(), 6);
        let s = z6.empty_set();
        assert_eq!(z6.subgroup_generated(&s).unwrap().carrier().indices(), vec![0]);
    }

    #[test]
    fn quotient_examples() {
        let z6 = g(&[6]);
        let h = z6.subgroup_from_set(&z6.subset([0, 3]).unwrap()).unwrap();
        let q = z6.quotient_map(&h).unwrap();
        assert_eq!(q.target().order(), 3);
        assert_eq!(q.push(&z6.subset([0, 3, 1]).unwrap()).len(), 2);

        let whole = z6.whole();
        let q = z6.quotient_map(&whole).unwrap();
        assert!(q.target().is_trivial());
        assert_eq!(q.push(&z6.subset([1, 4]).unwrap()).indices(), vec![0]);

        let q = z6.quotient_map(&z6.trivial_subgroup()).unwrap();
        let mut images: Vec<usize> = z6.elements().map(|x| q.map(x).index()).collect();
        images.sort();
        assert_eq!(images, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn quotient_is_homomorphism_with_exact_kernel() {
        for f in [&[2, 4][..], &[2, 2, 2], &[3, 3], &[12], &[2, 6], &[4, 4], &[2, 2, 5]] {
            let grp = g(f);
            for h in grp.all_subgroups() {
                let q = grp.quotient_map(h).unwrap();
                assert_eq!(q.target().order() * h.order(), grp.order());
                // invariant-factor form: each factor divides the next
                let tf = q.target().factors();
                assert!(tf.windows(2).all(|w| w[1] % w[0] == 0), "{tf:?}");
                for x in 0..grp.order() {
                    for y in 0..grp.order() {
                        let same = q.map_idx(x) == q.map_idx(y);
                        assert_eq!(same, h.bits().contains(grp.sub_idx(x, y)));
                        let lhs = q.map_idx(grp.add_idx(x, y));
                        let rhs = q.target().add_idx(q.map_idx(x), q.map_idx(y));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn subgroup_from_set_rejects_non_subgroups() {
        let z6 = g(&[6]);
        assert!(z6.subgroup_from_set(&z6.subset([0, 1]).unwrap()).is_err());
        assert!(z6.subgroup_from_set(&z6.subset([2, 4]).unwrap()).is_err());
    }
}
