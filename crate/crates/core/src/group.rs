//! Cayley-table groups and the subgroup-level constructions the solvers
//! consume: centralizers, centers, cosets, quotients, normal closures,
//! minimal normal subgroups and inner-automorphism restrictions.
//!
//! Element `0` is the identity in every `CayleyGroup`; quotients and products
//! relabel canonically (cosets by minimal member, pairs lexicographically),
//! so identical inputs always produce identical outputs.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::GroupError;
use crate::perm::Perm;

/// Shared handle to an immutable group.  Subgroups and homomorphisms keep
/// one of these so they stay self-contained.
pub type GroupRef = Arc<CayleyGroup>;

/// A finite group given by its full multiplication table.
///
/// Invariants: each row and column is a permutation of `0..n-1`, element 0 is
/// a two-sided identity, and `inverse` is consistent with the table.
/// Associativity is an O(n^3) check left to [`CayleyGroup::validate_associativity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGroup {
    name: String,
    order: usize,
    table: Vec<Vec<u32>>,
    inverse: Vec<u32>,
}

impl CayleyGroup {
    /// Validates the Latin-square and identity invariants and computes the
    /// inverse map.  Associativity is not checked here.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<u32>>) -> Result<GroupRef, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::BadSeries("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::RowNotLatin(i));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x as usize >= n || seen[x as usize] {
                    return Err(GroupError::RowNotLatin(i));
                }
                seen[x as usize] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                let x = row[j];
                if seen[x as usize] {
                    return Err(GroupError::ColumnNotLatin(j));
                }
                seen[x as usize] = true;
            }
        }
        for x in 0..n {
            if table[0][x] != x as u32 || table[x][0] != x as u32 {
                return Err(GroupError::IdentityBroken(x));
            }
        }
        let mut inverse = vec![0u32; n];
        for x in 0..n {
            match (0..n).find(|&y| table[x][y] == 0) {
                Some(y) if table[y][x] == 0 => inverse[x] = y as u32,
                _ => return Err(GroupError::InverseMissing(x)),
            }
        }
        Ok(Arc::new(CayleyGroup {
            name: name.into(),
            order: n,
            table,
            inverse,
        }))
    }

    pub fn trivial() -> GroupRef {
        CayleyGroup::from_table("1", vec![vec![0]]).expect("trivial table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn inverse_map(&self) -> &[u32] {
        &self.inverse
    }

    /// `g^-1 a g`.
    #[inline]
    pub fn conj(&self, a: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), a), g)
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// The full O(n^3) associativity pass; opt-in for untrusted input.
    pub fn validate_associativity(&self) -> Result<(), GroupError> {
        let n = self.order;
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let ab = self.mul(a, b);
                for c in 0..n as u32 {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(GroupError::NotAssociative(a as usize, b as usize, c as usize));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order as u32;
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn check_index(&self, x: u32) -> Result<(), GroupError> {
        if (x as usize) < self.order {
            Ok(())
        } else {
            Err(GroupError::IndexOutOfRange {
                index: x as usize,
                order: self.order,
            })
        }
    }
}

/// A subgroup stored as an explicit sorted element list.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: GroupRef,
    elements: Vec<u32>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.elements == other.elements
    }
}
impl Eq for Subgroup {}

impl Subgroup {
    /// Wraps a sorted element list after checking the subgroup axioms.
    pub fn new(parent: &GroupRef, mut elements: Vec<u32>) -> Result<Subgroup, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        for &x in &elements {
            parent.check_index(x)?;
        }
        let sub = Subgroup {
            parent: parent.clone(),
            elements,
        };
        sub.check_closed()?;
        Ok(sub)
    }

    fn check_closed(&self) -> Result<(), GroupError> {
        if self.elements.binary_search(&0).is_err() {
            return Err(GroupError::NotSubgroup("missing identity".into()));
        }
        for &a in &self.elements {
            if !self.contains(self.parent.inv(a)) {
                return Err(GroupError::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &self.elements {
                if !self.contains(self.parent.mul(a, b)) {
                    return Err(GroupError::NotSubgroup(format!("product {a}*{b} escapes")));
                }
            }
        }
        if self.parent.order() % self.elements.len() != 0 {
            return Err(GroupError::NotSubgroup("order does not divide parent".into()));
        }
        Ok(())
    }

    pub fn parent(&self) -> &GroupRef {
        &self.parent
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Position of an element inside the sorted element list.
    pub fn position_of(&self, x: u32) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole_group(&self) -> bool {
        self.elements.len() == self.parent.order()
    }

    /// Re-indexes the subgroup as a standalone group.  Element `k` of the
    /// result is the `k`-th smallest member, so the identity stays at 0 and
    /// nested subgroups keep consistent relative positions.
    pub fn as_group(&self, name: impl Into<String>) -> GroupRef {
        let k = self.elements.len();
        let pos: HashMap<u32, u32> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        let table = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| pos[&self.parent.mul(self.elements[i], self.elements[j])])
                    .collect()
            })
            .collect();
        CayleyGroup::from_table(name, table).expect("subgroup closure guarantees a valid table")
    }

    /// Maps element indices of `self.as_group(..)` back to parent indices.
    pub fn embed_index(&self, local: u32) -> u32 {
        self.elements[local as usize]
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

/// A homomorphism between Cayley groups, stored as a full image array.
#[derive(Debug, Clone)]
pub struct GroupHom {
    domain: GroupRef,
    codomain: GroupRef,
    image: Vec<u32>,
}

impl GroupHom {
    pub fn new(domain: &GroupRef, codomain: &GroupRef, image: Vec<u32>) -> Result<GroupHom, GroupError> {
        if image.len() != domain.order() {
            return Err(GroupError::IndexOutOfRange {
                index: image.len(),
                order: domain.order(),
            });
        }
        for &y in &image {
            codomain.check_index(y)?;
        }
        if image[0] != 0 {
            return Err(GroupError::NotHomomorphism(0, 0));
        }
        for a in 0..domain.order() as u32 {
            for b in 0..domain.order() as u32 {
                let lhs = image[domain.mul(a, b) as usize];
                let rhs = codomain.mul(image[a as usize], image[b as usize]);
                if lhs != rhs {
                    return Err(GroupError::NotHomomorphism(a as usize, b as usize));
                }
            }
        }
        Ok(GroupHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            image,
        })
    }

    pub fn domain(&self) -> &GroupRef {
        &self.domain
    }

    pub fn codomain(&self) -> &GroupRef {
        &self.codomain
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.image[x as usize]
    }

    pub fn image_array(&self) -> &[u32] {
        &self.image
    }

    pub fn is_bijective(&self) -> bool {
        if self.domain.order() != self.codomain.order() {
            return false;
        }
        let mut seen = vec![false; self.codomain.order()];
        for &y in &self.image {
            if seen[y as usize] {
                return false;
            }
            seen[y as usize] = true;
        }
        true
    }

    /// Preimage of a subgroup of the codomain.
    pub fn preimage(&self, sub: &Subgroup) -> Result<Subgroup, GroupError> {
        let elems = (0..self.domain.order() as u32)
            .filter(|&x| sub.contains(self.apply(x)))
            .collect();
        Subgroup::new(&self.domain, elems)
    }

    /// Image of a subgroup of the domain.
    pub fn image_of(&self, sub: &Subgroup) -> Result<Subgroup, GroupError> {
        let elems: Vec<u32> = sub.elements().iter().map(|&x| self.apply(x)).collect();
        Subgroup::new(&self.codomain, elems)
    }
}

/// Closure of a seed set under products; inverses follow from finiteness.
fn close_under_product(g: &CayleyGroup, seeds: &[u32]) -> Vec<u32> {
    let mut member = vec![false; g.order()];
    member[0] = true;
    let mut frontier: Vec<u32> = vec![0];
    for &s in seeds {
        if !member[s as usize] {
            member[s as usize] = true;
            frontier.push(s);
        }
    }
    let mut head = 0;
    while head < frontier.len() {
        let x = frontier[head];
        head += 1;
        for &s in seeds {
            let y = g.mul(x, s);
            if !member[y as usize] {
                member[y as usize] = true;
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<u32> = frontier;
    out.sort_unstable();
    out
}

/// Smallest subgroup of `g` containing `seeds`.
pub fn subgroup_generated(g: &GroupRef, seeds: &[u32]) -> Result<Subgroup, GroupError> {
    for &s in seeds {
        g.check_index(s)?;
    }
    Subgroup::new(g, close_under_product(g, seeds))
}

/// A small generating sequence for a subgroup, chosen greedily over the
/// element list; deterministic and usually close to minimal.
pub fn generating_sequence(sub: &Subgroup) -> Vec<u32> {
    let g = sub.parent();
    let mut gens: Vec<u32> = Vec::new();
    let mut have: BTreeSet<u32> = [0u32].into();
    for &x in sub.elements() {
        if !have.contains(&x) {
            gens.push(x);
            have = close_under_product(g, &gens).into_iter().collect();
            if have.len() == sub.order() {
                break;
            }
        }
    }
    gens
}

/// Smallest normal subgroup of `g` containing `seeds`: close the seeds under
/// conjugation by all of `g`, then under products.
pub fn normal_closure(g: &GroupRef, seeds: &[u32]) -> Result<Subgroup, GroupError> {
    for &s in seeds {
        g.check_index(s)?;
    }
    let mut conj_seeds: BTreeSet<u32> = BTreeSet::new();
    for &s in seeds {
        for t in 0..g.order() as u32 {
            conj_seeds.insert(g.conj(s, t));
        }
    }
    let seed_vec: Vec<u32> = conj_seeds.into_iter().collect();
    Subgroup::new(g, close_under_product(g, &seed_vec))
}

/// `{g in G | gh = hg for all h in H}`.
pub fn centralizer(g: &GroupRef, h: &Subgroup) -> Result<Subgroup, GroupError> {
    if !Arc::ptr_eq(g, h.parent()) {
        return Err(GroupError::ParentMismatch);
    }
    let elems = (0..g.order() as u32)
        .filter(|&x| h.elements().iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
        .collect();
    Subgroup::new(g, elems)
}

/// Center of `h`, as a subgroup of the same parent.
pub fn center(h: &Subgroup) -> Result<Subgroup, GroupError> {
    let g = h.parent();
    let elems = h
        .elements()
        .iter()
        .copied()
        .filter(|&x| h.elements().iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
        .collect();
    Subgroup::new(g, elems)
}

pub fn is_normal(g: &GroupRef, h: &Subgroup) -> bool {
    h.elements()
        .iter()
        .all(|&x| (0..g.order() as u32).all(|t| h.contains(g.conj(x, t))))
}

/// Restriction to `h` of conjugation by `x`, as a permutation of `h`'s
/// element positions.  Requires `x` to normalize `h`.
pub fn inn_restriction(g: &GroupRef, h: &Subgroup, x: u32) -> Result<Perm, GroupError> {
    g.check_index(x)?;
    let mut image = Vec::with_capacity(h.order());
    for &e in h.elements() {
        let c = g.conj(e, x);
        match h.position_of(c) {
            Some(p) => image.push(p as u32),
            None => return Err(GroupError::NotNormalizedBy(x as usize)),
        }
    }
    Ok(Perm::from_images(image).expect("conjugation is a bijection"))
}

/// The right-coset partition of `g` by a subgroup, blocks ordered by their
/// minimal member so the subgroup itself is always block 0.
#[derive(Debug, Clone)]
pub struct Cosets {
    blocks: Vec<Vec<u32>>,
    block_of: Vec<u32>,
}

impl Cosets {
    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    pub fn coset_of(&self, x: u32) -> u32 {
        self.block_of[x as usize]
    }

    /// Minimal element of each coset, in block order.
    pub fn representative(&self, block: u32) -> u32 {
        self.blocks[block as usize][0]
    }
}

pub fn cosets(g: &GroupRef, h: &Subgroup) -> Result<Cosets, GroupError> {
    if !Arc::ptr_eq(g, h.parent()) {
        return Err(GroupError::ParentMismatch);
    }
    let n = g.order();
    let mut block_of = vec![u32::MAX; n];
    let mut blocks = Vec::new();
    for x in 0..n as u32 {
        if block_of[x as usize] != u32::MAX {
            continue;
        }
        let id = blocks.len() as u32;
        let mut blk: Vec<u32> = h.elements().iter().map(|&e| g.mul(e, x)).collect();
        blk.sort_unstable();
        for &y in &blk {
            block_of[y as usize] = id;
        }
        blocks.push(blk);
    }
    Ok(Cosets { blocks, block_of })
}

/// Quotient `g/h` for normal `h`, with the projection homomorphism.
/// Coset indices follow [`cosets`] ordering, so the identity coset is 0.
pub fn quotient(g: &GroupRef, h: &Subgroup) -> Result<(GroupRef, GroupHom), GroupError> {
    if !is_normal(g, h) {
        let bad = (0..g.order() as u32)
            .find(|&t| h.elements().iter().any(|&x| !h.contains(g.conj(x, t))))
            .unwrap_or(0);
        return Err(GroupError::NotNormal(bad as usize));
    }
    let cs = cosets(g, h)?;
    let m = cs.count();
    let table = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| cs.coset_of(g.mul(cs.representative(i as u32), cs.representative(j as u32))))
                .collect()
        })
        .collect();
    let q = CayleyGroup::from_table(format!("{}/{}", g.name(), h.order()), table)?;
    let proj = GroupHom::new(g, &q, (0..g.order() as u32).map(|x| cs.coset_of(x)).collect())?;
    Ok((q, proj))
}

/// Direct product with lexicographic pair indexing `(a, b) -> a*|G2| + b`.
pub struct DirectProduct {
    pub group: GroupRef,
    pub embed_left: GroupHom,
    pub embed_right: GroupHom,
    pub left_factor: Subgroup,
    pub right_factor: Subgroup,
}

pub fn direct_product(g1: &GroupRef, g2: &GroupRef) -> DirectProduct {
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 * n2;
    let enc = |a: u32, b: u32| a * n2 as u32 + b;
    let mut table = vec![vec![0u32; n]; n];
    for a1 in 0..n1 as u32 {
        for b1 in 0..n2 as u32 {
            for a2 in 0..n1 as u32 {
                for b2 in 0..n2 as u32 {
                    table[enc(a1, b1) as usize][enc(a2, b2) as usize] =
                        enc(g1.mul(a1, a2), g2.mul(b1, b2));
                }
            }
        }
    }
    let p = CayleyGroup::from_table(format!("{}x{}", g1.name(), g2.name()), table)
        .expect("product of valid tables is valid");
    let embed_left = GroupHom::new(g1, &p, (0..n1 as u32).map(|a| enc(a, 0)).collect())
        .expect("left embedding is a homomorphism");
    let embed_right = GroupHom::new(g2, &p, (0..n2 as u32).map(|b| enc(0, b)).collect())
        .expect("right embedding is a homomorphism");
    let left_factor = Subgroup::new(&p, (0..n1 as u32).map(|a| enc(a, 0)).collect()).unwrap();
    let right_factor = Subgroup::new(&p, (0..n2 as u32).map(|b| enc(0, b)).collect()).unwrap();
    DirectProduct {
        group: p,
        embed_left,
        embed_right,
        left_factor,
        right_factor,
    }
}

/// All minimal (by inclusion) elements of `{normal closure of x | x != 1}`,
/// deduplicated.  Each is characteristically simple.
pub fn minimal_normal_subgroups(g: &GroupRef) -> Vec<Subgroup> {
    let mut closures: Vec<Subgroup> = Vec::new();
    for x in 1..g.order() as u32 {
        let n = normal_closure(g, &[x]).expect("closure of a valid element");
        if !closures.iter().any(|c| c.elements() == n.elements()) {
            closures.push(n);
        }
    }
    let mut minimal: Vec<Subgroup> = Vec::new();
    'outer: for c in &closures {
        for d in &closures {
            if d.elements().len() < c.elements().len() && d.is_subset_of(c) {
                continue 'outer;
            }
        }
        minimal.push(c.clone());
    }
    minimal.sort_by(|a, b| a.elements().cmp(b.elements()));
    minimal
}

pub fn is_simple(g: &GroupRef) -> bool {
    if g.order() == 1 {
        return false;
    }
    let mins = minimal_normal_subgroups(g);
    mins.len() == 1 && mins[0].order() == g.order()
}

/// Tests whether `g` is a direct product of isomorphic simple minimal normal
/// subgroups; returns the factor decomposition when it is.
pub fn is_characteristically_simple(g: &GroupRef) -> Option<Vec<Subgroup>> {
    if g.order() == 1 {
        return None;
    }
    if is_simple(g) {
        return Some(vec![Subgroup::new(g, (0..g.order() as u32).collect()).unwrap()]);
    }
    let mins = minimal_normal_subgroups(g);
    let mut factors: Vec<Subgroup> = Vec::new();
    let mut span = subgroup_generated(g, &[]).unwrap();
    for n in &mins {
        let meets_trivially = n.elements().iter().filter(|&&x| span.contains(x)).count() == 1;
        if meets_trivially {
            let mut seeds: Vec<u32> = span.elements().to_vec();
            seeds.extend_from_slice(n.elements());
            span = subgroup_generated(g, &seeds).unwrap();
            factors.push(n.clone());
        }
    }
    if span.order() != g.order() {
        return None;
    }
    let first = factors[0].as_group("f0");
    for f in &factors {
        let fg = f.as_group("f");
        if !is_simple(&fg) || fg.order() != first.order() {
            return None;
        }
    }
    for f in &factors[1..] {
        if !crate::homsearch::isomorphic(&first, &f.as_group("f")) {
            return None;
        }
    }
    Some(factors)
}

/// The full normal-subgroup lattice, built by join-closing the normal
/// closures of single elements.  Intended for desk-scale groups.
pub fn normal_subgroups(g: &GroupRef) -> Vec<Subgroup> {
    let mut lattice: Vec<Vec<u32>> = vec![vec![0]];
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    for x in 1..g.order() as u32 {
        let n = normal_closure(g, &[x]).unwrap();
        if !lattice.contains(&n.elements().to_vec()) {
            lattice.push(n.elements().to_vec());
            frontier.push(n.elements().to_vec());
        }
    }
    while let Some(a) = frontier.pop() {
        for i in 0..lattice.len() {
            let mut seeds = a.clone();
            seeds.extend_from_slice(&lattice[i]);
            let join = subgroup_generated(g, &seeds).unwrap();
            if !lattice.contains(&join.elements().to_vec()) {
                lattice.push(join.elements().to_vec());
                frontier.push(join.elements().to_vec());
            }
        }
    }
    lattice.sort();
    lattice
        .into_iter()
        .map(|els| Subgroup::new(g, els).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn s3() -> GroupRef {
        oracle::catalog_group("S3")
    }

    fn q8() -> GroupRef {
        oracle::catalog_group("Q8")
    }

    #[test]
    fn cyclic_subgroup_generated() {
        let c4 = oracle::catalog_group("C4");
        let sub = subgroup_generated(&c4, &[2]).unwrap();
        assert_eq!(sub.elements(), &[0, 2]);
        let empty = subgroup_generated(&c4, &[]).unwrap();
        assert_eq!(empty.elements(), &[0]);
    }

    #[test]
    fn s3_generated_by_transposition_and_cycle() {
        let g = s3();
        let transposition = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        let three_cycle = (1..6).find(|&x| g.element_order(x) == 3).unwrap();
        let sub = subgroup_generated(&g, &[transposition, three_cycle]).unwrap();
        assert_eq!(sub.order(), 6);
    }

    #[test]
    fn normal_closure_of_transposition_is_s3() {
        let g = s3();
        let t = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        assert_eq!(normal_closure(&g, &[t]).unwrap().order(), 6);
    }

    #[test]
    fn normal_closure_in_abelian_is_generated_subgroup() {
        let c6 = oracle::catalog_group("C6");
        let a = normal_closure(&c6, &[2]).unwrap();
        let b = subgroup_generated(&c6, &[2]).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn q8_normal_closure_of_center() {
        let g = q8();
        // -1 is the unique element of order 2 in Q8.
        let minus_one = (1..8).find(|&x| g.element_order(x) == 2).unwrap();
        let n = normal_closure(&g, &[minus_one]).unwrap();
        assert_eq!(n.order(), 2);
    }

    #[test]
    fn centralizers_and_centers() {
        let g = s3();
        let a3 = normal_closure(&g, &[(1..6).find(|&x| g.element_order(x) == 3).unwrap()]).unwrap();
        assert_eq!(a3.order(), 3);
        let c = centralizer(&g, &a3).unwrap();
        assert_eq!(c.elements(), a3.elements());

        let whole = Subgroup::new(&g, (0..6).collect()).unwrap();
        assert_eq!(center(&whole).unwrap().order(), 1);

        let q = q8();
        let whole_q = Subgroup::new(&q, (0..8).collect()).unwrap();
        assert_eq!(centralizer(&q, &whole_q).unwrap().order(), 2);
        assert_eq!(center(&whole_q).unwrap().order(), 2);

        let c6 = oracle::catalog_group("C6");
        let h = subgroup_generated(&c6, &[3]).unwrap();
        assert_eq!(centralizer(&c6, &h).unwrap().order(), 6);
    }

    #[test]
    fn inn_restriction_behaviour() {
        let g = s3();
        let a3 = normal_closure(&g, &[(1..6).find(|&x| g.element_order(x) == 3).unwrap()]).unwrap();
        let t = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        let p = inn_restriction(&g, &a3, t).unwrap();
        // Conjugation by a transposition swaps the two 3-cycles.
        assert!(!p.is_identity());
        assert_eq!(p.apply(0), 0);

        // Central elements act trivially.
        for &z in centralizer(&g, &a3).unwrap().elements() {
            if a3.contains(z) {
                assert!(inn_restriction(&g, &a3, z).unwrap().is_identity());
            }
        }

        // Multiplicativity: inn(x) inn(y) = inn(xy).
        for x in 0..6 {
            for y in 0..6 {
                let lhs = inn_restriction(&g, &a3, x)
                    .unwrap()
                    .compose(&inn_restriction(&g, &a3, y).unwrap());
                let rhs = inn_restriction(&g, &a3, g.mul(x, y)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn coset_partitions() {
        let c4 = oracle::catalog_group("C4");
        let h = subgroup_generated(&c4, &[2]).unwrap();
        let cs = cosets(&c4, &h).unwrap();
        assert_eq!(cs.blocks(), &[vec![0, 2], vec![1, 3]]);

        let whole = Subgroup::new(&c4, (0..4).collect()).unwrap();
        assert_eq!(cosets(&c4, &whole).unwrap().count(), 1);

        let trivial = subgroup_generated(&c4, &[]).unwrap();
        assert_eq!(cosets(&c4, &trivial).unwrap().count(), 4);
    }

    #[test]
    fn quotient_s3_by_a3() {
        let g = s3();
        let a3 = normal_closure(&g, &[(1..6).find(|&x| g.element_order(x) == 3).unwrap()]).unwrap();
        let (q, proj) = quotient(&g, &a3).unwrap();
        assert_eq!(q.order(), 2);
        // Kernel of the projection is exactly A3.
        let kernel: Vec<u32> = (0..6).filter(|&x| proj.apply(x) == 0).collect();
        assert_eq!(kernel, a3.elements());
    }

    #[test]
    fn quotient_edge_cases() {
        let g = s3();
        let whole = Subgroup::new(&g, (0..6).collect()).unwrap();
        let (q, _) = quotient(&g, &whole).unwrap();
        assert_eq!(q.order(), 1);

        let trivial = subgroup_generated(&g, &[]).unwrap();
        let (q, proj) = quotient(&g, &trivial).unwrap();
        assert_eq!(q.order(), 6);
        assert!(proj.is_bijective());
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let g = s3();
        let t = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        let h = subgroup_generated(&g, &[t]).unwrap();
        assert!(quotient(&g, &h).is_err());
    }

    #[test]
    fn direct_products() {
        let c2 = oracle::catalog_group("C2");
        let c3 = oracle::catalog_group("C3");
        let p = direct_product(&c2, &c2);
        assert_eq!(p.group.order(), 4);
        assert!((1..4).all(|x| p.group.element_order(x) == 2));

        let p6 = direct_product(&c2, &c3);
        assert_eq!(p6.group.order(), 6);
        assert!((1..6).any(|x| p6.group.element_order(x) == 6));

        // Factors centralize each other.
        for &a in p6.left_factor.elements() {
            for &b in p6.right_factor.elements() {
                assert_eq!(p6.group.mul(a, b), p6.group.mul(b, a));
            }
        }
        assert!(is_normal(&p6.group, &p6.left_factor));
        assert!(is_normal(&p6.group, &p6.right_factor));

        let triv = CayleyGroup::trivial();
        let s3 = s3();
        let px = direct_product(&s3, &triv);
        assert_eq!(px.group.order(), 6);
        assert_eq!(px.group.table(), s3.table());
    }

    #[test]
    fn minimal_normals() {
        let g = s3();
        let mins = minimal_normal_subgroups(&g);
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].order(), 3);

        let v4 = oracle::catalog_group("C2xC2");
        let mins = minimal_normal_subgroups(&v4);
        assert_eq!(mins.len(), 3);
        assert!(mins.iter().all(|m| m.order() == 2));

        let c5 = oracle::catalog_group("C5");
        let mins = minimal_normal_subgroups(&c5);
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].order(), 5);
    }

    #[test]
    fn simplicity_predicates() {
        let g = s3();
        let a3 = normal_closure(&g, &[(1..6).find(|&x| g.element_order(x) == 3).unwrap()]).unwrap();
        assert!(is_normal(&g, &a3));
        let t = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        assert!(!is_normal(&g, &subgroup_generated(&g, &[t]).unwrap()));

        assert!(is_simple(&oracle::catalog_group("C7")));
        assert!(!is_simple(&oracle::catalog_group("C4")));
        assert!(!is_simple(&g));

        assert!(is_characteristically_simple(&oracle::catalog_group("C4")).is_none());
        let f = is_characteristically_simple(&oracle::catalog_group("C3xC3")).unwrap();
        assert_eq!(f.len(), 2);
        let f = is_characteristically_simple(&oracle::catalog_group("C2xC2")).unwrap();
        assert_eq!(f.len(), 2);
        assert!(is_characteristically_simple(&oracle::catalog_group("C6")).is_none());
    }

    #[test]
    fn subgroup_invariants_hold_for_all_constructions() {
        for (_, g) in oracle::catalog().into_iter().filter(|(_, g)| g.order() <= 12) {
            for sub in normal_subgroups(&g) {
                assert!(sub.contains(0));
                for &a in sub.elements() {
                    assert!(sub.contains(g.inv(a)));
                    for &b in sub.elements() {
                        assert!(sub.contains(g.mul(a, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn centralizer_of_normal_subgroup_is_normal() {
        for name in ["S3", "D4", "Q8", "A4", "C6"] {
            let g = oracle::catalog_group(name);
            for h in normal_subgroups(&g) {
                let c = centralizer(&g, &h).unwrap();
                assert!(is_normal(&g, &c));
            }
        }
    }
}
