//! Brute-force ground truth for the test suites, plus the fixture catalog.
//!
//! Everything here is deliberately independent of the solver modules: the
//! only shared pieces are the `CayleyGroup` type and `Perm` composition, so
//! oracle results can vouch for solver results and vice versa.  Nothing in
//! this module is built for speed; fixtures stay at order <= 24 and ad-hoc
//! constructions below order ~64.

use std::collections::BTreeSet;

use crate::group::{CayleyGroup, GroupRef};
use crate::perm::Perm;
use crate::permgroup::PermGroup;

// ---------------------------------------------------------------------------
// Fixture constructions
// ---------------------------------------------------------------------------

/// Cyclic group of order `k`: addition mod k.
pub fn cyclic(k: usize) -> GroupRef {
    let table = (0..k)
        .map(|i| (0..k).map(|j| ((i + j) % k) as u32).collect())
        .collect();
    CayleyGroup::from_table(format!("C{k}"), table).expect("cyclic table")
}

/// Direct product, pairs indexed `(a, b) -> a*|G2| + b`.
pub fn product(name: &str, g1: &GroupRef, g2: &GroupRef) -> GroupRef {
    let (n1, n2) = (g1.order(), g2.order());
    let enc = |a: u32, b: u32| a * n2 as u32 + b;
    let mut table = vec![vec![0u32; n1 * n2]; n1 * n2];
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
    CayleyGroup::from_table(name, table).expect("product table")
}

/// Direct product of cyclic groups of the given orders.
pub fn abelian(orders: &[usize]) -> GroupRef {
    assert!(!orders.is_empty());
    let mut g = cyclic(orders[0]);
    let mut name = format!("C{}", orders[0]);
    for &k in &orders[1..] {
        name = format!("{name}xC{k}");
        g = product(&name, &g, &cyclic(k));
    }
    g
}

/// Dihedral group of order `2n`: rotations `r^k` and reflections `r^k s`,
/// with `s r = r^-1 s`.  Index of `r^k s^e` is `2k + e`.
pub fn dihedral(n: usize) -> GroupRef {
    assert!(n >= 1);
    let enc = |k: usize, e: usize| (2 * k + e) as u32;
    let mut table = vec![vec![0u32; 2 * n]; 2 * n];
    for k1 in 0..n {
        for e1 in 0..2usize {
            for k2 in 0..n {
                for e2 in 0..2usize {
                    let k = if e1 == 0 { (k1 + k2) % n } else { (k1 + n - k2 % n) % n };
                    table[enc(k1, e1) as usize][enc(k2, e2) as usize] = enc(k, e1 ^ e2);
                }
            }
        }
    }
    CayleyGroup::from_table(format!("D{n}"), table).expect("dihedral table")
}

/// Quaternion group: elements `{1,-1,i,-i,j,-j,k,-k}` indexed in that order.
pub fn quaternion() -> GroupRef {
    // (sign, axis) with axes 1,i,j,k = 0..3; index = 2*axis + (sign < 0).
    let dec = |x: u32| (if x % 2 == 0 { 1i32 } else { -1 }, (x / 2) as usize);
    let enc = |s: i32, a: usize| (2 * a + usize::from(s < 0)) as u32;
    let mul = |x: u32, y: u32| {
        let (s1, a1) = dec(x);
        let (s2, a2) = dec(y);
        if a1 == 0 {
            enc(s1 * s2, a2)
        } else if a2 == 0 {
            enc(s1 * s2, a1)
        } else if a1 == a2 {
            enc(-s1 * s2, 0)
        } else {
            // i*j = k, j*k = i, k*i = j; reversed order flips the sign.
            let (a, flip) = match (a1, a2) {
                (1, 2) => (3, 1),
                (2, 3) => (1, 1),
                (3, 1) => (2, 1),
                (2, 1) => (3, -1),
                (3, 2) => (1, -1),
                (1, 3) => (2, -1),
                _ => unreachable!(),
            };
            enc(s1 * s2 * flip, a)
        }
    };
    let table = (0..8).map(|i| (0..8).map(|j| mul(i, j)).collect()).collect();
    CayleyGroup::from_table("Q8", table).expect("quaternion table")
}

/// Dicyclic group of order 12: `<a, b | a^6 = 1, b^2 = a^3, b a b^-1 = a^-1>`,
/// elements `a^m b^e` indexed `2m + e`.
pub fn dicyclic12() -> GroupRef {
    let enc = |m: usize, e: usize| (2 * m + e) as u32;
    let mut table = vec![vec![0u32; 12]; 12];
    for m1 in 0..6 {
        for e1 in 0..2usize {
            for m2 in 0..6 {
                for e2 in 0..2usize {
                    // b a^m = a^-m b, and b^2 = a^3.
                    let m = if e1 == 0 { m1 + m2 } else { m1 + 6 - m2 };
                    let (m, e) = if e1 == 1 && e2 == 1 {
                        (m + 3, 0)
                    } else {
                        (m, e1 ^ e2)
                    };
                    table[enc(m1, e1) as usize][enc(m2, e2) as usize] = enc(m % 6, e);
                }
            }
        }
    }
    CayleyGroup::from_table("Dic3", table).expect("dicyclic table")
}

/// `C3 : C4` with the order-4 generator inverting the order-3 one; pairs
/// `(x, y)` indexed `4x + y`.  Isomorphic to Dic3 but differently labeled,
/// which makes the two a useful isomorphism fixture pair.
pub fn c3_semi_c4() -> GroupRef {
    let enc = |x: usize, y: usize| (4 * x + y) as u32;
    let mut table = vec![vec![0u32; 12]; 12];
    for x1 in 0..3 {
        for y1 in 0..4usize {
            for x2 in 0..3 {
                for y2 in 0..4usize {
                    let x2t = if y1 % 2 == 0 { x2 } else { (3 - x2) % 3 };
                    table[enc(x1, y1) as usize][enc(x2, y2) as usize] =
                        enc((x1 + x2t) % 3, (y1 + y2) % 4);
                }
            }
        }
    }
    CayleyGroup::from_table("C3:C4", table).expect("semidirect table")
}

/// Group generated by permutations, elements sorted lexicographically by
/// image array (the identity always lands at index 0).
pub fn from_permutations(name: &str, gens: &[Perm]) -> GroupRef {
    let degree = gens[0].degree();
    let mut elements: BTreeSet<Perm> = BTreeSet::new();
    elements.insert(Perm::identity(degree));
    let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = p.compose(g);
            if elements.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    let elems: Vec<Perm> = elements.into_iter().collect();
    let index_of = |p: &Perm| elems.binary_search(p).expect("closed") as u32;
    let table = elems
        .iter()
        .map(|a| elems.iter().map(|b| index_of(&a.compose(b))).collect())
        .collect();
    CayleyGroup::from_table(name, table).expect("permutation closure table")
}

pub fn symmetric(name: &str, n: usize) -> GroupRef {
    let gens = vec![
        Perm::from_cycle(n, &[0, 1]),
        Perm::from_cycle(n, &(0..n as u32).collect::<Vec<_>>()),
    ];
    from_permutations(name, &gens)
}

pub fn alternating4() -> GroupRef {
    let gens = vec![
        Perm::from_cycle(4, &[0, 1]).compose(&Perm::from_cycle(4, &[2, 3])),
        Perm::from_cycle(4, &[0, 1, 2]),
    ];
    from_permutations("A4", &gens)
}

pub fn alternating5() -> GroupRef {
    let gens = vec![
        Perm::from_cycle(5, &[0, 1]).compose(&Perm::from_cycle(5, &[2, 3])),
        Perm::from_cycle(5, &[0, 1, 2, 3, 4]),
    ];
    from_permutations("A5", &gens)
}

/// The fixture catalog: all groups of order <= 24 the acceptance suites run
/// over.  Every table passes the full associativity validation (checked in
/// tests).
pub fn catalog() -> Vec<(String, GroupRef)> {
    let mut out: Vec<(String, GroupRef)> = Vec::new();
    for k in 2..=16 {
        out.push((format!("C{k}"), cyclic(k)));
    }
    let c2 = cyclic(2);
    let c3 = cyclic(3);
    let c4 = cyclic(4);
    out.push(("C2xC2".into(), product("C2xC2", &c2, &c2)));
    out.push(("C2xC4".into(), product("C2xC4", &c2, &c4)));
    let c2xc2 = product("C2xC2", &c2, &c2);
    out.push(("C2xC2xC2".into(), product("C2xC2xC2", &c2xc2, &c2)));
    out.push(("C3xC3".into(), product("C3xC3", &c3, &c3)));
    out.push(("S3".into(), symmetric("S3", 3)));
    out.push(("D4".into(), dihedral(4)));
    out.push(("Q8".into(), quaternion()));
    out.push(("D5".into(), dihedral(5)));
    out.push(("D6".into(), dihedral(6)));
    out.push(("A4".into(), alternating4()));
    out.push(("Dic3".into(), dicyclic12()));
    out.push(("C3:C4".into(), c3_semi_c4()));
    out.push(("S4".into(), symmetric("S4", 4)));
    out
}

pub fn catalog_group(name: &str) -> GroupRef {
    catalog()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, g)| g)
        .unwrap_or_else(|| panic!("no catalog fixture named {name}"))
}

// ---------------------------------------------------------------------------
// Brute-force enumerators
// ---------------------------------------------------------------------------

fn brute_generating_set(g: &GroupRef) -> Vec<u32> {
    let n = g.order();
    let mut gens: Vec<u32> = Vec::new();
    let mut closed = vec![false; n];
    closed[0] = true;
    for x in 1..n as u32 {
        if closed[x as usize] {
            continue;
        }
        gens.push(x);
        // Re-close from scratch; fixture orders make this cheap.
        closed = vec![false; n];
        closed[0] = true;
        let mut size = 1;
        let mut frontier = vec![0u32];
        while let Some(y) = frontier.pop() {
            for &s in &gens {
                let z = g.mul(y, s);
                if !closed[z as usize] {
                    closed[z as usize] = true;
                    size += 1;
                    frontier.push(z);
                }
            }
        }
        if size == n {
            break;
        }
    }
    gens
}

/// Completes a generator-image assignment into a full map by multiplying out
/// words, then checks the whole multiplication table.  Returns the image
/// array when the assignment defines an automorphism-like bijection.
fn complete_and_check(
    g: &GroupRef,
    h: &GroupRef,
    gens: &[u32],
    images: &[u32],
) -> Option<Vec<u32>> {
    let n = g.order();
    let mut map = vec![u32::MAX; n];
    map[0] = 0;
    let mut reached = vec![0u32];
    let mut head = 0;
    while head < reached.len() {
        let x = reached[head];
        head += 1;
        for (i, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            if map[y as usize] == u32::MAX {
                map[y as usize] = h.mul(map[x as usize], images[i]);
                reached.push(y);
            }
        }
    }
    if map.iter().any(|&v| v == u32::MAX) {
        return None;
    }
    let mut seen = vec![false; n];
    for &v in &map {
        if seen[v as usize] {
            return None;
        }
        seen[v as usize] = true;
    }
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if map[g.mul(a, b) as usize] != h.mul(map[a as usize], map[b as usize]) {
                return None;
            }
        }
    }
    Some(map)
}

fn enumerate_hom_images(
    g: &GroupRef,
    h: &GroupRef,
    level_of: Option<(&dyn Fn(u32) -> usize, &dyn Fn(u32) -> usize)>,
) -> Vec<Vec<u32>> {
    if g.order() != h.order() {
        return Vec::new();
    }
    if g.order() == 1 {
        return vec![vec![0]];
    }
    let gens = brute_generating_set(g);
    let mut results = Vec::new();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(partial) = stack.pop() {
        if partial.len() == gens.len() {
            if let Some(map) = complete_and_check(g, h, &gens, &partial) {
                results.push(map);
            }
            continue;
        }
        let src = gens[partial.len()];
        // Push candidates in reverse so the stack pops them in ascending order.
        for cand in (0..h.order() as u32).rev() {
            if h.element_order(cand) != g.element_order(src) {
                continue;
            }
            if let Some((lv_g, lv_h)) = &level_of {
                if lv_g(src) != lv_h(cand) {
                    continue;
                }
            }
            let mut next = partial.clone();
            next.push(cand);
            stack.push(next);
        }
    }
    results.sort();
    results
}

/// Exhaustive list of all automorphisms of `g`, by backtracking over
/// generator images with order-profile pruning.
pub fn all_automorphisms(g: &GroupRef) -> Vec<Perm> {
    enumerate_hom_images(g, g, None)
        .into_iter()
        .map(|map| Perm::from_images(map).expect("verified bijection"))
        .collect()
}

/// Deepest series level containing each element: `level(x)` is the largest
/// `i` with `x` in `terms[i]`, where `terms[0]` is the whole group.
fn level_fn(terms: &[Vec<u32>]) -> impl Fn(u32) -> usize + '_ {
    move |x: u32| {
        terms
            .iter()
            .enumerate()
            .rev()
            .find(|(_, t)| t.binary_search(&x).is_ok())
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// All automorphisms of `g` mapping every listed term onto itself.
/// `terms` are sorted element lists, descending, starting with the whole
/// group and ending with `[0]`.
pub fn aut_fixing_series(g: &GroupRef, terms: &[Vec<u32>]) -> Vec<Perm> {
    let lv = level_fn(terms);
    enumerate_hom_images(g, g, Some((&lv, &lv)))
        .into_iter()
        .map(|map| Perm::from_images(map).expect("verified bijection"))
        .filter(|p| {
            terms
                .iter()
                .all(|t| t.iter().all(|&x| t.binary_search(&p.apply(x)).is_ok()))
        })
        .collect()
}

/// All isomorphisms `g1 -> g2` mapping `terms1[i]` onto `terms2[i]`.
pub fn iso_matching_series(
    g1: &GroupRef,
    terms1: &[Vec<u32>],
    g2: &GroupRef,
    terms2: &[Vec<u32>],
) -> Vec<Vec<u32>> {
    if terms1.len() != terms2.len() {
        return Vec::new();
    }
    let lv1 = level_fn(terms1);
    let lv2 = level_fn(terms2);
    enumerate_hom_images(g1, g2, Some((&lv1, &lv2)))
        .into_iter()
        .filter(|map| {
            terms1.iter().zip(terms2).all(|(t1, t2)| {
                t1.iter()
                    .all(|&x| t2.binary_search(&map[x as usize]).is_ok())
            })
        })
        .collect()
}

/// Every element of a permutation group, by plain closure over the listed
/// generators (no stabilizer chain involved).
pub fn brute_elements(g: &PermGroup) -> Vec<Perm> {
    let mut all: BTreeSet<Perm> = BTreeSet::new();
    all.insert(Perm::identity(g.degree()));
    let mut frontier = vec![Perm::identity(g.degree())];
    while let Some(p) = frontier.pop() {
        for gen in g.generators() {
            let q = p.compose(gen);
            if all.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    all.into_iter().collect()
}

/// `{g in G | delta^g = delta}` by exhaustive enumeration.
pub fn brute_set_stabilizer(g: &PermGroup, delta: &[u32]) -> Vec<Perm> {
    let mut target: Vec<u32> = delta.to_vec();
    target.sort_unstable();
    brute_elements(g)
        .into_iter()
        .filter(|p| p.apply_set(&target) == target)
        .collect()
}

/// `{g in G | delta^g = lambda}` by exhaustive enumeration.
pub fn brute_set_transporter(g: &PermGroup, delta: &[u32], lambda: &[u32]) -> Vec<Perm> {
    let mut target: Vec<u32> = lambda.to_vec();
    target.sort_unstable();
    brute_elements(g)
        .into_iter()
        .filter(|p| p.apply_set(delta) == target)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_tables_are_fully_valid() {
        let cat = catalog();
        assert_eq!(cat.len(), 28);
        for (name, g) in cat {
            assert!(g.order() <= 24, "{name} too large");
            g.validate_associativity()
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(all_automorphisms(&cyclic(2)).len(), 1);
        assert_eq!(all_automorphisms(&catalog_group("S3")).len(), 6);
        assert_eq!(all_automorphisms(&quaternion()).len(), 24);
        assert_eq!(all_automorphisms(&catalog_group("C2xC2xC2")).len(), 168);
        assert_eq!(all_automorphisms(&alternating4()).len(), 24);
    }

    #[test]
    fn oracle_outputs_form_groups() {
        for name in ["C6", "S3", "D4", "Q8"] {
            let g = catalog_group(name);
            let auts = all_automorphisms(&g);
            let set: BTreeSet<Perm> = auts.iter().cloned().collect();
            for a in &auts {
                assert!(set.contains(&a.inverse()));
                for b in &auts {
                    assert!(set.contains(&a.compose(b)));
                }
            }
        }
    }

    #[test]
    fn aut_of_simple_groups_is_small() {
        // |Aut(T)| <= |T|^2 for simple T; the cyclic primes are the simple
        // members of the catalog.
        for p in [2usize, 3, 5, 7, 11, 13] {
            let t = cyclic(p);
            assert!(all_automorphisms(&t).len() <= p * p);
        }
    }

    #[test]
    fn series_filters() {
        let g = catalog_group("S3");
        let a3: Vec<u32> = (0..6)
            .filter(|&x| g.element_order(x) != 2 || x == 0)
            .collect();
        let terms = vec![(0..6).collect::<Vec<u32>>(), a3, vec![0]];
        assert_eq!(aut_fixing_series(&g, &terms).len(), 6);

        let c7 = cyclic(7);
        let simple_terms = vec![(0..7).collect::<Vec<u32>>(), vec![0]];
        assert_eq!(
            aut_fixing_series(&c7, &simple_terms).len(),
            all_automorphisms(&c7).len()
        );

        let isos = iso_matching_series(&c7, &simple_terms, &c7, &simple_terms);
        assert!(isos.contains(&(0..7).collect::<Vec<u32>>()));
    }

    #[test]
    fn brute_stabilizer_on_c4() {
        let g = PermGroup::from_generators(vec![Perm::from_cycle(4, &[0, 1, 2, 3])]).unwrap();
        let stab = brute_set_stabilizer(&g, &[0, 2]);
        assert_eq!(stab.len(), 2);
        assert!(stab.contains(&Perm::identity(4)));
        assert!(stab.contains(&Perm::from_cycle(4, &[0, 2]).compose(&Perm::from_cycle(4, &[1, 3]))));
    }

    #[test]
    fn dic3_and_c3c4_have_identical_invariants() {
        let a = dicyclic12();
        let b = c3_semi_c4();
        let mut ord_a: Vec<usize> = (0..12).map(|x| a.element_order(x)).collect();
        let mut ord_b: Vec<usize> = (0..12).map(|x| b.element_order(x)).collect();
        ord_a.sort_unstable();
        ord_b.sort_unstable();
        assert_eq!(ord_a, ord_b);
        assert_ne!(a.table(), b.table());
    }
}
