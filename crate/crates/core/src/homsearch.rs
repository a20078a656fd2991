//! Backtracking search for isomorphisms and automorphisms of desk-scale
//! Cayley groups, by choosing images of a greedy generating sequence and
//! propagating multiplicative closure.
//!
//! The solvers use this to list automorphism groups of small sections.  It is
//! deliberately separate from the oracle's enumerator: the two share no code
//! beyond the core types, so each can vouch for the other in tests.

use crate::group::{generating_sequence, GroupRef, Subgroup};
use crate::perm::Perm;

/// Extends the partial map `gens[i] -> images[i]` (plus identity) to the
/// generated subgroup by closing under products.  Returns the full map if no
/// conflict arises, with `u32::MAX` marking still-unreached elements.
fn propagate(dom: &GroupRef, cod: &GroupRef, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let n = dom.order();
    let mut map = vec![u32::MAX; n];
    map[0] = 0;
    let mut known: Vec<u32> = vec![0];
    for (&g, &im) in gens.iter().zip(images) {
        if map[g as usize] == u32::MAX {
            map[g as usize] = im;
            known.push(g);
        } else if map[g as usize] != im {
            return None;
        }
    }
    // Close under products until stable; conflicts kill the branch.
    let mut head = 0;
    while head < known.len() {
        let a = known[head];
        head += 1;
        for i in 0..known.len() {
            let b = known[i];
            for (x, y) in [(a, b), (b, a)] {
                let prod = dom.mul(x, y);
                let want = cod.mul(map[x as usize], map[y as usize]);
                if map[prod as usize] == u32::MAX {
                    map[prod as usize] = want;
                    known.push(prod);
                } else if map[prod as usize] != want {
                    return None;
                }
            }
        }
    }
    Some(map)
}

fn search(
    dom: &GroupRef,
    cod: &GroupRef,
    gens: &[u32],
    chosen: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    stop_at_first: bool,
) -> bool {
    if chosen.len() == gens.len() {
        if let Some(map) = propagate(dom, cod, gens, chosen) {
            if map.iter().all(|&y| y != u32::MAX) {
                let mut seen = vec![false; cod.order()];
                if map.iter().all(|&y| {
                    let fresh = !seen[y as usize];
                    seen[y as usize] = true;
                    fresh
                }) {
                    out.push(map);
                    return stop_at_first;
                }
            }
        }
        return false;
    }
    let g = gens[chosen.len()];
    let want_order = dom.element_order(g);
    for cand in 0..cod.order() as u32 {
        if cod.element_order(cand) != want_order {
            continue;
        }
        chosen.push(cand);
        let viable = propagate(dom, cod, &gens[..chosen.len()], chosen).is_some();
        if viable && search(dom, cod, gens, chosen, out, stop_at_first) {
            chosen.pop();
            return true;
        }
        chosen.pop();
    }
    false
}

/// All isomorphisms `dom -> cod` as image arrays, in lexicographic order of
/// the generator-image choices.  Empty when the groups are not isomorphic.
pub fn list_isomorphisms(dom: &GroupRef, cod: &GroupRef) -> Vec<Vec<u32>> {
    if dom.order() != cod.order() {
        return Vec::new();
    }
    if dom.order() == 1 {
        return vec![vec![0]];
    }
    let whole = Subgroup::new(dom, (0..dom.order() as u32).collect()).unwrap();
    let gens = generating_sequence(&whole);
    let mut out = Vec::new();
    search(dom, cod, &gens, &mut Vec::new(), &mut out, false);
    out
}

pub fn first_isomorphism(dom: &GroupRef, cod: &GroupRef) -> Option<Vec<u32>> {
    if dom.order() != cod.order() {
        return None;
    }
    if dom.order() == 1 {
        return Some(vec![0]);
    }
    let whole = Subgroup::new(dom, (0..dom.order() as u32).collect()).unwrap();
    let gens = generating_sequence(&whole);
    let mut out = Vec::new();
    search(dom, cod, &gens, &mut Vec::new(), &mut out, true);
    out.into_iter().next()
}

pub fn isomorphic(a: &GroupRef, b: &GroupRef) -> bool {
    first_isomorphism(a, b).is_some()
}

/// All automorphisms of `g`, as permutations of its element indices.
pub fn list_automorphisms(g: &GroupRef) -> Vec<Perm> {
    list_isomorphisms(g, g)
        .into_iter()
        .map(|map| Perm::from_images(map).expect("isomorphism is a bijection"))
        .collect()
}
