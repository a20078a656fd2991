//! Divide-and-conquer set stabilizers and transporters, valid for cosets.
//!
//! The recursion follows three cases: a window splitting into several orbits
//! is refined sequentially; a transitive window is split through a minimal
//! block system, enumerating cosets of the block-action kernel; a one-point
//! window resolves directly.  Entry points wrap the recursion with the
//! almost-solvable coset splitting: a group with a solvable witness is first
//! decomposed into cosets of the witness subgroup, once, and the recursion
//! then only ever visits solvable groups.
//!
//! Orbits disjoint from the decision sets pass unchanged without being
//! walked, so huge mostly-irrelevant domains (the `n^3` automorphism test
//! domain) stay cheap.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::action::{Action, WreathAction};
use crate::chain::{block_kernel_split, ChainGroup, SolvableWitness};
use crate::error::EngineError;
use crate::perm::Perm;
use crate::permgroup::{minimal_blocks_local, orbits, GroupCoset, PermGroup};

/// A set-stabilizer subtask: a coset `X = G*a`, the decision set, and a
/// `G`-stable window limiting which points are constrained.
#[derive(Debug, Clone)]
pub struct StabTask {
    pub coset: GroupCoset,
    pub delta: Vec<u32>,
    pub window: Vec<u32>,
}

enum Window {
    Full,
    Set(Vec<u32>),
}

fn window_len<A: Action>(action: &A, w: &Window) -> usize {
    match w {
        Window::Full => action.domain_size(),
        Window::Set(v) => v.len(),
    }
}

/// `{x in G*rep | (delta ∩ window)^x = delta ∩ window^rep}` as `None` (empty)
/// or a right coset of the stabilizer of `delta ∩ window` in `group`.
fn stab_rec<A: Action>(
    group: &ChainGroup<A>,
    rep: &A::Elem,
    delta: &HashSet<u32>,
    window: &Window,
) -> Option<(ChainGroup<A>, A::Elem)> {
    let action = group.action().clone();
    let wlen = window_len(&action, window);

    // Intersections with the window and its image under the coset.
    let dp: Vec<u32> = match window {
        Window::Full => {
            let mut v: Vec<u32> = delta.iter().copied().collect();
            v.sort_unstable();
            v
        }
        Window::Set(v) => v.iter().copied().filter(|p| delta.contains(p)).collect(),
    };
    let da: Vec<u32> = match window {
        Window::Full => dp.clone(),
        Window::Set(v) => v
            .iter()
            .map(|&p| action.apply(rep, p))
            .filter(|q| delta.contains(q))
            .collect(),
    };
    if dp.len() != da.len() {
        return None;
    }
    if dp.is_empty() || dp.len() == wlen {
        return Some((group.clone(), rep.clone()));
    }

    // Orbits meeting neither dp nor the preimage of da pass unchanged, so
    // only seed the orbit walk from those points.
    let inv_rep = action.invert(rep);
    let mut seeds: Vec<u32> = dp.clone();
    seeds.extend(da.iter().map(|&q| action.apply(&inv_rep, q)));
    seeds.sort_unstable();
    seeds.dedup();

    let mut seen: HashSet<u32> = HashSet::new();
    let mut actives: Vec<Vec<u32>> = Vec::new();
    for &start in &seeds {
        if seen.contains(&start) {
            continue;
        }
        let mut orbit = vec![start];
        seen.insert(start);
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in group.generators() {
                let q = action.apply(g, p);
                if seen.insert(q) {
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        actives.push(orbit);
    }
    actives.sort_by_key(|o| o[0]);

    if actives.len() == 1 && actives[0].len() == wlen {
        return transitive_split(group, rep, delta, actives.into_iter().next().unwrap());
    }

    // Sequential refinement over the active pieces; inactive orbits would
    // return the coset unchanged.
    let mut cur_group = group.clone();
    let mut cur_rep = rep.clone();
    for piece in actives {
        let (g, r) = stab_rec(&cur_group, &cur_rep, delta, &Window::Set(piece))?;
        cur_group = g;
        cur_rep = r;
    }
    Some((cur_group, cur_rep))
}

/// Transitive case: split the orbit into minimal blocks, decompose the group
/// over the kernel of the block action, and union the child cosets.
fn transitive_split<A: Action>(
    group: &ChainGroup<A>,
    rep: &A::Elem,
    delta: &HashSet<u32>,
    orbit: Vec<u32>,
) -> Option<(ChainGroup<A>, A::Elem)> {
    let action = group.action().clone();
    let local_gens: Vec<Perm> = group
        .generators()
        .iter()
        .map(|g| {
            let images = orbit
                .iter()
                .map(|&p| orbit.binary_search(&action.apply(g, p)).expect("orbit stable") as u32)
                .collect();
            Perm::from_images(images).expect("restriction of a bijection")
        })
        .collect();
    let local_blocks = minimal_blocks_local(&local_gens, orbit.len());
    let blocks: Vec<Vec<u32>> = local_blocks
        .into_iter()
        .map(|blk| blk.into_iter().map(|p| orbit[p as usize]).collect())
        .collect();

    let split = block_kernel_split(&action, group.generators(), blocks);
    let kernel = ChainGroup::trivial(action.clone()).extended_with(split.kernel_gens);
    log::debug!(
        "transitive split: window {} -> {} blocks, fan-out {}",
        orbit.len(),
        split.split.block_count(),
        split.coset_reps.len()
    );

    let window = Window::Set(orbit);
    let mut merged: Option<(ChainGroup<A>, A::Elem)> = None;
    for t in &split.coset_reps {
        let child_rep = action.compose(t, rep);
        if let Some((cg, cr)) = stab_rec(&kernel, &child_rep, delta, &window) {
            merged = Some(match merged {
                None => (cg, cr),
                Some((mg, mr)) => {
                    let flip = action.compose(&cr, &action.invert(&mr));
                    let mut extra: Vec<A::Elem> = cg.generators().to_vec();
                    extra.push(flip);
                    (mg.extended_with(extra), mr)
                }
            });
        }
    }
    merged
}

/// `G_delta` for a group carrying a solvable witness: decompose into cosets
/// of the witness subgroup, run the recursion on each, and merge.  The
/// result inherits the witness-intersection as its own witness.
pub(crate) fn set_stabilizer_in<A: Action>(
    group: &ChainGroup<A>,
    delta: &[u32],
) -> Result<ChainGroup<A>, EngineError> {
    let witness = group
        .witness()
        .ok_or_else(|| EngineError::MissingWitness("set stabilizer entry".into()))?;
    let action = group.action().clone();
    let delta_set: HashSet<u32> = delta.iter().copied().collect();

    let solvable_part =
        ChainGroup::trivial(action.clone()).extended_with(witness.subgroup_gens.clone());
    let reps = if witness.index_bound == BigUint::one() {
        vec![action.identity()]
    } else {
        let cap = witness
            .index_bound
            .to_usize()
            .ok_or_else(|| EngineError::Contract("witness index out of range".into()))?;
        group.coset_reps_mod(&solvable_part, cap)?
    };
    log::debug!("almost-solvable entry: {} witness cosets", reps.len());

    let mut merged: Option<(ChainGroup<A>, A::Elem)> = None;
    let mut witness_group: Option<ChainGroup<A>> = None;
    for (i, t) in reps.iter().enumerate() {
        if let Some((cg, cr)) = stab_rec(&solvable_part, t, &delta_set, &Window::Full) {
            if i == 0 {
                witness_group = Some(cg.clone());
            }
            merged = Some(match merged {
                None => (cg, cr),
                Some((mg, mr)) => {
                    let flip = action.compose(&cr, &action.invert(&mr));
                    let mut extra: Vec<A::Elem> = cg.generators().to_vec();
                    extra.push(flip);
                    (mg.extended_with(extra), mr)
                }
            });
        }
    }
    // The identity coset always contributes (the identity fixes delta), so
    // both options are populated.
    let (result, _rep) = merged.expect("identity coset is never empty");
    let wg = witness_group.expect("identity coset is never empty");
    let index = &result.order() / &wg.order();
    Ok(result.with_witness(SolvableWitness {
        subgroup_gens: wg.generators().to_vec(),
        index_bound: index,
    }))
}

/// `{g in G | delta^g = lambda}` via the wreath-double trick: stabilize
/// `delta ∪ lambda'` in `G wr C2` acting on two copies of the domain, then
/// read the transporter off the copy-swapping elements.
pub(crate) fn set_transporter_in<A: Action>(
    group: &ChainGroup<A>,
    delta: &[u32],
    lambda: &[u32],
) -> Result<Option<(ChainGroup<A>, A::Elem)>, EngineError> {
    let action = group.action().clone();
    let mut d: Vec<u32> = delta.to_vec();
    let mut l: Vec<u32> = lambda.to_vec();
    d.sort_unstable();
    d.dedup();
    l.sort_unstable();
    l.dedup();
    if d.len() != l.len() {
        return Ok(None);
    }
    if d == l {
        let stab = set_stabilizer_in(group, &d)?;
        let id = action.identity();
        return Ok(Some((stab, id)));
    }
    let witness = group
        .witness()
        .ok_or_else(|| EngineError::MissingWitness("set transporter entry".into()))?;

    let wr = WreathAction {
        inner: action.clone(),
    };
    let id = action.identity();
    let mut gens: Vec<(A::Elem, A::Elem, bool)> = group
        .generators()
        .iter()
        .map(|g| (g.clone(), id.clone(), false))
        .collect();
    gens.push((id.clone(), id.clone(), true));
    let mut wgens: Vec<(A::Elem, A::Elem, bool)> = Vec::new();
    for r in &witness.subgroup_gens {
        wgens.push((r.clone(), id.clone(), false));
        wgens.push((id.clone(), r.clone(), false));
    }
    let index = witness.index_bound.clone() * witness.index_bound.clone() * BigUint::from(2u32);
    let tilde = ChainGroup::new(wr.clone(), gens).with_witness(SolvableWitness {
        subgroup_gens: wgens,
        index_bound: index,
    });

    let shift = action.domain_size() as u32;
    let mut target: Vec<u32> = d.clone();
    target.extend(l.iter().map(|&q| q + shift));
    let stab = set_stabilizer_in(&tilde, &target)?;

    let odd: Vec<_> = stab
        .generators()
        .iter()
        .filter(|e| e.2)
        .cloned()
        .collect();
    let Some(o1) = odd.first().cloned() else {
        return Ok(None);
    };
    // Even-part subgroup via Schreier generators over the transversal {1, o1}.
    let mut kernel_gens: Vec<A::Elem> = Vec::new();
    let o1_inv = wr.invert(&o1);
    for e in stab.generators() {
        if e.2 {
            kernel_gens.push(wr.compose(e, &o1_inv).0);
            kernel_gens.push(wr.compose(&o1, e).0);
        } else {
            kernel_gens.push(e.0.clone());
            kernel_gens.push(wr.compose(&wr.compose(&o1, e), &o1_inv).0);
        }
    }
    let result = ChainGroup::trivial(action.clone()).extended_with(kernel_gens);
    let wit_gens: Vec<A::Elem> = stab
        .witness()
        .map(|w| w.subgroup_gens.iter().map(|e| e.0.clone()).collect())
        .unwrap_or_default();
    let wit_group = ChainGroup::trivial(action.clone()).extended_with(wit_gens.clone());
    let index = &result.order() / &wit_group.order();
    let result = result.with_witness(SolvableWitness {
        subgroup_gens: wit_gens,
        index_bound: index,
    });
    Ok(Some((result, o1.0)))
}

// ---------------------------------------------------------------------------
// Public wrappers on ordinary permutation groups
// ---------------------------------------------------------------------------

/// `{g in G | delta^g = delta}`; requires a solvable witness on `G`.
pub fn set_stabilizer(g: &PermGroup, delta: &[u32]) -> Result<PermGroup, EngineError> {
    check_points(g.degree(), delta)?;
    set_stabilizer_in(g, delta)
}

/// `{g in G | delta^g = lambda}` as a coset; requires a solvable witness.
pub fn set_transporter(g: &PermGroup, delta: &[u32], lambda: &[u32]) -> Result<GroupCoset, EngineError> {
    check_points(g.degree(), delta)?;
    check_points(g.degree(), lambda)?;
    Ok(match set_transporter_in(g, delta, lambda)? {
        None => GroupCoset::Empty,
        Some((group, rep)) => GroupCoset::Coset { group, rep },
    })
}

/// Runs the windowed recursion on an explicit task.  The window must be a
/// union of orbits of the coset's group; no witness is needed (the caller is
/// responsible for only reaching this with manageable groups).
pub fn stab_coset(task: &StabTask) -> Result<GroupCoset, EngineError> {
    let GroupCoset::Coset { group, rep } = &task.coset else {
        return Ok(GroupCoset::Empty);
    };
    check_points(group.degree(), &task.delta)?;
    check_points(group.degree(), &task.window)?;
    let mut window = task.window.clone();
    window.sort_unstable();
    window.dedup();
    // Window must be stable: its orbit closure must not escape it.
    let closure = orbits(group, Some(&window));
    let total: usize = closure.iter().map(|o| o.len()).sum();
    if total != window.len() {
        return Err(EngineError::UnstableWindow);
    }
    let delta_set: HashSet<u32> = task.delta.iter().copied().collect();
    let win = if window.len() == group.degree() {
        Window::Full
    } else {
        Window::Set(window)
    };
    Ok(match stab_rec(group, rep, &delta_set, &win) {
        None => GroupCoset::Empty,
        Some((group, rep)) => GroupCoset::Coset { group, rep },
    })
}

fn check_points(degree: usize, pts: &[u32]) -> Result<(), EngineError> {
    for &p in pts {
        if p as usize >= degree {
            return Err(EngineError::Contract(format!(
                "point {p} outside domain of degree {degree}"
            )));
        }
    }
    Ok(())
}
