//! Deterministic stabilizer chains over arbitrary actions.
//!
//! A [`ChainGroup`] is a group given by generators together with a verified
//! strong-generating-set chain: level `i` holds a base point, the strong
//! generators first appearing at that level, and the transversal of the base
//! orbit under the level's stabilizer subgroup.  Membership is by sifting,
//! order is the exact product of transversal sizes.
//!
//! Chains can be seeded with a forced base prefix.  Seeding with the block
//! coordinates of a [`BlockSplitAction`](crate::action::BlockSplitAction)
//! yields the kernel of a block action (strong generators past the prefix)
//! and the coset transversal of that kernel (products over the prefix
//! transversals), which is what the set-stabilizer recursion consumes.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigUint;
use num_traits::One;

use crate::action::{Action, BlockSplitAction};
use crate::error::EngineError;
use crate::perm::Perm;

#[derive(Debug, Clone)]
pub struct Level<E> {
    pub base: u32,
    pub gens: Vec<E>,
    pub transversal: BTreeMap<u32, E>,
}

/// A normal solvable subgroup of recorded index, standing in for the
/// solvable radical during computations.
#[derive(Debug, Clone)]
pub struct SolvableWitness<E> {
    pub subgroup_gens: Vec<E>,
    pub index_bound: BigUint,
}

#[derive(Debug, Clone)]
pub struct ChainGroup<A: Action> {
    action: A,
    gens: Vec<A::Elem>,
    levels: Vec<Level<A::Elem>>,
    witness: Option<SolvableWitness<A::Elem>>,
}

impl<A: Action> ChainGroup<A> {
    pub fn new(action: A, gens: Vec<A::Elem>) -> Self {
        Self::with_seeded_base(action, gens, &[])
    }

    pub fn trivial(action: A) -> Self {
        Self::new(action, Vec::new())
    }

    /// Builds the chain with the given base points first, in order, creating
    /// further levels lazily as residues survive sifting.
    pub fn with_seeded_base(action: A, gens: Vec<A::Elem>, seeded: &[u32]) -> Self {
        let levels = seeded
            .iter()
            .map(|&b| Level {
                base: b,
                gens: Vec::new(),
                transversal: BTreeMap::from([(b, action.identity())]),
            })
            .collect();
        let mut g = ChainGroup {
            action,
            gens: Vec::new(),
            levels,
            witness: None,
        };
        for e in gens {
            g.insert_gen(e);
        }
        g
    }

    pub fn action(&self) -> &A {
        &self.action
    }

    pub fn degree(&self) -> usize {
        self.action.domain_size()
    }

    pub fn generators(&self) -> &[A::Elem] {
        &self.gens
    }

    pub fn levels(&self) -> &[Level<A::Elem>] {
        &self.levels
    }

    pub fn witness(&self) -> Option<&SolvableWitness<A::Elem>> {
        self.witness.as_ref()
    }

    pub fn set_witness(&mut self, w: Option<SolvableWitness<A::Elem>>) {
        self.witness = w;
    }

    pub fn with_witness(mut self, w: SolvableWitness<A::Elem>) -> Self {
        self.witness = Some(w);
        self
    }

    /// Attaches the cheap honest witness: the group itself when solvable,
    /// otherwise the trivial subgroup with index equal to the order.
    pub fn with_auto_witness(mut self) -> Self {
        if self.is_solvable() {
            self.witness = Some(SolvableWitness {
                subgroup_gens: self.gens.clone(),
                index_bound: BigUint::one(),
            });
        } else {
            self.witness = Some(SolvableWitness {
                subgroup_gens: Vec::new(),
                index_bound: self.order(),
            });
        }
        self
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for lvl in &self.levels {
            o *= BigUint::from(lvl.transversal.len());
        }
        o
    }

    pub fn is_trivial_group(&self) -> bool {
        self.levels.iter().all(|l| l.transversal.len() == 1)
    }

    /// Strong generators, level by level.
    pub fn strong_generators(&self) -> Vec<A::Elem> {
        self.levels.iter().flat_map(|l| l.gens.clone()).collect()
    }

    fn sift_from(&self, start: usize, e: &A::Elem) -> (A::Elem, usize) {
        let mut cur = e.clone();
        for (i, lvl) in self.levels.iter().enumerate().skip(start) {
            if self.action.is_identity(&cur) {
                return (cur, i);
            }
            let pt = self.action.apply(&cur, lvl.base);
            match lvl.transversal.get(&pt) {
                Some(t) => cur = self.action.compose(&cur, &self.action.invert(t)),
                None => return (cur, i),
            }
        }
        (cur, self.levels.len())
    }

    pub fn sift(&self, e: &A::Elem) -> A::Elem {
        self.sift_from(0, e).0
    }

    pub fn contains(&self, e: &A::Elem) -> bool {
        self.action.is_identity(&self.sift(e))
    }

    fn level_gens(&self, lvl: usize) -> Vec<A::Elem> {
        self.levels[lvl..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn insert_gen(&mut self, e: A::Elem) {
        if self.action.is_identity(&e) {
            return;
        }
        self.gens.push(e.clone());
        let mut queue: VecDeque<(usize, A::Elem)> = VecDeque::from([(0usize, e)]);
        while let Some((start, g)) = queue.pop_front() {
            if self.action.is_identity(&g) {
                continue;
            }
            let (residue, stop) = self.sift_from(start, &g);
            if self.action.is_identity(&residue) {
                continue;
            }
            if stop == self.levels.len() {
                let base = self
                    .action
                    .some_moved_point(&residue)
                    .expect("non-identity residue moves a point");
                self.levels.push(Level {
                    base,
                    gens: Vec::new(),
                    transversal: BTreeMap::from([(base, self.action.identity())]),
                });
            }
            self.levels[stop].gens.push(residue);
            // The new strong generator enlarges the generating set of every
            // level from the insertion start down to `stop` (it fixes the
            // earlier base points but is new information here), so their
            // orbits must be rebuilt.  Levels above `start` generate the
            // same groups as before and stay valid.
            for lvl in start..=stop {
                self.rebuild_orbit(lvl, &mut queue);
            }
        }
    }

    /// Recomputes the orbit and transversal of a level after its generator
    /// set grew, and queues every Schreier generator for verification at the
    /// next level.
    fn rebuild_orbit(&mut self, lvl: usize, queue: &mut VecDeque<(usize, A::Elem)>) {
        let gens = self.level_gens(lvl);
        let base = self.levels[lvl].base;
        let mut transversal: BTreeMap<u32, A::Elem> =
            BTreeMap::from([(base, self.action.identity())]);
        let mut order: Vec<u32> = vec![base];
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            let rep = transversal[&p].clone();
            for s in &gens {
                let q = self.action.apply(s, p);
                if !transversal.contains_key(&q) {
                    transversal.insert(q, self.action.compose(&rep, s));
                    order.push(q);
                }
            }
        }
        // Schreier generators: u_p * s * u_{p^s}^-1 for every orbit point and
        // level generator; each must sift to identity through deeper levels.
        for (&p, rep) in &transversal {
            for s in &gens {
                let q = self.action.apply(s, p);
                let sg = self.action.compose(
                    &self.action.compose(rep, s),
                    &self.action.invert(&transversal[&q]),
                );
                if !self.action.is_identity(&sg) {
                    queue.push_back((lvl + 1, sg));
                }
            }
        }
        self.levels[lvl].transversal = transversal;
    }

    /// A new group extended by additional generators.  The witness is
    /// dropped; callers re-attach whatever propagation rule applies.
    pub fn extended_with(&self, extra: impl IntoIterator<Item = A::Elem>) -> Self {
        let mut out = self.clone();
        out.witness = None;
        for e in extra {
            if !out.contains(&e) {
                out.insert_gen(e);
            }
        }
        out
    }

    /// Iterates a level transversal with the identity (base point) first,
    /// then the other points ascending; keeps coset enumerations canonical.
    fn transversal_entries(&self, lvl: usize) -> Vec<A::Elem> {
        let level = &self.levels[lvl];
        let mut out = Vec::with_capacity(level.transversal.len());
        out.push(level.transversal[&level.base].clone());
        for (&p, e) in &level.transversal {
            if p != level.base {
                out.push(e.clone());
            }
        }
        out
    }

    /// All elements, identity first, in canonical transversal-product order.
    /// `None` when the order exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Option<Vec<A::Elem>> {
        if self.order() > BigUint::from(cap) {
            return None;
        }
        let mut out = vec![self.action.identity()];
        for lvl in (0..self.levels.len()).rev() {
            let entries = self.transversal_entries(lvl);
            let mut next = Vec::with_capacity(out.len() * entries.len());
            for u in &entries {
                for h in &out {
                    next.push(self.action.compose(h, u));
                }
            }
            out = next;
        }
        Some(out)
    }

    /// Coset representatives of the subgroup stabilizing the first `k` base
    /// points pointwise: all products over the first `k` transversals, the
    /// identity first.
    pub fn prefix_coset_reps(&self, k: usize) -> Vec<A::Elem> {
        let mut out = vec![self.action.identity()];
        for lvl in (0..k.min(self.levels.len())).rev() {
            let entries = self.transversal_entries(lvl);
            let mut next = Vec::with_capacity(out.len() * entries.len());
            for u in &entries {
                for h in &out {
                    next.push(self.action.compose(h, u));
                }
            }
            out = next;
        }
        out
    }

    /// Right-coset representatives of a subgroup, identity first, found by
    /// breadth-first closure over the generators.  Errors out past `cap`
    /// representatives.
    pub fn coset_reps_mod(&self, sub: &ChainGroup<A>, cap: usize) -> Result<Vec<A::Elem>, EngineError> {
        let mut reps: Vec<A::Elem> = vec![self.action.identity()];
        let mut head = 0;
        while head < reps.len() {
            let r = reps[head].clone();
            head += 1;
            for g in &self.gens {
                let c = self.action.compose(&r, g);
                let covered = reps
                    .iter()
                    .any(|t| sub.contains(&self.action.compose(&c, &self.action.invert(t))));
                if !covered {
                    if reps.len() >= cap {
                        return Err(EngineError::Contract(format!(
                            "coset enumeration exceeded cap {cap}"
                        )));
                    }
                    reps.push(c);
                }
            }
        }
        Ok(reps)
    }

    /// The derived subgroup: the normal closure (within this group) of the
    /// commutators of the generators.
    pub fn derived_subgroup(&self) -> ChainGroup<A> {
        let a = &self.action;
        let mut comms: Vec<A::Elem> = Vec::new();
        for x in &self.gens {
            for y in &self.gens {
                let c = a.compose(
                    &a.compose(&a.invert(x), &a.invert(y)),
                    &a.compose(x, y),
                );
                if !a.is_identity(&c) {
                    comms.push(c);
                }
            }
        }
        let mut derived = ChainGroup::new(a.clone(), comms);
        // Close under conjugation by the whole group.
        let mut frontier: Vec<A::Elem> = derived.gens.clone();
        while let Some(d) = frontier.pop() {
            for g in &self.gens {
                let c = a.compose(&a.compose(&a.invert(g), &d), g);
                if !derived.contains(&c) {
                    derived = derived.extended_with([c.clone()]);
                    frontier.push(c);
                }
            }
        }
        derived
    }

    pub fn is_solvable(&self) -> bool {
        let mut cur = self.clone();
        let mut order = cur.order();
        loop {
            if order == BigUint::one() {
                return true;
            }
            let next = cur.derived_subgroup();
            let next_order = next.order();
            if next_order == order {
                return false;
            }
            cur = next;
            order = next_order;
        }
    }
}

/// Kernel of a block action together with a transversal of it, extracted
/// from one seeded chain.
pub struct BlockKernelSplit<A: Action> {
    pub split: BlockSplitAction<A>,
    pub kernel_gens: Vec<A::Elem>,
    /// `[G : K]` coset representatives, identity first.
    pub coset_reps: Vec<A::Elem>,
    pub chain: ChainGroup<BlockSplitAction<A>>,
}

pub fn block_kernel_split<A: Action>(
    action: &A,
    gens: &[A::Elem],
    blocks: Vec<Vec<u32>>,
) -> BlockKernelSplit<A> {
    let m = blocks.len();
    let split = BlockSplitAction::new(action.clone(), blocks);
    let seeded: Vec<u32> = (0..m as u32).collect();
    let chain = ChainGroup::with_seeded_base(split.clone(), gens.to_vec(), &seeded);
    let kernel_gens = chain.levels()[m..]
        .iter()
        .flat_map(|l| l.gens.iter().cloned())
        .collect();
    let coset_reps = chain.prefix_coset_reps(m);
    BlockKernelSplit {
        split,
        kernel_gens,
        coset_reps,
        chain,
    }
}

/// For a seeded block chain, finds a group element whose induced block
/// permutation equals `target`.  `None` when `target` is not induced.
pub fn block_preimage<A: Action>(
    split: &BlockSplitAction<A>,
    chain: &ChainGroup<BlockSplitAction<A>>,
    target: &Perm,
) -> Option<A::Elem> {
    let m = split.block_count();
    let mut cur = target.clone();
    let mut parts: Vec<A::Elem> = Vec::new();
    for lvl in chain.levels().iter().take(m) {
        let pt = cur.apply(lvl.base);
        let t = lvl.transversal.get(&pt)?;
        cur = cur.compose(&split.block_image(t).inverse());
        parts.push(t.clone());
    }
    if !cur.is_identity() {
        return None;
    }
    // target = image(t_last * ... * t_first), built deepest-first.
    let mut acc = split.identity();
    for t in parts.into_iter().rev() {
        acc = split.compose(&acc, &t);
    }
    Some(acc)
}

/// Verifies the witness invariants exactly: normality of the witness
/// subgroup, its solvability, and the recorded index.  Test-support code.
pub fn verify_witness<A: Action>(group: &ChainGroup<A>) -> Result<(), EngineError> {
    let w = group
        .witness()
        .ok_or_else(|| EngineError::MissingWitness("no witness attached".into()))?;
    let a = group.action().clone();
    let sub = ChainGroup::new(a.clone(), w.subgroup_gens.clone());
    for r in &w.subgroup_gens {
        if !group.contains(r) {
            return Err(EngineError::Contract("witness escapes the group".into()));
        }
        for g in group.generators() {
            let c = a.compose(&a.compose(&a.invert(g), r), g);
            if !sub.contains(&c) {
                return Err(EngineError::Contract("witness subgroup not normal".into()));
            }
        }
    }
    if !sub.is_solvable() {
        return Err(EngineError::Contract("witness subgroup not solvable".into()));
    }
    if sub.order() * w.index_bound.clone() != group.order() {
        return Err(EngineError::Contract("witness index inexact".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::NaturalAction;

    fn nat(degree: usize, gens: Vec<Perm>) -> ChainGroup<NaturalAction> {
        ChainGroup::new(NaturalAction { degree }, gens)
    }

    #[test]
    fn orders_of_small_groups() {
        let c4 = nat(4, vec![Perm::from_cycle(4, &[0, 1, 2, 3])]);
        assert_eq!(c4.order(), BigUint::from(4u32));

        let s4 = nat(
            4,
            vec![
                Perm::from_cycle(4, &[0, 1]),
                Perm::from_cycle(4, &[0, 1, 2, 3]),
            ],
        );
        assert_eq!(s4.order(), BigUint::from(24u32));

        let trivial = nat(4, vec![]);
        assert_eq!(trivial.order(), BigUint::one());
    }

    #[test]
    fn membership() {
        let c4 = nat(4, vec![Perm::from_cycle(4, &[0, 1, 2, 3])]);
        assert!(c4.contains(&Perm::identity(4)));
        assert!(!c4.contains(&Perm::from_cycle(4, &[0, 1])));
        let sq = Perm::from_cycle(4, &[0, 2]).compose(&Perm::from_cycle(4, &[1, 3]));
        assert!(c4.contains(&sq));
    }

    #[test]
    fn elements_enumeration_is_exact() {
        let d4 = nat(
            4,
            vec![
                Perm::from_cycle(4, &[0, 1, 2, 3]),
                Perm::from_cycle(4, &[1, 3]),
            ],
        );
        let els = d4.elements(100).unwrap();
        assert_eq!(els.len(), 8);
        assert!(els[0].is_identity());
        let set: std::collections::BTreeSet<_> = els.iter().cloned().collect();
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn derived_series_detects_solvability() {
        let s4 = nat(
            4,
            vec![
                Perm::from_cycle(4, &[0, 1]),
                Perm::from_cycle(4, &[0, 1, 2, 3]),
            ],
        );
        assert!(s4.is_solvable());
        let d = s4.derived_subgroup();
        assert_eq!(d.order(), BigUint::from(12u32)); // A4
        let dd = d.derived_subgroup();
        assert_eq!(dd.order(), BigUint::from(4u32)); // V4

        let a5 = nat(
            5,
            vec![
                Perm::from_cycle(5, &[0, 1, 2]),
                Perm::from_cycle(5, &[0, 1, 2, 3, 4]),
            ],
        );
        assert!(!a5.is_solvable());
        assert_eq!(a5.derived_subgroup().order(), a5.order());
    }

    #[test]
    fn coset_reps_cover_group() {
        let s3 = nat(3, vec![Perm::from_cycle(3, &[0, 1]), Perm::from_cycle(3, &[0, 1, 2])]);
        let a3 = nat(3, vec![Perm::from_cycle(3, &[0, 1, 2])]);
        let reps = s3.coset_reps_mod(&a3, 100).unwrap();
        assert_eq!(reps.len(), 2);
        assert!(reps[0].is_identity());
    }

    #[test]
    fn block_kernel_split_on_c4() {
        let act = NaturalAction { degree: 4 };
        let gens = vec![Perm::from_cycle(4, &[0, 1, 2, 3])];
        let split = block_kernel_split(&act, &gens, vec![vec![0, 2], vec![1, 3]]);
        // C4 acts on the two blocks through C2; kernel is <(0 2)(1 3)>.
        assert_eq!(split.coset_reps.len(), 2);
        let kernel = ChainGroup::new(act, split.kernel_gens.clone());
        assert_eq!(kernel.order(), BigUint::from(2u32));
    }

    #[test]
    fn seeded_chain_keeps_prefix() {
        let act = NaturalAction { degree: 4 };
        let gens = vec![
            Perm::from_cycle(4, &[0, 1]),
            Perm::from_cycle(4, &[0, 1, 2, 3]),
        ];
        let g = ChainGroup::with_seeded_base(act, gens, &[0, 1, 2]);
        assert_eq!(g.levels()[0].base, 0);
        assert_eq!(g.levels()[1].base, 1);
        assert_eq!(g.levels()[2].base, 2);
        assert_eq!(g.order(), BigUint::from(24u32));
        assert_eq!(g.prefix_coset_reps(3).len(), 24);
    }
}
