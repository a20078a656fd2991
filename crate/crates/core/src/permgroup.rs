//! Public permutation-group interface: groups of [`Perm`]s with verified
//! stabilizer chains, orbit and block machinery, solvability, and the
//! solvable-witness bookkeeping that the set-stabilizer engine relies on.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::action::{NaturalAction, PairAction};
use crate::chain::{self, block_kernel_split, ChainGroup};
use crate::error::EngineError;
use crate::perm::Perm;

/// A permutation group with a verified strong-generating-set chain.
pub type PermGroup = ChainGroup<NaturalAction>;

/// A normal solvable subgroup of recorded index (see [`crate::chain::SolvableWitness`]).
pub type SolvableWitness = chain::SolvableWitness<Perm>;

/// Either the empty set or a right coset `group * rep`: the universal return
/// shape for stabilizer, transporter and isomorphism queries.
#[derive(Debug, Clone)]
pub enum GroupCoset {
    Empty,
    Coset { group: PermGroup, rep: Perm },
}

impl GroupCoset {
    pub fn is_empty(&self) -> bool {
        matches!(self, GroupCoset::Empty)
    }

    pub fn size(&self) -> BigUint {
        match self {
            GroupCoset::Empty => BigUint::from(0u32),
            GroupCoset::Coset { group, .. } => group.order(),
        }
    }

    /// All elements of the coset, if no larger than `cap`.
    pub fn elements(&self, cap: usize) -> Option<Vec<Perm>> {
        match self {
            GroupCoset::Empty => Some(Vec::new()),
            GroupCoset::Coset { group, rep } => group
                .elements(cap)
                .map(|els| els.into_iter().map(|e| e.compose(rep)).collect()),
        }
    }

    pub fn contains(&self, p: &Perm) -> bool {
        match self {
            GroupCoset::Empty => false,
            GroupCoset::Coset { group, rep } => group.contains(&p.compose(&rep.inverse())),
        }
    }
}

impl PermGroup {
    /// Builds a group from generators with a deterministic chain.
    pub fn from_generators(gens: Vec<Perm>) -> Result<PermGroup, EngineError> {
        let degree = gens.first().map_or(0, |g| g.degree());
        Self::from_generators_with_degree(degree, gens)
    }

    pub fn from_generators_with_degree(
        degree: usize,
        gens: Vec<Perm>,
    ) -> Result<PermGroup, EngineError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(EngineError::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        Ok(ChainGroup::new(NaturalAction { degree }, gens))
    }

    pub fn trivial_of_degree(degree: usize) -> PermGroup {
        ChainGroup::trivial(NaturalAction { degree })
    }
}

/// Orbit partition of the given points (the full domain when `None`) under
/// the group, orbits ordered by minimal point.  Points reachable from the
/// seeds are included even if outside the seed set, so passing a stable set
/// returns its partition.
pub fn orbits(g: &PermGroup, subset: Option<&[u32]>) -> Vec<Vec<u32>> {
    let seeds: Vec<u32> = match subset {
        Some(s) => {
            let mut s = s.to_vec();
            s.sort_unstable();
            s.dedup();
            s
        }
        None => (0..g.degree() as u32).collect(),
    };
    let mut seen: HashMap<u32, ()> = HashMap::new();
    let mut out = Vec::new();
    for &start in &seeds {
        if seen.contains_key(&start) {
            continue;
        }
        let mut orbit = vec![start];
        seen.insert(start, ());
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for gen in g.generators() {
                let q = gen.apply(p);
                if seen.insert(q, ()).is_none() {
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out.sort_by_key(|o| o[0]);
    out
}

/// Minimal nontrivial block system of a transitive action, computed on local
/// permutations of `0..w`.  Returns singleton blocks when primitive.
///
/// Tie-break among minimal systems: smallest block size, then the
/// lexicographically smallest block containing point 0, then the whole
/// system lexicographically.
pub(crate) fn minimal_blocks_local(gens: &[Perm], width: usize) -> Vec<Vec<u32>> {
    struct Uf(Vec<u32>);
    impl Uf {
        fn find(&mut self, x: u32) -> u32 {
            if self.0[x as usize] != x {
                let r = self.find(self.0[x as usize]);
                self.0[x as usize] = r;
                r
            } else {
                x
            }
        }
        fn union(&mut self, x: u32, y: u32) -> bool {
            let (rx, ry) = (self.find(x), self.find(y));
            if rx == ry {
                return false;
            }
            self.0[rx.max(ry) as usize] = rx.min(ry);
            true
        }
    }

    let mut best: Option<(usize, Vec<u32>, Vec<Vec<u32>>)> = None;
    for k in 1..width as u32 {
        // Finest congruence identifying 0 and k.
        let mut uf = Uf((0..width as u32).collect());
        uf.union(0, k);
        let mut queue = vec![(0u32, k)];
        while let Some((x, y)) = queue.pop() {
            for g in gens {
                let (gx, gy) = (g.apply(x), g.apply(y));
                if uf.union(gx, gy) {
                    queue.push((gx, gy));
                }
            }
        }
        let mut classes: HashMap<u32, Vec<u32>> = HashMap::new();
        for p in 0..width as u32 {
            classes.entry(uf.find(p)).or_default().push(p);
        }
        let mut system: Vec<Vec<u32>> = classes.into_values().collect();
        system.sort_by_key(|b| b[0]);
        let size = system[0].len();
        if size == width {
            continue; // trivial congruence
        }
        let zero_block = system[0].clone();
        let cand = (size, zero_block, system);
        let better = match &best {
            None => true,
            Some(b) => (cand.0, &cand.1, &cand.2) < (b.0, &b.1, &b.2),
        };
        if better {
            best = Some(cand);
        }
    }
    match best {
        Some((_, _, system)) => system,
        None => (0..width as u32).map(|p| vec![p]).collect(),
    }
}

/// Minimal nontrivial block system on an orbit, or singleton blocks when the
/// action is primitive.
pub fn minimal_block_system(g: &PermGroup, orbit: &[u32]) -> Result<Vec<Vec<u32>>, EngineError> {
    let mut orbit = orbit.to_vec();
    orbit.sort_unstable();
    if orbit.len() <= 1 {
        return Err(EngineError::NotTransitive);
    }
    let computed = orbits(g, Some(&orbit));
    if computed.len() != 1 || computed[0] != orbit {
        return Err(EngineError::NotTransitive);
    }
    let local_gens: Vec<Perm> = g
        .generators()
        .iter()
        .map(|gen| localize(gen, &orbit))
        .collect();
    let local = minimal_blocks_local(&local_gens, orbit.len());
    Ok(local
        .into_iter()
        .map(|blk| blk.into_iter().map(|p| orbit[p as usize]).collect())
        .collect())
}

fn localize(p: &Perm, window: &[u32]) -> Perm {
    let images = window
        .iter()
        .map(|&g| window.binary_search(&p.apply(g)).expect("window stable") as u32)
        .collect();
    Perm::from_images(images).expect("restriction of a bijection")
}

/// The action of a group on a stable block partition: the induced image on
/// block indices, the kernel, and a coset transversal of the kernel.
pub struct BlockActionData {
    pub image: PermGroup,
    pub kernel: PermGroup,
    /// Coset representatives of the kernel, identity first.
    pub transversal: Vec<Perm>,
    blocks: Vec<Vec<u32>>,
    block_of: HashMap<u32, u32>,
}

impl BlockActionData {
    /// Evaluates the block-action homomorphism on a group element.
    pub fn induced(&self, p: &Perm) -> Perm {
        let images = self
            .blocks
            .iter()
            .map(|blk| self.block_of[&p.apply(blk[0])])
            .collect();
        Perm::from_images(images).expect("blocks are permuted")
    }
}

pub fn action_on_blocks(g: &PermGroup, blocks: &[Vec<u32>]) -> Result<BlockActionData, EngineError> {
    let mut block_of: HashMap<u32, u32> = HashMap::new();
    for (i, blk) in blocks.iter().enumerate() {
        for &p in blk {
            if block_of.insert(p, i as u32).is_some() {
                return Err(EngineError::Contract("blocks overlap".into()));
            }
        }
    }
    // Stability: every generator must map blocks onto blocks.
    for gen in g.generators() {
        for blk in blocks {
            let target = block_of
                .get(&gen.apply(blk[0]))
                .ok_or(EngineError::UnstableWindow)?;
            for &p in blk {
                if block_of.get(&gen.apply(p)) != Some(target) {
                    return Err(EngineError::UnstableWindow);
                }
            }
        }
    }
    let sorted_blocks: Vec<Vec<u32>> = blocks
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b
        })
        .collect();
    let nat = NaturalAction { degree: g.degree() };
    let split = block_kernel_split(&nat, g.generators(), sorted_blocks.clone());
    let kernel = ChainGroup::new(nat, split.kernel_gens.clone());
    let data = BlockActionData {
        image: PermGroup::trivial_of_degree(blocks.len()),
        kernel,
        transversal: split.coset_reps,
        blocks: sorted_blocks,
        block_of,
    };
    let image_gens: Vec<Perm> = g.generators().iter().map(|p| data.induced(p)).collect();
    let image = ChainGroup::new(
        NaturalAction {
            degree: blocks.len(),
        },
        image_gens,
    );
    Ok(BlockActionData { image, ..data })
}

/// `A ∩ B` for groups on the same domain, computed by letting `A x B` act on
/// ordered pairs and set-stabilizing the diagonal.  At least one input must
/// carry a solvable witness; a missing witness on the other side is treated
/// as the trivial subgroup (brute index).
pub fn intersection_diagonal(a: &PermGroup, b: &PermGroup) -> Result<PermGroup, EngineError> {
    if a.degree() != b.degree() {
        return Err(EngineError::DegreeMismatch {
            expected: a.degree(),
            got: b.degree(),
        });
    }
    if a.witness().is_none() && b.witness().is_none() {
        return Err(EngineError::MissingWitness(
            "intersection requires a witness on at least one side".into(),
        ));
    }
    let d = a.degree();
    let pair = PairAction {
        left_degree: d,
        right_degree: d,
    };
    let id = Perm::identity(d);
    let mut gens: Vec<(Perm, Perm)> = Vec::new();
    for g in a.generators() {
        gens.push((g.clone(), id.clone()));
    }
    for g in b.generators() {
        gens.push((id.clone(), g.clone()));
    }
    let witness_of = |g: &PermGroup| -> (Vec<Perm>, BigUint) {
        match g.witness() {
            Some(w) => (w.subgroup_gens.clone(), w.index_bound.clone()),
            None => (Vec::new(), g.order()),
        }
    };
    let (wa, ia) = witness_of(a);
    let (wb, ib) = witness_of(b);
    let mut wgens: Vec<(Perm, Perm)> = Vec::new();
    for r in &wa {
        wgens.push((r.clone(), id.clone()));
    }
    for r in &wb {
        wgens.push((id.clone(), r.clone()));
    }
    let product = ChainGroup::new(pair.clone(), gens).with_witness(chain::SolvableWitness {
        subgroup_gens: wgens,
        index_bound: ia * ib,
    });
    let diagonal: Vec<u32> = (0..d as u32).map(|i| pair.encode(i, i)).collect();
    let stab = crate::setstab::set_stabilizer_in(&product, &diagonal)?;
    // Diagonal pairs are (g, g); the left components form the intersection.
    let left_gens: Vec<Perm> = stab.generators().iter().map(|(l, _)| l.clone()).collect();
    let mut out = PermGroup::from_generators_with_degree(d, left_gens)?;
    if let Some(w) = stab.witness() {
        let rgens: Vec<Perm> = w.subgroup_gens.iter().map(|(l, _)| l.clone()).collect();
        let rgroup = PermGroup::from_generators_with_degree(d, rgens.clone())?;
        let index = &out.order() / &rgroup.order();
        out.set_witness(Some(SolvableWitness {
            subgroup_gens: rgens,
            index_bound: index,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cyc4() -> PermGroup {
        PermGroup::from_generators(vec![Perm::from_cycle(4, &[0, 1, 2, 3])]).unwrap()
    }

    #[test]
    fn from_generators_orders() {
        assert_eq!(cyc4().order(), BigUint::from(4u32));
        let s4 = PermGroup::from_generators(vec![
            Perm::from_cycle(4, &[0, 1]),
            Perm::from_cycle(4, &[0, 1, 2, 3]),
        ])
        .unwrap();
        assert_eq!(s4.order(), BigUint::from(24u32));
        assert_eq!(
            PermGroup::from_generators(vec![]).unwrap().order(),
            BigUint::one()
        );
    }

    #[test]
    fn from_generators_rejects_mixed_degrees() {
        let r = PermGroup::from_generators(vec![
            Perm::from_cycle(4, &[0, 1]),
            Perm::from_cycle(5, &[0, 1]),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn contains_examples() {
        let g = cyc4();
        assert!(g.contains(&Perm::identity(4)));
        assert!(!g.contains(&Perm::from_cycle(4, &[0, 1])));
        for gen in g.generators() {
            assert!(g.contains(gen));
        }
    }

    #[test]
    fn orbit_partitions() {
        let trivial = PermGroup::trivial_of_degree(3);
        assert_eq!(orbits(&trivial, None), vec![vec![0], vec![1], vec![2]]);

        assert_eq!(orbits(&cyc4(), None), vec![vec![0, 1, 2, 3]]);

        let double =
            PermGroup::from_generators(vec![Perm::from_cycle(4, &[0, 1])
                .compose(&Perm::from_cycle(4, &[2, 3]))])
            .unwrap();
        assert_eq!(orbits(&double, None), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn block_systems() {
        let blocks = minimal_block_system(&cyc4(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);

        // Primitive: symmetric group on 5 points gives singletons.
        let s5 = PermGroup::from_generators(vec![
            Perm::from_cycle(5, &[0, 1]),
            Perm::from_cycle(5, &[0, 1, 2, 3, 4]),
        ])
        .unwrap();
        let blocks = minimal_block_system(&s5, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(blocks.len(), 5);

        // C6: both size-2 and size-3 systems exist; minimal size wins.
        let c6 =
            PermGroup::from_generators(vec![Perm::from_cycle(6, &[0, 1, 2, 3, 4, 5])]).unwrap();
        let blocks = minimal_block_system(&c6, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(blocks, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);

        assert!(minimal_block_system(&c6, &[0, 1, 2]).is_err());
    }

    #[test]
    fn block_action_kernels() {
        let g = cyc4();
        let data = action_on_blocks(&g, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(data.image.order(), BigUint::from(2u32));
        assert_eq!(data.kernel.order(), BigUint::from(2u32));
        assert_eq!(data.transversal.len(), 2);
        // order(G) = order(image) * order(kernel)
        assert_eq!(data.image.order() * data.kernel.order(), g.order());
        // Kernel fixes every block setwise.
        for k in data.kernel.generators() {
            assert!(data.induced(k).is_identity());
        }

        // Singleton blocks: kernel trivial.
        let data = action_on_blocks(&g, &[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert!(data.kernel.is_trivial_group());

        // One block covering a transitive orbit: image trivial, kernel = G.
        let data = action_on_blocks(&g, &[vec![0, 1, 2, 3]]).unwrap();
        assert!(data.image.is_trivial_group());
        assert_eq!(data.kernel.order(), g.order());
    }

    #[test]
    fn solvability() {
        assert!(cyc4().is_solvable());
        let s4 = PermGroup::from_generators(vec![
            Perm::from_cycle(4, &[0, 1]),
            Perm::from_cycle(4, &[0, 1, 2, 3]),
        ])
        .unwrap();
        assert!(s4.is_solvable());
        let a5 = PermGroup::from_generators(vec![
            Perm::from_cycle(5, &[0, 1, 2]),
            Perm::from_cycle(5, &[0, 1, 2, 3, 4]),
        ])
        .unwrap();
        assert!(!a5.is_solvable());
    }

    #[test]
    fn diagonal_intersections() {
        let a = PermGroup::from_generators(vec![Perm::from_cycle(4, &[0, 1])])
            .unwrap()
            .with_auto_witness();
        let b = PermGroup::from_generators(vec![Perm::from_cycle(4, &[2, 3])])
            .unwrap()
            .with_auto_witness();
        let meet = intersection_diagonal(&a, &b).unwrap();
        assert_eq!(meet.order(), BigUint::one());

        let g = cyc4().with_auto_witness();
        let meet = intersection_diagonal(&g, &g).unwrap();
        assert_eq!(meet.order(), BigUint::from(4u32));

        // A <= B gives A.
        let d4 = PermGroup::from_generators(vec![
            Perm::from_cycle(4, &[0, 1, 2, 3]),
            Perm::from_cycle(4, &[1, 3]),
        ])
        .unwrap()
        .with_auto_witness();
        let meet = intersection_diagonal(&g, &d4).unwrap();
        assert_eq!(meet.order(), BigUint::from(4u32));

        let no_witness = cyc4();
        assert!(intersection_diagonal(&no_witness, &no_witness).is_err());
    }
}
