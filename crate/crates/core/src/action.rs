//! Group actions decoupled from element representation.
//!
//! The stabilizer-chain and set-stabilizer machinery is generic over an
//! [`Action`]: elements stay in whatever compact form the caller owns (a
//! permutation of the group elements, a pair, a wreath triple) while the
//! action evaluates their effect on a possibly much larger point domain.
//! This is what keeps the degree-`n^3` stabilizations affordable: a point
//! image costs O(1) but elements remain degree-`n` arrays.

use std::collections::HashMap;

use crate::perm::Perm;

pub trait Action: Clone {
    type Elem: Clone + Eq + Ord + std::hash::Hash;

    fn domain_size(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    fn is_identity(&self, e: &Self::Elem) -> bool;
    /// `a` then `b` (right action: `x^(ab) = (x^a)^b`).
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn apply(&self, a: &Self::Elem, point: u32) -> u32;

    fn apply_set(&self, a: &Self::Elem, set: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().map(|&p| self.apply(a, p)).collect();
        out.sort_unstable();
        out
    }

    /// Some point of the domain moved by `e`, or `None` for the identity.
    /// Must be deterministic; overridden where a domain scan would be costly.
    fn some_moved_point(&self, e: &Self::Elem) -> Option<u32> {
        (0..self.domain_size() as u32).find(|&p| self.apply(e, p) != p)
    }
}

/// Permutations acting on their own domain.
#[derive(Debug, Clone)]
pub struct NaturalAction {
    pub degree: usize,
}

impl Action for NaturalAction {
    type Elem = Perm;

    fn domain_size(&self) -> usize {
        self.degree
    }
    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }
    fn is_identity(&self, e: &Perm) -> bool {
        e.is_identity()
    }
    fn compose(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }
    fn invert(&self, a: &Perm) -> Perm {
        a.inverse()
    }
    fn apply(&self, a: &Perm, point: u32) -> u32 {
        a.apply(point)
    }
}

/// Pairs `(a, b)` acting coordinatewise on `(x, y)` encoded as `x*d2 + y`.
#[derive(Debug, Clone)]
pub struct PairAction {
    pub left_degree: usize,
    pub right_degree: usize,
}

impl PairAction {
    pub fn encode(&self, x: u32, y: u32) -> u32 {
        x * self.right_degree as u32 + y
    }
    pub fn decode(&self, p: u32) -> (u32, u32) {
        (p / self.right_degree as u32, p % self.right_degree as u32)
    }
}

impl Action for PairAction {
    type Elem = (Perm, Perm);

    fn domain_size(&self) -> usize {
        self.left_degree * self.right_degree
    }
    fn identity(&self) -> (Perm, Perm) {
        (
            Perm::identity(self.left_degree),
            Perm::identity(self.right_degree),
        )
    }
    fn is_identity(&self, e: &(Perm, Perm)) -> bool {
        e.0.is_identity() && e.1.is_identity()
    }
    fn compose(&self, a: &(Perm, Perm), b: &(Perm, Perm)) -> (Perm, Perm) {
        (a.0.compose(&b.0), a.1.compose(&b.1))
    }
    fn invert(&self, a: &(Perm, Perm)) -> (Perm, Perm) {
        (a.0.inverse(), a.1.inverse())
    }
    fn apply(&self, a: &(Perm, Perm), point: u32) -> u32 {
        let (x, y) = self.decode(point);
        self.encode(a.0.apply(x), a.1.apply(y))
    }
    fn some_moved_point(&self, e: &(Perm, Perm)) -> Option<u32> {
        if let Some(x) = e.0.min_moved_point() {
            Some(self.encode(x, 0))
        } else {
            e.1.min_moved_point().map(|y| self.encode(0, y))
        }
    }
}

/// Permutations of `0..n` acting diagonally on ordered triples, encoded as
/// `(a*n + b)*n + c`.  This realizes the extension of a group on `G` to
/// `G x G x G` without ever materializing degree-`n^3` image arrays.
#[derive(Debug, Clone)]
pub struct CubeAction {
    pub degree: usize,
}

impl CubeAction {
    pub fn encode(&self, a: u32, b: u32, c: u32) -> u32 {
        let n = self.degree as u32;
        (a * n + b) * n + c
    }
    pub fn decode(&self, p: u32) -> (u32, u32, u32) {
        let n = self.degree as u32;
        (p / (n * n), (p / n) % n, p % n)
    }
}

impl Action for CubeAction {
    type Elem = Perm;

    fn domain_size(&self) -> usize {
        self.degree * self.degree * self.degree
    }
    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }
    fn is_identity(&self, e: &Perm) -> bool {
        e.is_identity()
    }
    fn compose(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }
    fn invert(&self, a: &Perm) -> Perm {
        a.inverse()
    }
    fn apply(&self, a: &Perm, point: u32) -> u32 {
        let (x, y, z) = self.decode(point);
        self.encode(a.apply(x), a.apply(y), a.apply(z))
    }
    fn some_moved_point(&self, e: &Perm) -> Option<u32> {
        e.min_moved_point().map(|p| self.encode(p, 0, 0))
    }
}

/// The wreath extension `G wr C2` acting on two copies of the inner domain:
/// elements `(f, g, swap)` send a copy-1 point `x` to `f(x)` (landing in copy
/// 2 when `swap`), and a copy-2 point to `g` of it (landing in copy 1 when
/// `swap`).  Set transporters reduce to set stabilizers here.
#[derive(Debug, Clone)]
pub struct WreathAction<A: Action> {
    pub inner: A,
}

impl<A: Action> Action for WreathAction<A> {
    type Elem = (A::Elem, A::Elem, bool);

    fn domain_size(&self) -> usize {
        2 * self.inner.domain_size()
    }
    fn identity(&self) -> Self::Elem {
        (self.inner.identity(), self.inner.identity(), false)
    }
    fn is_identity(&self, e: &Self::Elem) -> bool {
        !e.2 && self.inner.is_identity(&e.0) && self.inner.is_identity(&e.1)
    }
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.2 {
            (
                self.inner.compose(&a.0, &b.1),
                self.inner.compose(&a.1, &b.0),
                a.2 ^ b.2,
            )
        } else {
            (
                self.inner.compose(&a.0, &b.0),
                self.inner.compose(&a.1, &b.1),
                a.2 ^ b.2,
            )
        }
    }
    fn invert(&self, a: &Self::Elem) -> Self::Elem {
        if a.2 {
            (self.inner.invert(&a.1), self.inner.invert(&a.0), true)
        } else {
            (self.inner.invert(&a.0), self.inner.invert(&a.1), false)
        }
    }
    fn apply(&self, a: &Self::Elem, point: u32) -> u32 {
        let d = self.inner.domain_size() as u32;
        if point < d {
            let q = self.inner.apply(&a.0, point);
            if a.2 {
                q + d
            } else {
                q
            }
        } else {
            let q = self.inner.apply(&a.1, point - d);
            if a.2 {
                q
            } else {
                q + d
            }
        }
    }
    fn some_moved_point(&self, e: &Self::Elem) -> Option<u32> {
        if e.2 {
            return Some(0); // copy 1 maps into copy 2
        }
        if let Some(x) = self.inner.some_moved_point(&e.0) {
            Some(x)
        } else {
            self.inner
                .some_moved_point(&e.1)
                .map(|y| y + self.inner.domain_size() as u32)
        }
    }
}

/// A permutation of `0..d` acting diagonally on ordered pairs `(x, y)`
/// encoded as `x*d + y`.  Conjugation on graph-of-permutation point sets
/// (`{(w, w^y)}`) becomes a set action here.
#[derive(Debug, Clone)]
pub struct DiagonalSquareAction {
    pub degree: usize,
}

impl DiagonalSquareAction {
    pub fn encode(&self, x: u32, y: u32) -> u32 {
        x * self.degree as u32 + y
    }
    pub fn decode(&self, p: u32) -> (u32, u32) {
        (p / self.degree as u32, p % self.degree as u32)
    }
}

impl Action for DiagonalSquareAction {
    type Elem = Perm;

    fn domain_size(&self) -> usize {
        self.degree * self.degree
    }
    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }
    fn is_identity(&self, e: &Perm) -> bool {
        e.is_identity()
    }
    fn compose(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }
    fn invert(&self, a: &Perm) -> Perm {
        a.inverse()
    }
    fn apply(&self, a: &Perm, point: u32) -> u32 {
        let (x, y) = self.decode(point);
        self.encode(a.apply(x), a.apply(y))
    }
    fn some_moved_point(&self, e: &Perm) -> Option<u32> {
        e.min_moved_point().map(|p| self.encode(p, 0))
    }
}

/// Derived action used for kernels of block actions: the first `m` points are
/// block indices of a window partition, the remaining points are the full
/// inner domain shifted by `m`.  Stabilizing the first `m` points pointwise
/// is exactly fixing every block setwise, so a stabilizer chain seeded with
/// the block coordinates splits a group into its block-action kernel and a
/// transversal.
#[derive(Clone)]
pub struct BlockSplitAction<A: Action> {
    pub inner: A,
    /// Blocks as sorted global point lists; a partition of the window.
    pub blocks: Vec<Vec<u32>>,
    block_of: HashMap<u32, u32>,
}

impl<A: Action> BlockSplitAction<A> {
    pub fn new(inner: A, blocks: Vec<Vec<u32>>) -> Self {
        let mut block_of = HashMap::new();
        for (b, blk) in blocks.iter().enumerate() {
            for &p in blk {
                block_of.insert(p, b as u32);
            }
        }
        BlockSplitAction {
            inner,
            blocks,
            block_of,
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Induced permutation of the block indices.
    pub fn block_image(&self, e: &A::Elem) -> Perm {
        let images = self
            .blocks
            .iter()
            .map(|blk| self.block_of[&self.inner.apply(e, blk[0])])
            .collect();
        Perm::from_images(images).expect("blocks are permuted")
    }
}

impl<A: Action> Action for BlockSplitAction<A> {
    type Elem = A::Elem;

    fn domain_size(&self) -> usize {
        self.blocks.len() + self.inner.domain_size()
    }
    fn identity(&self) -> A::Elem {
        self.inner.identity()
    }
    fn is_identity(&self, e: &A::Elem) -> bool {
        self.inner.is_identity(e)
    }
    fn compose(&self, a: &A::Elem, b: &A::Elem) -> A::Elem {
        self.inner.compose(a, b)
    }
    fn invert(&self, a: &A::Elem) -> A::Elem {
        self.inner.invert(a)
    }
    fn apply(&self, a: &A::Elem, point: u32) -> u32 {
        let m = self.blocks.len() as u32;
        if point < m {
            self.block_of[&self.inner.apply(a, self.blocks[point as usize][0])]
        } else {
            self.inner.apply(a, point - m) + m
        }
    }
    fn some_moved_point(&self, e: &A::Elem) -> Option<u32> {
        self.inner
            .some_moved_point(e)
            .map(|p| p + self.blocks.len() as u32)
    }
}
