use crate::error::EngineError;

/// A permutation of `0..degree`, stored as an image array.
///
/// Permutations act on the right: the image of point `x` under `g` is
/// `g.apply(x)`, and `compose(a, b)` applies `a` first, then `b`, so that
/// `x^(ab) = (x^a)^b`.  Every module in this crate shares that convention.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    image: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            image: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from an image array, checking bijectivity.
    pub fn from_images(image: Vec<u32>) -> Result<Perm, EngineError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &y in &image {
            if y as usize >= n || seen[y as usize] {
                return Err(EngineError::NotBijective);
            }
            seen[y as usize] = true;
        }
        Ok(Perm { image })
    }

    /// As `from_images` but from usize indices, for callers indexing tables.
    pub fn from_usize_images(image: &[usize]) -> Result<Perm, EngineError> {
        Self::from_images(image.iter().map(|&x| x as u32).collect())
    }

    /// Builds the permutation mapping cycle[i] to cycle[i+1] (wrapping),
    /// fixing everything else.
    pub fn from_cycle(degree: usize, cycle: &[u32]) -> Perm {
        let mut image: Vec<u32> = (0..degree as u32).collect();
        for i in 0..cycle.len() {
            image[cycle[i] as usize] = cycle[(i + 1) % cycle.len()];
        }
        Perm { image }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.image[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            image: self.image.iter().map(|&y| other.image[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut image = vec![0u32; self.image.len()];
        for (i, &y) in self.image.iter().enumerate() {
            image[y as usize] = i as u32;
        }
        Perm { image }
    }

    /// Conjugate `self^other = other^-1 * self * other`.
    pub fn conjugate_by(&self, other: &Perm) -> Perm {
        other.inverse().compose(self).compose(other)
    }

    /// Smallest point moved by the permutation, if any.
    pub fn min_moved_point(&self) -> Option<u32> {
        self.image
            .iter()
            .enumerate()
            .find(|(i, &y)| *i as u32 != y)
            .map(|(i, _)| i as u32)
    }

    /// Image of a point set, returned sorted.
    pub fn apply_set(&self, set: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().map(|&p| self.apply(p)).collect();
        out.sort_unstable();
        out
    }

    /// Multiplicative order of the permutation.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut ord: u64 = 1;
        for start in 0..self.degree() as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            loop {
                seen[p as usize] = true;
                len += 1;
                p = self.apply(p);
                if p == start {
                    break;
                }
            }
            ord = lcm(ord, len);
        }
        ord
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_is_right_action() {
        // x^(ab) = (x^a)^b
        let a = Perm::from_cycle(4, &[0, 1, 2, 3]);
        let b = Perm::from_cycle(4, &[0, 1]);
        let ab = a.compose(&b);
        for x in 0..4 {
            assert_eq!(ab.apply(x), b.apply(a.apply(x)));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = Perm::from_cycle(5, &[0, 2, 4, 1]);
        assert!(a.compose(&a.inverse()).is_identity());
        assert!(a.inverse().compose(&a).is_identity());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3]).is_err());
    }

    #[test]
    fn order_of_cycles() {
        assert_eq!(Perm::from_cycle(4, &[0, 1, 2, 3]).order(), 4);
        let double = Perm::from_cycle(6, &[0, 1]).compose(&Perm::from_cycle(6, &[2, 3, 4]));
        assert_eq!(double.order(), 6);
    }
}
