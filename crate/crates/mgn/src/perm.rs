//! Permutations of `{0..d-1}` and a union-find structure with rollback,
//! the combinatorial substrate of the factorization counters.

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A permutation stored as its image array: `p.apply(x)` is `images[x]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d).collect())
    }

    /// Builds from 1-based images, the convention of the public
    /// factorization instances; rejects non-bijections.
    pub fn from_one_based_images(images: &[usize]) -> Result<Self> {
        let d = images.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty permutation".into()));
        }
        let mut seen = vec![false; d];
        let mut v = Vec::with_capacity(d);
        for &im in images {
            if im == 0 || im > d || seen[im - 1] {
                return Err(Error::InvalidInput(format!(
                    "images {images:?} are not a bijection of 1..={d}"
                )));
            }
            seen[im - 1] = true;
            v.push(im - 1);
        }
        Ok(Perm(v))
    }

    /// The transposition `(i j)` in degree `d`, zero-based.
    pub fn transposition(d: usize, i: usize, j: usize) -> Result<Self> {
        if i >= d || j >= d || i == j {
            return Err(Error::InvalidInput(format!(
                "transposition ({i} {j}) invalid in degree {d}"
            )));
        }
        let mut v: Vec<usize> = (0..d).collect();
        v.swap(i, j);
        Ok(Perm(v))
    }

    /// Canonical representative of a cycle type: consecutive blocks, one
    /// cycle per part.
    pub fn from_cycle_type(t: &Partition) -> Self {
        let mut v = Vec::with_capacity(t.size() as usize);
        let mut base = 0usize;
        for &p in t.parts() {
            let p = p as usize;
            for off in 0..p {
                v.push(base + (off + 1) % p);
            }
            base += p;
        }
        Perm(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self` after `other`: `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut v = vec![0usize; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            v[y] = x;
        }
        Perm(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn cycle_lengths(&self) -> Vec<u32> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_lengths().len()
    }

    pub fn cycle_type(&self) -> Partition {
        Partition::new(self.cycle_lengths()).expect("d >= 1 gives a nonempty type")
    }
}

/// Union-find with union by size and an undo trail. `find` skips path
/// compression so that unions can be popped exactly.
#[derive(Debug, Clone)]
pub struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    trail: Vec<usize>,
    components: usize,
}

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            trail: Vec::new(),
            components: n,
        }
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; records the operation either
    /// way so that every `union` pairs with one undo step.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.trail.push(usize::MAX);
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.trail.push(small);
        self.components -= 1;
        true
    }

    /// Undoes the most recent `union` call.
    pub fn undo(&mut self) {
        let small = self.trail.pop().expect("undo without matching union");
        if small == usize::MAX {
            return;
        }
        let big = self.parent[small];
        self.parent[small] = small;
        self.size[big] -= self.size[small];
        self.components += 1;
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        // (1 3) after (1 2), zero-based (0 2) after (0 1): x = 0 goes to
        // 1 under the right factor, then stays; the product is the
        // 3-cycle 0 -> 1 -> ... check images directly.
        let t01 = Perm::transposition(3, 0, 1).unwrap();
        let t02 = Perm::transposition(3, 0, 2).unwrap();
        let p = t02.compose(&t01);
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.cycle_type().parts(), &[3]);
    }

    #[test]
    fn inverse_and_identity() {
        let p = Perm::from_one_based_images(&[3, 1, 2]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(p.inverse().compose(&p).is_identity());
        assert!(!p.is_identity());
    }

    #[test]
    fn bad_images_rejected() {
        assert!(Perm::from_one_based_images(&[1, 1, 3]).is_err());
        assert!(Perm::from_one_based_images(&[0, 1]).is_err());
        assert!(Perm::from_one_based_images(&[2, 3]).is_err());
        assert!(Perm::from_one_based_images(&[]).is_err());
    }

    #[test]
    fn cycle_type_representative_roundtrip() {
        for parts in [vec![3, 2, 2, 1], vec![5], vec![1, 1, 1], vec![4, 3]] {
            let t = Partition::new(parts).unwrap();
            let p = Perm::from_cycle_type(&t);
            assert_eq!(p.cycle_type(), t);
        }
    }

    #[test]
    fn dsu_union_undo_roundtrip() {
        let mut dsu = RollbackDsu::new(5);
        assert_eq!(dsu.components(), 5);
        assert!(dsu.union(0, 1));
        assert!(dsu.union(2, 3));
        assert!(!dsu.union(1, 0));
        assert_eq!(dsu.components(), 3);
        assert!(dsu.union(0, 2));
        assert_eq!(dsu.components(), 2);
        dsu.undo();
        assert_eq!(dsu.components(), 3);
        assert_ne!(dsu.find(0), dsu.find(2));
        dsu.undo();
        dsu.undo();
        dsu.undo();
        assert_eq!(dsu.components(), 5);
        assert_ne!(dsu.find(0), dsu.find(1));
    }
}
