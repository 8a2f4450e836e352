//! Permutations of `0..n`, the algebraic backbone of the graph encoding.
//!
//! A closed bipartite colored graph is a tuple of permutations, so faces,
//! connectivity, jackets and canonical forms all reduce to composing
//! permutations and counting cycles.

use itertools::Itertools;

/// A permutation of `0..n` stored as its image list: `images[i]` is the image
/// of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).collect(),
        }
    }

    /// Build from an image list; returns `None` if it is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(Perm { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Perm { images: inv }
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm {
            images: other.images.iter().map(|&v| self.images[v]).collect(),
        }
    }

    /// Conjugation `by ∘ self ∘ by⁻¹`.
    pub fn conjugate(&self, by: &Perm) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[by.apply(i)] = by.apply(v);
        }
        Perm { images }
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by
    /// that element. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.images[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.images[next];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut next = start;
            while !seen[next] {
                seen[next] = true;
                next = self.images[next];
            }
        }
        count
    }
}

/// Iterate over all permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> impl Iterator<Item = Perm> {
    (0..n).permutations(n).map(|images| Perm { images })
}

/// Number of permutations of `0..n` as u64 (desk scale: n ≤ 10).
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
