//! Point permutations and capped group closure.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `0..n` stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// True when the image array is a bijection of `0..n`.
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.len()];
        for &x in &self.0 {
            match seen.get_mut(x as usize) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        true
    }

    /// `self` after `other`: x ↦ self(other(x)).
    pub fn after(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    /// Image of a point set, sorted.
    pub fn image_set(&self, pts: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = pts.iter().map(|&x| self.apply(x)).collect();
        v.sort_unstable();
        v
    }

    pub fn support(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &x)| i as u32 != x).count()
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.after(self);
            k += 1;
        }
        k
    }
}

/// Group generated by `gens`, by breadth-first multiplication. Elements in discovery order.
pub fn closure(n: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let id = Perm::identity(n);
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut out = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.after(&g);
            if seen.insert(h.clone()) {
                if out.len() >= cap {
                    return Err(Error::ClosureCapExceeded(cap));
                }
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closure_of_cycle_and_transposition_is_symmetric_group() {
        let c = Perm(vec![1, 2, 3, 0]);
        let t = Perm(vec![1, 0, 2, 3]);
        assert_eq!(closure(4, &[c, t], 1000).unwrap().len(), 24);
    }

    #[test]
    fn cap_is_enforced() {
        let c = Perm(vec![1, 2, 3, 4, 0]);
        assert!(matches!(closure(5, &[c], 3), Err(Error::ClosureCapExceeded(3))));
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(mut v in Just((0u32..9).collect::<Vec<_>>()).prop_shuffle()) {
            let p = Perm(std::mem::take(&mut v));
            prop_assert!(p.is_bijection());
            prop_assert!(p.after(&p.inverse()).is_identity());
            prop_assert!(p.inverse().after(&p).is_identity());
            prop_assert_eq!(closure(9, std::slice::from_ref(&p), 10_000).unwrap().len(), p.order());
        }
    }
}
