use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Morphism `•^m → •^n` of the free commutative-monoid PROP: an arbitrary
/// map of finite sets `{0..m} → {0..n}` (displayed 1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinMap {
    source: usize,
    target: usize,
    img: Vec<usize>,
}

impl FinMap {
    /// `img` is 0-based.
    pub fn new(source: usize, target: usize, img: Vec<usize>) -> Result<Self> {
        if img.len() != source {
            return Err(Error::ArityMismatch(format!(
                "map with source {source} needs {source} images, got {}",
                img.len()
            )));
        }
        if let Some(&bad) = img.iter().find(|&&j| j >= target) {
            return Err(Error::OutOfRange(format!("image {} exceeds target {target}", bad + 1)));
        }
        Ok(FinMap { source, target, img })
    }

    /// `img` is 1-based, as written in the DSL.
    pub fn from_one_based(source: usize, target: usize, img: &[usize]) -> Result<Self> {
        if img.iter().any(|&j| j == 0) {
            return Err(Error::OutOfRange("images are 1-based".into()));
        }
        Self::new(source, target, img.iter().map(|j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        FinMap { source: n, target: n, img: (0..n).collect() }
    }

    /// Merge all of `•^n` into one point.
    pub fn merge_all(n: usize) -> Self {
        FinMap { source: n, target: 1, img: vec![0; n] }
    }

    /// Swap of positions `i` and `i + 1` on `n` points.
    pub fn transposition(n: usize, i: usize) -> Self {
        let mut img: Vec<usize> = (0..n).collect();
        img.swap(i, i + 1);
        FinMap { source: n, target: n, img }
    }

    /// Merge of positions `i` and `i + 1`.
    pub fn merge_at(n: usize, i: usize) -> Self {
        let img = (0..n).map(|k| if k <= i { k } else { k - 1 }).collect();
        FinMap { source: n, target: n - 1, img }
    }

    /// Insertion of a fresh point at position `i` of `•^(n+1)`.
    pub fn unit_at(n: usize, i: usize) -> Self {
        let img = (0..n).map(|k| if k < i { k } else { k + 1 }).collect();
        FinMap { source: n, target: n + 1, img }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn img(&self) -> &[usize] {
        &self.img
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i]
    }

    /// Preimage of `j`, in increasing order.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.source).filter(|&i| self.img[i] == j).collect()
    }

    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut f = vec![Vec::new(); self.target];
        for (i, &j) in self.img.iter().enumerate() {
            f[j].push(i);
        }
        f
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FinMap) -> Result<FinMap> {
        if other.target != self.source {
            return Err(Error::ArityMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(FinMap { source: other.source, target: self.target, img: other.img.iter().map(|&j| self.img[j]).collect() })
    }

    /// Disjoint union `self ⊗ other`.
    pub fn tensor(&self, other: &FinMap) -> FinMap {
        let mut img = self.img.clone();
        img.extend(other.img.iter().map(|&j| j + self.target));
        FinMap { source: self.source + other.source, target: self.target + other.target, img }
    }

    pub fn is_monotone(&self) -> bool {
        self.img.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_bijection(&self) -> bool {
        self.source == self.target && {
            let mut seen = vec![false; self.target];
            self.img.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.img.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Result<FinMap> {
        if !self.is_bijection() {
            return Err(Error::NotInvertible("map is not a bijection".into()));
        }
        let mut img = vec![0; self.source];
        for (i, &j) in self.img.iter().enumerate() {
            img[j] = i;
        }
        Ok(FinMap { source: self.source, target: self.target, img })
    }

    /// All maps `•^m → •^n`.
    pub fn all(m: usize, n: usize) -> Vec<FinMap> {
        if n == 0 {
            return if m == 0 { vec![FinMap::identity(0)] } else { vec![] };
        }
        let total = n.pow(m as u32);
        (0..total)
            .map(|mut code| {
                let mut img = vec![0; m];
                for slot in img.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                FinMap { source: m, target: n, img }
            })
            .collect()
    }
}

impl fmt::Display for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let img: Vec<String> = self.img.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "map({}->{})[{}]", self.source, self.target, img.join(","))
    }
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_counts() {
        let f = FinMap::from_one_based(3, 2, &[1, 2, 1]).unwrap();
        let g = FinMap::from_one_based(2, 1, &[1, 1]).unwrap();
        assert_eq!(g.compose(&f).unwrap(), FinMap::merge_all(3));
        assert!(f.compose(&g).is_err());
        assert_eq!(FinMap::all(2, 3).len(), 9);
        assert_eq!(FinMap::all(0, 0).len(), 1);
        assert_eq!(FinMap::all(1, 0).len(), 0);
        assert_eq!(f.to_string(), "map(3->2)[1,2,1]");
    }

    #[test]
    fn validation() {
        assert!(matches!(FinMap::from_one_based(2, 2, &[1]), Err(Error::ArityMismatch(_))));
        assert!(matches!(FinMap::from_one_based(1, 2, &[3]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn structural_maps() {
        assert_eq!(FinMap::merge_at(3, 1).img(), &[0, 1, 1]);
        assert_eq!(FinMap::unit_at(2, 1).img(), &[0, 2]);
        let t = FinMap::transposition(3, 0);
        assert_eq!(t.inverse().unwrap(), t);
        assert!(FinMap::merge_all(2).inverse().is_err());
    }
}
