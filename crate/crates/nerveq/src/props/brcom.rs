use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::braid::BraidWord;
use crate::props::finmap::FinMap;

/// Morphism `•^m → •^n` of the free braided commutative-monoid PROP: a
/// braid on `m` strands followed by a weakly monotone attachment of the
/// strands' final positions to `n` target points.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrMorphism {
    braid: BraidWord,
    target: usize,
    attach: Vec<usize>,
}

impl BrMorphism {
    /// `attach` is 0-based and indexed by final position.
    pub fn new(braid: BraidWord, target: usize, attach: Vec<usize>) -> Result<Self> {
        if attach.len() != braid.strands() {
            return Err(Error::ArityMismatch(format!(
                "{} attachments for {} strands",
                attach.len(),
                braid.strands()
            )));
        }
        if let Some(&bad) = attach.iter().find(|&&j| j >= target) {
            return Err(Error::OutOfRange(format!("attachment {} exceeds target {target}", bad + 1)));
        }
        if attach.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidMorphism("attachment must be weakly monotone".into()));
        }
        Ok(BrMorphism { braid, target, attach })
    }

    pub fn identity(n: usize) -> Self {
        BrMorphism { braid: BraidWord::identity(n), target: n, attach: (0..n).collect() }
    }

    /// Crossing-free morphism from a monotone map.
    pub fn from_monotone(f: &FinMap) -> Result<Self> {
        if !f.is_monotone() {
            return Err(Error::InvalidMorphism(format!("{f} is not monotone")));
        }
        Self::new(BraidWord::identity(f.source()), f.target(), f.img().to_vec())
    }

    pub fn source(&self) -> usize {
        self.braid.strands()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn braid(&self) -> &BraidWord {
        &self.braid
    }

    pub fn attach(&self) -> &[usize] {
        &self.attach
    }

    /// Image in the symmetric PROP: strand `i` goes to `attach[π(i)]`.
    pub fn underlying(&self) -> FinMap {
        let pi = self.braid.permutation();
        FinMap::new(self.source(), self.target, pi.iter().map(|&p| self.attach[p]).collect()).unwrap()
    }

    /// Number of strands attached to each target point.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut c = vec![0; self.target];
        for &j in &self.attach {
            c[j] += 1;
        }
        c
    }

    /// `self ∘ other`, by cabling `self`'s braid along `other`'s fibers.
    pub fn compose(&self, other: &BrMorphism) -> Result<BrMorphism> {
        if other.target != self.source() {
            return Err(Error::ArityMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.source(),
                self.target,
                other.source(),
                other.target
            )));
        }
        let mult = other.multiplicities();
        let cabled = self.braid.cable(&mult)?;
        let braid = cabled.compose(&other.braid)?;
        let pi = self.braid.permutation();
        let mut at_final = vec![0; self.source()];
        for (j, &p) in pi.iter().enumerate() {
            at_final[p] = j;
        }
        let mut attach = Vec::with_capacity(other.source());
        for p in 0..self.source() {
            for _ in 0..mult[at_final[p]] {
                attach.push(self.attach[p]);
            }
        }
        BrMorphism::new(braid, self.target, attach)
    }

    /// Side-by-side juxtaposition.
    pub fn tensor(&self, other: &BrMorphism) -> BrMorphism {
        let mut attach = self.attach.clone();
        attach.extend(other.attach.iter().map(|&j| j + self.target));
        BrMorphism { braid: self.braid.tensor(&other.braid), target: self.target + other.target, attach }
    }

    /// Sound simplification: handle reduction of the braid, then removal of
    /// final crossings between strands that end on the same point.
    pub fn normalize(&self) -> BrMorphism {
        let mut w = self.braid.handle_reduce().letters().to_vec();
        loop {
            let before = w.len();
            while let Some(&l) = w.first() {
                let k = l.unsigned_abs() as usize;
                if self.attach[k - 1] == self.attach[k] {
                    w.remove(0);
                } else {
                    break;
                }
            }
            let reduced = BraidWord::new(self.source(), w.clone()).unwrap().handle_reduce();
            w = reduced.letters().to_vec();
            if w.len() == before {
                break;
            }
        }
        BrMorphism { braid: BraidWord::new(self.source(), w).unwrap(), target: self.target, attach: self.attach.clone() }
    }

    /// Random morphism with the given arities and braid length.
    pub fn random<R: Rng>(rng: &mut R, source: usize, target: usize, len: usize) -> BrMorphism {
        let letters = if source < 2 {
            vec![]
        } else {
            (0..len)
                .map(|_| {
                    let k = rng.gen_range(1..source) as i32;
                    if rng.gen_bool(0.5) {
                        k
                    } else {
                        -k
                    }
                })
                .collect()
        };
        let mut attach: Vec<usize> = (0..source).map(|_| rng.gen_range(0..target.max(1))).collect();
        attach.sort();
        BrMorphism::new(BraidWord::new(source, letters).unwrap(), target, attach).unwrap()
    }
}

impl fmt::Display for BrMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.attach.iter().map(|j| (j + 1).to_string()).collect();
        if self.target == self.attach.iter().map(|j| j + 1).max().unwrap_or(0) {
            write!(f, "braid({}){{{}}}[{}]", self.source(), self.braid, a.join(","))
        } else {
            write!(f, "braid({}->{}){{{}}}[{}]", self.source(), self.target, self.braid, a.join(","))
        }
    }
}

impl fmt::Debug for BrMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn br(n: usize, l: &[i32], t: usize, a: &[usize]) -> BrMorphism {
        BrMorphism::new(BraidWord::new(n, l.to_vec()).unwrap(), t, a.to_vec()).unwrap()
    }

    #[test]
    fn underlying_map_follows_permutation() {
        // the strand starting third ends first
        let phi = br(4, &[1, 2], 3, &[0, 1, 2, 2]);
        assert_eq!(phi.underlying().img(), &[1, 2, 0, 2]);
    }

    #[test]
    fn composition_projects_to_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(0..5);
            let n = rng.gen_range(1..5);
            let p = rng.gen_range(1..5);
            let (l1, l2) = (rng.gen_range(0..7), rng.gen_range(0..7));
            let phi = BrMorphism::random(&mut rng, m, n, l1);
            let psi = BrMorphism::random(&mut rng, n, p, l2);
            let c = psi.compose(&phi).unwrap();
            assert_eq!(c.underlying(), psi.underlying().compose(&phi.underlying()).unwrap());
        }
    }

    #[test]
    fn identity_is_neutral() {
        let phi = br(3, &[1, -2], 2, &[0, 0, 1]);
        assert_eq!(BrMorphism::identity(2).compose(&phi).unwrap(), phi);
        let c = phi.compose(&BrMorphism::identity(3)).unwrap();
        assert!(c.braid().braid_eq(phi.braid()));
    }

    #[test]
    fn normalize_drops_crossings_into_a_merge() {
        let phi = br(2, &[1, 1, -1], 1, &[0, 0]);
        assert!(phi.normalize().braid().is_empty());
        let psi = br(2, &[1], 2, &[0, 1]);
        assert_eq!(psi.normalize(), psi);
    }

    #[test]
    fn rejects_non_monotone_attachment() {
        assert!(matches!(
            BrMorphism::new(BraidWord::identity(2), 2, vec![1, 0]),
            Err(Error::InvalidMorphism(_))
        ));
    }
}
