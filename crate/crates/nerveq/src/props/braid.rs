use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Braid word on `strands` strands.
///
/// Letter `k > 0` is the generator `s_k` (strand at position `k` crossing
/// over the one at `k + 1`), `-k` its inverse. Words are algebraic products
/// read as composition: the leftmost letter is applied last.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        for &l in &letters {
            let k = l.unsigned_abs() as usize;
            if l == 0 || k >= strands {
                return Err(Error::OutOfRange(format!("generator s{k} on {strands} strands")));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: vec![] }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters in the order they are applied.
    pub fn applied(&self) -> impl Iterator<Item = i32> + '_ {
        self.letters.iter().rev().copied()
    }

    /// `π` with `π[i]` the final position of the strand starting at `i`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for l in self.applied() {
            let k = l.unsigned_abs() as usize;
            at.swap(k - 1, k);
        }
        let mut pi = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            pi[strand] = pos;
        }
        pi
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.strands != other.strands {
            return Err(Error::ArityMismatch(format!(
                "braids on {} and {} strands",
                self.strands, other.strands
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Side-by-side juxtaposition.
    pub fn tensor(&self, other: &BraidWord) -> BraidWord {
        let shift = self.strands as i32;
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().map(|&l| if l > 0 { l + shift } else { l - shift }));
        BraidWord { strands: self.strands + other.strands, letters }
    }

    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<i32> = Vec::new();
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord { strands: self.strands, letters: out }
    }

    /// Handle reduction; the result is empty iff the braid is trivial.
    pub fn handle_reduce(&self) -> BraidWord {
        let mut w = self.free_reduce().letters;
        while let Some((p, q)) = find_handle(&w) {
            let i = w[p].abs();
            let e = w[p].signum();
            let mut inner = Vec::with_capacity(q - p);
            for &l in &w[p + 1..q] {
                if l.abs() == i + 1 {
                    inner.push(-e * (i + 1));
                    inner.push(l.signum() * i);
                    inner.push(e * (i + 1));
                } else {
                    inner.push(l);
                }
            }
            w.splice(p..=q, inner);
            w = BraidWord { strands: self.strands, letters: w }.free_reduce().letters;
        }
        BraidWord { strands: self.strands, letters: w }
    }

    pub fn is_trivial(&self) -> bool {
        self.handle_reduce().is_empty()
    }

    /// Equality in the braid group.
    pub fn braid_eq(&self, other: &BraidWord) -> bool {
        self.strands == other.strands && self.compose(&other.inverse()).unwrap().is_trivial()
    }

    /// Replace strand `j` (by starting position) with `mult[j]` parallel
    /// strands; empty cables drop their crossings.
    pub fn cable(&self, mult: &[usize]) -> Result<BraidWord> {
        if mult.len() != self.strands {
            return Err(Error::ArityMismatch(format!(
                "{} multiplicities for {} strands",
                mult.len(),
                self.strands
            )));
        }
        let total: usize = mult.iter().sum();
        let mut sizes = mult.to_vec();
        let mut applied: Vec<i32> = Vec::new();
        for l in self.applied() {
            let k = l.unsigned_abs() as usize;
            let (a, b) = (sizes[k - 1], sizes[k]);
            let s: usize = sizes[..k - 1].iter().sum();
            let sign = l.signum();
            for t in 0..b {
                // strand t of the right cable moves left across the left cable
                for g in (s + t + 1..=s + a + t).rev() {
                    applied.push(sign * g as i32);
                }
            }
            sizes.swap(k - 1, k);
        }
        applied.reverse();
        BraidWord::new(total, applied)
    }

    /// Word for `letters` given in application order.
    pub fn from_applied(strands: usize, mut applied: Vec<i32>) -> Result<BraidWord> {
        applied.reverse();
        BraidWord::new(strands, applied)
    }
}

fn find_handle(w: &[i32]) -> Option<(usize, usize)> {
    for q in 0..w.len() {
        let i = w[q].abs();
        for p in (0..q).rev() {
            let a = w[p].abs();
            if a == i {
                if w[p] == -w[q] {
                    return Some((p, q));
                }
                break;
            }
            if a == i - 1 {
                break;
            }
        }
    }
    None
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .letters
            .iter()
            .map(|&l| if l > 0 { format!("s{l}") } else { format!("s{}'", -l) })
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "braid({}){{{}}}", self.strands, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: usize, l: &[i32]) -> BraidWord {
        BraidWord::new(n, l.to_vec()).unwrap()
    }

    #[test]
    fn permutation_convention() {
        // s1 s2 on three strands: strand 1 ends at 2, 2 at 3, 3 at 1
        assert_eq!(b(3, &[1, 2]).permutation(), vec![1, 2, 0]);
        assert_eq!(b(3, &[]).permutation(), vec![0, 1, 2]);
    }

    #[test]
    fn braid_relations_hold() {
        assert!(b(3, &[1, 2, 1]).braid_eq(&b(3, &[2, 1, 2])));
        assert!(b(4, &[1, 3]).braid_eq(&b(4, &[3, 1])));
        assert!(!b(3, &[1, 2]).braid_eq(&b(3, &[2, 1])));
        assert!(b(2, &[1, -1]).is_trivial());
        assert!(!b(2, &[1, 1]).is_trivial());
        assert!(b(3, &[1, 2, -1, -2, 1, 2, -1, -2]).compose(&b(3, &[2, 1, -2, -1, 2, 1, -2, -1])).unwrap().permutation() == vec![0, 1, 2]);
    }

    #[test]
    fn pure_braid_generator_is_nontrivial() {
        // s1^2 s2^2 s1^-2 s2^-2 is a nontrivial pure braid
        let w = b(3, &[1, 1, 2, 2, -1, -1, -2, -2]);
        assert_eq!(w.permutation(), vec![0, 1, 2]);
        assert!(!w.is_trivial());
    }

    #[test]
    fn cabling() {
        // one crossing of a 2-cable over a single strand
        let c = b(2, &[1]).cable(&[2, 1]).unwrap();
        assert!(c.braid_eq(&b(3, &[1, 2])));
        assert_eq!(c.permutation(), vec![1, 2, 0]);
        let e = b(2, &[1]).cable(&[0, 2]).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.strands(), 2);
    }

    #[test]
    fn invalid_generators() {
        assert!(BraidWord::new(2, vec![2]).is_err());
        assert!(BraidWord::new(2, vec![0]).is_err());
    }
}
