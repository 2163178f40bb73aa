use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exactalg::rational::inv_factorial;
use crate::exactalg::Rational;

/// Truncated associative algebra with unit, used as a substitution target.
pub trait TruncAlgebra: Clone {
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

pub type Word = Vec<u8>;

/// Noncommutative polynomial over `Q` in a finite alphabet, truncated above
/// a fixed degree cap.
#[derive(Clone, PartialEq, Eq)]
pub struct NCPoly {
    letters: Vec<String>,
    cap: usize,
    terms: BTreeMap<Word, Rational>,
}

impl NCPoly {
    pub fn zero(letters: &[&str], cap: usize) -> Self {
        NCPoly { letters: letters.iter().map(|s| s.to_string()).collect(), cap, terms: BTreeMap::new() }
    }

    pub fn one(letters: &[&str], cap: usize) -> Self {
        let mut p = Self::zero(letters, cap);
        p.terms.insert(vec![], Rational::one());
        p
    }

    /// The generator with index `i`.
    pub fn gen(letters: &[&str], cap: usize, i: u8) -> Self {
        let mut p = Self::zero(letters, cap);
        if cap >= 1 {
            p.terms.insert(vec![i], Rational::one());
        }
        p
    }

    pub fn from_terms(letters: &[&str], cap: usize, terms: impl IntoIterator<Item = (Word, Rational)>) -> Self {
        let mut p = Self::zero(letters, cap);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    fn empty_like(&self) -> Self {
        NCPoly { letters: self.letters.clone(), cap: self.cap, terms: BTreeMap::new() }
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn coeff(&self, w: &[u8]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        if w.len() > self.cap || c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        let mut p = self.empty_like();
        p.cap = cap;
        for (w, c) in &self.terms {
            if w.len() <= cap {
                p.terms.insert(w.clone(), c.clone());
            }
        }
        p
    }

    /// Homogeneous component of degree `d`.
    pub fn degree_part(&self, d: usize) -> Self {
        let mut p = self.empty_like();
        for (w, c) in &self.terms {
            if w.len() == d {
                p.terms.insert(w.clone(), c.clone());
            }
        }
        p
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&[])
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut p = self.empty_like();
        if c.is_zero() {
            return p;
        }
        for (w, v) in &self.terms {
            p.terms.insert(w.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: FxHashMap<Word, Rational> = FxHashMap::default();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                if w1.len() + w2.len() > self.cap {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                *acc.entry(w).or_default() += &(c1 * c2);
            }
        }
        let mut p = self.empty_like();
        p.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        p
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// `exp(self)`; requires zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NotInvertible("exp needs zero constant term".into()));
        }
        let mut acc = Self::one(&self.letter_refs(), self.cap);
        let mut pw = acc.clone();
        for k in 1..=self.cap {
            pw = pw.mul(self);
            acc = acc.add(&pw.scale(&inv_factorial(k as u64)));
        }
        Ok(acc)
    }

    /// `log(self)`; requires constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::NotInvertible("log needs constant term 1".into()));
        }
        let u = self.sub(&Self::one(&self.letter_refs(), self.cap));
        let mut acc = self.empty_like();
        let mut pw = Self::one(&self.letter_refs(), self.cap);
        for k in 1..=self.cap {
            pw = pw.mul(&u);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pw.scale(&Rational::new(sign, k as i64)));
        }
        Ok(acc)
    }

    /// Multiplicative inverse; requires invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0inv = c0.recip().ok_or_else(|| Error::NotInvertible("zero constant term".into()))?;
        let one = Self::one(&self.letter_refs(), self.cap);
        let u = one.sub(&self.scale(&c0inv));
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 1..=self.cap {
            pw = pw.mul(&u);
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&c0inv))
    }

    fn letter_refs(&self) -> Vec<&str> {
        self.letters.iter().map(|s| s.as_str()).collect()
    }

    /// Substitute `images[i]` for letter `i` in an arbitrary truncated algebra.
    pub fn substitute<A: TruncAlgebra>(&self, images: &[A]) -> Result<A> {
        if images.len() < self.letters.len() {
            return Err(Error::ArityMismatch(format!(
                "{} images for {} letters",
                images.len(),
                self.letters.len()
            )));
        }
        let mut cache: FxHashMap<Word, A> = FxHashMap::default();
        let one = images[0].one_like();
        let mut acc = images[0].zero_like();
        for (w, c) in &self.terms {
            let v = Self::eval_word(w, images, &one, &mut cache);
            acc = acc.add(&v.scale(c));
        }
        Ok(acc)
    }

    fn eval_word<A: TruncAlgebra>(w: &[u8], images: &[A], one: &A, cache: &mut FxHashMap<Word, A>) -> A {
        if w.is_empty() {
            return one.clone();
        }
        if let Some(v) = cache.get(w) {
            return v.clone();
        }
        let prefix = Self::eval_word(&w[..w.len() - 1], images, one, cache);
        let v = prefix.mul(&images[w[w.len() - 1] as usize]);
        cache.insert(w.to_vec(), v.clone());
        v
    }

    /// Shuffle coproduct, as a map `word pair -> coefficient`, truncated by
    /// total degree.
    pub fn coproduct(&self) -> BTreeMap<(Word, Word), Rational> {
        let mut out: BTreeMap<(Word, Word), Rational> = BTreeMap::new();
        for (w, c) in &self.terms {
            let n = w.len();
            for mask in 0u32..(1u32 << n) {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (i, &l) in w.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        a.push(l);
                    } else {
                        b.push(l);
                    }
                }
                *out.entry((a, b)).or_default() += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `self ⊗ self` truncated by total degree.
    pub fn tensor_square(&self) -> BTreeMap<(Word, Word), Rational> {
        let mut out = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &self.terms {
                if a.len() + b.len() <= self.cap {
                    out.insert((a.clone(), b.clone()), x * y);
                }
            }
        }
        out
    }

    /// `Δ(self) = self ⊗ self` up to the degree cap.
    pub fn is_grouplike(&self) -> bool {
        self.constant_term().is_one() && self.coproduct() == self.tensor_square()
    }

    /// `Δ(self) = self ⊗ 1 + 1 ⊗ self`.
    pub fn is_primitive(&self) -> bool {
        let mut expect = BTreeMap::new();
        for (w, c) in &self.terms {
            if w.is_empty() {
                return false;
            }
            *expect.entry((w.clone(), vec![])).or_insert_with(Rational::zero) += c;
            *expect.entry((vec![], w.clone())).or_insert_with(Rational::zero) += c;
        }
        expect.retain(|_, c: &mut Rational| !c.is_zero());
        self.coproduct() == expect
    }

    /// Swap the roles of letters according to `perm` (letter `i` becomes
    /// `perm[i]`).
    pub fn relabel(&self, perm: &[u8]) -> Self {
        let mut p = self.empty_like();
        for (w, c) in &self.terms {
            p.add_term(w.iter().map(|&l| perm[l as usize]).collect(), c.clone());
        }
        p
    }

    /// `p(-x, -y, ...)`.
    pub fn negate_letters(&self) -> Self {
        let mut p = self.empty_like();
        for (w, c) in &self.terms {
            let c = if w.len() % 2 == 1 { -c } else { c.clone() };
            p.terms.insert(w.clone(), c);
        }
        p
    }

    fn fmt_word(&self, w: &[u8]) -> String {
        w.iter().map(|&l| self.letters[l as usize].as_str()).collect::<Vec<_>>().join("")
    }
}

impl TruncAlgebra for NCPoly {
    fn one_like(&self) -> Self {
        Self::one(&self.letter_refs(), self.cap)
    }
    fn zero_like(&self) -> Self {
        self.empty_like()
    }
    fn add(&self, other: &Self) -> Self {
        NCPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        NCPoly::mul(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        NCPoly::scale(self, c)
    }
}

pub(crate) fn fmt_linear<'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = (String, &'a Rational)>,
) -> fmt::Result {
    let mut first = true;
    for (label, c) in items {
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        if label.is_empty() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            write!(f, "{label}")?;
        } else {
            write!(f, "{a} {label}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(&Word, &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        fmt_linear(f, items.into_iter().map(|(w, c)| (self.fmt_word(w), c)))
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lyndon words of length exactly `n` over an alphabet of size `k`, in
/// lexicographic order (Duval's algorithm).
pub fn lyndon_words(k: u8, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<i32> = vec![-1];
    while !w.is_empty() {
        let last = w.len() - 1;
        w[last] += 1;
        if w.len() == n {
            out.push(w.iter().map(|&x| x as u8).collect());
        }
        let m = w.len();
        while w.len() < n {
            let x = w[w.len() - m];
            w.push(x);
        }
        while !w.is_empty() && w[w.len() - 1] == k as i32 - 1 {
            w.pop();
        }
    }
    out
}

/// Standard bracketing of a Lyndon word as a Lie polynomial.
pub fn lyndon_bracket(w: &[u8], letters: &[&str], cap: usize) -> NCPoly {
    if w.len() == 1 {
        return NCPoly::gen(letters, cap, w[0]);
    }
    // split at the longest proper Lyndon suffix
    let mut split = 1;
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            split = i;
            break;
        }
    }
    let a = lyndon_bracket(&w[..split], letters, cap);
    let b = lyndon_bracket(&w[split..], letters, cap);
    a.commutator(&b)
}

pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| {
        let rot: Vec<u8> = w[i..].iter().chain(&w[..i]).copied().collect();
        rot.as_slice() > w
    })
}

/// Render a Lyndon word in bracket notation, e.g. `[x,[x,y]]`.
pub fn lyndon_bracket_text(w: &[u8], letters: &[&str]) -> String {
    if w.len() == 1 {
        return letters[w[0] as usize].to_string();
    }
    let mut split = 1;
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            split = i;
            break;
        }
    }
    format!("[{},{}]", lyndon_bracket_text(&w[..split], letters), lyndon_bracket_text(&w[split..], letters))
}

/// Coordinates of a homogeneous Lie polynomial of degree `d` in the Lyndon
/// bracket basis; `None` if it is not a Lie element.
pub fn lie_coordinates(p: &NCPoly, d: usize) -> Option<Vec<(Word, Rational)>> {
    let letters: Vec<&str> = p.letters.iter().map(|s| s.as_str()).collect();
    let basis = lyndon_words(letters.len() as u8, d);
    let polys: Vec<NCPoly> = basis.iter().map(|w| lyndon_bracket(w, &letters, p.cap)).collect();
    // Lyndon brackets are triangular: the bracket of w has leading word w.
    let mut rest = p.degree_part(d);
    let mut coords = Vec::new();
    for (w, b) in basis.iter().zip(&polys).rev() {
        let c = rest.coeff(w);
        if !c.is_zero() {
            let lead = b.coeff(w);
            let k = &c / &lead;
            rest = rest.sub(&b.scale(&k));
            coords.push((w.clone(), k));
        }
    }
    if rest.is_zero() {
        coords.reverse();
        Some(coords)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: [&str; 2] = ["x", "y"];

    #[test]
    fn lyndon_counts_match_witt_formula() {
        let counts: Vec<usize> = (1..=6).map(|n| lyndon_words(2, n).len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        assert_eq!(lyndon_words(3, 2).len(), 3);
        assert_eq!(lyndon_bracket_text(&[0, 0, 1], &XY), "[x,[x,y]]");
    }

    #[test]
    fn exp_log_round_trip() {
        let x = NCPoly::gen(&XY, 4, 0);
        let y = NCPoly::gen(&XY, 4, 1);
        let l = x.commutator(&y).scale(&Rational::new(1, 24)).add(&x);
        let e = l.exp().unwrap();
        assert!(e.is_grouplike());
        assert_eq!(e.log().unwrap(), l);
        let inv = e.inverse().unwrap();
        assert_eq!(e.mul(&inv), NCPoly::one(&XY, 4));
    }

    #[test]
    fn commutator_is_primitive() {
        let x = NCPoly::gen(&XY, 3, 0);
        let y = NCPoly::gen(&XY, 3, 1);
        let c = x.commutator(&y);
        assert!(c.is_primitive());
        assert_eq!(c.to_string(), "xy - yx");
        let coords = lie_coordinates(&c, 2).unwrap();
        assert_eq!(coords, vec![(vec![0, 1], Rational::one())]);
        assert!(lie_coordinates(&x.mul(&y), 2).is_none());
    }
}
