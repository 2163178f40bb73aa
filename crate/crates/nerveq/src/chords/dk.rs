use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exactalg::linalg::RowEchelon;
use crate::exactalg::ncpoly::{fmt_linear, TruncAlgebra};
use crate::exactalg::Rational;

/// Chord `t_{ij}` between strands `i < j` (0-based).
pub type Chord = (u8, u8);

/// Word in chords; leftmost chord is applied last.
pub type ChordWord = Vec<Chord>;

pub fn chord(i: usize, j: usize) -> Chord {
    assert!(i != j, "chord needs two distinct strands");
    if i < j {
        (i as u8, j as u8)
    } else {
        (j as u8, i as u8)
    }
}

fn level(c: &Chord) -> u8 {
    c.1
}

/// A word is normal when its chords are sorted by their larger endpoint.
pub fn is_normal(w: &[Chord]) -> bool {
    w.windows(2).all(|p| level(&p[0]) <= level(&p[1]))
}

fn add_to(acc: &mut FxHashMap<ChordWord, Rational>, w: ChordWord, c: Rational) {
    use std::collections::hash_map::Entry;
    if c.is_zero() {
        return;
    }
    match acc.entry(w) {
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

/// `[g, t]` for a chord `t` of higher level than `g`, as a combination of
/// words of the level of `t`.
fn bracket_down(g: Chord, t: Chord) -> Vec<(ChordWord, i64)> {
    let (i, j) = g;
    let (l, k) = t;
    debug_assert!(k > j);
    if l == i {
        // [t_ij, t_ik] = [t_ik, t_jk]
        vec![(vec![(i, k), (j, k)], 1), (vec![(j, k), (i, k)], -1)]
    } else if l == j {
        // [t_ij, t_jk] = [t_jk, t_ik]
        vec![(vec![(j, k), (i, k)], 1), (vec![(i, k), (j, k)], -1)]
    } else {
        vec![]
    }
}

/// Normal form of `u · g` for a normal word `u`.
fn mul_letter(u: &[Chord], g: Chord, c: &Rational, acc: &mut FxHashMap<ChordWord, Rational>) {
    let split = u.iter().position(|x| level(x) > level(&g)).unwrap_or(u.len());
    let (a, b) = u.split_at(split);
    let mut w = a.to_vec();
    w.push(g);
    w.extend_from_slice(b);
    add_to(acc, w, c.clone());
    // u g = A g B - A [g, B]
    for p in 0..b.len() {
        for (repl, s) in bracket_down(g, b[p]) {
            let mut w = a.to_vec();
            w.extend_from_slice(&b[..p]);
            w.extend(repl);
            w.extend_from_slice(&b[p + 1..]);
            add_to(acc, w, -(c * &Rational::from_int(s)));
        }
    }
}

/// Normal form of an arbitrary chord word.
pub fn normal_form(w: &[Chord]) -> FxHashMap<ChordWord, Rational> {
    let mut acc: FxHashMap<ChordWord, Rational> = FxHashMap::default();
    acc.insert(vec![], Rational::one());
    for &g in w {
        let mut next = FxHashMap::default();
        for (u, c) in &acc {
            mul_letter(u, g, c, &mut next);
        }
        acc = next;
    }
    acc
}

/// Element of the truncated Drinfeld–Kohno algebra `U(t_n)` in normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct DKElement {
    n: usize,
    cap: usize,
    terms: BTreeMap<ChordWord, Rational>,
}

impl DKElement {
    pub fn zero(n: usize, cap: usize) -> Self {
        DKElement { n, cap, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, cap: usize) -> Self {
        let mut e = Self::zero(n, cap);
        e.terms.insert(vec![], Rational::one());
        e
    }

    pub fn gen(n: usize, cap: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n || i == j {
            return Err(Error::OutOfRange(format!("chord t{}{} on {n} strands", i + 1, j + 1)));
        }
        let mut e = Self::zero(n, cap);
        if cap >= 1 {
            e.terms.insert(vec![chord(i, j)], Rational::one());
        }
        Ok(e)
    }

    /// Sum of chords between two disjoint blocks of strands.
    pub fn block_sum(n: usize, cap: usize, a: std::ops::Range<usize>, b: std::ops::Range<usize>) -> Self {
        let mut e = Self::zero(n, cap);
        if cap == 0 {
            return e;
        }
        for i in a {
            for j in b.clone() {
                e.terms.insert(vec![chord(i, j)], Rational::one());
            }
        }
        e
    }

    /// Normal form of `c · w` for an arbitrary word.
    pub fn from_word(n: usize, cap: usize, w: &[Chord], c: Rational) -> Self {
        let mut e = Self::zero(n, cap);
        if w.len() > cap {
            return e;
        }
        for (u, x) in normal_form(w) {
            e.add_term(u, x * &c);
        }
        e
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<ChordWord, Rational> {
        &self.terms
    }

    pub fn coeff(&self, w: &[Chord]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, w: ChordWord, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() || w.len() > self.cap {
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

    pub fn add(&self, o: &Self) -> Self {
        let mut e = self.clone();
        for (w, c) in &o.terms {
            e.add_term(w.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut e = Self::zero(self.n, self.cap);
        if c.is_zero() {
            return e;
        }
        for (w, x) in &self.terms {
            e.terms.insert(w.clone(), x * c);
        }
        e
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: FxHashMap<ChordWord, Rational> = FxHashMap::default();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                if u.len() + v.len() > self.cap {
                    continue;
                }
                let mut cur: FxHashMap<ChordWord, Rational> = FxHashMap::default();
                cur.insert(u.clone(), a * b);
                for &g in v {
                    let mut next = FxHashMap::default();
                    for (w, c) in &cur {
                        mul_letter(w, g, c, &mut next);
                    }
                    cur = next;
                }
                for (w, c) in cur {
                    add_to(&mut acc, w, c);
                }
            }
        }
        let mut e = Self::zero(self.n, self.cap);
        for (w, c) in acc {
            e.add_term(w, c);
        }
        e
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn degree_part(&self, d: usize) -> Self {
        let mut e = Self::zero(self.n, self.cap);
        for (w, c) in &self.terms {
            if w.len() == d {
                e.terms.insert(w.clone(), c.clone());
            }
        }
        e
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        let mut e = Self::zero(self.n, cap);
        for (w, c) in &self.terms {
            e.add_term(w.clone(), c.clone());
        }
        e
    }

    /// Lowest degree with a nonzero component.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }

    /// Relabel strand `i` as `sigma[i]` and renormalize.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if sigma.len() != self.n || sigma.iter().any(|&s| s >= self.n || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::InvalidMorphism(format!("not a permutation of {} strands", self.n)));
        }
        let mut e = Self::zero(self.n, self.cap);
        for (w, c) in &self.terms {
            let v: ChordWord = w.iter().map(|&(i, j)| chord(sigma[i as usize], sigma[j as usize])).collect();
            e = e.add(&Self::from_word(self.n, self.cap, &v, c.clone()));
        }
        Ok(e)
    }
}

impl TruncAlgebra for DKElement {
    fn one_like(&self) -> Self {
        Self::one(self.n, self.cap)
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.n, self.cap)
    }
    fn add(&self, other: &Self) -> Self {
        DKElement::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        DKElement::mul(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        DKElement::scale(self, c)
    }
}

pub fn word_text(w: &[Chord]) -> String {
    w.iter().map(|(i, j)| chord_text(*i, *j)).collect::<Vec<_>>().join(" ")
}

pub fn chord_text(i: u8, j: u8) -> String {
    if i < 9 && j < 9 {
        format!("t{}{}", i + 1, j + 1)
    } else {
        format!("t({},{})", i + 1, j + 1)
    }
}

impl fmt::Display for DKElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(&ChordWord, &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        fmt_linear(f, items.into_iter().map(|(w, c)| (word_text(w), c)))
    }
}

impl fmt::Debug for DKElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All chords on `n` strands, ordered by level then first endpoint.
pub fn chords(n: usize) -> Vec<Chord> {
    let mut out = Vec::new();
    for j in 1..n {
        for i in 0..j {
            out.push((i as u8, j as u8));
        }
    }
    out
}

/// Normal words of degree `d` on `n` strands.
pub fn normal_words(n: usize, d: usize) -> Vec<ChordWord> {
    let cs = chords(n);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(cs: &[Chord], d: usize, cur: &mut ChordWord, out: &mut Vec<ChordWord>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        let min_level = cur.last().map_or(0, level);
        for &c in cs {
            if level(&c) >= min_level {
                cur.push(c);
                rec(cs, d, cur, out);
                cur.pop();
            }
        }
    }
    rec(&cs, d, &mut cur, &mut out);
    out
}

/// Dimension of the degree-`d` part predicted by the normal form.
pub fn pbw_dimension(n: usize, d: usize) -> usize {
    normal_words(n, d).len()
}

/// Defining relations of `t_n` as linear combinations of degree-two words.
pub fn relations(n: usize) -> Vec<Vec<(ChordWord, i64)>> {
    let mut out = Vec::new();
    let cs = chords(n);
    for (a, &x) in cs.iter().enumerate() {
        for &y in &cs[a + 1..] {
            let disjoint = x.0 != y.0 && x.0 != y.1 && x.1 != y.0 && x.1 != y.1;
            if disjoint {
                out.push(vec![(vec![x, y], 1), (vec![y, x], -1)]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                if i == j || i == k {
                    continue;
                }
                // [t_ij + t_ik, t_jk]
                let (a, b, c) = (chord(i, j), chord(i, k), chord(j, k));
                out.push(vec![(vec![a, c], 1), (vec![c, a], -1), (vec![b, c], 1), (vec![c, b], -1)]);
            }
        }
    }
    out
}

/// Dimension of the degree-`d` part computed directly as all words modulo
/// the two-sided ideal of the relations, by exact row reduction.
pub fn brute_force_dimension(n: usize, d: usize) -> usize {
    let cs = chords(n);
    let mut words: Vec<ChordWord> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &words {
            for &c in &cs {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        words = next;
    }
    if d < 2 {
        return words.len();
    }
    let mut shorter: Vec<Vec<ChordWord>> = vec![vec![vec![]]];
    for k in 1..=d - 2 {
        let mut next = Vec::new();
        for w in &shorter[k - 1] {
            for &c in &cs {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        shorter.push(next);
    }
    let rels = relations(n);
    let mut ech: RowEchelon<ChordWord> = RowEchelon::new();
    for left in 0..=d - 2 {
        let right = d - 2 - left;
        for u in &shorter[left] {
            for v in &shorter[right] {
                for r in &rels {
                    let mut row: BTreeMap<ChordWord, Rational> = BTreeMap::new();
                    for (w, c) in r {
                        let mut full = u.clone();
                        full.extend_from_slice(w);
                        full.extend_from_slice(v);
                        *row.entry(full).or_default() += &Rational::from_int(*c);
                    }
                    ech.insert(row);
                }
            }
        }
    }
    words.len() - ech.rank()
}

/// `t_{ij}` pulled back along a map of strands: the sum over the fibers.
pub fn pullback_word(w: &[Chord], img: &[usize], n_src: usize, cap: usize) -> DKElement {
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); img.iter().max().map_or(0, |m| m + 1).max(1)];
    for (i, &j) in img.iter().enumerate() {
        fibers[j].push(i);
    }
    let mut acc = DKElement::one(n_src, cap);
    for &(a, b) in w {
        let fa = fibers.get(a as usize).cloned().unwrap_or_default();
        let fb = fibers.get(b as usize).cloned().unwrap_or_default();
        let mut s = DKElement::zero(n_src, cap);
        for &i in &fa {
            for &j in &fb {
                s.add_term(vec![chord(i, j)], Rational::one());
            }
        }
        acc = acc.mul(&s);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_of_relations_vanishes() {
        for n in 2..=5 {
            for r in relations(n) {
                let mut e = DKElement::zero(n, 4);
                for (w, c) in r {
                    e = e.add(&DKElement::from_word(n, 4, &w, Rational::from_int(c)));
                }
                assert!(e.is_zero(), "relation survives on {n} strands: {e}");
            }
        }
    }

    #[test]
    fn hilbert_series_product_formula() {
        // degree-d dimension of U(t_n) is h_d(1, 2, ..., n-1)
        assert_eq!((0..5).map(|d| pbw_dimension(3, d)).collect::<Vec<_>>(), vec![1, 3, 7, 15, 31]);
        assert_eq!((0..4).map(|d| pbw_dimension(4, d)).collect::<Vec<_>>(), vec![1, 6, 25, 90]);
    }

    #[test]
    fn brute_force_agrees_in_low_degree() {
        for n in 2..=4 {
            for d in 0..=3 {
                assert_eq!(pbw_dimension(n, d), brute_force_dimension(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn central_element_of_t3() {
        let t = |i, j| DKElement::gen(3, 3, i, j).unwrap();
        let c = t(0, 1).add(&t(0, 2)).add(&t(1, 2));
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(c.commutator(&t(i, j)).is_zero());
        }
        assert!(!t(0, 2).commutator(&t(1, 2)).is_zero());
    }

    #[test]
    fn multiplication_is_associative_on_samples() {
        let t = |i, j| DKElement::gen(4, 4, i, j).unwrap();
        let a = t(2, 3).add(&t(0, 1));
        let b = t(0, 3).sub(&t(1, 2));
        let c = t(1, 3).add(&t(0, 2));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn pullback_cables_chords() {
        // t_12 along the merge [1,1,2] is t_13 + t_23
        let e = pullback_word(&[(0, 1)], &[0, 0, 1], 3, 2);
        assert_eq!(e.to_string(), "t13 + t23");
        // a chord on a freshly created strand vanishes
        let z = pullback_word(&[(0, 1)], &[0], 1, 2);
        assert!(z.is_zero());
    }
}
