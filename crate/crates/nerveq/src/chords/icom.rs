use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;

use crate::chords::dk::{chord, normal_words, pullback_word, word_text, Chord, ChordWord, DKElement};
use crate::error::{Error, Result};
use crate::exactalg::linalg::RowEchelon;
use crate::exactalg::{Coeff, HSeries, Rational};
use crate::props::FinMap;

/// Morphism of the prop of maps with chords: a rational combination of
/// terms `f ∘ w`, a chord word `w` on the source strands followed by a map
/// `f`. Each chord carries one power of `h`; words longer than `cap` are
/// dropped.
///
/// Terms are kept in normal form modulo the right ideal generated by the
/// chords `t_ij` with `f(i) = f(j)`, which is exactly what the strong
/// commutativity relation kills.
#[derive(Clone, PartialEq, Eq)]
pub struct ICMorphism {
    source: usize,
    target: usize,
    cap: usize,
    terms: BTreeMap<(FinMap, ChordWord), Rational>,
}

type IdealKey = (usize, Vec<Chord>, usize);

fn ideal_cache() -> &'static Mutex<FxHashMap<IdealKey, Arc<RowEchelon<ChordWord>>>> {
    static CACHE: OnceLock<Mutex<FxHashMap<IdealKey, Arc<RowEchelon<ChordWord>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(FxHashMap::default()))
}

fn merged_pairs(f: &FinMap) -> Vec<Chord> {
    let mut out = Vec::new();
    for j in 1..f.source() {
        for i in 0..j {
            if f.apply(i) == f.apply(j) {
                out.push(chord(i, j));
            }
        }
    }
    out
}

/// Degree-`d` part of the right ideal spanned by `pairs` in `U(t_m)`.
fn ideal(m: usize, pairs: &[Chord], d: usize) -> Arc<RowEchelon<ChordWord>> {
    let key = (m, pairs.to_vec(), d);
    if let Some(e) = ideal_cache().lock().unwrap().get(&key) {
        return e.clone();
    }
    let mut ech = RowEchelon::new();
    if d >= 1 {
        for u in normal_words(m, d - 1) {
            for &p in pairs {
                let mut w = vec![p];
                w.extend_from_slice(&u);
                let e = DKElement::from_word(m, d, &w, Rational::one());
                ech.insert(e.terms().clone());
            }
        }
    }
    let e = Arc::new(ech);
    ideal_cache().lock().unwrap().insert(key, e.clone());
    e
}

impl ICMorphism {
    pub fn zero(source: usize, target: usize, cap: usize) -> Self {
        ICMorphism { source, target, cap, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, cap: usize) -> Self {
        Self::from_map(&FinMap::identity(n), cap)
    }

    pub fn from_map(f: &FinMap, cap: usize) -> Self {
        let mut m = Self::zero(f.source(), f.target(), cap);
        m.terms.insert((f.clone(), vec![]), Rational::one());
        m
    }

    /// `f ∘ e` for an element `e` of the chord algebra on the source strands.
    pub fn from_parts(f: &FinMap, e: &DKElement) -> Result<Self> {
        if e.strands() != f.source() {
            return Err(Error::ArityMismatch(format!(
                "chords on {} strands below a map from {}",
                e.strands(),
                f.source()
            )));
        }
        let mut m = Self::zero(f.source(), f.target(), e.cap());
        let mut raw: BTreeMap<ChordWord, Rational> = BTreeMap::new();
        for (w, c) in e.terms() {
            raw.insert(w.clone(), c.clone());
        }
        m.insert_reduced(f, raw);
        Ok(m)
    }

    /// The chord algebra element `e` as an endomorphism.
    pub fn from_chords(e: &DKElement) -> Self {
        Self::from_parts(&FinMap::identity(e.strands()), e).unwrap()
    }

    /// `f ∘ (c · w)` for an arbitrary chord word.
    pub fn from_word(f: &FinMap, w: &[Chord], c: Rational, cap: usize) -> Result<Self> {
        if let Some(&(_, j)) = w.iter().find(|&&(_, j)| j as usize >= f.source()) {
            return Err(Error::OutOfRange(format!("chord on strand {} of {}", j + 1, f.source())));
        }
        Self::from_parts(f, &DKElement::from_word(f.source(), cap, w, c))
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<(FinMap, ChordWord), Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduce `raw` (normal words under `f`) modulo the strong commutativity
    /// ideal of `f` and add the result.
    fn insert_reduced(&mut self, f: &FinMap, raw: BTreeMap<ChordWord, Rational>) {
        let pairs = merged_pairs(f);
        let mut by_degree: BTreeMap<usize, BTreeMap<ChordWord, Rational>> = BTreeMap::new();
        for (w, c) in raw {
            if w.len() <= self.cap && !c.is_zero() {
                by_degree.entry(w.len()).or_default().insert(w, c);
            }
        }
        for (d, part) in by_degree {
            let part = if pairs.is_empty() || d == 0 { part } else { ideal(f.source(), &pairs, d).reduce(part) };
            for (w, c) in part {
                self.add_term((f.clone(), w), c);
            }
        }
    }

    fn add_term(&mut self, k: (FinMap, ChordWord), c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
        }
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.source != o.source || self.target != o.target {
            return Err(Error::ArityMismatch(format!(
                "{}→{} and {}→{}",
                self.source, self.target, o.source, o.target
            )));
        }
        if self.cap != o.cap {
            return Err(Error::TruncationMismatch(format!("chord caps {} and {}", self.cap, o.cap)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut r = Self::zero(self.source, self.target, self.cap);
        if c.is_zero() {
            return r;
        }
        for (k, x) in &self.terms {
            r.terms.insert(k.clone(), x * c);
        }
        r
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        let mut r = Self::zero(self.source, self.target, cap);
        for (k, c) in &self.terms {
            if k.1.len() <= cap {
                r.terms.insert(k.clone(), c.clone());
            }
        }
        r
    }

    /// Part with exactly `d` chords.
    pub fn degree_part(&self, d: usize) -> Self {
        let mut r = Self::zero(self.source, self.target, self.cap);
        for (k, c) in &self.terms {
            if k.1.len() == d {
                r.terms.insert(k.clone(), c.clone());
            }
        }
        r
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|k| k.1.len()).max().unwrap_or(0)
    }

    /// `self ∘ other`: chords of `self` are pulled back through the map of
    /// `other` (summing over fibers) and multiplied onto its chords.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.target != self.source {
            return Err(Error::ArityMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.source, self.target, other.source, other.target
            )));
        }
        let cap = self.cap.min(other.cap);
        let mut groups: BTreeMap<FinMap, FxHashMap<ChordWord, Rational>> = BTreeMap::new();
        for ((g, v), a) in &self.terms {
            for ((f, w), b) in &other.terms {
                if v.len() + w.len() > cap {
                    continue;
                }
                let gf = g.compose(f)?;
                let pulled = pullback_word(v, f.img(), f.source(), cap);
                if pulled.is_zero() {
                    continue;
                }
                let right = DKElement::from_word(f.source(), cap, w, a * b);
                let prod = pulled.mul(&right);
                let acc = groups.entry(gf).or_default();
                for (u, c) in prod.terms() {
                    *acc.entry(u.clone()).or_default() += c;
                }
            }
        }
        let mut r = Self::zero(other.source, self.target, cap);
        for (f, acc) in groups {
            r.insert_reduced(&f, acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }
        Ok(r)
    }

    /// Index-shifted juxtaposition.
    pub fn tensor(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        let shift = self.source as u8;
        let mut r = Self::zero(self.source + other.source, self.target + other.target, cap);
        let mut groups: BTreeMap<FinMap, BTreeMap<ChordWord, Rational>> = BTreeMap::new();
        for ((f, v), a) in &self.terms {
            for ((g, w), b) in &other.terms {
                if v.len() + w.len() > cap {
                    continue;
                }
                let mut word = v.clone();
                word.extend(w.iter().map(|&(i, j)| (i + shift, j + shift)));
                // chords on disjoint strands commute, but the shifted block may
                // have lower levels than needed; renormalize
                let e = DKElement::from_word(self.source + other.source, cap, &word, a * b);
                let acc = groups.entry(f.tensor(g)).or_default();
                for (u, c) in e.terms() {
                    *acc.entry(u.clone()).or_default() += c;
                }
            }
        }
        for (f, acc) in groups {
            r.insert_reduced(&f, acc);
        }
        r
    }

    /// Re-reduction of every term; a no-op on values built through this API.
    pub fn strong_comm_reduce(&self) -> Self {
        let mut groups: BTreeMap<FinMap, BTreeMap<ChordWord, Rational>> = BTreeMap::new();
        for ((f, w), c) in &self.terms {
            let e = DKElement::from_word(self.source, self.cap, w, c.clone());
            let acc = groups.entry(f.clone()).or_default();
            for (u, x) in e.terms() {
                *acc.entry(u.clone()).or_default() += x;
            }
        }
        let mut r = Self::zero(self.source, self.target, self.cap);
        for (f, acc) in groups {
            r.insert_reduced(&f, acc);
        }
        r
    }

    /// Chordless part, as a combination of maps.
    pub fn classical_part(&self) -> Vec<(FinMap, Rational)> {
        self.terms.iter().filter(|(k, _)| k.1.is_empty()).map(|(k, c)| (k.0.clone(), c.clone())).collect()
    }

    /// Split by chord degree into a series in `h`.
    pub fn to_series(&self, order: usize) -> ICMorphismSeries {
        let base = self.with_cap(order);
        let coeffs = (0..=order).map(|d| base.degree_part(d)).collect();
        HSeries::from_coeffs(coeffs).unwrap()
    }

    /// Sum of the coefficients of a series, each of which must be
    /// homogeneous of matching chord degree.
    pub fn from_series(s: &ICMorphismSeries) -> Result<Self> {
        let mut acc = s.coeff(0).unwrap().with_cap(s.order());
        for k in 1..=s.order() {
            let c = s.coeff(k).unwrap();
            if c.terms.keys().any(|key| key.1.len() != k) {
                return Err(Error::InvalidMorphism(format!("coefficient of h^{k} is not of chord degree {k}")));
            }
            acc = acc.add(&c.with_cap(s.order()))?;
        }
        Ok(acc)
    }
}

/// Series of maps with chords, graded by chord degree.
pub type ICMorphismSeries = HSeries<ICMorphism>;

impl Coeff for ICMorphism {
    fn zero_like(&self) -> Self {
        Self::zero(self.source, self.target, self.cap)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        ICMorphism::add(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        ICMorphism::scale(self, c)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }
    /// Inverse of `c · σ` for a permutation `σ` without chords.
    fn invert(&self) -> Result<Self> {
        if self.terms.len() == 1 {
            let ((f, w), c) = self.terms.iter().next().unwrap();
            if w.is_empty() && f.is_bijection() {
                let mut r = Self::from_map(&f.inverse()?, self.cap);
                r = r.scale(&c.recip().unwrap());
                return Ok(r);
            }
        }
        Err(Error::NotInvertible("only scaled permutations invert in a single degree".into()))
    }
}

impl fmt::Display for ICMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 * map({}->{})[{}]", self.source, self.target, {
                if self.source == 0 {
                    String::new()
                } else {
                    vec!["1"; self.source].join(",")
                }
            });
        }
        let mut items: Vec<(&(FinMap, ChordWord), &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| a.0 .1.len().cmp(&b.0 .1.len()).then(a.0.cmp(b.0)));
        for (n, ((m, w), c)) in items.into_iter().enumerate() {
            let body = if w.is_empty() { m.to_string() } else { format!("{m} * ({})", word_text(w)) };
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if abs.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{abs} {body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ICMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(m: usize, n: usize, img: &[usize]) -> FinMap {
        FinMap::from_one_based(m, n, img).unwrap()
    }

    #[test]
    fn merge_kills_its_own_chord() {
        let t = ICMorphism::from_word(&FinMap::identity(2), &[(0, 1)], Rational::one(), 3).unwrap();
        let mu = ICMorphism::from_map(&FinMap::merge_all(2), 3);
        assert!(mu.compose(&t).unwrap().is_zero());
        let direct = ICMorphism::from_word(&FinMap::merge_all(2), &[(0, 1)], Rational::one(), 3).unwrap();
        assert!(direct.is_zero());
    }

    #[test]
    fn chord_pulls_back_through_merge() {
        let t = ICMorphism::from_word(&FinMap::identity(2), &[(0, 1)], Rational::one(), 2).unwrap();
        let f = ICMorphism::from_map(&map(3, 2, &[1, 1, 2]), 2);
        let c = t.compose(&f).unwrap();
        assert_eq!(c.to_string(), "map(3->2)[1,1,2] * (t13) + map(3->2)[1,1,2] * (t23)");
    }

    #[test]
    fn chord_on_unit_vanishes() {
        let t = ICMorphism::from_word(&FinMap::identity(2), &[(0, 1)], Rational::one(), 2).unwrap();
        let eta = ICMorphism::from_map(&FinMap::unit_at(1, 1), 2);
        assert!(t.compose(&eta).unwrap().is_zero());
    }

    #[test]
    fn identity_is_neutral() {
        let f = ICMorphism::from_word(&map(3, 2, &[1, 2, 1]), &[(1, 2), (0, 1)], Rational::from_int(3), 3).unwrap();
        assert_eq!(ICMorphism::identity(2, 3).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&ICMorphism::identity(3, 3)).unwrap(), f);
        assert_eq!(f.strong_comm_reduce(), f);
    }

    #[test]
    fn permutation_conjugates_chords() {
        // σ ∘ t12 ∘ σ = t12 for the swap, and t13 becomes t23 under (1 2) on three strands
        let s = ICMorphism::from_map(&FinMap::transposition(3, 0), 2);
        let t13 = ICMorphism::from_word(&FinMap::identity(3), &[(0, 2)], Rational::one(), 2).unwrap();
        let c = s.compose(&t13).unwrap().compose(&s).unwrap();
        let t23 = ICMorphism::from_word(&FinMap::identity(3), &[(1, 2)], Rational::one(), 2).unwrap();
        assert_eq!(c, t23);
    }

    #[test]
    fn series_round_trip() {
        let f = ICMorphism::from_word(&map(2, 2, &[1, 2]), &[(0, 1)], Rational::one(), 3)
            .unwrap()
            .add(&ICMorphism::identity(2, 3))
            .unwrap();
        let s = f.to_series(3);
        assert_eq!(ICMorphism::from_series(&s).unwrap(), f);
    }
}
