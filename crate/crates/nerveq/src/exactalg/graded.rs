use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactalg::linalg::RowEchelon;
use crate::exactalg::series::Coeff;
use crate::exactalg::Rational;

/// Multi-index of a basis element of a tensor power.
pub type Idx = SmallVec<[u16; 8]>;

/// Graded vector space with a finite basis; `cap` bounds the total degree
/// of tensor-power basis elements that maps are evaluated on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pub name: String,
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    pub cap: Option<u32>,
}

impl GradedSpace {
    pub fn new(name: &str, labels: Vec<String>, degrees: Vec<u32>, cap: Option<u32>) -> Result<Self> {
        if labels.len() != degrees.len() {
            return Err(Error::ShapeMismatch("labels and degrees differ in length".into()));
        }
        Ok(GradedSpace { name: name.into(), labels, degrees, cap })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn total_degree(&self, idx: &[u16]) -> u32 {
        idx.iter().map(|&i| self.degrees[i as usize]).sum()
    }

    pub fn in_range(&self, idx: &[u16]) -> bool {
        match self.cap {
            Some(c) => self.total_degree(idx) <= c,
            None => true,
        }
    }

    /// Basis of the `k`-th tensor power restricted to the degree window.
    pub fn power_basis(&self, k: usize) -> Vec<Idx> {
        let mut out = Vec::new();
        let mut cur: Idx = SmallVec::new();
        self.enumerate(k, 0, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, k: usize, deg: u32, cur: &mut Idx, out: &mut Vec<Idx>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..self.dim() {
            let d = deg + self.degrees[i];
            if let Some(c) = self.cap {
                if d > c {
                    continue;
                }
            }
            cur.push(i as u16);
            self.enumerate(k, d, cur, out);
            cur.pop();
        }
    }

    pub fn idx_label(&self, idx: &[u16]) -> String {
        if idx.is_empty() {
            return "1".into();
        }
        idx.iter().map(|&i| self.labels[i as usize].as_str()).collect::<Vec<_>>().join("⊗")
    }
}

/// Sparse vector in a tensor power, keyed by multi-index.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Vector {
    terms: FxHashMap<Idx, Rational>,
}

impl Vector {
    pub fn new() -> Self {
        Vector { terms: FxHashMap::default() }
    }

    pub fn basis(idx: Idx) -> Self {
        let mut v = Vector::new();
        v.terms.insert(idx, Rational::one());
        v
    }

    pub fn unit_scalar(c: Rational) -> Self {
        let mut v = Vector::new();
        v.add_term(Idx::new(), c);
        v
    }

    pub fn add_term(&mut self, idx: Idx, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(idx) {
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

    pub fn add_scaled(&mut self, other: &Vector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Vector {
        if c.is_zero() {
            return Vector::new();
        }
        Vector { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, idx: &[u16]) -> Rational {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Idx, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> FxHashMap<Idx, Rational> {
        self.terms
    }

    pub fn sorted(&self) -> Vec<(Idx, Rational)> {
        let mut v: Vec<(Idx, Rational)> = self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Tensor product of two vectors.
    pub fn tensor(&self, other: &Vector) -> Vector {
        let mut out = Vector::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut k = a.clone();
                k.extend_from_slice(b);
                out.add_term(k, x * y);
            }
        }
        out
    }

    pub fn to_btree(&self) -> BTreeMap<Idx, Rational> {
        self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect()
    }
}

impl FromIterator<(Idx, Rational)> for Vector {
    fn from_iter<I: IntoIterator<Item = (Idx, Rational)>>(iter: I) -> Self {
        let mut v = Vector::new();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.sorted().iter().map(|(k, c)| format!("{c}·{k:?}")).collect();
        write!(f, "{}", if s.is_empty() { "0".to_string() } else { s.join(" + ") })
    }
}

/// Linear map `H^{⊗src} → H^{⊗tgt}` stored as sparse columns over the
/// degree-windowed basis of the source.
#[derive(Clone)]
pub struct GradedMap {
    space: Arc<GradedSpace>,
    src: usize,
    tgt: usize,
    cols: FxHashMap<Idx, Vector>,
}

impl PartialEq for GradedMap {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.tgt == other.tgt && *self.space == *other.space && self.cols == other.cols
    }
}

impl GradedMap {
    pub fn zero(space: Arc<GradedSpace>, src: usize, tgt: usize) -> Self {
        GradedMap { space, src, tgt, cols: FxHashMap::default() }
    }

    pub fn identity(space: Arc<GradedSpace>, k: usize) -> Self {
        let mut m = Self::zero(space.clone(), k, k);
        for b in space.power_basis(k) {
            m.cols.insert(b.clone(), Vector::basis(b));
        }
        m
    }

    /// Build a map by evaluating `f` on every source basis element.
    pub fn from_fn(space: Arc<GradedSpace>, src: usize, tgt: usize, f: impl Fn(&Idx) -> Vector) -> Self {
        let mut m = Self::zero(space.clone(), src, tgt);
        for b in space.power_basis(src) {
            let v = f(&b);
            m.set_col(b, v);
        }
        m
    }

    /// Parallel variant of [`GradedMap::from_fn`].
    pub fn from_fn_par(
        space: Arc<GradedSpace>,
        src: usize,
        tgt: usize,
        f: impl Fn(&Idx) -> Vector + Sync,
    ) -> Self {
        use rayon::prelude::*;
        let basis = space.power_basis(src);
        let cols: Vec<(Idx, Vector)> = basis.into_par_iter().map(|b| {
            let v = f(&b);
            (b, v)
        }).collect();
        let mut m = Self::zero(space, src, tgt);
        for (b, v) in cols {
            m.set_col(b, v);
        }
        m
    }

    pub fn from_columns(space: Arc<GradedSpace>, src: usize, tgt: usize, cols: impl IntoIterator<Item = (Idx, Vector)>) -> Result<Self> {
        let mut m = Self::zero(space, src, tgt);
        for (b, v) in cols {
            if b.len() != src || v.iter().any(|(k, _)| k.len() != tgt) {
                return Err(Error::ShapeMismatch("column arity does not match the map".into()));
            }
            if b.iter().chain(v.iter().flat_map(|(k, _)| k.iter())).any(|&i| i as usize >= m.space.dim()) {
                return Err(Error::OutOfRange("basis index exceeds the space dimension".into()));
            }
            m.set_col(b, v);
        }
        Ok(m)
    }

    pub fn set_col(&mut self, b: Idx, v: Vector) {
        if v.is_zero() {
            self.cols.remove(&b);
        } else {
            self.cols.insert(b, v);
        }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn source_power(&self) -> usize {
        self.src
    }

    pub fn target_power(&self) -> usize {
        self.tgt
    }

    pub fn col(&self, b: &[u16]) -> Option<&Vector> {
        self.cols.get(b)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Idx, &Vector)> {
        self.cols.iter()
    }

    pub fn nnz(&self) -> usize {
        self.cols.values().map(|v| v.len()).sum()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (k, c) in v.iter() {
            if let Some(col) = self.cols.get(k) {
                out.add_scaled(col, c);
            }
        }
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::ShapeMismatch(format!(
                "maps {}→{} and {}→{}",
                self.src, self.tgt, other.src, other.tgt
            )));
        }
        if *self.space != *other.space {
            return Err(Error::ShapeMismatch("maps live on different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, v) in &other.cols {
            let mut col = out.cols.remove(b).unwrap_or_default();
            col.add_scaled(v, &Rational::one());
            out.set_col(b.clone(), col);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.space.clone(), self.src, self.tgt);
        if c.is_zero() {
            return out;
        }
        for (b, v) in &self.cols {
            out.cols.insert(b.clone(), v.scale(c));
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.tgt != self.src {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.src, self.tgt, other.src, other.tgt
            )));
        }
        if *self.space != *other.space {
            return Err(Error::ShapeMismatch("maps live on different spaces".into()));
        }
        let mut out = Self::zero(self.space.clone(), other.src, self.tgt);
        for (b, v) in &other.cols {
            out.set_col(b.clone(), self.apply(v));
        }
        Ok(out)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if *self.space != *other.space {
            return Err(Error::ShapeMismatch("maps live on different spaces".into()));
        }
        let src = self.src + other.src;
        let tgt = self.tgt + other.tgt;
        let mut out = Self::zero(self.space.clone(), src, tgt);
        for b in self.space.power_basis(src) {
            let (x, y) = b.split_at(self.src);
            let (Some(cx), Some(cy)) = (self.cols.get(x), other.cols.get(y)) else {
                continue;
            };
            let mut v = Vector::new();
            for (kx, a) in cx.iter() {
                for (ky, c) in cy.iter() {
                    let mut k = kx.clone();
                    k.extend_from_slice(ky);
                    if self.space.in_range(&k) {
                        v.add_term(k, a * c);
                    }
                }
            }
            out.set_col(b, v);
        }
        Ok(out)
    }

    /// Permutation of tensor factors: output slot `i` receives input slot
    /// `perm[i]`.
    pub fn permutation(space: Arc<GradedSpace>, perm: &[usize]) -> Self {
        let k = perm.len();
        Self::from_fn(space, k, k, |b| {
            let out: Idx = perm.iter().map(|&p| b[p]).collect();
            Vector::basis(out)
        })
    }

    /// Inverse of a square map on the degree window, by sparse elimination.
    pub fn invert(&self) -> Result<Self> {
        if self.src != self.tgt {
            return Err(Error::NotInvertible("map is not square".into()));
        }
        let basis = self.space.power_basis(self.src);
        if self.cols.len() == basis.len() && self.cols.iter().all(|(b, v)| v.len() == 1 && v.get(b).is_one()) {
            return Ok(self.clone());
        }
        // rows of [M | I] indexed by source basis, pivot on target keys
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
        enum Key {
            Tgt(Idx),
            Src(Idx),
        }
        let mut ech: RowEchelon<Key> = RowEchelon::new();
        for b in &basis {
            let mut row: BTreeMap<Key, Rational> = BTreeMap::new();
            if let Some(col) = self.cols.get(b) {
                for (k, c) in col.iter() {
                    row.insert(Key::Src(k.clone()), c.clone());
                }
            }
            row.insert(Key::Tgt(b.clone()), Rational::one());
            ech.insert(row);
        }
        // The augmented system has rows (M e_b, e_b); a row with only a Tgt
        // part after full reduction expresses e_t = Σ c_b M e_b.
        let mut out = Self::zero(self.space.clone(), self.src, self.src);
        for t in &basis {
            let red = ech.reduce(BTreeMap::from([(Key::Src(t.clone()), Rational::one())]));
            if red.keys().any(|k| matches!(k, Key::Src(_))) {
                return Err(Error::NotInvertible("map is singular on the degree window".into()));
            }
            let v: Vector = red
                .into_iter()
                .filter_map(|(k, c)| match k {
                    Key::Tgt(b) => Some((b, -c)),
                    Key::Src(_) => None,
                })
                .collect();
            out.set_col(t.clone(), v);
        }
        Ok(out)
    }

    /// Range `[min, max]` of `deg(target) - deg(source)` over nonzero entries.
    pub fn shift_window(&self) -> Option<(i64, i64)> {
        let mut w: Option<(i64, i64)> = None;
        for (b, v) in &self.cols {
            let db = self.space.total_degree(b) as i64;
            for (k, _) in v.iter() {
                let s = self.space.total_degree(k) as i64 - db;
                w = Some(match w {
                    Some((lo, hi)) => (lo.min(s), hi.max(s)),
                    None => (s, s),
                });
            }
        }
        w
    }

    /// Columns grouped by total source degree.
    pub fn blocks(&self) -> BTreeMap<u32, Vec<(Idx, Vector)>> {
        let mut out: BTreeMap<u32, Vec<(Idx, Vector)>> = BTreeMap::new();
        for (b, v) in &self.cols {
            out.entry(self.space.total_degree(b)).or_default().push((b.clone(), v.clone()));
        }
        for blk in out.values_mut() {
            blk.sort_by(|a, b| a.0.cmp(&b.0));
        }
        out
    }

    /// Sorted `(source, target, coefficient)` triplets.
    pub fn triplets(&self) -> Vec<(Idx, Idx, Rational)> {
        let mut out = Vec::new();
        for (b, v) in &self.cols {
            for (k, c) in v.iter() {
                out.push((b.clone(), k.clone(), c.clone()));
            }
        }
        out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.is_empty()
    }

    /// First source basis element where `self` and `other` disagree.
    pub fn first_difference(&self, other: &Self) -> Option<Idx> {
        let mut keys: Vec<&Idx> = self.cols.keys().chain(other.cols.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find(|k| self.cols.get(*k) != other.cols.get(*k)).cloned()
    }
}

impl Coeff for GradedMap {
    fn zero_like(&self) -> Self {
        GradedMap::zero(self.space.clone(), self.src, self.tgt)
    }
    fn is_zero(&self) -> bool {
        GradedMap::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        GradedMap::add(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        GradedMap::scale(self, c)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }
    fn invert(&self) -> Result<Self> {
        GradedMap::invert(self)
    }
}

impl fmt::Display for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map {}^{} -> {}^{}", self.space.name, self.src, self.space.name, self.tgt)?;
        for (b, k, c) in self.triplets() {
            writeln!(f, "  {} -> {} : {}", self.space.idx_label(&b), self.space.idx_label(&k), c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form of a map: sparse triplets over basis indices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GradedMapJson {
    pub schema: String,
    pub space: GradedSpace,
    pub source_power: usize,
    pub target_power: usize,
    pub entries: Vec<(Vec<u16>, Vec<u16>, Rational)>,
}

pub const GRADED_MAP_SCHEMA: &str = "nerveq.graded_map/1";

impl GradedMap {
    pub fn to_json(&self) -> GradedMapJson {
        GradedMapJson {
            schema: GRADED_MAP_SCHEMA.into(),
            space: (*self.space).clone(),
            source_power: self.src,
            target_power: self.tgt,
            entries: self.triplets().into_iter().map(|(a, b, c)| (a.to_vec(), b.to_vec(), c)).collect(),
        }
    }

    pub fn from_json(j: &GradedMapJson) -> Result<Self> {
        if j.schema != GRADED_MAP_SCHEMA {
            return Err(Error::Parse(format!("unexpected schema `{}`", j.schema)));
        }
        let space = Arc::new(j.space.clone());
        let mut cols: BTreeMap<Idx, Vector> = BTreeMap::new();
        for (a, b, c) in &j.entries {
            cols.entry(Idx::from_slice(a)).or_default().add_term(Idx::from_slice(b), c.clone());
        }
        GradedMap::from_columns(space, j.source_power, j.target_power, cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Arc<GradedSpace> {
        Arc::new(GradedSpace::new("V", vec!["1".into(), "x".into(), "y".into()], vec![0, 1, 1], Some(2)).unwrap())
    }

    fn idx(v: &[u16]) -> Idx {
        Idx::from_slice(v)
    }

    #[test]
    fn power_basis_respects_cap() {
        let s = space();
        assert_eq!(s.power_basis(0).len(), 1);
        assert_eq!(s.power_basis(1).len(), 3);
        // pairs with at most two degree-one factors: all 9
        assert_eq!(s.power_basis(2).len(), 9);
        // triples with total degree ≤ 2: 1 + 6 + 12
        assert_eq!(s.power_basis(3).len(), 19);
    }

    #[test]
    fn swap_squares_to_identity_and_inverts() {
        let s = space();
        let sw = GradedMap::permutation(s.clone(), &[1, 0]);
        let id = GradedMap::identity(s.clone(), 2);
        assert_eq!(sw.compose(&sw).unwrap(), id);
        assert_eq!(sw.invert().unwrap(), sw);
    }

    #[test]
    fn invert_unipotent() {
        let s = space();
        let mut m = GradedMap::identity(s.clone(), 1);
        let mut c = Vector::basis(idx(&[1]));
        c.add_term(idx(&[2]), Rational::new(3, 2));
        m.set_col(idx(&[1]), c);
        let inv = m.invert().unwrap();
        assert_eq!(inv.compose(&m).unwrap(), GradedMap::identity(s.clone(), 1));
        assert_eq!(m.compose(&inv).unwrap(), GradedMap::identity(s, 1));
    }

    #[test]
    fn singular_map_is_rejected() {
        let s = space();
        let z = GradedMap::zero(s, 1, 1);
        assert!(matches!(z.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn shape_errors() {
        let s = space();
        let a = GradedMap::identity(s.clone(), 1);
        let b = GradedMap::identity(s, 2);
        assert!(matches!(a.compose(&b), Err(Error::ShapeMismatch(_))));
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = space();
        let m = GradedMap::permutation(s, &[1, 0]).scale(&Rational::new(-2, 3));
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = GradedMap::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
