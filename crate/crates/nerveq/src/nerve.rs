//! Nerves of Hopf algebras: the commutative nerve on maps of finite sets,
//! the braided nerve `κ ∘ F(φ) ∘ ι`, the infinitesimal nerve on maps with
//! chords, and recovery of the Hopf operations from a nerve.
//!
//! `N(•ⁿ)` is realized strictly as `H^{⊗(n-1)}`, with `N(•⁰) = N(•¹) = 1`.

use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::associator::AssocSeries;
use crate::chords::dk::Chord;
use crate::chords::ICMorphism;
use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, GradedSpace, HSeries, Idx, Rational, Vector};
use crate::hopf_backend::engine::Program;
use crate::hopf_backend::{AxiomCheck, FiniteGroup, HopfAlgebra};
use crate::props::pa::Tree;
use crate::props::{BraidWord, BrMorphism, FinMap};
use crate::transport::{u_phi_from, u_phi_morphism};

/// Tensor power carrying `N(•ⁿ)`.
pub fn slots(n: usize) -> usize {
    n.saturating_sub(1)
}

struct Piece {
    gap: usize,
    antipode: bool,
}

/// What happens to one input factor: an optional antipode, an iterated
/// coproduct with one piece per entry of `pieces`, and the gap each piece
/// is multiplied into.
struct Route {
    antipode: bool,
    pieces: Vec<Piece>,
}

fn routed(h: &HopfAlgebra, routes: &[Route], gaps: usize) -> Result<Program> {
    let mut p = Program::identity(routes.len());
    let mut pos = 0;
    let mut labels = Vec::new();
    for r in routes {
        if r.antipode {
            p = p.block(pos, h.antipode())?;
        }
        let k = r.pieces.len();
        if k != 1 {
            p = p.block(pos, h.iterated_coproduct(k))?;
        }
        for (i, pc) in r.pieces.iter().enumerate() {
            if pc.antipode {
                p = p.block(pos + i, h.antipode())?;
            }
            labels.push(pc.gap);
        }
        pos += k;
    }
    let fibers = (0..gaps)
        .map(|g| labels.iter().enumerate().filter(|(_, &l)| l == g).map(|(i, _)| i).collect())
        .collect();
    p.products(fibers, h.m(), h.unit_vector())
}

fn plain(gaps: std::ops::Range<usize>) -> Vec<Piece> {
    gaps.map(|gap| Piece { gap, antipode: false }).collect()
}

/// Program of the commutative nerve of `f`.
pub fn nerve_com_program(h: &HopfAlgebra, f: &FinMap) -> Result<Program> {
    if !h.flags().commutative {
        return Err(Error::InvalidPresentation(format!("{} is not commutative", h.name())));
    }
    let routes: Vec<Route> = (0..slots(f.source()))
        .map(|i| {
            let (a, b) = (f.apply(i), f.apply(i + 1));
            Route { antipode: a > b, pieces: plain(a.min(b)..a.max(b)) }
        })
        .collect();
    routed(h, &routes, slots(f.target()))
}

/// `N(f): H^{⊗(m-1)} → H^{⊗(n-1)}` for a commutative `H`: per interval of
/// the source, an antipode if `f` reverses it, the iterated coproduct over
/// the target intervals it covers, then products per target interval.
pub fn nerve_com(h: &HopfAlgebra, f: &FinMap) -> Result<GradedMap> {
    Ok(nerve_com_program(h, f)?.to_map(h.space()))
}

/// `ι_n: H^{⊗(n-1)} → H^{⊗n}`,
/// `h₁ ⊗ … ⊗ h_{n-1} ↦ S(h₁₁) ⊗ h₁₂ S(h₂₁) ⊗ … ⊗ h_{n-1,2}`.
pub fn iota_program(h: &HopfAlgebra, n: usize) -> Result<Program> {
    match n {
        0 => Ok(Program::identity(0)),
        1 => Program::identity(0).products(vec![vec![]], h.m(), h.unit_vector()),
        _ => {
            let routes: Vec<Route> = (0..n - 1)
                .map(|i| Route {
                    antipode: false,
                    pieces: vec![Piece { gap: i, antipode: true }, Piece { gap: i + 1, antipode: false }],
                })
                .collect();
            routed(h, &routes, n)
        }
    }
}

/// `κ_n: H^{⊗n} → H^{⊗(n-1)}`: `ε` on the first factor, and factor `k`
/// split by `Δ^(k-1)` over the slots `1 .. k-1`.
pub fn kappa_program(h: &HopfAlgebra, n: usize) -> Result<Program> {
    if n == 0 {
        return Ok(Program::identity(0));
    }
    let routes: Vec<Route> = (0..n).map(|k| Route { antipode: false, pieces: plain(0..k) }).collect();
    routed(h, &routes, n - 1)
}

pub fn iota(h: &HopfAlgebra, n: usize) -> Result<GradedMap> {
    Ok(iota_program(h, n)?.to_map(h.space()))
}

pub fn kappa(h: &HopfAlgebra, n: usize) -> Result<GradedMap> {
    Ok(kappa_program(h, n)?.to_map(h.space()))
}

fn attach_products(h: &HopfAlgebra, p: Program, fibers: Vec<Vec<usize>>) -> Result<Program> {
    p.products(fibers, h.m(), h.unit_vector())
}

/// `F(φ): H^{⊗m} → H^{⊗n}` with crossings as the Yetter–Drinfeld braiding.
pub fn braided_program(h: &HopfAlgebra, phi: &BrMorphism) -> Result<Program> {
    let mut p = Program::identity(phi.source());
    for l in phi.braid().applied() {
        let k = l.unsigned_abs() as usize - 1;
        let b = if l > 0 { h.yd_braiding()? } else { h.yd_braiding_inverse()? };
        p = p.block(k, b)?;
    }
    let fibers = (0..phi.target())
        .map(|j| phi.attach().iter().enumerate().filter(|(_, &a)| a == j).map(|(i, _)| i).collect())
        .collect();
    attach_products(h, p, fibers)
}

/// `F(f): H^{⊗m} → H^{⊗n}` through the symmetry of the ambient category.
pub fn symmetric_program(h: &HopfAlgebra, f: &FinMap) -> Result<Program> {
    attach_products(h, Program::identity(f.source()), f.fibers())
}

pub fn nerve_br_program(h: &HopfAlgebra, phi: &BrMorphism) -> Result<Program> {
    iota_program(h, phi.source())?.then(&braided_program(h, phi)?)?.then(&kappa_program(h, phi.target())?)
}

/// Braided nerve `κ_n ∘ F(φ) ∘ ι_m`.
pub fn nerve_br(h: &HopfAlgebra, phi: &BrMorphism) -> Result<GradedMap> {
    Ok(nerve_br_program(h, phi)?.to_map(h.space()))
}

fn apply_pair(map: &GradedMap, v: &Vector, i: usize, j: usize) -> Vector {
    let mut out = Vector::new();
    for (idx, c) in v.iter() {
        let Some(col) = map.col(&[idx[i], idx[j]]) else {
            continue;
        };
        for (k, d) in col.iter() {
            let mut n = idx.clone();
            n[i] = k[0];
            n[j] = k[1];
            out.add_term(n, c * d);
        }
    }
    out
}

/// `N_h(φ) = κ ∘ F(φ) ∘ τ_w ∘ ι` for a map with chords, each chord `t_ij`
/// acting as `h τ` on factors `i, j`; applied lazily to vectors.
pub struct IcomNerve<'a> {
    h: &'a HopfAlgebra,
    order: usize,
    source: usize,
    target: usize,
    iota: Program,
    tau: Option<Arc<GradedMap>>,
    groups: Vec<(Program, Vec<(Vec<Chord>, Rational)>)>,
}

impl<'a> IcomNerve<'a> {
    pub fn new(h: &'a HopfAlgebra, phi: &ICMorphism, order: usize) -> Result<Self> {
        let kap = kappa_program(h, phi.target())?;
        let mut by_map: Vec<(FinMap, Vec<(Vec<Chord>, Rational)>)> = Vec::new();
        let mut chords = false;
        for ((f, w), c) in phi.terms() {
            if w.len() > order {
                continue;
            }
            chords |= !w.is_empty();
            match by_map.last_mut() {
                Some((g, v)) if g == f => v.push((w.clone(), c.clone())),
                _ => by_map.push((f.clone(), vec![(w.clone(), c.clone())])),
            }
        }
        let tau = if chords { Some(h.tau()?) } else { None };
        let groups = by_map
            .into_iter()
            .map(|(f, terms)| Ok((symmetric_program(h, &f)?.then(&kap)?, terms)))
            .collect::<Result<_>>()?;
        Ok(IcomNerve { h, order, source: phi.source(), target: phi.target(), iota: iota_program(h, phi.source())?, tau, groups })
    }

    fn tau_word<'s>(&'s self, w: &'s [Chord], v0: &Vector, memo: &mut FxHashMap<&'s [Chord], Vector>) -> Vector {
        if w.is_empty() {
            return v0.clone();
        }
        if let Some(x) = memo.get(w) {
            return x.clone();
        }
        let inner = self.tau_word(&w[1..], v0, memo);
        let tau = self.tau.as_ref().expect("chords need τ");
        let out = apply_pair(tau, &inner, w[0].0 as usize, w[0].1 as usize);
        memo.insert(w, out.clone());
        out
    }

    /// Coefficients of `h^0 .. h^order` applied to `v`.
    pub fn apply(&self, v: &Vector) -> Vec<Vector> {
        let mut out = vec![Vector::new(); self.order + 1];
        let v0 = self.iota.apply(v);
        if v0.is_zero() {
            return out;
        }
        let mut memo = FxHashMap::default();
        for (post, terms) in &self.groups {
            let mut acc = vec![Vector::new(); self.order + 1];
            for (w, c) in terms {
                let tw = self.tau_word(w, &v0, &mut memo);
                acc[w.len()].add_scaled(&tw, c);
            }
            for (d, a) in acc.iter().enumerate() {
                if !a.is_zero() {
                    out[d].add_scaled(&post.apply(a), &Rational::one());
                }
            }
        }
        out
    }

    pub fn tabulate(&self) -> Result<HSeries<GradedMap>> {
        let space = self.h.space();
        let basis = space.power_basis(slots(self.source));
        let cols: Vec<(Idx, Vec<Vector>)> = basis.into_par_iter().map(|b| {
            let v = self.apply(&Vector::basis(b.clone()));
            (b, v)
        }).collect();
        self.assemble(space, cols)
    }

    fn assemble(&self, space: &Arc<GradedSpace>, cols: Vec<(Idx, Vec<Vector>)>) -> Result<HSeries<GradedMap>> {
        let (s, t) = (cols.first().map_or(slots(self.source), |c| c.0.len()), slots(self.target));
        let mut maps = vec![GradedMap::zero(space.clone(), s, t); self.order + 1];
        for (b, vs) in cols {
            for (d, v) in vs.into_iter().enumerate() {
                maps[d].set_col(b.clone(), v);
            }
        }
        HSeries::from_coeffs(maps)
    }

    /// `self ∘ b` without tabulating `self`.
    pub fn after(&self, b: &HSeries<GradedMap>) -> Result<HSeries<GradedMap>> {
        if b.order() != self.order {
            return Err(Error::TruncationMismatch(format!("orders {} and {}", b.order(), self.order)));
        }
        let src = b.coeffs()[0].source_power();
        if b.coeffs()[0].target_power() != slots(self.source) {
            return Err(Error::ArityMismatch("series does not land in the source of the nerve".into()));
        }
        let space = self.h.space();
        let basis = space.power_basis(src);
        let cols: Vec<(Idx, Vec<Vector>)> = basis.into_par_iter().map(|e| {
            let mut out = vec![Vector::new(); self.order + 1];
            for (j, bj) in b.coeffs().iter().enumerate() {
                let Some(col) = bj.col(&e) else { continue };
                for (i, v) in self.apply(col).into_iter().enumerate() {
                    if i + j <= self.order {
                        out[i + j].add_scaled(&v, &Rational::one());
                    }
                }
            }
            (e, out)
        }).collect();
        let mut maps = vec![GradedMap::zero(space.clone(), src, slots(self.target)); self.order + 1];
        for (e, vs) in cols {
            for (d, v) in vs.into_iter().enumerate() {
                maps[d].set_col(e.clone(), v);
            }
        }
        HSeries::from_coeffs(maps)
    }
}

/// Infinitesimal nerve of a map with chords as an `h`-series of maps.
pub fn nerve_icom(h: &HopfAlgebra, phi: &ICMorphism, order: usize) -> Result<HSeries<GradedMap>> {
    IcomNerve::new(h, phi, order)?.tabulate()
}

/// The evaluation modes of a nerve.
#[derive(Clone, Debug)]
pub enum NerveMode {
    /// Commutative nerve on underlying maps of finite sets.
    Symmetric,
    /// Braided nerve through the Yetter–Drinfeld braiding.
    Braided,
    /// Nerve of maps with chords, truncated at the given order.
    Infinitesimal { order: usize },
    /// Infinitesimal nerve composed with the associator transport.
    Quantized { phi: AssocSeries, order: usize },
}

type Series = HSeries<GradedMap>;

/// A nerve functor on a fixed backend, with memoized values.
pub struct NerveEvaluator {
    h: Arc<HopfAlgebra>,
    mode: NerveMode,
    cache: Mutex<FxHashMap<String, Arc<Series>>>,
}

/// Hopf operations read off from a nerve.
#[derive(Clone, Debug)]
pub struct HopfOps {
    pub m: Series,
    pub delta: Series,
    pub eps: Series,
    pub s: Series,
    pub eta: Series,
}

impl HopfOps {
    /// The backend's own operations as constant series.
    pub fn classical(h: &HopfAlgebra, order: usize) -> Self {
        let c = |m: Arc<GradedMap>| HSeries::constant((*m).clone(), order);
        HopfOps { m: c(h.m()), delta: c(h.delta()), eps: c(h.eps()), s: c(h.antipode()), eta: c(h.eta()) }
    }

    pub fn named(&self) -> [(&'static str, &Series); 5] {
        [("m", &self.m), ("Δ", &self.delta), ("ε", &self.eps), ("S", &self.s), ("η", &self.eta)]
    }
}

/// The five structure diagrams: product on `•⁴ → •²` (after inserting a
/// unit), coproduct, counit, antipode and unit.
pub fn structure_diagrams() -> [(&'static str, BrMorphism); 5] {
    let br = |n: usize, l: Vec<i32>, t: usize, a: Vec<usize>| BrMorphism::new(BraidWord::new(n, l).unwrap(), t, a).unwrap();
    [
        ("m", br(4, vec![2], 2, vec![0, 0, 1, 1])),
        ("Δ", br(2, vec![], 3, vec![0, 2])),
        ("ε", br(2, vec![], 1, vec![0, 0])),
        ("S", br(2, vec![1], 2, vec![0, 1])),
        ("η", br(0, vec![], 2, vec![])),
    ]
}

/// The braided morphism `•^{2(n-1)} → •ⁿ` merging consecutive pairs.
pub fn segal_merge(n: usize) -> BrMorphism {
    let mut img = vec![0];
    for j in 1..n - 1 {
        img.push(j);
        img.push(j);
    }
    img.push(n - 1);
    BrMorphism::from_monotone(&FinMap::new(2 * (n - 1), n, img).unwrap()).unwrap()
}

impl NerveEvaluator {
    pub fn new(h: Arc<HopfAlgebra>, mode: NerveMode) -> Result<Self> {
        match &mode {
            NerveMode::Symmetric if !h.flags().commutative => {
                return Err(Error::InvalidPresentation(format!("{} is not commutative", h.name())));
            }
            NerveMode::Braided if !h.flags().antipode_invertible => {
                return Err(Error::NotInvertible(format!("antipode of {}", h.name())));
            }
            NerveMode::Infinitesimal { .. } | NerveMode::Quantized { .. } if h.bracket().is_none() => {
                return Err(Error::InvalidPresentation(format!("{} has no Poisson bracket", h.name())));
            }
            NerveMode::Quantized { phi, order } if phi.cap() < *order => {
                return Err(Error::TruncationMismatch(format!(
                    "associator known to degree {} but order {order} requested",
                    phi.cap()
                )));
            }
            _ => {}
        }
        Ok(NerveEvaluator { h, mode, cache: Mutex::new(FxHashMap::default()) })
    }

    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.h
    }

    pub fn mode(&self) -> &NerveMode {
        &self.mode
    }

    pub fn order(&self) -> usize {
        match &self.mode {
            NerveMode::Infinitesimal { order } | NerveMode::Quantized { order, .. } => *order,
            _ => 0,
        }
    }

    fn constant(&self, m: GradedMap) -> Series {
        HSeries::constant(m, self.order())
    }

    fn identity(&self, k: usize) -> Series {
        self.constant(GradedMap::identity(self.h.space().clone(), k))
    }

    fn cached(&self, key: String, f: impl FnOnce() -> Result<Series>) -> Result<Arc<Series>> {
        if let Some(x) = self.cache.lock().unwrap().get(&key) {
            return Ok(x.clone());
        }
        let v = Arc::new(f()?);
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn transported(&self, start: Option<Tree>, phi: &BrMorphism) -> Result<ICMorphism> {
        match &self.mode {
            NerveMode::Quantized { phi: assoc, order } => u_phi_from(start, phi, assoc, *order),
            _ => Err(Error::InvalidMorphism("braided morphisms need an associator in this mode".into())),
        }
    }

    /// `N(φ)` on a braided morphism with left-nested ends.
    pub fn eval_br(&self, phi: &BrMorphism) -> Result<Arc<Series>> {
        self.cached(format!("br:{phi}"), || match &self.mode {
            NerveMode::Symmetric => Ok(self.constant(nerve_com(&self.h, &phi.underlying())?)),
            NerveMode::Braided => Ok(self.constant(nerve_br(&self.h, phi)?)),
            NerveMode::Infinitesimal { .. } => Err(Error::InvalidMorphism("braided morphisms need an associator".into())),
            NerveMode::Quantized { phi: assoc, order } => nerve_icom(&self.h, &u_phi_morphism(phi, assoc, *order)?, *order),
        })
    }

    /// `N(φ) ∘ b`, computed column by column in the quantized mode.
    pub fn eval_br_after(&self, phi: &BrMorphism, b: &Series) -> Result<Series> {
        match &self.mode {
            NerveMode::Quantized { phi: assoc, order } => {
                IcomNerve::new(&self.h, &u_phi_morphism(phi, assoc, *order)?, *order)?.after(b)
            }
            _ => self.eval_br(phi)?.mul(b),
        }
    }

    /// `N(φ)` on a map with chords.
    pub fn eval_icom(&self, phi: &ICMorphism) -> Result<Arc<Series>> {
        match &self.mode {
            NerveMode::Infinitesimal { order } | NerveMode::Quantized { order, .. } => {
                self.cached(format!("icom:{phi}"), || nerve_icom(&self.h, phi, *order))
            }
            _ => {
                let cl = phi.classical_part();
                if phi.terms().keys().any(|(_, w)| !w.is_empty()) {
                    return Err(Error::InvalidMorphism("chords need the infinitesimal nerve".into()));
                }
                let mut acc: Option<GradedMap> = None;
                for (f, c) in cl {
                    let m = match &self.mode {
                        NerveMode::Symmetric => nerve_com(&self.h, &f)?,
                        _ => symmetric_nerve_via_braid(&self.h, &f)?,
                    }
                    .scale(&c);
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a.add(&m)?,
                    });
                }
                let m = acc.unwrap_or_else(|| {
                    GradedMap::zero(self.h.space().clone(), slots(phi.source()), slots(phi.target()))
                });
                Ok(Arc::new(self.constant(m)))
            }
        }
    }

    /// Lax structure `N(•^m) ⊗ N(•^n) → N(•^{m+n})`.
    pub fn coherence(&self, m: usize, n: usize) -> Result<Series> {
        let space = self.h.space().clone();
        if m == 0 || n == 0 {
            return Ok(self.identity(slots(m) + slots(n)));
        }
        let (a, b) = (slots(m), slots(n));
        let mut fibers: Vec<Vec<usize>> = (0..a).map(|i| vec![i]).collect();
        fibers.push(vec![]);
        fibers.extend((a..a + b).map(|i| vec![i]));
        let insert = Program::identity(a + b).products(fibers, self.h.m(), self.h.unit_vector())?.to_map(&space);
        let classical = self.constant(insert);
        if !matches!(self.mode, NerveMode::Quantized { .. }) {
            return Ok(classical);
        }
        let start = Tree::node(Tree::left_nested(m).unwrap(), Tree::left_nested(n).unwrap());
        let re = self.transported(Some(start), &BrMorphism::identity(m + n))?;
        IcomNerve::new(&self.h, &re, self.order())?.after(&classical)
    }

    /// `N(••)^{⊗(n-1)} → N(•ⁿ)`: iterated lax structure, then the merge of
    /// consecutive pairs.
    pub fn nerve_condition_map(&self, n: usize) -> Result<Series> {
        if n <= 2 {
            return Ok(self.identity(slots(n)));
        }
        let mut acc = self.identity(1);
        for k in 2..n {
            let id1 = self.identity(1);
            let grown = series_tensor(&acc, &id1)?;
            acc = self.coherence(2 * (k - 1), 2)?.mul(&grown)?;
        }
        self.eval_br_after(&segal_merge(n), &acc)
    }

    pub fn nerve_condition_inverse(&self, n: usize) -> Result<Series> {
        self.nerve_condition_map(n)?.invert()
    }

    /// Product, coproduct, counit, antipode and unit of the Hopf algebra
    /// corresponding to this nerve.
    pub fn extract_hopf(&self) -> Result<HopfOps> {
        let [m, d, e, s, u] = structure_diagrams();
        let m = self.eval_br_after(&m.1, &self.coherence(2, 2)?)?;
        let delta = self.nerve_condition_inverse(3)?.mul(&*self.eval_br(&d.1)?)?;
        let eps = (*self.eval_br(&e.1)?).clone();
        let s = (*self.eval_br(&s.1)?).clone();
        let eta = (*self.eval_br(&u.1)?).clone();
        Ok(HopfOps { m, delta, eps, s, eta })
    }
}

/// Nerve of a map of finite sets through `κ ∘ F ∘ ι` with the symmetry.
pub fn symmetric_nerve_via_braid(h: &HopfAlgebra, f: &FinMap) -> Result<GradedMap> {
    Ok(iota_program(h, f.source())?
        .then(&symmetric_program(h, f)?)?
        .then(&kappa_program(h, f.target())?)?
        .to_map(h.space()))
}

/// Coefficientwise tensor product of series of maps.
pub fn series_tensor(a: &Series, b: &Series) -> Result<Series> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::TruncationMismatch(format!("orders {n} and {}", b.order())));
    }
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc: Option<GradedMap> = None;
        for i in 0..=k {
            let t = a.coeffs()[i].tensor(&b.coeffs()[k - i])?;
            acc = Some(match acc {
                None => t,
                Some(x) => x.add(&t)?,
            });
        }
        out.push(acc.unwrap());
    }
    HSeries::from_coeffs(out)
}

/// Lowest power and basis vector where two series differ.
pub fn series_difference(a: &Series, b: &Series) -> Option<(usize, Idx)> {
    a.coeffs().iter().zip(b.coeffs()).enumerate().find_map(|(k, (x, y))| x.first_difference(y).map(|i| (k, i)))
}

pub fn compare_series(space: &GradedSpace, name: &str, a: &Series, b: &Series) -> AxiomCheck {
    match series_difference(a, b) {
        None => AxiomCheck { name: name.into(), ok: true, first_failure: None },
        Some((k, i)) => AxiomCheck {
            name: name.into(),
            ok: false,
            first_failure: Some(format!("h^{k} at {}", space.idx_label(&i))),
        },
    }
}

/// The set-level nerve of a group on `f: •^m → •^n`, as the map
/// `G^{n-1} → G^{m-1}` with tuples encoded in base `|G|`.
pub fn group_nerve_oracle(g: &FiniteGroup, f: &FinMap) -> Result<Vec<usize>> {
    let order = g.order();
    let (m, n) = (f.source(), f.target());
    let count = order.checked_pow(slots(n) as u32).filter(|&c| c <= 1 << 20);
    let Some(count) = count else {
        return Err(Error::OutOfRange(format!("{order}^{} nerve elements", slots(n))));
    };
    let mut out = Vec::with_capacity(count);
    let mut tuple = vec![0; slots(n)];
    for code in 0..count {
        let mut c = code;
        for t in tuple.iter_mut().rev() {
            *t = c % order;
            c /= order;
        }
        // pair function g(i, j) of the point, read off along f
        let pair = |i: usize, j: usize| -> usize {
            let (lo, hi) = (i.min(j), i.max(j));
            let p = tuple[lo..hi].iter().fold(g.identity(), |acc, &x| g.mul(acc, x));
            if i <= j {
                p
            } else {
                g.inv(p)
            }
        };
        let mut image = 0;
        for i in 0..slots(m) {
            image = image * order + pair(f.apply(i), f.apply(i + 1));
        }
        out.push(image);
    }
    Ok(out)
}

/// Linear dual of the group nerve on `Fun(G)`: `δ_x ↦ Σ_{N(f)(y) = x} δ_y`.
pub fn group_nerve_dual(h: &HopfAlgebra, g: &FiniteGroup, f: &FinMap) -> Result<GradedMap> {
    if h.dim() != g.order() {
        return Err(Error::ShapeMismatch("algebra and group sizes differ".into()));
    }
    let set_map = group_nerve_oracle(g, f)?;
    let order = g.order();
    let decode = |mut c: usize, len: usize| -> Idx {
        let mut v: Idx = smallvec::smallvec![0; len];
        for t in v.iter_mut().rev() {
            *t = (c % order) as u16;
            c /= order;
        }
        v
    };
    let (a, b) = (slots(f.source()), slots(f.target()));
    let mut cols: FxHashMap<Idx, Vector> = FxHashMap::default();
    for (y, &x) in set_map.iter().enumerate() {
        cols.entry(decode(x, a)).or_default().add_term(decode(y, b), Rational::one());
    }
    GradedMap::from_columns(h.space().clone(), a, b, cols)
}

/// `κₙ ∘ ιₙ = id` for `n ≤ max_n`.
pub fn kappa_iota_checks(h: &HopfAlgebra, max_n: usize) -> Result<Vec<AxiomCheck>> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        let ki = kappa(h, n)?.compose(&iota(h, n)?)?;
        let id = GradedMap::identity(h.space().clone(), slots(n));
        out.push(crate::hopf_backend::compare_maps(h.space(), &format!("κ{n} ∘ ι{n} = id"), &ki, &id));
    }
    Ok(out)
}

/// Properties of `τ` on a Poisson Hopf algebra: vanishing under
/// the product, biderivation, comodule map, and the infinitesimal braid
/// relation `[τ₁₂ + τ₁₃, τ₂₃] = 0`.
pub fn tau_checks(h: &HopfAlgebra) -> Result<Vec<AxiomCheck>> {
    let space = h.space().clone();
    let tau = h.tau()?;
    let prog = |p: Result<Program>| -> Result<GradedMap> { Ok(p?.to_map(&space)) };
    let id = |n: usize| Program::identity(n);
    let tau_at = |n: usize, i: usize, j: usize| -> Result<GradedMap> {
        let t = tau.clone();
        Ok(GradedMap::from_fn_par(space.clone(), n, n, |b| apply_pair(&t, &Vector::basis(b.clone()), i, j)))
    };
    let mut checks = Vec::new();
    let cmp = |name: &str, a: &GradedMap, b: &GradedMap| crate::hopf_backend::compare_maps(&space, name, a, b);

    let m_tau = prog(id(2).block(0, tau.clone()).and_then(|p| p.block(0, h.m())))?;
    checks.push(cmp("m ∘ τ = 0", &m_tau, &GradedMap::zero(space.clone(), 2, 1)));

    let m_id = prog(id(3).block(0, h.m()))?;
    let id_m = prog(id(3).block(1, h.m()))?;
    let lhs = (*tau).compose(&m_id)?;
    let rhs = m_id.compose(&tau_at(3, 0, 2)?.add(&tau_at(3, 1, 2)?)?)?;
    checks.push(cmp("τ derivation in the first slot", &lhs, &rhs));
    let lhs = (*tau).compose(&id_m)?;
    let rhs = id_m.compose(&tau_at(3, 0, 1)?.add(&tau_at(3, 0, 2)?)?)?;
    checks.push(cmp("τ derivation in the second slot", &lhs, &rhs));

    // x ⊗ y ↦ x₁y₁ ⊗ x₂ ⊗ y₂
    let coaction = prog(
        id(2)
            .block(1, h.delta())
            .and_then(|p| p.block(0, h.delta()))
            .and_then(|p| p.permute(vec![0, 2, 1, 3]))
            .and_then(|p| p.block(0, h.m())),
    )?;
    let before = coaction.compose(&tau)?;
    let id_tau = prog(id(3).block(1, tau.clone()))?;
    let after = id_tau.compose(&coaction)?;
    checks.push(cmp("τ is a comodule map", &before, &after));

    let (t12, t13, t23) = (tau_at(3, 0, 1)?, tau_at(3, 0, 2)?, tau_at(3, 1, 2)?);
    let s = t12.add(&t13)?;
    let comm = s.compose(&t23)?.add(&t23.compose(&s)?.scale(&-Rational::one()))?;
    checks.push(cmp("[τ12 + τ13, τ23] = 0", &comm, &GradedMap::zero(space.clone(), 3, 3)));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fun_s3() -> (FiniteGroup, HopfAlgebra) {
        let g = FiniteGroup::symmetric(3);
        let h = HopfAlgebra::fun_group(&g).unwrap();
        (g, h)
    }

    fn qs3() -> HopfAlgebra {
        HopfAlgebra::group_algebra(&FiniteGroup::symmetric(3)).unwrap()
    }

    fn xy(d: u32) -> HopfAlgebra {
        HopfAlgebra::sym_trunc(&["X".into(), "Y".into()], &[(0, 1, 1, Rational::one())], d).unwrap()
    }

    fn br(n: usize, l: &[i32], t: usize, a: &[usize]) -> BrMorphism {
        BrMorphism::new(BraidWord::new(n, l.to_vec()).unwrap(), t, a.to_vec()).unwrap()
    }

    #[test]
    fn commutative_nerve_small_cases() {
        let (_, h) = fun_s3();
        assert_eq!(nerve_com(&h, &FinMap::identity(3)).unwrap(), GradedMap::identity(h.space().clone(), 2));
        assert_eq!(nerve_com(&h, &FinMap::merge_all(2)).unwrap(), *h.eps());
        let s = nerve_com(&h, &FinMap::new(2, 2, vec![1, 0]).unwrap()).unwrap();
        assert_eq!(s, *h.antipode());
        assert!(nerve_com(&qs3(), &FinMap::identity(2)).is_err());
    }

    #[test]
    fn group_oracle_sizes_and_projection() {
        let (g, h) = fun_s3();
        for n in 1..=4 {
            let f = FinMap::identity(n);
            assert_eq!(group_nerve_oracle(&g, &f).unwrap().len(), 6usize.pow(slots(n) as u32));
        }
        // product G × G → G from the inclusion of the outer points
        let f = FinMap::new(2, 3, vec![0, 2]).unwrap();
        let map = group_nerve_oracle(&g, &f).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(map[a * 6 + b], g.mul(a, b));
            }
        }
        assert_eq!(group_nerve_dual(&h, &g, &f).unwrap(), nerve_com(&h, &f).unwrap());
    }

    #[test]
    fn kappa_iota_is_identity() {
        for h in [fun_s3().1, qs3(), xy(3)] {
            for n in 0..=4 {
                let ki = iota_program(&h, n).unwrap().then(&kappa_program(&h, n).unwrap()).unwrap().to_map(h.space());
                assert_eq!(ki, GradedMap::identity(h.space().clone(), slots(n)), "n = {n} on {}", h.name());
            }
        }
    }

    #[test]
    fn iota_lands_in_coinvariants() {
        let h = qs3();
        for n in 1..=3 {
            let i = iota_program(&h, n).unwrap();
            // diagonal coaction H^n → H ⊗ H^n versus η ⊗ id
            let mut co = i.clone();
            for k in (0..n).rev() {
                co = co.block(k, h.delta()).unwrap();
            }
            let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
            co = co.permute(perm).unwrap();
            let mut fibers = vec![(0..n).collect::<Vec<_>>()];
            fibers.extend((n..2 * n).map(|k| vec![k]));
            co = co.products(fibers, h.m(), h.unit_vector()).unwrap();
            let eta_id = i.clone().products(
                std::iter::once(vec![]).chain((0..n).map(|k| vec![k])).collect(),
                h.m(),
                h.unit_vector(),
            ).unwrap();
            assert_eq!(co.to_map(h.space()), eta_id.to_map(h.space()));
        }
    }

    #[test]
    fn worked_braid_example() {
        let h = qs3();
        let phi = br(4, &[1, 2], 3, &[0, 1, 2, 2]);
        let n = nerve_br(&h, &phi).unwrap();
        let g = FiniteGroup::symmetric(3);
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let bic = g.mul(g.inv(b), c);
                    let expect = vec![(Idx::from_slice(&[bic as u16, g.mul(a, bic) as u16]), Rational::one())];
                    assert_eq!(n.col(&[a as u16, b as u16, c as u16]).unwrap().sorted(), expect);
                }
            }
        }
    }

    #[test]
    fn braided_recovers_operations() {
        for h in [qs3(), fun_s3().1] {
            let h = Arc::new(h);
            let ev = NerveEvaluator::new(h.clone(), NerveMode::Braided).unwrap();
            let ops = ev.extract_hopf().unwrap();
            let cl = HopfOps::classical(&h, 0);
            for ((name, a), (_, b)) in ops.named().iter().zip(cl.named().iter()) {
                assert!(series_difference(a, b).is_none(), "{name} on {}", h.name());
            }
        }
    }

    #[test]
    fn symmetric_recovers_operations() {
        let h = Arc::new(fun_s3().1);
        let ev = NerveEvaluator::new(h.clone(), NerveMode::Symmetric).unwrap();
        let ops = ev.extract_hopf().unwrap();
        let cl = HopfOps::classical(&h, 0);
        for ((name, a), (_, b)) in ops.named().iter().zip(cl.named().iter()) {
            assert!(series_difference(a, b).is_none(), "{name}");
        }
    }

    #[test]
    fn chordless_icom_is_commutative_nerve() {
        let (_, h) = fun_s3();
        for f in FinMap::all(3, 3).into_iter().chain(FinMap::all(4, 2)) {
            let a = nerve_icom(&h, &ICMorphism::from_map(&f, 0), 0).unwrap();
            assert_eq!(a.coeffs()[0], nerve_com(&h, &f).unwrap(), "{f}");
        }
    }

    #[test]
    fn bracket_from_one_chord() {
        let h = xy(3);
        let p = h.bracket().unwrap();
        let f = FinMap::new(4, 2, vec![0, 1, 0, 1]).unwrap();
        let ev = NerveEvaluator::new(Arc::new(h), NerveMode::Infinitesimal { order: 1 }).unwrap();
        let c = ev.coherence(2, 2).unwrap();
        let eval = |i: usize, j: usize| {
            let w = ICMorphism::from_word(&f, &[crate::chords::chord(i, j)], Rational::one(), 1).unwrap();
            ev.eval_icom(&w).unwrap().mul(&c).unwrap().coeffs()[1].clone()
        };
        assert_eq!(eval(1, 2), *p);
        assert_eq!(eval(0, 3), p.scale(&-Rational::one()));
        for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert!(eval(i, j).is_zero());
        }
    }

    #[test]
    fn tau_properties() {
        for c in tau_checks(&xy(3)).unwrap() {
            assert!(c.ok, "{}: {:?}", c.name, c.first_failure);
        }
    }

    #[test]
    fn segal_merge_shape() {
        assert_eq!(segal_merge(3).underlying().img(), &[0, 1, 1, 2]);
        assert_eq!(segal_merge(4).underlying().img(), &[0, 1, 1, 2, 2, 3]);
    }
}
