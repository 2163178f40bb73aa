//! Concrete (Poisson) Hopf algebras over the rationals, used to evaluate
//! nerves: finite group function algebras and group algebras, truncated
//! symmetric algebras of Lie algebras, and their tensor products.

pub mod engine;
pub mod group;
pub mod spec;
pub mod term;

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::rational::binomial;
use crate::exactalg::{GradedMap, GradedSpace, Idx, Rational, Vector};
use engine::Program;
pub use group::FiniteGroup;
pub use spec::AlgebraSpec;
use term::*;

/// Which axioms a presentation satisfies beyond the Hopf ones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub commutative: bool,
    pub cocommutative: bool,
    pub antipode_invertible: bool,
    pub poisson: bool,
}

/// A Hopf algebra `H` given by structure maps on a graded space with a
/// total-degree window. All structure maps are degree non-increasing, so
/// every composite is computed exactly on the window.
pub struct HopfAlgebra {
    name: String,
    spec: Option<AlgebraSpec>,
    space: Arc<GradedSpace>,
    m: Arc<GradedMap>,
    delta: Arc<GradedMap>,
    eta: Arc<GradedMap>,
    eps: Arc<GradedMap>,
    s: Arc<GradedMap>,
    s_inv: Option<Arc<GradedMap>>,
    p: Option<Arc<GradedMap>>,
    ambient_t: Option<Arc<GradedMap>>,
    flags: Flags,
    tau: OnceLock<Arc<GradedMap>>,
    ydb: OnceLock<Arc<GradedMap>>,
    ydb_inv: OnceLock<Arc<GradedMap>>,
    coproducts: Mutex<FxHashMap<usize, Arc<GradedMap>>>,
}

/// Raw structure maps, before validation.
#[derive(Clone)]
pub struct Structure {
    pub name: String,
    pub space: Arc<GradedSpace>,
    pub m: GradedMap,
    pub delta: GradedMap,
    pub eta: GradedMap,
    pub eps: GradedMap,
    pub s: GradedMap,
    pub s_inv: Option<GradedMap>,
    pub p: Option<GradedMap>,
    pub ambient_t: Option<GradedMap>,
}

fn idx(v: &[u16]) -> Idx {
    Idx::from_slice(v)
}

impl HopfAlgebra {
    /// Build and validate; the antipode inverse is computed if absent.
    pub fn from_structure(st: Structure, spec: Option<AlgebraSpec>) -> Result<Self> {
        let h = Self::from_structure_unchecked(st, spec)?;
        let report = h.validate();
        if !report.ok() {
            return Err(Error::AxiomFailure { axiom: report.first_failure().unwrap(), detail: report.to_string() });
        }
        Ok(h)
    }

    /// Build without running the validators; only shapes are checked.
    pub fn from_structure_unchecked(st: Structure, spec: Option<AlgebraSpec>) -> Result<Self> {
        let arities = [
            ("m", &st.m, 2, 1),
            ("Δ", &st.delta, 1, 2),
            ("η", &st.eta, 0, 1),
            ("ε", &st.eps, 1, 0),
            ("S", &st.s, 1, 1),
        ];
        for (n, map, a, b) in arities {
            if map.source_power() != a || map.target_power() != b || **map.space() != *st.space {
                return Err(Error::InvalidPresentation(format!("{n} has the wrong shape")));
            }
        }
        let s_inv = match st.s_inv {
            Some(x) => Some(x),
            None => st.s.invert().ok(),
        };
        let mut h = HopfAlgebra {
            name: st.name,
            spec,
            space: st.space,
            m: Arc::new(st.m),
            delta: Arc::new(st.delta),
            eta: Arc::new(st.eta),
            eps: Arc::new(st.eps),
            s: Arc::new(st.s),
            s_inv: s_inv.map(Arc::new),
            p: st.p.map(Arc::new),
            ambient_t: st.ambient_t.map(Arc::new),
            flags: Flags::default(),
            tau: OnceLock::new(),
            ydb: OnceLock::new(),
            ydb_inv: OnceLock::new(),
            coproducts: Mutex::new(FxHashMap::default()),
        };
        h.flags.antipode_invertible = h.s_inv.is_some();
        h.flags.commutative = *h.m == comp(M, Swap).eval(&h)?;
        h.flags.cocommutative = *h.delta == comp(Swap, Delta).eval(&h)?;
        h.flags.poisson = h.p.is_some();
        Ok(h)
    }

    pub(crate) fn set_spec(&mut self, spec: AlgebraSpec) {
        self.spec = Some(spec);
    }

    /// Functions on a finite group, with zero bracket.
    pub fn fun_group(g: &FiniteGroup) -> Result<Self> {
        let n = g.order();
        let space = Arc::new(GradedSpace::new(
            &format!("Fun(G{n})"),
            g.names().iter().map(|x| format!("d[{x}]")).collect(),
            vec![0; n],
            None,
        )?);
        let m = GradedMap::from_fn(space.clone(), 2, 1, |b| {
            if b[0] == b[1] {
                Vector::basis(idx(&[b[0]]))
            } else {
                Vector::new()
            }
        });
        let delta = GradedMap::from_fn(space.clone(), 1, 2, |b| {
            let mut v = Vector::new();
            for a in 0..n {
                // a · c = g  with  c = a⁻¹ g
                let c = g.mul(g.inv(a), b[0] as usize);
                v.add_term(idx(&[a as u16, c as u16]), Rational::one());
            }
            v
        });
        let eta = GradedMap::from_fn(space.clone(), 0, 1, |_| (0..n).map(|a| (idx(&[a as u16]), Rational::one())).collect());
        let eps = GradedMap::from_fn(space.clone(), 1, 0, |b| {
            if b[0] as usize == g.identity() {
                Vector::unit_scalar(Rational::one())
            } else {
                Vector::new()
            }
        });
        let s = GradedMap::from_fn(space.clone(), 1, 1, |b| Vector::basis(idx(&[g.inv(b[0] as usize) as u16])));
        let p = GradedMap::zero(space.clone(), 2, 1);
        Self::from_structure(
            Structure {
                name: format!("Fun(G) with |G| = {n}"),
                space,
                m,
                delta,
                eta,
                eps,
                s: s.clone(),
                s_inv: Some(s),
                p: Some(p),
                ambient_t: None,
            },
            Some(AlgebraSpec::fun_group(g)),
        )
    }

    /// The group algebra `QG`.
    pub fn group_algebra(g: &FiniteGroup) -> Result<Self> {
        let n = g.order();
        let space = Arc::new(GradedSpace::new(&format!("QG{n}"), g.names().to_vec(), vec![0; n], None)?);
        let m = GradedMap::from_fn(space.clone(), 2, 1, |b| Vector::basis(idx(&[g.mul(b[0] as usize, b[1] as usize) as u16])));
        let delta = GradedMap::from_fn(space.clone(), 1, 2, |b| Vector::basis(idx(&[b[0], b[0]])));
        let eta = GradedMap::from_fn(space.clone(), 0, 1, |_| Vector::basis(idx(&[g.identity() as u16])));
        let eps = GradedMap::from_fn(space.clone(), 1, 0, |_| Vector::unit_scalar(Rational::one()));
        let s = GradedMap::from_fn(space.clone(), 1, 1, |b| Vector::basis(idx(&[g.inv(b[0] as usize) as u16])));
        Self::from_structure(
            Structure {
                name: format!("QG with |G| = {n}"),
                space,
                m,
                delta,
                eta,
                eps,
                s: s.clone(),
                s_inv: Some(s),
                p: None,
                ambient_t: None,
            },
            Some(AlgebraSpec::group_algebra(g)),
        )
    }

    /// Symmetric algebra of a Lie algebra truncated at total degree `cap`,
    /// with its Kirillov–Kostant bracket. `brackets` lists
    /// `(i, j, k, c)` meaning `[e_i, e_j]` contains `c e_k`; missing
    /// transposed entries are filled in by antisymmetry.
    pub fn sym_trunc(generators: &[String], brackets: &[(usize, usize, usize, Rational)], cap: u32) -> Result<Self> {
        let k = generators.len();
        let table = lie_table(k, brackets)?;
        let monos = monomials(k, cap);
        let index: FxHashMap<Vec<u32>, u16> = monos.iter().enumerate().map(|(i, a)| (a.clone(), i as u16)).collect();
        let labels = monos.iter().map(|a| mono_label(a, generators)).collect();
        let degrees = monos.iter().map(|a| a.iter().sum()).collect();
        let space = Arc::new(GradedSpace::new(&format!("Sym{k}<={cap}"), labels, degrees, Some(cap))?);
        let look = |a: &[u32]| -> Option<u16> { index.get(a).copied() };
        let m = GradedMap::from_fn(space.clone(), 2, 1, |b| {
            let (x, y) = (&monos[b[0] as usize], &monos[b[1] as usize]);
            let s: Vec<u32> = x.iter().zip(y).map(|(a, c)| a + c).collect();
            match look(&s) {
                Some(i) => Vector::basis(idx(&[i])),
                None => Vector::new(),
            }
        });
        let delta = GradedMap::from_fn(space.clone(), 1, 2, |b| {
            let a = &monos[b[0] as usize];
            let mut v = Vector::new();
            for beta in sub_multi_indices(a) {
                let rest: Vec<u32> = a.iter().zip(&beta).map(|(x, y)| x - y).collect();
                let c: Rational = a.iter().zip(&beta).map(|(&x, &y)| binomial(x as u64, y as u64)).product();
                v.add_term(idx(&[look(&beta).unwrap(), look(&rest).unwrap()]), c);
            }
            v
        });
        let zero_mono = look(&vec![0; k]).unwrap();
        let eta = GradedMap::from_fn(space.clone(), 0, 1, |_| Vector::basis(idx(&[zero_mono])));
        let eps = GradedMap::from_fn(space.clone(), 1, 0, |b| {
            if b[0] == zero_mono {
                Vector::unit_scalar(Rational::one())
            } else {
                Vector::new()
            }
        });
        let s = GradedMap::from_fn(space.clone(), 1, 1, |b| {
            let d: u32 = monos[b[0] as usize].iter().sum();
            let c = if d % 2 == 0 { Rational::one() } else { -Rational::one() };
            let mut v = Vector::new();
            v.add_term(idx(&[b[0]]), c);
            v
        });
        // p(f, g) = Σ_{i,j} ∂_i f ∂_j g [e_i, e_j]
        let p = GradedMap::from_fn(space.clone(), 2, 1, |b| {
            let (x, y) = (&monos[b[0] as usize], &monos[b[1] as usize]);
            let mut v = Vector::new();
            for i in 0..k {
                if x[i] == 0 {
                    continue;
                }
                for j in 0..k {
                    if y[j] == 0 {
                        continue;
                    }
                    for (l, c) in table[i][j].iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut e: Vec<u32> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                        e[i] -= 1;
                        e[j] -= 1;
                        e[l] += 1;
                        if let Some(t) = look(&e) {
                            v.add_term(idx(&[t]), c * &Rational::from_int((x[i] * y[j]) as i64));
                        }
                    }
                }
            }
            v
        });
        Self::from_structure(
            Structure {
                name: format!("Sym({}) truncated at degree {cap}", generators.join(",")),
                space,
                m,
                delta,
                eta,
                eps,
                s: s.clone(),
                s_inv: Some(s),
                p: Some(p),
                ambient_t: None,
            },
            Some(AlgebraSpec::sym_trunc(generators, brackets, cap)),
        )
    }

    /// Tensor product Poisson Hopf algebra with bracket `p₁⊗m₂ + m₁⊗p₂`.
    pub fn tensor(h1: &HopfAlgebra, h2: &HopfAlgebra) -> Result<Self> {
        if h1.ambient_t.is_some() || h2.ambient_t.is_some() {
            return Err(Error::InvalidPresentation("tensor products need zero ambient t".into()));
        }
        let (a, b) = (&h1.space, &h2.space);
        let n2 = b.dim();
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for i in 0..a.dim() {
            for j in 0..n2 {
                labels.push(format!("{}|{}", a.labels[i], b.labels[j]));
                degrees.push(a.degrees[i] + b.degrees[j]);
            }
        }
        let cap = match (a.cap, b.cap) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        let space = Arc::new(GradedSpace::new(&format!("{}⊗{}", a.name, b.name), labels, degrees, cap)?);
        let pm = |f1: &GradedMap, f2: &GradedMap| pair_map(&space, n2, f1, f2);
        let p = match (&h1.p, &h2.p) {
            (Some(p1), Some(p2)) => Some(pm(p1, &h2.m).add(&pm(&h1.m, p2))?),
            _ => None,
        };
        let s_inv = match (&h1.s_inv, &h2.s_inv) {
            (Some(x), Some(y)) => Some(pm(x, y)),
            _ => None,
        };
        let spec = match (&h1.spec, &h2.spec) {
            (Some(x), Some(y)) => Some(AlgebraSpec::tensor(x.clone(), y.clone())),
            _ => None,
        };
        Self::from_structure(
            Structure {
                name: format!("{} ⊗ {}", h1.name, h2.name),
                space: space.clone(),
                m: pm(&h1.m, &h2.m),
                delta: pm(&h1.delta, &h2.delta),
                eta: pm(&h1.eta, &h2.eta),
                eps: pm(&h1.eps, &h2.eps),
                s: pm(&h1.s, &h2.s),
                s_inv,
                p,
                ambient_t: None,
            },
            spec,
        )
    }

    /// The one-dimensional Hopf algebra.
    pub fn trivial() -> Self {
        Self::fun_group(&FiniteGroup::cyclic(1)).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> Option<&AlgebraSpec> {
        self.spec.as_ref()
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn m(&self) -> Arc<GradedMap> {
        self.m.clone()
    }

    pub fn delta(&self) -> Arc<GradedMap> {
        self.delta.clone()
    }

    pub fn eta(&self) -> Arc<GradedMap> {
        self.eta.clone()
    }

    pub fn eps(&self) -> Arc<GradedMap> {
        self.eps.clone()
    }

    pub fn antipode(&self) -> Arc<GradedMap> {
        self.s.clone()
    }

    pub fn antipode_inverse(&self) -> Result<Arc<GradedMap>> {
        self.s_inv.clone().ok_or_else(|| Error::NotInvertible(format!("antipode of {} is not invertible", self.name)))
    }

    pub fn bracket(&self) -> Option<Arc<GradedMap>> {
        self.p.clone()
    }

    pub fn ambient_t(&self) -> Option<Arc<GradedMap>> {
        self.ambient_t.clone()
    }

    pub fn unit_vector(&self) -> Arc<Vector> {
        Arc::new(self.eta.col(&[]).cloned().unwrap_or_default())
    }

    /// `Δ^(k): H → H^{⊗k}`, with `Δ^(0) = ε` and `Δ^(1) = id`.
    pub fn iterated_coproduct(&self, k: usize) -> Arc<GradedMap> {
        if let Some(x) = self.coproducts.lock().unwrap().get(&k) {
            return x.clone();
        }
        let map = Arc::new(match k {
            0 => (*self.eps).clone(),
            1 => GradedMap::identity(self.space.clone(), 1),
            _ => {
                let prev = self.iterated_coproduct(k - 1);
                Program::identity(1)
                    .block(0, prev)
                    .and_then(|p| p.block(0, self.delta.clone()))
                    .unwrap()
                    .to_map(&self.space)
            }
        });
        self.coproducts.lock().unwrap().insert(k, map.clone());
        map
    }

    /// `m^(q): H^{⊗q} → H`, with `m^(0) = η`.
    pub fn iterated_product(&self, q: usize) -> Result<GradedMap> {
        let fibers = vec![(0..q).collect()];
        Ok(Program::identity(q).products(fibers, self.m.clone(), self.unit_vector())?.to_map(&self.space))
    }

    /// `r + r^op + t` with `r(x ⊗ y) = -p(x, y₁) S(y₂) ⊗ y₃`.
    pub fn tau(&self) -> Result<Arc<GradedMap>> {
        if let Some(t) = self.tau.get() {
            return Ok(t.clone());
        }
        let p = self.p.clone().ok_or_else(|| Error::InvalidPresentation(format!("{} has no Poisson bracket", self.name)))?;
        let r = Program::identity(2)
            .block(1, self.iterated_coproduct(3))?
            .block(0, p)?
            .block(1, self.s.clone())?
            .block(0, self.m.clone())?;
        let swap = Program::identity(2).permute(vec![1, 0])?;
        let rop = swap.clone().then(&r)?.then(&swap)?;
        let mut terms = vec![(-Rational::one(), r), (-Rational::one(), rop)];
        if let Some(t) = &self.ambient_t {
            terms.push((Rational::one(), Program::identity(2).block(0, t.clone())?));
        }
        let map = Arc::new(Program::linear(terms)?.to_map(&self.space));
        Ok(self.tau.get_or_init(|| map).clone())
    }

    /// Yetter–Drinfeld braiding `x ⊗ y ↦ x₁ y S(x₂) ⊗ x₃`.
    pub fn yd_braiding(&self) -> Result<Arc<GradedMap>> {
        if let Some(t) = self.ydb.get() {
            return Ok(t.clone());
        }
        let prog = Program::identity(2)
            .block(0, self.iterated_coproduct(3))?
            .permute(vec![0, 3, 1, 2])?
            .block(2, self.s.clone())?
            .block(0, self.m.clone())?
            .block(0, self.m.clone())?;
        let map = Arc::new(prog.to_map(&self.space));
        Ok(self.ydb.get_or_init(|| map).clone())
    }

    pub fn yd_braiding_inverse(&self) -> Result<Arc<GradedMap>> {
        if let Some(t) = self.ydb_inv.get() {
            return Ok(t.clone());
        }
        self.antipode_inverse()?;
        let inv = Arc::new(self.yd_braiding()?.invert()?);
        Ok(self.ydb_inv.get_or_init(|| inv).clone())
    }

    /// Hopf axioms, plus the Poisson ones when a bracket is present.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport { algebra: self.name.clone(), checks: Vec::new() };
        let eq = |r: &mut ValidationReport, name: &str, a: DiagramTerm, b: DiagramTerm| {
            r.checks.push(check_terms(self, name, &a, &b));
        };
        eq(&mut r, "associativity", comp(M, tens(M, id(1))), comp(M, tens(id(1), M)));
        eq(&mut r, "left unit", comp(M, tens(Eta, id(1))), id(1));
        eq(&mut r, "right unit", comp(M, tens(id(1), Eta)), id(1));
        eq(&mut r, "coassociativity", comp(tens(Delta, id(1)), Delta), comp(tens(id(1), Delta), Delta));
        eq(&mut r, "left counit", comp(tens(Eps, id(1)), Delta), id(1));
        eq(&mut r, "right counit", comp(tens(id(1), Eps), Delta), id(1));
        eq(&mut r, "counit of unit", comp(Eps, Eta), id(0));
        eq(&mut r, "coproduct of unit", comp(Delta, Eta), tens(Eta, Eta));
        eq(&mut r, "counit of product", comp(Eps, M), tens(Eps, Eps));
        eq(
            &mut r,
            "bialgebra",
            comp(Delta, M),
            chain(vec![tens(M, M), row(vec![id(1), Swap, id(1)]), tens(Delta, Delta)]),
        );
        eq(&mut r, "left antipode", chain(vec![M, tens(S, id(1)), Delta]), comp(Eta, Eps));
        eq(&mut r, "right antipode", chain(vec![M, tens(id(1), S), Delta]), comp(Eta, Eps));
        if self.s_inv.is_some() {
            eq(&mut r, "antipode inverse", comp(S, SInv), id(1));
            eq(&mut r, "antipode inverse (other side)", comp(SInv, S), id(1));
        }
        if self.p.is_some() {
            self.validate_poisson_into(&mut r);
        }
        r
    }

    fn validate_poisson_into(&self, r: &mut ValidationReport) {
        let eq = |r: &mut ValidationReport, name: &str, a: DiagramTerm, b: DiagramTerm| {
            r.checks.push(check_terms(self, name, &a, &b));
        };
        if !self.flags.commutative {
            r.checks.push(AxiomCheck {
                name: "commutativity".into(),
                ok: false,
                first_failure: Some("a Poisson Hopf algebra must be commutative".into()),
            });
        }
        eq(r, "skew symmetry", sum(P, comp(P, Swap)), comp(M, T));
        let cyc = |k: usize| -> DiagramTerm {
            let perm = match k {
                0 => id(3),
                // x⊗y⊗z ↦ y⊗z⊗x and z⊗x⊗y
                1 => comp(tens(id(1), Swap), tens(Swap, id(1))),
                _ => comp(tens(Swap, id(1)), tens(id(1), Swap)),
            };
            chain(vec![P, tens(P, id(1)), perm])
        };
        eq(r, "Jacobi", sum(sum(cyc(0), cyc(1)), cyc(2)), Zero(3, 1));
        eq(
            r,
            "Leibniz",
            comp(P, tens(id(1), M)),
            sum(comp(M, tens(P, id(1))), chain(vec![M, tens(id(1), P), tens(Swap, id(1))])),
        );
        eq(
            r,
            "coproduct is Poisson",
            comp(Delta, P),
            chain(vec![sum(tens(P, M), tens(M, P)), row(vec![id(1), Swap, id(1)]), tens(Delta, Delta)]),
        );
    }

    /// Sparse-column text of a structure map, for inspection.
    pub fn describe(&self) -> String {
        format!(
            "{}: dim {}, degree cap {:?}, commutative {}, cocommutative {}",
            self.name,
            self.dim(),
            self.space.cap,
            self.flags.commutative,
            self.flags.cocommutative
        )
    }
}

impl fmt::Debug for HopfAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// `(F₁ ⊠ F₂)` on the tensor product space: slot pairs `(i, j)` are encoded
/// as `i · n2 + j`.
pub fn pair_map(space: &Arc<GradedSpace>, n2: usize, f1: &GradedMap, f2: &GradedMap) -> GradedMap {
    let (s, t) = (f1.source_power(), f1.target_power());
    GradedMap::from_fn(space.clone(), s, t, |b| {
        let x: Idx = b.iter().map(|&c| c / n2 as u16).collect();
        let y: Idx = b.iter().map(|&c| c % n2 as u16).collect();
        let (Some(cx), Some(cy)) = (f1.col(&x), f2.col(&y)) else {
            return Vector::new();
        };
        let mut v = Vector::new();
        for (kx, a) in cx.iter() {
            for (ky, c) in cy.iter() {
                let k: Idx = kx.iter().zip(ky.iter()).map(|(&i, &j)| i * n2 as u16 + j).collect();
                if space.in_range(&k) {
                    v.add_term(k, a * c);
                }
            }
        }
        v
    })
}

fn lie_table(k: usize, brackets: &[(usize, usize, usize, Rational)]) -> Result<Vec<Vec<Vec<Rational>>>> {
    let mut t = vec![vec![vec![Rational::zero(); k]; k]; k];
    let mut given = vec![vec![false; k]; k];
    for (i, j, l, c) in brackets {
        if *i >= k || *j >= k || *l >= k {
            return Err(Error::InvalidPresentation(format!("structure constant ({i}, {j}, {l}) out of range")));
        }
        t[*i][*j][*l] += c;
        given[*i][*j] = true;
    }
    for i in 0..k {
        for j in 0..k {
            if given[i][j] && !given[j][i] {
                for l in 0..k {
                    t[j][i][l] = -t[i][j][l].clone();
                }
                given[j][i] = true;
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if t[i][j][l] != -t[j][i][l].clone() {
                    return Err(Error::InvalidPresentation(format!("bracket is not antisymmetric at ({i}, {j})")));
                }
            }
        }
    }
    // Jacobi: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0
    let br = |u: &[Rational], v: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); k];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for l in 0..k {
                    out[l] += &(&(a * b) * &t[i][j][l]);
                }
            }
        }
        out
    };
    let e = |i: usize| -> Vec<Rational> { (0..k).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect() };
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let x = br(&br(&e(a), &e(b)), &e(c));
                let y = br(&br(&e(b), &e(c)), &e(a));
                let z = br(&br(&e(c), &e(a)), &e(b));
                if (0..k).any(|l| !(&(&x[l] + &y[l]) + &z[l]).is_zero()) {
                    return Err(Error::InvalidPresentation(format!("Jacobi identity fails on ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok(t)
}

/// Exponent vectors of total degree at most `cap`, by degree and then
/// decreasing lexicographic order.
fn monomials(k: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=cap {
        let mut cur = vec![0; k];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if i + 1 >= cur.len() {
        if let Some(last) = cur.last_mut() {
            *last = left;
            out.push(cur.clone());
        } else if left == 0 {
            out.push(vec![]);
        }
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(cur, i + 1, left - a, out);
    }
    cur[i] = 0;
}

fn sub_multi_indices(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &x in a {
        let mut next = Vec::new();
        for p in &out {
            for y in 0..=x {
                let mut q = p.clone();
                q.push(y);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn mono_label(a: &[u32], gens: &[String]) -> String {
    let parts: Vec<String> = a
        .iter()
        .zip(gens)
        .filter(|(e, _)| **e > 0)
        .map(|(e, g)| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Result of one axiom check.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub ok: bool,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub algebra: String,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks.iter().find(|c| !c.ok).map(|c| c.name.clone())
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.algebra)?;
        for c in &self.checks {
            match &c.first_failure {
                None => writeln!(f, "  {}: ok", c.name)?,
                Some(x) => writeln!(f, "  {}: FAIL at {x}", c.name)?,
            }
        }
        Ok(())
    }
}

/// Compare two maps and describe the first basis vector where they differ.
pub fn compare_maps(space: &GradedSpace, name: &str, a: &GradedMap, b: &GradedMap) -> AxiomCheck {
    match a.first_difference(b) {
        None => AxiomCheck { name: name.into(), ok: true, first_failure: None },
        Some(k) => AxiomCheck { name: name.into(), ok: false, first_failure: Some(space.idx_label(&k)) },
    }
}

fn check_terms(h: &HopfAlgebra, name: &str, a: &DiagramTerm, b: &DiagramTerm) -> AxiomCheck {
    match (a.eval(h), b.eval(h)) {
        (Ok(x), Ok(y)) => compare_maps(&h.space, name, &x, &y),
        (Err(e), _) | (_, Err(e)) => AxiomCheck { name: name.into(), ok: false, first_failure: Some(e.to_string()) },
    }
}

/// Output slot `i·q + g` receives input slot `g·p + i`: `q` groups of `p`
/// become `p` groups of `q`.
pub fn shuffle_perm(p: usize, q: usize) -> Vec<usize> {
    let mut perm = vec![0; p * q];
    for i in 0..p {
        for g in 0..q {
            perm[i * q + g] = g * p + i;
        }
    }
    perm
}

/// Both sides of `(m^(q))^{⊗p} ∘ τ_{p,q} ∘ (Δ^(p))^{⊗q} = Δ^(p) ∘ m^(q)`.
pub fn bialgebra_big(h: &HopfAlgebra, p: usize, q: usize) -> Result<(GradedMap, GradedMap)> {
    let mut lhs = Program::identity(q);
    for g in 0..q {
        lhs = lhs.block(g * p, h.iterated_coproduct(p))?;
    }
    lhs = lhs.permute(shuffle_perm(p, q))?;
    let fibers: Vec<Vec<usize>> = (0..p).map(|i| (i * q..(i + 1) * q).collect()).collect();
    lhs = lhs.products(fibers, h.m(), h.unit_vector())?;
    let rhs = Program::identity(q)
        .products(vec![(0..q).collect()], h.m(), h.unit_vector())?
        .block(0, h.iterated_coproduct(p))?;
    Ok((lhs.to_map(h.space()), rhs.to_map(h.space())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> HopfAlgebra {
        HopfAlgebra::sym_trunc(&["X".into(), "Y".into()], &[(0, 1, 1, Rational::one())], 4).unwrap()
    }

    fn v(h: &HopfAlgebra, label: &str) -> u16 {
        h.space().labels.iter().position(|l| l == label).unwrap() as u16
    }

    #[test]
    fn function_algebras_validate() {
        let h = HopfAlgebra::fun_group(&FiniteGroup::symmetric(3)).unwrap();
        assert_eq!(h.dim(), 6);
        assert!(h.flags().commutative && !h.flags().cocommutative);
        assert!(h.validate().ok());
        let z2 = HopfAlgebra::fun_group(&FiniteGroup::cyclic(2)).unwrap();
        assert!(z2.flags().cocommutative);
    }

    #[test]
    fn group_algebra_validates() {
        let h = HopfAlgebra::group_algebra(&FiniteGroup::symmetric(3)).unwrap();
        assert!(!h.flags().commutative && h.flags().cocommutative);
        let ss = comp(S, S).eval(&h).unwrap();
        assert_eq!(ss, id(1).eval(&h).unwrap());
    }

    #[test]
    fn sym_trunc_structure() {
        let h = xy();
        assert_eq!(h.dim(), 15);
        let (x, y) = (v(&h, "X"), v(&h, "Y"));
        let p = h.bracket().unwrap();
        assert_eq!(p.col(&[x, y]).unwrap().sorted(), vec![(idx(&[y]), Rational::one())]);
        let x2 = v(&h, "X^2");
        let one = v(&h, "1");
        let d = h.delta().col(&[x2]).unwrap().sorted();
        let mut expect = vec![
            (idx(&[x2, one]), Rational::one()),
            (idx(&[x, x]), Rational::from_int(2)),
            (idx(&[one, x2]), Rational::one()),
        ];
        expect.sort();
        assert_eq!(d, expect);
        assert_eq!(p.shift_window(), Some((-1, -1)));
    }

    #[test]
    fn corrupted_antipode_is_reported() {
        let h = xy();
        let st = Structure {
            name: "broken".into(),
            space: h.space().clone(),
            m: (*h.m()).clone(),
            delta: (*h.delta()).clone(),
            eta: (*h.eta()).clone(),
            eps: (*h.eps()).clone(),
            s: GradedMap::identity(h.space().clone(), 1),
            s_inv: None,
            p: h.bracket().map(|p| (*p).clone()),
            ambient_t: None,
        };
        let broken = HopfAlgebra::from_structure_unchecked(st.clone(), None).unwrap();
        let report = broken.validate();
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["left antipode", "right antipode"]);
        assert_eq!(report.get("left antipode").unwrap().first_failure.as_deref(), Some("X"));
        let err = HopfAlgebra::from_structure(st, None).unwrap_err();
        assert!(err.to_string().contains("antipode"), "{err}");
    }

    #[test]
    fn invalid_lie_algebra_is_rejected() {
        // [X,Y] = X, [Y,Z] = X, [Z,X] = Y fails Jacobi
        let g: Vec<String> = vec!["X".into(), "Y".into(), "Z".into()];
        let b = vec![(0, 1, 0, Rational::one()), (1, 2, 0, Rational::one()), (2, 0, 1, Rational::one())];
        assert!(HopfAlgebra::sym_trunc(&g, &b, 2).is_err());
    }

    #[test]
    fn yd_braiding_on_group_likes() {
        let g = FiniteGroup::symmetric(3);
        let h = HopfAlgebra::group_algebra(&g).unwrap();
        let b = h.yd_braiding().unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let conj = g.mul(g.mul(x, y), g.inv(x));
                assert_eq!(b.col(&[x as u16, y as u16]).unwrap().sorted(), vec![(idx(&[conj as u16, x as u16]), Rational::one())]);
            }
        }
        let bi = h.yd_braiding_inverse().unwrap();
        assert_eq!(bi.compose(&b).unwrap(), GradedMap::identity(h.space().clone(), 2));
        // closed form of the inverse: u ⊗ v ↦ v₃ ⊗ S⁻¹(v₂) u v₁
        let formula = Program::identity(2)
            .block(1, h.iterated_coproduct(3))
            .unwrap()
            .permute(vec![3, 2, 0, 1])
            .unwrap()
            .block(1, h.antipode_inverse().unwrap())
            .unwrap()
            .block(1, h.m())
            .unwrap()
            .block(1, h.m())
            .unwrap()
            .to_map(h.space());
        assert_eq!(formula, *bi);
    }

    #[test]
    fn braiding_is_swap_when_commutative_and_cocommutative() {
        let h = HopfAlgebra::fun_group(&FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(*h.yd_braiding().unwrap(), Swap.eval(&h).unwrap());
    }

    #[test]
    fn tau_on_generators() {
        let h = xy();
        let t = h.tau().unwrap();
        let (x, y, one) = (v(&h, "X"), v(&h, "Y"), v(&h, "1"));
        // τ(X ⊗ Y) = -[X,Y] ⊗ 1 + 1 ⊗ [X,Y]
        let mut expect = vec![(idx(&[y, one]), -Rational::one()), (idx(&[one, y]), Rational::one())];
        expect.sort();
        assert_eq!(t.col(&[x, y]).unwrap().sorted(), expect);
        assert!(HopfAlgebra::fun_group(&FiniteGroup::symmetric(3)).unwrap().tau().unwrap().is_zero());
    }

    #[test]
    fn shuffle_example() {
        assert_eq!(shuffle_perm(2, 3), vec![0, 2, 4, 1, 3, 5]);
    }

    #[test]
    fn tensor_with_trivial_is_isomorphic() {
        let h = xy();
        let t = HopfAlgebra::tensor(&h, &HopfAlgebra::trivial()).unwrap();
        assert_eq!(t.dim(), h.dim());
        assert_eq!(t.m().triplets(), h.m().triplets());
        assert_eq!(t.bracket().unwrap().triplets(), h.bracket().unwrap().triplets());
    }
}
