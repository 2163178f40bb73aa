//! Quantization of Poisson Hopf algebras: the nerve of the transported
//! structure diagrams, and checks of the resulting deformed Hopf algebra.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::associator::AssocSeries;
use crate::error::{Error, Result};
use crate::exactalg::graded::GradedMapJson;
use crate::exactalg::{GradedMap, HSeries, Rational};
use crate::hopf_backend::{pair_map, AxiomCheck, HopfAlgebra};
use crate::nerve::{compare_series, series_tensor, HopfOps, NerveEvaluator, NerveMode};

type Series = HSeries<GradedMap>;

/// Deformed product, coproduct and antipode; unit and counit are carried
/// as series too so that their rigidity can be checked.
pub struct QuantizedHopf {
    base: Arc<HopfAlgebra>,
    phi: AssocSeries,
    order: usize,
    ops: HopfOps,
}

/// Named checks with their first failure.
#[derive(Clone, Debug, Serialize)]
pub struct QuantReport {
    pub title: String,
    pub checks: Vec<AxiomCheck>,
}

impl QuantReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(mut self, other: QuantReport) -> Self {
        self.checks.extend(other.checks);
        self
    }
}

impl fmt::Display for QuantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            match &c.first_failure {
                None => writeln!(f, "  {}: ok", c.name)?,
                Some(x) => writeln!(f, "  {}: FAIL at {x}", c.name)?,
            }
        }
        Ok(())
    }
}

/// Quantize `h` with the associator `phi` modulo `h^{order+1}`.
pub fn quantize(h: Arc<HopfAlgebra>, phi: &AssocSeries, order: usize) -> Result<QuantizedHopf> {
    let ev = NerveEvaluator::new(h.clone(), NerveMode::Quantized { phi: phi.clone(), order })?;
    let ops = ev.extract_hopf()?;
    Ok(QuantizedHopf { base: h, phi: phi.clone(), order, ops })
}

impl QuantizedHopf {
    pub fn base(&self) -> &Arc<HopfAlgebra> {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn associator(&self) -> &AssocSeries {
        &self.phi
    }

    pub fn ops(&self) -> &HopfOps {
        &self.ops
    }

    pub fn m(&self) -> &Series {
        &self.ops.m
    }

    pub fn delta(&self) -> &Series {
        &self.ops.delta
    }

    pub fn antipode(&self) -> &Series {
        &self.ops.s
    }

    pub fn eta(&self) -> &Series {
        &self.ops.eta
    }

    pub fn eps(&self) -> &Series {
        &self.ops.eps
    }

    fn constant(&self, m: GradedMap) -> Series {
        HSeries::constant(m, self.order)
    }

    fn id(&self, k: usize) -> Series {
        self.constant(GradedMap::identity(self.base.space().clone(), k))
    }

    fn check(&self, name: &str, a: Result<Series>, b: Result<Series>) -> AxiomCheck {
        match (a, b) {
            (Ok(a), Ok(b)) => compare_series(self.base.space(), name, &a, &b),
            (Err(e), _) | (_, Err(e)) => AxiomCheck { name: name.into(), ok: false, first_failure: Some(e.to_string()) },
        }
    }

    /// Hopf axioms modulo `h^{order+1}` in the symmetric category.
    pub fn verify(&self) -> QuantReport {
        let (m, d, e, s, u) = (&self.ops.m, &self.ops.delta, &self.ops.eps, &self.ops.s, &self.ops.eta);
        let t = |a: &Series, b: &Series| series_tensor(a, b);
        let space = self.base.space().clone();
        let sigma = self.constant(GradedMap::permutation(space.clone(), &[1, 0]));
        let mid = self.constant(GradedMap::permutation(space, &[0, 2, 1, 3]));
        let id1 = self.id(1);
        let scalar = self.id(0);
        let checks = vec![
            self.check("associativity", t(m, &id1).and_then(|x| m.mul(&x)), t(&id1, m).and_then(|x| m.mul(&x))),
            self.check("left unit", t(u, &id1).and_then(|x| m.mul(&x)), Ok(id1.clone())),
            self.check("right unit", t(&id1, u).and_then(|x| m.mul(&x)), Ok(id1.clone())),
            self.check("coassociativity", t(d, &id1).and_then(|x| x.mul(d)), t(&id1, d).and_then(|x| x.mul(d))),
            self.check("left counit", t(e, &id1).and_then(|x| x.mul(d)), Ok(id1.clone())),
            self.check("right counit", t(&id1, e).and_then(|x| x.mul(d)), Ok(id1.clone())),
            self.check("counit of unit", e.mul(u), Ok(scalar)),
            self.check("coproduct of unit", d.mul(u), t(u, u)),
            self.check("counit of product", e.mul(m), t(e, e)),
            self.check(
                "bialgebra",
                d.mul(m),
                t(m, m).and_then(|mm| t(d, d).and_then(|dd| mm.mul(&mid)?.mul(&dd))),
            ),
            self.check("left antipode", t(s, &id1).and_then(|x| m.mul(&x)?.mul(d)), u.mul(e)),
            self.check("right antipode", t(&id1, s).and_then(|x| m.mul(&x)?.mul(d)), u.mul(e)),
            self.check("product commutes with the symmetry at h^0", Ok(m.truncate(0)), m.mul(&sigma).map(|x| x.truncate(0))),
        ];
        QuantReport { title: format!("quantized {} modulo h^{}", self.base.name(), self.order + 1), checks }
    }

    /// `m_h - m_h ∘ σ = h p` modulo `h²`.
    pub fn semiclassical_check(&self) -> QuantReport {
        let space = self.base.space().clone();
        let order = self.order.min(1);
        let m = self.ops.m.truncate(order);
        let sigma = HSeries::constant(GradedMap::permutation(space.clone(), &[1, 0]), order);
        let lhs = m.mul(&sigma).and_then(|ms| m.sub(&ms));
        let p = self.base.bracket().map(|p| (*p).clone()).unwrap_or_else(|| GradedMap::zero(space.clone(), 2, 1));
        let rhs = HSeries::monomial(p, 1, order);
        QuantReport {
            title: format!("semiclassical limit of {}", self.base.name()),
            checks: vec![self.check("m - m∘σ = h p", lhs, Ok(rhs))],
        }
    }

    /// Reduction modulo `h` is the classical structure, and `ε`, `η` are not
    /// deformed at all.
    pub fn classical_limit_check(&self) -> QuantReport {
        let cl = HopfOps::classical(&self.base, self.order);
        let mut checks = Vec::new();
        for ((name, q), (_, c)) in self.ops.named().iter().zip(cl.named().iter()) {
            let (q, c) = if matches!(*name, "ε" | "η") { ((*q).clone(), (*c).clone()) } else { (q.truncate(0), c.truncate(0)) };
            let label = if matches!(*name, "ε" | "η") { format!("{name} undeformed") } else { format!("{name} mod h") };
            checks.push(self.check(&label, Ok(q), Ok(c)));
        }
        QuantReport { title: format!("classical limit of {}", self.base.name()), checks }
    }

    /// Whether nothing is deformed beyond order zero.
    pub fn is_trivial(&self) -> bool {
        self.ops.named().iter().all(|(_, s)| s.coeffs()[1..].iter().all(|c| c.is_zero()))
    }

    pub fn full_report(&self) -> QuantReport {
        let r = self.verify().merge(self.semiclassical_check()).merge(self.classical_limit_check());
        QuantReport { title: r.title.clone(), checks: r.checks }
    }

    pub fn to_json(&self) -> QuantizedJson {
        let enc = |s: &Series| s.coeffs().iter().map(|c| c.to_json()).collect();
        QuantizedJson {
            schema: "nerveq.quantized/1".into(),
            algebra: self.base.name().into(),
            order: self.order,
            associator: self.phi.table().into_iter().collect(),
            m: enc(&self.ops.m),
            delta: enc(&self.ops.delta),
            antipode: enc(&self.ops.s),
            report: self.full_report(),
        }
    }
}

/// Output file of a quantization run; series are lists of coefficients.
#[derive(Serialize)]
pub struct QuantizedJson {
    pub schema: String,
    pub algebra: String,
    pub order: usize,
    pub associator: Vec<(String, Rational)>,
    pub m: Vec<GradedMapJson>,
    pub delta: Vec<GradedMapJson>,
    pub antipode: Vec<GradedMapJson>,
    pub report: QuantReport,
}

fn pair_series(h: &HopfAlgebra, n2: usize, a: &Series, b: &Series) -> Result<Series> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::TruncationMismatch(format!("orders {n} and {}", b.order())));
    }
    let mut out = Vec::new();
    for k in 0..=n {
        let mut acc = pair_map(h.space(), n2, &a.coeffs()[0], &b.coeffs()[k]);
        for i in 1..=k {
            acc = acc.add(&pair_map(h.space(), n2, &a.coeffs()[i], &b.coeffs()[k - i]))?;
        }
        out.push(acc);
    }
    HSeries::from_coeffs(out)
}

/// Quantization commutes with tensor products: compares the quantization of
/// `h1 ⊗ h2` with the tensor product of the separate quantizations.
pub fn tensor_compat_check(h1: Arc<HopfAlgebra>, h2: Arc<HopfAlgebra>, phi: &AssocSeries, order: usize) -> Result<QuantReport> {
    let n2 = h2.dim();
    let joint = Arc::new(HopfAlgebra::tensor(&h1, &h2)?);
    let q = quantize(joint.clone(), phi, order)?;
    let q1 = quantize(h1, phi, order)?;
    let q2 = quantize(h2, phi, order)?;
    let mut checks = Vec::new();
    for (((name, a), (_, b)), (_, c)) in q.ops.named().iter().zip(q1.ops.named().iter()).zip(q2.ops.named().iter()) {
        let rhs = pair_series(&joint, n2, b, c);
        checks.push(q.check(&format!("{name} of the tensor product"), Ok((*a).clone()), rhs));
    }
    Ok(QuantReport { title: format!("tensor compatibility for {}", joint.name()), checks })
}

/// The associator with its degree-two part removed.
pub fn corrupted_associator(phi: &AssocSeries) -> Result<AssocSeries> {
    let poly = phi.poly();
    AssocSeries::from_poly(poly.sub(&poly.degree_part(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::solve_associator;
    use crate::hopf_backend::FiniteGroup;

    fn xy(d: u32) -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::sym_trunc(&["X".into(), "Y".into()], &[(0, 1, 1, Rational::one())], d).unwrap())
    }

    #[test]
    fn function_algebra_is_rigid() {
        let h = Arc::new(HopfAlgebra::fun_group(&FiniteGroup::symmetric(3)).unwrap());
        let q = quantize(h, &solve_associator(2).unwrap(), 2).unwrap();
        assert!(q.is_trivial());
        assert!(q.full_report().ok(), "{}", q.full_report());
    }

    #[test]
    fn small_lie_algebra_quantizes() {
        let q = quantize(xy(3), &solve_associator(2).unwrap(), 2).unwrap();
        let r = q.full_report();
        assert!(r.ok(), "{r}");
        assert!(!q.is_trivial());
    }

    #[test]
    fn trivial_associator_breaks_associativity() {
        let phi = solve_associator(2).unwrap();
        let bad = corrupted_associator(&phi).unwrap();
        assert!(bad == AssocSeries::one(2));
        let q = quantize(xy(3), &bad, 2).unwrap();
        let r = q.verify();
        let a = r.get("associativity").unwrap();
        assert!(!a.ok);
        assert!(a.first_failure.as_deref().unwrap().starts_with("h^2"), "{r}");
        assert_eq!(r.checks.iter().filter(|c| !c.ok).count(), 1);
    }
}
