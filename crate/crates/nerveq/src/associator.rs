//! Truncated Drinfeld associators in two noncommuting variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chords::{ChordWord, DKElement, ICMorphism};
use crate::error::{Error, Result};
use crate::exactalg::linalg::solve;
use crate::exactalg::ncpoly::{fmt_linear, lie_coordinates, lyndon_bracket, lyndon_bracket_text, lyndon_words};
use crate::exactalg::{NCPoly, Rational, TruncAlgebra};
use crate::props::FinMap;

const XY: [&str; 2] = ["x", "y"];

/// Largest degree the solver accepts unless asked otherwise.
pub const DEFAULT_MAX_DEGREE: usize = 4;

/// `Φ(x, y)` with constant term 1, truncated above `cap`.
#[derive(Clone, PartialEq, Eq)]
pub struct AssocSeries {
    poly: NCPoly,
}

#[derive(Serialize, Deserialize)]
struct AssocJson {
    schema: String,
    degree_cap: usize,
    terms: Vec<(String, Rational)>,
}

const SCHEMA: &str = "nerveq.associator/1";

impl AssocSeries {
    pub fn one(cap: usize) -> Self {
        AssocSeries { poly: NCPoly::one(&XY, cap) }
    }

    pub fn from_poly(poly: NCPoly) -> Result<Self> {
        if poly.letters() != ["x", "y"] {
            return Err(Error::InvalidMorphism("associator must be a series in x, y".into()));
        }
        if !poly.constant_term().is_one() {
            return Err(Error::InvalidMorphism("associator must have constant term 1".into()));
        }
        Ok(AssocSeries { poly })
    }

    /// `exp` of a Lie series.
    pub fn from_lie(psi: &NCPoly) -> Result<Self> {
        Self::from_poly(psi.exp()?)
    }

    /// `1 + [x,y]/24`.
    pub fn standard_degree_two(cap: usize) -> Self {
        let b = lyndon_bracket(&[0, 1], &XY, cap).scale(&Rational::new(1, 24));
        AssocSeries { poly: NCPoly::one(&XY, cap).add(&b) }
    }

    pub fn cap(&self) -> usize {
        self.poly.cap()
    }

    pub fn poly(&self) -> &NCPoly {
        &self.poly
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        AssocSeries { poly: self.poly.with_cap(cap) }
    }

    pub fn inverse(&self) -> Self {
        AssocSeries { poly: self.poly.inverse().unwrap() }
    }

    /// `Φ(a, b)` in any truncated algebra.
    pub fn substitute<A: TruncAlgebra>(&self, a: &A, b: &A) -> Result<A> {
        self.poly.substitute(&[a.clone(), b.clone()])
    }

    pub fn is_grouplike(&self) -> bool {
        self.poly.is_grouplike()
    }

    /// Coordinates of `log Φ` in the Lyndon bracket basis, per degree.
    pub fn lie_table(&self) -> Result<Vec<(String, Rational)>> {
        let psi = self.poly.log()?;
        let mut out = Vec::new();
        for d in 1..=self.cap() {
            let coords = lie_coordinates(&psi, d)
                .ok_or_else(|| Error::InvalidMorphism(format!("log of associator is not Lie in degree {d}")))?;
            for (w, c) in coords {
                out.push((lyndon_bracket_text(&w, &XY), c));
            }
        }
        Ok(out)
    }

    /// `Φ` as `1` plus Lie brackets, when `Φ - 1` is a Lie element.
    pub fn bracket_text(&self) -> Option<String> {
        let rest = self.poly.sub(&NCPoly::one(&XY, self.cap()));
        let mut items = vec![(String::new(), Rational::one())];
        for d in 1..=self.cap() {
            for (w, c) in lie_coordinates(&rest, d)? {
                items.push((lyndon_bracket_text(&w, &XY), c));
            }
        }
        Some(Linear(items).to_string())
    }

    /// `log Φ` in the Lyndon bracket basis.
    pub fn log_text(&self) -> Result<String> {
        Ok(Linear(self.lie_table()?).to_string())
    }

    /// Coefficient table `(word, rational)` in degree-then-lexicographic order.
    pub fn table(&self) -> Vec<(String, Rational)> {
        let mut items: Vec<(&Vec<u8>, &Rational)> = self.poly.terms().iter().collect();
        items.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        items
            .into_iter()
            .map(|(w, c)| {
                let s: String = w.iter().map(|&l| XY[l as usize]).collect();
                (if s.is_empty() { "1".to_string() } else { s }, c.clone())
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(AssocJson { schema: SCHEMA.into(), degree_cap: self.cap(), terms: self.table() }).unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: AssocJson = serde_json::from_value(v.clone())?;
        if j.schema != SCHEMA {
            return Err(Error::Parse(format!("expected schema {SCHEMA}, got {}", j.schema)));
        }
        let mut terms = Vec::new();
        for (w, c) in j.terms {
            let word: Vec<u8> = if w == "1" {
                vec![]
            } else {
                w.chars()
                    .map(|ch| match ch {
                        'x' => Ok(0),
                        'y' => Ok(1),
                        _ => Err(Error::Parse(format!("bad associator word {w}"))),
                    })
                    .collect::<Result<_>>()?
            };
            terms.push((word, c));
        }
        Self::from_poly(NCPoly::from_terms(&XY, j.degree_cap, terms))
    }
}

struct Linear(Vec<(String, Rational)>);

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_linear(f, self.0.iter().filter(|(_, c)| !c.is_zero()).map(|(l, c)| (l.clone(), c)))
    }
}

impl fmt::Display for AssocSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}

impl fmt::Debug for AssocSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}

fn t(n: usize, cap: usize, pairs: &[(usize, usize)]) -> DKElement {
    let mut e = DKElement::zero(n, cap);
    for &(i, j) in pairs {
        e = e.add(&DKElement::gen(n, cap, i, j).unwrap());
    }
    e
}

/// Pentagon defect
/// `Φ(t12, t23+t24) Φ(t13+t23, t34) - Φ(t23, t34) Φ(t12+t13, t24+t34) Φ(t12, t23)`
/// in `U(t_4)`, strands 0-based.
pub fn pentagon_residual(phi: &AssocSeries) -> Result<DKElement> {
    let c = phi.cap();
    let f = |a: &[(usize, usize)], b: &[(usize, usize)]| phi.substitute(&t(4, c, a), &t(4, c, b));
    let lhs = f(&[(0, 1)], &[(1, 2), (1, 3)])?.mul(&f(&[(0, 2), (1, 2)], &[(2, 3)])?);
    let rhs = f(&[(1, 2)], &[(2, 3)])?.mul(&f(&[(0, 1), (0, 2)], &[(1, 3), (2, 3)])?).mul(&f(&[(0, 1)], &[(1, 2)])?);
    Ok(lhs.sub(&rhs))
}

fn exp_dk(e: &DKElement) -> DKElement {
    let mut acc = e.one_like();
    let mut pw = e.one_like();
    for k in 1..=e.cap() {
        pw = pw.mul(e);
        acc = acc.add(&pw.scale(&crate::exactalg::rational::inv_factorial(k as u64)));
    }
    acc
}

/// Braiding `X ⊗ Y → Y ⊗ X` for blocks of sizes `a`, `b`:
/// the block swap after `exp(sign · t_{X,Y} / 2)`.
pub fn block_braiding(a: usize, b: usize, sign: i64, cap: usize) -> ICMorphism {
    let n = a + b;
    let mut pairs = Vec::new();
    for i in 0..a {
        for j in a..n {
            pairs.push((i, j));
        }
    }
    let e = exp_dk(&t(n, cap, &pairs).scale(&Rational::new(sign, 2)));
    let img: Vec<usize> = (0..n).map(|i| if i < a { i + b } else { i - a }).collect();
    let swap = ICMorphism::from_map(&FinMap::new(n, n, img).unwrap(), cap);
    swap.compose(&ICMorphism::from_chords(&e)).unwrap()
}

/// Associativity constraint on three consecutive single strands.
fn assoc3(phi: &AssocSeries) -> ICMorphism {
    let c = phi.cap();
    ICMorphism::from_chords(&phi.substitute(&t(3, c, &[(0, 1)]), &t(3, c, &[(1, 2)])).unwrap())
}

fn hexagon(phi: &AssocSeries, sign: i64) -> Result<DKElement> {
    let c = phi.cap();
    let a = assoc3(phi);
    let id1 = ICMorphism::identity(1, c);
    // a_{Y,Z,X} ∘ β_{X,YZ} ∘ a_{X,Y,Z}
    let lhs = a.compose(&block_braiding(1, 2, sign, c))?.compose(&a)?;
    // (id ⊗ β_{X,Z}) ∘ a_{Y,X,Z} ∘ (β_{X,Y} ⊗ id)
    let rhs = id1
        .tensor(&block_braiding(1, 1, sign, c))
        .compose(&a)?
        .compose(&block_braiding(1, 1, sign, c).tensor(&id1))?;
    let diff = lhs.sub(&rhs)?;
    // strip the common permutation: strand 0 ends last
    let sigma = FinMap::new(3, 3, vec![2, 0, 1]).unwrap();
    let mut e = DKElement::zero(3, c);
    for ((f, w), x) in diff.terms() {
        if *f != sigma {
            return Err(Error::InvalidMorphism(format!("unexpected permutation {f} in hexagon")));
        }
        e = e.add(&DKElement::from_word(3, c, w, x.clone()));
    }
    Ok(e)
}

/// Hexagon defects for the braiding `σ exp(t/2)` and for the inverse
/// braiding `σ exp(-t/2)`, as elements of `U(t_3)`.
pub fn hexagon_residuals(phi: &AssocSeries) -> Result<(DKElement, DKElement)> {
    Ok((hexagon(phi, 1)?, hexagon(phi, -1)?))
}

/// Stacked degree-`d` parts of all three residuals.
fn residual_vector(phi: &AssocSeries, d: usize) -> Result<BTreeMap<(u8, ChordWord), Rational>> {
    let mut out = BTreeMap::new();
    let p = pentagon_residual(phi)?;
    let (h1, h2) = hexagon_residuals(phi)?;
    for (tag, e) in [(0u8, p), (1, h1), (2, h2)] {
        for (w, c) in e.degree_part(d).terms() {
            out.insert((tag, w.clone()), c.clone());
        }
    }
    Ok(out)
}

/// Solve for a grouplike associator through degree `cap`.
///
/// `log Φ` is built degree by degree in the Lyndon basis; at each degree the
/// residuals are affine in the new coefficients. Odd degrees are set to zero
/// whenever that is consistent, and remaining free coefficients are zero.
pub fn solve_associator(cap: usize) -> Result<AssocSeries> {
    solve_associator_bounded(cap, DEFAULT_MAX_DEGREE)
}

pub fn solve_associator_bounded(cap: usize, max_degree: usize) -> Result<AssocSeries> {
    if cap > max_degree {
        return Err(Error::OutOfRange(format!("associator degree {cap} exceeds maximum {max_degree}")));
    }
    let mut psi = NCPoly::zero(&XY, cap);
    for d in 1..=cap {
        let basis = lyndon_words(2, d);
        let elems: Vec<NCPoly> = basis.iter().map(|w| lyndon_bracket(w, &XY, cap)).collect();
        let at = |psi: &NCPoly| -> Result<BTreeMap<(u8, ChordWord), Rational>> {
            residual_vector(&AssocSeries::from_lie(psi)?.with_cap(d), d)
        };
        let base = at(&psi)?;
        if base.is_empty() && d % 2 == 1 {
            continue;
        }
        let mut cols = Vec::new();
        for e in &elems {
            let r = at(&psi.add(e))?;
            let mut col = BTreeMap::new();
            for k in r.keys().chain(base.keys()) {
                let v = r.get(k).cloned().unwrap_or_default() - base.get(k).cloned().unwrap_or_default();
                if !v.is_zero() {
                    col.insert(k.clone(), v);
                }
            }
            cols.push(col);
        }
        let mut keys: Vec<&(u8, ChordWord)> = base.keys().chain(cols.iter().flat_map(|c| c.keys())).collect();
        keys.sort();
        keys.dedup();
        let a: Vec<Vec<Rational>> =
            keys.iter().map(|k| cols.iter().map(|c| c.get(*k).cloned().unwrap_or_default()).collect()).collect();
        let b: Vec<Rational> = keys.iter().map(|k| -base.get(*k).cloned().unwrap_or_default()).collect();
        let sol = solve(&a, &b, elems.len()).ok_or(Error::Unsolvable(d))?;
        for (e, c) in elems.iter().zip(&sol.particular) {
            psi = psi.add(&e.scale(c));
        }
    }
    let phi = AssocSeries::from_lie(&psi)?;
    let report = check_associator(&phi)?;
    if !report.ok() {
        return Err(Error::AxiomFailure { axiom: "associator".into(), detail: report.to_string() });
    }
    Ok(phi)
}

/// Outcome of checking the associator equations.
#[derive(Clone, Debug, Serialize)]
pub struct AssocReport {
    pub cap: usize,
    pub grouplike: bool,
    /// Lowest degree where each residual is nonzero.
    pub pentagon: Option<usize>,
    pub hexagon: Option<usize>,
    pub hexagon_inverse: Option<usize>,
}

impl AssocReport {
    pub fn ok(&self) -> bool {
        self.grouplike && self.pentagon.is_none() && self.hexagon.is_none() && self.hexagon_inverse.is_none()
    }
}

impl fmt::Display for AssocReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |o: Option<usize>| match o {
            None => "ok".to_string(),
            Some(d) => format!("fails in degree {d}"),
        };
        writeln!(f, "degree cap: {}", self.cap)?;
        writeln!(f, "grouplike: {}", if self.grouplike { "ok" } else { "fails" })?;
        writeln!(f, "pentagon: {}", show(self.pentagon))?;
        writeln!(f, "hexagon: {}", show(self.hexagon))?;
        write!(f, "inverse hexagon: {}", show(self.hexagon_inverse))
    }
}

pub fn check_associator(phi: &AssocSeries) -> Result<AssocReport> {
    let (h1, h2) = hexagon_residuals(phi)?;
    Ok(AssocReport {
        cap: phi.cap(),
        grouplike: phi.is_grouplike(),
        pentagon: pentagon_residual(phi)?.valuation(),
        hexagon: h1.valuation(),
        hexagon_inverse: h2.valuation(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_two_is_one_twenty_fourth_of_bracket() {
        let phi = solve_associator(2).unwrap();
        assert_eq!(phi, AssocSeries::standard_degree_two(2));
        assert_eq!(phi.to_string(), "1 + 1/24 xy - 1/24 yx");
        assert_eq!(phi.bracket_text().as_deref(), Some("1 + 1/24 [x,y]"));
        assert_eq!(phi.log_text().unwrap(), "1/24 [x,y]");
    }

    #[test]
    fn degree_three_vanishes_in_even_gauge() {
        let phi = solve_associator(3).unwrap();
        assert!(phi.poly().degree_part(3).is_zero());
    }

    #[test]
    fn degree_four_solution_passes_all_checks() {
        let phi = solve_associator(4).unwrap();
        let r = check_associator(&phi).unwrap();
        assert!(r.ok(), "{r}");
        assert_eq!(phi.lie_table().unwrap()[0], ("[x,y]".to_string(), Rational::new(1, 24)));
    }

    #[test]
    fn trivial_associator_fails_in_degree_two() {
        let r = check_associator(&AssocSeries::one(2)).unwrap();
        assert_eq!(r.pentagon, None);
        assert_eq!(r.hexagon, Some(2));
        assert_eq!(r.hexagon_inverse, Some(2));
    }

    #[test]
    fn substitution_basics() {
        let phi = AssocSeries::standard_degree_two(2);
        let z = DKElement::zero(3, 2);
        assert_eq!(phi.substitute(&z, &z).unwrap(), DKElement::one(3, 2));
        let a = t(3, 2, &[(0, 1)]);
        let b = t(3, 2, &[(1, 2)]);
        let v = phi.substitute(&a, &b).unwrap();
        let expect = DKElement::one(3, 2).add(&a.commutator(&b).scale(&Rational::new(1, 24)));
        assert_eq!(v, expect);
    }

    #[test]
    fn grouplike_examples() {
        assert!(AssocSeries::one(3).is_grouplike());
        let x = NCPoly::gen(&XY, 3, 0);
        assert!(AssocSeries::from_lie(&x).unwrap().is_grouplike());
        let xy = NCPoly::gen(&XY, 3, 0).mul(&NCPoly::gen(&XY, 3, 1));
        assert!(!AssocSeries::from_poly(NCPoly::one(&XY, 3).add(&xy)).unwrap().is_grouplike());
    }

    #[test]
    fn json_round_trip() {
        let phi = AssocSeries::standard_degree_two(3);
        let back = AssocSeries::from_json(&phi.to_json()).unwrap();
        assert_eq!(back, phi);
    }
}
