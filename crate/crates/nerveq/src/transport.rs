//! The functor from braided morphisms to `h`-series of maps with chords:
//! crossings become `σ exp(±h t/2)`, rebracketings become the associator.

use std::fmt;

use serde::Serialize;

use crate::associator::AssocSeries;
use crate::chords::{DKElement, ICMorphism, ICMorphismSeries};
use crate::error::{Error, Result};
use crate::exactalg::rational::inv_factorial;
use crate::exactalg::{Rational, TruncAlgebra};
use crate::props::pa::{pa_decompose_from, rebracket_path, PaMove, Rebracket, Tree};
use crate::props::{BraidWord, BrMorphism, FinMap};

fn exp_dk(e: &DKElement) -> DKElement {
    let mut acc = e.one_like();
    let mut pw = e.one_like();
    for k in 1..=e.cap() {
        pw = pw.mul(e);
        acc = acc.add(&pw.scale(&inv_factorial(k as u64)));
    }
    acc
}

fn block_t(n: usize, cap: usize, a: std::ops::Range<usize>, b: std::ops::Range<usize>) -> DKElement {
    DKElement::block_sum(n, cap, a, b)
}

/// Image of a crossing of positions `pos, pos + 1` among `n` strands.
pub fn crossing_image(n: usize, pos: usize, sign: i8, order: usize) -> ICMorphism {
    let t = block_t(n, order, pos..pos + 1, pos + 1..pos + 2);
    let e = exp_dk(&t.scale(&Rational::new(sign as i64, 2)));
    ICMorphism::from_map(&FinMap::transposition(n, pos), order).compose(&ICMorphism::from_chords(&e)).unwrap()
}

/// Image of an associator move among `n` strands.
pub fn rebracket_image(n: usize, r: &Rebracket, phi: &AssocSeries, order: usize) -> Result<ICMorphism> {
    let s = r.start;
    let x = block_t(n, order, s..s + r.a, s + r.a..s + r.a + r.b);
    let y = block_t(n, order, s + r.a..s + r.a + r.b, s + r.a + r.b..s + r.a + r.b + r.c);
    let phi = phi.with_cap(order);
    let phi = if r.forward { phi } else { phi.inverse() };
    Ok(ICMorphism::from_chords(&phi.substitute(&x, &y)?))
}

/// Composite of the associator moves turning `from` into `to`.
pub fn rebracketing(from: &Tree, to: &Tree, phi: &AssocSeries, order: usize) -> Result<ICMorphism> {
    let n = from.leaves();
    let mut acc = ICMorphism::identity(n, order);
    for r in rebracket_path(from, to)? {
        acc = rebracket_image(n, &r, phi, order)?.compose(&acc)?;
    }
    Ok(acc)
}

fn check_order(phi: &AssocSeries, order: usize) -> Result<()> {
    if phi.cap() < order {
        return Err(Error::TruncationMismatch(format!(
            "associator known to degree {} but order {order} requested",
            phi.cap()
        )));
    }
    Ok(())
}

/// `U_Φ(φ)` with source and target left-nested, as a single morphism whose
/// chord degree is the power of `h`.
pub fn u_phi_morphism(phi_br: &BrMorphism, phi: &AssocSeries, order: usize) -> Result<ICMorphism> {
    u_phi_from(Tree::left_nested(phi_br.source()), phi_br, phi, order)
}

/// As [`u_phi_morphism`] starting from an arbitrary parenthesization of the
/// source; the target is left-nested.
pub fn u_phi_from(start: Option<Tree>, phi_br: &BrMorphism, phi: &AssocSeries, order: usize) -> Result<ICMorphism> {
    check_order(phi, order)?;
    let mut acc = ICMorphism::identity(phi_br.source(), order);
    for step in pa_decompose_from(start, phi_br)? {
        let n = step.leaves_before();
        let m = match step.mv {
            PaMove::Crossing { pos, sign } => crossing_image(n, pos, sign, order),
            PaMove::Rebracket(r) => rebracket_image(n, &r, phi, order)?,
            PaMove::Merge { pos } => ICMorphism::from_map(&FinMap::merge_at(n, pos), order),
            PaMove::UnitInsert { pos } => ICMorphism::from_map(&FinMap::unit_at(n, pos), order),
        };
        acc = m.compose(&acc)?;
    }
    Ok(acc)
}

/// `U_Φ(φ)` as an `h`-series of order `order`.
pub fn u_phi(phi_br: &BrMorphism, phi: &AssocSeries, order: usize) -> Result<ICMorphismSeries> {
    Ok(u_phi_morphism(phi_br, phi, order)?.to_series(order))
}

/// Text form of a series, one line per power of `h`.
pub fn series_text(s: &ICMorphismSeries) -> String {
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.push_str(&format!("h^{k}: {c}\n"));
        }
    }
    if out.is_empty() {
        out.push_str("0\n");
    }
    out
}

/// One braid relation and the lowest degree where its two sides differ.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub strands: usize,
    pub lhs: String,
    pub rhs: String,
    pub failing_degree: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidReport {
    pub order: usize,
    pub checks: Vec<RelationCheck>,
}

impl BraidReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.failing_degree.is_none())
    }
}

impl fmt::Display for BraidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match c.failing_degree {
                None => "ok".to_string(),
                Some(d) => format!("FAIL in degree {d}"),
            };
            writeln!(f, "{} strands: {} = {}: {status}", c.strands, c.lhs, c.rhs)?;
        }
        Ok(())
    }
}

fn first_difference(a: &ICMorphism, b: &ICMorphism) -> Result<Option<usize>> {
    let d = a.sub(b)?;
    Ok(d.terms().keys().map(|k| k.1.len()).min())
}

/// Braid and far-commutativity relations in the image of `U_Φ`, on up to
/// `max_strands` strands.
pub fn check_braid_relations(phi: &AssocSeries, order: usize, max_strands: usize) -> Result<BraidReport> {
    let mut checks = Vec::new();
    for n in 2..=max_strands {
        let word = |l: Vec<i32>| BrMorphism::new(BraidWord::new(n, l).unwrap(), n, (0..n).collect()).unwrap();
        for i in 1..n as i32 {
            for j in i + 1..n as i32 {
                let (l, r) = if j == i + 1 { (vec![i, j, i], vec![j, i, j]) } else { (vec![i, j], vec![j, i]) };
                let (lw, rw) = (word(l), word(r));
                let a = u_phi_morphism(&lw, phi, order)?;
                let b = u_phi_morphism(&rw, phi, order)?;
                checks.push(RelationCheck {
                    strands: n,
                    lhs: lw.braid().to_string(),
                    rhs: rw.braid().to_string(),
                    failing_degree: first_difference(&a, &b)?,
                });
            }
        }
    }
    Ok(BraidReport { order, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::solve_associator;

    fn br(n: usize, l: &[i32], t: usize, a: &[usize]) -> BrMorphism {
        BrMorphism::new(BraidWord::new(n, l.to_vec()).unwrap(), t, a.to_vec()).unwrap()
    }

    #[test]
    fn single_crossing_expands_exponential() {
        let phi = AssocSeries::standard_degree_two(2);
        let s = u_phi(&br(2, &[1], 2, &[0, 1]), &phi, 2).unwrap();
        assert_eq!(
            series_text(&s),
            "h^0: map(2->2)[2,1]\nh^1: 1/2 map(2->2)[2,1] * (t12)\nh^2: 1/8 map(2->2)[2,1] * (t12 t12)\n"
        );
    }

    #[test]
    fn identity_maps_to_identity() {
        let phi = AssocSeries::standard_degree_two(2);
        let u = u_phi_morphism(&BrMorphism::identity(3), &phi, 2).unwrap();
        assert_eq!(u, ICMorphism::identity(3, 2));
    }

    #[test]
    fn classical_part_is_underlying_map() {
        let phi = AssocSeries::standard_degree_two(2);
        let f = br(4, &[2, -3, 1], 3, &[0, 0, 1, 2]);
        let u = u_phi_morphism(&f, &phi, 2).unwrap();
        assert_eq!(u.classical_part(), vec![(f.underlying(), Rational::one())]);
    }

    #[test]
    fn yang_baxter_needs_the_associator() {
        let good = check_braid_relations(&AssocSeries::standard_degree_two(2), 2, 3).unwrap();
        assert!(good.ok(), "{good}");
        let bad = check_braid_relations(&AssocSeries::one(2), 2, 3).unwrap();
        assert_eq!(bad.checks[0].failing_degree, Some(2));
    }

    #[test]
    fn braid_relations_on_four_strands() {
        let phi = solve_associator(3).unwrap();
        let r = check_braid_relations(&phi, 3, 4).unwrap();
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn merge_absorbs_crossing() {
        let phi = AssocSeries::standard_degree_two(3);
        let a = u_phi_morphism(&br(2, &[1], 1, &[0, 0]), &phi, 3).unwrap();
        let b = u_phi_morphism(&br(2, &[], 1, &[0, 0]), &phi, 3).unwrap();
        assert_eq!(a, b);
    }
}
