use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chords::dk::word_text;
use crate::chords::{ICMorphism, ICMorphismSeries};
use crate::dsl::parser::{parse_morphism, Expr, Node};
use crate::error::{Error, Result, Span};
use crate::exactalg::{HSeries, Rational};
use crate::props::{BrMorphism, FinMap};

pub const MORPHISM_SCHEMA: &str = "nerveq.morphism/1";

/// Result of evaluating a morphism expression.
#[derive(Clone, PartialEq)]
pub enum Value {
    Map(FinMap),
    Braid(BrMorphism),
    /// `h`-series of maps with chords; a term at `h^k` with a word of
    /// length `d` carries an extra scalar `h^(k-d)`.
    Linear(ICMorphismSeries),
}

fn type_err(span: Span, msg: &str) -> Error {
    Error::Type { span, msg: msg.into() }
}

fn linear_of_map(f: &FinMap, order: usize) -> ICMorphismSeries {
    ICMorphism::from_map(f, order).to_series(order)
}

/// Cauchy tensor product of two series.
pub fn series_tensor_ic(a: &ICMorphismSeries, b: &ICMorphismSeries) -> Result<ICMorphismSeries> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::TruncationMismatch(format!("orders {n} and {}", b.order())));
    }
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = a.coeffs()[0].tensor(&b.coeffs()[k]);
        for i in 1..=k {
            acc = acc.add(&a.coeffs()[i].tensor(&b.coeffs()[k - i]))?;
        }
        out.push(acc);
    }
    HSeries::from_coeffs(out)
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Map(_) => "map",
            Value::Braid(_) => "braid",
            Value::Linear(_) => "linear",
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        match self {
            Value::Map(f) => (f.source(), f.target()),
            Value::Braid(b) => (b.source(), b.target()),
            Value::Linear(s) => (s.coeffs()[0].source(), s.coeffs()[0].target()),
        }
    }

    pub fn to_linear(&self, order: usize, span: Span) -> Result<ICMorphismSeries> {
        match self {
            Value::Map(f) => Ok(linear_of_map(f, order)),
            Value::Linear(s) => Ok(s.clone()),
            Value::Braid(_) => Err(type_err(span, "braided morphisms have no linear structure; transport them first")),
        }
    }

    fn compose_at(&self, other: &Value, order: usize, [sp, sa, sb]: [Span; 3]) -> Result<Value> {
        Ok(match (self, other) {
            (Value::Map(f), Value::Map(g)) => Value::Map(f.compose(g).map_err(|e| type_err(sp, &e.to_string()))?),
            (Value::Braid(_), _) | (_, Value::Braid(_)) => {
                let (x, y) = (braid_of(self, sa)?, braid_of(other, sb)?);
                Value::Braid(x.compose(&y).map_err(|e| type_err(sp, &e.to_string()))?)
            }
            _ => Value::Linear(self.to_linear(order, sa)?.mul(&other.to_linear(order, sb)?)?),
        })
    }

    fn tensor_at(&self, other: &Value, order: usize, [sa, sb]: [Span; 2]) -> Result<Value> {
        Ok(match (self, other) {
            (Value::Map(f), Value::Map(g)) => Value::Map(f.tensor(g)),
            (Value::Braid(_), _) | (_, Value::Braid(_)) => Value::Braid(braid_of(self, sa)?.tensor(&braid_of(other, sb)?)),
            _ => Value::Linear(series_tensor_ic(&self.to_linear(order, sa)?, &other.to_linear(order, sb)?)?),
        })
    }

    /// `self ∘ other`; linear values are truncated at `order`.
    pub fn compose(&self, other: &Value, order: usize) -> Result<Value> {
        self.compose_at(other, order, [Span::default(); 3])
    }

    pub fn tensor(&self, other: &Value, order: usize) -> Result<Value> {
        self.tensor_at(other, order, [Span::default(); 2])
    }

    /// Braid, normal form of chords, or the map itself.
    pub fn normalize(&self) -> Value {
        match self {
            Value::Map(f) => Value::Map(f.clone()),
            Value::Braid(b) => Value::Braid(b.normalize()),
            Value::Linear(s) => Value::Linear(s.map(|c| c.strong_comm_reduce())),
        }
    }

    pub fn to_json(&self) -> MorphismJson {
        let (source, target) = self.arity();
        MorphismJson {
            schema: MORPHISM_SCHEMA.into(),
            kind: self.kind().into(),
            source,
            target,
            order: match self {
                Value::Linear(s) => Some(s.order()),
                _ => None,
            },
            text: self.to_string(),
        }
    }

    pub fn from_json(j: &MorphismJson) -> Result<Value> {
        if j.schema != MORPHISM_SCHEMA {
            return Err(Error::Parse(format!("schema: expected {MORPHISM_SCHEMA}, found {}", j.schema)));
        }
        let v = eval(&parse_morphism(&j.text)?, j.order.unwrap_or(0))?;
        let v = match (j.kind.as_str(), v) {
            ("linear", Value::Map(f)) => Value::Linear(linear_of_map(&f, j.order.unwrap_or(0))),
            (_, v) => v,
        };
        if v.kind() != j.kind {
            return Err(Error::Parse(format!("kind: expected {}, text gives {}", j.kind, v.kind())));
        }
        if v.arity() != (j.source, j.target) {
            return Err(Error::Parse("source/target: do not match the text".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub schema: String,
    pub kind: String,
    pub source: usize,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub text: String,
}

fn linear_text(s: &ICMorphismSeries) -> String {
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        let mut items: Vec<_> = c.terms().iter().collect();
        items.sort_by(|a, b| a.0 .1.len().cmp(&b.0 .1.len()).then(a.0.cmp(b.0)));
        for ((f, w), x) in items {
            if out.is_empty() {
                if x.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if x.is_negative() { " - " } else { " + " });
            }
            let a = x.abs();
            if !a.is_one() {
                out.push_str(&format!("{a} "));
            }
            match k - w.len() {
                0 => {}
                1 => out.push_str("h "),
                e => out.push_str(&format!("h^{e} ")),
            }
            out.push_str(&f.to_string());
            if !w.is_empty() {
                out.push_str(&format!(" * ({})", word_text(w)));
            }
        }
    }
    if out.is_empty() {
        let c = &s.coeffs()[0];
        let img = if c.target() == 0 { String::new() } else { vec!["1"; c.source()].join(",") };
        out = format!("0 map({}->{})[{img}]", c.source(), c.target());
    }
    out
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Map(m) => write!(f, "{m}"),
            Value::Braid(b) => write!(f, "{b}"),
            Value::Linear(s) => write!(f, "{}", linear_text(s)),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn braid_of(v: &Value, span: Span) -> Result<BrMorphism> {
    match v {
        Value::Braid(b) => Ok(b.clone()),
        Value::Map(f) => BrMorphism::from_monotone(f).map_err(|_| type_err(span, "only monotone maps mix with braids")),
        Value::Linear(_) => Err(type_err(span, "linear combinations do not mix with braids")),
    }
}

/// Evaluate a parsed expression; linear values are truncated modulo `h^{order+1}`.
pub fn eval(node: &Node, order: usize) -> Result<Value> {
    let sp = node.span;
    Ok(match &node.expr {
        Expr::MapLit(f) => Value::Map(f.clone()),
        Expr::BraidLit(b) => Value::Braid(b.clone()),
        Expr::ChordLit { base, word } => {
            let b = eval(base, order)?.to_linear(order, base.span)?;
            let src = b.coeffs()[0].source();
            for ((_, j), span) in word {
                if *j as usize >= src {
                    return Err(type_err(*span, "chord outside the source strands"));
                }
            }
            let w: Vec<_> = word.iter().map(|(c, _)| *c).collect();
            let ch = ICMorphism::from_word(&FinMap::identity(src), &w, Rational::one(), order)?.to_series(order);
            Value::Linear(b.mul(&ch)?)
        }
        Expr::Compose(a, b) => eval(a, order)?.compose_at(&eval(b, order)?, order, [sp, a.span, b.span])?,
        Expr::Tensor(a, b) => eval(a, order)?.tensor_at(&eval(b, order)?, order, [a.span, b.span])?,
        Expr::Scale(c, a) => Value::Linear(eval(a, order)?.to_linear(order, a.span)?.scale(c)),
        Expr::HScale(k, a) => Value::Linear(eval(a, order)?.to_linear(order, a.span)?.shift(*k)),
        Expr::Sum(a, b) => {
            let x = eval(a, order)?.to_linear(order, a.span)?;
            Value::Linear(x.add(&eval(b, order)?.to_linear(order, b.span)?)?)
        }
    })
}

/// Parse, check and evaluate.
pub fn eval_str(src: &str, order: usize) -> Result<Value> {
    eval(&parse_morphism(src)?, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::BraidWord;

    #[test]
    fn braid_square() {
        let v = eval_str("braid(2){s1}[1,2] ∘ braid(2){s1}[1,2]", 2).unwrap();
        let b = BrMorphism::new(BraidWord::new(2, vec![1, 1]).unwrap(), 2, vec![0, 1]).unwrap();
        assert_eq!(v, Value::Braid(b));
        assert_eq!(v.to_string(), "braid(2){s1 s1}[1,2]");
    }

    #[test]
    fn chords_and_strong_commutativity() {
        let v = eval_str("map(3->2)[1,1,2] * (t12)", 2).unwrap();
        assert!(matches!(&v, Value::Linear(s) if s.is_zero()));
        let v = eval_str("map(3->2)[1,2,2] * (t12)", 2).unwrap();
        assert_eq!(v.to_string(), "map(3->2)[1,2,2] * (t12)");
        let v = eval_str("map(2->1)[1,1] ∘ (map(2->2)[1,2] * (t12))", 2).unwrap();
        assert!(matches!(&v, Value::Linear(s) if s.is_zero()));
        let w = eval_str("map(2->2)[1,2] * ()", 2).unwrap();
        assert_eq!(w, Value::Linear(linear_of_map(&FinMap::identity(2), 2)));
    }

    #[test]
    fn mixing_rules() {
        let v = eval_str("map(2->1)[1,1] ∘ braid(2){s1}[1,2]", 0).unwrap();
        assert_eq!(v.kind(), "braid");
        assert!(matches!(eval_str("map(2->2)[2,1] ∘ braid(2){s1}[1,2]", 0), Err(Error::Type { .. })));
        assert!(matches!(eval_str("2 braid(2){s1}[1,2]", 0), Err(Error::Type { .. })));
        let v = eval_str("map(2->2)[2,1] + map(2->2)[1,2]", 1).unwrap();
        assert_eq!(v.to_string(), "map(2->2)[1,2] + map(2->2)[2,1]");
    }

    #[test]
    fn h_powers_and_truncation() {
        let v = eval_str("1/2 h map(2->2)[1,2] * (t12) - h^2 map(2->2)[2,1]", 2).unwrap();
        assert_eq!(v.to_string(), "-h^2 map(2->2)[2,1] + 1/2 h map(2->2)[1,2] * (t12)");
        let w = eval_str(&v.to_string(), 2).unwrap();
        assert_eq!(v, w);
        let z = eval_str("h^3 map(1->1)[1]", 2).unwrap();
        assert_eq!(z.to_string(), "0 map(1->1)[1]");
        assert_eq!(eval_str(&z.to_string(), 2).unwrap(), z);
    }

    #[test]
    fn json_round_trip() {
        for src in ["map(3->2)[1,2,2]", "braid(3->4){s2' s1}[1,2,4]", "map(2->2)[1,2] * (t12) + 1/3 map(2->2)[2,1]"] {
            let v = eval_str(src, 2).unwrap();
            let j = v.to_json();
            let text = serde_json::to_string(&j).unwrap();
            let back: MorphismJson = serde_json::from_str(&text).unwrap();
            assert_eq!(Value::from_json(&back).unwrap(), v, "{src}");
        }
    }
}
