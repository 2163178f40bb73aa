use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, Rational};
use crate::hopf_backend::engine::Program;
use crate::hopf_backend::HopfAlgebra;

/// Expression over the Hopf signature with wires typed by tensor powers of
/// the single object `H`.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagramTerm {
    Id(usize),
    Zero(usize, usize),
    M,
    Delta,
    Eta,
    Eps,
    S,
    SInv,
    /// Poisson bracket.
    P,
    /// Symmetry of `H ⊗ H`.
    Swap,
    /// Ambient infinitesimal braiding on `H ⊗ H`.
    T,
    /// `r + r^op + t`.
    Tau,
    /// Yetter–Drinfeld braiding and its inverse.
    Ydb,
    YdbInv,
    /// `a ∘ b`.
    Compose(Box<DiagramTerm>, Box<DiagramTerm>),
    Tensor(Box<DiagramTerm>, Box<DiagramTerm>),
    Scale(Rational, Box<DiagramTerm>),
    Sum(Box<DiagramTerm>, Box<DiagramTerm>),
}

pub use DiagramTerm::*;

pub fn id(n: usize) -> DiagramTerm {
    Id(n)
}

/// `a ∘ b`.
pub fn comp(a: DiagramTerm, b: DiagramTerm) -> DiagramTerm {
    Compose(Box::new(a), Box::new(b))
}

/// Composite of a chain, leftmost applied last.
pub fn chain(items: Vec<DiagramTerm>) -> DiagramTerm {
    let mut it = items.into_iter().rev();
    let first = it.next().expect("nonempty chain");
    it.fold(first, |acc, t| comp(t, acc))
}

pub fn tens(a: DiagramTerm, b: DiagramTerm) -> DiagramTerm {
    Tensor(Box::new(a), Box::new(b))
}

/// Tensor product of a row of terms.
pub fn row(items: Vec<DiagramTerm>) -> DiagramTerm {
    let mut it = items.into_iter();
    let first = it.next().expect("nonempty row");
    it.fold(first, tens)
}

pub fn sum(a: DiagramTerm, b: DiagramTerm) -> DiagramTerm {
    Sum(Box::new(a), Box::new(b))
}

pub fn scale(c: Rational, a: DiagramTerm) -> DiagramTerm {
    Scale(c, Box::new(a))
}

impl DiagramTerm {
    /// `(source, target)` tensor powers.
    pub fn arity(&self) -> Result<(usize, usize)> {
        Ok(match self {
            Id(n) => (*n, *n),
            Zero(a, b) => (*a, *b),
            M | P => (2, 1),
            Delta => (1, 2),
            Eta => (0, 1),
            Eps => (1, 0),
            S | SInv => (1, 1),
            Swap | T | Tau | Ydb | YdbInv => (2, 2),
            Compose(a, b) => {
                let (sa, ta) = a.arity()?;
                let (sb, tb) = b.arity()?;
                if tb != sa {
                    return Err(Error::ArityMismatch(format!("{a} has {sa} inputs but {b} has {tb} outputs")));
                }
                (sb, ta)
            }
            Tensor(a, b) => {
                let (sa, ta) = a.arity()?;
                let (sb, tb) = b.arity()?;
                (sa + sb, ta + tb)
            }
            Scale(_, a) => a.arity()?,
            Sum(a, b) => {
                let x = a.arity()?;
                if b.arity()? != x {
                    return Err(Error::ArityMismatch(format!("summands {a} and {b} differ in arity")));
                }
                x
            }
        })
    }

    /// Compile to a vector-level program over `h`.
    pub fn compile(&self, h: &HopfAlgebra) -> Result<Program> {
        let block = |n: usize, map: Arc<GradedMap>| Program::identity(n).block(0, map);
        Ok(match self {
            Id(n) => Program::identity(*n),
            Zero(a, b) => {
                // ε on every input then η on every output, scaled away
                let mut p = Program::identity(*a);
                for _ in 0..*a {
                    p = p.block(0, h.eps())?;
                }
                for _ in 0..*b {
                    p = p.block(0, h.eta())?;
                }
                Program::linear(vec![(Rational::zero(), p)])?
            }
            M => block(2, h.m())?,
            Delta => block(1, h.delta())?,
            Eta => block(0, h.eta())?,
            Eps => block(1, h.eps())?,
            S => block(1, h.antipode())?,
            SInv => block(1, h.antipode_inverse()?)?,
            P => block(2, h.bracket().ok_or_else(|| Error::InvalidPresentation(format!("{} has no Poisson bracket", h.name())))?)?,
            Swap => Program::identity(2).permute(vec![1, 0])?,
            T => match h.ambient_t() {
                Some(t) => block(2, t)?,
                None => Program::linear(vec![(Rational::zero(), Program::identity(2))])?,
            },
            Tau => block(2, h.tau()?)?,
            Ydb => block(2, h.yd_braiding()?)?,
            YdbInv => block(2, h.yd_braiding_inverse()?)?,
            Compose(a, b) => {
                self.arity()?;
                b.compile(h)?.then(&a.compile(h)?)?
            }
            Tensor(a, b) => a.compile(h)?.tensor(&b.compile(h)?),
            Scale(c, a) => Program::linear(vec![(c.clone(), a.compile(h)?)])?,
            Sum(a, b) => {
                self.arity()?;
                Program::linear(vec![(Rational::one(), a.compile(h)?), (Rational::one(), b.compile(h)?)])?
            }
        })
    }

    /// Evaluate to a linear map on the degree window.
    pub fn eval(&self, h: &HopfAlgebra) -> Result<GradedMap> {
        self.arity()?;
        Ok(self.compile(h)?.to_map(h.space()))
    }
}

impl fmt::Display for DiagramTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Id(1) => write!(f, "id"),
            Id(n) => write!(f, "id^{n}"),
            Zero(a, b) => write!(f, "0[{a}->{b}]"),
            M => write!(f, "m"),
            Delta => write!(f, "Δ"),
            Eta => write!(f, "η"),
            Eps => write!(f, "ε"),
            S => write!(f, "S"),
            SInv => write!(f, "S⁻¹"),
            P => write!(f, "p"),
            Swap => write!(f, "σ"),
            T => write!(f, "t"),
            Tau => write!(f, "τ"),
            Ydb => write!(f, "β"),
            YdbInv => write!(f, "β⁻¹"),
            Compose(a, b) => write!(f, "{a}∘{b}"),
            Tensor(a, b) => write!(f, "({a}⊗{b})"),
            Scale(c, a) => write!(f, "{c}·{a}"),
            Sum(a, b) => write!(f, "({a} + {b})"),
        }
    }
}
