//! Text syntax for morphisms, file formats and session settings.

pub mod eval;
pub mod lexer;
pub mod parser;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::associator::{solve_associator, AssocSeries};
use crate::chords::ICMorphism;
use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, HSeries};
use crate::nerve::NerveEvaluator;
use crate::hopf_backend::spec::AlgebraSpec;

pub use eval::{eval, eval_str, MorphismJson, Value};
pub use parser::{parse_morphism, Expr, Node};

/// Where the associator comes from: a JSON file or `solve:D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssocSource {
    File(PathBuf),
    Solve(usize),
}

impl FromStr for AssocSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("solve:") {
            Some(d) => d
                .parse()
                .map(AssocSource::Solve)
                .map_err(|_| Error::Parse(format!("`{s}`: expected solve:D with D a degree"))),
            None if s.is_empty() => Err(Error::Parse("empty associator source".into())),
            None => Ok(AssocSource::File(s.into())),
        }
    }
}

impl fmt::Display for AssocSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssocSource::File(p) => write!(f, "{}", p.display()),
            AssocSource::Solve(d) => write!(f, "solve:{d}"),
        }
    }
}

impl AssocSource {
    pub fn load(&self) -> Result<AssocSeries> {
        match self {
            AssocSource::Solve(d) => solve_associator(*d),
            AssocSource::File(p) => {
                let text = read(p)?;
                let v: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                AssocSeries::from_json(&v).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("format `{s}`: expected text or json"))),
        }
    }
}

/// Settings shared by the command line subcommands.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    /// Truncation order `N`: results are modulo `h^{N+1}`.
    pub order: usize,
    /// Overrides the degree cap of truncated symmetric algebras.
    pub degree_cap: Option<u32>,
    pub assoc: AssocSource,
    pub backend: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { order: 2, degree_cap: None, assoc: AssocSource::Solve(2), backend: None, format: OutputFormat::Text }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree_cap == Some(0) {
            return Err(Error::InvalidPresentation("degree cap must be at least 1".into()));
        }
        Ok(())
    }

    pub fn associator(&self) -> Result<AssocSeries> {
        self.assoc.load()
    }

    /// The backend presentation, with the degree cap applied.
    pub fn algebra(&self) -> Result<AlgebraSpec> {
        self.validate()?;
        let path = self.backend.as_ref().ok_or_else(|| Error::Parse("no algebra file given".into()))?;
        let mut spec = parse_algebra(path)?;
        if let Some(d) = self.degree_cap {
            set_cap(&mut spec, d);
        }
        Ok(spec)
    }
}

fn set_cap(spec: &mut AlgebraSpec, d: u32) {
    match spec {
        AlgebraSpec::SymTrunc { degree_cap, .. } => *degree_cap = d,
        AlgebraSpec::Tensor { factors } => factors.iter_mut().for_each(|f| set_cap(f, d)),
        _ => {}
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
}

/// Read an algebra presentation file.
pub fn parse_algebra(path: &Path) -> Result<AlgebraSpec> {
    AlgebraSpec::from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Nerve of a DSL value; linear values are summed coefficient by coefficient.
pub fn nerve_of(ev: &NerveEvaluator, v: &Value) -> Result<HSeries<GradedMap>> {
    let n = ev.order();
    match v {
        Value::Braid(b) => Ok((*ev.eval_br(b)?).clone()),
        Value::Map(f) => Ok((*ev.eval_icom(&ICMorphism::from_map(f, n))?).clone()),
        Value::Linear(s) => {
            let space = ev.hopf().space().clone();
            let (src, tgt) = v.arity();
            let zero = GradedMap::zero(space, crate::nerve::slots(src), crate::nerve::slots(tgt));
            let mut coeffs = vec![zero; n + 1];
            for (k, c) in s.coeffs().iter().enumerate().take(n + 1) {
                let part = ev.eval_icom(&c.with_cap(n))?;
                for d in 0..=k.min(part.order()) {
                    coeffs[k] = coeffs[k].add(&part.coeffs()[d])?;
                }
            }
            HSeries::from_coeffs(coeffs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources() {
        assert_eq!("solve:3".parse::<AssocSource>().unwrap(), AssocSource::Solve(3));
        assert_eq!("phi.json".parse::<AssocSource>().unwrap(), AssocSource::File("phi.json".into()));
        assert!("solve:x".parse::<AssocSource>().is_err());
        assert_eq!(AssocSource::Solve(2).to_string(), "solve:2");
        assert!("yaml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn cap_override_reaches_tensor_factors() {
        let mut s = AlgebraSpec::Tensor {
            factors: vec![AlgebraSpec::SymTrunc { generators: vec!["X".into()], brackets: vec![], degree_cap: 3 }],
        };
        set_cap(&mut s, 5);
        assert!(matches!(&s, AlgebraSpec::Tensor { factors } if matches!(factors[0], AlgebraSpec::SymTrunc { degree_cap: 5, .. })));
    }
}
