use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::Rational;
use crate::hopf_backend::{FiniteGroup, HopfAlgebra};

pub const ALGEBRA_SCHEMA: &str = "nerveq.algebra/1";

/// A finite group in an algebra file. Table entries are 0-based element
/// indices, row-major: `rows[a][b] = ab`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic(usize),
    Symmetric(usize),
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        rows: Vec<Vec<usize>>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic(n) if *n > 0 => Ok(FiniteGroup::cyclic(*n)),
            GroupSpec::Symmetric(k) if (1..=5).contains(k) => Ok(FiniteGroup::symmetric(*k)),
            GroupSpec::Cyclic(_) | GroupSpec::Symmetric(_) => {
                Err(Error::InvalidPresentation("group size out of supported range".into()))
            }
            GroupSpec::Table { names: Some(n), rows } => FiniteGroup::from_table(n.clone(), rows.clone()),
            GroupSpec::Table { names: None, rows } => FiniteGroup::from_plain_table(rows.clone()),
        }
    }
}

/// Presentation of a (Poisson) Hopf algebra as stored in JSON files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraSpec {
    FunGroup {
        group: GroupSpec,
    },
    GroupAlgebra {
        group: GroupSpec,
    },
    /// Structure constants `(i, j, k, c)`: `[e_i, e_j]` contains `c e_k`.
    SymTrunc {
        generators: Vec<String>,
        brackets: Vec<(usize, usize, usize, Rational)>,
        degree_cap: u32,
    },
    Tensor {
        factors: Vec<AlgebraSpec>,
    },
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    schema: String,
    #[serde(flatten)]
    spec: AlgebraSpec,
}

fn table_of(g: &FiniteGroup) -> GroupSpec {
    GroupSpec::Table { names: Some(g.names().to_vec()), rows: g.table().to_vec() }
}

impl AlgebraSpec {
    pub fn fun_group(g: &FiniteGroup) -> Self {
        AlgebraSpec::FunGroup { group: table_of(g) }
    }

    pub fn group_algebra(g: &FiniteGroup) -> Self {
        AlgebraSpec::GroupAlgebra { group: table_of(g) }
    }

    pub fn sym_trunc(generators: &[String], brackets: &[(usize, usize, usize, Rational)], cap: u32) -> Self {
        AlgebraSpec::SymTrunc { generators: generators.to_vec(), brackets: brackets.to_vec(), degree_cap: cap }
    }

    pub fn tensor(a: AlgebraSpec, b: AlgebraSpec) -> Self {
        AlgebraSpec::Tensor { factors: vec![a, b] }
    }

    /// Construct and validate.
    pub fn build(&self) -> Result<HopfAlgebra> {
        let mut h = match self {
            AlgebraSpec::FunGroup { group } => HopfAlgebra::fun_group(&group.build()?)?,
            AlgebraSpec::GroupAlgebra { group } => HopfAlgebra::group_algebra(&group.build()?)?,
            AlgebraSpec::SymTrunc { generators, brackets, degree_cap } => {
                if *degree_cap == 0 {
                    return Err(Error::InvalidPresentation("degree_cap must be at least 1".into()));
                }
                HopfAlgebra::sym_trunc(generators, brackets, *degree_cap)?
            }
            AlgebraSpec::Tensor { factors } => {
                let mut it = factors.iter();
                let first = it.next().ok_or_else(|| Error::InvalidPresentation("empty tensor product".into()))?;
                let mut acc = first.build()?;
                for f in it {
                    acc = HopfAlgebra::tensor(&acc, &f.build()?)?;
                }
                acc
            }
        };
        h.set_spec(self.clone());
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile { schema: ALGEBRA_SCHEMA.into(), spec: self.clone() };
        serde_json::to_string_pretty(&file).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("schema").and_then(|s| s.as_str()) {
            Some(ALGEBRA_SCHEMA) => {}
            Some(other) => return Err(Error::Parse(format!("schema: expected {ALGEBRA_SCHEMA}, found {other}"))),
            None => return Err(Error::Parse("schema: missing field".into())),
        }
        let file: AlgebraFile = serde_json::from_value(v).map_err(|e| Error::Parse(format!("algebra file: {e}")))?;
        Ok(file.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_build() {
        let s = AlgebraSpec::SymTrunc {
            generators: vec!["X".into(), "Y".into()],
            brackets: vec![(0, 1, 1, Rational::one())],
            degree_cap: 3,
        };
        let t = AlgebraSpec::tensor(AlgebraSpec::FunGroup { group: GroupSpec::Symmetric(3) }, s);
        let text = t.to_json();
        assert_eq!(AlgebraSpec::from_json(&text).unwrap(), t);
        let h = t.build().unwrap();
        assert_eq!(h.dim(), 6 * 10);
        assert_eq!(h.spec(), Some(&t));
    }

    #[test]
    fn explicit_table() {
        let text = r#"{"schema": "nerveq.algebra/1", "kind": "group_algebra",
                       "group": {"table": {"rows": [[0, 1], [1, 0]]}}}"#;
        let h = AlgebraSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(h.dim(), 2);
        assert!(AlgebraSpec::from_json(r#"{"kind": "fun_group", "group": {"cyclic": 2}}"#).is_err());
        let bad = r#"{"schema": "nerveq.algebra/1", "kind": "fun_group", "group": {"table": {"rows": [[0, 0], [0, 0]]}}}"#;
        assert!(AlgebraSpec::from_json(bad).unwrap().build().is_err());
    }
}
