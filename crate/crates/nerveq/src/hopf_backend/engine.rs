use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, GradedSpace, Idx, Rational, Vector};

/// Elementary step of a [`Program`] acting on vectors of a tensor power.
#[derive(Clone)]
pub enum Op {
    /// Apply `map` to slots `pos .. pos + map.src`, splicing in its outputs.
    Block { pos: usize, map: Arc<GradedMap> },
    /// Output slot `i` receives input slot `perm[i]`.
    Permute(Vec<usize>),
    /// Output slot `j` is the ordered product of the input slots in
    /// `fibers[j]` (the unit when empty).
    Products { fibers: Vec<Vec<usize>>, m: Arc<GradedMap>, unit: Arc<Vector> },
    /// Sum of subprograms with the same arity.
    Linear(Vec<(Rational, Program)>),
}

/// Linear map between tensor powers, evaluated lazily on vectors.
#[derive(Clone)]
pub struct Program {
    src: usize,
    tgt: usize,
    ops: Vec<Op>,
}

impl Program {
    pub fn identity(n: usize) -> Self {
        Program { src: n, tgt: n, ops: Vec::new() }
    }

    pub fn source(&self) -> usize {
        self.src
    }

    pub fn target(&self) -> usize {
        self.tgt
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    /// Append a block operation.
    pub fn block(mut self, pos: usize, map: Arc<GradedMap>) -> Result<Self> {
        let s = map.source_power();
        if pos + s > self.tgt {
            return Err(Error::ArityMismatch(format!(
                "block of arity {s} at slot {pos} on {} slots",
                self.tgt
            )));
        }
        self.tgt = self.tgt - s + map.target_power();
        self.ops.push(Op::Block { pos, map });
        Ok(self)
    }

    pub fn permute(mut self, perm: Vec<usize>) -> Result<Self> {
        if perm.len() != self.tgt {
            return Err(Error::ArityMismatch(format!("permutation of {} on {} slots", perm.len(), self.tgt)));
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self);
        }
        self.ops.push(Op::Permute(perm));
        Ok(self)
    }

    pub fn products(mut self, fibers: Vec<Vec<usize>>, m: Arc<GradedMap>, unit: Arc<Vector>) -> Result<Self> {
        let mut seen = vec![false; self.tgt];
        for &i in fibers.iter().flatten() {
            if i >= self.tgt || std::mem::replace(&mut seen[i], true) {
                return Err(Error::ArityMismatch("fibers must partition the slots".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::ArityMismatch("fibers must partition the slots".into()));
        }
        if fibers.iter().enumerate().all(|(j, f)| f.len() == 1 && f[0] == j) {
            return Ok(self);
        }
        self.tgt = fibers.len();
        self.ops.push(Op::Products { fibers, m, unit });
        Ok(self)
    }

    /// `self` followed by `next`.
    pub fn then(mut self, next: &Program) -> Result<Self> {
        if next.src != self.tgt {
            return Err(Error::ArityMismatch(format!(
                "program with {} outputs followed by one with {} inputs",
                self.tgt, next.src
            )));
        }
        self.tgt = next.tgt;
        self.ops.extend(next.ops.iter().cloned());
        Ok(self)
    }

    pub fn linear(terms: Vec<(Rational, Program)>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::ArityMismatch("empty linear combination".into()));
        };
        let (src, tgt) = (first.1.src, first.1.tgt);
        if terms.iter().any(|(_, p)| p.src != src || p.tgt != tgt) {
            return Err(Error::ArityMismatch("summands of different arity".into()));
        }
        Ok(Program { src, tgt, ops: vec![Op::Linear(terms)] })
    }

    /// `self ⊗ other`: `self` on the first slots, `other` on the rest.
    pub fn tensor(&self, other: &Program) -> Program {
        let mut ops = Vec::new();
        for op in &self.ops {
            ops.push(op.clone().pad(0, other.src));
        }
        for op in &other.ops {
            ops.push(op.clone().pad(self.tgt, 0));
        }
        Program { src: self.src + other.src, tgt: self.tgt + other.tgt, ops }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut cur = v.clone();
        for op in &self.ops {
            cur = op.apply(&cur);
            if cur.is_zero() {
                break;
            }
        }
        cur
    }

    pub fn apply_basis(&self, b: &Idx) -> Vector {
        self.apply(&Vector::basis(b.clone()))
    }

    /// Tabulate on the degree window of the source, in parallel.
    pub fn to_map(&self, space: &Arc<GradedSpace>) -> GradedMap {
        GradedMap::from_fn_par(space.clone(), self.src, self.tgt, |b| self.apply_basis(b))
    }
}

impl Op {
    /// Same operation with `left` passive slots before and `right` after.
    fn pad(self, left: usize, right: usize) -> Op {
        if left == 0 && right == 0 {
            return self;
        }
        match self {
            Op::Block { pos, map } => Op::Block { pos: pos + left, map },
            Op::Permute(perm) => {
                let n = perm.len();
                let mut p: Vec<usize> = (0..left).collect();
                p.extend(perm.iter().map(|&i| i + left));
                p.extend(left + n..left + n + right);
                Op::Permute(p)
            }
            Op::Products { fibers, m, unit } => {
                let n: usize = fibers.iter().map(|f| f.len()).sum();
                let mut f: Vec<Vec<usize>> = (0..left).map(|i| vec![i]).collect();
                f.extend(fibers.iter().map(|fib| fib.iter().map(|&i| i + left).collect()));
                f.extend((left + n..left + n + right).map(|i| vec![i]));
                Op::Products { fibers: f, m, unit }
            }
            Op::Linear(terms) => Op::Linear(
                terms
                    .into_iter()
                    .map(|(c, p)| (c, Program::identity(left).tensor(&p).tensor(&Program::identity(right))))
                    .collect(),
            ),
        }
    }

    fn apply(&self, v: &Vector) -> Vector {
        match self {
            Op::Block { pos, map } => {
                let s = map.source_power();
                let mut out = Vector::new();
                for (idx, c) in v.iter() {
                    let Some(col) = map.col(&idx[*pos..*pos + s]) else {
                        continue;
                    };
                    for (k, d) in col.iter() {
                        let mut n: Idx = SmallVec::with_capacity(idx.len() - s + k.len());
                        n.extend_from_slice(&idx[..*pos]);
                        n.extend_from_slice(k);
                        n.extend_from_slice(&idx[*pos + s..]);
                        out.add_term(n, c * d);
                    }
                }
                out
            }
            Op::Permute(perm) => v
                .iter()
                .map(|(idx, c)| (perm.iter().map(|&p| idx[p]).collect::<Idx>(), c.clone()))
                .collect(),
            Op::Products { fibers, m, unit } => {
                let mut out = Vector::new();
                for (idx, c) in v.iter() {
                    let mut acc = Vector::unit_scalar(c.clone());
                    for fib in fibers {
                        let prod = ordered_product(fib.iter().map(|&i| idx[i]), m, unit);
                        acc = acc.tensor(&prod);
                        if acc.is_zero() {
                            break;
                        }
                    }
                    out.add_scaled(&acc, &Rational::one());
                }
                out
            }
            Op::Linear(terms) => {
                let mut out = Vector::new();
                for (c, p) in terms {
                    out.add_scaled(&p.apply(v), c);
                }
                out
            }
        }
    }
}

/// Left-nested product of basis elements; the unit for an empty list.
pub fn ordered_product(items: impl Iterator<Item = u16>, m: &GradedMap, unit: &Vector) -> Vector {
    let mut acc: Option<Vector> = None;
    for i in items {
        acc = Some(match acc {
            None => Vector::basis(SmallVec::from_slice(&[i])),
            Some(a) => {
                let mut out = Vector::new();
                for (k, c) in a.iter() {
                    if let Some(col) = m.col(&[k[0], i]) {
                        out.add_scaled(col, c);
                    }
                }
                out
            }
        });
    }
    acc.unwrap_or_else(|| unit.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Arc<GradedSpace> {
        Arc::new(GradedSpace::new("V", vec!["a".into(), "b".into()], vec![0, 0], None).unwrap())
    }

    fn idx(v: &[u16]) -> Idx {
        Idx::from_slice(v)
    }

    #[test]
    fn tensor_of_programs_matches_map_tensor() {
        let s = space();
        let f = Arc::new(GradedMap::from_fn(s.clone(), 1, 2, |b| {
            let mut v = Vector::basis(idx(&[b[0], b[0]]));
            v.add_term(idx(&[1, 0]), Rational::from_int(2));
            v
        }));
        let p = Program::identity(1).block(0, f.clone()).unwrap();
        let q = Program::identity(2).permute(vec![1, 0]).unwrap();
        let pq = p.tensor(&q).to_map(&s);
        let direct = f.tensor(&GradedMap::permutation(s.clone(), &[1, 0])).unwrap();
        assert_eq!(pq, direct);
        let qp = q.tensor(&p).to_map(&s);
        let direct = GradedMap::permutation(s, &[1, 0]).tensor(&f).unwrap();
        assert_eq!(qp, direct);
    }
}
