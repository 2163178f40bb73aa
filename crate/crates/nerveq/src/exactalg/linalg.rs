use std::collections::BTreeMap;

use crate::exactalg::Rational;

/// Sparse row-echelon basis of a subspace, pivoting on the largest key.
///
/// Full reduction against it yields a canonical representative of a vector
/// modulo the subspace.
#[derive(Clone, Debug, Default)]
pub struct RowEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, Rational>>,
}

impl<K: Ord + Clone> RowEchelon<K> {
    pub fn new() -> Self {
        RowEchelon { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    /// Reduce `v` fully; the result has no pivot keys.
    pub fn reduce(&self, mut v: BTreeMap<K, Rational>) -> BTreeMap<K, Rational> {
        v.retain(|_, c| !c.is_zero());
        let mut done: BTreeMap<K, Rational> = BTreeMap::new();
        while let Some((k, c)) = v.pop_last() {
            match self.rows.get(&k) {
                Some(row) => {
                    for (k2, c2) in row.iter() {
                        if *k2 == k {
                            continue;
                        }
                        let e = v.entry(k2.clone()).or_default();
                        *e -= &(&c * c2);
                        if e.is_zero() {
                            v.remove(k2);
                        }
                    }
                }
                None => {
                    done.insert(k, c);
                }
            }
        }
        done
    }

    /// Add a vector to the span; returns `true` if the rank grew.
    pub fn insert(&mut self, v: BTreeMap<K, Rational>) -> bool {
        let r = self.reduce(v);
        let Some((pk, pc)) = r.last_key_value() else {
            return false;
        };
        let pk = pk.clone();
        let inv = pc.recip().unwrap();
        let row: BTreeMap<K, Rational> = r.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        // keep rows fully reduced against each other
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&pk).cloned() {
                for (k2, c2) in &row {
                    let e = other.entry(k2.clone()).or_default();
                    *e -= &(&c * c2);
                }
                other.retain(|_, x| !x.is_zero());
            }
        }
        self.rows.insert(pk, row);
        true
    }

    pub fn contains(&self, v: BTreeMap<K, Rational>) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: impl IntoIterator<Item = BTreeMap<K, Rational>>) -> usize {
    let mut e = RowEchelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Solution of a dense linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    /// Particular solution with all free variables set to zero.
    pub particular: Vec<Rational>,
    /// Indices of free variables.
    pub free: Vec<usize>,
    /// Basis of the kernel, one vector per free variable.
    pub kernel: Vec<Vec<Rational>>,
}

/// Gauss–Jordan elimination over `Q`; `None` if inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], nvars: usize) -> Option<LinearSolution> {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.resize(nvars, Rational::zero());
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=nvars {
                    let d = &f * &m[r][j];
                    m[i][j] -= &d;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[nvars].is_zero()) {
        return None;
    }
    let mut particular = vec![Rational::zero(); nvars];
    for (i, &c) in pivot_cols.iter().enumerate() {
        particular[c] = m[i][nvars].clone();
    }
    let free: Vec<usize> = (0..nvars).filter(|c| !pivot_cols.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); nvars];
            v[f] = Rational::one();
            for (i, &c) in pivot_cols.iter().enumerate() {
                v[c] = -&m[i][f];
            }
            v
        })
        .collect();
    Some(LinearSolution { particular, free, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn echelon_reduction_is_canonical() {
        let mut e = RowEchelon::new();
        e.insert(BTreeMap::from([(0, q(1)), (2, q(1))]));
        e.insert(BTreeMap::from([(1, q(1)), (2, q(-1))]));
        assert_eq!(e.rank(), 2);
        let a = e.reduce(BTreeMap::from([(2, q(3))]));
        let b = e.reduce(BTreeMap::from([(0, q(-3))]));
        assert_eq!(a, b);
        assert!(!e.insert(BTreeMap::from([(0, q(1)), (1, q(1))])));
    }

    #[test]
    fn solve_reports_kernel_and_inconsistency() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        let s = solve(&a, &[q(1), q(2)], 2).unwrap();
        assert_eq!(s.particular, vec![q(1), q(0)]);
        assert_eq!(s.free, vec![1]);
        assert_eq!(s.kernel, vec![vec![q(-1), q(1)]]);
        assert!(solve(&a, &[q(1), q(3)], 2).is_none());
    }
}
