use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite group given by its multiplication table; `table[a][b] = ab`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidPresentation("empty group".into()));
        }
        if names.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidPresentation("group table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidPresentation("group table has no identity".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidPresentation(format!(
                            "group table is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity)
                .ok_or_else(|| Error::InvalidPresentation(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        Ok(FiniteGroup { names, table, identity, inverses })
    }

    /// Table with default names `g0, g1, ...`.
    pub fn from_plain_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let names = (0..table.len()).map(|i| format!("g{i}")).collect();
        Self::from_table(names, table)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let names = (0..n).map(|i| format!("c{i}")).collect();
        Self::from_table(names, table).unwrap()
    }

    /// Symmetric group on `k` letters; elements are permutations in one-line
    /// notation, multiplied as composition `(ab)(i) = a(b(i))`.
    pub fn symmetric(k: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..k).collect(), 0, &mut perms);
        perms.sort();
        let idx = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx(&b.iter().map(|&i| a[i]).collect())).collect())
            .collect();
        let names = perms.iter().map(|p| p.iter().map(|i| (i + 1).to_string()).collect()).collect();
        Self::from_table(names, table).unwrap()
    }

    /// Direct product `G × H`, elements ordered `(g, h) ↦ g·|H| + h`.
    pub fn product(&self, other: &FiniteGroup) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        let names = (0..n).map(|x| format!("({},{})", self.names[x / m], other.names[x % m])).collect();
        Self::from_table(names, table).unwrap()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

fn permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.names()[s3.identity()], "123");
        assert!(FiniteGroup::cyclic(2).is_abelian());
        assert_eq!(s3.product(&FiniteGroup::cyclic(2)).order(), 12);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_plain_table(vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::from_plain_table(vec![vec![0, 1], vec![1]]).is_err());
    }
}
