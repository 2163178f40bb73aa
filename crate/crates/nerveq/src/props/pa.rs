use std::fmt;

use crate::error::{Error, Result};
use crate::props::brcom::BrMorphism;

/// Full binary parenthesization of a nonempty word of points.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf,
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn node(a: Tree, b: Tree) -> Tree {
        Tree::Node(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(a, b) => a.leaves() + b.leaves(),
        }
    }

    /// `((••)•)•...`; `None` for the empty word.
    pub fn left_nested(n: usize) -> Option<Tree> {
        Self::left_nested_of((0..n).map(|_| Tree::Leaf).collect())
    }

    fn left_nested_of(items: Vec<Tree>) -> Option<Tree> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, Tree::node))
    }

    pub fn is_left_nested(&self) -> bool {
        match self {
            Tree::Leaf => true,
            Tree::Node(a, b) => matches!(**b, Tree::Leaf) && a.is_left_nested(),
        }
    }

    /// Left-nested tree in which leaves `k` and `k + 1` form a pair.
    pub fn pairing(n: usize, k: usize) -> Tree {
        let mut items: Vec<Tree> = Vec::new();
        let mut i = 0;
        while i < n {
            if i == k {
                items.push(Tree::node(Tree::Leaf, Tree::Leaf));
                i += 2;
            } else {
                items.push(Tree::Leaf);
                i += 1;
            }
        }
        Self::left_nested_of(items).unwrap()
    }

    /// Whether leaves `k` and `k + 1` are siblings.
    pub fn are_siblings(&self, k: usize) -> bool {
        self.sibling_search(0, k)
    }

    fn sibling_search(&self, offset: usize, k: usize) -> bool {
        match self {
            Tree::Leaf => false,
            Tree::Node(a, b) => {
                if matches!(**a, Tree::Leaf) && matches!(**b, Tree::Leaf) && offset == k {
                    return true;
                }
                let la = a.leaves();
                a.sibling_search(offset, k) || b.sibling_search(offset + la, k)
            }
        }
    }

    /// Apply an associator at the node spanning `[start, start+a+b+c)`.
    fn rotate(&self, offset: usize, mv: &Rebracket) -> Option<Tree> {
        let n = self.leaves();
        if offset == mv.start && n == mv.a + mv.b + mv.c {
            if let Tree::Node(l, r) = self {
                if mv.forward {
                    if let Tree::Node(x, y) = &**l {
                        if x.leaves() == mv.a && y.leaves() == mv.b {
                            return Some(Tree::node((**x).clone(), Tree::node((**y).clone(), (**r).clone())));
                        }
                    }
                } else if let Tree::Node(y, z) = &**r {
                    if l.leaves() == mv.a && y.leaves() == mv.b {
                        return Some(Tree::node(Tree::node((**l).clone(), (**y).clone()), (**z).clone()));
                    }
                }
            }
        }
        match self {
            Tree::Leaf => None,
            Tree::Node(l, r) => {
                let la = l.leaves();
                if mv.start < offset + la {
                    l.rotate(offset, mv).map(|nl| Tree::node(nl, (**r).clone()))
                } else {
                    r.rotate(offset + la, mv).map(|nr| Tree::node((**l).clone(), nr))
                }
            }
        }
    }

    /// Replace the sibling pair at `k, k+1` by a single leaf.
    fn merge_pair(&self, offset: usize, k: usize) -> Option<Tree> {
        match self {
            Tree::Leaf => None,
            Tree::Node(a, b) => {
                if matches!(**a, Tree::Leaf) && matches!(**b, Tree::Leaf) && offset == k {
                    return Some(Tree::Leaf);
                }
                let la = a.leaves();
                if k < offset + la {
                    a.merge_pair(offset, k).map(|x| Tree::node(x, (**b).clone()))
                } else {
                    b.merge_pair(offset + la, k).map(|x| Tree::node((**a).clone(), x))
                }
            }
        }
    }

    /// Replace leaf `k` by `(new, old)`.
    fn split_leaf(&self, offset: usize, k: usize) -> Tree {
        match self {
            Tree::Leaf => Tree::node(Tree::Leaf, Tree::Leaf),
            Tree::Node(a, b) => {
                let la = a.leaves();
                if k < offset + la {
                    Tree::node(a.split_leaf(offset, k), (**b).clone())
                } else {
                    Tree::node((**a).clone(), b.split_leaf(offset + la, k))
                }
            }
        }
    }

    /// Associator moves turning `self` into the left-nested tree.
    fn moves_to_left_nested(&self) -> Vec<Rebracket> {
        let mut t = self.clone();
        let mut out = Vec::new();
        while let Some(mv) = t.first_right_node(0) {
            t = t.rotate(0, &mv).expect("valid rotation");
            out.push(mv);
        }
        out
    }

    fn first_right_node(&self, offset: usize) -> Option<Rebracket> {
        match self {
            Tree::Leaf => None,
            Tree::Node(l, r) => {
                if let Tree::Node(y, z) = &**r {
                    return Some(Rebracket { start: offset, a: l.leaves(), b: y.leaves(), c: z.leaves(), forward: false });
                }
                l.first_right_node(offset)
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => write!(f, "•"),
            Tree::Node(a, b) => write!(f, "({a}{b})"),
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Associator on the leaves `[start, start+a+b+c)`: `((A B) C) → (A (B C))`
/// when `forward`, the inverse otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rebracket {
    pub start: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub forward: bool,
}

impl Rebracket {
    pub fn inverse(&self) -> Rebracket {
        Rebracket { forward: !self.forward, ..*self }
    }
}

/// Elementary move of a parenthesized braided morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PaMove {
    /// Crossing of sibling leaves `pos, pos+1`; positive sign is the braiding.
    Crossing { pos: usize, sign: i8 },
    Rebracket(Rebracket),
    /// Multiplication of sibling leaves `pos, pos+1`.
    Merge { pos: usize },
    /// A new leaf at position `pos`.
    UnitInsert { pos: usize },
}

/// A move together with the trees before and after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaStep {
    pub mv: PaMove,
    pub before: Option<Tree>,
    pub after: Option<Tree>,
}

impl PaStep {
    pub fn leaves_before(&self) -> usize {
        self.before.as_ref().map_or(0, Tree::leaves)
    }
}

/// Rebracketing moves from `from` to `to` (same number of leaves), with
/// adjacent inverse pairs cancelled.
pub fn rebracket_path(from: &Tree, to: &Tree) -> Result<Vec<Rebracket>> {
    if from.leaves() != to.leaves() {
        return Err(Error::ArityMismatch(format!(
            "trees with {} and {} leaves",
            from.leaves(),
            to.leaves()
        )));
    }
    let mut moves = from.moves_to_left_nested();
    let back = to.moves_to_left_nested();
    moves.extend(back.iter().rev().map(Rebracket::inverse));
    let mut out: Vec<Rebracket> = Vec::new();
    for m in moves {
        if out.last() == Some(&m.inverse()) {
            out.pop();
        } else {
            out.push(m);
        }
    }
    Ok(out)
}

struct Builder {
    tree: Option<Tree>,
    steps: Vec<PaStep>,
}

impl Builder {
    fn push(&mut self, mv: PaMove, after: Option<Tree>) {
        let before = std::mem::replace(&mut self.tree, after.clone());
        self.steps.push(PaStep { mv, before, after });
    }

    fn rebracket_to(&mut self, target: &Tree) -> Result<()> {
        let cur = self.tree.clone().expect("nonempty tree");
        for r in rebracket_path(&cur, target)? {
            let next = self.tree.as_ref().unwrap().rotate(0, &r).expect("valid rotation");
            self.push(PaMove::Rebracket(r), Some(next));
        }
        Ok(())
    }

    fn make_siblings(&mut self, k: usize) -> Result<()> {
        let t = self.tree.as_ref().expect("nonempty tree");
        if !t.are_siblings(k) {
            let target = Tree::pairing(t.leaves(), k);
            self.rebracket_to(&target)?;
        }
        Ok(())
    }
}

/// Decompose a braided morphism into elementary moves, starting and ending
/// at left-nested parenthesizations.
pub fn pa_decompose(phi: &BrMorphism) -> Result<Vec<PaStep>> {
    pa_decompose_from(Tree::left_nested(phi.source()), phi)
}

/// As [`pa_decompose`] but starting from an arbitrary parenthesization.
pub fn pa_decompose_from(start: Option<Tree>, phi: &BrMorphism) -> Result<Vec<PaStep>> {
    if start.as_ref().map_or(0, Tree::leaves) != phi.source() {
        return Err(Error::ArityMismatch("start tree does not match the source".into()));
    }
    let mut b = Builder { tree: start, steps: Vec::new() };
    for l in phi.braid().applied() {
        let k = l.unsigned_abs() as usize - 1;
        b.make_siblings(k)?;
        let t = b.tree.clone();
        b.push(PaMove::Crossing { pos: k, sign: l.signum() as i8 }, t);
    }
    let mult = phi.multiplicities();
    let mut pos = 0;
    for &c in &mult {
        if c == 0 {
            let next = match &b.tree {
                None => Tree::Leaf,
                Some(t) if pos < t.leaves() => t.split_leaf(0, pos),
                Some(t) => Tree::node(t.clone(), Tree::Leaf),
            };
            b.push(PaMove::UnitInsert { pos }, Some(next));
        } else {
            for _ in 1..c {
                b.make_siblings(pos)?;
                let next = b.tree.as_ref().unwrap().merge_pair(0, pos).expect("siblings");
                b.push(PaMove::Merge { pos }, Some(next));
            }
        }
        pos += 1;
    }
    if let Some(t) = Tree::left_nested(phi.target()) {
        b.rebracket_to(&t)?;
    }
    Ok(b.steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::braid::BraidWord;

    fn br(n: usize, l: &[i32], t: usize, a: &[usize]) -> BrMorphism {
        BrMorphism::new(BraidWord::new(n, l.to_vec()).unwrap(), t, a.to_vec()).unwrap()
    }

    #[test]
    fn identity_has_no_moves() {
        assert!(pa_decompose(&BrMorphism::identity(4)).unwrap().is_empty());
    }

    #[test]
    fn single_crossing() {
        let s = pa_decompose(&br(2, &[1], 2, &[0, 1])).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mv, PaMove::Crossing { pos: 0, sign: 1 });
    }

    #[test]
    fn middle_crossing_is_conjugated_by_associators() {
        let s = pa_decompose(&br(3, &[2], 3, &[0, 1, 2])).unwrap();
        let kinds: Vec<PaMove> = s.iter().map(|x| x.mv).collect();
        let fwd = Rebracket { start: 0, a: 1, b: 1, c: 1, forward: true };
        assert_eq!(
            kinds,
            vec![PaMove::Rebracket(fwd), PaMove::Crossing { pos: 1, sign: 1 }, PaMove::Rebracket(fwd.inverse())]
        );
        assert_eq!(s[0].before, Tree::left_nested(3));
        assert_eq!(s.last().unwrap().after, Tree::left_nested(3));
    }

    #[test]
    fn ends_left_nested_and_chains() {
        let phi = br(4, &[2, -3, 1], 3, &[0, 0, 2, 2]);
        let s = pa_decompose(&phi).unwrap();
        for w in s.windows(2) {
            assert_eq!(w[0].after, w[1].before);
        }
        assert_eq!(s.last().unwrap().after, Tree::left_nested(3));
        assert!(s.iter().any(|x| matches!(x.mv, PaMove::UnitInsert { pos: 1 })));
        assert_eq!(s.iter().filter(|x| matches!(x.mv, PaMove::Merge { .. })).count(), 2);
    }

    #[test]
    fn rebracket_path_round_trip() {
        let a = Tree::node(Tree::node(Tree::Leaf, Tree::Leaf), Tree::node(Tree::Leaf, Tree::Leaf));
        let b = Tree::left_nested(4).unwrap();
        let p = rebracket_path(&a, &b).unwrap();
        let mut t = a.clone();
        for r in &p {
            t = t.rotate(0, r).unwrap();
        }
        assert_eq!(t, b);
        assert!(rebracket_path(&b, &b).unwrap().is_empty());
    }

    #[test]
    fn unit_from_nothing() {
        let s = pa_decompose(&br(0, &[], 2, &[])).unwrap();
        assert_eq!(s.last().unwrap().after, Tree::left_nested(2));
    }
}
