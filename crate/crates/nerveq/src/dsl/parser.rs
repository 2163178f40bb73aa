//! Recursive descent parser for morphism expressions.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := coef? factor (('∘' | '.' | 'o') factor | ('⊗' | 'x') factor | '*' chords)*
//! coef   := rational? ('h' ('^' int)?)? '*'?
//! factor := 'map' '(' int '->' int ')' '[' ints ']'
//!         | 'braid' '(' int ('->' int)? ')' '{' letter* '}' ('[' ints ']')?
//!         | '(' expr ')'
//! letter := 's' int '\''?
//! chords := '(' chord* ')'
//! chord  := 't' digit digit | 't' '(' int ',' int ')'
//! ```
//!
//! Indices in the text are 1-based.

use std::fmt;

use crate::chords::dk::{chord_text, Chord};
use crate::dsl::lexer::{describe, lex, Tok, Token};
use crate::error::{Error, Result, Span};
use crate::exactalg::Rational;
use crate::props::{BraidWord, BrMorphism, FinMap};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub expr: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    MapLit(FinMap),
    BraidLit(BrMorphism),
    /// `base * (t_ij ...)`: the chord word is applied to the source strands first.
    ChordLit { base: Box<Node>, word: Vec<(Chord, Span)> },
    /// `a ∘ b`, `b` applied first.
    Compose(Box<Node>, Box<Node>),
    Tensor(Box<Node>, Box<Node>),
    Scale(Rational, Box<Node>),
    Sum(Box<Node>, Box<Node>),
    HScale(usize, Box<Node>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn syntax(t: &Token, msg: String) -> Error {
    Error::Syntax { span: t.span(), msg }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Token> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            Err(syntax(self.tok(), format!("expected {}, found {}", describe(&want), describe(self.peek()))))
        }
    }

    fn int(&mut self) -> Result<(u64, Token)> {
        match self.peek().clone() {
            Tok::Int(n) => Ok((n, self.bump())),
            t => Err(syntax(self.tok(), format!("expected a number, found {}", describe(&t)))),
        }
    }

    fn small(&mut self) -> Result<usize> {
        let (n, t) = self.int()?;
        if n > 64 {
            return Err(syntax(&t, format!("{n} is too large here")));
        }
        Ok(n as usize)
    }

    fn span_from(&self, start: usize) -> Span {
        let a = &self.toks[start];
        let b = &self.toks[self.pos.max(start + 1) - 1];
        Span { line: a.line, col: a.col, len: b.end.saturating_sub(a.start) }
    }

    fn node(&self, start: usize, expr: Expr) -> Node {
        Node { expr, span: self.span_from(start) }
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expr(&mut self) -> Result<Node> {
        let start = self.pos;
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let mut acc = self.term()?;
        if neg {
            acc = self.node(start, Expr::Scale(Rational::from_int(-1), Box::new(acc)));
        }
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.bump();
            let rs = self.pos;
            let mut rhs = self.term()?;
            if sign < 0 {
                rhs = self.node(rs, Expr::Scale(Rational::from_int(-1), Box::new(rhs)));
            }
            acc = self.node(start, Expr::Sum(Box::new(acc), Box::new(rhs)));
        }
        Ok(acc)
    }

    fn rational(&mut self) -> Result<Rational> {
        let (n, _) = self.int()?;
        if *self.peek() != Tok::Slash {
            return Ok(format!("{n}").parse().unwrap());
        }
        self.bump();
        let (d, t) = self.int()?;
        if d == 0 {
            return Err(syntax(&t, "zero denominator".into()));
        }
        Ok(format!("{n}/{d}").parse().unwrap())
    }

    fn term(&mut self) -> Result<Node> {
        let start = self.pos;
        let coef = if matches!(self.peek(), Tok::Int(_)) { Some(self.rational()?) } else { None };
        let mut hpow = None;
        if self.is_ident("h") {
            self.bump();
            hpow = Some(if *self.peek() == Tok::Caret {
                self.bump();
                self.small()?
            } else {
                1
            });
        }
        if (coef.is_some() || hpow.is_some()) && *self.peek() == Tok::Star {
            self.bump();
        }
        let mut acc = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Compose => 0,
                Tok::Ident(s) if s == "o" => 0,
                Tok::Tensor => 1,
                Tok::Ident(s) if s == "x" => 1,
                Tok::Star => 2,
                _ => break,
            };
            self.bump();
            acc = match op {
                0 => {
                    let rhs = self.factor()?;
                    self.node(start, Expr::Compose(Box::new(acc), Box::new(rhs)))
                }
                1 => {
                    let rhs = self.factor()?;
                    self.node(start, Expr::Tensor(Box::new(acc), Box::new(rhs)))
                }
                _ => {
                    let word = self.chords()?;
                    self.node(start, Expr::ChordLit { base: Box::new(acc), word })
                }
            };
        }
        if let Some(k) = hpow {
            acc = self.node(start, Expr::HScale(k, Box::new(acc)));
        }
        if let Some(c) = coef {
            acc = self.node(start, Expr::Scale(c, Box::new(acc)));
        }
        Ok(acc)
    }

    fn chords(&mut self) -> Result<Vec<(Chord, Span)>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        loop {
            let (ti, t) = (self.pos, self.tok().clone());
            let (i, j) = match self.peek().clone() {
                Tok::RParen => break,
                Tok::Ident(s) if s == "t" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let i = self.small()?;
                    self.expect(Tok::Comma)?;
                    let j = self.small()?;
                    self.expect(Tok::RParen)?;
                    (i, j)
                }
                Tok::Ident(s) if s.len() == 3 && s.starts_with('t') && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                    self.bump();
                    let d: Vec<usize> = s[1..].chars().map(|c| c as usize - '0' as usize).collect();
                    (d[0], d[1])
                }
                other => return Err(syntax(&t, format!("expected a chord such as t12, found {}", describe(&other)))),
            };
            let span = self.span_from(ti);
            if i == 0 || j == 0 || i == j {
                return Err(Error::Syntax { span, msg: "a chord joins two distinct strands numbered from 1".into() });
            }
            out.push(((i.min(j) as u8 - 1, i.max(j) as u8 - 1), span));
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn ints(&mut self) -> Result<Vec<usize>> {
        self.expect(Tok::LBrack)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBrack {
            loop {
                out.push(self.small()?);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RBrack)?;
        Ok(out)
    }

    fn factor(&mut self) -> Result<Node> {
        let start = self.pos;
        match self.peek().clone() {
            Tok::Ident(s) if s == "map" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let m = self.small()?;
                self.expect(Tok::Arrow)?;
                let n = self.small()?;
                self.expect(Tok::RParen)?;
                let img = self.ints()?;
                let span = self.span_from(start);
                let f = FinMap::from_one_based(m, n, &img).map_err(|e| Error::Type { span, msg: e.to_string() })?;
                Ok(self.node(start, Expr::MapLit(f)))
            }
            Tok::Ident(s) if s == "braid" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let n = self.small()?;
                let target = if *self.peek() == Tok::Arrow {
                    self.bump();
                    Some(self.small()?)
                } else {
                    None
                };
                self.expect(Tok::RParen)?;
                self.expect(Tok::LBrace)?;
                let mut letters = Vec::new();
                loop {
                    let t = self.tok().clone();
                    match self.peek().clone() {
                        Tok::RBrace => break,
                        Tok::Ident(s) if s.len() > 1 && s.starts_with('s') && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                            self.bump();
                            let k: i32 = s[1..].parse().map_err(|_| syntax(&t, "bad generator".into()))?;
                            if k == 0 {
                                return Err(syntax(&t, "generators are numbered from s1".into()));
                            }
                            if *self.peek() == Tok::Prime {
                                self.bump();
                                letters.push(-k);
                            } else {
                                letters.push(k);
                            }
                        }
                        other => return Err(syntax(&t, format!("expected a generator such as s1, found {}", describe(&other)))),
                    }
                }
                self.expect(Tok::RBrace)?;
                let attach: Vec<usize> =
                    if *self.peek() == Tok::LBrack { self.ints()? } else { (1..=n).collect() };
                let span = self.span_from(start);
                let ty = |e: Error| Error::Type { span, msg: e.to_string() };
                if attach.contains(&0) {
                    return Err(Error::Type { span, msg: "attachments are numbered from 1".into() });
                }
                let attach: Vec<usize> = attach.iter().map(|a| a - 1).collect();
                let target = target.unwrap_or_else(|| attach.iter().map(|a| a + 1).max().unwrap_or(0));
                let b = BraidWord::new(n, letters).map_err(ty)?;
                let phi = BrMorphism::new(b, target, attach).map_err(ty)?;
                Ok(self.node(start, Expr::BraidLit(phi)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Node { expr: inner.expr, span: self.span_from(start) })
            }
            other => Err(syntax(self.tok(), format!("expected map(..), braid(..) or `(`, found {}", describe(&other)))),
        }
    }
}

/// Parse without arity checking.
pub fn parse_unchecked(src: &str) -> Result<Node> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.tok(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

/// Parse and arity-check a morphism expression.
pub fn parse_morphism(src: &str) -> Result<Node> {
    let e = parse_unchecked(src)?;
    e.arity()?;
    Ok(e)
}

fn type_err(span: Span, msg: String) -> Error {
    Error::Type { span, msg }
}

impl Node {
    /// `(source, target)`; errors point at the offending node.
    pub fn arity(&self) -> Result<(usize, usize)> {
        match &self.expr {
            Expr::MapLit(f) => Ok((f.source(), f.target())),
            Expr::BraidLit(b) => Ok((b.source(), b.target())),
            Expr::ChordLit { base, word } => {
                let (s, t) = base.arity()?;
                for ((_, j), span) in word {
                    if *j as usize >= s {
                        return Err(type_err(*span, format!("chord on {s} strands reaches strand {}", j + 1)));
                    }
                }
                Ok((s, t))
            }
            Expr::Compose(a, b) => {
                let (sa, ta) = a.arity()?;
                let (sb, tb) = b.arity()?;
                if tb != sa {
                    return Err(type_err(self.span, format!("cannot compose: the right factor has {tb} outputs, the left one takes {sa}")));
                }
                Ok((sb, ta))
            }
            Expr::Tensor(a, b) => {
                let (sa, ta) = a.arity()?;
                let (sb, tb) = b.arity()?;
                Ok((sa + sb, ta + tb))
            }
            Expr::Scale(_, a) | Expr::HScale(_, a) => a.arity(),
            Expr::Sum(a, b) => {
                let x = a.arity()?;
                let y = b.arity()?;
                if x != y {
                    return Err(type_err(
                        self.span,
                        format!("cannot add a {}->{} morphism to a {}->{} one", y.0, y.1, x.0, x.1),
                    ));
                }
                Ok(x)
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            Expr::MapLit(m) => write!(f, "{m}"),
            Expr::BraidLit(b) => write!(f, "{b}"),
            Expr::ChordLit { base, word } => {
                let w: Vec<String> = word.iter().map(|((i, j), _)| chord_text(*i, *j)).collect();
                write!(f, "({base} * ({}))", w.join(" "))
            }
            Expr::Compose(a, b) => write!(f, "({a} ∘ {b})"),
            Expr::Tensor(a, b) => write!(f, "({a} ⊗ {b})"),
            Expr::Scale(c, a) => write!(f, "({c} {a})"),
            Expr::Sum(a, b) => write!(f, "({a} + {b})"),
            Expr::HScale(k, a) => write!(f, "(h^{k} {a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let n = parse_morphism("map(2->1)[1,1]").unwrap();
        assert_eq!(n.expr, Expr::MapLit(FinMap::merge_all(2)));
        let n = parse_morphism("braid(3){s1 s2'}[1,1,2]").unwrap();
        match n.expr {
            Expr::BraidLit(b) => {
                assert_eq!(b.braid().letters(), &[1, -2]);
                assert_eq!(b.attach(), &[0, 0, 1]);
            }
            _ => panic!(),
        }
        let n = parse_morphism("map(3->2)[1,1,2] * (t12)").unwrap();
        assert!(matches!(n.expr, Expr::ChordLit { ref word, .. } if word.len() == 1 && word[0].0 == (0, 1)));
        let n = parse_morphism("map(3->2)[1,1,2] * ()").unwrap();
        assert!(matches!(n.expr, Expr::ChordLit { ref word, .. } if word.is_empty()));
    }

    #[test]
    fn precedence_and_aliases() {
        let a = parse_morphism("1/24 h^2 map(2->1)[1,1] o braid(2){s1}[1,2] + map(2->1)[1,1]").unwrap();
        let b = parse_morphism("1/24 h^2 * map(2->1)[1,1] ∘ braid(2){s1}[1,2] + map(2->1)[1,1]").unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert!(a.to_string().starts_with("((1/24 (h^2 (map(2->1)[1,1] ∘ braid(2){s1}[1,2])))"));
        let t = parse_morphism("map(1->1)[1] x map(2->1)[1,1]").unwrap();
        assert_eq!(t.arity().unwrap(), (3, 2));
    }

    #[test]
    fn errors_carry_spans() {
        match parse_morphism("map(2->1)[1,1] ∘\n  map(2->1)[1,1]") {
            Err(Error::Type { span, .. }) => assert_eq!((span.line, span.col), (1, 1)),
            other => panic!("{other:?}"),
        }
        match parse_morphism("map(2->2)[1,2] + map(2->1)[1,1]") {
            Err(Error::Type { .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_morphism("map(2->1)[1,1] * (t13)") {
            Err(Error::Type { span, .. }) => assert_eq!((span.line, span.col, span.len), (1, 19, 3)),
            other => panic!("{other:?}"),
        }
        match parse_morphism("map(2->1)[1,1") {
            Err(Error::Syntax { span, msg }) => {
                assert_eq!(span.col, 14);
                assert!(msg.contains("`]`"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_morphism("map(2->1)[1,3]"), Err(Error::Type { .. })));
        assert!(matches!(parse_morphism("braid(2){s0}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_morphism("1/0 map(1->1)[1]"), Err(Error::Syntax { .. })));
    }
}
