use crate::error::{Error, Result, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(u64),
    /// Letters optionally followed by digits: `map`, `s12`, `t13`, `h`, `o`, `x`.
    Ident(String),
    Slash,
    Prime,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Plus,
    Minus,
    Star,
    Caret,
    /// `∘` or `.`
    Compose,
    /// `⊗`
    Tensor,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Char offsets.
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> Span {
        Span { line: self.line, col: self.col, len: self.end - self.start }
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
        Tok::Slash => "`/`".into(),
        Tok::Prime => "`'`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Compose => "`∘`".into(),
        Tok::Tensor => "`⊗`".into(),
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start, l0, c0) = (i, line, col);
        let push = |tok: Tok, end: usize, out: &mut Vec<Token>| {
            out.push(Token { tok, line: l0, col: c0, start, end });
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<u64>().map_err(|_| Error::Syntax {
                span: Span { line, col, len: j - i },
                msg: format!("number {text} is too large"),
            })?;
            push(Tok::Int(n), j, &mut out);
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() && c != '∘' && c != '⊗' {
            let mut j = i;
            while j < chars.len() && chars[j].is_alphabetic() {
                j += 1;
            }
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let mut text: String = chars[i..j].iter().collect();
            if text == "ħ" {
                text = "h".into();
            }
            push(Tok::Ident(text), j, &mut out);
            col += j - i;
            i = j;
            continue;
        }
        let two = if i + 1 < chars.len() { Some(chars[i + 1]) } else { None };
        let (tok, w) = match c {
            '-' if two == Some('>') => (Tok::Arrow, 2),
            '→' => (Tok::Arrow, 1),
            '/' => (Tok::Slash, 1),
            '\'' | '′' => (Tok::Prime, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            '+' => (Tok::Plus, 1),
            '-' | '−' => (Tok::Minus, 1),
            '*' | '·' => (Tok::Star, 1),
            '^' => (Tok::Caret, 1),
            '∘' | '.' => (Tok::Compose, 1),
            '⊗' => (Tok::Tensor, 1),
            _ => {
                return Err(Error::Syntax { span: Span { line, col, len: 1 }, msg: format!("unexpected character `{c}`") });
            }
        };
        push(tok, i + w, &mut out);
        i += w;
        col += w;
    }
    out.push(Token { tok: Tok::Eof, line, col, start: chars.len(), end: chars.len() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let t = lex("map(2->1)[1,1]\n ∘ s2'").unwrap();
        let kinds: Vec<Tok> = t.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[0], Tok::Ident("map".into()));
        assert_eq!(kinds[3], Tok::Arrow);
        assert_eq!(t[11].tok, Tok::Compose);
        assert_eq!((t[11].line, t[11].col), (2, 2));
        assert_eq!(t[12].tok, Tok::Ident("s2".into()));
        assert_eq!(t[13].tok, Tok::Prime);
        assert!(matches!(lex("map $"), Err(Error::Syntax { span: Span { line: 1, col: 5, .. }, .. })));
    }
}
