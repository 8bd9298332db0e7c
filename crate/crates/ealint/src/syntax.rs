//! Lambda terms: abstract syntax, concrete syntax, and alpha renaming.
//!
//! The parser renames every binder to a globally unique name on ingest, so
//! the rest of the crate never has to deal with shadowing.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type Ident = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Ident),
    Abs(Ident, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(x: impl Into<Ident>) -> Term {
        Term::Var(x.into())
    }

    pub fn abs(x: impl Into<Ident>, body: Term) -> Term {
        Term::Abs(x.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Structural size: the number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

pub fn free_vars(t: &Term) -> BTreeSet<Ident> {
    fn go(t: &Term, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match t {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Number of occurrence sites of `x` in `t`.
///
/// Assumes `t` is alpha-renamed, so a name refers to a single variable.
pub fn count_occurrences(x: &str, t: &Term) -> usize {
    match t {
        Term::Var(y) => usize::from(y == x),
        Term::Abs(_, b) => count_occurrences(x, b),
        Term::App(f, a) => count_occurrences(x, f) + count_occurrences(x, a),
    }
}

/// All variable names of `t` (free and bound), in traversal order, binders
/// listed at their binding site and free variables at first occurrence.
pub fn variables_in_order(t: &Term) -> Vec<Ident> {
    fn go(t: &Term, seen: &mut BTreeSet<Ident>, out: &mut Vec<Ident>) {
        match t {
            Term::Var(x) => {
                if seen.insert(x.clone()) {
                    out.push(x.clone());
                }
            }
            Term::Abs(x, b) => {
                if seen.insert(x.clone()) {
                    out.push(x.clone());
                }
                go(b, seen, out);
            }
            Term::App(f, a) => {
                go(f, seen, out);
                go(a, seen, out);
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut BTreeSet::new(), &mut out);
    out
}

/// True if `t` has pairwise distinct binders, none of which shadows a free
/// variable.
pub fn is_alpha_renamed(t: &Term) -> bool {
    let free = free_vars(t);
    fn binders(t: &Term, out: &mut Vec<Ident>) {
        match t {
            Term::Var(_) => {}
            Term::Abs(x, b) => {
                out.push(x.clone());
                binders(b, out);
            }
            Term::App(f, a) => {
                binders(f, out);
                binders(a, out);
            }
        }
    }
    let mut bs = Vec::new();
    binders(t, &mut bs);
    let distinct: BTreeSet<_> = bs.iter().cloned().collect();
    distinct.len() == bs.len() && bs.iter().all(|b| !free.contains(b))
}

/// Rename binders so that every binder is globally unique and distinct from
/// every free variable. Conflicting binders get primes appended.
pub fn alpha_rename(t: &Term) -> Term {
    fn go(t: &Term, env: &HashMap<Ident, Ident>, used: &mut BTreeSet<Ident>) -> Term {
        match t {
            Term::Var(x) => Term::Var(env.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Abs(x, b) => {
                let mut fresh = x.clone();
                while used.contains(&fresh) {
                    fresh.push('\'');
                }
                used.insert(fresh.clone());
                let mut env2 = env.clone();
                env2.insert(x.clone(), fresh.clone());
                Term::Abs(fresh, Box::new(go(b, &env2, used)))
            }
            Term::App(f, a) => Term::App(
                Box::new(go(f, env, used)),
                Box::new(go(a, env, used)),
            ),
        }
    }
    let mut used: BTreeSet<Ident> = free_vars(t);
    go(t, &HashMap::new(), &mut used)
}

/// Alpha equivalence, by locally nameless comparison.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, ea: &mut Vec<Ident>, eb: &mut Vec<Ident>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ia = ea.iter().rposition(|v| v == x);
                let ib = eb.iter().rposition(|v| v == y);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Abs(x, ba), Term::Abs(y, bb)) => {
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(ba, bb, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Term::App(fa, aa), Term::App(fb, ab)) => {
                go(fa, fb, ea, eb) && go(aa, ab, ea, eb)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("syntax error at offset {0}: {1}")]
    Syntax(usize, String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Bang,
    Dollar,
    Ident(String),
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        match c {
            ' ' | '\t' | '\n' | '\r' => i += c.len_utf8(),
            '\\' | 'λ' => {
                toks.push((i, Tok::Lambda));
                i += c.len_utf8();
            }
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '!' => {
                toks.push((i, Tok::Bang));
                i += 1;
            }
            '$' => {
                toks.push((i, Tok::Dollar));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            c => return Err(ParseError::Syntax(i, format!("unexpected character {c:?}"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    allow_doors: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax(self.offset(), msg.into())
    }

    // term := abs | app ; app := factor { factor }
    fn term(&mut self) -> Result<Raw, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Lambda)
                | Some(Tok::Bang) | Some(Tok::Dollar) => {
                    let next = self.factor()?;
                    acc = Raw::App(Box::new(acc), Box::new(next));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Raw, ParseError> {
        match self.peek() {
            Some(Tok::Lambda) => {
                self.bump();
                let name = match self.bump() {
                    Some(Tok::Ident(x)) => x,
                    _ => return Err(self.err("expected binder name after lambda")),
                };
                match self.bump() {
                    Some(Tok::Dot) => {}
                    _ => return Err(self.err("expected '.' after binder")),
                }
                let body = self.term()?;
                Ok(Raw::Abs(name, Box::new(body)))
            }
            Some(Tok::Bang) if self.allow_doors => {
                self.bump();
                Ok(Raw::Bang(Box::new(self.factor()?)))
            }
            Some(Tok::Dollar) if self.allow_doors => {
                self.bump();
                Ok(Raw::CoBang(Box::new(self.factor()?)))
            }
            Some(Tok::Ident(_)) => {
                if let Some(Tok::Ident(x)) = self.bump() {
                    Ok(Raw::Var(x))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.term()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(t),
                    _ => Err(self.err("expected ')'")),
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Shared raw tree for the lambda and pseudo-term parsers.
pub(crate) enum Raw {
    Var(Ident),
    Abs(Ident, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
    Bang(Box<Raw>),
    CoBang(Box<Raw>),
}

pub(crate) fn parse_raw(text: &str, allow_doors: bool) -> Result<Raw, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let end = text.len();
    let mut p = Parser { toks, pos: 0, end, allow_doors };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

/// Parse a lambda term and alpha-rename its binders.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    fn lower(r: &Raw) -> Term {
        match r {
            Raw::Var(x) => Term::Var(x.clone()),
            Raw::Abs(x, b) => Term::abs(x.clone(), lower(b)),
            Raw::App(f, a) => Term::app(lower(f), lower(a)),
            Raw::Bang(_) | Raw::CoBang(_) => unreachable!("doors disabled"),
        }
    }
    let raw = parse_raw(text, false)?;
    Ok(alpha_rename(&lower(&raw)))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // prec 0: top/abs position, 1: function position, 2: argument position
        fn go(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Term::Var(x) => write!(f, "{x}"),
                Term::Abs(x, b) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    write!(f, "\\{x}.")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Term::App(fun, arg) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(fun, 1, f)?;
                    write!(f, " ")?;
                    go(arg, 2, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn church2() -> Term {
        parse_term("\\y.\\z. y (y z)").unwrap()
    }

    #[test]
    fn parses_church_two() {
        let t = church2();
        let expected = Term::abs(
            "y",
            Term::abs(
                "z",
                Term::app(Term::var("y"), Term::app(Term::var("y"), Term::var("z"))),
            ),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn parses_bare_variable() {
        assert_eq!(parse_term("x").unwrap(), Term::var("x"));
    }

    #[test]
    fn parses_self_application() {
        let t = parse_term("\\x. x x").unwrap();
        let expected = Term::abs("x", Term::app(Term::var("x"), Term::var("x")));
        assert_eq!(t, expected);
    }

    #[test]
    fn rejects_empty_and_garbage() {
        assert_eq!(parse_term(""), Err(ParseError::Empty));
        assert!(matches!(parse_term("\\x y"), Err(ParseError::Syntax(..))));
        assert!(matches!(parse_term("(x"), Err(ParseError::Syntax(..))));
        assert!(matches!(parse_term("x )"), Err(ParseError::Syntax(..))));
    }

    #[test]
    fn lambda_unicode_accepted() {
        assert_eq!(parse_term("λx.x").unwrap(), parse_term("\\x.x").unwrap());
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(free_vars(&Term::var("x")), ["x".to_string()].into());
        assert!(free_vars(&parse_term("\\x.x").unwrap()).is_empty());
        let t = Term::abs("y", Term::app(Term::var("y"), Term::var("z")));
        assert_eq!(free_vars(&t), ["z".to_string()].into());
    }

    #[test]
    fn occurrence_counts() {
        assert_eq!(count_occurrences("x", &Term::var("x")), 1);
        let Term::Abs(_, body) = church2() else { panic!() };
        assert_eq!(count_occurrences("y", &body), 2);
        assert_eq!(count_occurrences("w", &Term::var("x")), 0);
    }

    #[test]
    fn alpha_renaming_disambiguates_shadowing() {
        let t = parse_term("\\x.\\x. x x").unwrap();
        assert!(is_alpha_renamed(&t));
        // inner binder wins for both occurrences
        let Term::Abs(outer, b) = &t else { panic!() };
        let Term::Abs(inner, b2) = &**b else { panic!() };
        assert_ne!(outer, inner);
        assert_eq!(**b2, Term::app(Term::var(inner.clone()), Term::var(inner.clone())));
    }

    #[test]
    fn binder_never_shadows_free_variable() {
        let t = parse_term("(\\x. x y) (\\y. y)").unwrap();
        assert!(is_alpha_renamed(&t));
        assert!(free_vars(&t).contains("y"));
    }

    #[test]
    fn print_parse_round_trip() {
        for src in ["\\y.\\z. y (y z)", "x y z", "(\\x.x) (\\y.y y)", "\\f.\\g.\\x. f (g x)"] {
            let t = parse_term(src).unwrap();
            let back = parse_term(&t.to_string()).unwrap();
            assert!(alpha_eq(&t, &back), "round trip failed for {src}: {t}");
        }
    }

    #[test]
    fn alpha_eq_distinguishes() {
        let a = parse_term("\\x.x").unwrap();
        let b = parse_term("\\w.w").unwrap();
        let c = parse_term("\\x.\\y.x").unwrap();
        let d = parse_term("\\x.\\y.y").unwrap();
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&c, &d));
    }

    #[test]
    fn sizes() {
        assert_eq!(Term::var("x").size(), 1);
        assert_eq!(church2().size(), 7);
    }
}
