//! Pseudo-terms: lambda terms with box-door marks, the bracketing, scope
//! and typing conditions, and the boxing decomposition.
//!
//! `!t` marks a main door (printed `!`), `$t` an auxiliary door.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::simple::SimpleType;
use crate::syntax::{parse_raw, Ident, ParseError, Raw, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PseudoTerm {
    Var(Ident),
    Abs(Ident, Box<PseudoTerm>),
    App(Box<PseudoTerm>, Box<PseudoTerm>),
    Bang(Box<PseudoTerm>),
    CoBang(Box<PseudoTerm>),
}

impl PseudoTerm {
    pub fn var(x: impl Into<Ident>) -> PseudoTerm {
        PseudoTerm::Var(x.into())
    }

    pub fn abs(x: impl Into<Ident>, b: PseudoTerm) -> PseudoTerm {
        PseudoTerm::Abs(x.into(), Box::new(b))
    }

    pub fn app(f: PseudoTerm, a: PseudoTerm) -> PseudoTerm {
        PseudoTerm::App(Box::new(f), Box::new(a))
    }

    pub fn bang(b: PseudoTerm) -> PseudoTerm {
        PseudoTerm::Bang(Box::new(b))
    }

    pub fn cobang(b: PseudoTerm) -> PseudoTerm {
        PseudoTerm::CoBang(Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            PseudoTerm::Var(_) => 1,
            PseudoTerm::Abs(_, b) | PseudoTerm::Bang(b) | PseudoTerm::CoBang(b) => 1 + b.size(),
            PseudoTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn children(&self) -> Vec<&PseudoTerm> {
        match self {
            PseudoTerm::Var(_) => vec![],
            PseudoTerm::Abs(_, b) | PseudoTerm::Bang(b) | PseudoTerm::CoBang(b) => vec![b],
            PseudoTerm::App(f, a) => vec![f, a],
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&PseudoTerm> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }
}

/// Drop every door mark.
pub fn erase(t: &PseudoTerm) -> Term {
    match t {
        PseudoTerm::Var(x) => Term::Var(x.clone()),
        PseudoTerm::Abs(x, b) => Term::abs(x.clone(), erase(b)),
        PseudoTerm::App(f, a) => Term::app(erase(f), erase(a)),
        PseudoTerm::Bang(b) | PseudoTerm::CoBang(b) => erase(b),
    }
}

pub fn free_vars(t: &PseudoTerm) -> std::collections::BTreeSet<Ident> {
    crate::syntax::free_vars(&erase(t))
}

/// A restricted pseudo-term carries one signed door chain per grammar slot:
/// a chain never mixes main and auxiliary doors.
pub fn is_restricted(t: &PseudoTerm) -> bool {
    fn chain(t: &PseudoTerm) -> bool {
        let mut cur = t;
        let mut bangs = 0usize;
        let mut cobangs = 0usize;
        loop {
            match cur {
                PseudoTerm::Bang(b) => {
                    bangs += 1;
                    cur = b;
                }
                PseudoTerm::CoBang(b) => {
                    cobangs += 1;
                    cur = b;
                }
                _ => break,
            }
        }
        if bangs > 0 && cobangs > 0 {
            return false;
        }
        match cur {
            PseudoTerm::Var(_) => true,
            PseudoTerm::Abs(_, b) => chain(b),
            PseudoTerm::App(f, a) => chain(f) && chain(a),
            _ => unreachable!(),
        }
    }
    chain(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Door {
    Open,
    Close,
}

pub type DoorWord = Vec<Door>;

pub fn word_sum(w: &[Door]) -> i64 {
    w.iter()
        .map(|d| match d {
            Door::Open => 1,
            Door::Close => -1,
        })
        .sum()
}

/// Root-to-leaf child-index path of a variable occurrence.
pub type Path = Vec<usize>;

#[derive(Clone, Debug)]
pub struct Occurrence {
    pub path: Path,
    pub name: Ident,
    pub free: bool,
    /// Doors holding the occurrence in their scope, outermost first.
    pub word: DoorWord,
}

/// All variable occurrences with their door words, in traversal order.
pub fn occurrences(t: &PseudoTerm) -> Vec<Occurrence> {
    fn go(
        t: &PseudoTerm,
        path: &mut Path,
        word: &mut DoorWord,
        bound: &mut Vec<Ident>,
        out: &mut Vec<Occurrence>,
    ) {
        match t {
            PseudoTerm::Var(x) => out.push(Occurrence {
                path: path.clone(),
                name: x.clone(),
                free: !bound.iter().any(|b| b == x),
                word: word.clone(),
            }),
            PseudoTerm::Abs(x, b) => {
                bound.push(x.clone());
                path.push(0);
                go(b, path, word, bound, out);
                path.pop();
                bound.pop();
            }
            PseudoTerm::App(f, a) => {
                path.push(0);
                go(f, path, word, bound, out);
                path.pop();
                path.push(1);
                go(a, path, word, bound, out);
                path.pop();
            }
            PseudoTerm::Bang(b) => {
                word.push(Door::Open);
                path.push(0);
                go(b, path, word, bound, out);
                path.pop();
                word.pop();
            }
            PseudoTerm::CoBang(b) => {
                word.push(Door::Close);
                path.push(0);
                go(b, path, word, bound, out);
                path.pop();
                word.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("path does not address a variable occurrence")]
pub struct InvalidPath;

/// Door word of the occurrence addressed by `path`.
pub fn word(t: &PseudoTerm, path: &[usize]) -> Result<DoorWord, InvalidPath> {
    match t.at_path(path) {
        Some(PseudoTerm::Var(_)) => {}
        _ => return Err(InvalidPath),
    }
    let mut w = DoorWord::new();
    let mut cur = t;
    for &i in path {
        match cur {
            PseudoTerm::Bang(_) => w.push(Door::Open),
            PseudoTerm::CoBang(_) => w.push(Door::Close),
            _ => {}
        }
        cur = cur.children()[i];
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketCheck {
    Pass,
    /// The occurrence whose word misbehaves, and the offending prefix length
    /// (`prefix_len == word.len()` flags a nonzero total for a free occurrence).
    Fail { occurrence: Path, prefix_len: usize },
}

/// Prefix sums stay nonnegative on every occurrence word; free occurrences
/// additionally close fully.
pub fn check_bracketing(t: &PseudoTerm) -> BracketCheck {
    for occ in occurrences(t) {
        let mut sum = 0i64;
        for (i, d) in occ.word.iter().enumerate() {
            sum += if *d == Door::Open { 1 } else { -1 };
            if sum < 0 {
                return BracketCheck::Fail { occurrence: occ.path, prefix_len: i + 1 };
            }
        }
        if occ.free && sum != 0 {
            let n = occ.word.len();
            return BracketCheck::Fail { occurrence: occ.path, prefix_len: n };
        }
    }
    BracketCheck::Pass
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScopeCheck {
    Pass,
    Fail { abstraction: Path, occurrence: Path },
}

/// Inside each abstraction body, the word over each bound occurrence is
/// fully well-bracketed.
pub fn check_scope(t: &PseudoTerm) -> ScopeCheck {
    fn subterms<'a>(t: &'a PseudoTerm, path: &mut Path, out: &mut Vec<(Path, &'a PseudoTerm)>) {
        out.push((path.clone(), t));
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            subterms(c, path, out);
            path.pop();
        }
    }
    let mut subs = Vec::new();
    subterms(t, &mut Vec::new(), &mut subs);
    for (apath, sub) in subs {
        let PseudoTerm::Abs(x, body) = sub else { continue };
        for occ in occurrences(body) {
            if occ.name != *x || !occ.free {
                continue;
            }
            let mut sum = 0i64;
            let mut bad = false;
            for d in &occ.word {
                sum += if *d == Door::Open { 1 } else { -1 };
                if sum < 0 {
                    bad = true;
                    break;
                }
            }
            if bad || sum != 0 {
                let mut opath = apath.clone();
                opath.push(0);
                opath.extend(occ.path.iter());
                return ScopeCheck::Fail { abstraction: apath, occurrence: opath };
            }
        }
    }
    ScopeCheck::Pass
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EALType {
    Atom(Ident),
    Bang(Box<EALType>),
    Lollipop(Box<EALType>, Box<EALType>),
}

impl EALType {
    pub fn atom(a: impl Into<Ident>) -> EALType {
        EALType::Atom(a.into())
    }

    pub fn bang(t: EALType) -> EALType {
        EALType::Bang(Box::new(t))
    }

    pub fn lolli(d: EALType, c: EALType) -> EALType {
        EALType::Lollipop(Box::new(d), Box::new(c))
    }

    /// Drop every `!`.
    pub fn erase(&self) -> SimpleType {
        match self {
            EALType::Atom(a) => SimpleType::Atom(a.clone()),
            EALType::Bang(t) => t.erase(),
            EALType::Lollipop(d, c) => SimpleType::arrow(d.erase(), c.erase()),
        }
    }
}

impl fmt::Display for EALType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EALType::Atom(a) => write!(f, "{a}"),
            EALType::Bang(t) => match **t {
                EALType::Lollipop(..) => write!(f, "!({t})"),
                _ => write!(f, "!{t}"),
            },
            EALType::Lollipop(d, c) => match **d {
                EALType::Lollipop(..) => write!(f, "({d}) -o {c}"),
                _ => write!(f, "{d} -o {c}"),
            },
        }
    }
}

/// `!A`, `A -o B` right associative, atoms as identifiers.
pub fn parse_eal_type(text: &str) -> Result<EALType, ParseError> {
    let chars: Vec<char> = text.chars().chain(['\0']).collect();
    fn skip(chars: &[char], pos: &mut usize) {
        while chars[*pos].is_whitespace() {
            *pos += 1;
        }
    }
    fn atom(chars: &[char], pos: &mut usize) -> Result<EALType, ParseError> {
        skip(chars, pos);
        match chars[*pos] {
            '!' => {
                *pos += 1;
                Ok(EALType::bang(atom(chars, pos)?))
            }
            '(' => {
                *pos += 1;
                let t = lolli(chars, pos)?;
                skip(chars, pos);
                if chars[*pos] != ')' {
                    return Err(ParseError::Syntax(*pos, "expected ')'".into()));
                }
                *pos += 1;
                Ok(t)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = *pos;
                while chars[*pos].is_ascii_alphanumeric()
                    || chars[*pos] == '_'
                    || chars[*pos] == '\''
                {
                    *pos += 1;
                }
                Ok(EALType::Atom(chars[start..*pos].iter().collect()))
            }
            _ => Err(ParseError::Syntax(*pos, "expected a type".into())),
        }
    }
    fn lolli(chars: &[char], pos: &mut usize) -> Result<EALType, ParseError> {
        let lhs = atom(chars, pos)?;
        skip(chars, pos);
        if chars[*pos] == '-' && chars[*pos + 1] == 'o' {
            *pos += 2;
            Ok(EALType::lolli(lhs, lolli(chars, pos)?))
        } else {
            Ok(lhs)
        }
    }
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut pos = 0usize;
    let t = lolli(&chars, &mut pos)?;
    skip(&chars, &mut pos);
    if chars[pos] != '\0' {
        return Err(ParseError::Syntax(pos, "trailing input".into()));
    }
    Ok(t)
}

/// Map from every variable of a pseudo-term to its type.
pub type EALAssignment = BTreeMap<Ident, EALType>;

/// Extend an assignment from variables to whole subterms.
///
/// `Err` carries the path of the first (innermost, traversal order) subterm
/// the extension is undefined on.
pub fn extend_assignment(gamma: &EALAssignment, t: &PseudoTerm) -> Result<EALType, Path> {
    fn go(gamma: &EALAssignment, t: &PseudoTerm, path: &mut Path) -> Result<EALType, Path> {
        match t {
            PseudoTerm::Var(x) => gamma.get(x).cloned().ok_or_else(|| path.clone()),
            PseudoTerm::Abs(x, b) => {
                let dom = gamma.get(x).cloned().ok_or_else(|| path.clone())?;
                path.push(0);
                let cod = go(gamma, b, path)?;
                path.pop();
                Ok(EALType::lolli(dom, cod))
            }
            PseudoTerm::App(f, a) => {
                path.push(0);
                let tf = go(gamma, f, path)?;
                path.pop();
                path.push(1);
                let ta = go(gamma, a, path)?;
                path.pop();
                match tf {
                    EALType::Lollipop(d, c) if *d == ta => Ok(*c),
                    _ => Err(path.clone()),
                }
            }
            PseudoTerm::Bang(b) => {
                path.push(0);
                let tb = go(gamma, b, path)?;
                path.pop();
                Ok(EALType::bang(tb))
            }
            PseudoTerm::CoBang(b) => {
                path.push(0);
                let tb = go(gamma, b, path)?;
                path.pop();
                match tb {
                    EALType::Bang(inner) => Ok(*inner),
                    _ => Err(path.clone()),
                }
            }
        }
    }
    go(gamma, t, &mut Vec::new())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypingCheck {
    Pass,
    /// The extension is undefined at this subterm.
    Undefined(Path),
    /// A variable with two or more occurrences whose type is not banged.
    UnbangedShared(Ident),
}

pub fn check_typing_condition(t: &PseudoTerm, gamma: &EALAssignment) -> TypingCheck {
    if let Err(p) = extend_assignment(gamma, t) {
        return TypingCheck::Undefined(p);
    }
    let mut counts: BTreeMap<Ident, usize> = BTreeMap::new();
    for occ in occurrences(t) {
        *counts.entry(occ.name).or_insert(0) += 1;
    }
    for (name, n) in counts {
        if n >= 2 {
            match gamma.get(&name) {
                Some(EALType::Bang(_)) => {}
                _ => return TypingCheck::UnbangedShared(name),
            }
        }
    }
    TypingCheck::Pass
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxingError {
    #[error("decomposition requires a term of shape !u")]
    NotABang,
    #[error("decomposition requires the bracketing condition")]
    NotBracketed,
}

/// Split `!u` into a linear skeleton and its auxiliary-door subterms.
///
/// The outermost `!` is the opening bracket; every auxiliary door whose
/// running depth first returns below the box boundary becomes a door
/// subterm, replaced in the skeleton by a fresh `#b<i>` variable,
/// left to right.
pub fn boxing_decompose(
    t: &PseudoTerm,
) -> Result<(PseudoTerm, Vec<(Ident, PseudoTerm)>), BoxingError> {
    let PseudoTerm::Bang(u) = t else {
        return Err(BoxingError::NotABang);
    };
    if check_bracketing(t) != BracketCheck::Pass {
        return Err(BoxingError::NotBracketed);
    }
    fn go(
        t: &PseudoTerm,
        depth: i64,
        doors: &mut Vec<(Ident, PseudoTerm)>,
    ) -> PseudoTerm {
        match t {
            PseudoTerm::Var(x) => PseudoTerm::Var(x.clone()),
            PseudoTerm::Abs(x, b) => PseudoTerm::abs(x.clone(), go(b, depth, doors)),
            PseudoTerm::App(f, a) => {
                let f2 = go(f, depth, doors);
                let a2 = go(a, depth, doors);
                PseudoTerm::app(f2, a2)
            }
            PseudoTerm::Bang(b) => PseudoTerm::bang(go(b, depth + 1, doors)),
            PseudoTerm::CoBang(b) => {
                if depth == 0 {
                    let name = format!("#b{}", doors.len());
                    doors.push((name.clone(), (**b).clone()));
                    PseudoTerm::Var(name)
                } else {
                    PseudoTerm::cobang(go(b, depth - 1, doors))
                }
            }
        }
    }
    let mut doors = Vec::new();
    let skeleton = go(u, 0, &mut doors);
    Ok((skeleton, doors))
}

/// Substitute `replacement` for free occurrences of `x`. Binders are
/// globally unique here, so no capture handling is needed.
pub fn substitute(t: &PseudoTerm, x: &str, replacement: &PseudoTerm) -> PseudoTerm {
    match t {
        PseudoTerm::Var(y) => {
            if y == x {
                replacement.clone()
            } else {
                t.clone()
            }
        }
        PseudoTerm::Abs(y, b) => {
            if y == x {
                t.clone()
            } else {
                PseudoTerm::abs(y.clone(), substitute(b, x, replacement))
            }
        }
        PseudoTerm::App(f, a) => {
            PseudoTerm::app(substitute(f, x, replacement), substitute(a, x, replacement))
        }
        PseudoTerm::Bang(b) => PseudoTerm::bang(substitute(b, x, replacement)),
        PseudoTerm::CoBang(b) => PseudoTerm::cobang(substitute(b, x, replacement)),
    }
}

impl fmt::Display for PseudoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // prec 0: top, 1: function position, 2: argument position,
        // 3: under a door mark
        fn go(t: &PseudoTerm, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                PseudoTerm::Var(x) => write!(f, "{x}"),
                PseudoTerm::Abs(x, b) => {
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
                PseudoTerm::App(fun, arg) => {
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
                PseudoTerm::Bang(b) => {
                    write!(f, "!")?;
                    go(b, 3, f)
                }
                PseudoTerm::CoBang(b) => {
                    write!(f, "$")?;
                    go(b, 3, f)
                }
            }
        }
        go(self, 0, f)
    }
}

/// Parse a pseudo-term. Unlike `parse_term` this does not alpha-rename:
/// door placement is positional and callers supply assignments by name.
pub fn parse_pseudo_term(text: &str) -> Result<PseudoTerm, ParseError> {
    fn lower(r: &Raw) -> PseudoTerm {
        match r {
            Raw::Var(x) => PseudoTerm::Var(x.clone()),
            Raw::Abs(x, b) => PseudoTerm::abs(x.clone(), lower(b)),
            Raw::App(f, a) => PseudoTerm::app(lower(f), lower(a)),
            Raw::Bang(b) => PseudoTerm::bang(lower(b)),
            Raw::CoBang(b) => PseudoTerm::cobang(lower(b)),
        }
    }
    Ok(lower(&parse_raw(text, true)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn erasure_removes_doors() {
        let t = PseudoTerm::bang(PseudoTerm::abs("x", PseudoTerm::cobang(PseudoTerm::var("x"))));
        assert_eq!(erase(&t), parse_term("\\x.x").unwrap());
        assert_eq!(erase(&PseudoTerm::var("x")), Term::var("x"));
    }

    #[test]
    fn words_follow_the_clauses() {
        let t = PseudoTerm::var("x");
        assert_eq!(word(&t, &[]).unwrap(), vec![]);

        let t = PseudoTerm::bang(PseudoTerm::abs("y", PseudoTerm::cobang(PseudoTerm::var("y"))));
        let w = word(&t, &[0, 0, 0]).unwrap();
        assert_eq!(w, vec![Door::Open, Door::Close]);
        assert_eq!(word_sum(&w), 0);

        let t = PseudoTerm::cobang(PseudoTerm::bang(PseudoTerm::var("x")));
        let w = word(&t, &[0, 0]).unwrap();
        assert_eq!(w, vec![Door::Close, Door::Open]);
        assert!(word(&t, &[0]).is_err());
    }

    #[test]
    fn bracketing_examples() {
        let bad = PseudoTerm::cobang(PseudoTerm::var("x"));
        assert_eq!(
            check_bracketing(&bad),
            BracketCheck::Fail { occurrence: vec![0], prefix_len: 1 }
        );

        let good = PseudoTerm::bang(PseudoTerm::abs("x", PseudoTerm::cobang(PseudoTerm::var("x"))));
        assert_eq!(check_bracketing(&good), BracketCheck::Pass);

        // free occurrence under an unclosed door
        let open_free = PseudoTerm::bang(PseudoTerm::var("x"));
        assert_eq!(
            check_bracketing(&open_free),
            BracketCheck::Fail { occurrence: vec![0], prefix_len: 1 }
        );
    }

    #[test]
    fn scope_examples() {
        assert_eq!(check_scope(&PseudoTerm::abs("x", PseudoTerm::var("x"))), ScopeCheck::Pass);

        let t = PseudoTerm::bang(PseudoTerm::abs("x", PseudoTerm::cobang(PseudoTerm::var("x"))));
        assert_eq!(
            check_scope(&t),
            ScopeCheck::Fail { abstraction: vec![0], occurrence: vec![0, 0, 0] }
        );

        let t = PseudoTerm::abs("x", PseudoTerm::bang(PseudoTerm::var("x")));
        assert_eq!(
            check_scope(&t),
            ScopeCheck::Fail { abstraction: vec![], occurrence: vec![0, 0] }
        );
    }

    #[test]
    fn assignment_extension_clauses() {
        let mut g = EALAssignment::new();
        g.insert("x".into(), EALType::atom("a"));
        let id = PseudoTerm::abs("x", PseudoTerm::var("x"));
        assert_eq!(
            extend_assignment(&g, &id),
            Ok(EALType::lolli(EALType::atom("a"), EALType::atom("a")))
        );

        let t = PseudoTerm::cobang(PseudoTerm::var("x"));
        assert_eq!(extend_assignment(&g, &t), Err(vec![]));

        let mut g = EALAssignment::new();
        g.insert("f".into(), EALType::lolli(EALType::atom("a"), EALType::atom("b")));
        g.insert("a".into(), EALType::atom("a"));
        let t = PseudoTerm::app(PseudoTerm::var("f"), PseudoTerm::var("a"));
        assert_eq!(extend_assignment(&g, &t), Ok(EALType::atom("b")));
    }

    #[test]
    fn typing_condition_examples() {
        let mut g = EALAssignment::new();
        g.insert("x".into(), EALType::lolli(EALType::atom("a"), EALType::atom("a")));
        let t = PseudoTerm::app(PseudoTerm::var("x"), PseudoTerm::var("x"));
        // extension already fails on the self-application, and even with a
        // matching shape the unbanged shared variable would fail
        assert_ne!(check_typing_condition(&t, &g), TypingCheck::Pass);

        let mut g = EALAssignment::new();
        g.insert("x".into(), EALType::atom("a"));
        assert_eq!(
            check_typing_condition(&PseudoTerm::abs("x", PseudoTerm::var("x")), &g),
            TypingCheck::Pass
        );

        // x : (a -o a) -o b applied to the identity; single occurrences
        // everywhere, so no bang is required
        let id_ty = EALType::lolli(EALType::atom("a"), EALType::atom("a"));
        let mut g2 = EALAssignment::new();
        g2.insert("x".into(), EALType::lolli(id_ty, EALType::atom("b")));
        g2.insert("w".into(), EALType::atom("a"));
        let t = PseudoTerm::app(
            PseudoTerm::var("x"),
            PseudoTerm::abs("w", PseudoTerm::var("w")),
        );
        assert_eq!(check_typing_condition(&t, &g2), TypingCheck::Pass);
    }

    #[test]
    fn unbanged_shared_variable_detected() {
        let mut g = EALAssignment::new();
        g.insert("f".into(), EALType::lolli(EALType::atom("a"), EALType::atom("a")));
        g.insert("x".into(), EALType::atom("a"));
        g.insert("g".into(), EALType::lolli(
            EALType::atom("a"),
            EALType::lolli(EALType::atom("a"), EALType::atom("a")),
        ));
        // g x x with x : a used twice, not banged
        let t = PseudoTerm::app(
            PseudoTerm::app(PseudoTerm::var("g"), PseudoTerm::var("x")),
            PseudoTerm::var("x"),
        );
        assert_eq!(check_typing_condition(&t, &g), TypingCheck::UnbangedShared("x".into()));
    }

    #[test]
    fn boxing_zero_doors() {
        let t = PseudoTerm::bang(PseudoTerm::abs("x", PseudoTerm::var("x")));
        let (v, doors) = boxing_decompose(&t).unwrap();
        assert_eq!(v, PseudoTerm::abs("x", PseudoTerm::var("x")));
        assert!(doors.is_empty());
    }

    #[test]
    fn boxing_two_doors() {
        let t = PseudoTerm::bang(PseudoTerm::app(
            PseudoTerm::cobang(PseudoTerm::var("a")),
            PseudoTerm::cobang(PseudoTerm::var("b")),
        ));
        let (v, doors) = boxing_decompose(&t).unwrap();
        assert_eq!(v, PseudoTerm::app(PseudoTerm::var("#b0"), PseudoTerm::var("#b1")));
        assert_eq!(doors, vec![
            ("#b0".to_string(), PseudoTerm::var("a")),
            ("#b1".to_string(), PseudoTerm::var("b")),
        ]);
    }

    #[test]
    fn boxing_under_binder() {
        let t = PseudoTerm::bang(PseudoTerm::abs(
            "w",
            PseudoTerm::app(PseudoTerm::cobang(PseudoTerm::var("f")), PseudoTerm::var("w")),
        ));
        let (v, doors) = boxing_decompose(&t).unwrap();
        assert_eq!(
            v,
            PseudoTerm::abs("w", PseudoTerm::app(PseudoTerm::var("#b0"), PseudoTerm::var("w")))
        );
        assert_eq!(doors, vec![("#b0".to_string(), PseudoTerm::var("f"))]);
    }

    #[test]
    fn boxing_round_trip() {
        let samples = [
            PseudoTerm::bang(PseudoTerm::app(
                PseudoTerm::cobang(PseudoTerm::var("a")),
                PseudoTerm::cobang(PseudoTerm::bang(PseudoTerm::cobang(PseudoTerm::var("b")))),
            )),
            PseudoTerm::bang(PseudoTerm::abs(
                "x",
                PseudoTerm::app(
                    PseudoTerm::cobang(PseudoTerm::var("f")),
                    PseudoTerm::bang(PseudoTerm::cobang(PseudoTerm::var("x"))),
                ),
            )),
        ];
        for t in samples {
            let (v, doors) = boxing_decompose(&t).unwrap();
            let mut rebuilt = v.clone();
            for (x, u) in &doors {
                rebuilt = substitute(&rebuilt, x, &PseudoTerm::cobang(u.clone()));
            }
            assert_eq!(PseudoTerm::bang(rebuilt).to_string(), t.to_string());
            for (x, _) in &doors {
                assert_eq!(crate::syntax::count_occurrences(x, &erase(&v)), 1);
            }
        }
    }

    #[test]
    fn boxing_rejects_bad_inputs() {
        assert_eq!(boxing_decompose(&PseudoTerm::var("x")), Err(BoxingError::NotABang));
        let t = PseudoTerm::bang(PseudoTerm::cobang(PseudoTerm::cobang(PseudoTerm::var("x"))));
        assert_eq!(boxing_decompose(&t), Err(BoxingError::NotBracketed));
    }

    #[test]
    fn pseudo_term_round_trip() {
        for src in ["!\\x.$x", "!($a $b)", "\\x.!x", "$(!x) y", "!!\\f.\\x.$f ($f x)"] {
            let t = parse_pseudo_term(src).unwrap();
            assert_eq!(parse_pseudo_term(&t.to_string()).unwrap(), t, "src {src}");
        }
    }

    #[test]
    fn eal_type_round_trip() {
        for src in ["a", "!a", "!(a -o a) -o (!a -o !a)", "!!a -o b"] {
            let t = parse_eal_type(src).unwrap();
            assert_eq!(parse_eal_type(&t.to_string()).unwrap(), t, "src {src}");
        }
    }

    #[test]
    fn eal_type_erasure() {
        let t = parse_eal_type("!(a -o a) -o (!a -o !a)").unwrap();
        assert_eq!(t.erase(), crate::simple::parse_simple_type("(a->a)->a->a").unwrap());
    }
}
