//! Simple types and principal type inference by first-order unification.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Ident, ParseError, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Atom(Ident),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn atom(name: impl Into<Ident>) -> SimpleType {
        SimpleType::Atom(name.into())
    }

    pub fn arrow(dom: SimpleType, cod: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Arrow connectives plus atomic subtype occurrences.
    pub fn size(&self) -> usize {
        match self {
            SimpleType::Atom(_) => 1,
            SimpleType::Arrow(d, c) => 1 + d.size() + c.size(),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Atom(a) => write!(f, "{a}"),
            SimpleType::Arrow(d, c) => {
                match **d {
                    SimpleType::Arrow(..) => write!(f, "({d})->{c}"),
                    _ => write!(f, "{d}->{c}"),
                }
            }
        }
    }
}

/// `a->b->c` right associative, parentheses allowed.
pub fn parse_simple_type(text: &str) -> Result<SimpleType, ParseError> {
    let mut chars: Vec<char> = text.chars().collect();
    chars.push('\0');
    let mut pos = 0usize;
    fn skip(chars: &[char], pos: &mut usize) {
        while chars[*pos].is_whitespace() {
            *pos += 1;
        }
    }
    fn atom(chars: &[char], pos: &mut usize) -> Result<SimpleType, ParseError> {
        skip(chars, pos);
        match chars[*pos] {
            '(' => {
                *pos += 1;
                let t = arrow(chars, pos)?;
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
                Ok(SimpleType::Atom(chars[start..*pos].iter().collect()))
            }
            _ => Err(ParseError::Syntax(*pos, "expected a type".into())),
        }
    }
    fn arrow(chars: &[char], pos: &mut usize) -> Result<SimpleType, ParseError> {
        let lhs = atom(chars, pos)?;
        skip(chars, pos);
        if chars[*pos] == '-' && chars[*pos + 1] == '>' {
            *pos += 2;
            let rhs = arrow(chars, pos)?;
            Ok(SimpleType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let t = arrow(&chars, &mut pos)?;
    skip(&chars, &mut pos);
    if chars[pos] != '\0' {
        return Err(ParseError::Syntax(pos, "trailing input".into()));
    }
    Ok(t)
}

/// Total on the variables (free and bound) of its term.
pub type SimpleAssignment = BTreeMap<Ident, SimpleType>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("term is not simply typable")]
    NotSimplyTypable,
    #[error("context type for {0} clashes with the term's principal typing")]
    InconsistentContext(Ident),
}

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Var(u32),
    Arrow(Box<Ty>, Box<Ty>),
}

struct Infer {
    subst: HashMap<u32, Ty>,
    next: u32,
    /// Variables standing for user-supplied atoms; they unify only with
    /// flexible variables or themselves.
    rigid: HashSet<u32>,
}

impl Infer {
    fn fresh(&mut self) -> Ty {
        let v = self.next;
        self.next += 1;
        Ty::Var(v)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match self.subst.get(v) {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            Ty::Arrow(d, c) => Ty::Arrow(Box::new(self.resolve(d)), Box::new(self.resolve(c))),
        }
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match t {
            Ty::Var(w) => {
                if *w == v {
                    true
                } else if let Some(u) = self.subst.get(w) {
                    let u = u.clone();
                    self.occurs(v, &u)
                } else {
                    false
                }
            }
            Ty::Arrow(d, c) => self.occurs(v, d) || self.occurs(v, c),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), TypeError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (a, b) {
            (Ty::Var(v), Ty::Var(w)) if v == w => Ok(()),
            (Ty::Var(v), Ty::Var(w)) => {
                // bind the flexible side; distinct rigid atoms never unify
                if self.rigid.contains(&v) && self.rigid.contains(&w) {
                    Err(TypeError::NotSimplyTypable)
                } else if self.rigid.contains(&v) {
                    self.subst.insert(w, Ty::Var(v));
                    Ok(())
                } else {
                    self.subst.insert(v, Ty::Var(w));
                    Ok(())
                }
            }
            (Ty::Var(v), t) | (t, Ty::Var(v)) => {
                if self.rigid.contains(&v) || self.occurs(v, &t) {
                    return Err(TypeError::NotSimplyTypable);
                }
                self.subst.insert(v, t);
                Ok(())
            }
            (Ty::Arrow(d1, c1), Ty::Arrow(d2, c2)) => {
                self.unify(&d1, &d2)?;
                self.unify(&c1, &c2)
            }
        }
    }

    fn infer(&mut self, t: &Term, env: &mut HashMap<Ident, Ty>) -> Result<Ty, TypeError> {
        match t {
            Term::Var(x) => {
                let ty = env.entry(x.clone()).or_insert_with(|| {
                    let v = self.next;
                    self.next += 1;
                    Ty::Var(v)
                });
                Ok(ty.clone())
            }
            Term::Abs(x, b) => {
                let dom = self.fresh();
                env.insert(x.clone(), dom.clone());
                let cod = self.infer(b, env)?;
                Ok(Ty::Arrow(Box::new(dom), Box::new(cod)))
            }
            Term::App(f, a) => {
                let tf = self.infer(f, env)?;
                let ta = self.infer(a, env)?;
                let res = self.fresh();
                self.unify(&tf, &Ty::Arrow(Box::new(ta), Box::new(res.clone())))?;
                Ok(res)
            }
        }
    }
}

fn lift_simple(t: &SimpleType, pool: &mut HashMap<Ident, Ty>, inf: &mut Infer) -> Ty {
    match t {
        SimpleType::Atom(a) => pool
            .entry(a.clone())
            .or_insert_with(|| {
                let v = inf.next;
                inf.next += 1;
                inf.rigid.insert(v);
                Ty::Var(v)
            })
            .clone(),
        SimpleType::Arrow(d, c) => Ty::Arrow(
            Box::new(lift_simple(d, pool, inf)),
            Box::new(lift_simple(c, pool, inf)),
        ),
    }
}

/// Principal simple typing of an alpha-renamed term.
///
/// The returned assignment is total on the variables of the term; residual
/// type variables are renamed `a0`, `a1`, ... in traversal order, so output
/// is deterministic.
pub fn principal_type(t: &Term) -> Result<(SimpleAssignment, SimpleType), TypeError> {
    principal_type_with(t, &[])
}

/// Principal typing with extra forced bindings; each listed variable's type
/// is unified against the inferred one. Variables not occurring in the term
/// simply enter the assignment. A unification failure against a variable
/// that does occur is reported as an inconsistent context.
pub fn principal_type_with(
    t: &Term,
    forced: &[(Ident, SimpleType)],
) -> Result<(SimpleAssignment, SimpleType), TypeError> {
    let mut inf = Infer { subst: HashMap::new(), next: 0, rigid: HashSet::new() };
    let mut env: HashMap<Ident, Ty> = HashMap::new();
    let ty = inf.infer(t, &mut env)?;

    // rigid atoms from user-supplied types share one pool so that equal
    // names mean equal types
    let mut pool: HashMap<Ident, Ty> = HashMap::new();
    for (x, want) in forced {
        let lifted = lift_simple(want, &mut pool, &mut inf);
        if let Some(have) = env.get(x).cloned() {
            inf.unify(&have, &lifted)
                .map_err(|_| TypeError::InconsistentContext(x.clone()))?;
        } else {
            env.insert(x.clone(), lifted);
        }
    }

    // canonical atom names in traversal order
    let mut order: Vec<Ident> = crate::syntax::variables_in_order(t);
    for (x, _) in forced {
        if !order.iter().any(|v| v == x) {
            order.push(x.clone());
        }
    }
    // user-supplied atoms keep their names; fresh variables take the first
    // unused a0, a1, ... in traversal order
    let mut names: HashMap<u32, Ident> = HashMap::new();
    let mut used: HashSet<Ident> = HashSet::new();
    for (name, ty) in &pool {
        if let Ty::Var(v) = ty {
            names.insert(*v, name.clone());
            used.insert(name.clone());
        }
    }
    let mut counter = 0u32;
    let canon = |t: &Ty,
                 names: &mut HashMap<u32, Ident>,
                 used: &HashSet<Ident>,
                 counter: &mut u32|
     -> SimpleType {
        fn go(
            t: &Ty,
            names: &mut HashMap<u32, Ident>,
            used: &HashSet<Ident>,
            counter: &mut u32,
        ) -> SimpleType {
            match t {
                Ty::Var(v) => {
                    let name = names.entry(*v).or_insert_with(|| {
                        let mut n = format!("a{counter}");
                        *counter += 1;
                        while used.contains(&n) {
                            n = format!("a{counter}");
                            *counter += 1;
                        }
                        n
                    });
                    SimpleType::Atom(name.clone())
                }
                Ty::Arrow(d, c) => {
                    SimpleType::arrow(go(d, names, used, counter), go(c, names, used, counter))
                }
            }
        }
        go(t, names, used, counter)
    };

    let mut asg = SimpleAssignment::new();
    for x in &order {
        let resolved = inf.resolve(&env[x]);
        asg.insert(x.clone(), canon(&resolved, &mut names, &used, &mut counter));
    }
    let ty = canon(&inf.resolve(&ty), &mut names, &used, &mut counter);
    Ok((asg, ty))
}

/// Type of `t` under `asg`, by the simply typed rules; `None` on mismatch.
/// Used as the independent soundness check for `principal_type`.
pub fn type_of(t: &Term, asg: &SimpleAssignment) -> Option<SimpleType> {
    match t {
        Term::Var(x) => asg.get(x).cloned(),
        Term::Abs(x, b) => {
            let dom = asg.get(x)?.clone();
            let cod = type_of(b, asg)?;
            Some(SimpleType::arrow(dom, cod))
        }
        Term::App(f, a) => {
            let tf = type_of(f, asg)?;
            let ta = type_of(a, asg)?;
            match tf {
                SimpleType::Arrow(d, c) if *d == ta => Some(*c),
                _ => None,
            }
        }
    }
}

/// Does some atom substitution send `general` to `instance`, consistently
/// across all the paired types?
pub fn is_instance_of(pairs: &[(&SimpleType, &SimpleType)]) -> bool {
    fn go<'a>(
        general: &'a SimpleType,
        instance: &'a SimpleType,
        sub: &mut HashMap<&'a Ident, &'a SimpleType>,
    ) -> bool {
        match (general, instance) {
            (SimpleType::Atom(a), t) => match sub.get(a) {
                Some(prev) => *prev == t,
                None => {
                    sub.insert(a, t);
                    true
                }
            },
            (SimpleType::Arrow(d1, c1), SimpleType::Arrow(d2, c2)) => {
                go(d1, d2, sub) && go(c1, c2, sub)
            }
            _ => false,
        }
    }
    let mut sub = HashMap::new();
    pairs.iter().all(|(g, i)| go(g, i, &mut sub))
}
