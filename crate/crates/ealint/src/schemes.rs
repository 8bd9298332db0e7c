//! Typing schemes over pseudo-terms: scheme construction with equation
//! sets for both the banged and the simple discipline, first-order
//! unification, and the cross-checks relating the two.
//!
//! These are validation machinery: the inference pipeline never consults
//! them to produce an answer, only to falsify completeness on each run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::pseudo::{erase, free_vars, EALAssignment, EALType, PseudoTerm};
use crate::simple::{SimpleAssignment, SimpleType};
use crate::syntax::Ident;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeType {
    /// Flexible variable, subject to unification.
    Var(u32),
    /// Rigid atom from a concrete type.
    Atom(Ident),
    Bang(Box<SchemeType>),
    Lolli(Box<SchemeType>, Box<SchemeType>),
}

impl SchemeType {
    pub fn bang(t: SchemeType) -> SchemeType {
        SchemeType::Bang(Box::new(t))
    }

    pub fn lolli(d: SchemeType, c: SchemeType) -> SchemeType {
        SchemeType::Lolli(Box::new(d), Box::new(c))
    }

    pub fn occurs(&self, v: u32) -> bool {
        match self {
            SchemeType::Var(u) => *u == v,
            SchemeType::Atom(_) => false,
            SchemeType::Bang(t) => t.occurs(v),
            SchemeType::Lolli(d, c) => d.occurs(v) || c.occurs(v),
        }
    }

    /// Strip every bang, mapping the banged algebra onto the simple one.
    pub fn strip_bangs(&self) -> SchemeType {
        match self {
            SchemeType::Var(u) => SchemeType::Var(*u),
            SchemeType::Atom(a) => SchemeType::Atom(a.clone()),
            SchemeType::Bang(t) => t.strip_bangs(),
            SchemeType::Lolli(d, c) => {
                SchemeType::lolli(d.strip_bangs(), c.strip_bangs())
            }
        }
    }
}

impl fmt::Display for SchemeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeType::Var(u) => write!(f, "t{u}"),
            SchemeType::Atom(a) => write!(f, "{a}"),
            SchemeType::Bang(t) => write!(f, "!{t}"),
            SchemeType::Lolli(d, c) => match d.as_ref() {
                SchemeType::Lolli(_, _) => write!(f, "({d}) -o {c}"),
                _ => write!(f, "{d} -o {c}"),
            },
        }
    }
}

pub fn from_eal(t: &EALType) -> SchemeType {
    match t {
        EALType::Atom(a) => SchemeType::Atom(a.clone()),
        EALType::Bang(b) => SchemeType::bang(from_eal(b)),
        EALType::Lollipop(d, c) => SchemeType::lolli(from_eal(d), from_eal(c)),
    }
}

pub fn from_simple(t: &SimpleType) -> SchemeType {
    match t {
        SimpleType::Atom(a) => SchemeType::Atom(a.clone()),
        SimpleType::Arrow(d, c) => SchemeType::lolli(from_simple(d), from_simple(c)),
    }
}

pub type Equation = (SchemeType, SchemeType);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeResult {
    pub context: BTreeMap<Ident, SchemeType>,
    pub ty: SchemeType,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Discipline {
    Banged,
    Simple,
}

/// The five clauses, shared between the two disciplines so that fresh
/// variables are created at identical sites in identical order.
fn scheme(t: &PseudoTerm, mode: Discipline, next: &mut u32) -> SchemeResult {
    fn fresh(next: &mut u32) -> SchemeType {
        let v = SchemeType::Var(*next);
        *next += 1;
        v
    }
    match t {
        PseudoTerm::Var(x) => {
            let a = fresh(next);
            SchemeResult {
                context: [(x.clone(), a.clone())].into(),
                ty: a,
                equations: Vec::new(),
            }
        }
        PseudoTerm::Abs(x, body) => {
            let mut r = scheme(body, mode, next);
            let a = match r.context.get(x) {
                Some(a) => a.clone(),
                None => {
                    let a = fresh(next);
                    r.context.insert(x.clone(), a.clone());
                    a
                }
            };
            SchemeResult {
                context: r.context,
                ty: SchemeType::lolli(a, r.ty),
                equations: r.equations,
            }
        }
        PseudoTerm::App(fun, arg) => {
            let r1 = scheme(fun, mode, next);
            let r2 = scheme(arg, mode, next);
            let shared: BTreeSet<Ident> = free_vars(fun)
                .intersection(&free_vars(arg))
                .cloned()
                .collect();
            let mut context = r1.context.clone();
            for (y, ty) in &r2.context {
                context.entry(y.clone()).or_insert_with(|| ty.clone());
            }
            let mut equations = r1.equations;
            equations.extend(r2.equations);
            let mut shared_eqs = Vec::new();
            for x in &shared {
                let beta = fresh(next);
                let bound = match mode {
                    Discipline::Banged => SchemeType::bang(beta.clone()),
                    Discipline::Simple => beta.clone(),
                };
                shared_eqs.push((r1.context[x].clone(), bound.clone()));
                shared_eqs.push((r2.context[x].clone(), bound.clone()));
                context.insert(x.clone(), bound);
            }
            let alpha = fresh(next);
            equations.push((
                r1.ty,
                SchemeType::lolli(r2.ty, alpha.clone()),
            ));
            equations.extend(shared_eqs);
            SchemeResult { context, ty: alpha, equations }
        }
        PseudoTerm::Bang(body) => {
            let r = scheme(body, mode, next);
            let ty = match mode {
                Discipline::Banged => SchemeType::bang(r.ty),
                Discipline::Simple => r.ty,
            };
            SchemeResult { context: r.context, ty, equations: r.equations }
        }
        PseudoTerm::CoBang(body) => {
            let mut r = scheme(body, mode, next);
            let alpha = fresh(next);
            let rhs = match mode {
                Discipline::Banged => SchemeType::bang(alpha.clone()),
                Discipline::Simple => alpha.clone(),
            };
            r.equations.push((r.ty, rhs));
            SchemeResult { context: r.context, ty: alpha, equations: r.equations }
        }
    }
}

pub fn eal_scheme(t: &PseudoTerm) -> SchemeResult {
    scheme(t, Discipline::Banged, &mut 0)
}

pub fn simple_scheme(t: &PseudoTerm) -> SchemeResult {
    scheme(t, Discipline::Simple, &mut 0)
}

/// Pointwise bang-erasure of an equation set.
pub fn erase_equations(eqs: &[Equation]) -> Vec<Equation> {
    eqs.iter()
        .map(|(a, b)| (a.strip_bangs(), b.strip_bangs()))
        .collect()
}

pub type Substitution = BTreeMap<u32, SchemeType>;

pub fn apply(s: &Substitution, t: &SchemeType) -> SchemeType {
    match t {
        SchemeType::Var(u) => match s.get(u) {
            Some(b) => apply(s, b),
            None => SchemeType::Var(*u),
        },
        SchemeType::Atom(a) => SchemeType::Atom(a.clone()),
        SchemeType::Bang(b) => SchemeType::bang(apply(s, b)),
        SchemeType::Lolli(d, c) => SchemeType::lolli(apply(s, d), apply(s, c)),
    }
}

/// Robinson unification with occurs check over the free algebra with one
/// unary and one binary constructor; `None` when no solution exists.
pub fn unify(eqs: &[Equation]) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut work: Vec<Equation> = eqs.to_vec();
    while let Some((a, b)) = work.pop() {
        let a = apply(&subst, &a);
        let b = apply(&subst, &b);
        match (a, b) {
            (SchemeType::Var(u), SchemeType::Var(v)) if u == v => {}
            (SchemeType::Var(u), t) | (t, SchemeType::Var(u)) => {
                if t.occurs(u) {
                    return None;
                }
                subst.insert(u, t);
            }
            (SchemeType::Atom(x), SchemeType::Atom(y)) => {
                if x != y {
                    return None;
                }
            }
            (SchemeType::Bang(x), SchemeType::Bang(y)) => work.push((*x, *y)),
            (SchemeType::Lolli(d1, c1), SchemeType::Lolli(d2, c2)) => {
                work.push((*d1, *d2));
                work.push((*c1, *c2));
            }
            _ => return None,
        }
    }
    Some(subst)
}

pub fn solves(s: &Substitution, eqs: &[Equation]) -> bool {
    eqs.iter().all(|(a, b)| apply(s, a) == apply(s, b))
}

/// Canonical form for comparison up to renaming: flexible variables and
/// rigid atoms are both renumbered in traversal order over the listed
/// types.
pub fn canonical(types: &[SchemeType]) -> Vec<SchemeType> {
    let mut vars: BTreeMap<u32, u32> = BTreeMap::new();
    let mut atoms: BTreeMap<Ident, u32> = BTreeMap::new();
    let mut next = 0u32;
    fn go(
        t: &SchemeType,
        vars: &mut BTreeMap<u32, u32>,
        atoms: &mut BTreeMap<Ident, u32>,
        next: &mut u32,
    ) -> SchemeType {
        match t {
            SchemeType::Var(u) => {
                let id = *vars.entry(*u).or_insert_with(|| {
                    let v = *next;
                    *next += 1;
                    v
                });
                SchemeType::Var(id)
            }
            SchemeType::Atom(a) => {
                let id = *atoms.entry(a.clone()).or_insert_with(|| {
                    let v = *next;
                    *next += 1;
                    v
                });
                SchemeType::Var(id)
            }
            SchemeType::Bang(b) => SchemeType::bang(go(b, vars, atoms, next)),
            SchemeType::Lolli(d, c) => {
                SchemeType::lolli(go(d, vars, atoms, next), go(c, vars, atoms, next))
            }
        }
    }
    types
        .iter()
        .map(|t| go(t, &mut vars, &mut atoms, &mut next))
        .collect()
}

/// The simple scheme equals the bang-erasure of the banged scheme,
/// pointwise on context, type and equations.
pub fn check_erasure_agreement(t: &PseudoTerm) -> bool {
    let e = eal_scheme(t);
    let s = simple_scheme(t);
    if s.ty != e.ty.strip_bangs() {
        return false;
    }
    if s.context.len() != e.context.len() {
        return false;
    }
    for (x, ty) in &e.context {
        if s.context.get(x) != Some(&ty.strip_bangs()) {
            return false;
        }
    }
    s.equations == erase_equations(&e.equations)
}

/// A concrete judgement passing the typing condition must be an instance
/// of the scheme: the equations extended with the concrete bindings and
/// result type stay unifiable.
pub fn check_scheme_instance(t: &PseudoTerm, gamma: &EALAssignment, b: &EALType) -> bool {
    let r = eal_scheme(t);
    let mut eqs = r.equations;
    eqs.push((r.ty, from_eal(b)));
    for x in free_vars(t) {
        let (Some(scheme_ty), Some(concrete)) = (r.context.get(&x), gamma.get(&x)) else {
            return false;
        };
        eqs.push((scheme_ty.clone(), from_eal(concrete)));
    }
    matches!(unify(&eqs), Some(s) if solves(&s, &eqs))
}

/// The m.g.u. of the simple equations applied to the simple scheme yields
/// the principal simple typing of the erasure, up to renaming.
pub fn check_principal_agreement(
    t: &PseudoTerm,
    theta: &SimpleAssignment,
    principal: &SimpleType,
) -> bool {
    let r = simple_scheme(t);
    let Some(mgu) = unify(&r.equations) else {
        return false;
    };
    let erased = erase(t);
    let fv = crate::syntax::free_vars(&erased);
    let mut mine: Vec<SchemeType> = Vec::new();
    let mut theirs: Vec<SchemeType> = Vec::new();
    for x in &fv {
        let (Some(scheme_ty), Some(concrete)) = (r.context.get(x), theta.get(x)) else {
            return false;
        };
        mine.push(apply(&mgu, scheme_ty));
        theirs.push(from_simple(concrete));
    }
    mine.push(apply(&mgu, &r.ty));
    theirs.push(from_simple(principal));
    canonical(&mine) == canonical(&theirs)
}
