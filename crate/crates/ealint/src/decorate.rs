//! Parameter decoration: every door slot of a term, and every subtype
//! position of a type, gets a fresh symbolic integer exponent. An
//! instantiation maps the parameters back to concrete integers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::pseudo::{EALType, PseudoTerm};
use crate::simple::{SimpleAssignment, SimpleType};
use crate::syntax::{Ident, Term};

pub type ParamId = String;

/// A term where every grammar slot carries exactly one symbolic exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPseudoTerm {
    pub param: ParamId,
    pub body: ParamAtom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamAtom {
    Var(Ident),
    Abs(Ident, Box<ParamPseudoTerm>),
    App(Box<ParamPseudoTerm>, Box<ParamPseudoTerm>),
}

impl ParamPseudoTerm {
    pub fn size(&self) -> usize {
        1 + match &self.body {
            ParamAtom::Var(_) => 1,
            ParamAtom::Abs(_, b) => 1 + b.size(),
            ParamAtom::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        let mut out = BTreeSet::new();
        fn go(t: &ParamPseudoTerm, out: &mut BTreeSet<ParamId>) {
            out.insert(t.param.clone());
            match &t.body {
                ParamAtom::Var(_) => {}
                ParamAtom::Abs(_, b) => go(b, out),
                ParamAtom::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Drop all exponents.
    pub fn erase(&self) -> Term {
        match &self.body {
            ParamAtom::Var(x) => Term::Var(x.clone()),
            ParamAtom::Abs(x, b) => Term::abs(x.clone(), b.erase()),
            ParamAtom::App(f, a) => Term::app(f.erase(), a.erase()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamType {
    Atom { param: ParamId, name: Ident },
    Lollipop { param: ParamId, dom: Box<ParamType>, cod: Box<ParamType> },
}

impl ParamType {
    pub fn top_param(&self) -> &ParamId {
        match self {
            ParamType::Atom { param, .. } | ParamType::Lollipop { param, .. } => param,
        }
    }

    pub fn with_top_param(&self, param: ParamId) -> ParamType {
        match self {
            ParamType::Atom { name, .. } => ParamType::Atom { param, name: name.clone() },
            ParamType::Lollipop { dom, cod, .. } => {
                ParamType::Lollipop { param, dom: dom.clone(), cod: cod.clone() }
            }
        }
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        let mut out = BTreeSet::new();
        fn go(t: &ParamType, out: &mut BTreeSet<ParamId>) {
            match t {
                ParamType::Atom { param, .. } => {
                    out.insert(param.clone());
                }
                ParamType::Lollipop { param, dom, cod } => {
                    out.insert(param.clone());
                    go(dom, out);
                    go(cod, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn erase(&self) -> SimpleType {
        match self {
            ParamType::Atom { name, .. } => SimpleType::Atom(name.clone()),
            ParamType::Lollipop { dom, cod, .. } => SimpleType::arrow(dom.erase(), cod.erase()),
        }
    }

    /// Structural size of the underlying simple type.
    pub fn size(&self) -> usize {
        self.erase().size()
    }
}

pub type ParamAssignment = BTreeMap<Ident, ParamType>;

pub fn assignment_params(sigma: &ParamAssignment) -> BTreeSet<ParamId> {
    sigma.values().flat_map(|t| t.params()).collect()
}

/// Map from parameters to integers.
pub type Instantiation = BTreeMap<ParamId, i64>;

/// Counter handing out `m1, m2, ...` style names.
pub struct ParamCounter {
    prefix: &'static str,
    next: u64,
}

impl ParamCounter {
    pub fn new(prefix: &'static str) -> ParamCounter {
        ParamCounter { prefix, next: 1 }
    }

    pub fn fresh(&mut self) -> ParamId {
        let id = format!("{}{}", self.prefix, self.next);
        self.next += 1;
        id
    }
}

/// The unique parameterized decoration of a term, parameters `m1, m2, ...`
/// in pre-order.
pub fn decorate_term(m: &Term) -> ParamPseudoTerm {
    fn go(m: &Term, c: &mut ParamCounter) -> ParamPseudoTerm {
        let param = c.fresh();
        let body = match m {
            Term::Var(x) => ParamAtom::Var(x.clone()),
            Term::Abs(x, b) => ParamAtom::Abs(x.clone(), Box::new(go(b, c))),
            Term::App(f, a) => {
                let f = go(f, c);
                let a = go(a, c);
                ParamAtom::App(Box::new(f), Box::new(a))
            }
        };
        ParamPseudoTerm { param, body }
    }
    go(m, &mut ParamCounter::new("m"))
}

/// Decoration of a simple type, one parameter per subtype position in
/// pre-order, drawn from the supplied counter.
pub fn decorate_type_with(t: &SimpleType, c: &mut ParamCounter) -> ParamType {
    let param = c.fresh();
    match t {
        SimpleType::Atom(a) => ParamType::Atom { param, name: a.clone() },
        SimpleType::Arrow(d, k) => {
            let dom = decorate_type_with(d, c);
            let cod = decorate_type_with(k, c);
            ParamType::Lollipop { param, dom: Box::new(dom), cod: Box::new(cod) }
        }
    }
}

/// Decoration of a standalone type, parameters `p1, p2, ...`.
pub fn decorate_type(t: &SimpleType) -> ParamType {
    decorate_type_with(t, &mut ParamCounter::new("p"))
}

/// Pointwise decoration with globally disjoint `p` parameters, variables
/// processed in the supplied order so naming is deterministic.
pub fn decorate_assignment(theta: &SimpleAssignment, order: &[Ident]) -> ParamAssignment {
    let mut c = ParamCounter::new("p");
    let mut out = ParamAssignment::new();
    for x in order {
        if let Some(ty) = theta.get(x) {
            out.insert(x.clone(), decorate_type_with(ty, &mut c));
        }
    }
    // anything the order missed still gets decorated, in map order
    for (x, ty) in theta {
        out.entry(x.clone()).or_insert_with(|| decorate_type_with(ty, &mut c));
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstantiationError {
    #[error("instantiation missing parameter {0}")]
    MissingParameter(ParamId),
    #[error("negative value for type parameter {0}")]
    NegativeTypeParameter(ParamId),
}

/// Substitute integers for parameters: a positive exponent becomes that
/// many main doors, a negative one auxiliary doors, zero vanishes.
pub fn instantiate(
    phi: &Instantiation,
    t: &ParamPseudoTerm,
) -> Result<PseudoTerm, InstantiationError> {
    let k = *phi
        .get(&t.param)
        .ok_or_else(|| InstantiationError::MissingParameter(t.param.clone()))?;
    let mut inner = match &t.body {
        ParamAtom::Var(x) => PseudoTerm::Var(x.clone()),
        ParamAtom::Abs(x, b) => PseudoTerm::abs(x.clone(), instantiate(phi, b)?),
        ParamAtom::App(f, a) => PseudoTerm::app(instantiate(phi, f)?, instantiate(phi, a)?),
    };
    if k >= 0 {
        for _ in 0..k {
            inner = PseudoTerm::bang(inner);
        }
    } else {
        for _ in 0..(-k) {
            inner = PseudoTerm::cobang(inner);
        }
    }
    Ok(inner)
}

/// Substitute nonnegative integers for type parameters.
pub fn instantiate_type(
    phi: &Instantiation,
    a: &ParamType,
) -> Result<EALType, InstantiationError> {
    let param = a.top_param();
    let k = *phi
        .get(param)
        .ok_or_else(|| InstantiationError::MissingParameter(param.clone()))?;
    if k < 0 {
        return Err(InstantiationError::NegativeTypeParameter(param.clone()));
    }
    let mut inner = match a {
        ParamType::Atom { name, .. } => EALType::Atom(name.clone()),
        ParamType::Lollipop { dom, cod, .. } => {
            EALType::lolli(instantiate_type(phi, dom)?, instantiate_type(phi, cod)?)
        }
    };
    for _ in 0..k {
        inner = EALType::bang(inner);
    }
    Ok(inner)
}

pub fn instantiate_assignment(
    phi: &Instantiation,
    sigma: &ParamAssignment,
) -> Result<crate::pseudo::EALAssignment, InstantiationError> {
    sigma
        .iter()
        .map(|(x, t)| Ok((x.clone(), instantiate_type(phi, t)?)))
        .collect()
}

impl fmt::Display for ParamPseudoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "!^{{{}}}", self.param)?;
        match &self.body {
            ParamAtom::Var(x) => write!(f, "{x}"),
            ParamAtom::Abs(x, b) => write!(f, "\u{3bb}{x}.{b}"),
            ParamAtom::App(fun, arg) => write!(f, "[({fun}){arg}]"),
        }
    }
}

impl fmt::Display for ParamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamType::Atom { param, name } => write!(f, "!^{{{param}}}{name}"),
            ParamType::Lollipop { param, dom, cod } => {
                write!(f, "!^{{{param}}}({dom} \u{22b8} {cod})")
            }
        }
    }
}
