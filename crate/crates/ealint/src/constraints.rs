//! Linear constraint generation: boxing constraints from door-word
//! bracketing and scope, typing constraints from the parameterized
//! assignment extension, contraction and nonnegativity side conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::decorate::{
    assignment_params, Instantiation, ParamAssignment, ParamAtom, ParamCounter, ParamId,
    ParamPseudoTerm, ParamType,
};
use crate::pseudo::Path;
use crate::syntax::Ident;

/// Integer linear combination of parameters plus a constant, in canonical
/// form: zero coefficients are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinExpr {
    pub coeffs: BTreeMap<ParamId, i64>,
    pub constant: i64,
}

impl LinExpr {
    pub fn var(p: impl Into<ParamId>) -> LinExpr {
        let mut e = LinExpr::default();
        e.add_term(p, 1);
        e
    }

    pub fn constant(c: i64) -> LinExpr {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn sum_of(params: &[ParamId]) -> LinExpr {
        let mut e = LinExpr::default();
        for p in params {
            e.add_term(p.clone(), 1);
        }
        e
    }

    pub fn add_term(&mut self, p: impl Into<ParamId>, coeff: i64) {
        let p = p.into();
        let entry = self.coeffs.entry(p.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&p);
        }
    }

    pub fn add(&mut self, other: &LinExpr) {
        for (p, c) in &other.coeffs {
            self.add_term(p.clone(), *c);
        }
        self.constant += other.constant;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant == 0
    }

    pub fn params(&self) -> impl Iterator<Item = &ParamId> {
        self.coeffs.keys()
    }

    /// Exact integer value under `phi`; `None` if a parameter is missing.
    pub fn eval(&self, phi: &Instantiation) -> Option<i64> {
        let mut acc = self.constant;
        for (p, c) in &self.coeffs {
            acc += c * phi.get(p)?;
        }
        Some(acc)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in &self.coeffs {
            if first {
                match *c {
                    1 => write!(f, "{p}")?,
                    -1 => write!(f, "-{p}")?,
                    c => write!(f, "{c}*{p}")?,
                }
                first = false;
            } else {
                let sign = if *c < 0 { '-' } else { '+' };
                match c.abs() {
                    1 => write!(f, " {sign} {p}")?,
                    a => write!(f, " {sign} {a}*{p}")?,
                }
            }
        }
        if self.constant != 0 || first {
            if first {
                write!(f, "{}", self.constant)?;
            } else {
                let sign = if self.constant < 0 { '-' } else { '+' };
                write!(f, " {sign} {}", self.constant.abs())?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rel {
    /// expr = 0
    Eq,
    /// expr >= 0
    Ge,
}

impl Rel {
    pub fn as_str(self) -> &'static str {
        match self {
            Rel::Eq => "eq",
            Rel::Ge => "ge",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    BracketPrefix,
    BracketFree,
    ScopePrefix,
    ScopeSum,
    Abstraction,
    ApplicationUnif,
    ApplicationZero,
    BangSum,
    BangNonneg,
    Contraction,
    Types,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::BracketPrefix => "bracket-prefix",
            Origin::BracketFree => "bracket-free",
            Origin::ScopePrefix => "scope-prefix",
            Origin::ScopeSum => "scope-sum",
            Origin::Abstraction => "abstraction",
            Origin::ApplicationUnif => "application-unif",
            Origin::ApplicationZero => "application-zero",
            Origin::BangSum => "bang-sum",
            Origin::BangNonneg => "bang-nonneg",
            Origin::Contraction => "contraction",
            Origin::Types => "types",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub expr: LinExpr,
    pub rel: Rel,
    pub origin: Origin,
    pub path: Path,
}

impl Constraint {
    pub fn new(expr: LinExpr, rel: Rel, origin: Origin, path: Path) -> Constraint {
        Constraint { expr, rel, origin, path }
    }

    pub fn satisfied_by(&self, phi: &Instantiation) -> Option<bool> {
        let v = self.expr.eval(phi)?;
        Some(match self.rel {
            Rel::Eq => v == 0,
            Rel::Ge => v >= 0,
        })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Rel::Eq => "=",
            Rel::Ge => ">=",
        };
        write!(f, "{} {} 0", self.expr, rel)
    }
}

/// Ordered, deduplicated conjunction; `Unsatisfiable` is absorbing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintSet {
    Sat(Vec<Constraint>),
    Unsatisfiable,
}

impl ConstraintSet {
    pub fn new() -> ConstraintSet {
        ConstraintSet::Sat(Vec::new())
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, ConstraintSet::Unsatisfiable)
    }

    pub fn constraints(&self) -> Option<&[Constraint]> {
        match self {
            ConstraintSet::Sat(cs) => Some(cs),
            ConstraintSet::Unsatisfiable => None,
        }
    }

    pub fn len(&self) -> usize {
        self.constraints().map_or(0, |cs| cs.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, c: Constraint) {
        if let ConstraintSet::Sat(cs) = self {
            if !cs.iter().any(|d| d.expr == c.expr && d.rel == c.rel) {
                cs.push(c);
            }
        }
    }

    pub fn mark_unsat(&mut self) {
        *self = ConstraintSet::Unsatisfiable;
    }

    pub fn union(mut self, other: ConstraintSet) -> ConstraintSet {
        match other {
            ConstraintSet::Unsatisfiable => ConstraintSet::Unsatisfiable,
            ConstraintSet::Sat(cs) => {
                if self.is_unsat() {
                    return ConstraintSet::Unsatisfiable;
                }
                for c in cs {
                    self.push(c);
                }
                self
            }
        }
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        match self {
            ConstraintSet::Sat(cs) => {
                cs.iter().flat_map(|c| c.expr.params().cloned()).collect()
            }
            ConstraintSet::Unsatisfiable => BTreeSet::new(),
        }
    }

    /// `Some(true)` iff satisfiable and every constraint holds under `phi`;
    /// `None` if `phi` misses a parameter.
    pub fn satisfied_by(&self, phi: &Instantiation) -> Option<bool> {
        match self {
            ConstraintSet::Unsatisfiable => Some(false),
            ConstraintSet::Sat(cs) => {
                for c in cs {
                    if !c.satisfied_by(phi)? {
                        return Some(false);
                    }
                }
                Some(true)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ConstraintSet::Unsatisfiable => serde_json::json!("unsatisfiable"),
            ConstraintSet::Sat(cs) => serde_json::Value::Array(
                cs.iter()
                    .map(|c| {
                        let lhs: serde_json::Map<String, serde_json::Value> = c
                            .expr
                            .coeffs
                            .iter()
                            .map(|(p, v)| (p.clone(), serde_json::json!(v)))
                            .collect();
                        serde_json::json!({
                            "lhs": lhs,
                            "const": c.expr.constant,
                            "rel": c.rel.as_str(),
                            "origin": c.origin.as_str(),
                            "path": c.path,
                        })
                    })
                    .collect(),
            ),
        }
    }

    /// Standard LP text format; all variables free.
    pub fn to_lp_string(&self, objective: Option<&LinExpr>) -> String {
        let mut out = String::new();
        out.push_str("Minimize\n obj: ");
        match objective {
            Some(o) if !o.is_zero() => {
                let _ = writeln!(out, "{o}");
            }
            _ => out.push_str("0\n"),
        }
        out.push_str("Subject To\n");
        match self {
            ConstraintSet::Unsatisfiable => {
                // 0 >= 1 renders the absorbing element
                out.push_str(" c1: 0 >= 1\n");
            }
            ConstraintSet::Sat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    let rel = match c.rel {
                        Rel::Eq => "=",
                        Rel::Ge => ">=",
                    };
                    let mut lhs = LinExpr { coeffs: c.expr.coeffs.clone(), constant: 0 };
                    if lhs.coeffs.is_empty() {
                        lhs = LinExpr::constant(0);
                    }
                    let _ = writeln!(out, " c{}: {} {} {}", i + 1, lhs, rel, -c.expr.constant);
                }
            }
        }
        out.push_str("Bounds\n");
        for p in self.params() {
            let _ = writeln!(out, " {p} free");
        }
        out.push_str("End\n");
        out
    }
}

impl Default for ConstraintSet {
    fn default() -> ConstraintSet {
        ConstraintSet::new()
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSet::Unsatisfiable => writeln!(f, "unsatisfiable"),
            ConstraintSet::Sat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    writeln!(f, "({}) {}  [{}]", i + 1, c, c.origin.as_str())?;
                }
                Ok(())
            }
        }
    }
}

/// One occurrence of a variable in a parameterized term: its path, the
/// parameter word from the root, and (if bound) the index where the
/// enclosing abstraction's body starts in that word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamOccurrence {
    pub path: Path,
    pub name: Ident,
    pub free: bool,
    pub word: Vec<ParamId>,
    pub binder: Option<(Path, usize)>,
}

pub fn param_occurrences(t: &ParamPseudoTerm) -> Vec<ParamOccurrence> {
    fn go(
        t: &ParamPseudoTerm,
        path: &mut Path,
        word: &mut Vec<ParamId>,
        binders: &mut Vec<(Ident, Path, usize)>,
        out: &mut Vec<ParamOccurrence>,
    ) {
        word.push(t.param.clone());
        match &t.body {
            ParamAtom::Var(x) => {
                let binder = binders
                    .iter()
                    .rev()
                    .find(|(y, _, _)| y == x)
                    .map(|(_, p, cut)| (p.clone(), *cut));
                out.push(ParamOccurrence {
                    path: path.clone(),
                    name: x.clone(),
                    free: binder.is_none(),
                    word: word.clone(),
                    binder,
                });
            }
            ParamAtom::Abs(x, b) => {
                binders.push((x.clone(), path.clone(), word.len()));
                path.push(0);
                go(b, path, word, binders, out);
                path.pop();
                binders.pop();
            }
            ParamAtom::App(fun, arg) => {
                path.push(0);
                go(fun, path, word, binders, out);
                path.pop();
                path.push(1);
                go(arg, path, word, binders, out);
                path.pop();
            }
        }
        word.pop();
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// The parameter word along the path to `occ` (root downward).
pub fn param_word(t: &ParamPseudoTerm, occ: &Path) -> Option<Vec<ParamId>> {
    let mut word = Vec::new();
    let mut cur = t;
    word.push(cur.param.clone());
    for &i in occ {
        cur = match (&cur.body, i) {
            (ParamAtom::Abs(_, b), 0) => b,
            (ParamAtom::App(f, _), 0) => f,
            (ParamAtom::App(_, a), 1) => a,
            _ => return None,
        };
        word.push(cur.param.clone());
    }
    Some(word)
}

/// Bracketing (every nonempty prefix of every occurrence word is >= 0,
/// free words sum to 0) and scope (bound words relative to their binder's
/// body are well-bracketed).
pub fn boxing_constraints(t: &ParamPseudoTerm) -> ConstraintSet {
    let occs = param_occurrences(t);
    let mut cs = ConstraintSet::new();
    for occ in &occs {
        let mut prefix = LinExpr::default();
        for p in &occ.word {
            prefix.add_term(p.clone(), 1);
            cs.push(Constraint::new(
                prefix.clone(),
                Rel::Ge,
                Origin::BracketPrefix,
                occ.path.clone(),
            ));
        }
        if occ.free {
            cs.push(Constraint::new(prefix, Rel::Eq, Origin::BracketFree, occ.path.clone()));
        }
    }
    // scope constraints grouped per abstraction, binders in pre-order
    let mut binder_order: Vec<Path> = Vec::new();
    let mut by_binder: BTreeMap<Path, Vec<&ParamOccurrence>> = BTreeMap::new();
    for occ in &occs {
        if let Some((bp, _)) = &occ.binder {
            if !by_binder.contains_key(bp) {
                binder_order.push(bp.clone());
            }
            by_binder.entry(bp.clone()).or_default().push(occ);
        }
    }
    binder_order.sort();
    for bp in binder_order {
        for occ in &by_binder[&bp] {
            let cut = occ.binder.as_ref().unwrap().1;
            let mut prefix = LinExpr::default();
            for p in &occ.word[cut..] {
                prefix.add_term(p.clone(), 1);
                cs.push(Constraint::new(
                    prefix.clone(),
                    Rel::Ge,
                    Origin::ScopePrefix,
                    occ.path.clone(),
                ));
            }
            cs.push(Constraint::new(prefix, Rel::Eq, Origin::ScopeSum, occ.path.clone()));
        }
    }
    cs
}

/// First-order matching of two parameterized types: equal shapes yield
/// top-parameter equations position by position, anything else is
/// unsatisfiable.
pub fn unification_constraints(a: &ParamType, b: &ParamType) -> ConstraintSet {
    fn go(a: &ParamType, b: &ParamType, path: &Path, cs: &mut ConstraintSet) {
        if cs.is_unsat() {
            return;
        }
        let mut expr = LinExpr::var(a.top_param().clone());
        expr.add_term(b.top_param().clone(), -1);
        match (a, b) {
            (ParamType::Atom { name: na, .. }, ParamType::Atom { name: nb, .. }) => {
                if na != nb {
                    cs.mark_unsat();
                    return;
                }
                cs.push(Constraint::new(expr, Rel::Eq, Origin::ApplicationUnif, path.clone()));
            }
            (
                ParamType::Lollipop { dom: da, cod: ca, .. },
                ParamType::Lollipop { dom: db, cod: cb, .. },
            ) => {
                cs.push(Constraint::new(expr, Rel::Eq, Origin::ApplicationUnif, path.clone()));
                go(da, db, path, cs);
                go(ca, cb, path, cs);
            }
            _ => cs.mark_unsat(),
        }
    }
    let mut cs = ConstraintSet::new();
    go(a, b, &Vec::new(), &mut cs);
    cs
}

struct Extension {
    types: BTreeMap<Path, ParamType>,
    side: ConstraintSet,
    qc: ParamCounter,
}

impl Extension {
    /// Post-order per node: children first, then core constraints
    /// (abstraction `= 0`, application unification and `= 0`), then the
    /// bang clause for the node's own exponent.
    fn visit(
        &mut self,
        t: &ParamPseudoTerm,
        sigma: &ParamAssignment,
        path: &mut Path,
    ) -> Option<ParamType> {
        if self.side.is_unsat() {
            return None;
        }
        let core: ParamType = match &t.body {
            ParamAtom::Var(x) => sigma
                .get(x)
                .unwrap_or_else(|| panic!("assignment missing variable {x}"))
                .clone(),
            ParamAtom::Abs(x, b) => {
                path.push(0);
                let cod = self.visit(b, sigma, path)?;
                path.pop();
                let dom = sigma
                    .get(x)
                    .unwrap_or_else(|| panic!("assignment missing variable {x}"))
                    .clone();
                let q = self.qc.fresh();
                self.side.push(Constraint::new(
                    LinExpr::var(q.clone()),
                    Rel::Eq,
                    Origin::Abstraction,
                    path.clone(),
                ));
                ParamType::Lollipop { param: q, dom: Box::new(dom), cod: Box::new(cod) }
            }
            ParamAtom::App(f, a) => {
                path.push(0);
                let ft = self.visit(f, sigma, path)?;
                path.pop();
                path.push(1);
                let at = self.visit(a, sigma, path)?;
                path.pop();
                match ft {
                    ParamType::Lollipop { param, dom, cod } => {
                        let u = unification_constraints(&dom, &at);
                        if u.is_unsat() {
                            self.side.mark_unsat();
                            return None;
                        }
                        if let ConstraintSet::Sat(us) = u {
                            for mut c in us {
                                c.path = path.clone();
                                self.side.push(c);
                            }
                        }
                        self.side.push(Constraint::new(
                            LinExpr::var(param),
                            Rel::Eq,
                            Origin::ApplicationZero,
                            path.clone(),
                        ));
                        *cod
                    }
                    ParamType::Atom { .. } => {
                        self.side.mark_unsat();
                        return None;
                    }
                }
            }
        };
        // bang clause: fresh top q with q = slot + core-top and q >= 0
        let q = self.qc.fresh();
        let mut sum = LinExpr::var(q.clone());
        sum.add_term(t.param.clone(), -1);
        sum.add_term(core.top_param().clone(), -1);
        self.side
            .push(Constraint::new(sum, Rel::Eq, Origin::BangSum, path.clone()));
        self.side.push(Constraint::new(
            LinExpr::var(q.clone()),
            Rel::Ge,
            Origin::BangNonneg,
            path.clone(),
        ));
        let ty = core.with_top_param(q);
        self.types.insert(path.clone(), ty.clone());
        Some(ty)
    }
}

/// Assigns a parameterized type to every subterm (keyed by path), with the
/// side constraints of the bang/abstraction/application clauses. Fresh
/// parameters are named `q1, q2, ...` in post-order.
pub fn extend_param_assignment(
    sigma: &ParamAssignment,
    t: &ParamPseudoTerm,
) -> (BTreeMap<Path, ParamType>, ConstraintSet) {
    let mut ext = Extension {
        types: BTreeMap::new(),
        side: ConstraintSet::new(),
        qc: ParamCounter::new("q"),
    };
    ext.visit(t, sigma, &mut Vec::new());
    (ext.types, ext.side)
}

/// Side constraints of the extension, plus `m >= 1` for every contracted
/// variable's top parameter and `p >= 0` for every parameter of the
/// assignment.
pub fn typing_constraints(t: &ParamPseudoTerm, sigma: &ParamAssignment) -> ConstraintSet {
    let (_, mut cs) = extend_param_assignment(sigma, t);
    if cs.is_unsat() {
        return cs;
    }
    let erased = t.erase();
    for x in crate::syntax::variables_in_order(&erased) {
        if crate::syntax::count_occurrences(&x, &erased) >= 2 {
            let top = sigma
                .get(&x)
                .unwrap_or_else(|| panic!("assignment missing variable {x}"))
                .top_param();
            let mut expr = LinExpr::var(top.clone());
            expr.constant = -1;
            cs.push(Constraint::new(expr, Rel::Ge, Origin::Contraction, Vec::new()));
        }
    }
    for p in assignment_params(sigma) {
        cs.push(Constraint::new(LinExpr::var(p), Rel::Ge, Origin::Types, Vec::new()));
    }
    cs
}

/// The full system: boxing followed by typing constraints.
pub fn all_constraints(t: &ParamPseudoTerm, sigma: &ParamAssignment) -> ConstraintSet {
    boxing_constraints(t).union(typing_constraints(t, sigma))
}

/// Objective used by the pipeline: total type exponents plus total box
/// depth summed over occurrences. Bounded below by 0 under the types and
/// bracketing constraints.
pub fn default_objective(t: &ParamPseudoTerm, sigma: &ParamAssignment) -> LinExpr {
    let mut obj = LinExpr::default();
    for p in assignment_params(sigma) {
        obj.add_term(p, 1);
    }
    for occ in param_occurrences(t) {
        for p in &occ.word {
            obj.add_term(p.clone(), 1);
        }
    }
    obj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decorate::{decorate_assignment, decorate_term, decorate_type};
    use crate::simple::{parse_simple_type, principal_type};
    use crate::syntax::{parse_term, variables_in_order, Term};

    fn expr(terms: &[(&str, i64)], constant: i64) -> LinExpr {
        let mut e = LinExpr::constant(constant);
        for (p, c) in terms {
            e.add_term(*p, *c);
        }
        e
    }

    fn rendered(cs: &ConstraintSet) -> Vec<String> {
        cs.constraints().unwrap().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn linexpr_canonical_form() {
        let mut e = LinExpr::var("m1");
        e.add_term("m1", -1);
        assert!(e.is_zero());
        assert_eq!(expr(&[("m1", 1), ("m2", -1)], 0).to_string(), "m1 - m2");
        assert_eq!(expr(&[("p1", 1)], -1).to_string(), "p1 - 1");
        assert_eq!(LinExpr::constant(0).to_string(), "0");
    }

    #[test]
    fn free_variable_boxing() {
        let t = decorate_term(&Term::var("x"));
        let cs = boxing_constraints(&t);
        assert_eq!(rendered(&cs), vec!["m1 >= 0", "m1 = 0"]);
    }

    #[test]
    fn identity_boxing() {
        let t = decorate_term(&parse_term("\\x.x").unwrap());
        let cs = boxing_constraints(&t);
        assert_eq!(rendered(&cs), vec!["m1 >= 0", "m1 + m2 >= 0", "m2 >= 0", "m2 = 0"]);
    }

    #[test]
    fn church_two_words() {
        let t = decorate_term(&parse_term("\\y.\\z. y (y z)").unwrap());
        // z sits at path abs/abs/app-arg/app-arg
        assert_eq!(
            param_word(&t, &vec![0, 0, 1, 1]).unwrap(),
            vec!["m1", "m2", "m3", "m5", "m7"]
        );
        assert_eq!(param_word(&t, &vec![0, 0, 0]).unwrap(), vec!["m1", "m2", "m3", "m4"]);
        assert_eq!(param_word(&t, &vec![0, 0, 2]), None);
    }

    #[test]
    fn church_two_boxing_set() {
        let t = decorate_term(&parse_term("\\y.\\z. y (y z)").unwrap());
        let cs = boxing_constraints(&t);
        // full-word scope prefixes are kept alongside the = 0 sums, so the
        // deduplicated set has three entries beyond the classic fifteen
        let got = rendered(&cs);
        assert_eq!(got.len(), 18);
        for want in [
            "m1 >= 0",
            "m1 + m2 + m3 + m5 + m7 >= 0",
            "m2 + m3 + m4 = 0",
            "m2 + m3 + m5 + m6 = 0",
            "m3 >= 0",
            "m3 + m5 >= 0",
            "m3 + m5 + m7 = 0",
        ] {
            assert!(got.contains(&want.to_string()), "missing {want}");
        }
    }

    #[test]
    fn unification_cases() {
        let a = decorate_type(&parse_simple_type("a").unwrap());
        let b = ParamType::Atom { param: "n1".into(), name: "a".into() };
        assert_eq!(rendered(&unification_constraints(&a, &b)), vec!["-n1 + p1 = 0"]);

        let f = decorate_type(&parse_simple_type("a->a").unwrap());
        let g = ParamType::Lollipop {
            param: "n1".into(),
            dom: Box::new(ParamType::Atom { param: "n2".into(), name: "a".into() }),
            cod: Box::new(ParamType::Atom { param: "n3".into(), name: "a".into() }),
        };
        assert_eq!(
            rendered(&unification_constraints(&f, &g)),
            vec!["-n1 + p1 = 0", "-n2 + p2 = 0", "-n3 + p3 = 0"]
        );

        assert!(unification_constraints(&a, &g).is_unsat());
        let c = ParamType::Atom { param: "n1".into(), name: "b".into() };
        assert!(unification_constraints(&a, &c).is_unsat());
    }

    #[test]
    fn identity_typing_constraints() {
        let m = parse_term("\\x.x").unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let cs = typing_constraints(&t, &sigma);
        assert_eq!(
            rendered(&cs),
            vec![
                "-m2 - p1 + q1 = 0",
                "q1 >= 0",
                "q2 = 0",
                "-m1 - q2 + q3 = 0",
                "q3 >= 0",
                "p1 >= 0",
            ]
        );
    }

    #[test]
    fn church_two_extension_types() {
        let m = parse_term("\\y.\\z. y (y z)").unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let (types, side) = extend_param_assignment(&sigma, &t);
        assert!(!side.is_unsat());
        assert_eq!(types[&vec![0, 0, 0]].to_string(), "!^{q1}(!^{p2}a0 \u{22b8} !^{p3}a0)");
        assert_eq!(types[&vec![0, 0, 1, 0]].to_string(), "!^{q2}(!^{p2}a0 \u{22b8} !^{p3}a0)");
        assert_eq!(types[&vec![0, 0, 1, 1]].to_string(), "!^{q3}a0");
        assert_eq!(types[&vec![0, 0, 1]].to_string(), "!^{q4}a0");
        assert_eq!(types[&vec![0, 0]].to_string(), "!^{q5}a0");
        assert_eq!(
            types[&Vec::new()].to_string(),
            "!^{q9}(!^{p1}(!^{p2}a0 \u{22b8} !^{p3}a0) \u{22b8} !^{q7}(!^{p4}a0 \u{22b8} !^{q5}a0))"
        );
        // shared y forces p1 >= 1
        let full = typing_constraints(&t, &sigma);
        assert!(rendered(&full).contains(&"p1 - 1 >= 0".to_string()));
    }

    #[test]
    fn application_shape_mismatch_is_unsat() {
        // x applied to y where sigma gives x an atom type
        let m = parse_term("x y").unwrap();
        let t = decorate_term(&m);
        let mut sigma = ParamAssignment::new();
        sigma.insert("x".into(), decorate_type(&parse_simple_type("a").unwrap()));
        sigma.insert(
            "y".into(),
            ParamType::Atom { param: "p9".into(), name: "a".into() },
        );
        assert!(typing_constraints(&t, &sigma).is_unsat());
        assert!(all_constraints(&t, &sigma).is_unsat());
    }

    #[test]
    fn single_occurrence_no_contraction() {
        let m = parse_term("\\x.x").unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let cs = typing_constraints(&t, &sigma);
        assert!(cs
            .constraints()
            .unwrap()
            .iter()
            .all(|c| c.origin != Origin::Contraction));
    }

    #[test]
    fn closed_id_feasible_at_zero() {
        let m = parse_term("\\x.x").unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let cs = all_constraints(&t, &sigma);
        let zeros: Instantiation = cs.params().into_iter().map(|p| (p, 0)).collect();
        assert_eq!(cs.satisfied_by(&zeros), Some(true));
    }

    #[test]
    fn generation_is_deterministic() {
        let m = parse_term("\\y.\\z. y (y z)").unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        assert_eq!(all_constraints(&t, &sigma), all_constraints(&t, &sigma));
    }

    #[test]
    fn json_and_lp_shapes() {
        let t = decorate_term(&Term::var("x"));
        let cs = boxing_constraints(&t);
        let json = cs.to_json();
        let arr = json.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[0]["lhs"]["m1"], 1);
        assert_eq!(arr[0]["rel"], "ge");
        assert_eq!(arr[0]["origin"], "bracket-prefix");
        assert_eq!(arr[1]["rel"], "eq");
        let lp = cs.to_lp_string(None);
        assert!(lp.contains("c1: m1 >= 0"));
        assert!(lp.contains("c2: m1 = 0"));
        assert!(lp.contains("m1 free"));
    }
}
