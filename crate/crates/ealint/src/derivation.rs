//! Derivation trees for the sharing-free typing discipline, their
//! reconstruction from a pseudo-term that passes the bracketing, scope and
//! typing conditions, and an independent node-by-node checker.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::pseudo::{
    boxing_decompose, check_bracketing, check_scope, check_typing_condition, erase,
    extend_assignment, free_vars, substitute, BracketCheck, EALAssignment, EALType, PseudoTerm,
    ScopeCheck, TypingCheck,
};
use crate::syntax::Ident;

pub type Context = BTreeMap<Ident, EALType>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub context: Context,
    pub subject: PseudoTerm,
    pub ty: EALType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Var,
    /// Adds the named unused hypothesis.
    Weak(Ident),
    Appl,
    Abst,
    /// Doors pair each fresh skeleton variable with its auxiliary premise
    /// subject; the conclusion subject is the skeleton with `$u_i`
    /// substituted back in. Children: auxiliary premises then the main one.
    Prom { doors: Vec<(Ident, PseudoTerm)> },
    /// Merges `merged` (all of the same banged type) into `into`.
    Contr { merged: Vec<Ident>, into: Ident },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::Weak(_) => "weak",
            Rule::Appl => "appl",
            Rule::Abst => "abst",
            Rule::Prom { .. } => "prom",
            Rule::Contr { .. } => "contr",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub judgement: Judgement,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Derivation::node_count).sum::<usize>()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconstructError {
    #[error("bracketing condition fails")]
    Bracketing,
    #[error("scope condition fails")]
    Scope,
    #[error("typing condition fails")]
    Typing,
}

/// Rename free occurrences of `old` to `new` in every subject and context
/// of a derivation. Safe because the names being introduced are fresh.
fn rename_free(d: &mut Derivation, old: &str, new: &str) {
    d.judgement.subject = substitute(&d.judgement.subject, old, &PseudoTerm::var(new));
    if let Some(ty) = d.judgement.context.remove(old) {
        d.judgement.context.insert(new.to_string(), ty);
    }
    if let Rule::Contr { merged, into } = &mut d.rule {
        for m in merged.iter_mut() {
            if m == old {
                *m = new.to_string();
            }
        }
        if into == old {
            *into = new.to_string();
        }
    }
    if let Rule::Prom { doors } = &mut d.rule {
        for (_, u) in doors.iter_mut() {
            *u = substitute(u, old, &PseudoTerm::var(new));
        }
    }
    if let Rule::Weak(x) = &mut d.rule {
        if x == old {
            *x = new.to_string();
        }
    }
    for c in &mut d.children {
        rename_free(c, old, new);
    }
}

struct Recon<'a> {
    gamma: &'a EALAssignment,
    fresh: u32,
}

struct PendingContr {
    merged: Vec<Ident>,
    into: Ident,
    ty: EALType,
}

impl<'a> Recon<'a> {
    fn fresh_name(&mut self, base: &str) -> Ident {
        let n = self.fresh;
        self.fresh += 1;
        format!("{base}#{n}")
    }

    fn lookup(&self, x: &str) -> EALType {
        self.gamma
            .get(x)
            .cloned()
            .expect("assignment total on variables of the term")
    }

    fn build(&mut self, t: &PseudoTerm) -> Derivation {
        match t {
            PseudoTerm::Var(x) => {
                let ty = self.lookup(x);
                Derivation {
                    rule: Rule::Var,
                    judgement: Judgement {
                        context: BTreeMap::from([(x.clone(), ty.clone())]),
                        subject: t.clone(),
                        ty,
                    },
                    children: vec![],
                }
            }
            PseudoTerm::Abs(x, body) => {
                let mut d = self.build(body);
                let dom = self.lookup(x);
                if !d.judgement.context.contains_key(x) {
                    let mut context = d.judgement.context.clone();
                    context.insert(x.clone(), dom.clone());
                    let judgement = Judgement {
                        context,
                        subject: d.judgement.subject.clone(),
                        ty: d.judgement.ty.clone(),
                    };
                    d = Derivation { rule: Rule::Weak(x.clone()), judgement, children: vec![d] };
                }
                let mut context = d.judgement.context.clone();
                context.remove(x);
                let ty = EALType::lolli(dom, d.judgement.ty.clone());
                Derivation {
                    rule: Rule::Abst,
                    judgement: Judgement { context, subject: t.clone(), ty },
                    children: vec![d],
                }
            }
            PseudoTerm::App(f, a) => {
                let mut df = self.build(f);
                let mut da = self.build(a);
                let shared: Vec<Ident> = df
                    .judgement
                    .context
                    .keys()
                    .filter(|k| da.judgement.context.contains_key(*k))
                    .cloned()
                    .collect();
                let mut contractions: Vec<PendingContr> = Vec::new();
                for y in shared {
                    let ty = df.judgement.context[&y].clone();
                    let yf = self.fresh_name(&y);
                    let ya = self.fresh_name(&y);
                    rename_free(&mut df, &y, &yf);
                    rename_free(&mut da, &y, &ya);
                    contractions.push(PendingContr { merged: vec![yf, ya], into: y, ty });
                }
                let EALType::Lollipop(_, cod) = df.judgement.ty.clone() else {
                    panic!("typing condition guarantees an arrow at applications");
                };
                let mut context = df.judgement.context.clone();
                context.extend(da.judgement.context.clone());
                let subject =
                    PseudoTerm::app(df.judgement.subject.clone(), da.judgement.subject.clone());
                let mut d = Derivation {
                    rule: Rule::Appl,
                    judgement: Judgement { context, subject, ty: *cod },
                    children: vec![df, da],
                };
                for c in contractions {
                    d = apply_contraction(d, c);
                }
                d
            }
            PseudoTerm::Bang(_) => {
                let (skeleton, doors) = boxing_decompose(t)
                    .expect("bracketing condition guarantees a decomposition");
                // auxiliary premises, with any root contractions postponed
                // until after the promotion
                let mut aux: Vec<Derivation> = Vec::new();
                let mut hoisted: Vec<PendingContr> = Vec::new();
                let mut hoisted_names: std::collections::BTreeSet<Ident> =
                    std::collections::BTreeSet::new();
                for (_, u) in &doors {
                    let mut d = self.build(u);
                    while let Rule::Contr { merged, into } = d.rule.clone() {
                        let ty = d.children[0].judgement.context[&merged[0]].clone();
                        hoisted_names.extend(merged.iter().cloned());
                        hoisted.push(PendingContr { merged, into, ty });
                        d = d.children.into_iter().next().unwrap();
                    }
                    aux.push(d);
                }
                // group all representatives of each original variable: the
                // renamed copies from hoisted contractions plus any direct
                // occurrences across the auxiliary contexts
                let mut groups: BTreeMap<Ident, (Vec<Ident>, EALType)> = BTreeMap::new();
                for p in hoisted {
                    let e = groups.entry(p.into.clone()).or_insert_with(|| (vec![], p.ty.clone()));
                    e.0.extend(p.merged);
                }
                let direct: Vec<Ident> = aux
                    .iter()
                    .flat_map(|d| d.judgement.context.keys().cloned())
                    .filter(|k| !hoisted_names.contains(k))
                    .collect();
                let mut direct_counts: BTreeMap<Ident, usize> = BTreeMap::new();
                for k in &direct {
                    *direct_counts.entry(k.clone()).or_insert(0) += 1;
                }
                for (y, n) in direct_counts {
                    let needs_merge = n >= 2 || groups.contains_key(&y);
                    if !needs_merge {
                        continue;
                    }
                    let ty = aux
                        .iter()
                        .find_map(|d| d.judgement.context.get(&y))
                        .unwrap()
                        .clone();
                    let entry = groups.entry(y.clone()).or_insert_with(|| (vec![], ty));
                    for d in aux.iter_mut() {
                        if d.judgement.context.contains_key(&y) {
                            let fresh = self.fresh_name(&y);
                            rename_free(d, &y, &fresh);
                            entry.0.push(fresh);
                        }
                    }
                }
                let pending: Vec<PendingContr> = groups
                    .into_iter()
                    .map(|(into, (merged, ty))| PendingContr { merged, into, ty })
                    .collect();

                // the skeleton is typed with its fresh door variables bound
                // to the unbanged auxiliary types
                let mut inner = self.gamma.clone();
                for ((x, _), d) in doors.iter().zip(&aux) {
                    let EALType::Bang(b) = &d.judgement.ty else {
                        panic!("typing condition guarantees banged auxiliary types");
                    };
                    inner.insert(x.clone(), (**b).clone());
                }
                let mut sub = Recon { gamma: &inner, fresh: self.fresh };
                let main = sub.build(&skeleton);
                self.fresh = sub.fresh;

                let mut context = Context::new();
                for d in &aux {
                    context.extend(d.judgement.context.clone());
                }
                let mut subject = main.judgement.subject.clone();
                let prom_doors: Vec<(Ident, PseudoTerm)> = doors
                    .iter()
                    .zip(&aux)
                    .map(|((x, _), d)| (x.clone(), d.judgement.subject.clone()))
                    .collect();
                for (x, u) in &prom_doors {
                    subject = substitute(&subject, x, &PseudoTerm::cobang(u.clone()));
                }
                let ty = EALType::bang(main.judgement.ty.clone());
                let mut children = aux;
                children.push(main);
                let mut d = Derivation {
                    rule: Rule::Prom { doors: prom_doors },
                    judgement: Judgement { context, subject: PseudoTerm::bang(subject), ty },
                    children,
                };
                for c in pending {
                    d = apply_contraction(d, c);
                }
                d
            }
            PseudoTerm::CoBang(_) => {
                unreachable!("bracketing precondition rules out a top-level auxiliary door")
            }
        }
    }
}

fn apply_contraction(child: Derivation, c: PendingContr) -> Derivation {
    let mut context = child.judgement.context.clone();
    for m in &c.merged {
        context.remove(m);
    }
    context.insert(c.into.clone(), c.ty);
    let mut subject = child.judgement.subject.clone();
    for m in &c.merged {
        subject = substitute(&subject, m, &PseudoTerm::var(&c.into));
    }
    let ty = child.judgement.ty.clone();
    Derivation {
        rule: Rule::Contr { merged: c.merged, into: c.into },
        judgement: Judgement { context, subject, ty },
        children: vec![child],
    }
}

/// Reconstruct a derivation for `(t, gamma)`.
///
/// Callers must have established the bracketing, scope and typing
/// conditions; they are re-checked here and violations reported as errors.
/// The conclusion is `gamma` restricted to the free variables of `t`,
/// with the type given by the assignment extension.
pub fn reconstruct_derivation(
    t: &PseudoTerm,
    gamma: &EALAssignment,
) -> Result<Derivation, ReconstructError> {
    if check_bracketing(t) != BracketCheck::Pass {
        return Err(ReconstructError::Bracketing);
    }
    if check_scope(t) != ScopeCheck::Pass {
        return Err(ReconstructError::Scope);
    }
    if check_typing_condition(t, gamma) != TypingCheck::Pass {
        return Err(ReconstructError::Typing);
    }
    let mut recon = Recon { gamma, fresh: 0 };
    Ok(recon.build(t))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("rule {rule} violated at node {path:?}: {reason}")]
pub struct DerivationError {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub reason: String,
}

/// Validate every node of a derivation against its rule schema.
///
/// Also enforces the structural restriction separating this discipline from
/// sharing-enabled typing: no auxiliary premise of a promotion may end in a
/// contraction, and every contracted type is banged.
pub fn check_derivation(d: &Derivation) -> Result<(), DerivationError> {
    fn fail(path: &[usize], rule: &'static str, reason: impl Into<String>) -> DerivationError {
        DerivationError { path: path.to_vec(), rule, reason: reason.into() }
    }

    fn go(d: &Derivation, path: &mut Vec<usize>) -> Result<(), DerivationError> {
        for (i, c) in d.children.iter().enumerate() {
            path.push(i);
            go(c, path)?;
            path.pop();
        }
        let j = &d.judgement;
        let rule = d.rule.name();
        match &d.rule {
            Rule::Var => {
                if !d.children.is_empty() {
                    return Err(fail(path, rule, "expected no premises"));
                }
                let PseudoTerm::Var(x) = &j.subject else {
                    return Err(fail(path, rule, "subject must be a variable"));
                };
                if j.context.len() != 1 || j.context.get(x) != Some(&j.ty) {
                    return Err(fail(path, rule, "context must be exactly the subject variable"));
                }
            }
            Rule::Weak(x) => {
                let [c] = d.children.as_slice() else {
                    return Err(fail(path, rule, "expected one premise"));
                };
                if c.judgement.context.contains_key(x) {
                    return Err(fail(path, rule, "weakened variable already in context"));
                }
                let mut expect = c.judgement.context.clone();
                match j.context.get(x) {
                    Some(ty) => expect.insert(x.clone(), ty.clone()),
                    None => return Err(fail(path, rule, "weakened variable missing")),
                };
                if j.context != expect
                    || j.subject != c.judgement.subject
                    || j.ty != c.judgement.ty
                {
                    return Err(fail(path, rule, "conclusion must add one unused hypothesis"));
                }
            }
            Rule::Appl => {
                let [cf, ca] = d.children.as_slice() else {
                    return Err(fail(path, rule, "expected two premises"));
                };
                let EALType::Lollipop(dom, cod) = &cf.judgement.ty else {
                    return Err(fail(path, rule, "function premise must have an arrow type"));
                };
                if **dom != ca.judgement.ty {
                    return Err(fail(path, rule, "argument type must match the arrow domain"));
                }
                if **cod != j.ty {
                    return Err(fail(path, rule, "conclusion type must be the arrow codomain"));
                }
                let expect_subject = PseudoTerm::app(
                    cf.judgement.subject.clone(),
                    ca.judgement.subject.clone(),
                );
                if j.subject != expect_subject {
                    return Err(fail(path, rule, "subject must be the application of premises"));
                }
                for k in cf.judgement.context.keys() {
                    if ca.judgement.context.contains_key(k) {
                        return Err(fail(path, rule, format!("contexts share variable {k}")));
                    }
                }
                let mut expect = cf.judgement.context.clone();
                expect.extend(ca.judgement.context.clone());
                if j.context != expect {
                    return Err(fail(path, rule, "context must be the union of premises"));
                }
            }
            Rule::Abst => {
                let [c] = d.children.as_slice() else {
                    return Err(fail(path, rule, "expected one premise"));
                };
                let PseudoTerm::Abs(x, body) = &j.subject else {
                    return Err(fail(path, rule, "subject must be an abstraction"));
                };
                if **body != c.judgement.subject {
                    return Err(fail(path, rule, "premise subject must be the body"));
                }
                let Some(dom) = c.judgement.context.get(x) else {
                    return Err(fail(path, rule, "binder missing from premise context"));
                };
                let expect_ty = EALType::lolli(dom.clone(), c.judgement.ty.clone());
                if j.ty != expect_ty {
                    return Err(fail(path, rule, "conclusion type must be the arrow"));
                }
                let mut expect = c.judgement.context.clone();
                expect.remove(x);
                if j.context != expect {
                    return Err(fail(path, rule, "context must drop exactly the binder"));
                }
            }
            Rule::Prom { doors } => {
                if d.children.len() != doors.len() + 1 {
                    return Err(fail(path, rule, "expected one premise per door plus the main"));
                }
                let (main, aux) = d.children.split_last().unwrap();
                if main.judgement.context.len() != doors.len() {
                    return Err(fail(path, rule, "main context must be exactly the door variables"));
                }
                for (i, ((x, u), a)) in doors.iter().zip(aux).enumerate() {
                    if a.judgement.subject != *u {
                        return Err(fail(path, rule, format!("door {i} subject mismatch")));
                    }
                    if matches!(a.rule, Rule::Contr { .. }) {
                        return Err(fail(
                            path,
                            rule,
                            "auxiliary premise must not end in a contraction",
                        ));
                    }
                    let EALType::Bang(inner) = &a.judgement.ty else {
                        return Err(fail(path, rule, format!("door {i} type must be banged")));
                    };
                    match main.judgement.context.get(x) {
                        Some(b) if *b == **inner => {}
                        _ => {
                            return Err(fail(
                                path,
                                rule,
                                format!("main hypothesis for door {i} must be the unbanged type"),
                            ))
                        }
                    }
                }
                let expect_ty = EALType::bang(main.judgement.ty.clone());
                if j.ty != expect_ty {
                    return Err(fail(path, rule, "conclusion type must bang the main type"));
                }
                let mut expect_subject = main.judgement.subject.clone();
                for (x, u) in doors {
                    expect_subject = substitute(&expect_subject, x, &PseudoTerm::cobang(u.clone()));
                }
                if j.subject != PseudoTerm::bang(expect_subject) {
                    return Err(fail(path, rule, "subject must be the substituted box body"));
                }
                let mut expect: Context = Context::new();
                for a in aux {
                    for (k, v) in &a.judgement.context {
                        if expect.insert(k.clone(), v.clone()).is_some() {
                            return Err(fail(
                                path,
                                rule,
                                format!("auxiliary contexts share variable {k}"),
                            ));
                        }
                    }
                }
                if j.context != expect {
                    return Err(fail(path, rule, "context must union the auxiliary contexts"));
                }
            }
            Rule::Contr { merged, into } => {
                let [c] = d.children.as_slice() else {
                    return Err(fail(path, rule, "expected one premise"));
                };
                if merged.len() < 2 {
                    return Err(fail(path, rule, "must merge at least two hypotheses"));
                }
                let Some(ty0) = c.judgement.context.get(&merged[0]) else {
                    return Err(fail(path, rule, "merged variable missing from premise"));
                };
                if !matches!(ty0, EALType::Bang(_)) {
                    return Err(fail(path, rule, "contracted type must be banged"));
                }
                for m in merged {
                    if c.judgement.context.get(m) != Some(ty0) {
                        return Err(fail(path, rule, "merged hypotheses must share one type"));
                    }
                }
                let mut expect = c.judgement.context.clone();
                for m in merged {
                    expect.remove(m);
                }
                if expect.contains_key(into) {
                    return Err(fail(path, rule, "target variable already in context"));
                }
                expect.insert(into.clone(), ty0.clone());
                if j.context != expect {
                    return Err(fail(path, rule, "context must replace the merged hypotheses"));
                }
                let mut expect_subject = c.judgement.subject.clone();
                for m in merged {
                    expect_subject = substitute(&expect_subject, m, &PseudoTerm::var(into));
                }
                if j.subject != expect_subject || j.ty != c.judgement.ty {
                    return Err(fail(path, rule, "subject or type mismatch"));
                }
            }
        }
        Ok(())
    }
    go(d, &mut Vec::new())
}

/// Sanity wrapper used by tests: the reconstructed conclusion matches the
/// assignment extension and the restricted context.
pub fn conclusion_matches(t: &PseudoTerm, gamma: &EALAssignment, d: &Derivation) -> bool {
    let expected_ty = match extend_assignment(gamma, t) {
        Ok(ty) => ty,
        Err(_) => return false,
    };
    let fv = free_vars(t);
    let expected_ctx: Context = gamma
        .iter()
        .filter(|(k, _)| fv.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    d.judgement.subject == *t
        && d.judgement.ty == expected_ty
        && d.judgement.context == expected_ctx
        && erase(&d.judgement.subject) == erase(t)
}
