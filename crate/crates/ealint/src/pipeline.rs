//! End-to-end inference: principal simple typing, decoration, constraint
//! generation, exact solving, instantiation, and full re-verification of
//! the result, including reconstruction and checking of a derivation.

use std::collections::BTreeMap;

use crate::constraints::{all_constraints, default_objective, ConstraintSet};
use crate::decorate::{
    decorate_assignment, decorate_term, instantiate, instantiate_assignment,
    Instantiation,
};
use crate::derivation::{
    check_derivation, conclusion_matches, reconstruct_derivation, Derivation,
};
use crate::pseudo::{
    check_bracketing, check_scope, check_typing_condition, erase, BracketCheck,
    EALAssignment, EALType, PseudoTerm, ScopeCheck, TypingCheck,
};
use crate::schemes::{check_erasure_agreement, check_principal_agreement, check_scheme_instance};
use crate::simple::{principal_type_with, SimpleAssignment, SimpleType, TypeError};
use crate::solver::{scale_to_integers, solve_rational, SolveOutcome};
use crate::syntax::{alpha_rename, free_vars, variables_in_order, Ident, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Typed,
    NotSimplyTypable,
    NotEalTypable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Typed => "typed",
            Status::NotSimplyTypable => "not-simply-typable",
            Status::NotEalTypable => "not-eal-typable",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Typed => 0,
            Status::NotEalTypable => 1,
            Status::NotSimplyTypable => 2,
        }
    }
}

/// Outcome of every re-verification pass run on a result.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub bracketing: Option<bool>,
    pub scope: Option<bool>,
    pub typing: Option<bool>,
    pub derivation: Option<bool>,
    pub scheme_erasure: Option<bool>,
    pub scheme_instance: Option<bool>,
    pub principal_agreement: Option<bool>,
}

impl Verification {
    pub fn checks(&self) -> [(&'static str, Option<bool>); 7] {
        [
            ("bracketing", self.bracketing),
            ("scope", self.scope),
            ("typing", self.typing),
            ("derivation", self.derivation),
            ("scheme-erasure", self.scheme_erasure),
            ("scheme-instance", self.scheme_instance),
            ("principal-agreement", self.principal_agreement),
        ]
    }

    /// Every executed check passed and none of the core checks was skipped.
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, v)| *v != Some(false))
            && self.bracketing == Some(true)
            && self.scope == Some(true)
            && self.typing == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InferenceResult {
    pub status: Status,
    pub principal: Option<(SimpleAssignment, SimpleType)>,
    pub constraints: Option<ConstraintSet>,
    pub witness: Option<Instantiation>,
    pub pseudo_term: Option<PseudoTerm>,
    pub eal_context: Option<EALAssignment>,
    pub eal_type: Option<EALType>,
    pub derivation: Option<Derivation>,
    pub verification: Option<Verification>,
}

impl InferenceResult {
    fn bare(status: Status) -> InferenceResult {
        InferenceResult {
            status,
            principal: None,
            constraints: None,
            witness: None,
            pseudo_term: None,
            eal_context: None,
            eal_type: None,
            derivation: None,
            verification: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("context type for {0} clashes with the term's principal typing")]
    InconsistentContext(Ident),
    #[error("assignment missing variable {0}")]
    MissingType(Ident),
}

/// Verification passes shared between infer and check.
fn verify(
    t: &PseudoTerm,
    gamma_total: &EALAssignment,
    principal: Option<(&SimpleAssignment, &SimpleType)>,
) -> (Verification, Option<Derivation>, Option<EALType>) {
    let mut v = Verification::default();
    v.bracketing = Some(check_bracketing(t) == BracketCheck::Pass);
    v.scope = Some(check_scope(t) == ScopeCheck::Pass);
    v.typing = Some(check_typing_condition(t, gamma_total) == TypingCheck::Pass);

    let ty = crate::pseudo::extend_assignment(gamma_total, t).ok();

    let mut derivation = None;
    if v.bracketing == Some(true) && v.scope == Some(true) && v.typing == Some(true) {
        match reconstruct_derivation(t, gamma_total) {
            Ok(d) => {
                let ok = check_derivation(&d).is_ok() && conclusion_matches(t, gamma_total, &d);
                v.derivation = Some(ok);
                derivation = Some(d);
            }
            Err(_) => v.derivation = Some(false),
        }
        v.scheme_erasure = Some(check_erasure_agreement(t));
        if let Some(b) = &ty {
            v.scheme_instance = Some(check_scheme_instance(t, gamma_total, b));
        }
        if let Some((theta, pt)) = principal {
            v.principal_agreement = Some(check_principal_agreement(t, theta, pt));
        }
    }
    (v, derivation, ty)
}

/// Inference with extra simple-typed hypotheses to decorate alongside the
/// term's own variables.
pub fn infer_with_context(
    m: &Term,
    extra: &[(Ident, SimpleType)],
) -> Result<InferenceResult, PipelineError> {
    let timing = std::env::var_os("EALINT_TIMING").is_some();
    let mut mark = std::time::Instant::now();
    let mut lap = |label: &str| {
        if timing {
            eprintln!("[timing] {label}: {:?}", mark.elapsed());
        }
        mark = std::time::Instant::now();
    };
    let m = alpha_rename(m);
    let (theta, principal) = match principal_type_with(&m, extra) {
        Ok(r) => r,
        Err(TypeError::NotSimplyTypable) => {
            return Ok(InferenceResult::bare(Status::NotSimplyTypable))
        }
        Err(TypeError::InconsistentContext(x)) => {
            return Err(PipelineError::InconsistentContext(x))
        }
    };

    lap("simple-typing");
    let decorated = decorate_term(&m);
    let mut order = variables_in_order(&m);
    for (x, _) in extra {
        if !order.iter().any(|v| v == x) {
            order.push(x.clone());
        }
    }
    let sigma = decorate_assignment(&theta, &order);
    let cs = all_constraints(&decorated, &sigma);
    let objective = default_objective(&decorated, &sigma);
    lap("constraints");

    let mut result = InferenceResult::bare(Status::NotEalTypable);
    result.principal = Some((theta.clone(), principal.clone()));
    result.constraints = Some(cs.clone());

    let psi = match solve_rational(&cs, &objective).expect("bounded objective") {
        SolveOutcome::Feasible(psi) => psi,
        SolveOutcome::Infeasible => return Ok(result),
    };
    lap("solve");
    let phi = scale_to_integers(&psi, &cs).expect("scaling preserves feasibility");
    lap("scale");

    let t = instantiate(&phi, &decorated).expect("witness covers all term parameters");
    let gamma_total = instantiate_assignment(&phi, &sigma)
        .expect("types clause keeps type parameters nonnegative");

    let (verification, derivation, ty) = verify(&t, &gamma_total, Some((&theta, &principal)));
    lap("verify");

    // hypotheses outside the term enter the final judgement via weakening
    let derivation = derivation.map(|mut d| {
        for (x, _) in extra {
            if !free_vars(&m).contains(x) {
                let mut judgement = d.judgement.clone();
                judgement
                    .context
                    .insert(x.clone(), gamma_total[x].clone());
                d = Derivation {
                    rule: crate::derivation::Rule::Weak(x.clone()),
                    judgement,
                    children: vec![d],
                };
            }
        }
        d
    });

    let fv = free_vars(&m);
    let mut eal_context: EALAssignment = gamma_total
        .iter()
        .filter(|(x, _)| fv.contains(*x))
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();
    for (x, _) in extra {
        eal_context.insert(x.clone(), gamma_total[x].clone());
    }

    result.status = Status::Typed;
    result.witness = Some(phi);
    result.pseudo_term = Some(t);
    result.eal_context = Some(eal_context);
    result.eal_type = ty;
    result.derivation = derivation;
    result.verification = Some(verification);
    Ok(result)
}

pub fn infer(m: &Term) -> InferenceResult {
    infer_with_context(m, &[]).expect("no extra context to clash")
}

/// Check a user-supplied pseudo-term against a type assignment: the three
/// conditions, then reconstruction and re-checking of the derivation.
pub fn check(t: &PseudoTerm, gamma: &EALAssignment) -> Result<InferenceResult, PipelineError> {
    let erased = erase(t);
    for x in variables_in_order(&erased) {
        if !gamma.contains_key(&x) {
            return Err(PipelineError::MissingType(x));
        }
    }
    let (verification, derivation, ty) = verify(t, gamma, None);
    let typed = verification.all_pass();
    let fv = crate::pseudo::free_vars(t);
    let mut result = InferenceResult::bare(if typed {
        Status::Typed
    } else {
        Status::NotEalTypable
    });
    result.pseudo_term = Some(t.clone());
    if typed {
        result.eal_context = Some(
            gamma
                .iter()
                .filter(|(x, _)| fv.contains(*x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        );
        result.eal_type = ty;
        result.derivation = derivation;
    }
    result.verification = Some(verification);
    Ok(result)
}

fn derivation_json(d: &Derivation) -> serde_json::Value {
    let context: BTreeMap<String, String> = d
        .judgement
        .context
        .iter()
        .map(|(x, t)| (x.clone(), t.to_string()))
        .collect();
    serde_json::json!({
        "rule": d.rule.name(),
        "context": context,
        "subject": d.judgement.subject.to_string(),
        "type": d.judgement.ty.to_string(),
        "children": d.children.iter().map(derivation_json).collect::<Vec<_>>(),
    })
}

pub fn to_json(r: &InferenceResult) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("status".into(), serde_json::json!(r.status.as_str()));
    if let Some((theta, ty)) = &r.principal {
        let ctx: BTreeMap<String, String> =
            theta.iter().map(|(x, t)| (x.clone(), t.to_string())).collect();
        obj.insert(
            "principal".into(),
            serde_json::json!({ "context": ctx, "type": ty.to_string() }),
        );
    }
    if let Some(cs) = &r.constraints {
        obj.insert("constraints".into(), cs.to_json());
    }
    if let Some(w) = &r.witness {
        obj.insert("witness".into(), serde_json::json!(w));
    }
    if let Some(t) = &r.pseudo_term {
        obj.insert("pseudo_term".into(), serde_json::json!(t.to_string()));
    }
    if let Some(g) = &r.eal_context {
        let ctx: BTreeMap<String, String> =
            g.iter().map(|(x, t)| (x.clone(), t.to_string())).collect();
        obj.insert("eal_context".into(), serde_json::json!(ctx));
    }
    if let Some(t) = &r.eal_type {
        obj.insert("eal_type".into(), serde_json::json!(t.to_string()));
    }
    if let Some(d) = &r.derivation {
        obj.insert("derivation".into(), derivation_json(d));
    }
    if let Some(v) = &r.verification {
        let checks: serde_json::Map<String, serde_json::Value> = v
            .checks()
            .iter()
            .map(|(name, outcome)| {
                let val = match outcome {
                    Some(b) => serde_json::json!(b),
                    None => serde_json::Value::Null,
                };
                (name.to_string(), val)
            })
            .collect();
        obj.insert("verification".into(), serde_json::Value::Object(checks));
    }
    serde_json::Value::Object(obj)
}
