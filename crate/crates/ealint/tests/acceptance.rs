//! End-to-end acceptance gate: every criterion prints one PASS line on
//! success and is an ordinary failing test otherwise. The golden systems
//! in criteria 1 and 2 were derived by hand for Church 2 and are frozen
//! here as the external reference for the generator and the solver.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ealint::constraints::{
    all_constraints, boxing_constraints, default_objective, extend_param_assignment,
    typing_constraints, Constraint, ConstraintSet, LinExpr, Origin, Rel,
};
use ealint::decorate::{
    decorate_assignment, decorate_term, instantiate, instantiate_assignment, instantiate_type,
    Instantiation, ParamId,
};
use ealint::pipeline::{infer, Status};
use ealint::pseudo::{
    check_bracketing, check_scope, check_typing_condition, erase, parse_eal_type, BracketCheck,
    ScopeCheck, TypingCheck,
};
use ealint::schemes::{check_erasure_agreement, check_principal_agreement};
use ealint::simple::{principal_type, SimpleType};
use ealint::solver::{
    check_point, equivalent, oracle_enumerate, scale_to_integers, RationalPoint,
};
use ealint::syntax::{alpha_eq, alpha_rename, parse_term, variables_in_order, Term};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ge(terms: &[(&str, i64)], constant: i64) -> Constraint {
    let mut e = LinExpr::constant(constant);
    for (p, c) in terms {
        e.add_term(*p, *c);
    }
    Constraint::new(e, Rel::Ge, Origin::Types, Vec::new())
}

fn eq(terms: &[(&str, i64)], constant: i64) -> Constraint {
    let mut e = LinExpr::constant(constant);
    for (p, c) in terms {
        e.add_term(*p, *c);
    }
    Constraint::new(e, Rel::Eq, Origin::Types, Vec::new())
}

const CHURCH2: &str = "\\y.\\z. y (y z)";

/// Renaming from the generator's post-order extension parameters to the
/// hand-derived names p5..p11 (one per subterm of Church 2, read off the
/// extension at fixed paths).
fn church2_alignment() -> (ConstraintSet, ConstraintSet, BTreeMap<ParamId, ParamId>) {
    let m = parse_term(CHURCH2).unwrap();
    let t = decorate_term(&m);
    let (theta, _) = principal_type(&m).unwrap();
    let sigma = decorate_assignment(&theta, &variables_in_order(&m));
    let (types, _) = extend_param_assignment(&sigma, &t);
    let aligned: [(&[usize], &str); 7] = [
        (&[0, 0, 0], "p8"),
        (&[0, 0, 1, 0], "p6"),
        (&[0, 0, 1, 1], "p5"),
        (&[0, 0, 1], "p7"),
        (&[0, 0], "p9"),
        (&[0], "p10"),
        (&[], "p11"),
    ];
    let mut rename: BTreeMap<ParamId, ParamId> = BTreeMap::new();
    for (path, name) in aligned {
        let top = types[&path.to_vec()].top_param().clone();
        rename.insert(top, (*name).to_string());
    }
    (boxing_constraints(&t), typing_constraints(&t, &sigma), rename)
}

fn rename_constraint(c: &Constraint, rename: &BTreeMap<ParamId, ParamId>) -> Constraint {
    let mut e = LinExpr::constant(c.expr.constant);
    for (p, k) in &c.expr.coeffs {
        e.add_term(rename.get(p).unwrap_or(p).clone(), *k);
    }
    Constraint::new(e, c.rel, c.origin, c.path.clone())
}

fn rename_set(cs: &ConstraintSet, rename: &BTreeMap<ParamId, ParamId>) -> ConstraintSet {
    let mut out = ConstraintSet::new();
    for c in cs.constraints().unwrap() {
        out.push(rename_constraint(c, rename));
    }
    out
}

/// Drop `e >= 0` whenever `e = 0` is also present.
fn dedup_by_equalities(cs: &ConstraintSet) -> Vec<String> {
    let list = cs.constraints().unwrap();
    let mut out = Vec::new();
    for c in list {
        if c.rel == Rel::Ge
            && list.iter().any(|d| d.rel == Rel::Eq && d.expr == c.expr)
        {
            continue;
        }
        out.push(c.to_string());
    }
    out.sort();
    out
}

#[test]
fn criterion_1_golden_church2_constraints() {
    let start = Instant::now();
    let (boxing, typing, rename) = church2_alignment();

    // bracketing and scope, hand-derived from the seven door words
    let mut golden_boxing: Vec<String> = [
        "m1 >= 0",
        "m1 + m2 >= 0",
        "m1 + m2 + m3 >= 0",
        "m1 + m2 + m3 + m4 >= 0",
        "m1 + m2 + m3 + m5 >= 0",
        "m1 + m2 + m3 + m5 + m6 >= 0",
        "m1 + m2 + m3 + m5 + m7 >= 0",
        "m2 >= 0",
        "m2 + m3 >= 0",
        "m2 + m3 + m4 = 0",
        "m2 + m3 + m5 >= 0",
        "m2 + m3 + m5 + m6 = 0",
        "m3 >= 0",
        "m3 + m5 >= 0",
        "m3 + m5 + m7 = 0",
    ]
    .map(String::from)
    .to_vec();
    golden_boxing.sort();
    assert_eq!(dedup_by_equalities(&boxing), golden_boxing);

    // typing side, hand-derived: one exponent per subterm type (p5..p11
    // after alignment), application tops zero, contraction, nonnegativity
    let mut golden_typing = ConstraintSet::new();
    for c in [
        eq(&[("p5", 1), ("m7", -1), ("p4", -1)], 0),
        ge(&[("p5", 1)], 0),
        eq(&[("p6", 1), ("m6", -1), ("p1", -1)], 0),
        ge(&[("p6", 1)], 0),
        eq(&[("p6", 1)], 0),
        eq(&[("p2", 1), ("p5", -1)], 0),
        eq(&[("p7", 1), ("m5", -1), ("p3", -1)], 0),
        ge(&[("p7", 1)], 0),
        eq(&[("p8", 1), ("m4", -1), ("p1", -1)], 0),
        ge(&[("p8", 1)], 0),
        eq(&[("p8", 1)], 0),
        eq(&[("p2", 1), ("p7", -1)], 0),
        eq(&[("p9", 1), ("m3", -1), ("p3", -1)], 0),
        ge(&[("p9", 1)], 0),
        eq(&[("p10", 1), ("m2", -1)], 0),
        ge(&[("p10", 1)], 0),
        eq(&[("p11", 1), ("m1", -1)], 0),
        ge(&[("p11", 1)], 0),
        ge(&[("p1", 1)], -1),
        ge(&[("p1", 1)], 0),
        ge(&[("p2", 1)], 0),
        ge(&[("p3", 1)], 0),
        ge(&[("p4", 1)], 0),
    ] {
        golden_typing.push(c);
    }

    let mine = rename_set(&typing, &rename);
    // the generator names two extra exponents (one per abstraction node)
    // that the hand derivation inlines as zero; pin them on the golden
    // side so both systems range over the same parameters
    let golden_names: Vec<ParamId> =
        golden_typing.params().into_iter().collect();
    for p in mine.params() {
        if !golden_names.contains(&p) && !p.starts_with('m') && !["p1", "p2", "p3", "p4"].contains(&p.as_str()) {
            let pinned = Constraint::new(LinExpr::var(p.clone()), Rel::Eq, Origin::Types, Vec::new());
            assert!(
                mine.constraints().unwrap().iter().any(|c| c.rel == Rel::Eq && c.expr == pinned.expr),
                "unaligned parameter {p} is not pinned to zero by the generator"
            );
            golden_typing.push(pinned);
        }
    }
    assert!(equivalent(&mine, &golden_typing), "typing systems are not equivalent");
    assert!(start.elapsed().as_secs() < 1, "criterion 1 exceeded 1 s");
    println!("criterion 1 (golden Church-2 constraint reproduction): PASS");
}

/// Complete a partial assignment (m's and assignment p's fixed) to all
/// extension parameters by walking the defining equalities in order.
fn complete_instantiation(typing: &ConstraintSet, phi: &mut Instantiation) {
    for c in typing.constraints().unwrap() {
        if c.rel != Rel::Eq || !matches!(c.origin, Origin::Abstraction | Origin::BangSum) {
            continue;
        }
        let unknown: Vec<&ParamId> =
            c.expr.coeffs.keys().filter(|p| !phi.contains_key(*p)).collect();
        if unknown.len() != 1 {
            continue;
        }
        let q = unknown[0].clone();
        let k = c.expr.coeffs[&q];
        assert_eq!(k.abs(), 1, "defining equality is not unit in {q}");
        let rest: i64 = c.expr.constant
            + c.expr.coeffs.iter().filter(|(p, _)| **p != q).map(|(p, v)| v * phi[p]).sum::<i64>();
        phi.insert(q, -rest / k);
    }
}

#[test]
fn criterion_2_golden_church2_solution_family() {
    let start = Instant::now();
    let m = parse_term(CHURCH2).unwrap();
    let t = decorate_term(&m);
    let (theta, _) = principal_type(&m).unwrap();
    let sigma = decorate_assignment(&theta, &variables_in_order(&m));
    let cs = all_constraints(&t, &sigma);
    let (types, _) = extend_param_assignment(&sigma, &t);
    let (_, typing, rename) = church2_alignment();
    let back: BTreeMap<ParamId, ParamId> =
        rename.iter().map(|(k, v)| (v.clone(), k.clone())).collect();

    // the reduced solution family, hand-derived by eliminating the
    // equalities of criterion 1's golden system
    let reduced = [
        ge(&[("m1", 1)], 0),
        ge(&[("m2", 1)], 0),
        ge(&[("m3", 1)], 0),
        eq(&[("p1", 1), ("m2", -1), ("m3", -1)], 0),
        ge(&[("p1", 1)], -1),
        eq(&[("m3", 1), ("m7", 1)], 0),
        eq(&[("m5", 1)], 0),
        eq(&[("m4", 1), ("p1", 1)], 0),
        eq(&[("m6", 1), ("p1", 1)], 0),
        eq(&[("p2", 1), ("p3", -1)], 0),
        eq(&[("p4", 1), ("p2", -1), ("m3", -1)], 0),
        eq(&[("p9", 1), ("p2", -1), ("m3", -1)], 0),
    ];

    // the pipeline's own witness lies in the family
    let result = infer(&m);
    assert_eq!(result.status, Status::Typed);
    let witness = result.witness.clone().unwrap();
    for c in &reduced {
        let c = rename_constraint(c, &back);
        assert_eq!(c.satisfied_by(&witness), Some(true), "witness violates {c}");
    }

    // two hand-picked family points and the types they induce
    let points: [(&[(&str, i64)], &str); 2] = [
        (
            &[
                ("m1", 0), ("m2", 0), ("m3", 1), ("m4", -1), ("m5", 0), ("m6", -1), ("m7", -1),
                ("p1", 1), ("p2", 0), ("p3", 0), ("p4", 1),
            ],
            "!(a0 -o a0) -o (!a0 -o !a0)",
        ),
        (
            &[
                ("m1", 0), ("m2", 1), ("m3", 0), ("m4", -1), ("m5", 0), ("m6", -1), ("m7", 0),
                ("p1", 1), ("p2", 0), ("p3", 0), ("p4", 0),
            ],
            "!(a0 -o a0) -o !(a0 -o a0)",
        ),
    ];
    for (fixed, expected) in points {
        let mut phi: Instantiation =
            fixed.iter().map(|(p, v)| ((*p).to_string(), *v)).collect();
        complete_instantiation(&typing, &mut phi);
        assert_eq!(cs.satisfied_by(&phi), Some(true), "family point violates the system");
        let ty = instantiate_type(&phi, &types[&Vec::new()]).unwrap();
        assert_eq!(ty, parse_eal_type(expected).unwrap());
        // the decorated term instantiates to a legal pseudo-term
        let inst = instantiate(&phi, &t).unwrap();
        assert_eq!(check_bracketing(&inst), BracketCheck::Pass);
        assert_eq!(check_scope(&inst), ScopeCheck::Pass);
    }
    assert!(start.elapsed().as_secs() < 1, "criterion 2 exceeded 1 s");
    println!("criterion 2 (golden Church-2 solution family): PASS");
}

fn corpus() -> Vec<&'static str> {
    vec![
        "\\f.\\z.z",
        "\\f.\\z.f z",
        "\\f.\\z.f (f z)",
        "\\f.\\z.f (f (f z))",
        "\\f.\\z.f (f (f (f z)))",
        "\\f.\\g.\\x.f (g x)",
        "\\x.\\y.\\p.p x y",
        "\\p.p (\\x.\\y.x)",
        "\\p.p (\\x.\\y.y)",
        "\\x.x",
        "\\x.\\y.x",
        "\\x.\\y.y",
        "\\x.\\y.\\z.(x z) (y z)",
        "(\\x.x) (\\y.y)",
        "\\f.\\x.(\\y.f y) x",
        "\\a.\\b.\\c.\\d.a (b (c d))",
        "(\\p.p (\\x.\\y.x)) (\\z.z)",
        "\\x.\\f.f x",
        "(\\f.\\x.f (f x)) (\\y.y)",
        "\\f.\\g.\\x.\\y.f (g x) (g y)",
        "\\x.\\y.x (x y)",
        "\\f.\\z.(\\w.w) (f z)",
    ]
}

#[test]
fn criterion_3_round_trip_suite() {
    let start = Instant::now();
    for src in corpus() {
        let m = parse_term(src).unwrap();
        let result = infer(&m);
        assert_eq!(result.status, Status::Typed, "{src} did not type");
        let v = result.verification.as_ref().unwrap();
        assert!(v.all_pass(), "{src}: verification failed: {v:?}");
        let t = result.pseudo_term.as_ref().unwrap();
        assert!(alpha_eq(&erase(t), &m), "{src}: erasure is not the input term");
        assert_eq!(
            erase(t).to_string(),
            alpha_rename(&m).to_string(),
            "{src}: erasure differs from the renamed input"
        );
        assert!(result.derivation.is_some(), "{src}: no derivation");
        assert_eq!(v.derivation, Some(true), "{src}: derivation check failed");
    }
    assert!(start.elapsed().as_secs() < 5, "criterion 3 exceeded 5 s");
    println!("criterion 3 (round-trip verification suite, {} terms): PASS", corpus().len());
}

/// All closed lambda terms of the given size, in de Bruijn style with
/// binder names chosen by depth.
fn closed_terms(size: usize, depth: usize) -> Vec<Term> {
    let mut out = Vec::new();
    if size == 0 {
        return out;
    }
    if size == 1 {
        for d in 0..depth {
            out.push(Term::var(format!("v{d}")));
        }
        return out;
    }
    for body in closed_terms(size - 1, depth + 1) {
        out.push(Term::abs(format!("v{depth}"), body));
    }
    for ls in 1..size - 1 {
        for f in closed_terms(ls, depth) {
            for a in closed_terms(size - 1 - ls, depth) {
                out.push(Term::app(f.clone(), a));
            }
        }
    }
    out
}

#[test]
fn criterion_4_oracle_equivalence_exhaustive() {
    let start = Instant::now();
    let mut total = 0usize;
    let mut typed = 0usize;
    for size in 1..=7 {
        for m in closed_terms(size, 0) {
            let m = alpha_rename(&m);
            let Ok((theta, _)) = principal_type(&m) else { continue };
            total += 1;
            let t = decorate_term(&m);
            let sigma = decorate_assignment(&theta, &variables_in_order(&m));
            let cs = all_constraints(&t, &sigma);
            let result = infer(&m);
            match result.status {
                Status::Typed => {
                    typed += 1;
                    let witness = result.witness.unwrap();
                    assert_eq!(
                        cs.satisfied_by(&witness),
                        Some(true),
                        "{m}: witness does not satisfy the system"
                    );
                }
                Status::NotEalTypable => {
                    // witness-found => typed, checked as the contrapositive
                    let found = oracle_enumerate(&cs, 3).expect("guard not exceeded");
                    assert!(found.is_none(), "{m}: oracle found a witness but infer did not");
                }
                Status::NotSimplyTypable => unreachable!("principal typing succeeded"),
            }
        }
    }
    assert!(typed > 0 && total > 100, "exhaustive space unexpectedly small");
    assert!(start.elapsed().as_secs() < 300, "criterion 4 exceeded 5 min");
    println!("criterion 4 (oracle equivalence, {total} simply typable closed terms <= size 7): PASS");
}

fn random_term(rng: &mut ChaCha8Rng, size: usize, depth: usize) -> Term {
    if size <= 1 {
        if depth > 0 {
            return Term::var(format!("v{}", rng.gen_range(0..depth)));
        }
        return Term::abs("v0", Term::var("v0"));
    }
    if depth == 0 || size < 3 || rng.gen_bool(0.45) {
        return Term::abs(format!("v{depth}"), random_term(rng, size - 1, depth + 1));
    }
    let ls = rng.gen_range(1..size - 1);
    Term::app(random_term(rng, ls, depth), random_term(rng, size - 1 - ls, depth))
}

#[test]
fn criterion_5_randomized_condition_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bracketing_cases = 0usize;
    let mut typing_cases = 0usize;
    while bracketing_cases < 1000 || typing_cases < 1000 {
        let size = rng.gen_range(3..10);
        let m = alpha_rename(&random_term(&mut rng, size, 0));
        let t = decorate_term(&m);

        // box decorations against bracketing + scope
        let boxing = boxing_constraints(&t);
        for _ in 0..4 {
            let phi: Instantiation =
                t.params().into_iter().map(|p| (p, rng.gen_range(-3..=3))).collect();
            let inst = instantiate(&phi, &t).unwrap();
            let expected = boxing.satisfied_by(&phi) == Some(true);
            let actual = check_bracketing(&inst) == BracketCheck::Pass
                && check_scope(&inst) == ScopeCheck::Pass;
            assert_eq!(expected, actual, "{m}: boxing mismatch at {phi:?}");
            bracketing_cases += 1;
        }

        // type decorations against the typing condition
        let Ok((theta, _)) = principal_type(&m) else { continue };
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let typing = typing_constraints(&t, &sigma);
        for _ in 0..4 {
            let mut phi: Instantiation =
                t.params().into_iter().map(|p| (p, rng.gen_range(-3..=3))).collect();
            for p in ealint::decorate::assignment_params(&sigma) {
                phi.insert(p, rng.gen_range(0..=3));
            }
            complete_instantiation(&typing, &mut phi);
            let inst = instantiate(&phi, &t).unwrap();
            let gamma = instantiate_assignment(&phi, &sigma).unwrap();
            let expected = typing.satisfied_by(&phi) == Some(true);
            let actual = check_typing_condition(&inst, &gamma) == TypingCheck::Pass;
            assert_eq!(expected, actual, "{m}: typing mismatch at {phi:?}");
            typing_cases += 1;
        }
    }
    assert!(start.elapsed().as_secs() < 60, "criterion 5 exceeded 1 min");
    println!(
        "criterion 5 (randomized condition equivalence, {bracketing_cases} boxing + {typing_cases} typing cases): PASS"
    );
}

#[test]
fn criterion_6_integer_scaling() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11ce);
    let mut cases = 0usize;
    while cases < 1000 {
        // a pre-chosen rational point, then a system built to hold there:
        // homogeneous rows plus "expr >= 1" rows, the shapes the pipeline
        // emits (every pipeline constant is 0 or -1)
        let k = rng.gen_range(2..=6usize);
        let names: Vec<ParamId> = (0..k).map(|i| format!("x{i}")).collect();
        let nums: Vec<i64> = (0..k).map(|_| rng.gen_range(-9..=9)).collect();
        let dens: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
        let point: RationalPoint =
            names.iter().cloned().zip(nums.iter().zip(&dens).map(|(n, d)| rat(*n, *d))).collect();

        let mut cs = ConstraintSet::new();
        for _ in 0..rng.gen_range(2..=8) {
            match rng.gen_range(0..3) {
                0 => {
                    // homogeneous equality vanishing at the point
                    let i = rng.gen_range(0..k);
                    let j = rng.gen_range(0..k);
                    if i == j {
                        continue;
                    }
                    let mut e = LinExpr::default();
                    e.add_term(names[i].clone(), dens[i] * nums[j]);
                    e.add_term(names[j].clone(), -dens[j] * nums[i]);
                    cs.push(Constraint::new(e, Rel::Eq, Origin::Types, Vec::new()));
                }
                1 => {
                    // homogeneous inequality, sign-corrected at the point
                    let mut e = LinExpr::default();
                    let mut val = BigRational::zero();
                    for i in 0..k {
                        let c = rng.gen_range(-3..=3i64);
                        e.add_term(names[i].clone(), c);
                        val += rat(c, 1) * &point[&names[i]];
                    }
                    if val < BigRational::zero() {
                        let mut neg = LinExpr::default();
                        for (p, c) in &e.coeffs {
                            neg.add_term(p.clone(), -c);
                        }
                        e = neg;
                    }
                    cs.push(Constraint::new(e, Rel::Ge, Origin::Types, Vec::new()));
                }
                _ => {
                    // c * x_i - 1 >= 0 with c picked to hold at the point
                    let Some(i) = (0..k).find(|&i| nums[i] != 0) else { continue };
                    let sign = if nums[i] > 0 { 1 } else { -1 };
                    let c = sign * dens[i] * (rng.gen_range(1..=3i64));
                    let mut e = LinExpr::default();
                    e.add_term(names[i].clone(), c);
                    e.constant = -1;
                    if c * nums[i] / dens[i] >= 1 {
                        cs.push(Constraint::new(e, Rel::Ge, Origin::Types, Vec::new()));
                    }
                }
            }
        }
        let mut full = point.clone();
        for p in cs.params() {
            full.entry(p).or_insert_with(BigRational::zero);
        }
        if !check_point(&cs, &full) {
            // a >= 1 row can be absent or the point can sit outside; the
            // construction guarantees feasibility, so this is a bug
            panic!("constructed system does not hold at its own point");
        }
        let phi = scale_to_integers(&full, &cs).expect("scaling preserves feasibility");
        assert_eq!(cs.satisfied_by(&phi), Some(true));
        cases += 1;
    }

    // the same property on real pipeline systems and solver points
    for src in ["\\f.\\z.f (f z)", "\\x.\\y.\\z.(x z) (y z)", "\\f.\\g.\\x.f (g x)"] {
        let m = parse_term(src).unwrap();
        let t = decorate_term(&m);
        let (theta, _) = principal_type(&m).unwrap();
        let sigma = decorate_assignment(&theta, &variables_in_order(&m));
        let cs = all_constraints(&t, &sigma);
        let obj = default_objective(&t, &sigma);
        let ealint::solver::SolveOutcome::Feasible(psi) =
            ealint::solver::solve_rational(&cs, &obj).unwrap()
        else {
            panic!("{src} should be feasible");
        };
        let phi = scale_to_integers(&psi, &cs).unwrap();
        assert_eq!(cs.satisfied_by(&phi), Some(true));
        cases += 1;
    }
    assert!(start.elapsed().as_secs() < 60, "criterion 6 exceeded 1 min");
    println!("criterion 6 (integer scaling of rational witnesses, {cases} cases): PASS");
}

#[test]
fn criterion_7_scheme_cross_checks() {
    let start = Instant::now();
    let mut checked = 0usize;
    for src in corpus() {
        let m = parse_term(src).unwrap();
        let result = infer(&m);
        assert_eq!(result.status, Status::Typed);
        let t = result.pseudo_term.as_ref().unwrap();
        let (theta, principal) = result.principal.as_ref().unwrap();
        assert!(check_erasure_agreement(t), "{src}: scheme erasure disagrees");
        assert!(
            check_principal_agreement(t, theta, principal),
            "{src}: scheme m.g.u. does not reproduce the principal type"
        );
        let v = result.verification.as_ref().unwrap();
        assert_eq!(v.scheme_erasure, Some(true));
        assert_eq!(v.scheme_instance, Some(true));
        assert_eq!(v.principal_agreement, Some(true));
        checked += 1;
    }
    assert!(start.elapsed().as_secs() < 60, "criterion 7 exceeded 1 min");
    println!("criterion 7 (type-scheme cross-checks on {checked} typed outputs): PASS");
}

fn church(n: usize) -> Term {
    let mut b = Term::var("z");
    for _ in 0..n {
        b = Term::app(Term::var("f"), b);
    }
    Term::abs("f", Term::abs("z", b))
}

fn spine(n: usize) -> Term {
    let mut t = Term::var("x0");
    for i in 1..=n {
        t = Term::app(t, Term::abs(format!("y{i}"), Term::var(format!("y{i}"))));
    }
    Term::abs("x0", t)
}

fn ladder(n: usize) -> Term {
    let mut body = Term::var("x1");
    for i in 2..=n {
        body = Term::app(Term::var(format!("x{i}")), body);
    }
    let mut t = body;
    for i in (1..=n).rev() {
        t = Term::abs(format!("x{i}"), t);
    }
    t
}

/// |t| + |Theta|: term size plus the sizes of every type in the simple
/// typing (context entries and the principal type).
fn problem_size(m: &Term) -> usize {
    let (theta, principal) = principal_type(m).unwrap();
    m.size() + theta.values().map(SimpleType::size).sum::<usize>() + principal.size()
}

/// Largest member of the family with problem size <= 700.
fn scale_family(gen: fn(usize) -> Term) -> Term {
    let mut best = gen(1);
    for n in 2.. {
        let t = gen(n);
        if problem_size(&t) > 700 {
            break;
        }
        best = t;
    }
    best
}

#[test]
fn criterion_8_desk_scale_runtime() {
    let mut reached = 0usize;
    for (name, gen) in
        [("church", church as fn(usize) -> Term), ("spine", spine), ("ladder", ladder)]
    {
        let m = scale_family(gen);
        let size = problem_size(&m);
        reached = reached.max(size);
        let start = Instant::now();
        let result = infer(&m);
        let elapsed = start.elapsed();
        assert_eq!(result.status, Status::Typed, "{name} family member did not type");
        assert!(result.verification.as_ref().unwrap().all_pass());
        assert!(
            elapsed.as_secs_f64() < 10.0,
            "{name} at size {size} took {elapsed:?} (budget 10 s)"
        );
        // frozen quadratic bound on the generated system
        let count = result.constraints.as_ref().unwrap().len();
        assert!(
            count <= size * size,
            "{name} at size {size}: {count} constraints exceed the quadratic bound"
        );
        println!("  {name}: size {size}, {count} constraints, {elapsed:?}");
    }
    assert!(reached >= 650, "no family approached size 700 (best {reached})");
    println!("criterion 8 (desk-scale runtime, families up to size 700): PASS");
}
