//! Exact feasibility over the rationals: equality elimination followed by
//! two-phase simplex with Bland's rule, plus integer scaling and a brute
//! force enumeration oracle for cross-checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::constraints::{Constraint, ConstraintSet, LinExpr, Rel};
use crate::decorate::{Instantiation, ParamId};

pub type Rat = BigRational;
pub type RationalPoint = BTreeMap<ParamId, Rat>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("objective unbounded below; malformed constraint system")]
    Unbounded,
    #[error("solver internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Feasible(RationalPoint),
    Infeasible,
}

/// `(prefix, index)` so that q-parameters sort above p above m, and within
/// a family by index; used for the deterministic elimination pivot.
fn param_key(p: &str) -> (String, u64) {
    let split = p.find(|c: char| c.is_ascii_digit()).unwrap_or(p.len());
    let (alpha, digits) = p.split_at(split);
    (alpha.to_string(), digits.parse().unwrap_or(0))
}

/// Affine row over the parameters: value = coeffs . x + constant.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    coeffs: BTreeMap<ParamId, Rat>,
    constant: Rat,
}

impl Row {
    fn from_expr(e: &LinExpr) -> Row {
        Row {
            coeffs: e
                .coeffs
                .iter()
                .map(|(p, c)| (p.clone(), Rat::from(BigInt::from(*c))))
                .collect(),
            constant: Rat::from(BigInt::from(e.constant)),
        }
    }

    fn add_scaled(&mut self, other: &Row, factor: &Rat) {
        for (p, c) in &other.coeffs {
            let entry = self.coeffs.entry(p.clone()).or_insert_with(Rat::zero);
            *entry += c * factor;
            if entry.is_zero() {
                self.coeffs.remove(p);
            }
        }
        self.constant += &other.constant * factor;
    }

    /// Replace `v` by its definition `def` (a row not mentioning `v`).
    fn substitute(&mut self, v: &str, def: &Row) {
        if let Some(c) = self.coeffs.remove(v) {
            self.add_scaled(def, &c);
        }
    }

    fn eval(&self, point: &RationalPoint) -> Rat {
        let mut acc = self.constant.clone();
        for (p, c) in &self.coeffs {
            acc += c * point.get(p).cloned().unwrap_or_else(Rat::zero);
        }
        acc
    }
}

/// Equality-eliminated system: each solved variable is defined by a row
/// over the remaining free variables; the inequalities are rewritten over
/// the free variables only.
struct Reduced {
    solved: Vec<(ParamId, Row)>,
    ges: Vec<Row>,
    free: Vec<ParamId>,
}

fn presolve(cs: &[Constraint]) -> Option<Reduced> {
    let mut solved: Vec<(ParamId, Row)> = Vec::new();
    for c in cs.iter().filter(|c| c.rel == Rel::Eq) {
        let mut row = Row::from_expr(&c.expr);
        for (v, def) in &solved {
            row.substitute(v, def);
        }
        if row.coeffs.is_empty() {
            if row.constant.is_zero() {
                continue;
            }
            return None;
        }
        // pivot on the greatest variable so extension parameters are
        // eliminated before assignment and term parameters
        let pivot = row
            .coeffs
            .keys()
            .max_by_key(|p| param_key(p))
            .unwrap()
            .clone();
        let pc = row.coeffs.remove(&pivot).unwrap();
        let mut def = Row { coeffs: BTreeMap::new(), constant: -&row.constant / &pc };
        for (p, v) in &row.coeffs {
            def.coeffs.insert(p.clone(), -(v / &pc));
        }
        for (_, d) in solved.iter_mut() {
            d.substitute(&pivot, &def);
        }
        solved.push((pivot, def));
    }

    let mut ges: Vec<Row> = Vec::new();
    for c in cs.iter().filter(|c| c.rel == Rel::Ge) {
        let mut row = Row::from_expr(&c.expr);
        for (v, def) in &solved {
            row.substitute(v, def);
        }
        if row.coeffs.is_empty() {
            if row.constant < Rat::zero() {
                return None;
            }
            continue;
        }
        if !ges.contains(&row) {
            ges.push(row);
        }
    }

    let mut free: Vec<ParamId> = Vec::new();
    for c in cs {
        for p in c.expr.params() {
            if !free.contains(p) && !solved.iter().any(|(v, _)| v == p) {
                free.push(p.clone());
            }
        }
    }
    free.sort_by_key(|p| param_key(p));
    Some(Reduced { solved, ges, free })
}

enum SimplexResult {
    Optimal { x: Vec<Rat>, objective: Rat },
    Unbounded,
    Infeasible,
}

/// Sparse tableau row: nonzero entries sorted by column index.
type SRow = Vec<(usize, Rat)>;

fn sget(row: &SRow, c: usize) -> Option<&Rat> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
}

/// `dst - f * src`, dropping entries that cancel to zero.
fn saxpy(dst: &SRow, src: &SRow, f: &Rat) -> SRow {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i].clone());
            i += 1;
        } else if i >= dst.len() || src[j].0 < dst[i].0 {
            out.push((src[j].0, -(&src[j].1 * f)));
            j += 1;
        } else {
            let v = &dst[i].1 - &src[j].1 * f;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Minimize `cost . y` subject to the rows `coeff . y + constant >= 0`,
/// `y` free. Free variables use the difference-of-nonnegatives encoding.
/// Rows satisfied at the origin start with their slack basic; only rows
/// violated at the origin receive an artificial variable.
fn simplex_min(nvars: usize, rows: &[(SRow, Rat)], cost: &[Rat]) -> SimplexResult {
    let m = rows.len();
    let nart = rows.iter().filter(|(_, konst)| konst < &Rat::zero()).count();
    // columns: y+ (nvars), y- (nvars), slacks (m), artificials (nart)
    let n = 2 * nvars + m + nart;
    let art0 = 2 * nvars + m;
    let mut a: Vec<SRow> = Vec::with_capacity(m);
    let mut b = vec![Rat::zero(); m];
    let mut basis: Vec<usize> = vec![0; m];
    let mut next_art = 0;
    for (i, (co, konst)) in rows.iter().enumerate() {
        // coeff . y - s = -constant, s >= 0
        let rhs = -konst.clone();
        let sign = if rhs > Rat::zero() { Rat::one() } else { -Rat::one() };
        let mut row: SRow = Vec::with_capacity(2 * co.len() + 2);
        for (j, v) in co {
            row.push((*j, v * &sign));
        }
        for (j, v) in co {
            row.push((nvars + j, -v * &sign));
        }
        row.push((2 * nvars + i, -sign.clone()));
        b[i] = rhs * &sign;
        if sign == Rat::one() {
            row.push((art0 + next_art, Rat::one()));
            basis[i] = art0 + next_art;
            next_art += 1;
        } else {
            basis[i] = 2 * nvars + i;
        }
        a.push(row);
    }

    if std::env::var_os("EALINT_TIMING").is_some() {
        eprintln!("[simplex] rows={m} vars={nvars} artificials={nart} cols={n}");
    }
    // reduced-cost row for phase 1: minimize the sum of artificials
    let mut z = vec![Rat::zero(); n];
    let mut zval = Rat::zero();
    for (i, row) in a.iter().enumerate() {
        if basis[i] >= art0 {
            for (j, v) in row {
                if *j != basis[i] {
                    z[*j] -= v;
                }
            }
            zval -= b[i].clone();
        }
    }

    fn pivot(
        a: &mut [SRow],
        b: &mut [Rat],
        z: &mut [Rat],
        zval: &mut Rat,
        basis: &mut [usize],
        r: usize,
        c: usize,
    ) {
        let p = sget(&a[r], c).expect("pivot entry is nonzero").clone();
        for (_, v) in a[r].iter_mut() {
            *v /= &p;
        }
        b[r] /= &p;
        let prow = a[r].clone();
        for i in 0..a.len() {
            if i == r {
                continue;
            }
            if let Some(f) = sget(&a[i], c).cloned() {
                a[i] = saxpy(&a[i], &prow, &f);
                let d = &b[r] * &f;
                b[i] -= d;
            }
        }
        if !z[c].is_zero() {
            let f = z[c].clone();
            for (j, v) in &prow {
                let d = v * &f;
                z[*j] -= d;
            }
            let d = &b[r] * &f;
            *zval -= d;
        }
        basis[r] = c;
    }

    fn run(
        a: &mut [SRow],
        b: &mut [Rat],
        z: &mut [Rat],
        zval: &mut Rat,
        basis: &mut [usize],
        ncols: usize,
    ) -> bool {
        let mut pivots = 0usize;
        // Dantzig's rule while the objective improves; after a degeneracy
        // stall, Bland's rule guarantees termination
        let mut stall = 0usize;
        let mut last = zval.clone();
        loop {
            pivots += 1;
            if pivots % 500 == 0 && std::env::var_os("EALINT_TIMING").is_some() {
                eprintln!("[simplex] pivots={pivots}");
            }
            if *zval < last {
                stall = 0;
                last = zval.clone();
            } else {
                stall += 1;
            }
            let c = if stall > 50 {
                // Bland: lowest-index column with negative reduced cost
                (0..ncols).find(|&j| z[j] < Rat::zero())
            } else {
                (0..ncols)
                    .filter(|&j| z[j] < Rat::zero())
                    .min_by(|&a, &b| z[a].cmp(&z[b]))
            };
            let Some(c) = c else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for i in 0..a.len() {
                let Some(aic) = sget(&a[i], c) else { continue };
                if aic > &Rat::zero() {
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let alc = sget(&a[l], c).expect("leave candidate has entry");
                            let lhs = &b[i] * alc;
                            let rhs = &b[l] * aic;
                            lhs < rhs || (lhs == rhs && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return false;
            };
            pivot(a, b, z, zval, basis, r, c);
        }
    }

    if !run(&mut a, &mut b, &mut z, &mut zval, &mut basis, n) {
        // phase-1 objective is bounded below by 0
        unreachable!("phase 1 cannot be unbounded");
    }
    if -&zval > Rat::zero() {
        return SimplexResult::Infeasible;
    }
    // drive leftover artificials out of the basis
    for r in 0..m {
        if basis[r] >= art0 {
            if let Some(c) = a[r].iter().find(|(j, v)| *j < art0 && !v.is_zero()).map(|(j, _)| *j)
            {
                pivot(&mut a, &mut b, &mut z, &mut zval, &mut basis, r, c);
            }
        }
    }

    // phase 2: rebuild reduced costs for the real objective, artificial
    // columns excluded from entering
    let mut z2 = vec![Rat::zero(); n];
    let mut z2val = Rat::zero();
    for j in 0..nvars {
        z2[j] = cost[j].clone();
        z2[nvars + j] = -cost[j].clone();
    }
    for (r, &bv) in basis.iter().enumerate() {
        if !z2[bv].is_zero() {
            let f = z2[bv].clone();
            for (j, v) in &a[r] {
                let d = v * &f;
                z2[*j] -= d;
            }
            let d = &b[r] * &f;
            z2val -= d;
        }
    }
    for j in art0..n {
        // never re-enter an artificial
        if z2[j] < Rat::zero() {
            z2[j] = Rat::zero();
        }
    }
    if !run(&mut a, &mut b, &mut z2, &mut z2val, &mut basis, art0) {
        return SimplexResult::Unbounded;
    }

    let mut values = vec![Rat::zero(); n];
    for (r, &bv) in basis.iter().enumerate() {
        if bv >= art0 && !b[r].is_zero() {
            return SimplexResult::Infeasible;
        }
        values[bv] = b[r].clone();
    }
    let x: Vec<Rat> = (0..nvars).map(|j| &values[j] - &values[nvars + j]).collect();
    SimplexResult::Optimal { x, objective: -z2val }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, point: RationalPoint },
}

/// Exact minimum of `objective` subject to the constraint set.
pub fn minimize(cs: &ConstraintSet, objective: &LinExpr) -> Optimum {
    let Some(list) = cs.constraints() else {
        return Optimum::Infeasible;
    };
    let timing = std::env::var_os("EALINT_TIMING").is_some();
    let t0 = std::time::Instant::now();
    let Some(red) = presolve(list) else {
        return Optimum::Infeasible;
    };
    if timing {
        eprintln!(
            "[minimize] presolve: {:?} (solved={} ges={} free={})",
            t0.elapsed(),
            red.solved.len(),
            red.ges.len(),
            red.free.len()
        );
    }
    // rewrite the objective over the free variables
    let mut obj = Row::from_expr(objective);
    for (v, def) in &red.solved {
        obj.substitute(v, def);
    }
    let cost: Vec<Rat> = red
        .free
        .iter()
        .map(|p| obj.coeffs.get(p).cloned().unwrap_or_else(Rat::zero))
        .collect();
    if obj.coeffs.keys().any(|p| !red.free.contains(p)) {
        // objective mentions parameters outside the system; they are
        // unconstrained, so any nonzero coefficient is unbounded
        return Optimum::Unbounded;
    }
    let index: BTreeMap<&ParamId, usize> =
        red.free.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let rows: Vec<(SRow, Rat)> = red
        .ges
        .iter()
        .map(|r| {
            let mut row: SRow = r
                .coeffs
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(p, v)| (index[p], v.clone()))
                .collect();
            row.sort_by_key(|e| e.0);
            (row, r.constant.clone())
        })
        .collect();
    match simplex_min(red.free.len(), &rows, &cost) {
        SimplexResult::Infeasible => Optimum::Infeasible,
        SimplexResult::Unbounded => Optimum::Unbounded,
        SimplexResult::Optimal { x, objective: val } => {
            let mut point: RationalPoint =
                red.free.iter().cloned().zip(x).collect();
            for (v, def) in red.solved.iter().rev() {
                let value = def.eval(&point);
                point.insert(v.clone(), value);
            }
            Optimum::Optimal { value: val + obj.constant, point }
        }
    }
}

pub fn maximize(cs: &ConstraintSet, objective: &LinExpr) -> Optimum {
    let mut neg = LinExpr::default();
    for (p, c) in &objective.coeffs {
        neg.add_term(p.clone(), -c);
    }
    neg.constant = -objective.constant;
    match minimize(cs, &neg) {
        Optimum::Optimal { value, point } => Optimum::Optimal { value: -value, point },
        other => other,
    }
}

/// Exact check of every constraint at a rational point (absent parameters
/// read as 0).
pub fn check_point(cs: &ConstraintSet, point: &RationalPoint) -> bool {
    match cs.constraints() {
        None => false,
        Some(list) => list.iter().all(|c| {
            let v = Row::from_expr(&c.expr).eval(point);
            match c.rel {
                Rel::Eq => v.is_zero(),
                Rel::Ge => v >= Rat::zero(),
            }
        }),
    }
}

/// Feasibility with an objective-minimal witness; the result is verified
/// by exact re-substitution before being returned.
pub fn solve_rational(
    cs: &ConstraintSet,
    objective: &LinExpr,
) -> Result<SolveOutcome, SolverError> {
    if cs.is_unsat() {
        return Ok(SolveOutcome::Infeasible);
    }
    match minimize(cs, objective) {
        Optimum::Infeasible => Ok(SolveOutcome::Infeasible),
        Optimum::Unbounded => Err(SolverError::Unbounded),
        Optimum::Optimal { point, .. } => {
            let mut full = point;
            for p in cs.params() {
                full.entry(p).or_insert_with(Rat::zero);
            }
            if !check_point(cs, &full) {
                return Err(SolverError::Internal(
                    "witness failed exact re-substitution".into(),
                ));
            }
            Ok(SolveOutcome::Feasible(full))
        }
    }
}

/// `cs` entails `c`: every solution of `cs` satisfies `c`. Decided by
/// optimizing `c`'s expression over `cs`.
pub fn entails(cs: &ConstraintSet, c: &Constraint) -> bool {
    match c.rel {
        Rel::Ge => match minimize(cs, &c.expr) {
            Optimum::Infeasible => true,
            Optimum::Unbounded => false,
            Optimum::Optimal { value, .. } => value >= Rat::zero(),
        },
        Rel::Eq => {
            let lo = match minimize(cs, &c.expr) {
                Optimum::Infeasible => return true,
                Optimum::Unbounded => return false,
                Optimum::Optimal { value, .. } => value,
            };
            if lo < Rat::zero() {
                return false;
            }
            match maximize(cs, &c.expr) {
                Optimum::Infeasible => true,
                Optimum::Unbounded => false,
                Optimum::Optimal { value, .. } => value <= Rat::zero(),
            }
        }
    }
}

/// Mutual entailment of two systems over shared parameters.
pub fn equivalent(a: &ConstraintSet, b: &ConstraintSet) -> bool {
    let (Some(la), Some(lb)) = (a.constraints(), b.constraints()) else {
        return a.is_unsat() == b.is_unsat();
    };
    lb.iter().all(|c| entails(a, c)) && la.iter().all(|c| entails(b, c))
}

/// Multiply by the least common denominator and re-verify exactly.
pub fn scale_to_integers(
    psi: &RationalPoint,
    cs: &ConstraintSet,
) -> Result<Instantiation, SolverError> {
    let mut a = BigInt::one();
    for v in psi.values() {
        a = a.lcm(v.denom());
    }
    let phi: Instantiation = psi
        .iter()
        .map(|(p, v)| {
            let scaled = v * Rat::from(a.clone());
            let n = scaled
                .to_integer()
                .to_i64()
                .ok_or_else(|| SolverError::Internal("scaled witness exceeds i64".into()))?;
            Ok((p.clone(), n))
        })
        .collect::<Result<_, SolverError>>()?;
    match cs.satisfied_by(&phi) {
        Some(true) => Ok(phi),
        _ => Err(SolverError::Internal(
            "integer scaling failed re-verification".into(),
        )),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("enumeration space exceeds guard ({0} points)")]
pub struct SearchSpaceExceeded(pub u128);

const ORACLE_GUARD: u128 = 10_000_000;

/// Exhaustive scan for an integer point of the box [-bound, bound] on
/// every parameter. Equalities are eliminated first so only genuinely
/// free parameters are enumerated; eliminated parameters are checked for
/// integrality and box membership.
pub fn oracle_enumerate(
    cs: &ConstraintSet,
    bound: u32,
) -> Result<Option<Instantiation>, SearchSpaceExceeded> {
    let Some(list) = cs.constraints() else {
        return Ok(None);
    };
    let Some(red) = presolve(list) else {
        return Ok(None);
    };
    let width = 2 * u128::from(bound) + 1;
    let mut space: u128 = 1;
    for _ in &red.free {
        space = space.saturating_mul(width);
        if space > ORACLE_GUARD {
            return Err(SearchSpaceExceeded(space));
        }
    }
    let b = i64::from(bound);
    let nfree = red.free.len();
    let mut values = vec![-b; nfree];
    loop {
        let mut point: RationalPoint = red
            .free
            .iter()
            .cloned()
            .zip(values.iter().map(|&v| Rat::from(BigInt::from(v))))
            .collect();
        let mut ok = true;
        for (v, def) in red.solved.iter().rev() {
            let value = def.eval(&point);
            if !value.is_integer() || value.abs() > Rat::from(BigInt::from(b)) {
                ok = false;
                break;
            }
            point.insert(v.clone(), value);
        }
        if ok {
            let phi: Instantiation = point
                .iter()
                .map(|(p, v)| (p.clone(), v.to_integer().to_i64().unwrap()))
                .collect();
            let mut full = phi.clone();
            for p in cs.params() {
                full.entry(p).or_insert(0);
            }
            if cs.satisfied_by(&full) == Some(true) {
                return Ok(Some(full));
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == nfree {
                return Ok(None);
            }
            if values[i] < b {
                values[i] += 1;
                break;
            }
            values[i] = -b;
            i += 1;
        }
        if nfree == 0 {
            return Ok(None);
        }
    }
}
