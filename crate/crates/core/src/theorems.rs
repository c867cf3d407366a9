//! Separation/comparison case classification, conclusion checking, and
//! randomized zero-counterexample campaigns.
//!
//! For consecutive sign-changing points s < t of a solution u, the boundary
//! behavior of u at s and t together with the signs of θ (or ω in the
//! balanced two-potential setting) selects which clauses apply; each clause
//! asserts that the other solution changes sign in an open, half-open or
//! closed conclusion interval. Every applicable clause is checked by an
//! actual witness search. Campaigns drive randomized instances through the
//! verifiers and must report zero failures; a failure carries the seed and
//! the serialized instance for reproduction.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify_point, find_sign_changes, mean_value_witness, modified_wronskian, segment_roots,
    wronskian, wronskian_jump_measure, wronskian_product, Component, SignChangeCriterion,
    SignChangePoint, ZeroKind,
};
use crate::error::{Error, Result};
use crate::measure::{Atom, Interval, PiecewiseMeasure, Problem};
use crate::oracle::wronskian_series;
use crate::propagator::{ac_flow, cross_atom, solve_ivp, Side, Solution, State};
use crate::scalar::{as_f64, lit, Scalar};

/// Clause identifiers of the two separation and two comparison case tables.
/// `I4Prime` is the reversed-positivity variant of clause I.4 that applies
/// when both ω₁ values are negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ClauseId {
    I1,
    I2,
    I3,
    I4,
    I4Prime,
    II1,
    II2,
    II3,
    II4,
    II5,
}

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClauseId::I1 => "I.1",
            ClauseId::I2 => "I.2",
            ClauseId::I3 => "I.3",
            ClauseId::I4 => "I.4",
            ClauseId::I4Prime => "I.4'",
            ClauseId::II1 => "II.1",
            ClauseId::II2 => "II.2",
            ClauseId::II3 => "II.3",
            ClauseId::II4 => "II.4",
            ClauseId::II5 => "II.5",
        };
        write!(f, "{s}")
    }
}

/// Endpoint inclusion of a conclusion interval between s and t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntervalForm {
    Open,
    ClosedOpen,
    OpenClosed,
    Closed,
}

impl IntervalForm {
    pub fn contains<S: Scalar>(&self, s: S, t: S, x: S) -> bool {
        let lo_ok = match self {
            IntervalForm::Open | IntervalForm::OpenClosed => x > s,
            IntervalForm::ClosedOpen | IntervalForm::Closed => x >= s,
        };
        let hi_ok = match self {
            IntervalForm::Open | IntervalForm::ClosedOpen => x < t,
            IntervalForm::OpenClosed | IntervalForm::Closed => x <= t,
        };
        lo_ok && hi_ok
    }

    fn include_flags(&self) -> (bool, bool) {
        match self {
            IntervalForm::Open => (false, false),
            IntervalForm::ClosedOpen => (true, false),
            IntervalForm::OpenClosed => (false, true),
            IntervalForm::Closed => (true, true),
        }
    }
}

impl fmt::Display for IntervalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IntervalForm::Open => "(s,t)",
            IntervalForm::ClosedOpen => "[s,t)",
            IntervalForm::OpenClosed => "(s,t]",
            IntervalForm::Closed => "[s,t]",
        };
        write!(f, "{s}")
    }
}

/// An applicable separation clause for one consecutive pair.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationCase<S> {
    pub id: ClauseId,
    pub s: S,
    pub t: S,
    pub conclusion: IntervalForm,
    pub s_kind: ZeroKind,
    pub t_kind: ZeroKind,
    pub theta_r_s: S,
    pub theta_complement_t: S,
}

/// An applicable comparison clause for one consecutive pair.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonCase<S> {
    pub id: ClauseId,
    pub s: S,
    pub t: S,
    pub conclusion: IntervalForm,
    pub s_kind: ZeroKind,
    pub t_kind: ZeroKind,
    pub omega1_s: S,
    pub omega1_t: S,
}

fn u_minus_zero(kind: ZeroKind) -> bool {
    matches!(kind, ZeroKind::ContinuousZero | ZeroKind::LeftZero)
}

fn u_plus_zero(kind: ZeroKind) -> bool {
    matches!(kind, ZeroKind::ContinuousZero | ZeroKind::RightZero)
}

fn is_flip(kind: ZeroKind) -> bool {
    matches!(kind, ZeroKind::StrictFlip)
}

/// Checks that s < t are consecutive points of Z(u) and returns their
/// classifications.
fn consecutive_pair<S: Scalar>(
    u_sol: &Solution<S>,
    s: S,
    t: S,
) -> Result<(SignChangePoint<S>, SignChangePoint<S>)> {
    if s.is_nan() || t.is_nan() || s >= t {
        return Err(Error::Precondition(format!(
            "requires s < t, got s={s}, t={t}"
        )));
    }
    let zs = find_sign_changes(u_sol, s, t)?;
    let close = |p: S, q: S| (p - q).abs() <= lit::<S>(1e-12) * (S::one() + q.abs());
    if zs.len() != 2 || !close(zs[0].position, s) || !close(zs[1].position, t) {
        return Err(Error::Precondition(format!(
            "{s} and {t} are not consecutive sign-changing points"
        )));
    }
    Ok((zs[0], zs[1]))
}

fn sep_cases_from_points<S: Scalar>(
    problem: &Problem<S>,
    zs: &SignChangePoint<S>,
    zt: &SignChangePoint<S>,
) -> Result<Vec<SeparationCase<S>>> {
    let s = zs.position;
    let t = zt.position;
    // θ ≡ 1 away from atoms, so "θ > 0 on (s,t)" is a finite check
    for p in problem.atom_positions() {
        if p > s && p < t && problem.theta_ratio(p)? <= S::zero() {
            return Ok(Vec::new());
        }
    }
    let theta_r_s = problem.theta_r(s)?;
    let theta_complement_t = problem.theta_complement(t)?;
    let zm_s = u_minus_zero(zs.kind);
    let zp_s = u_plus_zero(zs.kind);
    let flip_s = is_flip(zs.kind);
    let zm_t = u_minus_zero(zt.kind);
    let zp_t = u_plus_zero(zt.kind);
    let flip_t = is_flip(zt.kind);
    let pos = |x: S| x > S::zero();

    let mut cases = Vec::new();
    let mut push = |id: ClauseId, conclusion: IntervalForm| {
        cases.push(SeparationCase {
            id,
            s,
            t,
            conclusion,
            s_kind: zs.kind,
            t_kind: zt.kind,
            theta_r_s,
            theta_complement_t,
        });
    };

    if zp_s && zm_t {
        push(ClauseId::I1, IntervalForm::Open);
    }
    if zm_s && zm_t && pos(theta_r_s) {
        push(ClauseId::I2, IntervalForm::ClosedOpen);
    }
    if zp_s && zp_t && pos(theta_complement_t) {
        push(ClauseId::I3, IntervalForm::OpenClosed);
    }
    if zm_s && zp_t && pos(theta_r_s * theta_complement_t) {
        push(ClauseId::I4, IntervalForm::Closed);
    }
    if flip_s && zm_t && pos(theta_r_s) {
        push(ClauseId::II1, IntervalForm::ClosedOpen);
    }
    if zp_s && flip_t && pos(theta_complement_t) {
        push(ClauseId::II2, IntervalForm::OpenClosed);
    }
    if flip_s && zp_t && pos(theta_r_s * theta_complement_t) {
        push(ClauseId::II3, IntervalForm::Closed);
    }
    if zm_s && flip_t && pos(theta_r_s * theta_complement_t) {
        push(ClauseId::II4, IntervalForm::Closed);
    }
    if flip_s && flip_t && pos(theta_r_s * theta_complement_t) {
        push(ClauseId::II5, IntervalForm::Closed);
    }
    Ok(cases)
}

/// All separation clauses whose hypotheses hold for the consecutive pair
/// (s, t) of Z(u); empty when θ ≤ 0 at some atom between them.
pub fn classify_separation<S: Scalar>(
    u_sol: &Solution<S>,
    s: S,
    t: S,
) -> Result<Vec<SeparationCase<S>>> {
    let (zs, zt) = consecutive_pair(u_sol, s, t)?;
    sep_cases_from_points(u_sol.problem(), &zs, &zt)
}

/// Positivity of a signed measure on the given interval form: nonnegative
/// densities on the open interior and nonnegative atoms per the endpoint
/// flags.
fn positive_on<S: Scalar>(mu: &PiecewiseMeasure<S>, s: S, t: S, form: IntervalForm) -> bool {
    if mu.min_density_on(s, t) < S::zero() {
        return false;
    }
    let (il, ih) = form.include_flags();
    mu.atoms_in(s, t, il, ih).all(|at| at.weight >= S::zero())
}

fn comp_cases_from_points<S: Scalar>(
    alpha: &PiecewiseMeasure<S>,
    beta1: &PiecewiseMeasure<S>,
    diff: &PiecewiseMeasure<S>,
    zs: &SignChangePoint<S>,
    zt: &SignChangePoint<S>,
) -> Result<Vec<ComparisonCase<S>>> {
    let s = zs.position;
    let t = zt.position;
    let omega1_s = crate::measure::omega(alpha, beta1, s)?;
    let omega1_t = crate::measure::omega(alpha, beta1, t)?;
    let zm_s = u_minus_zero(zs.kind);
    let zp_s = u_plus_zero(zs.kind);
    let flip_s = is_flip(zs.kind);
    let zm_t = u_minus_zero(zt.kind);
    let zp_t = u_plus_zero(zt.kind);
    let flip_t = is_flip(zt.kind);
    let pos = |x: S| x > S::zero();
    let positive = |form: IntervalForm| positive_on(diff, s, t, form);

    let mut cases = Vec::new();
    let mut push = |id: ClauseId, conclusion: IntervalForm| {
        cases.push(ComparisonCase {
            id,
            s,
            t,
            conclusion,
            s_kind: zs.kind,
            t_kind: zt.kind,
            omega1_s,
            omega1_t,
        });
    };

    if zp_s && zm_t && positive(IntervalForm::Open) {
        let mass = diff.measure_of(s, t, false, false)?;
        if mass > S::zero() {
            push(ClauseId::I1, IntervalForm::Open);
        }
    }
    if zm_s && zm_t && pos(omega1_s) && positive(IntervalForm::ClosedOpen) {
        push(ClauseId::I2, IntervalForm::ClosedOpen);
    }
    if zp_s && zp_t && pos(omega1_t) && positive(IntervalForm::OpenClosed) {
        push(ClauseId::I3, IntervalForm::OpenClosed);
    }
    if zm_s && zp_t && pos(omega1_s) && pos(omega1_t) && positive(IntervalForm::Closed) {
        push(ClauseId::I4, IntervalForm::Closed);
    }
    if zm_s && zp_t && omega1_s < S::zero() && omega1_t < S::zero() {
        // the reversed variant needs d(β₂−β₁) = −diff positive on [s,t]
        let neg_ok = match PiecewiseMeasure::zero(diff.interval()).difference(diff) {
            Ok(neg) => positive_on(&neg, s, t, IntervalForm::Closed),
            Err(_) => false,
        };
        if neg_ok {
            push(ClauseId::I4Prime, IntervalForm::Closed);
        }
    }
    if flip_s && zm_t && pos(omega1_s) && positive(IntervalForm::ClosedOpen) {
        push(ClauseId::II1, IntervalForm::ClosedOpen);
    }
    if zp_s && flip_t && pos(omega1_t) && positive(IntervalForm::OpenClosed) {
        push(ClauseId::II2, IntervalForm::OpenClosed);
    }
    if flip_s && zp_t && pos(omega1_s) && pos(omega1_t) && positive(IntervalForm::Closed) {
        push(ClauseId::II3, IntervalForm::Closed);
    }
    if zm_s && flip_t && pos(omega1_s) && pos(omega1_t) && positive(IntervalForm::Closed) {
        push(ClauseId::II4, IntervalForm::Closed);
    }
    if flip_s && flip_t && pos(omega1_s) && pos(omega1_t) && positive(IntervalForm::Closed) {
        push(ClauseId::II5, IntervalForm::Closed);
    }
    Ok(cases)
}

/// All comparison clauses whose hypotheses hold for the consecutive pair
/// (s, t) of Z(u), where u solves the β₁ equation and the candidate sign
/// changes belong to a solution of the β₂ equation.
pub fn classify_comparison<S: Scalar>(
    u_sol: &Solution<S>,
    beta2: &PiecewiseMeasure<S>,
    s: S,
    t: S,
) -> Result<Vec<ComparisonCase<S>>> {
    let (zs, zt) = consecutive_pair(u_sol, s, t)?;
    let diff = u_sol.problem().beta().difference(beta2)?;
    comp_cases_from_points(
        u_sol.problem().alpha(),
        u_sol.problem().beta(),
        &diff,
        &zs,
        &zt,
    )
}

/// Outcome of checking one clause's conclusion.
#[derive(Debug, Clone, Serialize)]
pub struct CaseOutcome {
    pub id: String,
    pub conclusion: String,
    pub passed: bool,
    pub witness: Option<f64>,
}

/// One consecutive pair of Z(u) with its applicable clauses.
#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub s: f64,
    pub t: f64,
    pub s_kind: String,
    pub t_kind: String,
    pub cases: Vec<CaseOutcome>,
}

/// One auxiliary lemma check (sign of a product at a strict flip).
#[derive(Debug, Clone, Serialize)]
pub struct AuxCheck {
    pub lemma: String,
    pub position: f64,
    pub value: f64,
    pub passed: bool,
}

/// Per-atom θ/ω diagnostics included with every report.
#[derive(Debug, Clone, Serialize)]
pub struct AtomTableRow {
    pub position: f64,
    pub delta_alpha: f64,
    pub delta_beta: f64,
    pub theta_r: f64,
    pub theta_complement: f64,
    pub theta: f64,
    pub omega: f64,
}

/// Full machine-checked record for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub mode: String,
    pub r: f64,
    pub window: (f64, f64),
    pub zero_positions: Vec<f64>,
    pub atom_table: Vec<AtomTableRow>,
    pub pairs: Vec<PairReport>,
    pub aux_checks: Vec<AuxCheck>,
    pub warnings: Vec<String>,
    pub clause_counts: BTreeMap<String, usize>,
    pub failure_count: usize,
    pub pass: bool,
}

fn atom_table<S: Scalar>(problem: &Problem<S>) -> Vec<AtomTableRow> {
    problem
        .check_hypothesis()
        .atoms
        .iter()
        .map(|c| AtomTableRow {
            position: as_f64(c.position),
            delta_alpha: as_f64(c.delta_alpha),
            delta_beta: as_f64(c.delta_beta),
            theta_r: as_f64(c.theta_r),
            theta_complement: as_f64(c.theta_complement),
            theta: as_f64(c.theta),
            omega: as_f64(c.omega),
        })
        .collect()
}

fn default_window<S: Scalar>(interval: Interval<S>) -> (S, S) {
    let inset = interval.length() * lit::<S>(1e-6);
    (interval.a() + inset, interval.b() - inset)
}

fn search_witness<S: Scalar>(
    zv: &[SignChangePoint<S>],
    s: S,
    t: S,
    form: IntervalForm,
) -> Option<S> {
    zv.iter()
        .find(|z| z.changes_sign && form.contains(s, t, z.position))
        .map(|z| z.position)
}

fn v_changes_sign_at<S: Scalar>(v_sol: &Solution<S>, x: S) -> Result<bool> {
    Ok(classify_point(v_sol, x)?.is_some_and(|p| p.changes_sign))
}

/// Checks every applicable separation clause on every consecutive pair of
/// Z(u), searching v's sign changes in the conclusion interval, plus the
/// flip-product auxiliary law wherever its hypotheses hold.
pub fn verify_separation<S: Scalar>(
    u_sol: &Solution<S>,
    v_sol: &Solution<S>,
) -> Result<VerificationReport> {
    if u_sol.problem() != v_sol.problem() {
        return Err(Error::MismatchedProblems);
    }
    if u_sol.is_trivial() || v_sol.is_trivial() {
        return Err(Error::TrivialSolution);
    }
    // linear independence via the Wronskian at the base point
    let w0 = wronskian(u_sol, v_sol, u_sol.x0())?;
    let scale = u_sol.initial_state().max_norm() * v_sol.initial_state().max_norm();
    if w0.mid.abs() <= lit::<S>(1e-10) * scale.max(S::min_positive_value()) {
        return Err(Error::DependentSolutions);
    }

    let problem = u_sol.problem();
    let (lo, hi) = default_window(problem.interval());
    let zu = find_sign_changes(u_sol, lo, hi)?;
    let mut report = VerificationReport {
        mode: "separation".into(),
        r: as_f64(problem.r()),
        window: (as_f64(lo), as_f64(hi)),
        zero_positions: zu.iter().map(|z| as_f64(z.position)).collect(),
        atom_table: atom_table(problem),
        pairs: Vec::new(),
        aux_checks: Vec::new(),
        warnings: Vec::new(),
        clause_counts: BTreeMap::new(),
        failure_count: 0,
        pass: true,
    };

    for pair in zu.windows(2) {
        let (zs, zt) = (&pair[0], &pair[1]);
        let cases = sep_cases_from_points(problem, zs, zt)?;
        let zv = find_sign_changes(v_sol, zs.position, zt.position)?;
        let mut pair_report = PairReport {
            s: as_f64(zs.position),
            t: as_f64(zt.position),
            s_kind: zs.kind.to_string(),
            t_kind: zt.kind.to_string(),
            cases: Vec::new(),
        };
        for case in &cases {
            let witness = search_witness(&zv, zs.position, zt.position, case.conclusion);
            let passed = witness.is_some();
            *report.clause_counts.entry(case.id.to_string()).or_insert(0) += 1;
            if !passed {
                report.failure_count += 1;
                report.pass = false;
            }
            pair_report.cases.push(CaseOutcome {
                id: case.id.to_string(),
                conclusion: case.conclusion.to_string(),
                passed,
                witness: witness.map(as_f64),
            });
        }
        if cases.is_empty() {
            // diagnostic: with an even number of θ-negative atoms between the
            // endpoints the open-interval conclusion is still expected
            let mut negatives = 0usize;
            for p in problem.atom_positions() {
                if p > zs.position && p < zt.position && problem.theta_ratio(p)? < S::zero() {
                    negatives += 1;
                }
            }
            if negatives > 0
                && negatives.is_multiple_of(2)
                && u_plus_zero(zs.kind)
                && u_minus_zero(zt.kind)
            {
                let witness = search_witness(&zv, zs.position, zt.position, IntervalForm::Open);
                *report.clause_counts.entry("I.1e".into()).or_insert(0) += 1;
                if witness.is_none() {
                    report.warnings.push(format!(
                        "diagnostic I.1e: no open-interval witness in ({}, {})",
                        as_f64(zs.position),
                        as_f64(zt.position)
                    ));
                }
                pair_report.cases.push(CaseOutcome {
                    id: "I.1e".into(),
                    conclusion: IntervalForm::Open.to_string(),
                    passed: witness.is_some(),
                    witness: witness.map(as_f64),
                });
            }
        }
        report.pairs.push(pair_report);
    }

    // flip-product law: at a strict flip of u where v keeps its sign,
    // v(s)·(du/dα)(s)·W[u,v](s) < 0
    for z in &zu {
        if z.kind != ZeroKind::StrictFlip {
            continue;
        }
        if v_changes_sign_at(v_sol, z.position)? {
            continue;
        }
        let vm = v_sol.evaluate(z.position, Side::Mid)?;
        let w = wronskian(u_sol, v_sol, z.position)?;
        let value = vm.u * z.mid.v * w.mid;
        let passed = value < S::zero();
        if !passed {
            report.failure_count += 1;
            report.pass = false;
        }
        report.aux_checks.push(AuxCheck {
            lemma: "separation-flip-product".into(),
            position: as_f64(z.position),
            value: as_f64(value),
            passed,
        });
    }

    Ok(report)
}

/// Checks every applicable comparison clause for balanced solutions u (of
/// the β₁ equation) and v (of the β₂ equation) sharing dα, plus the
/// modified-Wronskian auxiliary law at strict flips.
pub fn verify_comparison<S: Scalar>(
    u_sol: &Solution<S>,
    v_sol: &Solution<S>,
) -> Result<VerificationReport> {
    let half = lit::<S>(0.5);
    if u_sol.problem().r() != half || v_sol.problem().r() != half {
        return Err(Error::UnsupportedMode(
            "comparison verification requires balanced solutions".into(),
        ));
    }
    if u_sol.problem().alpha() != v_sol.problem().alpha() {
        return Err(Error::MismatchedProblems);
    }
    if u_sol.is_trivial() || v_sol.is_trivial() {
        return Err(Error::TrivialSolution);
    }
    let alpha = u_sol.problem().alpha();
    let beta1 = u_sol.problem().beta();
    let beta2 = v_sol.problem().beta();
    let diff = beta1.difference(beta2)?;

    let (lo, hi) = default_window(u_sol.problem().interval());
    let zu = find_sign_changes(u_sol, lo, hi)?;
    let mut report = VerificationReport {
        mode: "comparison".into(),
        r: 0.5,
        window: (as_f64(lo), as_f64(hi)),
        zero_positions: zu.iter().map(|z| as_f64(z.position)).collect(),
        atom_table: atom_table(u_sol.problem()),
        pairs: Vec::new(),
        aux_checks: Vec::new(),
        warnings: Vec::new(),
        clause_counts: BTreeMap::new(),
        failure_count: 0,
        pass: true,
    };

    for pair in zu.windows(2) {
        let (zs, zt) = (&pair[0], &pair[1]);
        let cases = comp_cases_from_points(alpha, beta1, &diff, zs, zt)?;
        let zv = find_sign_changes(v_sol, zs.position, zt.position)?;
        let mut pair_report = PairReport {
            s: as_f64(zs.position),
            t: as_f64(zt.position),
            s_kind: zs.kind.to_string(),
            t_kind: zt.kind.to_string(),
            cases: Vec::new(),
        };
        for case in &cases {
            let witness = search_witness(&zv, zs.position, zt.position, case.conclusion);
            let passed = witness.is_some();
            *report.clause_counts.entry(case.id.to_string()).or_insert(0) += 1;
            if !passed {
                report.failure_count += 1;
                report.pass = false;
            }
            pair_report.cases.push(CaseOutcome {
                id: case.id.to_string(),
                conclusion: case.conclusion.to_string(),
                passed,
                witness: witness.map(as_f64),
            });
        }
        report.pairs.push(pair_report);
    }

    // at a strict flip of u where v keeps its sign:
    // v(s)·(du/dα)(s)·W̃[v,u](s) > 0, and with ω₁ > 0 and Δβ₁ ≥ Δβ₂ the
    // one-sided variants carry the same strict sign
    for z in &zu {
        if z.kind != ZeroKind::StrictFlip {
            continue;
        }
        if v_changes_sign_at(v_sol, z.position)? {
            continue;
        }
        let vm = v_sol.evaluate(z.position, Side::Mid)?;
        let w_mid = modified_wronskian(v_sol, u_sol, z.position, Side::Mid)?;
        let value = vm.u * z.mid.v * w_mid;
        let passed = value > S::zero();
        if !passed {
            report.failure_count += 1;
            report.pass = false;
        }
        report.aux_checks.push(AuxCheck {
            lemma: "comparison-flip-product".into(),
            position: as_f64(z.position),
            value: as_f64(value),
            passed,
        });
        let omega1 = crate::measure::omega(alpha, beta1, z.position)?;
        let db1 = beta1.delta_unchecked(z.position);
        let db2 = beta2.delta_unchecked(z.position);
        if omega1 > S::zero() && db1 >= db2 {
            for side in [Side::Left, Side::Right] {
                let w_side = modified_wronskian(v_sol, u_sol, z.position, side)?;
                let value = vm.u * z.mid.v * w_side;
                let passed = value > S::zero();
                if !passed {
                    report.failure_count += 1;
                    report.pass = false;
                }
                report.aux_checks.push(AuxCheck {
                    lemma: format!("comparison-flip-onesided-{side}"),
                    position: as_f64(z.position),
                    value: as_f64(value),
                    passed,
                });
            }
        }
    }

    Ok(report)
}

/// How the instance generator picks r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RChoice {
    Fixed(f64),
    Balanced,
    Uniform,
    /// Mixes the endpoint conventions, the balanced case, and uniform draws.
    Mixed,
}

/// Bounds and event plan for randomized instances. Events are engineered
/// while propagating a concrete solution, so boundary behaviors (strict
/// flips, one-sided zeros) appear with controlled margins.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub interval: (f64, f64),
    /// Piece count of the base partition (before atoms split pieces).
    pub base_pieces: (usize, usize),
    pub alpha_density: (f64, f64),
    pub beta_density: (f64, f64),
    pub r_choice: RChoice,
    /// Atoms placed just before a zero so the solution flips sign across them.
    pub flip_atoms: (usize, usize),
    /// Atoms placed exactly on a zero, producing a one-sided (left) zero.
    pub pin_atoms: (usize, usize),
    /// Atoms whose jump is solved so that u⁺ = 0 there (right zero).
    pub right_zero_atoms: (usize, usize),
    /// Unconstrained atoms (α-only, β-only, or common).
    pub plain_atoms: (usize, usize),
    /// Lower bound kept on |θ_r|, |θ_{1−r}|, |ω_j| at every atom.
    pub margin: f64,
    /// Fraction of engineered atoms that target negative θ values.
    pub negative_theta_fraction: f64,
    /// Reject instances whose solution grows beyond this magnitude.
    pub max_amplitude: f64,
    /// Minimum number of sign-changing points inside the window.
    pub min_zero_count: usize,
    pub comparison: Option<ComparisonConfig>,
}

/// Extra knobs for two-potential instances (dβ₁ − dβ₂ ≥ 0 by construction,
/// or the reverse when `reverse` is set).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub delta_density: (f64, f64),
    /// Maximum fraction of |Δβ₁| removed at shared atoms.
    pub atom_reduction: f64,
    /// Number of β₂-only atoms with negative weight.
    pub extra_atoms: (usize, usize),
    /// Build β₂ ≥ β₁ instead and force ω₁ < 0 at engineered atoms.
    pub reverse: bool,
}

impl GeneratorConfig {
    pub fn isolation() -> Self {
        Self {
            interval: (0.0, 12.0),
            base_pieces: (2, 5),
            alpha_density: (0.4, 1.8),
            beta_density: (-6.0, -0.4),
            r_choice: RChoice::Mixed,
            flip_atoms: (0, 2),
            pin_atoms: (0, 2),
            right_zero_atoms: (0, 1),
            plain_atoms: (0, 3),
            margin: 1e-3,
            negative_theta_fraction: 0.25,
            max_amplitude: 1e4,
            min_zero_count: 1,
            comparison: None,
        }
    }

    pub fn separation() -> Self {
        Self {
            interval: (0.0, 12.0),
            base_pieces: (2, 5),
            alpha_density: (0.4, 1.8),
            beta_density: (-6.0, -0.4),
            r_choice: RChoice::Mixed,
            flip_atoms: (0, 3),
            pin_atoms: (0, 1),
            right_zero_atoms: (0, 1),
            plain_atoms: (0, 2),
            margin: 1e-3,
            negative_theta_fraction: 0.04,
            max_amplitude: 1e4,
            min_zero_count: 2,
            comparison: None,
        }
    }

    pub fn comparison() -> Self {
        Self {
            interval: (0.0, 12.0),
            base_pieces: (2, 5),
            alpha_density: (0.4, 1.8),
            beta_density: (-6.0, -0.4),
            r_choice: RChoice::Balanced,
            flip_atoms: (0, 3),
            pin_atoms: (0, 1),
            right_zero_atoms: (0, 1),
            plain_atoms: (0, 2),
            margin: 1e-3,
            negative_theta_fraction: 0.0,
            max_amplitude: 1e4,
            min_zero_count: 2,
            comparison: Some(ComparisonConfig {
                delta_density: (0.05, 1.2),
                atom_reduction: 0.6,
                extra_atoms: (0, 2),
                reverse: false,
            }),
        }
    }

    pub fn wronskian() -> Self {
        Self {
            interval: (0.0, 12.0),
            base_pieces: (2, 5),
            alpha_density: (0.4, 1.8),
            beta_density: (-6.0, -0.4),
            r_choice: RChoice::Mixed,
            flip_atoms: (0, 1),
            pin_atoms: (0, 0),
            right_zero_atoms: (0, 0),
            plain_atoms: (1, 4),
            margin: 1e-3,
            negative_theta_fraction: 0.15,
            max_amplitude: 100.0,
            min_zero_count: 0,
            comparison: None,
        }
    }

    pub fn oracle() -> Self {
        Self {
            interval: (0.0, 6.0),
            base_pieces: (2, 5),
            alpha_density: (0.5, 1.5),
            beta_density: (-3.0, 1.5),
            r_choice: RChoice::Mixed,
            flip_atoms: (0, 0),
            pin_atoms: (0, 0),
            right_zero_atoms: (0, 0),
            plain_atoms: (0, 6),
            margin: 0.05,
            negative_theta_fraction: 0.0,
            max_amplitude: 40.0,
            min_zero_count: 0,
            comparison: None,
        }
    }
}

/// A generated problem (or pair of problems) with initial data and the
/// verification window; serializes completely for failure reproduction.
#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub seed: u64,
    pub problem: Problem<f64>,
    pub second_problem: Option<Problem<f64>>,
    pub x0: f64,
    pub u_init: (f64, f64),
    pub v_init: (f64, f64),
    pub window: (f64, f64),
}

/// Forward simulation cursor used while the instance is being built: beyond
/// the cursor only base breakpoints exist, so scanning ahead is exact.
struct Walker {
    base_edges: Vec<f64>,
    base_a: Vec<f64>,
    base_b: Vec<f64>,
    r: f64,
    alpha_atoms: Vec<Atom<f64>>,
    beta_atoms: Vec<Atom<f64>>,
    x: f64,
    state: State<f64>,
}

impl Walker {
    fn piece_idx(&self, x: f64) -> usize {
        let interior = &self.base_edges[1..self.base_edges.len() - 1];
        interior.partition_point(|&p| p <= x)
    }

    fn densities_at(&self, x: f64) -> (f64, f64) {
        let i = self.piece_idx(x);
        (self.base_a[i], self.base_b[i])
    }

    fn state_at(&self, pos: f64) -> State<f64> {
        let mut x = self.x;
        let mut state = self.state;
        while x < pos {
            let i = self.piece_idx(x);
            let hi = self.base_edges[i + 1].min(pos);
            state = ac_flow(self.base_a[i], self.base_b[i], hi - x, &state)
                .expect("alpha densities positive by construction");
            x = hi;
        }
        state
    }

    fn advance_to(&mut self, pos: f64) {
        self.state = self.state_at(pos);
        self.x = pos;
    }

    /// First zero of u strictly after the cursor and before `limit`.
    fn next_u_zero(&self, limit: f64) -> Option<f64> {
        let mut x = self.x;
        let mut state = self.state;
        loop {
            if x >= limit {
                return None;
            }
            let i = self.piece_idx(x);
            let hi = self.base_edges[i + 1].min(limit);
            let len = hi - x;
            if len > 0.0 {
                let roots = segment_roots(
                    self.base_a[i],
                    self.base_b[i],
                    &state,
                    len,
                    Component::Value,
                );
                if let Some(t) = roots.first() {
                    return Some(x + t);
                }
                state = ac_flow(self.base_a[i], self.base_b[i], len, &state).expect("A > 0");
            }
            if hi >= limit {
                return None;
            }
            x = hi;
        }
    }

    /// Inserts an atom at the cursor; the current state is the left limit.
    fn insert_atom(&mut self, da: f64, db: f64) -> Result<(State<f64>, State<f64>, State<f64>)> {
        let left = self.state;
        let (mid, right) = cross_atom(self.r, da, db, &left)?;
        if da != 0.0 {
            self.alpha_atoms.push(Atom::new(self.x, da));
        }
        if db != 0.0 {
            self.beta_atoms.push(Atom::new(self.x, db));
        }
        self.state = right;
        Ok((left, mid, right))
    }

    /// Local magnitude of u around the cursor for margin checks.
    fn local_amp(&self, pos: f64) -> f64 {
        let s = self.state_at(pos);
        let (a, b) = self.densities_at(pos);
        let q = a * b;
        if q < 0.0 {
            let k = (-q).sqrt();
            s.u.hypot(a * s.v / k)
        } else {
            s.u.abs().max((a * s.v).abs()).max(1e-12)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    Flip,
    Pin,
    RightZero,
    Plain,
}

fn gen_range(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 >= range.1 {
        range.0
    } else {
        rng.gen_range(range.0..range.1)
    }
}

fn gen_count(rng: &mut ChaCha8Rng, range: (usize, usize)) -> usize {
    if range.0 >= range.1 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThetaSign {
    BothPositive,
    BothNegative,
    Opposite,
}

fn sample_r(rng: &mut ChaCha8Rng, choice: RChoice) -> f64 {
    match choice {
        RChoice::Fixed(r) => r,
        RChoice::Balanced => 0.5,
        RChoice::Uniform => rng.gen_range(0.0..=1.0),
        RChoice::Mixed => {
            let p: f64 = rng.gen();
            if p < 0.15 {
                0.0
            } else if p < 0.3 {
                1.0
            } else if p < 0.6 {
                0.5
            } else {
                rng.gen_range(0.0..=1.0)
            }
        }
    }
}

fn theta_sign_target(rng: &mut ChaCha8Rng, fraction: f64) -> ThetaSign {
    let p: f64 = rng.gen();
    if p < fraction / 2.0 {
        ThetaSign::BothNegative
    } else if p < fraction {
        ThetaSign::Opposite
    } else {
        ThetaSign::BothPositive
    }
}

fn thetas_ok(r: f64, da: f64, db: f64, margin: f64, target: ThetaSign) -> bool {
    let theta_r = 1.0 - r * r * da * db;
    let theta_c = 1.0 - (1.0 - r) * (1.0 - r) * da * db;
    let omega = 1.0 - da * db / 4.0;
    if theta_r.abs() < margin || theta_c.abs() < margin || omega.abs() < margin {
        return false;
    }
    match target {
        ThetaSign::BothPositive => theta_r > 0.0 && theta_c > 0.0,
        ThetaSign::BothNegative => theta_r < 0.0 && theta_c < 0.0,
        ThetaSign::Opposite => theta_r * theta_c < 0.0,
    }
}

fn min_edge_distance(edges: &[f64], pos: f64) -> f64 {
    edges
        .iter()
        .map(|e| (e - pos).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Deterministic instance construction from a seed. The same (seed, config)
/// always produces the same instance.
pub fn random_instance(seed: u64, config: &GeneratorConfig) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        if let Some(instance) = try_generate(seed, &mut rng, config) {
            return Ok(instance);
        }
    }
    Err(Error::Unsatisfiable(format!(
        "no admissible instance after 200 attempts (seed {seed})"
    )))
}

fn try_generate(seed: u64, rng: &mut ChaCha8Rng, config: &GeneratorConfig) -> Option<Instance> {
    let (a, b) = config.interval;
    let span = b - a;
    if !span.is_finite() || span <= 0.0 {
        return None;
    }
    let comparison = config.comparison.as_ref();
    let r = if comparison.is_some() {
        0.5
    } else {
        sample_r(rng, config.r_choice)
    };
    let min_sep = (1e-3 * span).max(0.015);

    // base partition
    let n_pieces = gen_count(rng, config.base_pieces).max(1);
    let mut bks: Vec<f64> = Vec::new();
    for _ in 0..n_pieces.saturating_sub(1) {
        bks.push(rng.gen_range(a + 0.08 * span..b - 0.08 * span));
    }
    bks.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    bks.dedup_by(|p, q| (*p - *q).abs() < 2.0 * min_sep);
    let mut base_edges = Vec::with_capacity(bks.len() + 2);
    base_edges.push(a);
    base_edges.extend_from_slice(&bks);
    base_edges.push(b);
    let base_a: Vec<f64> = (0..base_edges.len() - 1)
        .map(|_| gen_range(rng, config.alpha_density))
        .collect();
    let base_b: Vec<f64> = (0..base_edges.len() - 1)
        .map(|_| gen_range(rng, config.beta_density))
        .collect();

    let x0 = a + 0.04 * span;
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let norm = rng.gen_range(0.7..1.4);
    let u_init = (norm * angle.cos(), norm * angle.sin());

    let mut walker = Walker {
        base_edges: base_edges.clone(),
        base_a,
        base_b,
        r,
        alpha_atoms: Vec::new(),
        beta_atoms: Vec::new(),
        x: x0,
        state: State::new(u_init.0, u_init.1),
    };

    // event plan
    let mut events: Vec<EventKind> = Vec::new();
    events.extend(std::iter::repeat_n(
        EventKind::Flip,
        gen_count(rng, config.flip_atoms),
    ));
    events.extend(std::iter::repeat_n(
        EventKind::Pin,
        gen_count(rng, config.pin_atoms),
    ));
    events.extend(std::iter::repeat_n(
        EventKind::RightZero,
        gen_count(rng, config.right_zero_atoms),
    ));
    events.extend(std::iter::repeat_n(
        EventKind::Plain,
        gen_count(rng, config.plain_atoms),
    ));
    // deterministic shuffle
    for i in (1..events.len()).rev() {
        let j = rng.gen_range(0..=i);
        events.swap(i, j);
    }

    let limit = b - 0.08 * span;
    let reverse = comparison.map(|c| c.reverse).unwrap_or(false);

    for ev in events {
        if walker.x >= limit {
            break;
        }
        match ev {
            EventKind::Flip => {
                let Some(xz) = walker.next_u_zero(limit) else {
                    continue;
                };
                let gap = xz - walker.x;
                let (pa, pb) = walker.densities_at(xz - 1e-12 * span);
                let q = pa * pb;
                let quarter_wave = if q < 0.0 {
                    std::f64::consts::FRAC_PI_2 / (-q).sqrt()
                } else {
                    gap
                };
                for _ in 0..24 {
                    let upper = 0.35 * gap.min(quarter_wave);
                    let lower = 1.5 * min_sep;
                    if upper <= lower {
                        break;
                    }
                    let pos = xz - rng.gen_range(lower..upper);
                    if pos <= walker.x + min_sep
                        || min_edge_distance(&base_edges, pos) < min_sep
                        || pos >= limit
                    {
                        continue;
                    }
                    let left = walker.state_at(pos);
                    let amp = walker.local_amp(pos);
                    if left.u.abs() < 0.02 * amp || left.u.abs() > 0.6 * amp {
                        continue;
                    }
                    let target = if reverse {
                        ThetaSign::BothNegative
                    } else {
                        theta_sign_target(rng, config.negative_theta_fraction)
                    };
                    let da = rng.gen_range(0.25..1.3);
                    let db = rng.gen_range(-3.2..3.2);
                    if !thetas_ok(r, da, db, config.margin, target) {
                        continue;
                    }
                    let Ok((mid, right)) = cross_atom(r, da, db, &left) else {
                        continue;
                    };
                    if left.u * right.u >= 0.0
                        || right.u.abs() < 0.02 * amp
                        || mid.v.abs() < 1e-6 * amp
                    {
                        continue;
                    }
                    walker.advance_to(pos);
                    walker.insert_atom(da, db).ok()?;
                    break;
                }
            }
            EventKind::Pin => {
                let Some(xz) = walker.next_u_zero(limit) else {
                    continue;
                };
                if xz <= walker.x + min_sep
                    || min_edge_distance(&base_edges, xz) < min_sep
                    || xz >= limit
                {
                    continue;
                }
                let amp = walker.local_amp(xz);
                for _ in 0..24 {
                    let target = if reverse {
                        ThetaSign::BothNegative
                    } else {
                        theta_sign_target(rng, config.negative_theta_fraction)
                    };
                    let da = rng.gen_range(0.3..1.3);
                    let db = rng.gen_range(-3.2..3.2);
                    if !thetas_ok(r, da, db, config.margin, target) {
                        continue;
                    }
                    let left = walker.state_at(xz);
                    let Ok((_, right)) = cross_atom(r, da, db, &left) else {
                        continue;
                    };
                    if right.u.abs() < 0.02 * amp {
                        continue;
                    }
                    walker.advance_to(xz);
                    walker.insert_atom(da, db).ok()?;
                    break;
                }
            }
            EventKind::RightZero => {
                let Some(xz) = walker.next_u_zero(limit) else {
                    continue;
                };
                let gap = xz - walker.x;
                for _ in 0..24 {
                    let upper = 0.35 * gap;
                    let lower = 1.5 * min_sep;
                    if upper <= lower {
                        break;
                    }
                    let pos = xz - rng.gen_range(lower..upper);
                    if pos <= walker.x + min_sep
                        || min_edge_distance(&base_edges, pos) < min_sep
                        || pos >= limit
                    {
                        continue;
                    }
                    let left = walker.state_at(pos);
                    let amp = walker.local_amp(pos);
                    if left.u.abs() < 0.05 * amp || left.v.abs() < 1e-9 {
                        continue;
                    }
                    let (da, db);
                    if r > 0.0 && r < 1.0 {
                        da = rng.gen_range(0.3..1.3);
                        db = -(left.u + da * left.v) / (left.u * r * (1.0 - r) * da);
                    } else {
                        da = -left.u / left.v;
                        if !(0.05..=2.5).contains(&da) {
                            continue;
                        }
                        db = rng.gen_range(-2.0..2.0);
                    }
                    if db.abs() > 12.0 {
                        continue;
                    }
                    let want_negative = reverse;
                    let theta_r = 1.0 - r * r * da * db;
                    let theta_c = 1.0 - (1.0 - r) * (1.0 - r) * da * db;
                    let omega = 1.0 - da * db / 4.0;
                    if theta_r.abs() < config.margin
                        || theta_c.abs() < config.margin
                        || omega.abs() < config.margin
                    {
                        continue;
                    }
                    if want_negative && !(theta_r < 0.0 && theta_c < 0.0) {
                        continue;
                    }
                    let Ok((_, right)) = cross_atom(r, da, db, &left) else {
                        continue;
                    };
                    if right.u.abs() > 1e-10 * amp || right.v.abs() < 1e-3 * amp {
                        continue;
                    }
                    walker.advance_to(pos);
                    walker.insert_atom(da, db).ok()?;
                    break;
                }
            }
            EventKind::Plain => {
                let horizon = walker.next_u_zero(limit).unwrap_or(limit).min(limit);
                let gap = horizon - walker.x;
                if gap < 4.0 * min_sep {
                    continue;
                }
                for _ in 0..24 {
                    let pos = walker.x + rng.gen_range(0.25 * gap..0.85 * gap);
                    if min_edge_distance(&base_edges, pos) < min_sep {
                        continue;
                    }
                    let style: f64 = rng.gen();
                    let (da, db) = if style < 0.3 {
                        (gen_range(rng, (0.2, 1.2)), 0.0)
                    } else if style < 0.6 {
                        (0.0, rng.gen_range(-2.5..2.5))
                    } else {
                        (gen_range(rng, (0.2, 1.2)), rng.gen_range(-2.5..2.5))
                    };
                    if da == 0.0 && db == 0.0 {
                        continue;
                    }
                    let target = theta_sign_target(rng, config.negative_theta_fraction);
                    if da != 0.0 && db != 0.0 && !thetas_ok(r, da, db, config.margin, target) {
                        continue;
                    }
                    let left = walker.state_at(pos);
                    let amp = walker.local_amp(pos).max(1e-12);
                    let Ok((_, right)) = cross_atom(r, da, db, &left) else {
                        continue;
                    };
                    // keep classification unambiguous: no accidental near-zeros
                    if left.u.abs() < 0.01 * amp || right.u.abs() < 0.01 * amp {
                        continue;
                    }
                    walker.advance_to(pos);
                    walker.insert_atom(da, db).ok()?;
                    break;
                }
            }
        }
    }

    let interval = Interval::new(a, b).ok()?;
    let alpha = PiecewiseMeasure::new(
        interval,
        bks.clone(),
        walker.base_a.clone(),
        walker.alpha_atoms.clone(),
    )
    .ok()?;
    let beta1 = PiecewiseMeasure::new(
        interval,
        bks.clone(),
        walker.base_b.clone(),
        walker.beta_atoms.clone(),
    )
    .ok()?;

    let problem = Problem::new(r, alpha.clone(), beta1.clone()).ok()?;
    if !problem.check_hypothesis().pass {
        return None;
    }

    // optional second potential
    let second_problem = if let Some(cc) = comparison {
        let sign = if cc.reverse { -1.0 } else { 1.0 };
        let delta_dens: Vec<f64> = (0..walker.base_b.len())
            .map(|_| gen_range(rng, cc.delta_density).max(0.0))
            .collect();
        let beta2_dens: Vec<f64> = walker
            .base_b
            .iter()
            .zip(delta_dens.iter())
            .map(|(b1, d)| b1 - sign * d)
            .collect();
        let mut beta2_atoms: Vec<Atom<f64>> = Vec::new();
        for at in beta1.atoms() {
            let da = alpha.delta_unchecked(at.position);
            let mut w2 = at.weight;
            let reduction = rng.gen_range(0.0..cc.atom_reduction) * at.weight.abs();
            let candidate = at.weight - sign * reduction;
            let omega2 = 1.0 - da * candidate / 4.0;
            if omega2.abs() >= config.margin {
                w2 = candidate;
            }
            if w2 != 0.0 {
                beta2_atoms.push(Atom::new(at.position, w2));
            }
        }
        let n_extra = gen_count(rng, cc.extra_atoms);
        for _ in 0..n_extra {
            for _ in 0..24 {
                let pos = rng.gen_range(a + 0.08 * span..b - 0.08 * span);
                let occupied = min_edge_distance(&base_edges, pos) < min_sep
                    || beta2_atoms
                        .iter()
                        .any(|at| (at.position - pos).abs() < min_sep)
                    || beta1
                        .atoms()
                        .iter()
                        .any(|at| (at.position - pos).abs() < min_sep)
                    || alpha
                        .atoms()
                        .iter()
                        .any(|at| (at.position - pos).abs() < min_sep);
                if occupied {
                    continue;
                }
                // β₂-only atom: negative weight keeps d(β₁−β₂) ≥ 0
                beta2_atoms.push(Atom::new(pos, -sign * rng.gen_range(0.2..1.0)));
                break;
            }
        }
        beta2_atoms.sort_by(|p, q| p.position.partial_cmp(&q.position).expect("finite"));
        let beta2 = PiecewiseMeasure::new(interval, bks.clone(), beta2_dens, beta2_atoms).ok()?;
        let p2 = Problem::new(0.5, alpha.clone(), beta2).ok()?;
        if !p2.check_hypothesis().pass {
            return None;
        }
        Some(p2)
    } else {
        None
    };

    // second initial data, independent of the first
    let mut v_init = (0.0, 0.0);
    for _ in 0..24 {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let norm = rng.gen_range(0.7..1.4);
        let cand = (norm * angle.cos(), norm * angle.sin());
        let w = u_init.0 * cand.1 - cand.0 * u_init.1;
        if w.abs() > 0.15 {
            v_init = cand;
            break;
        }
    }
    if v_init == (0.0, 0.0) {
        return None;
    }

    let window = (a + 0.02 * span, b - 0.02 * span);
    let instance = Instance {
        seed,
        problem,
        second_problem,
        x0,
        u_init,
        v_init,
        window,
    };
    if instance_is_clean(&instance, config) {
        Some(instance)
    } else {
        None
    }
}

/// Final quality gate: solutions exist, stay bounded, classify without
/// ambiguity, and carry enough sign changes.
fn instance_is_clean(instance: &Instance, config: &GeneratorConfig) -> bool {
    let u_sol = match solve_ivp(
        &instance.problem,
        instance.x0,
        instance.u_init.0,
        instance.u_init.1,
    ) {
        Ok(s) => s,
        Err(_) => return false,
    };
    let v_problem = instance
        .second_problem
        .as_ref()
        .unwrap_or(&instance.problem);
    let v_sol = match solve_ivp(v_problem, instance.x0, instance.v_init.0, instance.v_init.1) {
        Ok(s) => s,
        Err(_) => return false,
    };
    for sol in [&u_sol, &v_sol] {
        if !solution_is_clean(sol, config) {
            return false;
        }
    }
    match find_sign_changes(&u_sol, instance.window.0, instance.window.1) {
        Ok(zs) => {
            if zs.len() < config.min_zero_count {
                return false;
            }
            // a declared-zero side whose true crossing sits just past the
            // root-scan guard would double-count one physical zero as a
            // near-degenerate pair; keep detected points well separated
            let resolution = 1e-8 * instance.problem.interval().length();
            zs.windows(2)
                .all(|w| w[1].position - w[0].position >= resolution)
        }
        Err(_) => false,
    }
}

fn solution_is_clean(sol: &Solution<f64>, config: &GeneratorConfig) -> bool {
    let interval = sol.interval();
    let mut max_amp: f64 = 0.0;
    for i in 0..64 {
        let x = interval.a() + interval.length() * (i as f64 + 0.5) / 64.0;
        match sol.evaluate(x, Side::Mid) {
            Ok(s) => max_amp = max_amp.max(s.max_norm()),
            Err(_) => return false,
        }
    }
    if max_amp > config.max_amplitude {
        return false;
    }
    // no one-sided value may fall into the ambiguous band around the
    // zero-detection tolerance
    for rec in sol.atom_records() {
        let local = rec
            .left
            .max_norm()
            .max(rec.right.max_norm())
            .max(rec.mid.max_norm())
            .max(1e-12);
        for side_u in [rec.left.u, rec.right.u] {
            let m = side_u.abs();
            if m > 1e-13 * local && m < 1e-7 * local {
                return false;
            }
        }
    }
    true
}

/// Campaign variants: which verifier and invariant suite each instance runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CampaignMode {
    Isolation,
    Separation,
    Comparison,
    Wronskian,
}

impl std::str::FromStr for CampaignMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "isolation" => Ok(Self::Isolation),
            "separation" => Ok(Self::Separation),
            "comparison" => Ok(Self::Comparison),
            "wronskian" => Ok(Self::Wronskian),
            other => Err(format!(
                "unknown mode {other:?} (expected isolation|separation|comparison|wronskian)"
            )),
        }
    }
}

impl fmt::Display for CampaignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CampaignMode::Isolation => "isolation",
            CampaignMode::Separation => "separation",
            CampaignMode::Comparison => "comparison",
            CampaignMode::Wronskian => "wronskian",
        };
        write!(f, "{s}")
    }
}

/// A verification failure with full reproduction data.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignFailure {
    pub instance_seed: u64,
    pub context: String,
    pub detail: String,
    pub instance: Option<Box<Instance>>,
}

/// Order-insensitive aggregate over all instances of a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub mode: CampaignMode,
    pub n: usize,
    pub seed: u64,
    pub pairs_total: usize,
    /// Consecutive pairs where no clause hypothesis held (inapplicable, not
    /// failures).
    pub pairs_without_cases: usize,
    pub clause_counts: BTreeMap<String, usize>,
    pub aux_counts: BTreeMap<String, usize>,
    pub warning_count: usize,
    pub failures: Vec<CampaignFailure>,
    pub pass: bool,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn instance_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64 + 1))
}

fn merge_report(summary: &mut CampaignSummary, report: &VerificationReport, inst: &Instance) {
    summary.pairs_total += report.pairs.len();
    summary.pairs_without_cases += report.pairs.iter().filter(|p| p.cases.is_empty()).count();
    for (k, v) in &report.clause_counts {
        *summary.clause_counts.entry(k.clone()).or_insert(0) += v;
    }
    for aux in &report.aux_checks {
        *summary.aux_counts.entry(aux.lemma.clone()).or_insert(0) += 1;
        if !aux.passed {
            summary.failures.push(CampaignFailure {
                instance_seed: inst.seed,
                context: format!("aux {} at {}", aux.lemma, aux.position),
                detail: format!("product value {}", aux.value),
                instance: Some(Box::new(inst.clone())),
            });
        }
    }
    summary.warning_count += report.warnings.len();
    for pair in &report.pairs {
        for case in &pair.cases {
            if case.id == "I.1e" {
                continue; // diagnostic only
            }
            if !case.passed {
                summary.failures.push(CampaignFailure {
                    instance_seed: inst.seed,
                    context: format!("clause {} on ({}, {})", case.id, pair.s, pair.t),
                    detail: format!("no sign change of v in {}", case.conclusion),
                    instance: Some(Box::new(inst.clone())),
                });
            }
        }
    }
}

fn fail(
    summary: &mut CampaignSummary,
    inst: &Instance,
    context: impl Into<String>,
    detail: impl Into<String>,
) {
    summary.failures.push(CampaignFailure {
        instance_seed: inst.seed,
        context: context.into(),
        detail: detail.into(),
        instance: Some(Box::new(inst.clone())),
    });
}

fn check_isolation(summary: &mut CampaignSummary, inst: &Instance) -> Result<()> {
    let u_sol = solve_ivp(&inst.problem, inst.x0, inst.u_init.0, inst.u_init.1)?;
    let zs = find_sign_changes(&u_sol, inst.window.0, inst.window.1)?;
    *summary.clause_counts.entry("zeros".into()).or_insert(0) += zs.len();
    let problem = &inst.problem;

    for w in zs.windows(2) {
        if w[1].position <= w[0].position {
            fail(
                summary,
                inst,
                "isolation.min_gap",
                format!("coincident points at {}", w[0].position),
            );
        }
    }

    let hyp_all_positive = problem
        .check_hypothesis()
        .atoms
        .iter()
        .all(|c| c.theta_r > 0.0 && c.theta_complement > 0.0);

    for z in &zs {
        let key = format!("kind.{}", z.kind);
        *summary.clause_counts.entry(key).or_insert(0) += 1;
        match z.kind {
            ZeroKind::ContinuousZero => {
                if !z.changes_sign {
                    fail(
                        summary,
                        inst,
                        "thm.continuous-zero",
                        format!("at {}", z.position),
                    );
                }
            }
            ZeroKind::LeftZero => {
                let expected = problem.theta_complement(z.position)? > 0.0;
                if z.changes_sign != expected {
                    fail(summary, inst, "thm.left-zero", format!("at {}", z.position));
                }
            }
            ZeroKind::RightZero => {
                let expected = problem.theta_r(z.position)? > 0.0;
                if z.changes_sign != expected {
                    fail(
                        summary,
                        inst,
                        "thm.right-zero",
                        format!("at {}", z.position),
                    );
                }
            }
            ZeroKind::StrictFlip => {
                let window_ok = matches!(
                    z.criterion,
                    SignChangeCriterion::StrictFlipRule {
                        window_ok: true,
                        ..
                    }
                );
                if !z.changes_sign || !window_ok {
                    fail(
                        summary,
                        inst,
                        "thm.flip-window",
                        format!("at {}", z.position),
                    );
                }
            }
        }
        if hyp_all_positive && !z.changes_sign {
            fail(
                summary,
                inst,
                "cor.all-positive-theta",
                format!("non-changing point at {}", z.position),
            );
        }
    }

    // definition-level oracle: a verdict must agree with a fine-grid sign
    // scan on punctured neighborhoods, independently of the θ criteria
    let span = inst.problem.interval().length();
    for (i, z) in zs.iter().enumerate() {
        let prev = if i == 0 {
            inst.window.0
        } else {
            zs[i - 1].position
        };
        let next = if i + 1 == zs.len() {
            inst.window.1
        } else {
            zs[i + 1].position
        };
        let radius = (z.position - prev)
            .min(next - z.position)
            .min(0.02 * span)
            * 0.5;
        if radius <= 0.0 {
            continue;
        }
        let side_sign = |direction: f64| -> Result<f64> {
            let mut sign = 0.0f64;
            for k in 1..=12 {
                let x = z.position + direction * radius * k as f64 / 12.0;
                let val = u_sol.evaluate(x, Side::Mid)?.u;
                if val != 0.0 {
                    sign = val.signum();
                }
            }
            Ok(sign)
        };
        let left_sign = side_sign(-1.0)?;
        let right_sign = side_sign(1.0)?;
        let observed_change = left_sign != 0.0 && right_sign != 0.0 && left_sign != right_sign;
        *summary.aux_counts.entry("sign-scan".into()).or_insert(0) += 1;
        if observed_change != z.changes_sign {
            fail(
                summary,
                inst,
                "thm.sign-scan",
                format!(
                    "verdict {} at {} contradicts grid signs ({left_sign}, {right_sign})",
                    z.changes_sign, z.position
                ),
            );
        }
    }

    // between consecutive points the one-sided values keep one sign
    for w in zs.windows(2) {
        summary.pairs_total += 1;
        let (s, t) = (w[0].position, w[1].position);
        let mut sign = 0.0f64;
        let mut ok = true;
        for i in 0..25 {
            let x = s + (t - s) * (i as f64 + 0.5) / 25.0;
            for side in [Side::Left, Side::Right] {
                let val = u_sol.evaluate(x, side)?.u;
                if val == 0.0 {
                    ok = false;
                } else if sign == 0.0 {
                    sign = val.signum();
                } else if val.signum() != sign {
                    ok = false;
                }
            }
        }
        if !ok {
            fail(
                summary,
                inst,
                "ivt.gap-sign",
                format!("between {s} and {t}"),
            );
        }
        *summary.aux_counts.entry("ivt".into()).or_insert(0) += 1;
        match mean_value_witness(&u_sol, s, t) {
            Ok(_) => {
                *summary.aux_counts.entry("mvt".into()).or_insert(0) += 1;
            }
            Err(e) => fail(summary, inst, "mvt.witness", e.to_string()),
        }
    }
    Ok(())
}

fn check_wronskian(summary: &mut CampaignSummary, inst: &Instance, tol_scale: f64) -> Result<()> {
    let problem = &inst.problem;
    let u = solve_ivp(problem, inst.x0, inst.u_init.0, inst.u_init.1)?;
    let v = solve_ivp(problem, inst.x0, inst.v_init.0, inst.v_init.1)?;
    let (lo, hi) = inst.window;

    // the Wronskian subtracts products of state components, so its rounding
    // floor scales with the product magnitude, not with W itself
    let cancellation = |x: f64| -> Result<f64> {
        let us = u.evaluate(x, Side::Mid)?;
        let vs = v.evaluate(x, Side::Mid)?;
        Ok(us.max_norm() * vs.max_norm())
    };

    let w0 = wronskian(&u, &v, inst.x0)?.mid;
    let mut xs: Vec<f64> = (0..40)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 40.0)
        .collect();
    xs.extend(problem.atom_positions());

    // for balanced solutions the one-sided representatives of W are constant;
    // the balanced value itself detaches from them at common atoms, where it
    // equals W⁻/θ_{1/2}
    let balanced = problem.r() == 0.5;
    for &x in &xs {
        let w = wronskian(&u, &v, x)?;
        if balanced {
            *summary.aux_counts.entry("constancy".into()).or_insert(0) += 1;
            let is_atom = problem.alpha().delta_unchecked(x) != 0.0
                || problem.beta().delta_unchecked(x) != 0.0;
            let probes: &[f64] = if is_atom {
                &[w.left, w.right]
            } else {
                &[w.mid, w.left, w.right]
            };
            for &probe in probes {
                if (probe - w0).abs() > 1e-9 * tol_scale * w0.abs() {
                    fail(
                        summary,
                        inst,
                        "wronskian.constancy",
                        format!("W({x}) = {probe} vs W(x0) = {w0}"),
                    );
                }
            }
        }
    }
    let gamma = wronskian_jump_measure(problem)?;
    for s in problem.atom_positions() {
        let w = wronskian(&u, &v, s)?;
        let theta_c = problem.theta_complement(s)?;
        let theta_r = problem.theta_r(s)?;
        let scale = w
            .mid
            .abs()
            .max(w.left.abs())
            .max(w.right.abs())
            .max(cancellation(s)?)
            .max(1e-300);
        *summary.aux_counts.entry("relation".into()).or_insert(0) += 1;
        if (w.mid - w.left / theta_c).abs() > 1e-12 * tol_scale * scale
            || (w.mid - w.right / theta_r).abs() > 1e-12 * tol_scale * scale
        {
            fail(
                summary,
                inst,
                "wronskian.relation",
                format!("at {s}: W={}, W-={}, W+={}", w.mid, w.left, w.right),
            );
        }
        let theta = problem.theta_ratio(s)?;
        if (1.0 + gamma.delta_unchecked(s) - theta).abs() > 1e-12 * tol_scale * theta.abs().max(1.0)
        {
            fail(summary, inst, "wronskian.gamma", format!("at {s}"));
        }
    }
    // product and series forms against the directly computed left limit;
    // the direct side carries the cancellation floor of the larger of the
    // two endpoint Wronskians
    let w_ref = wronskian(&u, &v, lo)?.left;
    for &y in xs.iter().filter(|&&y| y > lo) {
        let direct = wronskian(&u, &v, y)?.left;
        let predicted = wronskian_product(&u, &v, lo, y)?;
        let tol = 1e-10 * tol_scale * w_ref.abs().max(direct.abs()).max(1e-300)
            + 1e-13 * cancellation(y)?;
        *summary.aux_counts.entry("product".into()).or_insert(0) += 1;
        if (predicted - direct).abs() > tol {
            fail(
                summary,
                inst,
                "wronskian.product",
                format!("at {y}: predicted {predicted}, direct {direct}"),
            );
        }
        let series = wronskian_series(problem, lo, y)?;
        *summary.aux_counts.entry("series".into()).or_insert(0) += 1;
        if (w_ref * series - direct).abs() > tol {
            fail(
                summary,
                inst,
                "wronskian.series",
                format!("at {y}: factor {series}"),
            );
        }
    }
    // dependence equivalence: a scaled copy has identically zero Wronskian
    let w2 = solve_ivp(problem, inst.x0, 1.7 * inst.u_init.0, 1.7 * inst.u_init.1)?;
    for &x in xs.iter().take(8) {
        let w = wronskian(&u, &w2, x)?;
        let scale = u.evaluate(x, Side::Mid)?.max_norm().powi(2).max(1e-300);
        *summary.aux_counts.entry("dependent".into()).or_insert(0) += 1;
        if w.mid.abs() > 1e-10 * tol_scale * scale
            || w.left.abs() > 1e-10 * tol_scale * scale
            || w.right.abs() > 1e-10 * tol_scale * scale
        {
            fail(summary, inst, "wronskian.dependent", format!("at {x}"));
        }
    }
    Ok(())
}

/// Runs `n` deterministic randomized instances through the mode's verifier
/// and invariant suite. Identical (mode, n, seed, config) produce identical
/// summaries.
pub fn run_campaign(
    mode: CampaignMode,
    n: usize,
    seed: u64,
    config: &GeneratorConfig,
) -> Result<CampaignSummary> {
    run_campaign_with_tolerance(mode, n, seed, config, 1.0)
}

/// Campaign with a multiplier applied to the default check tolerances.
pub fn run_campaign_with_tolerance(
    mode: CampaignMode,
    n: usize,
    seed: u64,
    config: &GeneratorConfig,
    tol_scale: f64,
) -> Result<CampaignSummary> {
    let mut summary = CampaignSummary {
        mode,
        n,
        seed,
        pairs_total: 0,
        pairs_without_cases: 0,
        clause_counts: BTreeMap::new(),
        aux_counts: BTreeMap::new(),
        warning_count: 0,
        failures: Vec::new(),
        pass: true,
    };
    for i in 0..n {
        let s = instance_seed(seed, i);
        let inst = random_instance(s, config)?;
        match mode {
            CampaignMode::Isolation => check_isolation(&mut summary, &inst)?,
            CampaignMode::Wronskian => check_wronskian(&mut summary, &inst, tol_scale)?,
            CampaignMode::Separation => {
                let u = solve_ivp(&inst.problem, inst.x0, inst.u_init.0, inst.u_init.1)?;
                let v = solve_ivp(&inst.problem, inst.x0, inst.v_init.0, inst.v_init.1)?;
                let report = verify_separation(&u, &v)?;
                merge_report(&mut summary, &report, &inst);
            }
            CampaignMode::Comparison => {
                let p2 = inst
                    .second_problem
                    .as_ref()
                    .ok_or_else(|| Error::Unsatisfiable("comparison config required".into()))?;
                let u = solve_ivp(&inst.problem, inst.x0, inst.u_init.0, inst.u_init.1)?;
                let v = solve_ivp(p2, inst.x0, inst.v_init.0, inst.v_init.1)?;
                let report = verify_comparison(&u, &v)?;
                merge_report(&mut summary, &report, &inst);
            }
        }
    }
    summary.pass = summary.failures.is_empty();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type M = PiecewiseMeasure<f64>;

    fn iv(a: f64, b: f64) -> Interval<f64> {
        Interval::new(a, b).unwrap()
    }

    fn classical(interval: Interval<f64>, b: f64) -> Problem<f64> {
        Problem::new(0.5, M::lebesgue(interval), M::constant(interval, b)).unwrap()
    }

    #[test]
    fn classify_classical_pair_yields_all_first_table_clauses() {
        let p = classical(iv(0.0, 10.0), -1.0);
        let u = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 1.0, 0.0).unwrap();
        let zs = find_sign_changes(&u, 0.5, 7.0).unwrap();
        let cases = classify_separation(&u, zs[0].position, zs[1].position).unwrap();
        let ids: Vec<String> = cases.iter().map(|c| c.id.to_string()).collect();
        assert_eq!(ids, vec!["I.1", "I.2", "I.3", "I.4"]);
        assert_eq!(cases[0].conclusion, IntervalForm::Open);
    }

    #[test]
    fn classify_rejects_non_consecutive_points() {
        let p = classical(iv(0.0, 10.0), -1.0);
        let u = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 1.0, 0.0).unwrap();
        // π and 3π straddle 2π
        assert!(classify_separation(&u, PI, 3.0 * PI).is_err());
    }

    #[test]
    fn flip_product_law_holds_when_companion_keeps_sign() {
        // u flips at the atom; v is chosen with balanced ratio 1.2, outside
        // the flip window (−1/2, 1/2), so it keeps its sign there
        let interval = iv(-2.0, 2.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let beta = M::new(interval, vec![], vec![0.0], vec![Atom::new(0.0, -10.0)]).unwrap();
        let p = Problem::new(0.5, alpha, beta).unwrap();
        let u = solve_ivp(&p, -1.0, 1.0, 0.0).unwrap();
        // left limit at the atom is (1, 10): balanced ratio 6/5 there
        let v = solve_ivp(&p, -1.0, -9.0, 10.0).unwrap();
        let zu = find_sign_changes(&u, -1.5, 1.5).unwrap();
        assert_eq!(zu[0].kind, ZeroKind::StrictFlip);
        assert!(classify_point(&v, 0.0).unwrap().is_none(), "v must keep its sign");
        // v(s)·(du/dα)(s)·W[u,v](s) < 0
        let vm = v.evaluate(0.0, Side::Mid).unwrap();
        let um = u.evaluate(0.0, Side::Mid).unwrap();
        let w = wronskian(&u, &v, 0.0).unwrap();
        assert!(vm.u * um.v * w.mid < 0.0);
        // and the verifier records the same auxiliary check
        let report = verify_separation(&u, &v).unwrap();
        let aux = report
            .aux_checks
            .iter()
            .find(|a| a.lemma == "separation-flip-product" && a.position == 0.0)
            .expect("auxiliary check recorded");
        assert!(aux.passed);
    }

    #[test]
    fn classify_empty_when_theta_negative_between() {
        // r = 0.8, Δα·Δβ = 2 at an interior atom: θ_r < 0 < θ_{1−r}, so the
        // jump factor θ is negative there while the solution does not flip
        let interval = iv(0.0, 10.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(4.8, 1.0)]).unwrap();
        let beta = M::new(interval, vec![], vec![-1.0], vec![Atom::new(4.8, 2.0)]).unwrap();
        let p = Problem::new(0.8, alpha, beta).unwrap();
        assert!(p.check_hypothesis().pass);
        assert!(p.theta_ratio(4.8).unwrap() < 0.0);
        let u = solve_ivp(&p, 1.0, 0.0, 1.0).unwrap();
        let zs = find_sign_changes(&u, 0.5, 9.5).unwrap();
        // find a consecutive pair straddling the atom
        let pair = zs
            .windows(2)
            .find(|w| w[0].position < 4.8 && w[1].position > 4.8);
        if let Some(w) = pair {
            let cases = classify_separation(&u, w[0].position, w[1].position).unwrap();
            assert!(cases.is_empty());
        } else {
            panic!("expected a pair straddling the atom, got {zs:?}");
        }
    }

    #[test]
    fn verify_separation_classical_interlacing() {
        let p = classical(iv(0.0, 10.0), -1.0);
        let u = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 1.0, 0.0).unwrap();
        let v = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 0.0, -1.0).unwrap();
        let report = verify_separation(&u, &v).unwrap();
        assert!(report.pass, "failures: {:?}", report.pairs);
        assert!(report.clause_counts["I.1"] >= 2);
        // the first pair's open-interval witness is the cosine zero between
        let first = &report.pairs[0];
        let w = first.cases[0].witness.unwrap();
        assert!(first.s < w && w < first.t);
    }

    #[test]
    fn verify_separation_rejects_dependent_pair() {
        let p = classical(iv(0.0, 10.0), -1.0);
        let u = solve_ivp(&p, 1.0, 1.0, 0.5).unwrap();
        let v = solve_ivp(&p, 1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            verify_separation(&u, &v),
            Err(Error::DependentSolutions)
        ));
    }

    #[test]
    fn verify_comparison_classical() {
        let interval = iv(0.0, 10.0);
        let p1 = classical(interval, -1.0);
        let p2 = classical(interval, -4.0);
        let u = solve_ivp(&p1, std::f64::consts::FRAC_PI_2, 1.0, 0.0).unwrap(); // sin x
        let v = solve_ivp(&p2, 0.5, (2.0f64 * 0.5).sin(), 2.0 * (2.0f64 * 0.5).cos()).unwrap(); // sin 2x
        let report = verify_comparison(&u, &v).unwrap();
        assert!(report.pass, "pairs: {:?}", report.pairs);
        assert!(report.clause_counts.contains_key("I.1"));
    }

    #[test]
    fn verify_comparison_equal_potentials_drops_nontrivial_clause() {
        let interval = iv(0.0, 10.0);
        let p = classical(interval, -1.0);
        let u = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 1.0, 0.0).unwrap();
        let v = solve_ivp(&p, std::f64::consts::FRAC_PI_2, 0.0, -1.0).unwrap();
        let report = verify_comparison(&u, &v).unwrap();
        assert!(report.pass);
        assert!(!report.clause_counts.contains_key("I.1"));
        assert!(report.clause_counts.contains_key("I.2"));
    }

    #[test]
    fn reversed_fourth_clause_applies_with_negative_omegas() {
        // engineered instance: left zero at s with ω₁ < 0, right zero at t
        // with ω₁ < 0, and β₂ ≥ β₁
        let interval = iv(-4.0, 8.0);
        let s = 0.0;
        // first pass without the closing atom to locate the zero approach
        let alpha0 = M::new(interval, vec![], vec![1.0], vec![Atom::new(s, 3.0)]).unwrap();
        let beta0 = M::new(interval, vec![], vec![-1.0], vec![Atom::new(s, 2.0)]).unwrap();
        let p0 = Problem::new(0.5, alpha0, beta0).unwrap();
        assert!(crate::measure::omega(p0.alpha(), p0.beta(), s).unwrap() < 0.0);
        // balanced values with left limit (0, 1) at s
        let mid = crate::propagator::mid_from_left(0.5, 3.0, 2.0, &State::new(0.0, 1.0)).unwrap();
        let u0 = solve_ivp(&p0, s, mid.u, mid.v).unwrap();
        let zs = find_sign_changes(&u0, s + 0.05, 7.5).unwrap();
        let xz = zs[0].position;
        // place the closing atom before that zero and solve Δβ₁ for u⁺ = 0
        let t = xz - 0.35;
        let left_t = u0.evaluate(t, Side::Left).unwrap();
        let da_t = 3.0;
        let db_t = -(left_t.u + da_t * left_t.v) / (left_t.u * 0.25 * da_t);
        assert!(
            1.0 - da_t * db_t / 4.0 < 0.0,
            "need ω₁(t) < 0, got db={db_t}"
        );
        let alpha = M::new(
            interval,
            vec![],
            vec![1.0],
            vec![Atom::new(s, 3.0), Atom::new(t, da_t)],
        )
        .unwrap();
        let beta1 = M::new(
            interval,
            vec![],
            vec![-1.0],
            vec![Atom::new(s, 2.0), Atom::new(t, db_t)],
        )
        .unwrap();
        let p1 = Problem::new(0.5, alpha.clone(), beta1.clone()).unwrap();
        assert!(p1.check_hypothesis().pass);
        let u = solve_ivp(&p1, s, mid.u, mid.v).unwrap();
        // u has a left zero at s and a right zero at t, consecutive;
        // β₂ = β₁ + 0.5·Lebesgue reverses the usual domination
        let beta2 = {
            let dens: Vec<f64> = beta1.densities().iter().map(|d| d + 0.5).collect();
            M::new(
                interval,
                beta1.breakpoints().to_vec(),
                dens,
                beta1.atoms().to_vec(),
            )
            .unwrap()
        };
        let cases = classify_comparison(&u, &beta2, s, t).unwrap();
        let ids: Vec<String> = cases.iter().map(|c| c.id.to_string()).collect();
        assert!(ids.contains(&"I.4'".to_string()), "got {ids:?}");
        // and the conclusion verifies end to end
        let p2 = Problem::new(0.5, alpha, beta2).unwrap();
        assert!(p2.check_hypothesis().pass);
        let v = solve_ivp(&p2, s + 1.0, 0.8, 0.3).unwrap();
        let report = verify_comparison(&u, &v).unwrap();
        let outcome = report
            .pairs
            .iter()
            .flat_map(|p| p.cases.iter())
            .find(|c| c.id == "I.4'");
        if let Some(outcome) = outcome {
            assert!(outcome.passed, "reversed clause failed: {outcome:?}");
        } else {
            panic!("reversed clause not exercised: {report:?}");
        }
    }

    #[test]
    fn classify_flip_then_continuous_zero_reaches_second_table() {
        // strict flip at the Δβ = −10 atom, then a natural zero of the
        // oscillatory continuation
        let interval = iv(-2.0, 10.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let beta = M::new(
            interval,
            vec![0.0],
            vec![0.0, -1.0],
            vec![Atom::new(0.0, -10.0)],
        )
        .unwrap();
        let p = Problem::new(0.5, alpha, beta).unwrap();
        let u = solve_ivp(&p, -1.0, 1.0, 0.0).unwrap();
        let zs = find_sign_changes(&u, -1.5, 9.5).unwrap();
        assert_eq!(zs[0].kind, ZeroKind::StrictFlip);
        assert_eq!(zs[1].kind, ZeroKind::ContinuousZero);
        assert!(p.theta_r(zs[0].position).unwrap() > 0.0);
        let cases = classify_separation(&u, zs[0].position, zs[1].position).unwrap();
        let ids: Vec<String> = cases.iter().map(|c| c.id.to_string()).collect();
        assert_eq!(ids[0], "II.1");
        assert!(ids.contains(&"II.3".to_string()));
    }

    #[test]
    fn witness_between_consecutive_flips_matches_grid_scan() {
        // two engineered strict flips with no zero between them
        let interval = iv(0.0, 12.0);
        let base = Problem::new(0.5, M::lebesgue(interval), M::constant(interval, -1.0)).unwrap();
        let probe = solve_ivp(&base, 1.0, 1.0, 0.0).unwrap();
        // flips shortly before the natural zeros near 1+π/2 and beyond
        let z1 = find_sign_changes(&probe, 1.0, 11.0).unwrap()[0].position;
        let s1 = z1 - 0.3;
        let left1 = probe.evaluate(s1, Side::Left).unwrap();
        let (_, r1) = cross_atom(0.5, 1.0, -3.0, &left1).unwrap();
        assert!(left1.u * r1.u < 0.0, "first atom must flip");
        // continue to the next zero of the continuation
        let cont = {
            let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(s1, 1.0)]).unwrap();
            let beta = M::new(interval, vec![], vec![-1.0], vec![Atom::new(s1, -3.0)]).unwrap();
            let p = Problem::new(0.5, alpha, beta).unwrap();
            solve_ivp(&p, 1.0, 1.0, 0.0).unwrap()
        };
        let z2 = find_sign_changes(&cont, s1 + 0.05, 11.0).unwrap()[1].position;
        let s2 = z2 - 0.3;
        let left2 = cont.evaluate(s2, Side::Left).unwrap();
        let (_, r2) = cross_atom(0.5, 1.0, -3.0, &left2).unwrap();
        assert!(left2.u * r2.u < 0.0, "second atom must flip");

        let alpha = M::new(
            interval,
            vec![],
            vec![1.0],
            vec![Atom::new(s1, 1.0), Atom::new(s2, 1.0)],
        )
        .unwrap();
        let beta = M::new(
            interval,
            vec![],
            vec![-1.0],
            vec![Atom::new(s1, -3.0), Atom::new(s2, -3.0)],
        )
        .unwrap();
        let p = Problem::new(0.5, alpha, beta).unwrap();
        let u = solve_ivp(&p, 1.0, 1.0, 0.0).unwrap();
        let zs = find_sign_changes(&u, 1.0, 11.0).unwrap();
        let flips: Vec<_> = zs
            .iter()
            .filter(|z| z.kind == ZeroKind::StrictFlip)
            .collect();
        assert!(flips.len() >= 2);
        let (s, t) = (flips[0].position, flips[1].position);
        let w = mean_value_witness(&u, s, t).unwrap();
        assert!(w >= s && w <= t);
        // fine-grid oracle: the quasi-derivative changes sign near w
        let before = u.evaluate((w - 1e-4).max(s), Side::Left).unwrap().v;
        let after = u.evaluate((w + 1e-4).min(t), Side::Right).unwrap().v;
        assert!(
            before * after <= 0.0,
            "no v sign change near witness {w}: {before} vs {after}"
        );
    }

    #[test]
    fn even_negative_theta_count_triggers_diagnostic_clause() {
        // two atoms with θ < 0 strictly between consecutive zeros: the case
        // tables are inapplicable, but the even-count diagnostic still
        // expects an open-interval witness
        let interval = iv(0.0, 10.0);
        let alpha = M::new(
            interval,
            vec![],
            vec![1.0],
            vec![Atom::new(4.5, 1.0), Atom::new(5.5, 1.0)],
        )
        .unwrap();
        let beta = M::new(
            interval,
            vec![],
            vec![-1.0],
            vec![Atom::new(4.5, 2.0), Atom::new(5.5, 2.0)],
        )
        .unwrap();
        let p = Problem::new(0.8, alpha, beta).unwrap();
        assert!(p.check_hypothesis().pass);
        assert!(p.theta_ratio(4.5).unwrap() < 0.0);
        assert!(p.theta_ratio(5.5).unwrap() < 0.0);
        let u = solve_ivp(&p, 1.0, 0.0, 1.0).unwrap();
        let v = solve_ivp(&p, 1.0, 1.0, 0.3).unwrap();
        let zs = find_sign_changes(&u, 0.5, 9.5).unwrap();
        let pair = zs
            .windows(2)
            .find(|w| w[0].position < 4.5 && w[1].position > 5.5)
            .expect("pair straddling both atoms");
        // no flips at the atoms themselves, so the pair brackets them
        assert_eq!(pair[0].kind, ZeroKind::ContinuousZero);
        assert_eq!(pair[1].kind, ZeroKind::ContinuousZero);
        let cases = classify_separation(&u, pair[0].position, pair[1].position).unwrap();
        assert!(cases.is_empty());
        let report = verify_separation(&u, &v).unwrap();
        assert!(
            report.clause_counts.get("I.1e").copied().unwrap_or(0) >= 1,
            "diagnostic clause not exercised: {:?}",
            report.clause_counts
        );
        // the diagnostic is advisory: the run passes either way, and here
        // the witness exists
        assert!(report.pass);
        let outcome = report
            .pairs
            .iter()
            .flat_map(|p| p.cases.iter())
            .find(|c| c.id == "I.1e")
            .expect("diagnostic outcome recorded");
        assert!(outcome.passed && outcome.witness.is_some());
    }

    #[test]
    fn classification_hypotheses_hold_on_raw_values() {
        // soundness: every returned case id is re-derivable from the raw
        // one-sided values and the θ/ω tables alone
        let config = GeneratorConfig::separation();
        for seed in 0..40u64 {
            let inst = random_instance(seed, &config).unwrap();
            let p = &inst.problem;
            let u = solve_ivp(p, inst.x0, inst.u_init.0, inst.u_init.1).unwrap();
            let zs = find_sign_changes(&u, inst.window.0, inst.window.1).unwrap();
            for w in zs.windows(2) {
                let (zs_pt, zt_pt) = (&w[0], &w[1]);
                let cases = classify_separation(&u, zs_pt.position, zt_pt.position).unwrap();
                let norm = |z: &SignChangePoint<f64>| {
                    z.left
                        .max_norm()
                        .max(z.right.max_norm())
                        .max(z.mid.max_norm())
                        .max(1e-12)
                };
                let minus_zero = |z: &SignChangePoint<f64>| z.left.u.abs() <= 1e-9 * norm(z);
                let plus_zero = |z: &SignChangePoint<f64>| z.right.u.abs() <= 1e-9 * norm(z);
                let flip = |z: &SignChangePoint<f64>| {
                    z.left.u * z.right.u < 0.0
                        && z.left.u.abs() > 1e-9 * norm(z)
                        && z.right.u.abs() > 1e-9 * norm(z)
                };
                if !cases.is_empty() {
                    // θ positive strictly between the endpoints
                    for a in p.atom_positions() {
                        if a > zs_pt.position && a < zt_pt.position {
                            assert!(p.theta_ratio(a).unwrap() > 0.0, "seed {seed}");
                        }
                    }
                }
                for case in &cases {
                    let tr_s = p.theta_r(zs_pt.position).unwrap();
                    let tc_t = p.theta_complement(zt_pt.position).unwrap();
                    let ok = match case.id {
                        ClauseId::I1 => plus_zero(zs_pt) && minus_zero(zt_pt),
                        ClauseId::I2 => minus_zero(zs_pt) && minus_zero(zt_pt) && tr_s > 0.0,
                        ClauseId::I3 => plus_zero(zs_pt) && plus_zero(zt_pt) && tc_t > 0.0,
                        ClauseId::I4 => minus_zero(zs_pt) && plus_zero(zt_pt) && tr_s * tc_t > 0.0,
                        ClauseId::II1 => flip(zs_pt) && minus_zero(zt_pt) && tr_s > 0.0,
                        ClauseId::II2 => plus_zero(zs_pt) && flip(zt_pt) && tc_t > 0.0,
                        ClauseId::II3 => flip(zs_pt) && plus_zero(zt_pt) && tr_s * tc_t > 0.0,
                        ClauseId::II4 => minus_zero(zs_pt) && flip(zt_pt) && tr_s * tc_t > 0.0,
                        ClauseId::II5 => flip(zs_pt) && flip(zt_pt) && tr_s * tc_t > 0.0,
                        ClauseId::I4Prime => unreachable!("separation never yields I.4'"),
                    };
                    assert!(
                        ok,
                        "seed {seed}: clause {} not re-derivable at ({}, {})",
                        case.id, case.s, case.t
                    );
                }
            }
        }
    }

    #[test]
    fn no_atom_config_yields_classical_instances() {
        let mut config = GeneratorConfig::separation();
        config.flip_atoms = (0, 0);
        config.pin_atoms = (0, 0);
        config.right_zero_atoms = (0, 0);
        config.plain_atoms = (0, 0);
        let inst = random_instance(1, &config).unwrap();
        assert!(inst.problem.alpha().atoms().is_empty());
        assert!(inst.problem.beta().atoms().is_empty());

        let summary = run_campaign(CampaignMode::Separation, 1, 1, &config).unwrap();
        assert!(summary.pass);
        assert!(summary.clause_counts.get("I.1").copied().unwrap_or(0) >= 1);
        assert!(summary.pairs_without_cases == 0);
    }

    #[test]
    fn random_instance_is_deterministic() {
        let config = GeneratorConfig::separation();
        let a = random_instance(42, &config).unwrap();
        let b = random_instance(42, &config).unwrap();
        assert_eq!(a.problem, b.problem);
        assert_eq!(a.u_init, b.u_init);
        assert_eq!(a.v_init, b.v_init);
        let c = random_instance(43, &config).unwrap();
        assert!(c.problem != a.problem || c.u_init != a.u_init);
    }

    #[test]
    fn comparison_instances_have_dominating_first_potential() {
        let config = GeneratorConfig::comparison();
        for seed in 0..8 {
            let inst = random_instance(seed, &config).unwrap();
            let p2 = inst.second_problem.as_ref().unwrap();
            let diff = inst.problem.beta().difference(p2.beta()).unwrap();
            assert!(diff.densities().iter().all(|d| *d >= 0.0));
            assert!(diff.atoms().iter().all(|at| at.weight >= 0.0));
        }
    }

    #[test]
    fn small_campaigns_pass_all_modes() {
        for (mode, config) in [
            (CampaignMode::Isolation, GeneratorConfig::isolation()),
            (CampaignMode::Separation, GeneratorConfig::separation()),
            (CampaignMode::Comparison, GeneratorConfig::comparison()),
            (CampaignMode::Wronskian, GeneratorConfig::wronskian()),
        ] {
            let summary = run_campaign(mode, 8, 7, &config).unwrap();
            assert!(
                summary.pass,
                "{mode} campaign failed: {:?}",
                summary.failures
            );
        }
    }

    #[test]
    fn campaign_is_deterministic() {
        let config = GeneratorConfig::separation();
        let a = run_campaign(CampaignMode::Separation, 5, 11, &config).unwrap();
        let b = run_campaign(CampaignMode::Separation, 5, 11, &config).unwrap();
        assert_eq!(a.clause_counts, b.clause_counts);
        assert_eq!(a.pairs_total, b.pairs_total);
        assert_eq!(a.failures.len(), b.failures.len());
    }
}
