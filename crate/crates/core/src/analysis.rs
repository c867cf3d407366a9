//! Sign-changing points of solutions and the Wronskian objects.
//!
//! For a real solution u of locally bounded variation, a point s is
//! sign-changing when u⁻(s)·u⁺(s) ≤ 0; these generalize zeros. Interior
//! zeros of a segment are extracted in closed form from the
//! sinusoidal/hyperbolic/linear representation, so no root can be missed;
//! atoms are tested through their stored state records. Sign-change
//! verdicts follow the θ criteria: a continuous zero always changes sign,
//! a one-sided zero changes sign exactly when the matching θ is positive,
//! and a strict flip changes sign by definition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::PiecewiseMeasure;
use crate::propagator::{Segment, Side, Solution, State};
use crate::scalar::{lit, Scalar};

/// Relative tolerance declaring a one-sided value "zero" against the local
/// solution scale of the enclosing pieces. Instance generators keep genuine
/// nonzero values far above this boundary.
pub const ZERO_TOL: f64 = 1e-11;

/// How a sign-changing point presents in the one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroKind {
    /// u⁻ = u⁺ = 0 (and then u = 0); occurs only where Δα·v or Δα vanishes.
    ContinuousZero,
    /// u⁻ = 0, u⁺ ≠ 0.
    LeftZero,
    /// u⁺ = 0, u⁻ ≠ 0.
    RightZero,
    /// u⁻·u⁺ < 0.
    StrictFlip,
}

impl std::fmt::Display for ZeroKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ZeroKind::ContinuousZero => "continuous-zero",
            ZeroKind::LeftZero => "left-zero",
            ZeroKind::RightZero => "right-zero",
            ZeroKind::StrictFlip => "strict-flip",
        };
        write!(f, "{s}")
    }
}

/// Which rule decided the sign-change verdict, with the values it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SignChangeCriterion<S> {
    /// u(s) = 0 forces a sign change.
    ContinuousZeroRule,
    /// u⁻(s) = 0: changes sign iff θ_{1−r}(s) > 0.
    LeftLimitRule { theta_complement: S },
    /// u⁺(s) = 0: changes sign iff θ_r(s) > 0.
    RightLimitRule { theta_r: S },
    /// u⁻·u⁺ < 0 changes sign by definition; the window
    /// −r·Δα < u/(du/dα) < (1−r)·Δα is recorded as a cross-check.
    StrictFlipRule {
        ratio: S,
        window_lo: S,
        window_hi: S,
        window_ok: bool,
    },
}

impl<S: Scalar> std::fmt::Display for SignChangeCriterion<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignChangeCriterion::ContinuousZeroRule => write!(f, "u(s)=0"),
            SignChangeCriterion::LeftLimitRule { theta_complement } => {
                write!(f, "theta_(1-r)={theta_complement}")
            }
            SignChangeCriterion::RightLimitRule { theta_r } => write!(f, "theta_r={theta_r}"),
            SignChangeCriterion::StrictFlipRule {
                ratio,
                window_lo,
                window_hi,
                window_ok,
            } => write!(
                f,
                "flip window {window_lo}<{ratio}<{window_hi} ({})",
                if *window_ok { "ok" } else { "violated" }
            ),
        }
    }
}

/// An element of Z(u) with its classification and verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SignChangePoint<S> {
    pub position: S,
    pub kind: ZeroKind,
    pub changes_sign: bool,
    pub criterion: SignChangeCriterion<S>,
    pub left: State<S>,
    pub mid: State<S>,
    pub right: State<S>,
}

/// Which component of the state a root scan targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// The solution value u.
    Value,
    /// The quasi-derivative du/dα.
    QuasiDerivative,
}

/// Interior roots of one component of the closed form on a segment,
/// returned as offsets t ∈ (0, len) from the left edge. Roots within a
/// relative guard of the edges are omitted; they belong to the adjacent
/// node and are classified there.
pub fn segment_roots<S: Scalar>(
    alpha_density: S,
    beta_density: S,
    state_at_lo: &State<S>,
    len: S,
    component: Component,
) -> Vec<S> {
    let (c0, c1) = match component {
        Component::Value => (state_at_lo.u, alpha_density * state_at_lo.v),
        Component::QuasiDerivative => (state_at_lo.v, beta_density * state_at_lo.u),
    };
    let guard = len * lit::<S>(1e-10);
    let t_lo = guard;
    let t_hi = len - guard;
    let mut roots = Vec::new();
    let q = alpha_density * beta_density;

    if beta_density == S::zero() {
        // u is affine, v is constant
        if component == Component::Value && c1 != S::zero() {
            let t = -c0 / c1;
            if t > t_lo && t < t_hi {
                roots.push(t);
            }
        }
        return roots;
    }

    if q < S::zero() {
        let k = (-q).sqrt();
        let a = c0;
        let b = c1 / k;
        if a == S::zero() && b == S::zero() {
            return roots;
        }
        // f(t) = R·cos(k·t − φ): roots at k·t = φ + π/2 + n·π
        let phi = b.atan2(a);
        let base = phi + S::FRAC_PI_2();
        let pi = S::PI();
        let n_min = ((k * t_lo - base) / pi).ceil();
        let n_max = ((k * t_hi - base) / pi).floor();
        let mut n = n_min;
        while n <= n_max {
            let t = (base + n * pi) / k;
            if t > t_lo && t < t_hi {
                roots.push(t);
            }
            n = n + S::one();
        }
    } else if q > S::zero() {
        let k = q.sqrt();
        let a = c0;
        let b = c1 / k;
        // a·cosh + b·sinh has a root only when |a| < |b|
        if a.abs() < b.abs() {
            let ratio = -a / b;
            let t = ratio.atanh() / k;
            if t > t_lo && t < t_hi {
                roots.push(t);
            }
        }
    }
    roots
}

/// A magnitude representative of a component over a segment, used as the
/// denominator of the relative zero-detection tolerance.
fn segment_scale<S: Scalar>(seg: &Segment<S>, component: Component) -> S {
    let len = seg.length();
    let end = seg.state_at(len);
    let (f_lo, f_hi, g_lo, g_hi, coef) = match component {
        Component::Value => (
            seg.state_at_lo.u,
            end.u,
            seg.state_at_lo.v,
            end.v,
            seg.alpha_density,
        ),
        Component::QuasiDerivative => (
            seg.state_at_lo.v,
            end.v,
            seg.state_at_lo.u,
            end.u,
            seg.beta_density,
        ),
    };
    let mut scale = f_lo
        .abs()
        .max(f_hi.abs())
        .max((coef * g_lo * len).abs())
        .max((coef * g_hi * len).abs());
    let q = seg.alpha_density * seg.beta_density;
    if q < S::zero() {
        let k = (-q).sqrt();
        scale = scale.max(f_lo.hypot(coef * g_lo / k));
    }
    scale.max(S::min_positive_value())
}

fn node_scale<S: Scalar>(sol: &Solution<S>, node: usize, component: Component) -> S {
    let left = segment_scale(&sol.segment(node), component);
    let right = segment_scale(&sol.segment(node + 1), component);
    left.max(right)
}

fn classify_node<S: Scalar>(sol: &Solution<S>, node: usize) -> Option<SignChangePoint<S>> {
    let rec = sol.node_record(node);
    let tol = lit::<S>(ZERO_TOL) * node_scale(sol, node, Component::Value);
    let zl = rec.left.u.abs() <= tol;
    let zr = rec.right.u.abs() <= tol;
    let r = sol.problem().r();
    let (kind, changes_sign, criterion) = match (zl, zr) {
        (true, true) => (
            ZeroKind::ContinuousZero,
            true,
            SignChangeCriterion::ContinuousZeroRule,
        ),
        (true, false) => {
            let theta_complement = sol
                .problem()
                .theta_complement(rec.position)
                .expect("node position lies inside the interval");
            (
                ZeroKind::LeftZero,
                theta_complement > S::zero(),
                SignChangeCriterion::LeftLimitRule { theta_complement },
            )
        }
        (false, true) => {
            let theta_r = sol
                .problem()
                .theta_r(rec.position)
                .expect("node position lies inside the interval");
            (
                ZeroKind::RightZero,
                theta_r > S::zero(),
                SignChangeCriterion::RightLimitRule { theta_r },
            )
        }
        (false, false) => {
            if rec.left.u * rec.right.u < S::zero() {
                let ratio = rec.mid.u / rec.mid.v;
                let window_lo = -r * rec.delta_alpha;
                let window_hi = (S::one() - r) * rec.delta_alpha;
                let window_ok = window_lo < ratio && ratio < window_hi;
                (
                    ZeroKind::StrictFlip,
                    true,
                    SignChangeCriterion::StrictFlipRule {
                        ratio,
                        window_lo,
                        window_hi,
                        window_ok,
                    },
                )
            } else {
                return None;
            }
        }
    };
    Some(SignChangePoint {
        position: rec.position,
        kind,
        changes_sign,
        criterion,
        left: rec.left,
        mid: rec.mid,
        right: rec.right,
    })
}

/// Classifies an arbitrary point of (a, b): `Some` iff it belongs to Z(u).
pub fn classify_point<S: Scalar>(sol: &Solution<S>, x: S) -> Result<Option<SignChangePoint<S>>> {
    if sol.is_trivial() {
        return Err(Error::TrivialSolution);
    }
    sol.interval().check_contains(x)?;
    if let Some(i) = sol.node_index(x) {
        return Ok(classify_node(sol, i));
    }
    let piece = sol.piece_of(x);
    let seg = sol.segment(piece);
    let state = seg.state_at(x - seg.x_lo);
    let tol = lit::<S>(ZERO_TOL) * segment_scale(&seg, Component::Value);
    if state.u.abs() <= tol {
        Ok(Some(SignChangePoint {
            position: x,
            kind: ZeroKind::ContinuousZero,
            changes_sign: true,
            criterion: SignChangeCriterion::ContinuousZeroRule,
            left: state,
            mid: state,
            right: state,
        }))
    } else {
        Ok(None)
    }
}

/// All sign-changing points of u in [lo, hi], sorted. The list is finite:
/// each segment contributes at most a lattice of closed-form roots (one in
/// the non-oscillatory cases) and each atom at most one point.
pub fn find_sign_changes<S: Scalar>(
    sol: &Solution<S>,
    lo: S,
    hi: S,
) -> Result<Vec<SignChangePoint<S>>> {
    if sol.is_trivial() {
        return Err(Error::TrivialSolution);
    }
    sol.interval().check_contains(lo)?;
    sol.interval().check_contains(hi)?;
    if lo > hi {
        return Err(Error::InvalidBounds {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut points: Vec<SignChangePoint<S>> = Vec::new();
    let first = sol.piece_of(lo);
    let last = sol.piece_of(hi);
    for i in first..=last {
        let seg = sol.segment(i);
        for t in segment_roots(
            seg.alpha_density,
            seg.beta_density,
            &seg.state_at_lo,
            seg.length(),
            Component::Value,
        ) {
            let x = seg.x_lo + t;
            if x < lo || x > hi {
                continue;
            }
            let state = seg.state_at(t);
            points.push(SignChangePoint {
                position: x,
                kind: ZeroKind::ContinuousZero,
                changes_sign: true,
                criterion: SignChangeCriterion::ContinuousZeroRule,
                left: state,
                mid: state,
                right: state,
            });
        }
    }
    for i in 0..sol.n_nodes() {
        let x = sol.node_record(i).position;
        if x < lo || x > hi {
            continue;
        }
        if let Some(p) = classify_node(sol, i) {
            points.push(p);
        }
    }
    points.sort_by(|p, q| p.position.partial_cmp(&q.position).expect("finite"));
    Ok(points)
}

/// Sign-change verdict at a point of Z(u), with the rule that decided it.
pub fn changes_sign_at<S: Scalar>(
    sol: &Solution<S>,
    s: S,
) -> Result<(bool, SignChangeCriterion<S>)> {
    match classify_point(sol, s)? {
        Some(p) => Ok((p.changes_sign, p.criterion)),
        None => Err(Error::Precondition(format!(
            "{s} is not a sign-changing point of the solution"
        ))),
    }
}

/// Some x ∈ [s, t] with (du/dα)⁻(x)·(du/dα)⁺(x) ≤ 0, for s < t both in Z(u).
pub fn mean_value_witness<S: Scalar>(sol: &Solution<S>, s: S, t: S) -> Result<S> {
    if s.is_nan() || t.is_nan() || s >= t {
        return Err(Error::Precondition(format!(
            "witness requires s < t, got s={s}, t={t}"
        )));
    }
    if classify_point(sol, s)?.is_none() || classify_point(sol, t)?.is_none() {
        return Err(Error::Precondition(
            "both endpoints must be sign-changing points of u".into(),
        ));
    }
    let mut best: Option<S> = None;
    let mut consider = |x: S| {
        if x >= s && x <= t {
            best = Some(match best {
                Some(b) if b <= x => b,
                _ => x,
            });
        }
    };
    let first = sol.piece_of(s);
    let last = sol.piece_of(t);
    for i in first..=last {
        let seg = sol.segment(i);
        let v_scale = segment_scale(&seg, Component::QuasiDerivative);
        let tol = lit::<S>(ZERO_TOL) * v_scale;
        if seg.beta_density == S::zero() && seg.state_at_lo.v.abs() <= tol {
            // v vanishes identically on the piece: any interior point works
            let olo = if s > seg.x_lo { s } else { seg.x_lo };
            let ohi = if t < seg.x_hi { t } else { seg.x_hi };
            consider((olo + ohi) / lit::<S>(2.0));
            continue;
        }
        for dt in segment_roots(
            seg.alpha_density,
            seg.beta_density,
            &seg.state_at_lo,
            seg.length(),
            Component::QuasiDerivative,
        ) {
            consider(seg.x_lo + dt);
        }
    }
    for i in 0..sol.n_nodes() {
        let rec = sol.node_record(i);
        if rec.position < s || rec.position > t {
            continue;
        }
        let tol = lit::<S>(ZERO_TOL) * node_scale(sol, i, Component::QuasiDerivative);
        let vl = rec.left.v;
        let vr = rec.right.v;
        if vl * vr < S::zero() || vl.abs() <= tol || vr.abs() <= tol {
            consider(rec.position);
        }
    }
    best.ok_or_else(|| {
        Error::Internal(format!(
            "no sign-changing point of du/dα found in [{s}, {t}]"
        ))
    })
}

/// The Wronskian W\[u,v\] = u·(dv/dα) − v·(du/dα) evaluated from the balanced
/// and one-sided representatives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WronskianTriple<S> {
    pub mid: S,
    pub left: S,
    pub right: S,
}

fn wronskian_of<S: Scalar>(u: &State<S>, v: &State<S>) -> S {
    u.u * v.v - v.u * u.v
}

/// W, W⁻, W⁺ of two solutions of the same problem at x. At every point
/// W = W⁻/θ_{1−r} = W⁺/θ_r (both θ equal one away from atoms).
pub fn wronskian<S: Scalar>(
    u_sol: &Solution<S>,
    v_sol: &Solution<S>,
    x: S,
) -> Result<WronskianTriple<S>> {
    if u_sol.problem() != v_sol.problem() {
        return Err(Error::MismatchedProblems);
    }
    Ok(WronskianTriple {
        mid: wronskian_of(
            &u_sol.evaluate(x, Side::Mid)?,
            &v_sol.evaluate(x, Side::Mid)?,
        ),
        left: wronskian_of(
            &u_sol.evaluate(x, Side::Left)?,
            &v_sol.evaluate(x, Side::Left)?,
        ),
        right: wronskian_of(
            &u_sol.evaluate(x, Side::Right)?,
            &v_sol.evaluate(x, Side::Right)?,
        ),
    })
}

/// The measure dγ = (1−2r)·Δ_{dα}/θ_{1−r} · dβ driving dW⁻ = W⁻·dγ.
///
/// It is purely atomic: the density factor carries Δ_{dα}, which vanishes
/// away from atoms, so only common atoms of dα and dβ contribute, with
/// weight (1−2r)·Δα·Δβ/θ_{1−r} and 1 + Δγ = θ there.
pub fn wronskian_jump_measure<S: Scalar>(
    problem: &crate::measure::Problem<S>,
) -> Result<PiecewiseMeasure<S>> {
    problem.require_hypothesis()?;
    let one_minus_2r = S::one() - lit::<S>(2.0) * problem.r();
    let mut atoms = Vec::new();
    for s in problem.atom_positions() {
        let da = problem.alpha().delta_unchecked(s);
        let db = problem.beta().delta_unchecked(s);
        let theta_complement = problem.theta_complement(s)?;
        let w = one_minus_2r * da * db / theta_complement;
        if w != S::zero() {
            atoms.push(crate::measure::Atom::new(s, w));
        }
    }
    PiecewiseMeasure::new(problem.interval(), Vec::new(), vec![S::zero()], atoms)
}

/// W⁻(x)·∏ θ(t) over atoms t ∈ [x, y); equals the directly computed W⁻(y).
pub fn wronskian_product<S: Scalar>(
    u_sol: &Solution<S>,
    v_sol: &Solution<S>,
    x: S,
    y: S,
) -> Result<S> {
    if x.is_nan() || y.is_nan() || x >= y {
        return Err(Error::InvalidBounds {
            lo: x.to_f64().unwrap_or(f64::NAN),
            hi: y.to_f64().unwrap_or(f64::NAN),
        });
    }
    let w_minus = wronskian(u_sol, v_sol, x)?.left;
    let mut product = S::one();
    for s in u_sol.problem().atom_positions() {
        if s >= x && s < y {
            product = product * u_sol.problem().theta_ratio(s)?;
        }
    }
    Ok(w_minus * product)
}

/// The modified Wronskian W̃\[v,u\] = v·(du/dα) − u·(dv/dα) for balanced
/// solutions of two equations sharing dα (u with dβ₁, v with dβ₂); its
/// derivative is the measure u·v·d(β₁−β₂).
pub fn modified_wronskian<S: Scalar>(
    v_sol: &Solution<S>,
    u_sol: &Solution<S>,
    x: S,
    side: Side,
) -> Result<S> {
    let half = lit::<S>(0.5);
    if u_sol.problem().r() != half || v_sol.problem().r() != half {
        return Err(Error::UnsupportedMode(
            "modified Wronskian requires r = 1/2".into(),
        ));
    }
    if u_sol.problem().alpha() != v_sol.problem().alpha() {
        return Err(Error::MismatchedProblems);
    }
    let u = u_sol.evaluate(x, side)?;
    let v = v_sol.evaluate(x, side)?;
    Ok(v.u * u.v - u.u * v.v)
}
