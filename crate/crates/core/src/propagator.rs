//! Exact propagation of the homogeneous equation −d(du/dα) + u·dβ = 0.
//!
//! Between atoms the coefficients are constant densities (dα = A·dx,
//! dβ = B·dx with A > 0), where the first-order system u′ = A·v, v′ = B·u
//! has the closed-form flow implemented by [`ac_flow`]. At an atom the
//! one-sided limits and the r-balanced value are related by exact 2×2 jump
//! matrices ([`jump_right`], [`jump_left`]); crossing an atom composes one
//! inverse with one forward jump ([`cross_atom`]). A [`Solution`] is the
//! resulting piecewise closed form plus the per-atom (left, mid, right)
//! state records, evaluable anywhere with one-sided limits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Interval, Problem};
use crate::scalar::{as_f64, lit, Scalar};

/// Which representative of a locally-BV function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Mid,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Mid => write!(f, "mid"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// The system state (u, du/dα) at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State<S> {
    pub u: S,
    pub v: S,
}

impl<S: Scalar> State<S> {
    pub fn new(u: S, v: S) -> Self {
        Self { u, v }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.u == S::zero() && self.v == S::zero()
    }

    pub fn max_norm(&self) -> S {
        self.u.abs().max(self.v.abs())
    }

    pub fn scale(&self, c: S) -> Self {
        Self::new(c * self.u, c * self.v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.u + other.u, self.v + other.v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.u - other.u, self.v - other.v)
    }
}

/// Even/odd basis of the constant-coefficient flow.
///
/// With q = A·B·t², `c` is cosh(k·t) for q > 0, cos(k·t) for q < 0 and 1 for
/// q = 0; `s` is sinh(k·t)/k, sin(k·t)/k and t respectively (k = √|A·B|).
/// Both are entire in q, so a single truncated series covers the
/// near-degenerate region |k·t| < 1e−6 without cancellation as B → 0.
fn flow_basis<S: Scalar>(ab: S, t: S) -> (S, S) {
    let q = ab * t * t;
    if q.abs() < lit::<S>(1e-12) {
        // 4th-order expansion in k·t
        let c = S::one() + q / lit::<S>(2.0) + q * q / lit::<S>(24.0);
        let s = t * (S::one() + q / lit::<S>(6.0) + q * q / lit::<S>(120.0));
        (c, s)
    } else if q > S::zero() {
        let k = ab.sqrt();
        let kt = k * t;
        (kt.cosh(), kt.sinh() / k)
    } else {
        let k = (-ab).sqrt();
        let kt = k * t;
        (kt.cos(), kt.sin() / k)
    }
}

/// Flow of u′ = A·v, v′ = B·u over a signed distance `dx` (A > 0).
///
/// The flow matrix has determinant one, so `dx < 0` is the exact inverse of
/// the forward flow and leftward propagation needs no separate code path.
pub fn ac_flow<S: Scalar>(a_density: S, b_density: S, dx: S, s: &State<S>) -> Result<State<S>> {
    if a_density <= S::zero() {
        return Err(Error::NonPositiveDensity {
            value: as_f64(a_density),
        });
    }
    let (c, sh) = flow_basis(a_density * b_density, dx);
    Ok(State::new(
        c * s.u + a_density * sh * s.v,
        b_density * sh * s.u + c * s.v,
    ))
}

/// One-sided limits from the balanced value: (u⁺, v⁺) in terms of (u, v).
///
/// u⁺ = u + r·Δα·v, v⁺ = v + r·Δβ·u; the matrix determinant is θ_r.
pub fn jump_right<S: Scalar>(r: S, da: S, db: S, mid: &State<S>) -> State<S> {
    State::new(mid.u + r * da * mid.v, mid.v + r * db * mid.u)
}

/// One-sided limits from the balanced value: (u⁻, v⁻) in terms of (u, v).
///
/// u⁻ = u − (1−r)·Δα·v, v⁻ = v − (1−r)·Δβ·u; the matrix determinant is θ_{1−r}.
pub fn jump_left<S: Scalar>(r: S, da: S, db: S, mid: &State<S>) -> State<S> {
    let rc = S::one() - r;
    State::new(mid.u - rc * da * mid.v, mid.v - rc * db * mid.u)
}

fn theta_error<S: Scalar>(r: S, da: S, db: S) -> Error {
    Error::HypothesisViolation {
        position: f64::NAN,
        theta_r: as_f64(S::one() - r * r * da * db),
        theta_complement: as_f64({
            let rc = S::one() - r;
            S::one() - rc * rc * da * db
        }),
    }
}

/// Recovers the balanced value from the left limit (inverse of [`jump_left`]).
pub fn mid_from_left<S: Scalar>(r: S, da: S, db: S, left: &State<S>) -> Result<State<S>> {
    let rc = S::one() - r;
    let det = S::one() - rc * rc * da * db;
    if det == S::zero() {
        return Err(theta_error(r, da, db));
    }
    Ok(State::new(
        (left.u + rc * da * left.v) / det,
        (rc * db * left.u + left.v) / det,
    ))
}

/// Recovers the balanced value from the right limit (inverse of [`jump_right`]).
pub fn mid_from_right<S: Scalar>(r: S, da: S, db: S, right: &State<S>) -> Result<State<S>> {
    let det = S::one() - r * r * da * db;
    if det == S::zero() {
        return Err(theta_error(r, da, db));
    }
    Ok(State::new(
        (right.u - r * da * right.v) / det,
        (-r * db * right.u + right.v) / det,
    ))
}

/// Left limit → (balanced value, right limit) across an atom with jumps
/// (Δα, Δβ) = (da, db). Requires θ_{1−r} ≠ 0.
pub fn cross_atom<S: Scalar>(r: S, da: S, db: S, left: &State<S>) -> Result<(State<S>, State<S>)> {
    let mid = mid_from_left(r, da, db, left)?;
    Ok((mid, jump_right(r, da, db, &mid)))
}

/// Right limit → (balanced value, left limit); the inverse crossing.
/// Requires θ_r ≠ 0.
pub fn cross_atom_from_right<S: Scalar>(
    r: S,
    da: S,
    db: S,
    right: &State<S>,
) -> Result<(State<S>, State<S>)> {
    let mid = mid_from_right(r, da, db, right)?;
    Ok((mid, jump_left(r, da, db, &mid)))
}

/// Merged partition of (a, b): interior nodes (breakpoints of α or β, with
/// their atom weights) and per-piece constant densities.
#[derive(Debug, Clone, Serialize)]
pub(crate) struct Grid<S> {
    interval: Interval<S>,
    node_xs: Vec<S>,
    node_da: Vec<S>,
    node_db: Vec<S>,
    piece_a: Vec<S>,
    piece_b: Vec<S>,
}

impl<S: Scalar> Grid<S> {
    fn build(problem: &Problem<S>) -> Self {
        let interval = problem.interval();
        let mut xs: Vec<S> = problem
            .alpha()
            .breakpoints()
            .iter()
            .chain(problem.beta().breakpoints().iter())
            .copied()
            .collect();
        xs.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        xs.dedup();

        let mut edges = Vec::with_capacity(xs.len() + 2);
        edges.push(interval.a());
        edges.extend_from_slice(&xs);
        edges.push(interval.b());

        let two = lit::<S>(2.0);
        let mut piece_a = Vec::with_capacity(edges.len() - 1);
        let mut piece_b = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let m = (w[0] + w[1]) / two;
            piece_a.push(problem.alpha().density_at(m));
            piece_b.push(problem.beta().density_at(m));
        }
        let node_da: Vec<S> = xs
            .iter()
            .map(|&x| problem.alpha().delta_unchecked(x))
            .collect();
        let node_db: Vec<S> = xs
            .iter()
            .map(|&x| problem.beta().delta_unchecked(x))
            .collect();
        Self {
            interval,
            node_xs: xs,
            node_da,
            node_db,
            piece_a,
            piece_b,
        }
    }

    pub(crate) fn n_pieces(&self) -> usize {
        self.piece_a.len()
    }

    pub(crate) fn n_nodes(&self) -> usize {
        self.node_xs.len()
    }

    pub(crate) fn node_x(&self, i: usize) -> S {
        self.node_xs[i]
    }

    pub(crate) fn node_deltas(&self, i: usize) -> (S, S) {
        (self.node_da[i], self.node_db[i])
    }

    pub(crate) fn piece_densities(&self, i: usize) -> (S, S) {
        (self.piece_a[i], self.piece_b[i])
    }

    /// Boundaries of piece `i`, the outermost pieces ending at a and b.
    pub(crate) fn piece_bounds(&self, i: usize) -> (S, S) {
        let lo = if i == 0 {
            self.interval.a()
        } else {
            self.node_xs[i - 1]
        };
        let hi = if i == self.node_xs.len() {
            self.interval.b()
        } else {
            self.node_xs[i]
        };
        (lo, hi)
    }

    /// Index of the piece whose closure contains x; at a node, the piece to
    /// its right.
    pub(crate) fn piece_of(&self, x: S) -> usize {
        self.node_xs.partition_point(|&p| p <= x)
    }

    pub(crate) fn node_index(&self, x: S) -> Option<usize> {
        self.node_xs
            .binary_search_by(|p| p.partial_cmp(&x).expect("finite"))
            .ok()
    }
}

/// One absolutely continuous piece of a solution: constant densities (A, B)
/// on (x_lo, x_hi) and the state at the left edge (its right-limit values),
/// from which the closed form reconstructs the solution anywhere inside.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Segment<S> {
    pub x_lo: S,
    pub x_hi: S,
    pub alpha_density: S,
    pub beta_density: S,
    pub state_at_lo: State<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn length(&self) -> S {
        self.x_hi - self.x_lo
    }

    /// State at x_lo + t for t ∈ [0, length].
    pub fn state_at(&self, t: S) -> State<S> {
        ac_flow(self.alpha_density, self.beta_density, t, &self.state_at_lo)
            .expect("segment density is positive")
    }
}

/// The (left, mid, right) states recorded at an atom, satisfying the
/// r-balanced identity and both jump relations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AtomRecord<S> {
    pub position: S,
    pub delta_alpha: S,
    pub delta_beta: S,
    pub left: State<S>,
    pub mid: State<S>,
    pub right: State<S>,
}

/// A globally propagated solution: piecewise closed-form segments plus
/// per-node state triples, evaluable anywhere in (a, b) with one-sided
/// limits. Immutable after construction.
#[derive(Debug, Clone, Serialize)]
pub struct Solution<S> {
    problem: Problem<S>,
    grid: Grid<S>,
    piece_states: Vec<State<S>>,
    node_left: Vec<State<S>>,
    node_mid: Vec<State<S>>,
    node_right: Vec<State<S>>,
    x0: S,
    initial: State<S>,
}

/// Solves the initial value problem with data (u0, v0) at x0, interpreted as
/// the r-balanced values when x0 carries an atom.
///
/// Propagation runs from x0 to both endpoints: [`ac_flow`] over pieces and
/// [`cross_atom`] (or its inverse, going leftward) at nodes. Requires the
/// solvability hypothesis; see [`Problem::check_hypothesis`].
pub fn solve_ivp<S: Scalar>(problem: &Problem<S>, x0: S, u0: S, v0: S) -> Result<Solution<S>> {
    problem.interval().check_contains(x0)?;
    problem.require_hypothesis()?;
    if !u0.is_finite() || !v0.is_finite() {
        return Err(Error::InvalidProblem("non-finite initial data".into()));
    }

    let grid = Grid::build(problem);
    let r = problem.r();
    let n_pieces = grid.n_pieces();
    let n_nodes = grid.n_nodes();
    let mut piece_states = vec![State::zero(); n_pieces];
    let mut node_left = vec![State::zero(); n_nodes];
    let mut node_mid = vec![State::zero(); n_nodes];
    let mut node_right = vec![State::zero(); n_nodes];

    let initial = State::new(u0, v0);

    // (piece index, position, state) seeds for both sweep directions
    let (right_seed, left_seed) = if let Some(i) = grid.node_index(x0) {
        let (da, db) = grid.node_deltas(i);
        node_mid[i] = initial;
        node_right[i] = jump_right(r, da, db, &initial);
        node_left[i] = jump_left(r, da, db, &initial);
        ((i + 1, x0, node_right[i]), (i, x0, node_left[i]))
    } else {
        let j = grid.piece_of(x0);
        ((j, x0, initial), (j, x0, initial))
    };

    // rightward sweep: state is a right-limit at `pos`
    {
        let (mut piece, mut pos, mut state) = right_seed;
        while piece < n_pieces {
            let (lo, hi) = grid.piece_bounds(piece);
            // anchor the segment at its left edge
            let (a, b) = grid.piece_densities(piece);
            piece_states[piece] = ac_flow(a, b, lo - pos, &state)?;
            if piece == n_pieces - 1 {
                break;
            }
            let at_node = ac_flow(a, b, hi - pos, &state)?;
            let (da, db) = grid.node_deltas(piece);
            let (mid, right) = cross_atom(r, da, db, &at_node)?;
            node_left[piece] = at_node;
            node_mid[piece] = mid;
            node_right[piece] = right;
            piece += 1;
            pos = hi;
            state = right;
        }
    }

    // leftward sweep: state is a left-limit at `pos`
    {
        let (mut piece, mut pos, mut state) = left_seed;
        loop {
            let (lo, _) = grid.piece_bounds(piece);
            let (a, b) = grid.piece_densities(piece);
            piece_states[piece] = ac_flow(a, b, lo - pos, &state)?;
            if piece == 0 {
                break;
            }
            let node = piece - 1;
            let at_node = piece_states[piece];
            let (da, db) = grid.node_deltas(node);
            let (mid, left) = cross_atom_from_right(r, da, db, &at_node)?;
            node_right[node] = at_node;
            node_mid[node] = mid;
            node_left[node] = left;
            piece -= 1;
            pos = lo;
            state = left;
        }
    }

    // The seed overrode one direction's node states when x0 is a node; both
    // sweeps agree there by construction, but restore the exact seed values.
    if let Some(i) = grid.node_index(x0) {
        let (da, db) = grid.node_deltas(i);
        node_mid[i] = initial;
        node_right[i] = jump_right(r, da, db, &initial);
        node_left[i] = jump_left(r, da, db, &initial);
    }

    Ok(Solution {
        problem: problem.clone(),
        grid,
        piece_states,
        node_left,
        node_mid,
        node_right,
        x0,
        initial,
    })
}

impl<S: Scalar> Solution<S> {
    pub fn problem(&self) -> &Problem<S> {
        &self.problem
    }

    pub fn interval(&self) -> Interval<S> {
        self.problem.interval()
    }

    pub fn x0(&self) -> S {
        self.x0
    }

    pub fn initial_state(&self) -> State<S> {
        self.initial
    }

    pub fn is_trivial(&self) -> bool {
        self.initial.is_zero()
    }

    /// Evaluate the solution at x. Away from atoms all sides agree; at an
    /// atom the stored record is returned.
    pub fn evaluate(&self, x: S, side: Side) -> Result<State<S>> {
        self.interval().check_contains(x)?;
        if let Some(i) = self.grid.node_index(x) {
            return Ok(match side {
                Side::Left => self.node_left[i],
                Side::Mid => self.node_mid[i],
                Side::Right => self.node_right[i],
            });
        }
        let piece = self.grid.piece_of(x);
        let (lo, _) = self.grid.piece_bounds(piece);
        let (a, b) = self.grid.piece_densities(piece);
        ac_flow(a, b, x - lo, &self.piece_states[piece])
    }

    pub fn n_segments(&self) -> usize {
        self.grid.n_pieces()
    }

    /// The i-th absolutely continuous piece with its closed-form anchor.
    pub fn segment(&self, i: usize) -> Segment<S> {
        let (lo, hi) = self.grid.piece_bounds(i);
        let (a, b) = self.grid.piece_densities(i);
        Segment {
            x_lo: lo,
            x_hi: hi,
            alpha_density: a,
            beta_density: b,
            state_at_lo: self.piece_states[i],
        }
    }

    pub fn segments(&self) -> Vec<Segment<S>> {
        (0..self.n_segments()).map(|i| self.segment(i)).collect()
    }

    pub(crate) fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    pub(crate) fn node_record(&self, i: usize) -> AtomRecord<S> {
        let (da, db) = self.grid.node_deltas(i);
        AtomRecord {
            position: self.grid.node_x(i),
            delta_alpha: da,
            delta_beta: db,
            left: self.node_left[i],
            mid: self.node_mid[i],
            right: self.node_right[i],
        }
    }

    pub(crate) fn node_index(&self, x: S) -> Option<usize> {
        self.grid.node_index(x)
    }

    pub(crate) fn piece_of(&self, x: S) -> usize {
        self.grid.piece_of(x)
    }

    /// State records at the atoms of the problem, in position order.
    pub fn atom_records(&self) -> Vec<AtomRecord<S>> {
        (0..self.n_nodes())
            .map(|i| self.node_record(i))
            .filter(|rec| rec.delta_alpha != S::zero() || rec.delta_beta != S::zero())
            .collect()
    }
}
