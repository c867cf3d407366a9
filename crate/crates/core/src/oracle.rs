//! Independent numerical cross-checks for the exact propagator.
//!
//! Two alternate solvers reuse only the atom jump matrices (those are forced
//! verbatim by the jump relations; the computation the oracles re-derive is
//! the flow on absolutely continuous pieces): a classical fourth-order
//! one-step integrator and a truncated Picard iteration on the system's
//! integral equations. A third check evaluates the Wronskian jump-factor
//! series against its product form.

use crate::error::{Error, Result};
use crate::measure::{PiecewiseMeasure, Problem};
use crate::propagator::{
    cross_atom, cross_atom_from_right, jump_left, jump_right, Side, Solution, State,
};
use crate::scalar::{lit, Scalar};

/// A state sample tagged with its position and side.
#[derive(Debug, Clone, Copy)]
pub struct SampledState<S> {
    pub x: S,
    pub side: Side,
    pub state: State<S>,
}

fn rk4_step<S: Scalar>(a: S, b: S, h: S, s: &State<S>) -> State<S> {
    let f = |st: &State<S>| State::new(a * st.v, b * st.u);
    let half = lit::<S>(0.5);
    let sixth = S::one() / lit::<S>(6.0);
    let two = lit::<S>(2.0);
    let k1 = f(s);
    let k2 = f(&s.add(&k1.scale(half * h)));
    let k3 = f(&s.add(&k2.scale(half * h)));
    let k4 = f(&s.add(&k3.scale(h)));
    s.add(
        &k1.add(&k2.scale(two))
            .add(&k3.scale(two))
            .add(&k4)
            .scale(h * sixth),
    )
}

fn rk4_span<S: Scalar>(a: S, b: S, span: S, steps: usize, s: &State<S>) -> State<S> {
    let h = span / S::from_usize(steps).expect("step count fits scalar");
    let mut state = *s;
    for _ in 0..steps {
        state = rk4_step(a, b, h, &state);
    }
    state
}

/// Integrates u′ = A·v, v′ = B·u piecewise with a fixed-step classical
/// fourth-order method, crossing atoms with the exact jump algebra; returns
/// states at piece boundaries and atom sides, propagated from x0 to both
/// interval ends.
pub fn onestep_solve<S: Scalar>(
    problem: &Problem<S>,
    x0: S,
    u0: S,
    v0: S,
    steps_per_piece: usize,
) -> Result<Vec<SampledState<S>>> {
    if steps_per_piece == 0 {
        return Err(Error::Precondition("steps_per_piece must be ≥ 1".into()));
    }
    problem.interval().check_contains(x0)?;
    problem.require_hypothesis()?;
    // the exact solution is only used for its grid layout
    let skeleton = crate::propagator::solve_ivp(problem, x0, u0, v0)?;
    let r = problem.r();
    let mut samples = Vec::new();

    let (mut start_right, mut start_left) = (State::new(u0, v0), State::new(u0, v0));
    if let Some(i) = skeleton.node_index(x0) {
        let rec = skeleton.node_record(i);
        start_right = jump_right(r, rec.delta_alpha, rec.delta_beta, &State::new(u0, v0));
        start_left = jump_left(r, rec.delta_alpha, rec.delta_beta, &State::new(u0, v0));
        samples.push(SampledState {
            x: x0,
            side: Side::Left,
            state: start_left,
        });
        samples.push(SampledState {
            x: x0,
            side: Side::Right,
            state: start_right,
        });
    }
    samples.push(SampledState {
        x: x0,
        side: Side::Mid,
        state: State::new(u0, v0),
    });

    // rightward: piece_of already names the piece right of a node
    {
        let mut piece = skeleton.piece_of(x0);
        let mut pos = x0;
        let mut state = start_right;
        loop {
            let seg = skeleton.segment(piece);
            let span = seg.x_hi - pos;
            let frac = span / seg.length();
            let steps = ((lit::<S>(steps_per_piece as f64) * frac)
                .ceil()
                .to_usize()
                .unwrap_or(steps_per_piece))
            .max(1);
            state = rk4_span(seg.alpha_density, seg.beta_density, span, steps, &state);
            if piece + 1 >= skeleton.n_segments() {
                break;
            }
            // crossing the node at seg.x_hi
            let node = piece;
            let rec = skeleton.node_record(node);
            samples.push(SampledState {
                x: rec.position,
                side: Side::Left,
                state,
            });
            let (mid, right) = cross_atom(r, rec.delta_alpha, rec.delta_beta, &state)?;
            samples.push(SampledState {
                x: rec.position,
                side: Side::Mid,
                state: mid,
            });
            samples.push(SampledState {
                x: rec.position,
                side: Side::Right,
                state: right,
            });
            state = right;
            pos = rec.position;
            piece += 1;
        }
    }

    // leftward: when x0 carries a node the sweep starts in the piece to its
    // left, seeded with the left limit
    {
        let mut piece = match skeleton.node_index(x0) {
            Some(i) => i,
            None => skeleton.piece_of(x0),
        };
        let mut pos = x0;
        let mut state = start_left;
        loop {
            let seg = skeleton.segment(piece);
            let span = seg.x_lo - pos; // negative
            let frac = -span / seg.length();
            let steps = ((lit::<S>(steps_per_piece as f64) * frac)
                .ceil()
                .to_usize()
                .unwrap_or(steps_per_piece))
            .max(1);
            state = rk4_span(seg.alpha_density, seg.beta_density, span, steps, &state);
            if piece == 0 {
                break;
            }
            let node = piece - 1;
            let rec = skeleton.node_record(node);
            samples.push(SampledState {
                x: rec.position,
                side: Side::Right,
                state,
            });
            let (mid, left) = cross_atom_from_right(r, rec.delta_alpha, rec.delta_beta, &state)?;
            samples.push(SampledState {
                x: rec.position,
                side: Side::Mid,
                state: mid,
            });
            samples.push(SampledState {
                x: rec.position,
                side: Side::Left,
                state: left,
            });
            state = left;
            pos = rec.position;
            piece -= 1;
        }
    }

    samples.sort_by(|p, q| p.x.partial_cmp(&q.x).expect("finite"));
    Ok(samples)
}

/// Truncated Picard iteration for the system's integral equations on a
/// compact window [c, d] ∋ x0, with composite trapezoid quadrature on the
/// absolutely continuous parts and exact atom contributions.
///
/// Atoms strictly between x0 and the evaluation point contribute their full
/// weight times the balanced value there; at an atom node itself the new
/// iterate is recovered from the accumulated one-sided limit through the
/// exact inverse jump matrix. Evaluating the balanced value directly from a
/// partial self-weight would diverge for large jumps, so the update keeps a
/// strictly causal structure instead. x0 must not carry an atom.
pub fn picard_solve<S: Scalar>(
    problem: &Problem<S>,
    x0: S,
    u0: S,
    v0: S,
    iterations: usize,
    mesh: usize,
    window: (S, S),
) -> Result<Vec<SampledState<S>>> {
    let (c, d) = window;
    if c.is_nan()
        || d.is_nan()
        || c >= d
        || !problem.interval().contains(c)
        || !problem.interval().contains(d)
    {
        return Err(Error::InvalidBounds {
            lo: c.to_f64().unwrap_or(f64::NAN),
            hi: d.to_f64().unwrap_or(f64::NAN),
        });
    }
    if x0 < c || x0 > d {
        return Err(Error::Precondition(
            "picard window must contain the initial point".into(),
        ));
    }
    if mesh < 2 {
        return Err(Error::Precondition("mesh must be ≥ 2".into()));
    }
    problem.require_hypothesis()?;
    let alpha = problem.alpha();
    let beta = problem.beta();
    if alpha.delta_unchecked(x0) != S::zero() || beta.delta_unchecked(x0) != S::zero() {
        return Err(Error::Precondition(
            "picard initial point must not carry an atom".into(),
        ));
    }

    // mesh: uniform nodes plus breakpoints, atoms and x0
    let mut xs: Vec<S> = Vec::with_capacity(mesh + 16);
    let n = S::from_usize(mesh - 1).expect("mesh fits scalar");
    for i in 0..mesh {
        let fi = S::from_usize(i).expect("index fits scalar");
        xs.push(c + (d - c) * fi / n);
    }
    for &bp in alpha.breakpoints().iter().chain(beta.breakpoints().iter()) {
        if bp > c && bp < d {
            xs.push(bp);
        }
    }
    xs.push(x0);
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    xs.dedup();
    let n_nodes = xs.len();
    let i0 = xs
        .iter()
        .position(|&x| x == x0)
        .expect("x0 inserted into mesh");

    let two = lit::<S>(2.0);
    let half = lit::<S>(0.5);
    let r = problem.r();
    let rc = S::one() - r;

    // per-gap densities, per-node atom weights
    let gap_a: Vec<S> = xs
        .windows(2)
        .map(|w| alpha.density_at((w[0] + w[1]) / two))
        .collect();
    let gap_b: Vec<S> = xs
        .windows(2)
        .map(|w| beta.density_at((w[0] + w[1]) / two))
        .collect();
    let node_da: Vec<S> = xs.iter().map(|&x| alpha.delta_unchecked(x)).collect();
    let node_db: Vec<S> = xs.iter().map(|&x| beta.delta_unchecked(x)).collect();

    let mut u = vec![u0; n_nodes];
    let mut v = vec![v0; n_nodes];

    for _ in 0..iterations {
        let mut nu = vec![S::zero(); n_nodes];
        let mut nv = vec![S::zero(); n_nodes];
        nu[i0] = u0;
        nv[i0] = v0;

        // one-sided limits at gap ends so the trapezoid rule sees the
        // piecewise-smooth representative of the previous iterate
        let u_right = |j: usize| u[j] + r * node_da[j] * v[j];
        let u_left = |j: usize| u[j] - rc * node_da[j] * v[j];
        let v_right = |j: usize| v[j] + r * node_db[j] * u[j];
        let v_left = |j: usize| v[j] - rc * node_db[j] * u[j];

        // rightward: cum over (x0, x_j) open gives the left limit at x_j;
        // at an atom the balanced value follows from the inverse jump matrix
        let mut cum_u = S::zero();
        let mut cum_v = S::zero();
        for j in i0 + 1..n_nodes {
            let h = xs[j] - xs[j - 1];
            cum_u = cum_u + half * h * gap_a[j - 1] * (v_right(j - 1) + v_left(j));
            cum_v = cum_v + half * h * gap_b[j - 1] * (u_right(j - 1) + u_left(j));
            if node_da[j] == S::zero() && node_db[j] == S::zero() {
                nu[j] = u0 + cum_u;
                nv[j] = v0 + cum_v;
            } else {
                let left = State::new(u0 + cum_u, v0 + cum_v);
                let mid = crate::propagator::mid_from_left(r, node_da[j], node_db[j], &left)?;
                nu[j] = mid.u;
                nv[j] = mid.v;
                // once past x_j the atom counts fully
                cum_u = cum_u + node_da[j] * v[j];
                cum_v = cum_v + node_db[j] * u[j];
            }
        }

        // leftward mirror: the accumulated value is the right limit
        let mut cum_u = S::zero();
        let mut cum_v = S::zero();
        for j in (0..i0).rev() {
            let h = xs[j + 1] - xs[j];
            cum_u = cum_u + half * h * gap_a[j] * (v_left(j + 1) + v_right(j));
            cum_v = cum_v + half * h * gap_b[j] * (u_left(j + 1) + u_right(j));
            if node_da[j] == S::zero() && node_db[j] == S::zero() {
                nu[j] = u0 - cum_u;
                nv[j] = v0 - cum_v;
            } else {
                let right = State::new(u0 - cum_u, v0 - cum_v);
                let mid = crate::propagator::mid_from_right(r, node_da[j], node_db[j], &right)?;
                nu[j] = mid.u;
                nv[j] = mid.v;
                cum_u = cum_u + node_da[j] * v[j];
                cum_v = cum_v + node_db[j] * u[j];
            }
        }

        u = nu;
        v = nv;
    }

    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, &x)| SampledState {
            x,
            side: Side::Mid,
            state: State::new(u[j], v[j]),
        })
        .collect())
}

/// The jump-factor series 1 + Σ e₁ + Σ e₂ + … of elementary symmetric sums
/// of Δγ over atoms in [x, y), checked against its product form ∏θ.
pub fn wronskian_series<S: Scalar>(problem: &Problem<S>, x: S, y: S) -> Result<S> {
    if x.is_nan() || y.is_nan() || x >= y {
        return Err(Error::InvalidBounds {
            lo: x.to_f64().unwrap_or(f64::NAN),
            hi: y.to_f64().unwrap_or(f64::NAN),
        });
    }
    problem.require_hypothesis()?;
    let one_minus_2r = S::one() - lit::<S>(2.0) * problem.r();
    let mut gammas = Vec::new();
    let mut product = S::one();
    for s in problem.atom_positions() {
        if s >= x && s < y {
            let da = problem.alpha().delta_unchecked(s);
            let db = problem.beta().delta_unchecked(s);
            let theta_complement = problem.theta_complement(s)?;
            gammas.push(one_minus_2r * da * db / theta_complement);
            product = product * problem.theta_ratio(s)?;
        }
    }
    // elementary symmetric polynomials by the standard recurrence
    let mut elem = vec![S::one()];
    for g in &gammas {
        let mut next = vec![S::zero(); elem.len() + 1];
        for (k, e) in elem.iter().enumerate() {
            next[k] = next[k] + *e;
            next[k + 1] = next[k + 1] + *e * *g;
        }
        elem = next;
    }
    let series = elem.into_iter().fold(S::zero(), |acc, e| acc + e);
    let tol = lit::<S>(1e-12) * product.abs().max(S::one());
    if (series - product).abs() > tol {
        return Err(Error::Internal(format!(
            "jump-factor series {series} disagrees with product {product}"
        )));
    }
    Ok(series)
}

/// Quadrature of u·v against a piecewise measure over [lo, hi]: composite
/// Simpson on the absolutely continuous parts and exact atom contributions
/// with balanced values.
///
/// The integrand is smooth only between the measure's breakpoints and the
/// kink points of either solution, so the quadrature subdivides at all of
/// them and evaluates cell edges with inward one-sided limits.
#[allow(clippy::too_many_arguments)]
pub fn integrate_product<S: Scalar>(
    u_sol: &Solution<S>,
    v_sol: &Solution<S>,
    mu: &PiecewiseMeasure<S>,
    lo: S,
    hi: S,
    include_lo: bool,
    include_hi: bool,
    points_per_cell: usize,
) -> Result<S> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidBounds {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = points_per_cell.max(2) & !1usize; // even
    let mut edges: Vec<S> = mu
        .piece_edges()
        .into_iter()
        .chain(u_sol.segments().into_iter().map(|seg| seg.x_lo))
        .chain(v_sol.segments().into_iter().map(|seg| seg.x_lo))
        .filter(|&x| x > lo && x < hi)
        .collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    edges.dedup();

    let product_at = |x: S, side: Side| -> Result<S> {
        let us = u_sol.evaluate(x, side)?;
        let vs = v_sol.evaluate(x, side)?;
        Ok(us.u * vs.u)
    };
    let mut total = S::zero();
    let two = lit::<S>(2.0);
    for cell in edges.windows(2) {
        let (clo, chi) = (cell[0], cell[1]);
        let d = mu.density_at((clo + chi) / two);
        if d == S::zero() || chi <= clo {
            continue;
        }
        let h = (chi - clo) / S::from_usize(n).expect("fits");
        let mut acc = product_at(clo, Side::Right)? + product_at(chi, Side::Left)?;
        for k in 1..n {
            let x = clo + h * S::from_usize(k).expect("fits");
            let w = if k % 2 == 1 { lit::<S>(4.0) } else { two };
            acc = acc + w * product_at(x, Side::Mid)?;
        }
        total = total + d * acc * h / lit::<S>(3.0);
    }
    for at in mu.atoms_in(lo, hi, include_lo, include_hi) {
        let us = u_sol.evaluate(at.position, Side::Mid)?;
        let vs = v_sol.evaluate(at.position, Side::Mid)?;
        total = total + us.u * vs.u * at.weight;
    }
    Ok(total)
}
