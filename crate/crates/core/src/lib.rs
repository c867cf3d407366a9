//! Exact solver and verification toolkit for homogeneous Sturm-Liouville
//! equations with measure-valued coefficients, −d(du/dα) + u·dβ = 0.
//!
//! dα is a positive measure supported on all of (a, b) and dβ a locally
//! finite signed measure; both are restricted to piecewise-constant densities
//! plus finitely many atoms, which keeps every propagation step in closed
//! form. Solutions are functions of locally bounded variation, r-balanced in
//! the sense u(x) = r·u⁻(x) + (1−r)·u⁺(x); their sign-changing points
//! generalize zeros and obey separation and comparison laws that this crate
//! machine-checks on concrete and randomized instances.
//!
//! Module map:
//! - [`measure`]: piecewise measures, the data (r, α, β) and its
//!   solvability hypothesis.
//! - [`propagator`]: closed-form flow, atom jump algebra, and the global
//!   initial-value solver.
//! - [`analysis`]: sign-changing points, sign-change criteria, Wronskians.
//! - [`theorems`]: separation/comparison case classification, randomized
//!   verification campaigns.
//! - [`oracle`]: independent numerical cross-checks (one-step integrator,
//!   Picard iteration, jump-factor series).
//!
//! The core is generic over the scalar type; `f64` aliases are exported at
//! the crate root.

pub mod analysis;
pub mod error;
pub mod measure;
pub mod oracle;
pub mod propagator;
pub mod scalar;
pub mod theorems;

pub use error::{Error, Result};
pub use measure::{omega, Atom, HypothesisReport, Interval, PiecewiseMeasure, Problem};
pub use propagator::{
    ac_flow, cross_atom, cross_atom_from_right, jump_left, jump_right, mid_from_left,
    mid_from_right, solve_ivp, AtomRecord, Segment, Side, Solution, State,
};
pub use scalar::Scalar;

pub type Interval64 = Interval<f64>;
pub type Atom64 = Atom<f64>;
pub type PiecewiseMeasure64 = PiecewiseMeasure<f64>;
pub type Problem64 = Problem<f64>;
pub type State64 = State<f64>;
pub type Solution64 = Solution<f64>;
pub type SignChangePoint64 = analysis::SignChangePoint<f64>;
