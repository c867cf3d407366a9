//! Locally finite signed Borel measures on an open interval, restricted to
//! the class "piecewise-constant density plus finitely many atoms".
//!
//! A measure is dμ = ρ(x)dx + Σᵢ wᵢ δ_{sᵢ} where ρ is constant between
//! consecutive breakpoints and every atom position sᵢ is itself a breakpoint.
//! This class is closed under all operations the solver needs and contains
//! both the classical absolutely continuous case and point interactions of
//! δ and δ′ type, so every downstream computation stays in closed form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, Scalar};

/// The ambient open interval (a, b). Both endpoints are finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<S> {
    a: S,
    b: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(a: S, b: S) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval {
                a: as_f64(a),
                b: as_f64(b),
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> S {
        self.a
    }

    pub fn b(&self) -> S {
        self.b
    }

    pub fn length(&self) -> S {
        self.b - self.a
    }

    /// Membership in the open interval.
    pub fn contains(&self, x: S) -> bool {
        x > self.a && x < self.b
    }

    pub(crate) fn check_contains(&self, x: S) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x: as_f64(x),
                a: as_f64(self.a),
                b: as_f64(self.b),
            })
        }
    }
}

/// A point mass: position s with weight dμ({s}) ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom<S> {
    #[serde(rename = "x")]
    pub position: S,
    #[serde(rename = "w")]
    pub weight: S,
}

impl<S: Scalar> Atom<S> {
    pub fn new(position: S, weight: S) -> Self {
        Self { position, weight }
    }
}

/// Piecewise-constant density plus finitely many atoms on an open interval.
///
/// Canonical form after construction: breakpoints strictly increasing and
/// strictly inside (a, b); one density per piece (`breakpoints.len() + 1`
/// pieces); atoms sorted, nonzero, and every atom position is a breakpoint,
/// so no piece straddles an atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseMeasure<S> {
    interval: Interval<S>,
    breakpoints: Vec<S>,
    densities: Vec<S>,
    atoms: Vec<Atom<S>>,
}

impl<S: Scalar> PiecewiseMeasure<S> {
    /// Builds and normalizes a measure.
    ///
    /// Atom positions that are not yet breakpoints are inserted (splitting the
    /// containing piece); atoms of weight zero are dropped.
    pub fn new(
        interval: Interval<S>,
        breakpoints: Vec<S>,
        densities: Vec<S>,
        atoms: Vec<Atom<S>>,
    ) -> Result<Self> {
        if densities.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidMeasure(format!(
                "expected {} densities for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                densities.len()
            )));
        }
        for d in &densities {
            if !d.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite density {d}")));
            }
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidMeasure(format!(
                    "breakpoints not strictly increasing near {}",
                    w[0]
                )));
            }
        }
        for &x in &breakpoints {
            if !interval.contains(x) {
                return Err(Error::InvalidMeasure(format!(
                    "breakpoint {x} outside open interval ({}, {})",
                    interval.a(),
                    interval.b()
                )));
            }
        }
        let mut atoms: Vec<Atom<S>> = atoms
            .into_iter()
            .filter(|at| at.weight != S::zero())
            .collect();
        atoms.sort_by(|p, q| p.position.partial_cmp(&q.position).expect("finite"));
        for at in &atoms {
            if !at.position.is_finite() || !at.weight.is_finite() {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if !interval.contains(at.position) {
                return Err(Error::InvalidMeasure(format!(
                    "atom position {} outside open interval",
                    at.position
                )));
            }
        }
        for w in atoms.windows(2) {
            if w[0].position == w[1].position {
                return Err(Error::InvalidMeasure(format!(
                    "duplicate atom position {}",
                    w[0].position
                )));
            }
        }

        let mut measure = Self {
            interval,
            breakpoints,
            densities,
            atoms,
        };
        measure.insert_atom_breakpoints();
        Ok(measure)
    }

    /// Measure with constant density and no atoms.
    pub fn constant(interval: Interval<S>, density: S) -> Self {
        Self::new(interval, Vec::new(), vec![density], Vec::new())
            .expect("constant measure is always valid")
    }

    /// Lebesgue measure on the interval.
    pub fn lebesgue(interval: Interval<S>) -> Self {
        Self::constant(interval, S::one())
    }

    /// The zero measure.
    pub fn zero(interval: Interval<S>) -> Self {
        Self::constant(interval, S::zero())
    }

    fn insert_atom_breakpoints(&mut self) {
        for i in 0..self.atoms.len() {
            let x = self.atoms[i].position;
            match self
                .breakpoints
                .binary_search_by(|p| p.partial_cmp(&x).expect("finite"))
            {
                Ok(_) => {}
                Err(idx) => {
                    // splitting a piece duplicates its density
                    self.breakpoints.insert(idx, x);
                    let d = self.densities[idx];
                    self.densities.insert(idx, d);
                }
            }
        }
    }

    pub fn interval(&self) -> Interval<S> {
        self.interval
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[S] {
        &self.densities
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.densities.iter().all(|d| *d == S::zero())
    }

    /// The weight of the atom at `s`, or zero when no atom sits there.
    pub fn delta(&self, s: S) -> Result<S> {
        self.interval.check_contains(s)?;
        Ok(self.delta_unchecked(s))
    }

    pub(crate) fn delta_unchecked(&self, s: S) -> S {
        match self
            .atoms
            .binary_search_by(|at| at.position.partial_cmp(&s).expect("finite"))
        {
            Ok(i) => self.atoms[i].weight,
            Err(_) => S::zero(),
        }
    }

    /// Density of the piece containing `x`. At a breakpoint the density of
    /// the piece to the right is returned; intended for non-breakpoint `x`.
    pub fn density_at(&self, x: S) -> S {
        let idx = self.breakpoints.partition_point(|&p| p <= x);
        self.densities[idx]
    }

    /// Piece boundaries including both interval endpoints.
    pub fn piece_edges(&self) -> Vec<S> {
        let mut edges = Vec::with_capacity(self.breakpoints.len() + 2);
        edges.push(self.interval.a());
        edges.extend_from_slice(&self.breakpoints);
        edges.push(self.interval.b());
        edges
    }

    /// μ([lo, hi]) with configurable endpoint inclusion.
    ///
    /// The absolutely continuous part never depends on the inclusion flags;
    /// they only decide whether atoms sitting exactly at `lo` or `hi` count.
    pub fn measure_of(&self, lo: S, hi: S, include_lo: bool, include_hi: bool) -> Result<S> {
        if !(lo.is_finite() && hi.is_finite())
            || lo > hi
            || lo < self.interval.a()
            || hi > self.interval.b()
        {
            return Err(Error::InvalidBounds {
                lo: as_f64(lo),
                hi: as_f64(hi),
            });
        }
        let mut total = S::zero();
        let edges = self.piece_edges();
        for (i, d) in self.densities.iter().enumerate() {
            let piece_lo = edges[i];
            let piece_hi = edges[i + 1];
            let olo = if lo > piece_lo { lo } else { piece_lo };
            let ohi = if hi < piece_hi { hi } else { piece_hi };
            if ohi > olo {
                total = total + *d * (ohi - olo);
            }
        }
        for at in &self.atoms {
            let p = at.position;
            let above_lo = p > lo || (p == lo && include_lo);
            let below_hi = p < hi || (p == hi && include_hi);
            if above_lo && below_hi {
                total = total + at.weight;
            }
        }
        Ok(total)
    }

    /// Atoms with positions in the given range, honoring inclusion flags.
    pub fn atoms_in(
        &self,
        lo: S,
        hi: S,
        include_lo: bool,
        include_hi: bool,
    ) -> impl Iterator<Item = &Atom<S>> {
        self.atoms.iter().filter(move |at| {
            let p = at.position;
            (p > lo || (p == lo && include_lo)) && (p < hi || (p == hi && include_hi))
        })
    }

    /// Pointwise difference `self − other` as a measure on the same interval.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.interval != other.interval {
            return Err(Error::InvalidMeasure(
                "difference requires measures on the same interval".into(),
            ));
        }
        let mut bks: Vec<S> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        bks.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        bks.dedup();
        let edges = {
            let mut e = Vec::with_capacity(bks.len() + 2);
            e.push(self.interval.a());
            e.extend_from_slice(&bks);
            e.push(self.interval.b());
            e
        };
        let two = lit::<S>(2.0);
        let densities: Vec<S> = edges
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) / two;
                self.density_at(mid) - other.density_at(mid)
            })
            .collect();
        let mut positions: Vec<S> = self
            .atoms
            .iter()
            .map(|at| at.position)
            .chain(other.atoms.iter().map(|at| at.position))
            .collect();
        positions.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        positions.dedup();
        let atoms: Vec<Atom<S>> = positions
            .into_iter()
            .map(|p| Atom::new(p, self.delta_unchecked(p) - other.delta_unchecked(p)))
            .collect();
        Self::new(self.interval, bks, densities, atoms)
    }

    /// Smallest density among pieces overlapping the open interval (lo, hi).
    pub fn min_density_on(&self, lo: S, hi: S) -> S {
        let edges = self.piece_edges();
        let mut min = S::infinity();
        for (i, d) in self.densities.iter().enumerate() {
            if edges[i + 1] > lo && edges[i] < hi && *d < min {
                min = *d;
            }
        }
        min
    }
}

/// θ_z(s) = 1 − z²·Δ_{dα}(s)·Δ_{dβ}(s).
pub fn theta_z<S: Scalar>(z: S, delta_alpha: S, delta_beta: S) -> S {
    S::one() - z * z * delta_alpha * delta_beta
}

/// ω_j(s) = 1 − Δ_{dα}(s)·Δ_{dβ_j}(s)/4, the balanced-case quantity; equal to
/// θ_{1/2} computed with β_j.
pub fn omega<S: Scalar>(
    alpha: &PiecewiseMeasure<S>,
    beta_j: &PiecewiseMeasure<S>,
    s: S,
) -> Result<S> {
    alpha.interval().check_contains(s)?;
    beta_j.interval().check_contains(s)?;
    Ok(theta_z(
        lit::<S>(0.5),
        alpha.delta_unchecked(s),
        beta_j.delta_unchecked(s),
    ))
}

/// The data (r, dα, dβ) of the equation −d(du/dα) + u·dβ = 0.
///
/// Construction checks structure only (r ∈ [0, 1], shared interval). The
/// solvability hypothesis — α strictly increasing and θ_r, θ_{1−r} ≠ 0 at
/// every atom — is verified by [`Problem::check_hypothesis`], which reports
/// failures instead of refusing to build, so that diagnostic tooling can
/// inspect bad instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem<S> {
    r: S,
    alpha: PiecewiseMeasure<S>,
    beta: PiecewiseMeasure<S>,
}

impl<S: Scalar> Problem<S> {
    pub fn new(r: S, alpha: PiecewiseMeasure<S>, beta: PiecewiseMeasure<S>) -> Result<Self> {
        if !r.is_finite() || r < S::zero() || r > S::one() {
            return Err(Error::InvalidProblem(format!(
                "r must lie in [0, 1], got {r}"
            )));
        }
        if alpha.interval() != beta.interval() {
            return Err(Error::InvalidProblem(
                "alpha and beta must share the same interval".into(),
            ));
        }
        Ok(Self { r, alpha, beta })
    }

    pub fn r(&self) -> S {
        self.r
    }

    pub fn alpha(&self) -> &PiecewiseMeasure<S> {
        &self.alpha
    }

    pub fn beta(&self) -> &PiecewiseMeasure<S> {
        &self.beta
    }

    pub fn interval(&self) -> Interval<S> {
        self.alpha.interval()
    }

    /// θ_z(s) for arbitrary z.
    pub fn theta(&self, z: S, s: S) -> Result<S> {
        self.interval().check_contains(s)?;
        Ok(theta_z(
            z,
            self.alpha.delta_unchecked(s),
            self.beta.delta_unchecked(s),
        ))
    }

    /// θ_r(s); determinant of the right-jump matrix at s.
    pub fn theta_r(&self, s: S) -> Result<S> {
        self.theta(self.r, s)
    }

    /// θ_{1−r}(s); determinant of the left-jump matrix at s.
    pub fn theta_complement(&self, s: S) -> Result<S> {
        self.theta(S::one() - self.r, s)
    }

    /// θ(s) = θ_r(s)/θ_{1−r}(s); the one-sided Wronskian jump factor.
    pub fn theta_ratio(&self, s: S) -> Result<S> {
        Ok(self.theta_r(s)? / self.theta_complement(s)?)
    }

    /// Positions carrying an atom of dα or dβ (sorted union).
    pub fn atom_positions(&self) -> Vec<S> {
        let mut positions: Vec<S> = self
            .alpha
            .atoms()
            .iter()
            .map(|at| at.position)
            .chain(self.beta.atoms().iter().map(|at| at.position))
            .collect();
        positions.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
        positions.dedup();
        positions
    }

    /// Verifies the solvability hypothesis and α's strict monotonicity.
    ///
    /// Failures are reported, not thrown; the resulting table also records
    /// the signs of θ_r, θ_{1−r}, θ and ω at every atom for downstream case
    /// classification.
    pub fn check_hypothesis(&self) -> HypothesisReport<S> {
        let mut nonpositive_densities = Vec::new();
        for (i, d) in self.alpha.densities().iter().enumerate() {
            if *d <= S::zero() {
                nonpositive_densities.push(i);
            }
        }
        let mut nonpositive_alpha_atoms = Vec::new();
        for at in self.alpha.atoms() {
            if at.weight <= S::zero() {
                nonpositive_alpha_atoms.push(at.position);
            }
        }
        let alpha_increasing =
            nonpositive_densities.is_empty() && nonpositive_alpha_atoms.is_empty();

        let r = self.r;
        let half = lit::<S>(0.5);
        let atoms: Vec<AtomCheck<S>> = self
            .atom_positions()
            .into_iter()
            .map(|s| {
                let da = self.alpha.delta_unchecked(s);
                let db = self.beta.delta_unchecked(s);
                let theta_r = theta_z(r, da, db);
                let theta_complement = theta_z(S::one() - r, da, db);
                let omega = theta_z(half, da, db);
                let pass = theta_r != S::zero() && theta_complement != S::zero();
                AtomCheck {
                    position: s,
                    delta_alpha: da,
                    delta_beta: db,
                    theta_r,
                    theta_complement,
                    theta: theta_r / theta_complement,
                    omega,
                    pass,
                }
            })
            .collect();

        let pass = alpha_increasing && atoms.iter().all(|c| c.pass);
        HypothesisReport {
            r,
            alpha_increasing,
            nonpositive_densities,
            nonpositive_alpha_atoms,
            atoms,
            pass,
        }
    }

    /// First hypothesis failure as an error, for operations that require the
    /// hypothesis to hold.
    pub(crate) fn require_hypothesis(&self) -> Result<()> {
        let report = self.check_hypothesis();
        if report.pass {
            return Ok(());
        }
        if let Some(bad) = report.atoms.iter().find(|c| !c.pass) {
            return Err(Error::HypothesisViolation {
                position: as_f64(bad.position),
                theta_r: as_f64(bad.theta_r),
                theta_complement: as_f64(bad.theta_complement),
            });
        }
        Err(Error::InvalidProblem(
            "alpha is not strictly increasing".into(),
        ))
    }
}

/// Per-atom hypothesis diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct AtomCheck<S> {
    pub position: S,
    pub delta_alpha: S,
    pub delta_beta: S,
    pub theta_r: S,
    pub theta_complement: S,
    /// θ_r/θ_{1−r}; finite and nonzero whenever `pass` holds.
    pub theta: S,
    pub omega: S,
    pub pass: bool,
}

/// Outcome of [`Problem::check_hypothesis`].
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport<S> {
    pub r: S,
    pub alpha_increasing: bool,
    /// Indices of pieces whose α density is ≤ 0.
    pub nonpositive_densities: Vec<usize>,
    /// Positions of α atoms with weight ≤ 0.
    pub nonpositive_alpha_atoms: Vec<S>,
    pub atoms: Vec<AtomCheck<S>>,
    pub pass: bool,
}

impl<S: Scalar> HypothesisReport<S> {
    /// Positions of atoms failing the θ conditions.
    pub fn failing_atoms(&self) -> Vec<S> {
        self.atoms
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.position)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = PiecewiseMeasure<f64>;

    fn iv(a: f64, b: f64) -> Interval<f64> {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn delta_reads_atom_weight() {
        let mu = M::new(iv(0.0, 1.0), vec![], vec![0.0], vec![Atom::new(0.5, 3.0)]).unwrap();
        assert_eq!(mu.delta(0.5).unwrap(), 3.0);
        assert_eq!(mu.delta(0.25).unwrap(), 0.0);
        let ac = M::constant(iv(0.0, 1.0), 7.0);
        assert_eq!(ac.delta(0.1).unwrap(), 0.0);
        assert!(mu.delta(2.0).is_err());
    }

    #[test]
    fn atom_positions_become_breakpoints() {
        let mu = M::new(
            iv(0.0, 2.0),
            vec![1.0],
            vec![2.0, 5.0],
            vec![Atom::new(0.5, 1.0), Atom::new(1.0, -1.0)],
        )
        .unwrap();
        assert_eq!(mu.breakpoints(), &[0.5, 1.0]);
        assert_eq!(mu.densities(), &[2.0, 2.0, 5.0]);
    }

    #[test]
    fn zero_weight_atoms_dropped() {
        let mu = M::new(iv(0.0, 1.0), vec![], vec![1.0], vec![Atom::new(0.5, 0.0)]).unwrap();
        assert!(mu.atoms().is_empty());
        assert_eq!(mu.breakpoints(), &[] as &[f64]);
    }

    #[test]
    fn measure_of_mixes_density_and_atoms() {
        let mu = M::new(iv(0.0, 1.0), vec![], vec![2.0], vec![Atom::new(0.5, 3.0)]).unwrap();
        assert_eq!(mu.measure_of(0.0, 1.0, true, true).unwrap(), 5.0);
        assert_eq!(mu.measure_of(0.5, 1.0, false, true).unwrap(), 1.0);
        assert_eq!(mu.measure_of(0.5, 0.5, true, true).unwrap(), 3.0);
        assert_eq!(mu.measure_of(0.5, 0.5, true, false).unwrap(), 0.0);
        assert!(mu.measure_of(0.7, 0.2, true, true).is_err());
    }

    #[test]
    fn measure_of_is_additive() {
        let mu = M::new(
            iv(0.0, 4.0),
            vec![1.0, 2.5],
            vec![1.0, -3.0, 0.25],
            vec![Atom::new(1.0, 2.0), Atom::new(3.0, -1.0)],
        )
        .unwrap();
        let whole = mu.measure_of(0.0, 4.0, true, true).unwrap();
        let left = mu.measure_of(0.0, 1.0, true, true).unwrap();
        let right = mu.measure_of(1.0, 4.0, false, true).unwrap();
        assert!((whole - (left + right)).abs() < 1e-14);
    }

    #[test]
    fn theta_and_omega_match_definitions() {
        let interval = iv(-1.0, 1.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 2.0)]).unwrap();
        let beta = M::new(interval, vec![], vec![0.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let p = Problem::new(0.5, alpha.clone(), beta.clone()).unwrap();
        assert_eq!(p.theta(0.5, 0.0).unwrap(), 0.5);
        assert_eq!(p.theta(0.5, 0.3).unwrap(), 1.0);

        // z = 1 with unit jumps in both measures hits the degenerate value 0
        let alpha1 = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let p1 = Problem::new(1.0, alpha1.clone(), beta.clone()).unwrap();
        assert_eq!(p1.theta(1.0, 0.0).unwrap(), 0.0);

        assert_eq!(omega(&alpha1, &beta, 0.0).unwrap(), 0.75);
        let beta2 = M::new(interval, vec![], vec![0.0], vec![Atom::new(0.0, 2.0)]).unwrap();
        assert_eq!(omega(&alpha1, &beta2, 0.0).unwrap(), 0.5);
        let alpha2 = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 2.0)]).unwrap();
        assert_eq!(omega(&alpha2, &beta2, 0.0).unwrap(), 0.0);
        assert_eq!(omega(&alpha2, &beta2, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn hypothesis_report_classical_case() {
        let interval = iv(0.0, 10.0);
        let p = Problem::new(0.5, M::lebesgue(interval), M::constant(interval, -1.0)).unwrap();
        let report = p.check_hypothesis();
        assert!(report.pass);
        assert!(report.atoms.is_empty());
    }

    #[test]
    fn hypothesis_report_flags_theta_zero() {
        let interval = iv(-1.0, 1.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let beta = M::new(interval, vec![], vec![0.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let p = Problem::new(1.0, alpha, beta).unwrap();
        let report = p.check_hypothesis();
        assert!(!report.pass);
        assert_eq!(report.failing_atoms(), vec![0.0]);
        assert!(p.require_hypothesis().is_err());
    }

    #[test]
    fn hypothesis_report_passes_with_large_negative_beta_jump() {
        let interval = iv(-1.0, 1.0);
        let alpha = M::new(interval, vec![], vec![1.0], vec![Atom::new(0.0, 1.0)]).unwrap();
        let beta = M::new(interval, vec![], vec![0.0], vec![Atom::new(0.0, -10.0)]).unwrap();
        let p = Problem::new(0.5, alpha, beta).unwrap();
        let report = p.check_hypothesis();
        assert!(report.pass);
        assert_eq!(report.atoms.len(), 1);
        assert!((report.atoms[0].theta_complement - 3.5).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_report_flags_nonpositive_alpha() {
        let interval = iv(0.0, 1.0);
        let alpha = M::new(interval, vec![0.5], vec![1.0, -2.0], vec![]).unwrap();
        let p = Problem::new(0.0, alpha, M::zero(interval)).unwrap();
        let report = p.check_hypothesis();
        assert!(!report.pass);
        assert_eq!(report.nonpositive_densities, vec![1]);
    }

    #[test]
    fn difference_subtracts_pointwise() {
        let interval = iv(0.0, 2.0);
        let m1 = M::new(
            interval,
            vec![1.0],
            vec![3.0, 1.0],
            vec![Atom::new(0.5, 2.0)],
        )
        .unwrap();
        let m2 = M::new(
            interval,
            vec![0.5],
            vec![1.0, 1.0],
            vec![Atom::new(0.5, 2.0), Atom::new(1.5, -1.0)],
        )
        .unwrap();
        let d = m1.difference(&m2).unwrap();
        assert_eq!(d.delta(0.5).unwrap(), 0.0);
        assert_eq!(d.delta(1.5).unwrap(), 1.0);
        assert_eq!(d.density_at(0.25), 2.0);
        assert_eq!(d.density_at(0.75), 2.0);
        assert_eq!(d.density_at(1.25), 0.0);
        let total = d.measure_of(0.0, 2.0, true, true).unwrap();
        assert!((total - (2.0 * 1.0 + 0.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn problem_rejects_bad_r_and_mismatched_intervals() {
        let i1 = iv(0.0, 1.0);
        let i2 = iv(0.0, 2.0);
        assert!(Problem::new(1.5, M::lebesgue(i1), M::zero(i1)).is_err());
        assert!(Problem::new(0.5, M::lebesgue(i1), M::zero(i2)).is_err());
    }
}
