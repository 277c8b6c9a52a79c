//! Infima over the similarity orbit `{e^A T e^{-A} : A Hermitian}`.
//!
//! Each [`OrbitObjective`] is bounded below by `r(T)` on the whole orbit and
//! its infimum equals `r(T)`; [`minimize_orbit`] searches for small values with
//! a restarted simplex method over the `n²` real coordinates of `A`, confined
//! to the Frobenius ball of the given radius.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aluthge::{aluthge_iterate, AluthgeConfig};
use crate::error::{Error, Result};
use crate::matrix::{
    matrix_exp_hermitian, operator_norm, spectral_radius_oracle, ComplexMatrix, HermitianMatrix,
    C64,
};
use crate::numrange::{
    default_tolerance, hermitian_spectral_radius, numerical_radius, real_part, Angle,
};
use crate::simplex::{self, SimplexOptions};

pub const DEFAULT_RADIUS: f64 = 8.0;
pub const DEFAULT_BUDGET: usize = 5000;
pub const DEFAULT_RESTARTS: usize = 4;

/// Fraction of the radius beyond which the optimum counts as pressing the bound.
const BOUNDARY_FRACTION: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `‖Δλⁿ(e^A T e^{-A})‖`
    DeltaNorm,
    /// `w(Δλⁿ(e^A T e^{-A}))`
    DeltaNumrad,
    /// `‖Re(Δλⁿ(e^{iθ} e^A T e^{-A}))‖`
    RotatedRealpartNorm,
    /// `w(Re(Δλⁿ(e^{iθ} e^A T e^{-A})))`
    RotatedRealpartNumrad,
    /// `‖e^A T e^{-A}‖`
    PlainNorm,
}

impl ObjectiveKind {
    pub fn is_rotated(self) -> bool {
        matches!(
            self,
            ObjectiveKind::RotatedRealpartNorm | ObjectiveKind::RotatedRealpartNumrad
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitObjective {
    pub kind: ObjectiveKind,
    pub lambda: f64,
    pub n: usize,
    pub theta: Option<Angle>,
}

impl OrbitObjective {
    pub fn new(kind: ObjectiveKind, lambda: f64, n: usize, theta: Option<Angle>) -> Result<Self> {
        let obj = Self {
            kind,
            lambda,
            n,
            theta,
        };
        obj.validate()?;
        Ok(obj)
    }

    pub fn delta_norm(lambda: f64, n: usize) -> Self {
        Self {
            kind: ObjectiveKind::DeltaNorm,
            lambda,
            n,
            theta: None,
        }
    }

    pub fn plain_norm() -> Self {
        Self {
            kind: ObjectiveKind::PlainNorm,
            lambda: 0.5,
            n: 0,
            theta: None,
        }
    }

    /// A rotated objective with `θ` taken from [`crate::numrange::peripheral_angle`].
    pub fn rotated_at_peripheral(
        t: &ComplexMatrix,
        kind: ObjectiveKind,
        lambda: f64,
        n: usize,
    ) -> Result<Self> {
        let theta = crate::numrange::peripheral_angle(t)?;
        Self::new(kind, lambda, n, Some(theta))
    }

    pub fn validate(&self) -> Result<()> {
        AluthgeConfig::new(self.lambda)?;
        if self.kind.is_rotated() != self.theta.is_some() {
            return Err(Error::InvalidArgument(
                "theta must be given exactly for the rotated objectives".into(),
            ));
        }
        Ok(())
    }
}

/// Real coordinates of a Hermitian generator: the `n` diagonal entries, then
/// `(re, im)` for each strictly-upper entry in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianParams {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl HermitianParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coords: vec![0.0; dim * dim],
        }
    }

    pub fn from_coords(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates for dimension {dim}, got {}",
                dim * dim,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let m = h.as_matrix();
        let mut coords: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
        for i in 0..n {
            for j in i + 1..n {
                coords.push(m[(i, j)].re);
                coords.push(m[(i, j)].im);
            }
        }
        Self { dim: n, coords }
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        let n = self.dim;
        let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(self.coords[i], 0.0);
        }
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = C64::new(self.coords[k], self.coords[k + 1]);
                k += 2;
            }
        }
        HermitianMatrix::from_upper(&m).expect("finite coordinates")
    }

    /// Frobenius norm of the materialized matrix.
    pub fn frobenius_norm(&self) -> f64 {
        let n = self.dim;
        let diag: f64 = self.coords[..n].iter().map(|x| x * x).sum();
        let off: f64 = self.coords[n..].iter().map(|x| x * x).sum();
        (diag + 2.0 * off).sqrt()
    }

    /// Radial projection onto the Frobenius ball of the given radius.
    pub fn project(&self, radius: f64) -> Self {
        let nrm = self.frobenius_norm();
        if nrm <= radius {
            return self.clone();
        }
        let s = radius / nrm;
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }
}

/// Value of `obj` at `e^A T e^{-A}`.
pub fn evaluate_objective(
    t: &ComplexMatrix,
    obj: &OrbitObjective,
    a: &HermitianParams,
) -> Result<f64> {
    obj.validate()?;
    if a.dim != t.dim() {
        return Err(Error::InvalidArgument(format!(
            "generator dimension {} does not match matrix dimension {}",
            a.dim,
            t.dim()
        )));
    }
    let h = a.to_hermitian();
    let x = matrix_exp_hermitian(&h, 1.0)?;
    let x_inv = matrix_exp_hermitian(&h, -1.0)?;
    let mut s = x.matmul(t).matmul(&x_inv);
    if let Some(theta) = obj.theta {
        s = s.scale_complex(theta.phase());
    }
    if obj.kind != ObjectiveKind::PlainNorm {
        s = aluthge_iterate(&s, &AluthgeConfig::new(obj.lambda)?, obj.n)?;
    }
    match obj.kind {
        ObjectiveKind::DeltaNorm | ObjectiveKind::PlainNorm => operator_norm(&s),
        ObjectiveKind::DeltaNumrad => Ok(numerical_radius(&s, default_tolerance(&s)?)?.w),
        // the real part is Hermitian, so its numerical radius is its norm
        ObjectiveKind::RotatedRealpartNorm | ObjectiveKind::RotatedRealpartNumrad => {
            hermitian_spectral_radius(&real_part(&s))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSearch {
    pub budget: usize,
    pub radius: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OrbitSearch {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            radius: DEFAULT_RADIUS,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

impl OrbitSearch {
    pub fn new(budget: usize, radius: f64, seed: u64) -> Self {
        Self {
            budget,
            radius,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::InvalidArgument("budget must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radius {} must be positive",
                self.radius
            )));
        }
        Ok(())
    }

    /// Evaluation budget of each start; the `A = 0` start absorbs the remainder.
    fn split(&self) -> Vec<usize> {
        let starts = self.restarts + 1;
        let share = self.budget / starts;
        let mut out = vec![share; starts];
        out[0] += self.budget - share * starts;
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub best_value: f64,
    pub best_a: HermitianParams,
    pub evaluations: usize,
    pub boundary_hit: bool,
    /// `(evaluation index, best value so far)`, recorded at each improvement.
    pub history: Vec<(usize, f64)>,
}

impl OrbitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("orbit result serializes")
    }
}

struct StartOutcome {
    evaluations: usize,
    /// improvements in local evaluation order
    improvements: Vec<(usize, f64, HermitianParams)>,
}

/// Searches the orbit with the default restart count.
pub fn minimize_orbit(
    t: &ComplexMatrix,
    obj: &OrbitObjective,
    budget: usize,
    radius: f64,
    seed: u64,
) -> Result<OrbitResult> {
    minimize_orbit_observed(t, obj, &OrbitSearch::new(budget, radius, seed), |_, _| {})
}

/// Like [`minimize_orbit`], calling `observe(A, value)` on every evaluation.
///
/// Starts run in parallel but each owns a fixed slice of the budget and its
/// own seeded generator, so the result does not depend on scheduling.
pub fn minimize_orbit_observed<O>(
    t: &ComplexMatrix,
    obj: &OrbitObjective,
    search: &OrbitSearch,
    observe: O,
) -> Result<OrbitResult>
where
    O: Fn(&HermitianParams, f64) + Sync,
{
    obj.validate()?;
    search.validate()?;
    t.check_finite()?;
    let dim = t.dim();
    let budgets = search.split();
    let spread = search.radius / 10.0;
    // the objectives are bounded below by r(T) on the whole orbit
    // (for the rotated kinds only at the peripheral angle)
    let floor = if cfg!(debug_assertions) {
        match obj.theta {
            Some(theta) if theta != crate::numrange::peripheral_angle(t)? => None,
            _ => Some(spectral_radius_oracle(t)?),
        }
    } else {
        None
    };

    let outcomes: Vec<Result<StartOutcome>> = budgets
        .par_iter()
        .enumerate()
        .map(|(idx, &local_budget)| {
            let start = if idx == 0 {
                vec![0.0; dim * dim]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
                rng.set_stream(idx as u64);
                let g = Normal::new(0.0, spread).expect("positive spread");
                let raw = HermitianParams {
                    dim,
                    coords: (0..dim * dim).map(|_| g.sample(&mut rng)).collect(),
                };
                raw.project(search.radius).coords
            };
            run_start(
                t,
                obj,
                search.radius,
                spread,
                &start,
                local_budget,
                floor,
                &observe,
            )
        })
        .collect();

    let mut best: Option<(f64, HermitianParams)> = None;
    let mut history = Vec::new();
    let mut offset = 0;
    for outcome in outcomes {
        let outcome = outcome?;
        for (local, value, a) in outcome.improvements {
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                history.push((offset + local, value));
                best = Some((value, a));
            }
        }
        offset += outcome.evaluations;
    }
    let (best_value, best_a) = best.expect("at least one evaluation");
    let boundary_hit = best_a.frobenius_norm() >= BOUNDARY_FRACTION * search.radius;
    Ok(OrbitResult {
        best_value,
        best_a,
        evaluations: offset,
        boundary_hit,
        history,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_start<O>(
    t: &ComplexMatrix,
    obj: &OrbitObjective,
    radius: f64,
    step: f64,
    start: &[f64],
    budget: usize,
    floor: Option<f64>,
    observe: &O,
) -> Result<StartOutcome>
where
    O: Fn(&HermitianParams, f64) + Sync,
{
    let dim = t.dim();
    let mut improvements = Vec::new();
    let mut count = 0usize;
    let mut best = f64::INFINITY;
    let res = simplex::minimize(
        |x| {
            let a = HermitianParams {
                dim,
                coords: x.to_vec(),
            }
            .project(radius);
            let v = evaluate_objective(t, obj, &a)?;
            observe(&a, v);
            if let Some(r) = floor {
                debug_assert!(
                    v >= r - 1e-6 * r.max(1.0),
                    "orbit objective {v} fell below r(T) = {r}"
                );
            }
            count += 1;
            if v < best {
                best = v;
                improvements.push((count, v, a));
            }
            Ok(v)
        },
        start,
        &SimplexOptions {
            max_evaluations: budget,
            initial_step: step,
            ..Default::default()
        },
    )?;
    Ok(StartOutcome {
        evaluations: res.evaluations,
        improvements,
    })
}

/// `max(0, best_value - r(T))` after an orbit search.
pub fn orbit_gap(
    t: &ComplexMatrix,
    obj: &OrbitObjective,
    budget: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    let res = minimize_orbit(t, obj, budget, radius, seed)?;
    Ok((res.best_value - spectral_radius_oracle(t)?).max(0.0))
}
