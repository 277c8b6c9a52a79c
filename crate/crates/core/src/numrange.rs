//! Numerical range `W(T)` and numerical radius `w(T)`.
//!
//! Everything is driven by the support function
//! `g(θ) = λ_max(Re(e^{iθ} T))`, whose maximum over θ is `w(T)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    eigenvalues, hermitian_eig, hermitian_eigenvalues, normalized_arg, operator_norm,
    ComplexMatrix, HermitianMatrix, C64,
};

/// Number of uniform θ samples before refinement.
pub const GRID_SIZE: usize = 720;

/// Local maxima of the grid that get refined, best first.
const REFINED_CANDIDATES: usize = 16;

/// Relative width of the peripheral band used by [`peripheral_angle`].
const PERIPHERAL_RTOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// An angle in radians, normalized into `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Self {
        let t = theta.rem_euclid(TAU);
        Angle(if t >= TAU { 0.0 } else { t })
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `e^{iθ}`.
    pub fn phase(self) -> C64 {
        C64::from_polar(1.0, self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericalRadiusResult {
    pub w: f64,
    pub argmax_angle: f64,
    pub boundary_samples: Option<Vec<C64>>,
}

/// `(S + S*) / 2`.
pub fn real_part(s: &ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::real_part_of(s)
}

/// Default absolute tolerance `1e-10 · max(1, ‖T‖)`.
pub fn default_tolerance(t: &ComplexMatrix) -> Result<f64> {
    Ok(1e-10 * operator_norm(t)?.max(1.0))
}

fn support(t: &ComplexMatrix, theta: f64) -> Result<f64> {
    let h = real_part(&t.scale_complex(C64::from_polar(1.0, theta)));
    Ok(hermitian_eigenvalues(&h)?[0])
}

fn is_hermitian(t: &ComplexMatrix) -> bool {
    let m = t.as_matrix();
    let n = t.dim();
    (0..n).all(|i| (i..n).all(|j| m[(i, j)] == m[(j, i)].conj()))
}

/// `w(T)` to within `tol`, with the maximizing rotation angle.
pub fn numerical_radius(t: &ComplexMatrix, tol: f64) -> Result<NumericalRadiusResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    t.check_finite()?;

    // For Hermitian T the rotations θ = 0 and θ = π already attain the maximum.
    if is_hermitian(t) {
        let vals = hermitian_eigenvalues(&real_part(t))?;
        let (top, bottom) = (vals[0], vals[vals.len() - 1]);
        let (w, angle) = if top >= -bottom {
            (top, 0.0)
        } else {
            (-bottom, Angle::new(std::f64::consts::PI).0)
        };
        return Ok(NumericalRadiusResult {
            w,
            argmax_angle: angle,
            boundary_samples: None,
        });
    }

    let norm = operator_norm(t)?;
    let step = TAU / GRID_SIZE as f64;
    let grid = (0..GRID_SIZE)
        .map(|i| support(t, i as f64 * step))
        .collect::<Result<Vec<f64>>>()?;

    let mut best_i = 0;
    for i in 1..GRID_SIZE {
        if grid[i] > grid[best_i] {
            best_i = i;
        }
    }
    let mut best = (grid[best_i], best_i as f64 * step);

    let mut candidates: Vec<usize> = (0..GRID_SIZE)
        .filter(|&i| {
            let prev = grid[(i + GRID_SIZE - 1) % GRID_SIZE];
            let next = grid[(i + 1) % GRID_SIZE];
            grid[i] >= prev && grid[i] >= next
        })
        .collect();
    candidates.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    candidates.truncate(REFINED_CANDIDATES);

    let width_tol = tol / norm.max(1.0);
    for i in candidates {
        let center = i as f64 * step;
        let (value, at) = golden_max(|th| support(t, th), center - step, center + step, width_tol)?;
        if value > best.0 {
            best = (value, at);
        }
    }

    Ok(NumericalRadiusResult {
        w: best.0.max(0.0),
        argmax_angle: Angle::new(best.1).0,
        boundary_samples: None,
    })
}

/// [`numerical_radius`] with `samples` boundary points of `W(T)` attached.
pub fn numerical_radius_with_boundary(
    t: &ComplexMatrix,
    tol: f64,
    samples: usize,
) -> Result<NumericalRadiusResult> {
    let mut res = numerical_radius(t, tol)?;
    res.boundary_samples = Some(fov_boundary(t, samples)?);
    Ok(res)
}

fn golden_max(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    width_tol: f64,
) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > width_tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (f1, x1) } else { (f2, x2) })
}

/// Points `v* T v` where `v` is a top eigenvector of `Re(e^{iθ}T)`, for
/// `samples` equally spaced θ. They lie in `W(T)` and trace its boundary.
pub fn fov_boundary(t: &ComplexMatrix, samples: usize) -> Result<Vec<C64>> {
    if samples < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 boundary samples, got {samples}"
        )));
    }
    t.check_finite()?;
    let step = TAU / samples as f64;
    (0..samples)
        .map(|k| {
            let theta = k as f64 * step;
            let h = real_part(&t.scale_complex(C64::from_polar(1.0, theta)));
            let eig = hermitian_eig(&h)?;
            let vecs = eig.eigenvectors.expect("hermitian eigenvectors");
            let v = vecs.column(0);
            let tv = t.as_matrix() * v;
            Ok(v.dotc(&tv))
        })
        .collect()
}

/// `θ = -arg(z)` for a peripheral eigenvalue `z`, so that `e^{iθ}z = r(T)`.
/// Among (numerically) peripheral eigenvalues the one with the smallest
/// argument in `[0, 2π)` is used; `T` with `r(T) = 0` gives `θ = 0`.
pub fn peripheral_angle(t: &ComplexMatrix) -> Result<Angle> {
    let vals = eigenvalues(t)?;
    let r = vals[0].norm();
    if r == 0.0 {
        return Ok(Angle::new(0.0));
    }
    let z = vals
        .iter()
        .filter(|z| z.norm() >= r * (1.0 - PERIPHERAL_RTOL))
        .min_by(|a, b| normalized_arg(**a).total_cmp(&normalized_arg(**b)))
        .copied()
        .unwrap_or(vals[0]);
    Ok(Angle::new(-z.arg()))
}

/// `‖Re(e^{iθ} T)‖`, the largest eigenvalue modulus of the rotated real part.
pub fn rotated_realpart_norm(t: &ComplexMatrix, theta: Angle) -> Result<f64> {
    hermitian_spectral_radius(&real_part(&t.scale_complex(theta.phase())))
}

/// Norm (equivalently numerical radius) of a Hermitian matrix.
pub fn hermitian_spectral_radius(h: &HermitianMatrix) -> Result<f64> {
    let vals = hermitian_eigenvalues(h)?;
    Ok(vals[0].abs().max(vals[vals.len() - 1].abs()))
}
