//! Dense complex matrices and the decompositions the rest of the crate is built on.
//!
//! Everything here works in `f64`. Storage and arithmetic use `nalgebra`;
//! SVD and eigendecompositions are computed with `faer`. This module adds
//! validation, deterministic ordering, and the rank-tolerance convention
//! shared by the polar decomposition and the Aluthge transform.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

/// Double precision complex scalar.
pub type C64 = Complex<f64>;

/// Largest supported dimension.
pub const MAX_DIM: usize = 256;

/// Largest exponent accepted by [`matrix_exp_hermitian`].
pub const EXP_LIMIT: f64 = 700.0;

/// Square, finite, dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 || inner.nrows() > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension {} outside 1..={MAX_DIM}",
                inner.nrows()
            )));
        }
        if let Some(pos) = inner
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            let n = inner.nrows();
            // column-major storage
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos % n,
                pos / n
            )));
        }
        Ok(Self { inner })
    }

    /// Wraps a product of already-validated matrices. Callers that can overflow
    /// must go through [`ComplexMatrix::new`].
    pub(crate) fn from_trusted(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    /// Builds from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Convenience constructor from nested real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let entries: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(n, &entries)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let entries: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(n, &entries)
    }

    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_trusted(self.inner.adjoint())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Self {
        Self::from_trusted(&self.inner * &rhs.inner)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_trusted(&self.inner * C64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: C64) -> Self {
        Self::from_trusted(&self.inner * c)
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Self {
        Self::from_trusted(&self.inner + &rhs.inner)
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Self {
        Self::from_trusted(&self.inner - &rhs.inner)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput("matrix has non-finite entries".into()))
        }
    }

    /// Stable fingerprint of the entries, carried by numerical-failure errors.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim().hash(&mut h);
        for z in self.inner.iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }

    fn failure(&self, routine: &'static str) -> Error {
        Error::NumericalFailure {
            routine,
            hash: self.content_hash(),
        }
    }
}

/// Hermitian matrix, stored fully but always materialized from one triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Reads the upper triangle and the real part of the diagonal of `m`.
    pub fn from_upper(m: &DMatrix<C64>) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() || n == 0 || n > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "hermitian matrix must be square with dimension in 1..={MAX_DIM}"
            )));
        }
        let inner = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            Ordering::Less => m[(i, j)],
            Ordering::Equal => C64::new(m[(i, i)].re, 0.0),
            Ordering::Greater => m[(j, i)].conj(),
        });
        let out = Self { inner };
        if !out.is_finite() {
            return Err(Error::InvalidInput(
                "hermitian matrix has non-finite entries".into(),
            ));
        }
        Ok(out)
    }

    /// `(S + S*) / 2`.
    pub fn real_part_of(s: &ComplexMatrix) -> Self {
        let m = s.as_matrix();
        let n = m.nrows();
        let inner = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            Ordering::Less => (m[(i, j)] + m[(j, i)].conj()) * 0.5,
            Ordering::Equal => C64::new(m[(i, i)].re, 0.0),
            Ordering::Greater => (m[(j, i)] + m[(i, j)].conj()).conj() * 0.5,
        });
        Self { inner }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_upper(&DMatrix::from_diagonal(&DVector::from_column_slice(&d)))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_upper(&DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_trusted(self.inner.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Eigenvalues, plus a unitary eigenvector basis when the input was Hermitian.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Option<DMatrix<C64>>,
    pub hermitian: bool,
}

impl Eigendecomposition {
    /// Real parts of the eigenvalues (exact for the Hermitian case).
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

/// `T = U diag(σ) V*` with σ descending.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<C64>,
}

impl SvdFactors {
    pub fn recompose(&self) -> ComplexMatrix {
        let n = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..n {
            us.column_mut(j).scale_mut(self.singular_values[j]);
        }
        ComplexMatrix::from_trusted(us * self.v.adjoint())
    }

    /// Numerical rank under the shared tolerance (or an explicit override).
    pub fn rank(&self, tolerance_override: Option<f64>) -> usize {
        let tol = tolerance_override
            .unwrap_or_else(|| rank_tolerance(self.singular_values.len(), self.singular_values[0]));
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// A singular value is treated as zero iff it is at most `n * ulp * σ₁`.
pub fn rank_tolerance(dim: usize, sigma_max: f64) -> f64 {
    dim as f64 * f64::EPSILON * sigma_max
}

fn to_faer(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn all_finite<'a>(values: impl IntoIterator<Item = &'a C64>) -> bool {
    values
        .into_iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn svd(t: &ComplexMatrix) -> Result<SvdFactors> {
    t.check_finite()?;
    let f = to_faer(&t.inner).svd().map_err(|_| t.failure("svd"))?;
    let u = from_faer(f.U());
    let v = from_faer(f.V());
    let singular_values: Vec<f64> = f.S().column_vector().iter().map(|s| s.re).collect();
    if !all_finite(u.iter().chain(v.iter())) || singular_values.iter().any(|s| !s.is_finite()) {
        return Err(t.failure("svd"));
    }
    Ok(SvdFactors {
        u,
        singular_values,
        v,
    })
}

pub fn singular_values(t: &ComplexMatrix) -> Result<Vec<f64>> {
    t.check_finite()?;
    let s = to_faer(&t.inner)
        .singular_values()
        .map_err(|_| t.failure("svd"))?;
    if s.iter().any(|x| !x.is_finite()) {
        return Err(t.failure("svd"));
    }
    Ok(s)
}

/// Largest singular value.
pub fn operator_norm(t: &ComplexMatrix) -> Result<f64> {
    if t.dim() == 1 {
        t.check_finite()?;
        return Ok(t.get(0, 0).norm());
    }
    Ok(singular_values(t)?[0])
}

/// Argument normalized into `[0, 2π)`.
pub fn normalized_arg(z: C64) -> f64 {
    let a = z.arg();
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Descending modulus, ties broken by ascending argument in `[0, 2π)`.
pub fn eigenvalue_order(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| normalized_arg(*a).total_cmp(&normalized_arg(*b)))
}

/// All eigenvalues with multiplicity, ordered by [`eigenvalue_order`].
pub fn eigenvalues(t: &ComplexMatrix) -> Result<Vec<C64>> {
    t.check_finite()?;
    if t.dim() == 1 {
        return Ok(vec![t.inner[(0, 0)]]);
    }
    let mut vals = to_faer(&t.inner)
        .eigenvalues()
        .map_err(|_| t.failure("eigenvalues"))?;
    if !all_finite(&vals) {
        return Err(t.failure("eigenvalues"));
    }
    vals.sort_by(eigenvalue_order);
    Ok(vals)
}

/// Largest eigenvalue modulus; the ground-truth reference for every estimator.
pub fn spectral_radius_oracle(t: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(t)?.first().map(|z| z.norm()).unwrap_or(0.0))
}

/// Eigenvalues descending with matching unitary eigenvectors.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<Eigendecomposition> {
    let n = h.dim();
    let e = to_faer(&h.inner)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| h.to_complex().failure("hermitian_eig"))?;
    // faer sorts ascending
    let s = e.S().column_vector();
    let u = e.U();
    let values: Vec<C64> = (0..n).rev().map(|k| C64::new(s[k].re, 0.0)).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    if !all_finite(values.iter().chain(vectors.iter())) {
        return Err(h.to_complex().failure("hermitian_eig"));
    }
    Ok(Eigendecomposition {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        hermitian: true,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    if h.dim() == 1 {
        return Ok(vec![h.inner[(0, 0)].re]);
    }
    let mut vals = to_faer(&h.inner)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| h.to_complex().failure("hermitian_eig"))?;
    if vals.iter().any(|x| !x.is_finite()) {
        return Err(h.to_complex().failure("hermitian_eig"));
    }
    vals.reverse();
    Ok(vals)
}

/// Applies a real function to the spectrum: `V diag(f(λ)) V*`.
fn spectral_map(eig: &Eigendecomposition, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let v = eig
        .eigenvectors
        .as_ref()
        .expect("hermitian decomposition carries vectors");
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(lam.re));
    }
    scaled * v.adjoint()
}

/// `e^{scale·A}` for Hermitian `A`.
pub fn matrix_exp_hermitian(a: &HermitianMatrix, scale: f64) -> Result<ComplexMatrix> {
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(
            "exponent scale must be finite".into(),
        ));
    }
    let eig = hermitian_eig(a)?;
    let worst = eig
        .eigenvalues
        .iter()
        .map(|l| scale * l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > EXP_LIMIT {
        return Err(Error::Range(format!(
            "exponent {worst:.3} exceeds {EXP_LIMIT}"
        )));
    }
    let m = spectral_map(&eig, |l| (scale * l).exp());
    Ok(ComplexMatrix::from_trusted(
        HermitianMatrix::from_upper(&m)?.inner,
    ))
}

/// `P^exponent` for positive semidefinite `P`, with `0^0 = 1`.
pub fn fractional_power_psd(p: &HermitianMatrix, exponent: f64) -> Result<HermitianMatrix> {
    if !(0.0..=1.0).contains(&exponent) {
        return Err(Error::InvalidArgument(format!(
            "exponent {exponent} outside [0, 1]"
        )));
    }
    let eig = hermitian_eig(p)?;
    let n = p.dim();
    let top = eig
        .eigenvalues
        .iter()
        .map(|z| z.re.abs())
        .fold(0.0, f64::max);
    let tol = rank_tolerance(n, top);
    if let Some(bad) = eig.eigenvalues.iter().map(|z| z.re).find(|&l| l < -tol) {
        return Err(Error::NotPsd {
            eigenvalue: bad,
            tolerance: tol,
        });
    }
    let m = spectral_map(&eig, |l| psd_power(l.max(0.0), exponent));
    HermitianMatrix::from_upper(&m)
}

/// Scalar power with the `0^0 = 1` convention.
pub(crate) fn psd_power(x: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(exponent)
    }
}

/// Largest distance from a point of one set to the nearest point of the other.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    fn directed(from: &[C64], to: &[C64]) -> f64 {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed(a, b).max(directed(b, a))
}

/// Smallest `d` such that a perfect pairing of `a` with `b` exists in which
/// every pair is within `d` (bottleneck matching). Infinite on length mismatch.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a.len();
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut thresholds: Vec<f64> = dist.iter().flatten().copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    // binary search the smallest threshold admitting a perfect matching
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(n, &dist, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

fn has_perfect_matching(n: usize, dist: &[Vec<f64>], limit: f64) -> bool {
    fn augment(
        u: usize,
        dist: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for v in 0..dist.len() {
            if dist[u][v] <= limit && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, dist, limit, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n];
    (0..n).all(|u| {
        let mut seen = vec![false; n];
        augment(u, dist, limit, &mut seen, &mut owner)
    })
}
