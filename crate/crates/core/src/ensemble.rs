//! Seeded matrix ensembles.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` and the
//! ziggurat `StandardNormal` sampler, so an `EnsembleSpec` produces the same matrix on
//! every run and platform.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// I.i.d. standard complex Gaussian entries scaled by `1/√n`.
    Ginibre,
    /// Single Jordan block; params `[re]` or `[re, im]` of the eigenvalue (default 0).
    Jordan,
    /// Upper shift with `n − 1` weights in params (default all ones).
    NilpotentShift,
    /// `Q D Q*` with Haar `Q` and standard complex Gaussian diagonal `D`.
    NormalRandom,
    /// Haar unitary from the phase-corrected QR of a Ginibre matrix.
    UnitaryRandom,
    /// Companion matrix of `x^n + c_{n−1}x^{n−1} + … + c_0`; params `[c_0, …, c_{n−1}]`.
    Companion,
    /// Identity plus a constant strict upper triangle; params `[]` (ones) or `[c]`.
    Unipotent,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 7] = [
        EnsembleKind::Ginibre,
        EnsembleKind::Jordan,
        EnsembleKind::NilpotentShift,
        EnsembleKind::NormalRandom,
        EnsembleKind::UnitaryRandom,
        EnsembleKind::Companion,
        EnsembleKind::Unipotent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Ginibre => "ginibre",
            EnsembleKind::Jordan => "jordan",
            EnsembleKind::NilpotentShift => "nilpotent_shift",
            EnsembleKind::NormalRandom => "normal_random",
            EnsembleKind::UnitaryRandom => "unitary_random",
            EnsembleKind::Companion => "companion",
            EnsembleKind::Unipotent => "unipotent",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    /// Accepts `snake_case` and `kebab-case` names.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown ensemble kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    pub params: Vec<f64>,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            seed,
            params: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }
}

pub fn generate(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    let n = spec.dim;
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    if let Some(p) = spec.params.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "parameter {p} is not finite"
        )));
    }
    let p = &spec.params;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = match spec.kind {
        EnsembleKind::Ginibre => {
            expect_params(spec, &[0])?;
            ginibre(&mut rng, n) / C64::from((n as f64).sqrt())
        }
        EnsembleKind::Jordan => {
            expect_params(spec, &[0, 1, 2])?;
            let z = C64::new(
                p.first().copied().unwrap_or(0.0),
                p.get(1).copied().unwrap_or(0.0),
            );
            let mut m = DMatrix::from_diagonal_element(n, n, z);
            for i in 0..n - 1 {
                m[(i, i + 1)] = C64::from(1.0);
            }
            m
        }
        EnsembleKind::NilpotentShift => {
            expect_params(spec, &[0, n - 1])?;
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n - 1 {
                m[(i, i + 1)] = C64::from(p.get(i).copied().unwrap_or(1.0));
            }
            m
        }
        EnsembleKind::NormalRandom => {
            expect_params(spec, &[0])?;
            let q = haar_unitary(&mut rng, n)?;
            let d: Vec<C64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
            &q * d * q.adjoint()
        }
        EnsembleKind::UnitaryRandom => {
            expect_params(spec, &[0])?;
            haar_unitary(&mut rng, n)?
        }
        EnsembleKind::Companion => {
            expect_params(spec, &[n])?;
            let mut m = DMatrix::zeros(n, n);
            for i in 1..n {
                m[(i, i - 1)] = C64::from(1.0);
            }
            for (i, c) in p.iter().enumerate() {
                m[(i, n - 1)] = C64::from(-c);
            }
            m
        }
        EnsembleKind::Unipotent => {
            expect_params(spec, &[0, 1])?;
            let c = C64::from(p.first().copied().unwrap_or(1.0));
            DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => C64::from(1.0),
                std::cmp::Ordering::Less => c,
                std::cmp::Ordering::Greater => C64::from(0.0),
            })
        }
    };
    ComplexMatrix::new(m)
}

fn expect_params(spec: &EnsembleSpec, allowed: &[usize]) -> Result<()> {
    if allowed.contains(&spec.params.len()) {
        return Ok(());
    }
    let expected: Vec<String> = allowed.iter().map(|a| a.to_string()).collect();
    Err(Error::InvalidArgument(format!(
        "{} with dim {} takes {} parameters, got {}",
        spec.kind,
        spec.dim,
        expected.join(" or "),
        spec.params.len()
    )))
}

/// Standard complex Gaussian: `E|z|² = 1`.
fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Row-major draws, so the matrix does not depend on storage order.
fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let entries: Vec<C64> = (0..n * n).map(|_| complex_normal(rng)).collect();
    DMatrix::from_row_slice(n, n, &entries)
}

fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> Result<DMatrix<C64>> {
    let qr = ginibre(rng, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix the phase ambiguity of QR so the distribution is Haar
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::from(1.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}
