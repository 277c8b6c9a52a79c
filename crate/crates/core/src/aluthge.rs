//! Polar decomposition and the λ-Aluthge transform `Δλ(T) = |T|^λ U |T|^{1-λ}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    self, eigenvalues, hausdorff_distance, multiset_distance, operator_norm, psd_power,
    rank_tolerance, ComplexMatrix, HermitianMatrix, C64,
};
use crate::numrange;

/// `T = U P` with `P = |T|` and `ker U = ker T`.
///
/// The spectral basis of `P` (right singular vectors of `T`) is kept so that
/// fractional powers of the modulus need no second eigendecomposition.
#[derive(Clone, Debug)]
pub struct PolarFactors {
    pub u: ComplexMatrix,
    pub p: HermitianMatrix,
    basis: DMatrix<C64>,
    left: DMatrix<C64>,
    moduli: Vec<f64>,
    rank: usize,
}

impl PolarFactors {
    /// Singular values of `T` after rank truncation, descending.
    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `|T|^exponent`, using `0^0 = 1`.
    pub fn modulus_power(&self, exponent: f64) -> Result<HermitianMatrix> {
        if !(0.0..=1.0).contains(&exponent) {
            return Err(Error::InvalidArgument(format!(
                "exponent {exponent} outside [0, 1]"
            )));
        }
        let mut scaled = self.basis.clone();
        for (j, &s) in self.moduli.iter().enumerate() {
            scaled.column_mut(j).scale_mut(psd_power(s, exponent));
        }
        HermitianMatrix::from_upper(&(scaled * self.basis.adjoint()))
    }

    /// Condition number of `|T|` restricted to its range.
    pub fn range_condition(&self) -> f64 {
        if self.rank == 0 {
            return 1.0;
        }
        self.moduli[0] / self.moduli[self.rank - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AluthgeConfig {
    pub lambda: f64,
    pub rank_tolerance_override: Option<f64>,
}

impl Default for AluthgeConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            rank_tolerance_override: None,
        }
    }
}

impl AluthgeConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        let cfg = Self {
            lambda,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rank_tolerance(mut self, tol: f64) -> Result<Self> {
        self.rank_tolerance_override = Some(tol);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if let Some(t) = self.rank_tolerance_override {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "rank tolerance {t} must be >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// Polar decomposition with the default rank tolerance.
pub fn polar_decompose(t: &ComplexMatrix) -> Result<PolarFactors> {
    polar_decompose_with(t, None)
}

/// From `T = V Σ W*`: `P = W Σ W*` and `U = V D W*`, where `D` keeps only the
/// singular directions above the rank tolerance.
pub fn polar_decompose_with(t: &ComplexMatrix, tolerance: Option<f64>) -> Result<PolarFactors> {
    let f = matrix::svd(t)?;
    let n = t.dim();
    let tol = tolerance.unwrap_or_else(|| rank_tolerance(n, f.singular_values[0]));
    let rank = f.singular_values.iter().filter(|&&s| s > tol).count();
    let moduli: Vec<f64> = f
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < rank { s } else { 0.0 })
        .collect();

    let mut kept = f.u.clone();
    for j in rank..n {
        kept.column_mut(j).fill(C64::new(0.0, 0.0));
    }
    let u = ComplexMatrix::from_trusted(&kept * f.v.adjoint());

    let mut ws = f.v.clone();
    for (j, &s) in moduli.iter().enumerate() {
        ws.column_mut(j).scale_mut(s);
    }
    let p = HermitianMatrix::from_upper(&(ws * f.v.adjoint()))?;

    Ok(PolarFactors {
        u,
        p,
        basis: f.v,
        left: f.u,
        moduli,
        rank,
    })
}

/// `Δλ(T) = |T|^λ U |T|^{1-λ}`.
pub fn aluthge(t: &ComplexMatrix, cfg: &AluthgeConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let polar = polar_decompose_with(t, cfg.rank_tolerance_override)?;
    Ok(transform_from_polar(&polar, cfg.lambda))
}

/// In the basis `W` of `|T|` the transform is `W Σ^λ (W* V) D Σ^{1-λ} W*`.
fn transform_from_polar(polar: &PolarFactors, lambda: f64) -> ComplexMatrix {
    let n = polar.moduli.len();
    let w = &polar.basis;
    let mut core = w.adjoint() * &polar.left;
    for i in 0..n {
        core.row_mut(i)
            .scale_mut(psd_power(polar.moduli[i], lambda));
    }
    for j in 0..n {
        let right = if j < polar.rank {
            psd_power(polar.moduli[j], 1.0 - lambda)
        } else {
            0.0
        };
        core.column_mut(j).scale_mut(right);
    }
    ComplexMatrix::from_trusted(w * core * w.adjoint())
}

/// `Δλⁿ(T)`; `n = 0` returns `T` unchanged.
pub fn aluthge_iterate(t: &ComplexMatrix, cfg: &AluthgeConfig, n: usize) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let mut cur = t.clone();
    for _ in 0..n {
        cur = aluthge(&cur, cfg)?;
    }
    Ok(cur)
}

/// Comparison of two spectra; the multiset distance is only reported when
/// both matrices are well enough conditioned for it to be meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumComparison {
    pub hausdorff: f64,
    pub multiset: Option<f64>,
}

impl SpectrumComparison {
    /// The multiset distance if available, else the set distance.
    pub fn distance(&self) -> f64 {
        self.multiset.unwrap_or(self.hausdorff)
    }
}

/// Conditioning bound for `|T|` on its range under which multiset matching is used.
pub const MULTISET_CONDITION_LIMIT: f64 = 1e6;

pub fn compare_spectra(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SpectrumComparison> {
    let ea = eigenvalues(a)?;
    let eb = eigenvalues(b)?;
    let screened = polar_decompose(a)?.range_condition() <= MULTISET_CONDITION_LIMIT
        && polar_decompose(b)?.range_condition() <= MULTISET_CONDITION_LIMIT;
    Ok(SpectrumComparison {
        hausdorff: hausdorff_distance(&ea, &eb),
        multiset: screened.then(|| multiset_distance(&ea, &eb)),
    })
}

/// Per-iterate record of `‖Δλᵏ(T)‖`, optionally `w(Δλᵏ(T))`, and spectral drift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub iterates_recorded: usize,
    pub norms: Vec<f64>,
    pub numerical_radii: Option<Vec<f64>>,
    pub spectra_drift: Vec<f64>,
}

impl IterateTrace {
    /// Largest increase between consecutive norms (0 for a non-increasing trace).
    pub fn max_norm_increase(&self) -> f64 {
        self.norms
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Columns `n,norm[,numerical_radius],spectra_drift`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let with_w = self.numerical_radii.is_some();
        let mut header = vec!["n", "norm"];
        if with_w {
            header.push("numerical_radius");
        }
        header.push("spectra_drift");
        w.write_record(&header).map_err(csv_err)?;
        for k in 0..self.norms.len() {
            let mut row = vec![k.to_string(), crate::io::fmt_f64(self.norms[k])];
            if let Some(ws) = &self.numerical_radii {
                row.push(crate::io::fmt_f64(ws[k]));
            }
            row.push(crate::io::fmt_f64(self.spectra_drift[k]));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv: {other:?}")),
    }
}

pub fn iterate_trace(
    t: &ComplexMatrix,
    cfg: &AluthgeConfig,
    n_max: usize,
    record_w: bool,
) -> Result<IterateTrace> {
    cfg.validate()?;
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let base = eigenvalues(t)?;
    let mut norms = Vec::with_capacity(n_max + 1);
    let mut radii = record_w.then(|| Vec::with_capacity(n_max + 1));
    let mut drift = Vec::with_capacity(n_max + 1);

    let mut cur = t.clone();
    for k in 0..=n_max {
        if k > 0 {
            cur = aluthge(&cur, cfg)?;
        }
        norms.push(operator_norm(&cur)?);
        if let Some(r) = radii.as_mut() {
            r.push(numrange::numerical_radius(&cur, numrange::default_tolerance(&cur)?)?.w);
        }
        drift.push(if k == 0 {
            0.0
        } else {
            hausdorff_distance(&base, &eigenvalues(&cur)?)
        });
    }
    Ok(IterateTrace {
        iterates_recorded: n_max,
        norms,
        numerical_radii: radii,
        spectra_drift: drift,
    })
}
