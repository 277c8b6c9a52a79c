//! Limit formulas for the spectral radius behind one result type.
//!
//! * [`estimate_gelfand`] gives `‖T^k‖^{1/k}`
//! * [`estimate_aluthge_iterate`] gives `‖Δλⁿ(T)‖` as `n` grows
//! * [`estimate_aluthge_power`] gives `‖Δλⁿ(T^k)‖^{1/k}` at fixed `n`
//! * [`estimate_numrad_power`] gives `w(Δλⁿ(T^k))^{1/k}` at fixed `n`
//!
//! Powers are carried as `T^k = e^L · T̂` with `T̂` of unit Frobenius norm, so
//! large `k` never overflows. Both `Δλ` and `w` are positively homogeneous,
//! which lets the scale `e^L` be re-attached after the transform.

use serde::{Deserialize, Serialize};

use crate::aluthge::{aluthge, aluthge_iterate, AluthgeConfig};
use crate::error::{Error, Result};
use crate::matrix::{operator_norm, spectral_radius_oracle, ComplexMatrix};
use crate::numrange::{default_tolerance, numerical_radius};

/// Largest power accepted in a schedule.
pub const MAX_POWER: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gelfand,
    AluthgeIterate,
    AluthgePower,
    NumradPower,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Gelfand,
        Method::AluthgeIterate,
        Method::AluthgePower,
        Method::NumradPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gelfand => "gelfand",
            Method::AluthgeIterate => "aluthge_iterate",
            Method::AluthgePower => "aluthge_power",
            Method::NumradPower => "numrad_power",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub iterations: usize,
    pub matrix_multiplications: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub method: Method,
    pub value: f64,
    pub converged: bool,
    pub budget: Budget,
    /// `(index, estimate)` pairs; the index is `k` for power methods and `n` for iterates.
    pub trace: Vec<(u32, f64)>,
}

impl SpectralEstimate {
    fn from_trace(
        method: Method,
        trace: Vec<(u32, f64)>,
        budget: Budget,
        tol: &ToleranceConfig,
    ) -> Self {
        let value = trace.last().map(|e| e.1).unwrap_or(0.0);
        let converged = cauchy_converged(&trace, tol);
        Self {
            method,
            value,
            converged,
            budget,
            trace,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

fn cauchy_converged(trace: &[(u32, f64)], tol: &ToleranceConfig) -> bool {
    match trace {
        [.., (_, prev), (_, last)] => {
            (last - prev).abs() <= tol.rtol * last.abs() + tol.atol * trace[0].1.abs()
        }
        _ => false,
    }
}

/// Strictly increasing powers `k` at which a power estimator is sampled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSchedule {
    k_values: Vec<u32>,
}

impl PowerSchedule {
    pub fn new(k_values: Vec<u32>) -> Result<Self> {
        if k_values.is_empty() {
            return Err(Error::InvalidArgument("power schedule is empty".into()));
        }
        if k_values[0] == 0 {
            return Err(Error::InvalidArgument("powers must be positive".into()));
        }
        if k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "powers must be strictly increasing".into(),
            ));
        }
        if *k_values.last().unwrap() > MAX_POWER {
            return Err(Error::InvalidArgument(format!(
                "powers are capped at {MAX_POWER}"
            )));
        }
        Ok(Self { k_values })
    }

    /// `1, 2, 4, …` up to and including the largest power of two `≤ k_max`.
    pub fn doubling(k_max: u32) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be positive".into()));
        }
        let ks = std::iter::successors(Some(1u32), |k| k.checked_mul(2))
            .take_while(|&k| k <= k_max)
            .collect();
        Self::new(ks)
    }

    pub fn k_values(&self) -> &[u32] {
        &self.k_values
    }
}

impl Default for PowerSchedule {
    fn default() -> Self {
        Self::doubling(1024).expect("valid default schedule")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rtol: f64,
    /// In units of the first trace entry, which keeps the stopping index
    /// unchanged under positive scaling of `T`.
    pub atol: f64,
    pub max_iterations: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-6,
            atol: 1e-12,
            max_iterations: 1000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument(
                "rtol and atol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `T^k = e^{log_scale} · unit`; `unit` is `None` once the power is exactly zero.
#[derive(Clone, Debug)]
struct ScaledPower {
    k: u32,
    unit: Option<ComplexMatrix>,
    log_scale: f64,
}

impl ScaledPower {
    fn normalize(k: u32, m: ComplexMatrix, log_scale: f64) -> Result<Self> {
        let s = m.frobenius_norm();
        if s == 0.0 {
            return Ok(Self {
                k,
                unit: None,
                log_scale: f64::NEG_INFINITY,
            });
        }
        let log_scale = log_scale + s.ln();
        let unit = m.scale(1.0 / s);
        if !log_scale.is_finite() || !unit.is_finite() {
            return Err(Error::NumericalFailure {
                routine: "scaled_power",
                hash: unit.content_hash(),
            });
        }
        Ok(Self {
            k,
            unit: Some(unit),
            log_scale,
        })
    }

    fn base(t: &ComplexMatrix) -> Result<Self> {
        t.check_finite()?;
        Self::normalize(1, t.clone(), 0.0)
    }

    fn product(&self, other: &ScaledPower, mults: &mut usize) -> Result<Self> {
        let k = self.k + other.k;
        match (&self.unit, &other.unit) {
            (Some(a), Some(b)) => {
                *mults += 1;
                Self::normalize(k, a.matmul(b), self.log_scale + other.log_scale)
            }
            _ => Ok(Self {
                k,
                unit: None,
                log_scale: f64::NEG_INFINITY,
            }),
        }
    }

    /// `e^{(log_scale + ln f(unit)) / k}` for a positively homogeneous `f`.
    fn root_of(&self, f: impl FnOnce(&ComplexMatrix) -> Result<f64>) -> Result<f64> {
        let Some(unit) = &self.unit else {
            return Ok(0.0);
        };
        let v = f(unit)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(((self.log_scale + v.ln()) / self.k as f64).exp())
    }
}

/// Walks the schedule, squaring when the next power doubles the current one and
/// falling back to binary powering of the base otherwise.
fn power_walk(
    t: &ComplexMatrix,
    schedule: &PowerSchedule,
    mults: &mut usize,
    mut visit: impl FnMut(&ScaledPower) -> Result<()>,
) -> Result<()> {
    let base = ScaledPower::base(t)?;
    let mut cur: Option<ScaledPower> = None;
    for &k in schedule.k_values() {
        let next = match &cur {
            Some(p) if p.k * 2 == k => p.product(p, mults)?,
            _ => binary_power(&base, k, mults)?,
        };
        visit(&next)?;
        cur = Some(next);
    }
    Ok(())
}

fn binary_power(base: &ScaledPower, k: u32, mults: &mut usize) -> Result<ScaledPower> {
    let mut acc: Option<ScaledPower> = None;
    let mut sq = base.clone();
    let mut e = k;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => a.product(&sq, mults)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq = sq.product(&sq, mults)?;
    }
    Ok(acc.expect("k >= 1"))
}

/// Gelfand's formula `‖T^k‖^{1/k}` along the schedule.
pub fn estimate_gelfand(t: &ComplexMatrix, schedule: &PowerSchedule) -> Result<SpectralEstimate> {
    let mut mults = 0;
    let mut trace = Vec::with_capacity(schedule.k_values().len());
    power_walk(t, schedule, &mut mults, |p| {
        trace.push((p.k, p.root_of(operator_norm)?));
        Ok(())
    })?;
    let budget = Budget {
        iterations: trace.len(),
        matrix_multiplications: mults,
    };
    Ok(SpectralEstimate::from_trace(
        Method::Gelfand,
        trace,
        budget,
        &ToleranceConfig::default(),
    ))
}

/// `‖Δλⁿ(T)‖` for `n = 0, 1, …` until the Cauchy test passes or the iteration
/// budget runs out. Each value bounds `r(T)` from above.
pub fn estimate_aluthge_iterate(
    t: &ComplexMatrix,
    cfg: &AluthgeConfig,
    tol: &ToleranceConfig,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    tol.validate()?;
    let mut cur = t.clone();
    let mut trace = vec![(0u32, operator_norm(&cur)?)];
    let mut mults = 0;
    let mut converged = false;
    for n in 1..=tol.max_iterations {
        cur = aluthge(&cur, cfg)?;
        // polar factors (1) plus the three products of the transform
        mults += 4;
        trace.push((n as u32, operator_norm(&cur)?));
        if cauchy_converged(&trace, tol) {
            converged = true;
            break;
        }
    }
    let budget = Budget {
        iterations: trace.len() - 1,
        matrix_multiplications: mults,
    };
    let mut est = SpectralEstimate::from_trace(Method::AluthgeIterate, trace, budget, tol);
    est.converged = converged;
    Ok(est)
}

/// `‖Δλⁿ(T^k)‖^{1/k}` along the schedule.
pub fn estimate_aluthge_power(
    t: &ComplexMatrix,
    cfg: &AluthgeConfig,
    n: usize,
    schedule: &PowerSchedule,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    let mut mults = 0;
    let mut trace = Vec::with_capacity(schedule.k_values().len());
    power_walk(t, schedule, &mut mults, |p| {
        let v = p.root_of(|u| operator_norm(&aluthge_iterate(u, cfg, n)?))?;
        trace.push((p.k, v));
        Ok(())
    })?;
    mults += 4 * n * trace.len();
    let budget = Budget {
        iterations: trace.len(),
        matrix_multiplications: mults,
    };
    Ok(SpectralEstimate::from_trace(
        Method::AluthgePower,
        trace,
        budget,
        &ToleranceConfig::default(),
    ))
}

/// `w(Δλⁿ(T^k))^{1/k}` along the schedule.
pub fn estimate_numrad_power(
    t: &ComplexMatrix,
    cfg: &AluthgeConfig,
    n: usize,
    schedule: &PowerSchedule,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    let mut mults = 0;
    let mut trace = Vec::with_capacity(schedule.k_values().len());
    power_walk(t, schedule, &mut mults, |p| {
        let v = p.root_of(|u| {
            let d = aluthge_iterate(u, cfg, n)?;
            Ok(numerical_radius(&d, default_tolerance(&d)?)?.w)
        })?;
        trace.push((p.k, v));
        Ok(())
    })?;
    mults += 4 * n * trace.len();
    let budget = Budget {
        iterations: trace.len(),
        matrix_multiplications: mults,
    };
    Ok(SpectralEstimate::from_trace(
        Method::NumradPower,
        trace,
        budget,
        &ToleranceConfig::default(),
    ))
}

/// `T / (r(T) + ε)`, whose spectral radius is below one.
pub fn rota_scaled(t: &ComplexMatrix, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    let r = spectral_radius_oracle(t)?;
    Ok(t.scale(1.0 / (r + epsilon)))
}
