//! Nelder–Mead simplex minimizer.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han for `d ≥ 2` and the
//! classical ones in one dimension. When the simplex collapses before the
//! evaluation budget is spent it is rebuilt around the best vertex.

use crate::error::Result;

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    pub initial_step: f64,
    /// Collapse threshold on the spread of vertex values.
    pub ftol: f64,
    /// Collapse threshold on the simplex diameter (max-norm).
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 1000,
            initial_step: 0.1,
            ftol: 1e-13,
            xtol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub rebuilds: usize,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn for_dim(d: usize) -> Self {
        if d < 2 {
            return Self {
                reflect: 1.0,
                expand: 2.0,
                contract: 0.5,
                shrink: 0.5,
            };
        }
        let d = d as f64;
        Self {
            reflect: 1.0,
            expand: 1.0 + 2.0 / d,
            contract: 0.75 - 1.0 / (2.0 * d),
            shrink: 1.0 - 1.0 / d,
        }
    }
}

/// Minimizes `f` from `start`. The objective is never called more than
/// `max_evaluations` times; the best point seen is returned.
pub fn minimize<F>(mut f: F, start: &[f64], opts: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = start.len();
    let coef = Coefficients::for_dim(d);
    let mut evals = 0usize;
    let budget = opts.max_evaluations.max(1);

    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };

    let mut best_x = start.to_vec();
    let mut best_f = eval(start, &mut evals)?;
    if d == 0 {
        return Ok(SimplexResult {
            x: best_x,
            value: best_f,
            evaluations: evals,
            rebuilds: 0,
        });
    }

    let mut rebuilds = 0usize;
    // evaluations without meaningful progress before the simplex is rebuilt
    let stall_window = 40 * (d + 1);
    let mut step = opts.initial_step;
    'outer: while evals < budget {
        // build simplex around the incumbent
        let mut pts: Vec<Vec<f64>> = vec![best_x.clone()];
        let mut vals: Vec<f64> = vec![best_f];
        for i in 0..d {
            if evals >= budget {
                break 'outer;
            }
            let mut p = best_x.clone();
            p[i] += step;
            let v = eval(&p, &mut evals)?;
            pts.push(p);
            vals.push(v);
        }

        let mut stall_ref = best_f;
        let mut stall_since = evals;
        loop {
            let mut order: Vec<usize> = (0..=d).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            if vals[0] < best_f {
                best_f = vals[0];
                best_x = pts[0].clone();
            }

            let spread = vals[d] - vals[0];
            let diameter = pts[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            let flat = spread.is_finite() && spread <= opts.ftol * (1.0 + vals[0].abs());
            if flat || diameter <= opts.xtol {
                break;
            }
            if vals[0] < stall_ref - 1e-9 * (1.0 + stall_ref.abs()) {
                stall_ref = vals[0];
                stall_since = evals;
            } else if evals - stall_since > stall_window {
                break;
            }
            if evals >= budget {
                break 'outer;
            }

            let centroid: Vec<f64> = (0..d)
                .map(|j| pts[..d].iter().map(|p| p[j]).sum::<f64>() / d as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&pts[d])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(coef.reflect);
            let fr = eval(&xr, &mut evals)?;
            if fr < vals[0] {
                if evals >= budget {
                    pts[d] = xr;
                    vals[d] = fr;
                    continue;
                }
                let xe = along(coef.reflect * coef.expand);
                let fe = eval(&xe, &mut evals)?;
                if fe < fr {
                    pts[d] = xe;
                    vals[d] = fe;
                } else {
                    pts[d] = xr;
                    vals[d] = fr;
                }
            } else if fr < vals[d - 1] {
                pts[d] = xr;
                vals[d] = fr;
            } else {
                if evals >= budget {
                    continue;
                }
                let (xc, fc) = if fr < vals[d] {
                    let xc = along(coef.reflect * coef.contract);
                    let fc = eval(&xc, &mut evals)?;
                    (xc, fc)
                } else {
                    let xc = along(-coef.contract);
                    let fc = eval(&xc, &mut evals)?;
                    (xc, fc)
                };
                if fc < fr.min(vals[d]) {
                    pts[d] = xc;
                    vals[d] = fc;
                } else {
                    for i in 1..=d {
                        if evals >= budget {
                            continue 'outer;
                        }
                        let p: Vec<f64> = pts[0]
                            .iter()
                            .zip(&pts[i])
                            .map(|(b, x)| b + coef.shrink * (x - b))
                            .collect();
                        vals[i] = eval(&p, &mut evals)?;
                        pts[i] = p;
                    }
                }
            }
        }

        rebuilds += 1;
        // alternate between fine and coarse restarts
        step = opts.initial_step * 0.5f64.powi((rebuilds % 6) as i32 + 1);
    }

    Ok(SimplexResult {
        x: best_x,
        value: best_f,
        evaluations: evals,
        rebuilds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| Ok((x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + (x[2] - 0.5).powi(2)),
            &[0.0, 0.0, 0.0],
            &SimplexOptions {
                max_evaluations: 2000,
                initial_step: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.value < 1e-10, "{r:?}");
        assert!((r.x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x| Ok(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)),
            &[-1.2, 1.0],
            &SimplexOptions {
                max_evaluations: 3000,
                initial_step: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.value < 1e-8, "{r:?}");
    }

    #[test]
    fn nonsmooth_max_abs() {
        let r = minimize(
            |x| Ok(x.iter().map(|v| (v - 0.3).abs()).fold(0.0, f64::max)),
            &[2.0; 6],
            &SimplexOptions {
                max_evaluations: 5000,
                initial_step: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.value < 1e-3, "{r:?}");
    }

    #[test]
    fn respects_budget() {
        let mut calls = 0;
        let r = minimize(
            |x| {
                calls += 1;
                Ok(x.iter().map(|v| v * v).sum())
            },
            &[1.0; 10],
            &SimplexOptions {
                max_evaluations: 37,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(calls, r.evaluations);
        assert!(r.evaluations <= 37);
    }

    #[test]
    fn one_dimensional() {
        let r = minimize(
            |x| Ok((x[0] - 3.0).powi(2)),
            &[0.0],
            &SimplexOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 3.0).abs() < 1e-5);
    }
}
