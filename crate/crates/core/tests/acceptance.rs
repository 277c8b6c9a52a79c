//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use specrad::aluthge::{aluthge, aluthge_iterate, iterate_trace, AluthgeConfig};
use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::estimators::{
    estimate_aluthge_iterate, estimate_aluthge_power, estimate_gelfand, estimate_numrad_power,
    rota_scaled, PowerSchedule, SpectralEstimate, ToleranceConfig,
};
use specrad::matrix::{
    eigenvalues, hermitian_eigenvalues, multiset_distance, operator_norm, spectral_radius_oracle,
    ComplexMatrix, HermitianMatrix, C64,
};
use specrad::normaloid::{
    normaloid_check, verify_characterizations, Characterization, DEFAULT_DECISION_RTOL,
};
use specrad::numrange::{default_tolerance, numerical_radius};
use specrad::orbitopt::{
    evaluate_objective, minimize_orbit, minimize_orbit_observed, HermitianParams, ObjectiveKind,
    OrbitObjective, OrbitSearch,
};

const LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// 200 Ginibre matrices, dimensions cycling through 2..=8.
fn ensemble() -> Vec<ComplexMatrix> {
    (0..200u64)
        .map(|i| {
            generate(&EnsembleSpec::new(
                EnsembleKind::Ginibre,
                2 + (i as usize % 7),
                i,
            ))
            .unwrap()
        })
        .collect()
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

fn jordan2() -> ComplexMatrix {
    real(&[&[0.0, 1.0], &[0.0, 0.0]])
}

fn unipotent2() -> ComplexMatrix {
    real(&[&[1.0, 1.0], &[0.0, 1.0]])
}

fn normal_fixtures() -> Vec<(String, ComplexMatrix)> {
    let mut out = vec![
        (
            "diag(2+i, -1, 0.5i)".to_string(),
            ComplexMatrix::diagonal(&[C64::new(2.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.5)])
                .unwrap(),
        ),
        (
            "hermitian 2x2".to_string(),
            real(&[&[2.0, 1.0], &[1.0, -3.0]]),
        ),
    ];
    for dim in 2..=5 {
        for (kind, seed) in [
            (EnsembleKind::NormalRandom, 3),
            (EnsembleKind::UnitaryRandom, 4),
        ] {
            let t = generate(&EnsembleSpec::new(kind, dim, seed)).unwrap();
            out.push((format!("{kind} n={dim}"), t));
        }
    }
    out
}

fn non_normaloid_fixtures() -> Vec<(String, ComplexMatrix)> {
    let gen = |kind, dim, params: Vec<f64>| {
        generate(&EnsembleSpec::new(kind, dim, 0).with_params(params)).unwrap()
    };
    vec![
        ("jordan n=2 at 0".into(), jordan2()),
        (
            "jordan n=3 at 0.5".into(),
            gen(EnsembleKind::Jordan, 3, vec![0.5]),
        ),
        (
            "jordan n=4 at 1+i".into(),
            gen(EnsembleKind::Jordan, 4, vec![1.0, 1.0]),
        ),
        (
            "shift n=3 weights (2, 0.5)".into(),
            gen(EnsembleKind::NilpotentShift, 3, vec![2.0, 0.5]),
        ),
        ("unipotent n=2".into(), unipotent2()),
        (
            "unipotent n=3".into(),
            gen(EnsembleKind::Unipotent, 3, vec![]),
        ),
    ]
}

fn max_by<T>(items: impl IntoIterator<Item = T>, f: impl Fn(&T) -> f64) -> f64 {
    items
        .into_iter()
        .map(|x| f(&x))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn spectrum_invariance(ens: &[ComplexMatrix]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for t in ens {
        let ev = eigenvalues(t).unwrap();
        for lambda in LAMBDAS {
            let d = aluthge(t, &AluthgeConfig::new(lambda).unwrap()).unwrap();
            worst = worst.max(multiset_distance(&ev, &eigenvalues(&d).unwrap()));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("max paired eigenvalue distance {worst:.2e} over 600 cases in {elapsed:.2?}"),
    )
}

fn norm_monotonicity(ens: &[ComplexMatrix]) -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_below = f64::NEG_INFINITY;
    for t in ens {
        let r = spectral_radius_oracle(t).unwrap();
        for lambda in LAMBDAS {
            let trace = iterate_trace(t, &AluthgeConfig::new(lambda).unwrap(), 100, false).unwrap();
            worst_rise = worst_rise.max(trace.max_norm_increase());
            worst_below = worst_below.max(max_by(&trace.norms, |v| r - **v));
        }
    }
    outcome(
        worst_rise <= 1e-9 && worst_below <= 1e-9,
        format!(
            "largest norm increase {worst_rise:.2e}, largest shortfall below r {worst_below:.2e}"
        ),
    )
}

fn iterate_limit() -> Outcome {
    let cfg = AluthgeConfig::default();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let t = generate(&EnsembleSpec::new(
            EnsembleKind::Ginibre,
            2 + (i as usize % 5),
            1000 + i,
        ))
        .unwrap();
        let r = spectral_radius_oracle(&t).unwrap();
        let v = operator_norm(&aluthge_iterate(&t, &cfg, 300).unwrap()).unwrap();
        worst = worst.max((v - r) / r.max(0.1));
    }
    let gen = |kind, dim, params: Vec<f64>| {
        generate(&EnsembleSpec::new(kind, dim, 5).with_params(params)).unwrap()
    };
    let mut fixtures: Vec<ComplexMatrix> = normal_fixtures().into_iter().map(|f| f.1).collect();
    fixtures.push(jordan2());
    fixtures.push(gen(EnsembleKind::NilpotentShift, 2, vec![3.0]));
    let mut fixture_gap = 0.0f64;
    for t in &fixtures {
        let r = spectral_radius_oracle(t).unwrap();
        let v = operator_norm(&aluthge(t, &cfg).unwrap()).unwrap();
        fixture_gap = fixture_gap.max((v - r).abs());
    }
    outcome(
        worst <= 0.05 && fixture_gap <= 1e-8,
        format!("Ginibre relative gap at n=300 {worst:.3e}; normal/nilpotent gap at n=1 {fixture_gap:.2e}"),
    )
}

fn power_sandwich(ens: &[ComplexMatrix]) -> Outcome {
    let schedule = PowerSchedule::default();
    let cfg = AluthgeConfig::default();
    let mut worst_low = f64::NEG_INFINITY;
    let mut worst_high = f64::NEG_INFINITY;
    let mut worst_gelfand = 0.0f64;
    for t in ens {
        let r = spectral_radius_oracle(t).unwrap();
        let g = estimate_gelfand(t, &schedule).unwrap();
        for n in [1, 2] {
            let a = estimate_aluthge_power(t, &cfg, n, &schedule).unwrap();
            for (&(k, av), &(kg, gv)) in a.trace.iter().zip(&g.trace) {
                assert_eq!(k, kg);
                worst_low = worst_low.max(r - av);
                worst_high = worst_high.max(av - gv);
            }
        }
        if r >= 0.1 {
            worst_gelfand = worst_gelfand.max((g.value - r).abs() / r);
        }
    }
    outcome(
        worst_low <= 1e-9 && worst_high <= 1e-9 && worst_gelfand <= 0.05,
        format!(
            "max r - entry {worst_low:.2e}, max entry - Gelfand {worst_high:.2e}, \
             Gelfand k=1024 relative error {worst_gelfand:.3e}"
        ),
    )
}

fn numerical_radius_chain(ens: &[ComplexMatrix]) -> Outcome {
    let schedule = PowerSchedule::default();
    let cfg = AluthgeConfig::default();
    let mut worst_low = f64::NEG_INFINITY;
    let mut worst_high = f64::NEG_INFINITY;
    for t in ens {
        let r = spectral_radius_oracle(t).unwrap();
        let w = estimate_numrad_power(t, &cfg, 1, &schedule).unwrap();
        let a = estimate_aluthge_power(t, &cfg, 1, &schedule).unwrap();
        for (&(_, wv), &(_, av)) in w.trace.iter().zip(&a.trace) {
            worst_low = worst_low.max(r - wv);
            worst_high = worst_high.max(wv - av);
        }
    }
    let wj = numerical_radius(&jordan2(), 1e-12).unwrap().w;
    let mut herm_err = 0.0f64;
    for seed in 0..20u64 {
        let g = generate(&EnsembleSpec::new(
            EnsembleKind::Ginibre,
            2 + (seed as usize % 7),
            500 + seed,
        ))
        .unwrap();
        let h = HermitianMatrix::real_part_of(&g);
        let rho = max_by(hermitian_eigenvalues(&h).unwrap(), |x| x.abs());
        let hc = h.to_complex();
        herm_err = herm_err.max(
            (numerical_radius(&hc, default_tolerance(&hc).unwrap())
                .unwrap()
                .w
                - rho)
                .abs(),
        );
    }
    outcome(
        worst_low <= 1e-9 && worst_high <= 1e-9 && (wj - 0.5).abs() <= 1e-8 && herm_err <= 1e-9,
        format!(
            "max r - w-entry {worst_low:.2e}, max w-entry - norm-entry {worst_high:.2e}, \
             w(jordan) = {wj:.12}, Hermitian error {herm_err:.2e}"
        ),
    )
}

/// Smallest `value - r(T)` over every evaluation of an orbit search.
fn observed_floor(t: &ComplexMatrix, obj: &OrbitObjective, budget: usize) -> f64 {
    let r = spectral_radius_oracle(t).unwrap();
    let lowest = Mutex::new(f64::INFINITY);
    minimize_orbit_observed(t, obj, &OrbitSearch::new(budget, 8.0, 1), |_, v| {
        let mut l = lowest.lock().unwrap();
        *l = l.min(v);
    })
    .unwrap();
    lowest.into_inner().unwrap() - r
}

fn orbit_lower_bound(ens: &[ComplexMatrix]) -> Outcome {
    let start = Instant::now();
    let obj = OrbitObjective::delta_norm(0.5, 1);
    let floor = max_by(ens, |t| -observed_floor(t, &obj, 1000));
    let mut normal_err = 0.0f64;
    for (_, t) in normal_fixtures() {
        let r = spectral_radius_oracle(&t).unwrap();
        normal_err =
            normal_err.max((minimize_orbit(&t, &obj, 5000, 8.0, 1).unwrap().best_value - r).abs());
    }
    let mut reach = Vec::new();
    for t in [jordan2(), unipotent2()] {
        let r = spectral_radius_oracle(&t).unwrap();
        reach.push(minimize_orbit(&t, &obj, 5000, 8.0, 1).unwrap().best_value - r);
    }
    let elapsed = start.elapsed();
    outcome(
        floor <= 1e-6
            && normal_err <= 1e-6
            && reach.iter().all(|g| *g <= 0.05)
            && elapsed < Duration::from_secs(60),
        format!(
            "largest dip below r {floor:.2e}; normal |best - r| {normal_err:.2e}; \
             nilpotent gap {:.4}, unipotent gap {:.4}; {elapsed:.2?}",
            reach[0], reach[1]
        ),
    )
}

fn rota_reachability(ens: &[ComplexMatrix]) -> Outcome {
    let best: Vec<f64> = ens[..20]
        .iter()
        .map(|t| {
            let s = rota_scaled(t, 0.1).unwrap();
            minimize_orbit(&s, &OrbitObjective::plain_norm(), 5000, 8.0, 1)
                .unwrap()
                .best_value
        })
        .collect();
    let worst = max_by(&best, |v| **v);
    outcome(
        worst <= 1.05,
        format!("worst best_value {worst:.4} over 20 matrices"),
    )
}

fn rotated_objective(ens: &[ComplexMatrix]) -> Outcome {
    let mut floor = f64::NEG_INFINITY;
    let mut dominance = f64::NEG_INFINITY;
    for (i, t) in ens.iter().enumerate() {
        let obj =
            OrbitObjective::rotated_at_peripheral(t, ObjectiveKind::RotatedRealpartNorm, 0.5, 1)
                .unwrap();
        floor = floor.max(-observed_floor(t, &obj, 500));
        let plain = OrbitObjective::delta_norm(0.5, 1);
        for j in 0..5u64 {
            let g = generate(&EnsembleSpec::new(
                EnsembleKind::Ginibre,
                t.dim(),
                10_000 + 10 * i as u64 + j,
            ))
            .unwrap();
            let a =
                HermitianParams::from_hermitian(&HermitianMatrix::real_part_of(&g)).project(8.0);
            let re = evaluate_objective(t, &obj, &a).unwrap();
            let full = evaluate_objective(t, &plain, &a).unwrap();
            dominance = dominance.max(re - full);
        }
    }
    let mut normal_gap = f64::NEG_INFINITY;
    for (_, t) in normal_fixtures() {
        let obj =
            OrbitObjective::rotated_at_peripheral(&t, ObjectiveKind::RotatedRealpartNorm, 0.5, 1)
                .unwrap();
        let r = spectral_radius_oracle(&t).unwrap();
        normal_gap = normal_gap.max(minimize_orbit(&t, &obj, 5000, 8.0, 1).unwrap().best_value - r);
    }
    outcome(
        floor <= 1e-6 && normal_gap <= 0.05 && dominance <= 1e-9,
        format!(
            "largest dip below r {floor:.2e}; normal best - r {normal_gap:.2e}; \
             max ||Re(S)|| - ||S|| {dominance:.2e}"
        ),
    )
}

fn normaloid_suite() -> Outcome {
    let mut failures = Vec::new();
    for (expected, fixtures) in [(true, normal_fixtures()), (false, non_normaloid_fixtures())] {
        for (name, t) in fixtures {
            if normaloid_check(&t, DEFAULT_DECISION_RTOL)
                .unwrap()
                .is_normaloid
                != expected
            {
                failures.push(format!("{name} misclassified"));
            }
            let v = verify_characterizations(&t, 5000, 1).unwrap();
            for c in v.witnesses.iter().filter(|c| !c.holds) {
                failures.push(format!(
                    "{name}: {:?} disagrees (evidence {:.3e})",
                    c.which, c.evidence
                ));
            }
        }
    }
    let j = jordan2();
    let v = verify_characterizations(&j, 5000, 1).unwrap();
    let power = v.check(Characterization::PowerNorm).unwrap();
    let j2 = j.matmul(&j);
    let delta_sq = operator_norm(&aluthge(&j2, &AluthgeConfig::default()).unwrap()).unwrap();
    let norm_sq = operator_norm(&j).unwrap().powi(2);
    if power.witness_k != Some(2) || delta_sq != 0.0 || norm_sq != 1.0 {
        failures.push(format!(
            "jordan power witness {:?}, ||D(T^2)|| = {delta_sq}, ||T||^2 = {norm_sq}",
            power.witness_k
        ));
    }
    let count = normal_fixtures().len() + non_normaloid_fixtures().len();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} fixtures classified and all checks agree; jordan witness k = 2")
        } else {
            failures.join("; ")
        },
    )
}

fn estimators_of(t: &ComplexMatrix) -> Vec<SpectralEstimate> {
    let cfg = AluthgeConfig::default();
    let schedule = PowerSchedule::doubling(64).unwrap();
    vec![
        estimate_gelfand(t, &schedule).unwrap(),
        estimate_aluthge_iterate(t, &cfg, &ToleranceConfig::default()).unwrap(),
        estimate_aluthge_power(t, &cfg, 1, &schedule).unwrap(),
        estimate_numrad_power(t, &cfg, 1, &schedule).unwrap(),
    ]
}

fn equivariance() -> Outcome {
    let mut unitary_err = 0.0f64;
    let mut scale_err = 0.0f64;
    for i in 0..100u64 {
        let dim = 2 + (i as usize % 7);
        let t = generate(&EnsembleSpec::new(EnsembleKind::Ginibre, dim, 20_000 + i)).unwrap();
        let q = generate(&EnsembleSpec::new(
            EnsembleKind::UnitaryRandom,
            dim,
            30_000 + i,
        ))
        .unwrap();
        for lambda in LAMBDAS {
            let cfg = AluthgeConfig::new(lambda).unwrap();
            let lhs = aluthge(&q.matmul(&t).matmul(&q.adjoint()), &cfg).unwrap();
            let rhs = q.matmul(&aluthge(&t, &cfg).unwrap()).matmul(&q.adjoint());
            unitary_err = unitary_err.max(lhs.max_abs_diff(&rhs));
        }
        if i % 5 == 0 {
            let base = estimators_of(&t);
            for c in [1e-3, 0.5, 3.0, 1e3] {
                for (b, s) in base.iter().zip(estimators_of(&t.scale(c))) {
                    for (&(_, x), &(_, y)) in b.trace.iter().zip(&s.trace) {
                        scale_err =
                            scale_err.max((y - c * x).abs() / (c * x).max(f64::MIN_POSITIVE));
                    }
                    if b.trace.len() != s.trace.len() {
                        scale_err = f64::INFINITY;
                    }
                }
            }
        }
    }
    outcome(
        unitary_err <= 1e-9 && scale_err <= 1e-9,
        format!(
            "max |D(QTQ*) - QD(T)Q*| {unitary_err:.2e}; max relative scaling error {scale_err:.2e}"
        ),
    )
}

fn determinism() -> Outcome {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_specrad"))
            .args([
                "--threads",
                threads,
                "ensemble",
                "--kind",
                "ginibre",
                "--dim",
                "4",
                "--count",
                "12",
                "--seed",
                "42",
            ])
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let (a, b, c) = (run("1"), run("1"), run("3"));
    outcome(
        a == b && a == c && !a.is_empty(),
        format!(
            "{} bytes, identical across repeated runs and thread counts",
            a.len()
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let ens = ensemble();
    let criteria: Vec<Criterion> = vec![
        (
            "spectrum invariance under the transform",
            Box::new(|| spectrum_invariance(&ens)),
        ),
        (
            "norm monotonicity of the iterates",
            Box::new(|| norm_monotonicity(&ens)),
        ),
        (
            "iterate norms approach the spectral radius",
            Box::new(iterate_limit),
        ),
        ("power-limit sandwich", Box::new(|| power_sandwich(&ens))),
        (
            "numerical-radius chain",
            Box::new(|| numerical_radius_chain(&ens)),
        ),
        (
            "orbit lower bound and reachability",
            Box::new(|| orbit_lower_bound(&ens)),
        ),
        (
            "scaled similarity reaches a contraction",
            Box::new(|| rota_reachability(&ens)),
        ),
        (
            "rotated real-part objective",
            Box::new(|| rotated_objective(&ens)),
        ),
        (
            "normaloid classification and characterizations",
            Box::new(normaloid_suite),
        ),
        ("unitary and scale equivariance", Box::new(equivariance)),
        ("ensemble output determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.passed);
        println!(
            "criterion {:>2} {} {name}: {} [{:.1?}]",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
