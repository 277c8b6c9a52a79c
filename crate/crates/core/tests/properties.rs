use proptest::prelude::*;

use specrad::aluthge::{aluthge, polar_decompose, AluthgeConfig};
use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::matrix::{
    hermitian_eigenvalues, operator_norm, spectral_radius_oracle, ComplexMatrix, C64,
};
use specrad::normaloid::{normaloid_check, DEFAULT_DECISION_RTOL};
use specrad::numrange::{default_tolerance, fov_boundary, numerical_radius, peripheral_angle};
use specrad::orbitopt::{evaluate_objective, HermitianParams, ObjectiveKind, OrbitObjective};

fn matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |e| {
            let entries: Vec<C64> = e.into_iter().map(|(re, im)| C64::new(re, im)).collect();
            ComplexMatrix::from_row_major(n, &entries).unwrap()
        })
    })
}

fn with_generator() -> impl Strategy<Value = (ComplexMatrix, HermitianParams)> {
    matrix().prop_flat_map(|t| {
        let n = t.dim();
        prop::collection::vec(-1.0f64..1.0, n * n)
            .prop_map(move |c| (t.clone(), HermitianParams::from_coords(n, c).unwrap()))
    })
}

fn w(t: &ComplexMatrix) -> f64 {
    numerical_radius(t, default_tolerance(t).unwrap())
        .unwrap()
        .w
}

fn lambdas() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.0f64..=1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_chain(t in matrix()) {
        let r = spectral_radius_oracle(&t).unwrap();
        let norm = operator_norm(&t).unwrap();
        let w = w(&t);
        let tol = 1e-9 * (1.0 + norm);
        prop_assert!(r <= w + tol, "r {r} w {w}");
        prop_assert!(w <= norm + tol, "w {w} norm {norm}");
        prop_assert!(norm <= 2.0 * w + tol, "norm {norm} w {w}");
    }

    #[test]
    fn hermitian_radius_is_norm(t in matrix()) {
        let h = t.add(&t.adjoint()).scale(0.5);
        let norm = operator_norm(&h).unwrap();
        prop_assert!((w(&h) - norm).abs() <= 1e-9 * (1.0 + norm));
        prop_assert!((spectral_radius_oracle(&h).unwrap() - norm).abs() <= 1e-9 * (1.0 + norm));
    }

    #[test]
    fn fov_boundary_inside_radius(t in matrix()) {
        let w = w(&t);
        for z in fov_boundary(&t, 64).unwrap() {
            prop_assert!(z.norm() <= w * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn polar_reconstructs(t in matrix()) {
        let f = polar_decompose(&t).unwrap();
        let scale = 1.0 + operator_norm(&t).unwrap();
        prop_assert!(f.u.matmul(&f.p.to_complex()).max_abs_diff(&t) <= 1e-10 * scale);
        let ev = hermitian_eigenvalues(&f.p).unwrap();
        prop_assert!(ev.iter().all(|&e| e >= -1e-10 * scale));
    }

    #[test]
    fn aluthge_contracts_and_keeps_spectral_radius(t in matrix(), lambda in lambdas()) {
        let d = aluthge(&t, &AluthgeConfig::new(lambda).unwrap()).unwrap();
        let norm = operator_norm(&t).unwrap();
        let tol = 1e-9 * (1.0 + norm);
        prop_assert!(operator_norm(&d).unwrap() <= norm + tol);
        prop_assert!(w(&d) <= w(&t) + tol);
        let (rt, rd) = (spectral_radius_oracle(&t).unwrap(), spectral_radius_oracle(&d).unwrap());
        prop_assert!((rt - rd).abs() <= 1e-7 * (1.0 + norm), "r(T) {rt} r(Δ) {rd}");
    }

    #[test]
    fn aluthge_scale_equivariant(t in matrix(), lambda in lambdas(), c in 1e-3f64..1e3) {
        let cfg = AluthgeConfig::new(lambda).unwrap();
        let lhs = aluthge(&t.scale(c), &cfg).unwrap();
        let rhs = aluthge(&t, &cfg).unwrap().scale(c);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * c * (1.0 + operator_norm(&t).unwrap()));
    }

    #[test]
    fn aluthge_unitary_equivariant(t in matrix(), lambda in lambdas(), seed in any::<u64>()) {
        let q = generate(&EnsembleSpec::new(EnsembleKind::UnitaryRandom, t.dim(), seed)).unwrap();
        let cfg = AluthgeConfig::new(lambda).unwrap();
        let lhs = aluthge(&q.matmul(&t).matmul(&q.adjoint()), &cfg).unwrap();
        let rhs = q.matmul(&aluthge(&t, &cfg).unwrap()).matmul(&q.adjoint());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * (1.0 + operator_norm(&t).unwrap()));
    }

    #[test]
    fn orbit_objectives_dominate(pair in with_generator(), n in 0usize..3) {
        let (t, a) = pair;
        let r = spectral_radius_oracle(&t).unwrap();
        let eval = |kind| {
            let obj = if kind == ObjectiveKind::PlainNorm {
                OrbitObjective::plain_norm()
            } else if kind == ObjectiveKind::RotatedRealpartNorm {
                OrbitObjective::rotated_at_peripheral(&t, kind, 0.5, n).unwrap()
            } else {
                OrbitObjective::new(kind, 0.5, n, None).unwrap()
            };
            evaluate_objective(&t, &obj, &a).unwrap()
        };
        let plain = eval(ObjectiveKind::PlainNorm);
        let norm = eval(ObjectiveKind::DeltaNorm);
        let numrad = eval(ObjectiveKind::DeltaNumrad);
        let rot = eval(ObjectiveKind::RotatedRealpartNorm);
        let tol = 1e-7 * (1.0 + plain);
        prop_assert!(r <= rot + tol, "r {r} rot {rot}");
        prop_assert!(rot <= numrad + tol, "rot {rot} numrad {numrad}");
        prop_assert!(numrad <= norm + tol, "numrad {numrad} norm {norm}");
        prop_assert!(norm <= plain + tol, "norm {norm} plain {plain}");
    }

    #[test]
    fn peripheral_angle_points_at_top_eigenvalue(t in matrix()) {
        let r = spectral_radius_oracle(&t).unwrap();
        let theta = peripheral_angle(&t).unwrap();
        let rot = specrad::numrange::rotated_realpart_norm(&t, theta).unwrap();
        prop_assert!(rot >= r - 1e-9 * (1.0 + r));
    }

    #[test]
    fn normal_matrices_are_normaloid(dim in 1usize..=8, seed in any::<u64>()) {
        for kind in [EnsembleKind::NormalRandom, EnsembleKind::UnitaryRandom] {
            let t = generate(&EnsembleSpec::new(kind, dim, seed)).unwrap();
            let v = normaloid_check(&t, DEFAULT_DECISION_RTOL).unwrap();
            prop_assert!(v.is_normaloid, "{kind} dim {dim} seed {seed}: gap {}", v.relative_gap);
        }
    }

    #[test]
    fn normaloid_verdict_scale_invariant(t in matrix(), c in 1e-3f64..1e3) {
        let a = normaloid_check(&t, DEFAULT_DECISION_RTOL).unwrap();
        let b = normaloid_check(&t.scale(c), DEFAULT_DECISION_RTOL).unwrap();
        if a.relative_gap > 1e-6 || a.relative_gap < 1e-10 {
            prop_assert_eq!(a.is_normaloid, b.is_normaloid);
        }
        prop_assert!((a.relative_gap - b.relative_gap).abs() <= 1e-9);
    }
}
