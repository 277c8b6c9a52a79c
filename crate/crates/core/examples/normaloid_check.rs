use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::normaloid::{normaloid_check, verify_characterizations, DEFAULT_DECISION_RTOL};

fn main() -> specrad::error::Result<()> {
    let cases = [
        (
            "unitary",
            EnsembleSpec::new(EnsembleKind::UnitaryRandom, 4, 1),
        ),
        (
            "jordan",
            EnsembleSpec::new(EnsembleKind::Jordan, 3, 0).with_params(vec![1.0]),
        ),
        (
            "unipotent",
            EnsembleSpec::new(EnsembleKind::Unipotent, 2, 0),
        ),
    ];
    for (name, spec) in cases {
        let t = generate(&spec)?;
        let quick = normaloid_check(&t, DEFAULT_DECISION_RTOL)?;
        // the orbit checks are the slow part; 2000 evaluations each is enough to refute here
        let full = verify_characterizations(&t, 2000, 0)?;
        println!(
            "{name}: normaloid {} (gap {:.3e})",
            quick.is_normaloid, quick.relative_gap
        );
        for c in &full.witnesses {
            println!(
                "  {:?}: holds {} evidence {:.6} {:?}",
                c.which, c.holds, c.evidence, c.finding
            );
        }
        assert!(full.all_agree());
    }
    Ok(())
}
