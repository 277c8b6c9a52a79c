//! Minimizes each orbit objective over `e^A T e^{-A}` and compares the
//! result with the spectral radius. The infimum equals `r(T)` but need not
//! be attained, so the gap only shrinks with budget.

use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::matrix::spectral_radius_oracle;
use specrad::orbitopt::{minimize_orbit, ObjectiveKind, OrbitObjective, DEFAULT_RADIUS};

fn main() -> specrad::error::Result<()> {
    let t = generate(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 9))?;
    let r = spectral_radius_oracle(&t)?;
    let objectives = [
        OrbitObjective::plain_norm(),
        OrbitObjective::delta_norm(0.5, 1),
        OrbitObjective::new(ObjectiveKind::DeltaNumrad, 0.5, 1, None)?,
        OrbitObjective::rotated_at_peripheral(&t, ObjectiveKind::RotatedRealpartNorm, 0.5, 1)?,
    ];
    println!("r(T) = {r:.9}");
    for obj in &objectives {
        let res = minimize_orbit(&t, obj, 3000, DEFAULT_RADIUS, 1)?;
        println!(
            "{:<28} best {:.9}  gap {:.2e}  evals {}  boundary {}",
            format!("{:?}", obj.kind),
            res.best_value,
            res.best_value - r,
            res.evaluations,
            res.boundary_hit
        );
    }
    Ok(())
}
