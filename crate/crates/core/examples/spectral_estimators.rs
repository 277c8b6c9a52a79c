//! Runs the four spectral-radius estimators on one Ginibre matrix.

use specrad::aluthge::AluthgeConfig;
use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::estimators::{
    estimate_aluthge_iterate, estimate_aluthge_power, estimate_gelfand, estimate_numrad_power,
    PowerSchedule, ToleranceConfig,
};
use specrad::matrix::spectral_radius_oracle;

fn main() -> specrad::error::Result<()> {
    let t = generate(&EnsembleSpec::new(EnsembleKind::Ginibre, 6, 42))?;
    let cfg = AluthgeConfig::new(0.5)?;
    let schedule = PowerSchedule::doubling(1024)?;
    let r = spectral_radius_oracle(&t)?;

    let estimates = [
        estimate_gelfand(&t, &schedule)?,
        estimate_aluthge_iterate(&t, &cfg, &ToleranceConfig::default())?,
        estimate_aluthge_power(&t, &cfg, 1, &schedule)?,
        estimate_numrad_power(&t, &cfg, 1, &schedule)?,
    ];
    println!("oracle r(T) = {r:.12}");
    for e in &estimates {
        println!(
            "{:<16} {:.12}  rel gap {:.2e}  converged {}",
            e.method.name(),
            e.value,
            (e.value - r) / r,
            e.converged
        );
    }
    Ok(())
}
