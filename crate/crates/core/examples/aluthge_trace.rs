//! Iterates the Aluthge transform on a Jordan block and prints how the
//! norm and numerical radius shrink toward the spectral radius.

use specrad::aluthge::{iterate_trace, AluthgeConfig};
use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::matrix::spectral_radius_oracle;

fn main() -> specrad::error::Result<()> {
    let t = generate(&EnsembleSpec::new(EnsembleKind::Jordan, 4, 0).with_params(vec![0.5]))?;
    let trace = iterate_trace(&t, &AluthgeConfig::new(0.5)?, 20, true)?;
    println!("r(T) = {:.6}", spectral_radius_oracle(&t)?);
    let radii = trace.numerical_radii.as_deref().unwrap_or_default();
    for (n, norm) in trace.norms.iter().enumerate() {
        println!(
            "n={n:>2}  norm={norm:.6}  w={:.6}  drift={:.2e}",
            radii[n], trace.spectra_drift[n]
        );
    }
    println!("largest norm increase: {:.2e}", trace.max_norm_increase());
    Ok(())
}
