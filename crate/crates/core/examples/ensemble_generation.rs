//! Seeded ensembles are reproducible: the same `(kind, dim, seed)` gives the
//! same matrix on every run.

use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::matrix::{operator_norm, spectral_radius_oracle};

fn main() -> specrad::error::Result<()> {
    for kind in EnsembleKind::ALL {
        let spec = match kind {
            EnsembleKind::Companion => {
                EnsembleSpec::new(kind, 4, 0).with_params(vec![1.0, 0.0, -2.0, 0.5])
            }
            _ => EnsembleSpec::new(kind, 4, 7),
        };
        let t = generate(&spec)?;
        println!(
            "{kind:<15} r {:.6}  norm {:.6}  hash {:016x}",
            spectral_radius_oracle(&t)?,
            operator_norm(&t)?,
            t.content_hash()
        );
    }
    Ok(())
}
