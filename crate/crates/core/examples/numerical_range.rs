//! Numerical radius and field-of-values boundary, written as CSV to stdout.

use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::numrange::{default_tolerance, fov_boundary, numerical_radius, peripheral_angle};

fn main() -> specrad::error::Result<()> {
    let t = generate(
        &EnsembleSpec::new(EnsembleKind::Companion, 3, 0).with_params(vec![0.5, -1.0, 0.25]),
    )?;
    let res = numerical_radius(&t, default_tolerance(&t)?)?;
    eprintln!("w(T) = {:.12} at angle {:.6}", res.w, res.argmax_angle);
    eprintln!("peripheral angle {:.6}", peripheral_angle(&t)?.radians());
    println!("re,im");
    for z in fov_boundary(&t, 128)? {
        println!("{},{}", z.re, z.im);
    }
    Ok(())
}
