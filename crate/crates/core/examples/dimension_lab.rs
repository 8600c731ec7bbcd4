//! Correlation dimension of the fixture measures, with the fitted
//! `log C(r)` against `log r` data for one of them.
//!
//! `cargo run --release --example dimension_lab`

use qsphere::dimension::{
    correlation_dimension, gen_repeated_point, gen_sp1_orbit, gen_subsphere, gen_uniform, s_energy,
};
use qsphere::quat::SpherePoint;

fn main() -> qsphere::Result<()> {
    let count = 20_000;
    let x0 = SpherePoint::from_real(&[0.5, 0.1, -0.3, 0.2, 0.4, 0.0, 0.6, -0.3])?;
    let measures = [
        gen_uniform(2, count, 1)?,
        gen_subsphere(2, 1, count, 2)?,
        gen_sp1_orbit(&x0, count, 3)?,
        gen_repeated_point(&x0, count)?,
    ];
    for mu in &measures {
        let est = correlation_dimension(mu)?;
        println!(
            "{:<12} s = {:.3}  (fit over r in [{:.3}, {:.3}], residual {:.3})",
            mu.name(),
            est.s_hat,
            est.r_min,
            est.r_max,
            est.residual
        );
    }

    let orbit = &measures[2];
    print!("{}", correlation_dimension(orbit)?.fit_csv());
    let small = gen_sp1_orbit(&x0, 2_000, 4)?;
    for s in [2.0, 5.0] {
        println!(
            "Riesz {s}-energy of the orbit: {:.3} at 2000 atoms, {:.3} at {count}",
            s_energy(&small, s)?,
            s_energy(orbit, s)?
        );
    }
    Ok(())
}
