//! Scans and dimension estimates side by side: every low-dimensional measure
//! shows in-cone spectrum at high `h`, as the lower bound `4n - 4` requires.
//!
//! `cargo run --release --example consistency_report`

use qsphere::dimension::{gen_point_mass, gen_sp1_orbit, gen_subsphere, gen_uniform, theorem_consistency_report};
use qsphere::kernel::{CalibrationConfig, KernelBank};
use qsphere::quat::SpherePoint;

fn main() -> qsphere::Result<()> {
    let bank = KernelBank::calibrate(2, 8, &CalibrationConfig::default())?;
    let x0 = SpherePoint::from_real(&[0.5, 0.1, -0.3, 0.2, 0.4, 0.0, 0.6, -0.3])?;
    let measures = [
        gen_uniform(2, 20_000, 1)?,
        gen_point_mass(&x0),
        gen_sp1_orbit(&x0, 20_000, 2)?,
        gen_subsphere(2, 1, 20_000, 3)?,
    ];
    for mu in &measures {
        let r = theorem_consistency_report(mu, &bank, 0.1, 256, 4)?;
        let high: Vec<String> =
            r.in_cone_nonzero.iter().filter(|e| 2 * e.h >= r.h_max).map(|e| format!("({},{})", e.h, e.m)).collect();
        println!(
            "{:<12} dim {:.2}  high in-cone [{}]  cone condition plausible: {}  consistent: {}",
            r.measure,
            r.dim_estimate,
            high.join(" "),
            r.cone_condition_plausible,
            r.consistent
        );
    }
    Ok(())
}
