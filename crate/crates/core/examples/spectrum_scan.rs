//! Spectral scans of three measures: the uniform measure only has the
//! constant component, a point mass has every component, and a measure on
//! an Sp(1)-orbit sits in between.
//!
//! `cargo run --release --example spectrum_scan`

use qsphere::dimension::{gen_point_mass, gen_sp1_orbit, gen_uniform};
use qsphere::kernel::{CalibrationConfig, KernelBank};
use qsphere::quat::SpherePoint;
use qsphere::spectral::spectrum_scan;

fn main() -> qsphere::Result<()> {
    let bank = KernelBank::calibrate(2, 6, &CalibrationConfig::default())?;
    let x0 = SpherePoint::basis(2, 0);
    let measures = [gen_uniform(2, 20_000, 1)?, gen_point_mass(&x0), gen_sp1_orbit(&x0, 20_000, 2)?];
    for mu in &measures {
        let scan = spectrum_scan(mu, &bank, 0.1, 256, 3)?;
        println!("{} ({} atoms)", mu.name(), mu.len());
        for e in &scan.entries {
            let mark = if e.flagged_nonzero { "*" } else { " " };
            let cone = if e.in_cone { "cone" } else { "" };
            println!("  ({},{}) {mark} {:>12.5} ± {:<10.5} {cone}", e.h, e.m, e.norm_sq, e.mc_stderr);
        }
    }
    Ok(())
}
