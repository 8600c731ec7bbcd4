//! The cone cutoff ψ and the multiplier `L₃ = Σ ψ(h,m) π_{h,m}` applied to a
//! point mass: components outside the cone vanish, those in the half cone are
//! untouched.
//!
//! `cargo run --release --example cone_multiplier`

use qsphere::dimension::gen_point_mass;
use qsphere::kernel::{CalibrationConfig, KernelBank};
use qsphere::quat::SpherePoint;
use qsphere::spectral::{cone_gap_check, multiplier_measure, psi, spectrum_scan};

fn main() -> qsphere::Result<()> {
    let eps = 0.1;
    println!("psi(1, v) for v/u from 0.30 to 0.70:");
    let row: Vec<String> = (0..=8).map(|i| format!("{:.3}", psi(1.0, 0.3 + 0.05 * i as f64, eps))).collect();
    println!("  {}", row.join(" "));
    for k in [2, 6, 12] {
        let g = cone_gap_check(1.0, 0.5_f64.powi(k))?;
        println!("cone gap at b/a = 2^-{k}: {g:.6}, psi = {}", psi(1.0, g, eps));
    }

    let bank = KernelBank::calibrate(2, 6, &CalibrationConfig::default())?;
    let delta = gen_point_mass(&SpherePoint::basis(2, 0));
    let filtered = multiplier_measure(&delta, &bank, eps, 200_000, 1)?;
    let before = spectrum_scan(&delta, &bank, eps, 256, 2)?;
    let after = spectrum_scan(&filtered, &bank, eps, 256, 2)?;
    println!("{:>6} {:>6} {:>10} {:>12} {:>10}", "(h,m)", "psi", "|π δ|²", "|π L₃δ|²", "se");
    for (b, a) in before.entries.iter().zip(&after.entries) {
        println!(
            "{:>6} {:>6.3} {:>10.3} {:>12.3} {:>10.3}",
            format!("({},{})", a.h, a.m),
            psi(a.h as f64, a.m as f64, eps),
            b.norm_sq,
            a.norm_sq,
            a.mc_stderr
        );
    }
    Ok(())
}
