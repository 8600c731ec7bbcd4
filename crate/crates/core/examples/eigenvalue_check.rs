//! Applies finite-difference Laplace-Beltrami and sublaplacian operators to
//! kernel sections and compares with `h(h+4n-2)` and `(h-2m)(h-2m+2)`.
//!
//! `cargo run --release --example eigenvalue_check`

use qsphere::diffops::{eigencheck, FDConfig};
use qsphere::kernel::{CalibrationConfig, KernelBank};
use qsphere::quat::SpherePoint;

fn main() -> qsphere::Result<()> {
    let bank = KernelBank::calibrate(2, 5, &CalibrationConfig::default())?;
    let x0 = SpherePoint::basis(2, 0);
    for (label, fd) in
        [("tau = 1e-2, Richardson", FDConfig::default()), ("tau = 1e-1, plain", FDConfig::new(0.1, false)?)]
    {
        println!("{label}");
        for k in bank.kernels() {
            let r = eigencheck(k, &x0, 64, 1, &fd)?;
            println!(
                "  ({},{})  Δ {:9.4} / {:>4}   Γ {:8.4} / {:>3}   max rel err {:.1e}",
                k.index.h,
                k.index.m,
                r.lambda_delta_est,
                r.lambda_delta,
                r.lambda_gamma_est,
                r.lambda_gamma,
                r.max_rel_err()
            );
        }
    }
    Ok(())
}
