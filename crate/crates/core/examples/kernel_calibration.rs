//! Calibrates the zonal kernels up to `h = 6` on S^7 and prints the constant,
//! its spread over probe pairs, and the diagonal, which is `dim H_{h,m}`.
//!
//! `cargo run --release --example kernel_calibration`

use qsphere::kernel::{CalibrationConfig, KernelBank};

fn main() -> qsphere::Result<()> {
    let cfg = CalibrationConfig::default();
    let bank = KernelBank::calibrate(2, 6, &cfg)?;
    println!("{} samples, {} probe pairs per kernel", cfg.samples, cfg.probes);
    println!("{:>3} {:>3} {:>14} {:>8} {:>10}", "h", "m", "c", "spread", "K(x,x)");
    for k in bank.kernels() {
        println!("{:>3} {:>3} {:>14.6e} {:>8.4} {:>10.3}", k.index.h, k.index.m, k.c, k.spread, k.diagonal());
    }
    Ok(())
}
