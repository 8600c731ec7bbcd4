//! Finite-difference versions of the flow derivatives `T_𝐢, T_𝐣, T_𝐤`, the
//! sublaplacian `Γ = -(T_𝐢² + T_𝐣² + T_𝐤²)` and the Laplace-Beltrami operator,
//! plus checks of their eigenvalues on kernel sections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{CalibratedKernel, KernelIndex};
use crate::quat::{flow, geodesic_unchecked, sample_sphere, subseed, tangent_frame, Axis, SpherePoint};

const TAG_EIGEN: u64 = 0x45_49_47;

/// Step size and extrapolation for the difference quotients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FDConfig {
    pub step: f64,
    pub richardson: bool,
}

impl FDConfig {
    pub const MIN_STEP: f64 = 1e-4;
    pub const MAX_STEP: f64 = 1e-1;

    pub fn new(step: f64, richardson: bool) -> Result<Self> {
        if !(Self::MIN_STEP..=Self::MAX_STEP).contains(&step) {
            return Err(Error::InvalidConfig(format!(
                "finite-difference step {step} outside [{}, {}]",
                Self::MIN_STEP,
                Self::MAX_STEP
            )));
        }
        Ok(Self { step, richardson })
    }
}

impl Default for FDConfig {
    fn default() -> Self {
        Self { step: 1e-2, richardson: true }
    }
}

// Second derivative at 0 of t -> g(t), optionally Richardson-extrapolated
// from steps tau and tau/2.
fn second_derivative<G: Fn(f64) -> f64>(g: G, cfg: &FDConfig) -> f64 {
    let g0 = g(0.0);
    let d = |tau: f64| (g(tau) - 2.0 * g0 + g(-tau)) / (tau * tau);
    let coarse = d(cfg.step);
    if cfg.richardson {
        (4.0 * d(cfg.step / 2.0) - coarse) / 3.0
    } else {
        coarse
    }
}

fn first_derivative<G: Fn(f64) -> f64>(g: G, cfg: &FDConfig) -> f64 {
    let d = |tau: f64| (g(tau) - g(-tau)) / (2.0 * tau);
    let coarse = d(cfg.step);
    if cfg.richardson {
        (4.0 * d(cfg.step / 2.0) - coarse) / 3.0
    } else {
        coarse
    }
}

/// `T_axis f(x) = d/dt f(exp(-axis t) x)` at `t = 0`.
pub fn t_axis<F>(f: F, x: &SpherePoint, axis: Axis, cfg: &FDConfig) -> f64
where
    F: Fn(&SpherePoint) -> f64,
{
    first_derivative(|t| f(&flow(x, axis, -t)), cfg)
}

/// `Γ f(x) = -(T_𝐢² + T_𝐣² + T_𝐤²) f(x)`.
pub fn gamma_apply<F>(f: F, x: &SpherePoint, cfg: &FDConfig) -> f64
where
    F: Fn(&SpherePoint) -> f64,
{
    -Axis::ALL.iter().map(|&axis| second_derivative(|t| f(&flow(x, axis, t)), cfg)).sum::<f64>()
}

/// Laplace-Beltrami operator (nonnegative convention) as minus the sum of
/// second derivatives along geodesics in an orthonormal tangent frame.
pub fn laplace_beltrami_apply<F>(f: F, y: &SpherePoint, cfg: &FDConfig) -> f64
where
    F: Fn(&SpherePoint) -> f64,
{
    -tangent_frame(y).iter().map(|e| second_derivative(|t| f(&geodesic_unchecked(y, e, t)), cfg)).sum::<f64>()
}

/// Estimated eigenvalues of `Δ` and `Γ` on `y -> K_{h,m}(x0, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub index: KernelIndex,
    pub lambda_delta_est: f64,
    pub lambda_gamma_est: f64,
    pub rel_err_delta: f64,
    pub rel_err_gamma: f64,
    pub lambda_delta: f64,
    pub lambda_gamma: f64,
    pub probes_used: usize,
}

impl EigenReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rel_err_delta.max(self.rel_err_gamma)
    }
}

/// Relative error with the denominator floored at 1, so zero eigenvalues are
/// compared in absolute terms.
pub fn eigen_rel_err(est: f64, exact: f64) -> f64 {
    (est - exact).abs() / exact.abs().max(1.0)
}

/// Applies both operators to the kernel section at `x0` on a pool of `probes`
/// random points, keeps the points where `|f| > 0.1 max |f|`, and reports the
/// median ratios `Δf / f` and `Γf / f`.
pub fn eigencheck(
    ck: &CalibratedKernel,
    x0: &SpherePoint,
    probes: usize,
    seed: u64,
    cfg: &FDConfig,
) -> Result<EigenReport> {
    let idx = ck.index;
    let f = |y: &SpherePoint| ck.kernel_from_inner(x0.inner(y));
    ck.kernel(x0, x0)?;

    let pool = sample_sphere(idx.n, probes.max(1), subseed(seed, TAG_EIGEN))?;
    let values: Vec<f64> = pool.iter().map(f).collect();
    let max = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if max.is_nan() || max <= 0.0 {
        return Err(Error::DegenerateEigencheck { h: idx.h, m: idx.m });
    }

    let mut delta = Vec::new();
    let mut gamma = Vec::new();
    for (y, fy) in pool.iter().zip(&values) {
        if fy.abs() <= 0.1 * max {
            continue;
        }
        delta.push(laplace_beltrami_apply(f, y, cfg) / fy);
        gamma.push(gamma_apply(f, y, cfg) / fy);
    }
    if delta.is_empty() {
        return Err(Error::DegenerateEigencheck { h: idx.h, m: idx.m });
    }

    let probes_used = delta.len();
    let lambda_delta_est = median(&mut delta);
    let lambda_gamma_est = median(&mut gamma);
    Ok(EigenReport {
        index: idx,
        lambda_delta_est,
        lambda_gamma_est,
        rel_err_delta: eigen_rel_err(lambda_delta_est, idx.lambda_delta()),
        rel_err_gamma: eigen_rel_err(lambda_gamma_est, idx.lambda_gamma()),
        lambda_delta: idx.lambda_delta(),
        lambda_gamma: idx.lambda_gamma(),
        probes_used,
    })
}

pub(crate) fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Eigenvalues of `sqrt(Δ + (2n-1)²) - (2n-1)` and `sqrt(1 + Γ) - 1` on
/// `H_{h,m}`; both radicands are perfect squares, giving `(h, h - 2m)`.
pub fn l1_l2_identity(h: usize, m: usize, n: usize) -> (f64, f64) {
    let shift = (2 * n - 1) as f64;
    let delta = (h * (h + 4 * n - 2)) as f64;
    let k = h.saturating_sub(2 * m);
    let gamma = (k * (k + 2)) as f64;
    ((delta + shift * shift).sqrt() - shift, (1.0 + gamma).sqrt() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{random_point, stream_rng};

    #[test]
    fn step_range_is_enforced() {
        assert!(FDConfig::new(1e-2, true).is_ok());
        assert!(FDConfig::new(0.5, true).is_err());
        assert!(FDConfig::new(1e-5, false).is_err());
    }

    #[test]
    fn constants_are_annihilated() {
        let cfg = FDConfig::default();
        let mut rng = stream_rng(1, 0);
        let x = random_point(&mut rng, 2);
        let one = |_: &SpherePoint| 1.0;
        assert_eq!(t_axis(one, &x, Axis::J, &cfg), 0.0);
        assert_eq!(gamma_apply(one, &x, &cfg), 0.0);
        assert_eq!(laplace_beltrami_apply(one, &x, &cfg), 0.0);
    }

    #[test]
    fn t_axis_of_real_part_at_e1_is_zero() {
        let cfg = FDConfig::default();
        let e1 = SpherePoint::basis(2, 0);
        let f = |y: &SpherePoint| y.coords()[0].re;
        assert!(t_axis(f, &e1, Axis::I, &cfg).abs() < 1e-12);
        // Im_𝐢 x_1 along exp(-𝐢t) e_1 is -sin t
        let g = |y: &SpherePoint| y.coords()[0].i;
        assert!((t_axis(g, &e1, Axis::I, &cfg) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_coordinate_functions_are_eigenfunctions() {
        // x -> <x, a>_R is in H_{1,0}: Δ = 4n - 1, Γ = 3
        let cfg = FDConfig::default();
        let mut rng = stream_rng(2, 0);
        for n in 2..=3 {
            let a = random_point(&mut rng, n);
            let y = random_point(&mut rng, n);
            let f = |z: &SpherePoint| z.as_hvector().dot(a.as_hvector());
            let fy = f(&y);
            assert!((laplace_beltrami_apply(f, &y, &cfg) / fy - (4 * n - 1) as f64).abs() < 1e-6);
            assert!((gamma_apply(f, &y, &cfg) / fy - 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn operators_are_linear() {
        let cfg = FDConfig::default();
        let mut rng = stream_rng(3, 0);
        let a = random_point(&mut rng, 2);
        let b = random_point(&mut rng, 2);
        let y = random_point(&mut rng, 2);
        let f = |z: &SpherePoint| z.inner(&a).re.powi(3);
        let g = |z: &SpherePoint| z.inner(&b).norm_sqr();
        let (s, t) = (0.7, -2.3);
        let h = |z: &SpherePoint| s * f(z) + t * g(z);
        type Op<'a> = &'a dyn Fn(&dyn Fn(&SpherePoint) -> f64) -> f64;
        let lin = |op: Op| (op(&h) - (s * op(&f) + t * op(&g))).abs();
        assert!(lin(&|u| laplace_beltrami_apply(u, &y, &cfg)) < 1e-8);
        assert!(lin(&|u| gamma_apply(u, &y, &cfg)) < 1e-8);
        assert!(lin(&|u| t_axis(u, &y, Axis::K, &cfg)) < 1e-10);
    }

    #[test]
    fn l1_l2_examples() {
        assert_eq!(l1_l2_identity(5, 1, 2), (5.0, 3.0));
        for n in 2..=5 {
            assert_eq!(l1_l2_identity(0, 0, n), (0.0, 0.0));
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
