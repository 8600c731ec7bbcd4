//! Zonal projection kernels `K_{h,m}` onto the joint eigenspaces `H_{h,m}`.
//!
//! The closed-form kernel is known only up to the normalization conventions of
//! its Jacobi and Chebyshev factors, so every kernel carries a calibration
//! constant `c` fixed by the reproducing property
//!
//! ```text
//! ∫ K(x, y) K(y, z) dσ(y) = K(x, z)
//! ```
//!
//! with respect to the normalized surface measure `σ(S^{4n-1}) = 1`. Under
//! that normalization `K(x, x) = dim H_{h,m}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{binomial, cheb_u_table, cheb_u_unchecked, jacobi_unchecked};
use crate::quat::{
    geodesic_unchecked, random_point, random_tangent, sample_sphere, stream_rng, subseed, Quaternion, SpherePoint,
};

/// Calibrations whose relative spread across probes exceeds this are unusable.
pub const SPREAD_LIMIT: f64 = 0.05;

/// Probe pairs must satisfy `|raw(x, z)| >= PROBE_RATIO * |raw(x, x)|`.
pub const PROBE_RATIO: f64 = 0.8;

/// Probe pairs must satisfy `|<x, z>| >= PROBE_MIN_INNER`.
pub const PROBE_MIN_INNER: f64 = 0.3;

pub const MIN_CALIBRATION_SAMPLES: usize = 10_000;
pub const MIN_CALIBRATION_PROBES: usize = 3;

const MAX_PROBE_TRIES: usize = 20_000;
const CHUNK: usize = 8192;

const TAG_SAMPLES: u64 = 0x5A_4D_50;
const TAG_PROBES: u64 = 0x50_52_42;
const TAG_DIM: u64 = 0x44_49_4D;

/// `true` iff `(h, m)` belongs to the index set, i.e. `2m <= h`.
pub fn in_index_set(h: usize, m: usize) -> bool {
    2 * m <= h
}

/// Label `(h, m)` of the space `H_{h,m}` on `S^{4n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KernelIndex {
    pub n: usize,
    pub h: usize,
    pub m: usize,
}

impl KernelIndex {
    pub fn new(n: usize, h: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if !in_index_set(h, m) {
            return Err(Error::InvalidIndex { h, m });
        }
        Ok(Self { n, h, m })
    }

    /// All valid indices with `h <= h_max`, ordered by `h` then `m`.
    pub fn all(n: usize, h_max: usize) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for h in 0..=h_max {
            for m in 0..=h / 2 {
                out.push(Self::new(n, h, m)?);
            }
        }
        Ok(out)
    }

    /// `h - 2m`, the degree of the Chebyshev factor.
    pub fn k(&self) -> usize {
        self.h - 2 * self.m
    }

    /// Eigenvalue of the Laplace-Beltrami operator, `h(h + 4n - 2)`.
    pub fn lambda_delta(&self) -> f64 {
        (self.h * (self.h + 4 * self.n - 2)) as f64
    }

    /// Eigenvalue of the sublaplacian, `(h - 2m)(h - 2m + 2)`.
    pub fn lambda_gamma(&self) -> f64 {
        (self.k() * (self.k() + 2)) as f64
    }

    pub fn jacobi_alpha(&self) -> f64 {
        (2 * self.n - 3) as f64
    }

    pub fn jacobi_beta(&self) -> f64 {
        (self.k() + 1) as f64
    }

    /// Constant factor of the closed-form kernel:
    /// `(h-2m+1)(h+2m-1) / ((2n-2)(2n-1)) * C(h-m+2n-2, 2n-3)`.
    ///
    /// `(h+2m-1)` vanishes at `(h, m) = (1, 0)`; there it is replaced by 1 so
    /// the formula keeps a nonzero shape. Calibration fixes the scale anyway.
    pub fn formula_scale(&self) -> f64 {
        let n = self.n as i64;
        let (h, m) = (self.h as i64, self.m as i64);
        let mut pre = ((h - 2 * m + 1) * (h + 2 * m - 1)) as f64;
        if pre == 0.0 {
            pre = (h - 2 * m + 1) as f64;
        }
        let binom =
            binomial(h - m + 2 * n - 2, 2 * n - 3).expect("index-set arguments are in range for the kernel binomial");
        pre / ((2 * n - 2) * (2 * n - 1)) as f64 * binom as f64
    }

    fn code(&self) -> u64 {
        ((self.n as u64) << 40) | ((self.h as u64) << 20) | self.m as u64
    }
}

impl std::fmt::Display for KernelIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.h, self.m)
    }
}

/// Closed-form kernel as a function of `q = <x, y>`.
#[inline]
pub fn raw_kernel_from_inner(idx: &KernelIndex, q: Quaternion) -> f64 {
    let s = q.norm_sqr();
    let w = cheb_u_unchecked(idx.k(), q.re, s);
    let p = jacobi_unchecked(idx.jacobi_alpha(), idx.jacobi_beta(), idx.m, (2.0 * s - 1.0).clamp(-1.0, 1.0));
    idx.formula_scale() * w * p
}

/// The uncalibrated closed-form kernel at `(x, y)`.
pub fn raw_kernel(idx: &KernelIndex, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_dims(idx.n, x)?;
    check_dims(idx.n, y)?;
    Ok(raw_kernel_from_inner(idx, x.inner(y)))
}

fn check_dims(n: usize, x: &SpherePoint) -> Result<()> {
    if x.n() != n {
        return Err(Error::LengthMismatch { left: x.n(), right: n });
    }
    Ok(())
}

/// Monte Carlo settings for [`calibrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub samples: usize,
    pub seed: u64,
    pub probes: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { samples: 200_000, seed: 1, probes: 8 }
    }
}

/// Closed-form kernel times a calibration constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedKernel {
    pub index: KernelIndex,
    /// Calibration constant, sign included.
    pub c: f64,
    /// Relative standard deviation of the per-probe constants.
    pub spread: f64,
    pub samples: usize,
    pub seed: u64,
}

impl CalibratedKernel {
    pub fn usable(&self) -> bool {
        self.c.is_finite() && self.c != 0.0 && self.spread.is_finite() && self.spread < SPREAD_LIMIT
    }

    fn ensure_usable(&self) -> Result<()> {
        if self.usable() {
            Ok(())
        } else {
            Err(Error::UnusableKernel { h: self.index.h, m: self.index.m, spread: self.spread })
        }
    }

    /// `c * raw_kernel(x, y)`.
    pub fn kernel(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        self.ensure_usable()?;
        Ok(self.c * raw_kernel(&self.index, x, y)?)
    }

    #[inline]
    pub fn kernel_from_inner(&self, q: Quaternion) -> f64 {
        self.c * raw_kernel_from_inner(&self.index, q)
    }

    /// `K(x, x)`, which is constant on the sphere.
    pub fn diagonal(&self) -> f64 {
        self.kernel_from_inner(Quaternion::ONE)
    }

    /// Averages `K(x, x)` over 10 random `x`; approximates `dim H_{h,m}`.
    pub fn kernel_dim(&self) -> Result<f64> {
        self.ensure_usable()?;
        let xs = sample_sphere(self.index.n, 10, subseed(self.seed, TAG_DIM))?;
        let mut acc = 0.0;
        for x in &xs {
            acc += self.kernel(x, x)?;
        }
        Ok(acc / xs.len() as f64)
    }
}

/// Calibrates one kernel. See [`calibrate_with_samples`] for sharing the
/// Monte Carlo sample across many indices.
pub fn calibrate(idx: KernelIndex, samples: usize, seed: u64, probes: usize) -> Result<CalibratedKernel> {
    let cfg = CalibrationConfig { samples, seed, probes };
    validate_config(&cfg)?;
    let ys = calibration_samples(idx.n, &cfg)?;
    calibrate_with_samples(idx, &ys, &cfg)
}

fn validate_config(cfg: &CalibrationConfig) -> Result<()> {
    if cfg.samples < MIN_CALIBRATION_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "calibration needs at least {MIN_CALIBRATION_SAMPLES} samples, got {}",
            cfg.samples
        )));
    }
    if cfg.probes < MIN_CALIBRATION_PROBES {
        return Err(Error::InvalidConfig(format!(
            "calibration needs at least {MIN_CALIBRATION_PROBES} probes, got {}",
            cfg.probes
        )));
    }
    Ok(())
}

/// The uniform sample used by calibration for `(n, cfg)`.
pub fn calibration_samples(n: usize, cfg: &CalibrationConfig) -> Result<Vec<SpherePoint>> {
    sample_sphere(n, cfg.samples, subseed(cfg.seed, TAG_SAMPLES))
}

/// Calibrates `idx` against a precomputed uniform sample `ys`.
///
/// For each probe pair `(x, z)` the Monte Carlo average
/// `A = mean_y raw(x, y) raw(y, z)` gives `c = raw(x, z) / A`; the result is
/// the mean over probes. Pairs are drawn near the diagonal, where the kernel
/// is large compared with its fluctuations over `y`.
pub fn calibrate_with_samples(
    idx: KernelIndex,
    ys: &[SpherePoint],
    cfg: &CalibrationConfig,
) -> Result<CalibratedKernel> {
    validate_config(&CalibrationConfig { samples: ys.len(), ..*cfg })?;
    let mut rng = stream_rng(subseed(cfg.seed, TAG_PROBES), idx.code());
    let diag = raw_kernel_from_inner(&idx, Quaternion::ONE);

    let mut pairs = Vec::with_capacity(cfg.probes);
    let mut tries = 0;
    while pairs.len() < cfg.probes {
        tries += 1;
        if tries > MAX_PROBE_TRIES {
            return Err(Error::DegenerateProbes { h: idx.h, m: idx.m });
        }
        let (x, z) = near_diagonal_pair(&idx, &mut rng)?;
        let avg =
            mc_average(ys, |y| raw_kernel_from_inner(&idx, x.inner(y)) * raw_kernel_from_inner(&idx, y.inner(&z)));
        if avg.abs() <= 1e-12 * diag * diag {
            continue;
        }
        pairs.push(raw_kernel_from_inner(&idx, x.inner(&z)) / avg);
    }

    let (c, spread) = mean_and_rel_sd(&pairs);
    Ok(CalibratedKernel { index: idx, c, spread, samples: ys.len(), seed: cfg.seed })
}

/// A pair `(x, z)` with `|<x, z>| >=` [`PROBE_MIN_INNER`] and
/// `|raw(x, z)| >=` [`PROBE_RATIO`]` * |raw(x, x)|`: `x` uniform, `z` a short
/// geodesic step from `x` in a random direction.
pub fn near_diagonal_pair<R: Rng + ?Sized>(idx: &KernelIndex, rng: &mut R) -> Result<(SpherePoint, SpherePoint)> {
    let t_max = (1.5 / (idx.h as f64 + 1.0)).min(1.2);
    let diag = raw_kernel_from_inner(idx, Quaternion::ONE);
    for _ in 0..MAX_PROBE_TRIES {
        let x = random_point(rng, idx.n);
        let e = random_tangent(rng, &x);
        let t = rng.gen::<f64>() * t_max;
        let z = geodesic_unchecked(&x, &e, t);
        let q = x.inner(&z);
        if q.norm() >= PROBE_MIN_INNER && raw_kernel_from_inner(idx, q).abs() >= PROBE_RATIO * diag.abs() {
            return Ok((x, z));
        }
    }
    Err(Error::DegenerateProbes { h: idx.h, m: idx.m })
}

/// Monte Carlo estimate of `∫ K_a(x, y) K_b(y, z) dσ(y)` over `ys`, with its
/// standard error. Orthogonality and the reproducing property make this
/// `K_a(x, z)` when `a` and `b` are the same index and 0 otherwise.
pub fn reproduction_estimate(
    a: &CalibratedKernel,
    b: &CalibratedKernel,
    x: &SpherePoint,
    z: &SpherePoint,
    ys: &[SpherePoint],
) -> Result<(f64, f64)> {
    a.ensure_usable()?;
    b.ensure_usable()?;
    if ys.len() < 2 {
        return Err(Error::InvalidConfig("need at least 2 samples".into()));
    }
    let f = |y: &SpherePoint| a.kernel_from_inner(x.inner(y)) * b.kernel_from_inner(y.inner(z));
    let mean = mc_average(ys, f);
    let sq = mc_average(ys, |y| (f(y) - mean).powi(2));
    let n = ys.len() as f64;
    Ok((mean, (sq * n / (n - 1.0) / n).sqrt()))
}

/// Mean of `f` over `ys`, summed per fixed-size chunk so the result does not
/// depend on the thread count.
pub(crate) fn mc_average<F>(ys: &[SpherePoint], f: F) -> f64
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let partials: Vec<f64> = ys.par_chunks(CHUNK).map(|c| c.iter().map(&f).sum()).collect();
    partials.iter().sum::<f64>() / ys.len() as f64
}

fn mean_and_rel_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt() / mean.abs())
}

/// One cached calibration, keyed by `"n/h/m"` in [`CalibrationCache`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub c: f64,
    pub spread: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
}

/// Persisted calibration constants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CalibrationCache {
    pub entries: BTreeMap<String, CacheEntry>,
}

impl CalibrationCache {
    pub fn key(idx: &KernelIndex) -> String {
        format!("{}/{}/{}", idx.n, idx.h, idx.m)
    }

    /// Loads `path`, or an empty cache if it does not exist.
    pub fn load(path: &Path) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn get(&self, idx: &KernelIndex) -> Option<CalibratedKernel> {
        self.entries.get(&Self::key(idx)).map(|e| CalibratedKernel {
            index: *idx,
            c: e.c,
            spread: e.spread,
            samples: e.samples,
            seed: e.seed,
        })
    }

    pub fn insert(&mut self, ck: &CalibratedKernel) {
        self.entries.insert(
            Self::key(&ck.index),
            CacheEntry { c: ck.c, spread: ck.spread, samples: ck.samples, seed: ck.seed },
        );
    }
}

/// Calibrated kernels for every index with `h <= h_max`, evaluated together.
#[derive(Clone, Debug)]
pub struct KernelBank {
    n: usize,
    h_max: usize,
    kernels: Vec<CalibratedKernel>,
    // c * formula_scale, in bank order
    scales: Vec<f64>,
    // bank position of (h, 0)
    offsets: Vec<usize>,
}

impl KernelBank {
    /// Assembles a bank from calibrated kernels covering all indices up to `h_max`.
    pub fn new(n: usize, h_max: usize, kernels: Vec<CalibratedKernel>) -> Result<Self> {
        let want = KernelIndex::all(n, h_max)?;
        let mut by_index: BTreeMap<KernelIndex, CalibratedKernel> = kernels.into_iter().map(|k| (k.index, k)).collect();
        let mut ordered = Vec::with_capacity(want.len());
        for idx in &want {
            match by_index.remove(idx) {
                Some(k) => ordered.push(k),
                None => return Err(Error::MissingCalibration { n, h: idx.h, m: idx.m }),
            }
        }
        let scales = ordered.iter().map(|k| k.c * k.index.formula_scale()).collect();
        let mut offsets = Vec::with_capacity(h_max + 1);
        let mut pos = 0;
        for h in 0..=h_max {
            offsets.push(pos);
            pos += h / 2 + 1;
        }
        Ok(Self { n, h_max, kernels: ordered, scales, offsets })
    }

    /// Calibrates every index up to `h_max` against one shared sample.
    pub fn calibrate(n: usize, h_max: usize, cfg: &CalibrationConfig) -> Result<Self> {
        validate_config(cfg)?;
        let ys = calibration_samples(n, cfg)?;
        let kernels = KernelIndex::all(n, h_max)?
            .into_iter()
            .map(|idx| calibrate_with_samples(idx, &ys, cfg))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, h_max, kernels)
    }

    /// Reads every index up to `h_max` from `cache`.
    pub fn from_cache(cache: &CalibrationCache, n: usize, h_max: usize) -> Result<Self> {
        let kernels = KernelIndex::all(n, h_max)?
            .iter()
            .map(|idx| cache.get(idx).ok_or(Error::MissingCalibration { n, h: idx.h, m: idx.m }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, h_max, kernels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernels.is_empty()
    }

    pub fn kernels(&self) -> &[CalibratedKernel] {
        &self.kernels
    }

    pub fn position(&self, h: usize, m: usize) -> Option<usize> {
        (h <= self.h_max && in_index_set(h, m)).then(|| self.offsets[h] + m)
    }

    pub fn get(&self, h: usize, m: usize) -> Option<&CalibratedKernel> {
        self.position(h, m).map(|p| &self.kernels[p])
    }

    /// Fails if any kernel in the bank is unusable.
    pub fn ensure_usable(&self) -> Result<()> {
        self.kernels.iter().try_for_each(|k| k.ensure_usable())
    }

    /// Writes `K_{h,m}` at inner product `q` for every index, in bank order.
    pub fn eval_all(&self, q: Quaternion, scratch: &mut EvalScratch, out: &mut [f64]) {
        let s = q.norm_sqr();
        let x = (2.0 * s - 1.0).clamp(-1.0, 1.0);
        cheb_u_table(self.h_max, q.re, s, &mut scratch.cheb);
        let alpha = (2 * self.n - 3) as f64;
        for k in 0..=self.h_max {
            let m_max = (self.h_max - k) / 2;
            jacobi_table(alpha, (k + 1) as f64, m_max, x, &mut scratch.jacobi);
            let w = scratch.cheb[k];
            for m in 0..=m_max {
                let pos = self.offsets[k + 2 * m] + m;
                out[pos] = self.scales[pos] * w * scratch.jacobi[m];
            }
        }
    }
}

/// Reusable buffers for [`KernelBank::eval_all`].
#[derive(Clone, Debug, Default)]
pub struct EvalScratch {
    cheb: Vec<f64>,
    jacobi: Vec<f64>,
}

// P_0 ..= P_max for fixed (alpha, beta), same recurrence as `jacobi_unchecked`.
fn jacobi_table(alpha: f64, beta: f64, max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if max == 0 {
        return;
    }
    let ab = alpha + beta;
    out.push((alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0);
    for k in 2..=max {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let a1 = 2.0 * kf * (kf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * c;
        let p = (a2 * out[k - 1] - a3 * out[k - 2]) / a1;
        out.push(p);
    }
}
