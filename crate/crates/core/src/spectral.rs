//! Projections of measures onto the spaces `H_{h,m}`, spectrum scans, the cone
//! `C(ε)`, the smooth cone cutoff `ψ` and the multiplier
//! `L₃ = Σ ψ(h, m) π_{h,m}`.
//!
//! All `L²` quantities are taken with respect to the normalized surface
//! measure, so for a kernel section `‖K(x0, ·)‖² = K(x0, x0) = dim H_{h,m}`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{CalibratedKernel, EvalScratch, KernelBank};
use crate::measure::{Atom, DiscreteMeasure};
use crate::quat::{sample_sphere, sample_sphere_lattice, subseed, SpherePoint};

pub use crate::measure::RENORMALIZE_WARN;

const TAG_SCAN_PROBES: u64 = 0x53_43_4E;
const TAG_MULTIPLIER: u64 = 0x4C_33_4D;

/// Multiple of the Monte Carlo standard error above which a component counts
/// as numerically nonzero.
pub const NONZERO_SIGMAS: f64 = 4.0;

/// Aperture of the cone `C(ε)`, with `0 < ε < 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub epsilon: f64,
}

impl ConeParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidConfig(format!("epsilon {epsilon} outside (0, 1/2)")));
        }
        Ok(Self { epsilon })
    }

    pub fn contains(&self, h: usize, m: usize) -> bool {
        in_cone(h, m, self.epsilon)
    }
}

/// `|m/h - 1/2| < ε`. The origin `h = 0` is never in the cone.
pub fn in_cone(h: usize, m: usize, epsilon: f64) -> bool {
    if h == 0 {
        return false;
    }
    // |2m - h| < 2hε avoids rounding in m/h
    ((2 * m) as f64 - h as f64).abs() < 2.0 * h as f64 * epsilon
}

/// `C^∞` step: 0 for `t <= 0`, 1 for `t >= 1`, monotone in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let g = |s: f64| (-1.0 / s).exp();
        let (a, b) = (g(t), g(1.0 - t));
        a / (a + b)
    }
}

/// Smooth cone cutoff.
///
/// For `u >= 1` it depends only on `v/u`: it is 1 when `|v/u - 1/2| <= ε/2`
/// and 0 when `|v/u - 1/2| >= ε`. Below `u = 1` it is tapered to 0, which it
/// reaches at `u = 1/2`.
pub fn psi(u: f64, v: f64, epsilon: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let radial = smooth_step(2.0 * u - 1.0);
    if radial == 0.0 {
        return 0.0;
    }
    let off = (v / u - 0.5).abs();
    radial * smooth_step((epsilon - off) / (epsilon / 2.0))
}

/// `(π_{h,m} μ)(x) = Σ_a w_a K(x, y_a)`.
pub fn project(mu: &DiscreteMeasure, ck: &CalibratedKernel, x: &SpherePoint) -> Result<f64> {
    Ok(project_with_stderr(mu, ck, x)?.0)
}

/// The projection together with its standard error when the atoms are
/// regarded as an i.i.d. sample (zero for a single atom).
pub fn project_with_stderr(mu: &DiscreteMeasure, ck: &CalibratedKernel, x: &SpherePoint) -> Result<(f64, f64)> {
    ck.kernel(x, x)?;
    if mu.n() != ck.index.n {
        return Err(Error::LengthMismatch { left: mu.n(), right: ck.index.n });
    }
    let terms: Vec<f64> = mu.atoms().iter().map(|a| a.weight * ck.kernel_from_inner(x.inner(&a.point))).collect();
    let value: f64 = terms.iter().sum();
    let big_n = terms.len() as f64;
    let stderr = if terms.len() < 2 {
        0.0
    } else {
        let mean = value / big_n;
        (big_n / (big_n - 1.0) * terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>()).sqrt()
    };
    Ok((value, stderr))
}

/// One row of a [`SpectrumReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub h: usize,
    pub m: usize,
    pub in_cone: bool,
    pub norm_sq: f64,
    pub mc_stderr: f64,
    pub flagged_nonzero: bool,
}

/// Estimated `‖π_{h,m} μ‖²` for every index up to `h_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub measure: String,
    pub n: usize,
    pub h_max: usize,
    pub epsilon: f64,
    pub probes: usize,
    pub seed: u64,
    pub atoms: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumReport {
    pub fn get(&self, h: usize, m: usize) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.h == h && e.m == m)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(|e| e.flagged_nonzero)
    }

    /// In-cone indices whose component is numerically nonzero.
    pub fn in_cone_nonzero(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.flagged().filter(|e| e.in_cone)
    }

    /// CSV with columns `h,m,in_cone,norm_sq,mc_stderr,flagged_nonzero`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,m,in_cone,norm_sq,mc_stderr,flagged_nonzero\n");
        for e in &self.entries {
            writeln!(out, "{},{},{},{:e},{:e},{}", e.h, e.m, e.in_cone, e.norm_sq, e.mc_stderr, e.flagged_nonzero)
                .expect("writing to a String");
        }
        out
    }
}

/// Estimates `‖π_{h,m} μ‖²` for all indices in `bank` by averaging over
/// `probes` uniform points `x`.
///
/// For a measure of one block the estimate is the probe mean of
/// `(π_{h,m} μ)(x)²`. When the atoms form independent sample blocks (see
/// [`DiscreteMeasure::blocks`]), consecutive blocks are pooled into at most
/// [`MAX_GROUPS`] groups and only products of projections from different
/// groups are kept, which removes the sampling bias and targets the measure
/// the blocks were drawn from. The standard error combines the spread over
/// probes with a leave-one-group-out jackknife.
pub fn spectrum_scan(
    mu: &DiscreteMeasure,
    bank: &KernelBank,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<SpectrumReport> {
    bank.ensure_usable()?;
    if mu.n() != bank.n() {
        return Err(Error::LengthMismatch { left: mu.n(), right: bank.n() });
    }
    if probes < 2 {
        return Err(Error::InvalidConfig("a spectrum scan needs at least 2 probes".into()));
    }
    let xs = sample_sphere(bank.n(), probes, subseed(seed, TAG_SCAN_PROBES))?;
    let groups = Groups::new(mu);
    let len = bank.len();
    let g = groups.count();

    // per probe: the estimate, then the leave-one-group-out estimates
    let per_probe: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            let mut scratch = EvalScratch::default();
            let mut vals = vec![0.0; len];
            let mut p = vec![0.0; g * len];
            for (gi, range) in groups.ranges.iter().enumerate() {
                let pg = &mut p[gi * len..(gi + 1) * len];
                for a in &mu.atoms()[range.clone()] {
                    bank.eval_all(x.inner(&a.point), &mut scratch, &mut vals);
                    for (s, v) in pg.iter_mut().zip(&vals) {
                        *s += a.weight * v;
                    }
                }
            }
            groups.statistics(&p, len)
        })
        .collect();

    let pf = probes as f64;
    let mut mean = vec![0.0; (g + 1) * len];
    for row in &per_probe {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / pf;
        }
    }

    let entries = bank
        .kernels()
        .iter()
        .enumerate()
        .map(|(pos, ck)| {
            let norm_sq = mean[pos];
            let probe_var = per_probe.iter().map(|row| (row[pos] - norm_sq).powi(2)).sum::<f64>() / (pf - 1.0);
            let jack_var = if groups.jackknife() {
                let loo: Vec<f64> = (1..=g).map(|r| mean[r * len + pos]).collect();
                let centre = loo.iter().sum::<f64>() / g as f64;
                (g as f64 - 1.0) / g as f64 * loo.iter().map(|t| (t - centre).powi(2)).sum::<f64>()
            } else {
                0.0
            };
            let mc_stderr = (probe_var / pf + jack_var).sqrt();
            let floor = 1e-12 * ck.diagonal().abs();
            SpectrumEntry {
                h: ck.index.h,
                m: ck.index.m,
                in_cone: in_cone(ck.index.h, ck.index.m, epsilon),
                norm_sq,
                mc_stderr,
                flagged_nonzero: norm_sq > NONZERO_SIGMAS * mc_stderr && norm_sq > floor,
            }
        })
        .collect();

    Ok(SpectrumReport {
        measure: mu.name().to_string(),
        n: bank.n(),
        h_max: bank.h_max(),
        epsilon,
        probes,
        seed,
        atoms: mu.len(),
        entries,
    })
}

/// Upper bound on the number of block groups used by [`spectrum_scan`].
pub const MAX_GROUPS: usize = 64;

// Consecutive sample blocks pooled into groups, with the fraction of the
// blocks each group holds.
struct Groups {
    ranges: Vec<std::ops::Range<usize>>,
    fractions: Vec<f64>,
}

impl Groups {
    fn new(mu: &DiscreteMeasure) -> Self {
        let blocks = mu.blocks();
        let per_block = mu.len() / blocks;
        let g = blocks.min(MAX_GROUPS);
        let mut ranges = Vec::with_capacity(g);
        let mut fractions = Vec::with_capacity(g);
        for i in 0..g {
            let (b0, b1) = (i * blocks / g, (i + 1) * blocks / g);
            ranges.push(b0 * per_block..b1 * per_block);
            fractions.push((b1 - b0) as f64 / blocks as f64);
        }
        Self { ranges, fractions }
    }

    fn count(&self) -> usize {
        self.ranges.len()
    }

    fn jackknife(&self) -> bool {
        self.count() >= 3
    }

    // From per-group projections `p[g * len + i]`, the estimate of the squared
    // norm for every index, followed by the estimates leaving out each group.
    fn statistics(&self, p: &[f64], len: usize) -> Vec<f64> {
        let g = self.count();
        let mut out = vec![0.0; (g + 1) * len];
        if g == 1 {
            for (o, v) in out.iter_mut().zip(p) {
                *o = v * v;
            }
            return out;
        }
        let sum_f2: f64 = self.fractions.iter().map(|f| f * f).sum();
        for i in 0..len {
            let total: f64 = (0..g).map(|r| p[r * len + i]).sum();
            let squares: f64 = (0..g).map(|r| p[r * len + i].powi(2)).sum();
            out[i] = (total * total - squares) / (1.0 - sum_f2);
            if self.jackknife() {
                for r in 0..g {
                    let pr = p[r * len + i];
                    let f = self.fractions[r];
                    let rest = total - pr;
                    out[(r + 1) * len + i] =
                        (rest * rest - (squares - pr * pr)) / ((1.0 - f).powi(2) - (sum_f2 - f * f));
                }
            }
        }
        out
    }
}

/// `L₃μ` at a point, truncated at the bank's `h_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierValue {
    pub value: f64,
    /// `|Σ_m ψ(h_max, m) (π_{h_max,m} μ)(x)|`, the size of the last shell kept.
    pub tail: f64,
}

/// `(L₃ μ)(x) = Σ_{h <= h_max} ψ(h, m) (π_{h,m} μ)(x)`.
pub fn apply_multiplier(
    mu: &DiscreteMeasure,
    bank: &KernelBank,
    epsilon: f64,
    x: &SpherePoint,
) -> Result<MultiplierValue> {
    bank.ensure_usable()?;
    if mu.n() != bank.n() || x.n() != bank.n() {
        return Err(Error::LengthMismatch { left: mu.n(), right: bank.n() });
    }
    let weights = multiplier_weights(bank, epsilon);
    let mut scratch = EvalScratch::default();
    Ok(multiplier_at(mu, bank, &weights, x, &mut scratch))
}

fn multiplier_weights(bank: &KernelBank, epsilon: f64) -> Vec<f64> {
    bank.kernels().iter().map(|k| psi(k.index.h as f64, k.index.m as f64, epsilon)).collect()
}

fn multiplier_at(
    mu: &DiscreteMeasure,
    bank: &KernelBank,
    weights: &[f64],
    x: &SpherePoint,
    scratch: &mut EvalScratch,
) -> MultiplierValue {
    let mut vals = vec![0.0; bank.len()];
    let mut proj = vec![0.0; bank.len()];
    for a in mu.atoms() {
        bank.eval_all(x.inner(&a.point), scratch, &mut vals);
        for (p, v) in proj.iter_mut().zip(&vals) {
            *p += a.weight * v;
        }
    }
    let value = proj.iter().zip(weights).map(|(p, w)| p * w).sum();
    let last = bank.h_max();
    let tail =
        (0..=last / 2).filter_map(|m| bank.position(last, m)).map(|pos| weights[pos] * proj[pos]).sum::<f64>().abs();
    MultiplierValue { value, tail }
}

/// Independently shifted lattices used by [`multiplier_measure`].
pub const MULTIPLIER_BLOCKS: usize = 8;

/// `(L₃μ) σ` as a discrete measure: [`MULTIPLIER_BLOCKS`] independently
/// shifted lattices of `samples / MULTIPLIER_BLOCKS` points each (rounded
/// up), with weights `(L₃μ)(y) / total`.
pub fn multiplier_measure(
    mu: &DiscreteMeasure,
    bank: &KernelBank,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<DiscreteMeasure> {
    bank.ensure_usable()?;
    if mu.n() != bank.n() {
        return Err(Error::LengthMismatch { left: mu.n(), right: bank.n() });
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let per_block = samples.div_ceil(MULTIPLIER_BLOCKS);
    let mut ys = Vec::with_capacity(per_block * MULTIPLIER_BLOCKS);
    for b in 0..MULTIPLIER_BLOCKS as u64 {
        ys.extend(sample_sphere_lattice(bank.n(), per_block, subseed(subseed(seed, TAG_MULTIPLIER), b))?);
    }
    let weights = multiplier_weights(bank, epsilon);
    let inv = 1.0 / ys.len() as f64;
    let atoms = ys
        .into_par_iter()
        .map_init(EvalScratch::default, |scratch, y| {
            let f = multiplier_at(mu, bank, &weights, &y, scratch).value;
            Atom { point: y, weight: f * inv }
        })
        .collect();
    DiscreteMeasure::new(format!("L3({})", mu.name()), atoms)?.with_blocks(MULTIPLIER_BLOCKS)
}

/// `(|ξ| - |ξ₂|) / (2|ξ|)` for `|ξ|² = a² + b²`, with `a = |ξ₁|`, `b = |ξ₂|`.
pub fn cone_gap_check(xi1_norm: f64, xi2_norm: f64) -> Result<f64> {
    if !(xi1_norm >= 0.0 && xi2_norm >= 0.0) {
        return Err(Error::OutOfDomain { value: xi1_norm.min(xi2_norm), domain: "norms >= 0" });
    }
    let r = xi1_norm.hypot(xi2_norm);
    if r == 0.0 {
        return Err(Error::OutOfDomain { value: 0.0, domain: "not both norms zero" });
    }
    Ok((r - xi2_norm) / (2.0 * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_membership() {
        assert!(in_cone(4, 2, 0.1));
        assert!(in_cone(4, 2, 1e-6));
        assert!(!in_cone(4, 0, 0.1));
        assert!(!in_cone(0, 0, 0.4));
        // boundary |m/h - 1/2| = ε is excluded
        assert!(!in_cone(5, 2, 0.1));
        assert!(in_cone(7, 3, 0.1));
        assert!(!in_cone(7, 3, 0.05));
        assert!(ConeParams::new(0.5).is_err());
        assert!(ConeParams::new(0.0).is_err());
        assert!(ConeParams::new(0.2).unwrap().contains(6, 3));
    }

    #[test]
    fn psi_examples() {
        for h in 1..40 {
            if h % 2 == 0 {
                assert_eq!(psi(h as f64, (h / 2) as f64, 0.1), 1.0);
            }
        }
        assert_eq!(psi(4.0, 0.0, 0.1), 0.0);
        assert_eq!(psi(0.0, 0.0, 0.1), 0.0);
        assert_eq!(psi(0.5, 0.25, 0.1), 0.0);
        for (u, v) in [(1.0, 0.47), (3.0, 1.3), (7.0, 3.0), (2.5, 1.1)] {
            assert_eq!(psi(2.0 * u, 2.0 * v, 0.1), psi(u, v, 0.1));
        }
        // transition band is strictly between 0 and 1
        let mid = psi(14.0, 6.0, 0.1);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.5), 0.5);
        assert_eq!(smooth_step(2.0), 1.0);
        let mut prev = 0.0;
        for i in 1..100 {
            let s = smooth_step(i as f64 / 100.0);
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn cone_gap_examples() {
        assert_eq!(cone_gap_check(3.0, 0.0).unwrap(), 0.5);
        assert_eq!(cone_gap_check(0.0, 2.0).unwrap(), 0.0);
        assert!(cone_gap_check(0.0, 0.0).is_err());
        assert!(cone_gap_check(-1.0, 0.0).is_err());
    }

    #[test]
    fn group_statistic_is_the_off_diagonal_sum() {
        let pts = sample_sphere(2, 12, 1).unwrap();
        let mu = DiscreteMeasure::uniform_weights("u", pts).unwrap().with_blocks(6).unwrap();
        let groups = Groups::new(&mu);
        assert_eq!(groups.count(), 6);
        let p = [0.3, -0.1, 0.7, 0.2, -0.4, 0.05];
        let stats = groups.statistics(&p, 1);
        let mut cross = 0.0;
        for r in 0..6 {
            for s in 0..6 {
                if r != s {
                    cross += p[r] * p[s];
                }
            }
        }
        let expected = cross / (1.0 - 6.0 / 36.0);
        assert!((stats[0] - expected).abs() < 1e-14);

        let one = DiscreteMeasure::uniform_weights("one", sample_sphere(2, 4, 1).unwrap()).unwrap();
        let stats = Groups::new(&one).statistics(&[0.3, -2.0], 2);
        assert_eq!(&stats[..2], &[0.09, 4.0]);
    }
}
