//! Fixture measures of known dimension, a correlation-dimension estimator,
//! Riesz energies, and the consistency report tying the spectral cone
//! condition to the dimension bound `4n - 4`.

use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelBank;
use crate::measure::{Atom, DiscreteMeasure};
use crate::quat::{
    random_point, random_unit_quaternion, sample_sphere, stream_rng, subseed, HVector, Quaternion, SpherePoint,
    SAMPLE_CHUNK,
};
use crate::spectral::{spectrum_scan, SpectrumEntry};

const TAG_ORBIT: u64 = 0x4F_52_42;

/// Minimum atom count for [`correlation_dimension`].
pub const MIN_ATOMS: usize = 1000;
/// Number of radii in the log-log fit.
pub const FIT_POINTS: usize = 16;
/// Slack allowed below `4n - 4` before the report calls a measure inconsistent.
pub const DIM_TOLERANCE: f64 = 0.4;

const DIAMETER_SUBSET: usize = 256;
const NN_SUBSET: usize = 1000;

/// `δ_{x0}`.
pub fn gen_point_mass(x0: &SpherePoint) -> DiscreteMeasure {
    DiscreteMeasure::new("point", vec![Atom { point: x0.clone(), weight: 1.0 }])
        .expect("a single atom is a valid measure")
}

/// `N` copies of `x0` with weights `1/N`.
pub fn gen_repeated_point(x0: &SpherePoint, count: usize) -> Result<DiscreteMeasure> {
    if count == 0 {
        return Err(Error::InvalidMeasure("need at least one atom".into()));
    }
    DiscreteMeasure::uniform_weights("point", vec![x0.clone(); count])
}

/// `N` i.i.d. uniform points of `S^{4n-1}`, one sample block each.
pub fn gen_uniform(n: usize, count: usize, seed: u64) -> Result<DiscreteMeasure> {
    DiscreteMeasure::uniform_weights("uniform", sample_sphere(n, count, seed)?)?.with_blocks(count)
}

// `count` points, chunk `c` drawn from stream `c` of `seed`.
fn sample_chunked<F>(count: usize, seed: u64, draw: F) -> Vec<SpherePoint>
where
    F: Fn(&mut ChaCha8Rng) -> SpherePoint + Sync,
{
    let chunks: Vec<Vec<SpherePoint>> = (0..count.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Uniform points of the copy of `S^{4k-1}` where coordinates `k+1..n` vanish.
pub fn gen_subsphere(n: usize, k: usize, count: usize, seed: u64) -> Result<DiscreteMeasure> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!("subsphere needs 1 <= k <= n, got k={k}, n={n}")));
    }
    let points = sample_chunked(count, seed, |rng| {
        let mut coords = random_point(rng, k).coords().to_vec();
        coords.resize(n, Quaternion::ZERO);
        SpherePoint::new(HVector::new(coords)).expect("nonzero Gaussian vector")
    });
    DiscreteMeasure::uniform_weights(format!("subsphere:{k}"), points)?.with_blocks(count)
}

/// Uniform points of the orbit `{q x0 : |q| = 1}`, a 3-sphere.
pub fn gen_sp1_orbit(x0: &SpherePoint, count: usize, seed: u64) -> Result<DiscreteMeasure> {
    if count == 0 {
        return Err(Error::InvalidMeasure("need at least one atom".into()));
    }
    let points = sample_chunked(count, subseed(seed, TAG_ORBIT), |rng| {
        x0.left_mul(random_unit_quaternion(rng)).expect("unit multiplier")
    });
    DiscreteMeasure::uniform_weights("sp1-orbit", points)?.with_blocks(count)
}

/// Output of [`correlation_dimension`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub s_hat: f64,
    /// Slope before clamping to `[0, 4n - 1]`.
    pub raw_slope: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: usize,
    /// All atoms coincide; `s_hat` is 0 and no fit was made.
    pub degenerate: bool,
    pub radii: Vec<f64>,
    pub correlation: Vec<f64>,
}

impl DimensionEstimate {
    /// The fit data as CSV with columns `r,C(r)`.
    pub fn fit_csv(&self) -> String {
        let mut out = String::from("r,C(r)\n");
        for (r, c) in self.radii.iter().zip(&self.correlation) {
            writeln!(out, "{r:e},{c:e}").expect("writing to a String");
        }
        out
    }
}

// Atoms as flat coordinate rows, sorted so the result does not depend on the
// order in which atoms were listed.
struct Flat {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl Flat {
    fn new(mu: &DiscreteMeasure) -> Self {
        let mut rows: Vec<(Vec<f64>, f64)> = mu.atoms().iter().map(|a| (a.point.to_real(), a.weight)).collect();
        rows.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.total_cmp(&b.1))
        });
        let dim = 4 * mu.n();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        let mut weights = Vec::with_capacity(rows.len());
        for (c, w) in rows {
            coords.extend_from_slice(&c);
            weights.push(w);
        }
        Self { dim, coords, weights }
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    // Evenly strided subset of at most `max` rows.
    fn subset(&self, max: usize) -> impl Iterator<Item = usize> + '_ {
        let stride = self.len().div_ceil(max).max(1);
        (0..self.len()).step_by(stride)
    }
}

fn ensure_nonnegative(mu: &DiscreteMeasure) -> Result<()> {
    if !mu.is_nonnegative() {
        return Err(Error::InvalidMeasure(format!(
            "measure `{}` has negative weights; dimension estimates need a nonnegative measure",
            mu.name()
        )));
    }
    Ok(())
}

/// Correlation dimension: the least-squares slope of `log C(r)` against
/// `log r`, with `C(r) = Σ_{a≠b} w_a w_b 1[|x_a - x_b| < r]` in chordal
/// distance.
///
/// The fit uses [`FIT_POINTS`] log-spaced radii from twice the median
/// nearest-neighbour distance up to a quarter of the diameter. The lower end
/// is capped at half the upper end. Diameter and nearest-neighbour distance
/// are measured from evenly spaced subsets of the atoms, so the whole
/// computation is deterministic.
pub fn correlation_dimension(mu: &DiscreteMeasure) -> Result<DimensionEstimate> {
    ensure_nonnegative(mu)?;
    let n = mu.n();
    let first = &mu.atoms()[0].point;
    if mu.atoms().iter().all(|a| a.point == *first) {
        return Ok(DimensionEstimate {
            s_hat: 0.0,
            raw_slope: 0.0,
            r_min: 0.0,
            r_max: 0.0,
            residual: 0.0,
            samples: mu.len(),
            degenerate: true,
            radii: Vec::new(),
            correlation: Vec::new(),
        });
    }
    if mu.len() < MIN_ATOMS {
        return Err(Error::InvalidMeasure(format!(
            "correlation dimension needs at least {MIN_ATOMS} atoms, got {}",
            mu.len()
        )));
    }

    let flat = Flat::new(mu);
    let len = flat.len();
    let diam_sq = flat
        .subset(DIAMETER_SUBSET)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| (0..len).map(|j| flat.dist_sq(i, j)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    let mut nn: Vec<f64> = flat
        .subset(NN_SUBSET)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            (0..len)
                .filter(|&j| j != i)
                .map(|j| flat.dist_sq(i, j))
                .filter(|&d| d > 0.0)
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .filter(|d| d.is_finite())
        .collect();

    let r_max = diam_sq.sqrt() / 4.0;
    let median_nn = if nn.is_empty() { 0.0 } else { crate::diffops::median(&mut nn) };
    let r_min = if median_nn > 0.0 { (2.0 * median_nn).min(r_max / 2.0) } else { r_max / 16.0 };

    let radii: Vec<f64> = (0..FIT_POINTS)
        .map(|i| {
            let t = i as f64 / (FIT_POINTS - 1) as f64;
            (r_min.ln() + t * (r_max / r_min).ln()).exp()
        })
        .collect();
    let thresholds: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let top = thresholds[FIT_POINTS - 1];

    // bins[k] collects pairs with thresholds[k-1] <= d² < thresholds[k]
    let rows: Vec<[f64; FIT_POINTS]> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mut bins = [0.0; FIT_POINTS];
            let wi = flat.weights[i];
            for j in i + 1..len {
                let d = flat.dist_sq(i, j);
                if d >= top {
                    continue;
                }
                let k = thresholds.partition_point(|&t| t <= d);
                bins[k] += wi * flat.weights[j];
            }
            bins
        })
        .collect();
    let mut bins = [0.0; FIT_POINTS];
    for row in &rows {
        for (b, v) in bins.iter_mut().zip(row) {
            *b += v;
        }
    }
    let mut correlation = Vec::with_capacity(FIT_POINTS);
    let mut acc = 0.0;
    for b in bins {
        acc += 2.0 * b;
        correlation.push(acc);
    }

    let pts: Vec<(f64, f64)> =
        radii.iter().zip(&correlation).filter(|(_, c)| **c > 0.0).map(|(r, c)| (r.ln(), c.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::InvalidMeasure(format!(
            "measure `{}` has too few close pairs for a correlation fit",
            mu.name()
        )));
    }
    let (slope, residual) = least_squares(&pts);
    Ok(DimensionEstimate {
        s_hat: slope.clamp(0.0, (4 * n - 1) as f64),
        raw_slope: slope,
        r_min,
        r_max,
        residual,
        samples: len,
        degenerate: false,
        radii,
        correlation,
    })
}

// Slope and RMS residual of the least-squares line through `pts`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / k).sqrt())
}

/// Riesz `s`-energy `Σ_{a≠b} w_a w_b |x_a - x_b|^{-s}`; infinite if two atoms
/// coincide.
pub fn s_energy(mu: &DiscreteMeasure, s: f64) -> Result<f64> {
    ensure_nonnegative(mu)?;
    if s.is_nan() || s <= 0.0 {
        return Err(Error::InvalidConfig(format!("energy exponent must be positive, got {s}")));
    }
    let flat = Flat::new(mu);
    let len = flat.len();
    let half = -s / 2.0;
    let rows: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|i| (i + 1..len).map(|j| flat.weights[i] * flat.weights[j] * flat.dist_sq(i, j).powf(half)).sum())
        .collect();
    Ok(2.0 * rows.iter().sum::<f64>())
}

/// Verdict of [`theorem_consistency_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub measure: String,
    pub n: usize,
    pub h_max: usize,
    pub epsilon: f64,
    /// No numerically nonzero in-cone component at `h >= h_max / 2`.
    pub cone_condition_plausible: bool,
    pub dim_estimate: f64,
    pub dim_degenerate: bool,
    pub bound_4n_minus_4: usize,
    /// False only if the cone condition looks satisfied while the dimension
    /// estimate is below `4n - 4` by more than [`DIM_TOLERANCE`].
    pub consistent: bool,
    pub in_cone_nonzero: Vec<SpectrumEntry>,
    pub dimension: DimensionEstimate,
}

/// Scans the spectrum of `mu` and estimates its dimension. A measure of
/// dimension below `4n - 4` must have in-cone spectrum at arbitrarily high
/// `h`; up to `h_max` this shows as nonzero in-cone components in the upper
/// half of the scanned range.
pub fn theorem_consistency_report(
    mu: &DiscreteMeasure,
    bank: &KernelBank,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<ConsistencyReport> {
    ensure_nonnegative(mu)?;
    let scan = spectrum_scan(mu, bank, epsilon, probes, seed)?;
    let dimension = correlation_dimension(mu)?;
    let h_max = bank.h_max();
    let half = h_max.div_ceil(2);
    let in_cone_nonzero: Vec<SpectrumEntry> = scan.in_cone_nonzero().cloned().collect();
    let cone_condition_plausible = !in_cone_nonzero.iter().any(|e| e.h >= half);
    let bound = 4 * mu.n() - 4;
    let consistent = !cone_condition_plausible || dimension.s_hat >= bound as f64 - DIM_TOLERANCE;
    Ok(ConsistencyReport {
        measure: mu.name().to_string(),
        n: mu.n(),
        h_max,
        epsilon,
        cone_condition_plausible,
        dim_estimate: dimension.s_hat,
        dim_degenerate: dimension.degenerate,
        bound_4n_minus_4: bound,
        consistent,
        in_cone_nonzero,
        dimension,
    })
}
