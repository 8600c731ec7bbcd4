//! Quaternions, vectors in `H^n`, and points of the unit sphere `S^{4n-1}`.
//!
//! The quaternionic inner product is `<x, y> = sum_l x_l * conj(y_l)`; it is
//! left-linear, so scalars act on points by left multiplication. The flows
//! generating the sublaplacian are `x -> exp(axis * t) x`, applied to every
//! coordinate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `| ||v|| - 1 |` after renormalization.
pub const UNIT_TOL: f64 = 1e-12;

/// `re + i*𝐢 + j*𝐣 + k*𝐤`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    pub const fn real(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }

    /// Imaginary part as a pure quaternion.
    pub fn imag(self) -> Self {
        Self::new(0.0, self.i, self.j, self.k)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.re, self.i, self.j, self.k]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3])
    }

    /// Euclidean dot product of the component vectors, `Re(p * conj(q))`.
    pub fn dot(self, other: Self) -> f64 {
        self.re * other.re + self.i * other.i + self.j * other.j + self.k * other.k
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.re)?;
        for (c, unit) in [(self.i, 'i'), (self.j, 'j'), (self.k, 'k')] {
            let sign = if c.is_sign_negative() { '-' } else { '+' };
            write!(f, " {sign} {}{unit}", c.abs())?;
        }
        Ok(())
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion {
        re: p.re * q.re - p.i * q.i - p.j * q.j - p.k * q.k,
        i: p.re * q.i + p.i * q.re + p.j * q.k - p.k * q.j,
        j: p.re * q.j - p.i * q.k + p.j * q.re + p.k * q.i,
        k: p.re * q.k + p.i * q.j - p.j * q.i + p.k * q.re,
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        quat_mul(self, rhs)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.i + rhs.i, self.j + rhs.j, self.k + rhs.k)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.i - rhs.i, self.j - rhs.j, self.k - rhs.k)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

/// `exp(u)` for a pure imaginary `u`: `cos|u| + (u/|u|) sin|u|`.
pub fn exp_imag(u: Quaternion) -> Result<Quaternion> {
    if u.re.abs() > UNIT_TOL {
        return Err(Error::NotPureImaginary(u.re));
    }
    let theta = u.imag().norm();
    // sin(t)/t, with its Taylor expansion near zero
    let sinc = if theta < 1e-8 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
    Ok(Quaternion::real(theta.cos()) + u.imag().scale(sinc))
}

/// Imaginary unit generating one of the three flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    I,
    J,
    K,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::I, Axis::J, Axis::K];

    pub fn unit(self) -> Quaternion {
        match self {
            Axis::I => Quaternion::I,
            Axis::J => Quaternion::J,
            Axis::K => Quaternion::K,
        }
    }
}

/// A vector `(x_1, ..., x_n)` in `H^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HVector {
    coords: Vec<Quaternion>,
}

impl HVector {
    pub fn new(coords: Vec<Quaternion>) -> Self {
        Self { coords }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Quaternion::ZERO; n])
    }

    /// Standard basis vector with `1` in quaternionic slot `slot`.
    pub fn basis(n: usize, slot: usize) -> Self {
        let mut v = Self::zeros(n);
        v.coords[slot] = Quaternion::ONE;
        v
    }

    /// Build from `4n` real coordinates, grouped by quaternion.
    pub fn from_real(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() || !xs.len().is_multiple_of(4) {
            return Err(Error::LengthMismatch { left: xs.len(), right: 4 * (xs.len() / 4).max(1) });
        }
        Ok(Self::new(xs.chunks_exact(4).map(Quaternion::from_slice).collect()))
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|q| q.to_array()).collect()
    }

    /// Quaternionic dimension `n`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Quaternion] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real (ambient `R^{4n}`) dot product, `Re <x, y>`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a.dot(*b)).sum()
    }

    /// Left scalar multiplication `q * x`, coordinatewise.
    pub fn left_mul(&self, q: Quaternion) -> Self {
        Self::new(self.coords.iter().map(|&c| q * c).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coords.iter().map(|c| c.scale(s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| *a + *b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| *a - *b).collect())
    }
}

/// Quaternionic inner product `<x, y> = sum_l x_l conj(y_l)`.
pub fn inner(x: &HVector, y: &HVector) -> Result<Quaternion> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(inner_unchecked(x.coords(), y.coords()))
}

#[inline]
pub(crate) fn inner_unchecked(x: &[Quaternion], y: &[Quaternion]) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    for (a, b) in x.iter().zip(y) {
        acc += *a * b.conj();
    }
    acc
}

/// A point of `S^{4n-1}`. Always unit norm to within [`UNIT_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HVector", into = "HVector")]
pub struct SpherePoint(HVector);

impl SpherePoint {
    /// Renormalizes `v` onto the sphere. Vectors already of unit norm up to
    /// rounding are kept as they are.
    pub fn new(v: HVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidMeasure(format!("cannot project a vector of norm {norm} onto the sphere")));
        }
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self(v));
        }
        Ok(Self(v.scale(1.0 / norm)))
    }

    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::new(HVector::from_real(xs)?)
    }

    /// `e_slot`, the standard basis point.
    pub fn basis(n: usize, slot: usize) -> Self {
        Self(HVector::basis(n, slot))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_hvector(&self) -> &HVector {
        &self.0
    }

    pub fn coords(&self) -> &[Quaternion] {
        self.0.coords()
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.to_real()
    }

    pub fn inner(&self, other: &SpherePoint) -> Quaternion {
        debug_assert_eq!(self.n(), other.n());
        inner_unchecked(self.coords(), other.coords())
    }

    /// `q * x` for a quaternion `q`, renormalized.
    pub fn left_mul(&self, q: Quaternion) -> Result<Self> {
        Self::new(self.0.left_mul(q))
    }

    pub fn neg(&self) -> Self {
        Self(self.0.scale(-1.0))
    }
}

impl TryFrom<HVector> for SpherePoint {
    type Error = Error;
    fn try_from(v: HVector) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpherePoint> for HVector {
    fn from(p: SpherePoint) -> Self {
        p.0
    }
}

/// `exp(axis * t) x`. A one-parameter group of isometries of the sphere.
pub fn flow(x: &SpherePoint, axis: Axis, t: f64) -> SpherePoint {
    let g = exp_imag(axis.unit().scale(t)).expect("axis units are pure imaginary");
    let v = x.0.left_mul(g);
    SpherePoint(v.scale(1.0 / v.norm()))
}

/// Orthonormal basis of the tangent space at `y`, as ambient `R^{4n}` vectors.
///
/// The first three vectors span `span_R{𝐢y, 𝐣y, 𝐤y}`; the remaining `4n - 4`
/// span its orthogonal complement within the tangent space.
pub fn tangent_frame(y: &SpherePoint) -> Vec<HVector> {
    let n = y.n();
    let dim = 4 * n;
    let base = y.to_real();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    let mut taken: Vec<Vec<f64>> = vec![base];

    for axis in Axis::ALL {
        let v = y.as_hvector().left_mul(axis.unit()).to_real();
        let r = orthogonalize(&v, &taken);
        let nr = norm(&r);
        let e: Vec<f64> = r.iter().map(|c| c / nr).collect();
        taken.push(e.clone());
        frame.push(e);
    }

    // Greedy Gram-Schmidt over the standard basis: always pick the candidate
    // with the largest residual so the complement is well conditioned.
    let mut remaining: Vec<usize> = (0..dim).collect();
    while frame.len() < dim - 1 {
        let (pos, resid) = remaining
            .iter()
            .enumerate()
            .map(|(p, &c)| {
                let mut e = vec![0.0; dim];
                e[c] = 1.0;
                (p, orthogonalize(&e, &taken))
            })
            .max_by(|a, b| norm(&a.1).total_cmp(&norm(&b.1)))
            .expect("candidates remain while the frame is incomplete");
        remaining.swap_remove(pos);
        let nr = norm(&resid);
        let e: Vec<f64> = resid.iter().map(|c| c / nr).collect();
        taken.push(e.clone());
        frame.push(e);
    }

    frame.into_iter().map(|v| HVector::from_real(&v).expect("length is a multiple of four")).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

// Two passes of classical Gram-Schmidt.
fn orthogonalize(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let d: f64 = r.iter().zip(b).map(|(a, c)| a * c).sum();
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= d * bi;
            }
        }
    }
    r
}

/// Great circle `cos t * y + sin t * e` through `y` in direction `e`.
pub fn geodesic(y: &SpherePoint, e: &HVector, t: f64) -> Result<SpherePoint> {
    if e.len() != y.n() {
        return Err(Error::LengthMismatch { left: e.len(), right: y.n() });
    }
    let resid = y.as_hvector().dot(e).abs().max((e.norm() - 1.0).abs());
    if resid > 1e-8 {
        return Err(Error::NotTangent(resid));
    }
    Ok(geodesic_unchecked(y, e, t))
}

pub(crate) fn geodesic_unchecked(y: &SpherePoint, e: &HVector, t: f64) -> SpherePoint {
    let v = y.as_hvector().scale(t.cos()).add(&e.scale(t.sin()));
    let nv = v.norm();
    SpherePoint(v.scale(1.0 / nv))
}

/// Mixes a base seed with a tag into an independent seed (splitmix64 finalizer).
pub fn subseed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point on `S^{4n-1}` by normalizing a standard Gaussian in `R^{4n}`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpherePoint {
    loop {
        let xs: Vec<f64> = (0..4 * n).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(p) = SpherePoint::from_real(&xs) {
            return p;
        }
    }
}

/// Uniform unit quaternion (Haar measure on Sp(1)).
pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let nq = q.norm();
        if nq > 0.0 {
            return q.scale(1.0 / nq);
        }
    }
}

/// Uniformly distributed unit tangent vector at `y`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, y: &SpherePoint) -> HVector {
    loop {
        let xs: Vec<f64> = (0..4 * y.n()).map(|_| rng.sample(StandardNormal)).collect();
        let g = HVector::from_real(&xs).expect("length is a multiple of four");
        let t = g.sub(&y.as_hvector().scale(y.as_hvector().dot(&g)));
        let nt = t.norm();
        if nt > 1e-6 {
            return t.scale(1.0 / nt);
        }
    }
}

/// `count` points of `S^{4n-1}` from a randomly shifted Kronecker lattice.
///
/// Point `i` is `frac(shift + i α)` in `[0, 1)^{4n}` with `α_k = φ^{-k}`,
/// `φ` the positive root of `x^{4n+1} = x + 1`, and `shift` drawn from `seed`.
/// The cube is mapped onto the sphere measure-preservingly: `2n` coordinates
/// give exponential spacings for the squared moduli of `2n` complex
/// coordinates, the other `2n` give their phases. Averages over the lattice
/// are unbiased over the shift and converge much faster than i.i.d. sampling
/// for smooth integrands.
pub fn sample_sphere_lattice(n: usize, count: usize, seed: u64) -> Result<Vec<SpherePoint>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let d = 4 * n;
    let mut phi = 2.0_f64;
    for _ in 0..200 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=d).map(|k| phi.powi(-(k as i32))).collect();
    let mut rng = stream_rng(seed, 0);
    let shift: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
    let points = (0..count)
        .into_par_iter()
        .map(|i| {
            let u: Vec<f64> = alpha.iter().zip(&shift).map(|(a, s)| (s + (i as f64 + 1.0) * a).fract()).collect();
            let spacings: Vec<f64> = u[..2 * n].iter().map(|v| -(1.0 - v).ln()).collect();
            let total: f64 = spacings.iter().sum();
            let mut xs = Vec::with_capacity(d);
            for (e, v) in spacings.iter().zip(&u[2 * n..]) {
                let (s, c) = (std::f64::consts::TAU * v).sin_cos();
                let r = (e / total).sqrt();
                xs.push(r * c);
                xs.push(r * s);
            }
            SpherePoint::from_real(&xs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(points)
}

/// Points generated per independent stream in [`sample_sphere`].
pub const SAMPLE_CHUNK: usize = 4096;

/// `count` i.i.d. uniform points on `S^{4n-1}`.
///
/// Chunk `c` of [`SAMPLE_CHUNK`] points is drawn from stream `c` of `seed`, so
/// the output does not depend on how many threads produce it.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Result<Vec<SpherePoint>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let out: Vec<Vec<SpherePoint>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let mut rng = stream_rng(seed, c as u64);
            (0..len).map(|_| random_point(&mut rng, n)).collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}
