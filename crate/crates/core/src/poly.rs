//! Jacobi polynomials, scaled Chebyshev polynomials of the second kind, and
//! exact binomial coefficients.

use crate::error::{Error, Result};

/// Overshoot allowed past the edge of a polynomial's domain.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Parameters of the classical Jacobi polynomial `P_degree^{(alpha, beta)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
    pub degree: usize,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64, degree: usize) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidJacobiParams { alpha, beta });
        }
        Ok(Self { alpha, beta, degree })
    }
}

/// `P_m^{(alpha, beta)}(x)` by the three-term recurrence.
pub fn jacobi_eval(params: JacobiParams, x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 + DOMAIN_TOL {
        return Err(Error::OutOfDomain { value: x, domain: "[-1, 1]" });
    }
    let JacobiParams { alpha, beta, degree } = JacobiParams::new(params.alpha, params.beta, params.degree)?;
    Ok(jacobi_unchecked(alpha, beta, degree, x.clamp(-1.0, 1.0)))
}

#[inline]
pub(crate) fn jacobi_unchecked(alpha: f64, beta: f64, degree: usize, x: f64) -> f64 {
    if degree == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=degree {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `|q|^k U_k(a / |q|)` written in `a = Re q` and `s = |q|^2`.
///
/// This is a polynomial in `(a, s)`, finite at `q = 0`; for `s = 1` it is the
/// Chebyshev polynomial `U_k(a)`.
pub fn cheb_u_scaled(k: usize, a: f64, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::OutOfDomain { value: s, domain: "s >= 0" });
    }
    if a.is_nan() || a * a > s + DOMAIN_TOL {
        return Err(Error::OutOfDomain { value: a, domain: "a^2 <= s" });
    }
    Ok(cheb_u_unchecked(k, a, s))
}

#[inline]
pub(crate) fn cheb_u_unchecked(k: usize, a: f64, s: f64) -> f64 {
    let mut w0 = 1.0;
    if k == 0 {
        return w0;
    }
    let mut w1 = 2.0 * a;
    for _ in 1..k {
        let w2 = 2.0 * a * w1 - s * w0;
        w0 = w1;
        w1 = w2;
    }
    w1
}

/// All `W_0 ..= W_kmax` at once.
pub(crate) fn cheb_u_table(kmax: usize, a: f64, s: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if kmax == 0 {
        return;
    }
    out.push(2.0 * a);
    for k in 2..=kmax {
        let w = 2.0 * a * out[k - 1] - s * out[k - 2];
        out.push(w);
    }
}

/// Exact `C(a, b)`.
pub fn binomial(a: i64, b: i64) -> Result<u128> {
    if b < 0 || a < 0 || b > a {
        return Err(Error::BinomialRange { a, b });
    }
    let b_small = b.min(a - b) as u128;
    let a = a as u128;
    let mut acc: u128 = 1;
    for i in 0..b_small {
        // acc * (a - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul(a - i).ok_or(Error::BinomialOverflow { a: a as i64, b })? / (i + 1);
    }
    Ok(acc)
}
