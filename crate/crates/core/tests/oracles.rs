//! Library results against independent computations: closed forms,
//! deterministic quadrature and exact spectral identities.

use approx::assert_relative_eq;
use qsphere::dimension::{gen_point_mass, gen_uniform, s_energy};
use qsphere::kernel::{raw_kernel_from_inner, CalibratedKernel, CalibrationConfig, KernelBank, KernelIndex};
use qsphere::measure::{Atom, DiscreteMeasure};
use qsphere::poly::{binomial, jacobi_eval, JacobiParams};
use qsphere::quat::{sample_sphere_lattice, Quaternion, SpherePoint};
use qsphere::spectral::{apply_multiplier, project, project_with_stderr, spectrum_scan};

fn x1() -> SpherePoint {
    SpherePoint::from_real(&[0.3, -0.2, 0.5, 0.1, 0.6, 0.2, -0.3, 0.35]).unwrap()
}

fn bank6() -> KernelBank {
    KernelBank::calibrate(2, 6, &CalibrationConfig::default()).unwrap()
}

// generalized binomial coefficient (a choose k) for real a
fn gbinom(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i + 1) as f64)
}

fn jacobi_sum(alpha: f64, beta: f64, m: usize, x: f64) -> f64 {
    (0..=m)
        .map(|s| {
            gbinom(m as f64 + alpha, m - s)
                * gbinom(m as f64 + beta, s)
                * ((x - 1.0) / 2.0).powi(s as i32)
                * ((x + 1.0) / 2.0).powi((m - s) as i32)
        })
        .sum()
}

#[test]
fn jacobi_matches_explicit_sum() {
    for (alpha, beta) in [(1.0, 1.0), (3.0, 2.0), (1.0, 7.0), (0.5, -0.5), (5.0, 12.0)] {
        for m in 0..=12 {
            for x in [-1.0, -0.7, 0.0, 0.3, 0.95, 1.0] {
                let got = jacobi_eval(JacobiParams::new(alpha, beta, m).unwrap(), x).unwrap();
                let want = jacobi_sum(alpha, beta, m, x);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "P_{m}^({alpha},{beta})({x}): {got} vs {want}"
                );
            }
        }
    }
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_k.
fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    (1..=k)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (k as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=k {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `E[f(<x, y>)]` for `y` uniform on `S^{4n-1}`: the quaternion `<x, y>` has
/// density proportional to `(1 - r²)^{2n-3} r³ sin²θ` in polar coordinates of
/// the unit ball of `H`, with `Re = r cos θ`. Gauss-Legendre in `r` and
/// Gauss-Chebyshev of the second kind in `t = cos θ`.
fn sphere_expectation(n: usize, f: impl Fn(Quaternion) -> f64) -> f64 {
    let gl = gauss_legendre(40);
    let k = 40;
    let cheb: Vec<(f64, f64)> = (1..=k)
        .map(|i| {
            let th = i as f64 * std::f64::consts::PI / (k + 1) as f64;
            (th.cos(), std::f64::consts::PI / (k + 1) as f64 * th.sin().powi(2))
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for &(u, wu) in &gl {
        let r = 0.5 * (u + 1.0);
        let radial = 0.5 * wu * (1.0 - r * r).powi(2 * n as i32 - 3) * r.powi(3);
        for &(t, wt) in &cheb {
            let q = Quaternion::new(r * t, r * (1.0 - t * t).sqrt(), 0.0, 0.0);
            num += radial * wt * f(q);
            den += radial * wt;
        }
    }
    num / den
}

/// Calibration constant and dimension from `K(x,x) = ∫ K(x,y)² dσ(y)`.
fn quadrature_calibration(idx: &KernelIndex) -> (f64, f64) {
    let diag = raw_kernel_from_inner(idx, Quaternion::ONE);
    let second = sphere_expectation(idx.n, |q| raw_kernel_from_inner(idx, q).powi(2));
    let c = diag / second;
    (c, c * diag)
}

/// For n = 2, `H_{h,m}` is the Sp(2) x Sp(1) module with highest weights
/// `(h - m, m)` and `h - 2m`; Weyl's formula for Sp(2) times `h - 2m + 1`.
fn sp2_sp1_dimension(h: usize, m: usize) -> usize {
    let (a, b) = (h - m, m);
    (a - b + 1) * (b + 1) * (a + 2) * (a + b + 3) / 6 * (h - 2 * m + 1)
}

#[test]
fn quadrature_dimensions_are_integers_and_sum_correctly() {
    for n in 2..=3usize {
        for h in 0..=8usize {
            let mut total = 0.0;
            for m in 0..=h / 2 {
                let idx = KernelIndex::new(n, h, m).unwrap();
                let (_, d) = quadrature_calibration(&idx);
                assert!((d - d.round()).abs() < 1e-9, "n={n} ({h},{m}): {d}");
                if n == 2 {
                    assert_eq!(d.round() as usize, sp2_sp1_dimension(h, m), "({h},{m})");
                }
                total += d;
            }
            let d = (4 * n) as i64;
            let harmonic = binomial(h as i64 + d - 1, d - 1).unwrap() as f64
                - if h >= 2 { binomial(h as i64 + d - 3, d - 1).unwrap() as f64 } else { 0.0 };
            assert!((total - harmonic).abs() < 1e-6, "n={n} h={h}: {total} vs {harmonic}");
        }
    }
}

#[test]
fn monte_carlo_calibration_matches_quadrature() {
    for k in bank6().kernels() {
        let (c, _) = quadrature_calibration(&k.index);
        assert!((k.c / c - 1.0).abs() < 0.02, "({},{}): {} vs {c}", k.index.h, k.index.m, k.c);
    }
}

fn exact_kernel(idx: KernelIndex) -> CalibratedKernel {
    let (c, _) = quadrature_calibration(&idx);
    CalibratedKernel { index: idx, c, spread: 0.0, samples: 0, seed: 0 }
}

fn exact_bank(h_max: usize) -> KernelBank {
    let kernels = KernelIndex::all(2, h_max).unwrap().into_iter().map(exact_kernel).collect();
    KernelBank::new(2, h_max, kernels).unwrap()
}

#[test]
fn projection_is_linear_and_reproduces_point_masses() {
    let ck = exact_kernel(KernelIndex::new(2, 5, 1).unwrap());
    let a = gen_uniform(2, 300, 1).unwrap();
    let b = gen_uniform(2, 200, 2).unwrap();
    let x = x1();
    let combo = a.scaled(2.5).plus(&b.scaled(-0.75)).unwrap();
    let lhs = project(&combo, &ck, &x).unwrap();
    let rhs = 2.5 * project(&a, &ck, &x).unwrap() - 0.75 * project(&b, &ck, &x).unwrap();
    assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);

    let y = SpherePoint::basis(2, 1);
    let delta = gen_point_mass(&y);
    assert_eq!(project(&delta, &ck, &x).unwrap(), ck.kernel(&x, &y).unwrap());
}

#[test]
fn uniform_measure_projects_to_constants() {
    let bank = exact_bank(4);
    let mu = gen_uniform(2, 20_000, 3).unwrap();
    for k in bank.kernels() {
        let (v, se) = project_with_stderr(&mu, k, &x1()).unwrap();
        if k.index.h == 0 {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        } else {
            assert!(v.abs() <= 4.0 * se, "({},{}): {v} (se {se})", k.index.h, k.index.m);
        }
    }
    let scan = spectrum_scan(&mu, &bank, 0.1, 64, 1).unwrap();
    let flagged: Vec<(usize, usize)> = scan.flagged().map(|e| (e.h, e.m)).collect();
    assert_eq!(flagged, vec![(0, 0)]);
}

#[test]
fn point_mass_has_norm_equal_to_dimension() {
    // |π δ_y|² = K(y, y) = dim H_{h,m}
    let bank = exact_bank(6);
    let scan = spectrum_scan(&gen_point_mass(&x1()), &bank, 0.1, 4096, 2).unwrap();
    for e in &scan.entries {
        let d = bank.get(e.h, e.m).unwrap().diagonal();
        assert!(e.flagged_nonzero, "({},{})", e.h, e.m);
        assert!(
            (e.norm_sq - d).abs() <= 4.0 * e.mc_stderr + 1e-12 * d,
            "({},{}): {} vs {d} (se {})",
            e.h,
            e.m,
            e.norm_sq,
            e.mc_stderr
        );
    }
}

/// `f σ` for `f = K_{h,m}(x1, ·)`, on 8 independently shifted lattices.
fn section_measure(ck: &CalibratedKernel, per_block: usize) -> DiscreteMeasure {
    let blocks = 8;
    let total = (per_block * blocks) as f64;
    let mut atoms = Vec::new();
    for b in 0..blocks {
        for y in sample_sphere_lattice(2, per_block, 100 + b as u64).unwrap() {
            let w = ck.kernel(&x1(), &y).unwrap() / total;
            atoms.push(Atom { point: y, weight: w });
        }
    }
    DiscreteMeasure::new(format!("section({},{})", ck.index.h, ck.index.m), atoms).unwrap().with_blocks(blocks).unwrap()
}

#[test]
fn kernel_section_lives_in_one_component() {
    let bank = exact_bank(5);
    let ck = bank.get(3, 1).unwrap();
    let mu = section_measure(ck, 8192);
    let scan = spectrum_scan(&mu, &bank, 0.1, 256, 4).unwrap();
    let flagged: Vec<(usize, usize)> = scan.flagged().map(|e| (e.h, e.m)).collect();
    assert_eq!(flagged, vec![(3, 1)]);
    let e = scan.get(3, 1).unwrap();
    // |f|² = K(x1, x1)
    assert!((e.norm_sq - ck.diagonal()).abs() <= 4.0 * e.mc_stderr, "{} vs {}", e.norm_sq, ck.diagonal());
}

// mean and standard error of `apply_multiplier` over the blocks of `mu`
fn multiplier_by_block(mu: &DiscreteMeasure, bank: &KernelBank, x: &SpherePoint) -> (f64, f64) {
    let r = mu.blocks();
    let size = mu.len() / r;
    let vals: Vec<f64> = mu
        .atoms()
        .chunks(size)
        .map(|c| {
            let block = DiscreteMeasure::new("block", c.to_vec()).unwrap().scaled(r as f64);
            apply_multiplier(&block, bank, 0.1, x).unwrap().value
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / r as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt())
}

#[test]
fn multiplier_keeps_the_half_cone_and_drops_the_outside() {
    let bank = exact_bank(6);
    let x = SpherePoint::from_real(&[0.4, 0.1, 0.5, -0.2, 0.5, 0.3, -0.2, 0.4]).unwrap();
    // (4, 0) lies outside the cone
    let outside = section_measure(bank.get(4, 0).unwrap(), 4096);
    let (v, se) = multiplier_by_block(&outside, &bank, &x);
    assert!(v.abs() <= 4.0 * se, "{v} (se {se})");
    // (4, 2) lies on the plateau, where L₃ acts as the identity
    let inside = bank.get(4, 2).unwrap();
    let (v, se) = multiplier_by_block(&section_measure(inside, 4096), &bank, &x);
    let want = inside.kernel(&x1(), &x).unwrap();
    assert!((v - want).abs() <= 4.0 * se, "{v} vs {want} (se {se})");
}

#[test]
fn riesz_energy_separates_below_and_above_dimension() {
    // the uniform measure on S⁷ has finite s-energy exactly for s < 7
    let small = gen_uniform(2, 1000, 5).unwrap();
    let large = gen_uniform(2, 8000, 6).unwrap();
    let below = s_energy(&large, 3.0).unwrap() / s_energy(&small, 3.0).unwrap();
    assert!((below - 1.0).abs() < 0.05, "{below}");
    let above = s_energy(&large, 12.0).unwrap() / s_energy(&small, 12.0).unwrap();
    assert!(above > 1.5, "{above}");
}
