use proptest::prelude::*;
use qsphere::diffops::{gamma_apply, laplace_beltrami_apply, FDConfig};
use qsphere::kernel::{raw_kernel, KernelIndex};
use qsphere::poly::{jacobi_eval, JacobiParams};
use qsphere::quat::{flow, inner, sample_sphere, Axis, HVector, Quaternion, SpherePoint};
use qsphere::spectral::psi;

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(|[a, b, c, d]| Quaternion::new(a, b, c, d))
}

fn sphere_point(n: usize) -> impl Strategy<Value = SpherePoint> {
    prop::collection::vec(-1.0f64..1.0, 4 * n)
        .prop_filter("away from the origin", |v| v.iter().map(|c| c * c).sum::<f64>() > 0.01)
        .prop_map(|v| SpherePoint::from_real(&v).unwrap())
}

fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(Axis::ALL.to_vec())
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn hamilton_product_is_associative_and_multiplicative(p in quaternion(), q in quaternion(), r in quaternion()) {
        prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + p.norm() * q.norm()));
        prop_assert!(close((p * q) * r, p * (q * r), 1e-12));
        prop_assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-12));
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(x in sphere_point(3), y in sphere_point(3), q in quaternion()) {
        let (xv, yv) = (x.as_hvector(), y.as_hvector());
        prop_assert!(close(inner(yv, xv).unwrap(), inner(xv, yv).unwrap().conj(), 1e-12));
        // left-linear in the first slot
        prop_assert!(close(inner(&xv.left_mul(q), yv).unwrap(), q * inner(xv, yv).unwrap(), 1e-12));
    }

    #[test]
    fn flows_form_one_parameter_groups(x in sphere_point(2), a in axis(), s in -4.0f64..4.0, t in -4.0f64..4.0) {
        let composed = flow(&flow(&x, a, s), a, t);
        let direct = flow(&x, a, s + t);
        prop_assert!(composed.as_hvector().sub(direct.as_hvector()).norm() < 1e-10);
        // isometries
        let y = SpherePoint::basis(2, 1);
        let d0 = x.as_hvector().sub(y.as_hvector()).norm();
        let d1 = flow(&x, a, t).as_hvector().sub(flow(&y, a, t).as_hvector()).norm();
        prop_assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn kernels_are_zonal(h in 0usize..9, m_frac in 0.0f64..1.0, re in -0.9f64..0.9, frac in 0.0f64..1.0,
                         u in quaternion(), v in quaternion(), w in quaternion()) {
        // two pairs (x, y) with equal Re<x,y> and |<x,y>|, built in different ways
        prop_assume!(u.imag().norm() > 0.1 && v.imag().norm() > 0.1 && w.norm() > 0.1);
        let m = ((h / 2) as f64 * m_frac).round() as usize;
        let idx = KernelIndex::new(2, h, m).unwrap();
        let modulus = re.abs() + frac * (1.0 - re.abs());
        let im = (modulus * modulus - re * re).max(0.0).sqrt();
        let q1 = Quaternion::real(re) + u.imag().scale(im / u.imag().norm());
        let q2 = Quaternion::real(re) + v.imag().scale(im / v.imag().norm());
        let rest = (1.0 - modulus * modulus).max(0.0).sqrt();
        let x = SpherePoint::basis(2, 0);
        let y1 = SpherePoint::new(HVector::new(vec![q1.conj(), Quaternion::real(rest)])).unwrap();
        let x2 = SpherePoint::basis(2, 1);
        let y2 = SpherePoint::new(HVector::new(vec![w.scale(rest / w.norm()), q2.conj()])).unwrap();
        let a = raw_kernel(&idx, &x, &y1).unwrap();
        let b = raw_kernel(&idx, &x2, &y2).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn jacobi_three_term_recurrence(alpha in -0.9f64..8.0, beta in -0.9f64..8.0, m in 2usize..=20, x in -1.0f64..1.0) {
        let p = |d: usize| jacobi_eval(JacobiParams::new(alpha, beta, d).unwrap(), x).unwrap();
        let (a, b, k) = (alpha, beta, m as f64);
        let s = 2.0 * k + a + b;
        let lhs = 2.0 * k * (k + a + b) * (s - 2.0) * p(m);
        let rhs = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * p(m - 1)
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * p(m - 2);
        let scale = (s * s * s) * (p(m).abs() + p(m - 1).abs() + p(m - 2).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn psi_is_zero_homogeneous_away_from_the_origin(u in 1.0f64..50.0, frac in 0.0f64..1.0, lam in 1.0f64..20.0, eps in 0.01f64..0.45) {
        let v = u * frac;
        prop_assert!((psi(lam * u, lam * v, eps) - psi(u, v, eps)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&psi(u, v, eps)));
    }
}

#[test]
fn richardson_is_fourth_order() {
    // y -> raw K_{3,1}(x0, y) has eigenvalues 27 for Δ and 3 for Γ
    let idx = KernelIndex::new(2, 3, 1).unwrap();
    let x0 = SpherePoint::basis(2, 0);
    let f = |y: &SpherePoint| raw_kernel(&idx, &x0, y).unwrap();
    let diag = f(&x0);
    let ys: Vec<SpherePoint> =
        sample_sphere(2, 200, 3).unwrap().into_iter().filter(|y| f(y).abs() > 0.3 * diag.abs()).take(5).collect();
    assert!(!ys.is_empty());
    for y in &ys {
        let err = |step: f64| {
            let cfg = FDConfig::new(step, true).unwrap();
            let fy = f(y);
            ((laplace_beltrami_apply(f, y, &cfg) / fy - 27.0).abs(), (gamma_apply(f, y, &cfg) / fy - 3.0).abs())
        };
        let (coarse, fine) = (err(0.1), err(0.05));
        for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1)] {
            let ratio = c / f;
            assert!((8.0..=32.0).contains(&ratio), "error ratio {ratio} ({c} -> {f})");
        }
    }
}
