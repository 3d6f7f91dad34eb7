mod common;

use common::{rel_err, tanh_sinh, to_infinity};
use num_complex::Complex64;
use std::f64::consts::PI;
use vgamma::model::{
    factor_params, gamma_char, gamma_density, gamma_laplace, levy_tail, vg_char, vg_density,
    vg_density_dx, vg_density_quadrature, Density, DerivOrder, GammaParams, VgParams,
};
use vgamma::special_fn::{exp_integral_e1, ln_gamma};
use vgamma::{Error, QuadConfig};

fn h(p: &GammaParams, t: f64, x: f64) -> f64 {
    gamma_density(p, t, x).unwrap().finite().unwrap()
}

fn vg(a: f64, b: f64) -> VgParams {
    VgParams::driftless(a, b).unwrap()
}

fn dens(p: &VgParams, t: f64, x: f64) -> f64 {
    vg_density(p, t, x).unwrap().value().unwrap()
}

/// Subordination integral computed entirely on the test side, in the
/// variable s with tanh-sinh on (0, 1] and a mapped tail beyond.
fn subordination_oracle(a: f64, b: f64, theta: f64, t: f64, x: f64) -> f64 {
    let shape = a * t;
    let lg = ln_gamma(shape).unwrap();
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let d = x - theta * s;
        let ln = -d * d / (4.0 * s) - 0.5 * (4.0 * PI * s).ln() + shape * b.ln()
            + (shape - 1.0) * s.ln()
            - b * s
            - lg;
        ln.exp()
    };
    tanh_sinh(f, 0.0, 1.0) + to_infinity(f, 1.0)
}

#[test]
fn gamma_density_examples() {
    let p = GammaParams::new(1.0, 1.0).unwrap();
    assert!(rel_err(h(&p, 1.0, 2.0), (-2.0f64).exp()) < 1e-14);
    assert!(rel_err(h(&p, 2.0, 1.0), (-1.0f64).exp()) < 1e-14);
    assert_eq!(h(&p, 1.0, -3.0), 0.0);
    let small = GammaParams::new(0.5, 1.0).unwrap();
    assert_eq!(gamma_density(&small, 1.0, 0.0).unwrap(), Density::Infinite);
}

#[test]
fn gamma_density_normalizes_and_matches_laplace() {
    let p = GammaParams::new(0.7, 2.0).unwrap();
    let t = 1.3;
    // Shape 0.91 < 1: integrable singularity at the origin.
    let mass = to_infinity(|x| if x > 0.0 { h(&p, t, x) } else { 0.0 }, 0.0);
    assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
    for lam in [0.1, 1.0, 5.0] {
        let num = to_infinity(|x| if x > 0.0 { (-lam * x).exp() * h(&p, t, x) } else { 0.0 }, 0.0);
        let exact = gamma_laplace(&p, t, lam).unwrap();
        assert!((num - exact).abs() < 1e-8, "lambda={lam}: {num} vs {exact}");
    }
}

#[test]
fn gamma_laplace_examples() {
    let p = GammaParams::new(1.0, 1.0).unwrap();
    assert_eq!(gamma_laplace(&p, 1.0, 0.0).unwrap(), 1.0);
    assert!((gamma_laplace(&p, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    let q = GammaParams::new(2.0, 3.0).unwrap();
    let num = to_infinity(|x| if x > 0.0 { (-1.7 * x).exp() * h(&q, 0.5, x) } else { 0.0 }, 0.0);
    assert!((gamma_laplace(&q, 0.5, 1.7).unwrap() - num).abs() < 1e-9);
    assert!(matches!(gamma_laplace(&p, 1.0, -1.0), Err(Error::Domain { .. })));
}

#[test]
fn vg_density_laplace_case_and_symmetry() {
    let p = vg(1.0, 1.0);
    let e = (-1.0f64).exp() / 2.0;
    assert!(rel_err(dens(&p, 1.0, 1.0), e) < 1e-14);
    assert!(rel_err(dens(&p, 1.0, -1.0), e) < 1e-14);
    for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
        assert!((dens(&p, 1.0, x) - 0.5 * (-x).exp()).abs() < 1e-12);
    }
    // Continuous limit at the origin.
    assert!((dens(&p, 1.0, 0.0) - 0.5).abs() < 1e-14);
    let q = vg(1.4, 2.0);
    for x in [0.2, 0.9, 3.3, 12.0] {
        assert_eq!(dens(&q, 1.5, x), dens(&q, 1.5, -x));
    }
}

#[test]
fn vg_density_origin_regimes() {
    assert_eq!(vg_density(&vg(1.0, 1.0), 0.3, 0.0).unwrap(), Density::Infinite);
    assert!(matches!(vg_density(&vg(1.0, 1.0), 0.5, 0.0), Err(Error::Domain { .. })));
    assert!(vg_density(&vg(1.0, 1.0), 0.0, 1.0).is_err());
    let drifted = VgParams::new(1.0, 1.0, 0.5).unwrap();
    assert!(vg_density(&drifted, 1.0, 1.0).is_err());
}

#[test]
fn closed_form_matches_subordination_integral() {
    let p = vg(1.4, 2.0);
    let closed = dens(&p, 1.5, 0.8);
    let quad = vg_density_quadrature(&p, 1.5, 0.8, &QuadConfig::precise()).unwrap();
    assert!(rel_err(closed, quad) < 1e-8, "{closed} vs {quad}");
    let oracle = subordination_oracle(1.4, 2.0, 0.0, 1.5, 0.8);
    assert!(rel_err(closed, oracle) < 1e-9, "{closed} vs {oracle}");
}

#[test]
fn quadrature_density_examples() {
    let q = QuadConfig::default();
    let p = vg(1.0, 1.0);
    let v = vg_density_quadrature(&p, 1.0, 1.0, &q).unwrap();
    assert!((v - (-1.0f64).exp() / 2.0).abs() < q.abs_tol);
    let r = vg(0.8, 1.7);
    for x in [0.3, 1.1, 4.0] {
        let d = vg_density_quadrature(&r, 2.0, x, &q).unwrap() - vg_density_quadrature(&r, 2.0, -x, &q).unwrap();
        assert!(d.abs() <= q.abs_tol);
    }
}

#[test]
fn drifted_density_normalizes_and_matches_oracle() {
    let p = VgParams::new(1.0, 1.0, 0.5).unwrap();
    let q = QuadConfig::default();
    let v = vg_density_quadrature(&p, 1.0, 0.3, &q).unwrap();
    let oracle = subordination_oracle(1.0, 1.0, 0.5, 1.0, 0.3);
    assert!(rel_err(v, oracle) < 1e-8, "{v} vs {oracle}");

    // Trapezoid over [-30, 30] with the kink at 0 on a node.
    let n = 30_000;
    let step = 60.0 / n as f64;
    let mut mass = 0.0;
    for k in 0..=n {
        let x = -30.0 + k as f64 * step;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        mass += w * vg_density_quadrature(&p, 1.0, x, &q).unwrap();
    }
    mass *= step;
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn fourier_transform_of_density_matches_char() {
    for (a, b, t) in [(1.0, 1.0, 1.0), (1.4, 2.0, 1.5), (0.8, 0.5, 2.0)] {
        let p = vg(a, b);
        let half = 40.0 / b.sqrt();
        let n = 1usize << 14;
        let step = 2.0 * half / n as f64;
        let values: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let x = -half + k as f64 * step;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                (x, w * dens(&p, t, x))
            })
            .collect();
        for j in 0..=40 {
            let xi = -10.0 + 0.5 * j as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            for &(x, f) in &values {
                sum += Complex64::from_polar(f, xi * x);
            }
            let got = sum * step;
            let exact = vg_char(&p, t, xi);
            assert!((got - exact).norm() < 1e-5, "(a,b,t)=({a},{b},{t}) xi={xi}: {got} vs {exact}");
        }
    }
}

#[test]
fn vg_char_examples() {
    let p = vg(1.0, 1.0);
    assert!((vg_char(&p, 1.0, 1.0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    assert_eq!(vg_char(&vg(2.3, 0.4), 1.7, 0.0), Complex64::new(1.0, 0.0));
    let d = VgParams::new(1.0, 1.0, 1.0).unwrap();
    let expected = Complex64::new(5.0 / 29.0, 2.0 / 29.0);
    assert!((vg_char(&d, 1.0, 2.0) - expected).norm() < 1e-15);
    // Driftless values are real.
    assert_eq!(vg_char(&vg(1.3, 2.0), 0.7, 3.0).im, 0.0);
}

#[test]
fn char_bases_stay_in_right_half_plane() {
    // The principal branch is valid because Re(base) > 0, and the product of
    // powers then equals the power of the product.
    for theta in [-3.0, -0.4, 0.0, 1.0, 5.0] {
        let p = VgParams::new(2.5, 0.7, theta).unwrap();
        let f = factor_params(&p);
        for k in -50..=50 {
            let xi = k as f64 * 0.8;
            let base = Complex64::new(1.0 + xi * xi / p.b(), -xi * theta / p.b());
            assert!(base.re > 0.0);
            let g = Complex64::new(1.0, -xi / f.gain.b());
            let l = Complex64::new(1.0, xi / f.loss.b());
            assert!(g.re > 0.0 && l.re > 0.0);
            let t = 3.1;
            let direct = vg_char(&p, t, xi);
            let split = gamma_char(&f.gain, t, xi) * gamma_char(&f.loss, t, -xi);
            assert!((direct - split).norm() < 1e-12, "theta={theta} xi={xi}");
        }
    }
}

#[test]
fn factor_params_examples() {
    let f = factor_params(&vg(1.0, 1.0));
    assert_eq!((f.gain.a(), f.gain.b(), f.loss.a(), f.loss.b()), (1.0, 1.0, 1.0, 1.0));
    let p = VgParams::new(1.0, 3.0, 2.0).unwrap();
    let f = factor_params(&p);
    assert!((f.gain.b() - 1.0).abs() < 1e-15 && (f.loss.b() - 3.0).abs() < 1e-15);
    for k in -20..=20 {
        let xi = 0.37 * k as f64;
        let lhs = Complex64::new(1.0, -xi) * Complex64::new(1.0, xi / 3.0);
        let rhs = Complex64::new(1.0 + xi * xi / 3.0, -xi * 2.0 / 3.0);
        assert!((lhs - rhs).norm() < 1e-13);
    }
}

#[test]
fn levy_tail_examples() {
    let e1 = exp_integral_e1(1.0).unwrap();
    assert!((levy_tail(&GammaParams::new(1.0, 1.0).unwrap(), 1.0).unwrap() - 0.219_383_934_4).abs() < 1e-10);
    assert!(rel_err(levy_tail(&GammaParams::new(3.0, 1.0).unwrap(), 1.0).unwrap(), 3.0 * e1) < 1e-15);
    assert!(rel_err(levy_tail(&GammaParams::new(1.0, 2.0).unwrap(), 0.5).unwrap(), e1) < 1e-15);
    let p = GammaParams::new(1.2, 0.6).unwrap();
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let v = levy_tail(&p, 0.05 * k as f64).unwrap();
        assert!(v < prev);
        prev = v;
    }
    assert!(levy_tail(&p, 0.0).is_err());
}

#[test]
fn density_derivatives_match_finite_differences() {
    let p = vg(1.0, 1.0);
    let e = (-1.0f64).exp() / 2.0;
    assert!(rel_err(vg_density_dx(&p, 1.0, 1.0, DerivOrder::First).unwrap(), -e) < 1e-13);
    assert!(rel_err(vg_density_dx(&p, 1.0, 1.0, DerivOrder::Second).unwrap(), e) < 1e-13);
    for (a, b, t) in [(1.6, 2.0, 1.2), (1.0, 1.0, 2.0), (0.7, 3.0, 1.0), (2.0, 0.5, 3.0)] {
        let q = vg(a, b);
        for x in [-2.5, -0.5, 0.3, 0.5, 1.7, 6.0] {
            let step = 1e-5f64.max(1e-5 * f64::abs(x));
            let fd1 = (dens(&q, t, x + step) - dens(&q, t, x - step)) / (2.0 * step);
            let d1 = vg_density_dx(&q, t, x, DerivOrder::First).unwrap();
            assert!(rel_err(d1, fd1) < 1e-6, "({a},{b},{t}) x={x}: {d1} vs {fd1}");
            let fd2 = (vg_density_dx(&q, t, x + step, DerivOrder::First).unwrap()
                - vg_density_dx(&q, t, x - step, DerivOrder::First).unwrap())
                / (2.0 * step);
            let d2 = vg_density_dx(&q, t, x, DerivOrder::Second).unwrap();
            assert!((d2 - fd2).abs() < 1e-6 * d2.abs().max(fd2.abs()).max(1e-3), "second ({a},{b},{t}) x={x}");
        }
    }
    assert!(vg_density_dx(&p, 1.0, 0.0, DerivOrder::First).is_err());
}

#[test]
fn parameter_validation() {
    assert!(GammaParams::new(0.0, 1.0).is_err());
    assert!(GammaParams::new(1.0, -1.0).is_err());
    assert!(VgParams::new(1.0, 1.0, f64::NAN).is_err());
    assert!(VgParams::new(f64::INFINITY, 1.0, 0.0).is_err());
}
