use num_complex::Complex64;
use vgamma::model::{factor_params, vg_char, VgParams};
use vgamma::residuals::{
    bessel_ode_residual, check_beghin_shift, check_drifted_nonlocal, check_initial_condition,
    check_phillips_eq, check_space_ode, check_time_nonlocal, check_time_nonlocal_with_step, fourier_sides,
    EquationId, Grid2D, ResidualReport, DEFAULT_TIME_STEP, REL_FLOOR,
};
use vgamma::{Error, QuadConfig};

fn vg(a: f64, b: f64) -> VgParams {
    VgParams::driftless(a, b).unwrap()
}

fn time_grid() -> Grid2D {
    Grid2D::new(vec![1.0, 2.0], vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]).unwrap()
}

fn assert_consistent(r: &ResidualReport) {
    assert_eq!(r.points.len(), r.grid.t_values().len() * r.grid.x_values().len());
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for p in &r.points {
        assert!(p.error.is_none(), "{:?}", p.error);
        assert_eq!(p.abs_residual, (p.lhs - p.rhs).abs());
        max_abs = max_abs.max(p.abs_residual);
        max_rel = max_rel.max(p.rel_residual);
    }
    assert_eq!(r.max_abs, max_abs);
    assert_eq!(r.max_rel, max_rel);
    assert_eq!(r.failed_points, 0);
}

#[test]
fn time_nonlocal_acceptance_grid() {
    let r = check_time_nonlocal(&vg(1.0, 1.0), &time_grid(), &QuadConfig::default()).unwrap();
    assert_consistent(&r);
    assert!(r.max_rel <= EquationId::TimeNonlocal.tolerance(), "{}", r.max_rel);
    for p in &r.points {
        let floor = p.lhs.abs().max(p.rhs.abs()).max(REL_FLOOR);
        assert_eq!(p.rel_residual, p.abs_residual / floor);
    }
    assert_eq!(r.time_step, Some(DEFAULT_TIME_STEP));
}

#[test]
fn time_nonlocal_residual_is_even_in_x() {
    let r = check_time_nonlocal(&vg(1.0, 1.0), &time_grid(), &QuadConfig::default()).unwrap();
    for p in &r.points {
        let mirror = r.points.iter().find(|m| m.t == p.t && m.x == -p.x).unwrap();
        assert!((p.abs_residual - mirror.abs_residual).abs() < 1e-10);
        assert!((p.lhs - mirror.lhs).abs() < 1e-10 && (p.rhs - mirror.rhs).abs() < 1e-10);
    }
}

#[test]
fn halving_the_time_step_shrinks_the_residual() {
    let p = vg(1.0, 1.0);
    let q = QuadConfig::precise();
    // A coarse step makes the truncation term dominate the quadrature floor.
    let coarse = check_time_nonlocal_with_step(&p, &time_grid(), &q, 1e-2).unwrap();
    let fine = check_time_nonlocal_with_step(&p, &time_grid(), &q, 5e-3).unwrap();
    assert!(coarse.max_abs >= 2.0 * fine.max_abs, "{} vs {}", coarse.max_abs, fine.max_abs);
    let default = check_time_nonlocal(&p, &time_grid(), &q).unwrap();
    let half = check_time_nonlocal_with_step(&p, &time_grid(), &q, 0.5 * DEFAULT_TIME_STEP).unwrap();
    assert!(default.max_abs >= 2.0 * half.max_abs, "{} vs {}", default.max_abs, half.max_abs);
}

#[test]
fn drifted_equation_and_driftless_reduction() {
    let q = QuadConfig::default();
    let drifted = VgParams::new(1.0, 1.0, 0.5).unwrap();
    let g = Grid2D::new(vec![1.5], vec![-1.0, -0.5, 0.5, 1.0]).unwrap();
    let r = check_drifted_nonlocal(&drifted, &g, &q).unwrap();
    assert_consistent(&r);
    assert!(r.max_rel <= EquationId::DriftedNonlocal.tolerance(), "{}", r.max_rel);

    let base = check_time_nonlocal(&vg(1.0, 1.0), &time_grid(), &q).unwrap();
    let zero = check_drifted_nonlocal(&vg(1.0, 1.0), &time_grid(), &q).unwrap();
    for (a, b) in base.points.iter().zip(&zero.points) {
        assert_eq!((a.t, a.x), (b.t, b.x));
        assert!((a.lhs - b.lhs).abs() < 1e-9, "lhs at ({}, {})", a.t, a.x);
        assert!((a.rhs - b.rhs).abs() < 1e-9, "rhs at ({}, {})", a.t, a.x);
    }
}

#[test]
fn space_ode_is_exact_to_rounding() {
    let laplace = check_space_ode(&vg(1.0, 1.0), &Grid2D::new(vec![1.0], vec![1.0]).unwrap()).unwrap();
    assert!(laplace.max_abs < 1e-16);
    let g = Grid2D::new(vec![0.8, 1.1, 2.5], vec![-3.0, -1.5, -0.4, -0.1, 0.1, 0.7, 2.0, 6.0]).unwrap();
    let r = check_space_ode(&VgParams::driftless(1.3, 2.0).unwrap(), &g).unwrap();
    assert_eq!(r.points.len(), 24);
    assert!(r.max_rel <= 1e-9, "{}", r.max_rel);
    assert!(bessel_ode_residual(0.8, 1.5).unwrap() <= 1e-9);
    for nu in [0.0, 0.3, 2.5, 7.0] {
        for z in [0.2, 1.0, 9.0] {
            assert!(bessel_ode_residual(nu, z).unwrap() <= 1e-9, "nu={nu} z={z}");
        }
    }
}

#[test]
fn phillips_equation_and_operator_equivalence() {
    let q = QuadConfig::default();
    let p = vg(1.0, 1.0);
    let spot = check_phillips_eq(&p, &Grid2D::new(vec![1.0], vec![1.0]).unwrap(), &q).unwrap();
    assert!(spot.max_rel <= EquationId::Phillips.tolerance(), "{}", spot.max_rel);
    let ph = check_phillips_eq(&p, &time_grid(), &q).unwrap();
    let weyl = check_time_nonlocal(&p, &time_grid(), &q).unwrap();
    assert_consistent(&ph);
    for (a, b) in ph.rhs().iter().zip(weyl.rhs()) {
        assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
    }
}

#[test]
fn beghin_shift_examples_and_preconditions() {
    let r = check_beghin_shift(&vg(1.0, 1.0), 2.0, &[0.5, 1.0, 2.0]).unwrap();
    assert!(r.max_abs <= 1e-9 && r.max_rel <= 1e-9, "{} {}", r.max_abs, r.max_rel);
    let r = check_beghin_shift(&vg(2.0, 1.0), 1.0, &[0.5]).unwrap();
    assert!(r.max_abs <= 1e-9, "{}", r.max_abs);
    assert!(matches!(check_beghin_shift(&vg(1.0, 1.0), 0.9, &[1.0]), Err(Error::Precondition(_))));
    assert!(matches!(check_beghin_shift(&vg(1.0, 1.0), 1.0, &[1.0]), Err(Error::Precondition(_))));
}

#[test]
fn time_checks_reject_unbounded_slices() {
    let g = Grid2D::new(vec![0.4], vec![1.0]).unwrap();
    let q = QuadConfig::default();
    assert!(check_time_nonlocal(&vg(1.0, 1.0), &g, &q).is_err());
    assert!(check_phillips_eq(&vg(1.0, 1.0), &g, &q).is_err());
    let drifted = VgParams::new(1.0, 1.0, 0.3).unwrap();
    assert!(check_time_nonlocal(&drifted, &time_grid(), &q).is_err());
    assert!(check_space_ode(&drifted, &time_grid()).is_err());
}

#[test]
fn grid_rejects_bad_axes() {
    assert!(Grid2D::new(vec![1.0], vec![0.0]).is_err());
    assert!(Grid2D::new(vec![1.0], vec![-0.01, 1.0]).is_err());
    assert!(Grid2D::new(vec![-1.0, 1.0], vec![1.0]).is_err());
    assert!(Grid2D::new(vec![1.0, 1.0], vec![1.0]).is_err());
    assert!(Grid2D::new(vec![1.0], vec![2.0, 1.0]).is_err());
    let g = Grid2D::with_puncture(vec![1.0], vec![-0.02, 0.02], 0.01).unwrap();
    assert_eq!(g.puncture(), 0.01);
}

#[test]
fn fourier_side_identities() {
    let cases = [
        (EquationId::TimeNonlocal, vg(1.0, 1.0), 1.0),
        (EquationId::TimeNonlocal, vg(1.7, 0.4), 2.3),
        (EquationId::DriftedNonlocal, VgParams::new(1.0, 1.0, 0.5).unwrap(), 1.5),
        (EquationId::DriftedNonlocal, VgParams::new(0.6, 3.0, -2.0).unwrap(), 1.0),
        (EquationId::Phillips, vg(1.2, 2.0), 0.7),
        (EquationId::SpaceOde, vg(1.3, 2.0), 1.1),
        (EquationId::SpaceOde, vg(1.0, 1.0), 0.3),
        (EquationId::BeghinShift, vg(1.0, 1.0), 2.0),
        (EquationId::BeghinShift, vg(2.0, 1.5), 1.0),
    ];
    for (eq, p, t) in cases {
        for xi in [0.0, 0.5, 1.0, 2.0, 7.0] {
            let s = fourier_sides(eq, &p, t, xi).unwrap();
            let scale = s.lhs.norm().max(s.rhs.norm()).max(1e-300);
            assert!(s.residual() <= 1e-13 * scale.max(1.0), "{eq:?} xi={xi}: {s:?}");
        }
    }
    // Closed-form time derivative of the driftless transform.
    for xi in [0.0, 1.0, 2.0] {
        let base: f64 = 1.0 + xi * xi;
        let s = fourier_sides(EquationId::TimeNonlocal, &vg(1.0, 1.0), 1.0, xi).unwrap();
        let expected = -base.ln() * base.powf(-1.0);
        assert!((s.lhs - Complex64::new(expected, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn drifted_symbols_factorize() {
    for theta in [-1.5, 0.0, 0.5, 2.0] {
        let p = VgParams::new(0.9, 1.7, theta).unwrap();
        let f = factor_params(&p);
        for k in -30..=30 {
            let xi = 0.3 * k as f64;
            let split = p.a() * (Complex64::new(1.0, -xi / f.gain.b()).ln() + Complex64::new(1.0, xi / f.loss.b()).ln());
            let whole = p.a() * Complex64::new(1.0 + xi * xi / p.b(), -xi * theta / p.b()).ln();
            assert!((split - whole).norm() < 1e-12, "theta={theta} xi={xi}");
        }
    }
}

#[test]
fn initial_condition_in_fourier_domain() {
    let xis: Vec<f64> = (-50..=50).map(|k| 0.4 * k as f64).collect();
    for p in [vg(1.0, 1.0), VgParams::new(2.0, 0.3, -1.1).unwrap()] {
        assert_eq!(check_initial_condition(&p, &xis), 0.0);
        // Continuity from the right.
        let near = xis.iter().map(|&x| (vg_char(&p, 1e-12, x) - 1.0).norm()).fold(0.0, f64::max);
        assert!(near < 1e-9);
    }
}

#[test]
fn reports_serialize_with_snake_case_ids() {
    let r = check_space_ode(&vg(1.0, 1.0), &Grid2D::new(vec![1.0], vec![1.0]).unwrap()).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"equation_id\":\"space_ode\""), "{json}");
    for id in ["time_nonlocal", "drifted_nonlocal", "space_ode", "phillips", "beghin_shift"] {
        let parsed: EquationId = id.parse().unwrap();
        assert_eq!(parsed.name(), id);
    }
    assert!("heat".parse::<EquationId>().is_err());
}
