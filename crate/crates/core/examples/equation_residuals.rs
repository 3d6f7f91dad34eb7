//! Residual reports for the evolution and space equations of the VG density.
//!
//! ```text
//! cargo run --release --example equation_residuals
//! ```

use vgamma::model::VgParams;
use vgamma::residuals::{
    bessel_ode_residual, check_beghin_shift, check_drifted_nonlocal, check_phillips_eq,
    check_space_ode, check_time_nonlocal, fourier_sides, EquationId, Grid2D, ResidualReport,
};
use vgamma::QuadConfig;

fn summary(r: &ResidualReport) {
    let tol = r.equation_id.tolerance();
    println!(
        "{:<18} points {:>3}  max_abs {:.2e}  max_rel {:.2e}  tol {:.0e}  {}",
        r.equation_id.name(),
        r.points.len(),
        r.max_abs,
        r.max_rel,
        tol,
        if r.passes(tol) { "ok" } else { "FAIL" }
    );
}

fn main() -> vgamma::Result<()> {
    let q = QuadConfig::default();
    let laplace = VgParams::driftless(1.0, 1.0)?;
    let grid = Grid2D::new(vec![1.0, 2.0], vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])?;

    let time = check_time_nonlocal(&laplace, &grid, &q)?;
    summary(&time);
    let phillips = check_phillips_eq(&laplace, &grid, &q)?;
    summary(&phillips);

    let drifted = VgParams::new(1.0, 1.0, 0.5)?;
    let g = Grid2D::new(vec![1.5], vec![-1.0, -0.5, 0.5, 1.0])?;
    summary(&check_drifted_nonlocal(&drifted, &g, &q)?);

    let p = VgParams::driftless(1.3, 2.0)?;
    let g = Grid2D::new(vec![0.5, 1.1, 3.0], vec![-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0])?;
    summary(&check_space_ode(&p, &g)?);
    summary(&check_beghin_shift(&laplace, 2.0, &[0.5, 1.0, 2.0])?);

    println!("\ntime_nonlocal at t=2:");
    println!("{:>6} {:>22} {:>22}", "x", "d/dt p", "-(D+ + D-) p");
    for pt in time.points.iter().filter(|p| p.t == 2.0) {
        println!("{:>6} {:>22.15e} {:>22.15e}", pt.x, pt.lhs, pt.rhs);
    }

    let gap = time
        .points
        .iter()
        .zip(&phillips.points)
        .map(|(w, p)| (w.rhs - p.rhs).abs())
        .fold(0.0, f64::max);
    println!("\nWeyl pair vs Phillips operator, largest RHS gap: {gap:.2e}");

    println!("Bessel ODE residual at (0.8, 1.5): {:.2e}", bessel_ode_residual(0.8, 1.5)?);
    let fs = fourier_sides(EquationId::DriftedNonlocal, &drifted, 1.5, 2.0)?;
    println!("drifted equation in Fourier space at ξ=2: |lhs - rhs| = {:.2e}", fs.residual());

    match check_beghin_shift(&laplace, 0.9, &[1.0]) {
        Ok(_) => println!("unexpected"),
        Err(e) => println!("\nbeghin_shift at a·t=0.9: {e}"),
    }
    Ok(())
}
