//! The Gamma and VG marginal densities: Bessel closed form against the
//! subordination integral, the Laplace special case and the behaviour at the
//! origin.
//!
//! ```text
//! cargo run --example densities
//! ```

use vgamma::model::{gamma_density, vg_density, vg_density_quadrature, GammaParams, VgParams};
use vgamma::QuadConfig;

fn main() -> vgamma::Result<()> {
    let clock = GammaParams::new(1.5, 2.0)?;
    println!("Gamma clock (a=1.5, b=2) at t=1:");
    for x in [0.1, 0.5, 1.0, 3.0] {
        println!("  h(1, {x}) = {:.12}", gamma_density(&clock, 1.0, x)?.value()?);
    }

    let q = QuadConfig::precise();
    let p = VgParams::driftless(1.3, 2.0)?;
    println!("\nVG (a=1.3, b=2): closed form vs quadrature");
    println!("{:>5} {:>6} {:>22} {:>22} {:>10}", "t", "x", "closed", "quadrature", "rel diff");
    for t in [0.5, 1.0, 3.0] {
        for x in [-2.0, 0.25, 1.0, 4.0] {
            let closed = vg_density(&p, t, x)?.value()?;
            let quad = vg_density_quadrature(&p, t, x, &q)?;
            println!(
                "{t:>5} {x:>6} {closed:>22.15e} {quad:>22.15e} {:>10.2e}",
                (closed - quad).abs() / closed
            );
        }
    }

    let laplace = VgParams::driftless(1.0, 1.0)?;
    println!("\nat a=b=t=1 the density is e^(-|x|)/2:");
    for x in [0.1, 1.0, 5.0] {
        let p = vg_density(&laplace, 1.0, x)?.value()?;
        println!("  x={x}: {p:.17e} vs {:.17e}", 0.5 * (-x).exp());
    }

    println!("\nat the origin:");
    for t in [0.3, 0.5, 0.8, 2.0] {
        match vg_density(&laplace, t, 0.0) {
            Ok(d) => println!("  t={t}: {d:?}"),
            Err(e) => println!("  t={t}: {e}"),
        }
    }

    let drifted = VgParams::new(1.0, 1.0, 0.5)?;
    println!("\nwith drift θ=0.5 (quadrature only):");
    for x in [-1.0, 1.0] {
        println!("  p(1, {x}) = {:.12}", vg_density_quadrature(&drifted, 1.0, x, &q)?);
    }
    Ok(())
}
