//! The VG characteristic function, its factorization into two Gamma parts and
//! the operator symbols.
//!
//! ```text
//! cargo run --example characteristic_functions
//! ```

use num_complex::Complex64;
use vgamma::model::{factor_params, gamma_char, vg_char, GammaParams, VgParams};
use vgamma::operators::{phillips_symbol, weyl_minus_symbol, weyl_plus_symbol};

fn main() -> vgamma::Result<()> {
    let p = VgParams::new(1.2, 3.0, 2.0)?;
    let split = factor_params(&p);
    println!(
        "θ=2, b=3: gain rate {:.12}, loss rate {:.12}, product {:.12}",
        split.gain.b(),
        split.loss.b(),
        split.gain.b() * split.loss.b()
    );

    let t = 0.8;
    println!("\n{:>5} {:>40} {:>12}", "xi", "vg_char", "|vg - G·L|");
    for xi in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let whole = vg_char(&p, t, xi);
        let gain = GammaParams::new(p.a(), split.gain.b())?;
        let loss = GammaParams::new(p.a(), split.loss.b())?;
        // X = G - L, so the loss part enters at -ξ.
        let parts = gamma_char(&gain, t, xi) * gamma_char(&loss, t, -xi);
        println!("{xi:>5} {:>40} {:>12.2e}", format!("{whole:.15}"), (whole - parts).norm());
    }

    let driftless = VgParams::driftless(1.0, 2.0)?;
    let rate = GammaParams::new(1.0, 2.0_f64.sqrt())?;
    println!("\nsymbols at a=1, b=2 (Weyl rate √2):");
    for xi in [0.5, 1.0, 4.0] {
        let weyl: Complex64 = weyl_plus_symbol(&rate, xi) + weyl_minus_symbol(&rate, xi);
        let phillips = phillips_symbol(&driftless.clock(), xi);
        println!("  xi={xi}: weyl sum {weyl:.15}, phillips {phillips:.15}, sum {:.1e}", weyl.re + phillips);
    }
    Ok(())
}
