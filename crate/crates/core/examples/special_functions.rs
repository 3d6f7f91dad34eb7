//! Bessel K, the exponential integral and the log-gamma function.
//!
//! ```text
//! cargo run --example special_functions
//! ```

use vgamma::special_fn::{bessel_k, exp_integral_e1, gamma, ln_bessel_k, ln_gamma, Accuracy};

fn main() -> vgamma::Result<()> {
    println!("{:>6} {:>8} {:>24}", "nu", "x", "K_nu(x)");
    for nu in [0.0, 0.5, 1.3, 7.25] {
        for x in [0.01, 1.0, 25.0] {
            println!("{nu:>6} {x:>8} {:>24.17e}", bessel_k(nu, x)?);
        }
    }

    // Half-integer orders are elementary.
    let x = 2.0_f64;
    let exact = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    println!("\nK_1/2(2) = {:.17e}  (closed form {:.17e})", bessel_k(0.5, x)?, exact);

    // Large orders overflow in linear space; the log form still works.
    println!("ln K_200(0.5) = {:.12}", ln_bessel_k(200.0, 0.5)?);
    match bessel_k(200.0, 0.5) {
        Ok(v) => println!("K_200(0.5) = {v:e}"),
        Err(e) => println!("K_200(0.5): {e}"),
    }

    println!("\nE1(1)     = {:.17e}", exp_integral_e1(1.0)?);
    println!("E1(1e-3)  = {:.17e}", exp_integral_e1(1e-3)?);
    println!("E1(50)    = {:.17e}", exp_integral_e1(50.0)?);

    println!("\nln Γ(3.7) = {:.17e}", ln_gamma(3.7)?);
    println!("Γ(0.25)   = {:.17e}", gamma(0.25)?);

    // A starved series budget is reported rather than silently truncated.
    let starved = Accuracy::new(1e-14, 3)?;
    if let Err(e) = vgamma::special_fn::bessel_k_with(0.3, 0.5, &starved) {
        println!("\nwith 3 terms: {e}");
    }
    Ok(())
}
