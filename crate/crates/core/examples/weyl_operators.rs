//! Applying the generalized Weyl derivatives and the Phillips operator to a
//! user function, and checking both against their symbols.
//!
//! ```text
//! cargo run --example weyl_operators
//! ```

use vgamma::model::GammaParams;
use vgamma::operators::{
    phillips_apply, phillips_symbol, weyl_minus, weyl_plus, AnalyticFn, DecayBound, FdFn,
};
use vgamma::QuadConfig;

fn main() -> vgamma::Result<()> {
    let q = QuadConfig::default();
    let (a, b) = (0.7, 1.8_f64);
    let weyl_rate = GammaParams::new(a, b.sqrt())?;
    let clock = GammaParams::new(a, b)?;

    // A Gaussian bump with its exact derivative.
    let bump = AnalyticFn::new(
        |x: f64| (-x * x).exp(),
        |x: f64| -2.0 * x * (-x * x).exp(),
        DecayBound::bounded(1.0),
    );
    println!("u(x) = exp(-x²), a={a}, b={b}");
    println!("{:>6} {:>20} {:>20} {:>20} {:>10}", "x", "D+ u", "D- u", "Phillips u", "sum");
    for x in [-1.5, -0.3, 0.0, 0.8, 2.0] {
        let plus = weyl_plus(&weyl_rate, &bump, x, &q)?;
        let minus = weyl_minus(&weyl_rate, &bump, x, &q)?;
        let ph = phillips_apply(&clock, &bump, x, &q)?;
        println!("{x:>6} {plus:>20.12e} {minus:>20.12e} {ph:>20.12e} {:>10.1e}", plus + minus + ph);
    }

    // Without a derivative the operators fall back to central differences.
    let xi = 1.7_f64;
    let wave = FdFn::new(move |x: f64| (xi * x).cos(), DecayBound::bounded(xi.max(1.0)));
    println!("\nu(x) = cos({xi} x), Phillips u / u against the symbol:");
    for x in [0.1, 0.4] {
        let ratio = phillips_apply(&clock, &wave, x, &q)? / (xi * x).cos();
        println!("  x={x}: {ratio:.10} vs {:.10}", phillips_symbol(&clock, xi));
    }

    // A function that breaks its declared envelope is rejected.
    let liar = AnalyticFn::new(|x: f64| x.exp(), |x: f64| x.exp(), DecayBound::bounded(1.0));
    if let Err(e) = weyl_plus(&weyl_rate, &liar, 0.0, &q) {
        println!("\ne^x with a bounded envelope: {e}");
    }
    Ok(())
}
