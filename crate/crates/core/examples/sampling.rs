//! The three VG samplers, checked against each other and against the exact
//! law.
//!
//! ```text
//! cargo run --release --example sampling
//! ```

use vgamma::diagnostics::{empirical_char, ks_one_sample, ks_two_sample};
use vgamma::model::{vg_char, VgParams};
use vgamma::sampling::{
    sample_compound_poisson, sample_gamma, sample_vg_difference, sample_vg_timechange, RngHandle,
};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn main() -> vgamma::Result<()> {
    let n = 100_000;
    let rng = RngHandle::new(42, 0);

    let g = sample_gamma(2.5, 0.5, n, rng)?;
    println!("Gamma(2.5, 0.5) sample mean {:.4} (exact 5)", mean(&g));

    let p = VgParams::new(1.0, 3.0, 2.0)?;
    let tc = sample_vg_timechange(&p, 1.0, n, rng.substream(1))?;
    let gd = sample_vg_difference(&p, 1.0, n, rng.substream(2))?;
    let ks = ks_two_sample(&tc.values, &gd.values)?;
    println!(
        "\nθ=2, b=3: time change vs gamma difference KS {:.5} (threshold {:.5}, pass {})",
        ks.statistic, ks.threshold, ks.pass
    );
    println!("  means {:.4} / {:.4}, exact a·t·θ/b = {:.4}", mean(&tc.values), mean(&gd.values), 2.0 / 3.0);
    for xi in [0.5, 1.0, 2.0] {
        let exact = vg_char(&p, 1.0, xi);
        let err = (empirical_char(&tc.values, xi)? - exact).norm();
        println!("  ξ={xi}: |ê - φ| = {err:.4} (envelope {:.4})", 3.0 / (n as f64).sqrt());
    }

    let laplace = VgParams::driftless(1.0, 1.0)?;
    let lap = |x: f64| if x < 0.0 { 0.5 * x.exp() } else { 1.0 - 0.5 * (-x).exp() };
    let gd = sample_vg_difference(&laplace, 1.0, n, rng.substream(3))?;
    let ks = ks_one_sample(&gd.values, lap)?;
    println!("\nLaplace case, one-sample KS {:.5} (pass {})", ks.statistic, ks.pass);

    // The compound Poisson sum run to t=2 approximates the law at t=1.
    let cp = sample_compound_poisson(&laplace, 2.0, 0.004, n, rng.substream(4))?;
    let ks = ks_one_sample(&cp.values, lap)?;
    println!(
        "compound Poisson γ=0.004 to t={} against law at t={}: KS {:.5} (pass {})",
        cp.t, cp.law_time, ks.statistic, ks.pass
    );
    Ok(())
}
