//! KS distance of the truncated compound Poisson approximation to the VG law
//! as the truncation level shrinks.
//!
//! ```text
//! cargo run --release --example convergence_study
//! ```

use vgamma::diagnostics::run_convergence_study;
use vgamma::model::VgParams;
use vgamma::sampling::RngHandle;

fn main() -> vgamma::Result<()> {
    let p = VgParams::driftless(1.0, 1.0)?;
    let ladder = [0.5, 0.1, 0.02, 0.004];
    let study = run_convergence_study(&p, 2.0, &ladder, 100_000, RngHandle::new(42, 0))?;

    println!("a=1, b=1, sums to t={} compared with the law at t={}", study.t, 0.5 * study.t);
    println!("{:>8} {:>10} {:>10} {:>10} {:>6}", "gamma", "rate", "KS", "threshold", "pass");
    for ((g, rate), ks) in study.gamma_ladder.iter().zip(&study.rates).zip(&study.ks) {
        println!("{g:>8} {rate:>10.4} {:>10.5} {:>10.5} {:>6}", ks.statistic, ks.threshold, ks.pass);
    }
    println!(
        "non-increasing within {:.5}: {}",
        study.noise_band(),
        study.is_non_increasing_within(study.noise_band())
    );
    Ok(())
}
