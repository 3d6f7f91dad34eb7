//! Exact and approximate samplers for the Gamma subordinator and the VG
//! process.
//!
//! Every sampler is a deterministic function of its parameters and an
//! [`RngHandle`]: the handle names a ChaCha8 stream, and each call starts that
//! stream afresh.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{factor_params, GammaParams, VgParams};
use crate::special_fn::{exp_integral_e1, ln_exp_integral_e1};

/// Address of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngHandle {
    pub seed: u64,
    pub stream: u64,
}

impl RngHandle {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different stream.
    pub fn substream(&self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    TimeChange,
    GammaDifference,
    CompoundPoisson,
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::TimeChange => "time_change",
            Construction::GammaDifference => "gamma_difference",
            Construction::CompoundPoisson => "compound_poisson",
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time_change" => Ok(Construction::TimeChange),
            "gamma_difference" => Ok(Construction::GammaDifference),
            "compound_poisson" => Ok(Construction::CompoundPoisson),
            other => Err(Error::InvalidParameter(format!("unknown construction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerOutput {
    pub values: Vec<f64>,
    pub t: f64,
    pub construction: Construction,
    /// Jump truncation level; `Some` only for the compound Poisson sampler.
    pub gamma_trunc: Option<f64>,
    pub seed: u64,
    pub stream: u64,
    pub params: VgParams,
    /// Time of the VG marginal the values follow (or approximate). The
    /// compound Poisson sum run to time `t` approximates `X_{t/2}`.
    pub law_time: f64,
}

fn require_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be finite and > 0, got {t}")))
    }
}

fn gamma_law(shape: f64, rate: f64) -> Result<Gamma<f64>> {
    if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma shape and rate must be finite and > 0 (shape={shape}, rate={rate})"
        )));
    }
    Gamma::new(shape, 1.0 / rate).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// `n` i.i.d. Gamma(shape, rate) variates.
pub fn sample_gamma(shape: f64, rate: f64, n: usize, rng: RngHandle) -> Result<Vec<f64>> {
    let law = gamma_law(shape, rate)?;
    Ok(law.sample_iter(rng.rng()).take(n).collect())
}

/// `X_t = θH + √(2H) Z` with `H ~ Gamma(at, b)` and `Z` standard normal.
pub fn sample_vg_timechange(p: &VgParams, t: f64, n: usize, rng: RngHandle) -> Result<SamplerOutput> {
    require_time(t)?;
    let clock = gamma_law(p.a() * t, p.b())?;
    let mut r = rng.rng();
    let values = (0..n)
        .map(|_| {
            let h: f64 = clock.sample(&mut r);
            let z: f64 = StandardNormal.sample(&mut r);
            p.theta() * h + (2.0 * h).sqrt() * z
        })
        .collect();
    Ok(output(values, p, t, Construction::TimeChange, None, rng))
}

/// `X_t = G - L` with independent `G ~ Gamma(at, r₋)`, `L ~ Gamma(at, r₊)`.
pub fn sample_vg_difference(p: &VgParams, t: f64, n: usize, rng: RngHandle) -> Result<SamplerOutput> {
    require_time(t)?;
    let split = factor_params(p);
    let gain = gamma_law(p.a() * t, split.gain.b())?;
    let loss = gamma_law(p.a() * t, split.loss.b())?;
    let mut r = rng.rng();
    let values = (0..n)
        .map(|_| {
            let g: f64 = gain.sample(&mut r);
            let l: f64 = loss.sample(&mut r);
            g - l
        })
        .collect();
    Ok(output(values, p, t, Construction::GammaDifference, None, rng))
}

/// Solves `E₁(c·y) = u·E₁(c·γ)` for `y ≥ γ`, where `c` is the rate of `jumps`
/// and `u ∈ (0, 1]`.
pub fn invert_jump_survival(jumps: &GammaParams, gamma_trunc: f64, u: f64) -> Result<f64> {
    if !(gamma_trunc > 0.0 && gamma_trunc.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma_trunc must be > 0, got {gamma_trunc}")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidParameter(format!("u must lie in (0, 1], got {u}")));
    }
    let c = jumps.b();
    let target = u.ln() + ln_exp_integral_e1(c * gamma_trunc)?;
    // f is strictly decreasing with f(γ) = -ln u ≥ 0.
    let f = |y: f64| -> Result<f64> { Ok(ln_exp_integral_e1(c * y)? - target) };
    if u == 1.0 {
        return Ok(gamma_trunc);
    }
    let mut lo = gamma_trunc;
    let mut hi = gamma_trunc + 1.0 / c;
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fy = f(y)?;
        if fy > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        // d/dy ln E₁(cy) = -e^{-cy} / (y E₁(cy)).
        let slope = -(-c * y - ln_exp_integral_e1(c * y)?).exp() / y;
        let newton = y - fy / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - y).abs() <= 4.0 * f64::EPSILON * y || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        y = next;
    }
    Err(Error::Convergence {
        context: "jump size inversion",
        estimate: y,
        error: hi - lo,
    })
}

/// `n` i.i.d. jump sizes with density `e^{-cy} / (y E₁(cγ))` on `y ≥ γ`.
pub fn sample_jump_y(jumps: &GammaParams, gamma_trunc: f64, n: usize, rng: RngHandle) -> Result<Vec<f64>> {
    let mut r = rng.rng();
    (0..n)
        .map(|_| invert_jump_survival(jumps, gamma_trunc, 1.0 - r.random::<f64>()))
        .collect()
}

/// Intensity `t·a·E₁(√b γ)` of the truncated jump count.
pub fn compound_poisson_rate(p: &VgParams, t: f64, gamma_trunc: f64) -> Result<f64> {
    Ok(t * p.a() * exp_integral_e1(p.b().sqrt() * gamma_trunc)?)
}

/// `Σ_{j=1}^{K} ε_j Y_j` with `K ~ Poisson(t·a·E₁(√b γ))`, Rademacher `ε_j` and
/// jumps from [`sample_jump_y`] at rate `√b`. Approximates `X_{t/2}` as
/// `γ → 0`.
pub fn sample_compound_poisson(
    p: &VgParams,
    t: f64,
    gamma_trunc: f64,
    n: usize,
    rng: RngHandle,
) -> Result<SamplerOutput> {
    require_time(t)?;
    if p.theta() != 0.0 {
        return Err(Error::Precondition(
            "the compound Poisson construction is symmetric; theta must be 0".into(),
        ));
    }
    if !(gamma_trunc > 0.0 && gamma_trunc.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma_trunc must be > 0, got {gamma_trunc}")));
    }
    let jumps = GammaParams::new(p.a(), p.b().sqrt())?;
    let rate = compound_poisson_rate(p, t, gamma_trunc)?;
    let count = if rate > 0.0 {
        Some(Poisson::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let mut r = rng.rng();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let k = count.as_ref().map_or(0.0, |law| law.sample(&mut r)) as u64;
        let mut sum = 0.0;
        for _ in 0..k {
            let y = invert_jump_survival(&jumps, gamma_trunc, 1.0 - r.random::<f64>())?;
            sum += if r.random::<bool>() { y } else { -y };
        }
        values.push(sum);
    }
    let mut out = output(values, p, t, Construction::CompoundPoisson, Some(gamma_trunc), rng);
    out.law_time = 0.5 * t;
    Ok(out)
}

/// Dispatches on `construction`; `gamma_trunc` is required for the compound
/// Poisson sampler and ignored otherwise.
pub fn sample(
    construction: Construction,
    p: &VgParams,
    t: f64,
    gamma_trunc: Option<f64>,
    n: usize,
    rng: RngHandle,
) -> Result<SamplerOutput> {
    match construction {
        Construction::TimeChange => sample_vg_timechange(p, t, n, rng),
        Construction::GammaDifference => sample_vg_difference(p, t, n, rng),
        Construction::CompoundPoisson => {
            let g = gamma_trunc.ok_or_else(|| {
                Error::InvalidParameter("compound_poisson needs a truncation level".into())
            })?;
            sample_compound_poisson(p, t, g, n, rng)
        }
    }
}

fn output(
    values: Vec<f64>,
    p: &VgParams,
    t: f64,
    construction: Construction,
    gamma_trunc: Option<f64>,
    rng: RngHandle,
) -> SamplerOutput {
    SamplerOutput {
        values,
        t,
        construction,
        gamma_trunc,
        seed: rng.seed,
        stream: rng.stream,
        params: *p,
        law_time: t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let h = RngHandle::new(7, 0);
        let a = sample_gamma(1.5, 2.0, 50, h).unwrap();
        assert_eq!(a, sample_gamma(1.5, 2.0, 50, h).unwrap());
        assert_ne!(a, sample_gamma(1.5, 2.0, 50, h.substream(1)).unwrap());
    }

    #[test]
    fn inversion_endpoints() {
        let jumps = GammaParams::new(1.0, 1.0).unwrap();
        assert_eq!(invert_jump_survival(&jumps, 0.1, 1.0).unwrap(), 0.1);
        for u in [0.9, 0.5, 1e-3, 1e-12, f64::EPSILON] {
            let y = invert_jump_survival(&jumps, 0.1, u).unwrap();
            let s = exp_integral_e1(y).unwrap() / exp_integral_e1(0.1).unwrap();
            assert!((s - u).abs() <= 1e-12 * u, "u={u} y={y} s={s}");
        }
        assert!(invert_jump_survival(&jumps, 0.1, 0.0).is_err());
        assert!(invert_jump_survival(&jumps, 0.0, 0.5).is_err());
    }

    #[test]
    fn huge_truncation_gives_empty_sums() {
        let p = VgParams::driftless(1.0, 1.0).unwrap();
        let out = sample_compound_poisson(&p, 1.0, 800.0, 100, RngHandle::new(1, 0)).unwrap();
        assert!(out.values.iter().all(|v| *v == 0.0));
        assert_eq!(out.law_time, 0.5);
        assert_eq!(out.gamma_trunc, Some(800.0));
    }

    #[test]
    fn bad_inputs() {
        let p = VgParams::new(1.0, 1.0, 0.3).unwrap();
        let h = RngHandle::new(1, 0);
        assert!(sample_gamma(0.0, 1.0, 3, h).is_err());
        assert!(sample_vg_timechange(&p, 0.0, 3, h).is_err());
        assert!(matches!(
            sample_compound_poisson(&p, 1.0, 0.1, 3, h),
            Err(Error::Precondition(_))
        ));
        assert!(sample(Construction::CompoundPoisson, &p, 1.0, None, 3, h).is_err());
    }

    #[test]
    fn empty_request() {
        let p = VgParams::driftless(1.0, 1.0).unwrap();
        let out = sample_vg_difference(&p, 1.0, 0, RngHandle::new(1, 0)).unwrap();
        assert!(out.values.is_empty());
        assert_eq!(out.gamma_trunc, None);
    }
}
