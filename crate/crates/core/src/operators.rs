//! Non-local operators of the Gamma subordinator applied to user functions.
//!
//! * `𝒟⁺u(x) = ∫₀^∞ u'(x - s) Π̄(s) ds` and `𝒟⁻u(x) = -∫₀^∞ u'(x + s) Π̄(s) ds`,
//!   the generalized Weyl derivatives with kernel `Π̄(s) = a E₁(bs)`;
//! * `-Φ(-Δ)u(x) = a ∫₀^∞ (G_y u(x) - u(x)) e^{-by}/y dy`, the Phillips
//!   operator built on the heat semigroup `G_y` with kernel
//!   `e^{-x²/4y}/√(4πy)`.
//!
//! Their Fourier symbols are `a ln(1 ∓ iξ/b)` and `-a ln(1 + ξ²/b)`. With
//! Weyl rate `√b` and Phillips rate `b`, `𝒟⁺ + 𝒟⁻ = Φ(-Δ)`.
//!
//! Operators never cache anything between calls; `Func1D` implementations
//! must tolerate concurrent evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::GammaParams;
pub use crate::quadrature::QuadConfig;
use crate::quadrature::{hermite_pair, integrate};
use crate::special_fn::exp_integral_e1;

/// Envelope `|u(x)|, |u'(x)| <= scale · e^{-rate |x|}`. A zero rate declares
/// a bounded function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub scale: f64,
    pub rate: f64,
}

impl DecayBound {
    pub fn bounded(scale: f64) -> Self {
        Self { scale, rate: 0.0 }
    }

    pub fn exponential(scale: f64, rate: f64) -> Self {
        Self { scale, rate }
    }

    fn at(&self, x: f64) -> f64 {
        self.scale * (-self.rate * x.abs()).exp()
    }
}

/// Central-difference step used by derivative fallbacks.
pub fn fd_step(x: f64) -> f64 {
    1e-5f64.max(1e-5 * x.abs())
}

/// A real function on ℝ that the operators can act on.
pub trait Func1D: Sync {
    fn value(&self, x: f64) -> f64;

    /// First derivative; central differences unless overridden.
    fn derivative(&self, x: f64) -> f64 {
        let h = fd_step(x);
        (self.value(x + h) - self.value(x - h)) / (2.0 * h)
    }

    /// Second derivative; central differences of [`Func1D::derivative`]
    /// unless overridden.
    fn second_derivative(&self, x: f64) -> f64 {
        let h = fd_step(x);
        (self.derivative(x + h) - self.derivative(x - h)) / (2.0 * h)
    }

    fn decay(&self) -> DecayBound;

    /// Points where `u` or its derivatives are not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A function with an analytic derivative.
pub struct AnalyticFn<F, D> {
    value: F,
    derivative: D,
    decay: DecayBound,
    breaks: Vec<f64>,
}

impl<F, D> AnalyticFn<F, D>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    pub fn new(value: F, derivative: D, decay: DecayBound) -> Self {
        Self {
            value,
            derivative,
            decay,
            breaks: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl<F, D> Func1D for AnalyticFn<F, D>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }
    fn decay(&self) -> DecayBound {
        self.decay
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// A function whose derivative falls back to finite differences.
pub struct FdFn<F> {
    value: F,
    decay: DecayBound,
    breaks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FdFn<F> {
    pub fn new(value: F, decay: DecayBound) -> Self {
        Self {
            value,
            decay,
            breaks: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl<F: Fn(f64) -> f64 + Sync> Func1D for FdFn<F> {
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn decay(&self) -> DecayBound {
        self.decay
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// Reject functions that break their declared envelope far from `x`.
fn probe_tail<U: Func1D + ?Sized>(u: &U, x: f64, reach: f64) -> Result<()> {
    let bound = u.decay();
    if !(bound.scale > 0.0 && bound.scale.is_finite()) || !(bound.rate >= 0.0) {
        return Err(Error::Integrability(format!(
            "decay bound must have finite scale > 0 and rate >= 0, got {bound:?}"
        )));
    }
    for k in 1..=4 {
        let d = reach * k as f64 / 4.0;
        for y in [x - d, x + d] {
            let v = u.value(y).abs();
            let limit = bound.at(y) * (1.0 + 1e-9) + 1e-300;
            if !v.is_finite() || v > limit {
                return Err(Error::Integrability(format!(
                    "|u({y})| = {v:e} exceeds the declared envelope {limit:e}"
                )));
            }
        }
    }
    Ok(())
}

/// `∫₀^∞ f(s) Π̄(s) ds` for `f` bounded by `sup_f`, with `Π̄(s) = a E₁(bs)`.
///
/// `(0, 1/b]` is integrated in `v = ln s`, which turns the logarithmic
/// singularity of `E₁` at the origin into an exponentially decaying weight;
/// `[1/b, S]` directly, with `S` chosen so the discarded tail is below
/// `q.tail_budget()`.
fn integrate_against_tail<F: Fn(f64) -> f64>(
    p: &GammaParams,
    f: F,
    sup_f: f64,
    s_breaks: &[f64],
    q: &QuadConfig,
) -> Result<f64> {
    let (a, b) = (p.a(), p.b());
    let budget = q.tail_budget();
    let kernel = |s: f64| a * exp_integral_e1(b * s).unwrap_or(0.0);

    // ∫₀^{s_lo} Π̄ ≈ a s_lo (1 - γ - ln(b s_lo)) kept below the budget.
    let mut s_lo = budget / (sup_f * a).max(1e-300);
    for _ in 0..3 {
        s_lo = budget / ((sup_f * a).max(1e-300) * (2.0 + (b * s_lo).ln().abs()));
    }
    let s_mid = 1.0 / b;
    s_lo = s_lo.min(1e-3 * s_mid);
    let v_breaks: Vec<f64> = s_breaks
        .iter()
        .filter(|s| **s > s_lo && **s < s_mid)
        .map(|s| s.ln())
        .collect();
    let near = integrate(
        |v| {
            let s = v.exp();
            f(s) * kernel(s) * s
        },
        s_lo.ln(),
        s_mid.ln(),
        &v_breaks,
        0.5 * q.abs_tol,
        q.rel_tol,
        q.max_subdivisions,
    )?;

    // ∫_S^∞ Π̄ < a e^{-bS} / (b² S) kept below the budget.
    let mut s_hi = 2.0 * s_mid;
    for _ in 0..5 {
        let ratio = (sup_f * a / (b * b * s_hi * budget)).max(1.0);
        s_hi = (ratio.ln() / b).max(2.0 * s_mid);
    }
    let far = integrate(
        |s| f(s) * kernel(s),
        s_mid,
        s_hi,
        s_breaks,
        0.5 * q.abs_tol,
        q.rel_tol,
        q.max_subdivisions,
    )?;
    Ok(near.value + far.value)
}

/// Generalized Weyl derivative `𝒟⁺u(x) = ∫₀^∞ u'(x - s) Π̄(s) ds`.
pub fn weyl_plus<U: Func1D + ?Sized>(p: &GammaParams, u: &U, x: f64, q: &QuadConfig) -> Result<f64> {
    q.validate()?;
    probe_tail(u, x, 60.0 / p.b())?;
    let breaks: Vec<f64> = u.breakpoints().into_iter().map(|c| x - c).collect();
    integrate_against_tail(p, |s| u.derivative(x - s), u.decay().scale, &breaks, q)
}

/// Generalized Weyl derivative `𝒟⁻u(x) = -∫₀^∞ u'(x + s) Π̄(s) ds`.
pub fn weyl_minus<U: Func1D + ?Sized>(p: &GammaParams, u: &U, x: f64, q: &QuadConfig) -> Result<f64> {
    q.validate()?;
    probe_tail(u, x, 60.0 / p.b())?;
    let breaks: Vec<f64> = u.breakpoints().into_iter().map(|c| c - x).collect();
    Ok(-integrate_against_tail(p, |s| u.derivative(x + s), u.decay().scale, &breaks, q)?)
}

/// Below this clock time the Phillips integrand is replaced by its
/// small-time expansion `(G_y u - u)/y ≈ u''(x)`.
const PHILLIPS_GUARD: f64 = 1e-6;

/// `G_y u(x) - u(x)`: Gauss–Hermite (40 vs 80 nodes) after `z = x - 2√y w`,
/// falling back to adaptive integration in `w` when the two rules disagree.
fn heat_increment<U: Func1D + ?Sized>(u: &U, x: f64, y: f64, breaks: &[f64], q: &QuadConfig) -> Result<f64> {
    let ux = u.value(x);
    let sigma = 2.0 * y.sqrt();
    let rule = |nodes: &[f64], weights: &[f64]| -> f64 {
        nodes
            .iter()
            .zip(weights)
            .map(|(w, wt)| wt * (u.value(x - sigma * w) - ux))
            .sum::<f64>()
            / PI.sqrt()
    };
    let ((n40, w40), (n80, w80)) = hermite_pair();
    let coarse = rule(n40, w40);
    let fine = rule(n80, w80);
    let tol = (1e-3 * q.abs_tol).max(1e-2 * q.rel_tol * fine.abs());
    if (coarse - fine).abs() <= tol {
        return Ok(fine);
    }
    let w_breaks: Vec<f64> = breaks.iter().map(|c| (x - c) / sigma).collect();
    let est = integrate(
        |w| (-w * w).exp() * (u.value(x - sigma * w) - ux) / PI.sqrt(),
        -9.0,
        9.0,
        &w_breaks,
        1e-3 * q.abs_tol,
        1e-2 * q.rel_tol,
        q.max_subdivisions,
    )?;
    Ok(est.value)
}

/// Phillips operator `-Φ(-Δ)u(x) = a ∫₀^∞ (G_y u(x) - u(x)) e^{-by}/y dy`
/// for `Φ(λ) = a ln(1 + λ/b)`.
pub fn phillips_apply<U: Func1D + ?Sized>(p: &GammaParams, u: &U, x: f64, q: &QuadConfig) -> Result<f64> {
    q.validate()?;
    let (a, b) = (p.a(), p.b());
    let bound = u.decay();
    probe_tail(u, x, 60.0 / b.sqrt())?;
    let breaks = u.breakpoints();

    let mut guard = PHILLIPS_GUARD.min(0.1 / b);
    if let Some(d) = breaks.iter().map(|c| (x - c).abs()).reduce(f64::min) {
        guard = guard.min(0.005 * d * d);
    }
    let small = a * u.second_derivative(x) * (-(-b * guard).exp_m1()) / b;

    // Tail: |G_y u - u| <= 2 sup|u|, and ∫_Y^∞ e^{-by}/y dy = E₁(bY) < e^{-bY}/(bY).
    let budget = q.tail_budget();
    let mut y_hi = 1.0 / b;
    for _ in 0..5 {
        let ratio = (2.0 * bound.scale * a / (b * y_hi * budget)).max(1.0);
        y_hi = (ratio.ln() / b).max(1.0 / b);
    }
    let body = integrate(
        |v| {
            let y = v.exp();
            match heat_increment(u, x, y, &breaks, q) {
                Ok(d) => a * d * (-b * y).exp(),
                Err(_) => f64::NAN,
            }
        },
        guard.ln(),
        y_hi.ln(),
        &[-b.ln()],
        q.abs_tol,
        q.rel_tol,
        q.max_subdivisions,
    )?;
    Ok(small + body.value)
}

/// Fourier symbol of `𝒟⁺`: `a ln(1 - iξ/b)`.
pub fn weyl_plus_symbol(p: &GammaParams, xi: f64) -> Complex64 {
    let y = xi / p.b();
    Complex64::new(0.5 * p.a() * (y * y).ln_1p(), -p.a() * y.atan())
}

/// Fourier symbol of `𝒟⁻`: `a ln(1 + iξ/b)`.
pub fn weyl_minus_symbol(p: &GammaParams, xi: f64) -> Complex64 {
    weyl_plus_symbol(p, xi).conj()
}

/// Fourier symbol of `-Φ(-Δ)`: `-a ln(1 + ξ²/b)`.
pub fn phillips_symbol(p: &GammaParams, xi: f64) -> f64 {
    -p.laplace_exponent(xi * xi)
}
