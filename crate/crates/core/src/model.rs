//! Parameter records, exact densities, characteristic functions and the
//! Lévy tail of the Gamma subordinator and the Variance Gamma process.
//!
//! Conventions: the Gamma subordinator `H` with parameters `(a, b)` has
//! Laplace exponent `Φ(λ) = a ln(1 + λ/b)`, so `H_t ~ Gamma(shape = at,
//! rate = b)`. The Brownian motion is normalized with density
//! `g(t, x) = exp(-x²/4t) / √(4πt)` (variance `2t`), and the VG process is
//! `X_t = B_{H_t}`, with characteristic function `(1 - iξθ/b + ξ²/b)^{-at}`.
//! All densities are evaluated in log space and exponentiated last.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::special_fn::{exp_integral_e1, ln_bessel_k, ln_gamma};

/// Parameters `(a, b)` of a Gamma subordinator: Lévy measure
/// `a e^{-by}/y dy`, marginal `Gamma(at, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaParams {
    a: f64,
    b: f64,
}

impl GammaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma subordinator needs finite a > 0 and b > 0, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Rate parameter.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Laplace exponent `Φ(λ) = a ln(1 + λ/b)`.
    pub fn laplace_exponent(&self, lam: f64) -> f64 {
        self.a * (lam / self.b).ln_1p()
    }
}

/// Parameters of the (possibly drifted) Variance Gamma process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VgParams {
    a: f64,
    b: f64,
    theta: f64,
}

impl VgParams {
    pub fn new(a: f64, b: f64, theta: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "variance gamma needs finite a > 0, b > 0 and finite theta, got a={a}, b={b}, theta={theta}"
            )));
        }
        Ok(Self { a, b, theta })
    }

    pub fn driftless(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, 0.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The subordinating Gamma clock `(a, b)`.
    pub fn clock(&self) -> GammaParams {
        GammaParams {
            a: self.a,
            b: self.b,
        }
    }

    fn require_driftless(&self, func: &str) -> Result<()> {
        if self.theta != 0.0 {
            return Err(Error::Precondition(format!(
                "{func} uses the closed form, which requires theta = 0 (got {})",
                self.theta
            )));
        }
        Ok(())
    }
}

/// `X = G - L`: the gain and loss subordinators of a VG process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorPair {
    pub gain: GammaParams,
    pub loss: GammaParams,
}

/// A density value that may diverge at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Finite(f64),
    Infinite,
}

impl Density {
    pub fn finite(self) -> Option<f64> {
        match self {
            Density::Finite(v) => Some(v),
            Density::Infinite => None,
        }
    }

    /// The finite value, or a [`Error::Singular`] for the infinite sentinel.
    pub fn value(self) -> Result<f64> {
        match self {
            Density::Finite(v) => Ok(v),
            Density::Infinite => Err(Error::Singular {
                func: "density",
                msg: "density is unbounded at this point".into(),
            }),
        }
    }
}

fn check_time(func: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(func, format!("requires finite t > 0, got {t}")));
    }
    Ok(())
}

/// Density `h(t, x)` of `H_t ~ Gamma(at, b)`.
///
/// Zero for `x < 0`; at `x = 0` the density is zero unless `at < 1`, where it
/// diverges and [`Density::Infinite`] is returned.
pub fn gamma_density(p: &GammaParams, t: f64, x: f64) -> Result<Density> {
    check_time("gamma_density", t)?;
    let shape = p.a * t;
    if x < 0.0 {
        return Ok(Density::Finite(0.0));
    }
    if x == 0.0 {
        return Ok(if shape < 1.0 {
            Density::Infinite
        } else {
            Density::Finite(0.0)
        });
    }
    let ln_h = shape * p.b.ln() + (shape - 1.0) * x.ln() - p.b * x - ln_gamma(shape)?;
    Ok(Density::Finite(ln_h.exp()))
}

/// `E[e^{-λ H_t}] = (b / (λ + b))^{at}`.
pub fn gamma_laplace(p: &GammaParams, t: f64, lam: f64) -> Result<f64> {
    check_time("gamma_laplace", t)?;
    if !(lam >= 0.0) {
        return Err(domain("gamma_laplace", format!("requires lambda >= 0, got {lam}")));
    }
    Ok((-t * p.laplace_exponent(lam)).exp())
}

/// Characteristic function `E[e^{iξH_t}] = (1 - iξ/b)^{-at}`.
pub fn gamma_char(p: &GammaParams, t: f64, xi: f64) -> Complex64 {
    let w = Complex64::new(1.0, -xi / p.b);
    (-(p.a * t) * w.ln()).exp()
}

/// Tail of the Lévy measure `Π̄(x) = Π((x, ∞)) = a E₁(bx)`.
pub fn levy_tail(p: &GammaParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("levy_tail", format!("requires x > 0, got {x}")));
    }
    Ok(p.a * exp_integral_e1(p.b * x)?)
}

/// Gain/loss split of a VG process: rates `√(θ²/4 + b) ∓ θ/2`, same `a`.
pub fn factor_params(p: &VgParams) -> FactorPair {
    let half = 0.5 * p.theta;
    let root = half.hypot(p.b.sqrt());
    // Evaluate the difference through the product `gain * loss = b`.
    let (gain, loss) = if half >= 0.0 {
        (p.b / (root + half), root + half)
    } else {
        (root - half, p.b / (root - half))
    };
    FactorPair {
        gain: GammaParams { a: p.a, b: gain },
        loss: GammaParams { a: p.a, b: loss },
    }
}

/// `E[e^{iξX_t}] = (1 - iξθ/b + ξ²/b)^{-at}` on the principal branch.
pub fn vg_char(p: &VgParams, t: f64, xi: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let w = Complex64::new(1.0 + xi * xi / p.b, -xi * p.theta / p.b);
    (-(p.a * t) * w.ln()).exp()
}

/// Closed-form density of the driftless VG process,
/// `p(t,x) = b^{at} / (√π Γ(at)) (|x| / 2√b)^{at-1/2} K_{at-1/2}(|x|√b)`.
///
/// At `x = 0` the value is the limit `√b Γ(at-1/2) / (2√π Γ(at))` when
/// `at > 1/2` and [`Density::Infinite`] when `at < 1/2`; `at = 1/2` is a
/// domain error.
pub fn vg_density(p: &VgParams, t: f64, x: f64) -> Result<Density> {
    check_time("vg_density", t)?;
    p.require_driftless("vg_density")?;
    if !x.is_finite() {
        return Err(domain("vg_density", format!("requires finite x, got {x}")));
    }
    let shape = p.a * t;
    let nu = shape - 0.5;
    if x == 0.0 {
        if nu > 0.0 {
            let ln_p = 0.5 * p.b.ln() + ln_gamma(nu)? - (2.0 * PI.sqrt()).ln() - ln_gamma(shape)?;
            return Ok(Density::Finite(ln_p.exp()));
        }
        if nu < 0.0 {
            return Ok(Density::Infinite);
        }
        return Err(domain(
            "vg_density",
            "at = 1/2 with x = 0: the density diverges logarithmically",
        ));
    }
    let ln_p = ln_prefactor(p, shape)? + nu * x.abs().ln() + ln_bessel_k(nu, x.abs() * p.b.sqrt())?;
    Ok(Density::Finite(ln_p.exp()))
}

// ln(b^{at} / (√π Γ(at) (2√b)^{at-1/2})).
fn ln_prefactor(p: &VgParams, shape: f64) -> Result<f64> {
    let nu = shape - 0.5;
    Ok(shape * p.b.ln() - 0.5 * PI.ln() - ln_gamma(shape)? - nu * (2.0 * p.b.sqrt()).ln())
}

/// Order of a spatial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Analytic first or second `x`-derivative of the driftless closed form,
/// from `d/dz [z^ν K_ν(z)] = -z^ν K_{ν-1}(z)`.
pub fn vg_density_dx(p: &VgParams, t: f64, x: f64, order: DerivOrder) -> Result<f64> {
    check_time("vg_density_dx", t)?;
    p.require_driftless("vg_density_dx")?;
    if x == 0.0 || !x.is_finite() {
        return Err(domain(
            "vg_density_dx",
            "derivatives are taken away from the origin (kink or singularity at x = 0)",
        ));
    }
    let shape = p.a * t;
    let nu = shape - 0.5;
    let sb = p.b.sqrt();
    let z = x.abs() * sb;
    // p = A f(z), f(z) = z^ν K_ν(z), A = prefactor · b^{-ν/2}.
    let ln_a = ln_prefactor(p, shape)? - 0.5 * nu * p.b.ln();
    let ln_z = z.ln();
    let k_lower = ln_bessel_k(nu - 1.0, z)?;
    match order {
        DerivOrder::First => {
            let f1 = -(ln_a + nu * ln_z + k_lower).exp();
            Ok(x.signum() * sb * f1)
        }
        DerivOrder::Second => {
            // f'' = z^ν K_ν - (2ν - 1) z^{ν-1} K_{ν-1}
            let k_nu = ln_bessel_k(nu, z)?;
            let first = (ln_a + nu * ln_z + k_nu).exp();
            let second = (2.0 * nu - 1.0) * (ln_a + (nu - 1.0) * ln_z + k_lower).exp();
            Ok(p.b * (first - second))
        }
    }
}

/// Log of the subordination integrand on `v = ln s`:
/// `ln[g^θ(s, x) h(t, s) s]`.
struct SubordinationIntegrand {
    ln_const: f64,
    slope: f64,
    b: f64,
    theta: f64,
    x: f64,
}

impl SubordinationIntegrand {
    fn eval(&self, v: f64) -> f64 {
        let s = v.exp();
        let drift = self.x - self.theta * s;
        self.ln_const + self.slope * v - self.b * s - drift * drift / (4.0 * s)
    }
}

/// Density of the (drifted) VG process by adaptive quadrature of the
/// subordination integral `∫₀^∞ g^θ(s, x) h(t, s) ds`,
/// `g^θ(s, x) = exp(-(x - θs)²/4s) / √(4πs)`.
///
/// The integral is taken over `v = ln s`, where the integrand is log-concave;
/// it is cut where it falls `e^{-60}` below its peak.
pub fn vg_density_quadrature(p: &VgParams, t: f64, x: f64, q: &QuadConfig) -> Result<f64> {
    check_time("vg_density_quadrature", t)?;
    q.validate()?;
    if !x.is_finite() {
        return Err(domain("vg_density_quadrature", format!("requires finite x, got {x}")));
    }
    let shape = p.a * t;
    let integrand = SubordinationIntegrand {
        ln_const: shape * p.b.ln() - ln_gamma(shape)? - 0.5 * (4.0 * PI).ln(),
        slope: shape - 0.5,
        b: p.b,
        theta: p.theta,
        x,
    };
    // Stationary point of the concave log-integrand: B s² - c s - A = 0.
    let c = shape - 0.5;
    let big_b = p.b + 0.25 * p.theta * p.theta;
    let big_a = 0.25 * x * x;
    let disc = (c * c + 4.0 * big_a * big_b).sqrt();
    let s_star = if c > 0.0 {
        (c + disc) / (2.0 * big_b)
    } else {
        2.0 * big_a / (disc - c)
    };
    if !(s_star > 0.0) {
        return Err(Error::Singular {
            func: "vg_density_quadrature",
            msg: format!("subordination integral diverges at x = {x} for at = {shape} <= 1/2"),
        });
    }
    let v_star = s_star.ln();
    let peak = integrand.eval(v_star);
    const DROP: f64 = 60.0;
    let mut step = 1.0;
    let mut v_lo = v_star - step;
    while integrand.eval(v_lo) > peak - DROP {
        step *= 2.0;
        v_lo = v_star - step;
    }
    step = 1.0;
    let mut v_hi = v_star + step;
    while integrand.eval(v_hi) > peak - DROP {
        step *= 2.0;
        v_hi = v_star + step;
    }
    let scale = peak.exp();
    let est = integrate(
        |v| (integrand.eval(v) - peak).exp(),
        v_lo,
        v_hi,
        &[v_star],
        q.abs_tol / scale.max(f64::MIN_POSITIVE),
        q.rel_tol,
        q.max_subdivisions,
    )?;
    Ok(est.value * scale)
}
