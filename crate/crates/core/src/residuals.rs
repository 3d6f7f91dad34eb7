//! Grid checks of the evolution and space equations satisfied by the VG
//! density. Every check records LHS, RHS and residual per grid point.
//!
//! | equation            | LHS                      | RHS                                   |
//! |---------------------|--------------------------|---------------------------------------|
//! | `TimeNonlocal`      | `∂ₜp`                    | `-(𝒟⁺ + 𝒟⁻)p`, rates `√b`             |
//! | `DriftedNonlocal`   | `∂ₜp^θ`                  | `-(𝒟⁺_{r₋} + 𝒟⁻_{r₊})p^θ`             |
//! | `SpaceOde`          | `x ∂²ₓp`                 | `(2at - 2) ∂ₓp + b x p`               |
//! | `Phillips`          | `∂ₜp`                    | `-Φ(-Δ)p`                             |
//! | `BeghinShift`       | `∂²ₓp(t, x)`             | `b (p(t, x) - p(t - 1/a, x))`         |
//!
//! The origin is excluded from every grid: the density has a kink or a
//! singularity there.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    factor_params, vg_char, vg_density, vg_density_dx, vg_density_quadrature, DerivOrder,
    GammaParams, VgParams,
};
use crate::operators::{
    phillips_apply, phillips_symbol, weyl_minus, weyl_minus_symbol, weyl_plus, weyl_plus_symbol,
    DecayBound, Func1D,
};
use crate::quadrature::QuadConfig;
use crate::special_fn::ln_bessel_k;

/// Default half-width of the excluded neighbourhood of `x = 0`.
pub const DEFAULT_PUNCTURE: f64 = 0.05;

/// Default relative central-difference step in time: `h = max(s, s·t)`.
pub const DEFAULT_TIME_STEP: f64 = 1e-4;

/// Floor in the relative-residual denominator.
pub const REL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationId {
    TimeNonlocal,
    DriftedNonlocal,
    SpaceOde,
    Phillips,
    BeghinShift,
}

impl EquationId {
    pub fn name(&self) -> &'static str {
        match self {
            EquationId::TimeNonlocal => "time_nonlocal",
            EquationId::DriftedNonlocal => "drifted_nonlocal",
            EquationId::SpaceOde => "space_ode",
            EquationId::Phillips => "phillips",
            EquationId::BeghinShift => "beghin_shift",
        }
    }

    /// Pass threshold on `max_rel` for the standard grids.
    pub fn tolerance(&self) -> f64 {
        match self {
            EquationId::TimeNonlocal | EquationId::Phillips => 1e-4,
            EquationId::DriftedNonlocal => 1e-3,
            EquationId::SpaceOde | EquationId::BeghinShift => 1e-9,
        }
    }
}

impl std::str::FromStr for EquationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time_nonlocal" => Ok(EquationId::TimeNonlocal),
            "drifted_nonlocal" => Ok(EquationId::DriftedNonlocal),
            "space_ode" => Ok(EquationId::SpaceOde),
            "phillips" => Ok(EquationId::Phillips),
            "beghin_shift" => Ok(EquationId::BeghinShift),
            other => Err(Error::InvalidParameter(format!("unknown equation '{other}'"))),
        }
    }
}

/// Evaluation grid with the origin punctured out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid2D {
    t_values: Vec<f64>,
    x_values: Vec<f64>,
    puncture: f64,
}

impl Grid2D {
    pub fn new(t_values: Vec<f64>, x_values: Vec<f64>) -> Result<Self> {
        Self::with_puncture(t_values, x_values, DEFAULT_PUNCTURE)
    }

    pub fn with_puncture(t_values: Vec<f64>, x_values: Vec<f64>, puncture: f64) -> Result<Self> {
        if t_values.is_empty() || x_values.is_empty() {
            return Err(Error::InvalidParameter("grid axes must be non-empty".into()));
        }
        if !(puncture >= 0.0) {
            return Err(Error::InvalidParameter("puncture radius must be >= 0".into()));
        }
        if t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("grid times must be finite and > 0".into()));
        }
        let ascending = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&t_values) || !ascending(&x_values) {
            return Err(Error::InvalidParameter("grid axes must be strictly ascending".into()));
        }
        if let Some(x) = x_values
            .iter()
            .find(|x| !x.is_finite() || x.abs() < puncture || **x == 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "x = {x} lies in the punctured zone (-{puncture}, {puncture})"
            )));
        }
        Ok(Self {
            t_values,
            x_values,
            puncture,
        })
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn puncture(&self) -> f64 {
        self.puncture
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Set when the point could not be evaluated; the numeric fields are NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation_id: EquationId,
    pub params: VgParams,
    pub grid: Grid2D,
    pub points: Vec<ResidualPoint>,
    pub max_abs: f64,
    pub max_rel: f64,
    pub failed_points: usize,
    pub tolerances_used: QuadConfig,
    pub time_step: Option<f64>,
}

impl ResidualReport {
    fn assemble(
        equation_id: EquationId,
        params: VgParams,
        grid: Grid2D,
        points: Vec<ResidualPoint>,
        tolerances_used: QuadConfig,
        time_step: Option<f64>,
    ) -> Self {
        let ok = points.iter().filter(|p| p.error.is_none());
        let max_abs = ok.clone().map(|p| p.abs_residual).fold(0.0, f64::max);
        let max_rel = ok.map(|p| p.rel_residual).fold(0.0, f64::max);
        let failed_points = points.iter().filter(|p| p.error.is_some()).count();
        Self {
            equation_id,
            params,
            grid,
            points,
            max_abs,
            max_rel,
            failed_points,
            tolerances_used,
            time_step,
        }
    }

    /// True when every point evaluated and `max_rel <= tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.failed_points == 0 && self.max_rel <= tol
    }

    pub fn lhs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lhs).collect()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rhs).collect()
    }
}

fn point(t: f64, x: f64, sides: Result<(f64, f64)>) -> ResidualPoint {
    point_with_scale(t, x, sides.map(|(l, r)| (l, r, l.abs().max(r.abs()))))
}

fn point_with_scale(t: f64, x: f64, sides: Result<(f64, f64, f64)>) -> ResidualPoint {
    match sides {
        Ok((lhs, rhs, scale)) => {
            let abs_residual = (lhs - rhs).abs();
            ResidualPoint {
                t,
                x,
                lhs,
                rhs,
                abs_residual,
                rel_residual: abs_residual / scale.max(REL_FLOOR),
                error: None,
            }
        }
        Err(e) => ResidualPoint {
            t,
            x,
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_residual: f64::NAN,
            rel_residual: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

fn time_step(t: f64, scale: f64) -> f64 {
    scale.max(scale * t)
}

fn central_dt<F: Fn(f64) -> Result<f64>>(f: F, t: f64, h: f64) -> Result<f64> {
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}

fn require_bounded(p: &VgParams, g: &Grid2D, h_scale: f64) -> Result<()> {
    for &t in g.t_values() {
        let t_lo = t - time_step(t, h_scale);
        if !(p.a() * t_lo > 0.5) {
            return Err(Error::Precondition(format!(
                "the time checks need a·t > 1/2 (bounded density) at every stencil time; a·t = {} at t = {t}",
                p.a() * t_lo
            )));
        }
    }
    Ok(())
}

/// Envelope scale for a density slice: twice the largest `|p|`, `|∂ₓp|` seen
/// on a log-spaced probe of both half-lines.
fn slice_envelope<F: Fn(f64) -> (f64, f64)>(f: F, length: f64) -> f64 {
    let mut sup = 0.0f64;
    for k in 0..=60 {
        let r = 1e-3 * (length / 1e-3).powf(k as f64 / 60.0);
        for x in [-r, r] {
            let (v, d) = f(x);
            if v.is_finite() {
                sup = sup.max(v.abs());
            }
            if d.is_finite() {
                sup = sup.max(d.abs());
            }
        }
    }
    2.0 * sup.max(1e-300)
}

/// `x ↦ p(t, x)` for the driftless closed form, with analytic derivatives.
pub struct DensitySlice {
    params: VgParams,
    t: f64,
    envelope: f64,
}

impl DensitySlice {
    pub fn new(params: VgParams, t: f64) -> Result<Self> {
        vg_density(&params, t, 1.0)?;
        let mut slice = Self {
            params,
            t,
            envelope: 0.0,
        };
        let length = 60.0 / params.b().sqrt();
        slice.envelope = slice_envelope(|x| (slice.value(x), slice.derivative(x)), length);
        Ok(slice)
    }
}

impl Func1D for DensitySlice {
    fn value(&self, x: f64) -> f64 {
        vg_density(&self.params, self.t, x)
            .ok()
            .and_then(|d| d.finite())
            .unwrap_or(f64::NAN)
    }
    fn derivative(&self, x: f64) -> f64 {
        vg_density_dx(&self.params, self.t, x, DerivOrder::First).unwrap_or(f64::NAN)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        vg_density_dx(&self.params, self.t, x, DerivOrder::Second).unwrap_or(f64::NAN)
    }
    fn decay(&self) -> DecayBound {
        DecayBound::bounded(self.envelope)
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// `x ↦ p^θ(t, x)` evaluated by quadrature; derivatives by central differences.
pub struct QuadratureSlice {
    params: VgParams,
    t: f64,
    quad: QuadConfig,
    envelope: f64,
}

impl QuadratureSlice {
    pub fn new(params: VgParams, t: f64, quad: QuadConfig) -> Result<Self> {
        vg_density_quadrature(&params, t, 1.0, &quad)?;
        let mut slice = Self {
            params,
            t,
            quad,
            envelope: 0.0,
        };
        let f = factor_params(&params);
        let length = 60.0 / f.gain.b().min(f.loss.b());
        slice.envelope = slice_envelope(|x| (slice.value(x), slice.derivative(x)), length);
        Ok(slice)
    }
}

impl Func1D for QuadratureSlice {
    fn value(&self, x: f64) -> f64 {
        vg_density_quadrature(&self.params, self.t, x, &self.quad).unwrap_or(f64::NAN)
    }
    fn decay(&self) -> DecayBound {
        DecayBound::bounded(self.envelope)
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

fn weyl_sum<U: Func1D>(plus: &GammaParams, minus: &GammaParams, u: &U, x: f64, q: &QuadConfig) -> Result<f64> {
    Ok(weyl_plus(plus, u, x, q)? + weyl_minus(minus, u, x, q)?)
}

/// `∂ₜp = -(𝒟⁺_{a,√b} + 𝒟⁻_{a,√b}) p` on the grid (driftless).
pub fn check_time_nonlocal(p: &VgParams, g: &Grid2D, q: &QuadConfig) -> Result<ResidualReport> {
    check_time_nonlocal_with_step(p, g, q, DEFAULT_TIME_STEP)
}

/// As [`check_time_nonlocal`] with time step `h = max(s, s·t)`.
pub fn check_time_nonlocal_with_step(
    p: &VgParams,
    g: &Grid2D,
    q: &QuadConfig,
    step_scale: f64,
) -> Result<ResidualReport> {
    if p.theta() != 0.0 {
        return Err(Error::Precondition(
            "time_nonlocal is the driftless equation; use check_drifted_nonlocal".into(),
        ));
    }
    q.validate()?;
    require_bounded(p, g, step_scale)?;
    let rate = GammaParams::new(p.a(), p.b().sqrt())?;
    let mut points = Vec::new();
    for &t in g.t_values() {
        let slice = DensitySlice::new(*p, t)?;
        let h = time_step(t, step_scale);
        for &x in g.x_values() {
            let sides = (|| {
                let lhs = central_dt(|s| vg_density(p, s, x)?.value(), t, h)?;
                let rhs = -weyl_sum(&rate, &rate, &slice, x, q)?;
                Ok((lhs, rhs))
            })();
            points.push(point(t, x, sides));
        }
    }
    Ok(ResidualReport::assemble(
        EquationId::TimeNonlocal,
        *p,
        g.clone(),
        points,
        *q,
        Some(step_scale),
    ))
}

/// `∂ₜp^θ = -(𝒟⁺_{a,r₋} + 𝒟⁻_{a,r₊}) p^θ`, `r∓ = √(θ²/4 + b) ∓ θ/2`, with
/// `p^θ` from the subordination integral and its `x`-derivative by central
/// differences.
pub fn check_drifted_nonlocal(p: &VgParams, g: &Grid2D, q: &QuadConfig) -> Result<ResidualReport> {
    q.validate()?;
    require_bounded(p, g, DEFAULT_TIME_STEP)?;
    let split = factor_params(p);
    let mut points = Vec::new();
    for &t in g.t_values() {
        let slice = QuadratureSlice::new(*p, t, *q)?;
        let h = time_step(t, DEFAULT_TIME_STEP);
        for &x in g.x_values() {
            let sides = (|| {
                let lhs = central_dt(|s| vg_density_quadrature(p, s, x, q), t, h)?;
                let rhs = -weyl_sum(&split.gain, &split.loss, &slice, x, q)?;
                Ok((lhs, rhs))
            })();
            points.push(point(t, x, sides));
        }
    }
    Ok(ResidualReport::assemble(
        EquationId::DriftedNonlocal,
        *p,
        g.clone(),
        points,
        *q,
        Some(DEFAULT_TIME_STEP),
    ))
}

/// `x ∂²ₓp - (2at - 2) ∂ₓp - b x p = 0`, all terms in closed form. The
/// relative residual is normalized by the largest of the three terms.
pub fn check_space_ode(p: &VgParams, g: &Grid2D) -> Result<ResidualReport> {
    if p.theta() != 0.0 {
        return Err(Error::Precondition("space_ode is stated for theta = 0".into()));
    }
    let mut points = Vec::new();
    for &t in g.t_values() {
        let shape = p.a() * t;
        for &x in g.x_values() {
            let sides = (|| {
                let density = vg_density(p, t, x)?.value()?;
                let d1 = vg_density_dx(p, t, x, DerivOrder::First)?;
                let d2 = vg_density_dx(p, t, x, DerivOrder::Second)?;
                let curvature = x * d2;
                let drift = (2.0 * shape - 2.0) * d1;
                let decay = p.b() * x * density;
                let scale = curvature.abs().max(drift.abs()).max(decay.abs());
                Ok((curvature, drift + decay, scale))
            })();
            points.push(point_with_scale(t, x, sides));
        }
    }
    Ok(ResidualReport::assemble(
        EquationId::SpaceOde,
        *p,
        g.clone(),
        points,
        QuadConfig::default(),
        None,
    ))
}

/// `∂ₜp = -Φ(-Δ) p` with the Phillips operator of `Φ(λ) = a ln(1 + λ/b)`.
pub fn check_phillips_eq(p: &VgParams, g: &Grid2D, q: &QuadConfig) -> Result<ResidualReport> {
    if p.theta() != 0.0 {
        return Err(Error::Precondition("phillips check is stated for theta = 0".into()));
    }
    q.validate()?;
    require_bounded(p, g, DEFAULT_TIME_STEP)?;
    let clock = p.clock();
    let mut points = Vec::new();
    for &t in g.t_values() {
        let slice = DensitySlice::new(*p, t)?;
        let h = time_step(t, DEFAULT_TIME_STEP);
        for &x in g.x_values() {
            let sides = (|| {
                let lhs = central_dt(|s| vg_density(p, s, x)?.value(), t, h)?;
                let rhs = phillips_apply(&clock, &slice, x, q)?;
                Ok((lhs, rhs))
            })();
            points.push(point(t, x, sides));
        }
    }
    Ok(ResidualReport::assemble(
        EquationId::Phillips,
        *p,
        g.clone(),
        points,
        *q,
        Some(DEFAULT_TIME_STEP),
    ))
}

/// `∂²ₓp(t, x) = b (p(t, x) - p(t - 1/a, x))`, required `at > 1`.
pub fn check_beghin_shift(p: &VgParams, t: f64, x_values: &[f64]) -> Result<ResidualReport> {
    if p.theta() != 0.0 {
        return Err(Error::Precondition("beghin_shift is stated for theta = 0".into()));
    }
    let shifted = t - 1.0 / p.a();
    if !(p.a() * t > 1.0) || !(p.a() * shifted > 0.0) {
        return Err(Error::Precondition(format!(
            "the shift equation requires a·t > 1 (got a·t = {})",
            p.a() * t
        )));
    }
    let grid = Grid2D::new(vec![t], x_values.to_vec())?;
    let points = x_values
        .iter()
        .map(|&x| {
            let sides = (|| {
                let lhs = vg_density_dx(p, t, x, DerivOrder::Second)?;
                let now = vg_density(p, t, x)?.value()?;
                let before = vg_density(p, shifted, x)?.value()?;
                Ok((lhs, p.b() * (now - before)))
            })();
            point(t, x, sides)
        })
        .collect();
    Ok(ResidualReport::assemble(
        EquationId::BeghinShift,
        *p,
        grid,
        points,
        QuadConfig::default(),
        None,
    ))
}

/// Relative residual of `z²K'' + zK' - (z² + ν²)K = 0`, with
/// `K' = -(K_{ν-1} + K_{ν+1})/2` and `K'' = (K_{ν-2} + 2K_ν + K_{ν+2})/4`.
pub fn bessel_ode_residual(nu: f64, z: f64) -> Result<f64> {
    let k = |order: f64| -> Result<f64> { Ok(ln_bessel_k(order, z)?.exp()) };
    let k0 = k(nu)?;
    let d1 = -0.5 * (k(nu - 1.0)? + k(nu + 1.0)?);
    let d2 = 0.25 * (k(nu - 2.0)? + 2.0 * k0 + k(nu + 2.0)?);
    let terms = [z * z * d2, z * d1, (z * z + nu * nu) * k0];
    let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((terms[0] + terms[1] - terms[2]).abs() / scale)
}

/// Largest `|p̂(0, ξ) - 1|` over `xis`. The point-mass start only makes sense
/// as a distribution, so it is checked on the transform side.
pub fn check_initial_condition(p: &VgParams, xis: &[f64]) -> f64 {
    xis.iter()
        .map(|&xi| (vg_char(p, 0.0, xi) - 1.0).norm())
        .fold(0.0, f64::max)
}

/// Both sides of an equation after Fourier transform in `x` at frequency `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierSides {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl FourierSides {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Transformed form of each time equation at `(t, ξ)`.
///
/// The left side is `∂ₜp̂` (computed from the exponent of the characteristic
/// function), the right side the operator symbol times `p̂`. For
/// `SpaceOde` and `BeghinShift` the transform is evaluated through the
/// characteristic function and its `ξ`-derivatives.
pub fn fourier_sides(eq: EquationId, p: &VgParams, t: f64, xi: f64) -> Result<FourierSides> {
    let phat = vg_char(p, t, xi);
    let w = Complex64::new(1.0 + xi * xi / p.b(), -xi * p.theta() / p.b());
    let dt_phat = -p.a() * w.ln() * phat;
    match eq {
        EquationId::TimeNonlocal => {
            let r = GammaParams::new(p.a(), p.b().sqrt())?;
            let sym = weyl_plus_symbol(&r, xi) + weyl_minus_symbol(&r, xi);
            Ok(FourierSides {
                lhs: dt_phat,
                rhs: -sym * phat,
            })
        }
        EquationId::DriftedNonlocal => {
            let f = factor_params(p);
            let sym = weyl_plus_symbol(&f.gain, xi) + weyl_minus_symbol(&f.loss, xi);
            Ok(FourierSides {
                lhs: dt_phat,
                rhs: -sym * phat,
            })
        }
        EquationId::Phillips => Ok(FourierSides {
            lhs: dt_phat,
            rhs: phillips_symbol(&p.clock(), xi) * phat,
        }),
        EquationId::SpaceOde => {
            // With the transform ∫e^{iξx}·dx: x ↦ -i d/dξ, ∂ₓ ↦ -iξ.
            let shape = p.a() * t;
            let base = 1.0 + xi * xi / p.b();
            let phi = base.powf(-shape);
            let dphi = -shape * base.powf(-shape - 1.0) * 2.0 * xi / p.b();
            // ∂²ₓp ↦ -ξ² φ, so x∂²ₓp ↦ -i d/dξ(-ξ² φ) = i(2ξφ + ξ² φ').
            let curvature = Complex64::new(0.0, 2.0 * xi * phi + xi * xi * dphi);
            let drift = (2.0 * shape - 2.0) * Complex64::new(0.0, -xi) * phi;
            let decay = p.b() * Complex64::new(0.0, -1.0) * dphi;
            Ok(FourierSides {
                lhs: curvature,
                rhs: drift + decay,
            })
        }
        EquationId::BeghinShift => {
            let shifted = vg_char(p, t - 1.0 / p.a(), xi);
            Ok(FourierSides {
                lhs: -xi * xi * phat,
                rhs: p.b() * (phat - shifted),
            })
        }
    }
}
