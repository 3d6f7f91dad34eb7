//! Goodness-of-fit tools: Kolmogorov–Smirnov statistics, empirical
//! characteristic functions, the numerical VG CDF and the compound Poisson
//! convergence study.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{factor_params, vg_density, vg_density_quadrature, VgParams};
use crate::quadrature::{integrate, QuadConfig};
use crate::sampling::{compound_poisson_rate, sample_compound_poisson, RngHandle};

/// Asymptotic Kolmogorov critical value at level 0.001.
pub const KS_CRITICAL_001: f64 = 1.95;

/// Standard deviation of the limiting Kolmogorov distribution,
/// `√(π²/12 - π ln²2 / 2)`.
pub fn kolmogorov_sd() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let pi = std::f64::consts::PI;
    (pi * pi / 12.0 - 0.5 * pi * ln2 * ln2).sqrt()
}

/// Standard error of a one-sample KS statistic of size `n` under the null.
pub fn ks_standard_error(n: usize) -> f64 {
    kolmogorov_sd() / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    /// Second sample size; `None` for the one-sample test.
    pub m: Option<usize>,
    pub threshold: f64,
    pub pass: bool,
}

impl KsReport {
    fn new(statistic: f64, n: usize, m: Option<usize>, threshold: f64) -> Self {
        Self {
            statistic,
            n,
            m,
            threshold,
            pass: statistic <= threshold,
        }
    }
}

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Data("sample is empty".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Data(format!("sample contains non-finite value {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Sup distance between the empirical CDF of `values` and `cdf`, taken over
/// both one-sided gaps at every sample point.
pub fn ks_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<KsReport> {
    let sorted = sorted_finite(values)?;
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if !f.is_finite() {
            return Err(Error::Data(format!("cdf is not finite at {x}")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsReport::new(d, sorted.len(), None, KS_CRITICAL_001 / n.sqrt()))
}

/// Sup distance between two empirical CDFs.
pub fn ks_two_sample(values_a: &[f64], values_b: &[f64]) -> Result<KsReport> {
    let a = sorted_finite(values_a)?;
    let b = sorted_finite(values_b)?;
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] == x {
            i += 1;
        }
        while j < m && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let threshold = KS_CRITICAL_001 * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsReport::new(d, n, Some(m), threshold))
}

/// `(1/n) Σ e^{iξxₖ}`.
pub fn empirical_char(values: &[f64], xi: f64) -> Result<Complex64> {
    if values.is_empty() {
        return Err(Error::Data("sample is empty".into()));
    }
    let sum = values
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &x| {
            let (s, c) = (xi * x).sin_cos();
            acc + Complex64::new(c, s)
        });
    Ok(sum / values.len() as f64)
}

/// Density of `X_t` on one half-line, with the machinery to integrate it.
struct HalfLines {
    params: VgParams,
    t: f64,
    inner: QuadConfig,
    outer: QuadConfig,
    /// Exponential decay rate of the right and left tails.
    rates: [f64; 2],
    /// Power `k` of the substitution `s = w^k` that removes the `|s|^{2at-1}`
    /// behaviour at the origin.
    power: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Right = 0,
    Left = 1,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }
}

impl HalfLines {
    fn new(p: &VgParams, t: f64, q: &QuadConfig) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("time must be finite and > 0, got {t}")));
        }
        q.validate()?;
        let split = factor_params(p);
        let mut outer = *q;
        outer.abs_tol = q.abs_tol * 1e-3;
        Ok(Self {
            params: *p,
            t,
            inner: QuadConfig::new(1e-13, 1e-11, 2000, 1e-12)?,
            outer,
            rates: [split.gain.b(), split.loss.b()],
            power: (0.5 / (p.a() * t)).max(2.0),
        })
    }

    fn density(&self, x: f64) -> Result<f64> {
        if self.params.theta() == 0.0 {
            vg_density(&self.params, self.t, x)?.value()
        } else {
            vg_density_quadrature(&self.params, self.t, x, &self.inner)
        }
    }

    fn near(&self, side: Side) -> f64 {
        1.0 / self.rates[side as usize]
    }

    fn quad<F: Fn(f64) -> Result<f64>>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        let failure = RefCell::new(None);
        let est = integrate(
            |s| match f(s) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
            &[],
            self.outer.abs_tol,
            self.outer.rel_tol,
            self.outer.max_subdivisions,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(est?.value),
        }
    }

    /// `∫ p(±s) ds` over `lo ≤ s ≤ hi`, `0 ≤ lo < hi`.
    fn mass(&self, side: Side, lo: f64, hi: f64) -> Result<f64> {
        let sign = side.sign();
        let near = self.near(side);
        let k = self.power;
        let mut total = 0.0;
        if lo < near {
            let top = hi.min(near);
            total += self.quad(
                |w| Ok(self.density(sign * w.powf(k))? * k * w.powf(k - 1.0)),
                lo.powf(1.0 / k),
                top.powf(1.0 / k),
            )?;
        }
        if hi > near {
            total += self.quad(|s| self.density(sign * s), lo.max(near), hi)?;
        }
        Ok(total)
    }

    /// Distance beyond which the mass on `side` is below the tail budget.
    fn reach(&self, side: Side) -> Result<f64> {
        let rate = self.rates[side as usize];
        let budget = self.outer.tail_budget();
        let growth = 2.0 * (self.params.a() * self.t - 1.0).max(0.0) / rate;
        let mut x = (10.0 / rate).max(growth);
        for _ in 0..400 {
            if x >= growth && 2.0 * self.density(side.sign() * x)? / rate <= budget {
                return Ok(x);
            }
            x *= 1.25;
        }
        Err(Error::Convergence {
            context: "vg_cdf tail reach",
            estimate: x,
            error: f64::NAN,
        })
    }
}

/// `P(X_t ≤ x)` by adaptive integration of the density; accurate to well
/// below `1e-6`. For `θ ≠ 0` the density comes from the subordination
/// integral.
pub fn vg_cdf(p: &VgParams, t: f64, x: f64, q: &QuadConfig) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("x is NaN".into()));
    }
    let h = HalfLines::new(p, t, q)?;
    let f = if x <= 0.0 {
        let reach = h.reach(Side::Left)?;
        if -x >= reach {
            0.0
        } else {
            h.mass(Side::Left, -x, reach)?
        }
    } else {
        let reach = h.reach(Side::Right)?;
        if x >= reach {
            1.0
        } else {
            1.0 - h.mass(Side::Right, x, reach)?
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Nodes per table.
pub const CDF_TABLE_NODES: usize = 4096;

/// The VG CDF tabulated once on a graded grid and interpolated by cubic
/// Hermite splines whose slopes are the exact density values.
///
/// Cells grow geometrically away from the origin, starting at `1e-9/r`, and
/// are uniform out to the tail reach. The two cells touching the origin are
/// interpolated linearly in `w = |x|^{1/k}`, the same substitution used to
/// integrate there.
#[derive(Debug, Clone)]
pub struct VgCdfTable {
    params: VgParams,
    t: f64,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
    power: f64,
}

impl VgCdfTable {
    pub fn new(p: &VgParams, t: f64, q: &QuadConfig) -> Result<Self> {
        let h = HalfLines::new(p, t, q)?;
        let reach = [h.reach(Side::Right)?, h.reach(Side::Left)?];
        let total_span = reach[0] + reach[1];
        // Geometric cells stop where they would outgrow the uniform spacing.
        let geometric = |side: Side, end: f64| {
            let mut s = 1e-9 * h.near(side);
            let mut out = vec![];
            while s < end {
                out.push(s);
                s *= 1.05;
            }
            out
        };
        let spacing = |geo: usize| total_span / (CDF_TABLE_NODES - 3 - geo) as f64;
        let rough = geometric(Side::Right, h.near(Side::Right)).len()
            + geometric(Side::Left, h.near(Side::Left)).len();
        let ends = [
            h.near(Side::Right).min(20.0 * spacing(rough)),
            h.near(Side::Left).min(20.0 * spacing(rough)),
        ];
        let geo = [geometric(Side::Right, ends[0]), geometric(Side::Left, ends[1])];
        let spans = [reach[0] - ends[0], reach[1] - ends[1]];
        let budget = CDF_TABLE_NODES - 3 - geo[0].len() - geo[1].len();
        let right_uniform = ((budget as f64) * spans[0] / (spans[0] + spans[1])).round() as usize;
        let counts = [right_uniform.max(1), (budget - right_uniform).max(1)];
        let half = |side: Side| -> Vec<f64> {
            let i = side as usize;
            let mut out = geo[i].clone();
            out.extend((0..=counts[i]).map(|j| ends[i] + spans[i] * j as f64 / counts[i] as f64));
            out
        };
        let mut nodes: Vec<f64> = half(Side::Left).into_iter().rev().map(|s| -s).collect();
        nodes.push(0.0);
        nodes.extend(half(Side::Right));

        let mut cdf = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cdf.push(acc);
        for pair in nodes.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            acc += if hi <= 0.0 {
                h.mass(Side::Left, -hi, -lo)?
            } else {
                h.mass(Side::Right, lo, hi)?
            };
            cdf.push(acc);
        }
        let density = nodes
            .iter()
            .map(|&x| if x == 0.0 { Ok(f64::NAN) } else { h.density(x) })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *p,
            t,
            nodes,
            cdf,
            density,
            power: h.power,
        })
    }

    pub fn params(&self) -> &VgParams {
        &self.params
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrated mass over the tabulated range; 1 up to quadrature error.
    pub fn total_mass(&self) -> f64 {
        self.cdf[self.cdf.len() - 1]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let last = self.nodes.len() - 1;
        if x <= self.nodes[0] {
            return 0.0;
        }
        if x >= self.nodes[last] {
            return 1.0;
        }
        let i = self.nodes.partition_point(|&n| n <= x) - 1;
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (f0, f1) = (self.cdf[i], self.cdf[i + 1]);
        let value = if x0 == 0.0 || x1 == 0.0 {
            let w = |s: f64| s.abs().powf(1.0 / self.power);
            let (w0, w1) = (w(x0), w(x1));
            f0 + (f1 - f0) * (w(x) - w0) / (w1 - w0)
        } else {
            let h = x1 - x0;
            let u = (x - x0) / h;
            let (u2, u3) = (u * u, u * u * u);
            f0 * (2.0 * u3 - 3.0 * u2 + 1.0)
                + h * self.density[i] * (u3 - 2.0 * u2 + u)
                + f1 * (3.0 * u2 - 2.0 * u3)
                + h * self.density[i + 1] * (u3 - u2)
        };
        value.clamp(f0.min(f1), f0.max(f1)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    /// Truncation levels, strictly descending.
    pub gamma_ladder: Vec<f64>,
    /// Jump intensity `t·a·E₁(√b γ)` per rung.
    pub rates: Vec<f64>,
    pub ks: Vec<KsReport>,
    pub n: usize,
    pub params: VgParams,
    /// Time the compound Poisson sums run to; compared against `X_{t/2}`.
    pub t: f64,
    pub seed: u64,
}

impl ConvergenceStudy {
    pub fn ks_per_gamma(&self) -> Vec<f64> {
        self.ks.iter().map(|r| r.statistic).collect()
    }

    /// True when no rung's statistic exceeds the previous one by more than
    /// `slack`.
    pub fn is_non_increasing_within(&self, slack: f64) -> bool {
        self.ks
            .windows(2)
            .all(|w| w[1].statistic <= w[0].statistic + slack)
    }

    /// Two standard errors of a null KS statistic at this sample size.
    pub fn noise_band(&self) -> f64 {
        2.0 * ks_standard_error(self.n)
    }
}

/// One compound Poisson sample of size `n` per truncation level, each tested
/// against the VG law at time `t/2`. Rung `k` draws from stream
/// `rng.stream + k`.
pub fn run_convergence_study(
    p: &VgParams,
    t: f64,
    gamma_ladder: &[f64],
    n: usize,
    rng: RngHandle,
) -> Result<ConvergenceStudy> {
    if gamma_ladder.is_empty() {
        return Err(Error::InvalidParameter("gamma ladder is empty".into()));
    }
    if gamma_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("gamma ladder must be strictly descending".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let table = VgCdfTable::new(p, 0.5 * t, &QuadConfig::default())?;
    let mut rates = Vec::with_capacity(gamma_ladder.len());
    let mut ks = Vec::with_capacity(gamma_ladder.len());
    for (k, &gamma) in gamma_ladder.iter().enumerate() {
        let handle = rng.substream(rng.stream + k as u64);
        let sample = sample_compound_poisson(p, t, gamma, n, handle)?;
        rates.push(compound_poisson_rate(p, t, gamma)?);
        ks.push(ks_one_sample(&sample.values, |x| table.cdf(x))?);
    }
    Ok(ConvergenceStudy {
        gamma_ladder: gamma_ladder.to_vec(),
        rates,
        ks,
        n,
        params: *p,
        t,
        seed: rng.seed,
    })
}
