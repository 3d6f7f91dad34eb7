//! Numerical integration: a globally adaptive Gauss–Kronrod (7/15) driver and
//! Gauss–Hermite rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and truncation policy for the semi-infinite integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Largest fraction of `abs_tol` allowed to be discarded when a
    /// semi-infinite range is cut off.
    pub tail_cut: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_subdivisions: 200,
            tail_cut: 1e-12,
        }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize, tail_cut: f64) -> Result<Self> {
        let q = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            tail_cut,
        };
        q.validate()?;
        Ok(q)
    }

    /// Tight settings used by the equation checks and the density oracle.
    pub fn precise() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_subdivisions: 2000,
            tail_cut: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be > 0".into(),
            ));
        }
        if self.max_subdivisions < 10 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be >= 10".into(),
            ));
        }
        if !(self.tail_cut > 0.0 && self.tail_cut < 1.0) {
            return Err(Error::InvalidParameter("tail_cut must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Absolute budget for discarded tails.
    pub fn tail_budget(&self) -> f64 {
        self.tail_cut * self.abs_tol
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut resabs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::Convergence {
            context: "quadrature: non-finite integrand",
            estimate: res_k,
            error: f64::INFINITY,
        });
    }
    let mean = 0.5 * res_k;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let error = rescale_error((res_k - res_g) * half, resabs * h, resasc * h);
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        error,
    })
}

/// Adaptive integration of `f` over `[a, b]`, with the interval first split
/// at every point of `breaks` that lies strictly inside it.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let p = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    // Panels too narrow to split further; their error is final.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut panels = heap.len();
    loop {
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
        {
            frozen_value += worst.value;
            frozen_error += worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if panels >= max_subdivisions {
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        panels += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally to stop drift in the running totals.
        if panels % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
            error = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
        }
    }
    let error_sum: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
    value = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let target = abs_tol.max(rel_tol * value.abs());
    if error_sum > target {
        return Err(Error::Convergence {
            context: "adaptive quadrature",
            estimate: sign * value,
            error: error_sum,
        });
    }
    Ok(Estimate {
        value: sign * value,
        error: error_sum,
        evaluations,
    })
}

/// Gauss–Hermite rule for weight `e^{-w²}`: `(nodes, weights)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

type Rule = (Vec<f64>, Vec<f64>);

/// Cached 40- and 80-point Gauss–Hermite rules.
pub(crate) fn hermite_pair() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_hermite(40), gauss_hermite(80)))
}
