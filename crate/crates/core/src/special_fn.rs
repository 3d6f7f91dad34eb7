//! Special functions used by the densities and the jump law: `ln Γ`, `Γ`,
//! the modified Bessel function of the second kind `K_ν` and the
//! exponential integral `E₁`.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_MAX: f64 = 709.782_712_893_384;
const LN_MIN_POSITIVE: f64 = -708.396_418_532_264_1;
const FPMIN: f64 = 1e-300;

/// Stopping policy for the series and continued fractions in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms < 1 {
            return Err(Error::InvalidParameter(format!(
                "accuracy needs rel_tol > 0 and max_terms >= 1, got {rel_tol}, {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    /// Term-size threshold: four digits below the target, floored at half an ulp.
    fn term_tol(&self) -> f64 {
        (self.rel_tol * 1e-4).max(f64::EPSILON / 2.0)
    }
}

// Lanczos-type approximation (g = 671/128, 14 terms).
const LNGAMMA_COF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("requires finite x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut y = x;
    let tmp = x + 5.242_187_5;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LNGAMMA_COF {
        y += 1.0;
        ser += c / y;
    }
    Ok(tmp + (2.506_628_274_631_000_5 * ser / x).ln())
}

/// Gamma function for `x > 0`; range error once `Γ(x)` exceeds `f64::MAX`.
pub fn gamma(x: f64) -> Result<f64> {
    let lg = ln_gamma(x)?;
    if lg > LN_MAX {
        return Err(Error::Range {
            func: "gamma",
            msg: format!("Γ({x}) overflows f64"),
        });
    }
    Ok(lg.exp())
}

// Taylor coefficients of 1/Γ(1+z) about z = 0.
const RGAMMA1P_COF: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
];

/// `(gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ))` for `|μ| <= 1/2`, with
/// `gam1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / 2μ` and `gam2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    // Horner in μ² over the even and odd coefficient subsequences.
    for k in (0..RGAMMA1P_COF.len()).rev() {
        if k % 2 == 0 {
            even = even * mu2 + RGAMMA1P_COF[k];
        } else {
            odd = odd * mu2 + RGAMMA1P_COF[k];
        }
    }
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

/// `(K_μ, K_{μ+1}, ln_scale)` with both values multiplied by `exp(-ln_scale)`,
/// for `|μ| <= 1/2`.
fn bessel_k_pair(mu: f64, x: f64, acc: &Accuracy) -> Result<(f64, f64, f64)> {
    let eps = acc.term_tol();
    let mu2 = mu * mu;
    if x < 2.0 {
        // Temme's series.
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < f64::EPSILON {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < f64::EPSILON {
            1.0
        } else {
            e.sinh() / e
        };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..=acc.max_terms {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                context: "bessel_k series",
                estimate: sum,
                error: f64::NAN,
            });
        }
        Ok((sum, sum1 * 2.0 / x, 0.0))
    } else {
        // Steed's continued fraction (Temme's CF2), result scaled by e^{x}.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut c = a1;
        let mut q = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..=acc.max_terms.max(2) {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                context: "bessel_k continued fraction",
                estimate: s,
                error: f64::NAN,
            });
        }
        let h = a1 * h;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) / x;
        Ok((kmu, k1, -x))
    }
}

/// `ln K_ν(x)` for `x > 0`. The order is normalized with `K_{-ν} = K_ν`.
///
/// Works in log space throughout the upward recurrence, so it stays finite
/// where `K_ν(x)` itself over- or underflows.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    ln_bessel_k_with(nu, x, &Accuracy::default())
}

pub fn ln_bessel_k_with(nu: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", format!("requires finite x > 0, got {x}")));
    }
    if !nu.is_finite() {
        return Err(domain("bessel_k", format!("requires finite order, got {nu}")));
    }
    let nu = nu.abs();
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut kmu, mut k1, mut ln_scale) = bessel_k_pair(mu, x, acc)?;
    if !(kmu.is_finite() && k1.is_finite()) {
        return Err(Error::Range {
            func: "bessel_k",
            msg: format!("K_{mu}({x}) overflows f64 before recurrence"),
        });
    }
    let xi2 = 2.0 / x;
    let steps = nl as u64;
    for i in 1..=steps {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
        if k1 > 1e250 {
            kmu /= k1;
            ln_scale += k1.ln();
            k1 = 1.0;
        }
    }
    Ok(kmu.ln() + ln_scale)
}

/// Modified Bessel function of the second kind `K_ν(x)`, `x > 0`.
///
/// Returns a range error when the value is not representable as a positive
/// finite f64; use [`ln_bessel_k`] in that regime.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    bessel_k_with(nu, x, &Accuracy::default())
}

pub fn bessel_k_with(nu: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let lk = ln_bessel_k_with(nu, x, acc)?;
    if lk > LN_MAX {
        return Err(Error::Range {
            func: "bessel_k",
            msg: format!("K_{nu}({x}) overflows f64 (ln = {lk})"),
        });
    }
    if lk < LN_MIN_POSITIVE {
        return Err(Error::Range {
            func: "bessel_k",
            msg: format!("K_{nu}({x}) underflows f64 (ln = {lk})"),
        });
    }
    Ok(lk.exp())
}

/// `K'_ν(x) = -(K_{ν-1}(x) + K_{ν+1}(x)) / 2`.
pub fn bessel_k_deriv(nu: f64, x: f64) -> Result<f64> {
    Ok(-0.5 * (bessel_k(nu - 1.0, x)? + bessel_k(nu + 1.0, x)?))
}

/// `E₁(x) = ∫ₓ^∞ e^{-z}/z dz` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    exp_integral_e1_with(x, &Accuracy::default())
}

pub fn exp_integral_e1_with(x: f64, acc: &Accuracy) -> Result<f64> {
    if x > 1.0 {
        let h = e1_continued_fraction(x, acc)?;
        Ok(h * (-x).exp())
    } else {
        e1_series(x, acc)
    }
}

/// `ln E₁(x)`; finite for every finite `x > 0` (E₁ underflows past x ≈ 740).
pub fn ln_exp_integral_e1(x: f64) -> Result<f64> {
    let acc = Accuracy::default();
    if x > 1.0 {
        Ok(e1_continued_fraction(x, &acc)?.ln() - x)
    } else {
        Ok(e1_series(x, &acc)?.ln())
    }
}

fn e1_series(x: f64, acc: &Accuracy) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(
            "exp_integral_e1",
            format!("requires x > 0 (log singularity at 0), got {x}"),
        ));
    }
    let eps = acc.term_tol();
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..=acc.max_terms {
        let fk = k as f64;
        fact *= -x / fk;
        let term = -fact / fk;
        sum += term;
        if term.abs() < sum.abs().max(1e-300) * eps {
            return Ok(-EULER_GAMMA - x.ln() + sum);
        }
    }
    Err(Error::Convergence {
        context: "exp_integral_e1 series",
        estimate: -EULER_GAMMA - x.ln() + sum,
        error: f64::NAN,
    })
}

/// Continued fraction for `e^{x} E₁(x)`, `x > 1`, by modified Lentz.
fn e1_continued_fraction(x: f64, acc: &Accuracy) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("exp_integral_e1", format!("requires finite x, got {x}")));
    }
    let eps = acc.term_tol();
    let mut b = x + 1.0;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=acc.max_terms {
        let fi = i as f64;
        let an = -fi * fi;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < eps {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        context: "exp_integral_e1 continued fraction",
        estimate: h * (-x).exp(),
        error: f64::NAN,
    })
}
