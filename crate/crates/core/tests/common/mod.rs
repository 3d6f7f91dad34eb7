#![allow(dead_code)]

//! Reference integrators and closed forms shared by the integration tests.
//! Nothing here calls into the library's quadrature.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite 20-point Gauss–Legendre over `panels` equal panels.
pub fn composite_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * sum
}

/// Tanh-sinh rule on [a, b]; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let h = 1.0 / 256.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let s = 0.5 * PI * t.sinh();
        let c = s.cosh();
        let weight = 0.5 * PI * t.cosh() / (c * c);
        // Distance from each endpoint, computed without cancellation.
        let gap = half / (s.exp() * c);
        if weight * half < 1e-300 || gap == 0.0 {
            break;
        }
        let mut term = f(b - gap);
        if k > 0 {
            term += f(a + gap);
        }
        let contrib = weight * term;
        sum += contrib;
        if k > 40 && contrib.abs() <= 1e-18 * sum.abs() {
            break;
        }
        k += 1;
    }
    sum * half * h
}

/// ∫_a^∞ via tanh-sinh after `s = a + u/(1-u)`.
pub fn to_infinity<F: Fn(f64) -> f64>(f: F, a: f64) -> f64 {
    tanh_sinh(
        |u| {
            let v = 1.0 - u;
            let y = f(a + u / v) / (v * v);
            // The far end maps to s = ∞, where every integrand here vanishes.
            if y.is_finite() {
                y
            } else {
                0.0
            }
        },
        0.0,
        1.0,
    )
}

pub fn laplace_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * x.exp()
    } else {
        1.0 - 0.5 * (-x).exp()
    }
}

/// Regularized lower incomplete gamma P(s, x) by its power series.
pub fn gamma_cdf_series(s: f64, x: f64, ln_gamma_s1: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // P(s,x) = x^s e^{-x} Σ x^k / Γ(s+k+1)
    let mut term = (s * x.ln() - x - ln_gamma_s1).exp();
    let mut sum = term;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= x / (s + k);
        sum += term;
        k += 1.0;
    }
    sum.min(1.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}
