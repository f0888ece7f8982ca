//! Test-only oracles, kept independent of the library's numerical code.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test; returns `(D, p)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Tanh–sinh quadrature of `f` over `[0, len]`, where `f` receives both the
/// abscissa `t` and `len - t` so endpoint singularities are evaluated
/// without cancellation.
pub fn tanh_sinh(f: impl Fn(f64, f64) -> f64, len: f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    let kmax = (7.0 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        // x = (1 + tanh u)/2 and 1 - x, both without cancellation
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let xc = 1.0 / (1.0 + (2.0 * u).exp());
        let w = FRAC_PI_2 * t.cosh() * x * xc * 2.0;
        if x <= 0.0 || xc <= 0.0 || !w.is_finite() || w == 0.0 {
            continue;
        }
        let v = f(len * x, len * xc);
        if v.is_finite() {
            sum += w * v;
        }
    }
    sum * h * len
}

/// `I_z(a, b)` from direct quadrature of the beta integrand, normalized by
/// the same quadrature over `[0, 1]`.
pub fn inc_beta_oracle(z: f64, a: f64, b: f64) -> f64 {
    let full = tanh_sinh(|t, tc| t.powf(a - 1.0) * tc.powf(b - 1.0), 1.0);
    // on [0, z] the complement 1 - t is not len - t, form it directly
    let part = tanh_sinh(|t, _| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0), z);
    part / full
}

/// Per-row band for comparing two independent Monte Carlo estimates of the
/// same proportion at `trials` each: `k · sqrt(se₁² + se₂²)`.
pub fn combined_band(p_ours: f64, p_ref: f64, trials: f64, k: f64) -> f64 {
    let se1 = (p_ours * (1.0 - p_ours) / trials).sqrt();
    let se2 = (p_ref * (1.0 - p_ref) / trials).sqrt();
    k * (se1 * se1 + se2 * se2).sqrt()
}
