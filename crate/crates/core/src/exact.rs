//! Closed-form and quadrature values for 2×2 pivot probabilities.
//!
//! For a 2×2 β-Hermite matrix, `A₁₁ ~ N(0, 1)` and `A₂₁ ~ χ_β/√2`, so a row
//! swap happens exactly when `F_{β,1} > 2/β`, giving
//! `p_β = 1 - I_{2/3}(β/2, 1/2)` with `I` the regularized incomplete beta
//! function. GOE, GUE and GSE under modulus pivoting reduce to β = 1, 2, 4.
//!
//! Under L1 pivoting a 2×2 GUE matrix swaps when `|Z₁| + |Z₂| > √2 |Z₃|`.
//! Writing a standard Gaussian vector in ℝ³ as `χ₃ · u` with `u` uniform on
//! the sphere turns this into an area ratio on the first octant of S², which
//! evaluates to exactly 2/3. [`spherical_area_quadrature`] integrates that
//! area numerically as an independent check.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 500;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Validated arguments of `I_z(a, b)`: `0 ≤ z ≤ 1`, `a, b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaArgs {
    z: f64,
    a: f64,
    b: f64,
}

impl BetaArgs {
    pub fn new(z: f64, a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::domain(format!(
                "incomplete beta argument z = {z} outside [0, 1]"
            )));
        }
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::domain(format!(
                "incomplete beta parameters must be positive, got a = {a}, b = {b}"
            )));
        }
        Ok(BetaArgs { z, a, b })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Regularized incomplete beta function `I_z(a, b)`.
pub fn reg_inc_beta(args: &BetaArgs) -> Result<f64> {
    inc_beta_split(args.z, 1.0 - args.z, args.a, args.b)
}

/// `I_z(a, b)` with range checking; shorthand for [`reg_inc_beta`].
pub fn inc_beta(z: f64, a: f64, b: f64) -> Result<f64> {
    reg_inc_beta(&BetaArgs::new(z, a, b)?)
}

// `zc` is `1 - z`, passed separately so callers that know it exactly avoid
// the cancellation in forming it.
fn inc_beta_split(z: f64, zc: f64, a: f64, b: f64) -> Result<f64> {
    if z <= 0.0 {
        return Ok(0.0);
    }
    if zc <= 0.0 {
        return Ok(1.0);
    }
    if z > (a + 1.0) / (a + b + 2.0) {
        Ok(1.0 - beta_cf_term(zc, z, b, a)?)
    } else {
        beta_cf_term(z, zc, a, b)
    }
}

// z^a (1-z)^b / (a B(a,b)) times the continued fraction, evaluated with the
// modified Lentz algorithm.
fn beta_cf_term(z: f64, zc: f64, a: f64, b: f64) -> Result<f64> {
    let ln_front = a * z.ln() + b * zc.ln() - ln_beta(a, b);
    let front = ln_front.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let num = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + num * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let num = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + num * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(front * h);
        }
    }
    Err(Error::domain(format!(
        "incomplete beta continued fraction did not converge for z = {z}, a = {a}, b = {b}"
    )))
}

/// CDF of the F distribution with `mu` numerator and `nu` denominator degrees
/// of freedom: `P(F ≤ x) = I_{μx/(μx+ν)}(μ/2, ν/2)`.
pub fn f_cdf(x: f64, mu: f64, nu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite() && nu > 0.0 && nu.is_finite()) {
        return Err(Error::domain(format!(
            "F degrees of freedom must be positive, got {mu}, {nu}"
        )));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("F CDF argument must be nonnegative, got {x}")));
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let mx = mu * x;
    let denom = mx + nu;
    inc_beta_split(mx / denom, nu / denom, 0.5 * mu, 0.5 * nu)
}

/// Exact probability that GEPP swaps rows on a 2×2 β-Hermite matrix,
/// `1 - I_{2/3}(β/2, 1/2)`. Any real `beta > 0`.
pub fn pivot_prob_hbeta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("beta must be positive and finite, got {beta}")));
    }
    Ok(1.0 - inc_beta_split(2.0 / 3.0, 1.0 / 3.0, 0.5 * beta, 0.5)?)
}

/// Swap probability for a 2×2 GUE matrix under L1 pivoting, exactly 2/3.
///
/// The first-octant region `x + y > √2 z` of the unit sphere has area π/3
/// against the octant's π/2; see [`spherical_area_quadrature`] for the
/// numerical version of that computation.
pub fn gue_l1_pivot_prob() -> f64 {
    2.0 / 3.0
}

/// Regions of the unit sphere compared in the 2×2 GUE pivot test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRegion {
    /// `|x| + |y| > √2 |z|`: swap under L1 pivoting.
    L1Cone,
    /// `√(x² + y²) > √2 |z|`: swap under modulus pivoting.
    ModulusCone,
}

impl SphereRegion {
    pub fn contains(self, x: f64, y: f64, z: f64) -> bool {
        self.margin(x, y, z) > 0.0
    }

    // positive inside; increasing in the polar angle on the first octant
    fn margin(self, x: f64, y: f64, z: f64) -> f64 {
        let planar = match self {
            SphereRegion::L1Cone => x.abs() + y.abs(),
            SphereRegion::ModulusCone => x.hypot(y),
        };
        planar - SQRT_2 * z.abs()
    }

    /// `cos φ₀` on the boundary, as a function of `ψ = π/4 - θ`.
    fn cos_boundary(self, psi: f64) -> f64 {
        match self {
            SphereRegion::L1Cone => {
                let c = psi.cos();
                c / (1.0 + c * c).sqrt()
            }
            SphereRegion::ModulusCone => 1.0 / 3f64.sqrt(),
        }
    }
}

/// How the first-octant area is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaMethod {
    /// One-dimensional: `2 ∫₀^{π/4} cos φ₀(ψ) dψ`, using the region's
    /// boundary symmetry about `θ = π/4`.
    Folded,
    /// Two-dimensional: `∫₀^{π/2} ∫_{φ₀(θ)}^{π/2} sin φ dφ dθ`, where `φ₀(θ)`
    /// is located by bisection on the region's defining inequality.
    Raw,
}

const AREA_TOL: f64 = 1e-12;

/// Area of the first-octant part of `region` on the unit sphere.
pub fn first_octant_area(region: SphereRegion, method: AreaMethod) -> f64 {
    match method {
        AreaMethod::Folded => 2.0 * quad::integrate(&|psi| region.cos_boundary(psi), 0.0, FRAC_PI_4, AREA_TOL),
        AreaMethod::Raw => {
            let outer = |theta: f64| {
                let (st, ct) = theta.sin_cos();
                let phi0 = boundary_polar_angle(region, ct, st);
                quad::integrate(&f64::sin, phi0, FRAC_PI_2, 0.1 * AREA_TOL)
            };
            quad::integrate(&outer, 0.0, FRAC_PI_2, AREA_TOL)
        }
    }
}

// smallest φ ∈ [0, π/2] on the region's boundary at azimuth (cos θ, sin θ)
fn boundary_polar_angle(region: SphereRegion, ct: f64, st: f64) -> f64 {
    let margin = |phi: f64| {
        let (sp, cp) = f64::sin_cos(phi);
        region.margin(sp * ct, sp * st, cp)
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    if margin(lo) > 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if margin(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability that a uniform point on the sphere lies in `region`, computed
/// as first-octant area over `π/2` with adaptive quadrature.
pub fn spherical_area_quadrature(region: SphereRegion) -> f64 {
    first_octant_area(region, AreaMethod::Folded) / FRAC_PI_2
}

mod quad {
    //! Adaptive Gauss–Kronrod (7, 15).

    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    // Gauss weights on the odd Kronrod nodes (indices 1, 3, 5, 7)
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    const MAX_DEPTH: u32 = 50;

    fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for i in 0..7 {
            let dx = h * XGK[i];
            let s = f(c - dx) + f(c + dx);
            kron += WGK[i] * s;
            if i % 2 == 1 {
                gauss += WG[i / 2] * s;
            }
        }
        (kron * h, ((kron - gauss) * h).abs())
    }

    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= MAX_DEPTH {
            return val;
        }
        let m = 0.5 * (a + b);
        step(f, a, m, 0.5 * tol, depth + 1) + step(f, m, b, 0.5 * tol, depth + 1)
    }

    /// `∫ₐᵇ f` to an absolute error estimate of `tol`.
    pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        step(f, a, b, tol, 0)
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn polynomials_and_smooth_functions() {
            assert!((integrate(&|x| x * x, 0.0, 3.0, 1e-13) - 9.0).abs() < 1e-13);
            assert!((integrate(&f64::sin, 0.0, std::f64::consts::PI, 1e-13) - 2.0).abs() < 1e-13);
            assert!(
                (integrate(&|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-13) - std::f64::consts::PI.sqrt()).abs() < 1e-12
            );
        }

        #[test]
        fn kink_is_resolved_adaptively() {
            let v = integrate(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
            assert!((v - (0.045 + 0.245)).abs() < 1e-11);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.5) - 13.940_625_219_403_763).abs() < 1e-13);
        // Γ(1e-3) ≈ 999.4237724845955
        assert!((ln_gamma(1e-3) - 999.423_772_484_595_5f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn inc_beta_examples() {
        assert!((inc_beta(0.3, 1.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
        for a in [0.5, 1.0, 3.0] {
            assert!((inc_beta(0.5, a, a).unwrap() - 0.5).abs() < 1e-14, "a = {a}");
        }
        let want = 1.0 - 1.0 / 3f64.sqrt();
        assert!((inc_beta(2.0 / 3.0, 1.0, 0.5).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn inc_beta_endpoints_and_errors() {
        assert_eq!(inc_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(inc_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
        assert!(inc_beta(-0.1, 1.0, 1.0).is_err());
        assert!(inc_beta(1.1, 1.0, 1.0).is_err());
        assert!(inc_beta(0.5, 0.0, 1.0).is_err());
        assert!(inc_beta(0.5, 1.0, -2.0).is_err());
        assert!(inc_beta(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn f_cdf_examples() {
        assert_eq!(f_cdf(0.0, 3.0, 2.0).unwrap(), 0.0);
        assert!((f_cdf(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let want = 2.0 / PI * 2f64.sqrt().atan();
        assert!((f_cdf(2.0, 1.0, 1.0).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.608_173_45).abs() < 1e-8);
        assert_eq!(f_cdf(f64::INFINITY, 1.0, 1.0).unwrap(), 1.0);
        assert!(f_cdf(-1.0, 1.0, 1.0).is_err());
        assert!(f_cdf(1.0, 0.0, 1.0).is_err());
        assert!(f_cdf(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn hbeta_pivot_closed_forms() {
        let p1 = 1.0 - 2.0 / PI * 2f64.sqrt().atan();
        let p2 = 1.0 / 3f64.sqrt();
        let p4 = 4.0 / (3.0 * 3f64.sqrt());
        assert!((pivot_prob_hbeta(1.0).unwrap() - p1).abs() < 1e-13);
        assert!((pivot_prob_hbeta(2.0).unwrap() - p2).abs() < 1e-13);
        assert!((pivot_prob_hbeta(4.0).unwrap() - p4).abs() < 1e-13);
        assert!((p1 - 0.391_826_55).abs() < 1e-8);
        assert!((p2 - 0.577_350_27).abs() < 1e-8);
        assert!((p4 - 0.769_800_36).abs() < 1e-8);
        assert!(pivot_prob_hbeta(0.0).is_err());
        assert!(pivot_prob_hbeta(-1.0).is_err());
        assert!(pivot_prob_hbeta(f64::NAN).is_err());
    }

    #[test]
    fn hbeta_pivot_limits() {
        assert!(pivot_prob_hbeta(1e-3).unwrap() < 0.05);
        assert!(pivot_prob_hbeta(100.0).unwrap() > 0.99);
    }

    #[test]
    fn gue_l1_constant() {
        assert_eq!(gue_l1_pivot_prob(), 2.0 / 3.0);
        assert!(gue_l1_pivot_prob() > pivot_prob_hbeta(2.0).unwrap());
    }

    #[test]
    fn sphere_regions() {
        assert!(SphereRegion::L1Cone.contains(1.0, 1.0, 1.0));
        assert!(!SphereRegion::ModulusCone.contains(1.0, 1.0, 1.0));
        assert!(!SphereRegion::L1Cone.contains(0.0, 0.0, 1.0));
        assert!(SphereRegion::ModulusCone.contains(1.0, 0.0, -0.1));
    }

    #[test]
    fn octant_areas() {
        let l1 = first_octant_area(SphereRegion::L1Cone, AreaMethod::Folded);
        assert!((l1 - PI / 3.0).abs() < 1e-12);
        let m = first_octant_area(SphereRegion::ModulusCone, AreaMethod::Folded);
        assert!((m - FRAC_PI_2 / 3f64.sqrt()).abs() < 1e-12);
    }
}
