//! The Hardy integral
//!
//! ```text
//! I_ν(X, Y, m) = ∫₀^∞ k^ν exp(k(Y − iX) − k^m/2) dk,   ν > −1,
//! ```
//!
//! and the inner-zone solutions built from it. With `m = 3` the integral is
//! a harmonic function of `(X, Y)`; its real and imaginary parts describe
//! the rod near a pole singularity of the limiting Laplace solution, and
//! the combination `u_in` describes it near a square-root singularity.
//!
//! Evaluation is by adaptive Gauss-Kronrod quadrature on the real `k` axis.
//! Endpoint singularities `k^ν` are removed by substitution, and the
//! initial panels resolve each oscillation period `2π/|X|` at least eight times.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, QuadOptions};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// One Hardy integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyQuery {
    pub nu: f64,
    pub m: f64,
    pub x: f64,
    pub y: f64,
}

impl HardyQuery {
    /// Query with the default exponent `m = 3`.
    pub fn new(nu: f64, x: f64, y: f64) -> Result<Self> {
        Self::with_exponent(nu, 3.0, x, y)
    }

    pub fn with_exponent(nu: f64, m: f64, x: f64, y: f64) -> Result<Self> {
        if !(nu > -1.0) {
            return domain(format!("Hardy index must exceed -1, got {nu}"));
        }
        if !(m >= 2.0) {
            return domain(format!("Hardy exponent must be at least 2, got {m}"));
        }
        if !(x.is_finite() && y.is_finite()) {
            return domain("Hardy arguments must be finite");
        }
        Ok(Self { nu, m, x, y })
    }
}

/// Inner (stretched) coordinates `X = x/ε^{2/3}`, `Y = y/ε^{2/3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPoint {
    pub big_x: f64,
    pub big_y: f64,
    pub epsilon: f64,
    pub x: f64,
    pub y: f64,
}

impl ScaledPoint {
    pub fn from_outer(x: f64, y: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        let s = inner_scale(epsilon);
        Ok(Self {
            big_x: x / s,
            big_y: y / s,
            epsilon,
            x,
            y,
        })
    }

    pub fn from_inner(big_x: f64, big_y: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        let s = inner_scale(epsilon);
        Ok(Self {
            big_x,
            big_y,
            epsilon,
            x: big_x * s,
            y: big_y * s,
        })
    }
}

/// `ε^{2/3}`, the width of the inner zone.
pub fn inner_scale(epsilon: f64) -> f64 {
    epsilon.powf(2.0 / 3.0)
}

/// How the `k^ν` endpoint factor is removed.
#[derive(Debug, Clone, Copy)]
enum Substitution {
    None,
    /// `k = t²`
    Square,
    /// `k = t^{1/(1+ν)}`, which turns `k^ν dk` into `dt/(1+ν)`.
    Power(f64),
}

impl Substitution {
    fn for_index(nu: f64) -> Self {
        if nu.fract() == 0.0 && nu >= 0.0 {
            Substitution::None
        } else if (2.0 * nu).fract() == 0.0 || nu > 0.0 {
            Substitution::Square
        } else {
            Substitution::Power(1.0 / (1.0 + nu))
        }
    }

    fn to_t(self, k: f64) -> f64 {
        match self {
            Substitution::None => k,
            Substitution::Square => k.sqrt(),
            Substitution::Power(p) => k.powf(1.0 / p),
        }
    }
}

/// Upper integration limit beyond which `k^ν e^{kY − k^m/2}` stays below
/// `e^{-40}` relative to its maximum and below `floor` in absolute terms.
fn upper_limit(nu: f64, m: f64, y: f64, floor: f64) -> f64 {
    let log_env = |k: f64| nu.max(0.0) * k.max(1e-300).ln() + k * y - 0.5 * k.powf(m);
    // Stationary point of kY − k^m/2 (the ν term only shifts it slightly).
    let peak = if y > 0.0 { (2.0 * y / m).powf(1.0 / (m - 1.0)) } else { 0.0 };
    let log_max = log_env(peak.max(1.0)).max(log_env(peak)).max(0.0);
    let cutoff = (log_max - 40.0).min(floor.ln());
    let mut k = peak.max(1.0);
    while log_env(k) > cutoff {
        k += 0.05 * (1.0 + k);
    }
    k
}

/// Breakpoints in `k`: geometric near the origin on the scale `1/|Y − iX|`,
/// then panels of at most an eighth of an oscillation period.
fn k_breaks(x: f64, y: f64, k_max: f64) -> Vec<f64> {
    let r = x.hypot(y).max(1.0);
    let extra: Vec<f64> = (0..12)
        .map(|i| 2f64.powi(i - 2) / r)
        .filter(|&k| k < k_max)
        .collect();
    let mut width = k_max / 16.0;
    if x != 0.0 {
        width = width.min(2.0 * PI / x.abs() / 8.0);
    }
    quadrature::panel_breaks(0.0, k_max, width, &extra)
}

/// `I_ν(X, Y, m)` with absolute error at most `abs_tol` (relaxed to the
/// double-precision round-off floor of the integral of `|integrand|`).
pub fn hardy(q: HardyQuery, abs_tol: f64) -> Result<Complex64> {
    let HardyQuery { nu, m, x, y } = q;
    let w = Complex64::new(y, -x);
    let k_max = upper_limit(nu, m, y, abs_tol * 1e-3);
    let sub = Substitution::for_index(nu);
    let breaks: Vec<f64> = k_breaks(x, y, k_max).into_iter().map(|k| sub.to_t(k)).collect();
    let phase = move |k: f64| (w * k - 0.5 * k.powf(m)).exp();
    let f = move |t: f64| -> Complex64 {
        match sub {
            Substitution::None => {
                let kn = if nu == 0.0 { 1.0 } else { t.powf(nu) };
                phase(t) * kn
            }
            Substitution::Square => {
                let k = t * t;
                phase(k) * (2.0 * t.powf(2.0 * nu + 1.0))
            }
            Substitution::Power(p) => {
                let k = t.powf(p);
                phase(k) * p
            }
        }
    };
    let r = quadrature::integrate(f, &breaks, QuadOptions::new(abs_tol))?;
    Ok(r.value)
}

/// `I_ν(0, 0, 3) = (2^{(ν+1)/3}/3) Γ((ν+1)/3)`.
pub fn hardy_origin_closed_form(nu: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return domain(format!("Hardy index must exceed -1, got {nu}"));
    }
    let p = (nu + 1.0) / 3.0;
    Ok(2f64.powf(p) / 3.0 * gamma(p))
}

/// Outside the sector `{Y > 0, |X| < √3 Y}` the integral `I₀(X, Y, 3)` decays algebraically.
pub fn sector_contains(x: f64, y: f64) -> bool {
    y > 0.0 && x.abs() < SQRT_3 * y
}

/// Partial sum of the large-`|Y − iX|` expansion of `I₀(X, Y, 3)` outside the sector:
/// `(1/(−Y)) Σ_{j=0}^{n} (3j)!/j! (2Y³)^{−j} (1 − iX/Y)^{−3j−1}`.
///
/// Each term equals `(−1)^j (3j)!/(2^j j!) (−Y + iX)^{−3j−1}`, which is the
/// form summed here so that `Y = 0` needs no special case.
pub fn hardy_pole_asymptotic(x: f64, y: f64, n_terms: usize) -> Result<Complex64> {
    if sector_contains(x, y) {
        return domain(format!("({x}, {y}) lies inside the growth sector"));
    }
    let z = Complex64::new(-y, x);
    if z.norm() == 0.0 {
        return domain("asymptotic expansion undefined at the origin");
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coeff = 1.0; // (−1)^j (3j)!/(2^j j!)
    for j in 0..=n_terms {
        if j > 0 {
            let jf = j as f64;
            coeff *= -(3.0 * jf) * (3.0 * jf - 1.0) * (3.0 * jf - 2.0) / (2.0 * jf);
        }
        sum += coeff * z.powi(-(3 * j as i32) - 1);
    }
    Ok(sum)
}

/// Two-term uniform approximation of `I₀(X, Y, 3)` in the half-plane `Y ≥ 0`:
/// `1/(−Y + iX) + √π (2/(3(Y − iX)))^{1/4} exp((2(Y − iX)/3)^{3/2})`,
/// principal branches throughout.
pub fn hardy_uniform_asymptotic_y_nonneg(x: f64, y: f64) -> Result<Complex64> {
    if y < 0.0 {
        return domain(format!("uniform expansion requires Y >= 0, got {y}"));
    }
    let w = Complex64::new(y, -x);
    if w.norm() == 0.0 {
        return domain("uniform expansion undefined at the origin");
    }
    let algebraic = 1.0 / (-w);
    let exponential = PI.sqrt() * (2.0 / (3.0 * w)).powf(0.25) * (2.0 * w / 3.0).powf(1.5).exp();
    Ok(algebraic + exponential)
}

/// `(Re I₀(X, Y, 3), Im I₀(X, Y, 3))`, the inner descriptions of the even
/// and odd pole etalons. The imaginary part matches the outer pole `−x/(x² + y²)`.
pub fn inner_pole(x: f64, y: f64, abs_tol: f64) -> Result<(f64, f64)> {
    let v = hardy(HardyQuery::new(0.0, x, y)?, abs_tol)?;
    Ok((v.re, v.im))
}

fn sqrt_two_pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// `u_in = −Re[2(Y − iX) I_{−1/2} − 3 I_{3/2}] / √(2π)` from the two Hardy integrals.
pub fn inner_root_combination(x: f64, y: f64, abs_tol: f64) -> Result<f64> {
    let w = Complex64::new(y, -x);
    let tol = abs_tol * sqrt_two_pi() / (2.0 * (2.0 * w.norm() + 3.0));
    let i_m = hardy(HardyQuery::new(-0.5, x, y)?, tol)?;
    let i_p = hardy(HardyQuery::new(1.5, x, y)?, tol)?;
    Ok(-(2.0 * w * i_m - 3.0 * i_p).re / sqrt_two_pi())
}

/// `u_in = −Re ∫₀^∞ k^{−3/2} [exp(k(Y − iX) − k³/2) − 1] dk / √(2π)`.
///
/// Integrated to a cutoff `K` past which the exponential is negligible; the
/// remaining `−∫_K^∞ k^{−3/2} dk = −2/√K` is added in closed form.
pub fn inner_root_regularized(x: f64, y: f64, abs_tol: f64) -> Result<f64> {
    let w = Complex64::new(y, -x);
    let tol = abs_tol * sqrt_two_pi() / 2.0;
    let k_max = upper_limit(0.0, 3.0, y, tol * 1e-3).max(4.0);
    let breaks: Vec<f64> = k_breaks(x, y, k_max).into_iter().map(f64::sqrt).collect();
    // k = t²: k^{−3/2} dk = 2 t^{−2} dt; (e^φ − 1)/t² is smooth at t = 0.
    let f = move |t: f64| -> Complex64 {
        if t == 0.0 {
            return 2.0 * w;
        }
        let t2 = t * t;
        let phi = w * t2 - 0.5 * t2 * t2 * t2;
        complex_expm1(phi) * (2.0 / t2)
    };
    let r = quadrature::integrate(f, &breaks, QuadOptions::new(tol))?;
    let total = r.value.re - 2.0 / k_max.sqrt();
    Ok(-total / sqrt_two_pi())
}

/// `e^z − 1` without cancellation for small `|z|`.
fn complex_expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let ea = z.re.exp();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, ea * s)
}

/// The inner solution at a square-root singularity, evaluated by both integral
/// forms. Returns the Hardy-combination value; the regularised form must agree
/// within `10·abs_tol` (relaxed to round-off for very large values).
pub fn inner_root(x: f64, y: f64, abs_tol: f64) -> Result<f64> {
    let combined = inner_root_combination(x, y, abs_tol)?;
    let regularized = inner_root_regularized(x, y, abs_tol)?;
    let allowed = (10.0 * abs_tol).max(1e-12 * combined.abs());
    if (combined - regularized).abs() > allowed {
        return Err(Error::Consistency(format!(
            "u_in({x}, {y}): Hardy combination {combined} vs regularised integral {regularized}"
        )));
    }
    Ok(combined)
}

/// Leading exponential growth of `u_in` inside the sector:
/// `−Re[√3/(2(Y − iX)) · exp((2(Y − iX)/3)^{3/2})]`.
///
/// The sign follows from `∂_Y u_in = −Re I_{−1/2}/√(2π)`, which is forced by
/// the integration-by-parts identity for the Hardy integrals together with
/// the algebraic branch `u_in ≈ √(−Y + √(X² + Y²))` outside the sector.
pub fn inner_root_exponential_asymptotic(x: f64, y: f64) -> Result<f64> {
    if !sector_contains(x, y) {
        return domain(format!("({x}, {y}) lies outside the growth sector"));
    }
    let w = Complex64::new(y, -x);
    let v = SQRT_3 / (2.0 * w) * (2.0 * w / 3.0).powf(1.5).exp();
    Ok(-v.re)
}

/// Algebraic branch `√(−Y + √(X² + Y²))` of `u_in` outside the sector.
pub fn inner_root_algebraic_asymptotic(x: f64, y: f64) -> f64 {
    (-y + x.hypot(y)).max(0.0).sqrt()
}

/// `Re I_{1/2}(X, Y, 3)/√(2π)`, the inner description of the second
/// `x`-derivative of the root etalon (equal to `∂²_X u_in`).
pub fn inner_root_curvature(x: f64, y: f64, abs_tol: f64) -> Result<f64> {
    let v = hardy(HardyQuery::new(0.5, x, y)?, abs_tol * sqrt_two_pi())?;
    Ok(v.re / sqrt_two_pi())
}
