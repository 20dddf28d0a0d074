//! Whole-line etalon solutions of `u_xx + u_yy + ε² u_xxxx = 0`, `y ≥ −1`.
//!
//! Each etalon is fixed by Cauchy data at `y = −1` taken from a closed-form
//! Laplace solution `U₀` with a singularity at the origin. In Fourier space
//! every wavenumber evolves exactly, so the solution is a single integral
//! over `k ∈ [0, ∞)` of
//!
//! ```text
//! e^{−k} C(k, s),   C = cosh(ωs) + k sinh(ωs)/ω,   s = y + 1,   ω² = k² − ε²k⁴,
//! ```
//!
//! times `cos(kx)` or `sin(kx)` and a kind-dependent power of `k`. `C` is an
//! entire function of `ω²`, so the integrand is smooth through the Euler
//! threshold `εk = 1`, where `ω` changes from real to imaginary.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{omega_squared, propagator_taylor, DEGENERATE_TOL, MAX_EXPONENT};
use crate::error::{domain, Error, Result};
use crate::field::{Grid, SampledField};
use crate::quadrature::{self, QuadOptions};

/// The closed-form etalons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EtalonKind {
    /// `U₀ = −y/(x² + y²) = Re(1/w)`, `w = −y + ix`.
    PoleRe,
    /// `U₀ = −x/(x² + y²) = Im(1/w)`.
    PoleIm,
    /// Second `x`-derivative of [`EtalonKind::Root`]: `U₀ = Re((√2/4) w^{−3/2})`.
    RootD2,
    /// `U₀ = Re √(2w)`, the square-root singularity itself.
    Root,
}

impl EtalonKind {
    pub const ALL: [EtalonKind; 4] = [Self::PoleRe, Self::PoleIm, Self::RootD2, Self::Root];

    pub fn name(self) -> &'static str {
        match self {
            Self::PoleRe => "pole-re",
            Self::PoleIm => "pole-im",
            Self::RootD2 => "root-d2",
            Self::Root => "root",
        }
    }

    /// Exponent `p` of the `k^p` weight in the Fourier integral.
    fn power(self) -> f64 {
        match self {
            Self::PoleRe | Self::PoleIm => 0.0,
            Self::RootD2 => 0.5,
            Self::Root => -1.5,
        }
    }

    fn uses_square_substitution(self) -> bool {
        matches!(self, Self::RootD2 | Self::Root)
    }
}

impl fmt::Display for EtalonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EtalonKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown etalon kind '{s}'")))
    }
}

/// The limiting (`ε = 0`) solution `U₀` and its `y`-derivative.
pub fn etalon_limit(kind: EtalonKind, x: f64, y: f64) -> (f64, f64) {
    let w = Complex64::new(-y, x);
    // ∂_y = −d/dw
    let (f, df) = match kind {
        EtalonKind::PoleRe | EtalonKind::PoleIm => (1.0 / w, -1.0 / (w * w)),
        EtalonKind::RootD2 => {
            let c = 2f64.sqrt() / 4.0;
            (c * w.powf(-1.5), -1.5 * c * w.powf(-2.5))
        }
        EtalonKind::Root => {
            let r = (2.0 * w).sqrt();
            (r, 1.0 / r)
        }
    };
    match kind {
        EtalonKind::PoleIm => (f.im, -df.im),
        _ => (f.re, -df.re),
    }
}

/// `e^{−k}·(C, ∂_s C)` for wavenumber `k` after a step `s`, without overflow
/// in the intermediate hyperbolic functions.
fn weighted_profile(k: f64, eps: f64, s: f64) -> (f64, f64) {
    let w2 = omega_squared(k, eps);
    let tol = DEGENERATE_TOL * k * k;
    let damp = (-k).exp();
    if w2 < -tol {
        let mu = (-w2).sqrt();
        let (sn, cs) = (mu * s).sin_cos();
        (damp * (cs + k * sn / mu), damp * (k * cs - mu * sn))
    } else if w2 > tol {
        let w = w2.sqrt();
        if w * s >= 1.0 {
            let ep = (w * s - k).exp();
            let em = (-w * s - k).exp();
            let r = k / w;
            (
                0.5 * ((1.0 + r) * ep + (1.0 - r) * em),
                0.5 * ((w + k) * ep + (k - w) * em),
            )
        } else {
            let (sh, ch) = ((w * s).sinh(), (w * s).cosh());
            (damp * (ch + k * sh / w), damp * (w * sh + k * ch))
        }
    } else {
        (damp * (1.0 + k * s), damp * k)
    }
}

/// `e^{−k} C(k, s) − 1`, accurate for small `k`.
fn weighted_profile_m1(k: f64, eps: f64, s: f64) -> f64 {
    let q = eps * k;
    if q <= 0.5 {
        let root = (1.0 - q * q).sqrt();
        let w = k * root;
        let r = 1.0 / root;
        0.5 * ((1.0 + r) * (w * s - k).exp_m1() + (1.0 - r) * (-w * s - k).exp_m1())
    } else {
        weighted_profile(k, eps, s).0 - 1.0
    }
}

/// Growth exponent of `e^{−k} C(k, s)`: `ωs − k` below the threshold, `−k` above it.
fn growth_exponent(k: f64, eps: f64, s: f64) -> f64 {
    let w2 = omega_squared(k, eps);
    if w2 > 0.0 {
        w2.sqrt() * s - k
    } else {
        -k
    }
}

/// Smallest `K ≥ k_floor` past the maximum of `ln_env` with `ln_env(K) < ln_target`,
/// together with the largest value of `ln_env` seen on the way.
fn truncation_point(ln_env: impl Fn(f64) -> f64, k_floor: f64, ln_target: f64) -> (f64, f64) {
    let mut k = 0.0;
    let mut max_seen = f64::NEG_INFINITY;
    loop {
        let step = 0.02 * (1.0 + k);
        let here = ln_env(k);
        max_seen = max_seen.max(here);
        if k >= k_floor && here < ln_target && ln_env(k + step) < here {
            return (k, max_seen);
        }
        k += step;
    }
}

/// Panel boundaries on `[0, k_max]` with at least eight panels per local
/// oscillation period of the integrand.
fn k_breaks(x: f64, eps: f64, s: f64, k_max: f64) -> Vec<f64> {
    let threshold = 1.0 / eps;
    let mut out = vec![0.0];
    let mut k = 0.0;
    while k < k_max {
        let mut freq = x.abs();
        if k > threshold {
            freq += 2.0 * s * eps * k;
        }
        let mut width = 1f64.max(0.05 * k);
        if freq > 0.0 {
            width = width.min(2.0 * PI / (8.0 * freq));
        }
        let next = k + width;
        if k < threshold && next > threshold && threshold < k_max {
            out.push(threshold);
        }
        k = next.min(k_max);
        out.push(k);
    }
    out.dedup();
    out
}

struct Integrand {
    kind: EtalonKind,
    x: f64,
    /// `true` for `∂_y u`, `false` for `u`.
    derivative: bool,
    /// Whether the root integrand carries the regularising `−1`.
    subtract_one: bool,
}

impl Integrand {
    /// Value at wavenumber `k`, including the `k^p` weight and the trigonometric factor.
    fn at(&self, k: f64, profile: impl Fn(f64) -> (f64, f64), profile_m1: impl Fn(f64) -> f64) -> f64 {
        let (p, ps) = profile(k);
        let amp = if self.derivative { ps } else { p };
        let (sn, cs) = (k * self.x).sin_cos();
        let norm = 1.0 / (2.0 * PI).sqrt();
        match self.kind {
            EtalonKind::PoleRe => amp * cs,
            EtalonKind::PoleIm => -amp * sn,
            EtalonKind::RootD2 => norm * k.sqrt() * amp * cs,
            EtalonKind::Root => {
                let bracket = if !self.subtract_one {
                    amp * cs
                } else {
                    let half = (0.5 * k * self.x).sin();
                    profile_m1(k) * cs - 2.0 * half * half
                };
                -norm * bracket / (k * k.sqrt())
            }
        }
    }

    /// Integrates `self.at` over `[0, k_max]`, substituting `k = t²` where the
    /// weight is singular at the origin.
    fn integrate(
        &self,
        breaks: &[f64],
        abs_tol: f64,
        profile: impl Fn(f64) -> (f64, f64) + Copy,
        profile_m1: impl Fn(f64) -> f64 + Copy,
    ) -> Result<f64> {
        let mut opts = QuadOptions::new(abs_tol);
        opts.max_panels = opts.max_panels.max(8 * breaks.len());
        let r = if self.kind.uses_square_substitution() {
            let tb: Vec<f64> = breaks.iter().map(|k| k.sqrt()).collect();
            let small = 1e-6;
            quadrature::integrate(
                |t| {
                    // For tiny t evaluate at a nearby point: the substituted integrand is smooth.
                    let t = t.max(small * tb[1]);
                    Complex64::new(2.0 * t * self.at(t * t, profile, profile_m1), 0.0)
                },
                &tb,
                opts,
            )?
        } else {
            quadrature::integrate(
                |k| Complex64::new(self.at(k, profile, profile_m1), 0.0),
                breaks,
                opts,
            )?
        };
        Ok(r.value.re)
    }
}

fn validate(y: f64, epsilon: f64, abs_tol: f64) -> Result<()> {
    if !(y >= -1.0) || !y.is_finite() {
        return domain(format!("etalons are defined for y >= -1, got {y}"));
    }
    if !(epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    if !(abs_tol > 0.0) {
        return domain(format!("tolerance must be positive, got {abs_tol}"));
    }
    Ok(())
}

fn evaluate(kind: EtalonKind, x: f64, y: f64, epsilon: f64, abs_tol: f64, derivative: bool) -> Result<f64> {
    validate(y, epsilon, abs_tol)?;
    if !x.is_finite() {
        return domain("x must be finite");
    }
    let s = y + 1.0;
    let p = kind.power() + if derivative { 1.0 } else { 0.0 };
    let ln_env = |k: f64| {
        let kk = k.max(1e-300);
        p.max(0.0) * kk.ln() + (1.0 + k * s).ln() + growth_exponent(k, epsilon, s)
    };
    let (k_max, peak) = truncation_point(ln_env, 50.0, (abs_tol * 1e-2).ln());
    if peak > MAX_EXPONENT {
        return Err(Error::Saturation {
            exponent: peak,
            limit: MAX_EXPONENT,
        });
    }
    let breaks = k_breaks(x, epsilon, s, k_max);
    let integrand = Integrand {
        kind,
        x,
        derivative,
        subtract_one: !derivative,
    };
    let value = integrand.integrate(
        &breaks,
        abs_tol,
        |k| weighted_profile(k, epsilon, s),
        |k| weighted_profile_m1(k, epsilon, s),
    )?;
    // For the root etalon the "−1" part beyond the cutoff integrates in closed form.
    let tail = if kind == EtalonKind::Root && !derivative {
        2.0 / ((2.0 * PI).sqrt() * k_max.sqrt())
    } else {
        0.0
    };
    Ok(value + tail)
}

/// The etalon `u(x, y; ε)` with absolute error at most `abs_tol`.
pub fn evaluate_etalon(kind: EtalonKind, x: f64, y: f64, epsilon: f64, abs_tol: f64) -> Result<f64> {
    evaluate(kind, x, y, epsilon, abs_tol, false)
}

/// `(u, ∂_y u)` of the etalon.
pub fn evaluate_etalon_pair(kind: EtalonKind, x: f64, y: f64, epsilon: f64, abs_tol: f64) -> Result<(f64, f64)> {
    Ok((
        evaluate(kind, x, y, epsilon, abs_tol, false)?,
        evaluate(kind, x, y, epsilon, abs_tol, true)?,
    ))
}

/// The etalon sampled on a lattice; the first failing node aborts the sweep.
pub fn evaluate_etalon_grid(kind: EtalonKind, grid: &Grid, epsilon: f64, abs_tol: f64) -> Result<SampledField> {
    let values = grid
        .points()
        .into_par_iter()
        .map(|(x, y)| evaluate_etalon(kind, x, y, epsilon, abs_tol))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SampledField {
        grid: *grid,
        values,
        scenario: kind.name().to_string(),
        epsilon,
    })
}

/// Coefficient `U_n(x, y)` of `ε^{2n}` in the expansion of the etalon, from
/// the Taylor coefficients of the per-mode propagator. Requires `y < 0`,
/// where the `k`-integrals of the coefficients converge.
pub fn etalon_series_coefficient(kind: EtalonKind, n: usize, x: f64, y: f64, abs_tol: f64) -> Result<f64> {
    if !(-1.0..0.0).contains(&y) {
        return domain(format!("series coefficients need -1 <= y < 0, got {y}"));
    }
    if !(abs_tol > 0.0) {
        return domain(format!("tolerance must be positive, got {abs_tol}"));
    }
    if n == 0 {
        return Ok(etalon_limit(kind, x, y).0);
    }
    let s = y + 1.0;
    let nf = n as f64;
    let p = kind.power();
    let ln_env = |k: f64| {
        let kk = k.max(1e-300);
        nf * (kk.powi(4) * s * s + 1.0).ln() + 2.0 * (1.0 + k).ln() + p.max(0.0) * kk.ln() + k * (s - 1.0)
    };
    let (k_max, _) = truncation_point(ln_env, 10.0, (abs_tol * 1e-2).ln());
    let breaks = k_breaks(x, f64::MIN_POSITIVE, s, k_max);
    let coeff = move |k: f64| {
        let t = propagator_taylor(n, k, s);
        let damp = (-k).exp();
        (damp * (t[0][0] + k * t[0][1]), damp * (t[1][0] + k * t[1][1]))
    };
    // For n ≥ 1 the constant "−1" of the root integrand has no ε-dependence.
    let integrand = Integrand {
        kind,
        x,
        derivative: false,
        subtract_one: false,
    };
    integrand.integrate(&breaks, abs_tol, coeff, move |k| coeff(k).0 - 1.0)
}
