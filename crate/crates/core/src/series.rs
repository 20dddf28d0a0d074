//! Outer expansion `u = U₀ + ε²U₁ + ε⁴U₂ + …` of the rod equation.
//!
//! Substituting the series gives `ΔU₀ = 0` and `ΔU_n = −∂⁴_x U_{n−1}` with
//! zero Cauchy data at `y = −1` for `n ≥ 1`. When `U₀` is harmonic the first
//! two corrections have closed forms in the `y`-derivatives of `U₀`, taken
//! both at `(x, y)` and at the reflected point `(x, −y − 2)`. Those
//! derivatives come from a [`Seed`], which supplies them exactly.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dispersion::{propagate_mode, propagator_taylor, ModeState, DEGENERATE_TOL};
use crate::error::{domain, Result};
use crate::spectral::{Mode, SineSeriesState};

/// Source of exact `y`-derivatives of a harmonic function `U₀`.
pub trait Seed: Sync {
    /// `∂ⁿ_y U₀(x, y)`.
    fn dy(&self, n: usize, x: f64, y: f64) -> Result<f64>;
}

/// Which part of a holomorphic function is the real field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

/// `n`-th derivative rule of a user-supplied holomorphic `f(w)`.
pub type DerivativeRule = Arc<dyn Fn(usize, Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum SeedKind {
    /// `f(w) = 1/w`.
    Pole1,
    /// `f(w) = √(2w)`, principal branch (cut along `x = 0`, `y > 0`).
    Root,
    /// `U₀ = −Im(z/(1 − z))`, `z = e^{y + ix}`: the Tolstov function
    /// `−Σ_{j≥1} e^{jy} sin jx`, singular at the origin and 2π-periodic in `x`.
    TolstovMap,
    Custom(DerivativeRule),
}

impl fmt::Debug for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedKind::Pole1 => f.write_str("Pole1"),
            SeedKind::Root => f.write_str("Root"),
            SeedKind::TolstovMap => f.write_str("TolstovMap"),
            SeedKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A harmonic `U₀ = part(f(w))`, `w = −y + ix`, so that `∂_y = −d/dw`.
#[derive(Debug, Clone)]
pub struct HolomorphicSeed {
    pub kind: SeedKind,
    pub part: Part,
}

impl HolomorphicSeed {
    pub fn pole(part: Part) -> Self {
        Self {
            kind: SeedKind::Pole1,
            part,
        }
    }

    pub fn root() -> Self {
        Self {
            kind: SeedKind::Root,
            part: Part::Re,
        }
    }

    pub fn tolstov() -> Self {
        Self {
            kind: SeedKind::TolstovMap,
            part: Part::Im,
        }
    }

    pub fn custom(rule: DerivativeRule, part: Part) -> Self {
        Self {
            kind: SeedKind::Custom(rule),
            part,
        }
    }
}

/// Eulerian numbers `A(n, m)`, `m = 0..n` (with `A(0, 0) = 1`).
fn eulerian_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=n {
        let mut next = vec![0.0; k];
        for (m, slot) in next.iter_mut().enumerate() {
            let keep = if m < row.len() { (m + 1) as f64 * row[m] } else { 0.0 };
            let shift = if m >= 1 { (k - m) as f64 * row[m - 1] } else { 0.0 };
            *slot = keep + shift;
        }
        row = next;
    }
    row
}

/// `Li_{−n}(z) = Σ_{j≥1} jⁿ zʲ = z Σ_m A(n, m) zᵐ / (1 − z)^{n+1}`.
fn polylog_neg(n: usize, z: Complex64) -> Complex64 {
    let poly = eulerian_row(n)
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    z * poly / (1.0 - z).powi(n as i32 + 1)
}

impl Seed for HolomorphicSeed {
    fn dy(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        let w = Complex64::new(-y, x);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let value = match &self.kind {
            SeedKind::Pole1 => {
                if w.norm() == 0.0 {
                    return domain("pole seed is singular at the origin");
                }
                // dⁿ/dwⁿ (1/w) = (−1)ⁿ n!/w^{n+1}; the signs cancel.
                let fact: f64 = (1..=n).map(|m| m as f64).product();
                fact / w.powi(n as i32 + 1)
            }
            SeedKind::Root => {
                if w.norm() == 0.0 {
                    return domain("root seed is singular at the origin");
                }
                // dⁿ/dwⁿ √2 w^{1/2} = √2 (1/2)(−1/2)⋯(3/2 − n) w^{1/2 − n}
                let falling: f64 = (0..n).map(|m| 0.5 - m as f64).product();
                sign * 2f64.sqrt() * falling * w.powf(0.5 - n as f64)
            }
            SeedKind::TolstovMap => {
                let z = Complex64::from_polar(y.exp(), x);
                if (1.0 - z).norm() < 1e-300 {
                    return domain("Tolstov seed is singular at z = 1");
                }
                // ∂_y acts as z d/dz on z/(1 − z).
                -polylog_neg(n, z)
            }
            SeedKind::Custom(rule) => sign * rule(n, w),
        };
        let v = self.part.of(value);
        if !v.is_finite() {
            return domain(format!("seed derivative of order {n} is not finite at ({x}, {y})"));
        }
        Ok(v)
    }
}

/// Order of the truncated outer series (closed forms exist up to 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SeriesOrder(u8);

impl SeriesOrder {
    pub const MAX: u8 = 2;

    pub fn new(order: usize) -> Result<Self> {
        if order > Self::MAX as usize {
            return domain(format!("series order must be at most {}, got {order}", Self::MAX));
        }
        Ok(Self(order as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

pub fn u0<S: Seed + ?Sized>(seed: &S, x: f64, y: f64) -> Result<f64> {
    seed.dy(0, x, y)
}

/// `U₁ = ½[F₂/2 − R₂/2 − (y + 1)F₃]`, with `F_n = ∂ⁿ_y U₀(x, y)` and
/// `R_n = (∂ⁿ_y U₀)(x, −y − 2)`.
pub fn u1<S: Seed + ?Sized>(seed: &S, x: f64, y: f64) -> Result<f64> {
    Ok(term(seed, 1, x, y)?.0)
}

/// `U₂ = ¼[3F₄/4 − 3R₄/4 − (y + 1)(F₅ + R₅/2) + ((y + 1)²/2)F₆]`.
pub fn u2<S: Seed + ?Sized>(seed: &S, x: f64, y: f64) -> Result<f64> {
    Ok(term(seed, 2, x, y)?.0)
}

/// `(U_n, ∂_y U_n)` for `n ≤ 2`.
pub fn term<S: Seed + ?Sized>(seed: &S, n: usize, x: f64, y: f64) -> Result<(f64, f64)> {
    let t = y + 1.0;
    let yr = -y - 2.0;
    let f = |m| seed.dy(m, x, y);
    let r = |m| seed.dy(m, x, yr);
    match n {
        0 => Ok((f(0)?, f(1)?)),
        1 => {
            let (f2, f3, f4) = (f(2)?, f(3)?, f(4)?);
            let (r2, r3) = (r(2)?, r(3)?);
            let value = 0.5 * (0.5 * f2 - 0.5 * r2 - t * f3);
            let dy = 0.5 * (-0.5 * f3 + 0.5 * r3 - t * f4);
            Ok((value, dy))
        }
        2 => {
            let (f4, f5, f6, f7) = (f(4)?, f(5)?, f(6)?, f(7)?);
            let (r4, r5, r6) = (r(4)?, r(5)?, r(6)?);
            let value = 0.25 * (0.75 * f4 - 0.75 * r4 - t * (f5 + 0.5 * r5) + 0.5 * t * t * f6);
            let dy = 0.25 * (-0.25 * f5 + 0.25 * r5 + 0.5 * t * r6 + 0.5 * t * t * f7);
            Ok((value, dy))
        }
        _ => domain(format!("closed-form series terms exist up to order 2, got {n}")),
    }
}

/// `Σ_{n ≤ order} ε^{2n} U_n(x, y)`.
pub fn series_eval<S: Seed + ?Sized>(seed: &S, x: f64, y: f64, epsilon: f64, order: SeriesOrder) -> Result<f64> {
    let e2 = epsilon * epsilon;
    (0..=order.get()).try_fold(0.0, |acc, n| Ok(acc + e2.powi(n as i32) * term(seed, n, x, y)?.0))
}

/// The coefficient of `ε^{2n}` in the exact evolution of `state` to height `y`,
/// mode by mode. For `n = 0` this is the evolution of the Laplace limit.
pub fn series_coeff_spectral(state: &SineSeriesState, n: usize, y: f64) -> Result<SineSeriesState> {
    let s = y - state.y();
    let l = state.half_length();
    let modes = state
        .modes()
        .iter()
        .map(|m| {
            let t = propagator_taylor(n, state.wavenumber(m.n), s);
            Mode {
                n: m.n,
                a: t[0][0] * m.a + t[0][1] * m.b,
                b: t[1][0] * m.a + t[1][1] * m.b,
            }
        })
        .collect();
    SineSeriesState::from_modes(l, y, modes)
}

/// Exact sine-basis state of the Tolstov data on `[−π, π]` at `y = −1`,
/// keeping the harmonics `sin jx`, `j ≤ harmonics` (`sin jx = (−1)ʲ φ_{2j}`).
pub fn tolstov_exact_state(harmonics: usize) -> Result<SineSeriesState> {
    SineSeriesState::from_modes(PI, -1.0, (1..=harmonics).map(tolstov_mode).collect())
}

fn tolstov_mode(j: usize) -> Mode {
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let e = (-(j as f64)).exp();
    Mode {
        n: 2 * j,
        a: -sign * e,
        b: -sign * j as f64 * e,
    }
}

/// The Tolstov data evolved to height `y`, mode by mode.
///
/// High harmonics start below the pruning floor yet grow by up to `e^{j(y+1)}`,
/// so they are propagated before a state is formed.
pub fn tolstov_evolved_state(harmonics: usize, epsilon: f64, y: f64) -> Result<SineSeriesState> {
    if !(y >= -1.0) {
        return domain(format!("the Tolstov data sit at y = -1, got y = {y}"));
    }
    let modes = (1..=harmonics)
        .map(|j| {
            let m = tolstov_mode(j);
            let state = ModeState { a: m.a, b: m.b, k: j as f64 };
            propagate_mode(state, epsilon, y + 1.0, DEGENERATE_TOL).map(|s| Mode { n: m.n, a: s.a, b: s.b })
        })
        .collect::<Result<Vec<_>>>()?;
    SineSeriesState::from_modes(PI, y, modes)
}
