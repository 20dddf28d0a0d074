//! Exact solver for the hinged rod on `[−L, L]`.
//!
//! Solutions are expanded in `φ_n(x) = sin(λ_n (x + L))` with
//! `λ_n = nπ/(2L)`. Each basis function satisfies `φ = φ'' = 0` at both
//! ends, so every truncated expansion obeys the hinged boundary conditions
//! exactly. Each mode is advanced with [`crate::dispersion::propagate_mode`].

use std::f64::consts::PI;
use std::ops::Add;

use crate::dispersion::{self, ModeState, DEGENERATE_TOL};
use crate::error::{domain, Result};
use crate::quadrature;

/// Default number of modes.
pub const DEFAULT_MODES: usize = 400;

/// Coefficients with both magnitudes below this are dropped.
pub const PRUNE_BELOW: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

/// Per-mode displacement and velocity coefficients at a given `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeriesState {
    half_length: f64,
    y: f64,
    modes: Vec<Mode>,
}

impl SineSeriesState {
    /// Builds a state from explicit modes. Indices must be positive and
    /// strictly increasing; coefficients must be finite.
    pub fn from_modes(half_length: f64, y: f64, modes: Vec<Mode>) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return domain(format!("half-length must be positive, got {half_length}"));
        }
        let mut last = 0;
        for m in &modes {
            if m.n <= last {
                return domain("mode indices must be positive and strictly increasing");
            }
            if !(m.a.is_finite() && m.b.is_finite()) {
                return domain(format!("non-finite coefficient in mode {}", m.n));
            }
            last = m.n;
        }
        Ok(Self {
            half_length,
            y,
            modes: modes.into_iter().filter(|m| !is_negligible(m)).collect(),
        })
    }

    pub fn zero(half_length: f64, y: f64) -> Result<Self> {
        Self::from_modes(half_length, y, Vec::new())
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// `λ_n = nπ/(2L)`.
    pub fn wavenumber(&self, n: usize) -> f64 {
        wavenumber(n, self.half_length)
    }

    pub fn with_y(mut self, y: f64) -> Self {
        self.y = y;
        self
    }

    /// Multiplies all coefficients by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            half_length: self.half_length,
            y: self.y,
            modes: self
                .modes
                .iter()
                .map(|m| Mode {
                    n: m.n,
                    a: m.a * factor,
                    b: m.b * factor,
                })
                .filter(|m| !is_negligible(m))
                .collect(),
        }
    }

    /// Advances every mode by `dy`.
    pub fn evolve(&self, epsilon: f64, dy: f64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let k = self.wavenumber(m.n);
                dispersion::propagate_mode(ModeState { a: m.a, b: m.b, k }, epsilon, dy, DEGENERATE_TOL)
                    .map(|s| Mode { n: m.n, a: s.a, b: s.b })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            half_length: self.half_length,
            y: self.y + dy,
            modes,
        })
    }

    /// `u(x) = Σ a_n φ_n(x)` at each point.
    pub fn synthesize(&self, xs: &[f64]) -> Result<Vec<f64>> {
        self.sum_at(xs, |m| m.a, 0)
    }

    /// `u_y(x) = Σ b_n φ_n(x)`.
    pub fn synthesize_velocity(&self, xs: &[f64]) -> Result<Vec<f64>> {
        self.sum_at(xs, |m| m.b, 0)
    }

    /// `u_xx(x) = −Σ λ_n² a_n φ_n(x)`.
    pub fn synthesize_curvature(&self, xs: &[f64]) -> Result<Vec<f64>> {
        self.sum_at(xs, |m| m.a, 2)
    }

    fn sum_at(&self, xs: &[f64], coef: impl Fn(&Mode) -> f64, x_derivs: u32) -> Result<Vec<f64>> {
        let l = self.half_length;
        xs.iter()
            .map(|&x| {
                if !(x.abs() <= l * (1.0 + 1e-12)) {
                    return domain(format!("x = {x} lies outside [-{l}, {l}]"));
                }
                let xi = (x + l).clamp(0.0, 2.0 * l);
                Ok(self
                    .modes
                    .iter()
                    .map(|m| {
                        let k = self.wavenumber(m.n);
                        let phase = k * xi;
                        let basis = match x_derivs {
                            0 => phase.sin(),
                            2 => -k * k * phase.sin(),
                            _ => unreachable!("only u and u_xx are synthesised"),
                        };
                        coef(m) * basis
                    })
                    .sum())
            })
            .collect()
    }

    /// `E = Σ [b_n² + (ε²λ_n⁴ − λ_n²) a_n²]`, conserved by [`Self::evolve`].
    pub fn energy(&self, epsilon: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let k = self.wavenumber(m.n);
                m.b * m.b - dispersion::omega_squared(k, epsilon) * m.a * m.a
            })
            .sum()
    }
}

impl Add for &SineSeriesState {
    type Output = SineSeriesState;

    fn add(self, rhs: Self) -> SineSeriesState {
        assert_eq!(self.half_length, rhs.half_length, "mismatched intervals");
        let mut modes: Vec<Mode> = Vec::with_capacity(self.modes.len() + rhs.modes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.modes.len() || j < rhs.modes.len() {
            let take = match (self.modes.get(i), rhs.modes.get(j)) {
                (Some(p), Some(q)) if p.n == q.n => {
                    i += 1;
                    j += 1;
                    Mode { n: p.n, a: p.a + q.a, b: p.b + q.b }
                }
                (Some(p), Some(q)) if p.n < q.n => {
                    i += 1;
                    *p
                }
                (Some(p), None) => {
                    i += 1;
                    *p
                }
                (_, Some(q)) => {
                    j += 1;
                    *q
                }
                (None, None) => unreachable!(),
            };
            modes.push(take);
        }
        SineSeriesState {
            half_length: self.half_length,
            y: self.y,
            modes: modes.into_iter().filter(|m| !is_negligible(m)).collect(),
        }
    }
}

fn is_negligible(m: &Mode) -> bool {
    m.a.abs() < PRUNE_BELOW && m.b.abs() < PRUNE_BELOW
}

pub fn wavenumber(n: usize, half_length: f64) -> f64 {
    n as f64 * PI / (2.0 * half_length)
}

/// Projects initial displacement `f` and velocity `g` onto the first
/// `n_modes` basis functions: `a_n = (1/L) ∫ f φ_n dx`, likewise `b_n`.
/// The returned state sits at `y`.
pub fn analyze<F, G>(f: F, g: G, half_length: f64, n_modes: usize, y: f64) -> Result<SineSeriesState>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if n_modes == 0 {
        return domain("at least one mode is required");
    }
    if !(half_length > 0.0 && half_length.is_finite()) {
        return domain(format!("half-length must be positive, got {half_length}"));
    }
    let l = half_length;
    let a = quadrature::sine_coefficients(f, -l, l, n_modes, 1e-13);
    let b = quadrature::sine_coefficients(g, -l, l, n_modes, 1e-13);
    let modes = a
        .into_iter()
        .zip(b)
        .enumerate()
        .map(|(i, (a, b))| Mode { n: i + 1, a, b })
        .collect();
    SineSeriesState::from_modes(l, y, modes)
}

/// Displacement of the rod started from the Tolstov data at `y = −1` on `[−π, π]`:
/// `u = −e sin x / (1 − 2e cos x + e²)` with `e = exp(−1)`.
pub fn tolstov_displacement(x: f64) -> f64 {
    let e = (-1.0f64).exp();
    -e * x.sin() / (1.0 - 2.0 * e * x.cos() + e * e)
}

/// Velocity of the Tolstov data at `y = −1`, the `y`-derivative of
/// `−Σ e^{jy} sin jx`: `−(e − e³) sin x / (1 − 2e cos x + e²)²`.
pub fn tolstov_velocity(x: f64) -> f64 {
    let e = (-1.0f64).exp();
    let d = 1.0 - 2.0 * e * x.cos() + e * e;
    -(e - e.powi(3)) * x.sin() / (d * d)
}

/// Tolstov initial state on `[−π, π]` at `y = −1`.
pub fn tolstov_state(n_modes: usize) -> Result<SineSeriesState> {
    analyze(tolstov_displacement, tolstov_velocity, PI, n_modes, -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn single(n: usize, a: f64, b: f64, l: f64) -> SineSeriesState {
        SineSeriesState::from_modes(l, 0.0, vec![Mode { n, a, b }]).unwrap()
    }

    #[test]
    fn analyze_single_mode() {
        let l = 1.3;
        let s = analyze(|x| (PI * (x + l) / (2.0 * l)).sin(), |_| 0.0, l, 12, 0.0).unwrap();
        for m in s.modes() {
            let expect = if m.n == 1 { 1.0 } else { 0.0 };
            assert!((m.a - expect).abs() <= 1e-10, "mode {}: {}", m.n, m.a);
            assert!(m.b.abs() <= 1e-10);
        }
    }

    #[test]
    fn analyze_zero_data_and_errors() {
        let s = analyze(|_| 0.0, |_| 0.0, 2.0, 10, 0.0).unwrap();
        assert!(s.modes().is_empty());
        assert!(analyze(|_| 0.0, |_| 0.0, 2.0, 0, 0.0).is_err());
    }

    #[test]
    fn tolstov_coefficients_match_closed_form() {
        // sin(jx) = (−1)^j φ_{2j}(x) on L = π; its coefficient is −e^{−j}.
        let s = tolstov_state(60).unwrap();
        for m in s.modes() {
            if m.n % 2 == 0 {
                let j = m.n / 2;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let expect_a = -(-(j as f64)).exp();
                assert!((sign * m.a - expect_a).abs() < 1e-8, "j={j}");
                assert!((sign * m.b - j as f64 * expect_a).abs() < 1e-8, "j={j}");
            } else {
                assert!(m.a.abs() < 1e-12 && m.b.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn evolve_examples() {
        // λ = 1 on L = π/2 for n = 1.
        let s = single(1, 1.0, 0.0, PI / 2.0).evolve(0.0, 1.0).unwrap();
        assert_relative_eq!(s.modes()[0].a, 1f64.cosh(), epsilon = 1e-14);
        assert_relative_eq!(s.y(), 1.0);
    }

    #[test]
    fn synthesize_examples() {
        let l = 2.0;
        let zero = SineSeriesState::zero(l, 0.0).unwrap();
        assert_eq!(zero.synthesize(&[0.3, -1.0]).unwrap(), vec![0.0, 0.0]);
        let s = single(1, 1.0, 0.0, l);
        assert_relative_eq!(s.synthesize(&[0.0]).unwrap()[0], 1.0, epsilon = 1e-15);
        assert!(s.synthesize(&[2.5]).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(SineSeriesState::zero(1.0, 0.0).unwrap().energy(0.1), 0.0);
        // λ_1 = 1 on L = π/2, ε = 1 puts the mode on the threshold.
        assert!(single(1, 1.0, 0.0, PI / 2.0).energy(1.0).abs() < 1e-15);
    }

    fn random_state(coeffs: &[(f64, f64)], l: f64) -> SineSeriesState {
        let modes = coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Mode { n: i + 1, a, b })
            .collect();
        SineSeriesState::from_modes(l, -1.0, modes).unwrap()
    }

    /// RK4 on every mode: the independent oracle for energy conservation.
    fn rk4_energy(state: &SineSeriesState, eps: f64, dy: f64) -> f64 {
        let steps = 4000;
        let h = dy / steps as f64;
        state
            .modes()
            .iter()
            .map(|m| {
                let w2 = dispersion::omega_squared(state.wavenumber(m.n), eps);
                let (mut a, mut b) = (m.a, m.b);
                for _ in 0..steps {
                    let k1 = (b, w2 * a);
                    let k2 = (b + 0.5 * h * k1.1, w2 * (a + 0.5 * h * k1.0));
                    let k3 = (b + 0.5 * h * k2.1, w2 * (a + 0.5 * h * k2.0));
                    let k4 = (b + h * k3.1, w2 * (a + h * k3.0));
                    a += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                    b += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                }
                b * b - w2 * a * a
            })
            .sum()
    }

    #[test]
    fn energy_conserved_against_small_step_integration() {
        let coeffs: Vec<(f64, f64)> = (0..10)
            .map(|i| ((i as f64 * 0.37).sin(), (i as f64 * 1.91).cos()))
            .collect();
        let s = random_state(&coeffs, 1.0);
        let e0 = s.energy(0.1);
        let evolved = s.evolve(0.1, 0.7).unwrap();
        let e1 = evolved.energy(0.1);
        let oracle = rk4_energy(&s, 0.1, 0.7);
        assert!((e1 - e0).abs() <= 1e-8 * e0.abs());
        assert!((oracle - e0).abs() <= 1e-6 * e0.abs());
    }

    #[test]
    fn boundary_conditions_hold_identically() {
        let coeffs: Vec<(f64, f64)> = (0..40).map(|i| (1.0 / (1.0 + i as f64), 0.0)).collect();
        let s = random_state(&coeffs, 2.5);
        for x in [-2.5, 2.5] {
            assert!(s.synthesize(&[x]).unwrap()[0].abs() <= 1e-12);
            assert!(s.synthesize_curvature(&[x]).unwrap()[0].abs() <= 1e-12 * 40.0f64.powi(2));
        }
    }

    #[test]
    fn laplace_limit_tolstov_synthesis() {
        // With J harmonics the truncation error at y = −0.5 is bounded by Σ_{j>J} e^{−j/2}.
        let n_modes = 40;
        let harmonics = n_modes / 2;
        let s = tolstov_state(n_modes).unwrap().evolve(0.0, 0.5).unwrap();
        let tail: f64 = (harmonics + 1..400).map(|j| (-(j as f64) / 2.0).exp()).sum();
        let xs: Vec<f64> = (0..=40).map(|i| -PI + 2.0 * PI * i as f64 / 40.0).collect();
        let got = s.synthesize(&xs).unwrap();
        let ey = (-0.5f64).exp();
        for (x, u) in xs.iter().zip(got) {
            let exact = -ey * x.sin() / (1.0 - 2.0 * ey * x.cos() + ey * ey);
            assert!((u - exact).abs() <= tail + 1e-12, "x={x}: {u} vs {exact}");
        }
    }

    #[test]
    fn reversibility() {
        let s = tolstov_state(60).unwrap();
        let back = s.evolve(0.1, 0.8).unwrap().evolve(0.1, -0.8).unwrap();
        for (p, q) in s.modes().iter().zip(back.modes()) {
            assert!((p.a - q.a).abs() < 1e-10 && (p.b - q.b).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn energy_invariant(coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10),
                            dy in -1.0f64..1.0) {
            let s = random_state(&coeffs, 1.0);
            let e0 = s.energy(0.1);
            let e1 = s.evolve(0.1, dy).unwrap().energy(0.1);
            prop_assert!((e1 - e0).abs() <= 1e-8 * (1.0 + e0.abs()));
        }

        #[test]
        fn linearity(c1 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
                     c2 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
                     dy in -1.0f64..1.0) {
            let (s1, s2) = (random_state(&c1, 1.5), random_state(&c2, 1.5));
            let sum_first = (&s1 + &s2).evolve(0.2, dy).unwrap();
            let sum_after = &s1.evolve(0.2, dy).unwrap() + &s2.evolve(0.2, dy).unwrap();
            for (p, q) in sum_first.modes().iter().zip(sum_after.modes()) {
                prop_assert_eq!(p.n, q.n);
                prop_assert!((p.a - q.a).abs() <= 1e-12 * (1.0 + p.a.abs()));
                prop_assert!((p.b - q.b).abs() <= 1e-12 * (1.0 + p.b.abs()));
            }
        }
    }
}
