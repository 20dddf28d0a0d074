//! Dispersion relation of the perturbed Laplace equation
//! `u_xx + u_yy + ε² u_xxxx = 0` and the exact per-mode propagator.
//!
//! A Fourier mode with wavenumber `k` obeys `û_yy = ω² û` with
//! `ω² = k² − ε²k⁴`. Modes below the Euler threshold `εk = 1` grow
//! exponentially in `y`; modes above it oscillate with bounded amplitude.

use crate::error::{domain, Error, Result};

/// Relative tolerance `|ω²| ≤ tol·k²` below which a mode is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Largest admissible growth exponent `ω·|dy|` before reporting saturation.
pub const MAX_EXPONENT: f64 = 700.0;

/// Physical constants of the rod: compressive force, linear density and
/// bending stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub force: f64,
    pub density: f64,
    pub stiffness: f64,
}

/// Dimensionless rod parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodParams {
    epsilon: f64,
    half_length: f64,
    physical: Option<PhysicalConstants>,
}

impl RodParams {
    pub fn new(epsilon: f64, half_length: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return domain(format!("half-length must be positive, got {half_length}"));
        }
        Ok(Self {
            epsilon,
            half_length,
            physical: None,
        })
    }

    /// Derives ε = (G/P)^{1/2} from the physical constants.
    pub fn from_physical(constants: PhysicalConstants, half_length: f64) -> Result<Self> {
        let (_, epsilon) = scale_time(constants.force, constants.density, constants.stiffness, 0.0)?;
        let mut params = Self::new(epsilon, half_length)?;
        params.physical = Some(constants);
        Ok(params)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn physical(&self) -> Option<PhysicalConstants> {
        self.physical
    }
}

/// Regime of a single Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeClass {
    /// `εk < 1`: exponential growth in `y`.
    Growing,
    /// `εk = 1` within tolerance: linear in `y`.
    Degenerate,
    /// `εk > 1`: bounded oscillation in `y`.
    Oscillatory,
}

/// Displacement and `y`-derivative coefficients of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

/// Rescales physical time to the Laplace-like coordinate.
///
/// Returns `(y, ε)` with `y = (P/ρ)^{1/2} t` and `ε = (G/P)^{1/2}`.
pub fn scale_time(force: f64, density: f64, stiffness: f64, t: f64) -> Result<(f64, f64)> {
    for (name, v) in [("P", force), ("rho", density), ("G", stiffness)] {
        if !(v > 0.0 && v.is_finite()) {
            return domain(format!("{name} must be positive, got {v}"));
        }
    }
    Ok(((force / density).sqrt() * t, (stiffness / force).sqrt()))
}

/// `ω² = k² − ε²k⁴`.
pub fn omega_squared(k: f64, epsilon: f64) -> f64 {
    let k2 = k * k;
    k2 * (1.0 - epsilon * epsilon * k2)
}

pub fn classify(k: f64, epsilon: f64, tol: f64) -> ModeClass {
    let w2 = omega_squared(k, epsilon);
    if w2.abs() <= tol * k * k {
        ModeClass::Degenerate
    } else if w2 > 0.0 {
        ModeClass::Growing
    } else {
        ModeClass::Oscillatory
    }
}

/// The 2×2 matrix advancing `(a, b)` by `dy`.
pub fn propagator_matrix(k: f64, epsilon: f64, dy: f64, tol: f64) -> Result<[[f64; 2]; 2]> {
    let w2 = omega_squared(k, epsilon);
    Ok(match classify(k, epsilon, tol) {
        ModeClass::Degenerate => [[1.0, dy], [0.0, 1.0]],
        ModeClass::Growing => {
            let w = w2.sqrt();
            let exponent = w * dy.abs();
            if exponent > MAX_EXPONENT {
                return Err(Error::Saturation {
                    exponent,
                    limit: MAX_EXPONENT,
                });
            }
            let (s, c) = ((w * dy).sinh(), (w * dy).cosh());
            [[c, s / w], [w * s, c]]
        }
        ModeClass::Oscillatory => {
            let mu = (-w2).sqrt();
            let (s, c) = (mu * dy).sin_cos();
            [[c, s / mu], [-mu * s, c]]
        }
    })
}

/// Advances one mode by `dy` with the exact solution of `û_yy = ω² û`.
pub fn propagate_mode(state: ModeState, epsilon: f64, dy: f64, tol: f64) -> Result<ModeState> {
    if !dy.is_finite() {
        return domain("dy must be finite");
    }
    let m = propagator_matrix(state.k, epsilon, dy, tol)?;
    Ok(ModeState {
        a: m[0][0] * state.a + m[0][1] * state.b,
        b: m[1][0] * state.a + m[1][1] * state.b,
        k: state.k,
    })
}

/// Wavenumber `1/(√2 ε)` of maximal growth and the rate `1/(2ε)` attained there.
pub fn fastest_growing_mode(epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    Ok((1.0 / (std::f64::consts::SQRT_2 * epsilon), 0.5 / epsilon))
}

/// ε of the linearised dispersive geometric-optics system: `μ/√α(1)`.
pub fn nls_epsilon(alpha1: f64, mu: f64) -> Result<f64> {
    if !(alpha1 > 0.0) {
        return domain(format!("alpha(1) must be positive, got {alpha1}"));
    }
    if !(mu > 0.0) {
        return domain(format!("mu must be positive, got {mu}"));
    }
    Ok(mu / alpha1.sqrt())
}

/// Coefficient of `ε^{2n}` in the Taylor expansion of the propagator matrix
/// for wavenumber `k` over a step `s`.
///
/// The matrix entries `cosh(ωs)`, `sinh(ωs)/ω` and `ω sinh(ωs)` are entire in
/// `ω²`, so the coefficient is `(−k⁴)ⁿ/n! · ∂ⁿ/∂(ω²)ⁿ` of their power series
/// evaluated at `ω² = k²`.
pub fn propagator_taylor(n: usize, k: f64, s: f64) -> [[f64; 2]; 2] {
    let w2 = k * k;
    // cosh(ωs) = Σ_j (ω²)^j s^{2j}/(2j)!
    let c = series_derivative(n, w2, s, |j| Some((2 * j, 2 * j)));
    // sinh(ωs)/ω = Σ_j (ω²)^j s^{2j+1}/(2j+1)!
    let sw = series_derivative(n, w2, s, |j| Some((2 * j + 1, 2 * j + 1)));
    // ω sinh(ωs) = Σ_{j≥1} (ω²)^j s^{2j-1}/(2j-1)!
    let ws = series_derivative(n, w2, s, |j| (j > 0).then(|| (2 * j - 1, 2 * j - 1)));
    let scale = (-k.powi(4)).powi(n as i32) / statrs::function::factorial::factorial(n as u64);
    [[scale * c, scale * sw], [scale * ws, scale * c]]
}

/// `∂ⁿ/∂zⁿ Σ_j c_j z^j` at `z > 0` for coefficients `c_j = s^p / q!` with
/// `(p, q) = shape(j)` (or `c_j = 0` when `shape` returns `None`).
fn series_derivative(
    n: usize,
    z: f64,
    s: f64,
    shape: impl Fn(usize) -> Option<(usize, usize)>,
) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if s == 0.0 {
        // Only the s^0 coefficient survives.
        return match shape(n) {
            Some((0, q)) => {
                let falling: f64 = (1..=n).map(|m| m as f64).product();
                falling / statrs::function::factorial::factorial(q as u64)
            }
            _ => 0.0,
        };
    }
    let ln_s = s.abs().ln();
    let ln_z = z.ln();
    let mut sum = 0.0;
    let min_terms = n + 8 + 2 * (z.sqrt() * s.abs()) as usize;
    for j in n.. {
        if let Some((p, q)) = shape(j) {
            let ln_falling: f64 = ((j - n + 1)..=j).map(|m| (m as f64).ln()).sum();
            let ln_z_part = if j == n { 0.0 } else { (j - n) as f64 * ln_z };
            let ln_term = ln_falling + p as f64 * ln_s + ln_z_part - ln_gamma(q as f64 + 1.0);
            let sign = if s < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
            let term = sign * ln_term.exp();
            sum += term;
            if j > min_terms && term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn scale_time_examples() {
        assert_eq!(scale_time(1.0, 1.0, 1.0, 2.0).unwrap(), (2.0, 1.0));
        let (y, e) = scale_time(100.0, 1.0, 1.0, 0.1).unwrap();
        assert_relative_eq!(y, 1.0, epsilon = 1e-15);
        assert_relative_eq!(e, 0.1, epsilon = 1e-15);
        let (y, e) = scale_time(4.0, 9.0, 1.0, 3.0).unwrap();
        assert_relative_eq!(y, 2.0, epsilon = 1e-15);
        assert_relative_eq!(e, 0.5, epsilon = 1e-15);
        assert!(matches!(scale_time(0.0, 1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(scale_time(1.0, -1.0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rod_params_invariants() {
        let p = RodParams::from_physical(
            PhysicalConstants {
                force: 400.0,
                density: 2.0,
                stiffness: 4.0,
            },
            1.0,
        )
        .unwrap();
        assert!((p.epsilon() - (4.0f64 / 400.0).sqrt()).abs() <= 1e-12 * p.epsilon());
        assert!(RodParams::new(0.0, 1.0).is_err());
        assert!(RodParams::new(0.1, -1.0).is_err());
    }

    #[test]
    fn omega_squared_examples() {
        assert_eq!(omega_squared(1.0, 0.0), 1.0);
        for eps in [0.05, 0.1, 0.3] {
            assert!(omega_squared(1.0 / eps, eps).abs() < 1e-9);
        }
        let k = 1.0 / (2f64.sqrt() * 0.1);
        assert_relative_eq!(omega_squared(k, 0.1).sqrt(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(1.0, 0.1, DEGENERATE_TOL), ModeClass::Growing);
        assert_eq!(classify(10.0, 0.1, DEGENERATE_TOL), ModeClass::Degenerate);
        assert_eq!(classify(20.0, 0.1, DEGENERATE_TOL), ModeClass::Oscillatory);
    }

    #[test]
    fn propagate_examples() {
        let s = propagate_mode(ModeState { a: 1.0, b: 1.0, k: 1.0 }, 0.0, 1.0, DEGENERATE_TOL).unwrap();
        assert_relative_eq!(s.a, std::f64::consts::E, epsilon = 1e-14);

        let eps = 0.1;
        let s = propagate_mode(ModeState { a: 1.0, b: 0.0, k: 1.0 / eps }, eps, 5.0, DEGENERATE_TOL)
            .unwrap();
        assert_eq!((s.a, s.b), (1.0, 0.0));
    }

    /// Classical RK4 on a'' = ω² a, the brute-force oracle for the closed forms.
    fn rk4(a: f64, b: f64, w2: f64, dy: f64, steps: usize) -> (f64, f64) {
        let h = dy / steps as f64;
        let (mut a, mut b) = (a, b);
        for _ in 0..steps {
            let f = |a: f64, b: f64| (b, w2 * a);
            let k1 = f(a, b);
            let k2 = f(a + 0.5 * h * k1.0, b + 0.5 * h * k1.1);
            let k3 = f(a + 0.5 * h * k2.0, b + 0.5 * h * k2.1);
            let k4 = f(a + h * k3.0, b + h * k3.1);
            a += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            b += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (a, b)
    }

    #[test]
    fn oscillatory_circle_invariant_matches_small_step_integration() {
        let (eps, k): (f64, f64) = (0.1, 20.0);
        let mu = (eps * eps * k.powi(4) - k * k).sqrt();
        for dy in [0.013, 0.5, 1.7, 3.1] {
            let s = propagate_mode(ModeState { a: 1.0, b: 0.0, k }, eps, dy, DEGENERATE_TOL).unwrap();
            let (ra, rb) = rk4(1.0, 0.0, omega_squared(k, eps), dy, 20_000);
            assert!((s.a - ra).abs() < 1e-9 && (s.b - rb).abs() < 1e-7);
            assert_relative_eq!(s.a * s.a + (s.b / mu).powi(2), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn growing_regime_matches_small_step_integration() {
        let (eps, k, dy) = (0.1, 3.0, 0.8);
        let s = propagate_mode(ModeState { a: 0.3, b: -1.2, k }, eps, dy, DEGENERATE_TOL).unwrap();
        let (ra, rb) = rk4(0.3, -1.2, omega_squared(k, eps), dy, 10_000);
        assert_relative_eq!(s.a, ra, epsilon = 1e-10);
        assert_relative_eq!(s.b, rb, epsilon = 1e-10);
    }

    #[test]
    fn saturation_is_an_error() {
        let r = propagate_mode(ModeState { a: 1.0, b: 0.0, k: 1000.0 }, 0.0, 1.0, DEGENERATE_TOL);
        assert!(matches!(r, Err(Error::Saturation { .. })));
    }

    #[test]
    fn fastest_mode_examples() {
        let (k, r) = fastest_growing_mode(0.1).unwrap();
        assert_relative_eq!(k, 7.0710678118654755, epsilon = 1e-12);
        assert_relative_eq!(r, 5.0, epsilon = 1e-15);
        let (k, r) = fastest_growing_mode(1.0).unwrap();
        assert_relative_eq!(k, 0.7071067811865476, epsilon = 1e-12);
        assert_relative_eq!(r, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fastest_mode_matches_grid_search() {
        let eps = 0.05;
        let (_, rate) = fastest_growing_mode(eps).unwrap();
        let best = (0..=200_000)
            .map(|i| i as f64 * 1e-4)
            .map(|k| omega_squared(k, eps).max(0.0).sqrt())
            .fold(0.0, f64::max);
        assert!((best - rate).abs() < 1e-6);
    }

    #[test]
    fn nls_epsilon_examples() {
        assert_relative_eq!(nls_epsilon(1.0, 0.1).unwrap(), 0.1);
        assert_relative_eq!(nls_epsilon(4.0, 0.2).unwrap(), 0.1);
        assert_relative_eq!(nls_epsilon(2.0, 0.1).unwrap(), 0.070710678118654752, epsilon = 1e-14);
        assert!(nls_epsilon(0.0, 0.1).is_err());
        assert!(nls_epsilon(-1.0, 0.1).is_err());
    }

    #[test]
    fn continuity_at_threshold() {
        let eps = 0.1;
        let state = ModeState { a: 1.0, b: 0.5, k: 10.0 };
        let deg = propagate_mode(state, eps, 0.7, 1.0).unwrap();
        for delta in [1e-6, -1e-6] {
            let k = (1.0 + delta) / eps;
            let s = propagate_mode(ModeState { k, ..state }, eps, 0.7, DEGENERATE_TOL).unwrap();
            // Departure from the linear branch is O(|ω²| dy²).
            let w2 = omega_squared(k, eps).abs();
            assert!(w2 < 3e-6 * k * k);
            let bound = w2 * 0.49 * (1.0 + state.a.abs() + state.b.abs());
            assert!((s.a - deg.a).abs() <= bound, "{} vs {}", s.a, deg.a);
            assert!((s.b - deg.b).abs() <= bound);
        }
    }

    #[test]
    fn taylor_coefficients_match_divided_differences() {
        // Divided differences in ε² at ε ∈ {1e-3, 2e-3}, Richardson-combined.
        let (k, s) = (2.5, 0.6);
        let exact = |eps: f64| propagator_matrix(k, eps, s, DEGENERATE_TOL).unwrap();
        let m0 = propagator_taylor(0, k, s);
        let m1 = propagator_taylor(1, k, s);
        let e0 = exact(0.0);
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(m0[i][j], e0[i][j], epsilon = 1e-13);
                let d = |eps: f64| (exact(eps)[i][j] - e0[i][j]) / (eps * eps);
                let (d1, d2) = (d(1e-3), d(2e-3));
                let richardson = (4.0 * d1 - d2) / 3.0;
                assert!(
                    (richardson - m1[i][j]).abs() < 1e-4 * m1[i][j].abs().max(1.0),
                    "entry {i}{j}: {richardson} vs {}",
                    m1[i][j]
                );
            }
        }
        // Closed form of the first coefficient for cosh(ωs): −k⁴ s sinh(ks)/(2k).
        let expect = -k.powi(4) * s * (k * s).sinh() / (2.0 * k);
        assert_relative_eq!(m1[0][0], expect, epsilon = 1e-13);
    }

    proptest! {
        #[test]
        fn wronskian_is_one(k in 0.01f64..60.0, eps in 0.0f64..0.3, dy in -3.0f64..3.0) {
            let m = propagator_matrix(k, eps, dy, DEGENERATE_TOL).unwrap();
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let scale = (m[0][0] * m[1][1]).abs().max(1.0);
            prop_assert!((det - 1.0).abs() <= 1e-12 * scale);
        }

        #[test]
        fn semigroup(k in 0.1f64..40.0, eps in 0.0f64..0.2, d1 in -1.0f64..1.0, d2 in -1.0f64..1.0) {
            let s0 = ModeState { a: 0.7, b: -0.3, k };
            let two = propagate_mode(propagate_mode(s0, eps, d1, DEGENERATE_TOL).unwrap(), eps, d2, DEGENERATE_TOL).unwrap();
            let one = propagate_mode(s0, eps, d1 + d2, DEGENERATE_TOL).unwrap();
            // Composition error is relative to the size of the factors.
            let norm = |m: [[f64; 2]; 2]| m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let scale = norm(propagator_matrix(k, eps, d1, DEGENERATE_TOL).unwrap())
                * norm(propagator_matrix(k, eps, d2, DEGENERATE_TOL).unwrap())
                * (1.0 + k);
            prop_assert!((two.a - one.a).abs() <= 1e-12 * scale);
            prop_assert!((two.b - one.b).abs() <= 1e-12 * scale * (1.0 + k));
        }

        #[test]
        fn oscillatory_amplitude_bounded(k in 11.0f64..100.0, a in -2.0f64..2.0, b in -2.0f64..2.0, dy in 0.0f64..50.0) {
            let eps = 0.1;
            let mu = (-omega_squared(k, eps)).sqrt();
            let s = propagate_mode(ModeState { a, b, k }, eps, dy, DEGENERATE_TOL).unwrap();
            prop_assert!(s.a.abs() <= a.abs() + b.abs() / mu + 1e-12);
        }
    }
}
