//! Harmonic functions on a rectangle from Dirichlet data, and the auxiliary
//! fields built with them: `H` and `S = Q − H` around the square-root
//! singularity `Q = √(−y + √(x² + y²))`, the model solution started from `S`,
//! and the pole-side correction `E`.
//!
//! The solver first subtracts the bilinear interpolant of the four corner
//! values, which is harmonic, so that each remaining side trace vanishes at
//! both ends. Each side is then handled by its own sine/sinh series with zero
//! data on the other three sides.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::quadrature::sine_coefficients;
use crate::series::{HolomorphicSeed, Seed};
use crate::spectral::{self, SineSeriesState};

/// Default number of sine terms per side.
pub const DEFAULT_TERMS: usize = 400;

/// Largest corner mismatch accepted between adjacent traces.
pub const CORNER_TOL: f64 = 1e-8;

const COEFF_TOL: f64 = 1e-13;

pub type Trace = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rectangle {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return domain("rectangle bounds must be finite and increasing");
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// `[−L, L] × [y_min, y_max]`.
    pub fn symmetric(half_length: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(half_length > 0.0) {
            return domain(format!("half-length must be positive, got {half_length}"));
        }
        Self::new(-half_length, half_length, y_min, y_max)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

/// Dirichlet data on the four sides. Side traces are functions of `y`,
/// bottom and top traces functions of `x`.
#[derive(Clone)]
pub struct DirichletProblem {
    pub rect: Rectangle,
    pub left: Trace,
    pub right: Trace,
    pub bottom: Trace,
    pub top: Trace,
    pub n_terms: usize,
}

impl std::fmt::Debug for DirichletProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletProblem")
            .field("rect", &self.rect)
            .field("n_terms", &self.n_terms)
            .finish_non_exhaustive()
    }
}

impl DirichletProblem {
    pub fn new(rect: Rectangle, left: Trace, right: Trace, bottom: Trace, top: Trace, n_terms: usize) -> Self {
        Self {
            rect,
            left,
            right,
            bottom,
            top,
            n_terms,
        }
    }

    /// Corner values `[bottom-left, bottom-right, top-left, top-right]`,
    /// checking that adjacent traces agree.
    fn corners(&self) -> Result<[f64; 4]> {
        let r = &self.rect;
        let pairs = [
            ((self.left)(r.y_min), (self.bottom)(r.x_min), "bottom-left"),
            ((self.right)(r.y_min), (self.bottom)(r.x_max), "bottom-right"),
            ((self.left)(r.y_max), (self.top)(r.x_min), "top-left"),
            ((self.right)(r.y_max), (self.top)(r.x_max), "top-right"),
        ];
        let mut out = [0.0; 4];
        for (slot, (a, b, name)) in out.iter_mut().zip(pairs) {
            if !((a - b).abs() <= CORNER_TOL) {
                return domain(format!("incompatible traces at the {name} corner: {a} vs {b}"));
            }
            *slot = 0.5 * (a + b);
        }
        Ok(out)
    }

    pub fn solve(&self) -> Result<DirichletSolution> {
        if self.n_terms == 0 {
            return domain("need at least one series term");
        }
        let r = self.rect;
        let c = self.corners()?;
        let bilinear = Bilinear::through(r, c);
        let n = self.n_terms;
        let side = |trace: &Trace, x: Option<f64>, y: Option<f64>, a: f64, b: f64| {
            let trace = trace.clone();
            sine_coefficients(
                move |t| {
                    let (px, py) = (x.unwrap_or(t), y.unwrap_or(t));
                    trace(t) - bilinear.value(px, py)
                },
                a,
                b,
                n,
                COEFF_TOL,
            )
        };
        let coeffs = SideCoefficients {
            left: side(&self.left, Some(r.x_min), None, r.y_min, r.y_max),
            right: side(&self.right, Some(r.x_max), None, r.y_min, r.y_max),
            bottom: side(&self.bottom, None, Some(r.y_min), r.x_min, r.x_max),
            top: side(&self.top, None, Some(r.y_max), r.x_min, r.x_max),
        };
        Ok(DirichletSolution {
            problem: self.clone(),
            bilinear,
            coeffs,
        })
    }
}

/// `p0 + px·x + py·y + pxy·x·y`, harmonic.
#[derive(Debug, Clone, Copy)]
struct Bilinear {
    p0: f64,
    px: f64,
    py: f64,
    pxy: f64,
}

impl Bilinear {
    fn through(r: Rectangle, [bl, br, tl, tr]: [f64; 4]) -> Self {
        let (w, h) = (r.width(), r.height());
        // Bilinear in local coordinates u = (x − a)/w, v = (y − c)/h, then expanded.
        let (a0, au, av, auv) = (bl, br - bl, tl - bl, tr - tl - br + bl);
        let (a, c) = (r.x_min, r.y_min);
        let (ku, kv) = (au / w, av / h);
        let kuv = auv / (w * h);
        Self {
            p0: a0 - ku * a - kv * c + kuv * a * c,
            px: ku - kuv * c,
            py: kv - kuv * a,
            pxy: kuv,
        }
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        self.p0 + self.px * x + self.py * y + self.pxy * x * y
    }

    fn dy(&self, n: usize, x: f64, y: f64) -> f64 {
        match n {
            0 => self.value(x, y),
            1 => self.py + self.pxy * x,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
struct SideCoefficients {
    left: Vec<f64>,
    right: Vec<f64>,
    bottom: Vec<f64>,
    top: Vec<f64>,
}

/// `sinh(α d)/sinh(α D)` (`hyperbolic = sinh`) or `cosh(α d)/sinh(α D)`, for `0 ≤ d ≤ D`,
/// without overflow.
fn hyperbolic_ratio(alpha: f64, d: f64, big_d: f64, cosh: bool) -> f64 {
    let decay = (-alpha * (big_d - d)).exp();
    let inner = (-2.0 * alpha * d).exp();
    let num = if cosh { 1.0 + inner } else { 1.0 - inner };
    decay * num / -(-2.0 * alpha * big_d).exp_m1()
}

/// A solved Dirichlet problem: evaluates the harmonic extension and its `y`-derivatives.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    problem: DirichletProblem,
    bilinear: Bilinear,
    coeffs: SideCoefficients,
}

impl DirichletSolution {
    pub fn rect(&self) -> Rectangle {
        self.problem.rect
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.dy(0, x, y)
    }

    /// `∂ⁿ_y` of the solution, differentiating each series term exactly.
    pub fn dy(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        let r = self.problem.rect;
        if !r.contains(x, y) {
            return domain(format!("({x}, {y}) lies outside the rectangle"));
        }
        let (w, h) = (r.width(), r.height());
        let mut sum = self.bilinear.dy(n, x, y);
        let ni = n as i32;
        let odd = n % 2 == 1;
        // Bottom and top: sin(α(x − a)) times a hyperbolic profile in y.
        for (m, (&cb, &ct)) in self.coeffs.bottom.iter().zip(&self.coeffs.top).enumerate() {
            let alpha = (m + 1) as f64 * PI / w;
            let sx = (alpha * (x - r.x_min)).sin();
            let sign_b = if odd { -1.0 } else { 1.0 };
            let bottom = sign_b * hyperbolic_ratio(alpha, r.y_max - y, h, odd);
            let top = hyperbolic_ratio(alpha, y - r.y_min, h, odd);
            sum += alpha.powi(ni) * sx * (cb * bottom + ct * top);
        }
        // Left and right: sin(β(y − c)) times a hyperbolic profile in x.
        for (m, (&cl, &cr)) in self.coeffs.left.iter().zip(&self.coeffs.right).enumerate() {
            let beta = (m + 1) as f64 * PI / h;
            let sy = (beta * (y - r.y_min) + n as f64 * PI / 2.0).sin();
            let left = hyperbolic_ratio(beta, r.x_max - x, w, false);
            let right = hyperbolic_ratio(beta, x - r.x_min, w, false);
            sum += beta.powi(ni) * sy * (cl * left + cr * right);
        }
        Ok(sum)
    }

    /// Largest deviation between the solution and its data over `samples`
    /// points per side (the truncation error of the series on the boundary).
    pub fn boundary_error(&self, samples: usize) -> f64 {
        let r = self.problem.rect;
        let p = &self.problem;
        let mut worst: f64 = 0.0;
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let (x, y) = (r.x_min + t * r.width(), r.y_min + t * r.height());
            let checks = [
                (r.x_min, y, (p.left)(y)),
                (r.x_max, y, (p.right)(y)),
                (x, r.y_min, (p.bottom)(x)),
                (x, r.y_max, (p.top)(x)),
            ];
            for (px, py, want) in checks {
                if let Ok(v) = self.value(px, py) {
                    worst = worst.max((v - want).abs());
                }
            }
        }
        worst
    }
}

/// Evaluates the harmonic extension of the data of `p` at one point.
pub fn solve_rectangle(p: &DirichletProblem, x: f64, y: f64) -> Result<f64> {
    p.solve()?.value(x, y)
}

/// `Q(x, y) = √(−y + √(x² + y²))`.
pub fn root_q(x: f64, y: f64) -> f64 {
    (-y + x.hypot(y)).max(0.0).sqrt()
}

/// `H(·;L)` on `[−L, L] × [−3, 1]`: side traces `Q(∓L, y)`, bottom `Q(x, −3)`,
/// and top `Q(x, −3) + Q(L, 1) − Q(L, −3)`, which meets the sides at the top corners.
pub fn build_h(half_length: f64, n_terms: usize) -> Result<DirichletSolution> {
    let rect = Rectangle::symmetric(half_length, -3.0, 1.0)?;
    let l = half_length;
    let shift = root_q(l, 1.0) - root_q(l, -3.0);
    DirichletProblem::new(
        rect,
        Arc::new(move |y| root_q(-l, y)),
        Arc::new(move |y| root_q(l, y)),
        Arc::new(|x| root_q(x, -3.0)),
        Arc::new(move |x| root_q(x, -3.0) + shift),
        n_terms,
    )
    .solve()
}

/// `S = Q − H`: harmonic away from the origin, zero on `x = ±L`, and carrying
/// the square-root singularity of `Q` at the origin.
#[derive(Debug, Clone)]
pub struct RootDifference {
    h: DirichletSolution,
    q: HolomorphicSeed,
}

impl RootDifference {
    pub fn new(half_length: f64, n_terms: usize) -> Result<Self> {
        Ok(Self {
            h: build_h(half_length, n_terms)?,
            q: HolomorphicSeed::root(),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.h.rect().x_max
    }

    pub fn h(&self) -> &DirichletSolution {
        &self.h
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.dy(0, x, y)
    }
}

impl Seed for RootDifference {
    fn dy(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        let q = if n == 0 { root_q(x, y) } else { self.q.dy(n, x, y)? };
        Ok(q - self.h.dy(n, x, y)?)
    }
}

/// `S(x, y; L)` with a freshly solved `H`.
pub fn build_s(half_length: f64, x: f64, y: f64) -> Result<f64> {
    RootDifference::new(half_length, DEFAULT_TERMS)?.value(x, y)
}

/// The rod on `[−L, L]` started at `y = −1` from `S` and `∂_y S`.
#[derive(Debug, Clone)]
pub struct ModelMsk {
    s: RootDifference,
    initial: SineSeriesState,
}

impl ModelMsk {
    pub fn new(half_length: f64, n_terms: usize, n_modes: usize) -> Result<Self> {
        let s = RootDifference::new(half_length, n_terms)?;
        let initial = spectral::analyze(
            |x| s.dy(0, x, -1.0).unwrap_or(f64::NAN),
            |x| s.dy(1, x, -1.0).unwrap_or(f64::NAN),
            half_length,
            n_modes,
            -1.0,
        )?;
        Ok(Self { s, initial })
    }

    pub fn seed(&self) -> &RootDifference {
        &self.s
    }

    pub fn initial_state(&self) -> &SineSeriesState {
        &self.initial
    }

    pub fn state_at(&self, epsilon: f64, y: f64) -> Result<SineSeriesState> {
        if !(y >= -1.0) {
            return domain(format!("model solution starts at y = -1, got {y}"));
        }
        self.initial.evolve(epsilon, y + 1.0)
    }

    pub fn profile(&self, epsilon: f64, y: f64, xs: &[f64]) -> Result<Vec<f64>> {
        self.state_at(epsilon, y)?.synthesize(xs)
    }
}

/// `u_msk(x, y_eval)` on the points `xs` with default resolution.
pub fn model_msk(half_length: f64, epsilon: f64, y_eval: f64, xs: &[f64]) -> Result<Vec<f64>> {
    ModelMsk::new(half_length, DEFAULT_TERMS, spectral::DEFAULT_MODES)?.profile(epsilon, y_eval, xs)
}

/// `E` on `[−L, L] × [−2, y_top]` with side traces `−c₁U_re − c₂U_im` of the
/// limiting pole solutions `U_re = −y/(x² + y²)`, `U_im = −x/(x² + y²)`, and
/// top and bottom traces linear in `x` between the corner values.
pub fn build_e(half_length: f64, c1: f64, c2: f64, y_top: f64, n_terms: usize) -> Result<DirichletSolution> {
    let rect = Rectangle::symmetric(half_length, -2.0, y_top)?;
    let l = half_length;
    let side = move |x: f64, y: f64| {
        let r2 = x * x + y * y;
        -c1 * (-y / r2) - c2 * (-x / r2)
    };
    let linear = move |y: f64| {
        let (a, b) = (side(-l, y), side(l, y));
        move |x: f64| a + (b - a) * (x + l) / (2.0 * l)
    };
    let bottom = linear(-2.0);
    let top = linear(y_top);
    DirichletProblem::new(
        rect,
        Arc::new(move |y| side(-l, y)),
        Arc::new(move |y| side(l, y)),
        Arc::new(bottom),
        Arc::new(top),
        n_terms,
    )
    .solve()
}
