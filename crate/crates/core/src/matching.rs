//! Quantitative checks of the matched-asymptotics picture: the outer series
//! away from the singular point, the Hardy-integral inner description near
//! it, their overlap, and the region of fast growth that opens from it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{ModelMsk, DEFAULT_TERMS};
use crate::dispersion::omega_squared;
use crate::error::{domain, Error, Result};
use crate::etalon::{evaluate_etalon, EtalonKind};
use crate::hardy::{inner_pole, inner_root, inner_scale};
use crate::series::{self, HolomorphicSeed, Part, Seed, SeriesOrder};
use crate::spectral::{self, Mode, SineSeriesState};

/// Points per axis of the deterministic comparison lattices.
pub const LATTICE: usize = 17;

/// Sine-basis modes whose growth over the evolution would amplify
/// coefficient round-off beyond `e^{MAX_AMPLIFICATION}` are dropped.
const MAX_AMPLIFICATION: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    PoleRe,
    PoleIm,
    Tolstov,
    RootEtalon,
    ModelMsk,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [Self::PoleRe, Self::PoleIm, Self::Tolstov, Self::RootEtalon, Self::ModelMsk];

    pub fn name(self) -> &'static str {
        match self {
            Self::PoleRe => "pole-re",
            Self::PoleIm => "pole-im",
            Self::Tolstov => "tolstov",
            Self::RootEtalon => "root-etalon",
            Self::ModelMsk => "model-msk",
        }
    }

    /// Exponent `p` in `ε^p (u − offset) ≈ inner(X, Y)`.
    pub fn inner_exponent(self) -> f64 {
        match self {
            Self::PoleRe | Self::PoleIm | Self::Tolstov => 2.0 / 3.0,
            Self::RootEtalon | Self::ModelMsk => -1.0 / 3.0,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scenario '{s}'")))
    }
}

/// A solution with a singular point, its exact evaluator and its outer seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub epsilon: f64,
    /// `x`-coordinate of the singular point (whole-line etalons only).
    pub shift: f64,
    /// Half-length of the hinged rod for the bounded scenarios.
    pub half_length: f64,
    pub abs_tol: f64,
    model: Arc<OnceLock<std::result::Result<Arc<ModelMsk>, Error>>>,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        let half_length = match kind {
            ScenarioKind::Tolstov => PI,
            ScenarioKind::ModelMsk => 3.0,
            _ => f64::INFINITY,
        };
        Ok(Self {
            kind,
            epsilon,
            shift: 0.0,
            half_length,
            abs_tol: 1e-10,
            model: Arc::new(OnceLock::new()),
        })
    }

    /// Moves the singular point of a whole-line etalon to `x = shift`.
    pub fn with_shift(mut self, shift: f64) -> Result<Self> {
        if matches!(self.kind, ScenarioKind::Tolstov | ScenarioKind::ModelMsk) && shift != 0.0 {
            return domain("only whole-line etalons can be shifted");
        }
        self.shift = shift;
        Ok(self)
    }

    /// Half-length for the model solution (ignored by other scenarios).
    pub fn with_half_length(mut self, half_length: f64) -> Result<Self> {
        if self.kind == ScenarioKind::ModelMsk {
            if !(half_length > 0.0) {
                return domain(format!("half-length must be positive, got {half_length}"));
            }
            self.half_length = half_length;
            self.model = Arc::new(OnceLock::new());
        }
        Ok(self)
    }

    pub fn with_tolerance(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn model(&self) -> Result<Arc<ModelMsk>> {
        self.model
            .get_or_init(|| ModelMsk::new(self.half_length, DEFAULT_TERMS, spectral::DEFAULT_MODES).map(Arc::new))
            .clone()
    }

    fn etalon(&self) -> Option<EtalonKind> {
        match self.kind {
            ScenarioKind::PoleRe => Some(EtalonKind::PoleRe),
            ScenarioKind::PoleIm => Some(EtalonKind::PoleIm),
            ScenarioKind::RootEtalon => Some(EtalonKind::Root),
            _ => None,
        }
    }

    /// Harmonics kept for the Tolstov data: enough to cover the unstable band.
    fn tolstov_harmonics(&self) -> usize {
        (60.0f64.max(8.0 / self.epsilon)).min(2000.0) as usize
    }

    /// The evolved sine-basis state at height `y` for the bounded scenarios.
    fn sine_state(&self, y: f64) -> Result<SineSeriesState> {
        if !(y >= -1.0) {
            return domain(format!("solutions start at y = -1, got {y}"));
        }
        let dy = y + 1.0;
        match self.kind {
            ScenarioKind::Tolstov => series::tolstov_evolved_state(self.tolstov_harmonics(), self.epsilon, y),
            ScenarioKind::ModelMsk => {
                let model = self.model()?;
                let initial = model.initial_state();
                let kept: Vec<Mode> = initial
                    .modes()
                    .iter()
                    .copied()
                    .filter(|m| {
                        let w2 = omega_squared(initial.wavenumber(m.n), self.epsilon);
                        w2 <= 0.0 || w2.sqrt() * dy <= MAX_AMPLIFICATION
                    })
                    .collect();
                SineSeriesState::from_modes(initial.half_length(), -1.0, kept)?.evolve(self.epsilon, dy)
            }
            _ => domain("not a bounded scenario"),
        }
    }

    /// The exact solution along the row `y`.
    pub fn exact_row(&self, y: f64, xs: &[f64]) -> Result<Vec<f64>> {
        match self.etalon() {
            Some(kind) => xs
                .par_iter()
                .map(|&x| evaluate_etalon(kind, x - self.shift, y, self.epsilon, self.abs_tol))
                .collect(),
            None => self.sine_state(y)?.synthesize(xs),
        }
    }

    pub fn exact(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.exact_row(y, &[x])?[0])
    }

    /// The outer seed `U₀`, centred on the singular point.
    pub fn seed(&self) -> Result<Arc<dyn Seed + Send + Sync>> {
        let base: Arc<dyn Seed + Send + Sync> = match self.kind {
            ScenarioKind::PoleRe => Arc::new(HolomorphicSeed::pole(Part::Re)),
            ScenarioKind::PoleIm => Arc::new(HolomorphicSeed::pole(Part::Im)),
            ScenarioKind::Tolstov => Arc::new(HolomorphicSeed::tolstov()),
            ScenarioKind::RootEtalon => Arc::new(HolomorphicSeed::root()),
            ScenarioKind::ModelMsk => Arc::new(self.model()?.seed().clone()),
        };
        Ok(if self.shift == 0.0 {
            base
        } else {
            Arc::new(Shifted {
                inner: base,
                shift: self.shift,
            })
        })
    }

    /// `Σ_{n ≤ order} ε^{2n} U_n(x, y)`.
    pub fn outer(&self, x: f64, y: f64, order: usize) -> Result<f64> {
        series::series_eval(self.seed()?.as_ref(), x, y, self.epsilon, SeriesOrder::new(order)?)
    }

    /// Smooth part subtracted before the inner comparison.
    pub fn inner_offset(&self, x: f64, y: f64) -> Result<f64> {
        match self.kind {
            ScenarioKind::PoleRe | ScenarioKind::PoleIm | ScenarioKind::RootEtalon => Ok(0.0),
            ScenarioKind::Tolstov => Ok(tolstov_regular_part(x, y)),
            ScenarioKind::ModelMsk => self.model()?.seed().value(0.0, 0.0),
        }
    }

    /// The inner solution in stretched variables.
    pub fn inner(&self, big_x: f64, big_y: f64) -> Result<f64> {
        let tol = 1e-10;
        match self.kind {
            ScenarioKind::PoleRe => Ok(inner_pole(big_x, big_y, tol)?.0),
            ScenarioKind::PoleIm | ScenarioKind::Tolstov => Ok(inner_pole(big_x, big_y, tol)?.1),
            ScenarioKind::RootEtalon | ScenarioKind::ModelMsk => inner_root(big_x, big_y, tol),
        }
    }

    /// The inner solution mapped back to outer variables:
    /// `offset + ε^{−p} inner(x/ε^{2/3}, y/ε^{2/3})`.
    pub fn inner_in_outer(&self, x: f64, y: f64) -> Result<f64> {
        let s = inner_scale(self.epsilon);
        let p = self.kind.inner_exponent();
        let v = self.inner((x - self.shift) / s, y / s)?;
        Ok(self.inner_offset(x, y)? + v / self.epsilon.powf(p))
    }
}

/// `U₀(x − shift, y)` of another seed.
struct Shifted {
    inner: Arc<dyn Seed + Send + Sync>,
    shift: f64,
}

impl Seed for Shifted {
    fn dy(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        self.inner.dy(n, x - self.shift, y)
    }
}

/// `V = U₀ + x/(x² + y²)` for the Tolstov seed: the part of
/// `−Im(z/(1 − z))`, `z = e^{y + ix}`, that is smooth at the origin.
///
/// With `t = y + ix`, `z/(1 − z) = −1/t − 1/2 − Σ_k B_{2k} t^{2k−1}/(2k)!`, so
/// near the origin `V = Im Σ_k B_{2k} t^{2k−1}/(2k)! = x/12 + …`.
pub fn tolstov_regular_part(x: f64, y: f64) -> f64 {
    let t = Complex64::new(y, x);
    if t.norm() < 0.25 {
        // B_2/2!, B_4/4!, …, B_12/12!
        const C: [f64; 6] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
        ];
        let t2 = t * t;
        let mut power = t;
        let mut sum = Complex64::new(0.0, 0.0);
        for c in C {
            sum += c * power;
            power *= t2;
        }
        sum.im
    } else {
        let z = t.exp();
        -(z / (1.0 - z)).im + x / (x * x + y * y)
    }
}

/// A sup-norm deviation together with the size of the reference field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub sup_abs: f64,
    pub sup_reference: f64,
    /// Number of lattice points compared.
    pub points: usize,
}

impl Mismatch {
    pub fn relative(&self) -> f64 {
        self.sup_abs / self.sup_reference
    }
}

fn lattice(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..LATTICE).map(move |i| lo + (hi - lo) * i as f64 / (LATTICE - 1) as f64)
}

/// Polar lattice on the open lower half-annulus `r_in ≤ r ≤ r_out`, `y < 0`,
/// around the singular point, restricted to `y ≥ −1` and the rod.
fn half_annulus(s: &Scenario, r_in: f64, r_out: f64) -> Vec<(f64, f64)> {
    let angles = (1..=LATTICE).map(|i| -PI * i as f64 / (LATTICE + 1) as f64);
    let angles: Vec<f64> = angles.collect();
    lattice(r_in, r_out)
        .flat_map(|r| angles.iter().map(move |th| (r * th.cos(), r * th.sin())))
        .map(|(x, y)| (x + s.shift, y))
        .filter(|&(x, y)| y >= -1.0 && x.abs() <= s.half_length)
        .collect()
}

/// Sup over the lower half-annulus of `|exact − Σ_{n ≤ order} ε^{2n}U_n|`.
///
/// Only `y < 0` is sampled: from `y = 0` on, the exact solution carries the
/// growth region spreading from the singular point, which the outer series
/// does not describe at any order.
pub fn outer_mismatch(s: &Scenario, r_in: f64, r_out: f64, order: usize) -> Result<Mismatch> {
    if !(r_in > 0.0 && r_in < r_out) {
        return domain(format!("annulus radii must satisfy 0 < r_in < r_out, got {r_in}, {r_out}"));
    }
    if r_in < 3.0 * inner_scale(s.epsilon) {
        return domain(format!(
            "annulus must stay outside the inner zone: r_in = {r_in} < 3ε^(2/3) = {}",
            3.0 * inner_scale(s.epsilon)
        ));
    }
    let pts = half_annulus(s, r_in, r_out);
    if pts.is_empty() {
        return domain("annulus has no admissible points");
    }
    let rows: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(x, y)| -> Result<(f64, f64)> {
            let exact = s.exact(x, y)?;
            Ok(((exact - s.outer(x, y, order)?).abs(), exact.abs()))
        })
        .collect::<Result<_>>()?;
    Ok(fold(&rows))
}

fn fold(rows: &[(f64, f64)]) -> Mismatch {
    Mismatch {
        sup_abs: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        sup_reference: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        points: rows.len(),
    }
}

/// Sup over `|X|, |Y| ≤ R` of `|ε^p (exact − offset) − inner(X, Y)|`; the
/// reference size is `sup |inner|`.
pub fn inner_mismatch(s: &Scenario, big_r: f64) -> Result<Mismatch> {
    if !(big_r > 0.0 && big_r <= 3.0) {
        return domain(format!("inner radius must lie in (0, 3], got {big_r}"));
    }
    let scale = inner_scale(s.epsilon);
    let p = s.kind.inner_exponent();
    let pts: Vec<(f64, f64)> = lattice(-big_r, big_r)
        .flat_map(|xx| lattice(-big_r, big_r).map(move |yy| (xx, yy)))
        .collect();
    let rows: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(bx, by)| -> Result<(f64, f64)> {
            let (x, y) = (s.shift + scale * bx, scale * by);
            let lhs = s.epsilon.powf(p) * (s.exact(x, y)? - s.inner_offset(x, y)?);
            let inner = s.inner(bx, by)?;
            Ok(((lhs - inner).abs(), inner.abs()))
        })
        .collect::<Result<_>>()?;
    Ok(fold(&rows))
}

/// Agreement of the outer limit `U₀` and the rescaled inner solution on the
/// lower half-annulus `2ε^{2/3} ≤ r ≤ 4ε^{2/3}`, as the root-mean-square
/// relative difference `‖U₀ − inner‖₂ / ‖inner‖₂` over the polar lattice.
pub fn overlap_agreement(s: &Scenario) -> Result<f64> {
    let scale = inner_scale(s.epsilon);
    let seed = s.seed()?;
    let pts = half_annulus(s, 2.0 * scale, 4.0 * scale);
    let rows: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(x, y)| -> Result<(f64, f64)> {
            let outer = series::u0(seed.as_ref(), x, y)?;
            let inner = s.inner_in_outer(x, y)?;
            Ok(((outer - inner).powi(2), inner.powi(2)))
        })
        .collect::<Result<_>>()?;
    let (num, den) = rows.iter().fold((0.0, 0.0), |(a, b), r| (a + r.0, b + r.1));
    Ok((num / den).sqrt())
}

/// Row-wise extent of the region where `|u|` exceeds `threshold` times the
/// background, the median over the row of the dispersionless limit `|U₀|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub y: f64,
    /// `(x_left, x_right)`, or `None` when no sample exceeds the threshold.
    pub extent: Option<(f64, f64)>,
}

impl GrowthRow {
    pub fn width(&self) -> f64 {
        self.extent.map_or(0.0, |(a, b)| b - a)
    }
}

pub fn growth_region_scan(s: &Scenario, y_values: &[f64], xs: &[f64], threshold: f64) -> Result<Vec<GrowthRow>> {
    if !(threshold > 0.0) {
        return domain(format!("threshold must be positive, got {threshold}"));
    }
    if xs.is_empty() {
        return domain("need at least one sample per row");
    }
    let seed = s.seed()?;
    y_values
        .iter()
        .map(|&y| {
            let row = s.exact_row(y, xs)?;
            // The seed is singular at isolated points; those samples carry no
            // information about the background level.
            let mut background: Vec<f64> = xs
                .iter()
                .filter_map(|&x| series::u0(seed.as_ref(), x, y).ok())
                .map(f64::abs)
                .filter(|v| v.is_finite())
                .collect();
            if background.is_empty() {
                return domain(format!("no regular seed values on the row y = {y}"));
            }
            background.sort_by(f64::total_cmp);
            let level = threshold * background[background.len() / 2];
            let above: Vec<f64> = xs
                .iter()
                .zip(&row)
                .filter(|(_, v)| v.abs() > level)
                .map(|(&x, _)| x)
                .collect();
            let extent = match (above.first(), above.last()) {
                (Some(&a), Some(&b)) => Some((a, b)),
                _ => None,
            };
            Ok(GrowthRow { y, extent })
        })
        .collect()
}

/// Wavenumber `nπ/(2L)` of the largest sine coefficient of a row sampled
/// uniformly on `[−L, L]` (endpoints included).
pub fn dominant_wavenumber(row: &[f64], half_length: f64) -> Result<f64> {
    let m = row.len();
    if m < 3 {
        return domain("row needs at least three samples");
    }
    if !(half_length > 0.0) {
        return domain(format!("half-length must be positive, got {half_length}"));
    }
    if row.iter().all(|v| *v == 0.0) {
        return domain("row is identically zero");
    }
    let intervals = m - 1;
    // Discrete sine transform of the samples on the uniform grid.
    let best = (1..intervals)
        .map(|n| {
            let c: f64 = row
                .iter()
                .enumerate()
                .map(|(i, v)| v * (PI * (n * i) as f64 / intervals as f64).sin())
                .sum();
            (n, c.abs())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(n, _)| n)
        .unwrap_or(1);
    Ok(spectral::wavenumber(best, half_length))
}

/// Pearson correlation of two equally long profiles.
pub fn profile_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return domain("profiles must have equal length of at least two");
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return domain("constant profile has no correlation");
    }
    Ok(cov / (va * vb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_part_is_continuous() {
        for (x, y) in [(0.2, 0.1), (-0.15, -0.18), (0.0, 0.24), (0.05, 0.01)] {
            let z = Complex64::new(y, x).exp();
            let direct = -(z / (1.0 - z)).im + x / (x * x + y * y);
            let taylor = tolstov_regular_part(x, y);
            assert!((taylor - direct).abs() < 1e-12, "{taylor} vs {direct}");
        }
        let v = tolstov_regular_part(1e-4, 0.0);
        assert!((v - 1e-4 / 12.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn dominant_wavenumber_examples() {
        let l = PI;
        let xs: Vec<f64> = (0..=512).map(|i| -l + 2.0 * l * i as f64 / 512.0).collect();
        let row: Vec<f64> = xs.iter().map(|x| (5.0 * x).sin()).collect();
        assert!((dominant_wavenumber(&row, l).unwrap() - 5.0).abs() < 1e-12);
        assert!(dominant_wavenumber(&vec![0.0; 10], l).is_err());
        // Equal amplitudes at k = 3 and k = 7; after dy = 1 at ε = 0.1, 7 grows faster.
        let state = SineSeriesState::from_modes(
            l,
            0.0,
            vec![Mode { n: 6, a: 1.0, b: 0.0 }, Mode { n: 14, a: 1.0, b: 0.0 }],
        )
        .unwrap();
        let row = state.evolve(0.1, 1.0).unwrap().synthesize(&xs).unwrap();
        assert!((dominant_wavenumber(&row, l).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_basics() {
        let a = [1.0, 2.0, 3.0];
        assert!((profile_correlation(&a, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(profile_correlation(&a, &[1.0, 1.0, 1.0]).is_err());
    }

    fn row_xs(center: f64, half_width: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| center - half_width + 2.0 * half_width * (i as f64 + 0.5) / n as f64)
            .collect()
    }

    #[test]
    fn laplace_limit_far_from_the_singular_point() {
        for kind in [
            ScenarioKind::PoleRe,
            ScenarioKind::PoleIm,
            ScenarioKind::Tolstov,
            ScenarioKind::RootEtalon,
        ] {
            let s = Scenario::new(kind, 1e-3).unwrap();
            let m = outer_mismatch(&s, 0.5, 0.9, 0).unwrap();
            assert!(m.sup_abs <= 1e-4, "{kind}: {}", m.sup_abs);
            assert!(m.points > 200);
        }
    }

    #[test]
    fn outer_annulus_must_avoid_the_inner_zone() {
        let s = Scenario::new(ScenarioKind::PoleRe, 0.1).unwrap();
        assert!(outer_mismatch(&s, 0.5, 1.0, 0).is_err());
        assert!(outer_mismatch(&s, 1.0, 0.9, 0).is_err());
    }

    #[test]
    fn first_correction_helps_tolstov() {
        let s = Scenario::new(ScenarioKind::Tolstov, 0.1).unwrap();
        let r_in = 3.0 * inner_scale(0.1);
        let m0 = outer_mismatch(&s, r_in, 1.5, 0).unwrap().sup_abs;
        let m1 = outer_mismatch(&s, r_in, 1.5, 1).unwrap().sup_abs;
        assert!(m1 < m0, "{m1} vs {m0}");
    }

    #[test]
    fn outer_mismatch_convergence_rates() {
        let at = |eps: f64, order: usize| {
            let s = Scenario::new(ScenarioKind::PoleRe, eps).unwrap();
            outer_mismatch(&s, 0.65, 1.0, order).unwrap().sup_abs
        };
        let r0 = at(0.0125, 0) / at(0.00625, 0);
        let r1 = at(0.0125, 1) / at(0.00625, 1);
        assert!((r0 - 4.0).abs() < 0.5, "order 0 ratio {r0}");
        assert!((r1 - 16.0).abs() < 2.0, "order 1 ratio {r1}");
    }

    #[test]
    fn inner_mismatch_shrinks_with_epsilon() {
        for kind in ScenarioKind::ALL {
            let m1 = inner_mismatch(&Scenario::new(kind, 0.1).unwrap(), 2.0).unwrap().sup_abs;
            let m2 = inner_mismatch(&Scenario::new(kind, 0.05).unwrap(), 2.0).unwrap().sup_abs;
            assert!(m2 < m1, "{kind}: {m2} vs {m1}");
        }
        assert!(inner_mismatch(&Scenario::new(ScenarioKind::PoleRe, 0.1).unwrap(), 3.5).is_err());
    }

    #[test]
    fn tolstov_row_has_the_inner_profile() {
        let eps = 0.1;
        let s = Scenario::new(ScenarioKind::Tolstov, eps).unwrap();
        let scale = inner_scale(eps);
        let xs: Vec<f64> = (0..=100).map(|i| -0.5 + 0.01 * i as f64).collect();
        let exact = s.exact_row(0.0, &xs).unwrap();
        let inner: Vec<f64> = xs.iter().map(|&x| s.inner(x / scale, 0.0).unwrap() / scale).collect();
        assert!(profile_correlation(&exact, &inner).unwrap() >= 0.95);
    }

    #[test]
    fn model_row_matches_the_root_inner_solution() {
        let eps = 0.1;
        let s = Scenario::new(ScenarioKind::ModelMsk, eps).unwrap();
        let scale = inner_scale(eps);
        let xs: Vec<f64> = (0..LATTICE).map(|i| scale * (-2.0 + 0.25 * i as f64)).collect();
        let exact = s.exact_row(0.0, &xs).unwrap();
        let offset = s.inner_offset(0.0, 0.0).unwrap();
        let (mut dev, mut size) = (0.0f64, 0.0f64);
        for (x, u) in xs.iter().zip(exact) {
            let predicted = s.inner_in_outer(*x, 0.0).unwrap();
            dev = dev.max((u - predicted).abs());
            size = size.max((predicted - offset).abs());
        }
        assert!(dev <= 0.15 * size, "{dev} vs {size}");
    }

    #[test]
    fn overlap_annulus_agreement() {
        for kind in [ScenarioKind::PoleRe, ScenarioKind::Tolstov] {
            let a = overlap_agreement(&Scenario::new(kind, 0.1).unwrap()).unwrap();
            assert!(a <= 0.2, "{kind}: {a}");
        }
    }

    #[test]
    fn growth_region_opens_at_the_singular_point() {
        let eps = 0.1;
        let s = Scenario::new(ScenarioKind::Tolstov, eps).unwrap();
        let xs = row_xs(0.0, PI, 400);
        let ys: Vec<f64> = (0..=20).map(|j| -0.5 + 0.05 * j as f64).collect();
        let rows = growth_region_scan(&s, &ys, &xs, 8.0).unwrap();
        let first = rows.iter().find(|r| r.extent.is_some()).unwrap();
        let (a, b) = first.extent.unwrap();
        assert!(a.abs().max(b.abs()) <= 5.0 * inner_scale(eps));
        assert!(rows.iter().filter(|r| r.y < -0.2).all(|r| r.extent.is_none()));
        let width = |y: f64| rows.iter().find(|r| (r.y - y).abs() < 1e-9).unwrap().width();
        assert!(width(0.4) > width(0.2));
        let band: Vec<f64> = rows.iter().filter(|r| r.y >= -1e-9 && r.y <= 0.5 + 1e-9).map(|r| r.width()).collect();
        assert!(band.windows(2).all(|w| w[1] >= w[0]), "{band:?}");
        assert!(growth_region_scan(&s, &ys, &xs, 0.0).is_err());
    }

    #[test]
    fn growth_region_follows_a_shifted_pole() {
        let shift = 1.5;
        let s = Scenario::new(ScenarioKind::PoleRe, 0.1).unwrap().with_shift(shift).unwrap();
        let xs = row_xs(shift, 3.0, 240);
        let rows = growth_region_scan(&s, &[-0.3, 0.2, 0.4], &xs, 8.0).unwrap();
        for r in rows {
            let (a, b) = r.extent.unwrap();
            assert!(((a + b) / 2.0 - shift).abs() < 0.05, "{r:?}");
        }
    }

    #[test]
    fn tolstov_dominant_wavenumber_at_y_one() {
        // Harmonic j of the Tolstov data carries e^{−j}(cosh 2ω_j + (j/ω_j) sinh 2ω_j) at y = 1.
        let eps = 0.1;
        let oracle = (1..60)
            .map(|j| {
                let k = j as f64;
                let w2 = k * k - eps * eps * k.powi(4);
                let amp = if w2 > 0.0 {
                    let w = w2.sqrt();
                    (2.0 * w).cosh() + k / w * (2.0 * w).sinh()
                } else {
                    let w = (-w2).sqrt();
                    (2.0 * w).cos() + k / w * (2.0 * w).sin()
                };
                (k, (-k).exp() * amp.abs())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        let s = Scenario::new(ScenarioKind::Tolstov, eps).unwrap();
        let xs: Vec<f64> = (0..=512).map(|i| -PI + 2.0 * PI * i as f64 / 512.0).collect();
        let k = dominant_wavenumber(&s.exact_row(1.0, &xs).unwrap(), PI).unwrap();
        assert_eq!(k, oracle);
    }

    #[test]
    fn scenario_names() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!(Scenario::new(ScenarioKind::Tolstov, 0.1).unwrap().with_shift(1.0).is_err());
        assert!(Scenario::new(ScenarioKind::PoleRe, 0.0).is_err());
    }
}
