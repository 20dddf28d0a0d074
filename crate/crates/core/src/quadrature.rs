//! Adaptive Gauss-Kronrod integration and sine-basis projection.
//!
//! The integrator works on complex-valued integrands so that oscillatory
//! factors `exp(-ikx)` can be carried without splitting into real and
//! imaginary passes. Error control is global: the panel with the largest
//! estimate is bisected until the summed estimate falls below the target.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_932_299_524,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    /// Maximum number of panels held at once.
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            max_panels: 20_000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    /// Integral of |f|, used to bound the achievable accuracy.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut magnitude = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1 + f2;
        kronrod += sum * WGK[j];
        magnitude += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel {
        a,
        b,
        value,
        error: if error.is_finite() { error } else { f64::INFINITY },
        magnitude: magnitude * half.abs(),
    }
}

/// Integrates `f` over the union of consecutive panels given by `breaks`
/// (sorted, at least two entries).
///
/// The target accuracy is `abs_tol`, relaxed to a round-off floor of
/// `64·ε·∫|f|` when the integrand is too large for the absolute target to be
/// meaningful in double precision.
pub fn integrate<F>(f: F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    assert!(breaks.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 4);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&f, w[0], w[1]));
        }
    }
    loop {
        let (value, error, magnitude) = heap.iter().fold(
            (Complex64::new(0.0, 0.0), 0.0, 0.0),
            |(v, e, m), p| (v + p.value, e + p.error, m + p.magnitude),
        );
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Accuracy {
                estimate: f64::INFINITY,
                tolerance: opts.abs_tol,
            });
        }
        let target = opts.abs_tol.max(64.0 * f64::EPSILON * magnitude);
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                magnitude,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Ok(QuadResult {
                    value,
                    error,
                    magnitude,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() + 2 > opts.max_panels || mid <= worst.a || mid >= worst.b {
            return Err(Error::Accuracy {
                estimate: error,
                tolerance: target,
            });
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
    }
}

/// Breakpoints covering `[a, b]` with panels no wider than `max_width`,
/// always including the extra interior points in `extra`.
pub fn panel_breaks(a: f64, b: f64, max_width: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|&p| p > a && p < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for i in 0..n {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    out.push(b);
    out
}

/// Coefficients `c_n = (2/(b-a)) ∫_a^b f(t) sin(nπ(t-a)/(b-a)) dt`, `n = 1..=n_terms`.
///
/// Composite Simpson on a uniform grid that starts with at least eight
/// panels per oscillation of the highest mode and doubles until successive
/// coefficient vectors agree to `tol`.
pub fn sine_coefficients<F>(f: F, a: f64, b: f64, n_terms: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    const MAX_PANELS: usize = 1 << 17;
    let mut m = (4 * n_terms).max(256).next_power_of_two();
    let mut samples: Vec<f64> = (0..=m)
        .map(|i| f(a + (b - a) * i as f64 / m as f64))
        .collect();
    let mut prev = simpson_sine(&samples, n_terms);
    loop {
        if m >= MAX_PANELS {
            return prev;
        }
        let m2 = 2 * m;
        let mut refined = Vec::with_capacity(m2 + 1);
        for i in 0..m {
            refined.push(samples[i]);
            refined.push(f(a + (b - a) * (2 * i + 1) as f64 / m2 as f64));
        }
        refined.push(samples[m]);
        samples = refined;
        m = m2;
        let next = simpson_sine(&samples, n_terms);
        let scale = next.iter().fold(1.0_f64, |acc, c| acc.max(c.abs()));
        let diff = next
            .iter()
            .zip(&prev)
            .fold(0.0_f64, |acc, (p, q)| acc.max((p - q).abs()));
        prev = next;
        if diff <= tol * scale {
            return prev;
        }
    }
}

fn simpson_sine(samples: &[f64], n_terms: usize) -> Vec<f64> {
    let m = samples.len() - 1;
    debug_assert!(m % 2 == 0);
    // With h = (b-a)/m the factor (2/(b-a))·(h/3) reduces to 2/(3m).
    let scale = 2.0 / (3.0 * m as f64);
    let weights: Vec<f64> = (0..=m)
        .map(|i| {
            if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect();
    (1..=n_terms)
        .map(|n| {
            let theta = n as f64 * std::f64::consts::PI / m as f64;
            // sin(iθ) by the three-term recurrence, resynchronised periodically.
            let two_cos = 2.0 * theta.cos();
            let mut s_prev = 0.0;
            let mut s_cur = theta.sin();
            let mut acc = 0.0;
            for i in 1..m {
                if i % 64 == 0 {
                    s_cur = (i as f64 * theta).sin();
                    s_prev = ((i - 1) as f64 * theta).sin();
                }
                acc += weights[i] * samples[i] * s_cur;
                let s_next = two_cos * s_cur - s_prev;
                s_prev = s_cur;
                s_cur = s_next;
            }
            scale * acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(k, 2.0, epsilon = 1e-15);
        assert_relative_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rules_are_exact_for_polynomials() {
        for deg in 0..=31u32 {
            let p = gk21(&|x: f64| Complex64::new(x.powi(deg as i32), 0.0), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((p.value.re - exact).abs() < 1e-14, "degree {deg}");
            if deg <= 19 {
                assert!(p.error < 1e-13, "gauss part inexact at degree {deg}");
            }
        }
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^∞ e^{-k} cos(3k) dk = 1/10
        let r = integrate(
            |k| Complex64::new((-k).exp() * (3.0 * k).cos(), 0.0),
            &panel_breaks(0.0, 60.0, 0.5, &[]),
            QuadOptions::new(1e-13),
        )
        .unwrap();
        assert_relative_eq!(r.value.re, 0.1, epsilon = 1e-13);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        let mut opts = QuadOptions::new(1e-14);
        opts.max_panels = 4;
        let err = integrate(|k| Complex64::new(k.abs().sqrt().recip(), 0.0), &[0.0, 1.0], opts)
            .unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn sine_projection_recovers_modes() {
        let c = sine_coefficients(
            |t| 2.0 * (3.0 * t).sin() - 0.5 * (7.0 * t).sin(),
            0.0,
            std::f64::consts::PI,
            10,
            1e-13,
        );
        for (i, v) in c.iter().enumerate() {
            let expect = match i + 1 {
                3 => 2.0,
                7 => -0.5,
                _ => 0.0,
            };
            assert!((v - expect).abs() < 1e-12, "mode {} -> {v}", i + 1);
        }
    }
}
