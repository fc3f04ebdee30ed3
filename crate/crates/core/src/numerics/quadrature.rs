//! Adaptive 21-point Gauss–Kronrod quadrature on finite intervals and on the half line.
//!
//! The half line is split at a caller-supplied peak. The left piece `[0, peak]` is integrated
//! directly, the right piece through `r = peak / u`, `u ∈ (0, 1]`, which turns the algebraic
//! tails typical of weakly confining weights into bounded integrands. Both pieces start from
//! a partition that is geometrically refined toward the peak so that sharp Laplace-type
//! maxima are seen by the first sweep of the rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Segments beyond this count abort the adaptive refinement.
const MAX_SEGMENTS: usize = 8000;

/// Depth of the initial geometric refinement toward the peak on each side.
const PEAK_REFINEMENT: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        abs_k += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for i in 0..10 {
        asc += WGK[i] * ((fv1[i] - mean).abs() + (fv2[i] - mean).abs());
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(domain("integrate", format!("integrand not finite on [{a}, {b}]")));
    }
    let abs_value = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Globally adaptive refinement starting from the given breakpoints.
fn adaptive<F: Fn(f64) -> f64>(f: &F, breakpoints: &[f64], rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let (mut value, mut error, mut abs_value) = (0.0, 0.0, 0.0);
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let s = gauss_kronrod(f, w[0], w[1])?;
            value += s.value;
            error += s.error;
            abs_value += s.abs_value;
            heap.push(s);
            evaluations += 21;
        }
    }
    loop {
        let tolerance = abs_tol.max(rel_tol * value.abs());
        let roundoff = 50.0 * f64::EPSILON * abs_value;
        if error <= tolerance || error <= roundoff {
            // Sum in position order so the result does not depend on heap layout.
            let mut segments = heap.into_vec();
            segments.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = super::compensated_sum(segments.iter().map(|s| s.value));
            let error = segments.iter().map(|s| s.error).sum();
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Integration {
                estimate: error,
                tolerance,
                evaluations,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution.
            return Err(Error::Integration {
                estimate: error,
                tolerance,
                evaluations,
            });
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error = (error + left.error + right.error - worst.error).max(0.0);
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        evaluations += 42;
    }
}

/// Integrates `f` over the finite interval `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(domain("integrate_interval", format!("bad interval [{a}, {b}]")));
    }
    adaptive(&f, &[a, b], rel_tol, 0.0)
}

/// Integrates `f` over `(0, ∞)`, splitting the domain at `peak_hint`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, peak_hint: f64, rel_tol: f64) -> Result<QuadratureResult> {
    integrate_half_line_with(f, peak_hint, rel_tol, 0.0)
}

/// As [`integrate_half_line`], stopping once the error estimate falls below
/// `max(abs_tol, rel_tol·|value|)`. A positive `abs_tol` is needed when the integral may vanish.
pub fn integrate_half_line_with<F: Fn(f64) -> f64>(
    f: F,
    peak_hint: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    if !(peak_hint.is_finite() && peak_hint > 0.0) {
        return Err(domain(
            "integrate_half_line",
            format!("peak hint {peak_hint} must be positive"),
        ));
    }
    if !(rel_tol >= 0.0 && abs_tol >= 0.0) || (rel_tol == 0.0 && abs_tol == 0.0) {
        return Err(domain(
            "integrate_half_line",
            "tolerances must be nonnegative and not both zero",
        ));
    }
    let mut breaks: Vec<f64> = vec![0.0];
    breaks.extend((1..=PEAK_REFINEMENT).map(|k| 1.0 - 0.5f64.powi(k)));
    breaks.push(1.0);

    let left_breaks: Vec<f64> = breaks.iter().map(|&x| x * peak_hint).collect();
    let left = adaptive(&f, &left_breaks, rel_tol, 0.5 * abs_tol);

    let right_integrand = |u: f64| {
        let r = peak_hint / u;
        if r.is_infinite() {
            0.0
        } else {
            f(r) * peak_hint / (u * u)
        }
    };
    let right = adaptive(&right_integrand, &breaks, rel_tol, 0.5 * abs_tol);

    // A tolerance relative to each half can be far stricter than needed when the halves
    // differ greatly in size; retry once against the combined magnitude before giving up.
    let (left, right) = match (left, right) {
        (Ok(l), Ok(r)) => (l, r),
        _ => {
            let scale = crude_magnitude(&f, &right_integrand, &left_breaks, &breaks)?;
            let abs = abs_tol.max(rel_tol * scale);
            (
                adaptive(&f, &left_breaks, 0.0, 0.5 * abs)?,
                adaptive(&right_integrand, &breaks, 0.0, 0.5 * abs)?,
            )
        }
    };
    Ok(QuadratureResult {
        value: left.value + right.value,
        abs_error_estimate: left.abs_error_estimate + right.abs_error_estimate,
        evaluations: left.evaluations + right.evaluations,
    })
}

fn crude_magnitude<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(
    f: &F,
    g: &G,
    left_breaks: &[f64],
    right_breaks: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for w in left_breaks.windows(2) {
        total += gauss_kronrod(f, w[0], w[1])?.value;
    }
    for w in right_breaks.windows(2) {
        total += gauss_kronrod(g, w[0], w[1])?.value;
    }
    Ok(total.abs())
}
