use crate::error::{domain, Error, Result};
use crate::measure::{mass_tail, RadialMeasure};

const MAX_BRACKET_STEPS: usize = 2100;
const MAX_ITERATIONS: usize = 200;

/// The radius `t` with `F(t) = 1 − τ`, i.e. the boundary of the disc carrying mass `τ`.
pub fn find_critical_point<M: RadialMeasure + ?Sized>(m: &M, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain(
            "find_critical_point",
            format!("tau = {tau} must lie strictly inside (0, 1)"),
        ));
    }
    solve_tail_mass(m, 1.0 - tau)
}

/// The radius `t` with `F(t) = target`, `0 < target < 1`.
///
/// Callers that know `1 − τ` in closed form should pass it here directly rather than
/// through [`find_critical_point`], to avoid cancellation when `τ` is close to one.
///
/// The root is bracketed on a doubling grid and refined by Newton's method in `log t`
/// (where `dF/d log t = −2t²ρ(t)`), falling back to bisection whenever a step leaves the
/// bracket. Iteration stops once `|F(t) − target| ≤ 1e-14·max(target, 1 − target)`.
pub fn solve_tail_mass<M: RadialMeasure + ?Sized>(m: &M, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(domain(
            "solve_tail_mass",
            format!("target {target} must lie strictly inside (0, 1)"),
        ));
    }
    let tolerance = 1e-14 * target.max(1.0 - target);
    let residual = |t: f64| -> Result<f64> { Ok(mass_tail(m, t)? - target) };
    let bracket_error = |detail: String| Error::Bracketing { target, detail };

    let start = m.scale_hint();
    let mut hi = start;
    let mut g_hi = residual(hi)?;
    let mut lo = start;
    let mut g_lo = g_hi;
    let mut steps = 0;
    while g_hi > 0.0 {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = residual(hi)?;
        if g_hi > g_lo {
            return Err(bracket_error(format!("tail mass increases between {lo} and {hi}")));
        }
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(bracket_error("tail mass never drops below target".into()));
        }
    }
    while g_lo < 0.0 {
        hi = lo;
        g_hi = g_lo;
        lo *= 0.5;
        g_lo = residual(lo)?;
        if g_lo < g_hi {
            return Err(bracket_error(format!("tail mass increases between {lo} and {hi}")));
        }
        steps += 1;
        if steps > MAX_BRACKET_STEPS || lo == 0.0 {
            return Err(bracket_error("tail mass never rises above target".into()));
        }
    }
    if g_lo.abs() <= tolerance {
        return Ok(lo);
    }
    if g_hi.abs() <= tolerance {
        return Ok(hi);
    }

    // Invariant: g(lo) > 0 > g(hi).
    let (mut s_lo, mut s_hi) = (lo.ln(), hi.ln());
    let mut s = 0.5 * (s_lo + s_hi);
    let mut best = (f64::INFINITY, s.exp());
    for _ in 0..MAX_ITERATIONS {
        let t = s.exp();
        let g = residual(t)?;
        if g.abs() < best.0 {
            best = (g.abs(), t);
        }
        if g.abs() <= tolerance {
            return Ok(t);
        }
        if g > 0.0 {
            s_lo = s;
        } else {
            s_hi = s;
        }
        let slope = -2.0 * t * t * m.density(t);
        let newton = s - g / slope;
        s = if slope < 0.0 && newton > s_lo && newton < s_hi {
            newton
        } else {
            0.5 * (s_lo + s_hi)
        };
        if s_hi - s_lo <= 4.0 * f64::EPSILON * s_lo.abs().max(s_hi.abs()).max(1.0) {
            break;
        }
    }
    // Bracket collapsed at machine resolution; F cannot be resolved further.
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::BuiltinMeasure;

    #[test]
    fn spherical_closed_form_inverse() {
        let m = BuiltinMeasure::spherical();
        assert!((find_critical_point(&m, 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!((find_critical_point(&m, 0.8).unwrap() - 2.0).abs() < 1e-13);
        for tau in [1e-4, 0.01, 0.3, 0.77, 0.999, 1.0 - 1e-4] {
            let t = find_critical_point(&m, tau).unwrap();
            let exact = (tau / (1.0 - tau)).sqrt();
            assert!(((t - exact) / exact).abs() < 1e-11, "tau {tau}: {t} vs {exact}");
        }
    }

    #[test]
    fn scaled_covariance() {
        let a = 3.5;
        let m = BuiltinMeasure::scaled(a).unwrap();
        let s = BuiltinMeasure::spherical();
        for tau in [0.1, 0.5, 0.9] {
            let lhs = find_critical_point(&m, tau).unwrap();
            let rhs = a * find_critical_point(&s, tau).unwrap();
            assert!(((lhs - rhs) / rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_on_log_grid() {
        let m = BuiltinMeasure::mixture(0.5, 2.0).unwrap();
        for k in 0..=40 {
            // τ from 1e-4 up to 1 − 1e-4, log-spaced toward both ends.
            let x = -4.0 + 8.0 * k as f64 / 40.0;
            let tau = if x <= 0.0 {
                0.5 * 10f64.powf(x) * 2.0 / 2.0
            } else {
                1.0 - 0.5 * 10f64.powf(-x)
            };
            let tau = tau.clamp(1e-4, 1.0 - 1e-4);
            let t = find_critical_point(&m, tau).unwrap();
            let r = (mass_tail(&m, t).unwrap() - (1.0 - tau)).abs();
            assert!(r <= 1e-14 * tau.max(1.0 - tau), "tau {tau}: residual {r}");
        }
    }

    #[test]
    fn rejects_degenerate_tau() {
        let m = BuiltinMeasure::spherical();
        for tau in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(find_critical_point(&m, tau).is_err());
        }
    }
}
