//! Radially symmetric background measures and the functionals that enter the free-energy
//! expansions.
//!
//! Densities are taken with respect to the normalised area measure `dA = d²z/π`, so that a
//! radial density `ρ(r)` has total mass `∫₀^∞ 2rρ(r) dr`.

mod builtin;

pub use builtin::BuiltinMeasure;

use std::cell::RefCell;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_half_line_with, integrate_interval};

/// Relative tolerance for the one-dimensional integrals behind the functionals.
const FUNCTIONAL_REL_TOL: f64 = 1e-13;
/// Absolute floor for integrals that may vanish, such as `U_μ(0)`.
const FUNCTIONAL_ABS_TOL: f64 = 1e-14;
/// Largest acceptable error estimate before a functional is reported as failed.
const FUNCTIONAL_MAX_ERROR: f64 = 1e-9;

/// A radially symmetric probability density on the plane, strictly positive, with an
/// `A / r⁴` tail (equivalently, a pull-back to the sphere that does not vanish at the
/// north pole).
///
/// Implementors must supply the first two radial derivatives in closed form. Closed forms
/// for the tail mass and the logarithmic potential are optional; without them the generic
/// routines fall back to quadrature.
pub trait RadialMeasure: Send + Sync {
    fn label(&self) -> String;

    /// `ρ(r)`.
    fn density(&self, r: f64) -> f64;

    /// `ρ′(r)`.
    fn density_d1(&self, r: f64) -> f64;

    /// `ρ″(r)`.
    fn density_d2(&self, r: f64) -> f64;

    /// The constant `A = lim r⁴ρ(r)`.
    fn tail_amplitude(&self) -> f64;

    /// `F(t) = ∫_t^∞ 2rρ(r) dr`, if known in closed form.
    fn closed_form_tail_mass(&self, _t: f64) -> Option<f64> {
        None
    }

    /// `U_μ(r)`, if known in closed form.
    fn closed_form_potential(&self, _r: f64) -> Option<f64> {
        None
    }

    /// A typical radius of the measure, used to split half-line integrals.
    fn scale_hint(&self) -> f64 {
        1.0
    }
}

/// The scalar functionals of a measure that parameterise the expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureFunctionals {
    /// Logarithmic energy `I[μ] = ∬ log|z − w| dμ dμ`.
    pub energy: f64,
    /// Entropy `E[μ] = ∫ log ρ dμ`.
    pub entropy: f64,
    /// `U_μ(0)`.
    pub u_zero: f64,
    /// `ρ(0)`.
    pub rho0: f64,
    /// `ρ̃(0) = lim s⁻⁴ρ(1/s)`.
    pub rho_tilde0: f64,
    /// `∫₀^∞ (ρ″/ρ − (5/4)(ρ′/ρ)²) t dt`.
    pub curvature_integral: f64,
}

fn checked(result: crate::numerics::QuadratureResult) -> Result<f64> {
    if result.abs_error_estimate > FUNCTIONAL_MAX_ERROR || !result.value.is_finite() {
        return Err(Error::Integration {
            estimate: result.abs_error_estimate,
            tolerance: FUNCTIONAL_MAX_ERROR,
            evaluations: result.evaluations,
        });
    }
    Ok(result.value)
}

/// `F(t) = ∫_t^∞ 2rρ(r) dr = 1 − μ(D(0, t))`.
pub fn mass_tail<M: RadialMeasure + ?Sized>(m: &M, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(domain("mass_tail", format!("radius {t} must be nonnegative")));
    }
    if let Some(f) = m.closed_form_tail_mass(t) {
        return Ok(f);
    }
    if t == 0.0 {
        let q = integrate_half_line_with(|r| 2.0 * r * m.density(r), m.scale_hint(), FUNCTIONAL_REL_TOL, 0.0)?;
        return Ok(q.value);
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    // r = t/u maps [t, ∞) onto (0, 1].
    let q = integrate_interval(
        |u| {
            if u == 0.0 {
                0.0
            } else {
                let r = t / u;
                2.0 * r * m.density(r) * t / (u * u)
            }
        },
        0.0,
        1.0,
        FUNCTIONAL_REL_TOL,
    )?;
    Ok(q.value.clamp(0.0, 1.0))
}

/// The logarithmic potential `U_μ(r) = −log r − ∫_r^∞ F(s)/s ds` at radius `r > 0`.
pub fn log_potential<M: RadialMeasure + ?Sized>(m: &M, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(domain(
            "log_potential",
            format!("radius {r} must be positive; use u_at_zero for the origin"),
        ));
    }
    if let Some(u) = m.closed_form_potential(r) {
        return Ok(u);
    }
    log_potential_by_quadrature(m, r)
}

/// `U_μ(r)` from the tail-mass representation, ignoring any closed form.
pub fn log_potential_by_quadrature<M: RadialMeasure + ?Sized>(m: &M, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(
            "log_potential",
            format!("radius {r} must be positive and finite"),
        ));
    }
    // s = r/u maps [r, ∞) onto (0, 1]; ds/s = du/u.
    let failure = RefCell::new(None);
    let q = integrate_interval(
        |u| {
            if u == 0.0 {
                return 0.0;
            }
            match mass_tail(m, r / u) {
                Ok(f) => f / u,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        FUNCTIONAL_REL_TOL,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(-r.ln() - q.value)
}

/// `U_μ(0) = −∫₀^∞ log t · 2tρ(t) dt`.
pub fn u_at_zero<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let q = integrate_half_line_with(
        |t| -t.ln() * 2.0 * t * m.density(t),
        m.scale_hint(),
        FUNCTIONAL_REL_TOL,
        FUNCTIONAL_ABS_TOL,
    )?;
    checked(q)
}

/// `I[μ] = −U_μ(0) + ∫₀^∞ F(t)(1 − F(t))/t dt`.
///
/// Obtained from `−∫U_μ dμ` by inserting the tail-mass representation of `U_μ` and
/// exchanging the order of integration.
pub fn energy<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let u0 = u_at_zero(m)?;
    let failure = RefCell::new(None);
    let q = integrate_half_line_with(
        |t| match mass_tail(m, t) {
            Ok(f) => f * (1.0 - f) / t,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        m.scale_hint(),
        FUNCTIONAL_REL_TOL,
        FUNCTIONAL_ABS_TOL,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(-u0 + checked(q)?)
}

/// `E[μ] = ∫₀^∞ log ρ(t) · 2tρ(t) dt`.
pub fn entropy<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let q = integrate_half_line_with(
        |t| {
            let rho = m.density(t);
            if rho > 0.0 {
                rho.ln() * 2.0 * t * rho
            } else {
                0.0
            }
        },
        m.scale_hint(),
        FUNCTIONAL_REL_TOL,
        FUNCTIONAL_ABS_TOL,
    )?;
    checked(q)
}

/// `ρ̃(0) = A`, cross-checked against `s⁻⁴ρ(1/s)` at `s = 10⁻³`.
pub fn rho_tilde_zero<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let a = m.tail_amplitude();
    let s: f64 = 1e-3;
    let probe = m.density(1.0 / s) / s.powi(4);
    if a.is_nan() || a <= 0.0 || ((probe - a) / a).abs() > 0.01 {
        return Err(Error::Consistency {
            label: m.label(),
            detail: format!("tail amplitude {a} disagrees with s^-4 rho(1/s) = {probe} at s = {s}"),
        });
    }
    Ok(a)
}

/// `∫₀^∞ (ρ″/ρ − (5/4)(ρ′/ρ)²) t dt`.
pub fn curvature_integral<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let q = integrate_half_line_with(
        |t| {
            let rho = m.density(t);
            if rho > 0.0 {
                let g = m.density_d1(t) / rho;
                (m.density_d2(t) / rho - 1.25 * g * g) * t
            } else {
                0.0
            }
        },
        m.scale_hint(),
        FUNCTIONAL_REL_TOL,
        FUNCTIONAL_ABS_TOL,
    )?;
    checked(q)
}

/// Total mass `∫₀^∞ 2tρ(t) dt`.
pub fn total_mass<M: RadialMeasure + ?Sized>(m: &M) -> Result<f64> {
    let q = integrate_half_line_with(|t| 2.0 * t * m.density(t), m.scale_hint(), FUNCTIONAL_REL_TOL, 0.0)?;
    checked(q)
}

/// Rejects measures whose total mass differs from one by more than `1e-10`.
pub fn check_normalization<M: RadialMeasure + ?Sized>(m: &M) -> Result<()> {
    let mass = total_mass(m)?;
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Consistency {
            label: m.label(),
            detail: format!("total mass {mass} is not 1"),
        });
    }
    Ok(())
}

/// Evaluates every functional of `m`.
pub fn functionals<M: RadialMeasure + ?Sized>(m: &M) -> Result<MeasureFunctionals> {
    Ok(MeasureFunctionals {
        energy: energy(m)?,
        entropy: entropy(m)?,
        u_zero: u_at_zero(m)?,
        rho0: m.density(0.0),
        rho_tilde0: rho_tilde_zero(m)?,
        curvature_integral: curvature_integral(m)?,
    })
}
