use std::fmt;
use std::str::FromStr;

use super::RadialMeasure;
use crate::error::{Error, Result};

/// The built-in background measures.
///
/// `Scaled { a }` is the push-forward of the uniform measure on the sphere under `z ↦ a z`,
/// with density `a² / (a² + r²)²`; `a = 1` is the spherical density itself. `Mixture` is the
/// convex combination `θ·spherical + (1 − θ)·scaled(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinMeasure {
    Spherical,
    Scaled { a: f64 },
    Mixture { theta: f64, a: f64 },
}

impl BuiltinMeasure {
    pub fn spherical() -> Self {
        BuiltinMeasure::Spherical
    }

    pub fn scaled(a: f64) -> Result<Self> {
        check_scale(a)?;
        Ok(BuiltinMeasure::Scaled { a })
    }

    pub fn mixture(theta: f64, a: f64) -> Result<Self> {
        check_scale(a)?;
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "mixture weight theta = {theta} outside [0, 1]"
            )));
        }
        Ok(BuiltinMeasure::Mixture { theta, a })
    }

    /// Components as `(weight, scale)` pairs.
    fn components(&self) -> [(f64, f64); 2] {
        match *self {
            BuiltinMeasure::Spherical => [(1.0, 1.0), (0.0, 1.0)],
            BuiltinMeasure::Scaled { a } => [(1.0, a), (0.0, 1.0)],
            BuiltinMeasure::Mixture { theta, a } => [(theta, 1.0), (1.0 - theta, a)],
        }
    }

    fn combine(&self, f: impl Fn(f64) -> f64) -> f64 {
        let [(w0, a0), (w1, a1)] = self.components();
        let first = w0 * f(a0);
        if w1 == 0.0 {
            first
        } else {
            first + w1 * f(a1)
        }
    }
}

fn check_scale(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scale a = {a} must be positive and finite"
        )))
    }
}

/// `½ log(a² + r²)` without overflow for large `r`.
fn half_log_sum_squares(a: f64, r: f64) -> f64 {
    if r <= a {
        a.ln() + 0.5 * (r / a).powi(2).ln_1p()
    } else {
        r.ln() + 0.5 * (a / r).powi(2).ln_1p()
    }
}

impl RadialMeasure for BuiltinMeasure {
    fn label(&self) -> String {
        self.to_string()
    }

    fn density(&self, r: f64) -> f64 {
        self.combine(|a| {
            let q = r / a;
            1.0 / (a * a * (1.0 + q * q).powi(2))
        })
    }

    fn density_d1(&self, r: f64) -> f64 {
        self.combine(|a| {
            let q = r / a;
            -4.0 * q / (a * a * a * (1.0 + q * q).powi(3))
        })
    }

    fn density_d2(&self, r: f64) -> f64 {
        self.combine(|a| {
            let q = r / a;
            4.0 * (5.0 * q * q - 1.0) / (a.powi(4) * (1.0 + q * q).powi(4))
        })
    }

    fn tail_amplitude(&self) -> f64 {
        self.combine(|a| a * a)
    }

    fn closed_form_tail_mass(&self, t: f64) -> Option<f64> {
        Some(self.combine(|a| {
            let q = t / a;
            1.0 / (1.0 + q * q)
        }))
    }

    fn closed_form_potential(&self, r: f64) -> Option<f64> {
        Some(self.combine(|a| -half_log_sum_squares(a, r)))
    }

    fn scale_hint(&self) -> f64 {
        match *self {
            BuiltinMeasure::Spherical => 1.0,
            BuiltinMeasure::Scaled { a } => a,
            BuiltinMeasure::Mixture { theta, a } => {
                // Geometric interpolation between the component medians.
                a.powf(1.0 - theta)
            }
        }
    }
}

impl fmt::Display for BuiltinMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinMeasure::Spherical => write!(f, "spherical"),
            BuiltinMeasure::Scaled { a } => write!(f, "scaled:a={a}"),
            BuiltinMeasure::Mixture { theta, a } => write!(f, "mixture:theta={theta},a={a}"),
        }
    }
}

impl FromStr for BuiltinMeasure {
    type Err = Error;

    /// Parses `spherical`, `scaled:a=<float>` or `mixture:theta=<float>,a=<float>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name, params),
            None => (s, ""),
        };
        let mut a = None;
        let mut theta = None;
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{pair}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("`{value}` is not a number")))?;
            let slot = match key.trim() {
                "a" => &mut a,
                "theta" => &mut theta,
                other => return Err(Error::InvalidParameter(format!("unknown measure parameter `{other}`"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::InvalidParameter(format!("parameter `{key}` given twice")));
            }
        }
        let missing = |p: &str| Error::InvalidParameter(format!("measure `{name}` requires `{p}`"));
        match name {
            "spherical" if a.is_none() && theta.is_none() => Ok(BuiltinMeasure::Spherical),
            "scaled" if theta.is_none() => BuiltinMeasure::scaled(a.ok_or_else(|| missing("a"))?),
            "mixture" => {
                BuiltinMeasure::mixture(theta.ok_or_else(|| missing("theta"))?, a.ok_or_else(|| missing("a"))?)
            }
            "spherical" | "scaled" => Err(Error::InvalidParameter(format!("unexpected parameters for `{name}`"))),
            other => Err(Error::InvalidParameter(format!("unknown measure `{other}`"))),
        }
    }
}
