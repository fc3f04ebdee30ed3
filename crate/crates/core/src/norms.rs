//! Orthogonal and skew-orthogonal norms of a radially symmetric weight, and their
//! asymptotic predictors in the origin, bulk and infinity regimes.
//!
//! For a radial potential the monic orthogonal polynomials are monomials, so the whole
//! integrable structure reduces to the squared norms
//! `h_{j,m} = ∫ |z|^{2j} e^{−mQ(z)} dA(z)` with `m = N` (determinantal) or `m = 2N`
//! (Pfaffian). With `Q = −2(n/N)U_μ − (2c/N) log|z|` these read
//! `h = ∫₀^∞ 2 exp(−M·V(r)) dr`, `M·V(r) = −2M·U_μ(r) − p·log r`, where the weight
//! exponent is `M = n` or `2n` and the log power is `p = 2j+2c+1` or `2j+4c+1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::measure::{log_potential, u_at_zero, BuiltinMeasure, RadialMeasure};
use crate::numerics::{integrate_half_line, solve_tail_mass, DEFAULT_REL_TOL};
use crate::specfun::log_gamma;

/// Integrable structure of the gas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Determinantal (complex) ensemble, weight `e^{−NQ}`.
    Determinantal,
    /// Pfaffian (symplectic) ensemble, weight `e^{−2NQ}`.
    Pfaffian,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Determinantal => "determinantal",
            Kind::Pfaffian => "pfaffian",
        }
    }
}

/// Particle number, point charges and kind of a gas, without the background measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleParams {
    pub n_particles: usize,
    /// Charge at infinity (the north pole).
    pub alpha: f64,
    /// Charge at the origin (the south pole).
    pub c: f64,
    pub kind: Kind,
}

impl EnsembleParams {
    pub fn new(n_particles: usize, alpha: f64, c: f64, kind: Kind) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidParameter("particle number must be positive".into()));
        }
        for (name, q) in [("alpha", alpha), ("c", c)] {
            if !(q.is_finite() && q >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "point charge {name} = {q} must be nonnegative"
                )));
            }
        }
        Ok(Self {
            n_particles,
            alpha,
            c,
            kind,
        })
    }

    /// Total background charge `n = N + α + c + 1`.
    pub fn total_charge(&self) -> f64 {
        self.n_particles as f64 + self.alpha + self.c + 1.0
    }

    /// Exponent `M` of the weight: `n` or `2n`.
    pub fn weight_exponent(&self) -> f64 {
        match self.kind {
            Kind::Determinantal => self.total_charge(),
            Kind::Pfaffian => 2.0 * self.total_charge(),
        }
    }

    /// Number of norms with valid indices: `N` or `2N`.
    pub fn index_bound(&self) -> usize {
        match self.kind {
            Kind::Determinantal => self.n_particles,
            Kind::Pfaffian => 2 * self.n_particles,
        }
    }

    pub fn tau_values(&self) -> TauValues {
        TauValues {
            n_particles: self.n_particles,
            alpha: self.alpha,
            c: self.c,
        }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j < self.index_bound() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: j,
                bound: self.index_bound(),
                kind: self.kind.name(),
            })
        }
    }

    /// Power `p` of `r` in the integrand `2 r^p e^{2M·U_μ(r)}`.
    fn log_power(&self, j: usize) -> f64 {
        let j = j as f64;
        match self.kind {
            Kind::Determinantal => 2.0 * j + 2.0 * self.c + 1.0,
            Kind::Pfaffian => 2.0 * j + 4.0 * self.c + 1.0,
        }
    }

    /// `τ` at which the integrand for index `j` peaks.
    fn peak_tau(&self, j: usize) -> f64 {
        let t = self.tau_values();
        match self.kind {
            Kind::Determinantal => t.tau_c(j as f64),
            Kind::Pfaffian => t.tilde_tau_c(j as f64),
        }
    }

    /// `1 − τ` at the peak, formed without cancellation.
    fn peak_tail_mass(&self, j: usize) -> f64 {
        let n = self.total_charge();
        let (nn, j) = (self.n_particles as f64, j as f64);
        match self.kind {
            Kind::Determinantal => (2.0 * (nn - j) + 2.0 * self.alpha + 1.0) / (2.0 * n),
            Kind::Pfaffian => (4.0 * nn + 4.0 * self.alpha + 3.0 - 2.0 * j) / (4.0 * n),
        }
    }
}

/// A gas: background measure, particle number, point charges and kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargedEnsemble<M = BuiltinMeasure> {
    measure: M,
    params: EnsembleParams,
}

impl<M: RadialMeasure> ChargedEnsemble<M> {
    pub fn new(measure: M, n_particles: usize, alpha: f64, c: f64, kind: Kind) -> Result<Self> {
        Ok(Self {
            measure,
            params: EnsembleParams::new(n_particles, alpha, c, kind)?,
        })
    }

    pub fn measure(&self) -> &M {
        &self.measure
    }

    pub fn params(&self) -> EnsembleParams {
        self.params
    }

    pub fn n_particles(&self) -> usize {
        self.params.n_particles
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn c(&self) -> f64 {
        self.params.c
    }

    pub fn kind(&self) -> Kind {
        self.params.kind
    }

    pub fn total_charge(&self) -> f64 {
        self.params.total_charge()
    }

    /// The same gas with a different particle number.
    pub fn with_particles(&self, n_particles: usize) -> Result<Self>
    where
        M: Clone,
    {
        Self::new(self.measure.clone(), n_particles, self.alpha(), self.c(), self.kind())
    }
}

/// The τ-numerology of a gas with `n = N + α + c + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauValues {
    n_particles: usize,
    alpha: f64,
    c: f64,
}

impl TauValues {
    fn n(&self) -> f64 {
        self.n_particles as f64 + self.alpha + self.c + 1.0
    }

    /// `τ_c(j) = (2(j + c) + 1) / (2n)`.
    pub fn tau_c(&self, j: f64) -> f64 {
        (2.0 * (j + self.c) + 1.0) / (2.0 * self.n())
    }

    /// `τ_α(j) = (2(j + α) + 1) / (2n)`.
    pub fn tau_alpha(&self, j: f64) -> f64 {
        (2.0 * (j + self.alpha) + 1.0) / (2.0 * self.n())
    }

    /// `τ̃_c(j) = (2j + 4c + 1) / (4n)`.
    pub fn tilde_tau_c(&self, j: f64) -> f64 {
        (2.0 * j + 4.0 * self.c + 1.0) / (4.0 * self.n())
    }

    /// `τ̃_α(j) = (2j + 4α + 1) / (4n)`.
    pub fn tilde_tau_alpha(&self, j: f64) -> f64 {
        (2.0 * j + 4.0 * self.alpha + 1.0) / (4.0 * self.n())
    }
}

/// One evaluated norm `log h_{j,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNorm {
    pub j: usize,
    /// `τ` whose droplet boundary is the peak.
    pub tau: f64,
    pub log_value: f64,
    /// Critical point `t_j` (or `t̃_j`) of the integrand.
    pub peak: f64,
    /// Estimated absolute error of `log_value` from the quadrature.
    pub quadrature_error: f64,
}

/// The even part of a skew-orthogonal polynomial `q_{2k}` and its skew norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewPolynomial {
    pub k: usize,
    /// Coefficient of `z^{2ℓ}` at position `ℓ`; the last entry is the leading one.
    pub even_coefficients: Vec<f64>,
    /// `log r_k`.
    pub log_skew_norm: f64,
}

/// `M·V_j(r)`: minus the log of the integrand of `h` divided by 2.
fn scaled_exponent<M: RadialMeasure + ?Sized>(m: &M, params: &EnsembleParams, j: usize, r: f64) -> Result<f64> {
    let u = log_potential(m, r)?;
    Ok(-2.0 * params.weight_exponent() * u - params.log_power(j) * r.ln())
}

/// `V_j(r)` for determinantal ensembles, `Ṽ_j(r)` for Pfaffian ones.
pub fn v_j<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(domain("v_j", format!("radius {r} must be positive")));
    }
    ens.params.check_index(j)?;
    let p = &ens.params;
    let u = log_potential(&ens.measure, r)?;
    Ok(-2.0 * u - p.log_power(j) / p.weight_exponent() * r.ln())
}

/// The critical point of the integrand for index `j`.
pub fn critical_point<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<f64> {
    ens.params.check_index(j)?;
    solve_tail_mass(&ens.measure, ens.params.peak_tail_mass(j))
}

/// `log h_{j,N}` (determinantal) or `log h_{j,2N}` (Pfaffian) by peak-normalised quadrature.
///
/// The exponent is shifted by its value at the critical point before integrating, so the
/// integrand is at most one near the peak and no intermediate quantity under- or overflows.
/// When the peak lies in the outer hemisphere (`τ > 1/2`) the integral is taken in the
/// inverted variable `s = 1/r`.
pub fn log_norm<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<LogNorm> {
    let params = ens.params;
    params.check_index(j)?;
    let m = &ens.measure;
    let tau = params.peak_tau(j);
    let peak = solve_tail_mass(m, params.peak_tail_mass(j))?;
    let reference = scaled_exponent(m, &params, j, peak)?;

    let failure = std::cell::RefCell::new(None);
    let shifted = |r: f64| match scaled_exponent(m, &params, j, r) {
        Ok(v) => (reference - v).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };

    let q = if tau <= 0.5 {
        integrate_half_line(|r| 2.0 * shifted(r), peak, DEFAULT_REL_TOL)?
    } else {
        // In s = 1/r the Jacobian 1/s² moves the maximum to F(1/s) = (1 − τ) − 1/M.
        let inverted_tail = params.peak_tail_mass(j) - 1.0 / params.weight_exponent();
        let s_peak = 1.0 / solve_tail_mass(m, inverted_tail)?;
        integrate_half_line(|s| 2.0 * shifted(1.0 / s) / (s * s), s_peak, DEFAULT_REL_TOL)?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if q.value.is_nan() || q.value <= 0.0 {
        return Err(Error::Integration {
            estimate: q.abs_error_estimate,
            tolerance: 0.0,
            evaluations: q.evaluations,
        });
    }
    Ok(LogNorm {
        j,
        tau,
        log_value: -reference + q.value.ln(),
        peak,
        quadrature_error: q.abs_error_estimate / q.value,
    })
}

/// Every valid norm of the ensemble, in ascending index order.
pub fn all_log_norms<M: RadialMeasure>(ens: &ChargedEnsemble<M>) -> Result<Vec<LogNorm>> {
    log_norms(ens, 0..ens.params.index_bound())
}

/// The norms for `indices`, evaluated in parallel and returned in input order.
pub fn log_norms<M: RadialMeasure>(
    ens: &ChargedEnsemble<M>,
    indices: impl IntoIterator<Item = usize>,
) -> Result<Vec<LogNorm>> {
    let indices: Vec<usize> = indices.into_iter().collect();
    indices.par_iter().map(|&j| log_norm(ens, j)).collect()
}

/// `log r_k = log 2 + log h_{2k+1,2N}` for a Pfaffian ensemble.
pub fn skew_norm<M: RadialMeasure>(ens: &ChargedEnsemble<M>, k: usize) -> Result<f64> {
    if ens.kind() != Kind::Pfaffian {
        return Err(Error::KindMismatch {
            operation: "skew_norm",
            expected: Kind::Pfaffian.name(),
        });
    }
    if k >= ens.n_particles() {
        return Err(Error::IndexOutOfRange {
            index: k,
            bound: ens.n_particles(),
            kind: "skew-orthogonal",
        });
    }
    Ok(std::f64::consts::LN_2 + log_norm(ens, 2 * k + 1)?.log_value)
}

/// Coefficients of `q_{2k}(z) = z^{2k} + Σ_{ℓ<k} z^{2ℓ} Π_{i=ℓ}^{k−1} h_{2i+2}/h_{2i+1}`.
///
/// The products are accumulated as sums of log-norm differences and exponentiated once per
/// coefficient.
pub fn skew_poly_even_coefficients<M: RadialMeasure>(ens: &ChargedEnsemble<M>, k: usize) -> Result<SkewPolynomial> {
    let log_skew_norm = skew_norm(ens, k)?;
    let norms = log_norms(ens, 1..=2 * k)?;
    // norms[i - 1] holds log h_i.
    let log_h = |i: usize| norms[i - 1].log_value;
    let mut coefficients = vec![1.0; k + 1];
    let mut log_coefficient = 0.0;
    for l in (0..k).rev() {
        log_coefficient += log_h(2 * l + 2) - log_h(2 * l + 1);
        if log_coefficient > f64::MAX.ln() {
            return Err(Error::Overflow {
                log_value: log_coefficient,
            });
        }
        coefficients[l] = log_coefficient.exp();
    }
    Ok(SkewPolynomial {
        k,
        even_coefficients: coefficients,
        log_skew_norm,
    })
}

/// The functional
/// `𝔅₁(r) = −1/(24r²ρ) − 7ρ′/(96rρ²) − ρ″/(32ρ²) + 5ρ′²/(96ρ³)`
/// that gives the `1/n` correction of the Laplace approximation of a norm.
pub fn b1_functional<M: RadialMeasure + ?Sized>(m: &M, r: f64) -> f64 {
    let rho = m.density(r);
    let d1 = m.density_d1(r);
    let d2 = m.density_d2(r);
    -1.0 / (24.0 * r * r * rho) - 7.0 * d1 / (96.0 * r * rho * rho) - d2 / (32.0 * rho * rho)
        + 5.0 * d1 * d1 / (96.0 * rho.powi(3))
}

/// Laplace-method prediction for a norm whose peak sits in the bulk:
/// `−M·V(t) + ½(log 2π − log M − log ρ(t)) + 𝔅₁(t)/M`.
pub fn predicted_log_norm_bulk<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<f64> {
    let params = ens.params;
    let m = &ens.measure;
    let peak = critical_point(ens, j)?;
    let weight = params.weight_exponent();
    Ok(-scaled_exponent(m, &params, j, peak)?
        + 0.5 * ((2.0 * std::f64::consts::PI).ln() - weight.ln() - m.density(peak).ln())
        + b1_functional(m, peak) / weight)
}

/// Prediction for a norm peaked near the origin:
/// `2M·U_μ(0) − a·log(M ρ(0)) + log Γ(a)` with `a = j + c + 1` (or `j + 2c + 1`).
pub fn predicted_log_norm_origin<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<f64> {
    let params = ens.params;
    params.check_index(j)?;
    let m = &ens.measure;
    let weight = params.weight_exponent();
    let a = 0.5 * (params.log_power(j) + 1.0);
    Ok(2.0 * weight * u_at_zero(m)? - a * (weight * m.density(0.0)).ln() + log_gamma(a)?)
}

/// Prediction for a norm peaked near infinity:
/// `−b·log(M ρ̃(0)) + log Γ(b)` with `b = N − j + α` (or `2N − j + 2α + 1`).
pub fn predicted_log_norm_infinity<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<f64> {
    let params = ens.params;
    params.check_index(j)?;
    let weight = params.weight_exponent();
    let b = 0.5 * (2.0 * weight - params.log_power(j) - 1.0);
    Ok(-b * (weight * ens.measure.tail_amplitude()).ln() + log_gamma(b)?)
}

/// Leading-order location of the critical point: `(τ/ρ(0))^{1/2}` in the inner hemisphere and
/// `((1 − τ)/ρ̃(0))^{−1/2}` in the outer one.
pub fn critical_point_asymptote<M: RadialMeasure>(ens: &ChargedEnsemble<M>, j: usize) -> Result<f64> {
    let params = ens.params;
    params.check_index(j)?;
    let tau = params.peak_tau(j);
    if tau <= 0.5 {
        Ok((tau / ens.measure.density(0.0)).sqrt())
    } else {
        Ok((ens.measure.tail_amplitude() / params.peak_tail_mass(j)).sqrt())
    }
}

/// `log h` for the induced spherical ensemble, where every norm is a Beta integral:
/// `B(j + c + 1, N + α − j)` (determinantal) or `B(j + 2c + 1, 2N + 2α + 1 − j)` (Pfaffian).
pub fn spherical_log_norm_closed_form(params: &EnsembleParams, j: usize) -> Result<f64> {
    params.check_index(j)?;
    let j = j as f64;
    let (nn, alpha, c) = (params.n_particles as f64, params.alpha, params.c);
    let n = params.total_charge();
    match params.kind {
        Kind::Determinantal => Ok(log_gamma(j + c + 1.0)? + log_gamma(nn + alpha - j)? - log_gamma(n)?),
        Kind::Pfaffian => {
            Ok(log_gamma(j + 2.0 * c + 1.0)? + log_gamma(2.0 * nn + 2.0 * alpha + 1.0 - j)? - log_gamma(2.0 * n)?)
        }
    }
}
