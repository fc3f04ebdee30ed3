//! The five-term large-`N` expansions of `log Z`, their spherical special case, and
//! residual sweeps against exact values.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_energy::log_z_exact;
use crate::measure::{functionals, MeasureFunctionals, RadialMeasure};
use crate::norms::{ChargedEnsemble, EnsembleParams, Kind};
use crate::numerics::compensated_sum;
use crate::specfun::{log_barnes_g, zeta_prime_minus_one};

/// One named contribution to a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

const fn term(name: &'static str, value: f64) -> Term {
    Term { name, value }
}

/// Coefficients of `log Z ≈ k₁N² + k₂N log N + k₃N + k₄ log N + k₅`.
///
/// Each entry of `values` is the left-to-right sum of the matching `terms` list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCoefficients {
    pub kind: Kind,
    pub alpha: f64,
    pub c: f64,
    pub values: [f64; 5],
    pub terms: [Vec<Term>; 5],
}

impl ExpansionCoefficients {
    fn from_terms(kind: Kind, alpha: f64, c: f64, terms: [Vec<Term>; 5]) -> Self {
        let values = terms.each_ref().map(|ts| sum_terms(ts));
        Self {
            kind,
            alpha,
            c,
            values,
            terms,
        }
    }

    /// The five-term value at particle number `n`.
    pub fn evaluate(&self, n: usize) -> f64 {
        evaluate(&self.values, n)
    }
}

/// Plain sequential sum, the reference for term-breakdown completeness.
pub fn sum_terms(terms: &[Term]) -> f64 {
    terms.iter().map(|t| t.value).sum()
}

/// `k₁N² + k₂N log N + k₃N + k₄ log N + k₅` with compensated summation.
pub fn evaluate(coefficients: &[f64; 5], n: usize) -> f64 {
    let basis = basis(n as f64);
    compensated_sum(coefficients.iter().zip(basis).map(|(k, b)| k * b))
}

fn basis(n: f64) -> [f64; 5] {
    [n * n, n * n.ln(), n, n.ln(), 1.0]
}

fn log_two_pi() -> f64 {
    (2.0 * PI).ln()
}

/// `C₁ … C₅` of the determinantal gas.
pub fn det_coefficients(f: &MeasureFunctionals, alpha: f64, c: f64) -> Result<ExpansionCoefficients> {
    let s = alpha + c + 1.0;
    let (i, e, u0) = (f.energy, f.entropy, f.u_zero);
    let terms = [
        vec![term("energy", -i)],
        vec![term("universal", 0.5)],
        vec![
            term("gaussian", 0.5 * log_two_pi() - 1.0),
            term("energy", -2.0 * s * i),
            term("entropy", -0.5 * e),
            term("origin charge", -2.0 * c * u0),
        ],
        vec![
            term("charges", 0.5 * (alpha * alpha + c * c)),
            term("universal", 1.0 / 3.0),
        ],
        vec![
            term("energy", -s * s * i),
            term("entropy", -0.5 * s * e),
            term("origin charge", -2.0 * s * c * u0),
            term("density at origin", 0.5 * (c * c + c + 1.0 / 3.0) * f.rho0.ln()),
            term(
                "density at infinity",
                0.5 * (alpha * alpha + alpha + 1.0 / 3.0) * f.rho_tilde0.ln(),
            ),
            term("gaussian", 0.5 * s * (log_two_pi() - 1.0)),
            term("zeta", 2.0 * zeta_prime_minus_one()),
            term("barnes", -(log_barnes_g(c + 1.0)? + log_barnes_g(alpha + 1.0)?)),
            term("universal", -5.0 / 12.0),
            term("curvature", -f.curvature_integral / 6.0),
        ],
    ];
    Ok(ExpansionCoefficients::from_terms(Kind::Determinantal, alpha, c, terms))
}

/// `D₁ … D₅` of the Pfaffian gas.
pub fn pfaff_coefficients(f: &MeasureFunctionals, alpha: f64, c: f64) -> Result<ExpansionCoefficients> {
    let s = alpha + c + 1.0;
    let (i, e, u0) = (f.energy, f.entropy, f.u_zero);
    let barnes =
        log_barnes_g(c + 1.0)? + log_barnes_g(c + 1.5)? + log_barnes_g(alpha + 1.0)? + log_barnes_g(alpha + 1.5)?;
    let terms = [
        vec![term("energy", -2.0 * i)],
        vec![term("universal", 0.5)],
        vec![
            term("gaussian", 0.5 * (4.0 * PI).ln() - 1.0),
            term("energy", -4.0 * s * i),
            term("entropy", -0.5 * e),
            term("origin charge", -(4.0 * c + 1.0) * u0),
        ],
        vec![
            term("charges", alpha * alpha + 0.5 * alpha + c * c + 0.5 * c),
            term("universal", 5.0 / 12.0),
        ],
        vec![
            term("energy", -2.0 * s * s * i),
            term("entropy", -0.5 * s * e),
            term("origin charge", -s * (4.0 * c + 1.0) * u0),
            term("density at origin", (c * c + c + 5.0 / 24.0) * f.rho0.ln()),
            term(
                "density at infinity",
                (alpha * alpha + alpha + 5.0 / 24.0) * f.rho_tilde0.ln(),
            ),
            term("gaussian", s * (log_two_pi() - 0.5)),
            term("zeta", 4.0 * zeta_prime_minus_one()),
            term("barnes", -barnes),
            term("universal", -5.0 / 24.0),
            term("curvature", -f.curvature_integral / 12.0),
        ],
    ];
    Ok(ExpansionCoefficients::from_terms(Kind::Pfaffian, alpha, c, terms))
}

/// Dispatches to [`det_coefficients`] or [`pfaff_coefficients`].
pub fn coefficients(f: &MeasureFunctionals, alpha: f64, c: f64, kind: Kind) -> Result<ExpansionCoefficients> {
    match kind {
        Kind::Determinantal => det_coefficients(f, alpha, c),
        Kind::Pfaffian => pfaff_coefficients(f, alpha, c),
    }
}

/// The expansion regrouped in powers of the total charge `n = N + α + c + 1`, so that the
/// energy multiplies `n²` and the entropy and origin-charge terms multiply `n`.
///
/// This is an exact algebraic rearrangement of the `N`-form; the constant therefore carries
/// `½(α+c+1)(log 2π − 1)` (determinantal) or `(α+c+1)(log 2π − ½)` (Pfaffian).
pub fn evaluate_n_form(f: &MeasureFunctionals, params: &EnsembleParams) -> Result<f64> {
    let (alpha, c) = (params.alpha, params.c);
    let s = alpha + c + 1.0;
    let nn = params.n_particles as f64;
    let n = params.total_charge();
    let terms = match params.kind {
        Kind::Determinantal => vec![
            -f.energy * n * n,
            0.5 * nn * nn.ln(),
            -(0.5 * f.entropy + 2.0 * c * f.u_zero) * n,
            (0.5 * log_two_pi() - 1.0) * nn,
            (0.5 * (alpha * alpha + c * c) + 1.0 / 3.0) * nn.ln(),
            0.5 * (c * c + c + 1.0 / 3.0) * f.rho0.ln(),
            0.5 * (alpha * alpha + alpha + 1.0 / 3.0) * f.rho_tilde0.ln(),
            0.5 * s * (log_two_pi() - 1.0),
            2.0 * zeta_prime_minus_one(),
            -(log_barnes_g(c + 1.0)? + log_barnes_g(alpha + 1.0)?),
            -5.0 / 12.0,
            -f.curvature_integral / 6.0,
        ],
        Kind::Pfaffian => vec![
            -2.0 * f.energy * n * n,
            0.5 * nn * nn.ln(),
            -(0.5 * f.entropy + (4.0 * c + 1.0) * f.u_zero) * n,
            (0.5 * (4.0 * PI).ln() - 1.0) * nn,
            (alpha * alpha + 0.5 * alpha + c * c + 0.5 * c + 5.0 / 12.0) * nn.ln(),
            (c * c + c + 5.0 / 24.0) * f.rho0.ln(),
            (alpha * alpha + alpha + 5.0 / 24.0) * f.rho_tilde0.ln(),
            s * (log_two_pi() - 0.5),
            4.0 * zeta_prime_minus_one(),
            -(log_barnes_g(c + 1.0)?
                + log_barnes_g(c + 1.5)?
                + log_barnes_g(alpha + 1.0)?
                + log_barnes_g(alpha + 1.5)?),
            -5.0 / 24.0,
            -f.curvature_integral / 12.0,
        ],
    };
    Ok(compensated_sum(terms))
}

/// Coefficients of the explicit expansion of the induced spherical ensemble, written
/// directly in terms of `α`, `c` and `a = α + c`.
pub fn spherical_example_coefficients(alpha: f64, c: f64, kind: Kind) -> Result<[f64; 5]> {
    let a = alpha + c;
    let z = zeta_prime_minus_one();
    let l2p = log_two_pi();
    Ok(match kind {
        Kind::Determinantal => [
            -0.5,
            0.5,
            0.5 * l2p - 1.0 - a,
            0.5 * (alpha * alpha + c * c) + 1.0 / 3.0,
            0.5 * l2p - 1.0 / 12.0 + 2.0 * z
                - 0.5 * a * (a + 1.0 - l2p)
                - log_barnes_g(alpha + 1.0)?
                - log_barnes_g(c + 1.0)?,
        ],
        Kind::Pfaffian => [
            -1.0,
            0.5,
            0.5 * (4.0 * PI).ln() - 2.0 - 2.0 * a,
            alpha * alpha + 0.5 * alpha + c * c + 0.5 * c + 5.0 / 12.0,
            l2p - 13.0 / 24.0 + 4.0 * z
                - 0.5 * a * (2.0 * a + 3.0 - 2.0 * l2p)
                - log_barnes_g(c + 1.0)?
                - log_barnes_g(c + 1.5)?
                - log_barnes_g(alpha + 1.0)?
                - log_barnes_g(alpha + 1.5)?,
        ],
    })
}

/// The explicit spherical-ensemble expansion at `params`.
pub fn spherical_example_expansion(params: &EnsembleParams) -> Result<f64> {
    let k = spherical_example_coefficients(params.alpha, params.c, params.kind)?;
    Ok(evaluate(&k, params.n_particles))
}

/// Exact and predicted `log Z` over a grid of particle numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub measure: String,
    pub kind: Kind,
    pub alpha: f64,
    pub c: f64,
    pub n_grid: Vec<usize>,
    pub exact: Vec<f64>,
    pub predicted: Vec<f64>,
    /// `exact − predicted`.
    pub residual: Vec<f64>,
    /// Least-squares coefficients of `{N², N log N, N, log N, 1}` fitted to `exact`.
    pub fitted_constants: Option<[f64; 5]>,
}

/// Computes exact `log Z` and the five-term prediction at every grid point, in parallel.
///
/// With `fit` set and at least five grid points, the coefficients are also recovered by
/// least squares from the exact values alone.
pub fn residual_sweep<M: RadialMeasure + Clone>(
    template: &ChargedEnsemble<M>,
    n_grid: &[usize],
    fit: bool,
) -> Result<ResidualReport> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 2 {
        return Err(Error::InvalidParameter(
            "particle-number grid must be strictly ascending with every entry at least 2".into(),
        ));
    }
    let f = functionals(template.measure())?;
    let k = coefficients(&f, template.alpha(), template.c(), template.kind())?;
    let exact: Vec<f64> = n_grid
        .par_iter()
        .map(|&n| Ok(log_z_exact(&template.with_particles(n)?, false)?.log_z))
        .collect::<Result<_>>()?;
    let predicted: Vec<f64> = n_grid.iter().map(|&n| k.evaluate(n)).collect();
    let residual = exact.iter().zip(&predicted).map(|(e, p)| e - p).collect();
    let fitted_constants = if fit {
        Some(fit_expansion(n_grid, &exact)?)
    } else {
        None
    };
    Ok(ResidualReport {
        measure: template.measure().label(),
        kind: template.kind(),
        alpha: template.alpha(),
        c: template.c(),
        n_grid: n_grid.to_vec(),
        exact,
        predicted,
        residual,
        fitted_constants,
    })
}

/// Least-squares coefficients of `{N², N log N, N, log N, 1}` for `values` sampled at `ns`.
///
/// Columns are scaled to unit maximum before the SVD solve.
pub fn fit_expansion(ns: &[usize], values: &[f64]) -> Result<[f64; 5]> {
    if ns.len() != values.len() || ns.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "need at least five samples to fit five coefficients, got {}",
            ns.len().min(values.len())
        )));
    }
    let rows = ns.len();
    let mut a = DMatrix::from_fn(rows, 5, |i, j| basis(ns[i] as f64)[j]);
    let mut scale = [1.0; 5];
    for (j, sc) in scale.iter_mut().enumerate() {
        let m = a.column(j).amax();
        if m > 0.0 {
            *sc = m;
            a.column_mut(j).scale_mut(1.0 / m);
        }
    }
    let b = DVector::from_column_slice(values);
    let x = a
        .svd(true, true)
        .solve(&b, 0.0)
        .map_err(|e| Error::InvalidParameter(format!("least-squares solve failed: {e}")))?;
    Ok(std::array::from_fn(|j| x[j] / scale[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::log_z_spherical_closed_form;
    use crate::measure::BuiltinMeasure;

    fn spherical_functionals() -> MeasureFunctionals {
        functionals(&BuiltinMeasure::spherical()).unwrap()
    }

    #[test]
    fn structural_constants() {
        let f = functionals(&BuiltinMeasure::mixture(0.3, 1.7).unwrap()).unwrap();
        for (alpha, c) in [(0.0, 0.0), (0.5, 2.0), (3.0, 0.25)] {
            let d = det_coefficients(&f, alpha, c).unwrap();
            let p = pfaff_coefficients(&f, alpha, c).unwrap();
            assert_eq!(d.values[1], 0.5);
            assert_eq!(p.values[1], 0.5);
            assert_eq!(d.values[3], (alpha * alpha + c * c) / 2.0 + 1.0 / 3.0);
            assert_eq!(p.values[3], alpha * alpha + alpha / 2.0 + c * c + c / 2.0 + 5.0 / 12.0);
            assert_eq!(d.values[0], -f.energy);
            assert_eq!(p.values[0], -2.0 * f.energy);
            assert_eq!(det_coefficients(&f, c, alpha).unwrap().values[3], d.values[3]);
        }
    }

    #[test]
    fn breakdown_sums_exactly() {
        let f = functionals(&BuiltinMeasure::scaled(2.5).unwrap()).unwrap();
        for kind in [Kind::Determinantal, Kind::Pfaffian] {
            let k = coefficients(&f, 1.3, 0.4, kind).unwrap();
            for (value, terms) in k.values.iter().zip(&k.terms) {
                assert_eq!(*value, sum_terms(terms));
            }
        }
    }

    #[test]
    fn spherical_values_at_zero_charge() {
        let f = spherical_functionals();
        let z = zeta_prime_minus_one();
        let d = det_coefficients(&f, 0.0, 0.0).unwrap().values;
        let expected = [
            -0.5,
            0.5,
            0.5 * log_two_pi() - 1.0,
            1.0 / 3.0,
            0.5 * log_two_pi() - 1.0 / 12.0 + 2.0 * z,
        ];
        for (x, y) in d.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        let p = pfaff_coefficients(&f, 0.0, 0.0).unwrap().values;
        let expected = [
            -1.0,
            0.5,
            0.5 * (4.0 * PI).ln() - 2.0,
            5.0 / 12.0,
            0.5 * log_two_pi() - 13.0 / 24.0 + 5.0 / 12.0 * 2f64.ln() + z,
        ];
        for (x, y) in p.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn scaled_leading_coefficient() {
        let a: f64 = 3.0;
        let f = functionals(&BuiltinMeasure::scaled(a).unwrap()).unwrap();
        let k = det_coefficients(&f, 0.0, 0.0).unwrap();
        assert!((k.values[0] + 0.5 + a.ln()).abs() < 1e-12);
    }

    #[test]
    fn evaluate_trivial_cases() {
        assert_eq!(evaluate(&[0.0, 0.0, 0.0, 0.0, 2.5], 17), 2.5);
        let f = spherical_functionals();
        let k = det_coefficients(&f, 0.0, 0.0).unwrap();
        let at_one = -0.5 + (0.5 * log_two_pi() - 1.0) + k.values[4];
        assert!((k.evaluate(1) - at_one).abs() < 1e-15);
    }

    #[test]
    fn n_form_is_a_rearrangement() {
        for m in [BuiltinMeasure::spherical(), BuiltinMeasure::mixture(0.5, 2.0).unwrap()] {
            let f = functionals(&m).unwrap();
            for kind in [Kind::Determinantal, Kind::Pfaffian] {
                for (n, alpha, c) in [(100, 1.0, 0.0), (1000, 0.0, 0.0), (37, 0.5, 1.7)] {
                    let p = EnsembleParams::new(n, alpha, c, kind).unwrap();
                    let n_form = evaluate_n_form(&f, &p).unwrap();
                    let c_form = coefficients(&f, alpha, c, kind).unwrap().evaluate(n);
                    assert!(
                        (n_form - c_form).abs() <= 1e-12 * c_form.abs().max(1.0),
                        "{kind:?} N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn n_form_energy_multiplies_total_charge_squared() {
        let f = spherical_functionals();
        let mut shifted = f;
        shifted.energy += 1.0;
        for (kind, factor) in [(Kind::Determinantal, 1.0), (Kind::Pfaffian, 2.0)] {
            let p = EnsembleParams::new(50, 0.5, 0.5, kind).unwrap();
            let d = evaluate_n_form(&shifted, &p).unwrap() - evaluate_n_form(&f, &p).unwrap();
            let n = p.total_charge();
            assert!((d + factor * n * n).abs() < 1e-9);
        }
    }

    #[test]
    fn theorem_matches_spherical_example() {
        let f = spherical_functionals();
        let charges = [0.0, 0.5, 1.0, 1.7];
        for kind in [Kind::Determinantal, Kind::Pfaffian] {
            for alpha in charges {
                for c in charges {
                    let k = coefficients(&f, alpha, c, kind).unwrap().values;
                    let e = spherical_example_coefficients(alpha, c, kind).unwrap();
                    for i in 0..5 {
                        assert!((k[i] - e[i]).abs() <= 1e-12, "{kind:?} α={alpha} c={c} #{i}");
                    }
                }
            }
        }
    }

    #[test]
    fn spherical_example_residual_decays_like_inverse_n() {
        for kind in [Kind::Determinantal, Kind::Pfaffian] {
            let r = |n: usize| {
                let p = EnsembleParams::new(n, 0.5, 0.25, kind).unwrap();
                log_z_spherical_closed_form(&p).unwrap() - spherical_example_expansion(&p).unwrap()
            };
            for n in [100, 200] {
                let ratio = r(2 * n) / r(n);
                assert!((0.3..=0.7).contains(&ratio), "{kind:?} N={n}: {ratio}");
            }
        }
    }

    #[test]
    fn sweep_on_spherical_ensemble() {
        let e = ChargedEnsemble::new(BuiltinMeasure::spherical(), 2, 0.0, 0.0, Kind::Determinantal).unwrap();
        let report = residual_sweep(&e, &[50, 100, 200, 400], false).unwrap();
        assert_eq!(report.residual.len(), 4);
        for i in 0..4 {
            assert_eq!(report.residual[i], report.exact[i] - report.predicted[i]);
        }
        let scaled: Vec<f64> = report
            .n_grid
            .iter()
            .zip(&report.residual)
            .map(|(&n, r)| r * n as f64)
            .collect();
        for w in scaled.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() < 0.05, "{scaled:?}");
        }
        assert!(residual_sweep(&e, &[100, 50], false).is_err());
        assert!(residual_sweep(&e, &[1, 50], false).is_err());
        assert!(residual_sweep(&e, &[], false).is_err());
    }

    #[test]
    fn fit_recovers_spherical_leading_coefficient() {
        let grid: Vec<usize> = (100..=400).step_by(25).collect();
        let exact: Vec<f64> = grid
            .iter()
            .map(|&n| {
                log_z_spherical_closed_form(&EnsembleParams::new(n, 0.0, 0.0, Kind::Determinantal).unwrap()).unwrap()
            })
            .collect();
        let k = fit_expansion(&grid, &exact).unwrap();
        assert!((k[0] + 0.5).abs() < 1e-5, "{k:?}");
        assert!(fit_expansion(&grid[..4], &exact[..4]).is_err());
    }

    #[test]
    fn fit_is_exact_on_synthetic_data() {
        let truth = [-0.7, 0.5, 1.3, -0.25, 2.0];
        let grid: Vec<usize> = (10..=200).step_by(10).collect();
        let values: Vec<f64> = grid.iter().map(|&n| evaluate(&truth, n)).collect();
        let k = fit_expansion(&grid, &values).unwrap();
        for (x, y) in k.iter().zip(truth) {
            assert!((x - y).abs() < 1e-6, "{k:?}");
        }
    }
}
