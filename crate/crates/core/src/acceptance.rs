//! The acceptance suite: closed-form oracles, algebraic cross-checks and decay laws that a
//! correct build must satisfy. Shared by the integration tests and the `verify` command.

use std::f64::consts::LN_2;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::expansion::{coefficients, residual_sweep, spherical_example_coefficients};
use crate::free_energy::{log_z_exact, log_z_spherical_closed_form, to_sphere_geometry};
use crate::measure::{functionals, BuiltinMeasure};
use crate::norms::{
    log_norm, predicted_log_norm_bulk, predicted_log_norm_infinity, predicted_log_norm_origin,
    spherical_log_norm_closed_form, ChargedEnsemble, EnsembleParams, Kind,
};
use crate::specfun::{log_barnes_g, log_factorial, log_gamma, SpecialConstants};

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_seconds: f64,
    pub time_limit_seconds: Option<f64>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {}: {} ({:.2}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_seconds,
            self.detail
        )
    }
}

const KINDS: [Kind; 2] = [Kind::Determinantal, Kind::Pfaffian];

/// Result of a check body: pass flag and a one-line summary.
type Outcome = Result<(bool, String)>;

fn timed(id: u8, name: &'static str, limit: Option<f64>, body: impl FnOnce() -> Outcome) -> CriterionReport {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; exceeded time limit of {limit}s"));
        }
    }
    CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed_seconds: elapsed,
        time_limit_seconds: limit,
    }
}

fn charge_pairs(values: &[f64]) -> Vec<(f64, f64)> {
    values
        .iter()
        .flat_map(|&a| values.iter().map(move |&c| (a, c)))
        .collect()
}

/// 1. Quadrature norms of the spherical ensemble against the Beta-function closed form.
pub fn beta_norm_oracle() -> CriterionReport {
    timed(1, "Beta-function norm oracle", Some(10.0), || {
        let n = 64;
        let mut worst: f64 = 0.0;
        for kind in KINDS {
            for (alpha, c) in charge_pairs(&[0.0, 0.5, 1.7]) {
                let e = ChargedEnsemble::new(BuiltinMeasure::spherical(), n, alpha, c, kind)?;
                for j in 0..e.params().index_bound() {
                    let got = log_norm(&e, j)?.log_value;
                    let want = spherical_log_norm_closed_form(&e.params(), j)?;
                    worst = worst.max((got - want).abs() / want.abs().max(1.0));
                }
            }
        }
        Ok((worst <= 1e-10, format!("max relative error {worst:.3e} (limit 1e-10)")))
    })
}

/// 2. Exact `log Z` from norms against the Γ/Barnes-G closed form.
pub fn partition_function_oracle() -> CriterionReport {
    timed(2, "Partition-function oracle", Some(30.0), || {
        let mut worst: f64 = 0.0;
        let sizes: Vec<usize> = (1..=32).chain([64, 128]).collect();
        for kind in KINDS {
            for (alpha, c) in charge_pairs(&[0.0, 0.5, 1.7]) {
                for &n in &sizes {
                    let e = ChargedEnsemble::new(BuiltinMeasure::spherical(), n, alpha, c, kind)?;
                    let exact = log_z_exact(&e, false)?.log_z;
                    let closed = log_z_spherical_closed_form(&e.params())?;
                    worst = worst.max((exact - closed).abs());
                }
            }
        }
        Ok((worst <= 1e-8, format!("max absolute error {worst:.3e} (limit 1e-8)")))
    })
}

/// 3. General coefficients on spherical functionals against the explicit spherical expansion.
pub fn theorem_example_consistency() -> CriterionReport {
    timed(3, "Theorem-vs-Example consistency", None, || {
        let f = functionals(&BuiltinMeasure::spherical())?;
        let mut worst: f64 = 0.0;
        let mut exact_quadratic = true;
        for kind in KINDS {
            for (alpha, c) in charge_pairs(&[0.0, 0.5, 1.0, 1.7]) {
                let k = coefficients(&f, alpha, c, kind)?;
                let e = spherical_example_coefficients(alpha, c, kind)?;
                for (x, y) in k.values.iter().zip(e) {
                    worst = worst.max((x - y).abs());
                }
                let log_coefficient = match kind {
                    Kind::Determinantal => (alpha * alpha + c * c) / 2.0 + 1.0 / 3.0,
                    Kind::Pfaffian => alpha * alpha + alpha / 2.0 + c * c + c / 2.0 + 5.0 / 12.0,
                };
                exact_quadratic &= k.values[3] == log_coefficient;
            }
        }
        Ok((
            worst <= 1e-12 && exact_quadratic,
            format!("max coefficient deviation {worst:.3e} (limit 1e-12); log N coefficients exact: {exact_quadratic}"),
        ))
    })
}

/// 4. The five-term expansion of the spherical ensemble misses the closed form by `O(1/N)`.
pub fn spherical_residual_law() -> CriterionReport {
    timed(4, "O(1/N) residual law on the spherical ensemble", Some(5.0), || {
        let f = functionals(&BuiltinMeasure::spherical())?;
        let mut passed = true;
        let mut parts = Vec::new();
        for kind in KINDS {
            let k = coefficients(&f, 0.0, 0.0, kind)?;
            let r = |n: usize| -> Result<f64> {
                Ok(log_z_spherical_closed_form(&EnsembleParams::new(n, 0.0, 0.0, kind)?)? - k.evaluate(n))
            };
            let (r100, r200, r400) = (r(100)?, r(200)?, r(400)?);
            let ratios = [r200 / r100, r400 / r200];
            let scaled = (r400 * 400.0).abs();
            passed &= ratios.iter().all(|q| (0.35..=0.65).contains(q)) && scaled <= 10.0;
            parts.push(format!(
                "{}: ratios {:.4}, {:.4}, |r(400)|*400 = {scaled:.4}",
                kind.name(),
                ratios[0],
                ratios[1]
            ));
        }
        Ok((passed, parts.join("; ")))
    })
}

/// 5. Exact `log Z` of a non-spherical measure against the general coefficients.
///
/// Monotone decay is checked on `{50, 100, 200, 400}`; the five-parameter least-squares fit
/// uses the denser grid `50, 75, …, 400`, since four points cannot determine five unknowns.
pub fn general_measure_check() -> CriterionReport {
    timed(5, "General-measure expansion check", Some(120.0), || {
        let m = BuiltinMeasure::mixture(0.5, 2.0)?;
        let e = ChargedEnsemble::new(m, 2, 0.0, 0.0, Kind::Determinantal)?;
        let coarse = residual_sweep(&e, &[50, 100, 200, 400], false)?;
        let decreasing = coarse.residual.windows(2).all(|w| w[1].abs() < w[0].abs());

        let grid: Vec<usize> = (50..=400).step_by(25).collect();
        let dense = residual_sweep(&e, &grid, true)?;
        let fitted = dense.fitted_constants.expect("fit requested");
        let k = coefficients(&functionals(&m)?, 0.0, 0.0, Kind::Determinantal)?.values;
        let errors = [
            (fitted[0] - k[0]).abs(),
            (fitted[1] - k[1]).abs(),
            (fitted[2] - k[2]).abs(),
        ];
        let within = errors[0] <= 1e-4 && errors[1] <= 1e-3 && errors[2] <= 1e-2;
        let residuals: Vec<String> = coarse.residual.iter().map(|r| format!("{r:.3e}")).collect();
        Ok((
            decreasing && within,
            format!(
                "residuals [{}] decreasing: {decreasing}; fit errors C1 {:.2e}, C2 {:.2e}, C3 {:.2e}; \
                 fitted constant {:.6} vs predicted {:.6}",
                residuals.join(", "),
                errors[0],
                errors[1],
                errors[2],
                fitted[4],
                k[4]
            ),
        ))
    })
}

/// 6. Origin, bulk and infinity predictors converge to the exact norms.
pub fn regime_predictor_decay() -> CriterionReport {
    timed(6, "Regime-predictor decay", None, || {
        let error = |alpha: f64, c: f64, n: usize, regime: u8| -> Result<f64> {
            let e = ChargedEnsemble::new(BuiltinMeasure::spherical(), n, alpha, c, Kind::Determinantal)?;
            let (j, predicted) = match regime {
                0 => (0, predicted_log_norm_origin(&e, 0)?),
                1 => (n / 2, predicted_log_norm_bulk(&e, n / 2)?),
                _ => (n - 1, predicted_log_norm_infinity(&e, n - 1)?),
            };
            Ok((predicted - log_norm(&e, j)?.log_value).abs())
        };
        let origin = [error(0.0, 0.7, 100, 0)?, error(0.0, 0.7, 400, 0)?];
        let bulk = [error(0.0, 0.7, 100, 1)?, error(0.0, 0.7, 400, 1)?];
        let infinity = [error(0.7, 0.0, 100, 2)?, error(0.7, 0.0, 400, 2)?];
        let origin_ok = origin[1] <= 0.02 && origin[0] / origin[1] >= 1.7;
        let bulk_ok = bulk[0] / bulk[1] >= 3.0;
        let infinity_ok = infinity[1] <= 0.02 && infinity[0] / infinity[1] >= 1.7;
        Ok((
            origin_ok && bulk_ok && infinity_ok,
            format!(
                "origin {:.3e} -> {:.3e} (x{:.2}); bulk {:.3e} -> {:.3e} (x{:.2}); infinity {:.3e} -> {:.3e} (x{:.2})",
                origin[0],
                origin[1],
                origin[0] / origin[1],
                bulk[0],
                bulk[1],
                bulk[0] / bulk[1],
                infinity[0],
                infinity[1],
                infinity[0] / infinity[1]
            ),
        ))
    })
}

/// 7. Barnes G recursion, the value at 3/2, and integer values.
pub fn special_function_suite() -> CriterionReport {
    timed(7, "Special-function suite", None, || {
        let mut recursion: f64 = 0.0;
        for i in 0..=990 {
            let x = 0.5 + 0.05 * i as f64;
            let r = log_barnes_g(x + 1.0)? - log_barnes_g(x)? - log_gamma(x)?;
            recursion = recursion.max(r.abs());
        }
        let k = SpecialConstants::get();
        let half = (log_barnes_g(1.5)? - (LN_2 / 24.0 + 1.5 * k.zeta_prime_minus_one + 0.25 * k.log_pi)).abs();
        let mut integers: f64 = 0.0;
        let mut product_log = 0.0;
        for n in 1..=30u64 {
            // G(n) = Π_{k=1}^{n−2} k!.
            if n >= 3 {
                product_log += log_factorial(n - 2);
            }
            integers = integers.max((log_barnes_g(n as f64)? - product_log).abs());
        }
        Ok((
            recursion <= 1e-11 && half <= 1e-11 && integers <= 1e-11,
            format!("recursion residual {recursion:.2e}; G(3/2) error {half:.2e}; integer error {integers:.2e} (limit 1e-11)"),
        ))
    })
}

/// 8. Scaling covariance of the measure functionals.
pub fn functional_covariance() -> CriterionReport {
    timed(8, "Measure-functional covariance", None, || {
        let base = functionals(&BuiltinMeasure::spherical())?;
        let mut worst: f64 = 0.0;
        for a in [0.5f64, 2.0, 5.0] {
            let f = functionals(&BuiltinMeasure::scaled(a)?)?;
            let la = a.ln();
            let deviations = [
                f.energy - (base.energy + la),
                f.entropy - (base.entropy - 2.0 * la),
                f.u_zero - (base.u_zero - la),
                f.rho0 / (base.rho0 / (a * a)) - 1.0,
                f.rho_tilde0 / (base.rho_tilde0 * a * a) - 1.0,
                f.curvature_integral - base.curvature_integral,
            ];
            worst = deviations.iter().fold(worst, |w, d| w.max(d.abs()));
        }
        let curvature = (base.curvature_integral + 2.0).abs();
        Ok((
            worst <= 1e-9 && curvature <= 1e-9,
            format!("max covariance deviation {worst:.2e}; spherical curvature error {curvature:.2e} (limit 1e-9)"),
        ))
    })
}

/// 9. Plane-to-sphere conversion adds exactly the power-of-two constant.
pub fn geometry_conversion() -> CriterionReport {
    timed(9, "Geometry conversion", None, || {
        let mut passed = true;
        let mut parts = Vec::new();
        for kind in KINDS {
            for n in [1usize, 2, 7] {
                let e = ChargedEnsemble::new(BuiltinMeasure::spherical(), n, 0.0, 0.0, kind)?;
                let plane = log_z_exact(&e, false)?;
                let sphere = to_sphere_geometry(&plane)?;
                let offset = match kind {
                    Kind::Determinantal => (n * (n - 1)) as f64 * LN_2,
                    Kind::Pfaffian => (2 * n * n) as f64 * LN_2,
                };
                let ok = sphere.log_z == plane.log_z + offset && sphere.to_plane_geometry() == plane;
                passed &= ok;
                parts.push(format!(
                    "{} N={n}: {}",
                    kind.name(),
                    if ok { "exact" } else { "mismatch" }
                ));
            }
        }
        Ok((passed, parts.join(", ")))
    })
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionReport> {
    let checks: [fn() -> CriterionReport; 9] = [
        beta_norm_oracle,
        partition_function_oracle,
        theorem_example_consistency,
        spherical_residual_law,
        general_measure_check,
        regime_predictor_decay,
        special_function_suite,
        functional_covariance,
        geometry_conversion,
    ];
    checks.iter().map(|check| check()).collect()
}
