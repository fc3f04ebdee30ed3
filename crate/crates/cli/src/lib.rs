//! Command-line front end: parses measure specs and charges, runs a computation and writes
//! JSON or CSV to standard output.
//!
//! Exit status: 0 on success, 1 when a computation fails, 2 on invalid arguments and 3 when
//! the verification suite reports a failing criterion.

mod output;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spherical_gas::acceptance::{self, CriterionReport};
use spherical_gas::expansion::{coefficients, evaluate_n_form, residual_sweep, ExpansionCoefficients};
use spherical_gas::free_energy::{log_z_exact, to_sphere_geometry, Geometry};
use spherical_gas::measure::{functionals, MeasureFunctionals};
use spherical_gas::norms::{all_log_norms, ChargedEnsemble, EnsembleParams, Kind, LogNorm};
use spherical_gas::{BuiltinMeasure, Error};

use output::{float, write_csv, write_json};

/// Environment variable consulted for the worker count when `--threads` is not given.
pub const THREADS_ENV: &str = "SPHERICAL_GAS_THREADS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_COMPUTATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spherical-gas",
    version,
    about = "Free energies of Coulomb gases on the sphere with point charges"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads; 0 picks one per core. Overrides the SPHERICAL_GAS_THREADS variable.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Det,
    Pfaff,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Det => Kind::Determinantal,
            KindArg::Pfaff => Kind::Pfaffian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    Plane,
    Sphere,
}

#[derive(Debug, Args)]
struct MeasureArg {
    /// Background measure: `spherical`, `scaled:a=<a>` or `mixture:theta=<t>,a=<a>`.
    #[arg(long, default_value = "spherical")]
    measure: String,
}

#[derive(Debug, Args)]
struct ChargeArgs {
    /// Charge at infinity.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Charge at the origin.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Det)]
    kind: KindArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy, entropy and the other functionals of the measure.
    Functionals {
        #[command(flatten)]
        measure: MeasureArg,
    },
    /// Every norm log h_j of the ensemble. CSV columns: j, tau, peak, log_h, err_estimate.
    Norms {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        charges: ChargeArgs,
    },
    /// Exact log Z from the norms.
    FreeEnergy {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        charges: ChargeArgs,
        #[arg(long, value_enum, default_value_t = GeometryArg::Plane)]
        geometry: GeometryArg,
        /// Include every summed norm in the output.
        #[arg(long)]
        breakdown: bool,
    },
    /// Expansion coefficients, optionally evaluated at a particle number.
    Expansion {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long = "N")]
        n: Option<usize>,
        #[command(flatten)]
        charges: ChargeArgs,
    },
    /// Exact against predicted log Z over a grid. CSV columns: N, exact, predicted, residual.
    Residuals {
        #[command(flatten)]
        measure: MeasureArg,
        /// Comma-separated ascending particle numbers, each at least 2.
        #[arg(long = "n-grid", value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[command(flatten)]
        charges: ChargeArgs,
        /// Also recover the five coefficients by least squares.
        #[arg(long)]
        fit: bool,
    },
    /// Run the acceptance suite.
    Verify,
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_COMPUTATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_COMPUTATION,
            message: format!("write failed: {e}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn thread_count(cli: &Cli) -> Result<usize, Failure> {
    if let Some(t) = cli.threads {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn execute<O: Write, E: Write>(cli: &Cli, out: &mut O, err: &mut E) -> Result<u8, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cli)?)
        .build()
        .map_err(|e| Failure {
            code: EXIT_COMPUTATION,
            message: format!("cannot start worker threads: {e}"),
        })?;
    let (mut doc, mut notes) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(cli, &mut doc, &mut notes));
    err.write_all(&notes)?;
    out.write_all(&doc)?;
    result
}

fn parse_measure(arg: &MeasureArg) -> Result<BuiltinMeasure, Failure> {
    arg.measure.parse::<BuiltinMeasure>().map_err(|e| usage(e.to_string()))
}

fn ensemble(measure: &MeasureArg, n: usize, charges: &ChargeArgs) -> Result<ChargedEnsemble, Failure> {
    Ok(ChargedEnsemble::new(
        parse_measure(measure)?,
        n,
        charges.alpha,
        charges.c,
        charges.kind.into(),
    )?)
}

#[derive(Serialize)]
struct FunctionalsDoc {
    measure: String,
    #[serde(flatten)]
    functionals: MeasureFunctionals,
}

#[derive(Serialize)]
struct NormsDoc<'a> {
    measure: String,
    params: EnsembleParams,
    norms: &'a [LogNorm],
}

#[derive(Serialize)]
struct ExpansionDoc {
    measure: String,
    functionals: MeasureFunctionals,
    coefficients: ExpansionCoefficients,
    n_particles: Option<usize>,
    value: Option<f64>,
    n_form_value: Option<f64>,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    passed: bool,
    criteria: &'a [CriterionReport],
}

fn dispatch<O: Write, E: Write>(cli: &Cli, out: &mut O, err: &mut E) -> Result<u8, Failure> {
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Functionals { measure } => {
            let m = parse_measure(measure)?;
            let f = functionals(&m)?;
            if csv {
                let rows = [
                    ("energy", f.energy),
                    ("entropy", f.entropy),
                    ("u_zero", f.u_zero),
                    ("rho0", f.rho0),
                    ("rho_tilde0", f.rho_tilde0),
                    ("curvature_integral", f.curvature_integral),
                ];
                write_csv(
                    out,
                    &["functional", "value"],
                    rows.iter().map(|(k, v)| vec![k.to_string(), float(*v)]),
                )?;
            } else {
                write_json(
                    out,
                    &FunctionalsDoc {
                        measure: m.to_string(),
                        functionals: f,
                    },
                )?;
            }
        }
        Command::Norms { measure, n, charges } => {
            let e = ensemble(measure, *n, charges)?;
            let norms = all_log_norms(&e)?;
            if csv {
                write_csv(
                    out,
                    &["j", "tau", "peak", "log_h", "err_estimate"],
                    norms.iter().map(|h| {
                        vec![
                            h.j.to_string(),
                            float(h.tau),
                            float(h.peak),
                            float(h.log_value),
                            float(h.quadrature_error),
                        ]
                    }),
                )?;
            } else {
                write_json(
                    out,
                    &NormsDoc {
                        measure: e.measure().to_string(),
                        params: e.params(),
                        norms: &norms,
                    },
                )?;
            }
        }
        Command::FreeEnergy {
            measure,
            n,
            charges,
            geometry,
            breakdown,
        } => {
            let e = ensemble(measure, *n, charges)?;
            let mut fe = log_z_exact(&e, *breakdown)?;
            if *geometry == GeometryArg::Sphere {
                fe = to_sphere_geometry(&fe)?;
            }
            if csv {
                let geometry = match fe.geometry {
                    Geometry::Plane => "plane",
                    Geometry::Sphere => "sphere",
                };
                write_csv(
                    out,
                    &["N", "kind", "alpha", "c", "geometry", "log_z"],
                    [vec![
                        fe.params.n_particles.to_string(),
                        fe.params.kind.name().to_string(),
                        float(fe.params.alpha),
                        float(fe.params.c),
                        geometry.to_string(),
                        float(fe.log_z),
                    ]],
                )?;
            } else {
                write_json(out, &fe)?;
            }
        }
        Command::Expansion { measure, n, charges } => {
            let m = parse_measure(measure)?;
            let f = functionals(&m)?;
            let k = coefficients(&f, charges.alpha, charges.c, charges.kind.into())?;
            let (value, n_form_value) = match n {
                Some(n) => {
                    let p = EnsembleParams::new(*n, charges.alpha, charges.c, charges.kind.into())?;
                    (Some(k.evaluate(*n)), Some(evaluate_n_form(&f, &p)?))
                }
                None => {
                    EnsembleParams::new(1, charges.alpha, charges.c, charges.kind.into())?;
                    (None, None)
                }
            };
            if csv {
                let names = ["k1", "k2", "k3", "k4", "k5"];
                let mut rows: Vec<Vec<String>> = names
                    .iter()
                    .zip(k.values)
                    .map(|(name, v)| vec![name.to_string(), float(v)])
                    .collect();
                if let (Some(v), Some(nf)) = (value, n_form_value) {
                    rows.push(vec!["value".into(), float(v)]);
                    rows.push(vec!["n_form_value".into(), float(nf)]);
                }
                write_csv(out, &["coefficient", "value"], rows)?;
            } else {
                write_json(
                    out,
                    &ExpansionDoc {
                        measure: m.to_string(),
                        functionals: f,
                        coefficients: k,
                        n_particles: *n,
                        value,
                        n_form_value,
                    },
                )?;
            }
        }
        Command::Residuals {
            measure,
            n_grid,
            charges,
            fit,
        } => {
            let template = ensemble(measure, 2, charges)?;
            let report = residual_sweep(&template, n_grid, *fit)?;
            if csv {
                write_csv(
                    out,
                    &["N", "exact", "predicted", "residual"],
                    (0..report.n_grid.len()).map(|i| {
                        vec![
                            report.n_grid[i].to_string(),
                            float(report.exact[i]),
                            float(report.predicted[i]),
                            float(report.residual[i]),
                        ]
                    }),
                )?;
            } else {
                write_json(out, &report)?;
            }
        }
        Command::Verify => {
            let reports = acceptance::run_all();
            for r in &reports {
                writeln!(err, "{r}")?;
            }
            let passed = reports.iter().all(|r| r.passed);
            if csv {
                write_csv(
                    out,
                    &["id", "name", "passed", "elapsed_seconds", "detail"],
                    reports.iter().map(|r| {
                        vec![
                            r.id.to_string(),
                            r.name.to_string(),
                            r.passed.to_string(),
                            float(r.elapsed_seconds),
                            r.detail.clone(),
                        ]
                    }),
                )?;
            } else {
                write_json(
                    out,
                    &VerifyDoc {
                        passed,
                        criteria: &reports,
                    },
                )?;
            }
            return Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION });
        }
    }
    Ok(EXIT_OK)
}
