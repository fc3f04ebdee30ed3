use std::process::Command;

use serde_json::Value;
use spherical_gas_cli::{run, EXIT_COMPUTATION, EXIT_OK, EXIT_USAGE, THREADS_ENV};

fn invoke(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("spherical-gas").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn free_energy_of_two_particles() {
    let v = json(&[
        "free-energy",
        "--measure",
        "spherical",
        "--N",
        "2",
        "--alpha",
        "0",
        "--c",
        "0",
        "--kind",
        "det",
    ]);
    let log_z = v["log_z"].as_f64().unwrap();
    assert!((log_z - 0.5f64.ln()).abs() < 1e-14);
    assert_eq!(v["geometry"], "plane");
    assert_eq!(v["params"]["kind"], "determinantal");
}

#[test]
fn sphere_geometry_adds_power_of_two() {
    let plane = json(&["free-energy", "--N", "7", "--kind", "pfaff"]);
    let sphere = json(&["free-energy", "--N", "7", "--kind", "pfaff", "--geometry", "sphere"]);
    let diff = sphere["log_z"].as_f64().unwrap() - plane["log_z"].as_f64().unwrap();
    assert!((diff - 98.0 * std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn spherical_functionals() {
    let v = json(&["functionals", "--measure", "spherical"]);
    assert!((v["energy"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["entropy"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!(v["u_zero"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["measure"], "spherical");
}

#[test]
fn numbers_carry_seventeen_digits() {
    let (_, out, _) = invoke(&["functionals"]);
    let f = spherical_gas::measure::functionals(&spherical_gas::BuiltinMeasure::spherical()).unwrap();
    let direct = [
        f.energy,
        f.entropy,
        f.u_zero,
        f.rho0,
        f.rho_tilde0,
        f.curvature_integral,
    ];
    for (key, value) in [
        "energy",
        "entropy",
        "u_zero",
        "rho0",
        "rho_tilde0",
        "curvature_integral",
    ]
    .into_iter()
    .zip(direct)
    {
        let start = out.find(&format!("\"{key}\":")).unwrap() + key.len() + 3;
        let literal: String = out[start..].chars().take_while(|ch| !matches!(ch, ',' | '}')).collect();
        let mantissa = literal.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{literal}");
        assert_eq!(literal.parse::<f64>().unwrap().to_bits(), value.to_bits(), "{key}");
    }
}

#[test]
fn norms_csv_columns() {
    let (code, out, _) = invoke(&["--format", "csv", "norms", "--N", "4"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "j,tau,peak,log_h,err_estimate");
    assert_eq!(lines.len(), 5);
    let log_h: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!((log_h + 12f64.ln()).abs() < 1e-13);
}

#[test]
fn residuals_csv_columns() {
    let (code, out, _) = invoke(&["residuals", "--n-grid", "50,100", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "N,exact,predicted,residual");
    assert!(lines[1].starts_with("50,"));
    assert!(lines[2].starts_with("100,"));
}

#[test]
fn residual_fit_in_json() {
    let v = json(&["residuals", "--n-grid", "100,150,200,250,300,350,400", "--fit"]);
    let fitted = v["fitted_constants"].as_array().unwrap();
    assert!((fitted[0].as_f64().unwrap() + 0.5).abs() < 1e-5);
    assert_eq!(v["residual"].as_array().unwrap().len(), 7);
}

#[test]
fn expansion_with_value() {
    let v = json(&["expansion", "--N", "100", "--alpha", "1"]);
    let value = v["value"].as_f64().unwrap();
    let n_form = v["n_form_value"].as_f64().unwrap();
    assert!((value - n_form).abs() < 1e-9 * value.abs());
    assert_eq!(v["coefficients"]["values"][1].as_f64().unwrap(), 0.5);
}

#[test]
fn invalid_arguments_exit_two() {
    for args in [
        &["free-energy", "--N", "3", "--alpha", "-1"][..],
        &["free-energy", "--N", "0"],
        &["norms", "--N", "3", "--measure", "gaussian"],
        &["residuals", "--n-grid", "100,50"],
        &["free-energy"],
        &["frobnicate"],
        &["norms", "--N", "3", "--n-grid", "4"],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("free-energy"));
}

#[test]
fn output_is_independent_of_threads() {
    let args = |t: &'static str| {
        [
            "--threads",
            t,
            "free-energy",
            "--N",
            "120",
            "--measure",
            "mixture:theta=0.5,a=2",
            "--breakdown",
        ]
    };
    let (_, one, _) = invoke(&args("1"));
    let (_, four, _) = invoke(&args("4"));
    assert_eq!(one, four);
}

#[test]
fn binary_exit_codes_and_thread_variable() {
    let exe = env!("CARGO_BIN_EXE_spherical-gas");
    let ok = Command::new(exe)
        .args(["free-energy", "--N", "2"])
        .env(THREADS_ENV, "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK as i32));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!((v["log_z"].as_f64().unwrap() - 0.5f64.ln()).abs() < 1e-14);

    let bad = Command::new(exe)
        .args(["free-energy", "--N", "2"])
        .env(THREADS_ENV, "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE as i32));
    assert_ne!(EXIT_COMPUTATION, EXIT_USAGE);
}

#[test]
fn verify_passes() {
    let (code, out, err) = invoke(&["verify"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 9);
    assert_eq!(err.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
}
