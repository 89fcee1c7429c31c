use std::fs;
use std::path::Path;
use std::process::Command;

use duplex_cli::{
    run, run_with_model, GeneratorModel, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_OK, EXIT_VALIDATION,
};
use duplex_core::lindblad::closed_loop_hamiltonian;
use duplex_core::SuperOperator;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn duplex(args: &[&str]) -> Outcome {
    with_model(&duplex_cli::ClosedLoop, args)
}

fn with_model(model: &dyn GeneratorModel, args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("duplex").chain(args.iter().copied());
    let code = run_with_model(argv, model, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn steady_record_at_unit_drive() {
    let o = duplex(&[
        "steady",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "1",
        "--phi",
        "0",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(
        o.stdout,
        "omega_sigma,omega_pi,phi,delta,n_e,n_g,rho_sigma_re,rho_sigma_im,rho_pi_re,rho_pi_im,provenance\n\
         1,1,0,0,0.4,0.6,0,0.2,0,0.2,analytic\n"
    );
}

#[test]
fn undriven_steady_state_exits_degenerate_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = duplex(&[
        "steady",
        "--omega-sigma",
        "0",
        "--omega-pi",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_DEGENERATE);
    assert!(o.stderr.contains("degenerate"), "{}", o.stderr);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn numeric_engine_handles_detuning() {
    let o = duplex(&[
        "steady",
        "--engine",
        "numeric",
        "--delta",
        "0.5",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "2",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.trim_end().ends_with(",numeric-nullspace"));
    let o = duplex(&[
        "steady",
        "--engine",
        "analytic",
        "--delta",
        "0.5",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "2",
    ]);
    assert_eq!(o.code, EXIT_CONFIG);
}

#[test]
fn visibility_at_ratio_point_nine() {
    let o = duplex(&[
        "visibility",
        "--omega-sigma",
        "10",
        "--omega-pi",
        "9",
        "--phi",
        "pi/2",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let vis = v["rows"][0]["V"].as_f64().unwrap();
    assert!((vis - 90.5 / 903.0).abs() < 1e-12);
    assert_eq!(v["meta"]["engine"], "auto");
}

#[test]
fn fig2d_preset_peaks_at_quadrature() {
    let o = duplex(&["sweep", "--preset", "fig2d", "--omega", "10"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("phi,V,n_e,detectable,status\n"));
    let rows = rows(&o.stdout);
    assert_eq!(rows.len(), 721);
    let best = rows
        .iter()
        .max_by(|a, b| {
            a[1].parse::<f64>()
                .unwrap()
                .total_cmp(&b[1].parse::<f64>().unwrap())
        })
        .unwrap();
    assert_eq!(best[0], "1.57079632679");
    assert_eq!(best[1], "0.5");
    assert_eq!(rows[0][1], "0.00124688279302");
}

#[test]
fn fig2a_diagonal_decreases() {
    let o = duplex(&["sweep", "--preset", "fig2a"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = rows(&o.stdout);
    assert_eq!(rows.len(), 201 * 201);
    let diagonal: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == r[1] && r[0] != "0")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(diagonal.len(), 200);
    assert!(diagonal.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(rows[0][5], "degenerate");
    assert_eq!(rows[0][2], "nan");
}

#[test]
fn invalid_grid_exits_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["sweep", "--axis", "", "--out", out],
        vec!["sweep", "--out", out],
        vec!["sweep", "--axis", "phi=0:pi:5", "--out", out],
        vec!["sweep", "--preset", "fig2a", "--omega", "3", "--out", out],
        vec!["sweep", "--preset", "fig9z", "--out", out],
    ] {
        let o = duplex(&args);
        assert_eq!(o.code, EXIT_CONFIG, "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn custom_axes_with_fixed_values() {
    let o = duplex(&[
        "sweep",
        "--axis",
        "ratio_r=0.5:1.5:11",
        "--omega-sigma",
        "10",
        "--phi",
        "pi/2",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = rows(&o.stdout);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[5][0], "1");
    assert_eq!(rows[5][1], "0.5");
    assert_eq!(rows[5][3], "false");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.json", "b.json"]
        .iter()
        .map(|n| dir.path().join(n))
        .collect();
    for p in &paths {
        let o = duplex(&[
            "sweep",
            "--preset",
            "fig3b",
            "--ratio",
            "0.95",
            "--format",
            "json",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.is_empty());
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn plot_script_points_at_relative_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wave.csv");
    let o = duplex(&[
        "standing-wave",
        "--omega",
        "10",
        "--points",
        "200",
        "--plot",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let script = fs::read_to_string(dir.path().join("wave.gp")).unwrap();
    assert!(
        script.contains("plot 'wave.csv' using 1:3 with lines"),
        "{script}"
    );
    assert!(!script.contains(dir.path().to_str().unwrap()));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("ky,r,V,n_e,detectable,status\n"));
    assert_eq!(csv.lines().count(), 201);
    assert!(!csv.contains('\r'));
}

#[test]
fn plot_needs_csv_file() {
    assert_eq!(
        duplex(&["standing-wave", "--omega", "1", "--plot"]).code,
        EXIT_CONFIG
    );
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = duplex(&[
        "standing-wave",
        "--omega",
        "1",
        "--plot",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_CONFIG);
}

#[test]
fn pattern_modes() {
    let o = duplex(&[
        "pattern",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "1",
        "--points",
        "4",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let i: Vec<f64> = rows(&o.stdout)
        .iter()
        .map(|r| r[2].parse().unwrap())
        .collect();
    // 4 n_e (1 + V cos δ) with n_e = 0.4, V = 0.1.
    assert_eq!(i.len(), 4);
    assert!((i[0] - 1.76).abs() < 1e-12 && (i[2] - 1.44).abs() < 1e-12);

    let o = duplex(&[
        "pattern",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "1",
        "--points",
        "4",
        "--normalize",
    ]);
    let top = rows(&o.stdout)
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(top, 1.0);

    let o = duplex(&[
        "pattern",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "1",
        "--points",
        "3",
        "--separation",
        "2",
        "--screen-distance",
        "100",
        "--wave-number",
        "3",
        "--screen-min",
        "-5",
        "--screen-max",
        "5",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(rows(&o.stdout)[2][..2], ["5", "0.3"]);

    let o = duplex(&[
        "pattern",
        "--omega-sigma",
        "1",
        "--omega-pi",
        "1",
        "--separation",
        "2",
    ]);
    assert_eq!(o.code, EXIT_CONFIG);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# unit drive\nomega_sigma = 1\nomega_pi = 1\nphi = pi/2  # dark\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = duplex(&["visibility", "--config", cfg]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let row = &rows(&o.stdout)[0];
    assert_eq!((row[4].as_str(), row[7].as_str()), ("0.5", "false"));
    assert!(row[5].parse::<f64>().unwrap() < 1e-30);
    let o = duplex(&["visibility", "--config", cfg, "--phi", "0"]);
    assert!(o.stdout.contains("1,1,0,0,0.1,0.4,"), "{}", o.stdout);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "omega_sigma = 1\nwobble = 2\n").unwrap();
    let o = duplex(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_CONFIG);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);
    for args in [
        vec!["steady", "--config", "/nonexistent/x.conf"],
        vec!["steady", "--omega-sigma", "1"],
        vec!["steady", "--omega-sigma", "1", "--omega-pi", "-1"],
        vec![
            "steady",
            "--omega-sigma",
            "1",
            "--omega-pi",
            "1",
            "--samples",
            "3",
        ],
        vec!["steady", "--omega-sigma", "x", "--omega-pi", "1"],
        vec![
            "steady",
            "--omega-sigma",
            "1",
            "--omega-pi",
            "1",
            "--format",
            "xml",
        ],
        vec!["steady", "--no-such-flag"],
        vec!["validate", "--samples", "0"],
        vec!["nonsense"],
        vec![],
    ] {
        assert_eq!(duplex(&args).code, EXIT_CONFIG, "{args:?}");
    }
}

#[test]
fn help_and_version_succeed() {
    let o = duplex(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("standing-wave"));
    assert_eq!(duplex(&["--version"]).code, EXIT_OK);
}

#[test]
fn validate_passes_on_correct_model() {
    let o = duplex(&["validate"]);
    assert_eq!(o.code, EXIT_OK, "{}{}", o.stdout, o.stderr);
    assert_eq!(
        o.stdout.lines().filter(|l| l.starts_with("PASS")).count(),
        4
    );
    let o = duplex(&["validate", "--samples", "1000"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.starts_with("validate: 1000 samples"));
}

/// Flips the sign of the |1⟩–|4⟩ coupling.
struct FlippedCoupling;

impl GeneratorModel for FlippedCoupling {
    fn superoperator(&self, omega_sigma: f64, omega_pi: f64, phi: f64) -> SuperOperator {
        let mut h = closed_loop_hamiltonian(omega_sigma, omega_pi, phi, 0.0);
        h[(0, 3)] = -h[(0, 3)];
        h[(3, 0)] = -h[(3, 0)];
        SuperOperator::from_hamiltonian(&h, 1.0)
    }
}

#[test]
fn validate_catches_injected_sign_error() {
    let o = with_model(&FlippedCoupling, &["validate", "--samples", "50"]);
    assert_eq!(o.code, EXIT_VALIDATION);
    assert!(o.stdout.contains("FAIL  analytic-numeric"), "{}", o.stdout);
    assert!(o.stderr.contains("worst at omega_sigma="), "{}", o.stderr);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_duplex");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(
        status(&["steady", "--omega-sigma", "1", "--omega-pi", "1"]),
        0
    );
    assert_eq!(
        status(&["steady", "--omega-sigma", "0", "--omega-pi", "0"]),
        2
    );
    assert_eq!(status(&["steady"]), 1);
}

#[test]
fn run_matches_default_model() {
    let (mut a, mut e) = (Vec::new(), Vec::new());
    let code = run(
        [
            "duplex",
            "visibility",
            "--omega-sigma",
            "2",
            "--omega-pi",
            "3",
        ],
        &mut a,
        &mut e,
    );
    assert_eq!(code, EXIT_OK);
    assert!(Path::new(env!("CARGO_MANIFEST_DIR")).exists());
    assert!(String::from_utf8(a).unwrap().contains(",analytic"));
}
