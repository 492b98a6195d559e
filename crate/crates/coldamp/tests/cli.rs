use std::path::PathBuf;
use std::process::{Command, Output};

use coldamp::cli::{run, DEFAULT_CONFIG};
use coldamp::{load_config, parse_config};

fn coldamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coldamp")).args(args).output().unwrap()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut all = vec!["coldamp"];
    all.extend_from_slice(args);
    let code = run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coldamp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn budget_headline_and_summary() {
    let out = coldamp(&["budget"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.contains(",1.07690870855e-25,1.21541804611e-12,"));
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("1.0769e-25 N^2/Hz"));
    assert!(summary.contains("1.2154e-12"));
}

#[test]
fn budget_is_byte_identical_across_runs() {
    let args = ["budget", "--freq-min", "1e-4", "--freq-max", "1e-1", "--points", "40"];
    let a = coldamp(&args);
    let b = coldamp(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 41);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["budget", "--freq-min", "1e-4", "--freq-max", "1e-1", "--points", "25"];
    let one = Command::new(env!("CARGO_BIN_EXE_coldamp")).args(args).env("COLDAMP_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_coldamp")).args(args).env("COLDAMP_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn degenerate_grid_gives_one_row() {
    let (code, csv, _) = in_process(&["budget", "--freq-min", "5e-4", "--freq-max", "5e-4", "--points", "1"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn csv_fields_reparse_within_half_unit_in_twelfth_digit() {
    let (code, csv, _) = in_process(&["budget", "--freq-min", "1e-5", "--freq-max", "1", "--points", "30"]);
    assert_eq!(code, 0);
    let cfg = parse_config(DEFAULT_CONFIG).unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let omega: f64 = fields[0].parse().unwrap();
        let exact = coldamp_core::budget::budget_point(&cfg.params, omega).unwrap();
        let sigma: f64 = fields[6].parse().unwrap();
        // omega itself was rounded on output, which moves sigma by far less than this
        assert!(((sigma - exact.sigma_ff) / exact.sigma_ff).abs() < 1e-10, "row {i}");
        for f in &fields[..8] {
            let v: f64 = f.parse().unwrap();
            let digits = f.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(digits.len(), 12, "{f}");
            assert!(v.is_finite());
        }
    }
}

#[test]
fn out_flag_writes_file_and_summary_to_stdout() {
    let path = std::env::temp_dir().join(format!("coldamp-out-{}.csv", std::process::id()));
    let (code, stdout, _) = in_process(&["budget", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("force noise Sigma_FF"));
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("omega_rad_s,"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn shipped_config_file_matches_embedded_default() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/microscope.cfg");
    let cfg = load_config(std::path::Path::new(path)).unwrap();
    assert_eq!(cfg.params, coldamp_core::InstrumentParams::microscope());
    let (a, with_file, _) = in_process(&["budget", "--config", path]);
    let (b, default, _) = in_process(&["budget"]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(with_file, default);
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let bad = DEFAULT_CONFIG.replace("damping = 1.3e-5 kg/s", "damping = -1 kg/s");
    let path = scratch("negative.cfg", &bad);
    let (code, _, err) = in_process(&["budget", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("damping") && err.contains("line 8"), "{err}");

    let missing = DEFAULT_CONFIG.replace("omega_t = 1e5 Hz", "");
    let path = scratch("missing.cfg", &missing);
    let (code, _, err) = in_process(&["optimize", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("omega_t"), "{err}");

    let (code, _, _) = in_process(&["budget", "--config", "/definitely/not/here.cfg"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(in_process(&["launch"]).0, 1);
    assert_eq!(in_process(&["budget", "--freq-min", "1"]).0, 1);
    assert_eq!(in_process(&["budget", "--freq-min", "2", "--freq-max", "1"]).0, 1);
    assert_eq!(in_process(&["sweep", "--param", "bogus", "--from", "1", "--to", "2"]).0, 1);
    assert_eq!(in_process(&["verify", "--tol", "0"]).0, 1);
    assert_eq!(in_process(&["--help"]).0, 0);
}

#[test]
fn numerical_failure_exits_three() {
    let (code, _, err) = in_process(&["sweep", "--param", "coupling", "--from", "1e-300", "--to", "1", "--points", "3"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("not finite"), "{err}");
}

#[test]
fn sweeping_into_an_invalid_value_is_an_input_error() {
    let (code, _, err) = in_process(&["sweep", "--param", "mass", "--from", "0", "--to", "1", "--points", "3", "--linear"]);
    assert_eq!(code, 1);
    assert!(err.contains("mass"), "{err}");
}

#[test]
fn optimize_reports_closed_form_ratio() {
    let (code, out, _) = in_process(&["optimize", "--delta", "100"]);
    assert_eq!(code, 0);
    assert!(out.contains("ratio_opt (R_a/R_m)        2.500125e-7"), "{out}");
    let (code, out, _) = in_process(&["optimize", "--delta", "0"]);
    assert_eq!(code, 0);
    // |Omega|/(2 omega_t) with Omega = 2 pi 5e-4 and omega_t = 2 pi 1e5
    assert!(out.contains("ratio_opt (R_a/R_m)        2.500000e-9"), "{out}");
    let residual = out.lines().find(|l| l.starts_with("cross-check residual")).unwrap();
    let loc: f64 = residual.split_whitespace().nth(3).unwrap().trim_end_matches(',').parse().unwrap();
    assert!(loc < 1e-6);
}

#[test]
fn sweep_rows_follow_the_grid() {
    let (code, csv, _) = in_process(&["sweep", "--param", "r_amp", "--from", "1e3", "--to", "1e7", "--points", "5"]);
    assert_eq!(code, 0);
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values, [1e3, 1e4, 1e5, 1e6, 1e7]);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("r_amp,")));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = coldamp(&["verify", "--draws", "8", "--seed", "7"]);
    let b = coldamp(&["verify", "--draws", "8", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 6);
}

#[test]
fn injected_fault_fails_verification() {
    let out = coldamp(&["verify", "--draws", "3", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    let failing = text.lines().find(|l| l.ends_with("FAIL")).unwrap();
    assert!(failing.starts_with("oracle-equivalence"), "{text}");
    assert!(String::from_utf8(out.stderr).unwrap().contains("oracle-equivalence"));
}
