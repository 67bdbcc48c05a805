use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frontfix::{build_grid, implicit, ModelParams, StepSolverConfig};
use serde_json::Value;

fn frontfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontfix"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn frontfix")
}

fn run_ok(args: &[&str]) -> Output {
    let out = frontfix(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn out_dir(tmp: &tempfile::TempDir, name: &str) -> PathBuf {
    tmp.path().join(name)
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&read(p)).unwrap()
}

/// Rows of a CSV file as string cells, header first.
fn cells(p: &Path) -> Vec<Vec<String>> {
    read(p)
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn price_table_config() -> String {
    format!("{}/data/price_table.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn solve_writes_surface_front_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "solve");
    run_ok(&["solve", "--J", "40", "--out", arg(&dir)]);

    let surface = cells(&dir.join("surface.csv"));
    assert_eq!(surface[0], ["n", "tau", "j", "x", "p"]);
    // 41 nodes on each of N + 1 = 81 levels
    assert_eq!(surface.len() - 1, 41 * 81);
    let front = cells(&dir.join("front.csv"));
    assert_eq!(front[0], ["n", "tau", "S_f"]);
    assert_eq!(front.len() - 1, 81);

    let summary = json(&dir.join("summary.json"));
    let grid = build_grid(1.0, 40, 20.0, 1.0).unwrap();
    let expected = implicit::solve(&ModelParams::default(), &grid, &StepSolverConfig::default())
        .unwrap()
        .final_front();
    assert_eq!(summary["final_front"].as_f64().unwrap(), expected);
    assert_eq!(summary["grid"]["N"], 80);
    assert_eq!(summary["scheme"], "implicit");
    assert!(summary["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(summary["stats"]["total_iterations"].as_u64().unwrap() > 0);
    let last: f64 = front.last().unwrap()[2].parse().unwrap();
    assert_eq!(last, expected);
}

#[test]
fn emitted_floats_round_trip_bytewise() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "rt");
    run_ok(&["solve", "--J", "10", "--out", arg(&dir)]);
    for name in ["surface.csv", "front.csv"] {
        for row in cells(&dir.join(name)).iter().skip(1) {
            for cell in row {
                let v: f64 = cell.parse().unwrap();
                let again = if cell.contains('e') {
                    format!("{v:.16e}")
                } else {
                    format!("{v}")
                };
                assert_eq!(&again, cell, "{name}");
            }
        }
    }
}

#[test]
fn same_configuration_gives_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (out_dir(&tmp, "a"), out_dir(&tmp, "b"));
    for d in [&a, &b] {
        run_ok(&["solve", "--J", "20", "--sigma", "0.3", "--out", arg(d)]);
    }
    for name in ["surface.csv", "front.csv"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn too_few_intervals_is_invalid_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "none");
    let out = frontfix(&["solve", "--J", "2", "--out", arg(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"r": 0.05, "sigma": 0.3, "J": 40, "mu": 10, "scheme": "explicit"}"#,
    )
    .unwrap();
    let dir = out_dir(&tmp, "cfg");
    run_ok(&["solve", "--config", arg(&cfg), "--J", "20", "--out", arg(&dir)]);
    let s = json(&dir.join("summary.json"));
    assert_eq!(s["grid"]["J"], 20);
    assert_eq!(s["grid"]["mu"], 10.0);
    assert_eq!(s["params"]["r"], 0.05);
    assert_eq!(s["params"]["sigma"], 0.3);
    assert_eq!(s["scheme"], "explicit");
}

#[test]
fn unknown_config_keys_and_bad_values_are_invalid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"rate": 0.05}"#).unwrap();
    let out = frontfix(&["solve", "--config", arg(&cfg), "--out", arg(&out_dir(&tmp, "x"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = frontfix(&["solve", "--sigma", "-0.2", "--out", arg(&out_dir(&tmp, "y"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = frontfix(&["solve", "--scheme", "crank", "--out", arg(&out_dir(&tmp, "z"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = frontfix(&["solve", "--config", arg(&tmp.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = frontfix(&["solve", "--J", "10", "--out", arg(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unstable_explicit_solve_is_a_solver_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = frontfix(&[
        "solve",
        "--scheme",
        "explicit",
        "--mu",
        "26",
        "--out",
        arg(&out_dir(&tmp, "u")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn two_level_tableau_has_one_extrapolated_column() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "g1");
    run_ok(&["extrapolate", "--levels", "1", "--out", arg(&dir)]);
    let t = cells(&dir.join("tableau.csv"));
    assert_eq!(t[0], ["N", "U0", "U1"]);
    assert_eq!(t.len(), 3);
    assert_eq!(t[1][0], "5");
    assert_eq!(t[1][2], "");
    assert_eq!(t[2][0], "20");
    let (c, f): (f64, f64) = (t[1][1].parse().unwrap(), t[2][1].parse().unwrap());
    let u1: f64 = t[2][2].parse().unwrap();
    assert_eq!(u1, f + (f - c) / 3.0);
}

#[test]
fn six_level_tableau_reaches_the_extrapolated_front() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "g5");
    run_ok(&[
        "extrapolate",
        "--J",
        "10",
        "--levels",
        "5",
        "--mu",
        "20",
        "--out",
        arg(&dir),
    ]);
    let t = cells(&dir.join("tableau.csv"));
    assert_eq!(t[0], ["N", "U0", "U1", "U2", "U3", "U4", "U5"]);
    let ns: Vec<&str> = t.iter().skip(1).map(|r| r[0].as_str()).collect();
    assert_eq!(ns, ["5", "20", "80", "320", "1280", "5120"]);
    for (g, row) in t.iter().skip(1).enumerate() {
        for (k, cell) in row.iter().skip(1).enumerate() {
            assert_eq!(cell.is_empty(), k > g, "row {g} column {k}");
        }
    }
    let last: f64 = t[6][6].parse().unwrap();
    assert!((last - 0.862748).abs() <= 2e-5, "{last}");
}

#[test]
fn refinement_accepts_at_one_hundred_sixty_intervals() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "ref");
    run_ok(&["refine", "--eps", "0.005", "--mu", "20", "--J", "5", "--out", arg(&dir)]);
    let rep = json(&dir.join("refine_report.json"));
    assert_eq!(rep["accepted"], true);
    let level = &rep["levels"][rep["accepted_level"].as_u64().unwrap() as usize];
    assert_eq!(level["j_fine"], 160);
    assert_eq!(level["n_fine"], 1280);
    let errs = cells(&dir.join("errors_g5.csv"));
    assert_eq!(errs[0], ["n", "tau", "err_p_inf", "err_sf"]);
    assert_eq!(errs.len() - 1, level["series"].as_array().unwrap().len());
}

#[test]
fn huge_tolerance_accepts_the_first_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "ref1");
    run_ok(&["refine", "--eps", "1.0", "--out", arg(&dir)]);
    let rep = json(&dir.join("refine_report.json"));
    assert_eq!(rep["accepted_level"], 0);
    assert_eq!(rep["levels"].as_array().unwrap().len(), 1);
    assert!(dir.join("errors_g1.csv").exists());
}

#[test]
fn unmet_tolerance_exits_with_its_own_code_and_keeps_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "ref2");
    let out = frontfix(&["refine", "--eps", "1e-12", "--levels", "2", "--out", arg(&dir)]);
    assert_eq!(out.status.code(), Some(4));
    let rep = json(&dir.join("refine_report.json"));
    assert_eq!(rep["accepted"], false);
    assert_eq!(rep["levels"].as_array().unwrap().len(), 2);
}

/// Early-time front errors of the explicit scheme peak above the
/// late-time errors of the implicit scheme.
#[test]
fn explicit_refinement_errors_peak_early() {
    let tmp = tempfile::tempdir().unwrap();
    let mut series = Vec::new();
    for scheme in ["explicit", "implicit"] {
        let dir = out_dir(&tmp, scheme);
        run_ok(&["refine", "--scheme", scheme, "--eps", "0.005", "--out", arg(&dir)]);
        let rep = json(&dir.join("refine_report.json"));
        assert_eq!(rep["accepted"], true, "{scheme}");
        let level = &rep["levels"][rep["accepted_level"].as_u64().unwrap() as usize];
        let s: Vec<(f64, f64)> = level["series"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (e["tau"].as_f64().unwrap(), e["err_sf"].as_f64().unwrap().abs()))
            .collect();
        series.push(s);
    }
    let (tau_peak, peak) = series[0]
        .iter()
        .copied()
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert!(tau_peak < 0.1, "explicit peak at tau = {tau_peak}");
    let late_implicit = series[1].iter().filter(|e| e.0 >= 0.5).map(|e| e.1).fold(0.0, f64::max);
    assert!(peak > late_implicit, "{peak} vs {late_implicit}");
}

#[test]
fn stability_scans_classify_both_schemes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "imp");
    run_ok(&[
        "stability",
        "--scheme",
        "implicit",
        "--mu",
        "12,20,26,100",
        "--out",
        arg(&dir),
    ]);
    let v = json(&dir.join("stability_summary.json"));
    assert!(v.as_array().unwrap().iter().all(|e| e["stable"] == true));
    let csv = cells(&dir.join("stability.csv"));
    assert_eq!(csv[0], ["mu", "N", "k_dx", "modulus"]);
    assert_eq!(csv.len() - 1, 4 * 181);

    let dir = out_dir(&tmp, "exp");
    run_ok(&[
        "stability",
        "--scheme",
        "explicit",
        "--mu",
        "12,20,26",
        "--out",
        arg(&dir),
    ]);
    let v = json(&dir.join("stability_summary.json"));
    let flags: Vec<bool> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["stable"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, true, false]);
    let at_pi = cells(&dir.join("stability.csv"))
        .into_iter()
        .rfind(|r| r[1] == "247")
        .unwrap();
    let m: f64 = at_pi[3].parse().unwrap();
    assert!((m - 1.0804).abs() <= 1e-3, "{m}");
}

#[test]
fn empty_mu_list_is_invalid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = frontfix(&["stability", "--out", arg(&out_dir(&tmp, "e"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn price_table_matches_the_implicit_reference_prices() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "price");
    let cfg = price_table_config();
    run_ok(&[
        "price",
        "--config",
        &cfg,
        "--assets",
        "10,90,100,110,120",
        "--extrapolate",
        "--reference",
        "--out",
        arg(&dir),
    ]);
    let t = cells(&dir.join("prices.csv"));
    assert_eq!(t[0], ["S", "price", "extrapolated", "true", "pm", "em", "emr"]);
    let price = |i: usize, c: usize| -> f64 { t[i][c].parse().unwrap() };
    assert_eq!(price(1, 1), 90.0);
    assert_eq!(price(1, 2), 90.0);
    assert_eq!(t[1][3], "");
    for (i, expected) in [11.6926, 6.9243, 4.1467, 2.5028].into_iter().enumerate() {
        assert!(
            (price(i + 2, 1) - expected).abs() <= 0.01,
            "S row {i}: {}",
            price(i + 2, 1)
        );
    }
    // the extrapolated column moves towards the shipped true values
    for i in 2..6 {
        let truth = price(i, 3);
        assert!((price(i, 2) - truth).abs() < (price(i, 1) - truth).abs(), "row {i}");
    }
}

#[test]
fn assets_beyond_the_domain_are_marked_and_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "ood");
    let out = frontfix(&[
        "price",
        "--config",
        &price_table_config(),
        "--assets",
        "100,400",
        "--out",
        arg(&dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let t = cells(&dir.join("prices.csv"));
    assert_eq!(t[2][1], "out_of_domain");
    assert!(t[1][1].parse::<f64>().is_ok());
}

#[test]
fn non_positive_assets_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = frontfix(&["price", "--assets", "1,-1", "--out", arg(&out_dir(&tmp, "neg"))]);
    assert_eq!(out.status.code(), Some(2));
}
