use std::path::Path;

use aniso_gn::cli::{run, RunRecord, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["aniso-gn"];
    full.extend_from_slice(args);
    run(full)
}

fn out(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

const GN: [&str; 8] = ["--s", "1", "--p", "4,6", "--q", "2,4", "--r", "2,3"];

#[test]
fn gn_sweep_exit_codes_follow_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut ok = GN.to_vec();
    let o = out(d, "ok");
    ok.extend(["--size", "64", "--out", &o]);
    assert_eq!(cli(&[&["verify-gn"], ok.as_slice()].concat()), EXIT_PASS);

    let mut broken = GN.to_vec();
    let o = out(d, "broken");
    broken.extend(["--theta", "5/11", "--size", "64", "--out", &o]);
    assert_eq!(cli(&[&["verify-gn"], broken.as_slice()].concat()), EXIT_FAIL);
    broken.extend(["--expect", "blowup"]);
    assert_eq!(cli(&[&["verify-gn"], broken.as_slice()].concat()), EXIT_PASS);
    let json = std::fs::read_to_string(d.join("broken/verify_gn.json")).unwrap();
    assert!(json.contains("\"verdict\": \"blowup\""));
    assert!(d.join("broken/verify_gn.csv").exists() && d.join("broken/verify_gn.svg").exists());

    let mut empty = GN.to_vec();
    empty.extend(["--lambdas", "", "--out", "-"]);
    assert_eq!(cli(&[&["verify-gn"], empty.as_slice()].concat()), EXIT_ERROR);
}

#[test]
fn boundary_tuple_is_not_graded() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(dir.path(), "edge");
    let args = [
        "verify-gn", "--sigma", "1/2", "--s", "1", "--p", "2,2", "--q", "2,2", "--r", "2,2",
        "--expect", "blowup", "--size", "32", "--out", &o,
    ];
    assert_eq!(cli(&args), EXIT_PASS);
    let json = std::fs::read_to_string(dir.path().join("edge/verify_gn.json")).unwrap();
    assert!(json.contains("without a pass/fail verdict"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# balanced instance\nsigma = 0\ns = 1\np = 4,6\nq = 2,4\nr = 2,3\ntheta = 5/11\n").unwrap();
    let c = cfg.to_string_lossy().into_owned();
    let o = out(dir.path(), "run");
    assert_eq!(cli(&["check", "--config", &c, "--out", &o]), EXIT_FAIL);
    assert_eq!(cli(&["check", "--config", &c, "--theta", "7/11", "--out", &o]), EXIT_PASS);
    let rec: RunRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/check.json")).unwrap()).unwrap();
    assert!(rec.pass);
    assert_eq!(rec.config["theta"], "7/11");
    assert_eq!(rec.config_hash.len(), 64);

    std::fs::write(&cfg, "unknown_key = 3\n").unwrap();
    assert_eq!(cli(&["check", "--config", &c, "--out", "-"]), EXIT_ERROR);
}

#[test]
fn taylor_green_budget_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(dir.path(), "tg");
    assert_eq!(cli(&["ns-run", "--scenario", "taylor-green", "--size", "64", "--out", &o]), EXIT_PASS);
    let mut rdr = csv::Reader::from_path(dir.path().join("tg/budget.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["t", "kinetic", "dissipation", "residual"]
    );
    let worst = rdr
        .records()
        .map(|r| r.unwrap()[3].parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
    let flux = std::fs::read_to_string(dir.path().join("tg/flux.csv")).unwrap();
    assert!(flux.starts_with("N,flux\n"));
    assert_eq!(cli(&["ns-run", "--scenario", "vortex-sheet", "--out", "-"]), EXIT_ERROR);
}

#[test]
fn report_aggregates_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, theta) in [("a", "7/11"), ("b", "5/11"), ("c", "1/2")] {
        let o = out(d, name);
        let mut args = vec!["verify-gn"];
        args.extend(GN);
        args.extend(["--theta", theta, "--size", "32", "--out", &o]);
        cli(&args);
    }
    let input = d.to_string_lossy().into_owned();
    assert_eq!(cli(&["report", "--input", &input]), EXIT_PASS);
    let first = std::fs::read(d.join("summary.html")).unwrap();
    let html = String::from_utf8(first.clone()).unwrap();
    assert_eq!(html.matches("<figure>").count(), 3);
    assert_eq!(cli(&["report", "--input", &input]), EXIT_PASS);
    assert_eq!(std::fs::read(d.join("summary.html")).unwrap(), first);

    std::fs::remove_file(d.join("b/verify_gn.svg")).unwrap();
    assert_eq!(cli(&["report", "--input", &input]), EXIT_ERROR);

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(
        cli(&["report", "--input", &empty.path().to_string_lossy()]),
        EXIT_ERROR
    );
}
