use std::fs;
use std::process::{Command, Output};

use clap::Parser;
use duopoly_cli::{execute_with, Cli, Solver};
use duopoly_core::{
    best_response, solve_equilibrium, BestResponse, EquilibriumResult, GameParams, Price,
    SolverConfig,
};
use serde_json::Value;

fn duopoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duopoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn small_oracle(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("small.conf");
    fs::write(&path, "price_points = 100\nquantity_points = 100\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn equilibrium_reproduces_worked_example() {
    let v = json(&duopoly(&["equilibrium"]));
    assert_eq!(v["regime"], "induce_compete");
    assert_eq!(v["operator"]["price"].as_f64(), Some(4.39487));
    assert_eq!(v["operator"]["quantity"].as_f64(), Some(0.352997));
    assert_eq!(v["independent"]["quantity"].as_f64(), Some(5.60513));
    assert_eq!(v["key_prices"]["p_star_I"].as_f64(), Some(5.625));
}

#[test]
fn trivial_game_reports_abstain() {
    let v = json(&duopoly(&["equilibrium", "--cm", "2", "--ci", "9"]));
    assert_eq!(v["independent"]["strategy"], "abstain");
    assert_eq!(v["independent"]["price"], "abstain");
    assert_eq!(v["operator"]["price"].as_f64(), Some(5.0));
    assert_eq!(v["key_prices"]["p_star_I"], "abstain");
}

#[test]
fn best_response_queries() {
    let v = json(&duopoly(&[
        "best-response",
        "--pm",
        "4",
        "--qm",
        "1",
        "--ci",
        "2",
    ]));
    assert_eq!(v["response"]["strategy"], "wait");
    assert_eq!(v["response"]["price"].as_f64(), Some(5.75));
    assert_eq!(v["thresholds"]["q_dagger"].as_f64(), Some(1.5));

    let v = json(&duopoly(&[
        "best-response",
        "--pm",
        "4",
        "--qm",
        "2",
        "--ci",
        "2",
        "--rationing",
        "proportional",
    ]));
    assert_eq!(v["response"]["strategy"], "wait");
    assert_eq!(v["response"]["price"].as_f64(), Some(6.25));

    let v = json(&duopoly(&["best-response", "--pm", "abstain"]));
    assert_eq!(v["operator"]["price"], "abstain");
    assert_eq!(v["response"]["strategy"], "compete");
}

#[test]
fn full_precision() {
    let v = json(&duopoly(&["equilibrium", "--precision", "full"]));
    let p = v["operator"]["price"].as_f64().unwrap();
    let direct = solve_equilibrium(
        &GameParams::new(10.0, 0.2, 2.0, 3.0, 1.0).unwrap(),
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(Price::At(p), direct.action_m.price);
}

#[test]
fn sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let status = duopoly(&[
        "sweep",
        "--x",
        "c_I:0:10:4",
        "--y",
        "c_M:0:10:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "c_M,c_I,alpha,k,theta,gamma,rationing,regime,p_M,q_M,p_I,q_I,u_M,u_I,cs,welfare"
    );
    assert_eq!(lines.len(), 1 + 12);
    // y outer, x inner.
    let cols = |i: usize| -> (String, String) {
        let f: Vec<&str> = lines[i].split(',').collect();
        (f[0].to_string(), f[1].to_string())
    };
    assert_eq!(cols(1), ("0".into(), "0".into()));
    assert_eq!(cols(2).0, "0");
    assert_eq!(cols(4), ("0".into(), "10".into()));
    assert_eq!(cols(5), ("5".into(), "0".into()));

    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("grid.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["rows"], 12);
    assert_eq!(meta["x"]["param"], "c_I");
    assert_eq!(meta["y"]["points"], 3);
}

#[test]
fn alpha_sweep_and_proportional_nulls() {
    let out = duopoly(&["sweep", "--x", "alpha:0:1:5", "--rationing", "proportional"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[6], "proportional");
        assert_eq!((f[14], f[15]), ("null", "null"));
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "# game\ncm = 2\nci = 9\ntheta = 12\n").unwrap();
    let v = json(&duopoly(&[
        "equilibrium",
        "--config",
        path.to_str().unwrap(),
        "--theta",
        "10",
    ]));
    assert_eq!(v["params"]["theta"].as_f64(), Some(10.0));
    assert_eq!(v["params"]["c_I"].as_f64(), Some(9.0));
    assert_eq!(v["operator"]["price"].as_f64(), Some(5.0));
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "--p-low", "6", "--q-low", "1", "--p-eval", "7", "--trials", "5000", "--seed",
        "3",
    ];
    let a = json(&duopoly(&args));
    let b = json(&duopoly(&args));
    assert_eq!(a, b);
    let gap = (a["mc_mean"].as_f64().unwrap() - a["closed_form"].as_f64().unwrap()).abs();
    assert!(gap <= 4.0 * a["mc_stderr"].as_f64().unwrap());
}

#[test]
fn welfare_report() {
    let v = json(&duopoly(&["welfare"]));
    assert!(v["delta_cs"].as_f64().unwrap() > 0.0);
    assert!(v["delta_welfare"].as_f64().unwrap() >= 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(
        duopoly(&["equilibrium", "--alpha", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["equilibrium", "--rationing", "random"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["sweep", "--x", "c_I:0:10"]).status.code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["sweep", "--x", "c_I:0:10:3", "--y", "ci:0:1:3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["sweep", "--x", "gamma:0:2:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["sweep", "--x", "c_I:0:10:100000", "--y", "c_M:0:10:100000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["simulate", "--p-low", "6", "--q-low", "1.5", "--p-eval", "7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["welfare", "--gamma", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        duopoly(&["best-response", "--pm", "4", "--qm", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(duopoly(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        duopoly(&["equilibrium", "--config", "/nonexistent/run.conf"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        duopoly(&["equilibrium", "--out", "/nonexistent/dir/out.json"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(duopoly(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes_for_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let conf = small_oracle(&dir);
    let out = duopoly(&["verify", "--samples", "40", "--ci", "2", "--config", &conf]);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["best_response"]["max_gap"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
}

/// Pays the independent seller a fixed premium it cannot actually earn.
struct Inflated;

impl Solver for Inflated {
    fn best_response(
        &self,
        p_m: Price,
        q_m: f64,
        params: &GameParams,
    ) -> duopoly_core::Result<BestResponse> {
        let mut br = best_response(p_m, q_m, params)?;
        br.utility -= 100.0;
        Ok(br)
    }

    fn equilibrium(
        &self,
        params: &GameParams,
        cfg: &SolverConfig,
    ) -> duopoly_core::Result<EquilibriumResult> {
        let mut eq = solve_equilibrium(params, cfg)?;
        eq.u_m += 100.0;
        Ok(eq)
    }
}

#[test]
fn verify_fails_for_broken_solver() {
    let dir = tempfile::tempdir().unwrap();
    let conf = small_oracle(&dir);
    let out = dir.path().join("report.json");
    let cli = Cli::try_parse_from([
        "duopoly",
        "verify",
        "--samples",
        "10",
        "--config",
        &conf,
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let err = execute_with(&cli, &Inflated).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let report: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}
