use std::path::Path;
use std::process::{Command, Output};

use ralloc::harness::CSV_HEADER;
use ralloc::{Instance, SolveReport};

fn ralloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ralloc")).args(args).output().unwrap()
}

fn write_e1(dir: &Path) -> String {
    let inst = Instance::new(vec![3, 3], 3, 100.0, vec![vec![10.0, 6.0, 3.0, 1.0], vec![8.0, 7.0, 2.0, 2.0]]).unwrap();
    let path = dir.join("e1.json");
    std::fs::write(&path, inst.to_json_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_e1(dir.path());
    let out = ralloc(&["solve", "--method", "sw-r", "--instance", &e1, "--epsilon", "0", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let report: SolveReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.true_objective, Some(8.0));
    assert!(report.evals <= 8);
}

#[test]
fn solve_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_e1(dir.path());
    let path = dir.path().join("r.json");
    let out = ralloc(&["solve", "--method", "myopic", "--instance", &e1, "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: SolveReport = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report.true_objective, Some(9.0));
}

#[test]
fn unknown_method_lists_choices() {
    let out = ralloc(&["solve", "--method", "bogus", "--instance", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for id in ["myopic", "prescient", "one-opt", "sw-rnd", "sw-a", "sw-r"] {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn invalid_instance_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n":2,"B":6,"M":10,"b":[3,3],"costs":[[3,2,1,0],[3,2,1,0]]}"#).unwrap();
    let out = ralloc(&["solve", "--method", "myopic", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convex_bounds_need_convex_flag() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_e1(dir.path());
    let out = ralloc(&["solve", "--method", "one-opt", "--instance", &e1, "--convex-bounds"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ralloc(&["solve", "--method", "one-opt", "--instance", &e1, "--convex-bounds", "--force-convex"]);
    assert_eq!(out.status.code(), Some(0));
    let report: SolveReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.bounds_heuristic);
}

#[test]
fn gen_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    let out = ralloc(&[
        "gen", "--family", "convex", "--n", "4", "--b", "3,4,5,6", "--B", "9", "--M", "50", "--seed", "1", "--out", p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let inst = Instance::load(&path).unwrap();
    assert!(inst.is_convex());
    assert_eq!(inst.caps(), &[3, 4, 5, 6]);
    let out = ralloc(&["solve", "--method", "prescient", "--instance", p, "--convex-bounds"]);
    assert_eq!(out.status.code(), Some(0));

    let bad = ralloc(&["gen", "--family", "convex", "--n", "2", "--b", "3", "--B", "6", "--M", "50"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    write_e1(dir.path());
    let config = dir.path().join("suite.json");
    std::fs::write(
        &config,
        r#"{"instances": ["e1.json"], "methods": [{"method": "myopic"}, {"method": "sw-a", "epsilon": 0}],
            "include_brute_force": true}"#,
    )
    .unwrap();
    let csv_path = dir.path().join("r.csv");
    let out = ralloc(&["bench", "--config", config.to_str().unwrap(), "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let num = |r: &csv::StringRecord, c: usize| r[c].parse::<f64>().unwrap();
    assert_eq!((&rows[0][0], &rows[0][1]), ("e1", "myopic"));
    assert_eq!((num(&rows[0], 2), num(&rows[0], 5), num(&rows[0], 7)), (9.0, 6.0, 1.0));
    assert_eq!(&rows[1][1], "sw-a");
    assert_eq!((num(&rows[1], 2), num(&rows[1], 7)), (8.0, 0.0));
    assert!(num(&rows[1], 5) <= 8.0);
}

#[test]
fn export_ilp_for_e1() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write_e1(dir.path());
    let out = ralloc(&["export-ilp", "--instance", &e1]);
    assert_eq!(out.status.code(), Some(0));
    let lp = String::from_utf8(out.stdout).unwrap();
    assert!(lp.contains(" obj: 10 y_0_0 + 6 y_0_1 + 3 y_0_2 + 1 y_0_3 + 8 y_1_0 + 7 y_1_1 + 2 y_1_2 + 2 y_1_3"));
    assert!(lp.contains(" budget: 1 y_0_1 + 2 y_0_2 + 3 y_0_3 + 1 y_1_1 + 2 y_1_2 + 3 y_1_3 = 3"));
    assert!(lp.trim_end().ends_with("End"));
}
