use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polyurn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyurn"))
        .args(args)
        .env("POLYURN_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn assert_manifest_outputs_exist(dir: &Path) -> Value {
    let m = read_json(&dir.join("manifest.json"));
    for name in m["outputs"].as_array().unwrap() {
        let p = dir.join(name.as_str().unwrap());
        assert!(std::fs::metadata(&p).unwrap().len() > 0, "{} is empty", p.display());
    }
    m
}

#[test]
fn analyze_tetrahedron_is_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyurn(&["analyze", "--hypergraph", "builtin:tetrahedron", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("analysis.json"));
    assert_eq!(r["k"], 0);
    assert_eq!(r["verdict"], "theorem1");
    for x in r["limit_set"]["base"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
    let m = assert_manifest_outputs_exist(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["source"], "builtin:tetrahedron");
}

#[test]
fn analyze_cube_json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyurn(&["analyze", "--hypergraph", "builtin:cube", "--json", "--out", &out_arg(dir.path())]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["k"], 4);
    assert_eq!(r["rank_incidence"], 4);
    assert_eq!(r["verdict"], "theorem2");
    assert_eq!(r["kernel"]["dim"], 4);
    let basis = r["kernel"]["basis"].as_array().unwrap();
    assert!(basis.iter().flat_map(|v| v.as_array().unwrap()).all(|q| q.as_str().unwrap().contains('/')));
}

#[test]
fn analyze_path_from_file_reports_pendants() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("path3.json");
    std::fs::write(&input, r#"{"m": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
    let out = dir.path().join("out");
    let o = polyurn(&[
        "analyze",
        "--hypergraph",
        input.to_str().unwrap(),
        "--support",
        "0,2",
        "--out",
        &out_arg(&out),
    ]);
    assert!(o.status.success());
    let r = read_json(&out.join("analysis.json"));
    assert_eq!(r["verdict"], "boundary");
    assert_eq!(r["pendants"].as_array().unwrap().len(), 2);
    assert_eq!(r["equilibria"][1]["record"]["classification"], "unstable");
}

#[test]
fn invalid_hypergraph_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, r#"{"m": 3, "edges": [[0, 1], [1, 7]]}"#).unwrap();
    let o = polyurn(&["analyze", "--hypergraph", input.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("vertex 7"));

    std::fs::write(&input, "{\"m\": 3,\n \"edges\": [[0, 1],, ]}").unwrap();
    let o = polyurn(&["analyze", "--hypergraph", input.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = polyurn(&["analyze", "--hypergraph", "builtin:nonagon", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unconverged_solver_exits_2_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyurn(&[
        "analyze",
        "--hypergraph",
        "builtin:icosahedron",
        "--max-iter",
        "1",
        "--tol",
        "1e-300",
        "--support",
        "0,1,2,3,4,5,6,7,8,9,10",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("analysis.json"));
    assert_eq!(r["converged"], false);
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["status"], "error");
}

#[test]
fn simulate_is_deterministic_and_writes_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "simulate".to_string(),
            "--hypergraph".into(),
            "builtin:cube".into(),
            "--steps".into(),
            "3000".into(),
            "--replicas".into(),
            "3".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out_arg(d),
        ]
    };
    for d in [a.path(), b.path()] {
        let argv = args(d);
        let o = polyurn(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_manifest_outputs_exist(d);
    }
    let ca = std::fs::read(a.path().join("trajectories.csv")).unwrap();
    let cb = std::fs::read(b.path().join("trajectories.csv")).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("replica,n,x0,x1,x2,x3,x4,x5,x6,x7\n"));
    let summary = read_json(&a.path().join("summary.json"));
    assert_eq!(summary["limit"]["replicas"].as_array().unwrap().len(), 3);
    assert_eq!(summary["config"]["seed"], 7);
}

#[test]
fn simulate_against_analysis_measures_distance() {
    let dir = tempfile::tempdir().unwrap();
    let d = out_arg(dir.path());
    assert!(polyurn(&["analyze", "--hypergraph", "builtin:cube", "--out", &d]).status.success());
    let analysis = dir.path().join("analysis.json");
    let o = polyurn(&[
        "simulate",
        "--hypergraph",
        "builtin:cube",
        "--steps",
        "2000",
        "--replicas",
        "2",
        "--noise",
        "--schedule",
        "points:10,100,1000",
        "--against-analysis",
        analysis.to_str().unwrap(),
        "--out",
        &d,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&dir.path().join("summary.json"));
    assert_eq!(s["candidates"]["dim"], 4);
    let r0 = &s["limit"]["replicas"][0];
    assert!(r0["distance"].as_f64().unwrap() >= 0.0);
    assert_eq!(r0["trend"].as_array().unwrap().len(), 5);
    assert!(s["noise"][0]["max_sup_norm"].as_f64().unwrap() <= 1.0);

    let o = polyurn(&[
        "simulate",
        "--hypergraph",
        "builtin:tetrahedron",
        "--against-analysis",
        analysis.to_str().unwrap(),
        "--out",
        &d,
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_initial_balls_shift_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let mean_x0 = |balls: &str| {
        let out = dir.path().join(balls.replace(',', "_"));
        let o = polyurn(&[
            "simulate",
            "--hypergraph",
            "builtin:cube",
            "--balls",
            balls,
            "--steps",
            "3000",
            "--replicas",
            "16",
            "--out",
            &out_arg(&out),
        ]);
        assert!(o.status.success());
        let s = read_json(&out.join("summary.json"));
        let text = std::fs::read_to_string(out.join("trajectories.csv")).unwrap();
        let n = s["config"]["steps"].as_u64().unwrap().to_string();
        let x0: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[1] == n)
            .map(|f| f[2].parse().unwrap())
            .collect();
        x0.iter().sum::<f64>() / x0.len() as f64
    };
    assert!(mean_x0("100,1,1,1,1,1,1,1") > mean_x0("1,1,1,1,1,1,1,1"));
}

#[test]
fn simulate_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = out_arg(dir.path());
    for extra in [
        vec!["--balls", "1,1"],
        vec!["--balls", "0,1,1,1"],
        vec!["--replicas", "0"],
        vec!["--schedule", "geometric:0.5"],
        vec!["--schedule", "spiral:3"],
    ] {
        let mut args = vec!["simulate", "--hypergraph", "builtin:tetrahedron", "--out", &d];
        args.extend(extra.iter());
        assert_eq!(polyurn(&args).status.code(), Some(1), "{extra:?}");
    }
}

fn flow_rows(dir: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(dir.join("flow.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect()
}

#[test]
fn flow_tetrahedron_reaches_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyurn(&[
        "flow",
        "--hypergraph",
        "builtin:tetrahedron",
        "--start",
        "0.7,0.1,0.1,0.1",
        "--t-end",
        "200",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success());
    let rows = flow_rows(dir.path());
    let last = rows.last().unwrap();
    assert!(last[1..5].iter().all(|x| (x - 0.25).abs() < 1e-6));
    assert!(rows.windows(2).all(|w| w[1][5] >= w[0][5] - 1e-9));
}

#[test]
fn flow_at_equilibrium_is_constant() {
    for source in ["builtin:single_edge(3)", "builtin:cube"] {
        let dir = tempfile::tempdir().unwrap();
        let o = polyurn(&["flow", "--hypergraph", source, "--t-end", "5", "--out", &out_arg(dir.path())]);
        assert!(o.status.success());
        let rows = flow_rows(dir.path());
        for r in &rows {
            for (a, b) in r[1..].iter().zip(&rows[0][1..]) {
                assert!((a - b).abs() < 1e-14, "{source}");
            }
        }
    }
}

#[test]
fn flow_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = out_arg(dir.path());
    let big_step = polyurn(&[
        "flow",
        "--hypergraph",
        "builtin:tetrahedron",
        "--start",
        "0.7,0.1,0.1,0.1",
        "--dt",
        "10",
        "--t-end",
        "200",
        "--out",
        &d,
    ]);
    assert_eq!(big_step.status.code(), Some(2));
    assert_eq!(read_json(&dir.path().join("manifest.json"))["status"], "error");
    let outside = polyurn(&[
        "flow",
        "--hypergraph",
        "builtin:path(3)",
        "--start",
        "0.001,0.001,0.998",
        "--out",
        &d,
    ]);
    assert_eq!(outside.status.code(), Some(2));
    let bad_c = polyurn(&["flow", "--hypergraph", "builtin:cube", "--c", "0.5", "--out", &d]);
    assert_eq!(bad_c.status.code(), Some(1));
}

#[test]
fn report_renders_simulation_and_flow() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let flow = dir.path().join("flow");
    let rep = dir.path().join("rep");
    assert!(polyurn(&[
        "simulate",
        "--hypergraph",
        "builtin:cube",
        "--steps",
        "1000",
        "--replicas",
        "2",
        "--out",
        &out_arg(&sim)
    ])
    .status
    .success());
    assert!(polyurn(&["flow", "--hypergraph", "builtin:cycle(3)", "--start", "0.6,0.3,0.1", "--out", &out_arg(&flow)])
        .status
        .success());
    let o = polyurn(&[
        "report",
        sim.join("trajectories.csv").to_str().unwrap(),
        flow.join("flow.csv").to_str().unwrap(),
        "--log-x",
        "--show-lyapunov",
        "--out",
        &out_arg(&rep),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = assert_manifest_outputs_exist(&rep);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 5);
    let svg = std::fs::read_to_string(rep.join("trajectories_r0.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 8);
    let md = std::fs::read_to_string(rep.join("report.md")).unwrap();
    assert!(md.contains("non-decreasing"));
}

#[test]
fn report_rejects_missing_or_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = out_arg(dir.path());
    let missing = dir.path().join("nope.csv");
    assert_eq!(polyurn(&["report", missing.to_str().unwrap(), "--out", &d]).status.code(), Some(1));
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "replica,n,x0,x1\n").unwrap();
    let o = polyurn(&["report", empty.to_str().unwrap(), "--out", &d]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no data rows"));
    assert_eq!(read_json(&dir.path().join("manifest.json"))["status"], "error");
}
