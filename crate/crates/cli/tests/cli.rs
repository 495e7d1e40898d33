use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smoothip"));
    c.env_remove("SMOOTHIP_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn triangle(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "tri.col",
        "c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n",
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("missing {key} in {text}"))
}

#[test]
fn gen_complete_graph() {
    let o = run(&["gen", "maxcut", "--n", "8", "--p", "1.0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("p edge 8 28"));
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 28);
}

#[test]
fn gen_is_deterministic() {
    let args = [
        "gen", "maxksat", "--n", "10", "--m", "40", "--k", "3", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("p cnf 10 40"));
}

#[test]
fn gen_rejects_arity_above_n() {
    let o = run(&["gen", "maxkcsp", "--k", "5", "--n", "3"]);
    assert!(!o.status.success());
}

#[test]
fn solve_triangle_exact() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let o = run(&[
        "solve",
        s(&tri),
        "--prediction",
        "exact",
        "--strategy",
        "greedy",
        "--no-timing",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["best_value"], "2");
}

#[test]
fn perturb_zero_matches_exact() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.col");
    assert!(
        run(&["gen", "maxcut", "--n", "9", "--seed", "3", "-o", s(&inst)])
            .status
            .success()
    );
    let a = json(&run(&[
        "solve",
        s(&inst),
        "--prediction",
        "exact",
        "--no-timing",
    ]));
    let b = json(&run(&[
        "solve",
        s(&inst),
        "--prediction",
        "perturb:0",
        "--no-timing",
    ]));
    assert_eq!(a["best_value"], b["best_value"]);
}

#[test]
fn explicit_grid_rows_and_files() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.col");
    assert!(
        run(&["gen", "maxcut", "--n", "12", "--seed", "1", "-o", s(&inst)])
            .status
            .success()
    );
    let csv = dir.path().join("r.csv");
    let js = dir.path().join("r.json");
    let o = run(&[
        "solve",
        s(&inst),
        "--grid",
        "0,5,10",
        "--csv",
        s(&csv),
        "--json",
        s(&js),
        "--no-timing",
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("eps,lp_value,rounded_value,violation_max,wall_ms,status\n"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(report["per_eps"].as_array().unwrap().len(), 3);
}

#[test]
fn prediction_file() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let pred = write(&dir, "p.txt", "110\n");
    let o = run(&["solve", s(&tri), "--prediction", s(&pred), "--no-timing"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["best_value"], "2");
    let short = write(&dir, "q.txt", "11\n");
    assert_eq!(
        run(&["solve", s(&tri), "--prediction", s(&short)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.cnf", "p cnf 2 1\n1 x 0\n");
    assert_eq!(run(&["solve", s(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["verify", s(&bad)]).status.code(), Some(2));
    let missing = dir.path().join("nope.col");
    assert_eq!(run(&["solve", s(&missing)]).status.code(), Some(2));
}

#[test]
fn all_lp_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    // x0 alone can never reach 5
    let c = write(&dir, "c.poly", "# n 3 d 1\n1 0\n");
    let spec = format!("{},5,6", s(&c));
    let o = run(&[
        "solve",
        s(&tri),
        "--constraint",
        &spec,
        "--grid",
        "0",
        "--prediction",
        "file:/dev/null",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "empty prediction file is an input error"
    );
    let pred = write(&dir, "p.txt", "100\n");
    let o = run(&[
        "solve",
        s(&tri),
        "--constraint",
        &spec,
        "--grid",
        "0",
        "--prediction",
        s(&pred),
        "--no-timing",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn vacuous_constraint_has_zero_violation() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("g.col");
    assert!(
        run(&["gen", "maxcut", "--n", "8", "--seed", "4", "-o", s(&inst)])
            .status
            .success()
    );
    let c = write(
        &dir,
        "card.poly",
        "# n 8 d 1\n1 0\n1 1\n1 2\n1 3\n1 4\n1 5\n1 6\n1 7\n",
    );
    let spec = format!("{},0,8", s(&c));
    let o = run(&[
        "solve",
        s(&inst),
        "--constraint",
        &spec,
        "--prediction",
        "perturb:3",
        "--no-timing",
    ]);
    assert!(o.status.success());
    let r = json(&o);
    assert_eq!(r["best_violation"], "0");
    assert_eq!(r["num_constraints"], 1);
    assert!(r["per_eps"][0]["constraint_delta"].is_string());
}

#[test]
fn sweep_rows_meet_bounds_and_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.cnf");
    let b = dir.path().join("b.col");
    assert!(run(&[
        "gen",
        "maxksat",
        "--n",
        "8",
        "--m",
        "30",
        "--k",
        "3",
        "--seed",
        "2",
        "-o",
        s(&a)
    ])
    .status
    .success());
    assert!(
        run(&["gen", "maxcut", "--n", "9", "--seed", "5", "-o", s(&b)])
            .status
            .success()
    );
    let args = [
        "sweep",
        s(&a),
        s(&b),
        "--trials",
        "2",
        "--seed",
        "11",
        "--no-timing",
    ];
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(o.stdout, run(&args).stdout);
    assert_eq!(
        o.stdout,
        bin()
            .args(args)
            .arg("--sequential")
            .output()
            .unwrap()
            .stdout
    );

    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["instance", "eps", "trial", "achieved", "opt", "ratio", "bound", "lp_value"]
    );
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        let eps: usize = rec[1].parse().unwrap();
        let achieved: f64 = rec[3].parse().unwrap();
        let ratio: f64 = rec[5].parse().unwrap();
        let bound: f64 = rec[6].parse().unwrap();
        assert!(achieved >= bound, "{rec:?}");
        if eps == 0 {
            assert_eq!(ratio, 1.0, "{rec:?}");
        }
    }
    assert_eq!(rows, 2 * (9 + 10));
}

#[test]
fn sweep_lp_values_grow_with_grid() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.col");
    assert!(
        run(&["gen", "maxcut", "--n", "10", "--seed", "8", "-o", s(&g)])
            .status
            .success()
    );
    let csv = dir.path().join("r.csv");
    let o = run(&[
        "solve",
        s(&g),
        "--prediction",
        "perturb:4",
        "--csv",
        s(&csv),
        "--no-timing",
    ]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let lp: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(lp.len(), 11);
    assert!(lp.windows(2).all(|w| w[1] >= w[0] - 1e-6), "{lp:?}");
}

#[test]
fn sweep_beyond_cap_uses_reference_files() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("big.col");
    assert!(run(&[
        "gen",
        "maxcut",
        "--n",
        "26",
        "--p",
        "0.2",
        "--seed",
        "1",
        "-o",
        s(&g)
    ])
    .status
    .success());
    let o = run(&["sweep", s(&g), "--eps", "0"]);
    assert!(!o.status.success());
    write(&dir, "big.sol", &"01".repeat(13));
    let o = run(&["sweep", s(&g), "--eps", "0,3", "--no-timing"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn verify_reports_certificates() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let out = stdout(&run(&["verify", s(&tri)]));
    assert_eq!(field(&out, "d"), "2");
    assert_eq!(field(&out, "beta"), "2");
    assert!(field(&out, "density").contains("dense at >= 1.75"));

    let empty = write(&dir, "empty.cnf", "p cnf 4 0\n");
    let out = stdout(&run(&["verify", s(&empty)]));
    assert_eq!(field(&out, "beta"), "0");
    assert_eq!(field(&out, "monomials"), "0");

    let sat = dir.path().join("s.cnf");
    assert!(run(&[
        "gen",
        "maxksat",
        "--n",
        "9",
        "--m",
        "20",
        "--k",
        "3",
        "--seed",
        "1",
        "-o",
        s(&sat)
    ])
    .status
    .success());
    let out = stdout(&run(&["verify", s(&sat)]));
    assert_eq!(field(&out, "d"), "3");
    let beta: f64 = {
        let b = field(&out, "beta");
        match b.split_once('/') {
            Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
            None => b.parse().unwrap(),
        }
    };
    assert!(beta <= 64.0);
}

#[test]
fn erm_builtin_candidates_pick_exact() {
    let dir = TempDir::new().unwrap();
    let mut paths = Vec::new();
    for seed in 0..3 {
        let p = dir.path().join(format!("f{seed}.cnf"));
        assert!(run(&[
            "gen",
            "maxksat",
            "--n",
            "8",
            "--m",
            "30",
            "--k",
            "3",
            "--seed",
            &seed.to_string(),
            "-o",
            s(&p)
        ])
        .status
        .success());
        paths.push(p);
    }
    let mut args = vec!["erm".to_string()];
    args.extend(paths.iter().map(|p| s(p).to_string()));
    args.push("--no-timing".into());
    let o = bin().args(&args).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("selected: 0 (exact)"));
}

#[test]
fn erm_manifest() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    write(&dir, "good.txt", "100\n");
    write(&dir, "poor.txt", "000\n");
    let m = write(
        &dir,
        "m.json",
        r#"[{"tri": "poor.txt"}, {"tri": "good.txt"}]"#,
    );
    let o = run(&["erm", s(&tri), "--manifest", s(&m), "--no-timing"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("selected:"));
    assert!(out.lines().count() >= 3);
}

#[test]
fn thread_env_is_accepted() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let o = bin()
        .env("SMOOTHIP_THREADS", "2")
        .args(["solve", s(&tri), "--no-timing"])
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn polynomial_input() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.poly", "# n 4 d 3\n1 0 1 2\n1 1 3\n3\n");
    let o = run(&["solve", s(&p), "--no-timing"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["best_value"], "5");
}
