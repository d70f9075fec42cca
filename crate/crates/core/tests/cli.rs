use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghz-purify")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(field: &str) -> f64 {
    field.parse().unwrap()
}

#[test]
fn compare_is_byte_identical() {
    let a = run(&["compare"]);
    let b = run(&["compare"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["compare", "--n", "10"]);
    let d = run(&["compare", "--n", "10"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn header_is_stable() {
    let out = stdout(&run(&["compare", "--n-min", "6", "--n-max", "6"]));
    assert_eq!(
        out.lines().next().unwrap(),
        "n,delta,epsilon,k_bi,cost_bi,k_multi,cost_multi,log2_ratio,status"
    );
}

#[test]
fn noiseless_input_needs_no_rounds() {
    let out = run(&["compare", "--n-min", "3", "--n-max", "8", "--delta", "0"]);
    assert!(out.status.success());
    for (i, row) in rows(&stdout(&out)).iter().enumerate() {
        let n = 3 + i as u32;
        assert_eq!(row[3], "0");
        assert_eq!(row[5], "0");
        assert_eq!(num(&row[4]), (n - 1) as f64);
        assert_eq!(num(&row[6]), 1.0);
        assert!((num(&row[7]) - ((n - 1) as f64).log2()).abs() < 1e-12);
        assert_eq!(row[8], "ok");
    }
}

#[test]
fn noise_sweep_structure() {
    let out = run(&["compare", "--n", "10"]);
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 30);
    let deltas: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert!((deltas[0] - 0.01).abs() < 1e-15);
    assert!((deltas[29] - 0.9).abs() < 1e-12);
    assert!(deltas.windows(2).all(|w| w[1] > w[0]));
    let infeasible: Vec<usize> = (0..30).filter(|&i| rows[i][8] != "ok").collect();
    assert_eq!(infeasible, vec![28, 29]);
    for r in &rows[28..] {
        assert!(r[8].contains("bi_unreachable"));
        assert!(r[4].is_empty() && r[7].is_empty());
    }
    let ratios: Vec<f64> = rows[..28].iter().map(|r| num(&r[7])).collect();
    assert!(ratios.iter().all(|&x| x > 0.0));
}

#[test]
fn cost_model_switch_doubles_single_round_cost() {
    let args = ["compare", "--n-min", "10", "--n-max", "10", "--delta", "0.5"];
    let paper = rows(&stdout(&run(&args)));
    let mut with_model = args.to_vec();
    with_model.extend(["--cost-model", "expected"]);
    let expected = rows(&stdout(&run(&with_model)));
    assert_eq!(paper[0][5], "1");
    assert_eq!(expected[0][5], "1");
    let ratio = num(&expected[0][6]) / num(&paper[0][6]);
    assert!((ratio - 2.0).abs() < 1e-12, "ratio {ratio}");
}

#[test]
fn json_has_nulls_not_nan() {
    let out = stdout(&run(&["compare", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 18);
    assert!(arr[0]["log2_ratio"].is_null());
    assert!(arr[17]["log2_ratio"].as_f64().unwrap() > 30.0);
    assert!(!out.contains("NaN"));
}

#[test]
fn threshold_rows() {
    let out = run(&["threshold"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let n: i32 = r[0].parse().unwrap();
        assert!((num(&r[1]) - 2.0 / (2f64.powi(n) - 2.0)).abs() < 1e-15);
        assert!((num(&r[4]) - (1.0 - num(&r[1]))).abs() < 1e-15);
        assert!(num(&r[2]) < num(&r[1]));
    }
}

#[test]
fn trajectory_dump() {
    let out = run(&["trajectory", "--protocol", "multipartite", "--n", "3", "--q0", "1", "--k", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn verify_flags_only_success_probability() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(1));
    let rows = rows(&stdout(&out));
    let failed: Vec<&str> = rows.iter().filter(|r| r[3] == "false").map(|r| r[0].as_str()).collect();
    assert_eq!(failed, vec!["bbpssw success probability vs (1+q)/4"]);
}

#[test]
fn verify_with_impossible_tolerance_fails() {
    let out = run(&["verify", "--n-max", "3", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--n-max", "12"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--n-min", "1"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--n-min", "5", "--n-max", "3"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--n", "10", "--delta", "0.2"]).status.code(), Some(2));
    assert_eq!(run(&["trajectory", "--protocol", "bipartite", "--n", "3", "--q0", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("ghz-purify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.csv");
    let out = run(&["compare", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&run(&["compare"])));
    std::fs::remove_dir_all(&dir).unwrap();
}
