use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn xtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtree"))
        .args(args)
        .env_remove("XTREE_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json_out(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn scores(v: &Value) -> Vec<f64> {
    v["scores"].as_array().unwrap().iter().map(|s| s.as_f64().unwrap()).collect()
}

fn notation_args<'a>(x: &'a str, model: &'a str) -> Vec<&'a str> {
    vec!["explain", "--model", model, "--instance", x]
}

#[test]
fn banzhaf_of_third_feature_on_notation_tree() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let model = fixture("notation_tree.json");
    let mut args = notation_args(&x, model.to_str().unwrap());
    args.extend(["--algo", "grad", "--method", "banzhaf"]);
    let v = json_out(&xtree(&args));
    assert!((scores(&v)[2] - 0.0448636).abs() < 1e-7);
    assert_eq!(v["manifest"]["command"], "explain");
    assert_eq!(v["manifest"]["flags"]["method"], "banzhaf");
}

#[test]
fn grad_and_prob_agree() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let model = fixture("notation_tree.json");
    for method in ["shapley", "banzhaf", "wbanzhaf:0.3", "beta:4:1"] {
        let mut out = Vec::new();
        for algo in ["grad", "prob", "oracle"] {
            let mut args = notation_args(&x, model.to_str().unwrap());
            args.extend(["--algo", algo, "--method", method, "--vectorized"]);
            out.push(scores(&json_out(&xtree(&args))));
        }
        for s in &out[1..] {
            for (a, b) in s.iter().zip(&out[0]) {
                assert!((a - b).abs() < 1e-12, "{method}");
            }
        }
    }
}

#[test]
fn baselines_and_weight_files() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let model = fixture("notation_tree.json");
    let m = model.to_str().unwrap();
    let shapley = scores(&json_out(&xtree(&[&notation_args(&x, m)[..], &["--algo", "oracle"]].concat())));
    for algo in ["linear-treeshap", "linear-treeshap:mitigated", "linear-treeshap:wellcond:depth", "treeshap-k", "v1"] {
        let s = scores(&json_out(&xtree(&[&notation_args(&x, m)[..], &["--algo", algo]].concat())));
        for (a, b) in s.iter().zip(&shapley) {
            assert!((a - b).abs() < 1e-12, "{algo}");
        }
    }
    // Shapley weights for three features.
    let omega = write(&dir, "w.json", "[0.3333333333333333, 0.16666666666666666, 0.3333333333333333]");
    let method = format!("omega:{omega}");
    let s = scores(&json_out(&xtree(&[&notation_args(&x, m)[..], &["--algo", "prob", "--method", &method]].concat())));
    for (a, b) in s.iter().zip(&shapley) {
        assert!((a - b).abs() < 1e-12);
    }
    let bad = xtree(&[&notation_args(&x, m)[..], &["--algo", "v1", "--method", "banzhaf"]].concat());
    assert_eq!(bad.status.code(), Some(2));
    let bad = xtree(&[&notation_args(&x, m)[..], &["--algo", "grad", "--method", &method]].concat());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_instances_give_one_result_per_row() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "x.csv", "a,b,c\n0.2,0.8,0.3\n0.9,0.1,0.6\n");
    let model = fixture("notation_tree.json");
    let v = json_out(&xtree(&[
        "explain", "--model", model.to_str().unwrap(), "--instances", &data, "--skip-header",
    ]));
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    let no_skip = xtree(&["explain", "--model", model.to_str().unwrap(), "--instances", &data]);
    assert_eq!(no_skip.status.code(), Some(3));
}

fn wide_model(n: usize) -> String {
    format!(
        r#"{{"format_version":1,"n_features":{n},"base_value":0.0,"trees":[{{"left":[1,-1,-1],"right":[2,-1,-1],"feature":[0,-1,-1],"threshold":[0.5,0,0],"cover":[2,1,1],"value":[0,1,0]}}]}}"#
    )
}

#[test]
fn oracle_cap_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &wide_model(30));
    let x = write(&dir, "x.json", &serde_json::to_string(&vec![0.1; 30]).unwrap());
    let out = xtree(&["explain", "--model", &model, "--instance", &x, "--algo", "oracle"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert!(err["error"]["message"].as_str().unwrap().contains("N over oracle cap"));
    // The exact algorithms have no such cap, and unused features score 0.
    let v = json_out(&xtree(&["explain", "--model", &model, "--instance", &x, "--algo", "prob"]));
    assert_eq!(v["null_features"].as_array().unwrap().len(), 29);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let model = fixture("notation_tree.json");
    let m = model.to_str().unwrap();
    let out = xtree(&["explain", "--model", m]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
    assert_eq!(xtree(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(xtree(&["explain", "--model", m, "--instance", &x, "--method", "beta:0:2"]).status.code(), Some(2));
    let short = write(&dir, "short.json", "[0.2]");
    let out = xtree(&["explain", "--model", m, "--instance", &short]);
    assert_eq!(out.status.code(), Some(3));
    let broken = write(&dir, "broken.json", r#"{"format_version":1}"#);
    assert_eq!(xtree(&["explain", "--model", &broken, "--instance", &x]).status.code(), Some(3));
    assert!(xtree(&["--help"]).status.success());
}

#[test]
fn nan_result_exits_four() {
    let dir = TempDir::new().unwrap();
    let model = write(
        &dir,
        "m.json",
        r#"{"format_version":1,"n_features":1,"base_value":0.0,"trees":[
        {"left":[1,-1,-1],"right":[2,-1,-1],"feature":[0,-1,-1],"threshold":[0.5,0,0],"cover":[2,1,1],"value":[0,1.7e308,-1.7e308]},
        {"left":[1,-1,-1],"right":[2,-1,-1],"feature":[0,-1,-1],"threshold":[0.5,0,0],"cover":[2,1,1],"value":[0,-1.7e308,1.7e308]}]}"#,
    );
    let x = write(&dir, "x.json", "[0.2]");
    let out = xtree(&["explain", "--model", &model, "--instance", &x, "--algo", "prob", "--method", "banzhaf"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "numerical");
}

#[test]
fn rank_outputs_and_trace() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let trace = dir.path().join("trace.csv");
    let model = fixture("notation_tree.json");
    let v = json_out(&xtree(&[
        "rank", "--model", model.to_str().unwrap(), "--instance", &x, "--optimizer", "adam",
        "--iters", "10", "--lr", "0.1", "--trace", trace.to_str().unwrap(),
    ]));
    assert_eq!(v["zeta"].as_array().unwrap().len(), 3);
    assert_eq!(v["final_z"].as_array().unwrap().len(), 3);
    let mut ranking: Vec<u64> = v["ranking"].as_array().unwrap().iter().map(|r| r.as_u64().unwrap()).collect();
    ranking.sort_unstable();
    assert_eq!(ranking, vec![0, 1, 2]);
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest: {"));
    assert_eq!(lines[1], "t,objective");
    assert_eq!(lines.len(), 2 + 11);

    let one = json_out(&xtree(&[
        "rank", "--model", model.to_str().unwrap(), "--instance", &x, "--iters", "1",
    ]));
    let banzhaf = json_out(&xtree(&[
        "explain", "--model", model.to_str().unwrap(), "--instance", &x, "--method", "banzhaf",
    ]));
    assert_eq!(one["zeta"], banzhaf["scores"]);
    let auto = json_out(&xtree(&["rank", "--model", model.to_str().unwrap(), "--instance", &x, "--lr", "auto"]));
    assert!([0.1, 0.5, 1.0, 5.0, 10.0].contains(&auto["learning_rate"].as_f64().unwrap()));
    let bad = xtree(&["rank", "--model", model.to_str().unwrap(), "--instance", &x, "--optimizer", "sgd"]);
    assert_eq!(bad.status.code(), Some(2));
}

fn instances_csv(dir: &TempDir) -> String {
    let rows: Vec<String> = (0..12)
        .map(|i| {
            let f = |k: usize| ((i * 7 + k * 3) % 10) as f64 / 10.0 + 0.05;
            format!("{},{},{}", f(0), f(1), f(2))
        })
        .collect();
    write(dir, "data.csv", &(rows.join("\n") + "\n"))
}

#[test]
fn metrics_outputs() {
    let dir = TempDir::new().unwrap();
    let data = instances_csv(&dir);
    let curves = dir.path().join("curves.csv");
    let summary = dir.path().join("summary.json");
    let per = dir.path().join("per.csv");
    let model = fixture("notation_tree.json");
    let out = xtree(&[
        "metrics", "--model", model.to_str().unwrap(), "--instances", &data,
        "--methods", "shapley,banzhaf,beta:4:1,ranker:ga:100:5,ranker:adam:10:auto",
        "--out", curves.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
        "--per-instance", per.to_str().unwrap(), "--samples", "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&curves).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest:"));
    assert_eq!(lines[1], "method,k,insertion,deletion");
    // (5 methods + 3 selected Beta rows) × 3 features
    assert_eq!(lines.len(), 2 + 8 * 3);
    let last_shapley: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(last_shapley[..2], ["shapley", "3"]);
    // With every feature in, both curves reach f(x).
    assert_eq!(last_shapley[2], last_shapley[3]);

    let s: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["n_instances"], 5);
    assert_eq!(s["manifest"]["seed"], 2025);
    assert_eq!(s["methods"].as_array().unwrap().len(), 8);
    for key in ["beta-insertion", "beta-deletion", "beta-joint"] {
        let winner = s["selection"][key]["winner"].as_str().unwrap();
        assert!(s["candidates"].as_array().unwrap().iter().any(|c| c == winner));
    }
    let m0 = &s["methods"][0];
    let joint = m0["ins"].as_f64().unwrap() - m0["del"].as_f64().unwrap();
    assert!((m0["joint"].as_f64().unwrap() - joint).abs() < 1e-15);
    let per_lines = fs::read_to_string(&per).unwrap().lines().count();
    assert_eq!(per_lines, 2 + 5 * 5 * 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let data = instances_csv(&dir);
    let model = fixture("notation_tree.json");
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_xtree"))
            .args(["metrics", "--model", model.to_str().unwrap(), "--instances", &data])
            .env("XTREE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        text.lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(run("1"), run("4"));
    let bad = Command::new(env!("CARGO_BIN_EXE_xtree"))
        .args(["metrics", "--model", model.to_str().unwrap(), "--instances", &data])
        .env("XTREE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", "[0.2, 0.8, 0.3]");
    let model = fixture("notation_tree.json");
    let args = ["explain", "--model", model.to_str().unwrap(), "--instance", &x];
    let a = String::from_utf8(xtree(&args).stdout).unwrap();
    let b = String::from_utf8(xtree(&args).stdout).unwrap();
    let strip = |t: &str| {
        let mut v: Value = serde_json::from_str(t).unwrap();
        v["manifest"]["wall_times"] = Value::Null;
        v.to_string()
    };
    assert_eq!(strip(&a), strip(&b));
    let sweep = ["stability", "--depths", "5,8", "--features", "4", "--repeats", "2"];
    let drop_manifest = |o: Output| String::from_utf8(o.stdout).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(drop_manifest(xtree(&sweep)), drop_manifest(xtree(&sweep)));
}

#[test]
fn stability_rows_per_depth_and_algo() {
    let out = xtree(&["stability", "--depths", "10:20:10", "--features", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest:"));
    assert_eq!(lines[1], "depth,algo,basis_size,max_abs_error,condition");
    assert_eq!(lines.len(), 2 + 2 * 5);
    for line in &lines[2..] {
        let cells: Vec<&str> = line.split(',').collect();
        let err: f64 = cells[3].parse().unwrap();
        assert!(err < 1e-6, "{line}");
        if cells[1] == "prob" {
            assert!((cells[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
        }
    }
    let sized = xtree(&["stability", "--depths", "30", "--algos", "linear-treeshap:fixed:depth,grad"]);
    let text = String::from_utf8(sized.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[2], "30");
    assert!(row[3].parse::<f64>().unwrap() > 1e-6);
    assert_eq!(xtree(&["stability", "--depths", "3:1:1"]).status.code(), Some(2));
    assert_eq!(xtree(&["stability", "--features", "30", "--depths", "5"]).status.code(), Some(3));
}

#[test]
fn bench_reports_each_size() {
    let out = xtree(&["bench", "--leaves", "100,1000", "--repeats", "2", "--features", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "algo,leaves,depth,min_seconds,median_seconds");
    assert_eq!(lines.len(), 2 + 2 * 3);
    assert!(lines[2].starts_with("grad,100,99,"));
}
