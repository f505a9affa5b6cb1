use std::path::Path;
use std::process::{Command, Output};

fn hlmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlmax"))
        .args(args)
        .env("HLMAX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn value_column(csv: &str, column: usize) -> Vec<f64> {
    rows(csv).iter().map(|r| r[column].parse().unwrap()).collect()
}

#[test]
fn eval_matches_the_closed_forms() {
    let o = hlmax(&["eval", "--space", "real-line", "--function", "indicator-ball:0:1", "--weight", "exp", "--p", "1", "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("space,function,weight,p,point,value,error_bound,kind,seed\n"));
    let v = value_column(&text, 5)[0];
    assert!((v - 0.851_504_493_2).abs() < 1e-6, "{v}");

    let o = hlmax(&["eval", "--function", "indicator-ball:0:1", "--p", "inf", "--point", "2"]);
    assert!((value_column(&stdout(&o), 5)[0] - 1.0 / 3.0).abs() < 1e-4);

    let o = hlmax(&["eval", "--function", "const:3", "--p", "2", "--weight", "exp"]);
    assert!((value_column(&stdout(&o), 5)[0] - 3.0).abs() < 1e-8);
}

#[test]
fn eval_crosses_exponents_and_points() {
    let o = hlmax(&["eval", "--function", "bump:0:1", "--p", "1,2", "--p", "inf", "--point", "0", "--point", "-1.5"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 6);
    assert_eq!(&r[0][3], "1");
    assert_eq!(&r[5][3], "inf");
    assert_eq!(&r[5][4], "-1.5");
    assert!(r.iter().all(|row| &row[7] == "deterministic" && &row[8] == "42"));
}

#[test]
fn exit_codes() {
    let bad_fn = hlmax(&["eval", "--function", "triangle:0:1"]);
    assert_eq!(bad_fn.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_fn.stderr).contains("triangle:0:1"));
    assert_eq!(hlmax(&["eval", "--function", "bump:0:1", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(hlmax(&["eval", "--function", "bump:0:1", "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(hlmax(&["eval"]).status.code(), Some(2));
    assert_eq!(hlmax(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hlmax(&["verify", "--suite", "nope"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("w.csv");
    std::fs::write(&table, "r,w\n0,1e308\n1,1e308\n2,1e308\n").unwrap();
    let weight = format!("table:{}", table.display());
    let o = hlmax(&["eval", "--function", "indicator-ball:0:1", "--weight", &weight, "--p", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_rows_plot_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let svg_path = dir.path().join("sweep.svg");
    let o = hlmax(&[
        "sweep",
        "--function",
        "indicator-ball:0:1",
        "--point",
        "2",
        "--out",
        csv_path.to_str().unwrap(),
        "--plot",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("p,i_value,normalized,gap_to_max,maximal\n"));
    let normalized = value_column(&text, 2);
    assert_eq!(normalized.len(), 9);
    assert!(normalized.windows(2).all(|w| w[1] >= w[0]));
    assert!(*normalized.last().unwrap() >= 0.3167);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains(r#"viewBox="0 0 800 500""#) && svg.contains("stroke-dasharray"));

    let replot = dir.path().join("again.svg");
    let o = hlmax(&["plot", "--input", csv_path.to_str().unwrap(), "--plot", replot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&replot).unwrap(), svg);
}

#[test]
fn sweeps_of_trivial_functions() {
    let o = hlmax(&["sweep", "--function", "const:2", "--p", "1,4,16"]);
    assert!(value_column(&stdout(&o), 2).iter().all(|v| (v - 2.0).abs() < 1e-8));
    let o = hlmax(&["sweep", "--function", "zero"]);
    let r = rows(&stdout(&o));
    assert!(r.iter().all(|row| (1..5).all(|k| row[k].parse::<f64>().unwrap() == 0.0)));
}

#[test]
fn grid_profiles_plot_from_eval_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("profile.csv");
    let o = hlmax(&[
        "eval",
        "--space",
        "affine-left",
        "--function",
        "bump:e:1",
        "--p",
        "1,inf",
        "--grid",
        "0,1:1.5:7",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(rows(&text).len(), 14);
    let o = hlmax(&["plot", "--input", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "function = \"indicator-ball:0:1\"\np = \"inf\"\npoint = \"2\"\nseed = 11\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = hlmax(&["eval", "--config", cfg]);
    let r = rows(&stdout(&o));
    assert_eq!(&r[0][3], "inf");
    assert_eq!(&r[0][8], "11");
    let o = hlmax(&["eval", "--config", cfg, "--p", "1", "--seed", "5"]);
    let r = rows(&stdout(&o));
    assert_eq!((&r[0][3], &r[0][4], &r[0][8]), ("1", "2", "5"));

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "funtcion = 1\n").unwrap();
    assert_eq!(hlmax(&["eval", "--config", broken.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_writes_the_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = hlmax(&["verify", "--suite", "euclidean", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 fail"));
    let text = std::fs::read_to_string(&out).unwrap();
    let reports: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    assert!(!reports.is_empty());
    for r in &reports {
        let obj = r.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["config_digest", "details", "lhs", "name", "paper_anchor", "rhs", "seed", "slack", "status"]);
        assert_eq!(obj["status"], "pass", "{}", obj["name"]);
    }
    let names: Vec<&str> = reports.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names.last(), Some(&"suite/non-vacuity"));
    let mut sorted = names[..names.len() - 1].to_vec();
    sorted.sort_unstable();
    assert_eq!(sorted, names[..names.len() - 1]);
}

#[test]
fn outputs_are_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    for seed in ["1", "2"] {
        let o = hlmax(&["eval", "--function", "bump:0:1", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.ends_with(",2\n"));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1, "{:?}", Path::new(&out));
}
