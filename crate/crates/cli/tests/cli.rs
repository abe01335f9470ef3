use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tvc::model::parse_document;
use tvc::model::presets::Model;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn tvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvc")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let out = dir.display().to_string();
    all.extend(["--out", &out]);
    tvc(&all)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_configs_match_presets() {
    for m in Model::all() {
        let single = fs::read_to_string(configs().join(format!("model{}.json", m.index))).unwrap();
        assert_eq!(parse_document(&single).unwrap(), m.single());
        let two = fs::read_to_string(configs().join(format!("model{}-two-group.json", m.index))).unwrap();
        assert_eq!(parse_document(&two).unwrap(), m.two_group(25));
    }
    let random = fs::read_to_string(configs().join("random-50.json")).unwrap();
    assert_eq!(parse_document(&random).unwrap(), Model::table(1).unwrap().random(50));
    let minimal = fs::read_to_string(configs().join("minimal.json")).unwrap();
    assert_eq!(parse_document(&minimal).unwrap().node_count(), 1);
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("created_unix_s").expect("timestamp field");
    v
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["generate", "--config", &config("minimal.json"), "--seed", "1", "--duration", "1000"];
    assert_eq!(code(&run_in(&a, &args)), 0);
    assert_eq!(code(&run_in(&b, &args)), 0);
    for f in ["trace.ns2", "trace.csv", "trace.meta.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let (ma, mb) = (json(&a.join("manifest.json")), json(&b.join("manifest.json")));
    assert_eq!(without_timestamp(ma.clone()), without_timestamp(mb));
    assert_eq!(ma["seed"], 1);
    assert_eq!(ma["outputs"].as_array().unwrap().len(), 3);
    let digest = ma["outputs"][1]["sha256"].as_str().unwrap();
    assert_eq!(digest, tvc_sha(&fs::read(a.join("trace.csv")).unwrap()));

    let c = tmp.path().join("c");
    let other = ["generate", "--config", &config("minimal.json"), "--seed", "2", "--duration", "1000"];
    assert_eq!(code(&run_in(&c, &other)), 0);
    assert_ne!(fs::read(a.join("trace.csv")).unwrap(), fs::read(c.join("trace.csv")).unwrap());
}

fn tvc_sha(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn generate_single_format_and_reingest() {
    let tmp = TempDir::new().unwrap();
    let args = ["generate", "--config", &config("model2.json"), "--seed", "3", "--duration", "500", "--dt", "0.5", "--format", "csv"];
    assert_eq!(code(&run_in(tmp.path(), &args)), 0);
    assert!(!tmp.path().join("trace.ns2").exists());
    let text = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    let trace = tvc::stats::ingest_csv(text.as_bytes()).unwrap();
    assert_eq!(trace.len(), 1001);
    assert_eq!(trace.dt(), 0.5);
    let meta = json(&tmp.path().join("trace.meta.json"));
    assert_eq!(meta["seed"], 3);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let missing_seed = run_in(tmp.path(), &["generate", "--config", &config("minimal.json"), "--duration", "10"]);
    assert_eq!(code(&missing_seed), 2);
    assert!(stderr(&missing_seed).contains("--seed"));

    let bad_flag = tvc(&["generate", "--bogus"]);
    assert_eq!(code(&bad_flag), 2);

    let no_file = run_in(tmp.path(), &["theory", "--config", "/nonexistent/x.json"]);
    assert_eq!(code(&no_file), 2);

    let broken = tmp.path().join("broken.json");
    let text = fs::read_to_string(configs().join("minimal.json")).unwrap().replace("[[1.0]]", "[[0.5]]");
    fs::write(&broken, text).unwrap();
    let invalid = run_in(tmp.path(), &["theory", "--config", &broken.display().to_string()]);
    assert_eq!(code(&invalid), 2);
    let err = stderr(&invalid);
    assert!(err.contains("row 0 sum"), "{err}");
    assert!(err.contains("Configuration format"), "schema help missing: {err}");

    let random_without_seed = run_in(tmp.path(), &["theory", "--config", &config("random-50.json")]);
    assert_eq!(code(&random_without_seed), 2);

    let bad_duration = run_in(tmp.path(), &["generate", "--config", &config("minimal.json"), "--seed", "1", "--duration", "0"]);
    assert_eq!(code(&bad_duration), 2);
}

fn check_consistency(report: &Value) -> bool {
    let mut all = true;
    for c in report["checks"].as_array().unwrap() {
        let e = c["relative_error"].as_f64().unwrap();
        let t = c["threshold"].as_f64().unwrap();
        assert_eq!(c["pass"].as_bool().unwrap(), e <= t, "{c}");
        let sim = c["simulated"].as_f64().unwrap();
        let analytic = c["analytic"].as_f64().unwrap();
        assert!((e - (analytic - sim).abs() / sim).abs() < 1e-12);
        if c["applicable"].as_bool().unwrap() {
            all &= c["pass"].as_bool().unwrap();
        }
    }
    assert_eq!(report["pass"].as_bool().unwrap(), all);
    all
}

#[test]
fn validate_exit_status_reflects_the_report() {
    let tmp = TempDir::new().unwrap();
    let base = ["validate", "--config", &config("model1.json"), "--iters", "5000", "--seed", "7"];
    let geometric = run_in(&tmp.path().join("g"), &base);
    let report = json(&tmp.path().join("g/validation.json"));
    let pass = check_consistency(&report);
    assert_eq!(code(&geometric), if pass { 0 } else { 1 });

    let mut truncated = base.to_vec();
    truncated.extend(["--wait", "truncated"]);
    let o = run_in(&tmp.path().join("t"), &truncated);
    let report = json(&tmp.path().join("t/validation.json"));
    let pass = check_consistency(&report);
    assert_eq!(code(&o), if pass { 0 } else { 1 });
    let ht = report["checks"].as_array().unwrap().iter().find(|c| c["quantity"] == "hitting_time").unwrap();
    assert!(ht["relative_error"].as_f64().unwrap() <= 0.15, "{ht}");
    assert_eq!(ht["nominal_threshold"].as_f64().unwrap(), 0.15);

    // the Monte Carlo side does not depend on the wait rule
    let g = json(&tmp.path().join("g/validation.json"));
    assert_eq!(g["checks"][0]["simulated"], report["checks"][0]["simulated"]);
}

#[test]
fn validate_thresholds_are_overridable() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "validate", "--config", &config("model1.json"), "--iters", "500", "--seed", "7", "--threshold-ht", "100", "--threshold-mt", "100",
    ];
    assert_eq!(code(&run_in(tmp.path(), &args)), 0);
    let strict = ["validate", "--config", &config("model1.json"), "--iters", "500", "--seed", "7", "--threshold-ht", "0", "--threshold-mt", "0"];
    assert_eq!(code(&run_in(&tmp.path().join("s"), &strict)), 1);
}

#[test]
fn validate_degree_applicability_follows_community_size() {
    let tmp = TempDir::new().unwrap();
    let cfg = config("model1-two-group.json");
    let common = ["validate", "--config", cfg.as_str(), "--iters", "200", "--seed", "5", "--duration", "8640"];
    let small: Vec<&str> = common.iter().copied().chain(["--range", "20"]).collect();
    run_in(&tmp.path().join("small"), &small);
    let large: Vec<&str> = common.iter().copied().chain(["--range", "30"]).collect();
    run_in(&tmp.path().join("large"), &large);
    let deg = |d: &str| json(&tmp.path().join(d).join("validation.json"))["checks"][0].clone();
    // pi * 20^2 is within 20% of a 100 m community, pi * 30^2 is not
    assert_eq!(deg("small")["quantity"], "degree");
    assert_eq!(deg("small")["applicable"], true);
    assert_eq!(deg("large")["applicable"], false);
}

#[test]
fn theory_reports_degree_hitting_and_meeting() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["theory", "--config", &config("model3-two-group.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&tmp.path().join("theory.json"));
    assert_eq!(r["degrees"].as_array().unwrap().len(), 50);
    assert!(r["network_degree"].as_f64().unwrap() > 0.0);
    assert_eq!(r["hitting"].as_array().unwrap().len(), 2);
    assert_eq!(r["meeting"].as_array().unwrap().len(), 3);
    assert!(r["hitting"][0].get("monte_carlo").is_none());
    assert!(tmp.path().join("hitting-a-0.csv").exists());
    assert!(tmp.path().join("meeting-a-0-b-0.csv").exists());

    // the analytic part is identical when Monte Carlo is added
    let mc = tmp.path().join("mc");
    let o = run_in(&mc, &["theory", "--config", &config("model3-two-group.json"), "--iters", "2000", "--seed", "11", "--wait", "truncated"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r2 = json(&mc.join("theory.json"));
    assert_eq!(r["degrees"], r2["degrees"]);
    for h in r2["hitting"].as_array().unwrap() {
        let m = &h["monte_carlo"];
        let (mean, se) = (m["mean"].as_f64().unwrap(), m["stderr"].as_f64().unwrap());
        assert!(m["iterations"].as_u64().unwrap() + m["timeouts"].as_u64().unwrap() == 2000);
        // truncated-wait hitting time tracks the simulation for this layout
        assert!((h["ht"].as_f64().unwrap() - mean).abs() <= 0.15 * mean + 3.0 * se, "{h}");
    }
    for m in r2["meeting"].as_array().unwrap() {
        assert!(m["monte_carlo"]["mean"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn theory_marks_impossible_meetings() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("apart.json");
    let doc = r#"{
      "field": {"edge_length": 1000},
      "speed": {"min": 5, "max": 15},
      "nodes": [
        {"id": "a", "schedule": [{"duration_s": 100, "communities": [{"id": "c", "x": 0, "y": 0, "edge": 100}],
          "transition_matrix": [[1]], "mean_epoch_length": [50], "max_pause_s": [10]}]},
        {"id": "b", "schedule": [{"duration_s": 100, "communities": [{"id": "c", "x": 800, "y": 800, "edge": 100}],
          "transition_matrix": [[1]], "mean_epoch_length": [50], "max_pause_s": [10]}]}
      ]
    }"#;
    fs::write(&cfg, doc).unwrap();
    let o = run_in(&tmp.path().join("out"), &["theory", "--config", &cfg.display().to_string()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&tmp.path().join("out/theory.json"));
    let ab = r["meeting"].as_array().unwrap().iter().find(|m| m["a"] == "a" && m["b"] == "b").unwrap().clone();
    assert_eq!(ab["mt"], "inf");
    // a target outside the node's community can never be hit
    assert_eq!(r["hitting"][0]["ht"], "inf");
    assert_eq!(r["network_degree"].as_f64().unwrap(), 0.0);
}

#[test]
fn stats_on_generated_and_ingested_traces() {
    let tmp = TempDir::new().unwrap();
    let gen = tmp.path().join("gen");
    let args = ["generate", "--config", &config("model1-two-group.json"), "--seed", "4", "--duration", "9000", "--format", "csv"];
    assert_eq!(code(&run_in(&gen, &args)), 0);
    let csv = gen.join("trace.csv").display().to_string();

    let from_file = tmp.path().join("file");
    let o = run_in(&from_file, &["stats", "--trace", &csv, "--range", "20", "--max-gap-h", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let direct = tmp.path().join("direct");
    let o = run_in(
        &direct,
        &["stats", "--config", &config("model1-two-group.json"), "--seed", "4", "--duration", "9000", "--range", "20", "--max-gap-h", "2"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["preference.csv", "reappearance.csv", "contact_durations.csv", "inter_meetings.csv", "degree.csv"] {
        assert_eq!(fs::read(from_file.join(f)).unwrap(), fs::read(direct.join(f)).unwrap(), "{f} differs");
    }
    let reap = fs::read_to_string(direct.join("reappearance.csv")).unwrap();
    assert_eq!(reap.lines().collect::<Vec<_>>()[..2], ["gap_h,probability", reap.lines().nth(1).unwrap()]);
    assert!(reap.lines().nth(1).unwrap().starts_with("1,"));
    assert_eq!(reap.lines().count(), 3);
    let pref = fs::read_to_string(direct.join("preference.csv")).unwrap();
    assert!(pref.starts_with("rank,fraction\n1,"));
    assert!(fs::read_to_string(direct.join("inter_meetings.csv")).unwrap().starts_with("value,cdf\n"));
    let summary = json(&direct.join("stats.json"));
    assert_eq!(summary["nodes"], 50);
    assert_eq!(summary["samples"], 9001);
    assert!(summary["contacts"].as_u64().unwrap() > 0);
}

#[test]
fn stats_on_a_contact_log() {
    let tmp = TempDir::new().unwrap();
    let log = tmp.path().join("log.csv");
    fs::write(&log, "a,b,start_s,end_s\nx,y,0,10\nx,y,50,60\nx,y,105,110\n").unwrap();
    let o = run_in(&tmp.path().join("o"), &["stats", "--contacts", &log.display().to_string()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let im = fs::read_to_string(tmp.path().join("o/inter_meetings.csv")).unwrap();
    assert_eq!(im, "value,cdf\n40,0.5\n45,1\n");
    let d = fs::read_to_string(tmp.path().join("o/contact_durations.csv")).unwrap();
    assert_eq!(d, "value,cdf\n5,0.3333333333333333\n10,1\n");
}

#[test]
fn epidemic_writes_simulation_and_theory() {
    let tmp = TempDir::new().unwrap();
    let args = ["epidemic", "--config", &config("model3-two-group.json"), "--seed", "9", "--duration", "3000", "--iters", "100"];
    let o = run_in(tmp.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let read = |f: &str| -> Vec<f64> {
        fs::read_to_string(tmp.path().join(f))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let (sim, theory) = (read("simulation.csv"), read("theory.csv"));
    assert_eq!(sim.len(), 3001);
    assert_eq!(theory.len(), 3001);
    for c in [&sim, &theory] {
        assert!(c.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(c.iter().all(|i| *i >= 1.0 - 1e-12 && *i <= 50.0));
    }
    assert_eq!(theory[0], 1.0);
    let s = json(&tmp.path().join("epidemic.json"));
    let beta = s["beta"].as_array().unwrap();
    assert_eq!(beta[0][1], beta[1][0]);

    let zero = tmp.path().join("zero");
    let o = run_in(&zero, &["epidemic", "--config", &config("model3-two-group.json"), "--seed", "9", "--duration", "500", "--range", "0", "--source", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let flat = fs::read_to_string(zero.join("simulation.csv")).unwrap();
    assert!(flat.lines().skip(1).all(|l| l.ends_with(",1")));

    let bad = run_in(&tmp.path().join("bad"), &["epidemic", "--config", &config("model3-two-group.json"), "--seed", "9", "--source", "50"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn route_reports_success_rates_and_population() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "route", "--config", &config("model3-two-group.json"), "--seed", "2", "--range", "10,30,60", "--iters", "200", "--reference",
        &config("model1-two-group.json"),
    ];
    let o = run_in(tmp.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("routing.csv")).unwrap();
    let rates: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(rates.len(), 3);
    assert!(rates.windows(2).all(|w| w[1] >= w[0]), "{csv}");
    let r = json(&tmp.path().join("route.json"));

    let reference = tvc::experiments::Population::from_document(&Model::table(1).unwrap().two_group(25)).unwrap();
    let target = tvc::experiments::Population::from_document(&Model::table(3).unwrap().two_group(25)).unwrap();
    let degree = reference.mean_degree(50.0, 10.0).unwrap();
    let needed = tvc::experiments::nodes_needed(&target, degree, 10.0).unwrap();
    assert_eq!(r["reference"]["nodes_needed"].as_u64().unwrap() as usize, needed);

    let random_ref = run_in(&tmp.path().join("r"), &["route", "--config", &config("model3-two-group.json"), "--seed", "2", "--reference", &config("random-50.json")]);
    assert_eq!(code(&random_ref), 2);
}
