use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nsdecay_core::solver::read_checkpoint;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nsdecay"));
    c.env_remove("NSDECAY_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn simulate(config: &Path, out: &Path) -> Output {
    bin().arg("simulate").arg(config).arg("--out").arg(out).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[k].parse().unwrap()).collect()
}

#[test]
fn simulate_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = simulate(&configs().join("smoke.toml"), &out);
    assert!(o.status.success(), "{}", text(&o));
    for f in ["norms.csv", "energy.csv", "density.csv", "duhamel.csv", "report.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let samples = report["samples"].as_u64().unwrap() as usize;
    assert_eq!(column(&out.join("norms.csv"), "t").len(), samples);
    let header = std::fs::read_to_string(out.join("norms.csv")).unwrap();
    assert!(header.starts_with("t,L2,B0_2_1,B1_2_1,B0_4_1\n"));

    let mut ckpts: Vec<PathBuf> = std::fs::read_dir(out.join("checkpoints")).unwrap().map(|e| e.unwrap().path()).collect();
    ckpts.sort();
    assert!(ckpts.len() >= 2);
    let (h, st) = read_checkpoint(ckpts.last().unwrap()).unwrap();
    assert_eq!(h.t, 1.0);
    let l2 = column(&out.join("norms.csv"), "L2");
    assert_eq!(st.u.norm_l2(), *l2.last().unwrap());
}

#[test]
fn report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(simulate(&configs().join("smoke.toml"), &out).status.success());
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn identical_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(simulate(&configs().join("smoke.toml"), &a).status.success());
    assert!(simulate(&configs().join("smoke.toml"), &b).status.success());
    let o = bin()
        .env("NSDECAY_THREADS", "3")
        .args(["simulate"])
        .arg(configs().join("smoke.toml"))
        .arg("--out")
        .arg(&c)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", text(&o));
    for f in ["norms.csv", "energy.csv", "density.csv", "duhamel.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(x, std::fs::read(c.join(f)).unwrap(), "{f} with 3 threads");
    }
}

#[test]
fn heat_baseline_integral_form_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = simulate(&configs().join("heat_baseline.toml"), &out);
    assert!(o.status.success(), "{}", text(&o));
    let r = column(&out.join("duhamel.csv"), "residual");
    assert!(r.len() >= 2);
    assert!(r.iter().all(|&x| x <= 1e-8), "{r:?}");
}

#[test]
fn decay_fit_on_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,L2\n");
    for i in 0..30 {
        let t = 10f64.powf(2.0 * i as f64 / 29.0);
        csv.push_str(&format!("{t:.16e},{:.16e}\n", 2.5 * (1.0 + t).powf(-0.75)));
    }
    std::fs::write(dir.path().join("norms.csv"), csv).unwrap();
    let o = bin()
        .arg("decay-fit")
        .arg(dir.path())
        .args(["--norm", "L2", "--t-min", "1", "--t-max", "100"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", text(&o));
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!((fit["fit"]["exponent"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!(fit["pass"].is_null());
}

#[test]
fn decay_fit_gates_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(simulate(&configs().join("smoke.toml"), &out).status.success());

    let o = bin().arg("decay-fit").arg(&out).args(["--norm", "L2", "--t-min", "0.1", "--t-max", "50"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("6.4"), "{}", text(&o));

    let o = bin().arg("decay-fit").arg(&out).args(["--norm", "B1_2_1", "--t-min", "0.05", "--t-max", "1"]).output().unwrap();
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("PASS"));

    // Same data judged against a deliberately wrong tolerance override.
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&report).unwrap();
    v["config"]["fit"]["tolerance"] = serde_json::json!(1e-6);
    std::fs::write(out.join("report.json"), v.to_string()).unwrap();
    let o = bin().arg("decay-fit").arg(&out).args(["--norm", "L2", "--t-min", "0.05", "--t-max", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["lp", "lemmas", "pressure"] {
        let res = dir.path().join(format!("{suite}.json"));
        let o = bin().args(["verify", "--suite", suite, "--out"]).arg(&res).output().unwrap();
        assert!(o.status.success(), "{}", text(&o));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
        assert_eq!(v[0]["pass"], serde_json::json!(true));
        let names: Vec<String> = v[0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
        match suite {
            "lemmas" => assert!(names.iter().filter(|n| n.contains("constant") || n.contains("slow decay")).count() == 2),
            "pressure" => assert!(names.iter().any(|n| n.contains("precondition-rejected"))),
            _ => {}
        }
    }
    let o = bin().args(["verify", "--suite", "nope", "--out"]).arg(dir.path().join("x.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validation_and_runtime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = std::fs::read_to_string(configs().join("smoke.toml")).unwrap();

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, smoke.replace("rho_amplitude", "rho_amp")).unwrap();
    let o = simulate(&bad, &dir.path().join("r1"));
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("rho_amp"), "{}", text(&o));

    let unstable = dir.path().join("unstable.toml");
    std::fs::write(&unstable, smoke.replace("dt = 0.25", "dt = 2.0")).unwrap();
    assert_eq!(simulate(&unstable, &dir.path().join("r2")).status.code(), Some(1));

    // One pressure iteration cannot reach the tolerance for a 0.4 density contrast.
    let starved = dir.path().join("starved.toml");
    std::fs::write(
        &starved,
        smoke.replace("rho_amplitude = 0.05", "rho_amplitude = 0.4").replace("t_end = 1.0", "t_end = 1.0\npressure_max_iter = 1"),
    )
    .unwrap();
    let o = simulate(&starved, &dir.path().join("r3"));
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));

    let o = bin().env("NSDECAY_THREADS", "zero").args(["verify", "--suite", "lp"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_runs_each_combination() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("sweep")
        .arg(configs().join("smoke.toml"))
        .args(["--sigma", "1,2", "--seed", "7,8", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4, "{}", text(&o));
    for i in 0..4 {
        assert!(dir.path().join(format!("run_{i:03}")).join("norms.csv").is_file());
    }
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", text(&o));
}

#[test]
fn shipped_configs_validate() {
    let mut paths = vec![];
    for dir in [configs(), configs().join("acceptance")] {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "toml") {
                paths.push(p);
            }
        }
    }
    assert!(paths.len() >= 10);
    for p in paths {
        let cfg: nsdecay_core::decay::ExperimentConfig = toml::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
