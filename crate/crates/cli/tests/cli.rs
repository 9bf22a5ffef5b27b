use std::process::{Command, Output};

fn qgreen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgreen"))
        .args(args)
        .env_remove("QGREEN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn model_info_n4() {
    let o = qgreen(&["model-info", "--n", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["meta"]["p10"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(v["meta"]["group_order"], 8);
    assert_eq!(v["data"].as_array().unwrap().len(), 8);
    let x1 = v["meta"]["x1"].as_f64().unwrap();
    let x4 = v["meta"]["x4"].as_f64().unwrap();
    assert!((x1 * x4 - 1.0).abs() < 1e-12);
}

#[test]
fn bad_order_is_usage_error() {
    assert_eq!(qgreen(&["model-info", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qgreen(&["harmonic", "--n", "-3"]).status.code(), Some(2));
    assert_eq!(qgreen(&["model-info"]).status.code(), Some(2));
}

#[test]
fn harmonic_table() {
    let o = qgreen(&["harmonic", "--n", "4", "--imax", "3", "--jmax", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let cell = v["data"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["i"] == 1 && r["j"] == 1)
        .unwrap();
    assert!((cell["value"].as_f64().unwrap() - 512.0).abs() < 1e-9);
    assert!(v["meta"]["residual"].as_f64().unwrap() < 1e-9);

    let six = stdout(&qgreen(&["harmonic", "--n", "6", "--imax", "2", "--jmax", "2", "--format", "csv"]));
    assert!(six.starts_with("i,j,value,closed_form\n"));
    let five = stdout(&qgreen(&["harmonic", "--n", "5", "--imax", "2", "--jmax", "2", "--format", "csv"]));
    assert!(five.starts_with("i,j,value\n"));
    for line in six.lines().skip(1) {
        let f: Vec<f64> = line.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
        assert!((f[0] - f[1]).abs() <= 1e-9 * f[1].abs().max(1.0), "{line}");
    }
}

#[test]
fn green_all_methods_agree() {
    let o = qgreen(&["green", "--n", "4", "--from", "1", "1", "--at", "8", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let data = v["data"].as_array().unwrap();
    assert_eq!(data.len(), 3);
    let contour = data.iter().find(|e| e["method"] == "contour").unwrap();
    assert!((contour["value"].as_f64().unwrap() - 2.8393320930201744e-4).abs() < 1e-15);
    let d = v["meta"]["deltas"].as_array().unwrap();
    let oc = d.iter().find(|d| d["pair"] == "oracle/contour").unwrap();
    assert!(oc["relative"].as_f64().unwrap() < 1e-6);
}

#[test]
fn green_rejects_boundary_target() {
    assert_eq!(qgreen(&["green", "--n", "4", "--from", "1", "1", "--at", "0", "5"]).status.code(), Some(2));
    assert_eq!(qgreen(&["green", "--n", "4", "--from", "0", "1", "--at", "3", "3"]).status.code(), Some(2));
    let o = qgreen(&["green", "--n", "4", "--from", "1", "1", "--at", "9", "0", "--method", "asymptotic"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn converge_rejects_bad_direction() {
    let o = qgreen(&["converge", "--n", "4", "--gamma", "2.0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qgreen(&["converge", "--n", "4", "--gamma", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_axis_report() {
    let o = qgreen(&["converge", "--n", "4", "--axis", "y", "--scales", "4,8,16,32", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("i,j,value,error,formula,ratio,usable,scale\n"));
    assert_eq!(s.lines().count(), 5);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, threads) in [(&a, "1"), (&b, "3")] {
        let o = Command::new(env!("CARGO_BIN_EXE_qgreen"))
            .args(["green", "--n", "5", "--from", "2", "1", "--at", "6", "4", "--format", "json", "--output"])
            .arg(p)
            .env("QGREEN_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
