use std::process::Command;

fn pathline(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pathline")).args(args).output().unwrap()
}

#[test]
fn trace_s1_emits_one_event_row() {
    let out = pathline(&["trace", "--scene", "builtin:S1", "--x0", "0,-1", "--t0", "0", "--t-end", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.ends_with(",1")).collect();
    assert_eq!(rows.len(), 1);
    let t: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 1.25).abs() < 1e-8);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[1], "2");
    assert!((last[3].parse::<f64>().unwrap() - 0.7).abs() < 1e-8);
}

#[test]
fn validate_s1_passes() {
    let out = pathline(&["validate", "--scene", "builtin:S1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: PASS"));
}

#[test]
fn missing_scene_is_a_usage_error() {
    let out = pathline(&["trace", "--x0", "0,-1", "--t0", "0", "--t-end", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn defect_scene_is_refused_unless_forced() {
    let args = ["trace", "--scene", "builtin:S4-transversality", "--x0", "0,-1", "--t0", "0", "--t-end", "3"];
    assert_eq!(pathline(&args).status.code(), Some(1));
    let mut forced = args.to_vec();
    forced.push("--no-validate");
    let out = pathline(&forced);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TransversalityViolation"));
}

#[test]
fn parse_errors_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scene");
    let src = pathline::scenes::builtin_source("S1").unwrap().replace("phi = x2 - 0.2*t", "phi = x2 - * t");
    std::fs::write(&path, src).unwrap();
    let out = pathline(&["validate", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("SyntaxError") && err.contains("line 17"), "{err}");
}

#[test]
fn scene_search_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("mine.scene"), pathline::scenes::builtin_source("S2").unwrap().replace("name = S2", "name = mine")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pathline"))
        .args(["validate", "--scene", "mine", "--format", "json"])
        .env("PATHLINE_SCENE_PATH", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["scene"], "mine");
}

#[test]
fn json_trace_and_surface() {
    let out = pathline(&["trace", "--scene", "S2", "--x0", "0.5,0.1", "--t0", "0", "--t-end", "3", "--format", "json", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tr = &doc["trajectories"][0];
    assert_eq!(tr["events"].as_array().unwrap().len(), 1);
    assert!(tr["diagnostics"]["max_inclusion_residual"].as_f64().unwrap() < 1e-6);

    let out = pathline(&["surface", "--scene", "S3", "--x0", "1.5,0", "--t0", "0", "--t-end", "1", "--h", "0.01", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",interface,")));
}

#[test]
fn flow_with_jacobian() {
    let out = pathline(&[
        "flow", "--scene", "S2", "--x0", "1,0", "--x0", "0,-1", "--t0", "0", "--t-end", "0.5", "--h", "0.05",
        "--jacobian", "--quadrature", "8", "16", "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "point,t0,t,y1,y2,x1,x2,m11,m12,m21,m22,det");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[5] - 1.1).abs() < 1e-10);
    assert!((row[11] - 1.1).abs() < 1e-6);
}

#[test]
fn verify_writes_a_report_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("phi.csv");
    let out = pathline(&[
        "verify", "--scene", "S1", "--x0", "0,-1", "--t0", "0", "--t-end", "2", "--h", "0.01", "--series",
        series.to_str().unwrap(), "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    let csv = std::fs::read_to_string(series).unwrap();
    assert!(csv.starts_with("t,phi,psi,separation,excluded,envelope"));
    assert!(csv.lines().count() > 100);
}

#[test]
fn scenes_listing_and_show() {
    let out = pathline(&["scenes"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 9 && text.contains("S4-growth"));
    let out = pathline(&["scenes", "--show", "S1"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("[interface]"));
}
