use co1as::cli::run;
use co1as::report::{reserialize, CanonicalReport, DimsReport, PointReport};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("co1as").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_horospheres_json() {
    let (code, out, _) = call(&["verify", "horospheres", "--n", "3", "--points", "50", "--tol", "1e-6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let offsets: Vec<usize> = ["command", "example", "n", "tolerance", "points", "pass"]
        .iter()
        .map(|k| out.find(&format!("\n  \"{k}\":")).unwrap())
        .collect();
    assert!(offsets.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v.as_object().unwrap().len(), 6);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 50);
    for p in points {
        let r = p["residuals"].as_object().unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.values().all(|x| x.as_f64().unwrap() < 1e-6));
    }
    assert_eq!(reserialize::<PointReport>(&out).unwrap(), out);
}

#[test]
fn dims_totals() {
    let (code, out, _) = call(&["dims", "--n", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let r: DimsReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.total, 30);
    assert_eq!(reserialize::<DimsReport>(&out).unwrap(), out);
    let (code, text, _) = call(&["dims", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(text.contains("total 12"));
}

#[test]
fn classify_linear_type_at_a_point() {
    let (code, out, _) = call(&["classify", "linear_type_hyperbolic", "--n", "2", "--point", "0.2,0.3,0.1", "--format", "json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let classes = v["points"][0]["classification"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["id"], "II1");
    assert!((classes[0]["param"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((classes[0]["norm"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn decompose_lists_all_components() {
    let (code, out, _) = call(&["decompose", "concentric_spheres", "--n", "3", "--points", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["points"][0]["classification"].as_array().unwrap().len(), 10);
    assert!(v["points"][0]["residuals"].is_null());
    assert_eq!(reserialize::<PointReport>(&out).unwrap(), out);
}

#[test]
fn canonical_reports() {
    let (code, out, _) = call(&["canonical", "concentric_spheres", "--n", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let r: CanonicalReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.samples.len(), 10);
    assert_eq!(reserialize::<CanonicalReport>(&out).unwrap(), out);
    // the linear-type structure is not the canonical one
    let (code, _, _) = call(&["canonical", "linear_type_hyperbolic", "--n", "2"]);
    assert_eq!(code, 1);
    let (code, _, err) = call(&["canonical", "warped_generic"]);
    assert_eq!(code, 2);
    assert!(err.contains("Killing"));
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = ["verify", "concentric_spheres", "--n", "2", "--points", "8", "--seed", "42", "--format", "json"];
    let (_, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(a, b);
    let (_, c, _) = call(&["verify", "concentric_spheres", "--n", "2", "--points", "8", "--seed", "43", "--format", "json"]);
    assert_ne!(a, c);
}

#[test]
fn failing_check_exits_one() {
    // pure differences on the sphere example cannot reach 1e-9
    let (code, out, _) = call(&["verify", "concentric_spheres", "--n", "2", "--points", "3", "--fd-only", "--tol", "1e-9"]);
    assert_eq!(code, 1);
    assert!(out.trim_end().ends_with("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "nowhere"],
        vec!["frobnicate"],
        vec!["verify", "horospheres", "--tol", "-1"],
        vec!["verify", "horospheres", "--points", "0"],
        vec!["verify", "horospheres", "--n", "2", "--point", "1,2"],
        vec!["verify", "horospheres", "--n", "2", "--point", "9,0,0"],
        vec!["verify", "horospheres", "--warp", "cosh"],
        vec!["verify", "warped_generic", "--warp", "sinh"],
        vec!["verify", "concentric_spheres", "--r-min", "1"],
        vec!["dims", "--n", "1"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn writes_to_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = call(&["verify", "parallel_hyperplanes", "--points", "3", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(reserialize::<PointReport>(&written).unwrap(), written);
}

#[test]
fn warped_generic_options() {
    let (code, out, _) = call(&["classify", "warped_generic", "--n", "2", "--warp", "exp:0.5", "--fiber", "sphere", "--points", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("II1") && out.contains("Z1"));
}
