use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ulef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ulef")).args(args).output().expect("ulef runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn validate_exit_codes() {
    let ok = ulef(&["validate", &data("tetrahedron.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["euler_characteristic"], 2);

    let bad = ulef(&["validate", &data("tetrahedron_bad_orientation.json")]);
    assert_eq!(bad.status.code(), Some(1));
    let r = report(&bad);
    assert_eq!(r["valid"], false);
    assert!(r["violations"].as_array().unwrap().iter().any(|v| v["condition"] == "orientation"));

    let missing = ulef(&["validate", &data("tetrahedron_missing_face.json")]);
    assert_eq!(missing.status.code(), Some(1));
    let text = String::from_utf8_lossy(&missing.stdout);
    assert!(text.contains("simplicial-complex condition"), "{text}");

    assert_eq!(ulef(&["validate", "torus7"]).status.code(), Some(0));
}

#[test]
fn sin_model_report() {
    let out = ulef(&["map-analyze", &data("sin_map.json"), "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    // 4 points in each of the 5 translates of ball(1)
    assert_eq!(r["fixed_points"]["count"], 20);
    assert_eq!(r["tameness"]["verdict"], "strongly-tame");
    assert_eq!(r["certificate"]["verdict"], "zero-by-boundary");
    assert_eq!(r["certificate"]["payload"]["chain"], Value::Array(vec![]));
    assert_eq!(r["certificate"]["verifier_result"]["ok"], true);
    assert_eq!(r["oracle"]["equal"], true);
}

#[test]
fn index_data_reports() {
    let r = report(&ulef(&["map-analyze", &data("connected_sum.json")]));
    assert_eq!(r["certificate"]["verdict"], "nonzero-by-mean");
    assert_eq!(r["certificate"]["payload"]["limit"], "2");
    assert_eq!(r["source"], "externally supplied index data");
    assert!(r["narrative"].as_str().unwrap().contains("infinitely many fixed points"));

    let r = report(&ulef(&["map-analyze", &data("free_constant5.json")]));
    assert_eq!(r["certificate"]["verdict"], "zero-by-truncated-flow");
    let n = r["narrative"].as_str().unwrap();
    assert!(n.contains("nonamenable") && n.contains("not a proof"), "{n}");
}

#[test]
fn field_reports() {
    for (file, chi) in [
        ("sin_field.json", 0),
        ("sin_field_negated.json", 0),
        ("sphere_field.json", 2),
        ("sphere_field_negated.json", 2),
        ("genus2_field_data.json", -2),
    ] {
        let out = ulef(&["field-analyze", &data(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let ph = &report(&out)["poincare_hopf"];
        assert_eq!(ph["euler_characteristic"], chi, "{file}");
        assert_eq!(ph["consistent"], true, "{file}");
    }
}

#[test]
fn refusals_and_errors() {
    let out = ulef(&["map-analyze", &data("octahedron_identity.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["refused"]["error"], "not-tame");

    let out = ulef(&["map-analyze", &data("sin_map.json"), "--subdivide", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "input");

    let out = ulef(&["amenability", "Z^2", "--radius", "200"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn amenability_tables() {
    let r = report(&ulef(&["amenability", "Z^2", "--radius", "3"]));
    let ratios: Vec<&str> = r["folner"]["rows"].as_array().unwrap().iter().map(|x| x["ratio"].as_str().unwrap()).collect();
    assert_eq!(&ratios[1..4], ["20/9", "36/25", "52/49"]);

    let r = report(&ulef(&["amenability", "F_2"]));
    assert!(r["folner"]["unsupported"].is_string());
    assert!(r["flow"]["rows"].as_array().unwrap().iter().all(|x| x["min_capacity"] == 1));

    let r = report(&ulef(&["amenability", "cyclic:3"]));
    assert_eq!(r["folner"]["rows"][0]["ratio"], "0");
}

#[test]
fn outputs_and_plots_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_string_lossy().into_owned();
    let run = || {
        let out = ulef(&["map-analyze", &data("connected_sum.json"), "--out", &d, "--plots"]);
        assert_eq!(out.status.code(), Some(0));
        let files: Vec<(String, Vec<u8>)> = {
            let mut v: Vec<_> = std::fs::read_dir(dir.path())
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect();
            v.sort();
            v
        };
        (out.stdout, files)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    let names: Vec<&str> = a.1.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        ["map-analyze-coset-sums.svg", "map-analyze-folner-averages.svg", "map-analyze.json"]
    );
    assert_eq!(a.1[2].1, a.0);
}

#[test]
fn decide_class_and_selftest() {
    let out = ulef(&["decide-class", &data("class_z2.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["certificate"]["verdict"], "zero-by-boundary");

    let out = ulef(&["selftest", "--seed", "3", "--instances", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["passed"], true);
}
