use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mwkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwkit")).args(args).env_remove("MWKIT_TOL_SCALE").output().expect("spawn mwkit")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, value.to_string()).unwrap();
    path
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn generator(p: f64, l: f64, q: f64, m: i64) -> Value {
    json!({"n": 1, "P": [[p]], "L": [[l]], "Q": [[q]], "m": m})
}

fn g0() -> Value {
    json!({"n": 1, "gamma_re": [[0.0]], "gamma_im": [[1.0]], "center": [0.0], "momentum": [0.0], "amp_re": 1.0, "amp_im": 0.0})
}

fn amp(v: &Value) -> (f64, f64) {
    (v["amp_re"].as_f64().unwrap(), v["amp_im"].as_f64().unwrap())
}

#[test]
fn maslov_fixtures() {
    let dir = TempDir::new().unwrap();
    let out = mwkit(&["maslov", "--input", s(&write(&dir, "a.json", &generator(0.0, 1.0, 0.0, 0)))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"m": 0, "inert": 1, "nu": 3}));

    let out = mwkit(&["maslov", "--input", s(&write(&dir, "b.json", &generator(0.0, 1.0, 0.0, 2)))]);
    assert_eq!(stdout_json(&out), json!({"m": 2, "inert": 1, "nu": 1}));

    let out = mwkit(&["maslov", "--input", s(&write(&dir, "c.json", &generator(1.0, 1.0, 1.0, 0)))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("det(P+Q−L−Lᵀ)=0"));
}

#[test]
fn malformed_and_missing_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(mwkit(&["maslov", "--input", s(&bad)]).status.code(), Some(2));
    assert_eq!(mwkit(&["maslov", "--input", s(&dir.path().join("missing.json"))]).status.code(), Some(2));
    let shape = write(&dir, "shape.json", &json!({"n": 1, "rows": [[1.0, 0.0]]}));
    assert_eq!(mwkit(&["cayley", "--input", s(&shape)]).status.code(), Some(2));
    assert_eq!(mwkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cayley_of_j() {
    let dir = TempDir::new().unwrap();
    let j = write(&dir, "j.json", &json!({"n": 1, "rows": [[0.0, 1.0], [-1.0, 0.0]]}));
    let out = mwkit(&["cayley", "--input", s(&j)]);
    assert_eq!(out.status.code(), Some(0));
    let rows = &stdout_json(&out)["rows"];
    for (i, expect) in [[0.5, 0.0], [0.0, 0.5]].iter().enumerate() {
        for (k, e) in expect.iter().enumerate() {
            assert!((rows[i][k].as_f64().unwrap() - e).abs() < 1e-12);
        }
    }
    let id = write(&dir, "i.json", &json!({"n": 1, "rows": [[1.0, 0.0], [0.0, 1.0]]}));
    let out = mwkit(&["cayley", "--input", s(&id)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("det(S−I)"));
}

#[test]
fn decompose_fixtures() {
    let dir = TempDir::new().unwrap();
    for (name, rows) in [("identity", json!([[1.0, 0.0], [0.0, 1.0]])), ("shear", json!([[1.0, 1.0], [0.0, 1.0]]))] {
        let input = write(&dir, &format!("{name}.json"), &json!({"n": 1, "rows": rows}));
        let out_path = dir.path().join(format!("{name}_out.json"));
        let out = mwkit(&["decompose", "--input", s(&input), "--out", s(&out_path), "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v = read(&out_path);
        assert!(v["residual"].as_f64().unwrap() <= 1e-8);
        for key in ["first", "second", "lambda", "first_index", "second_index"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
    let not_symplectic = write(&dir, "bad.json", &json!({"n": 1, "rows": [[2.0, 0.0], [0.0, 2.0]]}));
    let out = mwkit(&["decompose", "--input", s(&not_symplectic), "--out", s(&dir.path().join("x.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn apply_fixtures() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "g0.json", &g0());
    let out_path = dir.path().join("out.json");
    let apply = |op: &str, params: &Path| mwkit(&["apply", "--op", op, "--params", s(params), "--state", s(&state), "--out", s(&out_path)]);

    // R(−I) with ν = 0 is the parity operator, and g0 is even
    let minus_i = write(&dir, "mi.json", &json!({"S": {"n": 1, "rows": [[-1.0, 0.0], [0.0, -1.0]]}, "nu": 0}));
    assert_eq!(apply("mw", &minus_i).status.code(), Some(0));
    let v = read(&out_path);
    let (re, im) = amp(&v);
    assert!((re - 1.0).abs() < 1e-10 && im.abs() < 1e-10, "{v}");
    assert!((v["gamma_im"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-10);

    let zero = write(&dir, "z.json", &json!({"z0": [0.0, 0.0]}));
    assert_eq!(apply("hw", &zero).status.code(), Some(0));
    assert_eq!(read(&out_path), g0());

    let fourier = write(&dir, "f.json", &generator(0.0, 1.0, 0.0, 0));
    assert_eq!(apply("swm", &fourier).status.code(), Some(0));
    let (re, im) = amp(&read(&out_path));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((re - h).abs() < 1e-10 && (im + h).abs() < 1e-10, "{re} {im}");

    let identity = write(&dir, "id.json", &json!({"S": {"n": 1, "rows": [[1.0, 0.0], [0.0, 1.0]]}, "nu": 0}));
    let out = apply("mw", &identity);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue one"));

    let wrong_dim = write(&dir, "w.json", &json!({"z0": [0.0]}));
    assert_eq!(apply("hw", &wrong_dim).status.code(), Some(2));
}

#[test]
fn apply_on_grid_matches_gaussian_path() {
    let dir = TempDir::new().unwrap();
    let points = 256;
    let x = 12.0;
    let h = 2.0 * x / points as f64;
    let nodes: Vec<f64> = (0..points).map(|k| -x + h * k as f64).collect();
    let re: Vec<f64> = nodes.iter().map(|t| (-0.5 * t * t).exp()).collect();
    let grid = json!({"spec": {"n": 1, "X": x, "N": points}, "re": re, "im": vec![0.0; points]});
    let state = write(&dir, "grid.json", &grid);
    let out_path = dir.path().join("out.json");
    // J with ν = 3 is the Fourier transform (0, 1, 0, 0)
    let params = write(&dir, "j.json", &json!({"S": {"n": 1, "rows": [[0.0, 1.0], [-1.0, 0.0]]}, "nu": 3}));
    let out = mwkit(&["apply", "--op", "mw", "--params", s(&params), "--state", s(&state), "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read(&out_path);
    let c = std::f64::consts::FRAC_1_SQRT_2;
    for (k, t) in nodes.iter().enumerate() {
        let g = (-0.5 * t * t).exp();
        let (r, i) = (v["re"][k].as_f64().unwrap(), v["im"][k].as_f64().unwrap());
        assert!((r - c * g).abs() < 1e-8 && (i + c * g).abs() < 1e-8, "node {k}: {r} {i}");
    }
}

#[test]
fn verify_writes_reproducible_report() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = mwkit(&["verify", "--seed", "42", "--dims", "1", "--report", s(&a)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(mwkit(&["verify", "--seed", "42", "--dims", "1", "--report", s(&b)]).status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let report = read(&a);
    assert_eq!(report["overall"], json!(true));
    assert_eq!(report["seed"], json!(42));
    let cases = report["cases"].as_array().unwrap();
    assert!(cases.len() > 20);
    for c in cases {
        let passed = c["max_error"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap();
        assert_eq!(c["passed"].as_bool().unwrap(), passed);
    }

    let unwritable = dir.path().join("no_such_dir").join("r.json");
    assert_eq!(mwkit(&["verify", "--dims", "1", "--report", s(&unwritable)]).status.code(), Some(2));
    assert_eq!(mwkit(&["verify", "--dims", "4", "--report", s(&b)]).status.code(), Some(2));
}

#[test]
fn tolerance_scale_is_honoured() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let run = |scale: &str| {
        Command::new(env!("CARGO_BIN_EXE_mwkit"))
            .args(["verify", "--dims", "1", "--report", s(&report)])
            .env("MWKIT_TOL_SCALE", scale)
            .output()
            .unwrap()
    };
    assert_eq!(run("2.0").status.code(), Some(0));
    let cases = read(&report)["cases"].as_array().unwrap().clone();
    let fresnel = cases.iter().find(|c| c["property_id"] == "engine.fresnel").unwrap();
    assert!((fresnel["tolerance"].as_f64().unwrap() - 2e-6).abs() < 1e-18);
    assert_eq!(run("banana").status.code(), Some(2));
}
