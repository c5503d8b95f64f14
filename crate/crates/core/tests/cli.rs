mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use common::*;
use nalgebra::{DMatrix, DVector};
use roughcc::io::{parse_table, GroupElemDoc, RoughPathDoc};
use roughcc::paths::{evolve, Control, GeodesicParams, PLPath};
use roughcc::GroupElem;
use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn roughcc(dir: &Path, args: &[&str]) -> Out {
    roughcc_env(dir, args, &[])
}

fn roughcc_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_roughcc"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn group(text: &str) -> GroupElem {
    serde_json::from_str::<GroupElemDoc>(text).unwrap().to_group().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn table(text: &str) -> Vec<Vec<f64>> {
    parse_table(text, Path::new("stdout")).unwrap().1
}

fn csv_path(points: &[DVector<f64>]) -> String {
    roughcc::io::pl_csv(&PLPath::uniform(points.to_vec()).unwrap())
}

#[test]
fn sig_of_line_and_square() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "line.csv", "t,x1,x2,x3\n0,1,1,1\n2,3,0,1.5\n");
    let o = roughcc(dir.path(), &["sig", "line.csv"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let g = group(&o.stdout);
    assert_eq!(g.vector().as_slice(), &[2.0, -1.0, 0.5]);
    assert_eq!(g.area().amax(), 0.0);

    let square: Vec<DVector<f64>> = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]
        .iter()
        .map(|p| DVector::from_column_slice(p))
        .collect();
    write(dir.path(), "square.csv", &csv_path(&square));
    let g = group(&roughcc(dir.path(), &["sig", "square.csv"]).stdout);
    let (a, area) = shoelace(&square);
    assert!(max_diff(&g, &a, &area) < 1e-15);
    assert_eq!(g.area()[(0, 1)], 1.0);
}

#[test]
fn sig_concatenates_files() {
    let dir = TempDir::new().unwrap();
    let mut r = rng(5);
    let p = random_pl(&mut r, 3, 6);
    let q = random_pl(&mut r, 3, 4);
    write(dir.path(), "p.csv", &roughcc::io::pl_csv(&p));
    write(dir.path(), "q.csv", &roughcc::io::pl_csv(&q));
    let g = group(&roughcc(dir.path(), &["sig", "p.csv", "q.csv"]).stdout);
    let sp = group(&roughcc(dir.path(), &["sig", "p.csv"]).stdout);
    let sq = group(&roughcc(dir.path(), &["sig", "q.csv"]).stdout);
    let (a, area) = product(&sp, &sq);
    assert!(max_diff(&g, &a, &area) < 1e-12);
}

#[test]
fn sig_errors() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.csv", "t,x1\n0,0\n0.5,1\n1,oops\n");
    let o = roughcc(dir.path(), &["sig", "bad.csv"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 4"), "{}", o.stderr);
    let o = roughcc(dir.path(), &["sig", "missing.csv"]);
    assert_eq!(o.code, 3);
    assert_eq!(roughcc(dir.path(), &["sig"]).code, 2);
    assert_eq!(roughcc(dir.path(), &["nonsense"]).code, 2);
}

#[test]
fn check_accepts_generated_and_refuses_injected_defect() {
    let dir = TempDir::new().unwrap();
    let o = roughcc(dir.path(), &["synth", "--kind", "random-wg", "--dim", "3", "--seed", "4", "--steps", "32", "--out", "x.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = roughcc(dir.path(), &["check", "x.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(json(&o.stdout)["defect"].as_f64().unwrap() < 1e-12);

    let mut doc: RoughPathDoc = serde_json::from_str(&std::fs::read_to_string(dir.path().join("x.json")).unwrap()).unwrap();
    for s in doc.samples.iter_mut().skip(10) {
        s.area[1][1] += 0.1;
    }
    write(dir.path(), "bad.json", &roughcc::io::to_json(&doc));
    let o = roughcc(dir.path(), &["check", "bad.json"]);
    assert_eq!(o.code, 1);
    let defect = json(&o.stdout)["defect"].as_f64().unwrap();
    assert!((defect - 0.1).abs() < 1e-12, "{defect}");
    assert!(o.stderr.contains("defect"));

    write(dir.path(), "partial.json", r#"{"alpha":0.5,"times":[0,1]}"#);
    assert_eq!(roughcc(dir.path(), &["check", "partial.json"]).code, 2);
}

#[test]
fn dist_reports_bounds() {
    let dir = TempDir::new().unwrap();
    let sigma = 0.7;
    write(dir.path(), "v.json", &format!(r#"{{"dim":3,"a":[0,0,0],"A":[[0,{sigma},0],[-{sigma},0,0],[0,0,0]]}}"#));
    let v = json(&roughcc(dir.path(), &["dist", "v.json"]).stdout);
    let expected = 2.0 * (PI * sigma).sqrt();
    assert!((v["connect_length"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!((v["lower"].as_f64().unwrap() - expected / 2.0).abs() < 1e-12);

    write(dir.path(), "e.json", r#"{"dim":2,"a":[1,0],"A":[[0,0],[0,0]]}"#);
    let v = json(&roughcc(dir.path(), &["dist", "e.json"]).stdout);
    assert_eq!(v["triple_norm"].as_f64().unwrap(), 1.0);
    assert_eq!(v["connect_length"].as_f64().unwrap(), 1.0);

    let mut r = rng(8);
    for _ in 0..5 {
        let g = random_group(&mut r, 5);
        write(dir.path(), "g.json", &roughcc::io::to_json(&GroupElemDoc::from(&g)));
        let o = roughcc(dir.path(), &["dist", "g.json", "--p", "inf"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json(&o.stdout);
        let (lo, len, up) = (
            v["lower"].as_f64().unwrap(),
            v["connect_length"].as_f64().unwrap(),
            v["upper"].as_f64().unwrap(),
        );
        assert!(lo <= len + 1e-12 && len <= up + 1e-12);
        assert_eq!(v["p"], Value::String("inf".into()));
        assert!((v["schatten_1"].as_f64().unwrap() - schatten_oracle(g.area(), 1.0)).abs() < 1e-12);
    }
}

#[test]
fn geodesic_endpoint_and_connect() {
    let dir = TempDir::new().unwrap();
    let mut lam = DMatrix::zeros(2, 2);
    lam[(0, 1)] = 2.0 * PI;
    lam[(1, 0)] = -2.0 * PI;
    let gp = GeodesicParams::new(&DVector::from_vec(vec![0.6, 0.8]), &lam).unwrap();
    write(dir.path(), "gp.json", &serde_json::to_string(&gp).unwrap());
    let o = roughcc(dir.path(), &["geodesic", "gp.json", "--out", "path.csv", "--samples", "64"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let g = group(&o.stdout);
    assert!((g.area()[(0, 1)] + 1.0 / (4.0 * PI)).abs() < 1e-12);
    let rows = table(&std::fs::read_to_string(dir.path().join("path.csv")).unwrap());
    assert_eq!(rows.len(), 65);

    let mut r = rng(12);
    let target = random_group(&mut r, 4);
    write(dir.path(), "g.json", &roughcc::io::to_json(&GroupElemDoc::from(&target)));
    let o = roughcc(dir.path(), &["geodesic", "g.json", "--out", "poly.csv", "--polygon-k", "16"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let c: Control = serde_json::from_str(&o.stdout).unwrap();
    assert!(evolve(&c).max_abs_diff(&target) < 1e-9);
    let poly = roughcc::io::read_pl_csv(&dir.path().join("poly.csv")).unwrap();
    assert!(roughcc::paths::pl_signature(&poly).max_abs_diff(&target) < 1e-9);
}

#[test]
fn approx_on_lift_pure_area_and_bad_beta() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "lift.json", r#"{"kind":"LIFT","points":[[0,0],[1,2],[-1,0.5]]}"#);
    let o = roughcc(dir.path(), &["synth", "--spec", "lift.json", "--steps", "64", "--out", "l.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = roughcc(dir.path(), &["approx", "l.json", "--beta", "0.4", "--meshes", "0.5,0.25,0.125"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("mesh,param,d_beta,sup_d,seconds\n"));
    for row in table(&o.stdout) {
        assert!(row[2] < 1e-6 && row[4] == 0.0, "{row:?}");
    }

    let o = roughcc(dir.path(), &["synth", "--kind", "pure-area", "--steps", "128", "--out", "pa.json"]);
    assert_eq!(o.code, 0);
    let o = roughcc(dir.path(), &["approx", "pa.json", "--beta", "0.35", "--meshes", "0.25,0.125,0.0625,0.03125", "--out", "study"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = table(&std::fs::read_to_string(dir.path().join("study/report.csv")).unwrap());
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
    for i in 0..4 {
        let p = roughcc::io::read_pl_csv(&dir.path().join(format!("study/approx_{i}.csv"))).unwrap();
        assert_eq!(p.start_time(), 0.0);
        assert_eq!(p.end_time(), 1.0);
    }

    assert_eq!(roughcc(dir.path(), &["approx", "pa.json", "--beta", "0.5"]).code, 2);
    assert_eq!(roughcc(dir.path(), &["approx", "pa.json"]).code, 2);
    assert_eq!(roughcc(dir.path(), &["approx", "pa.json", "--beta", "0.4", "--meshes", "0.1,0.2"]).code, 2);
}

#[test]
fn project_rows_stay_below_bound() {
    let dir = TempDir::new().unwrap();
    let o = roughcc(dir.path(), &["synth", "--kind", "random-wg", "--dim", "12", "--seed", "3", "--steps", "64", "--out", "x.json"]);
    assert_eq!(o.code, 0);
    let o = roughcc(dir.path(), &["project", "x.json", "--ranks", "1,3", "--meshes", "0.5,0.25"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = table(&o.stdout);
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!(r[6] <= r[5] + 1e-12, "{r:?}");
    }
}

const SINE: &str = r#"{"family":"SINE","fields":[{"v":[1,0],"w":[0,1],"phase":0.3},{"v":[0,1],"w":[1,0.5]}]}"#;
const DIAG: &str = r#"{"family":"LINEAR","matrices":[[[0.5,0],[0,-0.3]],[[-0.2,0],[0,0.7]]]}"#;

#[test]
fn wz_tables() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "sine.json",
        &format!(r#"{{"driver":{{"kind":"PURE_AREA","sigmas":[1.0]}},"steps":128,"basis":{SINE},"lattice_radius":0.4}}"#),
    );
    let o = roughcc(dir.path(), &["wz", "sine.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("mesh,y0_index,sup_err\n"));
    let rows = table(&o.stdout);
    assert_eq!(rows.len(), 5 * 9);
    for j in 0..9 {
        let col: Vec<f64> = rows.iter().filter(|r| r[1] == j as f64).map(|r| r[2]).collect();
        assert!(col.windows(2).all(|w| w[1] < w[0]), "{col:?}");
    }

    let o = roughcc(dir.path(), &["synth", "--kind", "random-wg", "--dim", "2", "--seed", "1", "--steps", "128", "--out", "drv.json"]);
    assert_eq!(o.code, 0);
    write(dir.path(), "diag.json", &format!(r#"{{"driver":{{"file":"drv.json"}},"basis":{DIAG},"y0":[[1,1],[-0.5,2]]}}"#));
    let o = roughcc(dir.path(), &["wz", "diag.json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = table(&o.stdout);
    for j in 0..2 {
        let col: Vec<f64> = rows.iter().filter(|r| r[1] == j as f64).map(|r| r[2]).collect();
        let spread = col.iter().cloned().fold(f64::MIN, f64::max) - col.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8, "{col:?}");
    }

    let big = r#"{"family":"CONSTANT","vectors":[[1,0,0,0],[0,1,0,0]]}"#;
    write(dir.path(), "big.json", &format!(r#"{{"driver":{{"kind":"PURE_AREA","sigmas":[1.0]}},"basis":{big}}}"#));
    let o = roughcc(dir.path(), &["wz", "big.json"]);
    assert_eq!(o.code, 2);
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let args = ["synth", "--kind", "random-wg", "--dim", "5", "--seed", "77", "--steps", "40", "--p", "inf"];
    let a = roughcc(dir.path(), &args).stdout;
    let b = roughcc_env(dir.path(), &args, &[("ROUGHCC_THREADS", "1")]).stdout;
    assert_eq!(a, b);
    let doc: RoughPathDoc = serde_json::from_str(&a).unwrap();
    assert_eq!(roughcc::io::to_json(&doc), a);
    let x = doc.to_rough(1e-8).unwrap();
    assert_eq!(x.norms().p(), f64::INFINITY);
    assert_eq!(roughcc::io::to_json(&RoughPathDoc::from(&x)), a);

    write(dir.path(), "x.json", &a);
    let r1 = roughcc(dir.path(), &["approx", "x.json", "--beta", "0.4", "--meshes", "0.5,0.25"]).stdout;
    let r2 = roughcc(dir.path(), &["approx", "x.json", "--beta", "0.4", "--meshes", "0.5,0.25"]).stdout;
    assert_eq!(r1, r2);

    let o = roughcc_env(dir.path(), &args, &[("ROUGHCC_THREADS", "zero")]);
    assert_eq!(o.code, 2);
    assert_eq!(roughcc(dir.path(), &["synth", "--kind", "random-wg", "--dim", "3"]).code, 2);
}
