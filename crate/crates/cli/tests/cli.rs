use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsegb")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn roots(v: &Value) -> Vec<Vec<String>> {
    let mut r: Vec<Vec<String>> = serde_json::from_value(v["roots"].clone()).unwrap();
    r.sort();
    r
}

#[test]
fn solve_bilinear() {
    let input = data("bilinear.json");
    let v = json(&["solve", "--input", input.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(v["basis"]["size"], 2);
    assert_eq!(v["multiplication_matrices"].as_array().unwrap().len(), 2);
    assert_eq!(v["lex_gb"]["polynomials"].as_array().unwrap().len(), 2);
    assert_eq!(v["coordinate_change"], Value::Null);
    assert_eq!(roots(&v), vec![vec!["1", "2"], vec!["2", "1"]]);
}

#[test]
fn solve_with_root_at_infinity() {
    let input = data("infinity.json");
    let v = json(&["solve", "--input", input.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(v["coordinate_change"]["seed"].as_u64().map(|s| s >= 7), Some(true));
    assert_eq!(v["basis"]["size"], 2);
    // the second solution sits at infinity of the original chart
    assert_eq!(roots(&v), vec![vec!["2", "6"]]);
}

#[test]
fn sgb_honors_witness() {
    let input = data("unit_square.json");
    let v = json(&["sgb", "--input", input.to_str().unwrap(), "--witness", "3,4"]);
    assert_eq!(v["witness"], serde_json::json!([3, 4]));
    assert_eq!(v["heuristic"], false);
    let max_deg = |g: usize| {
        v["stats"].as_array().unwrap().iter().filter(|s| s["generator"] == g).map(|s| s["degree"].as_u64().unwrap()).max()
    };
    assert_eq!((max_deg(0), max_deg(1)), (Some(3), Some(4)));
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
    assert!(v["stats"].as_array().unwrap().iter().all(|s| s["zero_rows"] == 0));
}

#[test]
fn m3h_bilinear_dimension() {
    let input = data("bilinear.json");
    let v = json(&["m3h", "--input", input.to_str().unwrap()]);
    assert_eq!(v["degree"], serde_json::json!([1, 1]));
    let s = &v["stats"];
    assert_eq!(s["cols"].as_u64().unwrap() - s["rank"].as_u64().unwrap(), 2);
    let v = json(&["m3h", "--input", input.to_str().unwrap(), "--degree", "2,1"]);
    assert_eq!(v["stats"]["rank"], v["stats"]["rows"]);
}

#[test]
fn bench_csv_is_smaller_than_dense() {
    let out = run(&["bench", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("instance,generator,degree,rows,cols,rank,zero_rows,wall_ms,dense_rows,dense_cols,smaller")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().any(|r| r[0] == "unit_square"));
    for r in &rows {
        assert_eq!(r[10], "true", "{r:?}");
        assert_eq!(r[6], "0", "{r:?}");
    }
}

#[test]
fn outputs_are_byte_identical() {
    let square = data("unit_square.json");
    let bilinear = data("bilinear.json");
    let infinity = data("infinity.json");
    let cases: [(&str, &PathBuf, &[&str]); 4] = [
        ("sgb", &square, &["sgb.json", "sgb_stats.csv"]),
        ("m3h", &bilinear, &["m3h.json", "m3h_stats.csv"]),
        ("solve", &bilinear, &["solve.json"]),
        ("solve", &infinity, &["solve.json"]),
    ];
    for (cmd, input, files) in cases {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let out = run(&[cmd, "--input", input.to_str().unwrap(), "--seed", "5", "--output-dir", d.path().to_str().unwrap()]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
        for f in files {
            let a = std::fs::read(dirs[0].path().join(f)).unwrap();
            let b = std::fs::read(dirs[1].path().join(f)).unwrap();
            assert!(!a.is_empty());
            assert_eq!(a, b, "{cmd} {f}");
        }
    }
}

#[test]
fn distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: String| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let square = std::fs::read_to_string(data("unit_square.json")).unwrap();
    let bilinear = std::fs::read_to_string(data("bilinear.json")).unwrap();
    let cases = [
        ("sgb", write("malformed.json", "{ \"field\": ".into()), 10),
        ("sgb", write("not_prime.json", square.replace("65521", "65520")), 11),
        ("sgb", write("coeff.json", square.replace("\"-2\"", "\"two\"")), 12),
        ("sgb", write("outside.json", square.replace("\"point\": [1, 1]", "\"point\": [-1, 1]")), 13),
        ("solve", write("mixed.json", bilinear.replace("[[0, 1], [0, 1]]", "[[0, 1], [2, 0]]")), 14),
    ];
    for (cmd, path, code) in cases {
        let out = run(&[cmd, "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn field_override_and_rationals() {
    let input = data("bilinear.json");
    let v = json(&["solve", "--input", input.to_str().unwrap(), "--field-p", "101"]);
    assert_eq!(v["field"]["p"], 101);
    assert_eq!(roots(&v).len(), 2);
    let text = std::fs::read_to_string(&input).unwrap().replace("{\"type\": \"prime\", \"p\": 65521}", "{\"type\": \"rational\"}");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    std::fs::write(&path, text).unwrap();
    let v = json(&["solve", "--input", path.to_str().unwrap()]);
    assert_eq!(v["basis"]["size"], 2);
    assert_eq!(v["roots"], Value::Null);
    assert!(v["roots_note"].as_str().unwrap().contains("prime field"));
}

#[test]
fn oracle_check_passes() {
    let out = run(&["oracle-check", "--seed", "1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains(": PASS")).count(), 8, "{text}");
}
