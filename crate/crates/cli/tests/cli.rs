use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semifb::gen::{random_graph, GraphShape};
use semifb::graph::GraphDoc;
use serde_json::Value;
use tempfile::TempDir;

fn semifb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semifb"))
        .args(args)
        .output()
        .expect("running semifb")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const DIAMOND: &str = r#"{
  "kind": "graph",
  "nodes": [{"id": 0}, {"id": 1, "op": "add"}, {"id": 2, "op": "add"}, {"id": 3, "op": "add"}],
  "arcs": [
    {"id": 0, "tail": 0, "head": 1}, {"id": 1, "tail": 0, "head": 2},
    {"id": 2, "tail": 1, "head": 3}, {"id": 3, "tail": 2, "head": 3}
  ],
  "xi": {"0": "3"}
}"#;

const ZDD: &str = r#"{
  "kind": "zdd",
  "num_vars": 3,
  "nodes": [
    {"var": 0, "lo": 2, "hi": 1},
    {"var": 1, "lo": 2, "hi": "top"},
    {"var": 2, "lo": "bot", "hi": "top"}
  ],
  "root": 0,
  "weights": [2, 3, 1]
}"#;

const HMM: &str = r#"{
  "kind": "trellis",
  "initial": [0.6, 0.4],
  "transition": [[0.7, 0.3], [0.4, 0.6]],
  "emission": [[0.9, 0.1], [0.2, 0.8]],
  "observations": [0, 1, 0]
}"#;

#[test]
fn diamond_forward() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "diamond.json", DIAMOND);
    let v = json_of(&semifb(&["forward", "--semiring", "real", &f]));
    assert_eq!(v["sink_sum"], 6.0);
    let tsv = semifb(&["forward", &f, "--format", "tsv"]);
    assert!(String::from_utf8(tsv.stdout)
        .unwrap()
        .contains("sink_sum\t6\n"));
}

#[test]
fn zdd_polynomial_and_count() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "zdd.json", ZDD);
    let v = json_of(&semifb(&["free-forward", &f]));
    assert_eq!(v["polynomial"], "x0*x1 + x0*x2 + x2");
    let v = json_of(&semifb(&["forward", &f]));
    assert_eq!(v["sink_sum"], 9.0);
}

#[test]
fn fb_matches_tensor_forward() {
    let dir = TempDir::new().unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for case in 0..10 {
        let g = random_graph(&mut rng, GraphShape::default());
        let mut doc = g.to_doc();
        doc.xi = Some(
            g.sources()
                .iter()
                .map(|v| {
                    let (a, b): (f64, f64) = (rng.gen_range(0.1..1.0), rng.gen_range(-1.0..1.0));
                    (v.0.to_string(), format!("({a};{b})"))
                })
                .collect(),
        );
        let f = write(
            &dir,
            &format!("g{case}.json"),
            &serde_json::to_string(&doc).unwrap(),
        );
        let fb = json_of(&semifb(&["fb", &f, "--checkpoint", "cutsets:2"]));
        let tensor = json_of(&semifb(&["forward", "--semiring", "tensor(real,bc1)", &f]));
        for i in 0..2 {
            let x = fb["combined"][i].as_f64().unwrap();
            let y = tensor["sink_sum"][i].as_f64().unwrap();
            assert!(
                (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0),
                "case {case}: {x} vs {y}"
            );
        }
    }
}

#[test]
fn emitted_graph_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "hmm.json", HMM);
    let emitted = dir.path().join("graph.json");
    let direct = semifb(&["forward", &f, "--emit-graph", emitted.to_str().unwrap()]);
    let text = std::fs::read_to_string(&emitted).unwrap();
    let doc: GraphDoc = serde_json::from_str(&text).unwrap();
    let g = doc.to_graph().unwrap();
    assert_eq!(g.to_doc().to_graph().unwrap(), g);
    let again = semifb(&["forward", emitted.to_str().unwrap()]);
    let (a, b) = (json_of(&direct), json_of(&again));
    assert_eq!(a["sink_sum"], b["sink_sum"]);
    assert_eq!(a["sinks"], b["sinks"]);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "hmm.json", HMM);
    for cmd in ["forward", "free-forward", "fb"] {
        let a = semifb(&[cmd, &f]);
        let b = semifb(&[cmd, &f]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn expectation_routes_agree() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "hmm.json", HMM);
    let n = json_of(&semifb(&["free-forward", &f]))["legend"]
        .as_array()
        .unwrap()
        .len();
    let mut feats = serde_json::Map::new();
    feats.insert("count".into(), Value::from(vec![1.0; n]));
    feats.insert(
        "first".into(),
        Value::from(
            (0..n)
                .map(|i| if i == 0 { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        ),
    );
    let ff = write(&dir, "features.json", &Value::Object(feats).to_string());
    let fb = json_of(&semifb(&["expect", &f, "--features", &ff, "--telemetry"]));
    let np = json_of(&semifb(&[
        "expect",
        &f,
        "--features",
        &ff,
        "--route",
        "npass",
        "--sequential",
    ]));
    for name in ["count", "first"] {
        let x = fb["features"][name]["expectation"].as_f64().unwrap();
        let y = np["features"][name]["expectation"].as_f64().unwrap();
        assert!((x - y).abs() < 1e-12, "{name}: {x} vs {y}");
    }
    // every path has one initial source, two transitions and two emissions
    assert!((fb["features"]["count"]["expectation"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!(fb["telemetry"]["adds"].as_u64().unwrap() > 0);
}

#[test]
fn gradient_of_a_tape() {
    let dir = TempDir::new().unwrap();
    let tape = r#"{
      "kind": "tape",
      "graph": {
        "nodes": [{"id": 0}, {"id": 1}, {"id": 2, "op": "add"}, {"id": 3, "op": "mul"}],
        "arcs": [
          {"id": 0, "tail": 0, "head": 2}, {"id": 1, "tail": 1, "head": 2},
          {"id": 2, "tail": 2, "head": 3}, {"id": 3, "tail": 0, "head": 3}
        ]
      },
      "tags": [{"kind": "var", "input": 0}, {"kind": "var", "input": 1}],
      "point": [2, 3]
    }"#;
    let f = write(&dir, "tape.json", tape);
    let v = json_of(&semifb(&["grad", &f]));
    assert_eq!(v["value"], 10.0);
    assert_eq!(floats(&v["gradient"]), [7.0, 2.0]);
    let v = json_of(&semifb(&[
        "grad", &f, "--mode", "forward", "--point", "-1,0.5",
    ]));
    assert_eq!(floats(&v["gradient"]), [-1.5, -1.0]);
}

#[test]
fn validate_reports_laws() {
    let v = json_of(&semifb(&[
        "validate",
        "--semiring",
        "tensor(real,bc1)",
        "--cases",
        "200",
    ]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["structure_constants"], "pass");
    assert!(v["laws"].as_object().unwrap().len() >= 8);
}

fn code_and_stderr(out: &Output) -> (Option<i32>, String) {
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "bad.json",
        "{\n  \"nodes\": [\n    {\"id\": 0,}\n  ]\n}",
    );
    let (code, err) = code_and_stderr(&semifb(&["forward", &f]));
    assert_eq!(code, Some(2));
    assert!(err.contains("line 3"), "{err}");

    let f = write(
        &dir,
        "field.json",
        r#"{"kind": "trellis", "initial": [1.0]}"#,
    );
    let (code, err) = code_and_stderr(&semifb(&["forward", &f]));
    assert_eq!(code, Some(2));
    assert!(err.contains("transition"), "{err}");

    let f = write(&dir, "diamond.json", DIAMOND);
    let (code, _) = code_and_stderr(&semifb(&["forward", &f, "--semiring", "nope"]));
    assert_eq!(code, Some(2));
    let (code, _) = code_and_stderr(&semifb(&["forward", &f, "--checkpoint", "cutsets:0"]));
    assert_eq!(code, Some(2));
    let (code, _) = code_and_stderr(&semifb(&["forward", "--semiring", "tensor(real,bc1)", &f]));
    assert_eq!(code, Some(2));
}

#[test]
fn engine_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let cyclic = r#"{
      "nodes": [{"id": 0}, {"id": 1, "op": "add"}, {"id": 2, "op": "mul"}],
      "arcs": [
        {"id": 0, "tail": 0, "head": 1}, {"id": 1, "tail": 1, "head": 2}, {"id": 2, "tail": 2, "head": 1}
      ]
    }"#;
    let f = write(&dir, "cyclic.json", cyclic);
    let (code, err) = code_and_stderr(&semifb(&["free-forward", &f]));
    assert_eq!(code, Some(3));
    assert!(err.contains("CycleDetected"), "{err}");

    let loopy = r#"{
      "kind": "factor_graph",
      "variables": [{"name": "a", "domain": 2}, {"name": "b", "domain": 2}],
      "factors": [
        {"name": "f", "scope": [0, 1], "table": [1, 2, 3, 4]},
        {"name": "g", "scope": [0, 1], "table": [1, 1, 1, 1]}
      ]
    }"#;
    let f = write(&dir, "loopy.json", loopy);
    let (code, err) = code_and_stderr(&semifb(&["forward", &f]));
    assert_eq!(code, Some(3));
    assert!(err.contains("CyclicFactorGraph"), "{err}");
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_semifb"))
        .args(["forward", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(DIAMOND.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json_of(&out)["sink_sum"], 6.0);
}
