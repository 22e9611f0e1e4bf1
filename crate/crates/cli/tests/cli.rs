use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tropicurve::fixtures::suite;
use tropicurve::io;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tropicurve"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn fixture_file(dir: &Path, name: &str) -> PathBuf {
    let emb = suite().into_iter().find(|(n, _)| n == name).expect("fixture").1;
    let p = dir.join(format!("{name}.json"));
    fs::write(&p, io::write_embedding(&emb)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lint_fig1_vertices() {
    let left = run(&["lint", "--in", s(&data("data/fig1_left.json"))]);
    assert_eq!(code(&left), 0, "{}", String::from_utf8_lossy(&left.stderr));
    let middle = run(&["lint", "--in", s(&data("data/fig1_middle.json"))]);
    assert_eq!(code(&middle), 1);
    assert!(String::from_utf8_lossy(&middle.stderr).contains("rank"));
    let right = run(&["lint", "--in", s(&data("data/fig1_right.json"))]);
    assert_eq!(code(&right), 1);
    assert!(String::from_utf8_lossy(&right.stderr).contains("elementary divisor 3"));
    let report: serde_json::Value = serde_json::from_slice(&right.stdout).unwrap();
    assert_eq!(report["schema"], "tropicurve/1");
    assert_eq!(report["smooth"], false);
}

#[test]
fn malformed_rational_is_an_input_error() {
    let o = run(&["lint", "--in", s(&data("data/bad_rational.json"))]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 9"), "{err}");
    assert!(err.contains("zero denominator"), "{err}");
    assert_eq!(code(&run(&["lint", "--in", "/nonexistent/file.json"])), 2);
}

#[test]
fn demo_tate_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.json");
    let emb = dir.path().join("emb.json");
    let svg = dir.path().join("tate.svg");
    let o = run(&["demo-tate", "1", "--out", s(&emb), "--curve", s(&curve), "--svg", s(&svg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&curve).unwrap(), fs::read_to_string(data("golden/tate_curve.json")).unwrap());
    assert_eq!(fs::read_to_string(&emb).unwrap(), fs::read_to_string(data("golden/tate_embedding.json")).unwrap());
    let picture = fs::read_to_string(&svg).unwrap();
    // nine rays with heads, nine bounded edges
    assert_eq!(picture.matches("marker-end").count(), 9);
    assert_eq!(picture.matches("<line").count(), 18);
    assert!(!picture.contains("class=\"weight\""));
    // the curve lints clean without rewriting
    let lint = run(&["lint", "--in", s(&curve)]);
    assert_eq!(code(&lint), 0);
    assert_eq!(code(&run(&["demo-tate", "0"])), 2);
    assert_eq!(code(&run(&["demo-tate", "-1/2"])), 2);
}

#[test]
fn demo_tate_scales_with_c() {
    let one = io::parse_curve(&fs::read_to_string(data("golden/tate_curve.json")).unwrap()).unwrap();
    let o = run(&["demo-tate", "2"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("c2.json");
    assert_eq!(code(&run(&["demo-tate", "2", "--curve", s(&curve)])), 0);
    let two = io::parse_curve(&fs::read_to_string(&curve).unwrap()).unwrap();
    assert_eq!(one.edges().len(), two.edges().len());
    let doubled: Vec<_> = one
        .vertices()
        .iter()
        .map(|v| v.coords.iter().map(|x| x.finite().map(|r| r * tropicurve::rational::int(2))).collect::<Vec<_>>())
        .collect();
    let got: Vec<_> = two.vertices().iter().map(|v| v.coords.iter().map(|x| x.finite().cloned()).collect::<Vec<_>>()).collect();
    let mut a = doubled.clone();
    let mut b = got.clone();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn tropicalize_fold_map_labels_weight_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "tree-star-folded-plane");
    let svg = dir.path().join("fold.svg");
    let out = dir.path().join("curve.json");
    let o = run(&["tropicalize", "--in", s(&input), "--out", s(&out), "--svg", s(&svg), "--proj", "0,1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let picture = fs::read_to_string(&svg).unwrap();
    assert!(picture.contains(">2</text>"), "{picture}");
    // the weight-two edge makes the curve singular
    assert_eq!(code(&run(&["lint", "--in", s(&out)])), 1);
    assert_eq!(code(&run(&["tropicalize", "--in", s(&input), "--svg", s(&svg), "--proj", "0,0"])), 2);
    assert_eq!(code(&run(&["tropicalize", "--in", s(&input), "--svg", s(&svg), "--proj", "0,5"])), 2);
}

#[test]
fn empty_coordinates_cannot_be_tropicalized() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "theta");
    assert_eq!(code(&run(&["tropicalize", "--in", s(&input)])), 2);
}

#[test]
fn faithfulize_and_smooth() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "circle-spoke");
    let ff = dir.path().join("ff.json");
    let rep = dir.path().join("ff_report.json");
    let o = run(&["faithfulize", "--in", s(&input), "--out", s(&ff), "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report["kind"], "pipeline_report");
    assert_eq!(report["certificate"]["fully_faithful"], true);
    assert!(report["steps"][0]["function"]["edges"].is_object());

    let sm = dir.path().join("sm.json");
    let curve = dir.path().join("sm_curve.json");
    let o = run(&["smooth", "--in", s(&ff), "--out", s(&sm), "--report", s(&dir.path().join("sm_report.json"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["tropicalize", "--in", s(&sm), "--out", s(&curve)])), 0);
    assert_eq!(code(&run(&["lint", "--in", s(&curve)])), 0);
}

#[test]
fn budget_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "tree-star-folded");
    let o = run(&["faithfulize", "--in", s(&input), "--budget", "0"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn explicit_core_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "circle-spoke");
    let core = dir.path().join("core.json");
    fs::write(&core, "{\"schema\": \"tropicurve/1\", \"kind\": \"core\", \"edges\": [\"top\", \"bot\"]}\n").unwrap();
    let rep = dir.path().join("rep.json");
    let o = run(&["faithfulize", "--in", s(&input), "--core", s(&core), "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report["core"], serde_json::json!(["bot", "top"]));
    fs::write(&core, "{\"schema\": \"tropicurve/1\", \"kind\": \"core\", \"edges\": [\"nope\"]}\n").unwrap();
    assert_eq!(code(&run(&["faithfulize", "--in", s(&input), "--core", s(&core)])), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(dir.path(), "dumbbell-rays");
    let a = run(&["smooth", "--in", s(&input)]);
    let b = run(&["smooth", "--in", s(&input)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
