use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nswlab::graph::{named_graph, write_graph};
use nswlab::io::write_instance;
use nswlab::rational::frac;
use nswlab::{build_instance, completeness_allocation, Instance, ReductionParams};
use serde_json::Value;
use tempfile::TempDir;

fn nswlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nswlab")).args(args).env_remove("NSWLAB_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Reduces a named graph into `dir`, returning the instance and tags paths.
fn reduced(dir: &TempDir, name: &str, k: usize) -> (PathBuf, PathBuf) {
    let prefix = dir.path().join(name);
    let o = nswlab(&["reduce", "--named", name, "--k", &k.to_string(), "--out", p(&prefix)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    (dir.path().join(format!("{name}.instance.json")), dir.path().join(format!("{name}.tags.json")))
}

#[test]
fn reduce_prints_counts() {
    let dir = TempDir::new().unwrap();
    let o = nswlab(&["reduce", "--named", "K4", "--alpha", "2/5", "--k", "3", "--out", p(&dir.path().join("k4"))]);
    assert_eq!(stdout(&o), "n=10 m=21\n");
    let o = nswlab(&["reduce", "--named", "Petersen", "--k", "6", "--out", p(&dir.path().join("pet"))]);
    assert_eq!(stdout(&o), "n=25 m=51\n");
    assert!(dir.path().join("pet.instance.json").exists() && dir.path().join("pet.tags.json").exists());
}

#[test]
fn reduce_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x");
    let o = nswlab(&["reduce", "--named", "K4", "--alpha", "1/3", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--allow-boundary"));
    assert_eq!(code(&nswlab(&["reduce", "--named", "K4", "--alpha", "1/3", "--allow-boundary", "--out", p(&out)])), 0);
    assert_eq!(code(&nswlab(&["reduce", "--named", "K4", "--k", "5", "--out", p(&out)])), 2);
    assert_eq!(code(&nswlab(&["reduce", "--named", "K5", "--out", p(&out)])), 2);
    assert_eq!(code(&nswlab(&["reduce", "--named", "K4", "--alpha", "-1/3", "--out", p(&out)])), 2);
    assert_eq!(code(&nswlab(&["reduce", "--out", p(&out)])), 2);
}

#[test]
fn reduce_accepts_graph_files() {
    let dir = TempDir::new().unwrap();
    let gpath = dir.path().join("prism.txt");
    write_graph(&named_graph("Prism").unwrap(), &gpath).unwrap();
    let o = nswlab(&["reduce", "--graph", p(&gpath), "--out", p(&dir.path().join("prism"))]);
    // k defaults to the cover number, 4.
    assert_eq!(stdout(&o), "n=15 m=31\n");
    std::fs::write(&gpath, "4 6\n0 1\n").unwrap();
    let o = nswlab(&["reduce", "--graph", p(&gpath), "--out", p(&dir.path().join("bad"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("header declares 6 edges"));
}

#[test]
fn solve_reports_exact_product() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = reduced(&dir, "K4", 3);
    let alloc = dir.path().join("opt.json");
    let o = nswlab(&["solve", p(&inst), "--workers", "2", "--out", p(&alloc)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("product=343/125\n"));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&alloc).unwrap()).unwrap();
    assert_eq!(written.as_object().unwrap().len(), 21);

    let o = nswlab(&["solve", p(&inst), "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["product"], "343/125");
    assert_eq!(doc["allocation"], written);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = reduced(&dir, "K4", 3);
    let o = nswlab(&["solve", p(&inst), "--limit", "3"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = nswlab(&["solve", p(&inst), "--state-limit", "2"]);
    assert_eq!(code(&o), 3);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"agents": ["a"], "items": [{"name": "x", "utilities": {"a": "-1/3"}}]}"#).unwrap();
    let o = nswlab(&["solve", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("items[0]"), "{}", stderr(&o));
    assert_eq!(code(&nswlab(&["solve", p(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn solve_handles_generic_instances() {
    let dir = TempDir::new().unwrap();
    let inst = Instance::new(
        vec!["ann".into(), "bob".into()],
        vec!["x".into(), "y".into(), "z".into()],
        vec![vec![(0, frac(1, 1)), (1, frac(1, 2))], vec![(0, frac(1, 1))], vec![(1, frac(3, 1))]],
    )
    .unwrap();
    let path = dir.path().join("g.json");
    write_instance(&inst, &path).unwrap();
    let o = nswlab(&["solve", p(&path)]);
    assert_eq!(stdout(&o), "agents=2 items=3\nproduct=6\ngeomean_approx=2.44948974278\nann: x y\nbob: z\n");
}

#[test]
fn vc_on_named_graphs() {
    let o = nswlab(&["vc", "--named", "K4"]);
    assert_eq!(stdout(&o), "tau=3\ncover=0 1 2\n");
    let o = nswlab(&["vc", "--named", "Petersen", "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["tau"], 6);
    assert_eq!(code(&nswlab(&["vc", "--random", "12", "--bound", "8"])), 3);
}

#[test]
fn normalize_then_analyze() {
    let dir = TempDir::new().unwrap();
    let (inst, tags) = reduced(&dir, "K4", 3);
    let r = build_instance(&named_graph("K4").unwrap(), &ReductionParams::new(frac(2, 5), 3)).unwrap();
    let mut asg = completeness_allocation(&r, &[0, 1, 2].into_iter().collect()).unwrap().to_assignment(&r.instance);
    // v:0 holds a vertex item, so its shared item on edge 0-1 belongs to e:0-1.
    asg.insert("si:0@0-1".into(), "v:0".into());
    let alloc = dir.path().join("a.json");
    std::fs::write(&alloc, serde_json::to_string(&asg).unwrap()).unwrap();

    let o = nswlab(&["analyze", p(&inst), p(&tags), p(&alloc)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("rule 1 violated"), "{}", stderr(&o));

    let fixed = dir.path().join("b.json");
    let o = nswlab(&["normalize", p(&inst), p(&tags), p(&alloc), "--out", p(&fixed)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("exchanged=1"));

    let o = nswlab(&["analyze", p(&inst), p(&tags), p(&fixed)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["identities"]["all_hold"], true);
    assert_eq!(doc["product"], "343/125");
    assert_eq!(doc["formula_matches"], true);
    assert_eq!(doc["profile"]["c"], serde_json::json!([0, 1, 2]));
}

#[test]
fn normalize_rejects_mismatched_tags() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = reduced(&dir, "K4", 3);
    let (_, other_tags) = reduced(&dir, "K33", 3);
    let alloc = dir.path().join("opt.json");
    nswlab(&["solve", p(&inst), "--out", p(&alloc)]);
    assert_eq!(code(&nswlab(&["normalize", p(&inst), p(&other_tags), p(&alloc)])), 2);
}

#[test]
fn gap_verdicts() {
    let o = nswlab(&["gap", "--named", "K4", "--k", "3", "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["verdict"], "cover-achievable");
    assert_eq!(doc["optimum"]["value"], "343/125");
    assert_eq!(doc["completeness"]["value"], "343/125");
    assert_eq!(doc["bound_holds"], true);

    let o = nswlab(&["gap", "--named", "K4", "--k", "2", "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["verdict"], "gap-realized");
    assert_eq!(doc["optimum"]["value"], "14/15");
    assert_eq!(doc["completeness"]["value"], "1");
    assert_eq!(doc["completeness"]["cover_exists"], false);

    let o = nswlab(&["gap", "--named", "K4", "--alpha", "1/3", "--allow-boundary", "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mu = doc["constants"]["mu_approx"].as_f64().unwrap();
    assert!((mu - 1.00008).abs() < 1e-5);
    assert_eq!(code(&nswlab(&["gap", "--named", "K4", "--cmin", "0.4"])), 2);
}

#[test]
fn reports_are_reproducible() {
    let args = ["gap", "--random", "8", "--seed", "5", "--json"];
    assert_eq!(nswlab(&args).stdout, nswlab(&args).stdout);
    let text = stdout(&nswlab(&["gap", "--named", "Prism"]));
    assert!(text.contains("verdict: cover-achievable"), "{text}");
}

#[test]
fn sweep_grid() {
    let o = nswlab(&["sweep", "--alpha-grid", "2/5,5/12,11/24,3/7,9/20", "--graphs", "K4,K33", "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("alpha,graph,"));
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[10], "true", "{row}");
        assert_eq!(&cols[11..15], ["true"; 4], "{row}");
    }
    assert!(lines[1].starts_with("2/5,K4,4,6,3,3,343/125,"));
    // Same rows regardless of the worker count.
    let seq = nswlab(&["sweep", "--alpha-grid", "2/5,5/12,11/24,3/7,9/20", "--graphs", "K4,K33", "--workers", "1"]);
    assert_eq!(seq.stdout, o.stdout);
}

#[test]
fn sweep_random_seeds_and_offsets() {
    let o = nswlab(&["sweep", "--alpha-grid", "2/5", "--graphs", "random:6", "--seeds", "1..3"]);
    let text = stdout(&o);
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(labels, ["random:6#1", "random:6#2", "random:6#3"]);
    let graphs: Vec<String> = (1..=3).map(|s| stdout(&nswlab(&["graph", "--random", "6", "--seed", &s.to_string()]))).collect();
    assert!(graphs[0] != graphs[1] && graphs[1] != graphs[2] && graphs[0] != graphs[2]);

    let o = nswlab(&["sweep", "--alpha-grid", "2/5", "--graphs", "K4", "--k-offsets", "-1,0"]);
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",gap-realized,"));
    assert!(rows[1].contains(",cover-achievable,"));
}

#[test]
fn sweep_input_errors() {
    assert_eq!(code(&nswlab(&["sweep", "--alpha-grid", ""])), 2);
    assert_eq!(code(&nswlab(&["sweep", "--alpha-grid", "1/3,2/5"])), 2);
    assert_eq!(code(&nswlab(&["sweep", "--alpha-grid", "1/3", "--allow-boundary", "--graphs", "K4"])), 0);
    assert_eq!(code(&nswlab(&["sweep", "--alpha-grid", "2/5", "--graphs", "K9"])), 2);
    assert_eq!(code(&nswlab(&["sweep", "--alpha-grid", "2/5", "--graphs", "random:6", "--seeds", "3..1"])), 2);
}

#[test]
fn workers_default_from_environment() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = reduced(&dir, "K4", 2);
    let run = |w: &str| {
        Command::new(env!("CARGO_BIN_EXE_nswlab")).args(["solve", p(&inst)]).env("NSWLAB_WORKERS", w).output().unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("product=14/15"));
}
