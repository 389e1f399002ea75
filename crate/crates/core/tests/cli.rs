mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use sketchcomm::bench::{
    compare, parse_membership, run, run_on_graph, Algorithm, RunSpec, StrategyKind,
};
use sketchcomm::generate::{planted_partition, PlantedPartitionConfig};
use sketchcomm::graph::{load_edge_list, EdgeListOptions};
use sketchcomm::{modularity, Error};

const BIN: &str = env!("CARGO_BIN_EXE_sketchcomm");

fn write_edges(path: &Path, edges: &[(u32, u32, f64)]) {
    let text: String = edges
        .iter()
        .map(|(u, v, w)| format!("{u} {v} {w}\n"))
        .collect();
    fs::write(path, text).unwrap();
}

fn planted_file(dir: &Path, n: usize) -> std::path::PathBuf {
    let (g, _) = planted_partition(&PlantedPartitionConfig {
        vertices: n,
        ..Default::default()
    })
    .unwrap();
    let mut edges = Vec::new();
    for u in 0..g.num_vertices() as u32 {
        edges.extend(
            g.neighbors(u)
                .filter(|&(v, _)| u < v)
                .map(|(v, w)| (u, v, w)),
        );
    }
    let path = dir.join(format!("planted{n}.txt"));
    write_edges(&path, &edges);
    path
}

#[test]
fn triangle_single_community() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tri.txt");
    write_edges(&input, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
    let mut spec = RunSpec::new(&input, Algorithm::Louvain, StrategyKind::FarKv);
    spec.membership_out = Some(dir.path().join("m.txt"));
    let out = run(&spec).unwrap();
    assert_eq!(out.membership, vec![0, 0, 0]);
    assert!(out.report.modularity.abs() < 1e-12);
    assert!(out.report.passes >= 1);
    assert_eq!(
        fs::read_to_string(dir.path().join("m.txt")).unwrap(),
        "0 0\n1 0\n2 0\n"
    );
}

#[test]
fn report_modularity_round_trips_through_membership_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_file(dir.path(), 1500);
    let g = load_edge_list(
        &fs::read_to_string(&input).unwrap(),
        &EdgeListOptions::default(),
    )
    .unwrap();
    for (algo, strat) in [
        (Algorithm::Louvain, StrategyKind::MisraGries),
        (Algorithm::Leiden, StrategyKind::FarKv),
        (Algorithm::Lpa, StrategyKind::BoyerMoore),
    ] {
        let mut spec = RunSpec::new(&input, algo, strat);
        let m = dir.path().join("m.txt");
        let r = dir.path().join("r.json");
        spec.membership_out = Some(m.clone());
        spec.report_out = Some(r.clone());
        run(&spec).unwrap();
        let membership = parse_membership(&fs::read_to_string(&m).unwrap()).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
        let q = report["modularity"].as_f64().unwrap();
        assert!((q - modularity(&g, &membership).unwrap()).abs() < 1e-12);
        for key in [
            "algorithm",
            "strategy",
            "parameters",
            "community_count",
            "passes",
            "iterations_per_pass",
            "vertices_moved_per_pass",
            "wall_time_ms",
            "aux_memory_bytes",
        ] {
            assert!(report.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn slots_with_far_kv_is_rejected() {
    let mut spec = RunSpec::new("unused.txt", Algorithm::Louvain, StrategyKind::FarKv);
    spec.slots = Some(8);
    assert!(matches!(run(&spec), Err(Error::Config(_))));
    let out = Command::new(BIN)
        .args(["run", "-i", "unused.txt", "-s", "far-kv", "-k", "8"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("slot count"));
}

#[test]
fn edgeless_graph_has_undefined_quality() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.mtx");
    fs::write(
        &input,
        "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 0\n",
    )
    .unwrap();
    let spec = RunSpec::new(&input, Algorithm::Louvain, StrategyKind::MisraGries);
    assert!(matches!(run(&spec), Err(Error::UndefinedQuality)));
}

#[test]
fn cli_deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_file(dir.path(), 800);
    let mut files = Vec::new();
    for rep in 0..2 {
        let m = dir.path().join(format!("m{rep}.txt"));
        let r = dir.path().join(format!("r{rep}.json"));
        let status = Command::new(BIN)
            .args([
                "run",
                "--algorithm",
                "leiden",
                "--strategy",
                "mg",
                "--deterministic",
            ])
            .arg("--input")
            .arg(&input)
            .arg("--membership")
            .arg(&m)
            .arg("--report")
            .arg(&r)
            .status()
            .unwrap();
        assert!(status.success());
        files.push(fs::read(&m).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn cli_missing_input_fails() {
    let out = Command::new(BIN)
        .args(["run", "-i", "/nonexistent/graph.txt"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn sketch_memory_is_independent_of_graph_size() {
    let dir = tempfile::tempdir().unwrap();
    let small = planted_file(dir.path(), 1000);
    let large = planted_file(dir.path(), 5000);
    for strat in [StrategyKind::MisraGries, StrategyKind::BoyerMoore] {
        let mut a = RunSpec::new(&small, Algorithm::Louvain, strat);
        a.threads = 2;
        let mut b = a.clone();
        b.input = large.clone();
        assert_eq!(
            run(&a).unwrap().report.aux_memory_bytes,
            run(&b).unwrap().report.aux_memory_bytes
        );
    }
    let mut a = RunSpec::new(&small, Algorithm::Louvain, StrategyKind::FarKv);
    a.threads = 2;
    let r = run(&a).unwrap().report;
    assert_eq!(r.workers, 2);
    assert_eq!(r.aux_memory_bytes, 2 * r.per_worker_aux_memory_bytes());
    assert!(r.per_worker_aux_memory_bytes() >= 8 * 1000);
}

#[test]
fn baseline_compared_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_file(dir.path(), 1000);
    let mut spec = RunSpec::new(&input, Algorithm::Louvain, StrategyKind::FarKv);
    spec.deterministic = true;
    let cmp = compare(&[spec.clone(), spec], 0, 0.99).unwrap();
    assert_eq!(cmp.rows[0].relative_modularity, 1.0);
    assert_eq!(cmp.rows[0].relative_runtime, 1.0);
    assert!((cmp.rows[1].relative_modularity - 1.0).abs() < 1e-12);
    assert!(!cmp.rows[1].below_threshold);
    assert!(cmp.to_table().contains("baseline"));
}

#[test]
fn compare_requires_shared_input() {
    let a = RunSpec::new("a.txt", Algorithm::Louvain, StrategyKind::FarKv);
    let b = RunSpec::new("b.txt", Algorithm::Louvain, StrategyKind::FarKv);
    assert!(matches!(compare(&[a, b], 0, 0.99), Err(Error::Config(_))));
}

#[test]
fn cli_compare_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_file(dir.path(), 1000);
    let json = dir.path().join("cmp.json");
    let out = Command::new(BIN)
        .args([
            "compare",
            "--deterministic",
            "--run",
            "lpa:far-kv",
            "--run",
            "lpa:mg:scans=1",
            "--run",
            "lpa:bm",
        ])
        .arg("--input")
        .arg(&input)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 4);
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn run_on_loaded_graph_matches_file_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tt.txt");
    write_edges(&input, &common::two_triangles_edges());
    let g = common::graph(6, &common::two_triangles_edges());
    let spec = RunSpec::new(&input, Algorithm::Leiden, StrategyKind::MisraGries);
    assert_eq!(
        run_on_graph(&g, &spec).unwrap().membership,
        run(&spec).unwrap().membership
    );
}
