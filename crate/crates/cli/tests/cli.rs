use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use incsp_cli::text::parse_instance;
use incsp_core::oracle::{all_pairs, exact_sssp};

fn incsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incsp")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join(name);
    let mut args = vec!["gen", "--out", p(&out)];
    args.extend_from_slice(extra);
    let o = incsp(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn answers(o: &Output) -> Vec<(String, Option<f64>)> {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| {
            let (q, v) = l.rsplit_once(' ').unwrap();
            (q.to_string(), if v == "inf" { None } else { Some(v.parse().unwrap()) })
        })
        .collect()
}

#[test]
fn gen_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--n", "20", "--m", "60", "--updates", "40", "--seed", "9", "--query-every", "3"];
    let a = fs::read(gen(dir.path(), "a.txt", &args)).unwrap();
    let b = fs::read(gen(dir.path(), "b.txt", &args)).unwrap();
    assert_eq!(a, b);
    let c = fs::read(gen(dir.path(), "c.txt", &["--n", "20", "--m", "60", "--updates", "40", "--seed", "10"])).unwrap();
    assert_ne!(a, c);
}

#[test]
fn offline_initial_version_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "inst.txt", &["--n", "30", "--m", "90", "--updates", "60", "--seed", "4"]);
    let mut text = fs::read_to_string(&path).unwrap();
    for v in 0..30 {
        text.push_str(&format!("?off {v} 0\n"));
    }
    fs::write(&path, &text).unwrap();
    let got = answers(&incsp(&["run-offline", "--in", p(&path), "--epsilon", "0.3"]));
    let g = parse_instance(&text).unwrap().instance.base_graph().unwrap();
    let dist = exact_sssp(&g, 0);
    assert_eq!(got.len(), 30);
    for (v, (_, est)) in got.iter().enumerate() {
        assert_eq!(*est, dist[v].is_finite().then_some(dist[v]), "vertex {v}");
    }
}

#[test]
fn offline_save_and_load_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(
        dir.path(),
        "inst.txt",
        &["--n", "25", "--m", "70", "--updates", "80", "--seed", "2", "--query-every", "2", "--query-kind", "offline"],
    );
    let saved = dir.path().join("off.txt");
    let first = incsp(&["run-offline", "--in", p(&path), "--save", p(&saved)]);
    let second = incsp(&["run-offline", "--in", p(&path), "--load", p(&saved)]);
    assert_eq!(answers(&first), answers(&second));
    assert_eq!(answers(&first).len(), 40);
}

#[test]
fn sssp_and_apsp_answers_within_factor() {
    let dir = tempfile::tempdir().unwrap();
    let src = gen(
        dir.path(),
        "src.txt",
        &["--n", "24", "--m", "70", "--updates", "50", "--mode", "source", "--query-every", "1", "--query-kind", "source"],
    );
    let text = fs::read_to_string(&src).unwrap();
    let mut g = parse_instance(&text).unwrap().instance.base_graph().unwrap();
    g.set_max_weight(None);
    let got = answers(&incsp(&["run-sssp", "--in", p(&src), "--epsilon", "0.2"]));
    let inst = parse_instance(&text).unwrap().instance;
    let mut it = got.iter();
    for op in &inst.ops {
        match op {
            incsp_core::Op::Update(u) => {
                g.apply_update(u).unwrap();
            }
            incsp_core::Op::Source(v) => {
                let d = exact_sssp(&g, 0)[*v];
                match it.next().unwrap().1 {
                    None => assert!(d.is_infinite()),
                    Some(e) => assert!(d <= e && e <= 1.2 * d),
                }
            }
            _ => {}
        }
    }

    let pair = gen(dir.path(), "pair.txt", &["--n", "12", "--m", "30", "--updates", "40", "--query-every", "1"]);
    let text = fs::read_to_string(&pair).unwrap();
    let inst = parse_instance(&text).unwrap().instance;
    let mut g = inst.base_graph().unwrap();
    g.set_max_weight(None);
    let got = answers(&incsp(&["run-apsp", "--in", p(&pair), "--variant", "rand", "--seed", "3"]));
    let mut it = got.iter();
    for op in &inst.ops {
        match op {
            incsp_core::Op::Update(u) => {
                g.apply_update(u).unwrap();
            }
            incsp_core::Op::Pair(a, b) => {
                let d = all_pairs(&g)[*a][*b];
                match it.next().unwrap().1 {
                    None => assert!(d.is_infinite()),
                    Some(e) => assert!(d <= e && e <= 1.5 * d),
                }
            }
            _ => {}
        }
    }
}

#[test]
fn verify_reports_json_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "inst.txt", &["--n", "16", "--m", "40", "--updates", "60", "--seed", "5"]);
    for structure in ["apsp", "offline"] {
        let o = incsp(&["verify", "--structure", structure, "--in", p(&path)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let out = String::from_utf8(o.stdout).unwrap();
        let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
        assert_eq!(last["type"], "summary");
        assert_eq!(last["passed"], true);
        assert_eq!(last["structure"], structure);
    }
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "inst.txt", &["--n", "40", "--m", "120", "--updates", "30", "--mode", "source"]);
    let csv = dir.path().join("bench.csv");
    let o = incsp(&["bench", "--in", p(&path), "--check-every", "10", "--bench-csv", p(&csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "updates_applied,queue_pops,pushes,edge_scans,rank_increases,shortcut_decreases,wall_time_ns"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn usage_and_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(incsp(&["frobnicate"]).status.code(), Some(1));
    let path = gen(dir.path(), "inst.txt", &["--n", "8", "--m", "10", "--updates", "5"]);
    let o = incsp(&["run-apsp", "--in", p(&path), "--variant", "rand"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    let o = incsp(&["run-apsp", "--in", p(&path), "--epsilon", "1.5"]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3 1\n0 1 4\n+ 0 9 2\n").unwrap();
    let o = incsp(&["run-apsp", "--in", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    // sssp replays accept only edges leaving the source
    let o = incsp(&["run-sssp", "--in", p(&path), "--source", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
