use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use repath::graph_io::parse_graph;
use repath::store;
use repath_core::dist::Dist;
use repath_core::replacement::brute_replacement_dist;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn repath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repath_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_repath"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: TempDir::new().unwrap(),
        }
    }
    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.file(name);
        fs::write(&p, body).unwrap();
        p
    }
}

#[test]
fn gen_small_models() {
    let p3 = repath(&["gen", "path", "3"]);
    assert!(p3.status.success());
    assert_eq!(text(&p3.stdout), "3 2\n0 1\n1 2\n");
    let c4 = repath(&["gen", "cycle", "4"]);
    let g = parse_graph(&text(&c4.stdout)).unwrap();
    assert_eq!((g.n(), g.m()), (4, 4));
    assert!((0..4).all(|v| g.degree(v) == 2));
}

#[test]
fn gen_erdos_renyi_checksum() {
    let out = repath(&["gen", "erdos-renyi", "100", "0.08", "--seed", "7"]);
    assert!(out.status.success());
    let digest = Sha256::digest(&out.stdout);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(
        hex,
        "60a58f4dbc56e4cf0842bdd82091da47c7f1c59c61201ce31305f7b10b790312"
    );
}

#[test]
fn gen_rejects_bad_params() {
    assert_eq!(repath(&["gen", "erdos-renyi", "10"]).status.code(), Some(2));
    assert_eq!(
        repath(&["gen", "erdos-renyi", "10", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(repath(&["gen", "cycle", "2"]).status.code(), Some(2));
    assert_eq!(repath(&["gen", "blob", "5"]).status.code(), Some(2));
    let out = repath(&["gen", "path", "3", "--out", "/nonexistent-dir/x"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn p3_build_and_query() {
    let w = Work::new();
    let g = w.write("p3.txt", "3 2\n0 1\n1 2\n");
    let o = w.file("p3.oracle");
    let out = repath(&[
        "build",
        path_str(&g),
        "--sources",
        "0",
        "--out",
        path_str(&o),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["entries"]["near"], 2);
    assert_eq!(stats["seeds"]["perturb"], 0);
    assert_eq!(stats["c"], 3.0);

    let q = repath_stdin(&["query", path_str(&o)], "0 2 1 2\n0 1 1 2\n");
    assert!(q.status.success());
    assert_eq!(text(&q.stdout), "INF\n1\n");

    let bad = repath_stdin(&["query", path_str(&o)], "0 2 9 9\n0 2 0 1\n2 0 0 1\n");
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(text(&bad.stdout), "INF\n");
    let err = text(&bad.stderr);
    assert!(err.contains("line 1: no such edge"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn k3_all_terminals_and_answers() {
    let w = Work::new();
    let g = w.write("k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    let o = w.file("k3.oracle");
    let out = repath(&["build", path_str(&g), "--sigma", "3", "--out", path_str(&o)]);
    assert!(out.status.success());
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["terminals"], 3);
    let q = repath_stdin(&["query", path_str(&o), "--trace"], "0 2 0 2\n");
    assert!(text(&q.stdout).starts_with("2 "), "{}", text(&q.stdout));
}

#[test]
fn disconnected_input_answers_inf() {
    let w = Work::new();
    let g = w.write("two.txt", "4 2\n0 1\n2 3\n");
    let o = w.file("two.oracle");
    assert!(repath(&[
        "build",
        path_str(&g),
        "--sources",
        "0",
        "--out",
        path_str(&o)
    ])
    .status
    .success());
    let q = repath_stdin(&["query", path_str(&o)], "0 3 2 3\n0 1 2 3\n");
    assert_eq!(text(&q.stdout), "INF\n1\n");
}

#[test]
fn build_errors() {
    let w = Work::new();
    let g = w.write("p3.txt", "3 2\n0 1\n1 2\n");
    let o = w.file("o");
    let code = |args: &[&str]| repath(args).status.code();
    assert_eq!(
        code(&["build", path_str(&g), "--out", path_str(&o)]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "build",
            path_str(&g),
            "--sources",
            "5",
            "--out",
            path_str(&o)
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["build", path_str(&g), "--sigma", "4", "--out", path_str(&o)]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "build",
            "/no/such/file",
            "--sigma",
            "1",
            "--out",
            path_str(&o)
        ]),
        Some(3)
    );
    let bad = w.write("bad.txt", "3 2\n0 1\n1 1\n");
    let out = repath(&[
        "build",
        path_str(&bad),
        "--sigma",
        "1",
        "--out",
        path_str(&o),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("line 3"));
    assert_eq!(code(&["query", path_str(&g)]), Some(3));
}

#[test]
fn verify_clean_and_faulty() {
    let w = Work::new();
    let p3 = w.write("p3.txt", "3 2\n0 1\n1 2\n");
    let out = repath(&["verify", path_str(&p3), "--sources", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));

    let er = repath(&["gen", "erdos-renyi", "60", "0.1", "--seed", "3", "--lcc"]);
    let g = w.write("g60.txt", &text(&er.stdout));
    let stats = w.file("verify.json");
    let out = repath(&[
        "verify",
        path_str(&g),
        "--sigma",
        "8",
        "--seed",
        "2",
        "--out",
        path_str(&stats),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    let st: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(st["passed"], true);
    assert_eq!(st["mismatch_count"], 0);
    assert_eq!(st["oracle"]["seeds"]["sources"], 2);

    let out = repath(&["verify", path_str(&g), "--sigma", "8", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let s = text(&out.stdout);
    assert!(s.contains("mismatch: s="), "{s}");
    assert!(s.ends_with("FAIL\n"));
}

#[test]
fn round_trip_matches_memory_and_brute_force() {
    let w = Work::new();
    let er = repath(&["gen", "erdos-renyi", "40", "0.15", "--seed", "11", "--lcc"]);
    let gfile = w.write("g.txt", &text(&er.stdout));
    let ofile = w.file("g.oracle");
    let out = repath(&[
        "build",
        path_str(&gfile),
        "--sources",
        "0,5,9",
        "--out",
        path_str(&ofile),
    ]);
    assert!(out.status.success());

    let g = parse_graph(&text(&er.stdout)).unwrap();
    let o = store::load(&ofile).unwrap();
    let mut queries = String::new();
    let mut expected = String::new();
    for &s in &[0u32, 5, 9] {
        for t in 0..g.n() as u32 {
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                queries += &format!("{s} {t} {u} {v}\n");
                let mem = o.query(s, t, e as u32).unwrap().distance;
                let brute: Dist = brute_replacement_dist(&g, s, t, e as u32);
                assert_eq!(mem, brute, "s={s} t={t} e={e}");
                expected += &format!("{mem}\n");
            }
        }
    }
    let qfile = w.write("q.txt", &queries);
    let a = repath(&["query", path_str(&ofile), path_str(&qfile)]);
    assert!(a.status.success());
    assert_eq!(text(&a.stdout), expected);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let w = Work::new();
    let er = repath(&["gen", "erdos-renyi", "50", "0.12", "--seed", "5", "--lcc"]);
    let g = w.write("g.txt", &text(&er.stdout));
    let run = |tag: &str| {
        let o = w.file(&format!("{tag}.oracle"));
        let s = w.file(&format!("{tag}.json"));
        let b = repath(&[
            "build",
            path_str(&g),
            "--sigma",
            "4",
            "--seed",
            "9",
            "--perturb-seed",
            "3",
            "--out",
            path_str(&o),
            "--stats",
            path_str(&s),
        ]);
        assert!(b.status.success());
        let q = repath_stdin(&["query", path_str(&o), "--trace"], "0 1 0 1\n3 7 1 2\n");
        (fs::read(&o).unwrap(), fs::read(&s).unwrap(), q.stdout)
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn stats_command_reads_saved_oracle() {
    let w = Work::new();
    let g = w.write("c12.txt", &text(&repath(&["gen", "cycle", "12"]).stdout));
    let o = w.file("c.oracle");
    let built = repath(&[
        "build",
        path_str(&g),
        "--sources",
        "0,6",
        "--out",
        path_str(&o),
    ]);
    let again = repath(&["stats", path_str(&o)]);
    assert!(again.status.success());
    let a: serde_json::Value = serde_json::from_slice(&built.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(a["entries"], b["entries"]);
    assert_eq!(a["total_entries"], b["total_entries"]);
}

#[test]
fn bench_edge_cases() {
    let w = Work::new();
    let out_file = w.file("bench.json");
    let one = repath(&[
        "bench",
        "--grid",
        "n=48;sigma=2;seeds=1;degree=6;queries=200",
        "--out",
        path_str(&out_file),
    ]);
    assert!(one.status.success(), "{}", text(&one.stderr));
    assert!(text(&one.stdout).contains("n_slope=n/a"));
    let st: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_file).unwrap()).unwrap();
    assert!(st["report"]["n_slope"].is_null());
    assert_eq!(st["report"]["points"].as_array().unwrap().len(), 1);

    assert_eq!(repath(&["bench", "--grid", ""]).status.code(), Some(2));
    let huge = repath(&["bench", "--grid", "n=10000000;sigma=4;seeds=1"]);
    assert_eq!(huge.status.code(), Some(2));
    assert!(text(&huge.stderr).contains("stored entries"));
}

#[test]
fn bench_two_sizes_fits_slope() {
    let out = repath(&[
        "bench",
        "--grid",
        "n=40,80;sigma=2;seeds=1;degree=6;queries=100",
    ]);
    assert!(out.status.success());
    let s = text(&out.stdout);
    assert!(!s.contains("n_slope=n/a"), "{s}");
}
