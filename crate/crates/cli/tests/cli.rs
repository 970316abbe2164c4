use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lyubeznik::invariants::random_complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lyubeznik"));
    c.env_remove("LYUBEZNIK_CACHE_DIR");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn cache_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let ok = write(d.path(), "ok.json", r#"{"n":2,"generators":[[1,2]]}"#);
    let garbage = write(d.path(), "g.json", "not json");
    let range = write(d.path(), "r.json", r#"{"n":2,"generators":[[1,3]]}"#);
    let dup = write(d.path(), "d.json", r#"{"n":3,"facets":[[1,2,2]]}"#);
    let big = write(d.path(), "b.json", r#"{"n":30,"generators":[[1]]}"#);
    let unit = write(d.path(), "u.json", r#"{"n":2,"generators":[[]]}"#);
    assert_eq!(run(&["chi", ok.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["chi", garbage.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["chi", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["chi", range.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["chi", dup.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["chi", big.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["table", unit.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["--field", "fp:4", "chi", ok.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn size_cap_exit_code() {
    // Twenty isolated points: the top-degree Čech complex for the table has
    // far more active generators than the engine accepts.
    let d = TempDir::new().unwrap();
    let facets: Vec<String> = (1..=20).map(|v| format!("[{v}]")).collect();
    let f = write(d.path(), "p.json", &format!(r#"{{"n":20,"facets":[{}]}}"#, facets.join(",")));
    let o = run(&["table", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn minimization_warns() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "m.json", r#"{"n":2,"generators":[[1],[1,2]]}"#);
    let o = run(&["chi", f.to_str().unwrap(), "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    // (x_1) in two variables: a line, chi = -1.
    assert!(stdout(&o).contains("chi(engine) = -1"));
}

#[test]
fn example_complex_reports_three() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "e.json", r#"{"n":5,"facets":[[1,2],[1,5],[3,4,5]]}"#);
    let o = run(&["--format", "json", "chi", f.to_str().unwrap(), "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["chi"]["engine"], 3);
    assert_eq!(v["chi"]["faces"], 3);
    assert_eq!(v["chi"]["inclusion-exclusion"], 3);
    assert_eq!(v["agree"], true);
}

#[test]
fn output_formats() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "t.json", r#"{"n":2,"generators":[[1,2]]}"#);
    let f = f.to_str().unwrap();
    let csv = stdout(&run(&["--format", "csv", "table", f]));
    assert_eq!(csv, "i\\j,0,1\n0,0,0\n1,0,1\n");
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["--format", "json", "table", f]))).unwrap();
    assert_eq!(json["entries"], serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(json["field"], "q");
    let text = stdout(&run(&["bound", f, "--j", "1"]));
    assert!(text.starts_with("bound[j = 1] = 3"), "{text}");
    let lambda = stdout(&run(&["--format", "csv", "lambda", f, "--i", "1"]));
    assert_eq!(lambda, "indices,lambda\n1,3\n");
}

#[test]
fn iterated_lambda_matches_table() {
    let d = TempDir::new().unwrap();
    let i = write(d.path(), "i.json", r#"{"n":2,"generators":[[1,2]]}"#);
    let m = write(d.path(), "m.json", r#"{"n":2,"generators":[[1],[2]]}"#);
    let (i, m) = (i.to_str().unwrap(), m.to_str().unwrap());
    for (a, b, expected) in [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)] {
        let o = run(&[
            "--format", "csv", "lambda", i, "--i", &b.to_string(), "--ideal", m, "--i", &a.to_string(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).ends_with(&format!(",{expected}\n")), "λ_{a},{b}: {}", stdout(&o));
    }
    let o = run(&["lambda", i, "--i", "1", "--ideal", m]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_contract() {
    let d = TempDir::new().unwrap();
    let cache = d.path().join("cache");
    let c = cache.to_str().unwrap();
    let a = write(d.path(), "a.json", r#"{"n":3,"generators":[[1,2],[2,3]]}"#);
    // The same ideal, written differently.
    let b = write(d.path(), "b.json", r#"{"n":3,"generators":[[3,2],[2,1],[1,2,3]]}"#);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let first = run(&["--cache", c, "table", a]);
    let second = run(&["--cache", c, "table", a]);
    assert_eq!(first.stdout, second.stdout);
    let entries = cache_files(&cache);
    assert_eq!(entries.len(), 1);
    let entry = &entries[0];

    // Plant a sentinel with a valid checksum: both spellings of the input
    // must read it back.
    let body = r#"{"Table":{"d":0,"entries":[[42]]}}"#;
    std::fs::write(entry, format!("{}\n{body}", sha256_hex(body))).unwrap();
    let hit_a = stdout(&run(&["--cache", c, "table", a]));
    let hit_b = stdout(&run(&["--cache", c, "table", b]));
    assert!(hit_a.contains("42"), "{hit_a}");
    assert_eq!(hit_a, hit_b);
    let bypass = run(&["--cache", c, "--no-cache", "table", b]);
    assert_eq!(bypass.stdout, first.stdout);

    // A corrupted entry is recomputed with a warning and rewritten.
    std::fs::write(entry, "garbage\n{}").unwrap();
    let repaired = run(&["--cache", c, "table", a]);
    assert!(stderr(&repaired).contains("corrupted"), "{}", stderr(&repaired));
    assert_eq!(repaired.stdout, first.stdout);
    assert!(stderr(&run(&["--cache", c, "table", a])).is_empty());

    // Another field gets its own entry.
    run(&["--cache", c, "--field", "fp:2", "table", a]);
    assert_eq!(cache_files(&cache).len(), 2);
}

fn sha256_hex(s: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(s.as_bytes()))
}

#[test]
fn env_variable_sets_cache_dir() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "a.json", r#"{"n":2,"generators":[[1,2]]}"#);
    let cache = d.path().join("env-cache");
    let o = bin()
        .env("LYUBEZNIK_CACHE_DIR", &cache)
        .args(["chi", f.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cache_files(&cache).len(), 1);
}

#[test]
fn chi_all_agrees_on_random_complexes_up_to_eight_vertices() {
    let d = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..25 {
        let n = 1 + k % 8;
        let cx = random_complex(&mut rng, n, 8);
        if cx.is_void() {
            continue;
        }
        let facets: Vec<Vec<usize>> = cx.facets().iter().map(|f| f.to_one_based()).collect();
        let body = serde_json::json!({ "n": n, "facets": facets }).to_string();
        let f = write(d.path(), &format!("c{k}.json"), &body);
        let o = run(&["chi", f.to_str().unwrap(), "--method", "all"]);
        assert_eq!(o.status.code(), Some(0), "{body}: {}", stderr(&o));
    }
}

#[test]
fn check_command_passes() {
    let o = run(&["check", "--seed", "3", "--trials", "6", "--nmax", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("chi-three-way: 6 passed"));
}
