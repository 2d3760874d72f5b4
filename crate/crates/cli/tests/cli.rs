use std::path::Path;
use std::process::Command;

use antler_cli::run;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(
        std::iter::once("antler").chain(args.iter().copied()),
        &mut out,
    );
    (code, String::from_utf8(out).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn triangles(t: u32) -> String {
    let mut s = format!("p fvs {} {}\n", 3 * t, 3 * t);
    for i in 0..t {
        let b = 3 * i;
        s += &format!(
            "e {} {}\ne {} {}\ne {} {}\n",
            b + 1,
            b + 2,
            b + 2,
            b + 3,
            b + 1,
            b + 3
        );
    }
    s
}

#[test]
fn reduce_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.graph", &triangles(4));
    let (code, out) = call(&["reduce", "--k", "1", "--z", "1", &input]);
    assert_eq!(code, 0, "{out}");
    let s_line = out.lines().find(|l| l.starts_with("s ")).unwrap();
    assert_eq!(s_line.split_whitespace().count() - 1, 4);
    assert!(out.ends_with("p fvs 0 0\n"));
}

#[test]
fn gen_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("planted");
    let (code, out) = call(&[
        "gen",
        "--width",
        "2",
        "--trees",
        "1",
        "--rest",
        "4",
        "--seed",
        "7",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let graph = prefix.with_extension("graph");
    let sets = prefix.with_extension("json");
    for what in ["fvc", "antler", "certificate"] {
        let (code, out) = call(&[
            "verify",
            "--what",
            what,
            graph.to_str().unwrap(),
            sets.to_str().unwrap(),
        ]);
        assert_eq!((code, out.trim()), (0, "OK"), "{what}");
    }
    let (code, dot) = call(&[
        "export-dot",
        "--highlight",
        sets.to_str().unwrap(),
        graph.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("graph G {") && dot.contains("shape=box"));
}

#[test]
fn verify_rejects_wrong_sets() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.graph", &triangles(1));
    let sets = write(
        dir.path(),
        "bad.json",
        r#"{"cut":[],"forest":[1,2,3],"order":1,"certificate":null,"optimum":null,"seed":0}"#,
    );
    let (code, out) = call(&["verify", "--what", "fvc", &input, &sets]);
    assert_eq!((code, out.trim()), (1, "FAIL"));
}

#[test]
fn solve_forest_and_chain() {
    let dir = tempfile::tempdir().unwrap();
    let forest = write(
        dir.path(),
        "forest.graph",
        "p fvs 4 3\ne 1 2\ne 2 3\ne 2 4\n",
    );
    let (code, out) = call(&["solve", &forest]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.trim_end() == "s"));

    let prefix = dir.path().join("chain");
    call(&[
        "gen",
        "--chain",
        "1,2",
        "--trees",
        "1",
        "--seed",
        "3",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    let (code, out) = call(&[
        "solve",
        "--json",
        prefix.with_extension("graph").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["solution"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.graph", "p fvs 2 1\ne 1 9\n");
    let (code, out) = call(&["reduce", "--k", "1", "--z", "1", &bad]);
    assert_eq!(code, 2);
    assert!(out.contains("line 2"), "{out}");

    let k5: String = (1..=5)
        .flat_map(|a| (a + 1..=5).map(move |b| format!("e {a} {b}\n")))
        .collect();
    let dense = write(dir.path(), "k5.graph", &format!("p fvs 5 10\n{k5}"));
    assert_eq!(call(&["solve", "--cap", "1", &dense]).0, 4);

    assert_eq!(call(&["reduce", "--k", "1"]).0, 2);
    assert_eq!(call(&["reduce", "--k", "1", "--z", "2", &dense]).0, 1);
}

#[test]
fn oracle_cap_refusal_from_binary() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("p");
    call(&[
        "gen",
        "--width",
        "2",
        "--seed",
        "1",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    let status = Command::new(env!("CARGO_BIN_EXE_antler"))
        .args(["verify", "--what", "antler"])
        .arg(prefix.with_extension("graph"))
        .arg(prefix.with_extension("json"))
        .env("ANTLER_EXACT_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&status.stdout)
    );
}

#[test]
fn coloring_file_drives_oracle_mode() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.graph", &triangles(1));
    let coloring = write(
        dir.path(),
        "chi.txt",
        "v 1 C\nv 2 F\nv 3 F\ng 1 F\ng 2 F\ng 3 F\n",
    );
    let (code, out) = call(&[
        "reduce",
        "--k",
        "1",
        "--z",
        "1",
        "--trials",
        "0",
        "--coloring",
        &coloring,
        "--json",
        &input,
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["solution"].as_array().unwrap().len(), 1);
}
