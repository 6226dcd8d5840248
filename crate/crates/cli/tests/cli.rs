use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use compaction_forge::circuit::{bristol, opnet};
use compaction_forge::oracle::check_compact;
use compaction_forge::Builder;
use serde_json::Value;

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compaction-forge"))
        .args(args)
        .current_dir(dir)
        .env_remove("COMPACTION_FORGE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn build_writes_file_and_stats() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["build", "--family", "compact", "--n", "300", "--w", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("bool ") && s.contains("selector_width_sum") && s.contains("lowered"), "{s}");
    assert!(s.contains("bound O(n w)"), "{s}");
    let c = opnet::from_str(&fs::read_to_string(d.path().join("compact_n300_w8.json")).unwrap()).unwrap();
    assert_eq!(c.inputs().len(), 300);
    assert_eq!(c.meta("family"), Some("compact"));
}

#[test]
fn bristol_output_passes_lint() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(
        d.path(),
        &["build", "--family", "compact", "--n", "40", "--w", "3", "--format", "bristol", "--out", "c.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("c.bristol")).unwrap();
    assert!(bristol::lint(&text).is_empty());
}

#[test]
fn build_sort_and_json_summary() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["build", "--family", "sort", "--n", "256", "--K", "4", "--w", "8", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["family"], "sort");
    assert!(v["bool"].as_u64().unwrap() > 0);
    assert!(d.path().join("sort_n256_w8.json").exists());
}

#[test]
fn missing_parameter_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["build", "--family", "select", "--n", "10", "--w", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--m"), "{}", stderr(&o));
    let o = bin(d.path(), &["build", "--family", "sort", "--n", "10", "--w", "4", "--K", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_path_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["build", "--family", "compact", "--n", "8", "--w", "2", "--out", "no/such/dir/c.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("writing"), "{}", stderr(&o));
}

#[test]
fn selector_circuit_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let mut b = Builder::new();
    let c = b.input(1);
    let x = b.input(3);
    let y = b.input(3);
    let o = b.select(c.get(0), &x, &y);
    let circ = b.finish(vec![o]).unwrap();
    fs::write(d.path().join("sel.json"), opnet::to_string(&circ)).unwrap();
    fs::write(d.path().join("in.txt"), "1\n100\n011\n").unwrap();
    let r = bin(d.path(), &["eval", "--circuit", "sel.json", "--input", "in.txt", "--out", "out.txt"]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(fs::read_to_string(d.path().join("out.txt")).unwrap(), "011\n");
    fs::write(d.path().join("in.txt"), "0\n100\n011\n").unwrap();
    let r = bin(d.path(), &["eval", "--circuit", "sel.json", "--input", "in.txt"]);
    assert_eq!(stdout(&r), "100\n");
}

#[test]
fn eval_compact_matches_oracle() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["build", "--family", "compact", "--n", "6", "--w", "2", "--strategy", "base", "--out", "c.json"]);
    assert!(o.status.success());
    let flags = [false, true, false, true, true, false];
    let pay = [3u64, 1, 2, 0, 3, 1];
    let text: String = flags
        .iter()
        .zip(pay)
        .map(|(&f, p)| format!("{}{}{}\n", u8::from(f), p >> 1, p & 1))
        .collect();
    fs::write(d.path().join("in.txt"), text).unwrap();
    let r = bin(d.path(), &["eval", "--circuit", "c.json", "--input", "in.txt"]);
    assert!(r.status.success(), "{}", stderr(&r));
    let (of, op): (Vec<bool>, Vec<u64>) = stdout(&r)
        .lines()
        .map(|l| {
            let b: Vec<u64> = l.bytes().map(|c| u64::from(c - b'0')).collect();
            (b[0] == 1, b[1] << 1 | b[2])
        })
        .unzip();
    check_compact(&flags, &pay, &of, &op).unwrap();
}

#[test]
fn eval_reports_line_and_bundle() {
    let d = tempfile::tempdir().unwrap();
    bin(d.path(), &["build", "--family", "compact", "--n", "2", "--w", "2", "--strategy", "base", "--out", "c.json"]);
    fs::write(d.path().join("bad.txt"), "101\n1a1\n").unwrap();
    let r = bin(d.path(), &["eval", "--circuit", "c.json", "--input", "bad.txt"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("line 2"), "{}", stderr(&r));
    fs::write(d.path().join("short.txt"), "101\n11\n").unwrap();
    let r = bin(d.path(), &["eval", "--circuit", "c.json", "--input", "short.txt"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("bundle 1"), "{}", stderr(&r));
}

#[test]
fn verify_passes_built_families() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["verify", "--family", "compact", "--n", "256", "--w", "8", "--trials", "100"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("0 failures"));
    for m in ["1", "250", "500"] {
        let o = bin(d.path(), &["verify", "--family", "select", "--n", "500", "--w", "8", "--m", m, "--trials", "20", "--json"]);
        assert!(o.status.success(), "m={m}: {}", stdout(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["failures"], 0);
    }
}

#[test]
fn verify_detects_corrupted_file() {
    let d = tempfile::tempdir().unwrap();
    bin(d.path(), &["build", "--family", "compact", "--n", "10", "--w", "3", "--strategy", "base", "--out", "c.json"]);
    let o = bin(d.path(), &["verify", "--circuit", "c.json", "--trials", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));

    // swapped outputs still parse but compute the wrong thing
    let mut v: Value = serde_json::from_str(&fs::read_to_string(d.path().join("c.json")).unwrap()).unwrap();
    v["output_wires"].as_array_mut().unwrap().reverse();
    fs::write(d.path().join("bad.json"), v.to_string()).unwrap();
    let o = bin(d.path(), &["verify", "--circuit", "bad.json", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first counterexample"), "{}", stdout(&o));

    let text = fs::read_to_string(d.path().join("c.json")).unwrap();
    fs::write(d.path().join("cut.json"), &text[..text.len() / 2]).unwrap();
    let o = bin(d.path(), &["verify", "--circuit", "cut.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_tables() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["bench", "--family", "compact", "--w", "2", "--n-min", "4096", "--n-max", "4096", "--strategy", "auto"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let row = s.lines().nth(1).unwrap();
    assert!(row.starts_with("4096,tiny,"), "{s}");

    let o = bin(d.path(), &["bench", "--family", "compact", "--w", "4", "--n-min", "64", "--n-max", "32"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
    let o = bin(d.path(), &["bench", "--family", "compact", "--w", "4", "--n-min", "64", "--n-max", "32", "--json"]);
    assert_eq!(stdout(&o).trim(), "[]");

    let o = bin(d.path(), &["bench", "--family", "sort", "--w", "4", "--n-min", "32", "--n-max", "64", "--K", "2,4", "--json"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[2]["ratio_to_prev"].as_f64().unwrap() > 1.0);
}

#[test]
fn seed_comes_from_the_environment() {
    let d = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_compaction-forge"));
        cmd.args(["build", "--family", "lc0", "--n", "1024", "--w", "2", "--out", out]).current_dir(d.path());
        match seed {
            Some(s) => cmd.env("COMPACTION_FORGE_SEED", s),
            None => cmd.env_remove("COMPACTION_FORGE_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        fs::read_to_string(d.path().join(out)).unwrap()
    };
    let a = run(None, "a.json");
    let b = run(None, "b.json");
    assert_eq!(a, b);
    let c = run(Some("7"), "c.json");
    let v: Value = serde_json::from_str(&c).unwrap();
    assert!(v["meta"]["seed"].as_str().unwrap().parse::<u64>().unwrap() >= 7);
}
