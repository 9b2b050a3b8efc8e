use std::path::Path;
use std::process::{Command, Output, Stdio};

use quadgenus::rng_stream;
use quadgenus::sampling::sample_wl_gtree_exact;
use quadgenus::scheme::{decompose, is_dominant};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn quadgenus(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadgenus")).args(args).current_dir(dir).output().unwrap()
}

fn with_stdin(args: &[&str], dir: &Path, input: &[u8]) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_quadgenus"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sampling_is_deterministic_and_digested() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sample", "--genus", "1", "--size", "50", "--seed", "11", "--count", "8"];
    for out in ["a.jsonl", "b.jsonl"] {
        let o = quadgenus(&[&args[..], &["--out", out]].concat(), dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.jsonl")).unwrap());
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 8);
    let m = manifest(&dir.path().join("a.jsonl.manifest.json"));
    assert_eq!(m["outputs"][0]["sha256"], hex::encode(Sha256::digest(&a)));
    assert_eq!(m["rng_algorithm"], quadgenus::RNG_ALGORITHM);
    assert_eq!(m["seed"], 11);
    assert_eq!(m["exit_code"], 0);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_quadgenus"))
            .args(["sample", "--genus", "2", "--size", "200", "--seed", "5", "--count", "6", "--kind", "quad"])
            .env("QUADGENUS_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success());
        let m: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(m["threads"], threads.parse::<u64>().unwrap());
        o.stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn cms_conversion_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(quadgenus(&["sample", "--genus", "1", "--size", "30", "--seed", "2", "--count", "5", "--out", "tree.json"], d)
        .status
        .success());
    let before = std::fs::read(d.join("tree.json")).unwrap();
    for eps in ["+1", "-1"] {
        let o = quadgenus(&["convert", "--via", "cms", "--epsilon", eps, "--input", "tree.json", "--out", "q.json"], d);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let o = quadgenus(&["convert", "--via", "cms", "--inverse", "--input", "q.json", "--out", "back.json"], d);
        assert!(o.status.success());
        assert_eq!(std::fs::read(d.join("back.json")).unwrap(), before);
    }
    assert_eq!(std::fs::read(d.join("tree.json")).unwrap(), before);
}

#[test]
fn decomposition_and_opening_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_stream(3, 0);
    let mut trees = String::new();
    while trees.lines().count() < 4 {
        let t = sample_wl_gtree_exact(2, 150, &mut rng).unwrap();
        if is_dominant(&decompose(&t.tree).unwrap().scheme) {
            trees.push_str(&serde_json::to_string(&t.to_json()).unwrap());
            trees.push('\n');
        }
    }
    for via in ["decomposition", "chapuy"] {
        let o = with_stdin(&["convert", "--via", via], dir.path(), trees.as_bytes());
        assert!(o.status.success(), "{via}: {}", String::from_utf8_lossy(&o.stderr));
        let back = with_stdin(&["convert", "--via", via, "--inverse"], dir.path(), &o.stdout);
        assert!(back.status.success());
        assert_eq!(String::from_utf8(back.stdout).unwrap(), trees, "{via}");
    }
}

#[test]
fn verify_suites_pass_on_small_trees() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["roundtrip", "euler", "bound", "labels", "chapuy"] {
        for g in ["0", "1"] {
            let o = quadgenus(&["verify", "--suite", suite, "--genus", g, "--max-n", "4"], dir.path());
            assert_eq!(o.status.code(), Some(0), "{suite} g={g}");
            let s: Value = serde_json::from_slice(&o.stdout).unwrap();
            assert_eq!(s["violations"], 0);
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad_json = with_stdin(&["convert", "--via", "cms"], d, b"{not json}\n");
    assert_eq!(bad_json.status.code(), Some(2));
    let bad_word = with_stdin(&["convert", "--via", "cms"], d, b"{\"word\":[1,0],\"labels\":[0]}\n");
    assert_eq!(bad_word.status.code(), Some(2));
    let bad_eps = quadgenus(&["convert", "--via", "cms", "--epsilon", "2", "--input", "missing.json"], d);
    assert_eq!(bad_eps.status.code(), Some(2));
    let too_small = quadgenus(&["sample", "--genus", "2", "--size", "3"], d);
    assert_eq!(too_small.status.code(), Some(2));
    let too_large = quadgenus(&["sample", "--genus", "1", "--size", "5000", "--mode", "exact"], d);
    assert_eq!(too_large.status.code(), Some(3));
    let guard = quadgenus(&["verify", "--suite", "bound", "--genus", "1", "--max-n", "12"], d);
    assert_eq!(guard.status.code(), Some(3));
    let m: Value = serde_json::from_slice(&guard.stderr[guard.stderr.iter().position(|&b| b == b'{').unwrap()..]).unwrap();
    assert_eq!(m["exit_code"], 3);
    let unknown = quadgenus(&["sample", "--genus", "x"], d);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn experiments_write_csv_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // The ball-volume window needs at least two radii, hence larger maps.
    for (kind, sizes, header) in [
        ("scaling", "256,1024", "genus,n,rep,rescaled_mean_distance"),
        ("dimension", "65536", "genus,n,rep,radius,mean_volume"),
        ("twopoint", "256,1024", "genus,n,rep,pair,rescaled_distance"),
    ] {
        let common = ["--genus", "1", "--sizes", sizes, "--reps", "6", "--seed", "7"];
        let out = format!("{kind}.csv");
        let o = quadgenus(&[&["experiment", kind][..], &common, &["--out", &out]].concat(), d);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(d.join(&out)).unwrap();
        assert_eq!(csv.lines().next(), Some(header));
        assert!(csv.lines().count() > 6);
        let again = quadgenus(&[&["experiment", kind][..], &common].concat(), d);
        assert_eq!(again.stdout, csv.as_bytes());
        let m = manifest(&d.join(format!("{out}.manifest.json")));
        assert_eq!(m["command"], "experiment");
        if kind == "scaling" {
            assert!(m["summary"]["exponent"].as_f64().unwrap() > 0.0);
            assert_eq!(m["summary"]["interval"].as_array().unwrap().len(), 2);
        }
    }
}

#[test]
fn enumeration_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let count = |kind: &str, g: &str, n: &str| {
        let o = quadgenus(&["enumerate", "--kind", kind, "--genus", g, "--size", n], dir.path());
        assert!(o.status.success());
        o.stdout.iter().filter(|&&b| b == b'\n').count()
    };
    assert_eq!(count("gtrees", "1", "2"), 1);
    assert_eq!(count("gtrees", "0", "3"), 5);
    let labelled = quadgenus::enumerate::enumerate_labeled_gtrees(1, 3).unwrap().len();
    assert_eq!(count("labelled", "1", "3"), labelled);
    assert_eq!(count("quadrangulations", "1", "3"), 2 * labelled);
}
