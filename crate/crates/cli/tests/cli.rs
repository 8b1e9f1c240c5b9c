use std::process::Command;

use powsum_cli::{run, EXIT_CLEAN, EXIT_FOUND, EXIT_USAGE};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn powsum(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("powsum").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

#[test]
fn verify_theorem_sweep_is_clean() {
    let o = powsum(&["verify", "thm1.1", "--k", "1..40", "--n", "2..300", "--format", "json"]);
    assert_eq!(o.code, EXIT_CLEAN, "{}", o.err);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["total"], 40 * 299);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn not_applicable_is_visible_but_not_fatal() {
    let o = powsum(&["verify", "eq2.3", "--n", "4", "--verbose"]);
    assert_eq!(o.code, EXIT_CLEAN);
    assert!(o.out.starts_with("n/a  eq2.3 n=4 lhs=8 rhs=40 mod=64"), "{}", o.out);
    let quiet = powsum(&["verify", "eq2.3", "--n", "4"]);
    assert_eq!(quiet.out.lines().count(), 1);
}

#[test]
fn verify_csv_lists_rows_when_verbose() {
    let o = powsum(&["verify", "eq2.11", "--k", "2", "--p", "5", "--format", "csv", "--verbose"]);
    assert_eq!(o.code, EXIT_CLEAN);
    let lines: Vec<&str> = o.out.lines().collect();
    assert_eq!(lines[0], "checker,k,n,p,s,case,applicable,holds,lhs,rhs,modulus");
    assert_eq!(lines[1], "eq2.11,2,,5,,,true,true,50,50,625");
}

#[test]
fn wolstenholme_scan_reports_the_hit() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("w.ckpt");
    let o = powsum(&["scan", "wolstenholme", "--range", "2..20000", "--jobs", "8", "--checkpoint", ckpt.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.code, EXIT_FOUND, "{}", o.err);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    let hits: Vec<u64> = v["hits"].as_array().unwrap().iter().map(|h| h["n"].as_u64().unwrap()).collect();
    assert_eq!(hits, [16843]);
    assert!(o.err.contains("wall time"));
    assert!(!o.out.contains("wall"));
    assert!(ckpt.exists());
}

#[test]
fn clean_scan_exits_zero() {
    let o = powsum(&["scan", "conj2.14", "--range", "5..3000"]);
    assert_eq!(o.code, EXIT_CLEAN, "{}", o.err);
    assert!(o.out.starts_with("conj2.14 [5, 3000]: checked 749, skipped 2247, hits 0"), "{}", o.out);
}

#[test]
fn jobs_never_change_output() {
    let a = powsum(&["scan", "glm-half", "--range", "3..3000", "--jobs", "1", "--format", "csv"]);
    let b = powsum(&["scan", "glm-half", "--range", "3..3000", "--jobs", "4", "--format", "csv"]);
    assert_eq!(a.code, b.code);
    assert_eq!(a.out, b.out);
}

#[test]
fn resumed_scan_prints_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("h.ckpt");
    let c = ckpt.to_str().unwrap();
    let straight = powsum(&["scan", "half-n2", "--range", "2..5000", "--format", "json"]);
    let first = powsum(&["scan", "half-n2", "--range", "2..5000", "--format", "json", "--checkpoint", c, "--stop-after-blocks", "5"]);
    assert!(first.out.contains("\"complete\": false"));
    let resumed = powsum(&["scan", "half-n2", "--range", "2..5000", "--format", "json", "--checkpoint", c]);
    assert_eq!(resumed.out, straight.out);
    assert_eq!(resumed.code, EXIT_FOUND);

    let clash = powsum(&["scan", "half-n2", "--range", "2..6000", "--checkpoint", c]);
    assert_eq!(clash.code, EXIT_USAGE);
    assert!(clash.err.contains("refusing to resume"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "eq9.9", "--n", "3"][..],
        &["scan", "no-such", "--range", "2..10"],
        &["scan", "wolstenholme", "--range", "10..2"],
        &["scan", "wolstenholme", "--range", "a..b"],
        &["verify", "thm1.1", "--n", "3"],
        &["verify", "eq2.7", "--k", "2", "--p", "9"],
        &["classify", "12", "--format", "xml"],
        &["frobnicate"],
    ] {
        let o = powsum(args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}: {}", o.out);
        assert!(!o.err.is_empty());
    }
}

#[test]
fn composite_p_in_a_range_is_skipped() {
    let o = powsum(&["verify", "eq2.7", "--k", "2..3", "--p", "5..12"]);
    assert_eq!(o.code, EXIT_CLEAN);
    assert!(o.out.ends_with("eq2.7: 6 checks, 5 applicable, 5 hold, 1 not applicable, 0 failures\n"), "{}", o.out);
}

#[test]
fn classify_3737() {
    let o = powsum(&["classify", "3737"]);
    assert_eq!(o.code, EXIT_CLEAN);
    assert_eq!(
        o.out,
        "3737 = 37 * 101 (composite)\n  squarefree:       yes\n  carmichael:       no\n  giuga number:     no\n  S_(n-1)(n) ≡ -1:  no\n"
    );
    let j = powsum(&["classify", "561", "30", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&j.out).unwrap();
    assert_eq!(v[0]["is_carmichael"], true);
    assert_eq!(v[1]["is_giuga_number"], true);
}

#[test]
fn bernoulli_and_powersum() {
    let o = powsum(&["bernoulli", "0..4"]);
    assert_eq!(o.out, "B_0 = 1\nB_1 = -1/2\nB_2 = 1/6\nB_3 = 0\nB_4 = -1/30\n");
    let o = powsum(&["bernoulli", "2", "--mod", "5"]);
    assert_eq!(o.out, "B_2 = 1/6 ≡ 1 (mod 5)\n");
    assert_eq!(powsum(&["bernoulli", "2", "--mod", "6"]).code, EXIT_USAGE);
    let o = powsum(&["powersum", "--k", "5", "--n", "6"]);
    assert_eq!(o.out, "S_5(6) = 4425\n");
    let o = powsum(&["powersum", "--k", "4", "--n", "6", "--mod", "6", "--format", "csv"]);
    assert_eq!(o.out, "k,n,value,modulus\n4,6,1,6\n");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("powsum.toml");
    std::fs::write(&cfg, "format = \"json\"\njobs = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = powsum(&["--config", c, "powersum", "--k", "1", "--n", "4"]);
    assert!(o.out.trim_start().starts_with('['), "{}", o.out);
    let o = powsum(&["--config", c, "--format", "text", "powersum", "--k", "1", "--n", "4"]);
    assert_eq!(o.out, "S_1(4) = 6\n");
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(powsum(&["--config", c, "classify", "7"]).code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_powsum");
    let status = Command::new(bin).args(["classify", "3737"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CLEAN));
    let status = Command::new(bin).args(["scan", "half-n2", "--range", "3000..4000"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_FOUND));
    assert!(String::from_utf8_lossy(&status.stdout).contains("hit n=3737"));
    let status = Command::new(bin).args(["verify", "nope"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
}

#[test]
fn list_covers_every_id() {
    let o = powsum(&["list", "--format", "json"]);
    assert_eq!(o.code, EXIT_CLEAN);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    let entries = v.as_array().unwrap();
    let count = |kind: &str| entries.iter().filter(|e| e["kind"] == kind).count();
    assert_eq!((count("checker"), count("predicate")), (27, 12));
    for e in entries.iter().filter(|e| e["kind"] == "checker") {
        let id = e["id"].as_str().unwrap();
        let o = powsum(&["verify", id, "--format", "json"]);
        assert_eq!(o.code, EXIT_USAGE, "{id} without ranges should be a usage error");
    }
}
