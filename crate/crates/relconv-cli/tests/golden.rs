//! Golden-file tests for the `relconv` binary: exact stdout, stderr
//! fragments, and exit codes for each subcommand, plus round-trip
//! stability of the definition format.

use std::process::Command;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_relconv"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
        out.status.code().expect("exit code"),
    )
}

const ALL_AXIOMS_PASS: &str = "\
A.1: PASS
A.2: PASS
A.3: PASS
A.4: PASS
A.5: PASS
A.6-i: PASS
A.6-ii: PASS
A.6-iii: PASS
";

#[test]
fn check_passes_on_the_strong_file() {
    let (stdout, _, code) = run(&["check", &fixture("z4z2-strong.json")]);
    assert_eq!(stdout, ALL_AXIOMS_PASS);
    assert_eq!(code, 0);
}

#[test]
fn check_reports_a_witness_on_the_broken_file() {
    let (stdout, _, code) = run(&["check", &fixture("z4z2-broken.json")]);
    assert_eq!(code, 1);
    assert!(stdout.contains("A.6-ii: FAIL"), "{stdout}");
    assert!(stdout.contains("(0,0,0)"), "{stdout}");
}

#[test]
fn malformed_fractions_exit_two() {
    let (_, stderr, code) = run(&["check", &fixture("badfrac.json")]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bad fraction `1/0`"), "{stderr}");
}

#[test]
fn missing_files_and_missing_arguments_exit_two() {
    let (_, _, code) = run(&["check", "/nonexistent/definitely-missing.json"]);
    assert_eq!(code, 2);
    let (_, _, code) = run(&["check"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_passes_everything_on_the_strong_file() {
    let expected = "\
axioms: PASS
constraint-set: PASS
quotient: PASS
haar-pushforward-agreement: PASS
haar-quotient-right-haar: PASS
haar-disintegration: PASS
l2-invariant: PASS
split: PASS
strongly-split: PASS
associativity: PASS
quotient-associativity: PASS
l2-conv-lemma: PASS
vanishing-ideal: PASS
reduction-theorem: PASS
fiber-partition: PASS
fiber-translation: PASS
fiber-left-translation: PASS
action-composition: PASS
convolution-support: PASS
";
    let (stdout, _, code) = run(&["verify", &fixture("z4z2-strong.json")]);
    assert_eq!(stdout, expected);
    assert_eq!(code, 0);
}

#[test]
fn verify_reports_expected_findings_on_the_dirac_file() {
    let expected = "\
axioms: PASS
constraint-set: PASS
quotient: PASS
haar-pushforward-agreement: PASS
haar-quotient-right-haar: PASS
haar-disintegration: PASS
l2-invariant: FAIL (classification; measures differ at 0,2)
split: PASS
strongly-split: FAIL (classification; marginals of 0 and 1 differ on class [0])
associativity: FAIL (expected; witness 0,0,1)
quotient-associativity: PASS
l2-conv-lemma: PASS
vanishing-ideal: PASS
reduction-theorem: PASS
fiber-partition: PASS
fiber-translation: PASS
fiber-left-translation: PASS
action-composition: PASS
convolution-support: PASS
";
    let (stdout, _, code) = run(&["verify", &fixture("z4z2-dirac.json")]);
    assert_eq!(stdout, expected);
    assert_eq!(code, 0, "expected findings must not fail the run");
}

#[test]
fn convolve_prints_exact_fractions() {
    let file = fixture("z4z2-strong.json");
    let (stdout, _, code) = run(&["convolve", &file, "--f", "d0", "--g", "d0"]);
    assert_eq!(stdout, "0: 1/8, 2: 1/8\n");
    assert_eq!(code, 0);

    let (stdout, _, code) = run(&["convolve", &file, "--f", "zero", "--g", "d1"]);
    assert_eq!(stdout, "0\n");
    assert_eq!(code, 0);

    let (_, stderr, code) = run(&["convolve", &file, "--f", "nope", "--g", "d0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown function `nope`"), "{stderr}");
}

#[test]
fn assoc_separates_the_two_systems() {
    let (stdout, _, code) = run(&["assoc", &fixture("z4z2-strong.json")]);
    assert_eq!(stdout, "associative\n");
    assert_eq!(code, 0);

    let (stdout, _, code) = run(&["assoc", &fixture("z4z2-dirac.json")]);
    assert_eq!(stdout, "witness: 0,0,1\n");
    assert_eq!(code, 1);
}

#[test]
fn reduce_prints_the_quotient_table() {
    let expected = "\
classes:
  [0] = {0, 2}  source [0]  target [0]
  [1] = {1, 3}  source [0]  target [0]
objects: [0]
mult:
  [0] * [0] = [0]
  [0] * [1] = [1]
  [1] * [0] = [1]
  [1] * [1] = [0]
";
    let (stdout, _, code) = run(&["reduce", &fixture("z4z2-strong.json")]);
    assert_eq!(stdout, expected);
    assert_eq!(code, 0);
}

#[test]
fn norm_prints_twelve_significant_digits_trimmed() {
    let (stdout, _, code) = run(&["norm", &fixture("z2-half.json"), "--f", "dbar0"]);
    assert_eq!(stdout, "0.5\n");
    assert_eq!(code, 0);
}

#[test]
fn json_reports_are_stable_across_runs() {
    for args in [
        vec!["verify", &*fixture("z4z2-dirac.json"), "--format", "json"],
        vec!["check", &*fixture("z4z2-strong.json"), "--format", "json"],
        vec!["reduce", &*fixture("z4z2-strong.json"), "--format", "json"],
    ] {
        let (first, _, _) = run(&args);
        let (second, _, _) = run(&args);
        assert_eq!(first, second, "unstable output for {args:?}");
        let parsed: serde_json::Value = serde_json::from_str(&first).expect("valid json");
        assert!(parsed.get("command").is_some());
    }
}

#[test]
fn fixtures_are_in_canonical_form_and_round_trip() {
    for name in ["z4z2-strong.json", "z4z2-dirac.json", "z2-half.json", "z4z2-broken.json"] {
        let text = std::fs::read_to_string(fixture(name)).expect("fixture readable");
        let once = relconv_cli::schema::canonical(&text).expect("fixtures parse");
        assert_eq!(once, text, "{name} is not canonical");
        let twice = relconv_cli::schema::canonical(&once).expect("canonical output parses");
        assert_eq!(once, twice, "canonicalization must be idempotent on {name}");
    }
}
