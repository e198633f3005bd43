//! End-to-end tests against the built binary. Fixed machines and words pin
//! the output byte for byte; exit codes follow 0 accept, 1 reject, 2 usage.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clearjump::{parse_machine, GnfGrammar, MachineFile, ReductionArtifacts};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clearjump"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).expect("fixture written");
    path.to_str().expect("utf8 path").to_owned()
}

const M1: &str = "gjfa\nalphabet: a b\nstates: s f\nstart: s\nfinal: f\nrule: s f a b\n";
const TOY_UNIVERSAL: &str =
    "gjfa\nalphabet: a b\nstates: s\nstart: s\nfinal: s\nrule: s s a\nrule: s s b\n";
const G_AB: &str =
    "gnf\nterminals: a b\nnonterminals: S B\nstart: S\nrule: S -> a B\nrule: B -> b\n";

#[test]
fn member_accepts_with_a_replayable_trace() {
    let out = run(&["member", "builtin:R01", "100110", "--trace"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "ACCEPT\n1 0 0 0  [3b @ 4]\n0 0  [1a @ 1]\n_  [0a @ 1]\n"
    );
}

#[test]
fn member_accepts_the_empty_word_token() {
    let out = run(&["member", "builtin:R01", "_"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "ACCEPT\n");
}

#[test]
fn member_rejects_with_exit_one() {
    let out = run(&["member", "builtin:R01", "0011"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "REJECT\n");
}

#[test]
fn member_reports_unknown_symbols_as_usage_errors() {
    let out = run(&["member", "builtin:R01", "102"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout(&out), "");
    assert!(stderr(&out).contains("symbol 2"));
}

#[test]
fn word_tokens_split_into_single_characters_either_way() {
    let joined = run(&["member", "builtin:R01", "100110"]);
    let spaced = run(&["member", "builtin:R01", "1", "0", "0", "1", "1", "0"]);
    assert_eq!(code(&joined), 0);
    assert_eq!(stdout(&joined), stdout(&spaced));
}

#[test]
fn member_walks_growing_systems_from_the_empty_word() {
    let out = run(&["member", "builtin:RuV", "uu", "--trace"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "ACCEPT\nu u  [0 @ 1]\n");
    let out = run(&["member", "builtin:RuV", "u", "V"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn generate_lists_shortlex() {
    let out = run(&["generate", "builtin:R01", "--maxlen", "6"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "_\n0 0\n1 0 0 0\n0 0 1 0 0 0\n1 0 0 1 1 0\n");
}

#[test]
fn generate_filter_k_screens_forbidden_factors() {
    let out = run(&["generate", "builtin:R01", "--maxlen", "6", "--filter", "K"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "_\n0 0\n1 0 0 1 1 0\n");
}

#[test]
fn generate_filter_k_needs_a_binary_alphabet() {
    let out = run(&["generate", "builtin:RuV", "--maxlen", "4", "--filter", "K"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("binary"));
}

#[test]
fn generate_walks_growing_systems_forward() {
    let out = run(&["generate", "builtin:RuV", "--maxlen", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "_\nu u\nu u V u\n");
}

#[test]
fn generate_enumerates_machine_files() {
    let dir = TempDir::new().expect("tempdir");
    let m1 = write(dir.path(), "m1.gjfa", M1);
    let out = run(&["generate", &m1, "--maxlen", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "a b\n");
}

#[test]
fn refute_finds_the_least_rejected_word() {
    let dir = TempDir::new().expect("tempdir");
    let m1 = write(dir.path(), "m1.gjfa", M1);
    let out = run(&["refute", &m1, "--maxlen", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "_\n");
}

#[test]
fn refute_reports_none_for_universal_machines() {
    let dir = TempDir::new().expect("tempdir");
    let toy = write(dir.path(), "toy.gjfa", TOY_UNIVERSAL);
    let out = run(&["refute", &toy, "--maxlen", "3"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "NONE-UP-TO 3\n");
}

#[test]
fn refute_requires_a_jumping_machine() {
    let out = run(&["refute", "builtin:R01", "--maxlen", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("gjfa"));
}

#[test]
fn grammar_membership_prints_the_derivation() {
    let dir = TempDir::new().expect("tempdir");
    let gab = write(dir.path(), "gab.gnf", G_AB);
    let out = run(&["member", &gab, "ab", "--trace"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "ACCEPT\na B  [0 @ 1]\na b  [1 @ 2]\n");
    let out = run(&["member", &gab, "ba"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "REJECT\n");
}

#[test]
fn reduce_writes_files_that_round_trip() {
    let dir = TempDir::new().expect("tempdir");
    let gab = write(dir.path(), "gab.gnf", G_AB);
    let prefix = dir.path().join("red");
    let out = run(&["reduce", &gab, "--out", prefix.to_str().expect("utf8")]);
    assert_eq!(code(&out), 0);

    let machine_text = fs::read_to_string(prefix.with_extension("gjfa")).expect("machine file");
    let MachineFile::Gjfa(written) = parse_machine(&machine_text).expect("parses") else {
        panic!("reduce wrote a non-gjfa machine");
    };
    let grammar = GnfGrammar::parse(G_AB).expect("fixture grammar");
    let arts = ReductionArtifacts::build(&grammar).expect("reduction");
    assert_eq!(&written, arts.machine());

    let sets = fs::read_to_string(prefix.with_extension("sets")).expect("sets file");
    assert!(sets.contains("t: S ^S B ^B\n"));
    assert!(sets.lines().any(|l| l.starts_with("p_bu: ")));
}

#[test]
fn reduce_rejects_malformed_grammars() {
    let dir = TempDir::new().expect("tempdir");
    let bad = write(
        dir.path(),
        "bad.gnf",
        "gnf\nterminals: a b\nnonterminals: S B\nstart: S\nrule: S -> B a\n",
    );
    let out = run(&["reduce", &bad, "--out", dir.path().join("x").to_str().expect("utf8")]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("rule 0"));
}

// The machine built from G_ab rejects the gap-free encoding of aa but
// accepts the marker-annotated derivation word of ab.
#[test]
fn reduced_machine_judges_encodings_and_derivation_words() {
    let dir = TempDir::new().expect("tempdir");
    let gab = write(dir.path(), "gab.gnf", G_AB);
    let prefix = dir.path().join("red");
    run(&["reduce", &gab, "--out", prefix.to_str().expect("utf8")]);
    let machine = prefix.with_extension("gjfa");
    let machine = machine.to_str().expect("utf8");

    let interleaved_aa = ["a", "S", "^S", "B", "^B", "a", "S", "^S", "B", "^B"];
    let mut args = vec!["member", machine];
    args.extend(interleaved_aa);
    let out = run(&args);
    assert_eq!(code(&out), 1);

    let derivation_word = ["S", "^S", "a", "B", "^B", "b"];
    let mut args = vec!["member", machine];
    args.extend(derivation_word);
    let out = run(&args);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_suite_reports_pass_lines() {
    let out = run(&["verify", "--suite", "lemma6"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "PASS lemma6.chain-a1-b1");
    assert!(lines[9].starts_with("# lemma6: 9/9 passed"));
}

#[test]
fn verify_rejects_unknown_suites() {
    let out = run(&["verify", "--suite", "nosuch"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("gjfa-cross"));
}

#[test]
fn verify_needs_a_suite_or_all() {
    let out = run(&["verify"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_cross_suite_is_deterministic_per_seed() {
    let first = run(&["verify", "--suite", "gjfa-cross", "--seed", "7"]);
    let second = run(&["verify", "--suite", "gjfa-cross", "--seed", "7"]);
    assert_eq!(code(&first), 0);
    let stable = |out: &Output| -> Vec<String> {
        stdout(out)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(str::to_owned)
            .collect()
    };
    assert_eq!(stable(&first), stable(&second));
}

#[test]
fn phi_prints_image_screen_and_potential() {
    let out = run(&["phi", "0100"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "phi: u V u u\nin_k: false\npotential: 8\n");
    let out = run(&["phi", "_"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "phi: _\nin_k: true\npotential: 0\n");
}
