//! Reports pinned byte for byte. Set `RFT_BLESS=1` to rewrite the golden
//! files after an intended change.

use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_rft")).args(args).current_dir(root()).output().expect("runs rft");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().expect("exit code"),
    )
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (out, err, c) = run(args);
    assert_eq!(c, code, "{name}: stderr {err}\n{out}");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("RFT_BLESS").is_some() {
        std::fs::write(&path, &out).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(out == want, "{name}: report differs from {}\n{out}", path.display());
}

#[test]
fn present_genus2host() {
    golden("present_genus2host", &["present", "towers/genus2host.rft"], 0);
}

#[test]
fn present_forced_power_is_refuted() {
    golden("present_forced_power", &["present", "towers/forced_power.rft"], 2);
}

#[test]
fn wp_relator() {
    golden("wp_relator", &["wp", "towers/genus2host.rft", "--word", "[[a,b],t]"], 0);
}

#[test]
fn wp_nontrivial() {
    golden("wp_commutator", &["wp", "towers/genus2host.rft", "--word", "[a,t]"], 0);
}

#[test]
fn witness_genus2host() {
    golden(
        "witness_genus2host",
        &["witness", "towers/genus2host.rft", "--words", "a;b;t;[a,t]", "--budget", "16", "--seed", "1"],
        0,
    );
}

#[test]
fn core_wedge2() {
    golden("core_wedge2", &["core", "towers/wedge2.rft", "--gens", "a^2;b;a b a^-1"], 0);
}

#[test]
fn embed_genus2_double() {
    golden(
        "embed_genus2_double",
        &["embed", "towers/wedge2.rft", "--splitting", "towers/genus2_double.json", "--ball", "2"],
        0,
    );
}

#[test]
fn flats_genus2host() {
    golden("flats_genus2host", &["flats", "towers/genus2host.rft", "--gens", "a;b;t a t^-1;t b t^-1"], 0);
}

#[test]
fn flats_two_tori_is_budget_limited() {
    golden("flats_two_tori", &["flats", "towers/two_tori.rft"], 3);
}

#[test]
fn selftest() {
    golden("selftest", &["selftest"], 0);
}

#[test]
fn usage_and_input_errors_exit_one() {
    for args in [
        vec!["wp", "towers/genus2host.rft"],
        vec!["nosuch"],
        vec!["wp", "towers/missing.rft", "--word", "a"],
        vec!["wp", "towers/genus2host.rft", "--word", "[a,z]"],
        vec!["core", "towers/wedge2.rft", "--gens", "a", "--require", "v99"],
        vec!["present", "towers/genus2host.rft", "--stage", "5"],
        vec!["embed", "towers/wedge2.rft", "--splitting", "towers/genus2host.rft"],
    ] {
        let (out, err, c) = run(&args);
        assert_eq!(c, 1, "{args:?}: {err}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
    let (_, err, c) = run(&["present", "Cargo.toml"]);
    assert_eq!(c, 1);
    assert!(err.contains("Cargo.toml:1:1"), "{err}");
}

#[test]
fn reports_are_byte_stable() {
    let args = ["witness", "towers/genus2host.rft", "--words", "a;b;t;[a,t];a t", "--budget", "8", "--seed", "3"];
    assert_eq!(run(&args), run(&args));
    let args = ["core", "towers/genus2host.rft", "--gens", "a;t b t^-1", "--depth", "1"];
    assert_eq!(run(&args), run(&args));
}
