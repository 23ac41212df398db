//! The exit code agrees with the verdict in the report, and certificates
//! in reports can be replayed with nothing but free reduction.

use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use rft_core::words::{Alphabet, GroupHom, Word};
use serde_json::Value;

const TOWERS: [&str; 9] = [
    "t0",
    "wedge2",
    "genus2host",
    "torus_wedge",
    "genus2_torus",
    "two_tori",
    "handle_then_torus",
    "surface_rank3",
    "forced_power",
];

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[String]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_rft")).args(args).current_dir(root()).output().expect("runs rft");
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("{args:?} exit {code}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (v, code)
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn parse(al: &Alphabet, s: &str) -> Word {
    if s.is_empty() || s == "1" {
        Word::empty()
    } else {
        al.parse(s).unwrap()
    }
}

fn expected_code(verdict: &str) -> i32 {
    match verdict {
        "verified" => 0,
        "refuted" => 2,
        "budget-limited" => 3,
        other => panic!("unknown verdict {other}"),
    }
}

fn command(tower: &str, op: usize, word: &str) -> Vec<String> {
    let file = format!("towers/{tower}.rft");
    let v: Vec<&str> = match op {
        0 => vec!["present", &file],
        1 => vec!["wp", &file, "--word", word],
        2 => vec!["witness", &file, "--words", word, "--budget", "4"],
        3 => vec!["core", &file, "--gens", word],
        _ => vec!["flats", &file, "--power-budget", "4"],
    };
    v.into_iter().map(String::from).collect()
}

fn top_generators(tower: &str) -> Vec<String> {
    let (v, _) = run(&command(tower, 0, ""));
    strs(&v["result"]["generators"])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn exit_code_matches_verdict(t in 0..TOWERS.len(), op in 0usize..5, picks in proptest::collection::vec((0usize..8, any::<bool>()), 1..4)) {
        let gens = top_generators(TOWERS[t]);
        let word = picks
            .iter()
            .map(|&(i, inv)| format!("{}{}", gens[i % gens.len()], if inv { "^-1" } else { "" }))
            .collect::<Vec<_>>()
            .join(" ");
        let (v, code) = run(&command(TOWERS[t], op, &word));
        prop_assert_eq!(code, expected_code(v["verdict"].as_str().unwrap()));
        prop_assert_eq!(v["exit_code"].as_i64(), Some(code as i64));
    }
}

#[test]
fn every_corpus_tower_reports_consistently() {
    for t in TOWERS {
        for op in [0, 4] {
            let (v, code) = run(&command(t, op, ""));
            assert_eq!(code, expected_code(v["verdict"].as_str().unwrap()), "{t} op {op}");
        }
    }
}

#[test]
fn witness_certificate_replays_by_free_reduction() {
    let (p, _) = run(&command("genus2host", 0, ""));
    let src = Alphabet::new(&strs(&p["result"]["generators"])).unwrap();
    let words = "a;b;t;[a,t];a t;t^2 b";
    let args: Vec<String> =
        ["witness", "towers/genus2host.rft", "--words", words, "--budget", "16", "--seed", "7"].map(String::from).into();
    let (v, code) = run(&args);
    assert_eq!(code, 0);
    let cert = &v["result"]["certificate"];
    let dst = Alphabet::new(&strs(&cert["target"])).unwrap();
    let mut images = vec![Word::empty(); src.len()];
    for e in cert["hom"].as_array().unwrap() {
        let g = src.index_of(e["generator"].as_str().unwrap()).unwrap();
        images[g] = parse(&dst, e["image"].as_str().unwrap());
    }
    let hom = GroupHom::new(images);
    for r in strs(&p["result"]["relators"]) {
        assert!(hom.apply(&parse(&src, &r)).unwrap().reduce().is_empty(), "relator {r} survives");
    }
    let mut seen: Vec<Word> = Vec::new();
    for w in words.split(';') {
        let img = hom.apply(&src.parse(w).unwrap()).unwrap().reduce();
        assert!(!img.is_empty(), "{w} dies");
        assert!(!seen.contains(&img), "{w} collides");
        seen.push(img);
    }
}

#[test]
fn embedding_certificate_matches_j() {
    let args: Vec<String> =
        ["embed", "towers/wedge2.rft", "--splitting", "towers/genus2_double.json", "--ball", "2"].map(String::from).into();
    let (v, code) = run(&args);
    assert_eq!(code, 0);
    let emb = &v["result"]["embedding"];
    let pairs = emb["j"].as_array().unwrap();
    let src = Alphabet::new(&pairs.iter().map(|p| p[0].as_str().unwrap()).collect::<Vec<_>>()).unwrap();
    let dst = Alphabet::new(&["a", "b", "t"]).unwrap();
    let j = GroupHom::new(pairs.iter().map(|p| parse(&dst, p[1].as_str().unwrap())).collect());
    let cert = &emb["certificate"];
    assert_eq!(cert["full"], Value::Bool(true));
    let entries = cert["entries"].as_array().unwrap();
    assert!(entries.len() > 1);
    for e in entries {
        let w = parse(&src, e["word"].as_str().unwrap());
        let img = parse(&dst, e["image"].as_str().unwrap());
        assert_eq!(j.apply(&w).unwrap().reduce(), img.reduce(), "{}", e["word"]);
    }
}
