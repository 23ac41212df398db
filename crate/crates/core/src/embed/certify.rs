//! Finite-ball evidence that `j` is injective.

use serde::Serialize;

use super::EmbeddingResult;
use crate::graphgroups::{GraphOfGroups, Verdict};
use crate::words::{enumerate_ball, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    /// Trivial in the source, nothing to check.
    SourceTrivial,
    /// The word problem of the tower decided the image nontrivial.
    WordProblem,
    /// A witness homomorphism to a free group sends the image to a nontrivial word.
    Witness,
    /// The image is trivial: `j` has this element in its kernel.
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallEntry {
    pub word: String,
    pub image: String,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityCertificate {
    pub radius: usize,
    /// No refutation and no undecided element.
    pub full: bool,
    pub nontrivial: usize,
    pub refutations: Vec<String>,
    pub unknown: Vec<String>,
    pub entries: Vec<BallEntry>,
}

/// Checks every element of the radius-`radius` ball of `source` that is
/// nontrivial there for a nontrivial image under `r.j`.
pub fn certify_injectivity_on_ball(
    r: &EmbeddingResult,
    source: &GraphOfGroups,
    radius: usize,
    budget: usize,
) -> InjectivityCertificate {
    let src = source.alphabet();
    let al = r.tower.alphabet();
    let mut entries = Vec::new();
    let mut pending: Vec<(usize, Word)> = Vec::new();
    for w in enumerate_ball(src.len(), radius) {
        let img = r.j.apply(&w).expect("ball word over source alphabet");
        let evidence = match source.word_problem(&w, budget) {
            Ok(Verdict::Trivial) => Evidence::SourceTrivial,
            Ok(Verdict::Nontrivial) => match r.tower.word_problem(&img, budget) {
                Ok(Verdict::Nontrivial) => Evidence::WordProblem,
                Ok(Verdict::Trivial) => Evidence::Refuted,
                _ => {
                    pending.push((entries.len(), img.clone()));
                    Evidence::Unknown
                }
            },
            _ => Evidence::Unknown,
        };
        entries.push(BallEntry { word: src.format(&w), image: al.format(&img), evidence });
    }
    if !pending.is_empty() {
        let words: Vec<Word> = pending.iter().map(|(_, w)| w.clone()).collect();
        let cert = r.tower.find_rf_witness(&words, budget, 0);
        if cert.valid {
            for ((i, _), row) in pending.iter().zip(&cert.table) {
                if !row.image.is_empty() {
                    entries[*i].evidence = Evidence::Witness;
                }
            }
        }
    }
    let pick = |e: Evidence| -> Vec<String> {
        entries.iter().filter(|x| x.evidence == e).map(|x| x.word.clone()).collect()
    };
    let refutations = pick(Evidence::Refuted);
    let unknown = pick(Evidence::Unknown);
    let nontrivial = entries
        .iter()
        .filter(|x| matches!(x.evidence, Evidence::WordProblem | Evidence::Witness))
        .count();
    InjectivityCertificate {
        radius,
        full: refutations.is_empty() && unknown.is_empty(),
        nontrivial,
        refutations,
        unknown,
        entries,
    }
}
