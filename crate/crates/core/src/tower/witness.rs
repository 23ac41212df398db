//! Witness homomorphisms to free groups that are injective on a finite set.

use std::collections::HashMap;

use serde::Serialize;

use crate::graphgroups::{Presentation, Verdict};
use crate::words::{Alphabet, GroupHom, Word};

use super::{Stage, Tower};

/// Failed attempts kept in a certificate's trace.
const TRACE_LIMIT: usize = 64;
/// Parameter vectors tried before giving up, whatever the budget.
const MAX_ATTEMPTS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub params: Vec<i64>,
    /// Two words of the set with equal images, the second possibly `1`.
    pub collision: (String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorImage {
    pub generator: String,
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub word: String,
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCertificate {
    pub valid: bool,
    pub seed: u64,
    pub budget: usize,
    /// Generators of the free target group.
    pub target: Vec<String>,
    pub params: Vec<i64>,
    pub hom: Vec<GeneratorImage>,
    pub table: Vec<TableRow>,
    /// Pairs of words with equal images, proven equal by the word problem.
    pub identified: Vec<(usize, usize)>,
    /// Words with trivial image, proven trivial by the word problem.
    pub trivial: Vec<usize>,
    pub attempts: usize,
    pub trace: Vec<Attempt>,
}

impl WitnessCertificate {
    /// The certified homomorphism, as images over the target alphabet.
    pub fn hom_over(&self, target: &Alphabet) -> Result<GroupHom, String> {
        let imgs = self
            .hom
            .iter()
            .map(|g| target.parse(&g.image).map(|w| w.reduce()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        Ok(GroupHom::new(imgs))
    }
}

enum Outcome {
    Valid { identified: Vec<(usize, usize)>, trivial: Vec<usize> },
    Collision(usize, Option<usize>),
}

impl Tower {
    /// Searches the witness family in parameter order for a homomorphism
    /// injective on `words`.
    pub fn find_rf_witness(&self, words: &[Word], budget: usize, seed: u64) -> WitnessCertificate {
        let stage = self.top();
        let al = stage.alphabet();
        let target = stage.target_alphabet();
        let mut equal_cache: HashMap<(usize, Option<usize>), Verdict> = HashMap::new();
        let mut trace = Vec::new();
        let mut attempts = 0;
        let fmt = |i: Option<usize>| i.map_or_else(|| "1".to_string(), |i| al.format(&words[i]));
        for params in Stage::parameter_order(stage.family_dim(), budget as i64).take(MAX_ATTEMPTS) {
            attempts += 1;
            let h = stage.family_hom(&params, seed);
            let images: Vec<Word> =
                words.iter().map(|w| h.apply(w).expect("word over tower alphabet")).collect();
            match judge(stage, words, &images, budget, &mut equal_cache) {
                Outcome::Valid { identified, trivial } => {
                    return WitnessCertificate {
                        valid: true,
                        seed,
                        budget,
                        target: target.names().to_vec(),
                        params,
                        hom: (0..al.len())
                            .map(|g| GeneratorImage {
                                generator: al.name(g).to_string(),
                                image: target.format(h.image(g)),
                            })
                            .collect(),
                        table: words
                            .iter()
                            .zip(&images)
                            .map(|(w, x)| TableRow { word: al.format(w), image: target.format(x) })
                            .collect(),
                        identified,
                        trivial,
                        attempts,
                        trace,
                    };
                }
                Outcome::Collision(i, j) => {
                    if trace.len() < TRACE_LIMIT {
                        trace.push(Attempt { params, collision: (fmt(Some(i)), fmt(j)) });
                    }
                }
            }
        }
        WitnessCertificate {
            valid: false,
            seed,
            budget,
            target: target.names().to_vec(),
            params: Vec::new(),
            hom: Vec::new(),
            table: Vec::new(),
            identified: Vec::new(),
            trivial: Vec::new(),
            attempts,
            trace,
        }
    }
}

/// Accepts when every coincidence of images is an equality in the tower.
fn judge(
    stage: &Stage,
    words: &[Word],
    images: &[Word],
    budget: usize,
    cache: &mut HashMap<(usize, Option<usize>), Verdict>,
) -> Outcome {
    let mut identified = Vec::new();
    let mut trivial = Vec::new();
    let mut first: HashMap<&Word, usize> = HashMap::new();
    for (i, x) in images.iter().enumerate() {
        let other = if x.is_empty() { Some(None) } else { first.get(x).map(|&j| Some(j)) };
        if let Some(j) = other {
            let v = *cache.entry((i, j)).or_insert_with(|| {
                let rhs = j.map_or_else(Word::empty, |j| words[j].clone());
                stage.word_problem(&words[i].mul(&rhs.inverse()), budget)
            });
            if v != Verdict::Trivial {
                return Outcome::Collision(i, j);
            }
            match j {
                Some(j) => identified.push((j, i)),
                None => trivial.push(i),
            }
        }
        first.entry(x).or_insert(i);
    }
    Outcome::Valid { identified, trivial }
}

/// Re-checks a certificate with word reduction alone: the map kills every
/// relator, and images are distinct and nontrivial except for the pairs and
/// words the certificate lists as proven equal or trivial.
pub fn recheck_certificate(cert: &WitnessCertificate, presentation: &Presentation) -> Result<(), String> {
    if !cert.valid {
        return Err("certificate is not marked valid".into());
    }
    let target = Alphabet::new(&cert.target).map_err(|e| e.to_string())?;
    let h = cert.hom_over(&target)?;
    let al = &presentation.alphabet;
    if h.source_rank() != al.len() {
        return Err("hom does not cover every generator".into());
    }
    for r in &presentation.relators {
        if !h.apply(r).map_err(|e| e.to_string())?.is_empty() {
            return Err(format!("relator {} does not map to 1", al.format(r)));
        }
    }
    let mut images = Vec::new();
    for row in &cert.table {
        let w = al.parse(&row.word).map_err(|e| e.to_string())?;
        let x = h.apply(&w).map_err(|e| e.to_string())?;
        if target.format(&x) != row.image {
            return Err(format!("image of {} is {}, table says {}", row.word, target.format(&x), row.image));
        }
        images.push(x);
    }
    let mut first: HashMap<&Word, usize> = HashMap::new();
    for (i, x) in images.iter().enumerate() {
        if x.is_empty() && !cert.trivial.contains(&i) {
            return Err(format!("{} maps to 1", cert.table[i].word));
        }
        if let Some(&j) = first.get(x) {
            if !x.is_empty() && !cert.identified.contains(&(j, i)) {
                return Err(format!("{} and {} collide", cert.table[j].word, cert.table[i].word));
            }
        }
        first.entry(x).or_insert(i);
    }
    Ok(())
}
