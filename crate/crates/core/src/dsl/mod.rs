//! Text format for towers.
//!
//! ```text
//! tower genus2host {
//!   base { free(a, b) }
//!   block A { attach = "[a,b]"; rank = 2; letters = t }
//! }
//! ```
//!
//! Base summands are `free(..)`, `abelian(rank=N: ..)` and
//! `surface(genus=G: ..)`. Blocks are
//! `block A { attach = "w"; rank = M; letters = .. }`,
//! `block T { attach = ("w1", ..); rank = L; letters = .. }` and
//! `block Q { surface = (genus=G, punctures=P: ..); boundary = { b1 -> "w", .. };
//! retract = { x -> "w", .. }; letters = .. }`. A bare `assume` inside a
//! block accepts obligations that fail or run out of budget. Items may be
//! separated by `;`, and `#` starts a comment.

mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::tower::{AttachOptions, Block, Status, Summand, Tower, TowerError};
use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{at}block {block}: bad word \"{word}\": {source}")]
    Word { at: Pos, block: usize, word: String, source: WordError },
    #[error("{at}{source}")]
    Tower { at: Pos, source: TowerError },
}

/// Optional `line:col` prefix for errors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos(pub Option<(usize, usize)>);

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some((l, c)) => write!(f, "{l}:{c}: "),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SummandDecl {
    Free { gens: Vec<String> },
    Abelian { gens: Vec<String> },
    Surface { genus: usize, gens: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceDecl {
    pub genus: usize,
    pub punctures: usize,
    pub gens: Vec<String>,
}

/// Words are kept as written; they are read over the alphabet of the stage
/// the block attaches to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum BlockDecl {
    A { attach: String, rank: usize, letters: Vec<String>, assume: bool },
    T { attach: Vec<String>, rank: usize, letters: Vec<String>, assume: bool },
    Q {
        surface: SurfaceDecl,
        /// Images of the boundary circles `b1..bp`, in order.
        boundary: Vec<String>,
        retract: BTreeMap<String, String>,
        letters: Vec<String>,
        assume: bool,
    },
}

impl BlockDecl {
    pub fn assume(&self) -> bool {
        match self {
            BlockDecl::A { assume, .. } | BlockDecl::T { assume, .. } | BlockDecl::Q { assume, .. } => *assume,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerDocument {
    pub name: String,
    pub base: Vec<SummandDecl>,
    pub blocks: Vec<BlockDecl>,
}

/// Source positions of a block and of each word in it, keyed as in
/// [`BlockDecl`] (`attach`, `attach.1`, `b2`, `retract.x`).
#[derive(Clone, Debug, Default)]
pub(crate) struct BlockSpans {
    pub at: Option<(usize, usize)>,
    pub words: BTreeMap<String, (usize, usize)>,
}

impl BlockSpans {
    fn word(&self, key: &str) -> Pos {
        Pos(self.words.get(key).copied().or(self.at))
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Spans {
    pub base: Option<(usize, usize)>,
    pub blocks: Vec<BlockSpans>,
}

impl TowerDocument {
    pub fn parse(text: &str) -> Result<TowerDocument, DslError> {
        parser::parse(text).map(|(d, _)| d)
    }

    /// Builds the tower; errors point into the document text when the
    /// document was parsed from text.
    pub fn build(&self, budget: usize) -> Result<Tower, DslError> {
        self.build_at(budget, &Spans::default())
    }

    fn build_at(&self, budget: usize, spans: &Spans) -> Result<Tower, DslError> {
        let summands = self
            .base
            .iter()
            .map(|s| match s {
                SummandDecl::Free { gens } => Summand::Free { names: gens.clone() },
                SummandDecl::Abelian { gens } => Summand::Abelian { names: gens.clone() },
                SummandDecl::Surface { genus, gens } => Summand::Surface { genus: *genus, names: gens.clone() },
            })
            .collect();
        let mut t = Tower::new_height0(summands, budget)
            .map_err(|source| DslError::Tower { at: Pos(spans.base), source })?;
        let no_spans = BlockSpans::default();
        for (i, b) in self.blocks.iter().enumerate() {
            let sp = spans.blocks.get(i).unwrap_or(&no_spans);
            let word = |key: &str, text: &str| -> Result<Word, DslError> {
                t.alphabet()
                    .parse(text)
                    .map_err(|source| DslError::Word { at: sp.word(key), block: i, word: text.to_string(), source })
            };
            let block = match b {
                BlockDecl::A { attach, rank, letters, .. } => {
                    Block::A { attach: word("attach", attach)?, rank: *rank, letters: letters.clone() }
                }
                BlockDecl::T { attach, rank, letters, .. } => Block::T {
                    attach: attach
                        .iter()
                        .enumerate()
                        .map(|(k, w)| word(&format!("attach.{}", k + 1), w))
                        .collect::<Result<_, _>>()?,
                    rank: *rank,
                    letters: letters.clone(),
                },
                BlockDecl::Q { surface, boundary, retract, letters, .. } => {
                    let boundary = boundary
                        .iter()
                        .enumerate()
                        .map(|(k, w)| word(&format!("b{}", k + 1), w))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut images = Vec::new();
                    for g in surface.gens.iter().chain(letters) {
                        match retract.get(g) {
                            Some(w) => images.push(word(&format!("retract.{g}"), w)?),
                            None if letters.contains(g) => images.push(Word::empty()),
                            None => {
                                return Err(DslError::Tower {
                                    at: Pos(sp.at),
                                    source: TowerError::Block { block: i, msg: format!("retract has no image for {g}") },
                                })
                            }
                        }
                    }
                    if let Some(k) = retract.keys().find(|k| !surface.gens.contains(k) && !letters.contains(k)) {
                        return Err(DslError::Tower {
                            at: sp.word(&format!("retract.{k}")),
                            source: TowerError::Block {
                                block: i,
                                msg: format!("retract names {k}, which is not a surface generator or letter"),
                            },
                        });
                    }
                    Block::Q {
                        genus: surface.genus,
                        punctures: surface.punctures,
                        gens: surface.gens.clone(),
                        boundary,
                        retract: images,
                        letters: letters.clone(),
                    }
                }
            };
            let opts = AttachOptions { budget, assume: b.assume() };
            t = t
                .attach_block(block, &opts)
                .map_err(|source| DslError::Tower { at: Pos(sp.at), source })?;
        }
        Ok(t)
    }

    /// Document of an existing tower, with words in normal form and
    /// `assume` set on blocks whose obligations were not all verified.
    pub fn from_tower(name: &str, t: &Tower) -> TowerDocument {
        let base = t
            .summands()
            .iter()
            .map(|s| match s {
                Summand::Free { names } => SummandDecl::Free { gens: names.clone() },
                Summand::Abelian { names } => SummandDecl::Abelian { gens: names.clone() },
                Summand::Surface { genus, names } => SummandDecl::Surface { genus: *genus, gens: names.clone() },
            })
            .collect();
        let blocks = t
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let al = t.stage(i).expect("a stage below every block").alphabet();
                let fmt = |w: &Word| format_word(al, w);
                let assume = t.ledger().iter().any(|o| o.block == i && !matches!(o.status, Status::Verified(_)));
                match b {
                    Block::A { attach, rank, letters } => {
                        BlockDecl::A { attach: fmt(attach), rank: *rank, letters: letters.clone(), assume }
                    }
                    Block::T { attach, rank, letters } => BlockDecl::T {
                        attach: attach.iter().map(fmt).collect(),
                        rank: *rank,
                        letters: letters.clone(),
                        assume,
                    },
                    Block::Q { genus, punctures, gens, boundary, retract, letters } => BlockDecl::Q {
                        surface: SurfaceDecl { genus: *genus, punctures: *punctures, gens: gens.clone() },
                        boundary: boundary.iter().map(fmt).collect(),
                        retract: gens.iter().chain(letters).cloned().zip(retract.iter().map(fmt)).collect(),
                        letters: letters.clone(),
                        assume,
                    },
                }
            })
            .collect();
        TowerDocument { name: name.to_string(), base, blocks }
    }
}

fn format_word(al: &Alphabet, w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        al.format(w)
    }
}

/// Parses and builds in one step, with positions on every error.
pub fn parse_tower(text: &str, budget: usize) -> Result<(TowerDocument, Tower), DslError> {
    let (doc, spans) = parser::parse(text)?;
    let t = doc.build_at(budget, &spans)?;
    Ok((doc, t))
}

fn quote(w: &str) -> String {
    format!("\"{w}\"")
}

impl fmt::Display for TowerDocument {
    /// Canonical layout: one item per line, two-space indent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tower {} {{", self.name)?;
        writeln!(f, "  base {{")?;
        let summands: Vec<String> = self
            .base
            .iter()
            .map(|s| match s {
                SummandDecl::Free { gens } => format!("free({})", gens.join(", ")),
                SummandDecl::Abelian { gens } => format!("abelian(rank={}: {})", gens.len(), gens.join(", ")),
                SummandDecl::Surface { genus, gens } => format!("surface(genus={genus}: {})", gens.join(", ")),
            })
            .collect();
        writeln!(f, "    {}", summands.join(";\n    "))?;
        writeln!(f, "  }}")?;
        for b in &self.blocks {
            let mut items = Vec::new();
            let kind = match b {
                BlockDecl::A { attach, rank, letters, .. } => {
                    items.push(format!("attach = {}", quote(attach)));
                    items.push(format!("rank = {rank}"));
                    if !letters.is_empty() {
                        items.push(format!("letters = {}", letters.join(", ")));
                    }
                    "A"
                }
                BlockDecl::T { attach, rank, letters, .. } => {
                    let ws: Vec<String> = attach.iter().map(|w| quote(w)).collect();
                    items.push(format!("attach = ({})", ws.join(", ")));
                    items.push(format!("rank = {rank}"));
                    if !letters.is_empty() {
                        items.push(format!("letters = {}", letters.join(", ")));
                    }
                    "T"
                }
                BlockDecl::Q { surface, boundary, retract, letters, .. } => {
                    items.push(format!(
                        "surface = (genus={}, punctures={}: {})",
                        surface.genus,
                        surface.punctures,
                        surface.gens.join(", ")
                    ));
                    let bs: Vec<String> =
                        boundary.iter().enumerate().map(|(k, w)| format!("b{} -> {}", k + 1, quote(w))).collect();
                    items.push(format!("boundary = {{ {} }}", bs.join(", ")));
                    let order = surface.gens.iter().chain(letters);
                    let rs: Vec<String> = order
                        .filter_map(|g| retract.get(g).map(|w| format!("{g} -> {}", quote(w))))
                        .collect();
                    items.push(format!("retract = {{ {} }}", rs.join(", ")));
                    if !letters.is_empty() {
                        items.push(format!("letters = {}", letters.join(", ")));
                    }
                    "Q"
                }
            };
            if b.assume() {
                items.push("assume".into());
            }
            writeln!(f, "  block {kind} {{")?;
            writeln!(f, "    {}", items.join(";\n    "))?;
            writeln!(f, "  }}")?;
        }
        writeln!(f, "}}")
    }
}
