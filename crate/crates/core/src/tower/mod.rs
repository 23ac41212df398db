//! Towers built from a wedge of circles, tori and closed surfaces by
//! attaching abelian (A), quadratic (Q) and torus (T) blocks.

pub(crate) mod checks;
mod stage;
mod witness;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graphgroups::{GraphError, Presentation, Verdict};
use crate::words::{Alphabet, GroupHom, Word, WordError};

pub use stage::Stage;
pub use witness::{recheck_certificate, Attempt, WitnessCertificate};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("a tower needs at least one base summand")]
    EmptyBase,
    #[error("bad summand: {0}")]
    Summand(String),
    #[error("malformed block {block}: {msg}")]
    Block { block: usize, msg: String },
    #[error("block {block} rejected: {check} failed ({detail})")]
    Rejected { block: usize, check: String, detail: String },
    #[error("block {block}: {check} could not be verified ({detail}); pass --assume to accept")]
    Unverified { block: usize, check: String, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    Free { names: Vec<String> },
    Abelian { names: Vec<String> },
    Surface { genus: usize, names: Vec<String> },
}

impl Summand {
    pub fn names(&self) -> &[String] {
        match self {
            Summand::Free { names } | Summand::Abelian { names } | Summand::Surface { names, .. } => {
                names
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    A,
    Q,
    T,
}

/// Words are over the alphabet of the stage the block is attached to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    /// Torus of rank `rank` glued along a circle to `attach`.
    A { attach: Word, rank: usize, letters: Vec<String> },
    /// Bounded surface; boundary `i` is glued to `boundary[i]`. `retract`
    /// gives images of `gens` and then of the stable letters `letters`
    /// (one per boundary circle after the first).
    Q {
        genus: usize,
        punctures: usize,
        gens: Vec<String>,
        boundary: Vec<Word>,
        retract: Vec<Word>,
        letters: Vec<String>,
    },
    /// Rank `rank` torus glued along the lattice generated by `attach`.
    T { attach: Vec<Word>, rank: usize, letters: Vec<String> },
}

impl Block {
    pub fn kind(&self) -> BlockKind {
        match self {
            Block::A { .. } => BlockKind::A,
            Block::Q { .. } => BlockKind::Q,
            Block::T { .. } => BlockKind::T,
        }
    }

    /// Attaching words of an A or T block.
    pub fn attach_words(&self) -> Vec<Word> {
        match self {
            Block::A { attach, .. } => vec![attach.clone()],
            Block::T { attach, .. } => attach.clone(),
            Block::Q { boundary, .. } => boundary.clone(),
        }
    }

    /// Letters added by the block.
    pub fn new_letters(&self) -> Vec<String> {
        match self {
            Block::A { letters, .. } | Block::T { letters, .. } => letters.clone(),
            Block::Q { gens, letters, .. } => gens.iter().chain(letters).cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum Status {
    Verified(String),
    Refuted(String),
    BudgetLimited(String),
    /// Refuted, but accepted under `assume`.
    Forced(String),
}

impl Status {
    pub fn is_verified(&self) -> bool {
        matches!(self, Status::Verified(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub block: usize,
    pub check: String,
    #[serde(flatten)]
    pub status: Status,
}

/// A rank >= 2 abelian lattice coming from the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    /// `None` for a base summand.
    pub block: Option<usize>,
    pub summand: Option<usize>,
    /// Generators, as words in the stage where the flat appears.
    pub lattice: Vec<Word>,
    /// Later flat (T block) that extends this one.
    pub superseded_by: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct AttachOptions {
    pub budget: usize,
    /// Accept budget-limited and refuted obligations, recording them.
    pub assume: bool,
}

impl Default for AttachOptions {
    fn default() -> Self {
        AttachOptions { budget: 16, assume: false }
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    summands: Vec<Summand>,
    blocks: Vec<Block>,
    stages: Vec<Arc<Stage>>,
    ledger: Vec<Obligation>,
    flats: Vec<Flat>,
}

impl Tower {
    pub fn new_height0(summands: Vec<Summand>, budget: usize) -> Result<Tower, TowerError> {
        if summands.is_empty() {
            return Err(TowerError::EmptyBase);
        }
        let mut flats = Vec::new();
        let mut next = 0usize;
        for (i, s) in summands.iter().enumerate() {
            if s.names().is_empty() {
                return Err(TowerError::Summand(format!("summand {i} has no generators")));
            }
            if let Summand::Abelian { names } = s {
                if names.len() >= 2 {
                    let lattice = (next..next + names.len()).map(Word::generator).collect();
                    flats.push(Flat { block: None, summand: Some(i), lattice, superseded_by: None });
                }
            }
            next += s.names().len();
        }
        let stage = stage::stage0(&summands, budget)?;
        Ok(Tower { summands, blocks: Vec::new(), stages: vec![Arc::new(stage)], ledger: Vec::new(), flats })
    }

    pub fn height(&self) -> usize {
        self.blocks.len()
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn stage(&self, n: usize) -> Option<&Arc<Stage>> {
        self.stages.get(n)
    }

    pub fn top(&self) -> &Arc<Stage> {
        self.stages.last().expect("a tower has stage 0")
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.top().alphabet()
    }

    pub fn presentation(&self) -> &Presentation {
        self.top().presentation()
    }

    /// Obligations recorded while attaching blocks.
    pub fn ledger(&self) -> &[Obligation] {
        &self.ledger
    }

    /// All flats recorded by the construction, including superseded ones.
    pub fn flat_records(&self) -> &[Flat] {
        &self.flats
    }

    pub fn parse(&self, text: &str) -> Result<Word, TowerError> {
        Ok(self.alphabet().parse(text)?)
    }

    pub fn word_problem(&self, w: &Word, budget: usize) -> Result<Verdict, TowerError> {
        self.alphabet().check(w)?;
        Ok(self.top().word_problem(w, budget))
    }

    /// Composite of the stage retractions, landing in stage 0.
    pub fn retraction_to_base(&self) -> GroupHom {
        let mut h = GroupHom::identity(self.alphabet().len());
        for s in self.stages[1..].iter().rev() {
            h = h.then(s.retraction()).expect("retractions compose");
        }
        h
    }

    pub fn attach_block(&self, block: Block, opts: &AttachOptions) -> Result<Tower, TowerError> {
        let index = self.blocks.len();
        let prev = self.top().clone();
        let block = self.normalize(block, index)?;
        let mut obligations = checks::pre_checks(self, &prev, &block, opts.budget);
        let stage = Arc::new(match &block {
            Block::A { attach, letters, .. } => {
                stage::abelian_stage(&prev, std::slice::from_ref(attach), letters, opts.budget)?
            }
            Block::T { attach, letters, .. } => {
                stage::abelian_stage(&prev, attach, letters, opts.budget)?
            }
            Block::Q { genus, punctures, gens, boundary, retract, letters } => stage::quadratic_stage(
                &prev,
                *genus,
                *punctures,
                gens,
                letters,
                boundary,
                retract,
                opts.budget,
            )?,
        });
        obligations.push(checks::retraction_sound(&stage, opts.budget));
        let mut ledger = self.ledger.clone();
        for (check, status) in obligations {
            let status = match status {
                Status::Refuted(detail) if !opts.assume => {
                    return Err(TowerError::Rejected { block: index, check, detail })
                }
                Status::Refuted(detail) => Status::Forced(detail),
                Status::BudgetLimited(detail) if !opts.assume => {
                    return Err(TowerError::Unverified { block: index, check, detail })
                }
                s => s,
            };
            ledger.push(Obligation { block: index, check, status });
        }
        let mut flats = self.flats.clone();
        let lattice: Vec<Word> = match &block {
            Block::Q { .. } => Vec::new(),
            b => {
                let mut l = b.attach_words();
                let al = stage.alphabet();
                l.extend(b.new_letters().iter().filter_map(|s| al.index_of(s)).map(Word::generator));
                l
            }
        };
        if lattice.len() >= 2 {
            let new = flats.len();
            if let Block::T { attach, .. } = &block {
                if attach.len() >= 2 {
                    if let Some(old) = checks::spanned_flat(self, &prev, attach, opts.budget) {
                        flats[old].superseded_by = Some(new);
                    }
                }
            }
            flats.push(Flat { block: Some(index), summand: None, lattice, superseded_by: None });
        }
        let mut blocks = self.blocks.clone();
        blocks.push(block);
        let mut stages = self.stages.clone();
        stages.push(stage);
        Ok(Tower { summands: self.summands.clone(), blocks, stages, ledger, flats })
    }

    /// Shape checks and automatic letter names.
    fn normalize(&self, block: Block, index: usize) -> Result<Block, TowerError> {
        let bad = |msg: String| TowerError::Block { block: index, msg };
        let al = self.alphabet();
        let mut taken = al.clone();
        let fill = |taken: &mut Alphabet, letters: Vec<String>, want: usize| -> Result<Vec<String>, TowerError> {
            if letters.len() > want {
                return Err(bad(format!("{} letters given, {want} expected", letters.len())));
            }
            let mut out = Vec::new();
            for l in letters {
                taken.push(&l)?;
                out.push(l);
            }
            while out.len() < want {
                let name = taken.fresh_name("t");
                taken.push(&name)?;
                out.push(name);
            }
            Ok(out)
        };
        match block {
            Block::A { attach, rank, letters } => {
                if rank < 2 {
                    return Err(bad(format!("abelian block rank {rank} < 2")));
                }
                al.check(&attach)?;
                let attach = attach.reduce();
                if attach.is_empty() {
                    return Err(bad("empty attaching word".into()));
                }
                Ok(Block::A { attach, rank, letters: fill(&mut taken, letters, rank - 1)? })
            }
            Block::T { attach, rank, letters } => {
                let k = attach.len();
                if k == 0 || k >= rank {
                    return Err(bad(format!("torus block needs 1 <= k < l, got k={k}, l={rank}")));
                }
                let attach: Vec<Word> = attach.iter().map(Word::reduce).collect();
                for w in &attach {
                    al.check(w)?;
                    if w.is_empty() {
                        return Err(bad("empty attaching word".into()));
                    }
                }
                Ok(Block::T { attach, rank, letters: fill(&mut taken, letters, rank - k)? })
            }
            Block::Q { genus, punctures, gens, boundary, retract, letters } => {
                let want = 2 * genus + punctures - 1;
                if punctures == 0 {
                    return Err(bad("quadratic block needs at least one boundary circle".into()));
                }
                if gens.len() != want {
                    return Err(bad(format!("{} surface generators given, {want} expected", gens.len())));
                }
                if boundary.len() != punctures {
                    return Err(bad(format!(
                        "{} boundary words given, {punctures} expected",
                        boundary.len()
                    )));
                }
                for g in &gens {
                    taken.push(g)?;
                }
                let letters = fill(&mut taken, letters, punctures - 1)?;
                if retract.len() > want + letters.len() || retract.len() < want {
                    return Err(bad("retraction must give an image for every surface generator".into()));
                }
                let mut retract: Vec<Word> = retract.iter().map(Word::reduce).collect();
                retract.resize(want + letters.len(), Word::empty());
                for w in boundary.iter().chain(&retract) {
                    al.check(w)?;
                }
                let boundary = boundary.iter().map(Word::reduce).collect();
                Ok(Block::Q { genus, punctures, gens, boundary, retract, letters })
            }
        }
    }
}
