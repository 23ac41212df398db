//! Flats of a tower in combinatorial form: the inventory of rank >= 2
//! abelian lattices, the good/bad coloring of a core, the reductions behind
//! the isolation hypotheses, and symbolic isolation bounds.

mod bound;
mod hypotheses;
#[cfg(test)]
mod tests;

use serde::Serialize;
use thiserror::Error;

use crate::cover::CoreReport;
use crate::graphgroups::Verdict;
use crate::tower::{BlockKind, Status, Tower};
use crate::words::Word;

pub use bound::{compose_isolation_bound, BoundEnv, SymbolicBound};
pub use hypotheses::{check_isolation_hypotheses, Check, Hypothesis, IsolationReport, PairCheck, DEFAULT_POWER_BUDGET};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlatsError {
    #[error("a height-0 tower has no top splitting; its group is a free product of the base summands")]
    HeightZero,
    #[error("nothing to bound: every input family is empty")]
    EmptyBound,
    #[error("atom `{0}` has no assigned value")]
    Unassigned(String),
    #[error("bound overflows at k = {0}")]
    Overflow(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatOrigin {
    Summand(usize),
    Block(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatClass {
    /// Index into the tower's flat records.
    pub record: usize,
    pub rank: usize,
    pub lattice: Vec<String>,
    pub origin: FlatOrigin,
    /// First lattice generator, naming the conjugacy class.
    pub representative: String,
    /// Pairwise commutation of the generators by the word problem.
    pub commuting: Status,
    #[serde(skip)]
    pub words: Vec<Word>,
}

/// One class per maximal rank >= 2 lattice: flats extended by a later torus
/// block are left out. The rank is the number of generators, which are a
/// basis of a free abelian vertex group of the splitting where they appear.
pub fn flat_inventory(t: &Tower, budget: usize) -> Vec<FlatClass> {
    let al = t.alphabet();
    t.flat_records()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.superseded_by.is_none())
        .map(|(i, f)| {
            let mut commuting = Status::Verified("all commutators trivial".into());
            'outer: for x in 0..f.lattice.len() {
                for y in x + 1..f.lattice.len() {
                    let c = Word::commutator(&f.lattice[x], &f.lattice[y]);
                    match t.word_problem(&c, budget) {
                        Ok(Verdict::Trivial) => {}
                        Ok(Verdict::Nontrivial) => {
                            commuting = Status::Refuted(format!("generators {x} and {y} do not commute"));
                            break 'outer;
                        }
                        _ => commuting = Status::BudgetLimited(format!("commutator {x},{y} undecided")),
                    }
                }
            }
            let origin = match (f.block, f.summand) {
                (Some(b), _) => FlatOrigin::Block(b),
                (None, s) => FlatOrigin::Summand(s.unwrap_or(0)),
            };
            FlatClass {
                record: i,
                rank: f.lattice.len(),
                lattice: f.lattice.iter().map(|w| al.format(w)).collect(),
                origin,
                representative: al.format(&f.lattice[0]),
                commuting,
                words: f.lattice.clone(),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexType {
    /// Lift of the previous stage.
    M,
    /// Lift of the new piece of the top block.
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Color {
    G,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColoredVertex {
    pub vertex: usize,
    pub kind: VertexType,
    pub color: Color,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColoredCore {
    pub top: BlockKind,
    pub vertices: Vec<ColoredVertex>,
    #[serde(skip)]
    pub report: CoreReport,
}

impl ColoredCore {
    pub fn color(&self, v: usize) -> Color {
        self.vertices[v].color
    }
}

/// Surface pieces are good when the top block is quadratic; otherwise the
/// previous stage is good and the torus pieces are bad.
pub fn color_vertices(r: &CoreReport, top: Option<BlockKind>) -> Result<ColoredCore, FlatsError> {
    let top = top.ok_or(FlatsError::HeightZero)?;
    let vertices = r
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let kind = if v.base == 0 { VertexType::M } else { VertexType::N };
            let good = match top {
                BlockKind::Q => kind == VertexType::N,
                BlockKind::A | BlockKind::T => kind == VertexType::M,
            };
            ColoredVertex { vertex: i, kind, color: if good { Color::G } else { Color::B } }
        })
        .collect();
    Ok(ColoredCore { top, vertices, report: r.clone() })
}
