//! Covers of a graph of groups: the graph of groups of a finitely
//! generated subgroup, built by folding and grown by expansion rounds.
//!
//! A cover vertex `x` over base vertex `p(x)` carries a subgroup `H_x` of
//! the vertex group. A cover edge over base edge `e` stores a near label
//! at each end; reading the edge from its `from` end gives
//! `near[0] · crossing · near[1]^-1`.

mod extract;
mod fold;
mod oracle;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgroups::{GraphError, GraphOfGroups, Verdict, VertexGroup};
use crate::words::{Word, WordError};

pub use extract::{classify_edge_pieces, Cell, CoreEdge, CoreReport, CoreVertex, LoopExpr, LoopStep, Piece, Stabilization};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("word problem undecided for subgroup generator `{0}`")]
    Undecided(String),
    #[error("`{0}` cannot be read as a loop in the folded graph")]
    OpenLoop(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
}

/// Where a refined base edge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrigin {
    Edge(usize),
    /// Loop standing for a generator of an exploded free vertex.
    Generator(usize),
}

#[derive(Clone, Debug)]
pub struct BaseEdge {
    pub from: usize,
    pub to: usize,
    pub from_images: Vec<Word>,
    pub to_images: Vec<Word>,
    /// Letter read when crossing from `from` to `to`: a stable letter, an
    /// exploded generator, or nothing for tree edges.
    pub crossing: Word,
    pub origin: EdgeOrigin,
}

impl BaseEdge {
    pub fn rank(&self) -> usize {
        self.from_images.len()
    }

    pub(crate) fn images(&self, side: usize) -> &[Word] {
        if side == 0 {
            &self.from_images
        } else {
            &self.to_images
        }
    }

    pub(crate) fn end(&self, side: usize) -> usize {
        if side == 0 {
            self.from
        } else {
            self.to
        }
    }
}

/// The base graph with free vertices whose edge groups are all trivial
/// replaced by a trivial vertex carrying one loop per generator, so that
/// covers of such vertices become ordinary labelled graphs.
#[derive(Clone, Debug)]
pub struct BaseGraph {
    graph: GraphOfGroups,
    groups: Vec<Option<VertexGroup>>,
    edges: Vec<BaseEdge>,
    loops: HashMap<usize, usize>,
}

impl BaseGraph {
    pub fn refine(graph: &GraphOfGroups) -> Self {
        let n = graph.vertices().len();
        let mut groups: Vec<Option<VertexGroup>> = graph.vertices().iter().cloned().map(Some).collect();
        let mut edges: Vec<BaseEdge> = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| BaseEdge {
                from: e.from,
                to: e.to,
                from_images: e.from_images.clone(),
                to_images: e.to_images.clone(),
                crossing: e.letter.map(Word::generator).unwrap_or_default(),
                origin: EdgeOrigin::Edge(i),
            })
            .collect();
        let mut loops = HashMap::new();
        for v in 0..n {
            let vg = &graph.vertices()[v];
            let bare = graph.edges().iter().all(|e| (e.from != v && e.to != v) || e.rank() == 0);
            if !vg.is_free() || !bare {
                continue;
            }
            for g in vg.gens() {
                loops.insert(g, edges.len());
                edges.push(BaseEdge {
                    from: v,
                    to: v,
                    from_images: Vec::new(),
                    to_images: Vec::new(),
                    crossing: Word::generator(g),
                    origin: EdgeOrigin::Generator(g),
                });
            }
            groups[v] = None;
        }
        BaseGraph { graph: graph.clone(), groups, edges, loops }
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn edges(&self) -> &[BaseEdge] {
        &self.edges
    }

    /// Vertex group, or `None` for trivial (exploded) vertices.
    pub fn group(&self, v: usize) -> Option<&VertexGroup> {
        self.groups[v].as_ref()
    }

    pub fn num_vertices(&self) -> usize {
        self.groups.len()
    }

    pub fn base(&self) -> usize {
        self.graph.base()
    }

    pub fn vertex_label(&self, v: usize) -> String {
        let vg = &self.graph.vertices()[v];
        match &self.groups[v] {
            Some(_) => vg.label.clone(),
            None => format!("{}*", vg.label),
        }
    }

    /// Reduced path of `w` in the refined graph: syllables and steps,
    /// `syllables.len() == steps.len() + 1`.
    pub(crate) fn path(&self, w: &Word, budget: usize) -> Result<(Vec<Word>, Vec<(usize, bool)>, Verdict), CoverError> {
        let nf = self.graph.normal_form(w, budget)?;
        let mut syl = vec![Word::empty()];
        let mut steps = Vec::new();
        for (i, (v, x)) in nf.syllables.iter().enumerate() {
            if self.groups[*v].is_none() {
                for l in x.reduce().letters() {
                    steps.push((self.loops[&l.gen()], !l.is_inverse()));
                    syl.push(Word::empty());
                }
            } else {
                let last = syl.last_mut().expect("nonempty");
                *last = last.mul(x);
            }
            if let Some(s) = nf.steps.get(i) {
                steps.push((s.edge, s.forward));
                syl.push(Word::empty());
            }
        }
        Ok((syl, steps, nf.verdict))
    }
}

/// Order in which subgroup generators are inserted and fold candidates scanned.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FoldOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Debug)]
pub struct CoverVertex {
    pub base: usize,
    pub gens: Vec<Word>,
    /// Created by an expansion round rather than by a generator loop.
    pub expansion: bool,
}

#[derive(Clone, Debug)]
pub struct CoverEdge {
    pub base: usize,
    /// `[from, to]`.
    pub ends: [usize; 2],
    pub near: [Word; 2],
    /// Basis of the edge stabilizer in edge-group coordinates.
    pub lattice: Vec<Vec<i64>>,
    /// Lies on a generator loop.
    pub support: bool,
    synced: [Vec<Vec<i64>>; 2],
}

impl CoverEdge {
    pub fn rank(&self) -> usize {
        self.lattice.len()
    }
}

/// Folded graph of groups of a subgroup, possibly grown past its core.
#[derive(Clone, Debug)]
pub struct CoverGraph {
    base: BaseGraph,
    vertices: Vec<Option<CoverVertex>>,
    edges: Vec<Option<CoverEdge>>,
    subgens: Vec<Word>,
    dropped: Vec<Word>,
    history: Vec<usize>,
    rounds: usize,
    exact: bool,
    budget: usize,
    order: FoldOrder,
}

impl CoverGraph {
    /// Folds the generator loops of `subgens` into a based cover.
    pub fn new(graph: &GraphOfGroups, subgens: &[Word], budget: usize, order: FoldOrder) -> Result<Self, CoverError> {
        let base = BaseGraph::refine(graph);
        let root = base.base();
        let mut c = CoverGraph {
            base,
            vertices: Vec::new(),
            edges: Vec::new(),
            subgens: Vec::new(),
            dropped: Vec::new(),
            history: Vec::new(),
            rounds: 0,
            exact: true,
            budget,
            order,
        };
        c.add_vertex(root, false);
        let mut paths = Vec::new();
        for w in subgens {
            let w = w.reduce();
            match graph.word_problem(&w, budget)? {
                Verdict::Trivial => c.dropped.push(w),
                Verdict::Unknown => return Err(CoverError::Undecided(graph.alphabet().format(&w))),
                Verdict::Nontrivial => {
                    paths.push(c.base.path(&w, budget)?);
                    c.subgens.push(w);
                }
            }
        }
        if order == FoldOrder::Reverse {
            paths.reverse();
        }
        for (syl, steps, _) in paths {
            c.add_path(&syl, &steps);
        }
        c.fold_all();
        let b = c.betti();
        c.history.push(b);
        Ok(c)
    }

    /// Runs `rounds` further expansion rounds, folding after each.
    pub fn expand(&mut self, rounds: usize) {
        for _ in 0..rounds {
            self.expansion_round();
            self.fold_all();
            self.rounds += 1;
            let b = self.betti();
            self.history.push(b);
        }
    }

    pub fn base_graph(&self) -> &BaseGraph {
        &self.base
    }

    pub fn subgens(&self) -> &[Word] {
        &self.subgens
    }

    /// Generators dropped because they are trivial in the group.
    pub fn dropped(&self) -> &[Word] {
        &self.dropped
    }

    pub fn vertex(&self, id: usize) -> Option<&CoverVertex> {
        self.vertices.get(id).and_then(Option::as_ref)
    }

    pub fn edge(&self, id: usize) -> Option<&CoverEdge> {
        self.edges.get(id).and_then(Option::as_ref)
    }

    pub fn vertex_ids(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.vertices[i].is_some()).collect()
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].is_some()).collect()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// First Betti number after the initial fold and after each round.
    pub fn history(&self) -> &[usize] {
        &self.history
    }

    /// Every oracle call made so far was exact.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Vertices of degree one created by expansion, where growth continues.
    pub fn frontier(&self) -> Vec<usize> {
        self.vertex_ids()
            .into_iter()
            .filter(|&v| {
                self.vertices[v].as_ref().is_some_and(|x| x.expansion)
                    && self.edge_ids().iter().filter(|&&e| self.edges[e].as_ref().unwrap().ends.contains(&v)).count() == 1
            })
            .collect()
    }

    pub(crate) fn add_vertex(&mut self, base: usize, expansion: bool) -> usize {
        self.vertices.push(Some(CoverVertex { base, gens: Vec::new(), expansion }));
        self.vertices.len() - 1
    }

    pub(crate) fn add_edge(&mut self, base: usize, ends: [usize; 2], near: [Word; 2], support: bool) -> usize {
        self.edges.push(Some(CoverEdge {
            base,
            ends,
            near: [near[0].reduce(), near[1].reduce()],
            lattice: Vec::new(),
            support,
            synced: [Vec::new(), Vec::new()],
        }));
        self.edges.len() - 1
    }

    /// Adds the closed path of a generator at the base cover vertex.
    fn add_path(&mut self, syl: &[Word], steps: &[(usize, bool)]) {
        if steps.is_empty() {
            self.push_gen(0, syl[0].clone());
            return;
        }
        let mut cur = 0;
        let n = steps.len();
        for (i, &(e, fwd)) in steps.iter().enumerate() {
            let be = &self.base.edges[e];
            let next = if i + 1 == n {
                0
            } else {
                let v = if fwd { be.to } else { be.from };
                self.add_vertex(v, false)
            };
            let here = syl[i].clone();
            let there = if i + 1 == n { syl[n].inverse() } else { Word::empty() };
            // near labels are read away from each end
            if fwd {
                self.add_edge(e, [cur, next], [here, there], true);
            } else {
                self.add_edge(e, [next, cur], [there, here], true);
            }
            cur = next;
        }
    }

    pub(crate) fn push_gen(&mut self, v: usize, w: Word) {
        let w = w.reduce();
        let x = self.vertices[v].as_mut().expect("live vertex");
        if !w.is_empty() && !x.gens.contains(&w) {
            x.gens.push(w);
        }
    }
}

/// Folds the loops of `subgens` and runs `depth` expansion rounds.
pub fn expand_cover(graph: &GraphOfGroups, subgens: &[Word], depth: usize, budget: usize) -> Result<CoverGraph, CoverError> {
    let mut c = CoverGraph::new(graph, subgens, budget, FoldOrder::Forward)?;
    c.expand(depth);
    Ok(c)
}
