//! Graphs of groups with free abelian edge groups.
//!
//! Conventions: an edge `e` runs from `from` to `to` with edge-group images
//! `from_images` and `to_images`. A tree edge contributes relators
//! `from_image_i · to_image_i^-1`; a non-tree edge with stable letter `t`
//! contributes `t · to_image_i · t^-1 · from_image_i^-1`. Crossing `e`
//! forwards is the stable letter `t` (trivial for tree edges).

mod normal_form;
mod vertex;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lattice;
use crate::stallings::SubgroupGraph;
use crate::words::{Alphabet, Word, WordError};

pub use normal_form::{NormalForm, Step};
pub use vertex::{expression_from_coords, CompositeGroup, VertexGroup, VertexKind};
pub(crate) use vertex::{generator_expressions, short_product, substitute};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Unknown,
}

impl Verdict {
    pub fn from_bool(trivial: bool) -> Self {
        if trivial {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Trivial => "Trivial",
            Verdict::Nontrivial => "Nontrivial",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Expression as a word in the subgroup generators.
    Member(Word),
    Nonmember,
    Unknown,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("graph of groups is disconnected: vertex `{0}` unreachable from the base")]
    Disconnected(String),
    #[error("no vertex with index {0}")]
    NoVertex(usize),
    #[error("edge {edge}: {msg}")]
    BadEdge { edge: usize, msg: String },
    #[error("generator `{0}` belongs to two vertex groups")]
    SharedGenerator(String),
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub from_images: Vec<Word>,
    pub to_images: Vec<Word>,
    /// Stable letter (generator index) for non-tree edges.
    pub letter: Option<usize>,
    letter_name: Option<String>,
}

impl Edge {
    pub fn rank(&self) -> usize {
        self.from_images.len()
    }

    /// Images at the endpoint reached by crossing in the given direction.
    pub fn images_at(&self, forward: bool) -> &[Word] {
        if forward {
            &self.to_images
        } else {
            &self.from_images
        }
    }
}

/// Finite presentation over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Self {
        let relators = relators.into_iter().map(|r| r.reduce()).filter(|r| !r.is_empty()).collect();
        Presentation { alphabet, relators }
    }

    /// Rank of the abelianization.
    pub fn abelian_rank(&self) -> usize {
        let n = self.alphabet.len();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.abelianize(n)).collect();
        n - lattice::rank(&rows, n)
    }

    pub fn format(&self) -> String {
        let gens = self.alphabet.names().join(",");
        let rels: Vec<String> = self.relators.iter().map(|r| self.alphabet.format(r)).collect();
        format!("< {} | {} >", gens, rels.join(" ; "))
    }
}

/// Collects vertices and edges before the spanning tree is fixed.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    alphabet: Alphabet,
    vertices: Vec<VertexGroup>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        GraphBuilder { alphabet, vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_mut(&mut self) -> &mut Alphabet {
        &mut self.alphabet
    }

    pub fn add_vertex(&mut self, v: VertexGroup) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    /// Adds an edge; `letter` names the stable letter used if the edge ends
    /// up outside the spanning tree.
    pub fn add_edge(
        &mut self,
        from: usize,
        to: usize,
        from_images: Vec<Word>,
        to_images: Vec<Word>,
        letter: Option<&str>,
    ) -> usize {
        self.edges.push(Edge {
            from,
            to,
            from_images: from_images.into_iter().map(|w| w.reduce()).collect(),
            to_images: to_images.into_iter().map(|w| w.reduce()).collect(),
            letter: None,
            letter_name: letter.map(str::to_string),
        });
        self.edges.len() - 1
    }

    /// Fixes the BFS spanning tree from `base`, names stable letters and
    /// validates the edge monomorphisms.
    pub fn build(mut self, base: usize, budget: usize) -> Result<GraphOfGroups, GraphError> {
        let nv = self.vertices.len();
        if base >= nv {
            return Err(GraphError::NoVertex(base));
        }
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (v, vg) in self.vertices.iter().enumerate() {
            for g in vg.gens() {
                if g >= self.alphabet.len() {
                    return Err(WordError::AlphabetMismatch(format!(
                        "vertex `{}` uses generator index {g}",
                        vg.label
                    ))
                    .into());
                }
                if owner.insert(g, v).is_some() {
                    return Err(GraphError::SharedGenerator(self.alphabet.name(g).into()));
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= nv || e.to >= nv {
                return Err(GraphError::BadEdge { edge: i, msg: "endpoint out of range".into() });
            }
            if e.from_images.len() != e.to_images.len() {
                return Err(GraphError::BadEdge { edge: i, msg: "image counts differ".into() });
            }
            for (v, imgs) in [(e.from, &e.from_images), (e.to, &e.to_images)] {
                validate_images(&self.vertices[v], imgs, &owner, v, budget)
                    .map_err(|msg| GraphError::BadEdge { edge: i, msg })?;
            }
        }
        // BFS spanning tree, edge insertion order as tie-break
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut depth = vec![usize::MAX; nv];
        depth[base] = 0;
        let mut in_tree = vec![false; self.edges.len()];
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && depth[b] == usize::MAX {
                        depth[b] = depth[v] + 1;
                        parent[b] = Some((i, v));
                        in_tree[i] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        if let Some(v) = (0..nv).find(|&v| depth[v] == usize::MAX) {
            return Err(GraphError::Disconnected(self.vertices[v].label.clone()));
        }
        let mut stable_owner = HashMap::new();
        for (i, e) in self.edges.iter_mut().enumerate() {
            if in_tree[i] {
                continue;
            }
            let name = match &e.letter_name {
                Some(n) => n.clone(),
                None => self.alphabet.fresh_name(&format!("t{i}")),
            };
            let g = match self.alphabet.index_of(&name) {
                Some(g) if !owner.contains_key(&g) && !stable_owner.contains_key(&g) => g,
                Some(_) => return Err(WordError::DuplicateGenerator(name).into()),
                None => self.alphabet.push(&name)?,
            };
            stable_owner.insert(g, i);
            e.letter = Some(g);
        }
        let mut edge_graphs = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            for (side, v, imgs) in [(false, e.from, &e.from_images), (true, e.to, &e.to_images)] {
                if self.vertices[v].is_free() {
                    edge_graphs.insert((i, side), SubgroupGraph::fold(imgs));
                }
            }
        }
        Ok(GraphOfGroups {
            alphabet: self.alphabet,
            vertices: self.vertices,
            edges: self.edges,
            base,
            in_tree,
            parent,
            depth,
            owner,
            stable_owner,
            edge_graphs,
        })
    }
}

fn validate_images(
    vg: &VertexGroup,
    imgs: &[Word],
    owner: &HashMap<usize, usize>,
    v: usize,
    budget: usize,
) -> Result<(), String> {
    for w in imgs {
        if !w.uses_only(|g| owner.get(&g) == Some(&v)) {
            return Err(format!("image not a word in vertex `{}`", vg.label));
        }
        if vg.word_problem(w, budget) != Verdict::Nontrivial {
            return Err(format!("image in vertex `{}` is not verified nontrivial", vg.label));
        }
    }
    if imgs.len() < 2 {
        return Ok(());
    }
    match &vg.kind {
        VertexKind::FreeAbelian { .. } => {
            let rows: Vec<Vec<i64>> = imgs.iter().filter_map(|w| vg.abelian_coords(w)).collect();
            let n = vg.gens().len();
            if lattice::rank(&rows, n) != imgs.len() {
                return Err("abelian edge images are linearly dependent".into());
            }
            Ok(())
        }
        VertexKind::Composite(_) => {
            for i in 0..imgs.len() {
                for j in i + 1..imgs.len() {
                    let c = Word::commutator(&imgs[i], &imgs[j]);
                    if vg.word_problem(&c, budget) != Verdict::Trivial {
                        return Err("edge images do not verifiably commute".into());
                    }
                }
            }
            Ok(())
        }
        _ => Err(format!(
            "rank {} edge group cannot embed in {} vertex `{}`",
            imgs.len(),
            vg.kind_name(),
            vg.label
        )),
    }
}

#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    alphabet: Alphabet,
    vertices: Vec<VertexGroup>,
    edges: Vec<Edge>,
    base: usize,
    in_tree: Vec<bool>,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    owner: HashMap<usize, usize>,
    stable_owner: HashMap<usize, usize>,
    edge_graphs: HashMap<(usize, bool), SubgroupGraph>,
}

impl GraphOfGroups {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[VertexGroup] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    /// Vertex owning a generator, if it is a vertex generator.
    pub fn vertex_of(&self, gen: usize) -> Option<usize> {
        self.owner.get(&gen).copied()
    }

    /// Edge whose stable letter is `gen`.
    pub fn edge_of_letter(&self, gen: usize) -> Option<usize> {
        self.stable_owner.get(&gen).copied()
    }

    /// Standard presentation of the fundamental group at the base vertex.
    pub fn fundamental_presentation(&self) -> Presentation {
        let mut rels = Vec::new();
        for v in &self.vertices {
            rels.extend(v.relators());
        }
        for (i, e) in self.edges.iter().enumerate() {
            for (a, b) in e.from_images.iter().zip(&e.to_images) {
                if self.in_tree[i] {
                    rels.push(a.mul(&b.inverse()));
                } else {
                    let t = Word::generator(e.letter.expect("non-tree edge has a letter"));
                    rels.push(t.mul(b).mul(&t.inverse()).mul(&a.inverse()));
                }
            }
        }
        Presentation::new(self.alphabet.clone(), rels)
    }

    /// Tree path from `u` to `v` as steps.
    pub fn tree_path(&self, u: usize, v: usize) -> Vec<Step> {
        let (mut a, mut b) = (u, v);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (e, p) = self.parent[a].expect("non-root has parent");
                up.push(Step { edge: e, forward: self.edges[e].from == a && self.edges[e].to == p });
                a = p;
            } else {
                let (e, p) = self.parent[b].expect("non-root has parent");
                down.push(Step { edge: e, forward: self.edges[e].from == p && self.edges[e].to == b });
                b = p;
            }
        }
        up.extend(down.into_iter().rev());
        up
    }

    pub(crate) fn edge_graph(&self, edge: usize, side: bool) -> Option<&SubgroupGraph> {
        self.edge_graphs.get(&(edge, side))
    }

    /// Decides `w ∈ image of the edge group at one end`; returns edge-group coordinates.
    pub fn edge_membership(&self, edge: usize, at_to: bool, w: &Word, budget: usize) -> Membership {
        let e = &self.edges[edge];
        let v = if at_to { e.to } else { e.from };
        if let Some(g) = self.edge_graph(edge, at_to) {
            return vertex::free_membership(g, w);
        }
        self.vertices[v].membership(e.images_at(at_to), w, budget)
    }

    /// Britton/Bass–Serre reduction of `w` (a word over the presentation alphabet).
    pub fn normal_form(&self, w: &Word, budget: usize) -> Result<NormalForm, GraphError> {
        normal_form::reduce(self, w, budget)
    }

    pub fn word_problem(&self, w: &Word, budget: usize) -> Result<Verdict, GraphError> {
        Ok(self.normal_form(w, budget)?.verdict)
    }
}
