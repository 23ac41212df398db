//! Reading loops, extracting the core and reporting it.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fold::Half;
use super::oracle::{eval, Decision};
use super::{CoverError, CoverGraph, EdgeOrigin};
use crate::words::Word;

/// Expansion rounds run after extraction to test that the rank has settled.
const STABILITY_ROUNDS: usize = 2;

/// Shape of an edge space in the cover, by the rank of its stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Piece {
    Strip,
    Annulus,
    TorusTube,
}

impl Piece {
    pub fn of_rank(r: usize) -> Piece {
        match r {
            0 => Piece::Strip,
            1 => Piece::Annulus,
            _ => Piece::TorusTube,
        }
    }
}

/// A vertex (`v3`) or edge (`e5`) of the generated cover, by cover id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
}

impl FromStr for Cell {
    type Err = CoverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || CoverError::UnknownCell(s.to_string());
        let (kind, num) = s.split_at_checked(1).ok_or_else(bad)?;
        let n: usize = num.parse().map_err(|_| bad())?;
        match kind {
            "v" => Ok(Cell::Vertex(n)),
            "e" => Ok(Cell::Edge(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Vertex(n) => write!(f, "v{n}"),
            Cell::Edge(n) => write!(f, "e{n}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreVertex {
    pub cover_id: usize,
    pub base: usize,
    pub base_label: String,
    pub subgroup: Vec<String>,
    /// Rank of the first homology of the vertex subgroup.
    pub rank: usize,
    #[serde(skip)]
    pub gens: Vec<Word>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreEdge {
    pub cover_id: usize,
    pub base_edge: usize,
    pub origin: EdgeOrigin,
    pub from: usize,
    pub to: usize,
    pub near: [String; 2],
    pub lattice: Vec<Vec<i64>>,
    pub piece: Piece,
    #[serde(skip)]
    pub near_words: [Word; 2],
}

impl CoreEdge {
    pub fn rank(&self) -> usize {
        self.lattice.len()
    }
}

/// `element` lies in the subgroup at `vertex`; the loop then crosses `edge`.
#[derive(Clone, Debug, Serialize)]
pub struct LoopStep {
    pub vertex: usize,
    pub element: String,
    pub edge: usize,
    pub forward: bool,
}

/// A generator written as a loop at the base vertex of the core.
#[derive(Clone, Debug, Serialize)]
pub struct LoopExpr {
    pub generator: String,
    pub steps: Vec<LoopStep>,
    /// Final element, in the subgroup at the base vertex.
    pub last: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    /// Stability of the rank under a few more rounds is evidence, not proof.
    pub heuristic: bool,
    pub rounds: usize,
    pub betti: Vec<usize>,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreReport {
    /// Vertices in breadth-first order from the base vertex (index 0).
    pub vertices: Vec<CoreVertex>,
    pub edges: Vec<CoreEdge>,
    /// First Betti number of the core.
    pub rank: usize,
    pub exact: bool,
    pub loops: Vec<LoopExpr>,
    pub dropped: Vec<String>,
    pub required: Vec<Cell>,
    pub stabilization: Stabilization,
}

impl CoreReport {
    /// `(base vertex, rank)` per vertex and `(from, base edge, to, rank)` per edge.
    #[allow(clippy::type_complexity)]
    pub fn shape(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize, usize, usize)>) {
        let v = self.vertices.iter().map(|x| (x.base, x.rank)).collect();
        let e = self.edges.iter().map(|x| (x.from, x.base_edge, x.to, x.rank())).collect();
        (v, e)
    }

    /// Labelled edges `(from, generator, to)` over exploded free vertices.
    pub fn letter_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .filter_map(|e| match e.origin {
                EdgeOrigin::Generator(g) => Some((e.from, g, e.to)),
                EdgeOrigin::Edge(_) => None,
            })
            .collect();
        out.sort();
        out
    }

    pub fn pieces(&self) -> Vec<(usize, Piece)> {
        classify_edge_pieces(self)
    }
}

pub fn classify_edge_pieces(r: &CoreReport) -> Vec<(usize, Piece)> {
    r.edges.iter().enumerate().map(|(i, e)| (i, Piece::of_rank(e.rank()))).collect()
}

fn shortlex(w: &Word) -> (usize, Vec<usize>) {
    (w.len(), w.letters().iter().map(|l| l.order_key()).collect())
}

impl CoverGraph {
    fn member(&self, v: usize, w: &Word) -> bool {
        matches!(self.oracle(v).double_coset(self.gens(v), &Word::empty(), &[], w, self.budget), Decision::Yes(_))
    }

    /// Whether `w` reads as a loop at the base vertex. In a folded graph
    /// with exact oracles this decides membership in the subgroup.
    pub fn reads_loop(&self, w: &Word) -> Result<bool, CoverError> {
        Ok(self.read(&w.reduce())?.is_some())
    }

    /// Reads `w` as a loop at the base vertex, or `None` when it leaves the
    /// folded graph (so `w` is not in the subgroup, or an oracle gave up).
    pub(crate) fn read(&self, w: &Word) -> Result<Option<(Vec<(usize, Word, Half)>, Word)>, CoverError> {
        let (syl, steps, _) = self.base.path(w, self.budget)?;
        let mut cur = 0;
        let mut g = syl[0].clone();
        let mut out = Vec::new();
        for (i, &(be, fwd)) in steps.iter().enumerate() {
            let side = if fwd { 0 } else { 1 };
            let mut next = None;
            for h in self.halves_at(cur) {
                let e = self.edges[h.edge].as_ref().expect("live edge");
                if h.side != side || e.base != be {
                    continue;
                }
                let imgs = self.images(h);
                if let Decision::Yes(c) = self.oracle(cur).double_coset(self.gens(cur), &e.near[side], imgs, &g, self.budget) {
                    let elem = g.mul(&eval(imgs, &c).inverse()).mul(&e.near[side].inverse()).reduce();
                    let far_imgs = self.base.edges[be].images(1 - side);
                    let rest = e.near[1 - side].mul(&eval(far_imgs, &c)).mul(&syl[i + 1]);
                    next = Some((h, elem, e.ends[1 - side], rest));
                    break;
                }
            }
            let Some((h, elem, v, rest)) = next else { return Ok(None) };
            out.push((cur, elem, h));
            cur = v;
            g = rest.reduce();
        }
        if cur != 0 || !self.member(0, &g) {
            return Ok(None);
        }
        Ok(Some((out, g)))
    }

    /// Breadth-first tree of the generated graph from the base vertex:
    /// parent edge of each reached vertex.
    fn spanning_parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut q = VecDeque::from([0]);
        while let Some(v) = q.pop_front() {
            for h in self.halves_at(v) {
                let e = self.edges[h.edge].as_ref().expect("live edge");
                let w = e.ends[1 - h.side];
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(h.edge);
                    q.push_back(w);
                }
            }
        }
        parent
    }

    /// The core: edges on generator loops and the required cells, joined to
    /// the base vertex along a spanning tree.
    pub fn extract_core(&self, required: &[Cell]) -> Result<CoreReport, CoverError> {
        let al = self.base.graph().alphabet();
        let mut loops_raw = Vec::new();
        for w in &self.subgens {
            match self.read(w)? {
                Some(l) => loops_raw.push((w.clone(), l)),
                None => return Err(CoverError::OpenLoop(al.format(w))),
            }
        }
        let mut edges: BTreeSet<usize> = self.edge_ids().into_iter().filter(|&e| self.edges[e].as_ref().unwrap().support).collect();
        let mut verts: BTreeSet<usize> = BTreeSet::from([0]);
        let parent = self.spanning_parents();
        let mut anchors = Vec::new();
        for &c in required {
            match c {
                Cell::Vertex(v) if self.vertex(v).is_some() => anchors.push(v),
                Cell::Edge(e) if self.edge(e).is_some() => {
                    edges.insert(e);
                    anchors.extend(self.edges[e].as_ref().unwrap().ends);
                }
                _ => return Err(CoverError::UnknownCell(c.to_string())),
            }
        }
        for mut v in anchors {
            verts.insert(v);
            while let Some(e) = parent[v] {
                edges.insert(e);
                let ends = self.edges[e].as_ref().unwrap().ends;
                v = if ends[0] == v { ends[1] } else { ends[0] };
            }
        }
        for &e in &edges {
            verts.extend(self.edges[e].as_ref().unwrap().ends);
        }
        let vlist: Vec<usize> = verts.iter().copied().collect();
        let elist: Vec<usize> = edges.iter().copied().collect();
        let (rank, betti_exact) = self.betti_of(&vlist, &elist);

        // canonical numbering
        let mut num = vec![usize::MAX; self.vertices.len()];
        let mut order = vec![0];
        num[0] = 0;
        let mut enum_ = vec![usize::MAX; self.edges.len()];
        let mut eorder = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            let mut hs: Vec<Half> = self.halves_at(v).into_iter().filter(|h| edges.contains(&h.edge)).collect();
            hs.sort_by_key(|h| {
                let e = self.edges[h.edge].as_ref().unwrap();
                (e.base, h.side, shortlex(&e.near[h.side]))
            });
            for h in hs {
                if enum_[h.edge] == usize::MAX {
                    enum_[h.edge] = eorder.len();
                    eorder.push(h.edge);
                }
                let w = self.edges[h.edge].as_ref().unwrap().ends[1 - h.side];
                if num[w] == usize::MAX {
                    num[w] = order.len();
                    order.push(w);
                }
            }
        }
        let n = al.len();
        let vertices = order
            .iter()
            .map(|&v| {
                let x = self.vertex(v).unwrap();
                CoreVertex {
                    cover_id: v,
                    base: x.base,
                    base_label: self.base.vertex_label(x.base),
                    subgroup: x.gens.iter().map(|g| al.format(g)).collect(),
                    rank: self.oracle(v).homology(&x.gens, n, self.budget).rank(),
                    gens: x.gens.clone(),
                }
            })
            .collect();
        let cedges = eorder
            .iter()
            .map(|&id| {
                let e = self.edge(id).unwrap();
                CoreEdge {
                    cover_id: id,
                    base_edge: e.base,
                    origin: self.base.edges[e.base].origin,
                    from: num[e.ends[0]],
                    to: num[e.ends[1]],
                    near: [al.format(&e.near[0]), al.format(&e.near[1])],
                    lattice: e.lattice.clone(),
                    piece: Piece::of_rank(e.rank()),
                    near_words: e.near.clone(),
                }
            })
            .collect();
        let loops = loops_raw
            .into_iter()
            .map(|(w, (steps, last))| LoopExpr {
                generator: al.format(&w),
                steps: steps
                    .into_iter()
                    .map(|(v, elem, h)| LoopStep {
                        vertex: num[v],
                        element: al.format(&elem),
                        edge: enum_[h.edge],
                        forward: h.side == 0,
                    })
                    .collect(),
                last: al.format(&last),
            })
            .collect();

        let mut probe = self.clone();
        probe.expand(STABILITY_ROUNDS);
        let betti = probe.history[probe.history.len() - STABILITY_ROUNDS..].to_vec();
        let stable = betti.iter().all(|&b| b == rank);
        Ok(CoreReport {
            vertices,
            edges: cedges,
            rank,
            exact: self.exact && betti_exact && probe.exact,
            loops,
            dropped: self.dropped.iter().map(|w| al.format(w)).collect(),
            required: required.to_vec(),
            stabilization: Stabilization { heuristic: true, rounds: STABILITY_ROUNDS, betti, stable },
        })
    }
}
