//! Folding moves, stabilizer transfer, expansion and homology.

use super::oracle::{eval, Decision, Homology, Oracle};
use super::{CoverGraph, FoldOrder};
use crate::lattice;
use crate::words::Word;

/// End `side` of edge `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Half {
    pub edge: usize,
    pub side: usize,
}

impl CoverGraph {
    pub(crate) fn oracle(&self, v: usize) -> Oracle<'_> {
        let base = self.vertices[v].as_ref().expect("live vertex").base;
        Oracle::of(self.base.group(base))
    }

    pub(crate) fn gens(&self, v: usize) -> &[Word] {
        &self.vertices[v].as_ref().expect("live vertex").gens
    }

    pub(crate) fn near(&self, h: Half) -> &Word {
        &self.edges[h.edge].as_ref().expect("live edge").near[h.side]
    }

    pub(crate) fn images(&self, h: Half) -> &[Word] {
        let e = self.edges[h.edge].as_ref().expect("live edge");
        self.base.edges[e.base].images(h.side)
    }

    /// Halves at `v`, in scan order.
    pub(crate) fn halves_at(&self, v: usize) -> Vec<Half> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let Some(e) = e else { continue };
            for side in 0..2 {
                if e.ends[side] == v {
                    out.push(Half { edge: i, side });
                }
            }
        }
        if self.order == FoldOrder::Reverse {
            out.reverse();
        }
        out
    }

    fn base_of(&self, h: Half) -> usize {
        self.edges[h.edge].as_ref().expect("live edge").base
    }

    fn note(&mut self, exact: bool) {
        self.exact &= exact;
    }

    fn decide<T>(&mut self, d: Decision<T>) -> Option<T> {
        match d {
            Decision::Yes(x) => Some(x),
            Decision::No => None,
            Decision::Unknown => {
                self.exact = false;
                None
            }
        }
    }

    /// Folds until no two halves at a vertex can be identified and all edge
    /// stabilizers agree with both endpoint groups.
    pub(crate) fn fold_all(&mut self) {
        loop {
            if self.fold_once() {
                continue;
            }
            if self.transfer_once() {
                continue;
            }
            break;
        }
        self.tidy();
    }

    /// Replaces generators of subgroups of abelian vertices by a lattice basis.
    fn tidy(&mut self) {
        for v in self.vertex_ids() {
            let Oracle::Abelian(g) = self.oracle(v) else { continue };
            let g = g.clone();
            let rows: Vec<Vec<i64>> = self.gens(v).iter().filter_map(|w| g.abelian_coords(w)).collect();
            let basis = lattice::basis(&rows, g.gens().len());
            self.vertices[v].as_mut().expect("live vertex").gens = basis.iter().map(|c| g.abelian_word(c)).collect();
        }
    }

    fn fold_once(&mut self) -> bool {
        let mut ids = self.vertex_ids();
        if self.order == FoldOrder::Reverse {
            ids.reverse();
        }
        for x in ids {
            let halves = self.halves_at(x);
            for i in 0..halves.len() {
                for j in i + 1..halves.len() {
                    let (h1, h2) = (halves[i], halves[j]);
                    if h1.side != h2.side || self.base_of(h1) != self.base_of(h2) {
                        continue;
                    }
                    let d = self.oracle(x).double_coset(
                        self.gens(x),
                        self.near(h1),
                        self.images(h1),
                        self.near(h2),
                        self.budget,
                    );
                    if let Some(c) = self.decide(d) {
                        self.fold(h1, h2, &c);
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Identifies `h2` with `h1`, given `near(h2) ∈ H near(h1) E(c)`.
    fn fold(&mut self, h1: Half, h2: Half, c: &[i64]) {
        let o = 1 - h1.side;
        let far_images = self.images(Half { edge: h2.edge, side: o }).to_vec();
        let neg: Vec<i64> = c.iter().map(|x| -x).collect();
        let n1 = self.near(h1).clone();
        {
            let e2 = self.edges[h2.edge].as_mut().expect("live edge");
            e2.near[h1.side] = n1;
            e2.near[o] = e2.near[o].mul(&eval(&far_images, &neg)).reduce();
        }
        let e1 = self.edges[h1.edge].clone().expect("live edge");
        let e2 = self.edges[h2.edge].clone().expect("live edge");
        let (y1, y2) = (e1.ends[o], e2.ends[o]);
        if y1 == y2 {
            self.push_gen(y1, e1.near[o].mul(&e2.near[o].inverse()));
        } else {
            let (keep, drop, delta) = if y2 != 0 {
                (y1, y2, e1.near[o].mul(&e2.near[o].inverse()))
            } else {
                (y2, y1, e2.near[o].mul(&e1.near[o].inverse()))
            };
            self.conjugate(drop, &delta);
            self.merge(keep, drop);
        }
        let mut lat = e1.lattice.clone();
        lat.extend(e2.lattice.iter().cloned());
        let r = self.base.edges[e1.base].rank();
        let e1m = self.edges[h1.edge].as_mut().expect("live edge");
        e1m.support |= e2.support;
        e1m.lattice = lattice::basis(&lat, r);
        self.edges[h2.edge] = None;
    }

    /// Replaces `H_v` by `δ H_v δ^-1` and every near label at `v` by `δ·near`.
    fn conjugate(&mut self, v: usize, delta: &Word) {
        for h in self.halves_at(v) {
            let e = self.edges[h.edge].as_mut().expect("live edge");
            e.near[h.side] = delta.mul(&e.near[h.side]).reduce();
        }
        let x = self.vertices[v].as_mut().expect("live vertex");
        x.gens = x.gens.iter().map(|g| delta.mul(g).mul(&delta.inverse()).reduce()).collect();
    }

    fn merge(&mut self, keep: usize, drop: usize) {
        let gone = self.vertices[drop].take().expect("live vertex");
        for e in self.edges.iter_mut().flatten() {
            for end in e.ends.iter_mut() {
                if *end == drop {
                    *end = keep;
                }
            }
        }
        for g in gone.gens {
            self.push_gen(keep, g);
        }
        let k = self.vertices[keep].as_mut().expect("live vertex");
        k.expansion &= gone.expansion;
    }

    /// Makes one edge stabilizer consistent with its endpoint groups,
    /// pushing new stabilizer elements into whichever end lacks them.
    fn transfer_once(&mut self) -> bool {
        for id in 0..self.edges.len() {
            let Some(e) = self.edges[id].clone() else { continue };
            let r = self.base.edges[e.base].rank();
            if r == 0 {
                continue;
            }
            let mut found = [Vec::new(), Vec::new()];
            for (side, slot) in found.iter_mut().enumerate() {
                let h = Half { edge: id, side };
                let v = e.ends[side];
                let (basis, exact) = self.oracle(v).preimage(self.gens(v), self.near(h), self.images(h), self.budget);
                self.note(exact);
                *slot = basis;
            }
            let mut all = e.lattice.clone();
            all.extend(found[0].iter().cloned());
            all.extend(found[1].iter().cloned());
            let union = lattice::basis(&all, r);
            let mut changed = false;
            for side in 0..2 {
                let mut known = e.synced[side].clone();
                known.extend(found[side].iter().cloned());
                let imgs = self.images(Half { edge: id, side }).to_vec();
                for c in &union {
                    if !lattice::contains(&known, c) {
                        let n = &e.near[side];
                        let w = n.mul(&eval(&imgs, c)).mul(&n.inverse());
                        self.push_gen(e.ends[side], w);
                        changed = true;
                    }
                }
            }
            let em = self.edges[id].as_mut().expect("live edge");
            em.lattice = union.clone();
            em.synced = [union.clone(), union];
            if changed {
                return true;
            }
        }
        false
    }

    /// Adds a fresh edge for every near label in `{1} ∪ gens^±1` not yet in
    /// the double coset of an existing half.
    pub(crate) fn expansion_round(&mut self) {
        for x in self.vertex_ids() {
            let p = self.vertices[x].as_ref().expect("live vertex").base;
            let mut cands = vec![Word::empty()];
            if let Some(g) = self.base.group(p) {
                for s in g.gens() {
                    cands.push(Word::generator(s));
                    cands.push(Word::generator(s).inverse());
                }
            }
            for be in 0..self.base.edges.len() {
                for side in 0..2 {
                    if self.base.edges[be].end(side) != p {
                        continue;
                    }
                    for n in &cands {
                        let existing: Vec<Half> =
                            self.halves_at(x).into_iter().filter(|h| h.side == side && self.base_of(*h) == be).collect();
                        let mut covered = false;
                        for h in existing {
                            let d = self.oracle(x).double_coset(self.gens(x), self.near(h), self.images(h), n, self.budget);
                            match d {
                                Decision::Yes(_) => covered = true,
                                Decision::No => {}
                                Decision::Unknown => {
                                    self.exact = false;
                                    covered = true;
                                }
                            }
                            if covered {
                                break;
                            }
                        }
                        if covered {
                            continue;
                        }
                        let y = self.add_vertex(self.base.edges[be].end(1 - side), true);
                        let mut ends = [x, x];
                        ends[1 - side] = y;
                        let mut near = [Word::empty(), Word::empty()];
                        near[side] = n.clone();
                        self.add_edge(be, ends, near, false);
                    }
                }
            }
        }
    }

    /// First Betti number of the subgraph on `edges` (with `vertices` as
    /// its vertex set).
    pub(crate) fn betti_of(&self, vertices: &[usize], edges: &[usize]) -> (usize, bool) {
        let n = self.base.graph().alphabet().len();
        let homs: Vec<Homology> =
            vertices.iter().map(|&v| self.oracle(v).homology(self.gens(v), n, self.budget)).collect();
        let mut offset = Vec::new();
        let mut total = 0;
        for h in &homs {
            offset.push(total);
            total += h.width();
        }
        let mut exact = homs.iter().all(Homology::is_exact);
        let pos = |v: usize| vertices.iter().position(|&x| x == v).expect("vertex in subgraph");
        let mut rels = Vec::new();
        for (k, h) in homs.iter().enumerate() {
            for r in h.relations() {
                let mut row = vec![0i64; total];
                row[offset[k]..offset[k] + r.len()].copy_from_slice(r);
                rels.push(row);
            }
        }
        let mut rows = rels.clone();
        for &id in edges {
            let e = self.edges[id].as_ref().expect("live edge");
            for c in &e.lattice {
                let mut row = vec![0i64; total];
                for side in 0..2 {
                    let k = pos(e.ends[side]);
                    let imgs = self.base.edges[e.base].images(side);
                    let n = &e.near[side];
                    let w = n.mul(&eval(imgs, c)).mul(&n.inverse());
                    match homs[k].coords(&w) {
                        Some(x) => {
                            let sign = if side == 0 { 1 } else { -1 };
                            for (i, v) in x.iter().enumerate() {
                                row[offset[k] + i] += sign * v;
                            }
                        }
                        None => exact = false,
                    }
                }
                rows.push(row);
            }
        }
        let vertex_rank: usize = homs.iter().map(Homology::rank).sum();
        let image = lattice::rank(&rows, total) - lattice::rank(&rels, total);
        let graph = edges.len() + 1 - vertices.len();
        (graph + vertex_rank - image, exact)
    }

    /// First Betti number of the whole generated graph.
    pub fn betti(&mut self) -> usize {
        let v = self.vertex_ids();
        let e = self.edge_ids();
        let (b, exact) = self.betti_of(&v, &e);
        self.note(exact);
        b
    }
}
