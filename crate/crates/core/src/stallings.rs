//! Stallings folding of finitely generated subgroups of free groups.
//!
//! Every edge carries, besides its generator letter, a word in the subgroup
//! generators (the "label"). The labels satisfy `eval(label) = P(u) x
//! P(v)^-1` for a fixed potential `P` with `P(base) = 1`, so the labels read
//! along a closed path at the base express the path's element in terms of the
//! subgroup generators. Folding updates labels to preserve this.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::words::{Letter, Word};

#[derive(Clone, Debug)]
struct RawEdge {
    from: usize,
    to: usize,
    gen: usize,
    label: Word,
    alive: bool,
}

/// Folded, based subgroup graph.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    num_vertices: usize,
    num_subgens: usize,
    /// `(vertex, letter) -> (target, label read in that direction)`
    step: HashMap<(usize, Letter), (usize, Word)>,
    edges: Vec<(usize, usize, usize)>,
    /// tree edge flags in spanning tree from base; non-tree edges index the basis
    basis_index: HashMap<usize, usize>,
    edge_of: HashMap<(usize, Letter), (usize, bool)>,
}

impl SubgroupGraph {
    /// Folds the flower of the (reduced) subgroup generators.
    pub fn fold(subgens: &[Word]) -> Self {
        let mut n = 1usize;
        let mut edges: Vec<RawEdge> = Vec::new();
        for (i, g) in subgens.iter().enumerate() {
            let g = g.reduce();
            if g.is_empty() {
                continue;
            }
            let letters = g.letters();
            let mut prev = 0usize;
            for (j, &l) in letters.iter().enumerate() {
                let last = j + 1 == letters.len();
                let next = if last {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                let label = if last { Word::generator(i) } else { Word::empty() };
                let (from, to, label) =
                    if l.is_inverse() { (next, prev, label.inverse()) } else { (prev, next, label) };
                edges.push(RawEdge { from, to, gen: l.gen(), label, alive: true });
                prev = next;
            }
        }
        fold_edges(&mut edges);
        Self::compact(n, edges, subgens.len())
    }

    fn compact(n: usize, edges: Vec<RawEdge>, num_subgens: usize) -> Self {
        let live: Vec<RawEdge> = edges.into_iter().filter(|e| e.alive).collect();
        // BFS renumbering from the base, letters in declared order
        let mut ends: BTreeMap<usize, Vec<(Letter, usize, usize)>> = BTreeMap::new();
        for (k, e) in live.iter().enumerate() {
            ends.entry(e.from).or_default().push((Letter::new(e.gen, false), e.to, k));
            ends.entry(e.to).or_default().push((Letter::new(e.gen, true), e.from, k));
        }
        for v in ends.values_mut() {
            v.sort();
        }
        let mut num = vec![usize::MAX; n];
        num[0] = 0;
        let mut count = 1;
        let mut queue = VecDeque::from([0usize]);
        let mut tree_edges = vec![false; live.len()];
        while let Some(v) = queue.pop_front() {
            for &(_, w, k) in ends.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if num[w] == usize::MAX {
                    num[w] = count;
                    count += 1;
                    tree_edges[k] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut step = HashMap::new();
        let mut edge_of = HashMap::new();
        let mut out_edges = Vec::new();
        let mut basis_index = HashMap::new();
        for (k, e) in live.iter().enumerate() {
            let (u, v) = (num[e.from], num[e.to]);
            let l = Letter::new(e.gen, false);
            step.insert((u, l), (v, e.label.clone()));
            step.insert((v, l.inverse()), (u, e.label.inverse()));
            edge_of.insert((u, l), (k, true));
            edge_of.insert((v, l.inverse()), (k, false));
            out_edges.push((u, e.gen, v));
            if !tree_edges[k] {
                let idx = basis_index.len();
                basis_index.insert(k, idx);
            }
        }
        SubgroupGraph {
            num_vertices: count,
            num_subgens,
            step,
            edges: out_edges,
            basis_index,
            edge_of,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Rank of the subgroup (first Betti number of the graph).
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices
    }

    /// Edges as `(from, generator, to)` with vertices numbered by BFS from the base.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    /// Sorted edge list; equal for isomorphic based labeled graphs.
    pub fn canonical(&self) -> Vec<(usize, usize, usize)> {
        let mut e = self.edges.clone();
        e.sort();
        e
    }

    /// Every vertex has an outgoing and incoming edge for each of `rank` generators.
    pub fn is_complete(&self, rank: usize) -> bool {
        (0..self.num_vertices).all(|v| {
            (0..rank).all(|g| {
                self.step.contains_key(&(v, Letter::new(g, false)))
                    && self.step.contains_key(&(v, Letter::new(g, true)))
            })
        })
    }

    /// Follows `w` from vertex `v`; `None` when the path leaves the graph.
    pub fn read_from(&self, v: usize, w: &Word) -> Option<(usize, Word)> {
        let mut cur = v;
        let mut expr = Word::empty();
        for &l in w.reduce().letters() {
            let (next, lab) = self.step.get(&(cur, l))?;
            expr = expr.mul(lab);
            cur = *next;
        }
        Some((cur, expr))
    }

    pub fn contains(&self, w: &Word) -> bool {
        matches!(self.read_from(0, w), Some((0, _)))
    }

    /// Expression of `w` as a word in the subgroup generators, if a member.
    pub fn express(&self, w: &Word) -> Option<Word> {
        match self.read_from(0, w) {
            Some((0, e)) => Some(e),
            _ => None,
        }
    }

    /// Coordinates of a member in the abelianization of the subgroup, in the
    /// free basis given by the non-tree edges.
    pub fn basis_coordinates(&self, w: &Word) -> Option<Vec<i64>> {
        let mut coords = vec![0i64; self.basis_index.len()];
        let mut cur = 0;
        for &l in w.reduce().letters() {
            let (next, _) = self.step.get(&(cur, l))?;
            let (k, fwd) = self.edge_of[&(cur, l)];
            if let Some(&i) = self.basis_index.get(&k) {
                coords[i] += if fwd { 1 } else { -1 };
            }
            cur = *next;
        }
        (cur == 0).then_some(coords)
    }

    pub fn num_subgens(&self) -> usize {
        self.num_subgens
    }
}

/// Folds until deterministic; returns the vertex merges `(dropped, kept)` in order.
fn fold_edges(edges: &mut [RawEdge]) -> Vec<(usize, usize)> {
    let mut merges = Vec::new();
    loop {
        let Some((p, e1, e2)) = find_fold(edges) else { return merges };
        let (q1, lam1) = end_from(&edges[e1], p);
        let (q2, lam2) = end_from(&edges[e2], p);
        if q1 == q2 {
            edges[e2].alive = false;
            continue;
        }
        let (keep, drop, lk, ld) = if q2 == 0 { (q2, q1, lam2, lam1) } else { (q1, q2, lam1, lam2) };
        let dropped_edge = if q2 == 0 { e1 } else { e2 };
        let delta = lk.inverse().mul(&ld);
        for e in edges.iter_mut().filter(|e| e.alive) {
            if e.from == drop {
                e.label = delta.mul(&e.label);
                e.from = keep;
            }
            if e.to == drop {
                e.label = e.label.mul(&delta.inverse());
                e.to = keep;
            }
        }
        edges[dropped_edge].alive = false;
        merges.push((drop, keep));
    }
}

/// Whether `y` lies in the double coset `<h> x <k>` of the free group.
///
/// Glues the flower of `h`, a path reading `x` and the flower of `k`, folds,
/// and reads `y` from the start of the path.
pub fn in_double_coset(h: &[Word], x: &Word, k: &[Word], y: &Word) -> bool {
    let mut edges = Vec::new();
    let mut n = 1usize;
    let path = |edges: &mut Vec<RawEdge>, n: &mut usize, start: usize, w: &Word, end: Option<usize>| {
        let letters = w.letters();
        let mut prev = start;
        for (j, &l) in letters.iter().enumerate() {
            let next = match end {
                Some(e) if j + 1 == letters.len() => e,
                _ => {
                    *n += 1;
                    *n - 1
                }
            };
            let (from, to) = if l.is_inverse() { (next, prev) } else { (prev, next) };
            edges.push(RawEdge { from, to, gen: l.gen(), label: Word::empty(), alive: true });
            prev = next;
        }
        prev
    };
    for g in h {
        path(&mut edges, &mut n, 0, &g.reduce(), Some(0));
    }
    let mut z = path(&mut edges, &mut n, 0, &x.reduce(), None);
    for g in k {
        path(&mut edges, &mut n, z, &g.reduce(), Some(z));
    }
    for (drop, keep) in fold_edges(&mut edges) {
        if z == drop {
            z = keep;
        }
    }
    let mut step: HashMap<(usize, Letter), usize> = HashMap::new();
    for e in edges.iter().filter(|e| e.alive) {
        step.insert((e.from, Letter::new(e.gen, false)), e.to);
        step.insert((e.to, Letter::new(e.gen, true)), e.from);
    }
    let mut cur = 0;
    for &l in y.reduce().letters() {
        match step.get(&(cur, l)) {
            Some(&next) => cur = next,
            None => return false,
        }
    }
    cur == z
}

/// Other endpoint and label when `e` is read starting at `p`.
fn end_from(e: &RawEdge, p: usize) -> (usize, Word) {
    if e.from == p {
        (e.to, e.label.clone())
    } else {
        (e.from, e.label.inverse())
    }
}

fn find_fold(edges: &[RawEdge]) -> Option<(usize, usize, usize)> {
    let mut seen: HashMap<(usize, Letter), usize> = HashMap::new();
    for (k, e) in edges.iter().enumerate().filter(|(_, e)| e.alive) {
        for (v, l) in [(e.from, Letter::new(e.gen, false)), (e.to, Letter::new(e.gen, true))] {
            if let Some(&other) = seen.get(&(v, l)) {
                if other != k {
                    return Some((v, other, k));
                }
            } else {
                seen.insert((v, l), k);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, GroupHom};

    fn al() -> Alphabet {
        Alphabet::new(&["a", "b"]).unwrap()
    }

    fn words(s: &[&str]) -> Vec<Word> {
        s.iter().map(|x| al().parse(x).unwrap()).collect()
    }

    #[test]
    fn membership_examples() {
        let g = SubgroupGraph::fold(&words(&["a^2", "b"]));
        let b = al().parse("b").unwrap();
        assert_eq!(g.express(&b), Some(Word::generator(1)));
        assert!(!g.contains(&al().parse("[a,b]").unwrap()));
        assert!(g.contains(&al().parse("a^2 b a^-2").unwrap()));
    }

    #[test]
    fn index_two_kernel() {
        let g = SubgroupGraph::fold(&words(&["a^2", "b", "a b a^-1"]));
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.rank(), 3);
        assert!(g.is_complete(2));
    }

    #[test]
    fn expressions_evaluate_back() {
        let gens = words(&["a b a^-1", "a^2", "b a b"]);
        let g = SubgroupGraph::fold(&gens);
        let eval = GroupHom::new(gens.clone());
        for probe in ["a b^3 a^-1 a^2", "b a b a b a^-1", "a^-2 b a b"] {
            let w = al().parse(probe).unwrap();
            let e = g.express(&w).unwrap();
            assert_eq!(eval.apply(&e).unwrap(), w.reduce(), "{probe}");
        }
    }

    #[test]
    fn double_cosets() {
        let w = |s: &str| al().parse(s).unwrap();
        let h = words(&["a"]);
        let k = words(&["[a,b]"]);
        assert!(in_double_coset(&h, &w("b"), &k, &w("a^3 b [a,b]^-2")));
        assert!(!in_double_coset(&h, &w("b"), &k, &w("b a")));
        assert!(in_double_coset(&[], &w(""), &k, &w("[a,b]^5")));
        assert!(!in_double_coset(&[], &w(""), &k, &w("a")));
        assert!(in_double_coset(&h, &w(""), &[], &w("a^-4")));
        // brute force over small exponents
        for (p, q) in [(2, -1), (-3, 2), (0, 0)] {
            let y = w("a").pow(p).mul(&w("b a")).mul(&w("[a,b]").pow(q));
            assert!(in_double_coset(&h, &w("b a"), &k, &y));
        }
    }

    #[test]
    fn basis_coordinates_of_cyclic() {
        let g = SubgroupGraph::fold(&words(&["[a,b]"]));
        assert_eq!(g.rank(), 1);
        let w = al().parse("[a,b]^-3").unwrap();
        assert_eq!(g.basis_coordinates(&w).unwrap().iter().map(|x| x.abs()).sum::<i64>(), 3);
    }
}
