//! Subgroup questions inside a single vertex group: double cosets, edge
//! preimages and first homology coordinates.

use crate::graphgroups::{Membership, Verdict, VertexGroup, VertexKind};
use crate::lattice;
use crate::stallings::{in_double_coset, SubgroupGraph};
use crate::words::Word;

/// Largest coefficient tried when searching edge-group elements in vertex
/// groups without an exact procedure.
const SEARCH: i64 = 3;
/// Largest exponent tried for edge preimages in such groups.
const POWER_SEARCH: i64 = 8;
/// Cap on exponent search once a free double coset is known to be hit.
const FREE_EXPONENT_CAP: i64 = 10_000;
/// Coefficient bound when searching relations among commuting generators.
const RELATION_SEARCH: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Decision<T> {
    Yes(T),
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Oracle<'a> {
    Trivial,
    Free,
    Abelian(&'a VertexGroup),
    General(&'a VertexGroup),
}

/// `prod images_i^c_i`; the images commute.
pub(crate) fn eval(images: &[Word], c: &[i64]) -> Word {
    images.iter().zip(c).fold(Word::empty(), |acc, (w, &k)| acc.mul(&w.pow(k)))
}

fn boxed(r: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v| (-s..=s).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).max().unwrap_or(0), v.clone()));
    out
}

impl<'a> Oracle<'a> {
    pub(crate) fn of(g: Option<&'a VertexGroup>) -> Self {
        match g {
            None => Oracle::Trivial,
            Some(v) => match &v.kind {
                VertexKind::Free { .. } => Oracle::Free,
                VertexKind::Surface(s) if !s.is_closed() => Oracle::Free,
                VertexKind::FreeAbelian { .. } => Oracle::Abelian(v),
                _ => Oracle::General(v),
            },
        }
    }

    fn coords(v: &VertexGroup, ws: &[Word]) -> Vec<Vec<i64>> {
        ws.iter().map(|w| v.abelian_coords(w).expect("word in abelian vertex")).collect()
    }

    /// Decides `n2 ∈ H n1 <E>`, returning edge coefficients `c` with
    /// `n2 ∈ H n1 E(c)`.
    pub(crate) fn double_coset(
        &self,
        h: &[Word],
        n1: &Word,
        e: &[Word],
        n2: &Word,
        budget: usize,
    ) -> Decision<Vec<i64>> {
        let r = e.len();
        match self {
            Oracle::Trivial => Decision::Yes(vec![0; r]),
            Oracle::Free => {
                if !in_double_coset(h, n1, e, n2) {
                    return Decision::No;
                }
                if r == 0 {
                    return Decision::Yes(Vec::new());
                }
                let g = SubgroupGraph::fold(h);
                for k in (0..=FREE_EXPONENT_CAP).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }) {
                    if g.contains(&n2.mul(&e[0].pow(-k)).mul(&n1.inverse())) {
                        return Decision::Yes(vec![k]);
                    }
                }
                Decision::Unknown
            }
            Oracle::Abelian(v) => {
                let mut rows = Self::coords(v, h);
                rows.extend(Self::coords(v, e));
                let target = v.abelian_coords(&n2.mul(&n1.inverse())).expect("word in abelian vertex");
                match lattice::solve(&rows, &target) {
                    Some(c) => Decision::Yes(c[h.len()..].to_vec()),
                    None => Decision::No,
                }
            }
            Oracle::General(v) => {
                if r == 0 {
                    return match v.membership(h, &n2.mul(&n1.inverse()), budget) {
                        Membership::Member(_) => Decision::Yes(Vec::new()),
                        Membership::Nonmember => Decision::No,
                        Membership::Unknown => Decision::Unknown,
                    };
                }
                if h.is_empty() {
                    return match v.membership(e, &n1.inverse().mul(n2), budget) {
                        Membership::Member(x) => Decision::Yes(x.abelianize(r)),
                        Membership::Nonmember => Decision::No,
                        Membership::Unknown => Decision::Unknown,
                    };
                }
                for c in boxed(r, SEARCH) {
                    let w = n2.mul(&eval(e, &c).inverse()).mul(&n1.inverse());
                    if let Membership::Member(_) = v.membership(h, &w, budget) {
                        return Decision::Yes(c);
                    }
                }
                Decision::Unknown
            }
        }
    }

    /// Basis of `{ c : n E(c) n^-1 ∈ H }` and whether it is exact.
    pub(crate) fn preimage(&self, h: &[Word], n: &Word, e: &[Word], budget: usize) -> (Vec<Vec<i64>>, bool) {
        let r = e.len();
        if r == 0 || h.is_empty() {
            // edge maps are injective
            return (Vec::new(), true);
        }
        match self {
            Oracle::Trivial => (Vec::new(), true),
            Oracle::Free => {
                let g = SubgroupGraph::fold(h);
                let conj = n.mul(&e[0]).mul(&n.inverse());
                // the orbit of a vertex under a cyclic word has at most |V| elements
                for d in 1..=g.num_vertices() as i64 + 1 {
                    if g.contains(&conj.pow(d)) {
                        return (vec![vec![d]], true);
                    }
                }
                (Vec::new(), true)
            }
            Oracle::Abelian(v) => {
                let m = v.gens().len();
                (lattice::preimage(&Self::coords(v, e), &Self::coords(v, h), m), true)
            }
            Oracle::General(v) => {
                let mut found = Vec::new();
                let cands: Vec<Vec<i64>> = if r == 1 {
                    (1..=POWER_SEARCH).map(|d| vec![d]).collect()
                } else {
                    boxed(r, SEARCH).into_iter().filter(|c| c.iter().any(|&x| x != 0)).collect()
                };
                for c in cands {
                    if lattice::contains(&found, &c) {
                        continue;
                    }
                    let w = n.mul(&eval(e, &c)).mul(&n.inverse());
                    if let Membership::Member(_) = v.membership(h, &w, budget) {
                        found.push(c);
                    }
                }
                (lattice::basis(&found, r), false)
            }
        }
    }

    /// First homology of `H`: exact for free and abelian vertices.
    pub(crate) fn homology(&self, h: &[Word], alphabet_len: usize, budget: usize) -> Homology {
        match self {
            Oracle::Trivial => Homology::Trivial,
            Oracle::Free => Homology::Free(SubgroupGraph::fold(h)),
            Oracle::Abelian(v) => {
                let basis = lattice::basis(&Self::coords(v, h), v.gens().len());
                Homology::Abelian((*v).clone(), basis)
            }
            Oracle::General(v) => {
                let commuting = (0..h.len()).all(|i| {
                    (i + 1..h.len()).all(|j| v.word_problem(&Word::commutator(&h[i], &h[j]), budget) == Verdict::Trivial)
                });
                if !commuting {
                    let rows: Vec<Vec<i64>> = h.iter().map(|w| w.abelianize(alphabet_len)).collect();
                    return Homology::Ambient(lattice::basis(&rows, alphabet_len), alphabet_len);
                }
                // relations among the generators, found by search
                let mut rel = Vec::new();
                for c in boxed(h.len(), RELATION_SEARCH) {
                    if c.iter().all(|&x| x == 0) || lattice::contains(&rel, &c) {
                        continue;
                    }
                    if v.word_problem(&eval(h, &c), budget) == Verdict::Trivial {
                        rel.push(c);
                    }
                }
                Homology::Commuting { vertex: (*v).clone(), gens: h.to_vec(), relations: lattice::basis(&rel, h.len()), budget }
            }
        }
    }
}

pub(crate) enum Homology {
    Trivial,
    Free(SubgroupGraph),
    Abelian(VertexGroup, Vec<Vec<i64>>),
    /// Commuting generators in a vertex without exact procedures: the
    /// generator lattice modulo the relations found.
    Commuting { vertex: VertexGroup, gens: Vec<Word>, relations: Vec<Vec<i64>>, budget: usize },
    /// Image in the abelianization of the whole group: a lower bound.
    Ambient(Vec<Vec<i64>>, usize),
}

impl Homology {
    pub(crate) fn is_exact(&self) -> bool {
        matches!(self, Homology::Trivial | Homology::Free(_) | Homology::Abelian(..))
    }

    /// Width of the coordinate vectors.
    pub(crate) fn width(&self) -> usize {
        match self {
            Homology::Trivial => 0,
            Homology::Free(g) => g.rank(),
            Homology::Abelian(_, b) | Homology::Ambient(b, _) => b.len(),
            Homology::Commuting { gens, .. } => gens.len(),
        }
    }

    /// Coordinate vectors that vanish in homology.
    pub(crate) fn relations(&self) -> &[Vec<i64>] {
        match self {
            Homology::Commuting { relations, .. } => relations,
            _ => &[],
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.width() - self.relations().len()
    }

    pub(crate) fn coords(&self, w: &Word) -> Option<Vec<i64>> {
        match self {
            Homology::Trivial => Some(Vec::new()),
            Homology::Free(g) => g.basis_coordinates(w),
            Homology::Abelian(v, basis) => lattice::solve(basis, &v.abelian_coords(w)?),
            Homology::Ambient(basis, n) => lattice::solve(basis, &w.abelianize(*n)),
            Homology::Commuting { vertex, gens, budget, .. } => match vertex.membership(gens, w, *budget) {
                Membership::Member(e) => Some(e.abelianize(gens.len())),
                _ => None,
            },
        }
    }
}
