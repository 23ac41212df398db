use std::fmt;
use std::sync::Arc;

use super::{Membership, Verdict};
use crate::lattice;
use crate::stallings::SubgroupGraph;
use crate::words::{SurfacePresentation, Word};

/// A group with its own word problem, used as a vertex group: in practice a
/// previously built tower stage.
pub trait CompositeGroup: Send + Sync + fmt::Debug {
    fn label(&self) -> String;
    /// Generator indices (into the shared alphabet).
    fn generators(&self) -> Vec<usize>;
    fn relators(&self) -> Vec<Word>;
    fn word_problem(&self, w: &Word, budget: usize) -> Verdict;
    fn membership(&self, subgens: &[Word], w: &Word, budget: usize) -> Membership;
}

#[derive(Clone, Debug)]
pub enum VertexKind {
    Free { gens: Vec<usize> },
    FreeAbelian { gens: Vec<usize> },
    Surface(SurfacePresentation),
    Composite(Arc<dyn CompositeGroup>),
}

#[derive(Clone, Debug)]
pub struct VertexGroup {
    pub label: String,
    pub kind: VertexKind,
}

impl VertexGroup {
    pub fn new(label: impl Into<String>, kind: VertexKind) -> Self {
        VertexGroup { label: label.into(), kind }
    }

    pub fn gens(&self) -> Vec<usize> {
        match &self.kind {
            VertexKind::Free { gens } | VertexKind::FreeAbelian { gens } => gens.clone(),
            VertexKind::Surface(s) => s.gens().to_vec(),
            VertexKind::Composite(c) => c.generators(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            VertexKind::Free { .. } => "free",
            VertexKind::FreeAbelian { .. } => "abelian",
            VertexKind::Surface(s) if s.is_closed() => "surface",
            VertexKind::Surface(_) => "bounded-surface",
            VertexKind::Composite(_) => "composite",
        }
    }

    /// Whether words of this group are decided by free reduction.
    pub fn is_free(&self) -> bool {
        match &self.kind {
            VertexKind::Free { .. } => true,
            VertexKind::Surface(s) => !s.is_closed(),
            _ => false,
        }
    }

    pub fn relators(&self) -> Vec<Word> {
        match &self.kind {
            VertexKind::Free { .. } => Vec::new(),
            VertexKind::FreeAbelian { gens } => {
                let mut out = Vec::new();
                for i in 0..gens.len() {
                    for j in i + 1..gens.len() {
                        out.push(Word::commutator(
                            &Word::generator(gens[i]),
                            &Word::generator(gens[j]),
                        ));
                    }
                }
                out
            }
            VertexKind::Surface(s) => s.relator().cloned().into_iter().collect(),
            VertexKind::Composite(c) => c.relators(),
        }
    }

    /// Coordinates of a word in a free abelian vertex.
    pub fn abelian_coords(&self, w: &Word) -> Option<Vec<i64>> {
        let VertexKind::FreeAbelian { gens } = &self.kind else { return None };
        let mut v = vec![0i64; gens.len()];
        for l in w.letters() {
            let pos = gens.iter().position(|&g| g == l.gen())?;
            v[pos] += if l.is_inverse() { -1 } else { 1 };
        }
        Some(v)
    }

    /// Word with the given coordinates in a free abelian vertex.
    pub fn abelian_word(&self, coords: &[i64]) -> Word {
        let gens = self.gens();
        let mut w = Word::empty();
        for (g, &c) in gens.iter().zip(coords) {
            w = w.mul(&Word::generator(*g).pow(c));
        }
        w
    }

    pub fn word_problem(&self, w: &Word, budget: usize) -> Verdict {
        match &self.kind {
            VertexKind::Free { .. } => Verdict::from_bool(w.reduce().is_empty()),
            VertexKind::FreeAbelian { .. } => match self.abelian_coords(w) {
                Some(c) => Verdict::from_bool(c.iter().all(|&x| x == 0)),
                None => Verdict::Unknown,
            },
            VertexKind::Surface(s) => match s.is_trivial(w) {
                Ok(t) => Verdict::from_bool(t),
                Err(_) => Verdict::Unknown,
            },
            VertexKind::Composite(c) => c.word_problem(w, budget),
        }
    }

    /// Decides `w ∈ <subgens>`. A member comes with an expression: a word in
    /// the subgroup generators (generator `i` standing for `subgens[i]`).
    pub fn membership(&self, subgens: &[Word], w: &Word, budget: usize) -> Membership {
        if subgens.is_empty() {
            return match self.word_problem(w, budget) {
                Verdict::Trivial => Membership::Member(Word::empty()),
                Verdict::Nontrivial => Membership::Nonmember,
                Verdict::Unknown => Membership::Unknown,
            };
        }
        match &self.kind {
            VertexKind::Free { .. } => free_membership(&SubgroupGraph::fold(subgens), w),
            VertexKind::Surface(s) if !s.is_closed() => {
                free_membership(&SubgroupGraph::fold(subgens), w)
            }
            VertexKind::FreeAbelian { .. } => {
                let gens: Option<Vec<Vec<i64>>> =
                    subgens.iter().map(|g| self.abelian_coords(g)).collect();
                match (gens, self.abelian_coords(w)) {
                    (Some(g), Some(t)) => match lattice::solve(&g, &t) {
                        Some(c) => Membership::Member(expression_from_coords(&c)),
                        None => Membership::Nonmember,
                    },
                    _ => Membership::Unknown,
                }
            }
            VertexKind::Surface(s) => surface_cyclic_membership(s, subgens, w, budget),
            VertexKind::Composite(c) => c.membership(subgens, w, budget),
        }
    }
}

pub(crate) fn free_membership(g: &SubgroupGraph, w: &Word) -> Membership {
    match g.express(w) {
        Some(e) => Membership::Member(e),
        None => Membership::Nonmember,
    }
}

/// `y0^c0 y1^c1 ..` in the subgroup-generator symbols.
pub fn expression_from_coords(c: &[i64]) -> Word {
    let mut w = Word::empty();
    for (i, &k) in c.iter().enumerate() {
        w = w.mul(&Word::generator(i).pow(k));
    }
    w
}

/// Longest product of subgroup generators tried by [`short_product`].
const PRODUCT_SEARCH: usize = 2;

/// Products of at most [`PRODUCT_SEARCH`] generators and inverses, as
/// expressions in the generator symbols, shortest first.
fn products(k: usize) -> Vec<Word> {
    let letters: Vec<Word> = (0..k).flat_map(|i| [Word::generator(i), Word::generator(i).inverse()]).collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for len in 1..=PRODUCT_SEARCH {
        layer = layer
            .iter()
            .flat_map(|p| letters.iter().map(move |l| p.mul(l)))
            .filter(|p| p.len() == len)
            .collect();
        layer.sort();
        layer.dedup();
        out.extend(layer.iter().cloned());
    }
    out
}

/// An expression for `w` as a short product of `subgens`, if the word
/// problem confirms one.
pub(crate) fn short_product(subgens: &[Word], w: &Word, wp: impl Fn(&Word) -> Verdict) -> Option<Word> {
    let eval = |e: &Word| {
        e.letters().iter().fold(Word::empty(), |acc, l| {
            let g = &subgens[l.gen()];
            acc.mul(&if l.is_inverse() { g.inverse() } else { g.clone() })
        })
    };
    products(subgens.len()).into_iter().find(|e| wp(&w.mul(&eval(e).inverse())) == Verdict::Trivial)
}

/// Expressions for every generator in `gens`, when each is a short product
/// of `subgens`: the subgroup is then the whole group.
pub(crate) fn generator_expressions(
    subgens: &[Word],
    gens: &[usize],
    wp: impl Fn(&Word) -> Verdict,
) -> Option<Vec<Word>> {
    gens.iter().map(|&g| short_product(subgens, &Word::generator(g), &wp)).collect()
}

/// `w` rewritten letter by letter through the expressions of `gens`.
pub(crate) fn substitute(w: &Word, gens: &[usize], exprs: &[Word]) -> Word {
    w.letters().iter().fold(Word::empty(), |acc, l| {
        let i = gens.iter().position(|&g| g == l.gen()).expect("letter of the vertex group");
        acc.mul(&if l.is_inverse() { exprs[i].inverse() } else { exprs[i].clone() })
    })
}

/// Cyclic subgroups of closed surface groups: exact when the generator has
/// nonzero abelianization, else a search over `|k| <= budget`.
fn surface_cyclic_membership(
    s: &SurfacePresentation,
    subgens: &[Word],
    w: &Word,
    budget: usize,
) -> Membership {
    let nontrivial: Vec<(usize, &Word)> = subgens
        .iter()
        .enumerate()
        .filter(|(_, g)| !s.is_trivial(g).unwrap_or(false))
        .collect();
    if nontrivial.is_empty() {
        return match s.is_trivial(w) {
            Ok(true) => Membership::Member(Word::empty()),
            _ => Membership::Nonmember,
        };
    }
    let rank = s.gens().iter().max().map_or(0, |m| m + 1);
    if nontrivial.len() > 1 {
        // the relator is a product of commutators, so abelianization is a
        // homomorphism and refutes membership exactly on the lattice
        let rows: Vec<Vec<i64>> = subgens.iter().map(|g| g.abelianize(rank)).collect();
        if lattice::solve(&rows, &w.abelianize(rank)).is_none() {
            return Membership::Nonmember;
        }
        let wp = |x: &Word| Verdict::from_bool(s.is_trivial(x).unwrap_or(false));
        if let Some(exprs) = generator_expressions(subgens, s.gens(), wp) {
            return Membership::Member(substitute(w, s.gens(), &exprs));
        }
        return match short_product(subgens, w, wp) {
            Some(e) => Membership::Member(e),
            None => Membership::Unknown,
        };
    }
    let (idx, u) = nontrivial[0];
    let au = u.abelianize(rank);
    let aw = w.abelianize(rank);
    let check = |k: i64| s.is_trivial(&w.mul(&u.pow(-k))).unwrap_or(false);
    if let Some(pos) = au.iter().position(|&x| x != 0) {
        if aw[pos] % au[pos] != 0 {
            return Membership::Nonmember;
        }
        let k = aw[pos] / au[pos];
        if au.iter().zip(&aw).any(|(a, b)| a * k != *b) {
            return Membership::Nonmember;
        }
        return if check(k) {
            Membership::Member(Word::generator(idx).pow(k))
        } else {
            Membership::Nonmember
        };
    }
    if aw.iter().any(|&x| x != 0) {
        return Membership::Nonmember;
    }
    for k in 0..=budget as i64 {
        for k in [k, -k] {
            if check(k) {
                return Membership::Member(Word::generator(idx).pow(k));
            }
        }
    }
    Membership::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn free_examples() {
        let al = Alphabet::new(&["a", "b"]).unwrap();
        let v = VertexGroup::new("F", VertexKind::Free { gens: vec![0, 1] });
        let sub = vec![al.parse("a^2").unwrap(), al.parse("b").unwrap()];
        assert_eq!(
            v.membership(&sub, &al.parse("b").unwrap(), 4),
            Membership::Member(Word::generator(1))
        );
        assert_eq!(v.membership(&sub, &al.parse("[a,b]").unwrap(), 4), Membership::Nonmember);
        assert_eq!(v.membership(&[], &al.parse("a").unwrap(), 4), Membership::Nonmember);
    }

    #[test]
    fn abelian_parity() {
        let al = Alphabet::new(&["x", "y"]).unwrap();
        let v = VertexGroup::new("Z2", VertexKind::FreeAbelian { gens: vec![0, 1] });
        let sub = vec![al.parse("x^2").unwrap(), al.parse("y^2").unwrap()];
        assert_eq!(v.membership(&sub, &al.parse("x y").unwrap(), 4), Membership::Nonmember);
        assert_eq!(
            v.membership(&sub, &al.parse("y^2 x^-4").unwrap(), 4),
            Membership::Member(al.parse("x^-2 y").unwrap().reduce())
        );
    }

    #[test]
    fn surface_cyclic() {
        let al = Alphabet::new(&["a", "b", "c", "d"]).unwrap();
        let s = SurfacePresentation::closed(2, vec![0, 1, 2, 3]).unwrap();
        let v = VertexGroup::new("S", VertexKind::Surface(s));
        let u = al.parse("a c").unwrap();
        let w = al.parse("[a,b][c,d] a c a c").unwrap();
        assert_eq!(v.membership(std::slice::from_ref(&u), &w, 4), Membership::Member(Word::generator(0).pow(2)));
        assert_eq!(v.membership(&[u], &al.parse("a").unwrap(), 4), Membership::Nonmember);
        let k = al.parse("[a,b]").unwrap();
        let w = al.parse("[c,d]^-2").unwrap();
        assert_eq!(v.membership(std::slice::from_ref(&k), &w, 4), Membership::Member(Word::generator(0).pow(2)));
        assert_eq!(v.membership(std::slice::from_ref(&k), &al.parse("[c,d]^-5").unwrap(), 3), Membership::Unknown);
        let two = [k.clone(), al.parse("a").unwrap()];
        assert_eq!(v.membership(&two, &w, 3), Membership::Member(Word::generator(0).pow(2)));
        assert_eq!(v.membership(&two, &al.parse("b").unwrap(), 3), Membership::Nonmember);
        assert_eq!(v.membership(&two, &al.parse("[a,c]").unwrap(), 3), Membership::Unknown);
    }
}
