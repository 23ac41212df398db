use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::graphgroups::{
    expression_from_coords, generator_expressions, short_product, substitute, CompositeGroup, GraphBuilder, GraphOfGroups, Membership, Presentation,
    Verdict, VertexGroup, VertexKind,
};
use crate::lattice;
use crate::stallings::SubgroupGraph;
use crate::words::{Alphabet, GroupHom, SurfacePresentation, Word};

use super::{Summand, TowerError};

/// Number of witness-family homs kept per stage for fast nontriviality
/// proofs and membership functionals.
const PROBES: usize = 6;
/// Largest shell searched when picking probes.
const PROBE_SHELL: i64 = 4;

#[derive(Clone, Debug)]
pub(crate) enum BaseFactor {
    Free,
    Abelian { gens: Vec<usize>, target: usize },
    Surface { gens: Vec<usize>, genus: usize },
}

/// How one stage contributes to the witness family.
#[derive(Clone, Debug)]
pub(crate) enum Piece {
    Base { factors: Vec<BaseFactor>, target: Alphabet },
    /// Block letter `l` maps to `w^N`.
    Letters { letters: Vec<(usize, Word)> },
    /// `b ↦ b a^N` on each handle, then the stored retraction.
    Twist { handles: Vec<(usize, usize)> },
}

impl Piece {
    fn dim(&self) -> usize {
        match self {
            Piece::Base { factors, .. } => factors
                .iter()
                .map(|f| match f {
                    BaseFactor::Free => 0,
                    BaseFactor::Abelian { gens, .. } => gens.len(),
                    BaseFactor::Surface { genus, .. } => *genus,
                })
                .sum(),
            Piece::Letters { letters } => letters.len(),
            Piece::Twist { handles } => handles.len(),
        }
    }
}

/// Data reused across membership queries for one tuple of subgroup generators.
#[derive(Debug)]
struct SubgroupData {
    commuting: Verdict,
    /// Per functional: its values on the subgroup generators.
    eqs: Vec<(Functional, Vec<i64>)>,
    /// Some probe maps every generator to 1.
    killed_by: Vec<usize>,
    /// Expressions of every stage generator, when the subgroup is visibly
    /// the whole group. Only computed for noncommuting generators.
    whole: Option<Vec<Word>>,
}

#[derive(Debug)]
enum Functional {
    Ab(Vec<i64>),
    Probe { hom: usize, root: SubgroupGraph },
}

/// One stage `Γ_n` of a tower, as a graph of groups over stage `n-1`.
#[derive(Debug)]
pub struct Stage {
    index: usize,
    alphabet: Alphabet,
    presentation: Presentation,
    graph: GraphOfGroups,
    prev: Option<Arc<Stage>>,
    retraction: GroupHom,
    piece: Piece,
    dim: usize,
    probes: Vec<GroupHom>,
    ab_functionals: Vec<Vec<i64>>,
    cache: Mutex<HashMap<Vec<Word>, Arc<SubgroupData>>>,
}

impl Stage {
    pub fn index(&self) -> usize {
        self.index
    }

    /// Generators of this stage (a prefix-extension of the previous stage's).
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// The splitting used for the word problem. Its alphabet may contain
    /// hidden letters beyond `alphabet()`.
    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn prev(&self) -> Option<&Arc<Stage>> {
        self.prev.as_ref()
    }

    /// Retraction onto the previous stage (identity at stage 0).
    pub fn retraction(&self) -> &GroupHom {
        &self.retraction
    }

    /// Number of witness-family parameters up to this stage.
    pub fn family_dim(&self) -> usize {
        self.dim
    }

    fn base(&self) -> &Stage {
        match &self.prev {
            Some(p) => p.base(),
            None => self,
        }
    }

    /// Free alphabet that witness homs land in.
    pub fn target_alphabet(&self) -> &Alphabet {
        match &self.base().piece {
            Piece::Base { target, .. } => target,
            _ => unreachable!("stage 0 carries the base piece"),
        }
    }

    /// Member of the witness family for a parameter vector (entries >= 1).
    pub fn family_hom(&self, params: &[i64], seed: u64) -> GroupHom {
        assert_eq!(params.len(), self.dim, "parameter count");
        let prev_dim = self.prev.as_ref().map_or(0, |p| p.dim);
        let own = self.piece_hom(&params[prev_dim..], seed);
        match &self.prev {
            Some(p) => {
                own.then(&p.family_hom(&params[..prev_dim], seed)).expect("stage homs compose")
            }
            None => own,
        }
    }

    fn piece_hom(&self, params: &[i64], seed: u64) -> GroupHom {
        match &self.piece {
            Piece::Letters { letters } => {
                let mut h = self.retraction.clone();
                for ((l, w), &n) in letters.iter().zip(params) {
                    h.set_image(*l, w.pow(n));
                }
                h
            }
            Piece::Twist { handles } => {
                let mut h = self.retraction.clone();
                for (&(a, b), &n) in handles.iter().zip(params) {
                    let img = self.retraction.image(b).mul(&self.retraction.image(a).pow(n));
                    h.set_image(b, img);
                }
                h
            }
            Piece::Base { factors, .. } => {
                let mut h = GroupHom::identity(self.alphabet.len());
                let mut rest = params;
                for f in factors {
                    match f {
                        BaseFactor::Free => {}
                        BaseFactor::Abelian { gens, target } => {
                            for (&g, &n) in gens.iter().zip(rest) {
                                h.set_image(g, Word::generator(*target).pow(n));
                            }
                            rest = &rest[gens.len()..];
                        }
                        BaseFactor::Surface { gens, genus } => {
                            surface_fold(&mut h, gens, *genus, &rest[..*genus], seed);
                            rest = &rest[*genus..];
                        }
                    }
                }
                h
            }
        }
    }

    /// Parameter vectors in search order: increasing max-norm, lexicographic
    /// inside a shell.
    pub fn parameter_order(dim: usize, max_norm: i64) -> impl Iterator<Item = Vec<i64>> {
        let first: Box<dyn Iterator<Item = Vec<i64>>> = if dim == 0 {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new((1..=max_norm).flat_map(move |s| shell(dim, s)))
        };
        first
    }

    pub fn probes(&self) -> &[GroupHom] {
        &self.probes
    }

    /// Integer basis of the linear forms on exponent sums that kill every relator.
    pub fn ab_functionals(&self) -> &[Vec<i64>] {
        &self.ab_functionals
    }

    /// Sound word problem: probe images first, then Britton reduction.
    pub fn word_problem(&self, w: &Word, budget: usize) -> Verdict {
        if self.proves_nontrivial(w) {
            return Verdict::Nontrivial;
        }
        self.graph.word_problem(w, budget).unwrap_or(Verdict::Unknown)
    }

    pub(crate) fn proves_nontrivial(&self, w: &Word) -> bool {
        self.probes.iter().any(|p| p.apply(w).is_ok_and(|x| !x.is_empty()))
    }

    /// Membership in an abelian subgroup. Linear functionals (abelianization
    /// and probe exponents) pin down candidate coefficients, which the word
    /// problem then confirms.
    pub fn membership(&self, subgens: &[Word], w: &Word, budget: usize) -> Membership {
        let subgens: Vec<Word> = subgens.iter().map(Word::reduce).collect();
        if subgens.iter().all(Word::is_empty) {
            return match self.word_problem(w, budget) {
                Verdict::Trivial => Membership::Member(Word::empty()),
                Verdict::Nontrivial => Membership::Nonmember,
                Verdict::Unknown => Membership::Unknown,
            };
        }
        let data = self.subgroup_data(&subgens, budget);
        let k = subgens.len();
        let n = self.alphabet.len();
        let ab = w.abelianize(n);
        let mut cols: Vec<Vec<i64>> = vec![Vec::new(); k];
        let mut rhs = Vec::new();
        for &i in &data.killed_by {
            if !self.probes[i].apply(w).map_or(true, |x| x.is_empty()) {
                return Membership::Nonmember;
            }
        }
        // every functional is a homomorphism, so these refutations hold
        // whether or not the generators commute
        for (f, vals) in &data.eqs {
            let b = match f {
                Functional::Ab(f) => dot(f, &ab),
                Functional::Probe { hom, root } => {
                    let Ok(x) = self.probes[*hom].apply(w) else { return Membership::Unknown };
                    match root.express(&x) {
                        Some(e) => e.abelianize(1)[0],
                        None => return Membership::Nonmember,
                    }
                }
            };
            for (c, v) in cols.iter_mut().zip(vals) {
                c.push(*v);
            }
            rhs.push(b);
        }
        let m = rhs.len();
        let Some(c0) = lattice::solve(&cols, &rhs) else { return Membership::Nonmember };
        if data.commuting != Verdict::Trivial {
            return self.noncommuting_membership(&subgens, &data, w, budget);
        }
        let kernel = if m == 0 {
            (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect()
        } else {
            lattice::left_kernel(&cols, m)
        };
        let check = |c: &[i64]| {
            let mut prod = Word::empty();
            for (g, &x) in subgens.iter().zip(c) {
                prod = prod.mul(&g.pow(x));
            }
            self.word_problem(&w.mul(&prod.inverse()), budget)
        };
        if kernel.is_empty() {
            return match check(&c0) {
                Verdict::Trivial => Membership::Member(expression_from_coords(&c0)),
                Verdict::Nontrivial => Membership::Nonmember,
                Verdict::Unknown => Membership::Unknown,
            };
        }
        // coefficients not pinned down: bounded search along the kernel
        let bound = (budget as i64).clamp(1, 8);
        for lam in box_vectors(kernel.len(), bound) {
            let mut c = c0.clone();
            for (l, kv) in lam.iter().zip(&kernel) {
                for (ci, ki) in c.iter_mut().zip(kv) {
                    *ci += l * ki;
                }
            }
            if check(&c) == Verdict::Trivial {
                return Membership::Member(expression_from_coords(&c));
            }
        }
        Membership::Unknown
    }

    /// Probes send the subgroup onto a subgroup of a free group, where
    /// membership is decided by folding; a member is found by bounded search.
    fn noncommuting_membership(&self, subgens: &[Word], data: &SubgroupData, w: &Word, budget: usize) -> Membership {
        if self.word_problem(w, budget) == Verdict::Trivial {
            return Membership::Member(Word::empty());
        }
        for p in &self.probes {
            let imgs: Option<Vec<Word>> = subgens.iter().map(|g| p.apply(g).ok()).collect();
            if let (Some(imgs), Ok(x)) = (imgs, p.apply(w)) {
                if !SubgroupGraph::fold(&imgs).contains(&x) {
                    return Membership::Nonmember;
                }
            }
        }
        if let Some(exprs) = &data.whole {
            let gens: Vec<usize> = (0..self.alphabet.len()).collect();
            return Membership::Member(substitute(w, &gens, exprs));
        }
        match short_product(subgens, w, |x| self.word_problem(x, budget)) {
            Some(e) => Membership::Member(e),
            None => Membership::Unknown,
        }
    }

    fn subgroup_data(&self, subgens: &[Word], budget: usize) -> Arc<SubgroupData> {
        if let Some(d) = self.cache.lock().expect("cache lock").get(subgens) {
            return d.clone();
        }
        let mut commuting = Verdict::Trivial;
        for i in 0..subgens.len() {
            for j in i + 1..subgens.len() {
                match self.word_problem(&Word::commutator(&subgens[i], &subgens[j]), budget) {
                    Verdict::Trivial => {}
                    v => commuting = v,
                }
            }
        }
        let n = self.alphabet.len();
        let mut eqs = Vec::new();
        for f in &self.ab_functionals {
            let vals: Vec<i64> = subgens.iter().map(|g| dot(f, &g.abelianize(n))).collect();
            eqs.push((Functional::Ab(f.clone()), vals));
        }
        let mut killed_by = Vec::new();
        for (hom, p) in self.probes.iter().enumerate() {
            let imgs: Vec<Word> = subgens.iter().map(|g| p.apply(g).unwrap_or_default()).collect();
            let Some(first) = imgs.iter().find(|x| !x.is_empty()) else {
                killed_by.push(hom);
                continue;
            };
            let root = first.root().expect("nonempty").0;
            let graph = SubgroupGraph::fold(std::slice::from_ref(&root));
            let vals: Option<Vec<i64>> =
                imgs.iter().map(|x| graph.express(x).map(|e| e.abelianize(1)[0])).collect();
            if let Some(vals) = vals {
                eqs.push((Functional::Probe { hom, root: graph }, vals));
            }
        }
        let whole = if commuting == Verdict::Trivial {
            None
        } else {
            let gens: Vec<usize> = (0..n).collect();
            generator_expressions(subgens, &gens, |x| self.word_problem(x, budget))
        };
        let data = Arc::new(SubgroupData { commuting, eqs, killed_by, whole });
        self.cache.lock().expect("cache lock").insert(subgens.to_vec(), data.clone());
        data
    }
}

impl CompositeGroup for Stage {
    fn label(&self) -> String {
        format!("stage{}", self.index)
    }

    fn generators(&self) -> Vec<usize> {
        (0..self.alphabet.len()).collect()
    }

    fn relators(&self) -> Vec<Word> {
        self.presentation.relators.clone()
    }

    fn word_problem(&self, w: &Word, budget: usize) -> Verdict {
        Stage::word_problem(self, w, budget)
    }

    fn membership(&self, subgens: &[Word], w: &Word, budget: usize) -> Membership {
        Stage::membership(self, subgens, w, budget)
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn shell(dim: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![1i64; dim];
    loop {
        if v.contains(&s) {
            out.push(v.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < s {
                v[i] += 1;
                v[i + 1..].iter_mut().for_each(|x| *x = 1);
                break;
            }
        }
    }
}

/// Integer vectors with max-norm at most `bound`, smallest norms first.
fn box_vectors(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64; dim]];
    for s in 1..=bound {
        let mut v = vec![-s; dim];
        loop {
            if v.iter().any(|x| x.abs() == s) {
                out.push(v.clone());
            }
            let Some(i) = (0..dim).rev().find(|&i| v[i] < s) else { break };
            v[i] += 1;
            v[i + 1..].iter_mut().for_each(|x| *x = -s);
        }
    }
    out
}

/// Closed surface onto a free group: handle pairs are folded together
/// (`a' ↦ b`, `b' ↦ a`), with odd genus killing handle `seed mod genus`;
/// precomposed with twists `b_i ↦ b_i a_i^N_i`.
fn surface_fold(h: &mut GroupHom, gens: &[usize], genus: usize, params: &[i64], seed: u64) {
    let a = |i: usize| gens[2 * i];
    let b = |i: usize| gens[2 * i + 1];
    let mut fold: HashMap<usize, Word> = HashMap::new();
    let killed = (genus % 2 == 1).then(|| (seed % genus as u64) as usize);
    let live: Vec<usize> = (0..genus).filter(|&i| Some(i) != killed).collect();
    if let Some(k) = killed {
        fold.insert(a(k), Word::empty());
        fold.insert(b(k), Word::empty());
    }
    for pair in live.chunks(2) {
        let (p, q) = (pair[0], pair[1]);
        fold.insert(a(p), Word::generator(a(p)));
        fold.insert(b(p), Word::generator(b(p)));
        fold.insert(a(q), Word::generator(b(p)));
        fold.insert(b(q), Word::generator(a(p)));
    }
    for i in 0..genus {
        h.set_image(a(i), fold[&a(i)].clone());
        h.set_image(b(i), fold[&b(i)].mul(&fold[&a(i)].pow(params[i])));
    }
}

fn abelian_functionals(relators: &[Word], n: usize) -> Vec<Vec<i64>> {
    let rows: Vec<Vec<i64>> = relators.iter().map(|r| r.abelianize(n)).collect();
    let cols: Vec<Vec<i64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    if rows.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    }
    lattice::left_kernel(&cols, rows.len())
}

fn finish(
    index: usize,
    alphabet: Alphabet,
    presentation: Presentation,
    graph: GraphOfGroups,
    prev: Option<Arc<Stage>>,
    retraction: GroupHom,
    piece: Piece,
) -> Stage {
    let dim = prev.as_ref().map_or(0, |p| p.dim) + piece.dim();
    let ab_functionals = abelian_functionals(&presentation.relators, alphabet.len());
    let mut stage = Stage {
        index,
        alphabet,
        presentation,
        graph,
        prev,
        retraction,
        piece,
        dim,
        probes: Vec::new(),
        ab_functionals,
        cache: Mutex::new(HashMap::new()),
    };
    stage.probes =
        Stage::parameter_order(dim, PROBE_SHELL).take(PROBES).map(|p| stage.family_hom(&p, 0)).collect();
    stage
}

pub(crate) fn stage0(summands: &[Summand], budget: usize) -> Result<Stage, TowerError> {
    let mut names: Vec<&str> = Vec::new();
    for s in summands {
        names.extend(s.names().iter().map(String::as_str));
    }
    let alphabet = Alphabet::new(&names)?;
    let mut target = alphabet.clone();
    let mut builder = GraphBuilder::new(alphabet.clone());
    let mut factors = Vec::new();
    let mut relators = Vec::new();
    let mut next = 0usize;
    for (i, s) in summands.iter().enumerate() {
        let gens: Vec<usize> = (next..next + s.names().len()).collect();
        next += gens.len();
        let label = format!("S{i}");
        let kind = match s {
            Summand::Free { .. } => {
                factors.push(BaseFactor::Free);
                VertexKind::Free { gens }
            }
            Summand::Abelian { .. } => {
                let f = target.fresh_name("f");
                let t = target.push(&f)?;
                factors.push(BaseFactor::Abelian { gens: gens.clone(), target: t });
                VertexKind::FreeAbelian { gens }
            }
            Summand::Surface { genus, .. } => {
                let sp = SurfacePresentation::closed(*genus, gens.clone())?;
                factors.push(BaseFactor::Surface { gens, genus: *genus });
                VertexKind::Surface(sp)
            }
        };
        let v = VertexGroup::new(label, kind);
        relators.extend(v.relators());
        let idx = builder.add_vertex(v);
        if idx > 0 {
            builder.add_edge(0, idx, Vec::new(), Vec::new(), None);
        }
    }
    let graph = builder.build(0, budget)?;
    let presentation = Presentation::new(alphabet.clone(), relators);
    let retraction = GroupHom::identity(alphabet.len());
    Ok(finish(0, alphabet, presentation, graph, None, retraction, Piece::Base { factors, target }))
}

/// Vertex group standing for the previous stage inside the next splitting.
fn previous_vertex(prev: &Arc<Stage>) -> VertexGroup {
    if prev.prev.is_none() && prev.graph.vertices().len() == 1 {
        return prev.graph.vertices()[0].clone();
    }
    let c: Arc<dyn CompositeGroup> = prev.clone();
    VertexGroup::new(format!("stage{}", prev.index), VertexKind::Composite(c))
}

/// Abelian or torus block: `Z^l` glued along `attach` (`k` commuting words).
pub(crate) fn abelian_stage(
    prev: &Arc<Stage>,
    attach: &[Word],
    letters: &[String],
    budget: usize,
) -> Result<Stage, TowerError> {
    let mut alphabet = prev.alphabet.clone();
    let new: Vec<usize> = letters.iter().map(|l| alphabet.push(l)).collect::<Result<_, _>>()?;
    let mut internal = alphabet.clone();
    let hidden: Vec<usize> = (0..attach.len())
        .map(|_| {
            let name = internal.fresh_name("_c");
            internal.push(&name)
        })
        .collect::<Result<_, _>>()?;
    let mut builder = GraphBuilder::new(internal);
    let m = builder.add_vertex(previous_vertex(prev));
    let mut ngens = hidden.clone();
    ngens.extend(&new);
    let nv = builder.add_vertex(VertexGroup::new("N", VertexKind::FreeAbelian { gens: ngens }));
    let hidden_words: Vec<Word> = hidden.iter().map(|&h| Word::generator(h)).collect();
    builder.add_edge(nv, m, hidden_words, attach.to_vec(), None);
    let graph = builder.build(m, budget)?;

    let mut relators = prev.presentation.relators.clone();
    for w in attach {
        for &s in &new {
            relators.push(Word::commutator(w, &Word::generator(s)));
        }
    }
    for (i, &s) in new.iter().enumerate() {
        for &u in &new[i + 1..] {
            relators.push(Word::commutator(&Word::generator(s), &Word::generator(u)));
        }
    }
    let presentation = Presentation::new(alphabet.clone(), relators);
    let mut retraction = GroupHom::identity(prev.alphabet.len());
    for &s in &new {
        retraction.set_image(s, Word::empty());
    }
    let piece = Piece::Letters {
        letters: new.iter().enumerate().map(|(j, &s)| (s, attach[j % attach.len()].clone())).collect(),
    };
    Ok(finish(prev.index + 1, alphabet, presentation, graph, Some(prev.clone()), retraction, piece))
}

/// Quadratic block: bounded surface glued along its boundary circles.
/// `retract` lists images of the surface generators then of the stable letters.
#[allow(clippy::too_many_arguments)]
pub(crate) fn quadratic_stage(
    prev: &Arc<Stage>,
    genus: usize,
    punctures: usize,
    gens: &[String],
    letters: &[String],
    boundary: &[Word],
    retract: &[Word],
    budget: usize,
) -> Result<Stage, TowerError> {
    let mut alphabet = prev.alphabet.clone();
    let sg: Vec<usize> = gens.iter().map(|l| alphabet.push(l)).collect::<Result<_, _>>()?;
    let stable: Vec<usize> = letters.iter().map(|l| alphabet.push(l)).collect::<Result<_, _>>()?;
    let surface = SurfacePresentation::bounded(genus, punctures, sg.clone())?;
    let bwords = surface.boundary_words();
    let mut builder = GraphBuilder::new(alphabet.clone());
    let m = builder.add_vertex(previous_vertex(prev));
    let nv = builder.add_vertex(VertexGroup::new("N", VertexKind::Surface(surface)));
    for (i, (d, w)) in bwords.iter().zip(boundary).enumerate() {
        let name = (i > 0).then(|| letters[i - 1].as_str());
        builder.add_edge(nv, m, vec![d.clone()], vec![w.clone()], name);
    }
    let graph = builder.build(m, budget)?;

    let mut relators = prev.presentation.relators.clone();
    relators.push(bwords[0].mul(&boundary[0].inverse()));
    for i in 1..punctures {
        let t = Word::generator(stable[i - 1]);
        relators.push(t.mul(&boundary[i]).mul(&t.inverse()).mul(&bwords[i].inverse()));
    }
    let presentation = Presentation::new(alphabet.clone(), relators);
    let mut retraction = GroupHom::identity(prev.alphabet.len());
    for (&g, img) in sg.iter().chain(&stable).zip(retract) {
        retraction.set_image(g, img.clone());
    }
    let handles = (0..genus).map(|i| (sg[2 * i], sg[2 * i + 1])).collect();
    let piece = Piece::Twist { handles };
    Ok(finish(prev.index + 1, alphabet, presentation, graph, Some(prev.clone()), retraction, piece))
}
