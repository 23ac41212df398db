//! Embedding a limit group, given by a one-edge splitting and a strict
//! quotient into a tower, into a tower one block higher.

mod certify;
mod document;
mod quotient;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgroups::{Edge, GraphError, GraphOfGroups, Membership, Verdict, VertexKind};
use crate::lattice;
use crate::tower::{AttachOptions, Block, Obligation, Status, Tower, TowerError};
use crate::words::{Alphabet, GroupHom, SurfacePresentation, Word, WordError};

pub use certify::{certify_injectivity_on_ball, BallEntry, Evidence, InjectivityCertificate};
pub use document::{EdgeDoc, QuotientDoc, SplittingDocument, VertexDoc};
pub use quotient::{validate_strict_quotient, Bullet, QuotientReport};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("malformed splitting: {0}")]
    Splitting(String),
    #[error("{map} is not a homomorphism: relator {relator} maps to a nontrivial element")]
    NotHomomorphism { map: String, relator: String },
    #[error("{check} could not be verified ({detail}); pass --assume to accept")]
    Unverified { check: String, detail: String },
    #[error("no maximal abelian subgroup found: {0}")]
    NoMaximalAbelian(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingKind {
    /// `A *_E B`, both vertices rigid.
    AmalgamRigidRigid,
    /// `A *_E` with stable letter `s`.
    HnnRigid,
    /// `A *_E B` with `A` free abelian.
    AbelianVertex,
    /// `A *_E B` with `A` a once-bounded surface and `E` its boundary.
    QhVertex,
}

/// A one-edge splitting of `L`. The edge runs from the `A` vertex to the `B`
/// vertex (the same vertex for an HNN extension).
#[derive(Clone, Debug)]
pub struct SplittingData {
    kind: SplittingKind,
    graph: GraphOfGroups,
}

impl SplittingData {
    pub fn new(kind: SplittingKind, graph: GraphOfGroups) -> Result<Self, EmbedError> {
        let bad = |m: &str| Err(EmbedError::Splitting(m.into()));
        if graph.edges().len() != 1 {
            return bad("exactly one edge is required");
        }
        let e = &graph.edges()[0];
        let nv = graph.vertices().len();
        match kind {
            SplittingKind::HnnRigid => {
                if nv != 1 || e.from != e.to {
                    return bad("an HNN splitting has one vertex and a loop");
                }
            }
            _ if nv != 2 || e.from == e.to => return bad("an amalgam has two vertices"),
            _ => {}
        }
        let a = &graph.vertices()[e.from].kind;
        match kind {
            SplittingKind::AbelianVertex => {
                if !matches!(a, VertexKind::FreeAbelian { .. }) {
                    return bad("the A vertex must be free abelian");
                }
            }
            SplittingKind::QhVertex => {
                let VertexKind::Surface(s) = a else { return bad("the A vertex must be a surface") };
                if s.punctures() != 1 || e.rank() != 1 {
                    return bad("the surface must have one boundary circle carrying the edge");
                }
                let d = &s.boundary_words()[0];
                if e.from_images[0] != *d && e.from_images[0] != d.inverse() {
                    return bad("the edge group must be the boundary subgroup");
                }
            }
            _ => {}
        }
        Ok(SplittingData { kind, graph })
    }

    pub fn kind(&self) -> SplittingKind {
        self.kind
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }

    pub fn edge(&self) -> &Edge {
        &self.graph.edges()[0]
    }

    /// Generators of the vertex at the tail (`A`) or head (`B`) of the edge.
    pub fn side_gens(&self, a_side: bool) -> Vec<usize> {
        let e = self.edge();
        self.graph.vertices()[if a_side { e.from } else { e.to }].gens()
    }

    pub fn stable_letter(&self) -> Option<usize> {
        self.edge().letter
    }

    fn surface(&self) -> Option<&SurfacePresentation> {
        match &self.graph.vertices()[self.edge().from].kind {
            VertexKind::Surface(s) if self.kind == SplittingKind::QhVertex => Some(s),
            _ => None,
        }
    }

    /// Images of the edge group generators whose centralizer gains the new
    /// letters.
    fn edge_images(&self) -> &[Word] {
        let e = self.edge();
        match self.kind {
            SplittingKind::AmalgamRigidRigid | SplittingKind::HnnRigid => &e.from_images,
            SplittingKind::AbelianVertex | SplittingKind::QhVertex => &e.to_images,
        }
    }
}

/// `nu = i ∘ q : L -> L' -> Γ'`.
#[derive(Clone, Debug)]
pub struct StrictQuotientData {
    pub q: GroupHom,
    pub i: GroupHom,
    pub target: Tower,
}

impl StrictQuotientData {
    pub fn new(q: GroupHom, i: GroupHom, target: Tower) -> Self {
        StrictQuotientData { q, i, target }
    }

    /// Quotient data given by `nu` alone.
    pub fn direct(nu: GroupHom, target: Tower) -> Self {
        let i = GroupHom::identity(target.alphabet().len());
        StrictQuotientData { q: nu, i, target }
    }

    pub fn nu(&self) -> Result<GroupHom, WordError> {
        self.q.then(&self.i)
    }
}

/// The maximal abelian subgroup `U` of `Γ'` containing the edge image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalAbelian {
    /// Basis over the alphabet of `Γ'`.
    pub lattice: Vec<Word>,
    /// Flat record of `Γ'` equal to `U`, when it has rank at least two.
    pub flat: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    pub tower: Tower,
    /// `L -> Γ`, over the alphabets of `L` and `Γ`.
    pub j: GroupHom,
    pub obligations: Vec<Obligation>,
    pub u: MaximalAbelian,
}

impl EmbeddingResult {
    /// `(generator, image)` pairs for reports.
    pub fn j_table(&self, source: &Alphabet) -> Vec<(String, String)> {
        let al = self.tower.alphabet();
        (0..source.len()).map(|g| (source.name(g).to_string(), al.format(self.j.image(g)))).collect()
    }
}

/// Status of "`h` kills every relator", checked by the word problem of `tower`.
pub(crate) fn hom_status(tower: &Tower, h: &GroupHom, relators: &[Word], src: &Alphabet, budget: usize) -> Status {
    let mut unknown = Vec::new();
    for r in relators {
        let img = match h.apply(r) {
            Ok(w) => w,
            Err(e) => return Status::Refuted(e.to_string()),
        };
        match tower.word_problem(&img, budget) {
            Ok(Verdict::Trivial) => {}
            Ok(Verdict::Nontrivial) => return Status::Refuted(src.format(r)),
            Ok(Verdict::Unknown) | Err(_) => unknown.push(src.format(r)),
        }
    }
    if unknown.is_empty() {
        Status::Verified(format!("{} relators map to 1", relators.len()))
    } else {
        Status::BudgetLimited(format!("undecided relator images: {}", unknown.join("; ")))
    }
}

fn enforce(map: &str, check: &str, status: &Status, assume: bool) -> Result<(), EmbedError> {
    match status {
        Status::Refuted(r) => Err(EmbedError::NotHomomorphism { map: map.into(), relator: r.clone() }),
        Status::BudgetLimited(d) if !assume => {
            Err(EmbedError::Unverified { check: check.into(), detail: d.clone() })
        }
        _ => Ok(()),
    }
}

/// Finds `U`: an active flat containing every image, or the cyclic group
/// generated by the root of a single image.
pub fn maximal_abelian(tower: &Tower, images: &[Word], budget: usize) -> Result<MaximalAbelian, EmbedError> {
    let images: Vec<Word> = images.iter().map(Word::reduce).collect();
    if images.iter().any(Word::is_empty) {
        return Err(EmbedError::NoMaximalAbelian("an edge generator maps to 1".into()));
    }
    for (i, f) in tower.flat_records().iter().enumerate() {
        if f.superseded_by.is_some() {
            continue;
        }
        let member = images
            .iter()
            .all(|w| matches!(tower.top().membership(&f.lattice, w, budget), Membership::Member(_)));
        if member {
            return Ok(MaximalAbelian { lattice: f.lattice.clone(), flat: Some(i) });
        }
    }
    if images.len() != 1 {
        return Err(EmbedError::NoMaximalAbelian(
            "the edge image has rank at least two but lies in no flat".into(),
        ));
    }
    let (core, conj) = images[0].cyclic_reduce();
    let (root, _) = core.root()?;
    Ok(MaximalAbelian { lattice: vec![conj.mul(&root).mul(&conj.inverse())], flat: None })
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|k| (k == i) as i64).collect()
}

/// Vectors completing `rows` to a basis of `Z^m`, if the rows span a direct
/// summand.
pub(crate) fn complement(rows: &[Vec<i64>], m: usize) -> Option<Vec<Vec<i64>>> {
    let r = rows.len();
    let cols: Vec<Vec<i64>> = (0..m).map(|k| rows.iter().map(|row| row[k]).collect()).collect();
    let (_, u, rank) = lattice::echelon(&cols, r);
    if rank < r {
        return None;
    }
    // rows of U^-1 solve x U = e_i; its last columns complete the rows
    let inv: Vec<Vec<i64>> = (0..m).map(|i| lattice::solve(&u, &unit(m, i))).collect::<Option<_>>()?;
    let comp: Vec<Vec<i64>> = (r..m).map(|k| (0..m).map(|i| inv[i][k]).collect()).collect();
    let mut all = rows.to_vec();
    all.extend(comp.iter().cloned());
    (0..m).all(|i| lattice::contains(&all, &unit(m, i))).then_some(comp)
}

/// Builds `Γ` and `j: L -> Γ` for one splitting.
pub fn embed_step(
    s: &SplittingData,
    d: &StrictQuotientData,
    opts: &AttachOptions,
) -> Result<EmbeddingResult, EmbedError> {
    let budget = opts.budget;
    let gp = &d.target;
    let src = s.alphabet();
    let nu = d.nu()?;
    if nu.source_rank() != src.len() {
        return Err(EmbedError::Splitting(format!(
            "nu gives {} images for {} generators",
            nu.source_rank(),
            src.len()
        )));
    }
    for w in nu.images() {
        gp.alphabet().check(w)?;
    }
    let block_index = gp.height();
    let relators = s.graph().fundamental_presentation().relators;
    let nu_status = hom_status(gp, &nu, &relators, src, budget);
    enforce("nu", "nu is a homomorphism", &nu_status, opts.assume)?;

    let edge_images: Vec<Word> =
        s.edge_images().iter().map(|w| nu.apply(w)).collect::<Result<_, _>>()?;
    let u = maximal_abelian(gp, &edge_images, budget)?;
    let k = u.lattice.len();
    let edge = s.edge();
    let block = match s.kind() {
        SplittingKind::AmalgamRigidRigid | SplittingKind::HnnRigid => {
            if k == 1 {
                Block::A { attach: u.lattice[0].clone(), rank: 2, letters: Vec::new() }
            } else {
                Block::T { attach: u.lattice.clone(), rank: k + 1, letters: Vec::new() }
            }
        }
        SplittingKind::AbelianVertex => {
            let m = s.side_gens(true).len();
            if m <= edge.rank() {
                return Err(EmbedError::Splitting("the abelian vertex equals its edge group".into()));
            }
            Block::T { attach: u.lattice.clone(), rank: k + m - edge.rank(), letters: Vec::new() }
        }
        SplittingKind::QhVertex => {
            let surface = s.surface().expect("checked in SplittingData::new");
            let mut taken = gp.alphabet().clone();
            let mut gens = Vec::new();
            for &g in surface.gens() {
                let name = src.name(g);
                let name = if taken.contains(name) { taken.fresh_name(name) } else { name.to_string() };
                taken.push(&name)?;
                gens.push(name);
            }
            let d = &surface.boundary_words()[0];
            let w = if edge.from_images[0] == *d { edge_images[0].clone() } else { edge_images[0].inverse() };
            let retract = surface.gens().iter().map(|&g| nu.image(g).clone()).collect();
            Block::Q { genus: surface.genus(), punctures: 1, gens, boundary: vec![w], retract, letters: Vec::new() }
        }
    };
    let tower = gp.attach_block(block, opts)?;
    let new_block = &tower.blocks()[block_index];
    let al = tower.alphabet();
    let letter = |name: &str| Word::generator(al.index_of(name).expect("new letter in alphabet"));
    let new_letters: Vec<Word> = new_block.new_letters().iter().map(|n| letter(n)).collect();

    let a_gens = s.side_gens(true);
    let mut j = nu.clone();
    match s.kind() {
        SplittingKind::AmalgamRigidRigid => {
            let t = &new_letters[0];
            for g in s.side_gens(false) {
                j.set_image(g, t.mul(nu.image(g)).mul(&t.inverse()));
            }
        }
        SplittingKind::HnnRigid => {
            let sl = s.stable_letter().expect("HNN edge has a stable letter");
            j.set_image(sl, new_letters[0].mul(nu.image(sl)));
        }
        SplittingKind::AbelianVertex => {
            let a = &s.graph().vertices()[edge.from];
            let rows: Vec<Vec<i64>> = edge
                .from_images
                .iter()
                .map(|w| a.abelian_coords(w).expect("edge image lies in the vertex"))
                .collect();
            let comp = complement(&rows, a_gens.len()).ok_or_else(|| {
                EmbedError::Splitting("the edge group is not a direct summand of the abelian vertex".into())
            })?;
            let mut basis = rows;
            basis.extend(comp);
            let mut imgs: Vec<Word> = edge.to_images.iter().map(|w| nu.apply(w)).collect::<Result<_, _>>()?;
            imgs.extend(new_letters.iter().cloned());
            for (p, &g) in a_gens.iter().enumerate() {
                let c = lattice::solve(&basis, &unit(a_gens.len(), p)).expect("basis of Z^m");
                let w = c.iter().zip(&imgs).fold(Word::empty(), |acc, (&ci, x)| acc.mul(&x.pow(ci)));
                j.set_image(g, w);
            }
        }
        SplittingKind::QhVertex => {
            for (g, copy) in a_gens.iter().zip(&new_letters) {
                j.set_image(*g, copy.clone());
            }
        }
    }

    let mut obligations = vec![Obligation {
        block: block_index,
        check: "nu is a homomorphism".into(),
        status: nu_status,
    }];
    obligations.extend(tower.ledger().iter().filter(|o| o.block == block_index).cloned());
    let j_status = hom_status(&tower, &j, &relators, src, budget);
    enforce("j", "j is a homomorphism", &j_status, opts.assume)?;
    obligations.push(Obligation { block: block_index, check: "j is a homomorphism".into(), status: j_status });
    Ok(EmbeddingResult { tower, j, obligations, u })
}

#[cfg(test)]
mod tests;
