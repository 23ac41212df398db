//! Checks that quotient data has the properties needed for embedding.

use serde::Serialize;

use super::{hom_status, maximal_abelian, EmbedError, SplittingData, SplittingKind, StrictQuotientData};
use crate::graphgroups::{Membership, Verdict, VertexKind};
use crate::lattice;
use crate::tower::checks::{not_in_flat, not_proper_power};
use crate::tower::{Status, Tower};
use crate::words::{enumerate_ball, GroupHom, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bullet {
    pub name: String,
    #[serde(flatten)]
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub radius: usize,
    pub bullets: Vec<Bullet>,
}

impl QuotientReport {
    pub fn status(&self, name: &str) -> Option<&Status> {
        self.bullets.iter().find(|b| b.name == name).map(|b| &b.status)
    }

    pub fn all_verified(&self) -> bool {
        self.bullets.iter().all(|b| b.status.is_verified())
    }
}

fn worst(a: Status, b: Status) -> Status {
    let rank = |s: &Status| match s {
        Status::Verified(_) => 0,
        Status::Forced(_) => 1,
        Status::BudgetLimited(_) => 2,
        Status::Refuted(_) => 3,
    };
    if rank(&b) > rank(&a) {
        b
    } else {
        a
    }
}

pub fn validate_strict_quotient(
    s: &SplittingData,
    d: &StrictQuotientData,
    ball_radius: usize,
    budget: usize,
) -> Result<QuotientReport, EmbedError> {
    let nu = d.nu()?;
    let gp = &d.target;
    let src = s.alphabet();
    if nu.source_rank() != src.len() {
        return Err(EmbedError::Splitting("nu does not cover every generator".into()));
    }
    let mut bullets = Vec::new();
    let mut push = |name: &str, status: Status| bullets.push(Bullet { name: name.into(), status });

    let relators = s.graph().fundamental_presentation().relators;
    push("nu is a homomorphism", hom_status(gp, &nu, &relators, src, budget));

    let edge = s.edge();
    let e_src = s.edge_images().to_vec();
    push("edge group injective", injective_on_lattice(gp, &nu, &e_src, s, ball_radius, budget)?);
    push("edge image maximal abelian", edge_maximal(gp, &nu, &e_src, budget)?);
    if s.kind() == SplittingKind::AbelianVertex {
        let status = injective_on_lattice(gp, &nu, &edge.from_images, s, ball_radius, budget)?;
        push("peripheral subgroup injective", status);
    }
    if s.kind() == SplittingKind::QhVertex {
        push("surface image nonabelian", nonabelian(gp, &nu, s, budget));
    }
    let rigid: Vec<usize> = match s.kind() {
        SplittingKind::AmalgamRigidRigid => vec![edge.from, edge.to],
        SplittingKind::HnnRigid => vec![edge.from],
        _ => vec![edge.to],
    };
    for v in rigid {
        let name = format!("envelope of {} injective", s.graph().vertices()[v].label);
        push(&name, envelope_check(gp, &nu, s, v, ball_radius, budget));
    }
    Ok(QuotientReport { radius: ball_radius, bullets })
}

/// Injectivity of `nu` on the free abelian group generated by `gens`.
/// Exact for one generator in a torsion-free target; otherwise exact when
/// the images have independent coordinates in a flat.
fn injective_on_lattice(
    gp: &Tower,
    nu: &GroupHom,
    gens: &[Word],
    s: &SplittingData,
    radius: usize,
    budget: usize,
) -> Result<Status, EmbedError> {
    let src = s.alphabet();
    let imgs: Vec<Word> = gens.iter().map(|w| nu.apply(w)).collect::<Result<_, _>>()?;
    if imgs.len() == 1 {
        return Ok(match gp.word_problem(&imgs[0], budget)? {
            Verdict::Nontrivial => Status::Verified(format!("{} is nontrivial", gp.alphabet().format(&imgs[0]))),
            Verdict::Trivial => Status::Refuted(format!("{} maps to 1", src.format(&gens[0]))),
            Verdict::Unknown => Status::BudgetLimited(src.format(&gens[0])),
        });
    }
    if let Ok(u) = maximal_abelian(gp, &imgs, budget) {
        let coords: Option<Vec<Vec<i64>>> = imgs
            .iter()
            .map(|w| match gp.top().membership(&u.lattice, w, budget) {
                Membership::Member(e) => Some(e.abelianize(u.lattice.len())),
                _ => None,
            })
            .collect();
        if let Some(c) = coords {
            if lattice::rank(&c, u.lattice.len()) == imgs.len() {
                return Ok(Status::Verified("images are independent in a flat lattice".into()));
            }
        }
    }
    // search for a kernel element among small coefficient vectors
    let r = radius.max(1) as i64;
    let n = imgs.len();
    let mut unknown = false;
    let mut c = vec![-r; n];
    loop {
        if c.iter().any(|&x| x != 0) {
            let w = c.iter().zip(&imgs).fold(Word::empty(), |acc, (&k, x)| acc.mul(&x.pow(k)));
            match gp.word_problem(&w, budget)? {
                Verdict::Trivial => {
                    let e = c.iter().zip(gens).fold(Word::empty(), |acc, (&k, x)| acc.mul(&x.pow(k)));
                    return Ok(Status::Refuted(format!("{} maps to 1", src.format(&e))));
                }
                Verdict::Unknown => unknown = true,
                Verdict::Nontrivial => {}
            }
        }
        let Some(p) = (0..n).find(|&i| c[i] < r) else { break };
        c[p] += 1;
        c[..p].iter_mut().for_each(|x| *x = -r);
    }
    Ok(Status::BudgetLimited(if unknown {
        format!("no kernel element found; some coefficient vectors up to {r} undecided")
    } else {
        format!("no kernel element with coefficients up to {r}")
    }))
}

fn edge_maximal(gp: &Tower, nu: &GroupHom, gens: &[Word], budget: usize) -> Result<Status, EmbedError> {
    let imgs: Vec<Word> = gens.iter().map(|w| nu.apply(w).map(|x| x.reduce())).collect::<Result<_, _>>()?;
    if imgs.iter().any(Word::is_empty) {
        return Ok(Status::Refuted("an edge generator maps to 1".into()));
    }
    if imgs.len() == 1 {
        let w = &imgs[0];
        let pp = not_proper_power(gp.top(), w);
        let flat = not_in_flat(gp, gp.top(), w, budget);
        return Ok(match (&pp, &flat) {
            (Status::Verified(a), Status::Verified(b)) => Status::Verified(format!("{a}; {b}")),
            _ => worst(pp, flat),
        });
    }
    let Ok(u) = maximal_abelian(gp, &imgs, budget) else {
        return Ok(Status::BudgetLimited("images lie in no known flat".into()));
    };
    let mut coords = Vec::new();
    for w in &imgs {
        match gp.top().membership(&u.lattice, w, budget) {
            Membership::Member(e) => coords.push(e.abelianize(u.lattice.len())),
            _ => return Ok(Status::BudgetLimited("flat coordinates undecided".into())),
        }
    }
    let full: Vec<Vec<i64>> =
        (0..u.lattice.len()).map(|i| (0..u.lattice.len()).map(|k| (i == k) as i64).collect()).collect();
    Ok(if lattice::same_span(&coords, &full) {
        Status::Verified("images span a flat lattice".into())
    } else {
        Status::BudgetLimited("images span a proper sublattice of a flat".into())
    })
}

fn nonabelian(gp: &Tower, nu: &GroupHom, s: &SplittingData, budget: usize) -> Status {
    let src = s.alphabet();
    let gens = s.side_gens(true);
    let mut unknown = false;
    let mut witness = None;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let (x, y) = (nu.image(gens[i]), nu.image(gens[j]));
            match gp.word_problem(&Word::commutator(x, y), budget) {
                Ok(Verdict::Nontrivial) => {
                    return Status::Verified(format!(
                        "[{}, {}] maps to a nontrivial commutator",
                        src.name(gens[i]),
                        src.name(gens[j])
                    ))
                }
                Ok(Verdict::Trivial) => {
                    witness.get_or_insert((gens[i], gens[j]));
                }
                _ => unknown = true,
            }
        }
    }
    match (unknown, witness) {
        (false, Some((a, b))) => {
            Status::Refuted(format!("[{}, {}] maps to 1, as do all commutators", src.name(a), src.name(b)))
        }
        (false, None) => Status::Refuted("the surface has fewer than two generators".into()),
        (true, _) => Status::BudgetLimited("no nontrivial commutator found".into()),
    }
}

/// Generators of the envelope of vertex `v`: its own generators and the
/// centralizers of edge images at the other end of each incident edge.
/// Centralizers are exact in free and free abelian vertices only.
fn envelope_gens(s: &SplittingData, v: usize) -> (Vec<Word>, bool) {
    let g = s.graph();
    let mut out: Vec<Word> = g.vertices()[v].gens().into_iter().map(Word::generator).collect();
    if s.kind() == SplittingKind::HnnRigid {
        // centralizers in an HNN extension also involve the stable letter
        return (out, false);
    }
    let e = s.edge();
    let (there, imgs) = if e.from == v { (e.to, &e.to_images) } else { (e.from, &e.from_images) };
    let other = &g.vertices()[there];
    let mut exact = true;
    match &other.kind {
        VertexKind::FreeAbelian { gens } => out.extend(gens.iter().map(|&x| Word::generator(x))),
        _ if other.is_free() && imgs.len() == 1 => {
            let (core, conj) = imgs[0].cyclic_reduce();
            match core.root() {
                Ok((root, _)) => out.push(conj.mul(&root).mul(&conj.inverse())),
                Err(_) => exact = false,
            }
        }
        _ => exact = false,
    }
    (out, exact)
}

fn envelope_check(gp: &Tower, nu: &GroupHom, s: &SplittingData, v: usize, radius: usize, budget: usize) -> Status {
    let src = s.alphabet();
    let (gens, exact) = envelope_gens(s, v);
    let sub = GroupHom::new(gens);
    let mut checked = 0;
    let mut unknown = 0;
    for w in enumerate_ball(sub.source_rank(), radius) {
        let lw = sub.apply(&w).expect("ball word").reduce();
        match s.graph().word_problem(&lw, budget) {
            Ok(Verdict::Nontrivial) => {}
            Ok(Verdict::Trivial) => continue,
            _ => {
                unknown += 1;
                continue;
            }
        }
        let img = nu.apply(&lw).expect("word over source alphabet");
        match gp.word_problem(&img, budget) {
            Ok(Verdict::Nontrivial) => checked += 1,
            Ok(Verdict::Trivial) => return Status::Refuted(format!("{} maps to 1", src.format(&lw))),
            _ => unknown += 1,
        }
    }
    if unknown > 0 {
        Status::BudgetLimited(format!("{unknown} ball elements undecided"))
    } else if !exact {
        Status::BudgetLimited(format!("{checked} elements checked; envelope generators not exact"))
    } else {
        Status::Verified(format!("{checked} nontrivial elements of the radius-{radius} ball stay nontrivial"))
    }
}
