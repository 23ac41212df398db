//! Validity obligations for attaching blocks.

use crate::graphgroups::{Membership, Verdict, VertexKind};
use crate::lattice;
use crate::words::Word;

use super::{Block, Stage, Status, Tower};

type Check = (String, Status);

pub(super) fn pre_checks(tower: &Tower, prev: &Stage, block: &Block, budget: usize) -> Vec<Check> {
    let al = prev.alphabet();
    let mut out = Vec::new();
    match block {
        Block::A { attach, .. } => cyclic_checks(tower, prev, attach, budget, &mut out),
        Block::T { attach, .. } if attach.len() == 1 => {
            cyclic_checks(tower, prev, &attach[0], budget, &mut out)
        }
        Block::T { attach, .. } => {
            let mut status = Status::Verified("all commutators trivial".into());
            for i in 0..attach.len() {
                for j in i + 1..attach.len() {
                    let c = Word::commutator(&attach[i], &attach[j]);
                    match prev.word_problem(&c, budget) {
                        Verdict::Trivial => {}
                        Verdict::Nontrivial => {
                            status = Status::Refuted(format!("[{}, {}] is nontrivial", al.format(&attach[i]), al.format(&attach[j])));
                        }
                        Verdict::Unknown if status.is_verified() => {
                            status = Status::BudgetLimited(format!("commutator {i},{j} undecided"));
                        }
                        Verdict::Unknown => {}
                    }
                }
            }
            out.push(("attaching tuple commutes".into(), status));
            out.push(("attaching tuple spans a flat lattice".into(), span_check(tower, prev, attach, budget)));
        }
        Block::Q { genus, punctures, gens, boundary, retract, .. } => {
            let chi = 2 - 2 * *genus as i64 - *punctures as i64;
            let status = if chi <= -2 || (*genus == 1 && *punctures == 1) {
                Status::Verified(format!("euler characteristic {chi}"))
            } else {
                Status::Refuted(format!("euler characteristic {chi} is too large"))
            };
            out.push(("surface complexity".into(), status));
            for (i, w) in boundary.iter().enumerate() {
                let status = match prev.word_problem(w, budget) {
                    Verdict::Nontrivial => Status::Verified(al.format(w)),
                    Verdict::Trivial => Status::Refuted(format!("b{} is attached to a trivial word", i + 1)),
                    Verdict::Unknown => Status::BudgetLimited(al.format(w)),
                };
                out.push((format!("boundary b{} attaching word nontrivial", i + 1), status));
            }
            out.push(("nonabelian image".into(), nonabelian_image(prev, gens, retract, budget)));
        }
    }
    out
}

fn cyclic_checks(tower: &Tower, prev: &Stage, w: &Word, budget: usize, out: &mut Vec<Check>) {
    let al = prev.alphabet();
    let status = match prev.word_problem(w, budget) {
        Verdict::Nontrivial => Status::Verified(al.format(w)),
        Verdict::Trivial => Status::Refuted(format!("{} is trivial", al.format(w))),
        Verdict::Unknown => Status::BudgetLimited(al.format(w)),
    };
    out.push(("attaching word nontrivial".into(), status));
    out.push(("not a proper power".into(), not_proper_power(prev, w)));
    out.push(("not conjugate into a flat".into(), not_in_flat(tower, prev, w, budget)));
}

fn is_free_locus(prev: &Stage) -> bool {
    prev.prev().is_none()
        && prev.graph().vertices().len() == 1
        && matches!(prev.graph().vertices()[0].kind, VertexKind::Free { .. })
}

pub(crate) fn not_proper_power(prev: &Stage, w: &Word) -> Status {
    let al = prev.alphabet();
    match w.proper_power() {
        Err(_) => return Status::Refuted("trivial word".into()),
        Ok(Some((root, k))) => {
            return Status::Refuted(format!("{} = ({})^{k}", al.format(w), al.format(&root)))
        }
        Ok(None) => {}
    }
    if is_free_locus(prev) {
        return Status::Verified("root check in a free group".into());
    }
    let n = al.len();
    let ab = w.abelianize(n);
    let g = prev
        .ab_functionals()
        .iter()
        .map(|f| f.iter().zip(&ab).map(|(x, y)| x * y).sum::<i64>())
        .fold(0i64, gcd);
    if g == 1 {
        return Status::Verified("abelianization image is primitive".into());
    }
    for (i, p) in prev.probes().iter().enumerate() {
        let img = p.apply(w).expect("word over stage alphabet");
        if matches!(img.proper_power(), Ok(None)) {
            return Status::Verified(format!("probe {i} image is not a proper power"));
        }
    }
    Status::BudgetLimited("no probe separates the root".into())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Flats still maximal at this point of the construction.
fn active_flats(tower: &Tower) -> impl Iterator<Item = (usize, &super::Flat)> {
    tower.flat_records().iter().enumerate().filter(|(_, f)| f.superseded_by.is_none())
}

pub(crate) fn not_in_flat(tower: &Tower, prev: &Stage, w: &Word, budget: usize) -> Status {
    let al = prev.alphabet();
    let n = al.len();
    let relator_rows: Vec<Vec<i64>> =
        prev.presentation().relators.iter().map(|r| r.abelianize(n)).collect();
    let mut open = Vec::new();
    for (i, flat) in active_flats(tower) {
        match prev.membership(&flat.lattice, w, budget) {
            Membership::Member(_) => {
                return Status::Refuted(format!("{} lies in flat {i}", al.format(w)));
            }
            Membership::Nonmember | Membership::Unknown => {}
        }
        let mut rows: Vec<Vec<i64>> = flat.lattice.iter().map(|g| g.abelianize(n)).collect();
        rows.extend(relator_rows.iter().cloned());
        if !lattice::contains(&rows, &w.abelianize(n)) {
            continue;
        }
        if !probe_excludes_conjugacy(prev, &flat.lattice, w) {
            open.push(i);
        }
    }
    if open.is_empty() {
        Status::Verified("separated from every flat lattice".into())
    } else {
        Status::BudgetLimited(format!("conjugacy into flats {open:?} undecided"))
    }
}

/// A probe `φ` with `φ(w)` not conjugate into the cyclic image `φ(L)`.
fn probe_excludes_conjugacy(prev: &Stage, lattice: &[Word], w: &Word) -> bool {
    prev.probes().iter().any(|p| {
        let x = p.apply(w).expect("word over stage alphabet");
        if x.is_empty() {
            return false;
        }
        let imgs: Vec<Word> = lattice.iter().map(|g| p.apply(g).expect("lattice word")).collect();
        let Some(first) = imgs.iter().find(|y| !y.is_empty()) else { return true };
        let root = first.root().expect("nonempty").0;
        x.conjugate_into_cyclic(&root).is_none()
    })
}

fn span_check(tower: &Tower, prev: &Stage, attach: &[Word], budget: usize) -> Status {
    let mut undecided = Vec::new();
    for (i, flat) in active_flats(tower) {
        match spans_equal(prev, &flat.lattice, attach, budget) {
            Some(true) => return Status::Verified(format!("equals flat {i}")),
            Some(false) => {}
            None => undecided.push(i),
        }
    }
    if undecided.is_empty() {
        Status::Refuted("no flat lattice is generated by the tuple".into())
    } else {
        Status::BudgetLimited(format!("comparison with flats {undecided:?} undecided"))
    }
}

/// `Some(true)` when both tuples generate the same subgroup.
fn spans_equal(prev: &Stage, a: &[Word], b: &[Word], budget: usize) -> Option<bool> {
    let mut unknown = false;
    for (x, ys) in a.iter().map(|x| (x, b)).chain(b.iter().map(|x| (x, a))) {
        match prev.membership(ys, x, budget) {
            Membership::Member(_) => {}
            Membership::Nonmember => return Some(false),
            Membership::Unknown => unknown = true,
        }
    }
    (!unknown).then_some(true)
}

/// Index of the active flat generated by `attach`, if decided.
pub(super) fn spanned_flat(tower: &Tower, prev: &Stage, attach: &[Word], budget: usize) -> Option<usize> {
    active_flats(tower)
        .find(|(_, f)| spans_equal(prev, &f.lattice, attach, budget) == Some(true))
        .map(|(i, _)| i)
}

fn nonabelian_image(prev: &Stage, gens: &[String], retract: &[Word], budget: usize) -> Status {
    let al = prev.alphabet();
    let imgs = &retract[..gens.len()];
    let mut unknown = false;
    for i in 0..imgs.len() {
        for j in i + 1..imgs.len() {
            match prev.word_problem(&Word::commutator(&imgs[i], &imgs[j]), budget) {
                Verdict::Nontrivial => {
                    return Status::Verified(format!(
                        "[r({}), r({})] = [{}, {}] is nontrivial",
                        gens[i],
                        gens[j],
                        al.format(&imgs[i]),
                        al.format(&imgs[j])
                    ))
                }
                Verdict::Unknown => unknown = true,
                Verdict::Trivial => {}
            }
        }
    }
    if unknown {
        Status::BudgetLimited("no commutator of generator images decided nontrivial".into())
    } else {
        Status::Refuted("all commutators of generator images are trivial".into())
    }
}

/// Every relator of the new stage maps to a trivial word one stage down.
pub(super) fn retraction_sound(stage: &Stage, budget: usize) -> Check {
    let prev = stage.prev().expect("block stage");
    let al = stage.alphabet();
    let mut unknown = Vec::new();
    for r in &stage.presentation().relators {
        let img = stage.retraction().apply(r).expect("relator over stage alphabet");
        match prev.word_problem(&img, budget) {
            Verdict::Trivial => {}
            Verdict::Nontrivial => {
                return (
                    "retraction sound".into(),
                    Status::Refuted(format!("relator {} maps to a nontrivial word", al.format(r))),
                )
            }
            Verdict::Unknown => unknown.push(al.format(r)),
        }
    }
    let status = if unknown.is_empty() {
        Status::Verified(format!("{} relators checked", stage.presentation().relators.len()))
    } else {
        Status::BudgetLimited(format!("undecided relator images: {}", unknown.join("; ")))
    };
    ("retraction sound".into(), status)
}
