//! The three isolation hypotheses, reduced to word problems.

use serde::Serialize;

use super::{flat_inventory, ColoredCore, Color, FlatOrigin};
use crate::graphgroups::{GraphOfGroups, Membership, Verdict, VertexKind};
use crate::tower::checks::not_proper_power;
use crate::tower::{Block, BlockKind, Status, Tower};
use crate::words::Word;

pub const DEFAULT_POWER_BUDGET: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "kebab-case")]
pub enum Check {
    Verified(String),
    /// No counterexample with exponents up to the stated budget.
    VerifiedToBudget(String),
    Refuted(String),
    Unchecked(String),
    NotApplicable(String),
}

impl Check {
    fn severity(&self) -> u8 {
        match self {
            Check::Verified(_) | Check::NotApplicable(_) => 0,
            Check::VerifiedToBudget(_) => 1,
            Check::Unchecked(_) => 2,
            Check::Refuted(_) => 3,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Check::Verified(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Check::Refuted(_))
    }
}

/// Two edge-group elements at one good vertex.
#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub vertex: usize,
    pub u: String,
    pub v: String,
    /// Element conjugating `u` to `v`, when `v` is a translate of `u`.
    pub conjugator: Option<String>,
    pub check: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub index: usize,
    pub name: String,
    pub check: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsolationReport {
    pub power_budget: i64,
    pub hypotheses: Vec<Hypothesis>,
    pub pairs: Vec<PairCheck>,
}

impl IsolationReport {
    pub fn hypothesis(&self, i: usize) -> &Check {
        &self.hypotheses[i].check
    }
}

pub fn check_isolation_hypotheses(c: &ColoredCore, t: &Tower, power_budget: i64, budget: usize) -> IsolationReport {
    let graph = t.top().graph();
    let pairs = parallel_pairs(c, graph, power_budget, budget);
    let h1 = summarize(&pairs, power_budget);
    IsolationReport {
        power_budget,
        hypotheses: vec![
            Hypothesis { index: 0, name: "every annulus touches a good vertex".into(), check: hypothesis0(c) },
            Hypothesis { index: 1, name: "edge spaces at a good vertex are not parallel".into(), check: h1 },
            Hypothesis { index: 2, name: "no edge space bounds a half-flat".into(), check: hypothesis2(c, t, budget) },
        ],
        pairs,
    }
}

fn hypothesis0(c: &ColoredCore) -> Check {
    let bad: Vec<usize> = c
        .report
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.rank() == 1 && c.color(e.from) == Color::B && c.color(e.to) == Color::B)
        .map(|(i, _)| i)
        .collect();
    if bad.is_empty() {
        Check::Verified("every annulus has a good end".into())
    } else {
        Check::Refuted(format!("annuli {bad:?} join two bad vertices"))
    }
}

/// Edge-group generators at each good vertex, with their translates by the
/// vertex subgroup generators.
fn parallel_pairs(c: &ColoredCore, graph: &GraphOfGroups, power_budget: i64, budget: usize) -> Vec<PairCheck> {
    let al = graph.alphabet();
    let mut out = Vec::new();
    for (v, cv) in c.vertices.iter().enumerate() {
        if cv.color != Color::G {
            continue;
        }
        let vx = &c.report.vertices[v];
        let group = &graph.vertices()[vx.base];
        let exact = matches!(group.kind, VertexKind::Free { .. } | VertexKind::Surface(_));
        let mut lines: Vec<Word> = Vec::new();
        for e in &c.report.edges {
            let Some(base) = graph.edges().get(e.base_edge) else { continue };
            for side in 0..2 {
                let end = if side == 0 { e.from } else { e.to };
                if end != v {
                    continue;
                }
                let imgs = if side == 0 { &base.from_images } else { &base.to_images };
                let n = &e.near_words[side];
                for cvec in &e.lattice {
                    let x = imgs.iter().zip(cvec).fold(Word::empty(), |acc, (w, &k)| acc.mul(&w.pow(k)));
                    lines.push(n.mul(&x).mul(&n.inverse()).reduce());
                }
            }
        }
        let mut cands: Vec<(Word, Word, Option<Word>)> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                cands.push((lines[i].clone(), lines[j].clone(), None));
            }
            for h in &vx.gens {
                let w = h.mul(&lines[i]).mul(&h.inverse()).reduce();
                cands.push((lines[i].clone(), w, Some(h.clone())));
            }
        }
        for (u, w, h) in cands {
            // a translate by an element commuting with u is the same line
            if let Some(h) = &h {
                if group.word_problem(&Word::commutator(h, &u), budget) == Verdict::Trivial {
                    continue;
                }
            }
            let check = power_check(graph, &u, &w, h.as_ref(), exact, group, power_budget, budget);
            out.push(PairCheck {
                vertex: v,
                u: al.format(&u),
                v: al.format(&w),
                conjugator: h.as_ref().map(|h| al.format(h)),
                check,
            });
        }
    }
    out.sort_by(|a, b| (a.vertex, &a.u, &a.v).cmp(&(b.vertex, &b.u, &b.v)));
    out
}

#[allow(clippy::too_many_arguments)]
fn power_check(
    graph: &GraphOfGroups,
    u: &Word,
    v: &Word,
    h: Option<&Word>,
    exact: bool,
    group: &crate::graphgroups::VertexGroup,
    power_budget: i64,
    budget: usize,
) -> Check {
    let al = graph.alphabet();
    let mut undecided = false;
    for k in 1..=power_budget {
        for l in (1..=power_budget).flat_map(|l| [l, -l]) {
            match graph.word_problem(&u.pow(k).mul(&v.pow(-l)), budget) {
                Ok(Verdict::Trivial) => {
                    // roots are unique, so coinciding powers force commuting elements
                    let roots = match graph.word_problem(&Word::commutator(u, v), budget) {
                        Ok(Verdict::Trivial) => "; u and v commute, so they share a root",
                        _ => "",
                    };
                    return Check::Refuted(format!(
                        "({})^{k} = ({})^{l}{roots}",
                        al.format(u),
                        al.format(v)
                    ));
                }
                Ok(Verdict::Nontrivial) => {}
                _ => undecided = true,
            }
        }
    }
    if exact {
        // in free and surface groups commuting is the same as sharing a root
        let (x, y) = match h {
            Some(h) => (h.clone(), u.clone()),
            None => (u.clone(), v.clone()),
        };
        if group.word_problem(&Word::commutator(&x, &y), budget) == Verdict::Nontrivial {
            return Check::Verified(format!("[{}, {}] is nontrivial", al.format(&x), al.format(&y)));
        }
    }
    if undecided {
        Check::Unchecked(format!("some powers up to {power_budget} undecided"))
    } else {
        Check::VerifiedToBudget(format!("no coinciding powers up to {power_budget}"))
    }
}

fn summarize(pairs: &[PairCheck], power_budget: i64) -> Check {
    let worst = pairs.iter().map(|p| &p.check).max_by_key(|c| c.severity());
    match worst {
        None => Check::Verified("no pairs of edge spaces at a good vertex".into()),
        Some(Check::Refuted(d)) => Check::Refuted(d.clone()),
        Some(Check::Unchecked(d)) => Check::Unchecked(d.clone()),
        Some(Check::VerifiedToBudget(_)) => {
            Check::VerifiedToBudget(format!("{} pairs, powers up to {power_budget}", pairs.len()))
        }
        Some(_) => Check::Verified(format!("{} pairs checked exactly", pairs.len())),
    }
}

fn from_status(s: &Status) -> Check {
    match s {
        Status::Verified(d) => Check::Verified(d.clone()),
        Status::Refuted(d) | Status::Forced(d) => Check::Refuted(d.clone()),
        Status::BudgetLimited(d) => Check::Unchecked(d.clone()),
    }
}

fn hypothesis2(c: &ColoredCore, t: &Tower, budget: usize) -> Check {
    if c.top != BlockKind::A {
        return Check::NotApplicable("top block is not an abelian block".into());
    }
    let top = t.height() - 1;
    let Some(Block::A { attach, .. }) = t.blocks().last() else {
        return Check::NotApplicable("top block is not an abelian block".into());
    };
    let prev = t.stage(top).expect("stage below the top block");
    let al = prev.alphabet();
    let mut parts = vec![from_status(&not_proper_power(prev, attach))];
    for name in ["not a proper power", "not conjugate into a flat"] {
        if let Some(o) = t.ledger().iter().find(|o| o.block == top && o.check == name) {
            parts.push(from_status(&o.status));
        }
    }
    for f in flat_inventory(t, budget) {
        if f.origin == FlatOrigin::Block(top) {
            continue;
        }
        parts.push(match prev.membership(&f.words, attach, budget) {
            Membership::Member(_) => Check::Refuted(format!("{} lies in flat {}", al.format(attach), f.record)),
            Membership::Nonmember => Check::Verified(String::new()),
            Membership::Unknown => Check::Unchecked(format!("membership in flat {} undecided", f.record)),
        });
    }
    let worst = parts.iter().max_by_key(|c| c.severity()).cloned().expect("nonempty");
    match worst {
        Check::Verified(_) => Check::Verified(format!(
            "{} is not a proper power and lies in no flat lattice",
            al.format(attach)
        )),
        other => other,
    }
}
