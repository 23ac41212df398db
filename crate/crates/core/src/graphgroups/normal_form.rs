use serde::Serialize;

use super::{GraphError, GraphOfGroups, Membership, Verdict};
use crate::words::{GroupHom, Word, WordError};

/// Crossing of edge `edge`; forward means from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

impl Step {
    fn reverses(&self, other: &Step) -> bool {
        self.edge == other.edge && self.forward != other.forward
    }
}

/// Reduced path: `syllables[0] steps[0] syllables[1] .. steps[k-1] syllables[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    /// `(vertex, element)`; `syllables.len() == steps.len() + 1`.
    pub syllables: Vec<(usize, Word)>,
    pub steps: Vec<Step>,
    pub verdict: Verdict,
}

impl NormalForm {
    /// Number of edge crossings that are stable letters.
    pub fn stable_length(&self, g: &GraphOfGroups) -> usize {
        self.steps.iter().filter(|s| !g.is_tree_edge(s.edge)).count()
    }

    /// The word this form represents (equal in the group to the input).
    pub fn to_word(&self, g: &GraphOfGroups) -> Word {
        let mut out = self.syllables[0].1.clone();
        for (s, (_, w)) in self.steps.iter().zip(&self.syllables[1..]) {
            if let Some(t) = g.edges()[s.edge].letter {
                let t = Word::generator(t);
                out = out.concat(&if s.forward { t } else { t.inverse() });
            }
            out = out.concat(w);
        }
        out
    }
}

enum Token {
    Letter(usize, Word),
    Step(Step),
}

fn tokenize(g: &GraphOfGroups, w: &Word) -> Result<Vec<Token>, GraphError> {
    let mut out = Vec::new();
    let mut cur = g.base();
    let goto = |out: &mut Vec<Token>, cur: usize, v: usize| {
        out.extend(g.tree_path(cur, v).into_iter().map(Token::Step));
    };
    for &l in w.letters() {
        if let Some(v) = g.vertex_of(l.gen()) {
            goto(&mut out, cur, v);
            out.push(Token::Letter(v, Word::from_letters(vec![l])));
            cur = v;
        } else if let Some(e) = g.edge_of_letter(l.gen()) {
            let edge = &g.edges()[e];
            let forward = !l.is_inverse();
            let (a, b) = if forward { (edge.from, edge.to) } else { (edge.to, edge.from) };
            goto(&mut out, cur, a);
            out.push(Token::Step(Step { edge: e, forward }));
            cur = b;
        } else {
            let name = g.alphabet().names().get(l.gen()).cloned();
            return Err(WordError::AlphabetMismatch(
                name.unwrap_or_else(|| format!("generator index {}", l.gen())),
            )
            .into());
        }
    }
    goto(&mut out, cur, g.base());
    Ok(out)
}

struct Frame {
    vertex: usize,
    elem: Word,
    undecided: bool,
}

pub(super) fn reduce(g: &GraphOfGroups, w: &Word, budget: usize) -> Result<NormalForm, GraphError> {
    let tokens = tokenize(g, w)?;
    let mut frames = vec![Frame { vertex: g.base(), elem: Word::empty(), undecided: false }];
    let mut steps: Vec<Step> = Vec::new();
    for tok in tokens {
        match tok {
            Token::Letter(v, x) => {
                let top = frames.last_mut().expect("nonempty");
                debug_assert_eq!(top.vertex, v);
                top.elem = top.elem.mul(&x);
            }
            Token::Step(s) => {
                let mut undecided = false;
                if let Some(prev) = steps.last().copied().filter(|p| p.reverses(&s)) {
                    let top = frames.last().expect("nonempty");
                    match g.edge_membership(prev.edge, prev.forward, &top.elem, budget) {
                        Membership::Member(expr) => {
                            let e = &g.edges()[prev.edge];
                            let other = GroupHom::new(e.images_at(!prev.forward).to_vec());
                            let h = other.apply(&expr)?;
                            frames.pop();
                            steps.pop();
                            let below = frames.last_mut().expect("nonempty");
                            below.elem = below.elem.mul(&h);
                            below.undecided = false;
                            continue;
                        }
                        Membership::Nonmember => {}
                        Membership::Unknown => undecided = true,
                    }
                }
                let e = &g.edges()[s.edge];
                let top = frames.last_mut().expect("nonempty");
                top.undecided = undecided;
                let next = if s.forward { e.to } else { e.from };
                steps.push(s);
                frames.push(Frame { vertex: next, elem: Word::empty(), undecided: false });
            }
        }
    }
    let verdict = if steps.is_empty() {
        g.vertices()[g.base()].word_problem(&frames[0].elem, budget)
    } else if frames.iter().any(|f| f.undecided) {
        Verdict::Unknown
    } else {
        Verdict::Nontrivial
    };
    Ok(NormalForm {
        syllables: frames.into_iter().map(|f| (f.vertex, f.elem)).collect(),
        steps,
        verdict,
    })
}

impl GraphOfGroups {
    /// Positions `i` where `steps[i-1] syllables[i] steps[i]` is a pinch.
    pub fn pinches(&self, nf: &NormalForm, budget: usize) -> Vec<usize> {
        (1..nf.steps.len())
            .filter(|&i| {
                let (p, s) = (nf.steps[i - 1], nf.steps[i]);
                p.reverses(&s)
                    && matches!(
                        self.edge_membership(p.edge, p.forward, &nf.syllables[i].1, budget),
                        Membership::Member(_)
                    )
            })
            .collect()
    }
}
