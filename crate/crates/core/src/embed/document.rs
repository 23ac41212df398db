//! Serialized splitting and quotient data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EmbedError, SplittingData, SplittingKind, StrictQuotientData};
use crate::graphgroups::{GraphBuilder, VertexGroup, VertexKind};
use crate::tower::Tower;
use crate::words::{Alphabet, GroupHom, SurfacePresentation, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VertexDoc {
    Free { gens: Vec<String> },
    Abelian { gens: Vec<String> },
    Surface {
        genus: usize,
        #[serde(default)]
        punctures: usize,
        gens: Vec<String>,
    },
}

impl VertexDoc {
    fn gens(&self) -> &[String] {
        match self {
            VertexDoc::Free { gens } | VertexDoc::Abelian { gens } | VertexDoc::Surface { gens, .. } => gens,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: usize,
    pub to: usize,
    pub from_images: Vec<String>,
    pub to_images: Vec<String>,
    /// Stable letter of an HNN edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<String>,
}

/// `q: L -> L'` and `i: L' -> Γ'` given generator by generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientDoc {
    pub alphabet: Vec<String>,
    pub q: BTreeMap<String, String>,
    pub i: BTreeMap<String, String>,
}

/// A splitting of `L` together with its strict quotient. Exactly one of
/// `nu` and `quotient` is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingDocument {
    pub case: SplittingKind,
    pub vertices: Vec<VertexDoc>,
    pub edge: EdgeDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientDoc>,
}

fn map_hom(
    map: &BTreeMap<String, String>,
    src: &Alphabet,
    dst: &Alphabet,
    what: &str,
) -> Result<GroupHom, EmbedError> {
    for k in map.keys() {
        if !src.contains(k) {
            return Err(EmbedError::Splitting(format!("{what} names unknown generator {k}")));
        }
    }
    let imgs = src
        .names()
        .iter()
        .map(|g| {
            let text = map
                .get(g)
                .ok_or_else(|| EmbedError::Splitting(format!("{what} has no image for {g}")))?;
            Ok(dst.parse(text)?.reduce())
        })
        .collect::<Result<Vec<Word>, EmbedError>>()?;
    Ok(GroupHom::new(imgs))
}

impl SplittingDocument {
    pub fn splitting(&self, budget: usize) -> Result<SplittingData, EmbedError> {
        let names: Vec<&String> = self.vertices.iter().flat_map(|v| v.gens()).collect();
        let al = Alphabet::new(&names)?;
        let mut b = GraphBuilder::new(al.clone());
        let mut next = 0;
        for (i, v) in self.vertices.iter().enumerate() {
            let n = v.gens().len();
            let gens: Vec<usize> = (next..next + n).collect();
            next += n;
            let kind = match v {
                VertexDoc::Free { .. } => VertexKind::Free { gens },
                VertexDoc::Abelian { .. } => VertexKind::FreeAbelian { gens },
                VertexDoc::Surface { genus, punctures: 0, .. } => {
                    VertexKind::Surface(SurfacePresentation::closed(*genus, gens)?)
                }
                VertexDoc::Surface { genus, punctures, .. } => {
                    VertexKind::Surface(SurfacePresentation::bounded(*genus, *punctures, gens)?)
                }
            };
            b.add_vertex(VertexGroup::new(format!("v{i}"), kind));
        }
        let e = &self.edge;
        let parse = |ws: &[String]| ws.iter().map(|w| al.parse(w)).collect::<Result<Vec<_>, _>>();
        b.add_edge(e.from, e.to, parse(&e.from_images)?, parse(&e.to_images)?, e.letter.as_deref());
        SplittingData::new(self.case, b.build(0, budget)?)
    }

    pub fn quotient(&self, s: &SplittingData, target: Tower) -> Result<StrictQuotientData, EmbedError> {
        match (&self.nu, &self.quotient) {
            (Some(nu), None) => {
                let h = map_hom(nu, s.alphabet(), target.alphabet(), "nu")?;
                Ok(StrictQuotientData::direct(h, target))
            }
            (None, Some(qd)) => {
                let mid = Alphabet::new(&qd.alphabet)?;
                let q = map_hom(&qd.q, s.alphabet(), &mid, "q")?;
                let i = map_hom(&qd.i, &mid, target.alphabet(), "i")?;
                Ok(StrictQuotientData::new(q, i, target))
            }
            _ => Err(EmbedError::Splitting("give exactly one of nu and quotient".into())),
        }
    }
}
