use super::{Letter, Word, WordError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Closed,
    Bounded { punctures: usize },
}

/// Standard presentation of an orientable surface group.
///
/// Generators are `a1 b1 .. ag bg` followed, for surfaces with `p` boundary
/// circles, by `c1 .. c(p-1)`. A closed surface has the single relator
/// `[a1,b1]..[ag,bg]`; a bounded one is free, with boundary words `c1 ..
/// c(p-1)` and `[a1,b1]..[ag,bg] c1 .. c(p-1)` for the last circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePresentation {
    genus: usize,
    kind: SurfaceKind,
    gens: Vec<usize>,
    relator: Option<Word>,
    /// Cyclic permutations of the relator and its inverse, for Dehn's algorithm.
    symmetrized: Vec<Word>,
}

impl SurfacePresentation {
    /// Closed surface of genus `genus >= 2` on the given generator indices.
    pub fn closed(genus: usize, gens: Vec<usize>) -> Result<Self, WordError> {
        if genus < 2 {
            return Err(WordError::Surface(format!(
                "closed genus {genus} is not hyperbolic or has Euler characteristic -1 excluded"
            )));
        }
        if gens.len() != 2 * genus {
            return Err(WordError::Surface(format!(
                "closed genus {genus} needs {} generators, got {}",
                2 * genus,
                gens.len()
            )));
        }
        let relator = commutator_product(&gens, genus);
        let mut symmetrized = relator.rotations();
        symmetrized.extend(relator.inverse().rotations());
        let s = SurfacePresentation {
            genus,
            kind: SurfaceKind::Closed,
            gens,
            relator: Some(relator),
            symmetrized,
        };
        let piece = s.max_piece_length();
        let len = s.relator.as_ref().unwrap().len();
        if 6 * piece >= len {
            return Err(WordError::Surface(format!(
                "relator fails small cancellation: piece {piece} vs length {len}"
            )));
        }
        Ok(s)
    }

    /// Surface of genus `genus` with `punctures >= 1` boundary circles and
    /// free fundamental group of rank at least 2.
    pub fn bounded(genus: usize, punctures: usize, gens: Vec<usize>) -> Result<Self, WordError> {
        if punctures < 1 || 2 * genus + punctures < 3 {
            return Err(WordError::Surface(format!(
                "bounded surface ({genus}, {punctures}) is a disc or an annulus"
            )));
        }
        let want = 2 * genus + punctures - 1;
        if gens.len() != want {
            return Err(WordError::Surface(format!(
                "genus {genus} with {punctures} punctures needs {want} generators, got {}",
                gens.len()
            )));
        }
        Ok(SurfacePresentation {
            genus,
            kind: SurfaceKind::Bounded { punctures },
            gens,
            relator: None,
            symmetrized: Vec::new(),
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn is_closed(&self) -> bool {
        self.kind == SurfaceKind::Closed
    }

    pub fn punctures(&self) -> usize {
        match self.kind {
            SurfaceKind::Closed => 0,
            SurfaceKind::Bounded { punctures } => punctures,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures() as i64
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn relator(&self) -> Option<&Word> {
        self.relator.as_ref()
    }

    /// Boundary words, one per boundary circle.
    pub fn boundary_words(&self) -> Vec<Word> {
        let p = self.punctures();
        if p == 0 {
            return Vec::new();
        }
        let cs: Vec<Word> =
            self.gens[2 * self.genus..].iter().map(|&g| Word::generator(g)).collect();
        let mut last = commutator_product(&self.gens, self.genus);
        for c in &cs {
            last = last.mul(c);
        }
        let mut out = cs;
        out.push(last);
        out
    }

    /// Longest common prefix of two distinct members of the symmetrized relator set.
    pub fn max_piece_length(&self) -> usize {
        let mut best = 0;
        for (i, u) in self.symmetrized.iter().enumerate() {
            for v in &self.symmetrized[i + 1..] {
                if u == v {
                    continue;
                }
                let m = u
                    .letters()
                    .iter()
                    .zip(v.letters())
                    .take_while(|(x, y)| x == y)
                    .count();
                best = best.max(m);
            }
        }
        best
    }

    /// Dehn's algorithm. Returns the empty word iff `w` is trivial.
    ///
    /// Greedy: the leftmost position holding more than half of some relator
    /// rotation is rewritten first, using the longest such match (first
    /// rotation wins ties), followed by free reduction.
    pub fn dehn_reduce(&self, w: &Word) -> Result<Word, WordError> {
        let Some(relator) = &self.relator else {
            return Err(WordError::Surface(
                "Dehn's algorithm needs a closed surface; bounded surface groups are free".into(),
            ));
        };
        let len = relator.len();
        let mut cur = w.reduce();
        'outer: loop {
            let letters = cur.letters();
            for i in 0..letters.len() {
                let mut best: Option<(usize, &Word)> = None;
                for r in &self.symmetrized {
                    let m = r
                        .letters()
                        .iter()
                        .zip(&letters[i..])
                        .take_while(|(x, y)| x == y)
                        .count();
                    if 2 * m > len && best.is_none_or(|(bm, _)| m > bm) {
                        best = Some((m, r));
                    }
                }
                if let Some((m, r)) = best {
                    let complement: Vec<Letter> =
                        r.letters()[m..].iter().rev().map(|l| l.inverse()).collect();
                    let mut next = letters[..i].to_vec();
                    next.extend(complement);
                    next.extend_from_slice(&letters[i + m..]);
                    cur = Word::from_letters(next).reduce();
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool, WordError> {
        match self.kind {
            SurfaceKind::Closed => Ok(self.dehn_reduce(w)?.is_empty()),
            SurfaceKind::Bounded { .. } => Ok(w.reduce().is_empty()),
        }
    }
}

fn commutator_product(gens: &[usize], genus: usize) -> Word {
    let mut w = Word::empty();
    for i in 0..genus {
        let a = Word::generator(gens[2 * i]);
        let b = Word::generator(gens[2 * i + 1]);
        w = w.mul(&Word::commutator(&a, &b));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_ball, Alphabet};

    fn genus2() -> (Alphabet, SurfacePresentation) {
        let a = Alphabet::new(&["a", "b", "c", "d"]).unwrap();
        (a, SurfacePresentation::closed(2, vec![0, 1, 2, 3]).unwrap())
    }

    #[test]
    fn constructor_checks() {
        assert!(SurfacePresentation::closed(1, vec![0, 1]).is_err());
        assert!(SurfacePresentation::closed(2, vec![0, 1, 2]).is_err());
        let (_, s) = genus2();
        assert_eq!(s.max_piece_length(), 1);
        assert_eq!(s.euler_characteristic(), -2);
        let t = SurfacePresentation::bounded(1, 1, vec![0, 1]).unwrap();
        assert_eq!(t.euler_characteristic(), -1);
        assert!(SurfacePresentation::bounded(0, 2, vec![0]).is_err());
        assert_eq!(SurfacePresentation::bounded(0, 3, vec![0, 1]).unwrap().euler_characteristic(), -1);
    }

    #[test]
    fn boundary_words() {
        let al = Alphabet::new(&["x", "y", "c"]).unwrap();
        let t = SurfacePresentation::bounded(1, 1, vec![0, 1]).unwrap();
        assert_eq!(al.format(&t.boundary_words()[0]), "x y x^-1 y^-1");
        let t2 = SurfacePresentation::bounded(1, 2, vec![0, 1, 2]).unwrap();
        let b = t2.boundary_words();
        assert_eq!(b.len(), 2);
        assert_eq!(al.format(&b[0]), "c");
        assert_eq!(al.format(&b[1]), "x y x^-1 y^-1 c");
    }

    #[test]
    fn dehn_examples() {
        let (al, s) = genus2();
        let d = |t: &str| al.format(&s.dehn_reduce(&al.parse(t).unwrap()).unwrap());
        assert_eq!(d("[a,b][c,d]"), "");
        assert_eq!(d("a"), "a");
        assert_eq!(d("a c [a,b][c,d] c^-1 a^-1"), "");
        assert_eq!(d("[c,d]^-1[a,b]^-1"), "");
        assert_eq!(d("a b a^-1 b^-1 c d c^-1"), "d");
    }

    #[test]
    fn bounded_surface_refuses_dehn() {
        let t = SurfacePresentation::bounded(1, 1, vec![0, 1]).unwrap();
        assert!(t.dehn_reduce(&Word::generator(0)).is_err());
    }

    #[test]
    fn dehn_trivial_implies_zero_abelianization() {
        let (al, s) = genus2();
        for w in enumerate_ball(al.len(), 6) {
            if s.dehn_reduce(&w).unwrap().is_empty() {
                assert!(w.abelianize(4).iter().all(|&x| x == 0), "{}", al.format(&w));
            }
        }
    }
}
