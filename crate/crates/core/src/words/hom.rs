use super::{Word, WordError};

/// Homomorphism between free groups, given by the images of the source
/// generators `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupHom {
    images: Vec<Word>,
}

impl GroupHom {
    pub fn new(images: Vec<Word>) -> Self {
        GroupHom { images: images.into_iter().map(|w| w.reduce()).collect() }
    }

    pub fn identity(rank: usize) -> Self {
        GroupHom { images: (0..rank).map(Word::generator).collect() }
    }

    pub fn source_rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn set_image(&mut self, gen: usize, w: Word) {
        if gen >= self.images.len() {
            let n = self.images.len();
            self.images.extend((n..=gen).map(Word::generator));
        }
        self.images[gen] = w.reduce();
    }

    /// Reduced image of `w`.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        let mut out = Word::empty();
        for l in w.letters() {
            let img = self.images.get(l.gen()).ok_or_else(|| {
                WordError::AlphabetMismatch(format!(
                    "generator index {} outside source of rank {}",
                    l.gen(),
                    self.images.len()
                ))
            })?;
            out = if l.is_inverse() { out.mul(&img.inverse()) } else { out.mul(img) };
        }
        Ok(out)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &GroupHom) -> Result<GroupHom, WordError> {
        Ok(GroupHom {
            images: self.images.iter().map(|w| then.apply(w)).collect::<Result<_, _>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn examples() {
        let src = Alphabet::new(&["a", "b"]).unwrap();
        let tgt = Alphabet::new(&["x", "y"]).unwrap();
        let h = GroupHom::new(vec![tgt.parse("x").unwrap(), tgt.parse("y").unwrap()]);
        let w = src.parse("a b^-1").unwrap();
        assert_eq!(tgt.format(&h.apply(&w).unwrap()), "x y^-1");

        let h = GroupHom::new(vec![Word::empty(), tgt.parse("y").unwrap()]);
        assert_eq!(tgt.format(&h.apply(&src.parse("a b").unwrap()).unwrap()), "y");
    }

    #[test]
    fn substitution_into_commutator_power() {
        // t -> [a,b]^3 on t a t^-1; oracle: substitute textually, then reduce
        let al = Alphabet::new(&["a", "b", "t"]).unwrap();
        let mut h = GroupHom::identity(3);
        h.set_image(2, al.parse("[a,b]^3").unwrap());
        let got = h.apply(&al.parse("t a t^-1").unwrap()).unwrap();
        let oracle = al.parse("[a,b]^3 a [a,b]^-3").unwrap().reduce();
        assert_eq!(got, oracle);
        assert_eq!(got.len(), 25);
    }

    #[test]
    fn source_mismatch() {
        let h = GroupHom::identity(1);
        assert!(h.apply(&Word::generator(3)).is_err());
    }
}
