//! Free-group word algebra.
//!
//! Words are sequences of signed generator indices. Names live in an
//! [`Alphabet`]; every word-level operation is index based, so words over a
//! prefix of an alphabet remain valid when the alphabet grows.

mod ball;
mod hom;
mod parse;
mod surface;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use ball::{ball_size, enumerate_ball};
pub use hom::GroupHom;
pub use parse::{is_valid_name, parse_word};
pub use surface::{SurfaceKind, SurfacePresentation};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("operation undefined on the trivial word")]
    TrivialWord,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid surface: {0}")]
    Surface(String),
}

/// A generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        let v = gen as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn gen(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// `g < g^-1 < h < h^-1` for generators declared in the order `g, h`.
    pub fn order_key(self) -> usize {
        self.gen() * 2 + self.is_inverse() as usize
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

/// A word in the generators. Not necessarily reduced; see [`Word::reduce`].
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn generator(gen: usize) -> Self {
        Word(vec![Letter::new(gen, false)])
    }

    /// Word from signed one-based indices, `-2` meaning the inverse of the second generator.
    pub fn from_signed(indices: &[i32]) -> Self {
        Word(
            indices
                .iter()
                .map(|&i| {
                    assert!(i != 0, "zero is not a letter");
                    Letter::new(i.unsigned_abs() as usize - 1, i < 0)
                })
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen()).max()
    }

    pub fn uses_only(&self, gens: impl Fn(usize) -> bool) -> bool {
        self.0.iter().all(|l| gens(l.gen()))
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.reduce().0;
        for &l in &other.reduce().0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Unreduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reduced power; negative exponents invert.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `u v u^-1 v^-1`, reduced.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Reduced `self · g · self^-1`.
    pub fn conjugate(&self, g: &Word) -> Word {
        self.mul(g).mul(&self.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let w = &self.0;
        self.is_reduced() && (w.len() < 2 || w[0] != w[w.len() - 1].inverse())
    }

    /// Splits a word as `conjugator · core · conjugator^-1` with `core`
    /// cyclically reduced. The input is reduced first.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let w = self.reduce().0;
        let mut i = 0;
        let mut j = w.len();
        while j >= i + 2 && w[i] == w[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (Word(w[i..j].to_vec()), Word(w[..i].to_vec()))
    }

    /// Maximal-exponent root of a nontrivial word, when the word is a proper
    /// power in the free group.
    pub fn proper_power(&self) -> Result<Option<(Word, u32)>, WordError> {
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        if n == 0 {
            return Err(WordError::TrivialWord);
        }
        let c = &core.0;
        for p in 1..n {
            if n % p == 0 && (0..n - p).all(|i| c[i] == c[i + p]) {
                let root = conj.mul(&Word(c[..p].to_vec())).mul(&conj.inverse());
                return Ok(Some((root, (n / p) as u32)));
            }
        }
        Ok(None)
    }

    /// Root of the word: itself when not a proper power.
    pub fn root(&self) -> Result<(Word, u32), WordError> {
        Ok(self.proper_power()?.unwrap_or_else(|| (self.reduce(), 1)))
    }

    /// Exponent-sum vector over `rank` generators.
    pub fn abelianize(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            if l.gen() < rank {
                v[l.gen()] += if l.is_inverse() { -1 } else { 1 };
            }
        }
        v
    }

    /// All cyclic permutations of a cyclically reduced word.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.0.len();
        (0..n.max(1))
            .map(|i| {
                let mut v = self.0[i.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..i.min(n)]);
                Word(v)
            })
            .collect()
    }

    /// Whether `self` is conjugate in the free group to a power `root^k`
    /// with `k != 0`. Returns the exponent.
    pub fn conjugate_into_cyclic(&self, root: &Word) -> Option<i64> {
        let (core, _) = self.cyclic_reduce();
        let (rcore, _) = root.cyclic_reduce();
        if core.is_empty() || rcore.is_empty() || core.len() % rcore.len() != 0 {
            return None;
        }
        let k = (core.len() / rcore.len()) as i64;
        for sign in [1i64, -1] {
            let p = rcore.pow(sign * k);
            if p.rotations().contains(&core) {
                return Some(sign * k);
            }
        }
        None
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Ordered list of distinct generator names.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let mut a = Alphabet::default();
        for n in names {
            a.push(n.as_ref())?;
        }
        Ok(a)
    }

    pub fn push(&mut self, name: &str) -> Result<usize, WordError> {
        if !is_valid_name(name) {
            return Err(WordError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(WordError::DuplicateGenerator(name.to_string()));
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// A name not yet in the alphabet, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n))
            .unwrap()
    }

    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        parse_word(self, text)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.max_gen() {
            Some(g) if g >= self.len() => Err(WordError::AlphabetMismatch(format!(
                "generator index {g} outside alphabet of size {}",
                self.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Whitespace-separated tokens `g` / `g^-1`; the empty word prints as `""`.
    pub fn format(&self, w: &Word) -> String {
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|l| {
                let n = &self.names[l.gen()];
                if l.is_inverse() {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect();
        parts.join(" ")
    }
}
