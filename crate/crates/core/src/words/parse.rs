use super::{Alphabet, Letter, Word, WordError};

/// Generator names: an ASCII letter or `_`, then letters, digits, `_` or `'`.
pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Parses the word grammar:
///
/// ```text
/// word   := factor*
/// factor := atom ('^' int)?
/// atom   := name | '[' word ',' word ']' | '(' word ')' | '1'
/// ```
///
/// `[u,v]` expands to `u v u^-1 v^-1`. The result is not reduced.
pub fn parse_word(alphabet: &Alphabet, text: &str) -> Result<Word, WordError> {
    let mut p = Parser { alphabet, chars: text.char_indices().collect(), pos: 0 };
    let w = p.word()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.chars.get(p.pos) {
        return Err(WordError::Syntax { col: i + 1, msg: format!("unexpected `{c}`") });
    }
    Ok(w)
}

struct Parser<'a> {
    alphabet: &'a Alphabet,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn col(&self) -> usize {
        self.chars.get(self.pos).map(|&(i, _)| i + 1).unwrap_or_else(|| {
            self.chars.last().map(|&(i, c)| i + c.len_utf8() + 1).unwrap_or(1)
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordError> {
        Err(WordError::Syntax { col: self.col(), msg: msg.into() })
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut out = Word::empty();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(',') | Some(']') | Some(')') => return Ok(out),
                _ => {
                    let f = self.factor()?;
                    out = out.concat(&f);
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let atom = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.int()?;
            let base = if k < 0 { atom.inverse() } else { atom };
            let mut out = Word::empty();
            for _ in 0..k.unsigned_abs() {
                out = out.concat(&base);
            }
            return Ok(out);
        }
        Ok(atom)
    }

    fn int(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("expected an integer exponent")
        })
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let u = self.word()?;
                if self.peek() != Some(',') {
                    return self.err("expected `,` in commutator");
                }
                self.pos += 1;
                let v = self.word()?;
                if self.peek() != Some(']') {
                    return self.err("expected `]`");
                }
                self.pos += 1;
                Ok(u.concat(&v).concat(&u.inverse()).concat(&v.inverse()))
            }
            Some('(') => {
                self.pos += 1;
                let u = self.word()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(u)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                match self.alphabet.index_of(&name) {
                    Some(g) => Ok(Word::from_letters(vec![Letter::new(g, false)])),
                    None => Err(WordError::UnknownSymbol(name)),
                }
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}
