use std::collections::BTreeMap;

use super::lexer::{lex, Tok, Token};
use super::{BlockDecl, BlockSpans, DslError, Spans, SummandDecl, SurfaceDecl, TowerDocument};

pub(crate) fn parse(text: &str) -> Result<(TowerDocument, Spans), DslError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let doc = p.document()?;
    Ok(doc)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// Fields of a block body, before the kind-specific checks.
#[derive(Default)]
struct Fields {
    attach: Option<Attach>,
    rank: Option<usize>,
    letters: Option<Vec<String>>,
    surface: Option<SurfaceDecl>,
    boundary: Option<Vec<(String, String)>>,
    retract: Option<Vec<(String, String)>>,
    assume: bool,
}

enum Attach {
    One(String),
    Many(Vec<String>),
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn at(&self) -> (usize, usize) {
        let t = self.peek();
        (t.line, t.col)
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let (line, col) = self.at();
        Err(DslError::Syntax { line, col, msg: msg.into() })
    }

    fn unexpected<T>(&self, want: &str) -> Result<T, DslError> {
        self.err(format!("expected {want}, found {}", self.peek().tok.describe()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == s)
    }

    fn punct(&mut self, p: &str) -> Result<(), DslError> {
        if self.is_punct(p) {
            self.next();
            Ok(())
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), DslError> {
        if self.is_ident(k) {
            self.next();
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn num(&mut self) -> Result<usize, DslError> {
        match self.peek().tok {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn word(&mut self) -> Result<String, DslError> {
        match &self.peek().tok {
            Tok::Str(s) if s.trim().is_empty() => self.err("empty word; write \"1\" for the identity"),
            Tok::Str(s) => {
                let s = s.trim().to_string();
                self.next();
                Ok(s)
            }
            _ => self.unexpected("a quoted word"),
        }
    }

    fn skip_semis(&mut self) {
        while self.is_punct(";") {
            self.next();
        }
    }

    fn names(&mut self) -> Result<Vec<String>, DslError> {
        let mut out = vec![self.ident()?];
        while self.is_punct(",") {
            self.next();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn document(&mut self) -> Result<(TowerDocument, Spans), DslError> {
        self.keyword("tower")?;
        let name = self.ident()?;
        self.punct("{")?;
        let base_at = self.at();
        self.keyword("base")?;
        let base = self.base()?;
        let mut spans = Spans { base: Some(base_at), blocks: Vec::new() };
        let mut blocks = Vec::new();
        loop {
            self.skip_semis();
            if self.is_punct("}") {
                self.next();
                break;
            }
            let at = self.at();
            self.keyword("block")?;
            let mut sp = BlockSpans { at: Some(at), words: BTreeMap::new() };
            blocks.push(self.block(&mut sp)?);
            spans.blocks.push(sp);
        }
        if self.peek().tok != Tok::Eof {
            return self.unexpected("end of input");
        }
        Ok((TowerDocument { name, base, blocks }, spans))
    }

    fn base(&mut self) -> Result<Vec<SummandDecl>, DslError> {
        self.punct("{")?;
        let mut out = Vec::new();
        loop {
            self.skip_semis();
            if self.is_punct("}") {
                self.next();
                break;
            }
            out.push(self.summand()?);
        }
        if out.is_empty() {
            return self.err("the base needs at least one summand");
        }
        Ok(out)
    }

    /// `key=N` pairs before the `:` of a summand or surface.
    fn params(&mut self, allowed: &[&str]) -> Result<BTreeMap<String, usize>, DslError> {
        let mut out = BTreeMap::new();
        while matches!(&self.peek().tok, Tok::Ident(_)) && matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Punct("="))) {
            let (line, col) = self.at();
            let k = self.ident()?;
            if !allowed.contains(&k.as_str()) {
                return Err(DslError::Syntax { line, col, msg: format!("unknown parameter `{k}`") });
            }
            if out.contains_key(&k) {
                return Err(DslError::Syntax { line, col, msg: format!("`{k}` given twice") });
            }
            self.punct("=")?;
            out.insert(k, self.num()?);
            if self.is_punct(",") {
                self.next();
            } else {
                break;
            }
        }
        if !out.is_empty() {
            self.punct(":")?;
        }
        Ok(out)
    }

    fn summand(&mut self) -> Result<SummandDecl, DslError> {
        let (line, col) = self.at();
        let kind = self.ident()?;
        self.punct("(")?;
        let s = match kind.as_str() {
            "free" => SummandDecl::Free { gens: self.names()? },
            "abelian" => {
                let ps = self.params(&["rank"])?;
                let gens = self.names()?;
                if let Some(&r) = ps.get("rank") {
                    if r != gens.len() {
                        return Err(DslError::Syntax {
                            line,
                            col,
                            msg: format!("abelian summand of rank {r} lists {} generators", gens.len()),
                        });
                    }
                }
                SummandDecl::Abelian { gens }
            }
            "surface" => {
                let ps = self.params(&["genus", "punctures"])?;
                let Some(&genus) = ps.get("genus") else {
                    return Err(DslError::Syntax { line, col, msg: "surface needs genus=".into() });
                };
                if ps.get("punctures").copied().unwrap_or(0) != 0 {
                    return Err(DslError::Syntax {
                        line,
                        col,
                        msg: "base surfaces are closed; a punctured surface group is free, use free(..)".into(),
                    });
                }
                SummandDecl::Surface { genus, gens: self.names()? }
            }
            other => {
                return Err(DslError::Syntax {
                    line,
                    col,
                    msg: format!("unknown summand `{other}`; expected free, abelian or surface"),
                })
            }
        };
        self.punct(")")?;
        Ok(s)
    }

    fn block(&mut self, sp: &mut BlockSpans) -> Result<BlockDecl, DslError> {
        let (kline, kcol) = self.at();
        let kind = self.ident()?;
        if !["A", "Q", "T"].contains(&kind.as_str()) {
            return Err(DslError::Syntax { line: kline, col: kcol, msg: format!("unknown block kind `{kind}`") });
        }
        self.punct("{")?;
        let mut f = Fields::default();
        loop {
            self.skip_semis();
            if self.is_punct("}") {
                break;
            }
            let (line, col) = self.at();
            let key = self.ident()?;
            let dup = |taken: bool| -> Result<(), DslError> {
                if taken {
                    Err(DslError::Syntax { line, col, msg: format!("`{key}` given twice") })
                } else {
                    Ok(())
                }
            };
            if key == "assume" {
                dup(f.assume)?;
                f.assume = true;
                continue;
            }
            self.punct("=")?;
            match key.as_str() {
                "attach" => {
                    dup(f.attach.is_some())?;
                    f.attach = Some(if self.is_punct("(") {
                        self.next();
                        let mut ws = Vec::new();
                        loop {
                            sp.words.insert(format!("attach.{}", ws.len() + 1), self.at());
                            ws.push(self.word()?);
                            if self.is_punct(",") {
                                self.next();
                            } else {
                                break;
                            }
                        }
                        self.punct(")")?;
                        Attach::Many(ws)
                    } else {
                        sp.words.insert("attach".into(), self.at());
                        Attach::One(self.word()?)
                    });
                }
                "rank" => {
                    dup(f.rank.is_some())?;
                    f.rank = Some(self.num()?);
                }
                "letters" => {
                    dup(f.letters.is_some())?;
                    f.letters = Some(self.names()?);
                }
                "surface" => {
                    dup(f.surface.is_some())?;
                    if self.is_ident("surface") {
                        self.next();
                    }
                    self.punct("(")?;
                    let (pl, pc) = self.at();
                    let ps = self.params(&["genus", "punctures"])?;
                    let gens = self.names()?;
                    self.punct(")")?;
                    let (Some(&genus), Some(&punctures)) = (ps.get("genus"), ps.get("punctures")) else {
                        return Err(DslError::Syntax { line: pl, col: pc, msg: "surface needs genus= and punctures=".into() });
                    };
                    f.surface = Some(SurfaceDecl { genus, punctures, gens });
                }
                "boundary" | "retract" => {
                    dup(if key == "boundary" { f.boundary.is_some() } else { f.retract.is_some() })?;
                    let prefix = if key == "boundary" { "" } else { "retract." };
                    let map = self.map(sp, prefix)?;
                    if key == "boundary" {
                        f.boundary = Some(map);
                    } else {
                        f.retract = Some(map);
                    }
                }
                other => {
                    return Err(DslError::Syntax { line, col, msg: format!("unknown block field `{other}`") });
                }
            }
        }
        let close = self.at();
        self.punct("}")?;
        finish(&kind, f, close)
    }

    /// `{ key -> "word", .. }`
    fn map(&mut self, sp: &mut BlockSpans, prefix: &str) -> Result<Vec<(String, String)>, DslError> {
        self.punct("{")?;
        let mut out: Vec<(String, String)> = Vec::new();
        while !self.is_punct("}") {
            let (line, col) = self.at();
            let k = self.ident()?;
            if out.iter().any(|(x, _)| *x == k) {
                return Err(DslError::Syntax { line, col, msg: format!("`{k}` given twice") });
            }
            self.punct("->")?;
            sp.words.insert(format!("{prefix}{k}"), self.at());
            out.push((k, self.word()?));
            if self.is_punct(",") {
                self.next();
            } else {
                break;
            }
        }
        self.punct("}")?;
        Ok(out)
    }
}

fn finish(kind: &str, f: Fields, (line, col): (usize, usize)) -> Result<BlockDecl, DslError> {
    let err = |msg: String| DslError::Syntax { line, col, msg };
    let missing = |what: &str| err(format!("block {kind} needs {what}"));
    let stray = |what: &str| err(format!("block {kind} takes no {what}"));
    let letters = f.letters.unwrap_or_default();
    match kind {
        "A" | "T" => {
            if f.surface.is_some() {
                return Err(stray("surface"));
            }
            if f.boundary.is_some() || f.retract.is_some() {
                return Err(stray("boundary or retract"));
            }
            let rank = f.rank.ok_or_else(|| missing("rank="))?;
            match (kind, f.attach) {
                (_, None) => Err(missing("attach=")),
                ("A", Some(Attach::One(attach))) => Ok(BlockDecl::A { attach, rank, letters, assume: f.assume }),
                ("A", Some(Attach::Many(_))) => Err(err("block A attaches along a single quoted word".into())),
                (_, Some(Attach::Many(attach))) => Ok(BlockDecl::T { attach, rank, letters, assume: f.assume }),
                (_, Some(Attach::One(w))) => Ok(BlockDecl::T { attach: vec![w], rank, letters, assume: f.assume }),
            }
        }
        _ => {
            if f.attach.is_some() || f.rank.is_some() {
                return Err(stray("attach or rank"));
            }
            let surface = f.surface.ok_or_else(|| missing("surface="))?;
            let given = f.boundary.ok_or_else(|| missing("boundary="))?;
            let mut boundary = vec![None; surface.punctures];
            for (k, w) in given {
                let idx = k
                    .strip_prefix('b')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1 && n <= surface.punctures)
                    .ok_or_else(|| err(format!("boundary keys are b1..b{}, found `{k}`", surface.punctures)))?;
                boundary[idx - 1] = Some(w);
            }
            let boundary = boundary
                .into_iter()
                .enumerate()
                .map(|(i, w)| w.ok_or_else(|| err(format!("boundary b{} has no word", i + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            let retract: BTreeMap<String, String> = f.retract.ok_or_else(|| missing("retract="))?.into_iter().collect();
            if let Some(k) = retract.keys().find(|k| !surface.gens.contains(k) && !letters.contains(k)) {
                return Err(err(format!("retract names `{k}`, which is not a surface generator or letter")));
            }
            Ok(BlockDecl::Q { surface, boundary, retract, letters, assume: f.assume })
        }
    }
}
