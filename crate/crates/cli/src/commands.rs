use std::fs;

use serde::Serialize;
use thiserror::Error;

use rft_core::cover::{expand_cover, Cell, CoreReport};
use rft_core::dsl::{parse_tower, DslError, TowerDocument};
use rft_core::embed::{
    certify_injectivity_on_ball, embed_step, validate_strict_quotient, EmbedError, InjectivityCertificate,
    QuotientReport, SplittingDocument,
};
use rft_core::flats::{
    check_isolation_hypotheses, color_vertices, flat_inventory, Check, ColoredVertex, FlatClass, IsolationReport,
};
use rft_core::graphgroups::Verdict;
use rft_core::tower::{recheck_certificate, AttachOptions, Obligation, Status, Tower, WitnessCertificate};
use rft_core::words::Word;

use crate::report::{Input, Outcome, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Dsl { path: String, source: DslError },
    #[error("{0}")]
    Input(String),
}

/// A loaded tower file.
pub struct Loaded {
    pub input: Input,
    pub doc: TowerDocument,
    pub tower: Tower,
}

pub fn read(path: &str) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub fn load(path: &str, budget: usize) -> Result<Loaded, CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Input(format!("{path} is not UTF-8")))?;
    let (doc, tower) = parse_tower(&text, budget).map_err(|source| CliError::Dsl { path: path.to_string(), source })?;
    Ok(Loaded { input: Input::new(path, &bytes), doc, tower })
}

/// Words separated by `;`.
pub fn words(t: &Tower, list: &str) -> Result<Vec<Word>, CliError> {
    list.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| t.parse(s).map_err(|e| CliError::Input(format!("word \"{s}\": {e}"))))
        .collect()
}

#[derive(Serialize)]
pub struct VertexSummary {
    pub label: String,
    pub kind: &'static str,
    pub gens: Vec<String>,
}

#[derive(Serialize)]
pub struct EdgeSummary {
    pub from: usize,
    pub to: usize,
    pub from_images: Vec<String>,
    pub to_images: Vec<String>,
    pub letter: Option<String>,
}

#[derive(Serialize)]
pub struct PresentResult {
    pub name: String,
    pub height: usize,
    pub stage: usize,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub presentation: String,
    pub vertices: Vec<VertexSummary>,
    pub edges: Vec<EdgeSummary>,
    pub document: String,
}

pub fn present(argv: &[String], file: &str, stage: Option<usize>, budget: usize) -> Result<Report<PresentResult>, CliError> {
    let l = load(file, budget)?;
    let t = &l.tower;
    let n = stage.unwrap_or(t.height());
    let st = t
        .stage(n)
        .ok_or_else(|| CliError::Input(format!("stage {n} does not exist; the tower has height {}", t.height())))?;
    let al = st.alphabet();
    let p = st.presentation();
    let g = st.graph();
    // vertex groups may use hidden letters beyond the stage alphabet
    let gal = g.alphabet();
    let vertices = g
        .vertices()
        .iter()
        .map(|v| VertexSummary {
            label: v.label.clone(),
            kind: v.kind_name(),
            gens: v.gens().iter().map(|&i| gal.name(i).to_string()).collect(),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| EdgeSummary {
            from: e.from,
            to: e.to,
            from_images: e.from_images.iter().map(|w| gal.format(w)).collect(),
            to_images: e.to_images.iter().map(|w| gal.format(w)).collect(),
            letter: e.letter.map(|i| gal.name(i).to_string()),
        })
        .collect();
    let ledger: Vec<Obligation> = t.ledger().iter().filter(|o| o.block < n).cloned().collect();
    let result = PresentResult {
        name: l.doc.name.clone(),
        height: t.height(),
        stage: n,
        generators: al.names().to_vec(),
        relators: p.relators.iter().map(|r| al.format(r)).collect(),
        presentation: p.format(),
        vertices,
        edges,
        document: l.doc.to_string(),
    };
    Ok(Report::new(argv, vec![l.input], Outcome::of_ledger(&ledger), result, &ledger))
}

#[derive(Serialize)]
pub struct WpResult {
    pub word: String,
    pub reduced: String,
    pub verdict: Verdict,
    /// Stable letters in the normal form.
    pub stable_length: usize,
    pub normal_form: String,
}

pub fn wp(argv: &[String], file: &str, word: &str, budget: usize) -> Result<Report<WpResult>, CliError> {
    let l = load(file, budget)?;
    let t = &l.tower;
    let w = t.parse(word).map_err(|e| CliError::Input(format!("word \"{word}\": {e}")))?;
    let g = t.top().graph();
    let nf = g.normal_form(&w, budget).map_err(|e| CliError::Input(e.to_string()))?;
    let verdict = t.word_problem(&w, budget).map_err(|e| CliError::Input(e.to_string()))?;
    let outcome = if verdict == Verdict::Unknown { Outcome::BudgetLimited } else { Outcome::Verified };
    let result = WpResult {
        word: word.to_string(),
        reduced: t.alphabet().format(&w.reduce()),
        verdict,
        stable_length: nf.stable_length(g),
        normal_form: match nf.to_word(g).reduce() {
            w if w.is_empty() => "1".into(),
            w => t.alphabet().format(&w),
        },
    };
    Ok(Report::new(argv, vec![l.input], outcome, result, t.ledger()))
}

#[derive(Serialize)]
pub struct WitnessResult {
    pub words: Vec<String>,
    /// Independent replay of the certificate against the presentation.
    pub recheck: Status,
    pub certificate: WitnessCertificate,
}

pub fn witness(
    argv: &[String],
    file: &str,
    list: &str,
    budget: usize,
    seed: u64,
) -> Result<Report<WitnessResult>, CliError> {
    let l = load(file, budget)?;
    let t = &l.tower;
    let ws = words(t, list)?;
    let cert = t.find_rf_witness(&ws, budget, seed);
    let recheck = match (cert.valid, recheck_certificate(&cert, t.presentation())) {
        (false, _) => Status::BudgetLimited(format!("no injective map found in {} attempts", cert.attempts)),
        (true, Ok(())) => Status::Verified("replayed against the presentation".into()),
        (true, Err(e)) => Status::Refuted(e),
    };
    let outcome = Outcome::of_status(&recheck);
    let result =
        WitnessResult { words: ws.iter().map(|w| t.alphabet().format(w)).collect(), recheck, certificate: cert };
    Ok(Report::new(argv, vec![l.input], outcome, result, t.ledger()))
}

#[derive(Serialize)]
pub struct Embedded {
    pub block: String,
    /// Images of the generators of `L`.
    pub j: Vec<(String, String)>,
    /// Basis of the maximal abelian subgroup the edge group maps into.
    pub u: Vec<String>,
    pub presentation: String,
    pub document: String,
    pub obligations: Vec<Obligation>,
    pub certificate: InjectivityCertificate,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EmbedOutcome {
    Embedded(Box<Embedded>),
    Rejected { reason: String },
}

#[derive(Serialize)]
pub struct EmbedResult {
    pub case: String,
    pub quotient: QuotientReport,
    pub embedding: EmbedOutcome,
}

pub struct EmbedArgs<'a> {
    pub file: &'a str,
    pub splitting: &'a str,
    pub ball: usize,
    pub budget: usize,
    pub assume: bool,
}

pub fn embed(argv: &[String], a: &EmbedArgs) -> Result<Report<EmbedResult>, CliError> {
    let l = load(a.file, a.budget)?;
    let spec_bytes = read(a.splitting)?;
    let doc: SplittingDocument = serde_json::from_slice(&spec_bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.splitting)))?;
    let bad = |e: EmbedError| CliError::Input(format!("{}: {e}", a.splitting));
    let s = doc.splitting(a.budget).map_err(bad)?;
    let d = doc.quotient(&s, l.tower.clone()).map_err(bad)?;
    let quotient = validate_strict_quotient(&s, &d, a.ball, a.budget).map_err(bad)?;
    let mut outcome =
        quotient.bullets.iter().map(|b| Outcome::of_status(&b.status)).fold(Outcome::Verified, Outcome::and);
    let case = serde_json::to_value(doc.case).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let opts = AttachOptions { budget: a.budget, assume: a.assume };
    let embedding = match embed_step(&s, &d, &opts) {
        Ok(r) => {
            let cert = certify_injectivity_on_ball(&r, s.graph(), a.ball, a.budget);
            if !cert.refutations.is_empty() {
                outcome = outcome.and(Outcome::Refuted);
            } else if !cert.unknown.is_empty() {
                outcome = outcome.and(Outcome::BudgetLimited);
            }
            outcome = outcome.and(Outcome::of_ledger(&r.obligations));
            let name = format!("{}_embedded", l.doc.name);
            let block = r.tower.blocks().last().map(|b| format!("{:?}", b.kind())).unwrap_or_default();
            let al = r.tower.alphabet();
            EmbedOutcome::Embedded(Box::new(Embedded {
                block,
                j: r.j_table(s.alphabet()),
                u: r.u.lattice.iter().map(|w| al.format(w)).collect(),
                presentation: r.tower.presentation().format(),
                document: TowerDocument::from_tower(&name, &r.tower).to_string(),
                obligations: r.obligations.clone(),
                certificate: cert,
            }))
        }
        Err(e @ EmbedError::NotHomomorphism { .. }) => {
            outcome = Outcome::Refuted;
            EmbedOutcome::Rejected { reason: e.to_string() }
        }
        Err(e @ EmbedError::Unverified { .. }) => {
            outcome = outcome.and(Outcome::BudgetLimited);
            EmbedOutcome::Rejected { reason: e.to_string() }
        }
        Err(EmbedError::Tower(e)) => {
            outcome = outcome.and(if matches!(e, rft_core::tower::TowerError::Unverified { .. }) {
                Outcome::BudgetLimited
            } else {
                Outcome::Refuted
            });
            EmbedOutcome::Rejected { reason: e.to_string() }
        }
        Err(e) => return Err(bad(e)),
    };
    let inputs = vec![l.input, Input::new(a.splitting, &spec_bytes)];
    Ok(Report::new(argv, inputs, outcome, EmbedResult { case, quotient, embedding }, l.tower.ledger()))
}

#[derive(Serialize)]
pub struct CoreResult {
    pub generators: Vec<String>,
    pub depth: usize,
    pub core: CoreReport,
}

pub fn core_of(t: &Tower, gens: &[Word], depth: usize, require: &[Cell], budget: usize) -> Result<CoreReport, CliError> {
    let cover = expand_cover(t.top().graph(), gens, depth, budget).map_err(|e| CliError::Input(e.to_string()))?;
    cover.extract_core(require).map_err(|e| CliError::Input(e.to_string()))
}

pub fn cells(list: &str) -> Result<Vec<Cell>, CliError> {
    list.split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Cell>().map_err(|e| CliError::Input(format!("cell \"{s}\": {e}"))))
        .collect()
}

pub fn core(
    argv: &[String],
    file: &str,
    gens: &str,
    depth: usize,
    require: Option<&str>,
    budget: usize,
) -> Result<Report<CoreResult>, CliError> {
    let l = load(file, budget)?;
    let t = &l.tower;
    let ws = words(t, gens)?;
    if ws.is_empty() {
        return Err(CliError::Input("--gens lists no words".into()));
    }
    let require = cells(require.unwrap_or(""))?;
    let r = core_of(t, &ws, depth, &require, budget)?;
    let outcome = if r.exact && r.stabilization.stable { Outcome::Verified } else { Outcome::BudgetLimited };
    let result = CoreResult {
        generators: ws.iter().map(|w| t.alphabet().format(w)).collect(),
        depth,
        core: r,
    };
    Ok(Report::new(argv, vec![l.input], outcome, result, t.ledger()))
}

#[derive(Serialize)]
pub struct Isolation {
    pub generators: Vec<String>,
    pub colors: Vec<ColoredVertex>,
    pub core_rank: usize,
    pub report: IsolationReport,
}

#[derive(Serialize)]
pub struct FlatsResult {
    pub inventory: Vec<FlatClass>,
    /// Absent for a height-0 tower, which has no top splitting.
    pub isolation: Option<Isolation>,
}

pub fn flats(
    argv: &[String],
    file: &str,
    gens: Option<&str>,
    power_budget: i64,
    budget: usize,
) -> Result<Report<FlatsResult>, CliError> {
    let l = load(file, budget)?;
    let t = &l.tower;
    let inventory = flat_inventory(t, budget);
    let mut outcome =
        inventory.iter().map(|f| Outcome::of_status(&f.commuting)).fold(Outcome::Verified, Outcome::and);
    let isolation = match t.blocks().last() {
        None => None,
        Some(top) => {
            let ws = match gens {
                Some(g) => words(t, g)?,
                None => (0..t.alphabet().len()).map(Word::generator).collect(),
            };
            let r = core_of(t, &ws, 0, &[], budget)?;
            let c = color_vertices(&r, Some(top.kind())).map_err(|e| CliError::Input(e.to_string()))?;
            let report = check_isolation_hypotheses(&c, t, power_budget, budget);
            for h in &report.hypotheses {
                outcome = outcome.and(match h.check {
                    Check::Verified(_) | Check::NotApplicable(_) => Outcome::Verified,
                    Check::Refuted(_) => Outcome::Refuted,
                    Check::VerifiedToBudget(_) | Check::Unchecked(_) => Outcome::BudgetLimited,
                });
            }
            Some(Isolation {
                generators: ws.iter().map(|w| t.alphabet().format(w)).collect(),
                colors: c.vertices.clone(),
                core_rank: r.rank,
                report,
            })
        }
    };
    Ok(Report::new(argv, vec![l.input], outcome, FlatsResult { inventory, isolation }, t.ledger()))
}

/// Status of a self-test check.
pub fn passed(ok: bool, detail: impl Into<String>) -> Status {
    if ok {
        Status::Verified(detail.into())
    } else {
        Status::Refuted(detail.into())
    }
}
