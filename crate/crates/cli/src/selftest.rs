//! Built-in checks on the shipped examples, for a quick sanity run.

use serde::Serialize;

use rft_core::dsl::{parse_tower, TowerDocument};
use rft_core::embed::{certify_injectivity_on_ball, embed_step, SplittingDocument};
use rft_core::flats::{check_isolation_hypotheses, color_vertices, compose_isolation_bound, BoundEnv, SymbolicBound};
use rft_core::graphgroups::Verdict;
use rft_core::tower::{recheck_certificate, AttachOptions, Status, Tower};

use crate::commands::{core_of, passed};
use crate::report::{Outcome, Report};

const BUDGET: usize = 16;

type Check = (&'static str, fn() -> Result<Status, String>);
const WEDGE: &str = include_str!("../../../towers/wedge2.rft");
const HOST: &str = include_str!("../../../towers/genus2host.rft");
const DOUBLE: &str = include_str!("../../../towers/genus2_double.json");

#[derive(Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    #[serde(flatten)]
    pub status: Status,
}

#[derive(Serialize)]
pub struct SelftestResult {
    pub checks: Vec<SelfCheck>,
}

fn tower(text: &str) -> Result<Tower, String> {
    parse_tower(text, BUDGET).map(|(_, t)| t).map_err(|e| e.to_string())
}

fn host_presentation() -> Result<Status, String> {
    let p = tower(HOST)?.presentation().format();
    Ok(passed(p == "< a,b,t | a b a^-1 b^-1 t b a b^-1 a^-1 t^-1 >", p))
}

fn word_problem() -> Result<Status, String> {
    let t = tower(HOST)?;
    let v = |w: &str| t.parse(w).map_err(|e| e.to_string()).and_then(|w| t.word_problem(&w, BUDGET).map_err(|e| e.to_string()));
    let (r, c) = (v("[[a,b],t]")?, v("[a,t]")?);
    Ok(passed(r == Verdict::Trivial && c == Verdict::Nontrivial, format!("[[a,b],t]: {r:?}, [a,t]: {c:?}")))
}

fn witness() -> Result<Status, String> {
    let t = tower(HOST)?;
    let ws = ["a", "b", "t", "[a,t]"].iter().map(|w| t.parse(w)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let cert = t.find_rf_witness(&ws, BUDGET, 1);
    let replay = recheck_certificate(&cert, t.presentation());
    Ok(passed(cert.valid && replay.is_ok(), format!("params {:?}", cert.params)))
}

fn wedge_core() -> Result<Status, String> {
    let t = tower(WEDGE)?;
    let ws = ["a^2", "b", "a b a^-1"].iter().map(|w| t.parse(w)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let r = core_of(&t, &ws, 0, &[], BUDGET).map_err(|e| e.to_string())?;
    Ok(passed(r.vertices.len() == 2 && r.rank == 3, format!("{} vertices, rank {}", r.vertices.len(), r.rank)))
}

fn embedding() -> Result<Status, String> {
    let doc: SplittingDocument = serde_json::from_str(DOUBLE).map_err(|e| e.to_string())?;
    let s = doc.splitting(BUDGET).map_err(|e| e.to_string())?;
    let d = doc.quotient(&s, tower(WEDGE)?).map_err(|e| e.to_string())?;
    let r = embed_step(&s, &d, &AttachOptions::default()).map_err(|e| e.to_string())?;
    let cert = certify_injectivity_on_ball(&r, s.graph(), 2, BUDGET);
    Ok(passed(cert.full, format!("{} nontrivial ball elements", cert.nontrivial)))
}

fn hypotheses() -> Result<Status, String> {
    let t = tower(HOST)?;
    let ws = ["a", "b", "t a t^-1", "t b t^-1"].iter().map(|w| t.parse(w)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let r = core_of(&t, &ws, 0, &[], BUDGET).map_err(|e| e.to_string())?;
    let c = color_vertices(&r, t.blocks().last().map(|b| b.kind())).map_err(|e| e.to_string())?;
    let rep = check_isolation_hypotheses(&c, &t, 8, BUDGET);
    let ok = (0..3).all(|i| rep.hypothesis(i).is_verified());
    Ok(passed(ok, format!("{} pairs", rep.pairs.len())))
}

fn bound() -> Result<Status, String> {
    let b = compose_isolation_bound(&[SymbolicBound::atom("phi_v")], &[], None, &["diam_e".into()]).map_err(|e| e.to_string())?;
    let v = b.eval(3, &BoundEnv::default().atom("phi_v", &[]).constant("diam_e", 5)).map_err(|e| e.to_string())?;
    Ok(passed(v == 11, format!("{b} at k = 3 is {v}")))
}

fn round_trip() -> Result<Status, String> {
    let d = TowerDocument::parse(HOST).map_err(|e| e.to_string())?;
    let again = TowerDocument::parse(&d.to_string()).map_err(|e| e.to_string())?;
    Ok(passed(d == again, "genus2host"))
}

pub fn selftest(argv: &[String]) -> Report<SelftestResult> {
    let table: [Check; 8] = [
        ("host presentation", host_presentation),
        ("word problem", word_problem),
        ("witness", witness),
        ("wedge core", wedge_core),
        ("genus two embedding", embedding),
        ("isolation hypotheses", hypotheses),
        ("bound spot value", bound),
        ("document round trip", round_trip),
    ];
    let checks: Vec<SelfCheck> =
        table.iter().map(|(name, f)| SelfCheck { name, status: f().unwrap_or_else(Status::Refuted) }).collect();
    let outcome = checks.iter().map(|c| Outcome::of_status(&c.status)).fold(Outcome::Verified, Outcome::and);
    Report::new(argv, Vec::new(), outcome, SelftestResult { checks }, &[])
}
