//! wasm-bindgen entry points for the demo page in `www/`. Every function
//! takes tower source text and returns a JSON string; failures come back as
//! `{"error": ...}` so the page has a single code path.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rft_core::cover::expand_cover;
use rft_core::dsl::parse_tower;
use rft_core::tower::Tower;
use rft_core::words::Word;

const BUDGET: usize = 16;

fn load(src: &str) -> Result<Tower, String> {
    parse_tower(src, BUDGET).map(|(_, t)| t).map_err(|e| e.to_string())
}

fn words(t: &Tower, list: &str) -> Result<Vec<Word>, String> {
    list.split(';').map(str::trim).filter(|w| !w.is_empty()).map(|w| t.parse(w).map_err(|e| e.to_string())).collect()
}

fn render(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn present_json(src: &str) -> Result<Value, String> {
    let t = load(src)?;
    Ok(json!({
        "height": t.height(),
        "generators": t.alphabet().names(),
        "presentation": t.presentation().format(),
        "ledger": t.ledger(),
    }))
}

pub fn word_problem_json(src: &str, word: &str) -> Result<Value, String> {
    let t = load(src)?;
    let w = t.parse(word).map_err(|e| e.to_string())?;
    let v = t.word_problem(&w, BUDGET).map_err(|e| e.to_string())?;
    Ok(json!({ "word": t.alphabet().format(&w), "verdict": v }))
}

pub fn core_json(src: &str, gens: &str) -> Result<Value, String> {
    let t = load(src)?;
    let ws = words(&t, gens)?;
    if ws.is_empty() {
        return Err("give at least one generator".into());
    }
    let r = expand_cover(t.top().graph(), &ws, 0, BUDGET)
        .and_then(|c| c.extract_core(&[]))
        .map_err(|e| e.to_string())?;
    serde_json::to_value(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn present(src: &str) -> String {
    render(present_json(src))
}

#[wasm_bindgen]
pub fn word_problem(src: &str, word: &str) -> String {
    render(word_problem_json(src, word))
}

#[wasm_bindgen]
pub fn core(src: &str, gens: &str) -> String {
    render(core_json(src, gens))
}
