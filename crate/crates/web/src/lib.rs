//! Browser bindings. Every export takes and returns strings; results are
//! JSON objects with either the payload fields or an `error` field, so the
//! same functions work natively in tests.

use pzl_core::board::{CompletedBoard, Given};
use pzl_core::corpus;
use pzl_core::dsl::{check_source, parse_rule};
use pzl_core::grid::GridDims;
use pzl_core::problem::{mask, MaskPolicy};
use pzl_core::render::{render, render_problem};
use pzl_core::solver::Solver;
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::wasm_bindgen;

/// Kept small so the page stays responsive.
const BUDGET: u64 = 2_000_000;

fn reply(r: Result<Json, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn solver(rule: &str, size: &str) -> Result<Solver, String> {
    let rule = parse_rule(rule).map_err(|d| d.to_string())?;
    let dims: GridDims = size.parse().map_err(|e: pzl_core::Error| e.to_string())?;
    Solver::from_rule(&rule, dims).map_err(|e| e.to_string())
}

/// Shipped puzzles: name, title and rule text.
#[wasm_bindgen]
pub fn corpus_entries() -> String {
    let list: Vec<Json> = corpus::entries()
        .iter()
        .map(|e| json!({ "name": e.name, "title": e.title, "rule": e.source, "sizes": e.desk.iter().map(ToString::to_string).collect::<Vec<_>>() }))
        .collect();
    Json::Array(list).to_string()
}

/// Diagnostics for rule text: `{"ok": bool, "diagnostics": [..]}`.
#[wasm_bindgen]
pub fn check_rule(rule: &str) -> String {
    let diags = check_source(rule);
    let ok = !diags.iter().any(|d| d.is_error());
    let list: Vec<Json> = diags
        .iter()
        .map(|d| json!({ "code": d.code.as_str(), "line": d.line, "col": d.col, "text": d.to_string() }))
        .collect();
    json!({ "ok": ok, "diagnostics": list }).to_string()
}

/// One completed board: `{"board": <document>, "text": <drawing>}`.
#[wasm_bindgen]
pub fn generate(rule: &str, size: &str, seed: u64) -> String {
    reply((|| {
        let found = solver(rule, size)?
            .generate(seed, 1, BUDGET)
            .map_err(|e| e.to_string())?;
        let b = found
            .boards
            .first()
            .ok_or("no completed board at this size")?;
        Ok(json!({ "board": b.to_json(), "text": render(b) }))
    })())
}

/// Exact number of completed boards: `{"count": n}`.
#[wasm_bindgen]
pub fn count(rule: &str, size: &str) -> String {
    reply((|| {
        let (n, _) = solver(rule, size)?
            .count(&Given::default(), u64::MAX, BUDGET)
            .map_err(|e| e.to_string())?;
        Ok(json!({ "count": n }))
    })())
}

/// A unique problem built from a generated board:
/// `{"problem": <document>, "text": <drawing>, "answer": <drawing>}`.
#[wasm_bindgen]
pub fn problem(rule: &str, size: &str, seed: u64) -> String {
    reply((|| {
        let s = solver(rule, size)?;
        let found = s.generate(seed, 1, BUDGET).map_err(|e| e.to_string())?;
        let b = found
            .boards
            .first()
            .ok_or("no completed board at this size")?;
        let p =
            mask(&s, b, seed, &MaskPolicy::RevealThenThin, BUDGET).map_err(|e| e.to_string())?;
        Ok(json!({ "problem": p.to_json(), "text": render_problem(&p), "answer": render(b) }))
    })())
}

/// Draws a completed board document.
#[wasm_bindgen]
pub fn render_board(doc: &str) -> String {
    reply(
        CompletedBoard::from_json_str(doc)
            .map(|b| json!({ "text": render(&b) }))
            .map_err(|e| e.to_string()),
    )
}

/// Checks a completed board document against the classic rules of a
/// shipped puzzle: `{"pass": bool}`.
#[wasm_bindgen]
pub fn oracle_check(name: &str, doc: &str) -> String {
    reply((|| {
        let b = CompletedBoard::from_json_str(doc).map_err(|e| e.to_string())?;
        let pass = corpus::oracle_validate(name, &b).map_err(|e| e.to_string())?;
        Ok(json!({ "pass": pass }))
    })())
}
