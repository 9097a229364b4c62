//! Browser bindings: expand or verify an identity and inspect partitions
//! from a static page.

use serde_json::{json, Value};
use sympart::identities::{Engine, IdentityId, Params, Side};
use sympart::partitions::{cell_stats, Partition};
use wasm_bindgen::prelude::*;

/// Orders above this make the page unresponsive for the heavier identities.
pub const MAX_ORDER: usize = 14;

fn params(order: usize) -> Result<Params, String> {
    if order > MAX_ORDER {
        return Err(format!("order {order} is above the browser limit {MAX_ORDER}"));
    }
    Ok(Params::with_order(order))
}

pub fn expand_text(identity: &str, side: &str, order: usize) -> Result<String, String> {
    let id: IdentityId = identity.parse().map_err(|e| format!("{e}"))?;
    let side: Side = side.parse().map_err(|e| format!("{e}"))?;
    let series = Engine::default()
        .expand(id, side, &params(order)?)
        .map_err(|e| e.to_string())?;
    Ok(series.to_string())
}

pub fn verify_json(identity: &str, order: usize) -> Result<String, String> {
    let id: IdentityId = identity.parse().map_err(|e| format!("{e}"))?;
    let report = Engine::default()
        .verify(id, &params(order)?)
        .map_err(|e| e.to_string())?;
    Ok(report.to_json_string())
}

pub fn cell_stats_json(partition: &str) -> Result<String, String> {
    let p: Partition = partition.trim().parse().map_err(|e| format!("{e}"))?;
    let rows: Vec<Value> = cell_stats(&p)
        .iter()
        .map(|c| {
            json!({"row": c.row, "col": c.col, "hook": c.hook, "c": c.content,
                   "c_sp": c.symplectic, "c_o": c.orthogonal})
        })
        .collect();
    Ok(Value::Array(rows).to_string())
}

pub fn identity_ids() -> Vec<&'static str> {
    IdentityId::ALL.iter().map(|i| i.as_str()).collect()
}

/// One side of an identity as canonical series text.
#[wasm_bindgen]
pub fn expand(identity: &str, side: &str, order: usize) -> Result<String, JsError> {
    expand_text(identity, side, order).map_err(|e| JsError::new(&e))
}

/// Verification report as JSON.
#[wasm_bindgen]
pub fn verify(identity: &str, order: usize) -> Result<String, JsError> {
    verify_json(identity, order).map_err(|e| JsError::new(&e))
}

/// Per-cell hooks and contents of a partition literal such as `[3,1]`, as JSON.
#[wasm_bindgen]
pub fn partition_stats(partition: &str) -> Result<String, JsError> {
    cell_stats_json(partition).map_err(|e| JsError::new(&e))
}

/// Valid identity ids, comma separated.
#[wasm_bindgen]
pub fn identities() -> String {
    identity_ids().join(",")
}
