//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export returns a JSON string; the `*_json` functions behind them are
//! plain Rust so they can be tested natively.

use dropout_design::constructions::{construct, Family};
use dropout_design::design::{read_ddesign, verify_type, DropoutDesign, Verification};
use dropout_design::filter::{develop, filter_matrices, scramble, verify_difference_family};
use dropout_design::optimality::{run_experiment, Scenario};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps the page responsive: the demo refuses larger runs.
pub const MAX_SAMPLES: usize = 5_000;

fn masks(design: &DropoutDesign) -> Value {
    let blocks: Vec<Vec<String>> = design
        .blocks()
        .iter()
        .map(|b| {
            (0..design.layers())
                .map(|i| (0..design.sizes()[i] as u32).map(|p| if b.contains(i, p) { '1' } else { '0' }).collect())
                .collect()
        })
        .collect();
    json!({ "sizes": design.sizes(), "blocks": blocks })
}

fn grid(design: &DropoutDesign, types: &[dropout_design::design::TypeVector]) -> Result<Value, String> {
    let mut checks = Vec::new();
    for t in types {
        let v = verify_type(design, t).map_err(|e| e.to_string())?;
        let entry = match v {
            Verification::Verified(p) => json!({ "type": t.to_string(), "verified": true, "lambda": p.top_lambdas() }),
            Verification::Failed(c) => json!({
                "type": t.to_string(),
                "verified": false,
                "window": c.start + 1,
                "subtype": c.g,
                "counts": [c.first.1, c.second.1],
            }),
        };
        checks.push(entry);
    }
    let mut out = masks(design);
    out["checks"] = Value::Array(checks);
    Ok(out)
}

/// Masks of a catalog construction, with its verification at the catalog types.
pub fn construction_masks_json(family: &str, d: usize, q: u32, t: usize) -> Result<String, String> {
    let family: Family = family.parse().map_err(|e: dropout_design::Error| e.to_string())?;
    let geo = construct(family, d, q, t).map_err(|e| e.to_string())?;
    let mut out = grid(&geo.design, &geo.types)?;
    let p = &geo.predicted;
    out["family"] = json!(geo.family.name());
    out["predicted"] = json!({ "v": p.v, "k": p.k, "lambda": p.lambda, "n": p.n, "b": p.b });
    Ok(out.to_string())
}

/// Masks of a design given as DDESIGN text, verified at `ty` when non-empty.
pub fn design_masks_json(text: &str, ty: &str) -> Result<String, String> {
    let design = read_ddesign(text).map_err(|e| e.to_string())?;
    let types = if ty.trim().is_empty() {
        vec![]
    } else {
        vec![dropout_design::design::TypeVector::parse(ty).map_err(|e| e.to_string())?]
    };
    Ok(grid(&design, &types)?.to_string())
}

/// The cyclic filter matrices of the base blocks (`;`-separated), scrambled
/// when a seed is given.
pub fn filter_json(v: u32, bases: &str, scramble_seed: Option<u64>) -> Result<String, String> {
    let mut blocks = Vec::new();
    for base in bases.split(';') {
        let pts: Vec<u32> = base
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| format!("{x:?} is not a residue")))
            .collect::<Result<_, _>>()?;
        if let Some(x) = pts.iter().find(|&&x| x >= v) {
            return Err(format!("{x} is outside Z_{v}"));
        }
        blocks.extend(develop(&pts, v));
    }
    let params = verify_difference_family(v, &blocks);
    let mut matrices = filter_matrices(v, &blocks).map_err(|e| e.to_string())?;
    if let Some(seed) = scramble_seed {
        matrices = scramble(&matrices, seed).0;
    }
    let rows: Vec<Vec<String>> = matrices
        .iter()
        .map(|m| m.rows().iter().map(|r| r.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect()).collect())
        .collect();
    let balance = match params {
        Ok(p) => json!({ "balanced": true, "k": p.k, "r": p.r, "lambda": p.lambda }),
        Err(e) => json!({ "balanced": false, "reason": e.to_string() }),
    };
    Ok(json!({ "v": v, "matrices": rows, "balance": balance, "seed": scramble_seed }).to_string())
}

/// Five-number summaries of `det(XᵀX)` per sampling regime.
pub fn determinant_summary_json(samples: usize, seed: u64) -> Result<String, String> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("samples must be in 1..={MAX_SAMPLES}"));
    }
    let exp = run_experiment(samples, seed, &Scenario::default()).map_err(|e| e.to_string())?;
    let regimes: Vec<Value> = exp
        .summaries
        .iter()
        .map(|s| {
            json!({
                "regime": s.regime.number(),
                "min": s.min as f64,
                "q1": s.q1,
                "median": s.median,
                "q3": s.q3,
                "max": s.max as f64,
                "optimal": s.achieved_alpha_beta,
            })
        })
        .collect();
    Ok(json!({ "seed": seed, "samples": samples, "optimum": 1_259_712, "regimes": regimes }).to_string())
}

#[wasm_bindgen]
pub fn construction_masks(family: &str, d: usize, q: u32, t: usize) -> Result<String, JsError> {
    construction_masks_json(family, d, q, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn design_masks(text: &str, ty: &str) -> Result<String, JsError> {
    design_masks_json(text, ty).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn filter_family(v: u32, bases: &str, scramble_seed: Option<u64>) -> Result<String, JsError> {
    filter_json(v, bases, scramble_seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn determinant_summary(samples: usize, seed: u64) -> Result<String, JsError> {
    determinant_summary_json(samples, seed).map_err(|e| JsError::new(&e))
}
