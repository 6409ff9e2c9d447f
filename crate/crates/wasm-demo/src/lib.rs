//! Browser bindings for three interactive operations: one-dimensional
//! analysis, periodic search over the plane, and locked-shift witnesses.
//!
//! Every entry point takes a JSON request string and returns a JSON response
//! string with an "ok" flag, so the page needs no shared memory or custom
//! marshalling. Results that carry a certificate are re-verified here before
//! they are reported, the same self-distrust rule the CLI follows.

use std::sync::Arc;

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use groupshift::constructions;
use groupshift::coset::CosetTable;
use groupshift::error::{Error, Result};
use groupshift::model;
use groupshift::shift::{Alphabet, Limits, PeriodicConfiguration, Pattern, SftDescription};
use groupshift::solvers::{self, Certificate, CertificateBody, Provenance};
use groupshift::{GroupContext, GroupElement};

fn fail(e: &Error) -> String {
    json!({"ok": false, "error": e.to_string()}).to_string()
}

fn parse(request: &str) -> Result<Value> {
    serde_json::from_str(request).map_err(|e| Error::InvalidModel(format!("bad request: {e}")))
}

fn alphabet_of(v: &Value) -> Result<Alphabet> {
    let letters = v
        .get("alphabet")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidModel("request needs an alphabet array".into()))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(String::from)
                .ok_or_else(|| Error::InvalidModel("letters must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Alphabet::new(letters)
}

fn patterns_of(
    v: &Value,
    group: &Arc<GroupContext>,
    alphabet: &Alphabet,
) -> Result<Vec<Pattern>> {
    v.get("forbidden")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidModel("request needs a forbidden array".into()))?
        .iter()
        .map(|p| model::pattern_from_json(group, alphabet, p))
        .collect()
}

fn basis_of(v: &Value, key: &str) -> Result<Vec<Vec<i64>>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidModel(format!("request needs a {key} matrix")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::InvalidModel("basis rows must be arrays".into()))?
                .iter()
                .map(|x| {
                    x.as_i64().ok_or_else(|| Error::InvalidModel("basis entries must be integers".into()))
                })
                .collect()
        })
        .collect()
}

fn usize_of(v: &Value, key: &str, default: usize) -> usize {
    v.get(key).and_then(Value::as_u64).map(|x| x as usize).unwrap_or(default)
}

/// Letter names of one period block, top row first, for a configuration
/// over a plane quotient.
fn tile_of(config: &PeriodicConfiguration) -> Result<Vec<Vec<String>>> {
    let kernel = config.quotient().kernel_lattice()?;
    let w = kernel[0][0].max(4);
    let h = kernel[1][1].max(4);
    let mut rows = Vec::new();
    let mut y = h - 1;
    loop {
        let mut row = Vec::new();
        for x in 0..w {
            let l = config.at(&GroupElement::Vector(vec![x, y]))?;
            row.push(config.alphabet().name(l).to_string());
        }
        rows.push(row);
        if y == 0 {
            break;
        }
        y -= 1;
    }
    Ok(rows)
}

fn checked_certificate(sft: &SftDescription, cert: &Certificate, limits: &Limits) -> Result<()> {
    let report = solvers::verify_certificate(sft, cert, limits)?;
    if !report.ok {
        return Err(Error::CertificateRejected(report.detail));
    }
    Ok(())
}

fn analyze_z_impl(request: &str) -> Result<String> {
    let v = parse(request)?;
    let group = Arc::new(GroupContext::free_abelian("Z", 1)?);
    let alphabet = alphabet_of(&v)?;
    let forbidden = patterns_of(&v, &group, &alphabet)?;
    let sft = SftDescription::new(Arc::clone(&group), alphabet, forbidden)?;
    let limits = Limits::default();
    let analysis = solvers::z_analyze(&sft, &limits)?;
    let word = match &analysis.point {
        Some(point) => {
            let p = analysis.minimal_period.unwrap_or(1).max(1);
            let mut word = Vec::new();
            for x in 0..p as i64 {
                let l = point.at(&GroupElement::Vector(vec![x]))?;
                word.push(point.alphabet().name(l).to_string());
            }
            Some(word)
        }
        None => None,
    };
    Ok(json!({
        "ok": true,
        "empty": analysis.empty,
        "minimal_period": analysis.minimal_period,
        "word": word,
        "window": analysis.window,
        "vertices_total": analysis.vertices_total,
        "vertices_live": analysis.vertices_live,
        "digest": sft.digest(),
    })
    .to_string())
}

fn search_plane_impl(request: &str) -> Result<String> {
    let v = parse(request)?;
    let group = Arc::new(GroupContext::free_abelian("Z2", 2)?);
    let alphabet = alphabet_of(&v)?;
    let forbidden = patterns_of(&v, &group, &alphabet)?;
    let sft = SftDescription::new(Arc::clone(&group), alphabet, forbidden)?;
    let max_index = usize_of(&v, "max_index", 4);
    let mut limits = Limits::default();
    // Keep the page responsive; the CLI is the place for long runs.
    limits.node_budget = limits.node_budget.min(2_000_000);
    match solvers::periodic_enumerate(&sft, max_index, None, &limits) {
        Ok(Some(cert)) => {
            checked_certificate(&sft, &cert, &limits)?;
            let CertificateBody::PeriodicPoint { config, stabilizer_index } = &cert.body else {
                return Err(Error::CertificateRejected("unexpected certificate kind".into()));
            };
            Ok(json!({
                "ok": true,
                "found": true,
                "stabilizer_index": stabilizer_index,
                "lattice": config.quotient().kernel_lattice()?,
                "tile": tile_of(config)?,
                "verified": true,
                "digest": sft.digest(),
            })
            .to_string())
        }
        Ok(None) => Ok(json!({
            "ok": true,
            "found": false,
            "reason": format!("no strongly periodic point through quotients of index at most {max_index}"),
        })
        .to_string()),
        Err(Error::BudgetExhausted { nodes }) => Ok(json!({
            "ok": true,
            "found": false,
            "reason": format!("search budget exhausted after {nodes} nodes"),
        })
        .to_string()),
        Err(e) => Err(e),
    }
}

fn locked_demo_impl(request: &str) -> Result<String> {
    let v = parse(request)?;
    let basis = basis_of(&v, "basis")?;
    let group = Arc::new(GroupContext::free_abelian("Z2", 2)?);
    let table = CosetTable::sublattice(&group, &basis)?;
    let sft = constructions::locked_sft(&table)?;
    let witness = constructions::locked_witness(&table)?;
    let limits = Limits::default();
    let stabilizer_index = witness.stabilizer().index;
    let cert = Certificate {
        sft_digest: sft.digest(),
        body: CertificateBody::PeriodicPoint {
            config: witness.clone(),
            stabilizer_index,
        },
        provenance: Provenance::new("locked-witness").with("index", table.index()),
    };
    checked_certificate(&sft, &cert, &limits)?;
    Ok(json!({
        "ok": true,
        "alphabet": sft.alphabet().letters(),
        "index": table.index(),
        "stabilizer_index": stabilizer_index,
        "tile": tile_of(&witness)?,
        "forbidden_patterns": sft.forbidden().len(),
        "verified": true,
        "digest": sft.digest(),
    })
    .to_string())
}

/// Exact emptiness and minimal period of an SFT over Z.
/// Request: {"alphabet": [...], "forbidden": [{"support": [...], "letters": [...]}]}.
#[wasm_bindgen]
pub fn analyze_z(request: &str) -> String {
    analyze_z_impl(request).unwrap_or_else(|e| fail(&e))
}

/// Strongly periodic point search for an SFT over the plane.
/// Request adds "max_index" to the analyze_z shape.
#[wasm_bindgen]
pub fn search_plane(request: &str) -> String {
    search_plane_impl(request).unwrap_or_else(|e| fail(&e))
}

/// Locked shift of a plane sublattice: result SFT size, the coset-coloring
/// witness and its verified stabilizer index.
/// Request: {"basis": [[a, b], [c, d]]}.
#[wasm_bindgen]
pub fn locked_demo(request: &str) -> String {
    locked_demo_impl(request).unwrap_or_else(|e| fail(&e))
}
