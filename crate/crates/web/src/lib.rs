//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes the same JSON configuration the CLI reads and returns
//! JSON. The `*_json` functions hold the logic so it can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use shiftinv_core::analysis::decide;
use shiftinv_core::config::{parse_field, to_canonical_json, Config};
use shiftinv_core::spectrum::{shift_spectrum, Annulus};

#[derive(Serialize)]
struct SpectrumView {
    m: usize,
    annuli: Vec<Annulus>,
    /// `[re, im]` pairs.
    curve: Vec<[f64; 2]>,
    max_modulus: f64,
    warnings: Vec<String>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn analyze_json(config: &str) -> Result<String, String> {
    let op = Config::from_json(config).map_err(err)?.operator().map_err(err)?;
    to_canonical_json(&decide(&op).map_err(err)?).map_err(err)
}

pub fn decompose_json(config: &str) -> Result<String, String> {
    let cfg = Config::from_json(config).map_err(err)?;
    let shift = cfg.shift().map_err(err)?;
    to_canonical_json(&cfg.structure(&shift).map_err(err)?).map_err(err)
}

pub fn spectrum_json(config: &str, weight: &str, samples: usize) -> Result<String, String> {
    let cfg = Config::from_json(config).map_err(err)?;
    let d = parse_field("weight", weight).map_err(err)?;
    let shift = cfg.shift().map_err(err)?;
    let structure = cfg.structure(&shift).map_err(err)?;
    let ss = shift_spectrum(&d, &shift, &structure, &cfg.space().map_err(err)?, samples).map_err(err)?;
    let view = SpectrumView {
        m: ss.m,
        max_modulus: ss.max_modulus(),
        annuli: ss.annuli.clone(),
        curve: ss.curve_samples.iter().map(|z| [z.re, z.im]).collect(),
        warnings: ss.warnings.clone(),
    };
    to_canonical_json(&view).map_err(err)
}

/// Invertibility report for a configuration.
#[wasm_bindgen]
pub fn analyze(config: &str) -> Result<String, JsError> {
    analyze_json(config).map_err(|e| JsError::new(&e))
}

/// Periodic structure of the configured shift.
#[wasm_bindgen]
pub fn decompose(config: &str) -> Result<String, JsError> {
    decompose_json(config).map_err(|e| JsError::new(&e))
}

/// Spectrum of `dW` on the configured space.
#[wasm_bindgen]
pub fn spectrum(config: &str, weight: &str, samples: usize) -> Result<String, JsError> {
    spectrum_json(config, weight, samples).map_err(|e| JsError::new(&e))
}
