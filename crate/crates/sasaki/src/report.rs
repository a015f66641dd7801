//! Machine-readable run reports for the command-line frontend.

use serde::Serialize;
use serde_json::{Map, Value};

/// Top-level report with a stable schema. Residuals are always present,
/// pass or fail, so results can be tracked across refactors.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub space: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub residuals: Map<String, Value>,
    /// wall time in ms; forced to zero under `--json` so that identical
    /// seeds and inputs serialize byte-identically
    pub timing_ms: u64,
    pub seed: u64,
}

impl RunReport {
    pub fn new(space: &str, command: &str, seed: u64) -> Self {
        RunReport {
            schema: "1",
            space: space.to_string(),
            command: command.to_string(),
            inputs: Map::new(),
            results: Map::new(),
            residuals: Map::new(),
            timing_ms: 0,
            seed,
        }
    }

    pub fn input(&mut self, key: &str, value: Value) {
        self.inputs.insert(key.to_string(), value);
    }

    pub fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    pub fn residual(&mut self, key: &str, value: f64) {
        self.residuals
            .insert(key.to_string(), Value::from(quantize(value)));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Rounds to 12 significant digits so that reports are byte-stable against
/// last-ulp jitter from threaded kernels.
pub fn quantize(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor();
    let scale = 10f64.powf(11.0 - mag);
    (x * scale).round() / scale
}

/// Pretty single-line pass/fail banner for the human-readable mode.
pub fn verdict_line(name: &str, pass: bool, residual: f64) -> String {
    format!(
        "{:<32} {}  (residual {:.3e})",
        name,
        if pass { "pass" } else { "FAIL" },
        residual
    )
}
