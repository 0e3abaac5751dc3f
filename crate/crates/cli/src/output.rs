//! JSON/CSV result types and emission helpers.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use gmd_core::enumeration::ClassCounts;
use gmd_core::threshold::{PeOrdering, PePrediction};

/// `exponent` output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExponentOutput {
    pub e: f64,
    /// nats per inner-code bit
    pub rate: f64,
    pub e0: f64,
    pub s: f64,
    pub rho_star: f64,
}

/// One method's result inside `thresholds` output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MethodOutput {
    pub method: String,
    pub thresholds: Vec<f64>,
    pub equalization_residuals: Vec<f64>,
    pub max_abs_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PePrediction>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ThresholdsOutput {
    pub l: u32,
    pub z: usize,
    pub e0: f64,
    pub s: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ExponentOutput>,
    pub methods: Vec<MethodOutput>,
}

/// `predict` output: the threshold-derived prediction next to the printed
/// forms and the BMD reference.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PredictOutput {
    pub l: u32,
    pub z: usize,
    pub d_o: usize,
    pub n_i: usize,
    pub e0: f64,
    pub s: f64,
    pub from_solver_thresholds: PePrediction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_forms: Option<PeOrdering>,
    pub bmd_reference: PePrediction,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CountsOutput {
    pub t_r: u64,
    pub t_c: u64,
    pub t_l: u64,
    pub over: Vec<u64>,
    pub under: Vec<u64>,
}

impl From<ClassCounts> for CountsOutput {
    fn from(c: ClassCounts) -> Self {
        CountsOutput {
            t_r: c.t_r,
            t_c: c.t_c,
            t_l: c.t_l,
            over: c.over,
            under: c.under,
        }
    }
}

/// `enumerate` output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EnumerateOutput {
    pub exact_pe: f64,
    pub dominant_pe: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_counts: Option<CountsOutput>,
}

/// One `sweep` measurement row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub e: f64,
    pub z: usize,
    pub l: u32,
    pub method: String,
    pub pe_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub pe_predicted: f64,
    pub trials: u64,
}

pub const SWEEP_COLUMNS: &str = "e,z,l,method,pe_hat,ci_lo,ci_hi,pe_predicted,trials";

/// Render sweep rows as CSV, sorted by (z, e) ascending.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.z, a.l)
            .cmp(&(b.z, b.l))
            .then(a.e.partial_cmp(&b.e).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut out = String::from(SWEEP_COLUMNS);
    out.push('\n');
    for r in sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.e, r.z, r.l, r.method, r.pe_hat, r.ci_lo, r.ci_hi, r.pe_predicted, r.trials
        )
        .expect("string write");
    }
    out
}

/// Companion metadata for a sweep CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepMeta {
    pub tool_version: String,
    pub inner: String,
    pub outer_m: u32,
    pub outer_n: usize,
    pub outer_k: usize,
    pub l: u32,
    pub s: f64,
    pub method: String,
    pub trials: u64,
    pub seed: u64,
    pub z_list: Vec<usize>,
    pub e_grid: Vec<f64>,
    pub csv_columns: String,
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Pretty JSON to stdout or a file.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
