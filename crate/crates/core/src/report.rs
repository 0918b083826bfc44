//! The verification record: everything the pipeline asserts, with the raw
//! fields the assertions are recomputable from.

use serde::Serialize;

use crate::config::Config;

pub const FORMAT_VERSION: &str = "qturn-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Required checks gate the exit status; informational ones do not.
    pub required: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, required: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            required,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Validity {
    pub allowed: bool,
    pub realizable: bool,
    pub outside_theory: bool,
    /// Freeness extensions that stopped on an ambiguous margin.
    pub indeterminate_stops: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusIndex {
    pub radius: f64,
    pub index: Option<i64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexFateRecord {
    pub vertex: usize,
    pub sample: usize,
    pub alpha: String,
    pub omega: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PetalRecord {
    pub position: usize,
    pub kind: String,
    pub pattern: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReverseOrbitRecord {
    pub sector: usize,
    pub window: String,
    pub target_alpha: String,
    pub target_omega: String,
    pub found_x: Option<f64>,
    pub found_y: Option<f64>,
    pub probes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryRecord {
    pub witness_start: usize,
    pub retries: u32,
    /// Horizontal letters at the vertices, in witness order (ASCII).
    pub transitions: String,
    /// Vertical letters of the arcs, in witness order (ASCII).
    pub verticals: String,
    pub vertex_fates: Vec<VertexFateRecord>,
    pub witness_vertices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub format_version: String,
    pub word_in: String,
    pub word_arrows: String,
    pub d: usize,
    pub validity: Validity,
    pub ip_c_quarters: Option<i64>,
    pub ip_c: Option<String>,
    pub symbolic_index: Option<i64>,
    pub sector_types: Option<String>,
    pub petals: Vec<PetalRecord>,
    pub conservative: Option<bool>,
    pub module_lower_bound: Option<u32>,
    pub numeric_index: Option<i64>,
    pub numeric_residual: Option<f64>,
    pub numeric_stability: Vec<RadiusIndex>,
    pub h_lengths: Vec<(String, Option<u32>)>,
    pub h_length_unit_circle: Option<u32>,
    pub module_estimate: Option<u32>,
    pub module_certified: Option<bool>,
    pub word_recovered: Option<String>,
    pub recovery: Option<RecoveryRecord>,
    pub reverse_orbits: Vec<ReverseOrbitRecord>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub nonconvergent: bool,
    pub timings_ms: Vec<(String, f64)>,
    pub config: Config,
}

impl IndexReport {
    pub fn failed_required(&self) -> Vec<&CheckResult> {
        self.checks
            .iter()
            .filter(|c| c.required && !c.passed)
            .collect()
    }
}
