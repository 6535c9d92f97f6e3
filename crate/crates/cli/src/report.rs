//! Serializable report bodies for the audit and invert commands.
//!
//! Field order is fixed by the struct definitions and every field is emitted
//! on every run; optional blocks serialize as explicit nulls. Nothing here
//! depends on wall-clock time or iteration over unordered containers, so the
//! same inputs always produce the same bytes.

/// Effective configuration after command-line overrides, echoed verbatim.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConfigEcho {
    pub weights: Vec<f64>,
    pub normalization: String,
    pub aggregation: String,
    pub range_class: Option<String>,
    pub targets: Option<Vec<f64>>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input_path: String,
    pub input_sha256: String,
    pub rows_used: usize,
    pub rows_dropped: usize,
    pub seed: u64,
    pub config: ConfigEcho,
}

/// One row of the per-indicator table: bandwidths, linearity p-values, the
/// main-effect estimates across bandwidth choices, and smoother diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IndicatorRecord {
    pub label: String,
    pub w_i: f64,
    pub h_cv: f64,
    pub h_dpi: f64,
    pub boundary_hit: bool,
    pub dpi_capped: bool,
    pub p_cv: f64,
    pub p_dpi: f64,
    pub s_lin: f64,
    pub s_cv: f64,
    pub s_dpi: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub epsilon_i: f64,
    pub n_used: usize,
    pub rows_local_linear: usize,
    pub rows_nadaraya_watson: usize,
    pub rows_loo_mean: usize,
}

/// Weight-versus-importance comparison at the reference indicator, with the
/// maximal discrepancy under each bandwidth choice and its grid bounds.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiscrepancyBlock {
    pub reference: usize,
    pub reference_label: String,
    pub zeta_sq: Vec<f64>,
    pub ratios_cv: Vec<f64>,
    pub gaps_cv: Vec<f64>,
    pub argmax: usize,
    pub argmax_label: String,
    pub d_lin: f64,
    pub d_cv: f64,
    pub d_dpi: f64,
    pub d_min: f64,
    pub d_max: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InverseBlock {
    pub method: String,
    pub targets: Vec<f64>,
    pub w_star: Vec<f64>,
    pub g: Vec<f64>,
    pub attainable: bool,
    pub achieved: Vec<f64>,
    pub condition_warning: bool,
    pub negative_normalizer: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditReport {
    pub provenance: Provenance,
    pub indicators: Vec<IndicatorRecord>,
    pub discrepancy: DiscrepancyBlock,
    pub inverse: Option<InverseBlock>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InvertReport {
    pub tool: String,
    pub version: String,
    pub input_path: String,
    pub input_sha256: String,
    /// "covariance" for a square numeric matrix input, "panel" for a data CSV.
    pub mode: String,
    pub k: usize,
    pub normalization: Option<String>,
    pub solution: InverseBlock,
}
