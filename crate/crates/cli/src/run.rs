//! Command implementations behind the four subcommands.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use ciaudit_core::audit::{discrepancy, discrepancy_bounds, select_reference};
use ciaudit_core::bandwidth::{build_grid, cv_criterion, select_bandwidths};
use ciaudit_core::dataset::{
    compute_index, gen_gaussian_dataset, keep_raw, load_csv, minmax_normalize, standardize,
    CompositeSeries, IngestOptions, Normalization, NormalizedMatrix, WeightVector,
};
use ciaudit_core::effects::{effective_weight, linearity_pvalue, main_effect_curve};
use ciaudit_core::inverse::{solve_from_targets, InverseSolution};
use ciaudit_core::smoother::{eval_at, locallinear_fit};
use ciaudit_core::{Error as CoreError, ErrorKind};

use crate::config::{
    self, aggregation_name, load_config, load_gen_spec, normalization_name, range_class_name,
    ConfigFile, Effective, Overrides,
};
use crate::report::{
    AuditReport, ConfigEcho, DiscrepancyBlock, IndicatorRecord, InverseBlock, InvertReport,
    Provenance,
};

/// Error surface of the binary. Exit codes: usage and I/O problems along with
/// core input errors map to 1; core numerical failures map to 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Module {
        module: &'static str,
        source: CoreError,
    },
    Indicator {
        module: &'static str,
        label: String,
        source: CoreError,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{m}"),
            CliError::Module { module, source } => write!(f, "{module}: {source}"),
            CliError::Indicator {
                module,
                label,
                source,
            } => write!(f, "{module} (indicator {label}): {source}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Module { source, .. } | CliError::Indicator { source, .. } => {
                match source.kind() {
                    ErrorKind::Input => 1,
                    ErrorKind::Numerical => 2,
                }
            }
        }
    }
}

pub const TOOL: &str = "ciaudit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(2 * digest.len());
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Everything the audit and plotdata commands share: the normalized panel,
/// the weights, the composite score, the merged configuration, and the input
/// digest for provenance.
struct Pipeline {
    nm: NormalizedMatrix<f64>,
    w: WeightVector<f64>,
    y: CompositeSeries<f64>,
    eff: Effective,
    input_path: String,
    input_sha256: String,
    rows_dropped: usize,
}

fn prepare(data: &Path, cfg: &ConfigFile, over: &Overrides) -> Result<Pipeline, CliError> {
    let eff = config::effective(cfg, over)?;
    let bytes = read_bytes(data)?;
    let input_sha256 = sha256_hex(&bytes);

    let options = IngestOptions {
        missing_marker: "NA".to_string(),
        declared_range: eff.range_class,
    };
    let dm = load_csv::<f64>(data, &options).map_err(|source| CliError::Module {
        module: "dataset",
        source,
    })?;
    let rows_dropped = dm.dropped_rows;

    let nm = match eff.normalization {
        Normalization::MinMax => minmax_normalize(&dm),
        Normalization::Standardize => standardize(&dm),
        Normalization::None => keep_raw(&dm),
    }
    .map_err(|source| CliError::Module {
        module: "dataset",
        source,
    })?;

    if eff.weights.len() != nm.k() {
        return Err(CliError::Usage(format!(
            "config lists {} weights but the data has {} indicators",
            eff.weights.len(),
            nm.k()
        )));
    }
    let w = WeightVector::new(eff.weights.clone()).map_err(|source| CliError::Module {
        module: "dataset",
        source,
    })?;
    let y = compute_index(&nm, &w, eff.aggregation).map_err(|source| CliError::Module {
        module: "dataset",
        source,
    })?;

    Ok(Pipeline {
        nm,
        w,
        y,
        eff,
        input_path: data.display().to_string(),
        input_sha256,
        rows_dropped,
    })
}

fn indicator_column(nm: &NormalizedMatrix<f64>, i: usize) -> DVector<f64> {
    DVector::from_iterator(nm.n(), nm.x.column(i).iter().copied())
}

fn indicator_record(p: &Pipeline, i: usize) -> Result<IndicatorRecord, CliError> {
    let label = p.nm.indicators[i].clone();
    let fail = |module: &'static str, source: CoreError| CliError::Indicator {
        module,
        label: p.nm.indicators[i].clone(),
        source,
    };
    let x_i = indicator_column(&p.nm, i);
    let yv = &p.y.y;

    let grid = build_grid::<f64>(&p.nm.range_class[i]);
    let sel = select_bandwidths(&x_i, yv, &grid).map_err(|e| fail("bandwidth", e))?;
    let est = main_effect_curve(i, &x_i, yv, &grid, &sel).map_err(|e| fail("effects", e))?;
    let test_cv = linearity_pvalue(&x_i, yv, sel.h_cv).map_err(|e| fail("effects", e))?;
    let test_dpi = linearity_pvalue(&x_i, yv, sel.h_dpi).map_err(|e| fail("effects", e))?;
    let fit = locallinear_fit(&x_i, yv, sel.h_cv).map_err(|e| fail("smoother", e))?;
    let counts = fit.method_counts();
    let epsilon_i = effective_weight(&p.nm, &p.w, &p.y, i).map_err(|e| fail("effects", e))?;

    Ok(IndicatorRecord {
        label,
        w_i: p.w.w[i],
        h_cv: sel.h_cv,
        h_dpi: sel.h_dpi,
        boundary_hit: sel.boundary_hit,
        dpi_capped: sel.dpi_capped,
        p_cv: test_cv.p_value,
        p_dpi: test_dpi.p_value,
        s_lin: est.s_lin,
        s_cv: est.s_cv,
        s_dpi: est.s_dpi,
        s_min: est.s_min,
        s_max: est.s_max,
        epsilon_i,
        n_used: sel.n_used,
        rows_local_linear: counts[0],
        rows_nadaraya_watson: counts[1],
        rows_loo_mean: counts[2],
    })
}

/// Runs every indicator pipeline on its own thread and joins in index order,
/// so both the record order and the first reported error are deterministic.
fn indicator_records(p: &Pipeline) -> Result<Vec<IndicatorRecord>, CliError> {
    let k = p.nm.k();
    let results: Vec<Result<IndicatorRecord, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k)
            .map(|i| scope.spawn(move || indicator_record(p, i)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("indicator worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn discrepancy_block(
    p: &Pipeline,
    records: &[IndicatorRecord],
) -> Result<DiscrepancyBlock, CliError> {
    let fail = |source: CoreError| CliError::Module {
        module: "audit",
        source,
    };
    let s_cv: Vec<f64> = records.iter().map(|r| r.s_cv).collect();
    let s_lin: Vec<f64> = records.iter().map(|r| r.s_lin).collect();
    let s_dpi: Vec<f64> = records.iter().map(|r| r.s_dpi).collect();
    let s_min: Vec<f64> = records.iter().map(|r| r.s_min).collect();
    let s_max: Vec<f64> = records.iter().map(|r| r.s_max).collect();

    let reference = select_reference(&p.w, &s_cv).map_err(fail)?;
    let rep_cv = discrepancy(&p.w, &s_cv, reference).map_err(fail)?;
    let d_lin = discrepancy(&p.w, &s_lin, reference).map_err(fail)?.d_m;
    let d_dpi = discrepancy(&p.w, &s_dpi, reference).map_err(fail)?.d_m;
    let (d_min, d_max) = discrepancy_bounds(&p.w, &s_min, &s_max, reference).map_err(fail)?;

    Ok(DiscrepancyBlock {
        reference,
        reference_label: records[reference].label.clone(),
        zeta_sq: rep_cv.zeta_sq,
        ratios_cv: rep_cv.ratios,
        gaps_cv: rep_cv.gaps,
        argmax: rep_cv.argmax,
        argmax_label: records[rep_cv.argmax].label.clone(),
        d_lin,
        d_cv: rep_cv.d_m,
        d_dpi,
        d_min,
        d_max,
    })
}

fn inverse_block(
    sigma: &DMatrix<f64>,
    targets: &[f64],
    k: usize,
) -> Result<InverseBlock, CliError> {
    if targets.len() + 1 != k {
        return Err(CliError::Usage(format!(
            "expected {} target ratios (k − 1 for k = {k}), got {}",
            k - 1,
            targets.len()
        )));
    }
    let solution = solve_from_targets(sigma, targets).map_err(|source| CliError::Module {
        module: "inverse",
        source,
    })?;
    Ok(block_from_solution(targets, &solution))
}

fn block_from_solution(targets: &[f64], s: &InverseSolution<f64>) -> InverseBlock {
    InverseBlock {
        method: "linear-case inverse".to_string(),
        targets: targets.to_vec(),
        w_star: s.w_star.iter().copied().collect(),
        g: s.g.iter().copied().collect(),
        attainable: s.attainable,
        achieved: s.achieved.iter().copied().collect(),
        condition_warning: s.condition_warning,
        negative_normalizer: s.negative_normalizer,
    }
}

fn provenance(p: &Pipeline) -> Provenance {
    Provenance {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        input_path: p.input_path.clone(),
        input_sha256: p.input_sha256.clone(),
        rows_used: p.nm.n(),
        rows_dropped: p.rows_dropped,
        seed: p.eff.seed,
        config: ConfigEcho {
            weights: p.eff.weights.clone(),
            normalization: normalization_name(p.eff.normalization).to_string(),
            aggregation: aggregation_name(p.eff.aggregation).to_string(),
            range_class: p.eff.range_class.as_ref().map(range_class_name),
            targets: p.eff.targets.clone(),
        },
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub struct AuditArgs {
    pub data: PathBuf,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub overrides: Overrides,
}

pub fn cmd_audit(args: &AuditArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let p = prepare(&args.data, &cfg, &args.overrides)?;
    let records = indicator_records(&p)?;
    let discrepancy = discrepancy_block(&p, &records)?;
    let inverse = match &p.eff.targets {
        Some(targets) => Some(inverse_block(&p.nm.sigma, targets, p.nm.k())?),
        None => None,
    };
    let report = AuditReport {
        provenance: provenance(&p),
        indicators: records,
        discrepancy,
        inverse,
    };
    emit(args.out.as_deref(), &to_json(&report))?;
    if let Some(table) = &args.table {
        write_indicator_table(table, &report.indicators)?;
    }
    Ok(())
}

fn write_indicator_table(path: &Path, records: &[IndicatorRecord]) -> Result<(), CliError> {
    let io_fail = |e: csv::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    wtr.write_record([
        "label",
        "w_i",
        "h_cv",
        "h_dpi",
        "boundary_hit",
        "dpi_capped",
        "p_cv",
        "p_dpi",
        "s_lin",
        "s_cv",
        "s_dpi",
        "s_min",
        "s_max",
        "epsilon_i",
        "n_used",
        "rows_local_linear",
        "rows_nadaraya_watson",
        "rows_loo_mean",
    ])
    .map_err(io_fail)?;
    for r in records {
        wtr.write_record([
            r.label.clone(),
            r.w_i.to_string(),
            r.h_cv.to_string(),
            r.h_dpi.to_string(),
            r.boundary_hit.to_string(),
            r.dpi_capped.to_string(),
            r.p_cv.to_string(),
            r.p_dpi.to_string(),
            r.s_lin.to_string(),
            r.s_cv.to_string(),
            r.s_dpi.to_string(),
            r.s_min.to_string(),
            r.s_max.to_string(),
            r.epsilon_i.to_string(),
            r.n_used.to_string(),
            r.rows_local_linear.to_string(),
            r.rows_nadaraya_watson.to_string(),
            r.rows_loo_mean.to_string(),
        ])
        .map_err(io_fail)?;
    }
    wtr.flush()
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

#[derive(serde::Deserialize)]
struct InvertConfig {
    #[serde(default)]
    targets: Option<Vec<f64>>,
    #[serde(default)]
    normalization: Option<String>,
}

pub struct InvertArgs {
    pub data: PathBuf,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub targets: Option<String>,
    pub normalization: Option<String>,
}

/// A covariance input is a headerless square numeric CSV; anything else is
/// treated as a data panel.
fn parse_covariance(bytes: &[u8]) -> Option<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record.ok()?;
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            row.push(field.parse::<f64>().ok()?);
        }
        rows.push(row);
    }
    let k = rows.len();
    if k == 0 || rows.iter().any(|r| r.len() != k) {
        return None;
    }
    let mut sigma = DMatrix::<f64>::zeros(k, k);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            sigma[(r, c)] = v;
        }
    }
    Some(sigma)
}

pub fn cmd_invert(args: &InvertArgs) -> Result<(), CliError> {
    let cfg: Option<InvertConfig> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            Some(
                toml::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let targets = match (&args.targets, cfg.as_ref().and_then(|c| c.targets.clone())) {
        (Some(inline), _) => config::parse_targets(inline)?,
        (None, Some(from_file)) => from_file,
        (None, None) => {
            return Err(CliError::Usage(
                "no targets given; pass --targets r2,...,rk or set targets in the config".into(),
            ))
        }
    };

    let bytes = read_bytes(&args.data)?;
    let input_sha256 = sha256_hex(&bytes);
    let (sigma, mode, normalization) = match parse_covariance(&bytes) {
        Some(sigma) => (sigma, "covariance", None),
        None => {
            let name = args
                .normalization
                .clone()
                .or_else(|| cfg.as_ref().and_then(|c| c.normalization.clone()))
                .unwrap_or_else(|| "minmax".to_string());
            let method = config::parse_normalization(&name)?;
            let dm = load_csv::<f64>(&args.data, &IngestOptions::default()).map_err(|source| {
                CliError::Module {
                    module: "dataset",
                    source,
                }
            })?;
            let nm = match method {
                Normalization::MinMax => minmax_normalize(&dm),
                Normalization::Standardize => standardize(&dm),
                Normalization::None => keep_raw(&dm),
            }
            .map_err(|source| CliError::Module {
                module: "dataset",
                source,
            })?;
            (nm.sigma.clone(), "panel", Some(name))
        }
    };

    let k = sigma.nrows();
    let solution = inverse_block(&sigma, &targets, k)?;
    let report = InvertReport {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        input_path: args.data.display().to_string(),
        input_sha256,
        mode: mode.to_string(),
        k,
        normalization,
        solution,
    };

    println!("mode = {} (k = {k})", report.mode);
    println!("w* = {}", format_slice(&report.solution.w_star));
    println!("achieved ratios = {}", format_slice(&report.solution.achieved));
    if !report.solution.attainable {
        println!("targets not attainable with nonnegative weights");
    }
    if report.solution.negative_normalizer {
        println!("note: the normalizer 1'Σ⁻¹g was negative, so every sign was flipped");
    }
    if report.solution.condition_warning {
        println!("warning: covariance condition number exceeds 1e12");
    }
    if let Some(path) = &args.out {
        write_text(path, &to_json(&report))?;
    }
    Ok(())
}

fn format_slice(v: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{x}");
    }
    s.push(']');
    s
}

pub struct PlotdataArgs {
    pub data: PathBuf,
    pub config: PathBuf,
    pub indicator: String,
    pub out_dir: PathBuf,
    pub overrides: Overrides,
}

/// Emits four tidy files for one indicator: the CV curve, the p-value curve,
/// the main-effect curve (each 50 grid rows plus h_cv and h_dpi marker rows),
/// and a scatter file with the observations and fits on a 200-point grid.
pub fn cmd_plotdata(args: &PlotdataArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let p = prepare(&args.data, &cfg, &args.overrides)?;
    let i = match p.nm.indicators.iter().position(|l| *l == args.indicator) {
        Some(i) => i,
        None => {
            return Err(CliError::Usage(format!(
                "unknown indicator label {:?}; available: {}",
                args.indicator,
                p.nm.indicators.join(", ")
            )))
        }
    };
    let fail = |module: &'static str, source: CoreError| CliError::Indicator {
        module,
        label: args.indicator.clone(),
        source,
    };

    let x_i = indicator_column(&p.nm, i);
    let yv = &p.y.y;
    let grid = build_grid::<f64>(&p.nm.range_class[i]);
    let sel = select_bandwidths(&x_i, yv, &grid).map_err(|e| fail("bandwidth", e))?;
    let est = main_effect_curve(i, &x_i, yv, &grid, &sel).map_err(|e| fail("effects", e))?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let cv_at_cv = sel
        .cv_curve
        .iter()
        .find(|(h, _)| *h == sel.h_cv)
        .map(|&(_, cv)| cv)
        .expect("h_cv lies on the grid");
    let cv_at_dpi = cv_criterion(&x_i, yv, sel.h_dpi).map_err(|e| fail("bandwidth", e))?;
    let mut cv_rows = curve_rows(&sel.cv_curve);
    cv_rows.push(marker_row("h_cv", sel.h_cv, cv_at_cv));
    cv_rows.push(marker_row("h_dpi", sel.h_dpi, cv_at_dpi));
    write_csv(&args.out_dir.join("cv.csv"), &["h", "cv", "kind"], &cv_rows)?;

    let mut p_curve = Vec::with_capacity(grid.h.len());
    for &h in &grid.h {
        let t = linearity_pvalue(&x_i, yv, h).map_err(|e| fail("effects", e))?;
        p_curve.push((h, t.p_value));
    }
    let p_at_cv = linearity_pvalue(&x_i, yv, sel.h_cv)
        .map_err(|e| fail("effects", e))?
        .p_value;
    let p_at_dpi = linearity_pvalue(&x_i, yv, sel.h_dpi)
        .map_err(|e| fail("effects", e))?
        .p_value;
    let mut p_rows = curve_rows(&p_curve);
    p_rows.push(marker_row("h_cv", sel.h_cv, p_at_cv));
    p_rows.push(marker_row("h_dpi", sel.h_dpi, p_at_dpi));
    write_csv(&args.out_dir.join("pvalue.csv"), &["h", "p", "kind"], &p_rows)?;

    let mut s_rows = curve_rows(&est.s_curve);
    s_rows.push(marker_row("h_cv", sel.h_cv, est.s_cv));
    s_rows.push(marker_row("h_dpi", sel.h_dpi, est.s_dpi));
    write_csv(&args.out_dir.join("effect.csv"), &["h", "s", "kind"], &s_rows)?;

    scatter_file(&args.out_dir.join("scatter.csv"), &x_i, yv, &sel.h_cv, &sel.h_dpi, &fail)?;
    Ok(())
}

fn curve_rows(curve: &[(f64, f64)]) -> Vec<Vec<String>> {
    curve
        .iter()
        .map(|&(h, v)| vec![h.to_string(), v.to_string(), "grid".to_string()])
        .collect()
}

fn marker_row(kind: &str, h: f64, v: f64) -> Vec<String> {
    vec![h.to_string(), v.to_string(), kind.to_string()]
}

fn scatter_file(
    path: &Path,
    x_i: &DVector<f64>,
    yv: &DVector<f64>,
    h_cv: &f64,
    h_dpi: &f64,
    fail: &dyn Fn(&'static str, CoreError) -> CliError,
) -> Result<(), CliError> {
    let n = x_i.len();
    let (lo, hi) = x_i
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mut points: Vec<f64> = x_i.iter().copied().collect();
    points.extend((0..200).map(|t| lo + (hi - lo) * t as f64 / 199.0));

    let (b0, b1) = ols_line(x_i, yv);
    let fit_cv = eval_at(x_i, yv, *h_cv, &points).map_err(|e| fail("smoother", e))?;
    let fit_dpi = eval_at(x_i, yv, *h_dpi, &points).map_err(|e| fail("smoother", e))?;

    let mut rows = Vec::with_capacity(points.len());
    for (j, &xp) in points.iter().enumerate() {
        let (y_field, kind) = if j < n {
            (yv[j].to_string(), "obs")
        } else {
            (String::new(), "grid")
        };
        rows.push(vec![
            xp.to_string(),
            y_field,
            (b0 + b1 * xp).to_string(),
            fit_dpi[j].to_string(),
            fit_cv[j].to_string(),
            kind.to_string(),
        ]);
    }
    write_csv(path, &["x", "y", "linear_fit", "fit_dpi", "fit_cv", "kind"], &rows)
}

fn ols_line(x: &DVector<f64>, y: &DVector<f64>) -> (f64, f64) {
    let n = x.len() as f64;
    let xbar = x.iter().sum::<f64>() / n;
    let ybar = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for j in 0..x.len() {
        let dx = x[j] - xbar;
        sxx += dx * dx;
        sxy += dx * (y[j] - ybar);
    }
    let b1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (ybar - b1 * xbar, b1)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io_fail = |e: csv::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    wtr.write_record(header).map_err(io_fail)?;
    for row in rows {
        wtr.write_record(row).map_err(io_fail)?;
    }
    wtr.flush()
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub struct GenArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = load_gen_spec(&args.config)?;
    let k = spec.mu.len();
    if spec.sigma.len() != k || spec.sigma.iter().any(|row| row.len() != k) {
        return Err(CliError::Usage(format!(
            "sigma must be a {k}x{k} matrix to match the {k} means"
        )));
    }
    let mut sigma = DMatrix::<f64>::zeros(k, k);
    for (r, row) in spec.sigma.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            sigma[(r, c)] = v;
        }
    }
    let seed = args.seed.or(spec.seed).unwrap_or(0);
    let dm = gen_gaussian_dataset::<f64>(spec.n, &spec.mu, &sigma, seed).map_err(|source| {
        CliError::Module {
            module: "dataset",
            source,
        }
    })?;

    let mut header: Vec<String> = vec!["unit".to_string()];
    header.extend(dm.indicators.iter().cloned());
    let mut rows = Vec::with_capacity(dm.n());
    for j in 0..dm.n() {
        let mut row = Vec::with_capacity(1 + dm.k());
        row.push(dm.units[j].clone());
        for i in 0..dm.k() {
            row.push(dm.values[(j, i)].to_string());
        }
        rows.push(row);
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(&args.out, &header_refs, &rows)?;
    println!("seed = {seed}");
    println!("wrote {} rows to {}", dm.n(), args.out.display());
    Ok(())
}
