//! Panel ingestion, normalization, index construction, and synthetic data.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::fl;
use crate::stats;
use crate::{Error, Float, Result};

/// Declared or inferred value range of one indicator column. The range class
/// only steers the bandwidth-grid preset downstream; it never rescales data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeClass {
    /// Scores on a 0–1 scale.
    Unit,
    /// Scores on a 0–10 scale.
    Ten,
    /// Scores on a 0–100 scale.
    Hundred,
    /// Anything else, carrying the observed or declared bounds.
    Custom { lo: f64, hi: f64 },
}

impl RangeClass {
    /// Classify an observed column range: the named classes when the values
    /// fit in [0,1], [0,10], or [0,100], otherwise the bounds themselves.
    pub fn infer(lo: f64, hi: f64) -> Self {
        if lo >= 0.0 && hi <= 1.0 {
            RangeClass::Unit
        } else if lo >= 0.0 && hi <= 10.0 {
            RangeClass::Ten
        } else if lo >= 0.0 && hi <= 100.0 {
            RangeClass::Hundred
        } else {
            RangeClass::Custom { lo, hi }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    MinMax,
    Standardize,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Linear,
    Geometric,
}

/// Raw n×k panel of indicator scores with unit and indicator labels.
#[derive(Debug, Clone)]
pub struct DataMatrix<T: Float> {
    pub units: Vec<String>,
    pub indicators: Vec<String>,
    pub values: DMatrix<T>,
    pub range_class: Vec<RangeClass>,
    /// Rows discarded during ingestion because of missing values.
    pub dropped_rows: usize,
}

impl<T: Float> DataMatrix<T> {
    /// Validates shape (n ≥ 3, k ≥ 2), label consistency and uniqueness,
    /// finiteness, and that no column is constant.
    pub fn new(
        units: Vec<String>,
        indicators: Vec<String>,
        values: DMatrix<T>,
        range_class: Vec<RangeClass>,
    ) -> Result<Self> {
        let (n, k) = values.shape();
        if n < 3 {
            return Err(Error::TooFewRows { need: 3, found: n });
        }
        if k < 2 {
            return Err(Error::TooFewColumns(k));
        }
        if units.len() != n {
            return Err(Error::Dimension(format!(
                "{} unit labels for {} rows",
                units.len(),
                n
            )));
        }
        if indicators.len() != k || range_class.len() != k {
            return Err(Error::Dimension(format!(
                "{} indicator labels and {} range classes for {} columns",
                indicators.len(),
                range_class.len(),
                k
            )));
        }
        for (i, label) in indicators.iter().enumerate() {
            if indicators[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        for j in 0..n {
            for i in 0..k {
                if !values[(j, i)].is_finite() {
                    return Err(Error::NonFinite {
                        row: j,
                        column: indicators[i].clone(),
                    });
                }
            }
        }
        for i in 0..k {
            let col = values.column(i);
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                return Err(Error::ConstantColumn(indicators[i].clone()));
            }
        }
        Ok(DataMatrix {
            units,
            indicators,
            values,
            range_class,
            dropped_rows: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn k(&self) -> usize {
        self.values.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Cell content marking a missing value; rows containing it are dropped.
    pub missing_marker: String,
    /// Range class applied to every column; inferred from the data when unset.
    pub declared_range: Option<RangeClass>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            missing_marker: "NA".to_string(),
            declared_range: None,
        }
    }
}

/// Reads a comma-delimited panel: header row, unit label in column 1, one
/// indicator per remaining column. Rows with a missing marker are dropped and
/// counted; any other unparseable cell is an error.
pub fn load_csv<T: Float>(path: &Path, options: &IngestOptions) -> Result<DataMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Read {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    if headers.len() < 3 {
        return Err(Error::TooFewColumns(headers.len().saturating_sub(1)));
    }
    let indicators: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let k = indicators.len();

    let mut units = Vec::new();
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut dropped = 0usize;
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != k + 1 {
            return Err(Error::Dimension(format!(
                "row {} has {} fields, expected {}",
                idx + 1,
                record.len(),
                k + 1
            )));
        }
        let cells: Vec<&str> = record.iter().skip(1).collect();
        if cells.iter().any(|c| *c == options.missing_marker) {
            dropped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(k);
        for (i, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::BadCell {
                row: idx + 1,
                column: indicators[i].clone(),
                value: cell.to_string(),
            })?;
            row.push(fl::<T>(value));
        }
        units.push(record[0].to_string());
        rows.push(row);
    }

    let n = rows.len();
    if n < 3 {
        return Err(Error::TooFewRows { need: 3, found: n });
    }
    let values = DMatrix::from_fn(n, k, |j, i| rows[j][i]);
    let range_class = match options.declared_range {
        Some(rc) => vec![rc; k],
        None => (0..k)
            .map(|i| {
                let col = values.column(i);
                let lo = col.iter().fold(f64::INFINITY, |a, v| {
                    a.min(v.to_f64().unwrap_or(f64::NAN))
                });
                let hi = col.iter().fold(f64::NEG_INFINITY, |a, v| {
                    a.max(v.to_f64().unwrap_or(f64::NAN))
                });
                RangeClass::infer(lo, hi)
            })
            .collect(),
    };
    let mut d = DataMatrix::new(units, indicators, values, range_class)?;
    d.dropped_rows = dropped;
    Ok(d)
}

/// Normalized scores together with their sample moments: column means μ and
/// the k×k sample covariance Σ (n−1 divisor).
#[derive(Debug, Clone)]
pub struct NormalizedMatrix<T: Float> {
    pub x: DMatrix<T>,
    pub method: Normalization,
    pub mu: DVector<T>,
    pub sigma: DMatrix<T>,
    pub units: Vec<String>,
    pub indicators: Vec<String>,
    /// Range class of the normalized columns, as seen by the smoother.
    pub range_class: Vec<RangeClass>,
}

impl<T: Float> NormalizedMatrix<T> {
    fn from_scores(
        d: &DataMatrix<T>,
        x: DMatrix<T>,
        method: Normalization,
        range_class: Vec<RangeClass>,
    ) -> Self {
        let (mu, sigma) = stats::covariance_matrix(&x);
        NormalizedMatrix {
            x,
            method,
            mu,
            sigma,
            units: d.units.clone(),
            indicators: d.indicators.clone(),
            range_class,
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }
}

/// Min-max rescaling of each column to [0,1] by its observed range.
pub fn minmax_normalize<T: Float>(d: &DataMatrix<T>) -> Result<NormalizedMatrix<T>> {
    let (n, k) = d.values.shape();
    let mut x = DMatrix::zeros(n, k);
    for i in 0..k {
        let col = d.values.column(i);
        let lo = col.iter().copied().fold(col[0], T::min);
        let hi = col.iter().copied().fold(col[0], T::max);
        if hi <= lo {
            return Err(Error::ConstantColumn(d.indicators[i].clone()));
        }
        for j in 0..n {
            x[(j, i)] = (col[j] - lo) / (hi - lo);
        }
    }
    let range_class = vec![RangeClass::Unit; k];
    Ok(NormalizedMatrix::from_scores(
        d,
        x,
        Normalization::MinMax,
        range_class,
    ))
}

/// Centers each column and scales it to unit sample variance.
pub fn standardize<T: Float>(d: &DataMatrix<T>) -> Result<NormalizedMatrix<T>> {
    let (n, k) = d.values.shape();
    let mut x = DMatrix::zeros(n, k);
    let mut range_class = Vec::with_capacity(k);
    for i in 0..k {
        let col: Vec<T> = d.values.column(i).iter().copied().collect();
        let m = stats::mean(&col);
        let v = stats::sample_var(&col);
        if v <= T::zero() {
            return Err(Error::ConstantColumn(d.indicators[i].clone()));
        }
        let s = v.sqrt();
        for j in 0..n {
            x[(j, i)] = (col[j] - m) / s;
        }
        let zc = x.column(i);
        let lo = zc.iter().copied().fold(zc[0], T::min).to_f64().unwrap();
        let hi = zc.iter().copied().fold(zc[0], T::max).to_f64().unwrap();
        range_class.push(RangeClass::Custom { lo, hi });
    }
    Ok(NormalizedMatrix::from_scores(
        d,
        x,
        Normalization::Standardize,
        range_class,
    ))
}

/// Passes the raw scores through unchanged; only the moments are computed.
/// For panels already published on a fixed scale.
pub fn keep_raw<T: Float>(d: &DataMatrix<T>) -> Result<NormalizedMatrix<T>> {
    Ok(NormalizedMatrix::from_scores(
        d,
        d.values.clone(),
        Normalization::None,
        d.range_class.clone(),
    ))
}

/// Nominal weights. Construction rejects negative entries and renormalizes
/// the vector to unit sum, so published rounded weights (for example
/// 0.33/0.22/0.11/0.33) are accepted without changing their ratios.
#[derive(Debug, Clone)]
pub struct WeightVector<T: Float> {
    pub w: DVector<T>,
}

impl<T: Float> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewColumns(weights.len()));
        }
        let mut sum = T::zero();
        for (i, &w) in weights.iter().enumerate() {
            if w < T::zero() || !w.is_finite() {
                return Err(Error::NegativeWeight {
                    index: i,
                    value: w.to_f64().unwrap_or(f64::NAN),
                });
            }
            sum += w;
        }
        if sum <= T::zero() {
            return Err(Error::ZeroWeightSum);
        }
        let w = DVector::from_vec(weights) / sum;
        Ok(WeightVector { w })
    }

    pub fn equal(k: usize) -> Result<Self> {
        Self::new(vec![T::one(); k])
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }
}

/// The composite index, one score per unit.
#[derive(Debug, Clone)]
pub struct CompositeSeries<T: Float> {
    pub y: DVector<T>,
    pub aggregation: Aggregation,
}

/// Aggregates the normalized scores into the index: the weighted arithmetic
/// mean Σ wᵢ xᵢ, or the weighted geometric mean exp(Σ wᵢ ln xᵢ) which needs
/// strictly positive scores.
pub fn compute_index<T: Float>(
    x: &NormalizedMatrix<T>,
    w: &WeightVector<T>,
    aggregation: Aggregation,
) -> Result<CompositeSeries<T>> {
    let (n, k) = x.x.shape();
    if w.k() != k {
        return Err(Error::Dimension(format!(
            "{} weights for {} indicators",
            w.k(),
            k
        )));
    }
    let y = match aggregation {
        Aggregation::Linear => &x.x * &w.w,
        Aggregation::Geometric => {
            let mut y = DVector::zeros(n);
            for j in 0..n {
                let mut log_sum = T::zero();
                for i in 0..k {
                    let v = x.x[(j, i)];
                    if v <= T::zero() {
                        return Err(Error::NonPositiveScore {
                            row: j,
                            column: x.indicators[i].clone(),
                            value: v.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    log_sum += w.w[i] * v.ln();
                }
                y[j] = log_sum.exp();
            }
            y
        }
    };
    Ok(CompositeSeries { y, aggregation })
}

/// Draws a reproducible n×k panel from N(μ, Σ). Column labels are x1..xk and
/// unit labels u1..un; the range class records the observed column bounds.
pub fn gen_gaussian_dataset<T: Float>(
    n: usize,
    mu: &[f64],
    sigma: &DMatrix<f64>,
    seed: u64,
) -> Result<DataMatrix<T>> {
    let k = mu.len();
    if sigma.shape() != (k, k) {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, mean has length {}",
            sigma.nrows(),
            sigma.ncols(),
            k
        )));
    }
    if n < k + 1 {
        return Err(Error::TooFewRows { need: k + 1, found: n });
    }
    let chol = nalgebra::Cholesky::new(sigma.clone()).ok_or(Error::NotSpd)?;
    let l = chol.l();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut values = DMatrix::<T>::zeros(n, k);
    let mut z = DVector::<f64>::zeros(k);
    for j in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let row = &l * &z;
        for i in 0..k {
            values[(j, i)] = fl::<T>(mu[i] + row[i]);
        }
    }

    let units = (1..=n).map(|j| format!("u{j}")).collect();
    let indicators: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let range_class = (0..k)
        .map(|i| {
            let col = values.column(i);
            let lo = col.iter().fold(f64::INFINITY, |a, v| a.min(v.to_f64().unwrap()));
            let hi = col
                .iter()
                .fold(f64::NEG_INFINITY, |a, v| a.max(v.to_f64().unwrap()));
            RangeClass::Custom { lo, hi }
        })
        .collect();
    DataMatrix::new(units, indicators, values, range_class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn load_csv_well_formed() {
        let f = write_csv("country,a,b\nA,1,5\nB,2,6\nC,3,7\nD,4,9\n");
        let d: DataMatrix<f64> = load_csv(f.path(), &IngestOptions::default()).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.k(), 2);
        assert_eq!(d.units, vec!["A", "B", "C", "D"]);
        assert_eq!(d.indicators, vec!["a", "b"]);
        assert_eq!(d.dropped_rows, 0);
        assert_eq!(d.values[(2, 1)], 7.0);
    }

    #[test]
    fn load_csv_drops_missing_rows() {
        let f = write_csv("country,a,b\nA,1,5\nB,NA,6\nC,3,7\nD,4,9\n");
        let d: DataMatrix<f64> = load_csv(f.path(), &IngestOptions::default()).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.dropped_rows, 1);
        assert!(!d.units.contains(&"B".to_string()));
    }

    #[test]
    fn load_csv_rejects_constant_column() {
        let f = write_csv("country,a,b\nA,1,5\nB,1,6\nC,1,7\n");
        let err = load_csv::<f64>(f.path(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ConstantColumn(ref c) if c == "a"));
    }

    #[test]
    fn load_csv_rejects_garbage_cell() {
        let f = write_csv("country,a,b\nA,1,5\nB,two,6\nC,3,7\n");
        let err = load_csv::<f64>(f.path(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BadCell { row: 2, .. }));
    }

    #[test]
    fn load_csv_rejects_duplicate_labels() {
        let f = write_csv("country,a,a\nA,1,5\nB,2,6\nC,3,7\n");
        let err = load_csv::<f64>(f.path(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(_)));
    }

    #[test]
    fn minmax_maps_range_to_unit_interval() {
        let d = matrix_from_cols(&[&[2.0, 4.0, 6.0], &[1.0, 2.0, 4.0]]);
        let nm = minmax_normalize(&d).unwrap();
        assert_relative_eq!(nm.x[(0, 0)], 0.0);
        assert_relative_eq!(nm.x[(1, 0)], 0.5);
        assert_relative_eq!(nm.x[(2, 0)], 1.0);
        assert!(matches!(nm.range_class[0], RangeClass::Unit));
    }

    #[test]
    fn minmax_is_idempotent_on_attained_unit_range() {
        let d = matrix_from_cols(&[&[0.0, 0.25, 1.0], &[0.0, 0.5, 1.0]]);
        let nm = minmax_normalize(&d).unwrap();
        assert_relative_eq!(nm.x[(1, 0)], 0.25, max_relative = 1e-15);
        assert_relative_eq!(nm.x[(1, 1)], 0.5, max_relative = 1e-15);
    }

    #[test]
    fn minmax_invariant_under_positive_affine_rescale() {
        let d = matrix_from_cols(&[&[2.0, 4.0, 5.0, 9.0], &[0.1, 0.4, 0.2, 0.9]]);
        let mut rescaled = d.clone();
        for j in 0..4 {
            rescaled.values[(j, 0)] = 3.5 * d.values[(j, 0)] + 11.0;
        }
        let a = minmax_normalize(&d).unwrap();
        let b = minmax_normalize(&rescaled).unwrap();
        for j in 0..4 {
            assert_relative_eq!(a.x[(j, 0)], b.x[(j, 0)], epsilon = 1e-10);
        }
    }

    #[test]
    fn standardize_gives_zero_mean_unit_variance() {
        let d = matrix_from_cols(&[&[1.0, 2.0, 3.0], &[5.0, 6.0, 9.0]]);
        let nm = standardize(&d).unwrap();
        for i in 0..2 {
            let col: Vec<f64> = nm.x.column(i).iter().copied().collect();
            assert_relative_eq!(crate::stats::mean(&col), 0.0, epsilon = 1e-10);
            assert_relative_eq!(crate::stats::sample_var(&col), 1.0, epsilon = 1e-10);
        }
        assert_relative_eq!(nm.x[(0, 0)], -1.0, epsilon = 1e-12);
        assert_relative_eq!(nm.x[(1, 0)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(nm.x[(2, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standardize_preserves_correlation() {
        let d = gen_gaussian_dataset::<f64>(
            500,
            &[1.0, -2.0],
            &DMatrix::from_row_slice(2, 2, &[2.0, 0.7, 0.7, 1.0]),
            9,
        )
        .unwrap();
        let raw_corr = {
            let a: Vec<f64> = d.values.column(0).iter().copied().collect();
            let b: Vec<f64> = d.values.column(1).iter().copied().collect();
            crate::stats::sample_cov(&a, &b)
                / (crate::stats::sample_var(&a).sqrt() * crate::stats::sample_var(&b).sqrt())
        };
        let nm = standardize(&d).unwrap();
        assert_relative_eq!(nm.sigma[(0, 1)], raw_corr, epsilon = 1e-10);
    }

    #[test]
    fn weights_renormalize_and_reject_negatives() {
        let w = WeightVector::new(vec![0.33, 0.22, 0.11, 0.33]).unwrap();
        assert_relative_eq!(w.w.sum(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(w.w[2] / w.w[0], 0.11 / 0.33, epsilon = 1e-12);
        assert!(WeightVector::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn linear_index_is_weighted_mean() {
        let d = matrix_from_cols(&[&[0.3, 0.1, 0.5], &[0.6, 0.2, 0.5], &[0.9, 0.3, 0.2]]);
        let nm = keep_raw(&d).unwrap();
        let w = WeightVector::equal(3).unwrap();
        let y = compute_index(&nm, &w, Aggregation::Linear).unwrap();
        assert_relative_eq!(y.y[0], 0.6, epsilon = 1e-15);
    }

    #[test]
    fn geometric_index_is_weighted_geometric_mean() {
        let d = matrix_from_cols(&[&[8.0, 2.0, 4.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]]);
        let nm = keep_raw(&d).unwrap();
        let w = WeightVector::equal(3).unwrap();
        let y = compute_index(&nm, &w, Aggregation::Geometric).unwrap();
        assert_relative_eq!(y.y[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn geometric_index_rejects_nonpositive_scores() {
        let d = matrix_from_cols(&[&[0.0, 2.0, 4.0], &[1.0, 2.0, 3.0]]);
        let nm = keep_raw(&d).unwrap();
        let w = WeightVector::equal(2).unwrap();
        let err = compute_index(&nm, &w, Aggregation::Geometric).unwrap_err();
        assert!(matches!(err, Error::NonPositiveScore { row: 0, .. }));
    }

    #[test]
    fn geometric_index_of_all_ones_is_one() {
        let d = matrix_from_cols(&[&[1.0, 1.0, 2.0], &[1.0, 1.0, 3.0]]);
        let nm = keep_raw(&d).unwrap();
        let w = WeightVector::new(vec![0.7, 0.3]).unwrap();
        let y = compute_index(&nm, &w, Aggregation::Geometric).unwrap();
        assert_relative_eq!(y.y[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(y.y[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn index_moments_match_weight_covariance_forms() {
        let sigma = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, 0.4, 0.1, 0.4, 1.5]);
        let d = gen_gaussian_dataset::<f64>(400, &[0.0, 1.0, -1.0], &sigma, 11).unwrap();
        let nm = keep_raw(&d).unwrap();
        let w = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let y = compute_index(&nm, &w, Aggregation::Linear).unwrap();
        let ys: Vec<f64> = y.y.iter().copied().collect();
        let mean_form = w.w.dot(&nm.mu);
        let var_form = (nm.sigma.clone() * &w.w).dot(&w.w);
        assert_relative_eq!(crate::stats::mean(&ys), mean_form, epsilon = 1e-10);
        assert_relative_eq!(crate::stats::sample_var(&ys), var_form, epsilon = 1e-10);
    }

    #[test]
    fn gen_is_deterministic_per_seed() {
        let sigma = DMatrix::identity(3, 3);
        let a = gen_gaussian_dataset::<f64>(50, &[0.0; 3], &sigma, 7).unwrap();
        let b = gen_gaussian_dataset::<f64>(50, &[0.0; 3], &sigma, 7).unwrap();
        let c = gen_gaussian_dataset::<f64>(50, &[0.0; 3], &sigma, 8).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn gen_sample_moments_converge() {
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![7.0, 1.0, 1.0]));
        let d = gen_gaussian_dataset::<f64>(100_000, &[0.0; 3], &sigma, 21).unwrap();
        let nm = keep_raw(&d).unwrap();
        for i in 0..3 {
            let target = sigma[(i, i)];
            assert!(
                (nm.sigma[(i, i)] - target).abs() < 0.02 * target,
                "variance {i}: {} vs {target}",
                nm.sigma[(i, i)]
            );
        }
        let id = DMatrix::identity(3, 3);
        let d2 = gen_gaussian_dataset::<f64>(100_000, &[0.0; 3], &id, 22).unwrap();
        let nm2 = keep_raw(&d2).unwrap();
        for i in 0..3 {
            for t in (i + 1)..3 {
                let corr =
                    nm2.sigma[(i, t)] / (nm2.sigma[(i, i)].sqrt() * nm2.sigma[(t, t)].sqrt());
                assert!(corr.abs() < 0.02, "corr {i}{t} = {corr}");
            }
        }
    }

    #[test]
    fn gen_rejects_non_spd() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            gen_gaussian_dataset::<f64>(10, &[0.0, 0.0], &bad, 1),
            Err(Error::NotSpd)
        ));
    }

    fn matrix_from_cols(cols: &[&[f64]]) -> DataMatrix<f64> {
        let n = cols[0].len();
        let k = cols.len();
        let values = DMatrix::from_fn(n, k, |j, i| cols[i][j]);
        let units = (1..=n).map(|j| format!("u{j}")).collect();
        let indicators = (1..=k).map(|i| format!("x{i}")).collect();
        let range_class = (0..k)
            .map(|i| {
                let lo = cols[i].iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = cols[i].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                RangeClass::infer(lo, hi)
            })
            .collect();
        DataMatrix::new(units, indicators, values, range_class).unwrap()
    }
}
