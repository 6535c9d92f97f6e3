//! Local-linear Gaussian-kernel regression of y on a single x, exposed as a
//! linear smoother ŷ = S·y, with two documented degeneracy fallbacks per row.
//!
//! At an evaluation point x₀ the estimate is the intercept of the weighted
//! least-squares fit of y on (1, x−x₀) with unnormalized kernel weights
//! exp(−(x−x₀)²/(2h²)); the kernel's normalizing constant cancels in the
//! ratio, which keeps the rows bit-reproducible. When the 2×2 normal
//! equations are numerically singular the row degrades to a Nadaraya-Watson
//! local mean, and when every kernel weight at the point has underflowed it
//! degrades further to a leave-one-out sample mean.

use nalgebra::{DMatrix, DVector};

use crate::scalar::fl;
use crate::{Error, Float, Result};

/// Kernel weights at or below this value count as zero when deciding that a
/// row has no usable neighbors.
const WEIGHT_UNDERFLOW: f64 = 1e-300;

/// The 2×2 weighted normal equations count as singular beyond this condition
/// estimate.
const CONDITION_LIMIT: f64 = 1e12;

/// Which rule produced a given smoother row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMethod {
    LocalLinear,
    NadarayaWatson,
    LooMean,
}

/// A fitted local-linear smoother at one bandwidth: fitted values m̂(xⱼ) at
/// the sample points, the full row-stochastic matrix S with ŷ = S·y, and the
/// rule that produced each row.
#[derive(Debug, Clone)]
pub struct SmootherFit<T: Float> {
    pub h: T,
    pub fitted: DVector<T>,
    pub smoother: DMatrix<T>,
    pub row_methods: Vec<RowMethod>,
}

impl<T: Float> SmootherFit<T> {
    pub fn n(&self) -> usize {
        self.fitted.len()
    }

    /// Row counts per method, in the order local-linear, Nadaraya-Watson,
    /// leave-one-out mean.
    pub fn method_counts(&self) -> [usize; 3] {
        let mut c = [0usize; 3];
        for m in &self.row_methods {
            match m {
                RowMethod::LocalLinear => c[0] += 1,
                RowMethod::NadarayaWatson => c[1] += 1,
                RowMethod::LooMean => c[2] += 1,
            }
        }
        c
    }
}

enum EvalPoint<T> {
    /// Evaluate at sample point j using all observations.
    Sample(usize),
    /// Evaluate at sample point j with observation j held out.
    Holdout(usize),
    /// Evaluate at an arbitrary location (plot grids).
    At(T),
}

/// Fills `row` with the smoother weights for one evaluation point and reports
/// which rule fired. The row always sums to one.
fn smoother_row<T: Float>(
    x: &DVector<T>,
    h: T,
    point: &EvalPoint<T>,
    row: &mut DVector<T>,
) -> RowMethod {
    let n = x.len();
    row.fill(T::zero());
    let (x0, skip) = match point {
        EvalPoint::Sample(j) => (x[*j], None),
        EvalPoint::Holdout(j) => (x[*j], Some(*j)),
        EvalPoint::At(p) => (*p, None),
    };
    let underflow = fl::<T>(WEIGHT_UNDERFLOW);
    let mut weights = DVector::<T>::zeros(n);
    let mut max_weight = T::zero();
    for l in 0..n {
        if skip == Some(l) {
            continue;
        }
        let t = (x[l] - x0) / h;
        let w = (-t * t / fl::<T>(2.0)).exp();
        weights[l] = w;
        if w > max_weight {
            max_weight = w;
        }
    }

    if max_weight <= underflow {
        // Every available weight underflowed: fall back to the sample mean
        // of whatever observations the row may use. This can only happen
        // when the evaluation point itself is excluded (a held-out row) or
        // off-sample, since an included point always has weight one.
        match skip {
            Some(j) => {
                let v = T::one() / fl::<T>((n - 1) as f64);
                for l in 0..n {
                    row[l] = if l == j { T::zero() } else { v };
                }
            }
            None => {
                let v = T::one() / fl::<T>(n as f64);
                row.fill(v);
            }
        }
        return RowMethod::LooMean;
    }

    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let mut s2 = T::zero();
    for l in 0..n {
        let w = weights[l];
        if w == T::zero() {
            continue;
        }
        let d = x[l] - x0;
        s0 += w;
        s1 += w * d;
        s2 += w * d * d;
    }
    let det = s0 * s2 - s1 * s1;
    let disc = ((s0 - s2) * (s0 - s2) + fl::<T>(4.0) * s1 * s1).sqrt();
    let lambda_max = (s0 + s2 + disc) / fl::<T>(2.0);
    let singular =
        !(det > T::zero()) || !det.is_finite() || lambda_max * lambda_max > fl::<T>(CONDITION_LIMIT) * det;

    if singular {
        for l in 0..n {
            row[l] = weights[l] / s0;
        }
        return RowMethod::NadarayaWatson;
    }

    for l in 0..n {
        let w = weights[l];
        if w == T::zero() {
            continue;
        }
        let d = x[l] - x0;
        row[l] = w * (s2 - d * s1) / det;
    }
    RowMethod::LocalLinear
}

fn check_fit_inputs<T: Float>(x: &DVector<T>, y: &DVector<T>, h: T, min_n: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "x has {} entries, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min_n {
        return Err(Error::TooFewRows {
            need: min_n,
            found: x.len(),
        });
    }
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "bandwidth must be positive and finite, got {}",
            h.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Fits the smoother at every sample point and materializes the n×n matrix.
pub fn locallinear_fit<T: Float>(x: &DVector<T>, y: &DVector<T>, h: T) -> Result<SmootherFit<T>> {
    check_fit_inputs(x, y, h, 3)?;
    let n = x.len();
    let mut smoother = DMatrix::<T>::zeros(n, n);
    let mut fitted = DVector::<T>::zeros(n);
    let mut row_methods = Vec::with_capacity(n);
    let mut row = DVector::<T>::zeros(n);
    for j in 0..n {
        row_methods.push(smoother_row(x, h, &EvalPoint::Sample(j), &mut row));
        fitted[j] = row.dot(y);
        smoother.row_mut(j).tr_copy_from(&row);
    }
    Ok(SmootherFit {
        h,
        fitted,
        smoother,
        row_methods,
    })
}

/// Fitted values at the sample points without materializing the matrix, plus
/// the two trace diagnostics ν₁ = tr(S) and ν₂ = tr(S′S) used for residual
/// degrees of freedom.
pub(crate) fn fit_with_traces<T: Float>(
    x: &DVector<T>,
    y: &DVector<T>,
    h: T,
) -> Result<(DVector<T>, T, T, Vec<RowMethod>)> {
    check_fit_inputs(x, y, h, 3)?;
    let n = x.len();
    let mut fitted = DVector::<T>::zeros(n);
    let mut nu1 = T::zero();
    let mut nu2 = T::zero();
    let mut methods = Vec::with_capacity(n);
    let mut row = DVector::<T>::zeros(n);
    for j in 0..n {
        methods.push(smoother_row(x, h, &EvalPoint::Sample(j), &mut row));
        fitted[j] = row.dot(y);
        nu1 += row[j];
        nu2 += row.dot(&row);
    }
    Ok((fitted, nu1, nu2, methods))
}

/// Leave-one-out fits m̂₋ⱼ(xⱼ): entry j comes from the smoother built without
/// observation j, with the same fallback ladder per row.
pub fn loo_fit<T: Float>(
    x: &DVector<T>,
    y: &DVector<T>,
    h: T,
) -> Result<(DVector<T>, Vec<RowMethod>)> {
    check_fit_inputs(x, y, h, 4)?;
    let n = x.len();
    let mut fitted = DVector::<T>::zeros(n);
    let mut methods = Vec::with_capacity(n);
    let mut row = DVector::<T>::zeros(n);
    for j in 0..n {
        methods.push(smoother_row(x, h, &EvalPoint::Holdout(j), &mut row));
        fitted[j] = row.dot(y);
    }
    Ok((fitted, methods))
}

/// Evaluates the fitted curve at arbitrary points (plot grids).
pub fn eval_at<T: Float>(x: &DVector<T>, y: &DVector<T>, h: T, points: &[T]) -> Result<Vec<T>> {
    check_fit_inputs(x, y, h, 3)?;
    let mut row = DVector::<T>::zeros(x.len());
    Ok(points
        .iter()
        .map(|&p| {
            smoother_row(x, h, &EvalPoint::At(p), &mut row);
            row.dot(y)
        })
        .collect())
}
