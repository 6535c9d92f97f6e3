//! Main effects Sᵢ, effective weights εᵢ, and the linearity test.
//!
//! The main effect of indicator xᵢ is the correlation ratio
//! Sᵢ = V(E(y|xᵢ))/V(y), the expected fraction of index variance removed by
//! fixing xᵢ. The sample version replaces E(y|xᵢ) with the local-linear
//! smoother: Sᵢ(h) = Σ(m̂ⱼ−m̄)² / Σ(yⱼ−ȳ)². When the regression is linear it
//! collapses to the squared correlation R²ᵢ, which is also available in
//! closed form from a covariance matrix.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::bandwidth::{BandwidthGrid, BandwidthSelection};
use crate::dataset::{Aggregation, CompositeSeries, NormalizedMatrix, WeightVector};
use crate::scalar::fl;
use crate::smoother::{self, SmootherFit};
use crate::stats;
use crate::{Error, Float, Result};

/// A residual sum of squares below this fraction of the centered sum of
/// squares of y counts as an exact fit.
const RSS_ZERO_REL: f64 = 1e-14;

/// Beyond this matched shape parameter the chi-square is indistinguishable
/// from its Gaussian limit, which is also where huge-shape CDF evaluation
/// stops being trustworthy.
const SHAPE_LIMIT: f64 = 1e8;

/// Sᵢ across the bandwidth grid plus the three point estimates.
#[derive(Debug, Clone)]
pub struct MainEffectEstimate<T: Float> {
    pub indicator: usize,
    pub s_curve: Vec<(T, T)>,
    /// Linear-limit value, the squared correlation.
    pub s_lin: T,
    pub s_cv: T,
    /// Evaluated at the exact plug-in bandwidth, not snapped to the grid.
    pub s_dpi: T,
    /// Extrema over the grid only.
    pub s_min: T,
    pub s_max: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    None,
    /// The smoother fit y exactly while the line did not: nonlinearity is
    /// certain, p = 0.
    PerfectSmoother,
    /// Both fits are exact: the data are exactly linear, p = 1.
    BothPerfect,
}

/// Outcome of the test of the linear null against the smoother alternative.
///
/// The statistic is F = (RSS₀−RSS₁)/RSS₁. Its null law is handled through
/// the quadratic form z′Cz with C = M(I−(1+F)A)M, whose distribution is
/// approximated by aχ²ᵦ+c matched on the first three cumulants
/// κᵣ = 2^{r−1}(r−1)!·tr(Cʳ).
#[derive(Debug, Clone)]
pub struct LinearityTest<T: Float> {
    pub f_obs: T,
    pub rss0: T,
    pub rss1: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub p_value: T,
    pub degeneracy: Degeneracy,
}

/// Variance ratio of fitted values to observations, over all n points.
pub fn main_effect<T: Float>(y: &DVector<T>, fit: &SmootherFit<T>) -> Result<T> {
    if y.len() != fit.fitted.len() {
        return Err(Error::Dimension(format!(
            "y has {} entries, fit has {}",
            y.len(),
            fit.fitted.len()
        )));
    }
    let ys: Vec<T> = y.iter().copied().collect();
    let ms: Vec<T> = fit.fitted.iter().copied().collect();
    let denom = stats::css(&ys);
    if !(denom > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    Ok(stats::css(&ms) / denom)
}

/// Sᵢ(h) without materializing the smoother matrix.
pub fn main_effect_at<T: Float>(x_i: &DVector<T>, y: &DVector<T>, h: T) -> Result<T> {
    let (fitted, _, _, _) = smoother::fit_with_traces(x_i, y, h)?;
    let ys: Vec<T> = y.iter().copied().collect();
    let ms: Vec<T> = fitted.iter().copied().collect();
    let denom = stats::css(&ys);
    if !(denom > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    Ok(stats::css(&ms) / denom)
}

/// Linear-limit main effect: the squared sample correlation of y with xᵢ.
pub fn main_effect_linear<T: Float>(x_i: &DVector<T>, y: &DVector<T>) -> Result<T> {
    let xs: Vec<T> = x_i.iter().copied().collect();
    let ys: Vec<T> = y.iter().copied().collect();
    let vx = stats::sample_var(&xs);
    let vy = stats::sample_var(&ys);
    if !(vx > T::zero()) {
        return Err(Error::Domain("constant indicator column".into()));
    }
    if !(vy > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    let cov = stats::sample_cov(&xs, &ys);
    Ok(cov * cov / (vx * vy))
}

/// Effective weight εᵢ = cov(y, wᵢxᵢ)/V(y): the signed share of index
/// variance carried by the weighted variable. Sums to one across indicators
/// under linear aggregation.
pub fn effective_weight<T: Float>(
    x: &NormalizedMatrix<T>,
    w: &WeightVector<T>,
    y: &CompositeSeries<T>,
    i: usize,
) -> Result<T> {
    if w.k() != x.k() {
        return Err(Error::Dimension(format!(
            "{} weights for {} indicators",
            w.k(),
            x.k()
        )));
    }
    if i >= x.k() {
        return Err(Error::Dimension(format!(
            "indicator {i} out of range for k = {}",
            x.k()
        )));
    }
    let ys: Vec<T> = y.y.iter().copied().collect();
    let vy = stats::sample_var(&ys);
    if !(vy > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    let wx: Vec<T> = x.x.column(i).iter().map(|&v| w.w[i] * v).collect();
    Ok(stats::sample_cov(&ys, &wx) / vy)
}

/// Sᵢ over the whole grid together with the values at h_CV, at the exact
/// h_DPI, and in the linear limit.
pub fn main_effect_curve<T: Float>(
    indicator: usize,
    x_i: &DVector<T>,
    y: &DVector<T>,
    grid: &BandwidthGrid<T>,
    selection: &BandwidthSelection<T>,
) -> Result<MainEffectEstimate<T>> {
    let mut s_curve = Vec::with_capacity(grid.h.len());
    let mut s_cv = T::zero();
    for &h in &grid.h {
        let s = main_effect_at(x_i, y, h)?;
        if h == selection.h_cv {
            s_cv = s;
        }
        s_curve.push((h, s));
    }
    let mut s_min = s_curve[0].1;
    let mut s_max = s_curve[0].1;
    for &(_, s) in &s_curve[1..] {
        if s < s_min {
            s_min = s;
        }
        if s > s_max {
            s_max = s;
        }
    }
    let s_dpi = main_effect_at(x_i, y, selection.h_dpi)?;
    let s_lin = main_effect_linear(x_i, y)?;
    Ok(MainEffectEstimate {
        indicator,
        s_curve,
        s_lin,
        s_cv,
        s_dpi,
        s_min,
        s_max,
    })
}

/// Σ_ij aᵢⱼ·bⱼᵢ, the trace of a·b without forming the product.
fn trace_prod<T: Float>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let (n, m) = a.shape();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..m {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// P(aχ²ᵦ + c > 0) for the cumulant-matched approximation, from the traces
/// of C, C², C³. Falls back to the Gaussian limit when the third cumulant is
/// too small to pin a shape.
fn quadform_positive_prob(t1: f64, t2: f64, t3: f64) -> f64 {
    if t2 <= 0.0 {
        // C vanishes up to roundoff: the form is identically zero.
        return if t1 > 0.0 { 1.0 } else { 0.0 };
    }
    let b = t2.powi(3) / (t3 * t3);
    if t3 == 0.0 || !b.is_finite() || b > SHAPE_LIMIT {
        let z = t1 / (2.0 * t2).sqrt();
        return Normal::new(0.0, 1.0).unwrap().cdf(z);
    }
    let a = t3 / t2;
    let c = t1 - t2 * t2 / t3;
    let threshold = -c / a;
    let dist = ChiSquared::new(b).expect("positive shape");
    if a > 0.0 {
        if threshold <= 0.0 {
            1.0
        } else {
            dist.sf(threshold)
        }
    } else if threshold <= 0.0 {
        0.0
    } else {
        dist.cdf(threshold)
    }
}

/// Tests the linear null at bandwidth h and returns the p-value for the
/// observed F together with the matched (a, b, c).
pub fn linearity_pvalue<T: Float>(x_i: &DVector<T>, y: &DVector<T>, h: T) -> Result<LinearityTest<T>> {
    let n = x_i.len();
    if n < 5 {
        return Err(Error::TooFewRows { need: 5, found: n });
    }
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "x has {n} entries, y has {}",
            y.len()
        )));
    }
    let xs: Vec<T> = x_i.iter().copied().collect();
    let ys: Vec<T> = y.iter().copied().collect();
    let syy = stats::css(&ys);
    let vx = stats::sample_var(&xs);
    if !(vx > T::zero()) {
        return Err(Error::Domain("constant indicator column".into()));
    }

    let slope = stats::sample_cov(&xs, &ys) / vx;
    let intercept = stats::mean(&ys) - slope * stats::mean(&xs);
    let mut rss0 = T::zero();
    for j in 0..n {
        let e = y[j] - intercept - slope * x_i[j];
        rss0 += e * e;
    }

    let fit = smoother::locallinear_fit(x_i, y, h)?;
    let mut rss1 = T::zero();
    for j in 0..n {
        let e = y[j] - fit.fitted[j];
        rss1 += e * e;
    }

    let zero_cut = fl::<T>(RSS_ZERO_REL) * syy;
    let rss0_zero = rss0 <= zero_cut;
    let rss1_zero = rss1 <= zero_cut;
    if rss1_zero {
        return Ok(if rss0_zero {
            LinearityTest {
                f_obs: T::zero(),
                rss0,
                rss1,
                a: T::zero(),
                b: T::zero(),
                c: T::zero(),
                p_value: T::one(),
                degeneracy: Degeneracy::BothPerfect,
            }
        } else {
            LinearityTest {
                f_obs: fl::<T>(f64::INFINITY),
                rss0,
                rss1,
                a: T::zero(),
                b: T::zero(),
                c: T::zero(),
                p_value: T::zero(),
                degeneracy: Degeneracy::PerfectSmoother,
            }
        });
    }

    let f_obs = (rss0 - rss1) / rss1;

    // C = M(I − (1+F)A)M with A = (I−S)′(I−S) and M the residual-maker of
    // the linear design [1, x].
    let eye = DMatrix::<T>::identity(n, n);
    let i_minus_s = &eye - &fit.smoother;
    let a_mat = i_minus_s.transpose() * &i_minus_s;

    let mut design = DMatrix::<T>::zeros(n, 2);
    for j in 0..n {
        design[(j, 0)] = T::one();
        design[(j, 1)] = x_i[j];
    }
    let q = design.qr().q();
    let m_mat = &eye - &q * q.transpose();

    let b_mat = &eye - &(a_mat * (T::one() + f_obs));
    let c_mat = &m_mat * b_mat * &m_mat;

    let t1 = c_mat.trace();
    let t2 = trace_prod(&c_mat, &c_mat);
    let c_sq = &c_mat * &c_mat;
    let t3 = trace_prod(&c_sq, &c_mat);

    let p = quadform_positive_prob(
        t1.to_f64().unwrap(),
        t2.to_f64().unwrap(),
        t3.to_f64().unwrap(),
    );

    let (a, b, c) = if t3 == T::zero() {
        (T::zero(), T::zero(), T::zero())
    } else {
        (t3 / t2, t2 * t2 * t2 / (t3 * t3), t1 - t2 * t2 / t3)
    };
    Ok(LinearityTest {
        f_obs,
        rss0,
        rss1,
        a,
        b,
        c,
        p_value: fl::<T>(p),
        degeneracy: Degeneracy::None,
    })
}

fn check_cov_weights<T: Float>(sigma: &DMatrix<T>, w: &WeightVector<T>) -> Result<()> {
    let k = w.k();
    if sigma.shape() != (k, k) {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, weights have length {k}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    Ok(())
}

/// Closed-form linear main effects from a covariance matrix:
/// Sᵢ = (eᵢ′Σw)²/(σᵢᵢ·w′Σw).
pub fn population_main_effects<T: Float>(
    sigma: &DMatrix<T>,
    w: &WeightVector<T>,
) -> Result<DVector<T>> {
    check_cov_weights(sigma, w)?;
    let sw = sigma * &w.w;
    let vy = w.w.dot(&sw);
    if !(vy > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    let k = w.k();
    let mut s = DVector::zeros(k);
    for i in 0..k {
        let sii = sigma[(i, i)];
        if !(sii > T::zero()) {
            return Err(Error::Domain(format!("variance of indicator {i} is not positive")));
        }
        s[i] = sw[i] * sw[i] / (sii * vy);
    }
    Ok(s)
}

/// Closed-form effective weights from a covariance matrix:
/// εᵢ = wᵢ·(eᵢ′Σw)/(w′Σw). They sum to one.
pub fn population_effective_weights<T: Float>(
    sigma: &DMatrix<T>,
    w: &WeightVector<T>,
) -> Result<DVector<T>> {
    check_cov_weights(sigma, w)?;
    let sw = sigma * &w.w;
    let vy = w.w.dot(&sw);
    if !(vy > T::zero()) {
        return Err(Error::ConstantResponse);
    }
    let k = w.k();
    Ok(DVector::from_fn(k, |i, _| w.w[i] * sw[i] / vy))
}

/// Check that a composite series came from linear aggregation; the εᵢ
/// unit-sum identity only holds there.
pub fn is_linear<T: Float>(y: &CompositeSeries<T>) -> bool {
    y.aggregation == Aggregation::Linear
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandwidth::{build_grid, select_bandwidths};
    use crate::dataset::{self, keep_raw, RangeClass};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn uniform_x(n: usize, seed: u64) -> DVector<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let unif = Uniform::new(0.0f64, 1.0).unwrap();
        DVector::from_fn(n, |_, _| unif.sample(&mut rng))
    }

    #[test]
    fn interpolating_fit_scores_one_constant_fit_scores_zero() {
        let y = DVector::from_vec(vec![1.0, 3.0, -2.0, 0.5, 4.0]);
        let interp = SmootherFit {
            h: 0.1,
            fitted: y.clone(),
            smoother: DMatrix::identity(5, 5),
            row_methods: vec![crate::smoother::RowMethod::LocalLinear; 5],
        };
        assert_relative_eq!(main_effect(&y, &interp).unwrap(), 1.0, epsilon = 1e-15);

        let ybar = y.iter().sum::<f64>() / 5.0;
        let flat = SmootherFit {
            h: 0.1,
            fitted: DVector::from_element(5, ybar),
            smoother: DMatrix::zeros(5, 5),
            row_methods: vec![crate::smoother::RowMethod::LocalLinear; 5],
        };
        assert_relative_eq!(main_effect(&y, &flat).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uncorrelated_population_effects_follow_the_diagonal_closed_form() {
        // Diagonal covariance: E(y|xᵢ) = wᵢxᵢ + const, so
        // Sᵢ = wᵢ²σᵢᵢ / Σ w_t²σ_tt and the effects sum to one.
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![7.0, 1.0, 1.0]));
        let w = dataset::WeightVector::equal(3).unwrap();
        let s = population_main_effects(&sigma, &w).unwrap();
        assert_relative_eq!(s[0], 7.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(s[1], 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(s[2], 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(s.sum(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn correlated_population_effects_match_hand_derivation() {
        // Unit variances, corr(x₂,x₃) = 0.7, equal weights:
        // Σw = (1/3, 1.7/3, 1.7/3)·1, V(y) = (3+2·0.7)/9 = 22/45... the
        // ratios below were derived by hand from Sᵢ = (eᵢ′Σw)²/(σᵢᵢ V(y)).
        let mut sigma = DMatrix::identity(3, 3);
        sigma[(1, 2)] = 0.7;
        sigma[(2, 1)] = 0.7;
        let w = dataset::WeightVector::equal(3).unwrap();
        let s = population_main_effects(&sigma, &w).unwrap();
        assert_relative_eq!(s[0], 5.0 / 22.0, epsilon = 1e-14);
        assert_relative_eq!(s[1], 289.0 / 440.0, epsilon = 1e-14);
        assert_relative_eq!(s[2], 289.0 / 440.0, epsilon = 1e-14);
        assert_relative_eq!(s[0] / s[1], 100.0 / 289.0, epsilon = 1e-14);
    }

    #[test]
    fn pair_symmetry_is_exact_when_only_the_pair_correlates() {
        for rho in [-0.4, 0.1, 0.9] {
            let mut sigma = DMatrix::identity(3, 3);
            sigma[(1, 2)] = rho;
            sigma[(2, 1)] = rho;
            let w = dataset::WeightVector::equal(3).unwrap();
            let s = population_main_effects(&sigma, &w).unwrap();
            assert_eq!(s[1], s[2]);
        }
    }

    #[test]
    fn linear_main_effect_equals_effect_of_ols_fit() {
        let x = uniform_x(60, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let y = DVector::from_fn(60, |j, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            2.0 * x[j] + 0.5 * e
        });
        let r2 = main_effect_linear(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().copied().collect();
        let ys: Vec<f64> = y.iter().copied().collect();
        let slope = crate::stats::sample_cov(&xs, &ys) / crate::stats::sample_var(&xs);
        let icept = crate::stats::mean(&ys) - slope * crate::stats::mean(&xs);
        let fitted = DVector::from_fn(60, |j, _| icept + slope * x[j]);
        let fit = SmootherFit {
            h: 1.0,
            fitted,
            smoother: DMatrix::zeros(60, 60),
            row_methods: vec![crate::smoother::RowMethod::LocalLinear; 60],
        };
        assert_relative_eq!(main_effect(&y, &fit).unwrap(), r2, epsilon = 1e-12);
        let perfect = main_effect_linear(&x, &x).unwrap();
        assert_relative_eq!(perfect, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn effective_weights_sum_to_one_under_linear_aggregation() {
        let sigma = DMatrix::from_row_slice(3, 3, &[2.0, 0.4, -0.2, 0.4, 1.0, 0.3, -0.2, 0.3, 1.5]);
        let d = dataset::gen_gaussian_dataset::<f64>(300, &[0.0; 3], &sigma, 5).unwrap();
        let nm = keep_raw(&d).unwrap();
        let w = dataset::WeightVector::new(vec![0.5, 0.2, 0.3]).unwrap();
        let y = dataset::compute_index(&nm, &w, dataset::Aggregation::Linear).unwrap();
        let total: f64 = (0..3)
            .map(|i| effective_weight(&nm, &w, &y, i).unwrap())
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn population_effective_weights_match_hand_values() {
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![7.0, 1.0, 1.0]));
        let w = dataset::WeightVector::equal(3).unwrap();
        let eps = population_effective_weights(&sigma, &w).unwrap();
        assert_relative_eq!(eps[0], 7.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(eps.sum(), 1.0, epsilon = 1e-14);

        // Strong negative correlation makes the light-weight variable a net
        // variance reducer: its effective weight is negative.
        let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, -0.9, -0.9, 1.0]);
        let w2 = dataset::WeightVector::new(vec![0.9, 0.1]).unwrap();
        let eps2 = population_effective_weights(&sigma2, &w2).unwrap();
        assert_relative_eq!(eps2[1], -0.071 / 0.658, epsilon = 1e-12);
        assert_relative_eq!(eps2.sum(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sampled_effective_weight_approaches_the_population_value() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, -0.9, -0.9, 1.0]);
        let d = dataset::gen_gaussian_dataset::<f64>(100_000, &[0.0, 0.0], &sigma, 13).unwrap();
        let nm = keep_raw(&d).unwrap();
        let w = dataset::WeightVector::new(vec![0.9, 0.1]).unwrap();
        let y = dataset::compute_index(&nm, &w, dataset::Aggregation::Linear).unwrap();
        let e2 = effective_weight(&nm, &w, &y, 1).unwrap();
        assert!((e2 - (-0.071 / 0.658)).abs() < 0.01, "ε₂ = {e2}");
    }

    #[test]
    fn effect_curve_is_flat_on_noiseless_linear_data() {
        let x = uniform_x(80, 3);
        let y = x.map(|v| 3.0 * v - 1.0);
        let grid = build_grid(&RangeClass::Unit);
        let sel = select_bandwidths(&x, &y, &grid).unwrap();
        let est = main_effect_curve(0, &x, &y, &grid, &sel).unwrap();
        for &(_, s) in &est.s_curve {
            assert_relative_eq!(s, 1.0, epsilon = 1e-10);
        }
        assert_relative_eq!(est.s_lin, 1.0, epsilon = 1e-12);
        assert!(est.s_min <= est.s_max);
        assert!(est.s_curve.iter().any(|&(_, s)| s == est.s_min));
        assert!(est.s_curve.iter().any(|&(_, s)| s == est.s_max));
    }

    #[test]
    fn small_bandwidths_drive_the_effect_toward_one() {
        let x = DVector::from_fn(50, |j, _| 0.001 + j as f64 / 50.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let y = DVector::from_fn(50, |j, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            (6.0 * x[j]).sin() + 0.2 * e
        });
        let grid = build_grid(&RangeClass::Unit);
        let s_small = main_effect_at(&x, &y, grid.h[0]).unwrap();
        assert!(s_small > 0.9, "S at min grid h = {s_small}");
    }

    #[test]
    fn exactly_linear_data_gives_p_one() {
        let x = uniform_x(40, 5);
        let y = x.map(|v| -1.5 * v + 4.0);
        let t = linearity_pvalue(&x, &y, 0.3).unwrap();
        assert_eq!(t.degeneracy, Degeneracy::BothPerfect);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn perfect_smoother_with_linear_misfit_gives_p_zero() {
        // Three distinct x with a nonlinear y: a tiny bandwidth interpolates
        // (RSS₁ = 0) while the line cannot.
        let x = DVector::from_vec(vec![0.0, 0.3, 0.55, 0.8, 1.0]);
        let y = DVector::from_vec(vec![0.0, 0.9, 0.2, 0.8, 0.1]);
        let t = linearity_pvalue(&x, &y, 1e-3).unwrap();
        assert_eq!(t.degeneracy, Degeneracy::PerfectSmoother);
        assert_eq!(t.p_value, 0.0);
    }

    #[test]
    fn pvalue_is_a_probability_and_moments_reconstruct_traces() {
        let x = uniform_x(30, 6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let y = DVector::from_fn(30, |j, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            1.0 + 2.0 * x[j] + 0.4 * e
        });
        let h = 0.25;
        let t = linearity_pvalue(&x, &y, h).unwrap();
        assert!(t.degeneracy == Degeneracy::None);
        assert!((0.0..=1.0).contains(&t.p_value));
        assert!(t.b > 0.0);

        // Rebuild C from public pieces and compare its traces with the
        // values implied by (a, b, c): tr C² = a²b, tr C³ = a³b,
        // tr C = c + ab.
        let fit = crate::smoother::locallinear_fit(&x, &y, h).unwrap();
        let eye = DMatrix::<f64>::identity(30, 30);
        let ims = &eye - &fit.smoother;
        let a_mat = ims.transpose() * &ims;
        let mut design = DMatrix::<f64>::zeros(30, 2);
        for j in 0..30 {
            design[(j, 0)] = 1.0;
            design[(j, 1)] = x[j];
        }
        let q = design.qr().q();
        let m_mat = &eye - &q * q.transpose();
        let c_mat = &m_mat * (&eye - &(a_mat * (1.0 + t.f_obs))) * &m_mat;
        let c2 = &c_mat * &c_mat;
        let c3 = &c2 * &c_mat;
        assert_relative_eq!(c_mat.trace(), t.c + t.a * t.b, epsilon = 1e-8);
        assert_relative_eq!(c2.trace(), t.a * t.a * t.b, epsilon = 1e-8);
        assert_relative_eq!(c3.trace(), t.a * t.a * t.a * t.b, epsilon = 1e-8);
    }

    #[test]
    fn pvalue_approximation_tracks_a_monte_carlo_of_the_quadratic_form() {
        let n = 60;
        let x = uniform_x(n, 8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let y = DVector::from_fn(n, |j, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            0.5 + x[j] + 0.3 * e
        });
        let h = 0.3;
        let t = linearity_pvalue(&x, &y, h).unwrap();

        let fit = crate::smoother::locallinear_fit(&x, &y, h).unwrap();
        let eye = DMatrix::<f64>::identity(n, n);
        let ims = &eye - &fit.smoother;
        let a_mat = ims.transpose() * &ims;
        let mut design = DMatrix::<f64>::zeros(n, 2);
        for j in 0..n {
            design[(j, 0)] = 1.0;
            design[(j, 1)] = x[j];
        }
        let q = design.qr().q();
        let m_mat = &eye - &q * q.transpose();
        let c_mat = &m_mat * (&eye - &(a_mat * (1.0 + t.f_obs))) * &m_mat;
        let sym = (&c_mat + c_mat.transpose()) * 0.5;
        let eig = sym.symmetric_eigen().eigenvalues;

        let draws = 20_000;
        let mut positive = 0usize;
        for _ in 0..draws {
            let mut qf = 0.0;
            for &lam in eig.iter() {
                let z: f64 = StandardNormal.sample(&mut rng);
                qf += lam * z * z;
            }
            if qf > 0.0 {
                positive += 1;
            }
        }
        let mc = positive as f64 / draws as f64;
        assert!(
            (t.p_value - mc).abs() < 0.03,
            "approx {} vs monte carlo {mc}",
            t.p_value
        );
    }
}
