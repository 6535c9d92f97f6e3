//! Reverse engineering weights from importance targets.
//!
//! In the linear case the ratio of main effects relative to the first
//! indicator is Hᵢ(w) = (eᵢ′Σw)²σ₁₁/((e₁′Σw)²σᵢᵢ). Given target ratios zᵢ²
//! (z₁ = 1), setting gᵢ = zᵢ√(σᵢᵢ/σ₁₁) and solving Σw ∝ g yields the unique
//! sum-one solution w* = Σ⁻¹g/(1′Σ⁻¹g). A negative entry in w* proves the
//! targets cannot be met with nonnegative weights.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::fl;
use crate::{Error, Float, Result};

/// Weights this slightly negative still count as attainable; anything lower
/// is a genuine sign violation.
const ATTAINABLE_SLACK: f64 = 1e-12;

/// Eigenvalue ratio beyond which the covariance is flagged as
/// ill-conditioned.
const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct InverseSolution<T: Float> {
    /// Sum-one weights solving the target system.
    pub w_star: DVector<T>,
    /// The scaled root-ratio vector gᵢ = zᵢ√(σᵢᵢ/σ₁₁).
    pub g: DVector<T>,
    /// True iff min(w*ᵢ) ≥ −1e-12.
    pub attainable: bool,
    /// Forward ratios Hᵢ(w*) recomputed as a verification; equals z² up to
    /// roundoff.
    pub achieved: DVector<T>,
    /// Eigenvalue ratio of Σ exceeded 1e12.
    pub condition_warning: bool,
    /// 1′Σ⁻¹g was negative, so the normalization flipped every sign.
    pub negative_normalizer: bool,
}

/// Outcome of a random search of the sum-one hyperplane for solutions of
/// the ratio system.
#[derive(Debug, Clone)]
pub struct SearchRecord<T: Float> {
    pub trials: usize,
    /// Max-norm residual bound below which a point counts as a solution.
    pub tolerance: T,
    /// Points with every |Hᵢ(w) − zᵢ²| below the tolerance.
    pub near_solutions: usize,
    /// Near-solutions farther than 1e-6 from w*.
    pub strays: usize,
    pub max_stray_distance: T,
    /// Smallest residual seen anywhere.
    pub min_residual: T,
    pub argmin: DVector<T>,
}

fn check_square<T: Float>(sigma: &DMatrix<T>) -> Result<usize> {
    let (r, c) = sigma.shape();
    if r != c {
        return Err(Error::Dimension(format!("covariance is {r}x{c}")));
    }
    if r < 2 {
        return Err(Error::Dimension(
            "inverse problem needs at least two indicators".into(),
        ));
    }
    let scale = sigma.amax();
    for i in 0..r {
        if !sigma[(i, i)].is_finite() || !(sigma[(i, i)] > T::zero()) {
            return Err(Error::Domain(format!(
                "covariance diagonal entry {i} is not positive"
            )));
        }
        for j in 0..i {
            if !sigma[(i, j)].is_finite() {
                return Err(Error::Domain(format!(
                    "covariance entry ({i},{j}) is not finite"
                )));
            }
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > fl::<T>(1e-8) * scale {
                return Err(Error::Domain("covariance is not symmetric".into()));
            }
        }
    }
    Ok(r)
}

fn condition_exceeded<T: Float>(sigma: &DMatrix<T>) -> bool {
    let eig = sigma.clone().symmetric_eigen().eigenvalues;
    let mut lo = eig[0];
    let mut hi = eig[0];
    for &v in eig.iter() {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    !(lo > T::zero()) || hi / lo > fl::<T>(CONDITION_LIMIT)
}

/// Solves for the sum-one weights whose linear-case importance ratios equal
/// z². The first entry of z must be 1 and all entries positive.
pub fn solve_inverse<T: Float>(sigma: &DMatrix<T>, z: &DVector<T>) -> Result<InverseSolution<T>> {
    let k = check_square(sigma)?;
    if z.len() != k {
        return Err(Error::Dimension(format!(
            "{} targets for {k} indicators",
            z.len()
        )));
    }
    if (z[0] - T::one()).abs() > fl::<T>(1e-12) {
        return Err(Error::Domain(
            "targets are ratios to the first indicator; z must start with 1".into(),
        ));
    }
    for i in 0..k {
        if !z[i].is_finite() || !(z[i] > T::zero()) {
            return Err(Error::Domain(format!("target {i} must be positive")));
        }
    }

    let s11 = sigma[(0, 0)];
    let g = DVector::from_fn(k, |i, _| z[i] * (sigma[(i, i)] / s11).sqrt());
    let chol = nalgebra::Cholesky::new(sigma.clone()).ok_or(Error::NotSpd)?;
    let x = chol.solve(&g);
    let denom = x.sum();
    if denom.abs() <= fl::<T>(1e-300) || !denom.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    let w_star = &x / denom;

    let mut min_w = w_star[0];
    for &v in w_star.iter() {
        if v < min_w {
            min_w = v;
        }
    }
    let achieved = forward_ratios(sigma, &w_star)?;
    Ok(InverseSolution {
        attainable: min_w >= -fl::<T>(ATTAINABLE_SLACK),
        w_star,
        g,
        achieved,
        condition_warning: condition_exceeded(sigma),
        negative_normalizer: denom < T::zero(),
    })
}

/// Builds the root-ratio vector from k−1 stated ratios Sᵢ/S₁ (i = 2..k) and
/// solves. Ratios are squared importances, so the square roots feed the
/// solver.
pub fn solve_from_targets<T: Float>(sigma: &DMatrix<T>, ratios: &[T]) -> Result<InverseSolution<T>> {
    let k = check_square(sigma)?;
    if ratios.len() != k - 1 {
        return Err(Error::Dimension(format!(
            "{} target ratios for {k} indicators; need k-1 = {}",
            ratios.len(),
            k - 1
        )));
    }
    let mut z = DVector::from_element(k, T::one());
    for (i, &r) in ratios.iter().enumerate() {
        if !r.is_finite() || !(r > T::zero()) {
            return Err(Error::Domain(format!("target ratio {} must be positive", i + 2)));
        }
        z[i + 1] = r.sqrt();
    }
    solve_inverse(sigma, &z)
}

/// Importance ratios Hᵢ(w) = (eᵢ′Σw)²σ₁₁/((e₁′Σw)²σᵢᵢ) relative to the
/// first indicator. H₁ = 1 whenever defined.
pub fn forward_ratios<T: Float>(sigma: &DMatrix<T>, w: &DVector<T>) -> Result<DVector<T>> {
    let k = check_square(sigma)?;
    if w.len() != k {
        return Err(Error::Dimension(format!(
            "{} weights for {k} indicators",
            w.len()
        )));
    }
    let sw = sigma * w;
    if sw[0] == T::zero() || !sw[0].is_finite() {
        return Err(Error::ZeroDenominator);
    }
    let s11 = sigma[(0, 0)];
    let base = sw[0] * sw[0];
    Ok(DVector::from_fn(k, |i, _| {
        sw[i] * sw[i] * s11 / (base * sigma[(i, i)])
    }))
}

fn residual<T: Float>(sigma: &DMatrix<T>, w: &DVector<T>, z_sq: &DVector<T>) -> T {
    let sw = sigma * w;
    let s11 = sigma[(0, 0)];
    let base = sw[0] * sw[0];
    let mut worst = T::zero();
    for i in 0..w.len() {
        let h = sw[i] * sw[i] * s11 / (base * sigma[(i, i)]);
        let gap = (h - z_sq[i]).abs();
        if !(gap <= worst) {
            worst = gap;
        }
    }
    worst
}

fn search<T: Float>(
    sigma: &DMatrix<T>,
    z: &DVector<T>,
    w_star: &DVector<T>,
    trials: usize,
    seed: u64,
    nonnegative: bool,
) -> SearchRecord<T> {
    let k = z.len();
    let z_sq = z.component_mul(z);
    let tol = fl::<T>(1e-6);
    let neighborhood = fl::<T>(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut near = 0usize;
    let mut strays = 0usize;
    let mut max_stray = T::zero();
    let mut min_res = fl::<T>(f64::INFINITY);
    let mut argmin = w_star.clone();
    let mut w = DVector::zeros(k);
    for _ in 0..trials {
        if nonnegative {
            // Uniform on the probability simplex via normalized
            // exponentials.
            let mut total = T::zero();
            for i in 0..k {
                let u: f64 = rng.random();
                let e = fl::<T>(-(u.max(f64::MIN_POSITIVE)).ln());
                w[i] = e;
                total += e;
            }
            for i in 0..k {
                w[i] /= total;
            }
        } else {
            // Uniform box around the simplex, shifted onto the sum-one
            // hyperplane so negative-weight regions are covered too.
            let mut total = T::zero();
            for i in 0..k {
                let u: f64 = rng.random();
                let v = fl::<T>(-2.0 + 5.0 * u);
                w[i] = v;
                total += v;
            }
            let shift = (T::one() - total) / fl::<T>(k as f64);
            for i in 0..k {
                w[i] += shift;
            }
        }
        let r = residual(sigma, &w, &z_sq);
        if r < min_res {
            min_res = r;
            argmin.copy_from(&w);
        }
        if r < tol {
            near += 1;
            let dist = (&w - w_star).norm();
            if dist > neighborhood {
                strays += 1;
                if dist > max_stray {
                    max_stray = dist;
                }
            }
        }
    }
    SearchRecord {
        trials,
        tolerance: tol,
        near_solutions: near,
        strays,
        max_stray_distance: max_stray,
        min_residual: min_res,
        argmin,
    }
}

/// Random search of the sum-one hyperplane for second solutions of the
/// ratio system away from w*. A verification oracle for small k, not a
/// production path.
pub fn uniqueness_check<T: Float>(
    sigma: &DMatrix<T>,
    z: &DVector<T>,
    trials: usize,
    seed: u64,
) -> Result<SearchRecord<T>> {
    let sol = solve_inverse(sigma, z)?;
    Ok(search(sigma, z, &sol.w_star, trials, seed, false))
}

/// Random search restricted to the nonnegative part of the hyperplane (the
/// simplex). When w* has a negative entry this should find nothing within
/// tolerance.
pub fn nonnegative_search<T: Float>(
    sigma: &DMatrix<T>,
    z: &DVector<T>,
    trials: usize,
    seed: u64,
) -> Result<SearchRecord<T>> {
    let sol = solve_inverse(sigma, z)?;
    Ok(search(sigma, z, &sol.w_star, trials, seed, true))
}

/// All sum-one solutions of the squared ratio system: one per sign pattern
/// of g with a nonzero normalizer. The positive pattern is w*; the others
/// solve the same squared equations because Hᵢ only sees (eᵢ′Σw)².
pub fn sign_pattern_solutions<T: Float>(
    sigma: &DMatrix<T>,
    z: &DVector<T>,
) -> Result<Vec<DVector<T>>> {
    let k = check_square(sigma)?;
    if k > 20 {
        return Err(Error::TooManyIndicators(k));
    }
    let s11 = sigma[(0, 0)];
    let chol = nalgebra::Cholesky::new(sigma.clone()).ok_or(Error::NotSpd)?;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << (k - 1)) {
        let g = DVector::from_fn(k, |i, _| {
            let base = z[i] * (sigma[(i, i)] / s11).sqrt();
            if i > 0 && mask & (1 << (i - 1)) != 0 {
                -base
            } else {
                base
            }
        });
        let x = chol.solve(&g);
        let denom = x.sum();
        if denom.abs() > fl::<T>(1e-12) {
            out.push(&x / denom);
        }
    }
    Ok(out)
}
