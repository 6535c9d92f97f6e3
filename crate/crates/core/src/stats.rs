//! Small sample-statistics helpers shared across modules. All variances and
//! covariances use the n−1 divisor.

use nalgebra::{DMatrix, DVector};

use crate::scalar::fl;
use crate::Float;

pub(crate) fn mean<T: Float>(v: &[T]) -> T {
    let n = fl::<T>(v.len() as f64);
    v.iter().fold(T::zero(), |a, &x| a + x) / n
}

pub(crate) fn sample_var<T: Float>(v: &[T]) -> T {
    let m = mean(v);
    let n1 = fl::<T>((v.len() - 1) as f64);
    v.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m)) / n1
}

pub(crate) fn sample_cov<T: Float>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let n1 = fl::<T>((a.len() - 1) as f64);
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - ma) * (y - mb))
        / n1
}

/// Centered sum of squares Σ (vᵢ − v̄)².
pub(crate) fn css<T: Float>(v: &[T]) -> T {
    let m = mean(v);
    v.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m))
}

/// Column means and the k×k sample covariance of an n×k matrix.
pub(crate) fn covariance_matrix<T: Float>(x: &DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let (n, k) = x.shape();
    let n1 = fl::<T>((n - 1) as f64);
    let mu = DVector::from_fn(k, |i, _| mean(x.column(i).as_slice()));
    let mut sigma = DMatrix::zeros(k, k);
    for i in 0..k {
        for t in i..k {
            let mut acc = T::zero();
            for j in 0..n {
                acc += (x[(j, i)] - mu[i]) * (x[(j, t)] - mu[t]);
            }
            let v = acc / n1;
            sigma[(i, t)] = v;
            sigma[(t, i)] = v;
        }
    }
    (mu, sigma)
}

/// Least-squares solution of a tall system by pivoted QR. Returns None when
/// any pivot magnitude falls at or below `tol` (rank deficiency).
pub(crate) fn lstsq<T: Float>(design: DMatrix<T>, rhs: &DVector<T>, tol: T) -> Option<DVector<T>> {
    let (n, c) = design.shape();
    if n < c {
        return None;
    }
    let qr = design.col_piv_qr();
    let r = qr.r();
    for i in 0..c {
        if !(r[(i, i)].abs() > tol) {
            return None;
        }
    }
    let mut qtb = rhs.clone();
    qr.q_tr_mul(&mut qtb);
    let mut beta = DVector::<T>::zeros(c);
    for i in (0..c).rev() {
        let mut acc = qtb[i];
        for j in i + 1..c {
            acc -= r[(i, j)] * beta[j];
        }
        beta[i] = acc / r[(i, i)];
    }
    qr.p().inv_permute_rows(&mut beta);
    Some(beta)
}

/// Sample quantile with linear interpolation between order statistics
/// (position (n−1)q), on already sorted data.
pub(crate) fn quantile_sorted<T: Float>(sorted: &[T], q: f64) -> T {
    let n = sorted.len();
    debug_assert!(n > 0 && (0.0..=1.0).contains(&q));
    let pos = (n - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = fl::<T>(pos - lo as f64);
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}
