//! Comparing nominal weights against realized importance.
//!
//! Weights are statements about intended influence; main effects measure
//! realized influence. With a reference indicator r (the heaviest weight),
//! the nominal and realized pictures agree when Sᵢ/Sᵣ = wᵢ/wᵣ for every i.
//! The maximal discrepancy dₘ is the largest absolute gap between those two
//! ratio profiles, and interval bounds on the main effects propagate to
//! bounds on dₘ by corner enumeration.

use crate::dataset::WeightVector;
use crate::{Error, Float, Result};

/// Corner enumeration visits 2^k points; past this many indicators the
/// bounds are refused rather than silently slow.
const MAX_BOUND_INDICATORS: usize = 20;

/// The weight-versus-importance comparison for one choice of main effects.
#[derive(Debug, Clone)]
pub struct DiscrepancyReport<T: Float> {
    /// Index of the reference indicator.
    pub reference: usize,
    /// ζᵢ² = wᵢ/wᵣ, the ratio profile the weights claim.
    pub zeta_sq: Vec<T>,
    /// Sᵢ/Sᵣ, the ratio profile the data delivered.
    pub ratios: Vec<T>,
    /// |ζᵢ² − Sᵢ/Sᵣ| per indicator, zero at the reference itself.
    pub gaps: Vec<T>,
    pub d_m: T,
    /// Indicator attaining dₘ; ties go to the lowest index.
    pub argmax: usize,
}

/// Picks the reference indicator: largest weight, ties broken by larger
/// main effect, then by lower index.
pub fn select_reference<T: Float>(w: &WeightVector<T>, s: &[T]) -> Result<usize> {
    let k = w.k();
    if s.len() != k {
        return Err(Error::Dimension(format!(
            "{} effects for {k} weights",
            s.len()
        )));
    }
    let mut best = 0usize;
    for i in 1..k {
        if w.w[i] > w.w[best] || (w.w[i] == w.w[best] && s[i] > s[best]) {
            best = i;
        }
    }
    Ok(best)
}

/// Maximal discrepancy dₘ = max_{i≠r} |wᵢ/wᵣ − Sᵢ/Sᵣ|.
pub fn discrepancy<T: Float>(
    w: &WeightVector<T>,
    s: &[T],
    reference: usize,
) -> Result<DiscrepancyReport<T>> {
    let k = w.k();
    if s.len() != k {
        return Err(Error::Dimension(format!(
            "{} effects for {k} weights",
            s.len()
        )));
    }
    if k < 2 {
        return Err(Error::Dimension(
            "discrepancy needs at least two indicators".into(),
        ));
    }
    if reference >= k {
        return Err(Error::Dimension(format!(
            "reference {reference} out of range for k = {k}"
        )));
    }
    let w_ref = w.w[reference];
    let s_ref = s[reference];
    if !(s_ref > T::zero()) {
        return Err(Error::ZeroReference);
    }
    let mut zeta_sq = Vec::with_capacity(k);
    let mut ratios = Vec::with_capacity(k);
    let mut gaps = Vec::with_capacity(k);
    let mut d_m = T::zero();
    let mut argmax = if reference == 0 { 1 } else { 0 };
    for i in 0..k {
        let z = w.w[i] / w_ref;
        let r = s[i] / s_ref;
        let gap = if i == reference {
            T::zero()
        } else {
            (z - r).abs()
        };
        if i != reference && gap > d_m {
            d_m = gap;
            argmax = i;
        }
        zeta_sq.push(z);
        ratios.push(r);
        gaps.push(gap);
    }
    Ok(DiscrepancyReport {
        reference,
        zeta_sq,
        ratios,
        gaps,
        d_m,
        argmax,
    })
}

/// Bounds on dₘ when each main effect is only known to an interval
/// [s_minᵢ, s_maxᵢ]: evaluates dₘ at every corner of the box and returns
/// the smallest and largest value seen.
pub fn discrepancy_bounds<T: Float>(
    w: &WeightVector<T>,
    s_min: &[T],
    s_max: &[T],
    reference: usize,
) -> Result<(T, T)> {
    let k = w.k();
    if s_min.len() != k || s_max.len() != k {
        return Err(Error::Dimension(format!(
            "interval arrays have lengths {} and {}, weights have {k}",
            s_min.len(),
            s_max.len()
        )));
    }
    if k > MAX_BOUND_INDICATORS {
        return Err(Error::TooManyIndicators(k));
    }
    for i in 0..k {
        if s_min[i] > s_max[i] {
            return Err(Error::Domain(format!(
                "interval for indicator {i} is inverted"
            )));
        }
    }
    if !(s_min[reference] > T::zero()) {
        return Err(Error::ZeroReference);
    }
    let mut lo: Option<T> = None;
    let mut hi: Option<T> = None;
    let mut corner = vec![T::zero(); k];
    for mask in 0u32..(1u32 << k) {
        for i in 0..k {
            corner[i] = if mask & (1 << i) != 0 { s_max[i] } else { s_min[i] };
        }
        let d = discrepancy(w, &corner, reference)?.d_m;
        lo = Some(match lo {
            Some(v) if v <= d => v,
            _ => d,
        });
        hi = Some(match hi {
            Some(v) if v >= d => v,
            _ => d,
        });
    }
    Ok((lo.unwrap(), hi.unwrap()))
}

/// Rescales main effects by their common sum so they compare to weights:
/// s*ᵢ = Sᵢ/Σ_t S_t.
pub fn normalize_effects<T: Float>(s: &[T]) -> Result<Vec<T>> {
    let total = s.iter().fold(T::zero(), |acc, &v| acc + v);
    if !(total > T::zero()) {
        return Err(Error::ZeroNormalizer);
    }
    Ok(s.iter().map(|&v| v / total).collect())
}
