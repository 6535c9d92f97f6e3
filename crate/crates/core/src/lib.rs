//! Importance auditing for weighted composite indicators.
//!
//! A composite indicator aggregates k normalized variables into one score per
//! unit, usually as the weighted mean y = Σ wᵢ xᵢ. The weights are routinely
//! read as importance, but the variance share a variable actually controls
//! depends on its variance and its correlations with the rest of the panel.
//! This crate measures that realized importance as the correlation ratio
//! Sᵢ = V(E(y|xᵢ))/V(y), estimated by local-linear Gaussian-kernel regression
//! of y on each xᵢ, and compares it against what the weights promise.
//!
//! The pieces:
//!
//! * [`dataset`]: panel ingestion, min-max and z-score normalization, linear
//!   and geometric index construction, synthetic Gaussian panels.
//! * [`smoother`]: the local-linear smoother matrix with its degeneracy
//!   fallbacks (Nadaraya-Watson, leave-one-out mean).
//! * [`bandwidth`]: the 50-point bandwidth grid, least-squares cross-validation,
//!   and the blocked direct-plug-in selector.
//! * [`effects`]: main effects Sᵢ(h), the linear-case R²ᵢ, effective weights,
//!   and a linearity test with a matched-chi-square p-value.
//! * [`audit`]: reference selection, the maximal discrepancy d_m between target
//!   and realized relative importance, and its bandwidth-sensitivity bounds.
//! * [`inverse`]: closed-form recovery of the weights that would realize stated
//!   importance targets, with an attainability verdict.
//!
//! Everything is generic over the scalar type through [`Float`]; `*32`/`*64`
//! aliases below fix the two concrete instantiations.

pub mod audit;
pub mod bandwidth;
pub mod dataset;
pub mod effects;
mod error;
pub mod inverse;
mod scalar;
pub mod smoother;
mod stats;

pub use error::{Error, ErrorKind};
pub use scalar::Float;

pub type Result<T> = std::result::Result<T, Error>;

pub type DataMatrix32 = dataset::DataMatrix<f32>;
pub type DataMatrix64 = dataset::DataMatrix<f64>;
pub type NormalizedMatrix32 = dataset::NormalizedMatrix<f32>;
pub type NormalizedMatrix64 = dataset::NormalizedMatrix<f64>;
pub type WeightVector32 = dataset::WeightVector<f32>;
pub type WeightVector64 = dataset::WeightVector<f64>;
pub type CompositeSeries32 = dataset::CompositeSeries<f32>;
pub type CompositeSeries64 = dataset::CompositeSeries<f64>;
pub type SmootherFit32 = smoother::SmootherFit<f32>;
pub type SmootherFit64 = smoother::SmootherFit<f64>;
pub type BandwidthGrid32 = bandwidth::BandwidthGrid<f32>;
pub type BandwidthGrid64 = bandwidth::BandwidthGrid<f64>;
pub type BandwidthSelection32 = bandwidth::BandwidthSelection<f32>;
pub type BandwidthSelection64 = bandwidth::BandwidthSelection<f64>;
pub type MainEffectEstimate32 = effects::MainEffectEstimate<f32>;
pub type MainEffectEstimate64 = effects::MainEffectEstimate<f64>;
pub type LinearityTest32 = effects::LinearityTest<f32>;
pub type LinearityTest64 = effects::LinearityTest<f64>;
pub type DiscrepancyReport32 = audit::DiscrepancyReport<f32>;
pub type DiscrepancyReport64 = audit::DiscrepancyReport<f64>;
pub type InverseSolution32 = inverse::InverseSolution<f32>;
pub type InverseSolution64 = inverse::InverseSolution<f64>;
