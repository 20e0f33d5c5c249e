//! Dimension estimators. Every estimator returns the full curve it was
//! computed from alongside the value.

mod beurling;
mod entropy;
mod fourier_dim;
mod lev;
mod quadrature;
mod regression;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use beurling::{
    ball_count, beurling_density, beurling_dim_estimate, beurling_dim_estimate_windowed,
    default_h_schedule, sup_count, CountKind, SupCount,
};
pub use entropy::{
    digit_entropy_exact, digit_hausdorff_formula, entropy_dim_estimate,
    entropy_dim_estimate_windowed, partition_entropy, EntropyBound,
};
pub use fourier_dim::{fourier_dim_estimate, FourierDimConfig, SLOPE_DEAD_BAND};
pub use lev::{lev_exponent_estimate, lev_integral, LevConfig};
pub use quadrature::integrate_adaptive;
pub use regression::{fit_line, LineFit};

/// How a curve was reduced to a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TailMax,
    TailMin,
    SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub index: i64,
    pub scale: f64,
    pub statistic: f64,
}

/// An estimated dimension with the curve and fit metadata behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: Method,
    pub curve: Vec<CurvePoint>,
    /// Slope standard error for fits, tail spread for tail extrema.
    pub fit_residual: f64,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl DimensionEstimate {
    pub(crate) fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Number of trailing points used for tail statistics: `⌈len/4⌉`, at least 1.
pub fn tail_window(len: usize) -> usize {
    len.div_ceil(4).max(1)
}

/// Trailing points from the first-quarter mark on: `len + 1 - ⌈len/4⌉`.
///
/// Wide enough to hold a full oscillation of a block construction with
/// growth up to 2, whose density peaks sit a factor 4 apart.
pub fn observation_window(len: usize) -> usize {
    (len + 1)
        .saturating_sub(len.div_ceil(4))
        .clamp(1, len.max(1))
}

pub(crate) fn clip(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}
