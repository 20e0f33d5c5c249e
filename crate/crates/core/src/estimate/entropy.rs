use serde::{Deserialize, Serialize};

use super::{fit_line, tail_window, CurvePoint, DimensionEstimate, Method};
use crate::error::{Error, Result};
use crate::measure::{LevelSet, MeasureSpec, NORMALIZATION_TOL};

/// Which limit of `H(μ,D_n)/n` to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyBound {
    Upper,
    Lower,
}

/// Shannon entropy in bits of the depth-`n` base-`base` partition.
pub fn partition_entropy(spec: &MeasureSpec, n: u32, base: u32) -> Result<f64> {
    let mass = spec.total_mass()?;
    if (mass - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(mass));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "partition depth must be at least 1".into(),
        ));
    }
    let h = spec.mass_histogram(base, n)?.entropy_bits();
    Ok(h.max(0.0))
}

/// `#I_n · log₂ p`, the depth-`n` p-adic entropy of `ν_I`.
pub fn digit_entropy_exact(levels: &LevelSet, p: u32, n: u64) -> f64 {
    levels.count_upto(n) as f64 * (p as f64).log2()
}

/// Hausdorff dimension of `supp ν_I`: the lower density `liminf #I_n/n`.
pub fn digit_hausdorff_formula(levels: &LevelSet) -> f64 {
    levels.liminf_density()
}

/// `H(μ,D_n)/(n·log₂ b)` for `n = 1..=n_max`, reduced by the tail maximum
/// (upper) or minimum (lower) over the last `⌈n_max/4⌉` points.
///
/// The partition base is the measure's natural base, or 2 when any base
/// is exact.
pub fn entropy_dim_estimate(
    spec: &MeasureSpec,
    n_max: u32,
    bound: EntropyBound,
    base: Option<u32>,
) -> Result<DimensionEstimate> {
    entropy_dim_estimate_windowed(spec, n_max, bound, base, tail_window(n_max as usize))
}

/// [`entropy_dim_estimate`] with the tail statistic taken over the last
/// `window` points (clamped to `1..=n_max`).
pub fn entropy_dim_estimate_windowed(
    spec: &MeasureSpec,
    n_max: u32,
    bound: EntropyBound,
    base: Option<u32>,
    window: usize,
) -> Result<DimensionEstimate> {
    if n_max < 8 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be at least 8, got {n_max}"
        )));
    }
    let natural = spec.natural_base();
    let base = base.or(natural).unwrap_or(2);
    let (lo, hi) = spec.bounding_box()?;
    if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
        return Err(Error::Unsupported(
            "entropy needs a compactly supported measure".into(),
        ));
    }
    let norm = (base as f64).log2();
    let mut curve = Vec::with_capacity(n_max as usize);
    let mut raw = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let h = partition_entropy(spec, n, base)?;
        raw.push(h);
        curve.push(CurvePoint {
            index: n as i64,
            scale: (base as f64).powi(-(n as i32)),
            statistic: h / (n as f64 * norm),
        });
    }
    let w = window.clamp(1, n_max as usize);
    let tail: Vec<f64> = curve[curve.len() - w..]
        .iter()
        .map(|c| c.statistic)
        .collect();
    let t_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let t_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let (value, method) = match bound {
        EntropyBound::Upper => (t_max, Method::TailMax),
        EntropyBound::Lower => (t_min, Method::TailMin),
    };
    let ns: Vec<f64> = (n_max as usize + 1 - w..=n_max as usize)
        .map(|n| n as f64)
        .collect();
    let slope = fit_line(&ns, &raw[raw.len() - w..]).map(|f| f.slope / norm);
    let d = spec.dim() as f64;
    Ok(DimensionEstimate {
        value: super::clip(value, 0.0, d),
        method,
        curve,
        fit_residual: t_max - t_min,
        params: Default::default(),
    }
    .param("quantity", "entropy_dimension")
    .param(
        "bound",
        serde_json::to_value(bound).expect("enum serializes"),
    )
    .param("base", base)
    .param("natural_base", natural)
    .param("n_max", n_max)
    .param("tail_window", w)
    .param("tail_slope", slope))
}
