use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::LevelSet;

/// A block level set together with its partial densities `#I_n/n`,
/// `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatingLevels {
    pub levels: LevelSet,
    pub partial_densities: Vec<f64>,
    /// First `n` of the observation window `⌈n_max/4⌉..=n_max`.
    pub window_start: u64,
    pub window_min: f64,
    pub window_max: f64,
    /// Limiting lower and upper densities of the construction.
    pub liminf: f64,
    pub limsup: f64,
}

/// Alternating include/exclude runs of geometrically growing length whose
/// partial densities swing between `low` and `high`.
///
/// The last three quarters of `1..=n_max` must contain both a completed
/// including run and a completed excluding run; otherwise `n_max` is too
/// small to observe the oscillation and the call fails.
pub fn oscillating_levelset(
    low: f64,
    high: f64,
    growth: f64,
    n_max: u64,
) -> Result<OscillatingLevels> {
    if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ low ≤ high ≤ 1, got ({low}, {high})"
        )));
    }
    let levels = LevelSet::oscillating(low, high, growth)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    let partial_densities = levels.partial_densities(n_max);
    let window_start = n_max.div_ceil(4);
    if low < high {
        let ends = crate::measure::oscillating_phase_ends(low, high, growth, n_max + 1);
        let seen = |peak: bool| {
            ends.iter()
                .any(|&(n, p)| p == peak && n >= window_start && n <= n_max)
        };
        if !(seen(true) && seen(false)) {
            return Err(Error::InvalidArgument(format!(
                "n_max = {n_max} is too small to observe both a density peak and a trough for ({low}, {high}, {growth})"
            )));
        }
    }
    let tail = &partial_densities[window_start as usize - 1..];
    let window_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let window_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(OscillatingLevels {
        liminf: levels.liminf_density(),
        limsup: levels.limsup_density(),
        levels,
        partial_densities,
        window_start,
        window_min,
        window_max,
    })
}
