use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimate::{
    beurling_dim_estimate_windowed, digit_hausdorff_formula, entropy_dim_estimate_windowed,
    observation_window, EntropyBound,
};
use crate::frame::{gram_matrix, identity_deviation};
use crate::limits::Limits;
use crate::measure::{LevelSet, MeasureSpec};
use crate::spectrum::SpectrumSet;
use crate::{DimensionEstimate, Method};

/// Required gap between the Beurling estimate and the Hausdorff value.
pub const VERDICT_MARGIN: f64 = 0.1;
/// Largest truncation used for the orthonormality check.
const GRAM_CHECK_SIZE: u128 = 1024;
/// Orthonormality residual below which the spectral pair is accepted.
const GRAM_RESIDUAL_MAX: f64 = 1e-7;

/// Evidence that the Beurling dimension of a spectrum can exceed the
/// Hausdorff dimension of the support of its spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub p: u32,
    pub levels: LevelSet,
    pub n_max: u32,
    pub entropy_upper: DimensionEstimate,
    pub limsup_density: f64,
    /// Hausdorff dimension of the support, `liminf #I_n/n`.
    pub liminf_density: f64,
    pub beurling: DimensionEstimate,
    /// Max-entry distance of the truncated Gram matrix from the identity.
    pub orthonormality_residual: f64,
    pub gram_depth: u64,
    pub gram_size: usize,
    /// Beurling estimate stays within the margin of the entropy upper bound.
    pub consistent_with_entropy_bound: bool,
    pub disproves_conjecture1: bool,
}

/// Runs the entropy and Beurling estimators on `ν_I` and `Λ_I` (truncated at
/// `n_max`) and the Gram check at the deepest truncation with at most 1024
/// atoms.
///
/// Both tail statistics use [`observation_window`], the last three quarters
/// of the curve: a quarter-length window can fall entirely between two
/// density peaks of a block construction and report the trough.
pub fn counterexample_report(
    p: u32,
    levels: LevelSet,
    n_max: u32,
    limits: &Limits,
) -> Result<CounterexampleReport> {
    let nu = MeasureSpec::digit(p, levels.clone())?;
    let spectrum = SpectrumSet::digit(p, levels.clone(), n_max as u64, 0)?;
    let (entropy, beurling) = rayon::join(
        || {
            entropy_dim_estimate_windowed(
                &nu,
                n_max,
                EntropyBound::Upper,
                None,
                observation_window(n_max as usize),
            )
        },
        || {
            let secants = (n_max as usize).saturating_sub(1);
            beurling_dim_estimate_windowed(
                &spectrum,
                None,
                Method::TailMax,
                Some(observation_window(secants)),
                limits,
            )
        },
    );
    let (entropy, beurling) = (entropy?, beurling?);

    let mut gram_depth = 0u64;
    for n in 0..=n_max as u64 {
        if (p as u128)
            .checked_pow(levels.count_upto(n) as u32)
            .is_some_and(|c| c <= GRAM_CHECK_SIZE)
        {
            gram_depth = n;
        } else {
            break;
        }
    }
    let truncated = nu.truncate_digit(gram_depth, limits)?;
    let lambda = SpectrumSet::digit(p, levels.clone(), gram_depth, 0)?;
    let gram = gram_matrix(&truncated, &lambda, 1e-13, limits)?;
    let residual = identity_deviation(&gram);

    let hausdorff = digit_hausdorff_formula(&levels);
    let limsup = levels.limsup_density();
    Ok(CounterexampleReport {
        p,
        n_max,
        limsup_density: limsup,
        liminf_density: hausdorff,
        consistent_with_entropy_bound: beurling.value <= entropy.value + VERDICT_MARGIN,
        disproves_conjecture1: beurling.value > hausdorff + VERDICT_MARGIN
            && residual < GRAM_RESIDUAL_MAX,
        entropy_upper: entropy,
        beurling,
        orthonormality_residual: residual,
        gram_depth,
        gram_size: gram.nrows(),
        levels,
    })
}
