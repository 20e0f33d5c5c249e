//! Exponential systems `{e_λ : λ ∈ Λ}` in `L²(μ)`: Gram matrices, frame
//! bounds, and numeric checks of the estimates relating frame bounds to
//! entropy.

mod bounds;
mod checks;
mod eigen;
mod gram;

pub use bounds::{
    frame_bounds_atomic, frame_bounds_bracket, trial_ratio, FrameReport, TrialFunction,
};
pub use checks::{
    check_change_of_measure, check_change_of_measure_sampled, check_counting_bound,
    check_counting_bound_sampled, check_restriction_lemma, check_small_freq_lowerbound,
    delta_for_epsilon, sample_below_delta, LemmaCheckRecord,
};
pub use eigen::{lanczos_extremes, ExtremeEigen};
pub use gram::{gram_matrix, identity_deviation};
