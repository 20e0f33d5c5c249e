//! Fixtures shared by the benchmark targets.

use framedim::{LevelSet, Limits, MeasureSpec};

/// `ν_I` for `I` the even levels in base 2.
pub fn evens_measure() -> MeasureSpec {
    MeasureSpec::Digit {
        p: 2,
        levels: LevelSet::evens(),
    }
}

/// The depth-`n` truncation of [`evens_measure`].
pub fn evens_truncation(n: u64) -> MeasureSpec {
    evens_measure()
        .truncate_digit(n, &Limits::DEFAULT)
        .expect("bench truncations stay under the atom limit")
}

/// Geometric frequencies `√2·2^k`, `k < count`.
pub fn geometric_frequencies(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| std::f64::consts::SQRT_2 * 2f64.powi(k as i32))
        .collect()
}
