use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{clip, fit_line, tail_window, CurvePoint, DimensionEstimate, Method};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::spectrum::SpectrumSet;

/// How a sup-over-centers count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    /// Two-pointer sweep over a sorted one-dimensional set.
    Exact,
    /// Best of the grid centers at spacing `h/4` near the points.
    GridHeuristic,
    /// Largest digit block `{0, …, p^m - 1}·p^shift` fitting in a ball of radius `h`.
    AlignedBlockLowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupCount {
    /// Saturates at `u128::MAX`.
    pub count: u128,
    /// Natural log of the true count; exact even when `count` saturates.
    pub ln_count: f64,
    pub kind: CountKind,
}

/// `#(Λ ∩ B(t,h))` for the closed Euclidean ball.
pub fn ball_count(spectrum: &SpectrumSet, t: &[f64], h: f64) -> Result<u128> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {h}"
        )));
    }
    if t.len() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            got: t.len(),
        });
    }
    match spectrum {
        SpectrumSet::Explicit { dim: 1, points } => {
            let lo = points.partition_point(|q| q[0] < t[0] - h);
            let hi = points.partition_point(|q| q[0] <= t[0] + h);
            Ok(hi.saturating_sub(lo) as u128)
        }
        SpectrumSet::Explicit { points, .. } => Ok(points
            .iter()
            .filter(|q| q.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= h * h)
            .count() as u128),
        SpectrumSet::DigitSpectrum { p, .. } => {
            let unit = spectrum.unit();
            let a = (t[0] - h) / unit;
            let b = (t[0] + h) / unit;
            if b < 0.0 {
                return Ok(0);
            }
            if b >= 2f64.powi(120) {
                return Err(Error::Unsupported(
                    "ball reaches beyond the integer range of digit spectra".into(),
                ));
            }
            let free = spectrum.free_levels();
            let hi = b.floor() as u128;
            let upper = digit_count_le(*p, &free, hi);
            let lower = if a > 0.0 {
                let lo = a.ceil() as u128;
                if lo > hi {
                    return Ok(0);
                }
                if lo == 0 {
                    0
                } else {
                    digit_count_le(*p, &free, lo - 1)
                }
            } else {
                0
            };
            Ok(upper - lower)
        }
    }
}

/// `#{N ≤ x : N = Σ_{i∈free} b_i p^{i-1}}` by a digit walk from the top.
pub(crate) fn digit_count_le(p: u32, free: &[u64], x: u128) -> u128 {
    let p = p as u128;
    let mut digits = Vec::new();
    let mut rest = x;
    while rest > 0 {
        digits.push(rest % p);
        rest /= p;
    }
    // digits[k - 1] is the coefficient of p^{k-1}, i.e. level k.
    let is_free = |k: usize| free.binary_search(&(k as u64)).is_ok();
    let free_below = |k: usize| free.iter().take_while(|&&i| (i as usize) < k).count() as u32;
    let mut count = 0u128;
    for k in (1..=digits.len()).rev() {
        let xk = digits[k - 1];
        if is_free(k) {
            count += xk * p.pow(free_below(k));
        } else if xk > 0 {
            return count + p.pow(free_below(k));
        }
    }
    count + 1
}

/// `sup_x #(Λ ∩ B(x,h))`, exact in one dimension.
pub fn sup_count(spectrum: &SpectrumSet, h: f64, limits: &Limits) -> Result<SupCount> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {h}"
        )));
    }
    match spectrum {
        SpectrumSet::Explicit { dim: 1, points } => {
            let xs: Vec<f64> = points.iter().map(|q| q[0]).collect();
            let mut best = 0usize;
            let mut j = 0usize;
            for i in 0..xs.len() {
                if j < i {
                    j = i;
                }
                while j < xs.len() && xs[j] - xs[i] <= 2.0 * h {
                    j += 1;
                }
                best = best.max(j - i);
            }
            Ok(SupCount {
                count: best as u128,
                ln_count: (best as f64).ln(),
                kind: CountKind::Exact,
            })
        }
        SpectrumSet::Explicit { dim, points } => {
            let step = h / 4.0;
            let offsets = grid_offsets(*dim);
            let mut centers: BTreeSet<Vec<i64>> = BTreeSet::new();
            for q in points {
                let base: Vec<i64> = q.iter().map(|x| (x / step).round() as i64).collect();
                for off in &offsets {
                    centers.insert(base.iter().zip(off).map(|(b, o)| b + o).collect());
                }
                limits.check_atoms(centers.len() as u128)?;
            }
            let mut best = 0;
            for c in centers {
                let x: Vec<f64> = c.iter().map(|&k| k as f64 * step).collect();
                best = best.max(ball_count(spectrum, &x, h)?);
            }
            Ok(SupCount {
                count: best,
                ln_count: (best as f64).ln(),
                kind: CountKind::GridHeuristic,
            })
        }
        SpectrumSet::DigitSpectrum {
            p,
            levels,
            max_level,
            ..
        } => {
            let unit = spectrum.unit();
            let pf = *p as f64;
            let mut m = 0u64;
            while m < *max_level && (pf.powi(m as i32 + 1) - 1.0) / 2.0 * unit <= h {
                m += 1;
            }
            let free = levels.count_upto(m);
            Ok(SupCount {
                count: (*p as u128).checked_pow(free as u32).unwrap_or(u128::MAX),
                ln_count: free as f64 * pf.ln(),
                kind: CountKind::AlignedBlockLowerBound,
            })
        }
    }
}

/// Grid offsets within distance `4` (i.e. `h`) of the origin, in units of `h/4`.
fn grid_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-4..=4).map(move |o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().map(|o| o * o).sum::<i64>() <= 16);
    out
}

/// `max_h sup_x #(Λ ∩ B(x,h)) / h^r` over the schedule.
pub fn beurling_density(
    spectrum: &SpectrumSet,
    r: f64,
    schedule: &[f64],
    limits: &Limits,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "density exponent must be positive, got {r}"
        )));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty radius schedule".into()));
    }
    let mut best: f64 = 0.0;
    for &h in schedule {
        let c = sup_count(spectrum, h, limits)?.ln_count.exp();
        best = best.max(c / h.powf(r));
    }
    Ok(best)
}

/// Radii used when none are given.
///
/// Digit spectra use the aligned block radii `(p^m - 1)/2·p^shift`,
/// `m = 1..=max_level`. Other sets use `2^k`, `k = 0..24`, kept while
/// `2^k` does not exceed half the diameter, and never fewer than 4.
pub fn default_h_schedule(spectrum: &SpectrumSet) -> Vec<f64> {
    match spectrum {
        SpectrumSet::DigitSpectrum { p, max_level, .. } => {
            let unit = spectrum.unit();
            (1..=*max_level)
                .map(|m| ((*p as f64).powi(m as i32) - 1.0) / 2.0 * unit)
                .collect()
        }
        SpectrumSet::Explicit { .. } => {
            let half = spectrum.diameter() / 2.0;
            (0..24)
                .map(|k| 2f64.powi(k))
                .enumerate()
                .filter(|&(k, h)| k < 4 || h <= half)
                .map(|e| e.1)
                .collect()
        }
    }
}

/// Beurling dimension from `log sup-count` against `log h`.
///
/// `SlopeFit` regresses over the last `max(⌈len/4⌉, 4)` scales;
/// `TailMax` takes the largest secant slope from the first scale over the
/// last `⌈len/4⌉` scales, which follows oscillating sets that a single
/// regression averages out. The curve statistic is `ln count`.
pub fn beurling_dim_estimate(
    spectrum: &SpectrumSet,
    schedule: Option<&[f64]>,
    method: Method,
    limits: &Limits,
) -> Result<DimensionEstimate> {
    beurling_dim_estimate_windowed(spectrum, schedule, method, None, limits)
}

/// [`beurling_dim_estimate`] with an explicit tail window: the number of
/// trailing secants (`TailMax`, `TailMin`) or scales (`SlopeFit`).
pub fn beurling_dim_estimate_windowed(
    spectrum: &SpectrumSet,
    schedule: Option<&[f64]>,
    method: Method,
    window: Option<usize>,
    limits: &Limits,
) -> Result<DimensionEstimate> {
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument(
            "Beurling dimension of an empty set".into(),
        ));
    }
    let owned;
    let schedule = match schedule {
        Some(s) => s,
        None => {
            owned = default_h_schedule(spectrum);
            &owned
        }
    };
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidArgument(
            "radius schedule must be positive and increasing".into(),
        ));
    }
    let mut curve = Vec::with_capacity(schedule.len());
    let mut kind = None;
    for (k, &h) in schedule.iter().enumerate() {
        let c = sup_count(spectrum, h, limits)?;
        kind = Some(c.kind);
        if c.count > 0 {
            curve.push(CurvePoint {
                index: k as i64,
                scale: h,
                statistic: c.ln_count,
            });
        }
    }
    if curve.len() < 4 {
        return Err(Error::TooFewScales {
            usable: curve.len(),
            required: 4,
        });
    }
    let h0 = curve[0].scale;
    let x: Vec<f64> = curve.iter().map(|c| (c.scale / h0).ln()).collect();
    let y: Vec<f64> = curve.iter().map(|c| c.statistic).collect();
    let d = spectrum.dim() as f64;
    let (raw, residual, window) = match method {
        Method::SlopeFit => {
            let w = window
                .unwrap_or_else(|| tail_window(curve.len()).max(4))
                .clamp(2, curve.len());
            let n = curve.len();
            let fit = fit_line(&x[n - w..], &y[n - w..]).ok_or(Error::TooFewScales {
                usable: w,
                required: 2,
            })?;
            (fit.slope, fit.slope_stderr, w)
        }
        Method::TailMax | Method::TailMin => {
            let w = window
                .unwrap_or_else(|| tail_window(curve.len() - 1))
                .clamp(1, curve.len() - 1);
            let secants: Vec<f64> = (1..curve.len()).map(|k| (y[k] - y[0]) / x[k]).collect();
            let tail = &secants[secants.len() - w..];
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            let v = if method == Method::TailMax { hi } else { lo };
            (v, hi - lo, w)
        }
    };
    Ok(DimensionEstimate {
        value: clip(raw, 0.0, d),
        method,
        curve,
        fit_residual: residual,
        params: Default::default(),
    }
    .param("quantity", "beurling_dimension")
    .param("raw_value", raw)
    .param("tail_window", window)
    .param(
        "count_kind",
        serde_json::to_value(kind).expect("enum serializes"),
    )
    .param("ball", "closed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevelSet;

    fn integers(lo: i64, hi: i64) -> SpectrumSet {
        SpectrumSet::from_reals(&(lo..=hi).map(|k| k as f64).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn interval_count() {
        assert_eq!(ball_count(&integers(0, 100), &[50.0], 10.0).unwrap(), 21);
        let empty = SpectrumSet::from_reals(&[]).unwrap();
        assert_eq!(ball_count(&empty, &[0.0], 3.0).unwrap(), 0);
    }

    #[test]
    fn digit_ball_count_example() {
        let s = SpectrumSet::digit(2, LevelSet::first(2), 2, 0).unwrap();
        assert_eq!(ball_count(&s, &[0.0], 3.0).unwrap(), 4);
    }

    #[test]
    fn digit_count_matches_enumeration() {
        let levels = LevelSet::explicit(vec![1, 3, 4, 7]).unwrap();
        let s = SpectrumSet::digit(3, levels, 7, 0).unwrap();
        let pts: Vec<f64> = s
            .points(&Limits::DEFAULT)
            .unwrap()
            .into_iter()
            .map(|q| q[0])
            .collect();
        for t in [-5.0, 0.0, 13.5, 100.0, 777.0] {
            for h in [0.5, 3.0, 40.0, 1000.0] {
                let brute = pts.iter().filter(|&&x| (x - t).abs() <= h).count() as u128;
                assert_eq!(ball_count(&s, &[t], h).unwrap(), brute, "t={t} h={h}");
            }
        }
    }

    #[test]
    fn sweep_finds_densest_window() {
        let s = SpectrumSet::from_reals(&[0.0, 10.0, 11.0, 12.0, 30.0]).unwrap();
        assert_eq!(sup_count(&s, 1.0, &Limits::DEFAULT).unwrap().count, 3);
    }

    #[test]
    fn integer_window_dimension_one() {
        let s = integers(0, 1 << 16);
        let e = beurling_dim_estimate(&s, None, Method::SlopeFit, &Limits::DEFAULT).unwrap();
        assert!((e.value - 1.0).abs() < 0.05, "{}", e.value);
    }

    #[test]
    fn single_point_dimension_zero() {
        let s = SpectrumSet::from_reals(&[3.0]).unwrap();
        let e = beurling_dim_estimate(&s, None, Method::SlopeFit, &Limits::DEFAULT).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn evens_digit_spectrum_half() {
        let s = SpectrumSet::digit(2, LevelSet::evens(), 24, 0).unwrap();
        let e = beurling_dim_estimate(&s, None, Method::SlopeFit, &Limits::DEFAULT).unwrap();
        assert!((e.value - 0.5).abs() < 0.1, "{}", e.value);
    }

    #[test]
    fn density_of_integers() {
        let s = integers(0, 100_000);
        let sched: Vec<f64> = (4..12).map(|k| 2f64.powi(k)).collect();
        let d = beurling_density(&s, 1.0, &sched, &Limits::DEFAULT).unwrap();
        assert!((d - 2.0).abs() < 0.1);
        let d2 = beurling_density(&s, 2.0, &[1000.0], &Limits::DEFAULT).unwrap();
        assert!(d2 < 0.01);
    }

    #[test]
    fn planar_grid_heuristic() {
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(vec![i as f64, j as f64]);
            }
        }
        let s = SpectrumSet::explicit(2, pts).unwrap();
        let c = sup_count(&s, 1.0, &Limits::DEFAULT).unwrap();
        assert_eq!(c.kind, CountKind::GridHeuristic);
        assert_eq!(c.count, 5);
    }
}
