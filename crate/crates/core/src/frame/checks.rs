use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::frame_bounds_atomic;
use crate::error::{Error, Result};
use crate::estimate::ball_count;
use crate::limits::Limits;
use crate::measure::{cis_turns, digit_factor, Cell, MeasureSpec, C64};
use crate::spectrum::SpectrumSet;

/// Fourier tolerance used by every checker.
const EVAL_TOL: f64 = 1e-13;

/// Outcome of one numeric check. `pass` holds exactly when
/// `max_violation ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckRecord {
    pub lemma: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, serde_json::Value>,
}

impl LemmaCheckRecord {
    fn new(lemma: &str, samples: usize, max_violation: f64, tolerance: f64) -> Self {
        LemmaCheckRecord {
            lemma: lemma.to_string(),
            samples,
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
            aux: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.aux.insert(key.to_string(), value.into());
        self
    }
}

/// Restricting an atomic measure to a cell `K` with `μ(∂K) = 0` keeps
/// the frame bounds of the unrestricted system valid.
pub fn check_restriction_lemma(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    k: &Cell,
    tol: f64,
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    let boundary = spec.boundary_mass(k)?;
    if boundary > 0.0 {
        return Err(Error::BoundaryMass(boundary));
    }
    let full = frame_bounds_atomic(spec, spectrum, limits)?;
    let restricted = frame_bounds_atomic(&spec.restrict(k)?, spectrum, limits)?;
    let violation = (full.lower - restricted.lower)
        .max(restricted.upper - full.upper)
        .max(0.0);
    Ok(LemmaCheckRecord::new("restriction", 1, violation, tol)
        .with("full_lower", full.lower)
        .with("full_upper", full.upper)
        .with("restricted_lower", restricted.lower)
        .with("restricted_upper", restricted.upper)
        .with("restricted_atoms", restricted.atom_count.unwrap_or(0)))
}

/// `μ_D(ξ)` evaluated without going through `restrict`: a direct sum for
/// atomic measures, a fixed-prefix digit product for digit measures.
fn restricted_fourier_direct(
    spec: &MeasureSpec,
    d: &Cell,
    xi: &[f64],
    limits: &Limits,
) -> Result<C64> {
    match spec {
        MeasureSpec::Digit { p, levels } if d.base == *p && d.dim() == 1 => {
            let n = d.depth as u64;
            let k = d.index[0];
            if k < 0 || d.cells_per_axis().is_none_or(|m| k >= m) {
                return Ok(C64::new(0.0, 0.0));
            }
            let pf = *p as f64;
            let mut mass = 1.0;
            for i in 1..=n {
                let digit = (k / (*p as i128).pow((n - i) as u32)) % *p as i128;
                if levels.contains(i) {
                    mass /= pf;
                } else if digit != 0 {
                    return Ok(C64::new(0.0, 0.0));
                }
            }
            let cutoff = crate::measure::digit_cutoff(*p, xi[0], EVAL_TOL * 1e-3).max(n);
            let mut acc = cis_turns(xi[0] * d.anchor()[0]) * mass;
            for i in levels.elements_upto(cutoff) {
                if i > n {
                    acc *= digit_factor(*p, i, xi[0]);
                }
            }
            Ok(acc)
        }
        _ => match spec.atoms(limits)? {
            Some(atoms) => Ok(atoms
                .iter()
                .filter(|a| d.contains(&a.point))
                .map(|a| {
                    let phase: f64 = a.point.iter().zip(xi).map(|(x, s)| x * s).sum();
                    cis_turns(phase) * a.weight
                })
                .sum()),
            None => spec.restrict(d)?.fourier(xi, EVAL_TOL),
        },
    }
}

/// `|⟨t,λ⟩_{μ_D}|² = μ(D)²|⟨t/bⁿ, λ/bⁿ⟩_{μ_D^□}|²` over the samples.
/// The squared form is the one tested; the unsquared residual is kept in
/// `aux` for comparison.
pub fn check_change_of_measure(
    spec: &MeasureSpec,
    d: &Cell,
    samples: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    let mass = spec.cell_mass(d)?;
    if !(mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    let rescaled = spec.normalize_rescale(d)?;
    let scale = (d.base as f64).powi(d.depth as i32);
    let residuals: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|(t, lambda)| -> Result<(f64, f64)> {
            let xi: Vec<f64> = t.iter().zip(lambda).map(|(a, b)| a - b).collect();
            let lhs = restricted_fourier_direct(spec, d, &xi, limits)?.norm();
            let small: Vec<f64> = xi.iter().map(|x| x / scale).collect();
            let rhs = mass * rescaled.fourier(&small, EVAL_TOL)?.norm();
            Ok(((lhs * lhs - rhs * rhs).abs(), (lhs - rhs).abs()))
        })
        .collect::<Result<_>>()?;
    let squared = residuals.iter().map(|r| r.0).fold(0.0, f64::max);
    let plain = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(
        LemmaCheckRecord::new("change-of-measure", samples.len(), squared, tol)
            .with("form", "squared")
            .with("unsquared_max_violation", plain)
            .with("cell_mass", mass),
    )
}

/// `δ = 0.999·min(1/(4d), arccos(ε)/(2πd))`, so that `δ < 1/(4d)` and
/// `cos(2πdδ) > ε`.
pub fn delta_for_epsilon(epsilon: f64, d: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let df = d as f64;
    let delta = 0.999 * (1.0 / (4.0 * df)).min(epsilon.acos() / (std::f64::consts::TAU * df));
    if !(delta > 0.0
        && delta < 1.0 / (4.0 * df)
        && (std::f64::consts::TAU * df * delta).cos() > epsilon)
    {
        return Err(Error::NumericFloor(epsilon));
    }
    Ok(delta)
}

/// `count` seeded frequencies drawn uniformly from the open ball of
/// radius `delta` in `ℝ^d`.
pub fn sample_below_delta(delta: f64, d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-delta..delta)).collect();
        if v.iter().map(|x| x * x).sum::<f64>().sqrt() < delta {
            out.push(v);
        }
    }
    out
}

/// For every positive-mass cell `D` of depth `n`, `|μ̂_D^□(ξ)| > ε`
/// whenever `|ξ| < δ(ε)`. Samples at or beyond `δ` are skipped.
pub fn check_small_freq_lowerbound(
    spec: &MeasureSpec,
    epsilon: f64,
    n: u32,
    samples: &[Vec<f64>],
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    let mass = spec.total_mass()?;
    if (mass - 1.0).abs() > crate::measure::NORMALIZATION_TOL {
        return Err(Error::NotNormalized(mass));
    }
    let d = spec.dim();
    let delta = delta_for_epsilon(epsilon, d)?;
    let used: Vec<&Vec<f64>> = samples
        .iter()
        .filter(|x| x.len() == d && x.iter().map(|v| v * v).sum::<f64>().sqrt() < delta)
        .collect();
    let base = spec.natural_base().unwrap_or(2);
    let cells = spec.positive_cells(base, n, limits)?;
    let per_cell: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|(cell, _)| -> Result<(f64, f64)> {
            let rescaled = spec.normalize_rescale(cell)?;
            let mut worst = 0.0f64;
            let mut min_modulus = f64::INFINITY;
            for xi in &used {
                let m = rescaled.fourier(xi, EVAL_TOL)?.norm();
                min_modulus = min_modulus.min(m);
                if m <= epsilon {
                    worst = worst.max(epsilon - m).max(f64::MIN_POSITIVE);
                }
            }
            Ok((worst, min_modulus))
        })
        .collect::<Result<_>>()?;
    let violation = per_cell.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_modulus = per_cell.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let mut rec =
        LemmaCheckRecord::new("small-frequency", used.len() * cells.len(), violation, 0.0)
            .with("delta", delta)
            .with("epsilon", epsilon)
            .with("cells", cells.len())
            .with("base", base)
            .with("skipped_samples", samples.len() - used.len());
    if min_modulus.is_finite() {
        rec = rec.with("min_modulus", min_modulus);
    }
    Ok(rec)
}

/// `#(Λ ∩ B(t,h)) ≤ B·ε⁻²·2^{H(μ, D_{n_h+ρ})}` on the base-2 partition,
/// with `h ≤ 2^{n_h}` and `2^{-ρ} < δ(ε)` both minimal.
pub fn check_counting_bound(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    b_known: f64,
    epsilon: f64,
    t: &[f64],
    h: f64,
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    if !(b_known > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Bessel bound must be positive, got {b_known}"
        )));
    }
    if !(h > 0.0) {
        return Err(Error::ZeroScale);
    }
    let d = spec.dim();
    let delta = delta_for_epsilon(epsilon, d)?;
    let n_h = h.log2().ceil() as i64;
    let n_h = if 2f64.powi(n_h as i32 - 1) >= h {
        n_h - 1
    } else {
        n_h
    };
    let mut rho = (-delta.log2()).floor() as i64;
    while 2f64.powi(-(rho as i32)) >= delta {
        rho += 1;
    }
    while rho > 0 && 2f64.powi(-(rho as i32 - 1)) < delta {
        rho -= 1;
    }
    let raw_depth = n_h + rho;
    let depth = raw_depth.max(0);
    limits.check_depth(u32::try_from(depth).unwrap_or(u32::MAX))?;
    let hist = spec.mass_histogram(2, depth as u32)?;
    let entropy = hist.entropy_bits();
    let product = hist.entropy_product();
    let identity_residual = if product.is_finite() {
        ((product - entropy.exp2()) / entropy.exp2()).abs()
    } else {
        ((product.log2() - entropy) / entropy.max(1.0)).abs()
    };
    let count = ball_count(spectrum, t, h)?;
    let rhs_log2 = b_known.log2() - 2.0 * epsilon.log2() + entropy;
    let lhs = count as f64;
    let rhs = rhs_log2.exp2();
    let violation = (lhs - rhs).max(0.0);
    Ok(LemmaCheckRecord::new("counting-bound", 1, violation, 0.0)
        .with("ball_count", count as f64)
        .with("rhs", rhs)
        .with("rhs_log2", rhs_log2)
        .with("n_h", n_h)
        .with("rho", rho)
        .with("depth", depth)
        .with("depth_clamped", raw_depth < 0)
        .with("entropy_bits", entropy)
        .with("product_identity_residual", identity_residual))
}

/// Half-width of the box from which `t` and `λ` are drawn.
const FREQUENCY_BOX: f64 = 64.0;

type FrequencyPair = (Vec<f64>, Vec<f64>);

/// [`check_change_of_measure`] over `count` seeded triples `(t, λ, D)`,
/// with `D` drawn from the positive-mass cells of depth `depth` in the
/// natural base (2 when there is none).
pub fn check_change_of_measure_sampled(
    spec: &MeasureSpec,
    depth: u32,
    count: usize,
    seed: u64,
    tol: f64,
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    let base = spec.natural_base().unwrap_or(2);
    let cells = spec.positive_cells(base, depth, limits)?;
    if cells.is_empty() {
        return Err(Error::ZeroMass);
    }
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..d)
            .map(|_| rng.random_range(-FREQUENCY_BOX..FREQUENCY_BOX))
            .collect()
    };
    let mut by_cell: BTreeMap<usize, Vec<FrequencyPair>> = BTreeMap::new();
    for _ in 0..count {
        let k = rng.random_range(0..cells.len());
        let t = draw(&mut rng);
        let lambda = draw(&mut rng);
        by_cell.entry(k).or_default().push((t, lambda));
    }
    let mut squared: f64 = 0.0;
    let mut plain: f64 = 0.0;
    for (k, samples) in &by_cell {
        let rec = check_change_of_measure(spec, &cells[*k].0, samples, tol, limits)?;
        squared = squared.max(rec.max_violation);
        plain = plain.max(
            rec.aux["unsquared_max_violation"]
                .as_f64()
                .unwrap_or(f64::NAN),
        );
    }
    Ok(
        LemmaCheckRecord::new("change-of-measure", count, squared, tol)
            .with("form", "squared")
            .with("unsquared_max_violation", plain)
            .with("depth", depth)
            .with("base", base)
            .with("cells_available", cells.len())
            .with("cells_sampled", by_cell.len())
            .with("seed", seed),
    )
}

/// [`check_counting_bound`] at `trials` seeded `(t, h)` pairs with `t`
/// uniform over the spectrum's bounding box and `log₂ h` uniform in
/// `[0, max_log2_h]`.
#[allow(clippy::too_many_arguments)]
pub fn check_counting_bound_sampled(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    b_known: f64,
    epsilon: f64,
    trials: usize,
    max_log2_h: f64,
    seed: u64,
    limits: &Limits,
) -> Result<LemmaCheckRecord> {
    let points = spectrum.points(limits)?;
    let d = spectrum.dim();
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    if let Some(first) = points.first() {
        lo.clone_from(first);
        hi.clone_from(first);
        for q in &points {
            for j in 0..d {
                lo[j] = lo[j].min(q[j]);
                hi[j] = hi[j].max(q[j]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    let mut max_identity: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..trials {
        let t: Vec<f64> = (0..d)
            .map(|j| {
                if hi[j] > lo[j] {
                    rng.random_range(lo[j]..=hi[j])
                } else {
                    lo[j]
                }
            })
            .collect();
        let h = rng.random_range(0.0..=max_log2_h).exp2();
        let rec = check_counting_bound(spec, spectrum, b_known, epsilon, &t, h, limits)?;
        worst = worst.max(rec.max_violation);
        failures += usize::from(!rec.pass);
        max_identity = max_identity.max(
            rec.aux["product_identity_residual"]
                .as_f64()
                .unwrap_or(f64::NAN),
        );
        let lhs = rec.aux["ball_count"].as_f64().unwrap_or(0.0);
        let rhs = rec.aux["rhs"].as_f64().unwrap_or(f64::INFINITY);
        min_slack = min_slack.min(rhs - lhs);
    }
    let mut rec = LemmaCheckRecord::new("counting-bound", trials, worst, 0.0)
        .with("failures", failures)
        .with("epsilon", epsilon)
        .with("bessel_bound", b_known)
        .with("max_log2_h", max_log2_h)
        .with("max_product_identity_residual", max_identity)
        .with("seed", seed);
    if min_slack.is_finite() {
        rec = rec.with("min_slack", min_slack);
    }
    Ok(rec)
}
