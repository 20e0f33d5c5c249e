use super::{clip, fit_line, CurvePoint, DimensionEstimate, Method};
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;

/// Envelope slopes at or above `-SLOPE_DEAD_BAND` are read as no decay.
pub const SLOPE_DEAD_BAND: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierDimConfig {
    /// Increasing frequency magnitudes along the diagonal direction.
    pub schedule: Vec<f64>,
    /// Schedule points per envelope block.
    pub block: usize,
    /// Extra log-spaced samples inside each schedule interval.
    pub refine: usize,
    pub tol: f64,
    /// Moduli below this are treated as numerically zero.
    pub floor: f64,
}

impl Default for FourierDimConfig {
    fn default() -> Self {
        FourierDimConfig {
            schedule: (0..24)
                .map(|k| std::f64::consts::SQRT_2 * 2f64.powi(k))
                .collect(),
            block: 4,
            refine: 16,
            tol: 1e-13,
            floor: 1e-12,
        }
    }
}

/// Fourier dimension from the decay of an upper envelope of `|μ̂|`.
///
/// `|μ̂|` is sampled along `ξ·(1,…,1)/√d` at the schedule points and
/// `refine` log-spaced points between neighbours. Each block of `block`
/// schedule intervals contributes its maximum; a running maximum from the
/// high-frequency end makes the envelope nonincreasing. The value is
/// `clip(-2·slope, 0, d)` for the least-squares slope of `ln envelope`
/// against `ln ξ`.
pub fn fourier_dim_estimate(
    spec: &MeasureSpec,
    config: &FourierDimConfig,
) -> Result<DimensionEstimate> {
    let sched = &config.schedule;
    if sched.len() < 2 || sched.windows(2).any(|w| w[0] >= w[1]) || sched[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "frequency schedule must be positive and increasing".into(),
        ));
    }
    if config.block == 0 {
        return Err(Error::InvalidArgument(
            "envelope block size must be positive".into(),
        ));
    }
    let d = spec.dim();
    let unit = 1.0 / (d as f64).sqrt();
    let modulus =
        |x: f64| -> Result<f64> { Ok(spec.fourier(&vec![x * unit; d], config.tol)?.norm()) };

    let mut moduli = Vec::with_capacity(sched.len());
    for &x in sched {
        moduli.push(modulus(x)?);
    }
    if moduli.iter().all(|&m| m < config.floor) {
        return Err(Error::NumericFloor(config.floor));
    }

    // Block maxima: (abscissa of the maximum, maximum).
    let mut blocks: Vec<(f64, f64)> = Vec::new();
    for start in (0..sched.len()).step_by(config.block) {
        let end = (start + config.block).min(sched.len() - 1);
        let mut best = (sched[start], moduli[start]);
        for k in start..end.max(start + 1).min(sched.len()) {
            if k + 1 < sched.len() && k < end {
                let (a, b) = (sched[k].ln(), sched[k + 1].ln());
                for j in 1..=config.refine {
                    let x = (a + (b - a) * j as f64 / (config.refine + 1) as f64).exp();
                    let m = modulus(x)?;
                    if m > best.1 {
                        best = (x, m);
                    }
                }
            }
            if moduli[k] > best.1 {
                best = (sched[k], moduli[k]);
            }
        }
        blocks.push(best);
    }
    let mut running = f64::NEG_INFINITY;
    let mut envelope = vec![0.0; blocks.len()];
    for j in (0..blocks.len()).rev() {
        running = running.max(blocks[j].1);
        envelope[j] = running;
    }

    let curve: Vec<CurvePoint> = blocks
        .iter()
        .zip(&envelope)
        .enumerate()
        .filter(|(_, (_, e))| **e >= config.floor)
        .map(|(j, ((x, _), e))| CurvePoint {
            index: j as i64,
            scale: *x,
            statistic: e.ln(),
        })
        .collect();
    let xs: Vec<f64> = curve.iter().map(|c| c.scale.ln()).collect();
    let ys: Vec<f64> = curve.iter().map(|c| c.statistic).collect();
    let fit = fit_line(&xs, &ys).ok_or(Error::TooFewScales {
        usable: curve.len(),
        required: 2,
    })?;
    let value = if fit.slope >= -SLOPE_DEAD_BAND {
        0.0
    } else {
        clip(-2.0 * fit.slope, 0.0, d as f64)
    };
    let samples: Vec<[f64; 2]> = sched.iter().zip(&moduli).map(|(x, m)| [*x, *m]).collect();
    Ok(DimensionEstimate {
        value,
        method: Method::SlopeFit,
        curve,
        fit_residual: 2.0 * fit.slope_stderr,
        params: Default::default(),
    }
    .param("quantity", "fourier_dimension")
    .param("envelope_slope", fit.slope)
    .param("block", config.block)
    .param("refine", config.refine)
    .param("tol", config.tol)
    .param(
        "moduli",
        serde_json::to_value(samples).expect("floats serialize"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    #[test]
    fn dirac_has_zero_fourier_dimension() {
        let e = fourier_dim_estimate(&MeasureSpec::dirac_origin(1), &FourierDimConfig::default())
            .unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn lebesgue_decays_like_one_over_xi() {
        let e =
            fourier_dim_estimate(&MeasureSpec::lebesgue(), &FourierDimConfig::default()).unwrap();
        assert!(e.value >= 0.9 && e.value <= 1.0, "{}", e.value);
    }

    #[test]
    fn two_atoms_do_not_decay() {
        let spec = MeasureSpec::atomic(vec![Atom::new(vec![0.0], 0.5), Atom::new(vec![0.5], 0.5)])
            .unwrap();
        let e = fourier_dim_estimate(&spec, &FourierDimConfig::default()).unwrap();
        assert_eq!(e.value, 0.0, "slope {:?}", e.params["envelope_slope"]);
    }
}
