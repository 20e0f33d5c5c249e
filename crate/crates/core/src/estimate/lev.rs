use rayon::prelude::*;

use super::{
    clip, fit_line, integrate_adaptive, tail_window, CurvePoint, DimensionEstimate, Method,
};
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct LevConfig {
    pub schedule: Vec<f64>,
    pub quad_tol: f64,
}

impl Default for LevConfig {
    fn default() -> Self {
        LevConfig {
            schedule: (1..=12).map(|k| 2f64.powi(k)).collect(),
            quad_tol: 1e-8,
        }
    }
}

/// `∫_{-r}^{r} |μ̂(t)|² dt` to absolute accuracy `quad_tol`, for `d = 1`.
///
/// Uses evenness of the integrand and integrates `[0, r]` in chunks of
/// width `1/max(1, diam supp μ)`, the oscillation scale of `|μ̂|²`.
pub fn lev_integral(spec: &MeasureSpec, r: f64, quad_tol: f64) -> Result<f64> {
    if spec.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "the Lev integral is defined for d = 1 only, got d = {}",
            spec.dim()
        )));
    }
    if !(r > 0.0) || !(quad_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "radius and tolerance must be positive".into(),
        ));
    }
    let mass = spec.total_mass()?.max(1.0);
    let width = 1.0 / spec.diameter()?.max(1.0);
    let chunks = (r / width).ceil() as usize;
    // Evaluation error e changes |μ̂|² by at most 2·mass·e + e²; over [-r, r]
    // that stays below quad_tol/4.
    let eval_tol = quad_tol / (16.0 * r * mass);
    let integrand = |t: f64| -> Result<f64> { Ok(spec.fourier(&[t], eval_tol)?.norm_sqr()) };
    let pieces: Vec<Result<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = c as f64 * width;
            let b = ((c + 1) as f64 * width).min(r);
            let share = 0.25 * quad_tol * (b - a) / r;
            integrate_adaptive(&integrand, a, b, share).map(|v| v.0)
        })
        .collect();
    let mut half = 0.0;
    for p in pieces {
        half += p?;
    }
    Ok(2.0 * half)
}

/// Lev exponent `α = d - slope` of `ln I(r)` against `ln r` over the last
/// `max(⌈len/4⌉, 3)` radii, clipped to `[0, d]`.
pub fn lev_exponent_estimate(spec: &MeasureSpec, config: &LevConfig) -> Result<DimensionEstimate> {
    let sched = &config.schedule;
    if sched.len() < 3 || sched.windows(2).any(|w| w[0] >= w[1]) || sched[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "need at least 3 increasing positive radii".into(),
        ));
    }
    let mut curve = Vec::with_capacity(sched.len());
    for (k, &r) in sched.iter().enumerate() {
        let v = lev_integral(spec, r, config.quad_tol)?;
        if !(v > 0.0) {
            return Err(Error::NumericFloor(v));
        }
        curve.push(CurvePoint {
            index: k as i64,
            scale: r,
            statistic: v.ln(),
        });
    }
    let w = tail_window(curve.len()).max(3).min(curve.len());
    let tail = &curve[curve.len() - w..];
    let xs: Vec<f64> = tail.iter().map(|c| c.scale.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|c| c.statistic).collect();
    let fit = fit_line(&xs, &ys).ok_or(Error::TooFewScales {
        usable: w,
        required: 2,
    })?;
    let d = spec.dim() as f64;
    let raw = d - fit.slope;
    Ok(DimensionEstimate {
        value: clip(raw, 0.0, d),
        method: Method::SlopeFit,
        curve,
        fit_residual: fit.slope_stderr,
        params: Default::default(),
    }
    .param("quantity", "lev_exponent")
    .param("raw_value", raw)
    .param("quad_tol", config.quad_tol)
    .param("tail_window", w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    #[test]
    fn dirac_integral_is_two_r() {
        let v = lev_integral(&MeasureSpec::dirac_origin(1), 5.0, 1e-10).unwrap();
        assert!((v - 10.0).abs() < 1e-10);
    }

    #[test]
    fn two_atoms_closed_form() {
        // |μ̂|² = (1 + cos(πt))/2, so ∫_{-r}^{r} = r + sin(πr)/π.
        let spec = MeasureSpec::atomic(vec![Atom::new(vec![0.0], 0.5), Atom::new(vec![0.5], 0.5)])
            .unwrap();
        for r in [0.7, 3.0, 10.25] {
            let v = lev_integral(&spec, r, 1e-10).unwrap();
            let exact = r + (std::f64::consts::PI * r).sin() / std::f64::consts::PI;
            assert!((v - exact).abs() < 1e-10, "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn lebesgue_integral_approaches_one() {
        let v = lev_integral(&MeasureSpec::lebesgue(), 64.0, 1e-9).unwrap();
        assert!(v < 1.0 && v > 0.99);
    }

    #[test]
    fn rejects_higher_dimension() {
        let spec = MeasureSpec::dirac_origin(2);
        assert!(matches!(
            lev_integral(&spec, 1.0, 1e-6),
            Err(Error::Unsupported(_))
        ));
    }
}
