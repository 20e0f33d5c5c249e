use std::f64::consts::{PI, TAU};

use super::MeasureSpec;
use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// `e^{2πi t}`, reducing `t` modulo 1 first.
pub(crate) fn cis_turns(t: f64) -> C64 {
    let r = t - t.round();
    let (s, c) = (TAU * r).sin_cos();
    C64::new(c, s)
}

/// `(1/p) Σ_{b<p} e^{2πi ξ b p^{-i}}`, the level-`i` factor of a digit measure.
pub fn digit_factor(p: u32, i: u64, xi: f64) -> C64 {
    let theta = xi * (p as f64).powi(-(i as i32));
    let mut acc = C64::new(0.0, 0.0);
    for b in 0..p {
        acc += cis_turns(theta * b as f64);
    }
    acc / p as f64
}

/// First level `i*` with `π|ξ|p^{1-i*} < tol`; every factor beyond it
/// moves the product by less than `tol` in total.
pub(crate) fn digit_cutoff(p: u32, xi: f64, tol: f64) -> u64 {
    let mut i = 1u64;
    while PI * xi.abs() * (p as f64).powi(1 - i as i32) >= tol {
        i += 1;
    }
    i
}

impl MeasureSpec {
    /// `μ̂(ξ) = ∫ e^{2πi ξ·x} dμ(x)` to absolute accuracy `tol`.
    pub fn fourier(&self, xi: &[f64], tol: f64) -> Result<C64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        self.fourier_inner(xi, tol)
    }

    fn fourier_inner(&self, xi: &[f64], tol: f64) -> Result<C64> {
        match self {
            MeasureSpec::Atomic { atoms, .. } => {
                let mut acc = C64::new(0.0, 0.0);
                for a in atoms {
                    let phase: f64 = a.point.iter().zip(xi).map(|(x, k)| x * k).sum();
                    acc += cis_turns(phase) * a.weight;
                }
                Ok(acc)
            }
            MeasureSpec::Digit { p, levels } => {
                let x = xi[0];
                if x == 0.0 {
                    return Ok(C64::new(1.0, 0.0));
                }
                let cut = digit_cutoff(*p, x, tol);
                let top = levels.bound().map_or(cut - 1, |b| b.min(cut - 1));
                let mut acc = C64::new(1.0, 0.0);
                for i in levels.elements_upto(top) {
                    acc *= digit_factor(*p, i, x);
                }
                Ok(acc)
            }
            MeasureSpec::DyadicTree(t) => {
                let n = t.depth();
                let h = (t.base() as f64).powi(-(n as i32));
                let norm: f64 = xi.iter().map(|k| k * k).sum::<f64>().sqrt();
                let bound = t.total_mass() * PI * (t.dim() as f64).sqrt() * norm * h;
                if bound > tol {
                    return Err(Error::ToleranceUnreachable {
                        tol,
                        reason: format!("a depth-{n} tree resolves |ξ|={norm} only to {bound:e}"),
                    });
                }
                let mut acc = C64::new(0.0, 0.0);
                for (flat, &m) in t.level(n).iter().enumerate() {
                    if m == 0.0 {
                        continue;
                    }
                    let phase: f64 = t
                        .coords(n, flat)
                        .iter()
                        .zip(xi)
                        .map(|(&c, k)| (c as f64 + 0.5) * h * k)
                        .sum();
                    acc += cis_turns(phase) * m;
                }
                Ok(acc)
            }
            MeasureSpec::Product { left, right } => {
                let (a, b) = xi.split_at(left.dim());
                let ml = left.total_mass()?;
                let mr = right.total_mass()?;
                let fl = left.fourier_inner(a, tol / (2.0 * mr.max(1.0)))?;
                let fr = right.fourier_inner(b, tol / (2.0 * (ml + 1.0)))?;
                Ok(fl * fr)
            }
            MeasureSpec::Mixed { mu, nu, normalize } => {
                let (a, b) = xi.split_at(mu.dim());
                let c = if *normalize {
                    1.0 / (mu.total_mass()? + nu.total_mass()?)
                } else {
                    1.0
                };
                let each = tol / (2.0 * c.max(1.0));
                Ok((mu.fourier_inner(a, each)? + nu.fourier_inner(b, each)?) * c)
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => {
                let inner: Vec<f64> = xi.iter().map(|k| k / scale).collect();
                let phase: f64 = translate.iter().zip(xi).map(|(v, k)| v * k).sum();
                Ok(cis_turns(phase) * base.fourier_inner(&inner, tol)?)
            }
            MeasureSpec::Scaled { base, factor } => {
                if *factor == 0.0 {
                    return Ok(C64::new(0.0, 0.0));
                }
                Ok(base.fourier_inner(xi, tol / factor)? * *factor)
            }
        }
    }

    /// `⟨t, λ⟩_μ = μ̂(t - λ)`.
    pub fn inner_product(&self, t: &[f64], lambda: &[f64], tol: f64) -> Result<C64> {
        if t.len() != lambda.len() {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                got: lambda.len(),
            });
        }
        let d: Vec<f64> = t.iter().zip(lambda).map(|(a, b)| a - b).collect();
        self.fourier(&d, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevelSet;

    #[test]
    fn lebesgue_transform_is_sinc() {
        let leb = MeasureSpec::lebesgue();
        for &x in &[0.3, 1.0, 2.5, 17.25] {
            let got = leb.fourier(&[x], 1e-13).unwrap();
            let want = C64::new((TAU * x).sin(), 1.0 - (TAU * x).cos()) / (TAU * x);
            assert!((got - want).norm() < 1e-12, "ξ={x}: {got} vs {want}");
        }
    }

    #[test]
    fn two_atom_digit_vanishes_at_one() {
        let nu = MeasureSpec::digit(2, LevelSet::first(1)).unwrap();
        assert!(nu.fourier(&[1.0], 1e-14).unwrap().norm() < 1e-15);
    }

    #[test]
    fn cutoff_bound_holds() {
        let i = digit_cutoff(3, 100.0, 1e-10);
        assert!(PI * 100.0 * 3f64.powi(1 - i as i32) < 1e-10);
        assert!(PI * 100.0 * 3f64.powi(2 - i as i32) >= 1e-10);
    }

    #[test]
    fn tree_refuses_unreachable_tolerance() {
        let t = MeasureSpec::DyadicTree(crate::measure::DyadicTree::uniform(2, 1, 4).unwrap());
        assert!(matches!(
            t.fourier(&[10.0], 1e-6),
            Err(Error::ToleranceUnreachable { .. })
        ));
        assert!((t.fourier(&[0.0], 1e-6).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(MeasureSpec::lebesgue().fourier(&[1.0], 0.0).is_err());
    }
}
