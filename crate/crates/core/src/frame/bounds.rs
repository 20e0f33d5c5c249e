use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::eigen::lanczos_extremes;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::{MeasureSpec, C64};
use crate::spectrum::SpectrumSet;

/// Relative accuracy of the extreme eigenvalues.
pub const EIGEN_REL_TOL: f64 = 1e-9;
/// Iteration cap for the eigen-solve.
pub const EIGEN_CAP: usize = 10_000;

/// Frame bounds `A ≤ Σ_λ |⟨f,e_λ⟩|² / ‖f‖² ≤ B` for one `(μ, Λ)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    /// True for eigenvalue bounds on atomic measures, false for trial brackets.
    pub exact: bool,
    /// `upper / lower`, absent when `lower` is zero.
    pub condition: Option<f64>,
    pub spectrum_size: usize,
    pub atom_count: Option<usize>,
    pub iterations: usize,
}

/// A nonzero function in `L²(μ)` used to bracket the frame bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialFunction {
    /// `Σ c_s e_{t_s}`.
    Exponentials(Vec<(C64, Vec<f64>)>),
    /// Values at the atoms of a finitely atomic measure, in atom order.
    Values(Vec<C64>),
}

/// `X[λ,m] = √w_m e^{-2πi λ·x_m}`; the frame operator in the weighted
/// coordinates `g_m = √w_m f_m` is `XᴴX`.
fn analysis_matrix(points: &[Vec<f64>], atoms: &[crate::Atom]) -> DMatrix<C64> {
    DMatrix::from_fn(points.len(), atoms.len(), |j, m| {
        let phase: f64 = points[j]
            .iter()
            .zip(&atoms[m].point)
            .map(|(l, x)| l * x)
            .sum();
        crate::measure::cis_turns(-phase) * atoms[m].weight.sqrt()
    })
}

/// Exact frame bounds for a finitely atomic measure: the extreme
/// eigenvalues of the frame operator restricted to the atoms.
pub fn frame_bounds_atomic(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    limits: &Limits,
) -> Result<FrameReport> {
    let atoms = spec.atoms(limits)?.ok_or_else(|| {
        Error::Unsupported("exact frame bounds need a finitely atomic measure".into())
    })?;
    if atoms.is_empty() {
        return Err(Error::ZeroMass);
    }
    if atoms.iter().any(|a| !(a.weight > 0.0)) {
        return Err(Error::InvalidArgument(
            "degenerate weights: every atom needs positive weight".into(),
        ));
    }
    limits.check_gram(atoms.len())?;
    let n_lambda = spectrum.cardinality().unwrap_or(u128::MAX);
    limits.check_gram(usize::try_from(n_lambda).unwrap_or(usize::MAX))?;
    let points = spectrum.points(limits)?;
    if points.first().is_some_and(|p| p.len() != spec.dim()) {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: points[0].len(),
        });
    }
    let x = analysis_matrix(&points, &atoms);
    let xh = x.adjoint();
    let eig = lanczos_extremes(
        |v: &DVector<C64>| &xh * (&x * v),
        atoms.len(),
        EIGEN_REL_TOL,
        EIGEN_CAP,
    )?;
    let lower = eig.min.max(0.0);
    let upper = eig.max.max(lower);
    Ok(FrameReport {
        lower,
        upper,
        exact: true,
        condition: (lower > 0.0).then(|| upper / lower),
        spectrum_size: points.len(),
        atom_count: Some(atoms.len()),
        iterations: eig.iterations,
    })
}

/// `Σ_λ |⟨f, e_λ⟩_μ|² / ‖f‖²_μ` for one trial function.
pub fn trial_ratio(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    trial: &TrialFunction,
    tol: f64,
    limits: &Limits,
) -> Result<f64> {
    let points = spectrum.points(limits)?;
    let (energy, norm) = match trial {
        TrialFunction::Exponentials(terms) => {
            let mut norm = C64::new(0.0, 0.0);
            for (c, t) in terms {
                for (c2, t2) in terms {
                    norm += c * c2.conj() * spec.inner_product(t, t2, tol)?;
                }
            }
            let mut energy = 0.0;
            for lambda in &points {
                let mut coef = C64::new(0.0, 0.0);
                for (c, t) in terms {
                    coef += c * spec.inner_product(t, lambda, tol)?;
                }
                energy += coef.norm_sqr();
            }
            (energy, norm.re)
        }
        TrialFunction::Values(values) => {
            let atoms = spec.atoms(limits)?.ok_or_else(|| {
                Error::Unsupported("value trials need a finitely atomic measure".into())
            })?;
            if values.len() != atoms.len() {
                return Err(Error::DimensionMismatch {
                    expected: atoms.len(),
                    got: values.len(),
                });
            }
            let norm: f64 = atoms
                .iter()
                .zip(values)
                .map(|(a, f)| a.weight * f.norm_sqr())
                .sum();
            let mut energy = 0.0;
            for lambda in &points {
                let mut coef = C64::new(0.0, 0.0);
                for (a, f) in atoms.iter().zip(values) {
                    let phase: f64 = lambda.iter().zip(&a.point).map(|(l, x)| l * x).sum();
                    coef += f * crate::measure::cis_turns(-phase) * a.weight;
                }
                energy += coef.norm_sqr();
            }
            (energy, norm)
        }
    };
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument(
            "trial function has zero norm in L²(μ)".into(),
        ));
    }
    Ok(energy / norm)
}

/// Brackets from trial functions: the largest ratio is a lower bound on
/// the optimal `B`, the smallest an upper bound on the optimal `A`.
pub fn frame_bounds_bracket(
    spec: &MeasureSpec,
    spectrum: &SpectrumSet,
    trials: &[TrialFunction],
    tol: f64,
    limits: &Limits,
) -> Result<FrameReport> {
    if trials.is_empty() {
        return Err(Error::InvalidArgument("no trial functions".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for t in trials {
        let r = trial_ratio(spec, spectrum, t, tol, limits)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(FrameReport {
        lower: lo,
        upper: hi,
        exact: false,
        condition: (lo > 0.0).then(|| hi / lo),
        spectrum_size: spectrum.points(limits)?.len(),
        atom_count: spec.atoms(limits)?.map(|a| a.len()),
        iterations: trials.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevelSet;

    fn pair(p: u32, n: u64) -> (MeasureSpec, SpectrumSet) {
        let nu = MeasureSpec::digit(p, LevelSet::all()).unwrap();
        (
            nu.truncate_digit(n, &Limits::DEFAULT).unwrap(),
            SpectrumSet::digit(p, LevelSet::all(), n, 0).unwrap(),
        )
    }

    #[test]
    fn orthonormal_pair_is_tight() {
        let (mu, s) = pair(2, 5);
        let r = frame_bounds_atomic(&mu, &s, &Limits::DEFAULT).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-9 && (r.upper - 1.0).abs() < 1e-9);
        assert!(r.exact);
    }

    #[test]
    fn doubled_spectrum_doubles_bounds() {
        // Λ and Λ + 4 coincide as characters on C(I_2) ⊂ ¼ℤ.
        let (mu, s) = pair(2, 2);
        let mut pts: Vec<f64> = s
            .points(&Limits::DEFAULT)
            .unwrap()
            .into_iter()
            .map(|q| q[0])
            .collect();
        pts.extend(pts.clone().iter().map(|x| x + 4.0));
        let doubled = SpectrumSet::from_reals(&pts).unwrap();
        let r = frame_bounds_atomic(&mu, &doubled, &Limits::DEFAULT).unwrap();
        assert!((r.lower - 2.0).abs() < 1e-9 && (r.upper - 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_atom_single_frequency() {
        let r = frame_bounds_atomic(
            &MeasureSpec::dirac(vec![0.3]),
            &SpectrumSet::from_reals(&[7.0]).unwrap(),
            &Limits::DEFAULT,
        )
        .unwrap();
        assert!((r.lower - 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_trial_on_orthonormal_system() {
        let (mu, s) = pair(3, 2);
        let t = TrialFunction::Exponentials(vec![(C64::new(1.0, 0.0), vec![0.0])]);
        let r = trial_ratio(&mu, &s, &t, 1e-13, &Limits::DEFAULT).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let empty = SpectrumSet::from_reals(&[]).unwrap();
        let b = frame_bounds_bracket(&mu, &empty, &[t], 1e-13, &Limits::DEFAULT).unwrap();
        assert_eq!(b.upper, 0.0);
        assert!(!b.exact);
    }

    #[test]
    fn zero_trial_rejected() {
        let (mu, s) = pair(2, 2);
        let t = TrialFunction::Values(vec![C64::new(0.0, 0.0); 4]);
        assert!(trial_ratio(&mu, &s, &t, 1e-13, &Limits::DEFAULT).is_err());
    }

    #[test]
    fn zero_weight_rejected() {
        let mu = MeasureSpec::atomic(vec![
            crate::Atom::new(vec![0.0], 1.0),
            crate::Atom::new(vec![0.5], 0.0),
        ])
        .unwrap();
        let s = SpectrumSet::from_reals(&[0.0]).unwrap();
        assert!(frame_bounds_atomic(&mu, &s, &Limits::DEFAULT).is_err());
    }
}
