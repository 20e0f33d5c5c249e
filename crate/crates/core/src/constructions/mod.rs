//! Builders for the restricted-digit family `ν_I` and its spectra, level
//! sets whose density oscillates, mixed-type measures, and the reports that
//! assemble estimator output into verdicts.

mod certificate;
mod oscillating;
mod report;

pub use certificate::{non_spectral_certificate, Certificate, CertificateConfig};
pub use oscillating::{oscillating_levelset, OscillatingLevels};
pub use report::{counterexample_report, CounterexampleReport, VERDICT_MARGIN};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::{LevelSet, MeasureSpec, NORMALIZATION_TOL};
use crate::spectrum::SpectrumSet;

/// `ν_I`: uniform digits at the levels in `I`, zero digits elsewhere.
pub fn build_digit_measure(p: u32, levels: LevelSet) -> Result<MeasureSpec> {
    MeasureSpec::digit(p, levels)
}

/// `Λ_{I_n} = {Σ_{i∈I_n} b_i p^{i-1+shift}}`, checked against the atom
/// limit so that it can be enumerated.
pub fn enumerate_spectrum(
    p: u32,
    levels: LevelSet,
    n: u64,
    shift: i32,
    limits: &Limits,
) -> Result<SpectrumSet> {
    let set = SpectrumSet::digit(p, levels, n, shift)?;
    limits.check_atoms(set.cardinality().unwrap_or(u128::MAX))?;
    Ok(set)
}

/// `ρ = μ×δ_0 + δ_0×ν` at total mass 2, for probability measures `μ, ν`.
pub fn mixed_measure(mu: MeasureSpec, nu: MeasureSpec) -> Result<MeasureSpec> {
    for m in [&mu, &nu] {
        let mass = m.total_mass()?;
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(mass));
        }
    }
    let rho = MeasureSpec::mixed(mu, nu);
    rho.validate()?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(s: &SpectrumSet) -> Vec<f64> {
        s.points(&Limits::DEFAULT)
            .unwrap()
            .into_iter()
            .map(|q| q[0])
            .collect()
    }

    #[test]
    fn spectrum_expansions() {
        let two = enumerate_spectrum(2, LevelSet::all(), 2, 0, &Limits::DEFAULT).unwrap();
        assert_eq!(reals(&two), vec![0.0, 1.0, 2.0, 3.0]);
        let none = enumerate_spectrum(2, LevelSet::empty(), 5, 0, &Limits::DEFAULT).unwrap();
        assert_eq!(reals(&none), vec![0.0]);
        let three = enumerate_spectrum(3, LevelSet::first(1), 1, 0, &Limits::DEFAULT).unwrap();
        assert_eq!(reals(&three), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn spectrum_size_limit() {
        let small = Limits {
            max_atoms: 16,
            ..Limits::DEFAULT
        };
        assert!(enumerate_spectrum(2, LevelSet::all(), 5, 0, &small).is_err());
    }

    #[test]
    fn empty_levels_give_dirac() {
        let nu = build_digit_measure(2, LevelSet::empty()).unwrap();
        let atoms = nu.atoms(&Limits::DEFAULT).unwrap().unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].point, vec![0.0]);
    }

    #[test]
    fn mixed_of_diracs() {
        let rho =
            mixed_measure(MeasureSpec::dirac_origin(1), MeasureSpec::dirac_origin(1)).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((rho.total_mass().unwrap() - 2.0).abs() < 1e-15);
        assert!((rho.fourier(&[0.3, -1.1], 1e-13).unwrap().re - 2.0).abs() < 1e-13);
        assert!(mixed_measure(
            MeasureSpec::dirac_origin(1).scaled(2.0),
            MeasureSpec::dirac_origin(1)
        )
        .is_err());
    }
}
