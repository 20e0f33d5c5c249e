use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimate::{entropy_dim_estimate, fourier_dim_estimate, EntropyBound, FourierDimConfig};
use crate::measure::{MeasureSpec, Region};
use crate::DimensionEstimate;

pub const CERTIFICATE_CAVEAT: &str =
    "dimension values are finite-scale numerical estimates; the conclusion holds only if they reflect the limits";

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateConfig {
    pub fourier: FourierDimConfig,
    pub entropy_n_max: u32,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig {
            fourier: FourierDimConfig::default(),
            entropy_n_max: 32,
        }
    }
}

/// Hypothesis checks for `μ + ν + ρ` failing to be frame spectral: the
/// Fourier dimension of `μ` exceeds the upper entropy dimension of `ν`, and
/// `μ(supp(ν+ρ)) = ν(supp(μ+ρ)) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub fourier_mu: DimensionEstimate,
    pub entropy_nu: DimensionEstimate,
    /// `dim_F μ - dim_e ν`.
    pub gap: f64,
    /// Larger of the two estimates' residuals; the gap must exceed it.
    pub gap_threshold: f64,
    pub mu_avoids_nu_rho: bool,
    pub nu_avoids_mu_rho: bool,
    pub mu_mass_on_others: f64,
    pub nu_mass_on_others: f64,
    pub conclusion: bool,
    pub caveat: String,
}

fn regions(specs: &[&MeasureSpec]) -> Result<Vec<Region>> {
    let mut out = Vec::new();
    for s in specs {
        if s.total_mass()? > 0.0 {
            out.extend(s.support_regions()?);
        }
    }
    Ok(out)
}

fn mass_on(spec: &MeasureSpec, regions: &[Region]) -> Result<f64> {
    regions.iter().map(|r| spec.mass_on_region(r)).sum()
}

/// Evaluates the hypotheses; `rho` may be the zero measure.
pub fn non_spectral_certificate(
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    rho: &MeasureSpec,
    config: &CertificateConfig,
) -> Result<Certificate> {
    let mu_mass = mass_on(mu, &regions(&[nu, rho])?)?;
    let nu_mass = mass_on(nu, &regions(&[mu, rho])?)?;
    let (fourier, entropy) = rayon::join(
        || fourier_dim_estimate(mu, &config.fourier),
        || entropy_dim_estimate(nu, config.entropy_n_max, EntropyBound::Upper, None),
    );
    let (fourier, entropy) = (fourier?, entropy?);
    let gap = fourier.value - entropy.value;
    let threshold = fourier.fit_residual.max(entropy.fit_residual);
    let disjoint = mu_mass == 0.0 && nu_mass == 0.0;
    Ok(Certificate {
        gap,
        gap_threshold: threshold,
        mu_avoids_nu_rho: mu_mass == 0.0,
        nu_avoids_mu_rho: nu_mass == 0.0,
        mu_mass_on_others: mu_mass,
        nu_mass_on_others: nu_mass,
        conclusion: disjoint && gap > threshold,
        caveat: CERTIFICATE_CAVEAT.to_string(),
        fourier_mu: fourier,
        entropy_nu: entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifted_lebesgue() -> MeasureSpec {
        MeasureSpec::lebesgue()
            .affine_image(vec![1.0], 1.0)
            .unwrap()
    }

    #[test]
    fn shifted_lebesgue_against_dirac() {
        let c = non_spectral_certificate(
            &shifted_lebesgue(),
            &MeasureSpec::dirac_origin(1),
            &MeasureSpec::zero(1),
            &CertificateConfig::default(),
        )
        .unwrap();
        assert!(c.conclusion, "{c:?}");
        assert!(c.mu_avoids_nu_rho && c.nu_avoids_mu_rho);
    }

    #[test]
    fn identical_measures_overlap() {
        let c = non_spectral_certificate(
            &shifted_lebesgue(),
            &shifted_lebesgue(),
            &MeasureSpec::zero(1),
            &CertificateConfig::default(),
        )
        .unwrap();
        assert!(!c.conclusion);
        assert!(!c.mu_avoids_nu_rho);
    }

    #[test]
    fn atomic_mu_fails_inequality() {
        let c = non_spectral_certificate(
            &MeasureSpec::dirac(vec![3.0]),
            &MeasureSpec::dirac_origin(1),
            &MeasureSpec::zero(1),
            &CertificateConfig::default(),
        )
        .unwrap();
        assert!(!c.conclusion);
        assert_eq!(c.fourier_mu.value, 0.0);
    }
}
