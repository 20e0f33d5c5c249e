//! Finite Borel measures on Euclidean space and the operations the
//! estimators need: b-adic cell masses, restriction, rescaling, affine
//! images and Fourier transforms.

mod cell;
mod fourier;
mod levels;
mod ops;
mod support;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

pub use cell::{Cell, GRID_SNAP};
pub(crate) use fourier::{cis_turns, digit_cutoff};
pub use fourier::{digit_factor, C64};
pub(crate) use levels::oscillating_phase_ends;
pub use levels::LevelSet;
pub use ops::MassHistogram;
pub use support::Region;
pub use tree::DyadicTree;

/// Total masses within this distance of 1 count as probability measures.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Current version of the spec-file schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::decimal::vec")]
    pub point: Vec<f64>,
    #[serde(with = "crate::decimal")]
    pub weight: f64,
}

impl Atom {
    pub fn new(point: Vec<f64>, weight: f64) -> Self {
        Atom { point, weight }
    }
}

/// Tagged description of a finite measure on `ℝ^d`.
///
/// `Affine { base, translate: v, scale: s }` is the image of `base` under
/// `x ↦ x/s + v`; with this convention a spectrum `Λ` of `base` becomes
/// `sΛ`. `Scaled` multiplies the mass by a positive factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Atomic {
        dim: usize,
        atoms: Vec<Atom>,
    },
    Digit {
        p: u32,
        levels: LevelSet,
    },
    DyadicTree(DyadicTree),
    Product {
        left: Box<MeasureSpec>,
        right: Box<MeasureSpec>,
    },
    Mixed {
        mu: Box<MeasureSpec>,
        nu: Box<MeasureSpec>,
        #[serde(default)]
        normalize: bool,
    },
    Affine {
        base: Box<MeasureSpec>,
        #[serde(with = "crate::decimal::vec")]
        translate: Vec<f64>,
        #[serde(with = "crate::decimal")]
        scale: f64,
    },
    Scaled {
        base: Box<MeasureSpec>,
        #[serde(with = "crate::decimal")]
        factor: f64,
    },
}

/// A spec file: a measure plus the schema version it was written against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub measure: MeasureSpec,
}

impl MeasureDocument {
    pub fn new(measure: MeasureSpec) -> Self {
        MeasureDocument {
            schema_version: SCHEMA_VERSION,
            measure,
        }
    }

    pub fn from_json(text: &str) -> Result<MeasureSpec> {
        let doc: MeasureDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::MalformedSpec(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        doc.measure.validate()?;
        Ok(doc.measure)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure specs always serialize")
    }
}

impl MeasureSpec {
    pub fn dirac(point: Vec<f64>) -> Self {
        MeasureSpec::Atomic {
            dim: point.len(),
            atoms: vec![Atom::new(point, 1.0)],
        }
    }

    /// `δ_0` in dimension `dim`.
    pub fn dirac_origin(dim: usize) -> Self {
        MeasureSpec::dirac(vec![0.0; dim])
    }

    pub fn zero(dim: usize) -> Self {
        MeasureSpec::Atomic {
            dim,
            atoms: Vec::new(),
        }
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|a| a.point.len())
            .ok_or_else(|| Error::MalformedSpec("atomic measure needs a dimension".into()))?;
        let spec = MeasureSpec::Atomic { dim, atoms };
        spec.validate()?;
        Ok(spec)
    }

    /// `ν_I` for digit base `p`.
    pub fn digit(p: u32, levels: LevelSet) -> Result<Self> {
        let spec = MeasureSpec::Digit { p, levels };
        spec.validate()?;
        Ok(spec)
    }

    /// Lebesgue measure on `[0,1]`, as the digit measure with every binary digit free.
    pub fn lebesgue() -> Self {
        MeasureSpec::Digit {
            p: 2,
            levels: LevelSet::all(),
        }
    }

    pub fn product(left: MeasureSpec, right: MeasureSpec) -> Self {
        MeasureSpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// `μ×δ_0 + δ_0×ν`, unnormalized.
    pub fn mixed(mu: MeasureSpec, nu: MeasureSpec) -> Self {
        MeasureSpec::Mixed {
            mu: Box::new(mu),
            nu: Box::new(nu),
            normalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Atomic { dim, atoms } => {
                if *dim == 0 {
                    return Err(Error::MalformedSpec("dimension must be at least 1".into()));
                }
                for a in atoms {
                    if a.point.len() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: a.point.len(),
                        });
                    }
                    if !(a.weight >= 0.0 && a.weight.is_finite())
                        || a.point.iter().any(|x| !x.is_finite())
                    {
                        return Err(Error::MalformedSpec(
                            "atom weights must be finite and nonnegative".into(),
                        ));
                    }
                }
                Ok(())
            }
            MeasureSpec::Digit { p, levels } => {
                if *p < 2 {
                    return Err(Error::MalformedSpec(format!(
                        "digit base must be at least 2, got {p}"
                    )));
                }
                levels.validate()
            }
            MeasureSpec::DyadicTree(_) => Ok(()),
            MeasureSpec::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            MeasureSpec::Mixed { mu, nu, normalize } => {
                mu.validate()?;
                nu.validate()?;
                if *normalize && self.raw_mass()? <= 0.0 {
                    return Err(Error::ZeroMass);
                }
                Ok(())
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => {
                base.validate()?;
                if *scale == 0.0 {
                    return Err(Error::ZeroScale);
                }
                if !scale.is_finite() || translate.iter().any(|v| !v.is_finite()) {
                    return Err(Error::MalformedSpec(
                        "affine parameters must be finite".into(),
                    ));
                }
                if translate.len() != base.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: base.dim(),
                        got: translate.len(),
                    });
                }
                Ok(())
            }
            MeasureSpec::Scaled { base, factor } => {
                base.validate()?;
                if !(factor.is_finite() && *factor >= 0.0) {
                    return Err(Error::MalformedSpec(
                        "mass factor must be finite and nonnegative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Atomic { dim, .. } => *dim,
            MeasureSpec::Digit { .. } => 1,
            MeasureSpec::DyadicTree(t) => t.dim(),
            MeasureSpec::Product { left, right } => left.dim() + right.dim(),
            MeasureSpec::Mixed { mu, nu, .. } => mu.dim() + nu.dim(),
            MeasureSpec::Affine { base, .. } | MeasureSpec::Scaled { base, .. } => base.dim(),
        }
    }

    fn raw_mass(&self) -> Result<f64> {
        match self {
            MeasureSpec::Mixed { mu, nu, .. } => Ok(mu.total_mass()? + nu.total_mass()?),
            _ => self.total_mass(),
        }
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(match self {
            MeasureSpec::Atomic { atoms, .. } => atoms.iter().map(|a| a.weight).sum(),
            MeasureSpec::Digit { .. } => 1.0,
            MeasureSpec::DyadicTree(t) => t.total_mass(),
            MeasureSpec::Product { left, right } => left.total_mass()? * right.total_mass()?,
            MeasureSpec::Mixed { normalize, .. } => {
                if *normalize {
                    1.0
                } else {
                    self.raw_mass()?
                }
            }
            MeasureSpec::Affine { base, .. } => base.total_mass()?,
            MeasureSpec::Scaled { base, factor } => factor * base.total_mass()?,
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.total_mass()
            .is_ok_and(|m| (m - 1.0).abs() <= NORMALIZATION_TOL)
    }

    /// Partition base the measure is exact in; `None` means any base works.
    pub fn natural_base(&self) -> Option<u32> {
        match self {
            MeasureSpec::Atomic { .. } => None,
            MeasureSpec::Digit { p, levels } => {
                if levels.is_finite() {
                    None
                } else {
                    Some(*p)
                }
            }
            MeasureSpec::DyadicTree(t) => Some(t.base()),
            MeasureSpec::Product { left, right } => left.natural_base().or(right.natural_base()),
            MeasureSpec::Mixed { mu, nu, .. } => mu.natural_base().or(nu.natural_base()),
            MeasureSpec::Affine { base, .. } | MeasureSpec::Scaled { base, .. } => {
                base.natural_base()
            }
        }
    }

    /// Image under `x ↦ x/s + v`.
    pub fn affine_image(&self, translate: Vec<f64>, scale: f64) -> Result<MeasureSpec> {
        if scale == 0.0 {
            return Err(Error::ZeroScale);
        }
        let spec = MeasureSpec::Affine {
            base: Box::new(self.clone()),
            translate,
            scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The measure multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> MeasureSpec {
        MeasureSpec::Scaled {
            base: Box::new(self.clone()),
            factor,
        }
    }

    /// Uniform atoms on `C(I_n)`; only for `Digit` specs.
    pub fn truncate_digit(&self, n: u64, limits: &Limits) -> Result<MeasureSpec> {
        match self {
            MeasureSpec::Digit { p, levels } => {
                if n == 0 {
                    return Err(Error::InvalidArgument(
                        "truncation depth must be at least 1".into(),
                    ));
                }
                Ok(MeasureSpec::Atomic {
                    dim: 1,
                    atoms: digit_atoms(*p, &levels.elements_upto(n), limits)?,
                })
            }
            _ => Err(Error::Unsupported(
                "truncate_digit needs a digit measure".into(),
            )),
        }
    }

    /// Every atom of a finitely atomic measure, in a deterministic order.
    ///
    /// Returns `None` for measures with a continuous part.
    pub fn atoms(&self, limits: &Limits) -> Result<Option<Vec<Atom>>> {
        Ok(match self {
            MeasureSpec::Atomic { atoms, .. } => {
                limits.check_atoms(atoms.len() as u128)?;
                Some(atoms.clone())
            }
            MeasureSpec::Digit { p, levels } => match levels.bound() {
                Some(b) => Some(digit_atoms(*p, &levels.elements_upto(b), limits)?),
                None => None,
            },
            MeasureSpec::DyadicTree(_) => None,
            MeasureSpec::Product { left, right } => {
                let (Some(l), Some(r)) = (left.atoms(limits)?, right.atoms(limits)?) else {
                    return Ok(None);
                };
                limits.check_atoms(l.len() as u128 * r.len() as u128)?;
                let mut out = Vec::with_capacity(l.len() * r.len());
                for a in &l {
                    for b in &r {
                        let mut point = a.point.clone();
                        point.extend_from_slice(&b.point);
                        out.push(Atom::new(point, a.weight * b.weight));
                    }
                }
                Some(out)
            }
            MeasureSpec::Mixed { mu, nu, normalize } => {
                let (Some(m), Some(n)) = (mu.atoms(limits)?, nu.atoms(limits)?) else {
                    return Ok(None);
                };
                limits.check_atoms(m.len() as u128 + n.len() as u128)?;
                let c = if *normalize {
                    1.0 / self.raw_mass()?
                } else {
                    1.0
                };
                let (dm, dn) = (mu.dim(), nu.dim());
                let mut out = Vec::with_capacity(m.len() + n.len());
                for a in m {
                    let mut point = a.point;
                    point.extend(std::iter::repeat_n(0.0, dn));
                    out.push(Atom::new(point, c * a.weight));
                }
                for a in n {
                    let mut point = vec![0.0; dm];
                    point.extend_from_slice(&a.point);
                    out.push(Atom::new(point, c * a.weight));
                }
                Some(out)
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => base.atoms(limits)?.map(|atoms| {
                atoms
                    .into_iter()
                    .map(|a| {
                        let point = a
                            .point
                            .iter()
                            .zip(translate)
                            .map(|(x, v)| x / scale + v)
                            .collect();
                        Atom::new(point, a.weight)
                    })
                    .collect()
            }),
            MeasureSpec::Scaled { base, factor } => base.atoms(limits)?.map(|atoms| {
                atoms
                    .into_iter()
                    .map(|a| Atom::new(a.point, a.weight * factor))
                    .collect()
            }),
        })
    }

    /// The measure as an explicit `Atomic` spec, when it is finitely atomic.
    pub fn atomized(&self, limits: &Limits) -> Result<Option<MeasureSpec>> {
        Ok(self.atoms(limits)?.map(|atoms| MeasureSpec::Atomic {
            dim: self.dim(),
            atoms,
        }))
    }

    /// A closed axis-parallel box containing the support, as (lower, upper) corners.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok(match self {
            MeasureSpec::Atomic { dim, atoms } => {
                let live: Vec<&Atom> = atoms.iter().filter(|a| a.weight > 0.0).collect();
                if live.is_empty() {
                    return Ok((vec![0.0; *dim], vec![0.0; *dim]));
                }
                let mut lo = vec![f64::INFINITY; *dim];
                let mut hi = vec![f64::NEG_INFINITY; *dim];
                for a in live {
                    for (j, &x) in a.point.iter().enumerate() {
                        lo[j] = lo[j].min(x);
                        hi[j] = hi[j].max(x);
                    }
                }
                (lo, hi)
            }
            MeasureSpec::Digit { p, levels } => {
                let top = match levels.bound() {
                    Some(b) => levels
                        .elements_upto(b)
                        .iter()
                        .map(|&i| (*p - 1) as f64 * (*p as f64).powi(-(i as i32)))
                        .sum(),
                    None => 1.0,
                };
                (vec![0.0], vec![top])
            }
            MeasureSpec::DyadicTree(t) => (vec![0.0; t.dim()], vec![1.0; t.dim()]),
            MeasureSpec::Product { left, right } => {
                let (mut lo, mut hi) = left.bounding_box()?;
                let (lo2, hi2) = right.bounding_box()?;
                lo.extend(lo2);
                hi.extend(hi2);
                (lo, hi)
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let (mut lo, mut hi) = mu.bounding_box()?;
                let (lo2, hi2) = nu.bounding_box()?;
                for j in 0..lo.len() {
                    lo[j] = lo[j].min(0.0);
                    hi[j] = hi[j].max(0.0);
                }
                lo.extend(lo2.into_iter().map(|x| x.min(0.0)));
                hi.extend(hi2.into_iter().map(|x| x.max(0.0)));
                (lo, hi)
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => {
                let (lo, hi) = base.bounding_box()?;
                let mut a = Vec::with_capacity(lo.len());
                let mut b = Vec::with_capacity(lo.len());
                for j in 0..lo.len() {
                    let x = lo[j] / scale + translate[j];
                    let y = hi[j] / scale + translate[j];
                    a.push(x.min(y));
                    b.push(x.max(y));
                }
                (a, b)
            }
            MeasureSpec::Scaled { base, .. } => base.bounding_box()?,
        })
    }

    /// Euclidean diameter of the bounding box.
    pub fn diameter(&self) -> Result<f64> {
        let (lo, hi) = self.bounding_box()?;
        Ok(lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt())
    }
}

/// Uniform atoms `Σ_{i∈levels} b_i p^{-i}` in lexicographic digit order.
pub(crate) fn digit_atoms(p: u32, levels: &[u64], limits: &Limits) -> Result<Vec<Atom>> {
    let count = (p as u128)
        .checked_pow(levels.len() as u32)
        .unwrap_or(u128::MAX);
    limits.check_atoms(count)?;
    let w = 1.0 / count as f64;
    let mut points = vec![0.0f64];
    for &i in levels {
        let step = (p as f64).powi(-(i as i32));
        let mut next = Vec::with_capacity(points.len() * p as usize);
        for &x in &points {
            for b in 0..p {
                next.push(x + b as f64 * step);
            }
        }
        points = next;
    }
    Ok(points.into_iter().map(|x| Atom::new(vec![x], w)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses() {
        assert_eq!(MeasureSpec::dirac(vec![0.0]).total_mass().unwrap(), 1.0);
        let rho = MeasureSpec::mixed(MeasureSpec::lebesgue(), MeasureSpec::dirac_origin(1));
        assert_eq!(rho.total_mass().unwrap(), 2.0);
        assert_eq!(rho.dim(), 2);
    }

    #[test]
    fn digit_truncation_atoms() {
        let nu = MeasureSpec::digit(2, LevelSet::all()).unwrap();
        let t = nu.truncate_digit(2, &Limits::DEFAULT).unwrap();
        let MeasureSpec::Atomic { atoms, .. } = t else {
            panic!()
        };
        let pts: Vec<f64> = atoms.iter().map(|a| a.point[0]).collect();
        assert_eq!(pts, vec![0.0, 0.25, 0.5, 0.75]);
        assert!(atoms.iter().all(|a| a.weight == 0.25));
    }

    #[test]
    fn empty_levels_truncate_to_origin() {
        let nu = MeasureSpec::digit(3, LevelSet::empty()).unwrap();
        let MeasureSpec::Atomic { atoms, .. } = nu.truncate_digit(5, &Limits::DEFAULT).unwrap()
        else {
            panic!()
        };
        assert_eq!(atoms, vec![Atom::new(vec![0.0], 1.0)]);
    }

    #[test]
    fn truncation_respects_atom_limit() {
        let nu = MeasureSpec::lebesgue();
        let small = Limits {
            max_atoms: 8,
            ..Limits::DEFAULT
        };
        assert!(matches!(
            nu.truncate_digit(4, &small),
            Err(Error::LimitExceeded {
                name: "max_atoms",
                ..
            })
        ));
    }

    #[test]
    fn zero_scale_rejected() {
        assert_eq!(
            MeasureSpec::lebesgue()
                .affine_image(vec![0.0], 0.0)
                .unwrap_err(),
            Error::ZeroScale
        );
    }

    #[test]
    fn json_round_trip_uses_decimal_strings() {
        let spec = MeasureSpec::Affine {
            base: Box::new(
                MeasureSpec::digit(3, LevelSet::oscillating(0.25, 0.75, 2.0).unwrap()).unwrap(),
            ),
            translate: vec![0.5],
            scale: 2.0,
        };
        let text = MeasureDocument::new(spec.clone()).to_json();
        assert!(text.contains("\"0.5\""));
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(MeasureDocument::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn tree_json_round_trip() {
        let spec = MeasureSpec::DyadicTree(DyadicTree::uniform(2, 1, 3).unwrap());
        let text = MeasureDocument::new(spec.clone()).to_json();
        assert_eq!(MeasureDocument::from_json(&text).unwrap(), spec);
    }
}
