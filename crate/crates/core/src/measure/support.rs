use serde::{Deserialize, Serialize};

use super::MeasureSpec;
use crate::error::{Error, Result};

/// A closed set used to describe supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Point {
        #[serde(with = "crate::decimal::vec")]
        at: Vec<f64>,
    },
    ClosedBox {
        #[serde(with = "crate::decimal::vec")]
        lo: Vec<f64>,
        #[serde(with = "crate::decimal::vec")]
        hi: Vec<f64>,
    },
}

impl Region {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Point { at } => at.as_slice() == x,
            Region::ClosedBox { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| a <= v && v <= b),
        }
    }

    fn split(&self, d1: usize) -> (Region, Region) {
        match self {
            Region::Point { at } => (
                Region::Point {
                    at: at[..d1].to_vec(),
                },
                Region::Point {
                    at: at[d1..].to_vec(),
                },
            ),
            Region::ClosedBox { lo, hi } => (
                Region::ClosedBox {
                    lo: lo[..d1].to_vec(),
                    hi: hi[..d1].to_vec(),
                },
                Region::ClosedBox {
                    lo: lo[d1..].to_vec(),
                    hi: hi[d1..].to_vec(),
                },
            ),
        }
    }

    /// Preimage under `x ↦ x/s + v`.
    fn pull_back(&self, v: &[f64], s: f64) -> Region {
        let back = |x: &[f64]| -> Vec<f64> { x.iter().zip(v).map(|(x, v)| (x - v) * s).collect() };
        match self {
            Region::Point { at } => Region::Point { at: back(at) },
            Region::ClosedBox { lo, hi } => {
                let (a, b) = (back(lo), back(hi));
                Region::ClosedBox {
                    lo: a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect(),
                    hi: a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
                }
            }
        }
    }

    fn bounds(&self) -> (&[f64], &[f64]) {
        match self {
            Region::Point { at } => (at, at),
            Region::ClosedBox { lo, hi } => (lo, hi),
        }
    }

    fn disjoint_from_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        let (a, b) = self.bounds();
        a.iter()
            .zip(b)
            .zip(lo.iter().zip(hi))
            .any(|((a, b), (l, h))| b < l || a > h)
    }

    fn covers_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        let (a, b) = self.bounds();
        a.iter()
            .zip(b)
            .zip(lo.iter().zip(hi))
            .all(|((a, b), (l, h))| a <= l && b >= h)
    }
}

impl MeasureSpec {
    /// Closed regions whose union contains the support.
    pub fn support_regions(&self) -> Result<Vec<Region>> {
        if let Some(atoms) = self.atoms(&crate::Limits::DEFAULT)? {
            return Ok(atoms
                .into_iter()
                .filter(|a| a.weight > 0.0)
                .map(|a| Region::Point { at: a.point })
                .collect());
        }
        if self.total_mass()? == 0.0 {
            return Ok(Vec::new());
        }
        let (lo, hi) = self.bounding_box()?;
        Ok(vec![Region::ClosedBox { lo, hi }])
    }

    /// `μ(R)`, or `Undecidable` when the representation cannot answer exactly.
    pub fn mass_on_region(&self, region: &Region) -> Result<f64> {
        let (lo, hi) = self.bounding_box()?;
        if region.disjoint_from_box(&lo, &hi) {
            return Ok(0.0);
        }
        if region.covers_box(&lo, &hi) {
            return self.total_mass();
        }
        match self {
            MeasureSpec::Atomic { atoms, .. } => Ok(atoms
                .iter()
                .filter(|a| region.contains(&a.point))
                .map(|a| a.weight)
                .sum()),
            MeasureSpec::Digit { levels, .. } if levels.is_finite() => {
                let atoms = self.atoms(&crate::Limits::DEFAULT)?.unwrap_or_default();
                Ok(atoms
                    .iter()
                    .filter(|a| region.contains(&a.point))
                    .map(|a| a.weight)
                    .sum())
            }
            MeasureSpec::Digit { .. } if matches!(region, Region::Point { .. }) => Ok(0.0),
            MeasureSpec::Product { left, right } => {
                let (a, b) = region.split(left.dim());
                Ok(left.mass_on_region(&a)? * right.mass_on_region(&b)?)
            }
            MeasureSpec::Mixed { mu, nu, normalize } => {
                let (a, b) = region.split(mu.dim());
                let zero_a = vec![0.0; mu.dim()];
                let zero_b = vec![0.0; nu.dim()];
                let mut m = 0.0;
                if b.contains(&zero_b) {
                    m += mu.mass_on_region(&a)?;
                }
                if a.contains(&zero_a) {
                    m += nu.mass_on_region(&b)?;
                }
                if *normalize {
                    m /= mu.total_mass()? + nu.total_mass()?;
                }
                Ok(m)
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => base.mass_on_region(&region.pull_back(translate, *scale)),
            MeasureSpec::Scaled { base, factor } => Ok(factor * base.mass_on_region(region)?),
            _ => Err(Error::Undecidable(format!(
                "mass of {region:?} under a {} measure",
                self.kind_name()
            ))),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MeasureSpec::Atomic { .. } => "atomic",
            MeasureSpec::Digit { .. } => "digit",
            MeasureSpec::DyadicTree(_) => "dyadic_tree",
            MeasureSpec::Product { .. } => "product",
            MeasureSpec::Mixed { .. } => "mixed",
            MeasureSpec::Affine { .. } => "affine",
            MeasureSpec::Scaled { .. } => "scaled",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_lebesgue_misses_origin() {
        let mu = MeasureSpec::lebesgue()
            .affine_image(vec![1.0], 1.0)
            .unwrap();
        assert_eq!(
            mu.mass_on_region(&Region::Point { at: vec![0.0] }).unwrap(),
            0.0
        );
        let d = MeasureSpec::dirac_origin(1);
        let regions = mu.support_regions().unwrap();
        assert_eq!(d.mass_on_region(&regions[0]).unwrap(), 0.0);
    }

    #[test]
    fn partial_box_on_continuous_digit_is_undecidable() {
        let nu = MeasureSpec::lebesgue();
        let r = Region::ClosedBox {
            lo: vec![0.2],
            hi: vec![0.4],
        };
        assert!(matches!(nu.mass_on_region(&r), Err(Error::Undecidable(_))));
    }
}
