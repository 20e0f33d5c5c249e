//! Frequency sets `Λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::LevelSet;

/// A finite frequency set.
///
/// `DigitSpectrum` is `Λ_{I_n} = { p^shift · Σ_{i∈I_n} b_i p^{i-1} : b_i < p }`
/// with `n = max_level`. `shift = 0` pairs orthogonally with `C(I_n)`;
/// `shift = 1` gives the terms `b_i p^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSet {
    Explicit {
        dim: usize,
        #[serde(with = "crate::decimal::vec_vec")]
        points: Vec<Vec<f64>>,
    },
    DigitSpectrum {
        p: u32,
        levels: LevelSet,
        #[serde(default)]
        shift: i32,
        max_level: u64,
    },
}

/// A spectrum file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub spectrum: SpectrumSet,
}

impl SpectrumDocument {
    pub fn new(spectrum: SpectrumSet) -> Self {
        SpectrumDocument {
            schema_version: crate::measure::SCHEMA_VERSION,
            spectrum,
        }
    }

    pub fn from_json(text: &str) -> Result<SpectrumSet> {
        let doc: SpectrumDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpectrum(e.to_string()))?;
        if doc.schema_version != crate::measure::SCHEMA_VERSION {
            return Err(Error::MalformedSpectrum(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        doc.spectrum.validate()?;
        Ok(doc.spectrum)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectra always serialize")
    }
}

impl SpectrumSet {
    /// Sorts the points lexicographically and rejects duplicates.
    pub fn explicit(dim: usize, mut points: Vec<Vec<f64>>) -> Result<Self> {
        points.sort_by(|a, b| lex_cmp(a, b));
        let s = SpectrumSet::Explicit { dim, points };
        s.validate()?;
        Ok(s)
    }

    /// One-dimensional explicit set.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        SpectrumSet::explicit(1, values.iter().map(|&x| vec![x]).collect())
    }

    pub fn digit(p: u32, levels: LevelSet, max_level: u64, shift: i32) -> Result<Self> {
        let s = SpectrumSet::DigitSpectrum {
            p,
            levels,
            shift,
            max_level,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumSet::Explicit { dim, points } => {
                if *dim == 0 {
                    return Err(Error::MalformedSpectrum(
                        "dimension must be at least 1".into(),
                    ));
                }
                for q in points {
                    if q.len() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: q.len(),
                        });
                    }
                    if q.iter().any(|x| !x.is_finite()) {
                        return Err(Error::MalformedSpectrum(
                            "frequencies must be finite".into(),
                        ));
                    }
                }
                for w in points.windows(2) {
                    match lex_cmp(&w[0], &w[1]) {
                        std::cmp::Ordering::Less => {}
                        std::cmp::Ordering::Equal => {
                            return Err(Error::MalformedSpectrum(format!(
                                "duplicate frequency {:?}",
                                w[0]
                            )))
                        }
                        std::cmp::Ordering::Greater => {
                            return Err(Error::MalformedSpectrum(
                                "explicit frequencies must be sorted".into(),
                            ))
                        }
                    }
                }
                Ok(())
            }
            SpectrumSet::DigitSpectrum { p, levels, .. } => {
                if *p < 2 {
                    return Err(Error::MalformedSpectrum(format!(
                        "digit base must be at least 2, got {p}"
                    )));
                }
                levels
                    .validate()
                    .map_err(|e| Error::MalformedSpectrum(e.to_string()))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpectrumSet::Explicit { dim, .. } => *dim,
            SpectrumSet::DigitSpectrum { .. } => 1,
        }
    }

    /// Number of elements, or `None` if it does not fit in `u128`.
    pub fn cardinality(&self) -> Option<u128> {
        match self {
            SpectrumSet::Explicit { points, .. } => Some(points.len() as u128),
            SpectrumSet::DigitSpectrum {
                p,
                levels,
                max_level,
                ..
            } => (*p as u128).checked_pow(levels.count_upto(*max_level) as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == Some(0)
    }

    /// `p^shift` for digit spectra.
    pub(crate) fn unit(&self) -> f64 {
        match self {
            SpectrumSet::DigitSpectrum { p, shift, .. } => (*p as f64).powi(*shift),
            SpectrumSet::Explicit { .. } => 1.0,
        }
    }

    /// Free levels of a digit spectrum.
    pub(crate) fn free_levels(&self) -> Vec<u64> {
        match self {
            SpectrumSet::DigitSpectrum {
                levels, max_level, ..
            } => levels.elements_upto(*max_level),
            SpectrumSet::Explicit { .. } => Vec::new(),
        }
    }

    /// All elements in increasing (lexicographic) order.
    pub fn points(&self, limits: &Limits) -> Result<Vec<Vec<f64>>> {
        match self {
            SpectrumSet::Explicit { points, .. } => Ok(points.clone()),
            SpectrumSet::DigitSpectrum { p, .. } => {
                let free = self.free_levels();
                let count = (*p as u128)
                    .checked_pow(free.len() as u32)
                    .unwrap_or(u128::MAX);
                limits.check_atoms(count)?;
                let unit = self.unit();
                let mut ints = vec![0u128];
                for &i in &free {
                    let place = (*p as u128).checked_pow(i as u32 - 1).ok_or_else(|| {
                        Error::Unsupported(format!("digit level {i} exceeds integer range"))
                    })?;
                    ints = ints
                        .iter()
                        .flat_map(|&n| (0..*p as u128).map(move |b| n + b * place))
                        .collect();
                }
                ints.sort_unstable();
                Ok(ints.into_iter().map(|n| vec![n as f64 * unit]).collect())
            }
        }
    }

    /// `Λ + t`, materialized.
    pub fn translated(&self, t: &[f64], limits: &Limits) -> Result<SpectrumSet> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.len(),
            });
        }
        let pts = self
            .points(limits)?
            .into_iter()
            .map(|q| q.iter().zip(t).map(|(a, b)| a + b).collect())
            .collect();
        SpectrumSet::explicit(self.dim(), pts)
    }

    /// `sΛ`. Digit spectra stay symbolic when `s` is an integer power of `p`.
    pub fn scaled(&self, s: f64, limits: &Limits) -> Result<SpectrumSet> {
        if s == 0.0 {
            return Err(Error::ZeroScale);
        }
        if let SpectrumSet::DigitSpectrum {
            p,
            levels,
            shift,
            max_level,
        } = self
        {
            let j = s.ln() / (*p as f64).ln();
            if s > 0.0 && (j - j.round()).abs() < 1e-12 && (*p as f64).powi(j.round() as i32) == s {
                return Ok(SpectrumSet::DigitSpectrum {
                    p: *p,
                    levels: levels.clone(),
                    shift: shift + j.round() as i32,
                    max_level: *max_level,
                });
            }
        }
        let pts = self
            .points(limits)?
            .into_iter()
            .map(|q| q.iter().map(|a| a * s).collect())
            .collect();
        SpectrumSet::explicit(self.dim(), pts)
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            SpectrumSet::Explicit { dim, points } => {
                if points.is_empty() {
                    return 0.0;
                }
                let mut sq = 0.0;
                for a in 0..*dim {
                    let lo = points.iter().map(|q| q[a]).fold(f64::INFINITY, f64::min);
                    let hi = points
                        .iter()
                        .map(|q| q[a])
                        .fold(f64::NEG_INFINITY, f64::max);
                    sq += (hi - lo) * (hi - lo);
                }
                sq.sqrt()
            }
            SpectrumSet::DigitSpectrum { p, .. } => {
                let pf = *p as f64;
                self.free_levels()
                    .iter()
                    .map(|&i| (pf - 1.0) * pf.powi(i as i32 - 1))
                    .sum::<f64>()
                    * self.unit()
            }
        }
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_enumeration_examples() {
        let s = SpectrumSet::digit(2, LevelSet::first(2), 2, 0).unwrap();
        assert_eq!(
            s.points(&Limits::DEFAULT).unwrap(),
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]
        );
        let s = SpectrumSet::digit(3, LevelSet::first(1), 1, 0).unwrap();
        assert_eq!(
            s.points(&Limits::DEFAULT).unwrap(),
            vec![vec![0.0], vec![1.0], vec![2.0]]
        );
        let s = SpectrumSet::digit(2, LevelSet::empty(), 5, 0).unwrap();
        assert_eq!(s.points(&Limits::DEFAULT).unwrap(), vec![vec![0.0]]);
    }

    #[test]
    fn shift_one_doubles_the_set() {
        let s = SpectrumSet::digit(2, LevelSet::first(1), 1, 1).unwrap();
        assert_eq!(
            s.points(&Limits::DEFAULT).unwrap(),
            vec![vec![0.0], vec![2.0]]
        );
    }

    #[test]
    fn duplicates_rejected() {
        assert!(SpectrumSet::from_reals(&[1.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn power_scaling_stays_symbolic() {
        let s = SpectrumSet::digit(3, LevelSet::all(), 4, 0).unwrap();
        let t = s.scaled(9.0, &Limits::DEFAULT).unwrap();
        assert!(matches!(t, SpectrumSet::DigitSpectrum { shift: 2, .. }));
        assert_eq!(t.diameter(), 9.0 * s.diameter());
    }
}
