//! Index sets `I ⊂ {1, 2, 3, ...}` selecting which p-adic digit positions
//! of a digit measure are free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Description of a set of positive integers.
///
/// `Periodic` with modulus 1 is the whole of ℕ, modulus 2 with residue 0 the
/// even numbers. `OscillatingBlocks` alternates runs of included and
/// excluded levels so that the partial densities `#I_n / n` swing between
/// two targets (see [`LevelSet::oscillating`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelSet {
    Explicit {
        levels: Vec<u64>,
    },
    Periodic {
        modulus: u64,
        residues: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<u64>,
    },
    OscillatingBlocks {
        #[serde(with = "crate::decimal")]
        low: f64,
        #[serde(with = "crate::decimal")]
        high: f64,
        #[serde(with = "crate::decimal")]
        growth: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_level: Option<u64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: u64,
    },
}

fn is_zero(x: &u64) -> bool {
    *x == 0
}

impl LevelSet {
    pub fn all() -> Self {
        LevelSet::Periodic {
            modulus: 1,
            residues: vec![0],
            bound: None,
        }
    }

    pub fn evens() -> Self {
        LevelSet::Periodic {
            modulus: 2,
            residues: vec![0],
            bound: None,
        }
    }

    pub fn odds() -> Self {
        LevelSet::Periodic {
            modulus: 2,
            residues: vec![1],
            bound: None,
        }
    }

    pub fn empty() -> Self {
        LevelSet::Explicit { levels: Vec::new() }
    }

    /// `{1, ..., n}`.
    pub fn first(n: u64) -> Self {
        LevelSet::Periodic {
            modulus: 1,
            residues: vec![0],
            bound: Some(n),
        }
    }

    pub fn explicit(mut levels: Vec<u64>) -> Result<Self> {
        levels.sort_unstable();
        levels.dedup();
        let set = LevelSet::Explicit { levels };
        set.validate()?;
        Ok(set)
    }

    /// Oscillating block construction.
    ///
    /// Levels are decided in phases. An including phase adds levels to `I`
    /// until the partial density reaches `high`; an excluding phase skips
    /// levels until it drops to `low`. Either phase also stops once the
    /// number of decided levels has grown by the factor `growth` since the
    /// phase began, so every run is at most `(growth - 1)` times the prefix
    /// before it. When `low == high` the set is the Beatty sequence
    /// `{i : ⌊i·low⌋ > ⌊(i-1)·low⌋}`.
    pub fn oscillating(low: f64, high: f64, growth: f64) -> Result<Self> {
        let set = LevelSet::OscillatingBlocks {
            low,
            high,
            growth,
            max_level: None,
            offset: 0,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevelSet::Explicit { levels } => {
                if levels.first() == Some(&0) {
                    return Err(Error::MalformedSpec(
                        "levels must be positive integers".into(),
                    ));
                }
                if levels.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::MalformedSpec(
                        "explicit levels must be strictly increasing".into(),
                    ));
                }
            }
            LevelSet::Periodic {
                modulus, residues, ..
            } => {
                if *modulus == 0 {
                    return Err(Error::MalformedSpec("modulus must be at least 1".into()));
                }
                if residues.iter().any(|r| r >= modulus) {
                    return Err(Error::MalformedSpec(
                        "residues must be smaller than the modulus".into(),
                    ));
                }
                if residues.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::MalformedSpec(
                        "residues must be strictly increasing".into(),
                    ));
                }
            }
            LevelSet::OscillatingBlocks {
                low, high, growth, ..
            } => {
                let ok = low.is_finite()
                    && high.is_finite()
                    && growth.is_finite()
                    && 0.0 <= *low
                    && low <= high
                    && *high <= 1.0;
                if !ok {
                    return Err(Error::MalformedSpec(format!(
                        "oscillating densities need 0 <= low <= high <= 1, got low={low}, high={high}"
                    )));
                }
                if *growth <= 1.0 {
                    return Err(Error::MalformedSpec(format!(
                        "block growth factor must exceed 1, got {growth}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest level that can belong to the set, or `None` when the set is infinite.
    pub fn bound(&self) -> Option<u64> {
        match self {
            LevelSet::Explicit { levels } => Some(levels.last().copied().unwrap_or(0)),
            LevelSet::Periodic {
                residues, bound, ..
            } => {
                if residues.is_empty() {
                    Some(0)
                } else {
                    *bound
                }
            }
            LevelSet::OscillatingBlocks {
                low,
                high,
                max_level,
                ..
            } => {
                if *high == 0.0 && *low == 0.0 {
                    Some(0)
                } else {
                    *max_level
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.bound().is_some()
    }

    pub fn contains(&self, i: u64) -> bool {
        if i == 0 {
            return false;
        }
        match self {
            LevelSet::Explicit { levels } => levels.binary_search(&i).is_ok(),
            LevelSet::Periodic {
                modulus,
                residues,
                bound,
            } => bound.is_none_or(|b| i <= b) && residues.binary_search(&(i % modulus)).is_ok(),
            LevelSet::OscillatingBlocks {
                low,
                high,
                growth,
                max_level,
                offset,
            } => {
                if max_level.is_some_and(|m| i > m) {
                    return false;
                }
                let base = oscillating_membership(*low, *high, *growth, i + offset);
                base[(i + offset - 1) as usize]
            }
        }
    }

    /// `#I_n`, the number of elements not exceeding `n`.
    pub fn count_upto(&self, n: u64) -> u64 {
        match self {
            LevelSet::Explicit { levels } => levels.partition_point(|&l| l <= n) as u64,
            LevelSet::Periodic {
                modulus,
                residues,
                bound,
            } => {
                let top = bound.map_or(n, |b| b.min(n));
                residues
                    .iter()
                    .map(|&r| {
                        if r == 0 {
                            top / modulus
                        } else if r <= top {
                            (top - r) / modulus + 1
                        } else {
                            0
                        }
                    })
                    .sum()
            }
            LevelSet::OscillatingBlocks {
                low,
                high,
                growth,
                max_level,
                offset,
            } => {
                let top = max_level.map_or(n, |m| m.min(n));
                if top == 0 {
                    return 0;
                }
                let base = oscillating_membership(*low, *high, *growth, top + offset);
                base[*offset as usize..].iter().filter(|&&b| b).count() as u64
            }
        }
    }

    /// All elements `<= n`, strictly increasing.
    pub fn elements_upto(&self, n: u64) -> Vec<u64> {
        match self {
            LevelSet::Explicit { levels } => {
                levels.iter().copied().take_while(|&l| l <= n).collect()
            }
            LevelSet::Periodic { .. } => (1..=n).filter(|&i| self.contains(i)).collect(),
            LevelSet::OscillatingBlocks {
                low,
                high,
                growth,
                max_level,
                offset,
            } => {
                let top = max_level.map_or(n, |m| m.min(n));
                if top == 0 {
                    return Vec::new();
                }
                let base = oscillating_membership(*low, *high, *growth, top + offset);
                (1..=top)
                    .filter(|&i| base[(i + offset - 1) as usize])
                    .collect()
            }
        }
    }

    /// Exact partial densities `#I_k / k` for `k = 1..=n`.
    pub fn partial_densities(&self, n: u64) -> Vec<f64> {
        let members = self.elements_upto(n);
        let mut out = Vec::with_capacity(n as usize);
        let mut c = 0usize;
        for k in 1..=n {
            while c < members.len() && members[c] <= k {
                c += 1;
            }
            out.push(c as f64 / k as f64);
        }
        out
    }

    /// `{i - m : i ∈ I, i > m}`: the levels that remain free once the first
    /// `m` digits are fixed.
    pub fn shifted(&self, m: u64) -> LevelSet {
        if m == 0 {
            return self.clone();
        }
        match self {
            LevelSet::Explicit { levels } => LevelSet::Explicit {
                levels: levels.iter().filter(|&&l| l > m).map(|l| l - m).collect(),
            },
            LevelSet::Periodic {
                modulus,
                residues,
                bound,
            } => {
                if bound.is_some_and(|b| b <= m) {
                    return LevelSet::empty();
                }
                let mut residues: Vec<u64> = residues
                    .iter()
                    .map(|r| (r + modulus - m % modulus) % modulus)
                    .collect();
                residues.sort_unstable();
                LevelSet::Periodic {
                    modulus: *modulus,
                    residues,
                    bound: bound.map(|b| b - m),
                }
            }
            LevelSet::OscillatingBlocks {
                low,
                high,
                growth,
                max_level,
                offset,
            } => {
                if max_level.is_some_and(|b| b <= m) {
                    return LevelSet::empty();
                }
                LevelSet::OscillatingBlocks {
                    low: *low,
                    high: *high,
                    growth: *growth,
                    max_level: max_level.map(|b| b - m),
                    offset: offset + m,
                }
            }
        }
    }

    /// Analytic `liminf_n #I_n / n`.
    pub fn liminf_density(&self) -> f64 {
        self.density_limits().0
    }

    /// Analytic `limsup_n #I_n / n`.
    pub fn limsup_density(&self) -> f64 {
        self.density_limits().1
    }

    fn density_limits(&self) -> (f64, f64) {
        if self.is_finite() {
            return (0.0, 0.0);
        }
        match self {
            LevelSet::Explicit { .. } => (0.0, 0.0),
            LevelSet::Periodic {
                modulus, residues, ..
            } => {
                let d = residues.len() as f64 / *modulus as f64;
                (d, d)
            }
            LevelSet::OscillatingBlocks {
                low, high, growth, ..
            } => {
                if low == high {
                    (*low, *high)
                } else {
                    cycle_densities(*low, *high, *growth)
                }
            }
        }
    }
}

/// Limiting trough/peak densities of the phase dynamics.
///
/// An excluding phase maps a density `d` to `max(low, d / g)` and an
/// including phase maps it to `min(high, (d + g - 1) / g)`; the returned pair
/// is the attracting two-cycle of that map.
pub(crate) fn cycle_densities(low: f64, high: f64, g: f64) -> (f64, f64) {
    const SLACK: f64 = 1e-12;
    if high / g <= low + SLACK && (low + g - 1.0) / g >= high - SLACK {
        return (low, high);
    }
    let trough = high / g;
    if trough > low && (trough + g - 1.0) / g >= high - SLACK {
        return (trough, high);
    }
    let peak = (low + g - 1.0) / g;
    if peak < high && peak / g <= low + SLACK {
        return (low, peak);
    }
    (1.0 / (g + 1.0), g / (g + 1.0))
}

/// Membership of levels `1..=upto` in the un-shifted block construction.
pub(crate) fn oscillating_membership(low: f64, high: f64, growth: f64, upto: u64) -> Vec<bool> {
    let mut out = Vec::with_capacity(upto as usize);
    if low == high {
        for i in 1..=upto {
            let now = (i as f64 * low).floor();
            let before = ((i - 1) as f64 * low).floor();
            out.push(now > before);
        }
        return out;
    }
    let (mut n, mut c) = (0u64, 0u64);
    let mut including = true;
    while n < upto {
        let start = n;
        let cap = ((growth * start.max(1) as f64).ceil() as u64).max(start + 1);
        loop {
            if n > 0 {
                let d = c as f64 / n as f64;
                if (including && d >= high) || (!including && d <= low) {
                    break;
                }
            }
            if n >= cap || n >= upto {
                break;
            }
            out.push(including);
            n += 1;
            if including {
                c += 1;
            }
        }
        including = !including;
    }
    out
}

/// Levels at which a phase of the block construction ends, tagged `true`
/// for the end of an including phase (a local density peak).
pub(crate) fn oscillating_phase_ends(
    low: f64,
    high: f64,
    growth: f64,
    upto: u64,
) -> Vec<(u64, bool)> {
    let members = oscillating_membership(low, high, growth, upto);
    let mut ends = Vec::new();
    for i in 1..members.len() {
        if members[i] != members[i - 1] {
            ends.push((i as u64, members[i - 1]));
        }
    }
    ends
}
