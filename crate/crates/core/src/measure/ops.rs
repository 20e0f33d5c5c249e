//! Cell queries: masses, boundary masses, restriction, rescaling and the
//! mass histograms behind partition entropy.

use std::collections::BTreeMap;

use super::{cell::grid_floor, Atom, Cell, DyadicTree, LevelSet, MeasureSpec};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Distinct positive cell masses of a partition with their multiplicities.
///
/// Multiplicities are stored as reals: digit measures at depth 200 have
/// `2^136` equal cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassHistogram {
    entries: Vec<(f64, f64)>,
}

impl MassHistogram {
    pub fn from_masses<I: IntoIterator<Item = f64>>(masses: I) -> Self {
        Self::from_entries(masses.into_iter().map(|m| (m, 1.0)))
    }

    pub fn from_entries<I: IntoIterator<Item = (f64, f64)>>(entries: I) -> Self {
        let mut map: BTreeMap<u64, f64> = BTreeMap::new();
        for (m, c) in entries {
            if m > 0.0 && c > 0.0 {
                *map.entry(m.to_bits()).or_insert(0.0) += c;
            }
        }
        MassHistogram {
            entries: map
                .into_iter()
                .map(|(b, c)| (f64::from_bits(b), c))
                .collect(),
        }
    }

    /// `(mass, multiplicity)` pairs in increasing mass order.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn cell_count(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(m, c)| m * c).sum()
    }

    /// `Σ_D -μ(D) log₂ μ(D)`.
    pub fn entropy_bits(&self) -> f64 {
        self.entries.iter().map(|(m, c)| -c * m * m.log2()).sum()
    }

    /// `∏_D μ(D)^{-μ(D)}`, multiplied out factor by factor.
    pub fn entropy_product(&self) -> f64 {
        self.entries
            .iter()
            .fold(1.0, |acc, (m, c)| acc * m.powf(-m).powf(*c))
    }

    fn scale(&self, f: f64) -> Self {
        Self::from_entries(self.entries.iter().map(|(m, c)| (m * f, *c)))
    }

    fn remove_one(&mut self, mass: f64) {
        if mass <= 0.0 {
            return;
        }
        if let Some(e) = self
            .entries
            .iter_mut()
            .find(|e| e.0.to_bits() == mass.to_bits())
        {
            e.1 -= 1.0;
        }
        self.entries.retain(|e| e.1 > 0.0);
    }

    fn merged(a: &Self, b: &Self) -> Self {
        Self::from_entries(a.entries.iter().chain(&b.entries).copied())
    }
}

const MAX_HISTOGRAM_ENTRIES: usize = 1 << 20;

/// `j` with `p^j == base`, if any.
fn power_of(base: u32, p: u32) -> Option<u32> {
    let mut acc = p as u64;
    let mut j = 1;
    while acc < base as u64 {
        acc *= p as u64;
        j += 1;
    }
    (acc == base as u64).then_some(j)
}

/// Where an affine image's cell lands in the base measure.
struct Preimage {
    cell: Cell,
    reflected: bool,
}

impl MeasureSpec {
    fn check_cell(&self, cell: &Cell) -> Result<()> {
        if cell.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cell.dim(),
            });
        }
        if cell.base < 2 {
            return Err(Error::InvalidArgument(
                "cell base must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// `μ(D)` for the half-open cell `D`.
    pub fn cell_mass(&self, cell: &Cell) -> Result<f64> {
        self.check_cell(cell)?;
        match self {
            MeasureSpec::Atomic { atoms, .. } => Ok(atoms
                .iter()
                .filter(|a| cell.contains(&a.point))
                .map(|a| a.weight)
                .sum()),
            MeasureSpec::Digit { p, levels } => match power_of(cell.base, *p) {
                Some(j) => Ok(digit_cell_mass(*p, levels, cell.depth * j, cell.index[0])),
                None => self.atomic_fallback(cell, |atoms| sum_inside(atoms, cell)),
            },
            MeasureSpec::DyadicTree(t) => {
                tree_base(t, cell)?;
                Ok(t.mass(cell.depth, &cell.index))
            }
            MeasureSpec::Product { left, right } => {
                let (a, b) = cell.split(left.dim());
                Ok(left.cell_mass(&a)? * right.cell_mass(&b)?)
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let (a, b) = cell.split(mu.dim());
                let mut m = 0.0;
                if b.is_origin_cell() {
                    m += mu.cell_mass(&a)?;
                }
                if a.is_origin_cell() {
                    m += nu.cell_mass(&b)?;
                }
                Ok(m * self.mixed_factor()?)
            }
            MeasureSpec::Affine { base, .. } => {
                if let Some(pre) = self.preimage(cell)? {
                    if !pre.reflected || base.boundary_mass(&pre.cell)? == 0.0 {
                        return base.cell_mass(&pre.cell);
                    }
                }
                self.atomic_fallback(cell, |atoms| sum_inside(atoms, cell))
            }
            MeasureSpec::Scaled { base, factor } => Ok(factor * base.cell_mass(cell)?),
        }
    }

    fn mixed_factor(&self) -> Result<f64> {
        match self {
            MeasureSpec::Mixed {
                mu,
                nu,
                normalize: true,
            } => Ok(1.0 / (mu.total_mass()? + nu.total_mass()?)),
            _ => Ok(1.0),
        }
    }

    /// Answers a query from the atom list, or explains why it cannot.
    fn atomic_fallback<T>(&self, cell: &Cell, f: impl FnOnce(&[Atom]) -> T) -> Result<T> {
        match self.atoms(&Limits::DEFAULT)? {
            Some(atoms) => Ok(f(&atoms)),
            None => Err(match self.natural_base() {
                Some(natural) if natural != cell.base => Error::BaseMismatch {
                    requested: cell.base,
                    natural,
                },
                _ => Error::Unsupported(format!(
                    "cell query at base {} depth {} on a non-atomic affine image that is not grid-aligned",
                    cell.base, cell.depth
                )),
            }),
        }
    }

    /// For `Affine`, the base-measure cell whose image is `cell`, when one exists.
    fn preimage(&self, cell: &Cell) -> Result<Option<Preimage>> {
        let MeasureSpec::Affine {
            base,
            translate,
            scale,
        } = self
        else {
            return Ok(None);
        };
        let b = base.natural_base().unwrap_or(cell.base);
        let len = scale.abs() * cell.side();
        let depth = -len.ln() / (b as f64).ln();
        let depth_r = depth.round();
        if depth_r < 0.0 || (depth - depth_r).abs() > 1e-9 {
            return Ok(None);
        }
        let depth = depth_r as u32;
        if (len * (b as f64).powi(depth as i32) - 1.0).abs() > 1e-12 {
            return Ok(None);
        }
        let h = cell.side();
        let reflected = *scale < 0.0;
        let mut index = Vec::with_capacity(cell.dim());
        for (&k, &v) in cell.index.iter().zip(translate) {
            let shift = v / h;
            if (shift - shift.round()).abs() > 1e-9 {
                return Ok(None);
            }
            let k = k - shift.round() as i128;
            index.push(if reflected { -(k + 1) } else { k });
        }
        Ok(Some(Preimage {
            cell: Cell {
                base: b,
                depth,
                index,
            },
            reflected,
        }))
    }

    /// Mass on the topological boundary of `cell`.
    ///
    /// Exact for atomic and digit measures; an upper bound for trees.
    pub fn boundary_mass(&self, cell: &Cell) -> Result<f64> {
        let (closed, open) = self.closed_open_mass(cell)?;
        Ok((closed - open).max(0.0))
    }

    /// Masses of the closed cell and of its interior.
    fn closed_open_mass(&self, cell: &Cell) -> Result<(f64, f64)> {
        self.check_cell(cell)?;
        match self {
            MeasureSpec::Atomic { atoms, .. } => Ok(closed_open_atoms(atoms, cell)),
            MeasureSpec::Digit { .. } if !self.is_finitely_atomic() => {
                let m = self.cell_mass(cell)?;
                Ok((m, m))
            }
            MeasureSpec::Digit { .. } => self.atomic_fallback(cell, |a| closed_open_atoms(a, cell)),
            MeasureSpec::DyadicTree(t) => tree_closed_open(t, cell),
            MeasureSpec::Product { left, right } => {
                let (a, b) = cell.split(left.dim());
                let (c1, o1) = left.closed_open_mass(&a)?;
                let (c2, o2) = right.closed_open_mass(&b)?;
                Ok((c1 * c2, o1 * o2))
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let (a, b) = cell.split(mu.dim());
                let (c1, o1) = mu.closed_open_mass(&a)?;
                let (c2, o2) = nu.closed_open_mass(&b)?;
                let za = vec![0.0; a.dim()];
                let zb = vec![0.0; b.dim()];
                let in_closed = |c: &Cell, z: &[f64]| c.contains_closed(z);
                let in_open = |c: &Cell, z: &[f64]| c.contains_closed(z) && !c.on_boundary(z);
                let f = self.mixed_factor()?;
                let closed =
                    c1 * in_closed(&b, &zb) as u8 as f64 + c2 * in_closed(&a, &za) as u8 as f64;
                let open = o1 * in_open(&b, &zb) as u8 as f64 + o2 * in_open(&a, &za) as u8 as f64;
                Ok((f * closed, f * open))
            }
            MeasureSpec::Affine { base, .. } => match self.preimage(cell)? {
                Some(pre) => base.closed_open_mass(&pre.cell),
                None => self.atomic_fallback(cell, |a| closed_open_atoms(a, cell)),
            },
            MeasureSpec::Scaled { base, factor } => {
                let (c, o) = base.closed_open_mass(cell)?;
                Ok((factor * c, factor * o))
            }
        }
    }

    fn is_finitely_atomic(&self) -> bool {
        match self {
            MeasureSpec::Atomic { .. } => true,
            MeasureSpec::Digit { levels, .. } => levels.is_finite(),
            MeasureSpec::DyadicTree(_) => false,
            MeasureSpec::Product { left, right } => {
                left.is_finitely_atomic() && right.is_finitely_atomic()
            }
            MeasureSpec::Mixed { mu, nu, .. } => mu.is_finitely_atomic() && nu.is_finitely_atomic(),
            MeasureSpec::Affine { base, .. } | MeasureSpec::Scaled { base, .. } => {
                base.is_finitely_atomic()
            }
        }
    }

    /// `μ_K = μ(· ∩ K)`.
    pub fn restrict(&self, cell: &Cell) -> Result<MeasureSpec> {
        if self.cell_mass(cell)? <= 0.0 {
            return Err(Error::ZeroMass);
        }
        self.restrict_unchecked(cell)
    }

    fn restrict_unchecked(&self, cell: &Cell) -> Result<MeasureSpec> {
        match self {
            MeasureSpec::Atomic { dim, atoms } => Ok(MeasureSpec::Atomic {
                dim: *dim,
                atoms: atoms
                    .iter()
                    .filter(|a| cell.contains(&a.point))
                    .cloned()
                    .collect(),
            }),
            MeasureSpec::Digit { p, levels } => match power_of(cell.base, *p) {
                Some(j) => {
                    let m = cell.depth * j;
                    let mass = digit_cell_mass(*p, levels, m, cell.index[0]);
                    let inner = MeasureSpec::Digit {
                        p: *p,
                        levels: levels.shifted(m as u64),
                    };
                    Ok(MeasureSpec::Scaled {
                        base: Box::new(MeasureSpec::Affine {
                            base: Box::new(inner),
                            translate: cell.anchor(),
                            scale: (*p as f64).powi(m as i32),
                        }),
                        factor: mass,
                    })
                }
                None => self.restrict_atoms(cell),
            },
            MeasureSpec::DyadicTree(t) => {
                tree_base(t, cell)?;
                Ok(MeasureSpec::DyadicTree(
                    t.restricted(cell.depth, &cell.index)?,
                ))
            }
            MeasureSpec::Product { left, right } => {
                let (a, b) = cell.split(left.dim());
                Ok(MeasureSpec::product(
                    left.restrict_unchecked(&a)?,
                    right.restrict_unchecked(&b)?,
                ))
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let (a, b) = cell.split(mu.dim());
                let mu_part = (b.is_origin_cell() && mu.cell_mass(&a)? > 0.0)
                    .then(|| mu.restrict_unchecked(&a))
                    .transpose()?;
                let nu_part = (a.is_origin_cell() && nu.cell_mass(&b)? > 0.0)
                    .then(|| nu.restrict_unchecked(&b))
                    .transpose()?;
                let joined = match (mu_part, nu_part) {
                    (Some(m), Some(n)) => MeasureSpec::mixed(m, n),
                    (Some(m), None) => MeasureSpec::product(m, MeasureSpec::dirac_origin(nu.dim())),
                    (None, Some(n)) => MeasureSpec::product(MeasureSpec::dirac_origin(mu.dim()), n),
                    (None, None) => return Err(Error::ZeroMass),
                };
                let f = self.mixed_factor()?;
                Ok(if f == 1.0 { joined } else { joined.scaled(f) })
            }
            MeasureSpec::Affine {
                base,
                translate,
                scale,
            } => match self.preimage(cell)? {
                Some(pre) if !pre.reflected || base.boundary_mass(&pre.cell)? == 0.0 => {
                    Ok(MeasureSpec::Affine {
                        base: Box::new(base.restrict_unchecked(&pre.cell)?),
                        translate: translate.clone(),
                        scale: *scale,
                    })
                }
                _ => self.restrict_atoms(cell),
            },
            MeasureSpec::Scaled { base, factor } => Ok(MeasureSpec::Scaled {
                base: Box::new(base.restrict_unchecked(cell)?),
                factor: *factor,
            }),
        }
    }

    fn restrict_atoms(&self, cell: &Cell) -> Result<MeasureSpec> {
        let atoms = self.atomic_fallback(cell, |atoms| {
            atoms
                .iter()
                .filter(|a| cell.contains(&a.point))
                .cloned()
                .collect::<Vec<_>>()
        })?;
        Ok(MeasureSpec::Atomic {
            dim: self.dim(),
            atoms,
        })
    }

    /// `μ_D^□`: the restriction to `D`, moved onto the unit cube by the
    /// affine map sending `D` to `[0,1)^d`, divided by `μ(D)`.
    pub fn normalize_rescale(&self, cell: &Cell) -> Result<MeasureSpec> {
        let mass = self.cell_mass(cell)?;
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let anchor = cell.anchor();
        let stretch = (cell.base as f64).powi(cell.depth as i32);
        match self {
            MeasureSpec::Atomic { dim, atoms } => Ok(MeasureSpec::Atomic {
                dim: *dim,
                atoms: atoms
                    .iter()
                    .filter(|a| cell.contains(&a.point))
                    .map(|a| {
                        let point = a
                            .point
                            .iter()
                            .zip(&anchor)
                            .map(|(x, v)| (x - v) * stretch)
                            .collect();
                        Atom::new(point, a.weight / mass)
                    })
                    .collect(),
            }),
            MeasureSpec::Digit { p, levels } if power_of(cell.base, *p).is_some() => {
                let j = power_of(cell.base, *p).unwrap();
                Ok(MeasureSpec::Digit {
                    p: *p,
                    levels: levels.shifted((cell.depth * j) as u64),
                })
            }
            MeasureSpec::DyadicTree(t) => {
                tree_base(t, cell)?;
                Ok(MeasureSpec::DyadicTree(t.subtree(cell.depth, &cell.index)?))
            }
            MeasureSpec::Product { left, right } => {
                let (a, b) = cell.split(left.dim());
                Ok(MeasureSpec::product(
                    left.normalize_rescale(&a)?,
                    right.normalize_rescale(&b)?,
                ))
            }
            _ => {
                let restricted = self.restrict_unchecked(cell)?;
                Ok(MeasureSpec::Scaled {
                    base: Box::new(MeasureSpec::Affine {
                        base: Box::new(restricted),
                        translate: anchor.iter().map(|v| -v * stretch).collect(),
                        scale: 1.0 / stretch,
                    }),
                    factor: 1.0 / mass,
                })
            }
        }
    }

    /// Positive cell masses of the depth-`depth` base-`base` partition.
    pub fn mass_histogram(&self, base: u32, depth: u32) -> Result<MassHistogram> {
        match self {
            MeasureSpec::Atomic { atoms, .. } => Ok(MassHistogram::from_masses(
                group_atoms(atoms, base, depth).into_values(),
            )),
            MeasureSpec::Digit { p, levels } => match power_of(base, *p) {
                Some(j) => {
                    let free = levels.count_upto((depth * j) as u64);
                    let mass = (0..free).fold(1.0, |m, _| m / *p as f64);
                    Ok(MassHistogram::from_entries([(
                        mass,
                        (*p as f64).powi(free as i32),
                    )]))
                }
                None => self.histogram_fallback(base, depth),
            },
            MeasureSpec::DyadicTree(t) => {
                tree_base(t, &Cell::new(base, depth, vec![0; t.dim()])?)?;
                Ok(MassHistogram::from_masses(t.level(depth).iter().copied()))
            }
            MeasureSpec::Product { left, right } => {
                let a = left.mass_histogram(base, depth)?;
                let b = right.mass_histogram(base, depth)?;
                if a.entries().len() * b.entries().len() > MAX_HISTOGRAM_ENTRIES {
                    return Err(Error::limit(
                        "max_atoms",
                        a.entries().len() * b.entries().len(),
                        MAX_HISTOGRAM_ENTRIES,
                    ));
                }
                Ok(MassHistogram::from_entries(a.entries().iter().flat_map(
                    |&(m1, c1)| b.entries().iter().map(move |&(m2, c2)| (m1 * m2, c1 * c2)),
                )))
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let mut hm = mu.mass_histogram(base, depth)?;
                let mut hn = nu.mass_histogram(base, depth)?;
                let m0 = mu.cell_mass(&Cell::new(base, depth, vec![0; mu.dim()])?)?;
                let n0 = nu.cell_mass(&Cell::new(base, depth, vec![0; nu.dim()])?)?;
                hm.remove_one(m0);
                hn.remove_one(n0);
                let joined = MassHistogram::merged(&hm, &hn);
                let joined = MassHistogram::merged(&joined, &MassHistogram::from_masses([m0 + n0]));
                Ok(joined.scale(self.mixed_factor()?))
            }
            MeasureSpec::Scaled {
                base: inner,
                factor,
            } => Ok(inner.mass_histogram(base, depth)?.scale(*factor)),
            MeasureSpec::Affine { base: inner, .. } => {
                // Aligned, orientation-preserving images map the partition onto a partition.
                let probe = Cell::new(base, depth, vec![0; self.dim()])?;
                match self.preimage(&probe)? {
                    Some(pre) if !pre.reflected => {
                        inner.mass_histogram(pre.cell.base, pre.cell.depth)
                    }
                    _ => self.histogram_fallback(base, depth),
                }
            }
        }
    }

    fn histogram_fallback(&self, base: u32, depth: u32) -> Result<MassHistogram> {
        let probe = Cell::new(base, depth, vec![0; self.dim()])?;
        self.atomic_fallback(&probe, |atoms| {
            MassHistogram::from_masses(group_atoms(atoms, base, depth).into_values())
        })
    }

    /// Every cell of the partition with positive mass, in lexicographic order.
    pub fn positive_cells(
        &self,
        base: u32,
        depth: u32,
        limits: &Limits,
    ) -> Result<Vec<(Cell, f64)>> {
        let to_cells = |map: BTreeMap<Vec<i128>, f64>| -> Vec<(Cell, f64)> {
            map.into_iter()
                .filter(|e| e.1 > 0.0)
                .map(|(index, m)| (Cell { base, depth, index }, m))
                .collect()
        };
        match self {
            MeasureSpec::Atomic { atoms, .. } => Ok(to_cells(group_atoms(atoms, base, depth))),
            MeasureSpec::Digit { p, levels } => match power_of(base, *p) {
                Some(j) => {
                    let m = depth * j;
                    let free = levels.elements_upto(m as u64);
                    limits.check_atoms(
                        (*p as u128)
                            .checked_pow(free.len() as u32)
                            .unwrap_or(u128::MAX),
                    )?;
                    let mass = (0..free.len()).fold(1.0, |acc, _| acc / *p as f64);
                    let mut idx: Vec<i128> = vec![0];
                    for &i in &free {
                        let place = (*p as i128).pow(m - i as u32);
                        idx = idx
                            .iter()
                            .flat_map(|&k| (0..*p as i128).map(move |b| k + b * place))
                            .collect();
                    }
                    idx.sort_unstable();
                    Ok(idx
                        .into_iter()
                        .map(|k| {
                            (
                                Cell {
                                    base,
                                    depth,
                                    index: vec![k],
                                },
                                mass,
                            )
                        })
                        .collect())
                }
                None => {
                    let probe = Cell::new(base, depth, vec![0])?;
                    let atoms = self.atomic_fallback(&probe, |a| a.to_vec())?;
                    Ok(to_cells(group_atoms(&atoms, base, depth)))
                }
            },
            MeasureSpec::DyadicTree(t) => {
                tree_base(t, &Cell::new(base, depth, vec![0; t.dim()])?)?;
                Ok(t.level(depth)
                    .iter()
                    .enumerate()
                    .filter(|e| *e.1 > 0.0)
                    .map(|(flat, &m)| {
                        let index = t
                            .coords(depth, flat)
                            .into_iter()
                            .map(|c| c as i128)
                            .collect();
                        (Cell { base, depth, index }, m)
                    })
                    .collect())
            }
            MeasureSpec::Product { left, right } => {
                let a = left.positive_cells(base, depth, limits)?;
                let b = right.positive_cells(base, depth, limits)?;
                limits.check_atoms(a.len() as u128 * b.len() as u128)?;
                let mut out = Vec::with_capacity(a.len() * b.len());
                for (ca, ma) in &a {
                    for (cb, mb) in &b {
                        let mut index = ca.index.clone();
                        index.extend_from_slice(&cb.index);
                        out.push((Cell { base, depth, index }, ma * mb));
                    }
                }
                Ok(out)
            }
            MeasureSpec::Mixed { mu, nu, .. } => {
                let f = self.mixed_factor()?;
                let mut map: BTreeMap<Vec<i128>, f64> = BTreeMap::new();
                for (c, m) in mu.positive_cells(base, depth, limits)? {
                    let mut index = c.index;
                    index.extend(std::iter::repeat_n(0, nu.dim()));
                    *map.entry(index).or_insert(0.0) += m;
                }
                for (c, m) in nu.positive_cells(base, depth, limits)? {
                    let mut index = vec![0; mu.dim()];
                    index.extend(c.index);
                    *map.entry(index).or_insert(0.0) += m;
                }
                Ok(to_cells(map.into_iter().map(|(k, m)| (k, m * f)).collect()))
            }
            MeasureSpec::Scaled {
                base: inner,
                factor,
            } => Ok(inner
                .positive_cells(base, depth, limits)?
                .into_iter()
                .map(|(c, m)| (c, m * factor))
                .filter(|e| e.1 > 0.0)
                .collect()),
            MeasureSpec::Affine { .. } => {
                let probe = Cell::new(base, depth, vec![0; self.dim()])?;
                let atoms = self.atomic_fallback(&probe, |a| a.to_vec())?;
                Ok(to_cells(group_atoms(&atoms, base, depth)))
            }
        }
    }
}

/// `ν_I` of the depth-`m` p-adic cell `k`.
fn digit_cell_mass(p: u32, levels: &LevelSet, m: u32, k: i128) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if let Some(side) = (p as i128).checked_pow(m) {
        if k >= side {
            return 0.0;
        }
    }
    let free = levels.elements_upto(m as u64);
    let mut mass = 1.0;
    let mut rest = k;
    let mut next_free = free.len();
    for i in (1..=m as u64).rev() {
        let digit = rest % p as i128;
        rest /= p as i128;
        if next_free > 0 && free[next_free - 1] == i {
            next_free -= 1;
            mass /= p as f64;
        } else if digit != 0 {
            return 0.0;
        }
    }
    mass
}

fn tree_base(t: &DyadicTree, cell: &Cell) -> Result<()> {
    if cell.base != t.base() {
        return Err(Error::BaseMismatch {
            requested: cell.base,
            natural: t.base(),
        });
    }
    if cell.depth > t.depth() {
        return Err(Error::DepthExceeded {
            requested: cell.depth,
            available: t.depth(),
        });
    }
    Ok(())
}

/// Closed-cell upper bound and interior lower bound from the leaves.
fn tree_closed_open(t: &DyadicTree, cell: &Cell) -> Result<(f64, f64)> {
    if cell.base != t.base() {
        return Err(Error::BaseMismatch {
            requested: cell.base,
            natural: t.base(),
        });
    }
    let n = t.depth();
    let (lo, hi): (Vec<i128>, Vec<i128>) = if cell.depth <= n {
        let q = (t.base() as i128).pow(n - cell.depth);
        cell.index.iter().map(|&k| (k * q, (k + 1) * q - 1)).unzip()
    } else {
        let anc = cell.ancestor(n);
        anc.index.iter().map(|&k| (k, k)).unzip()
    };
    let (mut closed, mut open) = (0.0, 0.0);
    for (flat, &m) in t.level(n).iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let c = t.coords(n, flat);
        let near = c
            .iter()
            .zip(lo.iter().zip(&hi))
            .all(|(&ci, (&l, &h))| l - 1 <= ci as i128 && ci as i128 <= h + 1);
        if !near {
            continue;
        }
        closed += m;
        let inner = cell.depth <= n
            && c.iter()
                .zip(lo.iter().zip(&hi))
                .all(|(&ci, (&l, &h))| l < ci as i128 && (ci as i128) < h);
        if inner {
            open += m;
        }
    }
    Ok((closed, open))
}

fn closed_open_atoms(atoms: &[Atom], cell: &Cell) -> (f64, f64) {
    let (mut closed, mut open) = (0.0, 0.0);
    for a in atoms {
        if cell.contains_closed(&a.point) {
            closed += a.weight;
            if !cell.on_boundary(&a.point) {
                open += a.weight;
            }
        }
    }
    (closed, open)
}

fn sum_inside(atoms: &[Atom], cell: &Cell) -> f64 {
    atoms
        .iter()
        .filter(|a| cell.contains(&a.point))
        .map(|a| a.weight)
        .sum()
}

fn group_atoms(atoms: &[Atom], base: u32, depth: u32) -> BTreeMap<Vec<i128>, f64> {
    let mut map: BTreeMap<Vec<i128>, f64> = BTreeMap::new();
    for a in atoms {
        let key = a
            .point
            .iter()
            .map(|&x| grid_floor(x, base, depth))
            .collect();
        *map.entry(key).or_insert(0.0) += a.weight;
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(base: u32, depth: u32, k: i128) -> Cell {
        Cell::new(base, depth, vec![k]).unwrap()
    }

    #[test]
    fn digit_cell_masses() {
        let nu = MeasureSpec::digit(2, LevelSet::first(3)).unwrap();
        assert_eq!(nu.cell_mass(&cell(2, 1, 0)).unwrap(), 0.5);
        let nu = MeasureSpec::digit(3, LevelSet::explicit(vec![2]).unwrap()).unwrap();
        assert_eq!(nu.cell_mass(&cell(3, 1, 0)).unwrap(), 1.0);
        assert_eq!(nu.cell_mass(&cell(3, 2, 1)).unwrap(), 1.0 / 3.0);
        assert_eq!(nu.cell_mass(&cell(3, 2, 3)).unwrap(), 0.0);
    }

    #[test]
    fn digit_in_power_base() {
        let leb = MeasureSpec::lebesgue();
        assert_eq!(leb.cell_mass(&cell(4, 2, 5)).unwrap(), 1.0 / 16.0);
        assert!(matches!(
            leb.cell_mass(&cell(3, 1, 0)),
            Err(Error::BaseMismatch {
                requested: 3,
                natural: 2
            })
        ));
    }

    #[test]
    fn finite_digit_in_foreign_base_atomizes() {
        let nu = MeasureSpec::digit(2, LevelSet::first(2)).unwrap();
        assert_eq!(nu.cell_mass(&cell(3, 1, 0)).unwrap(), 0.5);
    }

    #[test]
    fn dirac_half_open() {
        let d = MeasureSpec::dirac_origin(1);
        assert_eq!(d.cell_mass(&cell(2, 1, 0)).unwrap(), 1.0);
        assert_eq!(d.boundary_mass(&cell(2, 0, 0)).unwrap(), 1.0);
    }

    #[test]
    fn boundary_masses() {
        assert_eq!(
            MeasureSpec::lebesgue()
                .boundary_mass(&cell(2, 3, 4))
                .unwrap(),
            0.0
        );
        let nu = MeasureSpec::digit(2, LevelSet::first(1)).unwrap();
        assert_eq!(nu.boundary_mass(&cell(2, 1, 1)).unwrap(), 0.5);
    }

    #[test]
    fn restrict_digit_to_right_half() {
        let nu = MeasureSpec::digit(2, LevelSet::explicit(vec![1, 3]).unwrap()).unwrap();
        let r = nu.restrict(&cell(2, 1, 1)).unwrap();
        let mut atoms = r.atoms(&Limits::DEFAULT).unwrap().unwrap();
        atoms.sort_by(|a, b| a.point[0].total_cmp(&b.point[0]));
        assert_eq!(
            atoms,
            vec![Atom::new(vec![0.5], 0.25), Atom::new(vec![0.625], 0.25)]
        );
    }

    #[test]
    fn restrict_lebesgue_tree() {
        let t = MeasureSpec::DyadicTree(DyadicTree::uniform(2, 1, 3).unwrap());
        let r = t.restrict(&cell(2, 1, 0)).unwrap();
        assert_eq!(r.total_mass().unwrap(), 0.5);
    }

    #[test]
    fn zero_mass_cells_rejected() {
        let d = MeasureSpec::dirac_origin(1);
        assert_eq!(d.restrict(&cell(2, 1, 1)).unwrap_err(), Error::ZeroMass);
        assert_eq!(
            d.normalize_rescale(&cell(2, 1, 1)).unwrap_err(),
            Error::ZeroMass
        );
    }

    #[test]
    fn rescaled_left_endpoint_atom_is_origin() {
        let d = MeasureSpec::dirac(vec![0.75]);
        let r = d.normalize_rescale(&cell(2, 2, 3)).unwrap();
        assert_eq!(r, MeasureSpec::dirac(vec![0.0]));
    }

    #[test]
    fn affine_cell_mass_aligned_and_reflected() {
        let leb = MeasureSpec::lebesgue();
        let shifted = leb.affine_image(vec![1.0], 1.0).unwrap();
        assert_eq!(shifted.cell_mass(&cell(2, 2, 5)).unwrap(), 0.25);
        assert_eq!(shifted.cell_mass(&cell(2, 2, 1)).unwrap(), 0.0);
        let flipped = leb.affine_image(vec![0.0], -1.0).unwrap();
        assert_eq!(flipped.cell_mass(&cell(2, 1, -1)).unwrap(), 0.5);
        let halved = leb.affine_image(vec![0.0], 2.0).unwrap();
        assert_eq!(halved.cell_mass(&cell(2, 2, 1)).unwrap(), 0.5);
    }

    #[test]
    fn mixed_cells_merge_origin() {
        let rho = MeasureSpec::mixed(MeasureSpec::dirac_origin(1), MeasureSpec::dirac_origin(1));
        let origin = Cell::new(2, 3, vec![0, 0]).unwrap();
        assert_eq!(rho.cell_mass(&origin).unwrap(), 2.0);
        let h = rho.mass_histogram(2, 3).unwrap();
        assert_eq!(h.entries(), &[(2.0, 1.0)]);
    }

    #[test]
    fn histogram_matches_positive_cells() {
        let nu = MeasureSpec::digit(3, LevelSet::evens()).unwrap();
        let rho = MeasureSpec::Mixed {
            mu: Box::new(nu.clone()),
            nu: Box::new(MeasureSpec::lebesgue()),
            normalize: true,
        };
        let h = rho.mass_histogram(3, 4);
        assert!(h.is_err(), "mixed bases cannot share a partition");
        let rho = MeasureSpec::Mixed {
            mu: Box::new(nu.clone()),
            nu: Box::new(nu),
            normalize: true,
        };
        let h = rho.mass_histogram(3, 4).unwrap();
        let cells = rho.positive_cells(3, 4, &Limits::DEFAULT).unwrap();
        let direct = MassHistogram::from_masses(cells.iter().map(|c| c.1));
        assert_eq!(h, direct);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }
}
