use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this to a grid hyperplane (in units of the cell side)
/// are treated as lying on it.
pub const GRID_SNAP: f64 = 1e-9;

/// A half-open b-adic cube `∏_a [k_a·b^{-n}, (k_a+1)·b^{-n})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub base: u32,
    pub depth: u32,
    pub index: Vec<i128>,
}

impl Cell {
    pub fn new(base: u32, depth: u32, index: Vec<i128>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidArgument(format!(
                "cell base must be at least 2, got {base}"
            )));
        }
        if index.is_empty() {
            return Err(Error::InvalidArgument(
                "cell needs at least one coordinate".into(),
            ));
        }
        Ok(Cell { base, depth, index })
    }

    /// The cell `[0, 1)^dim`.
    pub fn unit(base: u32, dim: usize) -> Self {
        Cell {
            base,
            depth: 0,
            index: vec![0; dim],
        }
    }

    /// The depth-`depth` cell holding `point`.
    pub fn containing(point: &[f64], base: u32, depth: u32) -> Self {
        Cell {
            base,
            depth,
            index: point.iter().map(|&x| grid_floor(x, base, depth)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// `b^n` as an integer, when it fits.
    pub fn cells_per_axis(&self) -> Option<i128> {
        (self.base as i128).checked_pow(self.depth)
    }

    pub fn side(&self) -> f64 {
        (self.base as f64).powi(-(self.depth as i32))
    }

    /// Lower corner `v(D) = k·b^{-n}`.
    pub fn anchor(&self) -> Vec<f64> {
        let m = (self.base as f64).powi(self.depth as i32);
        self.index.iter().map(|&k| k as f64 / m).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let m = (self.base as f64).powi(self.depth as i32);
        self.index.iter().map(|&k| (k as f64 + 0.5) / m).collect()
    }

    pub fn is_origin_cell(&self) -> bool {
        self.index.iter().all(|&k| k == 0)
    }

    pub fn in_unit_cube(&self) -> bool {
        match self.cells_per_axis() {
            Some(m) => self.index.iter().all(|&k| 0 <= k && k < m),
            None => false,
        }
    }

    /// Half-open membership with grid snapping.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.index)
                .all(|(&xi, &k)| grid_floor(xi, self.base, self.depth) == k)
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.index).all(|(&xi, &k)| {
                let y = grid_position(xi, self.base, self.depth);
                y >= k as f64 - GRID_SNAP && y <= (k + 1) as f64 + GRID_SNAP
            })
    }

    /// Whether `x` lies on the topological boundary of the cell.
    pub fn on_boundary(&self, x: &[f64]) -> bool {
        self.contains_closed(x)
            && x.iter().zip(&self.index).any(|(&xi, &k)| {
                let y = grid_position(xi, self.base, self.depth);
                (y - k as f64).abs() <= GRID_SNAP || (y - (k + 1) as f64).abs() <= GRID_SNAP
            })
    }

    /// Splits a product-space cell into its first `d1` coordinates and the rest.
    pub fn split(&self, d1: usize) -> (Cell, Cell) {
        let (a, b) = self.index.split_at(d1);
        (
            Cell {
                base: self.base,
                depth: self.depth,
                index: a.to_vec(),
            },
            Cell {
                base: self.base,
                depth: self.depth,
                index: b.to_vec(),
            },
        )
    }

    /// The ancestor at depth `m <= depth`.
    pub fn ancestor(&self, m: u32) -> Cell {
        let q = (self.base as i128).pow(self.depth - m);
        Cell {
            base: self.base,
            depth: m,
            index: self.index.iter().map(|&k| k.div_euclid(q)).collect(),
        }
    }

    /// All cells of `[0,1)^dim` at the given depth, in lexicographic order.
    pub fn unit_partition(base: u32, depth: u32, dim: usize) -> Result<Vec<Cell>> {
        let per_axis = (base as u128).checked_pow(depth).ok_or_else(|| {
            Error::limit("max_atoms", u128::MAX, crate::Limits::DEFAULT.max_atoms)
        })?;
        let total = per_axis.checked_pow(dim as u32).ok_or_else(|| {
            Error::limit("max_atoms", u128::MAX, crate::Limits::DEFAULT.max_atoms)
        })?;
        crate::Limits::DEFAULT.check_atoms(total)?;
        let mut out = Vec::with_capacity(total as usize);
        for flat in 0..total {
            let mut rest = flat;
            let mut index = vec![0i128; dim];
            for a in (0..dim).rev() {
                index[a] = (rest % per_axis) as i128;
                rest /= per_axis;
            }
            out.push(Cell { base, depth, index });
        }
        Ok(out)
    }
}

/// `x·b^n`.
pub(crate) fn grid_position(x: f64, base: u32, depth: u32) -> f64 {
    x * (base as f64).powi(depth as i32)
}

/// Integer grid coordinate of `x`, snapping onto nearby grid lines.
pub(crate) fn grid_floor(x: f64, base: u32, depth: u32) -> i128 {
    let y = grid_position(x, base, depth);
    let r = y.round();
    if (y - r).abs() <= GRID_SNAP {
        r as i128
    } else {
        y.floor() as i128
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_membership() {
        let c = Cell::new(2, 1, vec![0]).unwrap();
        assert!(c.contains(&[0.0]));
        assert!(!c.contains(&[0.5]));
        assert!(c.contains_closed(&[0.5]));
        assert!(c.on_boundary(&[0.5]));
        assert!(!c.on_boundary(&[0.25]));
    }

    #[test]
    fn snapping_near_grid_lines() {
        let c = Cell::containing(&[0.625 + 1e-14], 2, 3);
        assert_eq!(c.index, vec![5]);
        let c = Cell::containing(&[0.625 - 1e-14], 2, 3);
        assert_eq!(c.index, vec![5]);
    }

    #[test]
    fn anchors_and_ancestors() {
        let c = Cell::new(3, 2, vec![7, -1]).unwrap();
        assert_eq!(c.anchor(), vec![7.0 / 9.0, -1.0 / 9.0]);
        assert_eq!(c.ancestor(1).index, vec![2, -1]);
        assert!(!c.in_unit_cube());
    }

    #[test]
    fn unit_partition_is_complete() {
        let cells = Cell::unit_partition(2, 2, 2).unwrap();
        assert_eq!(cells.len(), 16);
        assert_eq!(cells[1].index, vec![0, 1]);
        assert!(cells.iter().all(Cell::in_unit_cube));
    }
}
