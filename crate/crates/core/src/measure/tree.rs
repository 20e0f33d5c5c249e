use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for parent/children mass coherence.
pub const COHERENCE_TOL: f64 = 1e-12;

/// Cell masses of a measure on `[0,1)^dim` down to a fixed b-adic depth.
///
/// `levels[j]` holds the `b^{j·dim}` masses at depth `j`, flattened
/// row-major with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeRepr", into = "TreeRepr")]
pub struct DyadicTree {
    base: u32,
    dim: usize,
    levels: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    base: u32,
    dim: usize,
    depth: u32,
    #[serde(with = "crate::decimal::vec_vec")]
    masses: Vec<Vec<f64>>,
}

impl TryFrom<TreeRepr> for DyadicTree {
    type Error = Error;

    fn try_from(r: TreeRepr) -> Result<Self> {
        if r.masses.len() != r.depth as usize + 1 {
            return Err(Error::MalformedSpec(format!(
                "tree of depth {} needs {} mass levels, got {}",
                r.depth,
                r.depth + 1,
                r.masses.len()
            )));
        }
        DyadicTree::from_levels(r.base, r.dim, r.masses)
    }
}

impl From<DyadicTree> for TreeRepr {
    fn from(t: DyadicTree) -> Self {
        TreeRepr {
            base: t.base,
            dim: t.dim,
            depth: t.depth(),
            masses: t.levels,
        }
    }
}

fn level_len(base: u32, dim: usize, depth: u32) -> Result<usize> {
    (base as usize)
        .checked_pow(depth * dim as u32)
        .filter(|&n| n <= crate::Limits::DEFAULT.max_atoms)
        .ok_or_else(|| Error::limit("max_atoms", u128::MAX, crate::Limits::DEFAULT.max_atoms))
}

impl DyadicTree {
    /// Builds all coarser levels by summing children in index order.
    pub fn from_leaves(base: u32, dim: usize, depth: u32, leaves: Vec<f64>) -> Result<Self> {
        if base < 2 || dim == 0 {
            return Err(Error::MalformedSpec(
                "tree needs base >= 2 and dim >= 1".into(),
            ));
        }
        if leaves.len() != level_len(base, dim, depth)? {
            return Err(Error::MalformedSpec(format!(
                "depth-{depth} tree in dimension {dim} needs {} leaves, got {}",
                level_len(base, dim, depth)?,
                leaves.len()
            )));
        }
        if leaves.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::MalformedSpec(
                "cell masses must be finite and nonnegative".into(),
            ));
        }
        let mut levels = vec![leaves];
        for j in (0..depth).rev() {
            let child = levels.last().unwrap();
            let mut parent = vec![0.0; level_len(base, dim, j)?];
            for (flat, m) in child.iter().enumerate() {
                let k = decode(flat, base, dim, j + 1);
                let up: Vec<usize> = k.iter().map(|&c| c / base as usize).collect();
                parent[encode(&up, base, dim, j)] += m;
            }
            levels.push(parent);
        }
        levels.reverse();
        Ok(DyadicTree { base, dim, levels })
    }

    /// Accepts every level explicitly and validates coherence.
    pub fn from_levels(base: u32, dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        let depth = levels
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::MalformedSpec("tree has no levels".into()))?
            as u32;
        let rebuilt = DyadicTree::from_leaves(base, dim, depth, levels[depth as usize].clone())?;
        for (j, (given, summed)) in levels.iter().zip(&rebuilt.levels).enumerate() {
            if given.len() != summed.len() {
                return Err(Error::MalformedSpec(format!(
                    "tree level {j} has the wrong length"
                )));
            }
            for (a, b) in given.iter().zip(summed) {
                if (a - b).abs() > COHERENCE_TOL * a.abs().max(b.abs()) {
                    return Err(Error::MalformedSpec(format!(
                        "tree level {j}: cell mass {a} differs from the sum of its children {b}"
                    )));
                }
            }
        }
        Ok(DyadicTree { base, dim, levels })
    }

    /// Lebesgue measure on the unit cube.
    pub fn uniform(base: u32, dim: usize, depth: u32) -> Result<Self> {
        let n = level_len(base, dim, depth)?;
        DyadicTree::from_leaves(base, dim, depth, vec![1.0 / n as f64; n])
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn total_mass(&self) -> f64 {
        self.levels[0][0]
    }

    pub fn level(&self, j: u32) -> &[f64] {
        &self.levels[j as usize]
    }

    /// Mass of the depth-`j` cell with coordinates `k`; zero outside the unit cube.
    pub fn mass(&self, j: u32, k: &[i128]) -> f64 {
        let side = (self.base as i128).pow(j);
        if k.len() != self.dim || k.iter().any(|&c| c < 0 || c >= side) {
            return 0.0;
        }
        let k: Vec<usize> = k.iter().map(|&c| c as usize).collect();
        self.levels[j as usize][encode(&k, self.base, self.dim, j)]
    }

    /// Coordinates of the flat index at depth `j`.
    pub fn coords(&self, j: u32, flat: usize) -> Vec<usize> {
        decode(flat, self.base, self.dim, j)
    }

    /// The tree below the depth-`j` cell `k`, rescaled to the unit cube and to mass 1.
    pub fn subtree(&self, j: u32, k: &[i128]) -> Result<DyadicTree> {
        let m = self.mass(j, k);
        if m <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let depth = self.depth() - j;
        let sub_side = (self.base as usize).pow(depth);
        let mut leaves = vec![0.0; level_len(self.base, self.dim, depth)?];
        for (flat, slot) in leaves.iter_mut().enumerate() {
            let local = decode(flat, self.base, self.dim, depth);
            let global: Vec<i128> = local
                .iter()
                .zip(k)
                .map(|(&l, &kk)| kk * sub_side as i128 + l as i128)
                .collect();
            *slot = self.mass(self.depth(), &global) / m;
        }
        DyadicTree::from_leaves(self.base, self.dim, depth, leaves)
    }

    /// The same tree with every leaf outside the depth-`j` cell `k` set to zero.
    pub fn restricted(&self, j: u32, k: &[i128]) -> Result<DyadicTree> {
        let n = self.depth();
        let q = (self.base as usize).pow(n - j);
        let leaves = self.levels[n as usize]
            .iter()
            .enumerate()
            .map(|(flat, &m)| {
                let c = decode(flat, self.base, self.dim, n);
                let inside = c.iter().zip(k).all(|(&ci, &ki)| (ci / q) as i128 == ki);
                if inside {
                    m
                } else {
                    0.0
                }
            })
            .collect();
        DyadicTree::from_leaves(self.base, self.dim, n, leaves)
    }
}

fn encode(k: &[usize], base: u32, dim: usize, depth: u32) -> usize {
    let side = (base as usize).pow(depth);
    k.iter().take(dim).fold(0, |acc, &c| acc * side + c)
}

fn decode(mut flat: usize, base: u32, dim: usize, depth: u32) -> Vec<usize> {
    let side = (base as usize).pow(depth);
    let mut k = vec![0; dim];
    for a in (0..dim).rev() {
        k[a] = flat % side;
        flat /= side;
    }
    k
}
