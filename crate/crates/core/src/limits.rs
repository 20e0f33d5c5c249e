use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named resource ceilings. Operations that would exceed one fail with
/// [`Error::LimitExceeded`] instead of truncating silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_gram: usize,
    pub max_depth: u32,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        max_atoms: 1 << 20,
        max_gram: 4096,
        max_depth: 64,
    };

    pub(crate) fn check_atoms(&self, n: u128) -> Result<()> {
        if n > self.max_atoms as u128 {
            return Err(Error::limit("max_atoms", n, self.max_atoms));
        }
        Ok(())
    }

    pub(crate) fn check_gram(&self, n: usize) -> Result<()> {
        if n > self.max_gram {
            return Err(Error::limit("max_gram", n, self.max_gram));
        }
        Ok(())
    }

    pub(crate) fn check_depth(&self, n: u32) -> Result<()> {
        if n > self.max_depth {
            return Err(Error::limit("max_depth", n, self.max_depth));
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self::DEFAULT
    }
}
