use serde::{Deserialize, Serialize};

use crate::error::{Result, SbiteError};

/// Partition of `P` coefficients into `J` consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(SbiteError::InvalidInput("partition needs at least one block".into()));
        }
        if let Some(j) = sizes.iter().position(|&p| p == 0) {
            return Err(SbiteError::InvalidInput(format!("block {j} has size zero")));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &p in &sizes {
            acc += p;
            offsets.push(acc);
        }
        Ok(Self { sizes, offsets })
    }

    /// `p` blocks of size one.
    pub fn unit(p: usize) -> Result<Self> {
        Self::new(vec![1; p])
    }

    /// `count` blocks of size `size`.
    pub fn uniform(size: usize, count: usize) -> Result<Self> {
        Self::new(vec![size; count])
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn size(&self, j: usize) -> usize {
        self.sizes[j]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    pub fn is_unit(&self) -> bool {
        self.sizes.iter().all(|&p| p == 1)
    }

    /// Block containing coordinate `p`.
    pub fn block_of(&self, p: usize) -> usize {
        match self.offsets.binary_search(&p) {
            Ok(j) => j,
            Err(j) => j - 1,
        }
    }
}
