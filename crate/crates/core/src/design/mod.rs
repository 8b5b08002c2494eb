//! Layered block designs and their algebra.
//!
//! A [`DropoutDesign`] has `n` layers of sizes `v_1..v_n`, with points in
//! each layer labelled `0..v_i` (labels are local to the layer), and a
//! multiset of super-blocks. A super-block holds one non-empty sorted
//! sub-block per layer.

mod format;
mod transform;
mod verify;

pub use format::{read_ddesign, read_dmask, write_ddesign, write_dmask};
pub use transform::{
    complement, delete_points, direct_product, extend, restrict, restricted_set,
    uniformity_report, Deletion, NonUniform, UniformLambda, UniformParams, Uniformity,
};
pub use verify::{
    concurrence_identity, count_containing, is_regular_twise, subtype_concurrence, verify,
    verify_type, ConcurrenceProfile, CounterExample, IdentityReport, IdentityWindow,
    SubTypeOutcome, Verification, VerifyMode, VerifyOptions, WindowProfile, DEFAULT_BUDGET,
};

use crate::error::{Error, Result};
use std::fmt;

/// One sub-block per layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperBlock {
    subs: Vec<Vec<u32>>,
}

impl SuperBlock {
    /// Sub-blocks are sorted on construction; validity against layer sizes
    /// is checked by [`DropoutDesign::new`].
    pub fn new(mut subs: Vec<Vec<u32>>) -> Self {
        for s in &mut subs {
            s.sort_unstable();
        }
        SuperBlock { subs }
    }

    pub fn sub(&self, layer: usize) -> &[u32] {
        &self.subs[layer]
    }

    pub fn subs(&self) -> &[Vec<u32>] {
        &self.subs
    }

    pub fn layers(&self) -> usize {
        self.subs.len()
    }

    pub fn contains(&self, layer: usize, point: u32) -> bool {
        self.subs[layer].binary_search(&point).is_ok()
    }
}

impl fmt::Display for SuperBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.subs.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            let pts: Vec<String> = s.iter().map(u32::to_string).collect();
            write!(f, "{}", pts.join(","))?;
        }
        write!(f, "}}")
    }
}

/// A window type `(d_1, ..., d_t)`, every entry at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeVector(Vec<usize>);

impl TypeVector {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() || entries.contains(&0) {
            return Err(Error::invalid(format!(
                "type {entries:?} must be non-empty with positive entries"
            )));
        }
        Ok(TypeVector(entries))
    }

    /// `(1, 1, ..., 1)` of length `t`.
    pub fn ones(t: usize) -> Self {
        TypeVector(vec![1; t.max(1)])
    }

    /// Parses `"2,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad type entry {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `(d_{k+1}, ..., d_t, d_1, ..., d_k)`.
    pub fn rotate_left(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        let k = k % v.len();
        v.rotate_left(k);
        TypeVector(v)
    }

    /// Every `g` with `0 <= g_j <= d_j` and `g != 0`, lexicographic.
    pub fn sub_types(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut g = vec![0usize; self.0.len()];
        loop {
            // odometer increment, last entry fastest
            let mut pos = g.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if g[pos] < self.0[pos] {
                    g[pos] += 1;
                    for x in &mut g[pos + 1..] {
                        *x = 0;
                    }
                    break;
                }
            }
            out.push(g.clone());
        }
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A layered design: layer sizes and a multiset of super-blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DropoutDesign {
    sizes: Vec<usize>,
    blocks: Vec<SuperBlock>,
}

impl DropoutDesign {
    pub fn new(sizes: Vec<usize>, blocks: Vec<SuperBlock>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidDesign("a design needs at least one layer".into()));
        }
        if let Some(i) = sizes.iter().position(|&v| v == 0) {
            return Err(Error::InvalidDesign(format!("layer {} is empty", i + 1)));
        }
        for (b, block) in blocks.iter().enumerate() {
            if block.layers() != sizes.len() {
                return Err(Error::InvalidDesign(format!(
                    "block {b} has {} sub-blocks, expected {}",
                    block.layers(),
                    sizes.len()
                )));
            }
            for (i, sub) in block.subs.iter().enumerate() {
                if sub.is_empty() {
                    return Err(Error::InvalidDesign(format!(
                        "block {b} has an empty sub-block in layer {}",
                        i + 1
                    )));
                }
                if sub.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidDesign(format!(
                        "block {b} repeats a point in layer {}",
                        i + 1
                    )));
                }
                if sub.last().is_some_and(|&p| p as usize >= sizes[i]) {
                    return Err(Error::InvalidDesign(format!(
                        "block {b} uses a point outside layer {} of size {}",
                        i + 1,
                        sizes[i]
                    )));
                }
            }
        }
        Ok(DropoutDesign { sizes, blocks })
    }

    /// Convenience constructor from nested point lists.
    pub fn from_lists(sizes: Vec<usize>, blocks: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        Self::new(sizes, blocks.into_iter().map(SuperBlock::new).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> usize {
        self.sizes.len()
    }

    pub fn blocks(&self) -> &[SuperBlock] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Blocks sorted, for multiset comparison.
    pub fn canonical_blocks(&self) -> Vec<SuperBlock> {
        let mut b = self.blocks.clone();
        b.sort();
        b
    }

    /// Same layer sizes and the same multiset of blocks.
    pub fn same_multiset(&self, other: &DropoutDesign) -> bool {
        self.sizes == other.sizes && self.canonical_blocks() == other.canonical_blocks()
    }

    /// First `(block, layer)` whose sub-block is the whole layer.
    pub fn improper_witness(&self) -> Option<(usize, usize)> {
        self.blocks.iter().enumerate().find_map(|(b, block)| {
            block
                .subs
                .iter()
                .enumerate()
                .find(|(i, s)| s.len() == self.sizes[*i])
                .map(|(i, _)| (b, i))
        })
    }

    /// No sub-block equals its whole layer.
    pub fn is_proper(&self) -> bool {
        self.improper_witness().is_none()
    }

    /// Distinct sub-block sizes per layer.
    pub fn sub_block_sizes(&self, layer: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.subs[layer].len()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}
