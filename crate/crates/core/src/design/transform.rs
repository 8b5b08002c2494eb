//! Operations producing new designs from old ones.

use super::verify::{verify, Verification, VerifyOptions};
use super::{DropoutDesign, SuperBlock, TypeVector};
use crate::combin::binomial;
use crate::error::{Error, Result};
use itertools::Itertools;

/// Keeps only the layers at `indices` (0-based, strictly increasing).
pub fn restrict(design: &DropoutDesign, indices: &[usize]) -> Result<DropoutDesign> {
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("layer indices must be non-empty and strictly increasing"));
    }
    if indices.iter().any(|&i| i >= design.layers()) {
        return Err(Error::invalid(format!("layer index out of range 1..={}", design.layers())));
    }
    let sizes = indices.iter().map(|&i| design.sizes()[i]).collect();
    let blocks = design
        .blocks()
        .iter()
        .map(|b| SuperBlock::new(indices.iter().map(|&i| b.sub(i).to_vec()).collect()))
        .collect();
    DropoutDesign::new(sizes, blocks)
}

/// Sub-blocks at `target` of every block containing all of `selection`
/// (pairs of 0-based layer and point).
pub fn restricted_set(
    design: &DropoutDesign,
    selection: &[(usize, u32)],
    target: usize,
) -> Result<Vec<Vec<u32>>> {
    if target >= design.layers() {
        return Err(Error::invalid("target layer out of range"));
    }
    for &(layer, p) in selection {
        if layer >= design.layers() || p as usize >= design.sizes()[layer] {
            return Err(Error::invalid(format!("point {p} is not in layer {}", layer + 1)));
        }
        if layer == target {
            return Err(Error::invalid("selection may not use the target layer"));
        }
    }
    Ok(design
        .blocks()
        .iter()
        .filter(|b| selection.iter().all(|&(l, p)| b.contains(l, p)))
        .map(|b| b.sub(target).to_vec())
        .collect())
}

/// Replaces every sub-block by its complement in the layer.
pub fn complement(design: &DropoutDesign) -> Result<DropoutDesign> {
    if let Some((block, layer)) = design.improper_witness() {
        return Err(Error::NotProper { block, layer: layer + 1 });
    }
    let blocks = design
        .blocks()
        .iter()
        .map(|b| {
            SuperBlock::new(
                b.subs()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (0..design.sizes()[i] as u32).filter(|p| s.binary_search(p).is_err()).collect())
                    .collect(),
            )
        })
        .collect();
    DropoutDesign::new(design.sizes().to_vec(), blocks)
}

/// Result of deleting points: the smaller design plus, per layer, the
/// original label of each surviving point (new label = position).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub design: DropoutDesign,
    pub kept: Vec<Vec<u32>>,
}

/// Removes the points `removed` (pairs of 0-based layer and point) and
/// relabels survivors in order.
pub fn delete_points(design: &DropoutDesign, removed: &[(usize, u32)]) -> Result<Deletion> {
    let mut gone: Vec<Vec<bool>> = design.sizes().iter().map(|&v| vec![false; v]).collect();
    for &(layer, p) in removed {
        if layer >= design.layers() || p as usize >= design.sizes()[layer] {
            return Err(Error::invalid(format!("point {p} is not in layer {}", layer + 1)));
        }
        gone[layer][p as usize] = true;
    }
    for (block, b) in design.blocks().iter().enumerate() {
        for (i, s) in b.subs().iter().enumerate() {
            if s.iter().all(|&p| gone[i][p as usize]) {
                return Err(Error::SubBlockSwallowed { block, layer: i + 1 });
            }
        }
    }
    let kept: Vec<Vec<u32>> = gone
        .iter()
        .map(|g| (0..g.len() as u32).filter(|&p| !g[p as usize]).collect())
        .collect();
    if let Some(i) = kept.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("deleting every point of layer {}", i + 1)));
    }
    let relabel: Vec<Vec<Option<u32>>> = kept
        .iter()
        .zip(design.sizes())
        .map(|(k, &v)| {
            let mut m = vec![None; v];
            for (new, &old) in k.iter().enumerate() {
                m[old as usize] = Some(new as u32);
            }
            m
        })
        .collect();
    let blocks = design
        .blocks()
        .iter()
        .map(|b| {
            SuperBlock::new(
                b.subs()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.iter().filter_map(|&p| relabel[i][p as usize]).collect())
                    .collect(),
            )
        })
        .collect();
    let sizes = kept.iter().map(Vec::len).collect();
    Ok(Deletion { design: DropoutDesign::new(sizes, blocks)?, kept })
}

/// Repeats a uniform `t`-layer design cyclically out to `n` layers.
///
/// The design must verify at `ty` and at every rotation of it.
pub fn extend(design: &DropoutDesign, ty: &TypeVector, n: usize) -> Result<DropoutDesign> {
    let t = design.layers();
    if ty.len() != t {
        return Err(Error::invalid(format!("type has length {}, design has {t} layers", ty.len())));
    }
    if n < t {
        return Err(Error::invalid(format!("cannot extend {t} layers to {n}")));
    }
    if let Uniformity::NotUniform(w) = uniformity_report(design, None)? {
        return Err(Error::NotUniform(w.to_string()));
    }
    for shift in 0..t {
        let shifted = ty.rotate_left(shift);
        let verdict = verify(design, &shifted, VerifyOptions::default())?;
        if !verdict.is_verified() {
            return Err(Error::ShiftTypeMissing { shift: shifted.as_slice().to_vec() });
        }
    }
    let sizes = (0..n).map(|i| design.sizes()[i % t]).collect();
    let blocks = design
        .blocks()
        .iter()
        .map(|b| SuperBlock::new((0..n).map(|i| b.sub(i % t).to_vec()).collect()))
        .collect();
    DropoutDesign::new(sizes, blocks)
}

/// All concatenations of one block from each part, first part most significant.
pub fn direct_product(parts: &[DropoutDesign]) -> Result<DropoutDesign> {
    if parts.is_empty() {
        return Err(Error::invalid("direct product of nothing"));
    }
    let sizes = parts.iter().flat_map(|d| d.sizes().iter().copied()).collect();
    let blocks = parts
        .iter()
        .map(|d| d.blocks().iter())
        .multi_cartesian_product()
        .map(|combo| SuperBlock::new(combo.into_iter().flat_map(|b| b.subs().iter().cloned()).collect()))
        .collect();
    DropoutDesign::new(sizes, blocks)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformLambda {
    /// Counted by the verifier.
    pub counted: u64,
    /// `b ∏ C(k, d_i) / ∏ C(v, d_i)` as a reduced fraction.
    pub formula: (u128, u128),
}

impl UniformLambda {
    pub fn agrees(&self) -> bool {
        self.formula.1 == 1 && self.formula.0 == self.counted as u128
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformParams {
    pub v: usize,
    pub k: usize,
    pub b: usize,
    pub lambda: Option<UniformLambda>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonUniform {
    LayerSize { layer: usize, size: usize, expected: usize },
    SubBlockSize { block: usize, layer: usize, size: usize, expected: usize },
    NoBlocks,
}

impl std::fmt::Display for NonUniform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NonUniform::LayerSize { layer, size, expected } => {
                write!(f, "layer {} has {size} points, layer 1 has {expected}", layer + 1)
            }
            NonUniform::SubBlockSize { block, layer, size, expected } => write!(
                f,
                "block {block} has a sub-block of size {size} in layer {}, expected {expected}",
                layer + 1
            ),
            NonUniform::NoBlocks => write!(f, "design has no blocks"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniformity {
    Uniform(UniformParams),
    NotUniform(NonUniform),
}

/// Checks for equal layer sizes and equal sub-block sizes. When `ty` is
/// given and the design verifies at it, the single λ is compared with the
/// closed formula.
pub fn uniformity_report(design: &DropoutDesign, ty: Option<&TypeVector>) -> Result<Uniformity> {
    let v = design.sizes()[0];
    if let Some((layer, &size)) = design.sizes().iter().enumerate().find(|(_, &s)| s != v) {
        return Ok(Uniformity::NotUniform(NonUniform::LayerSize { layer, size, expected: v }));
    }
    let Some(first) = design.blocks().first() else {
        return Ok(Uniformity::NotUniform(NonUniform::NoBlocks));
    };
    let k = first.sub(0).len();
    for (block, b) in design.blocks().iter().enumerate() {
        if let Some((layer, s)) = b.subs().iter().enumerate().find(|(_, s)| s.len() != k) {
            return Ok(Uniformity::NotUniform(NonUniform::SubBlockSize {
                block,
                layer,
                size: s.len(),
                expected: k,
            }));
        }
    }
    let b = design.num_blocks();
    let lambda = match ty {
        None => None,
        Some(ty) => match verify(design, ty, VerifyOptions::default())? {
            Verification::Failed(_) => None,
            Verification::Verified(p) => {
                let lambdas = p.top_lambdas();
                let num = ty.as_slice().iter().fold(b as u128, |a, &d| a * binomial(k as u64, d as u64));
                let den = ty.as_slice().iter().fold(1u128, |a, &d| a * binomial(v as u64, d as u64));
                let g = gcd(num, den);
                Some(UniformLambda { counted: lambdas[0], formula: (num / g, den / g) })
            }
        },
    };
    Ok(Uniformity::Uniform(UniformParams { v, k, b, lambda }))
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}
