//! Balanced sparse filters: difference families over Z_v, their cyclic
//! 0/1 matrices and the balance conditions on a family of such matrices.

use crate::combin::subsets;
use crate::error::{Error, Result};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::{self, Write};

/// Ordered differences `a - b mod v` for `a != b` in `block`.
pub fn delta(block: &[u32], v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(block.len() * block.len().saturating_sub(1));
    for &a in block {
        for &b in block {
            if a != b {
                out.push((a + v - b) % v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `block + j` for `j = 0..v`, each sorted.
pub fn develop(block: &[u32], v: u32) -> Vec<Vec<u32>> {
    (0..v)
        .map(|j| {
            let mut b: Vec<u32> = block.iter().map(|&x| (x + j) % v).collect();
            b.sort_unstable();
            b
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub k: usize,
    pub r: u64,
    pub lambda: u64,
}

/// The first balance condition a block family breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyViolation {
    Empty,
    OutOfRange { block: usize, point: u32 },
    BlockSize { block: usize, size: usize, expected: usize },
    Coverage { residue: u32, count: u64, expected: u64 },
    Differences { residue: u32, count: u64, expected: u64 },
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::Empty => write!(f, "no blocks"),
            FamilyViolation::OutOfRange { block, point } => write!(f, "block {block} holds {point}, outside Z_v"),
            FamilyViolation::BlockSize { block, size, expected } => {
                write!(f, "block {block} has size {size}, expected {expected}")
            }
            FamilyViolation::Coverage { residue, count, expected } => {
                write!(f, "residue {residue} covered {count} times, expected {expected}")
            }
            FamilyViolation::Differences { residue, count, expected } => {
                write!(f, "difference {residue} occurs {count} times, expected {expected}")
            }
        }
    }
}

/// A verified block family over Z_v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceFamily {
    pub v: u32,
    pub blocks: Vec<Vec<u32>>,
    pub params: FamilyParams,
}

/// Checks equal block sizes, uniform residue coverage and uniform differences.
pub fn verify_difference_family(v: u32, blocks: &[Vec<u32>]) -> std::result::Result<FamilyParams, FamilyViolation> {
    let first = blocks.first().ok_or(FamilyViolation::Empty)?;
    let k = first.len();
    for (i, b) in blocks.iter().enumerate() {
        if let Some(&point) = b.iter().find(|&&p| p >= v) {
            return Err(FamilyViolation::OutOfRange { block: i, point });
        }
        if b.len() != k {
            return Err(FamilyViolation::BlockSize { block: i, size: b.len(), expected: k });
        }
    }
    let mut cover = vec![0u64; v as usize];
    let mut diffs = vec![0u64; v as usize];
    for b in blocks {
        for &p in b {
            cover[p as usize] += 1;
        }
        for d in delta(b, v) {
            diffs[d as usize] += 1;
        }
    }
    let r = cover[0];
    if let Some(residue) = cover.iter().position(|&c| c != r) {
        return Err(FamilyViolation::Coverage { residue: residue as u32, count: cover[residue], expected: r });
    }
    let lambda = diffs.get(1).copied().unwrap_or(0);
    if let Some(residue) = (1..v as usize).find(|&x| diffs[x] != lambda) {
        return Err(FamilyViolation::Differences { residue: residue as u32, count: diffs[residue], expected: lambda });
    }
    Ok(FamilyParams { k, r, lambda })
}

/// Square 0/1 matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    v: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let v = rows.len();
        if rows.iter().any(|r| r.len() != v) {
            return Err(Error::DimensionMismatch("filter matrices must be square".into()));
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::invalid("filter entries must be 0 or 1"));
        }
        Ok(BinaryMatrix { v, data: rows.concat() })
    }

    pub fn size(&self) -> usize {
        self.v
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.v + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.v).map(<[u8]>::to_vec).collect()
    }

    /// `(PHQ)[i][j] = H[p[i]][q[j]]`.
    pub fn permuted(&self, p: &[usize], q: &[usize]) -> BinaryMatrix {
        let v = self.v;
        let data = (0..v * v).map(|x| self.get(p[x / v], q[x % v])).collect();
        BinaryMatrix { v, data }
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.v) {
            for &x in row {
                f.write_char(if x == 1 { '1' } else { '0' })?;
            }
            f.write_char('\n')?;
        }
        Ok(())
    }
}

/// Row `i` has ones at columns `(b + i) mod v` for `b` in `block`.
pub fn cyclic_matrix(block: &[u32], v: u32) -> Result<BinaryMatrix> {
    if let Some(&p) = block.iter().find(|&&p| p >= v) {
        return Err(Error::invalid(format!("{p} is not in Z_{v}")));
    }
    let n = v as usize;
    let mut data = vec![0u8; n * n];
    for i in 0..n {
        for &b in block {
            data[i * n + (b as usize + i) % n] = 1;
        }
    }
    Ok(BinaryMatrix { v: n, data })
}

/// The first filter balance condition a family breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterViolation {
    Empty,
    SizeMismatch { matrix: usize, size: usize, expected: usize },
    RowSum { matrix: usize, row: usize, sum: usize, expected: usize },
    ColumnSum { matrix: usize, column: usize, sum: usize, expected: usize },
    Coverage { row: usize, column: usize, count: u64, expected: u64 },
    ColumnGram { i: usize, j: usize, value: u64, expected: u64 },
    RowGram { i: usize, j: usize, value: u64, expected: u64 },
}

impl fmt::Display for FilterViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterViolation::Empty => write!(f, "no matrices"),
            FilterViolation::SizeMismatch { matrix, size, expected } => {
                write!(f, "matrix {matrix} is {size}x{size}, expected {expected}x{expected}")
            }
            FilterViolation::RowSum { matrix, row, sum, expected } => {
                write!(f, "condition (1): matrix {matrix} row {row} has {sum} ones, expected {expected}")
            }
            FilterViolation::ColumnSum { matrix, column, sum, expected } => {
                write!(f, "condition (1): matrix {matrix} column {column} has {sum} ones, expected {expected}")
            }
            FilterViolation::Coverage { row, column, count, expected } => {
                write!(f, "condition (2): entry ({row},{column}) is one in {count} matrices, expected {expected}")
            }
            FilterViolation::ColumnGram { i, j, value, expected } => {
                write!(f, "condition (3): column Gram sum at ({i},{j}) is {value}, expected {expected}")
            }
            FilterViolation::RowGram { i, j, value, expected } => {
                write!(f, "condition (3): row Gram sum at ({i},{j}) is {value}, expected {expected}")
            }
        }
    }
}

/// Checks constant line sums `k`, `ΣH = rJ` and `ΣHᵀH = ΣHHᵀ = λJ + (kb-λ)I`.
pub fn verify_filter_family(matrices: &[BinaryMatrix]) -> std::result::Result<FamilyParams, FilterViolation> {
    let first = matrices.first().ok_or(FilterViolation::Empty)?;
    let v = first.v;
    let b = matrices.len();
    for (m, h) in matrices.iter().enumerate() {
        if h.v != v {
            return Err(FilterViolation::SizeMismatch { matrix: m, size: h.v, expected: v });
        }
    }
    let k = (0..v).map(|j| first.get(0, j) as usize).sum::<usize>();
    for (m, h) in matrices.iter().enumerate() {
        for i in 0..v {
            let sum = (0..v).map(|j| h.get(i, j) as usize).sum();
            if sum != k {
                return Err(FilterViolation::RowSum { matrix: m, row: i, sum, expected: k });
            }
        }
        for i in 0..v {
            let sum = (0..v).map(|j| h.get(j, i) as usize).sum();
            if sum != k {
                return Err(FilterViolation::ColumnSum { matrix: m, column: i, sum, expected: k });
            }
        }
    }
    let cover = |i: usize, j: usize| matrices.iter().map(|h| h.get(i, j) as u64).sum::<u64>();
    let r = cover(0, 0);
    for i in 0..v {
        for j in 0..v {
            let count = cover(i, j);
            if count != r {
                return Err(FilterViolation::Coverage { row: i, column: j, count, expected: r });
            }
        }
    }
    let col_gram = |i: usize, j: usize| -> u64 {
        matrices.iter().map(|h| (0..v).map(|x| (h.get(x, i) & h.get(x, j)) as u64).sum::<u64>()).sum()
    };
    let row_gram = |i: usize, j: usize| -> u64 {
        matrices.iter().map(|h| (0..v).map(|x| (h.get(i, x) & h.get(j, x)) as u64).sum::<u64>()).sum()
    };
    let lambda = if v > 1 { col_gram(0, 1) } else { 0 };
    let diagonal = (k * b) as u64;
    for i in 0..v {
        for j in 0..v {
            let expected = if i == j { diagonal } else { lambda };
            let value = col_gram(i, j);
            if value != expected {
                return Err(FilterViolation::ColumnGram { i, j, value, expected });
            }
            let value = row_gram(i, j);
            if value != expected {
                return Err(FilterViolation::RowGram { i, j, value, expected });
            }
        }
    }
    Ok(FamilyParams { k, r, lambda })
}

/// Row and column permutations used by [`scramble`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scramble {
    pub seed: u64,
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
}

/// Applies one seeded pair of permutations to every matrix.
pub fn scramble(matrices: &[BinaryMatrix], seed: u64) -> (Vec<BinaryMatrix>, Scramble) {
    let v = matrices.first().map_or(0, BinaryMatrix::size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..v).collect();
    let mut columns: Vec<usize> = (0..v).collect();
    rows.shuffle(&mut rng);
    columns.shuffle(&mut rng);
    let out = matrices.iter().map(|h| h.permuted(&rows, &columns)).collect();
    (out, Scramble { seed, rows, columns })
}

/// The cyclic matrices of every block.
pub fn filter_matrices(v: u32, blocks: &[Vec<u32>]) -> Result<Vec<BinaryMatrix>> {
    blocks.iter().map(|b| cyclic_matrix(b, v)).collect()
}

/// Smallest translate of `block`, compared as sorted lists.
fn canonical_translate(block: &[u32], v: u32) -> Vec<u32> {
    develop(block, v).into_iter().min().expect("v >= 1")
}

/// Families developed from up to `r_max / k` base blocks (repeats allowed).
///
/// Base blocks are taken up to translation, represented by their smallest
/// translate; each is developed through all `v` translates, so `r` is
/// `k` times the number of base blocks. Families are listed by number of
/// base blocks, then lexicographically.
pub fn search_difference_families(v: u32, k: usize, r_max: u64) -> Result<Vec<DifferenceFamily>> {
    const BUDGET: u128 = 1_000_000;
    if !(1..=15).contains(&v) || k == 0 || k > v as usize {
        return Err(Error::invalid(format!("need 1 <= k <= v <= 15, got v={v}, k={k}")));
    }
    let mut bases: Vec<Vec<u32>> = subsets(v as usize, k)
        .into_iter()
        .filter(|s| canonical_translate(s, v) == *s)
        .collect();
    bases.sort();
    let max_bases = (r_max / k as u64) as usize;
    let mut needed: u128 = 0;
    for m in 1..=max_bases {
        // multisets of size m from the base list
        needed = needed.saturating_add(crate::combin::binomial((bases.len() + m - 1) as u64, m as u64));
    }
    if needed > BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: BUDGET });
    }
    let base_deltas: Vec<Vec<u64>> = bases
        .iter()
        .map(|b| {
            let mut d = vec![0u64; v as usize];
            for x in delta(b, v) {
                d[x as usize] += 1;
            }
            d
        })
        .collect();
    let mut out = Vec::new();
    for m in 1..=max_bases {
        for combo in (0..bases.len()).combinations_with_replacement(m) {
            let mut d = vec![0u64; v as usize];
            for &i in &combo {
                for (acc, x) in d.iter_mut().zip(&base_deltas[i]) {
                    *acc += x;
                }
            }
            if d[1..].iter().all_equal() {
                let blocks: Vec<Vec<u32>> = combo.iter().flat_map(|&i| develop(&bases[i], v)).collect();
                if let Ok(params) = verify_difference_family(v, &blocks) {
                    out.push(DifferenceFamily { v, blocks, params });
                }
            }
        }
    }
    Ok(out)
}

const FILTER_MAGIC: &str = "DFILTER 1";

pub fn write_dfilter(matrices: &[BinaryMatrix]) -> String {
    let v = matrices.first().map_or(0, BinaryMatrix::size);
    let mut out = format!("{FILTER_MAGIC}\nv {v}\nmatrices {}\n", matrices.len());
    for (i, m) in matrices.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write!(out, "{m}").unwrap();
    }
    out
}

pub fn read_dfilter(text: &str) -> Result<Vec<BinaryMatrix>> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let at = |i: usize| lines.get(i).copied().ok_or_else(|| Error::parse(i + 1, "unexpected end of input"));
    if at(0)?.trim() != FILTER_MAGIC {
        return Err(Error::parse(1, format!("expected `{FILTER_MAGIC}`")));
    }
    let number = |i: usize, key: &str| -> Result<usize> {
        let l = at(i)?;
        let rest = l
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| Error::parse(i + 1, format!("expected `{key} <count>`")))?;
        rest.trim().parse().map_err(|_| Error::parse(i + 1, format!("bad count {rest:?}")))
    };
    let v = number(1, "v")?;
    let b = number(2, "matrices")?;
    let mut idx = 3;
    let mut out = Vec::with_capacity(b);
    for m in 0..b {
        if m > 0 {
            if !at(idx)?.trim().is_empty() {
                return Err(Error::parse(idx + 1, "expected a blank line between matrices"));
            }
            idx += 1;
        }
        let mut rows = Vec::with_capacity(v);
        for _ in 0..v {
            let l = at(idx)?;
            if l.len() != v {
                return Err(Error::parse(idx + 1, format!("row has length {}, expected {v}", l.len())));
            }
            let row = l
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(Error::parse(idx + 1, format!("bad character {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            idx += 1;
        }
        out.push(BinaryMatrix::from_rows(&rows)?);
    }
    if let Some(extra) = lines[idx.min(lines.len())..].iter().position(|l| !l.trim().is_empty()) {
        return Err(Error::parse(idx + extra + 1, "unexpected content after the last matrix"));
    }
    Ok(out)
}
