//! Multi-split orthogonal arrays from generator matrices over GF(q).
//!
//! The rows of the array are `xG` for every message `x`, in lexicographic
//! order of `x`. Relabelling shifts column `j` of each part by `j·q`, so the
//! symbols of a part with `k` columns are `0..q·k`, split into `k` groups of
//! `q` consecutive labels.

use crate::combin::subsets;
use crate::design::{verify, DropoutDesign, SuperBlock, TypeVector, Verification, VerifyOptions};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElem, FqMatrix};
use crate::geometry::{find_cap, ProjPoint, Space, DEFAULT_CAP_BUDGET};
use itertools::Itertools;

/// Tuple checks allowed when brute-force checking an expanded array.
pub const OA_CHECK_BUDGET: u128 = 10_000_000;

/// A generator matrix split into column parts, with the type it must satisfy
/// on every run of `t` consecutive parts.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    field: Field,
    matrix: FqMatrix,
    partition: Vec<usize>,
    ty: TypeVector,
}

impl GeneratorMatrix {
    /// Checks the independence conditions exhaustively.
    pub fn new(field: Field, matrix: FqMatrix, partition: Vec<usize>, ty: TypeVector) -> Result<Self> {
        if partition.is_empty() || partition.contains(&0) {
            return Err(Error::InvalidGenerator("every part needs at least one column".into()));
        }
        if partition.iter().sum::<usize>() != matrix.cols() {
            return Err(Error::InvalidGenerator(format!(
                "partition {partition:?} does not cover {} columns",
                matrix.cols()
            )));
        }
        if ty.len() > partition.len() {
            return Err(Error::InvalidGenerator(format!(
                "type {ty} is longer than the {} parts",
                partition.len()
            )));
        }
        let g = GeneratorMatrix { field, matrix, partition, ty };
        g.check()?;
        Ok(g)
    }

    /// Parses rows separated by `;` with comma-separated field labels.
    pub fn parse_rows(field: &Field, text: &str) -> Result<FqMatrix> {
        let rows = text
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::InvalidGenerator(format!("bad entry {x:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FqMatrix::from_labels(field, &rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrix(&self) -> &FqMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn declared_type(&self) -> &TypeVector {
        &self.ty
    }

    /// `q^{s - Σd}`.
    pub fn index(&self) -> u64 {
        let s = self.matrix.rows() as u32;
        let sum: usize = self.ty.as_slice().iter().sum();
        (self.field.order() as u64).pow(s - sum as u32)
    }

    fn part_columns(&self, part: usize) -> Vec<usize> {
        let start: usize = self.partition[..part].iter().sum();
        (start..start + self.partition[part]).collect()
    }

    /// Column selections with `d_j` columns from part `start + j`.
    fn cross_selections(&self, start: usize) -> Vec<Vec<usize>> {
        self.ty
            .as_slice()
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                let cols = self.part_columns(start + j);
                subsets(cols.len(), d)
                    .into_iter()
                    .map(|s| s.into_iter().map(|i| cols[i as usize]).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .multi_cartesian_product()
            .map(|parts| parts.concat())
            .collect()
    }

    fn windows(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.partition.len() - self.ty.len()
    }

    fn check(&self) -> Result<()> {
        let sum: usize = self.ty.as_slice().iter().sum();
        if sum > self.matrix.rows() {
            return Err(Error::InvalidGenerator(format!(
                "type {} needs {sum} independent columns but there are only {} rows",
                self.ty,
                self.matrix.rows()
            )));
        }
        for start in self.windows() {
            for (j, &d) in self.ty.as_slice().iter().enumerate() {
                let cols = self.part_columns(start + j);
                if cols.len() < d {
                    return Err(Error::InvalidGenerator(format!(
                        "part {} has {} columns, fewer than {d}",
                        start + j + 1,
                        cols.len()
                    )));
                }
                for s in subsets(cols.len(), d) {
                    let pick: Vec<usize> = s.iter().map(|&i| cols[i as usize]).collect();
                    if !self.matrix.columns_independent(&self.field, &pick) {
                        return Err(Error::InvalidGenerator(format!(
                            "columns {pick:?} of part {} are dependent",
                            start + j + 1
                        )));
                    }
                }
            }
            for pick in self.cross_selections(start) {
                if !self.matrix.columns_independent(&self.field, &pick) {
                    return Err(Error::InvalidGenerator(format!("columns {pick:?} are dependent")));
                }
            }
        }
        Ok(())
    }
}

/// An expanded array, symbols as field labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSplitOA {
    pub q: u32,
    pub partition: Vec<usize>,
    pub ty: TypeVector,
    pub index: u64,
    pub rows: Vec<Vec<u32>>,
    /// False when the brute-force tuple check was skipped for size.
    pub verified: bool,
}

/// Every row `xG`, messages in lexicographic order (first coordinate most significant).
pub fn expand(g: &GeneratorMatrix) -> Result<MultiSplitOA> {
    let field = g.field();
    let q = field.order();
    let s = g.matrix.rows();
    let count = (q as u64).pow(s as u32);
    let rows: Vec<Vec<u32>> = (0..count)
        .map(|code| {
            let mut x = vec![FieldElem::ZERO; s];
            let mut c = code;
            for slot in x.iter_mut().rev() {
                *slot = field.elem((c % q as u64) as u32).unwrap();
                c /= q as u64;
            }
            g.matrix.left_mul(field, &x).into_iter().map(FieldElem::label).collect()
        })
        .collect();
    let mut oa = MultiSplitOA {
        q,
        partition: g.partition.clone(),
        ty: g.ty.clone(),
        index: g.index(),
        rows,
        verified: false,
    };
    let selections: Vec<Vec<usize>> = g.windows().flat_map(|w| g.cross_selections(w)).collect();
    let cost = count as u128 * selections.len() as u128;
    if cost <= OA_CHECK_BUDGET {
        check_tuples(&oa, &selections)?;
        oa.verified = true;
    }
    Ok(oa)
}

fn check_tuples(oa: &MultiSplitOA, selections: &[Vec<usize>]) -> Result<()> {
    let q = oa.q as usize;
    for pick in selections {
        let mut counts = vec![0u64; q.pow(pick.len() as u32)];
        for row in &oa.rows {
            let code = pick.iter().fold(0usize, |a, &c| a * q + row[c] as usize);
            counts[code] += 1;
        }
        if let Some(bad) = counts.iter().position(|&c| c != oa.index) {
            return Err(Error::VerificationFailed(format!(
                "columns {pick:?}: tuple #{bad} occurs {} times, expected {}",
                counts[bad], oa.index
            )));
        }
    }
    Ok(())
}

/// Layer sizes `q·k_i` and one super-block per row.
pub fn relabel(oa: &MultiSplitOA) -> (Vec<usize>, Vec<SuperBlock>) {
    let q = oa.q;
    let sizes = oa.partition.iter().map(|&k| k * q as usize).collect();
    let blocks = oa
        .rows
        .iter()
        .map(|row| {
            let mut col = 0;
            let subs = oa
                .partition
                .iter()
                .map(|&k| {
                    let sub = (0..k).map(|j| row[col + j] + j as u32 * q).collect();
                    col += k;
                    sub
                })
                .collect();
            SuperBlock::new(subs)
        })
        .collect();
    (sizes, blocks)
}

/// `copies` copies of `T_1 × ... × T_n`, where `T_i` holds the symbol groups
/// `{qj, ..., qj+q-1}` of part `i`.
pub fn supplementary_blocks(partition: &[usize], q: u32, copies: usize) -> Vec<SuperBlock> {
    let product: Vec<SuperBlock> = partition
        .iter()
        .map(|&k| (0..k as u32).map(|j| (j * q..(j + 1) * q).collect::<Vec<u32>>()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(SuperBlock::new)
        .collect();
    (0..copies).flat_map(|_| product.iter().cloned()).collect()
}

/// Number of product copies giving every window exactly `index` supplement
/// blocks per group selection.
fn supplement_copies(partition: &[usize], t: usize, index: u64) -> Result<usize> {
    let mut copies = None;
    for w in 0..=partition.len() - t {
        let outside: u64 = partition
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < w || *i >= w + t)
            .map(|(_, &k)| k as u64)
            .product();
        if !index.is_multiple_of(outside) {
            return Err(Error::invalid(format!(
                "index {index} is not a multiple of the {outside} product blocks outside window {}",
                w + 1
            )));
        }
        let c = index / outside;
        if copies.is_some_and(|x| x != c) {
            return Err(Error::invalid(
                "no single supplement multiplicity balances every window",
            ));
        }
        copies = Some(c);
    }
    Ok(copies.unwrap_or(0) as usize)
}

/// A design built from a generator, with its verification outcome.
#[derive(Clone, Debug)]
pub struct OaDesign {
    pub design: DropoutDesign,
    pub oa: MultiSplitOA,
    /// Concurrence number promised by the array index.
    pub rho: u64,
    pub supplement_copies: usize,
    /// `None` when verification would exceed the default budget.
    pub verification: Option<Verification>,
}

/// Expands, relabels and (for types beyond `1^t`) appends the supplement.
pub fn design_from_generator(g: &GeneratorMatrix, with_supplement: bool) -> Result<OaDesign> {
    let needs = g.ty.as_slice().iter().any(|&d| d >= 2);
    if needs && !with_supplement {
        return Err(Error::TypeNeedsSupplement(g.ty.as_slice().to_vec()));
    }
    let oa = expand(g)?;
    let (sizes, mut blocks) = relabel(&oa);
    let q = oa.q;
    let supplement_copies = if with_supplement {
        supplement_copies(&g.partition, g.ty.len(), oa.index)?
    } else {
        0
    };
    blocks.extend(supplementary_blocks(&g.partition, q, supplement_copies));
    let design = DropoutDesign::new(sizes, blocks)?;
    let verification = match verify(&design, &g.ty, VerifyOptions::default()) {
        Ok(v) => Some(v),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(OaDesign { design, rho: oa.index, oa, supplement_copies, verification })
}

/// Where the columns of a geometric generator come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorSource {
    /// Points of PG(d,q) in order; type (1,1).
    PgPoints,
    /// A cap of PG(d,q), d ∈ {2,3}; type (1,1,1).
    Cap,
    /// Points of a line of PG(2,q), then points off it; type (2,1).
    LineSplit,
    /// Two lines through a point of PG(2,q), the point removed; type (2,1).
    TwoLines,
}

impl std::str::FromStr for GeneratorSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pg_points" | "pg-points" => Ok(GeneratorSource::PgPoints),
            "cap" => Ok(GeneratorSource::Cap),
            "line_split" | "line-split" => Ok(GeneratorSource::LineSplit),
            "two_lines" | "two-lines" => Ok(GeneratorSource::TwoLines),
            _ => Err(Error::invalid(format!("unknown generator source {s:?}"))),
        }
    }
}

fn columns_matrix(vectors: &[Vec<FieldElem>]) -> Result<FqMatrix> {
    FqMatrix::from_columns(vectors)
}

/// A generator built from points of PG(d,q).
///
/// `d` is ignored for the plane sources. For [`GeneratorSource::TwoLines`]
/// the partition is `(q, q)` whatever is passed.
pub fn generator_from_geometry(
    source: GeneratorSource,
    d: usize,
    q: u32,
    partition: &[usize],
) -> Result<GeneratorMatrix> {
    fn infeasible<T>(msg: String) -> Result<T> {
        Err(Error::InfeasiblePartition(msg))
    }
    match source {
        GeneratorSource::PgPoints => {
            let space = Space::projective(d, q)?;
            if partition.len() != 2 || partition.iter().sum::<usize>() > space.num_points() {
                return infeasible(format!(
                    "need two parts totalling at most {} points, got {partition:?}",
                    space.num_points()
                ));
            }
            let cols: Vec<Vec<FieldElem>> = space.points()[..partition[0] + partition[1]].to_vec();
            GeneratorMatrix::new(space.field().clone(), columns_matrix(&cols)?, partition.to_vec(), TypeVector::ones(2))
        }
        GeneratorSource::Cap => {
            let space = Space::projective(d, q)?;
            let total: usize = partition.iter().sum();
            if partition.len() != 3 {
                return infeasible(format!("need three parts, got {partition:?}"));
            }
            let cap = find_cap(&space, Some(total), DEFAULT_CAP_BUDGET).or_else(|e| match e {
                Error::SearchFailed { .. } => infeasible(format!("no {total}-cap found in PG({d},{q})")),
                other => Err(other),
            })?;
            let cols: Vec<Vec<FieldElem>> = cap.iter().map(|p: &ProjPoint| p.vector().to_vec()).collect();
            GeneratorMatrix::new(space.field().clone(), columns_matrix(&cols)?, partition.to_vec(), TypeVector::ones(3))
        }
        GeneratorSource::LineSplit => {
            let space = Space::projective(2, q)?;
            let qq = q as usize;
            if partition.len() != 2 || partition[0] > qq + 1 || partition[1] > qq * qq || partition[0] < 2 {
                return infeasible(format!(
                    "need 2 <= k1 <= {} and k2 <= {}, got {partition:?}",
                    qq + 1,
                    qq * qq
                ));
            }
            let line = space.flats(1)?.into_iter().next().expect("the plane has lines");
            let on: Vec<Vec<FieldElem>> = line.points.iter().map(|&p| space.point(p).to_vec()).collect();
            let off: Vec<Vec<FieldElem>> = (0..space.num_points() as u32)
                .filter(|&p| !line.contains(p))
                .map(|p| space.point(p).to_vec())
                .collect();
            let mut cols = on[..partition[0]].to_vec();
            cols.extend_from_slice(&off[..partition[1]]);
            GeneratorMatrix::new(
                space.field().clone(),
                columns_matrix(&cols)?,
                partition.to_vec(),
                TypeVector::new(vec![2, 1])?,
            )
        }
        GeneratorSource::TwoLines => {
            let space = Space::projective(2, q)?;
            let p = 0u32;
            let mut through = space.flats(1)?.into_iter().filter(|l| l.contains(p));
            let (l1, l2) = (through.next().unwrap(), through.next().unwrap());
            let rest = |l: &crate::geometry::Flat| -> Vec<Vec<FieldElem>> {
                l.points.iter().filter(|&&x| x != p).map(|&x| space.point(x).to_vec()).collect()
            };
            let mut cols = rest(&l1);
            cols.extend(rest(&l2));
            let k = q as usize;
            GeneratorMatrix::new(
                space.field().clone(),
                columns_matrix(&cols)?,
                vec![k, k],
                TypeVector::new(vec![2, 1])?,
            )
        }
    }
}

/// Re-checks a generator's columns against another type of the same length.
pub fn with_type(g: &GeneratorMatrix, ty: TypeVector) -> Result<GeneratorMatrix> {
    GeneratorMatrix::new(g.field.clone(), g.matrix.clone(), g.partition.clone(), ty)
}
