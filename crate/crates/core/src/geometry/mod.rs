//! Finite projective and affine geometries over GF(q).
//!
//! Points of PG(d,q) are normalized vectors of GF(q)^(d+1) (first non-zero
//! coordinate equal to one); points of AG(d,q) are the vectors of GF(q)^d.
//! Both are numbered in lexicographic order of their coordinates, first
//! coordinate most significant, and every flat carries the sorted list of
//! the point numbers it contains alongside its basis.

mod cap;
mod spread;

pub use cap::{find_cap, is_cap, known_cap_size, DEFAULT_CAP_BUDGET};
pub use spread::{find_spread, Spread};

use crate::combin::subsets;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElem, FqMatrix};

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn gaussian_coefficient(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // partial products are themselves Gaussian coefficients
        acc = acc * (q.pow(n - i) - 1) / (q.pow(i + 1) - 1);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Projective,
    Affine,
}

/// A normalized representative of a point of PG(d,q).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint(Vec<FieldElem>);

impl ProjPoint {
    /// Scales `v` so its first non-zero coordinate is one; `None` for zero.
    pub fn normalize(field: &Field, v: &[FieldElem]) -> Option<Self> {
        let lead = v.iter().copied().find(|x| !x.is_zero())?;
        let inv = field.inv(lead).unwrap();
        Some(ProjPoint(v.iter().map(|&x| field.mul(inv, x)).collect()))
    }

    pub fn vector(&self) -> &[FieldElem] {
        &self.0
    }
}

/// A projective or affine flat: basis, translation and explicit point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    pub kind: GeometryKind,
    /// Geometric dimension (0 for points, 1 for lines, ...).
    pub dim: usize,
    pub basis: Vec<Vec<FieldElem>>,
    /// Translation vector; all zero for projective flats.
    pub shift: Vec<FieldElem>,
    /// Sorted point numbers.
    pub points: Vec<u32>,
}

impl Flat {
    pub fn contains(&self, point: u32) -> bool {
        self.points.binary_search(&point).is_ok()
    }

    pub fn contains_all(&self, points: &[u32]) -> bool {
        points.iter().all(|&p| self.contains(p))
    }

    pub fn meets(&self, other: &Flat) -> bool {
        other.points.iter().any(|&p| self.contains(p))
    }
}

/// A set of pairwise disjoint parallel affine t-flats covering AG(d,q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelClass {
    pub t: usize,
    pub members: Vec<Flat>,
}

/// The point set of PG(d,q) or AG(d,q) with coordinate lookup.
#[derive(Clone, Debug)]
pub struct Space {
    kind: GeometryKind,
    d: usize,
    field: Field,
    points: Vec<Vec<FieldElem>>,
    /// vector code -> point number (`u32::MAX` for the zero vector)
    lookup: Vec<u32>,
}

impl Space {
    pub fn projective(d: usize, q: u32) -> Result<Self> {
        Self::new(GeometryKind::Projective, d, Field::new(q)?)
    }

    pub fn affine(d: usize, q: u32) -> Result<Self> {
        Self::new(GeometryKind::Affine, d, Field::new(q)?)
    }

    pub fn new(kind: GeometryKind, d: usize, field: Field) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("geometry dimension must be at least 1"));
        }
        let n = match kind {
            GeometryKind::Projective => d + 1,
            GeometryKind::Affine => d,
        };
        let q = field.order() as u64;
        let total = q
            .checked_pow(n as u32)
            .filter(|&t| t <= 1 << 22)
            .ok_or_else(|| Error::invalid(format!("GF({q})^{n} is too large to enumerate")))?;
        let mut points = Vec::new();
        let mut lookup = vec![u32::MAX; total as usize];
        match kind {
            GeometryKind::Affine => {
                for code in 0..total {
                    lookup[code as usize] = points.len() as u32;
                    points.push(decode(&field, n, code));
                }
            }
            GeometryKind::Projective => {
                for code in 1..total {
                    let v = decode(&field, n, code);
                    if v.iter().find(|x| !x.is_zero()) == Some(&FieldElem::ONE) {
                        points.push(v);
                    }
                }
                for code in 1..total {
                    let v = decode(&field, n, code);
                    let norm = ProjPoint::normalize(&field, &v).unwrap();
                    let idx = points.binary_search(&norm.0).unwrap();
                    lookup[code as usize] = idx as u32;
                }
            }
        }
        Ok(Space {
            kind,
            d,
            field,
            points,
            lookup,
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    /// Length of coordinate vectors.
    pub fn vector_len(&self) -> usize {
        match self.kind {
            GeometryKind::Projective => self.d + 1,
            GeometryKind::Affine => self.d,
        }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, idx: u32) -> &[FieldElem] {
        &self.points[idx as usize]
    }

    pub fn points(&self) -> &[Vec<FieldElem>] {
        &self.points
    }

    /// Point number of a coordinate vector (normalizing projective vectors).
    pub fn point_index(&self, v: &[FieldElem]) -> Option<u32> {
        if v.len() != self.vector_len() {
            return None;
        }
        let code = encode(&self.field, v);
        let idx = self.lookup[code as usize];
        (idx != u32::MAX).then_some(idx)
    }

    /// All flats of geometric dimension `t`, in a fixed deterministic order.
    pub fn flats(&self, t: usize) -> Result<Vec<Flat>> {
        let n = self.vector_len();
        match self.kind {
            GeometryKind::Projective => {
                if t > self.d {
                    return Err(Error::invalid(format!("no {t}-flats in PG({},q)", self.d)));
                }
                Ok(subspaces(&self.field, n, t + 1)
                    .into_iter()
                    .map(|basis| self.projective_flat(basis))
                    .collect())
            }
            GeometryKind::Affine => {
                if t > self.d {
                    return Err(Error::invalid(format!("no {t}-flats in AG({},q)", self.d)));
                }
                let mut out = Vec::new();
                for basis in subspaces(&self.field, n, t) {
                    out.extend(self.cosets(&basis));
                }
                Ok(out)
            }
        }
    }

    /// Hyperplanes (flats of dimension d-1).
    pub fn hyperplanes(&self) -> Vec<Flat> {
        self.flats(self.d - 1).expect("d >= 1")
    }

    /// Projective flat spanned by the given vectors.
    pub fn projective_flat(&self, basis: Vec<Vec<FieldElem>>) -> Flat {
        let span = span_vectors(&self.field, &basis, self.vector_len());
        let mut points: Vec<u32> = span.iter().filter_map(|v| self.point_index(v)).collect();
        points.sort_unstable();
        points.dedup();
        let rank = FqMatrix::from_columns(&basis).map_or(0, |m| m.rank(&self.field));
        Flat {
            kind: GeometryKind::Projective,
            dim: rank.saturating_sub(1),
            basis,
            shift: vec![FieldElem::ZERO; self.vector_len()],
            points,
        }
    }

    /// Affine flat `shift + span(basis)`.
    pub fn affine_flat(&self, basis: Vec<Vec<FieldElem>>, shift: Vec<FieldElem>) -> Flat {
        let span = span_vectors(&self.field, &basis, self.vector_len());
        let mut points: Vec<u32> = span
            .iter()
            .map(|w| {
                let v: Vec<FieldElem> = w
                    .iter()
                    .zip(&shift)
                    .map(|(&a, &b)| self.field.add(a, b))
                    .collect();
                self.point_index(&v).unwrap()
            })
            .collect();
        points.sort_unstable();
        points.dedup();
        let rank = FqMatrix::from_columns(&basis).map_or(0, |m| m.rank(&self.field));
        Flat {
            kind: GeometryKind::Affine,
            dim: rank,
            basis,
            shift,
            points,
        }
    }

    /// Every translate of the subspace spanned by `basis` (given in reduced
    /// echelon form), ordered by the translation vector.
    fn cosets(&self, basis: &[Vec<FieldElem>]) -> Vec<Flat> {
        let n = self.vector_len();
        let pivots: Vec<usize> = basis
            .iter()
            .map(|b| b.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let q = self.q() as u64;
        (0..q.pow(free.len() as u32))
            .map(|code| {
                let digits = decode(&self.field, free.len(), code);
                let mut shift = vec![FieldElem::ZERO; n];
                for (&pos, &x) in free.iter().zip(&digits) {
                    shift[pos] = x;
                }
                self.affine_flat(basis.to_vec(), shift)
            })
            .collect()
    }

    /// All hyperplanes containing the projective flat `flat`.
    pub fn hyperplanes_through(&self, flat: &Flat) -> Vec<Flat> {
        self.hyperplanes()
            .into_iter()
            .filter(|h| h.contains_all(&flat.points))
            .collect()
    }

    /// The parallel class of an affine flat: all of its translates.
    pub fn parallel_class_of(&self, flat: &Flat) -> Result<ParallelClass> {
        if self.kind != GeometryKind::Affine || flat.kind != GeometryKind::Affine {
            return Err(Error::invalid("parallel classes are defined in AG(d,q)"));
        }
        let basis = if flat.basis.is_empty() {
            Vec::new()
        } else {
            let m = FqMatrix::from_columns(&flat.basis)?;
            let (r, pivots) = transpose(&m).rref(&self.field);
            (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
        };
        Ok(ParallelClass {
            t: flat.dim,
            members: self.cosets(&basis),
        })
    }
}

/// Enumerate points of PG(d,q) or AG(d,q).
pub fn enumerate_points(kind: GeometryKind, d: usize, q: u32) -> Result<Vec<Vec<FieldElem>>> {
    Ok(Space::new(kind, d, Field::new(q)?)?.points)
}

/// Enumerate the t-flats of PG(d,q) or AG(d,q).
pub fn enumerate_flats(kind: GeometryKind, d: usize, q: u32, t: usize) -> Result<Vec<Flat>> {
    Space::new(kind, d, Field::new(q)?)?.flats(t)
}

/// Number of t-flats predicted by the Gaussian-coefficient formulas.
pub fn flat_count(kind: GeometryKind, d: u32, q: u64, t: u32) -> u128 {
    match kind {
        GeometryKind::Projective => gaussian_coefficient(d + 1, t + 1, q),
        GeometryKind::Affine => (q as u128).pow(d - t) * gaussian_coefficient(d, t, q),
    }
}

/// Number of points on a t-flat.
pub fn flat_size(kind: GeometryKind, t: u32, q: u64) -> u128 {
    match kind {
        GeometryKind::Projective => gaussian_coefficient(t + 1, 1, q),
        GeometryKind::Affine => (q as u128).pow(t),
    }
}

fn decode(field: &Field, n: usize, mut code: u64) -> Vec<FieldElem> {
    let q = field.order() as u64;
    let mut v = vec![FieldElem::ZERO; n];
    for slot in v.iter_mut().rev() {
        *slot = field.elem((code % q) as u32).unwrap();
        code /= q;
    }
    v
}

fn encode(field: &Field, v: &[FieldElem]) -> u64 {
    let q = field.order() as u64;
    v.iter().fold(0, |acc, x| acc * q + x.label() as u64)
}

fn transpose(m: &FqMatrix) -> FqMatrix {
    let mut t = FqMatrix::zeros(m.cols(), m.rows());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            t.set(j, i, m.get(i, j));
        }
    }
    t
}

/// All linear combinations of `basis` (including zero), length-`n` vectors.
pub(crate) fn span_vectors(field: &Field, basis: &[Vec<FieldElem>], n: usize) -> Vec<Vec<FieldElem>> {
    let q = field.order() as u64;
    let k = basis.len();
    (0..q.pow(k as u32))
        .map(|code| {
            let coef = decode(field, k, code);
            let mut v = vec![FieldElem::ZERO; n];
            for (c, b) in coef.iter().zip(basis) {
                if c.is_zero() {
                    continue;
                }
                for (slot, &x) in v.iter_mut().zip(b) {
                    *slot = field.add(*slot, field.mul(*c, x));
                }
            }
            v
        })
        .collect()
}

/// Every `k`-dimensional subspace of GF(q)^n, as the rows of its reduced
/// row echelon basis. Ordered by pivot set, then by the free entries.
pub(crate) fn subspaces(field: &Field, n: usize, k: usize) -> Vec<Vec<Vec<FieldElem>>> {
    let q = field.order() as u64;
    let mut out = Vec::new();
    for pivots in subsets(n, k) {
        let pivots: Vec<usize> = pivots.into_iter().map(|p| p as usize).collect();
        // free slots: (row, column) right of the row's pivot and not a pivot column
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        for code in 0..q.pow(slots.len() as u32) {
            let digits = decode(field, slots.len(), code);
            let mut rows = vec![vec![FieldElem::ZERO; n]; k];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = FieldElem::ONE;
            }
            for (&(r, c), &x) in slots.iter().zip(&digits) {
                rows[r][c] = x;
            }
            out.push(rows);
        }
    }
    out
}
