use super::{Flat, GeometryKind, Space};
use crate::error::{Error, Result};
use crate::field::{find_irreducible, FieldElem};

/// A set of pairwise disjoint projective t-flats covering every point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spread {
    pub t: usize,
    pub members: Vec<Flat>,
}

impl Spread {
    /// Checks disjointness and coverage against the point count of `space`.
    pub fn is_partition_of(&self, space: &Space) -> bool {
        let mut seen = vec![false; space.num_points()];
        for m in &self.members {
            for &p in &m.points {
                if std::mem::replace(&mut seen[p as usize], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Desarguesian spread of t-flats of PG(d,q), built by field reduction.
///
/// GF(q)^(d+1) is cut into blocks of length t+1 and each block is made a
/// copy of GF(q^(t+1)) through the companion matrix of an irreducible
/// polynomial. The spread members are the one-dimensional GF(q^(t+1))
/// subspaces, taken in order of their first uncovered point.
pub fn find_spread(space: &Space, t: usize) -> Result<Spread> {
    if space.kind() != GeometryKind::Projective {
        return Err(Error::invalid("spreads are defined in PG(d,q)"));
    }
    let d = space.dimension();
    if t > d || !(d + 1).is_multiple_of(t + 1) {
        return Err(Error::NoSpreadExists { d, t });
    }
    let field = space.field();
    let m = t + 1;
    let poly = find_irreducible(field, m).expect("irreducible polynomials exist in every degree");
    // lower coefficients a_0..a_{m-1} of the monic polynomial
    let lower: Vec<FieldElem> = poly.coeffs()[..m].to_vec();
    let companion = |u: &[FieldElem]| -> Vec<FieldElem> {
        let top = u[m - 1];
        (0..m)
            .map(|i| {
                let carry = field.neg(field.mul(lower[i], top));
                if i == 0 {
                    carry
                } else {
                    field.add(u[i - 1], carry)
                }
            })
            .collect()
    };

    let mut covered = vec![false; space.num_points()];
    let mut members = Vec::new();
    for idx in 0..space.num_points() {
        if covered[idx] {
            continue;
        }
        let mut current = space.point(idx as u32).to_vec();
        let mut basis = Vec::with_capacity(m);
        for _ in 0..m {
            basis.push(current.clone());
            current = current.chunks(m).flat_map(&companion).collect();
        }
        let flat = space.projective_flat(basis);
        for &p in &flat.points {
            covered[p as usize] = true;
        }
        members.push(flat);
    }

    let spread = Spread { t, members };
    let q = space.q() as u64;
    let expected = (q.pow(d as u32 + 1) - 1) / (q.pow(m as u32) - 1);
    if spread.members.len() as u64 != expected
        || !spread.members.iter().all(|f| f.dim == t)
        || !spread.is_partition_of(space)
    {
        return Err(Error::VerificationFailed(format!(
            "field-reduction spread of PG({d},{q}) by {t}-flats is not a partition"
        )));
    }
    Ok(spread)
}
