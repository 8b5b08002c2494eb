//! Dropout designs read off the incidence structure of AG(d,q) and PG(d,q).
//!
//! Each layer is a set of points of the geometry, relabelled `0..v` in
//! increasing point order; each block is a flat, cut into its intersections
//! with the layers. Where the underlying construction leaves a choice (the
//! starting flat, say) the first flat in enumeration order is taken.

use crate::design::{is_regular_twise, DropoutDesign, SuperBlock, TypeVector};
use crate::error::{Error, Result};
use crate::geometry::{find_spread, gaussian_coefficient, Flat, Space};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Parallel t-flats of AG(d,q) against hyperplanes containing none of them.
    AgHyperplane,
    /// The pencil of hyperplanes through a (d-2)-flat of PG(d,q), blocks are lines.
    PgPencilLines,
    /// The same pencil, blocks are planes meeting the axis in one point.
    PgPencilPlanes,
    /// A spread of PG(d,q) against all hyperplanes.
    PgSpread,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::AgHyperplane,
        Family::PgPencilLines,
        Family::PgPencilPlanes,
        Family::PgSpread,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AgHyperplane => "ag_hyperplane",
            Family::PgPencilLines => "pg_pencil_lines",
            Family::PgPencilPlanes => "pg_pencil_planes",
            Family::PgSpread => "pg_spread",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown construction family {s:?}")))
    }
}

/// Closed-form parameters of a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicted {
    pub v: usize,
    /// Possible sub-block sizes, ascending.
    pub k: Vec<usize>,
    pub lambda: u64,
    pub n: usize,
    pub b: usize,
}

#[derive(Clone, Debug)]
pub struct GeoDesign {
    pub family: Family,
    pub design: DropoutDesign,
    /// Types at which the design is regular.
    pub types: Vec<TypeVector>,
    pub predicted: Predicted,
    /// Global point numbers of each layer; local label = position.
    pub layer_points: Vec<Vec<u32>>,
}

/// Builds one of the catalog designs. `t` is ignored by the pencil families.
pub fn construct(family: Family, d: usize, q: u32, t: usize) -> Result<GeoDesign> {
    match family {
        Family::AgHyperplane => ag_hyperplane_design(d, q, t),
        Family::PgPencilLines => pg_pencil_lines_design(d, q),
        Family::PgPencilPlanes => pg_pencil_planes_design(d, q),
        Family::PgSpread => pg_spread_design(d, q, t),
    }
}

fn gauss1(n: u32, q: u32) -> u64 {
    gaussian_coefficient(n, 1, q as u64) as u64
}

/// Cuts every block flat along the layers. Each intersection must be non-empty.
fn layered(layers: &[Vec<u32>], blocks: &[Flat]) -> Result<DropoutDesign> {
    let sizes = layers.iter().map(Vec::len).collect();
    let supers = blocks
        .iter()
        .map(|blk| {
            SuperBlock::new(
                layers
                    .iter()
                    .map(|layer| {
                        layer
                            .iter()
                            .enumerate()
                            .filter(|(_, &p)| blk.contains(p))
                            .map(|(i, _)| i as u32)
                            .collect()
                    })
                    .collect(),
            )
        })
        .collect();
    DropoutDesign::new(sizes, supers)
}

/// The 2-design on a parallel class of t-flats of AG(d,q) whose blocks are
/// the hyperplanes that are unions of class members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDesign {
    pub v: usize,
    pub k: usize,
    pub blocks: Vec<Vec<u32>>,
    /// Counted pair concurrence.
    pub lambda: u64,
    pub predicted_lambda: u64,
}

fn check_ag_params(d: usize, t: usize) -> Result<()> {
    if d < 3 || t < 2 || t + 1 > d {
        return Err(Error::invalid(format!("need d >= 3 and 2 <= t <= d-1, got d={d}, t={t}")));
    }
    Ok(())
}

pub fn ag_class_design(d: usize, q: u32, t: usize) -> Result<ClassDesign> {
    check_ag_params(d, t)?;
    let space = Space::affine(d, q)?;
    let first = space.flats(t)?.into_iter().next().expect("t-flats exist");
    let class = space.parallel_class_of(&first)?;
    let mut blocks = Vec::new();
    for h in space.hyperplanes() {
        let inside: Vec<u32> = class
            .members
            .iter()
            .enumerate()
            .filter(|(_, m)| h.contains_all(&m.points))
            .map(|(i, _)| i as u32)
            .collect();
        if !inside.is_empty() {
            blocks.push(inside);
        }
    }
    let v = class.members.len();
    let k = blocks.first().map_or(0, Vec::len);
    if blocks.iter().any(|b| b.len() != k) {
        return Err(Error::VerificationFailed("hyperplane blocks differ in size".into()));
    }
    let lambda = match is_regular_twise(v, &blocks, 2)? {
        Some(l) => l[1],
        None => return Err(Error::VerificationFailed("class design is not pairwise balanced".into())),
    };
    Ok(ClassDesign { v, k, blocks, lambda, predicted_lambda: gauss1((d - t - 1) as u32, q) })
}

pub fn ag_hyperplane_design(d: usize, q: u32, t: usize) -> Result<GeoDesign> {
    check_ag_params(d, t)?;
    let space = Space::affine(d, q)?;
    let first = space.flats(t)?.into_iter().next().expect("t-flats exist");
    let class = space.parallel_class_of(&first)?;
    let layers: Vec<Vec<u32>> = class.members.iter().map(|m| m.points.clone()).collect();
    let blocks: Vec<Flat> = space
        .hyperplanes()
        .into_iter()
        .filter(|h| !class.members.iter().any(|m| h.contains_all(&m.points)))
        .collect();
    let design = layered(&layers, &blocks)?;
    let (qq, d, t) = (q as u64, d as u32, t as u32);
    let predicted = Predicted {
        v: qq.pow(t) as usize,
        k: vec![qq.pow(t - 1) as usize],
        lambda: (qq.pow(d - 2) - qq.pow(d - t - 1)) / (qq - 1),
        n: qq.pow(d - t) as usize,
        b: (qq * (qq.pow(d) - qq.pow(d - t)) / (qq - 1)) as usize,
    };
    Ok(GeoDesign {
        family: Family::AgHyperplane,
        design,
        types: vec![TypeVector::new(vec![2, 1])?, TypeVector::new(vec![1, 2])?],
        predicted,
        layer_points: layers,
    })
}

/// Axis `T` (first (d-2)-flat) and the layers `H_i \ T` of the hyperplane pencil through it.
fn pencil(space: &Space) -> Result<(Flat, Vec<Flat>, Vec<Vec<u32>>)> {
    let d = space.dimension();
    let axis = space.flats(d - 2)?.into_iter().next().expect("flats exist");
    let pencil = space.hyperplanes_through(&axis);
    let layers = pencil
        .iter()
        .map(|h| h.points.iter().copied().filter(|&p| !axis.contains(p)).collect())
        .collect();
    Ok((axis, pencil, layers))
}

pub fn pg_pencil_lines_design(d: usize, q: u32) -> Result<GeoDesign> {
    if d < 2 {
        return Err(Error::invalid(format!("need d >= 2, got {d}")));
    }
    let space = Space::projective(d, q)?;
    let (_, hyperplanes, layers) = pencil(&space)?;
    let blocks: Vec<Flat> = space
        .flats(1)?
        .into_iter()
        .filter(|l| !hyperplanes.iter().any(|h| h.contains_all(&l.points)))
        .collect();
    let design = layered(&layers, &blocks)?;
    let (qq, d32) = (q as u64, d as u32);
    let predicted = Predicted {
        v: qq.pow(d32 - 1) as usize,
        k: vec![1],
        lambda: 1,
        n: q as usize + 1,
        b: qq.pow(2 * (d32 - 1)) as usize,
    };
    Ok(GeoDesign {
        family: Family::PgPencilLines,
        design,
        types: vec![TypeVector::ones(2)],
        predicted,
        layer_points: layers,
    })
}

pub fn pg_pencil_planes_design(d: usize, q: u32) -> Result<GeoDesign> {
    if d < 3 {
        return Err(Error::invalid(format!("need d >= 3, got {d}")));
    }
    let space = Space::projective(d, q)?;
    let (axis, hyperplanes, layers) = pencil(&space)?;
    let blocks: Vec<Flat> = space
        .flats(2)?
        .into_iter()
        .filter(|p| p.points.iter().filter(|&&x| axis.contains(x)).count() == 1)
        .filter(|p| !hyperplanes.iter().any(|h| h.contains_all(&p.points)))
        .collect();
    let design = layered(&layers, &blocks)?;
    let (qq, d32) = (q as u64, d as u32);
    let predicted = Predicted {
        v: qq.pow(d32 - 1) as usize,
        k: vec![q as usize],
        lambda: 1,
        n: q as usize + 1,
        b: (qq.pow(2 * d32 - 4) * (qq.pow(d32 - 1) - 1) / (qq - 1)) as usize,
    };
    Ok(GeoDesign {
        family: Family::PgPencilPlanes,
        design,
        types: vec![TypeVector::new(vec![2, 1])?, TypeVector::new(vec![1, 2])?],
        predicted,
        layer_points: layers,
    })
}

/// Non-proper: hyperplanes containing a whole spread member keep the full layer.
pub fn pg_spread_design(d: usize, q: u32, t: usize) -> Result<GeoDesign> {
    if t == 0 {
        return Err(Error::invalid("spread members must be at least lines"));
    }
    if !(d + 1).is_multiple_of(t + 1) {
        return Err(Error::NoSpreadExists { d, t });
    }
    if d < 3 {
        return Err(Error::invalid(format!("need d >= 3, got {d}")));
    }
    let space = Space::projective(d, q)?;
    let spread = find_spread(&space, t)?;
    let layers: Vec<Vec<u32>> = spread.members.iter().map(|m| m.points.clone()).collect();
    let design = layered(&layers, &space.hyperplanes())?;
    let (d32, t32) = (d as u32, t as u32);
    let predicted = Predicted {
        v: gauss1(t32 + 1, q) as usize,
        k: vec![gauss1(t32, q) as usize, gauss1(t32 + 1, q) as usize],
        lambda: gauss1(d32 - 3, q),
        n: ((q as u64).pow(d32 + 1) - 1) as usize / ((q as u64).pow(t32 + 1) - 1) as usize,
        b: gauss1(d32 + 1, q) as usize,
    };
    Ok(GeoDesign {
        family: Family::PgSpread,
        design,
        types: vec![TypeVector::new(vec![2, 2])?],
        predicted,
        layer_points: layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_design_parameters() {
        let l = ag_class_design(4, 2, 2).unwrap();
        assert_eq!((l.v, l.k, l.lambda, l.predicted_lambda), (4, 2, 1, 1));
        let l = ag_class_design(4, 3, 2).unwrap();
        assert_eq!((l.v, l.k, l.lambda), (9, 3, 1));
        let l = ag_class_design(5, 2, 2).unwrap();
        assert_eq!((l.lambda, l.predicted_lambda), (3, 3));
    }

    #[test]
    fn hyperplane_blocks_meet_every_layer_evenly() {
        for (d, q, t) in [(3, 2, 2), (3, 3, 2), (4, 2, 2)] {
            let g = ag_hyperplane_design(d, q, t).unwrap();
            let k = g.predicted.k[0];
            assert!(g.design.blocks().iter().all(|b| b.subs().iter().all(|s| s.len() == k)));
            assert_eq!(g.design.num_blocks(), g.predicted.b);
        }
    }

    #[test]
    fn pencil_line_counts() {
        for d in 2..=4u32 {
            for q in [2u64, 3] {
                let g = |n, k| gaussian_coefficient(n, k, q);
                let lhs = g(d + 1, 2) - (q as u128 + 1) * (q as u128).pow(d - 2) * g(d - 1, 1) - g(d - 1, 2);
                assert_eq!(lhs, (q as u128).pow(2 * (d - 1)), "d={d} q={q}");
            }
        }
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn preconditions() {
        assert!(ag_hyperplane_design(2, 2, 1).is_err());
        assert!(pg_pencil_planes_design(2, 2).is_err());
        assert!(matches!(pg_spread_design(4, 2, 1), Err(Error::NoSpreadExists { .. })));
    }
}
