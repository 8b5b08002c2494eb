use super::{GeometryKind, ProjPoint, Space};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FqMatrix};

/// Node budget for the backtracking cap search.
pub const DEFAULT_CAP_BUDGET: u64 = 1_000_000;

/// True iff no three of the points are collinear (checked on every triple).
pub fn is_cap(space: &Space, points: &[ProjPoint]) -> bool {
    let field = space.field();
    let n = points.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let cols = [
                    points[a].vector().to_vec(),
                    points[b].vector().to_vec(),
                    points[c].vector().to_vec(),
                ];
                if FqMatrix::from_columns(&cols).unwrap().rank(field) < 3 {
                    return false;
                }
            }
        }
    }
    true
}

/// Largest cap size this module knows how to produce in PG(d,q), d ∈ {2,3}.
pub fn known_cap_size(d: usize, q: u32) -> Option<usize> {
    let q = q as usize;
    match d {
        2 if q % 2 == 1 => Some(q + 1),
        2 => Some(q + 2),
        3 if q == 2 => Some(8),
        3 => Some(q * q + 1),
        _ => None,
    }
}

/// A cap of PG(d,q) for d ∈ {2,3}.
///
/// Without a goal the known maximal size is returned: the conic
/// `{(1,s,s²)} ∪ {(0,0,1)}` in the plane (plus its nucleus `(0,1,0)` when q
/// is even) and an elliptic quadric in solid space. Goals beyond the
/// algebraic construction fall back to backtracking limited to `budget`
/// nodes. Every result is checked on all triples before it is returned.
pub fn find_cap(space: &Space, size_goal: Option<usize>, budget: u64) -> Result<Vec<ProjPoint>> {
    if space.kind() != GeometryKind::Projective {
        return Err(Error::invalid("caps are searched in PG(d,q)"));
    }
    let d = space.dimension();
    let known = known_cap_size(d, space.q())
        .ok_or_else(|| Error::invalid(format!("caps are supported in PG(2,q) and PG(3,q), not PG({d},q)")))?;
    let goal = size_goal.unwrap_or(known);
    let constructed = algebraic_cap(space);
    let cap = if goal <= constructed.len() {
        constructed[..goal].to_vec()
    } else {
        search_cap(space, goal, budget)?
    };
    if !is_cap(space, &cap) {
        return Err(Error::VerificationFailed("three collinear points in cap".into()));
    }
    Ok(cap)
}

fn algebraic_cap(space: &Space) -> Vec<ProjPoint> {
    let field = space.field();
    let q = field.order();
    let zero = FieldElem::ZERO;
    let one = FieldElem::ONE;
    let mut pts: Vec<Vec<FieldElem>> = Vec::new();
    if space.dimension() == 2 {
        for s in field.elements() {
            pts.push(vec![one, s, field.mul(s, s)]);
        }
        pts.push(vec![zero, zero, one]);
        if q.is_multiple_of(2) {
            pts.push(vec![zero, one, zero]);
        }
    } else {
        // x0*x1 + x2^2 + b*x2*x3 + c*x3^2 = 0 with an anisotropic binary form
        let (b, c) = field
            .elements()
            .flat_map(|b| field.elements().map(move |c| (b, c)))
            .find(|&(b, c)| {
                field.elements().all(|t| {
                    let v = field.add(field.add(field.mul(t, t), field.mul(b, t)), c);
                    !v.is_zero()
                })
            })
            .expect("an irreducible quadratic exists");
        for v in space.points() {
            let x23 = field.add(
                field.add(field.mul(v[2], v[2]), field.mul(b, field.mul(v[2], v[3]))),
                field.mul(c, field.mul(v[3], v[3])),
            );
            if field.add(field.mul(v[0], v[1]), x23).is_zero() {
                pts.push(v.clone());
            }
        }
    }
    let mut out: Vec<ProjPoint> = pts
        .iter()
        .map(|v| ProjPoint::normalize(field, v).unwrap())
        .collect();
    out.sort();
    out
}

fn search_cap(space: &Space, goal: usize, budget: u64) -> Result<Vec<ProjPoint>> {
    let field = space.field();
    let n = space.num_points();
    let line_through = |a: u32, b: u32| -> Vec<u32> {
        let (u, v) = (space.point(a), space.point(b));
        let mut pts = vec![a, b];
        for s in field.elements().skip(1) {
            let w: Vec<FieldElem> = u.iter().zip(v).map(|(&x, &y)| field.add(x, field.mul(s, y))).collect();
            pts.push(space.point_index(&w).unwrap());
        }
        pts
    };

    struct State {
        chosen: Vec<u32>,
        blocked: Vec<u32>,
        nodes: u64,
    }

    fn dfs(
        st: &mut State,
        start: u32,
        n: usize,
        goal: usize,
        budget: u64,
        line_through: &dyn Fn(u32, u32) -> Vec<u32>,
    ) -> bool {
        if st.chosen.len() == goal {
            return true;
        }
        if st.chosen.len() + (n - start as usize) < goal {
            return false;
        }
        for p in start..n as u32 {
            if st.nodes >= budget {
                return false;
            }
            if st.blocked[p as usize] > 0 {
                continue;
            }
            st.nodes += 1;
            let lines: Vec<Vec<u32>> = st.chosen.iter().map(|&c| line_through(c, p)).collect();
            for l in &lines {
                for &x in l {
                    st.blocked[x as usize] += 1;
                }
            }
            st.chosen.push(p);
            if dfs(st, p + 1, n, goal, budget, line_through) {
                return true;
            }
            st.chosen.pop();
            for l in &lines {
                for &x in l {
                    st.blocked[x as usize] -= 1;
                }
            }
        }
        false
    }

    let mut st = State {
        chosen: Vec::new(),
        blocked: vec![0; n],
        nodes: 0,
    };
    if dfs(&mut st, 0, n, goal, budget, &line_through) {
        Ok(st
            .chosen
            .iter()
            .map(|&i| ProjPoint::normalize(field, space.point(i)).unwrap())
            .collect())
    } else {
        Err(Error::SearchFailed {
            goal,
            nodes: st.nodes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap(d: usize, q: u32) -> Vec<ProjPoint> {
        find_cap(&Space::projective(d, q).unwrap(), None, DEFAULT_CAP_BUDGET).unwrap()
    }

    #[test]
    fn plane_caps() {
        assert_eq!(cap(2, 3).len(), 4);
        assert_eq!(cap(2, 4).len(), 6);
        assert_eq!(cap(2, 5).len(), 6);
        assert_eq!(cap(2, 2).len(), 4);
    }

    #[test]
    fn ovoids() {
        let s = Space::projective(3, 3).unwrap();
        let c = find_cap(&s, None, DEFAULT_CAP_BUDGET).unwrap();
        assert_eq!(c.len(), 10);
        assert!(is_cap(&s, &c));
        assert_eq!(cap(3, 4).len(), 17);
    }

    #[test]
    fn pg32_cap_by_search() {
        let s = Space::projective(3, 2).unwrap();
        let c = find_cap(&s, None, DEFAULT_CAP_BUDGET).unwrap();
        assert_eq!(c.len(), 8);
        assert!(is_cap(&s, &c));
    }

    #[test]
    fn impossible_goal_fails() {
        let s = Space::projective(2, 3).unwrap();
        let err = find_cap(&s, Some(5), 10_000).unwrap_err();
        assert!(matches!(err, Error::SearchFailed { goal: 5, .. }));
    }

    #[test]
    fn collinear_points_detected() {
        let s = Space::projective(2, 2).unwrap();
        let line = &s.flats(1).unwrap()[0];
        let pts: Vec<ProjPoint> = line
            .points
            .iter()
            .map(|&i| ProjPoint::normalize(s.field(), s.point(i)).unwrap())
            .collect();
        assert!(!is_cap(&s, &pts));
    }

    #[test]
    fn unsupported_dimension() {
        let s = Space::projective(4, 2).unwrap();
        assert!(find_cap(&s, None, 10).is_err());
    }
}
