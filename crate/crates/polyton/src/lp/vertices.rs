//! Exact vertex enumeration for bounded polyhedra.
//!
//! Incremental double description: start from the corners of a bounding box,
//! then cut with one inequality at a time. New vertices arise as crossing
//! points of edges between a satisfying and a violated vertex; adjacency is
//! decided combinatorially (no third vertex's tight set contains the pair's
//! common tight set), which is exact for bounded polytopes even under
//! degeneracy. Every returned point is finally re-verified to be tight on a
//! rank-`n` subsystem.

use super::{Direction, LinearProgram, LpError, LpStatus, Row, Sense};
use crate::rat::Rat;
use std::collections::BTreeMap;

/// Largest dimension accepted by `enumerate_vertices`.
pub const DEFAULT_DIMENSION_CAP: usize = 12;

/// Tight sets are stored as bitsets over constraint ids.
const MAX_CONSTRAINTS: usize = 128;

struct Ineq {
    g: Vec<Rat>,
    h: Rat,
}

impl Ineq {
    /// `g . x - h`; negative satisfies strictly, zero is tight.
    fn eval(&self, x: &[Rat]) -> Rat {
        self.g.iter().zip(x).map(|(a, v)| a * v).sum::<Rat>() - &self.h
    }
}

/// Enumerates all vertices of `{x : rows, bounds}` in lexicographic order.
///
/// The region must be bounded; sides missing from `bounds` are bounded by
/// auxiliary LP solves and reported as `UnboundedRegion` when no implied
/// bound exists. Infeasible systems yield an empty list.
pub fn enumerate_vertices(
    rows: &[Row],
    bounds: &[(Option<Rat>, Option<Rat>)],
    dimension_cap: usize,
) -> Result<Vec<Vec<Rat>>, LpError> {
    let n = bounds.len();
    if n > dimension_cap {
        return Err(LpError::DimensionCap {
            got: n,
            cap: dimension_cap,
        });
    }
    for (i, r) in rows.iter().enumerate() {
        if r.coeffs.len() != n {
            return Err(LpError::RowLength {
                row: i,
                got: r.coeffs.len(),
                expected: n,
            });
        }
    }
    for (j, (lo, hi)) in bounds.iter().enumerate() {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo > hi {
                return Err(LpError::InvalidBounds(j));
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    // Complete the box, deriving missing sides from the constraints.
    let mut box_lo = Vec::with_capacity(n);
    let mut box_hi = Vec::with_capacity(n);
    for (j, (lo, hi)) in bounds.iter().enumerate() {
        let lo = match lo {
            Some(v) => v.clone(),
            None => match implied_bound(rows, bounds, j, Direction::Minimize)? {
                Some(v) => v - Rat::one(),
                None => return Ok(Vec::new()), // infeasible
            },
        };
        let hi = match hi {
            Some(v) => v.clone(),
            None => match implied_bound(rows, bounds, j, Direction::Maximize)? {
                Some(v) => v + Rat::one(),
                None => return Ok(Vec::new()),
            },
        };
        box_lo.push(lo);
        box_hi.push(hi);
    }

    // Constraint ids: 2j / 2j+1 for the box sides of variable j, then the
    // rows split into <= inequalities.
    let mut ineqs: Vec<Ineq> = Vec::new();
    for j in 0..n {
        let mut g = vec![Rat::zero(); n];
        g[j] = Rat::int(-1);
        ineqs.push(Ineq {
            g,
            h: -box_lo[j].clone(),
        });
        let mut g = vec![Rat::zero(); n];
        g[j] = Rat::one();
        ineqs.push(Ineq {
            g,
            h: box_hi[j].clone(),
        });
    }
    let first_row_id = ineqs.len();
    for r in rows {
        match r.sense {
            Sense::Le => ineqs.push(Ineq {
                g: r.coeffs.clone(),
                h: r.rhs.clone(),
            }),
            Sense::Ge => ineqs.push(Ineq {
                g: r.coeffs.iter().map(|a| -a).collect(),
                h: -r.rhs.clone(),
            }),
            Sense::Eq => {
                ineqs.push(Ineq {
                    g: r.coeffs.clone(),
                    h: r.rhs.clone(),
                });
                ineqs.push(Ineq {
                    g: r.coeffs.iter().map(|a| -a).collect(),
                    h: -r.rhs.clone(),
                });
            }
        }
    }
    if ineqs.len() > MAX_CONSTRAINTS {
        return Err(LpError::ConstraintCap {
            got: ineqs.len(),
            cap: MAX_CONSTRAINTS,
        });
    }

    let tight_set = |x: &[Rat], upto: usize| -> u128 {
        let mut t = 0u128;
        for (id, c) in ineqs[..upto].iter().enumerate() {
            if c.eval(x).is_zero() {
                t |= 1u128 << id;
            }
        }
        t
    };

    // Box corners. Collapsed coordinates (lo == hi) contribute one choice.
    let mut verts: Vec<(Vec<Rat>, u128)> = vec![(Vec::new(), 0)];
    for j in 0..n {
        let mut next = Vec::with_capacity(verts.len() * 2);
        for (v, _) in &verts {
            let mut a = v.clone();
            a.push(box_lo[j].clone());
            next.push((a, 0));
            if box_lo[j] != box_hi[j] {
                let mut b = v.clone();
                b.push(box_hi[j].clone());
                next.push((b, 0));
            }
        }
        verts = next;
    }
    for (v, t) in verts.iter_mut() {
        *t = tight_set(v, first_row_id);
    }

    // Cut with one inequality at a time.
    for id in first_row_id..ineqs.len() {
        let c = &ineqs[id];
        let vals: Vec<Rat> = verts.iter().map(|(v, _)| c.eval(v)).collect();
        if vals.iter().all(|v| !v.is_positive()) {
            for ((_, t), val) in verts.iter_mut().zip(&vals) {
                if val.is_zero() {
                    *t |= 1u128 << id;
                }
            }
            continue;
        }
        if vals.iter().all(|v| v.is_positive()) {
            return Ok(Vec::new());
        }

        let inside: Vec<usize> = (0..verts.len())
            .filter(|&i| vals[i].is_negative())
            .collect();
        let outside: Vec<usize> = (0..verts.len())
            .filter(|&i| vals[i].is_positive())
            .collect();

        let mut new_points: BTreeMap<Vec<Rat>, u128> = BTreeMap::new();
        for &iu in &inside {
            for &iv in &outside {
                let common = verts[iu].1 & verts[iv].1;
                // An edge is tight on at least n-1 independent constraints.
                if (common.count_ones() as usize) < n.saturating_sub(1) {
                    continue;
                }
                // Combinatorial adjacency: nobody else's tight set contains
                // the common tight set.
                let blocked = verts.iter().enumerate().any(|(iz, (_, tz))| {
                    iz != iu && iz != iv && common & tz == common
                });
                if blocked {
                    continue;
                }
                // Crossing point of the edge with the hyperplane.
                let (du, dv) = (&vals[iu], &vals[iv]); // du < 0 < dv
                let lambda = -du / (dv - du);
                let point: Vec<Rat> = verts[iu]
                    .0
                    .iter()
                    .zip(&verts[iv].0)
                    .map(|(a, b)| a + &lambda * (b - a))
                    .collect();
                let t = tight_set(&point, id + 1);
                new_points.insert(point, t);
            }
        }

        let mut next: Vec<(Vec<Rat>, u128)> = Vec::new();
        for (i, (v, t)) in verts.into_iter().enumerate() {
            if vals[i].is_negative() {
                next.push((v, t));
            } else if vals[i].is_zero() {
                new_points.remove(&v); // crossing may rediscover it
                next.push((v, t | 1u128 << id));
            }
        }
        next.extend(new_points);
        verts = next;
    }

    // Final audit: every reported point satisfies everything and is tight on
    // a rank-n subsystem.
    let mut out: Vec<Vec<Rat>> = Vec::with_capacity(verts.len());
    for (v, _) in verts {
        assert!(
            ineqs.iter().all(|c| !c.eval(&v).is_positive()),
            "enumerated point violates a constraint"
        );
        let tight_rows: Vec<&[Rat]> = ineqs
            .iter()
            .filter(|c| c.eval(&v).is_zero())
            .map(|c| c.g.as_slice())
            .collect();
        assert_eq!(rank(&tight_rows, n), n, "enumerated point is not a vertex");
        out.push(v);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn implied_bound(
    rows: &[Row],
    bounds: &[(Option<Rat>, Option<Rat>)],
    var: usize,
    direction: Direction,
) -> Result<Option<Rat>, LpError> {
    let mut objective = vec![Rat::zero(); bounds.len()];
    objective[var] = Rat::one();
    let lp = LinearProgram {
        direction,
        objective,
        rows: rows.to_vec(),
        bounds: bounds.to_vec(),
    };
    let sol = super::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(Some(sol.objective.expect("optimal value"))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(LpError::UnboundedRegion(var)),
    }
}

/// Rank of a set of row vectors over the rationals, capped at `n`.
pub(crate) fn rank(rows: &[&[Rat]], n: usize) -> usize {
    let mut mat: Vec<Vec<Rat>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut r = 0usize;
    for col in 0..n {
        let Some(pivot) = (r..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(r, pivot);
        let inv = mat[r][col].recip();
        for v in mat[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        r += 1;
        if r == n {
            break;
        }
    }
    r
}
