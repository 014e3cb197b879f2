//! Fractional matchings of step graphons and the matching ratio LP.
//!
//! A matching of `W` is a symmetric-by-convention nonnegative step kernel
//! `m` supported inside the support of `W` whose degrees
//! `int m(x,y) dy + int m(y,x) dy` stay at most 1. The matching ratio
//! `nu(W)` is the maximum of `int int m`; by LP duality it equals the cover
//! ratio, and this module enforces that equality as a postcondition.

use crate::covers::{cover_ratio, CoverError};
use crate::lp::{check_certificate, solve, Direction, LinearProgram, LpStatus, Row, Sense};
use crate::rat::{rat, Rat};
use crate::step::{common_refinement, StepGraphon, StepKernel};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Optimal matching with its total mass `nu` and per-block degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingWitness {
    pub nu: Rat,
    pub matching: StepKernel,
    /// Degree of each graphon block under the witness; all at most 1.
    pub degrees: Vec<Rat>,
}

/// First reason `m` fails to be a matching of `w`, if any. Block indices
/// refer to the common refinement of the two partitions.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MatchingViolation {
    #[error("negative value {value} at refined block ({row}, {col})")]
    Negative { row: usize, col: usize, value: Rat },
    #[error("positive value {value} outside the support at refined block ({row}, {col})")]
    OutsideSupport { row: usize, col: usize, value: Rat },
    #[error("degree {degree} > 1 at refined block {block}")]
    DegreeExceeded { block: usize, degree: Rat },
}

/// Exact matching test with a violation report. All partitions are refined
/// to a common one first. Checks nonnegativity, support containment and the
/// degree bound; symmetry is not required.
pub fn matching_violation(m: &StepKernel, w: &StepGraphon) -> Option<MatchingViolation> {
    let r = common_refinement(&[m.row_measures(), m.col_measures(), w.measures()]);
    let k = r.measures.len();
    let mm = m.refined(&r.maps[0], &r.measures, &r.maps[1], &r.measures);
    let ww = w.refined(&r.maps[2], &r.measures);
    for i in 0..k {
        for j in 0..k {
            let v = mm.value(i, j);
            if v.is_negative() {
                return Some(MatchingViolation::Negative {
                    row: i,
                    col: j,
                    value: v.clone(),
                });
            }
            if v.is_positive() && !ww.value(i, j).is_positive() {
                return Some(MatchingViolation::OutsideSupport {
                    row: i,
                    col: j,
                    value: v.clone(),
                });
            }
        }
    }
    for i in 0..k {
        let degree: Rat = (0..k)
            .map(|j| &r.measures[j] * &(mm.value(i, j) + mm.value(j, i)))
            .sum();
        if degree > Rat::one() {
            return Some(MatchingViolation::DegreeExceeded { block: i, degree });
        }
    }
    None
}

/// Exact test: is `m` a fractional matching of `w`?
pub fn is_matching(m: &StepKernel, w: &StepGraphon) -> bool {
    matching_violation(m, w).is_none()
}

/// Degree of each block of `m`'s own (square) partition:
/// `sum_j nu_j (m_ij + m_ji)`.
pub fn block_degrees(m: &StepKernel) -> Vec<Rat> {
    assert!(m.is_square());
    let k = m.row_measures().len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| &m.col_measures()[j] * &(m.value(i, j) + m.value(j, i)))
                .sum()
        })
        .collect()
}

/// Total mass `int int m` of a step kernel.
pub fn matching_size(m: &StepKernel) -> Rat {
    let mut total = Rat::zero();
    for (i, mu) in m.row_measures().iter().enumerate() {
        for (j, nu) in m.col_measures().iter().enumerate() {
            if !m.value(i, j).is_zero() {
                total += mu * nu * m.value(i, j);
            }
        }
    }
    total
}

/// Maximum matching mass `nu(W)` with an optimal symmetric matching as
/// witness. Solved as an LP over the unordered support pairs (the optimum
/// is attained at a symmetric matching, since averaging a matching with its
/// transpose preserves feasibility and mass). The value is checked against
/// `cover_ratio` before returning, so the duality `nu = tau*` is enforced
/// on every call.
pub fn matching_ratio(w: &StepGraphon) -> Result<MatchingWitness, MatchingError> {
    let k = w.k();
    let pairs = w.support_pairs();
    // Objective: mass contributed by the symmetric pair (i, j).
    let objective: Vec<Rat> = pairs
        .iter()
        .map(|&(i, j)| {
            let cell = &w.measures()[i] * &w.measures()[j];
            if i == j {
                cell
            } else {
                Rat::int(2) * cell
            }
        })
        .collect();
    // Degree rows: block b sees 2 * nu_j * m_bj from each pair at b.
    let rows: Vec<Row> = (0..k)
        .map(|b| {
            let coeffs = pairs
                .iter()
                .map(|&(i, j)| {
                    if i == b && j == b {
                        Rat::int(2) * &w.measures()[b]
                    } else if i == b {
                        Rat::int(2) * &w.measures()[j]
                    } else if j == b {
                        Rat::int(2) * &w.measures()[i]
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            Row {
                coeffs,
                sense: Sense::Le,
                rhs: Rat::one(),
            }
        })
        .collect();
    let lp = LinearProgram {
        direction: Direction::Maximize,
        objective,
        rows,
        bounds: vec![(Some(Rat::zero()), None); pairs.len()],
    };
    let sol = solve(&lp).map_err(CoverError::from)?;
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(check_certificate(&lp, &sol).ok);
    let nu = sol.objective.expect("optimal solutions carry objectives");
    let x = sol.x.expect("optimal solutions carry points");

    let mut values = vec![vec![Rat::zero(); k]; k];
    for (&(i, j), v) in pairs.iter().zip(&x) {
        values[i][j] = v.clone();
        values[j][i] = v.clone();
    }
    let matching = StepKernel::new(w.measures().to_vec(), w.measures().to_vec(), values)
        .expect("square kernel on the graphon partition");
    assert!(is_matching(&matching, w));
    assert_eq!(matching_size(&matching), nu);
    assert!(nu <= rat(1, 2), "degree bound caps the mass at 1/2");

    let degrees = block_degrees(&matching);
    assert!(degrees.iter().all(|d| d <= &Rat::one()));

    // Duality: the maximum matching mass equals the minimum cover mass.
    let tau = cover_ratio(w)?.tau;
    assert_eq!(nu, tau, "matching/cover duality must be exact");
    Ok(MatchingWitness {
        nu,
        matching,
        degrees,
    })
}

/// Staircase graphon with `k` steps: the anti-diagonal half, coarsened to
/// k^2 blocks. Every staircase has matching ratio 1/2, while the optimal
/// matchings concentrate on ever thinner strips with values growing like
/// k/2 — the standard example of a matching sequence with no convergent
/// subsequence in any reasonable sense, even along cut-norm convergent
/// graphons.
pub fn staircase_graphon(k: usize) -> StepGraphon {
    assert!(k >= 1);
    let kk = k as i64;
    let values = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i + j == k - 1 { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    StepGraphon::new(vec![rat(1, kk); k], values).unwrap()
}

/// The optimal matching on `staircase_graphon(k)`: value k/2 on the
/// anti-diagonal blocks, mass 1/2.
pub fn staircase_matching(k: usize) -> StepKernel {
    assert!(k >= 1);
    let kk = k as i64;
    let values = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i + j == k - 1 { rat(kk, 2) } else { Rat::zero() })
                .collect()
        })
        .collect();
    StepKernel::new(vec![rat(1, kk); k], vec![rat(1, kk); k], values).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::l1_distance;

    fn graphon(measures: Vec<Rat>, values: Vec<Vec<i64>>) -> StepGraphon {
        let values = values
            .into_iter()
            .map(|row| row.into_iter().map(Rat::int).collect())
            .collect();
        StepGraphon::new(measures, values).unwrap()
    }

    #[test]
    fn matching_ratio_frozen_values() {
        // Constant one: m = 1/2 everywhere.
        let w = StepGraphon::constant(vec![Rat::one()], Rat::one()).unwrap();
        let res = matching_ratio(&w).unwrap();
        assert_eq!(res.nu, rat(1, 2));
        assert_eq!(res.matching.value(0, 0), &rat(1, 2));

        // Even complete bipartite: full cross matching.
        let w = graphon(
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![0, 1], vec![1, 0]],
        );
        let res = matching_ratio(&w).unwrap();
        assert_eq!(res.nu, rat(1, 2));
        assert_eq!(res.matching.value(0, 1), &Rat::one());
        assert_eq!(res.matching.value(0, 0), &Rat::zero());
        assert_eq!(res.degrees, vec![Rat::one(), Rat::one()]);

        // Uneven complete bipartite: limited by the smaller side.
        let w = graphon(
            vec![rat(1, 3), rat(2, 3)],
            vec![vec![0, 1], vec![1, 0]],
        );
        assert_eq!(matching_ratio(&w).unwrap().nu, rat(1, 3));

        // Triangle: nu = 1/2 spread over the three edges.
        let w = graphon(
            vec![rat(1, 3); 3],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        );
        let res = matching_ratio(&w).unwrap();
        assert_eq!(res.nu, rat(1, 2));

        // Zero graphon: empty matching.
        let zero = StepGraphon::constant(vec![Rat::one()], Rat::zero()).unwrap();
        let res = matching_ratio(&zero).unwrap();
        assert_eq!(res.nu, Rat::zero());
    }

    #[test]
    fn is_matching_rejects_violations() {
        let w = graphon(
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![0, 1], vec![1, 0]],
        );
        let half = vec![rat(1, 2), rat(1, 2)];
        let kernel = |values: Vec<Vec<Rat>>| {
            StepKernel::new(half.clone(), half.clone(), values).unwrap()
        };

        // Valid cross matching.
        let good = kernel(vec![
            vec![Rat::zero(), Rat::one()],
            vec![Rat::one(), Rat::zero()],
        ]);
        assert!(is_matching(&good, &w));
        assert_eq!(matching_size(&good), rat(1, 2));

        // Mass outside the support.
        let off_support = kernel(vec![
            vec![rat(1, 10), Rat::zero()],
            vec![Rat::zero(), Rat::zero()],
        ]);
        assert_eq!(
            matching_violation(&off_support, &w),
            Some(MatchingViolation::OutsideSupport {
                row: 0,
                col: 0,
                value: rat(1, 10)
            })
        );

        // Degree above 1.
        let heavy = kernel(vec![
            vec![Rat::zero(), rat(3, 2)],
            vec![rat(3, 2), Rat::zero()],
        ]);
        assert_eq!(
            matching_violation(&heavy, &w),
            Some(MatchingViolation::DegreeExceeded {
                block: 0,
                degree: rat(3, 2)
            })
        );

        // Negative values.
        let negative = kernel(vec![
            vec![Rat::zero(), rat(-1, 2)],
            vec![rat(-1, 2), Rat::zero()],
        ]);
        assert_eq!(
            matching_violation(&negative, &w),
            Some(MatchingViolation::Negative {
                row: 0,
                col: 1,
                value: rat(-1, 2)
            })
        );

        // Asymmetric matchings are allowed when degrees stay below 1.
        let asymmetric = kernel(vec![
            vec![Rat::zero(), Rat::one()],
            vec![Rat::zero(), Rat::zero()],
        ]);
        assert!(is_matching(&asymmetric, &w));
        assert_eq!(matching_size(&asymmetric), rat(1, 4));
    }

    #[test]
    fn is_matching_refines_mixed_partitions() {
        // Matching on a coarser partition than the graphon.
        let w = graphon(
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![0, 1], vec![1, 0]],
        );
        let m = StepKernel::new(
            vec![Rat::one()],
            vec![Rat::one()],
            vec![vec![rat(1, 2)]],
        )
        .unwrap();
        // Constant 1/2 puts mass on the diagonal blocks, off support.
        assert!(!is_matching(&m, &w));
    }

    #[test]
    fn staircase_family_has_constant_ratio_and_diverging_witnesses() {
        for k in [1usize, 2, 4, 8] {
            let w = staircase_graphon(k);
            let m = staircase_matching(k);
            assert!(is_matching(&m, &w));
            assert_eq!(matching_size(&m), rat(1, 2));
            assert_eq!(matching_ratio(&w).unwrap().nu, rat(1, 2));
            assert_eq!(m.value(0, k - 1), &rat(k as i64, 2));
        }
        // The witnesses stay far apart in L1: no Cauchy subsequence.
        assert_eq!(
            l1_distance(&staircase_matching(2), &staircase_matching(4)),
            rat(1, 2)
        );
        assert_eq!(
            l1_distance(&staircase_matching(4), &staircase_matching(8)),
            rat(1, 2)
        );
    }

    #[test]
    fn duality_holds_on_small_family() {
        // Few structured graphons; matching_ratio itself asserts nu = tau.
        for w in [
            staircase_graphon(3),
            graphon(
                vec![rat(1, 5); 5],
                vec![
                    vec![0, 1, 0, 0, 1],
                    vec![1, 0, 1, 0, 0],
                    vec![0, 1, 0, 1, 0],
                    vec![0, 0, 1, 0, 1],
                    vec![1, 0, 0, 1, 0],
                ],
            ),
            graphon(
                vec![rat(1, 6), rat(1, 3), rat(1, 2)],
                vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 0]],
            ),
        ] {
            let res = matching_ratio(&w).unwrap();
            assert!(is_matching(&res.matching, &w));
        }
    }
}
