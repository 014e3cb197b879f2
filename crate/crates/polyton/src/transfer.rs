//! Transferring a matching from one graphon to a nearby one.
//!
//! Given a matching `m` of `W` and any graphon `U` within cut-norm distance
//! `delta` of `W`, `transfer_matching` builds a matching of `U` within
//! cut-norm distance `eps` of `m`. The construction rescales `U` cellwise by
//! `m/W` on a fine equal-measure partition (skipping cells where `W` is
//! below a gate `r`), trims blocks whose degree grew by more than
//! `sqrt(eps~)`, and renormalizes by `1/(1 + 2 sqrt(eps~))`.
//!
//! All thresholds are rational. The only irrational quantity, `sqrt(eps~)`,
//! enters through a rational upper bracket `hi >= sqrt(eps~)`, and every
//! inequality is arranged so that substituting `hi` for the true root keeps
//! the conclusion conservative: the budget `3e + 6 sqrt(e) M + 2 e sqrt(e)`
//! is increasing in the substituted root, trimming at threshold `hi` trims
//! fewer blocks while keeping the degree bound `1 + 2 hi` aligned with the
//! rescaling factor, and the trimmed measure bound `nu(B) hi < ||t - m||`
//! only gets stronger.

use crate::cutnorm::{cut_norm, CutNormError, DEFAULT_CUT_NORM_CAP};
use crate::matchings::is_matching;
use crate::rat::{rat, Rat};
use crate::step::{common_refinement, graphon_difference, kernel_difference, StepGraphon, StepKernel};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(Rat),
    #[error("the given kernel is not a matching of the source graphon")]
    NotAMatching,
    #[error("equal-measure refinement needs {k} blocks, above the cap of {cap}")]
    RefinementTooFine { k: BigInt, cap: usize },
    #[error(transparent)]
    CutNorm(#[from] CutNormError),
}

/// Largest equal-measure block count the planner will accept.
pub const DEFAULT_REFINEMENT_CAP: usize = 4096;

/// All constants of one transfer instance, derived from `(W, m, eps)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferPlan {
    pub eps: Rat,
    /// Truncation level; `max(m)` capped below by 1.
    pub m_bound: Rat,
    /// Working accuracy; a power-of-two fraction of `eps/8`.
    pub eps_tilde: Rat,
    /// Rational bracket `lo <= sqrt(eps_tilde) <= hi`; `hi` is the value
    /// used by the algorithm.
    pub sqrt_eps_tilde: (Rat, Rat),
    /// Smallest positive value of `W` (1 when `W` has empty support).
    pub s_min: Rat,
    /// Cells with `W` below this gate are dropped from the rescaling.
    pub r_gate: Rat,
    pub eta: Rat,
    /// Number of equal-measure blocks refining `W` and `m`.
    pub k: usize,
    /// Required cut-norm closeness of `U` to `W`: `eta / k^2`.
    pub delta: Rat,
}

/// Outcome of one transfer. `matching` is always a matching of `U`; the
/// quantitative guarantees (`cut_error < eps`) additionally require
/// `delta_check`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferResult {
    pub plan: TransferPlan,
    pub matching: StepKernel,
    /// Exact `||U - W||` cut norm against the plan's `delta`.
    pub distance: Rat,
    pub delta_check: bool,
    /// Exact `||t - m||` for the intermediate rescaled kernel `t`.
    pub intermediate_error: Rat,
    /// Measures of the row/column block sets removed by trimming.
    pub trimmed_rows_measure: Rat,
    pub trimmed_cols_measure: Rat,
    /// Exact `||m_U - m||` cut norm.
    pub cut_error: Rat,
    pub valid: bool,
}

/// Truncates a matching at a level `M >= 1` chosen so the truncation error
/// is below `eps/2`. Step kernels are bounded, so truncation at
/// `M = max(1, max value)` is exact and the error is zero.
pub fn truncate_matching(m: &StepKernel, eps: &Rat) -> Result<(StepKernel, Rat), TransferError> {
    if !eps.is_positive() {
        return Err(TransferError::NonPositiveEpsilon(eps.clone()));
    }
    let max = m
        .values()
        .iter()
        .flatten()
        .cloned()
        .reduce(Rat::max)
        .unwrap_or_else(Rat::zero);
    Ok((m.clone(), Rat::max(max, Rat::one())))
}

/// Common refinement of the given partitions into `k` blocks of measure
/// `1/k`, with `k` the least common denominator of the refined measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualRefinement {
    pub k: usize,
    pub measures: Vec<Rat>,
    /// One map per input partition: `maps[p][new] = old block index`.
    pub maps: Vec<Vec<usize>>,
}

pub fn equal_measure_refinement(
    parts: &[&[Rat]],
    cap: usize,
) -> Result<EqualRefinement, TransferError> {
    let r = common_refinement(parts);
    let mut k = BigInt::from(1);
    for m in &r.measures {
        k = k.lcm(m.denom());
    }
    let cells = k
        .to_usize()
        .filter(|&k| k <= cap)
        .ok_or(TransferError::RefinementTooFine { k: k.clone(), cap })?;
    let k_rat = Rat::int(cells as i64);
    // Split refined block i into `measure_i * k` equal cells.
    let mut expanded: Vec<usize> = Vec::with_capacity(cells);
    for (i, m) in r.measures.iter().enumerate() {
        let count = (m * &k_rat).numer().to_usize().expect("count <= k");
        debug_assert!((m * &k_rat).denom() == &BigInt::from(1));
        expanded.extend(std::iter::repeat_n(i, count));
    }
    debug_assert_eq!(expanded.len(), cells);
    let maps = r
        .maps
        .iter()
        .map(|map| expanded.iter().map(|&ri| map[ri]).collect())
        .collect();
    Ok(EqualRefinement {
        k: cells,
        measures: vec![Rat::one() / &k_rat; cells],
        maps,
    })
}

/// Derives all constants for transferring `m` (a matching of `w`) with
/// target accuracy `eps`, and checks the monotone chain
/// `0 < delta <= eta <= eps~ < eps`.
pub fn plan_transfer(
    w: &StepGraphon,
    m: &StepKernel,
    eps: &Rat,
) -> Result<TransferPlan, TransferError> {
    let (_, m_bound) = truncate_matching(m, eps)?;
    if !is_matching(m, w) {
        return Err(TransferError::NotAMatching);
    }

    // Halve from eps/8 until the error budget fits in eps/2.
    let mut eps_tilde = eps / Rat::int(8);
    let budget = eps / Rat::int(2);
    let mut bracket = eps_tilde.sqrt_bounds(64);
    for _ in 0..10_000 {
        let (_, hi) = &bracket;
        let lhs = Rat::int(3) * &eps_tilde
            + Rat::int(6) * hi * &m_bound
            + Rat::int(2) * &eps_tilde * hi;
        if lhs < budget {
            break;
        }
        eps_tilde /= Rat::int(2);
        bracket = eps_tilde.sqrt_bounds(64);
    }
    let s_min = w.min_positive_value().unwrap_or_else(Rat::one);
    let r_gate = &eps_tilde * &s_min / (Rat::int(4) * &m_bound);
    let eta = rat(1, 2) * &eps_tilde
        / (Rat::one() + Rat::int(2) * &m_bound + Rat::int(2) * &m_bound / &r_gate);
    let eq = equal_measure_refinement(
        &[w.measures(), m.row_measures(), m.col_measures()],
        DEFAULT_REFINEMENT_CAP,
    )?;
    let k_rat = Rat::int(eq.k as i64);
    let delta = &eta / (&k_rat * &k_rat);

    assert!(delta.is_positive());
    assert!(delta <= eta && eta <= eps_tilde && &eps_tilde < eps);
    Ok(TransferPlan {
        eps: eps.clone(),
        m_bound,
        eps_tilde,
        sqrt_eps_tilde: bracket,
        s_min,
        r_gate,
        eta,
        k: eq.k,
        delta,
    })
}

/// Per-block degrees `int m(x,y) dy + int m(y,x) dy` on the common square
/// partition of the kernel.
pub fn degree_profile(m: &StepKernel) -> (Vec<Rat>, Vec<Rat>) {
    let sq = m.on_common_partition();
    let k = sq.row_measures().len();
    let degrees = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| &sq.row_measures()[j] * &(sq.value(i, j) + sq.value(j, i)))
                .sum()
        })
        .collect();
    (sq.row_measures().to_vec(), degrees)
}

/// Transfers the matching `m` of `w` onto `u`. The returned kernel is a
/// matching of `u` unconditionally; when `u` is within `delta` of `w` in
/// cut norm the result is additionally within `eps` of `m`, and both facts
/// are asserted rather than assumed.
pub fn transfer_matching(
    w: &StepGraphon,
    m: &StepKernel,
    u: &StepGraphon,
    eps: &Rat,
) -> Result<TransferResult, TransferError> {
    let plan = plan_transfer(w, m, eps)?;
    let sq_hi = plan.sqrt_eps_tilde.1.clone();
    let distance = cut_norm(&graphon_difference(u, w), DEFAULT_CUT_NORM_CAP)?.value;
    let delta_check = distance < plan.delta;

    // Equal-measure partition of (W, m), then refine U onto it.
    let eq = equal_measure_refinement(
        &[w.measures(), m.row_measures(), m.col_measures()],
        DEFAULT_REFINEMENT_CAP,
    )?;
    let w_k = w.refined(&eq.maps[0], &eq.measures);
    let m_k = m.refined(&eq.maps[1], &eq.measures, &eq.maps[2], &eq.measures);
    let fine = common_refinement(&[&eq.measures, u.measures()]);
    let parent = &fine.maps[0];
    let w_f = w_k.refined(parent, &fine.measures);
    let m_f = m_k.refined(parent, &fine.measures, parent, &fine.measures);
    let u_f = u.refined(&fine.maps[1], &fine.measures);
    let n = fine.measures.len();

    // Cells of the equal partition where W strays from its cell average by
    // more than eta per unit cell. W is block-constant on these cells, so
    // the deviation vanishes identically; the check is kept for fidelity
    // with inputs that are refined rather than exact.
    let cell_area = {
        let k_rat = Rat::int(eq.k as i64);
        Rat::one() / (&k_rat * &k_rat)
    };
    let mut gate = vec![vec![false; eq.k]; eq.k];
    for i in 0..eq.k {
        for j in 0..eq.k {
            let mut deviation = Rat::zero();
            for a in 0..n {
                if parent[a] != i {
                    continue;
                }
                for b in 0..n {
                    if parent[b] != j {
                        continue;
                    }
                    let d = (w_f.value(a, b) - w_k.value(i, j)).abs();
                    if !d.is_zero() {
                        deviation += &fine.measures[a] * &fine.measures[b] * d;
                    }
                }
            }
            let averaged_ok = deviation <= &plan.eta * &cell_area;
            gate[i][j] = averaged_ok && w_k.value(i, j) >= &plan.r_gate;
        }
    }

    // t rescales U by m/W on gated cells.
    let t_values: Vec<Vec<Rat>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (i, j) = (parent[a], parent[b]);
                    if gate[i][j] && !u_f.value(a, b).is_zero() {
                        m_k.value(i, j) / w_k.value(i, j) * u_f.value(a, b)
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    let t = StepKernel::new(fine.measures.clone(), fine.measures.clone(), t_values).unwrap();
    let intermediate_error = cut_norm(&kernel_difference(&t, &m_f), DEFAULT_CUT_NORM_CAP)?.value;

    // Trim blocks whose row (resp. column) degree exceeds the matching's by
    // more than the root bracket.
    let row_degree = |f: &StepKernel, a: usize| -> Rat {
        (0..n).map(|b| &fine.measures[b] * f.value(a, b)).sum()
    };
    let col_degree = |f: &StepKernel, b: usize| -> Rat {
        (0..n).map(|a| &fine.measures[a] * f.value(a, b)).sum()
    };
    let trimmed_rows: Vec<bool> = (0..n)
        .map(|a| row_degree(&t, a) > row_degree(&m_f, a) + &sq_hi)
        .collect();
    let trimmed_cols: Vec<bool> = (0..n)
        .map(|b| col_degree(&t, b) > col_degree(&m_f, b) + &sq_hi)
        .collect();
    let trimmed_rows_measure: Rat = (0..n)
        .filter(|&a| trimmed_rows[a])
        .map(|a| fine.measures[a].clone())
        .sum();
    let trimmed_cols_measure: Rat = (0..n)
        .filter(|&b| trimmed_cols[b])
        .map(|b| fine.measures[b].clone())
        .sum();
    // The excess over a trimmed set is a rectangle integral of t - m, so
    // the trimmed measure obeys nu(B) * hi < ||t - m||.
    assert!(
        trimmed_rows_measure.is_zero() || &trimmed_rows_measure * &sq_hi < intermediate_error
    );
    assert!(
        trimmed_cols_measure.is_zero() || &trimmed_cols_measure * &sq_hi < intermediate_error
    );

    let scale = Rat::one() / (Rat::one() + Rat::int(2) * &sq_hi);
    let m_u_values: Vec<Vec<Rat>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if trimmed_rows[a] || trimmed_cols[b] {
                        Rat::zero()
                    } else {
                        t.value(a, b) * &scale
                    }
                })
                .collect()
        })
        .collect();
    let matching =
        StepKernel::new(fine.measures.clone(), fine.measures.clone(), m_u_values).unwrap();
    assert!(is_matching(&matching, u), "trimmed rescaling is a matching");

    let cut_error = cut_norm(&kernel_difference(&matching, m), DEFAULT_CUT_NORM_CAP)?.value;
    if delta_check {
        assert!(
            intermediate_error <= plan.eps_tilde,
            "rescaled kernel strays from the matching by more than eps~"
        );
        assert!(&cut_error < eps, "transfer exceeded its error budget");
    }
    let valid = delta_check && &cut_error < eps;
    Ok(TransferResult {
        plan,
        matching,
        distance,
        delta_check,
        intermediate_error,
        trimmed_rows_measure,
        trimmed_cols_measure,
        cut_error,
        valid,
    })
}
