//! Fractional covers of step graphons: the cover LP, extreme points of the
//! cover polytope, midpoint decompositions, the integral-cover hull test,
//! and the edge-density lower bound with its extremal graphons.
//!
//! A fractional cover of `W` is a step function `c: [0,1) -> [0,1]` with
//! `c(x) + c(y) >= 1` whenever `W(x,y) > 0`; on blocks this reads
//! `c_i + c_j >= 1` for every support pair, including `i = j`. The cover
//! ratio is the minimum total mass `sum nu_i c_i`.

use crate::lp::vertices::{enumerate_vertices, rank};
use crate::lp::{
    check_certificate, lex_min_optimal_point, solve, Direction, LinearProgram, LpError, LpStatus,
    Row, Sense,
};
use crate::rat::{rat, Rat};
use crate::step::{common_refinement, StepCover, StepGraphon};
use crate::structure::{is_bipartite, BipartiteVerdict};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("the given step function is not a fractional cover of the graphon")]
    NotACover,
    #[error("graphon is not bipartite; integral decomposition needs a bipartition")]
    NotBipartite,
    #[error("graphon has {got} blocks on the common partition, above the cap of {cap}")]
    BlockCap { got: usize, cap: usize },
    #[error("edge density {0} is outside [0, 1]")]
    DensityOutOfRange(Rat),
    #[error("degree parameter {0} is outside [0, 1/2]")]
    DegreeOutOfRange(Rat),
    #[error("{0} has no rational square root; the extremal graphon is not a step graphon")]
    IrrationalRoot(Rat),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Largest block count accepted by the polytope-level computations.
pub const DEFAULT_COVER_CAP: usize = 10;

/// Density threshold where the two branches of the lower bound cross.
pub fn crossing_density() -> Rat {
    rat(16, 25)
}

/// Exact test: is `c` a fractional cover of `w`? Both are refined to a
/// common partition first, so arbitrary partitions may be mixed.
pub fn is_cover(c: &StepCover, w: &StepGraphon) -> bool {
    let (cc, ww) = refine_pair(c, w);
    ww.support_pairs()
        .iter()
        .all(|&(i, j)| &cc.values()[i] + &cc.values()[j] >= Rat::one())
}

fn refine_pair(c: &StepCover, w: &StepGraphon) -> (StepCover, StepGraphon) {
    let r = common_refinement(&[c.measures(), w.measures()]);
    (
        c.refined(&r.maps[0], &r.measures),
        w.refined(&r.maps[1], &r.measures),
    )
}

/// Optimal fractional cover together with its mass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub tau: Rat,
    pub cover: StepCover,
}

fn cover_lp(w: &StepGraphon) -> LinearProgram {
    let k = w.k();
    let rows = w
        .support_pairs()
        .into_iter()
        .map(|(i, j)| {
            let mut coeffs = vec![Rat::zero(); k];
            coeffs[i] += Rat::one();
            coeffs[j] += Rat::one();
            Row {
                coeffs,
                sense: Sense::Ge,
                rhs: Rat::one(),
            }
        })
        .collect();
    LinearProgram {
        direction: Direction::Minimize,
        objective: w.measures().to_vec(),
        rows,
        bounds: vec![(Some(Rat::zero()), Some(Rat::one())); k],
    }
}

/// Minimum cover mass `tau*(W)` with a canonical (lexicographically
/// smallest) optimal cover as witness. The LP certificate is re-verified
/// before returning.
pub fn cover_ratio(w: &StepGraphon) -> Result<CoverCertificate, CoverError> {
    let lp = cover_lp(w);
    let sol = lex_min_optimal_point(&lp)?;
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(check_certificate(&lp, &sol).ok);
    let tau = sol.objective.clone().expect("optimal solutions carry objectives");
    let witness = sol.x.expect("optimal solutions carry points");
    let cover = StepCover::new(w.measures().to_vec(), witness).expect("LP bounds are [0,1]");
    assert!(is_cover(&cover, w));
    Ok(CoverCertificate { tau, cover })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverClass {
    /// All values in {0, 1}.
    Integral,
    /// All values in {0, 1/2, 1}, at least one equal to 1/2.
    HalfIntegral,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeCover {
    pub cover: StepCover,
    pub class: CoverClass,
    /// Support pairs (i <= j) where the cover is tight: `c_i + c_j = 1`.
    pub tight_pairs: Vec<(usize, usize)>,
}

fn classify(values: &[Rat]) -> CoverClass {
    let half = rat(1, 2);
    if values.iter().all(|v| v.is_zero() || v.is_one()) {
        CoverClass::Integral
    } else if values.iter().all(|v| v.is_zero() || v.is_one() || *v == half) {
        CoverClass::HalfIntegral
    } else {
        CoverClass::Other
    }
}

fn cover_polytope_rows(w: &StepGraphon) -> Vec<Row> {
    cover_lp(w).rows
}

/// Vertices of the cover polytope by exact enumeration, sorted
/// lexicographically.
pub fn extreme_cover_vertices(
    w: &StepGraphon,
    cap: usize,
) -> Result<Vec<Vec<Rat>>, CoverError> {
    if w.k() > cap {
        return Err(CoverError::BlockCap { got: w.k(), cap });
    }
    let rows = cover_polytope_rows(w);
    let bounds = vec![(Some(Rat::zero()), Some(Rat::one())); w.k()];
    Ok(enumerate_vertices(&rows, &bounds, cap)?)
}

/// Vertices of the cover polytope found by scanning the half-integral grid
/// {0, 1/2, 1}^k: feasible points whose tight constraints have full rank.
/// Complete exactly when every vertex is half-integral.
pub fn extreme_cover_grid(w: &StepGraphon, cap: usize) -> Result<Vec<Vec<Rat>>, CoverError> {
    let k = w.k();
    if k > cap {
        return Err(CoverError::BlockCap { got: k, cap });
    }
    let pairs = w.support_pairs();
    let levels = [Rat::zero(), rat(1, 2), Rat::one()];
    let mut out = Vec::new();
    let mut digits = vec![0usize; k];
    loop {
        let c: Vec<Rat> = digits.iter().map(|&d| levels[d].clone()).collect();
        if pairs.iter().all(|&(i, j)| &c[i] + &c[j] >= Rat::one()) {
            // Tight rows: box faces plus tight support pairs.
            let mut tight: Vec<Vec<Rat>> = Vec::new();
            for (i, v) in c.iter().enumerate() {
                if v.is_zero() || v.is_one() {
                    let mut row = vec![Rat::zero(); k];
                    row[i] = Rat::one();
                    tight.push(row);
                }
            }
            for &(i, j) in &pairs {
                if &c[i] + &c[j] == Rat::one() {
                    let mut row = vec![Rat::zero(); k];
                    row[i] += Rat::one();
                    row[j] += Rat::one();
                    tight.push(row);
                }
            }
            let tight_refs: Vec<&[Rat]> = tight.iter().map(|r| r.as_slice()).collect();
            if rank(&tight_refs, k) == k {
                out.push(c);
            }
        }
        // Advance the mixed-radix counter.
        let mut pos = k;
        loop {
            if pos == 0 {
                out.sort();
                return Ok(out);
            }
            pos -= 1;
            if digits[pos] + 1 < levels.len() {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Extreme points of the cover polytope of `w`, classified. Computed twice —
/// grid scan and exact vertex enumeration — and the two lists are checked
/// against each other, so a hypothetical non-half-integral vertex would be
/// caught here rather than silently missed.
pub fn extreme_covers(w: &StepGraphon, cap: usize) -> Result<Vec<ExtremeCover>, CoverError> {
    let enumerated = extreme_cover_vertices(w, cap)?;
    let grid = extreme_cover_grid(w, cap)?;
    assert_eq!(
        grid, enumerated,
        "cover polytope vertex outside the half-integral grid"
    );
    let pairs = w.support_pairs();
    Ok(enumerated
        .into_iter()
        .map(|values| {
            let tight_pairs = pairs
                .iter()
                .copied()
                .filter(|&(i, j)| &values[i] + &values[j] == Rat::one())
                .collect();
            let class = classify(&values);
            let cover = StepCover::new(w.measures().to_vec(), values).expect("vertex is in [0,1]^k");
            ExtremeCover {
                cover,
                class,
                tight_pairs,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposeMode {
    /// Perturbation vanishing exactly on {0, 1/2, 1}; sides split at 1/2.
    Half,
    /// Perturbation vanishing exactly on {0, 1}; sides are a bipartition of
    /// the support. Requires a bipartite graphon.
    BipartiteIntegral,
}

/// Two covers with `(plus + minus) / 2` equal to the input cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDecomposition {
    pub plus: StepCover,
    pub minus: StepCover,
}

/// Writes `c` as the midpoint of two covers that are strictly closer to the
/// half-integral grid (mode `Half`) or to integrality (mode
/// `BipartiteIntegral`). If `c` is already of the target shape the
/// perturbation is zero and both outputs equal `c`.
pub fn decompose_cover(
    c: &StepCover,
    w: &StepGraphon,
    mode: DecomposeMode,
) -> Result<CoverDecomposition, CoverError> {
    let (cc, ww) = refine_pair(c, w);
    if !is_cover(&cc, &ww) {
        return Err(CoverError::NotACover);
    }
    let k = cc.k();
    let half = rat(1, 2);
    let (in_side_a, delta): (Vec<bool>, Vec<Rat>) = match mode {
        DecomposeMode::Half => {
            let side: Vec<bool> = cc.values().iter().map(|v| v <= &half).collect();
            let delta = cc
                .values()
                .iter()
                .map(|v| {
                    let d = Rat::min(v.clone(), Rat::one() - v);
                    Rat::min(d, (&half - v).abs())
                })
                .collect();
            (side, delta)
        }
        DecomposeMode::BipartiteIntegral => {
            let side_a = match is_bipartite(&ww) {
                BipartiteVerdict::Bipartite { side_a, .. } => side_a,
                BipartiteVerdict::NotBipartite(_) => return Err(CoverError::NotBipartite),
            };
            let mut side = vec![false; k];
            for i in side_a {
                side[i] = true;
            }
            let delta = cc
                .values()
                .iter()
                .map(|v| Rat::min(v.clone(), Rat::one() - v))
                .collect();
            (side, delta)
        }
    };
    let signed = |sign_on_a: bool| -> StepCover {
        let values = (0..k)
            .map(|i| {
                if in_side_a[i] == sign_on_a {
                    &cc.values()[i] + &delta[i]
                } else {
                    &cc.values()[i] - &delta[i]
                }
            })
            .collect();
        StepCover::new(cc.measures().to_vec(), values).expect("perturbation stays in [0,1]")
    };
    let plus = signed(true);
    let minus = signed(false);
    // Midpoint identity and validity are structural guarantees; check them.
    for i in 0..k {
        assert_eq!(
            (&plus.values()[i] + &minus.values()[i]) / Rat::int(2),
            cc.values()[i]
        );
    }
    assert!(is_cover(&plus, &ww) && is_cover(&minus, &ww));
    Ok(CoverDecomposition { plus, minus })
}

/// Result of testing membership of a cover in the convex hull of the
/// integral covers, on the common refinement of the two partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullVerdict {
    /// Convex combination: block index sets of integral covers with their
    /// positive weights (weights sum to 1).
    Inside {
        combination: Vec<(Vec<usize>, Rat)>,
    },
    /// Separating functional: `<weights, 1_S> <= threshold` for every
    /// integral cover `S`, yet `<weights, c> > threshold`.
    Outside { weights: Vec<Rat>, threshold: Rat },
}

/// Decides whether `c` lies in the convex hull of integral covers of `w`.
/// Integral covers are block subsets meeting every support pair; the
/// membership LP is solved exactly and either answer returns a certificate
/// that is re-verified against the full subset list before returning.
pub fn in_integral_cover_hull(
    c: &StepCover,
    w: &StepGraphon,
    cap: usize,
) -> Result<HullVerdict, CoverError> {
    let (cc, ww) = refine_pair(c, w);
    let k = ww.k();
    if k > cap {
        return Err(CoverError::BlockCap { got: k, cap });
    }
    let pairs = ww.support_pairs();
    let subsets: Vec<u64> = (0u64..1 << k)
        .filter(|s| {
            pairs
                .iter()
                .all(|&(i, j)| s & (1 << i) != 0 || s & (1 << j) != 0)
        })
        .collect();
    // Feasibility LP: convex weights lambda_S reproducing cc blockwise.
    let mut rows: Vec<Row> = (0..k)
        .map(|i| Row {
            coeffs: subsets
                .iter()
                .map(|s| {
                    if s & (1 << i) != 0 {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect(),
            sense: Sense::Eq,
            rhs: cc.values()[i].clone(),
        })
        .collect();
    rows.push(Row {
        coeffs: vec![Rat::one(); subsets.len()],
        sense: Sense::Eq,
        rhs: Rat::one(),
    });
    let lp = LinearProgram {
        direction: Direction::Minimize,
        objective: vec![Rat::zero(); subsets.len()],
        rows,
        bounds: vec![(Some(Rat::zero()), None); subsets.len()],
    };
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let lambdas = sol.x.expect("optimal solutions carry points");
            let combination: Vec<(Vec<usize>, Rat)> = subsets
                .iter()
                .zip(&lambdas)
                .filter(|(_, lambda)| lambda.is_positive())
                .map(|(s, lambda)| {
                    let blocks = (0..k).filter(|i| s & (1 << i) != 0).collect();
                    (blocks, lambda.clone())
                })
                .collect();
            // Re-verify the combination independently of the solver.
            let total: Rat = combination.iter().map(|(_, l)| l.clone()).sum();
            assert!(total.is_one());
            for i in 0..k {
                let mass: Rat = combination
                    .iter()
                    .filter(|(blocks, _)| blocks.contains(&i))
                    .map(|(_, l)| l.clone())
                    .sum();
                assert_eq!(mass, cc.values()[i]);
            }
            Ok(HullVerdict::Inside { combination })
        }
        LpStatus::Infeasible => {
            let y = sol.farkas.expect("infeasible LPs carry a Farkas vector");
            // Rows are equalities; with weights w_i = -y_i and threshold
            // t = y_k the Farkas inequalities become the separation below.
            let weights: Vec<Rat> = y[..k].iter().map(|v| -v).collect();
            let threshold = y[k].clone();
            for s in &subsets {
                let dot: Rat = (0..k)
                    .filter(|i| s & (1 << i) != 0)
                    .map(|i| weights[i].clone())
                    .sum();
                assert!(dot <= threshold);
            }
            let dot_c: Rat = (0..k).map(|i| &weights[i] * &cc.values()[i]).sum();
            assert!(dot_c > threshold);
            Ok(HullVerdict::Outside { weights, threshold })
        }
        LpStatus::Unbounded => unreachable!("feasibility LP has constant objective"),
    }
}

/// Lower bound on the cover ratio in terms of the edge density:
/// `min(sqrt(e/4), 1 - sqrt(1 - e))`. When the selected square root is
/// irrational, `value` is a rational lower approximation within 2^-48 and
/// `exact` is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgBound {
    pub value: Rat,
    pub exact: bool,
}

pub fn eg_lower_bound(e: &Rat) -> Result<EgBound, CoverError> {
    if e.is_negative() || e > &Rat::one() {
        return Err(CoverError::DensityOutOfRange(e.clone()));
    }
    if *e <= crossing_density() {
        // 1 - sqrt(1 - e), the bipartite-side branch.
        let inner = Rat::one() - e;
        match inner.sqrt_exact() {
            Some(root) => Ok(EgBound {
                value: Rat::one() - root,
                exact: true,
            }),
            None => {
                let (_, hi) = inner.sqrt_bounds(48);
                Ok(EgBound {
                    value: Rat::one() - hi,
                    exact: false,
                })
            }
        }
    } else {
        // sqrt(e) / 2, the clique-side branch.
        match e.sqrt_exact() {
            Some(root) => Ok(EgBound {
                value: root / Rat::int(2),
                exact: true,
            }),
            None => {
                let (lo, _) = e.sqrt_bounds(48);
                Ok(EgBound {
                    value: lo / Rat::int(2),
                    exact: false,
                })
            }
        }
    }
}

/// Maximum edge density of a graphon with cover ratio `d`, together with
/// the maximizing parameter pairs `(clique measure, bipartite side measure)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxgResult {
    pub value: Rat,
    pub maximizers: Vec<(Rat, Rat)>,
}

pub fn maxg(d: &Rat) -> Result<MaxgResult, CoverError> {
    if d.is_negative() || d > &rat(1, 2) {
        return Err(CoverError::DegreeOutOfRange(d.clone()));
    }
    let two_d = Rat::int(2) * d;
    let bipartite_value = &two_d - d * d;
    let clique_value = Rat::int(4) * d * d;
    let bipartite_point = (Rat::zero(), d.clone());
    let clique_point = (two_d, Rat::zero());
    Ok(match bipartite_value.cmp(&clique_value) {
        std::cmp::Ordering::Greater => MaxgResult {
            value: bipartite_value,
            maximizers: vec![bipartite_point],
        },
        std::cmp::Ordering::Less => MaxgResult {
            value: clique_value,
            maximizers: vec![clique_point],
        },
        std::cmp::Ordering::Equal => {
            let maximizers = if bipartite_point == clique_point {
                vec![bipartite_point] // d = 0: both constructions vanish
            } else {
                vec![bipartite_point, clique_point]
            };
            MaxgResult {
                value: bipartite_value,
                maximizers,
            }
        }
    })
}

/// The density-e graphon tight on the bipartite side: blocks of measure
/// `1 - sqrt(1-e)` and `sqrt(1-e)`, with value 0 only on the second
/// diagonal block. Degenerates to a single constant block at e in {0, 1}.
pub fn build_psi(e: &Rat) -> Result<StepGraphon, CoverError> {
    if e.is_negative() || e > &Rat::one() {
        return Err(CoverError::DensityOutOfRange(e.clone()));
    }
    let root = (Rat::one() - e)
        .sqrt_exact()
        .ok_or_else(|| CoverError::IrrationalRoot(Rat::one() - e))?;
    let w = if root.is_one() {
        StepGraphon::constant(vec![Rat::one()], Rat::zero()).unwrap()
    } else if root.is_zero() {
        StepGraphon::constant(vec![Rat::one()], Rat::one()).unwrap()
    } else {
        StepGraphon::new(
            vec![Rat::one() - &root, root],
            vec![
                vec![Rat::one(), Rat::one()],
                vec![Rat::one(), Rat::zero()],
            ],
        )
        .unwrap()
    };
    assert_eq!(&w.edge_density(), e);
    Ok(w)
}

/// The density-e graphon tight on the clique side: a clique block of
/// measure `sqrt(e)`. Degenerates to a single constant block at e in {0, 1}.
pub fn build_phi(e: &Rat) -> Result<StepGraphon, CoverError> {
    if e.is_negative() || e > &Rat::one() {
        return Err(CoverError::DensityOutOfRange(e.clone()));
    }
    let root = e
        .sqrt_exact()
        .ok_or_else(|| CoverError::IrrationalRoot(e.clone()))?;
    let w = if root.is_zero() {
        StepGraphon::constant(vec![Rat::one()], Rat::zero()).unwrap()
    } else if root.is_one() {
        StepGraphon::constant(vec![Rat::one()], Rat::one()).unwrap()
    } else {
        StepGraphon::new(
            vec![root.clone(), Rat::one() - root],
            vec![
                vec![Rat::one(), Rat::zero()],
                vec![Rat::zero(), Rat::zero()],
            ],
        )
        .unwrap()
    };
    assert_eq!(&w.edge_density(), e);
    Ok(w)
}

/// Which branch of the bound attains the minimum. At the crossing density
/// 16/25 both branches agree; the tie is labeled `CliqueSide` and flagged
/// by `EgReport::crossing`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EgRegime {
    BipartiteSide,
    CliqueSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremalKind {
    Psi,
    Phi,
}

/// Full report of the density bound on one graphon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgReport {
    pub edge_density: Rat,
    pub tau: Rat,
    pub bound: EgBound,
    pub regime: EgRegime,
    /// True exactly at edge density 16/25, where both branches agree.
    pub crossing: bool,
    pub tight: bool,
    /// When tight, which extremal graphon `w` is isomorphic to (up to
    /// measure-preserving rearrangement).
    pub isomorphic_to: Option<ExtremalKind>,
}

/// Evaluates the edge-density lower bound on `tau*(w)`. Tightness is
/// decided by exact squared comparisons, so no irrational square root is
/// ever materialized: on the bipartite side tightness is
/// `(1 - tau)^2 = 1 - e`, on the clique side `tau^2 = e/4`.
pub fn eg_check(w: &StepGraphon) -> Result<EgReport, CoverError> {
    let e = w.edge_density();
    let tau = cover_ratio(w)?.tau;
    let bound = eg_lower_bound(&e)?;
    assert!(tau >= bound.value);
    let crossing = e == crossing_density();
    let regime = if e < crossing_density() {
        EgRegime::BipartiteSide
    } else {
        EgRegime::CliqueSide
    };
    let one_minus_tau = Rat::one() - &tau;
    let bipartite_tight = &one_minus_tau * &one_minus_tau == Rat::one() - &e;
    let clique_tight = &tau * &tau == &e / Rat::int(4);
    // At the crossing the two identities coincide (both say tau = 2/5), so
    // checking the regime's own branch plus either at the tie is exact.
    let tight = match regime {
        EgRegime::BipartiteSide => bipartite_tight,
        EgRegime::CliqueSide if crossing => bipartite_tight || clique_tight,
        EgRegime::CliqueSide => clique_tight,
    };
    let mut isomorphic_to = None;
    if tight {
        // Tightness makes the relevant root rational, so the extremal
        // graphon is constructible exactly.
        if bipartite_tight {
            let psi = build_psi(&e).expect("tightness certifies a rational root");
            if is_isomorphic(w, &psi) {
                isomorphic_to = Some(ExtremalKind::Psi);
            }
        }
        if isomorphic_to.is_none() && clique_tight {
            let phi = build_phi(&e).expect("tightness certifies a rational root");
            if is_isomorphic(w, &phi) {
                isomorphic_to = Some(ExtremalKind::Phi);
            }
        }
    }
    Ok(EgReport {
        edge_density: e,
        tau,
        bound,
        regime,
        crossing,
        tight,
        isomorphic_to,
    })
}

/// Canonical form: merge blocks with identical value rows. For symmetric
/// step functions one pass suffices (rows equal on representatives imply
/// rows equal everywhere).
fn coalesce_graphon(w: &StepGraphon) -> StepGraphon {
    let k = w.k();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        let row_i: Vec<&Rat> = (0..k).map(|j| w.value(i, j)).collect();
        match groups.iter().position(|g| {
            let r = g[0];
            (0..k).all(|j| w.value(r, j) == row_i[j])
        }) {
            Some(gi) => groups[gi].push(i),
            None => groups.push(vec![i]),
        }
    }
    let measures: Vec<Rat> = groups
        .iter()
        .map(|g| g.iter().map(|&i| w.measures()[i].clone()).sum())
        .collect();
    let values: Vec<Vec<Rat>> = groups
        .iter()
        .map(|g| {
            groups
                .iter()
                .map(|h| w.value(g[0], h[0]).clone())
                .collect()
        })
        .collect();
    StepGraphon::new(measures, values).expect("merging preserves validity")
}

/// Isomorphism of step graphons up to measure-preserving rearrangement:
/// coalesced forms must agree under some block permutation.
pub fn is_isomorphic(a: &StepGraphon, b: &StepGraphon) -> bool {
    let ca = coalesce_graphon(a);
    let cb = coalesce_graphon(b);
    let k = ca.k();
    if cb.k() != k {
        return false;
    }
    (0..k).permutations(k).any(|perm| {
        (0..k).all(|i| {
            ca.measures()[i] == cb.measures()[perm[i]]
                && (0..k).all(|j| ca.value(i, j) == cb.value(perm[i], perm[j]))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graphon(measures: Vec<Rat>, values: Vec<Vec<i64>>) -> StepGraphon {
        let values = values
            .into_iter()
            .map(|row| row.into_iter().map(Rat::int).collect())
            .collect();
        StepGraphon::new(measures, values).unwrap()
    }

    fn complete_bipartite(a: Rat, b: Rat) -> StepGraphon {
        graphon(vec![a, b], vec![vec![0, 1], vec![1, 0]])
    }

    fn cycle5() -> StepGraphon {
        let mut values = vec![vec![0i64; 5]; 5];
        for i in 0..5 {
            values[i][(i + 1) % 5] = 1;
            values[(i + 1) % 5][i] = 1;
        }
        graphon(vec![rat(1, 5); 5], values)
    }

    #[test]
    fn cover_ratio_frozen_values() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let cert = cover_ratio(&w).unwrap();
        assert_eq!(cert.tau, rat(1, 2));

        // Uneven complete bipartite: cover the smaller side.
        let w = complete_bipartite(rat(1, 3), rat(2, 3));
        let cert = cover_ratio(&w).unwrap();
        assert_eq!(cert.tau, rat(1, 3));
        assert_eq!(cert.cover.values(), &[Rat::one(), Rat::zero()]);

        // Triangle of equal blocks: constant 1/2.
        let w = graphon(
            vec![rat(1, 3); 3],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        );
        assert_eq!(cover_ratio(&w).unwrap().tau, rat(1, 2));

        assert_eq!(cover_ratio(&cycle5()).unwrap().tau, rat(1, 2));

        // Full square on one block forces c = 1 there.
        let w = graphon(vec![rat(1, 4), rat(3, 4)], vec![vec![1, 0], vec![0, 0]]);
        let cert = cover_ratio(&w).unwrap();
        assert_eq!(cert.tau, rat(1, 8));
        assert_eq!(cert.cover.values(), &[rat(1, 2), Rat::zero()]);

        // Zero graphon: empty cover.
        let zero = StepGraphon::constant(vec![Rat::one()], Rat::zero()).unwrap();
        assert_eq!(cover_ratio(&zero).unwrap().tau, Rat::zero());
    }

    #[test]
    fn is_cover_checks_all_support_pairs() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let good = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(3, 10), rat(4, 5)]).unwrap();
        assert!(is_cover(&good, &w));
        let bad = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(3, 10), rat(3, 5)]).unwrap();
        assert!(!is_cover(&bad, &w));

        // Diagonal support needs c_i >= 1/2.
        let sq = graphon(vec![Rat::one()], vec![vec![1]]);
        let half = StepCover::new(vec![Rat::one()], vec![rat(1, 2)]).unwrap();
        let less = StepCover::new(vec![Rat::one()], vec![rat(49, 100)]).unwrap();
        assert!(is_cover(&half, &sq));
        assert!(!is_cover(&less, &sq));

        // Mixed partitions are refined before checking.
        let c = StepCover::new(vec![rat(1, 3), rat(2, 3)], vec![Rat::one(), rat(1, 4)]).unwrap();
        assert!(!is_cover(&c, &w));
    }

    #[test]
    fn extreme_covers_of_single_edge_and_triangle() {
        // Single cross edge: vertices (0,1), (1,0), (1,1).
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let ext = extreme_covers(&w, DEFAULT_COVER_CAP).unwrap();
        let values: Vec<Vec<Rat>> = ext.iter().map(|e| e.cover.values().to_vec()).collect();
        assert_eq!(
            values,
            vec![
                vec![Rat::zero(), Rat::one()],
                vec![Rat::one(), Rat::zero()],
                vec![Rat::one(), Rat::one()],
            ]
        );
        assert!(ext.iter().all(|e| e.class == CoverClass::Integral));
        assert_eq!(ext[0].tight_pairs, vec![(0, 1)]);
        assert_eq!(ext[2].tight_pairs, vec![]);

        // Triangle: the three edge-covers, the all-ones cover, and the
        // half-integral center.
        let tri = graphon(
            vec![rat(1, 3); 3],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        );
        let ext = extreme_covers(&tri, DEFAULT_COVER_CAP).unwrap();
        let values: Vec<Vec<Rat>> = ext.iter().map(|e| e.cover.values().to_vec()).collect();
        assert_eq!(values.len(), 5);
        assert!(values.contains(&vec![rat(1, 2), rat(1, 2), rat(1, 2)]));
        assert!(values.contains(&vec![Rat::one(), Rat::one(), Rat::one()]));
        assert!(values.contains(&vec![Rat::zero(), Rat::one(), Rat::one()]));
        let center = ext
            .iter()
            .find(|e| e.cover.values()[0] == rat(1, 2))
            .unwrap();
        assert_eq!(center.class, CoverClass::HalfIntegral);
        assert_eq!(center.tight_pairs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn bipartite_extremes_are_integral_odd_cycle_is_not() {
        let w = complete_bipartite(rat(1, 3), rat(2, 3));
        for e in extreme_covers(&w, DEFAULT_COVER_CAP).unwrap() {
            assert_eq!(e.class, CoverClass::Integral);
        }
        let ext = extreme_covers(&cycle5(), DEFAULT_COVER_CAP).unwrap();
        assert!(ext.iter().any(|e| e.class == CoverClass::HalfIntegral));
    }

    #[test]
    fn decompose_half_mode_frozen_example() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(3, 10), rat(4, 5)]).unwrap();
        let d = decompose_cover(&c, &w, DecomposeMode::Half).unwrap();
        assert_eq!(d.plus.values(), &[rat(1, 2), rat(3, 5)]);
        assert_eq!(d.minus.values(), &[rat(1, 10), Rat::one()]);
    }

    #[test]
    fn decompose_bipartite_mode_frozen_example() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(3, 10), rat(9, 10)]).unwrap();
        let d = decompose_cover(&c, &w, DecomposeMode::BipartiteIntegral).unwrap();
        assert_eq!(d.plus.values(), &[rat(3, 5), rat(4, 5)]);
        assert_eq!(d.minus.values(), &[Rat::zero(), Rat::one()]);

        // The graphon must be bipartite for this mode.
        let tri = graphon(
            vec![rat(1, 3); 3],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        );
        let c = StepCover::new(vec![rat(1, 3); 3], vec![rat(1, 2); 3]).unwrap();
        assert!(matches!(
            decompose_cover(&c, &tri, DecomposeMode::BipartiteIntegral),
            Err(CoverError::NotBipartite)
        ));
    }

    #[test]
    fn decompose_fixed_points() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), Rat::one()]).unwrap();
        let d = decompose_cover(&c, &w, DecomposeMode::Half).unwrap();
        assert_eq!(d.plus, d.minus);
        assert_eq!(d.plus.values(), c.values());

        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![Rat::zero(), Rat::one()]).unwrap();
        let d = decompose_cover(&c, &w, DecomposeMode::BipartiteIntegral).unwrap();
        assert_eq!(d.plus, d.minus);
    }

    #[test]
    fn decompose_rejects_non_covers() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(1, 10), rat(1, 10)]).unwrap();
        assert!(matches!(
            decompose_cover(&c, &w, DecomposeMode::Half),
            Err(CoverError::NotACover)
        ));
    }

    #[test]
    fn hull_membership_on_single_edge() {
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        // (1/2, 3/4) = 1/4 (1,0) + 1/4 (0,1) + ... solvable; check Inside.
        let c = StepCover::new(vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(3, 4)]).unwrap();
        match in_integral_cover_hull(&c, &w, DEFAULT_COVER_CAP).unwrap() {
            HullVerdict::Inside { combination } => {
                let total: Rat = combination.iter().map(|(_, l)| l.clone()).sum();
                assert!(total.is_one());
            }
            v => panic!("expected Inside, got {v:?}"),
        }
    }

    #[test]
    fn constant_half_on_odd_cycle_is_outside_hull() {
        let c = StepCover::new(vec![rat(1, 5); 5], vec![rat(1, 2); 5]).unwrap();
        match in_integral_cover_hull(&c, &cycle5(), DEFAULT_COVER_CAP).unwrap() {
            HullVerdict::Outside { weights, threshold } => {
                // Spot-check the separation on one integral cover.
                let s = [0usize, 1, 2, 3]; // covers all edges of the 5-cycle
                let dot: Rat = s.iter().map(|&i| weights[i].clone()).sum();
                assert!(dot <= threshold);
                let dot_c: Rat = weights.iter().map(|w| w * rat(1, 2)).sum();
                assert!(dot_c > threshold);
            }
            v => panic!("expected Outside, got {v:?}"),
        }
    }

    #[test]
    fn eg_bound_branches_and_crossing() {
        assert_eq!(
            eg_lower_bound(&rat(9, 25)).unwrap(),
            EgBound {
                value: rat(1, 5),
                exact: true
            }
        );
        assert_eq!(
            eg_lower_bound(&rat(81, 100)).unwrap(),
            EgBound {
                value: rat(9, 20),
                exact: true
            }
        );
        assert_eq!(
            eg_lower_bound(&crossing_density()).unwrap(),
            EgBound {
                value: rat(2, 5),
                exact: true
            }
        );
        assert_eq!(eg_lower_bound(&Rat::zero()).unwrap().value, Rat::zero());
        assert_eq!(eg_lower_bound(&Rat::one()).unwrap().value, rat(1, 2));

        // Inexact branch: value is a strict lower bound close to the root.
        let b = eg_lower_bound(&rat(1, 2)).unwrap();
        assert!(!b.exact);
        // 1 - sqrt(1/2) = 0.29289...
        let v = b.value.to_f64();
        assert!(v < 0.2928932188134525 && v > 0.2928932188134524 - 1e-12);

        assert!(eg_lower_bound(&rat(3, 2)).is_err());
    }

    #[test]
    fn maxg_regimes() {
        assert_eq!(
            maxg(&rat(1, 5)).unwrap(),
            MaxgResult {
                value: rat(9, 25),
                maximizers: vec![(Rat::zero(), rat(1, 5))],
            }
        );
        assert_eq!(
            maxg(&rat(9, 20)).unwrap(),
            MaxgResult {
                value: rat(81, 100),
                maximizers: vec![(rat(9, 10), Rat::zero())],
            }
        );
        assert_eq!(
            maxg(&rat(2, 5)).unwrap(),
            MaxgResult {
                value: rat(16, 25),
                maximizers: vec![(Rat::zero(), rat(2, 5)), (rat(4, 5), Rat::zero())],
            }
        );
        assert!(maxg(&rat(3, 5)).is_err());

        // maxg inverts the lower bound on exact inputs.
        for d in [rat(1, 10), rat(1, 4), rat(2, 5), rat(9, 20), rat(1, 2)] {
            let e = maxg(&d).unwrap().value;
            let back = eg_lower_bound(&e).unwrap();
            assert!(back.exact);
            assert_eq!(back.value, d);
        }
    }

    #[test]
    fn extremal_graphons_have_expected_density_and_tau() {
        let psi = build_psi(&rat(9, 25)).unwrap();
        assert_eq!(psi.measures(), &[rat(1, 5), rat(4, 5)]);
        assert_eq!(cover_ratio(&psi).unwrap().tau, rat(1, 5));

        let phi = build_phi(&rat(9, 25)).unwrap();
        assert_eq!(phi.measures(), &[rat(3, 5), rat(2, 5)]);
        assert_eq!(cover_ratio(&phi).unwrap().tau, rat(3, 10));

        // Degenerate endpoints become single constant blocks.
        assert_eq!(build_psi(&Rat::zero()).unwrap().k(), 1);
        assert_eq!(build_psi(&Rat::one()).unwrap().k(), 1);
        assert_eq!(build_phi(&Rat::zero()).unwrap().k(), 1);

        assert!(matches!(
            build_psi(&rat(1, 2)),
            Err(CoverError::IrrationalRoot(_))
        ));
    }

    #[test]
    fn eg_check_tight_cases_identify_extremals() {
        let psi = build_psi(&rat(9, 25)).unwrap();
        let report = eg_check(&psi).unwrap();
        assert_eq!(report.regime, EgRegime::BipartiteSide);
        assert!(!report.crossing);
        assert!(report.tight);
        assert_eq!(report.isomorphic_to, Some(ExtremalKind::Psi));

        let phi = build_phi(&rat(81, 100)).unwrap();
        let report = eg_check(&phi).unwrap();
        assert_eq!(report.regime, EgRegime::CliqueSide);
        assert!(report.tight);
        assert_eq!(report.isomorphic_to, Some(ExtremalKind::Phi));

        // At the crossing both extremal graphons are tight; the tied regime
        // is labeled clique-side.
        let psi_c = build_psi(&crossing_density()).unwrap();
        let report = eg_check(&psi_c).unwrap();
        assert_eq!(report.regime, EgRegime::CliqueSide);
        assert!(report.crossing);
        assert!(report.tight);
        assert_eq!(report.isomorphic_to, Some(ExtremalKind::Psi));
        let phi_c = build_phi(&crossing_density()).unwrap();
        let report = eg_check(&phi_c).unwrap();
        assert!(report.crossing);
        assert!(report.tight);
        assert_eq!(report.isomorphic_to, Some(ExtremalKind::Phi));
    }

    #[test]
    fn eg_check_non_tight_case() {
        // 5-cycle: e = 2/5 < 16/25, tau = 1/2 but 1 - sqrt(3/5) < 1/2, and
        // (1 - 1/2)^2 = 1/4 != 3/5, so the bound is strict.
        let report = eg_check(&cycle5()).unwrap();
        assert_eq!(report.regime, EgRegime::BipartiteSide);
        assert!(!report.tight);
        assert_eq!(report.isomorphic_to, None);
        assert!(report.tau > report.bound.value);
    }

    #[test]
    fn isomorphism_is_permutation_and_merge_invariant() {
        let psi = build_psi(&rat(9, 25)).unwrap();
        // Same graphon with the second block split in two and sides swapped.
        let split = StepGraphon::new(
            vec![rat(2, 5), rat(1, 5), rat(2, 5)],
            vec![
                vec![Rat::zero(), Rat::one(), Rat::zero()],
                vec![Rat::one(), Rat::one(), Rat::one()],
                vec![Rat::zero(), Rat::one(), Rat::zero()],
            ],
        )
        .unwrap();
        assert!(is_isomorphic(&psi, &split));
        assert!(!is_isomorphic(&psi, &build_phi(&rat(9, 25)).unwrap()));

        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        assert!(!is_isomorphic(&psi, &w));
    }

    #[test]
    fn cover_witness_is_lexicographically_canonical() {
        // Both sides of the even bipartite graphon give mass 1/2; the
        // lex-min witness picks the constant 1/2... or the smaller vector.
        let w = complete_bipartite(rat(1, 2), rat(1, 2));
        let cert = cover_ratio(&w).unwrap();
        assert_eq!(cert.cover.values(), &[Rat::zero(), Rat::one()]);
    }
}
