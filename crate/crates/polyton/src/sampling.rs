//! W-random graphs, certified finite matching/cover optima, and the
//! sampling convergence experiment.
//!
//! Sampling is exact over the rationals: block membership and edge
//! indicators are drawn with uniform integers obtained by modulo rejection
//! from `ChaCha8Rng` words, so no floating-point comparison ever decides an
//! edge. The draw order is part of the contract: first one block draw per
//! vertex `0..n`, then one draw per vertex pair `(i, j)` with `i < j` in
//! row-major order, skipping pairs whose edge probability is 0 or 1.

use crate::covers::CoverError;
use crate::matchings::MatchingError;
use crate::rat::{rat, Rat};
use crate::step::{StepCover, StepGraphon};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SamplingError {
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("sample size {got} is above the cap of {cap}")]
    SizeCap { got: usize, cap: usize },
    #[error("probability denominators above 2^64 are not supported for sampling")]
    DenominatorTooLarge,
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Largest sample size accepted by the experiment driver.
pub const DEFAULT_SAMPLE_CAP: usize = 20_000;

/// A graph sampled from a step graphon, with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledGraph {
    pub n: usize,
    pub seed: u64,
    /// Graphon block of each vertex.
    pub blocks: Vec<usize>,
    /// Symmetric 0/1 matrix with zero diagonal.
    pub adjacency: Vec<Vec<u8>>,
}

/// Uniform integer in `[0, bound)` by modulo rejection: words whose residue
/// class is overrepresented in `[0, 2^64)` are redrawn.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let r = rng.next_u64();
        if r < limit {
            return r % bound;
        }
    }
}

fn to_u64(b: &BigInt) -> Result<u64, SamplingError> {
    b.to_u64().ok_or(SamplingError::DenominatorTooLarge)
}

/// Samples the W-random graph `G(n, w)`: vertices draw independent blocks
/// with probabilities equal to the block measures, then each pair is joined
/// independently with probability `w` at its blocks.
pub fn sample_wrandom(
    w: &StepGraphon,
    n: usize,
    seed: u64,
) -> Result<SampledGraph, SamplingError> {
    if n == 0 {
        return Err(SamplingError::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Integer block thresholds over a common denominator.
    let mut lcd = BigInt::from(1);
    for m in w.measures() {
        lcd = lcd.lcm(m.denom());
    }
    let lcd_u = to_u64(&lcd)?;
    let mut cumulative: Vec<u64> = Vec::with_capacity(w.k());
    let mut acc = BigInt::from(0);
    for m in w.measures() {
        acc += m.numer() * (&lcd / m.denom());
        cumulative.push(to_u64(&acc)?);
    }
    debug_assert_eq!(*cumulative.last().unwrap(), lcd_u);

    let blocks: Vec<usize> = (0..n)
        .map(|_| {
            let r = uniform_below(&mut rng, lcd_u);
            cumulative.partition_point(|&c| c <= r)
        })
        .collect();

    let mut adjacency = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let p = w.value(blocks[i], blocks[j]);
            let edge = if p.is_zero() {
                false
            } else if p.is_one() {
                true
            } else {
                let den = to_u64(p.denom())?;
                let num = to_u64(p.numer())?;
                uniform_below(&mut rng, den) < num
            };
            if edge {
                adjacency[i][j] = 1;
                adjacency[j][i] = 1;
            }
        }
    }
    Ok(SampledGraph {
        n,
        seed,
        blocks,
        adjacency,
    })
}

/// The empirical graphon of a sampled graph: `n` equal blocks carrying the
/// adjacency matrix.
pub fn graph_to_stepgraphon(g: &SampledGraph) -> StepGraphon {
    let values = g
        .adjacency
        .iter()
        .map(|row| row.iter().map(|&a| Rat::int(a as i64)).collect())
        .collect();
    StepGraphon::new(vec![rat(1, g.n as i64); g.n], values).unwrap()
}

/// Certified fractional matching and cover optimum of a finite simple
/// graph: `nu` equals both the matching mass and the cover mass, so each
/// side certifies the other by weak duality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteOptimum {
    pub nu: Rat,
    /// Half-integral edge weights `(u, v, weight)` with `u < v`.
    pub matching: Vec<(usize, usize, Rat)>,
    /// Half-integral vertex cover values.
    pub cover: Vec<Rat>,
}

/// Computes the fractional matching number of a finite simple graph through
/// its bipartite double cover: a maximum integral matching there halves to
/// an optimal fractional matching, and the König vertex cover halves to an
/// optimal fractional cover of the same mass. Both certificates are
/// re-verified before returning.
pub fn fractional_optimum(adjacency: &[Vec<u8>]) -> FiniteOptimum {
    let n = adjacency.len();
    for (i, row) in adjacency.iter().enumerate() {
        assert_eq!(row.len(), n, "adjacency must be square");
        assert_eq!(row[i], 0, "self-loops are not supported");
        for j in 0..n {
            assert_eq!(row[j], adjacency[j][i], "adjacency must be symmetric");
        }
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..n).filter(|&v| adjacency[u][v] == 1).collect())
        .collect();

    // Maximum matching in the double cover (left copy -> right copy) by
    // augmenting paths in ascending vertex order.
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    let mut match_left: Vec<Option<usize>> = vec![None; n];
    fn augment(
        u: usize,
        neighbors: &[Vec<usize>],
        match_right: &mut [Option<usize>],
        match_left: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &v in &neighbors[u] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            if match_right[v].is_none()
                || augment(match_right[v].unwrap(), neighbors, match_right, match_left, visited)
            {
                match_right[v] = Some(u);
                match_left[u] = Some(v);
                return true;
            }
        }
        false
    }
    for u in 0..n {
        let mut visited = vec![false; n];
        augment(u, &neighbors, &mut match_right, &mut match_left, &mut visited);
    }
    let matched_pairs = match_left.iter().flatten().count();

    // König: Z = left vertices reachable from unmatched left vertices by
    // alternating paths; the cover is (L \ Z) union (R intersect Z).
    let mut z_left = vec![false; n];
    let mut z_right = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| match_left[u].is_none()).collect();
    for &u in &stack {
        z_left[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &neighbors[u] {
            if z_right[v] {
                continue;
            }
            z_right[v] = true;
            if let Some(u2) = match_right[v] {
                if !z_left[u2] {
                    z_left[u2] = true;
                    stack.push(u2);
                }
            }
        }
    }
    let half = rat(1, 2);
    let cover: Vec<Rat> = (0..n)
        .map(|v| {
            let in_left = !z_left[v];
            let in_right = z_right[v];
            Rat::int(in_left as i64 + in_right as i64) * &half
        })
        .collect();

    // Fractional matching: average each double-cover edge with its mirror.
    let mut matching: Vec<(usize, usize, Rat)> = Vec::new();
    for u in 0..n {
        for &v in &neighbors[u] {
            if u < v {
                let forward = match_left[u] == Some(v);
                let backward = match_left[v] == Some(u);
                let weight = Rat::int(forward as i64 + backward as i64) * &half;
                if !weight.is_zero() {
                    matching.push((u, v, weight));
                }
            }
        }
    }

    // Certify: matching degrees, cover inequalities, and equality of sizes.
    let mut degree = vec![Rat::zero(); n];
    let mut matching_mass = Rat::zero();
    for (u, v, wt) in &matching {
        degree[*u] += wt;
        degree[*v] += wt;
        matching_mass += wt;
    }
    assert!(degree.iter().all(|d| d <= &Rat::one()));
    for u in 0..n {
        for &v in &neighbors[u] {
            assert!(&cover[u] + &cover[v] >= Rat::one());
        }
    }
    let cover_mass: Rat = cover.iter().cloned().sum();
    let nu = Rat::int(matched_pairs as i64) * &half;
    assert_eq!(matching_mass, nu);
    assert_eq!(cover_mass, nu, "König equality failed");
    FiniteOptimum {
        nu,
        matching,
        cover,
    }
}

/// One sampled instance of the convergence experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub seed: u64,
    /// Fractional matching ratio `nu_f(G)/n` of the sample.
    pub nu: Rat,
    /// Fractional cover ratio of the sample; equals `nu` by duality.
    pub tau: Rat,
    /// `|nu - nu(W)|`.
    pub abs_error: Rat,
    /// Smallest uniform lift making the blockwise-averaged sample cover a
    /// cover of `W`.
    pub cover_slack: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub nu_w: Rat,
    pub rows: Vec<ConvergenceRow>,
}

/// Samples `G(n, w)` for every `(n, seed)` pair, certifies the finite
/// optima, and relates them back to `w`: the absolute error against
/// `nu(w)`, and the slack needed to project the sample's cover onto a
/// fractional cover of `w`. Rows are ordered by `(n, seed)` regardless of
/// the thread count.
pub fn convergence_experiment(
    w: &StepGraphon,
    ns: &[usize],
    seeds: &[u64],
    threads: usize,
) -> Result<ConvergenceReport, SamplingError> {
    for &n in ns {
        if n == 0 {
            return Err(SamplingError::EmptySample);
        }
        if n > DEFAULT_SAMPLE_CAP {
            return Err(SamplingError::SizeCap {
                got: n,
                cap: DEFAULT_SAMPLE_CAP,
            });
        }
    }
    let nu_w = crate::matchings::matching_ratio(w)?.nu;
    let mut jobs: Vec<(usize, u64)> = Vec::new();
    for &n in ns {
        for &seed in seeds {
            jobs.push((n, seed));
        }
    }
    jobs.sort();
    jobs.dedup();

    let run_job = |&(n, seed): &(usize, u64)| -> Result<ConvergenceRow, SamplingError> {
        let g = sample_wrandom(w, n, seed)?;
        let opt = fractional_optimum(&g.adjacency);
        let nu = &opt.nu / Rat::int(n as i64);
        let abs_error = (&nu - &nu_w).abs();

        // Average the sample cover over each graphon block; empty blocks
        // average to zero and rely on the slack.
        let k = w.k();
        let mut sums = vec![Rat::zero(); k];
        let mut counts = vec![0usize; k];
        for (v, &b) in g.blocks.iter().enumerate() {
            sums[b] += &opt.cover[v];
            counts[b] += 1;
        }
        let means: Vec<Rat> = (0..k)
            .map(|i| {
                if counts[i] == 0 {
                    Rat::zero()
                } else {
                    &sums[i] / Rat::int(counts[i] as i64)
                }
            })
            .collect();
        let mut slack = Rat::zero();
        for (i, j) in w.support_pairs() {
            let gap = (Rat::one() - &means[i] - &means[j]) / Rat::int(2);
            slack = Rat::max(slack, gap);
        }
        let lifted: Vec<Rat> = means
            .iter()
            .map(|m| Rat::min(m + &slack, Rat::one()))
            .collect();
        let cover = StepCover::new(w.measures().to_vec(), lifted).expect("lift stays in [0,1]");
        assert!(crate::covers::is_cover(&cover, w), "lifted cover must cover w");
        Ok(ConvergenceRow {
            n,
            seed,
            nu: nu.clone(),
            tau: nu,
            abs_error,
            cover_slack: slack,
        })
    };

    let threads = threads.max(1).min(jobs.len().max(1));
    let rows: Vec<ConvergenceRow> = if threads <= 1 || jobs.len() <= 1 {
        jobs.iter().map(&run_job).collect::<Result<_, _>>()?
    } else {
        let results: std::sync::Mutex<Vec<Option<Result<ConvergenceRow, SamplingError>>>> =
            std::sync::Mutex::new(vec![None; jobs.len()]);
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if idx >= jobs.len() {
                        break;
                    }
                    let out = run_job(&jobs[idx]);
                    results.lock().unwrap()[idx] = Some(out);
                });
            }
        });
        results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("every job index is claimed"))
            .collect::<Result<_, _>>()?
    };
    Ok(ConvergenceReport { nu_w, rows })
}
