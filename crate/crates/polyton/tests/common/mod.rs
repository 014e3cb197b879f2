//! Seeded generators shared by the integration suites. All randomness is
//! ChaCha8 so every run reproduces exactly.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use polyton::rat::{rat, Rat};
use polyton::{StepCover, StepGraphon};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    assert!(bound > 0);
    (rng.next_u64() % bound as u64) as usize
}

/// Uniform-ish rational in [0, 1] with denominator at most `max_den`.
pub fn random_unit_rat(rng: &mut ChaCha8Rng, max_den: usize) -> Rat {
    let den = 1 + pick(rng, max_den);
    let num = pick(rng, den + 1);
    rat(num as i64, den as i64)
}

/// Random partition of [0, 1) into `k` blocks: integer parts over a common
/// denominator, so refinement denominators stay small.
pub fn random_measures(rng: &mut ChaCha8Rng, k: usize, max_part: usize) -> Vec<Rat> {
    let parts: Vec<i64> = (0..k).map(|_| 1 + pick(rng, max_part) as i64).collect();
    let total: i64 = parts.iter().sum();
    parts.into_iter().map(|p| rat(p, total)).collect()
}

/// Random step graphon: entries are 0, 1 or a proper fraction.
pub fn random_graphon(rng: &mut ChaCha8Rng, max_k: usize, max_den: usize) -> StepGraphon {
    let k = 1 + pick(rng, max_k);
    let measures = random_measures(rng, k, 4);
    let mut values = vec![vec![Rat::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = match pick(rng, 10) {
                0..=2 => Rat::zero(),
                3..=4 => Rat::one(),
                _ => random_unit_rat(rng, max_den),
            };
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    StepGraphon::new(measures, values).unwrap()
}

/// Random 0/1 support pattern (may include diagonal support).
pub fn random_support(rng: &mut ChaCha8Rng, max_k: usize) -> StepGraphon {
    let k = 1 + pick(rng, max_k);
    let measures = random_measures(rng, k, 4);
    let mut values = vec![vec![Rat::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = if pick(rng, 2) == 0 {
                Rat::one()
            } else {
                Rat::zero()
            };
            values[i][j] = v.clone();
            values[j][i] = v;
        }
    }
    StepGraphon::new(measures, values).unwrap()
}

/// Random bipartite 0/1 support: blocks are split into two sides and edges
/// only ever cross the split.
pub fn random_bipartite_support(rng: &mut ChaCha8Rng, max_k: usize) -> StepGraphon {
    let k = 1 + pick(rng, max_k);
    let measures = random_measures(rng, k, 4);
    let sides: Vec<bool> = (0..k).map(|_| pick(rng, 2) == 0).collect();
    let mut values = vec![vec![Rat::zero(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            if sides[i] != sides[j] && pick(rng, 4) < 3 {
                values[i][j] = Rat::one();
                values[j][i] = Rat::one();
            }
        }
    }
    StepGraphon::new(measures, values).unwrap()
}

/// Random non-bipartite 0/1 support: a random support with a planted odd
/// structure — a self-loop, or a triangle when three blocks exist.
pub fn random_nonbipartite_support(rng: &mut ChaCha8Rng, max_k: usize) -> StepGraphon {
    let base = random_support(rng, max_k);
    let k = base.k();
    let mut values: Vec<Vec<Rat>> = base.values().to_vec();
    if k >= 3 && pick(rng, 2) == 0 {
        let mut picks = [0usize; 3];
        picks[0] = pick(rng, k);
        picks[1] = (picks[0] + 1 + pick(rng, k - 1)) % k;
        loop {
            picks[2] = pick(rng, k);
            if picks[2] != picks[0] && picks[2] != picks[1] {
                break;
            }
        }
        for a in 0..3 {
            let (u, v) = (picks[a], picks[(a + 1) % 3]);
            values[u][v] = Rat::one();
            values[v][u] = Rat::one();
        }
        // A planted triangle is an odd cycle unless a self-loop already
        // shortcuts it; either way the support is non-bipartite.
    } else {
        let i = pick(rng, k);
        values[i][i] = Rat::one();
    }
    StepGraphon::new(base.measures().to_vec(), values).unwrap()
}

/// Random fractional cover of `w`: free values on an independent set of
/// blocks, 1 everywhere else.
pub fn random_cover_of(rng: &mut ChaCha8Rng, w: &StepGraphon, max_den: usize) -> StepCover {
    let k = w.k();
    let mut independent = vec![false; k];
    for i in 0..k {
        if w.value(i, i).is_positive() {
            continue;
        }
        let clashes = (0..k)
            .any(|j| independent[j] && w.value(i, j).is_positive());
        if !clashes && pick(rng, 3) > 0 {
            independent[i] = true;
        }
    }
    let values = (0..k)
        .map(|i| {
            if independent[i] {
                random_unit_rat(rng, max_den)
            } else {
                Rat::one()
            }
        })
        .collect();
    StepCover::new(w.measures().to_vec(), values).unwrap()
}

/// Graphon-valued perturbation of `w`: every symmetric cell moves by less
/// than `bound`, pushed inward at the endpoints 0 and 1. Requires `bound`
/// to be smaller than every interior value's distance to {0, 1}; intended
/// for the tiny `delta` budgets of the transfer pipeline. The cut norm of
/// the difference is below `bound`.
pub fn perturbed(rng: &mut ChaCha8Rng, w: &StepGraphon, bound: &Rat) -> StepGraphon {
    let k = w.k();
    let mut values: Vec<Vec<Rat>> = w.values().to_vec();
    for i in 0..k {
        for j in i..k {
            let num = pick(rng, 5) as i64; // 0..=4 eighths of the bound
            let delta = bound * rat(num, 8);
            let v = w.value(i, j);
            let moved = if v.is_zero() {
                delta
            } else if v.is_one() {
                v - &delta
            } else if pick(rng, 2) == 0 {
                v + &delta
            } else {
                v - &delta
            };
            values[i][j] = moved.clone();
            values[j][i] = moved;
        }
    }
    StepGraphon::new(w.measures().to_vec(), values).unwrap()
}

/// The quotient graphon of the cycle C_k: k equal blocks in a ring.
pub fn cycle_graphon(k: usize) -> StepGraphon {
    assert!(k >= 3);
    let mut values = vec![vec![Rat::zero(); k]; k];
    for i in 0..k {
        let j = (i + 1) % k;
        values[i][j] = Rat::one();
        values[j][i] = Rat::one();
    }
    StepGraphon::new(vec![rat(1, k as i64); k], values).unwrap()
}
