//! Structural properties of step graphons: motif densities, odd-cycle
//! densities, bipartiteness and k-partiteness.
//!
//! All structure here lives on the support graph of the blocks: a step
//! graphon is bipartite (as a graphon, up to null sets) exactly when its
//! block support graph is bipartite, with a self-loop `W(i,i) > 0` counting
//! as an odd closed walk of length 3 inside one block.

use crate::rat::Rat;
use crate::step::StepGraphon;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("motif has {got} vertices, above the cap of {cap}")]
    MotifCap { got: usize, cap: usize },
    #[error("graphon has {got} blocks, above the cap of {cap} for this computation")]
    BlockCap { got: usize, cap: usize },
    #[error("motif edge ({u},{v}) references a vertex >= {n}")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("cycle length must be at least 1, got {0}")]
    BadCycleLength(usize),
    #[error("part count must be at least 1")]
    BadPartCount,
}

/// Largest motif size accepted by `density`.
pub const DEFAULT_MOTIF_CAP: usize = 8;
/// Largest block count accepted by `is_k_partite`.
pub const DEFAULT_KPARTITE_CAP: usize = 12;

/// A finite simple graph used as a motif.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl FiniteGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<FiniteGraph, StructureError> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(StructureError::EdgeOutOfRange { u, v, n });
            }
        }
        Ok(FiniteGraph { n, edges })
    }

    pub fn cycle(k: usize) -> FiniteGraph {
        assert!(k >= 3, "cycles need at least 3 vertices");
        let edges = (0..k).map(|i| (i, (i + 1) % k)).collect();
        FiniteGraph { n: k, edges }
    }

    pub fn complete(k: usize) -> FiniteGraph {
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                edges.push((i, j));
            }
        }
        FiniteGraph { n: k, edges }
    }

    pub fn path(k: usize) -> FiniteGraph {
        assert!(k >= 1);
        let edges = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        FiniteGraph { n: k, edges }
    }
}

/// Exact homomorphism density `t(F, W)`: sum over all block assignments of
/// the product of edge values, weighted by block measures. Costs up to
/// `k^{v(F)}`, hence the motif cap.
pub fn density(motif: &FiniteGraph, w: &StepGraphon, cap: usize) -> Result<Rat, StructureError> {
    if motif.n > cap {
        return Err(StructureError::MotifCap { got: motif.n, cap });
    }
    // Edges grouped by their larger endpoint so each vertex assignment
    // multiplies in exactly the factors it completes.
    let mut edges_at = vec![Vec::new(); motif.n];
    for &(u, v) in &motif.edges {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        if lo == hi {
            edges_at[hi].push(hi); // self-loop: both endpoints equal
        } else {
            edges_at[hi].push(lo);
        }
    }
    let k = w.k();
    let mut total = Rat::zero();
    let mut assignment = vec![0usize; motif.n];
    let mut partial = vec![Rat::one(); motif.n + 1];

    // Depth-first over assignments with zero-pruning.
    let mut depth = 0usize;
    'outer: loop {
        if depth == motif.n {
            total += partial[depth].clone();
            // backtrack
            loop {
                if depth == 0 {
                    break 'outer;
                }
                depth -= 1;
                if assignment[depth] + 1 < k {
                    assignment[depth] += 1;
                    break;
                }
            }
            continue;
        }
        // Try current assignment[depth]; compute the factor.
        let b = assignment[depth];
        let mut factor = &partial[depth] * &w.measures()[b];
        for &other in &edges_at[depth] {
            if factor.is_zero() {
                break;
            }
            let ob = if other == depth { b } else { assignment[other] };
            factor *= w.value(ob, b);
        }
        if factor.is_zero() {
            // Prune: advance this digit or backtrack.
            loop {
                if assignment[depth] + 1 < k {
                    assignment[depth] += 1;
                    break;
                }
                if depth == 0 {
                    break 'outer;
                }
                assignment[depth] = 0;
                depth -= 1;
            }
            continue;
        }
        partial[depth + 1] = factor;
        depth += 1;
        if depth < motif.n {
            assignment[depth] = 0;
        }
    }
    Ok(total)
}

/// Exact cycle density `t(C_j, W) = tr((D V)^j)` where `D` is the diagonal
/// of block measures and `V` the value matrix. Agrees with `density` on
/// cycle motifs (cross-checked in tests) at polynomial cost.
pub fn odd_cycle_density(w: &StepGraphon, j: usize) -> Result<Rat, StructureError> {
    if j == 0 {
        return Err(StructureError::BadCycleLength(0));
    }
    let k = w.k();
    let dv: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|l| &w.measures()[i] * w.value(i, l)).collect())
        .collect();
    // power = (DV)^j by repeated multiplication (j is small).
    let mut power = dv.clone();
    for _ in 1..j {
        let mut next = vec![vec![Rat::zero(); k]; k];
        for i in 0..k {
            for l in 0..k {
                if power[i][l].is_zero() {
                    continue;
                }
                for c in 0..k {
                    if !dv[l][c].is_zero() {
                        next[i][c] += &power[i][l] * &dv[l][c];
                    }
                }
            }
        }
        power = next;
    }
    Ok((0..k).map(|i| power[i][i].clone()).sum())
}

/// Witness of non-bipartiteness: a closed odd walk through blocks, realized
/// by pairwise disjoint subsets of common measure `alpha` (one inside each
/// listed block; a block listed `r` times contributes `r` disjoint slices of
/// measure `nu/r >= alpha`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddCycleWitness {
    pub blocks: Vec<usize>,
    pub alpha: Rat,
}

impl OddCycleWitness {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Exact validity: odd length, consecutive blocks (cyclically) carry
    /// positive value, and `alpha` fits `r` disjoint slices in every block
    /// visited `r` times.
    pub fn is_valid_for(&self, w: &StepGraphon) -> bool {
        let j = self.blocks.len();
        if j == 0 || j.is_multiple_of(2) || !self.alpha.is_positive() {
            return false;
        }
        for t in 0..j {
            let a = self.blocks[t];
            let b = self.blocks[(t + 1) % j];
            if a >= w.k() || b >= w.k() || !w.value(a, b).is_positive() {
                return false;
            }
        }
        let mut mult = vec![0usize; w.k()];
        for &b in &self.blocks {
            mult[b] += 1;
        }
        mult.iter().enumerate().all(|(b, &r)| {
            r == 0 || &self.alpha * Rat::from(r) <= w.measures()[b]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BipartiteVerdict {
    /// Block index sets of the two sides. For the all-zero graphon with a
    /// single block, `side_b` is empty: any split of that block into two
    /// positive-measure halves realizes the bipartition.
    Bipartite {
        side_a: Vec<usize>,
        side_b: Vec<usize>,
    },
    NotBipartite(OddCycleWitness),
}

impl BipartiteVerdict {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, BipartiteVerdict::Bipartite { .. })
    }
}

/// Decides bipartiteness of the support graph by 2-coloring; on failure
/// returns an explicit odd-cycle witness (self-loops yield the in-block walk
/// `[i, i, i]` with `alpha = nu_i / 3`).
pub fn is_bipartite(w: &StepGraphon) -> BipartiteVerdict {
    let k = w.k();
    for i in 0..k {
        if w.value(i, i).is_positive() {
            let witness = OddCycleWitness {
                blocks: vec![i, i, i],
                alpha: &w.measures()[i] / Rat::int(3),
            };
            debug_assert!(witness.is_valid_for(w));
            return BipartiteVerdict::NotBipartite(witness);
        }
    }
    let mut color = vec![usize::MAX; k];
    let mut parent = vec![usize::MAX; k];
    for root in 0..k {
        if color[root] != usize::MAX {
            continue;
        }
        color[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..k {
                if !w.value(u, v).is_positive() {
                    continue;
                }
                if color[v] == usize::MAX {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    // Odd cycle through the tree paths of u and v.
                    let blocks = odd_cycle_from_conflict(u, v, &parent);
                    let alpha = blocks
                        .iter()
                        .map(|&b| w.measures()[b].clone())
                        .reduce(Rat::min)
                        .expect("cycle is nonempty");
                    let witness = OddCycleWitness { blocks, alpha };
                    debug_assert!(witness.is_valid_for(w));
                    return BipartiteVerdict::NotBipartite(witness);
                }
            }
        }
    }
    let side_a: Vec<usize> = (0..k).filter(|&i| color[i] == 0).collect();
    let side_b: Vec<usize> = (0..k).filter(|&i| color[i] == 1).collect();
    BipartiteVerdict::Bipartite { side_a, side_b }
}

fn odd_cycle_from_conflict(u: usize, v: usize, parent: &[usize]) -> Vec<usize> {
    let chain = |mut x: usize| {
        let mut path = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let pu = chain(u);
    let pv = chain(v);
    // Drop the common suffix down to the lowest common ancestor.
    let mut iu = pu.len();
    let mut iv = pv.len();
    while iu > 1 && iv > 1 && pu[iu - 2] == pv[iv - 2] {
        iu -= 1;
        iv -= 1;
    }
    // u ... lca ... v, closed by the conflicting edge (v, u).
    let mut cycle: Vec<usize> = pu[..iu].to_vec();
    cycle.extend(pv[..iv - 1].iter().rev());
    debug_assert!(cycle.len() % 2 == 1);
    cycle
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPartiteVerdict {
    pub partite: bool,
    /// One color in `0..k` per block when `partite`.
    pub coloring: Option<Vec<usize>>,
}

/// Exact k-partiteness of the support graph via backtracking coloring.
/// Any block with `W(i,i) > 0` rules out every k.
pub fn is_k_partite(
    w: &StepGraphon,
    parts: usize,
    cap: usize,
) -> Result<KPartiteVerdict, StructureError> {
    if parts == 0 {
        return Err(StructureError::BadPartCount);
    }
    let k = w.k();
    if k > cap {
        return Err(StructureError::BlockCap { got: k, cap });
    }
    if (0..k).any(|i| w.value(i, i).is_positive()) {
        return Ok(KPartiteVerdict {
            partite: false,
            coloring: None,
        });
    }
    // Order blocks by descending support degree for earlier pruning.
    let mut order: Vec<usize> = (0..k).collect();
    let degree = |i: usize| (0..k).filter(|&j| w.value(i, j).is_positive()).count();
    order.sort_by_key(|&i| std::cmp::Reverse(degree(i)));

    let mut color = vec![usize::MAX; k];
    if color_blocks(w, &order, 0, parts, &mut color) {
        Ok(KPartiteVerdict {
            partite: true,
            coloring: Some(color),
        })
    } else {
        Ok(KPartiteVerdict {
            partite: false,
            coloring: None,
        })
    }
}

fn color_blocks(
    w: &StepGraphon,
    order: &[usize],
    pos: usize,
    parts: usize,
    color: &mut Vec<usize>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let b = order[pos];
    // Symmetry breaking: only allow one fresh color beyond those in use.
    let used = color.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |&m| m + 1);
    let limit = parts.min(used + 1);
    for c in 0..limit {
        let conflict = (0..w.k())
            .any(|j| color[j] == c && w.value(b, j).is_positive());
        if conflict {
            continue;
        }
        color[b] = c;
        if color_blocks(w, order, pos + 1, parts, color) {
            return true;
        }
        color[b] = usize::MAX;
    }
    false
}
