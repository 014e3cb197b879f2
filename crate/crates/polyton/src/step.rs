//! Step functions on the unit interval: graphons, kernels, covers.
//!
//! A step object is determined by an ordered partition of `[0,1)` into
//! finitely many half-open blocks (given by their measures) together with
//! block-constant values. Because every partition is interval-based and
//! rational, almost-everywhere conditions from the continuous theory become
//! exact per-block conditions here.

use crate::rat::Rat;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("partition must contain at least one block")]
    EmptyPartition,
    #[error("block {index} has non-positive measure {measure}")]
    NonPositiveMeasure { index: usize, measure: Rat },
    #[error("block measures sum to {got}, expected 1")]
    MeasureSum { got: Rat },
    #[error("value matrix has {rows} rows, expected {expected}")]
    RowCount { rows: usize, expected: usize },
    #[error("row {row} has {cols} entries, expected {expected}")]
    ColCount { row: usize, cols: usize, expected: usize },
    #[error("graphon must be symmetric, but values[{i}][{j}] != values[{j}][{i}]")]
    NotSymmetric { i: usize, j: usize },
    #[error("value at ({i},{j}) is {value}, outside [0,1]")]
    ValueOutOfRange { i: usize, j: usize, value: Rat },
    #[error("cover value at block {i} is {value}, outside [0,1]")]
    CoverValueOutOfRange { i: usize, value: Rat },
}

fn check_partition(measures: &[Rat]) -> Result<(), StepError> {
    if measures.is_empty() {
        return Err(StepError::EmptyPartition);
    }
    for (index, m) in measures.iter().enumerate() {
        if !m.is_positive() {
            return Err(StepError::NonPositiveMeasure {
                index,
                measure: m.clone(),
            });
        }
    }
    let total: Rat = measures.iter().sum();
    if !total.is_one() {
        return Err(StepError::MeasureSum { got: total });
    }
    Ok(())
}

fn check_matrix(values: &[Vec<Rat>], rows: usize, cols: usize) -> Result<(), StepError> {
    if values.len() != rows {
        return Err(StepError::RowCount {
            rows: values.len(),
            expected: rows,
        });
    }
    for (row, r) in values.iter().enumerate() {
        if r.len() != cols {
            return Err(StepError::ColCount {
                row,
                cols: r.len(),
                expected: cols,
            });
        }
    }
    Ok(())
}

fn in_unit_interval(v: &Rat) -> bool {
    !v.is_negative() && *v <= Rat::one()
}

/// A step graphon: symmetric, block-constant, values in `[0,1]`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphonJson", into = "GraphonJson")]
pub struct StepGraphon {
    measures: Vec<Rat>,
    values: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct GraphonJson {
    measures: Vec<Rat>,
    values: Vec<Vec<Rat>>,
}

impl TryFrom<GraphonJson> for StepGraphon {
    type Error = StepError;
    fn try_from(raw: GraphonJson) -> Result<Self, StepError> {
        StepGraphon::new(raw.measures, raw.values)
    }
}

impl From<StepGraphon> for GraphonJson {
    fn from(w: StepGraphon) -> GraphonJson {
        GraphonJson {
            measures: w.measures,
            values: w.values,
        }
    }
}

impl std::fmt::Debug for StepGraphon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StepGraphon({:?}; {:?})", self.measures, self.values)
    }
}

impl StepGraphon {
    pub fn new(measures: Vec<Rat>, values: Vec<Vec<Rat>>) -> Result<StepGraphon, StepError> {
        check_partition(&measures)?;
        let k = measures.len();
        check_matrix(&values, k, k)?;
        for i in 0..k {
            for j in 0..k {
                if !in_unit_interval(&values[i][j]) {
                    return Err(StepError::ValueOutOfRange {
                        i,
                        j,
                        value: values[i][j].clone(),
                    });
                }
                if j > i && values[i][j] != values[j][i] {
                    return Err(StepError::NotSymmetric { i: j, j: i });
                }
            }
        }
        Ok(StepGraphon { measures, values })
    }

    /// One-block or multi-block constant graphon.
    pub fn constant(measures: Vec<Rat>, value: Rat) -> Result<StepGraphon, StepError> {
        let k = measures.len();
        StepGraphon::new(measures, vec![vec![value; k]; k])
    }

    pub fn k(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[Rat] {
        &self.measures
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Rat {
        &self.values[i][j]
    }

    /// Integral of the graphon over the unit square.
    pub fn edge_density(&self) -> Rat {
        let mut total = Rat::zero();
        for i in 0..self.k() {
            for j in 0..self.k() {
                if !self.values[i][j].is_zero() {
                    total += &self.measures[i] * &self.measures[j] * &self.values[i][j];
                }
            }
        }
        total
    }

    /// Unordered support pairs `(i, j)` with `i <= j` and `W(i,j) > 0`.
    pub fn support_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.k() {
            for j in i..self.k() {
                if self.values[i][j].is_positive() {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Smallest strictly positive block value, if any.
    pub fn min_positive_value(&self) -> Option<Rat> {
        self.values
            .iter()
            .flatten()
            .filter(|v| v.is_positive())
            .cloned()
            .reduce(Rat::min)
    }

    pub fn max_value(&self) -> Rat {
        self.values
            .iter()
            .flatten()
            .cloned()
            .reduce(Rat::max)
            .expect("graphon has at least one block")
    }

    pub fn to_kernel(&self) -> StepKernel {
        StepKernel {
            row_measures: self.measures.clone(),
            col_measures: self.measures.clone(),
            values: self.values.clone(),
        }
    }

    /// Re-expresses the graphon on a refinement of its partition.
    /// `map[new_block] = old_block`; `measures` are the refined measures.
    pub fn refined(&self, map: &[usize], measures: &[Rat]) -> StepGraphon {
        let values = map
            .iter()
            .map(|&oi| map.iter().map(|&oj| self.values[oi][oj].clone()).collect())
            .collect();
        StepGraphon {
            measures: measures.to_vec(),
            values,
        }
    }
}

/// A signed step kernel in `L^1` of the unit square; row and column
/// partitions may differ.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KernelJson", into = "KernelJson")]
pub struct StepKernel {
    row_measures: Vec<Rat>,
    col_measures: Vec<Rat>,
    values: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct KernelJson {
    row_measures: Vec<Rat>,
    col_measures: Vec<Rat>,
    values: Vec<Vec<Rat>>,
}

impl TryFrom<KernelJson> for StepKernel {
    type Error = StepError;
    fn try_from(raw: KernelJson) -> Result<Self, StepError> {
        StepKernel::new(raw.row_measures, raw.col_measures, raw.values)
    }
}

impl From<StepKernel> for KernelJson {
    fn from(f: StepKernel) -> KernelJson {
        KernelJson {
            row_measures: f.row_measures,
            col_measures: f.col_measures,
            values: f.values,
        }
    }
}

impl std::fmt::Debug for StepKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "StepKernel({:?} x {:?}; {:?})",
            self.row_measures, self.col_measures, self.values
        )
    }
}

impl StepKernel {
    pub fn new(
        row_measures: Vec<Rat>,
        col_measures: Vec<Rat>,
        values: Vec<Vec<Rat>>,
    ) -> Result<StepKernel, StepError> {
        check_partition(&row_measures)?;
        check_partition(&col_measures)?;
        check_matrix(&values, row_measures.len(), col_measures.len())?;
        Ok(StepKernel {
            row_measures,
            col_measures,
            values,
        })
    }

    /// Square kernel on a single partition.
    pub fn square(measures: Vec<Rat>, values: Vec<Vec<Rat>>) -> Result<StepKernel, StepError> {
        StepKernel::new(measures.clone(), measures, values)
    }

    pub fn zero(row_measures: Vec<Rat>, col_measures: Vec<Rat>) -> StepKernel {
        let values = vec![vec![Rat::zero(); col_measures.len()]; row_measures.len()];
        StepKernel {
            row_measures,
            col_measures,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_measures.len()
    }

    pub fn cols(&self) -> usize {
        self.col_measures.len()
    }

    pub fn row_measures(&self) -> &[Rat] {
        &self.row_measures
    }

    pub fn col_measures(&self) -> &[Rat] {
        &self.col_measures
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Rat {
        &self.values[i][j]
    }

    /// True when row and column partitions are the same ordered partition.
    pub fn is_square(&self) -> bool {
        self.row_measures == self.col_measures
    }

    pub fn scaled(&self, factor: &Rat) -> StepKernel {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(&Rat) -> Rat) -> StepKernel {
        StepKernel {
            row_measures: self.row_measures.clone(),
            col_measures: self.col_measures.clone(),
            values: self
                .values
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn transposed(&self) -> StepKernel {
        let values = (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.values[i][j].clone()).collect())
            .collect();
        StepKernel {
            row_measures: self.col_measures.clone(),
            col_measures: self.row_measures.clone(),
            values,
        }
    }

    /// `(f + f^T) / 2` after aligning row and column partitions.
    pub fn symmetrized(&self) -> StepKernel {
        let sq = self.on_common_partition();
        let half = Rat::new(1, 2);
        let values = (0..sq.rows())
            .map(|i| {
                (0..sq.cols())
                    .map(|j| (&sq.values[i][j] + &sq.values[j][i]) * &half)
                    .collect()
            })
            .collect();
        StepKernel {
            row_measures: sq.row_measures.clone(),
            col_measures: sq.col_measures,
            values,
        }
    }

    /// Entrywise sum; partitions must already agree.
    pub fn plus(&self, other: &StepKernel) -> StepKernel {
        assert_eq!(self.row_measures, other.row_measures, "row partition mismatch");
        assert_eq!(self.col_measures, other.col_measures, "col partition mismatch");
        let values = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| &self.values[i][j] + &other.values[i][j])
                    .collect()
            })
            .collect();
        StepKernel {
            row_measures: self.row_measures.clone(),
            col_measures: self.col_measures.clone(),
            values,
        }
    }

    /// Exact `L^1` norm.
    pub fn l1_norm(&self) -> Rat {
        let mut total = Rat::zero();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if !self.values[i][j].is_zero() {
                    total += &self.row_measures[i] * &self.col_measures[j] * self.values[i][j].abs();
                }
            }
        }
        total
    }

    /// Re-expresses the kernel on refinements of its row/column partitions.
    pub fn refined(
        &self,
        row_map: &[usize],
        row_measures: &[Rat],
        col_map: &[usize],
        col_measures: &[Rat],
    ) -> StepKernel {
        let values = row_map
            .iter()
            .map(|&oi| {
                col_map
                    .iter()
                    .map(|&oj| self.values[oi][oj].clone())
                    .collect()
            })
            .collect();
        StepKernel {
            row_measures: row_measures.to_vec(),
            col_measures: col_measures.to_vec(),
            values,
        }
    }

    /// Square version of the kernel whose row and column partitions are both
    /// the common refinement of the two original partitions.
    pub fn on_common_partition(&self) -> StepKernel {
        if self.is_square() {
            return self.clone();
        }
        let r = common_refinement(&[&self.row_measures, &self.col_measures]);
        self.refined(&r.maps[0], &r.measures, &r.maps[1], &r.measures)
    }

    /// Merges row blocks with identical value profiles and column blocks with
    /// identical value profiles. The result represents the same function up to
    /// a measure-preserving rearrangement of rows/columns, so `L^1` and cut
    /// norms are unchanged while the block count can shrink drastically.
    pub fn coalesced(&self) -> StepKernel {
        let (row_measures, values) = coalesce_axis(&self.row_measures, &self.values);
        let cols: Vec<Vec<Rat>> = (0..values[0].len())
            .map(|j| values.iter().map(|r| r[j].clone()).collect())
            .collect();
        let (col_measures, cols) = coalesce_axis(&self.col_measures, &cols);
        let values = (0..row_measures.len())
            .map(|i| (0..col_measures.len()).map(|j| cols[j][i].clone()).collect())
            .collect();
        StepKernel {
            row_measures,
            col_measures,
            values,
        }
    }
}

fn coalesce_axis(measures: &[Rat], rows: &[Vec<Rat>]) -> (Vec<Rat>, Vec<Vec<Rat>>) {
    let mut out_measures: Vec<Rat> = Vec::new();
    let mut out_rows: Vec<Vec<Rat>> = Vec::new();
    for (m, row) in measures.iter().zip(rows) {
        if let Some(pos) = out_rows.iter().position(|r| r == row) {
            out_measures[pos] += m;
        } else {
            out_measures.push(m.clone());
            out_rows.push(row.clone());
        }
    }
    (out_measures, out_rows)
}

/// A fractional vertex cover candidate: one value in `[0,1]` per block.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CoverJson", into = "CoverJson")]
pub struct StepCover {
    measures: Vec<Rat>,
    values: Vec<Rat>,
}

#[derive(Serialize, Deserialize, Clone)]
struct CoverJson {
    measures: Vec<Rat>,
    values: Vec<Rat>,
}

impl TryFrom<CoverJson> for StepCover {
    type Error = StepError;
    fn try_from(raw: CoverJson) -> Result<Self, StepError> {
        StepCover::new(raw.measures, raw.values)
    }
}

impl From<StepCover> for CoverJson {
    fn from(c: StepCover) -> CoverJson {
        CoverJson {
            measures: c.measures,
            values: c.values,
        }
    }
}

impl std::fmt::Debug for StepCover {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StepCover({:?}; {:?})", self.measures, self.values)
    }
}

impl StepCover {
    pub fn new(measures: Vec<Rat>, values: Vec<Rat>) -> Result<StepCover, StepError> {
        check_partition(&measures)?;
        if values.len() != measures.len() {
            return Err(StepError::RowCount {
                rows: values.len(),
                expected: measures.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !in_unit_interval(v) {
                return Err(StepError::CoverValueOutOfRange {
                    i,
                    value: v.clone(),
                });
            }
        }
        Ok(StepCover { measures, values })
    }

    pub fn k(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[Rat] {
        &self.measures
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    /// Integral of the cover function, i.e. its size.
    pub fn total_mass(&self) -> Rat {
        self.measures
            .iter()
            .zip(&self.values)
            .map(|(m, v)| m * v)
            .sum()
    }

    pub fn refined(&self, map: &[usize], measures: &[Rat]) -> StepCover {
        StepCover {
            measures: measures.to_vec(),
            values: map.iter().map(|&o| self.values[o].clone()).collect(),
        }
    }
}

/// Result of overlaying several interval partitions of `[0,1)`.
///
/// `maps[t][new_block]` is the index of the block of input partition `t`
/// containing new block `new_block`.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub measures: Vec<Rat>,
    pub maps: Vec<Vec<usize>>,
}

/// Overlays interval partitions given by block measures. All partitions must
/// sum to 1 (enforced by the step types); the result is the coarsest common
/// refinement.
pub fn common_refinement(parts: &[&[Rat]]) -> Refinement {
    assert!(!parts.is_empty(), "need at least one partition");
    // Collect all interior cumulative boundaries, then sort and dedupe.
    let mut boundaries: Vec<Rat> = Vec::new();
    for p in parts {
        let mut acc = Rat::zero();
        for m in p.iter().take(p.len().saturating_sub(1)) {
            acc += m;
            boundaries.push(acc.clone());
        }
    }
    boundaries.sort();
    boundaries.dedup();
    boundaries.push(Rat::one());

    let mut measures = Vec::with_capacity(boundaries.len());
    let mut prev = Rat::zero();
    for b in &boundaries {
        measures.push(b - &prev);
        prev = b.clone();
    }

    // For each input partition, map each refined block to its parent block by
    // walking cumulative sums in lockstep.
    let mut maps = Vec::with_capacity(parts.len());
    for p in parts {
        let mut map = Vec::with_capacity(measures.len());
        let mut idx = 0usize;
        let mut p_acc = p[0].clone();
        let mut acc = Rat::zero();
        for m in &measures {
            acc += m;
            map.push(idx);
            // Advance to the parent block containing the next refined block.
            while idx + 1 < p.len() && acc >= p_acc {
                idx += 1;
                p_acc += &p[idx];
            }
        }
        maps.push(map);
    }

    Refinement { measures, maps }
}

/// Refines two graphons to their common partition.
pub fn refine_graphons(a: &StepGraphon, b: &StepGraphon) -> (StepGraphon, StepGraphon, Refinement) {
    let r = common_refinement(&[a.measures(), b.measures()]);
    (
        a.refined(&r.maps[0], &r.measures),
        b.refined(&r.maps[1], &r.measures),
        r,
    )
}

/// Exact pointwise difference `a - b` as a kernel on the common partition.
pub fn graphon_difference(a: &StepGraphon, b: &StepGraphon) -> StepKernel {
    let (ar, br, r) = refine_graphons(a, b);
    let values = (0..r.measures.len())
        .map(|i| {
            (0..r.measures.len())
                .map(|j| ar.value(i, j) - br.value(i, j))
                .collect()
        })
        .collect();
    StepKernel {
        row_measures: r.measures.clone(),
        col_measures: r.measures,
        values,
    }
}

/// Exact pointwise difference `a - b` of two kernels, on common row and
/// column partitions.
pub fn kernel_difference(a: &StepKernel, b: &StepKernel) -> StepKernel {
    let rr = common_refinement(&[a.row_measures(), b.row_measures()]);
    let cr = common_refinement(&[a.col_measures(), b.col_measures()]);
    let ar = a.refined(&rr.maps[0], &rr.measures, &cr.maps[0], &cr.measures);
    let br = b.refined(&rr.maps[1], &rr.measures, &cr.maps[1], &cr.measures);
    let values = (0..rr.measures.len())
        .map(|i| {
            (0..cr.measures.len())
                .map(|j| ar.value(i, j) - br.value(i, j))
                .collect()
        })
        .collect();
    StepKernel {
        row_measures: rr.measures,
        col_measures: cr.measures,
        values,
    }
}

/// Exact `L^1` distance between two kernels (refining as needed).
pub fn l1_distance(a: &StepKernel, b: &StepKernel) -> Rat {
    kernel_difference(a, b).l1_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn graphon_validation() {
        // Valid two-block graphon.
        let w = StepGraphon::new(
            vec![r(1, 2), r(1, 2)],
            vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]],
        )
        .unwrap();
        assert_eq!(w.edge_density(), r(1, 2));

        // Measures must sum to one.
        let e = StepGraphon::new(vec![r(1, 2), r(1, 3)], vec![vec![r(0, 1); 2]; 2]);
        assert!(matches!(e, Err(StepError::MeasureSum { .. })));

        // Symmetry enforced.
        let e = StepGraphon::new(
            vec![r(1, 2), r(1, 2)],
            vec![vec![r(0, 1), r(1, 1)], vec![r(1, 2), r(0, 1)]],
        );
        assert!(matches!(e, Err(StepError::NotSymmetric { .. })));

        // Range enforced.
        let e = StepGraphon::new(vec![r(1, 1)], vec![vec![r(3, 2)]]);
        assert!(matches!(e, Err(StepError::ValueOutOfRange { .. })));

        // Non-positive measures rejected.
        let e = StepGraphon::new(vec![r(0, 1), r(1, 1)], vec![vec![r(0, 1); 2]; 2]);
        assert!(matches!(e, Err(StepError::NonPositiveMeasure { .. })));
    }

    #[test]
    fn refinement_of_thirds_and_halves() {
        let a = [r(1, 3), r(2, 3)];
        let b = [r(1, 2), r(1, 2)];
        let refined = common_refinement(&[&a, &b]);
        assert_eq!(refined.measures, vec![r(1, 3), r(1, 6), r(1, 2)]);
        assert_eq!(refined.maps[0], vec![0, 1, 1]);
        assert_eq!(refined.maps[1], vec![0, 0, 1]);
    }

    #[test]
    fn refinement_is_exact_and_maps_are_monotone() {
        let a = [r(1, 7), r(2, 7), r(4, 7)];
        let b = [r(1, 3), r(1, 3), r(1, 3)];
        let c = [r(9, 10), r(1, 10)];
        let refined = common_refinement(&[&a, &b, &c]);
        let total: Rat = refined.measures.iter().sum();
        assert!(total.is_one());
        for map in &refined.maps {
            assert!(map.windows(2).all(|w| w[0] <= w[1]));
        }
        // Refining each original partition through its map reproduces it.
        for (part, map) in [&a[..], &b[..], &c[..]].iter().zip(&refined.maps) {
            let mut sums = vec![Rat::zero(); part.len()];
            for (new_block, &old) in map.iter().enumerate() {
                sums[old] += &refined.measures[new_block];
            }
            assert_eq!(&sums[..], *part);
        }
    }

    #[test]
    fn identical_partitions_do_not_split() {
        let a = [r(1, 3), r(2, 3)];
        let refined = common_refinement(&[&a, &a]);
        assert_eq!(refined.measures, vec![r(1, 3), r(2, 3)]);
    }

    #[test]
    fn l1_distance_of_identity_like_blocks() {
        // Two equal blocks: one graphon is 1 on the diagonal blocks, the
        // other is 0 everywhere; distance is the measure of the two diagonal
        // squares = 2 * (1/2)^2 = 1/2.
        let w1 = StepGraphon::new(
            vec![r(1, 2), r(1, 2)],
            vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]],
        )
        .unwrap();
        let w0 = StepGraphon::constant(vec![r(1, 1)], Rat::zero()).unwrap();
        assert_eq!(l1_distance(&w1.to_kernel(), &w0.to_kernel()), r(1, 2));
    }

    #[test]
    fn kernel_symmetrization_and_l1() {
        let f = StepKernel::square(
            vec![r(1, 2), r(1, 2)],
            vec![vec![r(0, 1), r(1, 1)], vec![r(0, 1), r(0, 1)]],
        )
        .unwrap();
        let s = f.symmetrized();
        assert_eq!(s.value(0, 1), &r(1, 2));
        assert_eq!(s.value(1, 0), &r(1, 2));
        assert_eq!(s.l1_norm(), f.l1_norm());
    }

    #[test]
    fn coalesce_merges_equal_profiles() {
        // Four equal blocks alternating between two row profiles.
        let vals = vec![
            vec![r(1, 1), r(0, 1), r(1, 1), r(0, 1)],
            vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)],
            vec![r(1, 1), r(0, 1), r(1, 1), r(0, 1)],
            vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)],
        ];
        let f = StepKernel::square(vec![r(1, 4); 4], vals).unwrap();
        let c = f.coalesced();
        assert_eq!(c.rows(), 2);
        assert_eq!(c.cols(), 2);
        assert_eq!(c.row_measures(), &[r(1, 2), r(1, 2)]);
        assert_eq!(c.l1_norm(), f.l1_norm());
    }

    #[test]
    fn graphon_json_round_trip() {
        let json = r#"{"measures": ["1/3", "2/3"], "values": [["1", "1/2"], ["1/2", "0"]]}"#;
        let w: StepGraphon = serde_json::from_str(json).unwrap();
        assert_eq!(w.value(0, 1), &r(1, 2));
        let out = serde_json::to_string(&w).unwrap();
        let back: StepGraphon = serde_json::from_str(&out).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn invalid_json_is_rejected_with_named_invariant() {
        let json = r#"{"measures": ["1/2", "1/3"], "values": [["0", "0"], ["0", "0"]]}"#;
        let err = serde_json::from_str::<StepGraphon>(json).unwrap_err();
        assert!(err.to_string().contains("sum"), "got: {err}");
    }

    #[test]
    fn cover_mass() {
        let c = StepCover::new(vec![r(1, 3), r(2, 3)], vec![r(1, 2), r(3, 4)]).unwrap();
        assert_eq!(c.total_mass(), r(2, 3));
    }
}
