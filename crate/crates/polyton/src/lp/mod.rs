//! Exact linear programming over the rationals.
//!
//! `solve` runs a dense two-phase primal simplex with Bland's rule, which
//! terminates on every input (no cycling) and reports one of three statuses:
//! optimal (with primal point, exact objective and a dual point), infeasible
//! (with a Farkas certificate), or unbounded. `check_certificate` re-verifies
//! optimality via complementary slackness, and Farkas certificates directly,
//! using nothing from the solver internals. `vertices::enumerate_vertices`
//! lists all extreme points of a bounded constraint system.

pub mod vertices;

use crate::rat::Rat;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("objective has {got} coefficients for {vars} variables")]
    ObjectiveLength { got: usize, vars: usize },
    #[error("row {row} has {got} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("variable {0} has lower bound greater than upper bound")]
    InvalidBounds(usize),
    #[error("vertex enumeration supports at most {cap} variables, got {got}")]
    DimensionCap { got: usize, cap: usize },
    #[error("vertex enumeration supports at most {cap} constraints, got {got}")]
    ConstraintCap { got: usize, cap: usize },
    #[error("feasible region is unbounded in variable {0}; vertex enumeration needs a bounded region")]
    UnboundedRegion(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub sense: Sense,
    pub rhs: Rat,
}

/// A linear program over rationals with per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<Rat>,
    pub rows: Vec<Row>,
    /// One `(lower, upper)` pair per variable; `None` means unbounded on
    /// that side.
    pub bounds: Vec<(Option<Rat>, Option<Rat>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. Exactly one of the payload groups is populated:
/// optimal carries `x`/`objective`/`dual`, infeasible carries `farkas`.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Option<Vec<Rat>>,
    pub objective: Option<Rat>,
    /// One multiplier per row. Signs follow the usual convention relative to
    /// `direction`: for `Maximize`, `<=` rows get `y >= 0` and `>=` rows get
    /// `y <= 0` (flipped for `Minimize`); equalities are free.
    pub dual: Option<Vec<Rat>>,
    /// For infeasible programs: row multipliers `y` proving emptiness.
    /// With `y_i >= 0` on `<=` rows and `y_i <= 0` on `>=` rows, the
    /// aggregated inequality `sum_i y_i a_i . x <= y . b` holds on the
    /// feasible set while `min over the bound box` of the left side exceeds
    /// the right side.
    pub farkas: Option<Vec<Rat>>,
}

/// Outcome of re-verifying a solution against its program from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub complementary_slackness: bool,
    pub objective_match: bool,
    pub farkas_valid: Option<bool>,
    pub ok: bool,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::ObjectiveLength {
                got: self.objective.len(),
                vars: self.bounds.len(),
            });
        }
        for (row, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(LpError::RowLength {
                    row,
                    got: r.coeffs.len(),
                    expected: n,
                });
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo > hi {
                    return Err(LpError::InvalidBounds(j));
                }
            }
        }
        Ok(())
    }

    fn row_activity(&self, x: &[Rat]) -> Vec<Rat> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    fn is_feasible(&self, x: &[Rat]) -> bool {
        for (r, act) in self.rows.iter().zip(self.row_activity(x)) {
            let ok = match r.sense {
                Sense::Le => act <= r.rhs,
                Sense::Ge => act >= r.rhs,
                Sense::Eq => act == r.rhs,
            };
            if !ok {
                return false;
            }
        }
        for (v, (lo, hi)) in x.iter().zip(&self.bounds) {
            if lo.as_ref().is_some_and(|lo| v < lo) || hi.as_ref().is_some_and(|hi| v > hi) {
                return false;
            }
        }
        true
    }
}

// --- standard form -----------------------------------------------------

/// How an original variable was rewritten into nonnegative unknowns.
#[derive(Clone)]
enum VarMap {
    /// `x = lo + u[col]`
    Shifted { col: usize, lo: Rat },
    /// `x = hi - u[col]`
    Mirrored { col: usize, hi: Rat },
    /// `x = u[pos] - u[neg]`
    Free { pos: usize, neg: usize },
    /// `lo == hi`: fixed, no unknown.
    Fixed(Rat),
}

struct Standardized {
    /// Equality system `A u = b` with `u >= 0`, `b >= 0`.
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    /// Minimization costs for structural columns (artificials appended later).
    cost: Vec<Rat>,
    var_map: Vec<VarMap>,
    /// Standard row index -> (original row index or usize::MAX for synthetic
    /// bound rows, sign flip applied to reach `b >= 0`).
    row_origin: Vec<(usize, bool)>,
    /// Column index of the slack of each standard row, if any, with its
    /// pre-flip sign (+1 for `<=`, -1 for `>=`).
    num_structural: usize,
}

fn standardize(lp: &LinearProgram) -> Standardized {
    let n = lp.num_vars();
    let minimize_sign = match lp.direction {
        Direction::Maximize => Rat::int(-1),
        Direction::Minimize => Rat::one(),
    };

    // Assign columns to variables.
    let mut var_map = Vec::with_capacity(n);
    let mut cols = 0usize;
    for (lo, hi) in &lp.bounds {
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo == hi => var_map.push(VarMap::Fixed(lo.clone())),
            (Some(lo), _) => {
                var_map.push(VarMap::Shifted {
                    col: cols,
                    lo: lo.clone(),
                });
                cols += 1;
            }
            (None, Some(hi)) => {
                var_map.push(VarMap::Mirrored {
                    col: cols,
                    hi: hi.clone(),
                });
                cols += 1;
            }
            (None, None) => {
                var_map.push(VarMap::Free {
                    pos: cols,
                    neg: cols + 1,
                });
                cols += 2;
            }
        }
    }

    // Costs in column space.
    let mut cost = vec![Rat::zero(); cols];
    for (j, vm) in var_map.iter().enumerate() {
        let c = &minimize_sign * &lp.objective[j];
        match vm {
            VarMap::Shifted { col, .. } => cost[*col] = c,
            VarMap::Mirrored { col, .. } => cost[*col] = -c,
            VarMap::Free { pos, neg } => {
                cost[*pos] = c.clone();
                cost[*neg] = -c;
            }
            VarMap::Fixed(_) => {}
        }
    }

    // Rewrite one original row into column space: coefficients and the
    // constant absorbed from shifts/mirrors.
    let rewrite = |coeffs: &[Rat]| -> (Vec<Rat>, Rat) {
        let mut row = vec![Rat::zero(); cols];
        let mut shift = Rat::zero();
        for (j, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &var_map[j] {
                VarMap::Shifted { col, lo } => {
                    row[*col] += a;
                    shift += a * lo;
                }
                VarMap::Mirrored { col, hi } => {
                    row[*col] -= a;
                    shift += a * hi;
                }
                VarMap::Free { pos, neg } => {
                    row[*pos] += a;
                    row[*neg] -= a;
                }
                VarMap::Fixed(v) => shift += a * v,
            }
        }
        (row, shift)
    };

    // Gather rows: originals plus synthetic `u <= hi - lo` rows for
    // doubly-bounded variables.
    struct PreRow {
        coeffs: Vec<Rat>,
        sense: Sense,
        rhs: Rat,
        origin: usize,
    }
    let mut pre = Vec::new();
    for (i, r) in lp.rows.iter().enumerate() {
        let (coeffs, shift) = rewrite(&r.coeffs);
        pre.push(PreRow {
            coeffs,
            sense: r.sense,
            rhs: &r.rhs - shift,
        origin: i,
        });
    }
    for (j, (lo, hi)) in lp.bounds.iter().enumerate() {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo < hi {
                if let VarMap::Shifted { col, .. } = &var_map[j] {
                    let mut coeffs = vec![Rat::zero(); cols];
                    coeffs[*col] = Rat::one();
                    pre.push(PreRow {
                        coeffs,
                        sense: Sense::Le,
                        rhs: hi - lo,
                        origin: usize::MAX,
                    });
                }
            }
        }
    }

    // Append slacks, then flip rows to nonnegative rhs.
    let num_slacks = pre
        .iter()
        .filter(|r| !matches!(r.sense, Sense::Eq))
        .count();
    let total = cols + num_slacks;
    let mut a = Vec::with_capacity(pre.len());
    let mut b = Vec::with_capacity(pre.len());
    let mut row_origin = Vec::with_capacity(pre.len());
    let mut slack_at = cols;
    for r in pre {
        let mut row = r.coeffs;
        row.resize(total, Rat::zero());
        match r.sense {
            Sense::Le => {
                row[slack_at] = Rat::one();
                slack_at += 1;
            }
            Sense::Ge => {
                row[slack_at] = Rat::int(-1);
                slack_at += 1;
            }
            Sense::Eq => {}
        }
        let flip = r.rhs.is_negative();
        if flip {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
            b.push(-r.rhs);
        } else {
            b.push(r.rhs);
        }
        a.push(row);
        row_origin.push((r.origin, flip));
    }
    let mut cost_full = cost;
    cost_full.resize(total, Rat::zero());

    Standardized {
        a,
        b,
        cost: cost_full,
        var_map,
        row_origin,
        num_structural: total,
    }
}

// --- simplex tableau ---------------------------------------------------

struct Tableau {
    /// `m x (num_cols + 1)`; last column is the rhs.
    rows: Vec<Vec<Rat>>,
    /// Reduced cost row, same width; last entry is minus the objective.
    cost: Vec<Rat>,
    basis: Vec<usize>,
    num_cols: usize,
    /// First artificial column.
    art_start: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering = smallest eligible column with negative
    /// reduced cost; leaving = among minimizing ratios, the row whose basic
    /// variable has the smallest index. Returns false at optimality.
    /// `allow` filters entering columns.
    fn bland_step(&mut self, allow: impl Fn(usize) -> bool) -> Result<bool, Unboundedness> {
        let entering = (0..self.num_cols).find(|&j| allow(j) && self.cost[j].is_negative());
        let Some(c) = entering else {
            return Ok(false);
        };
        let mut best: Option<(Rat, usize, usize)> = None; // (ratio, basic var, row)
        for (i, row) in self.rows.iter().enumerate() {
            if row[c].is_positive() {
                let ratio = &row[self.num_cols] / &row[c];
                let candidate = (ratio, self.basis[i], i);
                if best.as_ref().is_none_or(|b| {
                    candidate.0 < b.0 || (candidate.0 == b.0 && candidate.1 < b.1)
                }) {
                    best = Some(candidate);
                }
            }
        }
        match best {
            Some((_, _, r)) => {
                self.pivot(r, c);
                Ok(true)
            }
            None => Err(Unboundedness),
        }
    }

    fn objective(&self) -> Rat {
        -self.cost[self.num_cols].clone()
    }
}

struct Unboundedness;

/// Solves the program exactly. See the module docs for status semantics.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let std_form = standardize(lp);
    let m = std_form.a.len();
    let n_struct = std_form.num_structural;
    let num_cols = n_struct + m;

    // Build tableau with one artificial per row (identity start basis). The
    // artificial columns double as a running copy of B^-1, which is what the
    // dual and Farkas readouts below use.
    let mut rows = Vec::with_capacity(m);
    for (i, arow) in std_form.a.iter().enumerate() {
        let mut row = Vec::with_capacity(num_cols + 1);
        row.extend(arow.iter().cloned());
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(std_form.b[i].clone());
        rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    let mut cost = vec![Rat::zero(); num_cols + 1];
    for j in n_struct..num_cols {
        cost[j] = Rat::one();
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (n_struct..num_cols).collect(),
        num_cols,
        art_start: n_struct,
    };
    // Price out the initial basis (all artificial, cost 1).
    for i in 0..m {
        let row = tab.rows[i].clone();
        for (v, p) in tab.cost.iter_mut().zip(&row) {
            if !p.is_zero() {
                *v -= p;
            }
        }
    }
    loop {
        match tab.bland_step(|_| true) {
            Ok(true) => {}
            Ok(false) => break,
            Err(Unboundedness) => unreachable!("phase-1 objective is bounded below by 0"),
        }
    }

    if tab.objective().is_positive() {
        // Infeasible. Read y for the standard system off the artificial
        // columns: reduced cost of artificial i is 1 - y_i.
        let y_std: Vec<Rat> = (0..m)
            .map(|i| Rat::one() - &tab.cost[tab.art_start + i])
            .collect();
        let farkas = map_multipliers(lp, &std_form, &y_std, true);
        let sol = LpSolution {
            status: LpStatus::Infeasible,
            x: None,
            objective: None,
            dual: None,
            farkas: Some(farkas),
        };
        debug_assert!(check_certificate(lp, &sol).ok);
        return Ok(sol);
    }

    // Drive any artificials still in the basis out (all at value 0), or drop
    // their rows as redundant when no structural pivot exists.
    let mut keep = vec![true; m];
    for r in 0..m {
        if tab.basis[r] < tab.art_start {
            continue;
        }
        match (0..tab.art_start).find(|&j| !tab.rows[r][j].is_zero()) {
            Some(j) => tab.pivot(r, j),
            None => keep[r] = false,
        }
    }
    let mut kept_rows = Vec::new();
    if keep.iter().any(|k| !k) {
        let mut rows = Vec::new();
        let mut basis = Vec::new();
        for (r, k) in keep.iter().enumerate() {
            if *k {
                rows.push(std::mem::take(&mut tab.rows[r]));
                basis.push(tab.basis[r]);
                kept_rows.push(r);
            }
        }
        tab.rows = rows;
        tab.basis = basis;
    } else {
        kept_rows = (0..m).collect();
    }

    // Phase 2: real costs, artificials barred from entering.
    let mut cost = vec![Rat::zero(); num_cols + 1];
    cost[..n_struct].clone_from_slice(&std_form.cost);
    tab.cost = cost;
    for (r, &bv) in tab.basis.clone().iter().enumerate() {
        if tab.cost[bv].is_zero() {
            continue;
        }
        let factor = tab.cost[bv].clone();
        let row = tab.rows[r].clone();
        for (v, p) in tab.cost.iter_mut().zip(&row) {
            if !p.is_zero() {
                *v -= &factor * p;
            }
        }
    }
    let art_start = tab.art_start;
    loop {
        match tab.bland_step(|j| j < art_start) {
            Ok(true) => {}
            Ok(false) => break,
            Err(Unboundedness) => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    x: None,
                    objective: None,
                    dual: None,
                    farkas: None,
                })
            }
        }
    }

    // Primal point in original variables.
    let mut u = vec![Rat::zero(); n_struct];
    for (r, &bv) in tab.basis.iter().enumerate() {
        if bv < n_struct {
            u[bv] = tab.rows[r][num_cols].clone();
        }
    }
    let x: Vec<Rat> = std_form
        .var_map
        .iter()
        .map(|vm| match vm {
            VarMap::Shifted { col, lo } => lo + &u[*col],
            VarMap::Mirrored { col, hi } => hi - &u[*col],
            VarMap::Free { pos, neg } => &u[*pos] - &u[*neg],
            VarMap::Fixed(v) => v.clone(),
        })
        .collect();
    let objective: Rat = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Duals off the artificial columns: reduced cost of artificial i is
    // -y_i (its phase-2 cost is 0), for rows still present.
    let mut y_std = vec![Rat::zero(); m];
    for (pos, &orig_row) in kept_rows.iter().enumerate() {
        y_std[orig_row] = -tab.cost[art_start + pos].clone();
    }
    let dual = map_multipliers(lp, &std_form, &y_std, false);

    let sol = LpSolution {
        status: LpStatus::Optimal,
        x: Some(x),
        objective: Some(objective),
        dual: Some(dual),
        farkas: None,
    };
    debug_assert!(check_certificate(lp, &sol).ok, "certificate self-check");
    Ok(sol)
}

/// Folds standard-row multipliers back onto the original rows (undoing row
/// sign flips, dropping synthetic bound rows) and orients them to the
/// published sign convention.
fn map_multipliers(
    lp: &LinearProgram,
    std_form: &Standardized,
    y_std: &[Rat],
    farkas: bool,
) -> Vec<Rat> {
    let mut y = vec![Rat::zero(); lp.rows.len()];
    for (std_row, (orig, flipped)) in std_form.row_origin.iter().enumerate() {
        if *orig == usize::MAX {
            continue;
        }
        let v = if *flipped {
            -y_std[std_row].clone()
        } else {
            y_std[std_row].clone()
        };
        y[*orig] = v;
    }
    // Internally phase-1/phase-2 optimality leaves `w = f*y_std` with
    // `w <= 0` on `<=` rows. The published convention wants `y >= 0` there
    // for maximization (and for Farkas certificates), `y <= 0` for
    // minimization.
    let negate = farkas || lp.direction == Direction::Maximize;
    if negate {
        for v in y.iter_mut() {
            if !v.is_zero() {
                *v = -v.clone();
            }
        }
    }
    y
}

/// Independent exact verification of an `LpSolution`.
///
/// For optimal solutions this checks primal feasibility, dual sign
/// feasibility, complementary slackness (rows and bounds, using reduced
/// costs `z = c - y^T A`), and that primal and dual objectives agree. For
/// infeasible ones it checks the Farkas certificate: the aggregated row
/// inequality must be violated by every point of the bound box.
pub fn check_certificate(lp: &LinearProgram, sol: &LpSolution) -> CertificateReport {
    let mut report = CertificateReport {
        primal_feasible: false,
        dual_feasible: false,
        complementary_slackness: false,
        objective_match: false,
        farkas_valid: None,
        ok: false,
    };
    match sol.status {
        LpStatus::Infeasible => {
            let valid = sol
                .farkas
                .as_ref()
                .is_some_and(|y| farkas_is_valid(lp, y));
            report.farkas_valid = Some(valid);
            report.ok = valid;
            report
        }
        LpStatus::Unbounded => {
            // Nothing checkable beyond the absence of stale payloads.
            report.ok = sol.x.is_none() && sol.dual.is_none() && sol.farkas.is_none();
            report
        }
        LpStatus::Optimal => {
            let (Some(x), Some(obj), Some(y)) = (&sol.x, &sol.objective, &sol.dual) else {
                return report;
            };
            if x.len() != lp.num_vars() || y.len() != lp.rows.len() {
                return report;
            }
            report.primal_feasible =
                lp.is_feasible(x) && *obj == lp.objective.iter().zip(x).map(|(c, v)| c * v).sum();

            // Sign feasibility of the row multipliers.
            let maximize = lp.direction == Direction::Maximize;
            report.dual_feasible = lp.rows.iter().zip(y).all(|(r, yi)| match r.sense {
                Sense::Le => {
                    if maximize {
                        !yi.is_negative()
                    } else {
                        !yi.is_positive()
                    }
                }
                Sense::Ge => {
                    if maximize {
                        !yi.is_positive()
                    } else {
                        !yi.is_negative()
                    }
                }
                Sense::Eq => true,
            });

            // Reduced costs; their sign dictates which bound must be active,
            // and missing bounds there mean the dual is infeasible.
            let z: Vec<Rat> = (0..lp.num_vars())
                .map(|j| {
                    &lp.objective[j]
                        - lp.rows
                            .iter()
                            .zip(y)
                            .map(|(r, yi)| &r.coeffs[j] * yi)
                            .sum::<Rat>()
                })
                .collect();

            let mut cs = true;
            let mut dual_obj: Rat = lp.rows.iter().zip(y).map(|(r, yi)| &r.rhs * yi).sum();
            for (r, yi) in lp.rows.iter().zip(y) {
                if !yi.is_zero() {
                    let act: Rat = r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                    cs &= act == r.rhs;
                }
            }
            for (j, zj) in z.iter().enumerate() {
                if zj.is_zero() {
                    continue;
                }
                // Which bound the sign of z_j pins x_j to.
                let wants_upper = zj.is_positive() == maximize;
                let bound = if wants_upper {
                    &lp.bounds[j].1
                } else {
                    &lp.bounds[j].0
                };
                match bound {
                    Some(b) => {
                        cs &= &x[j] == b;
                        dual_obj += zj * b;
                    }
                    None => {
                        report.dual_feasible = false;
                    }
                }
            }
            report.complementary_slackness = cs;
            report.objective_match = dual_obj == *obj;
            report.ok = report.primal_feasible
                && report.dual_feasible
                && report.complementary_slackness
                && report.objective_match;
            report
        }
    }
}

fn farkas_is_valid(lp: &LinearProgram, y: &[Rat]) -> bool {
    if y.len() != lp.rows.len() {
        return false;
    }
    let sign_ok = lp.rows.iter().zip(y).all(|(r, yi)| match r.sense {
        Sense::Le => !yi.is_negative(),
        Sense::Ge => !yi.is_positive(),
        Sense::Eq => true,
    });
    if !sign_ok {
        return false;
    }
    // g = sum_i y_i a_i; on the feasible set g.x <= y.b. Infeasibility is
    // certified when min over the bound box of g.x is still > y.b.
    let n = lp.num_vars();
    let mut g = vec![Rat::zero(); n];
    for (r, yi) in lp.rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (gj, aj) in g.iter_mut().zip(&r.coeffs) {
            *gj += yi * aj;
        }
    }
    let rhs: Rat = lp.rows.iter().zip(y).map(|(r, yi)| &r.rhs * yi).sum();
    let mut box_min = Rat::zero();
    for (j, gj) in g.iter().enumerate() {
        if gj.is_zero() {
            continue;
        }
        let bound = if gj.is_positive() {
            &lp.bounds[j].0
        } else {
            &lp.bounds[j].1
        };
        match bound {
            Some(b) => box_min += gj * b,
            None => return false, // aggregated inequality unbounded below
        }
    }
    box_min > rhs
}

/// Lexicographically smallest optimal point: repeatedly minimizes each
/// coordinate over the optimal face. Returns the original solution for
/// non-optimal statuses.
pub fn lex_min_optimal_point(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let mut sol = solve(lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(sol);
    }
    let opt = sol.objective.clone().expect("optimal objective");
    let mut restricted = lp.clone();
    restricted.rows.push(Row {
        coeffs: lp.objective.clone(),
        sense: Sense::Eq,
        rhs: opt,
    });
    let n = lp.num_vars();
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let mut probe = restricted.clone();
        probe.direction = Direction::Minimize;
        probe.objective = vec![Rat::zero(); n];
        probe.objective[j] = Rat::one();
        let s = solve(&probe)?;
        debug_assert_eq!(s.status, LpStatus::Optimal);
        let vj = s.x.expect("optimal point")[j].clone();
        restricted.bounds[j] = (Some(vj.clone()), Some(vj.clone()));
        point.push(vj);
    }
    debug_assert!(lp.is_feasible(&point));
    sol.x = Some(point);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, Rat};

    fn free() -> (Option<Rat>, Option<Rat>) {
        (None, None)
    }

    fn nonneg() -> (Option<Rat>, Option<Rat>) {
        (Some(Rat::zero()), None)
    }

    fn unit() -> (Option<Rat>, Option<Rat>) {
        (Some(Rat::zero()), Some(Rat::one()))
    }

    fn row(coeffs: &[i64], sense: Sense, rhs: Rat) -> Row {
        Row {
            coeffs: coeffs.iter().map(|&c| Rat::int(c)).collect(),
            sense,
            rhs,
        }
    }

    #[test]
    fn simple_budget_lp() {
        // max x + y subject to x + y <= 1, x,y >= 0: optimum 1.
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one(), Rat::one()],
            rows: vec![row(&[1, 1], Sense::Le, Rat::one())],
            bounds: vec![nonneg(), nonneg()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(Rat::one()));
        assert_eq!(sol.dual, Some(vec![Rat::one()]));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn classic_production_lp() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2,6).
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::int(3), Rat::int(5)],
            rows: vec![
                row(&[1, 0], Sense::Le, Rat::int(4)),
                row(&[0, 2], Sense::Le, Rat::int(12)),
                row(&[3, 2], Sense::Le, Rat::int(18)),
            ],
            bounds: vec![nonneg(), nonneg()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(Rat::int(36)));
        assert_eq!(sol.x, Some(vec![Rat::int(2), Rat::int(6)]));
        assert_eq!(
            sol.dual,
            Some(vec![Rat::zero(), rat(3, 2), Rat::one()])
        );
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x + y st 2x + y <= 2, x + 3y <= 3: optimum at (3/5, 4/5) = 7/5.
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one(), Rat::one()],
            rows: vec![
                row(&[2, 1], Sense::Le, Rat::int(2)),
                row(&[1, 3], Sense::Le, Rat::int(3)),
            ],
            bounds: vec![nonneg(), nonneg()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, Some(rat(7, 5)));
        assert_eq!(sol.x, Some(vec![rat(3, 5), rat(4, 5)]));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn infeasible_with_farkas() {
        // x >= 1 and x <= 0 cannot hold together.
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one()],
            rows: vec![
                row(&[1], Sense::Ge, Rat::one()),
                row(&[1], Sense::Le, Rat::zero()),
            ],
            bounds: vec![free()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let report = check_certificate(&lp, &sol);
        assert_eq!(report.farkas_valid, Some(true));
        assert!(report.ok);
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one()],
            rows: vec![],
            bounds: vec![nonneg()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        // Minimization over the same set is fine.
        let lp2 = LinearProgram {
            direction: Direction::Minimize,
            ..lp
        };
        let sol2 = solve(&lp2).unwrap();
        assert_eq!(sol2.status, LpStatus::Optimal);
        assert_eq!(sol2.objective, Some(Rat::zero()));
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic cycling instance; Bland's rule must terminate at
        // optimum -1/20 (x = (1/25, 0, 1, 0)).
        let lp = LinearProgram {
            direction: Direction::Minimize,
            objective: vec![rat(-3, 4), Rat::int(150), rat(-1, 50), Rat::int(6)],
            rows: vec![
                Row {
                    coeffs: vec![rat(1, 4), Rat::int(-60), rat(-1, 25), Rat::int(9)],
                    sense: Sense::Le,
                    rhs: Rat::zero(),
                },
                Row {
                    coeffs: vec![rat(1, 2), Rat::int(-90), rat(-1, 50), Rat::int(3)],
                    sense: Sense::Le,
                    rhs: Rat::zero(),
                },
                row(&[0, 0, 1, 0], Sense::Le, Rat::one()),
            ],
            bounds: vec![nonneg(), nonneg(), nonneg(), nonneg()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(rat(-1, 20)));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn bounds_and_equalities() {
        // max x with 2 <= x <= 5.
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one()],
            rows: vec![],
            bounds: vec![(Some(Rat::int(2)), Some(Rat::int(5)))],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, Some(Rat::int(5)));
        assert!(check_certificate(&lp, &sol).ok);

        // Equality row with free variables: min x + y st x - y = 2, y >= 1.
        let lp = LinearProgram {
            direction: Direction::Minimize,
            objective: vec![Rat::one(), Rat::one()],
            rows: vec![row(&[1, -1], Sense::Eq, Rat::int(2))],
            bounds: vec![free(), (Some(Rat::one()), None)],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, Some(Rat::int(4)));
        assert_eq!(sol.x, Some(vec![Rat::int(3), Rat::one()]));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn fixed_variables_and_redundant_rows() {
        // x fixed to 1/2 by bounds; redundant duplicated equality rows.
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one(), Rat::int(2)],
            rows: vec![
                row(&[1, 1], Sense::Eq, Rat::one()),
                row(&[2, 2], Sense::Eq, Rat::int(2)),
            ],
            bounds: vec![(Some(rat(1, 2)), Some(rat(1, 2))), unit()],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, Some(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(sol.objective, Some(rat(3, 2)));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn invalid_inputs_are_validation_errors() {
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one()],
            rows: vec![row(&[1, 1], Sense::Le, Rat::one())],
            bounds: vec![nonneg()],
        };
        assert!(matches!(solve(&lp), Err(LpError::RowLength { .. })));

        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one()],
            rows: vec![],
            bounds: vec![(Some(Rat::int(3)), Some(Rat::int(2)))],
        };
        assert!(matches!(solve(&lp), Err(LpError::InvalidBounds(0))));
    }

    #[test]
    fn lex_min_point_on_degenerate_face() {
        // Whole segment x + y = 1 is optimal; lexicographic minimum is (0,1).
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![Rat::one(), Rat::one()],
            rows: vec![row(&[1, 1], Sense::Le, Rat::one())],
            bounds: vec![unit(), unit()],
        };
        let sol = lex_min_optimal_point(&lp).unwrap();
        assert_eq!(sol.x, Some(vec![Rat::zero(), Rat::one()]));
        assert_eq!(sol.objective, Some(Rat::one()));
        assert!(check_certificate(&lp, &sol).ok);
    }

    #[test]
    fn zero_variable_program() {
        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![],
            rows: vec![Row {
                coeffs: vec![],
                sense: Sense::Le,
                rhs: Rat::one(),
            }],
            bounds: vec![],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(Rat::zero()));

        let lp = LinearProgram {
            direction: Direction::Maximize,
            objective: vec![],
            rows: vec![Row {
                coeffs: vec![],
                sense: Sense::Ge,
                rhs: Rat::one(),
            }],
            bounds: vec![],
        };
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    mod random {
        use super::*;
        use rand_chacha::ChaCha8Rng;
        use rand_core::{RngCore, SeedableRng};

        fn rnd_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rat {
            let span = ((hi - lo) * den + 1) as u64;
            let v = (rng.next_u64() % span) as i64;
            rat(lo * den + v, den)
        }

        /// Random boxed LPs; the solver's optimum must match the best vertex
        /// found by enumeration, and certificates must verify.
        #[test]
        fn agrees_with_vertex_scan() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut optimal = 0;
            for _ in 0..60 {
                let n = 1 + (rng.next_u64() % 3) as usize;
                let m = (rng.next_u64() % 4) as usize;
                let lp = LinearProgram {
                    direction: if rng.next_u64() % 2 == 0 {
                        Direction::Maximize
                    } else {
                        Direction::Minimize
                    },
                    objective: (0..n).map(|_| rnd_rat(&mut rng, -3, 3, 2)).collect(),
                    rows: (0..m)
                        .map(|_| Row {
                            coeffs: (0..n).map(|_| rnd_rat(&mut rng, -2, 2, 1)).collect(),
                            sense: match rng.next_u64() % 3 {
                                0 => Sense::Le,
                                1 => Sense::Ge,
                                _ => Sense::Eq,
                            },
                            rhs: rnd_rat(&mut rng, -2, 2, 2),
                        })
                        .collect(),
                    bounds: vec![(Some(Rat::int(-3)), Some(Rat::int(3))); n],
                };
                let sol = solve(&lp).unwrap();
                let report = check_certificate(&lp, &sol);
                match sol.status {
                    LpStatus::Optimal => {
                        assert!(report.ok, "bad certificate: {report:?} for {lp:?}");
                        let verts = super::super::vertices::enumerate_vertices(
                            &lp.rows,
                            &lp.bounds,
                            super::super::vertices::DEFAULT_DIMENSION_CAP,
                        )
                        .unwrap();
                        assert!(!verts.is_empty());
                        let best = verts
                            .iter()
                            .map(|v| {
                                lp.objective
                                    .iter()
                                    .zip(v)
                                    .map(|(c, x)| c * x)
                                    .sum::<Rat>()
                            })
                            .reduce(|a, b| match lp.direction {
                                Direction::Maximize => a.max(b),
                                Direction::Minimize => a.min(b),
                            })
                            .unwrap();
                        assert_eq!(sol.objective, Some(best), "vertex scan mismatch: {lp:?}");
                        optimal += 1;
                    }
                    LpStatus::Infeasible => {
                        assert!(report.ok, "bad Farkas: {report:?} for {lp:?}");
                    }
                    LpStatus::Unbounded => unreachable!("boxed LPs are bounded"),
                }
            }
            assert!(optimal > 20, "want a healthy share of optimal instances");
        }
    }
}
