//! Dense linear programming: two-phase primal simplex with bounded
//! variables, plus an epigraph reformulation for sums of convex
//! piecewise-linear objectives.
//!
//! The solver favors determinism and auditability over speed: a dense
//! tableau with an explicitly maintained basis inverse, explicit artificial
//! variables in phase 1, Bland's rule engaged after a run of degenerate
//! pivots, and periodic refactorization of the basis inverse. Instances in
//! this crate stay within a few hundred rows, where this is more than fast
//! enough.
//!
//! Internally every variable is shifted, flipped or split so that it lives
//! in `[0, u]` with `u` possibly infinite, rows become equalities with
//! nonnegative right-hand sides, and the artificial basis starts feasible.

// dense tableau code walks several arrays by row/column index
#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Entries below this magnitude are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-12;

/// Row sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintSense {
    LessEq,
    Equal,
    GreaterEq,
}

/// A dense linear program: minimize `objective . x` subject to
/// `rows[r] . x (sense[r]) rhs[r]` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<ConstraintSense>,
    pub rhs: Vec<f64>,
    /// May be `f64::NEG_INFINITY` for free-below variables.
    pub lower: Vec<f64>,
    /// May be `f64::INFINITY`.
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// A program over `objective.len()` variables, each defaulting to
    /// `[0, +inf)`, with no rows yet.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, sense: ConstraintSense, rhs: f64) {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Checks dimension consistency and bound ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(
                "bounds length != variable count".into(),
            ));
        }
        if self.rows.len() != self.senses.len() || self.rows.len() != self.rhs.len() {
            return Err(Error::DimensionMismatch(
                "rows/senses/rhs lengths differ".into(),
            ));
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(Error::InvalidParameters(format!(
                    "variable {j}: lower bound {} above upper bound {}",
                    self.lower[j], self.upper[j]
                )));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.objective[j].is_nan() {
                return Err(Error::InvalidParameters(format!("variable {j}: NaN data")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output. `x` and `duals` are empty unless the status is `Optimal`.
///
/// `duals[r]` is the marginal change of the optimal objective per unit
/// increase of `rhs[r]` (so a binding budget row of a minimization has a
/// nonpositive dual).
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Vec<f64>,
}

/// Solves the program with the two-phase bounded-variable primal simplex.
///
/// Infeasible and unbounded models are reported through
/// [`LpSolution::status`]; `Err` is reserved for malformed input and
/// numerical breakdown.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    if lp.num_vars() == 0 {
        // only constant rows: feasible iff every 0 (sense) rhs holds
        for (r, &rhs) in lp.rhs.iter().enumerate() {
            let ok = match lp.senses[r] {
                ConstraintSense::LessEq => 0.0 <= rhs + FEASIBILITY_TOL,
                ConstraintSense::Equal => rhs.abs() <= FEASIBILITY_TOL,
                ConstraintSense::GreaterEq => 0.0 >= rhs - FEASIBILITY_TOL,
            };
            if !ok {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: Vec::new(),
                    objective: f64::NAN,
                    duals: Vec::new(),
                });
            }
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            x: Vec::new(),
            objective: 0.0,
            duals: vec![0.0; lp.num_rows()],
        });
    }
    Simplex::build(lp)?.run(lp)
}

/// How an original variable maps into canonical columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`.
    Shift { col: usize, lower: f64 },
    /// `x = upper - y` (used when only the upper bound is finite).
    Flip { col: usize, upper: f64 },
    /// Free variable `x = y_pos - y_neg`.
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

struct Simplex {
    /// Rows of the equality system `A y = b` (b >= 0), over all canonical
    /// columns including slacks and artificials.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// Phase-2 costs per canonical column (0 for slacks and artificials).
    cost: Vec<f64>,
    /// Upper bound per canonical column (lower bound is always 0).
    upper: Vec<f64>,
    m: usize,
    ncols: usize,
    /// First artificial column index; artificials are the last `m` columns.
    art_start: usize,
    var_map: Vec<VarMap>,
    /// +1/-1 multiplier applied to each original row during canonicalization.
    row_sign: Vec<f64>,

    basis: Vec<usize>,
    state: Vec<VarState>,
    binv: Vec<Vec<f64>>,
    x_basic: Vec<f64>,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Result<Self> {
        let n = lp.num_vars();
        let m = lp.num_rows();

        // canonical structural columns
        let mut var_map = Vec::with_capacity(n);
        let mut cost: Vec<f64> = Vec::new();
        let mut upper: Vec<f64> = Vec::new();
        let mut col_of: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n); // per original var: (col, coeff scale)
        let mut rhs_shift = vec![0.0; m];
        for j in 0..n {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            if lo.is_finite() {
                let col = cost.len();
                var_map.push(VarMap::Shift { col, lower: lo });
                cost.push(lp.objective[j]);
                upper.push(if hi.is_finite() {
                    hi - lo
                } else {
                    f64::INFINITY
                });
                col_of.push(vec![(col, 1.0)]);
                if lo != 0.0 {
                    for r in 0..m {
                        rhs_shift[r] += lp.rows[r][j] * lo;
                    }
                }
            } else if hi.is_finite() {
                let col = cost.len();
                var_map.push(VarMap::Flip { col, upper: hi });
                cost.push(-lp.objective[j]);
                upper.push(f64::INFINITY);
                col_of.push(vec![(col, -1.0)]);
                for r in 0..m {
                    rhs_shift[r] += lp.rows[r][j] * hi;
                }
            } else {
                let pos = cost.len();
                let neg = pos + 1;
                var_map.push(VarMap::Split { pos, neg });
                cost.push(lp.objective[j]);
                cost.push(-lp.objective[j]);
                upper.push(f64::INFINITY);
                upper.push(f64::INFINITY);
                col_of.push(vec![(pos, 1.0), (neg, -1.0)]);
            }
        }

        // slack columns: one per inequality row
        let mut slack_col = vec![usize::MAX; m];
        for r in 0..m {
            match lp.senses[r] {
                ConstraintSense::LessEq | ConstraintSense::GreaterEq => {
                    slack_col[r] = cost.len();
                    cost.push(0.0);
                    upper.push(f64::INFINITY);
                }
                ConstraintSense::Equal => {}
            }
        }
        let art_start = cost.len();
        for _ in 0..m {
            cost.push(0.0);
            upper.push(f64::INFINITY);
        }
        let ncols = cost.len();

        // assemble rows over canonical columns
        let mut a = vec![vec![0.0; ncols]; m];
        let mut b = vec![0.0; m];
        let mut row_sign = vec![1.0; m];
        for r in 0..m {
            for j in 0..n {
                let coeff = lp.rows[r][j];
                if coeff != 0.0 {
                    for &(col, scale) in &col_of[j] {
                        a[r][col] += coeff * scale;
                    }
                }
            }
            b[r] = lp.rhs[r] - rhs_shift[r];
            if slack_col[r] != usize::MAX {
                a[r][slack_col[r]] = match lp.senses[r] {
                    ConstraintSense::LessEq => 1.0,
                    ConstraintSense::GreaterEq => -1.0,
                    ConstraintSense::Equal => unreachable!(),
                };
            }
            if b[r] < 0.0 {
                row_sign[r] = -1.0;
                b[r] = -b[r];
                for v in a[r].iter_mut().take(art_start) {
                    *v = -*v;
                }
            }
            a[r][art_start + r] = 1.0;
        }

        let basis: Vec<usize> = (0..m).map(|r| art_start + r).collect();
        let mut state = vec![VarState::AtLower; ncols];
        for &col in &basis {
            state[col] = VarState::Basic;
        }
        let mut binv = vec![vec![0.0; m]; m];
        for (r, row) in binv.iter_mut().enumerate() {
            row[r] = 1.0;
        }
        let x_basic = b.clone();

        Ok(Self {
            a,
            b,
            cost,
            upper,
            m,
            ncols,
            art_start,
            var_map,
            row_sign,
            basis,
            state,
            binv,
            x_basic,
        })
    }

    /// `Binv . column(j)`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (i, out_i) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..self.m {
                let aij = self.a[k][j];
                if aij != 0.0 {
                    acc += self.binv[i][k] * aij;
                }
            }
            *out_i = acc;
        }
        out
    }

    /// Row duals `y = c_B^T Binv` for the given cost vector.
    fn duals_for(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (k, y_k) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    acc += cb * self.binv[i][k];
                }
            }
            *y_k = acc;
        }
        y
    }

    /// Recomputes the basic values from scratch: `x_B = Binv (b - N x_N)`.
    fn refresh_basics(&mut self) {
        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if self.state[j] == VarState::AtUpper {
                let u = self.upper[j];
                for r in 0..self.m {
                    let aij = self.a[r][j];
                    if aij != 0.0 {
                        rhs[r] -= aij * u;
                    }
                }
            }
        }
        for i in 0..self.m {
            let mut acc = 0.0;
            for k in 0..self.m {
                acc += self.binv[i][k] * rhs[k];
            }
            self.x_basic[i] = acc;
        }
    }

    /// Rebuilds `binv` by Gauss-Jordan inversion of the current basis matrix.
    fn refactorize(&mut self) -> Result<()> {
        let m = self.m;
        let mut work = vec![vec![0.0; 2 * m]; m];
        for (r, row) in work.iter_mut().enumerate() {
            for (i, &bc) in self.basis.iter().enumerate() {
                row[i] = self.a[r][bc];
            }
            row[m + r] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            for r in col + 1..m {
                if work[r][col].abs() > work[piv][col].abs() {
                    piv = r;
                }
            }
            if work[piv][col].abs() < PIVOT_TOL {
                return Err(Error::Numerical(
                    "singular basis during refactorization".into(),
                ));
            }
            work.swap(col, piv);
            let p = work[col][col];
            for v in work[col].iter_mut() {
                *v /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = work[r][col];
                    if f != 0.0 {
                        for k in 0..2 * m {
                            work[r][k] -= f * work[col][k];
                        }
                    }
                }
            }
        }
        for r in 0..m {
            for k in 0..m {
                self.binv[r][k] = work[r][m + k];
            }
        }
        self.refresh_basics();
        Ok(())
    }

    /// Runs one simplex phase to optimality for the given cost vector.
    /// Returns `None` when optimal, or the unbounded status.
    fn optimize(&mut self, cost: &[f64]) -> Result<Option<LpStatus>> {
        let mut degenerate_run = 0usize;
        let bland_threshold = 2 * (self.m + self.ncols);
        let iter_cap = 50 * (self.m + self.ncols) + 10_000;
        let mut pivots_since_refactor = 0usize;

        for _iter in 0..iter_cap {
            let bland = degenerate_run > bland_threshold;
            let y = self.duals_for(cost);

            // pricing
            let mut entering: Option<(usize, f64, bool)> = None; // (col, score, increase)
            for j in 0..self.ncols {
                if self.state[j] == VarState::Basic || self.upper[j] <= 0.0 {
                    continue;
                }
                let mut d = cost[j];
                for r in 0..self.m {
                    let aij = self.a[r][j];
                    if aij != 0.0 {
                        d -= y[r] * aij;
                    }
                }
                let (eligible, score, increase) = match self.state[j] {
                    VarState::AtLower => (d < -FEASIBILITY_TOL, -d, true),
                    VarState::AtUpper => (d > FEASIBILITY_TOL, d, false),
                    VarState::Basic => unreachable!(),
                };
                if eligible {
                    if bland {
                        entering = Some((j, score, increase));
                        break;
                    }
                    if entering.is_none_or(|(_, s, _)| score > s) {
                        entering = Some((j, score, increase));
                    }
                }
            }
            let Some((e, _, increase)) = entering else {
                return Ok(None);
            };

            // ratio test along the direction of the entering variable
            let w = self.ftran(e);
            let dir = if increase { 1.0 } else { -1.0 };
            let mut step = self.upper[e]; // bound flip distance (may be inf)
            let mut leave: Option<(usize, bool)> = None; // (row, leaves_at_upper)
            for i in 0..self.m {
                let wi = w[i] * dir;
                if wi > PIVOT_TOL {
                    // basic variable i decreases toward 0
                    let t = (self.x_basic[i]).max(0.0) / wi;
                    if t < step - PIVOT_TOL
                        || (t < step + PIVOT_TOL
                            && leave.is_some_and(|(p, _)| {
                                let better_pivot = w[i].abs() > w[p].abs();
                                if bland {
                                    self.basis[i] < self.basis[p]
                                } else {
                                    better_pivot
                                }
                            }))
                    {
                        step = t.min(step);
                        leave = Some((i, false));
                    }
                } else if wi < -PIVOT_TOL {
                    // basic variable i increases toward its upper bound
                    let ub = self.upper[self.basis[i]];
                    if ub.is_finite() {
                        let t = (ub - self.x_basic[i]).max(0.0) / (-wi);
                        if t < step - PIVOT_TOL
                            || (t < step + PIVOT_TOL
                                && leave.is_some_and(|(p, _)| {
                                    let better_pivot = w[i].abs() > w[p].abs();
                                    if bland {
                                        self.basis[i] < self.basis[p]
                                    } else {
                                        better_pivot
                                    }
                                }))
                        {
                            step = t.min(step);
                            leave = Some((i, true));
                        }
                    }
                }
            }

            if step.is_infinite() {
                return Ok(Some(LpStatus::Unbounded));
            }
            if step <= PIVOT_TOL {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            match leave {
                None => {
                    // bound flip: the entering variable crosses to its other bound
                    self.state[e] = if increase {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.refresh_basics();
                }
                Some((row, at_upper)) => {
                    let pivot = w[row];
                    if pivot.abs() < PIVOT_TOL {
                        return Err(Error::Numerical("pivot below tolerance".into()));
                    }
                    let old = self.basis[row];
                    self.state[old] = if at_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.basis[row] = e;
                    self.state[e] = VarState::Basic;
                    // eta update of the basis inverse
                    let pivot_row: Vec<f64> = self.binv[row].iter().map(|v| v / pivot).collect();
                    for i in 0..self.m {
                        if i != row {
                            let f = w[i];
                            if f != 0.0 {
                                for k in 0..self.m {
                                    self.binv[i][k] -= f * pivot_row[k];
                                }
                            }
                        }
                    }
                    self.binv[row] = pivot_row;
                    pivots_since_refactor += 1;
                    if pivots_since_refactor >= 64 {
                        self.refactorize()?;
                        pivots_since_refactor = 0;
                    } else {
                        self.refresh_basics();
                    }
                }
            }
        }
        Err(Error::Numerical("simplex iteration limit exceeded".into()))
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        // phase 1: minimize the sum of artificials
        let mut phase1_cost = vec![0.0; self.ncols];
        for j in self.art_start..self.ncols {
            phase1_cost[j] = 1.0;
        }
        if self.optimize(&phase1_cost)?.is_some() {
            return Err(Error::Numerical("phase 1 unbounded".into()));
        }
        let infeasibility: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= self.art_start)
            .map(|i| self.x_basic[i].max(0.0))
            .sum();
        let scale = 1.0 + self.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
                duals: Vec::new(),
            });
        }

        // pivot residual artificials out of the basis where possible
        for row in 0..self.m {
            if self.basis[row] < self.art_start {
                continue;
            }
            let mut replacement = None;
            for j in 0..self.art_start {
                if self.state[j] == VarState::Basic {
                    continue;
                }
                let mut w_rj = 0.0;
                for k in 0..self.m {
                    let akj = self.a[k][j];
                    if akj != 0.0 {
                        w_rj += self.binv[row][k] * akj;
                    }
                }
                if w_rj.abs() > 1e-8 {
                    replacement = Some((j, w_rj));
                    break;
                }
            }
            if let Some((j, _)) = replacement {
                let w = self.ftran(j);
                let pivot = w[row];
                let old = self.basis[row];
                self.state[old] = VarState::AtLower;
                self.basis[row] = j;
                self.state[j] = VarState::Basic;
                let pivot_row: Vec<f64> = self.binv[row].iter().map(|v| v / pivot).collect();
                for i in 0..self.m {
                    if i != row {
                        let f = w[i];
                        if f != 0.0 {
                            for k in 0..self.m {
                                self.binv[i][k] -= f * pivot_row[k];
                            }
                        }
                    }
                }
                self.binv[row] = pivot_row;
                self.refresh_basics();
            }
            // a fully zero tableau row is redundant; its artificial stays
            // basic at value 0 and is frozen below
        }

        // freeze artificials at zero for phase 2
        for j in self.art_start..self.ncols {
            self.upper[j] = 0.0;
            if self.state[j] == VarState::AtUpper {
                self.state[j] = VarState::AtLower;
            }
        }

        let phase2_cost = self.cost.clone();
        if let Some(status) = self.optimize(&phase2_cost)? {
            return Ok(LpSolution {
                status,
                x: Vec::new(),
                objective: f64::NAN,
                duals: Vec::new(),
            });
        }

        // extract the canonical solution
        let mut y_canon = vec![0.0; self.ncols];
        for j in 0..self.ncols {
            y_canon[j] = match self.state[j] {
                VarState::AtLower => 0.0,
                VarState::AtUpper => self.upper[j],
                VarState::Basic => 0.0,
            };
        }
        for i in 0..self.m {
            y_canon[self.basis[i]] = self.x_basic[i];
        }

        let mut x = vec![0.0; lp.num_vars()];
        for (j, map) in self.var_map.iter().enumerate() {
            x[j] = match *map {
                VarMap::Shift { col, lower } => lower + y_canon[col],
                VarMap::Flip { col, upper } => upper - y_canon[col],
                VarMap::Split { pos, neg } => y_canon[pos] - y_canon[neg],
            };
        }
        let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

        let y = self.duals_for(&phase2_cost);
        let duals: Vec<f64> = (0..self.m).map(|r| y[r] * self.row_sign[r]).collect();

        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            duals,
        })
    }
}

/// Builds the epigraph LP for `min sum_i max_j (slope_ij q_i + icept_ij)`
/// subject to `constraints[k].0 . q <= constraints[k].1` and `q >= 0`.
///
/// Variable layout: `q_0..q_{n-1}` then one free epigraph variable per item.
/// Each item contributes one lower-bounding row per piece. Pieces must be
/// convex: slopes nondecreasing within each item.
pub fn pwl_epigraph(
    pieces_per_item: &[Vec<(f64, f64)>],
    constraints: &[(Vec<f64>, f64)],
) -> Result<LinearProgram> {
    let n = pieces_per_item.len();
    for (i, pieces) in pieces_per_item.iter().enumerate() {
        if pieces.is_empty() {
            return Err(Error::InvalidParameters(format!("item {i} has no pieces")));
        }
        for w in pieces.windows(2) {
            if w[1].0 < w[0].0 - 1e-12 {
                return Err(Error::InvalidParameters(format!(
                    "item {i}: non-convex pieces (slopes must be nondecreasing)"
                )));
            }
        }
    }
    let mut objective = vec![0.0; 2 * n];
    for t in objective.iter_mut().skip(n) {
        *t = 1.0;
    }
    let mut lp = LinearProgram::new(objective);
    for i in 0..n {
        lp.set_bounds(n + i, f64::NEG_INFINITY, f64::INFINITY);
    }
    for (i, pieces) in pieces_per_item.iter().enumerate() {
        for &(slope, icept) in pieces {
            // t_i >= slope q_i + icept
            let mut row = vec![0.0; 2 * n];
            row[i] = -slope;
            row[n + i] = 1.0;
            lp.add_constraint(row, ConstraintSense::GreaterEq, icept);
        }
    }
    for (coeffs, limit) in constraints {
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint has {} coefficients for {n} items",
                coeffs.len()
            )));
        }
        let mut row = vec![0.0; 2 * n];
        row[..n].copy_from_slice(coeffs);
        lp.add_constraint(row, ConstraintSense::LessEq, *limit);
    }
    Ok(lp)
}
