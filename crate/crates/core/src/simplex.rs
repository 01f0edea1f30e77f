//! A self-contained dense two-phase simplex solver for small and medium LPs
//! with finite variable bounds, plus row (cut) insertion for separation-based
//! solving.
//!
//! Variables carry native `[lo, hi]` bounds (most models here live in
//! `[0, 1]`), so the tableau stays at one column per variable plus slacks and
//! artificials. The flow relaxations this solver exists for are massively
//! degenerate, which shapes the numerics: rows are equilibrated, bounds get
//! a deterministic sub-tolerance jitter to split degenerate ties, basic
//! values and reduced costs are refreshed from the maintained equations,
//! the whole tableau is periodically rebuilt from pristine data under the
//! current basis, and a sticky Bland's rule takes over after a degenerate
//! streak.

use crate::{Error, Result};

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-7;
/// Objective agreement tolerance.
pub const OPT_TOL: f64 = 1e-6;
/// Entries smaller than this never pivot and never block the ratio test.
const PIVOT_TOL: f64 = 1e-7;
/// Step sizes below this count as degenerate: they advance the objective by
/// less than representable noise, so they must not reset the anti-cycling
/// machinery.
const DEGEN_TOL: f64 = 1e-7;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGEN_STREAK: usize = 25;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in row form with per-variable bounds.
#[derive(Clone, Debug)]
pub struct LpModel {
    num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<f64>,
    rows: Vec<LpRow>,
    bounds: Vec<(f64, f64)>,
}

impl LpModel {
    /// New model with a zero objective and every variable bounded to `[0, 1]`.
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LpModel {
            num_vars,
            sense,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(0.0, 1.0); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn set_bound(&mut self, var: usize, lo: f64, hi: f64) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::InvalidInput(format!("variable {var} out of range")));
        }
        if !(0.0 <= lo && lo <= hi) || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bad bounds [{lo}, {hi}] for variable {var}"
            )));
        }
        self.bounds[var] = (lo, hi);
        Ok(())
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::InvalidInput(format!(
                "row has {} coefficients, expected {}",
                coeffs.len(),
                self.num_vars
            )));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidInput("row rhs must be finite".into()));
        }
        self.rows.push(LpRow {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Returns a copy of the model with one extra row; prior rows unchanged.
    pub fn add_cut(&self, coeffs: &[f64], relation: Relation, rhs: f64) -> Result<LpModel> {
        let mut next = self.clone();
        next.add_row(coeffs.to_vec(), relation, rhs)?;
        Ok(next)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(Error::InvalidInput(
                "objective/bounds length mismatch".into(),
            ));
        }
        for (v, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(0.0 <= lo && lo <= hi) || !hi.is_finite() {
                return Err(Error::InvalidInput(format!("bad bounds on variable {v}")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return Err(Error::InvalidInput(format!("row {i} length mismatch")));
            }
        }
        Ok(())
    }

    /// Signed violations of each row at `values` (positive means violated),
    /// as `(row index, violation)` for rows violated beyond `tol`.
    pub fn row_violations(&self, values: &[f64], tol: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let lhs: f64 = row.coeffs.iter().zip(values).map(|(c, x)| c * x).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            if v > tol {
                out.push((i, v));
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
}

struct Tableau {
    m: usize,
    ncols: usize,
    a: Vec<f64>, // m x ncols, row major
    b: Vec<f64>, // transformed right-hand side, kept in sync by row ops
    /// pristine copy of the initial (scaled) system, for exact rebuilds
    a0: Vec<f64>,
    b0: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    at_upper: Vec<bool>,
    basis: Vec<usize>, // row -> column
    beta: Vec<f64>,    // current value of each basic variable
    is_basic: Vec<bool>,
    eligible: Vec<bool>, // artificials get locked out after phase 1
    art_start: usize,
    iterations: usize,
    cap: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.ncols + j]
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.hi[j]
        } else {
            self.lo[j]
        }
    }

    /// Recomputes every basic value from the maintained equations,
    /// discarding the incremental drift of the pivot loop:
    /// `x_B(i) = b_i - Σ_{j nonbasic} T[i][j] · value(j)`.
    fn refresh_beta(&mut self) {
        for i in 0..self.m {
            self.beta[i] = self.b[i];
        }
        for j in 0..self.ncols {
            if self.is_basic[j] {
                continue;
            }
            let val = self.nonbasic_value(j);
            if val == 0.0 {
                continue;
            }
            for i in 0..self.m {
                let aij = self.a[i * self.ncols + j];
                if aij != 0.0 {
                    self.beta[i] -= aij * val;
                }
            }
        }
    }

    /// Re-derives the whole tableau from the pristine system under the
    /// current basis by Gauss-Jordan with partial pivoting, erasing the
    /// error accumulated across pivots. Long degenerate runs occasionally
    /// pivot on small elements; without a rebuild those amplify until the
    /// tableau is unusable.
    fn rebuild(&mut self) -> Result<()> {
        self.a.copy_from_slice(&self.a0);
        self.b.copy_from_slice(&self.b0);
        let ncols = self.ncols;
        let cols: Vec<usize> = self.basis.clone();
        let mut placed = vec![false; self.m];
        let mut new_basis = vec![usize::MAX; self.m];
        for &c in &cols {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if placed[i] {
                    continue;
                }
                let mag = self.a[i * ncols + c].abs();
                if best.map_or(true, |(_, bm)| mag > bm) {
                    best = Some((i, mag));
                }
            }
            let Some((r, mag)) = best else {
                return Err(Error::NumericalFailure("rebuild ran out of rows".into()));
            };
            if mag < 1e-9 {
                return Err(Error::NumericalFailure(
                    "basis became numerically singular".into(),
                ));
            }
            placed[r] = true;
            new_basis[r] = c;
            let inv = 1.0 / self.a[r * ncols + c];
            for k in 0..ncols {
                self.a[r * ncols + k] *= inv;
            }
            self.a[r * ncols + c] = 1.0;
            self.b[r] *= inv;
            for i in 0..self.m {
                if i == r {
                    continue;
                }
                let f = self.a[i * ncols + c];
                if f == 0.0 {
                    continue;
                }
                let (head, tail) = self.a.split_at_mut(r.max(i) * ncols);
                let (row_i, row_r) = if i < r {
                    (&mut head[i * ncols..i * ncols + ncols], &tail[..ncols])
                } else {
                    (&mut tail[..ncols], &head[r * ncols..r * ncols + ncols])
                };
                for k in 0..ncols {
                    row_i[k] -= f * row_r[k];
                }
                row_i[c] = 0.0;
                self.b[i] -= f * self.b[r];
            }
        }
        self.basis = new_basis;
        self.refresh_beta();
        Ok(())
    }

    /// One simplex phase on the current tableau, maximizing `cost`. Reduced
    /// costs are carried incrementally through pivots and rebuilt from
    /// scratch periodically, alongside the basic values, so drift from long
    /// degenerate stretches cannot steer the pricing.
    fn run_phase(&mut self, cost: &[f64]) -> Result<PhaseEnd> {
        let mut dobj = self.reduced_costs(cost);
        let mut degen_streak = 0usize;
        let mut bland = false;
        let mut since_refresh = 0usize;
        let mut since_rebuild = 0usize;
        // anything larger signals a corrupted tableau, not a real price
        let sanity = 1e4 * (1.0 + cost.iter().fold(0.0f64, |m, c| m.max(c.abs())));
        loop {
            since_refresh += 1;
            since_rebuild += 1;
            if since_rebuild >= 256 {
                self.rebuild()?;
                dobj = self.reduced_costs(cost);
                since_rebuild = 0;
                since_refresh = 0;
            } else if since_refresh >= 32 {
                self.refresh_beta();
                dobj = self.reduced_costs(cost);
                since_refresh = 0;
            }
            // entering variable
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.is_basic[j] || !self.eligible[j] {
                    continue;
                }
                let d = dobj[j];
                let improve = if !self.at_upper[j] && d > OPT_TOL {
                    d
                } else if self.at_upper[j] && d < -OPT_TOL {
                    -d
                } else {
                    continue;
                };
                if bland {
                    enter = Some((j, improve));
                    break;
                }
                match enter {
                    Some((_, best)) if improve <= best => {}
                    _ => enter = Some((j, improve)),
                }
            }
            if let Some((_, improve)) = enter {
                if improve > sanity && since_rebuild > 1 {
                    self.rebuild()?;
                    dobj = self.reduced_costs(cost);
                    since_rebuild = 0;
                    since_refresh = 0;
                    continue;
                }
            }
            let Some((j, _)) = enter else {
                return Ok(PhaseEnd::Optimal);
            };

            let sigma = if self.at_upper[j] { -1.0 } else { 1.0 };
            // ratio test, two passes: find the tightest step, then pick the
            // numerically largest pivot among the rows within tolerance of
            // it (smallest basic index instead while Bland's rule is on)
            let t_bound = self.hi[j] - self.lo[j]; // bound flip limit
            let row_limit = |i: usize, t: &Tableau| -> Option<(f64, bool)> {
                let aij = t.at(i, j);
                // entries this small are roundoff in rebuilt tableaus;
                // pivoting on them manufactures singular bases
                if aij.abs() <= PIVOT_TOL {
                    return None;
                }
                let rate = sigma * aij;
                let b = t.basis[i];
                let (limit, hits_upper) = if rate > 0.0 {
                    ((t.beta[i] - t.lo[b]) / rate, false)
                } else {
                    ((t.beta[i] - t.hi[b]) / rate, true)
                };
                if limit.is_finite() {
                    Some((limit.max(0.0), hits_upper))
                } else {
                    None
                }
            };
            let mut t_min = t_bound;
            for i in 0..self.m {
                if let Some((limit, _)) = row_limit(i, self) {
                    t_min = t_min.min(limit);
                }
            }
            if !t_min.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }
            // only exact ties may share the group: stepping past another
            // row's limit, however slightly, injects bound violations that
            // accumulate over long degenerate runs
            let mut leave: Option<(usize, bool, f64)> = None; // (row, at upper, limit)
            if t_bound > t_min {
                let mut best_piv = 0.0f64;
                for i in 0..self.m {
                    let Some((limit, hits_upper)) = row_limit(i, self) else {
                        continue;
                    };
                    if limit > t_min {
                        continue;
                    }
                    let better = match (&leave, bland) {
                        (None, _) => true,
                        (Some((r, _, _)), true) => self.basis[i] < self.basis[*r],
                        (Some(_), false) => self.at(i, j).abs() > best_piv,
                    };
                    if better {
                        best_piv = self.at(i, j).abs();
                        leave = Some((i, hits_upper, limit));
                    }
                }
            }
            // a small chosen pivot right after noise built up is a trap;
            // rebuild to exact data and redo this iteration
            if let Some((r, _, _)) = leave {
                if self.at(r, j).abs() < 1e-4 && since_rebuild > 64 {
                    self.rebuild()?;
                    dobj = self.reduced_costs(cost);
                    since_rebuild = 0;
                    since_refresh = 0;
                    continue;
                }
            }
            let step = match leave {
                None => t_bound,
                Some((_, _, limit)) => limit,
            };

            self.iterations += 1;
            if self.iterations > self.cap {
                return Err(Error::NumericalFailure(format!(
                    "simplex iteration cap {} exceeded",
                    self.cap
                )));
            }
            if step <= DEGEN_TOL {
                degen_streak += 1;
                if degen_streak >= DEGEN_STREAK {
                    // sticky for the rest of the phase: alternating rules
                    // can cycle through the same degenerate plateau forever
                    bland = true;
                }
            } else {
                degen_streak = 0;
            }

            match leave {
                None => {
                    // bound flip, no basis change
                    for i in 0..self.m {
                        let aij = self.at(i, j);
                        if aij != 0.0 {
                            self.beta[i] -= sigma * step * aij;
                        }
                    }
                    self.at_upper[j] = !self.at_upper[j];
                }
                Some((r, hits_upper, _)) => {
                    let enter_val = self.nonbasic_value(j) + sigma * step;
                    for i in 0..self.m {
                        let aij = self.at(i, j);
                        if aij != 0.0 {
                            self.beta[i] -= sigma * step * aij;
                        }
                    }
                    let leaving = self.basis[r];
                    self.is_basic[leaving] = false;
                    self.at_upper[leaving] = hits_upper;
                    self.pivot(r, j, &mut dobj);
                    self.basis[r] = j;
                    self.is_basic[j] = true;
                    self.beta[r] = enter_val;
                }
            }
        }
    }

    /// Gauss-Jordan elimination on column `j` with pivot row `r`, applied to
    /// the coefficient matrix, the transformed RHS, and the objective row.
    fn pivot(&mut self, r: usize, j: usize, dobj: &mut [f64]) {
        let ncols = self.ncols;
        let piv = self.a[r * ncols + j];
        let inv = 1.0 / piv;
        for c in 0..ncols {
            self.a[r * ncols + c] *= inv;
        }
        self.a[r * ncols + j] = 1.0;
        self.b[r] *= inv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * ncols + j];
            if f == 0.0 {
                continue;
            }
            let (head, tail) = self.a.split_at_mut(r.max(i) * ncols);
            let (row_i, row_r) = if i < r {
                (&mut head[i * ncols..i * ncols + ncols], &tail[..ncols])
            } else {
                (&mut tail[..ncols], &head[r * ncols..r * ncols + ncols])
            };
            for c in 0..ncols {
                row_i[c] -= f * row_r[c];
            }
            row_i[j] = 0.0;
            self.b[i] -= f * self.b[r];
        }
        let f = dobj[j];
        if f != 0.0 {
            for c in 0..ncols {
                dobj[c] -= f * self.a[r * ncols + c];
            }
            dobj[j] = 0.0;
        }
    }

    /// Reduced costs of `cost` under the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = d[self.basis[i]];
            if cb != 0.0 {
                for c in 0..self.ncols {
                    d[c] -= cb * self.at(i, c);
                }
                d[self.basis[i]] = 0.0;
            }
        }
        d
    }

    /// Pivots still-basic artificials out of the basis where possible,
    /// preferring the numerically largest pivot.
    fn drive_out_artificials(&mut self, dobj: &mut [f64]) {
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let mut col: Option<(usize, f64)> = None;
            for j in 0..self.art_start {
                if self.is_basic[j] || !self.eligible[j] {
                    continue;
                }
                let mag = self.at(r, j).abs();
                if mag > 1e-6 && col.map_or(true, |(_, best)| mag > best) {
                    col = Some((j, mag));
                }
            }
            if let Some((j, _)) = col {
                let art = self.basis[r];
                let val = self.nonbasic_value(j);
                self.is_basic[art] = false;
                self.at_upper[art] = false;
                self.pivot(r, j, dobj);
                self.basis[r] = j;
                self.is_basic[j] = true;
                self.beta[r] = val; // degenerate: entering stays at its bound
            }
            // rows with no usable column are redundant; the locked artificial
            // stays basic at zero and never blocks anything
        }
    }
}

/// Solves the model. `Optimal` solutions are primal feasible within
/// [`FEAS_TOL`]; infeasibility and unboundedness are reported as statuses.
///
/// Bounds are jittered by deterministic sub-tolerance amounts before
/// solving — that splits the degenerate ties these flow models are full of —
/// and the returned point is clamped to and validated against the exact
/// model. A retry under the full iteration budget covers the rare model
/// that still grinds out the first attempt's cap.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    match solve_lp_attempt(model, true, 10) {
        Err(Error::NumericalFailure(_)) => solve_lp_attempt(model, true, 50),
        other => other,
    }
}

fn solve_lp_attempt(model: &LpModel, perturb: bool, cap_factor: usize) -> Result<LpSolution> {
    model.validate()?;
    let nv = model.num_vars;
    let m = model.rows.len();
    let n_slack = model
        .rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let art_start = nv + n_slack;
    let ncols = art_start + m;

    let mut t = Tableau {
        m,
        ncols,
        a: vec![0.0; m * ncols],
        b: vec![0.0; m],
        a0: Vec::new(),
        b0: Vec::new(),
        lo: vec![0.0; ncols],
        hi: vec![f64::INFINITY; ncols],
        at_upper: vec![false; ncols],
        basis: vec![usize::MAX; m],
        beta: vec![0.0; m],
        is_basic: vec![false; ncols],
        eligible: vec![true; ncols],
        art_start,
        iterations: 0,
        cap: cap_factor * (nv + m),
    };
    for v in 0..nv {
        t.lo[v] = model.bounds[v].0;
        t.hi[v] = model.bounds[v].1;
        if t.hi[v] - t.lo[v] <= 0.0 {
            t.eligible[v] = false; // fixed variable, never enters
        }
    }
    if perturb {
        // deterministic per-column jitter in [1e-10, 2e-9]
        let jitter = |j: usize| -> f64 {
            let h = (j as u64).wrapping_mul(0x9e3779b97f4a7c15).rotate_left(17);
            1e-10 + 1.9e-9 * ((h % 1000) as f64 / 999.0)
        };
        for v in 0..ncols {
            if t.hi[v] > t.lo[v] {
                t.lo[v] -= jitter(v);
                if t.hi[v].is_finite() {
                    t.hi[v] += jitter(v.wrapping_add(7919));
                }
            }
        }
    }

    let mut slack_idx = nv;
    let mut need_phase1 = false;
    for (i, row) in model.rows.iter().enumerate() {
        let base = i * ncols;
        // equilibrate: rows with large coefficients (the n·x capacity rows)
        // otherwise produce badly scaled pivots
        let magnitude = row.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let scale = if magnitude > 0.0 {
            1.0 / magnitude
        } else {
            1.0
        };
        for (v, &c) in row.coeffs.iter().enumerate() {
            t.a[base + v] = c * scale;
        }
        t.b[i] = row.rhs * scale;
        let slack = if row.relation == Relation::Eq {
            None
        } else {
            let s = slack_idx;
            slack_idx += 1;
            t.a[base + s] = if row.relation == Relation::Le {
                1.0
            } else {
                -1.0
            };
            Some(s)
        };
        // residual with structural variables at their lower bounds
        let mut residual = t.b[i];
        for v in 0..nv {
            residual -= t.a[base + v] * t.lo[v];
        }
        let seeded = match (row.relation, slack) {
            (Relation::Le, Some(s)) if residual >= 0.0 => {
                t.basis[i] = s;
                t.beta[i] = residual;
                t.is_basic[s] = true;
                true
            }
            (Relation::Ge, Some(s)) if residual <= 0.0 => {
                // normalize so the basis column has coefficient +1
                for c in 0..ncols {
                    t.a[base + c] = -t.a[base + c];
                }
                t.b[i] = -t.b[i];
                t.basis[i] = s;
                t.beta[i] = -residual;
                t.is_basic[s] = true;
                true
            }
            _ => false,
        };
        if !seeded {
            if residual < 0.0 {
                for c in 0..ncols {
                    t.a[base + c] = -t.a[base + c];
                }
                t.b[i] = -t.b[i];
                residual = -residual;
            }
            let art = art_start + i;
            t.a[base + art] = 1.0;
            t.basis[i] = art;
            t.beta[i] = residual;
            t.is_basic[art] = true;
            need_phase1 = true;
        }
    }
    // artificial columns that were never used stay out of the picture
    for j in art_start..ncols {
        if !t.is_basic[j] {
            t.eligible[j] = false;
            t.hi[j] = 0.0;
        }
    }

    // freeze the pristine system for rebuilds
    t.a0 = t.a.clone();
    t.b0 = t.b.clone();
    // scaled units: every tableau row now has coefficients of magnitude <= 1
    let rhs_scale = 1.0 + (0..m).map(|i| t.b[i].abs()).fold(0.0, f64::max);

    // artificials seeded at zero already form a feasible basis
    let art_mass: f64 = (0..m)
        .filter(|&i| t.basis[i] >= art_start)
        .map(|i| t.beta[i])
        .sum();
    if need_phase1 && art_mass > FEAS_TOL {
        let mut phase1_cost = vec![0.0; ncols];
        for j in art_start..ncols {
            phase1_cost[j] = -1.0;
        }
        match t.run_phase(&phase1_cost)? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Err(Error::NumericalFailure("phase 1 reported unbounded".into()))
            }
        }
        t.refresh_beta();
        let art_sum: f64 = (0..t.m)
            .filter(|&i| t.basis[i] >= art_start)
            .map(|i| t.beta[i].max(0.0))
            .sum();
        if art_sum > FEAS_TOL * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![0.0; nv],
                objective_value: 0.0,
            });
        }
    }
    // lock artificials at zero for phase 2
    for j in art_start..ncols {
        t.eligible[j] = false;
        t.hi[j] = 0.0;
    }
    {
        let mut dummy = vec![0.0; ncols];
        t.drive_out_artificials(&mut dummy);
        t.refresh_beta();
    }

    let mut phase2_cost = vec![0.0; ncols];
    for v in 0..nv {
        phase2_cost[v] = match model.sense {
            Sense::Maximize => model.objective[v],
            Sense::Minimize => -model.objective[v],
        };
    }
    match t.run_phase(&phase2_cost)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                values: vec![0.0; nv],
                objective_value: match model.sense {
                    Sense::Maximize => f64::INFINITY,
                    Sense::Minimize => f64::NEG_INFINITY,
                },
            });
        }
    }
    t.refresh_beta();

    // extract structural values
    let mut x = vec![0.0; nv];
    for v in 0..nv {
        x[v] = t.nonbasic_value(v);
    }
    for i in 0..m {
        if t.basis[i] < nv {
            x[t.basis[i]] = t.beta[i];
        }
    }
    for v in 0..nv {
        let (lo, hi) = model.bounds[v];
        if x[v] < lo {
            if lo - x[v] > FEAS_TOL {
                return Err(Error::NumericalFailure(format!(
                    "variable {v} below its bound"
                )));
            }
            x[v] = lo;
        }
        if x[v] > hi {
            if x[v] - hi > FEAS_TOL {
                return Err(Error::NumericalFailure(format!(
                    "variable {v} above its bound"
                )));
            }
            x[v] = hi;
        }
    }
    let worst = model
        .row_violations(&x, 0.0)
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0, f64::max);
    if worst > FEAS_TOL * rhs_scale.max(10.0) {
        return Err(Error::NumericalFailure(format!(
            "solution violates a row by {worst:.3e}"
        )));
    }
    let objective_value = model.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values: x,
        objective_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_box_maximum() {
        let mut m = LpModel::new(1, Sense::Maximize);
        m.objective[0] = 1.0;
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-9);
        assert!((s.objective_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_var_knapsack_vertex() {
        // maximize 5a + 3b subject to a + 2b <= 1 on [0,1]^2: (1, 0)
        let mut m = LpModel::new(2, Sense::Maximize);
        m.objective = vec![5.0, 3.0];
        m.add_row(vec![1.0, 2.0], Relation::Le, 1.0).unwrap();
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 5.0).abs() < 1e-7);
        assert!((s.values[0] - 1.0).abs() < 1e-7);
        assert!(s.values[1].abs() < 1e-7);
    }

    #[test]
    fn bound_conflict_is_infeasible() {
        // minimize x subject to x >= 2 with x in [0,1]
        let mut m = LpModel::new(1, Sense::Minimize);
        m.objective[0] = 1.0;
        m.add_row(vec![1.0], Relation::Ge, 2.0).unwrap();
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn cut_moves_the_optimum() {
        let mut m = LpModel::new(2, Sense::Maximize);
        m.objective = vec![5.0, 3.0];
        m.add_row(vec![1.0, 2.0], Relation::Le, 1.0).unwrap();
        let cut = m.add_cut(&[1.0, 0.0], Relation::Le, 0.5).unwrap();
        let s = solve_lp(&cut).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 3.25).abs() < 1e-7);
        assert!((s.values[0] - 0.5).abs() < 1e-7);
        assert!((s.values[1] - 0.25).abs() < 1e-7);
    }

    #[test]
    fn redundant_cut_keeps_objective() {
        let mut m = LpModel::new(2, Sense::Maximize);
        m.objective = vec![5.0, 3.0];
        m.add_row(vec![1.0, 2.0], Relation::Le, 1.0).unwrap();
        let base = solve_lp(&m).unwrap();
        let dup = m.add_cut(&[1.0, 2.0], Relation::Le, 1.0).unwrap();
        let again = solve_lp(&dup).unwrap();
        assert!((base.objective_value - again.objective_value).abs() <= OPT_TOL);
    }

    #[test]
    fn contradictory_cut_is_infeasible() {
        let mut m = LpModel::new(2, Sense::Maximize);
        m.objective = vec![5.0, 3.0];
        m.add_row(vec![1.0, 2.0], Relation::Le, 1.0).unwrap();
        let bad = m.add_cut(&[0.0, 0.0], Relation::Le, -1.0).unwrap();
        assert_eq!(solve_lp(&bad).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn wrong_cut_length_rejected() {
        let m = LpModel::new(2, Sense::Maximize);
        assert!(m.add_cut(&[1.0], Relation::Le, 0.0).is_err());
    }

    #[test]
    fn equality_rows_and_tight_bounds() {
        // maximize a + b with a + b = 1 and a fixed at 0.25
        let mut m = LpModel::new(2, Sense::Maximize);
        m.objective = vec![1.0, 1.0];
        m.add_row(vec![1.0, 1.0], Relation::Eq, 1.0).unwrap();
        m.set_bound(0, 0.25, 0.25).unwrap();
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 0.25).abs() < 1e-9);
        assert!((s.values[1] - 0.75).abs() < 1e-7);
    }
}
