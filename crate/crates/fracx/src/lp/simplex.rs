//! Bounded-variable revised simplex with an explicit dense basis inverse.
//!
//! Pivot rule: Dantzig with a permanent Bland fallback once the degenerate
//! pivot count passes `3 * (rows + cols)`. Warm restarts after row additions
//! or objective swaps reuse the current basis: new rows enter with their slack
//! basic, out-of-bound slacks are patched by artificials, and a short phase 1
//! cleans them up.

use super::{LinearModel, LpError, LpSolution, LpStatus, Relation, Row, FEAS_TOL, OPT_TOL,
            PIVOT_FLOOR};

const INF: f64 = f64::INFINITY;
/// Pivot steps smaller than this count as degenerate.
const DEGEN_TOL: f64 = 1e-10;
/// Basic values are recomputed from the inverse this often.
const XB_REFRESH_PERIOD: usize = 512;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum NbState {
    AtLo,
    AtHi,
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum LoopExit {
    Done,
    Unbounded,
    IterationLimit,
    StalledPivot,
}

/// Solver state that survives row additions and objective swaps.
pub struct Simplex {
    n_struct: usize,
    sense_max: bool,
    obj_const: f64,

    // columns 0..n_struct structural, then one slack per row, then artificials
    cols: Vec<Vec<(u32, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    p1cost: Vec<f64>,
    rhs: Vec<f64>,

    m: usize,
    binv: Vec<f64>, // m * m, row-major
    basis: Vec<u32>,
    basis_pos: Vec<i32>, // var -> row position, -1 when nonbasic
    nb_state: Vec<NbState>,
    xb: Vec<f64>,

    live_arts: Vec<u32>,
    iterations: usize,
    degenerate: usize,
    bland: bool,
    cap_override: Option<usize>,
    iter_cap: usize,
    last_status: Option<LpStatus>,

    // scratch
    y: Vec<f64>,
    w: Vec<f64>,
}

impl Simplex {
    pub fn new(model: &LinearModel) -> Result<Self, LpError> {
        let n = model.num_vars();
        let mut spx = Simplex {
            n_struct: n,
            sense_max: model.sense() == super::Sense::Maximize,
            obj_const: model.objective_constant(),
            cols: (0..n).map(|_| Vec::new()).collect(),
            lo: Vec::with_capacity(n),
            hi: Vec::with_capacity(n),
            cost: Vec::with_capacity(n),
            p1cost: Vec::with_capacity(n),
            rhs: Vec::new(),
            m: 0,
            binv: Vec::new(),
            basis: Vec::new(),
            basis_pos: vec![-1; n],
            nb_state: Vec::with_capacity(n),
            xb: Vec::new(),
            live_arts: Vec::new(),
            iterations: 0,
            degenerate: 0,
            bland: false,
            cap_override: None,
            iter_cap: 0,
            last_status: None,
            y: Vec::new(),
            w: Vec::new(),
        };
        for j in 0..n {
            let (lo, hi) = model.bounds(j);
            let c = model.objective_coeffs()[j];
            spx.lo.push(lo);
            spx.hi.push(hi);
            spx.cost.push(if spx.sense_max { -c } else { c });
            spx.p1cost.push(0.0);
            spx.nb_state.push(initial_state(lo, hi));
        }
        for row in model.rows() {
            if let Some(&(j, _)) = row.coeffs.iter().find(|&&(j, _)| j >= n) {
                return Err(LpError::BadColumn(j));
            }
        }
        spx.install_rows(model.rows());
        Ok(spx)
    }

    /// Absolute pivot cap; without it the cap is `50 * (rows + cols)` per
    /// (re)optimization.
    pub fn set_iteration_cap(&mut self, cap: usize) {
        self.cap_override = Some(cap);
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Appends rows and places their slacks into the basis, bordering the
    /// inverse. Cost is nnz * m per row.
    pub fn append_rows(&mut self, rows: &[Row]) {
        self.install_rows(rows);
    }

    /// Swaps the objective (model sense unchanged). The basis remains primal
    /// feasible, so reoptimization is a pure phase-2 run.
    pub fn set_objective(&mut self, coeffs: &[f64], constant: f64) {
        assert_eq!(coeffs.len(), self.n_struct);
        for j in 0..self.n_struct {
            self.cost[j] = if self.sense_max { -coeffs[j] } else { coeffs[j] };
        }
        self.obj_const = constant;
        self.last_status = None;
    }

    fn install_rows(&mut self, rows: &[Row]) {
        if rows.is_empty() {
            return;
        }
        let m_old = self.m;
        let k = rows.len();
        let m_new = m_old + k;
        let consolidated: Vec<Vec<(u32, f64)>> =
            rows.iter().map(|r| consolidate(&r.coeffs)).collect();

        // border the inverse: [[B^-1, 0], [-R B^-1, I]]
        let mut binv_new = vec![0.0; m_new * m_new];
        for i in 0..m_old {
            binv_new[i * m_new..i * m_new + m_old]
                .copy_from_slice(&self.binv[i * m_old..(i + 1) * m_old]);
        }
        for (t, coeffs) in consolidated.iter().enumerate() {
            let i = m_old + t;
            binv_new[i * m_new + i] = 1.0;
            for &(j, v) in coeffs {
                let p = self.basis_pos[j as usize];
                if p >= 0 {
                    let src = (p as usize) * m_new;
                    let dst = i * m_new;
                    for col in 0..m_old {
                        binv_new[dst + col] -= v * binv_new[src + col];
                    }
                }
            }
        }
        self.binv = binv_new;
        self.m = m_new;

        for (t, row) in rows.iter().enumerate() {
            let r = m_old + t;
            let coeffs = &consolidated[t];
            let mut act = 0.0;
            for &(j, v) in coeffs {
                act += v * self.value_of(j);
                self.cols[j as usize].push((r as u32, v));
            }
            let slack = self.cols.len() as u32;
            self.cols.push(vec![(r as u32, 1.0)]);
            let (slo, shi) = match row.rel {
                Relation::Le => (0.0, INF),
                Relation::Ge => (-INF, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            self.lo.push(slo);
            self.hi.push(shi);
            self.cost.push(0.0);
            self.p1cost.push(0.0);
            self.nb_state.push(NbState::AtLo);
            self.basis_pos.push(r as i32);
            self.basis.push(slack);
            self.rhs.push(row.rhs);
            self.xb.push(row.rhs - act);
        }
        self.last_status = None;
    }

    fn value_of(&self, var: u32) -> f64 {
        let v = var as usize;
        let p = self.basis_pos[v];
        if p >= 0 {
            return self.xb[p as usize];
        }
        match self.nb_state[v] {
            NbState::AtLo => self.lo[v],
            NbState::AtHi => self.hi[v],
            NbState::Free => 0.0,
        }
    }

    /// Replaces out-of-bound basics with artificials so that the basis is
    /// primal feasible. The artificial clones the column of the variable it
    /// displaces, so the basis matrix and its inverse are unchanged.
    fn patch_infeasible(&mut self) -> usize {
        let mut patched = 0;
        for r in 0..self.m {
            let bvar = self.basis[r] as usize;
            let v = self.xb[r];
            let (blo, bhi) = (self.lo[bvar], self.hi[bvar]);
            if v >= blo - FEAS_TOL && v <= bhi + FEAS_TOL {
                continue;
            }
            let (bound, state) = if v < blo {
                (blo, NbState::AtLo)
            } else {
                (bhi, NbState::AtHi)
            };
            let residual = v - bound;
            let old_col = self.cols[bvar].clone();
            self.basis_pos[bvar] = -1;
            self.nb_state[bvar] = state;
            let art = self.cols.len() as u32;
            self.cols.push(old_col);
            self.lo.push(if residual >= 0.0 { 0.0 } else { -INF });
            self.hi.push(if residual >= 0.0 { INF } else { 0.0 });
            self.cost.push(0.0);
            self.p1cost.push(if residual >= 0.0 { 1.0 } else { -1.0 });
            self.nb_state.push(NbState::AtLo);
            self.basis_pos.push(r as i32);
            self.basis[r] = art;
            self.xb[r] = residual;
            self.live_arts.push(art);
            patched += 1;
        }
        patched
    }

    pub fn optimize(&mut self) -> Result<LpSolution, LpError> {
        self.recompute_xb();
        self.patch_infeasible();
        self.run_phases()
    }

    /// Re-solves after `append_rows`/`set_objective`, reusing the basis.
    pub fn reoptimize(&mut self) -> Result<LpSolution, LpError> {
        self.patch_infeasible();
        self.run_phases()
    }

    fn run_phases(&mut self) -> Result<LpSolution, LpError> {
        self.iter_cap = self
            .cap_override
            .unwrap_or_else(|| self.iterations + (50 * (self.m + self.cols.len())).max(256));
        if !self.live_arts.is_empty() {
            match self.primal_loop(true)? {
                LoopExit::Done => {}
                LoopExit::IterationLimit => return Ok(self.extract(LpStatus::IterationLimit)),
                LoopExit::Unbounded | LoopExit::StalledPivot => {
                    return Err(LpError::NumericalBreakdown("phase 1 stalled".into()))
                }
            }
            if self.phase1_objective() > 1e-7 {
                self.last_status = Some(LpStatus::Infeasible);
                return Ok(self.extract(LpStatus::Infeasible));
            }
            self.retire_artificials();
        }
        let exit = self.primal_loop(false)?;
        let mut status = match exit {
            LoopExit::Done => LpStatus::Optimal,
            LoopExit::Unbounded => LpStatus::Unbounded,
            LoopExit::IterationLimit => LpStatus::IterationLimit,
            LoopExit::StalledPivot => {
                return Err(LpError::NumericalBreakdown("no acceptable pivot".into()))
            }
        };
        if status == LpStatus::Optimal {
            self.recompute_xb();
            if self.worst_basic_violation() > FEAS_TOL || self.system_residual() > FEAS_TOL {
                // one repair pass: refactorize, re-patch, re-run both phases
                self.refresh_inverse()?;
                self.patch_infeasible();
                match self.primal_loop(true)? {
                    LoopExit::Done => {}
                    LoopExit::IterationLimit => {
                        self.last_status = Some(LpStatus::IterationLimit);
                        return Ok(self.extract(LpStatus::IterationLimit));
                    }
                    _ => return Err(LpError::NumericalBreakdown("repair phase 1 failed".into())),
                }
                if self.phase1_objective() > 1e-7 {
                    status = LpStatus::Infeasible;
                } else {
                    self.retire_artificials();
                    match self.primal_loop(false)? {
                        LoopExit::Done => {}
                        LoopExit::Unbounded => status = LpStatus::Unbounded,
                        LoopExit::IterationLimit => status = LpStatus::IterationLimit,
                        _ => {
                            return Err(LpError::NumericalBreakdown("repair phase 2 failed".into()))
                        }
                    }
                }
            }
        }
        self.last_status = Some(status);
        Ok(self.extract(status))
    }

    fn retire_artificials(&mut self) {
        let arts = std::mem::take(&mut self.live_arts);
        for a in arts {
            let a = a as usize;
            self.lo[a] = 0.0;
            self.hi[a] = 0.0;
            self.p1cost[a] = 0.0;
            if self.basis_pos[a] < 0 {
                self.nb_state[a] = NbState::AtLo;
            }
        }
    }

    fn phase1_objective(&self) -> f64 {
        self.live_arts
            .iter()
            .map(|&a| self.value_of(a) * self.p1cost[a as usize])
            .sum()
    }

    fn worst_basic_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.m {
            let b = self.basis[r] as usize;
            worst = worst
                .max(self.lo[b] - self.xb[r])
                .max(self.xb[r] - self.hi[b]);
        }
        worst
    }

    /// Independent consistency check: every row equality (including its
    /// slack) must hold at the current variable values.
    fn system_residual(&self) -> f64 {
        let mut acc = vec![0.0; self.m];
        for j in 0..self.cols.len() {
            let v = self.value_of(j as u32);
            if v != 0.0 {
                for &(r, a) in &self.cols[j] {
                    acc[r as usize] += a * v;
                }
            }
        }
        acc.iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn recompute_xb(&mut self) {
        if self.m == 0 {
            return;
        }
        let mut resid = self.rhs.clone();
        for j in 0..self.cols.len() {
            if self.basis_pos[j] >= 0 {
                continue;
            }
            let v = self.value_of(j as u32);
            if v != 0.0 {
                for &(r, a) in &self.cols[j] {
                    resid[r as usize] -= a * v;
                }
            }
        }
        for i in 0..self.m {
            let row = &self.binv[i * self.m..(i + 1) * self.m];
            self.xb[i] = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
        }
    }

    /// y = (phase costs over basics)^T B^-1, assembled from inverse rows.
    fn compute_duals(&mut self, phase1: bool) {
        let mut y = std::mem::take(&mut self.y);
        y.clear();
        y.resize(self.m, 0.0);
        for i in 0..self.m {
            let b = self.basis[i] as usize;
            let c = if phase1 {
                self.p1cost[b]
            } else {
                self.cost[b]
            };
            if c != 0.0 {
                let row = &self.binv[i * self.m..(i + 1) * self.m];
                for (t, &v) in row.iter().enumerate() {
                    y[t] += c * v;
                }
            }
        }
        self.y = y;
    }

    fn reduced_cost(&self, j: usize, phase1: bool) -> f64 {
        let mut d = if phase1 {
            self.p1cost[j]
        } else {
            self.cost[j]
        };
        for &(r, v) in &self.cols[j] {
            d -= self.y[r as usize] * v;
        }
        d
    }

    fn primal_loop(&mut self, phase1: bool) -> Result<LoopExit, LpError> {
        let mut refreshes = 0usize;
        let refactor_period = if self.m <= 1500 {
            (4 * self.m).max(256)
        } else {
            usize::MAX
        };
        let mut since_refactor = 0usize;
        let mut excluded: Vec<usize> = Vec::new();
        loop {
            if phase1 && self.phase1_objective() <= 1e-9 {
                return Ok(LoopExit::Done);
            }
            if self.iterations >= self.iter_cap {
                return Ok(LoopExit::IterationLimit);
            }
            if self.iterations % XB_REFRESH_PERIOD == XB_REFRESH_PERIOD - 1 {
                self.recompute_xb();
            }
            if since_refactor >= refactor_period {
                self.refresh_inverse()?;
                since_refactor = 0;
            }
            self.compute_duals(phase1);
            excluded.clear();
            // pick an entering column whose pivot is acceptably large; poor
            // candidates are excluded and pricing retried a few times
            let outcome = loop {
                let Some((e, d_e)) = self.price(phase1, &excluded) else {
                    if excluded.is_empty() {
                        break None;
                    }
                    // only numerically poor candidates remain: refresh once,
                    // then accept whatever pivot is available
                    if refreshes == 0 {
                        refreshes += 1;
                        self.refresh_inverse()?;
                        since_refactor = 0;
                        excluded.clear();
                        self.compute_duals(phase1);
                        continue;
                    }
                    let e = excluded[0];
                    let d = self.reduced_cost(e, phase1);
                    let delta = self.entering_direction(e, d);
                    self.ftran(e);
                    break Some((e, delta, self.ratio_test(e, delta)));
                };
                let delta = self.entering_direction(e, d_e);
                self.ftran(e);
                let outcome = self.ratio_test(e, delta);
                if let RatioOutcome::Pivot { row } = outcome {
                    if self.w[row].abs() < 1e-8 && excluded.len() < 8 {
                        excluded.push(e);
                        continue;
                    }
                }
                break Some((e, delta, outcome));
            };
            let Some((e, delta, outcome)) = outcome else {
                return Ok(LoopExit::Done);
            };
            match outcome {
                RatioOutcome::Unbounded => {
                    if phase1 {
                        return Err(LpError::NumericalBreakdown(
                            "unbounded infeasibility phase".into(),
                        ));
                    }
                    return Ok(LoopExit::Unbounded);
                }
                RatioOutcome::BoundFlip(t) => {
                    self.apply_bound_flip(e, delta, t);
                }
                RatioOutcome::Pivot { row } => {
                    if self.w[row].abs() < PIVOT_FLOOR {
                        return Ok(LoopExit::StalledPivot);
                    }
                    self.apply_pivot(e, delta, row);
                    since_refactor += 1;
                }
            }
            self.iterations += 1;
        }
    }

    fn entering_direction(&self, e: usize, d_e: f64) -> f64 {
        match self.nb_state[e] {
            NbState::AtLo => 1.0,
            NbState::AtHi => -1.0,
            NbState::Free => {
                if d_e < 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    fn price(&self, phase1: bool, excluded: &[usize]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols.len() {
            if self.basis_pos[j] >= 0 || self.lo[j] == self.hi[j] {
                continue;
            }
            if excluded.contains(&j) {
                continue;
            }
            let d = self.reduced_cost(j, phase1);
            let eligible = match self.nb_state[j] {
                NbState::AtLo => d < -OPT_TOL,
                NbState::AtHi => d > OPT_TOL,
                NbState::Free => d.abs() > OPT_TOL,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, d));
            }
            match best {
                Some((_, bd)) if d.abs() <= bd.abs() => {}
                _ => best = Some((j, d)),
            }
        }
        best
    }

    fn ftran(&mut self, e: usize) {
        let mut w = std::mem::take(&mut self.w);
        w.clear();
        w.resize(self.m, 0.0);
        let col = &self.cols[e];
        for (i, slot) in w.iter_mut().enumerate() {
            let row = &self.binv[i * self.m..(i + 1) * self.m];
            let mut acc = 0.0;
            for &(r, v) in col {
                acc += row[r as usize] * v;
            }
            *slot = acc;
        }
        self.w = w;
    }

    /// Strict and relaxed blocking steps of basic `i` (relaxed allows the
    /// blocking bound to be overshot by the feasibility tolerance).
    fn blocking_t(&self, i: usize, delta: f64) -> Option<(f64, f64)> {
        let rate = -delta * self.w[i];
        if rate.abs() <= PIVOT_FLOOR {
            return None;
        }
        let b = self.basis[i] as usize;
        let (bound, dir) = if rate > 0.0 {
            (self.hi[b], 1.0)
        } else {
            (self.lo[b], -1.0)
        };
        if !bound.is_finite() {
            return None;
        }
        let strict = ((bound - self.xb[i]) / rate).max(0.0);
        let relaxed = ((bound + dir * FEAS_TOL - self.xb[i]) / rate).max(0.0);
        Some((strict, relaxed))
    }

    /// Harris-style two-pass ratio test: the first pass finds the smallest
    /// relaxed step, the second picks the largest pivot among rows whose
    /// strict step fits under it. Stepping to the chosen row's strict bound
    /// keeps every basic within tolerance of its bounds.
    fn ratio_test(&self, e: usize, delta: f64) -> RatioOutcome {
        let span = self.hi[e] - self.lo[e];
        let t_bound = if span.is_finite() { span } else { INF };
        let mut t_lim = INF;
        for i in 0..self.m {
            if let Some((_, relaxed)) = self.blocking_t(i, delta) {
                if relaxed < t_lim {
                    t_lim = relaxed;
                }
            }
        }
        if t_lim.is_infinite() && t_bound.is_infinite() {
            return RatioOutcome::Unbounded;
        }
        if t_bound <= t_lim {
            return RatioOutcome::BoundFlip(t_bound);
        }
        let mut best_row = usize::MAX;
        let mut best_piv = -1.0;
        let mut best_strict = 0.0;
        for i in 0..self.m {
            if let Some((strict, _)) = self.blocking_t(i, delta) {
                if strict <= t_lim {
                    let better = if self.bland {
                        best_row == usize::MAX || self.basis[i] < self.basis[best_row]
                    } else {
                        self.w[i].abs() > best_piv
                    };
                    if better {
                        best_row = i;
                        best_piv = self.w[i].abs();
                        best_strict = strict;
                    }
                }
            }
        }
        debug_assert!(best_row != usize::MAX);
        if t_bound <= best_strict {
            return RatioOutcome::BoundFlip(t_bound);
        }
        RatioOutcome::Pivot { row: best_row }
    }

    fn apply_bound_flip(&mut self, e: usize, delta: f64, t: f64) {
        for i in 0..self.m {
            self.xb[i] += -delta * self.w[i] * t;
        }
        self.nb_state[e] = match self.nb_state[e] {
            NbState::AtLo => NbState::AtHi,
            NbState::AtHi => NbState::AtLo,
            NbState::Free => unreachable!("free variables cannot bound-flip"),
        };
        if t <= DEGEN_TOL {
            self.note_degenerate();
        }
    }

    fn apply_pivot(&mut self, e: usize, delta: f64, row: usize) {
        let rate_r = -delta * self.w[row];
        let leaving = self.basis[row] as usize;
        let target = if rate_r > 0.0 {
            self.hi[leaving]
        } else {
            self.lo[leaving]
        };
        let t = ((target - self.xb[row]) / rate_r).max(0.0);
        let entering_value = self.value_of(e as u32) + delta * t;
        for i in 0..self.m {
            if i != row {
                self.xb[i] += -delta * self.w[i] * t;
            }
        }
        self.basis_pos[leaving] = -1;
        self.nb_state[leaving] = if self.lo[leaving] == self.hi[leaving] {
            NbState::AtLo
        } else if rate_r > 0.0 {
            NbState::AtHi
        } else {
            NbState::AtLo
        };
        self.basis[row] = e as u32;
        self.basis_pos[e] = row as i32;
        self.xb[row] = entering_value;

        // eta update of the inverse
        let m = self.m;
        let inv_piv = 1.0 / self.w[row];
        let r0 = row * m;
        for k in 0..m {
            self.binv[r0 + k] *= inv_piv;
        }
        let (before, rest) = self.binv.split_at_mut(row * m);
        let (prow, after) = rest.split_at_mut(m);
        for (i, seg) in before.chunks_exact_mut(m).enumerate() {
            let f = self.w[i];
            if f != 0.0 {
                for k in 0..m {
                    seg[k] -= f * prow[k];
                }
            }
        }
        for (off, seg) in after.chunks_exact_mut(m).enumerate() {
            let f = self.w[row + 1 + off];
            if f != 0.0 {
                for k in 0..m {
                    seg[k] -= f * prow[k];
                }
            }
        }
        if t <= DEGEN_TOL {
            self.note_degenerate();
        }
    }

    fn note_degenerate(&mut self) {
        self.degenerate += 1;
        if !self.bland && self.degenerate > 3 * (self.m + self.cols.len()) {
            self.bland = true;
        }
    }

    /// Recomputes the inverse from the basis columns by Gauss-Jordan with
    /// partial pivoting. Last-resort repair for accumulated drift.
    fn refresh_inverse(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (p, &bvar) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[bvar as usize] {
                a[r as usize * m + p] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < PIVOT_FLOOR {
                return Err(LpError::NumericalBreakdown("singular basis".into()));
            }
            if piv_row != col {
                for k in 0..m {
                    a.swap(col * m + k, piv_row * m + k);
                    inv.swap(col * m + k, piv_row * m + k);
                }
            }
            let inv_piv = 1.0 / a[col * m + col];
            for k in 0..m {
                a[col * m + k] *= inv_piv;
                inv[col * m + k] *= inv_piv;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        // rows of inv are w.r.t. permuted equations; Gauss-Jordan on the
        // augmented system already accounts for the swaps, so inv is B^-1.
        self.binv = inv;
        self.recompute_xb();
        Ok(())
    }

    fn extract(&self, status: LpStatus) -> LpSolution {
        let mut primal = vec![0.0; self.n_struct];
        for (j, p) in primal.iter_mut().enumerate() {
            *p = self.value_of(j as u32);
        }
        let mut objective = self.obj_const;
        for j in 0..self.n_struct {
            let c = if self.sense_max {
                -self.cost[j]
            } else {
                self.cost[j]
            };
            objective += c * primal[j];
        }
        LpSolution {
            status,
            primal,
            objective,
            iterations: self.iterations,
            basis_signature: self.signature(),
        }
    }

    fn signature(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |bits: u64| {
            h ^= bits;
            h = h.wrapping_mul(0x100000001b3);
        };
        for &b in &self.basis {
            feed(b as u64);
        }
        for (j, s) in self.nb_state.iter().enumerate() {
            if self.basis_pos[j] < 0 {
                feed(match s {
                    NbState::AtLo => 1,
                    NbState::AtHi => 2,
                    NbState::Free => 3,
                });
            }
        }
        h
    }
}

enum RatioOutcome {
    Unbounded,
    BoundFlip(f64),
    Pivot { row: usize },
}

fn initial_state(lo: f64, hi: f64) -> NbState {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if hi.abs() < lo.abs() {
                NbState::AtHi
            } else {
                NbState::AtLo
            }
        }
        (true, false) => NbState::AtLo,
        (false, true) => NbState::AtHi,
        (false, false) => NbState::Free,
    }
}

fn consolidate(coeffs: &[(usize, f64)]) -> Vec<(u32, f64)> {
    let mut sorted: Vec<(usize, f64)> = coeffs.to_vec();
    sorted.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(u32, f64)> = Vec::with_capacity(sorted.len());
    for (j, v) in sorted {
        match out.last_mut() {
            Some((pj, pv)) if *pj == j as u32 => *pv += v,
            _ => out.push((j as u32, v)),
        }
    }
    out.retain(|&(_, v)| v != 0.0);
    out
}
