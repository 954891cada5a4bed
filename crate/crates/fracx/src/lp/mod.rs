//! Deterministic dense LP kernel: bounded-variable revised simplex, a
//! cutting-plane driver with warm restarts, and LP-file export.
//!
//! Every relaxation in this crate is assembled as a [`LinearModel`] and solved
//! here. The solver is intentionally self-contained: convex (conic, moment)
//! constraints are enforced exclusively through [`cutting_loop`] with
//! supporting-hyperplane separators, never through an external conic solver.

mod simplex;

use std::collections::HashMap;
use std::fmt;

pub use simplex::Simplex;

/// Feasibility tolerance: rows of an optimal solution hold to this slack.
pub const FEAS_TOL: f64 = 1e-7;
/// Optimality (reduced cost) tolerance.
pub const OPT_TOL: f64 = 1e-7;
/// Smallest pivot magnitude the simplex will accept.
pub const PIVOT_FLOOR: f64 = 1e-11;
/// Default separation tolerance of the cutting loop.
pub const CUT_TOL: f64 = 1e-6;
/// Default round cap of the cutting loop.
pub const CUT_MAX_ROUNDS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

/// One linear row `sum coeffs <rel> rhs`. Coefficients are sparse column
/// index/value pairs; duplicate indices are summed by the solver.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, rel: Relation, rhs: f64) -> Self {
        Row { coeffs, rel, rhs }
    }

    /// Signed activity of the row at a point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// Violation of the row at a point (positive means violated).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.rel {
            Relation::Le => act - self.rhs,
            Relation::Ge => self.rhs - act,
            Relation::Eq => (act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Primal solution of a [`LinearModel`].
///
/// `basis_signature` hashes the final basis and bound-status vector; two runs
/// on identical input must produce identical signatures, objectives, and
/// iteration counts.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis_signature: u64,
}

#[derive(Debug, Clone)]
pub enum LpError {
    /// A pivot smaller than [`PIVOT_FLOOR`] was forced and refreshing the
    /// basis inverse did not help.
    NumericalBreakdown(String),
    /// Model refers to a column that does not exist.
    BadColumn(usize),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::NumericalBreakdown(what) => write!(f, "numerical breakdown: {what}"),
            LpError::BadColumn(j) => write!(f, "row references unknown column {j}"),
        }
    }
}

impl std::error::Error for LpError {}

/// Dense-bounded LP with a variable-name registry.
///
/// The registry maps each lifted symbol of the relaxations (`rho1`, `y1_2`,
/// `W1_2_3`, `w1_S1.3`, `u_S1.3`, `nu1`, `z1`, ...) to exactly one column;
/// registering the same name twice is a programming error and panics.
#[derive(Debug, Clone, Default)]
pub struct LinearModel {
    sense_max: bool,
    obj: Vec<f64>,
    obj_const: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    names: Vec<String>,
    by_name: HashMap<String, usize>,
    integer: Vec<bool>,
    rows: Vec<Row>,
}

impl LinearModel {
    pub fn new(sense: Sense) -> Self {
        LinearModel {
            sense_max: sense == Sense::Maximize,
            ..Default::default()
        }
    }

    pub fn sense(&self) -> Sense {
        if self.sense_max {
            Sense::Maximize
        } else {
            Sense::Minimize
        }
    }

    pub fn num_vars(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.obj
    }

    pub fn objective_constant(&self) -> f64 {
        self.obj_const
    }

    pub fn set_objective_constant(&mut self, c: f64) {
        self.obj_const = c;
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    /// Registers a new column. Panics on duplicate or malformed names so that
    /// a builder bug cannot silently alias two lifted symbols.
    pub fn add_var(&mut self, name: &str, lo: f64, hi: f64, obj: f64) -> usize {
        assert!(
            is_lp_name(name),
            "variable name {name:?} is not LP-file safe"
        );
        assert!(lo <= hi, "variable {name}: lo {lo} > hi {hi}");
        let idx = self.obj.len();
        let prev = self.by_name.insert(name.to_string(), idx);
        assert!(prev.is_none(), "duplicate variable name {name:?}");
        self.names.push(name.to_string());
        self.obj.push(obj);
        self.lo.push(lo);
        self.hi.push(hi);
        self.integer.push(false);
        idx
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn set_objective(&mut self, j: usize, c: f64) {
        self.obj[j] = c;
    }

    pub fn clear_objective(&mut self) {
        self.obj.iter_mut().for_each(|c| *c = 0.0);
        self.obj_const = 0.0;
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        assert!(lo <= hi, "var {}: lo {lo} > hi {hi}", self.names[j]);
        self.lo[j] = lo;
        self.hi[j] = hi;
    }

    /// Fixes a variable to a value (used by feasibility probes).
    pub fn fix(&mut self, j: usize, v: f64) {
        self.lo[j] = v;
        self.hi[j] = v;
    }

    /// Marks a column binary for LP-file export. The simplex itself always
    /// solves the continuous relaxation; integrality is certified elsewhere
    /// by enumeration.
    pub fn mark_binary(&mut self, j: usize) {
        self.integer[j] = true;
    }

    pub fn is_binary(&self, j: usize) -> bool {
        self.integer[j]
    }

    pub fn add_row(&mut self, row: Row) {
        debug_assert!(row.coeffs.iter().all(|&(j, _)| j < self.obj.len()));
        self.rows.push(row);
    }

    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = Row>) {
        for r in rows {
            self.add_row(r);
        }
    }

    /// Objective value (including the constant) of a point, in model sense.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.obj_const + self.obj.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest row/bound violation at a point.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            worst = worst.max(row.violation(x));
        }
        for j in 0..self.num_vars() {
            worst = worst.max(self.lo[j] - x[j]).max(x[j] - self.hi[j]);
        }
        worst
    }

    /// Solves the model from scratch with the default iteration cap
    /// `50 * (rows + cols)`.
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let mut spx = Simplex::new(self)?;
        spx.optimize()
    }

    pub fn solve_with_iter_cap(&self, cap: usize) -> Result<LpSolution, LpError> {
        let mut spx = Simplex::new(self)?;
        spx.set_iteration_cap(cap);
        spx.optimize()
    }
}

fn is_lp_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit() || c == '.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// A valid inequality produced by a separator, together with how strongly the
/// separating point violated it.
#[derive(Debug, Clone)]
pub struct Cut {
    pub row: Row,
    pub violation: f64,
}

/// Generates violated valid inequalities at a candidate point. Implementors
/// must only return cuts violated by at least the violation they report.
pub trait CutGenerator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut>;
}

impl<F: FnMut(&[f64]) -> Vec<Cut>> CutGenerator for F {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        self(point)
    }
}

/// Solves `model`, then alternates separation and warm-started re-solves until
/// no generator finds a violation above `tol` or `max_rounds` is exhausted.
///
/// Added cuts are appended to `model`, so the caller sees the final row set.
/// The objective sequence is monotone (nonincreasing for maximization) because
/// every added row is a valid inequality.
pub fn cutting_loop(
    model: &mut LinearModel,
    generators: &mut [Box<dyn CutGenerator>],
    max_rounds: usize,
    tol: f64,
) -> Result<LpSolution, LpError> {
    cutting_loop_logged(model, generators, max_rounds, tol).map(|(sol, _)| sol)
}

/// [`cutting_loop`] variant that also returns the per-round objectives.
pub fn cutting_loop_logged(
    model: &mut LinearModel,
    generators: &mut [Box<dyn CutGenerator>],
    max_rounds: usize,
    tol: f64,
) -> Result<(LpSolution, Vec<f64>), LpError> {
    // At most this many cuts per generator are kept per round; the least
    // violated are evicted first.
    const POOL_CAP: usize = 500;

    let mut spx = Simplex::new(model)?;
    let mut sol = spx.optimize()?;
    let mut objectives = vec![sol.objective];
    if sol.status != LpStatus::Optimal {
        return Ok((sol, objectives));
    }
    let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for _ in 0..max_rounds {
        let mut batch: Vec<Row> = Vec::new();
        for gen in generators.iter_mut() {
            let mut cuts: Vec<Cut> = gen
                .cuts(&sol.primal)
                .into_iter()
                .filter(|c| c.violation >= tol && c.row.violation(&sol.primal) >= 0.5 * tol)
                .collect();
            cuts.sort_by(|a, b| b.violation.total_cmp(&a.violation));
            cuts.truncate(POOL_CAP);
            for cut in cuts {
                if seen.insert(cut_signature(&cut.row)) {
                    batch.push(cut.row);
                }
            }
        }
        if batch.is_empty() {
            break;
        }
        for row in &batch {
            model.add_row(row.clone());
        }
        spx.append_rows(&batch);
        sol = spx.reoptimize()?;
        objectives.push(sol.objective);
        if sol.status != LpStatus::Optimal {
            break;
        }
    }
    Ok((sol, objectives))
}

/// Canonical fingerprint of a row, used to drop duplicate cuts across rounds.
fn cut_signature(row: &Row) -> u64 {
    let mut coeffs = row.coeffs.clone();
    coeffs.sort_by_key(|&(j, _)| j);
    let mut h: u64 = 0xcbf29ce484222325;
    let mut feed = |bits: u64| {
        h ^= bits;
        h = h.wrapping_mul(0x100000001b3);
    };
    let quant = |v: f64| (v * 1e10).round() as i64 as u64;
    for (j, v) in coeffs {
        feed(j as u64);
        feed(quant(v));
    }
    feed(match row.rel {
        Relation::Le => 1,
        Relation::Eq => 2,
        Relation::Ge => 3,
    });
    feed(quant(row.rhs));
    h
}

/// Writes the model in the ordinary human-readable LP file dialect with
/// deterministic column ordering.
pub fn export_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    out.push_str("\\ generated by fracx\n");
    out.push_str(match model.sense() {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    let mut first = true;
    for j in 0..model.num_vars() {
        let c = model.obj[j];
        if c != 0.0 {
            push_term(&mut out, c, &model.names[j], first);
            first = false;
        }
    }
    if model.obj_const != 0.0 {
        push_const(&mut out, model.obj_const, first);
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
    out.push('\n');
    out.push_str("Subject To\n");
    for (i, row) in model.rows.iter().enumerate() {
        let mut coeffs = row.coeffs.clone();
        coeffs.sort_by_key(|&(j, _)| j);
        out.push_str(&format!(" c{i}:"));
        let mut first = true;
        for (j, v) in coeffs {
            if v != 0.0 {
                push_term(&mut out, v, &model.names[j], first);
                first = false;
            }
        }
        if first {
            out.push_str(" 0 ");
            out.push_str(&model.names.first().map(String::as_str).unwrap_or("x"));
        }
        out.push_str(&format!(" {} {}\n", row.rel, fmt_num(row.rhs)));
    }
    out.push_str("Bounds\n");
    for j in 0..model.num_vars() {
        let (lo, hi) = (model.lo[j], model.hi[j]);
        let name = &model.names[j];
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => out.push_str(&format!(" {name} = {}\n", fmt_num(lo))),
            (true, true) => {
                out.push_str(&format!(" {} <= {name} <= {}\n", fmt_num(lo), fmt_num(hi)))
            }
            (true, false) => {
                if lo != 0.0 {
                    out.push_str(&format!(" {name} >= {}\n", fmt_num(lo)));
                }
            }
            (false, true) => out.push_str(&format!(" -inf <= {name} <= {}\n", fmt_num(hi))),
            (false, false) => out.push_str(&format!(" {name} free\n")),
        }
    }
    let binaries: Vec<&str> = (0..model.num_vars())
        .filter(|&j| model.integer[j])
        .map(|j| model.names[j].as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for name in binaries {
            out.push_str(&format!(" {name}\n"));
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, c: f64, name: &str, first: bool) {
    if c < 0.0 {
        out.push_str(" - ");
    } else if first {
        out.push(' ');
    } else {
        out.push_str(" + ");
    }
    let a = c.abs();
    if a == 1.0 {
        out.push_str(name);
    } else {
        out.push_str(&fmt_num(a));
        out.push(' ');
        out.push_str(name);
    }
}

fn push_const(out: &mut String, c: f64, first: bool) {
    if c < 0.0 {
        out.push_str(" - ");
    } else if first {
        out.push(' ');
    } else {
        out.push_str(" + ");
    }
    out.push_str(&fmt_num(c.abs()));
}

fn fmt_num(v: f64) -> String {
    let mut s = format!("{v}");
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(coeffs: Vec<(usize, f64)>, rhs: f64) -> Row {
        Row::new(coeffs, Relation::Le, rhs)
    }

    #[test]
    fn single_variable_box() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, f64::INFINITY, 1.0);
        m.add_row(le(vec![(x, 1.0)], 1.0));
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!((sol.primal[x] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        m.add_row(le(vec![(x, 1.0)], 0.0));
        m.add_row(Row::new(vec![(x, 1.0)], Relation::Ge, 1.0));
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, f64::INFINITY, 1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, 1.0);
        m.add_row(le(vec![(x, 1.0), (y, -1.0)], 2.0));
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_negative_bounds() {
        // max -x + 2y  s.t. x + y = 1, x in [-2, 2], y in [-1, 0.5]
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", -2.0, 2.0, -1.0);
        let y = m.add_var("y", -1.0, 0.5, 2.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0));
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[y] - 0.5).abs() < 1e-9);
        assert!((sol.primal[x] - 0.5).abs() < 1e-9);
        assert!((sol.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn classic_dense_lp() {
        // max 3a + 5b  s.t. a <= 4, 2b <= 12, 3a + 2b <= 18 -> 36 at (2, 6)
        let mut m = LinearModel::new(Sense::Maximize);
        let a = m.add_var("a", 0.0, f64::INFINITY, 3.0);
        let b = m.add_var("b", 0.0, f64::INFINITY, 5.0);
        m.add_row(le(vec![(a, 1.0)], 4.0));
        m.add_row(le(vec![(b, 2.0)], 12.0));
        m.add_row(le(vec![(a, 3.0), (b, 2.0)], 18.0));
        let sol = m.solve().unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-8);
        assert!((sol.primal[a] - 2.0).abs() < 1e-8);
        assert!((sol.primal[b] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn minimize_with_ge_rows_needs_phase1() {
        // min 2x + 3y  s.t. x + y >= 4, x + 3y >= 6 -> (3, 1), obj 9
        let mut m = LinearModel::new(Sense::Minimize);
        let x = m.add_var("x", 0.0, f64::INFINITY, 2.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, 3.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 4.0));
        m.add_row(Row::new(vec![(x, 1.0), (y, 3.0)], Relation::Ge, 6.0));
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 9.0).abs() < 1e-8);
    }

    #[test]
    fn solutions_satisfy_rows_and_bounds() {
        let mut m = LinearModel::new(Sense::Maximize);
        let mut vars = Vec::new();
        for j in 0..6 {
            vars.push(m.add_var(&format!("v{j}"), 0.0, 1.0, ((j * 7) % 5) as f64 - 2.0));
        }
        for r in 0..8 {
            let coeffs: Vec<(usize, f64)> = (0..6)
                .map(|j| (vars[j], (((r * 3 + j * 5) % 7) as f64) - 3.0))
                .collect();
            m.add_row(le(coeffs, 2.0 + r as f64 * 0.5));
        }
        let sol = m.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(m.max_violation(&sol.primal) <= FEAS_TOL);
    }

    #[test]
    fn deterministic_repeat_solve() {
        let mut m = LinearModel::new(Sense::Minimize);
        for j in 0..5 {
            m.add_var(&format!("x{j}"), 0.0, 2.0, (j as f64) - 2.3);
        }
        for r in 0..4 {
            let coeffs: Vec<(usize, f64)> =
                (0..5).map(|j| (j, ((r + j) % 3) as f64 - 1.0)).collect();
            m.add_row(Row::new(coeffs, Relation::Ge, -1.5));
        }
        let s1 = m.solve().unwrap();
        let s2 = m.solve().unwrap();
        assert_eq!(s1.iterations, s2.iterations);
        assert_eq!(s1.objective.to_bits(), s2.objective.to_bits());
        assert_eq!(s1.basis_signature, s2.basis_signature);
    }

    #[test]
    fn warm_restart_matches_fresh_solve() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, 10.0, 1.0);
        let y = m.add_var("y", 0.0, 10.0, 1.0);
        m.add_row(le(vec![(x, 1.0), (y, 1.0)], 12.0));
        let mut spx = Simplex::new(&m).unwrap();
        let s0 = spx.optimize().unwrap();
        assert!((s0.objective - 12.0).abs() < 1e-9);
        let extra = vec![
            le(vec![(x, 2.0), (y, 1.0)], 14.0),
            le(vec![(x, 1.0), (y, 3.0)], 18.0),
        ];
        spx.append_rows(&extra);
        let s1 = spx.reoptimize().unwrap();
        for row in extra.clone() {
            m.add_row(row);
        }
        let s2 = m.solve().unwrap();
        assert_eq!(s1.status, LpStatus::Optimal);
        assert!((s1.objective - s2.objective).abs() < 1e-8);
    }

    #[test]
    fn objective_swap_reuses_basis() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, 1.0, 1.0);
        let y = m.add_var("y", 0.0, 1.0, 0.0);
        m.add_row(le(vec![(x, 1.0), (y, 1.0)], 1.5));
        let mut spx = Simplex::new(&m).unwrap();
        let s0 = spx.optimize().unwrap();
        assert!((s0.objective - 1.0).abs() < 1e-9);
        spx.set_objective(&[0.0, 1.0], 0.0);
        let s1 = spx.reoptimize().unwrap();
        assert!((s1.objective - 1.0).abs() < 1e-9);
        spx.set_objective(&[1.0, 1.0], 0.0);
        let s2 = spx.reoptimize().unwrap();
        assert!((s2.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_reported() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, f64::INFINITY, 1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, 2.0);
        m.add_row(le(vec![(x, 1.0), (y, 1.0)], 4.0));
        m.add_row(le(vec![(x, 1.0), (y, 3.0)], 6.0));
        let sol = m.solve_with_iter_cap(1).unwrap();
        assert_eq!(sol.status, LpStatus::IterationLimit);
    }

    #[test]
    fn cutting_loop_without_separators_is_solve() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, 3.0, 2.0);
        m.add_row(le(vec![(x, 1.0)], 2.0));
        let direct = m.solve().unwrap();
        let looped = cutting_loop(&mut m, &mut [], CUT_MAX_ROUNDS, CUT_TOL).unwrap();
        assert_eq!(direct.objective.to_bits(), looped.objective.to_bits());
    }

    #[test]
    fn cutting_loop_scalar_tangents_converge() {
        // enforce rho * 2 >= 1 by tangent cuts of the constant map; the
        // model starts at rho = 0 and must converge to 0.5
        let mut m = LinearModel::new(Sense::Minimize);
        let rho = m.add_var("rho", 0.0, 10.0, 1.0);
        let mut gens: Vec<Box<dyn CutGenerator>> = vec![Box::new(move |point: &[f64]| {
            let viol = 0.5 - point[rho];
            if viol > 0.0 {
                vec![Cut {
                    row: Row::new(vec![(rho, 1.0)], Relation::Ge, 0.5),
                    violation: viol,
                }]
            } else {
                vec![]
            }
        })];
        let sol = cutting_loop(&mut m, &mut gens, 200, 1e-6).unwrap();
        assert!((sol.primal[rho] - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn cutting_loop_objective_monotone() {
        // maximization: valid cuts can only lower the bound
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, 4.0, 1.0);
        let y = m.add_var("y", 0.0, 4.0, 1.0);
        m.add_row(le(vec![(x, 1.0), (y, 1.0)], 7.0));
        let cuts = std::cell::RefCell::new(vec![
            le(vec![(x, 1.0)], 3.0),
            le(vec![(y, 1.0)], 2.5),
            le(vec![(x, 1.0), (y, 2.0)], 6.0),
        ]);
        let mut gens: Vec<Box<dyn CutGenerator>> = vec![Box::new(move |point: &[f64]| {
            let mut pool = cuts.borrow_mut();
            if let Some(row) = pool.iter().position(|r| r.violation(point) > 1e-6) {
                let row = pool.remove(row);
                let violation = row.violation(point);
                vec![Cut { row, violation }]
            } else {
                vec![]
            }
        })];
        let (_, objs) = cutting_loop_logged(&mut m, &mut gens, 200, 1e-6).unwrap();
        for pair in objs.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-8, "objectives {objs:?} not monotone");
        }
    }

    #[test]
    fn export_empty_model() {
        let m = LinearModel::new(Sense::Maximize);
        let text = export_lp(&m);
        assert!(text.starts_with("\\ generated by fracx\nMaximize"));
        assert!(text.trim_end().ends_with("End"));
    }

    #[test]
    fn export_single_var_single_bound_line() {
        let mut m = LinearModel::new(Sense::Minimize);
        m.add_var("x1", 0.0, 1.0, 1.0);
        let text = export_lp(&m);
        let bounds: Vec<&str> = text
            .lines()
            .skip_while(|l| *l != "Bounds")
            .skip(1)
            .take_while(|l| *l != "End" && *l != "Binary")
            .collect();
        assert_eq!(bounds, vec![" 0 <= x1 <= 1"]);
    }

    #[test]
    #[should_panic(expected = "duplicate variable name")]
    fn duplicate_names_rejected() {
        let mut m = LinearModel::new(Sense::Maximize);
        m.add_var("rho1", 0.0, 1.0, 0.0);
        m.add_var("rho1", 0.0, 1.0, 0.0);
    }

    #[test]
    fn fixed_variables_respected() {
        let mut m = LinearModel::new(Sense::Maximize);
        let x = m.add_var("x", 0.0, 1.0, 1.0);
        let y = m.add_var("y", 0.0, 1.0, 1.0);
        m.add_row(le(vec![(x, 1.0), (y, 1.0)], 1.2));
        m.fix(x, 0.7);
        let sol = m.solve().unwrap();
        assert!((sol.primal[x] - 0.7).abs() < 1e-12);
        assert!((sol.primal[y] - 0.5).abs() < 1e-8);
    }
}
