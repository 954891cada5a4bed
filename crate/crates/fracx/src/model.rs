//! Canonical problem representation, validation, and denominator-bound
//! computation shared by all relaxation builders.
//!
//! A [`FractionalProgram`] optimizes `sum_i (b_i0 + b_i.x)/(a_i0 + a_i.x) +
//! c.x` over `Cx <= d` with per-variable binary or interval marks. Every
//! builder assumes the positivity certificate of [`validate_program`]: each
//! denominator is strictly positive over the continuous relaxation.

use crate::lp::{LinearModel, LpStatus, Relation, Row, Sense, Simplex};
use crate::transform;
use std::fmt;

/// Margin below which a denominator counts as non-positive over the
/// relaxation.
pub const POSITIVITY_MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarKind {
    Binary,
    Continuous { lo: f64, hi: f64 },
}

impl VarKind {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            VarKind::Binary => (0.0, 1.0),
            VarKind::Continuous { lo, hi } => (lo, hi),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, VarKind::Binary)
    }
}

/// One ratio `(b0 + b.x) / (a0 + a.x)`; `a` is the denominator side.
#[derive(Debug, Clone)]
pub struct Ratio {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b0: f64,
    pub b: Vec<f64>,
}

impl Ratio {
    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.a0 + dot(&self.a, x)
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        self.b0 + dot(&self.b, x)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.numerator(x) / self.denominator(x)
    }
}

#[derive(Debug, Clone)]
pub struct FractionalProgram {
    pub n_vars: usize,
    pub ratios: Vec<Ratio>,
    pub linear_obj: Vec<f64>,
    /// Constraint rows `C x <= d`, dense.
    pub cons_rows: Vec<Vec<f64>>,
    pub cons_rhs: Vec<f64>,
    pub var_kind: Vec<VarKind>,
    pub sense: Sense,
}

impl FractionalProgram {
    /// Unconstrained program over binary variables with zero linear term.
    pub fn unconstrained_binary(ratios: Vec<Ratio>, n_vars: usize, sense: Sense) -> Self {
        FractionalProgram {
            n_vars,
            ratios,
            linear_obj: vec![0.0; n_vars],
            cons_rows: Vec::new(),
            cons_rhs: Vec::new(),
            var_kind: vec![VarKind::Binary; n_vars],
            sense,
        }
    }

    pub fn m(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_all_binary(&self) -> bool {
        self.var_kind.iter().all(VarKind::is_binary)
    }

    pub fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::with_capacity(self.n_vars);
        let mut hi = Vec::with_capacity(self.n_vars);
        for k in &self.var_kind {
            let (l, h) = k.bounds();
            lo.push(l);
            hi.push(h);
        }
        (lo, hi)
    }

    /// The relaxed system `Cbar x <= dbar`: the constraint rows followed by
    /// `x_j <= hi_j` and `-x_j <= -lo_j` for every variable, in that order.
    pub fn relaxed_rows(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rows = self.cons_rows.clone();
        let mut rhs = self.cons_rhs.clone();
        let (lo, hi) = self.var_bounds();
        for j in 0..self.n_vars {
            let mut r = vec![0.0; self.n_vars];
            r[j] = 1.0;
            rows.push(r);
            rhs.push(hi[j]);
        }
        for j in 0..self.n_vars {
            let mut r = vec![0.0; self.n_vars];
            r[j] = -1.0;
            rows.push(r);
            rhs.push(-lo[j]);
        }
        (rows, rhs)
    }

    /// Objective value of the full fractional program at a point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.ratios.iter().map(|r| r.value(x)).sum::<f64>() + dot(&self.linear_obj, x)
    }

    pub fn satisfies_constraints(&self, x: &[f64], slack: f64) -> bool {
        self.cons_rows
            .iter()
            .zip(&self.cons_rhs)
            .all(|(row, &rhs)| dot(row, x) <= rhs + slack)
    }

    /// Single-ratio extraction with all variables relaxed to their boxes.
    pub fn single_ratio_relaxed(&self, i: usize) -> FractionalProgram {
        FractionalProgram {
            n_vars: self.n_vars,
            ratios: vec![self.ratios[i].clone()],
            linear_obj: vec![0.0; self.n_vars],
            cons_rows: self.cons_rows.clone(),
            cons_rhs: self.cons_rhs.clone(),
            var_kind: self
                .var_kind
                .iter()
                .map(|k| {
                    let (lo, hi) = k.bounds();
                    VarKind::Continuous { lo, hi }
                })
                .collect(),
            sense: self.sense,
        }
    }

    /// LP over the continuous relaxation, variables only, no objective.
    fn relaxation_model(&self) -> LinearModel {
        let mut model = LinearModel::new(Sense::Maximize);
        let (lo, hi) = self.var_bounds();
        for j in 0..self.n_vars {
            model.add_var(&format!("x{}", j + 1), lo[j], hi[j], 0.0);
        }
        for (row, &rhs) in self.cons_rows.iter().zip(&self.cons_rhs) {
            model.add_row(Row::new(sparse(row), Relation::Le, rhs));
        }
        model
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n_vars: usize,
    pub n_ratios: usize,
    /// Minimum of each denominator over the continuous relaxation.
    pub denom_min: Vec<f64>,
}

/// Bounds used by the McCormick-style builders. `rho` is the reciprocal
/// denominator, `ratio` the ratio value `z_i`, `denom` the denominator.
#[derive(Debug, Clone)]
pub struct VariableBounds {
    pub x_lo: Vec<f64>,
    pub x_hi: Vec<f64>,
    pub rho_lo: Vec<f64>,
    pub rho_hi: Vec<f64>,
    pub ratio_lo: Vec<f64>,
    pub ratio_hi: Vec<f64>,
    pub denom_lo: Vec<f64>,
    pub denom_hi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum ModelError {
    DimensionMismatch(String),
    /// Ratio index and the minimizing point of its denominator.
    NonPositiveDenominator(usize, Vec<f64>),
    UnboundedPolyhedron(String),
    EmptyFeasibleSet,
    Lp(crate::lp::LpError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            ModelError::NonPositiveDenominator(i, x) => {
                write!(f, "denominator {i} non-positive at witness {x:?}")
            }
            ModelError::UnboundedPolyhedron(what) => write!(f, "unbounded bound LP: {what}"),
            ModelError::EmptyFeasibleSet => write!(f, "constraint system is infeasible"),
            ModelError::Lp(e) => write!(f, "lp error: {e}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<crate::lp::LpError> for ModelError {
    fn from(e: crate::lp::LpError) -> Self {
        ModelError::Lp(e)
    }
}

/// Checks dimensions and certifies that every denominator is strictly
/// positive (margin [`POSITIVITY_MARGIN`]) over the continuous relaxation.
pub fn validate_program(fp: &FractionalProgram) -> Result<ValidationReport, ModelError> {
    check_dims(fp)?;
    let model = fp.relaxation_model();
    let mut spx = Simplex::new(&model)?;
    let mut denom_min = Vec::with_capacity(fp.m());
    let mut obj = vec![0.0; fp.n_vars];
    for (i, ratio) in fp.ratios.iter().enumerate() {
        // minimize a_i0 + a_i.x  ==  maximize -(a_i.x)
        for j in 0..fp.n_vars {
            obj[j] = -ratio.a[j];
        }
        spx.set_objective(&obj, 0.0);
        let sol = spx.reoptimize()?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(ModelError::EmptyFeasibleSet),
            LpStatus::Unbounded => {
                return Err(ModelError::UnboundedPolyhedron(format!(
                    "denominator {i} unbounded below"
                )))
            }
            LpStatus::IterationLimit => {
                return Err(ModelError::UnboundedPolyhedron(format!(
                    "bound LP for denominator {i} hit the iteration limit"
                )))
            }
        }
        let dmin = ratio.a0 - sol.objective;
        if dmin < POSITIVITY_MARGIN {
            return Err(ModelError::NonPositiveDenominator(i, sol.primal));
        }
        denom_min.push(dmin);
    }
    Ok(ValidationReport {
        n_vars: fp.n_vars,
        n_ratios: fp.m(),
        denom_min,
    })
}

fn check_dims(fp: &FractionalProgram) -> Result<(), ModelError> {
    let n = fp.n_vars;
    if fp.linear_obj.len() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "linear_obj has {} entries, expected {n}",
            fp.linear_obj.len()
        )));
    }
    if fp.var_kind.len() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "var_kind has {} entries, expected {n}",
            fp.var_kind.len()
        )));
    }
    for (i, r) in fp.ratios.iter().enumerate() {
        if r.a.len() != n || r.b.len() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "ratio {i}: a has {}, b has {}, expected {n}",
                r.a.len(),
                r.b.len()
            )));
        }
    }
    if fp.cons_rows.len() != fp.cons_rhs.len() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} constraint rows vs {} rhs entries",
            fp.cons_rows.len(),
            fp.cons_rhs.len()
        )));
    }
    for (i, row) in fp.cons_rows.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "constraint row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    for (j, k) in fp.var_kind.iter().enumerate() {
        let (lo, hi) = k.bounds();
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(ModelError::DimensionMismatch(format!(
                "variable {j} has unusable bounds [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Populates every bound field: `x` bounds and denominator bounds from LPs
/// over the relaxation, `rho` bounds as the swapped reciprocals, and ratio
/// bounds `z_i` by Charnes-Cooper in both directions.
pub fn compute_bounds(fp: &FractionalProgram) -> Result<VariableBounds, ModelError> {
    check_dims(fp)?;
    let model = fp.relaxation_model();
    let mut spx = Simplex::new(&model)?;
    let mut obj = vec![0.0; fp.n_vars];
    let optimize = |spx: &mut Simplex, coeffs: &[f64], what: &str| -> Result<f64, ModelError> {
        spx.set_objective(coeffs, 0.0);
        let sol = spx.reoptimize()?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.objective),
            LpStatus::Infeasible => Err(ModelError::EmptyFeasibleSet),
            _ => Err(ModelError::UnboundedPolyhedron(what.to_string())),
        }
    };

    let mut x_lo = Vec::with_capacity(fp.n_vars);
    let mut x_hi = Vec::with_capacity(fp.n_vars);
    for j in 0..fp.n_vars {
        obj[j] = 1.0;
        x_hi.push(optimize(&mut spx, &obj, &format!("x{j} above"))?);
        obj[j] = -1.0;
        x_lo.push(-optimize(&mut spx, &obj, &format!("x{j} below"))?);
        obj[j] = 0.0;
    }

    let m = fp.m();
    let mut denom_lo = Vec::with_capacity(m);
    let mut denom_hi = Vec::with_capacity(m);
    for (i, ratio) in fp.ratios.iter().enumerate() {
        for j in 0..fp.n_vars {
            obj[j] = ratio.a[j];
        }
        denom_hi.push(ratio.a0 + optimize(&mut spx, &obj, &format!("denominator {i} above"))?);
        for j in 0..fp.n_vars {
            obj[j] = -ratio.a[j];
        }
        let dmin = ratio.a0 - optimize(&mut spx, &obj, &format!("denominator {i} below"))?;
        if dmin < POSITIVITY_MARGIN {
            return Err(ModelError::NonPositiveDenominator(i, Vec::new()));
        }
        denom_lo.push(dmin);
        obj.iter_mut().for_each(|c| *c = 0.0);
    }

    let rho_lo: Vec<f64> = denom_hi.iter().map(|d| 1.0 / d).collect();
    let rho_hi: Vec<f64> = denom_lo.iter().map(|d| 1.0 / d).collect();

    let mut ratio_lo = Vec::with_capacity(m);
    let mut ratio_hi = Vec::with_capacity(m);
    for i in 0..m {
        let single = fp.single_ratio_relaxed(i);
        for (sense, out) in [
            (Sense::Minimize, &mut ratio_lo),
            (Sense::Maximize, &mut ratio_hi),
        ] {
            let cc = transform::charnes_cooper(&single, sense)
                .map_err(|e| ModelError::DimensionMismatch(e.to_string()))?;
            let sol = cc.model.solve()?;
            if sol.status != LpStatus::Optimal {
                return Err(ModelError::UnboundedPolyhedron(format!(
                    "ratio {i} bound LP status {:?}",
                    sol.status
                )));
            }
            out.push(sol.objective);
        }
    }

    Ok(VariableBounds {
        x_lo,
        x_hi,
        rho_lo,
        rho_hi,
        ratio_lo,
        ratio_hi,
        denom_lo,
        denom_hi,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub(crate) fn sparse(row: &[f64]) -> Vec<(usize, f64)> {
    row.iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0.0)
        .map(|(j, &v)| (j, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_fp(a0: f64, a: Vec<f64>, b0: f64, b: Vec<f64>) -> FractionalProgram {
        let n = a.len();
        FractionalProgram {
            n_vars: n,
            ratios: vec![Ratio { a0, a, b0, b }],
            linear_obj: vec![0.0; n],
            cons_rows: Vec::new(),
            cons_rhs: Vec::new(),
            var_kind: vec![VarKind::Binary; n],
            sense: Sense::Maximize,
        }
    }

    #[test]
    fn positive_denominator_certified() {
        // a_10 = 1, a_1 = (2, 4) over the unit box: minimum denominator 1
        let fp = box_fp(1.0, vec![2.0, 4.0], 0.0, vec![1.0, 1.0]);
        let report = validate_program(&fp).unwrap();
        assert!((report.denom_min[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identically_zero_denominator_rejected() {
        let fp = box_fp(0.0, vec![0.0, 0.0], 0.0, vec![1.0, 1.0]);
        match validate_program(&fp) {
            Err(ModelError::NonPositiveDenominator(0, _)) => {}
            other => panic!("expected NonPositiveDenominator, got {other:?}"),
        }
    }

    #[test]
    fn negative_denominator_witness() {
        // 1 - 2x over [0,1]: minimized at x = 1 where it is -1
        let fp = box_fp(1.0, vec![-2.0], 0.0, vec![1.0]);
        match validate_program(&fp) {
            Err(ModelError::NonPositiveDenominator(0, witness)) => {
                assert!((witness[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("expected NonPositiveDenominator, got {other:?}"),
        }
    }

    #[test]
    fn unconstrained_binary_rho_bounds() {
        let fp = box_fp(1.0, vec![2.0, 4.0], 0.0, vec![1.0, 1.0]);
        let b = compute_bounds(&fp).unwrap();
        assert!((b.rho_lo[0] - 1.0 / 7.0).abs() < 1e-9);
        assert!((b.rho_hi[0] - 1.0).abs() < 1e-9);
        assert!((b.denom_lo[0] - 1.0).abs() < 1e-9);
        assert!((b.denom_hi[0] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn constant_denominator_collapses_rho() {
        let fp = box_fp(2.5, vec![0.0, 0.0], 0.0, vec![1.0, 1.0]);
        let b = compute_bounds(&fp).unwrap();
        assert!((b.rho_lo[0] - 0.4).abs() < 1e-12);
        assert!((b.rho_hi[0] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn box_denominator_interval() {
        let fp = box_fp(1.0, vec![1.0, 1.0], 0.0, vec![1.0, 0.0]);
        let b = compute_bounds(&fp).unwrap();
        assert!((b.denom_lo[0] - 1.0).abs() < 1e-9);
        assert!((b.denom_hi[0] - 3.0).abs() < 1e-9);
        assert!((b.rho_lo[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!((b.rho_hi[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_detected() {
        let mut fp = box_fp(1.0, vec![1.0, 1.0], 0.0, vec![1.0, 1.0]);
        fp.linear_obj.pop();
        assert!(matches!(
            validate_program(&fp),
            Err(ModelError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn ratio_bounds_on_simple_ratio() {
        // (1 + x1) / (1 + x2) over [0,1]^2 ranges over [1/2, 2]
        let fp = FractionalProgram {
            n_vars: 2,
            ratios: vec![Ratio {
                a0: 1.0,
                a: vec![0.0, 1.0],
                b0: 1.0,
                b: vec![1.0, 0.0],
            }],
            linear_obj: vec![0.0; 2],
            cons_rows: Vec::new(),
            cons_rhs: Vec::new(),
            var_kind: vec![
                VarKind::Continuous { lo: 0.0, hi: 1.0 },
                VarKind::Continuous { lo: 0.0, hi: 1.0 },
            ],
            sense: Sense::Maximize,
        };
        let b = compute_bounds(&fp).unwrap();
        assert!((b.ratio_lo[0] - 0.5).abs() < 1e-7);
        assert!((b.ratio_hi[0] - 2.0).abs() < 1e-7);
    }
}
