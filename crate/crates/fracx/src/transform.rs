//! Projective machinery: the scale-swap map on `R++ x R^n`, the hull
//! correspondence it induces, row homogenization, and the Charnes-Cooper
//! reformulation of single-ratio fractional programs.

use crate::lp::{LinearModel, LpSolution, LpStatus, Relation, Row, Sense};
use crate::model::{sparse, FractionalProgram, ModelError, POSITIVITY_MARGIN};
use std::fmt;

#[derive(Debug, Clone)]
pub enum TransformError {
    /// First coordinate not strictly positive.
    DomainError(f64),
    NotSingleRatio(usize),
    NonPositiveDenominator,
    Lp(crate::lp::LpError),
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::DomainError(v) => {
                write!(f, "first coordinate must be positive, got {v}")
            }
            TransformError::NotSingleRatio(m) => {
                write!(f, "expected a single-ratio program, got {m} ratios")
            }
            TransformError::NonPositiveDenominator => {
                write!(f, "denominator not positive over the feasible region")
            }
            TransformError::Lp(e) => write!(f, "lp error: {e}"),
        }
    }
}

impl std::error::Error for TransformError {}

impl From<crate::lp::LpError> for TransformError {
    fn from(e: crate::lp::LpError) -> Self {
        TransformError::Lp(e)
    }
}

/// `(rho, x) -> (1/rho, x/rho)`; an involution on `R++ x R^n`.
pub fn phi(point: &[f64]) -> Result<Vec<f64>, TransformError> {
    let rho = point[0];
    if rho <= 0.0 {
        return Err(TransformError::DomainError(rho));
    }
    let mut out = Vec::with_capacity(point.len());
    out.push(1.0 / rho);
    out.extend(point[1..].iter().map(|&v| v / rho));
    Ok(out)
}

/// Finite subset of `R++ x R^n`; every point's first coordinate is positive.
#[derive(Debug, Clone)]
pub struct LabeledPointSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl LabeledPointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, TransformError> {
        assert!(!points.is_empty(), "point set must be nonempty");
        let dim = points[0].len();
        assert!(points.iter().all(|p| p.len() == dim));
        if let Some(p) = points.iter().find(|p| p[0] <= 0.0) {
            return Err(TransformError::DomainError(p[0]));
        }
        Ok(LabeledPointSet { points, dim })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| phi(p).expect("set invariant guarantees positive first coordinate"))
            .collect()
    }
}

/// Convex-multiplier membership test: is `query` a convex combination of
/// `points`? Decided by LP feasibility at tolerance 1e-7.
pub fn in_convex_hull(points: &[Vec<f64>], query: &[f64]) -> Result<bool, TransformError> {
    let dim = query.len();
    let mut model = LinearModel::new(Sense::Maximize);
    for k in 0..points.len() {
        model.add_var(&format!("lambda{k}"), 0.0, 1.0, 0.0);
    }
    for d in 0..dim {
        let coeffs: Vec<(usize, f64)> = points.iter().enumerate().map(|(k, p)| (k, p[d])).collect();
        model.add_row(Row::new(coeffs, Relation::Eq, query[d]));
    }
    model.add_row(Row::new(
        (0..points.len()).map(|k| (k, 1.0)).collect(),
        Relation::Eq,
        1.0,
    ));
    let sol = model.solve()?;
    Ok(sol.status == LpStatus::Optimal)
}

/// Both verdicts of the hull correspondence for a query `(rho, x)`:
/// membership in `conv(S)` directly, and membership of `(1, x)` in
/// `rho * conv(image(S))`. The two must agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HullVerdict {
    pub in_conv_s: bool,
    pub in_scaled_image_hull: bool,
}

pub fn hull_correspondence(
    set: &LabeledPointSet,
    query: &[f64],
) -> Result<HullVerdict, TransformError> {
    let rho = query[0];
    if rho <= 0.0 {
        return Err(TransformError::DomainError(rho));
    }
    let in_conv_s = in_convex_hull(set.points(), query)?;
    let scaled: Vec<Vec<f64>> = set
        .image()
        .into_iter()
        .map(|p| p.iter().map(|&v| rho * v).collect())
        .collect();
    let mut one_x = query.to_vec();
    one_x[0] = 1.0;
    let in_scaled_image_hull = in_convex_hull(&scaled, &one_x)?;
    Ok(HullVerdict {
        in_conv_s,
        in_scaled_image_hull,
    })
}

/// Homogenizes linear rows valid for a set: `a.f <= beta` becomes
/// `a.g - beta * scale <= 0` (valid for every nonnegative multiple of the
/// set, with `scale` as the multiplier column).
pub fn homogenize_rows(rows: &[Row], scale_col: usize) -> Vec<Row> {
    rows.iter()
        .map(|row| {
            let mut coeffs = row.coeffs.clone();
            if row.rhs != 0.0 {
                coeffs.push((scale_col, -row.rhs));
            }
            Row::new(coeffs, row.rel, 0.0)
        })
        .collect()
}

/// Charnes-Cooper model of a single-ratio program with recovery indices.
#[derive(Debug, Clone)]
pub struct CcModel {
    pub model: LinearModel,
    pub rho: usize,
    pub y: Vec<usize>,
}

impl CcModel {
    /// Recovers the original variables as `x = y / rho`.
    pub fn recover_x(&self, sol: &LpSolution) -> Result<Vec<f64>, TransformError> {
        let rho = sol.primal[self.rho];
        if rho <= 0.0 {
            return Err(TransformError::DomainError(rho));
        }
        Ok(self.y.iter().map(|&j| sol.primal[j] / rho).collect())
    }
}

/// Classic single-ratio reformulation: optimize `b0 rho + b.y` subject to the
/// homogenized feasible rows and the normalization `a0 rho + a.y = 1`.
pub fn charnes_cooper(
    fp: &FractionalProgram,
    sense: Sense,
) -> Result<CcModel, TransformError> {
    if fp.m() != 1 {
        return Err(TransformError::NotSingleRatio(fp.m()));
    }
    if fp.var_kind.iter().any(|k| k.is_binary()) {
        return Err(TransformError::NotSingleRatio(fp.m()));
    }
    match crate::model::validate_program(fp) {
        Ok(_) => {}
        Err(ModelError::NonPositiveDenominator(_, _)) => {
            return Err(TransformError::NonPositiveDenominator)
        }
        Err(ModelError::Lp(e)) => return Err(TransformError::Lp(e)),
        Err(_) => return Err(TransformError::NonPositiveDenominator),
    }
    let ratio = &fp.ratios[0];
    let n = fp.n_vars;
    let mut model = LinearModel::new(sense);
    // rho > 0 is implied by the normalization and positivity margin
    let rho = model.add_var("rho", 0.0, 1.0 / POSITIVITY_MARGIN, ratio.b0);
    let (lo, _) = fp.var_bounds();
    let y: Vec<usize> = (0..n)
        .map(|j| {
            let ylo = if lo[j] >= 0.0 { 0.0 } else { f64::NEG_INFINITY };
            model.add_var(&format!("y{}", j + 1), ylo, f64::INFINITY, ratio.b[j])
        })
        .collect();
    // homogenized feasible rows: Cbar y <= dbar rho
    let (rows, rhs) = fp.relaxed_rows();
    let plain: Vec<Row> = rows
        .iter()
        .zip(&rhs)
        .map(|(row, &r)| {
            Row::new(
                sparse(row).into_iter().map(|(j, v)| (y[j], v)).collect(),
                Relation::Le,
                r,
            )
        })
        .collect();
    model.add_rows(homogenize_rows(&plain, rho));
    // normalization a0 rho + a.y = 1
    let mut norm: Vec<(usize, f64)> = vec![(rho, ratio.a0)];
    for j in 0..n {
        if ratio.a[j] != 0.0 {
            norm.push((y[j], ratio.a[j]));
        }
    }
    model.add_row(Row::new(norm, Relation::Eq, 1.0));
    Ok(CcModel { model, rho, y })
}
