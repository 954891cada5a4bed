//! Relaxation builders connected to the boolean quadric polytope: the
//! McCormick lifted extended formulation, its single-term strengthening, the
//! homogenized first-level RLT relaxation, the shared-monomial hierarchy that
//! reaches the simultaneous hull, the conic-strengthened variant, and the
//! bilinear fractional relaxation over a support graph.
//!
//! All builders lift with `rho^i = 1/(a_i0 + a_i.x)`, `y^i = rho^i x`, and
//! keep the normalization `a_i0 rho^i + a_i.y^i = 1`; products are linearized
//! against `W^i` (pairs) or `w^i_S` (subsets), with `W^i_jj` aliasing `y^i_j`
//! for binary coordinates.

mod cuts;

pub use cuts::{
    conic_separator, oddcycle_separate, triangle_cuts, ConicFamilies, ConicSeparator,
    OddCycleSeparator, PoolSeparator, TriangleSeparator,
};

use crate::lp::{CutGenerator, LinearModel, Relation, Row, Sense};
use crate::model::{FractionalProgram, VariableBounds};
use std::fmt;

#[derive(Debug, Clone)]
pub enum BqpError {
    /// Bounds vectors do not match the program dimensions.
    MissingBounds,
    /// The builder requires every variable to be binary.
    BinaryOnly,
    SizeGuard { cols: usize, cap: usize },
    NonPositiveDenominator,
    /// A McCormick slack was below -1e-7 during odd-cycle separation.
    NegativeWeight(f64),
    Lp(crate::lp::LpError),
}

impl fmt::Display for BqpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BqpError::MissingBounds => write!(f, "bounds do not match the program"),
            BqpError::BinaryOnly => write!(f, "builder requires all-binary variables"),
            BqpError::SizeGuard { cols, cap } => {
                write!(f, "lifted column count {cols} exceeds the cap {cap}")
            }
            BqpError::NonPositiveDenominator => write!(f, "denominator not positive"),
            BqpError::NegativeWeight(v) => {
                write!(f, "McCormick slack {v} below tolerance; enforce McCormick first")
            }
            BqpError::Lp(e) => write!(f, "lp error: {e}"),
        }
    }
}

impl std::error::Error for BqpError {}

impl From<crate::lp::LpError> for BqpError {
    fn from(e: crate::lp::LpError) -> Self {
        BqpError::Lp(e)
    }
}

/// Column registry of the pair-lifted builders. `w` is a full symmetric
/// index matrix per ratio (flattened n*n); diagonal entries alias `y` for
/// binary coordinates. Empty when the builder lifts no pair terms.
#[derive(Debug, Clone)]
pub struct LiftedVars {
    pub n: usize,
    pub x: Vec<usize>,
    pub rho: Vec<usize>,
    pub y: Vec<Vec<usize>>,
    pub w: Vec<Vec<usize>>,
}

impl LiftedVars {
    pub fn w_col(&self, i: usize, j: usize, k: usize) -> usize {
        self.w[i][j * self.n + k]
    }

    pub fn has_w(&self) -> bool {
        !self.w.is_empty()
    }
}

fn check_bounds(fp: &FractionalProgram, bounds: &VariableBounds) -> Result<(), BqpError> {
    let ok = bounds.x_lo.len() == fp.n_vars
        && bounds.x_hi.len() == fp.n_vars
        && bounds.rho_lo.len() == fp.m()
        && bounds.rho_hi.len() == fp.m()
        && bounds.denom_lo.len() == fp.m();
    if !ok {
        return Err(BqpError::MissingBounds);
    }
    if bounds.denom_lo.iter().any(|&d| d <= 0.0) {
        return Err(BqpError::NonPositiveDenominator);
    }
    Ok(())
}

/// Shared scaffolding: x columns (with binary marks and the linear objective),
/// per-ratio rho and y columns with McCormick-implied bounds, normalization
/// rows, and the original constraint rows on x.
fn base_model(fp: &FractionalProgram, bounds: &VariableBounds) -> (LinearModel, LiftedVars) {
    let n = fp.n_vars;
    let m = fp.m();
    let mut model = LinearModel::new(fp.sense);
    let x: Vec<usize> = (0..n)
        .map(|j| {
            let col = model.add_var(
                &format!("x{}", j + 1),
                bounds.x_lo[j],
                bounds.x_hi[j],
                fp.linear_obj[j],
            );
            if fp.var_kind[j].is_binary() {
                model.mark_binary(col);
            }
            col
        })
        .collect();
    let mut rho = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    for (i, ratio) in fp.ratios.iter().enumerate() {
        let r = model.add_var(
            &format!("rho{}", i + 1),
            bounds.rho_lo[i],
            bounds.rho_hi[i],
            ratio.b0,
        );
        rho.push(r);
        let yi: Vec<usize> = (0..n)
            .map(|j| {
                let corners = [
                    bounds.rho_lo[i] * bounds.x_lo[j],
                    bounds.rho_lo[i] * bounds.x_hi[j],
                    bounds.rho_hi[i] * bounds.x_lo[j],
                    bounds.rho_hi[i] * bounds.x_hi[j],
                ];
                let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                model.add_var(&format!("y{}_{}", i + 1, j + 1), lo, hi, ratio.b[j])
            })
            .collect();
        // normalization a_i0 rho + a_i.y = 1
        let mut norm = vec![(r, ratio.a0)];
        for j in 0..n {
            if ratio.a[j] != 0.0 {
                norm.push((yi[j], ratio.a[j]));
            }
        }
        model.add_row(Row::new(norm, Relation::Eq, 1.0));
        y.push(yi);
    }
    for (row, &rhs) in fp.cons_rows.iter().zip(&fp.cons_rhs) {
        let coeffs: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(j, &v)| (x[j], v))
            .collect();
        model.add_row(Row::new(coeffs, Relation::Le, rhs));
    }
    let vars = LiftedVars {
        n,
        x,
        rho,
        y,
        w: Vec::new(),
    };
    (model, vars)
}

/// The four McCormick rows relaxing `y = rho * x` for one `(i, j)`.
fn mccormick_rows(
    vars: &LiftedVars,
    bounds: &VariableBounds,
    i: usize,
    j: usize,
) -> Vec<Row> {
    let (xl, xu) = (bounds.x_lo[j], bounds.x_hi[j]);
    let (rl, ru) = (bounds.rho_lo[i], bounds.rho_hi[i]);
    let (r, yc, xc) = (vars.rho[i], vars.y[i][j], vars.x[j]);
    vec![
        // y <= xu rho + rl x - xu rl
        Row::new(vec![(yc, 1.0), (r, -xu), (xc, -rl)], Relation::Le, -xu * rl),
        // y <= xl rho + ru x - xl ru
        Row::new(vec![(yc, 1.0), (r, -xl), (xc, -ru)], Relation::Le, -xl * ru),
        // y >= xu rho + ru x - xu ru
        Row::new(vec![(yc, 1.0), (r, -xu), (xc, -ru)], Relation::Ge, -xu * ru),
        // y >= xl rho + rl x - xl rl
        Row::new(vec![(yc, 1.0), (r, -xl), (xc, -rl)], Relation::Ge, -xl * rl),
    ]
}

fn lef_rows(fp: &FractionalProgram, bounds: &VariableBounds, vars: &LiftedVars) -> Vec<Row> {
    let mut rows = Vec::new();
    for i in 0..fp.m() {
        for j in 0..fp.n_vars {
            rows.extend(mccormick_rows(vars, bounds, i, j));
        }
    }
    rows
}

/// McCormick lifted extended formulation: the four envelope rows per
/// `(ratio, variable)` over the LP-derived `rho` and `x` bounds, plus
/// normalization and the feasible rows.
pub fn build_lef(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars), BqpError> {
    check_bounds(fp, bounds)?;
    let (mut model, vars) = base_model(fp, bounds);
    model.add_rows(lef_rows(fp, bounds, vars_ref(&vars)));
    Ok((model, vars))
}

fn vars_ref(v: &LiftedVars) -> &LiftedVars {
    v
}

/// Adds the pair columns `W^i` for every ratio: upper-triangle columns with
/// the diagonal aliased to `y^i` (all variables binary).
fn add_pair_columns(model: &mut LinearModel, vars: &mut LiftedVars, rho_hi: &[f64]) {
    let n = vars.n;
    for i in 0..vars.rho.len() {
        let mut w = vec![0usize; n * n];
        for j in 0..n {
            w[j * n + j] = vars.y[i][j];
            for k in j + 1..n {
                let col = model.add_var(
                    &format!("W{}_{}_{}", i + 1, j + 1, k + 1),
                    0.0,
                    rho_hi[i],
                    0.0,
                );
                w[j * n + k] = col;
                w[k * n + j] = col;
            }
        }
        vars.w.push(w);
    }
}

/// Rows specific to the single-term strengthening: the homogenized McCormick
/// box on every pair `W^i_jk`, `y <= rho`, and the linking rows
/// `x_j = a_i0 y^i_j + sum_k a_ik W^i_jk`.
fn one_term_rows(fp: &FractionalProgram, vars: &LiftedVars) -> (Vec<Row>, Vec<Row>) {
    let n = fp.n_vars;
    let mut envelope = Vec::new();
    let mut structural = Vec::new();
    for (i, ratio) in fp.ratios.iter().enumerate() {
        for j in 0..n {
            structural.push(Row::new(
                vec![(vars.y[i][j], 1.0), (vars.rho[i], -1.0)],
                Relation::Le,
                0.0,
            ));
            // x_j = (a_i0 + a_ij) y_j + sum_{k != j} a_ik W_jk
            let mut link = vec![(vars.x[j], 1.0), (vars.y[i][j], -(ratio.a0 + ratio.a[j]))];
            for k in 0..n {
                if k != j && ratio.a[k] != 0.0 {
                    link.push((vars.w_col(i, j, k), -ratio.a[k]));
                }
            }
            structural.push(Row::new(link, Relation::Eq, 0.0));
        }
        for j in 0..n {
            for k in j + 1..n {
                let w = vars.w_col(i, j, k);
                envelope.push(Row::new(
                    vec![(w, 1.0), (vars.y[i][j], -1.0)],
                    Relation::Le,
                    0.0,
                ));
                envelope.push(Row::new(
                    vec![(w, 1.0), (vars.y[i][k], -1.0)],
                    Relation::Le,
                    0.0,
                ));
                envelope.push(Row::new(
                    vec![
                        (w, 1.0),
                        (vars.y[i][j], -1.0),
                        (vars.y[i][k], -1.0),
                        (vars.rho[i], 1.0),
                    ],
                    Relation::Ge,
                    0.0,
                ));
            }
        }
    }
    (envelope, structural)
}

/// Single-term relaxation: pair-lifted McCormick per ratio with linking rows,
/// including the plain envelope rows (they are kept so that the pair rows can
/// be relaxed lazily without losing validity).
pub fn build_1term(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars), BqpError> {
    let (mut model, vars, envelope) = build_1term_split(fp, bounds)?;
    model.add_rows(envelope);
    Ok((model, vars))
}

/// Same construction with the pair-envelope rows returned separately for lazy
/// row generation at benchmark sizes.
pub fn build_1term_split(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars, Vec<Row>), BqpError> {
    check_bounds(fp, bounds)?;
    if !fp.is_all_binary() {
        return Err(BqpError::BinaryOnly);
    }
    let (mut model, mut vars) = base_model(fp, bounds);
    model.add_rows(lef_rows(fp, bounds, &vars));
    add_pair_columns(&mut model, &mut vars, &bounds.rho_hi);
    let (envelope, structural) = one_term_rows(fp, &vars);
    model.add_rows(structural);
    Ok((model, vars, envelope))
}

/// Homogenized first-level RLT relaxation: one row per unordered pair of
/// rows of the relaxed system (products of slacks), linking, homogenized
/// system rows on `y`, and diagonal aliasing for binary coordinates.
pub fn build_rqp(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars), BqpError> {
    let (mut model, vars, pairs) = build_rqp_split(fp, bounds)?;
    model.add_rows(pairs);
    Ok((model, vars))
}

/// RQP with the pair-product rows returned separately (the base keeps the
/// model bounded; the pair rows are exact lazily).
pub fn build_rqp_split(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars, Vec<Row>), BqpError> {
    check_bounds(fp, bounds)?;
    let n = fp.n_vars;
    let (mut model, mut vars) = base_model(fp, bounds);
    // pair columns; non-binary diagonals get their own column
    for i in 0..fp.m() {
        let mut w = vec![usize::MAX; n * n];
        for j in 0..n {
            if fp.var_kind[j].is_binary() {
                w[j * n + j] = vars.y[i][j];
            } else {
                w[j * n + j] = model.add_var(
                    &format!("W{}_{}_{}", i + 1, j + 1, j + 1),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    0.0,
                );
            }
            for k in j + 1..n {
                let col = model.add_var(
                    &format!("W{}_{}_{}", i + 1, j + 1, k + 1),
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    0.0,
                );
                w[j * n + k] = col;
                w[k * n + j] = col;
            }
        }
        vars.w.push(w);
    }
    let (rows, rhs) = fp.relaxed_rows();
    let mut pair_rows = Vec::new();
    for (i, ratio) in fp.ratios.iter().enumerate() {
        // linking x_j = a_i0 y_j + sum_k a_ik W_jk (diagonal included)
        for j in 0..n {
            let mut link = vec![(vars.x[j], 1.0)];
            let mut acc: Vec<f64> = vec![0.0; model.num_vars()];
            acc[vars.y[i][j]] -= ratio.a0;
            for k in 0..n {
                if ratio.a[k] != 0.0 {
                    acc[vars.w_col(i, j, k)] -= ratio.a[k];
                }
            }
            for (col, &v) in acc.iter().enumerate() {
                if v != 0.0 {
                    link.push((col, v));
                }
            }
            model.add_row(Row::new(link, Relation::Eq, 0.0));
        }
        // homogenized system rows: Cbar y <= rho dbar
        for (row, &r) in rows.iter().zip(&rhs) {
            let mut coeffs: Vec<(usize, f64)> = row
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(j, &v)| (vars.y[i][j], v))
                .collect();
            coeffs.push((vars.rho[i], -r));
            model.add_row(Row::new(coeffs, Relation::Le, 0.0));
        }
        // pair products: (dbar_r - cbar_r.x)(dbar_s - cbar_s.x) >= 0
        for r in 0..rows.len() {
            for s in r..rows.len() {
                let mut acc: Vec<f64> = vec![0.0; model.num_vars()];
                for (j, &vr) in rows[r].iter().enumerate() {
                    if vr == 0.0 {
                        continue;
                    }
                    for (k, &vs) in rows[s].iter().enumerate() {
                        if vs != 0.0 {
                            acc[vars.w_col(i, j, k)] += vr * vs;
                        }
                    }
                }
                for (j, &vr) in rows[r].iter().enumerate() {
                    if vr != 0.0 {
                        acc[vars.y[i][j]] -= rhs[s] * vr;
                    }
                }
                for (k, &vs) in rows[s].iter().enumerate() {
                    if vs != 0.0 {
                        acc[vars.y[i][k]] -= rhs[r] * vs;
                    }
                }
                acc[vars.rho[i]] += rhs[r] * rhs[s];
                let coeffs: Vec<(usize, f64)> = acc
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0.0)
                    .map(|(c, &v)| (c, v))
                    .collect();
                pair_rows.push(Row::new(coeffs, Relation::Ge, 0.0));
            }
        }
    }
    Ok((model, vars, pair_rows))
}

/// Single-term model plus the reciprocal-denominator conic separator wired
/// for the cutting loop; solving the pair yields the conic-strengthened
/// continuous bound.
pub fn build_1term_conic(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
) -> Result<(LinearModel, LiftedVars, Vec<Box<dyn CutGenerator>>), BqpError> {
    let (model, vars) = build_1term(fp, bounds)?;
    let sep = conic_separator(fp, bounds, &vars, ConicFamilies::ReciprocalOnly);
    Ok((model, vars, vec![Box::new(sep)]))
}

/// Exact lifting of a binary point into the pair-lifted variable space:
/// `rho = 1/den`, `y = rho x`, `W_jk = rho x_j x_k`.
pub fn lift_binary_point(
    fp: &FractionalProgram,
    vars: &LiftedVars,
    num_cols: usize,
    x: &[f64],
) -> Vec<f64> {
    let mut point = vec![0.0; num_cols];
    for j in 0..fp.n_vars {
        point[vars.x[j]] = x[j];
    }
    for (i, ratio) in fp.ratios.iter().enumerate() {
        let rho = 1.0 / ratio.denominator(x);
        point[vars.rho[i]] = rho;
        for j in 0..fp.n_vars {
            point[vars.y[i][j]] = rho * x[j];
        }
        if vars.has_w() {
            for j in 0..fp.n_vars {
                for k in j..fp.n_vars {
                    point[vars.w_col(i, j, k)] = rho * x[j] * x[k];
                }
            }
        }
    }
    point
}

// ---------------------------------------------------------------------------
// shared-monomial hierarchy
// ---------------------------------------------------------------------------

/// Column registry of the hierarchy model: shared monomials `u_S` (singletons
/// are the `x` columns) and per-ratio lifted monomials `w^i_S` (the empty set
/// is `rho^i`, singletons are `y^i`).
#[derive(Debug, Clone)]
pub struct KtermVars {
    pub n: usize,
    pub k: usize,
    /// mask -> column for shared monomials (masks with 1..=k bits)
    pub u: Vec<i64>,
    /// per ratio: mask -> column for lifted monomials (0..=min(k+1,n) bits)
    pub w: Vec<Vec<i64>>,
}

impl KtermVars {
    pub fn u_col(&self, mask: u32) -> usize {
        let c = self.u[mask as usize];
        debug_assert!(c >= 0, "u column for mask {mask:#b} not lifted");
        c as usize
    }

    pub fn w_col(&self, i: usize, mask: u32) -> usize {
        let c = self.w[i][mask as usize];
        debug_assert!(c >= 0, "w column for mask {mask:#b} not lifted");
        c as usize
    }

    pub fn x_col(&self, j: usize) -> usize {
        self.u_col(1 << j)
    }

    pub fn rho_col(&self, i: usize) -> usize {
        self.w_col(i, 0)
    }
}

pub const KTERM_COLUMN_CAP: usize = 20_000;

pub fn build_kterm(
    fp: &FractionalProgram,
    k: usize,
) -> Result<(LinearModel, KtermVars), BqpError> {
    let (mut model, vars, rlt) = build_kterm_split(fp, k, KTERM_COLUMN_CAP)?;
    model.add_rows(rlt);
    Ok((model, vars))
}

/// Hierarchy level `k` with the RLT product rows returned separately for lazy
/// generation. Columns: shared `u_S` (|S| <= k), per-ratio `w^i_S`
/// (|S| <= min(k+1, n)); rows in the base: normalization, monomial linking
/// between `u` and each ratio's `w`, `w_S <= rho`, `y <= rho`, and the
/// original constraint rows on x.
pub fn build_kterm_split(
    fp: &FractionalProgram,
    k: usize,
    col_cap: usize,
) -> Result<(LinearModel, KtermVars, Vec<Row>), BqpError> {
    if !fp.is_all_binary() {
        return Err(BqpError::BinaryOnly);
    }
    let n = fp.n_vars;
    assert!(k >= 1 && k <= n, "level must satisfy 1 <= k <= n");
    assert!(n <= 14, "hierarchy guard: n <= 14");
    let m = fp.m();
    let w_deg = (k + 1).min(n);
    let u_count: usize = (1..=k).map(|t| binomial(n, t)).sum();
    let w_count: usize = 1 + (1..=w_deg).map(|t| binomial(n, t)).sum::<usize>();
    let total = u_count + m * w_count;
    if total > col_cap {
        return Err(BqpError::SizeGuard {
            cols: total,
            cap: col_cap,
        });
    }

    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut model = LinearModel::new(fp.sense);
    let mut u = vec![-1i64; 1 << n];
    // singletons first, in index order, so x columns come first
    for j in 0..n {
        let col = model.add_var(&format!("x{}", j + 1), 0.0, 1.0, fp.linear_obj[j]);
        model.mark_binary(col);
        u[1usize << j] = col as i64;
    }
    for mask in 0..=(full as usize) {
        let t = (mask as u32).count_ones() as usize;
        if t >= 2 && t <= k {
            u[mask] = model.add_var(&format!("u_S{}", mask_name(mask as u32)), 0.0, 1.0, 0.0)
                as i64;
        }
    }
    let mut w = Vec::with_capacity(m);
    for (i, ratio) in fp.ratios.iter().enumerate() {
        let mut wi = vec![-1i64; 1 << n];
        wi[0] = model.add_var(&format!("rho{}", i + 1), 0.0, f64::INFINITY, ratio.b0) as i64;
        for j in 0..n {
            wi[1 << j] =
                model.add_var(&format!("y{}_{}", i + 1, j + 1), 0.0, f64::INFINITY, ratio.b[j])
                    as i64;
        }
        for mask in 0..=(full as usize) {
            let t = (mask as u32).count_ones() as usize;
            if t >= 2 && t <= w_deg {
                wi[mask] = model.add_var(
                    &format!("w{}_S{}", i + 1, mask_name(mask as u32)),
                    0.0,
                    f64::INFINITY,
                    0.0,
                ) as i64;
            }
        }
        w.push(wi);
    }
    let vars = KtermVars { n, k, u, w };

    for (i, ratio) in fp.ratios.iter().enumerate() {
        // normalization
        let mut norm = vec![(vars.rho_col(i), ratio.a0)];
        for j in 0..n {
            if ratio.a[j] != 0.0 {
                norm.push((vars.w_col(i, 1 << j), ratio.a[j]));
            }
        }
        model.add_row(Row::new(norm, Relation::Eq, 1.0));
        // linking u_S = (a_i0 + sum_{j in S} a_ij) w_S + sum_{r notin S} a_ir w_{S+r}
        for mask in 1..=(full as usize) {
            let t = (mask as u32).count_ones() as usize;
            if t > k {
                continue;
            }
            let mut coeffs = vec![(vars.u_col(mask as u32), 1.0)];
            let mut diag = ratio.a0;
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    diag += ratio.a[j];
                }
            }
            coeffs.push((vars.w_col(i, mask as u32), -diag));
            for r in 0..n {
                if mask & (1 << r) == 0 && ratio.a[r] != 0.0 {
                    coeffs.push((vars.w_col(i, (mask | (1 << r)) as u32), -ratio.a[r]));
                }
            }
            model.add_row(Row::new(coeffs, Relation::Eq, 0.0));
        }
        // w_S <= rho keeps the base bounded; y <= rho is the singleton case
        for mask in 1..=(full as usize) {
            if vars.w[i][mask] >= 0 {
                model.add_row(Row::new(
                    vec![(vars.w[i][mask] as usize, 1.0), (vars.rho_col(i), -1.0)],
                    Relation::Le,
                    0.0,
                ));
            }
        }
    }
    // plain constraint rows on x
    for (row, &rhs) in fp.cons_rows.iter().zip(&fp.cons_rhs) {
        let coeffs: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(j, &v)| (vars.x_col(j), v))
            .collect();
        model.add_row(Row::new(coeffs, Relation::Le, rhs));
    }

    // homogenized RLT product rows, lexicographic in (union mask, S mask)
    let mut rlt_rows = Vec::new();
    let t_pure = (k + 1).min(n);
    for i in 0..m {
        for union in 0..=(full as usize) {
            if (union as u32).count_ones() as usize != t_pure {
                continue;
            }
            let mut s_mask = union;
            loop {
                // product x_S (1-x)_{union \ S} >= 0, homogenized by rho_i
                let row = product_row(&vars, i, s_mask as u32, (union & !s_mask) as u32, None, 0.0);
                rlt_rows.push(row);
                if s_mask == 0 {
                    break;
                }
                s_mask = (s_mask - 1) & union;
            }
        }
        if !fp.cons_rows.is_empty() {
            let t_con = k.min(n);
            for (crow, &crhs) in fp.cons_rows.iter().zip(&fp.cons_rhs) {
                for union in 0..=(full as usize) {
                    if (union as u32).count_ones() as usize != t_con {
                        continue;
                    }
                    let mut s_mask = union;
                    loop {
                        let row = product_row(
                            &vars,
                            i,
                            s_mask as u32,
                            (union & !s_mask) as u32,
                            Some(crow),
                            crhs,
                        );
                        rlt_rows.push(row);
                        if s_mask == 0 {
                            break;
                        }
                        s_mask = (s_mask - 1) & union;
                    }
                }
            }
        }
    }
    Ok((model, vars, rlt_rows))
}

/// Linearization of `(base) * prod_{j in S} x_j * prod_{j in T} (1 - x_j) >= 0`
/// in the lifted `w^i` coordinates, where `base` is `1` or a constraint slack
/// `rhs - c.x`. Multilinear reduction (`x^2 = x`) happens through the mask
/// union; the constant term is homogenized onto `rho^i`.
fn product_row(
    vars: &KtermVars,
    i: usize,
    s_mask: u32,
    t_mask: u32,
    constraint: Option<&Vec<f64>>,
    rhs: f64,
) -> Row {
    let mut acc: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    // expand prod_{T}(1 - x): sum over subsets V of T of (-1)^|V| x_{S+V}
    let mut v_mask = t_mask;
    loop {
        let sign = if (v_mask.count_ones() % 2) == 0 { 1.0 } else { -1.0 };
        let mono = s_mask | v_mask;
        match constraint {
            None => {
                *acc.entry(mono).or_insert(0.0) += sign;
            }
            Some(c) => {
                *acc.entry(mono).or_insert(0.0) += sign * rhs;
                for (l, &cl) in c.iter().enumerate() {
                    if cl != 0.0 {
                        *acc.entry(mono | (1 << l)).or_insert(0.0) -= sign * cl;
                    }
                }
            }
        }
        if v_mask == 0 {
            break;
        }
        v_mask = (v_mask - 1) & t_mask;
    }
    let coeffs: Vec<(usize, f64)> = acc
        .into_iter()
        .filter(|&(_, v)| v != 0.0)
        .map(|(mask, v)| (vars.w_col(i, mask), v))
        .collect();
    Row::new(coeffs, Relation::Ge, 0.0)
}

/// Exact lifting of a binary point into the hierarchy space.
pub fn lift_kterm_point(
    fp: &FractionalProgram,
    vars: &KtermVars,
    num_cols: usize,
    x: &[f64],
) -> Vec<f64> {
    let mut point = vec![0.0; num_cols];
    let full = (1usize << vars.n) - 1;
    for mask in 1..=full {
        if vars.u[mask] >= 0 {
            let prod: f64 = (0..vars.n)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| x[j])
                .product();
            point[vars.u[mask] as usize] = prod;
        }
    }
    for (i, ratio) in fp.ratios.iter().enumerate() {
        let rho = 1.0 / ratio.denominator(x);
        for mask in 0..=full {
            if vars.w[i][mask] >= 0 {
                let prod: f64 = (0..vars.n)
                    .filter(|j| mask & (1 << j) != 0)
                    .map(|j| x[j])
                    .product();
                point[vars.w[i][mask] as usize] = rho * prod;
            }
        }
    }
    point
}

fn binomial(n: usize, t: usize) -> usize {
    if t > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..t {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn mask_name(mask: u32) -> String {
    let mut parts = Vec::new();
    for j in 0..32 {
        if mask & (1 << j) != 0 {
            parts.push(format!("{}", j + 1));
        }
    }
    parts.join(".")
}

// ---------------------------------------------------------------------------
// bilinear fractional programs over a support graph
// ---------------------------------------------------------------------------

/// Support graph of a bilinear form: node count and unique edges `u < v`,
/// no self-loops.
#[derive(Debug, Clone)]
pub struct SupportGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SupportGraph {
    pub fn new(nodes: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            assert!(e.0 != e.1, "self-loops are not allowed");
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            assert!(e.1 < nodes);
        }
        edges.sort_unstable();
        edges.dedup();
        SupportGraph { nodes, edges }
    }
}

/// Bilinear-over-bilinear fractional program on the unit box: maximize
/// `(sum_e B_e x_u x_v + d.x + d0) / (sum_e A_e x_u x_v + c.x + c0)`.
#[derive(Debug, Clone)]
pub struct BilinearFractional {
    pub graph: SupportGraph,
    /// denominator edge coefficients, aligned with `graph.edges`
    pub a_edge: Vec<f64>,
    /// numerator edge coefficients
    pub b_edge: Vec<f64>,
    pub c_lin: Vec<f64>,
    pub c0: f64,
    pub d_lin: Vec<f64>,
    pub d0: f64,
}

impl BilinearFractional {
    pub fn denominator(&self, x: &[f64]) -> f64 {
        let mut q = self.c0;
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            q += self.a_edge[e] * x[u] * x[v];
        }
        for (u, &c) in self.c_lin.iter().enumerate() {
            q += c * x[u];
        }
        q
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        let mut p = self.d0;
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            p += self.b_edge[e] * x[u] * x[v];
        }
        for (u, &d) in self.d_lin.iter().enumerate() {
            p += d * x[u];
        }
        p
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.numerator(x) / self.denominator(x)
    }
}

#[derive(Debug, Clone)]
pub struct BilinearVars {
    pub rho: usize,
    pub y: Vec<usize>,
    /// one column per graph edge, aligned with `graph.edges`
    pub w: Vec<usize>,
}

/// Homogenized relaxation of the bilinear fractional program: normalization,
/// McCormick on every edge, and the odd-cycle separator. The denominator must
/// be positive on the box, certified by enumerating its vertices (the
/// bilinear form attains its box extremes at vertices).
pub fn build_bilinear_frac(
    qfp: &BilinearFractional,
) -> Result<(LinearModel, BilinearVars, Vec<Box<dyn CutGenerator>>), BqpError> {
    let n = qfp.graph.nodes;
    assert!(n <= 22, "vertex certification enumerates the box");
    let mut min_q = f64::INFINITY;
    for bits in 0..(1u64 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((bits >> j) & 1) as f64).collect();
        min_q = min_q.min(qfp.denominator(&x));
    }
    if min_q <= 0.0 {
        return Err(BqpError::NonPositiveDenominator);
    }
    let mut model = LinearModel::new(Sense::Maximize);
    let rho = model.add_var("rho", 0.0, f64::INFINITY, qfp.d0);
    let y: Vec<usize> = (0..n)
        .map(|u| model.add_var(&format!("y{}", u + 1), 0.0, f64::INFINITY, qfp.d_lin[u]))
        .collect();
    let w: Vec<usize> = qfp
        .graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            model.add_var(
                &format!("w{}_{}", u + 1, v + 1),
                0.0,
                f64::INFINITY,
                qfp.b_edge[e],
            )
        })
        .collect();
    // normalization: sum_e a_e w_e + c.y + c0 rho = 1
    let mut norm = vec![(rho, qfp.c0)];
    for (e, &col) in w.iter().enumerate() {
        if qfp.a_edge[e] != 0.0 {
            norm.push((col, qfp.a_edge[e]));
        }
    }
    for (u, &col) in y.iter().enumerate() {
        if qfp.c_lin[u] != 0.0 {
            norm.push((col, qfp.c_lin[u]));
        }
    }
    model.add_row(Row::new(norm, Relation::Eq, 1.0));
    // homogenized box rows y <= rho and edge McCormick
    for &col in &y {
        model.add_row(Row::new(vec![(col, 1.0), (rho, -1.0)], Relation::Le, 0.0));
    }
    for (e, &(u, v)) in qfp.graph.edges.iter().enumerate() {
        model.add_row(Row::new(
            vec![(w[e], 1.0), (y[u], -1.0)],
            Relation::Le,
            0.0,
        ));
        model.add_row(Row::new(
            vec![(w[e], 1.0), (y[v], -1.0)],
            Relation::Le,
            0.0,
        ));
        model.add_row(Row::new(
            vec![(w[e], 1.0), (y[u], -1.0), (y[v], -1.0), (rho, 1.0)],
            Relation::Ge,
            0.0,
        ));
    }
    let vars = BilinearVars { rho, y, w };
    let sep = OddCycleSeparator::for_bilinear(&qfp.graph, &vars);
    Ok((model, vars, vec![Box::new(sep)]))
}

/// Exact optimum of the bilinear fractional program by vertex enumeration
/// (continuous and binary optima coincide for bilinear ratios on the box).
pub fn bilinear_brute_force(qfp: &BilinearFractional) -> (f64, Vec<f64>) {
    let n = qfp.graph.nodes;
    assert!(n <= 22);
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0.0; n];
    for bits in 0..(1u64 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((bits >> j) & 1) as f64).collect();
        let v = qfp.value(&x);
        if v > best {
            best = v;
            arg = x;
        }
    }
    (best, arg)
}

/// Exact lifting of a box point into the bilinear relaxation space.
pub fn lift_bilinear_point(
    qfp: &BilinearFractional,
    vars: &BilinearVars,
    num_cols: usize,
    x: &[f64],
) -> Vec<f64> {
    let mut point = vec![0.0; num_cols];
    let rho = 1.0 / qfp.denominator(x);
    point[vars.rho] = rho;
    for (u, &col) in vars.y.iter().enumerate() {
        point[col] = rho * x[u];
    }
    for (e, &(u, v)) in qfp.graph.edges.iter().enumerate() {
        point[vars.w[e]] = rho * x[u] * x[v];
    }
    point
}
