//! Univariate machinery: partial fractions, the polynomial-basis change that
//! maps shifted reciprocals onto the moment curve, Hankel moment-cone
//! membership with eigenvector cuts, and the two relaxations of the
//! pole-sum design problem (product McCormick vs. moment hull).

pub mod eigen;

use crate::lp::{Cut, CutGenerator, LinearModel, Relation, Row, Sense};
use std::fmt;

/// PSD slack below which a moment vector counts as inside.
pub const PSD_TOL: f64 = 1e-9;
/// Condition-number cap for the basis matrix.
const COND_CAP: f64 = 1e12;

#[derive(Debug, Clone)]
pub enum MomentError {
    DuplicatePoles(f64),
    IllConditioned(f64),
    PoleInRange(f64),
    UnsupportedBox,
    SignAssumptionViolated,
}

impl fmt::Display for MomentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentError::DuplicatePoles(r) => write!(f, "duplicate pole at {r}"),
            MomentError::IllConditioned(c) => write!(f, "basis matrix condition estimate {c:e}"),
            MomentError::PoleInRange(r) => write!(f, "pole {r} lies inside the support interval"),
            MomentError::UnsupportedBox => {
                write!(f, "envelopes are specialized to x in [0,1], y in [1,2]")
            }
            MomentError::SignAssumptionViolated => {
                write!(f, "pole product changes sign over the support interval")
            }
        }
    }
}

impl std::error::Error for MomentError {}

/// Residues of `1 / prod_j (x - r_j)`: `alpha_i = 1 / prod_{j != i} (r_i - r_j)`,
/// so that `sum_i alpha_i / (x - r_i)` reproduces the reciprocal.
pub fn partial_fractions(poles: &[f64]) -> Result<Vec<f64>, MomentError> {
    for (i, &ri) in poles.iter().enumerate() {
        for &rj in &poles[i + 1..] {
            if (ri - rj).abs() < 1e-12 {
                return Err(MomentError::DuplicatePoles(ri));
            }
        }
    }
    Ok(poles
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            let prod: f64 = poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &rj)| ri - rj)
                .product();
            1.0 / prod
        })
        .collect())
}

/// Shift data for the curve `(1, 1/(x - r_1), ..., 1/(x - r_n), x - r_0)`:
/// the numerator shift `r0`, sorted poles, an auxiliary interpolation node
/// distinct from all shifts, and the support interval.
#[derive(Debug, Clone)]
pub struct ShiftVector {
    pub r0: f64,
    pub poles: Vec<f64>,
    pub r_aux: f64,
    pub support: (f64, f64),
}

impl ShiftVector {
    /// Sorts the poles, rejects duplicates and poles inside the support, and
    /// picks the auxiliary node as `b + 1 + max|r|` (nudged off collisions).
    pub fn new(r0: f64, poles: &[f64], support: (f64, f64)) -> Result<Self, MomentError> {
        let (a, b) = support;
        assert!(a < b, "support must be a nondegenerate interval");
        let mut sorted = poles.to_vec();
        sorted.sort_by(f64::total_cmp);
        for w in sorted.windows(2) {
            if (w[1] - w[0]).abs() < 1e-12 {
                return Err(MomentError::DuplicatePoles(w[0]));
            }
        }
        if sorted.iter().any(|&r| (r - r0).abs() < 1e-12) {
            return Err(MomentError::DuplicatePoles(r0));
        }
        if let Some(&r) = sorted.iter().find(|&&r| r >= a && r <= b) {
            return Err(MomentError::PoleInRange(r));
        }
        let max_abs = sorted
            .iter()
            .chain(std::iter::once(&r0))
            .fold(0.0_f64, |acc, &r| acc.max(r.abs()));
        let mut r_aux = b + 1.0 + max_abs;
        while sorted.iter().any(|&r| (r - r_aux).abs() < 1e-9) || (r_aux - r0).abs() < 1e-9 {
            r_aux += 0.5;
        }
        Ok(ShiftVector {
            r0,
            poles: sorted,
            r_aux,
            support,
        })
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }

    /// Basis polynomial `f_idx` evaluated at `x`:
    /// `f_0 = prod_j (x - r_j)`, `f_i = prod_{j != i} (x - r_j)` for poles,
    /// `f_{n+1} = (x - r_0) f_0`.
    pub fn basis_poly(&self, idx: usize, x: f64) -> f64 {
        let n = self.n();
        let full: f64 = self.poles.iter().map(|&r| x - r).product();
        match idx {
            0 => full,
            i if i <= n => self
                .poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i - 1)
                .map(|(_, &r)| x - r)
                .product(),
            i if i == n + 1 => (x - self.r0) * full,
            _ => panic!("basis index {idx} out of range"),
        }
    }

    /// Curve point `(1, 1/(x - r_1), ..., 1/(x - r_n), x - r_0)`.
    pub fn curve_point(&self, x: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n() + 2);
        v.push(1.0);
        v.extend(self.poles.iter().map(|&r| 1.0 / (x - r)));
        v.push(x - self.r0);
        v
    }

    /// Sign of `prod_j (x - r_j)` over the support. Constant because no pole
    /// lies inside: poles below contribute positive factors, poles above
    /// negative ones. A negative constant sign is handled by negating the
    /// basis, so it never raises an error.
    pub fn sign(&self) -> f64 {
        let (_, b) = self.support;
        if self.poles.iter().filter(|&&r| r > b).count() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// The `(n+2) x (n+2)` change of basis `T` (with inverse) mapping the basis
/// polynomials to the monomials: `T (f_0(x), ..., f_{n+1}(x)) = (1, x, ...,
/// x^{n+1})` identically. Row 0 reproduces the partial-fraction residues.
pub fn basis_matrix_t(shifts: &ShiftVector) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>), MomentError> {
    let n = shifts.n();
    let dim = n + 2;
    let mut t = vec![vec![0.0; dim]; dim];
    for (i, row) in t.iter_mut().enumerate() {
        for j in 1..=n {
            let rj = shifts.poles[j - 1];
            row[j] = rj.powi(i as i32) / shifts.basis_poly(j, rj);
        }
        let r0 = shifts.r0;
        let partial: f64 = (1..=n).map(|k| row[k] * shifts.basis_poly(k, r0)).sum();
        row[0] = (r0.powi(i as i32) - partial) / shifts.basis_poly(0, r0);
        let ra = shifts.r_aux;
        let partial: f64 = (0..=n).map(|k| row[k] * shifts.basis_poly(k, ra)).sum();
        row[dim - 1] = (ra.powi(i as i32) - partial) / shifts.basis_poly(n + 1, ra);
    }
    let tinv = invert(&t).ok_or(MomentError::IllConditioned(f64::INFINITY))?;
    let cond = norm1(&t) * norm1(&tinv);
    if cond > COND_CAP {
        return Err(MomentError::IllConditioned(cond));
    }
    Ok((t, tinv))
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..n {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..n {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn norm1(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|j| m.iter().map(|row| row[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// One symbolic Hankel block: `entry(i, j)` is a linear form in the moment
/// coordinates, stored as (coordinate, coefficient) pairs.
#[derive(Debug, Clone)]
pub struct HankelBlock {
    pub size: usize,
    terms: Vec<Vec<(usize, f64)>>, // size * size entries, row-major
}

impl HankelBlock {
    pub fn entry_terms(&self, i: usize, j: usize) -> &[(usize, f64)] {
        &self.terms[i * self.size + j]
    }

    pub fn evaluate(&self, coords: &[f64]) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| t.iter().map(|&(k, c)| c * coords[k]).sum())
            .collect()
    }
}

/// The pair of symmetric blocks whose joint positive semidefiniteness
/// characterizes membership of `(mu_0, ..., mu_d)` in the moment hull over
/// `[a, b]` (with `mu_0 = 1`); dropping the normalization gives the cone.
pub fn hankel_blocks(support: (f64, f64), d: usize) -> Vec<HankelBlock> {
    assert!(d >= 1, "degree must be at least 1");
    let (a, b) = support;
    assert!(a < b);
    let mut blocks = Vec::new();
    if d % 2 == 1 {
        let size = (d + 1) / 2;
        // H(mu_1..mu_d) - a H(mu_0..mu_{d-1}) >= 0
        blocks.push(build_block(size, &[(1, 1.0), (0, -a)]));
        // b H(mu_0..mu_{d-1}) - H(mu_1..mu_d) >= 0
        blocks.push(build_block(size, &[(0, b), (1, -1.0)]));
    } else {
        let size = d / 2 + 1;
        blocks.push(build_block(size, &[(0, 1.0)]));
        if d >= 2 {
            let size = d / 2;
            // -H(mu_2..) + (a+b) H(mu_1..) - ab H(mu_0..) >= 0
            blocks.push(build_block(size, &[(2, -1.0), (1, a + b), (0, -a * b)]));
        }
    }
    blocks
}

fn build_block(size: usize, shifts: &[(usize, f64)]) -> HankelBlock {
    let mut terms = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            terms.push(
                shifts
                    .iter()
                    .map(|&(s, c)| (i + j + s, c))
                    .collect::<Vec<_>>(),
            );
        }
    }
    HankelBlock { size, terms }
}

/// PSD verdict over all Hankel blocks of `(coords, support, d)`.
#[derive(Debug, Clone)]
pub struct MomentVerdict {
    pub inside: bool,
    pub min_eig: f64,
    /// Index of the block attaining the minimum eigenvalue.
    pub block: usize,
    /// Unit eigenvector of the most negative eigenvalue.
    pub witness: Vec<f64>,
}

pub fn moment_membership(coords: &[f64], support: (f64, f64), d: usize) -> MomentVerdict {
    assert!(coords.len() >= d + 1, "need d+1 moment coordinates");
    let mut verdict = MomentVerdict {
        inside: true,
        min_eig: f64::INFINITY,
        block: 0,
        witness: Vec::new(),
    };
    for (bi, block) in hankel_blocks(support, d).iter().enumerate() {
        let dense = block.evaluate(coords);
        let (vals, vecs) = eigen::jacobi_eigen(&dense, block.size);
        if vals[0] < verdict.min_eig {
            verdict.min_eig = vals[0];
            verdict.block = bi;
            verdict.witness = vecs[0].clone();
        }
    }
    verdict.inside = verdict.min_eig >= -PSD_TOL;
    verdict
}

/// Supporting hyperplane of a violated PSD block: the linear form
/// `sum_k gamma_k mu_k >= 0` with `gamma` assembled from `v v^T` against the
/// block's coefficient pattern. Valid for the whole moment cone; violated at
/// the input by `|min_eig|` when `v` is the corresponding unit eigenvector.
pub fn moment_cut(support: (f64, f64), d: usize, block: usize, witness: &[f64]) -> Vec<f64> {
    let blocks = hankel_blocks(support, d);
    let blk = &blocks[block];
    let mut gamma = vec![0.0; d + 1];
    for i in 0..blk.size {
        for j in 0..blk.size {
            let vv = witness[i] * witness[j];
            if vv != 0.0 {
                for &(k, c) in blk.entry_terms(i, j) {
                    gamma[k] += vv * c;
                }
            }
        }
    }
    gamma
}

/// Which normalized curve a membership query refers to.
#[derive(Debug, Clone)]
pub enum CurveKind {
    /// `(1, 1/(x-r_1), ..., 1/(x-r_n), x-r_0)` with the shift data.
    ShiftedReciprocal(ShiftVector),
    /// `(x^-p, ..., 1, ..., x^q)` over a support with `nu_p = 1`.
    PowerSpan { p: usize, q: usize, support: (f64, f64) },
}

/// Membership of a normalized vector in the convex hull of the curve,
/// decided through the moment cone: apply the basis change (identity for the
/// power span), check the normalization coordinate, and test the cone.
pub fn conv_g_membership(nu: &[f64], kind: &CurveKind) -> Result<bool, MomentError> {
    match kind {
        CurveKind::ShiftedReciprocal(shifts) => {
            let n = shifts.n();
            assert_eq!(nu.len(), n + 2);
            if (nu[0] - 1.0).abs() > 1e-7 {
                return Ok(false);
            }
            let (t, _) = basis_matrix_t(shifts)?;
            let s = shifts.sign();
            let mu: Vec<f64> = mat_vec(&t, nu).into_iter().map(|v| s * v).collect();
            Ok(moment_membership(&mu, shifts.support, n + 1).inside)
        }
        CurveKind::PowerSpan { p, q, support } => {
            let (a, b) = *support;
            // x^p must be sign-invariant and nonvanishing over the support
            let s = if *p == 0 {
                1.0
            } else if a <= 0.0 && b >= 0.0 {
                return Err(MomentError::SignAssumptionViolated);
            } else if a > 0.0 || *p % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            assert_eq!(nu.len(), p + q + 1);
            if (nu[*p] - 1.0).abs() > 1e-7 {
                return Ok(false);
            }
            let scaled: Vec<f64> = nu.iter().map(|&v| s * v).collect();
            Ok(moment_membership(&scaled, *support, p + q).inside)
        }
    }
}

/// The pole-sum design instance: maximize `-a x - b.y + c.z` with
/// `z_i = y_i / (x - r_i)` over a box.
#[derive(Debug, Clone)]
pub struct UnivariateInstance {
    pub a: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub r: Vec<f64>,
    pub x_range: (f64, f64),
    pub y_ranges: Vec<(f64, f64)>,
}

impl UnivariateInstance {
    pub fn m(&self) -> usize {
        self.r.len()
    }

    pub fn objective(&self, x: f64, y: &[f64]) -> f64 {
        let mut v = -self.a * x;
        for i in 0..self.m() {
            v += -self.b[i] * y[i] + self.c[i] * y[i] / (x - self.r[i]);
        }
        v
    }

    /// Range of `y_i / (x - r_i)` over the box; attained at corners because
    /// the ratio is linear in `y` and monotone in `x` for fixed `y`.
    pub fn z_bounds(&self, i: usize) -> Result<(f64, f64), MomentError> {
        let (xl, xu) = self.x_range;
        let r = self.r[i];
        if r >= xl && r <= xu {
            return Err(MomentError::PoleInRange(r));
        }
        let (yl, yu) = self.y_ranges[i];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &[xl, xu] {
            for &y in &[yl, yu] {
                let z = y / (x - r);
                lo = lo.min(z);
                hi = hi.max(z);
            }
        }
        Ok((lo, hi))
    }
}

/// Column indices of the product-McCormick relaxation model.
#[derive(Debug, Clone)]
pub struct UniMcVars {
    pub x: usize,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

/// Relaxation that rewrites `z_i (x - r_i) = y_i` and applies McCormick to
/// the product with LP-derived `z` bounds.
pub fn build_uni_mc(inst: &UnivariateInstance) -> Result<(LinearModel, UniMcVars), MomentError> {
    let m = inst.m();
    let (xl, xu) = inst.x_range;
    let mut model = LinearModel::new(Sense::Maximize);
    let x = model.add_var("x", xl, xu, -inst.a);
    let y: Vec<usize> = (0..m)
        .map(|i| {
            let (yl, yu) = inst.y_ranges[i];
            model.add_var(&format!("y{}", i + 1), yl, yu, -inst.b[i])
        })
        .collect();
    let mut z = Vec::with_capacity(m);
    for i in 0..m {
        let (zl, zu) = inst.z_bounds(i)?;
        z.push(model.add_var(&format!("z{}", i + 1), zl, zu, inst.c[i]));
    }
    for i in 0..m {
        let (zl, zu) = inst.z_bounds(i)?;
        let r = inst.r[i];
        let (tl, tu) = (xl - r, xu - r);
        // product w = z * t with t = x - r must equal y_i; the four
        // McCormick rows, with t expanded into x and constants:
        //   y >= zl t + tl z - zl tl,  y >= zu t + tu z - zu tu
        //   y <= zu t + tl z - zu tl,  y <= zl t + tu z - zl tu
        let rows = [
            (zl, tl, Relation::Ge),
            (zu, tu, Relation::Ge),
            (zu, tl, Relation::Le),
            (zl, tu, Relation::Le),
        ];
        for (zc, tc, rel) in rows {
            // y - zc * (x - r) - tc * z  {rel}  -zc * tc
            model.add_row(Row::new(
                vec![(y[i], 1.0), (x, -zc), (z[i], -tc)],
                rel,
                -zc * tc - zc * r,
            ));
        }
    }
    Ok((model, UniMcVars { x, y, z }))
}

/// Column indices of the moment-hull relaxation model.
#[derive(Debug, Clone)]
pub struct UniMhVars {
    pub x: usize,
    pub nu: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub shifts: ShiftVector,
    /// position of instance pole `i` in the sorted pole list
    pub sorted_pos: Vec<usize>,
}

/// Separator enforcing `(1, nu, x) in conv(G)` through the moment cone:
/// violated Hankel blocks of `T (1, nu, x - r0)` yield eigenvector cuts
/// mapped back to the model columns.
pub struct MomentHullSeparator {
    t: Vec<Vec<f64>>,
    shifts: ShiftVector,
    sign: f64,
    x_col: usize,
    nu_cols_sorted: Vec<usize>,
}

impl CutGenerator for MomentHullSeparator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        let n = self.shifts.n();
        let d = n + 1;
        let mut nu = Vec::with_capacity(n + 2);
        nu.push(1.0);
        nu.extend(self.nu_cols_sorted.iter().map(|&c| point[c]));
        nu.push(point[self.x_col] - self.shifts.r0);
        let mu: Vec<f64> = mat_vec(&self.t, &nu)
            .into_iter()
            .map(|v| self.sign * v)
            .collect();
        let verdict = moment_membership(&mu, self.shifts.support, d);
        if verdict.inside {
            return Vec::new();
        }
        let mut cuts = Vec::new();
        for (bi, block) in hankel_blocks(self.shifts.support, d).iter().enumerate() {
            let dense = block.evaluate(&mu);
            let (vals, vecs) = eigen::jacobi_eigen(&dense, block.size);
            if vals[0] < -PSD_TOL {
                let gamma = moment_cut(self.shifts.support, d, bi, &vecs[0]);
                // sum_k gamma_k mu_k >= 0 with mu = sign * T nu: coefficient
                // on nu_l is sign * sum_k gamma_k T[k][l]
                let mut coef = vec![0.0; n + 2];
                for (k, &g) in gamma.iter().enumerate() {
                    if g != 0.0 {
                        for (l, cl) in coef.iter_mut().enumerate() {
                            *cl += self.sign * g * self.t[k][l];
                        }
                    }
                }
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for (s, &col) in self.nu_cols_sorted.iter().enumerate() {
                    if coef[s + 1] != 0.0 {
                        coeffs.push((col, coef[s + 1]));
                    }
                }
                if coef[n + 1] != 0.0 {
                    coeffs.push((self.x_col, coef[n + 1]));
                }
                let rhs = -coef[0] + coef[n + 1] * self.shifts.r0;
                let row = Row::new(coeffs, Relation::Ge, rhs);
                let violation = -vals[0];
                cuts.push(Cut { row, violation });
            }
        }
        cuts
    }
}

/// Moment-hull relaxation of the pole-sum design problem. Only the paper box
/// `x in [0,1]`, `y_i in [1,2]` is supported: the `z` envelopes below are
/// specialized to those bounds.
pub fn build_uni_mh(
    inst: &UnivariateInstance,
) -> Result<(LinearModel, Vec<Box<dyn CutGenerator>>, UniMhVars), MomentError> {
    let m = inst.m();
    if inst.x_range != (0.0, 1.0) || inst.y_ranges.iter().any(|&b| b != (1.0, 2.0)) {
        return Err(MomentError::UnsupportedBox);
    }
    let shifts = ShiftVector::new(0.0, &inst.r, (0.0, 1.0))?;
    let sorted_pos: Vec<usize> = inst
        .r
        .iter()
        .map(|&ri| {
            shifts
                .poles
                .iter()
                .position(|&p| (p - ri).abs() < 1e-12)
                .expect("pole present after sorting")
        })
        .collect();
    let (t, _) = basis_matrix_t(&shifts)?;

    let mut model = LinearModel::new(Sense::Maximize);
    let x = model.add_var("x", 0.0, 1.0, -inst.a);
    let mut nu = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    for i in 0..m {
        let r = inst.r[i];
        // 1/(x - r) is decreasing in x, so over [0,1] the range is
        // [1/(1-r), -1/r] for poles on either side of the interval
        let (nl, nu_hi) = (1.0 / (1.0 - r), -1.0 / r);
        debug_assert!(nl < nu_hi);
        nu.push(model.add_var(&format!("nu{}", i + 1), nl, nu_hi, 0.0));
        y.push(model.add_var(&format!("y{}", i + 1), 1.0, 2.0, -inst.b[i]));
        z.push(model.add_var(
            &format!("z{}", i + 1),
            f64::NEG_INFINITY,
            f64::INFINITY,
            inst.c[i],
        ));
    }
    for i in 0..m {
        let r = inst.r[i];
        let nl = 1.0 / (1.0 - r);
        let nh = -1.0 / r;
        // McCormick for z = y * nu over y in [1,2], nu in [nl, nh]
        let rows = [
            (1.0, nl, Relation::Ge), // z >= nl y + 1 nu - 1 nl
            (2.0, nh, Relation::Ge), // z >= nh y + 2 nu - 2 nh
            (2.0, nl, Relation::Le), // z <= nl y + 2 nu - 2 nl
            (1.0, nh, Relation::Le), // z <= nh y + 1 nu - 1 nh
        ];
        for (yc, nc, rel) in rows {
            model.add_row(Row::new(
                vec![(z[i], 1.0), (y[i], -nc), (nu[i], -yc)],
                rel,
                -yc * nc,
            ));
        }
    }
    let nu_cols_sorted: Vec<usize> = (0..m).map(|s| nu[inv_perm(&sorted_pos, s)]).collect();
    let sep = MomentHullSeparator {
        t,
        sign: shifts.sign(),
        shifts: shifts.clone(),
        x_col: x,
        nu_cols_sorted,
    };
    let vars = UniMhVars {
        x,
        nu,
        y,
        z,
        shifts,
        sorted_pos,
    };
    Ok((model, vec![Box::new(sep)], vars))
}

/// Index of the instance pole sitting at sorted position `p`.
fn inv_perm(sorted_pos: &[usize], p: usize) -> usize {
    sorted_pos
        .iter()
        .position(|&s| s == p)
        .expect("permutation is a bijection")
}
