//! Exhaustive and analytic ground-truth solvers. Every relaxation value in
//! the test and acceptance suites is compared against these.

use crate::lp::Sense;
use crate::model::{dot, FractionalProgram};
use crate::moment::UnivariateInstance;
use std::fmt;

/// Default cap on binary enumeration; callers with a tight inner loop may
/// raise it explicitly via [`brute_force_binary_guarded`].
pub const BINARY_GUARD: usize = 22;
/// Hard cap: beyond this the Gray-code walk itself is hopeless.
pub const BINARY_GUARD_MAX: usize = 32;
/// Feasibility slack for binary points against `Cx <= d`.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum OracleError {
    TooLarge { n: usize, guard: usize },
    /// No binary point satisfies the constraints.
    Infeasible,
    PoleInRange(f64),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { n, guard } => {
                write!(f, "enumeration over {n} binaries exceeds the guard {guard}")
            }
            OracleError::Infeasible => write!(f, "no feasible binary point"),
            OracleError::PoleInRange(r) => write!(f, "pole {r} inside the variable range"),
        }
    }
}

impl std::error::Error for OracleError {}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub enumerated: u64,
    pub method: &'static str,
}

/// Exact optimum of the fractional program over feasible binary points by
/// exhaustive Gray-code enumeration (default guard `n <= 22`).
pub fn brute_force_binary(fp: &FractionalProgram) -> Result<OracleResult, OracleError> {
    brute_force_binary_guarded(fp, BINARY_GUARD)
}

/// Enumeration with an explicit guard; ties break toward the
/// lexicographically smallest argmax.
pub fn brute_force_binary_guarded(
    fp: &FractionalProgram,
    guard: usize,
) -> Result<OracleResult, OracleError> {
    let n = fp.n_vars;
    let guard = guard.min(BINARY_GUARD_MAX);
    if n > guard {
        return Err(OracleError::TooLarge { n, guard });
    }
    assert!(fp.is_all_binary(), "oracle enumeration needs binary marks");
    let maximize = fp.sense == Sense::Maximize;

    let threads = worker_count().min(1 << n.min(8));
    let shard_bits = if n >= 12 {
        (threads * 4).next_power_of_two().trailing_zeros() as usize
    } else {
        0
    }
    .min(n);
    let shards = 1u64 << shard_bits;
    let low_bits = n - shard_bits;

    let mut partials: Vec<Option<Candidate>> = Vec::new();
    if threads <= 1 || shards == 1 {
        for s in 0..shards {
            partials.push(enumerate_shard(fp, s, shard_bits, low_bits, maximize));
        }
    } else {
        let results = std::sync::Mutex::new(vec![None; shards as usize]);
        let next = std::sync::atomic::AtomicU64::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let s = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if s >= shards {
                        break;
                    }
                    let cand = enumerate_shard(fp, s, shard_bits, low_bits, maximize);
                    results.lock().unwrap()[s as usize] = cand;
                });
            }
        });
        partials = results.into_inner().unwrap();
    }

    let mut best: Option<Candidate> = None;
    for cand in partials.into_iter().flatten() {
        best = Some(match best {
            None => cand,
            Some(b) => b.merge(cand, maximize, n),
        });
    }
    let best = best.ok_or(OracleError::Infeasible)?;
    let argmax: Vec<f64> = (0..n)
        .map(|j| ((best.bits >> j) & 1) as f64)
        .collect();
    Ok(OracleResult {
        value: best.value,
        argmax,
        enumerated: 1u64 << n,
        method: "gray-enumeration",
    })
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    value: f64,
    bits: u64,
}

impl Candidate {
    fn merge(self, other: Candidate, maximize: bool, n: usize) -> Candidate {
        let better = if maximize {
            other.value > self.value
        } else {
            other.value < self.value
        };
        if better || (other.value == self.value && lex_less(other.bits, self.bits, n)) {
            other
        } else {
            self
        }
    }
}

/// Lexicographic order on assignments read `x_1, x_2, ...`.
fn lex_less(a: u64, b: u64, n: usize) -> bool {
    for j in 0..n {
        let (aj, bj) = ((a >> j) & 1, (b >> j) & 1);
        if aj != bj {
            return aj < bj;
        }
    }
    false
}

/// Exact state recomputation happens this often to keep incremental drift
/// below 1e-8.
const RESYNC_PERIOD: u64 = 1 << 16;

fn enumerate_shard(
    fp: &FractionalProgram,
    shard: u64,
    _shard_bits: usize,
    low_bits: usize,
    maximize: bool,
) -> Option<Candidate> {
    let n = fp.n_vars;
    let m = fp.m();
    // per-variable update coefficients (numerator, denominator) per ratio
    let upd: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|j| fp.ratios.iter().map(|r| (r.b[j], r.a[j])).collect())
        .collect();
    let rows = &fp.cons_rows;
    let rhs = &fp.cons_rhs;

    let mut bits: u64 = shard << low_bits;
    let mut num = vec![0.0f64; m];
    let mut den = vec![0.0f64; m];
    let mut lin = 0.0f64;
    let mut act = vec![0.0f64; rows.len()];
    let resync = |bits: u64, num: &mut [f64], den: &mut [f64], lin: &mut f64, act: &mut [f64]| {
        let x: Vec<f64> = (0..n).map(|j| ((bits >> j) & 1) as f64).collect();
        for (i, r) in fp.ratios.iter().enumerate() {
            num[i] = r.numerator(&x);
            den[i] = r.denominator(&x);
        }
        *lin = dot(&fp.linear_obj, &x);
        for (r, row) in rows.iter().enumerate() {
            act[r] = dot(row, &x);
        }
    };
    resync(bits, &mut num, &mut den, &mut lin, &mut act);

    let mut best: Option<Candidate> = None;
    let total: u64 = 1u64 << low_bits;
    let consider = |bits: u64, num: &[f64], den: &[f64], lin: f64, best: &mut Option<Candidate>| {
        let mut value = lin;
        for i in 0..m {
            value += num[i] / den[i];
        }
        let cand = Candidate { value, bits };
        *best = Some(match *best {
            None => cand,
            Some(b) => b.merge(cand, maximize, n),
        });
    };
    let feasible = |act: &[f64]| {
        act.iter()
            .zip(rhs)
            .all(|(a, r)| *a <= r + FEASIBILITY_SLACK)
    };

    if feasible(&act) {
        consider(bits, &num, &den, lin, &mut best);
    }
    for i in 1..total {
        if i % RESYNC_PERIOD == 0 {
            resync(bits, &mut num, &mut den, &mut lin, &mut act);
        }
        let j = i.trailing_zeros() as usize;
        bits ^= 1 << j;
        let sign = if (bits >> j) & 1 == 1 { 1.0 } else { -1.0 };
        for (i, &(bj, aj)) in upd[j].iter().enumerate() {
            num[i] += sign * bj;
            den[i] += sign * aj;
        }
        lin += sign * fp.linear_obj[j];
        if !rows.is_empty() {
            for (r, row) in rows.iter().enumerate() {
                act[r] += sign * row[j];
            }
            if !feasible(&act) {
                continue;
            }
        }
        consider(bits, &num, &den, lin, &mut best);
    }
    best
}

fn worker_count() -> usize {
    std::env::var("FRACX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
}

/// Deterministic multi-start 1-flip local search; the returned value is the
/// objective of a feasible binary point, hence a valid bound for every
/// relaxation. Used where full enumeration is out of reach.
pub fn local_search_binary(
    fp: &FractionalProgram,
    starts: usize,
    seed: u64,
) -> Result<OracleResult, OracleError> {
    let n = fp.n_vars;
    assert!(fp.is_all_binary());
    let maximize = fp.sense == Sense::Maximize;
    let mut state = seed;
    let mut rnd = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluated = 0u64;
    for s in 0..starts {
        let mut x: Vec<f64> = if s == 0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| ((rnd() >> 20) & 1) as f64).collect()
        };
        if !fp.satisfies_constraints(&x, FEASIBILITY_SLACK) {
            // repair toward feasibility by clearing set bits
            for j in 0..n {
                if fp.satisfies_constraints(&x, FEASIBILITY_SLACK) {
                    break;
                }
                x[j] = 0.0;
            }
            if !fp.satisfies_constraints(&x, FEASIBILITY_SLACK) {
                continue;
            }
        }
        let mut cur = fp.objective_value(&x);
        loop {
            let mut improved = false;
            let mut best_flip = (0usize, cur);
            for j in 0..n {
                x[j] = 1.0 - x[j];
                if fp.satisfies_constraints(&x, FEASIBILITY_SLACK) {
                    let v = fp.objective_value(&x);
                    evaluated += 1;
                    let gain = if maximize {
                        v > best_flip.1 + 1e-12
                    } else {
                        v < best_flip.1 - 1e-12
                    };
                    if gain {
                        best_flip = (j, v);
                        improved = true;
                    }
                }
                x[j] = 1.0 - x[j];
            }
            if !improved {
                break;
            }
            x[best_flip.0] = 1.0 - x[best_flip.0];
            cur = best_flip.1;
        }
        let better = match &best {
            None => true,
            Some((bv, _)) => {
                if maximize {
                    cur > *bv
                } else {
                    cur < *bv
                }
            }
        };
        if better {
            best = Some((cur, x.clone()));
        }
    }
    let (value, argmax) = best.ok_or(OracleError::Infeasible)?;
    Ok(OracleResult {
        value,
        argmax,
        enumerated: evaluated,
        method: "local-search",
    })
}

/// All vertices of `{x | Cx <= d, lo <= x <= hi}` by enumerating active-set
/// combinations (guards: dimension <= 6, at most 12 structural rows).
pub fn enumerate_vertices(
    cons_rows: &[Vec<f64>],
    cons_rhs: &[f64],
    lo: &[f64],
    hi: &[f64],
) -> Result<Vec<Vec<f64>>, OracleError> {
    let n = lo.len();
    if n > 6 || cons_rows.len() > 12 {
        return Err(OracleError::TooLarge {
            n: n.max(cons_rows.len()),
            guard: if n > 6 { 6 } else { 12 },
        });
    }
    let mut rows: Vec<(Vec<f64>, f64)> = cons_rows
        .iter()
        .zip(cons_rhs)
        .map(|(r, &b)| (r.clone(), b))
        .collect();
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = 1.0;
        rows.push((r.clone(), hi[j]));
        r[j] = -1.0;
        rows.push((r, -lo[j]));
    }
    let total = rows.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut comb: Vec<usize> = (0..n).collect();
    loop {
        // solve the active system
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &ci) in comb.iter().enumerate() {
            a[r * n..(r + 1) * n].copy_from_slice(&rows[ci].0);
            b[r] = rows[ci].1;
        }
        if let Some(x) = solve_square(&mut a, &mut b, n) {
            let feasible = rows
                .iter()
                .all(|(c, rhs)| dot(c, &x) <= rhs + 1e-8);
            if feasible
                && !verts
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(u, w)| (u - w).abs() <= 1e-8))
            {
                verts.push(x);
            }
        }
        // next combination
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(verts);
            }
            k -= 1;
            if comb[k] + 1 <= total - (n - k) {
                comb[k] += 1;
                for t in k + 1..n {
                    comb[t] = comb[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-9 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in 0..n {
            if r != col {
                let f = a[r * n + col] / d;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i * n + i]).collect())
}

/// Exact optimum of the pole-sum design problem: for fixed `x` each `y_i`
/// sits at the box end selected by the sign of `c_i/(x-r_i) - b_i`, and the
/// resulting univariate profile is maximized by a 2000-point grid scan plus
/// golden-section refinement on the best bracket.
pub fn univariate_exact(inst: &UnivariateInstance) -> Result<OracleResult, OracleError> {
    univariate_exact_with_grid(inst, 2000)
}

pub fn univariate_exact_with_grid(
    inst: &UnivariateInstance,
    grid: usize,
) -> Result<OracleResult, OracleError> {
    let (xl, xu) = inst.x_range;
    for &r in &inst.r {
        if r >= xl && r <= xu {
            return Err(OracleError::PoleInRange(r));
        }
    }
    let profile = |x: f64| -> f64 {
        let mut v = -inst.a * x;
        for i in 0..inst.m() {
            let coef = inst.c[i] / (x - inst.r[i]) - inst.b[i];
            let (yl, yu) = inst.y_ranges[i];
            v += coef * if coef > 0.0 { yu } else { yl };
        }
        v
    };
    let mut best_k = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..=grid {
        let x = xl + (xu - xl) * k as f64 / grid as f64;
        let v = profile(x);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    let step = (xu - xl) / grid as f64;
    let mut a = xl + step * best_k.saturating_sub(1) as f64;
    let mut b = (xl + step * (best_k + 1) as f64).min(xu);
    // golden-section on the bracket around the best grid point
    let inv_phi = 0.618_033_988_749_894_8;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (profile(c), profile(d));
    while b - a > 1e-9 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(d);
        }
    }
    let x_star = 0.5 * (a + b);
    let value = profile(x_star).max(best_v);
    let x_best = if profile(x_star) >= best_v {
        x_star
    } else {
        xl + step * best_k as f64
    };
    let mut argmax = vec![x_best];
    for i in 0..inst.m() {
        let coef = inst.c[i] / (x_best - inst.r[i]) - inst.b[i];
        let (yl, yu) = inst.y_ranges[i];
        argmax.push(if coef > 0.0 { yu } else { yl });
    }
    Ok(OracleResult {
        value,
        argmax,
        enumerated: grid as u64 + 1,
        method: "grid-golden",
    })
}
