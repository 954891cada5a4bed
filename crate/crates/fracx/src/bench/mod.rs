//! Instance generation, gap metrics, and the benchmark suite runner.

mod prng;
mod suite;

pub use prng::SplitMix64;
pub use suite::{
    relaxation_value, run_suite, suite_csv, Experiment, InstanceReport, RelaxationKind,
    SuiteConfig, SuiteOutcome, SummaryRow,
};

use crate::lp::Sense;
use crate::model::{FractionalProgram, Ratio, VarKind};
use crate::moment::UnivariateInstance;
use std::fmt;

#[derive(Debug, Clone)]
pub enum BenchError {
    /// `|v_base - v_ref|` below 1e-9: the gap denominator is degenerate.
    DegenerateGap,
    OddRatioCountRequired(usize),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::DegenerateGap => write!(f, "gap denominator smaller than 1e-9"),
            BenchError::OddRatioCountRequired(m) => {
                write!(f, "univariate generator needs odd m, got {m}")
            }
        }
    }
}

impl std::error::Error for BenchError {}

/// Unconstrained binary fractional instance: denominator coefficients from
/// U[0,20] (constant term U[1,20]), numerator coefficients from U[-20,0],
/// zero linear term. Draw order: per ratio a0, a, b0, b.
pub fn gen_uniform(n: usize, m: usize, seed: u64) -> FractionalProgram {
    assert!(n >= 1 && m >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut ratios = Vec::with_capacity(m);
    for _ in 0..m {
        let a0 = rng.uniform(1.0, 20.0);
        let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 20.0)).collect();
        let b0 = rng.uniform(-20.0, 0.0);
        let b: Vec<f64> = (0..n).map(|_| rng.uniform(-20.0, 0.0)).collect();
        ratios.push(Ratio { a0, a, b0, b });
    }
    FractionalProgram::unconstrained_binary(ratios, n, Sense::Maximize)
}

/// Assortment-style instance: `a_ij ~ U[0,1]`, `b_ij = a_ij r_i` with
/// `r_i ~ U[1,3]`, `a_i0 = 0.1 n`, `b_i0 = 0`, zero linear term, and the
/// cardinality row `sum x <= floor(0.2 n)`. Draw order: per ratio r_i then a.
pub fn gen_assortment(n: usize, m: usize, seed: u64) -> FractionalProgram {
    assert!(n >= 1 && m >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut ratios = Vec::with_capacity(m);
    for _ in 0..m {
        let r_i = rng.uniform(1.0, 3.0);
        let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1.0)).collect();
        let b: Vec<f64> = a.iter().map(|&v| v * r_i).collect();
        ratios.push(Ratio {
            a0: 0.1 * n as f64,
            a,
            b0: 0.0,
            b,
        });
    }
    let kappa = (0.2 * n as f64).floor();
    FractionalProgram {
        n_vars: n,
        ratios,
        linear_obj: vec![0.0; n],
        cons_rows: vec![vec![1.0; n]],
        cons_rhs: vec![kappa],
        var_kind: vec![VarKind::Binary; n],
        sense: Sense::Maximize,
    }
}

/// Pole-sum design instance on the paper box: `c_i ~ U[-1,1]`, poles
/// `U[-1,-0.1]` for the first `(m+1)/2` terms and `U[1.1,2]` for the rest,
/// and `(a, b)` the gradient of `sum_i c_i y_i/(x - r_i)` at a point sampled
/// uniformly from the box. Draw order: c, r, sample x, sample y.
pub fn gen_univariate(m: usize, seed: u64) -> Result<UnivariateInstance, BenchError> {
    if m % 2 == 0 {
        return Err(BenchError::OddRatioCountRequired(m));
    }
    let mut rng = SplitMix64::new(seed);
    let c: Vec<f64> = (0..m).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let below = m.div_ceil(2);
    let r: Vec<f64> = (0..m)
        .map(|i| {
            if i < below {
                rng.uniform(-1.0, -0.1)
            } else {
                rng.uniform(1.1, 2.0)
            }
        })
        .collect();
    let x_hat = rng.uniform(0.0, 1.0);
    let y_hat: Vec<f64> = (0..m).map(|_| rng.uniform(1.0, 2.0)).collect();
    // gradient of sum_i c_i y_i / (x - r_i) at (x_hat, y_hat)
    let a: f64 = (0..m)
        .map(|i| -c[i] * y_hat[i] / (x_hat - r[i]).powi(2))
        .sum();
    let b: Vec<f64> = (0..m).map(|i| c[i] / (x_hat - r[i])).collect();
    Ok(UnivariateInstance {
        a,
        b,
        c,
        r,
        x_range: (0.0, 1.0),
        y_ranges: vec![(1.0, 2.0); m],
    })
}

/// `100 (v_base - v_model) / (v_base - v_ref)`: how much of the base
/// relaxation's gap the model closes (max sense: `v_ref <= v_model <= v_base`).
pub fn closed_lef_gap(v_lef: f64, v_model: f64, v_hat: f64) -> Result<f64, BenchError> {
    if (v_lef - v_hat).abs() < 1e-9 {
        return Err(BenchError::DegenerateGap);
    }
    Ok(100.0 * (v_lef - v_model) / (v_lef - v_hat))
}

/// `100 (v_mh - v_exact) / (v_mc - v_exact)`: the share of the product-
/// McCormick gap left open by the moment-hull relaxation.
pub fn relative_remaining_gap(v_mh: f64, v_mc: f64, v_exact: f64) -> Result<f64, BenchError> {
    if (v_mc - v_exact).abs() < 1e-9 {
        return Err(BenchError::DegenerateGap);
    }
    Ok(100.0 * (v_mh - v_exact) / (v_mc - v_exact))
}
