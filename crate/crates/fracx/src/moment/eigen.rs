//! Cyclic Jacobi eigendecomposition for small symmetric matrices.
//!
//! A sequence of plane rotations annihilates off-diagonal entries until their
//! norm falls below tolerance; the accumulated rotations give the
//! eigenvectors. Matrices in this crate are at most 16 x 16, where Jacobi is
//! both simple and accurate.

/// Off-diagonal Frobenius tolerance, relative to the matrix norm.
const OFF_TOL: f64 = 1e-12;
/// Sweep cap; each sweep visits every p < q pair once.
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) with matching eigenvectors (`vectors[k]` is the
/// unit eigenvector of `values[k]`). `a` is symmetric, row-major, `n x n`.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= OFF_TOL * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= OFF_TOL * scale / (n * n) as f64 {
                    continue;
                }
                let tau = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                // accumulate eigenvectors: V <- V J
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&k| m[k * n + k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    (values, vectors)
}

/// Applies the rotation J(p, q, theta) on both sides: M <- J^T M J.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..n {
        let mip = m[i * n + p];
        let miq = m[i * n + q];
        m[i * n + p] = c * mip - s * miq;
        m[i * n + q] = s * mip + c * miq;
    }
    for j in 0..n {
        let mpj = m[p * n + j];
        let mqj = m[q * n + j];
        m[p * n + j] = c * mpj - s * mqj;
        m[q * n + j] = s * mpj + c * mqj;
    }
}
