//! Separators: homogenized triangle inequalities, exact odd-cycle separation
//! through a two-layer shortest-path graph, supporting-hyperplane cuts for
//! the reciprocal conic rows, and a generic lazy row pool.

use super::{BilinearVars, BqpError, LiftedVars, SupportGraph};
use crate::lp::{Cut, CutGenerator, Relation, Row};
use crate::model::{FractionalProgram, VariableBounds};
use std::collections::HashSet;

/// Slack guard: a McCormick slack below this is a caller error.
const SLACK_GUARD: f64 = -1e-7;

/// The four homogenized triangle inequalities per ratio and unordered triple,
/// returned when violated by more than `tol`. At most 500 cuts per call,
/// least-violated evicted.
pub fn triangle_cuts(point: &[f64], vars: &LiftedVars, tol: f64) -> Vec<Cut> {
    let n = vars.n;
    let mut cuts = Vec::new();
    for i in 0..vars.rho.len() {
        let rho = vars.rho[i];
        for j in 0..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let (yj, yk, yl) = (vars.y[i][j], vars.y[i][k], vars.y[i][l]);
                    let (wjk, wkl, wjl) = (
                        vars.w_col(i, j, k),
                        vars.w_col(i, k, l),
                        vars.w_col(i, j, l),
                    );
                    let candidates = [
                        // y_j + y_k + y_l - w_jk - w_kl - w_jl <= rho
                        Row::new(
                            vec![
                                (yj, 1.0),
                                (yk, 1.0),
                                (yl, 1.0),
                                (wjk, -1.0),
                                (wkl, -1.0),
                                (wjl, -1.0),
                                (rho, -1.0),
                            ],
                            Relation::Le,
                            0.0,
                        ),
                        // -y_j + w_jk + w_jl - w_kl <= 0
                        Row::new(
                            vec![(yj, -1.0), (wjk, 1.0), (wjl, 1.0), (wkl, -1.0)],
                            Relation::Le,
                            0.0,
                        ),
                        // -y_k + w_jk - w_jl + w_kl <= 0
                        Row::new(
                            vec![(yk, -1.0), (wjk, 1.0), (wjl, -1.0), (wkl, 1.0)],
                            Relation::Le,
                            0.0,
                        ),
                        // -y_l - w_jk + w_jl + w_kl <= 0
                        Row::new(
                            vec![(yl, -1.0), (wjk, -1.0), (wjl, 1.0), (wkl, 1.0)],
                            Relation::Le,
                            0.0,
                        ),
                    ];
                    for row in candidates {
                        let violation = row.violation(point);
                        if violation > tol {
                            cuts.push(Cut { row, violation });
                        }
                    }
                }
            }
        }
    }
    cuts.sort_by(|a, b| b.violation.total_cmp(&a.violation));
    cuts.truncate(500);
    cuts
}

/// Triangle-cut generator over the pair-lifted variables of every ratio.
pub struct TriangleSeparator {
    vars: LiftedVars,
    tol: f64,
}

impl TriangleSeparator {
    pub fn new(vars: &LiftedVars, tol: f64) -> Self {
        TriangleSeparator {
            vars: vars.clone(),
            tol,
        }
    }
}

impl CutGenerator for TriangleSeparator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        triangle_cuts(point, &self.vars, self.tol)
    }
}

/// One odd closed structure found by the separator.
#[derive(Debug, Clone)]
struct CycleCut {
    /// node sequence of the simple cycle
    nodes: Vec<usize>,
    /// for each cycle edge (nodes[t], nodes[t+1]): whether it is in D
    cross: Vec<bool>,
    weight: f64,
}

/// Exact odd-cycle separation over one layer of lifted variables: `rho`,
/// per-node `y` columns, and per-edge `w` columns. Implements the standard
/// reduction to shortest odd closed walks in a two-layer graph whose edge
/// weights are the (nonnegative) McCormick slacks.
pub struct OddCycleSeparator {
    graph: SupportGraph,
    rho: usize,
    y: Vec<usize>,
    w_edge: Vec<usize>,
    pub tol: f64,
}

impl OddCycleSeparator {
    pub fn for_bilinear(graph: &SupportGraph, vars: &BilinearVars) -> Self {
        OddCycleSeparator {
            graph: graph.clone(),
            rho: vars.rho,
            y: vars.y.clone(),
            w_edge: vars.w.clone(),
            tol: 1e-6,
        }
    }

    /// Separator for ratio `i` of a pair-lifted model, restricted to `graph`.
    pub fn for_ratio(graph: &SupportGraph, vars: &LiftedVars, i: usize) -> Self {
        let w_edge = graph
            .edges
            .iter()
            .map(|&(u, v)| vars.w_col(i, u, v))
            .collect();
        OddCycleSeparator {
            graph: graph.clone(),
            rho: vars.rho[i],
            y: vars.y[i].clone(),
            w_edge,
            tol: 1e-6,
        }
    }

    pub fn separate(&self, point: &[f64]) -> Result<Vec<Cut>, BqpError> {
        let rho = point[self.rho];
        let nodes = self.graph.nodes;
        let mut stay = Vec::with_capacity(self.graph.edges.len());
        let mut cross = Vec::with_capacity(self.graph.edges.len());
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            let (yu, yv, we) = (point[self.y[u]], point[self.y[v]], point[self.w_edge[e]]);
            let s = yu + yv - 2.0 * we;
            let c = rho - yu - yv + 2.0 * we;
            if s < SLACK_GUARD || c < SLACK_GUARD {
                return Err(BqpError::NegativeWeight(s.min(c)));
            }
            stay.push(s.max(0.0));
            cross.push(c.max(0.0));
        }
        // two-layer graph: node (v, layer) = v + layer * nodes
        let total = 2 * nodes;
        let mut adj: Vec<Vec<(usize, f64, usize, bool)>> = vec![Vec::new(); total];
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            for layer in 0..2 {
                let (a, b) = (u + layer * nodes, v + layer * nodes);
                adj[a].push((b, stay[e], e, false));
                adj[b].push((a, stay[e], e, false));
                let (a, b) = (u + layer * nodes, v + (1 - layer) * nodes);
                adj[a].push((b, cross[e], e, true));
                adj[b].push((a, cross[e], e, true));
            }
        }
        let mut seen: HashSet<Vec<(usize, bool)>> = HashSet::new();
        let mut cuts = Vec::new();
        for root in 0..nodes {
            let Some(steps) = shortest_walk(&adj, total, root, root + nodes, rho - 2.0 * self.tol)
            else {
                continue;
            };
            let node_seq: Vec<usize> = std::iter::once(root)
                .chain(steps.iter().map(|&(aux, _, _)| aux % nodes))
                .collect();
            let walk_steps: Vec<(usize, bool)> =
                steps.iter().map(|&(_, e, c)| (e, c)).collect();
            let Some(best) = best_odd_cycle(&node_seq, &walk_steps, &stay, &cross) else {
                continue;
            };
            if best.weight >= rho - 2.0 * self.tol {
                continue;
            }
            let mut sig: Vec<(usize, bool)> = best
                .cross
                .iter()
                .enumerate()
                .map(|(t, &c)| {
                    let (u, v) = (best.nodes[t], best.nodes[(t + 1) % best.nodes.len()]);
                    (self.edge_index(u, v), c)
                })
                .collect();
            sig.sort_unstable();
            if !seen.insert(sig) {
                continue;
            }
            let row = self.cycle_row(&best);
            let violation = row.violation(point);
            if violation > self.tol {
                cuts.push(Cut { row, violation });
            }
        }
        Ok(cuts)
    }

    /// Builds the homogenized odd-cycle inequality of a cycle with odd `D`.
    fn cycle_row(&self, cyc: &CycleCut) -> Row {
        let len = cyc.nodes.len();
        let d_count = cyc.cross.iter().filter(|&&c| c).count();
        debug_assert!(d_count % 2 == 1);
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        // node terms: +y for both incident edges in D, -y for none
        for (t, &node) in cyc.nodes.iter().enumerate() {
            let before = cyc.cross[(t + len - 1) % len];
            let after = cyc.cross[t];
            if before && after {
                coeffs.push((self.y[node], 1.0));
            } else if !before && !after {
                coeffs.push((self.y[node], -1.0));
            }
        }
        for (t, &is_cross) in cyc.cross.iter().enumerate() {
            let (u, v) = (cyc.nodes[t], cyc.nodes[(t + 1) % len]);
            let e = self.edge_index(u, v);
            coeffs.push((self.w_edge[e], if is_cross { -1.0 } else { 1.0 }));
        }
        coeffs.push((self.rho, -((d_count as f64 - 1.0) / 2.0)));
        Row::new(coeffs, Relation::Le, 0.0)
    }

    fn edge_index(&self, u: usize, v: usize) -> usize {
        let key = (u.min(v), u.max(v));
        self.graph
            .edges
            .binary_search(&key)
            .expect("cycle edge must exist in the graph")
    }
}

impl CutGenerator for OddCycleSeparator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        self.separate(point).unwrap_or_default()
    }
}

/// Free-function form: exact separation for ratio `i` of a pair-lifted model.
pub fn oddcycle_separate(
    point: &[f64],
    graph: &SupportGraph,
    vars: &LiftedVars,
    ratio: usize,
    tol: f64,
) -> Result<Vec<Cut>, BqpError> {
    let mut sep = OddCycleSeparator::for_ratio(graph, vars, ratio);
    sep.tol = tol;
    sep.separate(point)
}

/// Dijkstra on the layered graph; returns the step sequence
/// `(aux node, edge, cross)` of the path from `src` to `dst` when its length
/// is below `bound`.
fn shortest_walk(
    adj: &[Vec<(usize, f64, usize, bool)>],
    total: usize,
    src: usize,
    dst: usize,
    bound: f64,
) -> Option<Vec<(usize, usize, bool)>> {
    let mut dist = vec![f64::INFINITY; total];
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; total];
    let mut done = vec![false; total];
    dist[src] = 0.0;
    for _ in 0..total {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..total {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX || best > bound {
            break;
        }
        done[u] = true;
        if u == dst {
            break;
        }
        for &(v, w, e, cross) in &adj[u] {
            let nd = dist[u] + w;
            if nd < dist[v] - 1e-15 {
                dist[v] = nd;
                prev[v] = Some((u, e, cross));
            }
        }
    }
    if dist[dst] >= bound {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = dst;
    while cur != src {
        let (p, e, cross) = prev[cur]?;
        steps.push((cur, e, cross));
        cur = p;
    }
    steps.reverse();
    Some(steps)
}

/// Decomposes the closed walk into simple cycles through a node stack and
/// returns the lightest odd one with at least three edges. Such a cycle
/// exists whenever the walk weight is below `rho`: parity is additive over
/// the decomposition and the only odd two-edge structure weighs exactly
/// `rho`.
fn best_odd_cycle(
    node_seq: &[usize],
    steps: &[(usize, bool)],
    stay: &[f64],
    cross: &[f64],
) -> Option<CycleCut> {
    let mut stack: Vec<usize> = vec![node_seq[0]];
    let mut estack: Vec<(usize, bool)> = Vec::new();
    let mut best: Option<CycleCut> = None;
    for (t, &(edge, is_cross)) in steps.iter().enumerate() {
        let v = node_seq[t + 1];
        if let Some(pos) = stack.iter().position(|&u| u == v) {
            let nodes: Vec<usize> = stack[pos..].to_vec();
            let mut edges: Vec<(usize, bool)> = estack[pos..].to_vec();
            edges.push((edge, is_cross));
            stack.truncate(pos + 1);
            estack.truncate(pos);
            let odd = edges.iter().filter(|&&(_, c)| c).count() % 2 == 1;
            if odd && nodes.len() >= 3 {
                let weight: f64 = edges
                    .iter()
                    .map(|&(e, c)| if c { cross[e] } else { stay[e] })
                    .sum();
                let cand = CycleCut {
                    nodes,
                    cross: edges.iter().map(|&(_, c)| c).collect(),
                    weight,
                };
                best = Some(match best {
                    None => cand,
                    Some(b) if cand.weight < b.weight => cand,
                    Some(b) => b,
                });
            }
        } else {
            stack.push(v);
            estack.push((edge, is_cross));
        }
    }
    best
}

/// Generic lazy row pool: emits the most violated unseen rows of a fixed,
/// finite pool. Emitted rows are removed, so the loop terminates once no pool
/// row is violated and the solved subset is exact for the full pool.
pub struct PoolSeparator {
    pool: Vec<Row>,
    pub batch: usize,
    pub min_violation: f64,
}

impl PoolSeparator {
    pub fn new(pool: Vec<Row>) -> Self {
        PoolSeparator {
            pool,
            batch: 500,
            min_violation: crate::lp::FEAS_TOL,
        }
    }

    pub fn remaining(&self) -> usize {
        self.pool.len()
    }
}

impl CutGenerator for PoolSeparator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        let mut scored: Vec<(usize, f64)> = self
            .pool
            .iter()
            .enumerate()
            .filter_map(|(idx, row)| {
                let v = row.violation(point);
                (v >= self.min_violation).then_some((idx, v))
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        scored.truncate(self.batch);
        let mut take: Vec<usize> = scored.iter().map(|&(i, _)| i).collect();
        take.sort_unstable_by(|a, b| b.cmp(a));
        let mut cuts = Vec::new();
        for idx in take {
            let row = self.pool.swap_remove(idx);
            let violation = row.violation(point);
            cuts.push(Cut { row, violation });
        }
        cuts.sort_by(|a, b| b.violation.total_cmp(&a.violation));
        cuts
    }
}

/// Which conic families the separator linearizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicFamilies {
    /// Only `rho^i (a_i0 + a_i.x) >= 1`.
    ReciprocalOnly,
    /// Also `y^i_j (a_i0 + a_i.x) >= x_j^2` for binary `j`.
    Both,
}

/// Supporting-hyperplane separator for the convex conic rows. Tangents of
/// `1/(a_i0 + a_i.x)` are always valid; the perspective family is linearized
/// only at safely interior denominators (`den >= denom_lo / 2`).
pub struct ConicSeparator {
    a0: Vec<f64>,
    a: Vec<Vec<f64>>,
    denom_lo: Vec<f64>,
    binary: Vec<bool>,
    vars: LiftedVars,
    families: ConicFamilies,
    pub tol: f64,
}

pub fn conic_separator(
    fp: &FractionalProgram,
    bounds: &VariableBounds,
    vars: &LiftedVars,
    families: ConicFamilies,
) -> ConicSeparator {
    ConicSeparator {
        a0: fp.ratios.iter().map(|r| r.a0).collect(),
        a: fp.ratios.iter().map(|r| r.a.clone()).collect(),
        denom_lo: bounds.denom_lo.clone(),
        binary: fp.var_kind.iter().map(|k| k.is_binary()).collect(),
        vars: vars.clone(),
        families,
        tol: 1e-7,
    }
}

impl CutGenerator for ConicSeparator {
    fn cuts(&mut self, point: &[f64]) -> Vec<Cut> {
        let n = self.vars.n;
        let mut cuts = Vec::new();
        for i in 0..self.vars.rho.len() {
            let den: f64 = self.a0[i]
                + (0..n)
                    .map(|j| self.a[i][j] * point[self.vars.x[j]])
                    .sum::<f64>();
            if den <= 0.0 {
                // outside the domain of the convex form; the caller's bound
                // rows keep this from happening on solved points
                continue;
            }
            // rho >= 1/den tangent: rho + sum a_j x_j / den^2 >= 2/den - a0/den^2
            let viol = 1.0 / den - point[self.vars.rho[i]];
            if viol > self.tol {
                let mut coeffs = vec![(self.vars.rho[i], 1.0)];
                for j in 0..n {
                    if self.a[i][j] != 0.0 {
                        coeffs.push((self.vars.x[j], self.a[i][j] / (den * den)));
                    }
                }
                let rhs = 2.0 / den - self.a0[i] / (den * den);
                let row = Row::new(coeffs, Relation::Ge, rhs);
                let violation = row.violation(point);
                if violation > self.tol {
                    cuts.push(Cut { row, violation });
                }
            }
            if self.families == ConicFamilies::Both && den >= self.denom_lo[i] / 2.0 {
                for j in 0..n {
                    if !self.binary[j] {
                        continue;
                    }
                    let xj = point[self.vars.x[j]];
                    let viol = xj * xj / den - point[self.vars.y[i][j]];
                    if viol > self.tol {
                        // tangent of the jointly convex x^2/den at (x̄, den̄):
                        // y_j >= 2 x̄_j/den̄ x_j - x̄_j^2/den̄^2 (a0 + a.x)
                        let mut coeffs = vec![(self.vars.y[i][j], 1.0)];
                        let g_den = xj * xj / (den * den);
                        for l in 0..n {
                            let mut c = 0.0;
                            if l == j {
                                c -= 2.0 * xj / den;
                            }
                            if self.a[i][l] != 0.0 {
                                c += g_den * self.a[i][l];
                            }
                            if c != 0.0 {
                                coeffs.push((self.vars.x[l], c));
                            }
                        }
                        let rhs = -self.a0[i] * g_den;
                        let row = Row::new(coeffs, Relation::Ge, rhs);
                        let violation = row.violation(point);
                        if violation > self.tol {
                            cuts.push(Cut { row, violation });
                        }
                    }
                }
            }
        }
        cuts
    }
}
