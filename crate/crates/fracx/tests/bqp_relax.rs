//! Relaxation-builder behavior: exact liftings are feasible everywhere, the
//! dominance order holds on seeded instances, the worked two-ratio example
//! reproduces its bounds at levels one and two, the witness point separates
//! the lifted envelope from the pair-lifted hull, lazy row generation matches
//! the full builds, and the separators are exact against enumeration.

use fracx::bench::{gen_uniform, relaxation_value, RelaxationKind, SplitMix64};
use fracx::bqp::{
    bilinear_brute_force, build_1term, build_1term_split, build_bilinear_frac, build_kterm,
    build_kterm_split, build_lef, build_rqp, build_rqp_split, conic_separator, lift_bilinear_point,
    lift_binary_point, lift_kterm_point, oddcycle_separate, triangle_cuts, BilinearFractional,
    ConicFamilies, LiftedVars, PoolSeparator, SupportGraph, TriangleSeparator,
};
use fracx::lp::{cutting_loop, CutGenerator, LpStatus, Relation, Row, Sense};
use fracx::model::{compute_bounds, FractionalProgram, Ratio};
use fracx::oracle::{brute_force_binary, enumerate_vertices};
use fracx::transform::charnes_cooper;

const LIFT_TOL: f64 = 1e-9;

fn appendix_instance() -> FractionalProgram {
    FractionalProgram::unconstrained_binary(
        vec![Ratio {
            a0: 1.0,
            a: vec![1.0, 1.0],
            b0: 1.0,
            b: vec![0.0, 0.0],
        }],
        2,
        Sense::Maximize,
    )
}

fn two_ratio_example() -> FractionalProgram {
    FractionalProgram::unconstrained_binary(
        vec![
            Ratio {
                a0: 1.0,
                a: vec![2.0, 4.0],
                b0: 1.0,
                b: vec![0.0, 0.0],
            },
            Ratio {
                a0: 1.0,
                a: vec![3.0, 5.0],
                b0: 1.0,
                b: vec![0.0, 0.0],
            },
        ],
        2,
        Sense::Maximize,
    )
}

fn all_binary_points(n: usize) -> Vec<Vec<f64>> {
    (0..(1u32 << n))
        .map(|bits| (0..n).map(|j| ((bits >> j) & 1) as f64).collect())
        .collect()
}

fn feasible_binary_points(fp: &FractionalProgram) -> Vec<Vec<f64>> {
    all_binary_points(fp.n_vars)
        .into_iter()
        .filter(|x| fp.satisfies_constraints(x, 1e-9))
        .collect()
}

#[test]
fn appendix_witness_in_lef_not_in_pair_hull() {
    let fp = appendix_instance();
    let bounds = compute_bounds(&fp).unwrap();
    assert!((bounds.rho_lo[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((bounds.rho_hi[0] - 1.0).abs() < 1e-12);

    // (rho, y1, y2, x1, x2) = (1/2, 1/4, 1/4, 1/4, 1/4)
    let (mut lef, vars) = build_lef(&fp, &bounds).unwrap();
    lef.fix(vars.rho[0], 0.5);
    lef.fix(vars.y[0][0], 0.25);
    lef.fix(vars.y[0][1], 0.25);
    lef.fix(vars.x[0], 0.25);
    lef.fix(vars.x[1], 0.25);
    let sol = lef.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Optimal, "witness must be LEF-feasible");

    let (mut one, vars) = build_1term(&fp, &bounds).unwrap();
    one.fix(vars.rho[0], 0.5);
    one.fix(vars.y[0][0], 0.25);
    one.fix(vars.y[0][1], 0.25);
    one.fix(vars.x[0], 0.25);
    one.fix(vars.x[1], 0.25);
    let sol = one.solve().unwrap();
    assert_eq!(
        sol.status,
        LpStatus::Infeasible,
        "witness violates x1 >= 2 y1 in the pair-lifted hull"
    );
}

fn assert_lifts_feasible(
    fp: &FractionalProgram,
    model: &fracx::lp::LinearModel,
    vars: &LiftedVars,
) {
    for x in feasible_binary_points(fp) {
        let point = lift_binary_point(fp, vars, model.num_vars(), &x);
        let viol = model.max_violation(&point);
        assert!(viol <= LIFT_TOL, "lift of {x:?} violates by {viol}");
    }
}

#[test]
fn exact_liftings_feasible_in_every_builder() {
    let mut rng = SplitMix64::new(99);
    for trial in 0..6 {
        let n = 3 + (rng.below(3)) as usize;
        let m = 1 + (rng.below(2)) as usize;
        let mut fp = gen_uniform(n, m, 1000 + trial);
        if trial % 2 == 0 {
            // add a cardinality row to exercise constrained instances
            fp.cons_rows = vec![vec![1.0; n]];
            fp.cons_rhs = vec![(n as f64 * 0.6).floor()];
        }
        let bounds = compute_bounds(&fp).unwrap();
        let (lef, vars) = build_lef(&fp, &bounds).unwrap();
        assert_lifts_feasible(&fp, &lef, &vars);
        let (one, vars) = build_1term(&fp, &bounds).unwrap();
        assert_lifts_feasible(&fp, &one, &vars);
        let (rqp, vars) = build_rqp(&fp, &bounds).unwrap();
        assert_lifts_feasible(&fp, &rqp, &vars);
        for k in 1..=n.min(3) {
            let (kt, kvars) = build_kterm(&fp, k).unwrap();
            for x in feasible_binary_points(&fp) {
                let point = lift_kterm_point(&fp, &kvars, kt.num_vars(), &x);
                let viol = kt.max_violation(&point);
                assert!(viol <= LIFT_TOL, "k={k} lift of {x:?} violates by {viol}");
            }
        }
    }
}

#[test]
fn dominance_chain_on_seeded_instances() {
    for seed in 0..10u64 {
        let fp = gen_uniform(6, 2, seed);
        let bounds = compute_bounds(&fp).unwrap();
        let v = |kind| relaxation_value(&fp, &bounds, kind, 1e-7, 400).unwrap();
        let lef = v(RelaxationKind::Lef);
        let cef = v(RelaxationKind::Cef);
        let one = v(RelaxationKind::OneTerm);
        let tc = v(RelaxationKind::OneTermConic);
        let rqp = v(RelaxationKind::Rqp);
        let oracle = brute_force_binary(&fp).unwrap().value;
        assert!(oracle <= tc + 1e-6, "seed {seed}: oracle {oracle} > 1tc {tc}");
        assert!(tc <= cef + 1e-6, "seed {seed}: 1tc {tc} > cef {cef}");
        assert!(cef <= lef + 1e-6, "seed {seed}: cef {cef} > lef {lef}");
        assert!(one <= lef + 1e-6, "seed {seed}: 1term {one} > lef {lef}");
        assert!(rqp <= lef + 1e-6, "seed {seed}: rqp {rqp} > lef {lef}");
        assert!(oracle <= one + 1e-6);
        assert!(oracle <= rqp + 1e-6);
        // k-term chain: nonincreasing in k, exact at k = n
        let mut last = f64::INFINITY;
        for k in 1..=6 {
            let vk = v(RelaxationKind::Kterm(k));
            assert!(vk <= last + 1e-6, "seed {seed}: k {k} value {vk} above {last}");
            assert!(oracle <= vk + 1e-6);
            last = vk;
        }
        assert!(
            (last - oracle).abs() <= 1e-6,
            "seed {seed}: top level {last} vs oracle {oracle}"
        );
    }
}

#[test]
fn rqp_equals_one_term_when_unconstrained() {
    for seed in [3u64, 4, 5] {
        let fp = gen_uniform(5, 2, seed);
        let bounds = compute_bounds(&fp).unwrap();
        let (rqp, _) = build_rqp(&fp, &bounds).unwrap();
        let (one, _) = build_1term(&fp, &bounds).unwrap();
        let v_rqp = rqp.solve().unwrap().objective;
        let v_one = one.solve().unwrap().objective;
        assert!(
            (v_rqp - v_one).abs() <= 1e-8 * (1.0 + v_one.abs()),
            "seed {seed}: {v_rqp} vs {v_one}"
        );
    }
}

#[test]
fn lazy_row_generation_matches_full_builds() {
    let fp = gen_uniform(6, 2, 77);
    let bounds = compute_bounds(&fp).unwrap();
    // RQP
    let (full, _) = build_rqp(&fp, &bounds).unwrap();
    let v_full = full.solve().unwrap().objective;
    let (mut base, _, pairs) = build_rqp_split(&fp, &bounds).unwrap();
    let mut gens: Vec<Box<dyn CutGenerator>> = vec![Box::new(PoolSeparator::new(pairs))];
    let v_lazy = cutting_loop(&mut base, &mut gens, 400, 1e-7)
        .unwrap()
        .objective;
    assert!((v_full - v_lazy).abs() <= 1e-7 * (1.0 + v_full.abs()));
    // 1TERM
    let (full, _) = build_1term(&fp, &bounds).unwrap();
    let v_full = full.solve().unwrap().objective;
    let (mut base, _, envelope) = build_1term_split(&fp, &bounds).unwrap();
    let mut gens: Vec<Box<dyn CutGenerator>> = vec![Box::new(PoolSeparator::new(envelope))];
    let v_lazy = cutting_loop(&mut base, &mut gens, 400, 1e-7)
        .unwrap()
        .objective;
    assert!((v_full - v_lazy).abs() <= 1e-7 * (1.0 + v_full.abs()));
    // KTERM(3)
    let (full, _) = build_kterm(&fp, 3).unwrap();
    let v_full = full.solve().unwrap().objective;
    let (mut base, _, rlt) = build_kterm_split(&fp, 3, 20_000).unwrap();
    let mut gens: Vec<Box<dyn CutGenerator>> = vec![Box::new(PoolSeparator::new(rlt))];
    let v_lazy = cutting_loop(&mut base, &mut gens, 400, 1e-7)
        .unwrap()
        .objective;
    assert!((v_full - v_lazy).abs() <= 1e-7 * (1.0 + v_full.abs()));
}

#[test]
fn worked_two_ratio_example_levels() {
    let fp = two_ratio_example();
    // the lifted points enumerate exactly as expected
    let expect = [
        [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [1.0 / 3.0, 1.0 / 3.0, 0.0, 0.25, 0.25, 0.0],
        [0.2, 0.0, 0.2, 1.0 / 6.0, 0.0, 1.0 / 6.0],
        [1.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0],
    ];
    for (bits, exp) in expect.iter().enumerate() {
        let x: Vec<f64> = (0..2).map(|j| ((bits >> j) & 1) as f64).collect();
        let lift = [
            1.0 / fp.ratios[0].denominator(&x),
            x[0] / fp.ratios[0].denominator(&x),
            x[1] / fp.ratios[0].denominator(&x),
            1.0 / fp.ratios[1].denominator(&x),
            x[0] / fp.ratios[1].denominator(&x),
            x[1] / fp.ratios[1].denominator(&x),
        ];
        for (a, b) in lift.iter().zip(exp) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    // max of 25 rho1 - 4 y1_1 - 24 rho2: 9 over level one, 1 over level two
    for (k, expected) in [(1usize, 9.0), (2usize, 1.0)] {
        let (mut model, vars) = build_kterm(&fp, k).unwrap();
        model.clear_objective();
        model.set_objective(vars.rho_col(0), 25.0);
        model.set_objective(vars.w_col(0, 0b01), -4.0);
        model.set_objective(vars.rho_col(1), -24.0);
        let sol = model.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(
            (sol.objective - expected).abs() <= 1e-6,
            "level {k}: {} vs {expected}",
            sol.objective
        );
    }
}

#[test]
fn kterm_level_one_equals_one_term() {
    for seed in [11u64, 12] {
        let fp = gen_uniform(5, 2, seed);
        let bounds = compute_bounds(&fp).unwrap();
        let (one, _) = build_1term(&fp, &bounds).unwrap();
        let (kt, _) = build_kterm(&fp, 1).unwrap();
        let a = one.solve().unwrap().objective;
        let b = kt.solve().unwrap().objective;
        assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn triangle_separation_behavior() {
    let fp = gen_uniform(4, 1, 21);
    let bounds = compute_bounds(&fp).unwrap();
    let (model, vars) = build_1term(&fp, &bounds).unwrap();
    // exact liftings admit no triangle cuts
    for x in all_binary_points(4) {
        let point = lift_binary_point(&fp, &vars, model.num_vars(), &x);
        assert!(triangle_cuts(&point, &vars, 1e-9).is_empty());
    }
    // rho = 1, y = 1/2, W = 0 violates the first triangle form by 1/2
    let mut point = vec![0.0; model.num_vars()];
    point[vars.rho[0]] = 1.0;
    for j in 0..4 {
        point[vars.y[0][j]] = 0.5;
    }
    let cuts = triangle_cuts(&point, &vars, 1e-9);
    assert!(!cuts.is_empty());
    let max_viol = cuts.iter().map(|c| c.violation).fold(0.0, f64::max);
    assert!((max_viol - 0.5).abs() < 1e-12, "violation {max_viol}");
}

#[test]
fn two_term_equivalence_routes() {
    // single ratio: 1-Term + exhaustive triangle rows == level-2 hierarchy,
    // and the cutting loop reaches the same value
    for (n, seed) in [(4usize, 31u64), (5, 32)] {
        let fp = gen_uniform(n, 1, seed);
        let bounds = compute_bounds(&fp).unwrap();

        let (mut explicit, vars) = build_1term(&fp, &bounds).unwrap();
        let zero = vec![0.0; explicit.num_vars()];
        let mut all_rows: Vec<Row> = Vec::new();
        // collecting every triangle row: separate at an artificial point far
        // outside, then keep the row set; simpler: enumerate directly
        for i in 0..1 {
            for j in 0..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let (yj, yk, yl) = (vars.y[i][j], vars.y[i][k], vars.y[i][l]);
                        let (wjk, wkl, wjl) = (
                            vars.w_col(i, j, k),
                            vars.w_col(i, k, l),
                            vars.w_col(i, j, l),
                        );
                        all_rows.push(Row::new(
                            vec![
                                (yj, 1.0),
                                (yk, 1.0),
                                (yl, 1.0),
                                (wjk, -1.0),
                                (wkl, -1.0),
                                (wjl, -1.0),
                                (vars.rho[i], -1.0),
                            ],
                            Relation::Le,
                            0.0,
                        ));
                        all_rows.push(Row::new(
                            vec![(yj, -1.0), (wjk, 1.0), (wjl, 1.0), (wkl, -1.0)],
                            Relation::Le,
                            0.0,
                        ));
                        all_rows.push(Row::new(
                            vec![(yk, -1.0), (wjk, 1.0), (wjl, -1.0), (wkl, 1.0)],
                            Relation::Le,
                            0.0,
                        ));
                        all_rows.push(Row::new(
                            vec![(yl, -1.0), (wjk, -1.0), (wjl, 1.0), (wkl, 1.0)],
                            Relation::Le,
                            0.0,
                        ));
                    }
                }
            }
        }
        let _ = zero;
        explicit.add_rows(all_rows.clone());
        let v_explicit = explicit.solve().unwrap().objective;

        let (mut looped, vars2) = build_1term(&fp, &bounds).unwrap();
        let mut gens: Vec<Box<dyn CutGenerator>> =
            vec![Box::new(TriangleSeparator::new(&vars2, 1e-8))];
        let v_loop = cutting_loop(&mut looped, &mut gens, 400, 1e-8)
            .unwrap()
            .objective;
        assert!(
            (v_explicit - v_loop).abs() <= 1e-6 * (1.0 + v_explicit.abs()),
            "n {n}: explicit {v_explicit} vs loop {v_loop}"
        );

        let (two_term, _) = build_kterm(&fp, 2).unwrap();
        let v_two = two_term.solve().unwrap().objective;
        assert!(
            (v_explicit - v_two).abs() <= 1e-6 * (1.0 + v_two.abs()),
            "n {n}: explicit {v_explicit} vs hierarchy {v_two}"
        );
    }
}

// --------------------------------------------------------------------------
// odd-cycle separation
// --------------------------------------------------------------------------

/// Exhaustive (cycle, odd subset) enumeration: the independent oracle for the
/// separator. Enumerates every simple cycle up to `max_len` and every odd
/// subset of its edges, returning the maximum inequality violation.
fn oddcycle_enumeration_violation(
    graph: &SupportGraph,
    rho: f64,
    y: &[f64],
    w: &std::collections::HashMap<(usize, usize), f64>,
) -> f64 {
    let n = graph.nodes;
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &graph.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut best: f64 = f64::NEG_INFINITY;
    let mut path: Vec<usize> = Vec::new();
    fn dfs(
        root: usize,
        cur: usize,
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        rho: f64,
        y: &[f64],
        w: &std::collections::HashMap<(usize, usize), f64>,
        best: &mut f64,
    ) {
        for &nxt in &adj[cur] {
            if nxt == root && path.len() >= 3 {
                // found a simple cycle; enumerate odd subsets
                let len = path.len();
                let edges: Vec<(usize, usize)> = (0..len)
                    .map(|t| {
                        let (a, b) = (path[t], path[(t + 1) % len]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                for mask in 0..(1u32 << len) {
                    if mask.count_ones() % 2 == 0 {
                        continue;
                    }
                    let mut lhs = 0.0;
                    for (t, e) in edges.iter().enumerate() {
                        let in_d = mask & (1 << t) != 0;
                        lhs += if in_d { -w[e] } else { w[e] };
                    }
                    for (t, &node) in path.iter().enumerate() {
                        let before = mask & (1 << ((t + len - 1) % len)) != 0;
                        let after = mask & (1 << t) != 0;
                        if before && after {
                            lhs += y[node];
                        } else if !before && !after {
                            lhs -= y[node];
                        }
                    }
                    let rhs = (mask.count_ones() as f64 - 1.0) / 2.0 * rho;
                    *best = best.max(lhs - rhs);
                }
                continue;
            }
            if nxt <= root || path.contains(&nxt) {
                continue;
            }
            path.push(nxt);
            dfs(root, nxt, adj, path, rho, y, w, best);
            path.pop();
        }
    }
    for root in 0..n {
        path.clear();
        path.push(root);
        dfs(root, root, &adj, &mut path, rho, y, w, &mut best);
    }
    best
}

/// Random point satisfying the McCormick envelope on every edge.
fn random_mccormick_point(
    graph: &SupportGraph,
    rng: &mut SplitMix64,
) -> (f64, Vec<f64>, std::collections::HashMap<(usize, usize), f64>) {
    let rho = rng.uniform(0.4, 1.0);
    let y: Vec<f64> = (0..graph.nodes).map(|_| rng.uniform(0.0, rho)).collect();
    let mut w = std::collections::HashMap::new();
    for &(u, v) in &graph.edges {
        let lo = (y[u] + y[v] - rho).max(0.0);
        let hi = y[u].min(y[v]);
        w.insert((u, v), rng.uniform(lo, hi.max(lo)));
    }
    (rho, y, w)
}

#[test]
fn oddcycle_separator_matches_enumeration() {
    let mut rng = SplitMix64::new(2024);
    let graphs = [
        SupportGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]),
        SupportGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]),
        SupportGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)]),
        SupportGraph::new(
            5,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2), (1, 3)],
        ),
        SupportGraph::new(
            6,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3), (1, 4)],
        ),
    ];
    let tol = 1e-6;
    let mut found = 0;
    for graph in &graphs {
        // a bilinear shell provides the column layout
        let edges = graph.edges.len();
        let qfp = BilinearFractional {
            graph: graph.clone(),
            a_edge: vec![0.0; edges],
            b_edge: vec![0.0; edges],
            c_lin: vec![0.0; graph.nodes],
            c0: 1.0,
            d_lin: vec![0.0; graph.nodes],
            d0: 1.0,
        };
        let (model, vars, _) = build_bilinear_frac(&qfp).unwrap();
        for _ in 0..120 {
            let (rho, y, w) = random_mccormick_point(graph, &mut rng);
            let mut point = vec![0.0; model.num_vars()];
            point[vars.rho] = rho;
            for (u, &col) in vars.y.iter().enumerate() {
                point[col] = y[u];
            }
            for (e, &(u, v)) in graph.edges.iter().enumerate() {
                point[vars.w[e]] = w[&(u, v)];
            }
            let oracle_viol = oddcycle_enumeration_violation(graph, rho, &y, &w);
            // skip knife-edge points where the verdicts may differ in the
            // last eps
            if (oracle_viol - tol).abs() <= 1e-9 {
                continue;
            }
            let mut sep = fracx::bqp::OddCycleSeparator::for_bilinear(graph, &vars);
            sep.tol = tol;
            let cuts = sep.separate(&point).unwrap();
            assert_eq!(
                !cuts.is_empty(),
                oracle_viol > tol,
                "graph {:?}: oracle violation {oracle_viol}, cuts {}",
                graph.edges,
                cuts.len()
            );
            for cut in &cuts {
                assert!(cut.row.violation(&point) > tol * 0.5);
                found += 1;
            }
        }
    }
    assert!(found > 50, "too few separating runs: {found}");
}

#[test]
fn oddcycle_triangle_matches_triangle_row() {
    // on a triangle with D = all edges, the inequality is the first triangle
    // form with rhs rho
    let graph = SupportGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]);
    let fp = gen_uniform(3, 1, 5);
    let bounds = compute_bounds(&fp).unwrap();
    let (model, vars) = build_1term(&fp, &bounds).unwrap();
    let mut point = vec![0.0; model.num_vars()];
    point[vars.rho[0]] = 1.0;
    for j in 0..3 {
        point[vars.y[0][j]] = 0.5;
    }
    // W = 0: the all-D triangle is violated by 1/2
    let cuts = oddcycle_separate(&point, &graph, &vars, 0, 1e-7).unwrap();
    assert!(!cuts.is_empty());
    let best = cuts
        .iter()
        .max_by(|a, b| a.violation.total_cmp(&b.violation))
        .unwrap();
    assert!((best.violation - 0.5).abs() < 1e-9);
    // the row reads y0 + y1 + y2 - w01 - w02 - w12 - rho <= 0
    let mut coeffs = best.row.coeffs.clone();
    coeffs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut expect = vec![
        (vars.y[0][0], 1.0),
        (vars.y[0][1], 1.0),
        (vars.y[0][2], 1.0),
        (vars.w_col(0, 0, 1), -1.0),
        (vars.w_col(0, 0, 2), -1.0),
        (vars.w_col(0, 1, 2), -1.0),
        (vars.rho[0], -1.0),
    ];
    expect.sort_by(|a: &(usize, f64), b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(coeffs, expect);
    // exact liftings admit no cuts
    for x in all_binary_points(3) {
        let point = lift_binary_point(&fp, &vars, model.num_vars(), &x);
        assert!(oddcycle_separate(&point, &graph, &vars, 0, 1e-7)
            .unwrap()
            .is_empty());
    }
}

#[test]
fn conic_tangent_example_and_tight_point() {
    // scalar case a0 = 1, a = (1), point x = 1, rho = 0: the tangent cut is
    // rho >= 1/2 - (x - 1)/4, violated by 1/2
    let fp = FractionalProgram::unconstrained_binary(
        vec![Ratio {
            a0: 1.0,
            a: vec![1.0],
            b0: 1.0,
            b: vec![0.0],
        }],
        1,
        Sense::Maximize,
    );
    let bounds = compute_bounds(&fp).unwrap();
    let (model, vars) = build_lef(&fp, &bounds).unwrap();
    let mut sep = conic_separator(&fp, &bounds, &vars, ConicFamilies::ReciprocalOnly);
    let mut point = vec![0.0; model.num_vars()];
    point[vars.x[0]] = 1.0;
    point[vars.rho[0]] = 0.0;
    let cuts = sep.cuts(&point);
    assert_eq!(cuts.len(), 1);
    assert!((cuts[0].violation - 0.5).abs() < 1e-12);
    // at x = 1 the cut reads rho + x/4 >= 3/4
    assert!((cuts[0].row.rhs - 0.75).abs() < 1e-12);
    // tight point: rho exactly 1/den gives no cut
    point[vars.rho[0]] = 0.5;
    assert!(sep.cuts(&point).is_empty());
}

#[test]
fn bilinear_edgeless_reduces_to_single_ratio() {
    // no edges: (d.x + d0) / (c.x + c0) over the box equals the
    // Charnes-Cooper optimum
    let n = 3;
    let qfp = BilinearFractional {
        graph: SupportGraph::new(n, vec![]),
        a_edge: vec![],
        b_edge: vec![],
        c_lin: vec![0.4, 0.2, 0.7],
        c0: 1.0,
        d_lin: vec![1.0, -0.5, 0.25],
        d0: 0.3,
    };
    let (mut model, _, mut seps) = build_bilinear_frac(&qfp).unwrap();
    let sol = cutting_loop(&mut model, &mut seps, 100, 1e-7).unwrap();
    let fp = FractionalProgram {
        n_vars: n,
        ratios: vec![Ratio {
            a0: qfp.c0,
            a: qfp.c_lin.clone(),
            b0: qfp.d0,
            b: qfp.d_lin.clone(),
        }],
        linear_obj: vec![0.0; n],
        cons_rows: vec![],
        cons_rhs: vec![],
        var_kind: vec![fracx::model::VarKind::Continuous { lo: 0.0, hi: 1.0 }; n],
        sense: Sense::Maximize,
    };
    let cc = charnes_cooper(&fp, Sense::Maximize).unwrap();
    let cc_sol = cc.model.solve().unwrap();
    assert!(
        (sol.objective - cc_sol.objective).abs() <= 1e-7 * (1.0 + cc_sol.objective.abs()),
        "{} vs {}",
        sol.objective,
        cc_sol.objective
    );
}

fn seeded_bilinear(graph: SupportGraph, seed: u64) -> BilinearFractional {
    let mut rng = SplitMix64::new(seed);
    let ecount = graph.edges.len();
    let n = graph.nodes;
    let a_edge: Vec<f64> = (0..ecount).map(|_| rng.uniform(-0.4, 1.0)).collect();
    let b_edge: Vec<f64> = (0..ecount).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let c_lin: Vec<f64> = (0..n).map(|_| rng.uniform(-0.2, 0.8)).collect();
    let d_lin: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let negatives: f64 = a_edge.iter().chain(&c_lin).map(|v| v.min(0.0)).sum();
    // constant large enough to keep the denominator positive on the box
    let c0 = 0.5 - negatives;
    BilinearFractional {
        graph,
        a_edge,
        b_edge,
        c_lin,
        c0,
        d_lin,
        d0: rng.uniform(-0.5, 0.5),
    }
}

#[test]
fn bilinear_series_parallel_solved_exactly() {
    // series-parallel graphs: a path with doubled middle edge pattern, a
    // cycle, and a theta-like graph built by series/parallel compositions
    let graphs = [
        SupportGraph::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]),
        SupportGraph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
        // two parallel 2-paths between 0 and 3 plus a pendant
        SupportGraph::new(6, vec![(0, 1), (1, 3), (0, 2), (2, 3), (3, 4), (4, 5)]),
        SupportGraph::new(
            8,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (3, 7),
            ],
        ),
    ];
    for (g, graph) in graphs.into_iter().enumerate() {
        for seed in 0..5u64 {
            let qfp = seeded_bilinear(graph.clone(), 900 + 10 * g as u64 + seed);
            let (mut model, _, mut seps) = build_bilinear_frac(&qfp).unwrap();
            let sol = cutting_loop(&mut model, &mut seps, 300, 1e-8).unwrap();
            let (exact, _) = bilinear_brute_force(&qfp);
            assert!(
                (sol.objective - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                "graph {g} seed {seed}: relaxation {} vs exact {exact}",
                sol.objective
            );
        }
    }
}

#[test]
fn bilinear_k4_upper_bounds_brute_force() {
    let graph = SupportGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    for seed in 0..5u64 {
        let qfp = seeded_bilinear(graph.clone(), 7000 + seed);
        let (mut model, vars, mut seps) = build_bilinear_frac(&qfp).unwrap();
        let sol = cutting_loop(&mut model, &mut seps, 300, 1e-8).unwrap();
        let (exact, arg) = bilinear_brute_force(&qfp);
        assert!(
            sol.objective >= exact - 1e-6,
            "seed {seed}: relaxation {} below exact {exact}",
            sol.objective
        );
        // the exact lifting stays feasible after all cuts
        let lift = lift_bilinear_point(&qfp, &vars, model.num_vars(), &arg);
        assert!(model.max_violation(&lift) <= 1e-9);
    }
}

#[test]
fn lef_value_dominates_oracle_and_vertices_check_denominators() {
    let fp = gen_uniform(6, 2, 300);
    let bounds = compute_bounds(&fp).unwrap();
    let (model, _) = build_lef(&fp, &bounds).unwrap();
    let v = model.solve().unwrap().objective;
    let oracle = brute_force_binary(&fp).unwrap().value;
    assert!(v >= oracle - 1e-8);
    // denominator bounds hold at every vertex of a small test polytope
    let (lo, hi) = fp.var_bounds();
    let verts = enumerate_vertices(&fp.cons_rows, &fp.cons_rhs, &lo, &hi).unwrap();
    for x in &verts {
        for (i, ratio) in fp.ratios.iter().enumerate() {
            let d = ratio.denominator(x);
            assert!(d >= bounds.denom_lo[i] - 1e-8);
            assert!(d <= bounds.denom_hi[i] + 1e-8);
        }
    }
}
