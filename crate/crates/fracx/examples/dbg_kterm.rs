fn main() {
    use fracx::bench::gen_uniform;
    use fracx::bqp::{build_kterm_split, PoolSeparator, KTERM_COLUMN_CAP};
    use fracx::lp::{cutting_loop_logged, CutGenerator};
    use fracx::model::compute_bounds;
    for seed in 0..3u64 {
        let fp = gen_uniform(6, 2, seed);
        let _ = compute_bounds(&fp).unwrap();
        for k in 1..=6usize {
            let (mut model, _, rlt) = build_kterm_split(&fp, k, KTERM_COLUMN_CAP).unwrap();
            let mut gens: Vec<Box<dyn CutGenerator>> =
                vec![Box::new(PoolSeparator::new(rlt))];
            let t0 = std::time::Instant::now();
            match cutting_loop_logged(&mut model, &mut gens, 400, 1e-7) {
                Ok((sol, objs)) => println!(
                    "seed {seed} k {k}: {:?} obj {:.8} iters {} rounds {} rows {} in {:?}",
                    sol.status, sol.objective, sol.iterations, objs.len(), model.num_rows(), t0.elapsed()
                ),
                Err(e) => println!("seed {seed} k {k}: ERR {e}"),
            }
        }
    }
}
