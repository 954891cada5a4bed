//! Suite runner: builds seeded instances, solves the selected relaxations,
//! computes gap metrics against the enumeration oracle, and emits an
//! RFC-4180 CSV plus per-size summary statistics.

use super::{closed_lef_gap, gen_assortment, gen_uniform, gen_univariate, relative_remaining_gap};
use crate::bqp::{
    build_1term_split, build_kterm_split, build_lef, build_rqp_split, conic_separator,
    ConicFamilies, PoolSeparator, KTERM_COLUMN_CAP,
};
use crate::lp::{cutting_loop, CutGenerator, LpStatus};
use crate::model::{compute_bounds, FractionalProgram};
use crate::moment::{build_uni_mc, build_uni_mh};
use crate::oracle::{brute_force_binary_guarded, local_search_binary, univariate_exact};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    UniformGap,
    Assortment,
    Univariate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::UniformGap => "uniform-gap",
            Experiment::Assortment => "assortment",
            Experiment::Univariate => "univariate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxationKind {
    Lef,
    Cef,
    Rqp,
    OneTerm,
    OneTermConic,
    Kterm(usize),
}

impl fmt::Display for RelaxationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelaxationKind::Lef => write!(f, "LEF"),
            RelaxationKind::Cef => write!(f, "CEF"),
            RelaxationKind::Rqp => write!(f, "RQP"),
            RelaxationKind::OneTerm => write!(f, "1TERM"),
            RelaxationKind::OneTermConic => write!(f, "1TERM-CONIC"),
            RelaxationKind::Kterm(k) => write!(f, "KTERM({k})"),
        }
    }
}

impl RelaxationKind {
    pub fn parse(text: &str) -> Option<RelaxationKind> {
        let t = text.to_ascii_uppercase();
        match t.as_str() {
            "LEF" => Some(RelaxationKind::Lef),
            "CEF" => Some(RelaxationKind::Cef),
            "RQP" => Some(RelaxationKind::Rqp),
            "1TERM" => Some(RelaxationKind::OneTerm),
            "1TERM-CONIC" => Some(RelaxationKind::OneTermConic),
            _ => {
                let inner = t.strip_prefix("KTERM(")?.strip_suffix(')')?;
                inner.parse().ok().map(RelaxationKind::Kterm)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub experiment: Experiment,
    /// (n, m) pairs; the univariate experiment reads only m.
    pub sizes: Vec<(usize, usize)>,
    pub seeds: Vec<u64>,
    pub relaxations: Vec<RelaxationKind>,
    /// Separation tolerance of the cutting loops.
    pub tol: f64,
    pub max_rounds: usize,
    /// Enumeration guard; larger instances fall back to local search for the
    /// reference value.
    pub oracle_guard: usize,
}

impl SuiteConfig {
    pub fn new(experiment: Experiment) -> Self {
        SuiteConfig {
            experiment,
            sizes: Vec::new(),
            seeds: Vec::new(),
            relaxations: vec![RelaxationKind::Lef],
            tol: 1e-7,
            max_rounds: crate::lp::CUT_MAX_ROUNDS,
            oracle_guard: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationCell {
    pub kind: RelaxationKind,
    pub value: Result<f64, String>,
    pub micros: u128,
}

#[derive(Debug, Clone)]
pub struct InstanceReport {
    pub experiment: Experiment,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub cells: Vec<RelaxationCell>,
    /// Reference value and its method tag ("gray-enumeration", "local-search",
    /// or "grid-golden").
    pub reference: Option<(f64, &'static str)>,
    /// Univariate experiment: (v_mc, v_mh).
    pub univariate: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub label: String,
    pub count: usize,
    pub avg: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<InstanceReport>,
    pub summary: Vec<SummaryRow>,
    pub failures: usize,
}

/// Continuous bound of one relaxation of a fractional program. Static row
/// families (pair envelopes, RLT products) are generated lazily through the
/// row pool, so the value is exact for the full formulation; the conic rows
/// converge to the separation tolerance.
pub fn relaxation_value(
    fp: &FractionalProgram,
    bounds: &crate::model::VariableBounds,
    kind: RelaxationKind,
    tol: f64,
    max_rounds: usize,
) -> Result<f64, String> {
    let solved = |mut model: crate::lp::LinearModel,
                  mut gens: Vec<Box<dyn CutGenerator>>|
     -> Result<f64, String> {
        let sol = cutting_loop(&mut model, &mut gens, max_rounds, tol)
            .map_err(|e| e.to_string())?;
        if sol.status != LpStatus::Optimal {
            return Err(format!("relaxation LP ended with {:?}", sol.status));
        }
        Ok(sol.objective)
    };
    match kind {
        RelaxationKind::Lef => {
            let (model, _) = build_lef(fp, bounds).map_err(|e| e.to_string())?;
            let sol = model.solve().map_err(|e| e.to_string())?;
            if sol.status != LpStatus::Optimal {
                return Err(format!("LEF LP ended with {:?}", sol.status));
            }
            Ok(sol.objective)
        }
        RelaxationKind::Cef => {
            let (model, vars) = build_lef(fp, bounds).map_err(|e| e.to_string())?;
            let sep = conic_separator(fp, bounds, &vars, ConicFamilies::Both);
            solved(model, vec![Box::new(sep)])
        }
        RelaxationKind::Rqp => {
            let (model, _, pairs) = build_rqp_split(fp, bounds).map_err(|e| e.to_string())?;
            solved(model, vec![Box::new(PoolSeparator::new(pairs))])
        }
        RelaxationKind::OneTerm => {
            let (model, _, envelope) =
                build_1term_split(fp, bounds).map_err(|e| e.to_string())?;
            solved(model, vec![Box::new(PoolSeparator::new(envelope))])
        }
        RelaxationKind::OneTermConic => {
            let (model, vars, envelope) =
                build_1term_split(fp, bounds).map_err(|e| e.to_string())?;
            let conic = conic_separator(fp, bounds, &vars, ConicFamilies::ReciprocalOnly);
            solved(
                model,
                vec![
                    Box::new(PoolSeparator::new(envelope)),
                    Box::new(conic),
                ],
            )
        }
        RelaxationKind::Kterm(k) => {
            let (model, _, rlt) =
                build_kterm_split(fp, k, KTERM_COLUMN_CAP).map_err(|e| e.to_string())?;
            solved(model, vec![Box::new(PoolSeparator::new(rlt))])
        }
    }
}

fn fractional_instance(config: &SuiteConfig, n: usize, m: usize, seed: u64) -> FractionalProgram {
    match config.experiment {
        Experiment::UniformGap => gen_uniform(n, m, seed),
        Experiment::Assortment => gen_assortment(n, m, seed),
        Experiment::Univariate => unreachable!("univariate handled separately"),
    }
}

fn run_instance(config: &SuiteConfig, n: usize, m: usize, seed: u64) -> InstanceReport {
    if config.experiment == Experiment::Univariate {
        return run_univariate_instance(config, m, seed);
    }
    let fp = fractional_instance(config, n, m, seed);
    let mut cells = Vec::new();
    let bounds = match compute_bounds(&fp) {
        Ok(b) => b,
        Err(e) => {
            for &kind in &config.relaxations {
                cells.push(RelaxationCell {
                    kind,
                    value: Err(format!("bounds failed: {e}")),
                    micros: 0,
                });
            }
            return InstanceReport {
                experiment: config.experiment,
                n,
                m,
                seed,
                cells,
                reference: None,
                univariate: None,
            };
        }
    };
    for &kind in &config.relaxations {
        let t0 = std::time::Instant::now();
        let value = relaxation_value(&fp, &bounds, kind, config.tol, config.max_rounds);
        cells.push(RelaxationCell {
            kind,
            value,
            micros: t0.elapsed().as_micros(),
        });
    }
    let reference = if n <= config.oracle_guard {
        brute_force_binary_guarded(&fp, config.oracle_guard)
            .ok()
            .map(|r| (r.value, r.method))
    } else {
        local_search_binary(&fp, 64, seed ^ 0xbead)
            .ok()
            .map(|r| (r.value, r.method))
    };
    InstanceReport {
        experiment: config.experiment,
        n,
        m,
        seed,
        cells,
        reference,
        univariate: None,
    }
}

fn run_univariate_instance(config: &SuiteConfig, m: usize, seed: u64) -> InstanceReport {
    let mut report = InstanceReport {
        experiment: config.experiment,
        n: 1,
        m,
        seed,
        cells: Vec::new(),
        reference: None,
        univariate: None,
    };
    let inst = match gen_univariate(m, seed) {
        Ok(i) => i,
        Err(e) => {
            report.cells.push(RelaxationCell {
                kind: RelaxationKind::Lef,
                value: Err(e.to_string()),
                micros: 0,
            });
            return report;
        }
    };
    let run = || -> Result<(f64, f64, f64), String> {
        let (mc_model, _) = build_uni_mc(&inst).map_err(|e| e.to_string())?;
        let mc = mc_model.solve().map_err(|e| e.to_string())?;
        let (mut mh_model, mut seps, _) = build_uni_mh(&inst).map_err(|e| e.to_string())?;
        let mh = cutting_loop(&mut mh_model, &mut seps, config.max_rounds, config.tol)
            .map_err(|e| e.to_string())?;
        let exact = univariate_exact(&inst).map_err(|e| e.to_string())?;
        Ok((mc.objective, mh.objective, exact.value))
    };
    let t0 = std::time::Instant::now();
    match run() {
        Ok((mc, mh, exact)) => {
            report.univariate = Some((mc, mh));
            report.reference = Some((exact, "grid-golden"));
            report.cells.push(RelaxationCell {
                kind: RelaxationKind::Lef,
                value: Ok(mc),
                micros: t0.elapsed().as_micros(),
            });
        }
        Err(e) => report.cells.push(RelaxationCell {
            kind: RelaxationKind::Lef,
            value: Err(e),
            micros: t0.elapsed().as_micros(),
        }),
    }
    report
}

/// Runs every (size, seed) instance, fanning out across `FRACX_THREADS`
/// workers; reports are ordered by instance index regardless of completion
/// order.
pub fn run_suite(config: &SuiteConfig) -> SuiteOutcome {
    let jobs: Vec<(usize, usize, u64)> = config
        .sizes
        .iter()
        .flat_map(|&(n, m)| config.seeds.iter().map(move |&s| (n, m, s)))
        .collect();
    let threads = std::env::var("FRACX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .min(jobs.len().max(1));
    let mut reports: Vec<Option<InstanceReport>> = vec![None; jobs.len()];
    if threads <= 1 {
        for (idx, &(n, m, seed)) in jobs.iter().enumerate() {
            reports[idx] = Some(run_instance(config, n, m, seed));
        }
    } else {
        let slots = std::sync::Mutex::new(&mut reports);
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if idx >= jobs.len() {
                        break;
                    }
                    let (n, m, seed) = jobs[idx];
                    let report = run_instance(config, n, m, seed);
                    slots.lock().unwrap()[idx] = Some(report);
                });
            }
        });
    }
    let reports: Vec<InstanceReport> = reports.into_iter().flatten().collect();
    let failures = reports
        .iter()
        .flat_map(|r| r.cells.iter())
        .filter(|c| c.value.is_err())
        .count();
    let summary = summarize(config, &reports);
    SuiteOutcome {
        reports,
        summary,
        failures,
    }
}

/// Per-(size, relaxation) statistics of the gap metric, recomputed from the
/// emitted rows.
fn summarize(config: &SuiteConfig, reports: &[InstanceReport]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &(n, m) in &config.sizes {
        if config.experiment == Experiment::Univariate {
            let gaps: Vec<f64> = reports
                .iter()
                .filter(|r| r.m == m)
                .filter_map(|r| {
                    let (mc, mh) = r.univariate?;
                    let (exact, _) = r.reference?;
                    relative_remaining_gap(mh, mc, exact).ok()
                })
                .collect();
            if let Some(row) = stats(n, m, "relative-remaining-gap", &gaps) {
                rows.push(row);
            }
            continue;
        }
        for &kind in &config.relaxations {
            if kind == RelaxationKind::Lef {
                continue;
            }
            let gaps: Vec<f64> = reports
                .iter()
                .filter(|r| r.n == n && r.m == m)
                .filter_map(|r| {
                    let lef = r
                        .cells
                        .iter()
                        .find(|c| c.kind == RelaxationKind::Lef)?
                        .value
                        .as_ref()
                        .ok()?;
                    let model = r
                        .cells
                        .iter()
                        .find(|c| c.kind == kind)?
                        .value
                        .as_ref()
                        .ok()?;
                    let (v_hat, _) = r.reference?;
                    closed_lef_gap(*lef, *model, v_hat).ok()
                })
                .collect();
            if let Some(row) = stats(n, m, &format!("closed-lef-gap {kind}"), &gaps) {
                rows.push(row);
            }
        }
    }
    rows
}

fn stats(n: usize, m: usize, label: &str, values: &[f64]) -> Option<SummaryRow> {
    if values.is_empty() {
        return None;
    }
    let count = values.len();
    let avg = values.iter().sum::<f64>() / count as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let var = values.iter().map(|v| (v - avg) * (v - avg)).sum::<f64>() / count as f64;
    Some(SummaryRow {
        n,
        m,
        label: label.to_string(),
        count,
        avg,
        min,
        max,
        std: var.sqrt(),
    })
}

/// RFC-4180 CSV of the per-(instance, relaxation) rows. Timing lives in its
/// own column so that byte-identical reproduction holds for the rest.
pub fn suite_csv(outcome: &SuiteOutcome) -> String {
    let mut out = String::new();
    let header = [
        "experiment",
        "n",
        "m",
        "seed",
        "relaxation",
        "value",
        "reference",
        "reference_method",
        "closed_lef_gap_pct",
        "relative_remaining_gap_pct",
        "time_us",
        "error",
    ];
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for r in &outcome.reports {
        let lef = r
            .cells
            .iter()
            .find(|c| c.kind == RelaxationKind::Lef)
            .and_then(|c| c.value.as_ref().ok().copied());
        for cell in &r.cells {
            let mut fields: Vec<String> = Vec::with_capacity(header.len());
            fields.push(r.experiment.name().to_string());
            fields.push(r.n.to_string());
            fields.push(r.m.to_string());
            fields.push(r.seed.to_string());
            fields.push(cell.kind.to_string());
            match &cell.value {
                Ok(v) => fields.push(format!("{v}")),
                Err(_) => fields.push(String::new()),
            }
            match r.reference {
                Some((v, method)) => {
                    fields.push(format!("{v}"));
                    fields.push(method.to_string());
                }
                None => {
                    fields.push(String::new());
                    fields.push(String::new());
                }
            }
            let closed = match (lef, &cell.value, r.reference) {
                (Some(lef), Ok(v), Some((hat, _))) if r.experiment != Experiment::Univariate => {
                    closed_lef_gap(lef, *v, hat).ok()
                }
                _ => None,
            };
            fields.push(closed.map(|g| format!("{g}")).unwrap_or_default());
            let rel = match (r.univariate, r.reference) {
                (Some((mc, mh)), Some((exact, _))) => relative_remaining_gap(mh, mc, exact).ok(),
                _ => None,
            };
            fields.push(rel.map(|g| format!("{g}")).unwrap_or_default());
            fields.push(cell.micros.to_string());
            fields.push(cell.value.as_ref().err().cloned().unwrap_or_default());
            let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
            out.push_str(&quoted.join(","));
            out.push_str("\r\n");
        }
    }
    out
}

fn csv_field(f: &str) -> String {
    if f.contains(',') || f.contains('"') || f.contains('\n') || f.contains('\r') {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_seed_list_gives_header_only_csv() {
        let mut config = SuiteConfig::new(Experiment::UniformGap);
        config.sizes = vec![(4, 1)];
        let outcome = run_suite(&config);
        let csv = suite_csv(&outcome);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("experiment,n,m,seed,relaxation"));
        assert_eq!(outcome.failures, 0);
    }

    #[test]
    fn small_uniform_suite_rows_and_summary() {
        let mut config = SuiteConfig::new(Experiment::UniformGap);
        config.sizes = vec![(5, 2)];
        config.seeds = vec![1, 2, 3];
        config.relaxations = vec![RelaxationKind::Lef, RelaxationKind::OneTermConic];
        let outcome = run_suite(&config);
        assert_eq!(outcome.failures, 0);
        assert_eq!(outcome.reports.len(), 3);
        let csv = suite_csv(&outcome);
        assert_eq!(csv.lines().count(), 1 + 3 * 2);
        // summary stats recomputable from rows; instances whose LEF bound is
        // already integral are skipped as degenerate
        assert_eq!(outcome.summary.len(), 1);
        let s = &outcome.summary[0];
        let mut gaps = Vec::new();
        for r in &outcome.reports {
            let lef = r.cells[0].value.clone().unwrap();
            let v = r.cells[1].value.clone().unwrap();
            let (hat, _) = r.reference.unwrap();
            if let Ok(g) = closed_lef_gap(lef, v, hat) {
                gaps.push(g);
            }
        }
        assert_eq!(s.count, gaps.len());
        let avg = gaps.iter().sum::<f64>() / gaps.len() as f64;
        assert!((avg - s.avg).abs() < 1e-9);
        let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - s.min).abs() < 1e-9);
    }

    #[test]
    fn csv_determinism_apart_from_timing() {
        let mut config = SuiteConfig::new(Experiment::UniformGap);
        config.sizes = vec![(5, 1)];
        config.seeds = vec![42];
        config.relaxations = vec![RelaxationKind::Lef, RelaxationKind::Cef];
        let strip_time = |csv: &str| -> String {
            csv.lines()
                .map(|line| {
                    let mut cols: Vec<&str> = line.split(',').collect();
                    if cols.len() >= 2 {
                        let t = cols.len() - 2;
                        cols[t] = "-";
                    }
                    cols.join(",")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        let a = strip_time(&suite_csv(&run_suite(&config)));
        let b = strip_time(&suite_csv(&run_suite(&config)));
        assert_eq!(a, b);
    }

    #[test]
    fn univariate_suite_produces_gaps() {
        let mut config = SuiteConfig::new(Experiment::Univariate);
        config.sizes = vec![(1, 5)];
        config.seeds = vec![5, 6];
        let outcome = run_suite(&config);
        assert_eq!(outcome.failures, 0);
        for r in &outcome.reports {
            let (mc, mh) = r.univariate.unwrap();
            let (exact, _) = r.reference.unwrap();
            assert!(mh <= mc + 1e-6, "mh {mh} mc {mc}");
            assert!(exact <= mh + 1e-6, "exact {exact} mh {mh}");
        }
    }

    #[test]
    fn relaxation_kind_parsing() {
        assert_eq!(RelaxationKind::parse("lef"), Some(RelaxationKind::Lef));
        assert_eq!(
            RelaxationKind::parse("1TERM-CONIC"),
            Some(RelaxationKind::OneTermConic)
        );
        assert_eq!(
            RelaxationKind::parse("kterm(3)"),
            Some(RelaxationKind::Kterm(3))
        );
        assert_eq!(RelaxationKind::parse("nope"), None);
    }
}
