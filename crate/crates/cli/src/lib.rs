//! Driver behind the `refute` binary: run searches, verify edge lists, and
//! tabulate time-to-refutation across algorithms.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use refute_core::{
    search, Algorithm, BuildState, Conjecture, EigenMethod, Graph, GraphClass, RangeDefinition, Registry,
    SearchOutcome, SearchParams, VIOLATION_EPSILON,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Edges,
    Dot,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edges" | "text" => Ok(OutputFormat::Edges),
            "dot" => Ok(OutputFormat::Dot),
            "json" => Ok(OutputFormat::Json),
            _ => bail!("unknown output format {s:?} (expected edges, dot or json)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub conjecture: String,
    pub algorithm: Algorithm,
    /// Budget and seed live here too.
    pub params: SearchParams,
    pub target_size: Option<usize>,
    pub min_size: Option<usize>,
    pub class: Option<GraphClass>,
    pub range: Option<RangeDefinition>,
    pub relaxed: bool,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(conjecture: impl Into<String>, algorithm: Algorithm) -> Self {
        RunConfig {
            conjecture: conjecture.into(),
            algorithm,
            params: SearchParams::default(),
            target_size: None,
            min_size: None,
            class: None,
            range: None,
            relaxed: false,
            format: OutputFormat::Edges,
        }
    }

    /// Applies overrides to the registered conjecture.
    pub fn resolve(&self, registry: &Registry) -> Result<Conjecture> {
        let mut conj = registry.get(&self.conjecture)?.clone();
        if let Some(m) = self.min_size {
            conj = conj.with_min_size(m)?;
        }
        if let Some(c) = self.class {
            conj = conj.with_class(c);
        }
        if let Some(r) = self.range {
            conj = conj.with_range_definition(r);
        }
        if self.relaxed {
            conj = conj.relaxed();
        }
        Ok(conj)
    }

    pub fn target(&self, conj: &Conjecture) -> usize {
        self.target_size.unwrap_or_else(|| conj.default_target())
    }
}

/// A search outcome plus the independent re-check of its best graph.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub conjecture: Conjecture,
    pub target_size: usize,
    pub outcome: SearchOutcome,
    pub verification: Option<VerifyReport>,
}

impl RunReport {
    /// Refuted by the search and confirmed by the verification pass.
    pub fn refuted(&self) -> bool {
        self.outcome.refuted && self.verification.as_ref().is_some_and(|v| v.refuted)
    }

    pub fn exit_code(&self) -> i32 {
        if self.refuted() {
            0
        } else {
            1
        }
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    run_with(&Registry::builtin(), config)
}

pub fn run_with(registry: &Registry, config: &RunConfig) -> Result<RunReport> {
    let conj = config.resolve(registry)?;
    let target = config.target(&conj);
    let start = BuildState::for_conjecture(&conj, target)?;
    let outcome = search(config.algorithm, &start, &conj, &config.params)?;
    let verification = if outcome.refuted {
        Some(verify(&outcome.best_graph, &conj)?)
    } else {
        None
    };
    Ok(RunReport {
        config: config.clone(),
        conjecture: conj,
        target_size: target,
        outcome,
        verification,
    })
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn run_json(report: &RunReport) -> Value {
    let o = &report.outcome;
    let c = &report.config;
    let p = &c.params;
    json!({
        "schema": SCHEMA_VERSION,
        "conjecture": report.conjecture.key(),
        "algorithm": o.algorithm.name(),
        "refuted": report.refuted(),
        "best_graph": {
            "n": o.best_graph.n(),
            "edges": o.best_graph.to_edge_list(),
        },
        "best_score": finite(o.best_score),
        "lhs": finite(o.lhs),
        "rhs": finite(o.rhs),
        "elapsed_seconds": o.elapsed_seconds,
        "evaluations": o.evaluations,
        "discarded": o.discarded,
        "move_history": o.move_history.iter().map(|m| format!("{m:?}")).collect::<Vec<_>>(),
        "seed": o.seed,
        "verification": report.verification.as_ref().map(VerifyReport::to_json),
        "config": {
            "target_size": report.target_size,
            "min_size": report.conjecture.min_size(),
            "class": report.conjecture.graph_class().name(),
            "accept_class": report.conjecture.accept_class().name(),
            "range": report.conjecture.range_definition().map(|r| r.name()),
            "relaxed": c.relaxed,
            "budget_seconds": finite(p.budget_seconds),
            "max_evaluations": p.max_evaluations,
            "seed": p.seed,
            "nmcs_level": p.nmcs_level,
            "lnmcs_level": p.lnmcs_level,
            "lnmcs_playouts": p.lnmcs_playouts,
            "lnmcs_ratio": p.lnmcs_ratio,
            "nrpa_level": p.nrpa_level,
            "nrpa_iterations": p.nrpa_iterations,
            "nrpa_alpha": p.nrpa_alpha,
            "uct_constant": p.uct_constant,
            "rave_ref": p.rave_ref,
            "rave_bias": p.rave_bias,
            "beam_width": p.beam_width,
            "gbfs_open_cap": p.gbfs_open_cap,
            "tree_node_cap": p.tree_node_cap,
        },
    })
}

pub fn render_run(report: &RunReport, format: OutputFormat) -> String {
    let o = &report.outcome;
    match format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&run_json(report)).expect("serializable")),
        OutputFormat::Dot => o.best_graph.to_dot(),
        OutputFormat::Edges => {
            let mut s = String::new();
            let verdict = if report.refuted() { "refuted" } else { "not refuted" };
            let _ = writeln!(s, "{} {} ({}, seed {})", report.conjecture.key(), verdict, o.algorithm, o.seed);
            let _ = writeln!(s, "n = {}, {} edges", o.best_graph.n(), o.best_graph.edge_count());
            let _ = writeln!(s, "{}", o.best_graph.to_edge_list());
            let _ = writeln!(s, "lhs = {:.6}  rhs = {:.6}  score = {:.6}", o.lhs, o.rhs, o.best_score);
            let _ = writeln!(s, "{} evaluations in {:.2} s", o.evaluations, o.elapsed_seconds);
            s
        }
    }
}

/// Result of checking one graph against one conjecture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub conjecture: String,
    pub n: usize,
    pub edges: String,
    pub connected: bool,
    pub class: String,
    pub class_ok: bool,
    pub size_ok: bool,
    pub defined: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub score: f64,
    pub refuted: bool,
}

impl VerifyReport {
    pub fn verdict(&self) -> &'static str {
        if self.refuted {
            "refuted"
        } else {
            "holds"
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.refuted {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "conjecture": self.conjecture,
            "n": self.n,
            "edges": self.edges,
            "connected": self.connected,
            "class": self.class,
            "class_ok": self.class_ok,
            "size_ok": self.size_ok,
            "defined": self.defined,
            "lhs": finite(self.lhs),
            "rhs": finite(self.rhs),
            "score": finite(self.score),
            "verdict": self.verdict(),
        })
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let yes = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(s, "conjecture: {}", self.conjecture);
        let _ = writeln!(s, "class {}: {}", self.class, yes(self.class_ok));
        let _ = writeln!(s, "connected: {}", yes(self.connected));
        let _ = writeln!(s, "n = {}", self.n);
        if self.defined {
            let _ = writeln!(s, "lhs = {:.6}\nrhs = {:.6}\nscore = {:.6}", self.lhs, self.rhs, self.score);
        } else {
            let _ = writeln!(s, "score undefined on this graph");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict());
        s
    }
}

/// Rescores `g` with the Jacobi solver, which iterates to full precision,
/// and applies every admissibility check.
pub fn verify(g: &Graph, conj: &Conjecture) -> Result<VerifyReport> {
    let conj = conj.clone().with_eigen_method(EigenMethod::Jacobi);
    let connected = g.is_connected();
    let class = conj.accept_class();
    let class_ok = class.contains(g);
    let size_ok = g.n() >= conj.min_size();
    let report = if connected && g.n() >= 2 {
        conj.score(g)?
    } else {
        refute_core::ScoreReport::undefined()
    };
    Ok(VerifyReport {
        conjecture: conj.key(),
        n: g.n(),
        edges: g.to_edge_list(),
        connected,
        class: class.name().to_string(),
        class_ok,
        size_ok,
        defined: report.defined,
        lhs: report.lhs,
        rhs: report.rhs,
        score: report.score,
        refuted: conj.accepts(g, &report, VIOLATION_EPSILON),
    })
}

/// Parses an edge list and verifies it against a registered conjecture.
pub fn verify_text(text: &str, conjecture: &str, range: Option<RangeDefinition>) -> Result<VerifyReport> {
    let registry = Registry::builtin();
    let mut conj = registry.get(conjecture)?.clone();
    if let Some(r) = range {
        conj = conj.with_range_definition(r);
    }
    let g = refute_core::parse_edge_list(text).context("parsing edge list")?;
    verify(&g, &conj)
}

/// One (conjecture, algorithm) cell of a timing table.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub conjecture: String,
    pub algorithm: Algorithm,
    pub target_size: Option<usize>,
    pub params: SearchParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRun {
    pub seed: u64,
    pub refuted: bool,
    pub elapsed_seconds: f64,
    pub evaluations: u64,
    pub best_score: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub conjecture: String,
    pub algorithm: String,
    pub target_size: usize,
    pub runs: Vec<BenchRun>,
    /// Median over all seeds, counting failures as infinitely slow; `None`
    /// when at most half the runs refuted.
    pub median_seconds: Option<f64>,
}

impl BenchRow {
    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| r.refuted).count()
    }
}

/// Median time-to-refutation, where failed runs count as infinite.
pub fn median_time(runs: &[BenchRun]) -> Option<f64> {
    let mut times: Vec<f64> = runs
        .iter()
        .map(|r| if r.refuted { r.elapsed_seconds } else { f64::INFINITY })
        .collect();
    if times.is_empty() {
        return None;
    }
    times.sort_by(f64::total_cmp);
    let k = times.len();
    let m = if k % 2 == 1 { times[k / 2] } else { (times[k / 2 - 1] + times[k / 2]) / 2.0 };
    m.is_finite().then_some(m)
}

/// Conjectures and algorithms of the default timing table.
pub fn default_cells(budget_seconds: f64) -> Vec<BenchCell> {
    let params = SearchParams { budget_seconds, ..Default::default() };
    let mut cells = Vec::new();
    for id in [289, 29, 30, 301, 137, 139, 197] {
        for algorithm in Algorithm::ALL {
            cells.push(BenchCell {
                conjecture: format!("graffiti-{id}"),
                algorithm,
                target_size: None,
                params: params.clone(),
            });
        }
    }
    cells
}

/// Worker count for bench: `REFUTE_THREADS` if set, else the core count.
pub fn bench_threads() -> usize {
    std::env::var("REFUTE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs each cell once per seed `0..seeds`. Runs are independent, so they
/// are spread over `threads` workers; results keep cell order.
pub fn bench(cells: &[BenchCell], seeds: u64, threads: usize) -> Result<Vec<BenchRow>> {
    let registry = Registry::builtin();
    let mut jobs = Vec::new();
    let mut targets = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        let conj = registry.get(&cell.conjecture)?.clone();
        let target = cell.target_size.unwrap_or_else(|| conj.default_target());
        targets.push(target);
        // deterministic strategies give the same answer for every seed
        let count = if cell.algorithm.is_deterministic() { 1 } else { seeds.max(1) };
        for seed in 0..count {
            jobs.push((ci, target, seed));
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<(usize, BenchRun)>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(ci, target, seed)) = jobs.get(j) else {
                    break;
                };
                let cell = &cells[ci];
                let run = || -> Result<BenchRun> {
                    let conj = registry.get(&cell.conjecture)?;
                    let start = BuildState::for_conjecture(conj, target)?;
                    let params = SearchParams { seed, ..cell.params.clone() };
                    let o = search(cell.algorithm, &start, conj, &params)?;
                    Ok(BenchRun {
                        seed,
                        refuted: o.refuted,
                        elapsed_seconds: o.elapsed_seconds,
                        evaluations: o.evaluations,
                        best_score: o.best_score.is_finite().then_some(o.best_score),
                    })
                };
                let r = run().map(|b| (ci, b));
                results.lock().expect("no worker panics while holding the lock")[j] = Some(r);
            });
        }
    });

    let mut rows: Vec<BenchRow> = cells
        .iter()
        .zip(&targets)
        .map(|(cell, &target)| BenchRow {
            conjecture: cell.conjecture.clone(),
            algorithm: cell.algorithm.name().to_string(),
            target_size: target,
            runs: Vec::new(),
            median_seconds: None,
        })
        .collect();
    for r in results.into_inner().map_err(|_| anyhow!("bench worker panicked"))? {
        let (ci, run) = r.ok_or_else(|| anyhow!("bench job did not run"))??;
        rows[ci].runs.push(run);
    }
    for row in &mut rows {
        row.median_seconds = median_time(&row.runs);
    }
    Ok(rows)
}

pub fn render_bench_table(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>6} {:<7} {:>8} {:>9}", "conjecture", "target", "algo", "success", "median s");
    for r in rows {
        let median = r.median_seconds.map_or("-".to_string(), |m| format!("{m:.2}"));
        let _ = writeln!(
            s,
            "{:<14} {:>6} {:<7} {:>5}/{:<2} {:>9}",
            r.conjecture,
            r.target_size,
            r.algorithm,
            r.successes(),
            r.runs.len(),
            median
        );
    }
    s
}

pub fn bench_json(rows: &[BenchRow]) -> Value {
    json!({ "schema": SCHEMA_VERSION, "rows": rows })
}
