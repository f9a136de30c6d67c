use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use refute_cli::{
    bench, bench_json, bench_threads, default_cells, render_bench_table, render_run, run, verify_text, OutputFormat,
    RunConfig,
};
use refute_core::{Algorithm, GraphClass, RangeDefinition, Registry, SearchParams};

/// Search for counter-examples to spectral graph conjectures.
///
/// Exit status: 0 if a counter-example was found or verified, 1 if not,
/// 2 on error.
#[derive(Parser, Debug)]
#[command(name = "refute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const SUBCOMMANDS: [&str; 5] = ["run", "verify", "bench", "list", "help"];

/// `refute --conjecture ...` is shorthand for `refute run --conjecture ...`.
fn with_default_subcommand(mut args: Vec<String>) -> Vec<String> {
    let first = args.get(1).map(String::as_str);
    let top_level_flag = matches!(first, Some("-h" | "--help" | "-V" | "--version"));
    if let Some(f) = first {
        if !top_level_flag && !SUBCOMMANDS.contains(&f) {
            args.insert(1, "run".to_string());
        }
    }
    args
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one search (implied when the first argument is a flag).
    Run(RunArgs),
    /// Check an edge-list file against a conjecture.
    Verify(VerifyArgs),
    /// Tabulate time-to-refutation over conjectures, algorithms and seeds.
    Bench(BenchArgs),
    /// List the registered conjectures.
    List,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Conjecture id, e.g. graffiti-197 or 197.
    #[arg(long, short)]
    conjecture: String,
    #[arg(long, short, default_value = "nmcs")]
    algorithm: Algorithm,
    /// Number of vertices the construction grows to.
    #[arg(long, short)]
    target: Option<usize>,
    /// Time budget in seconds.
    #[arg(long, short, default_value_t = 900.0)]
    budget: f64,
    /// Stop after this many evaluations.
    #[arg(long)]
    max_evaluations: Option<u64>,
    /// Random seed; drawn from the OS when omitted and always echoed.
    #[arg(long, short)]
    seed: Option<u64>,
    #[arg(long)]
    min_size: Option<usize>,
    #[arg(long)]
    class: Option<GraphClass>,
    /// Range definition for conjectures that use one: diff or distinct-count.
    #[arg(long)]
    range: Option<RangeDefinition>,
    /// Build without class restrictions and filter at acceptance.
    #[arg(long)]
    relaxed: bool,
    /// edges, dot or json.
    #[arg(long, short, default_value = "edges")]
    format: OutputFormat,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct Tuning {
    #[arg(long)]
    nmcs_level: Option<u32>,
    #[arg(long)]
    lnmcs_level: Option<u32>,
    #[arg(long)]
    lnmcs_playouts: Option<u32>,
    #[arg(long)]
    lnmcs_ratio: Option<f64>,
    #[arg(long)]
    nrpa_level: Option<u32>,
    #[arg(long)]
    nrpa_iterations: Option<u32>,
    #[arg(long)]
    nrpa_alpha: Option<f64>,
    #[arg(long)]
    uct_constant: Option<f64>,
    #[arg(long)]
    rave_ref: Option<u32>,
    #[arg(long)]
    rave_bias: Option<f64>,
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    gbfs_open_cap: Option<usize>,
    #[arg(long)]
    tree_node_cap: Option<usize>,
}

impl Tuning {
    fn apply(&self, p: &mut SearchParams) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        set!(
            nmcs_level, lnmcs_level, lnmcs_playouts, lnmcs_ratio, nrpa_level, nrpa_iterations, nrpa_alpha,
            uct_constant, rave_ref, rave_bias, beam_width, gbfs_open_cap, tree_node_cap
        );
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// File holding an edge list such as "0-1, 1-2"; `-` reads stdin.
    file: PathBuf,
    #[arg(long, short)]
    conjecture: String,
    #[arg(long)]
    range: Option<RangeDefinition>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Restrict to these conjectures (comma separated).
    #[arg(long, value_delimiter = ',')]
    conjectures: Vec<String>,
    /// Restrict to these algorithms (comma separated).
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Per-run time budget in seconds.
    #[arg(long, short, default_value_t = 900.0)]
    budget: f64,
    #[arg(long)]
    json: bool,
}

fn run_config(a: RunArgs) -> RunConfig {
    let mut params = SearchParams {
        budget_seconds: a.budget,
        max_evaluations: a.max_evaluations,
        seed: a.seed.unwrap_or_else(rand_seed),
        ..Default::default()
    };
    a.tuning.apply(&mut params);
    RunConfig {
        conjecture: a.conjecture,
        algorithm: a.algorithm,
        params,
        target_size: a.target,
        min_size: a.min_size,
        class: a.class,
        range: a.range,
        relaxed: a.relaxed,
        format: a.format,
    }
}

fn rand_seed() -> u64 {
    use std::collections::hash_map::RandomState;
    use std::hash::{BuildHasher, Hasher};
    // RandomState is keyed from OS entropy
    let mut h = RandomState::new().build_hasher();
    h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos()));
    h.finish()
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run(args) => {
            let config = run_config(args);
            let report = run(&config)?;
            print!("{}", render_run(&report, config.format));
            Ok(report.exit_code() as u8)
        }
        Command::Verify(args) => {
            let text = read_input(&args.file)?;
            let report = verify_text(&text, &args.conjecture, args.range)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json())?);
            } else {
                print!("{}", report.render());
            }
            Ok(report.exit_code() as u8)
        }
        Command::Bench(args) => {
            let registry = Registry::builtin();
            let wanted: Vec<String> = args
                .conjectures
                .iter()
                .map(|c| registry.get(c).map(|c| c.key()))
                .collect::<Result<_, _>>()?;
            let cells: Vec<_> = default_cells(args.budget)
                .into_iter()
                .filter(|c| wanted.is_empty() || wanted.contains(&c.conjecture))
                .filter(|c| args.algorithms.is_empty() || args.algorithms.contains(&c.algorithm))
                .collect();
            let rows = bench(&cells, args.seeds, bench_threads())?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&bench_json(&rows))?);
            } else {
                print!("{}", render_bench_table(&rows));
            }
            Ok(0)
        }
        Command::List => {
            for c in registry_sorted() {
                println!(
                    "{:<14} {:<14} n >= {:<3} {}",
                    c.key(),
                    c.graph_class().name(),
                    c.min_size(),
                    c.statement()
                );
            }
            Ok(0)
        }
    }
}

fn registry_sorted() -> Vec<refute_core::Conjecture> {
    Registry::builtin().iter().cloned().collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(with_default_subcommand(std::env::args().collect())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
