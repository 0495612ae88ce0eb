use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use toptw::acs::{self, AcsParams};
use toptw::bench::{self, CsvRow, SuiteReport};
use toptw::instance::{self, Instance, InstanceFormat};
use toptw::local_search::LocalSearchParams;
use toptw::model::{extract_routes, ExpandedGraph};

/// Ant Colony System solver for team orienteering problems with time windows.
#[derive(Parser)]
#[command(name = "toptw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Solve every instance of a directory several times and aggregate.
    Suite(SuiteArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file format.
    #[arg(long, default_value = "solomon")]
    format: InstanceFormat,
    /// Keep only the first K customers.
    #[arg(long, value_name = "K")]
    node_limit: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    /// Number of vehicles.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Wall-clock limit per run, in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected exploratory choices per construction.
    #[arg(long, default_value_t = 15.0)]
    nhat: f64,
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    #[arg(long, default_value_t = 0.1)]
    psi: f64,
    #[arg(long, default_value_t = 10)]
    ants: usize,
    #[arg(long, default_value_t = 3)]
    ls_init: usize,
    #[arg(long, default_value_t = 3)]
    ls_wnd: usize,
    #[arg(long, default_value_t = 2)]
    ls_step: usize,
    /// Non-improving moves accepted before a descent stops.
    #[arg(long, default_value_t = 5)]
    ni: usize,
    /// Stop after this many generations.
    #[arg(long)]
    generations: Option<u64>,
    /// Stop once this prize is reached.
    #[arg(long)]
    target: Option<f64>,
}

impl SolverArgs {
    fn params(&self, seed: u64) -> AcsParams {
        AcsParams {
            rho: self.rho,
            psi: self.psi,
            n_ants: self.ants,
            nhat: self.nhat,
            m: self.m,
            time_limit: self.time_limit,
            seed,
            ls: LocalSearchParams {
                ls_init: self.ls_init,
                ls_wnd: self.ls_wnd,
                ls_step: self.ls_step,
                ni_cap: self.ni,
            },
            max_generations: self.generations,
            target_prize: self.target,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    input: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the run as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the best routes.
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Directory of instance files.
    #[arg(long)]
    dir: PathBuf,
    /// Only these instances (file stems, comma separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[command(flatten)]
    input: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Runs per instance; run r uses seed + r.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Runs executed at the same time.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write all runs as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    input: InstanceArgs,
    /// Route listing to check.
    #[arg(long)]
    solution: PathBuf,
    /// Fleet size; limits the number of non-empty routes.
    #[arg(long)]
    m: Option<usize>,
}

fn load(path: &Path, input: &InstanceArgs) -> Result<Instance> {
    Ok(instance::load(path, input.format, input.node_limit)?)
}

fn write_rows(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    bench::write_csv(file, rows).with_context(|| format!("cannot write {}", path.display()))
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = load(&args.instance, &args.input)?;
    let params = args.solver.params(args.solver.seed);
    let (best, report) = acs::solve(&inst, &params)?;
    let graph = ExpandedGraph::new(inst.clone());
    let routes = extract_routes(&best.tour, &graph, params.m)?;
    println!("instance     {}", report.instance);
    println!("m            {}", report.m);
    println!("seed         {}", report.seed);
    println!("prize        {}", report.prize);
    println!("nodes        {}", report.nodes);
    println!("found at     {:.3} s", report.found_at_s);
    println!("elapsed      {:.3} s", report.elapsed_s);
    println!("generations  {}", report.generations);
    for (k, route) in routes.routes.iter().enumerate() {
        let ids: Vec<String> = route.iter().map(|&c| inst.node(c).id.to_string()).collect();
        println!("route {:<6} {}", k + 1, ids.join(" "));
    }
    if let Some(path) = &args.out {
        write_rows(path, &[CsvRow::new(0, &report)])?;
    }
    if let Some(path) = &args.solution_out {
        fs::write(path, bench::format_solution(&inst, &routes))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn suite(args: SuiteArgs) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .with_context(|| format!("cannot read {}", args.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
        .filter(|p| {
            args.only.is_empty()
                || p.file_stem()
                    .is_some_and(|s| args.only.iter().any(|o| s.to_string_lossy() == *o))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no instance files in {}", args.dir.display());
    }
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    args.solver.params(args.solver.seed).validate()?;

    let mut report = SuiteReport::default();
    let mut jobs = Vec::new();
    for path in &files {
        match load(path, &args.input) {
            Ok(inst) => jobs.extend((0..args.runs).map(|r| (inst.clone(), r))),
            Err(e) => report
                .failures
                .push((path.display().to_string(), format!("{e:#}"))),
        }
    }
    let results = Mutex::new(Vec::new());
    let queue = Mutex::new(jobs.into_iter().enumerate());
    std::thread::scope(|s| {
        for _ in 0..args.jobs.max(1) {
            s.spawn(|| loop {
                let Some((k, (inst, run))) = queue.lock().unwrap().next() else {
                    break;
                };
                let params = args.solver.params(args.solver.seed + run as u64);
                let out = acs::solve(&inst, &params).map(|(_, r)| CsvRow::new(run, &r));
                if let Ok(row) = &out {
                    eprintln!(
                        "{} run {}: prize {} ({} nodes) at {:.2} s",
                        row.instance, row.run, row.prize, row.nodes, row.found_at_s
                    );
                }
                results
                    .lock()
                    .unwrap()
                    .push((k, inst.name().to_string(), out));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|r| r.0);
    let mut rows = Vec::new();
    for (_, name, out) in results {
        match out {
            Ok(row) => rows.push(row),
            Err(e) => report.failures.push((name, e.to_string())),
        }
    }
    report.summaries = SuiteReport::from_rows(&rows).summaries;
    print!("{}", report.table());
    if let Some(path) = &args.out {
        write_rows(path, &rows)?;
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<()> {
    let inst = load(&args.instance, &args.input)?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("cannot read {}", args.solution.display()))?;
    let sol = bench::parse_solution(&text)?;
    let prize = bench::validate_solution(&inst, &sol, args.m)?;
    println!("valid: prize {prize}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Suite(a) => suite(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toptw: {e:#}");
            ExitCode::FAILURE
        }
    }
}
