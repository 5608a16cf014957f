use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use interval_owa::{
    export_milp, gen_type1, gen_type2, interval_owa_exact, interval_owa_sampled, parse_instance,
    run_experiment, sample_scenarios, solve_greedy_matroid, solve_midpoint, solve_sampling,
    solve_yager, CumulativeWeight64, ExperimentConfig, InnerSolver, InstanceType, IntervalInstance64,
    Solution, WeightDensity64, DEFAULT_OWA_TOL,
};
use std::fs;
use std::path::{Path, PathBuf};

const THREADS_ENV: &str = "INTERVAL_OWA_THREADS";

#[derive(Parser)]
#[command(name = "interval-owa", version, about = "Interval OWA evaluation, solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Evaluate the interval OWA of a solution.
    Evaluate(EvaluateArgs),
    /// Solve an instance and print the report.
    Solve(SolveArgs),
    /// Write the discrete OWA MILP of a scenario sample in LP format.
    ExportMilp(ExportArgs),
    /// Run an experiment from a JSON config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance family: I or II.
    #[arg(long = "type", default_value = "I")]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Items to select; defaults to n / 2.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolutionArgs {
    /// Solution file (`{"selected": [...]}`, 1-based).
    #[arg(long, conflicts_with = "select")]
    solution: Option<PathBuf>,
    /// Comma-separated 1-based item list.
    #[arg(long)]
    select: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMethod {
    Exact,
    Sample,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solution: SolutionArgs,
    /// power:<a>, cvar:<a>, uniform or hurwicz:<mix>:<eps>.
    #[arg(long, default_value = "uniform")]
    weight: String,
    #[arg(long, value_enum, default_value = "exact")]
    method: EvalMethod,
    #[arg(long = "K", default_value_t = 100_000)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_OWA_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Sampling,
    Greedy,
    Yager,
    Midpoint,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "sampling")]
    solver: SolverKind,
    /// Inner solver of the sampling method: exact or local.
    #[arg(long, alias = "method", default_value = "exact")]
    inner: String,
    #[arg(long, default_value = "uniform")]
    weight: String,
    /// Cumulative weight for the Yager baseline: linear, power:<q>, worst or
    /// best. Defaults to the antiderivative of --weight.
    #[arg(long)]
    cumulative: Option<String>,
    #[arg(long = "K", default_value_t = 1000)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "uniform")]
    weight: String,
    #[arg(long = "K", default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the output directory of the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<IntervalInstance64> {
    parse_instance(&read(path)?).with_context(|| format!("in instance file {}", path.display()))
}

fn load_solution(args: &SolutionArgs, n: usize) -> Result<Solution> {
    match (&args.solution, &args.select) {
        (Some(path), _) => Ok(Solution::parse_json(&read(path)?, n)?),
        (None, Some(list)) => {
            let idx = list
                .split(',')
                .map(|s| {
                    let i: usize = s.trim().parse().with_context(|| format!("bad item `{s}`"))?;
                    if i == 0 {
                        bail!("items are numbered from 1");
                    }
                    Ok(i - 1)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Solution::from_indices(n, &idx)?)
        }
        (None, None) => bail!("give --solution <file> or --select <items>"),
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cumulative(spec: &str) -> Result<CumulativeWeight64> {
    Ok(match spec.split(':').collect::<Vec<_>>().as_slice() {
        ["linear"] => CumulativeWeight64::linear(),
        ["worst"] => CumulativeWeight64::worst_case(),
        ["best"] => CumulativeWeight64::best_case(),
        ["power", q] => CumulativeWeight64::power(q.parse().with_context(|| format!("bad exponent `{q}`"))?)?,
        _ => bail!("unknown cumulative weight `{spec}`; expected linear, power:<q>, worst or best"),
    })
}

fn generate(a: GenerateArgs) -> Result<()> {
    let kind: InstanceType = a.kind.parse()?;
    let inst: IntervalInstance64 = match kind {
        InstanceType::I => gen_type1(a.n, a.seed)?,
        InstanceType::II => gen_type2(a.n, a.seed)?,
    };
    let inst = match a.p {
        Some(p) => inst.with_feasibility(interval_owa::FeasibleSet::selection(a.n, p)?)?,
        None => inst,
    };
    let text = inst.to_json()? + "\n";
    match a.out {
        Some(path) => write_out(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let x = load_solution(&a.solution, inst.n())?;
    let w = WeightDensity64::parse(&a.weight)?;
    let v = match a.method {
        EvalMethod::Exact => interval_owa_exact(&inst, &w, &x, a.tol)?,
        EvalMethod::Sample => interval_owa_sampled(&inst, &w, &x, a.k, a.seed)?,
    };
    println!("{v}");
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let w = WeightDensity64::parse(&a.weight)?;
    let report = match a.solver {
        SolverKind::Sampling => {
            let inner: InnerSolver = a.inner.parse()?;
            solve_sampling(&inst, &w, a.k, a.seed, inner)?
        }
        SolverKind::Greedy => solve_greedy_matroid(&inst, &w, a.k, a.seed)?,
        SolverKind::Yager => {
            let big_w = match &a.cumulative {
                Some(spec) => cumulative(spec)?,
                None => CumulativeWeight64::from_density(&w),
            };
            solve_yager(&inst, &big_w, 1e-12)?
        }
        SolverKind::Midpoint => solve_midpoint(&inst)?,
    };
    let text = report.to_json() + "\n";
    if let Some(path) = &a.out {
        write_out(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn export(a: ExportArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let w = WeightDensity64::parse(&a.weight)?;
    let sample = sample_scenarios(&inst, a.k, a.seed)?.with_density(&w)?;
    write_out(&a.out, &export_milp(&sample, inst.feasibility())?)
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_json(&read(&a.config)?)?;
    if a.output.is_some() {
        cfg.output = a.output;
    }
    let out = run_experiment(&cfg)?;
    println!("experiment,instance_type,alpha,K,method,count,mean_objective,std_error");
    for s in &out.summary {
        println!(
            "{},{},{},{},{},{},{:.6},{:.6}",
            s.experiment,
            s.instance_type,
            s.alpha,
            s.k.map(|k| k.to_string()).unwrap_or_default(),
            s.method,
            s.count,
            s.mean,
            s.std_error
        );
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
        if threads == 0 {
            bail!("{THREADS_ENV} must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn main() -> Result<()> {
    configure_threads()?;
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Solve(a) => solve(a),
        Command::ExportMilp(a) => export(a),
        Command::Experiment(a) => experiment(a),
    }
}
