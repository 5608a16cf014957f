use super::generate::{evaluate_final, generate, InstanceType};
use crate::discrete::ENUMERATION_CAP;
use crate::error::{OwaError, Result};
use crate::instance::{binomial, FeasibleSet, IntervalInstance};
use crate::report::SolveReport;
use crate::rng::{derive_seed, tags};
use crate::solvers::{solve_greedy_matroid, solve_midpoint, solve_sampling, solve_yager, InnerSolver};
use crate::weights::{make_power_weight, CumulativeWeight};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Mutex;

const YAGER_QUAD_TOL: f64 = 1e-12;

const RUNS_HEADER: &str = "experiment,instance_type,n,p,alpha,K,instance_id,method,objective,wall_time_s,seed";

/// Settings of one experiment run. Missing fields take the desk-scale
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// 1: sampling vs greedy over K; 2: greedy against the baselines;
    /// 3: all methods across risk attitudes.
    pub experiment: u8,
    pub n: usize,
    pub p: usize,
    pub instance_type: InstanceType,
    pub instances: usize,
    /// Exponents of the power weight `α (1-t)^(α-1)`.
    pub alphas: Vec<f64>,
    #[serde(rename = "K_values")]
    pub k_values: Vec<usize>,
    #[serde(rename = "K_eval")]
    pub k_eval: usize,
    pub seed: u64,
    /// Directory receiving `runs.csv` and `summary.csv`.
    pub output: Option<PathBuf>,
    pub inner: String,
    /// Whether experiments 2 and 3 also run the sampling method.
    pub include_sampling: bool,
    /// Fill the wall-time column; off by default because timings make the
    /// CSV output differ between otherwise identical runs.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: 1,
            n: 12,
            p: 6,
            instance_type: InstanceType::I,
            instances: 20,
            alphas: vec![1.5, 5.0],
            k_values: vec![10, 25, 50, 100],
            k_eval: 100_000,
            seed: 1,
            output: None,
            inner: "exact".into(),
            include_sampling: true,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OwaError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn inner_solver(&self) -> Result<InnerSolver> {
        self.inner.parse()
    }

    fn runs_sampling(&self) -> bool {
        self.experiment == 1 || self.include_sampling
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(OwaError::Validation(m));
        if !(1..=3).contains(&self.experiment) {
            return fail(format!("experiment must be 1, 2 or 3, got {}", self.experiment));
        }
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.p > self.n {
            return fail(format!("p = {} exceeds n = {}", self.p, self.n));
        }
        if self.instances == 0 {
            return fail("instances must be at least 1".into());
        }
        if self.k_values.is_empty() {
            return fail("K_values must not be empty".into());
        }
        if self.k_values.contains(&0) || self.k_eval == 0 {
            return fail("every K and K_eval must be at least 1".into());
        }
        if self.alphas.is_empty() {
            return fail("alphas must not be empty".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 1.0 && a.is_finite())) {
            return fail(format!("power weight exponent must be finite and at least 1, got {a}"));
        }
        let inner = self.inner_solver()?;
        if self.runs_sampling() && inner == InnerSolver::Exact && binomial(self.n, self.p) > ENUMERATION_CAP {
            return fail(format!(
                "exact inner solving needs C({}, {}) <= {ENUMERATION_CAP}; use inner = \"local\"",
                self.n, self.p
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Sampling,
    Greedy,
    Yager,
    Midpoint,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sampling => "sampling",
            Method::Greedy => "greedy",
            Method::Yager => "yager",
            Method::Midpoint => "midpoint",
        })
    }
}

/// One solver call, scored by the common final evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub experiment: u8,
    pub instance_type: InstanceType,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub k: Option<usize>,
    pub instance_id: usize,
    pub method: Method,
    pub objective: f64,
    pub wall_time: Option<f64>,
    pub seed: Option<u64>,
}

impl RunRow {
    fn csv_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.instance_type,
            self.n,
            self.p,
            self.alpha,
            opt(self.k.map(|k| k.to_string())),
            self.instance_id,
            self.method,
            self.objective,
            opt(self.wall_time.map(|t| format!("{t:.6}"))),
            opt(self.seed.map(|s| s.to_string())),
        )
    }
}

/// Mean final objective of one (alpha, K, method) group over instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: u8,
    pub instance_type: InstanceType,
    pub alpha: f64,
    pub k: Option<usize>,
    pub method: Method,
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean across instances.
    pub std_error: f64,
    pub mean_wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentOutput {
    pub fn group(&self, alpha: f64, k: Option<usize>, method: Method) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.alpha == alpha && s.k == k && s.method == method)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    alpha: f64,
    k: Option<usize>,
    instance: usize,
    method: Method,
}

fn plan(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &alpha in &cfg.alphas {
        for &k in &cfg.k_values {
            for instance in 0..cfg.instances {
                let mut methods = vec![Method::Greedy];
                if cfg.runs_sampling() {
                    methods.insert(0, Method::Sampling);
                }
                for method in methods {
                    cells.push(Cell { alpha, k: Some(k), instance, method });
                }
            }
        }
        if cfg.experiment != 1 {
            for instance in 0..cfg.instances {
                for method in [Method::Yager, Method::Midpoint] {
                    cells.push(Cell { alpha, k: None, instance, method });
                }
            }
        }
    }
    cells
}

/// Writes rows in cell order however the cells finish.
struct OrderedSink {
    next: usize,
    pending: BTreeMap<usize, RunRow>,
    rows: Vec<RunRow>,
    file: Option<BufWriter<File>>,
}

impl OrderedSink {
    fn push(&mut self, idx: usize, row: RunRow) -> Result<()> {
        self.pending.insert(idx, row);
        while let Some(row) = self.pending.remove(&self.next) {
            if let Some(f) = self.file.as_mut() {
                writeln!(f, "{}", row.csv_line())?;
                f.flush()?;
            }
            self.rows.push(row);
            self.next += 1;
        }
        Ok(())
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    inner: InnerSolver,
    instances: &[(IntervalInstance<f64>, u64)],
    cell: Cell,
) -> Result<RunRow> {
    let (inst, inst_seed) = &instances[cell.instance];
    let w = make_power_weight(cell.alpha)?;
    let solver_seed = derive_seed(cfg.seed, tags::SOLVER, cell.instance as u64);
    let (report, seed): (SolveReport<f64>, Option<u64>) = match (cell.method, cell.k) {
        (Method::Sampling, Some(k)) => (solve_sampling(inst, &w, k, solver_seed, inner)?, Some(solver_seed)),
        (Method::Greedy, Some(k)) => (solve_greedy_matroid(inst, &w, k, solver_seed)?, Some(solver_seed)),
        (Method::Yager, _) => (
            solve_yager(inst, &CumulativeWeight::from_density(&w), YAGER_QUAD_TOL)?,
            None,
        ),
        (Method::Midpoint, _) => (solve_midpoint(inst)?, None),
        _ => unreachable!("sampled methods always carry K"),
    };
    let objective = evaluate_final(inst, &w, &report.solution, cfg.k_eval, *inst_seed)?;
    Ok(RunRow {
        experiment: cfg.experiment,
        instance_type: cfg.instance_type,
        n: cfg.n,
        p: cfg.p,
        alpha: cell.alpha,
        k: cell.k,
        instance_id: cell.instance + 1,
        method: cell.method,
        objective,
        wall_time: cfg.record_timing.then_some(report.wall_time),
        seed,
    })
}

fn summarize(cfg: &ExperimentConfig, rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(usize, Option<usize>, Method)> = Vec::new();
    let mut groups: BTreeMap<(usize, Option<usize>, Method), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        let ai = cfg.alphas.iter().position(|a| *a == r.alpha).expect("alpha from config");
        let key = (ai, r.k, r.method);
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).expect("inserted").push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let count = g.len();
            let mean = g.iter().map(|r| r.objective).sum::<f64>() / count as f64;
            let std_error = if count > 1 {
                let var = g.iter().map(|r| (r.objective - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            let mean_wall_time = cfg
                .record_timing
                .then(|| g.iter().filter_map(|r| r.wall_time).sum::<f64>() / count as f64);
            SummaryRow {
                experiment: cfg.experiment,
                instance_type: cfg.instance_type,
                alpha: cfg.alphas[key.0],
                k: key.1,
                method: key.2,
                count,
                mean,
                std_error,
                mean_wall_time,
            }
        })
        .collect()
}

/// CSV text of the per-run rows, header included.
pub fn render_runs_csv(rows: &[RunRow]) -> String {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

fn write_summary(path: &std::path::Path, summary: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "experiment",
        "instance_type",
        "alpha",
        "K",
        "method",
        "count",
        "mean_objective",
        "std_error",
        "mean_wall_time_s",
    ])?;
    for s in summary {
        w.write_record([
            s.experiment.to_string(),
            s.instance_type.to_string(),
            s.alpha.to_string(),
            s.k.map(|k| k.to_string()).unwrap_or_default(),
            s.method.to_string(),
            s.count.to_string(),
            s.mean.to_string(),
            s.std_error.to_string(),
            s.mean_wall_time.map(|t| format!("{t:.6}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every (alpha, K, instance, method) cell, in parallel, and scores
/// each returned solution with [`evaluate_final`]. Instances, solver samples
/// and final evaluation draw from separate streams of the base seed. When
/// an output directory is configured, `runs.csv` grows one flushed row at a
/// time in cell order and `summary.csv` is written at the end.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let inner = cfg.inner_solver()?;
    let instances: Vec<(IntervalInstance<f64>, u64)> = (0..cfg.instances)
        .map(|i| {
            let s = derive_seed(cfg.seed, tags::INSTANCE, i as u64);
            let inst = generate::<f64>(cfg.instance_type, cfg.n, s)?
                .with_feasibility(FeasibleSet::selection(cfg.n, cfg.p)?)?;
            Ok((inst, s))
        })
        .collect::<Result<_>>()?;
    let file = match &cfg.output {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut f = BufWriter::new(File::create(dir.join("runs.csv"))?);
            writeln!(f, "{RUNS_HEADER}")?;
            f.flush()?;
            Some(f)
        }
        None => None,
    };
    let cells = plan(cfg);
    let sink = Mutex::new(OrderedSink {
        next: 0,
        pending: BTreeMap::new(),
        rows: Vec::with_capacity(cells.len()),
        file,
    });
    cells
        .par_iter()
        .enumerate()
        .try_for_each(|(idx, cell)| {
            let row = run_cell(cfg, inner, &instances, *cell)?;
            sink.lock().expect("sink lock").push(idx, row)
        })?;
    let rows = sink.into_inner().expect("sink lock").rows;
    let summary = summarize(cfg, &rows);
    if let Some(dir) = &cfg.output {
        write_summary(&dir.join("summary.csv"), &summary)?;
    }
    Ok(ExperimentOutput { rows, summary })
}
