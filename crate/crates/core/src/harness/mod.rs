//! Instance generators, the common high-sample evaluation, and the
//! experiment runner.

mod experiment;
mod generate;

pub use experiment::{
    render_runs_csv, run_experiment, ExperimentConfig, ExperimentOutput, Method, RunRow, SummaryRow,
};
pub use generate::{evaluate_final, gen_type1, gen_type2, generate, InstanceType};
