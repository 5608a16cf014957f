use crate::instance::Solution;
use crate::scalar::Scalar;
use serde_json::{json, Map, Value};

/// Outcome of one solver call.
#[derive(Debug, Clone)]
pub struct SolveReport<F> {
    pub solution: Solution,
    /// Objective under the solver's own criterion (discrete OWA on its
    /// sample, Yager value, midpoint cost, ...).
    pub reported_objective: F,
    pub solver: String,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    /// Seconds.
    pub wall_time: f64,
    pub params: Vec<(String, String)>,
}

impl<F: Scalar> SolveReport<F> {
    pub(crate) fn new(solver: &str, solution: Solution, reported_objective: F) -> Self {
        Self {
            solution,
            reported_objective,
            solver: solver.to_string(),
            k: None,
            seed: None,
            wall_time: 0.0,
            params: Vec::new(),
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn param_value(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// JSON report; selected items are 1-based.
    pub fn to_json(&self) -> String {
        let selected: Vec<usize> = self.solution.indices().iter().map(|i| i + 1).collect();
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        serde_json::to_string_pretty(&json!({
            "solver": self.solver,
            "selected": selected,
            "reported_objective": self.reported_objective.as_f64(),
            "K": self.k,
            "seed": self.seed,
            "wall_time_s": self.wall_time,
            "params": params,
        }))
        .expect("report serializes")
    }
}
