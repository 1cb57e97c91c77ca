//! Parameter sweeps: re-run a base task with one scalar of the scenario
//! replaced by each listed value.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ScenarioConfig, SweepSpec};
use crate::error::RunError;
use crate::output::{Cell, Table};
use crate::tasks::{metrics_cells, run_task, Metrics, Outcome};

pub const COLUMNS: [&str; 6] =
    ["value", "window_count", "deepest_gain", "sum_rule_residual", "power_figure", "f1_min_position"];

/// Mutable reference to the number at `path` (dot separated; array
/// elements by index).
fn lookup<'a>(root: &'a mut Value, path: &str) -> Result<&'a mut Value, RunError> {
    let mut node = root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| RunError::Config(format!("sweep.parameter {path:?} does not name a field")))?;
    }
    if !node.is_number() {
        return Err(RunError::Config(format!("sweep.parameter {path:?} is not a numeric field")));
    }
    Ok(node)
}

/// The scenario for one sweep value.
pub fn instance(raw: &Value, spec: &SweepSpec, value: f64) -> Result<ScenarioConfig, RunError> {
    let mut doc = raw.clone();
    let x = if spec.squared { value.sqrt() } else { value };
    *lookup(&mut doc, &spec.parameter)? = json!(x);
    let obj = doc.as_object_mut().expect("checked by the schema");
    obj.insert("task".into(), json!(spec.task));
    obj.remove("sweep");
    ScenarioConfig::from_value(doc)
}

pub fn run_sweep(raw: &Value, cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let spec = cfg.require(&cfg.sweep, "sweep")?;
    // resolve the path once so a bad path fails before any work
    lookup(&mut raw.clone(), &spec.parameter)?;
    let results: Vec<Result<Metrics, RunError>> =
        spec.values.par_iter().map(|&v| instance(raw, spec, v).and_then(|c| run_task(&c)).map(|o| o.metrics)).collect();
    let metrics: Vec<Metrics> = results.into_iter().collect::<Result<_, _>>()?;

    let mut table = Table::new(&COLUMNS);
    for (&v, m) in spec.values.iter().zip(&metrics) {
        let mut row = vec![Cell::Num(v)];
        row.extend(metrics_cells(m));
        table.push(row);
    }
    let transitions: Vec<Value> = metrics
        .windows(2)
        .zip(spec.values.windows(2))
        .filter(|(m, _)| m[0].window_count != m[1].window_count)
        .map(|(m, v)| json!({ "from": v[0], "to": v[1], "window_count": [m[0].window_count, m[1].window_count] }))
        .collect();
    let summary = json!({
        "parameter": spec.parameter,
        "squared": spec.squared,
        "base_task": spec.task,
        "values": spec.values.len(),
        "window_count_transitions": transitions,
    });
    Ok(Outcome { table, summary, metrics: Metrics::default() })
}
