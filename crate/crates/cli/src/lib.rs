//! Config-driven runner behind the `nief-spectra` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod selftest;
pub mod sweep;
pub mod tasks;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{ScenarioConfig, Task};
use crate::error::RunError;
use crate::output::{json_text, Cell, Table};
use crate::tasks::Outcome;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

/// Run one scenario and return the process exit code. Errors go to stderr
/// as a single JSON line; no CSV is written unless the whole run succeeds.
pub fn run(opts: &RunOptions) -> u8 {
    let mut summary_path = None;
    match execute(opts, &mut summary_path) {
        Ok(code) => code,
        Err(e) => {
            let record = e.record();
            eprintln!("{record}");
            if let Some(p) = summary_path {
                // best effort: the primary report is on stderr
                let _ = output::write(&p, &json_text(&record));
            }
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<(Value, ScenarioConfig), RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Read { path: path.to_path_buf(), source })?;
    let raw: Value = serde_json::from_str(&text)?;
    let cfg = ScenarioConfig::from_value(raw.clone())?;
    Ok((raw, cfg))
}

fn execute(opts: &RunOptions, summary_path: &mut Option<PathBuf>) -> Result<u8, RunError> {
    let (raw, cfg) = load(&opts.config)?;
    *summary_path = Some(opts.out_dir.join(cfg.json_name()));
    let seed = opts.seed.or(cfg.seed).unwrap_or(selftest::DEFAULT_SEED);

    let work = || -> Result<(Outcome, u8), RunError> {
        match cfg.task {
            Task::Sweep => Ok((sweep::run_sweep(&raw, &cfg)?, 0)),
            Task::Selftest => {
                let checks = selftest::run_suite(seed);
                let failed = checks.iter().filter(|c| !c.passed).count();
                Ok((selftest_outcome(&checks, seed), if failed > 0 { 1 } else { 0 }))
            }
            _ => Ok((tasks::run_task(&cfg)?, 0)),
        }
    };
    let (outcome, code) = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Threads(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut summary = json!({
        "schema": output::SCHEMA_VERSION,
        "task": cfg.task.name(),
        "status": if code == 0 { "ok" } else { "failed" },
    });
    if let (Value::Object(head), Value::Object(body)) = (&mut summary, outcome.summary) {
        head.extend(body);
    }
    output::write(&opts.out_dir.join(cfg.csv_name()), &outcome.table.to_csv(cfg.output.precision))?;
    output::write(summary_path.as_ref().expect("set above"), &json_text(&summary))?;
    if code != 0 {
        let failed = summary["failed"].as_u64().unwrap_or(0) as usize;
        let e = RunError::SelftestFailed { failed };
        eprintln!("{}", e.record());
        *summary_path = None;
    }
    Ok(code)
}

fn selftest_outcome(checks: &[selftest::Check], seed: u64) -> Outcome {
    let mut table = Table::new(&["id", "name", "passed", "value", "threshold"]);
    for c in checks {
        table.push(vec![c.id.into(), Cell::Text(c.name.into()), c.passed.into(), c.measured.into(), c.limit.into()]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let summary = json!({ "seed": seed, "failed": failed, "criteria": checks });
    Outcome { table, summary, metrics: Default::default() }
}
