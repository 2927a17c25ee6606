//! Executes experiments on a bounded worker pool.

use crate::config::{Config, ExperimentSpec};
use crate::error::{BenchError, Result};
use crate::record::{RunRecord, TaskRecord, VerdictSummary, SCHEMA_VERSION, TOOL_VERSION};
use crate::scenarios::Ctx;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

/// Seed of task `index`: the first eight bytes of `sha256(id || seed || index)`.
pub fn task_seed(id: &str, seed: u64, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(id.as_bytes());
    h.update(seed.to_le_bytes());
    h.update((index as u64).to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Runs one experiment with at most `workers` threads.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<RunRecord> {
    let start = Instant::now();
    let need = spec.params.required_kernel_entries(&spec.model);
    if need > spec.budget.max_kernel_entries {
        return Err(BenchError::Budget(format!(
            "{}: needs {need} kernel entries, budget is {}",
            spec.id, spec.budget.max_kernel_entries
        )));
    }
    let model = spec.model.build().map_err(|e| match e {
        brlab::Error::Config(m) => BenchError::parse(format!("{}.model", spec.id), m),
        other => other.into(),
    })?;
    let ctx = Ctx { spec: &spec.model, model: &model, max_kernel_entries: spec.budget.max_kernel_entries };
    let tasks = spec.params.plan();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.clamp(1, spec.budget.max_workers))
        .build()
        .map_err(|e| BenchError::Budget(format!("worker pool: {e}")))?;
    let results: Vec<Result<TaskRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let mut rec = (t.run)(&ctx, task_seed(&spec.id, spec.seed, i))?;
                rec.name = t.name.clone();
                Ok(rec)
            })
            .collect()
    });
    let tasks = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        spec: spec.clone(),
        seed: spec.seed,
        summary: VerdictSummary::of(&tasks),
        tasks,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs every experiment in order and writes its records under `out`.
pub fn run_config(cfg: &Config, out: &Path, workers: Option<usize>) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for spec in &cfg.experiments {
        let rec = run_experiment(spec, workers.unwrap_or(spec.budget.max_workers))?;
        rec.write(out)?;
        records.push(rec);
    }
    Ok(records)
}
