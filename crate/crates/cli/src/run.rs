//! `trackpilot run`: one episode, or a parallel sweep of episodes.

use crate::files::{self, MetricsFile};
use crate::sweep::{self, SweepRange};
use crate::{exit_code, severity};
use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use trackpilot_core::simulator::{run_episode_with, EpisodeOptions, ScenarioSpec};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub dump_observations: bool,
    pub dump_plans: bool,
    pub sweeps: Vec<SweepRange>,
}

impl RunConfig {
    fn options(&self) -> EpisodeOptions {
        EpisodeOptions {
            record_observations: self.dump_observations,
            record_plans: self.dump_plans,
        }
    }
}

/// One row of `sweep.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub dir: String,
    pub params: Vec<(String, f64)>,
    pub result: MetricsFile,
}

/// Runs `spec` and writes every artifact into `dir`.
pub fn run_into(spec: &ScenarioSpec, dir: &Path, options: EpisodeOptions) -> Result<MetricsFile> {
    let out = run_episode_with(spec, options)
        .with_context(|| format!("running scenario {:?}", spec.name))?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    };
    write(files::TRACE_FILE, &out.trace.frames_jsonl())?;
    write(files::XY_FILE, &out.trace.xy_csv())?;
    write(files::SCENARIO_FILE, &spec.to_json())?;
    let summary = MetricsFile {
        scenario: spec.name.clone(),
        seed: spec.seed,
        status: out.trace.status,
        metrics: out.metrics,
        end: out.trace.end.clone(),
    };
    write(files::METRICS_FILE, &serde_json::to_string_pretty(&summary)?)?;
    if options.record_observations {
        files::write_jsonl(&dir.join(files::OBSERVATIONS_FILE), &out.observations)?;
    }
    if options.record_plans {
        files::write_jsonl(&dir.join(files::PLANS_FILE), &out.plans)?;
    }
    Ok(summary)
}

/// Returns the process exit code for the episode outcome(s).
pub fn cmd_run(config: &RunConfig) -> Result<i32> {
    let mut spec = files::load_scenario(&config.scenario)?;
    if let Some(seed) = config.seed {
        spec.seed = seed;
    }
    if config.sweeps.is_empty() {
        let summary = run_into(&spec, &config.out, config.options())?;
        crate::print_json(&summary)?;
        return Ok(exit_code(summary.status));
    }

    let base: Value = serde_json::from_str(&spec.to_json())?;
    let specs = sweep::grid(&config.sweeps)
        .into_iter()
        .map(|point| {
            let mut doc = base.clone();
            for (key, v) in &point {
                sweep::set_field(&mut doc, key, *v)?;
            }
            let s = ScenarioSpec::from_json(&doc.to_string())
                .with_context(|| format!("sweep point {}", sweep::label(&point)))?;
            Ok((point, s))
        })
        .collect::<Result<Vec<_>>>()?;

    let entries = specs
        .par_iter()
        .map(|(point, s)| {
            let dir = sweep::label(point);
            let result = run_into(s, &config.out.join(&dir), config.options())?;
            Ok(SweepEntry {
                dir,
                params: point.clone(),
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let path = config.out.join(files::SWEEP_FILE);
    fs::write(&path, serde_json::to_string_pretty(&entries)?)
        .with_context(|| format!("writing {}", path.display()))?;
    let worst = entries
        .iter()
        .map(|e| e.result.status)
        .max_by_key(|s| severity(*s))
        .expect("sweep grid is nonempty");
    let digest: Vec<Value> = entries
        .iter()
        .map(|e| {
            serde_json::json!({
                "dir": e.dir,
                "status": e.result.status,
                "min_clearance": e.result.metrics.min_clearance,
                "boundary_violations": e.result.metrics.boundary_violations,
            })
        })
        .collect();
    crate::print_json(&digest)?;
    Ok(exit_code(worst))
}

pub fn load_sweep(path: &Path) -> Result<Vec<SweepEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
