//! Benchmark runs over a manifest.

use std::path::{Path, PathBuf};

use opal_core::eval::{evaluate, BenchmarkReport, InstanceResult};
use rayon::prelude::*;

use crate::config::Settings;
use crate::instance::{load_instance, read_manifest, InstanceError, LoadedInstance};
use crate::run::{run_loaded, Artifacts};
use crate::write_atomic;

#[derive(Debug)]
pub struct BenchOutcome {
    pub report: BenchmarkReport,
    /// Instances that could not be loaded; they are not scored.
    pub load_errors: Vec<InstanceError>,
}

fn run_one(
    li: &LoadedInstance,
    settings: &Settings,
    out_dir: Option<&Path>,
) -> Result<InstanceResult, String> {
    let (outcome, artifacts) = match run_loaded(li, settings, None) {
        Ok(run) => (run.diff(), Some(Artifacts::of(&run))),
        Err(setup) => (Err(setup), None),
    };
    let mut result = evaluate(&li.instance, outcome);
    if let (Some(dir), Some(a)) = (out_dir, artifacts) {
        let dir = dir.join("instances").join(&li.instance.id);
        a.write(&dir)
            .map_err(|e| format!("{}: {e}", dir.display()))?;
        result.trace = Some(dir.join("trace.jsonl").display().to_string());
    }
    Ok(result)
}

/// Loads and runs every instance of the manifest, `parallelism` at a time.
/// With `out_dir`, each instance's artifacts go to `instances/<id>/` and
/// the report to `report.json` and `report.txt`.
pub fn run_bench(
    manifest: &Path,
    settings: &Settings,
    out_dir: Option<&Path>,
) -> Result<BenchOutcome, String> {
    let entries = read_manifest(manifest).map_err(|e| e.to_string())?;
    let mut loaded = Vec::new();
    let mut load_errors = Vec::new();
    for (dir, meta) in entries {
        match load_instance(&dir, meta) {
            Ok(li) => loaded.push(li),
            Err(e) => load_errors.push(e),
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.engine.parallelism)
        .build()
        .map_err(|e| e.to_string())?;
    let results: Vec<InstanceResult> = pool.install(|| {
        loaded
            .par_iter()
            .map(|li| run_one(li, settings, out_dir))
            .collect::<Result<_, _>>()
    })?;
    let report = BenchmarkReport::from_results(results);
    if let Some(dir) = out_dir {
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n";
        let write = |name: &str, s: &str| -> Result<PathBuf, String> {
            let p = dir.join(name);
            write_atomic(&p, s.as_bytes()).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(p)
        };
        write("report.json", &json)?;
        write("report.txt", &format!("{report}\n"))?;
    }
    Ok(BenchOutcome {
        report,
        load_errors,
    })
}
