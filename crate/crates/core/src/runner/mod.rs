//! Batch runs: expand a [`RunConfig`] into checks, run them on a worker
//! pool, and write `report.json`, one CSV per suite and `timings.json`.

pub mod config;
pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use config::{Mode, RunConfig, Suite};
pub use report::{CheckRecord, ReportDocument, Table, Timings};

use crate::error::{Error, Result};
use crate::harmonic::BasisCache;

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check failed.
pub const EXIT_CHECK_FAILURE: i32 = 1;
/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;

pub struct RunOutput {
    pub document: ReportDocument,
    pub tables: BTreeMap<Suite, Table>,
    pub timings: Timings,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.document.all_passed() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILURE
        }
    }
}

/// Runs every selected suite. Results are identical for any `jobs`.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.jobs)))?;
    let cache = config.cache.as_ref().map(BasisCache::new).transpose()?;
    let start = Instant::now();
    let mut records = Vec::new();
    let mut tables = BTreeMap::new();
    let mut timings = Timings::default();
    for &suite in &config.suites {
        let t = Instant::now();
        let out = pool.install(|| match suite {
            Suite::Identities => suites::identities(config),
            Suite::Spectra => suites::spectra(config, cache.as_ref()),
            Suite::Bounds => suites::bounds(config, cache.as_ref()),
            Suite::Curvature => suites::curvature(config),
        })?;
        timings
            .suites
            .insert(suite.name().to_string(), t.elapsed().as_secs_f64());
        records.extend(out.records);
        tables.insert(suite, out.table);
    }
    timings.total_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        document: ReportDocument::new(config.clone(), records),
        tables,
        timings,
    })
}

/// Writes the run into a fresh `run-<unix seconds>-seed<seed>` directory
/// under `out` and returns its path.
pub fn write_outputs(output: &RunOutput, out: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let stem = format!("run-{stamp}-seed{}", output.document.config.seed);
    let mut dir = out.join(&stem);
    let mut n = 1;
    while dir.exists() {
        dir = out.join(format!("{stem}-{n}"));
        n += 1;
    }
    std::fs::create_dir(&dir).map_err(|e| Error::io(&dir, e))?;
    let report = dir.join("report.json");
    std::fs::write(&report, output.document.to_json()).map_err(|e| Error::io(&report, e))?;
    for (suite, table) in &output.tables {
        table.write_csv(&dir.join(format!("{}.csv", suite.name())))?;
    }
    let timings = dir.join("timings.json");
    let text = serde_json::to_string_pretty(&output.timings).expect("timings are serializable");
    std::fs::write(&timings, text).map_err(|e| Error::io(&timings, e))?;
    Ok(dir)
}
