//! Experiment runner: reads a TOML config, runs one named experiment over
//! its parameter grid, and writes `<out>/<experiment>.csv` plus
//! `<out>/manifest.json`.

pub mod config;
pub mod experiments;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use config::ExperimentConfig;
pub use table::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<qpspec::Error> for RunError {
    fn from(e: qpspec::Error) -> Self {
        use qpspec::Error as E;
        match e {
            E::DimensionMismatch { .. }
            | E::InvalidDynamics(_)
            | E::InvalidPotential(_)
            | E::OutsideStrip { .. }
            | E::UnsupportedDynamics(_)
            | E::Domain(_) => RunError::Validation(e.to_string()),
            _ => RunError::Numeric(e.to_string()),
        }
    }
}

/// Overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
}

/// Runs the experiment named in `config` on a dedicated worker pool.
pub fn run(mut config: ExperimentConfig, overrides: &Overrides) -> Result<RunSummary, RunError> {
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(t) = overrides.threads {
        config.threads = Some(t);
    }
    if let Some(o) = &overrides.out {
        config.out = Some(o.clone());
    }
    let experiment = experiments::find(&config.experiment).ok_or_else(|| {
        RunError::Validation(format!(
            "unknown experiment {:?}; available: {}",
            config.experiment,
            experiments::names().join(", ")
        ))
    })?;
    let threads = config.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Validation(format!("thread pool: {e}")))?;
    let started = Instant::now();
    let table = pool.install(|| (experiment.run)(&config))?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&out)?;
    let csv = out.join(format!("{}.csv", experiment.name));
    std::fs::write(&csv, table.to_csv())?;
    let manifest = out.join("manifest.json");
    let doc = json!({
        "experiment": experiment.name,
        "library_version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "threads": pool.current_num_threads(),
        "wall_clock_ms": wall_ms,
        "rows": table.rows.len(),
        "columns": table.header,
        "csv": csv.file_name().map(|s| s.to_string_lossy().into_owned()),
    });
    std::fs::write(&manifest, serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n")?;
    Ok(RunSummary {
        csv,
        manifest,
        rows: table.rows.len(),
    })
}

/// Loads a config file and runs it.
pub fn run_path(path: &Path, overrides: &Overrides) -> Result<RunSummary, RunError> {
    run(ExperimentConfig::from_path(path)?, overrides)
}

/// `(name, description)` pairs sorted by name.
pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    experiments::EXPERIMENTS.iter().map(|e| (e.name, e.doc)).collect()
}
