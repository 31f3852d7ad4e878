//! Parameter sweeps over homophily and minority size.
//!
//! A sweep expands into one network per (cell, f_m, replicate); every
//! requested recommender runs on its own copy of that network. All seeds are
//! derived from the job coordinates, so a job's rows do not depend on which
//! other jobs ran or in which order.

pub mod extract;
pub mod records;
pub mod summary;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dpah::{generate, DpahParams};
use crate::embedding::N2VParams;
use crate::error::{Error, Result};
use crate::pagerank::DEFAULT_ALPHA;
use crate::recommenders::{RecommenderKind, ZeroScorePolicy, DEFAULT_COT_SIZE};
use crate::rng::{derive_seed, grid_coord, Purpose};
use crate::simulation::{run_with, DEFAULT_STEPS};
use crate::SCHEMA_VERSION;

pub use extract::{extract, Figure, Table};
pub use records::{read_records, tidy_rows, write_records, RecordTable, RunInfo, TidyRecord, COLUMNS};
pub use summary::{summarize, CellKey, CellSummary, Stat, Summary};

pub const RECORDS_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Declarative sweep definition, read from TOML. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Values for both h_mm and h_MM; the sweep covers their full product
    /// unless `cells` is given.
    pub homophily_grid: Vec<f64>,
    /// Explicit (h_mm, h_MM) cells, overriding `homophily_grid`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<[f64; 2]>>,
    pub fm_values: Vec<f64>,
    pub replicates: usize,
    pub recommenders: Vec<String>,
    pub base_seed: u64,
    pub n: usize,
    pub density: f64,
    pub gamma_m: f64,
    #[serde(rename = "gamma_M")]
    pub gamma_maj: f64,
    pub steps: usize,
    pub alpha: f64,
    pub cot_size: usize,
    pub zero_scores: ZeroScorePolicy,
    pub n2v: N2VParams,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            homophily_grid: (0..=10).map(|k| k as f64 / 10.0).collect(),
            cells: None,
            fm_values: vec![0.3],
            replicates: 4,
            recommenders: RecommenderKind::NAMES.iter().map(|s| s.to_string()).collect(),
            base_seed: 0,
            n: 1000,
            density: 0.03,
            gamma_m: 2.5,
            gamma_maj: 2.5,
            steps: DEFAULT_STEPS,
            alpha: DEFAULT_ALPHA,
            cot_size: DEFAULT_COT_SIZE,
            zero_scores: ZeroScorePolicy::Exclude,
            n2v: N2VParams::default(),
        }
    }
}

/// One network of the sweep together with the recommenders run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkJob {
    pub h_mm: f64,
    pub h_maj: f64,
    pub f_m: f64,
    pub replicate: usize,
    pub gen_seed: u64,
}

/// Failure of a whole network (generation) or a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub h_mm: f64,
    #[serde(rename = "h_MM")]
    pub h_maj: f64,
    pub f_m: f64,
    pub replicate: usize,
    /// `None` when the network itself could not be generated.
    pub recommender: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub rows: usize,
    pub runs_expected: usize,
    pub runs_completed: usize,
    pub failed: Vec<Failure>,
    pub records: String,
    pub config: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records_path: PathBuf,
    pub manifest_path: PathBuf,
    pub config_path: PathBuf,
    pub rows: usize,
    pub failed: Vec<Failure>,
}

impl SweepSpec {
    /// Full 11 x 11 homophily grid at f_m = 0.3.
    pub fn rq2() -> Self {
        SweepSpec::default()
    }

    /// Four homophily regimes crossed with f_m in {0.1, 0.2, 0.3, 0.4}.
    pub fn rq3() -> Self {
        SweepSpec {
            cells: Some(vec![[0.2, 0.2], [0.2, 0.8], [0.8, 0.2], [0.8, 0.8]]),
            fm_values: vec![0.1, 0.2, 0.3, 0.4],
            ..SweepSpec::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "rq2" => Ok(Self::rq2()),
            "rq3" => Ok(Self::rq3()),
            other => Err(Error::Config(format!("unknown preset {other:?} (expected rq2 or rq3)"))),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let cells = self.cell_list();
        if cells.is_empty() {
            return bad("sweep has no homophily cells".into());
        }
        if self.fm_values.is_empty() {
            return bad("fm_values is empty".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.recommenders.is_empty() {
            return bad("no recommenders requested".into());
        }
        self.recommender_kinds()?;
        for &[h_mm, h_maj] in &cells {
            for &f_m in &self.fm_values {
                self.dpah_params(h_mm, h_maj, f_m, 0).validate()?;
            }
        }
        Ok(())
    }

    /// (h_mm, h_MM) cells in sweep order.
    pub fn cell_list(&self) -> Vec<[f64; 2]> {
        match &self.cells {
            Some(c) => c.clone(),
            None => self
                .homophily_grid
                .iter()
                .flat_map(|&a| self.homophily_grid.iter().map(move |&b| [a, b]))
                .collect(),
        }
    }

    pub fn recommender_kinds(&self) -> Result<Vec<RecommenderKind>> {
        self.recommenders.iter().map(|name| self.recommender(name)).collect()
    }

    /// The named recommender with this spec's parameters.
    pub fn recommender(&self, name: &str) -> Result<RecommenderKind> {
        let kind = match name.parse::<RecommenderKind>()? {
            RecommenderKind::Ppr { .. } => RecommenderKind::Ppr { alpha: self.alpha },
            RecommenderKind::Wtf { .. } => RecommenderKind::Wtf {
                alpha: self.alpha,
                cot_size: self.cot_size,
            },
            RecommenderKind::N2v(_) => RecommenderKind::N2v(self.n2v.clone()),
            other => other,
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn dpah_params(&self, h_mm: f64, h_maj: f64, f_m: f64, replicate: usize) -> DpahParams {
        DpahParams {
            n: self.n,
            f_m,
            h_mm,
            h_maj,
            gamma_m: self.gamma_m,
            gamma_maj: self.gamma_maj,
            density: self.density,
            seed: generation_seed(self.base_seed, h_mm, h_maj, f_m, replicate),
        }
    }

    /// Networks in output order: f_m, then h_mm, h_MM, then replicate.
    pub fn network_jobs(&self) -> Vec<NetworkJob> {
        let cells = self.cell_list();
        let mut jobs = Vec::new();
        for &f_m in &self.fm_values {
            for &[h_mm, h_maj] in &cells {
                for replicate in 0..self.replicates {
                    jobs.push(NetworkJob {
                        h_mm,
                        h_maj,
                        f_m,
                        replicate,
                        gen_seed: generation_seed(self.base_seed, h_mm, h_maj, f_m, replicate),
                    });
                }
            }
        }
        jobs
    }

    pub fn expected_cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for name in &self.recommenders {
            for &f_m in &self.fm_values {
                for [h_mm, h_maj] in self.cell_list() {
                    out.push(CellKey {
                        recommender: name.clone(),
                        h_mm,
                        h_maj,
                        f_m,
                    });
                }
            }
        }
        out
    }

    /// Rows the sweep produces when nothing fails.
    pub fn expected_rows(&self) -> usize {
        self.cell_list().len() * self.fm_values.len() * self.replicates * self.recommenders.len() * (self.steps + 1)
    }
}

pub fn generation_seed(base: u64, h_mm: f64, h_maj: f64, f_m: f64, replicate: usize) -> u64 {
    derive_seed(
        base,
        Purpose::Sweep,
        &[grid_coord(h_mm), grid_coord(h_maj), grid_coord(f_m), replicate as u64],
    )
}

pub fn simulation_seed(gen_seed: u64, recommender: &str) -> u64 {
    let tag = recommender.bytes().fold(0u64, |acc, b| acc.wrapping_mul(257).wrapping_add(b as u64));
    derive_seed(gen_seed, Purpose::Sweep, &[tag])
}

pub fn run_id(recommender: &str, h_mm: f64, h_maj: f64, f_m: f64, replicate: usize) -> String {
    use records::fmt_float as f;
    format!("{recommender}_hmm{}_hMM{}_fm{}_r{replicate}", f(h_mm), f(h_maj), f(f_m))
}

fn run_on(
    spec: &SweepSpec,
    job: &NetworkJob,
    base: &crate::DirectedGraph,
    name: &str,
) -> Result<Vec<TidyRecord>> {
    let kind = spec.recommender(name)?;
    let name = kind.name();
    let seed = simulation_seed(job.gen_seed, name);
    let mut g = base.clone();
    let mut rec = kind.build()?;
    let steps = run_with(&mut g, rec.as_mut(), spec.steps, seed, spec.zero_scores)?;
    let info = RunInfo {
        run_id: run_id(name, job.h_mm, job.h_maj, job.f_m, job.replicate),
        recommender: name.to_string(),
        h_mm: job.h_mm,
        h_maj: job.h_maj,
        f_m: job.f_m,
        replicate: job.replicate,
        seed,
    };
    Ok(tidy_rows(&info, &steps))
}

fn generate_for(spec: &SweepSpec, job: &NetworkJob) -> Result<crate::DirectedGraph> {
    let params = spec.dpah_params(job.h_mm, job.h_maj, job.f_m, job.replicate);
    params.check_reachable()?;
    generate(&params)
}

/// Rows of a single (cell, replicate, recommender), computed in isolation.
pub fn run_cell(
    spec: &SweepSpec,
    h_mm: f64,
    h_maj: f64,
    f_m: f64,
    replicate: usize,
    recommender: &str,
) -> Result<Vec<TidyRecord>> {
    let job = NetworkJob {
        h_mm,
        h_maj,
        f_m,
        replicate,
        gen_seed: generation_seed(spec.base_seed, h_mm, h_maj, f_m, replicate),
    };
    let g = generate_for(spec, &job)?;
    run_on(spec, &job, &g, recommender)
}

/// Run every job with `workers` threads and return the rows in sweep order.
pub fn execute(spec: &SweepSpec, workers: usize) -> Result<(Vec<TidyRecord>, Vec<Failure>)> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let jobs = spec.network_jobs();
    let total = jobs.len();
    let results: Vec<(Vec<TidyRecord>, Vec<Failure>)> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(k, job)| {
                let failure = |rec: Option<&str>, e: &Error| Failure {
                    h_mm: job.h_mm,
                    h_maj: job.h_maj,
                    f_m: job.f_m,
                    replicate: job.replicate,
                    recommender: rec.map(str::to_string),
                    reason: e.to_string(),
                };
                let g = match generate_for(spec, job) {
                    Ok(g) => g,
                    Err(e) => {
                        log::warn!("network {}/{total} failed: {e}", k + 1);
                        return (Vec::new(), vec![failure(None, &e)]);
                    }
                };
                let mut rows = Vec::new();
                let mut failed = Vec::new();
                for name in &spec.recommenders {
                    match run_on(spec, job, &g, name) {
                        Ok(r) => rows.extend(r),
                        Err(e) => {
                            log::warn!("{name} on network {}/{total} failed: {e}", k + 1);
                            failed.push(failure(Some(name), &e));
                        }
                    }
                }
                log::info!(
                    "network {}/{total} done (h_mm={}, h_MM={}, f_m={}, replicate {})",
                    k + 1,
                    job.h_mm,
                    job.h_maj,
                    job.f_m,
                    job.replicate
                );
                (rows, failed)
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failed.extend(f);
    }
    Ok((rows, failed))
}

/// Run a sweep and write records, manifest and config echo into `out_dir`.
pub fn run_sweep(spec: &SweepSpec, workers: usize, out_dir: impl AsRef<Path>) -> Result<SweepOutcome> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let config_path = out_dir.join(CONFIG_FILE);
    std::fs::write(&config_path, spec.to_toml()).map_err(|e| Error::io(&config_path, e))?;

    let (rows, failed) = execute(spec, workers)?;
    let records_path = out_dir.join(RECORDS_FILE);
    write_records(&records_path, &rows)?;

    let runs_expected = spec.network_jobs().len() * spec.recommenders.len();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        rows: rows.len(),
        runs_expected,
        runs_completed: rows.len() / (spec.steps + 1),
        failed: failed.clone(),
        records: RECORDS_FILE.into(),
        config: CONFIG_FILE.into(),
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let body = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&manifest_path, body + "\n").map_err(|e| Error::io(&manifest_path, e))?;

    Ok(SweepOutcome {
        records_path,
        manifest_path,
        config_path,
        rows: rows.len(),
        failed,
    })
}
