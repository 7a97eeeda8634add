//! Batch runs of several methods over several instances, written as CSV.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, GenSpec};
use crate::instance::Instance;
use crate::ledger::{objective_value, EvaluationLedger};
use crate::method::{solve, Method, MethodOptions};
use crate::report::SolveReport;
use crate::subsolver::{brute_force_solve, lattice_size, SubSolution, DEFAULT_BRUTE_FORCE_CAP};

pub const BRUTE_FORCE_CAP_ENV: &str = "RALLOC_BRUTE_FORCE_CAP";

pub const CSV_HEADER: [&str; 10] =
    ["instance_id", "method", "objective", "lb", "ub", "evals", "iterations", "opt_gap", "wall_ms", "terminated_early"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Path(PathBuf),
    Generated(GenSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    /// Name used in the `method` column; defaults to the identifier.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub options: MethodOptions,
}

impl MethodSpec {
    pub fn new(method: Method, options: MethodOptions) -> Self {
        MethodSpec { method, label: None, options }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.method.id().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub instances: Vec<InstanceSource>,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub include_brute_force: bool,
    /// Directory for one report JSON per row.
    #[serde(default)]
    pub trace_dir: Option<PathBuf>,
}

impl SuiteConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: SuiteConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for src in &mut config.instances {
            if let InstanceSource::Path(p) = src {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        for p in [&mut config.output, &mut config.trace_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

/// One CSV row. Empty fields mark values that are unavailable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub method: String,
    pub objective: Option<f64>,
    pub lb: Option<f64>,
    pub ub: Option<f64>,
    pub evals: Option<usize>,
    pub iterations: Option<usize>,
    pub opt_gap: Option<f64>,
    pub wall_ms: Option<f64>,
    pub terminated_early: Option<bool>,
    #[serde(skip)]
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<SolveReport>,
}

impl ResultRow {
    fn failed(instance_id: String, method: String, error: String) -> Self {
        ResultRow {
            instance_id,
            method,
            objective: None,
            lb: None,
            ub: None,
            evals: None,
            iterations: None,
            opt_gap: None,
            wall_ms: None,
            terminated_early: None,
            error: Some(error),
            report: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResults {
    pub rows: Vec<ResultRow>,
}

impl SuiteResults {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Cap on lattice points for brute force, from the environment if set.
pub fn brute_force_cap() -> Result<u128> {
    match std::env::var(BRUTE_FORCE_CAP_ENV) {
        Ok(v) => {
            v.trim().parse().map_err(|_| Error::Config(format!("{BRUTE_FORCE_CAP_ENV} = `{v}` is not an integer")))
        }
        Err(_) => Ok(DEFAULT_BRUTE_FORCE_CAP),
    }
}

fn instance_id(index: usize, src: &InstanceSource) -> String {
    match src {
        InstanceSource::Path(p) => {
            p.file_stem().map_or_else(|| format!("instance{index}"), |s| s.to_string_lossy().into_owned())
        }
        InstanceSource::Generated(g) => {
            let family =
                serde_json::to_value(g.family).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            format!("{family}_n{}_seed{}", g.n, g.seed)
        }
    }
}

fn load(src: &InstanceSource) -> Result<Instance> {
    match src {
        InstanceSource::Path(p) => Instance::load(p),
        InstanceSource::Generated(g) => generate(g),
    }
}

/// `z(x, f)` recomputed from the cost table, independent of the ledger.
pub fn audited_objective(instance: &Instance, report: &SolveReport) -> Result<f64> {
    objective_value(&report.allocation, |i, k| (k <= instance.cap(i)).then(|| instance.cost(i, k)))
}

fn run_row(
    instance_id: &str,
    instance: &Instance,
    spec: &MethodSpec,
    optimum: Option<&SubSolution>,
    trace_dir: Option<&Path>,
) -> ResultRow {
    let label = spec.label();
    let mut ledger = EvaluationLedger::new(instance);
    let clock = Instant::now();
    let outcome = solve(instance, &mut ledger, spec.method, &spec.options);
    let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    let report = match outcome {
        Ok(r) => r,
        Err(e) => return ResultRow::failed(instance_id.to_string(), label, e.to_string()),
    };
    let objective = match audited_objective(instance, &report) {
        Ok(z) => z,
        Err(e) => return ResultRow::failed(instance_id.to_string(), label, e.to_string()),
    };
    let opt_gap = optimum.filter(|_| report.feasible).map(|s| objective - s.value);
    if let Some(dir) = trace_dir {
        let file = dir.join(format!("{}__{}.json", sanitize(instance_id), sanitize(&label)));
        if let Err(e) = std::fs::write(&file, report.to_json_string()) {
            eprintln!("warning: could not write {}: {e}", file.display());
        }
    }
    ResultRow {
        instance_id: instance_id.to_string(),
        method: label,
        objective: Some(objective),
        lb: Some(report.objective_lower),
        ub: Some(report.objective_upper),
        evals: Some(report.evals),
        iterations: Some(report.iterations),
        opt_gap,
        wall_ms: Some((wall_ms * 1e3).round() / 1e3),
        terminated_early: Some(report.terminated_early),
        error: None,
        report: Some(report),
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

type Prepared = std::result::Result<(Instance, Option<SubSolution>), String>;

/// Runs every (instance, method) pair with a fresh ledger each. Rows come
/// back in config order regardless of scheduling; failures are captured per
/// row and reported on stderr.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteResults> {
    let cap = brute_force_cap()?;
    if let Some(dir) = &config.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let prepared: Vec<(String, Prepared)> = config
        .instances
        .par_iter()
        .enumerate()
        .map(|(idx, src)| {
            let id = instance_id(idx, src);
            let loaded = load(src).map_err(|e| e.to_string()).map(|inst| {
                let optimum = (config.include_brute_force && lattice_size(&inst) <= cap)
                    .then(|| brute_force_solve(&inst, cap).ok())
                    .flatten();
                (inst, optimum)
            });
            (id, loaded)
        })
        .collect();

    let jobs: Vec<(usize, usize)> =
        (0..prepared.len()).flat_map(|i| (0..config.methods.len()).map(move |m| (i, m))).collect();
    let rows: Vec<ResultRow> = jobs
        .par_iter()
        .map(|&(i, m)| {
            let (id, loaded) = &prepared[i];
            let spec = &config.methods[m];
            match loaded {
                Ok((inst, optimum)) => run_row(id, inst, spec, optimum.as_ref(), config.trace_dir.as_deref()),
                Err(e) => ResultRow::failed(id.clone(), spec.label(), e.clone()),
            }
        })
        .collect();
    for row in &rows {
        if let Some(e) = &row.error {
            eprintln!("error: {} / {}: {e}", row.instance_id, row.method);
        }
    }
    Ok(SuiteResults { rows })
}
