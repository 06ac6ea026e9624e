//! Executes one experiment and writes its artifacts.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use quasifix::export::{format_number, to_json, trace_to_csv};
use quasifix::quasi_space::{
    check_homogeneity, check_p_norm, check_quasi_triangle, check_separation, check_series_bound,
    probe_pairs, uniform_in_box, uniform_pairs, uniform_scalars, uniform_term_lists,
    uniform_vectors, HomogeneityReport, PNormReport, QuasiTriangleReport, SeparationReport,
};
use quasifix::{
    aoki_rolewicz_exponent, asymptotic_solve, estimate_theta, krasnoselskij_solve, maia_solve,
    search_enrichment_detailed, uniqueness_probe, EnrichedParams, EnrichmentSearch,
    FixedPointResult, MapSpec, QuasiNormSpec, SampleConfig, UniquenessReport, Vector,
    DEFAULT_B_GRID,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{ExperimentConfig, Mode};
use crate::error::RunError;

pub const TRACE_FILE: &str = "trace.csv";
pub const RESULT_FILE: &str = "result.json";
pub const REPORT_FILE: &str = "report.json";
pub const DIAGNOSTIC_FILE: &str = "diagnostic.json";

/// Number of random term lists in the series-bound check.
pub const SERIES_LISTS: usize = 1000;
pub const SERIES_MAX_LEN: usize = 10;

/// How the enrichment parameters of a solve were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamsSource {
    Given,
    Analytic,
    Estimated,
    Search,
}

/// Schema of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub mode: Mode,
    pub status: String,
    pub norm: QuasiNormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_norm: Option<QuasiNormSpec>,
    pub map: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_iterate: Option<usize>,
    pub params_source: ParamsSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<EnrichmentSearch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<UniquenessReport>,
    #[serde(flatten)]
    pub result: FixedPointResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub lists: usize,
    pub max_len: usize,
    pub holds: bool,
    pub intermediate_holds: bool,
    /// Largest `lhs / rhs` over all lists.
    pub worst_ratio: f64,
}

/// Schema of `report.json` in `verify_norm` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: Mode,
    pub status: String,
    pub norm: QuasiNormSpec,
    pub dim: usize,
    pub samples: SampleConfig,
    /// Quasi-norm axioms with the claimed constant, plus the series bound.
    pub holds: bool,
    #[serde(rename = "claimed_C")]
    pub claimed_c: f64,
    #[serde(rename = "empirical_C")]
    pub empirical_c: f64,
    pub quasi_triangle: QuasiTriangleReport,
    pub homogeneity: HomogeneityReport,
    pub separation: SeparationReport,
    pub series_bound: SeriesSummary,
    pub aoki_rolewicz_exponent: f64,
    /// The p-norm inequality at the exponent above; informational only.
    pub p_norm: PNormReport,
}

/// Schema of `report.json` in `estimate` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: Mode,
    pub status: String,
    pub norm: QuasiNormSpec,
    pub map: MapSpec,
    pub samples: SampleConfig,
    pub b_grid: Vec<f64>,
    pub search: EnrichmentSearch,
}

/// The one-line summary printed after a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub mode: String,
    pub status: String,
    pub point: Option<Vector>,
    pub iters: Option<usize>,
    pub residual: Option<f64>,
    pub extra: Vec<(&'static str, String)>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode={} status={}", self.mode, self.status)?;
        if let Some(p) = &self.point {
            let coords: Vec<_> = p.coords().iter().map(|c| format_number(*c)).collect();
            write!(f, " point=[{}]", coords.join(","))?;
        }
        if let Some(k) = self.iters {
            write!(f, " iters={k}")?;
        }
        if let Some(r) = self.residual {
            write!(f, " residual={}", format_number(r))?;
        }
        for (k, v) in &self.extra {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

struct Artifacts {
    files: Vec<(&'static str, String)>,
    summary: Summary,
}

/// Load `config_path`, run it into `out_dir` and report what happened.
/// Failures still produce an [`Outcome`]; only the exit code differs.
pub fn run(config_path: &Path, out_dir: &Path, jobs: Option<usize>) -> Outcome {
    match ExperimentConfig::load(config_path) {
        Ok(cfg) => run_config(&cfg, out_dir, jobs),
        Err(e) => fail("unknown", e, out_dir),
    }
}

pub fn run_config(cfg: &ExperimentConfig, out_dir: &Path, jobs: Option<usize>) -> Outcome {
    let mode = cfg.mode.as_str();
    let executed = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Config(format!("cannot start {n} workers: {e}")))
            .and_then(|pool| pool.install(|| execute(cfg))),
        None => execute(cfg),
    };
    let artifacts = match executed {
        Ok(a) => a,
        Err(e) => return fail(mode, e, out_dir),
    };
    match write_all(out_dir, &artifacts.files) {
        Ok(files) => Outcome {
            exit_code: 0,
            summary: artifacts.summary,
            files,
        },
        Err(e) => fail(mode, e, out_dir),
    }
}

fn fail(mode: &str, err: RunError, out_dir: &Path) -> Outcome {
    let mut summary = Summary {
        mode: mode.to_owned(),
        status: err.status().to_owned(),
        ..Summary::default()
    };
    let mut files = vec![(DIAGNOSTIC_FILE, to_json(&diagnostic(mode, &err)))];
    if let RunError::Solver(e) = &err {
        if let Some(trace) = e.trace() {
            summary.point = Some(trace.last_point().clone());
            summary.iters = Some(trace.iterations());
            summary.residual = trace.residuals.last().copied();
            files.push((TRACE_FILE, trace_to_csv(trace)));
        }
    }
    summary
        .extra
        .push(("error", format!("{:?}", err.to_string())));
    let exit_code = err.exit_code();
    let files = match write_all(out_dir, &files) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            Vec::new()
        }
    };
    Outcome {
        exit_code,
        summary,
        files,
    }
}

fn diagnostic(mode: &str, err: &RunError) -> serde_json::Value {
    use quasifix::Error as E;
    let details = match err {
        RunError::Solver(e) => {
            let mut d = match e {
                E::DivergenceDetected { gamma_hat, .. } => json!({ "gamma_hat": gamma_hat }),
                E::NumericalOverflow { iteration, .. } => json!({ "iteration": iteration }),
                E::FixedPointNotSharedByU {
                    residual,
                    threshold,
                } => json!({ "residual": residual, "threshold": threshold }),
                E::DominationViolated {
                    witness,
                    d_norm,
                    rho_norm,
                } => json!({ "witness": witness, "d_norm": d_norm, "rho_norm": rho_norm }),
                _ => json!({}),
            };
            if let Some(t) = e.trace() {
                d["iterations"] = json!(t.iterations());
                d["last_point"] = json!(t.last_point());
                d["residuals"] = json!(t.residuals);
            }
            d
        }
        _ => json!({}),
    };
    json!({
        "mode": mode,
        "status": err.status(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
        "details": details,
    })
}

/// Write every file atomically and drop stale artifacts of earlier runs.
fn write_all(dir: &Path, files: &[(&'static str, String)]) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for stale in [TRACE_FILE, RESULT_FILE, REPORT_FILE, DIAGNOSTIC_FILE] {
        let path = dir.join(stale);
        if !files.iter().any(|(n, _)| *n == stale) && path.exists() {
            std::fs::remove_file(&path).map_err(io(&path))?;
        }
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let target = dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
        tmp.write_all(contents.as_bytes()).map_err(io(&target))?;
        tmp.as_file().sync_all().map_err(io(&target))?;
        tmp.persist(&target).map_err(|e| io(&target)(e.error))?;
        written.push(target);
    }
    Ok(written)
}

fn execute(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    match cfg.mode {
        Mode::Solve | Mode::Asymptotic | Mode::Maia => solve(cfg),
        Mode::Estimate => estimate(cfg),
        Mode::VerifyNorm => verify_norm(cfg),
    }
}

/// Pairs drawn from the sampling box, consecutive points paired up.
fn sample_pairs(cfg: &ExperimentConfig) -> Result<Vec<(Vector, Vector)>, RunError> {
    let pts = uniform_in_box(
        &cfg.sampling_box()?,
        2 * cfg.samples.count,
        cfg.samples.seed,
    );
    Ok(pts
        .chunks_exact(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect())
}

struct Resolved {
    params: EnrichedParams,
    source: ParamsSource,
    search: Option<EnrichmentSearch>,
}

fn resolve_params(
    cfg: &ExperimentConfig,
    target: &MapSpec,
    norm: &QuasiNormSpec,
) -> Result<Resolved, RunError> {
    let given = cfg.params.clone().unwrap_or_default();
    if let Some(b) = given.b {
        if let Some(theta) = given.theta {
            let params = EnrichedParams::new(b, theta).map_err(RunError::from)?;
            return Ok(Resolved {
                params,
                source: ParamsSource::Given,
                search: None,
            });
        }
        let (theta, source) = match target.analytic_theta(b) {
            Some(t) => (t, ParamsSource::Analytic),
            None => (
                estimate_theta(target, b, norm, &sample_pairs(cfg)?)?,
                ParamsSource::Estimated,
            ),
        };
        if theta.is_nan() || theta >= b + 1.0 {
            return Err(RunError::NoEnrichment);
        }
        return Ok(Resolved {
            params: EnrichedParams::new(b, theta)?,
            source,
            search: None,
        });
    }
    let grid = given.b_grid.unwrap_or_else(|| DEFAULT_B_GRID.to_vec());
    let search = search_enrichment_detailed(target, norm, &grid, &sample_pairs(cfg)?)?;
    let params = search.selected.ok_or(RunError::NoEnrichment)?;
    Ok(Resolved {
        params,
        source: ParamsSource::Search,
        search: Some(search),
    })
}

fn solve(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let map = cfg.map()?;
    let x0 = cfg.start_point()?;
    let norm = &cfg.norm;
    let (result, resolved, uniqueness) = match cfg.mode {
        Mode::Solve => {
            let r = resolve_params(cfg, map, norm)?;
            let result = krasnoselskij_solve(map, &r.params, norm, &x0, &cfg.solver)?;
            let uniqueness = match cfg.uniqueness_starts {
                Some(k) if k > 0 => {
                    let starts = uniform_in_box(&cfg.sampling_box()?, k, cfg.samples.seed);
                    Some(uniqueness_probe(
                        map,
                        &r.params,
                        norm,
                        &starts,
                        &cfg.solver,
                    )?)
                }
                _ => None,
            };
            (result, r, uniqueness)
        }
        Mode::Asymptotic => {
            let n = cfg.n_iterate.expect("validated");
            let power = MapSpec::power(map.clone(), n)?;
            let r = resolve_params(cfg, &power, norm)?;
            let result = asymptotic_solve(map, n, &r.params, norm, &x0, &cfg.solver)?;
            (result, r, None)
        }
        Mode::Maia => {
            let rho = cfg.second_norm.as_ref().expect("validated");
            let r = resolve_params(cfg, map, rho)?;
            let samples = uniform_vectors(cfg.dim()?, &cfg.samples);
            let result = maia_solve(map, norm, rho, &r.params, &x0, &cfg.solver, &samples)?;
            (result, r, None)
        }
        Mode::Estimate | Mode::VerifyNorm => unreachable!("not a solve mode"),
    };

    let summary = Summary {
        mode: cfg.mode.as_str().to_owned(),
        status: "ok".to_owned(),
        point: Some(result.point.clone()),
        iters: Some(result.iterations),
        residual: Some(result.certified_residual),
        extra: uniqueness
            .as_ref()
            .map(|u| vec![("spread", format_number(u.max_pairwise_distance))])
            .unwrap_or_default(),
    };
    let csv = trace_to_csv(&result.trace);
    let file = ResultFile {
        mode: cfg.mode,
        status: "ok".to_owned(),
        norm: norm.clone(),
        second_norm: cfg.second_norm.clone(),
        map: map.clone(),
        n_iterate: cfg.n_iterate.filter(|_| cfg.mode == Mode::Asymptotic),
        params_source: resolved.source,
        search: resolved.search,
        uniqueness,
        result,
    };
    Ok(Artifacts {
        files: vec![(TRACE_FILE, csv), (RESULT_FILE, to_json(&file))],
        summary,
    })
}

fn estimate(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let map = cfg.map()?;
    let grid = cfg
        .params
        .as_ref()
        .and_then(|p| p.b_grid.clone().or_else(|| p.b.map(|b| vec![b])))
        .unwrap_or_else(|| DEFAULT_B_GRID.to_vec());
    let search = search_enrichment_detailed(map, &cfg.norm, &grid, &sample_pairs(cfg)?)?;
    let extra = match &search.selected {
        Some(p) => vec![
            ("b", format_number(p.b)),
            ("theta", format_number(p.theta)),
            ("c", format_number(p.c)),
        ],
        None => vec![("selected", "none".to_owned())],
    };
    let report = EstimateReport {
        mode: cfg.mode,
        status: "ok".to_owned(),
        norm: cfg.norm.clone(),
        map: map.clone(),
        samples: cfg.samples,
        b_grid: grid,
        search,
    };
    Ok(Artifacts {
        files: vec![(REPORT_FILE, to_json(&report))],
        summary: Summary {
            mode: cfg.mode.as_str().to_owned(),
            status: "ok".to_owned(),
            extra,
            ..Summary::default()
        },
    })
}

/// Every axiom and bound check on seeded samples for one norm.
pub fn verify_report(
    norm: &QuasiNormSpec,
    dim: usize,
    samples: &SampleConfig,
) -> Result<VerifyReport, RunError> {
    let mut pairs = uniform_pairs(dim, samples);
    pairs.extend(probe_pairs(dim));
    let vectors = uniform_vectors(dim, samples);
    let scalars = uniform_scalars(samples.range, samples.count, samples.seed.wrapping_add(1));
    let scaled: Vec<_> = scalars.into_iter().zip(vectors.iter().cloned()).collect();

    let quasi_triangle = check_quasi_triangle(norm, &pairs)?;
    let homogeneity = check_homogeneity(norm, &scaled)?;
    let separation = check_separation(norm, &vectors)?;
    let exponent = aoki_rolewicz_exponent(norm.constant())?;
    let p_norm = check_p_norm(norm, exponent, &pairs)?;

    let series_cfg = SampleConfig {
        seed: samples.seed.wrapping_add(2),
        ..*samples
    };
    let mut series = SeriesSummary {
        lists: SERIES_LISTS,
        max_len: SERIES_MAX_LEN,
        holds: true,
        intermediate_holds: true,
        worst_ratio: 0.0,
    };
    for terms in uniform_term_lists(dim, SERIES_LISTS, SERIES_MAX_LEN, &series_cfg) {
        let r = check_series_bound(norm, &terms, terms.len())?;
        series.holds &= r.holds;
        series.intermediate_holds &= r.intermediate_holds;
        if r.rhs > 0.0 {
            series.worst_ratio = series.worst_ratio.max(r.lhs / r.rhs);
        }
    }

    let holds = quasi_triangle.violation_of_claimed_c.is_none()
        && homogeneity.holds
        && separation.holds
        && series.holds
        && series.intermediate_holds;
    Ok(VerifyReport {
        mode: Mode::VerifyNorm,
        status: "ok".to_owned(),
        norm: norm.clone(),
        dim,
        samples: *samples,
        holds,
        claimed_c: quasi_triangle.claimed_c,
        empirical_c: quasi_triangle.empirical_c,
        quasi_triangle,
        homogeneity,
        separation,
        series_bound: series,
        aoki_rolewicz_exponent: exponent,
        p_norm,
    })
}

fn verify_norm(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let report = verify_report(&cfg.norm, cfg.dim()?, &cfg.samples)?;
    let summary = Summary {
        mode: cfg.mode.as_str().to_owned(),
        status: "ok".to_owned(),
        extra: vec![
            ("holds", report.holds.to_string()),
            ("empirical_C", format_number(report.empirical_c)),
            ("claimed_C", format_number(report.claimed_c)),
        ],
        ..Summary::default()
    };
    Ok(Artifacts {
        files: vec![(REPORT_FILE, to_json(&report))],
        summary,
    })
}
