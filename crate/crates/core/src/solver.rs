//! Fixed-point solvers built on the Krasnoselskij iteration
//! `x_{n+1} = (1−λ)x_n + λT x_n`.
//!
//! Every solver records the full trace of iterates, the residuals
//! `r_n = d(x_{n+1}, x_n)` and the successive ratios `γ_n = r_n / r_{n−1}`.
//! A sequence with `r_n ≤ γ r_{n−1}` for some `γ < 1` is Cauchy even when
//! `d` only satisfies a relaxed triangle inequality, so the ratio tail is
//! both the convergence evidence and the divergence gate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{EnrichedParams, MapSpec};
use crate::quasi_space::{QuasiNormSpec, INEQUALITY_TOL};
use crate::vector::Vector;

/// Iterates with a coordinate beyond this magnitude abort the run.
pub const OVERFLOW_LIMIT: f64 = 1e150;
/// `d(U(p), p)` must stay below `tol` times this factor in [`asymptotic_solve`].
pub const CERTIFICATION_SLACK: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_override: Option<f64>,
    pub divergence_window: usize,
    pub divergence_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 10_000,
            lambda_override: None,
            divergence_window: 20,
            divergence_margin: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if self.divergence_window == 0 {
            return Err(Error::invalid("divergence_window must be at least 1"));
        }
        if !(self.divergence_margin >= 0.0 && self.divergence_margin < 1.0) {
            return Err(Error::invalid("divergence_margin must lie in [0, 1)"));
        }
        if let Some(l) = self.lambda_override {
            if !(l > 0.0 && l <= 1.0) {
                return Err(Error::invalid(format!(
                    "lambda_override must lie in (0, 1], got {l}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub points: Vec<Vector>,
    /// `residuals[n] = d(points[n+1], points[n])`.
    pub residuals: Vec<f64>,
    /// `ratios[n-1] = residuals[n] / residuals[n-1]`, absent when the
    /// denominator is zero.
    pub ratios: Vec<Option<f64>>,
}

impl IterationTrace {
    pub fn new(x0: Vector) -> Self {
        IterationTrace {
            points: vec![x0],
            residuals: Vec::new(),
            ratios: Vec::new(),
        }
    }

    /// Append the next iterate together with its distance to the previous one.
    pub fn record(&mut self, next: Vector, residual: f64) {
        if let Some(&prev) = self.residuals.last() {
            self.ratios.push((prev > 0.0).then(|| residual / prev));
        }
        self.residuals.push(residual);
        self.points.push(next);
    }

    pub fn last_point(&self) -> &Vector {
        self.points.last().expect("trace always holds x0")
    }

    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    /// The defined ratios, in order.
    pub fn defined_ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.ratios.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub window: usize,
    pub gamma_hat: f64,
    pub is_contractive_tail: bool,
}

/// Largest ratio over the last `window` recorded ratios. Undefined ratios
/// (zero denominator) are skipped; a window without any defined ratio
/// reports `γ̂ = 0`.
pub fn cauchy_ratio_check(trace: &IterationTrace, window: usize) -> Result<CauchyReport> {
    cauchy_ratio_check_with_margin(trace, window, SolverConfig::default().divergence_margin)
}

pub fn cauchy_ratio_check_with_margin(
    trace: &IterationTrace,
    window: usize,
    margin: f64,
) -> Result<CauchyReport> {
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    if trace.residuals.len() < window + 1 {
        return Err(Error::InsufficientTrace {
            needed: window + 1,
            available: trace.residuals.len(),
        });
    }
    let tail = &trace.ratios[trace.ratios.len() - window..];
    let gamma_hat = tail.iter().flatten().copied().fold(0.0_f64, f64::max);
    Ok(CauchyReport {
        window,
        gamma_hat,
        is_contractive_tail: gamma_hat < 1.0 - margin,
    })
}

/// `Some(γ̂)` when the last full window holds only ratios `≥ 1 − margin`.
fn divergence_gate(trace: &IterationTrace, cfg: &SolverConfig) -> Option<f64> {
    let w = cfg.divergence_window;
    if trace.ratios.len() < w {
        return None;
    }
    let floor = 1.0 - cfg.divergence_margin;
    let tail = &trace.ratios[trace.ratios.len() - w..];
    let mut gamma_hat = 0.0_f64;
    for r in tail {
        match r {
            Some(g) if *g >= floor => gamma_hat = gamma_hat.max(*g),
            _ => return None,
        }
    }
    Some(gamma_hat)
}

/// A-priori estimate `‖x_{n+i−1} − p‖ ≤ cⁱ/(1−c) · ‖x_n − x_{n−1}‖`.
pub fn error_bound(c: f64, i: u32, last_residual: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::invalid(format!(
            "contraction coefficient must lie in [0, 1), got {c}"
        )));
    }
    if i == 0 {
        return Err(Error::invalid("error-bound order must be at least 1"));
    }
    if last_residual.is_nan() || last_residual < 0.0 {
        return Err(Error::invalid("residual must be nonnegative"));
    }
    Ok(c.powi(i as i32) / (1.0 - c) * last_residual)
}

/// Residuals and ratios of a trace re-measured in another quasi-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormDiagnostics {
    pub norm: QuasiNormSpec,
    pub residuals: Vec<f64>,
    pub ratios: Vec<Option<f64>>,
    pub certified_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub samples: usize,
    /// Largest observed `‖z‖_d / ‖z‖_ρ`.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub point: Vector,
    pub iterations: usize,
    /// Averaging weight actually used.
    pub lambda: f64,
    pub params: EnrichedParams,
    /// `d(T(point), point)` under the solved map.
    pub certified_residual: f64,
    /// `d(U(point), point)` for the base map of an asymptotic solve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_map_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification_threshold: Option<f64>,
    /// Contraction diagnostics in the second norm of a two-norm solve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction_norm: Option<NormDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domination: Option<DominationReport>,
    pub trace: IterationTrace,
}

/// Picard iteration of `step`, measured in `measure`.
fn iterate(
    step: &MapSpec,
    measure: &QuasiNormSpec,
    x0: Vector,
    cfg: &SolverConfig,
) -> Result<IterationTrace> {
    let mut trace = IterationTrace::new(x0);
    for it in 1..=cfg.max_iter {
        let x = trace.last_point();
        let next = match step.eval(x) {
            Ok(v) => v,
            Err(Error::NonFiniteCoordinate { .. }) => {
                return Err(Error::NumericalOverflow {
                    iteration: it,
                    trace: Box::new(trace),
                })
            }
            Err(e) => return Err(e),
        };
        let residual = measure.distance(&next, x)?;
        let blown = next.max_abs() > OVERFLOW_LIMIT || !residual.is_finite();
        trace.record(next, residual);
        if blown {
            return Err(Error::NumericalOverflow {
                iteration: it,
                trace: Box::new(trace),
            });
        }
        if residual <= cfg.tol {
            return Ok(trace);
        }
        if let Some(gamma_hat) = divergence_gate(&trace, cfg) {
            return Err(Error::DivergenceDetected {
                gamma_hat,
                trace: Box::new(trace),
            });
        }
    }
    Err(Error::MaxIterationsExceeded {
        trace: Box::new(trace),
    })
}

fn prepare(map: &MapSpec, x0: &Vector, cfg: &SolverConfig, params: &EnrichedParams) -> Result<f64> {
    cfg.validate()?;
    if let Some(n) = map.dim() {
        x0.ensure_dim(n)?;
    }
    Ok(cfg.lambda_override.unwrap_or(params.lambda))
}

/// Krasnoselskij iteration with `λ = 1/(b+1)` (or the configured override),
/// stopped once `d(x_{n+1}, x_n) ≤ tol`.
pub fn krasnoselskij_solve(
    map: &MapSpec,
    params: &EnrichedParams,
    spec: &QuasiNormSpec,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<FixedPointResult> {
    let lambda = prepare(map, x0, cfg, params)?;
    let averaged = map.averaged(lambda)?;
    let trace = iterate(&averaged, spec, x0.clone(), cfg)?;
    let point = trace.last_point().clone();
    let certified_residual = spec.distance(&map.eval(&point)?, &point)?;
    Ok(FixedPointResult {
        point,
        iterations: trace.iterations(),
        lambda,
        params: *params,
        certified_residual,
        base_map_residual: None,
        certification_threshold: None,
        contraction_norm: None,
        domination: None,
        trace,
    })
}

/// Solve with `U^N` as the enriched contraction, then confirm that the
/// limit is also fixed by `U` itself.
pub fn asymptotic_solve(
    base: &MapSpec,
    n_iter: usize,
    params: &EnrichedParams,
    spec: &QuasiNormSpec,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<FixedPointResult> {
    let power = MapSpec::power(base.clone(), n_iter)?;
    let mut result = krasnoselskij_solve(&power, params, spec, x0, cfg)?;
    let base_residual = spec.distance(&base.eval(&result.point)?, &result.point)?;
    let threshold = cfg.tol * CERTIFICATION_SLACK;
    if base_residual > threshold {
        return Err(Error::FixedPointNotSharedByU {
            residual: base_residual,
            threshold,
        });
    }
    result.base_map_residual = Some(base_residual);
    result.certification_threshold = Some(threshold);
    Ok(result)
}

/// Empirical check of `‖z‖_d ≤ ‖z‖_ρ` on the given vectors.
pub fn check_domination(
    spec_d: &QuasiNormSpec,
    spec_rho: &QuasiNormSpec,
    samples: &[Vector],
) -> Result<DominationReport> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut max_ratio = 0.0_f64;
    for z in samples {
        let d_norm = spec_d.eval(z)?;
        let rho_norm = spec_rho.eval(z)?;
        if d_norm > rho_norm * (1.0 + INEQUALITY_TOL) {
            return Err(Error::DominationViolated {
                witness: z.clone(),
                d_norm,
                rho_norm,
            });
        }
        if rho_norm > 0.0 {
            max_ratio = max_ratio.max(d_norm / rho_norm);
        }
    }
    Ok(DominationReport {
        samples: samples.len(),
        max_ratio,
    })
}

/// Two-norm solve: `T` is enriched with respect to `spec_rho`, while
/// stopping and the Cauchy gate use the dominated norm `spec_d`.
pub fn maia_solve(
    map: &MapSpec,
    spec_d: &QuasiNormSpec,
    spec_rho: &QuasiNormSpec,
    params: &EnrichedParams,
    x0: &Vector,
    cfg: &SolverConfig,
    domination_samples: &[Vector],
) -> Result<FixedPointResult> {
    let domination = check_domination(spec_d, spec_rho, domination_samples)?;
    let mut result = krasnoselskij_solve(map, params, spec_d, x0, cfg)?;

    let points = &result.trace.points;
    let residuals = points
        .windows(2)
        .map(|w| spec_rho.distance(&w[1], &w[0]))
        .collect::<Result<Vec<_>>>()?;
    let ratios = residuals
        .windows(2)
        .map(|w| (w[0] > 0.0).then(|| w[1] / w[0]))
        .collect();
    let certified_residual = spec_rho.distance(&map.eval(&result.point)?, &result.point)?;
    result.contraction_norm = Some(NormDiagnostics {
        norm: spec_rho.clone(),
        residuals,
        ratios,
        certified_residual,
    });
    result.domination = Some(domination);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub starts: usize,
    pub points: Vec<Vector>,
    pub max_pairwise_distance: f64,
}

/// Solve from every start (in parallel on the current rayon pool) and
/// report how far apart the limits land.
pub fn uniqueness_probe(
    map: &MapSpec,
    params: &EnrichedParams,
    spec: &QuasiNormSpec,
    starts: &[Vector],
    cfg: &SolverConfig,
) -> Result<UniquenessReport> {
    if starts.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let points = starts
        .par_iter()
        .map(|x0| krasnoselskij_solve(map, params, spec, x0, cfg).map(|r| r.point))
        .collect::<Result<Vec<_>>>()?;
    let mut max_pairwise_distance = 0.0_f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            max_pairwise_distance = max_pairwise_distance.max(spec.distance(p, q)?);
        }
    }
    Ok(UniquenessReport {
        starts: starts.len(),
        points,
        max_pairwise_distance,
    })
}
