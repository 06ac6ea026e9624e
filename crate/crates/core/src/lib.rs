//! Fixed-point solvers for enriched contractions in quasi-normed spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`quasi_space`]: quasi-norm catalog, induced quasimetric, structural
//!   constants and sampling-based axiom checks;
//! - [`maps`]: self-maps, the averaged transform and enriched-parameter
//!   estimation;
//! - [`solver`]: Krasnoselskij, iterate-power and two-norm solvers plus the
//!   a-priori error estimate and the ratio-tail criterion;
//! - [`export`]: CSV/JSON writers for traces and results.
//!
//! ```
//! use quasifix::{krasnoselskij_solve, EnrichedParams, MapSpec, QuasiNormSpec, SolverConfig, Vector};
//!
//! let norm = QuasiNormSpec::maligranda(2.0, 1.0)?;
//! let reflection = MapSpec::reflection(Some(2));
//! let params = EnrichedParams::new(0.5, 0.5)?;
//! let x0 = Vector::new(vec![2.0, 2.0])?;
//! let res = krasnoselskij_solve(&reflection, &params, &norm, &x0, &SolverConfig::default())?;
//! assert!((res.point.coords()[0] - 0.5).abs() < 1e-9);
//! # Ok::<(), quasifix::Error>(())
//! ```

pub mod error;
pub mod export;
pub mod expr;
pub mod maps;
pub mod quasi_space;
pub mod solver;
pub mod vector;

pub use error::{Error, Result};
pub use maps::{
    averaged_map, estimate_theta, eval_map, search_enrichment, search_enrichment_detailed,
    EnrichedParams, EnrichmentCandidate, EnrichmentSearch, MapKind, MapSpec, DEFAULT_B_GRID,
};
pub use quasi_space::{
    aoki_rolewicz_exponent, constant_for_exponent, eval_quasi_norm, induced_distance,
    quasi_triangle_constant, DomainBox, QuasiNormKind, QuasiNormSpec, SampleConfig,
};
pub use solver::{
    asymptotic_solve, cauchy_ratio_check, check_domination, error_bound, krasnoselskij_solve,
    maia_solve, uniqueness_probe, CauchyReport, FixedPointResult, IterationTrace, SolverConfig,
    UniquenessReport,
};
pub use vector::Vector;
