//! Self-maps, the averaged transform `T_λ = (1−λ)I + λT`, and empirical
//! estimation of enriched-contraction constants.
//!
//! `T` is a `(b, θ)`-enriched contraction when
//! `‖b(x−y) + Tx − Ty‖ ≤ θ‖x−y‖` for all `x, y`, with `b ≥ 0` and
//! `0 ≤ θ < b+1`. Choosing `λ = 1/(b+1)` turns this into an ordinary
//! contraction of `T_λ` with coefficient `c = λθ`.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quasi_space::{DomainBox, QuasiNormSpec};
use crate::vector::Vector;

/// Default grid of `b` values tried by [`search_enrichment`].
pub const DEFAULT_B_GRID: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 9.0];

/// The quadruple `(b, θ, λ, c)` with `λ = 1/(b+1)` and `c = θ/(b+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnrichedParams {
    pub b: f64,
    pub theta: f64,
    pub lambda: f64,
    pub c: f64,
}

impl EnrichedParams {
    pub fn new(b: f64, theta: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invalid(format!(
                "b must be finite and >= 0, got {b}"
            )));
        }
        if !(theta.is_finite() && theta >= 0.0 && theta < b + 1.0) {
            return Err(Error::invalid(format!(
                "theta must lie in [0, b+1) = [0, {}), got {theta}",
                b + 1.0
            )));
        }
        let lambda = 1.0 / (b + 1.0);
        Ok(EnrichedParams {
            b,
            theta,
            lambda,
            c: theta / (b + 1.0),
        })
    }
}

impl Serialize for EnrichedParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EnrichedParams", 4)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("theta", &self.theta)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("c", &self.c)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for EnrichedParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            b: f64,
            theta: f64,
            // derived; accepted for round-tripping and ignored
            #[allow(dead_code)]
            lambda: Option<f64>,
            #[allow(dead_code)]
            c: Option<f64>,
        }
        let raw = Raw::deserialize(d)?;
        EnrichedParams::new(raw.b, raw.theta).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `x ↦ Ax + v`.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vector,
    },
    /// `x ↦ (1−x₁, …, 1−xₙ)`.
    Reflection { dim: Option<usize> },
    /// Scalar map: `0` on `(−∞, 2]`, `−1/3` on `(2, ∞)`.
    Step,
    /// `inner` applied `n_iter` times.
    Power { inner: Box<MapSpec>, n_iter: usize },
    /// One formula per output coordinate.
    Expression {
        sources: Vec<String>,
        exprs: Vec<Expr>,
    },
    /// `(1−λ)x + λ·inner(x)`.
    Averaged { inner: Box<MapSpec>, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    kind: MapKind,
    /// Advisory sampling region; never enforced during iteration.
    domain: Option<DomainBox>,
}

impl MapSpec {
    fn build(kind: MapKind, domain: Option<DomainBox>) -> Result<Self> {
        let map = MapSpec { kind, domain };
        if let (Some(bx), Some(n)) = (&map.domain, map.dim()) {
            if bx.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bx.dim(),
                });
            }
        }
        Ok(map)
    }

    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vector) -> Result<Self> {
        let n = offset.dim();
        if matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(Error::invalid("affine matrix entries must be finite"));
            }
        }
        Self::build(MapKind::Affine { matrix, offset }, None)
    }

    /// `x ↦ αx` on `R^dim`.
    pub fn scalar(alpha: f64, dim: usize) -> Result<Self> {
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { alpha } else { 0.0 }).collect())
            .collect();
        Self::affine(matrix, Vector::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(1.0, dim).expect("identity is valid")
    }

    pub fn reflection(dim: Option<usize>) -> Self {
        MapSpec {
            kind: MapKind::Reflection { dim },
            domain: None,
        }
    }

    pub fn step() -> Self {
        MapSpec {
            kind: MapKind::Step,
            domain: None,
        }
    }

    pub fn power(inner: MapSpec, n_iter: usize) -> Result<Self> {
        if n_iter == 0 {
            return Err(Error::invalid("iterate power must be at least 1"));
        }
        Self::build(
            MapKind::Power {
                inner: Box::new(inner),
                n_iter,
            },
            None,
        )
    }

    /// Map `R^n → R^n` with `n` = number of formulas; variables are `x1..xn`.
    pub fn expression<S: AsRef<str>>(formulas: &[S]) -> Result<Self> {
        if formulas.is_empty() {
            return Err(Error::invalid("expression map needs at least one formula"));
        }
        let n = formulas.len();
        let mut exprs = Vec::with_capacity(n);
        for f in formulas {
            let e = Expr::parse(f.as_ref())?;
            if let Some(i) = e.max_var() {
                if i >= n {
                    return Err(Error::ExpressionParse {
                        position: 0,
                        message: format!("unknown variable x{} in a map on R^{n}", i + 1),
                    });
                }
            }
            exprs.push(e);
        }
        Self::build(
            MapKind::Expression {
                sources: formulas.iter().map(|f| f.as_ref().to_owned()).collect(),
                exprs,
            },
            None,
        )
    }

    pub fn with_domain(self, domain: DomainBox) -> Result<Self> {
        Self::build(self.kind, Some(domain))
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> Option<&DomainBox> {
        self.domain.as_ref()
    }

    /// Dimension the map is pinned to, if any.
    pub fn dim(&self) -> Option<usize> {
        let own = match &self.kind {
            MapKind::Affine { offset, .. } => Some(offset.dim()),
            MapKind::Reflection { dim } => *dim,
            MapKind::Step => Some(1),
            MapKind::Power { inner, .. } | MapKind::Averaged { inner, .. } => inner.dim(),
            MapKind::Expression { exprs, .. } => Some(exprs.len()),
        };
        own.or_else(|| self.domain.as_ref().map(DomainBox::dim))
    }

    /// `Tx`.
    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        if let Some(n) = self.dim() {
            x.ensure_dim(n)?;
        }
        match &self.kind {
            MapKind::Affine { matrix, offset } => Vector::new(
                matrix
                    .iter()
                    .zip(offset.coords())
                    .map(|(row, v)| {
                        row.iter()
                            .zip(x.coords())
                            .map(|(a, xi)| a * xi)
                            .sum::<f64>()
                            + v
                    })
                    .collect(),
            ),
            MapKind::Reflection { .. } => Vector::new(x.coords().iter().map(|c| 1.0 - c).collect()),
            MapKind::Step => {
                let v = if x.coords()[0] <= 2.0 {
                    0.0
                } else {
                    -1.0 / 3.0
                };
                Vector::new(vec![v])
            }
            MapKind::Power { inner, n_iter } => {
                let mut y = inner.eval(x)?;
                for _ in 1..*n_iter {
                    y = inner.eval(&y)?;
                }
                Ok(y)
            }
            MapKind::Expression { exprs, .. } => Vector::new(
                exprs
                    .iter()
                    .map(|e| e.eval(x.coords()))
                    .collect::<Result<Vec<_>>>()?,
            ),
            MapKind::Averaged { inner, lambda } => {
                let tx = inner.eval(x)?;
                if *lambda == 1.0 {
                    Ok(tx)
                } else {
                    x.lincomb(1.0 - lambda, &tx, *lambda)
                }
            }
        }
    }

    /// `T_λ = (1−λ)I + λT`.
    pub fn averaged(&self, lambda: f64) -> Result<MapSpec> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::invalid(format!(
                "lambda must lie in (0, 1], got {lambda}"
            )));
        }
        Self::build(
            MapKind::Averaged {
                inner: Box::new(self.clone()),
                lambda,
            },
            self.domain.clone(),
        )
    }

    /// Exact enriched coefficient for maps whose `θ(b)` is known in closed
    /// form: `|b−1|` for the reflection and `|b+α|` for `x ↦ αx + v`.
    pub fn analytic_theta(&self, b: f64) -> Option<f64> {
        match &self.kind {
            MapKind::Reflection { .. } => Some((b - 1.0).abs()),
            MapKind::Affine { matrix, .. } => {
                let alpha = matrix[0][0];
                let scalar = matrix.iter().enumerate().all(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .all(|(j, &a)| if i == j { a == alpha } else { a == 0.0 })
                });
                scalar.then(|| (b + alpha).abs())
            }
            _ => None,
        }
    }
}

/// Convenience wrapper for [`MapSpec::eval`].
pub fn eval_map(map: &MapSpec, x: &Vector) -> Result<Vector> {
    map.eval(x)
}

/// Convenience wrapper for [`MapSpec::averaged`].
pub fn averaged_map(map: &MapSpec, lambda: f64) -> Result<MapSpec> {
    map.averaged(lambda)
}

/// Sampled lower bound on the enriched coefficient:
/// `max ‖b(x−y) + Tx − Ty‖ / ‖x−y‖` over pairs with `x ≠ y`.
pub fn estimate_theta(
    map: &MapSpec,
    b: f64,
    spec: &QuasiNormSpec,
    samples: &[(Vector, Vector)],
) -> Result<f64> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(format!(
            "b must be finite and >= 0, got {b}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let ratios = samples
        .par_iter()
        .map(|(x, y)| -> Result<Option<f64>> {
            let diff = x.sub(y)?;
            let denom = spec.eval(&diff)?;
            if denom == 0.0 {
                return Ok(None);
            }
            let tx = map.eval(x)?;
            let ty = map.eval(y)?;
            let tdiff = tx.sub(&ty)?;
            let num = diff.lincomb(b, &tdiff, 1.0)?;
            Ok(Some(spec.eval(&num)? / denom))
        })
        .collect::<Result<Vec<_>>>()?;
    ratios
        .into_iter()
        .flatten()
        .reduce(f64::max)
        .ok_or(Error::DegeneratePair)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentCandidate {
    pub b: f64,
    pub theta_hat: f64,
    pub c: f64,
    pub qualifies: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentSearch {
    pub candidates: Vec<EnrichmentCandidate>,
    pub selected: Option<EnrichedParams>,
    /// Sampled estimates bound θ from below; nothing here is certified.
    pub empirical: bool,
}

/// Evaluate every `b` of the grid and pick the qualifying one with the
/// smallest `c`; ties go to the earlier grid entry.
pub fn search_enrichment_detailed(
    map: &MapSpec,
    spec: &QuasiNormSpec,
    b_grid: &[f64],
    samples: &[(Vector, Vector)],
) -> Result<EnrichmentSearch> {
    if b_grid.is_empty() || samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut candidates = Vec::with_capacity(b_grid.len());
    let mut selected: Option<EnrichedParams> = None;
    for &b in b_grid {
        let theta_hat = estimate_theta(map, b, spec, samples)?;
        let c = theta_hat / (b + 1.0);
        let qualifies = theta_hat < b + 1.0;
        if qualifies && selected.is_none_or(|s| c < s.c) {
            selected = Some(EnrichedParams::new(b, theta_hat)?);
        }
        candidates.push(EnrichmentCandidate {
            b,
            theta_hat,
            c,
            qualifies,
            analytic_theta: map.analytic_theta(b),
        });
    }
    Ok(EnrichmentSearch {
        candidates,
        selected,
        empirical: true,
    })
}

pub fn search_enrichment(
    map: &MapSpec,
    spec: &QuasiNormSpec,
    b_grid: &[f64],
    samples: &[(Vector, Vector)],
) -> Result<Option<EnrichedParams>> {
    Ok(search_enrichment_detailed(map, spec, b_grid, samples)?.selected)
}

// JSON form:
// {"kind": "affine"|"reflection"|"step"|"power"|"expr"|"averaged",
//  "matrix", "offset", "inner", "n_iter", "exprs", "lambda", "dim", "domain"}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<MapSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exprs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<DomainBox>,
}

impl RawMap {
    fn new(kind: &str, domain: Option<DomainBox>) -> Self {
        RawMap {
            kind: kind.to_owned(),
            matrix: None,
            offset: None,
            inner: None,
            n_iter: None,
            exprs: None,
            lambda: None,
            dim: None,
            domain,
        }
    }
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let domain = self.domain.clone();
        let raw = match &self.kind {
            MapKind::Affine { matrix, offset } => RawMap {
                matrix: Some(matrix.clone()),
                offset: Some(offset.clone()),
                ..RawMap::new("affine", domain)
            },
            MapKind::Reflection { dim } => RawMap {
                dim: *dim,
                ..RawMap::new("reflection", domain)
            },
            MapKind::Step => RawMap::new("step", domain),
            MapKind::Power { inner, n_iter } => RawMap {
                inner: Some(inner.clone()),
                n_iter: Some(*n_iter),
                ..RawMap::new("power", domain)
            },
            MapKind::Expression { sources, .. } => RawMap {
                exprs: Some(sources.clone()),
                ..RawMap::new("expr", domain)
            },
            MapKind::Averaged { inner, lambda } => RawMap {
                inner: Some(inner.clone()),
                lambda: Some(*lambda),
                ..RawMap::new("averaged", domain)
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawMap::deserialize(d)?;
        let missing =
            |field: &str| D::Error::custom(format!("{} map requires {field:?}", raw.kind));
        let map = match raw.kind.as_str() {
            "affine" => MapSpec::affine(
                raw.matrix.clone().ok_or_else(|| missing("matrix"))?,
                raw.offset.clone().ok_or_else(|| missing("offset"))?,
            ),
            "reflection" => Ok(MapSpec::reflection(raw.dim)),
            "step" => Ok(MapSpec::step()),
            "power" => MapSpec::power(
                *raw.inner.clone().ok_or_else(|| missing("inner"))?,
                raw.n_iter.ok_or_else(|| missing("n_iter"))?,
            ),
            "expr" => MapSpec::expression(raw.exprs.as_deref().ok_or_else(|| missing("exprs"))?),
            "averaged" => raw
                .inner
                .clone()
                .ok_or_else(|| missing("inner"))?
                .averaged(raw.lambda.ok_or_else(|| missing("lambda"))?),
            other => return Err(D::Error::custom(format!("unknown map kind {other:?}"))),
        }
        .map_err(D::Error::custom)?;
        match raw.domain {
            Some(bx) => map.with_domain(bx).map_err(D::Error::custom),
            None => Ok(map),
        }
    }
}
