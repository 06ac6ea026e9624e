//! Quasi-norms on `R^n`, the quasimetric they induce, and their structural
//! constants.
//!
//! A quasi-norm satisfies `‖x‖ = 0 ⇔ x = 0`, `‖λx‖ = |λ|‖x‖` and the relaxed
//! triangle inequality `‖x + y‖ ≤ C(‖x‖ + ‖y‖)` for some `C ≥ 1`. The
//! catalog below covers the ordinary `ℓ_p` norms, the two-branch
//! `‖·‖_{a,p}` functional on `R^2`, Tychonoff's `ℓ_{1/2}` quasi-norm and the
//! general `ℓ_p` quasi-norm for `0 < p < 1`.

mod checks;
mod sampling;

pub use checks::{
    check_homogeneity, check_p_norm, check_quasi_triangle, check_separation, check_series_bound,
    HomogeneityReport, PNormReport, PairWitness, QuasiTriangleReport, SeparationReport,
    SeriesBoundReport,
};
pub use sampling::{
    probe_pairs, uniform_in_box, uniform_pairs, uniform_scalars, uniform_term_lists,
    uniform_vectors, DomainBox, SampleConfig,
};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Relative slack for sampled inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Relative slack for algebraic identities such as homogeneity.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuasiNormKind {
    /// The ordinary `ℓ_p` norm, `1 ≤ p ≤ ∞`.
    StandardP { p: f64 },
    /// `‖x‖_p` when `x₂ ≠ 0`, `a|x₁|` when `x₂ = 0`; defined on `R^2` only.
    MaligrandaAP { a: f64, p: f64 },
    /// `(Σ √|xᵢ|)²`.
    TychonoffHalf,
    /// `(Σ |xᵢ|^p)^{1/p}` with `0 < p < 1`.
    PQuasi { p: f64 },
}

impl QuasiNormKind {
    pub fn tag(&self) -> &'static str {
        match self {
            QuasiNormKind::StandardP { .. } => "standard_p",
            QuasiNormKind::MaligrandaAP { .. } => "maligranda_ap",
            QuasiNormKind::TychonoffHalf => "tychonoff_half",
            QuasiNormKind::PQuasi { .. } => "p_quasi",
        }
    }
}

/// A validated quasi-norm together with its quasi-triangle constant.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNormSpec {
    kind: QuasiNormKind,
    dim: Option<usize>,
    constant: f64,
}

impl QuasiNormSpec {
    pub fn new(kind: QuasiNormKind, dim: Option<usize>) -> Result<Self> {
        validate_kind(&kind)?;
        if dim == Some(0) {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if let QuasiNormKind::MaligrandaAP { .. } = kind {
            if matches!(dim, Some(n) if n != 2) {
                return Err(Error::invalid("maligranda_ap is defined on R^2 only"));
            }
        }
        let constant = analytic_constant(&kind);
        Ok(QuasiNormSpec {
            kind,
            dim,
            constant,
        })
    }

    pub fn standard(p: f64) -> Result<Self> {
        Self::new(QuasiNormKind::StandardP { p }, None)
    }

    pub fn max_norm() -> Self {
        Self::standard(f64::INFINITY).expect("max norm is valid")
    }

    pub fn maligranda(a: f64, p: f64) -> Result<Self> {
        Self::new(QuasiNormKind::MaligrandaAP { a, p }, Some(2))
    }

    pub fn tychonoff_half() -> Self {
        Self::new(QuasiNormKind::TychonoffHalf, None).expect("tychonoff is valid")
    }

    pub fn p_quasi(p: f64) -> Result<Self> {
        Self::new(QuasiNormKind::PQuasi { p }, None)
    }

    /// Fix the ambient dimension; subsequent evaluations reject other sizes.
    pub fn with_dim(self, dim: usize) -> Result<Self> {
        Self::new(self.kind, Some(dim))
    }

    pub fn kind(&self) -> &QuasiNormKind {
        &self.kind
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// The quasi-triangle constant `C`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if let Some(n) = self.dim {
            x.ensure_dim(n)?;
        }
        if let QuasiNormKind::MaligrandaAP { .. } = self.kind {
            x.ensure_dim(2)?;
        }
        Ok(())
    }

    /// `‖x‖`.
    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(eval_unchecked(&self.kind, x.coords()))
    }

    /// `d(x, y) = ‖x − y‖`.
    pub fn distance(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        self.eval(&x.sub(y)?)
    }
}

impl fmt::Display for QuasiNormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QuasiNormKind::StandardP { p } => write!(f, "standard_p(p={})", fmt_exponent(p)),
            QuasiNormKind::MaligrandaAP { a, p } => {
                write!(f, "maligranda_ap(a={a}, p={})", fmt_exponent(p))
            }
            QuasiNormKind::TychonoffHalf => f.write_str("tychonoff_half"),
            QuasiNormKind::PQuasi { p } => write!(f, "p_quasi(p={p})"),
        }
    }
}

fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_owned()
    } else {
        p.to_string()
    }
}

fn validate_kind(kind: &QuasiNormKind) -> Result<()> {
    match *kind {
        QuasiNormKind::StandardP { p } => {
            if p.is_nan() || p < 1.0 {
                return Err(Error::invalid(format!("standard_p needs p >= 1, got {p}")));
            }
        }
        QuasiNormKind::MaligrandaAP { a, p } => {
            if !a.is_finite() || a <= 0.0 || a == 1.0 {
                return Err(Error::invalid(format!(
                    "maligranda_ap needs a > 0 and a != 1, got {a}"
                )));
            }
            if p.is_nan() || p < 1.0 {
                return Err(Error::invalid(format!(
                    "maligranda_ap needs 1 <= p <= inf, got {p}"
                )));
            }
        }
        QuasiNormKind::TychonoffHalf => {}
        QuasiNormKind::PQuasi { p } => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(format!("p_quasi needs 0 < p < 1, got {p}")));
            }
        }
    }
    Ok(())
}

fn analytic_constant(kind: &QuasiNormKind) -> f64 {
    match *kind {
        QuasiNormKind::StandardP { .. } => 1.0,
        QuasiNormKind::MaligrandaAP { a, .. } => a.max(1.0 / a),
        QuasiNormKind::TychonoffHalf => 2.0,
        QuasiNormKind::PQuasi { p } => (1.0 / p - 1.0).exp2(),
    }
}

fn eval_unchecked(kind: &QuasiNormKind, x: &[f64]) -> f64 {
    match *kind {
        QuasiNormKind::StandardP { p } => lp(x, p),
        QuasiNormKind::MaligrandaAP { a, p } => {
            if x[1] != 0.0 {
                lp(x, p)
            } else {
                a * x[0].abs()
            }
        }
        QuasiNormKind::TychonoffHalf => {
            let s: f64 = x.iter().map(|c| c.abs().sqrt()).sum();
            s * s
        }
        QuasiNormKind::PQuasi { p } => lp(x, p),
    }
}

/// `(Σ|xᵢ|^p)^{1/p}` for any `p > 0`, including `p = ∞`.
fn lp(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|c| c.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|c| c * c).sum::<f64>().sqrt();
    }
    // scaled to keep the powers in range
    let s: f64 = x.iter().map(|c| (c.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Convenience wrapper for [`QuasiNormSpec::eval`].
pub fn eval_quasi_norm(spec: &QuasiNormSpec, x: &Vector) -> Result<f64> {
    spec.eval(x)
}

/// Convenience wrapper for [`QuasiNormSpec::constant`].
pub fn quasi_triangle_constant(spec: &QuasiNormSpec) -> f64 {
    spec.constant()
}

/// Convenience wrapper for [`QuasiNormSpec::distance`].
pub fn induced_distance(spec: &QuasiNormSpec, x: &Vector, y: &Vector) -> Result<f64> {
    spec.distance(x, y)
}

/// The exponent `p ∈ (0, 1]` solving `C = 2^{1/p − 1}`.
pub fn aoki_rolewicz_exponent(constant: f64) -> Result<f64> {
    if !constant.is_finite() || constant < 1.0 {
        return Err(Error::invalid(format!(
            "quasi-triangle constant must be finite and >= 1, got {constant}"
        )));
    }
    Ok(1.0 / (1.0 + constant.log2()))
}

/// Inverse of [`aoki_rolewicz_exponent`]: `C = 2^{1/p − 1}`.
pub fn constant_for_exponent(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!(
            "exponent must lie in (0, 1], got {p}"
        )));
    }
    Ok((1.0 / p - 1.0).exp2())
}

// JSON form: {"kind": ..., "p": number | "inf", "a": number, "dim": integer}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    /// Written for readers; recomputed on load.
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
}

#[derive(Clone, Copy)]
struct Exponent(f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Exponent(v)),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(Exponent(f64::INFINITY))
            }
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

impl Serialize for QuasiNormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (p, a) = match self.kind {
            QuasiNormKind::StandardP { p } => (Some(p), None),
            QuasiNormKind::MaligrandaAP { a, p } => (Some(p), Some(a)),
            QuasiNormKind::TychonoffHalf => (None, None),
            QuasiNormKind::PQuasi { p } => (Some(p), None),
        };
        RawSpec {
            kind: self.kind.tag().to_owned(),
            p: p.map(Exponent),
            a,
            dim: self.dim,
            constant: Some(self.constant),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuasiNormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSpec::deserialize(d)?;
        let need_p = |raw: &RawSpec| {
            raw.p
                .map(|e| e.0)
                .ok_or_else(|| D::Error::custom(format!("{} requires \"p\"", raw.kind)))
        };
        let kind = match raw.kind.as_str() {
            "standard_p" => QuasiNormKind::StandardP { p: need_p(&raw)? },
            "maligranda_ap" => QuasiNormKind::MaligrandaAP {
                a: raw
                    .a
                    .ok_or_else(|| D::Error::custom("maligranda_ap requires \"a\""))?,
                p: need_p(&raw)?,
            },
            "tychonoff_half" => QuasiNormKind::TychonoffHalf,
            "p_quasi" => QuasiNormKind::PQuasi { p: need_p(&raw)? },
            other => {
                return Err(D::Error::custom(format!(
                    "unknown quasi-norm kind {other:?}"
                )))
            }
        };
        let dim = match (kind, raw.dim) {
            (QuasiNormKind::MaligrandaAP { .. }, None) => Some(2),
            (_, dim) => dim,
        };
        QuasiNormSpec::new(kind, dim).map_err(D::Error::custom)
    }
}
