//! Sampling-based falsification of the quasi-norm axioms and related
//! inequalities. A passing check is evidence, never a proof.

use serde::{Deserialize, Serialize};

use super::{QuasiNormSpec, IDENTITY_TOL, INEQUALITY_TOL};
use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: Vector,
    pub y: Vector,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PNormReport {
    pub p: f64,
    pub holds: bool,
    pub worst_ratio: f64,
    pub witness: Option<PairWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiTriangleReport {
    pub claimed_c: f64,
    pub empirical_c: f64,
    /// Pair attaining `empirical_c`.
    pub attained_at: Option<PairWitness>,
    pub violation_of_claimed_c: Option<PairWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBoundReport {
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `‖Σ_{k=n}^{n+q} x_k‖ ≤ Σ C^{k−n+1}‖x_k‖` over every window of the first `m` terms.
    pub intermediate_holds: bool,
    pub worst_intermediate_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub holds: bool,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub holds: bool,
    pub zero_norm: f64,
    /// A nonzero vector with zero quasi-norm, if one was found.
    pub witness: Option<Vector>,
}

fn max_ratio<F>(samples: &[(Vector, Vector)], mut ratio: F) -> Result<Option<PairWitness>>
where
    F: FnMut(&Vector, &Vector) -> Result<Option<f64>>,
{
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let dim = samples[0].0.dim();
    let mut best: Option<(usize, f64)> = None;
    for (i, (x, y)) in samples.iter().enumerate() {
        x.ensure_dim(dim)?;
        y.ensure_dim(dim)?;
        if let Some(r) = ratio(x, y)? {
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((i, r));
            }
        }
    }
    Ok(best.map(|(i, ratio)| PairWitness {
        x: samples[i].0.clone(),
        y: samples[i].1.clone(),
        ratio,
    }))
}

/// Tests `‖x+y‖^p ≤ ‖x‖^p + ‖y‖^p` on every sample pair.
pub fn check_p_norm(
    spec: &QuasiNormSpec,
    p: f64,
    samples: &[(Vector, Vector)],
) -> Result<PNormReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!(
            "p-norm exponent must lie in (0, 1], got {p}"
        )));
    }
    let worst = max_ratio(samples, |x, y| {
        let denom = spec.eval(x)?.powf(p) + spec.eval(y)?.powf(p);
        if denom == 0.0 {
            return Ok(None);
        }
        Ok(Some(spec.eval(&x.add(y)?)?.powf(p) / denom))
    })?;
    let worst_ratio = worst.as_ref().map_or(0.0, |w| w.ratio);
    let holds = worst_ratio <= 1.0 + INEQUALITY_TOL;
    Ok(PNormReport {
        p,
        holds,
        worst_ratio,
        witness: if holds { None } else { worst },
    })
}

/// Largest observed `‖x+y‖ / (‖x‖+‖y‖)`, compared against the analytic `C`.
pub fn check_quasi_triangle(
    spec: &QuasiNormSpec,
    samples: &[(Vector, Vector)],
) -> Result<QuasiTriangleReport> {
    let worst = max_ratio(samples, |x, y| {
        let denom = spec.eval(x)? + spec.eval(y)?;
        if denom == 0.0 {
            return Ok(None);
        }
        Ok(Some(spec.eval(&x.add(y)?)? / denom))
    })?;
    let claimed_c = spec.constant();
    let empirical_c = worst.as_ref().map_or(0.0, |w| w.ratio);
    let violated = empirical_c > claimed_c * (1.0 + INEQUALITY_TOL);
    Ok(QuasiTriangleReport {
        claimed_c,
        empirical_c,
        violation_of_claimed_c: if violated { worst.clone() } else { None },
        attained_at: worst,
    })
}

/// Finite-sum form of the completeness bound `‖Σ xₙ‖ ≤ Σ C^{n+1}‖xₙ‖`
/// over the first `m` terms, plus the window inequality used to derive it.
pub fn check_series_bound(
    spec: &QuasiNormSpec,
    terms: &[Vector],
    m: usize,
) -> Result<SeriesBoundReport> {
    if m == 0 || m > terms.len() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: terms.len(),
        });
    }
    let terms = &terms[..m];
    let dim = terms[0].dim();
    let c = spec.constant();
    let norms = terms
        .iter()
        .map(|t| {
            t.ensure_dim(dim)?;
            spec.eval(t)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut worst = 0.0_f64;
    let mut intermediate_holds = true;
    let mut total = Vector::zeros(dim);
    for start in 0..m {
        let mut partial = Vector::zeros(dim);
        let mut bound = 0.0;
        for k in start..m {
            partial = partial.add(&terms[k])?;
            bound += c.powi((k - start + 1) as i32) * norms[k];
            let lhs = spec.eval(&partial)?;
            if lhs > bound * (1.0 + INEQUALITY_TOL) {
                intermediate_holds = false;
            }
            if bound > 0.0 {
                worst = worst.max(lhs / bound);
            }
        }
        if start == 0 {
            total = partial;
        }
    }

    let lhs = spec.eval(&total)?;
    // terms are numbered from 1, so the n-th term carries C^{n+1}
    let rhs: f64 = norms
        .iter()
        .enumerate()
        .map(|(i, nrm)| c.powi(i as i32 + 2) * nrm)
        .sum();
    Ok(SeriesBoundReport {
        m,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + INEQUALITY_TOL),
        intermediate_holds,
        worst_intermediate_ratio: worst,
    })
}

/// `‖λx‖ = |λ|·‖x‖` on each `(λ, x)` sample.
pub fn check_homogeneity(
    spec: &QuasiNormSpec,
    samples: &[(f64, Vector)],
) -> Result<HomogeneityReport> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut max_rel_error = 0.0_f64;
    for (lambda, x) in samples {
        let scaled = spec.eval(&x.scale(*lambda)?)?;
        let expected = lambda.abs() * spec.eval(x)?;
        let err = (scaled - expected).abs();
        if err > 0.0 {
            max_rel_error = max_rel_error.max(err / expected.max(f64::MIN_POSITIVE));
        }
    }
    Ok(HomogeneityReport {
        holds: max_rel_error <= IDENTITY_TOL,
        max_rel_error,
    })
}

/// `‖x‖ = 0` exactly when `x = 0`.
pub fn check_separation(spec: &QuasiNormSpec, samples: &[Vector]) -> Result<SeparationReport> {
    let first = samples.first().ok_or(Error::EmptySampleSet)?;
    let zero_norm = spec.eval(&Vector::zeros(first.dim()))?;
    let mut witness = None;
    for x in samples {
        if !x.is_zero() && spec.eval(x)? <= 0.0 {
            witness = Some(x.clone());
            break;
        }
    }
    Ok(SeparationReport {
        holds: zero_norm == 0.0 && witness.is_none(),
        zero_norm,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasi_space::{probe_pairs, uniform_pairs, SampleConfig};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn small_cfg(seed: u64) -> SampleConfig {
        SampleConfig {
            count: 2000,
            range: 10.0,
            seed,
        }
    }

    #[test]
    fn triangle_inequality_is_a_one_norm() {
        let l1 = QuasiNormSpec::standard(1.0).unwrap();
        let r = check_p_norm(&l1, 1.0, &uniform_pairs(3, &small_cfg(1))).unwrap();
        assert!(r.holds);
        assert!(r.witness.is_none());
    }

    #[test]
    fn tychonoff_is_a_half_norm() {
        let t = QuasiNormSpec::tychonoff_half();
        let mut samples = uniform_pairs(4, &small_cfg(2));
        samples.extend(probe_pairs(4));
        let r = check_p_norm(&t, 0.5, &samples).unwrap();
        assert!(r.holds, "worst ratio {}", r.worst_ratio);
    }

    #[test]
    fn maligranda_breaks_subadditivity() {
        let m = QuasiNormSpec::maligranda(2.0, 1.0).unwrap();
        let samples = vec![
            (v(&[1.0, 0.1]), v(&[0.0, -0.1])),
            (v(&[1.0, 1.0]), v(&[2.0, 3.0])),
        ];
        let r = check_p_norm(&m, 1.0, &samples).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.x, samples[0].0);
        assert!((w.ratio - 2.0 / 1.2).abs() < 1e-12);

        let q = check_quasi_triangle(&m, &samples).unwrap();
        assert!((q.empirical_c - 5.0 / 3.0).abs() < 1e-12);
        assert!(q.violation_of_claimed_c.is_none());
    }

    #[test]
    fn tychonoff_constant_attained_on_disjoint_units() {
        let t = QuasiNormSpec::tychonoff_half();
        let samples = vec![
            (v(&[1.0, 0.0]), v(&[0.0, 1.0])),
            (v(&[1.0, 1.0]), v(&[1.0, 1.0])),
        ];
        let q = check_quasi_triangle(&t, &samples).unwrap();
        assert_eq!(q.empirical_c, 2.0);
        assert_eq!(q.attained_at.unwrap().x, samples[0].0);
        assert!(q.violation_of_claimed_c.is_none());
    }

    #[test]
    fn euclidean_never_exceeds_one() {
        let l2 = QuasiNormSpec::standard(2.0).unwrap();
        let q = check_quasi_triangle(&l2, &uniform_pairs(3, &small_cfg(3))).unwrap();
        assert!(q.empirical_c <= 1.0 + 1e-12);
        assert!(q.violation_of_claimed_c.is_none());
    }

    #[test]
    fn wrong_constant_is_caught() {
        // a p_quasi norm with p close to 1 still exceeds C = 1 on disjoint units
        let pq = QuasiNormSpec::p_quasi(0.5).unwrap();
        let q = check_quasi_triangle(&pq, &probe_pairs(2)).unwrap();
        assert_eq!(q.empirical_c, 2.0);
        assert!(q.violation_of_claimed_c.is_none());
    }

    #[test]
    fn degenerate_pairs_are_skipped() {
        let l1 = QuasiNormSpec::standard(1.0).unwrap();
        let z = Vector::zeros(2);
        let q = check_quasi_triangle(&l1, &[(z.clone(), z.clone())]).unwrap();
        assert_eq!(q.empirical_c, 0.0);
        assert!(q.attained_at.is_none());
        assert!(matches!(
            check_quasi_triangle(&l1, &[]),
            Err(Error::EmptySampleSet)
        ));
        assert!(matches!(
            check_p_norm(&l1, 1.0, &[]),
            Err(Error::EmptySampleSet)
        ));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let l1 = QuasiNormSpec::standard(1.0).unwrap();
        let samples = vec![(v(&[1.0, 0.0]), v(&[0.0, 1.0])), (v(&[1.0]), v(&[2.0]))];
        assert!(matches!(
            check_quasi_triangle(&l1, &samples),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn series_bound_examples() {
        let t = QuasiNormSpec::tychonoff_half();
        let basis: Vec<_> = (0..3).map(|i| Vector::basis(3, i)).collect();
        let r = check_series_bound(&t, &basis, 3).unwrap();
        assert_eq!(r.lhs, 9.0);
        assert_eq!(r.rhs, 28.0);
        assert!(r.holds && r.intermediate_holds);

        let l1 = QuasiNormSpec::standard(1.0).unwrap();
        let r = check_series_bound(&l1, &basis[..2], 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
        assert!(r.holds);

        let single = [v(&[3.0, -1.0])];
        let m = QuasiNormSpec::maligranda(2.0, 1.0).unwrap();
        let r = check_series_bound(&m, &single, 1).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert_eq!(r.rhs, 16.0);
    }

    #[test]
    fn series_bound_index_errors() {
        let l1 = QuasiNormSpec::standard(1.0).unwrap();
        let terms = [v(&[1.0])];
        assert!(matches!(
            check_series_bound(&l1, &terms, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 1 })
        ));
        assert!(check_series_bound(&l1, &terms, 0).is_err());
    }

    #[test]
    fn homogeneity_and_separation() {
        let t = QuasiNormSpec::tychonoff_half();
        let samples = vec![
            (-3.5, v(&[1.0, 2.0])),
            (0.0, v(&[4.0, 1.0])),
            (1e-3, v(&[0.0, 9.0])),
        ];
        assert!(check_homogeneity(&t, &samples).unwrap().holds);
        let s = check_separation(&t, &[v(&[0.0, 1e-300]), v(&[2.0, 0.0])]).unwrap();
        assert!(s.holds);
        assert_eq!(s.zero_norm, 0.0);
    }
}
