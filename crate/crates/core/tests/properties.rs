//! Property tests for the quasi-norm axioms, map invariants and solver
//! recursions.

use proptest::prelude::*;
use quasifix::quasi_space::{check_p_norm, check_quasi_triangle, IDENTITY_TOL, INEQUALITY_TOL};
use quasifix::*;

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn vec_n(n: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(coord(), n).prop_map(|c| Vector::new(c).unwrap())
}

fn catalog() -> Vec<QuasiNormSpec> {
    vec![
        QuasiNormSpec::standard(1.0).unwrap(),
        QuasiNormSpec::standard(2.0).unwrap(),
        QuasiNormSpec::standard(3.5).unwrap(),
        QuasiNormSpec::max_norm(),
        QuasiNormSpec::maligranda(2.0, 1.0).unwrap(),
        QuasiNormSpec::maligranda(1.0 / 3.0, 2.0).unwrap(),
        QuasiNormSpec::maligranda(4.0, f64::INFINITY).unwrap(),
        QuasiNormSpec::tychonoff_half(),
        QuasiNormSpec::p_quasi(0.3).unwrap(),
        QuasiNormSpec::p_quasi(0.8).unwrap(),
    ]
}

// Every catalog entry accepts R^2.
fn any_spec() -> impl Strategy<Value = QuasiNormSpec> {
    (0..catalog().len()).prop_map(|i| catalog()[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn absolute_homogeneity(spec in any_spec(), x in vec_n(2), lambda in -50.0..50.0f64) {
        let lhs = spec.eval(&x.scale(lambda).unwrap()).unwrap();
        let rhs = lambda.abs() * spec.eval(&x).unwrap();
        prop_assert!((lhs - rhs).abs() <= IDENTITY_TOL * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn point_separation(spec in any_spec(), x in vec_n(2)) {
        let n = spec.eval(&x).unwrap();
        prop_assert!(n >= 0.0);
        prop_assert_eq!(n == 0.0, x.is_zero());
    }

    #[test]
    fn quasi_triangle_with_analytic_constant(spec in any_spec(), x in vec_n(2), y in vec_n(2)) {
        let lhs = spec.eval(&x.add(&y).unwrap()).unwrap();
        let rhs = spec.constant() * (spec.eval(&x).unwrap() + spec.eval(&y).unwrap());
        prop_assert!(lhs <= rhs * (1.0 + INEQUALITY_TOL));
    }

    #[test]
    fn induced_quasimetric(spec in any_spec(), x in vec_n(2), y in vec_n(2), z in vec_n(2)) {
        let dxy = spec.distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, spec.distance(&y, &x).unwrap());
        prop_assert_eq!(dxy == 0.0, x == y);
        let dxz = spec.distance(&x, &z).unwrap();
        let bound = spec.constant() * (dxy + spec.distance(&y, &z).unwrap());
        prop_assert!(dxz <= bound * (1.0 + INEQUALITY_TOL));
    }

    #[test]
    fn tychonoff_half_norm_inequality(x in vec_n(5), y in vec_n(5)) {
        let r = check_p_norm(&QuasiNormSpec::tychonoff_half(), 0.5, &[(x, y)]).unwrap();
        prop_assert!(r.holds, "ratio {}", r.worst_ratio);
    }

    #[test]
    fn aoki_rolewicz_round_trip(c in 1.0..64.0f64) {
        let p = aoki_rolewicz_exponent(c).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        let back = constant_for_exponent(p).unwrap();
        prop_assert!((back - c).abs() <= 1e-12 * c);
    }

    #[test]
    fn power_one_is_the_map(x in vec_n(2)) {
        let maps = [
            MapSpec::reflection(Some(2)),
            MapSpec::affine(vec![vec![0.3, -1.0], vec![2.0, 0.5]], Vector::new(vec![1.0, -2.0]).unwrap()).unwrap(),
            MapSpec::expression(&["max(x1, x2) - 1", "abs(x1) / 3"]).unwrap(),
        ];
        for m in &maps {
            prop_assert_eq!(MapSpec::power(m.clone(), 1).unwrap().eval(&x).unwrap(), m.eval(&x).unwrap());
        }
    }

    #[test]
    fn affine_expressions_match_affine_maps(
        a in proptest::array::uniform4(-3.0..3.0f64),
        v in proptest::array::uniform2(-3.0..3.0f64),
        x in vec_n(2),
    ) {
        let affine = MapSpec::affine(
            vec![vec![a[0], a[1]], vec![a[2], a[3]]],
            Vector::new(v.to_vec()).unwrap(),
        ).unwrap();
        let exprs = [
            format!("({}) * x1 + ({}) * x2 + ({})", a[0], a[1], v[0]),
            format!("({}) * x1 + ({}) * x2 + ({})", a[2], a[3], v[1]),
        ];
        let e = MapSpec::expression(&exprs).unwrap();
        let (p, q) = (affine.eval(&x).unwrap(), e.eval(&x).unwrap());
        for (s, t) in p.coords().iter().zip(q.coords()) {
            prop_assert!((s - t).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn averaging_preserves_fixed_points(lambda in 0.001..=1.0f64, b in 0.0..3.0f64) {
        // fixed point of x ↦ αx + v is v/(1−α); check a few catalog maps
        let p = Vector::new(vec![0.5, 0.5]).unwrap();
        let r = MapSpec::reflection(Some(2));
        prop_assert_eq!(r.eval(&p).unwrap(), p.clone());
        let avg = r.averaged(lambda).unwrap().eval(&p).unwrap();
        prop_assert!(avg.sub(&p).unwrap().max_abs() <= 1e-15);

        let alpha = -b;
        let v = Vector::new(vec![1.0 - alpha, 2.0 * (1.0 - alpha)]).unwrap();
        let fixed = Vector::new(vec![1.0, 2.0]).unwrap();
        let aff = MapSpec::affine(vec![vec![alpha, 0.0], vec![0.0, alpha]], v).unwrap();
        let avg = aff.averaged(lambda).unwrap().eval(&fixed).unwrap();
        prop_assert!(avg.sub(&fixed).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn reflection_theta_is_exact(spec in any_spec(), b in 0.0..1.0f64, seed in any::<u64>()) {
        let bx = DomainBox::new(Vector::splat(2, 0.5).unwrap(), Vector::splat(2, 2.0).unwrap()).unwrap();
        let pts = quasi_space::uniform_in_box(&bx, 200, seed);
        let pairs: Vec<_> = pts.chunks(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let theta = estimate_theta(&MapSpec::reflection(Some(2)), b, &spec, &pairs).unwrap();
        prop_assert!((theta - (1.0 - b)).abs() <= 1e-12, "theta {} b {}", theta, b);
    }

    #[test]
    fn theta_monotone_in_samples(seed in any::<u64>(), extra in 1usize..50) {
        let spec = QuasiNormSpec::tychonoff_half();
        let map = MapSpec::expression(&["x2 / 2 + 1", "if(x1 > 0, x1 / 3, -x1)"]).unwrap();
        let cfg = SampleConfig { count: 60, range: 5.0, seed };
        let mut pairs = quasi_space::uniform_pairs(2, &cfg);
        let before = estimate_theta(&map, 0.5, &spec, &pairs).unwrap();
        pairs.extend(quasi_space::uniform_pairs(2, &SampleConfig { count: extra, seed: seed ^ 0xA5A5, ..cfg }));
        let after = estimate_theta(&map, 0.5, &spec, &pairs).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn lambda_construction_identity(b in 0.0..1e3f64, frac in 0.0..1.0f64) {
        let theta = frac * (b + 1.0);
        prop_assume!(theta < b + 1.0);
        let p = EnrichedParams::new(b, theta).unwrap();
        prop_assert!((p.lambda * (b + 1.0) - 1.0).abs() <= 1e-15);
        prop_assert!((p.c * (b + 1.0) - theta).abs() <= 1e-15 * theta.max(1.0));
        prop_assert!(p.c < 1.0);
    }
}

#[test]
fn maligranda_constant_approached_from_below() {
    for a in [2.0, 5.0, 0.5, 0.2] {
        let spec = QuasiNormSpec::maligranda(a, 1.0).unwrap();
        let target = spec.constant();
        let mut last = 0.0;
        for k in 1..=8 {
            let t = 10f64.powi(-k);
            let pairs = if a > 1.0 {
                vec![(
                    Vector::new(vec![1.0, t]).unwrap(),
                    Vector::new(vec![0.0, -t]).unwrap(),
                )]
            } else {
                vec![(
                    Vector::new(vec![1.0, 0.0]).unwrap(),
                    Vector::new(vec![0.0, t]).unwrap(),
                )]
            };
            let r = check_quasi_triangle(&spec, &pairs).unwrap();
            assert!(r.empirical_c < target);
            assert!(r.empirical_c > last);
            last = r.empirical_c;
        }
        assert!(target - last < 1e-7 * target, "a={a}: {last} vs {target}");
    }
}

/// Absolute floor below which residual ratios are rounding noise: a few
/// ulps of the largest iterate coordinate, measured through the norm.
fn noise_floor(trace: &IterationTrace, spec: &QuasiNormSpec) -> f64 {
    let scale = trace.points.iter().map(Vector::max_abs).fold(1.0, f64::max);
    let dim = trace.points[0].dim() as f64;
    8.0 * dim * spec.constant().max(1.0) * f64::EPSILON * scale
}

fn catalog_problems() -> Vec<(MapSpec, EnrichedParams, QuasiNormSpec, Vector)> {
    vec![
        (
            MapSpec::reflection(Some(2)),
            EnrichedParams::new(0.5, 0.5).unwrap(),
            QuasiNormSpec::maligranda(2.0, 1.0).unwrap(),
            Vector::zeros(2),
        ),
        (
            MapSpec::reflection(Some(2)),
            EnrichedParams::new(0.25, 0.75).unwrap(),
            QuasiNormSpec::tychonoff_half(),
            Vector::zeros(2),
        ),
        (
            MapSpec::scalar(0.5, 3).unwrap(),
            EnrichedParams::new(0.0, 0.5).unwrap(),
            QuasiNormSpec::standard(2.0).unwrap(),
            Vector::zeros(3),
        ),
        (
            MapSpec::scalar(-3.0, 2).unwrap(),
            EnrichedParams::new(3.5, 0.5).unwrap(),
            QuasiNormSpec::p_quasi(0.4).unwrap(),
            Vector::zeros(2),
        ),
    ]
}

fn fixed_point_of(map: &MapSpec, dim: usize) -> Vector {
    match map.kind() {
        MapKind::Reflection { .. } => Vector::splat(dim, 0.5).unwrap(),
        _ => Vector::zeros(dim),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_recursions_hold(idx in 0usize..4, seed in any::<u64>()) {
        let (map, params, spec, zero) = &catalog_problems()[idx];
        let dim = zero.dim();
        let x0 = quasi_space::uniform_vectors(dim, &SampleConfig { count: 1, range: 10.0, seed })[0].clone();
        let res = krasnoselskij_solve(map, params, spec, &x0, &SolverConfig::default()).unwrap();
        let t = &res.trace;
        let floor = noise_floor(t, spec);
        let p = fixed_point_of(map, dim);

        // r_n ≤ c r_{n−1}, and hence nonincreasing
        for w in t.residuals.windows(2) {
            prop_assert!(w[1] <= params.c * w[0] * (1.0 + 1e-9) + floor, "{} vs {}", w[1], w[0]);
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + floor);
        }
        // ‖x_{n+i−1} − p‖ ≤ cⁱ/(1−c)·‖x_n − x_{n−1}‖
        for n in 1..t.points.len() {
            for i in 1..=3u32 {
                let k = n + i as usize - 1;
                if k >= t.points.len() { continue; }
                let err = spec.distance(&t.points[k], &p).unwrap();
                let bound = error_bound(params.c, i, t.residuals[n - 1]).unwrap();
                prop_assert!(err <= bound + 1e-9, "n={} i={} err={} bound={}", n, i, err, bound);
            }
        }
        prop_assert!(res.certified_residual <= 10.0 * SolverConfig::default().tol);
    }
}

#[test]
fn uniqueness_on_catalog() {
    for (map, params, spec, zero) in catalog_problems() {
        let starts = quasi_space::uniform_vectors(
            zero.dim(),
            &SampleConfig {
                count: 100,
                range: 10.0,
                seed: 11,
            },
        );
        let rep =
            uniqueness_probe(&map, &params, &spec, &starts, &SolverConfig::default()).unwrap();
        assert_eq!(rep.starts, 100);
        assert!(
            rep.max_pairwise_distance <= 1e-6,
            "{map:?}: {}",
            rep.max_pairwise_distance
        );
    }
}
