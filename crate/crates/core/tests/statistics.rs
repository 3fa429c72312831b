use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setlaw_core::convex_sets::{make_direction_grid, ConvexBody, Direction, DirectionGrid, GridScheme};
use setlaw_core::random_sets::{sample_ellipse_pair, AxisSchedule, FamilySpec, ScalarProcess, SeedSpec, SetSample};
use setlaw_core::set_statistics::{
    aumann_mean_estimate, empirical_support_covariance, endpoint_reduction_verdicts, test_uncorrelated, Verdict,
};

fn interval(lo: f64, hi: f64) -> ConvexBody {
    ConvexBody::interval(lo, hi).unwrap()
}

fn planar_body() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        prop::collection::vec((-5.0..5.0f64, 0.0..3.0f64), 2).prop_map(|v| {
            ConvexBody::axis_box(v.iter().map(|p| p.0).collect(), v.iter().map(|p| p.0 + p.1).collect()).unwrap()
        }),
        prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..6)
            .prop_map(|pts| ConvexBody::polytope(pts.into_iter().map(|(x, y)| vec![x, y]).collect()).unwrap()),
        ((-3.0..3.0f64), (0.1..2.0f64), (0.1..2.0f64)).prop_map(|(c, a, b)| ConvexBody::ellipsoid(
            vec![c, -c],
            vec![a, b]
        )
        .unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn support_mean_is_the_minkowski_average(bodies in prop::collection::vec(planar_body(), 1..12)) {
        let grid = Arc::new(make_direction_grid(2, 48, GridScheme::UniformAngles2d).unwrap());
        let n = bodies.len();
        let sample = SetSample::new(bodies.clone(), SeedSpec::new(0), "prop").unwrap();
        let estimate = aumann_mean_estimate(&sample, &grid).unwrap().embed(&grid).unwrap();
        let mut total = bodies[0].clone();
        for b in &bodies[1..] {
            total = total.minkowski_sum(b, Some(&grid)).unwrap();
        }
        let exact = total.scale(1.0 / n as f64).unwrap().embed(&grid).unwrap();
        for (x, y) in estimate.values().iter().zip(exact.values()) {
            prop_assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn covariance_is_symmetric_and_scales(pairs in prop::collection::vec(((-5.0..5.0f64), (0.0..3.0f64), (-5.0..5.0f64), (0.0..3.0f64)), 2..40), lambda in 0.0..10.0f64, plus in any::<bool>()) {
        let a: Vec<ConvexBody> = pairs.iter().map(|p| interval(p.0, p.0 + p.1)).collect();
        let b: Vec<ConvexBody> = pairs.iter().map(|p| interval(p.2, p.2 + p.3)).collect();
        let u = if plus { Direction::plus() } else { Direction::minus() };
        let ab = empirical_support_covariance(&a, &b, &u).unwrap();
        prop_assert_eq!(ab, empirical_support_covariance(&b, &a, &u).unwrap());
        let scaled: Vec<ConvexBody> = a.iter().map(|x| x.scale(lambda).unwrap()).collect();
        let sb = empirical_support_covariance(&scaled, &b, &u).unwrap();
        prop_assert!((sb - lambda * ab).abs() <= 1e-9, "{sb} vs {}", lambda * ab);
    }
}

#[test]
fn paired_uniform_support_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 100_000;
    let a: Vec<ConvexBody> = (0..n).map(|_| interval(0.0, rng.random::<f64>())).collect();
    let c = empirical_support_covariance(&a, &a, &Direction::plus()).unwrap();
    let se = ((1.0 / 80.0 - 1.0 / 144.0) / n as f64).sqrt();
    assert!((c - 1.0 / 12.0).abs() < 5.0 * se);

    let pts = sample_ellipse_pair(2.0, 3.0, (2.0, 3.0), n, SeedSpec::new(42)).unwrap();
    let f: Vec<ConvexBody> = pts.iter().map(|p| interval(0.0, p.0)).collect();
    let g: Vec<ConvexBody> = pts.iter().map(|p| interval(0.0, p.1)).collect();
    // Var(xi) = 1, Var(eta) = 9/4: the covariance SE is at most sqrt(E[xi^2 eta^2] / n) <= 6 / sqrt(n)
    let c = empirical_support_covariance(&f, &g, &Direction::plus()).unwrap();
    assert!(c.abs() < 3.0 * 6.0 / (n as f64).sqrt(), "{c}");
}

/// One randomized interval-pair process, replicated `r` times.
fn random_process(kind: usize, rng: &mut ChaCha8Rng, r: usize, seed: u64) -> Vec<(ConvexBody, ConvexBody)> {
    let rho: f64 = rng.random_range(-1.0..1.0);
    let scale: f64 = rng.random_range(0.1..3.0);
    let mut draw_rng = ChaCha8Rng::seed_from_u64(seed);
    match kind % 5 {
        0 => sample_ellipse_pair(2.0, 3.0, (2.0, 3.0), r, SeedSpec::new(seed))
            .unwrap()
            .into_iter()
            .map(|(x, y)| (interval(0.0, x), interval(0.0, y)))
            .collect(),
        1 => (0..r)
            .map(|_| {
                let (x, z): (f64, f64) = (draw_rng.random(), draw_rng.random());
                let y = rho * x + (1.0 - rho * rho).sqrt() * z;
                (interval(x, x + scale), interval(y - 1.0, y + scale * x))
            })
            .collect(),
        2 => (0..r)
            .map(|_| {
                let x: f64 = draw_rng.random();
                (interval(x, x + 1.0), interval(x, x + 2.0))
            })
            .collect(),
        3 => (0..r)
            .map(|_| {
                let (x, y): (f64, f64) = (draw_rng.random(), draw_rng.random());
                (interval(-x, scale), interval(-scale, y))
            })
            .collect(),
        _ => (0..r)
            .map(|_| (interval(rho, rho), interval(scale, scale + 1.0)))
            .collect(),
    }
}

#[test]
fn endpoint_reduction_agrees_on_randomized_processes() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for case in 0..500 {
        let r = rng.random_range(20..400);
        let pairs = random_process(case, &mut rng, r, 1000 + case as u64);
        let (set_level, endpoint_level) = endpoint_reduction_verdicts(&pairs, 0.05).unwrap();
        assert_eq!(set_level, endpoint_level, "case {case}");
    }
}

#[test]
fn uncorrelation_verdicts_on_reference_families() {
    let grid = Arc::new(DirectionGrid::exact_1d());
    let reps = |fam: &FamilySpec, len: usize, r: usize| -> Vec<SetSample> {
        (0..r)
            .map(|i| fam.draw(len, SeedSpec::new(44).child(i as u64)).unwrap())
            .collect()
    };
    let ellipsoid = FamilySpec::ellipsoid_intervals(AxisSchedule::Constant(1.0), None);
    let v = test_uncorrelated(&reps(&ellipsoid, 6, 10_000), &grid, 0.01).unwrap();
    assert_eq!(
        v.verdict,
        Verdict::Consistent,
        "max |corr| {} vs {}",
        v.max_abs_corr,
        v.threshold
    );

    let ar1 = FamilySpec::Scaled {
        template: interval(0.0, 1.0),
        process: ScalarProcess::CorrelatedAr1 { rho: 0.9 },
    };
    let v = test_uncorrelated(&reps(&ar1, 6, 2_000), &grid, 0.01).unwrap();
    assert_eq!(v.verdict, Verdict::Rejected);
    let lag_one = v
        .entries
        .iter()
        .find(|e| e.k == 3 && e.l == 4 && e.direction == 0)
        .unwrap();
    assert!(lag_one.covariance > 0.0);

    let constant = FamilySpec::Constant {
        body: interval(-1.0, 2.0),
    };
    let v = test_uncorrelated(&reps(&constant, 5, 10), &grid, 0.01).unwrap();
    assert_eq!(v.verdict, Verdict::Consistent);
    assert_eq!(v.max_abs_corr, 0.0);
}

#[test]
fn aumann_mean_of_large_interval_sample() {
    // E[V_i] = [0, a_i]; the mean upper endpoint has SD sqrt(sum Var(Y_i)) / n
    let n = 10_000;
    let axes = AxisSchedule::Cycle(vec![0.5, 1.0, 1.5]);
    let fam = FamilySpec::ellipsoid_intervals(axes, Some(n));
    let s = fam.draw(n, SeedSpec::new(45)).unwrap();
    let grid = Arc::new(DirectionGrid::exact_1d());
    let (lo, hi) = aumann_mean_estimate(&s, &grid).unwrap().endpoints().unwrap();
    let a_bar = s
        .expectations()
        .unwrap()
        .iter()
        .map(|e| e.endpoints().unwrap().1)
        .sum::<f64>()
        / n as f64;
    let var_sum: f64 = fam.support_variances(n, &grid).unwrap().direction_totals(n)[0];
    let se = var_sum.sqrt() / n as f64;
    assert_eq!(lo, 0.0);
    assert!((hi - a_bar).abs() < 5.0 * se, "{hi} vs {a_bar} (se {se})");
}
