use nalgebra::{DMatrix, DVector};

use stochmoments::mc::{
    estimate_gamma_mc, rare_event_warning, second_moment, second_moment_table, strong_error_table, ErrorMetric,
    McError, PlanSystem, Scheme, SimulationPlan,
};
use stochmoments::moments::GammaIndex;
use stochmoments::sde::{LevySampler, SemilinearSystem, TestSdeParams};
use stochmoments::stability::{milstein_factor, region_scan, Method, StabilityParams, REGION_CSV_HEADER};

const FOURIER: LevySampler = LevySampler::Fourier { terms: 8, tail: true };

fn plan(lambda: f64, scheme: Scheme, paths: u32, batches: u32, seed: u64) -> SimulationPlan {
    let sys = TestSdeParams::new(lambda, 1.0, 1.0).unwrap();
    SimulationPlan::new(scheme, PlanSystem::Test(sys), 0.5, 5.0, paths, batches, seed, FOURIER).unwrap()
}

#[test]
fn identical_plans_give_identical_results() {
    let p = plan(-0.8, Scheme::MagnusMilstein, 2000, 4, 9);
    assert_eq!(second_moment(&p).unwrap(), second_moment(&p).unwrap());
    let other = plan(-0.8, Scheme::MagnusMilstein, 2000, 4, 10);
    assert_ne!(second_moment(&p).unwrap().mean, second_moment(&other).unwrap().mean);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let p = plan(-0.4, Scheme::MagnusEuler, 3000, 3, 1);
    let hs = [0.5, 0.25];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let m = second_moment(&p).unwrap();
            let t = strong_error_table(&p, &hs, 2f64.powi(-5), ErrorMetric::MeanSquare).unwrap();
            (m, t)
        })
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn general_path_agrees_with_the_test_system_fast_path() {
    let sys = TestSdeParams::new(-0.8, 1.0, 1.0).unwrap();
    let fast = SimulationPlan::new(Scheme::MagnusMilstein, PlanSystem::Test(sys), 0.5, 2.0, 500, 2, 4, FOURIER).unwrap();
    let general =
        SimulationPlan::new(Scheme::MagnusMilstein, PlanSystem::General(sys.to_system()), 0.5, 2.0, 500, 2, 4, FOURIER)
            .unwrap();
    let (a, b) = (second_moment(&fast).unwrap(), second_moment(&general).unwrap());
    assert!((a.mean - b.mean).abs() < 1e-12 * a.mean, "{} vs {}", a.mean, b.mean);
}

#[test]
fn table_two_style_run_tracks_the_amplification_factor() {
    // p = −0.4, q₁ = 0.5, x = 1
    let p = plan(-0.8, Scheme::MagnusMilstein, 20_000, 10, 3);
    let est = second_moment(&p).unwrap();
    let params = StabilityParams::from_sde(-0.8, 1.0, 1.0, 0.5, 256).unwrap();
    let theory = 2.0 * milstein_factor(&params).unwrap().factor.to_f64().powi(10);
    assert!((est.mean - theory).abs() < 3.0 * est.sd, "{} ± {} vs {theory}", est.mean, est.sd);
}

#[test]
fn second_moment_table_requires_matching_plans() {
    let a = plan(-0.4, Scheme::MagnusMilstein, 100, 2, 1);
    let b = plan(-0.8, Scheme::MagnusMilstein, 100, 2, 1);
    let rows = second_moment_table(&[a.clone(), b]).unwrap();
    assert_eq!(rows.len(), 2);
    let c = plan(-0.8, Scheme::MagnusMilstein, 200, 2, 1);
    assert!(second_moment_table(&[a, c]).is_err());
}

#[test]
fn plan_validation() {
    let sys = PlanSystem::Test(TestSdeParams::new(-1.0, 1.0, 1.0).unwrap());
    let mk = |h, t| SimulationPlan::new(Scheme::MagnusEuler, sys.clone(), h, t, 10, 1, 0, FOURIER);
    assert!(mk(0.5, 5.0).is_ok());
    assert!(mk(1.0, 5.0).is_err());
    assert!(mk(0.0, 5.0).is_err());
    assert!(mk(0.3, 1.0).is_err());
    assert!(SimulationPlan::new(Scheme::MagnusEuler, sys, 0.5, 1.0, 0, 1, 0, FOURIER).is_err());
}

#[test]
fn indivisible_reference_step_is_rejected() {
    let p = plan(-1.0, Scheme::MagnusEuler, 10, 1, 0);
    let err = strong_error_table(&p, &[0.3], 2f64.powi(-4), ErrorMetric::MeanSquare).unwrap_err();
    assert!(matches!(err, McError::IndivisibleStep { .. }), "{err}");
}

#[test]
fn noiseless_errors_are_the_reference_bias() {
    // Without noise both Magnus schemes are exact, so every row reports the
    // same deterministic gap to the classical Milstein reference.
    let f0 = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, -0.5, -1.0]);
    let sys = SemilinearSystem::new(f0.clone(), vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)]).unwrap();
    let p = SimulationPlan::new(Scheme::MagnusMilstein, PlanSystem::General(sys), 0.5, 1.0, 50, 1, 0, FOURIER).unwrap();
    let hs = [0.5, 0.25, 0.125];
    let t = strong_error_table(&p, &hs, 2f64.powi(-9), ErrorMetric::MeanSquare).unwrap();
    // explicit Euler at h = 2⁻⁹ is what the reference reduces to here
    let step = DMatrix::identity(2, 2) + &f0 * 2f64.powi(-9);
    let mut y_ref = DVector::from_vec(vec![1.0, 1.0]);
    for _ in 0..512 {
        y_ref = &step * y_ref;
    }
    let exact = stochmoments::sde::expm(&f0).unwrap() * DVector::from_vec(vec![1.0, 1.0]);
    let gap = (exact - y_ref).norm_squared();
    for r in &t.rows {
        assert!((r.mean_sq.mean - gap).abs() <= 1e-9 * gap, "h={}: {} vs {gap}", r.h, r.mean_sq.mean);
        assert!(r.mean_sq.sd <= 1e-6 * gap);
    }
}

#[test]
fn standard_error_halves_with_four_times_the_samples() {
    let idx = GammaIndex::new(1, 1, 0);
    let sampler = LevySampler::Fourier { terms: 8, tail: true };
    let mut ratios = Vec::new();
    for seed in 0..4 {
        let small = estimate_gamma_mc(idx, 20_000, 1, &sampler, seed).unwrap();
        let large = estimate_gamma_mc(idx, 80_000, 1, &sampler, seed + 100).unwrap();
        ratios.push(large.se / small.se);
    }
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((avg - 0.5).abs() < 0.1, "{ratios:?}");
}

#[test]
fn rare_event_warning_only_when_the_series_diverges() {
    let calm = plan(-0.8, Scheme::MagnusMilstein, 1000, 1, 0);
    assert!(rare_event_warning(&calm, &second_moment(&calm).unwrap()).is_none());
    // σ₁ = σ₂ = 3, λ = −0.01, h = 1/2: q₁ = 4.5, the series diverges
    let sys = TestSdeParams::new(-0.01, 3.0, 3.0).unwrap();
    let wild = SimulationPlan::new(Scheme::MagnusMilstein, PlanSystem::Test(sys), 0.5, 5.0, 1000, 1, 0, FOURIER).unwrap();
    let est = second_moment(&wild).unwrap();
    if est.mean <= 2.0 {
        assert!(rare_event_warning(&wild, &est).is_some());
    }
}

#[test]
fn region_points_match_the_table_two_picture() {
    let grid = region_scan(1.0, (-0.6, -0.1), (0.0, 0.5), (6, 2), Method::Milstein, 256, 256).unwrap();
    let at = |p: f64| grid.points.iter().find(|pt| (pt.p - p).abs() < 1e-12 && pt.q1 == 0.5).unwrap();
    assert!(!at(-0.1).method_stable);
    assert!(at(-0.6).method_stable && at(-0.6).true_stable);
    let csv = grid.to_csv();
    assert!(csv.starts_with(REGION_CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + 12);

    let tiny = region_scan(1.0, (-1.0, -0.5), (0.0, 1e-3), (2, 2), Method::Euler, 64, 256).unwrap();
    assert!(tiny.points.iter().all(|pt| pt.method_stable));
}
