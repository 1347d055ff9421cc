mod common;

use posthoc::posthoc::{robustness_bound, vector_recovery_bound, RobustnessParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn vector_recovery_bound_holds_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..500 {
        let (bound, dist) = common::vector_recovery_instance(&mut rng);
        assert!(dist <= bound * (1.0 + 1e-12), "distance {dist} exceeds bound {bound}");
    }
}

#[test]
fn plug_in_values() {
    let v = vector_recovery_bound(1, 1.0, 0.01, 0.0, 1.0).unwrap();
    assert!((v - 0.141421356237).abs() < 1e-9);
    let p = RobustnessParams {
        n: 4,
        lambda_min_g: 1.0,
        trace_q: 3.0,
        lambda_min_q: 1.0,
        lambda_max_d: 1.0 / 3f64.sqrt(),
        kappa_d: 1.0,
        epsilon: 0.0,
        delta: 1e-4,
    };
    let b = robustness_bound(&p, 2.0).unwrap();
    // 4^{1/4} · 6^{1/2} · (1e-4)^{1/2}
    assert!((b - 2f64.sqrt() * 6f64.sqrt() * 1e-2).abs() < 1e-15);
    let doubled = robustness_bound(&RobustnessParams { delta: 2e-4, ..p }, 2.0).unwrap();
    assert!((doubled / b - 2f64.sqrt()).abs() < 1e-12);
}
