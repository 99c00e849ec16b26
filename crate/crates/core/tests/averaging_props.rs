use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdp_core::averaging::*;

#[test]
fn closed_form_satisfies_the_averaged_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (r0, a, t) = (rng.gen_range(0.1..4.0), rng.gen_range(0.05..0.5), rng.gen_range(0.0..50.0));
        let h = 1e-5;
        let r = |t: f64| averaged_amplitude(r0, a, t).unwrap();
        let fd = (r(t + h) - r(t - h)) / (2.0 * h);
        let rt = r(t);
        assert!((fd - a * rt / 2.0 * (1.0 - rt * rt / 4.0)).abs() < 1e-6);
    }
}

#[test]
fn amplitude_approaches_two_monotonically() {
    for r0 in [0.1, 1.0, 1.9, 2.1, 3.0, 4.0] {
        let mut prev_gap = (r0 - 2.0f64).abs();
        let mut prev = r0;
        for k in 1..=200 {
            let r = averaged_amplitude(r0, 0.3, k as f64 * 0.25).unwrap();
            if r0 < 2.0 {
                assert!(r >= prev);
            } else {
                assert!(r <= prev);
            }
            let gap = (r - 2.0).abs();
            assert!(gap < prev_gap || gap == 0.0, "r0={r0} step {k}");
            prev_gap = gap;
            prev = r;
        }
    }
}

#[test]
fn determining_roots_satisfy_the_polar_relation() {
    for (a, b, omega, theta) in [(1.0, 0.5, 1.1, 0.3), (0.5, 1.0, 0.9, -1.0), (2.0, 3.0, 1.5, 2.0), (0.3, 0.2, 1.02, 0.0)] {
        let sol = solve_determining(a, b, omega, theta, (1.5, 0.5)).unwrap();
        let (r, phi, sigma) = (sol.point.r(), sol.point.phi(), sol.point.sigma);
        let (e1, e2) = determining_residual(&sol.point, a, b, omega, theta);
        assert!(e1.abs().max(e2.abs()) <= 1e-10);
        assert!((r - b / (a * sigma) * (theta - phi).sin()).abs() <= 1e-8, "a={a} b={b} ω={omega}");
    }
}

#[test]
fn response_decreases_with_forcing_frequency() {
    let curve = amplitude_curve(1.0, 2.0, &(0..60).map(|i| -0.4 + 0.05 * i as f64).collect::<Vec<_>>()).unwrap();
    assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(curve.iter().all(|&(_, r)| r > 2.0));
}
