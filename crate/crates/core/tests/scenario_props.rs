//! Randomized consistency checks at the scenario level: frame consistency,
//! Galilean covariance, and phase-retrieval route agreement.

use num_complex::Complex64;
use qref_core::canon::{cm_relative_map, conjugate_momenta, transform_state, TransformMode};
use qref_core::reduce::{coherence_coefficient, detector_probabilities, partial_trace, purity};
use qref_core::scenarios::{
    interferometer_state, lab_frame_p_left, run_interferometer, run_rocket, run_third_particle,
    FrameF2, InterferometerConfig, InterferometerSetup, RocketConfig, ThirdParticleConfig,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random configuration inside the scenario's validity regime: the frame
/// body is at least ~1e5 times heavier than the probe, so the recoil terms
/// that separate the idealized relative-coordinate mirror from the exact
/// lab recombination stay below the comparison tolerances.
fn random_interferometer(rng: &mut ChaCha8Rng) -> InterferometerConfig {
    let m_i = 10f64.powf(rng.gen_range(-1.0..1.0));
    let m_p = m_i * 10f64.powf(rng.gen_range(-8.0..-5.0));
    let l = rng.gen_range(0.5..2.0);
    let setup = if rng.gen_bool(0.5) { InterferometerSetup::A } else { InterferometerSetup::B };
    let mut cfg = InterferometerConfig::new(m_i, m_p, l, setup);
    cfg.frame_f2 = match rng.gen_range(0..3) {
        0 => FrameF2::None,
        1 => FrameF2::Entangled,
        _ => FrameF2::SuperposedUnentangled,
    };
    cfg.phase = rng.gen_range(0.0..std::f64::consts::TAU);
    cfg
}

#[test]
fn detector_statistics_agree_between_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..50 {
        let cfg = random_interferometer(&mut rng);
        let report = run_interferometer(&cfg).unwrap();
        let diff = (report.metric("p_left").unwrap() - report.metric("p_left_lab").unwrap()).abs();
        assert!(diff <= 1e-6, "case {case}: relative vs lab route differ by {diff}");
    }
}

#[test]
fn two_body_routes_agree_for_arbitrary_mass_ratios() {
    // Without a second frame body the recoil damping of the coherence is
    // literally the same Gaussian factor in both routes, so agreement is
    // exact for any masses, not just heavy frames.
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for case in 0..25 {
        let m_i = 10f64.powf(rng.gen_range(-2.0..2.0));
        let m_p = 10f64.powf(rng.gen_range(-2.0..2.0));
        let l = rng.gen_range(0.5..2.0);
        let setup = if rng.gen_bool(0.5) { InterferometerSetup::A } else { InterferometerSetup::B };
        let mut cfg = InterferometerConfig::new(m_i, m_p, l, setup);
        cfg.phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let report = run_interferometer(&cfg).unwrap();
        let diff = (report.metric("p_left").unwrap() - report.metric("p_left_lab").unwrap()).abs();
        assert!(diff <= 1e-10, "case {case}: routes differ by {diff}");
    }
}

/// Run the reduction pipeline by hand so the input state can be translated
/// or boosted first.
fn reduced_stats(state: &qref_core::packets::SuperposedState, l: f64) -> (f64, f64, f64) {
    let map = conjugate_momenta(&cm_relative_map(state.masses()).unwrap()).unwrap();
    let relative = transform_state(state, &map, TransformMode::Approximate)
        .unwrap()
        .into_state()
        .unwrap();
    let rho = partial_trace(&relative, &[1]).unwrap();
    let (p_left, _) = detector_probabilities(&rho, (-l, l), 0.0).unwrap();
    let coh = coherence_coefficient(&rho, (-l, l)).unwrap();
    (p_left, purity(&rho), coh.norm())
}

#[test]
fn relative_predictions_are_galilean_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for case in 0..20 {
        let cfg = random_interferometer(&mut rng);
        let state = interferometer_state(&cfg).unwrap();
        let base = reduced_stats(&state, cfg.l);
        let d = rng.gen_range(-5.0..5.0);
        let v = rng.gen_range(-3.0..3.0);
        let moved = reduced_stats(&state.translated(d), cfg.l);
        let boosted = reduced_stats(&state.boosted(v).unwrap(), cfg.l);
        for (label, other) in [("translation", moved), ("boost", boosted)] {
            assert!(
                (base.0 - other.0).abs() <= 1e-8
                    && (base.1 - other.1).abs() <= 1e-8
                    && (base.2 - other.2).abs() <= 1e-8,
                "case {case} ({label}): {base:?} vs {other:?}"
            );
        }
        // The lab-frame route is invariant too.
        let lab0 = lab_frame_p_left(&state, cfg.l).unwrap();
        let lab1 = lab_frame_p_left(&state.translated(d).boosted(v).unwrap(), cfg.l).unwrap();
        assert!((lab0 - lab1).abs() <= 1e-8, "case {case}: lab route moved by {}", lab0 - lab1);
    }
}

#[test]
fn phase_retrieval_routes_agree_for_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for case in 0..50 {
        // Keep the mass ratio moderate so both branch offsets stay many
        // packet widths away from the origin (the branches must remain
        // resolvable for the detector bookkeeping to make sense).
        let m1 = 10f64.powf(rng.gen_range(-0.5..0.5));
        let m2 = 10f64.powf(rng.gen_range(-0.5..0.5));
        let m3 = 10f64.powf(rng.gen_range(-1.0..1.0));
        let l = rng.gen_range(0.5..2.0);
        let c = rng.gen_range(-1.0..1.0);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let cfg = ThirdParticleConfig::new(m1, m2, m3, l, c, theta);
        let report = run_third_particle(&cfg).unwrap();
        let est = report.phase_estimate.unwrap();
        let expected = Complex64::from_polar(0.5, theta);
        assert!((est - expected).norm() <= 0.02, "case {case}: estimate {est} vs {expected}");
        assert!(report.metric("route_diff").unwrap() <= 1e-10, "case {case}");
        assert!(report.metric("two_vs_three_diff").unwrap() <= 1e-10, "case {case}");
        assert!(report.metric("naive_coherence").unwrap() <= 1e-10, "case {case}");
        assert!(report.flags["q_separable"], "case {case}");
    }
}

#[test]
fn rocket_visibility_decays_above_the_window() {
    let cfg = RocketConfig::new(1.0, 1e4, 10.0, 10.0, 0.05);
    let sweep = [0.05, 0.1, 0.2, 0.4];
    let report = run_rocket(&cfg, &sweep).unwrap();
    let rows = &report.sweep.as_ref().unwrap().rows;
    let mut last = f64::INFINITY;
    for row in rows {
        assert!(row.values[0] <= last + 1e-12, "visibility rose at delta_xR = {}", row.value);
        last = row.values[0];
    }
    // And the analytic damping law holds along the way.
    for row in rows {
        let sigma_sq = row.value.powi(2) + (1.0 / (2.0 * 1e4 * row.value)).powi(2);
        let expected = (-2.0 * 100.0 * sigma_sq).exp();
        let v = row.values[0];
        assert!(
            (v - expected).abs() <= 0.02,
            "delta_xR = {}: V = {v} vs analytic {expected}",
            row.value
        );
    }
}
