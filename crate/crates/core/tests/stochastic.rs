use kcs_core::experiments::{run_particles, RunOptions};
use kcs_core::model::KernelSpec;
use kcs_core::particle::ParticleEnsemble;

fn at_rest(n: usize) -> ParticleEnsemble<f64> {
    ParticleEnsemble::from_1d(vec![0.0; n], vec![0.0; n], 1.0).unwrap()
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn free_noise_variance_grows_like_two_sigma_t() {
    let (n, sigma, t) = (20_000, 0.1, 1.0);
    let run = run_particles(at_rest(n), &KernelSpec::disabled(), sigma, 1e-3, 1000, 7, &RunOptions::every(1000)).unwrap();
    let (m, var) = mean_var(run.state.velocities());
    let expected = 2.0 * sigma * t;
    // Five standard errors of the sample mean and variance of a Gaussian.
    assert!(m.abs() <= 5.0 * (expected / n as f64).sqrt(), "mean {m}");
    assert!((var - expected).abs() <= 5.0 * expected * (2.0 / n as f64).sqrt(), "var {var}");
}

#[test]
fn free_noise_energy_tracks_source() {
    let (n, sigma) = (20_000, 0.2);
    let run = run_particles(at_rest(n), &KernelSpec::disabled(), sigma, 1e-3, 2000, 11, &RunOptions::every(500)).unwrap();
    for r in run.series.records().iter().skip(1) {
        let expected = 2.0 * sigma * r.t;
        // E is a mean of n squared Gaussians of variance 2σt.
        assert!((r.energy - expected).abs() <= 5.0 * expected * (2.0 / n as f64).sqrt(), "t {} E {}", r.t, r.energy);
    }
}

#[test]
fn alignment_pulls_noise_to_a_finite_spread() {
    // With φ ≡ 1 the centred velocities are an Ornstein–Uhlenbeck process
    // with rate M, so Var V → σ/M.
    let n = 5000;
    let run = run_particles(at_rest(n), &KernelSpec::constant(1.0).unwrap(), 0.1, 1e-3, 5000, 3, &RunOptions::every(5000)).unwrap();
    let (_, var) = mean_var(run.state.velocities());
    let expected = 0.1 * (1.0 - (-10.0f64).exp());
    assert!((var - expected).abs() <= 5.0 * expected * (2.0 / n as f64).sqrt(), "var {var}");
}

#[test]
fn noise_is_keyed_on_seed() {
    let go = |seed| {
        run_particles(at_rest(100), &KernelSpec::default(), 0.1, 1e-3, 50, seed, &RunOptions::every(50))
            .unwrap()
            .state
    };
    assert_eq!(go(1), go(1));
    assert_ne!(go(1).velocities(), go(2).velocities());
}
