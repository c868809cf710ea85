use critsweep::dynamics::evolve_all;
use critsweep::model::{log_spaced_grid, Preset};
use critsweep::pipeline::{run, RunParams};
use critsweep::spectrum::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

#[test]
fn noisy_power_law_recovered_within_three_sigma() {
    let k = log_spaced_grid(0.1, 100.0, 32).unwrap();
    let window = FitWindow { k_lo: 0.0, k_hi: f64::INFINITY };
    let noise = Normal::new(0.0, 0.01).unwrap();
    for seed in 0..20u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let index = -3.0 + 0.25 * seed as f64;
        let p: Vec<f64> = k.iter().map(|k| 2.5 * k.powf(index) * (1.0 + noise.sample(&mut rng))).collect();
        let fit = fit_power_law(&k, &p, window).unwrap();
        assert!(
            (fit.index - index).abs() <= 3.0 * fit.stderr,
            "seed {seed}: {} ± {} vs {index}",
            fit.index,
            fit.stderr
        );
        assert!((fit.intercept - 2.5f64.ln()).abs() < 0.01);
    }
}

#[test]
fn assemble_ignores_input_order() {
    let s = Preset::EmMedium.scenario().with_k_grid(vec![0.2, 1.0, 5.0, 25.0]).unwrap();
    let trajs = evolve_all(&s, 1e-10).unwrap();
    let mut shuffled = trajs.clone();
    shuffled.swap(0, 3);
    shuffled.swap(1, 2);
    assert_eq!(assemble(&trajs, &s).unwrap(), assemble(&shuffled, &s).unwrap());
}

#[test]
fn field_and_momentum_squeezing_are_complementary() {
    // ν = 1/3 leaves a (k|τ_f|)^{2ν} correction at the default end time, so
    // the sweep is carried further towards the critical point.
    for p in [Preset::Bec, Preset::EmMedium, Preset::Heisenberg] {
        let s = p.scenario().with_interval(-10.0, -1e-6).unwrap();
        let out = run(&RunParams::new(s)).unwrap();
        let fit = out.spectrum.fitted.unwrap();
        let sum = fit.phi.index + fit.pi.index;
        let sigma = (fit.phi.stderr.powi(2) + fit.pi.stderr.powi(2)).sqrt();
        assert!(sum.abs() <= 3.0 * sigma.max(1e-9), "{p}: {sum} vs 3σ = {}", 3.0 * sigma);
    }
}

#[test]
fn de_sitter_spectrum_is_scale_invariant() {
    // the adiabatic start mixes in |B| ≈ 1/(2k|τ_in|) of the negative-frequency
    // mode, a power ripple of relative size up to 2|B| per point
    let out = run(&RunParams::new(Preset::DeSitter.scenario())).unwrap();
    let sp = &out.spectrum;
    let tau_in = critsweep::analytic::tau_of_t(&out.scenario, out.scenario.t_in()).unwrap().abs();
    let inside: Vec<usize> = (0..sp.k_values.len()).filter(|&i| out.window.contains(sp.k_values[i])).collect();
    for shift in [2usize, 4, 8, 16, 32] {
        for w in inside.windows(shift + 1) {
            let (lo, hi) = (w[0], w[shift]);
            let (k_lo, k_hi) = (sp.k_values[lo], sp.k_values[hi]);
            let lambda = k_hi / k_lo;
            let rescaled = sp.p_phi[lo] / lambda.powi(3);
            let rel = (rescaled - sp.p_phi[hi]).abs() / sp.p_phi[hi];
            let ripple = 1.25 * (1.0 / (k_lo * tau_in) + 1.0 / (k_hi * tau_in));
            assert!(rel < ripple, "λ = {lambda}, k = {k_hi}: {rel} vs {ripple}");
        }
    }
}

#[test]
fn fitted_indices_match_predictions() {
    for p in Preset::ALL {
        let out = run(&RunParams::new(p.scenario())).unwrap();
        assert!(out.verdict.pass, "{p}: {:?}", out.verdict);
        assert!(out.spectrum.fitted.unwrap().phi.points >= 33, "{p}: fewer than one decade fitted");
    }
}

#[test]
fn uncertainty_records_respect_the_bound() {
    let s = Preset::Bec.scenario();
    let trajs = evolve_all(&s.with_k_grid(vec![0.1, 1.0, 10.0]).unwrap(), 1e-10).unwrap();
    for r in uncertainty_products(&trajs) {
        assert!(r.dq_dp >= 0.5 - 1e-8);
        assert!((r.rs_invariant - 0.25).abs() < 1e-8);
    }
}
