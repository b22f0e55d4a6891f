use num_rational::Ratio;
use tscp_theory::chain::{aci_on_residuals, ar1_residuals, project};
use tscp_theory::estimate::{batch_means, lengths};
use tscp_theory::{
    chain_run_ar1, control_variate_length, estimate_expected_length, exchangeable_stationary, moment_checks,
    run_exchangeable, sweep_gamma, ChainConfig, FoldedGaussian, LengthMode, QuantileFn, SweepConfig,
};

fn config(p: u64, q: u64, gamma: f64, steps: usize, seed: u64) -> ChainConfig {
    ChainConfig {
        steps,
        burn_in: 20_000,
        seed,
        ..ChainConfig::new(Ratio::new(p, q), gamma)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (d, p.clamp(0.0, 1.0))
}

#[test]
fn simulated_length_matches_the_exact_stationary_law() {
    let q = FoldedGaussian::new(1.0, 4.0);
    for (gamma, seed) in [(0.05, 1), (0.01, 2)] {
        let path = run_exchangeable(&config(1, 10, gamma, 1_000_000, seed)).unwrap();
        let sim = control_variate_length(&path, &q, 0.1);
        let exact = exchangeable_stationary(Ratio::new(1, 10), gamma, 1e-15, 2_000_000).expect(|a| 2.0 * q.at_level(a));
        let (_, se) = batch_means(&lengths(&path, &q), 50);
        eprintln!("gamma {gamma}: simulated {sim:.5} exact {exact:.5} (plain se {se:.5})");
        assert!((sim - exact).abs() < 3.0 * se, "{sim} vs {exact}");
    }
}

#[test]
fn small_gamma_degradation_is_linear() {
    let q = FoldedGaussian::new(1.0, 100.0);
    let alpha = 0.1;
    let l0 = 2.0 * q.quantile(1.0 - alpha);
    let slope = q.second_derivative(1.0 - alpha) * alpha * (1.0 - alpha) / 2.0;
    for (gamma, seed) in [(0.005, 3), (0.01, 4)] {
        let path = run_exchangeable(&config(1, 10, gamma, 1_000_000, seed)).unwrap();
        let plain = estimate_expected_length(&path, &q, LengthMode::MeanClipped);
        assert!(plain >= l0 - 0.01);
        let ratio = (control_variate_length(&path, &q, alpha) - l0) / gamma;
        let exact = (exchangeable_stationary(Ratio::new(1, 10), gamma, 1e-15, 4_000_000).expect(|a| 2.0 * q.at_level(a)) - l0) / gamma;
        eprintln!("gamma {gamma}: simulated slope {ratio:.4}, exact {exact:.4}, leading order {slope:.4}");
        assert!((ratio / slope - 1.0).abs() < 0.15);
        assert!((exact / slope - 1.0).abs() < 0.15);
    }
}

#[test]
fn long_run_miss_frequency() {
    let gamma = 0.01;
    let c = config(1, 10, gamma, 1_000_000, 5);
    let path = run_exchangeable(&c).unwrap();
    // Misses are recovered from consecutive states.
    let misses: Vec<f64> = path.windows(2).map(|w| if w[1] < w[0] { 1.0 } else { 0.0 }).collect();
    let (rate, se) = batch_means(&misses, 50);
    let t = misses.len() as f64;
    assert!((rate - 0.1).abs() <= 2.0 / (gamma * t) + 3.0 * se, "{rate} (se {se})");
}

#[test]
fn moments_match_the_exact_law() {
    let gamma = 0.02;
    let path = run_exchangeable(&config(1, 10, gamma, 1_000_000, 6)).unwrap();
    let m = moment_checks(&path, 0.1, gamma);
    let exact = exchangeable_stationary(Ratio::new(1, 10), gamma, 1e-15, 2_000_000);
    let m2 = exact.expect(|a| (project(a) - 0.1).powi(2));
    eprintln!("{m:?}, exact m2 {m2}");
    assert!(m.m1.abs() <= 3.0 * m.m1_se);
    assert!((m.m2 - m2).abs() <= 3.0 * m.m2_se);
    assert!((m2 / m.m2_predicted - 1.0).abs() < 0.1);
}

#[test]
fn ar1_chain_at_phi_zero_is_the_exchangeable_chain() {
    let gamma = 0.05;
    let q = FoldedGaussian::new(1.0, 10.0);
    let mut c = config(1, 10, gamma, 1_000_000, 7);
    let exch = run_exchangeable(&c).unwrap();
    c.phi = Some(0.0);
    c.seed = 8;
    let (ar, _) = chain_run_ar1(&c, &q).unwrap();
    // Thin to roughly independent draws.
    let thin = |v: &[f64]| v.iter().step_by(200).copied().collect::<Vec<_>>();
    let (d, p) = ks_two_sample(&thin(&exch), &thin(&ar));
    eprintln!("KS D = {d:.4}, p = {p:.3}");
    assert!(p > 0.01);
}

#[test]
fn ar1_miss_frequency_is_alpha() {
    let q = FoldedGaussian::new(1.0, 10.0);
    for (phi, gamma) in [(0.9, 0.01), (0.99, 0.05)] {
        let eps = ar1_residuals(phi, 10.0, 500_000, 9);
        let (_, misses) = aci_on_residuals(&eps, 0.1, gamma, &q);
        let rate = misses.iter().filter(|m| **m).count() as f64 / misses.len() as f64;
        assert!((rate - 0.1).abs() <= 2.0 / (gamma * misses.len() as f64));
    }
}

#[test]
fn optimal_learning_rate_is_not_monotone_in_phi() {
    let cfg = SweepConfig::desk();
    let table = sweep_gamma(&cfg).unwrap();
    let stars: Vec<f64> = cfg.phis.iter().map(|p| table.gamma_star(*p).unwrap()).collect();
    eprintln!("phi {:?}\ngamma* {:?}", cfg.phis, stars);
    for p in &cfg.phis {
        eprintln!("phi {p}: per-rep {:?}", table.gamma_star_per_rep(*p));
    }
    assert_eq!(stars[0], 0.0);
    let peak = stars.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peak_at = stars.iter().position(|s| *s == peak).unwrap();
    assert!(peak > 0.0);
    assert!(peak_at > 0 && peak_at < stars.len() - 1, "{stars:?}");
    assert!(*stars.last().unwrap() < peak);
}
