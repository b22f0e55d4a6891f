//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL` line to stderr (uncaptured) before asserting.

use std::io::Write;
use std::sync::OnceLock;

use num_rational::Ratio;
use rand::Rng;
use tscp_core::datagen::{generate_dataset, NoiseSpec};
use tscp_core::methods::{aci_error_bound_check, online_steps, run_aci, SplitPolicy};
use tscp_core::models::{ModelKind, RegressorSpec};
use tscp_core::seed;
use tscp_harness::bench::{run_benchmark, summarize, SummaryRow};
use tscp_harness::config::{ExperimentConfig, ModelConfig, NoiseCell};
use tscp_harness::price::{run_price_pipeline, standin_records, PriceConfig};
use tscp_harness::{Method, ResultRow};
use tscp_theory::{
    control_variate_length, estimate_expected_length, moment_checks, run_exchangeable, sweep_gamma, ChainConfig,
    FoldedGaussian, LengthMode, QuantileFn, SweepConfig,
};

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {verdict} | {detail}");
    assert!(pass, "criterion {n} failed: {detail}");
}

fn find<'a>(s: &'a [SummaryRow], method: &str, phi: f64) -> &'a SummaryRow {
    s.iter()
        .find(|r| r.method == method && r.phi == phi)
        .unwrap_or_else(|| panic!("no summary for {method} at phi {phi}"))
}

#[test]
fn criterion_1_scp_exchangeable_coverage() {
    let cfg = ExperimentConfig {
        methods: vec!["scp".into()],
        noise: vec![NoiseCell::arma(0.0, 0.0, 10.0)],
        repetitions: 500,
        seed: 1,
        model: ModelConfig {
            kind: ModelKind::Ridge,
            ..ModelConfig::default()
        },
        ..ExperimentConfig::paper_default()
    };
    let s = summarize(&run_benchmark(&cfg).unwrap());
    let (c, se) = (s[0].coverage, s[0].coverage_se);
    let (lo, hi) = (0.9 - 3.0 * se, 0.9 + 2.0 / 202.0 + 3.0 * se);
    report(
        1,
        (lo..=hi).contains(&c),
        &format!("mean coverage {c:.4} (se {se:.4}) in [{lo:.4}, {hi:.4}]"),
    );
}

#[test]
fn criterion_2_aci_error_bound() {
    let mut rng = seed::rng(2);
    let mut runs = 0;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    while runs < 1000 {
        let phi = rng.random_range(-0.95..0.99);
        let t1 = rng.random_range(10..150);
        let data = generate_dataset(6, 40, t1, &NoiseSpec::new(phi, 0.0, 1.0).unwrap(), rng.random()).unwrap();
        let steps = online_steps(&RegressorSpec::ridge(1.0), &data, &SplitPolicy::default(), rng.random_range(1..5), rng.random()).unwrap();
        for _ in 0..4 {
            let alpha = rng.random_range(0.01..0.5);
            let gamma = rng.random_range(1e-3..1.0);
            // `run_aci` asserts the bound itself and panics on violation.
            let r = run_aci(&steps, alpha, gamma, rng.random()).unwrap();
            let miss = r.covered.iter().filter(|c| !**c).count() as f64 / r.len() as f64;
            worst = worst.max((miss - alpha).abs() * gamma * t1 as f64 / 2.0);
            ok &= aci_error_bound_check(&r, gamma).unwrap();
            runs += 1;
        }
    }
    report(
        2,
        ok,
        &format!("{runs} runs, largest |miss - alpha| / (2 / (gamma T1)) = {worst:.3}"),
    );
}

#[test]
fn criterion_3_length_expansion() {
    let alpha = Ratio::new(1, 100);
    // Largest score: the folded Gaussian quantile at 1 - 1e-6.
    let q = FoldedGaussian::new(1.0, 4.891638);
    let l0 = 2.0 * q.quantile(0.99);
    let mut pass = true;
    let mut detail = Vec::new();
    for (gamma, expected, seed) in [(0.03, 1.0159, 31), (0.05, 1.0338, 32)] {
        let cfg = ChainConfig {
            steps: 1_000_000,
            seed,
            ..ChainConfig::new(alpha, gamma)
        };
        let path = run_exchangeable(&cfg).unwrap();
        let ratio = control_variate_length(&path, &q, 0.01) / l0;
        let plain = estimate_expected_length(&path, &q, LengthMode::MeanClipped) / l0;
        pass &= (ratio - expected).abs() <= 0.003;
        detail.push(format!(
            "gamma {gamma}: E[L]/L0 = {ratio:.4} (plain mean {plain:.4}), target {expected} +- 0.003"
        ));
    }
    report(3, pass, &detail.join("; "));
}

#[test]
fn criterion_4_moments() {
    let gamma = 0.001;
    let cfg = ChainConfig {
        steps: 1_000_000,
        seed: 4,
        ..ChainConfig::new(Ratio::new(1, 10), gamma)
    };
    let m = moment_checks(&run_exchangeable(&cfg).unwrap(), 0.1, gamma);
    let first = m.m1.abs() <= 3.0 * m.m1_se;
    let rel = (m.m2 / m.m2_predicted - 1.0).abs();
    report(
        4,
        first && rel <= 0.1,
        &format!(
            "mean offset {:.2e} (3se {:.2e}); second moment {:.3e} vs {:.3e} ({:.1}% off)",
            m.m1,
            3.0 * m.m1_se,
            m.m2,
            m.m2_predicted,
            100.0 * rel
        ),
    );
}

#[test]
fn criterion_5_sweep_shape() {
    let cfg = SweepConfig {
        // Step 0.005, so 0.05 is on the grid.
        gammas: (0..40).map(|i| i as f64 * 0.005).collect(),
        phis: vec![0.0, 0.85, 0.99],
        ..SweepConfig::desk()
    };
    let t = sweep_gamma(&cfg).unwrap();
    let at = |phi: f64, gamma: f64| {
        t.curve(phi)
            .into_iter()
            .find(|(g, _)| (g - gamma).abs() < 1e-12)
            .map(|(_, l)| l)
            .expect("gamma on the grid")
    };
    let star0 = t.gamma_star(0.0).unwrap();
    let star99 = t.gamma_star(0.99).unwrap();
    let gain = at(0.99, star99) < at(0.99, 0.0);
    let l05: Vec<f64> = cfg.phis.iter().map(|p| at(*p, 0.05)).collect();
    let decreasing = l05.windows(2).all(|w| w[1] < w[0]);
    report(
        5,
        star0 == 0.0 && gain && decreasing,
        &format!(
            "gamma*(0) = {star0}; phi 0.99: E[L](gamma* = {star99:.3}) = {:.4} vs E[L](0) = {:.4}; E[L] at gamma 0.05 over phi {:?} = {:?}",
            at(0.99, star99),
            at(0.99, 0.0),
            cfg.phis,
            l05.iter().map(|l| (l * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    );
}

const GRID: [f64; 5] = [0.1, 0.8, 0.9, 0.95, 0.99];

/// Desk-scale synthetic benchmark shared by criteria 6 and 7.
fn benchmark() -> &'static (Vec<ResultRow>, Vec<SummaryRow>) {
    static CELL: OnceLock<(Vec<ResultRow>, Vec<SummaryRow>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = ExperimentConfig {
            methods: ["scp", "osscp", "aci_0", "aci_0.05", "agaci", "enbpi", "enbpi_v2"]
                .map(String::from)
                .to_vec(),
            noise: GRID.map(|p| NoiseCell::arma(p, p, 10.0)).to_vec(),
            repetitions: 100,
            seed: 6,
            model: ModelConfig {
                tree_count: 100,
                ..ModelConfig::default()
            },
            ..ExperimentConfig::paper_default()
        };
        let rows = run_benchmark(&cfg).unwrap();
        let s = summarize(&rows);
        (rows, s)
    })
}

#[test]
fn criterion_6_benchmark_orderings() {
    let s = &benchmark().1;
    let mut lines = Vec::new();
    let (os, off) = (find(s, "osscp", 0.99).coverage, find(s, "scp", 0.99).coverage);
    let a = os > off;
    lines.push(format!("(a) osscp {os:.4} > scp {off:.4} at 0.99: {a}"));
    let (v2, v1) = (find(s, "enbpi_v2", 0.9).coverage, find(s, "enbpi", 0.9).coverage);
    let b = (v2 - 0.9).abs() <= (v1 - 0.9).abs();
    lines.push(format!("(b) enbpi_v2 {v2:.4} vs enbpi {v1:.4} at 0.9: {b}"));
    let ag: Vec<f64> = GRID.iter().map(|p| find(s, "agaci", *p).coverage).collect();
    let c = ag.iter().all(|x| *x >= 0.888);
    lines.push(format!("(c) agaci coverage {ag:.4?} >= 0.888: {c}"));
    let lens: Vec<(f64, f64)> = GRID
        .iter()
        .map(|p| (find(s, "agaci", *p).median_length, find(s, "aci_0", *p).median_length))
        .collect();
    let d = lens.iter().all(|(ag, a0)| *ag <= 1.05 * a0);
    lines.push(format!("(d) agaci vs aci_0 median length {lens:.3?}: {d}"));
    let (o9, a9) = (find(s, "osscp", 0.9).coverage, find(s, "aci_0.05", 0.9).coverage);
    lines.push(format!("osscp {o9:.4} < aci_0.05 {a9:.4} at 0.9: {}", o9 < a9));
    report(6, a && b && c && d && o9 < a9, &lines.join("; "));
}

#[test]
fn criterion_7_infinite_rate() {
    let r = find(&benchmark().1, "aci_0.05", 0.95);
    let rate = r.pct_infinite / 100.0;
    report(
        7,
        (rate - 0.0445).abs() <= 0.01,
        &format!("aci_0.05 at phi = theta = 0.95: infinite rate {rate:.4} (se {:.4}), target 0.0445 +- 0.01", r.pct_infinite_se / 100.0),
    );
}

#[test]
fn criterion_8_price_pipeline() {
    let cfg = PriceConfig::default();
    let records = standin_records(cfg.window_days + cfg.test_days + 1, 8);
    let out = run_price_pipeline(&records, &cfg).unwrap();
    let complete = out.summary.len() == 6 && out.intervals.iter().all(|h| h.len() == 6 * cfg.test_days);
    let ag = out.coverage(Method::Agaci).unwrap();
    let (os, off) = (out.coverage(Method::Osscp).unwrap(), out.coverage(Method::Scp).unwrap());
    report(
        8,
        complete && (0.85..=1.0).contains(&ag) && os >= off,
        &format!("six methods complete: {complete}; agaci coverage {ag:.4}; osscp {os:.4} >= scp {off:.4}"),
    );
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.toml");
    std::fs::write(
        &config,
        r#"
config_version = 1
methods = ["scp", "osscp_rand", "aci_0.05", "agaci", "naive", "enbpi_v2"]
alpha = 0.1
t0 = 60
t1 = 30
repetitions = 4
seed = 9

[[noise]]
phi = 0.9
theta = 0.9
variance = 10.0

[[noise]]
phi = 0.5
theta = 0.0
variance = 1.0

[model]
kind = "bagged_trees"
tree_count = 5
"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_tscp"))
            .args(["bench", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    report(
        9,
        a == b && !a.is_empty(),
        &format!("two bench runs with seed 9: {} bytes each, identical: {}", a.len(), a == b),
    );
}
