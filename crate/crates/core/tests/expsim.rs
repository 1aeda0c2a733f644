mod common;

use cluster_bell::expsim::{
    self, estimate_correlation, noisy_target, outcome_probabilities, run_many, run_rng,
    sample_counts, setting_for, summarize, ExperimentConfig, ProbabilityTable,
};
use cluster_bell::qstate;
use cluster_bell::{PauliAxis, PauliString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const MEASURED: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

#[test]
fn parity_sums_match_pauli_expectations() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let pure = random_state(&mut rng, 4);
    let mixed = qstate::apply_white_noise(&random_state(&mut rng, 4), 0.6).unwrap();
    let first = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    for a in first {
        for b in MEASURED {
            for c_ in MEASURED {
                for d in MEASURED {
                    let setting = setting_for([a, b, c_, d]).unwrap();
                    let p = PauliString::new(vec![a, b, c_, d], Default::default());
                    for s in [&pure, &mixed] {
                        let t = outcome_probabilities(s, &setting).unwrap();
                        assert!((t.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                        assert!(t.probabilities.iter().all(|&x| x >= -1e-15));
                        assert!((t.parity_sum() - dense_expectation(s, &dense(&p))).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn removed_polarizer_is_a_marginal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_state(&mut rng, 4);
    for axis in MEASURED {
        let full = outcome_probabilities(
            &s,
            &setting_for([axis, PauliAxis::Z, PauliAxis::X, PauliAxis::X]).unwrap(),
        )
        .unwrap();
        let marg = outcome_probabilities(
            &s,
            &setting_for([PauliAxis::I, PauliAxis::Z, PauliAxis::X, PauliAxis::X]).unwrap(),
        )
        .unwrap();
        for k in 0..8 {
            let summed = full.probabilities[k] + full.probabilities[k + 8];
            assert!((summed - marg.probabilities[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn poisson_cells_concentrate() {
    let uniform = ProbabilityTable {
        setting: setting_for([PauliAxis::X; 4]).unwrap(),
        probabilities: vec![1.0 / 16.0; 16],
    };
    let cfg = ExperimentConfig {
        mean_counts: 1e6,
        ..Default::default()
    };
    let mut rng = run_rng(1, 0);
    let t = sample_counts(&uniform, &cfg, &mut rng);
    let mean = 1e6 / 16.0;
    for &n in &t.counts {
        assert!((n as f64 - mean).abs() < 5.0 * mean.sqrt());
    }
}

#[test]
fn efficiencies_and_duration_scale_means() {
    let uniform = ProbabilityTable {
        setting: setting_for([PauliAxis::Z; 4]).unwrap(),
        probabilities: vec![1.0 / 16.0; 16],
    };
    let cfg = ExperimentConfig {
        mean_counts: 1e6,
        efficiencies: [0.5, 1.0, 1.0, 0.5],
        duration: 1200.0,
        ..Default::default()
    };
    let total: u64 = sample_counts(&uniform, &cfg, &mut run_rng(2, 0)).total();
    let expect = 1e6 * 0.25 * 2.0;
    assert!((total as f64 - expect).abs() < 5.0 * expect.sqrt());
}

#[test]
fn estimator_consistent_at_high_counts() {
    let cfg = ExperimentConfig {
        mean_counts: 1e6,
        seed: 12,
        ..Default::default()
    };
    let state = noisy_target(&cfg).unwrap();
    let analytic: Vec<f64> = expsim::cluster_probabilities(&state)
        .unwrap()
        .iter()
        .map(ProbabilityTable::parity_sum)
        .collect();
    let run = expsim::run_experiment(&state, &cfg, 0).unwrap();
    for (est, truth) in run.correlations.iter().zip(&analytic) {
        assert!((est.value - truth).abs() < 3.0 * est.stderr);
    }
}

#[test]
fn stderr_halves_when_counts_quadruple() {
    let base = ExperimentConfig {
        mean_counts: 400.0,
        seed: 8,
        ..Default::default()
    };
    let quad = ExperimentConfig {
        mean_counts: 1600.0,
        ..base.clone()
    };
    let state = noisy_target(&base).unwrap();
    let spread = |cfg: &ExperimentConfig| summarize(&run_many(&state, cfg, 200).unwrap()).spread;
    let (s1, s4) = (spread(&base), spread(&quad));
    for (a, b) in s1.iter().zip(&s4) {
        let ratio = a / b;
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }
}

#[test]
fn ideal_state_always_violates() {
    let cfg = ExperimentConfig {
        visibility: 1.0,
        mean_counts: 100.0,
        seed: 99,
        ..Default::default()
    };
    let state = noisy_target(&cfg).unwrap();
    let runs = run_many(&state, &cfg, 1000).unwrap();
    assert!(runs.iter().all(|r| r.s_c > 2.0));
    let big = ExperimentConfig {
        mean_counts: 1e6,
        ..cfg
    };
    let r = expsim::run_experiment(&state, &big, 0).unwrap();
    assert!((r.s_c - 4.0).abs() < 1e-12);
    assert_eq!(r.s_c_err, 0.0);
    assert_eq!(r.sigma_violation, f64::INFINITY);
}

#[test]
fn runs_are_order_independent() {
    let cfg = ExperimentConfig {
        seed: 5,
        ..Default::default()
    };
    let state = noisy_target(&cfg).unwrap();
    let many = run_many(&state, &cfg, 16).unwrap();
    for (i, r) in many.iter().enumerate() {
        assert_eq!(r.run_index, i as u64);
        assert_eq!(*r, expsim::run_experiment(&state, &cfg, i as u64).unwrap());
    }
}

#[test]
fn stderr_formula_tracks_empirical_spread() {
    let cfg = ExperimentConfig {
        seed: 77,
        ..Default::default()
    };
    let state = noisy_target(&cfg).unwrap();
    let sum = summarize(&run_many(&state, &cfg, 1000).unwrap());
    for (m, s) in sum.mean_stderr.iter().zip(&sum.spread) {
        assert!((m / s - 1.0).abs() < 0.2, "{m} vs {s}");
        assert!(*m > 0.035 && *m < 0.055);
    }
    for (e, sign) in sum.mean_correlations.iter().zip([1.0, 1.0, 1.0, -1.0]) {
        assert!((e - sign * 0.6475).abs() < 0.01);
    }
}

#[test]
fn table_totals_feed_estimates() {
    let cfg = ExperimentConfig::default();
    let state = noisy_target(&cfg).unwrap();
    let r = expsim::run_experiment(&state, &cfg, 3).unwrap();
    for (t, e) in r.tables.iter().zip(&r.correlations) {
        assert_eq!(t.total(), e.total);
        assert_eq!(estimate_correlation(t).unwrap(), *e);
    }
    assert_eq!(r.tables[2].counts.len(), 8);
    assert_eq!(r.tables[0].counts.len(), 16);
}
