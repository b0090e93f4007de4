use super::*;
use crate::sampling;

fn swap_instance() -> (QuantumChannel, DensityMatrix, DensityMatrix) {
    let lambda = swap_catalytic().unwrap();
    let p = [0.5, 0.3, 0.2];
    let q1 = 5.0 / 13.0;
    (
        lambda,
        DensityMatrix::from_probs(&[q1, 1.0 - q1], "C").unwrap(),
        DensityMatrix::from_probs(&p, "S").unwrap(),
    )
}

fn shift_direction() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[-1.0, 0.0, 1.0])
}

#[test]
fn ideal_catalysis_keeps_distance_zero() {
    let (lambda, tau, rho) = swap_instance();
    let traces = run_protocol(&lambda, &tau, &rho, &NoiseModel::none(), 20).unwrap();
    for t in &traces {
        assert!(t.catalyst_dist < 1e-13, "round {} drifted {}", t.round, t.catalyst_dist);
    }
}

#[test]
fn example1_arithmetic_to_machine_precision() {
    let report = reproduce_example1([0.5, 0.3, 0.2], 0.01).unwrap();
    assert!((report.q[0] - 5.0 / 13.0).abs() < 1e-15);
    assert!((report.q[1] - 8.0 / 13.0).abs() < 1e-15);
    assert!((report.round1_analytic - (5.0 / 13.0 + 0.01)).abs() < 1e-15);
    assert!((report.round2_analytic - (5.0 / 13.0 - 0.013)).abs() < 1e-15);
    assert!(report.max_error <= 1e-12, "max error {}", report.max_error);
}

#[test]
fn example1_rejects_invalid_parameters() {
    assert!(reproduce_example1([0.5, 0.5, 0.0], 0.01).is_err());
    assert!(reproduce_example1([0.5, 0.3, 0.2], 0.3).is_err());
}

#[test]
fn alternating_shift_matches_example1_analytics() {
    let (lambda, tau, rho) = swap_instance();
    let epsilon = 0.01;
    // round 1 sign −ε on p₁ means direction (−1, 0, +1) with +ε amplitude
    let noise = NoiseModel {
        kind: NoiseKind::SystemPrepShift {
            direction: shift_direction(),
            epsilon,
            schedule: Schedule::Alternating,
        },
        seed: 1,
    };
    let traces = run_protocol(&lambda, &tau, &rho, &noise, 2).unwrap();
    let report = reproduce_example1([0.5, 0.3, 0.2], epsilon).unwrap();

    let q1_round1 = traces[0].round;
    assert_eq!(q1_round1, 1);
    // catalyst_dist is the trace norm ‖diag(δ, −δ)‖₁ = 2|δ|
    let expected1 = 2.0 * (report.round1_analytic - report.q[0]).abs();
    let expected2 = 2.0 * (report.round2_analytic - report.q[0]).abs();
    assert!((traces[0].catalyst_dist - expected1).abs() < 1e-12);
    assert!((traces[1].catalyst_dist - expected2).abs() < 1e-12);
}

#[test]
fn catalyst_prep_shift_stays_bounded_by_epsilon() {
    let (lambda, tau, rho) = swap_instance();
    for epsilon in [0.01, 0.05, 0.1] {
        let noise = NoiseModel {
            kind: NoiseKind::CatalystPrepShift { epsilon },
            seed: 5,
        };
        let traces = run_protocol(&lambda, &tau, &rho, &noise, 50).unwrap();
        for t in &traces {
            assert!(
                t.catalyst_dist <= epsilon + 1e-12,
                "round {} exceeded ε = {epsilon}: {}",
                t.round,
                t.catalyst_dist
            );
        }
    }
}

#[test]
fn catalyst_prep_shift_requires_nominal_catalysis() {
    let (lambda, tau, _rho) = swap_instance();
    let wrong_nominal = DensityMatrix::from_probs(&[0.4, 0.4, 0.2], "S").unwrap();
    let noise = NoiseModel {
        kind: NoiseKind::CatalystPrepShift { epsilon: 0.05 },
        seed: 6,
    };
    assert!(matches!(
        run_protocol(&lambda, &tau, &wrong_nominal, &noise, 5),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn fixed_shift_stays_under_linear_envelope() {
    // the accumulated error is bounded above by twice the linear
    // extrapolation of the first-round error
    let (lambda, tau, rho) = swap_instance();
    let epsilon = 0.01;
    let noise = NoiseModel {
        kind: NoiseKind::SystemPrepShift {
            direction: shift_direction(),
            epsilon,
            schedule: Schedule::Fixed,
        },
        seed: 2,
    };
    let traces = run_protocol(&lambda, &tau, &rho, &noise, 20).unwrap();
    let c = traces[0].catalyst_dist / epsilon;
    assert!(c > 0.0);
    for t in &traces {
        assert!(
            t.catalyst_dist <= 2.0 * (t.round as f64) * epsilon * c + 1e-12,
            "round {} broke the linear envelope: {}",
            t.round,
            t.catalyst_dist
        );
    }
}

#[test]
fn alternating_shift_accumulates_beyond_single_round_error() {
    let (lambda, tau, rho) = swap_instance();
    let epsilon = 0.01;
    let noise = NoiseModel {
        kind: NoiseKind::SystemPrepShift {
            direction: shift_direction(),
            epsilon,
            schedule: Schedule::Alternating,
        },
        seed: 3,
    };
    let traces = run_protocol(&lambda, &tau, &rho, &noise, 2).unwrap();
    assert!(
        traces[1].catalyst_dist > traces[0].catalyst_dist + 1e-6,
        "two noisy rounds must accumulate: {} vs {}",
        traces[1].catalyst_dist,
        traces[0].catalyst_dist
    );
}

#[test]
fn catalytic_channels_are_immune_to_system_shifts() {
    for seed in 0..5u64 {
        let (lambda, tau) = sampling::random_catalytic_instance(2, 2, seed);
        let rho = DensityMatrix::from_probs(&[0.6, 0.4], "S").unwrap();
        let mut dir = ComplexMatrix::from_diag(&[-1.0, 1.0]);
        dir = dir.scale_re(0.5);
        for schedule in [Schedule::Fixed, Schedule::Alternating, Schedule::RandomSign] {
            let noise = NoiseModel {
                kind: NoiseKind::SystemPrepShift {
                    direction: dir.clone(),
                    epsilon: 0.2,
                    schedule,
                },
                seed: 100 + seed,
            };
            let traces = run_protocol(&lambda, &tau, &rho, &noise, 10).unwrap();
            for t in &traces {
                assert!(
                    t.catalyst_dist < 1e-10,
                    "catalytic channel degraded at round {}: {}",
                    t.round,
                    t.catalyst_dist
                );
            }
        }
    }
}

#[test]
fn identical_seeds_give_bit_identical_traces() {
    let (lambda, tau, rho) = swap_instance();
    let noise = NoiseModel {
        kind: NoiseKind::SystemPrepShift {
            direction: shift_direction(),
            epsilon: 0.02,
            schedule: Schedule::RandomSign,
        },
        seed: 99,
    };
    let a = run_protocol(&lambda, &tau, &rho, &noise, 30).unwrap();
    let b = run_protocol(&lambda, &tau, &rho, &noise, 30).unwrap();
    for (x, y) in a.iter().zip(b.iter()) {
        assert_eq!(x.catalyst_dist.to_bits(), y.catalyst_dist.to_bits());
        assert_eq!(x.system_out.mat.data, y.system_out.mat.data);
    }
}

#[test]
fn channel_mix_degrades_catalyst() {
    let (lambda, tau, rho) = swap_instance();
    let noise = NoiseModel {
        kind: NoiseKind::ChannelMix { weight: 0.1 },
        seed: 4,
    };
    let traces = run_protocol(&lambda, &tau, &rho, &noise, 5).unwrap();
    assert!(traces[0].catalyst_dist > 1e-4, "mixing with depolarizing noise must degrade");
    assert!(trace_is_physical(&traces));
}

#[test]
fn oversized_noise_is_rejected() {
    let (lambda, tau, rho) = swap_instance();
    let noise = NoiseModel {
        kind: NoiseKind::CatalystPrepShift { epsilon: 2.5 },
        seed: 0,
    };
    assert!(run_protocol(&lambda, &tau, &rho, &noise, 3).is_err());
}

#[test]
fn invalid_shift_direction_is_rejected() {
    let (lambda, tau, rho) = swap_instance();
    let noise = NoiseModel {
        kind: NoiseKind::SystemPrepShift {
            direction: ComplexMatrix::from_diag(&[1.0, 0.0, 1.0]), // not traceless
            epsilon: 0.01,
            schedule: Schedule::Fixed,
        },
        seed: 0,
    };
    assert!(run_protocol(&lambda, &tau, &rho, &noise, 3).is_err());
}

#[test]
fn csv_rendering_has_header_and_rows() {
    let (lambda, tau, rho) = swap_instance();
    let traces = run_protocol(&lambda, &tau, &rho, &NoiseModel::none(), 3).unwrap();
    let csv = trace_csv(&traces, &rho);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "round,catalyst_dist,input_perturbation");
    assert_eq!(lines.len(), 4);
}

#[test]
fn sim_config_roundtrip_and_build() {
    let cfg_text = r#"{
        "builtin": "swap_example1",
        "noise": {"kind": "system_prep_shift",
                  "direction": {"rows": 3, "cols": 3,
                                "data": [[-1.0,0.0],[0.0,0.0],[0.0,0.0],
                                         [0.0,0.0],[0.0,0.0],[0.0,0.0],
                                         [0.0,0.0],[0.0,0.0],[1.0,0.0]]},
                  "epsilon": 0.01, "schedule": "alternating"},
        "seed": 7
    }"#;
    let cfg: SimConfig = serde_json::from_str(cfg_text).unwrap();
    let (channel, tau, rho, noise) = cfg.build().unwrap();
    let traces = run_protocol(&channel, &tau, &rho, &noise, 2).unwrap();
    assert_eq!(traces.len(), 2);
    let manifest = cfg.manifest(2);
    assert_eq!(manifest["seed"], serde_json::json!(7));
}

#[test]
fn sim_config_rejects_unknown_keys() {
    let cfg_text = r#"{"builtin": "swap_example1", "noise": {"kind": "none"}, "seed": 1, "bogus": 2}"#;
    assert!(serde_json::from_str::<SimConfig>(cfg_text).is_err());
}

use crate::channel::constructors::swap_catalytic;
