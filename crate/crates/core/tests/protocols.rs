mod common;

use std::f64::consts::FRAC_PI_2;

use common::{random_unitary, rng};
use xtalk_core::dataset::iris_binary;
use xtalk_core::protocols::{
    coin_flip_p1, compose_scenario, split_dataset, sqqnn_accuracy, sqqnn_train, xor_delta_max, xor_probs,
    ScenarioTiming, DEFAULT_DEGREE, DEFAULT_EPSILON, DEFAULT_SPLIT_SEED, DEFAULT_TEST_FRACTION,
};
use xtalk_core::tomo::QuantumChannel;

#[test]
fn identity_channel_matches_no_attack_everywhere() {
    let id = QuantumChannel::<f64>::identity();
    let mut r = rng(31);
    for _ in 0..10 {
        let v = random_unitary(&mut r, 2);
        let clean = compose_scenario(ScenarioTiming::NoAttack, &v, None).unwrap();
        for t in ScenarioTiming::ALL {
            assert!(compose_scenario(t, &v, Some(&id)).unwrap().matrix().approx_eq(clean.matrix(), 1e-12));
        }
    }
    for t in ScenarioTiming::ALL {
        for x1 in 0..2 {
            for x2 in 0..2 {
                let a = xor_probs(x1, x2, t, Some(&id)).unwrap();
                let b = xor_probs::<f64>(x1, x2, ScenarioTiming::NoAttack, None).unwrap();
                assert!((a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12);
            }
        }
        assert!(xor_delta_max(t, Some(&id)).unwrap() <= 1e-12);
    }
}

#[test]
fn coin_curve_without_attack_is_sin_squared() {
    for k in 0..=180 {
        let l = FRAC_PI_2 * k as f64 / 180.0;
        let p = coin_flip_p1(l, ScenarioTiming::NoAttack, None).unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!((p - l.sin().powi(2)).abs() <= 1e-10);
    }
}

#[test]
fn xor_outcomes_sum_to_one_under_random_channels() {
    let mut r = rng(32);
    for _ in 0..5 {
        let ch = xtalk_core::dynamics::channel_from_unitary(&random_unitary(&mut r, 8), Default::default()).unwrap();
        for t in ScenarioTiming::ALL {
            for x1 in 0..2 {
                for x2 in 0..2 {
                    let (p0, p1) = xor_probs(x1, x2, t, Some(&ch)).unwrap();
                    assert!((p0 + p1 - 1.0).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn iris_baseline_is_near_perfect() {
    let d = iris_binary::<f64>();
    let (train, test) = split_dataset(&d, DEFAULT_TEST_FRACTION, DEFAULT_SPLIT_SEED).unwrap();
    assert_eq!((train.len(), test.len()), (70, 30));
    let m = sqqnn_train(&train.features, &train.labels, DEFAULT_DEGREE, DEFAULT_EPSILON).unwrap();
    let acc = sqqnn_accuracy(&m, &test.features, &test.labels, ScenarioTiming::NoAttack, None).unwrap();
    assert!(acc >= 0.95, "{acc}");
    let id = QuantumChannel::identity();
    for t in ScenarioTiming::ALL {
        assert_eq!(sqqnn_accuracy(&m, &test.features, &test.labels, t, Some(&id)).unwrap(), acc);
    }
}

#[test]
fn accuracy_ignores_sample_order() {
    let d = iris_binary::<f64>();
    let m = sqqnn_train(&d.features, &d.labels, 2, 1e-16).unwrap();
    let ch = xtalk_core::dynamics::channel_from_unitary(&random_unitary(&mut rng(33), 8), Default::default()).unwrap();
    let fwd = sqqnn_accuracy(&m, &d.features, &d.labels, ScenarioTiming::AttackerFirst, Some(&ch)).unwrap();
    let rf: Vec<_> = d.features.iter().rev().cloned().collect();
    let rl: Vec<_> = d.labels.iter().rev().copied().collect();
    assert_eq!(fwd, sqqnn_accuracy(&m, &rf, &rl, ScenarioTiming::AttackerFirst, Some(&ch)).unwrap());
}

#[test]
fn feature_width_mismatch_is_reported() {
    let d = iris_binary::<f64>();
    let m = sqqnn_train(&d.features, &d.labels, 1, 1e-16).unwrap();
    assert!(sqqnn_accuracy(&m, &[vec![1.0, 2.0]], &[1.0], ScenarioTiming::NoAttack, None).is_err());
    assert!(sqqnn_train(&d.features, &d.labels, 1, 0.5).is_err());
}
