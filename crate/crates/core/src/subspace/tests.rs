use nalgebra::DMatrix;

use super::*;
use crate::linalg::spectrum_distance;
use crate::lti::{prbs, random_stable_model, simulate};

fn prbs_record(model: &DiscreteStateSpace, len: usize, seed: u64) -> SignalRecord {
    let u = DMatrix::from_fn(model.inputs(), len, |_, _| 0.0);
    let mut u = u;
    for j in 0..model.inputs() {
        let seq = prbs(11, 1, len, 1.0, seed + j as u64).unwrap();
        u.row_mut(j).copy_from_slice(&seq);
    }
    simulate(model, &u, &nalgebra::DVector::zeros(model.order()), None).unwrap()
}

fn markov_error(a: &DiscreteStateSpace, b: &DiscreteStateSpace, lags: usize) -> f64 {
    let ma = a.markov_parameters(lags);
    let mb = b.markov_parameters(lags);
    let scale = ma.iter().map(|m| m.amax()).fold(0.0, f64::max);
    ma.iter().zip(&mb).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max) / scale
}

#[test]
fn hankel_examples() {
    let s = DMatrix::from_row_slice(1, 4, &[1.0, 2.0, 3.0, 4.0]);
    let h = block_hankel(&s, 2, 3).unwrap();
    assert_eq!(h, DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 3.0, 4.0]));
    let two = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 10.0, 20.0, 30.0]);
    let h = block_hankel(&two, 2, 2).unwrap();
    assert_eq!(h, DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 10.0, 20.0, 2.0, 3.0, 20.0, 30.0]));
    assert!(matches!(block_hankel(&s, 3, 3), Err(SidError::InsufficientData(_))));
}

#[test]
fn order_rule() {
    assert_eq!(select_order(&[10.0, 9.0, 1e-8, 1e-9], 1e-3), 2);
    assert_eq!(select_order(&[], 1e-3), 0);
    assert_eq!(select_order(&[0.0, 0.0], 1e-3), 0);
    assert_eq!(select_order(&[1.0, 0.5, 0.2], 1e-3), 3);
}

#[test]
fn noise_free_second_order_round_trip() {
    let truth = random_stable_model(2, 1, 1, 0.3, 0.95, 1.0, 3).unwrap();
    let rec = prbs_record(&truth, 2000, 9);
    let id = identify(&rec, &HankelConfig::default()).unwrap();
    assert_eq!(id.order, 2);
    assert!(spectrum_distance(&id.model.poles(), &truth.poles()) < 1e-6);
    assert!(id.singular_values.windows(2).all(|w| w[0] >= w[1] && w[1] >= 0.0));
}

#[test]
fn markov_parameters_recovered() {
    for (seed, n, m, l) in [(1, 2, 1, 1), (2, 3, 1, 1), (4, 4, 1, 1), (5, 3, 2, 2), (6, 4, 2, 1)] {
        let truth = random_stable_model(n, m, l, 0.2, 0.9, 0.1, seed).unwrap();
        let rec = prbs_record(&truth, 4000, seed * 11);
        let id = identify(&rec, &HankelConfig { order: Some(n), ..Default::default() }).unwrap();
        let err = markov_error(&truth, &id.model, 20);
        assert!(err < 1e-5, "seed {seed}: Markov error {err:e}");
        let dist = spectrum_distance(&id.model.poles(), &truth.poles());
        assert!(dist < 1e-6, "seed {seed}: {dist:e} {:?} {:?}", truth.poles(), id.singular_values);
    }
}

#[test]
fn initial_state_regression() {
    let truth = random_stable_model(3, 1, 1, 0.3, 0.9, 1.0, 21).unwrap();
    let u = DMatrix::from_row_slice(1, 1500, &prbs(10, 1, 1500, 1.0, 4).unwrap());
    let x0 = nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let rec = simulate(&truth, &u, &x0, None).unwrap();
    let with = identify(&rec, &HankelConfig { estimate_x0: true, ..Default::default() }).unwrap();
    assert!(markov_error(&truth, &with.model, 20) < 1e-6);
}

#[test]
fn explicit_order_is_used() {
    let truth = random_stable_model(4, 1, 1, 0.3, 0.9, 1.0, 8).unwrap();
    let rec = prbs_record(&truth, 1000, 2);
    let id = identify(&rec, &HankelConfig { order: Some(2), ..Default::default() }).unwrap();
    assert_eq!(id.order, 2);
    assert_eq!(id.model.order(), 2);
}

#[test]
fn zero_output_is_rank_deficient() {
    let u = DMatrix::from_row_slice(1, 300, &prbs(8, 1, 300, 1.0, 1).unwrap());
    let y = DMatrix::zeros(1, 300);
    assert!(matches!(pi_moesp(&u, &y, 1.0, &HankelConfig::default()), Err(SidError::RankDeficient(_))));
}

#[test]
fn short_records_rejected() {
    let u = DMatrix::from_element(1, 40, 1.0);
    let y = DMatrix::from_element(1, 40, 1.0);
    assert!(matches!(pi_moesp(&u, &y, 1.0, &HankelConfig::default()), Err(SidError::InsufficientData(_))));
    let y = DMatrix::from_element(1, 39, 1.0);
    assert!(pi_moesp(&u, &y, 1.0, &HankelConfig::default()).is_err());
}

#[test]
fn identification_is_deterministic() {
    let truth = random_stable_model(3, 1, 1, 0.3, 0.9, 1.0, 17).unwrap();
    let mut rec = prbs_record(&truth, 800, 5);
    let noise = crate::lti::white_noise(0.1, 800, 3).unwrap();
    for (y, v) in rec.outputs[0].samples.iter_mut().zip(noise) {
        *y += v;
    }
    let cfg = HankelConfig { order: Some(3), ..Default::default() };
    let a = identify(&rec, &cfg).unwrap();
    let b = identify(&rec, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn detrending_stays_close_on_zero_mean_input() {
    let truth = random_stable_model(2, 1, 1, 0.3, 0.8, 1.0, 12).unwrap();
    let rec = prbs_record(&truth, 4000, 7);
    let id = identify(&rec, &HankelConfig { detrend: true, order: Some(2), ..Default::default() }).unwrap();
    assert!(spectrum_distance(&id.model.poles(), &truth.poles()) < 1e-2);
}

