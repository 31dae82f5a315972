mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use common::oracle::{self, c};
use common::Lcg;
use qser_core::embed::{amplitude_embed, angle_embed, embed, iqp_embed, Axis, EmbeddingKind};
use qser_core::measure::probabilities;
use qser_core::qstate::{new_zero_state, Complex, GateOp};
use qser_core::Error;

fn max_vec_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr().sqrt()).fold(0.0, f64::max)
}

#[test]
fn angle_zero_features_give_zero_state() {
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for n in 1..=5 {
            assert_eq!(angle_embed(&vec![0.0; n], axis).unwrap(), new_zero_state(n).unwrap());
        }
    }
}

#[test]
fn angle_rx_pi_flips() {
    let s = angle_embed(&[PI], Axis::X).unwrap();
    let p = probabilities(&s);
    assert!(p[0].abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
    // -i|1>
    assert!((s.amplitudes()[1] - c(0.0, -1.0)).norm_sqr() < 1e-30);
}

#[test]
fn angle_y_matches_oracle() {
    let f = [FRAC_PI_2, FRAC_PI_3];
    let s = angle_embed(&f, Axis::Y).unwrap();
    let u = oracle::circuit(2, &[GateOp::ry(0, f[0]), GateOp::ry(1, f[1])]);
    let want = oracle::apply(&u, &oracle::zero_state(2));
    assert!(max_vec_diff(s.amplitudes(), &want) < 1e-12);
}

#[test]
fn amplitude_examples() {
    let s = amplitude_embed(&[1.0, 0.0, 0.0, 0.0], 2).unwrap();
    assert_eq!(s, new_zero_state(2).unwrap());

    let s = amplitude_embed(&[1.0; 4], 2).unwrap();
    assert!(s.amplitudes().iter().all(|a| (a - c(0.5, 0.0)).norm_sqr() < 1e-30));

    let s = amplitude_embed(&[3.0, 4.0], 1).unwrap();
    assert!(max_vec_diff(s.amplitudes(), &[c(0.6, 0.0), c(0.8, 0.0)]) < 1e-15);

    assert!(matches!(amplitude_embed(&[0.0; 4], 2), Err(Error::Embedding(_))));
    assert!(matches!(amplitude_embed(&[1.0; 5], 2), Err(Error::Embedding(_))));
}

#[test]
fn amplitude_pads_and_is_scale_invariant() {
    let mut rng = Lcg(5);
    for _ in 0..20 {
        let f = rng.vec(5, -2.0, 2.0);
        let a = amplitude_embed(&f, 3).unwrap();
        assert!(a.amplitudes()[5..].iter().all(|x| *x == c(0.0, 0.0)));
        for scale in [0.01, 3.0, 1e6] {
            let scaled: Vec<f64> = f.iter().map(|x| x * scale).collect();
            let b = amplitude_embed(&scaled, 3).unwrap();
            assert!(max_vec_diff(a.amplitudes(), b.amplitudes()) < 1e-12);
        }
    }
}

#[test]
fn iqp_zero_features_repeats_one_uniform() {
    for n in 1..=4 {
        let p = probabilities(&iqp_embed(&vec![0.0; n], 1).unwrap());
        let u = 1.0 / (1 << n) as f64;
        assert!(p.iter().all(|x| (x - u).abs() < 1e-12));
    }
}

#[test]
fn iqp_single_qubit_stays_balanced() {
    for theta in [0.3, 1.7, -2.2] {
        let p = probabilities(&iqp_embed(&[theta], 1).unwrap());
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn iqp_two_qubits_two_repeats_matches_oracle() {
    let f = [0.7, 1.1];
    let one_repeat =
        [GateOp::h(0), GateOp::h(1), GateOp::rz(0, f[0]), GateOp::rz(1, f[1]), GateOp::cphase(0, 1, f[0] * f[1])];
    let gates: Vec<GateOp> = one_repeat.iter().chain(&one_repeat).copied().collect();
    let want = oracle::apply(&oracle::circuit(2, &gates), &oracle::zero_state(2));
    let got = iqp_embed(&f, 2).unwrap();
    assert!(max_vec_diff(got.amplitudes(), &want) < 1e-12);
}

#[test]
fn width_errors() {
    assert!(matches!(embed(&[0.1, 0.2], 3, &EmbeddingKind::default()), Err(Error::Embedding(_))));
    assert!(matches!(embed(&[0.1, 0.2], 3, &EmbeddingKind::iqp()), Err(Error::Embedding(_))));
    assert!(matches!(iqp_embed(&[0.1], 0), Err(Error::Embedding(_))));
    assert!(matches!(angle_embed(&[f64::NAN], Axis::X), Err(Error::Embedding(_))));
}

#[test]
fn every_embedding_is_normalised() {
    let mut rng = Lcg(17);
    for n in 1..=8 {
        for kind in
            [EmbeddingKind::Angle { axis: Axis::Y }, EmbeddingKind::Amplitude, EmbeddingKind::Iqp { repeats: 2 }]
        {
            let f = rng.vec(kind.input_width(n), -PI, PI);
            let s = embed(&f, n, &kind).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10, "{kind:?} n={n}");
        }
    }
}
