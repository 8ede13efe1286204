//! The state-vector oracle against every closed form.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wstate_core::analytic::{g1, g2_pair, EnsembleSpec};
use wstate_core::grating::chi;
use wstate_core::oracle::{g1_oracle, g2_normalized_oracle, g2_oracle, WStateOracle};

fn random_phase(rng: &mut impl Rng) -> f64 {
    rng.random_range(-2.0 * TAU..2.0 * TAU)
}

#[test]
fn first_order_matches_intensity_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=12 {
        for ne in 0..=n {
            let spec = EnsembleSpec::new(n, ne).unwrap();
            let oracle = WStateOracle::new(spec).unwrap();
            for _ in 0..50 {
                let d = random_phase(&mut rng);
                let diff = (oracle.g1(d) - g1(spec, d).unwrap()).abs();
                assert!(diff <= 1e-10, "N={n} n_e={ne} d={d}: {diff}");
            }
        }
    }
}

#[test]
fn second_order_matches_pair_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=12 {
        let spec = EnsembleSpec::doubly_excited(n).unwrap();
        let oracle = WStateOracle::new(spec).unwrap();
        for _ in 0..50 {
            let (d1, d2) = (random_phase(&mut rng), random_phase(&mut rng));
            let o = oracle.g2_normalized(d1, d2).unwrap();
            let a = g2_pair(spec, d1, d2).unwrap();
            assert!((o - a).abs() <= 1e-10, "N={n} ({d1}, {d2}): {o} vs {a}");
        }
    }
}

#[test]
fn intensity_special_cases() {
    for n in 2..=12 {
        let single = EnsembleSpec::new(n, 1).unwrap();
        let full = EnsembleSpec::new(n, n).unwrap();
        for d in [0.0, 0.3, 1.0, PI, 4.0, TAU] {
            let c = chi(d, n);
            assert!((g1_oracle(single, d).unwrap() - n as f64 * c * c).abs() < 1e-10);
            assert!((g1_oracle(full, d).unwrap() - n as f64).abs() < 1e-10);
        }
        assert!((g1_oracle(single, 0.0).unwrap() - n as f64).abs() < 1e-10);
    }
}

#[test]
fn unnormalized_g2_examples() {
    let s = EnsembleSpec::doubly_excited(4).unwrap();
    let g1_pi = g1(s, PI).unwrap();
    assert!((g1_pi - 2.0 / 3.0).abs() < 1e-12);
    assert!((g2_oracle(s, PI, PI).unwrap() - 6.0 * g1_pi * g1_pi).abs() < 1e-12);

    // grating zero of N = 3: G1 = n_e(n_e-1)/(N-1) = 1, so G2 = 3 * 1 * 1
    let s = EnsembleSpec::doubly_excited(3).unwrap();
    let d = TAU / 3.0;
    assert!((g1(s, d).unwrap() - 1.0).abs() < 1e-12);
    assert!((g2_oracle(s, d, -d).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn seven_atoms_three_excitations() {
    let s = EnsembleSpec::new(7, 3).unwrap();
    assert!((g1_oracle(s, 0.7).unwrap() - g1(s, 0.7).unwrap()).abs() < 1e-10);
}

/// Frozen from an independent Kronecker-product simulation; the values are
/// the rationals 5/6, 10/3, 7/9, 7, 9/10 and 91/30.
#[test]
fn arbitrary_excitation_regression() {
    let cases = [
        (6, 3, 0.0, 5.0 / 6.0),
        (6, 3, PI, 10.0 / 3.0),
        (8, 3, 0.0, 7.0 / 9.0),
        (8, 3, PI, 7.0),
        (8, 4, 0.0, 9.0 / 10.0),
        (8, 4, PI, 91.0 / 30.0),
    ];
    for (n, ne, d, expected) in cases {
        let g = g2_normalized_oracle(EnsembleSpec::new(n, ne).unwrap(), d, d).unwrap();
        assert!((g - expected).abs() <= 1e-12, "({n},{ne}) at {d}: {g}");
    }
}
