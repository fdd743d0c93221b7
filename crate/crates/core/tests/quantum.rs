use proptest::prelude::*;

use qkdsim::quantum::{
    apply_correction, bell_phi, make_qubit, measure_pair, teleport, Basis, Complex, Pauli, PureState,
};
use qkdsim::RandomStream;

const N: usize = 100_000;

fn qubit(theta: f64, phi: f64) -> PureState {
    make_qubit(Complex::new((theta / 2.0).cos(), 0.0), Complex::from_polar((theta / 2.0).sin(), phi)).unwrap()
}

#[test]
fn born_statistics_plus_in_z() {
    let plus = Basis::X.state(0);
    let mut rng = RandomStream::from_seed(11);
    let zeros = (0..N).filter(|_| plus.measure(0, Basis::Z, &mut rng).unwrap().bit == 0).count();
    let p = zeros as f64 / N as f64;
    assert!((p - 0.5).abs() <= 5.0 * (0.25 / N as f64).sqrt(), "{p}");
}

#[test]
fn bell_pairs_agree_in_common_bases() {
    let phi = bell_phi();
    let mut rng = RandomStream::from_seed(12);
    for basis in [Basis::Z, Basis::X, Basis::from_degrees(22.5)] {
        for _ in 0..N {
            let (a, b) = measure_pair(&phi, basis, basis, &mut rng).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn conjugate_bases_uncorrelated() {
    let phi = bell_phi();
    let mut rng = RandomStream::from_seed(13);
    let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
    for _ in 0..N {
        let (a, b) = measure_pair(&phi, Basis::Z, Basis::X, &mut rng).unwrap();
        let (x, y) = (1.0 - 2.0 * a as f64, 1.0 - 2.0 * b as f64);
        sa += x;
        sb += y;
        sab += x * y;
    }
    let n = N as f64;
    let (ma, mb) = (sa / n, sb / n);
    let r = (sab / n - ma * mb) / ((1.0 - ma * ma) * (1.0 - mb * mb)).sqrt();
    assert!(r.abs() <= 5.0 / n.sqrt(), "{r}");
}

#[test]
fn teleportation_all_outcomes() {
    let mut rng = RandomStream::from_seed(14);
    for _ in 0..100 {
        let psi = qubit(rng.uniform() * std::f64::consts::PI, rng.uniform() * std::f64::consts::TAU);
        let mut seen = [false; 4];
        while !seen.iter().all(|&s| s) {
            let t = teleport(&psi, &mut rng).unwrap();
            let out = apply_correction(&t.received, t.x, t.y).unwrap();
            assert!((psi.fidelity(&out).unwrap() - 1.0).abs() < 1e-12);
            seen[(t.x * 2 + t.y) as usize] = true;
        }
    }
}

proptest! {
    #[test]
    fn operations_preserve_norm(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU,
                                angle in 0.0..180.0f64, seed in any::<u64>()) {
        let psi = qubit(theta, phi);
        let mut rng = RandomStream::from_seed(seed);
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            prop_assert!((psi.apply_pauli(0, p).unwrap().norm_sqr() - 1.0).abs() < 1e-9);
        }
        let m = psi.measure(0, Basis::from_degrees(angle), &mut rng).unwrap();
        prop_assert!((m.post_state.norm_sqr() - 1.0).abs() < 1e-9);
        let pair = psi.tensor(&psi).unwrap();
        prop_assert!((pair.norm_sqr() - 1.0).abs() < 1e-9);
        let t = teleport(&psi, &mut rng).unwrap();
        prop_assert!((t.received.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeat_measurement_is_stable(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU,
                                    angle in 0.0..180.0f64, seed in any::<u64>()) {
        let basis = Basis::from_degrees(angle);
        let mut rng = RandomStream::from_seed(seed);
        let first = qubit(theta, phi).measure(0, basis, &mut rng).unwrap();
        for _ in 0..5 {
            let again = first.post_state.measure(0, basis, &mut rng).unwrap();
            prop_assert_eq!(again.bit, first.bit);
            prop_assert_eq!(again.probability, 1.0);
        }
    }

    #[test]
    fn born_probabilities_sum_to_one(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU,
                                     angle in 0.0..180.0f64) {
        let p = qubit(theta, phi).outcome_probabilities(0, Basis::from_degrees(angle)).unwrap();
        prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
