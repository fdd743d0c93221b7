use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::rng::RandomStream;

pub const MAX_QUBITS: usize = 3;
const NORM_TOLERANCE: f64 = 1e-9;
// Outcome probabilities this close to 0 or 1 are snapped, so eigenstates
// measure deterministically despite rounding in the amplitudes.
const CERTAINTY_EPS: f64 = 1e-12;

/// A dense state vector over 1 to 3 qubits.
///
/// Amplitudes are indexed big-endian: qubit 0 is the most significant bit
/// of the basis index, so `|01⟩` lives at index 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// A real-rotation measurement basis `{cos θ|0⟩ + sin θ|1⟩, −sin θ|0⟩ + cos θ|1⟩}`.
///
/// `θ = 0` is the computational (Z) basis and `θ = π/4` the diagonal (X)
/// basis. The angle is kept in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: u8,
    /// Born probability of the observed bit.
    pub probability: f64,
    pub post_state: PureState,
}

impl Basis {
    pub const Z: Basis = Basis { angle: 0.0 };
    pub const X: Basis = Basis { angle: PI / 4.0 };

    pub fn new(angle: f64) -> Self {
        let mut angle = angle.rem_euclid(PI);
        // rem_euclid can round up to exactly PI for tiny negative inputs
        if angle >= PI {
            angle = 0.0;
        }
        Basis { angle }
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Real components of the basis vector for outcome `bit`.
    pub fn vector(&self, bit: u8) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        if bit == 0 {
            [c, s]
        } else {
            [-s, c]
        }
    }

    /// The single-qubit eigenstate for outcome `bit`.
    pub fn state(&self, bit: u8) -> PureState {
        let [a, b] = self.vector(bit);
        PureState { num_qubits: 1, amplitudes: vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)] }
    }

    /// Short label: `Z`, `X`, or the angle in degrees.
    pub fn label(&self) -> String {
        if *self == Basis::Z {
            "Z".into()
        } else if *self == Basis::X {
            "X".into()
        } else {
            format!("{:.4}deg", self.angle.to_degrees())
        }
    }
}

impl PureState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(QuantumError::Size(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(QuantumError::Size(len));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::Normalization(norm));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self, QuantumError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(QuantumError::Size(1 << num_qubits.min(8)));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`, with `self` occupying the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, QuantumError> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(QuantumError::Size(1 << n));
        }
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        Ok(PureState { num_qubits: n, amplitudes })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64, QuantumError> {
        self.expect_qubits(other.num_qubits)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`; equals 1 iff the states agree up to global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64, QuantumError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply_pauli(&self, qubit: usize, which: Pauli) -> Result<PureState, QuantumError> {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = match which {
            Pauli::X => [[zero, one], [one, zero]],
            Pauli::Y => [[zero, -i], [i, zero]],
            Pauli::Z => [[one, zero], [zero, -one]],
        };
        self.apply_single(qubit, m)
    }

    pub(crate) fn apply_hadamard(&self, qubit: usize) -> Result<PureState, QuantumError> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_single(qubit, [[h, h], [h, -h]])
    }

    pub(crate) fn apply_cnot(&self, control: usize, target: usize) -> Result<PureState, QuantumError> {
        self.check_index(control)?;
        self.check_index(target)?;
        assert_ne!(control, target, "CNOT control and target must differ");
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        let mut amplitudes = self.amplitudes.clone();
        for idx in 0..amplitudes.len() {
            if idx & cmask != 0 && idx & tmask == 0 {
                amplitudes.swap(idx, idx | tmask);
            }
        }
        Ok(PureState { num_qubits: self.num_qubits, amplitudes })
    }

    fn apply_single(&self, qubit: usize, m: [[Complex64; 2]; 2]) -> Result<PureState, QuantumError> {
        self.check_index(qubit)?;
        let mask = self.mask(qubit);
        let mut amplitudes = self.amplitudes.clone();
        for idx in (0..amplitudes.len()).filter(|i| i & mask == 0) {
            let (a0, a1) = (self.amplitudes[idx], self.amplitudes[idx | mask]);
            amplitudes[idx] = m[0][0] * a0 + m[0][1] * a1;
            amplitudes[idx | mask] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(PureState { num_qubits: self.num_qubits, amplitudes })
    }

    /// Born probabilities `[Pr[0], Pr[1]]` for measuring `qubit` in `basis`.
    pub fn outcome_probabilities(&self, qubit: usize, basis: Basis) -> Result<[f64; 2], QuantumError> {
        self.check_index(qubit)?;
        let mask = self.mask(qubit);
        let e0 = basis.vector(0);
        let p0: f64 = (0..self.amplitudes.len())
            .filter(|i| i & mask == 0)
            .map(|idx| (self.amplitudes[idx] * e0[0] + self.amplitudes[idx | mask] * e0[1]).norm_sqr())
            .sum::<f64>()
            / self.norm_sqr();
        let p0 = if p0 < CERTAINTY_EPS {
            0.0
        } else if p0 > 1.0 - CERTAINTY_EPS {
            1.0
        } else {
            p0
        };
        Ok([p0, 1.0 - p0])
    }

    /// Projective measurement of one qubit, collapsing it onto the observed
    /// basis vector.
    pub fn measure(
        &self,
        qubit: usize,
        basis: Basis,
        rng: &mut RandomStream,
    ) -> Result<MeasurementOutcome, QuantumError> {
        let [p0, p1] = self.outcome_probabilities(qubit, basis)?;
        let bit = if p0 >= 1.0 {
            0
        } else if p1 >= 1.0 {
            1
        } else {
            u8::from(rng.uniform() >= p0)
        };
        let probability = if bit == 0 { p0 } else { p1 };
        let post_state = self.project(qubit, basis, bit, probability);
        Ok(MeasurementOutcome { bit, probability, post_state })
    }

    fn project(&self, qubit: usize, basis: Basis, bit: u8, probability: f64) -> PureState {
        let mask = self.mask(qubit);
        let e = basis.vector(bit);
        let scale = 1.0 / probability.sqrt();
        let mut amplitudes = self.amplitudes.clone();
        for idx in (0..amplitudes.len()).filter(|i| i & mask == 0) {
            let c = (self.amplitudes[idx] * e[0] + self.amplitudes[idx | mask] * e[1]) * scale;
            amplitudes[idx] = c * e[0];
            amplitudes[idx | mask] = c * e[1];
        }
        PureState { num_qubits: self.num_qubits, amplitudes }
    }

    /// Extracts the state of `qubit` when it is in a product with the rest
    /// of the register.
    pub fn factor_qubit(&self, qubit: usize) -> Result<PureState, QuantumError> {
        self.check_index(qubit)?;
        if self.num_qubits == 1 {
            return Ok(self.clone());
        }
        let mask = self.mask(qubit);
        let anchor = (0..self.amplitudes.len())
            .max_by(|&a, &b| self.amplitudes[a].norm_sqr().total_cmp(&self.amplitudes[b].norm_sqr()))
            .expect("non-empty register");
        let rest = anchor & !mask;
        let mut local = [self.amplitudes[rest], self.amplitudes[rest | mask]];
        let local_norm = (local[0].norm_sqr() + local[1].norm_sqr()).sqrt();
        local[0] /= local_norm;
        local[1] /= local_norm;
        // ψ[r, b] must equal local[b] · χ[r] for every rest index r.
        let pivot = usize::from(local[1].norm_sqr() > local[0].norm_sqr());
        for r in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let pair = [self.amplitudes[r], self.amplitudes[r | mask]];
            let chi = pair[pivot] / local[pivot];
            let other = 1 - pivot;
            if (pair[other] - local[other] * chi).norm() > 1e-9 {
                return Err(QuantumError::Entangled(qubit));
            }
        }
        Ok(PureState { num_qubits: 1, amplitudes: local.to_vec() })
    }

    pub(crate) fn expect_qubits(&self, n: usize) -> Result<(), QuantumError> {
        if self.num_qubits != n {
            return Err(QuantumError::Arity { expected: n, actual: self.num_qubits });
        }
        Ok(())
    }

    fn check_index(&self, qubit: usize) -> Result<(), QuantumError> {
        if qubit >= self.num_qubits {
            return Err(QuantumError::Index { index: qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }
}

/// `α|0⟩ + β|1⟩`.
pub fn make_qubit(alpha: Complex64, beta: Complex64) -> Result<PureState, QuantumError> {
    PureState::from_amplitudes(vec![alpha, beta])
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi() -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    PureState { num_qubits: 2, amplitudes: vec![h, z, z, h] }
}

/// Measures qubit 0 in `basis_a`, then qubit 1 in `basis_b`.
pub fn measure_pair(
    state: &PureState,
    basis_a: Basis,
    basis_b: Basis,
    rng: &mut RandomStream,
) -> Result<(u8, u8), QuantumError> {
    state.expect_qubits(2)?;
    let first = state.measure(0, basis_a, rng)?;
    let second = first.post_state.measure(1, basis_b, rng)?;
    Ok((first.bit, second.bit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> PureState {
        make_qubit(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)).unwrap()
    }

    fn minus() -> PureState {
        make_qubit(c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)).unwrap()
    }

    #[test]
    fn make_qubit_examples() {
        let zero = make_qubit(c(1.0), c(0.0)).unwrap();
        assert_eq!(zero, PureState::zero(1).unwrap());
        assert!((plus().fidelity(&Basis::X.state(0)).unwrap() - 1.0).abs() < 1e-12);
        let s = make_qubit(c(0.6), c(0.8)).unwrap();
        let [_, p1] = s.outcome_probabilities(0, Basis::Z).unwrap();
        assert!((p1 - 0.64).abs() < 1e-12);
    }

    #[test]
    fn make_qubit_rejects_unnormalized() {
        assert!(matches!(make_qubit(c(1.0), c(1.0)), Err(QuantumError::Normalization(_))));
        assert_eq!(make_qubit(c(f64::NAN), c(0.0)), Err(QuantumError::NonFinite));
    }

    #[test]
    fn from_amplitudes_rejects_bad_sizes() {
        assert!(matches!(PureState::from_amplitudes(vec![c(1.0)]), Err(QuantumError::Size(1))));
        let mut v = vec![c(0.0); 16];
        v[0] = c(1.0);
        assert!(matches!(PureState::from_amplitudes(v), Err(QuantumError::Size(16))));
    }

    #[test]
    fn basis_angle_is_normalized() {
        assert!((Basis::new(-PI / 4.0).angle() - 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(Basis::new(PI), Basis::Z);
        assert!(Basis::new(7.0).angle() < PI);
    }

    #[test]
    fn measure_eigenstate_is_deterministic() {
        let mut rng = RandomStream::from_seed(1);
        let zero = PureState::zero(1).unwrap();
        for _ in 0..100 {
            let out = zero.measure(0, Basis::Z, &mut rng).unwrap();
            assert_eq!(out.bit, 0);
            assert_eq!(out.probability, 1.0);
        }
        // |+⟩ in X, where amplitudes carry rounding error
        for _ in 0..100 {
            assert_eq!(plus().measure(0, Basis::X, &mut rng).unwrap().bit, 0);
        }
    }

    #[test]
    fn angled_measurement_probability() {
        let zero = PureState::zero(1).unwrap();
        let [p0, _] = zero.outcome_probabilities(0, Basis::from_degrees(22.5)).unwrap();
        // cos²(22.5°)
        assert!((p0 - 0.853_553_390_593_273_7).abs() < 1e-12);
    }

    #[test]
    fn measure_bad_index() {
        let mut rng = RandomStream::from_seed(1);
        let err = bell_phi().measure(2, Basis::Z, &mut rng).unwrap_err();
        assert_eq!(err, QuantumError::Index { index: 2, num_qubits: 2 });
    }

    #[test]
    fn post_state_is_stable_under_remeasurement() {
        let mut rng = RandomStream::from_seed(9);
        let b = Basis::from_degrees(33.0);
        for _ in 0..200 {
            let first = bell_phi().measure(1, b, &mut rng).unwrap();
            assert!((first.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            let again = first.post_state.measure(1, b, &mut rng).unwrap();
            assert_eq!(again.bit, first.bit);
            assert_eq!(again.probability, 1.0);
        }
    }

    #[test]
    fn bell_amplitudes() {
        let phi = bell_phi();
        let a = phi.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (a[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(a[1], c(0.0));
        // equivalent (|++⟩ + |−−⟩)/√2 form
        let pp = plus().tensor(&plus()).unwrap();
        let mm = minus().tensor(&minus()).unwrap();
        let amps: Vec<_> = pp.amplitudes().iter().zip(mm.amplitudes()).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
        let alt = PureState::from_amplitudes(amps).unwrap();
        assert!((alt.fidelity(&phi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_pair_requires_two_qubits() {
        let mut rng = RandomStream::from_seed(1);
        let err = measure_pair(&plus(), Basis::Z, Basis::Z, &mut rng).unwrap_err();
        assert_eq!(err, QuantumError::Arity { expected: 2, actual: 1 });
    }

    #[test]
    fn bell_same_angle_is_perfectly_correlated_by_enumeration() {
        // Oracle: rotate both halves explicitly and check the anti-correlated
        // amplitudes vanish.
        for k in 0..36 {
            let b = Basis::from_degrees(5.0 * k as f64);
            let phi = bell_phi();
            let mut p_diff = 0.0;
            for (x, y) in [(0u8, 1u8), (1, 0)] {
                let (ex, ey) = (b.vector(x), b.vector(y));
                let amp = FRAC_1_SQRT_2 * (ex[0] * ey[0] + ex[1] * ey[1]);
                p_diff += amp * amp;
            }
            assert!(p_diff < 1e-24, "angle {k}");
            let after = phi.measure(0, b, &mut RandomStream::from_seed(k)).unwrap();
            let [p0, p1] = after.post_state.outcome_probabilities(1, b).unwrap();
            assert_eq!(if after.bit == 0 { p0 } else { p1 }, 1.0);
        }
    }

    #[test]
    fn pauli_examples() {
        let zero = PureState::zero(1).unwrap();
        let one = zero.apply_pauli(0, Pauli::X).unwrap();
        assert_eq!(one.amplitudes()[1], c(1.0));
        assert_eq!(one.apply_pauli(0, Pauli::X).unwrap(), zero);
        let flipped = plus().apply_pauli(0, Pauli::Z).unwrap();
        assert!((flipped.fidelity(&minus()).unwrap() - 1.0).abs() < 1e-15);
        assert!((flipped.amplitudes()[1] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(matches!(zero.apply_pauli(1, Pauli::Y), Err(QuantumError::Index { .. })));
    }

    #[test]
    fn factor_qubit_detects_entanglement() {
        assert_eq!(bell_phi().factor_qubit(1), Err(QuantumError::Entangled(1)));
        let prod = plus().tensor(&make_qubit(c(0.6), c(0.8)).unwrap()).unwrap();
        let second = prod.factor_qubit(1).unwrap();
        assert!((second.amplitudes()[1].re - 0.8).abs() < 1e-12);
    }
}
