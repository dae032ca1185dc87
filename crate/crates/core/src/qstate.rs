//! Dense statevector register, gate application and computational-basis
//! sampling.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::Gate;
use crate::exec::{self, Execution};
use crate::{Error, Result};

/// `2^n` complex amplitudes over `n` qubits, kept at unit norm.
///
/// Amplitude `b` belongs to the basis state whose qubit `j` holds bit `j`
/// of `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Loads `values` scaled to unit norm.
    pub fn from_amplitudes(values: Vec<Complex64>) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let norm = l2_norm(&values);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !norm.is_finite() {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let amps = values.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// The all-zeros basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::QubitCount {
                n: n_qubits,
                min: 1,
                max: 30,
            });
        }
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.apply_with(gate, Execution::default())
    }

    pub fn apply_with(&mut self, gate: &Gate, exec: Execution) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::Hadamard { target } => exec::hadamard(&mut self.amps, *target, exec),
            Gate::Swap { a, b } => exec::swap(&mut self.amps, *a, *b, exec),
            g => {
                let mask = g.qubits().iter().fold(0usize, |m, q| m | (1 << q));
                let phi = g.angle().expect("phase-type gate");
                exec::masked_phase(&mut self.amps, mask, phi, exec);
            }
        }
        Ok(())
    }

    /// `|amplitude|^2` per basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws `n_shots` computational-basis measurements.
    pub fn sample(&self, n_shots: u64, seed: u64) -> Result<SampleCounts> {
        sample_distribution(&self.probabilities(), n_shots, seed)
    }
}

fn l2_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Multinomial draw over `probabilities`, deterministic in `seed`.
///
/// Implemented as a chain of conditional binomials, so the cost is linear
/// in the number of outcomes and independent of `n_shots`.
pub fn sample_distribution(probabilities: &[f64], n_shots: u64, seed: u64) -> Result<SampleCounts> {
    if n_shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    let mut remaining_shots = n_shots;
    let mut remaining_mass: f64 = probabilities.iter().sum();
    for (count, &p) in counts.iter_mut().zip(probabilities) {
        if remaining_shots == 0 {
            break;
        }
        let q = if p > 0.0 {
            p / remaining_mass.max(p)
        } else {
            0.0
        };
        let k = if q >= 1.0 {
            remaining_shots
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining_shots, q)
                .expect("probability in (0, 1)")
                .sample(&mut rng)
        };
        *count = k;
        remaining_shots -= k;
        remaining_mass -= p;
    }
    // rounding can leave a few shots unassigned; they belong to the last
    // outcome with non-zero probability
    if remaining_shots > 0 {
        if let Some(last) = probabilities.iter().rposition(|&p| p > 0.0) {
            counts[last] += remaining_shots;
        }
    }
    Ok(SampleCounts {
        counts,
        total_shots: n_shots,
    })
}

/// Shot histogram indexed by basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    counts: Vec<u64>,
    total_shots: u64,
}

impl SampleCounts {
    /// Builds a histogram from explicit counts; the total is their sum.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let total_shots = counts.iter().sum();
        if total_shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(SampleCounts {
            counts,
            total_shots,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(index).copied().unwrap_or(0)
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    /// Empirical probabilities `N_i / N_s`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total_shots as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn load_normalizes() {
        let s = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let u = StateVector::from_amplitudes(vec![c(1.0, 0.0); 4]).unwrap();
        assert!(u
            .amplitudes()
            .iter()
            .all(|a| (a - c(0.5, 0.0)).norm() < 1e-15));
        assert_eq!(u.n_qubits(), 2);
    }

    #[test]
    fn load_rejects_bad_input() {
        assert_eq!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        );
        assert_eq!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0)]),
            Err(Error::NotPowerOfTwo(1))
        );
        assert_eq!(
            StateVector::from_amplitudes(vec![c(0.0, 0.0); 8]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn hadamard_and_phase_definitions() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::hadamard(0)).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
        s.apply(&Gate::phase(0, PI)).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn controlled_phase_acts_only_when_both_set() {
        let phi = 0.8;
        let mut s11 = StateVector::basis(2, 0b11).unwrap();
        s11.apply(&Gate::controlled_phase(1, 0, phi)).unwrap();
        assert!((s11.amplitudes()[3] - Complex64::from_polar(1.0, phi)).norm() < 1e-15);
        // |01> in the problem's labelling: qubit 1 = 0, qubit 0 = 1
        let mut s01 = StateVector::basis(2, 0b01).unwrap();
        s01.apply(&Gate::controlled_phase(1, 0, phi)).unwrap();
        assert_eq!(s01.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn apply_rejects_out_of_range_and_duplicates() {
        let mut s = StateVector::zero(2).unwrap();
        assert_eq!(
            s.apply(&Gate::hadamard(2)),
            Err(Error::QubitOutOfRange {
                index: 2,
                n_qubits: 2
            })
        );
        assert_eq!(
            s.apply(&Gate::ControlledPhase {
                control: 1,
                target: 1,
                phi: 0.1
            }),
            Err(Error::DuplicateQubit(1))
        );
    }

    #[test]
    fn probabilities_of_simple_states() {
        assert_eq!(
            StateVector::zero(1).unwrap().probabilities(),
            vec![1.0, 0.0]
        );
        let u = StateVector::from_amplitudes(vec![c(1.0, 0.0); 4]).unwrap();
        assert!(u.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn sampling_a_basis_state_is_deterministic() {
        let counts = StateVector::zero(1).unwrap().sample(100, 7).unwrap();
        assert_eq!(counts.counts(), &[100, 0]);
        assert_eq!(counts.total_shots(), 100);
    }

    #[test]
    fn sampling_rejects_zero_shots() {
        assert_eq!(
            StateVector::zero(1).unwrap().sample(0, 1),
            Err(Error::ZeroShots)
        );
    }

    #[test]
    fn same_seed_same_counts() {
        let s = StateVector::from_amplitudes((0..16).map(|i| c(i as f64, 1.0)).collect()).unwrap();
        let a = s.sample(10_000, 42).unwrap();
        let b = s.sample(10_000, 42).unwrap();
        let other = s.sample(10_000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_eq!(a.counts().iter().sum::<u64>(), 10_000);
    }

    #[test]
    fn uniform_qubit_frequencies_converge_at_root_n_rate() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::hadamard(0)).unwrap();
        for (shots, seed) in [(100u64, 1u64), (10_000, 2), (1_000_000, 3)] {
            let f = s.sample(shots, seed).unwrap().frequencies();
            let bound = 5.0 * (0.25 / shots as f64).sqrt();
            assert!((f[0] - 0.5).abs() < bound, "{shots}: {}", f[0]);
        }
    }

    #[test]
    fn diagonal_gates_do_not_move_population() {
        for b in 0..8 {
            let mut s = StateVector::basis(3, b).unwrap();
            s.apply(&Gate::phase(1, 0.3)).unwrap();
            s.apply(&Gate::controlled_phase(0, 2, 1.3)).unwrap();
            s.apply(&Gate::multi_controlled_phase(vec![0, 1], 2, -0.4))
                .unwrap();
            let p = s.probabilities();
            assert!((p[b] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fidelity_with_itself_is_one() {
        let s = StateVector::from_amplitudes((0..8).map(|i| c(1.0, i as f64)).collect()).unwrap();
        assert!((s.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
    }
}
