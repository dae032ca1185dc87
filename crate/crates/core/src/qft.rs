//! Quantum Fourier transform builders with an explicit exponent sign, and a
//! dense DFT used to check them.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// Largest register the builders accept.
pub const MAX_QUBITS: usize = 24;

/// Sign `s` of the exponent in `e^{s 2 pi i k j / N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FourierSign {
    Positive,
    Negative,
}

impl FourierSign {
    pub fn value(self) -> f64 {
        match self {
            FourierSign::Positive => 1.0,
            FourierSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            FourierSign::Positive => FourierSign::Negative,
            FourierSign::Negative => FourierSign::Positive,
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            n,
            min: 1,
            max: MAX_QUBITS,
        })
    }
}

/// Circuit for `|j> -> N^{-1/2} sum_k e^{s 2 pi i j k / N} |k>`, including the
/// closing qubit-reversal swaps so output bit order matches input bit order.
///
/// Gate count is `n + n(n-1)/2 + floor(n/2)`.
pub fn build_qft(n: usize, sign: FourierSign) -> Result<Circuit> {
    check_qubits(n)?;
    let mut circuit = Circuit::new(n)?;
    for target in (0..n).rev() {
        circuit.append(Gate::hadamard(target))?;
        for control in (0..target).rev() {
            let angle = sign.value() * TAU / (1u64 << (target - control + 1)) as f64;
            circuit.append(Gate::controlled_phase(control, target, angle))?;
        }
    }
    for q in 0..n / 2 {
        circuit.append(Gate::swap(q, n - 1 - q))?;
    }
    Ok(circuit)
}

/// Adjoint of [`build_qft`] with the same `sign`; as a unitary this equals
/// `build_qft(n, sign.flipped())`.
pub fn build_iqft(n: usize, sign: FourierSign) -> Result<Circuit> {
    Ok(build_qft(n, sign)?.inverse())
}

/// Unitary-normalized DFT by direct `O(N^2)` summation.
pub fn dft_oracle(values: &[Complex64], sign: FourierSign) -> Result<Vec<Complex64>> {
    let n = values.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let scale = 1.0 / (n as f64).sqrt();
    // twiddles indexed by (j k) mod N keep the angles exact
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign.value() * TAU * m as f64 / n as f64))
        .collect();
    Ok((0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * twiddle[(j * k) % n])
                .sum::<Complex64>()
                * scale
        })
        .collect())
}
