//! Quantum beam propagation on a dense statevector simulator.
//!
//! A discretized paraxial field is loaded into an `n`-qubit register, moved
//! to the spatial-frequency domain by a quantum Fourier transform, multiplied
//! by a diagonal transfer operator built only from (multi-)controlled phase
//! gates, and transformed back. The classical FFT beam propagation method in
//! [`classical`] serves as the oracle for the quantum path.
//!
//! Basis index bit `j` is carried by qubit `j` (qubit 0 is the least
//! significant bit). Frequency-domain indices are read as two's-complement
//! integers, so index `b >= N/2` stands for the negative frequency `b - N`.
//!
//! ```
//! use qbpm::classical::{propagate_1d, Field1d, GridSpec};
//! use qbpm::propagator::{build_qbpm_circuit, DispersionPolynomial};
//! use qbpm::qstate::StateVector;
//!
//! let grid = GridSpec::new(6, 1e-6).unwrap();
//! let values: Vec<_> = (0..64)
//!     .map(|i| num_complex::Complex64::new((-(grid.x(i) / 5e-6).powi(2)).exp(), 0.0))
//!     .collect();
//! let circuit =
//!     build_qbpm_circuit(&grid, 532e-9, 1e-4, &DispersionPolynomial::paraxial()).unwrap();
//! let mut state = StateVector::from_amplitudes(values.clone()).unwrap();
//! circuit.run(&mut state).unwrap();
//!
//! let field = Field1d::new(grid, values).unwrap().normalized();
//! let oracle = propagate_1d(&field, 532e-9, 1e-4).unwrap();
//! for (q, c) in state.amplitudes().iter().zip(oracle.values()) {
//!     assert!((q - c).norm() < 1e-9);
//! }
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod classical;
mod error;
pub mod exec;
pub mod propagator;
pub mod qft;
pub mod qstate;
pub mod scenarios;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
