//! Diagonal transfer operators built from phase gates.
//!
//! A frequency index `gamma` is held in two's complement across `n` qubits,
//! `gamma = -a_{n-1} 2^{n-1} + sum_{j<n-1} a_j 2^j`. Expanding `gamma^p` and
//! collapsing repeated digits with `a_j^m = a_j` turns the phase
//! `e^{i phi gamma^p}` into a product of phase gates conditioned on small
//! qubit sets; each set becomes one (multi-)controlled phase gate.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::classical::GridSpec;
use crate::qft::{build_iqft, build_qft, FourierSign, MAX_QUBITS};
use crate::{error::invalid, Error, Result};

/// Highest supported dispersion order.
pub const MAX_ORDER: u32 = 4;

/// Signed frequency index stored in basis index `b` of an `n`-qubit
/// register.
pub fn signed_index(b: usize, n_qubits: usize) -> i64 {
    let half = 1i64 << (n_qubits - 1);
    let b = b as i64;
    if b >= half {
        b - 2 * half
    } else {
        b
    }
}

/// Per-unit-`gamma^p` phase in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PhaseAngle(pub f64);

impl PhaseAngle {
    /// Quadratic phase `-2 pi^2 z / (N^2 dx^2 k)` of paraxial free-space
    /// propagation over `z`.
    pub fn paraxial(z: f64, wavenumber: f64, n_points: usize, dx: f64) -> Self {
        let n = n_points as f64;
        PhaseAngle(-2.0 * std::f64::consts::PI.powi(2) * z / (n * n * dx * dx * wavenumber))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// One summand of the expansion: `coefficient * prod_{j in qubits} a_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialTerm {
    /// Distinct qubit indices in increasing order.
    pub qubits: Vec<usize>,
    pub coefficient: i128,
}

fn check_order(p: u32) -> Result<()> {
    if (1..=MAX_ORDER).contains(&p) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange(p))
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

/// Digit weights of two's complement: `2^j`, except `-2^{n-1}` for the sign
/// bit.
fn digit_weights(n: usize) -> Vec<i128> {
    (0..n)
        .map(|j| {
            if j == n - 1 {
                -(1i128 << j)
            } else {
                1i128 << j
            }
        })
        .collect()
}

/// Expands `gamma^p` into terms over qubit sets of size at most `p`.
///
/// The coefficient of a set `S` sums the products of weights over all
/// ordered `p`-tuples whose set of distinct indices is exactly `S`, which by
/// inclusion-exclusion is `sum_{T subset S} (-1)^{|S|-|T|} (sum_{j in T} w_j)^p`.
/// Terms come out ordered by set size, then lexicographically; zero
/// coefficients are dropped.
pub fn decompose_monomial(n: usize, p: u32) -> Result<Vec<MonomialTerm>> {
    check_qubits(n)?;
    check_order(p)?;
    let weights = digit_weights(n);
    let mut terms = Vec::new();
    for size in 1..=(p as usize).min(n) {
        for set in combinations(n, size) {
            let mut coefficient = 0i128;
            for mask in 1u32..(1 << size) {
                let partial: i128 = (0..size)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| weights[set[i]])
                    .sum();
                let term = partial.pow(p);
                if (size as u32 - mask.count_ones()).is_multiple_of(2) {
                    coefficient += term;
                } else {
                    coefficient -= term;
                }
            }
            if coefficient != 0 {
                terms.push(MonomialTerm {
                    qubits: set,
                    coefficient,
                });
            }
        }
    }
    Ok(terms)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Diagonal circuit with `U|gamma> = e^{i phi gamma^p}|gamma>`.
///
/// One gate per term of [`decompose_monomial`]: a phase gate for single
/// qubits, a controlled phase (control = lower index) for pairs and a
/// multi-controlled phase (target = highest index) above that. Every term's
/// gate is emitted even when its folded angle is zero, so the gate count
/// depends on `n` and `p` only.
pub fn build_monomial_propagator(n: usize, p: u32, phi: PhaseAngle) -> Result<Circuit> {
    let terms = decompose_monomial(n, p)?;
    let mut circuit = Circuit::new(n)?;
    for term in terms {
        let angle = term.coefficient as f64 * phi.0;
        let gate = match term.qubits.as_slice() {
            [q] => Gate::phase(*q, angle),
            [c, t] => Gate::controlled_phase(*c, *t, angle),
            [controls @ .., t] => Gate::multi_controlled_phase(controls.to_vec(), *t, angle),
            [] => unreachable!("terms have at least one qubit"),
        };
        circuit.append(gate)?;
    }
    Ok(circuit)
}

/// Diagonal operator for a sum of monomials, one per `(order, phase)`.
pub fn build_propagator(n: usize, phases: &[(u32, PhaseAngle)]) -> Result<Circuit> {
    let mut circuit = Circuit::new(n)?;
    for &(p, phi) in phases {
        circuit.append_circuit(&build_monomial_propagator(n, p, phi)?, 0)?;
    }
    Ok(circuit)
}

/// `exp(i sum_p phi_p gamma(b)^p)` evaluated directly for every basis index.
pub fn diagonal_oracle(n: usize, phases: &[(u32, PhaseAngle)]) -> Result<Vec<Complex64>> {
    if !(1..=14).contains(&n) {
        return Err(Error::QubitCount { n, min: 1, max: 14 });
    }
    for &(p, _) in phases {
        check_order(p)?;
    }
    Ok((0..1usize << n)
        .map(|b| {
            let gamma = signed_index(b, n) as f64;
            let phase: f64 = phases
                .iter()
                .map(|&(p, phi)| phi.0 * gamma.powi(p as i32))
                .sum();
            Complex64::from_polar(1.0, phase)
        })
        .collect())
}

/// Dispersion relation truncated to a polynomial in the transverse wave
/// number.
///
/// The transfer phase over distance `z` is `z k sum_p c_p (alpha / k)^p`,
/// so the coefficients `c_p` are dimensionless. The paraxial relation is
/// `c_2 = -1/2`; expanding `sqrt(k^2 - alpha^2) - k` further gives
/// `c_4 = -1/8`.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionPolynomial {
    coefficients: BTreeMap<u32, f64>,
}

impl DispersionPolynomial {
    pub fn paraxial() -> Self {
        DispersionPolynomial {
            coefficients: BTreeMap::from([(2, -0.5)]),
        }
    }

    /// Paraxial term plus the quartic correction of the exact square root.
    pub fn quartic() -> Self {
        DispersionPolynomial {
            coefficients: BTreeMap::from([(2, -0.5), (4, -0.125)]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for (p, c) in terms {
            check_order(p)?;
            if !c.is_finite() {
                return Err(invalid(format!("coefficient of order {p} is not finite")));
            }
            *coefficients.entry(p).or_insert(0.0) += c;
        }
        Ok(DispersionPolynomial { coefficients })
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, f64> {
        &self.coefficients
    }

    pub fn orders(&self) -> impl Iterator<Item = u32> + '_ {
        self.coefficients.keys().copied()
    }

    /// Transfer phase at transverse wave number `alpha`.
    pub fn transfer_phase(&self, alpha: f64, wavenumber: f64, z: f64) -> f64 {
        let u = alpha / wavenumber;
        z * wavenumber
            * self
                .coefficients
                .iter()
                .map(|(&p, &c)| c * u.powi(p as i32))
                .sum::<f64>()
    }

    /// Per-order phases `phi_p = z k c_p (d_alpha / k)^p`, so that the
    /// transfer phase at index `gamma` is `sum_p phi_p gamma^p`.
    pub fn order_phases(&self, grid: &GridSpec, wavelength: f64, z: f64) -> Vec<(u32, PhaseAngle)> {
        let k = wavenumber(wavelength);
        let step = grid.d_alpha() / k;
        self.coefficients
            .iter()
            .map(|(&p, &c)| (p, PhaseAngle(z * k * c * step.powi(p as i32))))
            .collect()
    }
}

impl Default for DispersionPolynomial {
    fn default() -> Self {
        Self::paraxial()
    }
}

pub(crate) fn wavenumber(wavelength: f64) -> f64 {
    std::f64::consts::TAU / wavelength
}

pub(crate) fn check_physical(wavelength: f64, z: f64) -> Result<()> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(invalid(format!(
            "propagation distance must be >= 0, got {z}"
        )));
    }
    Ok(())
}

/// Forward QFT (exponent sign -1), diagonal transfer operator, inverse QFT.
pub fn build_qbpm_circuit(
    grid: &GridSpec,
    wavelength: f64,
    z: f64,
    polynomial: &DispersionPolynomial,
) -> Result<Circuit> {
    check_physical(wavelength, z)?;
    let n = grid.n_qubits();
    check_qubits(n)?;
    let mut circuit = build_qft(n, FourierSign::Negative)?;
    let transfer = build_propagator(n, &polynomial.order_phases(grid, wavelength, z))?;
    circuit.append_circuit(&transfer, 0)?;
    circuit.append_circuit(&build_iqft(n, FourierSign::Negative)?, 0)?;
    Ok(circuit)
}

/// Two independent 1D pipelines: x on qubits `[0, n_x)`, y on
/// `[n_x, n_x + n_y)`.
pub fn build_qbpm_circuit_2d(
    grid_x: &GridSpec,
    grid_y: &GridSpec,
    wavelength: f64,
    z: f64,
    polynomial: &DispersionPolynomial,
) -> Result<Circuit> {
    let (nx, ny) = (grid_x.n_qubits(), grid_y.n_qubits());
    if nx + ny > MAX_QUBITS {
        return Err(Error::QubitCount {
            n: nx + ny,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    let x = build_qbpm_circuit(grid_x, wavelength, z, polynomial)?;
    let y = build_qbpm_circuit(grid_y, wavelength, z, polynomial)?;
    let mut circuit = Circuit::new(nx + ny)?;
    circuit.append_circuit(&x, 0)?;
    circuit.append_circuit(&y, nx)?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::StateVector;

    fn term(qubits: &[usize], coefficient: i128) -> MonomialTerm {
        MonomialTerm {
            qubits: qubits.to_vec(),
            coefficient,
        }
    }

    /// Evaluates the terms on the digits of `b`.
    fn evaluate(terms: &[MonomialTerm], b: usize) -> i128 {
        terms
            .iter()
            .filter(|t| t.qubits.iter().all(|&q| b >> q & 1 == 1))
            .map(|t| t.coefficient)
            .sum()
    }

    #[test]
    fn one_qubit_square() {
        assert_eq!(decompose_monomial(1, 2).unwrap(), vec![term(&[0], 1)]);
    }

    #[test]
    fn three_qubit_square_matches_hand_expansion() {
        let terms = decompose_monomial(3, 2).unwrap();
        assert_eq!(
            terms,
            vec![
                term(&[0], 1),
                term(&[1], 4),
                term(&[2], 16),
                term(&[0, 1], 4),
                term(&[0, 2], -8),
                term(&[1, 2], -16),
            ]
        );
        for b in 0..8 {
            let g = signed_index(b, 3) as i128;
            assert_eq!(evaluate(&terms, b), g * g);
        }
    }

    #[test]
    fn linear_term_is_twos_complement() {
        assert_eq!(
            decompose_monomial(4, 1).unwrap(),
            vec![term(&[0], 1), term(&[1], 2), term(&[2], 4), term(&[3], -8)]
        );
    }

    #[test]
    fn quadratic_terms_follow_the_closed_form() {
        // singletons 4^j; pairs l<j<=n-2 get 2^{j+l+1}; pairs with the sign
        // bit get -2^{n+l}
        let n = 7;
        for t in decompose_monomial(n, 2).unwrap() {
            let expected = match t.qubits.as_slice() {
                [j] => 1i128 << (2 * j),
                [l, j] if *j < n - 1 => 1i128 << (j + l + 1),
                [l, _] => -(1i128 << (n + l)),
                _ => unreachable!(),
            };
            assert_eq!(t.coefficient, expected, "{:?}", t.qubits);
        }
    }

    #[test]
    fn order_and_qubit_ranges() {
        assert_eq!(decompose_monomial(4, 0), Err(Error::OrderOutOfRange(0)));
        assert_eq!(decompose_monomial(4, 5), Err(Error::OrderOutOfRange(5)));
        assert!(decompose_monomial(0, 2).is_err());
        assert!(build_monomial_propagator(3, 7, PhaseAngle(0.1)).is_err());
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn quadratic_propagator_gate_count() {
        for n in 1..=10 {
            let c = build_monomial_propagator(n, 2, PhaseAngle(0.3)).unwrap();
            assert_eq!(c.len(), n * (n + 1) / 2);
            assert_eq!(c.gate_count().phase, n);
        }
        assert_eq!(
            build_monomial_propagator(15, 2, PhaseAngle(0.1))
                .unwrap()
                .len(),
            120
        );
    }

    #[test]
    fn every_small_qubit_set_gets_a_gate() {
        // no coefficient of a set of size <= p vanishes for p <= 4, so the
        // count is sum_{k<=p} C(n, k)
        let binomial = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        for n in 1..=12 {
            for p in 1..=4u32 {
                let expected: usize = (1..=(p as usize).min(n)).map(|k| binomial(n, k)).sum();
                assert_eq!(
                    decompose_monomial(n, p).unwrap().len(),
                    expected,
                    "n={n} p={p}"
                );
            }
        }
    }

    #[test]
    fn zero_phase_propagator_is_identity() {
        let c = build_monomial_propagator(5, 2, PhaseAngle(0.0)).unwrap();
        let amps: Vec<_> = (0..32)
            .map(|i| Complex64::new((i as f64).cos(), 0.2))
            .collect();
        let start = StateVector::from_amplitudes(amps).unwrap();
        let mut s = start.clone();
        c.run(&mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_hand_values() {
        let v = diagonal_oracle(2, &[(2, PhaseAngle(std::f64::consts::PI))]).unwrap();
        // gamma = 0, 1, -2, -1
        let expect = [1.0, -1.0, 1.0, -1.0];
        for (a, e) in v.iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        let ones = diagonal_oracle(6, &[(2, PhaseAngle(0.0)), (3, PhaseAngle(0.0))]).unwrap();
        assert!(ones.iter().all(|a| *a == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn monomial_propagator_matches_oracle_on_basis_states() {
        for (n, p, phi) in [(6, 2, 0.37), (5, 3, -0.21), (4, 4, 1.9), (6, 1, 0.5)] {
            let c = build_monomial_propagator(n, p, PhaseAngle(phi)).unwrap();
            let diag = diagonal_oracle(n, &[(p, PhaseAngle(phi))]).unwrap();
            for (b, d) in diag.iter().enumerate() {
                let mut s = StateVector::basis(n, b).unwrap();
                c.run(&mut s).unwrap();
                assert!((s.amplitudes()[b] - d).norm() < 1e-12, "n={n} p={p} b={b}");
            }
        }
    }

    #[test]
    fn paraxial_order_phase_matches_closed_form() {
        let grid = GridSpec::new(8, 2e-6).unwrap();
        let (wl, z) = (633e-9, 3e-3);
        let phases = DispersionPolynomial::paraxial().order_phases(&grid, wl, z);
        assert_eq!(phases.len(), 1);
        let expected = PhaseAngle::paraxial(z, wavenumber(wl), 256, 2e-6);
        assert!((phases[0].1 .0 - expected.0).abs() <= 1e-15 * expected.0.abs());
    }

    #[test]
    fn qbpm_rejects_bad_physics() {
        let grid = GridSpec::new(4, 1e-6).unwrap();
        let poly = DispersionPolynomial::paraxial();
        assert!(build_qbpm_circuit(&grid, 0.0, 1.0, &poly).is_err());
        assert!(build_qbpm_circuit(&grid, 5e-7, -1.0, &poly).is_err());
        assert!(build_qbpm_circuit(&grid, 5e-7, f64::NAN, &poly).is_err());
        let big = GridSpec::new(13, 1e-6).unwrap();
        assert!(matches!(
            build_qbpm_circuit_2d(&big, &big, 5e-7, 1.0, &poly),
            Err(Error::QubitCount { n: 26, .. })
        ));
    }

    #[test]
    fn qbpm_at_zero_distance_is_identity() {
        let grid = GridSpec::new(6, 1e-6).unwrap();
        let c = build_qbpm_circuit(&grid, 532e-9, 0.0, &DispersionPolynomial::paraxial()).unwrap();
        let amps: Vec<_> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), 0.1))
            .collect();
        let start = StateVector::from_amplitudes(amps).unwrap();
        let mut s = start.clone();
        c.run(&mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
