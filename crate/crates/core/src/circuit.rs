//! Gate representation, circuit container, gate counting and OpenQASM 2.0
//! export.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::exec::Execution;
use crate::qstate::StateVector;
use crate::{Error, Result};

/// Reduces an angle into `(-pi, pi]`.
pub fn fold_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// A single gate. Phase-type gates apply `e^{i phi}` to the basis states in
/// which every listed qubit is `|1>`, which makes them symmetric in their
/// qubits; the control/target split only matters for export.
///
/// Prefer the constructor functions, which fold `phi` into `(-pi, pi]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard {
        target: usize,
    },
    Phase {
        target: usize,
        phi: f64,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        phi: f64,
    },
    MultiControlledPhase {
        controls: Vec<usize>,
        target: usize,
        phi: f64,
    },
    Swap {
        a: usize,
        b: usize,
    },
}

/// Gate families, used as keys in [`GateCounts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Hadamard,
    Phase,
    ControlledPhase,
    MultiControlledPhase,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Hadamard,
        GateKind::Phase,
        GateKind::ControlledPhase,
        GateKind::MultiControlledPhase,
        GateKind::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Hadamard => "hadamard",
            GateKind::Phase => "phase",
            GateKind::ControlledPhase => "controlled_phase",
            GateKind::MultiControlledPhase => "multi_controlled_phase",
            GateKind::Swap => "swap",
        }
    }
}

impl Gate {
    pub fn hadamard(target: usize) -> Self {
        Gate::Hadamard { target }
    }

    pub fn phase(target: usize, phi: f64) -> Self {
        Gate::Phase {
            target,
            phi: fold_phase(phi),
        }
    }

    pub fn controlled_phase(control: usize, target: usize, phi: f64) -> Self {
        Gate::ControlledPhase {
            control,
            target,
            phi: fold_phase(phi),
        }
    }

    /// Phase on the all-ones subspace of `controls` plus `target`.
    pub fn multi_controlled_phase(controls: Vec<usize>, target: usize, phi: f64) -> Self {
        Gate::MultiControlledPhase {
            controls,
            target,
            phi: fold_phase(phi),
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Hadamard { .. } => GateKind::Hadamard,
            Gate::Phase { .. } => GateKind::Phase,
            Gate::ControlledPhase { .. } => GateKind::ControlledPhase,
            Gate::MultiControlledPhase { .. } => GateKind::MultiControlledPhase,
            Gate::Swap { .. } => GateKind::Swap,
        }
    }

    /// All qubits the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard { target } | Gate::Phase { target, .. } => vec![*target],
            Gate::ControlledPhase {
                control, target, ..
            } => vec![*control, *target],
            Gate::MultiControlledPhase {
                controls, target, ..
            } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
            Gate::Swap { a, b } => vec![*a, *b],
        }
    }

    /// Phase angle for phase-type gates.
    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Phase { phi, .. }
            | Gate::ControlledPhase { phi, .. }
            | Gate::MultiControlledPhase { phi, .. } => Some(*phi),
            _ => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.angle().is_some()
    }

    /// Checks that every index is below `n_qubits` and that no index repeats.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// The adjoint gate. Hadamard and swap are self-inverse.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Phase { target, phi } => Gate::phase(*target, -phi),
            Gate::ControlledPhase {
                control,
                target,
                phi,
            } => Gate::controlled_phase(*control, *target, -phi),
            Gate::MultiControlledPhase {
                controls,
                target,
                phi,
            } => Gate::multi_controlled_phase(controls.clone(), *target, -phi),
            g => g.clone(),
        }
    }

    /// The same gate acting on qubits shifted up by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match self {
            Gate::Hadamard { target } => Gate::Hadamard {
                target: target + offset,
            },
            Gate::Phase { target, phi } => Gate::Phase {
                target: target + offset,
                phi: *phi,
            },
            Gate::ControlledPhase {
                control,
                target,
                phi,
            } => Gate::ControlledPhase {
                control: control + offset,
                target: target + offset,
                phi: *phi,
            },
            Gate::MultiControlledPhase {
                controls,
                target,
                phi,
            } => Gate::MultiControlledPhase {
                controls: controls.iter().map(|c| c + offset).collect(),
                target: target + offset,
                phi: *phi,
            },
            Gate::Swap { a, b } => Gate::Swap {
                a: a + offset,
                b: b + offset,
            },
        }
    }
}

/// Exact per-kind gate counts of a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct GateCounts {
    pub hadamard: usize,
    pub phase: usize,
    pub controlled_phase: usize,
    pub multi_controlled_phase: usize,
    pub swap: usize,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        match kind {
            GateKind::Hadamard => self.hadamard,
            GateKind::Phase => self.phase,
            GateKind::ControlledPhase => self.controlled_phase,
            GateKind::MultiControlledPhase => self.multi_controlled_phase,
            GateKind::Swap => self.swap,
        }
    }

    fn bump(&mut self, kind: GateKind) {
        match kind {
            GateKind::Hadamard => self.hadamard += 1,
            GateKind::Phase => self.phase += 1,
            GateKind::ControlledPhase => self.controlled_phase += 1,
            GateKind::MultiControlledPhase => self.multi_controlled_phase += 1,
            GateKind::Swap => self.swap += 1,
        }
    }

    pub fn total(&self) -> usize {
        GateKind::ALL.iter().map(|&k| self.get(k)).sum()
    }

    /// Phase, controlled-phase and multi-controlled-phase gates.
    pub fn phase_type(&self) -> usize {
        self.phase + self.controlled_phase + self.multi_controlled_phase
    }

    pub fn iter(&self) -> impl Iterator<Item = (GateKind, usize)> + '_ {
        GateKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }
}

/// An ordered gate list on a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::QubitCount {
                n: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, relabelling its qubit `q` as
    /// `q + offset`.
    pub fn append_circuit(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        if other.n_qubits + offset > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: other.n_qubits + offset - 1,
                n_qubits: self.n_qubits,
            });
        }
        self.gates
            .extend(other.gates.iter().map(|g| g.shifted(offset)));
        Ok(())
    }

    /// Reversed gate order with every phase negated.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn gate_count(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            counts.bump(g.kind());
        }
        counts
    }

    /// Applies the gates in order.
    pub fn run(&self, state: &mut StateVector) -> Result<()> {
        self.run_with(state, Execution::default())
    }

    pub fn run_with(&self, state: &mut StateVector, exec: Execution) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                circuit: self.n_qubits,
                state: state.n_qubits(),
            });
        }
        for g in &self.gates {
            state.apply_with(g, exec)?;
        }
        Ok(())
    }

    /// OpenQASM 2.0 text. Phase gates with two controls are expanded into
    /// `cp`/`cx`; more controls are rejected.
    pub fn to_qasm(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "OPENQASM 2.0;");
        let _ = writeln!(out, "include \"qelib1.inc\";");
        let _ = writeln!(out, "qreg q[{}];", self.n_qubits);
        for g in &self.gates {
            match g {
                Gate::Hadamard { target } => {
                    let _ = writeln!(out, "h q[{target}];");
                }
                Gate::Phase { target, phi } => {
                    let _ = writeln!(out, "p({}) q[{target}];", qasm_angle(*phi));
                }
                Gate::ControlledPhase {
                    control,
                    target,
                    phi,
                } => {
                    let _ = writeln!(out, "cp({}) q[{control}],q[{target}];", qasm_angle(*phi));
                }
                Gate::MultiControlledPhase {
                    controls,
                    target,
                    phi,
                } => match controls.as_slice() {
                    [] => {
                        let _ = writeln!(out, "p({}) q[{target}];", qasm_angle(*phi));
                    }
                    [c] => {
                        let _ = writeln!(out, "cp({}) q[{c}],q[{target}];", qasm_angle(*phi));
                    }
                    [c0, c1] => {
                        // phi/2 (c1 + c0 - c0 xor c1) = phi c0 c1 on the target's |1>
                        let half = qasm_angle(phi / 2.0);
                        let neg_half = qasm_angle(-phi / 2.0);
                        let _ = writeln!(out, "cp({half}) q[{c1}],q[{target}];");
                        let _ = writeln!(out, "cx q[{c0}],q[{c1}];");
                        let _ = writeln!(out, "cp({neg_half}) q[{c1}],q[{target}];");
                        let _ = writeln!(out, "cx q[{c0}],q[{c1}];");
                        let _ = writeln!(out, "cp({half}) q[{c0}],q[{target}];");
                    }
                    more => return Err(Error::UnsupportedArity(more.len())),
                },
                Gate::Swap { a, b } => {
                    let _ = writeln!(out, "swap q[{a}],q[{b}];");
                }
            }
        }
        Ok(out)
    }
}

fn qasm_angle(phi: f64) -> String {
    // shortest representation that parses back to the same f64; never
    // uses exponent notation
    format!("{phi}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn append_counts_and_rejects_bad_indices() {
        let mut c = Circuit::new(2).unwrap();
        c.append(Gate::hadamard(0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(
            c.append(Gate::controlled_phase(0, 0, 0.4)),
            Err(Error::DuplicateQubit(0))
        );
        assert_eq!(
            c.append(Gate::phase(2, 0.4)),
            Err(Error::QubitOutOfRange {
                index: 2,
                n_qubits: 2
            })
        );
        assert_eq!(
            c.append(Gate::multi_controlled_phase(vec![0, 1], 1, 0.4)),
            Err(Error::DuplicateQubit(1))
        );
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn empty_circuit_counts_zero_and_is_identity() {
        let c = Circuit::new(3).unwrap();
        assert_eq!(c.gate_count(), GateCounts::default());
        assert_eq!(c.gate_count().total(), 0);
        let amps: Vec<_> = (0..8).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        let before = s.clone();
        c.run(&mut s).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn run_rejects_qubit_mismatch() {
        let c = Circuit::new(3).unwrap();
        let mut s = StateVector::zero(2).unwrap();
        assert_eq!(
            c.run(&mut s),
            Err(Error::QubitCountMismatch {
                circuit: 3,
                state: 2
            })
        );
    }

    #[test]
    fn phases_fold_into_half_open_interval() {
        assert_eq!(fold_phase(PI), PI);
        assert!((fold_phase(-PI) - PI).abs() < 1e-15);
        assert!((fold_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((fold_phase(TAU + 0.25) - 0.25).abs() < 1e-12);
        assert!((fold_phase(-0.25) + 0.25).abs() < 1e-15);
        match Gate::phase(0, 7.0) {
            Gate::Phase { phi, .. } => assert!((phi - (7.0 - TAU)).abs() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn inverse_round_trips_a_mixed_circuit() {
        let mut c = Circuit::new(3).unwrap();
        for g in [
            Gate::hadamard(0),
            Gate::controlled_phase(0, 2, 0.7),
            Gate::swap(1, 2),
            Gate::hadamard(1),
            Gate::multi_controlled_phase(vec![0, 1], 2, -1.1),
            Gate::phase(1, 2.2),
        ] {
            c.append(g).unwrap();
        }
        let amps: Vec<_> = (0..8)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let start = StateVector::from_amplitudes(amps).unwrap();
        let mut s = start.clone();
        c.run(&mut s).unwrap();
        c.inverse().run(&mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qasm_header_and_single_hadamard() {
        let mut c = Circuit::new(1).unwrap();
        c.append(Gate::hadamard(0)).unwrap();
        assert_eq!(
            c.to_qasm().unwrap(),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nh q[0];\n"
        );
    }

    #[test]
    fn qasm_angles_round_trip() {
        let mut c = Circuit::new(2).unwrap();
        c.append(Gate::phase(1, PI)).unwrap();
        c.append(Gate::controlled_phase(0, 1, 1e-5)).unwrap();
        c.append(Gate::swap(0, 1)).unwrap();
        let text = c.to_qasm().unwrap();
        let lines: Vec<_> = text.lines().skip(3).collect();
        assert_eq!(lines[0], "p(3.141592653589793) q[1];");
        assert_eq!(lines[1], "cp(0.00001) q[0],q[1];");
        assert_eq!(lines[2], "swap q[0],q[1];");
        let printed: f64 = lines[0][2..19].parse().unwrap();
        assert_eq!(printed, PI);
        for phi in [-std::f64::consts::FRAC_PI_2, 0.1 + 0.2, -3e-7] {
            assert_eq!(qasm_angle(phi).parse::<f64>().unwrap(), phi);
        }
    }

    #[test]
    fn qasm_rejects_three_controls() {
        let mut c = Circuit::new(4).unwrap();
        c.append(Gate::multi_controlled_phase(vec![0, 1, 2], 3, 0.1))
            .unwrap();
        assert_eq!(c.to_qasm(), Err(Error::UnsupportedArity(3)));
    }

    #[test]
    fn qasm_two_control_expansion_is_the_same_unitary() {
        // Replays the emitted cp/cx sequence on a simulator and compares
        // against the native doubly-controlled phase.
        let phi = 0.9;
        let mut native = Circuit::new(3).unwrap();
        native
            .append(Gate::multi_controlled_phase(vec![0, 1], 2, phi))
            .unwrap();
        let text = native.to_qasm().unwrap();
        assert_eq!(text.lines().count(), 3 + 5);

        for basis in 0..8usize {
            let mut amps = vec![Complex64::new(0.0, 0.0); 8];
            amps[basis] = Complex64::new(1.0, 0.0);
            let mut s = StateVector::from_amplitudes(amps).unwrap();
            native.run(&mut s).unwrap();
            // cp(phi/2) c1,t ; cx c0,c1 ; cp(-phi/2) c1,t ; cx ; cp(phi/2) c0,t
            let (c0, c1, t) = (basis & 1, (basis >> 1) & 1, (basis >> 2) & 1);
            let replay = (phi / 2.0) * (c1 * t) as f64 - (phi / 2.0) * (((c0 ^ c1) * t) as f64)
                + (phi / 2.0) * (c0 * t) as f64;
            let expected = Complex64::from_polar(1.0, replay);
            assert!(
                (s.amplitudes()[basis] - expected).norm() < 1e-12,
                "basis {basis}"
            );
        }
    }
}
