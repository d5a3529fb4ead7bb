//! Gates, circuits, the circuit text format, benchmark generators and
//! gate-by-gate simulation.

mod generators;
mod matrix;
mod parse;
mod simulate;

use std::fmt;

use thiserror::Error;

use crate::mtbdd::DdError;
use crate::numerics::{Angle, NumericsError};

pub use generators::{
    gen_dj, gen_qpe_exact, gen_wstate, qpe_phase_numerator, Family, GenOptions, MAX_QUBITS,
    MIN_QUBITS,
};
pub use matrix::{base_matrix, gate_matrix, unitarity_defect};
pub use parse::parse_circuit;
pub use simulate::{simulate, simulate_with, SimulationStep};

pub type Qubit = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<QuantumError>,
    },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: Qubit, n: u32 },
    #[error("{gate} acts on qubit {qubit} twice")]
    RepeatedQubit { gate: &'static str, qubit: Qubit },
    #[error("{gate} takes {expected} qubit(s), got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("qubit count {n} outside {min}..={max}")]
    QubitCount { n: u32, min: u32, max: u32 },
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl QuantumError {
    /// The arithmetic error at the bottom of this error, if any.
    pub fn numerics(&self) -> Option<&NumericsError> {
        match self {
            QuantumError::Numerics(e) | QuantumError::Dd(DdError::Numerics(e)) => Some(e),
            QuantumError::AtLine { source, .. } => source.numerics(),
            _ => None,
        }
    }
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    CX,
    CCX,
    RY(Angle),
    RZ(Angle),
    P(Angle),
    CP(Angle),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX | GateKind::CP(_) => 2,
            GateKind::CCX => 3,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::RY(_) => "ry",
            GateKind::RZ(_) => "rz",
            GateKind::P(_) => "p",
            GateKind::CP(_) => "cp",
        }
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            GateKind::RY(a) | GateKind::RZ(a) | GateKind::P(a) | GateKind::CP(a) => Some(a),
            _ => None,
        }
    }
}

/// A gate applied to `qubits`, listed controls first and target last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<Qubit>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<Qubit>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(QuantumError::Arity {
                gate: kind.name(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(QuantumError::RepeatedQubit {
                    gate: kind.name(),
                    qubit: *q,
                });
            }
        }
        Ok(Gate { kind, qubits })
    }

    pub fn h(q: Qubit) -> Self {
        Gate { kind: GateKind::H, qubits: vec![q] }
    }

    pub fn x(q: Qubit) -> Self {
        Gate { kind: GateKind::X, qubits: vec![q] }
    }

    pub fn z(q: Qubit) -> Self {
        Gate { kind: GateKind::Z, qubits: vec![q] }
    }

    pub fn ry(theta: Angle, q: Qubit) -> Self {
        Gate { kind: GateKind::RY(theta), qubits: vec![q] }
    }

    pub fn rz(theta: Angle, q: Qubit) -> Self {
        Gate { kind: GateKind::RZ(theta), qubits: vec![q] }
    }

    pub fn p(theta: Angle, q: Qubit) -> Self {
        Gate { kind: GateKind::P(theta), qubits: vec![q] }
    }

    /// Panics if `control == target`.
    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::CX, vec![control, target]).expect("distinct qubits")
    }

    pub fn cp(theta: Angle, control: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::CP(theta), vec![control, target]).expect("distinct qubits")
    }

    pub fn ccx(c0: Qubit, c1: Qubit, target: Qubit) -> Self {
        Gate::new(GateKind::CCX, vec![c0, c1, target]).expect("distinct qubits")
    }

    fn check(&self, n: u32) -> Result<()> {
        match self.qubits.iter().find(|&&q| q >= n) {
            Some(&qubit) => Err(QuantumError::QubitOutOfRange { qubit, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if let Some(a) = self.kind.angle() {
            write!(f, "({a})")?;
        }
        for (i, q) in self.qubits.iter().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            write!(f, "{sep}q[{q}]")?;
        }
        f.write_str(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: u32, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.check(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Replaces every Toffoli by the standard 15-gate Clifford+T network,
    /// with `T = p(pi/4)` and `T^dagger = p(-pi/4)`.
    pub fn decompose_toffoli(&self) -> Circuit {
        let t = || Angle::pi_over(4);
        let tdg = || Angle::minus_pi_over(4);
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            if g.kind != GateKind::CCX {
                gates.push(g.clone());
                continue;
            }
            let (a, b, c) = (g.qubits[0], g.qubits[1], g.qubits[2]);
            gates.extend([
                Gate::h(c),
                Gate::cx(b, c),
                Gate::p(tdg(), c),
                Gate::cx(a, c),
                Gate::p(t(), c),
                Gate::cx(b, c),
                Gate::p(tdg(), c),
                Gate::cx(a, c),
                Gate::p(t(), b),
                Gate::p(t(), c),
                Gate::h(c),
                Gate::cx(a, b),
                Gate::p(t(), a),
                Gate::p(tdg(), b),
                Gate::cx(a, b),
            ]);
        }
        Circuit { n: self.n, gates }
    }
}

/// Emits the circuit text format; [`parse_circuit`] reads it back.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qreg q[{}];", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_validation() {
        assert!(matches!(
            Gate::new(GateKind::CX, vec![1, 1]),
            Err(QuantumError::RepeatedQubit { qubit: 1, .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::H, vec![0, 1]),
            Err(QuantumError::Arity { expected: 1, got: 2, .. })
        ));
        let mut c = Circuit::new(2);
        assert_eq!(
            c.push(Gate::h(2)),
            Err(QuantumError::QubitOutOfRange { qubit: 2, n: 2 })
        );
    }

    #[test]
    fn emits_text_format() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::h(0),
                Gate::cp(Angle::minus_pi_over(8), 0, 2),
                Gate::ry(Angle::decimal("1.5").unwrap(), 1),
                Gate::ccx(0, 1, 2),
            ],
        )
        .unwrap();
        assert_eq!(
            c.to_string(),
            "qreg q[3];\nh q[0];\ncp(-pi/8) q[0],q[2];\nry(1.5) q[1];\nccx q[0],q[1],q[2];\n"
        );
    }

    #[test]
    fn toffoli_decomposition_shape() {
        let c = Circuit::from_gates(3, vec![Gate::x(0), Gate::ccx(0, 1, 2)]).unwrap();
        let d = c.decompose_toffoli();
        assert_eq!(d.gates().len(), 16);
        assert!(d.gates().iter().all(|g| g.kind != GateKind::CCX));
    }
}
