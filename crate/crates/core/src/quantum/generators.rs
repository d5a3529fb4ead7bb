//! Benchmark circuit families.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant as MpConstant;
use rug::Float;

use crate::numerics::Angle;

use super::{Circuit, Gate, QuantumError, Result};

pub const MIN_QUBITS: u32 = 2;
pub const MAX_QUBITS: u32 = 30;

/// Working precision for generator angles before they are printed.
const ANGLE_BITS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Dj,
    Qpe,
    Wstate,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Dj, Family::Qpe, Family::Wstate];

    pub fn generate(self, n: u32, opts: &GenOptions) -> Result<Circuit> {
        match self {
            Family::Dj => gen_dj(n, opts.h_as_ry),
            Family::Qpe => gen_qpe_exact(n, opts.seed, opts.angle_digits),
            Family::Wstate => gen_wstate(n, opts.angle_digits),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Dj => "dj",
            Family::Qpe => "qpe",
            Family::Wstate => "wstate",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dj" => Ok(Family::Dj),
            "qpe" => Ok(Family::Qpe),
            "wstate" | "w" => Ok(Family::Wstate),
            other => Err(format!("unknown family `{other}` (expected dj, qpe or wstate)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenOptions {
    /// Seeds the random QPE phase.
    pub seed: u64,
    /// Write the closing DJ Hadamards as `z` followed by `ry(pi/2)`.
    pub h_as_ry: bool,
    /// Significant digits of emitted decimal angles.
    pub angle_digits: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            seed: 0,
            h_as_ry: false,
            angle_digits: 17,
        }
    }
}

fn check_size(n: u32) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(QuantumError::QubitCount {
            n,
            min: MIN_QUBITS,
            max: MAX_QUBITS,
        })
    }
}

/// Deutsch-Jozsa with the parity oracle: inputs `0..n-1`, ancilla `n-1`.
pub fn gen_dj(n: u32, h_as_ry: bool) -> Result<Circuit> {
    check_size(n)?;
    let anc = n - 1;
    let mut gates = vec![Gate::x(anc), Gate::h(anc)];
    gates.extend((0..anc).map(Gate::h));
    gates.extend((0..anc).map(|q| Gate::cx(q, anc)));
    for q in 0..anc {
        if h_as_ry {
            // ry(pi/2) * z == h
            gates.push(Gate::z(q));
            gates.push(Gate::ry(Angle::pi_over(2), q));
        } else {
            gates.push(Gate::h(q));
        }
    }
    Circuit::from_gates(n, gates)
}

/// Phase estimation of `p(2 pi x / 2^m)` on the eigenstate `|1>`, with
/// `m = n - 1` counting qubits and `x` drawn from `seed`, so the phase is
/// exactly `m` bits long. Counting qubit `j` controls `U^(2^j)`; the inverse
/// Fourier transform uses `cp(-pi/2^k)` for `k` in `1..=n-2` and no swaps,
/// leaving `x` on the counting register with qubit 0 most significant.
pub fn gen_qpe_exact(n: u32, seed: u64, angle_digits: usize) -> Result<Circuit> {
    check_size(n)?;
    let m = n - 1;
    let target = m;
    let x = qpe_phase_numerator(n, seed);
    let mut gates = vec![Gate::x(target)];
    gates.extend((0..m).map(Gate::h));
    let two_pi = Float::with_val(ANGLE_BITS, MpConstant::Pi) * 2u32;
    for j in 0..m {
        let num = (x << j) & ((1u64 << m) - 1);
        let theta = Float::with_val(ANGLE_BITS, &two_pi * num) >> m;
        gates.push(Gate::cp(Angle::from_float(&theta, angle_digits), j, target));
    }
    for l in (0..m).rev() {
        for j in l + 1..m {
            let k = j - l;
            gates.push(Gate::cp(Angle::minus_pi_over(1u64 << k), j, l));
        }
        gates.push(Gate::h(l));
    }
    Circuit::from_gates(n, gates)
}

/// The measured value encoded by `gen_qpe_exact(n, seed, _)`.
pub fn qpe_phase_numerator(n: u32, seed: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed).gen_range(0..1u64 << (n - 1))
}

/// W state via a cascade of controlled RY rotations that moves the single
/// excitation down the register, followed by a CX chain that turns the
/// prefixes `1^j 0^(n-j)` into one-hot vectors.
///
/// Step `k` rotates qubit `k` by `2 acos(sqrt(1/(n-k+1)))`, controlled on
/// qubit `k-1`; the controlled rotation is `ry(a/2) cx ry(-a/2) cx`.
pub fn gen_wstate(n: u32, angle_digits: usize) -> Result<Circuit> {
    check_size(n)?;
    let angle = |k: u32, halve: bool| -> Float {
        let frac = Float::with_val(ANGLE_BITS, 1) / (n - k + 1);
        let mut a = Float::with_val(ANGLE_BITS, frac.sqrt().acos_ref()) * 2u32;
        if halve {
            a >>= 1;
        }
        a
    };
    let lit = |x: &Float| Angle::from_float(x, angle_digits);
    let mut gates = vec![Gate::x(0), Gate::ry(lit(&angle(1, false)), 1)];
    for k in 2..n {
        let half = angle(k, true);
        gates.push(Gate::ry(lit(&half), k));
        gates.push(Gate::cx(k - 1, k));
        gates.push(Gate::ry(lit(&half).negated(), k));
        gates.push(Gate::cx(k - 1, k));
    }
    for k in 1..n {
        gates.push(Gate::cx(k, k - 1));
    }
    Circuit::from_gates(n, gates)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::quantum::GateKind;

    #[test]
    fn dj_gate_set() {
        let c = gen_dj(2, false).unwrap();
        for g in c.gates() {
            assert!(matches!(g.kind, GateKind::H | GateKind::X | GateKind::CX));
        }
        let c = gen_dj(5, true).unwrap();
        assert!(c.gates().iter().any(|g| g.kind == GateKind::RY(Angle::pi_over(2))));
    }

    #[test]
    fn qpe_phase_ladder() {
        for n in [4u32, 7, 10] {
            let c = gen_qpe_exact(n, 11, 17).unwrap();
            let ks: BTreeSet<u64> = c
                .gates()
                .iter()
                .filter_map(|g| match &g.kind {
                    GateKind::CP(Angle::PiFraction {
                        negative: true,
                        denominator,
                    }) => Some(denominator.trailing_zeros() as u64),
                    _ => None,
                })
                .collect();
            assert_eq!(ks, (1..=(n as u64 - 2)).collect());
        }
    }

    #[test]
    fn size_limits() {
        assert!(gen_dj(1, false).is_err());
        assert!(gen_wstate(31, 17).is_err());
        assert!(gen_qpe_exact(30, 0, 17).is_ok());
    }

    #[test]
    fn family_names() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("ghz".parse::<Family>().is_err());
    }

    #[test]
    fn wstate_angles_are_finite_decimals() {
        let c = gen_wstate(6, 17).unwrap();
        let first = c.gates()[1].kind.angle().unwrap().clone();
        // 2 acos(sqrt(1/6))
        assert_eq!(first, Angle::Decimal("2.300523983021863".into()));
    }
}
