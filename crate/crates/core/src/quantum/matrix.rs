//! Operator diagrams for gates embedded in an `n`-qubit register.

use std::collections::HashMap;

use crate::mtbdd::{MatrixDD, NodeRef, NodeStore};
use crate::numerics::{Angle, Constant, PrecComplex, PrecConfig};

use super::{Gate, GateKind, Result};

/// The `2^k x 2^k` matrix of a gate on its own qubits, row-major. The first
/// listed qubit is the most significant bit of the local index.
pub fn base_matrix(kind: &GateKind, cfg: PrecConfig) -> Result<Vec<PrecComplex>> {
    let zero = PrecComplex::zero(cfg);
    let one = PrecComplex::one(cfg);
    let dim = 1usize << kind.arity();
    let mut m = vec![zero; dim * dim];
    let mut set = |r: usize, c: usize, v: PrecComplex| m[r * dim + c] = v;
    match kind {
        GateKind::H => {
            let h = Constant::SqrtHalf.eval(cfg)?;
            set(0, 0, h.clone());
            set(0, 1, h.clone());
            set(1, 0, h.clone());
            set(1, 1, h.neg());
        }
        GateKind::X => {
            set(0, 1, one.clone());
            set(1, 0, one);
        }
        GateKind::Z => {
            set(0, 0, one.clone());
            set(1, 1, one.neg());
        }
        GateKind::CX => {
            for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                set(r, c, one.clone());
            }
        }
        GateKind::CCX => {
            for r in 0..6 {
                set(r, r, one.clone());
            }
            set(6, 7, one.clone());
            set(7, 6, one);
        }
        GateKind::RY(theta) => {
            let (c, s) = theta.cos_sin_scaled(cfg, -1)?;
            let (c, s) = (PrecComplex::real(c), PrecComplex::real(s));
            set(0, 0, c.clone());
            set(0, 1, s.neg());
            set(1, 0, s);
            set(1, 1, c);
        }
        GateKind::RZ(theta) => {
            let (c, s) = theta.cos_sin_scaled(cfg, -1)?;
            set(0, 0, PrecComplex::new(c.clone(), s.neg())?);
            set(1, 1, PrecComplex::new(c, s)?);
        }
        GateKind::P(theta) => {
            set(0, 0, one);
            set(1, 1, phase(theta, cfg)?);
        }
        GateKind::CP(theta) => {
            for r in 0..3 {
                set(r, r, one.clone());
            }
            set(3, 3, phase(theta, cfg)?);
        }
    }
    Ok(m)
}

fn phase(theta: &Angle, cfg: PrecConfig) -> Result<PrecComplex> {
    let (c, s) = theta.cos_sin_scaled(cfg, 0)?;
    Ok(PrecComplex::new(c, s)?)
}

struct Builder<'a> {
    gate: &'a Gate,
    n: u32,
    base: Vec<PrecComplex>,
    dim: usize,
    memo: HashMap<(u32, usize, usize), NodeRef>,
}

impl Builder<'_> {
    fn build(&mut self, store: &mut NodeStore, q: u32, row: usize, col: usize) -> Result<NodeRef> {
        if q == self.n {
            return Ok(store.make_leaf(self.base[row * self.dim + col].clone())?);
        }
        if let Some(&r) = self.memo.get(&(q, row, col)) {
            return Ok(r);
        }
        let (rv, cv) = (2 * q, 2 * q + 1);
        let zero = store.zero();
        let node = match self.gate.qubits.iter().position(|&t| t == q) {
            None => {
                let rest = self.build(store, q + 1, row, col)?;
                let lo = store.make_node(cv, rest, zero)?;
                let hi = store.make_node(cv, zero, rest)?;
                store.make_node(rv, lo, hi)?
            }
            Some(p) => {
                let bit = 1usize << (self.gate.qubits.len() - 1 - p);
                let m00 = self.build(store, q + 1, row, col)?;
                let m01 = self.build(store, q + 1, row, col | bit)?;
                let m10 = self.build(store, q + 1, row | bit, col)?;
                let m11 = self.build(store, q + 1, row | bit, col | bit)?;
                let lo = store.make_node(cv, m00, m01)?;
                let hi = store.make_node(cv, m10, m11)?;
                store.make_node(rv, lo, hi)?
            }
        };
        self.memo.insert((q, row, col), node);
        Ok(node)
    }
}

impl Gate {
    /// The `n`-qubit operator of this gate, identity on every other qubit.
    /// Built level by level without a dense `4^n` intermediate; leaves are
    /// the gate's own entries at the store's precision.
    pub fn matrix(&self, store: &mut NodeStore, n: u32) -> Result<MatrixDD> {
        self.check(n)?;
        let base = base_matrix(&self.kind, store.precision())?;
        let mut b = Builder {
            gate: self,
            n,
            dim: 1 << self.qubits.len(),
            base,
            memo: HashMap::new(),
        };
        let root = b.build(store, 0, 0, 0)?;
        Ok(MatrixDD { root, n })
    }
}

/// Convenience for `g.matrix(store, n)`.
pub fn gate_matrix(store: &mut NodeStore, g: &Gate, n: u32) -> Result<MatrixDD> {
    g.matrix(store, n)
}

/// `max |(U^dagger U - I)_ij|` of a dense square matrix, evaluated with
/// guard bits above `cfg`.
pub fn unitarity_defect(u: &[PrecComplex], dim: usize) -> f64 {
    let prec = u
        .first()
        .map_or(64, |x| 2 * x.config().bits() + 64);
    let mut worst = rug::Float::new(prec);
    for i in 0..dim {
        for j in 0..dim {
            let mut re = rug::Float::new(prec);
            let mut im = rug::Float::new(prec);
            for k in 0..dim {
                // conj(u[k][i]) * u[k][j]
                let (a, b) = (&u[k * dim + i], &u[k * dim + j]);
                let (ar, ai) = (a.re.as_float(), a.im.as_float());
                let (br, bi) = (b.re.as_float(), b.im.as_float());
                re += rug::Float::with_val(prec, ar * br);
                re += rug::Float::with_val(prec, ai * bi);
                im += rug::Float::with_val(prec, ar * bi);
                im -= rug::Float::with_val(prec, ai * br);
            }
            if i == j {
                re -= 1;
            }
            let d = rug::Float::with_val(prec, re.hypot_ref(&im));
            if d > worst {
                worst = d;
            }
        }
    }
    worst.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(store: &mut NodeStore, g: &Gate, n: u32) -> Vec<PrecComplex> {
        let m = g.matrix(store, n).unwrap();
        store.to_dense_matrix(m).unwrap()
    }

    fn real(cfg: PrecConfig, x: f64) -> PrecComplex {
        PrecComplex::from_f64(cfg, x, 0.0).unwrap()
    }

    #[test]
    fn pauli_x_on_one_qubit() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let d = dense(&mut s, &Gate::x(0), 1);
        let expect: Vec<_> = [0.0, 1.0, 1.0, 0.0].iter().map(|&x| real(cfg, x)).collect();
        assert_eq!(d, expect);
    }

    #[test]
    fn hadamard_entries() {
        let cfg = PrecConfig::SINGLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let h = Constant::SqrtHalf.eval(cfg).unwrap();
        let d = dense(&mut s, &Gate::h(0), 1);
        assert_eq!(d, vec![h.clone(), h.clone(), h.clone(), h.neg()]);
    }

    #[test]
    fn embedding_matches_kronecker_product() {
        // control q2, target q0; q0 is the most significant index bit
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let d = dense(&mut s, &Gate::cx(2, 0), 3);
        for row in 0..8usize {
            for col in 0..8usize {
                let q2 = col & 1;
                let image = col ^ (q2 << 2);
                let want = if row == image { 1.0 } else { 0.0 };
                assert_eq!(d[row * 8 + col], real(cfg, want), "({row},{col})");
            }
        }
    }

    #[test]
    fn base_matrices_are_unitary_at_reference_precision() {
        let cfg = PrecConfig::REFERENCE;
        let kinds = [
            GateKind::H,
            GateKind::X,
            GateKind::Z,
            GateKind::CX,
            GateKind::CCX,
            GateKind::RY(Angle::Decimal("1.910633236249019".into())),
            GateKind::RZ(Angle::minus_pi_over(1 << 10)),
            GateKind::P(Angle::pi_over(3)),
            GateKind::CP(Angle::Decimal("-2.5".into())),
        ];
        for k in kinds {
            let m = base_matrix(&k, cfg).unwrap();
            let defect = unitarity_defect(&m, 1 << k.arity());
            assert!(defect <= 2f64.powi(-100), "{k:?}: {defect:e}");
        }
    }

    #[test]
    fn identity_padding_is_linear_in_n() {
        let mut counts = Vec::new();
        for n in 2..=10 {
            let mut s = NodeStore::new(PrecConfig::DOUBLE, 0.0).unwrap();
            let m = Gate::h(0).matrix(&mut s, n).unwrap();
            counts.push(s.count_nodes(m.root));
        }
        let step = counts[1] - counts[0];
        assert!(step > 0);
        for w in counts.windows(2) {
            assert_eq!(w[1] - w[0], step, "{counts:?}");
        }
    }
}
