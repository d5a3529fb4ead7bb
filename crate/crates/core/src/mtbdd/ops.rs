//! Vector addition and matrix-vector multiplication.

use super::{DdError, MatrixDD, NodeRef, NodeStore, OpTag, Result, VectorDD};

impl NodeStore {
    /// Elementwise sum. Each result leaf is one rounded complex addition
    /// followed by `make_leaf`.
    pub fn plus(&mut self, a: VectorDD, b: VectorDD) -> Result<VectorDD> {
        if a.n != b.n {
            return Err(DdError::VariableMismatch {
                left: a.n,
                right: b.n,
            });
        }
        let root = self.plus_rec(a.root, b.root)?;
        Ok(VectorDD { root, n: a.n })
    }

    pub(crate) fn plus_rec(&mut self, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        if let (Some(va), Some(vb)) = (self.value(a), self.value(b)) {
            let sum = va.add(vb)?;
            return self.make_leaf(sum);
        }
        // complex addition is commutative bit for bit
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        if let Some(r) = self.cache_get(OpTag::Plus, x, y) {
            return Ok(r);
        }
        let var = self.var(a).min(self.var(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let r0 = self.plus_rec(a0, b0)?;
        let r1 = self.plus_rec(a1, b1)?;
        let r = self.make_node(var, r0, r1)?;
        self.cache_put(OpTag::Plus, x, y, r);
        Ok(r)
    }

    /// `M * v` by block recursion over qubit levels:
    /// `(Mv)|0 = M|00 v|0 + M|01 v|1` and `(Mv)|1 = M|10 v|0 + M|11 v|1`,
    /// where `M|rc` fixes row bit `r` and column bit `c`.
    ///
    /// The recursion always descends to level `n`, so every entry of the
    /// result is the balanced binary-tree sum of its `2^n` rounded products.
    /// Blocks where either operand is the exact-zero leaf short-circuit to
    /// zero.
    pub fn multiply(&mut self, m: MatrixDD, v: VectorDD) -> Result<VectorDD> {
        if m.n != v.n {
            return Err(DdError::VariableMismatch {
                left: m.n,
                right: v.n,
            });
        }
        let root = self.multiply_rec(m.root, v.root, 0, m.n)?;
        Ok(VectorDD { root, n: v.n })
    }

    fn multiply_rec(&mut self, m: NodeRef, v: NodeRef, level: u32, n: u32) -> Result<NodeRef> {
        if self.is_zero(m) || self.is_zero(v) {
            return Ok(self.zero());
        }
        if level == n {
            let (Some(mv), Some(vv)) = (self.value(m), self.value(v)) else {
                return Err(DdError::UndeclaredVariable {
                    var: self.var(m).min(self.var(v)),
                    vars: 2 * n,
                });
            };
            let product = mv.mul(vv)?;
            return self.make_leaf(product);
        }
        let tag = OpTag::Multiply(level);
        if let Some(r) = self.cache_get(tag, m, v) {
            return Ok(r);
        }
        let (m0, m1) = self.cofactors(m, 2 * level);
        let (m00, m01) = self.cofactors(m0, 2 * level + 1);
        let (m10, m11) = self.cofactors(m1, 2 * level + 1);
        let (v0, v1) = self.cofactors(v, level);

        let r00 = self.multiply_rec(m00, v0, level + 1, n)?;
        let r01 = self.multiply_rec(m01, v1, level + 1, n)?;
        let r10 = self.multiply_rec(m10, v0, level + 1, n)?;
        let r11 = self.multiply_rec(m11, v1, level + 1, n)?;

        let r0 = self.plus_rec(r00, r01)?;
        let r1 = self.plus_rec(r10, r11)?;
        let r = self.make_node(level, r0, r1)?;
        self.cache_put(tag, m, v, r);
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use crate::mtbdd::NodeStore;
    use crate::numerics::{Constant, PrecComplex, PrecConfig};

    fn reals(cfg: PrecConfig, xs: &[f64]) -> Vec<PrecComplex> {
        xs.iter()
            .map(|&x| PrecComplex::from_f64(cfg, x, 0.0).unwrap())
            .collect()
    }

    #[test]
    fn plus_zero_is_identity() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let v = s
            .from_dense(&reals(cfg, &[0.1, -3.0, 7.5, 0.1]), 2)
            .unwrap();
        let zero = s.vector(s.zero(), 2).unwrap();
        let sum = s.plus(v, zero).unwrap();
        assert_eq!(sum.root, v.root);
    }

    #[test]
    fn plus_handles_skipped_variables() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let a = s.from_dense(&reals(cfg, &[1.0, 1.0, 2.0, 2.0]), 2).unwrap();
        let b = s.from_dense(&reals(cfg, &[10.0, 20.0, 10.0, 20.0]), 2).unwrap();
        let c = s.plus(a, b).unwrap();
        let dense: Vec<f64> = s.to_dense(c).unwrap().iter().map(|x| x.re.to_f64()).collect();
        assert_eq!(dense, vec![11.0, 21.0, 12.0, 22.0]);
    }

    #[test]
    fn plus_rejects_mismatched_sizes() {
        let mut s = NodeStore::new(PrecConfig::DOUBLE, 0.0).unwrap();
        let a = s.basis_state(2, 0).unwrap();
        let b = s.basis_state(3, 0).unwrap();
        assert!(s.plus(a, b).is_err());
    }

    #[test]
    fn identity_times_vector_is_exact() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let n = 3;
        let mut id = vec![PrecComplex::zero(cfg); 64];
        for i in 0..8 {
            id[i * 8 + i] = PrecComplex::one(cfg);
        }
        let m = s.from_dense_matrix(&id, n).unwrap();
        let v = s
            .from_dense(
                &reals(cfg, &[0.1, 0.2, -0.3, 1e-9, 5.0, 0.0, 0.7, -2.5]),
                n,
            )
            .unwrap();
        let r = s.multiply(m, v).unwrap();
        assert_eq!(r.root, v.root);
    }

    #[test]
    fn hadamard_pair_on_basis_state() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let h = Constant::SqrtHalf.eval(cfg).unwrap();
        // H (x) H, row-major
        let sign = |r: usize, c: usize| (r & c).count_ones() % 2 == 1;
        let mut entries = Vec::new();
        let hh = h.mul(&h).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                entries.push(if sign(r, c) { hh.neg() } else { hh.clone() });
            }
        }
        let m = s.from_dense_matrix(&entries, 2).unwrap();
        let e0 = s.basis_state(2, 0).unwrap();
        let out = s.multiply(m, e0).unwrap();
        let expected = hh.mul(&PrecComplex::one(cfg)).unwrap();
        for x in s.to_dense(out).unwrap() {
            assert_eq!(x, expected);
        }
    }

    #[test]
    fn multiply_rejects_dimension_mismatch() {
        let mut s = NodeStore::new(PrecConfig::DOUBLE, 0.0).unwrap();
        let v = s.basis_state(2, 0).unwrap();
        let m = s.matrix(s.zero(), 3).unwrap();
        assert!(s.multiply(m, v).is_err());
    }
}
