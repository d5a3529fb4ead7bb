//! Conversions between diagrams and dense arrays, and path evaluation.

use crate::numerics::PrecComplex;

use super::{DdError, MatrixDD, NodeRef, NodeStore, Result, VectorDD};

/// Dense conversions are limited to `2^MAX_DENSE_BITS` entries.
pub const MAX_DENSE_BITS: u32 = 26;

impl NodeStore {
    /// Builds a vector bottom-up; leaves are created in index order.
    pub fn from_dense(&mut self, values: &[PrecComplex], n: u32) -> Result<VectorDD> {
        if n > MAX_DENSE_BITS {
            return Err(DdError::TooLarge(n));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(DdError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        let root = self.build_vector(values, 0)?;
        Ok(VectorDD { root, n })
    }

    fn build_vector(&mut self, values: &[PrecComplex], var: u32) -> Result<NodeRef> {
        if values.len() == 1 {
            return self.make_leaf(values[0].clone());
        }
        let (lo, hi) = values.split_at(values.len() / 2);
        let l = self.build_vector(lo, var + 1)?;
        let h = self.build_vector(hi, var + 1)?;
        self.make_node(var, l, h)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_dense_matrix(&mut self, values: &[PrecComplex], n: u32) -> Result<MatrixDD> {
        if 2 * n > MAX_DENSE_BITS {
            return Err(DdError::TooLarge(2 * n));
        }
        let expected = 1usize << (2 * n);
        if values.len() != expected {
            return Err(DdError::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        let root = self.build_matrix(values, n, 0, 0, 0)?;
        Ok(MatrixDD { root, n })
    }

    fn build_matrix(
        &mut self,
        values: &[PrecComplex],
        n: u32,
        var: u32,
        row: usize,
        col: usize,
    ) -> Result<NodeRef> {
        if var == 2 * n {
            return self.make_leaf(values[(row << n) | col].clone());
        }
        let bit = 1usize << (n - 1 - var / 2);
        let (l, h) = if var.is_multiple_of(2) {
            (
                self.build_matrix(values, n, var + 1, row, col)?,
                self.build_matrix(values, n, var + 1, row | bit, col)?,
            )
        } else {
            (
                self.build_matrix(values, n, var + 1, row, col)?,
                self.build_matrix(values, n, var + 1, row, col | bit)?,
            )
        };
        self.make_node(var, l, h)
    }

    pub fn to_dense(&self, v: VectorDD) -> Result<Vec<PrecComplex>> {
        if v.n > MAX_DENSE_BITS {
            return Err(DdError::TooLarge(v.n));
        }
        let mut out = vec![PrecComplex::zero(self.precision()); 1usize << v.n];
        self.fill_vector(v.root, 0, v.n, &mut out)?;
        Ok(out)
    }

    fn fill_vector(&self, r: NodeRef, var: u32, n: u32, out: &mut [PrecComplex]) -> Result<()> {
        if let Some(value) = self.value(r) {
            out.fill(value.clone());
            return Ok(());
        }
        if var >= n {
            return Err(DdError::UndeclaredVariable {
                var: self.var(r),
                vars: n,
            });
        }
        let (lo, hi) = self.cofactors(r, var);
        let (a, b) = out.split_at_mut(out.len() / 2);
        self.fill_vector(lo, var + 1, n, a)?;
        self.fill_vector(hi, var + 1, n, b)
    }

    /// Row-major dense matrix.
    pub fn to_dense_matrix(&self, m: MatrixDD) -> Result<Vec<PrecComplex>> {
        if 2 * m.n > MAX_DENSE_BITS {
            return Err(DdError::TooLarge(2 * m.n));
        }
        let dim = 1usize << m.n;
        let mut out = Vec::with_capacity(dim * dim);
        for row in 0..dim {
            for col in 0..dim {
                out.push(self.eval_matrix(m, row as u64, col as u64)?.clone());
            }
        }
        Ok(out)
    }

    /// Follows the path selected by `assignment[var]` for each node met.
    pub fn eval(&self, root: NodeRef, assignment: &[bool]) -> Result<&PrecComplex> {
        let mut r = root;
        loop {
            if let Some(v) = self.value(r) {
                return Ok(v);
            }
            let var = self.var(r);
            let bit = *assignment
                .get(var as usize)
                .ok_or(DdError::AssignmentLength {
                    var,
                    len: assignment.len(),
                })?;
            let (lo, hi) = self.children(r).expect("internal node");
            r = if bit { hi } else { lo };
        }
    }

    /// Entry `index` of a vector (bit `n-1-k` of `index` is variable `k`).
    pub fn eval_vector(&self, v: VectorDD, index: u64) -> Result<&PrecComplex> {
        let bits: Vec<bool> = (0..v.n).map(|k| (index >> (v.n - 1 - k)) & 1 == 1).collect();
        self.eval(v.root, &bits)
    }

    pub fn eval_matrix(&self, m: MatrixDD, row: u64, col: u64) -> Result<&PrecComplex> {
        let mut bits = Vec::with_capacity(2 * m.n as usize);
        for k in 0..m.n {
            bits.push((row >> (m.n - 1 - k)) & 1 == 1);
            bits.push((col >> (m.n - 1 - k)) & 1 == 1);
        }
        self.eval(m.root, &bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecConfig;

    fn sample_vector(cfg: PrecConfig, last: f64) -> Vec<PrecComplex> {
        [1.0, 1.0, -2.0, -2.0, 3.0, 1.0, 2.0, last]
            .iter()
            .map(|&x| PrecComplex::from_f64(cfg, x, 0.0).unwrap())
            .collect()
    }

    #[test]
    fn constant_vector_is_one_leaf() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let c = PrecComplex::from_f64(cfg, 0.125, -1.0).unwrap();
        let v = s.from_dense(&vec![c.clone(); 16], 4).unwrap();
        assert_eq!(s.count_nodes(v.root), 1);
        assert_eq!(s.eval(v.root, &[]).unwrap(), &c);
    }

    #[test]
    fn eval_follows_path() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let v = s.from_dense(&sample_vector(cfg, 2.0000000000000004), 3).unwrap();
        assert_eq!(s.eval(v.root, &[true, false, false]).unwrap().re.to_f64(), 3.0);
        assert_eq!(s.eval_vector(v, 4).unwrap().re.to_f64(), 3.0);
        assert_eq!(s.eval_vector(v, 7).unwrap().re.to_f64(), 2.0000000000000004);
        assert!(matches!(
            s.eval(v.root, &[true]),
            Err(DdError::AssignmentLength { .. })
        ));
    }

    #[test]
    fn length_mismatch() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        assert_eq!(
            s.from_dense(&sample_vector(cfg, 2.0)[..7], 3).unwrap_err(),
            DdError::LengthMismatch { expected: 8, got: 7 }
        );
        assert!(s.from_dense_matrix(&sample_vector(cfg, 2.0), 2).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let vals: Vec<PrecComplex> = (0..16)
            .map(|i| PrecComplex::from_f64(cfg, i as f64, -(i as f64) / 8.0).unwrap())
            .collect();
        let m = s.from_dense_matrix(&vals, 2).unwrap();
        assert_eq!(s.to_dense_matrix(m).unwrap(), vals);
        assert_eq!(s.eval_matrix(m, 2, 1).unwrap(), &vals[9]);
    }
}
