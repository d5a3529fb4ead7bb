//! Canonical multi-terminal BDD store.
//!
//! Nodes live in an append-only arena addressed by [`NodeRef`]. Internal
//! nodes are hash-consed through a unique table; leaves go through a leaf
//! table that merges values closer than the store's threshold `delta`.
//! Vectors over `n` bits use variables `0..n` (variable 0 is the most
//! significant index bit). Matrices use `0..2n` with row and column bits
//! interleaved: variable `2k` is row bit `k`, variable `2k + 1` column bit `k`.

mod dense;
mod dot;
mod leaf_table;
mod ops;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::numerics::{NumericsError, PrecComplex, PrecConfig};

use leaf_table::LeafTable;

/// Variable index; leaves report [`LEAF_VAR`].
pub type Var = u32;

/// Variable reported for leaves, ordered after every real variable.
pub const LEAF_VAR: Var = Var::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("merge threshold must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
    #[error("variable order violated: node variable {var} is not above child variable {child}")]
    Ordering { var: Var, child: Var },
    #[error("operands range over {left} and {right} bits")]
    VariableMismatch { left: u32, right: u32 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node variable {var} outside a {len}-variable assignment")]
    AssignmentLength { var: Var, len: usize },
    #[error("diagram has variable {var} but only {vars} variables are declared")]
    UndeclaredVariable { var: Var, vars: u32 },
    #[error("{0} bits is too large to materialise densely")]
    TooLarge(u32),
}

pub type Result<T, E = DdError> = std::result::Result<T, E>;

/// Handle to a node inside one [`NodeStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef(u32);

impl NodeRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Leaf(PrecComplex),
    Internal { var: Var, low: NodeRef, high: NodeRef },
}

/// A `2^n` vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VectorDD {
    pub root: NodeRef,
    pub n: u32,
}

/// A `2^n x 2^n` matrix over interleaved row/column variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixDD {
    pub root: NodeRef,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum OpTag {
    Plus,
    /// Multiplication entered at qubit level `k`.
    Multiply(u32),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub leaves: usize,
    pub internal: usize,
    pub peak_live: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    /// `make_leaf` calls answered by an existing leaf at a different value.
    pub merges: u64,
}

/// Arena, unique table, leaf table and operation cache.
///
/// The merge threshold and precision are fixed at construction. Nodes are
/// never freed; a store is meant to be dropped after one experiment.
pub struct NodeStore {
    cfg: PrecConfig,
    delta: f64,
    nodes: Vec<Node>,
    unique: HashMap<(Var, NodeRef, NodeRef), NodeRef>,
    leaves: LeafTable,
    cache: Option<HashMap<(OpTag, NodeRef, NodeRef), NodeRef>>,
    zero: NodeRef,
    roots: BTreeMap<NodeRef, usize>,
    stats: StoreStats,
}

impl NodeStore {
    /// Creates a store; the exact-zero leaf is always the first node.
    pub fn new(cfg: PrecConfig, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(DdError::InvalidDelta(delta));
        }
        let mut store = NodeStore {
            cfg,
            delta,
            nodes: Vec::new(),
            unique: HashMap::new(),
            leaves: LeafTable::new(cfg, delta),
            cache: Some(HashMap::new()),
            zero: NodeRef(0),
            roots: BTreeMap::new(),
            stats: StoreStats::default(),
        };
        store.zero = store.make_leaf(PrecComplex::zero(cfg))?;
        Ok(store)
    }

    /// Disables the operation cache (results are unchanged, only slower).
    pub fn without_op_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn precision(&self) -> PrecConfig {
        self.cfg
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn stats(&self) -> StoreStats {
        self.stats
    }

    /// Total nodes ever created.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn zero(&self) -> NodeRef {
        self.zero
    }

    fn node(&self, r: NodeRef) -> &Node {
        &self.nodes[r.index()]
    }

    pub fn is_leaf(&self, r: NodeRef) -> bool {
        matches!(self.node(r), Node::Leaf(_))
    }

    pub fn is_zero(&self, r: NodeRef) -> bool {
        r == self.zero
    }

    pub fn var(&self, r: NodeRef) -> Var {
        match self.node(r) {
            Node::Leaf(_) => LEAF_VAR,
            Node::Internal { var, .. } => *var,
        }
    }

    pub fn value(&self, r: NodeRef) -> Option<&PrecComplex> {
        match self.node(r) {
            Node::Leaf(v) => Some(v),
            Node::Internal { .. } => None,
        }
    }

    pub fn children(&self, r: NodeRef) -> Option<(NodeRef, NodeRef)> {
        match self.node(r) {
            Node::Leaf(_) => None,
            Node::Internal { low, high, .. } => Some((*low, *high)),
        }
    }

    /// Cofactors with respect to `var`; a node whose top variable is below
    /// `var` in the order does not depend on it.
    pub fn cofactors(&self, r: NodeRef, var: Var) -> (NodeRef, NodeRef) {
        match self.node(r) {
            Node::Internal { var: v, low, high } if *v == var => (*low, *high),
            _ => (r, r),
        }
    }

    /// Returns a leaf within `delta` of `value`, creating one holding
    /// `value` exactly when none exists.
    pub fn make_leaf(&mut self, value: PrecComplex) -> Result<NodeRef> {
        if value.config() != self.cfg {
            return Err(NumericsError::MixedPrecision(self.cfg.bits(), value.config().bits()).into());
        }
        if let Some(found) = self.leaves.find(&value) {
            #[cfg(debug_assertions)]
            {
                let stored = self.value(found).expect("leaf table holds leaves");
                let prec = self.cfg.bits() + 2 * crate::numerics::GUARD_BITS;
                let delta = rug::Float::with_val(prec, self.delta);
                debug_assert!(
                    crate::numerics::modulus_of_difference(prec, stored, &value) <= delta,
                    "merged leaf {stored} is farther than {} from {value}",
                    self.delta
                );
            }
            if self.delta > 0.0 && self.value(found) != Some(&value) {
                self.stats.merges += 1;
            }
            return Ok(found);
        }
        let r = self.push(Node::Leaf(value.clone()));
        self.leaves.insert(&value, r);
        self.stats.leaves += 1;
        Ok(r)
    }

    /// Canonical internal node; collapses `low == high`.
    pub fn make_node(&mut self, var: Var, low: NodeRef, high: NodeRef) -> Result<NodeRef> {
        for child in [low, high] {
            let child_var = self.var(child);
            if child_var <= var {
                return Err(DdError::Ordering {
                    var,
                    child: child_var,
                });
            }
        }
        if low == high {
            return Ok(low);
        }
        if let Some(&r) = self.unique.get(&(var, low, high)) {
            return Ok(r);
        }
        let r = self.push(Node::Internal { var, low, high });
        self.unique.insert((var, low, high), r);
        self.stats.internal += 1;
        Ok(r)
    }

    fn push(&mut self, node: Node) -> NodeRef {
        let idx = u32::try_from(self.nodes.len()).expect("node arena exceeds u32 range");
        self.nodes.push(node);
        NodeRef(idx)
    }

    pub(crate) fn cache_get(&mut self, tag: OpTag, a: NodeRef, b: NodeRef) -> Option<NodeRef> {
        let hit = self.cache.as_ref()?.get(&(tag, a, b)).copied();
        if hit.is_some() {
            self.stats.cache_hits += 1;
        } else {
            self.stats.cache_misses += 1;
        }
        hit
    }

    pub(crate) fn cache_put(&mut self, tag: OpTag, a: NodeRef, b: NodeRef, r: NodeRef) {
        if let Some(cache) = self.cache.as_mut() {
            cache.insert((tag, a, b), r);
        }
    }

    /// Number of distinct nodes (leaves included) reachable from `root`.
    pub fn count_nodes(&self, root: NodeRef) -> usize {
        self.count_reachable(std::iter::once(root))
    }

    fn count_reachable(&self, roots: impl IntoIterator<Item = NodeRef>) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeRef> = roots.into_iter().collect();
        let mut count = 0;
        while let Some(r) = stack.pop() {
            if std::mem::replace(&mut seen[r.index()], true) {
                continue;
            }
            count += 1;
            if let Some((lo, hi)) = self.children(r) {
                stack.push(lo);
                stack.push(hi);
            }
        }
        count
    }

    /// Marks `root` as live for [`NodeStore::live_nodes`].
    pub fn register_root(&mut self, root: NodeRef) {
        *self.roots.entry(root).or_insert(0) += 1;
    }

    pub fn release_root(&mut self, root: NodeRef) {
        if let Some(c) = self.roots.get_mut(&root) {
            *c -= 1;
            if *c == 0 {
                self.roots.remove(&root);
            }
        }
    }

    /// Distinct nodes reachable from the registered roots; updates the peak.
    pub fn live_nodes(&mut self) -> usize {
        let live = self.count_reachable(self.roots.keys().copied());
        self.stats.peak_live = self.stats.peak_live.max(live);
        live
    }

    /// Largest [`NodeStore::live_nodes`] observed since creation.
    pub fn peak_nodes(&self) -> usize {
        self.stats.peak_live
    }

    /// Copies a diagram from another store, re-rounding its leaves to this
    /// store's precision (exact when this store is at least as wide).
    pub fn import(&mut self, other: &NodeStore, root: NodeRef) -> Result<NodeRef> {
        let mut memo = HashMap::new();
        self.import_rec(other, root, &mut memo)
    }

    fn import_rec(
        &mut self,
        other: &NodeStore,
        r: NodeRef,
        memo: &mut HashMap<NodeRef, NodeRef>,
    ) -> Result<NodeRef> {
        if let Some(&done) = memo.get(&r) {
            return Ok(done);
        }
        let out = match other.node(r) {
            Node::Leaf(v) => self.make_leaf(v.convert(self.cfg)?)?,
            Node::Internal { var, low, high } => {
                let (var, low, high) = (*var, *low, *high);
                let lo = self.import_rec(other, low, memo)?;
                let hi = self.import_rec(other, high, memo)?;
                self.make_node(var, lo, hi)?
            }
        };
        memo.insert(r, out);
        Ok(out)
    }

    /// Largest variable index below `root`, or `None` for a constant.
    fn max_var(&self, root: NodeRef) -> Option<Var> {
        let mut seen = HashMap::new();
        self.max_var_rec(root, &mut seen)
    }

    fn max_var_rec(&self, r: NodeRef, seen: &mut HashMap<NodeRef, Option<Var>>) -> Option<Var> {
        if let Some(&m) = seen.get(&r) {
            return m;
        }
        let m = match self.node(r) {
            Node::Leaf(_) => None,
            Node::Internal { var, low, high } => {
                let (var, low, high) = (*var, *low, *high);
                let sub = self.max_var_rec(low, seen).max(self.max_var_rec(high, seen));
                Some(sub.map_or(var, |s| s.max(var)))
            }
        };
        seen.insert(r, m);
        m
    }

    /// Wraps `root` as an `n`-bit vector after checking its variables.
    pub fn vector(&self, root: NodeRef, n: u32) -> Result<VectorDD> {
        self.check_vars(root, n)?;
        Ok(VectorDD { root, n })
    }

    /// Wraps `root` as an `n`-qubit matrix after checking its variables.
    pub fn matrix(&self, root: NodeRef, n: u32) -> Result<MatrixDD> {
        self.check_vars(root, 2 * n)?;
        Ok(MatrixDD { root, n })
    }

    fn check_vars(&self, root: NodeRef, vars: u32) -> Result<()> {
        match self.max_var(root) {
            Some(var) if var >= vars => Err(DdError::UndeclaredVariable { var, vars }),
            _ => Ok(()),
        }
    }

    /// Vector with a single 1 at `index`.
    pub fn basis_state(&mut self, n: u32, index: u64) -> Result<VectorDD> {
        let mut cur = self.make_leaf(PrecComplex::one(self.cfg))?;
        for k in (0..n).rev() {
            let bit = (index >> (n - 1 - k)) & 1 == 1;
            cur = if bit {
                self.make_node(k, self.zero, cur)?
            } else {
                self.make_node(k, cur, self.zero)?
            };
        }
        Ok(VectorDD { root: cur, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecValue;

    fn real(cfg: PrecConfig, x: f64) -> PrecComplex {
        PrecComplex::from_f64(cfg, x, 0.0).unwrap()
    }

    #[test]
    fn exact_leaves_are_canonical() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let a = s.make_leaf(real(cfg, 0.3)).unwrap();
        let b = s.make_leaf(real(cfg, 0.3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(s.value(a).unwrap(), &real(cfg, 0.3));
        let neg_zero = PrecComplex::new(PrecValue::zero(cfg).neg(), PrecValue::zero(cfg)).unwrap();
        assert_eq!(s.make_leaf(neg_zero).unwrap(), s.zero());
        // next double after 0.3 is a different leaf without merging
        let c = s.make_leaf(real(cfg, f64::from_bits(0.3f64.to_bits() + 1))).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn near_two_merges_into_two() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 1e-15).unwrap();
        let two = s.make_leaf(real(cfg, 2.0)).unwrap();
        let near = s.make_leaf(real(cfg, 2.0000000000000004)).unwrap();
        assert_eq!(two, near);
        assert_eq!(s.stats().merges, 1);
    }

    #[test]
    fn merge_contract_with_coarse_delta() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 1e-3).unwrap();
        let half = s.make_leaf(real(cfg, 0.5)).unwrap();
        assert_eq!(s.make_leaf(real(cfg, 0.4995)).unwrap(), half);
        let r = s.make_leaf(real(cfg, 0.499)).unwrap();
        let got = s.value(r).unwrap();
        assert!(got.distance(&real(cfg, 0.499)) <= 1e-3);
        // complex modulus, not per-component distance
        let c = s.make_leaf(PrecComplex::from_f64(cfg, 0.5008, 0.0008).unwrap()).unwrap();
        assert_ne!(c, half);
    }

    #[test]
    fn tiny_values_merge_with_zero() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 1e-3).unwrap();
        assert_eq!(s.make_leaf(real(cfg, -4e-4)).unwrap(), s.zero());
    }

    #[test]
    fn make_node_reduces_and_shares() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let a = s.make_leaf(real(cfg, 1.0)).unwrap();
        let b = s.make_leaf(real(cfg, 2.0)).unwrap();
        assert_eq!(s.make_node(0, a, a).unwrap(), a);
        let x = s.make_node(1, a, b).unwrap();
        assert_eq!(s.make_node(1, a, b).unwrap(), x);
        assert_ne!(s.make_node(1, b, a).unwrap(), x);
        assert_eq!(
            s.make_node(1, x, a),
            Err(DdError::Ordering { var: 1, child: 1 })
        );
        assert!(s.make_node(2, x, a).is_err());
        assert!(s.make_node(0, x, a).is_ok());
    }

    #[test]
    fn rejects_bad_delta_and_foreign_precision() {
        assert!(NodeStore::new(PrecConfig::DOUBLE, -1.0).is_err());
        assert!(NodeStore::new(PrecConfig::DOUBLE, f64::NAN).is_err());
        let mut s = NodeStore::new(PrecConfig::DOUBLE, 0.0).unwrap();
        assert!(s.make_leaf(PrecComplex::one(PrecConfig::SINGLE)).is_err());
    }

    #[test]
    fn basis_state_shape() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        for n in 1..6 {
            let e0 = s.basis_state(n, 0).unwrap();
            assert_eq!(s.count_nodes(e0.root), n as usize + 2);
        }
        let v = s.basis_state(3, 5).unwrap();
        let dense = s.to_dense(v).unwrap();
        for (i, x) in dense.iter().enumerate() {
            assert_eq!(x.is_zero(), i != 5);
        }
    }

    #[test]
    fn live_and_peak_tracking() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let big = s.basis_state(6, 3).unwrap();
        s.register_root(big.root);
        assert_eq!(s.live_nodes(), 8);
        s.release_root(big.root);
        let one = s.make_leaf(real(cfg, 1.0)).unwrap();
        s.register_root(one);
        assert_eq!(s.live_nodes(), 1);
        assert_eq!(s.peak_nodes(), 8);
    }

    #[test]
    fn vector_wrapper_checks_variables() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let v = s.basis_state(4, 1).unwrap();
        assert!(s.vector(v.root, 4).is_ok());
        assert_eq!(
            s.vector(v.root, 3),
            Err(DdError::UndeclaredVariable { var: 3, vars: 3 })
        );
        assert!(s.matrix(v.root, 2).is_ok());
    }
}
