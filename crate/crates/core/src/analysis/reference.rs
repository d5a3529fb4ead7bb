//! Error measurement against a 128-bit, merge-free replay.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::mtbdd::{self, DdError, NodeRef, NodeStore, VectorDD};
use crate::numerics::PrecConfig;
use crate::quantum::{simulate, simulate_with, Circuit};

use super::bounds::bound_unit;
use super::Result;

/// Dense comparison is used up to this many qubits, diagram traversal above.
pub const DENSE_COMPARE_MAX_QUBITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `max_j |y_ref_j - y_j|`.
    pub max_error: f64,
    /// Smallest index attaining `max_error`.
    pub worst_index: u64,
    pub final_nodes: usize,
    pub peak_nodes: usize,
    pub wall_ms: f64,
}

/// A finished ground-truth simulation, reusable across comparisons.
pub struct Reference {
    store: NodeStore,
    state: VectorDD,
}

impl Reference {
    pub fn simulate(circuit: &Circuit) -> Result<Self> {
        let mut store = NodeStore::new(PrecConfig::REFERENCE, 0.0)?;
        let state = simulate(&mut store, circuit)?;
        Ok(Reference { store, state })
    }

    pub fn store(&self) -> &NodeStore {
        &self.store
    }

    pub fn state(&self) -> VectorDD {
        self.state
    }
}

/// Largest entrywise distance between two same-size vectors held in
/// different stores, with the smallest index attaining it.
pub fn max_distance(a: &NodeStore, va: VectorDD, b: &NodeStore, vb: VectorDD) -> mtbdd::Result<(f64, u64)> {
    if va.n <= DENSE_COMPARE_MAX_QUBITS {
        max_distance_dense(a, va, b, vb)
    } else {
        max_distance_traversal(a, va, b, vb)
    }
}

pub fn max_distance_dense(
    a: &NodeStore,
    va: VectorDD,
    b: &NodeStore,
    vb: VectorDD,
) -> mtbdd::Result<(f64, u64)> {
    let da = a.to_dense(va)?;
    let db = b.to_dense(vb)?;
    let mut best = (0.0f64, 0u64);
    for (i, (x, y)) in da.iter().zip(&db).enumerate() {
        let d = x.distance(y).to_f64();
        if d > best.0 {
            best = (d, i as u64);
        }
    }
    Ok(best)
}

/// Walks both diagrams in lockstep, memoized on node pairs per level, so the
/// cost follows the product of the diagram sizes instead of `2^n`.
pub fn max_distance_traversal(
    a: &NodeStore,
    va: VectorDD,
    b: &NodeStore,
    vb: VectorDD,
) -> mtbdd::Result<(f64, u64)> {
    struct Walk<'s> {
        a: &'s NodeStore,
        b: &'s NodeStore,
        n: u32,
        memo: HashMap<(NodeRef, NodeRef, u32), (f64, u64)>,
    }
    impl Walk<'_> {
        fn go(&mut self, x: NodeRef, y: NodeRef, level: u32) -> (f64, u64) {
            if let (Some(p), Some(q)) = (self.a.value(x), self.b.value(y)) {
                return (p.distance(q).to_f64(), 0);
            }
            if let Some(&hit) = self.memo.get(&(x, y, level)) {
                return hit;
            }
            let (x0, x1) = self.a.cofactors(x, level);
            let (y0, y1) = self.b.cofactors(y, level);
            let lo = self.go(x0, y0, level + 1);
            let hi = self.go(x1, y1, level + 1);
            let out = if hi.0 > lo.0 {
                (hi.0, hi.1 + (1u64 << (self.n - level - 1)))
            } else {
                lo
            };
            self.memo.insert((x, y, level), out);
            out
        }
    }
    if va.n != vb.n {
        return Err(DdError::VariableMismatch {
            left: va.n,
            right: vb.n,
        });
    }
    let mut w = Walk {
        a,
        b,
        n: va.n,
        memo: HashMap::new(),
    };
    Ok(w.go(va.root, vb.root, 0))
}

/// Simulates `circuit` at `(delta, bits)` and measures it against `reference`.
pub fn compare_with(reference: &Reference, circuit: &Circuit, delta: f64, bits: u32) -> Result<ErrorReport> {
    let start = Instant::now();
    let cfg = PrecConfig::new(bits)?;
    let mut store = NodeStore::new(cfg, delta)?;
    let state = simulate(&mut store, circuit)?;
    let (max_error, worst_index) = max_distance(&store, state, reference.store(), reference.state())?;
    Ok(ErrorReport {
        max_error,
        worst_index,
        final_nodes: store.count_nodes(state.root),
        peak_nodes: store.peak_nodes(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the circuit at `(delta, bits)` and at `(0, 128)` in fresh stores.
pub fn compare_to_reference(circuit: &Circuit, delta: f64, bits: u32) -> Result<ErrorReport> {
    let start = Instant::now();
    let reference = Reference::simulate(circuit)?;
    let mut report = compare_with(&reference, circuit, delta, bits)?;
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Outcome of checking every multiplication of a run against its own bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerGateReport {
    pub gates: usize,
    /// Largest single-multiplication error seen.
    pub max_error: f64,
    /// `bound_unit(n, 2^-b, delta).total + 2^(-b+4)`.
    pub allowed: f64,
    pub violations: usize,
    /// Error of the final state against a full reference run; this
    /// accumulates across gates and is reported, not checked.
    pub accumulated_error: f64,
}

/// Replays each multiplication of a `(delta, bits)` run exactly on its own
/// inputs at 128 bits without merging, and compares.
pub fn per_gate_check(circuit: &Circuit, delta: f64, bits: u32) -> Result<PerGateReport> {
    let cfg = PrecConfig::new(bits)?;
    let n = circuit.n();
    let allowed = bound_unit(n, cfg.unit_roundoff(), delta)?.total + 2f64.powi(4 - bits as i32);
    let mut exact = NodeStore::new(PrecConfig::REFERENCE, 0.0)?;
    let mut store = NodeStore::new(cfg, delta)?;
    let mut max_error = 0.0f64;
    let mut violations = 0;
    let state = simulate_with(&mut store, circuit, |store, step| {
        let m = exact.import(store, step.matrix.root)?;
        let v = exact.import(store, step.before.root)?;
        let want = exact.multiply(exact.matrix(m, n)?, exact.vector(v, n)?)?;
        let (err, _) = max_distance(store, step.after, &exact, want)?;
        max_error = max_error.max(err);
        if err > allowed {
            violations += 1;
        }
        Ok(())
    })?;
    let reference = Reference::simulate(circuit)?;
    let (accumulated_error, _) = max_distance(&store, state, reference.store(), reference.state())?;
    Ok(PerGateReport {
        gates: circuit.gates().len(),
        max_error,
        allowed,
        violations,
        accumulated_error,
    })
}
