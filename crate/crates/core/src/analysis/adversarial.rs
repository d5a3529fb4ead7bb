//! The instance on which merge errors add up to `delta' 2^n`.
//!
//! `H^{(x)n}` is multiplied with the uniform superposition. Every product
//! `h * h` is the same rounded value `p`. A leaf `p + 0.9 delta` is planted
//! before the multiplication, so each product merges into it and the first
//! output entry collects `2^n` copies of the offset.

use std::time::Instant;

use rug::Float;

use crate::mtbdd::{MatrixDD, NodeRef, NodeStore, VectorDD};
use crate::numerics::{PrecComplex, PrecConfig, PrecValue, GUARD_BITS};

use super::{AnalysisError, ErrorReport, Result};

/// Largest supported register for the adversarial run.
pub const ADVERSARIAL_MAX_QUBITS: u32 = 24;

/// Fraction of `delta` used for the planted offset.
pub const SEED_OFFSET: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialReport {
    /// `|y_0 - 1|` plus node counts of the output.
    pub report: ErrorReport,
    /// Actual distance between the planted leaf and the rounded product.
    pub delta_prime: f64,
    /// `delta_prime * 2^n`.
    pub predicted: f64,
}

/// `(1/sqrt 2)^n` rounded once to `cfg`.
fn scaled_hadamard_entry(cfg: PrecConfig, n: u32) -> Result<PrecValue> {
    let prec = cfg.bits() + GUARD_BITS;
    let half_pow = Float::with_val(prec, 1) >> n;
    Ok(PrecValue::round_to(cfg, &half_pow.sqrt())?)
}

/// `H^{(x)n}` with entries `±h`; two nodes per qubit level carry the sign.
fn hadamard_power(store: &mut NodeStore, n: u32, h: &PrecValue) -> Result<MatrixDD> {
    let mut plus = store.make_leaf(PrecComplex::real(h.clone()))?;
    let mut minus = store.make_leaf(PrecComplex::real(h.neg()))?;
    for q in (0..n).rev() {
        let (r, c) = (2 * q, 2 * q + 1);
        let build = |s: &mut NodeStore, same: NodeRef, flip: NodeRef| -> Result<NodeRef> {
            let hi = s.make_node(c, same, flip)?;
            Ok(s.make_node(r, same, hi)?)
        };
        let p = build(store, plus, minus)?;
        let m = build(store, minus, plus)?;
        plus = p;
        minus = m;
    }
    Ok(MatrixDD { root: plus, n })
}

pub fn adversarial_run(n: u32, delta: f64, bits: u32) -> Result<AdversarialReport> {
    if n == 0 || n > ADVERSARIAL_MAX_QUBITS {
        return Err(AnalysisError::InvalidArgument(format!(
            "adversarial run needs 1 <= n <= {ADVERSARIAL_MAX_QUBITS}, got {n}"
        )));
    }
    let start = Instant::now();
    let cfg = PrecConfig::new(bits)?;
    let mut store = NodeStore::new(cfg, delta)?;
    let h = scaled_hadamard_entry(cfg, n)?;
    let m = hadamard_power(&mut store, n, &h)?;
    let hv = PrecComplex::real(h.clone());
    let x = VectorDD {
        root: store.make_leaf(hv.clone())?,
        n,
    };

    let product = hv.mul(&hv)?;
    let wide = cfg.bits() + 2 * GUARD_BITS;
    let shifted = Float::with_val(wide, product.re.as_float() + SEED_OFFSET * delta);
    let seed_value = PrecComplex::real(PrecValue::round_to(cfg, &shifted)?);
    let seed = store.make_leaf(seed_value.clone())?;
    let captured = store.make_leaf(product.clone())?;
    if captured != seed || store.value(seed) != Some(&seed_value) {
        return Err(AnalysisError::SeedNotCaptured {
            n,
            delta,
            bits,
        });
    }
    let delta_prime = seed_value.distance(&product).to_f64();

    let y = store.multiply(m, x)?;
    store.register_root(y.root);
    let y0 = store.eval_vector(y, 0)?;
    let max_error = y0.distance(&PrecComplex::one(cfg)).to_f64();
    let final_nodes = store.count_nodes(y.root);
    let peak_nodes = store.live_nodes();
    Ok(AdversarialReport {
        report: ErrorReport {
            max_error,
            worst_index: 0,
            final_nodes,
            peak_nodes,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        delta_prime,
        predicted: delta_prime * 2f64.powi(n as i32),
    })
}
