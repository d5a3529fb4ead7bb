//! First-order forward error bounds for one matrix-vector multiplication
//! and the parameter choices they imply.

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};

/// Evaluated bound `(n+1) eps C + delta 2^(n+1)` for one multiplication.
///
/// The asymptotic terms `O(eps^2)` and `O(delta eps 2^n)` are reported as
/// the magnitudes `eps^2` and `delta eps 2^n` but are not part of `total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    pub eps: f64,
    pub delta: f64,
    /// `max_i sum_j |M_ij V_j|`, or an upper bound for it.
    pub c: f64,
    pub term_fp: f64,
    pub term_merge: f64,
    pub total: f64,
    pub order_eps2: f64,
    pub order_delta_eps: f64,
}

impl BoundReport {
    fn new(n: u32, eps: f64, delta: f64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(AnalysisError::InvalidArgument("n must be at least 1".into()));
        }
        for (name, v) in [("eps", eps), ("delta", delta), ("C", c)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(AnalysisError::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        let pow = 2f64.powi(n as i32);
        let term_fp = (n as f64 + 1.0) * eps * c;
        let term_merge = delta * 2.0 * pow;
        Ok(BoundReport {
            n,
            eps,
            delta,
            c,
            term_fp,
            term_merge,
            total: term_fp + term_merge,
            order_eps2: eps * eps,
            order_delta_eps: delta * eps * pow,
        })
    }

    /// Threshold keeping this bound at `allowed_error` for the same `n` and
    /// `eps`.
    pub fn suggested_delta(&self, allowed_error: f64) -> Result<f64> {
        suggest_delta(self.n, self.eps, allowed_error)
    }

    /// Significand width resolving `delta`, or `None` without merging.
    pub fn suggested_bits(&self) -> Option<i64> {
        suggest_bits(self.delta).ok()
    }
}

/// General matrices and vectors, with `C <= 2^n c_m c_v`.
pub fn bound_general(n: u32, eps: f64, delta: f64, c_m: f64, c_v: f64) -> Result<BoundReport> {
    let c = 2f64.powi(n as i32) * c_m * c_v;
    BoundReport::new(n, eps, delta, c)
}

/// Unitary (or stochastic) matrices on unit vectors, where `C <= 1`.
pub fn bound_unit(n: u32, eps: f64, delta: f64) -> Result<BoundReport> {
    BoundReport::new(n, eps, delta, 1.0)
}

/// `(allowed_error - (n+1) eps) / 2^(n+1)`, nudged down by ulps if needed
/// so that `bound_unit(n, eps, result).total <= allowed_error` holds in
/// floating point too.
pub fn suggest_delta(n: u32, eps: f64, allowed_error: f64) -> Result<f64> {
    let fp = (n as f64 + 1.0) * eps;
    if allowed_error.is_nan() || allowed_error < fp {
        return Err(AnalysisError::InvalidArgument(format!(
            "allowed error {allowed_error:e} is below the rounding term (n+1)eps = {fp:e}"
        )));
    }
    let scale = 2f64.powi(n as i32 + 1);
    let mut delta = (allowed_error - fp) / scale;
    while delta > 0.0 && fp + delta * scale > allowed_error {
        delta = f64::from_bits(delta.to_bits() - 1);
    }
    Ok(delta)
}

/// Smallest integer `b` with `b > log2(1/delta)`.
pub fn suggest_bits(delta: f64) -> Result<i64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(AnalysisError::InvalidArgument(format!(
            "delta must be positive and finite, got {delta}"
        )));
    }
    // delta = m 2^e with 1 <= m < 2
    let (bits, shift) = if delta < f64::MIN_POSITIVE {
        ((delta * 2f64.powi(64)).to_bits(), 64)
    } else {
        (delta.to_bits(), 0)
    };
    let e = ((bits >> 52) & 0x7ff) as i64 - 1023 - shift;
    let exact_power = bits & ((1u64 << 52) - 1) == 0;
    // log2(1/delta) = -e - log2(m), which lies in (-e-1, -e] with equality
    // only for m = 1
    Ok(if exact_power { -e + 1 } else { -e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_term_vanishes_without_merging() {
        let r = bound_unit(17, 1.11e-16, 0.0).unwrap();
        assert_eq!(r.term_merge, 0.0);
        assert_eq!(r.total, r.term_fp);
        assert_eq!(r.suggested_bits(), None);
    }

    #[test]
    fn general_bound_scales_with_entries() {
        let r = bound_general(3, 1e-16, 0.0, 0.5, 2.0).unwrap();
        assert_eq!(r.c, 8.0);
        assert!((r.term_fp - 4.0 * 1e-16 * 8.0).abs() < 1e-30);
    }

    #[test]
    fn suggest_delta_edges() {
        let eps = 1.11e-16;
        let fp = 11.0 * eps;
        assert_eq!(suggest_delta(10, eps, fp).unwrap(), 0.0);
        assert!(suggest_delta(10, eps, fp / 2.0).is_err());
        assert!(suggest_delta(10, eps, f64::NAN).is_err());
    }

    #[test]
    fn bits_for_threshold() {
        assert_eq!(suggest_bits(2f64.powi(-10)).unwrap(), 11);
        assert_eq!(suggest_bits(1e-15).unwrap(), 50);
        assert_eq!(suggest_bits(0.5).unwrap(), 2);
        assert_eq!(suggest_bits(0.3).unwrap(), 2);
        assert_eq!(suggest_bits(1.0).unwrap(), 1);
        assert_eq!(suggest_bits(2f64.powi(-1070)).unwrap(), 1071);
        assert!(suggest_bits(0.0).is_err());
        assert!(suggest_bits(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(bound_unit(0, 1e-16, 0.0).is_err());
        assert!(bound_unit(4, -1e-16, 0.0).is_err());
        assert!(bound_unit(4, 1e-16, f64::INFINITY).is_err());
    }
}
