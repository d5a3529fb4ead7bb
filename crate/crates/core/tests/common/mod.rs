//! Dense oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use mtbdd_core::analysis::max_distance;
use mtbdd_core::mtbdd::NodeStore;
use mtbdd_core::numerics::{Angle, PrecComplex, PrecConfig};
use mtbdd_core::quantum::{base_matrix, Circuit, Gate, GateKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

pub fn cfg(bits: u32) -> PrecConfig {
    PrecConfig::new(bits).unwrap()
}

pub fn real(cfg: PrecConfig, x: f64) -> PrecComplex {
    PrecComplex::from_f64(cfg, x, 0.0).unwrap()
}

/// Sum of `xs` by halving, the same tree the block recursion builds.
pub fn tree_sum(xs: &[PrecComplex]) -> PrecComplex {
    if xs.len() == 1 {
        return xs[0].clone();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    tree_sum(lo).add(&tree_sum(hi)).unwrap()
}

/// Row-major `M v`, each entry the balanced tree sum of rounded products.
pub fn dense_multiply(m: &[PrecComplex], v: &[PrecComplex]) -> Vec<PrecComplex> {
    let dim = v.len();
    (0..dim)
        .map(|i| {
            let products: Vec<PrecComplex> =
                (0..dim).map(|j| m[i * dim + j].mul(&v[j]).unwrap()).collect();
            tree_sum(&products)
        })
        .collect()
}

/// Dense `2^n x 2^n` embedding of `g`, qubit 0 being the most significant
/// index bit.
pub fn dense_gate(g: &Gate, n: u32, cfg: PrecConfig) -> Vec<PrecComplex> {
    let base = base_matrix(&g.kind, cfg).unwrap();
    let k = g.qubits.len();
    let local = 1usize << k;
    let dim = 1usize << n;
    let bit = |idx: usize, q: u32| (idx >> (n - 1 - q)) & 1;
    let mut out = vec![PrecComplex::zero(cfg); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let untouched_equal = (0..n)
                .filter(|q| !g.qubits.contains(q))
                .all(|q| bit(r, q) == bit(c, q));
            if !untouched_equal {
                continue;
            }
            let sub = |idx: usize| {
                g.qubits
                    .iter()
                    .fold(0usize, |acc, &q| (acc << 1) | bit(idx, q))
            };
            out[r * dim + c] = base[sub(r) * local + sub(c)].clone();
        }
    }
    out
}

pub fn basis(cfg: PrecConfig, n: u32, index: usize) -> Vec<PrecComplex> {
    let mut v = vec![PrecComplex::zero(cfg); 1 << n];
    v[index] = PrecComplex::one(cfg);
    v
}

/// Gate-by-gate dense simulation with the same arithmetic as the diagrams.
pub fn dense_simulate(c: &Circuit, cfg: PrecConfig) -> Vec<PrecComplex> {
    let mut state = basis(cfg, c.n(), 0);
    for g in c.gates() {
        state = dense_multiply(&dense_gate(g, c.n(), cfg), &state);
    }
    state
}

pub fn norm(v: &[PrecComplex]) -> Float {
    let mut acc = Float::with_val(512, 0);
    for x in v {
        acc += x.norm_sqr();
    }
    acc.sqrt()
}

/// Random entry in the unit square. Three in ten are exact zeros and two in
/// ten come from a small pool, so the diagrams share structure.
pub fn random_entry<R: Rng>(rng: &mut R, cfg: PrecConfig, complex: bool) -> PrecComplex {
    const POOL: [f64; 4] = [0.5, -0.25, 1.0, 0.75];
    match rng.gen_range(0..10) {
        0..=2 => PrecComplex::zero(cfg),
        3..=4 => real(cfg, POOL[rng.gen_range(0..POOL.len())]),
        _ => {
            let re = rng.gen_range(-1.0..1.0);
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            PrecComplex::from_f64(cfg, re, im).unwrap()
        }
    }
}

pub fn random_dense<R: Rng>(rng: &mut R, cfg: PrecConfig, len: usize) -> Vec<PrecComplex> {
    (0..len).map(|_| random_entry(rng, cfg, true)).collect()
}

/// Random state of unit norm, rounded entrywise to `cfg`.
pub fn random_unit_state<R: Rng>(rng: &mut R, cfg: PrecConfig, n: u32) -> Vec<PrecComplex> {
    let dim = 1usize << n;
    let raw: Vec<(f64, f64)> = (0..dim)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    raw.iter()
        .map(|(a, b)| PrecComplex::from_f64(cfg, a / norm, b / norm).unwrap())
        .collect()
}

pub fn random_angle<R: Rng>(rng: &mut R) -> Angle {
    match rng.gen_range(0..3) {
        0 => Angle::pi_over(1 << rng.gen_range(0..12)),
        1 => Angle::minus_pi_over(1 << rng.gen_range(0..12)),
        _ => Angle::decimal(&format!("{:.17}", rng.gen_range(-6.3..6.3))).unwrap(),
    }
}

/// Distinct qubits in `0..n`.
pub fn random_qubits<R: Rng>(rng: &mut R, n: u32, k: usize) -> Vec<u32> {
    let mut qs: Vec<u32> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..qs.len());
        qs.swap(i, j);
    }
    qs.truncate(k);
    qs
}

/// Random gate of any kind that fits `n` qubits.
pub fn random_gate<R: Rng>(rng: &mut R, n: u32) -> Gate {
    loop {
        let kind = match rng.gen_range(0..9) {
            0 => GateKind::H,
            1 => GateKind::X,
            2 => GateKind::Z,
            3 => GateKind::CX,
            4 => GateKind::CCX,
            5 => GateKind::RY(random_angle(rng)),
            6 => GateKind::RZ(random_angle(rng)),
            7 => GateKind::P(random_angle(rng)),
            _ => GateKind::CP(random_angle(rng)),
        };
        if kind.arity() as u32 <= n {
            let qubits = random_qubits(rng, n, kind.arity());
            return Gate::new(kind, qubits).unwrap();
        }
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: u32, len: usize) -> Circuit {
    let gates = (0..len).map(|_| random_gate(rng, n)).collect();
    Circuit::from_gates(n, gates).unwrap()
}

/// Every row is a probability distribution, so `C <= 1` on distribution
/// vectors.
pub fn random_stochastic<R: Rng>(rng: &mut R, cfg: PrecConfig, n: u32) -> Vec<PrecComplex> {
    let dim = 1usize << n;
    let mut out = Vec::with_capacity(dim * dim);
    for _ in 0..dim {
        out.extend(random_distribution(rng, cfg, dim));
    }
    out
}

/// Nonnegative entries summing to slightly less than one.
pub fn random_distribution<R: Rng>(rng: &mut R, cfg: PrecConfig, len: usize) -> Vec<PrecComplex> {
    let raw: Vec<f64> = (0..len)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    let total: f64 = raw.iter().sum::<f64>().max(1e-300) * (1.0 + 1e-12);
    raw.iter().map(|x| real(cfg, x / total)).collect()
}

/// Largest error of one gate application on a random unit state against the
/// same inputs multiplied at 128 bits without merging.
pub fn single_gate_error(seed: u64, n: u32, bits: u32, delta: f64) -> f64 {
    let cfg = PrecConfig::new(bits).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state = random_unit_state(&mut rng, cfg, n);
    let gate = random_gate(&mut rng, n);
    let mut s = NodeStore::new(cfg, delta).unwrap();
    let v = s.from_dense(&state, n).unwrap();
    let m = gate.matrix(&mut s, n).unwrap();
    let y = s.multiply(m, v).unwrap();

    let mut exact = NodeStore::new(PrecConfig::REFERENCE, 0.0).unwrap();
    let mr = exact.import(&s, m.root).unwrap();
    let vr = exact.import(&s, v.root).unwrap();
    let want = exact
        .multiply(exact.matrix(mr, n).unwrap(), exact.vector(vr, n).unwrap())
        .unwrap();
    max_distance(&s, y, &exact, want).unwrap().0
}
