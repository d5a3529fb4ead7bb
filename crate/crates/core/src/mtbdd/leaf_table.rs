//! Leaf lookup with an absolute merge threshold.
//!
//! With `delta == 0` leaves are keyed by their exact value. Otherwise leaves
//! are bucketed on a square grid of cell width `max(delta, 2^(-b-2))` over
//! the complex plane; a lookup probes the 3x3 block of cells around the
//! query in row-major order and returns the first leaf (in insertion order
//! within a cell) whose modulus distance is at most `delta`.

use std::collections::HashMap;

use rug::{Float, Integer};

use crate::numerics::{modulus_of_difference, PrecComplex, PrecConfig, PrecValue, GUARD_BITS};

use super::NodeRef;

type ExactKey = (Option<(Integer, i32)>, Option<(Integer, i32)>);

pub(crate) enum LeafTable {
    Exact(HashMap<ExactKey, NodeRef>),
    Grid(Grid),
}

pub(crate) struct Grid {
    prec: u32,
    width: Float,
    delta: Float,
    cells: HashMap<(Integer, Integer), Vec<(NodeRef, PrecComplex)>>,
}

fn exact_key(value: &PrecComplex) -> ExactKey {
    (value.re.exact_key(), value.im.exact_key())
}

impl LeafTable {
    pub(crate) fn new(cfg: PrecConfig, delta: f64) -> Self {
        if delta == 0.0 {
            return LeafTable::Exact(HashMap::new());
        }
        let prec = cfg.bits() + 2 * GUARD_BITS;
        let delta = Float::with_val(prec, delta);
        let min_width = Float::with_val(prec, 1) >> (cfg.bits() + 2);
        let width = if delta > min_width { delta.clone() } else { min_width };
        LeafTable::Grid(Grid {
            prec,
            width,
            delta,
            cells: HashMap::new(),
        })
    }

    pub(crate) fn find(&self, value: &PrecComplex) -> Option<NodeRef> {
        match self {
            LeafTable::Exact(map) => map.get(&exact_key(value)).copied(),
            LeafTable::Grid(grid) => grid.find(value),
        }
    }

    pub(crate) fn insert(&mut self, value: &PrecComplex, node: NodeRef) {
        match self {
            LeafTable::Exact(map) => {
                map.entry(exact_key(value)).or_insert(node);
            }
            LeafTable::Grid(grid) => {
                let cell = grid.cell(value);
                grid.cells
                    .entry(cell)
                    .or_default()
                    .push((node, value.clone()));
            }
        }
    }
}

impl Grid {
    fn coord(&self, x: &PrecValue) -> Integer {
        let q = Float::with_val(self.prec, x.as_float() / &self.width);
        q.floor()
            .to_integer()
            .expect("finite leaf values have finite grid coordinates")
    }

    fn cell(&self, value: &PrecComplex) -> (Integer, Integer) {
        (self.coord(&value.re), self.coord(&value.im))
    }

    fn find(&self, value: &PrecComplex) -> Option<NodeRef> {
        let (cr, ci) = self.cell(value);
        for dr in -1i32..=1 {
            for di in -1i32..=1 {
                let key = (Integer::from(&cr + dr), Integer::from(&ci + di));
                let Some(bucket) = self.cells.get(&key) else {
                    continue;
                };
                for (node, leaf) in bucket {
                    if modulus_of_difference(self.prec, leaf, value) <= self.delta {
                        return Some(*node);
                    }
                }
            }
        }
        None
    }
}
