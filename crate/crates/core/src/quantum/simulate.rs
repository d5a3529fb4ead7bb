//! Gate-by-gate state evolution.

use crate::mtbdd::{MatrixDD, NodeStore, VectorDD};

use super::{Circuit, Gate, Result};

/// One completed gate application, handed to the observer of
/// [`simulate_with`].
pub struct SimulationStep<'a> {
    pub index: usize,
    pub gate: &'a Gate,
    pub matrix: MatrixDD,
    pub before: VectorDD,
    pub after: VectorDD,
}

/// Applies the gates of `c` in order to `|0...0>`. The store's peak node
/// count afterwards is the largest state size seen along the way.
pub fn simulate(store: &mut NodeStore, c: &Circuit) -> Result<VectorDD> {
    simulate_with(store, c, |_, _| Ok(()))
}

pub fn simulate_with<F>(store: &mut NodeStore, c: &Circuit, mut observe: F) -> Result<VectorDD>
where
    F: FnMut(&mut NodeStore, SimulationStep<'_>) -> Result<()>,
{
    let mut state = store.basis_state(c.n(), 0)?;
    store.register_root(state.root);
    store.live_nodes();
    for (index, gate) in c.gates().iter().enumerate() {
        let matrix = gate.matrix(store, c.n())?;
        let next = store.multiply(matrix, state)?;
        store.register_root(next.root);
        store.release_root(state.root);
        store.live_nodes();
        observe(
            store,
            SimulationStep {
                index,
                gate,
                matrix,
                before: state,
                after: next,
            },
        )?;
        state = next;
    }
    store.release_root(state.root);
    Ok(state)
}
