use std::collections::HashSet;
use std::fmt::Write;

use super::{NodeRef, NodeStore};

impl NodeStore {
    /// Graphviz rendering: internal nodes are labelled `x<var>`, leaves with
    /// their full-precision value; dashed edges are low (0), solid edges high.
    pub fn to_dot(&self, root: NodeRef) -> String {
        let mut out = String::from("digraph mtbdd {\n");
        let mut seen = HashSet::new();
        let mut stack = vec![root];
        let mut order = Vec::new();
        while let Some(r) = stack.pop() {
            if !seen.insert(r) {
                continue;
            }
            order.push(r);
            if let Some((lo, hi)) = self.children(r) {
                stack.push(hi);
                stack.push(lo);
            }
        }
        for r in &order {
            let id = r.index();
            match self.value(*r) {
                Some(v) => {
                    let _ = writeln!(out, "  n{id} [shape=box, label=\"{v}\"];");
                }
                None => {
                    let _ = writeln!(out, "  n{id} [shape=circle, label=\"x{}\"];", self.var(*r));
                }
            }
        }
        for r in &order {
            if let Some((lo, hi)) = self.children(*r) {
                let id = r.index();
                let _ = writeln!(out, "  n{id} -> n{} [style=dashed];", lo.index());
                let _ = writeln!(out, "  n{id} -> n{} [style=solid];", hi.index());
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::mtbdd::NodeStore;
    use crate::numerics::{PrecComplex, PrecConfig};

    #[test]
    fn dot_lists_every_node_and_edge() {
        let cfg = PrecConfig::DOUBLE;
        let mut s = NodeStore::new(cfg, 0.0).unwrap();
        let vals: Vec<_> = [0.5, -1.0, 2.0000000000000004, 0.5]
            .iter()
            .map(|&x| PrecComplex::from_f64(cfg, x, 0.0).unwrap())
            .collect();
        let v = s.from_dense(&vals, 2).unwrap();
        let dot = s.to_dot(v.root);
        assert_eq!(dot.matches("shape=box").count(), 3);
        assert_eq!(dot.matches("shape=circle").count(), 3);
        assert_eq!(dot.matches("style=dashed").count(), 3);
        assert!(dot.contains("label=\"2.0000000000000004\""));
        assert!(dot.contains("label=\"x0\""));
    }
}
