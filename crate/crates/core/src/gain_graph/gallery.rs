//! Named example gain graphs, parameterised by the group order.

use super::{GainGraph, VertexKind};
use crate::cyclic::CyclicGroup;
use crate::{Error, Result};

pub const NAMES: &[&str] = &[
    "figure1",
    "figure2a",
    "figure4a",
    "figure4b",
    "counterexample-loop",
    "counterexample-fixed",
    "double-loop",
    "quadruple-edge",
    "delta-gadget",
    "looped-triangle",
    "five-vertex",
    "fixed-vertex",
    "single-loop",
    "spoke",
    "balanced-triangle",
];

struct Builder {
    g: GainGraph,
}

impl Builder {
    fn new(k: u32) -> Result<Self> {
        Ok(Builder {
            g: GainGraph::new(CyclicGroup::new(k)?),
        })
    }

    fn free(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.g.add_vertex(n, VertexKind::Free)?;
        }
        Ok(self)
    }

    fn fixed(mut self, name: &str) -> Result<Self> {
        self.g.add_vertex(name, VertexKind::Fixed)?;
        Ok(self)
    }

    fn edges(mut self, list: &[(&str, &str, u32)]) -> Result<GainGraph> {
        for &(a, b, gain) in list {
            self.g.add_edge_by_name(a, b, gain % self.g.k())?;
        }
        Ok(self.g)
    }
}

fn need(cond: bool, name: &str, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::input(format!("gallery graph {name} needs {what}")))
    }
}

/// Builds the named graph for `Z_k`; `"gallery:<name>"` inputs resolve here.
pub fn gallery(name: &str, k: u32) -> Result<GainGraph> {
    let b = Builder::new(k)?;
    match name {
        // Free vertices u, v with a fixed centre; u carries a loop and a 2-cycle to v.
        "figure1" => b.fixed("v0")?.free(&["u", "v"])?.edges(&[
            ("v0", "u", 0),
            ("u", "v", 0),
            ("u", "u", 1),
            ("v", "u", 1),
        ]),
        // Proper near-balanced with base t.
        "figure2a" => {
            need(k >= 3, name, "k >= 3")?;
            b.free(&["t", "b", "l", "r"])?.edges(&[
                ("t", "t", 1),
                ("t", "b", 0),
                ("b", "l", 0),
                ("b", "r", 0),
                ("r", "t", 0),
                ("t", "r", 1),
                ("l", "t", 0),
                ("t", "l", 1),
            ])
        }
        "figure4a" => {
            need(k.is_multiple_of(2) && k >= 4, name, "even k >= 4")?;
            b.fixed("v0")?.free(&["u", "v"])?.edges(&[
                ("v", "u", 0),
                ("v", "u", k / 2),
                ("v", "v0", 0),
                ("u", "v0", 0),
            ])
        }
        "figure4b" => {
            need(k.is_multiple_of(2) && k >= 4, name, "even k >= 4")?;
            b.fixed("v0")?.free(&["u", "v", "w"])?.edges(&[
                ("v", "u", 0),
                ("v", "u", k / 2),
                ("v", "v0", 0),
                ("w", "v0", 0),
                ("u", "w", 0),
                ("u", "w", 2),
            ])
        }
        "counterexample-loop" => {
            need(k >= 5, name, "k >= 5")?;
            b.free(&["u"])?.edges(&[("u", "u", 1), ("u", "u", 3)])
        }
        "counterexample-fixed" => {
            need(k >= 5, name, "k >= 5")?;
            b.fixed("v0")?.free(&["u", "v"])?.edges(&[
                ("u", "u", 1),
                ("u", "u", 3),
                ("v", "v", 2),
                ("u", "v", 0),
                ("v", "v0", 0),
            ])
        }
        "double-loop" => {
            need(k >= 4, name, "k >= 4")?;
            b.free(&["u"])?.edges(&[("u", "u", 1), ("u", "u", 2)])
        }
        "quadruple-edge" => {
            need(k >= 4, name, "k >= 4")?;
            b.free(&["u", "w"])?.edges(&[
                ("u", "w", 0),
                ("u", "w", 1),
                ("u", "w", 2),
                ("u", "w", 3),
            ])
        }
        "delta-gadget" => b.free(&["u", "w"])?.edges(&[
            ("u", "u", 1),
            ("w", "w", 1),
            ("u", "w", 1),
            ("u", "w", 0),
        ]),
        "looped-triangle" => b.free(&["a", "b", "c"])?.edges(&[
            ("a", "b", 0),
            ("b", "c", 0),
            ("c", "a", 0),
            ("a", "a", 1),
            ("b", "b", 1),
            ("c", "c", 1),
        ]),
        "five-vertex" => b.free(&["a", "b", "c", "d", "e"])?.edges(&[
            ("a", "b", 0),
            ("c", "a", 0),
            ("c", "b", 0),
            ("a", "d", 0),
            ("b", "e", 0),
            ("a", "e", 0),
            ("b", "d", 0),
            ("c", "c", 1),
            ("d", "d", 1),
            ("e", "e", 1),
        ]),
        "fixed-vertex" => b.fixed("v0")?.edges(&[]),
        "single-loop" => b.free(&["u"])?.edges(&[("u", "u", 1)]),
        "spoke" => b.fixed("v0")?.free(&["u"])?.edges(&[("u", "v0", 0)]),
        "balanced-triangle" => {
            b.free(&["a", "b", "c"])?
                .edges(&[("a", "b", 0), ("b", "c", 0), ("c", "a", 0)])
        }
        other => Err(Error::input(format!(
            "unknown gallery graph {other:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}
