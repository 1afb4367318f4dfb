//! Directed `Z_k`-gain multigraphs with at most one fixed vertex.
//!
//! An edge `(u, w, a)` and its reversal `(w, u, -a)` denote the same object;
//! a loop with gain `a` is the same as one with gain `-a`.

mod format;
pub mod gallery;

pub use format::{parse, serialize};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

use crate::cyclic::{CyclicGroup, Gain};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Free,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    pub kind: VertexKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

/// Endpoints are indices into [`GainGraph::vertices`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainEdge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
    pub gain: Gain,
}

impl GainEdge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn is_incident(&self, v: usize) -> bool {
        self.tail == v || self.head == v
    }

    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }

    /// Gain read along the edge starting from `from`.
    pub fn gain_from(&self, group: &CyclicGroup, from: usize) -> Gain {
        if self.tail == from {
            self.gain
        } else {
            group.neg(self.gain)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainGraph {
    group: CyclicGroup,
    vertices: Vec<Vertex>,
    edges: Vec<GainEdge>,
    next_id: u32,
}

/// A step of a walk: the edge and whether it is traversed against its orientation.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub edge: EdgeId,
    pub reversed: bool,
}

impl GainGraph {
    pub fn new(group: CyclicGroup) -> Self {
        GainGraph {
            group,
            vertices: Vec::new(),
            edges: Vec::new(),
            next_id: 0,
        }
    }

    pub fn group(&self) -> &CyclicGroup {
        &self.group
    }

    pub fn k(&self) -> u32 {
        self.group.order()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GainEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.vertices[v].kind == VertexKind::Fixed
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn fixed_vertex(&self) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.kind == VertexKind::Fixed)
    }

    pub fn free_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Free)
            .count()
    }

    pub fn fixed_count(&self) -> usize {
        self.vertices.len() - self.free_count()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&GainEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn edge_position(&self, id: EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = &GainEdge> + '_ {
        self.edges.iter().filter(move |e| e.is_incident(v))
    }

    pub fn add_vertex(&mut self, name: &str, kind: VertexKind) -> Result<usize> {
        if name.is_empty() || name.contains(char::is_whitespace) || name.starts_with('#') {
            return Err(Error::invalid(format!("bad vertex name {name:?}")));
        }
        if self.vertex_index(name).is_some() {
            return Err(Error::invalid(format!("duplicate vertex {name}")));
        }
        if kind == VertexKind::Fixed && self.fixed_vertex().is_some() {
            return Err(Error::invalid("more than one fixed vertex"));
        }
        self.vertices.push(Vertex {
            name: name.to_string(),
            kind,
        });
        Ok(self.vertices.len() - 1)
    }

    /// Adds an edge after checking it against the validity clauses.
    pub fn add_edge(&mut self, tail: usize, head: usize, gain: Gain) -> Result<EdgeId> {
        let id = EdgeId(self.next_id);
        self.check_new_edge(tail, head, gain)?;
        self.edges.push(GainEdge {
            id,
            tail,
            head,
            gain,
        });
        self.next_id += 1;
        Ok(id)
    }

    pub fn add_edge_by_name(&mut self, tail: &str, head: &str, gain: Gain) -> Result<EdgeId> {
        let t = self
            .vertex_index(tail)
            .ok_or_else(|| Error::invalid(format!("unknown vertex {tail}")))?;
        let h = self
            .vertex_index(head)
            .ok_or_else(|| Error::invalid(format!("unknown vertex {head}")))?;
        self.add_edge(t, h, gain)
    }

    fn check_new_edge(&self, tail: usize, head: usize, gain: Gain) -> Result<()> {
        let n = self.vertices.len();
        if tail >= n || head >= n {
            return Err(Error::invalid("edge endpoint out of range"));
        }
        if !self.group.contains(gain) {
            return Err(Error::invalid(format!(
                "gain {gain} out of range for k={}",
                self.k()
            )));
        }
        let fixed_end = self.is_fixed(tail) || self.is_fixed(head);
        if tail == head {
            if self.is_fixed(tail) {
                return Err(Error::invalid(format!(
                    "loop at fixed vertex {}",
                    self.name(tail)
                )));
            }
            if gain == 0 {
                return Err(Error::invalid(format!(
                    "identity loop at {}",
                    self.name(tail)
                )));
            }
        }
        let key = self.orient(tail, head, gain);
        for e in &self.edges {
            let same_pair =
                (e.tail == tail && e.head == head) || (e.tail == head && e.head == tail);
            if !same_pair {
                continue;
            }
            if fixed_end {
                return Err(Error::invalid(format!(
                    "parallel edges at fixed vertex between {} and {}",
                    self.name(tail),
                    self.name(head)
                )));
            }
            if self.orient(e.tail, e.head, e.gain) == key {
                return Err(Error::invalid(format!(
                    "parallel edges between {} and {} with equivalent gains",
                    self.name(tail),
                    self.name(head)
                )));
            }
        }
        Ok(())
    }

    /// Orientation-independent key of an edge, in index space.
    fn orient(&self, tail: usize, head: usize, gain: Gain) -> (usize, usize, Gain) {
        if tail == head {
            (tail, head, self.group.unsigned(gain))
        } else if tail < head {
            (tail, head, gain)
        } else {
            (head, tail, self.group.neg(gain))
        }
    }

    /// Re-checks every clause from scratch.
    pub fn validate(&self) -> Result<()> {
        let mut fresh = GainGraph::new(self.group);
        for v in &self.vertices {
            fresh.add_vertex(&v.name, v.kind)?;
        }
        for e in &self.edges {
            fresh.add_edge(e.tail, e.head, e.gain)?;
        }
        Ok(())
    }

    pub fn remove_edge(&self, id: EdgeId) -> Result<GainGraph> {
        let pos = self
            .edge_position(id)
            .ok_or_else(|| Error::input(format!("no edge with id {}", id.0)))?;
        let mut g = self.clone();
        g.edges.remove(pos);
        Ok(g)
    }

    /// Removes `v` and its incident edges; other vertices keep their relative order.
    pub fn remove_vertex(&self, v: usize) -> GainGraph {
        let mut g = GainGraph {
            group: self.group,
            vertices: Vec::new(),
            edges: Vec::new(),
            next_id: self.next_id,
        };
        let remap: Vec<Option<usize>> = (0..self.vertices.len())
            .scan(0usize, |next, i| {
                Some(if i == v {
                    None
                } else {
                    *next += 1;
                    Some(*next - 1)
                })
            })
            .collect();
        g.vertices = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v)
            .map(|(_, x)| x.clone())
            .collect();
        g.edges = self
            .edges
            .iter()
            .filter(|e| !e.is_incident(v))
            .map(|e| GainEdge {
                tail: remap[e.tail].unwrap(),
                head: remap[e.head].unwrap(),
                ..*e
            })
            .collect();
        g
    }

    /// The subgraph formed by the given edges and their endpoints; edge ids are kept.
    pub fn edge_subgraph(&self, ids: &[EdgeId]) -> Result<GainGraph> {
        let wanted: BTreeSet<EdgeId> = ids.iter().copied().collect();
        let picked: Vec<&GainEdge> = self
            .edges
            .iter()
            .filter(|e| wanted.contains(&e.id))
            .collect();
        if picked.len() != wanted.len() {
            return Err(Error::input("edge subset contains unknown edge ids"));
        }
        let mut used = vec![false; self.vertices.len()];
        for e in &picked {
            used[e.tail] = true;
            used[e.head] = true;
        }
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut g = GainGraph {
            group: self.group,
            vertices: Vec::new(),
            edges: Vec::new(),
            next_id: self.next_id,
        };
        for (i, v) in self.vertices.iter().enumerate() {
            if used[i] {
                remap[i] = g.vertices.len();
                g.vertices.push(v.clone());
            }
        }
        g.edges = picked
            .into_iter()
            .map(|e| GainEdge {
                tail: remap[e.tail],
                head: remap[e.head],
                ..*e
            })
            .collect();
        Ok(g)
    }

    /// Same vertices, edges restricted to `ids`.
    pub fn spanning_subgraph(&self, ids: &[EdgeId]) -> GainGraph {
        let wanted: BTreeSet<EdgeId> = ids.iter().copied().collect();
        let mut g = self.clone();
        g.edges.retain(|e| wanted.contains(&e.id));
        g
    }

    /// Applies the switching `sigma`: `psi'(e) = sigma(tail) + psi(e) - sigma(head)`.
    pub fn switch(&self, sigma: &[Gain]) -> Result<GainGraph> {
        if sigma.len() != self.vertices.len() {
            return Err(Error::input("switching function has the wrong length"));
        }
        if let Some(v0) = self.fixed_vertex() {
            if sigma[v0] != 0 {
                return Err(Error::input(
                    "switching must be the identity on the fixed vertex",
                ));
            }
        }
        if sigma.iter().any(|&s| !self.group.contains(s)) {
            return Err(Error::input("switching value out of range"));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.gain = self
                .group
                .sub(self.group.add(sigma[e.tail], e.gain), sigma[e.head]);
        }
        Ok(g)
    }

    /// Net gain of a walk, checking that consecutive steps share endpoints.
    pub fn walk_gain(&self, start: usize, steps: &[Step]) -> Result<Gain> {
        let mut at = start;
        let mut total = 0;
        for s in steps {
            let e = self
                .edge(s.edge)
                .ok_or_else(|| Error::input("walk uses an unknown edge"))?;
            let (from, to) = if s.reversed {
                (e.head, e.tail)
            } else {
                (e.tail, e.head)
            };
            if from != at {
                return Err(Error::input("walk is not contiguous"));
            }
            total = self.group.add(total, e.gain_from(&self.group, from));
            at = to;
        }
        Ok(total)
    }

    /// Canonical edge triples by vertex name, independent of orientation and insertion order.
    pub fn canonical_edges(&self) -> Vec<(String, String, Gain)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.name(e.tail), self.name(e.head));
                if e.is_loop() {
                    (a.to_string(), b.to_string(), self.group.unsigned(e.gain))
                } else if a <= b {
                    (a.to_string(), b.to_string(), e.gain)
                } else {
                    (b.to_string(), a.to_string(), self.group.neg(e.gain))
                }
            })
            .collect();
        out.sort();
        out
    }

    /// Content hash over the group order, vertices and canonical edges.
    pub fn canonical_hash(&self) -> String {
        let mut vs: Vec<_> = self
            .vertices
            .iter()
            .map(|v| (v.name.clone(), v.kind))
            .collect();
        vs.sort();
        let mut h = Sha256::new();
        h.update(format!("k={};", self.k()));
        for (n, kind) in vs {
            h.update(format!("v {n} {kind:?};"));
        }
        for (a, b, g) in self.canonical_edges() {
            h.update(format!("e {a} {b} {g};"));
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Structural equality up to edge ids, orientation and vertex order.
    pub fn same_as(&self, other: &GainGraph) -> bool {
        let mut a: Vec<_> = self.vertices.iter().map(|v| (&v.name, v.kind)).collect();
        let mut b: Vec<_> = other.vertices.iter().map(|v| (&v.name, v.kind)).collect();
        a.sort();
        b.sort();
        self.k() == other.k() && a == b && self.canonical_edges() == other.canonical_edges()
    }

    /// Vertex indices sorted by name; all "lexicographic" tie-breaks use this order.
    pub fn name_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.vertices.len()).collect();
        idx.sort_by(|&a, &b| self.vertices[a].name.cmp(&self.vertices[b].name));
        idx
    }

    /// A fresh vertex name with the given prefix.
    pub fn fresh_name(&self, prefix: &str) -> String {
        (0..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| self.vertex_index(n).is_none())
            .unwrap()
    }

    /// Gives every fixed-incident edge gain 0; such gains do not affect the lift.
    pub fn normalize_fixed_gains(&self) -> GainGraph {
        let mut g = self.clone();
        if let Some(v0) = self.fixed_vertex() {
            for e in &mut g.edges {
                if e.is_incident(v0) {
                    e.gain = 0;
                }
            }
        }
        g
    }

    /// Connected components as sets of vertex indices; isolated vertices form their own component.
    pub fn vertex_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = c;
            while let Some(x) = stack.pop() {
                members.push(x);
                for e in self.incident(x) {
                    let y = e.other(x);
                    if comp[y] == usize::MAX {
                        comp[y] = c;
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced on a vertex set.
    pub fn induced(&self, vs: &[usize]) -> GainGraph {
        let keep: BTreeSet<usize> = vs.iter().copied().collect();
        let mut g = self.clone();
        let mut order: Vec<usize> = (0..self.vertices.len())
            .filter(|v| !keep.contains(v))
            .collect();
        order.reverse();
        for v in order {
            g = g.remove_vertex(v);
        }
        g
    }
}
