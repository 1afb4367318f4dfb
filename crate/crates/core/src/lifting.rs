//! Covering graphs of gain graphs and sampled symmetric realisations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};

use crate::cyclic::{apply, CyclicGroup, Gain};
use crate::gain_graph::{EdgeId, GainGraph, Vertex, VertexKind};
use crate::{Error, Result};

const MIN_NORM: f64 = 0.1;
const MIN_SEPARATION: f64 = 1e-3;
const MAX_DRAWS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverVertex {
    /// Index of the gain-graph vertex this lies over.
    pub orbit: usize,
    pub t: Gain,
}

/// The lifted graph: each free vertex becomes `k` copies and the fixed vertex one.
#[derive(Clone, Debug)]
pub struct Cover {
    pub group: CyclicGroup,
    pub orbits: Vec<Vertex>,
    pub vertices: Vec<CoverVertex>,
    /// Undirected, deduplicated, as `(min, max)` vertex indices.
    pub edges: Vec<(usize, usize)>,
    /// Gain edge each cover edge lies over.
    pub edge_orbit: Vec<EdgeId>,
    index: Vec<Vec<usize>>,
}

impl Cover {
    pub fn vertex(&self, orbit: usize, t: Gain) -> usize {
        let copies = &self.index[orbit];
        copies[t as usize % copies.len()]
    }
}

pub fn lift(g: &GainGraph) -> Cover {
    let k = g.k();
    let mut vertices = Vec::new();
    let mut index = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let copies = if v.kind == VertexKind::Fixed { 1 } else { k };
        index.push((0..copies).map(|t| vertices.len() + t as usize).collect());
        vertices.extend((0..copies).map(|t| CoverVertex { orbit: i, t }));
    }
    let mut cover = Cover {
        group: *g.group(),
        orbits: g.vertices().to_vec(),
        vertices,
        edges: Vec::new(),
        edge_orbit: Vec::new(),
        index,
    };
    let mut seen = HashSet::new();
    for e in g.edges() {
        for t in 0..k {
            let a = cover.vertex(e.tail, t);
            let b = cover.vertex(e.head, g.group().add(t, e.gain));
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                cover.edges.push(key);
                cover.edge_orbit.push(e.id);
            }
        }
    }
    cover
}

/// Recovers a gain graph by choosing the `t = 0` copy of each orbit as representative.
pub fn quotient(cover: &Cover) -> Result<GainGraph> {
    let group = cover.group;
    let mut g = GainGraph::new(group);
    for v in &cover.orbits {
        g.add_vertex(&v.name, v.kind)?;
    }
    let mut keys = BTreeSet::new();
    for &(a, b) in &cover.edges {
        let (va, vb) = (cover.vertices[a], cover.vertices[b]);
        let fixed_end = g.is_fixed(va.orbit) || g.is_fixed(vb.orbit);
        let d = if fixed_end { 0 } else { group.sub(vb.t, va.t) };
        let key = if va.orbit == vb.orbit {
            (va.orbit, vb.orbit, group.unsigned(d))
        } else if va.orbit < vb.orbit {
            (va.orbit, vb.orbit, d)
        } else {
            (vb.orbit, va.orbit, group.neg(d))
        };
        keys.insert(key);
    }
    for (a, b, d) in keys {
        g.add_edge(a, b, d)?;
    }
    Ok(g)
}

/// A symmetric realisation: representatives per orbit and every cover point.
#[derive(Clone, Debug)]
pub struct Framework {
    pub cover: Cover,
    pub reps: Vec<[f64; 2]>,
    pub points: Vec<[f64; 2]>,
}

/// Counter-based stream per trial, so trial `t` does not depend on how many trials ran before.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Places every cover point by rotating its orbit representative; fixed vertices sit at the origin.
pub fn framework_from_reps(g: &GainGraph, reps: &[[f64; 2]]) -> Result<Framework> {
    if reps.len() != g.vertex_count() {
        return Err(Error::input(
            "one representative point per vertex is required",
        ));
    }
    let cover = lift(g);
    let points = cover
        .vertices
        .iter()
        .map(|cv| {
            if g.is_fixed(cv.orbit) {
                [0.0, 0.0]
            } else {
                apply(&g.group().rotation(cv.t), reps[cv.orbit])
            }
        })
        .collect();
    let mut reps = reps.to_vec();
    if let Some(v0) = g.fixed_vertex() {
        reps[v0] = [0.0, 0.0];
    }
    Ok(Framework {
        cover,
        reps,
        points,
    })
}

pub fn sample_framework<R: Rng>(g: &GainGraph, rng: &mut R) -> Result<Framework> {
    let mut reps = vec![[0.0; 2]; g.vertex_count()];
    let mut placed: Vec<[f64; 2]> = Vec::new();
    if g.fixed_vertex().is_some() {
        placed.push([0.0, 0.0]);
    }
    for (i, v) in g.vertices().iter().enumerate() {
        if v.kind == VertexKind::Fixed {
            continue;
        }
        let mut draws = 0;
        let images = loop {
            draws += 1;
            if draws > MAX_DRAWS {
                return Err(Error::Capacity(format!(
                    "could not place vertex {} after {MAX_DRAWS} draws",
                    v.name
                )));
            }
            let p: [f64; 2] = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            if p[0].hypot(p[1]) < MIN_NORM {
                continue;
            }
            let images: Vec<[f64; 2]> = (0..g.k())
                .map(|t| apply(&g.group().rotation(t), p))
                .collect();
            let far = images.iter().all(|q| {
                placed
                    .iter()
                    .all(|r| (q[0] - r[0]).hypot(q[1] - r[1]) >= MIN_SEPARATION)
            });
            if far {
                break images;
            }
        };
        reps[i] = images[0];
        placed.extend(images);
    }
    framework_from_reps(g, &reps)
}

/// Plain-text export: `point <orbit> <t> <x> <y>` per cover vertex, then `bond <i> <j>` by point index.
pub fn export(fw: &Framework) -> String {
    let mut out = String::new();
    for (cv, p) in fw.cover.vertices.iter().zip(&fw.points) {
        out.push_str(&format!(
            "point {} {} {:.12} {:.12}\n",
            fw.cover.orbits[cv.orbit].name, cv.t, p[0], p[1]
        ));
    }
    for (a, b) in &fw.cover.edges {
        out.push_str(&format!("bond {a} {b}\n"));
    }
    out
}
