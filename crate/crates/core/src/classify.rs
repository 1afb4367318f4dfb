//! Gain-group classification of subgraphs and the correction term `alpha`.

use serde::{Deserialize, Serialize};

use crate::cyclic::{gcd, CyclicGroup, Gain, Residue};
use crate::gain_graph::{EdgeId, GainGraph};
use crate::{Error, Result};

/// Compact edge used by the hot loops: tail, head, gain.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Arc {
    pub a: usize,
    pub b: usize,
    pub g: Gain,
}

pub(crate) fn arcs_of(g: &GainGraph) -> Vec<Arc> {
    g.edges()
        .iter()
        .map(|e| Arc {
            a: e.tail,
            b: e.head,
            g: e.gain,
        })
        .collect()
}

/// Union-find carrying potentials: `off[x]` is the gain of a path from the root to `x`.
pub(crate) struct PotentialForest {
    parent: Vec<usize>,
    off: Vec<Gain>,
    k: u32,
}

impl PotentialForest {
    pub fn new(n: usize, k: u32) -> Self {
        PotentialForest {
            parent: (0..n).collect(),
            off: vec![0; n],
            k,
        }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.off.iter_mut().for_each(|o| *o = 0);
    }

    pub fn find(&mut self, x: usize) -> (usize, Gain) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, po) = self.find(p);
        let o = (self.off[x] + po) % self.k;
        self.parent[x] = root;
        self.off[x] = o;
        (root, o)
    }

    /// Merges along `a -> b` with gain `g`; returns the closed-walk gain if they were already joined.
    pub fn union(&mut self, a: usize, b: usize, g: Gain) -> Option<Gain> {
        let k = self.k;
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        let val = (pa + g + k - pb) % k;
        if ra == rb {
            Some(val)
        } else {
            self.parent[rb] = ra;
            self.off[rb] = val;
            None
        }
    }
}

/// Order of the group generated by closed walks avoiding `fixed`.
pub(crate) fn order_of_arcs(
    k: u32,
    arcs: &[Arc],
    fixed: Option<usize>,
    forest: &mut PotentialForest,
) -> u32 {
    forest.reset();
    let mut acc = k;
    for arc in arcs {
        if Some(arc.a) == fixed || Some(arc.b) == fixed {
            continue;
        }
        if let Some(c) = forest.union(arc.a, arc.b, arc.g) {
            acc = gcd(acc, c);
        }
    }
    k / acc
}

/// Near-balance test over a set of arcs with no fixed vertex. Candidate bases are tried in `order`.
pub(crate) fn near_balanced_arcs(
    group: &CyclicGroup,
    arcs: &[Arc],
    order: &[usize],
    forest: &mut PotentialForest,
) -> Option<(usize, Gain)> {
    let mut present = vec![false; order.len()];
    for arc in arcs {
        present[arc.a] = true;
        present[arc.b] = true;
    }
    let mut vals: Vec<(usize, Gain)> = Vec::new();
    let mut diffs: Vec<Gain> = Vec::new();
    'base: for &v in order {
        if !present[v] {
            continue;
        }
        forest.reset();
        for arc in arcs.iter().filter(|x| x.a != v && x.b != v) {
            if let Some(c) = forest.union(arc.a, arc.b, arc.g) {
                if c != 0 {
                    continue 'base;
                }
            }
        }
        vals.clear();
        diffs.clear();
        for arc in arcs.iter().filter(|x| x.a == v || x.b == v) {
            if arc.a == arc.b {
                diffs.push(arc.g);
                continue;
            }
            let (x, into_v) = if arc.b == v {
                (arc.a, arc.g)
            } else {
                (arc.b, group.neg(arc.g))
            };
            let (root, phi) = forest.find(x);
            let value = group.add(phi, into_v);
            if let Some(&(_, first)) = vals.iter().find(|(r, _)| *r == root) {
                diffs.push(group.sub(value, first));
            }
            vals.push((root, value));
        }
        let Some(&delta) = diffs.iter().find(|&&d| d != 0) else {
            continue;
        };
        let ok_diff = |d: Gain| d == 0 || d == delta || d == group.neg(delta);
        let loops_ok = diffs.iter().all(|&d| ok_diff(d));
        let pairs_ok = vals.iter().enumerate().all(|(i, &(ri, xi))| {
            vals[i + 1..]
                .iter()
                .all(|&(rj, xj)| ri != rj || ok_diff(group.sub(xj, xi)))
        });
        if loops_ok && pairs_ok {
            return Some((v, delta));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    Balanced,
    /// Gain group of order 2 while `j` is odd.
    Z2,
    SPlusMinus,
    SZero,
    NearBalanced,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ClassKind,
    /// Order of the gain group.
    pub order: u32,
    pub has_fixed: bool,
    pub alpha: i32,
}

/// The `alpha` ladder, first matching case wins. `near_balanced` is consulted only when needed.
pub(crate) fn ladder(
    group: &CyclicGroup,
    j: u32,
    order: u32,
    has_fixed: bool,
    near_balanced: impl FnOnce() -> bool,
) -> Classification {
    let v0 = has_fixed as i32;
    let (kind, alpha) = if order == 1 {
        (ClassKind::Balanced, 0)
    } else if j % 2 == 1 && order == 2 {
        (ClassKind::Z2, 1)
    } else if group.in_s(Residue::PlusOne, order, j) || group.in_s(Residue::MinusOne, order, j) {
        (ClassKind::SPlusMinus, 2 - v0)
    } else if group.in_s(Residue::Zero, order, j) {
        (ClassKind::SZero, 2 - 2 * v0)
    } else if !has_fixed && order > 3 && near_balanced() {
        (ClassKind::NearBalanced, 2)
    } else {
        (ClassKind::General, 3 - 2 * v0)
    };
    Classification {
        kind,
        order,
        has_fixed,
        alpha,
    }
}

pub(crate) fn check_irrep(k: u32, j: u32) -> Result<()> {
    if j < 2 || j + 2 > k {
        return Err(Error::input(format!(
            "irreducible index j={j} must satisfy 2 <= j <= k-2 (k={k})"
        )));
    }
    Ok(())
}

pub fn gain_group_order(g: &GainGraph) -> u32 {
    let mut forest = PotentialForest::new(g.vertex_count(), g.k());
    order_of_arcs(g.k(), &arcs_of(g), g.fixed_vertex(), &mut forest)
}

pub fn is_balanced(g: &GainGraph) -> bool {
    gain_group_order(g) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearBalance {
    pub base: usize,
    pub delta: Gain,
}

/// Base vertex (first by name) and offset for a near-balanced graph; `None` when not applicable.
pub fn near_balanced(g: &GainGraph) -> Option<NearBalance> {
    if g.fixed_vertex().is_some() || is_balanced(g) {
        return None;
    }
    let mut forest = PotentialForest::new(g.vertex_count(), g.k());
    near_balanced_arcs(g.group(), &arcs_of(g), &g.name_order(), &mut forest)
        .map(|(base, delta)| NearBalance { base, delta })
}

pub fn is_proper_near_balanced(g: &GainGraph) -> bool {
    near_balanced(g).is_some() && !matches!(gain_group_order(g), 2 | 3)
}

/// Classifies `g` as one subgraph; the fixed vertex counts if it is present at all.
pub fn classify(g: &GainGraph, j: u32) -> Result<Classification> {
    check_irrep(g.k(), j)?;
    let order = gain_group_order(g);
    let has_fixed = g.fixed_vertex().is_some();
    Ok(ladder(g.group(), j, order, has_fixed, || {
        near_balanced(g).is_some()
    }))
}

pub fn alpha(g: &GainGraph, j: u32) -> Result<i32> {
    Ok(classify(g, j)?.alpha)
}

/// Edge sets of the connected components of the subgraph spanned by `ids`.
pub fn edge_components(g: &GainGraph, ids: &[EdgeId]) -> Result<Vec<Vec<EdgeId>>> {
    let sub = g.edge_subgraph(ids)?;
    Ok(sub
        .vertex_components()
        .into_iter()
        .map(|vs| {
            sub.edges()
                .iter()
                .filter(|e| vs.contains(&e.tail))
                .map(|e| e.id)
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect())
}

/// `f(F) = sum over components X of (2|V(X)| - 3 + alpha(X))`, fixed vertex included in `|V(X)|`.
pub fn f_value(g: &GainGraph, ids: &[EdgeId], j: u32) -> Result<i64> {
    check_irrep(g.k(), j)?;
    if ids.is_empty() {
        return Err(Error::input("f is defined on nonempty edge sets"));
    }
    let mut total = 0i64;
    for comp in edge_components(g, ids)? {
        let x = g.edge_subgraph(&comp)?;
        total += 2 * x.vertex_count() as i64 - 3 + alpha(&x, j)? as i64;
    }
    Ok(total)
}
