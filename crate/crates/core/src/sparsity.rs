//! Count-matroid style sparsity checks by exhaustive subset enumeration.
//!
//! Every count here is additive over connected components and a violating
//! set always has a violating component with a numerically smaller bitmask,
//! so only connected edge subsets are evaluated. The witness is the first
//! violating subset in bitmask order over edge insertion order.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::classify::{
    check_irrep, ladder, near_balanced_arcs, order_of_arcs, Arc, PotentialForest,
};
use crate::gain_graph::{EdgeId, GainGraph};
use crate::{Error, Result};

pub const DEFAULT_CAP: usize = 22;
pub const CAP_ENV: &str = "SYMRIGID_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CountSpec {
    /// The `Z_k^j` count with the `alpha` correction.
    Zkj { j: u32 },
    /// `(2, m, 3, l)`: `(2, m, l)` plus `(2, 3)` on balanced subgraphs.
    Gain { m: u32, l: u32 },
    /// `(2, m, l)`: `|E(H)| <= 2|free(H)| + m|fixed(H)| - l`.
    Plain { m: u32, l: u32 },
}

impl CountSpec {
    fn validate(&self, k: u32) -> Result<()> {
        match *self {
            CountSpec::Zkj { j } => check_irrep(k, j),
            CountSpec::Gain { m, l } | CountSpec::Plain { m, l } if m <= 2 && l <= 3 => Ok(()),
            _ => Err(Error::input(format!("count {self} outside m <= 2, l <= 3"))),
        }
    }

    /// Whether greedy independence is known to give a matroid basis for this count.
    pub fn in_matroidal_regime(&self, k: u32) -> bool {
        match self {
            CountSpec::Zkj { .. } => k == 4 || k == 6 || (k % 2 == 1 && (5..=1000).contains(&k)),
            _ => true,
        }
    }
}

impl fmt::Display for CountSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountSpec::Zkj { j } => write!(f, "zkj:{j}"),
            CountSpec::Gain { m, l } => write!(f, "gain:{m},{l}"),
            CountSpec::Plain { m, l } => write!(f, "plain:{m},{l}"),
        }
    }
}

impl FromStr for CountSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::input(format!(
                "bad count spec {s:?}; expected zkj:<j>, gain:<m>,<l> or plain:<m>,<l>"
            ))
        };
        let (family, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<u32> = args
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (family, nums.as_slice()) {
            ("zkj", [j]) => Ok(CountSpec::Zkj { j: *j }),
            ("gain", [m, l]) => Ok(CountSpec::Gain { m: *m, l: *l }),
            ("plain", [m, l]) => Ok(CountSpec::Plain { m: *m, l: *l }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest edge count accepted for exhaustive enumeration.
    pub cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { cap: DEFAULT_CAP }
    }
}

impl Limits {
    /// Reads `SYMRIGID_CAP`, falling back to the default; the hard ceiling is 63.
    pub fn from_env() -> Self {
        let cap = std::env::var(CAP_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_CAP);
        Limits { cap: cap.min(63) }
    }

    fn admit(&self, edges: usize) -> Result<()> {
        if edges > self.cap {
            return Err(Error::Capacity(format!(
                "{edges} edges exceed the exhaustive-check cap of {} (raise with --cap or {CAP_ENV})",
                self.cap
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityVerdict {
    pub sparse: bool,
    pub tight: bool,
    pub witness: Option<Vec<EdgeId>>,
}

/// Evaluates the count on subsets of a fixed list of arcs.
struct Counter<'g> {
    g: &'g GainGraph,
    spec: CountSpec,
    arcs: Vec<Arc>,
    ids: Vec<EdgeId>,
    fixed: Option<usize>,
    order: Vec<usize>,
    forest: PotentialForest,
    parent: Vec<usize>,
    seen: Vec<bool>,
    touched: Vec<usize>,
    scratch: Vec<Arc>,
}

impl<'g> Counter<'g> {
    fn new(g: &'g GainGraph, spec: CountSpec, ids: &[EdgeId]) -> Result<Self> {
        spec.validate(g.k())?;
        let mut arcs = Vec::with_capacity(ids.len());
        for id in ids {
            let e = g
                .edge(*id)
                .ok_or_else(|| Error::input(format!("unknown edge id {}", id.0)))?;
            arcs.push(Arc {
                a: e.tail,
                b: e.head,
                g: e.gain,
            });
        }
        let n = g.vertex_count();
        Ok(Counter {
            g,
            spec,
            arcs,
            ids: ids.to_vec(),
            fixed: g.fixed_vertex(),
            order: g.name_order(),
            forest: PotentialForest::new(n, g.k()),
            parent: (0..n).collect(),
            seen: vec![false; n],
            touched: Vec::new(),
            scratch: Vec::new(),
        })
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Whether the connected subset `mask` breaks the count; disconnected subsets report `false`.
    fn violates(&mut self, mask: u64) -> bool {
        for &v in &self.touched {
            self.seen[v] = false;
            self.parent[v] = v;
        }
        self.touched.clear();
        let mut edges = 0i64;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            edges += 1;
            let Arc { a, b, .. } = self.arcs[i];
            for v in [a, b] {
                if !self.seen[v] {
                    self.seen[v] = true;
                    self.touched.push(v);
                }
            }
            let (ra, rb) = (self.root(a), self.root(b));
            if ra != rb {
                self.parent[rb] = ra;
            }
        }
        let r0 = self.root(self.touched[0]);
        for t in 1..self.touched.len() {
            let v = self.touched[t];
            if self.root(v) != r0 {
                return false;
            }
        }
        let nv = self.touched.len() as i64;
        let hf = self.fixed.is_some_and(|f| self.seen[f]) as i64;
        match self.spec {
            CountSpec::Plain { m, l } => edges > 2 * (nv - hf) + m as i64 * hf - l as i64,
            CountSpec::Gain { m, l } => {
                if edges > 2 * (nv - hf) + m as i64 * hf - l as i64 {
                    return true;
                }
                edges > 2 * nv - 3 && self.order(mask) == 1
            }
            CountSpec::Zkj { j } => {
                if edges <= 2 * nv - 3 {
                    return false;
                }
                if edges > 2 * nv - 2 * hf {
                    return true;
                }
                let order = self.order(mask);
                let group = *self.g.group();
                let Counter {
                    scratch,
                    arcs,
                    order: names,
                    forest,
                    ..
                } = self;
                let cls = ladder(&group, j, order, hf == 1, || {
                    scratch.clear();
                    scratch.extend(select(arcs, mask));
                    near_balanced_arcs(&group, scratch, names, forest).is_some()
                });
                edges > 2 * nv - 3 + cls.alpha as i64
            }
        }
    }

    fn order(&mut self, mask: u64) -> u32 {
        self.scratch.clear();
        self.scratch.extend(select(&self.arcs, mask));
        order_of_arcs(self.g.k(), &self.scratch, self.fixed, &mut self.forest)
    }

    fn first_violation(&mut self, must_include: Option<usize>) -> Option<u64> {
        let m = self.arcs.len();
        match must_include {
            None => (1..(1u64 << m)).find(|&mask| self.violates(mask)),
            Some(bit) => {
                let low = (1u64 << bit) - 1;
                let rest = m - 1;
                (0..(1u64 << rest))
                    .map(|r| ((r & !low) << 1) | (r & low) | (1 << bit))
                    .find(|&mask| self.violates(mask))
            }
        }
    }

    fn edges_of(&self, mask: u64) -> Vec<EdgeId> {
        (0..self.ids.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.ids[i])
            .collect()
    }
}

fn select(arcs: &[Arc], mask: u64) -> impl Iterator<Item = Arc> + '_ {
    arcs.iter()
        .enumerate()
        .filter(move |(i, _)| mask >> i & 1 == 1)
        .map(|(_, a)| *a)
}

/// Right-hand side of the count for a spanning subgraph of `g`; for `Z_k^j` this is `2|free|`.
fn full_rank_target(g: &GainGraph, spec: CountSpec) -> i64 {
    let free = g.free_count() as i64;
    let fixed = g.fixed_count() as i64;
    match spec {
        CountSpec::Zkj { .. } => 2 * free,
        CountSpec::Gain { m, l } | CountSpec::Plain { m, l } => {
            2 * free + m as i64 * fixed - l as i64
        }
    }
}

fn is_tight_given_sparse(g: &GainGraph, spec: CountSpec) -> Result<bool> {
    let e = g.edge_count() as i64;
    if e != full_rank_target(g, spec) {
        return Ok(false);
    }
    if let CountSpec::Zkj { j } = spec {
        if e > 0 {
            let ids: Vec<EdgeId> = g.edges().iter().map(|x| x.id).collect();
            return Ok(crate::classify::f_value(g, &ids, j)? == e);
        }
    }
    Ok(true)
}

pub fn check(g: &GainGraph, spec: CountSpec) -> Result<SparsityVerdict> {
    check_with(g, spec, &Limits::from_env())
}

/// Sparsity, tightness and the first violating subset.
///
/// Tight means sparse with `|E|` equal to the count on the whole vertex set;
/// for `Z_k^j` that is `|E| = f(E) = 2|free vertices|`.
pub fn check_with(g: &GainGraph, spec: CountSpec, limits: &Limits) -> Result<SparsityVerdict> {
    limits.admit(g.edge_count())?;
    let ids: Vec<EdgeId> = g.edges().iter().map(|e| e.id).collect();
    let mut c = Counter::new(g, spec, &ids)?;
    if let Some(mask) = c.first_violation(None) {
        return Ok(SparsityVerdict {
            sparse: false,
            tight: false,
            witness: Some(c.edges_of(mask)),
        });
    }
    Ok(SparsityVerdict {
        sparse: true,
        tight: is_tight_given_sparse(g, spec)?,
        witness: None,
    })
}

/// Whether the edge set is independent, i.e. every nonempty subset satisfies the count.
pub fn independent(
    g: &GainGraph,
    ids: &[EdgeId],
    spec: CountSpec,
    limits: &Limits,
) -> Result<bool> {
    limits.admit(ids.len())?;
    let mut c = Counter::new(g, spec, ids)?;
    Ok(c.first_violation(None).is_none())
}

/// Smallest violating subset of `ids` containing `ids[must]`, ties broken by bitmask order.
pub(crate) fn minimal_violation_with(
    g: &GainGraph,
    ids: &[EdgeId],
    must: usize,
    spec: CountSpec,
    limits: &Limits,
) -> Result<Option<Vec<EdgeId>>> {
    limits.admit(ids.len())?;
    let mut c = Counter::new(g, spec, ids)?;
    let low = (1u64 << must) - 1;
    let mut best: Option<u64> = None;
    for r in 0..(1u64 << (ids.len() - 1)) {
        let mask = ((r & !low) << 1) | (r & low) | (1 << must);
        if best.is_some_and(|b| b.count_ones() <= mask.count_ones()) {
            continue;
        }
        if c.violates(mask) {
            best = Some(mask);
        }
    }
    Ok(best.map(|m| c.edges_of(m)))
}

/// Greedy independent set scanning `order` (insertion order when `None`).
pub fn greedy_independent(
    g: &GainGraph,
    spec: CountSpec,
    order: Option<&[EdgeId]>,
    limits: &Limits,
) -> Result<Vec<EdgeId>> {
    let default: Vec<EdgeId> = g.edges().iter().map(|e| e.id).collect();
    let order = order.unwrap_or(&default);
    limits.admit(order.len())?;
    spec.validate(g.k())?;
    let mut chosen: Vec<EdgeId> = Vec::new();
    for &e in order {
        chosen.push(e);
        let must = chosen.len() - 1;
        let mut c = Counter::new(g, spec, &chosen)?;
        if c.first_violation(Some(must)).is_some() {
            chosen.pop();
        }
    }
    Ok(chosen)
}

/// A spanning tight subgraph found greedily, if the greedy basis is tight.
pub fn greedy_tight_spanning(
    g: &GainGraph,
    spec: CountSpec,
    order: Option<&[EdgeId]>,
    limits: &Limits,
) -> Result<Option<Vec<EdgeId>>> {
    let chosen = greedy_independent(g, spec, order, limits)?;
    let h = g.spanning_subgraph(&chosen);
    Ok(is_tight_given_sparse(&h, spec)?.then_some(chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::f_value;
    use crate::cyclic::CyclicGroup;
    use crate::gain_graph::{gallery::gallery, VertexKind};
    use proptest::prelude::*;

    fn all_ids(g: &GainGraph) -> Vec<EdgeId> {
        g.edges().iter().map(|e| e.id).collect()
    }

    // Oracle: literal definitions over every nonempty edge subset, each built as
    // a real subgraph and measured through the public classification API.
    fn oracle_sparse(g: &GainGraph, spec: CountSpec) -> bool {
        let ids = all_ids(g);
        (1u64..(1 << ids.len())).all(|mask| {
            let f: Vec<EdgeId> = (0..ids.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ids[i])
                .collect();
            let h = g.edge_subgraph(&f).unwrap();
            let e = f.len() as i64;
            let free = h.free_count() as i64;
            let fixed = h.fixed_count() as i64;
            match spec {
                CountSpec::Zkj { j } => e <= f_value(g, &f, j).unwrap(),
                CountSpec::Plain { m, l } => e <= 2 * free + m as i64 * fixed - l as i64,
                CountSpec::Gain { m, l } => {
                    let bal = crate::classify::is_balanced(&h);
                    e <= 2 * free + m as i64 * fixed - l as i64
                        && (!bal || e <= 2 * (free + fixed) - 3)
                }
            }
        })
    }

    #[test]
    fn spec_round_trip() {
        for s in ["zkj:3", "gain:0,1", "plain:1,2"] {
            assert_eq!(s.parse::<CountSpec>().unwrap().to_string(), s);
        }
        assert!("gain:1".parse::<CountSpec>().is_err());
        assert!("zz:1".parse::<CountSpec>().is_err());
    }

    #[test]
    fn counterexample_loop_counts() {
        let g = gallery("counterexample-loop", 8).unwrap();
        let limits = Limits::default();
        for j in 2..=6 {
            let v = check_with(&g, CountSpec::Zkj { j }, &limits).unwrap();
            assert!(v.sparse && v.tight, "j={j}");
        }
        let g1 = g.remove_edge(g.edges()[0].id).unwrap();
        for spec in [
            CountSpec::Gain { m: 0, l: 1 },
            CountSpec::Gain { m: 1, l: 1 },
        ] {
            assert!(check_with(&g1, spec, &limits).unwrap().tight, "{spec}");
        }
        let basis =
            greedy_tight_spanning(&g, CountSpec::Gain { m: 0, l: 1 }, None, &limits).unwrap();
        assert_eq!(basis, Some(vec![g.edges()[0].id]));
    }

    #[test]
    fn counterexample_fixed_counts() {
        let g = gallery("counterexample-fixed", 8).unwrap();
        let id = |i: usize| g.edges()[i].id;
        let limits = Limits::default();
        let drop = |rm: &[usize]| {
            let mut h = g.clone();
            for &i in rm {
                h = h.remove_edge(id(i)).unwrap();
            }
            h
        };
        assert!(
            check_with(&drop(&[0, 2]), CountSpec::Gain { m: 0, l: 1 }, &limits)
                .unwrap()
                .tight
        );
        assert!(
            check_with(&drop(&[0]), CountSpec::Gain { m: 1, l: 1 }, &limits)
                .unwrap()
                .tight
        );
        for j in 2..=6 {
            assert!(
                check_with(&drop(&[2]), CountSpec::Zkj { j }, &limits)
                    .unwrap()
                    .tight,
                "j={j}"
            );
        }
    }

    #[test]
    fn balanced_triangle_is_sparse_not_tight() {
        let g = gallery("balanced-triangle", 5).unwrap();
        let v = check_with(&g, CountSpec::Gain { m: 0, l: 1 }, &Limits::default()).unwrap();
        assert!(v.sparse && !v.tight);
        let one = gallery("single-loop", 5).unwrap();
        assert!(
            check_with(&one, CountSpec::Plain { m: 0, l: 1 }, &Limits::default())
                .unwrap()
                .tight
        );
    }

    #[test]
    fn lone_free_vertex_has_no_tight_spanning_subgraph() {
        let mut g = GainGraph::new(CyclicGroup::new(5).unwrap());
        g.add_vertex("u", VertexKind::Free).unwrap();
        assert_eq!(
            greedy_tight_spanning(&g, CountSpec::Zkj { j: 2 }, None, &Limits::default()).unwrap(),
            None
        );
        let v0 = gallery("fixed-vertex", 5).unwrap();
        assert!(
            check_with(&v0, CountSpec::Zkj { j: 2 }, &Limits::default())
                .unwrap()
                .tight
        );
    }

    #[test]
    fn capacity_is_enforced() {
        let mut g = GainGraph::new(CyclicGroup::new(50).unwrap());
        g.add_vertex("u", VertexKind::Free).unwrap();
        for a in 1..=24 {
            g.add_edge(0, 0, a).unwrap();
        }
        let err = check_with(&g, CountSpec::Plain { m: 0, l: 0 }, &Limits { cap: 22 }).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn witness_is_a_violating_subset() {
        let g = gallery("counterexample-loop", 8).unwrap();
        let v = check_with(&g, CountSpec::Gain { m: 0, l: 1 }, &Limits::default()).unwrap();
        assert!(!v.sparse);
        assert_eq!(v.witness.unwrap().len(), 2);
    }

    fn arb_graph() -> impl Strategy<Value = GainGraph> {
        (
            4u32..10,
            1usize..5,
            any::<bool>(),
            proptest::collection::vec((0usize..6, 0usize..6, 0u32..10), 1..9),
        )
            .prop_map(|(k, n, fixed, raw)| {
                let mut g = GainGraph::new(CyclicGroup::new(k).unwrap());
                for i in 0..n {
                    g.add_vertex(&format!("v{i}"), VertexKind::Free).unwrap();
                }
                if fixed {
                    g.add_vertex("z", VertexKind::Fixed).unwrap();
                }
                let nv = g.vertex_count();
                for (a, b, c) in raw {
                    let _ = g.add_edge(a % nv, b % nv, c % k);
                }
                g
            })
    }

    fn arb_spec(k: u32) -> impl Strategy<Value = CountSpec> {
        prop_oneof![
            (2..=k - 2).prop_map(|j| CountSpec::Zkj { j }),
            (0u32..2, 1u32..3).prop_map(|(m, l)| CountSpec::Gain { m, l }),
            (0u32..3, 0u32..4).prop_map(|(m, l)| CountSpec::Plain { m, l }),
        ]
    }

    proptest! {
        #[test]
        fn exhaustive_check_matches_definition((g, spec) in arb_graph().prop_flat_map(|g| { let k = g.k(); (Just(g), arb_spec(k)) })) {
            let v = check_with(&g, spec, &Limits::default()).unwrap();
            prop_assert_eq!(v.sparse, oracle_sparse(&g, spec));
            if let Some(w) = v.witness {
                let h = g.spanning_subgraph(&w);
                prop_assert!(!oracle_sparse(&h, spec));
            }
        }

        #[test]
        fn greedy_result_is_independent((g, spec) in arb_graph().prop_flat_map(|g| { let k = g.k(); (Just(g), arb_spec(k)) })) {
            let limits = Limits::default();
            let basis = greedy_independent(&g, spec, None, &limits).unwrap();
            prop_assert!(independent(&g, &basis, spec, &limits).unwrap());
        }
    }
}
