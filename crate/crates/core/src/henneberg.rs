//! Henneberg-type extensions and the reduction engine for `Z_k^j`-tight graphs.
//!
//! Every reduction is stored as the extension that undoes it, so a
//! certificate replays from its terminal graph back to the input.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::classify::{check_irrep, gain_group_order};
use crate::cyclic::{Gain, Residue};
use crate::gain_graph::{gallery::gallery, EdgeId, GainGraph, VertexKind};
use crate::lifting::{sample_framework, trial_rng, Framework};
use crate::sparsity::{check_with, minimal_violation_with, CountSpec, Limits};
use crate::{Error, Result};

const COLLINEAR_TOL: f64 = 1e-9;
const C1_RESAMPLES: u64 = 8;

/// An extension; gains are read along edges leaving the new vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Move {
    /// New free `v` with edges to `ends[0]` and `ends[1]`.
    Ext0 {
        v: String,
        ends: [(String, Gain); 2],
    },
    /// New free `v` with one edge to `u` and a loop.
    Loop1 {
        v: String,
        u: String,
        edge: Gain,
        lp: Gain,
    },
    /// Deletes the edge from `ends[0]` to `ends[1]` with gain `-a0 + a1`, then adds `v` joined to all three ends.
    Ext1 {
        v: String,
        ends: [(String, Gain); 3],
    },
    /// New free `v1`, `v2`, each joined to the fixed vertex, with edges `v1 -> v2` of gains `b` and `b + k/2`.
    TwoVertex {
        v1: String,
        v2: String,
        a1: Gain,
        a2: Gain,
        b: Gain,
    },
}

impl Move {
    pub fn kind(&self) -> &'static str {
        match self {
            Move::Ext0 { .. } => "ext0",
            Move::Loop1 { .. } => "loop1",
            Move::Ext1 { .. } => "ext1",
            Move::TwoVertex { .. } => "twovertex",
        }
    }

    fn sites_and_gains(&self) -> (String, String) {
        let join = |xs: &[&str]| xs.join(",");
        let nums = |xs: &[Gain]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Move::Ext0 { v, ends } => (
                format!("{v};{}", join(&[&ends[0].0, &ends[1].0])),
                nums(&[ends[0].1, ends[1].1]),
            ),
            Move::Loop1 { v, u, edge, lp } => (format!("{v};{u}"), nums(&[*edge, *lp])),
            Move::Ext1 { v, ends } => (
                format!("{v};{}", join(&[&ends[0].0, &ends[1].0, &ends[2].0])),
                nums(&[ends[0].1, ends[1].1, ends[2].1]),
            ),
            Move::TwoVertex { v1, v2, a1, a2, b } => {
                (format!("{v1},{v2};*"), nums(&[*a1, *a2, *b]))
            }
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sites, gains) = self.sites_and_gains();
        write!(f, "{} {sites} {gains}", self.kind())
    }
}

fn index(g: &GainGraph, name: &str) -> Result<usize> {
    g.vertex_index(name)
        .ok_or_else(|| Error::input(format!("unknown vertex {name}")))
}

fn fresh(g: &GainGraph, name: &str) -> Result<()> {
    if g.vertex_index(name).is_some() {
        return Err(Error::input(format!("vertex {name} already exists")));
    }
    Ok(())
}

/// Position of the edge `a -> b` with gain `gain`, matched up to reversal; any gain matches at the fixed vertex.
fn find_edge(g: &GainGraph, a: usize, b: usize, gain: Gain) -> Option<EdgeId> {
    let grp = g.group();
    let fixed_end = g.is_fixed(a) || g.is_fixed(b);
    g.edges()
        .iter()
        .find(|e| {
            if a == b {
                e.tail == a && e.head == a && (e.gain == gain || e.gain == grp.neg(gain))
            } else if e.tail == a && e.head == b {
                fixed_end || e.gain == gain
            } else if e.tail == b && e.head == a {
                fixed_end || e.gain == grp.neg(gain)
            } else {
                false
            }
        })
        .map(|e| e.id)
}

/// Applies an extension, enforcing the move's clauses and validity of the result.
pub fn apply_extension(g: &GainGraph, m: &Move) -> Result<GainGraph> {
    let mut h = g.clone();
    let grp = *g.group();
    match m {
        Move::Ext0 { v, ends } => {
            fresh(g, v)?;
            let x: Vec<usize> = ends
                .iter()
                .map(|(n, _)| index(g, n))
                .collect::<Result<_>>()?;
            if x[0] == x[1] && g.is_fixed(x[0]) {
                return Err(Error::input(
                    "0-extension cannot double up on the fixed vertex",
                ));
            }
            let nv = h.add_vertex(v, VertexKind::Free)?;
            for (xi, (_, a)) in x.iter().zip(ends) {
                h.add_edge(nv, *xi, *a)?;
            }
        }
        Move::Loop1 { v, u, edge, lp } => {
            fresh(g, v)?;
            let xu = index(g, u)?;
            let nv = h.add_vertex(v, VertexKind::Free)?;
            h.add_edge(nv, xu, *edge)?;
            h.add_edge(nv, nv, *lp)?;
        }
        Move::Ext1 { v, ends } => {
            fresh(g, v)?;
            let x: Vec<usize> = ends
                .iter()
                .map(|(n, _)| index(g, n))
                .collect::<Result<_>>()?;
            let gain = grp.sub(ends[1].1, ends[0].1);
            let e = find_edge(g, x[0], x[1], gain).ok_or_else(|| {
                Error::input(format!(
                    "1-extension needs an edge {} -> {} with gain {gain}",
                    ends[0].0, ends[1].0
                ))
            })?;
            h = h.remove_edge(e)?;
            let nv = h.add_vertex(v, VertexKind::Free)?;
            for (xi, (_, a)) in x.iter().zip(ends) {
                h.add_edge(nv, *xi, *a)?;
            }
        }
        Move::TwoVertex { v1, v2, a1, a2, b } => {
            if !g.k().is_multiple_of(2) {
                return Err(Error::input("2-vertex extension needs even k"));
            }
            let v0 = g
                .fixed_vertex()
                .ok_or_else(|| Error::input("2-vertex extension needs a fixed vertex"))?;
            fresh(g, v1)?;
            fresh(g, v2)?;
            let x1 = h.add_vertex(v1, VertexKind::Free)?;
            let x2 = h.add_vertex(v2, VertexKind::Free)?;
            h.add_edge(x1, v0, *a1)?;
            h.add_edge(x2, v0, *a2)?;
            h.add_edge(x1, x2, *b)?;
            h.add_edge(x1, x2, grp.add(*b, g.k() / 2))?;
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuardFailure {
    /// The three attachment points are collinear on every sampled realisation.
    Collinear,
    /// A half-turn loop while `j` is odd.
    HalfTurnLoop,
    /// A loop at a vertex joined to the centre whose order lies in `S_0(k, j)`.
    CentreLoopOrder,
}

fn collinear(p: [[f64; 2]; 3]) -> bool {
    let cross =
        (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    cross.abs() < COLLINEAR_TOL
}

fn attachment_points(
    g: &GainGraph,
    fw: &Framework,
    ends: &[(String, Gain); 3],
) -> Result<[[f64; 2]; 3]> {
    let mut out = [[0.0; 2]; 3];
    for (slot, (n, a)) in out.iter_mut().zip(ends) {
        let x = index(g, n)?;
        *slot = crate::cyclic::apply(&g.group().rotation(*a), fw.reps[x]);
    }
    Ok(out)
}

/// Checks the side conditions under which the extension keeps a `rho_j`-isostatic realisation isostatic.
/// The collinearity test uses `fw` first and then fresh samples before declaring failure.
pub fn extension_guard(
    g: &GainGraph,
    m: &Move,
    j: u32,
    fw: Option<&Framework>,
) -> Result<Option<GuardFailure>> {
    let grp = g.group();
    match m {
        Move::Loop1 { u, lp, .. } => {
            if g.k().is_multiple_of(2) && j % 2 == 1 && *lp == g.k() / 2 {
                return Ok(Some(GuardFailure::HalfTurnLoop));
            }
            if g.is_fixed(index(g, u)?)
                && j != 0
                && grp.in_s(Residue::Zero, grp.element_order(*lp), j)
            {
                return Ok(Some(GuardFailure::CentreLoopOrder));
            }
            Ok(None)
        }
        Move::Ext1 { ends, .. } => {
            if let Some(fw) = fw {
                if !collinear(attachment_points(g, fw, ends)?) {
                    return Ok(None);
                }
            }
            for t in 0..C1_RESAMPLES {
                let fw = sample_framework(g, &mut trial_rng(0x5eed, t))?;
                if !collinear(attachment_points(g, &fw, ends)?) {
                    return Ok(None);
                }
            }
            Ok(Some(GuardFailure::Collinear))
        }
        Move::Ext0 { .. } | Move::TwoVertex { .. } => Ok(None),
    }
}

/// A reduction step: `extension` applied to `reduced` rebuilds the graph it came from.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub reduced: GainGraph,
    pub extension: Move,
}

/// A 1-reduction candidate that broke the count, with the minimal violating subset minus the new edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub at: String,
    /// The candidate graph and the edge it added.
    pub candidate: GainGraph,
    pub added: EdgeId,
    /// Empty when the added edge violates on its own.
    pub blocker: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub enum Found {
    Reduction(Reduction),
    /// A vertex in the exceptional configuration with no admissible reduction anywhere.
    SpecialCase {
        vertex: String,
    },
    Absent,
}

#[derive(Clone, Debug)]
pub struct Search {
    pub found: Found,
    pub rejected: Vec<Rejection>,
}

fn is_tight(g: &GainGraph, j: u32, limits: &Limits) -> Result<bool> {
    Ok(check_with(g, CountSpec::Zkj { j }, limits)?.tight)
}

/// Edges at `v` as `(neighbour, gain read from v)`, loops listed once.
fn spokes(g: &GainGraph, v: usize) -> (Vec<(usize, Gain)>, Vec<Gain>) {
    let mut out = Vec::new();
    let mut loops = Vec::new();
    for e in g.incident(v) {
        if e.is_loop() {
            loops.push(e.gain);
        } else {
            out.push((e.other(v), e.gain_from(g.group(), v)));
        }
    }
    (out, loops)
}

/// All 1-reduction candidates at `v` in neighbour-name order, then gain.
fn one_reduction_candidates(g: &GainGraph, v: usize) -> Vec<Move> {
    let (sp, _) = spokes(g, v);
    let grp = g.group();
    let mut cands: Vec<(String, String, Gain, Move)> = Vec::new();
    for (p, q, r) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let (mut a, mut b) = (sp[p], sp[q]);
        if g.name(a.0) > g.name(b.0) || (a.0 == b.0 && grp.sub(b.1, a.1) > grp.sub(a.1, b.1)) {
            std::mem::swap(&mut a, &mut b);
        }
        let gain = grp.sub(b.1, a.1);
        let m = Move::Ext1 {
            v: g.name(v).to_string(),
            ends: [
                (g.name(a.0).to_string(), a.1),
                (g.name(b.0).to_string(), b.1),
                (g.name(sp[r].0).to_string(), sp[r].1),
            ],
        };
        cands.push((g.name(a.0).to_string(), g.name(b.0).to_string(), gain, m));
    }
    cands.sort_by(|x, y| (&x.0, &x.1, x.2).cmp(&(&y.0, &y.1, y.2)));
    cands.into_iter().map(|c| c.3).collect()
}

/// Tries one candidate; `Ok(Err(rejection))` when the reduced graph is valid but not tight.
fn try_one_reduction(
    g: &GainGraph,
    v: usize,
    m: &Move,
    j: u32,
    limits: &Limits,
) -> Result<Option<std::result::Result<Reduction, Rejection>>> {
    let Move::Ext1 { ends, .. } = m else {
        unreachable!()
    };
    let grp = g.group();
    let mut h = g.remove_vertex(v);
    let (a, b) = (index(&h, &ends[0].0)?, index(&h, &ends[1].0)?);
    let Ok(added) = h.add_edge(a, b, grp.sub(ends[1].1, ends[0].1)) else {
        return Ok(None);
    };
    if is_tight(&h, j, limits)? {
        return Ok(Some(Ok(Reduction {
            reduced: h,
            extension: m.clone(),
        })));
    }
    let ids: Vec<EdgeId> = h.edges().iter().map(|e| e.id).collect();
    let must = ids.iter().position(|&x| x == added).unwrap();
    let witness = minimal_violation_with(&h, &ids, must, CountSpec::Zkj { j }, limits)?;
    let blocker = witness
        .unwrap_or_default()
        .into_iter()
        .filter(|&x| x != added)
        .collect();
    Ok(Some(Err(Rejection {
        at: g.name(v).to_string(),
        candidate: h,
        added,
        blocker,
    })))
}

/// The exceptional configuration: two neighbours, one of them the centre, and a half-turn 2-cycle.
fn special_partner(g: &GainGraph, v: usize, j: u32) -> Option<usize> {
    let k = g.k();
    if !k.is_multiple_of(2) || j.is_multiple_of(2) || g.is_fixed(v) || g.degree(v) != 3 {
        return None;
    }
    let (sp, loops) = spokes(g, v);
    if !loops.is_empty() {
        return None;
    }
    let fixed: Vec<_> = sp.iter().filter(|s| g.is_fixed(s.0)).collect();
    let free: Vec<_> = sp.iter().filter(|s| !g.is_fixed(s.0)).collect();
    if fixed.len() != 1 || free.len() != 2 || free[0].0 != free[1].0 {
        return None;
    }
    (g.group().sub(free[1].1, free[0].1) == k / 2).then_some(free[0].0)
}

/// The first admissible reduction in the fixed search order, or the special-case marker.
pub fn find_reduction(g: &GainGraph, j: u32, limits: &Limits) -> Result<Search> {
    check_irrep(g.k(), j)?;
    let order = g.name_order();
    let free = |v: &usize| !g.is_fixed(*v);
    let mut rejected = Vec::new();
    for &v in order.iter().filter(|v| free(v)) {
        let (sp, loops) = spokes(g, v);
        if sp.len() == 2 && loops.is_empty() {
            let m = Move::Ext0 {
                v: g.name(v).to_string(),
                ends: [
                    (g.name(sp[0].0).to_string(), sp[0].1),
                    (g.name(sp[1].0).to_string(), sp[1].1),
                ],
            };
            return Ok(Search {
                found: Found::Reduction(Reduction {
                    reduced: g.remove_vertex(v),
                    extension: m,
                }),
                rejected,
            });
        }
    }
    for &v in order.iter().filter(|v| free(v)) {
        let (sp, loops) = spokes(g, v);
        if sp.len() == 1 && loops.len() == 1 {
            let reduced = g.remove_vertex(v);
            let m = Move::Loop1 {
                v: g.name(v).to_string(),
                u: g.name(sp[0].0).to_string(),
                edge: sp[0].1,
                lp: loops[0],
            };
            if extension_guard(&reduced, &m, j, None)?.is_none() {
                return Ok(Search {
                    found: Found::Reduction(Reduction {
                        reduced,
                        extension: m,
                    }),
                    rejected,
                });
            }
        }
    }
    for &v in order.iter().filter(|v| free(v)) {
        let (sp, loops) = spokes(g, v);
        if sp.len() != 3 || !loops.is_empty() {
            continue;
        }
        for m in one_reduction_candidates(g, v) {
            match try_one_reduction(g, v, &m, j, limits)? {
                Some(Ok(r)) => {
                    return Ok(Search {
                        found: Found::Reduction(r),
                        rejected,
                    })
                }
                Some(Err(rej)) => rejected.push(rej),
                None => {}
            }
        }
    }
    for &v in order.iter().filter(|v| free(v)) {
        let Some(u) = special_partner(g, v, j) else {
            continue;
        };
        let (usp, uloops) = spokes(g, u);
        let v0 = g.fixed_vertex().unwrap();
        let to_v: Vec<_> = usp.iter().filter(|s| s.0 == v).collect();
        let to_centre: Vec<_> = usp.iter().filter(|s| s.0 == v0).collect();
        if uloops.is_empty() && usp.len() == 3 && to_v.len() == 2 && to_centre.len() == 1 {
            let (sv, _) = spokes(g, v);
            let a_v = sv.iter().find(|s| s.0 == v0).unwrap().1;
            let reduced = g.remove_vertex(v.max(u)).remove_vertex(v.min(u));
            let m = Move::TwoVertex {
                v1: g.name(u).to_string(),
                v2: g.name(v).to_string(),
                a1: to_centre[0].1,
                a2: a_v,
                b: to_v[0].1,
            };
            return Ok(Search {
                found: Found::Reduction(Reduction {
                    reduced,
                    extension: m,
                }),
                rejected,
            });
        }
        return Ok(Search {
            found: Found::SpecialCase {
                vertex: g.name(v).to_string(),
            },
            rejected,
        });
    }
    Ok(Search {
        found: Found::Absent,
        rejected,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "kebab-case")]
pub enum Terminal {
    /// Every component matched the base catalogue; names joined by `+`.
    Base(String),
    Numeric,
    SpecialCase,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::Base(n) => f.write_str(n),
            Terminal::Numeric => f.write_str("numeric"),
            Terminal::SpecialCase => f.write_str("special-case"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateStep {
    pub extension: Move,
    /// Hash of the graph after this reduction.
    pub hash: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub k: u32,
    pub j: u32,
    pub input_hash: String,
    pub steps: Vec<CertificateStep>,
    pub terminal: Terminal,
    #[serde(skip)]
    pub terminal_graph: Option<GainGraph>,
}

impl Certificate {
    pub fn to_text(&self) -> String {
        let mut out = format!("input {}\n", self.input_hash);
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("step {} {} {}\n", i + 1, s.extension, s.hash));
        }
        out.push_str(&format!("terminal {}\n", self.terminal));
        out
    }

    /// Applies the recorded extensions in reverse, rebuilding the input graph.
    pub fn replay(&self) -> Result<GainGraph> {
        let mut g = self
            .terminal_graph
            .clone()
            .ok_or_else(|| Error::input("certificate carries no terminal graph"))?;
        for s in self.steps.iter().rev() {
            g = apply_extension(&g, &s.extension)?;
        }
        Ok(g)
    }
}

/// Group orders for which the reduction argument is available.
pub fn reduction_regime(k: u32) -> bool {
    k == 4 || k == 6 || (k % 2 == 1 && (5..=1000).contains(&k))
}

/// Reduces a `Z_k^j`-tight graph until no reduction applies, checking tightness at every step.
pub fn reduce_to_base(g: &GainGraph, j: u32, limits: &Limits) -> Result<Certificate> {
    check_irrep(g.k(), j)?;
    if !reduction_regime(g.k()) {
        return Err(Error::input(format!(
            "reductions are only certified for k in {{4, 6}} or odd 5 <= k <= 1000, got k={}",
            g.k()
        )));
    }
    if !is_tight(g, j, limits)? {
        return Err(Error::input(format!("graph is not Z_{}^{j}-tight", g.k())));
    }
    let mut steps = Vec::new();
    let mut cur = g.clone();
    let terminal = loop {
        match find_reduction(&cur, j, limits)?.found {
            Found::Reduction(r) => {
                if !is_tight(&r.reduced, j, limits)? {
                    return Err(Error::Internal(format!(
                        "reduction {} produced a non-tight graph",
                        r.extension
                    )));
                }
                steps.push(CertificateStep {
                    extension: r.extension,
                    hash: r.reduced.canonical_hash(),
                });
                cur = r.reduced;
            }
            Found::SpecialCase { .. } => break Terminal::SpecialCase,
            Found::Absent => {
                break recognize_base(&cur, j).map_or(Terminal::Numeric, Terminal::Base)
            }
        }
    };
    Ok(Certificate {
        k: g.k(),
        j,
        input_hash: g.canonical_hash(),
        steps,
        terminal,
        terminal_graph: Some(cur),
    })
}

/// Underlying multigraph of the five-vertex base: plain edges and looped vertices.
const FIVE_EDGES: [(usize, usize); 7] = [(0, 1), (2, 0), (2, 1), (0, 3), (1, 4), (0, 4), (1, 3)];
const FIVE_LOOPS: [usize; 3] = [2, 3, 4];

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn shape(g: &GainGraph) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut plain = Vec::new();
    let mut loops = Vec::new();
    for e in g.edges() {
        if e.is_loop() {
            loops.push(e.tail);
        } else {
            plain.push((e.tail.min(e.head), e.tail.max(e.head)));
        }
    }
    plain.sort_unstable();
    loops.sort_unstable();
    (plain, loops)
}

fn balanced_part(g: &GainGraph) -> bool {
    let ids: Vec<EdgeId> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| e.id)
        .collect();
    gain_group_order(&g.spanning_subgraph(&ids)) == 1
}

/// Matches one connected component against the base catalogue.
fn recognize_component(c: &GainGraph, j: u32) -> Option<&'static str> {
    let grp = c.group();
    let n = c.vertex_count();
    if c.fixed_vertex().is_some() {
        return (n == 1 && c.edge_count() == 0).then_some("fixed-vertex");
    }
    let (plain, loops) = shape(c);
    match (n, plain.len(), loops.len()) {
        (1, 0, 2) => return Some("double-loop"),
        (2, 4, 0) => return Some("quadruple-edge"),
        (2, 2, 2) if loops == [0, 1] => {
            let lg: Vec<Gain> = c
                .edges()
                .iter()
                .filter(|e| e.is_loop())
                .map(|e| grp.unsigned(e.gain))
                .collect();
            let pe: Vec<_> = c.edges().iter().filter(|e| !e.is_loop()).collect();
            let cyc = grp.unsigned(grp.sub(pe[0].gain_from(grp, 0), pe[1].gain_from(grp, 0)));
            if lg[0] == lg[1] && cyc == lg[0] {
                return Some("delta-gadget");
            }
        }
        (3, 3, 3)
            if plain == [(0, 1), (0, 2), (1, 2)] && loops == [0, 1, 2] && balanced_part(c) =>
        {
            return Some("looped-triangle")
        }
        (5, 7, 3) if balanced_part(c) => {
            let mut tpl: Vec<(usize, usize)> = FIVE_EDGES
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            tpl.sort_unstable();
            for p in permutations(5) {
                let mut mapped: Vec<_> = plain
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                mapped.sort_unstable();
                let mut ml: Vec<_> = loops.iter().map(|&a| p[a]).collect();
                ml.sort_unstable();
                if mapped == tpl && ml == FIVE_LOOPS {
                    return Some("five-vertex");
                }
            }
        }
        _ => {}
    }
    let four_regular = (0..n).all(|v| c.degree(v) == 4);
    if !four_regular {
        return None;
    }
    let in_s = |order: u32| Residue::ALL.iter().any(|&i| grp.in_s(i, order, j));
    let ids: Vec<EdgeId> = c.edges().iter().map(|e| e.id).collect();
    for &e in &ids {
        let rest: Vec<EdgeId> = ids.iter().copied().filter(|&x| x != e).collect();
        if in_s(gain_group_order(&c.spanning_subgraph(&rest))) {
            return Some("s-plus-edge");
        }
    }
    if j % 2 == 1 {
        for (i, &e) in ids.iter().enumerate() {
            for &f in &ids[i + 1..] {
                let rest: Vec<EdgeId> = ids.iter().copied().filter(|&x| x != e && x != f).collect();
                if gain_group_order(&c.spanning_subgraph(&rest)) == 2 {
                    return Some("z2-plus-two-edges");
                }
            }
        }
    }
    None
}

/// Names the base graph if every component is in the catalogue.
pub fn recognize_base(g: &GainGraph, j: u32) -> Option<String> {
    let mut names = Vec::new();
    for comp in g.vertex_components() {
        names.push(recognize_component(&g.induced(&comp), j)?);
    }
    (!names.is_empty()).then(|| names.join("+"))
}

/// Catalogue shapes usable as starting points for random growth.
pub const BASE_SHAPES: &[&str] = &[
    "double-loop",
    "quadruple-edge",
    "delta-gadget",
    "looped-triangle",
    "five-vertex",
];

fn nonzero<R: Rng>(k: u32, rng: &mut R) -> Gain {
    rng.gen_range(1..k)
}

/// A random labelling of a catalogue shape that is `Z_k^j`-tight, if one is found quickly.
pub fn sample_base<R: Rng>(
    shape: &str,
    k: u32,
    j: u32,
    rng: &mut R,
    limits: &Limits,
) -> Result<Option<GainGraph>> {
    check_irrep(k, j)?;
    for _ in 0..200 {
        let Ok(mut g) = gallery(shape, k) else {
            return Ok(None);
        };
        let relabel: Vec<(usize, usize, Gain)> = match shape {
            "double-loop" => vec![(0, 0, nonzero(k, rng)), (0, 0, nonzero(k, rng))],
            "quadruple-edge" => {
                let mut gains: Vec<Gain> = (0..k).collect();
                gains.shuffle(rng);
                gains[..4].iter().map(|&a| (0, 1, a)).collect()
            }
            "delta-gadget" => {
                let d = nonzero(k, rng);
                vec![(0, 0, d), (1, 1, d), (0, 1, d), (0, 1, 0)]
            }
            _ => g
                .edges()
                .iter()
                .map(|e| {
                    (
                        e.tail,
                        e.head,
                        if e.is_loop() { nonzero(k, rng) } else { 0 },
                    )
                })
                .collect(),
        };
        let mut h = GainGraph::new(*g.group());
        for v in g.vertices() {
            h.add_vertex(&v.name, v.kind)?;
        }
        if relabel
            .iter()
            .try_for_each(|&(a, b, x)| h.add_edge(a, b, x).map(|_| ()))
            .is_err()
        {
            continue;
        }
        g = h;
        if is_tight(&g, j, limits)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// A random extension of `g` that passes the guards and keeps the graph tight, or `None` after repeated failures.
pub fn random_extension<R: Rng>(
    g: &GainGraph,
    j: u32,
    rng: &mut R,
    limits: &Limits,
) -> Result<Option<(Move, GainGraph)>> {
    let k = g.k();
    let names: Vec<String> = g.vertices().iter().map(|v| v.name.clone()).collect();
    if names.is_empty() {
        return Ok(None);
    }
    let v = g.fresh_name("n");
    for _ in 0..200 {
        let pick = |rng: &mut R| names[rng.gen_range(0..names.len())].clone();
        let gain = |rng: &mut R| rng.gen_range(0..k);
        let m = match rng.gen_range(0..4) {
            0 => Move::Ext0 {
                v: v.clone(),
                ends: [(pick(rng), gain(rng)), (pick(rng), gain(rng))],
            },
            1 => Move::Loop1 {
                v: v.clone(),
                u: pick(rng),
                edge: gain(rng),
                lp: nonzero(k, rng),
            },
            2 => {
                if g.edge_count() == 0 {
                    continue;
                }
                let e = g.edges()[rng.gen_range(0..g.edge_count())];
                let a0 = gain(rng);
                let a1 = g.group().add(a0, e.gain);
                Move::Ext1 {
                    v: v.clone(),
                    ends: [
                        (names[e.tail].clone(), a0),
                        (names[e.head].clone(), a1),
                        (pick(rng), gain(rng)),
                    ],
                }
            }
            _ => {
                if !k.is_multiple_of(2) || j.is_multiple_of(2) || g.fixed_vertex().is_none() {
                    continue;
                }
                let v2 = {
                    let mut t = g.clone();
                    t.add_vertex(&v, VertexKind::Free)?;
                    t.fresh_name("n")
                };
                Move::TwoVertex {
                    v1: v.clone(),
                    v2,
                    a1: gain(rng),
                    a2: gain(rng),
                    b: gain(rng),
                }
            }
        };
        let Ok(h) = apply_extension(g, &m) else {
            continue;
        };
        if h.edge_count() > limits.cap {
            return Ok(None);
        }
        if extension_guard(g, &m, j, None)?.is_none() && is_tight(&h, j, limits)? {
            return Ok(Some((m, h)));
        }
    }
    Ok(None)
}

/// Grows a graph from a random catalogue base (plus, optionally, an isolated centre) by `steps` extensions.
pub fn grow_random<R: Rng>(
    k: u32,
    j: u32,
    steps: usize,
    with_centre: bool,
    rng: &mut R,
    limits: &Limits,
) -> Result<(GainGraph, Vec<Move>)> {
    check_irrep(k, j)?;
    let mut shapes: Vec<&str> = BASE_SHAPES.to_vec();
    shapes.shuffle(rng);
    let mut base = None;
    for s in shapes {
        if let Some(b) = sample_base(s, k, j, rng, limits)? {
            base = Some(b);
            break;
        }
    }
    let base = base
        .ok_or_else(|| Error::input(format!("no tight catalogue base found for k={k}, j={j}")))?;
    grow_from(base, j, steps, with_centre, rng, limits)
}

/// Extends a given base graph randomly.
pub fn grow_from<R: Rng>(
    base: GainGraph,
    j: u32,
    steps: usize,
    with_centre: bool,
    rng: &mut R,
    limits: &Limits,
) -> Result<(GainGraph, Vec<Move>)> {
    let mut g = base;
    if with_centre && g.fixed_vertex().is_none() {
        let name = g.fresh_name("c");
        g.add_vertex(&name, VertexKind::Fixed)?;
    }
    let mut moves = Vec::new();
    for _ in 0..steps {
        match random_extension(&g, j, rng, limits)? {
            Some((m, h)) => {
                moves.push(m);
                g = h;
            }
            None => break,
        }
    }
    Ok((g, moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::trial_rng;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn extension_then_reduction_round_trips() {
        let g = gallery("double-loop", 7).unwrap();
        let m = Move::Ext1 {
            v: "x".into(),
            ends: [("u".into(), 2), ("u".into(), 3), ("u".into(), 5)],
        };
        let h = apply_extension(&g, &m).unwrap();
        assert_eq!(h.edge_count(), 4);
        let s = find_reduction(&h, 2, &limits()).unwrap();
        let Found::Reduction(r) = s.found else {
            panic!("expected a reduction")
        };
        assert!(apply_extension(&r.reduced, &r.extension)
            .unwrap()
            .same_as(&h));
    }

    #[test]
    fn ext0_on_fixed_twice_is_rejected() {
        let g = gallery("fixed-vertex", 6).unwrap();
        let m = Move::Ext0 {
            v: "x".into(),
            ends: [("v0".into(), 0), ("v0".into(), 1)],
        };
        assert!(apply_extension(&g, &m).is_err());
    }

    #[test]
    fn guards() {
        let g = gallery("spoke", 6).unwrap();
        let half = Move::Loop1 {
            v: "x".into(),
            u: "u".into(),
            edge: 0,
            lp: 3,
        };
        assert_eq!(
            extension_guard(&g, &half, 3, None).unwrap(),
            Some(GuardFailure::HalfTurnLoop)
        );
        assert_eq!(extension_guard(&g, &half, 2, None).unwrap(), None);
        let centre = Move::Loop1 {
            v: "x".into(),
            u: "v0".into(),
            edge: 0,
            lp: 2,
        };
        assert_eq!(
            extension_guard(&g, &centre, 3, None).unwrap(),
            Some(GuardFailure::CentreLoopOrder)
        );
        assert_eq!(extension_guard(&g, &centre, 2, None).unwrap(), None);
        // Subdividing a half-turn loop and attaching to the centre puts three points on a line.
        let mut h = gallery("spoke", 6).unwrap();
        h.add_edge(1, 1, 3).unwrap();
        let m = Move::Ext1 {
            v: "x".into(),
            ends: [("u".into(), 0), ("u".into(), 3), ("v0".into(), 0)],
        };
        assert_eq!(
            extension_guard(&h, &m, 2, None).unwrap(),
            Some(GuardFailure::Collinear)
        );
    }

    #[test]
    fn figure4a_takes_the_two_vertex_reduction() {
        let g = gallery("figure4a", 6).unwrap();
        let s = find_reduction(&g, 3, &limits()).unwrap();
        match s.found {
            Found::Reduction(r) => {
                assert_eq!(r.extension.kind(), "twovertex");
                assert!(apply_extension(&r.reduced, &r.extension)
                    .unwrap()
                    .same_as(&g));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reduction_refuses_large_even_orders() {
        let g = gallery("counterexample-fixed", 8).unwrap();
        let g = g.remove_edge(g.edges()[2].id).unwrap();
        assert!(matches!(
            reduce_to_base(&g, 3, &limits()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn certificate_replays_to_input() {
        let mut rng = trial_rng(1, 0);
        let (g, _) = grow_random(7, 2, 4, false, &mut rng, &limits()).unwrap();
        let cert = reduce_to_base(&g, 2, &limits()).unwrap();
        let back = cert.replay().unwrap();
        assert_eq!(back.canonical_hash(), g.canonical_hash());
        assert!(cert.to_text().starts_with("input "));
    }

    #[test]
    fn base_recognition() {
        for (name, k, j) in [
            ("double-loop", 7, 2),
            ("looped-triangle", 5, 2),
            ("five-vertex", 7, 3),
            ("delta-gadget", 9, 4),
        ] {
            let g = gallery(name, k).unwrap();
            assert_eq!(recognize_base(&g, j).as_deref(), Some(name), "{name}");
        }
        let mut g = gallery("double-loop", 7).unwrap();
        g.add_vertex("v0", VertexKind::Fixed).unwrap();
        assert_eq!(
            recognize_base(&g, 2).as_deref(),
            Some("double-loop+fixed-vertex")
        );
    }
}
