//! Numeric ranks of rigidity matrices restricted to `rho_j`-symmetric motions.
//!
//! A `rho_j`-symmetric motion satisfies `m(g v) = conj(rho_j(g)) tau(g) m(v)`, so
//! it is determined by one complex 2-vector per free orbit plus, when
//! `j = +-1 mod k`, a complex multiple of a fixed eigenvector at the centre.
//! Ranks are taken from singular values against a relative threshold.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::cyclic::{apply, Gain};
use crate::gain_graph::GainGraph;
use crate::lifting::{sample_framework, trial_rng, Framework};
use crate::sparsity::{greedy_tight_spanning, CountSpec, Limits};
use crate::{Error, Result};

pub const RANK_TOL: f64 = 1e-8;

type C = Complex<f64>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn complex_rank(m: &DMatrix<C>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    rank_from(m.clone().svd(false, false).singular_values.as_slice())
}

pub fn real_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    rank_from(m.clone().svd(false, false).singular_values.as_slice())
}

/// Relative threshold, floored at unit scale: sampled coordinates are O(1), so a
/// block that cancels to rounding noise must not count as full rank.
fn rank_from(sv: &[f64]) -> usize {
    let max = sv.iter().cloned().fold(1.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

/// Eigenvectors `b` of the centre with `tau(1) b = rho_j(1) b`.
fn fixed_basis(g: &GainGraph, j: u32) -> Vec<[C; 2]> {
    let k = g.k();
    let j = j % k;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    // (1, -i) has eigenvalue exp(+i theta) under rotation, (1, i) the conjugate.
    if (j + k - 1).is_multiple_of(k) {
        out.push([c(s), C::new(0.0, -s)]);
    }
    if (j + 1).is_multiple_of(k) {
        out.push([c(s), C::new(0.0, s)]);
    }
    out
}

/// Column layout of the symmetric motion space.
struct Layout {
    free_col: Vec<Option<usize>>,
    fixed_cols: Vec<[C; 2]>,
    fixed_start: usize,
}

impl Layout {
    fn new(g: &GainGraph, j: u32) -> Self {
        let mut free_col = vec![None; g.vertex_count()];
        let mut next = 0;
        for (i, col) in free_col.iter_mut().enumerate() {
            if !g.is_fixed(i) {
                *col = Some(next);
                next += 2;
            }
        }
        let fixed_cols = if g.fixed_vertex().is_some() {
            fixed_basis(g, j)
        } else {
            Vec::new()
        };
        Layout {
            free_col,
            fixed_cols,
            fixed_start: next,
        }
    }

    fn dim(&self) -> usize {
        self.fixed_start + self.fixed_cols.len()
    }

    /// Adds `coef * w^T m(v)` to `row`, where `m(v)` is the representative motion of `v`.
    fn add(&self, row: &mut [C], v: usize, coef: C, w: [f64; 2]) {
        match self.free_col[v] {
            Some(col) => {
                row[col] += coef * w[0];
                row[col + 1] += coef * w[1];
            }
            None => {
                for (i, b) in self.fixed_cols.iter().enumerate() {
                    row[self.fixed_start + i] += coef * (b[0] * w[0] + b[1] * w[1]);
                }
            }
        }
    }
}

pub fn motion_dimension(g: &GainGraph, j: u32) -> usize {
    Layout::new(g, j).dim()
}

/// Trivial `rho_j` motions of a realisation: rotation for `j = 0`, translations for `j = +-1`.
/// Without free vertices only the centre remains, which cannot rotate.
pub fn framework_trivial_dimension(g: &GainGraph, j: u32) -> usize {
    if g.free_count() > 0 {
        g.group().trivial_dimension(j)
    } else {
        g.fixed_count() * g.group().fixed_point_dimension(j)
    }
}

/// Full rigidity matrix restricted to the symmetric motions: one row per cover edge.
pub fn restricted_matrix(fw: &Framework, g: &GainGraph, j: u32) -> DMatrix<C> {
    let lay = Layout::new(g, j);
    let cover = &fw.cover;
    let mut m = DMatrix::from_element(cover.edges.len(), lay.dim(), c(0.0));
    let mut row = vec![c(0.0); lay.dim()];
    for (r, &(a, b)) in cover.edges.iter().enumerate() {
        row.iter_mut().for_each(|x| *x = c(0.0));
        let (pa, pb) = (fw.points[a], fw.points[b]);
        let d = [pa[0] - pb[0], pa[1] - pb[1]];
        for (x, sign) in [(a, 1.0), (b, -1.0)] {
            let cv = cover.vertices[x];
            // m(v, t) = conj(rho_j(t)) tau(t) m(v, 0), so d . m(v, t) = conj(rho_j(t)) (tau(-t) d) . m(v, 0).
            let coef = g.group().character(j, cv.t).conj() * sign;
            let w = apply(&g.group().rotation(g.group().neg(cv.t)), d);
            lay.add(&mut row, cv.orbit, coef, w);
        }
        for (col, v) in row.iter().enumerate() {
            m[(r, col)] = *v;
        }
    }
    m
}

/// Orbit rigidity matrix: one complex row per gain edge `e = (u, w)` with gain `a`,
/// `(p(u) - tau(a) p(w))^T` on `u` and `conj(rho_j(a)) (p(w) - tau(-a) p(u))^T` on `w`.
pub fn orbit_matrix(fw: &Framework, g: &GainGraph, j: u32) -> DMatrix<C> {
    let lay = Layout::new(g, j);
    let grp = g.group();
    let mut m = DMatrix::from_element(g.edge_count(), lay.dim(), c(0.0));
    let mut row = vec![c(0.0); lay.dim()];
    for (r, e) in g.edges().iter().enumerate() {
        row.iter_mut().for_each(|x| *x = c(0.0));
        let a: Gain = e.gain;
        let (pu, pw) = (fw.reps[e.tail], fw.reps[e.head]);
        let tpw = apply(&grp.rotation(a), pw);
        let tpu = apply(&grp.rotation(grp.neg(a)), pu);
        lay.add(&mut row, e.tail, c(1.0), [pu[0] - tpw[0], pu[1] - tpw[1]]);
        lay.add(
            &mut row,
            e.head,
            grp.character(j, a).conj(),
            [pw[0] - tpu[0], pw[1] - tpu[1]],
        );
        for (col, v) in row.iter().enumerate() {
            m[(r, col)] = *v;
        }
    }
    m
}

pub fn rigidity_matrix(fw: &Framework) -> DMatrix<f64> {
    let n = fw.points.len();
    let mut m = DMatrix::zeros(fw.cover.edges.len(), 2 * n);
    for (r, &(a, b)) in fw.cover.edges.iter().enumerate() {
        let (pa, pb) = (fw.points[a], fw.points[b]);
        for d in 0..2 {
            m[(r, 2 * a + d)] = pa[d] - pb[d];
            m[(r, 2 * b + d)] = pb[d] - pa[d];
        }
    }
    m
}

pub fn full_rank(fw: &Framework) -> usize {
    real_rank(&rigidity_matrix(fw))
}

/// Dimension of trivial motions of `n` points in general position.
pub fn trivial_total(n: usize) -> usize {
    match n {
        0 => 0,
        1 => 2,
        _ => 3,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRank {
    pub j: u32,
    pub rank: usize,
    pub dim: usize,
    pub nullity: usize,
    pub trivial: usize,
    /// Number of gain edges, i.e. rows of the orbit matrix.
    pub rows: usize,
}

impl OrbitRank {
    /// No non-trivial symmetric motion.
    pub fn rigid(&self) -> bool {
        self.nullity == self.trivial
    }

    /// Rigid with independent rows.
    pub fn isostatic(&self) -> bool {
        self.rigid() && self.rank == self.rows
    }
}

/// Rank of the `rho_j` block, computed two ways; disagreement is an internal error.
pub fn orbit_rank(fw: &Framework, g: &GainGraph, j: u32) -> Result<OrbitRank> {
    if j >= g.k() {
        return Err(Error::input(format!(
            "irreducible index j={j} out of range for k={}",
            g.k()
        )));
    }
    let restricted = complex_rank(&restricted_matrix(fw, g, j));
    let direct = complex_rank(&orbit_matrix(fw, g, j));
    if restricted != direct {
        return Err(Error::Internal(format!(
            "orbit matrix rank {direct} differs from restricted rank {restricted} at j={j}"
        )));
    }
    let dim = motion_dimension(g, j);
    Ok(OrbitRank {
        j,
        rank: restricted,
        dim,
        nullity: dim - restricted,
        trivial: framework_trivial_dimension(g, j),
        rows: g.edge_count(),
    })
}

/// Maximum rank over `trials` sampled realisations, taken as the generic rank.
pub fn generic_orbit_rank(g: &GainGraph, j: u32, trials: u64, seed: u64) -> Result<OrbitRank> {
    let mut best: Option<OrbitRank> = None;
    for t in 0..trials.max(1) {
        let fw = sample_framework(g, &mut trial_rng(seed, t))?;
        let r = orbit_rank(&fw, g, j)?;
        if best.is_none_or(|b| r.rank > b.rank) {
            best = Some(r);
        }
    }
    Ok(best.unwrap())
}

/// Combinatorial verdict for one irreducible block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comb {
    /// A spanning tight subgraph exists.
    Tight,
    Slack,
    /// No count is available for this order.
    Na,
}

impl Comb {
    pub fn as_str(&self) -> &'static str {
        match self {
            Comb::Tight => "tight",
            Comb::Slack => "slack",
            Comb::Na => "na",
        }
    }
}

/// The count a block is judged by: `gain:0,1` at `j = 0`, `gain:1,1` at `j = +-1`, the `Z_k^j` count otherwise.
/// `None` below order 4.
pub fn block_spec(k: u32, j: u32) -> Option<CountSpec> {
    if k < 4 {
        return None;
    }
    Some(if j == 0 {
        CountSpec::Gain { m: 0, l: 1 }
    } else if j == 1 || j == k - 1 {
        CountSpec::Gain { m: 1, l: 1 }
    } else {
        CountSpec::Zkj { j }
    })
}

/// The competing count evaluated alongside the primary one at `j = +-1`.
pub fn alternate_spec(k: u32, j: u32) -> Option<CountSpec> {
    (k >= 4 && (j == 1 || j == k - 1)).then_some(CountSpec::Gain { m: 1, l: 2 })
}

/// A graph with no free vertex is a lone centre with no edges and is rigid in every block,
/// although the `-l` term of the gain counts does not apply to it.
fn comb_verdict(g: &GainGraph, spec: Option<CountSpec>, limits: &Limits) -> Result<Comb> {
    match spec {
        None => Ok(Comb::Na),
        Some(_) if g.free_count() == 0 => Ok(Comb::Tight),
        Some(s) => Ok(if greedy_tight_spanning(g, s, None, limits)?.is_some() {
            Comb::Tight
        } else {
            Comb::Slack
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub j: u32,
    pub spec: Option<CountSpec>,
    pub comb: Comb,
    pub alt_spec: Option<CountSpec>,
    pub alt_comb: Option<Comb>,
    pub rank: usize,
    pub nullity: usize,
    pub trivial: usize,
    pub rows: usize,
    pub isostatic: bool,
    /// Tight combinatorics exactly when no non-trivial symmetric motion exists; always true for `na`.
    pub agree: bool,
}

impl BlockReport {
    pub fn rigid(&self) -> bool {
        self.nullity == self.trivial
    }

    pub fn to_line(&self) -> String {
        format!(
            "j={} comb={} rank={} null={} triv={} iso={} agree={}",
            self.j,
            self.comb.as_str(),
            self.rank,
            self.nullity,
            self.trivial,
            self.isostatic,
            self.agree
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub k: u32,
    pub blocks: Vec<BlockReport>,
    pub cover_vertices: usize,
    pub full_rank: usize,
    /// Full cover rank equals `2|V| - 3` (fewer trivial motions below two points).
    pub rigid: bool,
    /// Every reported block is combinatorially tight.
    pub comb_rigid: bool,
    /// Whether the counts are known to characterise rigidity at this order.
    pub certified: bool,
}

impl RigidityReport {
    pub fn agree(&self) -> bool {
        self.blocks.iter().all(|b| b.agree)
    }
}

/// Whether the `Z_k^j` counts are proved sufficient at order `k`.
pub fn counts_certified(k: u32) -> bool {
    k == 4 || k == 6 || (k % 2 == 1 && (5..=1000).contains(&k))
}

/// Per-block and full-cover verdicts over `trials` samples; `only` restricts the blocks reported.
pub fn analyze(
    g: &GainGraph,
    trials: u64,
    seed: u64,
    only: Option<u32>,
    limits: &Limits,
) -> Result<RigidityReport> {
    let k = g.k();
    if let Some(j) = only {
        if j >= k {
            return Err(Error::input(format!(
                "irreducible index j={j} out of range for k={k}"
            )));
        }
    }
    let mut blocks = Vec::new();
    for j in (0..k).filter(|j| only.is_none_or(|o| o == *j)) {
        let spec = block_spec(k, j);
        let alt_spec = alternate_spec(k, j);
        let comb = comb_verdict(g, spec, limits)?;
        let alt_comb = alt_spec
            .map(|s| comb_verdict(g, Some(s), limits))
            .transpose()?;
        let r = generic_orbit_rank(g, j, trials, seed)?;
        blocks.push(BlockReport {
            j,
            spec,
            comb,
            alt_spec,
            alt_comb,
            rank: r.rank,
            nullity: r.nullity,
            trivial: r.trivial,
            rows: r.rows,
            isostatic: r.isostatic(),
            agree: comb == Comb::Na || (comb == Comb::Tight) == r.rigid(),
        });
    }
    let mut full = 0;
    let mut cover_vertices = 0;
    for t in 0..trials.max(1) {
        let fw = sample_framework(g, &mut trial_rng(seed, t))?;
        cover_vertices = fw.points.len();
        full = full.max(full_rank(&fw));
    }
    Ok(RigidityReport {
        k,
        comb_rigid: blocks.iter().all(|b| b.comb == Comb::Tight),
        blocks,
        cover_vertices,
        full_rank: full,
        rigid: full + trivial_total(cover_vertices) == 2 * cover_vertices,
        certified: counts_certified(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain_graph::gallery::gallery;
    use crate::lifting::lift;

    fn sample(g: &GainGraph, seed: u64) -> Framework {
        sample_framework(g, &mut trial_rng(seed, 0)).unwrap()
    }

    // Oracle: symmetric motions from an explicit real basis of the full motion
    // space, checked against the real rigidity matrix through a realified rank.
    fn oracle_rank(fw: &Framework, g: &GainGraph, j: u32) -> usize {
        let n = fw.points.len();
        let lay_dim = motion_dimension(g, j);
        let mut basis = DMatrix::from_element(2 * n, lay_dim, c(0.0));
        let mut col = 0;
        for (i, v) in g.vertices().iter().enumerate() {
            if v.kind == crate::gain_graph::VertexKind::Fixed {
                continue;
            }
            for axis in 0..2 {
                for t in 0..g.k() {
                    let x = fw.cover.vertex(i, t);
                    let r = g.group().rotation(t);
                    let phase = g.group().character(j, t).conj();
                    basis[(2 * x, col)] = phase * r[0][axis];
                    basis[(2 * x + 1, col)] = phase * r[1][axis];
                }
                col += 1;
            }
        }
        if let Some(v0) = g.fixed_vertex() {
            let x = fw.cover.vertex(v0, 0);
            for b in fixed_basis(g, j) {
                basis[(2 * x, col)] = b[0];
                basis[(2 * x + 1, col)] = b[1];
                col += 1;
            }
        }
        let r = rigidity_matrix(fw).map(c);
        let prod = r * basis;
        // Realify: rank over C of M equals half the real rank of [[Re, -Im], [Im, Re]].
        let (rows, cols) = prod.shape();
        let mut big = DMatrix::zeros(2 * rows, 2 * cols);
        for i in 0..rows {
            for jx in 0..cols {
                let z = prod[(i, jx)];
                big[(i, jx)] = z.re;
                big[(i, jx + cols)] = -z.im;
                big[(i + rows, jx)] = z.im;
                big[(i + rows, jx + cols)] = z.re;
            }
        }
        real_rank(&big) / 2
    }

    #[test]
    fn routes_agree_with_oracle() {
        for (name, k) in [
            ("figure1", 6),
            ("counterexample-fixed", 8),
            ("figure2a", 7),
            ("counterexample-loop", 10),
        ] {
            let g = gallery(name, k).unwrap();
            for seed in 0..3 {
                let fw = sample(&g, seed);
                for j in 0..k {
                    let r = orbit_rank(&fw, &g, j).unwrap();
                    assert_eq!(r.rank, oracle_rank(&fw, &g, j), "{name} j={j}");
                }
            }
        }
    }

    #[test]
    fn symmetric_ranks_sum_to_full_rank() {
        for (name, k) in [
            ("figure1", 6),
            ("counterexample-fixed", 8),
            ("looped-triangle", 5),
        ] {
            let g = gallery(name, k).unwrap();
            let fw = sample(&g, 11);
            let sum: usize = (0..k).map(|j| orbit_rank(&fw, &g, j).unwrap().rank).sum();
            assert_eq!(sum, full_rank(&fw), "{name}");
        }
    }

    #[test]
    fn counterexample_loop_has_one_extra_motion_at_half_turn() {
        let g = gallery("counterexample-loop", 8).unwrap();
        let fw = sample(&g, 3);
        let r4 = orbit_rank(&fw, &g, 4).unwrap();
        assert_eq!((r4.rank, r4.nullity, r4.trivial), (1, 1, 0));
        let r2 = orbit_rank(&fw, &g, 2).unwrap();
        assert_eq!((r2.rank, r2.nullity), (2, 0));
        assert_eq!(full_rank(&fw), 12);
        assert_eq!(lift(&g).vertices.len() * 2, 16);
    }

    #[test]
    fn half_turn_loop_row_vanishes_for_odd_j() {
        let mut g = gallery("spoke", 6).unwrap();
        g.add_edge(1, 1, 3).unwrap();
        let fw = sample(&g, 0);
        let m = orbit_matrix(&fw, &g, 3);
        assert!(m.row(1).iter().all(|z| z.norm() < 1e-12));
        assert!(m.row(1).iter().any(|_| true));
        let even = orbit_matrix(&fw, &g, 2);
        assert!(even.row(1).iter().any(|z| z.norm() > 1e-6));
    }

    #[test]
    fn lone_centre_is_isostatic_everywhere() {
        let g = gallery("fixed-vertex", 6).unwrap();
        let fw = sample(&g, 0);
        for j in 0..6 {
            assert!(orbit_rank(&fw, &g, j).unwrap().isostatic(), "j={j}");
        }
    }

    #[test]
    fn analyze_flags_the_half_turn_block() {
        let g = gallery("counterexample-loop", 8).unwrap();
        let rep = analyze(&g, 5, 0, None, &Limits::default()).unwrap();
        assert!(rep.comb_rigid && !rep.rigid && !rep.certified);
        assert_eq!(rep.full_rank, 2 * rep.cover_vertices - 4);
        let bad: Vec<u32> = rep
            .blocks
            .iter()
            .filter(|b| !b.agree)
            .map(|b| b.j)
            .collect();
        assert_eq!(bad, vec![4]);
    }

    #[test]
    fn analyze_can_report_one_block() {
        let g = gallery("figure1", 6).unwrap();
        let rep = analyze(&g, 3, 0, Some(3), &Limits::default()).unwrap();
        assert_eq!(rep.blocks.len(), 1);
        assert!(rep.blocks[0].to_line().starts_with("j=3 comb="));
        assert!(analyze(&g, 3, 0, Some(6), &Limits::default()).is_err());
    }

    #[test]
    fn lone_centre_agrees_everywhere() {
        let g = gallery("fixed-vertex", 6).unwrap();
        let rep = analyze(&g, 2, 0, None, &Limits::default()).unwrap();
        assert!(rep.agree() && rep.rigid && rep.comb_rigid);
    }

    #[test]
    fn cancelled_half_turn_block_has_rank_zero() {
        let mut g = gallery("single-loop", 6).unwrap();
        g = g.remove_edge(g.edges()[0].id).unwrap();
        g.add_edge(0, 0, 3).unwrap();
        for seed in 0..10 {
            let r = orbit_rank(&sample(&g, seed), &g, 1).unwrap();
            assert_eq!(r.rank, 0);
        }
    }
}
