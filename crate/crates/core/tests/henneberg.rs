use proptest::prelude::*;
use symrigid::classify::alpha;
use symrigid::gain_graph::gallery::gallery;
use symrigid::gain_graph::GainGraph;
use symrigid::henneberg::*;
use symrigid::lifting::trial_rng;
use symrigid::rigidity::generic_orbit_rank;
use symrigid::sparsity::{check, CountSpec, Limits};

fn grown(k: u32, j: u32, steps: usize, centre: bool, seed: u64) -> Option<GainGraph> {
    let mut rng = trial_rng(seed, u64::from(k) * 100 + u64::from(j));
    grow_random(k, j, steps, centre, &mut rng, &Limits::default())
        .ok()
        .map(|(g, _)| g)
}

fn tight(g: &GainGraph, j: u32) -> bool {
    check(g, CountSpec::Zkj { j }).unwrap().tight
}

#[test]
fn grown_graphs_are_tight() {
    for k in [4, 5, 6, 7, 9] {
        for j in 2..=k - 2 {
            for seed in 0..3 {
                if let Some(g) = grown(k, j, 4, seed % 2 == 0, seed) {
                    assert!(tight(&g, j), "k={k} j={j} seed={seed}");
                }
            }
        }
    }
}

#[test]
fn guarded_extensions_keep_isostatic_blocks() {
    let limits = Limits::default();
    let mut checked = 0;
    for seed in 0..40u64 {
        for (k, j) in [(5, 2), (6, 3), (7, 3), (9, 4), (4, 2)] {
            let mut rng = trial_rng(seed, 7);
            let Ok((g, _)) = grow_random(k, j, 2, seed % 3 == 0, &mut rng, &limits) else {
                continue;
            };
            let Some((m, h)) = random_extension(&g, j, &mut rng, &limits).unwrap() else {
                continue;
            };
            let before = generic_orbit_rank(&g, j, 20, seed).unwrap();
            let after = generic_orbit_rank(&h, j, 20, seed).unwrap();
            assert!(before.isostatic(), "base not isostatic k={k} j={j}");
            assert!(after.isostatic(), "{m} broke isostaticity at k={k} j={j}");
            checked += 1;
        }
    }
    assert!(checked >= 50, "only {checked} triples");
}

#[test]
fn certificates_replay_and_stay_tight() {
    let limits = Limits::default();
    for k in [5, 7, 9] {
        for j in 2..=k - 2 {
            for seed in 0..4 {
                let Some(g) = grown(k, j, 5, seed % 2 == 1, seed) else {
                    continue;
                };
                let cert = reduce_to_base(&g, j, &limits).unwrap();
                assert_ne!(
                    cert.terminal,
                    Terminal::SpecialCase,
                    "odd k never reaches the special case"
                );
                let mut cur = cert.terminal_graph.clone().unwrap();
                assert!(tight(&cur, j));
                for step in cert.steps.iter().rev() {
                    assert_eq!(cur.canonical_hash(), step.hash);
                    cur = apply_extension(&cur, &step.extension).unwrap();
                    assert!(tight(&cur, j));
                }
                assert_eq!(cur.canonical_hash(), cert.input_hash);
            }
        }
    }
}

#[test]
fn base_graphs_reduce_to_themselves() {
    for (name, k, j) in [
        ("double-loop", 7, 2),
        ("looped-triangle", 5, 2),
        ("five-vertex", 7, 3),
        ("fixed-vertex", 6, 3),
    ] {
        let g = gallery(name, k).unwrap();
        let cert = reduce_to_base(&g, j, &Limits::default()).unwrap();
        assert!(cert.steps.is_empty(), "{name}");
        assert_eq!(cert.terminal, Terminal::Base(name.to_string()));
    }
}

#[test]
fn counterexamples_are_refused_outside_the_regime() {
    let g = gallery("counterexample-loop", 8).unwrap();
    assert!(reduce_to_base(&g, 4, &Limits::default()).is_err());
    let search = find_reduction(&g, 4, &Limits::default()).unwrap();
    assert!(matches!(search.found, Found::Absent));
}

#[test]
fn figure4b_stops_at_the_special_case() {
    let g = gallery("figure4b", 6).unwrap();
    let cert = reduce_to_base(&g, 3, &Limits::default()).unwrap();
    assert_eq!(cert.terminal, Terminal::SpecialCase);
    assert!(cert.steps.iter().all(|s| s.extension.kind() == "ext1"));
}

// A rejected 1-reduction is blocked by H with |E(H)| = 2|V(H)| - 3 + alpha(H + e),
// where H spans both ends of e. Non-empty blockers are rare among grown graphs, so this sweeps a fixed range.
#[test]
fn rejections_carry_blockers() {
    let mut seen = 0;
    for seed in 0..500u64 {
        for (k, j) in [(5, 2), (7, 2), (7, 3), (6, 2), (6, 3), (9, 4)] {
            let Some(g) = grown(k, j, 4, seed % 2 == 0, seed) else {
                continue;
            };
            for r in find_reduction(&g, j, &Limits::default()).unwrap().rejected {
                assert!(!tight(&r.candidate, j));
                if r.blocker.is_empty() {
                    continue;
                }
                let mut with_e = r.blocker.clone();
                with_e.push(r.added);
                let he = r.candidate.edge_subgraph(&with_e).unwrap();
                let rhs = 2 * he.vertex_count() as i64 - 3 + i64::from(alpha(&he, j).unwrap());
                assert_eq!(
                    r.blocker.len() as i64,
                    rhs,
                    "blocker at {} k={k} j={j} seed={seed}",
                    r.at
                );
                seen += 1;
            }
        }
    }
    assert!(seen > 0, "sweep produced no non-empty blocker");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reductions_invert_their_extension(seed in 0u64..500, pick in 0usize..4) {
        let (k, j) = [(5, 2), (7, 3), (6, 3), (4, 2)][pick];
        let Some(g) = grown(k, j, 3, seed % 2 == 0, seed) else { return Ok(()) };
        if let Found::Reduction(r) = find_reduction(&g, j, &Limits::default()).unwrap().found {
            prop_assert!(tight(&r.reduced, j));
            prop_assert!(apply_extension(&r.reduced, &r.extension).unwrap().same_as(&g));
        }
    }
}
