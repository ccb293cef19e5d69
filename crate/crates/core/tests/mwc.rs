mod common;

use common::{arb_graph, build};
use congest_mwc::cycles::exact_mwc;
use congest_mwc::graph::{parse_graph, NodeId, WeightedGraph};
use congest_mwc::hop_sssp::{scaled_len, Engine};
use congest_mwc::ldd::{mssp_tree, Perturbation, ShiftAssignment};
use congest_mwc::mwc::{
    approx_mwc, classify_segments, cycle_in_walk, detect, scaled_forest, MwcConfig, MwcParams, SegmentType,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn capped(seed: u64, cap: u64) -> MwcConfig {
    let mut cfg = MwcConfig::new(seed);
    cfg.trial_cap = Some(cap);
    cfg
}

/// Central segment classification relative to the cluster of the first
/// skeleton node on the cycle.
fn central_segments(g: &WeightedGraph, center: &[Option<NodeId>], tree: &[bool], cycle: &[NodeId], skeleton: &[NodeId]) -> Vec<SegmentType> {
    let len = cycle.len();
    let marks: Vec<usize> = (0..len).filter(|&i| skeleton.contains(&cycle[i])).collect();
    let Some(&first) = marks.first() else { return Vec::new() };
    let c = center[cycle[first]];
    let mut out = Vec::new();
    for (j, &a) in marks.iter().enumerate() {
        let b = if j + 1 < marks.len() { marks[j + 1] } else { marks[0] + len };
        let nodes: Vec<NodeId> = (a..=b).map(|i| cycle[i % len]).collect();
        let edges: Vec<usize> = nodes.windows(2).map(|w| g.edge_between(w[0], w[1]).unwrap()).collect();
        let inside = c.is_some() && nodes.iter().all(|&v| center[v] == c);
        let all_tree = edges.iter().all(|&e| tree[e]);
        out.push(if inside && all_tree {
            SegmentType::Tree
        } else if inside {
            SegmentType::Closing
        } else {
            SegmentType::Other
        });
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimates_never_undershoot(g in arb_graph(12, 26, 16, false), seed in any::<u64>(), k_star in 1.0f64..3.0) {
        let r = approx_mwc(&g, k_star, &capped(seed, 2)).unwrap();
        match (exact_mwc(&g), &r.best) {
            (None, best) => prop_assert!(best.is_none()),
            (Some(c), Some(best)) => {
                prop_assert!(best.w_tilde >= c.weight as f64);
                let found = best.validate(&g).unwrap();
                prop_assert!(found.weight >= c.weight);
                prop_assert!(found.weight as f64 <= best.w_tilde);
            }
            (Some(_), None) => {}
        }
        prop_assert_eq!(r.radius_violations, 0);
    }

    #[test]
    fn engines_build_the_same_forest(g in arb_graph(9, 16, 6, false), seed in any::<u64>(), gamma_idx in 0usize..3) {
        let gamma = [0.5, 1.0, 2.5][gamma_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<NodeId> = (0..g.n()).collect();
        let shifts = ShiftAssignment::draw(&nodes, 1.0, 4.0, &mut rng).unwrap();
        prop_assume!(!shifts.failed());
        let lens: Vec<u64> = g.edges().iter().map(|e| scaled_len(e.w, gamma)).collect();
        let unit_keys: Vec<u128> = (0..lens.iter().sum::<u64>()).map(|_| rng.random_range(1..1u64 << 32) as u128).collect();
        let mut base_keys = Vec::with_capacity(g.m());
        let mut at = 0usize;
        for &l in &lens {
            base_keys.push(unit_keys[at..at + l as usize].iter().sum());
            at += l as usize;
        }
        let faithful = scaled_forest(&g, gamma, &shifts, &Perturbation::from_keys(unit_keys), Engine::Faithful).unwrap();
        let condensed = scaled_forest(&g, gamma, &shifts, &Perturbation::from_keys(base_keys), Engine::Condensed).unwrap();
        prop_assert_eq!(&faithful.center, &condensed.center);
        prop_assert_eq!(&faithful.dist, &condensed.dist);
        prop_assert_eq!(&faithful.parent, &condensed.parent);
        prop_assert_eq!(&faithful.tree, &condensed.tree);
        prop_assert_eq!(faithful.rounds, condensed.rounds);
        prop_assert_eq!(&faithful.channel_messages, &condensed.channel_messages);
    }

    #[test]
    fn detected_value_covers_its_cycle(g in arb_graph(10, 22, 10, false), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<NodeId> = (0..g.n()).collect();
        let shifts = ShiftAssignment::draw(&nodes, 1.0, 6.0, &mut rng).unwrap();
        prop_assume!(!shifts.failed());
        let gamma = 0.75;
        let forest = scaled_forest(&g, gamma, &shifts, &Perturbation::random(g.m(), &mut rng), Engine::Condensed).unwrap();
        if let Some((value, e)) = detect(&g, &forest, gamma) {
            let w_star = exact_mwc(&g).unwrap().weight as f64;
            prop_assert!(value >= w_star);
            prop_assert!(!forest.tree[e]);
        }
    }

    #[test]
    fn segments_match_central_classification(g in arb_graph(12, 26, 8, false), seed in any::<u64>(), p in 0.2f64..0.9) {
        let Some(cycle) = exact_mwc(&g) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let skeleton: Vec<NodeId> = (0..g.n()).filter(|_| rng.random::<f64>() < p).collect();
        prop_assume!(!skeleton.is_empty());
        let shifts = ShiftAssignment::draw(&skeleton, 1.0, cycle.weight as f64 / 2.0, &mut rng).unwrap();
        prop_assume!(!shifts.failed());
        let forest = mssp_tree(&g, &shifts.start_ticks(), &Perturbation::random(g.m(), &mut rng));
        let tree = forest.tree_edge_mask(g.m());
        let got = classify_segments(&g, &forest, &cycle.nodes, &skeleton);
        prop_assert_eq!(&got, &central_segments(&g, &forest.center, &tree, &cycle.nodes, &skeleton));
        let on_cycle: Vec<NodeId> = cycle.nodes.iter().copied().filter(|v| skeleton.contains(v)).collect();
        prop_assert_eq!(got.len(), on_cycle.len());
        // a cycle cannot lie inside one tree
        if !got.is_empty() {
            prop_assert!(got.iter().any(|&s| s != SegmentType::Tree));
        }
    }
}

#[test]
fn same_seed_same_result() {
    let raw: Vec<(usize, usize, u64)> = (0..40).map(|i| (i * 7 % 23, (i * 11 + 3) % 23, 1 + i as u64 % 9)).collect();
    let g = build(23, false, &raw);
    let run = || {
        let r = approx_mwc(&g, 2.0, &capped(99, 3)).unwrap();
        (r.w_tilde(), r.best.map(|b| (b.regime, b.trial, b.witness)), r.ldd_runs, r.ledger.to_csv())
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(run);
    assert_eq!(one, three);
}

#[test]
fn cycle_graph_is_found_exactly() {
    let mut text = String::from("6 6 undirected\n");
    for i in 0..6 {
        text.push_str(&format!("{} {} {}\n", i, (i + 1) % 6, i + 1));
    }
    let g = parse_graph(&text).unwrap();
    let r = approx_mwc(&g, 1.0, &capped(3, 30)).unwrap();
    let w = r.w_tilde().unwrap();
    assert!((21.0..=42.0).contains(&w), "{w}");
    assert_eq!(r.best.unwrap().validate(&g).unwrap().weight, 21);
}

#[test]
fn witness_walk_reduces_to_cycle() {
    let g = parse_graph("5 6 undirected\n0 1 1\n1 2 1\n2 0 1\n2 3 1\n3 4 1\n4 2 1\n").unwrap();
    // figure eight through node 2 with a doubled spur
    let walk = vec![0, 1, 2, 3, 4, 2, 0];
    let c = cycle_in_walk(&g, &walk).unwrap();
    assert_eq!(c.weight, 3);
    assert!(cycle_in_walk(&g, &[0, 1, 0]).is_none());
}

#[test]
fn params_follow_the_balancing_rule() {
    let p = MwcParams::new(1000, 10, 2.0, None, None).unwrap();
    let eps = 2.0 / 1000f64.log2();
    assert!((p.eps - eps).abs() < 1e-12);
    let k = (1.0 - eps) * (2.0 - eps);
    assert!((p.k - k).abs() < 1e-12);
    assert!((p.alpha - 1000f64.powf(k / (2.0 * k + 1.0))).abs() < 1e-9);
    assert!((p.h0 - 10.0 * 1000.0 * 1000f64.ln() / p.alpha).abs() < 1e-6);
    assert_eq!(p.pair_hops, (2.0 * p.h0).ceil() as u64);
    assert!(MwcParams::new(1000, 10, 2.0, Some(0.5), None).is_err());
    assert!(MwcParams::new(1000, 10, 2.0, None, Some(0.01)).is_err());
    assert!(MwcParams::new(1000, 10, 0.5, None, None).is_err());
}

#[test]
fn segment_cases_when_skeleton_shares_a_cluster() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut closing, mut single_other) = (0, 0, 0);
    for _ in 0..3000 {
        let n = rng.random_range(5..14);
        let raw: Vec<(usize, usize, u64)> =
            (0..2 * n).map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(1..10))).collect();
        let g = build(n, false, &raw);
        let Some(cycle) = exact_mwc(&g) else { continue };
        let skeleton: Vec<NodeId> = (0..n).filter(|_| rng.random::<f64>() < 0.5).collect();
        if skeleton.is_empty() {
            continue;
        }
        let shifts = ShiftAssignment::draw(&skeleton, 1.0, cycle.weight as f64 / 2.0, &mut rng).unwrap();
        if shifts.failed() {
            continue;
        }
        let forest = mssp_tree(&g, &shifts.start_ticks(), &Perturbation::random(g.m(), &mut rng));
        let on_cycle: Vec<NodeId> = cycle.nodes.iter().copied().filter(|v| skeleton.contains(v)).collect();
        if on_cycle.is_empty() || on_cycle.iter().any(|&v| forest.center[v] != forest.center[on_cycle[0]]) {
            continue;
        }
        let segs = classify_segments(&g, &forest, &cycle.nodes, &skeleton);
        checked += 1;
        if segs.contains(&SegmentType::Closing) {
            closing += 1;
        } else {
            let others = segs.iter().filter(|&&s| s == SegmentType::Other).count();
            assert_eq!(others, 1, "segments {segs:?} on cycle {:?}", cycle.nodes);
            single_other += 1;
        }
    }
    assert!(checked > 300 && closing > 0 && single_other > 0, "{checked} {closing} {single_other}");
}
