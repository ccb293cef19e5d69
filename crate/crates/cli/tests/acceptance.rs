//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::time::Instant;

use congest_mwc::congest::{
    charge_sssp_cost, hop_bounded_bfs, modified_hop_bounded_bfs, sssp_round_bound, CostLedger,
};
use congest_mwc::cycles::{enumerate_cycles_bruteforce, exact_mwc, exact_mwc_weight};
use congest_mwc::graph::{bfs_hops, NodeId, PathRecord, WeightedGraph};
use congest_mwc::hard::{gen_high_girth_bipartite, gen_lower_bound_graph, moving_cut, verify_gap, Variant};
use congest_mwc::hop_sssp::{modified_bfs_based_sssp, Engine};
use congest_mwc::ldd::{check_ldd_properties, ldd, max_secondmax_gap_stat, radius_violations};
use congest_mwc::mwc::{approx_mwc, MwcConfig};
use congest_mwc::scaling::{graph_scaling, ratio};
use mwc_harness::{gen_random_graph, run_experiment, Cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn random_graph(rng: &mut ChaCha8Rng, n_range: std::ops::RangeInclusive<usize>, w: u64) -> WeightedGraph {
    let n = rng.random_range(n_range);
    let m = rng.random_range(0..=n * (n - 1) / 2);
    gen_random_graph(n, m, w, rng.random()).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..500 {
        let g = random_graph(&mut rng, 3..=10, 20);
        if exact_mwc_weight(&g) != enumerate_cycles_bruteforce(&g).unwrap() {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches == 0 && secs < 10.0;
    report(1, "exact oracle vs brute force", pass, &format!("500 graphs, {mismatches} mismatches, {secs:.2}s"));
    assert!(pass);
}

/// Trials per regime in the sandwich runs.
const SANDWICH_TRIAL_CAP: u64 = 3;

#[test]
fn criterion_02_approximation_sandwich() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for k_star in [1.0, 2.0, 3.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(2 + k_star as u64);
        let (mut within, mut above) = (0, 0);
        let mut worst: f64 = 1.0;
        for _ in 0..100 {
            let n = rng.random_range(30..=120);
            let m = rng.random_range(n..=3 * n);
            let w = rng.random_range(1..=32);
            let g = gen_random_graph(n, m, w, rng.random()).unwrap();
            let w_star = exact_mwc(&g).expect("m >= n forces a cycle").weight as f64;
            let mut cfg = MwcConfig::new(rng.random());
            cfg.trial_cap = Some(SANDWICH_TRIAL_CAP);
            let w_tilde = approx_mwc(&g, k_star, &cfg).unwrap().w_tilde().unwrap_or(f64::INFINITY);
            above += (w_tilde >= w_star) as u32;
            if w_tilde >= w_star && w_tilde <= (k_star + 1.0) * w_star {
                within += 1;
            }
            worst = worst.max(w_tilde / w_star);
        }
        pass &= within >= 95 && above == 100;
        lines.push(format!("k*={k_star}: {within}/100 in sandwich, {above}/100 >= w*, worst ratio {worst:.3}"));
    }
    let detail = format!("{} ({:.0}s)", lines.join("; "), start.elapsed().as_secs_f64());
    report(2, "approximation sandwich", pass, &detail);
    assert!(pass);
}

/// A fixed 40-node instance: a 40-cycle of weight-3 edges with random chords of weight 20..40.
fn ldd_instance() -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut g = WeightedGraph::new(40, false);
    for i in 0..40 {
        g.add_edge(i, (i + 1) % 40, 3).unwrap();
    }
    while g.m() < 70 {
        let (u, v) = (rng.random_range(0..40), rng.random_range(0..40));
        if u != v && g.edge_between(u, v).is_none() {
            g.add_edge(u, v, rng.random_range(20..=40)).unwrap();
        }
    }
    g
}

/// Per k: (property II hits, trials, radius violations, failed runs).
fn ldd_monte_carlo(k: f64) -> (u64, u64, usize, u64) {
    let g = ldd_instance();
    let cycle = exact_mwc(&g).unwrap();
    let d = cycle.weight as f64 / 2.0;
    let all: Vec<NodeId> = (0..g.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3 + k as u64);
    let trials = 10_000u64;
    let (mut hits, mut violations, mut failed) = (0, 0, 0);
    for _ in 0..trials {
        let out = ldd(&g, &all, k, d, &mut rng).unwrap();
        if out.failed() {
            failed += 1;
            continue;
        }
        violations += radius_violations(&out);
        // every clustered node, not only the sources
        let f = out.forest.as_ref().unwrap();
        let max = out.shifts.max_delta();
        violations += (0..g.n()).filter(|&v| f.dist[v].finite().is_some_and(|x| x as f64 > max)).count();
        let (_, p2) = check_ldd_properties(&g, k, d, &out, &cycle).unwrap();
        hits += p2 as u64;
    }
    (hits, trials, violations, failed)
}

#[test]
fn criterion_03_ldd_success_probability() {
    let mut pass = true;
    let mut lines = Vec::new();
    for k in [1.0, 2.0] {
        let (hits, trials, _, _) = ldd_monte_carlo(k);
        let p = 0.25 * 40f64.powf(-1.0 / k);
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let rate = hits as f64 / trials as f64;
        pass &= rate >= p - 3.0 * se;
        lines.push(format!("k={k}: rate {rate:.4} vs limit {:.4}", p - 3.0 * se));
    }
    report(3, "LDD property II frequency", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_04_radius_invariant() {
    let mut total = 0;
    let mut runs = 0;
    for k in [1.0, 2.0] {
        let (_, trials, violations, failed) = ldd_monte_carlo(k);
        total += violations;
        runs += trials - failed;
    }
    let pass = total == 0;
    report(4, "radius invariant", pass, &format!("{runs} non-failed runs, {total} violations"));
    assert!(pass);
}

#[test]
fn criterion_05_exponential_gap_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ln2 = std::f64::consts::LN_2;
    let zero = max_secondmax_gap_stat(10, 1.0, ln2, None, 100_000, &mut rng).unwrap();
    let offsets: Vec<f64> = (0..10).map(|_| rng.random_range(0.1..3.0)).collect();
    let shifted = max_secondmax_gap_stat(10, 1.0, ln2, Some(&offsets), 100_000, &mut rng).unwrap();
    let pass = (zero - 0.5).abs() <= 0.01 && shifted >= 0.49;
    report(5, "max/second-max gap", pass, &format!("zero offsets {zero:.4}, random offsets {shifted:.4}"));
    assert!(pass);
}

#[test]
fn criterion_06_scaling_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    for _ in 0..1000 {
        let hops = rng.random_range(1..=12);
        let mut g = WeightedGraph::new(hops + 1, false);
        for i in 0..hops {
            g.add_edge(i, i + 1, rng.random_range(1..=1000)).unwrap();
        }
        let p = PathRecord::from_nodes(&g, &(0..=hops).collect::<Vec<_>>()).unwrap();
        let gamma = ratio(rng.random_range(1..=200), rng.random_range(1..=200));
        let scaled = graph_scaling(&g, &gamma).unwrap();
        let len = ratio(scaled.lift_path(&g, &p).unwrap().hops() as i64, 1);
        let lower = ratio(p.weight as i64, 1) / &gamma;
        let upper = &lower + ratio(p.hops() as i64, 1);
        if !(lower <= len && len <= upper) {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(6, "scaling sandwich", pass, &format!("1000 (path, gamma) pairs, {violations} violations"));
    assert!(pass);
}

#[test]
fn criterion_07_boolean_records() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut mismatches, mut checked) = (0, 0);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 4..=20, 1);
        let s = rng.random_range(0..g.n());
        let r = rng.random_range(1..=6);
        let marked: Vec<bool> = (0..g.m()).map(|_| rng.random()).collect();
        let mut ledger = CostLedger::new(g.m());
        let t = modified_hop_bounded_bfs(&g, s, r, &marked, &mut ledger, "records");
        // central oracle: BFS layers, parent = smallest-id neighbour one layer up
        let hops = bfs_hops(&g, s);
        for u in 0..g.n() {
            let Some(h) = hops[u].filter(|&h| h as u64 <= r) else { continue };
            checked += 1;
            let expected = if u == s {
                g.links(s).iter().any(|&(_, e)| marked[e])
            } else {
                let (mut x, mut level, mut all) = (u, h, true);
                while level > 0 {
                    let p = g.links(x).into_iter().map(|(y, _)| y).filter(|&y| hops[y] == Some(level - 1)).min().unwrap();
                    all &= marked[g.edge_between(x, p).unwrap()];
                    x = p;
                    level -= 1;
                }
                all
            };
            if t.record[u] != Some(expected) {
                mismatches += 1;
            }
        }
    }
    let pass = mismatches == 0;
    report(7, "boolean records", pass, &format!("200 instances, {checked} reached nodes, {mismatches} mismatches"));
    assert!(pass);
}

fn hard_sweep() -> (usize, usize, usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut instances, mut gap_fail, mut count_fail) = (0, 0, 0);
    let mut diameters = Vec::new();
    for variant in [Variant::UndirectedWeighted, Variant::DirectedUnweighted] {
        for gamma in [2, 3] {
            for p in [1, 2] {
                let h = gen_high_girth_bipartite(gamma, 1, &mut rng).unwrap();
                let mut seen = std::collections::BTreeSet::new();
                for _ in 0..100 {
                    let x: Vec<bool> = (0..h.edges.len()).map(|_| rng.random()).collect();
                    let y: Vec<bool> = (0..h.edges.len()).map(|_| rng.random()).collect();
                    let inst = gen_lower_bound_graph(gamma, 1, 2, p, &h, &x, &y, variant).unwrap();
                    instances += 1;
                    gap_fail += !verify_gap(&inst).gap_ok as usize;
                    count_fail += (inst.graph.n() != 2 * gamma * 2usize.pow(p) + 2usize.pow(p + 1) - 1) as usize;
                    seen.insert(inst.diameter());
                }
                diameters.push(format!("gamma={gamma} p={p} {variant:?}: measured {seen:?}, closed form {}", 2 * p + 2));
            }
        }
    }
    (instances, gap_fail, count_fail, diameters)
}

#[test]
fn criterion_08_hard_instance_gap_and_node_count() {
    let (instances, gap_fail, count_fail, _) = hard_sweep();
    let pass = gap_fail == 0 && count_fail == 0;
    report(
        8,
        "hard-instance gap and node count",
        pass,
        &format!("{instances} instances, {gap_fail} gap failures, {count_fail} node-count mismatches"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_hard_instance_diameter_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut mismatches = Vec::new();
    for variant in [Variant::UndirectedWeighted, Variant::DirectedUnweighted] {
        for gamma in [2, 3] {
            for p in [1u32, 2] {
                let h = gen_high_girth_bipartite(gamma, 1, &mut rng).unwrap();
                for _ in 0..100 {
                    let x: Vec<bool> = (0..h.edges.len()).map(|_| rng.random()).collect();
                    let y: Vec<bool> = (0..h.edges.len()).map(|_| rng.random()).collect();
                    let inst = gen_lower_bound_graph(gamma, 1, 2, p, &h, &x, &y, variant).unwrap();
                    let (got, want) = (inst.diameter(), 2 * p as usize + 2);
                    if got != want {
                        mismatches.push((gamma, p, got, want));
                    }
                }
            }
        }
    }
    mismatches.sort();
    mismatches.dedup();
    let pass = mismatches.is_empty();
    report(8, "hard-instance diameter equals 2p+2", pass, &format!("(gamma, p, measured, closed form) mismatches: {mismatches:?}"));
    assert!(pass, "measured diameters differ from 2p+2: {mismatches:?}");
}

#[test]
fn criterion_09_moving_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let combos = [(2, 1, 2, 1), (3, 1, 2, 1), (4, 1, 2, 1), (2, 1, 2, 2), (3, 1, 2, 2), (4, 2, 2, 2), (2, 1, 3, 1), (3, 1, 3, 2), (2, 1, 2, 3), (3, 2, 2, 3)];
    let mut lines = Vec::new();
    let mut pass = true;
    for (gamma, k, d, p) in combos {
        let h = gen_high_girth_bipartite(gamma, k, &mut rng).unwrap();
        let ones = vec![true; h.edges.len()];
        let inst = gen_lower_bound_graph(gamma, k, d, p, &h, &ones, &ones, Variant::UndirectedWeighted).unwrap();
        let cut = moving_cut(&inst).unwrap();
        let e_h = h.edges.len() as i64;
        let bound = ((d as f64).powi(p as i32)).min(e_h as f64 / (d as f64 * p as f64));
        let distance = cut.distance.numer().to_string().parse::<f64>().unwrap()
            / cut.distance.denom().to_string().parse::<f64>().unwrap();
        let ok = cut.capacity == ratio(e_h, 1) && distance >= 0.5 * bound;
        pass &= ok;
        lines.push(format!("({gamma},{k},{d},{p}) cap {} dist {distance:.3} bound {bound:.3}", cut.capacity));
    }
    report(9, "moving-cut capacity and distance", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_10_congestion_accounting() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut bfs_bad, mut sssp_bad, mut model_bad) = (0, 0, 0);
    for _ in 0..100 {
        let g = random_graph(&mut rng, 4..=16, 12);
        let s = rng.random_range(0..g.n());
        let mut ledger = CostLedger::new(g.m());
        hop_bounded_bfs(&g, s, rng.random_range(1..=8), &mut ledger, "bfs");
        let phase = ledger.phase("bfs").unwrap();
        bfs_bad += (0..g.m()).filter(|&e| phase.channel_messages[2 * e] + phase.channel_messages[2 * e + 1] > 2).count();

        let sources: Vec<NodeId> = (0..g.n()).filter(|_| rng.random::<f64>() < 0.4).collect();
        let marked: Vec<bool> = (0..g.m()).map(|_| rng.random()).collect();
        let engine = if rng.random() { Engine::Faithful } else { Engine::Condensed };
        let mut ledger = CostLedger::new(g.m());
        let res = modified_bfs_based_sssp(&g, &sources, rng.random_range(1..=4), 1.0, &marked, engine, &mut ledger).unwrap();
        if let Some(phase) = ledger.phase("modified_hop_sssp") {
            let bound = (sources.len() * res.grid.iterations()) as u64;
            sssp_bad += phase.channel_messages.iter().filter(|&&c| c > bound).count();
        }

        let n = rng.random_range(1..100_000);
        let diameter = rng.random_range(0..1000);
        let t = sssp_round_bound(n, diameter);
        let q = rng.random_range(1.0..=t);
        let (dil, cong) = charge_sssp_cost(n, diameter, q).unwrap();
        model_bad += ((dil * cong - t * t).abs() > 1e-9 * t * t) as usize;
    }
    let pass = bfs_bad == 0 && sssp_bad == 0 && model_bad == 0;
    report(
        10,
        "congestion accounting",
        pass,
        &format!("bfs edges over 2: {bfs_bad}; sssp channels over |S|*iterations: {sssp_bad}; cost identity failures: {model_bad}"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.txt");
    std::fs::write(&tri, "4 5 undirected\n0 1 2\n1 2 3\n2 0 4\n2 3 1\n3 0 1\n").unwrap();
    let configs: Vec<Vec<String>> = [
        vec!["--mode", "approx", "--random", "40,90,16", "--trials", "2", "--runs", "3"],
        vec!["--mode", "approx", "--graph", tri.to_str().unwrap(), "--trials", "4"],
        vec!["--mode", "ldd-stats", "--random", "30,60,5", "--trials", "500", "--ldd-k", "2"],
        vec!["--mode", "hard-gap", "--hard", "3,1,2,2,directed", "--trials", "20"],
        vec!["--mode", "moving-cut", "--hard", "3,2,2,2,weighted", "--runs", "3"],
        vec!["--mode", "cost-model", "--n", "500", "--diameter", "12", "--q", "1,3,9"],
    ]
    .into_iter()
    .map(|a| a.into_iter().map(String::from).chain(["--seed".into(), "11".into()]).collect())
    .collect();
    let mut identical = 0;
    for args in &configs {
        let cfg = <Cli as clap::Parser>::try_parse_from(std::iter::once("congest-mwc".to_string()).chain(args.iter().cloned()))
            .unwrap()
            .validate()
            .unwrap();
        let first = run_experiment(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let second = pool.install(|| run_experiment(&cfg)).unwrap();
        identical += (first.body == second.body && first.render() == second.render()) as usize;
    }
    let pass = identical == configs.len();
    report(11, "determinism", pass, &format!("{identical}/{} configurations byte-identical on rerun", configs.len()));
    assert!(pass);
}
