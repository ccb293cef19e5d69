use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use congest_mwc::congest::{charge_sssp_cost, sssp_round_bound, CostLedger, CostModelError};
use congest_mwc::cycles::exact_mwc;
use congest_mwc::graph::{hop_diameter, load_graph, GraphError, WeightedGraph};
use congest_mwc::hard::{
    bits_to_hex, gen_high_girth_bipartite, gen_lower_bound_graph, moving_cut, verify_gap, HardError, HardInstance,
    Variant,
};
use congest_mwc::hop_sssp::Engine;
use congest_mwc::ldd::{check_ldd_properties, ldd, log_size, property_bound, radius_violations, LddError};
use congest_mwc::mwc::{approx_mwc, MwcConfig, MwcError, MwcParams, PairCache};
use num_traits::ToPrimitive;

use crate::config::{config_err, ConfigError, EngineChoice, ExperimentConfig, GraphSource, Mode};
use crate::random::{gen_random_graph, RandomGraphError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("cannot read graph: {0}")]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Mwc(MwcError),
    #[error(transparent)]
    Hard(#[from] HardError),
    #[error(transparent)]
    Ldd(#[from] LddError),
    #[error(transparent)]
    Random(#[from] RandomGraphError),
}

impl HarnessError {
    /// 2 for bad input, 3 for a violated invariant, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Graph(_) | HarnessError::Random(_) => 2,
            HarnessError::Invariant(_) => 3,
            _ => 1,
        }
    }
}

impl From<MwcError> for HarnessError {
    fn from(e: MwcError) -> Self {
        match e {
            MwcError::BadAlpha { .. } => config_err("alpha", e.to_string()).into(),
            MwcError::BadEps { .. } => config_err("eps", e.to_string()).into(),
            MwcError::BadKStar(_) => config_err("kstar", e.to_string()).into(),
            other => HarnessError::Mwc(other),
        }
    }
}

/// A metadata header and the CSV body.
#[derive(Clone, Debug)]
pub struct Report {
    pub metadata: Value,
    pub body: String,
}

impl Report {
    /// `# <metadata json>` on the first line, then the CSV.
    pub fn render(&self) -> String {
        format!("# {}\n{}", self.metadata, self.body)
    }
}

/// Per-run seed derived from the master seed by a counter: stream `tag`, word `run`.
pub fn derive_seed(master: u64, tag: u64, run: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(tag);
    rng.set_word_pos(2 * run as u128);
    rng.next_u64()
}

const GRAPH_STREAM: u64 = 1;
const ALGO_STREAM: u64 = 2;
const INSTANCE_STREAM: u64 = 3;

fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::DirectedUnweighted => "directed",
        Variant::UndirectedWeighted => "weighted",
    }
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs one experiment. Rows come out in run order whatever the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let (constants, body) = match cfg.mode {
        Mode::Approx => approx(cfg)?,
        Mode::LddStats => ldd_stats(cfg)?,
        Mode::HardGap => hard_gap(cfg)?,
        Mode::MovingCut => moving_cut_mode(cfg)?,
        Mode::CostModel => cost_model(cfg)?,
    };
    let metadata = json!({
        "config": cfg,
        "constants": constants,
    });
    Ok(Report { metadata, body })
}

/// Writes the report to `cfg.out`, or returns it for stdout when unset.
pub fn write_report(cfg: &ExperimentConfig, report: &Report) -> Result<Option<String>, HarnessError> {
    let text = report.render();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn graph_for_run(cfg: &ExperimentConfig, run: u64) -> Result<(WeightedGraph, Option<HardInstance>), HarnessError> {
    let seed = derive_seed(cfg.seed, GRAPH_STREAM, run);
    match cfg.source.as_ref().expect("validated") {
        GraphSource::File { path } => Ok((load_graph(path)?, None)),
        GraphSource::Random { n, m, max_weight } => Ok((gen_random_graph(*n, *m, *max_weight, seed)?, None)),
        &GraphSource::Hard { gamma, k, d, p, variant } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(gamma, k, d, p, variant, &mut rng, None)?;
            Ok((inst.graph.clone(), Some(inst)))
        }
    }
}

/// Random `H` and random inputs; with `disjoint = Some(true)` the inputs
/// share no one, with `Some(false)` they share at least one.
fn random_instance<R: Rng>(
    gamma: usize,
    k: usize,
    d: u64,
    p: u32,
    variant: Variant,
    rng: &mut R,
    disjoint: Option<bool>,
) -> Result<HardInstance, HardError> {
    let h = gen_high_girth_bipartite(gamma, k, rng)?;
    let len = h.edges.len();
    let x: Vec<bool> = (0..len).map(|_| rng.random()).collect();
    let mut y: Vec<bool> = (0..len).map(|_| rng.random()).collect();
    match disjoint {
        Some(true) => y.iter_mut().zip(&x).for_each(|(b, &a)| *b &= !a),
        Some(false) if len > 0 && !x.iter().zip(&y).any(|(&a, &b)| a && b) => {
            let i = rng.random_range(0..len);
            let mut x = x;
            x[i] = true;
            y[i] = true;
            return gen_lower_bound_graph(gamma, k, d, p, &h, &x, &y, variant);
        }
        _ => {}
    }
    gen_lower_bound_graph(gamma, k, d, p, &h, &x, &y, variant)
}

fn export_instance(dir: &Path, name: &str, inst: &HardInstance) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.txt")), inst.graph.to_edge_list())?;
    let sidecar = serde_json::to_string_pretty(&inst.sidecar()).expect("sidecar serialises");
    std::fs::write(dir.join(format!("{name}.json")), sidecar)?;
    Ok(())
}

fn approx_constants(g: &WeightedGraph, params: &MwcParams, cfg: &MwcConfig) -> Result<Value, MwcError> {
    let diameter = hop_diameter(g).0;
    let short_scale = params.short_ldd_scale();
    let short_grid = params.short_grid();
    let long_grid = params.long_grid();
    let expected_skeleton = (params.skeleton_prob * params.n as f64).max(1.0);
    let cache = PairCache::new(g, params)?;
    let pair_grid = cache.grid();
    Ok(json!({
        "log_convention": "ln = natural log, log2 = binary log",
        "n": params.n,
        "max_weight": params.max_weight,
        "diameter": diameter,
        "k_star": params.k_star,
        "eps": params.eps,
        "k": params.k,
        "alpha": params.alpha,
        "h0": params.h0,
        "sssp_round_bound": sssp_round_bound(params.n, diameter),
        "short": {
            "lambda": params.short_step,
            "sigma": params.short_step,
            "eps1": params.k / (params.k + 1.0) / log_size(params.n),
            "ldd_scale": short_scale,
            "beta": log_size(params.n) / (params.k * short_scale),
            "horizon": 100.0 * params.k * short_scale,
            "levels": short_grid.len(),
            "d_grid": short_grid,
            "gamma_grid": short_grid.iter().map(|&d| params.short_gamma(d)).collect::<Vec<_>>(),
            "trials_nominal": params.short_trials_nominal,
            "trials": params.short_trials(cfg.trial_cap),
        },
        "long": {
            "lambda": params.long_step,
            "sigma": params.long_step,
            "skeleton_prob": params.skeleton_prob,
            "eps1_expected_skeleton": params.k / (params.k + 1.0) / log_size(expected_skeleton as usize),
            "beta_grid": long_grid.iter().map(|&d| log_size(expected_skeleton as usize) / (params.k * d)).collect::<Vec<_>>(),
            "horizon_grid": long_grid.iter().map(|&d| 100.0 * params.k * d).collect::<Vec<_>>(),
            "levels": long_grid.len(),
            "d_grid": long_grid,
            "pair_hops": params.pair_hops,
            "pair_scaled_hops": pair_grid.scaled_hop_bound,
            "pair_gamma_grid": pair_grid.gammas,
            "trials_nominal": params.long_trials_nominal,
            "trials": params.long_trials(cfg.trial_cap),
        },
    }))
}

fn ledger_totals(ledger: &CostLedger) -> (f64, f64, f64) {
    let labels = ledger.all_labels();
    if labels.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    (
        ledger.dilation(&labels).unwrap_or(0.0),
        ledger.congestion(&labels).unwrap_or(0.0),
        ledger.scheduled_cost(&labels).unwrap_or(0.0),
    )
}

fn approx(cfg: &ExperimentConfig) -> Result<(Value, String), HarnessError> {
    let header = [
        "run",
        "seed",
        "n",
        "m",
        "W",
        "k_star",
        "alpha",
        "regime",
        "w_star",
        "w_tilde",
        "ratio",
        "trials_run",
        "failed_trials",
        "measured_dilation",
        "measured_congestion",
        "scheduled_cost",
    ];
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for run in 0..cfg.runs {
        let (g, _) = graph_for_run(cfg, run)?;
        if g.is_directed() {
            return Err(config_err("graph", "the approximation needs an undirected graph").into());
        }
        let mut mcfg = MwcConfig::new(derive_seed(cfg.seed, ALGO_STREAM, run));
        mcfg.trial_cap = cfg.trials;
        mcfg.alpha = cfg.alpha;
        mcfg.eps = cfg.eps;
        mcfg.engine = match cfg.engine {
            EngineChoice::Condensed => Engine::Condensed,
            EngineChoice::Faithful => Engine::Faithful,
        };
        let base = vec![
            run.to_string(),
            cfg.seed.to_string(),
            g.n().to_string(),
            g.m().to_string(),
            g.max_weight().to_string(),
            fmt_f(cfg.k_star),
        ];
        let Some(w_star) = exact_mwc(&g).map(|c| c.weight) else {
            constants.push(json!({ "run": run, "note": "acyclic, no trials run" }));
            let mut row = base;
            row.extend(["", "none", "inf", "inf", "", "0", "0", "0", "0", "0"].map(String::from));
            rows.push(row);
            continue;
        };
        let result = approx_mwc(&g, cfg.k_star, &mcfg)?;
        if let Some(params) = &result.params {
            let mut c = approx_constants(&g, params, &mcfg)?;
            c["run"] = json!(run);
            c["algorithm_seed"] = json!(mcfg.seed);
            constants.push(c);
        } else {
            constants.push(json!({ "run": run, "note": "fewer than 3 nodes, no trials run" }));
        }
        if result.radius_violations > 0 {
            return Err(HarnessError::Invariant(format!(
                "run {run}: {} clustered sources lie beyond the largest shift",
                result.radius_violations
            )));
        }
        let w_tilde = result.w_tilde().unwrap_or(f64::INFINITY);
        if let Some(best) = &result.best {
            if w_tilde < w_star as f64 {
                return Err(HarnessError::Invariant(format!("run {run}: estimate {w_tilde} below the minimum {w_star}")));
            }
            if best.validate(&g).is_none() {
                return Err(HarnessError::Invariant(format!("run {run}: witness walk holds no cycle of weight <= {w_tilde}")));
            }
        }
        let (dil, cong, cost) = ledger_totals(&result.ledger);
        let mut row = base;
        row.extend([
            result.params.as_ref().map_or(String::new(), |p| fmt_f(p.alpha)),
            result.best.as_ref().map_or("none", |b| b.regime.as_str()).to_string(),
            w_star.to_string(),
            fmt_f(w_tilde),
            fmt_f(w_tilde / w_star as f64),
            result.trials_run().to_string(),
            result.failed_trials.to_string(),
            fmt_f(dil),
            fmt_f(cong),
            fmt_f(cost),
        ]);
        rows.push(row);
    }
    Ok((Value::Array(constants), csv_body(&header, rows)?))
}

/// Default number of decompositions per run in ldd-stats mode.
pub const LDD_DEFAULT_TRIALS: u64 = 10_000;

fn ldd_stats(cfg: &ExperimentConfig) -> Result<(Value, String), HarnessError> {
    let header = [
        "run",
        "seed",
        "n",
        "m",
        "k",
        "d",
        "sources",
        "trials",
        "failed",
        "property1",
        "property2",
        "property2_rate",
        "predicted_rate",
        "lower_limit",
        "radius_violations",
    ];
    let trials = cfg.trials.unwrap_or(LDD_DEFAULT_TRIALS);
    let k = cfg.ldd_k;
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for run in 0..cfg.runs {
        let (g, _) = graph_for_run(cfg, run)?;
        let cycle = exact_mwc(&g).ok_or_else(|| config_err("graph", "ldd-stats needs a graph with a cycle"))?;
        let d = cfg.ldd_d.unwrap_or(cycle.weight as f64 / 2.0);
        let sources: Vec<usize> = (0..g.n()).collect();
        let seed = derive_seed(cfg.seed, ALGO_STREAM, run);
        let outcomes: Vec<(bool, bool, bool, usize)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let out = ldd(&g, &sources, k, d, &mut rng)?;
                if out.failed() {
                    return Ok((true, false, false, 0));
                }
                let (p1, p2) = check_ldd_properties(&g, k, d, &out, &cycle)?;
                Ok((false, p1, p2, radius_violations(&out)))
            })
            .collect::<Result<_, LddError>>()?;
        let failed = outcomes.iter().filter(|o| o.0).count();
        let p1 = outcomes.iter().filter(|o| o.1).count();
        let p2 = outcomes.iter().filter(|o| o.2).count();
        let violations: usize = outcomes.iter().map(|o| o.3).sum();
        let s = sources.len() as f64;
        let predicted = 0.25 * s.powf(-1.0 / k);
        let se = (predicted * (1.0 - predicted) / trials as f64).sqrt();
        let beta = log_size(sources.len()) / (k * d);
        constants.push(json!({
            "run": run,
            "algorithm_seed": seed,
            "cycle_weight": cycle.weight,
            "k": k,
            "d": d,
            "beta": beta,
            "horizon": 100.0 * k * d,
            "eps1": k / (k + 1.0) / log_size(sources.len()),
            "property_bound": property_bound(k, d, sources.len()),
        }));
        rows.push(vec![
            run.to_string(),
            cfg.seed.to_string(),
            g.n().to_string(),
            g.m().to_string(),
            fmt_f(k),
            fmt_f(d),
            sources.len().to_string(),
            trials.to_string(),
            failed.to_string(),
            p1.to_string(),
            p2.to_string(),
            fmt_f(p2 as f64 / trials as f64),
            fmt_f(predicted),
            fmt_f(predicted - 3.0 * se),
            violations.to_string(),
        ]);
        if violations > 0 {
            return Err(HarnessError::Invariant(format!(
                "run {run}: {violations} clustered sources lie beyond the largest shift"
            )));
        }
    }
    Ok((Value::Array(constants), csv_body(&header, rows)?))
}

/// Default number of instances in hard-gap mode.
pub const HARD_GAP_DEFAULT_TRIALS: u64 = 100;

fn hard_params(cfg: &ExperimentConfig) -> (usize, usize, u64, u32, Variant) {
    match cfg.source {
        Some(GraphSource::Hard { gamma, k, d, p, variant }) => (gamma, k, d, p, variant),
        _ => unreachable!("validated"),
    }
}

fn hard_gap(cfg: &ExperimentConfig) -> Result<(Value, String), HarnessError> {
    let header = [
        "trial",
        "seed",
        "gamma",
        "k",
        "d",
        "p",
        "variant",
        "n",
        "expected_n",
        "m",
        "h_edges",
        "x",
        "y",
        "intersecting",
        "mwc",
        "short",
        "long",
        "gap_ok",
        "diameter",
        "nominal_diameter",
    ];
    let (gamma, k, d, p, variant) = hard_params(cfg);
    let trials = cfg.trials.unwrap_or(HARD_GAP_DEFAULT_TRIALS);
    let results: Vec<(HardInstance, congest_mwc::hard::GapReport, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, INSTANCE_STREAM, t));
            // alternate so both sides of the gap are exercised
            let inst = random_instance(gamma, k, d, p, variant, &mut rng, Some(t % 2 == 1))?;
            let report = verify_gap(&inst);
            let diameter = inst.diameter();
            Ok((inst, report, diameter))
        })
        .collect::<Result<_, HardError>>()?;
    let mut rows = Vec::new();
    for (t, (inst, report, diameter)) in results.iter().enumerate() {
        if let Some(dir) = &cfg.export {
            export_instance(dir, &format!("hard_{t}"), inst)?;
        }
        rows.push(vec![
            t.to_string(),
            cfg.seed.to_string(),
            gamma.to_string(),
            k.to_string(),
            d.to_string(),
            p.to_string(),
            variant_name(variant).to_string(),
            inst.graph.n().to_string(),
            inst.expected_nodes().to_string(),
            inst.graph.m().to_string(),
            inst.h.edges.len().to_string(),
            bits_to_hex(&inst.x),
            bits_to_hex(&inst.y),
            report.intersecting.to_string(),
            report.mwc.finite().map_or("inf".into(), |w| w.to_string()),
            report.short.to_string(),
            report.long.to_string(),
            report.gap_ok.to_string(),
            diameter.to_string(),
            inst.nominal_diameter().to_string(),
        ]);
    }
    let body = csv_body(&header, rows)?;
    if let Some((t, _)) = results.iter().enumerate().find(|(_, r)| !r.1.gap_ok) {
        return Err(HarnessError::Invariant(format!("instance {t}: cycle-weight gap does not hold")));
    }
    let heavy = results.first().map(|r| r.0.heavy);
    let constants = json!({
        "gamma": gamma, "k": k, "d": d, "p": p, "variant": variant,
        "path_len": (d as usize).pow(p),
        "heavy_weight": heavy,
        "trials": trials,
        "inputs": "odd trials have disjoint inputs, even trials uniform bits",
    });
    Ok((constants, body))
}

fn moving_cut_mode(cfg: &ExperimentConfig) -> Result<(Value, String), HarnessError> {
    let header = [
        "run",
        "seed",
        "gamma",
        "k",
        "d",
        "p",
        "h_edges",
        "capacity",
        "distance",
        "distance_approx",
        "rounded_capacity",
        "rounded_distance",
        "path_route",
        "route_bound",
        "distance_over_bound",
    ];
    let (gamma, k, d, p, variant) = hard_params(cfg);
    let mut rows = Vec::new();
    for run in 0..cfg.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, INSTANCE_STREAM, run));
        let h = gen_high_girth_bipartite(gamma, k, &mut rng)?;
        let ones = vec![true; h.edges.len()];
        let inst = gen_lower_bound_graph(gamma, k, d, p, &h, &ones, &ones, variant)?;
        if let Some(dir) = &cfg.export {
            export_instance(dir, &format!("moving_cut_{run}"), &inst)?;
        }
        let cut = moving_cut(&inst)?;
        let e_h = h.edges.len();
        if cut.capacity != congest_mwc::scaling::ratio(e_h as i64, 1) {
            return Err(HarnessError::Invariant(format!("run {run}: capacity {} differs from |E(H)| = {e_h}", cut.capacity)));
        }
        let distance = cut.distance.to_f64().unwrap_or(f64::INFINITY);
        let bound = ((d as f64).powi(p as i32)).min(e_h as f64 / (d as f64 * p as f64));
        rows.push(vec![
            run.to_string(),
            cfg.seed.to_string(),
            gamma.to_string(),
            k.to_string(),
            d.to_string(),
            p.to_string(),
            e_h.to_string(),
            cut.capacity.to_string(),
            cut.distance.to_string(),
            fmt_f(distance),
            cut.rounded_capacity.to_string(),
            cut.rounded_distance.to_string(),
            cut.path_route.to_string(),
            fmt_f(bound),
            fmt_f(distance / bound),
        ]);
    }
    let mut levels = String::new();
    for i in 1..=p {
        let _ = write!(levels, "{}{i}:1+|E(H)|/({p}*{d}^{i})", if i > 1 { ", " } else { "" });
    }
    let constants = json!({
        "gamma": gamma, "k": k, "d": d, "p": p, "variant": variant,
        "tree_lengths": levels,
        "other_lengths": 1,
    });
    Ok((constants, csv_body(&header, rows)?))
}

fn cost_model(cfg: &ExperimentConfig) -> Result<(Value, String), HarnessError> {
    let header = [
        "q",
        "n",
        "diameter",
        "t",
        "dilation",
        "congestion",
        "product",
        "t_squared",
        "relative_error",
    ];
    let n = cfg.cost_n.expect("validated");
    let diameter = cfg.cost_diameter.expect("validated");
    let t = sssp_round_bound(n, diameter);
    let mut rows = Vec::new();
    for &q in &cfg.q {
        let (dil, cong) = charge_sssp_cost(n, diameter, q).map_err(|e| match e {
            CostModelError::QOutOfRange { .. } => config_err("q", e.to_string()),
            CostModelError::BadInput => config_err("n", e.to_string()),
        })?;
        let product = dil * cong;
        rows.push(vec![
            fmt_f(q),
            n.to_string(),
            diameter.to_string(),
            fmt_f(t),
            fmt_f(dil),
            fmt_f(cong),
            fmt_f(product),
            fmt_f(t * t),
            fmt_f((product - t * t).abs() / (t * t)),
        ]);
    }
    let constants = json!({ "t": t, "formula": "D + sqrt(n) + n^0.4 D^0.4" });
    Ok((constants, csv_body(&header, rows)?))
}
