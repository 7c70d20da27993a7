use std::path::Path;

use congest_dso::apsisp::compute_2apsisp;
use congest_dso::baseline::{answer_general_no_pre, answer_seb_no_pre};
use congest_dso::dso_fastpre::{answer_batch_pre, preprocess_fast_pre, FastPreParams};
use congest_dso::dso_fastquery::{answer_batch_fast, preprocess_fast_query};
use congest_dso::graph::{generate_connected, generate_random, read_graph, write_graph};
use congest_dso::io::{parse_queries, write_answers, write_d2};
use congest_dso::lowerbound::{build_fig1, build_fig2, ClaimReport, DisjointnessInstance};
use congest_dso::{CostMode, CostModel, Graph, NetworkRun, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::Config;
use crate::trials::{run_trial, Measurement, Setup};
use crate::*;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    read_graph(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn sim_config(cfg: &Config, flags: &SimFlags) -> Result<SimConfig, CliError> {
    let defaults = SimConfig::default();
    let mode = flags.mode.clone().or_else(|| cfg.get("mode").map(str::to_string)).unwrap_or_else(|| "faithful".into());
    let cost = match mode.as_str() {
        "faithful" => CostModel::faithful(),
        "charged" => CostModel::charged(),
        other => return Err(CliError::Usage(format!("unknown mode {other:?}; expected faithful or charged"))),
    };
    let config = SimConfig {
        bandwidth: cfg.pick(flags.bandwidth, "bandwidth", defaults.bandwidth)?,
        engine_c: cfg.pick(None, "engine_c", defaults.engine_c)?,
        seed: cfg.pick(flags.seed, "seed", defaults.seed)?,
        cost,
    };
    config.validate()?;
    Ok(config)
}

fn mode_name(config: &SimConfig) -> &'static str {
    if config.cost.mode == CostMode::Charged {
        "charged"
    } else {
        "faithful"
    }
}

fn fast_pre_params(cfg: &Config, flags: &SamplingFlags, seed: u64) -> Result<FastPreParams, CliError> {
    let defaults = FastPreParams::default();
    let params = FastPreParams { c: cfg.pick(flags.c, "c", defaults.c)?, c_g: cfg.pick(flags.c_g, "c_g", defaults.c_g)?, seed };
    params.validate()?;
    Ok(params)
}

/// Default edge count: three per vertex, capped at a complete digraph.
fn edge_count(cfg: &Config, flag: Option<usize>, n: usize) -> Result<usize, CliError> {
    cfg.pick(flag, "m", (3 * n).min(n * n.saturating_sub(1)))
}

pub fn generate(cfg: &Config, a: GenerateArgs) -> Result<(), CliError> {
    let n = cfg.pick(a.n, "n", 16)?;
    let m = edge_count(cfg, a.m, n)?;
    let max_w = cfg.pick(a.max_weight, "max_weight", 10)?;
    let seed = cfg.pick(a.seed, "seed", 0)?;
    let g = if a.any { generate_random(n, m, max_w, seed)? } else { generate_connected(n, m, max_w, seed)? };
    let text = write_graph(&g);
    match a.out {
        Some(path) => write_file(&path, &text),
        None => {
            print!("{}", String::from_utf8_lossy(&text));
            Ok(())
        }
    }
}

pub fn preprocess(cfg: &Config, a: PreprocessArgs) -> Result<(), CliError> {
    let g = load_graph(&a.graph)?;
    let config = sim_config(cfg, &a.sim)?;
    let mut run = NetworkRun::new(&g, config)?;
    let words = match a.algo {
        Oracle::Fastquery => preprocess_fast_query(&mut run)?.max_node_words(),
        Oracle::Fastpre => preprocess_fast_pre(&mut run, fast_pre_params(cfg, &a.sampling, config.seed)?)?.node_words(),
    };
    print!("{}", run.ledger().to_csv());
    eprintln!("max words stored at a node: {words}");
    Ok(())
}

pub fn query(cfg: &Config, a: QueryArgs) -> Result<(), CliError> {
    let g = load_graph(&a.graph)?;
    let batch = parse_queries(&read_text(&a.queries)?).map_err(|e| CliError::Data(format!("{}: {e}", a.queries.display())))?;
    let config = sim_config(cfg, &a.sim)?;
    let mut run = NetworkRun::new(&g, config)?;
    let answers = match a.algo {
        Answerer::Fastquery => {
            let state = preprocess_fast_query(&mut run)?;
            answer_batch_fast(&mut run, &state, &batch)
        }
        Answerer::Fastpre => {
            let state = preprocess_fast_pre(&mut run, fast_pre_params(cfg, &a.sampling, config.seed)?)?;
            answer_batch_pre(&mut run, &state, &batch)
        }
        Answerer::General => answer_general_no_pre(&mut run, &batch),
        Answerer::Seb => answer_seb_no_pre(&mut run, &batch)?,
    };
    print!("{}", write_answers(&answers, a.case));
    if let Some(path) = a.ledger {
        write_file(&path, run.ledger().to_csv().as_bytes())?;
    }
    Ok(())
}

pub fn apsisp(cfg: &Config, a: ApsispArgs) -> Result<(), CliError> {
    let g = load_graph(&a.graph)?;
    let mut run = NetworkRun::new(&g, sim_config(cfg, &a.sim)?)?;
    let table = compute_2apsisp(&mut run);
    print!("{}", write_d2(&table));
    if let Some(path) = a.ledger {
        write_file(&path, run.ledger().to_csv().as_bytes())?;
    }
    Ok(())
}

fn setup(
    cfg: &Config,
    n: Option<usize>,
    m: Option<usize>,
    max_w: Option<u64>,
    sim: &SimFlags,
    sampling: &SamplingFlags,
    default_n: usize,
) -> Result<Setup, CliError> {
    let n = cfg.pick(n, "n", default_n)?;
    if n < 2 {
        return Err(CliError::Usage("n must be at least 2".into()));
    }
    let sim = sim_config(cfg, sim)?;
    Ok(Setup {
        n,
        m: edge_count(cfg, m, n)?,
        max_weight: cfg.pick(max_w, "max_weight", 10)?,
        params: fast_pre_params(cfg, sampling, sim.seed)?,
        sim,
    })
}

pub fn verify(cfg: &Config, a: VerifyArgs) -> Result<(), CliError> {
    let setup = setup(cfg, a.n, a.m, a.max_weight, &a.sim, &a.sampling, 24)?;
    let trials = cfg.pick(a.trials, "trials", 10)?;
    let default_k = if a.algo == Algo::Exclude { 3 } else { 20 };
    let k: usize = match (a.k, cfg.get("k")) {
        (Some(k), _) => k,
        (None, Some(raw)) => raw.parse().map_err(|_| CliError::Usage(format!("config key k: cannot parse {raw:?}")))?,
        (None, None) => default_k,
    };
    let randomized = a.algo == Algo::Fastpre;
    let allowance = cfg.pick(a.allowance, "allowance", if randomized { 0.01 } else { 0.0 })?;
    let results: Vec<Measurement> =
        (0..trials as u64).into_par_iter().map(|t| run_trial(a.algo, &setup, t, k)).collect::<Result<_, _>>()?;
    let mut total = Measurement::default();
    results.iter().for_each(|m| total.absorb(m));
    let rate = 1.0 - total.exact_rate();
    println!(
        "algo={} n={} trials={trials} checks={} mismatches={} below_oracle={} mismatch_rate={rate:.6} allowance={allowance}",
        format!("{:?}", a.algo).to_lowercase(),
        setup.n,
        total.checks,
        total.mismatches,
        total.below
    );
    let allowed = if randomized { (allowance * total.checks as f64).floor() as usize } else { 0 };
    if total.below > 0 || total.mismatches > allowed {
        return Err(CliError::Verification(format!("{} of {} answers differ from the oracle", total.mismatches, total.checks)));
    }
    Ok(())
}

/// `a..b` steps by factors of four from `a` and always ends with `b`;
/// otherwise a comma-separated list.
fn parse_ks(sizes: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse batch sizes {sizes:?}"));
    if let Some((lo, hi)) = sizes.split_once("..") {
        let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        let mut ks: Vec<usize> = std::iter::successors(Some(lo), |&k| Some(k * 4)).take_while(|&k| k < hi).collect();
        ks.push(hi);
        return Ok(ks);
    }
    sizes.split(',').map(|s| s.trim().parse().ok().filter(|&k| k > 0).ok_or_else(bad)).collect()
}

pub fn bench(cfg: &Config, a: BenchArgs) -> Result<(), CliError> {
    let setup = setup(cfg, a.n, a.m, a.max_weight, &a.sim, &a.sampling, 64)?;
    let sizes = a.k.or_else(|| cfg.get("k").map(str::to_string)).unwrap_or_else(|| "1..64".into());
    // The table has no batch size; one row with k = n.
    let ks = if a.algo == Algo::Apsisp { vec![setup.n] } else { parse_ks(&sizes)? };
    let rows: Vec<Measurement> = ks.par_iter().map(|&k| run_trial(a.algo, &setup, 0, k)).collect::<Result<_, _>>()?;
    println!("algorithm,n,m,k,mode,rounds,peak_congestion,exact_match_rate");
    let name = format!("{:?}", a.algo).to_lowercase();
    for (k, r) in ks.iter().zip(&rows) {
        println!("{name},{},{},{k},{},{},{},{:.4}", setup.n, setup.m, mode_name(&setup.sim), r.rounds, r.peak_congestion, r.exact_rate());
    }
    Ok(())
}

fn emit_report(family: &str, report: &ClaimReport) {
    for c in &report.checks {
        println!("{}", json!({ "family": family, "claim": c.claim, "expected": c.expected, "actual": c.actual, "pass": c.pass }));
    }
}

pub fn lowerbound(cfg: &Config, a: LowerboundArgs) -> Result<(), CliError> {
    let budget = cfg.pick(a.n, "n", 32)?;
    let seed = cfg.pick(a.bits_seed, "seed", 0)?;
    let (family, report, size, extra) = match a.family {
        Family::Fig1 => {
            // Largest square instance whose graph fits the budget.
            let build = |s: usize| {
                let inst = DisjointnessInstance::random(s, s, seed);
                build_fig1(s, s, s.max(2), &inst).map(|f| (f, inst))
            };
            let mut best = None;
            for s in 1.. {
                let (f, inst) = build(s)?;
                if f.graph.n() > budget {
                    break;
                }
                best = Some((f, inst));
            }
            let (f, inst) = best.ok_or_else(|| CliError::Usage(format!("no first-family graph fits in {budget} vertices")))?;
            let extra = json!({ "k": f.k, "q": f.q, "ell": f.ell, "disjoint": inst.disjoint() });
            ("fig1", f.verify_claims(&inst), f.graph.n(), extra)
        }
        Family::Fig2 => {
            let stretch = cfg.pick(a.stretch, "stretch", 1)?;
            if stretch == 0 {
                return Err(CliError::Usage("stretch must be at least 1".into()));
            }
            // Worst case: every bit set, so each one adds two gadget chains.
            let per_bit = 1 + 2 * (stretch - 1);
            let fixed = 5 + 2 * (stretch - 1);
            let bits = budget.saturating_sub(fixed) / per_bit;
            if bits == 0 {
                return Err(CliError::Usage(format!("no second-family graph fits in {budget} vertices")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bits_a: Vec<bool> = (0..bits).map(|_| rng.gen_bool(0.5)).collect();
            let f = build_fig2(&bits_a, stretch, a.directed)?;
            let mut report = f.verify_claims();
            let mut run = NetworkRun::new(&f.graph, SimConfig::default())?;
            let table = compute_2apsisp(&mut run);
            let column: Vec<_> = f.a.iter().map(|&v| table.get(v, f.q)).collect();
            let decoded = f.decode_bits(&column);
            report.check(
                "bits recovered from the distributed d2 column".into(),
                format!("{bits_a:?}"),
                format!("{decoded:?}"),
                decoded == bits_a,
            );
            let extra = json!({ "bits": bits, "stretch": stretch, "directed": a.directed, "crossing_links": f.crossing_links() });
            ("fig2", report, f.graph.n(), extra)
        }
    };
    emit_report(family, &report);
    let passed = report.checks.iter().filter(|c| c.pass).count();
    let all_pass = report.all_pass();
    println!(
        "{}",
        json!({ "family": family, "summary": true, "vertices": size, "bits_seed": seed, "params": extra, "claims": report.checks.len(), "passed": passed, "all_pass": all_pass })
    );
    if !all_pass {
        return Err(CliError::Verification(format!("{} of {} claims failed", report.checks.len() - passed, report.checks.len())));
    }
    Ok(())
}
