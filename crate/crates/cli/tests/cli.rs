use std::path::Path;
use std::process::{Command, Output};

use congest_dso::graph::read_graph;
use congest_dso::oracle;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congest-dso")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn generate(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join("g.txt");
    let mut args = vec!["generate", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    assert!(cli(&args).status.success());
    path
}

#[test]
fn generate_is_deterministic_per_seed() {
    let a = cli(&["generate", "--n", "12", "--m", "30", "--seed", "5"]);
    let b = cli(&["generate", "--n", "12", "--m", "30", "--seed", "5"]);
    let c = cli(&["generate", "--n", "12", "--m", "30", "--seed", "6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let g = read_graph(&a.stdout).unwrap();
    assert_eq!((g.n(), g.m()), (12, 30));
}

#[test]
fn query_answers_match_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), &["--n", "14", "--m", "40", "--seed", "2"]);
    let g = read_graph(&std::fs::read(&graph).unwrap()).unwrap();
    let queries = dir.path().join("q.txt");
    let lines: String =
        (0..g.m()).step_by(5).map(|id| format!("{} {} {} {}\n", id % 14, (id * 3 + 1) % 14, g.edge(id).from, g.edge(id).to)).collect();
    std::fs::write(&queries, lines + "0 1 99 98\n").unwrap();
    for algo in ["fastquery", "fastpre", "general"] {
        let out = cli(&["query", "--graph", graph.to_str().unwrap(), "--queries", queries.to_str().unwrap(), "--algo", algo, "--case"]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        let mut rows = text.lines();
        assert_eq!(rows.next(), Some("x,y,u,v,distance,rounds_charged,case"));
        for row in rows {
            let f: Vec<&str> = row.split(',').collect();
            let v: Vec<usize> = f[..4].iter().map(|s| s.parse().unwrap()).collect();
            let Some(e) = g.edge_id(v[2], v[3]) else {
                assert_eq!(f[4], "ERR");
                continue;
            };
            let want = congest_dso::io::format_dist(oracle::rp(&g, v[0], v[1], e).unwrap());
            // The sampled oracle may overestimate; the others are exact.
            if algo == "fastpre" {
                assert!(f[4] == want || want != "INF" && (f[4] == "INF" || f[4].parse::<u64>().unwrap() > want.parse().unwrap()));
            } else {
                assert_eq!(f[4], want, "{algo} {row}");
            }
        }
    }
}

#[test]
fn apsisp_and_preprocess_print_csv() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), &["--n", "10", "--seed", "3"]);
    let out = cli(&["apsisp", "--graph", graph.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 100);
    let out = cli(&["preprocess", "--graph", graph.to_str().unwrap(), "--algo", "fastquery", "--mode", "charged"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("phase,rounds,peak_congestion,total_words\n"));
}

#[test]
fn verify_and_bench() {
    let out = cli(&["verify", "--algo", "apsisp", "--n", "12", "--trials", "4", "--seed", "7"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mismatch_rate=0.000000"));
    for algo in ["exclude", "fastpre", "seb"] {
        let out = cli(&["verify", "--algo", algo, "--n", "16", "--trials", "3", "--mode", "charged"]);
        assert!(out.status.success(), "{algo}: {}", stdout(&out));
    }
    let out = cli(&["bench", "--algo", "general", "--n", "16", "--k", "1,2,8", "--mode", "charged"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("algorithm,n,m,k,mode,rounds,peak_congestion,exact_match_rate"));
    let rounds: Vec<u64> = text.lines().skip(1).map(|r| r.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(rounds.len(), 3);
    assert!(rounds.windows(2).all(|w| w[0] <= w[1]), "{rounds:?}");
    assert_eq!(cli(&["bench", "--algo", "general", "--n", "16", "--k", "1,2,8", "--mode", "charged"]).stdout, out.stdout);
}

#[test]
fn lowerbound_manifest_is_json_lines() {
    let out = cli(&["lowerbound", "--family", "fig2", "--n", "32", "--bits-seed", "3", "--stretch", "3"]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["all_pass"], true);
    assert!(lines[..lines.len() - 1].iter().all(|l| l["pass"] == true));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["verify", "--algo", "apsisp", "--mode", "fast"]).status.code(), Some(1));
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 1\n0 1\n").unwrap();
    assert_eq!(cli(&["apsisp", "--graph", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cli(&["apsisp", "--graph", dir.path().join("missing").to_str().unwrap()]).status.code(), Some(2));
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(cli(&["--config", cfg.to_str().unwrap(), "generate"]).status.code(), Some(1));
    // No sampling at all makes the sampled oracle miss long replacements.
    let args: Vec<&str> = "verify --algo fastpre --n 40 --m 44 --trials 4 --c 0.01 --c-g 0.01 --allowance 0".split(' ').collect();
    let out = cli(&args);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# generator\nn = 9\nm = 20\nseed = 4\n").unwrap();
    let from_file = cli(&["--config", cfg.to_str().unwrap(), "generate"]);
    let from_flags = cli(&["generate", "--n", "9", "--m", "20", "--seed", "4"]);
    assert_eq!(from_file.stdout, from_flags.stdout);
    let overridden = cli(&["--config", cfg.to_str().unwrap(), "generate", "--n", "11"]);
    assert_eq!(read_graph(&overridden.stdout).unwrap().n(), 11);
}
