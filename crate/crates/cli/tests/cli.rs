use std::path::Path;
use std::process::Command as Process;

use ipsim_cli::config::{ExperimentConfig, GridSpec};
use ipsim_cli::{run, CliError, Command, Overrides};
use proptest::prelude::*;

const TORUS: &str = r#"
[graph]
type = "torus"
dim = 2
side = 5

[model]
type = "independent"
lambda = 1.0

[init]
state = 0

[sim]
t_end = 1.5
grid = "linspace(0, 1.5, 16)"
replicas = 40
seed = 9

[analysis]
times = [0.5, 1.5]
alpha = 0.5

[output]
directory = "unused"
event_logs = 2
"#;

fn config() -> ExperimentConfig {
    ExperimentConfig::parse(TORUS).unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn overrides(dir: &Path) -> Overrides {
    Overrides {
        out: Some(dir.to_path_buf()),
        ..Overrides::default()
    }
}

#[test]
fn graph_info_lists_every_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Command::GraphInfo, config(), &overrides(dir.path()), None).unwrap();
    assert!(out.hard_failures.is_empty());
    let vertices = std::fs::read_to_string(dir.path().join("vertices.csv")).unwrap();
    assert_eq!(vertices.lines().count(), 1 + 25);
    let m = manifest(dir.path());
    assert_eq!(m["subcommand"], "graph-info");
    let files = m["files"].as_object().unwrap();
    for name in ["vertices.csv", "growth.csv", "transitivity.csv", "rule.csv"] {
        assert!(files.contains_key(name), "{name}");
    }
}

#[test]
fn same_seed_gives_identical_checksums_for_any_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut oa = overrides(a.path());
    oa.threads = Some(1);
    let mut ob = overrides(b.path());
    ob.threads = Some(3);
    run(Command::Simulate, config(), &oa, None).unwrap();
    run(Command::Simulate, config(), &ob, None).unwrap();
    let (ma, mb) = (manifest(a.path()), manifest(b.path()));
    assert_eq!(ma["files"], mb["files"]);
    assert_eq!(ma["config_hash"], mb["config_hash"]);
    assert!(ma["files"].as_object().unwrap().contains_key("events/replica_1.csv"));
}

#[test]
fn seed_override_changes_outputs_and_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(Command::Simulate, config(), &overrides(a.path()), None).unwrap();
    let mut ob = overrides(b.path());
    ob.seed = Some(10);
    run(Command::Simulate, config(), &ob, None).unwrap();
    let (ma, mb) = (manifest(a.path()), manifest(b.path()));
    assert_ne!(ma["files"]["series.csv"], mb["files"]["series.csv"]);
    assert_ne!(ma["config_hash"], mb["config_hash"]);
    assert_eq!(mb["seed"], 10);
}

#[test]
fn hitting_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(Command::Hitting, config(), &overrides(a.path()), None).unwrap();
    run(Command::Hitting, config(), &overrides(b.path()), None).unwrap();
    for name in ["hitting.csv", "hitting_summary.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let times = std::fs::read_to_string(a.path().join("hitting.csv")).unwrap();
    assert_eq!(times.lines().count(), 1 + 40);
}

#[test]
fn interrupted_run_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let err = run(Command::Simulate, config(), &overrides(dir.path()), Some(10)).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    let left: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(left.is_empty(), "{left:?}");
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut o = overrides(dir.path());
    o.threads = Some(0);
    assert!(matches!(run(Command::Simulate, config(), &o, None), Err(CliError::Flag(_))));
}

#[test]
fn variance_scan_without_ladder_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(Command::VarianceScan, config(), &overrides(dir.path()), None);
    assert!(matches!(r, Err(CliError::Flag(_))));
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_ipsim"))
}

#[test]
fn exact_beyond_state_cap_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    let text = TORUS.replace("side = 5", "side = 6");
    std::fs::write(&cfg, text).unwrap();
    let status = binary()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!dir.path().join("out").join("manifest.json").exists());
}

#[test]
fn binary_reads_threads_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, TORUS).unwrap();
    let out = dir.path().join("out");
    let status = binary()
        .env("IPSIM_THREADS", "2")
        .args(["simulate", "--replicas", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["threads"], 2);
    assert_eq!(m["replicas"], 5);
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, TORUS.replace("type = \"independent\"", "type = \"voter\"")).unwrap();
    let out = binary().args(["graph-info", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("independent, contact, ladder"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        side in 3usize..20,
        dim in 1usize..4,
        lambda in 0.0f64..10.0,
        t_end in 0.1f64..10.0,
        points in 1usize..8,
        replicas in 1usize..10_000,
        seed in any::<u64>(),
        alpha in proptest::option::of(0.0f64..1.0),
        beta in proptest::option::of(proptest::collection::vec(0.1f64..5.0, 1..3)),
        linspace in any::<bool>(),
    ) {
        let mut cfg = config();
        cfg.graph.side = Some(side);
        cfg.graph.dim = Some(dim);
        cfg.model.lambda = Some(lambda);
        cfg.sim.t_end = t_end;
        cfg.sim.grid = if linspace {
            GridSpec::Text(format!("linspace(0, {t_end}, {points})"))
        } else {
            GridSpec::Times((0..points).map(|i| t_end * i as f64 / points as f64).collect())
        };
        cfg.sim.replicas = replicas;
        cfg.sim.seed = seed;
        cfg.analysis.alpha = alpha;
        cfg.analysis.beta = beta;
        cfg.analysis.times = None;
        let text = cfg.emit();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.emit(), text);
    }
}

const CYCLE: &str = r#"
[graph]
type = "torus"
dim = 1
side = 6

[model]
type = "contact"
lambda = 0.5

[init]
state = 1

[sim]
t_end = 0.5
grid = [0.25, 0.5]
replicas = 1
seed = 0
"#;

#[test]
fn exact_writes_bound_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse(CYCLE).unwrap();
    let mut o = overrides(dir.path());
    o.beta = Some(2.0);
    let out = run(Command::Exact, cfg, &o, None).unwrap();
    assert!(out.hard_failures.is_empty());
    let cov = std::fs::read_to_string(dir.path().join("cov_bound.csv")).unwrap();
    assert!(cov.starts_with("d,s,t,cov,bound,pass"));
    // Three distances and four (s, t) pairs.
    assert_eq!(cov.lines().count(), 1 + 12);
    assert!(cov.lines().skip(1).all(|l| l.split(',').nth(6) == Some("2")));
    let smooth = std::fs::read_to_string(dir.path().join("smooth_bound.csv")).unwrap();
    assert!(smooth.starts_with("site,lhs,rhs,pass"));
    assert_eq!(smooth.lines().count(), 1 + 2 * 6);
    let marginals = std::fs::read_to_string(dir.path().join("marginals.csv")).unwrap();
    assert_eq!(marginals.lines().count(), 1 + 2 * 6 * 2);
}

#[test]
fn tree_margin_defaults_to_rate_bound() {
    let text = r#"
[graph]
type = "tree"
degree = 3
radius = 6

[model]
type = "independent"
lambda = 1.0

[init]
state = 0

[sim]
t_end = 2.0
grid = [1.0, 2.0]
replicas = 1
seed = 0
"#;
    let cfg = ExperimentConfig::parse(text).unwrap();
    let g = cfg.build_graph().unwrap();
    let rule = cfg.build_rule().unwrap();
    // ceil(2 * 1 * 1) = 2, within radius / 2 = 3.
    let region = cfg.interior(&g, &rule).unwrap();
    assert_eq!(region.len(), g.ball(0, 4).unwrap().len());
}
