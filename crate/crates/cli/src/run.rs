//! Subcommand implementations. Each run writes its CSVs through an
//! [`ArtifactWriter`] and finishes with `manifest.json`.

use std::fmt::Write as _;
use std::path::PathBuf;

use ipsim_core::dynamics::{
    influence_matrix, monotonicity_certificate, total_rate_bound, Enumeration, LocalRule, State,
};
use ipsim_core::exact::{
    build_generator, verify_cov_bound, verify_smoothness_bound, CovBoundParams, SemigroupCache, DEFAULT_STATE_CAP,
};
use ipsim_core::graph::{growth_report, transitivity_witness, Graph, GraphKind, Region};
use ipsim_core::simulate::{gillespie, run_replicas, EmpiricalSeries, ReplicaOutput, ReplicaPlan, RNG_ALGORITHM};
use ipsim_core::stats::{
    clt_check, estimate_moments, hitting_analysis, kout_of_n, variance_ratio_scan, AnalyticHitting, HittingOptions,
    VarianceScan, DEFAULT_BANDWIDTH_C,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{sha256_hex, ArtifactWriter, Manifest};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;
pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    GraphInfo,
    Simulate,
    Exact,
    CltCheck,
    VarianceScan,
    Hitting,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GraphInfo => "graph-info",
            Command::Simulate => "simulate",
            Command::Exact => "exact",
            Command::CltCheck => "clt-check",
            Command::VarianceScan => "variance-scan",
            Command::Hitting => "hitting",
        }
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicas: Option<usize>,
    pub threads: Option<usize>,
    /// Replaces `analysis.beta` with this single value.
    pub beta: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), CliError> {
        if let Some(s) = self.seed {
            cfg.sim.seed = s;
        }
        if let Some(r) = self.replicas {
            cfg.sim.replicas = r;
        }
        if let Some(o) = &self.out {
            cfg.output.directory = o.to_string_lossy().into_owned();
        }
        if let Some(b) = self.beta {
            cfg.analysis.beta = Some(vec![b]);
        }
        if self.threads == Some(0) {
            return Err(CliError::Flag("--threads must be at least 1".into()));
        }
        cfg.validate()
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub hard_failures: Vec<String>,
    pub manifest: PathBuf,
}

struct Context {
    cfg: ExperimentConfig,
    graph: Graph,
    rule: LocalRule<f64>,
    grid: Vec<f64>,
    threads: Option<usize>,
    out: ArtifactWriter,
    summary: String,
    hard_failures: Vec<String>,
}

/// Runs `cmd` on `cfg` after applying `overrides`. `fault_after` is a test
/// hook that interrupts every file write after that many bytes.
pub fn run(cmd: Command, mut cfg: ExperimentConfig, overrides: &Overrides, fault_after: Option<usize>) -> Result<Outcome, CliError> {
    overrides.apply(&mut cfg)?;
    let graph = cfg.build_graph()?;
    let rule = cfg.build_rule()?;
    let mut out = ArtifactWriter::new(&cfg.output.directory)?;
    if let Some(n) = fault_after {
        out.inject_fault(n);
    }
    let mut ctx = Context {
        grid: cfg.grid(),
        cfg,
        graph,
        rule,
        threads: overrides.threads,
        out,
        summary: String::new(),
        hard_failures: Vec::new(),
    };
    match cmd {
        Command::GraphInfo => graph_info(&mut ctx)?,
        Command::Simulate => simulate(&mut ctx)?,
        Command::Exact => exact(&mut ctx)?,
        Command::CltCheck => clt(&mut ctx)?,
        Command::VarianceScan => variance(&mut ctx)?,
        Command::Hitting => hitting(&mut ctx)?,
    }
    let manifest = Manifest {
        tool: "ipsim",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.name().into(),
        config_hash: config_hash(&ctx.cfg),
        seed: ctx.cfg.sim.seed,
        replicas: ctx.cfg.sim.replicas,
        threads: ctx.threads,
        timestamp: chrono::Utc::now().to_rfc3339(),
        rng: RNG_ALGORITHM,
        grid: ctx.grid.clone(),
        hard_failures: ctx.hard_failures.clone(),
        files: Default::default(),
    };
    let manifest = ctx.out.finish(manifest)?;
    Ok(Outcome {
        summary: ctx.summary,
        hard_failures: ctx.hard_failures,
        manifest,
    })
}

/// Hash of the effective configuration. The output directory is left out so
/// that the same experiment written to two places hashes the same.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut cfg = cfg.clone();
    cfg.output.directory.clear();
    sha256_hex(cfg.emit().as_bytes())
}

fn initial(ctx: &Context) -> Vec<State> {
    vec![ctx.cfg.init.state; ctx.graph.len()]
}

fn simulate_replicas(
    ctx: &Context,
    region: &Region,
    f: Option<&[f64]>,
    threshold: Option<f64>,
) -> Result<Vec<ReplicaOutput>, CliError> {
    let eta0 = initial(ctx);
    let plan = ReplicaPlan {
        graph: &ctx.graph,
        rule: &ctx.rule,
        initial: &eta0,
        t_end: ctx.cfg.sim.t_end,
        grid: &ctx.grid,
        region,
        degradation: f,
        threshold,
        keep_logs: false,
        seed: ctx.cfg.sim.seed,
    };
    Ok(run_replicas(&plan, ctx.cfg.sim.replicas, ctx.threads)?)
}

fn series_csv(outputs: &[ReplicaOutput]) -> String {
    let with_d = outputs.first().is_some_and(|o| o.series.degradation.is_some());
    let mut out = String::from(EmpiricalSeries::csv_header(with_d));
    for o in outputs {
        o.series.write_rows(o.replica_id, &mut out);
    }
    out
}

fn grid_indices(grid: &[f64], times: &[f64]) -> Vec<usize> {
    times
        .iter()
        .filter_map(|&t| grid.iter().position(|&g| (g - t).abs() <= 1e-9 * t.abs().max(1.0)))
        .collect()
}

fn analysis_times(ctx: &Context) -> Vec<f64> {
    ctx.cfg
        .analysis
        .times
        .clone()
        .unwrap_or_else(|| vec![*ctx.grid.last().expect("non-empty grid")])
}

fn graph_info(ctx: &mut Context) -> Result<(), CliError> {
    let g = &ctx.graph;
    let dist = g.distances_from(g.center());
    let mut csv = String::from("vertex,degree,distance_from_center,interior_radius\n");
    for (v, d) in dist.iter().enumerate() {
        let r = g.interior_radius(v).map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{v},{},{d},{r}", g.neighbors(v).len());
    }
    ctx.out.write("vertices.csv", &csv)?;
    ctx.out.write("growth.csv", &growth_report(g).to_csv())?;

    let w = transitivity_witness(g);
    let csv = format!(
        "passed,degree_uniform,profiles_consistent,vertices_checked,truncated_excluded,sampled\n{},{},{},{},{},{}\n",
        w.passed, w.degree_uniform, w.profiles_consistent, w.vertices_checked, w.truncated_excluded, w.sampled
    );
    ctx.out.write("transitivity.csv", &csv)?;
    if !w.passed {
        ctx.hard_failures.push(format!("transitivity witness failed: {}", w.note));
    }

    let policy = Enumeration::default();
    let b = total_rate_bound(&ctx.rule, g, &policy)?;
    let m = influence_matrix(&ctx.rule, g, &policy)?;
    let mono = monotonicity_certificate(&ctx.rule, g, &policy)?;
    let csv = format!(
        "B,max_up,max_down,M,monotone,exact\n{},{},{},{},{},{}\n",
        b.total,
        b.max_up,
        b.max_down,
        m.m + 0.0,
        mono.passed,
        b.exact && m.exact
    );
    ctx.out.write("rule.csv", &csv)?;
    let diameter = g.diameter();
    ctx.out.write(
        "graph.csv",
        &format!("V,r,diameter\n{},{},{diameter}\n", g.len(), g.degree()),
    )?;
    let _ = writeln!(ctx.summary, "V,r,diameter\n{},{},{diameter}\n", g.len(), g.degree());
    ctx.summary.push_str(&growth_report(g).to_csv());
    let _ = writeln!(
        ctx.summary,
        "\ntransitivity witness {}, B = {}, M = {}, monotone = {}",
        if w.passed { "passed" } else { "FAILED" },
        b.total,
        m.m + 0.0,
        mono.passed
    );
    Ok(())
}

fn simulate(ctx: &mut Context) -> Result<(), CliError> {
    let region = ctx.cfg.interior(&ctx.graph, &ctx.rule)?;
    let f = ctx.cfg.degradation(ctx.rule.n_states());
    let outputs = simulate_replicas(ctx, &region, Some(&f), None)?;
    ctx.out.write("series.csv", &series_csv(&outputs))?;
    if outputs.len() >= 2 {
        let series: Vec<_> = outputs.iter().map(|o| o.series.clone()).collect();
        let est = estimate_moments(&series, &f, &grid_indices(&ctx.grid, &analysis_times(ctx)))?;
        ctx.out.write("moments.csv", &est.moments_csv())?;
        ctx.out.write("gamma.csv", &est.gamma_csv())?;
    }
    let logs = ctx.cfg.output.event_logs.unwrap_or(0).min(ctx.cfg.sim.replicas);
    if logs > 0 {
        let hash = config_hash(&ctx.cfg);
        let eta0 = initial(ctx);
        for id in 0..logs as u64 {
            let log = gillespie(&ctx.graph, &ctx.rule, &eta0, ctx.cfg.sim.t_end, ctx.cfg.sim.seed, id)?;
            ctx.out.write(&format!("events/replica_{id}.csv"), &log.to_csv(&hash))?;
        }
    }
    let _ = writeln!(
        ctx.summary,
        "{} replicas on {} sites (region of {}), {} grid points",
        outputs.len(),
        ctx.graph.len(),
        region.len(),
        ctx.grid.len()
    );
    Ok(())
}

fn exact(ctx: &mut Context) -> Result<(), CliError> {
    let g = &ctx.graph;
    let gen = build_generator(g, &ctx.rule, DEFAULT_STATE_CAP)?;
    let eta0 = initial(ctx);
    let top = (ctx.rule.n_states() - 1) as State;

    let cache = SemigroupCache::new(&gen, &eta0, &ctx.grid)?;
    let mut csv = String::from("t,site,w,p\n");
    for (i, &t) in ctx.grid.iter().enumerate() {
        for site in 0..g.len() {
            for w in 0..ctx.rule.n_states() as State {
                let _ = writeln!(csv, "{t},{site},{w},{}", cache.marginal(&gen, i, site, w));
            }
        }
    }
    ctx.out.write("marginals.csv", &csv)?;

    let reach = g.eccentricity(0);
    let exact_times = ctx.cfg.analysis.times.clone().unwrap_or_else(|| ctx.grid.clone());
    let rho = g.rho();
    let beta_offsets = match &ctx.cfg.analysis.beta {
        Some(betas) => betas
            .iter()
            .map(|&b| {
                if b > rho {
                    Ok(b - rho)
                } else {
                    Err(CliError::Flag(format!("beta = {b} must exceed the growth rate {rho}")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![1.0],
    };
    let params = CovBoundParams {
        distances: (1..=reach.min(3)).collect(),
        times: exact_times.clone(),
        beta_offsets,
        state: top,
        ..CovBoundParams::default()
    };
    let mut violations = 0;
    if !params.distances.is_empty() {
        let cov = verify_cov_bound(&gen, g, &ctx.rule, &eta0, &params)?;
        violations = cov.violations();
        ctx.out.write("cov_bound.csv", &cov.to_csv())?;
        if violations > 0 {
            ctx.hard_failures.push(format!("{violations} covariance-bound violations"));
        }
    }

    let influence = influence_matrix(&ctx.rule, g, &Enumeration::default())?;
    let mut csv = String::from("site,lhs,rhs,pass,t\n");
    let mut smooth_violations = 0;
    for &t in &exact_times {
        let r = verify_smoothness_bound(&gen, &influence, 0, top, t);
        smooth_violations += r.violations();
        csv.push_str(r.to_csv().split_once('\n').map_or("", |(_, rows)| rows));
    }
    ctx.out.write("smooth_bound.csv", &csv)?;
    if smooth_violations > 0 {
        ctx.hard_failures
            .push(format!("{smooth_violations} smoothness-bound violations"));
    }
    let _ = writeln!(
        ctx.summary,
        "state space {}, covariance-bound violations {violations}, smoothness violations {smooth_violations}",
        gen.dimension()
    );
    Ok(())
}

fn clt(ctx: &mut Context) -> Result<(), CliError> {
    let region = ctx.cfg.interior(&ctx.graph, &ctx.rule)?;
    let f = ctx.cfg.degradation(ctx.rule.n_states());
    let outputs = simulate_replicas(ctx, &region, Some(&f), None)?;
    let series: Vec<_> = outputs.into_iter().map(|o| o.series).collect();
    let times = analysis_times(ctx);
    let states: Vec<State> = (0..ctx.rule.n_states() as State).collect();
    let significance = ctx.cfg.analysis.significance.unwrap_or(DEFAULT_SIGNIFICANCE);
    let report = clt_check(&series, &times, &states, significance)?;
    ctx.out.write("clt.csv", &report.to_csv())?;
    ctx.out.write("qq.csv", &report.qq_csv())?;
    let est = estimate_moments(&series, &f, &grid_indices(&ctx.grid, &times))?;
    ctx.out.write("moments.csv", &est.moments_csv())?;
    ctx.out.write("gamma.csv", &est.gamma_csv())?;
    let rejected = report.cells.iter().filter(|c| !c.test.pass).count();
    let degenerate = report.cells.iter().filter(|c| c.test.degenerate).count();
    let _ = writeln!(
        ctx.summary,
        "{} cells tested at level {significance}: {rejected} rejected, {degenerate} degenerate",
        report.cells.len()
    );
    Ok(())
}

fn ladder(ctx: &Context) -> Result<Vec<Region>, CliError> {
    let sizes = ctx.cfg.analysis.ladder.clone().ok_or_else(|| {
        CliError::Flag("variance-scan needs analysis.ladder (box sides on a torus, ball radii on a tree)".into())
    })?;
    sizes
        .into_iter()
        .map(|s| match ctx.graph.kind() {
            GraphKind::Torus { .. } => Ok(Region::torus_box(&ctx.graph, s)?),
            _ => Ok(Region::ball(&ctx.graph, ctx.graph.center(), s)?),
        })
        .collect()
}

fn variance(ctx: &mut Context) -> Result<(), CliError> {
    let ladder = ladder(ctx)?;
    let f = ctx.cfg.degradation(ctx.rule.n_states());
    let eta0 = initial(ctx);
    let t = *analysis_times(ctx).last().expect("at least one time");
    let scan = VarianceScan {
        graph: &ctx.graph,
        rule: &ctx.rule,
        initial: &eta0,
        t,
        ladder: &ladder,
        f: &f,
        ell: ctx.cfg.analysis.ell,
        reference: None,
        replicas: ctx.cfg.sim.replicas,
        seed: ctx.cfg.sim.seed,
        threads: ctx.threads,
    };
    let report = variance_ratio_scan(&scan)?;
    ctx.out.write("varratio.csv", &report.to_csv())?;
    let _ = writeln!(
        ctx.summary,
        "t = {t}, ell = {}: boundary fraction decreasing = {}, gap shrinking = {}",
        report.ell,
        report.boundary_decreasing(),
        report.gap_shrinks()
    );
    Ok(())
}

fn hitting(ctx: &mut Context) -> Result<(), CliError> {
    let region = ctx.cfg.interior(&ctx.graph, &ctx.rule)?;
    let alpha = ctx.cfg.analysis.alpha.unwrap_or(DEFAULT_ALPHA);
    let f = ctx.cfg.degradation(ctx.rule.n_states());
    let threshold = kout_of_n(alpha.min(1.0), region.len())
        .map(|k| k.threshold)
        .unwrap_or((alpha * region.len() as f64).ceil());
    let outputs = simulate_replicas(ctx, &region, Some(&f), Some(threshold))?;
    let times: Vec<_> = outputs.iter().map(|o| o.hitting).collect();
    let series: Vec<_> = outputs.into_iter().map(|o| o.series).collect();
    let opts = HittingOptions {
        alpha,
        f: f.clone(),
        t_end: ctx.cfg.sim.t_end,
        bandwidth_c: ctx.cfg.analysis.bandwidth_c.unwrap_or(DEFAULT_BANDWIDTH_C),
        significance: ctx.cfg.analysis.significance.unwrap_or(DEFAULT_SIGNIFICANCE),
        analytic: ctx
            .cfg
            .pure_degradation_rate()
            .filter(|&l| l > 0.0 && alpha > 0.0 && alpha < 1.0)
            .map(|l| AnalyticHitting::pure_degradation(l, alpha)),
    };
    let report = hitting_analysis(&series, &times, &opts)?;
    ctx.out.write("hitting.csv", &report.times_csv())?;
    ctx.out.write("hitting_summary.csv", &report.summary_csv())?;
    if series.len() >= 2 {
        let est = estimate_moments(&series, &f, &[])?;
        ctx.out.write("moments.csv", &est.moments_csv())?;
    }
    if report.degenerate {
        let _ = writeln!(ctx.summary, "threshold {threshold} is met at time 0: every replica fails immediately");
    } else {
        let _ = write!(
            ctx.summary,
            "threshold {threshold}: t_alpha = {:.5}, m' = {:.5}, v = {:.5}, sigma2 = {:.5}, censored {}",
            report.t_alpha, report.m_prime, report.v, report.sigma2, report.censored
        );
        if let Some(t) = &report.test {
            let _ = write!(ctx.summary, ", KS {:.4} vs {:.4} ({})", t.ks, t.critical, t.pass_label());
        }
        if let Some(a) = report.analytic {
            let _ = write!(ctx.summary, " (analytic t_alpha = {:.5}, sigma2 = {:.5})", a.t_alpha, a.sigma2);
        }
        ctx.summary.push('\n');
    }
    Ok(())
}
