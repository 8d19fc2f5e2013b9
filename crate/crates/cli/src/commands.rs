use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use serde::Serialize;

use polyurn::analysis::{analyze as run_analysis, AnalysisOptions, AnalysisReport, Verdict};
use polyurn::dynamics::{flow_integrate, FlowDomain, SimplexPoint};
use polyurn::equilibria::{LimitCandidateSet, SolverOptions};
use polyurn::simulate::{
    limit_statistics, noise_diagnostics, run, trajectories_csv, LimitReport, NoiseReport, RecordFlags, Schedule,
    SimConfig,
};
use polyurn::{Error, Hypergraph};

use crate::manifest::Manifest;
use crate::{CmdResult, Common, Failure};

pub fn load_hypergraph(common: &Common) -> Result<(Hypergraph, String), Failure> {
    let source = common
        .hypergraph
        .clone()
        .ok_or_else(|| Failure::input(anyhow!("--hypergraph <path|builtin:name> is required")))?;
    let h = if source.trim_start().starts_with("builtin:") {
        Hypergraph::from_source(&source)
    } else {
        let text = std::fs::read_to_string(&source)
            .with_context(|| format!("reading {source}"))
            .map_err(Failure::input)?;
        Hypergraph::from_json(&text)
    };
    let h = h.with_context(|| format!("loading hypergraph {source}")).map_err(Failure::input)?;
    Ok((h, source))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Failure::input(anyhow!("bad {what} entry {s:?} in {text:?}"))))
        .collect()
}

fn emit_json<T: Serialize>(common: &Common, value: &T) {
    if common.json {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Extra face to solve on, as comma-separated vertices; repeatable
    #[arg(long = "support", value_name = "VERTICES")]
    supports: Vec<String>,
    /// Residual tolerance of the equilibrium solver
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
}

#[derive(Serialize)]
struct AnalyzeConfig<'a> {
    supports: &'a [Vec<usize>],
    tol: f64,
    max_iter: usize,
}

pub fn analyze(common: &Common, args: &AnalyzeArgs, manifest: &mut Manifest) -> CmdResult {
    let (h, source) = load_hypergraph(common)?;
    let supports = args
        .supports
        .iter()
        .map(|s| parse_list::<usize>(s, "support"))
        .collect::<Result<Vec<_>, _>>()?;
    manifest.arm(
        "analyze",
        Some(&source),
        AnalyzeConfig { supports: &supports, tol: args.tol, max_iter: args.max_iter },
    );
    let opts = AnalysisOptions {
        solver: SolverOptions { tol: args.tol, max_iter: args.max_iter, ..Default::default() },
        extra_supports: supports,
    };
    let report = run_analysis(&h, &opts).map_err(Failure::input)?;
    manifest.stage("analyze");
    let text = serde_json::to_string_pretty(&report).map_err(Failure::compute)?;
    manifest.output("analysis.json", &(text + "\n")).map_err(Failure::input)?;
    if common.json {
        emit_json(common, &report);
    } else {
        print_analysis(&report);
    }
    if !report.converged {
        return Err(Failure::compute(anyhow!("equilibrium solver did not converge on every support")));
    }
    Ok(())
}

fn print_analysis(r: &AnalysisReport) {
    println!("m = {}, N = {}, rank I(H) = {}, dim K = {}", r.m, r.n_edges, r.rank_incidence, r.k);
    for e in &r.equilibria {
        println!(
            "support {:?}: {:?} ({:?}, residual {:.1e})",
            e.record.support.vertices(),
            e.record.point.to_vec(),
            e.record.classification,
            e.record.residual
        );
    }
    for p in &r.pendants {
        println!("pendant: vertex {} in edge {:?}, anchor {}", p.pendant, p.edge_vertices, p.anchor);
    }
    let verdict = match r.verdict {
        Verdict::Theorem1 => "theorem1 (single limit point)",
        Verdict::Theorem2 => "theorem2 (limit set inside simplex ∩ (w + K))",
        Verdict::Boundary => "boundary (limit on the boundary of the simplex)",
    };
    println!("verdict: {verdict}");
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Initial ball counts, comma-separated (default: one per vertex)
    #[arg(long)]
    balls: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    #[arg(long, default_value_t = 4)]
    replicas: usize,
    /// `geometric:<ratio>`, `linear:<stride>` or `points:<n1,n2,...>`
    #[arg(long, default_value = "geometric:1.1")]
    schedule: String,
    /// Record the noise sequence and report its diagnostics
    #[arg(long)]
    noise: bool,
    /// Window length for noise means
    #[arg(long, default_value_t = 1000)]
    noise_window: usize,
    /// Earlier `analyze` output; distances are measured to its limit set
    #[arg(long, value_name = "FILE")]
    against_analysis: Option<PathBuf>,
}

pub fn parse_schedule(text: &str) -> Result<Schedule, Failure> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| Failure::input(anyhow!("schedule {text:?} must look like kind:argument")))?;
    let bad = || Failure::input(anyhow!("bad schedule argument in {text:?}"));
    match kind.trim() {
        "geometric" => Ok(Schedule::Geometric { ratio: arg.trim().parse().map_err(|_| bad())? }),
        "linear" => Ok(Schedule::Linear { stride: arg.trim().parse().map_err(|_| bad())? }),
        "points" => Ok(Schedule::Points { steps: parse_list(arg, "schedule point")? }),
        other => Err(Failure::input(anyhow!("unknown schedule kind {other:?}"))),
    }
}

#[derive(Serialize)]
struct CandidateSummary {
    base: Vec<f64>,
    dim: usize,
    description: String,
}

#[derive(Serialize)]
struct SimulateSummary {
    hypergraph: Hypergraph,
    config: SimConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<CandidateSummary>,
    limit: LimitReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    noise: Vec<NoiseReport>,
}

fn candidates_from(h: &Hypergraph, path: &PathBuf) -> Result<Option<LimitCandidateSet>, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)?;
    let report: AnalysisReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing analysis report {}", path.display()))
        .map_err(Failure::input)?;
    if &report.hypergraph != h {
        return Err(Failure::input(anyhow!(
            "{} was produced for a different hypergraph",
            path.display()
        )));
    }
    if report.verdict == Verdict::Boundary {
        return Ok(None);
    }
    let base = report
        .equilibria
        .into_iter()
        .next()
        .ok_or_else(|| Failure::input(anyhow!("analysis report lists no equilibria")))?
        .record;
    Ok(Some(LimitCandidateSet { base, kernel: report.kernel }))
}

pub fn simulate(common: &Common, args: &SimulateArgs, manifest: &mut Manifest) -> CmdResult {
    let (h, source) = load_hypergraph(common)?;
    let mut cfg = SimConfig::new(h.m(), common.seed, args.replicas, args.steps);
    if let Some(b) = &args.balls {
        cfg.initial_balls = parse_list(b, "ball count")?;
    }
    cfg.schedule = parse_schedule(&args.schedule)?;
    cfg.record = RecordFlags { noise: args.noise, ..Default::default() };
    cfg.validate(&h).map_err(Failure::input)?;
    let candidates = match &args.against_analysis {
        Some(p) => candidates_from(&h, p)?,
        None => None,
    };
    manifest.arm("simulate", Some(&source), &cfg);

    let results = run(&h, &cfg).map_err(Failure::compute)?;
    manifest.stage("simulate");
    let limit = limit_statistics(&h, &results, candidates.as_ref());
    let noise = if args.noise {
        results
            .iter()
            .map(|r| noise_diagnostics(&r.noise, cfg.initial_balls.iter().sum(), h.n_edges(), args.noise_window))
            .collect()
    } else {
        Vec::new()
    };
    manifest.stage("statistics");

    manifest.output("trajectories.csv", &trajectories_csv(&results)).map_err(Failure::input)?;
    let summary = SimulateSummary {
        hypergraph: h,
        candidates: candidates.map(|c| CandidateSummary {
            base: c.base.point.to_vec(),
            dim: c.dim(),
            description: c.describe(),
        }),
        config: cfg,
        limit,
        noise,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(Failure::compute)?;
    manifest.output("summary.json", &(text + "\n")).map_err(Failure::input)?;
    manifest.stage("write");

    if common.json {
        emit_json(common, &summary);
    } else {
        for r in &summary.limit.replicas {
            let terminal = &results[r.replica].terminal;
            println!(
                "replica {}: terminal {:?}, min coordinate {:.4}{}",
                r.replica,
                terminal.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>(),
                r.min_coordinate,
                r.distance.map(|d| format!(", distance to limit set {d:.4}")).unwrap_or_default()
            );
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Starting point, comma-separated, renormalized onto the simplex (default: uniform)
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 100.0)]
    t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Domain cutoff c in (0, 1/N): the flow must keep every v_I >= c (default 1/(2N))
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Serialize)]
struct FlowConfig {
    start: Vec<f64>,
    t_end: f64,
    dt: f64,
    c: f64,
}

#[derive(Serialize)]
struct FlowSummary {
    terminal: Vec<f64>,
    t: f64,
    lyapunov_start: f64,
    lyapunov_end: f64,
    max_lyapunov_drop: f64,
    rows: usize,
}

pub fn flow(common: &Common, args: &FlowArgs, manifest: &mut Manifest) -> CmdResult {
    let (h, source) = load_hypergraph(common)?;
    let start = match &args.start {
        Some(s) => {
            let v: Vec<f64> = parse_list(s, "start coordinate")?;
            if v.len() != h.m() {
                return Err(Failure::input(anyhow!("start has {} coordinates, hypergraph has {}", v.len(), h.m())));
            }
            SimplexPoint::new(v).map_err(Failure::input)?
        }
        None => SimplexPoint::uniform(h.m()),
    };
    let domain = match args.c {
        Some(c) => FlowDomain::new(&h, c).map_err(Failure::input)?,
        None => FlowDomain::default_for(&h),
    };
    manifest.arm(
        "flow",
        Some(&source),
        FlowConfig { start: start.to_vec(), t_end: args.t_end, dt: args.dt, c: domain.cutoff() },
    );
    let traj = flow_integrate(&h, &start, domain, args.t_end, args.dt).map_err(|e| match e {
        Error::StepTooLarge { .. } | Error::DomainExit { .. } => Failure::compute(e),
        other => Failure::input(other),
    })?;
    manifest.stage("integrate");
    manifest.output("flow.csv", &traj.to_csv()).map_err(Failure::input)?;
    let last = traj.last().expect("at least the starting sample");
    let summary = FlowSummary {
        terminal: last.v.to_vec(),
        t: last.t,
        lyapunov_start: traj.samples[0].lyapunov,
        lyapunov_end: last.lyapunov,
        max_lyapunov_drop: traj.max_lyapunov_drop(),
        rows: traj.samples.len(),
    };
    if common.json {
        emit_json(common, &summary);
    } else {
        println!(
            "t = {}: v = {:?}, L {:.6} -> {:.6}",
            summary.t, summary.terminal, summary.lyapunov_start, summary.lyapunov_end
        );
    }
    Ok(())
}
