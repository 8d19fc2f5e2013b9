use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use serde::Serialize;

use polyurn::svg::LineChart;

use crate::manifest::Manifest;
use crate::{CmdResult, Common, Failure};

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Trajectory CSVs from `simulate` or flow CSVs from `flow`
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Logarithmic x axis
    #[arg(long)]
    log_x: bool,
    /// For flow CSVs, also plot L(t) and check it never decreases
    #[arg(long)]
    show_lyapunov: bool,
}

/// Rows of `replica,n,x0,...` grouped by replica.
type Replicas = BTreeMap<usize, Vec<(f64, Vec<f64>)>>;

enum Table {
    Trajectories { m: usize, replicas: Replicas },
    Flow { m: usize, rows: Vec<(f64, Vec<f64>, f64)> },
}

fn parse_num(s: &str, path: &Path, line: usize) -> anyhow::Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| anyhow!("{}:{line}: not a number: {s:?}", path.display()))
}

fn read_table(path: &Path) -> anyhow::Result<Table> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = rdr
        .headers()
        .with_context(|| format!("reading header of {}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    let flow = headers.first().map(String::as_str) == Some("t") && headers.last().map(String::as_str) == Some("L");
    let traj = headers.len() > 2 && headers[0] == "replica" && headers[1] == "n";
    if !flow && !traj {
        bail!("{}: unrecognized header {:?}", path.display(), headers.join(","));
    }
    let width = headers.len();
    let mut replicas = Replicas::new();
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx + 2;
        let rec = rec.with_context(|| format!("{}:{line}", path.display()))?;
        if rec.len() != width {
            bail!("{}:{line}: expected {width} fields, found {}", path.display(), rec.len());
        }
        let nums = rec.iter().map(|s| parse_num(s, path, line)).collect::<anyhow::Result<Vec<_>>>()?;
        if traj {
            replicas
                .entry(nums[0] as usize)
                .or_default()
                .push((nums[1], nums[2..].to_vec()));
        } else {
            rows.push((nums[0], nums[1..width - 1].to_vec(), nums[width - 1]));
        }
    }
    if replicas.is_empty() && rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(if traj {
        Table::Trajectories { m: width - 2, replicas }
    } else {
        Table::Flow { m: width - 2, rows }
    })
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" | ")
}

fn header_row(prefix: &str, m: usize, first: &[&str], last: &[&str]) -> String {
    let cols: Vec<String> = first
        .iter()
        .map(|s| s.to_string())
        .chain((0..m).map(|i| format!("{prefix}{i}")))
        .chain(last.iter().map(|s| s.to_string()))
        .collect();
    format!("| {} |\n|{}\n", cols.join(" | "), "---|".repeat(cols.len()))
}

pub fn run(_common: &Common, args: &ReportArgs, manifest: &mut Manifest) -> CmdResult {
    manifest.arm("report", None, args);
    let mut md = String::from("# Report\n");
    let mut stems = HashSet::new();
    for (idx, path) in args.inputs.iter().enumerate() {
        let table = read_table(path).map_err(Failure::input)?;
        let mut stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
        if !stems.insert(stem.clone()) {
            stem = format!("{stem}_{idx}");
            stems.insert(stem.clone());
        }
        let _ = writeln!(md, "\n## {}\n", path.display());
        match table {
            Table::Trajectories { m, replicas } => {
                md.push_str(&header_row("x", m, &["replica", "n"], &["min x_i"]));
                for (r, samples) in &replicas {
                    let mut chart = LineChart::new(format!("{stem}, replica {r}"), "n", "x_i(n)");
                    chart.log_x = args.log_x;
                    for i in 0..m {
                        chart.push(format!("x{i}"), samples.iter().map(|(n, x)| (*n, x[i])).collect());
                    }
                    let name = format!("{stem}_r{r}.svg");
                    manifest.output(&name, &chart.render()).map_err(Failure::input)?;
                    let (n, x) = samples.last().expect("replica groups are non-empty");
                    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
                    let _ = writeln!(md, "| {r} | {n} | {} | {min:.4} |", fmt_row(x));
                }
                let _ = writeln!(md, "\n{} replica chart(s): `{stem}_r<k>.svg`", replicas.len());
            }
            Table::Flow { m, rows } => {
                let mut chart = LineChart::new(format!("{stem}: v(t)"), "t", "v_i(t)");
                chart.log_x = args.log_x;
                for i in 0..m {
                    chart.push(format!("v{i}"), rows.iter().map(|(t, v, _)| (*t, v[i])).collect());
                }
                manifest.output(&format!("{stem}.svg"), &chart.render()).map_err(Failure::input)?;
                let max_drop = rows.windows(2).map(|w| w[0].2 - w[1].2).fold(0.0, f64::max);
                if args.show_lyapunov {
                    let mut l = LineChart::new(format!("{stem}: L(v(t))"), "t", "L");
                    l.log_x = args.log_x;
                    l.push("L", rows.iter().map(|(t, _, l)| (*t, *l)).collect());
                    manifest.output(&format!("{stem}_lyapunov.svg"), &l.render()).map_err(Failure::input)?;
                }
                md.push_str(&header_row("v", m, &["t"], &["L"]));
                for (t, v, l) in [rows.first(), rows.last()].into_iter().flatten() {
                    let _ = writeln!(md, "| {t} | {} | {l:.6} |", fmt_row(v));
                }
                if args.show_lyapunov {
                    let verdict = if max_drop <= 1e-9 { "non-decreasing" } else { "DECREASES" };
                    let _ = writeln!(md, "\nL along the flow: {verdict} (largest step drop {max_drop:.2e})");
                }
            }
        }
    }
    manifest.stage("render");
    manifest.output("report.md", &md).map_err(Failure::input)?;
    println!("{md}");
    Ok(())
}
