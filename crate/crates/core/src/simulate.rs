//! Exact simulation of the urn process and replica statistics.
//!
//! Ball counts are `u64` and every draw uses exact integer weights, so the
//! process itself carries no floating-point error. Proportions are converted
//! to floats only when sampled.
//!
//! Replica `r` of a run seeded with `seed` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `r`
//! (`rand_chacha` 0.9.0, pinned). Streams are independent, so replicas are
//! reproducible on their own and in any order.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{edge_sum, TangentVector};
use crate::equilibria::LimitCandidateSet;
use crate::exactlin::Rational;
use crate::{Error, Hypergraph, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    balls: Vec<u64>,
    n: u64,
    n0: u64,
}

impl UrnState {
    pub fn new(initial: Vec<u64>) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::InvalidConfig("no bins".into()));
        }
        if let Some(i) = initial.iter().position(|&b| b == 0) {
            return Err(Error::InvalidConfig(format!(
                "vertex {i} starts with zero balls"
            )));
        }
        let n0 = initial
            .iter()
            .try_fold(0u64, |a, &b| a.checked_add(b))
            .ok_or(Error::Overflow { vertex: 0 })?;
        Ok(UrnState {
            balls: initial,
            n: 0,
            n0,
        })
    }

    pub fn ones(m: usize) -> Self {
        Self::new(vec![1; m]).expect("nonempty")
    }

    pub fn balls(&self) -> &[u64] {
        &self.balls
    }

    /// Steps taken so far.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Initial total `N0`.
    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn total(&self) -> u128 {
        self.balls.iter().map(|&b| b as u128).sum()
    }

    pub fn proportions(&self) -> Vec<f64> {
        let t = self.total() as f64;
        self.balls.iter().map(|&b| b as f64 / t).collect()
    }

    pub fn proportions_exact(&self) -> Vec<Rational> {
        let t = BigInt::from(self.total());
        self.balls
            .iter()
            .map(|&b| Rational::new(BigInt::from(b), t.clone()))
            .collect()
    }

    /// Throws one ball at every hyperedge; returns the per-vertex increments
    /// `C(n+1)`.
    pub fn advance<R: Rng + ?Sized>(&mut self, h: &Hypergraph, rng: &mut R) -> Result<Vec<u64>> {
        let mut added = vec![0u64; self.balls.len()];
        for e in h.edges() {
            let weight: u128 = e.iter().map(|&i| self.balls[i] as u128).sum();
            let mut r = rng.random_range(0..weight);
            let chosen = e
                .iter()
                .copied()
                .find(|&i| {
                    let b = self.balls[i] as u128;
                    if r < b {
                        true
                    } else {
                        r -= b;
                        false
                    }
                })
                .expect("draw below total weight");
            added[chosen] += 1;
        }
        for (i, c) in added.iter().enumerate() {
            self.balls[i] = self.balls[i]
                .checked_add(*c)
                .ok_or(Error::Overflow { vertex: i })?;
        }
        self.n += 1;
        Ok(added)
    }
}

/// Realized noise `u_n = ξ(n) - E[ξ(n) | past]` at step `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSample {
    pub n: u64,
    pub u: TangentVector,
}

/// `u_i = (1/N) (C_i - Σ_{I ∋ i} B_i / B_I)`; the expectation is exact.
fn noise(h: &Hypergraph, before: &UrnState, added: &[u64]) -> NoiseSample {
    let m = before.balls.len();
    let mut expected = vec![Rational::zero(); m];
    for e in h.edges() {
        let total: u128 = e.iter().map(|&i| before.balls[i] as u128).sum();
        let total = BigInt::from(total);
        for &i in e {
            expected[i] += Rational::new(BigInt::from(before.balls[i]), total.clone());
        }
    }
    let n_edges = Rational::from_integer(BigInt::from(h.n_edges()));
    let u: Vec<f64> = expected
        .iter()
        .zip(added)
        .map(|(ex, &c)| {
            let v = (Rational::from_integer(BigInt::from(c)) - ex) / &n_edges;
            v.to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    NoiseSample {
        n: before.n,
        u: TangentVector::new(u).expect("noise sums to zero"),
    }
}

/// One step of the process, leaving `state` untouched.
pub fn step<R: Rng + ?Sized>(
    h: &Hypergraph,
    state: &UrnState,
    rng: &mut R,
    record_noise: bool,
) -> Result<(UrnState, Option<NoiseSample>)> {
    let mut next = state.clone();
    let added = next.advance(h, rng)?;
    let sample = record_noise.then(|| noise(h, state, &added));
    Ok((next, sample))
}

/// `γ_n = 1 / (N0/N + n + 1)`.
pub fn gamma(n: u64, n0: u64, n_edges: usize) -> f64 {
    let n_edges = n_edges as f64;
    n_edges / (n0 as f64 + (n as f64 + 1.0) * n_edges)
}

pub fn gamma_exact(n: u64, n0: u64, n_edges: usize) -> Rational {
    let ne = BigInt::from(n_edges);
    Rational::new(ne.clone(), BigInt::from(n0) + (BigInt::from(n) + 1) * ne)
}

/// Verifies `x(n+1) - x(n) = γ_n (-x(n) + C(n+1)/N)` coordinatewise in exact
/// arithmetic, together with ball conservation.
pub fn saa_identity_check(h: &Hypergraph, before: &UrnState, after: &UrnState) -> bool {
    let m = before.balls.len();
    if after.balls.len() != m || after.n != before.n + 1 || after.n0 != before.n0 {
        return false;
    }
    let n_edges = h.n_edges() as u128;
    let conserved = |s: &UrnState| s.total() == s.n0 as u128 + s.n as u128 * n_edges;
    if !conserved(before) || !conserved(after) {
        return false;
    }
    let stars = h.stars();
    let mut added = Vec::with_capacity(m);
    for i in 0..m {
        match after.balls[i].checked_sub(before.balls[i]) {
            Some(c) if c as usize <= stars[i].len() => added.push(c),
            _ => return false,
        }
    }
    let g = gamma_exact(before.n, before.n0, h.n_edges());
    let ne = Rational::from_integer(BigInt::from(h.n_edges()));
    let x0 = before.proportions_exact();
    let x1 = after.proportions_exact();
    (0..m).all(|i| {
        let xi = Rational::from_integer(BigInt::from(added[i])) / &ne;
        &x1[i] - &x0[i] == &g * (xi - &x0[i])
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// Every `stride` steps.
    Linear { stride: u64 },
    /// `n_{k+1} = max(n_k + 1, ceil(n_k · ratio))`, starting from 1.
    Geometric { ratio: f64 },
    /// Exactly these steps.
    Points { steps: Vec<u64> },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Geometric { ratio: 1.1 }
    }
}

impl Schedule {
    /// Sample steps in `0..=steps`, always including both ends.
    pub fn sample_steps(&self, steps: u64) -> Vec<u64> {
        let mut out = vec![0];
        match self {
            Schedule::Linear { stride } => {
                let stride = (*stride).max(1);
                out.extend((1..=steps / stride).map(|k| k * stride));
            }
            Schedule::Geometric { ratio } => {
                let mut n = 1u64;
                while n <= steps {
                    out.push(n);
                    n = (n + 1).max((n as f64 * ratio).ceil() as u64);
                }
            }
            Schedule::Points { steps: pts } => out.extend(pts.iter().copied().filter(|&p| p <= steps)),
        }
        out.push(steps);
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFlags {
    pub trajectory: bool,
    pub terminal: bool,
    pub noise: bool,
}

impl Default for RecordFlags {
    fn default() -> Self {
        RecordFlags {
            trajectory: true,
            terminal: true,
            noise: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub replicas: usize,
    pub steps: u64,
    pub initial_balls: Vec<u64>,
    pub schedule: Schedule,
    pub record: RecordFlags,
}

impl SimConfig {
    /// One ball per vertex, default schedule and flags.
    pub fn new(m: usize, seed: u64, replicas: usize, steps: u64) -> Self {
        SimConfig {
            seed,
            replicas,
            steps,
            initial_balls: vec![1; m],
            schedule: Schedule::default(),
            record: RecordFlags::default(),
        }
    }

    pub fn validate(&self, h: &Hypergraph) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidConfig("replicas must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.initial_balls.len() != h.m() {
            return Err(Error::InvalidConfig(format!(
                "{} initial ball counts for {} vertices",
                self.initial_balls.len(),
                h.m()
            )));
        }
        if self.initial_balls.contains(&0) {
            return Err(Error::InvalidConfig("initial ball counts must be at least 1".into()));
        }
        if let Schedule::Geometric { ratio } = self.schedule {
            if !(ratio > 1.0 && ratio.is_finite()) {
                return Err(Error::InvalidConfig(format!("geometric ratio {ratio} must exceed 1")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub n: u64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaResult {
    pub replica: usize,
    pub samples: Vec<TrajectorySample>,
    pub terminal: Vec<f64>,
    pub terminal_balls: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<NoiseSample>,
}

impl ReplicaResult {
    /// Proportions at step `n`, if sampled.
    pub fn at(&self, n: u64) -> Option<&[f64]> {
        self.samples
            .binary_search_by_key(&n, |s| s.n)
            .ok()
            .map(|i| self.samples[i].x.as_slice())
    }
}

pub fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// Runs a single replica.
pub fn run_replica(h: &Hypergraph, cfg: &SimConfig, replica: usize) -> Result<ReplicaResult> {
    let mut rng = replica_rng(cfg.seed, replica);
    let mut state = UrnState::new(cfg.initial_balls.clone())?;
    let checkpoints = cfg.schedule.sample_steps(cfg.steps);
    let mut next_cp = 0;
    let mut samples = Vec::new();
    let mut noise_log = Vec::new();
    loop {
        if cfg.record.trajectory && checkpoints.get(next_cp) == Some(&state.n) {
            samples.push(TrajectorySample {
                n: state.n,
                x: state.proportions(),
            });
            next_cp += 1;
        }
        if state.n == cfg.steps {
            break;
        }
        if cfg.record.noise {
            let before = state.clone();
            let added = state.advance(h, &mut rng)?;
            noise_log.push(noise(h, &before, &added));
        } else {
            state.advance(h, &mut rng)?;
        }
    }
    Ok(ReplicaResult {
        replica,
        samples,
        terminal: if cfg.record.terminal { state.proportions() } else { Vec::new() },
        terminal_balls: state.balls,
        noise: noise_log,
    })
}

/// Runs every replica (in parallel with the `parallel` feature); results are
/// in replica order.
pub fn run(h: &Hypergraph, cfg: &SimConfig) -> Result<Vec<ReplicaResult>> {
    cfg.validate(h)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.replicas)
            .into_par_iter()
            .map(|r| run_replica(h, cfg, r))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.replicas).map(|r| run_replica(h, cfg, r)).collect()
    }
}

/// `replica,n,x0,...,x{m-1}`, one row per sample.
pub fn trajectories_csv(results: &[ReplicaResult]) -> String {
    let m = results
        .iter()
        .find_map(|r| r.samples.first().map(|s| s.x.len()))
        .unwrap_or(0);
    let mut out = String::from("replica,n");
    for i in 0..m {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for r in results {
        for s in &r.samples {
            out.push_str(&format!("{},{}", r.replica, s.n));
            for x in &s.x {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub n: u64,
    pub distance: Option<f64>,
    pub edge_deviation: Option<f64>,
    pub min_coordinate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaLimitStats {
    pub replica: usize,
    /// Euclidean distance of the terminal point to `w + K`.
    pub distance: Option<f64>,
    /// `max_I |x_I - w_I|` at the terminal point.
    pub edge_deviation: Option<f64>,
    pub min_coordinate: f64,
    pub trend: Vec<TrendPoint>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Aggregate {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: median_sorted(&v),
            max: *v.last().unwrap(),
        })
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}

fn median_sorted(v: &[f64]) -> f64 {
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub replicas: Vec<ReplicaLimitStats>,
    pub distance: Option<Aggregate>,
    pub edge_deviation: Option<Aggregate>,
    pub min_coordinate: Option<Aggregate>,
}

/// Distances of sampled and terminal points to the candidate limit set. With
/// no candidate set (boundary case) only minimum coordinates are reported.
pub fn limit_statistics(
    h: &Hypergraph,
    results: &[ReplicaResult],
    candidates: Option<&LimitCandidateSet>,
) -> LimitReport {
    let projector = candidates.map(|c| c.projector());
    let base_sums: Option<Vec<f64>> =
        candidates.map(|c| h.edges().iter().map(|e| edge_sum(&c.base.point, e)).collect());
    let measure = |x: &[f64]| {
        let distance = projector
            .as_ref()
            .zip(candidates)
            .map(|(p, c)| p.distance(x, &c.base.point));
        let edge_deviation = base_sums.as_ref().map(|w| {
            h.edges()
                .iter()
                .zip(w)
                .map(|(e, wi)| (edge_sum(x, e) - wi).abs())
                .fold(0.0, f64::max)
        });
        let min_coordinate = x.iter().copied().fold(f64::INFINITY, f64::min);
        (distance, edge_deviation, min_coordinate)
    };
    let replicas: Vec<ReplicaLimitStats> = results
        .iter()
        .map(|r| {
            let terminal = if r.terminal.is_empty() {
                r.samples.last().map(|s| s.x.as_slice()).unwrap_or(&[])
            } else {
                &r.terminal
            };
            let (distance, edge_deviation, min_coordinate) = measure(terminal);
            let trend = r
                .samples
                .iter()
                .map(|s| {
                    let (distance, edge_deviation, min_coordinate) = measure(&s.x);
                    TrendPoint {
                        n: s.n,
                        distance,
                        edge_deviation,
                        min_coordinate,
                    }
                })
                .collect();
            ReplicaLimitStats {
                replica: r.replica,
                distance,
                edge_deviation,
                min_coordinate,
                trend,
            }
        })
        .collect();
    let collect = |f: &dyn Fn(&ReplicaLimitStats) -> Option<f64>| -> Vec<f64> {
        replicas.iter().filter_map(f).collect()
    };
    LimitReport {
        distance: Aggregate::of(&collect(&|r| r.distance)),
        edge_deviation: Aggregate::of(&collect(&|r| r.edge_deviation)),
        min_coordinate: Aggregate::of(&collect(&|r| Some(r.min_coordinate))),
        replicas,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    pub start: usize,
    pub len: usize,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    /// `max_i |mean_i| / std_err_i` (coordinates with zero spread skipped).
    pub max_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub samples: usize,
    pub max_abs_sum: f64,
    pub max_sup_norm: f64,
    pub windows: Vec<WindowStat>,
    /// Final value of `M_n = Σ_{i<n} γ_i u_i`.
    pub martingale_final: Vec<f64>,
    /// `(n, oscillation of M over [n/2, n])` for `n` = len, len/2, len/4, ...
    pub oscillations: Vec<(usize, f64)>,
    pub gamma_sq_partial: f64,
    /// `1/(a+1)² + 1/(a+1)` with `a = N0/N`, bounding the full series.
    pub gamma_sq_bound: f64,
}

/// Partial sums `M_0 = 0, M_{k+1} = M_k + γ_{n_k} u_{n_k}`.
pub fn martingale_path(log: &[NoiseSample], n0: u64, n_edges: usize) -> Vec<Vec<f64>> {
    let m = log.first().map_or(0, |s| s.u.len());
    let mut path = Vec::with_capacity(log.len() + 1);
    let mut acc = vec![0.0; m];
    path.push(acc.clone());
    for s in log {
        let g = gamma(s.n, n0, n_edges);
        acc.iter_mut().zip(s.u.iter()).for_each(|(a, u)| *a += g * u);
        path.push(acc.clone());
    }
    path
}

/// `max_i (max - min)` of `M_{k,i}` over `k ∈ [end/2, end]`.
pub fn oscillation(path: &[Vec<f64>], end: usize) -> f64 {
    let end = end.min(path.len().saturating_sub(1));
    let window = &path[end / 2..=end];
    let m = window.first().map_or(0, Vec::len);
    (0..m)
        .map(|i| {
            let (lo, hi) = window
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[i]), hi.max(p[i])));
            hi - lo
        })
        .fold(0.0, f64::max)
}

pub fn noise_diagnostics(log: &[NoiseSample], n0: u64, n_edges: usize, window: usize) -> NoiseReport {
    let m = log.first().map_or(0, |s| s.u.len());
    let window = window.max(2);
    let mut windows = Vec::new();
    let mut start = 0;
    while start + window <= log.len() {
        let chunk = &log[start..start + window];
        let k = chunk.len() as f64;
        let mean: Vec<f64> = (0..m).map(|i| chunk.iter().map(|s| s.u[i]).sum::<f64>() / k).collect();
        let std_err: Vec<f64> = (0..m)
            .map(|i| {
                let var = chunk.iter().map(|s| (s.u[i] - mean[i]).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            })
            .collect();
        let max_z = mean
            .iter()
            .zip(&std_err)
            .filter(|(_, se)| **se > 0.0)
            .map(|(mu, se)| mu.abs() / se)
            .fold(0.0, f64::max);
        windows.push(WindowStat {
            start,
            len: window,
            mean,
            std_err,
            max_z,
        });
        start += window;
    }
    let path = martingale_path(log, n0, n_edges);
    let mut oscillations = Vec::new();
    let mut end = log.len();
    while end >= 2 {
        oscillations.push((end, oscillation(&path, end)));
        end /= 2;
    }
    let a = n0 as f64 / n_edges as f64;
    NoiseReport {
        samples: log.len(),
        max_abs_sum: log.iter().map(|s| s.u.iter().sum::<f64>().abs()).fold(0.0, f64::max),
        max_sup_norm: log.iter().map(|s| s.u.sup_norm()).fold(0.0, f64::max),
        windows,
        martingale_final: path.last().cloned().unwrap_or_default(),
        oscillations,
        gamma_sq_partial: log.iter().map(|s| gamma(s.n, n0, n_edges).powi(2)).sum(),
        gamma_sq_bound: 1.0 / (a + 1.0).powi(2) + 1.0 / (a + 1.0),
    }
}
