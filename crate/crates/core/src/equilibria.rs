//! Equilibria of `F` on faces of the simplex.
//!
//! On a face `Δ_S` (coordinates outside `S` are zero) the restriction of `L`
//! is concave, and its maximizers are exactly the `S`-singularities: points
//! where `∂L/∂v_i = 0` for every `i ∈ S`. Two maximizers on the same face
//! differ by an element of `K`, because `L` depends on `v` only through the
//! edge sums `v_I` and is strictly concave in them.
//!
//! The solver iterates the multiplicative map
//! `v_i ← (v_i / N) Σ_{I ∋ i} 1/v_I`, which equals `v + F(v)`, keeps the
//! simplex, and never decreases `L`. Any iterate that would lower `L` (which
//! can only happen through rounding) is replaced by a projected-gradient step
//! with backtracking.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{edge_sum, grad_l, lyapunov, SimplexPoint};
use crate::exactlin::{kernel_gamma, AffineProjector, KernelBasis};
use crate::{Error, Hypergraph, Result};

/// Nonempty sorted vertex set that meets every hyperedge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support(Vec<usize>);

impl Support {
    pub fn new(h: &Hypergraph, mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::InvalidSupport("support is empty".into()));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= h.m()) {
            return Err(Error::InvalidSupport(format!(
                "vertex {v} out of range for m = {}",
                h.m()
            )));
        }
        if let Some(edge) = h
            .edges()
            .iter()
            .position(|e| !e.iter().any(|i| vertices.binary_search(i).is_ok()))
        {
            return Err(Error::EdgeMissesSupport { edge });
        }
        Ok(Support(vertices))
    }

    pub fn full(h: &Hypergraph) -> Self {
        Support((0..h.m()).collect())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Unstable,
    NonUnstable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Unstable => "unstable",
            Classification::NonUnstable => "non_unstable",
        })
    }
}

/// Numerical thresholds for the unstable / non-unstable dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Coordinates below this count as zero.
    pub eps_zero: f64,
    /// Gradients above this count as positive.
    pub eps: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            eps_zero: 1e-9,
            eps: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once `‖F(v)‖∞` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep `L` at every accepted iterate.
    pub record_trace: bool,
    pub thresholds: Thresholds,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
            record_trace: false,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub point: SimplexPoint,
    /// The face the solver was restricted to.
    pub support: Support,
    /// `∇L` at `point`.
    pub gradient: Vec<f64>,
    pub classification: Classification,
    /// A vertex with zero mass and positive gradient, when unstable.
    pub witness: Option<usize>,
    /// `max_i |point_i · gradient_i| = ‖F(point)‖∞`.
    pub residual: f64,
    pub lyapunov: f64,
    pub iterations: usize,
    /// Number of projected-gradient fallback steps taken.
    pub fallback_steps: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
}

impl EquilibriumRecord {
    /// Builds a record for an arbitrary point, evaluating gradient and class.
    pub fn at(h: &Hypergraph, point: SimplexPoint, support: Support, thresholds: Thresholds) -> Result<Self> {
        let gradient = grad_l(h, &point)?;
        let residual = point
            .iter()
            .zip(&gradient)
            .fold(0.0f64, |a, (x, g)| a.max((x * g).abs()));
        let (classification, witness) = classify_point(&point, &gradient, thresholds);
        let lyapunov = lyapunov(h, &point)?;
        Ok(EquilibriumRecord {
            point,
            support,
            gradient,
            classification,
            witness,
            residual,
            lyapunov,
            iterations: 0,
            fallback_steps: 0,
            trace: Vec::new(),
        })
    }

    pub fn is_interior(&self, thresholds: Thresholds) -> bool {
        self.point.iter().all(|&x| x >= thresholds.eps_zero)
    }
}

fn classify_point(point: &[f64], gradient: &[f64], t: Thresholds) -> (Classification, Option<usize>) {
    match (0..point.len()).find(|&i| point[i] < t.eps_zero && gradient[i] > t.eps) {
        Some(i) => (Classification::Unstable, Some(i)),
        None => (Classification::NonUnstable, None),
    }
}

/// Unstable iff some coordinate is (numerically) zero while its gradient is
/// (numerically) positive.
pub fn classify(h: &Hypergraph, rec: &EquilibriumRecord, thresholds: Thresholds) -> Result<Classification> {
    let g = grad_l(h, &rec.point)?;
    Ok(classify_point(&rec.point, &g, thresholds).0)
}

/// Maximizes `L` on the face `Δ_S`.
pub fn find_equilibrium(
    h: &Hypergraph,
    support: &Support,
    start: Option<&SimplexPoint>,
    opts: &SolverOptions,
) -> Result<EquilibriumRecord> {
    let m = h.m();
    let mut v: Vec<f64> = match start {
        Some(s) => {
            if s.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: s.len() });
            }
            if (0..m).any(|i| (s[i] > 0.0) != support.contains(i)) {
                return Err(Error::InvalidSupport(
                    "start must be positive exactly on the support".into(),
                ));
            }
            s.to_vec()
        }
        None => SimplexPoint::uniform_on(m, support.vertices())?.into_vec(),
    };
    let inv_n = 1.0 / h.n_edges() as f64;
    let mut l = lyapunov(h, &v)?;
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(l);
    }
    let mut fallback_steps = 0;
    let mut iterations = 0;
    let mut stalled = false;
    loop {
        let g = grad_l(h, &v)?;
        let residual = v.iter().zip(&g).fold(0.0f64, |a, (x, gi)| a.max((x * gi).abs()));
        if residual < opts.tol || iterations >= opts.max_iter || stalled {
            let point = SimplexPoint::new(v)?;
            let mut rec = EquilibriumRecord::at(h, point, support.clone(), opts.thresholds)?;
            rec.iterations = iterations;
            rec.fallback_steps = fallback_steps;
            rec.trace = trace;
            if residual < opts.tol {
                return Ok(rec);
            }
            return Err(Error::NoConvergence {
                iterations,
                residual: rec.residual,
                best: Box::new(rec),
            });
        }
        iterations += 1;

        let sums: Vec<f64> = h.edges().iter().map(|e| edge_sum(&v, e)).collect();
        let mut next = vec![0.0; m];
        for (e, s) in h.edges().iter().zip(&sums) {
            for &i in e {
                next[i] += v[i] * inv_n / s;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let l_next = lyapunov(h, &next)?;
        let slack = 4.0 * f64::EPSILON * l.abs().max(1.0);
        if l_next >= l - slack {
            v = next;
            l = l_next;
        } else {
            fallback_steps += 1;
            match projected_gradient_step(h, support, &v, &g, l)? {
                Some((p, lp)) => {
                    v = p;
                    l = lp;
                }
                None => stalled = true,
            }
        }
        if opts.record_trace {
            trace.push(l);
        }
    }
}

/// One ascent step along the face-projected gradient, halving the step
/// until `L` increases. `None` when no step helps.
fn projected_gradient_step(
    h: &Hypergraph,
    support: &Support,
    v: &[f64],
    g: &[f64],
    l: f64,
) -> Result<Option<(Vec<f64>, f64)>> {
    let idx = support.vertices();
    let mut step = 1.0;
    for _ in 0..60 {
        let moved: Vec<f64> = idx.iter().map(|&i| v[i] + step * g[i]).collect();
        let projected = project_to_simplex(&moved);
        let mut cand = vec![0.0; v.len()];
        for (&i, x) in idx.iter().zip(projected) {
            cand[i] = x;
        }
        if let Ok(lc) = lyapunov(h, &cand) {
            if lc > l {
                return Ok(Some((cand, lc)));
            }
        }
        step *= 0.5;
    }
    Ok(None)
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
fn project_to_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Whether `a` and `b` lie in one coset of `span(K)`, within `tol`.
pub fn coset_check(a: &EquilibriumRecord, b: &EquilibriumRecord, k: &KernelBasis, tol: f64) -> bool {
    AffineProjector::new(k).distance(&a.point, &b.point) < tol
}

/// `𝒥 = simplex ∩ (w + K)` for an interior non-unstable equilibrium `w`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitCandidateSet {
    pub base: EquilibriumRecord,
    pub kernel: KernelBasis,
}

impl LimitCandidateSet {
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn projector(&self) -> AffineProjector {
        AffineProjector::new(&self.kernel)
    }

    pub fn describe(&self) -> String {
        if self.dim() == 0 {
            "single point {w}".to_string()
        } else {
            format!("simplex ∩ (w + K), dim K = {}", self.dim())
        }
    }

    /// Random points of `𝒥`: `w + t·d` for a random direction `d ∈ K`, with
    /// `t` uniform over the range that keeps all coordinates nonnegative.
    pub fn sample_points<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<SimplexPoint> {
        let w: &[f64] = &self.base.point;
        if self.dim() == 0 {
            return vec![self.base.point.clone(); count];
        }
        let basis = self.kernel.vectors_f64();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut d = vec![0.0; w.len()];
            for b in &basis {
                let c: f64 = rng.random_range(-1.0..1.0);
                d.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
            }
            let (lo, hi) = feasible_interval(w, &d, |_| 0.0);
            if !(lo < hi) {
                continue;
            }
            let t = rng.random_range(lo..=hi);
            let p: Vec<f64> = w.iter().zip(&d).map(|(a, b)| (a + t * b).max(0.0)).collect();
            if let Ok(p) = SimplexPoint::new(p) {
                out.push(p);
            }
        }
        out
    }
}

/// Range of `t` with `w_i + t d_i >= floor(i)` for all `i`.
fn feasible_interval(w: &[f64], d: &[f64], floor: impl Fn(usize) -> f64) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..w.len() {
        let slack = w[i] - floor(i);
        if d[i] > 1e-15 {
            lo = lo.max(-slack / d[i]);
        } else if d[i] < -1e-15 {
            hi = hi.min(slack / -d[i]);
        }
    }
    (lo, hi)
}

/// Full-support solve; `BoundaryOnly` when the maximizer of `L` sits on the
/// boundary of the simplex.
pub fn limit_candidates(h: &Hypergraph, opts: &SolverOptions) -> Result<LimitCandidateSet> {
    let rec = match find_equilibrium(h, &Support::full(h), None, opts) {
        Ok(rec) => rec,
        Err(Error::NoConvergence { best, .. }) if !best.is_interior(opts.thresholds) => {
            return Err(Error::BoundaryOnly { record: best })
        }
        Err(e) => return Err(e),
    };
    if !rec.is_interior(opts.thresholds) || rec.classification == Classification::Unstable {
        return Err(Error::BoundaryOnly {
            record: Box::new(rec),
        });
    }
    Ok(LimitCandidateSet {
        base: rec,
        kernel: kernel_gamma(h),
    })
}

/// A hyperedge `I` holding a vertex `pendant` that lies in no other edge and
/// a vertex `anchor` that lies in more than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendantTriple {
    pub edge: usize,
    pub edge_vertices: Vec<usize>,
    pub pendant: usize,
    pub anchor: usize,
}

/// All pendant obstructions. A nonempty result means every equilibrium with
/// positive mass on a pendant vertex is unstable.
pub fn detect_pendant(h: &Hypergraph) -> Vec<PendantTriple> {
    let degree: Vec<usize> = h.stars().iter().map(Vec::len).collect();
    let mut out = Vec::new();
    for (idx, e) in h.edges().iter().enumerate() {
        for &i in e.iter().filter(|&&i| degree[i] == 1) {
            for &j in e.iter().filter(|&&j| j != i && degree[j] > 1) {
                out.push(PendantTriple {
                    edge: idx,
                    edge_vertices: e.clone(),
                    pendant: i,
                    anchor: j,
                });
            }
        }
    }
    out
}

/// `f(v) = -1 + (1/N) Σ_I w_I / v_I`, minimized (value 0) at `w`.
pub fn radial_function(h: &Hypergraph, w: &[f64], v: &[f64]) -> Result<f64> {
    let ws = crate::dynamics::edge_sums(h, w)?;
    let vs = crate::dynamics::edge_sums(h, v)?;
    let s: f64 = ws.iter().zip(&vs).map(|(a, b)| a / b).sum();
    Ok(-1.0 + s / h.n_edges() as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialReport {
    pub f_at_base: f64,
    pub samples: usize,
    pub min_f: f64,
    pub coset_samples: usize,
    /// Largest `f` over sampled points of `w + K`.
    pub max_f_on_coset: f64,
    /// Smallest `f` over sampled points off `w + K`.
    pub min_f_off_coset: f64,
}

/// Samples `f` on `{v in simplex : v_i >= chi for i in supp(w)}` and on the
/// coset `w + K` inside that set.
pub fn radial_minimum_check<R: Rng + ?Sized>(
    h: &Hypergraph,
    base: &EquilibriumRecord,
    kernel: &KernelBasis,
    samples: usize,
    chi: f64,
    rng: &mut R,
) -> Result<RadialReport> {
    let w: &[f64] = &base.point;
    let m = w.len();
    let supp = base.point.support();
    let min_w = supp.iter().map(|&i| w[i]).fold(f64::INFINITY, f64::min);
    if !(chi > 0.0 && chi <= min_w) {
        return Err(Error::InvalidConfig(format!(
            "chi must lie in (0, {min_w}], got {chi}"
        )));
    }
    let projector = AffineProjector::new(kernel);
    let mut report = RadialReport {
        f_at_base: radial_function(h, w, w)?,
        samples: 0,
        min_f: f64::INFINITY,
        coset_samples: 0,
        max_f_on_coset: f64::NEG_INFINITY,
        min_f_off_coset: f64::INFINITY,
    };
    let free = 1.0 - supp.len() as f64 * chi;
    for _ in 0..samples {
        // uniform point of the simplex via normalized exponentials
        let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        let mut v: Vec<f64> = e.iter().map(|x| free * x / total).collect();
        for &i in &supp {
            v[i] += chi;
        }
        let f = radial_function(h, w, &v)?;
        report.samples += 1;
        report.min_f = report.min_f.min(f);
        if projector.distance(&v, w) < 1e-9 {
            report.coset_samples += 1;
            report.max_f_on_coset = report.max_f_on_coset.max(f);
        } else {
            report.min_f_off_coset = report.min_f_off_coset.min(f);
        }
    }
    if kernel.dim() > 0 {
        let basis = kernel.vectors_f64();
        let floor = |i: usize| if w[i] > 0.0 { chi } else { 0.0 };
        let mut tries = 0;
        while report.coset_samples < samples.div_ceil(4) && tries < 100 * samples.max(1) {
            tries += 1;
            let mut d = vec![0.0; m];
            for b in &basis {
                let c: f64 = rng.random_range(-1.0..1.0);
                d.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
            }
            let (lo, hi) = feasible_interval(w, &d, floor);
            if !(lo < hi) {
                continue;
            }
            let t = rng.random_range(lo..=hi);
            let v: Vec<f64> = w.iter().zip(&d).map(|(a, b)| (a + t * b).max(0.0)).collect();
            let f = radial_function(h, w, &v)?;
            report.samples += 1;
            report.coset_samples += 1;
            report.min_f = report.min_f.min(f);
            report.max_f_on_coset = report.max_f_on_coset.max(f);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    fn triangle() -> Hypergraph {
        Hypergraph::cycle(3).unwrap()
    }

    #[test]
    fn support_validation() {
        let p = Hypergraph::path(3).unwrap();
        assert!(Support::new(&p, vec![0, 2]).is_ok());
        assert!(matches!(
            Support::new(&p, vec![0]),
            Err(Error::EdgeMissesSupport { edge: 1 })
        ));
        assert!(Support::new(&p, vec![]).is_err());
        assert!(Support::new(&p, vec![5]).is_err());
    }

    #[test]
    fn tetrahedron_uniform() {
        let h = Hypergraph::tetrahedron();
        let rec = find_equilibrium(&h, &Support::full(&h), None, &opts()).unwrap();
        assert!(rec.point.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert_eq!(rec.classification, Classification::NonUnstable);
    }

    #[test]
    fn path_face_equilibrium_is_unstable() {
        let h = Hypergraph::path(3).unwrap();
        let s = Support::new(&h, vec![0, 2]).unwrap();
        let rec = find_equilibrium(&h, &s, None, &opts()).unwrap();
        assert!((rec.point[0] - 0.5).abs() < 1e-12 && rec.point[1] == 0.0);
        assert!((rec.gradient[1] - 1.0).abs() < 1e-10);
        assert_eq!(rec.classification, Classification::Unstable);
        assert_eq!(rec.witness, Some(1));
        assert_eq!(classify(&h, &rec, Thresholds::default()).unwrap(), Classification::Unstable);
    }

    #[test]
    fn triangle_uniform() {
        let h = triangle();
        let rec = find_equilibrium(&h, &Support::full(&h), None, &opts()).unwrap();
        assert!(rec.point.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn cube_boundary_point_is_non_unstable() {
        let h = Hypergraph::cube();
        let p = SimplexPoint::new(vec![0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0]).unwrap();
        let s = Support::new(&h, p.support()).unwrap();
        let rec = EquilibriumRecord::at(&h, p, s, Thresholds::default()).unwrap();
        assert!(rec.gradient.iter().all(|g| g.abs() < 1e-15));
        assert_eq!(rec.classification, Classification::NonUnstable);
    }

    #[test]
    fn start_must_match_support() {
        let h = Hypergraph::path(3).unwrap();
        let s = Support::new(&h, vec![0, 2]).unwrap();
        let bad = SimplexPoint::uniform(3);
        assert!(find_equilibrium(&h, &s, Some(&bad), &opts()).is_err());
    }

    #[test]
    fn solver_trace_is_monotone() {
        let h = Hypergraph::icosahedron();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let start = SimplexPoint::new((0..12).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap();
        let o = SolverOptions {
            record_trace: true,
            ..opts()
        };
        let rec = find_equilibrium(&h, &Support::full(&h), Some(&start), &o).unwrap();
        assert!(rec.trace.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert!(rec.residual < 1e-12);
    }

    #[test]
    fn no_convergence_returns_best() {
        let h = Hypergraph::icosahedron();
        let start = SimplexPoint::new((1..=12).map(|i| i as f64).collect()).unwrap();
        let o = SolverOptions { max_iter: 3, ..opts() };
        match find_equilibrium(&h, &Support::full(&h), Some(&start), &o) {
            Err(Error::NoConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(best.iterations, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn limit_candidate_examples() {
        let cube = limit_candidates(&Hypergraph::cube(), &opts()).unwrap();
        assert_eq!(cube.dim(), 4);
        assert!(cube.base.point.iter().all(|x| (x - 0.125).abs() < 1e-12));

        let tet = limit_candidates(&Hypergraph::tetrahedron(), &opts()).unwrap();
        assert_eq!(tet.dim(), 0);

        let path = limit_candidates(&Hypergraph::path(3).unwrap(), &opts());
        assert!(matches!(path, Err(Error::BoundaryOnly { .. })));
    }

    #[test]
    fn sampled_candidate_points_are_equilibria() {
        let set = limit_candidates(&Hypergraph::cube(), &opts()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = Hypergraph::cube();
        for p in set.sample_points(50, &mut rng) {
            let f = crate::dynamics::field(&h, &p).unwrap();
            assert!(f.sup_norm() < 1e-12);
        }
    }

    #[test]
    fn coset_check_kernel_shift() {
        let h = Hypergraph::cube();
        let k = kernel_gamma(&h);
        let a = find_equilibrium(&h, &Support::full(&h), None, &opts()).unwrap();
        let kv = &k.vectors_f64()[0];
        let shifted: Vec<f64> = a.point.iter().zip(kv).map(|(x, y)| x + 0.05 * y).collect();
        let b = EquilibriumRecord::at(&h, SimplexPoint::new(shifted).unwrap(), Support::full(&h), Thresholds::default())
            .unwrap();
        assert!(coset_check(&a, &b, &k, 1e-12));
        let off = EquilibriumRecord::at(&h, SimplexPoint::new(vec![0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap(), Support::full(&h), Thresholds::default()).unwrap();
        assert!(!coset_check(&a, &off, &k, 1e-8));
    }

    #[test]
    fn pendant_examples() {
        let p = detect_pendant(&Hypergraph::path(3).unwrap());
        let triples: Vec<(Vec<usize>, usize, usize)> =
            p.into_iter().map(|t| (t.edge_vertices, t.pendant, t.anchor)).collect();
        assert_eq!(triples, vec![(vec![0, 1], 0, 1), (vec![1, 2], 2, 1)]);
        assert!(detect_pendant(&Hypergraph::cube()).is_empty());
        assert!(detect_pendant(&Hypergraph::single_edge(3).unwrap()).is_empty());
    }

    #[test]
    fn radial_function_examples() {
        let h = Hypergraph::cube();
        let set = limit_candidates(&h, &opts()).unwrap();
        let w: &[f64] = &set.base.point;
        assert!(radial_function(&h, w, w).unwrap().abs() < 1e-15);

        let kv = &set.kernel.vectors_f64()[1];
        let v: Vec<f64> = w.iter().zip(kv).map(|(a, b)| a + 0.05 * b).collect();
        assert!(v.iter().all(|&x| x >= 0.0));
        assert!(radial_function(&h, w, &v).unwrap() <= 1e-10);

        let off = [0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2];
        assert!(radial_function(&h, w, &off).unwrap() > 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let report = radial_minimum_check(&h, &set.base, &set.kernel, 400, 0.01, &mut rng).unwrap();
        assert!(report.min_f >= -1e-10);
        assert!(report.coset_samples >= 100);
        assert!(report.max_f_on_coset < 1e-10);
        assert!(report.min_f_off_coset > 1e-10);
    }

    #[test]
    fn simplex_projection() {
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_to_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }
}
