//! Mean-field objects on the simplex: the vector field `F`, the Lyapunov
//! function `L`, their derivatives, and an RK4 integrator for `dv/dt = F(v)`.
//!
//! The scalar functions accept any vector with positive edge sums, not only
//! points of the simplex, since partial derivatives are taken in `ℝ^m`.

use std::ops::Deref;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactlin::{Rational, RationalMatrix};
use crate::{Error, Hypergraph, Result};

/// Nonnegative vector summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Renormalizes `v` onto the simplex. Rejects negative or non-finite
    /// entries and the zero vector.
    pub fn new(mut v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::NotOnSimplex("empty vector".into()));
        }
        if let Some((i, x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::NotOnSimplex(format!("coordinate {i} is {x}")));
        }
        let total: f64 = v.iter().sum();
        if total <= 0.0 {
            return Err(Error::NotOnSimplex("all coordinates are zero".into()));
        }
        v.iter_mut().for_each(|x| *x /= total);
        Ok(SimplexPoint(v))
    }

    pub fn uniform(m: usize) -> Self {
        SimplexPoint(vec![1.0 / m as f64; m])
    }

    /// Uniform on the given support, zero elsewhere.
    pub fn uniform_on(m: usize, support: &[usize]) -> Result<Self> {
        let mut v = vec![0.0; m];
        for &i in support {
            if i >= m {
                return Err(Error::DimensionMismatch { expected: m, got: i + 1 });
            }
            v[i] = 1.0;
        }
        Self::new(v)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Indices of the positive coordinates.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }
}

impl Deref for SimplexPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

/// Element of `Γ = {u : Σ u_i = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub const SUM_TOL: f64 = 1e-10;

    pub fn new(u: Vec<f64>) -> Result<Self> {
        let s: f64 = u.iter().sum();
        if !(s.abs() <= Self::SUM_TOL) {
            return Err(Error::NotOnSimplex(format!(
                "tangent vector sums to {s:e}"
            )));
        }
        Ok(TangentVector(u))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

impl Deref for TangentVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The set `Δ = {v ∈ simplex : v_I ≥ c for every edge}` with `0 < c < 1/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowDomain {
    c: f64,
}

impl FlowDomain {
    pub fn new(h: &Hypergraph, c: f64) -> Result<Self> {
        let limit = 1.0 / h.n_edges() as f64;
        if !(c > 0.0 && c < limit) {
            return Err(Error::InvalidCutoff { c, limit });
        }
        Ok(FlowDomain { c })
    }

    /// `c = 1/(2N)`.
    pub fn default_for(h: &Hypergraph) -> Self {
        FlowDomain {
            c: 0.5 / h.n_edges() as f64,
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.c
    }

    /// First edge whose sum falls below `c`, if any.
    pub fn violation(&self, h: &Hypergraph, v: &[f64]) -> Option<(usize, f64)> {
        h.edges()
            .iter()
            .map(|e| edge_sum(v, e))
            .enumerate()
            .find(|&(_, s)| s < self.c)
    }
}

pub fn edge_sum(v: &[f64], edge: &[usize]) -> f64 {
    edge.iter().map(|&i| v[i]).sum()
}

fn check_dim(h: &Hypergraph, len: usize) -> Result<()> {
    if len != h.m() {
        return Err(Error::DimensionMismatch {
            expected: h.m(),
            got: len,
        });
    }
    Ok(())
}

/// All edge sums, failing on the first non-positive one.
pub fn edge_sums(h: &Hypergraph, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(h, v.len())?;
    h.edges()
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let s = edge_sum(v, e);
            if s > 0.0 {
                Ok(s)
            } else {
                Err(Error::DegenerateEdgeSum { edge: idx, value: s })
            }
        })
        .collect()
}

/// `∂L/∂v_i = -1 + (1/N) Σ_{I ∋ i} 1/v_I`.
pub fn grad_l(h: &Hypergraph, v: &[f64]) -> Result<Vec<f64>> {
    let sums = edge_sums(h, v)?;
    let inv_n = 1.0 / h.n_edges() as f64;
    let mut acc = vec![0.0; h.m()];
    for (e, s) in h.edges().iter().zip(&sums) {
        for &i in e {
            acc[i] += 1.0 / s;
        }
    }
    Ok(acc.into_iter().map(|a| -1.0 + inv_n * a).collect())
}

/// `L(v) = -Σ v_i + (1/N) Σ_I log v_I`.
pub fn lyapunov(h: &Hypergraph, v: &[f64]) -> Result<f64> {
    let sums = edge_sums(h, v)?;
    let logs: f64 = sums.iter().map(|s| s.ln()).sum();
    Ok(-v.iter().sum::<f64>() + logs / h.n_edges() as f64)
}

/// `F_i(v) = v_i · ∂L/∂v_i` at any vector with positive edge sums.
pub fn field_raw(h: &Hypergraph, v: &[f64]) -> Result<Vec<f64>> {
    let g = grad_l(h, v)?;
    Ok(v.iter().zip(g).map(|(x, gi)| x * gi).collect())
}

/// `F(v)` for `v` on the simplex; lies in `Γ`.
pub fn field(h: &Hypergraph, v: &SimplexPoint) -> Result<TangentVector> {
    TangentVector::new(field_raw(h, v)?)
}

/// `∂²L/∂v_i∂v_j = -(1/N) Σ_{I ∋ i,j} 1/v_I²`.
pub fn hessian(h: &Hypergraph, v: &[f64]) -> Result<DMatrix<f64>> {
    let sums = edge_sums(h, v)?;
    let inv_n = 1.0 / h.n_edges() as f64;
    let mut hess = DMatrix::zeros(h.m(), h.m());
    for (e, s) in h.edges().iter().zip(&sums) {
        let w = inv_n / (s * s);
        for &i in e {
            for &j in e {
                hess[(i, j)] -= w;
            }
        }
    }
    Ok(hess)
}

/// Jacobian of `F`: `J_ij = δ_ij ∂L/∂v_i + v_i ∂²L/∂v_i∂v_j`.
///
/// Valid on the boundary too; at interior equilibria it reduces to
/// `diag(v) · Hess L`.
pub fn jacobian(h: &Hypergraph, v: &[f64]) -> Result<DMatrix<f64>> {
    let g = grad_l(h, v)?;
    let mut j = hessian(h, v)?;
    for i in 0..h.m() {
        for k in 0..h.m() {
            j[(i, k)] *= v[i];
        }
        j[(i, i)] += g[i];
    }
    Ok(j)
}

/// [`jacobian`] in exact rational arithmetic.
pub fn jacobian_exact(h: &Hypergraph, v: &[Rational]) -> Result<RationalMatrix> {
    check_dim(h, v.len())?;
    let n = Rational::from_integer(h.n_edges().into());
    let m = h.m();
    let mut grad = vec![Rational::zero(); m];
    let mut hess = RationalMatrix::zeros(m, m);
    for (idx, e) in h.edges().iter().enumerate() {
        let s = e.iter().fold(Rational::zero(), |a, &i| a + &v[i]);
        if !s.is_positive() {
            return Err(Error::DegenerateEdgeSum {
                edge: idx,
                value: num_traits::ToPrimitive::to_f64(&s).unwrap_or(f64::NAN),
            });
        }
        let inv = s.recip();
        let w = &inv * &inv / &n;
        for &i in e {
            grad[i] += &inv;
            for &k in e {
                let x = hess.get(i, k) - &w;
                hess.set(i, k, x);
            }
        }
    }
    let mut jac = RationalMatrix::zeros(m, m);
    for i in 0..m {
        let gi = &grad[i] / &n - Rational::one();
        for k in 0..m {
            let mut x = &v[i] * hess.get(i, k);
            if i == k {
                x += &gi;
            }
            jac.set(i, k, x);
        }
    }
    Ok(jac)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub v: SimplexPoint,
    pub lyapunov: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<FlowSample>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&FlowSample> {
        self.samples.last()
    }

    /// Largest single-step decrease of `L` (zero when monotone).
    pub fn max_lyapunov_drop(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].lyapunov - w[1].lyapunov)
            .fold(0.0, f64::max)
    }

    /// `t,v0,...,v{m-1},L`, one row per sample.
    pub fn to_csv(&self) -> String {
        let m = self.samples.first().map_or(0, |s| s.v.len());
        let mut out = String::from("t");
        for i in 0..m {
            out.push_str(&format!(",v{i}"));
        }
        out.push_str(",L\n");
        for s in &self.samples {
            out.push_str(&s.t.to_string());
            for x in s.v.iter() {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push(',');
            out.push_str(&s.lyapunov.to_string());
            out.push('\n');
        }
        out
    }
}

/// Largest tolerated per-step decrease of `L` before the step size is blamed.
pub const MAX_LYAPUNOV_DROP: f64 = 1e-6;

/// Fixed-step RK4 for `dv/dt = F(v)`, renormalized onto the simplex after
/// every step. Records every step, `t = 0, dt, 2dt, ...` up to `t_end`.
pub fn flow_integrate(
    h: &Hypergraph,
    v0: &SimplexPoint,
    domain: FlowDomain,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_dim(h, v0.len())?;
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    if let Some((edge, value)) = domain.violation(h, v0) {
        return Err(Error::DomainExit { t: 0.0, edge, value });
    }
    let steps = (t_end / dt).round() as usize;
    let mut v = v0.clone();
    let mut l = lyapunov(h, &v)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(FlowSample {
        t: 0.0,
        v: v.clone(),
        lyapunov: l,
    });
    let axpy = |base: &[f64], k: &[f64], a: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(x, y)| x + a * y).collect()
    };
    for step in 1..=steps {
        let t = step as f64 * dt;
        let exit = |e: Error| match e {
            Error::DegenerateEdgeSum { edge, value } => Error::DomainExit { t, edge, value },
            other => other,
        };
        let k1 = field_raw(h, &v).map_err(exit)?;
        let k2 = field_raw(h, &axpy(&v, &k1, dt / 2.0)).map_err(exit)?;
        let k3 = field_raw(h, &axpy(&v, &k2, dt / 2.0)).map_err(exit)?;
        let k4 = field_raw(h, &axpy(&v, &k3, dt)).map_err(exit)?;
        let next: Vec<f64> = (0..v.len())
            .map(|i| v[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let next = SimplexPoint::new(next).map_err(|_| Error::DomainExit {
            t,
            edge: 0,
            value: f64::NAN,
        })?;
        if let Some((edge, value)) = domain.violation(h, &next) {
            return Err(Error::DomainExit { t, edge, value });
        }
        let l_next = lyapunov(h, &next)?;
        if l - l_next > MAX_LYAPUNOV_DROP {
            return Err(Error::StepTooLarge { t, drop: l - l_next });
        }
        v = next;
        l = l_next;
        samples.push(FlowSample {
            t,
            v: v.clone(),
            lyapunov: l,
        });
    }
    Ok(Trajectory { samples })
}
