//! Spectrum of the Jacobian of `F` restricted to the tangent hyperplane `Γ`.
//!
//! `Γ` is invariant under `JF(w)` for every `w` on the simplex, so the
//! restriction is `Q · JF · Qᵗ` for any orthonormal basis `Q` of `Γ`. At an
//! interior equilibrium `JF = D · Hess L` with `D = diag(w)`, which is similar
//! to the symmetric `D^{1/2} · Hess L · D^{1/2}`. That matrix has `sqrt(w)` as
//! an eigenvector (eigenvalue `-1`, the direction transverse to the simplex);
//! its orthogonal complement carries exactly the spectrum on `Γ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{field_raw, hessian, jacobian, jacobian_exact, SimplexPoint};
use crate::exactlin::{kernel_gamma, rat_from_f64, RationalMatrix};
use crate::{Error, Hypergraph, Result};

/// Largest `‖F(w)‖∞` accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

/// Relative factor for zero eigenvalues and numerical rank.
pub const ZERO_FACTOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub point: SimplexPoint,
    /// Real parts, ascending, of the `m - 1` eigenvalues on `Γ`.
    pub eigenvalues: Vec<f64>,
    /// Largest imaginary part among them.
    pub max_imag: f64,
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
    /// Eigenvalues with `|λ| < threshold` count as zero.
    pub threshold: f64,
    pub k_expected: usize,
    pub rank_jf: usize,
    pub rank_ih: usize,
    /// `"symmetric"` at interior points, `"general"` otherwise.
    pub method: String,
    /// Counts from the direct restriction `Q · JF · Qᵗ`.
    pub general_counts: (usize, usize, usize),
    /// Counts from the symmetric similarity transform, at interior points.
    pub symmetric_counts: Option<(usize, usize, usize)>,
}

impl SpectrumReport {
    /// Both computation paths agree on (negative, zero, positive).
    pub fn paths_agree(&self) -> bool {
        self.symmetric_counts.is_none_or(|s| s == self.general_counts)
    }
}

/// Orthonormal basis of `Γ` as the rows of an `(m-1) × m` matrix
/// (Helmert contrasts).
pub fn gamma_basis(m: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(m.saturating_sub(1), m);
    for k in 1..m {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for j in 0..k {
            q[(k - 1, j)] = 1.0 / norm;
        }
        q[(k - 1, k)] = -(k as f64) / norm;
    }
    q
}

pub fn zero_threshold(jf: &DMatrix<f64>) -> f64 {
    ZERO_FACTOR * inf_norm(jf).max(1.0)
}

fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Numerical rank: singular values above `threshold`.
pub fn numerical_rank(a: &DMatrix<f64>, threshold: f64) -> usize {
    a.singular_values().iter().filter(|&&s| s > threshold).count()
}

fn counts(eigs: &[f64], tau: f64) -> (usize, usize, usize) {
    let neg = eigs.iter().filter(|&&x| x < -tau).count();
    let pos = eigs.iter().filter(|&&x| x > tau).count();
    (neg, eigs.len() - neg - pos, pos)
}

fn residual(h: &Hypergraph, w: &[f64]) -> Result<f64> {
    Ok(field_raw(h, w)?.iter().fold(0.0, |a, x| a.max(x.abs())))
}

/// Eigenvalues of `JF(w)` on `Γ`.
///
/// With `interior = true` the symmetric path is computed as well and becomes
/// the reported spectrum; both paths must then agree on the sign counts.
pub fn restricted_spectrum(h: &Hypergraph, w: &SimplexPoint, interior: bool) -> Result<SpectrumReport> {
    let res = residual(h, w)?;
    if res > EQUILIBRIUM_TOL {
        return Err(Error::NotAnEquilibrium { residual: res });
    }
    if interior && w.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotInterior);
    }
    let m = h.m();
    let jf = jacobian(h, w)?;
    let tau = zero_threshold(&jf);

    let q = gamma_basis(m);
    let restricted = &q * &jf * q.transpose();
    let complex = restricted.complex_eigenvalues();
    let mut general: Vec<f64> = complex.iter().map(|z| z.re).collect();
    general.sort_by(f64::total_cmp);
    let max_imag = complex.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let general_counts = counts(&general, tau);

    let (eigenvalues, symmetric_counts, method) = if interior {
        let sym = symmetric_restricted_eigenvalues(h, w)?;
        let c = counts(&sym, tau);
        (sym, Some(c), "symmetric")
    } else {
        (general, None, "general")
    };
    let (n_negative, n_zero, n_positive) = symmetric_counts.unwrap_or(general_counts);
    Ok(SpectrumReport {
        point: w.clone(),
        eigenvalues,
        max_imag,
        n_negative,
        n_zero,
        n_positive,
        threshold: tau,
        k_expected: kernel_gamma(h).dim(),
        rank_jf: numerical_rank(&jf, tau),
        rank_ih: RationalMatrix::incidence(h).rank(),
        method: method.to_string(),
        general_counts,
        symmetric_counts,
    })
}

/// Spectrum of `D^{1/2} Hess D^{1/2}` on the complement of `sqrt(w)`.
fn symmetric_restricted_eigenvalues(h: &Hypergraph, w: &[f64]) -> Result<Vec<f64>> {
    let m = h.m();
    let hess = hessian(h, w)?;
    let root = DVector::from_iterator(m, w.iter().map(|x| x.sqrt()));
    let scaled = DMatrix::from_fn(m, m, |i, j| root[i] * hess[(i, j)] * root[j]);
    // QR of [sqrt(w) | I]: first column of Q spans sqrt(w), the rest its complement
    let mut stacked = DMatrix::zeros(m, m + 1);
    stacked.set_column(0, &root);
    for i in 0..m {
        stacked[(i, i + 1)] = 1.0;
    }
    let frame = stacked.qr().q();
    let complement = frame.columns(1, m - 1).into_owned();
    let reduced = complement.transpose() * scaled * &complement;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let mut eigs: Vec<f64> = reduced.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankIdentityReport {
    /// `‖Hess L + (1/N) EᵗE‖∞` (max entry).
    pub hess_residual: f64,
    pub rank_jf: usize,
    pub rank_ih: usize,
}

impl RankIdentityReport {
    pub fn holds(&self, hess_tol: f64) -> bool {
        self.hess_residual < hess_tol && self.rank_jf == self.rank_ih
    }
}

/// Checks `Hess L = -(1/N) EᵗE`, where row `I` of `E` is row `I` of the
/// incidence matrix divided by `w_I`, and `rank JF(w) = rank I(H)`.
pub fn rank_identities(h: &Hypergraph, w: &SimplexPoint) -> Result<RankIdentityReport> {
    if w.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotInterior);
    }
    let res = residual(h, w)?;
    if res > EQUILIBRIUM_TOL {
        return Err(Error::NotAnEquilibrium { residual: res });
    }
    let inc = h.incidence();
    let sums = crate::dynamics::edge_sums(h, w)?;
    let e = DMatrix::from_fn(inc.rows(), inc.cols(), |r, c| inc.entry(r, c) as f64 / sums[r]);
    let factored = -(e.transpose() * &e) / h.n_edges() as f64;
    let hess = hessian(h, w)?;
    let jf = jacobian(h, w)?;
    Ok(RankIdentityReport {
        hess_residual: (hess - factored).amax(),
        rank_jf: numerical_rank(&jf, zero_threshold(&jf)),
        rank_ih: RationalMatrix::incidence(h).rank(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRank {
    pub rank: usize,
    /// Computed in exact rational arithmetic.
    pub exact: bool,
}

/// Largest denominator (a power of two) for which a float coordinate is
/// treated as the exact rational it encodes.
const EXACT_DENOMINATOR_LIMIT: u32 = 1 << 20;

/// Rank of `JF(w)`. Exact when every coordinate is a short dyadic rational
/// (such as `1/4` or `1/8`); numerical otherwise.
pub fn boundary_rank(h: &Hypergraph, w: &SimplexPoint) -> Result<BoundaryRank> {
    let exact: Option<Vec<_>> = w
        .iter()
        .map(|&x| {
            rat_from_f64(x).filter(|r| *r.denom() <= num_bigint::BigInt::from(EXACT_DENOMINATOR_LIMIT))
        })
        .collect();
    match exact {
        Some(v) => Ok(BoundaryRank {
            rank: jacobian_exact(h, &v)?.rank(),
            exact: true,
        }),
        None => {
            let jf = jacobian(h, w)?;
            Ok(BoundaryRank {
                rank: numerical_rank(&jf, zero_threshold(&jf)),
                exact: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_basis_is_orthonormal() {
        for m in 2..8 {
            let q = gamma_basis(m);
            let gram = &q * q.transpose();
            assert!((gram - DMatrix::identity(m - 1, m - 1)).amax() < 1e-14);
            for r in 0..m - 1 {
                assert!(q.row(r).sum().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tetrahedron_counts() {
        let h = Hypergraph::tetrahedron();
        let r = restricted_spectrum(&h, &SimplexPoint::uniform(4), true).unwrap();
        assert_eq!((r.n_negative, r.n_zero, r.n_positive), (3, 0, 0));
        assert!(r.paths_agree());
        // JF on Γ is -1/9 times the identity at the uniform point
        assert!(r.eigenvalues.iter().all(|x| (x + 1.0 / 9.0).abs() < 1e-12));
    }

    #[test]
    fn cube_and_octahedron_counts() {
        let r = restricted_spectrum(&Hypergraph::cube(), &SimplexPoint::uniform(8), true).unwrap();
        assert_eq!((r.n_negative, r.n_zero, r.n_positive), (3, 4, 0));
        assert_eq!(r.k_expected, 4);
        assert!(r.paths_agree());
        let r = restricted_spectrum(&Hypergraph::octahedron(), &SimplexPoint::uniform(6), true).unwrap();
        assert_eq!((r.n_negative, r.n_zero, r.n_positive), (3, 2, 0));
        assert!(r.paths_agree());
    }

    #[test]
    fn non_equilibrium_rejected() {
        let h = Hypergraph::cube();
        let w = SimplexPoint::new(vec![0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]).unwrap();
        assert!(matches!(
            restricted_spectrum(&h, &w, true),
            Err(Error::NotAnEquilibrium { .. })
        ));
        let b = SimplexPoint::new(vec![0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0]).unwrap();
        assert!(matches!(restricted_spectrum(&h, &b, true), Err(Error::NotInterior)));
        assert!(restricted_spectrum(&h, &b, false).is_ok());
        assert!(matches!(rank_identities(&h, &b), Err(Error::NotInterior)));
    }

    #[test]
    fn rank_identity_examples() {
        let h = Hypergraph::cycle(3).unwrap();
        let r = rank_identities(&h, &SimplexPoint::uniform(3)).unwrap();
        assert_eq!((r.rank_jf, r.rank_ih), (3, 3));
        assert!(r.holds(1e-10));
        let r = rank_identities(&Hypergraph::icosahedron(), &SimplexPoint::uniform(12)).unwrap();
        assert_eq!((r.rank_jf, r.rank_ih), (12, 12));
    }

    #[test]
    fn boundary_ranks() {
        let c = Hypergraph::cube();
        let p1 = SimplexPoint::new(vec![0.0, 0.25, 0.0, 0.25, 0.125, 0.125, 0.125, 0.125]).unwrap();
        let p2 = SimplexPoint::new(vec![0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0]).unwrap();
        assert_eq!(boundary_rank(&c, &p1).unwrap(), BoundaryRank { rank: 4, exact: true });
        assert_eq!(boundary_rank(&c, &p2).unwrap(), BoundaryRank { rank: 3, exact: true });
        assert_eq!(boundary_rank(&c, &SimplexPoint::uniform(8)).unwrap().rank, 4);
        let t = Hypergraph::cycle(3).unwrap();
        let r = boundary_rank(&t, &SimplexPoint::uniform(3)).unwrap();
        assert_eq!(r, BoundaryRank { rank: 3, exact: false });
    }
}
