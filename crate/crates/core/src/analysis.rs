//! One-shot structural analysis of a hypergraph: kernel, equilibria,
//! spectra, pendant obstructions and the resulting verdict on the limit of
//! the urn process.

use serde::{Deserialize, Serialize};

use crate::equilibria::{
    detect_pendant, find_equilibrium, EquilibriumRecord, PendantTriple, SolverOptions, Support,
    Thresholds,
};
use crate::exactlin::{kernel_full, kernel_gamma, KernelBasis, RationalMatrix};
use crate::spectral::{boundary_rank, restricted_spectrum, BoundaryRank, SpectrumReport, EQUILIBRIUM_TOL};
use crate::{Error, Hypergraph, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `K = {0}`: the proportions converge to a single point.
    Theorem1,
    /// `K ≠ {0}`: the limit set lies in `simplex ∩ (w + K)`.
    Theorem2,
    /// Pendant obstruction or no interior non-unstable equilibrium: the limit
    /// lies on the boundary of the simplex.
    Boundary,
}

/// The verdict depends only on these three facts.
pub fn verdict(k: usize, has_pendant: bool, interior_equilibrium: bool) -> Verdict {
    if has_pendant || !interior_equilibrium {
        Verdict::Boundary
    } else if k == 0 {
        Verdict::Theorem1
    } else {
        Verdict::Theorem2
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub solver: SolverOptions,
    /// Faces to solve on in addition to the full support.
    pub extra_supports: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquilibriumEntry {
    pub record: EquilibriumRecord,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_rank: Option<BoundaryRank>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitSetSummary {
    pub base: Vec<f64>,
    pub dim: usize,
    pub description: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub hypergraph: Hypergraph,
    pub m: usize,
    pub n_edges: usize,
    pub rank_incidence: usize,
    pub k: usize,
    pub kernel: KernelBasis,
    pub kernel_full_dim: usize,
    pub equilibria: Vec<EquilibriumEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_set: Option<LimitSetSummary>,
    pub pendants: Vec<PendantTriple>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    pub converged: bool,
}

fn entry(h: &Hypergraph, support: &Support, opts: &SolverOptions) -> Result<EquilibriumEntry> {
    let (record, converged) = match find_equilibrium(h, support, None, opts) {
        Ok(r) => (r, true),
        Err(Error::NoConvergence { best, .. }) => (*best, false),
        Err(e) => return Err(e),
    };
    let interior = record.is_interior(opts.thresholds);
    let spectrum = if record.residual <= EQUILIBRIUM_TOL {
        restricted_spectrum(h, &record.point, interior && record.point.iter().all(|&x| x > 0.0)).ok()
    } else {
        None
    };
    let boundary_rank = if interior { None } else { boundary_rank(h, &record.point).ok() };
    Ok(EquilibriumEntry {
        record,
        converged,
        spectrum,
        boundary_rank,
    })
}

pub fn analyze(h: &Hypergraph, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let kernel = kernel_gamma(h);
    let k = kernel.dim();
    let pendants = detect_pendant(h);

    let mut supports = vec![Support::full(h)];
    for s in &opts.extra_supports {
        supports.push(Support::new(h, s.clone())?);
    }
    let equilibria = supports
        .iter()
        .map(|s| entry(h, s, &opts.solver))
        .collect::<Result<Vec<_>>>()?;

    let full = &equilibria[0];
    let interior = full.converged
        && full.record.is_interior(opts.solver.thresholds)
        && full.record.classification == crate::equilibria::Classification::NonUnstable;
    let limit_set = interior.then(|| LimitSetSummary {
        base: full.record.point.to_vec(),
        dim: k,
        description: if k == 0 {
            "single point {w}".into()
        } else {
            format!("simplex ∩ (w + K), dim K = {k}")
        },
    });
    Ok(AnalysisReport {
        hypergraph: h.clone(),
        m: h.m(),
        n_edges: h.n_edges(),
        rank_incidence: RationalMatrix::incidence(h).rank(),
        k,
        kernel_full_dim: kernel_full(h).dim(),
        kernel,
        converged: equilibria.iter().all(|e| e.converged),
        verdict: verdict(k, !pendants.is_empty(), interior),
        equilibria,
        limit_set,
        pendants,
        thresholds: opts.solver.thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_table() {
        assert_eq!(verdict(0, false, true), Verdict::Theorem1);
        assert_eq!(verdict(3, false, true), Verdict::Theorem2);
        assert_eq!(verdict(0, true, true), Verdict::Boundary);
        assert_eq!(verdict(2, false, false), Verdict::Boundary);
    }

    #[test]
    fn builtin_verdicts() {
        let opts = AnalysisOptions::default();
        let tet = analyze(&Hypergraph::tetrahedron(), &opts).unwrap();
        assert_eq!((tet.k, tet.verdict), (0, Verdict::Theorem1));
        let base = &tet.limit_set.as_ref().unwrap().base;
        assert!(base.iter().all(|x| (x - 0.25).abs() < 1e-12));

        let cube = analyze(&Hypergraph::cube(), &opts).unwrap();
        assert_eq!((cube.k, cube.verdict), (4, Verdict::Theorem2));
        let s = cube.equilibria[0].spectrum.as_ref().unwrap();
        assert_eq!((s.n_negative, s.n_zero), (3, 4));

        let path = analyze(&Hypergraph::path(3).unwrap(), &opts).unwrap();
        assert_eq!(path.verdict, Verdict::Boundary);
        assert_eq!(path.pendants.len(), 2);
        assert!(path.limit_set.is_none());
    }

    #[test]
    fn extra_supports() {
        let opts = AnalysisOptions {
            extra_supports: vec![vec![0, 2]],
            ..Default::default()
        };
        let r = analyze(&Hypergraph::path(3).unwrap(), &opts).unwrap();
        assert_eq!(r.equilibria.len(), 2);
        let face = &r.equilibria[1];
        assert_eq!(face.record.classification, crate::equilibria::Classification::Unstable);
        assert!(face.boundary_rank.is_some());

        let bad = AnalysisOptions {
            extra_supports: vec![vec![0]],
            ..Default::default()
        };
        assert!(analyze(&Hypergraph::path(3).unwrap(), &bad).is_err());
    }

    #[test]
    fn report_serializes() {
        let r = analyze(&Hypergraph::octahedron(), &AnalysisOptions::default()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k, 2);
        assert_eq!(back.kernel, r.kernel);
        assert_eq!(back.verdict, Verdict::Theorem2);
    }
}
