//! Pólya urns on finite hypergraphs.
//!
//! Every step of the process throws one ball at each hyperedge; the ball lands
//! on a vertex of that hyperedge with probability proportional to the vertex's
//! current ball count. The proportions `x(n)` form a stochastic approximation
//! of the ODE `dv/dt = F(v)` on the simplex, where
//!
//! ```text
//! F_i(v) = -v_i + (1/N) Σ_{I ∋ i} v_i / v_I,      v_I = Σ_{j ∈ I} v_j
//! ```
//!
//! and `F` is gradient-like for
//!
//! ```text
//! L(v) = -Σ_i v_i + (1/N) Σ_I log v_I.
//! ```
//!
//! The crate is organized by concern:
//!
//! * [`hypergraph`]: validated hypergraphs, incidence matrices, named solids.
//! * [`exactlin`]: exact rational rank and kernels, affine projections.
//! * [`dynamics`]: `F`, `L` and their derivatives, RK4 flow on the simplex.
//! * [`equilibria`]: face-restricted equilibrium solver and classification.
//! * [`spectral`]: spectrum of the Jacobian on the tangent hyperplane.
//! * [`simulate`]: exact urn simulation, replicas, limit-set statistics.
//! * [`analysis`]: the combined report used by the CLI and the browser demo.
//! * [`svg`]: dependency-free line charts.
//!
//! Vertices are labeled `0..m`; a vertex written `k` in one-based notation is
//! vertex `k - 1` here.

pub mod analysis;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod exactlin;
pub mod hypergraph;
pub mod simulate;
pub mod spectral;
pub mod svg;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, IncidenceMatrix};
