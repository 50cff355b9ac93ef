//! Quadrature by divergence-form functional expansions.
//!
//! A smooth function is rewritten as a finite sum of exact divergence terms
//! plus a remainder. Integrating term by term turns a volume integral over a
//! flat-faced polytope into integrals over its facets, which are treated the
//! same way until only vertex evaluations are left. Polynomials are
//! integrated exactly; smooth functions get truncated series with an explicit
//! remainder.
//!
//! * [`quad1d`]: one-dimensional expansions and endpoint-derivative rules,
//!   including the complex-shift constructions.
//! * [`tensorpoly`]: sparse multivariate polynomials and contracted
//!   derivative tensors.
//! * [`geometry`]: polytopes with explicit face lattices, affine face charts,
//!   Gram-determinant measures and normal transformation.
//! * [`quadnd`]: volume, centroid, exact polynomial integration, truncated
//!   series and the recursive trapezoidal rule in n dimensions.
//! * [`oracle`]: independent reference integrators (simplex tessellation and
//!   Monte Carlo).
//! * [`generate`]: random polytopes and charts for tests and self-checks.

pub mod error;
pub mod generate;
pub mod geometry;
pub mod oracle;
pub mod quad1d;
pub mod quadnd;
pub mod sum;
pub mod tensorpoly;

pub use error::{Error, Result};
