//! Polytopes with explicit face lattices, affine face charts, Gram
//! determinants and the transformation of boundary normals between a face
//! and its reference domain.

mod chart;
mod frame;
mod identities;
mod io;
pub(crate) mod linalg;
pub(crate) mod local;
mod polytope;

pub use chart::{build_chart, chart_of, parallelepiped_volume, AffineChart, ChartBasis, ParallelepipedVolume};
pub use frame::{
    cofactor_identity_check, gram_inverse_form, pushforward_normal, BoundaryPortion, FaceFrame, PushedNormal,
};
pub use identities::{run_identity, Identity, IdentityReport};
pub use io::{FaceRecord, PolytopeFile};
pub use linalg::{cofactor_matrix, FLATNESS_TOL};
pub use polytope::{Face, FaceId, Polytope};

/// `(x_F - z0) · n_F` for the facet `facet` with outward normal taken from
/// the polytope's lattice orientation.
pub fn facet_offset(poly: &Polytope, facet: usize, z0: &[f64]) -> crate::Result<f64> {
    let normals = poly.facet_normals(Some(z0))?;
    normals
        .get(facet)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("no facet {facet}")))?
        .as_ref()
        .map(|(_, off)| *off)
        .ok_or_else(|| crate::Error::DegenerateFace(format!("facet {facet} is degenerate")))
}
