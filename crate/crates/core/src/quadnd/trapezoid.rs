use super::{local_centroid, IntegralReport, Method};
use crate::error::Result;
use crate::geometry::local::LocalFace;
use crate::geometry::Polytope;
use crate::sum::compensated_sum;

/// Per-facet terms `|F| f(x_F) ((x_F - x̄)·n_F) / k`, with `x̄` the face
/// centroid and `x_F` the facet centroids.
fn trapezoid_terms(f: &dyn Fn(&[f64]) -> Result<f64>, face: &LocalFace<'_>) -> Result<Vec<f64>> {
    let k = face.dim();
    let (_, c) = local_centroid(face)?;
    let c_local = face.basis.transpose() * (c - &face.origin);
    let positions = face.poly.face(face.id).children.clone();
    let mut terms = vec![0.0; positions.len()];
    for fr in face.frames()? {
        let offset = fr.offset - c_local.dot(&fr.normal);
        let (measure, x_f) = local_centroid(&fr.face)?;
        let slot = positions.iter().position(|&p| p == fr.child.index).expect("child listed");
        terms[slot] = measure * f(x_f.as_slice())? * offset / k as f64;
    }
    Ok(terms)
}

pub(super) fn trapezoid_local(f: &dyn Fn(&[f64]) -> Result<f64>, face: &LocalFace<'_>) -> Result<f64> {
    if face.dim() == 0 {
        return f(face.origin.as_slice());
    }
    Ok(compensated_sum(trapezoid_terms(f, face)?))
}

/// `(1/d) Σ_F |F| f(x_F) ((x_F - x̄)·n_F)`: one facet-centroid evaluation per
/// facet. Exact for affine `f`.
pub fn trapezoid_nd(f: &dyn Fn(&[f64]) -> f64, poly: &Polytope) -> Result<IntegralReport> {
    let top = LocalFace::top(poly, None)?;
    let wrapped = |x: &[f64]| Ok(f(x));
    let terms = trapezoid_terms(&wrapped, &top)?;
    Ok(IntegralReport {
        value: compensated_sum(terms.iter().copied()),
        method: Method::Trapezoid,
        truncation_order: Some(1),
        facet_contributions: terms,
        oracle_value: None,
        abs_error: None,
    })
}
