//! Volume, centroid and integrals over flat-faced polytopes by recursive
//! dimension reduction.
//!
//! A polynomial centered at the expansion point splits into homogeneous
//! layers `f_q`, and `∫_T f_q = (1/(d+q)) Σ_F ((x_F - z0)·n_F) ∫_F f_q`.
//! Each facet integral is the same problem one dimension lower, solved in
//! the facet's own orthonormal coordinates about its vertex mean, until the
//! faces are vertices.

mod series;
mod trapezoid;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::local::LocalFace;
use crate::geometry::{FaceId, Polytope};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::tensorpoly::{MultiIndex, MultiPolynomial};

pub use series::{
    expand_nd_check, integrate_series, integrate_surface_expansion, remainder_nd, FacetRule, Integrand,
    REMAINDER_CUBATURE_ORDER,
};
pub use trapezoid::trapezoid_nd;

/// How an [`IntegralReport`] value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact recursive reduction for polynomials.
    Recursive,
    /// Truncated divergence series.
    Series,
    /// Recursive trapezoidal rule.
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralReport {
    pub value: f64,
    pub method: Method,
    /// `None` when the result is exact up to rounding.
    pub truncation_order: Option<usize>,
    /// Per-facet terms, in facet order; they sum to `value`.
    pub facet_contributions: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
}

impl IntegralReport {
    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle_value = Some(oracle);
        self.abs_error = Some((self.value - oracle).abs());
        self
    }
}

/// Intrinsic measure of `poly`, computed as `(1/d) Σ_F ((x_F - z0)·n_F) |F|`.
/// `z0` defaults to the vertex mean; the result does not depend on it.
pub fn volume(poly: &Polytope, z0: Option<&[f64]>) -> Result<f64> {
    LocalFace::top(poly, z0)?.measure()
}

/// Centroid from boundary data:
/// `x̄ = ( Σ_F ((x_F - z0)·n_F) ∫_F x dS + z0 |T| ) / ((d+1) |T|)`,
/// with `z0` the vertex mean and exact facet first moments.
pub fn centroid(poly: &Polytope) -> Result<Vec<f64>> {
    let top = LocalFace::top(poly, None)?;
    let d = top.dim();
    let n = poly.ambient_dim();
    let measure = top.measure()?;
    if measure <= 0.0 {
        return Err(Error::DegenerateFace("polytope has zero measure".into()));
    }
    let mut sums: Vec<CompensatedSum> = (0..n).map(|_| CompensatedSum::new()).collect();
    for f in top.frames()? {
        let (facet_measure, facet_centroid) = local_centroid(&f.face)?;
        for j in 0..n {
            sums[j].add(f.offset * facet_measure * facet_centroid[j]);
        }
    }
    let scale = 1.0 / ((d as f64 + 1.0) * measure);
    Ok((0..n)
        .map(|j| scale * (sums[j].value() + top.origin[j] * measure))
        .collect())
}

/// Measure and ambient centroid of a face.
pub(crate) fn local_centroid(face: &LocalFace<'_>) -> Result<(f64, DVector<f64>)> {
    let k = face.dim();
    if k == 0 {
        return Ok((1.0, face.origin.clone()));
    }
    let measure = face.measure()?;
    if measure <= 0.0 {
        return Err(Error::DegenerateFace(format!("{:?} has non-positive measure", face.id)));
    }
    let mut moment = DVector::zeros(k);
    for j in 0..k {
        moment[j] = integrate_local(face, &MultiPolynomial::variable(k, j))?;
    }
    Ok((measure, face.to_ambient_point(&(moment / measure))))
}

/// `∫_face g`, with `g` a polynomial in the face's local coordinates
/// centered at the local origin.
pub(crate) fn integrate_local(face: &LocalFace<'_>, g: &MultiPolynomial) -> Result<f64> {
    Ok(compensated_sum(integrate_local_terms(face, g)?))
}

/// Per-child terms of [`integrate_local`]; for a vertex, the single value.
fn integrate_local_terms(face: &LocalFace<'_>, g: &MultiPolynomial) -> Result<Vec<f64>> {
    let k = face.dim();
    if k == 0 {
        return Ok(vec![g.eval(&[])]);
    }
    if g.is_zero() {
        return Ok(vec![0.0; face.poly.face(face.id).children.len()]);
    }
    let h = g.map_layers(|q| 1.0 / (k as f64 + q as f64));
    let mut terms = vec![0.0; face.poly.face(face.id).children.len()];
    let positions: Vec<usize> = face.poly.face(face.id).children.clone();
    for f in face.frames()? {
        if f.offset == 0.0 {
            continue;
        }
        let child = h.pullback(&f.basis, f.base.as_slice())?;
        let value = integrate_local(&f.face, &child)?;
        let slot = positions.iter().position(|&c| c == f.child.index).expect("child listed");
        terms[slot] = f.offset * value;
    }
    Ok(terms)
}

/// An ambient polynomial restricted to a face, in the face's local coordinates.
pub(crate) fn restrict(f: &MultiPolynomial, face: &LocalFace<'_>) -> Result<MultiPolynomial> {
    if face.basis.is_identity(0.0) {
        // full-dimensional: only a shift of the center
        let shifted = f.recenter(face.origin.as_slice());
        return MultiPolynomial::from_terms(
            vec![0.0; f.dim()],
            shifted.terms().map(|(i, c)| (i.clone(), c)),
        );
    }
    f.pullback(&face.basis, face.origin.as_slice())
}

fn check_poly(f: &MultiPolynomial, poly: &Polytope) -> Result<()> {
    if f.dim() != poly.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: poly.ambient_dim(),
            got: f.dim(),
        });
    }
    Ok(())
}

/// `∫_T f` for a polynomial, exact up to rounding. `z0` (default: vertex
/// mean) must lie in the affine hull of `T`.
pub fn integrate_poly(f: &MultiPolynomial, poly: &Polytope, z0: Option<&[f64]>) -> Result<f64> {
    Ok(integrate_poly_report(f, poly, z0)?.value)
}

pub fn integrate_poly_report(f: &MultiPolynomial, poly: &Polytope, z0: Option<&[f64]>) -> Result<IntegralReport> {
    check_poly(f, poly)?;
    let top = LocalFace::top(poly, z0)?;
    let g = restrict(f, &top)?;
    let facet_contributions = integrate_local_terms(&top, &g)?;
    let value = compensated_sum(facet_contributions.iter().copied());
    Ok(IntegralReport {
        value,
        method: Method::Recursive,
        truncation_order: None,
        facet_contributions,
        oracle_value: None,
        abs_error: None,
    })
}

/// `∫_F f` over the face `id` of `poly`; a vertex yields the point value.
pub fn integrate_poly_face(f: &MultiPolynomial, poly: &Polytope, id: FaceId) -> Result<f64> {
    check_poly(f, poly)?;
    if id.dim == 0 {
        let v = poly.faces(0)[id.index].verts[0];
        return Ok(f.eval(poly.vertex(v).as_slice()));
    }
    if id == poly.top_id() {
        return integrate_poly(f, poly, None);
    }
    integrate_poly(f, &poly.extract_face(id)?, None)
}

/// `∫_T (x - center)^α`.
pub fn integrate_monomial(alpha: &MultiIndex, center: &[f64], poly: &Polytope) -> Result<f64> {
    let f = MultiPolynomial::from_terms(center.to_vec(), [(alpha.clone(), 1.0)])?;
    integrate_poly(&f, poly, None)
}
