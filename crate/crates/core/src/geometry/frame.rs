use nalgebra::{DMatrix, DVector};

use super::chart::{chart_of, AffineChart, ChartBasis};
use super::linalg::{self, cofactor_matrix, fit_flat};
use super::polytope::{FaceId, Polytope};
use crate::error::{Error, Result};

/// Image of a reference normal under a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PushedNormal {
    /// Unit normal in x-space, tangent to the face.
    pub n_x: DVector<f64>,
    /// `|σ| / |σ_s|` for the boundary portion.
    pub measure_ratio: f64,
    /// `(|σ_s| / |σ|) sqrt(det G)`, so that `n_x = α A G^{-1} n_s`.
    pub alpha: f64,
}

/// Maps the unit outward normal `n_s` of a reference facet (given by its
/// vertices in s-space) to the face's x-space.
pub fn pushforward_normal(chart: &AffineChart, n_s: &[f64], facet_s: &[Vec<f64>]) -> Result<PushedNormal> {
    let m = chart.intrinsic_dim();
    linalg::check_dim(m, n_s.len())?;
    let n_s = DVector::from_column_slice(n_s);
    if (n_s.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument("reference normal is not unit length".into()));
    }
    if facet_s.is_empty() {
        return Err(Error::InvalidArgument("empty boundary facet".into()));
    }
    let pts = linalg::to_dvectors(facet_s);
    for p in &pts {
        linalg::check_dim(m, p.len())?;
    }
    let fit = fit_flat(&pts, m - 1);
    if fit.is_degenerate() {
        return Err(Error::DegenerateFace("reference facet is degenerate".into()));
    }
    let w = chart.jacobian() * (chart.gram_inverse() * &n_s);
    let w_norm = w.norm();
    let q = chart.jacobian() * &fit.basis;
    let measure_ratio = linalg::determinant(&(q.transpose() * &q)).max(0.0).sqrt();
    if measure_ratio == 0.0 || w_norm == 0.0 {
        return Err(Error::DegenerateFace("boundary portion collapses under the chart".into()));
    }
    Ok(PushedNormal {
        n_x: w / w_norm,
        measure_ratio,
        alpha: chart.measure_factor() / measure_ratio,
    })
}

/// Both sides of `|σ|² / |σ_s|² = (Cof(G) n_s, n_s)`.
///
/// The left side maps the reference facet through the chart and measures
/// both copies with the recursive volume formula; the right side uses a
/// cofactor matrix built from explicit minors.
pub fn cofactor_identity_check(chart: &AffineChart, facet_s: &Polytope, n_s: &[f64]) -> Result<(f64, f64)> {
    let m = chart.intrinsic_dim();
    linalg::check_dim(m, facet_s.ambient_dim())?;
    linalg::check_dim(m, n_s.len())?;
    let n_s = DVector::from_column_slice(n_s);
    let sigma_s = facet_s.measure()?;
    let sigma = facet_s.map_affine(chart.jacobian(), chart.x0().as_slice())?.measure()?;
    let lhs = (sigma / sigma_s).powi(2);
    let rhs = (cofactor_matrix(chart.gram()) * &n_s).dot(&n_s);
    Ok((lhs, rhs))
}

/// `det(G) (G^{-1} n_s, n_s)`, the inverse-Gram form of the same ratio.
pub fn gram_inverse_form(chart: &AffineChart, n_s: &[f64]) -> Result<f64> {
    linalg::check_dim(chart.intrinsic_dim(), n_s.len())?;
    let n_s = DVector::from_column_slice(n_s);
    Ok(chart.gram_det() * (chart.gram_inverse() * &n_s).dot(&n_s))
}

/// One boundary portion σ of a face, seen from both sides of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPortion {
    /// Index of σ among the face's facets.
    pub facet: usize,
    pub n_s: DVector<f64>,
    pub pushed: PushedNormal,
    /// `(x_σ - x0) · n_x`, with `x0` the chart origin.
    pub offset: f64,
}

/// An m-face with its chart, its reference polytope Σ_s in s-space and the
/// pushed-forward normals of its boundary.
#[derive(Debug, Clone)]
pub struct FaceFrame {
    pub chart: AffineChart,
    pub face: Polytope,
    pub reference: Polytope,
    pub boundary: Vec<BoundaryPortion>,
}

impl FaceFrame {
    /// Frame for a polytope of intrinsic dimension `m >= 1`.
    pub fn new(face: Polytope, basis: ChartBasis) -> Result<Self> {
        let chart = chart_of(&face, basis)?;
        let pinv = chart.pseudoinverse();
        let m = face.intrinsic_dim();
        let shift = -(&pinv * chart.x0());
        let reference = face.map_affine(&pinv, shift.as_slice())?;
        let normals = reference.facet_normals(Some(&vec![0.0; m]))?;
        let mut boundary = Vec::with_capacity(normals.len());
        for (i, entry) in normals.into_iter().enumerate() {
            let Some((n_s, _)) = entry else { continue };
            let id = FaceId { dim: m - 1, index: i };
            let facet_s: Vec<Vec<f64>> = reference
                .face_points(id)
                .iter()
                .map(|p| p.as_slice().to_vec())
                .collect();
            let pushed = pushforward_normal(&chart, n_s.as_slice(), &facet_s)?;
            let x_sigma = linalg::mean(&face.face_points(id));
            let offset = (x_sigma - chart.x0()).dot(&pushed.n_x);
            boundary.push(BoundaryPortion {
                facet: i,
                n_s,
                pushed,
                offset,
            });
        }
        Ok(Self {
            chart,
            face,
            reference,
            boundary,
        })
    }

    pub fn of_face(poly: &Polytope, id: FaceId, basis: ChartBasis) -> Result<Self> {
        Self::new(poly.extract_face(id)?, basis)
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.face.intrinsic_dim()
    }

    /// `A` in `x = x0 + A s`.
    pub fn jacobian(&self) -> &DMatrix<f64> {
        self.chart.jacobian()
    }
}
