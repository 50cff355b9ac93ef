use nalgebra::{DMatrix, DVector};

use super::linalg::{self, fit_flat, FLATNESS_TOL};
use super::polytope::Polytope;
use crate::error::{Error, Result};

/// How the columns of a chart's Jacobian are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartBasis {
    /// Orthonormal basis of the face's direction space (unit Gram matrix).
    #[default]
    Orthonormal,
    /// Raw edge vectors from one vertex, chosen greedily for independence.
    EdgeVectors,
}

/// `x = x0 + A s`, mapping R^m onto the affine hull of an m-face in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineChart {
    x0: DVector<f64>,
    a: DMatrix<f64>,
    gram: DMatrix<f64>,
    gram_det: f64,
    gram_inv: DMatrix<f64>,
}

impl AffineChart {
    pub fn new(x0: DVector<f64>, a: DMatrix<f64>) -> Result<Self> {
        linalg::check_dim(a.nrows(), x0.len())?;
        if a.ncols() > a.nrows() {
            return Err(Error::InvalidArgument(format!(
                "chart of dimension {} cannot be injective into R^{}",
                a.ncols(),
                a.nrows()
            )));
        }
        let gram = a.transpose() * &a;
        let pv = parallelepiped_volume(&a);
        if pv.degenerate {
            return Err(Error::DegenerateFace("chart Jacobian is rank-deficient".into()));
        }
        let gram_inv = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateFace("Gram matrix is not positive definite".into()))?
            .inverse();
        Ok(Self {
            x0,
            a,
            gram_det: pv.volume * pv.volume,
            gram,
            gram_inv,
        })
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn jacobian(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_det(&self) -> f64 {
        self.gram_det
    }

    pub fn gram_inverse(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Moore–Penrose pseudoinverse `(AᵀA)^{-1} Aᵀ`.
    pub fn pseudoinverse(&self) -> DMatrix<f64> {
        &self.gram_inv * self.a.transpose()
    }

    /// `sqrt(det AᵀA)`, the ratio of m-dimensional measures.
    pub fn measure_factor(&self) -> f64 {
        self.gram_det.sqrt()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn map(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.x0 + &self.a * s
    }

    /// Least-squares preimage `(AᵀA)^{-1} Aᵀ (x - x0)`.
    pub fn preimage(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.gram_inv * (self.a.transpose() * (x - &self.x0))
    }
}

/// Builds the chart of the m-face with the given vertices, anchored at the
/// vertex mean. Fails on rank deficiency or vertices off a common m-flat.
pub fn build_chart(face_vertices: &[Vec<f64>], m: usize, basis: ChartBasis) -> Result<AffineChart> {
    if face_vertices.len() < m + 1 {
        return Err(Error::DegenerateFace(format!(
            "{} vertices cannot span an {m}-face",
            face_vertices.len()
        )));
    }
    let n = face_vertices[0].len();
    if m > n {
        return Err(Error::InvalidArgument(format!("an {m}-face does not fit in R^{n}")));
    }
    let pts = linalg::to_dvectors(face_vertices);
    for p in &pts {
        linalg::check_dim(n, p.len())?;
    }
    let fit = fit_flat(&pts, m);
    if fit.is_degenerate() {
        return Err(Error::DegenerateFace(format!("vertices span fewer than {m} dimensions")));
    }
    if fit.max_residual.1 > FLATNESS_TOL {
        return Err(Error::NotFlat {
            vertex: fit.max_residual.0,
            distance: fit.max_residual.1,
        });
    }
    let a = match basis {
        ChartBasis::Orthonormal => fit.basis,
        ChartBasis::EdgeVectors => edge_basis(&pts, m)?,
    };
    AffineChart::new(fit.base, a)
}

/// Chart of a polytope's own affine hull.
pub fn chart_of(poly: &Polytope, basis: ChartBasis) -> Result<AffineChart> {
    let verts: Vec<Vec<f64>> = poly.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    build_chart(&verts, poly.intrinsic_dim(), basis)
}

/// Edges from the first vertex, picked greedily by largest component
/// orthogonal to those already chosen.
fn edge_basis(pts: &[DVector<f64>], m: usize) -> Result<DMatrix<f64>> {
    let n = pts[0].len();
    let edges: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
    let scale = edges.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let mut residuals = edges.clone();
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(m);
    while chosen.len() < m {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= 1e-8 * scale {
            return Err(Error::DegenerateFace("edge vectors are not independent".into()));
        }
        let q = &residuals[best] / norm;
        for r in residuals.iter_mut() {
            let c = q.dot(r);
            *r -= &q * c;
        }
        chosen.push(edges[best].clone());
    }
    Ok(linalg::columns(&chosen, n))
}

/// Unsigned volume of the parallelepiped spanned by the columns of `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelepipedVolume {
    pub volume: f64,
    /// Set when the Gram determinant is negligible against the product of
    /// squared column lengths (Hadamard's bound).
    pub degenerate: bool,
}

pub fn parallelepiped_volume(a: &DMatrix<f64>) -> ParallelepipedVolume {
    if a.ncols() == 0 {
        return ParallelepipedVolume {
            volume: 1.0,
            degenerate: false,
        };
    }
    let gram = a.transpose() * a;
    let det = gram.determinant();
    let hadamard: f64 = a.column_iter().map(|c| c.norm_squared()).product();
    let degenerate = hadamard == 0.0 || det <= 1e-24 * hadamard;
    ParallelepipedVolume {
        volume: det.max(0.0).sqrt(),
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_square_in_3d() {
        let a = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let v = parallelepiped_volume(&a);
        assert_relative_eq!(v.volume, 1.0);
        assert!(!v.degenerate);
    }

    #[test]
    fn collinear_columns_are_degenerate() {
        let a = DMatrix::from_column_slice(3, 2, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let v = parallelepiped_volume(&a);
        assert!(v.volume.abs() < 1e-12);
        assert!(v.degenerate);
    }

    #[test]
    fn single_column_is_its_length() {
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 2.0]);
        assert_relative_eq!(parallelepiped_volume(&a).volume, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn chart_rejects_non_flat_and_degenerate() {
        let off = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1e-6],
        ];
        assert!(matches!(
            build_chart(&off, 2, ChartBasis::Orthonormal),
            Err(Error::NotFlat { .. })
        ));
        let line = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            build_chart(&line, 2, ChartBasis::EdgeVectors),
            Err(Error::DegenerateFace(_))
        ));
    }

    #[test]
    fn orthonormal_chart_has_unit_gram() {
        let tri = vec![vec![0.0, 0.0, 1.0], vec![2.0, 0.0, 1.0], vec![0.0, 3.0, 2.0]];
        let c = build_chart(&tri, 2, ChartBasis::Orthonormal).unwrap();
        assert_relative_eq!(c.gram_det(), 1.0, epsilon = 1e-14);
        let p = c.pseudoinverse();
        let id = &p * c.jacobian();
        assert_relative_eq!(id, DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn volume_is_sqrt_gram_det(cols in prop::collection::vec(-3.0f64..3.0, 8)) {
            // 4×2 Jacobian; the Cauchy–Binet sum of squared 2×2 minors equals det(AᵀA)
            let a = DMatrix::from_column_slice(4, 2, &cols);
            let mut cb = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let minor = a[(i, 0)] * a[(j, 1)] - a[(j, 0)] * a[(i, 1)];
                    cb += minor * minor;
                }
            }
            let v = parallelepiped_volume(&a);
            prop_assert!((v.volume * v.volume - cb).abs() <= 1e-10 * cb.max(1.0));
        }
    }
}
