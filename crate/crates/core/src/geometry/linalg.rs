//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold below which a singular value counts as zero.
pub(crate) const RANK_TOL: f64 = 1e-12;

/// Absolute distance a vertex may sit off its face's flat.
pub const FLATNESS_TOL: f64 = 1e-10;

pub(crate) fn mean(points: &[DVector<f64>]) -> DVector<f64> {
    let n = points[0].len();
    let mut m = DVector::zeros(n);
    for p in points {
        m += p;
    }
    m / points.len() as f64
}

pub(crate) fn columns(vectors: &[DVector<f64>], nrows: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(nrows, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        a.set_column(j, v);
    }
    a
}

/// Orthonormal frame of the affine hull of `points`, assumed `k`-dimensional.
#[derive(Debug, Clone)]
pub(crate) struct FlatFit {
    pub base: DVector<f64>,
    /// `n × k`, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Last pivot residual relative to the largest point spread.
    pub conditioning: f64,
    /// Largest distance of a point from the fitted flat.
    pub max_residual: (usize, f64),
}

impl FlatFit {
    pub fn is_degenerate(&self) -> bool {
        self.conditioning <= RANK_TOL
    }
}

/// Pivoted Gram–Schmidt on the centered points: each step takes the point
/// with the largest residual as the next direction.
pub(crate) fn fit_flat(points: &[DVector<f64>], k: usize) -> FlatFit {
    let n = points[0].len();
    let base = mean(points);
    let mut residuals: Vec<DVector<f64>> = points.iter().map(|p| p - &base).collect();
    let spread = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut basis = DMatrix::zeros(n, k);
    let mut conditioning = if k == 0 { 1.0 } else { 0.0 };
    for j in 0..k {
        let (pivot, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if norm <= 0.0 || spread == 0.0 {
            conditioning = 0.0;
            break;
        }
        conditioning = norm / spread;
        let mut q = &residuals[pivot] / norm;
        // second pass against earlier directions
        for i in 0..j {
            let c = basis.column(i).dot(&q);
            q -= basis.column(i) * c;
        }
        let q = q.normalize();
        for r in residuals.iter_mut() {
            let c = q.dot(r);
            *r -= &q * c;
        }
        basis.set_column(j, &q);
    }
    let max_residual = residuals
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.norm()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    FlatFit {
        base,
        basis,
        conditioning,
        max_residual,
    }
}

/// Unit vector spanning the orthogonal complement of the orthonormal
/// columns of `b` (`k × (k-1)`).
pub(crate) fn complement_direction(b: &DMatrix<f64>) -> DVector<f64> {
    let k = b.nrows();
    let mut best = DVector::zeros(k);
    let mut best_norm = -1.0;
    for i in 0..k {
        let mut e = DVector::zeros(k);
        e[i] = 1.0;
        let r = &e - b * (b.transpose() * &e);
        let nr = r.norm();
        if nr > best_norm {
            best_norm = nr;
            best = r;
        }
    }
    // one Gram–Schmidt pass is enough for unit-scale inputs; a second pass
    // cleans up the residual overlap
    let r = &best - b * (b.transpose() * &best);
    r.normalize()
}

pub(crate) fn determinant(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.determinant()
}

/// Cofactor matrix by explicit minors: `Cof(M)_{ij} = (-1)^{i+j} det(M without row i, col j)`.
pub fn cofactor_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.nrows();
    assert_eq!(k, m.ncols(), "cofactor of a non-square matrix");
    if k == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    DMatrix::from_fn(k, k, |i, j| {
        let minor = m.clone().remove_row(i).remove_column(j);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

pub(crate) fn to_dvectors(points: &[Vec<f64>]) -> Vec<DVector<f64>> {
    points.iter().map(|p| DVector::from_column_slice(p)).collect()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
