//! Reference integrators that do not use the divergence expansions.
//!
//! Convex polytopes are split into simplices by coning from vertex means.
//! Polynomials are then integrated in closed form on each simplex, smooth
//! functions with collapsed Gauss–Legendre products, and Monte Carlo
//! rejection sampling gives an unrelated statistical cross-check.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{linalg, FaceId, Polytope};
use crate::sum::CompensatedSum;
use crate::tensorpoly::{factorial, MultiIndex, MultiPolynomial};

/// A simplicial decomposition of a polytope.
#[derive(Debug, Clone)]
pub struct SimplexMesh {
    dim: usize,
    simplices: Vec<Vec<DVector<f64>>>,
}

impl SimplexMesh {
    /// Intrinsic dimension of each simplex.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplices(&self) -> &[Vec<DVector<f64>>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.simplices.iter().map(|s| simplex_measure(s)).sum()
    }
}

fn edge_matrix(simplex: &[DVector<f64>]) -> DMatrix<f64> {
    let v0 = &simplex[0];
    let edges: Vec<DVector<f64>> = simplex[1..].iter().map(|v| v - v0).collect();
    linalg::columns(&edges, v0.len())
}

/// `sqrt(det EᵀE)` for the edge matrix `E` of a simplex; `|det E|` when
/// full-dimensional.
fn simplex_jacobian(simplex: &[DVector<f64>]) -> f64 {
    let e = edge_matrix(simplex);
    if e.nrows() == e.ncols() {
        linalg::determinant(&e).abs()
    } else {
        linalg::determinant(&(e.transpose() * &e)).max(0.0).sqrt()
    }
}

pub fn simplex_measure(simplex: &[DVector<f64>]) -> f64 {
    simplex_jacobian(simplex) / factorial(simplex.len() as u32 - 1)
}

/// Splits a convex polytope into simplices. A simplex is returned as is;
/// otherwise every face is coned from its vertex mean over the recursive
/// decomposition of its facets. Full-dimensional simplices are positively
/// oriented.
pub fn tessellate(poly: &Polytope) -> Result<SimplexMesh> {
    if poly.intrinsic_dim() >= 2 && !poly.is_convex()? {
        return Err(Error::UnsupportedOracle("tessellation requires a convex polytope".into()));
    }
    let d = poly.intrinsic_dim();
    let scale = poly
        .vertices()
        .iter()
        .map(|v| (v - poly.vertex(0)).norm())
        .fold(0.0, f64::max);
    let mut simplices = split(poly, poly.top_id());
    simplices.retain(|s| simplex_measure(s) > 1e-13 * scale.powi(d as i32));
    if d == poly.ambient_dim() {
        for s in &mut simplices {
            if d >= 2 && linalg::determinant(&edge_matrix(s)) < 0.0 {
                s.swap(1, 2);
            } else if d == 1 && s[1][0] < s[0][0] {
                s.swap(0, 1);
            }
        }
    }
    Ok(SimplexMesh { dim: d, simplices })
}

fn split(poly: &Polytope, id: FaceId) -> Vec<Vec<DVector<f64>>> {
    let face = poly.face(id);
    if face.verts.len() == id.dim + 1 {
        return vec![poly.face_points(id)];
    }
    let apex = linalg::mean(&poly.face_points(id));
    let mut out = Vec::new();
    for child in poly.children(id) {
        for mut s in split(poly, child) {
            s.insert(0, apex.clone());
            out.push(s);
        }
    }
    out
}

/// `∫_S f` over one simplex (any intrinsic dimension k ≤ n) in closed form:
/// `f` is pulled back to the edge coordinates `λ` and each monomial uses
/// `∫_{Δ_k} λ^β = β! / (k + |β|)!`.
pub fn simplex_integrate(simplex: &[DVector<f64>], f: &MultiPolynomial) -> Result<f64> {
    let v0 = &simplex[0];
    linalg::check_dim(f.dim(), v0.len())?;
    let e = edge_matrix(simplex);
    let k = e.ncols() as u32;
    let g = f.pullback(&e, v0.as_slice())?;
    let mut acc = CompensatedSum::new();
    for (beta, c) in g.terms() {
        let num: f64 = beta.exponents().iter().map(|&b| factorial(b)).product();
        acc.add(c * num / factorial(k + beta.degree()));
    }
    Ok(acc.value() * simplex_jacobian(simplex))
}

/// `∫_S (x - center)^α` over one simplex.
pub fn simplex_monomial(simplex: &[DVector<f64>], alpha: &MultiIndex, center: &[f64]) -> Result<f64> {
    let f = MultiPolynomial::from_terms(center.to_vec(), [(alpha.clone(), 1.0)])?;
    simplex_integrate(simplex, &f)
}

/// `∫_T f` for a convex polytope, summed over its tessellation.
pub fn integrate_poly(f: &MultiPolynomial, poly: &Polytope) -> Result<f64> {
    let mesh = tessellate(poly)?;
    let mut acc = CompensatedSum::new();
    for s in mesh.simplices() {
        acc.add(simplex_integrate(s, f)?);
    }
    Ok(acc.value())
}

fn gauss_pairs(order: usize) -> Result<Vec<(f64, f64)>> {
    let order = NonZeroUsize::new(order)
        .ok_or_else(|| Error::InvalidArgument("cubature order must be positive".into()))?;
    // map from [-1, 1] to [0, 1]
    Ok(GaussLegendre::new(order)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

/// Collapsed-coordinate Gauss product rule on one simplex, with `order`
/// points per direction.
pub fn simplex_cubature(f: &dyn Fn(&[f64]) -> f64, simplex: &[DVector<f64>], order: usize) -> Result<f64> {
    let pairs = gauss_pairs(order)?;
    Ok(cubature_with(f, simplex, &pairs))
}

fn cubature_with(f: &dyn Fn(&[f64]) -> f64, simplex: &[DVector<f64>], pairs: &[(f64, f64)]) -> f64 {
    let e = edge_matrix(simplex);
    let k = e.ncols();
    let jac = simplex_jacobian(simplex);
    if k == 0 {
        return f(simplex[0].as_slice());
    }
    let q = pairs.len();
    let mut idx = vec![0usize; k];
    let mut acc = CompensatedSum::new();
    let mut lambda = DVector::zeros(k);
    loop {
        // λ_i = u_i Π_{j<i} (1 - u_j); Jacobian Π_i (1 - u_i)^{k-1-i}
        let mut rest = 1.0;
        let mut w = 1.0;
        for i in 0..k {
            let (u, wi) = pairs[idx[i]];
            lambda[i] = rest * u;
            w *= wi * (1.0 - u).powi((k - 1 - i) as i32);
            rest *= 1.0 - u;
        }
        let x = &simplex[0] + &e * &lambda;
        acc.add(w * f(x.as_slice()));
        let mut pos = 0;
        loop {
            idx[pos] += 1;
            if idx[pos] < q {
                break;
            }
            idx[pos] = 0;
            pos += 1;
            if pos == k {
                return acc.value() * jac;
            }
        }
    }
}

/// `∫_T f` for smooth `f` over a convex polytope (any intrinsic dimension)
/// by collapsed Gauss products on its tessellation.
pub fn cubature(f: &dyn Fn(&[f64]) -> f64, poly: &Polytope, order: usize) -> Result<f64> {
    let pairs = gauss_pairs(order)?;
    let mesh = tessellate(poly)?;
    let mut acc = CompensatedSum::new();
    for s in mesh.simplices() {
        acc.add(cubature_with(f, s, &pairs));
    }
    Ok(acc.value())
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub accepted: usize,
}

/// Rejection sampling in the bounding box of a full-dimensional convex
/// polytope. Sample `i` is the `i`-th draw of a ChaCha8 stream seeded with
/// `seed`, so runs are reproducible.
pub fn mc_integrate(f: &dyn Fn(&[f64]) -> f64, poly: &Polytope, samples: usize, seed: u64) -> Result<McEstimate> {
    let n = poly.ambient_dim();
    if poly.intrinsic_dim() != n {
        return Err(Error::UnsupportedOracle("Monte Carlo needs a full-dimensional polytope".into()));
    }
    if !poly.is_convex()? {
        return Err(Error::UnsupportedOracle("Monte Carlo needs a convex polytope".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let center = poly.vertex_mean();
    let planes: Vec<(DVector<f64>, f64)> = poly.facet_normals(Some(center.as_slice()))?.into_iter().flatten().collect();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in poly.vertices() {
        for j in 0..n {
            lo[j] = lo[j].min(v[j]);
            hi[j] = hi[j].max(v[j]);
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let (mut sum, mut sum_sq) = (CompensatedSum::new(), CompensatedSum::new());
    let mut accepted = 0usize;
    for _ in 0..samples {
        for j in 0..n {
            x[j] = lo[j] + (hi[j] - lo[j]) * rng.random::<f64>();
        }
        let inside = planes.iter().all(|(nrm, off)| {
            let s: f64 = (0..n).map(|j| (x[j] - center[j]) * nrm[j]).sum();
            s <= *off
        });
        if inside {
            let v = f(&x);
            sum.add(v);
            sum_sq.add(v * v);
            accepted += 1;
        }
    }
    let rate = accepted as f64 / samples as f64;
    if rate < 1e-3 {
        return Err(Error::Inefficient(rate));
    }
    let nf = samples as f64;
    let mean = sum.value() / nf;
    let var = (sum_sq.value() / nf - mean * mean).max(0.0);
    Ok(McEstimate {
        value: box_volume * mean,
        std_error: box_volume * (var / nf).sqrt(),
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use approx::assert_relative_eq;

    #[test]
    fn triangle_is_its_own_tessellation() {
        let tri = generate::simplex(2);
        let mesh = tessellate(&tri).unwrap();
        assert_eq!(mesh.len(), 1);
    }

    #[test]
    fn square_and_cube_counts() {
        assert_eq!(tessellate(&generate::cube(2)).unwrap().len(), 4);
        let cube = tessellate(&generate::cube(3)).unwrap();
        assert_eq!(cube.len(), 24);
        assert_relative_eq!(cube.total_measure(), 1.0, epsilon = 1e-14);
        for s in cube.simplices() {
            assert!(edge_matrix(s).determinant() > 0.0);
        }
    }

    #[test]
    fn nonconvex_is_rejected() {
        let l = generate::polygon(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![0.0, 2.0],
        ])
        .unwrap();
        assert!(matches!(tessellate(&l), Err(Error::UnsupportedOracle(_))));
    }

    #[test]
    fn monomials_on_standard_simplex() {
        // ∫_{Δ2} x^2 y = 2!·1!/5! = 1/60
        let tri = generate::simplex(2);
        let s = &tessellate(&tri).unwrap().simplices()[0].clone();
        let v = simplex_monomial(s, &MultiIndex::new(vec![2, 1]), &[0.0, 0.0]).unwrap();
        assert_relative_eq!(v, 1.0 / 60.0, max_relative = 1e-14);
    }

    #[test]
    fn cubature_matches_closed_form() {
        let f = MultiPolynomial::parse("3 x0^3 x1 - x1^2 + 0.5", 2).unwrap();
        let sq = generate::cube(2);
        let exact = integrate_poly(&f, &sq).unwrap();
        let num = cubature(&|x| f.eval(x), &sq, 4).unwrap();
        assert_relative_eq!(exact, 3.0 / 8.0 - 1.0 / 3.0 + 0.5, max_relative = 1e-14);
        assert_relative_eq!(num, exact, max_relative = 1e-13);
    }

    #[test]
    fn exp_on_unit_square() {
        let v = cubature(&|x| (x[0] + x[1]).exp(), &generate::cube(2), 12).unwrap();
        let e1 = std::f64::consts::E - 1.0;
        assert_relative_eq!(v, e1 * e1, max_relative = 1e-13);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let sq = generate::cube(2);
        let a = mc_integrate(&|x| x[0] * x[1], &sq, 20_000, 11).unwrap();
        let b = mc_integrate(&|x| x[0] * x[1], &sq, 20_000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 0.25).abs() < 5.0 * a.std_error);
    }
}
