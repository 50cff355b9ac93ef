use super::{centroid, check_poly, integrate_local, integrate_poly, integrate_poly_face, restrict, trapezoid, IntegralReport, Method};
use crate::error::{Error, Result};
use crate::geometry::local::LocalFace;
use crate::geometry::{FaceFrame, FaceId, Polytope};
use crate::oracle;
use crate::sum::{compensated_sum, CompensatedSum};
use crate::tensorpoly::{contraction_field, divergence_of_scaled_field, factorial, DerivativeOracle, MultiPolynomial};

/// Gauss points per direction used for smooth remainders.
pub const REMAINDER_CUBATURE_ORDER: usize = 12;

/// The function being integrated.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    /// Facet integrals of the series are exact.
    Poly(&'a MultiPolynomial),
    /// Facet integrals use a [`FacetRule`].
    Smooth(&'a dyn DerivativeOracle),
}

impl Integrand<'_> {
    fn dim(&self) -> usize {
        match self {
            Integrand::Poly(p) => p.dim(),
            Integrand::Smooth(o) => o.dim(),
        }
    }

    fn contraction_at(&self, x: &[f64], z0: &[f64], k: usize) -> Result<f64> {
        let v: Vec<f64> = x.iter().zip(z0).map(|(a, b)| a - b).collect();
        match self {
            Integrand::Poly(p) => p.directional(x, &v, k),
            Integrand::Smooth(o) => o.directional(x, &v, k),
        }
    }
}

/// Quadrature for facet integrals of smooth contraction fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetRule {
    /// Collapsed Gauss–Legendre products on a tessellation of each facet,
    /// `order` points per direction. Needs convex facets.
    Gauss { order: usize },
    /// The recursive trapezoidal rule on each facet.
    Trapezoid,
}

impl Default for FacetRule {
    fn default() -> Self {
        FacetRule::Gauss { order: 10 }
    }
}

/// Largest `d + m + 1` for which the factorial weights are formed.
const MAX_FACTORIAL_ARG: usize = 30;

fn check_order(d: usize, m: usize) -> Result<()> {
    if d + m + 1 > MAX_FACTORIAL_ARG {
        return Err(Error::InvalidArgument(format!(
            "truncation order {m} in dimension {d} exceeds the supported range (d + m < {MAX_FACTORIAL_ARG})"
        )));
    }
    Ok(())
}

fn expansion_point(poly: &Polytope, z0: Option<&[f64]>) -> Result<Vec<f64>> {
    match z0 {
        Some(z) => {
            // validates dimension and, for embedded polytopes, the affine hull
            LocalFace::top(poly, Some(z))?;
            Ok(z.to_vec())
        }
        None => centroid(poly),
    }
}

fn series_coefficient(d: usize, k: usize) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * factorial(d as u32 - 1) / factorial((d + k) as u32)
}

fn remainder_coefficient(d: usize, m: usize) -> f64 {
    let sign = if (m + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * factorial(d as u32 - 1) / factorial((d + m) as u32)
}

/// `∫_T f` truncated after the order-`m` term:
/// `(d-1)! Σ_{k=0}^{m} (-1)^k/(d+k)! Σ_F ((x_F - z0)·n_F) ∫_F ∇^k f : (x - z0)^k`.
/// `z0` defaults to the centroid. Adding [`remainder_nd`] gives the exact
/// integral.
pub fn integrate_series(
    f: Integrand<'_>,
    poly: &Polytope,
    z0: Option<&[f64]>,
    m: usize,
    rule: FacetRule,
) -> Result<IntegralReport> {
    if f.dim() != poly.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: poly.ambient_dim(),
            got: f.dim(),
        });
    }
    if let Integrand::Smooth(o) = f {
        o.check_order(m)?;
    }
    let d = poly.intrinsic_dim();
    check_order(d, m)?;
    let z0 = expansion_point(poly, z0)?;
    let top = LocalFace::top(poly, Some(&z0))?;
    let fields: Vec<Option<MultiPolynomial>> = match f {
        Integrand::Poly(p) => (0..=m).map(|k| contraction_field(p, k, &z0).map(Some)).collect::<Result<_>>()?,
        Integrand::Smooth(_) => vec![None; m + 1],
    };
    let positions = poly.face(top.id).children.clone();
    let mut contributions = vec![0.0; positions.len()];
    for frame in top.frames()? {
        if frame.offset == 0.0 {
            continue;
        }
        let mut acc = CompensatedSum::new();
        for (k, field) in fields.iter().enumerate() {
            let integral = match field {
                Some(c) => integrate_local(&frame.face, &restrict(c, &frame.face)?)?,
                None => smooth_facet_integral(&f, poly, frame.child, &frame.face, &z0, k, rule)?,
            };
            acc.add(series_coefficient(d, k) * integral);
        }
        let slot = positions.iter().position(|&c| c == frame.child.index).expect("child listed");
        contributions[slot] = frame.offset * acc.value();
    }
    Ok(IntegralReport {
        value: compensated_sum(contributions.iter().copied()),
        method: Method::Series,
        truncation_order: Some(m),
        facet_contributions: contributions,
        oracle_value: None,
        abs_error: None,
    })
}

fn smooth_facet_integral(
    f: &Integrand<'_>,
    poly: &Polytope,
    facet: FaceId,
    face: &LocalFace<'_>,
    z0: &[f64],
    k: usize,
    rule: FacetRule,
) -> Result<f64> {
    let eval = |x: &[f64]| f.contraction_at(x, z0, k);
    if facet.dim == 0 {
        return eval(face.origin.as_slice());
    }
    match rule {
        FacetRule::Gauss { order } => {
            let sub = poly.extract_face(facet)?;
            let failure = std::cell::Cell::new(None);
            let g = |x: &[f64]| {
                eval(x).unwrap_or_else(|e| {
                    failure.set(Some(e));
                    f64::NAN
                })
            };
            let v = oracle::cubature(&g, &sub, order)?;
            match failure.take() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        FacetRule::Trapezoid => trapezoid::trapezoid_local(&|x| eval(x), face),
    }
}

/// `(-1)^{m+1} (d-1)!/(d+m)! ∫_T ∇^{m+1} f : (x - z0)^{m+1}`, the exact
/// difference between `∫_T f` and the order-`m` series. Polynomials are
/// integrated exactly; smooth functions by collapsed Gauss cubature on a
/// tessellation of `T`, which must then be convex.
pub fn remainder_nd(f: Integrand<'_>, poly: &Polytope, z0: Option<&[f64]>, m: usize) -> Result<f64> {
    let d = poly.intrinsic_dim();
    check_order(d, m)?;
    let z0 = expansion_point(poly, z0)?;
    let c = remainder_coefficient(d, m);
    match f {
        Integrand::Poly(p) => {
            check_poly(p, poly)?;
            Ok(c * integrate_poly(&contraction_field(p, m + 1, &z0)?, poly, Some(&z0))?)
        }
        Integrand::Smooth(o) => {
            o.check_order(m + 1)?;
            let failure = std::cell::Cell::new(None);
            let g = |x: &[f64]| {
                f.contraction_at(x, &z0, m + 1).unwrap_or_else(|e| {
                    failure.set(Some(e));
                    f64::NAN
                })
            };
            let v = oracle::cubature(&g, poly, REMAINDER_CUBATURE_ORDER)?;
            match failure.take() {
                Some(e) => Err(e),
                None => Ok(c * v),
            }
        }
    }
}

/// Pointwise form of the expansion: returns `(series, remainder)` at `x`,
/// where the series is `(n-1)! Σ_{k=0}^{m} (-1)^k/(n+k)! ∇·((x-z0) C_k)` with
/// `C_k = ∇^k f : (x-z0)^k`, and the two add up to `f(x)`.
pub fn expand_nd_check(f: &MultiPolynomial, x: &[f64], z0: &[f64], m: usize) -> Result<(f64, f64)> {
    f.check_point(x)?;
    f.check_point(z0)?;
    let n = f.dim();
    let mut acc = CompensatedSum::new();
    for k in 0..=m {
        let div = divergence_of_scaled_field(&contraction_field(f, k, z0)?, z0)?;
        acc.add(series_coefficient(n, k) * div.eval(x));
    }
    let remainder = remainder_coefficient(n, m) * contraction_field(f, m + 1, z0)?.eval(x);
    Ok((acc.value(), remainder))
}

/// `∫_Σ φ` over an m-face by the surface form of the expansion, truncated
/// after order `l`:
/// `(m-1)! Σ_{k=0}^{l} (-1)^k/(m+k)! Σ_σ ((x_σ - x0)·n_x) ∫_σ ∇^k φ : (x - x0)^k`,
/// with `x0` the chart origin and `n_x` the pushed-forward boundary normals.
/// Exact once `l` reaches the degree of `φ`.
pub fn integrate_surface_expansion(phi: &MultiPolynomial, frame: &FaceFrame, l: usize) -> Result<f64> {
    let face = &frame.face;
    check_poly(phi, face)?;
    let m = frame.intrinsic_dim();
    let x0 = frame.chart.x0().as_slice().to_vec();
    let mut acc = CompensatedSum::new();
    for k in 0..=l {
        let field = contraction_field(phi, k, &x0)?;
        let mut inner = CompensatedSum::new();
        for b in &frame.boundary {
            let id = FaceId { dim: m - 1, index: b.facet };
            inner.add(b.offset * integrate_poly_face(&field, face, id)?);
        }
        acc.add(series_coefficient(m, k) * inner.value());
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::geometry::ChartBasis;
    use crate::tensorpoly::ExpSum;
    use approx::assert_relative_eq;

    #[test]
    fn coefficients() {
        // d = 2: 1/2!, -1/3!, 1/4!
        assert_relative_eq!(series_coefficient(2, 0), 0.5);
        assert_relative_eq!(series_coefficient(2, 1), -1.0 / 6.0);
        assert_relative_eq!(series_coefficient(2, 2), 1.0 / 24.0);
        // remainder after m = 0 in d = 1 is -C_1
        assert_relative_eq!(remainder_coefficient(1, 0), -1.0);
    }

    #[test]
    fn series_of_polynomial_exact_past_degree() {
        let f = MultiPolynomial::parse("1 x0^3 x1 - 2 x1^2 + 1", 2).unwrap();
        let sq = generate::cube(2);
        let exact = integrate_poly(&f, &sq, None).unwrap();
        let s = integrate_series(Integrand::Poly(&f), &sq, Some(&[0.2, 0.1]), 4, FacetRule::default()).unwrap();
        assert_relative_eq!(s.value, exact, max_relative = 1e-13);
        for m in 0..4 {
            let s = integrate_series(Integrand::Poly(&f), &sq, Some(&[0.2, 0.1]), m, FacetRule::default()).unwrap();
            let r = remainder_nd(Integrand::Poly(&f), &sq, Some(&[0.2, 0.1]), m).unwrap();
            assert_relative_eq!(s.value + r, exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn smooth_series_plus_remainder_on_square() {
        let f = ExpSum { dim: 2 };
        let sq = generate::cube(2);
        let e1 = std::f64::consts::E - 1.0;
        for m in [0, 2, 5] {
            let s = integrate_series(Integrand::Smooth(&f), &sq, None, m, FacetRule::default()).unwrap();
            let r = remainder_nd(Integrand::Smooth(&f), &sq, None, m).unwrap();
            assert_relative_eq!(s.value + r, e1 * e1, max_relative = 1e-12);
        }
    }

    #[test]
    fn pointwise_expansion_reconstructs() {
        let f = MultiPolynomial::parse("1 x0^2 x1 + 3 x2 - 1", 3).unwrap();
        let x = [0.3, -0.4, 1.1];
        for m in 0..4 {
            let (s, r) = expand_nd_check(&f, &x, &[0.1, 0.2, 0.3], m).unwrap();
            assert_relative_eq!(s + r, f.eval(&x), max_relative = 1e-13);
        }
    }

    #[test]
    fn surface_expansion_matches_direct_integral() {
        let tri = generate::simplex_from(vec![vec![0.0, 0.0, 1.0], vec![2.0, 0.5, 0.0], vec![0.5, 1.5, 0.5]]).unwrap();
        let phi = MultiPolynomial::parse("1 x0 x2 + 2 x1^2 - 1", 3).unwrap();
        let direct = integrate_poly(&phi, &tri, None).unwrap();
        for basis in [ChartBasis::Orthonormal, ChartBasis::EdgeVectors] {
            let frame = FaceFrame::new(tri.clone(), basis).unwrap();
            let v = integrate_surface_expansion(&phi, &frame, 2).unwrap();
            assert_relative_eq!(v, direct, max_relative = 1e-13);
        }
    }
}
