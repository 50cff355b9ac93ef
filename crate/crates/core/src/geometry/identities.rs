//! Randomized residual suites for the chart and normal identities.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::chart::{parallelepiped_volume, ChartBasis};
use super::frame::{cofactor_identity_check, gram_inverse_form, FaceFrame};
use super::linalg::{self, cofactor_matrix};
use super::polytope::FaceId;
use crate::error::Result;
use crate::generate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// `sqrt(det AᵀA)` against `|det A|` (square) and `|a₁ × a₂|` (2 in R³).
    Volume,
    /// `|σ|²/|σ_s|² = (Cof(G) n_s, n_s) = det(G) (G⁻¹ n_s, n_s)`.
    Cofactor,
    /// Pushed normals are unit, tangent to the face, orthogonal to their
    /// facet and outward.
    Normal,
    /// An edge of a 2-face in R³ with `n_s = (s₂*, -s₁*)/|s*|`.
    EdgeExample,
}

impl Identity {
    pub const ALL: [Identity; 4] = [Identity::Volume, Identity::Cofactor, Identity::Normal, Identity::EdgeExample];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Volume => "volume",
            Identity::Cofactor => "cofactor",
            Identity::Normal => "normal",
            Identity::EdgeExample => "edge-example",
        }
    }
}

impl std::str::FromStr for Identity {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown identity '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub cases: usize,
    pub checks: usize,
    pub max_residual: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

struct Tally {
    checks: usize,
    max: f64,
}

impl Tally {
    fn push(&mut self, r: f64) {
        self.checks += 1;
        // NaN must not be swallowed by max
        self.max = if r.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(r) };
    }
}

/// Runs `cases` random instances of `identity` from `seed`.
pub fn run_identity(identity: Identity, cases: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (identity as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut t = Tally { checks: 0, max: 0.0 };
    for _ in 0..cases {
        match identity {
            Identity::Volume => volume_case(&mut rng, &mut t),
            Identity::Cofactor => cofactor_case(&mut rng, &mut t)?,
            Identity::Normal => normal_case(&mut rng, &mut t)?,
            Identity::EdgeExample => edge_case(&mut rng, &mut t),
        }
    }
    Ok(IdentityReport {
        identity,
        cases,
        checks: t.checks,
        max_residual: t.max,
    })
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-2.0..2.0))
}

fn volume_case(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let n = rng.random_range(1..6);
    let a = random_matrix(rng, n, n);
    t.push(rel(parallelepiped_volume(&a).volume, a.determinant().abs()));
    let b = random_matrix(rng, 3, 2);
    let c = Vector3::new(b[(0, 0)], b[(1, 0)], b[(2, 0)]).cross(&Vector3::new(b[(0, 1)], b[(1, 1)], b[(2, 1)]));
    t.push(rel(parallelepiped_volume(&b).volume, c.norm()));
}

fn cofactor_case(rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let m = rng.random_range(2..5);
    let n = rng.random_range(m..6);
    let chart = generate::random_chart(rng, m, n);
    let reference = generate::random_convex(rng, m);
    let normals = reference.facet_normals(None)?;
    for (i, entry) in normals.iter().enumerate() {
        let Some((n_s, _)) = entry else { continue };
        let facet = reference.extract_face(FaceId { dim: m - 1, index: i })?;
        let (lhs, rhs) = cofactor_identity_check(&chart, &facet, n_s.as_slice())?;
        t.push(rel(lhs, rhs));
        t.push(rel(gram_inverse_form(&chart, n_s.as_slice())?, rhs));
    }
    Ok(())
}

fn normal_case(rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let m = rng.random_range(2..5);
    let n = rng.random_range(m..6);
    let reference = generate::random_convex(rng, m);
    let face = generate::embed(rng, &reference, n);
    let basis = if rng.random::<bool>() { ChartBasis::Orthonormal } else { ChartBasis::EdgeVectors };
    let frame = FaceFrame::new(face, basis)?;
    let a = frame.jacobian();
    let inside = frame.face.vertex_mean();
    let q = a.clone().qr().q();
    let proj = DMatrix::identity(n, n) - &q * q.transpose();
    for b in &frame.boundary {
        let n_x = &b.pushed.n_x;
        t.push((n_x.norm() - 1.0).abs());
        t.push((&proj * n_x).norm());
        let pts = frame.face.face_points(FaceId { dim: m - 1, index: b.facet });
        let scale = pts.iter().map(|p| (p - &pts[0]).norm()).fold(1.0, f64::max);
        for p in &pts[1..] {
            t.push(n_x.dot(&(p - &pts[0])).abs() / scale);
        }
        let inward = (&inside - linalg::mean(&pts)).dot(n_x);
        t.push(if inward < 0.0 { 0.0 } else { 1.0 + inward });
        let w = a * (frame.chart.gram_inverse() * &b.n_s) * b.pushed.alpha;
        t.push((w - n_x).norm());
    }
    Ok(())
}

fn edge_case(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let v = random_matrix(rng, 3, 2);
    if parallelepiped_volume(&v).degenerate {
        return;
    }
    let s1 = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
    let s2 = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
    let star = &s2 - &s1;
    let len2 = star.norm_squared();
    if len2 < 1e-6 {
        return;
    }
    let x0 = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
    let a1 = &x0 + &v * &s1;
    let a4 = &x0 + &v * &s2;
    let n_s = DVector::from_vec(vec![star[1], -star[0]]) / len2.sqrt();
    let lhs = (a4 - a1).norm_squared() / len2;
    let (v1, v2) = (v.column(0), v.column(1));
    let expanded = (v1.norm_squared() * star[0] * star[0]
        + 2.0 * star[0] * star[1] * v1.dot(&v2)
        + v2.norm_squared() * star[1] * star[1])
        / len2;
    let g = v.transpose() * &v;
    let rhs = (cofactor_matrix(&g) * &n_s).dot(&n_s);
    t.push(rel(lhs, rhs));
    t.push(rel(expanded, rhs));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_small_residuals() {
        for id in Identity::ALL {
            let r = run_identity(id, 20, 3).unwrap();
            assert!(r.checks > 0, "{id:?}");
            assert!(r.max_residual < 1e-10, "{id:?}: {}", r.max_residual);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = run_identity(Identity::Normal, 10, 7).unwrap();
        let b = run_identity(Identity::Normal, 10, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parses_names() {
        assert_eq!("edge-example".parse::<Identity>().unwrap(), Identity::EdgeExample);
        assert!("nope".parse::<Identity>().is_err());
    }
}
