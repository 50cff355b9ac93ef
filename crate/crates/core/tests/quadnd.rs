use divquad::generate;
use divquad::geometry::{ChartBasis, FaceFrame, Polytope};
use divquad::oracle;
use divquad::quadnd::{
    centroid, integrate_poly, integrate_series, integrate_surface_expansion, remainder_nd, volume, FacetRule,
    Integrand,
};
use divquad::tensorpoly::{DerivativeOracle, ExpSum, MultiIndex, MultiPolynomial};
use divquad::Result;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly<R: Rng>(r: &mut R, n: usize, max_degree: u32) -> MultiPolynomial {
    let center: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let count = r.random_range(1..6);
    let terms: Vec<(MultiIndex, f64)> = (0..count)
        .map(|_| {
            let d = r.random_range(0..=max_degree);
            let mut e = vec![0u32; n];
            for _ in 0..d {
                e[r.random_range(0..n)] += 1;
            }
            (MultiIndex::new(e), r.random_range(-2.0..2.0))
        })
        .collect();
    MultiPolynomial::from_terms(center, terms).unwrap()
}

fn close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(scale)
}

/// Sum of |terms| integrated: a scale against which cancellation is judged.
fn magnitude(f: &MultiPolynomial, poly: &Polytope) -> f64 {
    let abs_terms: Vec<(MultiIndex, f64)> = f.terms().map(|(i, c)| (i.clone(), c.abs())).collect();
    let g = MultiPolynomial::from_terms(f.center().to_vec(), abs_terms).unwrap();
    let radius = poly
        .vertices()
        .iter()
        .flat_map(|v| v.iter().zip(f.center()).map(|(a, b)| (a - b).abs()))
        .fold(1.0, f64::max);
    g.eval(&vec![radius; f.dim()]).abs() * poly.measure().unwrap()
}

/// The two pieces of a convex polytope on either side of `{x : a·x = c}`.
fn split(poly: &Polytope, a: &DVector<f64>, c: f64) -> Option<(Polytope, Polytope)> {
    let side = |v: &DVector<f64>| a.dot(v) - c;
    let mut lo: Vec<Vec<f64>> = Vec::new();
    let mut hi: Vec<Vec<f64>> = Vec::new();
    for v in poly.vertices() {
        let s = side(v);
        if s <= 0.0 {
            lo.push(v.as_slice().to_vec());
        }
        if s >= 0.0 {
            hi.push(v.as_slice().to_vec());
        }
    }
    for e in poly.faces(1) {
        let (p, q) = (poly.vertex(e.verts[0]), poly.vertex(e.verts[1]));
        let (sp, sq) = (side(p), side(q));
        if sp * sq < 0.0 {
            let x = p + (q - p) * (sp / (sp - sq));
            lo.push(x.as_slice().to_vec());
            hi.push(x.as_slice().to_vec());
        }
    }
    Some((generate::hull(&lo)?, generate::hull(&hi)?))
}

struct ExpFirst {
    dim: usize,
}

impl DerivativeOracle for ExpFirst {
    fn dim(&self) -> usize {
        self.dim
    }

    fn directional(&self, x: &[f64], v: &[f64], k: usize) -> Result<f64> {
        Ok(v[0].powi(k as i32) * x[0].exp())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_against_tessellation(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let poly = generate::random_convex(&mut r, n);
        let f = random_poly(&mut r, n, 5);
        let got = integrate_poly(&f, &poly, None).unwrap();
        let want = oracle::integrate_poly(&f, &poly).unwrap();
        prop_assert!(close(got, want, 1e-10, magnitude(&f, &poly)), "{got} vs {want}");
    }

    #[test]
    fn independent_of_reference_point(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let poly = generate::random_convex(&mut r, n);
        let f = random_poly(&mut r, n, 4);
        let z0: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let base = integrate_poly(&f, &poly, None).unwrap();
        let moved = integrate_poly(&f, &poly, Some(&z0)).unwrap();
        prop_assert!(close(moved, base, 1e-10, magnitude(&f, &poly)));
        let v = volume(&poly, None).unwrap();
        prop_assert!(close(volume(&poly, Some(&z0)).unwrap(), v, 1e-10, 1.0));
    }

    #[test]
    fn additive_over_a_hyperplane_split(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let poly = generate::random_convex(&mut r, n);
        let f = random_poly(&mut r, n, 4);
        let a = DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0)).normalize();
        let proj: Vec<f64> = poly.vertices().iter().map(|v| a.dot(v)).collect();
        let (lo, hi) = proj.iter().fold((f64::MAX, f64::MIN), |(l, h), &p| (l.min(p), h.max(p)));
        let c = lo + (hi - lo) * r.random_range(0.2..0.8);
        let Some((p1, p2)) = split(&poly, &a, c) else { return Err(TestCaseError::reject("degenerate split")) };
        let whole = integrate_poly(&f, &poly, None).unwrap();
        let parts = integrate_poly(&f, &p1, None).unwrap() + integrate_poly(&f, &p2, None).unwrap();
        prop_assert!(close(parts, whole, 1e-10, magnitude(&f, &poly)));
    }

    #[test]
    fn translation_equivariance(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let poly = generate::random_convex(&mut r, n);
        let f = random_poly(&mut r, n, 4);
        let t: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let moved = poly.translate(&t).unwrap();
        // g(x) = f(x - t): same coefficients about a shifted center
        let center: Vec<f64> = f.center().iter().zip(&t).map(|(c, s)| c + s).collect();
        let g = MultiPolynomial::from_terms(center, f.terms().map(|(i, c)| (i.clone(), c))).unwrap();
        let a = integrate_poly(&f, &poly, None).unwrap();
        let b = integrate_poly(&g, &moved, None).unwrap();
        prop_assert!(close(b, a, 1e-10, magnitude(&f, &poly)));
        let c0 = centroid(&poly).unwrap();
        let c1 = centroid(&moved).unwrap();
        for j in 0..n {
            prop_assert!((c1[j] - c0[j] - t[j]).abs() < 1e-10 * (1.0 + t[j].abs()));
        }
    }

    #[test]
    fn first_moment_about_centroid_vanishes(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let poly = generate::random_convex(&mut r, n);
        let c = centroid(&poly).unwrap();
        let v = volume(&poly, None).unwrap();
        let diam = poly.vertices().iter().map(|p| (p - poly.vertex(0)).norm()).fold(0.0, f64::max);
        for j in 0..n {
            let xj = MultiPolynomial::from_terms(c.clone(), [(MultiIndex::unit(n, j), 1.0)]).unwrap();
            prop_assert!(integrate_poly(&xj, &poly, None).unwrap().abs() < 1e-10 * v * diam.max(1.0));
        }
    }

    #[test]
    fn surface_expansion_equals_direct(seed in any::<u64>(), m in 1usize..4, extra in 0usize..3) {
        let mut r = rng(seed);
        let n = m + extra;
        let reference = generate::random_convex(&mut r, m);
        let face = if extra == 0 { reference } else { generate::embed(&mut r, &reference, n) };
        let phi = random_poly(&mut r, n, 4);
        let basis = if seed % 2 == 0 { ChartBasis::Orthonormal } else { ChartBasis::EdgeVectors };
        let frame = FaceFrame::new(face.clone(), basis).unwrap();
        let l = phi.degree() as usize;
        let got = integrate_surface_expansion(&phi, &frame, l).unwrap();
        let want = integrate_poly(&phi, &face, None).unwrap();
        prop_assert!(close(got, want, 1e-10, magnitude(&phi, &face)), "{got} vs {want}");
    }
}

#[test]
fn series_plus_remainder_on_unit_cube() {
    let cube = generate::cube(3);
    let f = ExpSum { dim: 3 };
    let exact = (std::f64::consts::E - 1.0).powi(3);
    for m in 0..=4 {
        let s = integrate_series(Integrand::Smooth(&f), &cube, None, m, FacetRule::default()).unwrap();
        let rem = remainder_nd(Integrand::Smooth(&f), &cube, None, m).unwrap();
        assert!((s.value + rem - exact).abs() < 1e-9, "m={m}: {}", s.value + rem - exact);
    }
}

#[test]
fn truncation_order_scaling() {
    for n in [2usize, 3] {
        let f = ExpFirst { dim: n };
        for m in 0..=3 {
            let rel = |h: f64| {
                let a = DMatrix::<f64>::identity(n, n) * h;
                let cube = generate::cube(n).map_affine(&a, &vec![0.3; n]).unwrap();
                let exact = (0.3f64 + h).exp() - 0.3f64.exp();
                let exact = exact * h.powi(n as i32 - 1);
                let s = integrate_series(Integrand::Smooth(&f), &cube, None, m, FacetRule::default()).unwrap();
                let rem = remainder_nd(Integrand::Smooth(&f), &cube, None, m).unwrap();
                assert!((s.value + rem - exact).abs() < 1e-11 * exact.abs().max(1.0));
                (rem / exact).abs()
            };
            let ratio = rel(0.4) / rel(0.2);
            assert!(ratio >= 2f64.powi(m as i32 + 1) * 0.7, "n={n} m={m}: {ratio}");
        }
    }
}
