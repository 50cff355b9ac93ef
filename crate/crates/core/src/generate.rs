//! Constructors for standard and random polytopes, maps and charts.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::geometry::linalg::complement_direction;
use crate::geometry::{AffineChart, Face, FaceId, Polytope};

/// The segment `[a, b]` on the real line.
pub fn segment(a: f64, b: f64) -> Polytope {
    Polytope::new(
        vec![vec![a], vec![b]],
        vec![vec![
            Face {
                verts: vec![0],
                children: vec![],
            },
            Face {
                verts: vec![1],
                children: vec![],
            },
        ]],
        None,
    )
    .expect("segment is valid")
}

/// The unit cube `[0,1]^n`.
pub fn cube(n: usize) -> Polytope {
    assert!(n >= 1);
    let seg = segment(0.0, 1.0);
    let mut out = seg.clone();
    for _ in 1..n {
        out = product(&out, &seg).expect("cube is valid");
    }
    out
}

/// The standard simplex `conv{0, e_1, ..., e_n}`.
pub fn simplex(n: usize) -> Polytope {
    let mut verts = vec![vec![0.0; n]];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        verts.push(e);
    }
    simplex_from(verts).expect("standard simplex is valid")
}

/// The simplex with the given n+1 vertices in R^n, or an embedded k-simplex
/// given by k+1 vertices.
pub fn simplex_from(verts: Vec<Vec<f64>>) -> Result<Polytope> {
    let k = verts.len() - 1;
    if k == 1 {
        let faces = vec![vec![
            Face {
                verts: vec![0],
                children: vec![],
            },
            Face {
                verts: vec![1],
                children: vec![],
            },
        ]];
        return Polytope::new(verts, faces, None);
    }
    let facets: Vec<Vec<usize>> = (0..=k)
        .map(|skip| (0..=k).filter(|&i| i != skip).collect())
        .collect();
    Polytope::from_simplicial_facets(verts, &facets)
}

/// A polygon through the given vertices in cyclic order, in any ambient
/// dimension. Convexity is not required.
pub fn polygon(verts: Vec<Vec<f64>>) -> Result<Polytope> {
    let k = verts.len();
    if k < 3 {
        return Err(Error::InvalidPolytope("a polygon needs three vertices".into()));
    }
    let points = (0..k)
        .map(|i| Face {
            verts: vec![i],
            children: vec![],
        })
        .collect();
    let edges = (0..k)
        .map(|i| Face {
            verts: vec![i, (i + 1) % k],
            children: vec![i, (i + 1) % k],
        })
        .collect();
    Polytope::new(verts, vec![points, edges], None)
}

fn all_faces(p: &Polytope) -> Vec<FaceId> {
    (0..=p.intrinsic_dim()).flat_map(|k| p.face_ids(k).collect::<Vec<_>>()).collect()
}

/// Cartesian product `P × Q` with its product face lattice.
pub fn product(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    let nq = q.vertices().len();
    let mut vertices = Vec::with_capacity(p.vertices().len() * nq);
    for a in p.vertices() {
        for b in q.vertices() {
            vertices.push(a.iter().chain(b.iter()).copied().collect::<Vec<f64>>());
        }
    }
    let d = p.intrinsic_dim() + q.intrinsic_dim();
    let mut faces: Vec<Vec<Face>> = vec![Vec::new(); d];
    let mut index: HashMap<(FaceId, FaceId), usize> = HashMap::new();
    let fp = all_faces(p);
    let fq = all_faces(q);
    for k in 0..d {
        for &a in &fp {
            for &b in &fq {
                if a.dim + b.dim != k {
                    continue;
                }
                let mut verts = Vec::new();
                for &i in &p.face(a).verts {
                    for &j in &q.face(b).verts {
                        verts.push(i * nq + j);
                    }
                }
                let mut children = Vec::new();
                if a.dim > 0 {
                    children.extend(p.children(a).map(|c| index[&(c, b)]));
                }
                if b.dim > 0 {
                    children.extend(q.children(b).map(|c| index[&(a, c)]));
                }
                index.insert((a, b), faces[k].len());
                faces[k].push(Face { verts, children });
            }
        }
    }
    Polytope::new(vertices, faces, None)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Convex hull of points in general position in R^n (n >= 2), by testing
/// every n-subset as a candidate facet. Returns `None` when some subset is
/// nearly coplanar with another point, so callers can resample.
pub fn hull(points: &[Vec<f64>]) -> Option<Polytope> {
    let n = points[0].len();
    let pts: Vec<DVector<f64>> = points.iter().map(|p| DVector::from_column_slice(p)).collect();
    let scale = pts.iter().map(|p| (p - &pts[0]).norm()).fold(0.0, f64::max);
    let mut facets = Vec::new();
    for subset in combinations(pts.len(), n) {
        let mut ortho: Vec<DVector<f64>> = Vec::new();
        for &i in &subset[1..] {
            let mut r = &pts[i] - &pts[subset[0]];
            for q in &ortho {
                r -= q * q.dot(&r);
            }
            if r.norm() < 1e-6 * scale {
                return None;
            }
            ortho.push(r.normalize());
        }
        let b = DMatrix::from_columns(&ortho);
        let normal = if n == 1 { DVector::from_element(1, 1.0) } else { complement_direction(&b) };
        let (mut pos, mut neg) = (false, false);
        for (i, p) in pts.iter().enumerate() {
            if subset.contains(&i) {
                continue;
            }
            let s = (p - &pts[subset[0]]).dot(&normal);
            if s.abs() < 1e-6 * scale {
                return None;
            }
            if s > 0.0 {
                pos = true;
            } else {
                neg = true;
            }
        }
        if !(pos && neg) {
            facets.push(subset);
        }
    }
    // keep only hull vertices, renumbered
    let mut used: Vec<usize> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let facets: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| f.iter().map(|v| remap[v]).collect())
        .collect();
    let verts = used.iter().map(|&v| points[v].clone()).collect();
    Polytope::from_simplicial_facets(verts, &facets).ok()
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Convex hull of `count` uniform points in `[-1,1]^n`, resampled until the
/// points are in general position and span R^n.
pub fn random_hull<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Polytope {
    assert!(n >= 2 && count > n);
    loop {
        let pts: Vec<Vec<f64>> = (0..count).map(|_| random_point(rng, n)).collect();
        if let Some(p) = hull(&pts) {
            if p.intrinsic_dim() == n && p.measure().map(|v| v > 1e-3).unwrap_or(false) {
                return p;
            }
        }
    }
}

/// Convex polygon with `k` vertices at sorted random angles on the unit circle.
pub fn random_convex_polygon<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Polytope {
    assert!(k >= 3);
    loop {
        let mut angles: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let min_gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(angles[0] + std::f64::consts::TAU - angles[k - 1]))
            .fold(f64::INFINITY, f64::min);
        if min_gap < 0.05 {
            continue;
        }
        let verts = angles.iter().map(|a| vec![a.cos(), a.sin()]).collect();
        return polygon(verts).expect("circle polygon is valid");
    }
}

/// A random affine map `x ↦ A x + t` on R^n with `|det A|` bounded away from 0.
pub fn random_affine<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (DMatrix<f64>, DVector<f64>) {
    loop {
        let a = DMatrix::<f64>::from_fn(n, n, |i, j| rng.random_range(-0.6..0.6) + if i == j { 1.0 } else { 0.0 });
        if a.determinant().abs() > 0.25 {
            let t = DVector::from_vec(random_point(rng, n));
            return (a, t);
        }
    }
}

/// A random full-dimensional convex polytope in R^n, drawn from simplices,
/// random hulls, boxes and products, then moved by a random affine map.
pub fn random_convex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Polytope {
    let base = match n {
        1 => {
            let a = rng.random_range(-1.0..0.0);
            segment(a, a + rng.random_range(0.5..2.0))
        }
        2 => {
            let k = rng.random_range(3..9);
            random_convex_polygon(rng, k)
        }
        _ => match rng.random_range(0..4) {
            0 => {
                let count = n + 1 + rng.random_range(1..4);
                random_hull(rng, n, count)
            }
            1 => cube(n),
            2 => {
                let lower = random_convex(rng, n - 1);
                product(&lower, &segment(0.0, rng.random_range(0.5..1.5))).expect("prism is valid")
            }
            _ if n >= 4 => {
                let lower = random_convex(rng, n - 2);
                let k = rng.random_range(3..6);
                product(&lower, &random_convex_polygon(rng, k)).expect("product is valid")
            }
            _ => simplex(n),
        },
    };
    let (a, t) = random_affine(rng, n);
    base.map_affine(&a, t.as_slice()).expect("affine image is valid")
}

/// A random injective affine map R^m → R^n with well-conditioned columns.
pub fn random_embedding<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> (DMatrix<f64>, DVector<f64>) {
    assert!(m <= n);
    loop {
        let a = DMatrix::<f64>::from_fn(n, m, |i, j| rng.random_range(-1.0..1.0) + if i == j { 0.8 } else { 0.0 });
        let g = a.transpose() * &a;
        let hadamard: f64 = a.column_iter().map(|c| c.norm_squared()).product();
        if g.determinant() > 0.05 * hadamard {
            let t = DVector::from_vec(random_point(rng, n));
            return (a, t);
        }
    }
}

/// Embeds `poly` (full-dimensional in R^m) into R^n by a random injective map.
pub fn embed<R: Rng + ?Sized>(rng: &mut R, poly: &Polytope, n: usize) -> Polytope {
    let (a, t) = random_embedding(rng, poly.ambient_dim(), n);
    poly.map_affine(&a, t.as_slice()).expect("embedding preserves validity")
}

/// A random chart of dimension m in R^n.
pub fn random_chart<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> AffineChart {
    let (a, t) = random_embedding(rng, m, n);
    AffineChart::new(t, a).expect("well-conditioned embedding")
}

/// A random point strictly inside a convex polytope (a random convex
/// combination of its vertices, weighted toward the vertex mean).
pub fn random_interior_point<R: Rng + ?Sized>(rng: &mut R, poly: &Polytope) -> Vec<f64> {
    let w: Vec<f64> = poly.vertices().iter().map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut x = DVector::zeros(poly.ambient_dim());
    for (wi, v) in w.iter().zip(poly.vertices()) {
        x += v * (wi / total);
    }
    x.as_slice().to_vec()
}
