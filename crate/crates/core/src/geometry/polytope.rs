use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

use super::linalg::{self, fit_flat, FLATNESS_TOL};
use super::local::LocalFace;
use crate::error::{Error, Result};

/// One k-face of the lattice: its vertex indices and its (k-1)-faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub verts: Vec<usize>,
    pub children: Vec<usize>,
}

/// Address of a face: `dim == intrinsic_dim()` denotes the polytope itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub dim: usize,
    pub index: usize,
}

/// A flat-faced polytope with an explicit face lattice.
///
/// `faces[k]` lists the k-faces for `k = 0..d-1`, where `d` is the intrinsic
/// dimension; the polytope itself is the implicit single d-face whose
/// children are all of `faces[d-1]`. Faces need not be convex, only flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<DVector<f64>>,
    faces: Vec<Vec<Face>>,
    top: Face,
    normals: Option<Vec<DVector<f64>>>,
}

impl Polytope {
    /// Builds and validates a polytope. `normals`, if given, are outward unit
    /// facet normals in facet order and require a full-dimensional polytope.
    pub fn new(
        vertices: Vec<Vec<f64>>,
        faces: Vec<Vec<Face>>,
        normals: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let ambient = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidPolytope("no vertices".into()))?;
        if ambient == 0 {
            return Err(Error::InvalidPolytope("zero-dimensional ambient space".into()));
        }
        for v in &vertices {
            linalg::check_dim(ambient, v.len())?;
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPolytope("non-finite vertex coordinate".into()));
            }
        }
        let d = faces.len();
        if d == 0 {
            return Err(Error::InvalidPolytope("empty face lattice".into()));
        }
        if d > ambient {
            return Err(Error::InvalidPolytope(format!(
                "intrinsic dimension {d} exceeds ambient dimension {ambient}"
            )));
        }
        let top = Face {
            verts: (0..vertices.len()).collect(),
            children: (0..faces[d - 1].len()).collect(),
        };
        let poly = Self {
            ambient,
            vertices: linalg::to_dvectors(&vertices),
            faces,
            top,
            normals: None,
        };
        poly.validate_lattice()?;
        poly.validate_flatness()?;
        let normals = match normals {
            None => None,
            Some(ns) => Some(poly.validate_normals(ns)?),
        };
        Ok(Self { normals, ..poly })
    }

    fn validate_lattice(&self) -> Result<()> {
        let nv = self.vertices.len();
        let bad = |msg: String| Err(Error::InvalidPolytope(msg));
        for (i, f) in self.faces[0].iter().enumerate() {
            if f.verts.len() != 1 || !f.children.is_empty() {
                return bad(format!("0-face {i} must have exactly one vertex and no children"));
            }
            if f.verts[0] >= nv {
                return bad(format!("0-face {i} references missing vertex {}", f.verts[0]));
            }
        }
        for k in 1..=self.faces.len() {
            let count = if k == self.faces.len() { 1 } else { self.faces[k].len() };
            for i in 0..count {
                let f = self.face(FaceId { dim: k, index: i });
                if f.children.len() < 2 {
                    return bad(format!("{k}-face {i} has fewer than two children"));
                }
                let mut union = BTreeSet::new();
                for &c in &f.children {
                    let child = self.faces[k - 1]
                        .get(c)
                        .ok_or_else(|| Error::InvalidPolytope(format!("{k}-face {i} references missing child {c}")))?;
                    union.extend(child.verts.iter().copied());
                }
                let own: BTreeSet<usize> = f.verts.iter().copied().collect();
                if own.len() != f.verts.len() {
                    return bad(format!("{k}-face {i} lists a vertex twice"));
                }
                if own != union {
                    return bad(format!(
                        "{k}-face {i}: vertex list differs from the union of its children"
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_flatness(&self) -> Result<()> {
        for k in 1..=self.faces.len() {
            if k == self.ambient {
                continue;
            }
            for id in self.face_ids(k) {
                let pts = self.face_points(id);
                let fit = fit_flat(&pts, k);
                let (local, dist) = fit.max_residual;
                if dist > FLATNESS_TOL {
                    return Err(Error::NotFlat {
                        vertex: self.face(id).verts[local],
                        distance: dist,
                    });
                }
            }
        }
        Ok(())
    }

    fn validate_normals(&self, ns: Vec<Vec<f64>>) -> Result<Vec<DVector<f64>>> {
        let d = self.intrinsic_dim();
        if d != self.ambient {
            return Err(Error::InvalidPolytope(
                "normals are only accepted for full-dimensional polytopes".into(),
            ));
        }
        if ns.len() != self.faces[d - 1].len() {
            return Err(Error::InvalidPolytope(format!(
                "{} normals given for {} facets",
                ns.len(),
                self.faces[d - 1].len()
            )));
        }
        let mut out = Vec::with_capacity(ns.len());
        for (i, n) in ns.into_iter().enumerate() {
            linalg::check_dim(self.ambient, n.len())?;
            let n = DVector::from_vec(n);
            if (n.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidPolytope(format!("normal {i} is not unit length")));
            }
            let pts = self.face_points(FaceId { dim: d - 1, index: i });
            let spread = pts.iter().map(|p| (p - &pts[0]).norm()).fold(1.0, f64::max);
            for p in &pts[1..] {
                if (p - &pts[0]).dot(&n).abs() > 1e-9 * spread {
                    return Err(Error::InvalidPolytope(format!(
                        "normal {i} is not perpendicular to its facet"
                    )));
                }
            }
            out.push(n);
        }
        Ok(out)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DVector<f64> {
        &self.vertices[i]
    }

    pub fn faces(&self, k: usize) -> &[Face] {
        &self.faces[k]
    }

    pub fn num_facets(&self) -> usize {
        self.faces[self.intrinsic_dim() - 1].len()
    }

    pub fn normals(&self) -> Option<&[DVector<f64>]> {
        self.normals.as_deref()
    }

    pub fn top_id(&self) -> FaceId {
        FaceId {
            dim: self.intrinsic_dim(),
            index: 0,
        }
    }

    pub fn face(&self, id: FaceId) -> &Face {
        if id.dim == self.intrinsic_dim() {
            &self.top
        } else {
            &self.faces[id.dim][id.index]
        }
    }

    pub fn face_ids(&self, k: usize) -> impl Iterator<Item = FaceId> {
        let count = if k == self.intrinsic_dim() { 1 } else { self.faces[k].len() };
        (0..count).map(move |index| FaceId { dim: k, index })
    }

    pub fn children(&self, id: FaceId) -> impl Iterator<Item = FaceId> + '_ {
        self.face(id).children.iter().map(move |&index| FaceId {
            dim: id.dim - 1,
            index,
        })
    }

    pub fn face_points(&self, id: FaceId) -> Vec<DVector<f64>> {
        self.face(id).verts.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Arithmetic mean of the vertices.
    pub fn vertex_mean(&self) -> DVector<f64> {
        linalg::mean(&self.vertices)
    }

    /// True if the polytope is a simplex (d + 1 vertices).
    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.intrinsic_dim() + 1
    }

    /// Intrinsic d-dimensional measure.
    pub fn measure(&self) -> Result<f64> {
        LocalFace::top(self, None)?.measure()
    }

    /// Outward unit facet normals (in ambient coordinates) and the facet
    /// offsets `(x_F - z0)·n_F` measured from `z0` (default: vertex mean).
    /// `None` marks a degenerate facet.
    pub fn facet_normals(&self, z0: Option<&[f64]>) -> Result<Vec<Option<(DVector<f64>, f64)>>> {
        let top = LocalFace::top(self, z0)?;
        let mut out = vec![None; self.num_facets()];
        for frame in top.frames()? {
            out[frame.child.index] = Some((top.to_ambient_direction(&frame.normal), frame.offset));
        }
        Ok(out)
    }

    /// True if no vertex lies strictly outside any facet hyperplane.
    pub fn is_convex(&self) -> Result<bool> {
        LocalFace::top(self, None)?.is_convex()
    }

    /// The face `id` as a polytope of its own, with vertices renumbered in
    /// increasing order of their original index.
    pub fn extract_face(&self, id: FaceId) -> Result<Polytope> {
        if id.dim == 0 {
            return Err(Error::InvalidArgument(
                "a vertex has no face lattice; use the point directly".into(),
            ));
        }
        let mut verts = self.face(id).verts.clone();
        verts.sort_unstable();
        let vmap: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // collect descendants level by level
        let mut levels: Vec<Vec<usize>> = vec![Vec::new(); id.dim];
        let mut current: BTreeSet<usize> = self.face(id).children.iter().copied().collect();
        for k in (0..id.dim).rev() {
            levels[k] = current.iter().copied().collect();
            let mut next = BTreeSet::new();
            for &f in &current {
                next.extend(self.faces[k][f].children.iter().copied());
            }
            current = next;
        }
        let mut faces = Vec::with_capacity(id.dim);
        for k in 0..id.dim {
            let prev: HashMap<usize, usize> = if k == 0 {
                HashMap::new()
            } else {
                levels[k - 1].iter().enumerate().map(|(i, &f)| (f, i)).collect()
            };
            let layer = levels[k]
                .iter()
                .map(|&f| {
                    let face = &self.faces[k][f];
                    Face {
                        verts: face.verts.iter().map(|v| vmap[v]).collect(),
                        children: face.children.iter().map(|c| prev[c]).collect(),
                    }
                })
                .collect();
            faces.push(layer);
        }
        let vertices = verts.iter().map(|&v| self.vertices[v].as_slice().to_vec()).collect();
        Polytope::new(vertices, faces, None)
    }

    /// Image under `x ↦ x0 + A x`; the lattice is kept and normals dropped.
    pub fn map_affine(&self, a: &DMatrix<f64>, x0: &[f64]) -> Result<Polytope> {
        linalg::check_dim(self.ambient, a.ncols())?;
        linalg::check_dim(a.nrows(), x0.len())?;
        let x0 = DVector::from_column_slice(x0);
        let vertices = self
            .vertices
            .iter()
            .map(|v| (&x0 + a * v).as_slice().to_vec())
            .collect();
        Polytope::new(vertices, self.faces.clone(), None)
    }

    pub fn translate(&self, t: &[f64]) -> Result<Polytope> {
        let id = DMatrix::identity(self.ambient, self.ambient);
        let mut out = self.map_affine(&id, t)?;
        out.normals = self.normals.clone();
        Ok(out)
    }

    /// Builds a polytope from vertices and its facets only, for simplicial
    /// facet structures: every facet must be a (d-1)-simplex given as d
    /// vertex indices. Lower faces are all sub-simplices of facets.
    pub fn from_simplicial_facets(vertices: Vec<Vec<f64>>, facets: &[Vec<usize>]) -> Result<Polytope> {
        let d = facets
            .first()
            .map(|f| f.len())
            .ok_or_else(|| Error::InvalidPolytope("no facets".into()))?;
        if facets.iter().any(|f| f.len() != d) {
            return Err(Error::InvalidPolytope("facets are not all simplices of one dimension".into()));
        }
        // faces by sorted vertex set, per dimension
        let mut index: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); d];
        let mut faces: Vec<Vec<Face>> = vec![Vec::new(); d];
        fn insert(
            set: Vec<usize>,
            index: &mut Vec<HashMap<Vec<usize>, usize>>,
            faces: &mut Vec<Vec<Face>>,
        ) -> usize {
            let k = set.len() - 1;
            if let Some(&i) = index[k].get(&set) {
                return i;
            }
            let children = if k == 0 {
                Vec::new()
            } else {
                (0..set.len())
                    .map(|skip| {
                        let sub: Vec<usize> = set
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        insert(sub, index, faces)
                    })
                    .collect()
            };
            let i = faces[k].len();
            faces[k].push(Face {
                verts: set.clone(),
                children,
            });
            index[k].insert(set, i);
            i
        }
        for f in facets {
            let mut set = f.clone();
            set.sort_unstable();
            insert(set, &mut index, &mut faces);
        }
        Polytope::new(vertices, faces, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use approx::assert_relative_eq;

    #[test]
    fn square_measure_and_normals() {
        let sq = generate::cube(2);
        assert_relative_eq!(sq.measure().unwrap(), 1.0, epsilon = 1e-14);
        let normals = sq.facet_normals(Some(&[0.0, 0.0])).unwrap();
        for (n, off) in normals.into_iter().flatten() {
            // offsets from the origin corner are 0 or 1
            assert!(off.abs() < 1e-14 || (off - 1.0).abs() < 1e-14);
            assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_non_flat_face() {
        let mut verts = generate::cube(3).vertices().iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>();
        let faces = generate::cube(3).faces.clone();
        verts[7][2] += 1e-6;
        assert!(matches!(Polytope::new(verts, faces, None), Err(Error::NotFlat { .. })));
    }

    #[test]
    fn rejects_inconsistent_lattice() {
        let sq = generate::cube(2);
        let mut faces = sq.faces.clone();
        faces[1][0].verts = vec![0, 3];
        let verts = sq.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
        assert!(Polytope::new(verts, faces, None).is_err());
    }

    #[test]
    fn extract_face_of_cube_is_square() {
        let cube = generate::cube(3);
        let face = cube.extract_face(FaceId { dim: 2, index: 0 }).unwrap();
        assert_eq!(face.intrinsic_dim(), 2);
        assert_eq!(face.ambient_dim(), 3);
        assert_relative_eq!(face.measure().unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn nonconvex_polygon_area() {
        // an L-shaped hexagon of area 3
        let verts = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![0.0, 2.0],
        ];
        let p = generate::polygon(verts).unwrap();
        assert!(!p.is_convex().unwrap());
        assert_relative_eq!(p.measure().unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn embedded_triangle_measure() {
        let tri = Polytope::from_simplicial_facets(
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]],
            &[vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap();
        assert_relative_eq!(tri.measure().unwrap(), 2f64.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn supplied_normals_are_checked() {
        let sq = generate::cube(2);
        let verts: Vec<Vec<f64>> = sq.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
        let bad = vec![vec![1.0, 0.0]; sq.num_facets()];
        assert!(Polytope::new(verts, sq.faces.clone(), Some(bad)).is_err());
    }
}
