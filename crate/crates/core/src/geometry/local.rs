//! Faces in intrinsic local coordinates and the recursion over the lattice.
//!
//! A k-face is represented by the coordinates of its vertices in an
//! orthonormal frame of its own affine hull, so every level of the recursion
//! sees a full-dimensional polytope in R^k. The frame origin is the vertex
//! mean for every face except the top one, whose origin may be chosen.

use nalgebra::{DMatrix, DVector};

use super::linalg::{complement_direction, fit_flat};
use super::polytope::{FaceId, Polytope};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone)]
pub(crate) struct LocalFace<'a> {
    pub poly: &'a Polytope,
    pub id: FaceId,
    /// (vertex index, local coordinates), sorted by vertex index.
    coords: Vec<(usize, DVector<f64>)>,
    /// Ambient position of the local origin.
    pub origin: DVector<f64>,
    /// `n × k` orthonormal columns mapping local to ambient directions.
    pub basis: DMatrix<f64>,
    is_top: bool,
}

/// A child face of a [`LocalFace`], expressed in the parent's coordinates.
#[derive(Debug, Clone)]
pub(crate) struct ChildFrame<'a> {
    pub child: FaceId,
    /// Child vertex mean, in parent coordinates.
    pub base: DVector<f64>,
    /// `k × (k-1)` orthonormal basis of the child's direction space.
    pub basis: DMatrix<f64>,
    /// Outward unit normal in parent coordinates (unoriented until `frames`).
    pub normal: DVector<f64>,
    /// `base · normal`, the signed distance of the child's hyperplane from the parent origin.
    pub offset: f64,
    pub face: LocalFace<'a>,
}

impl<'a> LocalFace<'a> {
    /// The polytope itself, with local origin at `z0` (default: vertex mean).
    pub fn top(poly: &'a Polytope, z0: Option<&[f64]>) -> Result<Self> {
        let d = poly.intrinsic_dim();
        let n = poly.ambient_dim();
        let pts = poly.vertices();
        let fit = fit_flat(pts, d);
        if fit.is_degenerate() {
            return Err(Error::DegenerateFace(format!(
                "the {d}-dimensional polytope spans fewer than {d} dimensions"
            )));
        }
        let basis = if d == n { DMatrix::identity(n, n) } else { fit.basis.clone() };
        let origin = match z0 {
            None => fit.base.clone(),
            Some(z) => {
                if z.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: z.len(),
                    });
                }
                let z = DVector::from_column_slice(z);
                if d < n {
                    let rel = &z - &fit.base;
                    let off = (&rel - &basis * (basis.transpose() * &rel)).norm();
                    let scale = pts.iter().map(|p| (p - &fit.base).norm()).fold(1.0, f64::max);
                    if off > 1e-9 * scale {
                        return Err(Error::InvalidArgument(format!(
                            "expansion point lies {off:e} off the polytope's affine hull"
                        )));
                    }
                }
                z
            }
        };
        let coords = poly
            .face(poly.top_id())
            .verts
            .iter()
            .map(|&v| (v, basis.transpose() * (&pts[v] - &origin)))
            .collect();
        Ok(Self {
            poly,
            id: poly.top_id(),
            coords: sorted(coords),
            origin,
            basis,
            is_top: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.id.dim
    }

    pub fn coords(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.coords.iter().map(|(_, c)| c)
    }

    fn coord_of(&self, v: usize) -> &DVector<f64> {
        let i = self
            .coords
            .binary_search_by_key(&v, |(idx, _)| *idx)
            .expect("child vertex belongs to its parent");
        &self.coords[i].1
    }

    fn scale(&self) -> f64 {
        self.coords().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }

    pub fn to_ambient_direction(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * v
    }

    pub fn to_ambient_point(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.basis * s
    }

    /// Child geometry with an arbitrary normal sign; `None` if degenerate.
    fn child_geometry(&self, child: FaceId) -> Option<ChildFrame<'a>> {
        let k = self.dim();
        let pts: Vec<DVector<f64>> = self
            .poly
            .face(child)
            .verts
            .iter()
            .map(|&v| self.coord_of(v).clone())
            .collect();
        let fit = fit_flat(&pts, k - 1);
        if fit.is_degenerate() {
            return None;
        }
        let basis = fit.basis;
        let base = fit.base;
        let normal = complement_direction(&basis);
        let coords = self
            .poly
            .face(child)
            .verts
            .iter()
            .zip(&pts)
            .map(|(&v, p)| (v, basis.transpose() * (p - &base)))
            .collect();
        let face = LocalFace {
            poly: self.poly,
            id: child,
            coords: sorted(coords),
            origin: self.to_ambient_point(&base),
            basis: &self.basis * &basis,
            is_top: false,
        };
        let offset = base.dot(&normal);
        Some(ChildFrame {
            child,
            base,
            basis,
            normal,
            offset,
            face,
        })
    }

    fn child_geometries(&self) -> Vec<ChildFrame<'a>> {
        self.poly
            .children(self.id)
            .filter_map(|c| {
                let g = self.child_geometry(c);
                if g.is_none() {
                    log::warn!("skipping degenerate {}-face {} of {:?}", c.dim, c.index, self.id);
                }
                g
            })
            .collect()
    }

    /// Child frames with outward normals. Degenerate children are skipped.
    pub fn frames(&self) -> Result<Vec<ChildFrame<'a>>> {
        let supplied = if self.is_top && self.dim() == self.poly.ambient_dim() {
            self.poly.normals()
        } else {
            None
        };
        let mut frames = self.child_geometries();
        let scale = self.scale();
        for f in &mut frames {
            let outward = match supplied {
                Some(ns) => ns[f.child.index].dot(&f.normal) > 0.0,
                None => self.normal_points_outward(f, scale)?,
            };
            if !outward {
                f.normal = -f.normal.clone();
                f.offset = -f.offset;
            }
        }
        Ok(frames)
    }

    /// Signed distances of this face's vertices from the child's hyperplane
    /// along the child's current normal.
    fn side_range(&self, f: &ChildFrame<'_>) -> (f64, f64) {
        self.coords().fold((0.0f64, 0.0f64), |(lo, hi), p| {
            let s = (p - &f.base).dot(&f.normal);
            (lo.min(s), hi.max(s))
        })
    }

    fn normal_points_outward(&self, f: &ChildFrame<'_>, scale: f64) -> Result<bool> {
        let tol = 1e-9 * scale;
        let (lo, hi) = self.side_range(f);
        if hi <= tol {
            return Ok(true);
        }
        if lo >= -tol {
            return Ok(false);
        }
        // not supporting: probe just off an interior point of the child
        let q = f.face.interior_point()?;
        let q = &f.base + &f.basis * q;
        let probe = &q + &f.normal * (1e-7 * scale);
        Ok(!self.contains(&probe)?)
    }

    /// A point in the relative interior, in local coordinates.
    pub fn interior_point(&self) -> Result<DVector<f64>> {
        let k = self.dim();
        let mean = self.coords().fold(DVector::zeros(k), |acc, c| acc + c) / self.coords.len() as f64;
        if k <= 1 || self.is_convex()? {
            return Ok(mean);
        }
        let frames = self.frames()?;
        let f = frames
            .first()
            .ok_or_else(|| Error::DegenerateFace(format!("{:?} has no usable children", self.id)))?;
        let q = f.face.interior_point()?;
        Ok(&f.base + &f.basis * q - &f.normal * (1e-4 * self.scale()))
    }

    pub fn is_convex(&self) -> Result<bool> {
        let tol = 1e-9 * self.scale();
        Ok(self.child_geometries().iter().all(|f| {
            let (lo, hi) = self.side_range(f);
            hi <= tol || lo >= -tol
        }))
    }

    /// Ray-parity point-in-face test in local coordinates.
    pub fn contains(&self, p: &DVector<f64>) -> Result<bool> {
        let k = self.dim();
        match k {
            0 => return Ok(false),
            1 => {
                let (lo, hi) = self
                    .coords()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c[0]), hi.max(c[0])));
                return Ok(p[0] > lo && p[0] < hi);
            }
            _ => {}
        }
        let ray = probe_direction(k);
        let mut crossings = 0usize;
        for f in self.child_geometries() {
            let denom = ray.dot(&f.normal);
            if denom.abs() < 1e-14 {
                continue;
            }
            let t = (&f.base - p).dot(&f.normal) / denom;
            if t <= 0.0 {
                continue;
            }
            let hit = p + &ray * t;
            let local = f.basis.transpose() * (hit - &f.base);
            if f.face.contains(&local)? {
                crossings += 1;
            }
        }
        Ok(crossings % 2 == 1)
    }

    /// Intrinsic k-dimensional measure by the recursive volume formula.
    pub fn measure(&self) -> Result<f64> {
        if self.dim() == 0 {
            return Ok(1.0);
        }
        let mut acc = CompensatedSum::new();
        for f in self.frames()? {
            if f.offset != 0.0 {
                acc.add(f.offset * f.face.measure()?);
            }
        }
        Ok(acc.value() / self.dim() as f64)
    }
}

fn sorted(mut coords: Vec<(usize, DVector<f64>)>) -> Vec<(usize, DVector<f64>)> {
    coords.sort_by_key(|(v, _)| *v);
    coords
}

/// A fixed direction unlikely to be aligned with any lattice feature.
fn probe_direction(k: usize) -> DVector<f64> {
    DVector::from_fn(k, |i, _| (1.0 + 0.7548776662466927 * (i as f64 + 1.0)).fract() + 0.1 * (i as f64 + 1.0).sqrt())
        .normalize()
}
