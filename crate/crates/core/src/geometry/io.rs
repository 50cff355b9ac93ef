//! JSON layout for polytopes.
//!
//! ```json
//! { "dim": 2,
//!   "vertices": [[0,0],[1,0],[0,1]],
//!   "faces": [
//!     [{"verts":[0]}, {"verts":[1]}, {"verts":[2]}],
//!     [{"verts":[0,1],"children":[0,1]}, {"verts":[1,2],"children":[1,2]}, {"verts":[2,0],"children":[2,0]}]
//!   ] }
//! ```
//!
//! `faces[k]` lists the k-faces; `children` index into `faces[k-1]`.
//! `normals` (optional) gives outward unit facet normals in facet order.

use serde::{Deserialize, Serialize};

use super::polytope::{Face, Polytope};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolytopeFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<FaceRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FaceRecord {
    pub verts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<usize>,
}

impl PolytopeFile {
    pub fn into_polytope(self) -> Result<Polytope> {
        for v in &self.vertices {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        let faces = self
            .faces
            .into_iter()
            .map(|layer| {
                layer
                    .into_iter()
                    .map(|f| Face {
                        verts: f.verts,
                        children: f.children,
                    })
                    .collect()
            })
            .collect();
        Polytope::new(self.vertices, faces, self.normals)
    }
}

impl From<&Polytope> for PolytopeFile {
    fn from(p: &Polytope) -> Self {
        let faces = (0..p.intrinsic_dim())
            .map(|k| {
                p.faces(k)
                    .iter()
                    .map(|f| FaceRecord {
                        verts: f.verts.clone(),
                        children: f.children.clone(),
                    })
                    .collect()
            })
            .collect();
        PolytopeFile {
            dim: p.ambient_dim(),
            vertices: p.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
            faces,
            normals: p
                .normals()
                .map(|ns| ns.iter().map(|n| n.as_slice().to_vec()).collect()),
        }
    }
}

impl Polytope {
    pub fn from_json(s: &str) -> Result<Polytope> {
        let file: PolytopeFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidPolytope(format!("JSON: {e}")))?;
        file.into_polytope()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PolytopeFile::from(self)).expect("polytope serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn round_trip() {
        let cube = generate::cube(3);
        let back = Polytope::from_json(&cube.to_json()).unwrap();
        assert_eq!(back, cube);
    }

    #[test]
    fn parses_the_documented_triangle() {
        let s = r#"{ "dim": 2,
          "vertices": [[0,0],[1,0],[0,1]],
          "faces": [
            [{"verts":[0]}, {"verts":[1]}, {"verts":[2]}],
            [{"verts":[0,1],"children":[0,1]}, {"verts":[1,2],"children":[1,2]}, {"verts":[2,0],"children":[2,0]}]
          ] }"#;
        let p = Polytope::from_json(s).unwrap();
        assert!((p.measure().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_dim_and_garbage() {
        assert!(Polytope::from_json("{").is_err());
        let s = r#"{"dim": 3, "vertices": [[0,0]], "faces": [[{"verts":[0]}]]}"#;
        assert!(matches!(Polytope::from_json(s), Err(Error::DimensionMismatch { .. })));
    }
}
