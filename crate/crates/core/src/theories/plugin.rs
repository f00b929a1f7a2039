//! Externally supplied face maps.
//!
//! A plugin is a TOML document:
//!
//! ```toml
//! name = "example"
//! diagram = "X(4,1,3,2) X(2,3,1,4)"
//! relation = "X^2"
//! basepoints = [1, 2]
//!
//! [[face]]
//! source = "00"
//! target = "11"
//! rows = ["1000", "0100", "0010", "0001"]
//! ```
//!
//! Vertex strings give the smoothing of crossing `i` at character `i`. Row `r`
//! of a face matrix is target basis element `r` and column `c` is source
//! basis element `c`, both in the canonical label order.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cube::ResolutionCube;
use super::{assemble, FiltrationRule, TheorySpec, DEFAULT_CAP};
use crate::algebra::{F2Matrix, FrobeniusAlgebraSpec, Relation};
use crate::diagram::{parse_pd, Edge};
use crate::error::{Error, Result};

/// A map from the generators at `source` to those at `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceMap {
    pub source: u32,
    pub target: u32,
    pub matrix: F2Matrix,
}

#[derive(Debug, Serialize, Deserialize)]
struct PluginDoc {
    #[serde(default)]
    name: Option<String>,
    diagram: String,
    relation: String,
    /// Edges at which the theory supports a basepoint action.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    basepoints: Vec<Edge>,
    #[serde(default)]
    face: Vec<FaceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FaceDoc {
    source: String,
    target: String,
    rows: Vec<String>,
}

fn parse_vertex(s: &str, n: usize) -> Result<u32> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Plugin(format!(
            "vertex {s:?} is not a bit string of length {n}"
        )));
    }
    Ok(s.chars()
        .enumerate()
        .fold(0, |v, (i, c)| if c == '1' { v | 1 << i } else { v }))
}

pub fn vertex_string(v: u32, n: usize) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Per source vertex, the target vertex and each source label's target labels.
pub(crate) type FaceIndex = HashMap<u32, Vec<(u32, Vec<Vec<u32>>)>>;

pub(crate) fn index_faces(cube: &ResolutionCube, faces: &[FaceMap]) -> Result<FaceIndex> {
    let n = cube.crossing_count();
    let mut out = FaceIndex::new();
    for f in faces {
        let (s, t) = (f.source, f.target);
        if s >> n != 0 || t >> n != 0 {
            return Err(Error::Plugin(format!("face vertex out of range for {n} crossings")));
        }
        if s & !t != 0 {
            return Err(Error::Plugin(format!(
                "face {} → {} does not go up the cube",
                vertex_string(s, n),
                vertex_string(t, n)
            )));
        }
        if (t & !s).count_ones() < 2 {
            return Err(Error::Plugin(format!(
                "face {} → {} has dimension below 2",
                vertex_string(s, n),
                vertex_string(t, n)
            )));
        }
        let (rs, rt) = (1usize << cube.circle_count(s), 1usize << cube.circle_count(t));
        if f.matrix.n_cols() != rs || f.matrix.n_rows() != rt {
            return Err(Error::Dimension(format!(
                "face {} → {} needs a {rt}x{rs} matrix, got {}x{}",
                vertex_string(s, n),
                vertex_string(t, n),
                f.matrix.n_rows(),
                f.matrix.n_cols()
            )));
        }
        let cols = f
            .matrix
            .columns()
            .into_iter()
            .map(|c| c.ones().map(|r| r as u32).collect())
            .collect();
        out.entry(s).or_default().push((t, cols));
    }
    Ok(out)
}

/// Parse a plugin document and check `d² = 0` on its diagram.
pub fn parse_plugin(text: &str) -> Result<TheorySpec> {
    let doc: PluginDoc =
        toml::from_str(text).map_err(|e| Error::Plugin(format!("malformed plugin: {e}")))?;
    let diagram = parse_pd(&doc.diagram)?.with_basepoints(doc.basepoints.iter().copied())?;
    let relation: Relation = doc.relation.parse()?;
    let n = diagram.crossing_count();
    let cube = ResolutionCube::new(&diagram, DEFAULT_CAP)?;
    let mut faces = Vec::with_capacity(doc.face.len());
    for f in &doc.face {
        let source = parse_vertex(&f.source, n)?;
        let target = parse_vertex(&f.target, n)?;
        let n_cols = 1usize << cube.circle_count(source);
        let matrix = F2Matrix::parse_bit_strings(n_cols, &f.rows)?;
        faces.push(FaceMap {
            source,
            target,
            matrix,
        });
    }
    let spec = TheorySpec {
        name: doc.name.unwrap_or_else(|| "plugin".into()),
        algebra: FrobeniusAlgebraSpec::new(relation),
        filtration: FiltrationRule::CubeWeight,
        faces,
        diagram: Some(diagram),
    };
    let c = assemble(&cube, &spec)?;
    c.check_d_squared()?;
    Ok(spec)
}

pub fn load_plugin(path: impl AsRef<Path>) -> Result<TheorySpec> {
    parse_plugin(&std::fs::read_to_string(path)?)
}

/// Serialize a theory with face maps back to the plugin format.
pub fn plugin_to_toml(spec: &TheorySpec) -> Result<String> {
    let d = spec
        .diagram
        .as_ref()
        .ok_or_else(|| Error::Plugin("theory is not bound to a diagram".into()))?;
    let n = d.crossing_count();
    let doc = PluginDoc {
        name: Some(spec.name.clone()),
        diagram: d.to_pd_string(),
        relation: spec.relation().to_string(),
        basepoints: d.basepoints().iter().copied().collect(),
        face: spec
            .faces
            .iter()
            .map(|f| FaceDoc {
                source: vertex_string(f.source, n),
                target: vertex_string(f.target, n),
                rows: f.matrix.to_bit_strings(),
            })
            .collect(),
    };
    toml::to_string(&doc).map_err(|e| Error::Plugin(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theories::build_complex;

    const HOPF: &str = "X(4,1,3,2) X(2,3,1,4)";

    #[test]
    fn empty_plugin_is_khovanov() {
        let spec = parse_plugin(&format!("diagram = \"{HOPF}\"\nrelation = \"X^2\"\n")).unwrap();
        let d = parse_pd(HOPF).unwrap();
        let a = build_complex(&d, &spec).unwrap().complex.homology().unwrap().dims;
        let b = crate::theories::khovanov(&d).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_face_matches_khovanov() {
        let text = format!(
            "diagram = \"{HOPF}\"\nrelation = \"X^2\"\n[[face]]\nsource = \"00\"\ntarget = \"11\"\nrows = [\"0000\",\"0000\",\"0000\",\"0000\"]\n"
        );
        let spec = parse_plugin(&text).unwrap();
        let d = parse_pd(HOPF).unwrap();
        let a = build_complex(&d, &spec).unwrap().complex.homology().unwrap().dims;
        assert_eq!(a, crate::theories::khovanov(&d).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let text = format!(
            "diagram = \"{HOPF}\"\nrelation = \"X^2\"\n[[face]]\nsource = \"00\"\ntarget = \"11\"\nrows = [\"0000\"]\n"
        );
        assert!(matches!(parse_plugin(&text), Err(Error::Dimension(_))));
    }

    #[test]
    fn one_dimensional_face_is_rejected() {
        let text = format!(
            "diagram = \"{HOPF}\"\nrelation = \"X^2\"\n[[face]]\nsource = \"00\"\ntarget = \"10\"\nrows = [\"0000\",\"0000\"]\n"
        );
        assert!(matches!(parse_plugin(&text), Err(Error::Plugin(_))));
    }

    #[test]
    fn inconsistent_face_reports_generator() {
        // a single entry on a trefoil face breaks d² = 0
        let tre = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
        let text = format!(
            "diagram = \"{tre}\"\nrelation = \"X^2\"\n[[face]]\nsource = \"000\"\ntarget = \"110\"\nrows = [\"10000000\",\"00000000\"]\n"
        );
        match parse_plugin(&text) {
            Err(Error::DSquaredNonzero { source_gen, .. }) => assert!(source_gen.starts_with("000:")),
            other => panic!("expected d² failure, got {other:?}"),
        }
    }

    #[test]
    fn toml_roundtrip() {
        let text = format!(
            "name = \"t\"\ndiagram = \"{HOPF}\"\nrelation = \"X^2\"\n[[face]]\nsource = \"00\"\ntarget = \"11\"\nrows = [\"1000\",\"0100\",\"0010\",\"0001\"]\n"
        );
        let spec = parse_plugin(&text).unwrap();
        let again = parse_plugin(&plugin_to_toml(&spec).unwrap()).unwrap();
        assert_eq!(again.faces, spec.faces);
    }
}
