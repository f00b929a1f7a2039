//! Theories assembled on the cube of resolutions.

pub mod cube;
pub mod plugin;

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{FrobeniusAlgebraSpec, Relation, SparseMatrix};
use crate::complex::{BigradedDims, FilteredComplex};
use crate::diagram::PlanarDiagram;
use crate::error::{Error, Result};

pub use cube::{CubeEdge, ResolutionCube};
pub use plugin::{load_plugin, parse_plugin, FaceMap};

/// Crossing cap used when none is given.
pub const DEFAULT_CAP: usize = 16;

/// Which grading filters the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiltrationRule {
    /// `|v|`, the number of 1-smoothings.
    CubeWeight,
    /// The quantum grading.
    Quantum,
}

#[derive(Clone, Debug)]
pub struct TheorySpec {
    pub name: String,
    pub algebra: FrobeniusAlgebraSpec,
    pub filtration: FiltrationRule,
    /// Maps along cube faces of dimension at least two.
    pub faces: Vec<FaceMap>,
    /// Diagram that face maps refer to.
    pub diagram: Option<PlanarDiagram>,
}

impl TheorySpec {
    pub fn khovanov() -> Self {
        TheorySpec {
            name: "khovanov".into(),
            algebra: FrobeniusAlgebraSpec::khovanov(),
            filtration: FiltrationRule::CubeWeight,
            faces: Vec::new(),
            diagram: None,
        }
    }

    pub fn bar_natan() -> Self {
        TheorySpec {
            name: "bar-natan".into(),
            algebra: FrobeniusAlgebraSpec::bar_natan(),
            filtration: FiltrationRule::Quantum,
            faces: Vec::new(),
            diagram: None,
        }
    }

    pub fn relation(&self) -> Relation {
        self.algebra.relation()
    }

    pub fn has_faces(&self) -> bool {
        !self.faces.is_empty()
    }

    /// Same theory with its filtration replaced.
    pub fn with_filtration(mut self, f: FiltrationRule) -> Self {
        self.filtration = f;
        self
    }
}

/// A theory's complex on a diagram together with the cube it came from.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    pub diagram: PlanarDiagram,
    pub theory: TheorySpec,
    pub cube: Arc<ResolutionCube>,
    pub complex: Arc<FilteredComplex>,
}

pub fn build_complex(d: &PlanarDiagram, t: &TheorySpec) -> Result<CubeComplex> {
    build_complex_capped(d, t, DEFAULT_CAP)
}

pub fn build_complex_capped(d: &PlanarDiagram, t: &TheorySpec, cap: usize) -> Result<CubeComplex> {
    if let Some(bound) = &t.diagram {
        if bound.crossings() != d.crossings() || bound.free_loops() != d.free_loops() {
            return Err(Error::Plugin(format!(
                "theory {:?} is bound to diagram {bound}, not {d}",
                t.name
            )));
        }
    }
    let cube = Arc::new(ResolutionCube::new(d, cap)?);
    let complex = Arc::new(assemble(&cube, t)?);
    complex.check_d_squared()?;
    Ok(CubeComplex {
        diagram: d.clone(),
        theory: t.clone(),
        cube,
        complex,
    })
}

/// Build the complex without the `d² = 0` check.
pub(crate) fn assemble(cube: &ResolutionCube, t: &TheorySpec) -> Result<FilteredComplex> {
    let n = cube.crossing_count();
    let faces_from = plugin::index_faces(cube, &t.faces)?;
    let alg = &t.algebra;
    let per_vertex: Vec<Vec<Vec<u32>>> = (0..1u32 << n)
        .into_par_iter()
        .map(|v| {
            let k = cube.circle_count(v);
            let mut cols = Vec::with_capacity(1 << k);
            let mut terms = Vec::new();
            for labels in 0..1u32 << k {
                let mut col = Vec::new();
                for i in (0..n).filter(|&i| v >> i & 1 == 0) {
                    terms.clear();
                    cube.edge_terms(alg, v, i, labels, &mut terms);
                    let w = v | 1 << i;
                    col.extend(terms.iter().map(|&l| cube.index(w, l)));
                }
                if let Some(fs) = faces_from.get(&v) {
                    for (w, f) in fs {
                        col.extend(f[labels as usize].iter().map(|&row| cube.index(*w, row)));
                    }
                }
                cols.push(col);
            }
            cols
        })
        .collect();
    let total = cube.generator_count();
    let cols: Vec<Vec<u32>> = per_vertex.into_iter().flatten().collect();
    let d = SparseMatrix::from_columns(total, cols);

    let mut h = Vec::with_capacity(total);
    let mut q = Vec::with_capacity(total);
    let mut filt = Vec::with_capacity(total);
    let mut gens = Vec::with_capacity(total);
    for v in 0..1u32 << n {
        for labels in 0..1u32 << cube.circle_count(v) {
            let (hh, qq) = cube.grading(v, labels);
            h.push(hh);
            q.push(qq);
            filt.push(match t.filtration {
                FiltrationRule::CubeWeight => v.count_ones() as i32,
                FiltrationRule::Quantum => qq,
            });
            gens.push(crate::complex::LabeledGenerator {
                vertex: v,
                labels,
                n_crossings: n as u8,
                n_circles: cube.circle_count(v) as u8,
            });
        }
    }
    let c = FilteredComplex::from_parts(h, q, filt, d)?.with_generators(gens);
    c.check_filtration()?;
    Ok(c)
}

/// Khovanov homology over GF(2).
pub fn khovanov(d: &PlanarDiagram) -> Result<BigradedDims> {
    Ok(build_complex(d, &TheorySpec::khovanov())?.complex.homology()?.dims)
}

/// Bar-Natan homology in characteristic two, each class placed at the
/// quantum filtration level where it survives.
pub fn barnatan(d: &PlanarDiagram) -> Result<BigradedDims> {
    Ok(build_complex(d, &TheorySpec::bar_natan())?.complex.homology()?.dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn trefoil() -> PlanarDiagram {
        parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap()
    }

    #[test]
    fn unknot_complex() {
        let c = build_complex(&PlanarDiagram::unknot(), &TheorySpec::khovanov()).unwrap();
        assert_eq!(c.complex.len(), 2);
        assert!(c.complex.differential().is_zero());
        assert_eq!(
            khovanov(&PlanarDiagram::unknot()).unwrap(),
            BigradedDims::from_entries([((0, 1), 1), ((0, -1), 1)])
        );
    }

    #[test]
    fn trefoil_khovanov() {
        let dims = khovanov(&trefoil()).unwrap();
        // left-handed trefoil over GF(2)
        let expect = BigradedDims::from_entries([
            ((0, -1), 1),
            ((0, -3), 1),
            ((-2, -5), 1),
            ((-2, -7), 1),
            ((-3, -7), 1),
            ((-3, -9), 1),
        ]);
        assert_eq!(dims, expect);
    }

    #[test]
    fn bar_natan_ranks() {
        assert_eq!(barnatan(&trefoil()).unwrap().total(), 2);
        assert_eq!(barnatan(&PlanarDiagram::unknot()).unwrap().total(), 2);
        let hopf = parse_pd("X(4,1,3,2) X(2,3,1,4)").unwrap();
        assert_eq!(barnatan(&hopf).unwrap().total(), 4);
    }

    #[test]
    fn bar_natan_is_not_q_homogeneous() {
        let c = build_complex(&trefoil(), &TheorySpec::bar_natan()).unwrap();
        assert!(!c.complex.is_bigraded());
        assert!(c.complex.check_d_squared().is_ok());
    }

    #[test]
    fn kink_does_not_change_khovanov() {
        let kinked = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,7) X(7,8,8,3)").unwrap();
        assert_eq!(khovanov(&kinked).unwrap(), khovanov(&trefoil()).unwrap());
    }
}
