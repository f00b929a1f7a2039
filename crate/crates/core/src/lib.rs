//! GF(2) Khovanov homology, its Bar-Natan deformation and friends.

pub mod algebra;
pub mod basepoint;
pub mod bracket;
pub mod cobordism;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod poly;
pub mod report;
pub mod spectral;
pub mod theories;
pub mod verify;

pub use complex::{BigradedDims, ChainMap, FilteredComplex, Homology, LabeledGenerator};
pub use diagram::{parse_pd, Axis, Crossing, Edge, PlanarDiagram, Resolution, Sign, TangleRegion};
pub use error::{Error, Result};
pub use poly::LaurentPoly;
pub use theories::{build_complex, CubeComplex, FiltrationRule, TheorySpec};
