//! Named diagrams used by the tests and the command line.

use serde::Serialize;

use crate::diagram::{parse_pd, Axis, Edge, PlanarDiagram, TangleRegion};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub pd: &'static str,
    pub basepoints: &'static [Edge],
    pub notes: &'static str,
    /// For a mutant pair: the partner fixture and the tangle carrying one to the other.
    pub mutant: Option<MutantData>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MutantData {
    pub partner: &'static str,
    pub boundary: [Edge; 4],
    pub interior: &'static [usize],
    pub axis: Axis,
}

impl MutantData {
    pub fn region(&self) -> TangleRegion {
        TangleRegion::new(self.boundary, self.interior.iter().copied())
    }
}

impl Fixture {
    pub fn diagram(&self) -> Result<PlanarDiagram> {
        parse_pd(self.pd)?.with_basepoints(self.basepoints.iter().copied())
    }
}

/// Eleven crossing diagram of the knot whose pretzel tangle reads (3, 2).
pub const KT_PD: &str = "X(22,17,1,18) X(16,21,17,22) X(20,15,21,16) X(18,12,19,11) X(10,20,11,19) \
X(3,9,4,8) X(9,5,10,4) X(5,14,6,15) X(7,13,8,12) X(1,6,2,7) X(13,2,14,3)";

/// The same diagram with the tangle read as (2, 3).
pub const CONWAY_PD: &str = "X(22,14,1,13) X(14,22,15,21) X(12,17,13,18) X(16,11,17,12) X(10,15,11,16) \
X(3,9,4,8) X(9,5,10,4) X(5,20,6,21) X(7,19,8,18) X(1,6,2,7) X(19,2,20,3)";

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "unknot",
        pd: "O(1)",
        basepoints: &[1],
        notes: "crossingless circle",
        mutant: None,
    },
    Fixture {
        name: "unlink2",
        pd: "O(1) O(2)",
        basepoints: &[1, 2],
        notes: "two-component unlink",
        mutant: None,
    },
    Fixture {
        name: "trefoil",
        pd: "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)",
        basepoints: &[1, 2, 3, 4, 5, 6],
        notes: "left-handed trefoil",
        mutant: None,
    },
    Fixture {
        name: "trefoil-kink",
        pd: "X(1,4,2,5) X(3,6,4,1) X(5,2,6,7) X(7,8,8,3)",
        basepoints: &[1, 3, 7, 8],
        notes: "trefoil with one extra Reidemeister I loop",
        mutant: None,
    },
    Fixture {
        name: "figure-eight",
        pd: "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)",
        basepoints: &[1, 2, 5, 8],
        notes: "amphichiral, Kh is thin",
        mutant: None,
    },
    Fixture {
        name: "hopf",
        pd: "X(4,1,3,2) X(2,3,1,4)",
        basepoints: &[1, 2, 3, 4],
        notes: "two-component link, used by the face-map plugin",
        mutant: None,
    },
    Fixture {
        name: "kt",
        pd: KT_PD,
        basepoints: &[1, 6, 12],
        notes: "eleven crossings, trivial Alexander polynomial; mutant of conway",
        mutant: None,
    },
    Fixture {
        name: "kt-conway",
        pd: KT_PD,
        basepoints: &[1, 6],
        notes: "the kt diagram paired with conway through its pretzel tangle",
        mutant: Some(KT_CONWAY),
    },
    Fixture {
        name: "conway",
        pd: CONWAY_PD,
        basepoints: &[1, 6, 18],
        notes: "eleven crossings, trivial Alexander polynomial; mutant of kt",
        mutant: None,
    },
];

/// The disc in `kt` holding the pretzel tangle, boundary in cyclic order,
/// and an axis carrying `kt` to a diagram of `conway`.
pub const KT_CONWAY: MutantData = MutantData {
    partner: "conway",
    boundary: [1, 12, 10, 15],
    interior: &[0, 1, 2, 3, 4],
    axis: Axis::Y,
};

pub fn kt_tangle() -> TangleRegion {
    KT_CONWAY.region()
}

pub fn fixture(name: &str) -> Result<&'static Fixture> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::jones_unnormalized;

    #[test]
    fn all_fixtures_parse() {
        for f in FIXTURES {
            let d = f.diagram().unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert!(!d.basepoints().is_empty());
        }
    }

    #[test]
    fn pair_shares_bracket() {
        let a = jones_unnormalized(&fixture("kt").unwrap().diagram().unwrap()).unwrap();
        let b = jones_unnormalized(&fixture("conway").unwrap().diagram().unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_axis_gives_a_diagram() {
        let kt = fixture("kt").unwrap().diagram().unwrap();
        for axis in Axis::ALL {
            let m = kt.mutate(&kt_tangle(), axis).unwrap();
            assert_eq!(m.crossing_count(), 11);
            assert_eq!(m.component_count(), 1);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
    }
}
