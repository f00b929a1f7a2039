//! Theorem-level checks: connected sums, the extended-theory conditions,
//! skein sequences and mutation invariance.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::SparseMatrix;
use crate::basepoint::{basepoint_check, nu_on, reduced, reduced_at, restrict_map, BasepointReport};
use crate::bracket::jones_unnormalized;
use crate::cobordism::{evaluate_full, CobordismWord, Move};
use crate::complex::{les_exactness, BigradedDims, ChainMap, LesReport};
use crate::diagram::{Axis, Edge, PlanarDiagram, TangleRegion};
use crate::error::{Error, Result};
use crate::poly::LaurentPoly;
use crate::theories::{build_complex, build_complex_capped, CubeComplex, TheorySpec, DEFAULT_CAP};

fn rank_is_full(m: &crate::algebra::F2Matrix) -> bool {
    m.n_rows() == m.n_cols() && m.rank() == m.n_rows()
}

#[derive(Clone, Debug, Serialize)]
pub struct KunnethReport {
    pub left: BigradedDims,
    pub right: BigradedDims,
    pub sum: BigradedDims,
    pub predicted: BigradedDims,
    pub dims_match: bool,
    /// `γ ∘ (Id ⊗ ν′)` restricted to the reduced complexes is a homology isomorphism.
    pub isomorphism: bool,
    /// `γ ∘ (ν ⊗ Id)` induces the same map.
    pub candidates_agree: bool,
    pub pass: bool,
}

/// Reduced homology of `D # D'` against the tensor of the reduced
/// homologies, with the saddle `γ` joining `p` to `q` as the comparison map.
pub fn kunneth_check(d: &PlanarDiagram, p: Edge, d2: &PlanarDiagram, q: Edge, cap: usize) -> Result<KunnethReport> {
    let t = TheorySpec::khovanov();
    let shift = d.union_shift();
    let union = d.disjoint_union(d2);
    let q2 = q + shift;
    let w = CobordismWord::new(union, vec![Move::OneHandle { a: p, b: q2, fresh: None }])?;
    if w.target.crossing_count() > cap {
        return Err(Error::CrossingCap {
            crossings: w.target.crossing_count(),
            cap,
        });
    }
    let ev = evaluate_full(&w, &t)?;
    let (cu, cs) = (&ev.complexes[0], &ev.complexes[1]);

    let (left, right) = rayon::join(
        || reduced(&build_complex(d, &t)?, p)?.homology_dims(),
        || reduced(&build_complex(d2, &t)?, q)?.homology_dims(),
    );
    let (left, right) = (left?, right?);
    let target = reduced(cs, p)?;
    let sum = target.homology_dims()?;
    let predicted = left.tensor(&right);

    let source = reduced_at(cu, &[p, q2])?;
    let left_edges = d.all_edges();
    let right_edges: Vec<Edge> = d2.all_edges().iter().map(|e| e + shift).collect();
    let f1 = restrict_map(&ev.map.compose(&nu_on(cu, &right_edges)?)?, &source, &target)?;
    let f2 = restrict_map(&ev.map.compose(&nu_on(cu, &left_edges)?)?, &source, &target)?;
    let i1 = f1.induced()?;
    let isomorphism = rank_is_full(&i1.matrix);
    let i2 = f2.induced_in(&i1.source, &i1.target)?;
    let candidates_agree = i1.matrix == i2;
    let dims_match = sum == predicted;
    Ok(KunnethReport {
        pass: dims_match && isomorphism && candidates_agree,
        left,
        right,
        sum,
        predicted,
        dims_match,
        isomorphism,
        candidates_agree,
    })
}

/// The map `K₀ → K₁` along crossing `c`, whose cone is the whole complex.
pub fn crossing_map(cc: &CubeComplex, c: usize) -> Result<ChainMap> {
    if c >= cc.cube.crossing_count() {
        return Err(Error::InvalidDiagram(format!("no crossing {c}")));
    }
    let n = cc.complex.len() as u32;
    let (mut zeros, mut ones) = (Vec::new(), Vec::new());
    for g in 0..n {
        if cc.cube.generator(g).vertex >> c & 1 == 1 {
            ones.push(g);
        } else {
            zeros.push(g);
        }
    }
    let k1 = Arc::new(cc.complex.restrict(&ones)?);
    let k0 = Arc::new(cc.complex.quotient_onto(&zeros));
    let mut pos = vec![u32::MAX; n as usize];
    for (k, &g) in ones.iter().enumerate() {
        pos[g as usize] = k as u32;
    }
    let cols = zeros
        .iter()
        .map(|&g| {
            cc.complex
                .differential()
                .col(g as usize)
                .iter()
                .filter(|&&i| pos[i as usize] != u32::MAX)
                .map(|&i| pos[i as usize])
                .collect()
        })
        .collect();
    ChainMap::new(k0, k1, SparseMatrix::from_columns(ones.len(), cols))
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingLes {
    pub crossing: usize,
    pub les: LesReport,
    /// `H(cone f) = H(K)` with matching dims.
    pub cone_matches: bool,
}

pub fn skein_sequences(cc: &CubeComplex) -> Result<Vec<CrossingLes>> {
    let whole = cc.complex.homology()?.dims;
    (0..cc.cube.crossing_count())
        .into_par_iter()
        .map(|c| {
            let f = crossing_map(cc, c)?;
            let les = les_exactness(&f)?;
            let cone = crate::complex::cone(&f)?;
            let cone_matches = cone.homology()?.total() == whole.total();
            Ok(CrossingLes {
                crossing: c,
                les,
                cone_matches,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SkeinReport {
    pub bracket: String,
    pub euler: String,
    pub oracle_agrees: bool,
    pub sequences: Vec<CrossingLes>,
    pub pass: bool,
}

/// Bracket oracle against the Euler characteristic, and the exact
/// sequence of every crossing.
pub fn skein_check(cc: &CubeComplex) -> Result<SkeinReport> {
    let bracket = jones_unnormalized(&cc.diagram)?;
    let euler = cc.complex.homology()?.dims.euler();
    let sequences = skein_sequences(cc)?;
    let oracle_agrees = bracket == euler;
    Ok(SkeinReport {
        pass: oracle_agrees && sequences.iter().all(|s| s.les.exact && s.cone_matches),
        bracket: bracket.to_string(),
        euler: euler.to_string(),
        oracle_agrees,
        sequences,
    })
}

/// Euler characteristic of Khovanov homology against the state sum.
pub fn oracle_check(d: &PlanarDiagram, cap: usize) -> Result<(LaurentPoly, LaurentPoly)> {
    let cc = build_complex_capped(d, &TheorySpec::khovanov(), cap)?;
    Ok((jones_unnormalized(d)?, cc.complex.homology()?.dims.euler()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedReport {
    pub unreduced: BigradedDims,
    pub reduced_with_unknot: BigradedDims,
    pub unlink_condition: bool,
    pub sequences: Vec<CrossingLes>,
    pub skein_condition: bool,
    pub transport: BasepointReport,
    pub pass: bool,
}

/// The three conditions on a theory paired with its reduction: adding an
/// unknot and reducing there recovers the theory, every crossing has an
/// exact triangle, and reductions at different basepoints agree.
pub fn extended_check(cc: &CubeComplex, points: &[Edge]) -> Result<ExtendedReport> {
    let d = &cc.diagram;
    let fresh = d.max_label() + 1;
    let with_unknot = d.with_free_loop(fresh)?;
    let cu = build_complex(&with_unknot, &cc.theory)?;
    let unreduced = cc.complex.homology()?.dims;
    let reduced_with_unknot = reduced(&cu, fresh)?.homology_dims()?;
    let unlink_condition = unreduced == reduced_with_unknot;
    let sequences = skein_sequences(cc)?;
    let skein_condition = sequences.iter().all(|s| s.les.exact);
    let transport = basepoint_check(cc, points)?;
    Ok(ExtendedReport {
        pass: unlink_condition && skein_condition && transport.pass,
        unreduced,
        reduced_with_unknot,
        unlink_condition,
        sequences,
        skein_condition,
        transport,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairComparison {
    pub brackets_equal: bool,
    pub khovanov: (BigradedDims, BigradedDims),
    pub reduced: Vec<(Edge, BigradedDims, BigradedDims)>,
    pub bar_natan: (usize, usize),
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MutationReport {
    pub axis: Axis,
    pub mutant: String,
    pub comparison: PairComparison,
}

/// Khovanov, reduced and Bar-Natan invariants of two diagrams, gated on the
/// bracket. Reduced homology is compared at each listed pair of edges.
pub fn compare_pair(
    a: &PlanarDiagram,
    b: &PlanarDiagram,
    points: &[(Edge, Edge)],
    cap: usize,
) -> Result<PairComparison> {
    let ba = jones_unnormalized(a)?;
    let bb = jones_unnormalized(b)?;
    if ba != bb {
        return Ok(PairComparison {
            brackets_equal: false,
            khovanov: (BigradedDims::new(), BigradedDims::new()),
            reduced: Vec::new(),
            bar_natan: (0, 0),
            pass: false,
        });
    }
    let kh = TheorySpec::khovanov();
    let bn = TheorySpec::bar_natan();
    let side = |d: &PlanarDiagram, pts: Vec<Edge>| -> Result<(BigradedDims, Vec<BigradedDims>, usize)> {
        let cc = build_complex_capped(d, &kh, cap)?;
        let dims = cc.complex.homology()?.dims;
        let red = pts
            .par_iter()
            .map(|&p| reduced(&cc, p)?.homology_dims())
            .collect::<Result<Vec<_>>>()?;
        drop(cc);
        let n_bn = build_complex_capped(d, &bn, cap)?.complex.homology()?.total();
        Ok((dims, red, n_bn))
    };
    let (ra, rb) = rayon::join(
        || side(a, points.iter().map(|p| p.0).collect()),
        || side(b, points.iter().map(|p| p.1).collect()),
    );
    let (ka, reda, bna) = ra?;
    let (kb, redb, bnb) = rb?;
    let reduced: Vec<(Edge, BigradedDims, BigradedDims)> = points
        .iter()
        .zip(reda.into_iter().zip(redb))
        .map(|(&(p, _), (x, y))| (p, x, y))
        .collect();
    let pass = ka == kb && bna == bnb && reduced.iter().all(|(_, x, y)| x == y);
    Ok(PairComparison {
        brackets_equal: true,
        khovanov: (ka, kb),
        reduced,
        bar_natan: (bna, bnb),
        pass,
    })
}

/// Edges not touching the tangle; their labels survive mutation.
pub fn outside_edges(d: &PlanarDiagram, t: &TangleRegion) -> Vec<Edge> {
    let inside: Vec<Edge> = t
        .interior_crossings
        .iter()
        .filter_map(|&c| d.crossings().get(c))
        .flat_map(|x| x.0)
        .collect();
    d.all_edges().into_iter().filter(|e| !inside.contains(e)).collect()
}

/// Compare `D` with its mutant along `axis`.
pub fn mutation_check(d: &PlanarDiagram, t: &TangleRegion, axis: Axis, cap: usize) -> Result<MutationReport> {
    let m = d.mutate(t, axis)?;
    let pts: Vec<(Edge, Edge)> = outside_edges(d, t).into_iter().take(1).map(|e| (e, e)).collect();
    let comparison = compare_pair(d, &m, &pts, cap)?;
    Ok(MutationReport {
        axis,
        mutant: m.to_pd_string(),
        comparison,
    })
}

pub fn mutation_check_all_axes(d: &PlanarDiagram, t: &TangleRegion) -> Result<Vec<MutationReport>> {
    Axis::ALL
        .iter()
        .map(|&axis| mutation_check(d, t, axis, DEFAULT_CAP))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionReport {
    pub left: BigradedDims,
    pub right: BigradedDims,
    pub union: BigradedDims,
    pub pass: bool,
}

/// Homology of a split diagram is the tensor of the pieces.
pub fn disjoint_union_check(a: &PlanarDiagram, b: &PlanarDiagram) -> Result<UnionReport> {
    let t = TheorySpec::khovanov();
    let left = build_complex(a, &t)?.complex.homology()?.dims;
    let right = build_complex(b, &t)?.complex.homology()?.dims;
    let union = build_complex(&a.disjoint_union(b), &t)?.complex.homology()?.dims;
    Ok(UnionReport {
        pass: union == left.tensor(&right),
        left,
        right,
        union,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    const FIGURE_EIGHT: &str = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)";

    #[test]
    fn unknot_sum() {
        let u = PlanarDiagram::unknot();
        let r = kunneth_check(&u, 1, &u, 1, 16).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.sum.total(), 1);
    }

    #[test]
    fn trefoil_sum() {
        let t = parse_pd(TREFOIL).unwrap();
        let r = kunneth_check(&t, 1, &t, 3, 16).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.sum.total(), 9);
    }

    #[test]
    fn trefoil_figure_eight_sum() {
        let t = parse_pd(TREFOIL).unwrap();
        let f = parse_pd(FIGURE_EIGHT).unwrap();
        let r = kunneth_check(&t, 2, &f, 1, 16).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.sum.total(), 15);
    }

    #[test]
    fn trefoil_triangles() {
        let cc = build_complex(&parse_pd(TREFOIL).unwrap(), &TheorySpec::khovanov()).unwrap();
        let r = skein_check(&cc).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.sequences.len(), 3);
    }

    #[test]
    fn extended_conditions() {
        for pd in ["O(1)", TREFOIL, FIGURE_EIGHT] {
            let d = parse_pd(pd).unwrap();
            let cc = build_complex(&d, &TheorySpec::khovanov()).unwrap();
            let pts: Vec<Edge> = d.all_edges().into_iter().take(4).collect();
            let r = extended_check(&cc, &pts).unwrap();
            assert!(r.pass, "{pd}: {r:?}");
        }
    }

    #[test]
    fn empty_tangle_mutation() {
        let d = parse_pd(TREFOIL).unwrap();
        let t = TangleRegion::new([1, 2, 3, 4], []);
        let r = mutation_check(&d, &t, Axis::Z, 16).unwrap();
        assert!(r.comparison.pass);
    }

    #[test]
    fn different_knots_fail_the_gate() {
        let a = parse_pd(TREFOIL).unwrap();
        let b = parse_pd(FIGURE_EIGHT).unwrap();
        let r = compare_pair(&a, &b, &[], 16).unwrap();
        assert!(!r.brackets_equal && !r.pass);
    }

    #[test]
    fn split_union_is_a_tensor() {
        let a = parse_pd(TREFOIL).unwrap();
        let r = disjoint_union_check(&a, &PlanarDiagram::unknot()).unwrap();
        assert!(r.pass);
    }
}
