//! Basepoint actions, the ν map, reduced complexes and the transport
//! equivalence between reductions at different basepoints.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Relation, SparseMatrix};
use crate::complex::{BigradedDims, ChainMap, FilteredComplex, HomologyBasis};
use crate::diagram::{Edge, PlanarDiagram};
use crate::error::{Error, Result};
use crate::theories::cube::{bit, get_label};
use crate::theories::{build_complex, CubeComplex, TheorySpec};

/// Reduced gradings are reported with `q` raised by this much, so the
/// reduced unknot sits at `(0, 0)`.
pub const REDUCED_Q_SHIFT: i32 = 1;

fn require_x_squared(cc: &CubeComplex, what: &str) -> Result<()> {
    match cc.theory.relation() {
        Relation::XSquared => Ok(()),
        r => Err(Error::UnsupportedRelation {
            relation: r.to_string(),
            what: what.into(),
        }),
    }
}

fn require_edge(cc: &CubeComplex, p: Edge) -> Result<()> {
    if cc.diagram.has_edge(p) {
        Ok(())
    } else {
        Err(Error::UnknownEdge(p))
    }
}

/// Per-generator map built from a rule on (vertex, circle count, labels).
fn per_generator(cc: &CubeComplex, f: impl Fn(u32, usize, u32, &mut Vec<u32>) + Sync) -> ChainMap {
    let cube = &cc.cube;
    let n = cube.crossing_count();
    let mut cols = Vec::with_capacity(cube.generator_count());
    let mut out = Vec::new();
    for v in 0..1u32 << n {
        let k = cube.circle_count(v);
        for labels in 0..1u32 << k {
            out.clear();
            f(v, k, labels, &mut out);
            cols.push(out.iter().map(|&l| cube.index(v, l)).collect());
        }
    }
    let m = SparseMatrix::from_columns(cube.generator_count(), cols);
    ChainMap::new_unchecked(cc.complex.clone(), cc.complex.clone(), m).expect("square map")
}

/// Multiplication by `X` on the circle through `p`, of bidegree `(0, −2)`.
pub fn x_action(cc: &CubeComplex, p: Edge) -> Result<ChainMap> {
    require_edge(cc, p)?;
    let alg = &cc.theory.algebra;
    let cube = &cc.cube;
    let f = per_generator(cc, |v, k, labels, out| {
        let c = cube.circle_of_edge(v, p).expect("edge present at every vertex");
        let b = bit(k, c);
        let rest = labels & !(1 << b);
        for t in alg.dot_terms(get_label(labels, k, c)) {
            out.push(rest | (t as u32) << b);
        }
    });
    f.check()?;
    Ok(f)
}

/// `Σ_c (X ↦ 1, 1 ↦ 0 on circle c)`, of bidegree `(0, +2)`.
pub fn nu_map(cc: &CubeComplex) -> Result<ChainMap> {
    require_x_squared(cc, "the ν map")?;
    let f = per_generator(cc, |_, k, labels, out| {
        for c in 0..k {
            let b = bit(k, c);
            if labels >> b & 1 == 1 {
                out.push(labels & !(1 << b));
            }
        }
    });
    f.check()?;
    Ok(f)
}

/// ν on the circles through `edges` only; on a split diagram with `edges`
/// one side this is `ν ⊗ Id`.
pub fn nu_on(cc: &CubeComplex, edges: &[Edge]) -> Result<ChainMap> {
    require_x_squared(cc, "the ν map")?;
    let cube = &cc.cube;
    let f = per_generator(cc, |v, k, labels, out| {
        for c in 0..k {
            let b = bit(k, c);
            let on_side = cube.circle_edges(v, c).iter().any(|e| edges.contains(e));
            if on_side && labels >> b & 1 == 1 {
                out.push(labels & !(1 << b));
            }
        }
    });
    f.check()?;
    Ok(f)
}

/// `Im(X_p)`: for `r = X²` the span of generators whose `p`-circle is `X`.
#[derive(Clone, Debug)]
pub struct ReducedComplex {
    pub host: Arc<FilteredComplex>,
    pub basepoint: Edge,
    /// Global indices of the basis, ascending.
    pub basis: Vec<u32>,
    /// The subcomplex with inherited gradings.
    pub complex: Arc<FilteredComplex>,
    position: HashMap<u32, u32>,
}

impl ReducedComplex {
    /// Local index of a host generator, if it lies in the basis.
    pub fn local(&self, g: u32) -> Option<u32> {
        self.position.get(&g).copied()
    }

    /// Homology dimensions in the reported normalization.
    pub fn homology_dims(&self) -> Result<BigradedDims> {
        Ok(self.complex.homology()?.dims.shift(0, REDUCED_Q_SHIFT))
    }

    /// Inclusion into the host complex.
    pub fn inclusion(&self) -> ChainMap {
        let cols = self.basis.iter().map(|&g| vec![g]).collect();
        let m = SparseMatrix::from_columns(self.host.len(), cols);
        ChainMap::new_unchecked(self.complex.clone(), self.host.clone(), m).expect("shapes agree")
    }
}

pub fn reduced(cc: &CubeComplex, p: Edge) -> Result<ReducedComplex> {
    reduced_at(cc, &[p])
}

/// `Im(X_{p₁} ⋯ X_{p_k})`: generators whose circles through every listed
/// edge carry `X`. The first edge is recorded as the basepoint.
pub fn reduced_at(cc: &CubeComplex, points: &[Edge]) -> Result<ReducedComplex> {
    require_x_squared(cc, "reduction")?;
    let &first = points
        .first()
        .ok_or_else(|| Error::InvalidMove("no basepoint given".into()))?;
    for &p in points {
        require_edge(cc, p)?;
    }
    let cube = &cc.cube;
    let mut basis = Vec::new();
    for v in 0..cube.vertex_count() as u32 {
        let k = cube.circle_count(v);
        let mask = points
            .iter()
            .map(|&p| 1u32 << bit(k, cube.circle_of_edge(v, p).expect("edge present")))
            .fold(0, |a, b| a | b);
        for labels in 0..1u32 << k {
            if labels & mask == mask {
                basis.push(cube.index(v, labels));
            }
        }
    }
    let complex = Arc::new(cc.complex.restrict(&basis)?);
    let position = basis.iter().enumerate().map(|(k, &g)| (g, k as u32)).collect();
    Ok(ReducedComplex {
        host: cc.complex.clone(),
        basepoint: first,
        basis,
        complex,
        position,
    })
}

/// Reduced Khovanov homology at `p`, normalized so the unknot gives `(0, 0)`.
pub fn reduced_khovanov(d: &PlanarDiagram, p: Edge) -> Result<BigradedDims> {
    let cc = build_complex(d, &TheorySpec::khovanov())?;
    reduced(&cc, p)?.homology_dims()
}

/// Restrict a host endomorphism to a map between two reduced complexes.
/// Fails if the image leaves the target.
pub fn restrict_map(f: &ChainMap, from: &ReducedComplex, to: &ReducedComplex) -> Result<ChainMap> {
    let cols = from
        .basis
        .iter()
        .map(|&g| {
            f.matrix()
                .col(g as usize)
                .iter()
                .map(|&i| {
                    to.local(i).ok_or_else(|| {
                        Error::NotChainMap(format!(
                            "image of {} leaves the reduced complex at {}",
                            from.host.generator_name(g as usize),
                            to.basepoint
                        ))
                    })
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = SparseMatrix::from_columns(to.complex.len(), cols);
    ChainMap::new(from.complex.clone(), to.complex.clone(), m)
}

/// `X_q ∘ ν` restricted to `Im(X_p) → Im(X_q)`.
pub fn transport(cc: &CubeComplex, p: Edge, q: Edge) -> Result<ChainMap> {
    let (rp, rq) = (reduced(cc, p)?, reduced(cc, q)?);
    transport_between(cc, &rp, &rq, &nu_map(cc)?)
}

pub(crate) fn transport_between(
    cc: &CubeComplex,
    rp: &ReducedComplex,
    rq: &ReducedComplex,
    nu: &ChainMap,
) -> Result<ChainMap> {
    let xq = x_action(cc, rq.basepoint)?;
    restrict_map(&xq.compose(nu)?, rp, rq)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportResult {
    pub from: Edge,
    pub to: Edge,
    pub rank: usize,
    pub dim: usize,
    pub isomorphism: bool,
}

/// Reduced homology at every listed basepoint and the transport from each
/// basepoint to the next (cyclically), with homology bases computed once.
#[derive(Clone, Debug, Serialize)]
pub struct BasepointReport {
    pub dims: Vec<(Edge, BigradedDims)>,
    pub transports: Vec<TransportResult>,
    pub dims_agree: bool,
    pub pass: bool,
}

pub fn basepoint_check(cc: &CubeComplex, points: &[Edge]) -> Result<BasepointReport> {
    use rayon::prelude::*;
    let nu = nu_map(cc)?;
    let reds: Vec<(ReducedComplex, HomologyBasis)> = points
        .par_iter()
        .map(|&p| {
            let r = reduced(cc, p)?;
            let h = r.complex.homology_with_basis()?;
            let b = h.basis().cloned().expect("basis requested");
            Ok((r, b))
        })
        .collect::<Result<_>>()?;
    let dims: Vec<(Edge, BigradedDims)> = reds
        .iter()
        .map(|(r, b)| {
            let d = BigradedDims::from_entries((0..b.dim()).map(|k| (b.grading(k), 1)));
            (r.basepoint, d.shift(0, REDUCED_Q_SHIFT))
        })
        .collect();
    let dims_agree = dims.windows(2).all(|w| w[0].1 == w[1].1);
    let n = reds.len();
    let pairs: Vec<(usize, usize)> = if n < 2 {
        (0..n).map(|i| (i, i)).collect()
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    };
    let transports = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (rp, bp) = &reds[i];
            let (rq, bq) = &reds[j];
            let f = transport_between(cc, rp, rq, &nu)?;
            let m = f.induced_in(bp, bq)?;
            let rank = m.rank();
            Ok(TransportResult {
                from: rp.basepoint,
                to: rq.basepoint,
                rank,
                dim: bq.dim(),
                isomorphism: m.n_rows() == m.n_cols() && rank == m.n_rows(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = dims_agree && transports.iter().all(|t| t.isomorphism);
    Ok(BasepointReport {
        dims,
        transports,
        dims_agree,
        pass,
    })
}

/// Whether two endomorphisms of the same complex agree on homology.
pub fn equal_on_homology(a: &ChainMap, b: &ChainMap) -> Result<bool> {
    Ok(a.add(b)?.induced()?.rank() == 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplittingReport {
    pub unreduced: BigradedDims,
    pub reduced: BigradedDims,
    pub predicted: BigradedDims,
    pub pass: bool,
}

/// `H(K) = H(reduced){−1} ⊕ H(reduced){+1}` with the reduced normalization.
pub fn splitting_check(cc: &CubeComplex, p: Edge) -> Result<SplittingReport> {
    let unreduced = cc.complex.homology()?.dims;
    let reduced = reduced(cc, p)?.homology_dims()?;
    let predicted = reduced.shift(0, -1).plus(&reduced.shift(0, 1));
    Ok(SplittingReport {
        pass: predicted == unreduced,
        unreduced,
        reduced,
        predicted,
    })
}

/// `dim H(K) = dim H(Im X_p) + dim H(K / Im X_p)`.
pub fn short_exact_split(cc: &CubeComplex, p: Edge) -> Result<(usize, usize, usize)> {
    let r = reduced(cc, p)?;
    let rest: Vec<u32> = (0..cc.complex.len() as u32)
        .filter(|g| r.local(*g).is_none())
        .collect();
    let whole = cc.complex.homology()?.total();
    let sub = r.complex.homology()?.total();
    let quot = cc.complex.quotient_onto(&rest).homology()?.total();
    Ok((whole, sub, quot))
}

/// The relation `X_p ν X_q ν X_p = X_p` on homology.
pub fn figure_seven_relation(cc: &CubeComplex, p: Edge, q: Edge) -> Result<bool> {
    let nu = nu_map(cc)?;
    let xp = x_action(cc, p)?;
    let xq = x_action(cc, q)?;
    let lhs = xp.compose(&nu)?.compose(&xq)?.compose(&nu)?.compose(&xp)?;
    equal_on_homology(&lhs, &xp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn kh(d: &PlanarDiagram) -> CubeComplex {
        build_complex(d, &TheorySpec::khovanov()).unwrap()
    }

    fn trefoil() -> PlanarDiagram {
        parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap()
    }

    #[test]
    fn unknot_tables() {
        let cc = kh(&PlanarDiagram::unknot());
        // index 0 is 1, index 1 is X
        let x = x_action(&cc, 1).unwrap();
        assert_eq!(x.apply(&[0]), vec![1]);
        assert!(x.apply(&[1]).is_empty());
        let nu = nu_map(&cc).unwrap();
        assert_eq!(nu.apply(&[1]), vec![0]);
        assert!(nu.apply(&[0]).is_empty());
        let r = reduced(&cc, 1).unwrap();
        assert_eq!(r.homology_dims().unwrap(), BigradedDims::from_entries([((0, 0), 1)]));
    }

    #[test]
    fn nu_on_two_circles_is_leibniz() {
        let cc = kh(&parse_pd("O(1) O(2)").unwrap());
        let nu = nu_map(&cc).unwrap();
        // XX ↦ 1X + X1
        assert_eq!(nu.apply(&[0b11]), vec![0b01, 0b10]);
    }

    #[test]
    fn degrees() {
        let cc = kh(&trefoil());
        assert_eq!(x_action(&cc, 3).unwrap().bidegree(), Some((0, -2)));
        assert_eq!(nu_map(&cc).unwrap().bidegree(), Some((0, 2)));
    }

    #[test]
    fn trefoil_reduced_and_splitting() {
        let cc = kh(&trefoil());
        for p in 1..=6 {
            let s = splitting_check(&cc, p).unwrap();
            assert!(s.pass, "{s:?}");
            assert_eq!(s.reduced.total(), 3);
        }
        let x = x_action(&cc, 1).unwrap();
        assert_eq!(x.induced().unwrap().rank(), 3);
        assert_eq!(x.compose(&x).unwrap().induced().unwrap().rank(), 0);
    }

    #[test]
    fn transports_are_isomorphisms() {
        let cc = kh(&trefoil());
        let rep = basepoint_check(&cc, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(figure_seven_relation(&cc, 1, 4).unwrap());
    }

    #[test]
    fn nu_squared_vanishes() {
        let cc = kh(&trefoil());
        let nu = nu_map(&cc).unwrap();
        assert_eq!(nu.compose(&nu).unwrap().induced().unwrap().rank(), 0);
        // in fact it vanishes on chains
        assert!(nu.compose(&nu).unwrap().is_zero());
    }

    #[test]
    fn short_exact_sequence_splits() {
        let cc = kh(&trefoil());
        let (w, s, q) = short_exact_split(&cc, 2).unwrap();
        assert_eq!(w, s + q);
    }

    #[test]
    fn bar_natan_is_not_reduced() {
        let cc = build_complex(&trefoil(), &TheorySpec::bar_natan()).unwrap();
        assert!(matches!(reduced(&cc, 1), Err(Error::UnsupportedRelation { .. })));
        assert!(x_action(&cc, 1).is_ok());
    }

    #[test]
    fn unknown_basepoint() {
        let cc = kh(&trefoil());
        assert!(matches!(x_action(&cc, 99), Err(Error::UnknownEdge(99))));
    }
}
