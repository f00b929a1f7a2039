//! Dotted cobordisms between diagrams, evaluated as chain maps.
//!
//! A word is a sequence of handle attachments and dots away from the
//! crossings. Every move acts at each vertex of the cube by the TQFT on the
//! circles it touches and by the identity elsewhere, so the cube of the
//! target diagram has the same vertices as that of the source.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Relation, SparseMatrix};
use crate::basepoint::equal_on_homology;
use crate::complex::ChainMap;
use crate::diagram::{Edge, PlanarDiagram};
use crate::error::{Error, Result};
use crate::theories::cube::{bit, get_label};
use crate::theories::{build_complex, CubeComplex, TheorySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// Birth of a circle labeled `label`.
    ZeroHandle { label: Edge },
    /// Band joining edge `a` to edge `b`. With `a == b` the band pinches
    /// off a new circle labeled `fresh`.
    OneHandle { a: Edge, b: Edge, fresh: Option<Edge> },
    /// Death of the crossingless circle `label`.
    TwoHandle { label: Edge },
    Dot { edge: Edge },
}

impl Move {
    /// Edges the move touches in its source diagram.
    pub fn support(&self) -> Vec<Edge> {
        match *self {
            Move::ZeroHandle { .. } => Vec::new(),
            Move::OneHandle { a, b, .. } if a == b => vec![a],
            Move::OneHandle { a, b, .. } => vec![a, b],
            Move::TwoHandle { label } => vec![label],
            Move::Dot { edge } => vec![edge],
        }
    }

    /// Diagram after the move.
    pub fn apply(&self, d: &PlanarDiagram) -> Result<PlanarDiagram> {
        match *self {
            Move::ZeroHandle { label } => d.with_free_loop(label),
            Move::OneHandle { a, b, fresh } => {
                if a != b && fresh.is_some() {
                    return Err(Error::InvalidMove(format!(
                        "band from {a} to {b} does not create a circle"
                    )));
                }
                d.saddle(a, b, fresh)
            }
            Move::TwoHandle { label } => d.without_free_loop(label),
            Move::Dot { edge } => {
                if d.has_edge(edge) {
                    Ok(d.clone())
                } else {
                    Err(Error::UnknownEdge(edge))
                }
            }
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::ZeroHandle { label } => write!(f, "zero {label}"),
            Move::OneHandle { a, b, fresh: None } => write!(f, "one {a} {b}"),
            Move::OneHandle { a, b, fresh: Some(n) } => write!(f, "one {a} {b} {n}"),
            Move::TwoHandle { label } => write!(f, "two {label}"),
            Move::Dot { edge } => write!(f, "dot {edge}"),
        }
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad move {s:?}"));
        let mut it = s.split_whitespace();
        let kind = it.next().ok_or_else(bad)?;
        let nums: Vec<Edge> = it
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("zero", &[label]) => Ok(Move::ZeroHandle { label }),
            ("one", &[a, b]) => Ok(Move::OneHandle { a, b, fresh: None }),
            ("one", &[a, b, n]) => Ok(Move::OneHandle { a, b, fresh: Some(n) }),
            ("two", &[label]) => Ok(Move::TwoHandle { label }),
            ("dot", &[edge]) => Ok(Move::Dot { edge }),
            _ => Err(bad()),
        }
    }
}

/// A cobordism as a list of moves starting from `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismWord {
    pub source: PlanarDiagram,
    pub target: PlanarDiagram,
    pub moves: Vec<Move>,
}

impl CobordismWord {
    pub fn new(source: PlanarDiagram, moves: Vec<Move>) -> Result<Self> {
        let mut d = source.clone();
        for m in &moves {
            d = m.apply(&d)?;
        }
        Ok(CobordismWord {
            source,
            target: d,
            moves,
        })
    }

    pub fn identity(source: PlanarDiagram) -> Self {
        CobordismWord {
            target: source.clone(),
            source,
            moves: Vec::new(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CobordismWord) -> Result<Self> {
        if next.source != self.target {
            return Err(Error::InvalidMove("words do not compose".into()));
        }
        let mut moves = self.moves.clone();
        moves.extend(next.moves.iter().copied());
        Ok(CobordismWord {
            source: self.source.clone(),
            target: next.target.clone(),
            moves,
        })
    }

    /// Moves separated by `;`.
    pub fn parse_moves(source: PlanarDiagram, text: &str) -> Result<Self> {
        let moves = text
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        Self::new(source, moves)
    }

    pub fn moves_string(&self) -> String {
        self.moves.iter().map(Move::to_string).collect::<Vec<_>>().join("; ")
    }

    /// Every diagram along the word, source first.
    pub fn states(&self) -> Result<Vec<PlanarDiagram>> {
        let mut out = vec![self.source.clone()];
        for m in &self.moves {
            let next = m.apply(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }
}

/// The TQFT piece of one move at one vertex.
enum Local {
    Unit { out: usize },
    Counit { from: usize },
    Merge { a: usize, b: usize, into: usize },
    Split { from: usize, a: usize, b: usize },
    Dot { at: usize },
}

fn circle(cc: &CubeComplex, v: u32, e: Edge) -> Result<usize> {
    cc.cube.circle_of_edge(v, e).ok_or(Error::UnknownEdge(e))
}

fn local_piece(m: &Move, src: &CubeComplex, tgt: &CubeComplex, v: u32) -> Result<Local> {
    Ok(match *m {
        Move::ZeroHandle { label } => Local::Unit {
            out: circle(tgt, v, label)?,
        },
        Move::TwoHandle { label } => Local::Counit {
            from: circle(src, v, label)?,
        },
        Move::Dot { edge } => Local::Dot {
            at: circle(src, v, edge)?,
        },
        Move::OneHandle { a, b, fresh } => {
            let (ca, cb) = (circle(src, v, a)?, circle(src, v, b)?);
            // a free loop merged into an edge disappears from the target
            let survivor = if tgt.diagram.has_edge(a) { a } else { b };
            if ca != cb {
                Local::Merge {
                    a: ca,
                    b: cb,
                    into: circle(tgt, v, survivor)?,
                }
            } else {
                let other = fresh.unwrap_or(b);
                let (ta, tb) = (circle(tgt, v, a)?, circle(tgt, v, other)?);
                if ta == tb {
                    return Err(Error::InvalidMove(format!(
                        "band from {a} to {b} is not orientable at vertex {v}"
                    )));
                }
                Local::Split { from: ca, a: ta, b: tb }
            }
        }
    })
}

/// Chain map of a single move between already built complexes.
pub fn move_map(m: &Move, src: &CubeComplex, tgt: &CubeComplex) -> Result<ChainMap> {
    let alg = &src.theory.algebra;
    let n = src.cube.crossing_count();
    let columns: Vec<Vec<Vec<u32>>> = (0..1u32 << n)
        .into_par_iter()
        .map(|v| -> Result<Vec<Vec<u32>>> {
            let ks = src.cube.circle_count(v);
            let kt = tgt.cube.circle_count(v);
            let piece = local_piece(m, src, tgt, v)?;
            let touched = |c: usize| match piece {
                Local::Unit { .. } => false,
                Local::Counit { from } => c == from,
                Local::Merge { a, b, .. } => c == a || c == b,
                Local::Split { from, .. } => c == from,
                Local::Dot { at } => c == at,
            };
            // untouched circles keep any edge they had
            let mut carry = Vec::with_capacity(ks);
            for c in 0..ks {
                if touched(c) {
                    carry.push(None);
                    continue;
                }
                let e = src
                    .cube
                    .circle_edges(v, c)
                    .into_iter()
                    .find(|&e| tgt.diagram.has_edge(e))
                    .ok_or_else(|| Error::InvalidMove("circle lost without a handle".into()))?;
                carry.push(Some(circle(tgt, v, e)?));
            }
            let mut cols = Vec::with_capacity(1 << ks);
            for labels in 0..1u32 << ks {
                let mut base = 0u32;
                for (c, t) in carry.iter().enumerate() {
                    if let Some(t) = *t {
                        if get_label(labels, ks, c) == 1 {
                            base |= 1 << bit(kt, t);
                        }
                    }
                }
                let at = |c: usize| get_label(labels, ks, c);
                let put = |t: usize, l: u8| (l as u32) << bit(kt, t);
                let mut out: Vec<u32> = Vec::new();
                match piece {
                    Local::Unit { out: t } => out.push(base | put(t, 0)),
                    Local::Counit { from } => {
                        if alg.counit(at(from)) {
                            out.push(base);
                        }
                    }
                    Local::Merge { a, b, into } => {
                        out.extend(alg.mult_terms(at(a), at(b)).map(|z| base | put(into, z)));
                    }
                    Local::Split { from, a, b } => {
                        out.extend(
                            alg.comult_terms(at(from))
                                .map(|(y, z)| base | put(a, y) | put(b, z)),
                        );
                    }
                    Local::Dot { at: c } => {
                        let t = carry_dot_target(src, tgt, v, c)?;
                        out.extend(alg.dot_terms(at(c)).map(|z| base | put(t, z)));
                    }
                }
                cols.push(out.into_iter().map(|l| tgt.cube.index(v, l)).collect());
            }
            Ok(cols)
        })
        .collect::<Result<_>>()?;
    let m = SparseMatrix::from_columns(tgt.complex.len(), columns.into_iter().flatten().collect());
    ChainMap::new_unchecked(src.complex.clone(), tgt.complex.clone(), m)
}

fn carry_dot_target(src: &CubeComplex, tgt: &CubeComplex, v: u32, c: usize) -> Result<usize> {
    let e = src.cube.circle_edges(v, c)[0];
    circle(tgt, v, e)
}

/// Equal up to the order in which free loops are listed.
fn same_diagram(a: &PlanarDiagram, b: &PlanarDiagram) -> bool {
    let loops = |d: &PlanarDiagram| {
        let mut v = d.free_loops().to_vec();
        v.sort_unstable();
        v
    };
    a.crossings() == b.crossings() && loops(a) == loops(b)
}

fn require_local(t: &TheorySpec) -> Result<()> {
    if t.has_faces() {
        return Err(Error::InvalidMove(format!(
            "theory {:?} has face maps; handle maps are only defined for the plain cube",
            t.name
        )));
    }
    Ok(())
}

/// Complexes of every state along the word together with the composite map.
pub struct Evaluation {
    pub complexes: Vec<CubeComplex>,
    pub map: ChainMap,
}

pub fn evaluate_full(w: &CobordismWord, t: &TheorySpec) -> Result<Evaluation> {
    require_local(t)?;
    let complexes: Vec<CubeComplex> = w
        .states()?
        .par_iter()
        .map(|d| build_complex(d, t))
        .collect::<Result<_>>()?;
    let mut map = ChainMap::identity(complexes[0].complex.clone());
    for (i, m) in w.moves.iter().enumerate() {
        let f = move_map(m, &complexes[i], &complexes[i + 1])?;
        f.check()?;
        map = f.compose(&map)?;
    }
    Ok(Evaluation { complexes, map })
}

/// The chain map of a word, checked against both differentials.
pub fn evaluate(w: &CobordismWord, t: &TheorySpec) -> Result<ChainMap> {
    Ok(evaluate_full(w, t)?.map)
}

/// Evaluate on complexes built by the caller (the ends must match the word).
pub fn evaluate_between(w: &CobordismWord, src: &CubeComplex, tgt: &CubeComplex) -> Result<ChainMap> {
    require_local(&src.theory)?;
    if !same_diagram(&src.diagram, &w.source) || !same_diagram(&tgt.diagram, &w.target) {
        return Err(Error::InvalidMove("complexes do not match the word".into()));
    }
    let states = w.states()?;
    let t = &src.theory;
    let mut built: Vec<Option<CubeComplex>> = vec![None; states.len()];
    built[0] = Some(src.clone());
    *built.last_mut().unwrap() = Some(tgt.clone());
    let n = states.len();
    for (i, d) in states.iter().enumerate().take(n - 1).skip(1) {
        built[i] = Some(build_complex(d, t)?);
    }
    let built: Vec<CubeComplex> = built.into_iter().map(Option::unwrap).collect();
    let mut map = ChainMap::identity(built[0].complex.clone());
    for (i, m) in w.moves.iter().enumerate() {
        let f = move_map(m, &built[i], &built[i + 1])?;
        f.check()?;
        map = f.compose(&map)?;
    }
    Ok(map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    FourTu,
    NeckCutting,
    DotMigration,
    Cancel,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::FourTu => "4Tu",
            RelationKind::NeckCutting => "neck_cutting",
            RelationKind::DotMigration => "dot_migration",
            RelationKind::Cancel => "cancel",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub kind: RelationKind,
    pub host: String,
    /// `chain` when compared as matrices, `homology` when compared on homology.
    pub level: &'static str,
    pub detail: String,
    pub pass: bool,
}

/// Input for [`check_relation`].
#[derive(Clone, Debug)]
pub enum RelationInstance {
    /// Four free loops of the host.
    FourTu { host: PlanarDiagram, loops: [Edge; 4] },
    /// A free loop of the host.
    NeckCutting { host: PlanarDiagram, loop_label: Edge },
    /// Two edges of one component.
    DotMigration { host: PlanarDiagram, p: Edge, q: Edge },
    /// Birth of `fresh` followed by merging it into `edge`.
    Cancel { host: PlanarDiagram, edge: Edge, fresh: Edge },
}

/// Tube between two free loops: merge, then split back off.
fn tube(host: &PlanarDiagram, a: Edge, b: Edge) -> Result<CobordismWord> {
    CobordismWord::new(
        host.clone(),
        vec![
            Move::OneHandle { a, b, fresh: None },
            Move::OneHandle { a, b: a, fresh: Some(b) },
        ],
    )
}

fn sum_maps(maps: &[ChainMap]) -> Result<ChainMap> {
    let mut acc = maps[0].clone();
    for m in &maps[1..] {
        acc = acc.add(m)?;
    }
    Ok(acc)
}

pub fn check_relation(inst: &RelationInstance, t: &TheorySpec) -> Result<RelationReport> {
    match inst {
        RelationInstance::FourTu { host, loops } => {
            for &l in loops {
                if !host.is_free_loop(l) {
                    return Err(Error::InvalidMove(format!("{l} is not a free loop")));
                }
            }
            let cc = build_complex(host, t)?;
            let pairs = [(0, 1), (1, 2), (2, 3), (3, 0)];
            let maps = pairs
                .iter()
                .map(|&(i, j)| evaluate_between(&tube(host, loops[i], loops[j])?, &cc, &cc))
                .collect::<Result<Vec<_>>>()?;
            let total = sum_maps(&maps)?;
            Ok(RelationReport {
                kind: RelationKind::FourTu,
                host: host.to_pd_string(),
                level: "chain",
                detail: format!("sum of four tubes has {} nonzero entries", total.matrix().nnz()),
                pass: total.is_zero(),
            })
        }
        RelationInstance::NeckCutting { host, loop_label } => {
            let e = *loop_label;
            if !host.is_free_loop(e) {
                return Err(Error::InvalidMove(format!("{e} is not a free loop")));
            }
            let cc = build_complex(host, t)?;
            let word = |ms: Vec<Move>| CobordismWord::new(host.clone(), ms);
            let two = Move::TwoHandle { label: e };
            let zero = Move::ZeroHandle { label: e };
            let dot = Move::Dot { edge: e };
            let mut terms = vec![word(vec![two, zero, dot])?, word(vec![dot, two, zero])?];
            // X² = X + 0·1 forces a third, undotted term
            if t.relation() == Relation::XSquaredPlusX {
                terms.push(word(vec![two, zero])?);
            }
            let maps = terms
                .iter()
                .map(|w| evaluate_between(w, &cc, &cc))
                .collect::<Result<Vec<_>>>()?;
            let total = sum_maps(&maps)?;
            let id = ChainMap::identity(cc.complex.clone());
            Ok(RelationReport {
                kind: RelationKind::NeckCutting,
                host: host.to_pd_string(),
                level: "chain",
                detail: format!("{} cut terms against the identity cylinder", terms.len()),
                pass: total.matrix() == id.matrix(),
            })
        }
        RelationInstance::DotMigration { host, p, q } => {
            if host.component_of(*p) != host.component_of(*q) || host.component_of(*p).is_none() {
                return Err(Error::InvalidMove(format!(
                    "edges {p} and {q} are not on one component"
                )));
            }
            let cc = build_complex(host, t)?;
            let a = evaluate_between(&CobordismWord::new(host.clone(), vec![Move::Dot { edge: *p }])?, &cc, &cc)?;
            let b = evaluate_between(&CobordismWord::new(host.clone(), vec![Move::Dot { edge: *q }])?, &cc, &cc)?;
            let chain = a.matrix() == b.matrix();
            let pass = chain || equal_on_homology(&a, &b)?;
            Ok(RelationReport {
                kind: RelationKind::DotMigration,
                host: host.to_pd_string(),
                level: "homology",
                detail: format!("dots at {p} and {q}; equal as matrices: {chain}"),
                pass,
            })
        }
        RelationInstance::Cancel { host, edge, fresh } => {
            let w = CobordismWord::new(
                host.clone(),
                vec![
                    Move::ZeroHandle { label: *fresh },
                    Move::OneHandle { a: *edge, b: *fresh, fresh: None },
                ],
            )?;
            if !same_diagram(&w.target, host) {
                return Err(Error::InvalidMove("handles do not cancel".into()));
            }
            let cc = build_complex(host, t)?;
            let f = evaluate_between(&w, &cc, &cc)?;
            let ind = f.induced()?;
            let n = ind.matrix.n_rows();
            let pass = ind.matrix == crate::algebra::F2Matrix::identity(n);
            Ok(RelationReport {
                kind: RelationKind::Cancel,
                host: host.to_pd_string(),
                level: "homology",
                detail: format!("induced map on {n}-dimensional homology"),
                pass,
            })
        }
    }
}

/// Two words on one diagram with disjoint supports, composed in both orders.
pub fn disjoint_commute(
    host: &PlanarDiagram,
    first: &[Move],
    second: &[Move],
    t: &TheorySpec,
) -> Result<bool> {
    let a: Vec<Edge> = first.iter().flat_map(Move::support).collect();
    let b: Vec<Edge> = second.iter().flat_map(Move::support).collect();
    if a.iter().any(|e| b.contains(e)) {
        return Err(Error::InvalidMove("supports overlap".into()));
    }
    let join = |x: &[Move], y: &[Move]| {
        let mut v = x.to_vec();
        v.extend_from_slice(y);
        CobordismWord::new(host.clone(), v)
    };
    let (w1, w2) = (join(first, second)?, join(second, first)?);
    if !same_diagram(&w1.target, &w2.target) {
        return Err(Error::InvalidMove("orders end on different diagrams".into()));
    }
    let e1 = evaluate_full(&w1, t)?;
    let tgt = e1.complexes.last().unwrap();
    let src = &e1.complexes[0];
    let m2 = evaluate_between(&w2, src, tgt)?;
    Ok(e1.map.matrix() == m2.matrix())
}

/// Rank of the pairing `ε∘m` on the algebra.
pub fn pairing_rank(t: &TheorySpec) -> usize {
    t.algebra.pairing_matrix().rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn kh() -> TheorySpec {
        TheorySpec::khovanov()
    }

    fn dense(f: &ChainMap) -> Vec<String> {
        f.matrix().to_dense().to_bit_strings()
    }

    #[test]
    fn unit_from_empty() {
        let w = CobordismWord::new(PlanarDiagram::empty(), vec![Move::ZeroHandle { label: 1 }]).unwrap();
        let f = evaluate(&w, &kh()).unwrap();
        // 1 ↦ v₊, the first generator
        assert_eq!(dense(&f), vec!["1", "0"]);
    }

    #[test]
    fn birth_then_death_is_zero() {
        let w = CobordismWord::new(
            PlanarDiagram::empty(),
            vec![Move::ZeroHandle { label: 1 }, Move::TwoHandle { label: 1 }],
        )
        .unwrap();
        assert!(evaluate(&w, &kh()).unwrap().is_zero());
    }

    #[test]
    fn dotted_sphere_is_one() {
        let w = CobordismWord::new(
            PlanarDiagram::empty(),
            vec![Move::ZeroHandle { label: 1 }, Move::Dot { edge: 1 }, Move::TwoHandle { label: 1 }],
        )
        .unwrap();
        assert_eq!(dense(&evaluate(&w, &kh()).unwrap()), vec!["1"]);
    }

    #[test]
    fn merge_and_split_tables() {
        let two = parse_pd("O(1) O(2)").unwrap();
        let m = evaluate(&CobordismWord::new(two.clone(), vec![Move::OneHandle { a: 1, b: 2, fresh: None }]).unwrap(), &kh()).unwrap();
        // 11 ↦ 1, 1X, X1 ↦ X, XX ↦ 0
        assert_eq!(dense(&m), vec!["1000", "0110"]);
        let one = PlanarDiagram::unknot();
        let s = evaluate(&CobordismWord::new(one, vec![Move::OneHandle { a: 1, b: 1, fresh: Some(2) }]).unwrap(), &kh()).unwrap();
        // 1 ↦ 1X + X1, X ↦ XX
        assert_eq!(dense(&s), vec!["00", "10", "10", "01"]);
    }

    #[test]
    fn neck_cutting_both_theories() {
        let host = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3) O(7)").unwrap();
        for t in [TheorySpec::khovanov(), TheorySpec::bar_natan()] {
            let r = check_relation(&RelationInstance::NeckCutting { host: host.clone(), loop_label: 7 }, &t).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn four_tubes_vanish() {
        let host = parse_pd("O(1) O(2) O(3) O(4)").unwrap();
        let r = check_relation(&RelationInstance::FourTu { host, loops: [1, 2, 3, 4] }, &kh()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn tube_is_sum_of_dots() {
        let host = parse_pd("O(1) O(2)").unwrap();
        let cc = build_complex(&host, &kh()).unwrap();
        let t = evaluate_between(&tube(&host, 1, 2).unwrap(), &cc, &cc).unwrap();
        let d1 = evaluate_between(&CobordismWord::new(host.clone(), vec![Move::Dot { edge: 1 }]).unwrap(), &cc, &cc).unwrap();
        let d2 = evaluate_between(&CobordismWord::new(host.clone(), vec![Move::Dot { edge: 2 }]).unwrap(), &cc, &cc).unwrap();
        assert_eq!(t.matrix(), d1.add(&d2).unwrap().matrix());
    }

    #[test]
    fn dot_migration_on_trefoil() {
        let host = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        for q in 2..=6 {
            let r = check_relation(&RelationInstance::DotMigration { host: host.clone(), p: 1, q }, &kh()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn dot_on_a_free_cylinder_is_chain_equal() {
        let host = PlanarDiagram::unknot();
        let r = check_relation(&RelationInstance::DotMigration { host, p: 1, q: 1 }, &kh()).unwrap();
        assert!(r.detail.ends_with("true"));
    }

    #[test]
    fn canceling_pair_on_knot() {
        let host = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let r = check_relation(&RelationInstance::Cancel { host, edge: 3, fresh: 9 }, &kh()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn saddle_on_knot_is_a_chain_map() {
        let host = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let w = CobordismWord::new(host, vec![Move::OneHandle { a: 2, b: 2, fresh: Some(7) }, Move::OneHandle { a: 7, b: 5, fresh: None }]).unwrap();
        evaluate(&w, &kh()).unwrap();
    }

    #[test]
    fn disjoint_handles_commute() {
        let host = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3) O(7) O(8)").unwrap();
        let a = [Move::OneHandle { a: 7, b: 8, fresh: None }];
        let b = [Move::Dot { edge: 1 }, Move::ZeroHandle { label: 9 }];
        assert!(disjoint_commute(&host, &a, &b, &kh()).unwrap());
    }

    #[test]
    fn pairing_is_nondegenerate() {
        assert_eq!(pairing_rank(&TheorySpec::khovanov()), 2);
        assert_eq!(pairing_rank(&TheorySpec::bar_natan()), 2);
    }

    #[test]
    fn move_text_roundtrip() {
        let w = CobordismWord::parse_moves(PlanarDiagram::unknot(), "zero 2; one 1 2; dot 1; one 1 1 3; two 3").unwrap();
        let again = CobordismWord::parse_moves(PlanarDiagram::unknot(), &w.moves_string()).unwrap();
        assert_eq!(w, again);
        assert!("spin 1".parse::<Move>().is_err());
    }

    #[test]
    fn stale_labels_are_rejected() {
        assert!(CobordismWord::new(PlanarDiagram::unknot(), vec![Move::ZeroHandle { label: 1 }]).is_err());
        assert!(CobordismWord::new(PlanarDiagram::unknot(), vec![Move::TwoHandle { label: 2 }]).is_err());
    }
}
