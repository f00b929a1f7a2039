//! Planar link diagrams in PD notation.
//!
//! A crossing `X(a,b,c,d)` lists its four edge labels counterclockwise,
//! starting from the incoming under-strand. The 0-smoothing joins `a–b` and
//! `c–d`; the 1-smoothing joins `a–d` and `b–c`. Crossingless circles are
//! written `O(k)`, one term per loop, with `k` the loop's edge label.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = u32;

/// Position of an edge end: crossing index and slot `0..4` within the tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub crossing: u32,
    pub pos: u8,
}

impl Slot {
    fn new(crossing: usize, pos: usize) -> Self {
        Slot {
            crossing: crossing as u32,
            pos: pos as u8,
        }
    }

    fn across(self) -> Slot {
        Slot {
            crossing: self.crossing,
            pos: (self.pos + 2) % 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Crossing(pub [Edge; 4]);

impl Crossing {
    fn rotated(self, by: usize) -> Crossing {
        let e = self.0;
        Crossing([e[by % 4], e[(by + 1) % 4], e[(by + 2) % 4], e[(by + 3) % 4]])
    }
}

/// Sign of a crossing with respect to the diagram orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// Which 180° rotation a mutation applies to the tangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Horizontal axis in the page.
    X,
    /// Vertical axis in the page.
    Y,
    /// Perpendicular to the page.
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Image of each boundary position (NW, NE, SE, SW) under the rotation.
    fn permutation(self) -> [usize; 4] {
        match self {
            Axis::Z => [2, 3, 0, 1],
            Axis::Y => [1, 0, 3, 2],
            Axis::X => [3, 2, 1, 0],
        }
    }

    /// Rotations about an in-page axis turn the tangle over.
    fn flips(self) -> bool {
        !matches!(self, Axis::Z)
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::Parse(format!("unknown axis {s:?}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        f.write_str(s)
    }
}

/// A disc meeting the diagram in four points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangleRegion {
    /// Boundary edges in cyclic order NW, NE, SE, SW.
    pub boundary_edges: [Edge; 4],
    /// Indices of the crossings inside the disc.
    pub interior_crossings: BTreeSet<usize>,
}

impl TangleRegion {
    pub fn new(boundary_edges: [Edge; 4], interior: impl IntoIterator<Item = usize>) -> Self {
        TangleRegion {
            boundary_edges,
            interior_crossings: interior.into_iter().collect(),
        }
    }
}

/// The circles of one vertex of the cube of resolutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub vertex: Vec<bool>,
    /// Each circle lists its edges in cyclic order starting from its minimal
    /// label. Circles through crossings come first, ordered by minimal label,
    /// then free loops in input order.
    pub circles: Vec<Vec<Edge>>,
}

impl Resolution {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, e: Edge) -> Option<usize> {
        self.circles.iter().position(|c| c.contains(&e))
    }
}

/// Structured form used for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub crossings: Vec<[Edge; 4]>,
    pub free_loops: Vec<Edge>,
    pub basepoints: Vec<Edge>,
    /// Components with crossings, in traversal order.
    pub orientation: Vec<ComponentDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub edges: Vec<Edge>,
    /// `[crossing, slot]` where the first edge arrives. Edge order alone
    /// cannot tell the two directions of a two-edge component apart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<[u32; 2]>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PlanarDiagram {
    crossings: Vec<Crossing>,
    free_loops: Vec<Edge>,
    basepoints: BTreeSet<Edge>,
    /// Slot at which each crossing edge arrives.
    heads: BTreeMap<Edge, Slot>,
    /// Both ends of each crossing edge.
    ends: BTreeMap<Edge, [Slot; 2]>,
}

impl fmt::Debug for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlanarDiagram({})", self.to_pd_string())?;
        if !self.basepoints.is_empty() {
            write!(f, " basepoints {:?}", self.basepoints)?;
        }
        Ok(())
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}

impl FromStr for PlanarDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_pd(s)
    }
}

/// Parse a PD string such as `X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)` or `O(1)`.
/// Square brackets and an enclosing `PD[...]` are accepted too.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram> {
    let mut s = text.trim();
    for prefix in ["PD[", "PD("] {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest
                .strip_suffix(']')
                .or_else(|| rest.strip_suffix(')'))
                .ok_or_else(|| Error::Parse("unterminated PD[...] wrapper".into()))?;
        }
    }
    let mut crossings = Vec::new();
    let mut loops = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' {
            i += 1;
            continue;
        }
        let kind = c.to_ascii_uppercase();
        if kind != 'X' && kind != 'O' {
            return Err(Error::Parse(format!("unexpected character {c:?} at offset {i}")));
        }
        i += 1;
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let close = match chars.get(i) {
            Some('(') => ')',
            Some('[') => ']',
            _ => return Err(Error::Parse(format!("expected '(' after {kind} at offset {i}"))),
        };
        let start = i + 1;
        let end = chars[start..]
            .iter()
            .position(|&ch| ch == close)
            .map(|p| start + p)
            .ok_or_else(|| Error::Parse(format!("unterminated {kind} term at offset {i}")))?;
        let body: String = chars[start..end].iter().collect();
        let labels = body
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<Edge>()
                    .map_err(|_| Error::Parse(format!("bad edge label {t:?} in {kind}({body})")))
            })
            .collect::<Result<Vec<_>>>()?;
        match (kind, labels.as_slice()) {
            ('X', &[a, b, c, d]) => crossings.push(Crossing([a, b, c, d])),
            ('O', &[k]) => loops.push(k),
            ('X', _) => return Err(Error::Parse(format!("X term needs 4 labels: X({body})"))),
            _ => return Err(Error::Parse(format!("O term needs 1 label: O({body})"))),
        }
        i = end + 1;
    }
    PlanarDiagram::new(crossings, loops)
}

/// Union-find over dense indices.
pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root so classes are represented by their minimum
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

fn edge_ends(crossings: &[Crossing]) -> Result<BTreeMap<Edge, [Slot; 2]>> {
    let mut seen: BTreeMap<Edge, Vec<Slot>> = BTreeMap::new();
    for (ci, c) in crossings.iter().enumerate() {
        for (p, &e) in c.0.iter().enumerate() {
            if e == 0 {
                return Err(Error::InvalidDiagram("edge labels must be positive".into()));
            }
            seen.entry(e).or_default().push(Slot::new(ci, p));
        }
    }
    seen.into_iter()
        .map(|(e, v)| match v.as_slice() {
            &[a, b] => Ok((e, [a, b])),
            _ => Err(Error::InvalidDiagram(format!(
                "edge {e} occurs {} times, expected exactly twice",
                v.len()
            ))),
        })
        .collect()
}

/// Walk one component starting at `start` arriving at `head`; returns the
/// (edge, head slot) sequence.
fn trace(
    crossings: &[Crossing],
    ends: &BTreeMap<Edge, [Slot; 2]>,
    start: Edge,
    head: Slot,
) -> Vec<(Edge, Slot)> {
    let mut out = Vec::new();
    let (mut e, mut h) = (start, head);
    loop {
        out.push((e, h));
        let tail = h.across();
        let next = crossings[tail.crossing as usize].0[tail.pos as usize];
        let [s0, s1] = ends[&next];
        let next_head = if s0 == tail { s1 } else { s0 };
        e = next;
        h = next_head;
        if e == start && h == head {
            return out;
        }
        debug_assert!(out.len() <= 2 * ends.len());
    }
}

/// Choose a direction for every component. `score` rates a candidate head
/// slot; each component takes the direction with the larger total, ties
/// broken towards increasing labels.
fn orient(
    crossings: &[Crossing],
    ends: &BTreeMap<Edge, [Slot; 2]>,
    score: impl Fn(Edge, Slot) -> i64,
) -> BTreeMap<Edge, Slot> {
    let mut heads = BTreeMap::new();
    for (&e, &[s0, _]) in ends {
        if heads.contains_key(&e) {
            continue;
        }
        let fwd = trace(crossings, ends, e, s0);
        let other_end = |x: Edge, h: Slot| {
            let [a, b] = ends[&x];
            if a == h {
                b
            } else {
                a
            }
        };
        let fwd_score: i64 = fwd.iter().map(|&(x, h)| score(x, h)).sum();
        let rev_score: i64 = fwd.iter().map(|&(x, h)| score(x, other_end(x, h))).sum();
        let forward = match fwd_score.cmp(&rev_score) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                // successor of the minimal edge should be the smaller neighbour
                let n = fwd.len();
                let k = (0..n).min_by_key(|&i| fwd[i].0).unwrap();
                fwd[(k + 1) % n].0 <= fwd[(k + n - 1) % n].0
            }
        };
        for &(x, h) in &fwd {
            heads.insert(x, if forward { h } else { other_end(x, h) });
        }
    }
    heads
}

/// Rotate crossings by two where needed so slot 0 is the incoming under-strand.
fn normalize(crossings: &mut [Crossing], heads: &mut BTreeMap<Edge, Slot>) {
    for (ci, c) in crossings.iter_mut().enumerate() {
        let at0 = c.0[0];
        let incoming0 = heads.get(&at0) == Some(&Slot::new(ci, 0));
        if !incoming0 {
            *c = c.rotated(2);
            for h in heads.values_mut() {
                if h.crossing as usize == ci {
                    h.pos = (h.pos + 2) % 4;
                }
            }
        }
    }
}

impl PlanarDiagram {
    /// The empty diagram.
    pub fn empty() -> Self {
        PlanarDiagram {
            crossings: Vec::new(),
            free_loops: Vec::new(),
            basepoints: BTreeSet::new(),
            heads: BTreeMap::new(),
            ends: BTreeMap::new(),
        }
    }

    /// The crossingless unknot with loop label 1.
    pub fn unknot() -> Self {
        PlanarDiagram::new(vec![], vec![1]).expect("valid")
    }

    /// Build a diagram with the default orientation: components passing
    /// under some crossing follow the PD convention, the others run along
    /// increasing labels.
    pub fn new(crossings: Vec<Crossing>, free_loops: Vec<Edge>) -> Result<Self> {
        let ends = edge_ends(&crossings)?;
        Self::check_loops(&ends, &free_loops)?;
        // consistency: along every component, under-strands agree
        let score = |_e: Edge, h: Slot| match h.pos {
            0 => 1,
            2 => -1,
            _ => 0,
        };
        let heads = orient(&crossings, &ends, score);
        for (&e, h) in &heads {
            if h.pos == 2 {
                return Err(Error::InvalidDiagram(format!(
                    "orientation along edge {e} contradicts the incoming under-strand convention"
                )));
            }
        }
        Ok(PlanarDiagram {
            crossings,
            free_loops,
            basepoints: BTreeSet::new(),
            heads,
            ends,
        })
    }

    /// Build a diagram whose components run in the given edge order.
    /// Crossing tuples are rotated by two where needed so that slot 0 stays
    /// the incoming under-strand.
    pub fn with_orientation(
        crossings: Vec<Crossing>,
        free_loops: Vec<Edge>,
        components: &[Vec<Edge>],
    ) -> Result<Self> {
        let ends = edge_ends(&crossings)?;
        Self::check_loops(&ends, &free_loops)?;
        let mut want: HashMap<Edge, Edge> = HashMap::new();
        for comp in components {
            for (i, &e) in comp.iter().enumerate() {
                want.insert(e, comp[(i + 1) % comp.len()]);
            }
        }
        let mut heads = BTreeMap::new();
        for (&e, &[s0, s1]) in &ends {
            let Some(&next) = want.get(&e) else {
                return Err(Error::InvalidDiagram(format!("orientation does not cover edge {e}")));
            };
            let leads_to = |s: Slot| crossings[s.crossing as usize].0[s.across().pos as usize] == next;
            let head = match (leads_to(s0), leads_to(s1)) {
                (true, true) => {
                    if s1.pos == 0 {
                        s1
                    } else {
                        s0
                    }
                }
                (true, false) => s0,
                (false, true) => s1,
                (false, false) => {
                    return Err(Error::InvalidDiagram(format!(
                        "orientation lists {next} after {e}, but they are not consecutive"
                    )))
                }
            };
            heads.insert(e, head);
        }
        // every traced component must agree with the requested heads
        for (&e, &h) in &heads {
            for (x, hx) in trace(&crossings, &ends, e, h) {
                if heads[&x] != hx {
                    return Err(Error::InvalidDiagram(format!(
                        "orientation is inconsistent at edge {x}"
                    )));
                }
            }
        }
        let mut crossings = crossings;
        normalize(&mut crossings, &mut heads);
        let ends = edge_ends(&crossings)?;
        Ok(PlanarDiagram {
            crossings,
            free_loops,
            basepoints: BTreeSet::new(),
            heads,
            ends,
        })
    }

    fn from_parts_with_heads(
        mut crossings: Vec<Crossing>,
        free_loops: Vec<Edge>,
        basepoints: BTreeSet<Edge>,
        mut heads: BTreeMap<Edge, Slot>,
    ) -> Result<Self> {
        normalize(&mut crossings, &mut heads);
        let ends = edge_ends(&crossings)?;
        Self::check_loops(&ends, &free_loops)?;
        let d = PlanarDiagram {
            crossings,
            free_loops,
            basepoints: BTreeSet::new(),
            heads,
            ends,
        };
        d.with_basepoints(basepoints)
    }

    fn check_loops(ends: &BTreeMap<Edge, [Slot; 2]>, loops: &[Edge]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &l in loops {
            if l == 0 {
                return Err(Error::InvalidDiagram("edge labels must be positive".into()));
            }
            if ends.contains_key(&l) || !seen.insert(l) {
                return Err(Error::InvalidDiagram(format!(
                    "free loop label {l} is used more than once"
                )));
            }
        }
        Ok(())
    }

    /// Replace the basepoint set; every basepoint must be an edge or loop label.
    pub fn with_basepoints(mut self, basepoints: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let bps: BTreeSet<Edge> = basepoints.into_iter().collect();
        for &b in &bps {
            if !self.has_edge(b) {
                return Err(Error::UnknownEdge(b));
            }
        }
        self.basepoints = bps;
        Ok(self)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> &[Edge] {
        &self.free_loops
    }

    pub fn basepoints(&self) -> &BTreeSet<Edge> {
        &self.basepoints
    }

    /// Labels of edges through crossings, ascending.
    pub fn crossing_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.ends.keys().copied()
    }

    /// Crossing edges followed by free loops.
    pub fn all_edges(&self) -> Vec<Edge> {
        self.crossing_edges().chain(self.free_loops.iter().copied()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len() + self.free_loops.len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.ends.contains_key(&e) || self.free_loops.contains(&e)
    }

    pub fn is_free_loop(&self, e: Edge) -> bool {
        self.free_loops.contains(&e)
    }

    pub fn max_label(&self) -> Edge {
        self.ends
            .keys()
            .chain(self.free_loops.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn edge_head(&self, e: Edge) -> Option<Slot> {
        self.heads.get(&e).copied()
    }

    pub fn edge_slots(&self, e: Edge) -> Option<[Slot; 2]> {
        self.ends.get(&e).copied()
    }

    pub fn sign(&self, crossing: usize) -> Sign {
        let d = self.crossings[crossing].0[3];
        if self.heads.get(&d) == Some(&Slot::new(crossing, 3)) {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// (n₊, n₋)
    pub fn signed_counts(&self) -> (usize, usize) {
        let pos = (0..self.crossings.len())
            .filter(|&c| self.sign(c) == Sign::Positive)
            .count();
        (pos, self.crossings.len() - pos)
    }

    pub fn writhe(&self) -> i64 {
        let (p, n) = self.signed_counts();
        p as i64 - n as i64
    }

    /// Components in traversal order, each starting at its minimal label;
    /// free loops are single-edge components listed last.
    pub fn components(&self) -> Vec<Vec<Edge>> {
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for (&e, &h) in &self.heads {
            if done.contains(&e) {
                continue;
            }
            let comp: Vec<Edge> = trace(&self.crossings, &self.ends, e, h)
                .into_iter()
                .map(|(x, _)| x)
                .collect();
            done.extend(comp.iter().copied());
            out.push(comp);
        }
        out.extend(self.free_loops.iter().map(|&l| vec![l]));
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn component_of(&self, e: Edge) -> Option<usize> {
        self.components().iter().position(|c| c.contains(&e))
    }

    /// Circles of the resolution at `vertex` (one bit per crossing).
    pub fn resolve(&self, vertex: &[bool]) -> Result<Resolution> {
        if vertex.len() != self.crossings.len() {
            return Err(Error::ResolutionLength {
                expected: self.crossings.len(),
                found: vertex.len(),
            });
        }
        let mask = vertex
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m });
        let layout = self.layout();
        let (assign, n) = layout.circles(mask);
        let mut members: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for (k, &c) in assign.iter().enumerate() {
            members[c as usize].push(layout.labels[k]);
        }
        let circles = members
            .into_iter()
            .map(|m| self.cyclic_order(&m, vertex))
            .collect();
        Ok(Resolution {
            vertex: vertex.to_vec(),
            circles,
        })
    }

    fn cyclic_order(&self, members: &[Edge], vertex: &[bool]) -> Vec<Edge> {
        if members.len() <= 1 || self.is_free_loop(members[0]) {
            return members.to_vec();
        }
        // walk: from an edge end, the smoothing at that crossing leads to a partner slot
        let partner = |s: Slot| -> Slot {
            let one = vertex[s.crossing as usize];
            let p = match (one, s.pos) {
                (false, 0) => 1,
                (false, 1) => 0,
                (false, 2) => 3,
                (false, _) => 2,
                (true, 0) => 3,
                (true, 3) => 0,
                (true, 1) => 2,
                (true, _) => 1,
            };
            Slot {
                crossing: s.crossing,
                pos: p,
            }
        };
        let start = members[0];
        let [a, b] = self.ends[&start];
        // head toward the smaller neighbour for determinism
        let neighbour = |s: Slot| {
            let t = partner(s);
            self.crossings[t.crossing as usize].0[t.pos as usize]
        };
        let mut at = if neighbour(a) <= neighbour(b) { a } else { b };
        let mut order = vec![start];
        loop {
            let t = partner(at);
            let next = self.crossings[t.crossing as usize].0[t.pos as usize];
            if next == start {
                break;
            }
            order.push(next);
            let [s0, s1] = self.ends[&next];
            at = if s0 == t { s1 } else { s0 };
            if order.len() > members.len() {
                break;
            }
        }
        order
    }

    /// Dense indexing used by the cube builders.
    pub(crate) fn layout(&self) -> Layout {
        let labels: Vec<Edge> = self.all_edges();
        let index: HashMap<Edge, usize> = labels.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let crossings = self
            .crossings
            .iter()
            .map(|c| c.0.map(|e| index[&e] as u32))
            .collect();
        Layout {
            n_edges: self.ends.len(),
            labels,
            index,
            crossings,
        }
    }

    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|c| format!("X({},{},{},{})", c.0[0], c.0[1], c.0[2], c.0[3]))
            .collect();
        parts.extend(self.free_loops.iter().map(|l| format!("O({l})")));
        parts.join(" ")
    }

    pub fn to_doc(&self) -> DiagramDoc {
        let orientation = self
            .components()
            .into_iter()
            .filter(|c| !(c.len() == 1 && self.is_free_loop(c[0])))
            .map(|edges| {
                let h = self.heads[&edges[0]];
                ComponentDoc {
                    head: Some([h.crossing, h.pos as u32]),
                    edges,
                }
            })
            .collect();
        DiagramDoc {
            crossings: self.crossings.iter().map(|c| c.0).collect(),
            free_loops: self.free_loops.clone(),
            basepoints: self.basepoints.iter().copied().collect(),
            orientation,
        }
    }

    pub fn from_doc(doc: &DiagramDoc) -> Result<Self> {
        let crossings: Vec<Crossing> = doc.crossings.iter().map(|&c| Crossing(c)).collect();
        let d = if doc.orientation.is_empty() {
            PlanarDiagram::new(crossings, doc.free_loops.clone())?
        } else if doc.orientation.iter().all(|c| c.head.is_some()) {
            Self::from_heads(crossings, doc.free_loops.clone(), &doc.orientation)?
        } else {
            let comps: Vec<Vec<Edge>> = doc.orientation.iter().map(|c| c.edges.clone()).collect();
            PlanarDiagram::with_orientation(crossings, doc.free_loops.clone(), &comps)?
        };
        d.with_basepoints(doc.basepoints.iter().copied())
    }

    fn from_heads(crossings: Vec<Crossing>, free_loops: Vec<Edge>, comps: &[ComponentDoc]) -> Result<Self> {
        let ends = edge_ends(&crossings)?;
        let mut heads = BTreeMap::new();
        for c in comps {
            let (Some(&first), Some([ci, pos])) = (c.edges.first(), c.head) else {
                return Err(Error::InvalidDiagram("empty orientation entry".into()));
            };
            let head = Slot::new(ci as usize, pos as usize);
            if !ends.get(&first).is_some_and(|s| s.contains(&head)) {
                return Err(Error::InvalidDiagram(format!("edge {first} does not end at {ci}:{pos}")));
            }
            let walk = trace(&crossings, &ends, first, head);
            if walk.iter().map(|&(e, _)| e).ne(c.edges.iter().copied()) {
                return Err(Error::InvalidDiagram(format!(
                    "orientation from edge {first} does not visit {:?}",
                    c.edges
                )));
            }
            heads.extend(walk);
        }
        if heads.len() != ends.len() {
            return Err(Error::InvalidDiagram("orientation does not cover every edge".into()));
        }
        Self::from_parts_with_heads(crossings, free_loops, BTreeSet::new(), heads)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("diagram serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }

    fn relabeled(&self, f: impl Fn(Edge) -> Edge) -> PlanarDiagram {
        let crossings = self.crossings.iter().map(|c| Crossing(c.0.map(&f))).collect();
        let free_loops = self.free_loops.iter().map(|&l| f(l)).collect();
        let basepoints = self.basepoints.iter().map(|&b| f(b)).collect();
        let heads = self.heads.iter().map(|(&e, &h)| (f(e), h)).collect();
        let ends = self.ends.iter().map(|(&e, &s)| (f(e), s)).collect();
        PlanarDiagram {
            crossings,
            free_loops,
            basepoints,
            heads,
            ends,
        }
    }

    /// Disjoint union; labels of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &PlanarDiagram) -> PlanarDiagram {
        let shift = self.max_label();
        let other = other.relabeled(|e| e + shift);
        let offset = self.crossings.len() as u32;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().copied());
        let mut free_loops = self.free_loops.clone();
        free_loops.extend(other.free_loops.iter().copied());
        let mut basepoints = self.basepoints.clone();
        basepoints.extend(other.basepoints.iter().copied());
        let mut heads = self.heads.clone();
        heads.extend(other.heads.iter().map(|(&e, &h)| {
            (
                e,
                Slot {
                    crossing: h.crossing + offset,
                    pos: h.pos,
                },
            )
        }));
        let ends = edge_ends(&crossings).expect("union of valid diagrams");
        PlanarDiagram {
            crossings,
            free_loops,
            basepoints,
            heads,
            ends,
        }
    }

    /// Label shift applied to the second summand by [`disjoint_union`](Self::disjoint_union).
    pub fn union_shift(&self) -> Edge {
        self.max_label()
    }

    /// Band move along an arc joining edge `a` to edge `b`, cutting both and
    /// reconnecting them so that orientations are respected (the head of `a`
    /// is swapped with the head of `b`). When `a == b` a small circle labeled
    /// `fresh` is pinched off.
    pub fn saddle(&self, a: Edge, b: Edge, fresh: Option<Edge>) -> Result<PlanarDiagram> {
        for e in [a, b] {
            if !self.has_edge(e) {
                return Err(Error::UnknownEdge(e));
            }
        }
        let need_fresh = || -> Result<Edge> {
            let f = fresh.ok_or_else(|| {
                Error::InvalidMove(format!("saddle on edge {a} with itself needs a fresh label"))
            })?;
            if f == 0 || self.has_edge(f) {
                return Err(Error::InvalidMove(format!("label {f} is not fresh")));
            }
            Ok(f)
        };
        let mut crossings = self.crossings.clone();
        let mut free_loops = self.free_loops.clone();
        let mut heads = self.heads.clone();
        let mut basepoints = self.basepoints.clone();
        match (self.is_free_loop(a), self.is_free_loop(b)) {
            (true, true) if a == b => free_loops.push(need_fresh()?),
            (true, true) => {
                free_loops.retain(|&l| l != b);
                if basepoints.remove(&b) {
                    basepoints.insert(a);
                }
            }
            (true, false) | (false, true) => {
                let (lp, e) = if self.is_free_loop(a) { (a, b) } else { (b, a) };
                free_loops.retain(|&l| l != lp);
                if basepoints.remove(&lp) {
                    basepoints.insert(e);
                }
            }
            (false, false) if a == b => free_loops.push(need_fresh()?),
            (false, false) => {
                let ha = self.heads[&a];
                let hb = self.heads[&b];
                crossings[ha.crossing as usize].0[ha.pos as usize] = b;
                crossings[hb.crossing as usize].0[hb.pos as usize] = a;
                heads.insert(a, hb);
                heads.insert(b, ha);
            }
        }
        Self::from_parts_with_heads(crossings, free_loops, basepoints, heads)
    }

    /// Connected sum at edge `p` of `self` and edge `q` of `other`. Labels of
    /// `other` are shifted by [`union_shift`](Self::union_shift).
    pub fn connected_sum(&self, p: Edge, other: &PlanarDiagram, q: Edge) -> Result<PlanarDiagram> {
        if !self.has_edge(p) {
            return Err(Error::UnknownEdge(p));
        }
        if !other.has_edge(q) {
            return Err(Error::UnknownEdge(q));
        }
        let u = self.disjoint_union(other);
        u.saddle(p, q + self.union_shift(), None)
    }

    /// Add a crossingless circle labeled `label`.
    pub fn with_free_loop(&self, label: Edge) -> Result<PlanarDiagram> {
        if label == 0 || self.has_edge(label) {
            return Err(Error::InvalidMove(format!("label {label} is not fresh")));
        }
        let mut out = self.clone();
        out.free_loops.push(label);
        Ok(out)
    }

    /// Remove the crossingless circle `label`.
    pub fn without_free_loop(&self, label: Edge) -> Result<PlanarDiagram> {
        if !self.is_free_loop(label) {
            return Err(Error::InvalidMove(format!("{label} is not a free loop")));
        }
        let mut out = self.clone();
        out.free_loops.retain(|&l| l != label);
        out.basepoints.remove(&label);
        Ok(out)
    }

    /// Swap over and under at every crossing.
    pub fn mirror(&self) -> PlanarDiagram {
        let mut crossings = Vec::with_capacity(self.crossings.len());
        let mut shift = Vec::with_capacity(self.crossings.len());
        for (ci, c) in self.crossings.iter().enumerate() {
            // the new under-strand is the old over-strand; start at its incoming end
            let (rot, s) = if self.sign(ci) == Sign::Positive {
                (c.rotated(3), 1)
            } else {
                (c.rotated(1), 3)
            };
            crossings.push(rot);
            shift.push(s);
        }
        let heads = self
            .heads
            .iter()
            .map(|(&e, &h)| {
                (
                    e,
                    Slot {
                        crossing: h.crossing,
                        pos: (h.pos + shift[h.crossing as usize]) % 4,
                    },
                )
            })
            .collect();
        Self::from_parts_with_heads(crossings, self.free_loops.clone(), self.basepoints.clone(), heads)
            .expect("mirror of a valid diagram")
    }

    /// Validate a tangle region and return the interior slot of each boundary edge.
    fn tangle_slots(&self, t: &TangleRegion) -> Result<[Slot; 4]> {
        if let Some(&c) = t.interior_crossings.iter().find(|&&c| c >= self.crossings.len()) {
            return Err(Error::InvalidTangle(format!("crossing index {c} out of range")));
        }
        let distinct: BTreeSet<Edge> = t.boundary_edges.iter().copied().collect();
        if distinct.len() != 4 {
            return Err(Error::InvalidTangle("boundary edges must be 4 distinct edges".into()));
        }
        let inside = |s: Slot| t.interior_crossings.contains(&(s.crossing as usize));
        let crossing_edges: BTreeSet<Edge> = self
            .ends
            .iter()
            .filter(|(_, &[s0, s1])| inside(s0) != inside(s1))
            .map(|(&e, _)| e)
            .collect();
        if crossing_edges != distinct {
            return Err(Error::InvalidTangle(format!(
                "edges leaving the region are {crossing_edges:?}, not the declared boundary {:?}",
                t.boundary_edges
            )));
        }
        Ok(t.boundary_edges.map(|e| {
            let [s0, s1] = self.ends[&e];
            if inside(s0) {
                s0
            } else {
                s1
            }
        }))
    }

    /// Conway mutation: rotate the tangle inside `t` by 180° about `axis`.
    pub fn mutate(&self, t: &TangleRegion, axis: Axis) -> Result<PlanarDiagram> {
        if t.interior_crossings.is_empty() {
            let boundary_ok = t.boundary_edges.iter().all(|&e| self.has_edge(e));
            if !boundary_ok {
                return Err(Error::InvalidTangle("boundary edge not in diagram".into()));
            }
            return Ok(self.clone());
        }
        let inner = self.tangle_slots(t)?;
        let sigma = axis.permutation();
        let mut crossings = self.crossings.clone();
        for (i, s) in inner.iter().enumerate() {
            crossings[s.crossing as usize].0[s.pos as usize] = t.boundary_edges[sigma[i]];
        }
        if axis.flips() {
            for &ci in &t.interior_crossings {
                let [a, b, c, d] = crossings[ci].0;
                crossings[ci] = Crossing([b, a, d, c]);
            }
        }
        let ends = edge_ends(&crossings)?;
        let old_heads = &self.heads;
        let interior = &t.interior_crossings;
        let score = |e: Edge, h: Slot| -> i64 {
            let mut s = match h.pos {
                0 => 1,
                2 => -1,
                _ => 0,
            };
            if !interior.contains(&(h.crossing as usize)) && old_heads.get(&e) == Some(&h) {
                s += 1000;
            }
            s
        };
        let heads = orient(&crossings, &ends, score);
        Self::from_parts_with_heads(
            crossings,
            self.free_loops.clone(),
            self.basepoints.clone(),
            heads,
        )
    }

    /// Remove crossing `c` by its 0- or 1-smoothing. Joined edges keep the
    /// smallest label; arcs closing up become free loops.
    pub fn smoothing(&self, c: usize, one: bool) -> Result<PlanarDiagram> {
        if c >= self.crossings.len() {
            return Err(Error::InvalidDiagram(format!("no crossing {c}")));
        }
        let labels = self.all_edges();
        let idx: HashMap<Edge, usize> = labels.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut uf = UnionFind::new(labels.len());
        let [a, b, cc, d] = self.crossings[c].0;
        let pairs = if one { [(a, d), (b, cc)] } else { [(a, b), (cc, d)] };
        for (x, y) in pairs {
            uf.union(idx[&x], idx[&y]);
        }
        let rep = |uf: &mut UnionFind, e: Edge| labels[uf.find(idx[&e])];
        let mut crossings = Vec::with_capacity(self.crossings.len() - 1);
        let mut old_index = Vec::new();
        for (ci, x) in self.crossings.iter().enumerate() {
            if ci != c {
                crossings.push(Crossing(x.0.map(|e| rep(&mut uf, e))));
                old_index.push(ci);
            }
        }
        let used: BTreeSet<Edge> = crossings.iter().flat_map(|x| x.0).collect();
        let mut free_loops = self.free_loops.clone();
        let mut closed: Vec<Edge> = [a, b, cc, d]
            .iter()
            .map(|&e| rep(&mut uf, e))
            .filter(|e| !used.contains(e))
            .collect();
        closed.sort_unstable();
        closed.dedup();
        free_loops.extend(closed);
        let basepoints = self.basepoints.iter().map(|&e| rep(&mut uf, e)).collect();

        let ends = edge_ends(&crossings)?;
        // prefer the old heads of any edge merged into a class
        let mut preferred: HashMap<Slot, ()> = HashMap::new();
        for (new_ci, &old_ci) in old_index.iter().enumerate() {
            for pos in 0..4 {
                let e = self.crossings[old_ci].0[pos];
                if self.heads.get(&e) == Some(&Slot::new(old_ci, pos)) {
                    preferred.insert(Slot::new(new_ci, pos), ());
                }
            }
        }
        let heads = orient(&crossings, &ends, |_, h| {
            i64::from(preferred.contains_key(&h)) * 10 + i64::from(h.pos == 0) - i64::from(h.pos == 2)
        });
        Self::from_parts_with_heads(crossings, free_loops, basepoints, heads)
    }
}

/// Dense edge indices for fast per-vertex circle computations.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    /// Number of crossing edges; loops occupy indices `n_edges..`.
    pub n_edges: usize,
    pub labels: Vec<Edge>,
    pub index: HashMap<Edge, usize>,
    pub crossings: Vec<[u32; 4]>,
}

impl Layout {
    /// Circle index of every edge at `mask`, circles numbered by minimal
    /// label with free loops last.
    pub fn circles(&self, mask: u64) -> (Vec<u16>, usize) {
        let n = self.labels.len();
        let mut uf = UnionFind::new(self.n_edges.max(1));
        for (ci, c) in self.crossings.iter().enumerate() {
            let [a, b, cc, d] = c.map(|x| x as usize);
            if mask >> ci & 1 == 0 {
                uf.union(a, b);
                uf.union(cc, d);
            } else {
                uf.union(a, d);
                uf.union(b, cc);
            }
        }
        let mut assign = vec![0u16; n];
        let mut root_id: HashMap<usize, u16> = HashMap::new();
        let mut next = 0u16;
        // labels are ascending among crossing edges, so first appearance orders by minimum
        for (k, slot) in assign.iter_mut().enumerate().take(self.n_edges) {
            let r = uf.find(k);
            *slot = *root_id.entry(r).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
        for slot in assign.iter_mut().skip(self.n_edges) {
            *slot = next;
            next += 1;
        }
        (assign, next as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn trefoil() -> PlanarDiagram {
        parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap()
    }

    fn figure_eight() -> PlanarDiagram {
        parse_pd("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)").unwrap()
    }

    #[test]
    fn parse_examples() {
        let e = parse_pd("").unwrap();
        assert_eq!((e.crossing_count(), e.free_loops().len()), (0, 0));

        let u = parse_pd("O(1)").unwrap();
        assert_eq!((u.crossing_count(), u.free_loops().len()), (0, 1));

        let t = trefoil();
        assert_eq!((t.crossing_count(), t.edge_count()), (3, 6));

        let bracketed = parse_pd("PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]").unwrap();
        assert_eq!(bracketed, t);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_pd("X(1,2,3)"), Err(Error::Parse(_))));
        assert!(matches!(parse_pd("Y(1)"), Err(Error::Parse(_))));
        assert!(matches!(parse_pd("X(1,2,3,4)"), Err(Error::InvalidDiagram(_))));
        assert!(matches!(parse_pd("X(1,1,2,2) O(2)"), Err(Error::InvalidDiagram(_))));
        assert!(matches!(parse_pd("X(1,a,2,2)"), Err(Error::Parse(_))));
    }

    #[test]
    fn trefoil_signs_and_resolutions() {
        let t = trefoil();
        // the table trefoil is left-handed
        assert_eq!(t.signed_counts(), (0, 3));
        assert_eq!(t.resolve(&[false; 3]).unwrap().circle_count(), 3);
        assert_eq!(t.resolve(&[true; 3]).unwrap().circle_count(), 2);
        assert!(matches!(
            t.resolve(&[true; 2]),
            Err(Error::ResolutionLength { expected: 3, found: 2 })
        ));
        let u = PlanarDiagram::unknot();
        assert_eq!(u.resolve(&[]).unwrap().circle_count(), 1);
    }

    #[test]
    fn kink_signs() {
        let pos = parse_pd("X(1,1,2,2)").unwrap();
        assert_eq!(pos.signed_counts(), (1, 0));
        let neg = parse_pd("X(1,2,2,1)").unwrap();
        assert_eq!(neg.signed_counts(), (0, 1));
    }

    #[test]
    fn figure_eight_is_amphichiral_in_counts() {
        let f = figure_eight();
        assert_eq!(f.signed_counts(), (2, 2));
        assert_eq!(f.component_count(), 1);
    }

    #[test]
    fn cyclic_order_of_circles() {
        let t = trefoil();
        let r = t.resolve(&[true; 3]).unwrap();
        assert_eq!(r.circles, vec![vec![1, 3, 5], vec![2, 4, 6]]);
        let r0 = t.resolve(&[false; 3]).unwrap();
        assert_eq!(r0.circles, vec![vec![1, 4], vec![2, 5], vec![3, 6]]);
    }

    #[test]
    fn flipping_one_crossing_changes_circle_count_by_one() {
        let f = figure_eight();
        for mask in 0u32..16 {
            let v: Vec<bool> = (0..4).map(|i| mask >> i & 1 == 1).collect();
            let n = f.resolve(&v).unwrap().circle_count() as i64;
            for i in 0..4 {
                let mut w = v.clone();
                w[i] = !w[i];
                let m = f.resolve(&w).unwrap().circle_count() as i64;
                assert_eq!((n - m).abs(), 1);
            }
        }
    }

    #[test]
    fn disjoint_union_examples() {
        let u = PlanarDiagram::unknot();
        let uu = u.disjoint_union(&u);
        assert_eq!(uu.free_loops(), &[1, 2]);
        let t = trefoil();
        assert_eq!(t.disjoint_union(&PlanarDiagram::empty()), t);
        let tt = t.disjoint_union(&t);
        assert_eq!((tt.crossing_count(), tt.edge_count()), (6, 12));
        assert_eq!(tt.signed_counts(), (0, 6));
    }

    #[test]
    fn connected_sum_examples() {
        let u = PlanarDiagram::unknot();
        let uu = u.connected_sum(1, &u, 1).unwrap();
        assert_eq!(uu.component_count(), 1);
        assert_eq!(uu.crossing_count(), 0);

        let t = trefoil();
        let tu = t.connected_sum(1, &u, 1).unwrap();
        assert_eq!(tu.crossings(), t.crossings());

        let tt = t.connected_sum(1, &t, 3).unwrap();
        assert_eq!(tt.crossing_count(), 6);
        assert_eq!(tt.component_count(), 1);
        assert_eq!(tt.signed_counts(), (0, 6));

        assert!(matches!(t.connected_sum(99, &u, 1), Err(Error::UnknownEdge(99))));
    }

    #[test]
    fn mirror_examples() {
        let t = trefoil();
        let m = t.mirror();
        assert_eq!(m.signed_counts(), (3, 0));
        assert_eq!(m.mirror(), t);
        assert_eq!(PlanarDiagram::unknot().mirror(), PlanarDiagram::unknot());
        let f = figure_eight();
        assert_eq!(f.mirror().mirror(), f);
    }

    #[test]
    fn smoothing_matches_resolution() {
        let t = trefoil();
        let d0 = t.smoothing(0, false).unwrap();
        assert_eq!(d0.crossing_count(), 2);
        // remaining smoothings at 00 should reproduce the circles of 000
        let r = d0.resolve(&[false, false]).unwrap();
        assert_eq!(r.circle_count(), 3);
        let d1 = t.smoothing(0, true).unwrap();
        assert_eq!(d1.resolve(&[true, true]).unwrap().circle_count(), 2);
    }

    #[test]
    fn json_roundtrip_keeps_orientation() {
        let f = figure_eight().with_basepoints([2, 5]).unwrap();
        let back = PlanarDiagram::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn explicit_orientation_reverses_component() {
        let t = trefoil();
        let rev = PlanarDiagram::with_orientation(
            t.crossings().to_vec(),
            vec![],
            &[vec![6, 5, 4, 3, 2, 1]],
        )
        .unwrap();
        // reversing a knot keeps every sign
        assert_eq!(rev.signed_counts(), (0, 3));
        assert_eq!(rev.crossing_count(), 3);
    }

    #[test]
    fn tangle_validation() {
        let f = figure_eight();
        let bad = TangleRegion::new([1, 2, 3, 4], [0]);
        assert!(matches!(f.mutate(&bad, Axis::Z), Err(Error::InvalidTangle(_))));
        let out_of_range = TangleRegion::new([1, 2, 3, 4], [9]);
        assert!(f.mutate(&out_of_range, Axis::Z).is_err());
    }

    #[test]
    fn single_crossing_tangle_mutation_is_involutive() {
        let f = figure_eight();
        // crossing 0 = X(4,2,5,1): its four edges leave it
        let t = TangleRegion::new([4, 2, 5, 1], [0]);
        for axis in Axis::ALL {
            let m = f.mutate(&t, axis).unwrap();
            assert_eq!(m.crossing_count(), 4);
            let back = m.mutate(&t, axis).unwrap();
            assert_eq!(back.crossings(), f.crossings(), "axis {axis}");
        }
    }

    #[test]
    fn empty_tangle_mutation_is_identity() {
        let t = trefoil();
        let region = TangleRegion::new([1, 2, 3, 4], []);
        assert_eq!(t.mutate(&region, Axis::Y).unwrap(), t);
    }
}
