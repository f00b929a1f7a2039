//! The cube of resolutions: circles at every vertex and the merge/split
//! structure of every edge.

use rayon::prelude::*;

use crate::algebra::FrobeniusAlgebraSpec;
use crate::complex::LabeledGenerator;
use crate::diagram::{Edge, Layout, PlanarDiagram};
use crate::error::{Error, Result};

/// How the circles change along the cube edge that flips one crossing from 0 to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeEdge {
    /// Circles `a` and `b` of the source merge into circle `into` of the target.
    Merge { a: usize, b: usize, into: usize },
    /// Circle `from` splits into circles `a` and `b` of the target.
    Split { from: usize, a: usize, b: usize },
}

#[derive(Clone, Debug)]
pub struct ResolutionCube {
    n: usize,
    layout: Layout,
    /// per vertex: circle of every edge (dense edge indices)
    assign: Vec<Vec<u16>>,
    /// per vertex: one representative edge per circle
    reps: Vec<Vec<u16>>,
    offsets: Vec<u32>,
    n_plus: i32,
    n_minus: i32,
}

/// Position of circle `c`'s bit in a label word for a vertex with `n` circles.
#[inline]
pub(crate) fn bit(n: usize, c: usize) -> usize {
    n - 1 - c
}

#[inline]
pub(crate) fn get_label(labels: u32, n: usize, c: usize) -> u8 {
    (labels >> bit(n, c) & 1) as u8
}

impl ResolutionCube {
    pub fn new(d: &PlanarDiagram, cap: usize) -> Result<Self> {
        let n = d.crossing_count();
        if n > cap || n > 30 {
            return Err(Error::CrossingCap {
                crossings: n,
                cap: cap.min(30),
            });
        }
        let layout = d.layout();
        let per_vertex: Vec<(Vec<u16>, usize)> = (0..1u64 << n)
            .into_par_iter()
            .map(|v| layout.circles(v))
            .collect();
        let mut assign = Vec::with_capacity(per_vertex.len());
        let mut reps = Vec::with_capacity(per_vertex.len());
        let mut offsets = Vec::with_capacity(per_vertex.len() + 1);
        let mut total: u64 = 0;
        for (a, k) in per_vertex {
            let mut r = vec![u16::MAX; k];
            for (e, &c) in a.iter().enumerate() {
                if r[c as usize] == u16::MAX {
                    r[c as usize] = e as u16;
                }
            }
            offsets.push(total as u32);
            total += 1u64 << k;
            if total > u32::MAX as u64 {
                return Err(Error::CrossingCap { crossings: n, cap });
            }
            assign.push(a);
            reps.push(r);
        }
        offsets.push(total as u32);
        let (p, m) = d.signed_counts();
        Ok(ResolutionCube {
            n,
            layout,
            assign,
            reps,
            offsets,
            n_plus: p as i32,
            n_minus: m as i32,
        })
    }

    pub fn crossing_count(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    pub fn n_plus(&self) -> i32 {
        self.n_plus
    }

    pub fn n_minus(&self) -> i32 {
        self.n_minus
    }

    pub fn circle_count(&self, v: u32) -> usize {
        self.reps[v as usize].len()
    }

    /// Circle containing edge label `e` at vertex `v`.
    pub fn circle_of_edge(&self, v: u32, e: Edge) -> Option<usize> {
        self.layout
            .index
            .get(&e)
            .map(|&k| self.assign[v as usize][k] as usize)
    }

    /// Edge labels on circle `c` at vertex `v`.
    pub fn circle_edges(&self, v: u32, c: usize) -> Vec<Edge> {
        self.assign[v as usize]
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x as usize == c)
            .map(|(k, _)| self.layout.labels[k])
            .collect()
    }

    pub fn generator_count(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    pub fn offset(&self, v: u32) -> u32 {
        self.offsets[v as usize]
    }

    pub fn index(&self, v: u32, labels: u32) -> u32 {
        self.offsets[v as usize] + labels
    }

    pub fn generator(&self, g: u32) -> LabeledGenerator {
        let v = self.offsets.partition_point(|&o| o <= g) - 1;
        LabeledGenerator {
            vertex: v as u32,
            labels: g - self.offsets[v],
            n_crossings: self.n as u8,
            n_circles: self.circle_count(v as u32) as u8,
        }
    }

    /// `(h, q)` with `h = |v| − n₋` and `q = #1 − #X + |v| + n₊ − 2n₋`.
    pub fn grading(&self, v: u32, labels: u32) -> (i32, i32) {
        let w = v.count_ones() as i32;
        let k = self.circle_count(v) as i32;
        let x = labels.count_ones() as i32;
        let deg = k - 2 * x;
        (w - self.n_minus, deg + w + self.n_plus - 2 * self.n_minus)
    }

    /// Target circle of every source circle along the edge flipping crossing `i` at `v`.
    pub fn circle_map(&self, v: u32, i: usize) -> Vec<usize> {
        let w = (v | 1 << i) as usize;
        self.reps[v as usize]
            .iter()
            .map(|&e| self.assign[w][e as usize] as usize)
            .collect()
    }

    pub fn edge(&self, v: u32, i: usize) -> CubeEdge {
        debug_assert_eq!(v >> i & 1, 0);
        let w = (v | 1 << i) as usize;
        let [a, b, c, _] = self.layout.crossings[i].map(|x| x as usize);
        let av = &self.assign[v as usize];
        let aw = &self.assign[w];
        if self.reps[w].len() < self.reps[v as usize].len() {
            CubeEdge::Merge {
                a: av[a] as usize,
                b: av[c] as usize,
                into: aw[a] as usize,
            }
        } else {
            CubeEdge::Split {
                from: av[a] as usize,
                a: aw[a] as usize,
                b: aw[b] as usize,
            }
        }
    }

    /// Append the target labels of the edge map at crossing `i` applied to
    /// `labels` at vertex `v`.
    pub fn edge_terms(&self, alg: &FrobeniusAlgebraSpec, v: u32, i: usize, labels: u32, out: &mut Vec<u32>) {
        let w = v | 1 << i;
        let nv = self.circle_count(v);
        let nw = self.circle_count(w);
        let cmap = self.circle_map(v, i);
        let edge = self.edge(v, i);
        let mut base = 0u32;
        for (c, &t) in cmap.iter().enumerate() {
            let involved = match edge {
                CubeEdge::Merge { a, b, .. } => c == a || c == b,
                CubeEdge::Split { from, .. } => c == from,
            };
            if !involved && get_label(labels, nv, c) == 1 {
                base |= 1 << bit(nw, t);
            }
        }
        match edge {
            CubeEdge::Merge { a, b, into } => {
                let (x, y) = (get_label(labels, nv, a), get_label(labels, nv, b));
                for z in alg.mult_terms(x, y) {
                    out.push(base | (z as u32) << bit(nw, into));
                }
            }
            CubeEdge::Split { from, a, b } => {
                let x = get_label(labels, nv, from);
                for (y, z) in alg.comult_terms(x) {
                    out.push(base | (y as u32) << bit(nw, a) | (z as u32) << bit(nw, b));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn trefoil_vertex_circles() {
        let t = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let cube = ResolutionCube::new(&t, 16).unwrap();
        let counts: Vec<usize> = (0..8).map(|v| cube.circle_count(v)).collect();
        assert_eq!(counts, vec![3, 2, 2, 1, 2, 1, 1, 2]);
        // 2^3 + 3·2^2 + 3·2^1 + 2^2
        assert_eq!(cube.generator_count(), 8 + 12 + 6 + 4);
    }

    #[test]
    fn cap_is_enforced() {
        let t = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        assert!(matches!(
            ResolutionCube::new(&t, 2),
            Err(Error::CrossingCap { crossings: 3, cap: 2 })
        ));
    }

    #[test]
    fn every_edge_merges_or_splits() {
        let f = parse_pd("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)").unwrap();
        let cube = ResolutionCube::new(&f, 16).unwrap();
        for v in 0..16u32 {
            for i in (0..4).filter(|&i| v >> i & 1 == 0) {
                let (nv, nw) = (cube.circle_count(v), cube.circle_count(v | 1 << i));
                match cube.edge(v, i) {
                    CubeEdge::Merge { a, b, into } => {
                        assert_eq!(nw + 1, nv);
                        assert!(a != b && into < nw);
                    }
                    CubeEdge::Split { from, a, b } => {
                        assert_eq!(nw, nv + 1);
                        assert!(a != b && from < nv);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_lookup_roundtrip() {
        let t = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let cube = ResolutionCube::new(&t, 16).unwrap();
        for g in 0..cube.generator_count() as u32 {
            let lg = cube.generator(g);
            assert_eq!(cube.index(lg.vertex, lg.labels), g);
        }
    }
}
