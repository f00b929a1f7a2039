//! Filtered, bigraded chain complexes over GF(2).
//!
//! The differential raises the homological grading; it is stored as a sparse
//! square matrix whose column `j` is `d(e_j)`. Homology is computed by a
//! persistence-style column reduction in an order compatible with the
//! filtration, which yields in one pass the homology dimensions, a
//! deterministic basis of representatives, and the filtration pairs that
//! determine every spectral-sequence page.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::sparse::sym_diff;
use crate::algebra::{BitVec, F2Matrix, SparseMatrix};
use crate::diagram::UnionFind;
use crate::error::{Error, Result};
use crate::poly::LaurentPoly;

/// A resolution vertex together with one algebra label per circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledGenerator {
    /// Bit `i` is the smoothing at crossing `i`.
    pub vertex: u32,
    /// Circle 0 is the most significant of the `n_circles` low bits; a set bit is `X`.
    pub labels: u32,
    pub n_crossings: u8,
    pub n_circles: u8,
}

impl LabeledGenerator {
    /// Label of circle `c` (0 for `1`, 1 for `X`).
    pub fn label(&self, c: usize) -> u8 {
        ((self.labels >> (self.n_circles as usize - 1 - c)) & 1) as u8
    }

    pub fn weight(&self) -> u32 {
        self.vertex.count_ones()
    }

    pub fn x_count(&self) -> u32 {
        self.labels.count_ones()
    }
}

impl fmt::Display for LabeledGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_crossings {
            f.write_str(if self.vertex >> i & 1 == 1 { "1" } else { "0" })?;
        }
        f.write_str(":")?;
        for c in 0..self.n_circles as usize {
            f.write_str(if self.label(c) == 1 { "X" } else { "1" })?;
        }
        Ok(())
    }
}

/// Dimensions indexed by `(h, q)`; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BigradedDims {
    dims: BTreeMap<(i32, i32), usize>,
}

#[derive(Serialize, Deserialize)]
struct DimsEntry {
    h: i32,
    q: i32,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct DimsDoc {
    entries: Vec<DimsEntry>,
    total: usize,
}

impl Serialize for BigradedDims {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DimsDoc {
            entries: self
                .iter()
                .map(|((h, q), dim)| DimsEntry { h, q, dim })
                .collect(),
            total: self.total(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BigradedDims {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DimsDoc::deserialize(d)?;
        Ok(BigradedDims::from_entries(doc.entries.into_iter().map(|e| ((e.h, e.q), e.dim))))
    }
}

impl BigradedDims {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ((i32, i32), usize)>) -> Self {
        let mut out = Self::new();
        for ((h, q), n) in entries {
            out.add_at(h, q, n);
        }
        out
    }

    pub fn add_at(&mut self, h: i32, q: i32, n: usize) {
        if n > 0 {
            *self.dims.entry((h, q)).or_insert(0) += n;
        }
    }

    pub fn get(&self, h: i32, q: i32) -> usize {
        self.dims.get(&(h, q)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i32, i32), usize)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    pub fn shift(&self, dh: i32, dq: i32) -> Self {
        Self::from_entries(self.iter().map(|((h, q), n)| ((h + dh, q + dq), n)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::from_entries(self.iter().chain(other.iter()))
    }

    /// Graded tensor product: gradings add, dimensions multiply.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for ((h1, q1), a) in self.iter() {
            for ((h2, q2), b) in other.iter() {
                out.add_at(h1 + h2, q1 + q2, a * b);
            }
        }
        out
    }

    /// Dimensions summed over `q`.
    pub fn by_h(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for ((h, _), n) in self.iter() {
            *out.entry(h).or_insert(0) += n;
        }
        out
    }

    /// `Σ (−1)^h dim · q^q`.
    pub fn euler(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for ((h, q), n) in self.iter() {
            let sign = if h.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(sign * n as i64, q);
        }
        p
    }

    /// Poincaré polynomial in `t` (homological) and `q`.
    pub fn poincare_string(&self) -> String {
        if self.is_empty() {
            return "0".into();
        }
        self.iter()
            .map(|((h, q), n)| {
                let c = if n == 1 { String::new() } else { n.to_string() };
                format!("{c}t^{h}q^{q}")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for BigradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.iter().map(|((h, q), n)| format!("({h},{q}):{n}")).collect();
        write!(f, "{{{}}} total {}", body.join(", "), self.total())
    }
}

/// A linear form `a·h + b·q` that the differential shifts by a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GradingForm {
    pub h_coeff: i32,
    pub q_coeff: i32,
    pub shift: i32,
}

impl GradingForm {
    pub fn value(&self, h: i32, q: i32) -> i32 {
        self.h_coeff * h + self.q_coeff * q
    }
}

const FORM_CANDIDATES: [(i32, i32); 4] = [(1, 0), (-2, 1), (0, 1), (-1, 1)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    h: Vec<i32>,
    q: Vec<i32>,
    filt: Vec<i32>,
    d: SparseMatrix,
    gens: Option<Arc<Vec<LabeledGenerator>>>,
}

impl FilteredComplex {
    /// Validates lengths, `d² = 0` and that `d` never lowers the filtration.
    pub fn new(h: Vec<i32>, q: Vec<i32>, filt: Vec<i32>, d: SparseMatrix) -> Result<Self> {
        let c = Self::from_parts(h, q, filt, d)?;
        c.check_d_squared()?;
        c.check_filtration()?;
        Ok(c)
    }

    pub(crate) fn from_parts(h: Vec<i32>, q: Vec<i32>, filt: Vec<i32>, d: SparseMatrix) -> Result<Self> {
        let n = h.len();
        if q.len() != n || filt.len() != n || d.n_rows() != n || d.n_cols() != n {
            return Err(Error::Dimension(format!(
                "complex with {n} generators has {} q-gradings, {} filtration values and a {}x{} differential",
                q.len(),
                filt.len(),
                d.n_rows(),
                d.n_cols()
            )));
        }
        Ok(FilteredComplex {
            h,
            q,
            filt,
            d,
            gens: None,
        })
    }

    /// Zero differential with the given dimensions; filtration equals `h`.
    pub fn from_dims(dims: &BigradedDims) -> Self {
        let mut h = Vec::new();
        let mut q = Vec::new();
        for ((hh, qq), n) in dims.iter() {
            h.extend(std::iter::repeat_n(hh, n));
            q.extend(std::iter::repeat_n(qq, n));
        }
        let n = h.len();
        FilteredComplex {
            filt: h.clone(),
            h,
            q,
            d: SparseMatrix::zeros(n, n),
            gens: None,
        }
    }

    pub fn with_generators(mut self, gens: Vec<LabeledGenerator>) -> Self {
        assert_eq!(gens.len(), self.len());
        self.gens = Some(Arc::new(gens));
        self
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self, i: usize) -> i32 {
        self.h[i]
    }

    pub fn q(&self, i: usize) -> i32 {
        self.q[i]
    }

    pub fn filt(&self, i: usize) -> i32 {
        self.filt[i]
    }

    pub fn h_gradings(&self) -> &[i32] {
        &self.h
    }

    pub fn q_gradings(&self) -> &[i32] {
        &self.q
    }

    pub fn filtration(&self) -> &[i32] {
        &self.filt
    }

    pub fn differential(&self) -> &SparseMatrix {
        &self.d
    }

    pub fn generators(&self) -> Option<&[LabeledGenerator]> {
        self.gens.as_deref().map(Vec::as_slice)
    }

    pub fn generator_name(&self, i: usize) -> String {
        match &self.gens {
            Some(g) => g[i].to_string(),
            None => format!("#{i}(h={},q={})", self.h[i], self.q[i]),
        }
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for j in 0..self.len() {
            let dd = self.d.apply(self.d.col(j));
            if let Some(&i) = dd.first() {
                return Err(Error::DSquaredNonzero {
                    source_gen: self.generator_name(j),
                    target_gen: self.generator_name(i as usize),
                });
            }
        }
        Ok(())
    }

    pub fn check_filtration(&self) -> Result<()> {
        for (i, j) in self.d.entries() {
            if self.filt[i] < self.filt[j] {
                return Err(Error::FiltrationViolated(format!(
                    "d({}) has a term {} at lower filtration ({} < {})",
                    self.generator_name(j),
                    self.generator_name(i),
                    self.filt[i],
                    self.filt[j]
                )));
            }
        }
        Ok(())
    }

    /// Whether `d` raises `h` by exactly one and preserves `q`.
    pub fn is_bigraded(&self) -> bool {
        self.d
            .entries()
            .all(|(i, j)| self.h[i] == self.h[j] + 1 && self.q[i] == self.q[j])
    }

    /// First linear form among `h`, `q−2h`, `q`, `q−h` that `d` shifts by one
    /// nonzero constant.
    pub fn grading_form(&self) -> Option<GradingForm> {
        FORM_CANDIDATES.iter().find_map(|&(a, b)| {
            let mut shift = None;
            for (i, j) in self.d.entries() {
                let s = a * (self.h[i] - self.h[j]) + b * (self.q[i] - self.q[j]);
                match shift {
                    None => shift = Some(s),
                    Some(t) if t != s => return None,
                    _ => {}
                }
            }
            match shift {
                None if (a, b) == (1, 0) => Some(GradingForm {
                    h_coeff: 1,
                    q_coeff: 0,
                    shift: 1,
                }),
                Some(s) if s != 0 => Some(GradingForm {
                    h_coeff: a,
                    q_coeff: b,
                    shift: s,
                }),
                _ => None,
            }
        })
    }

    pub fn chain_dims(&self) -> BigradedDims {
        BigradedDims::from_entries((0..self.len()).map(|i| ((self.h[i], self.q[i]), 1)))
    }

    pub fn euler(&self) -> LaurentPoly {
        self.chain_dims().euler()
    }

    pub fn shifted(&self, dh: i32, dq: i32, dfilt: i32) -> FilteredComplex {
        FilteredComplex {
            h: self.h.iter().map(|x| x + dh).collect(),
            q: self.q.iter().map(|x| x + dq).collect(),
            filt: self.filt.iter().map(|x| x + dfilt).collect(),
            d: self.d.clone(),
            gens: self.gens.clone(),
        }
    }

    /// Same complex with a different filtration.
    pub fn with_filtration(&self, filt: Vec<i32>) -> Result<FilteredComplex> {
        let mut c = Self::from_parts(self.h.clone(), self.q.clone(), filt, self.d.clone())?;
        c.gens = self.gens.clone();
        c.check_filtration()?;
        Ok(c)
    }

    /// The subcomplex spanned by `subset` (global indices, any order). Fails
    /// if `d` leaves the span.
    pub fn restrict(&self, subset: &[u32]) -> Result<FilteredComplex> {
        let mut pos = vec![u32::MAX; self.len()];
        for (k, &g) in subset.iter().enumerate() {
            pos[g as usize] = k as u32;
        }
        let mut cols = Vec::with_capacity(subset.len());
        for &g in subset {
            let mut col = Vec::with_capacity(self.d.col(g as usize).len());
            for &i in self.d.col(g as usize) {
                let p = pos[i as usize];
                if p == u32::MAX {
                    return Err(Error::NotChainMap(format!(
                        "d({}) leaves the proposed subcomplex through {}",
                        self.generator_name(g as usize),
                        self.generator_name(i as usize)
                    )));
                }
                col.push(p);
            }
            cols.push(col);
        }
        Ok(self.select(subset, SparseMatrix::from_columns(subset.len(), cols)))
    }

    /// The quotient by the subcomplex spanned by the complement of `keep`.
    pub fn quotient_onto(&self, keep: &[u32]) -> FilteredComplex {
        let mut pos = vec![u32::MAX; self.len()];
        for (k, &g) in keep.iter().enumerate() {
            pos[g as usize] = k as u32;
        }
        let cols = keep
            .iter()
            .map(|&g| {
                self.d
                    .col(g as usize)
                    .iter()
                    .filter_map(|&i| (pos[i as usize] != u32::MAX).then_some(pos[i as usize]))
                    .collect()
            })
            .collect();
        self.select(keep, SparseMatrix::from_columns(keep.len(), cols))
    }

    fn select(&self, subset: &[u32], d: SparseMatrix) -> FilteredComplex {
        let pick = |v: &[i32]| subset.iter().map(|&g| v[g as usize]).collect::<Vec<_>>();
        FilteredComplex {
            h: pick(&self.h),
            q: pick(&self.q),
            filt: pick(&self.filt),
            d,
            gens: self
                .gens
                .as_ref()
                .map(|gs| Arc::new(subset.iter().map(|&g| gs[g as usize]).collect())),
        }
    }

    pub fn direct_sum(&self, other: &FilteredComplex) -> FilteredComplex {
        let n = self.len();
        let mut cols: Vec<Vec<u32>> = self.d.columns().to_vec();
        cols.extend(
            other
                .d
                .columns()
                .iter()
                .map(|c| c.iter().map(|&i| i + n as u32).collect()),
        );
        let cat = |a: &[i32], b: &[i32]| [a, b].concat();
        FilteredComplex {
            h: cat(&self.h, &other.h),
            q: cat(&self.q, &other.q),
            filt: cat(&self.filt, &other.filt),
            d: SparseMatrix::from_columns(n + other.len(), cols),
            gens: None,
        }
    }

    /// Dimensions of the homology. For complexes whose differential does not
    /// preserve `q`, each class is placed at the `(h, q)` of the generator
    /// that survives the filtration reduction.
    pub fn homology(&self) -> Result<Homology> {
        let red = Reduction::compute(self, false)?;
        Ok(Homology {
            dims: red.essential_dims(self),
            basis: None,
        })
    }

    /// Homology together with a deterministic basis of representatives.
    pub fn homology_with_basis(self: &Arc<Self>) -> Result<Homology> {
        let red = Reduction::compute(self, true)?;
        let dims = red.essential_dims(self);
        Ok(Homology {
            dims,
            basis: Some(HomologyBasis::new(self.clone(), red)),
        })
    }

    pub fn reduction(&self) -> Result<Reduction> {
        Reduction::compute(self, false)
    }
}

/// Homology dimensions and, optionally, a basis of representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dims: BigradedDims,
    basis: Option<HomologyBasis>,
}

impl Homology {
    pub fn basis(&self) -> Option<&HomologyBasis> {
        self.basis.as_ref()
    }

    pub fn total(&self) -> usize {
        self.dims.total()
    }
}

const NONE: u32 = u32::MAX;

/// Column reduction of one connected block of the differential.
#[derive(Clone, Debug)]
struct Block {
    /// position → global generator
    gens: Vec<u32>,
    /// position → column whose lowest entry is this row
    pivot_of_row: Vec<u32>,
    /// reduced columns; empty for zero or cleared columns
    r: Vec<Vec<u32>>,
    /// reduction coefficients, present when representatives are tracked
    v: Vec<Vec<u32>>,
    cleared: Vec<bool>,
}

impl Block {
    fn is_essential(&self, p: usize) -> bool {
        !self.cleared[p] && self.r[p].is_empty() && self.pivot_of_row[p] == NONE
    }
}

/// Result of reducing a complex in filtration order.
#[derive(Clone, Debug)]
pub struct Reduction {
    blocks: Vec<Block>,
    /// global generator → (block, position)
    place: Vec<(u32, u32)>,
}

fn reduce_block(c: &FilteredComplex, mut gens: Vec<u32>, form: GradingForm, track: bool) -> Result<Block> {
    let dir = form.shift.signum();
    let g = |i: u32| form.value(c.h[i as usize], c.q[i as usize]);
    gens.sort_by_key(|&i| (-c.filt[i as usize], -dir * g(i), i));
    let n = gens.len();
    let pos: HashMap<u32, u32> = gens.iter().enumerate().map(|(p, &i)| (i, p as u32)).collect();

    // process grading levels in the direction of d so lows are known before clearing
    let mut levels: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
    for (p, &i) in gens.iter().enumerate() {
        levels.entry(dir * g(i)).or_default().push(p as u32);
    }

    let mut pivot_of_row = vec![NONE; n];
    let mut r: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut v: Vec<Vec<u32>> = if track { (0..n as u32).map(|p| vec![p]).collect() } else { Vec::new() };
    let mut cleared = vec![false; n];

    for (_, cols) in levels {
        for j in cols {
            let ju = j as usize;
            if pivot_of_row[ju] != NONE {
                cleared[ju] = true;
                continue;
            }
            let gj = gens[ju];
            let mut col: Vec<u32> = Vec::with_capacity(c.d.col(gj as usize).len());
            for &i in c.d.col(gj as usize) {
                let p = pos.get(&i).copied().ok_or_else(|| {
                    Error::Dimension("differential leaves its connected block".into())
                })?;
                if p >= j {
                    return Err(Error::FiltrationViolated(format!(
                        "d({}) reaches {} which does not precede it in filtration order",
                        c.generator_name(gj as usize),
                        c.generator_name(i as usize)
                    )));
                }
                col.push(p);
            }
            col.sort_unstable();
            while let Some(&low) = col.last() {
                let k = pivot_of_row[low as usize];
                if k == NONE {
                    break;
                }
                col = sym_diff(&col, &r[k as usize]);
                if track {
                    let vk = std::mem::take(&mut v[k as usize]);
                    v[ju] = sym_diff(&v[ju], &vk);
                    v[k as usize] = vk;
                }
            }
            if let Some(&low) = col.last() {
                pivot_of_row[low as usize] = j;
            }
            r[ju] = col;
        }
    }
    Ok(Block {
        gens,
        pivot_of_row,
        r,
        v,
        cleared,
    })
}

impl Reduction {
    pub fn compute(c: &FilteredComplex, track: bool) -> Result<Reduction> {
        let form = c.grading_form().ok_or(Error::NoCompatibleGrading)?;
        let n = c.len();
        let mut uf = UnionFind::new(n);
        for (i, j) in c.d.entries() {
            uf.union(i, j);
        }
        let mut block_of_root: HashMap<usize, usize> = HashMap::new();
        let mut members: Vec<Vec<u32>> = Vec::new();
        for i in 0..n {
            let r = uf.find(i);
            let b = *block_of_root.entry(r).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[b].push(i as u32);
        }
        let blocks: Vec<Block> = members
            .into_par_iter()
            .map(|m| reduce_block(c, m, form, track))
            .collect::<Result<_>>()?;
        let mut place = vec![(0, 0); n];
        for (b, blk) in blocks.iter().enumerate() {
            for (p, &g) in blk.gens.iter().enumerate() {
                place[g as usize] = (b as u32, p as u32);
            }
        }
        Ok(Reduction { blocks, place })
    }

    /// Generators that survive to the end, as global indices in ascending order.
    pub fn essential(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .blocks
            .iter()
            .flat_map(|b| (0..b.gens.len()).filter(|&p| b.is_essential(p)).map(|p| b.gens[p]))
            .collect();
        out.sort_unstable();
        out
    }

    /// Pairs `(born, killer)` of global generators: `killer`'s reduced
    /// boundary has lowest term at `born`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .blocks
            .iter()
            .flat_map(|b| {
                b.r.iter()
                    .enumerate()
                    .filter_map(|(j, col)| col.last().map(|&low| (b.gens[low as usize], b.gens[j])))
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn essential_dims(&self, c: &FilteredComplex) -> BigradedDims {
        BigradedDims::from_entries(
            self.essential()
                .into_iter()
                .map(|g| ((c.h[g as usize], c.q[g as usize]), 1)),
        )
    }

    /// Dimensions of page `r` of the spectral sequence of the filtration,
    /// each surviving generator placed at its own `(h, q)`. Page 0 is the
    /// associated graded complex.
    pub fn page_dims(&self, c: &FilteredComplex, r: i32) -> BigradedDims {
        let mut out = self.essential_dims(c);
        for (born, killer) in self.pairs() {
            let (b, k) = (born as usize, killer as usize);
            if c.filt[b] - c.filt[k] >= r {
                out.add_at(c.h[b], c.q[b], 1);
                out.add_at(c.h[k], c.q[k], 1);
            }
        }
        out
    }

    /// Largest filtration jump among the pairs (0 if none).
    pub fn max_gap(&self, c: &FilteredComplex) -> i32 {
        self.pairs()
            .into_iter()
            .map(|(b, k)| c.filt[b as usize] - c.filt[k as usize])
            .max()
            .unwrap_or(0)
    }
}

/// A basis of homology with representatives and a coordinate map.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    complex: Arc<FilteredComplex>,
    red: Reduction,
    /// global generators of the classes, sorted by (h, q, index)
    classes: Vec<u32>,
    class_of: HashMap<u32, usize>,
}

impl HomologyBasis {
    fn new(complex: Arc<FilteredComplex>, red: Reduction) -> Self {
        let mut classes = red.essential();
        classes.sort_by_key(|&g| (complex.h[g as usize], complex.q[g as usize], g));
        let class_of = classes.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        HomologyBasis {
            complex,
            red,
            classes,
            class_of,
        }
    }

    pub fn complex(&self) -> &Arc<FilteredComplex> {
        &self.complex
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn grading(&self, k: usize) -> (i32, i32) {
        let g = self.classes[k] as usize;
        (self.complex.h[g], self.complex.q[g])
    }

    /// Representative cycle of class `k` as sorted global indices.
    pub fn representative(&self, k: usize) -> Vec<u32> {
        let g = self.classes[k];
        let (b, p) = self.red.place[g as usize];
        let blk = &self.red.blocks[b as usize];
        let mut out: Vec<u32> = blk.v[p as usize].iter().map(|&x| blk.gens[x as usize]).collect();
        out.sort_unstable();
        out
    }

    /// Coordinates of the homology class of `cycle` (global indices).
    pub fn coordinates(&self, cycle: &[u32]) -> Result<BitVec> {
        let mut per_block: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &g in cycle {
            if g as usize >= self.complex.len() {
                return Err(Error::Dimension(format!("generator {g} out of range")));
            }
            let (b, p) = self.red.place[g as usize];
            per_block.entry(b).or_default().push(p);
        }
        let mut out = BitVec::zeros(self.dim());
        for (b, mut z) in per_block {
            crate::algebra::sparse::mod2_normalize(&mut z);
            let blk = &self.red.blocks[b as usize];
            while let Some(&low) = z.last() {
                let lu = low as usize;
                let k = blk.pivot_of_row[lu];
                if k != NONE {
                    z = sym_diff(&z, &blk.r[k as usize]);
                } else if blk.is_essential(lu) {
                    out.flip(self.class_of[&blk.gens[lu]]);
                    z = sym_diff(&z, &blk.v[lu]);
                } else {
                    return Err(Error::Verification(format!(
                        "chain with leading term {} is not a cycle",
                        self.complex.generator_name(blk.gens[lu] as usize)
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// A GF(2)-linear map between filtered complexes commuting with the differentials.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: Arc<FilteredComplex>,
    target: Arc<FilteredComplex>,
    matrix: SparseMatrix,
}

impl ChainMap {
    pub fn new(source: Arc<FilteredComplex>, target: Arc<FilteredComplex>, matrix: SparseMatrix) -> Result<Self> {
        let f = Self::new_unchecked(source, target, matrix)?;
        f.check()?;
        Ok(f)
    }

    /// Dimension checks only.
    pub fn new_unchecked(
        source: Arc<FilteredComplex>,
        target: Arc<FilteredComplex>,
        matrix: SparseMatrix,
    ) -> Result<Self> {
        if matrix.n_cols() != source.len() || matrix.n_rows() != target.len() {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{} between complexes of sizes {} and {}",
                matrix.n_rows(),
                matrix.n_cols(),
                source.len(),
                target.len()
            )));
        }
        Ok(ChainMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(c: Arc<FilteredComplex>) -> Self {
        let n = c.len();
        ChainMap {
            source: c.clone(),
            target: c,
            matrix: SparseMatrix::identity(n),
        }
    }

    pub fn source(&self) -> &Arc<FilteredComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FilteredComplex> {
        &self.target
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `d_target ∘ f = f ∘ d_source`
    pub fn check(&self) -> Result<()> {
        let lhs = self.target.d.compose(&self.matrix);
        let rhs = self.matrix.compose(&self.source.d);
        for j in 0..self.source.len() {
            if lhs.col(j) != rhs.col(j) {
                let diff = sym_diff(lhs.col(j), rhs.col(j));
                return Err(Error::NotChainMap(format!(
                    "d∘f and f∘d differ on {} at {}",
                    self.source.generator_name(j),
                    self.target.generator_name(diff[0] as usize)
                )));
            }
        }
        Ok(())
    }

    /// `(Δh, Δq)` shared by every nonzero entry, if any.
    pub fn bidegree(&self) -> Option<(i32, i32)> {
        let mut deg = None;
        for (i, j) in self.matrix.entries() {
            let dd = (self.target.h[i] - self.source.h[j], self.target.q[i] - self.source.q[j]);
            match deg {
                None => deg = Some(dd),
                Some(x) if x != dd => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        self.matrix.apply(v)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &ChainMap) -> Result<ChainMap> {
        if !Arc::ptr_eq(&rhs.target, &self.source) && *rhs.target != *self.source {
            return Err(Error::Dimension("composed maps do not share a complex".into()));
        }
        Ok(ChainMap {
            source: rhs.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.compose(&rhs.matrix),
        })
    }

    pub fn add(&self, rhs: &ChainMap) -> Result<ChainMap> {
        if self.matrix.n_rows() != rhs.matrix.n_rows() || self.matrix.n_cols() != rhs.matrix.n_cols() {
            return Err(Error::Dimension("summed maps have different shapes".into()));
        }
        Ok(ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&rhs.matrix),
        })
    }

    /// Matrix of the map on homology in the given bases (rows: target classes).
    pub fn induced_in(&self, src: &HomologyBasis, tgt: &HomologyBasis) -> Result<F2Matrix> {
        if src.complex.len() != self.source.len() || tgt.complex.len() != self.target.len() {
            return Err(Error::Dimension("homology bases do not match the map".into()));
        }
        let cols = (0..src.dim())
            .map(|k| tgt.coordinates(&self.apply(&src.representative(k))))
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(tgt.dim(), &cols))
    }

    /// Checks the chain-map condition, then computes the map on homology
    /// together with the bases used.
    pub fn induced(&self) -> Result<InducedMap> {
        self.check()?;
        let hs = self.source.homology_with_basis()?;
        let ht = if Arc::ptr_eq(&self.source, &self.target) {
            hs.clone()
        } else {
            self.target.homology_with_basis()?
        };
        let (bs, bt) = (hs.basis.unwrap(), ht.basis.unwrap());
        let matrix = self.induced_in(&bs, &bt)?;
        Ok(InducedMap {
            matrix,
            source: bs,
            target: bt,
        })
    }
}

/// A map on homology with the bases it is expressed in.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrix: F2Matrix,
    pub source: HomologyBasis,
    pub target: HomologyBasis,
}

impl InducedMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.matrix.n_rows() == self.matrix.n_cols() && self.rank() == self.matrix.n_rows()
    }
}

/// Mapping cone of `f`, placing a source generator of grading `(h, q)` at
/// `(h + Δh − 1, q + Δq)` so that the cone differential raises `h` by one.
/// `Δ` is the bidegree of `f`, or `(1, 0)` for the zero map.
pub fn cone(f: &ChainMap) -> Result<FilteredComplex> {
    let (dh, dq) = match f.bidegree() {
        Some(d) => d,
        None if f.is_zero() => (1, 0),
        None => {
            return Err(Error::NotChainMap("cone of a map without a single bidegree".into()));
        }
    };
    f.check()?;
    cone_shifted(f, dh - 1, dq)
}

/// Mapping cone with an explicit shift of the source gradings.
pub fn cone_shifted(f: &ChainMap, dh: i32, dq: i32) -> Result<FilteredComplex> {
    let (s, t) = (&*f.source, &*f.target);
    let n = s.len();
    let fshift = f
        .matrix
        .entries()
        .map(|(i, j)| t.filt[i] - s.filt[j])
        .min()
        .unwrap_or(0);
    let mut cols: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut c: Vec<u32> = s.d.col(j).to_vec();
            c.extend(f.matrix.col(j).iter().map(|&i| i + n as u32));
            c
        })
        .collect();
    cols.extend(t.d.columns().iter().map(|c| c.iter().map(|&i| i + n as u32).collect()));
    let h = s.h.iter().map(|x| x + dh).chain(t.h.iter().copied()).collect();
    let q = s.q.iter().map(|x| x + dq).chain(t.q.iter().copied()).collect();
    let filt = s.filt.iter().map(|x| x + fshift).chain(t.filt.iter().copied()).collect();
    let d = SparseMatrix::from_columns(n + t.len(), cols);
    FilteredComplex::new(h, q, filt, d)
}

/// Tensor product with generator `(i, j)` at index `i·|C'| + j`.
pub fn tensor(a: &FilteredComplex, b: &FilteredComplex) -> FilteredComplex {
    let (n, m) = (a.len(), b.len());
    let idx = |i: usize, j: usize| (i * m + j) as u32;
    let mut h = Vec::with_capacity(n * m);
    let mut q = Vec::with_capacity(n * m);
    let mut filt = Vec::with_capacity(n * m);
    let mut cols = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            h.push(a.h[i] + b.h[j]);
            q.push(a.q[i] + b.q[j]);
            filt.push(a.filt[i] + b.filt[j]);
            let mut c: Vec<u32> = a.d.col(i).iter().map(|&k| idx(k as usize, j)).collect();
            c.extend(b.d.col(j).iter().map(|&k| idx(i, k as usize)));
            cols.push(c);
        }
    }
    FilteredComplex {
        h,
        q,
        filt,
        d: SparseMatrix::from_columns(n * m, cols),
        gens: None,
    }
}

/// Exactness report for the long exact sequence of `cone(f)`.
#[derive(Clone, Debug, Serialize)]
pub struct LesReport {
    /// `(rank in, rank out, dim)` at `H(target)`, `H(cone)`, `H(source)`.
    pub spots: Vec<(usize, usize, usize)>,
    pub exact: bool,
}

/// Checks exactness of `H(C) → H(C') → H(cone f) → H(C) → H(C')` where
/// the last arrow is `f_*`, via `rank in + rank out = dim` at each spot.
pub fn les_exactness(f: &ChainMap) -> Result<LesReport> {
    let cone_c = Arc::new(cone(f)?);
    let n = f.source.len();
    let m = f.target.len();
    // inclusion of the target and projection onto the (shifted) source
    let incl = SparseMatrix::from_columns(n + m, (0..m as u32).map(|i| vec![i + n as u32]).collect());
    let mut proj_cols: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();
    proj_cols.extend(std::iter::repeat_n(Vec::new(), m));
    let proj = SparseMatrix::from_columns(n, proj_cols);

    // projection lowers h by one relative to the cone grading; compare as plain linear maps
    let src_shifted = Arc::new(f.source.shifted(
        f.bidegree().map_or(0, |d| d.0 - 1),
        f.bidegree().map_or(0, |d| d.1),
        0,
    ));
    let i_map = ChainMap::new(f.target.clone(), cone_c.clone(), incl)?;
    let p_map = ChainMap::new(cone_c.clone(), src_shifted.clone(), proj)?;
    let f_star = f.induced()?;
    let i_star = i_map.induced()?;
    let p_star = p_map.induced()?;
    let rf = f_star.rank();
    let ri = i_star.rank();
    let rp = p_star.rank();
    let spots = vec![
        (rf, ri, f_star.target.dim()),
        (ri, rp, i_star.target.dim()),
        (rp, rf, f_star.source.dim()),
    ];
    let exact = spots.iter().all(|&(a, b, d)| a + b == d);
    Ok(LesReport { spots, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term(h0: i32, q0: i32) -> FilteredComplex {
        // e0 → e1
        FilteredComplex::new(
            vec![h0, h0 + 1],
            vec![q0, q0],
            vec![h0, h0 + 1],
            SparseMatrix::from_columns(2, vec![vec![1], vec![]]),
        )
        .unwrap()
    }

    #[test]
    fn zero_differential_homology() {
        let dims = BigradedDims::from_entries([((0, 1), 1), ((0, -1), 1)]);
        let c = FilteredComplex::from_dims(&dims);
        assert_eq!(c.homology().unwrap().dims, dims);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let dims = BigradedDims::from_entries([((0, 1), 1), ((0, -1), 1), ((2, 5), 3)]);
        let c = Arc::new(FilteredComplex::from_dims(&dims));
        let id = ChainMap::identity(c);
        let k = cone(&id).unwrap();
        assert_eq!(k.homology().unwrap().total(), 0);
    }

    #[test]
    fn cone_of_zero_is_direct_sum() {
        let a = Arc::new(FilteredComplex::from_dims(&BigradedDims::from_entries([((0, 1), 1)])));
        let b = Arc::new(FilteredComplex::from_dims(&BigradedDims::from_entries([((0, 3), 2)])));
        let z = ChainMap::new(a, b, SparseMatrix::zeros(2, 1)).unwrap();
        let k = cone(&z).unwrap();
        assert_eq!(k.homology().unwrap().total(), 3);
    }

    #[test]
    fn d_squared_witness() {
        let d = SparseMatrix::from_columns(3, vec![vec![1], vec![2], vec![]]);
        let err = FilteredComplex::new(vec![0, 1, 2], vec![0; 3], vec![0, 1, 2], d).unwrap_err();
        assert!(matches!(err, Error::DSquaredNonzero { .. }));
    }

    #[test]
    fn filtration_violation() {
        let d = SparseMatrix::from_columns(2, vec![vec![1], vec![]]);
        let err = FilteredComplex::new(vec![0, 1], vec![0, 0], vec![1, 0], d).unwrap_err();
        assert!(matches!(err, Error::FiltrationViolated(_)));
    }

    #[test]
    fn acyclic_two_term() {
        let c = two_term(0, 0);
        assert_eq!(c.homology().unwrap().total(), 0);
        assert!(c.is_bigraded());
    }

    #[test]
    fn tensor_unit_and_dims() {
        let unit = FilteredComplex::from_dims(&BigradedDims::from_entries([((0, 0), 1)]));
        let c = FilteredComplex::from_dims(&BigradedDims::from_entries([((0, 1), 1), ((0, -1), 1)]));
        assert_eq!(tensor(&c, &unit).chain_dims(), c.chain_dims());
        let cc = tensor(&c, &c);
        assert_eq!(cc.homology().unwrap().total(), 4);
        let t = tensor(&two_term(0, 0), &c);
        assert_eq!(t.len(), 4);
        assert!(t.check_d_squared().is_ok());
        assert_eq!(t.homology().unwrap().total(), 0);
    }

    #[test]
    fn induced_identity_and_differential() {
        let dims = BigradedDims::from_entries([((0, 1), 1), ((0, -1), 1)]);
        let c = Arc::new(FilteredComplex::from_dims(&dims));
        let id = ChainMap::identity(c.clone()).induced().unwrap();
        assert_eq!(id.matrix, F2Matrix::identity(2));

        let k = Arc::new(two_term(0, 0).direct_sum(&FilteredComplex::from_dims(&dims)));
        let dmap = ChainMap::new_unchecked(k.clone(), k.clone(), k.differential().clone()).unwrap();
        let ind = dmap.induced().unwrap();
        assert!(ind.matrix.is_zero());
    }

    #[test]
    fn representatives_are_cycles_with_unit_coordinates() {
        // a small complex with nontrivial homology in two degrees
        let d = SparseMatrix::from_columns(5, vec![vec![2, 3], vec![3, 4], vec![], vec![], vec![]]);
        let c = Arc::new(FilteredComplex::new(vec![0, 0, 1, 1, 1], vec![0; 5], vec![0, 0, 1, 1, 1], d).unwrap());
        let h = c.homology_with_basis().unwrap();
        let b = h.basis().unwrap();
        assert_eq!(b.dim(), 1);
        for k in 0..b.dim() {
            let rep = b.representative(k);
            assert!(c.differential().apply(&rep).is_empty());
            let coords = b.coordinates(&rep).unwrap();
            assert_eq!(coords, BitVec::unit(b.dim(), k));
        }
        // a boundary has zero coordinates
        assert!(b.coordinates(&[2, 3]).unwrap().is_zero());
        // a non-cycle is rejected
        assert!(b.coordinates(&[0]).is_err());
    }

    #[test]
    fn les_for_merge_on_one_crossing_unknot() {
        // K(O ⊔ O) → K(O) merge, as the cone of the one-crossing unknot diagram
        let two = FilteredComplex::from_dims(&BigradedDims::from_entries([
            ((0, 2), 1),
            ((0, 0), 2),
            ((0, -2), 1),
        ]));
        let one = FilteredComplex::from_dims(&BigradedDims::from_entries([((1, 1), 1), ((1, -1), 1)]))
            .shifted(0, 0, 0);
        // generator order: 11, 1X, X1, XX  →  1, X
        let m = SparseMatrix::from_columns(2, vec![vec![0], vec![1], vec![1], vec![]]);
        // place both at h = 0 and 1 with q matched: one-crossing unknot shift q+1
        let src = Arc::new(two.shifted(0, 1, 0));
        let tgt = Arc::new(one.shifted(0, 2, 0));
        let f = ChainMap::new(src, tgt, m).unwrap();
        let k = cone(&f).unwrap();
        let h = k.homology().unwrap().dims;
        assert_eq!(h.total(), 2);
        let rep = les_exactness(&f).unwrap();
        assert!(rep.exact, "{rep:?}");
    }

    #[test]
    fn dims_serde_roundtrip() {
        let d = BigradedDims::from_entries([((0, 1), 1), ((-2, -5), 3)]);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"total\":4"));
        let back: BigradedDims = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.euler().coeff(-5), 3);
    }
}
