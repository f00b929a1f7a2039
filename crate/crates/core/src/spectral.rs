//! Spectral sequences of filtered complexes.
//!
//! Page `r` is computed from ranks of filtration-constrained submatrices of
//! `d`:
//!
//! ```text
//! dim E_r^p = dim(F_p ∩ d⁻¹F_{p+r}) − dim(F_{p+1} ∩ d⁻¹F_{p+r})
//!           − dim(d F_{p−r+1} ∩ F_p) + dim(d F_{p−r+1} ∩ F_{p+1})
//! ```
//!
//! with `F_p` spanned by generators of filtration at least `p`. Page 0 is
//! the associated graded complex. Every rank is taken inside a slice on
//! which `d` is homogeneous, so pages come out bigraded. The persistence
//! pairs of the column reduction give the same dimensions independently and
//! are used as a cross-check and for the ranks of the page differentials.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::BitVec;
use crate::basepoint::{nu_map, reduced, REDUCED_Q_SHIFT};
use crate::complex::{BigradedDims, FilteredComplex};
use crate::diagram::Edge;
use crate::error::{Error, Result};
use crate::theories::CubeComplex;

/// Forms `a·h + b·q` tried as homogeneous gradings.
const FORMS: [(i32, i32); 4] = [(1, 0), (0, 1), (-2, 1), (-1, 1)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub k: usize,
    pub dims: BigradedDims,
    /// Rank of `d_k` leaving each bidegree.
    pub differential_rank: BigradedDims,
}

impl SpectralPage {
    pub fn total(&self) -> usize {
        self.dims.total()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSequence {
    pub pages: Vec<SpectralPage>,
    /// First page whose total equals the total homology, after which nothing changes.
    pub stabilized_at: Option<usize>,
    pub homology_total: usize,
}

impl SpectralSequence {
    pub fn page(&self, k: usize) -> Option<&SpectralPage> {
        self.pages.get(k)
    }

    /// Page `k`, or the last computed page if the sequence stabilized before it.
    pub fn page_or_limit(&self, k: usize) -> Option<&SpectralPage> {
        match (self.pages.get(k), self.stabilized_at) {
            (Some(p), _) => Some(p),
            (None, Some(_)) => self.pages.last(),
            (None, None) => None,
        }
    }
}

/// Default number of pages: one more than the crossing count or the
/// filtration span, whichever is larger.
pub fn default_k_max(c: &FilteredComplex, crossings: usize) -> usize {
    let span = match (c.filtration().iter().min(), c.filtration().iter().max()) {
        (Some(a), Some(b)) => (b - a) as usize,
        _ => 0,
    };
    crossings.max(span) + 1
}

/// Slice key: values of every form that `d` shifts by a constant.
struct Slicing {
    forms: Vec<((i32, i32), i32)>,
}

impl Slicing {
    fn new(c: &FilteredComplex) -> Slicing {
        let d = c.differential();
        let forms = FORMS
            .iter()
            .filter_map(|&(a, b)| {
                let mut shift = None;
                for (i, j) in d.entries() {
                    let s = a * (c.h(i) - c.h(j)) + b * (c.q(i) - c.q(j));
                    match shift {
                        None => shift = Some(s),
                        Some(t) if t != s => return None,
                        _ => {}
                    }
                }
                Some(((a, b), shift.unwrap_or(if (a, b) == (1, 0) { 1 } else { 0 })))
            })
            .collect();
        Slicing { forms }
    }

    fn key(&self, h: i32, q: i32) -> Vec<i32> {
        self.forms.iter().map(|&((a, b), _)| a * h + b * q).collect()
    }

    fn target(&self, key: &[i32]) -> Vec<i32> {
        key.iter().zip(&self.forms).map(|(k, &(_, s))| k + s).collect()
    }

    fn source(&self, key: &[i32]) -> Vec<i32> {
        key.iter().zip(&self.forms).map(|(k, &(_, s))| k - s).collect()
    }
}

/// Generators of one slice, with their filtration values.
struct Slice {
    gens: Vec<u32>,
    filt: Vec<i32>,
}

struct RankTable<'a> {
    c: &'a FilteredComplex,
    slices: HashMap<Vec<i32>, Slice>,
    position: Vec<u32>,
    slicing: Slicing,
}

/// `(slice key, filtration)` to `(h, q)`.
type CellMap = BTreeMap<(Vec<i32>, i32), (i32, i32)>;

impl<'a> RankTable<'a> {
    fn new(c: &'a FilteredComplex) -> Self {
        let slicing = Slicing::new(c);
        let mut slices: HashMap<Vec<i32>, Slice> = HashMap::new();
        let mut position = vec![0; c.len()];
        for (g, pos) in position.iter_mut().enumerate() {
            let s = slices.entry(slicing.key(c.h(g), c.q(g))).or_insert(Slice {
                gens: Vec::new(),
                filt: Vec::new(),
            });
            *pos = s.gens.len() as u32;
            s.gens.push(g as u32);
            s.filt.push(c.filt(g));
        }
        RankTable {
            c,
            slices,
            position,
            slicing,
        }
    }

    /// Rank of `d` from generators of `src` with filtration ≥ `col_min` to
    /// generators of the next slice with filtration < `row_below`.
    fn rank(&self, src: &[i32], col_min: i32, row_below: i32) -> usize {
        let Some(s) = self.slices.get(src) else { return 0 };
        let Some(t) = self.slices.get(&self.slicing.target(src)) else {
            return 0;
        };
        let rows: Vec<BitVec> = s
            .gens
            .iter()
            .zip(&s.filt)
            .filter(|&(_, &f)| f >= col_min)
            .map(|(&g, _)| {
                BitVec::from_indices(
                    t.gens.len(),
                    self.c
                        .differential()
                        .col(g as usize)
                        .iter()
                        .map(|&i| self.position[i as usize] as usize)
                        .filter(|&k| t.filt[k] < row_below),
                )
            })
            .filter(|r| !r.is_zero())
            .collect();
        crate::algebra::matrix::rank_of_rows(rows)
    }

    fn count(&self, key: &[i32], min: i32) -> usize {
        self.slices
            .get(key)
            .map_or(0, |s| s.filt.iter().filter(|&&f| f >= min).count())
    }

    /// `dim(F_p ∩ d⁻¹ F_{p+r})` in slice `key`.
    fn cycles(&self, key: &[i32], p: i32, r: i32) -> usize {
        self.count(key, p) - self.rank(key, p, p + r)
    }

    /// `dim(d F_a ∩ F_b)` in slice `key`.
    fn boundaries(&self, key: &[i32], a: i32, b: i32) -> usize {
        let src = self.slicing.source(key);
        self.rank(&src, a, i32::MAX) - self.rank(&src, a, b)
    }

    fn page_cell(&self, key: &[i32], p: i32, r: i32) -> usize {
        let zr = self.cycles(key, p, r) as i64;
        let zr1 = self.count(key, p + 1) as i64 - self.rank(key, p + 1, p + r) as i64;
        let b0 = self.boundaries(key, p - r + 1, p) as i64;
        let b1 = self.boundaries(key, p - r + 1, p + 1) as i64;
        let v = zr - zr1 - b0 + b1;
        debug_assert!(v >= 0);
        v.max(0) as usize
    }

    /// `(h, q)` label of each `(slice, filtration)` cell.
    fn cells(&self) -> Result<CellMap> {
        let mut out = CellMap::new();
        for (key, s) in &self.slices {
            for (&g, &f) in s.gens.iter().zip(&s.filt) {
                let hq = (self.c.h(g as usize), self.c.q(g as usize));
                match out.insert((key.clone(), f), hq) {
                    Some(prev) if prev != hq => {
                        return Err(Error::Verification(format!(
                            "filtration cell contains generators of bidegrees {prev:?} and {hq:?}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(out)
    }
}

/// Pages `0..=k_max` by the rank formula, stopping after the first page
/// whose total equals the total homology. Each page is cross-checked
/// against the persistence pairs.
pub fn leray_pages(c: &FilteredComplex, k_max: usize) -> Result<SpectralSequence> {
    c.check_filtration()?;
    let table = RankTable::new(c);
    let cells = table.cells()?;
    let red = c.reduction()?;
    let homology_total = red.essential().len();
    let pairs = red.pairs();

    let mut pages = Vec::new();
    let mut stabilized_at = None;
    for r in 0..=k_max {
        let entries: Vec<((i32, i32), usize)> = cells
            .par_iter()
            .map(|((key, p), &hq)| (hq, table.page_cell(key, *p, r as i32)))
            .collect();
        let dims = BigradedDims::from_entries(entries);
        let check = red.page_dims(c, r as i32);
        if check != dims {
            return Err(Error::Verification(format!(
                "page {r}: rank formula gives total {}, persistence pairs give {}",
                dims.total(),
                check.total()
            )));
        }
        let mut differential_rank = BigradedDims::new();
        for &(born, killer) in &pairs {
            let (b, k) = (born as usize, killer as usize);
            if (c.filt(b) - c.filt(k)) as usize == r {
                differential_rank.add_at(c.h(k), c.q(k), 1);
            }
        }
        let total = dims.total();
        pages.push(SpectralPage {
            k: r,
            dims,
            differential_rank,
        });
        if total == homology_total {
            stabilized_at = Some(r);
            break;
        }
    }
    Ok(SpectralSequence {
        pages,
        stabilized_at,
        homology_total,
    })
}

/// Pages from the persistence pairs alone; used where the rank formula
/// would be redundant.
pub fn persistence_pages(c: &FilteredComplex, k_max: usize) -> Result<SpectralSequence> {
    let red = c.reduction()?;
    let homology_total = red.essential().len();
    let mut pages = Vec::new();
    let mut stabilized_at = None;
    let pairs = red.pairs();
    for r in 0..=k_max {
        let dims = red.page_dims(c, r as i32);
        let mut differential_rank = BigradedDims::new();
        for &(born, killer) in &pairs {
            let (b, k) = (born as usize, killer as usize);
            if (c.filt(b) - c.filt(k)) as usize == r {
                differential_rank.add_at(c.h(k), c.q(k), 1);
            }
        }
        let total = dims.total();
        pages.push(SpectralPage {
            k: r,
            dims,
            differential_rank,
        });
        if total == homology_total {
            stabilized_at = Some(r);
            break;
        }
    }
    Ok(SpectralSequence {
        pages,
        stabilized_at,
        homology_total,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwinPage {
    pub k: usize,
    pub unreduced: BigradedDims,
    pub reduced: BigradedDims,
    pub predicted: BigradedDims,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwinArrowsReport {
    pub basepoint: Edge,
    /// Whether ν is a chain map; the splitting needs it as a section.
    pub section_is_chain_map: bool,
    pub pages: Vec<TwinPage>,
    pub pass: bool,
}

/// Compares every page of the complex with the reduced pages shifted by
/// `q ∓ 1`, up to `k_max` or until both sequences have stabilized.
pub fn twin_arrows_check(cc: &CubeComplex, p: Edge, k_max: usize) -> Result<TwinArrowsReport> {
    let red = reduced(cc, p)?;
    let full = leray_pages(&cc.complex, k_max)?;
    let part = leray_pages(&red.complex, k_max)?;
    let last = full.pages.len().max(part.pages.len());
    let mut pages = Vec::with_capacity(last);
    for k in 0..last {
        let (Some(a), Some(b)) = (full.page_or_limit(k), part.page_or_limit(k)) else {
            break;
        };
        let reduced = b.dims.shift(0, REDUCED_Q_SHIFT);
        let predicted = reduced.shift(0, -1).plus(&reduced.shift(0, 1));
        pages.push(TwinPage {
            k,
            pass: predicted == a.dims,
            unreduced: a.dims.clone(),
            reduced,
            predicted,
        });
    }
    let pass = !pages.is_empty() && pages.iter().all(|p| p.pass);
    Ok(TwinArrowsReport {
        basepoint: p,
        section_is_chain_map: nu_map(cc).is_ok(),
        pages,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SparseMatrix;
    use crate::diagram::parse_pd;
    use crate::theories::{build_complex, FiltrationRule, TheorySpec};

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";

    #[test]
    fn zero_differential_pages_are_constant() {
        let dims = BigradedDims::from_entries([((0, 1), 2), ((1, 3), 1)]);
        let c = FilteredComplex::from_dims(&dims);
        let ss = leray_pages(&c, 3).unwrap();
        assert_eq!(ss.pages[0].dims, dims);
        assert_eq!(ss.stabilized_at, Some(0));
    }

    #[test]
    fn two_term_complex() {
        // e0 → e1 across one filtration step dies on page 2
        let c = FilteredComplex::new(
            vec![0, 1],
            vec![0, 0],
            vec![0, 1],
            SparseMatrix::from_columns(2, vec![vec![1], vec![]]),
        )
        .unwrap();
        let ss = leray_pages(&c, 4).unwrap();
        let totals: Vec<usize> = ss.pages.iter().map(SpectralPage::total).collect();
        assert_eq!(totals, vec![2, 2, 0]);
        assert_eq!(ss.pages[1].differential_rank.total(), 1);
    }

    #[test]
    fn khovanov_cube_filtration() {
        let d = parse_pd(TREFOIL).unwrap();
        let cc = build_complex(&d, &TheorySpec::khovanov()).unwrap();
        let ss = leray_pages(&cc.complex, 4).unwrap();
        // with F_p = {|v| ≥ p}, d raises p by exactly one: E_0 = E_1 = C, E_2 = Kh
        assert_eq!(ss.pages[1].dims, cc.complex.chain_dims());
        assert_eq!(ss.pages[2].dims, crate::theories::khovanov(&d).unwrap());
        assert_eq!(ss.stabilized_at, Some(2));
    }

    #[test]
    fn bar_natan_quantum_filtration() {
        let d = parse_pd(TREFOIL).unwrap();
        let cc = build_complex(&d, &TheorySpec::bar_natan()).unwrap();
        let ss = leray_pages(&cc.complex, default_k_max(&cc.complex, 3)).unwrap();
        assert_eq!(ss.pages[1].dims, crate::theories::khovanov(&d).unwrap());
        assert_eq!(ss.pages.last().unwrap().total(), 2);
        for w in ss.pages.windows(2) {
            assert!(w[1].total() <= w[0].total());
            // d_r moves q, so only the ungraded Euler characteristic survives
            let chi = |d: &BigradedDims| d.iter().map(|((h, _), n)| if h % 2 == 0 { n as i64 } else { -(n as i64) }).sum::<i64>();
            assert_eq!(chi(&w[1].dims), chi(&w[0].dims));
        }
    }

    #[test]
    fn direct_sums_add_pagewise() {
        let d = parse_pd(TREFOIL).unwrap();
        let t = TheorySpec::bar_natan();
        let a = build_complex(&d, &t).unwrap().complex;
        let b = build_complex(&parse_pd("X(4,1,3,2) X(2,3,1,4)").unwrap(), &t).unwrap().complex;
        let sum = a.direct_sum(&b);
        let sa = leray_pages(&a, 8).unwrap();
        let sb = leray_pages(&b, 8).unwrap();
        let ss = leray_pages(&sum, 8).unwrap();
        for k in 0..ss.pages.len() {
            let want = sa.page_or_limit(k).unwrap().dims.plus(&sb.page_or_limit(k).unwrap().dims);
            assert_eq!(ss.pages[k].dims, want, "page {k}");
        }
    }

    #[test]
    fn twin_arrows_khovanov() {
        let d = parse_pd(TREFOIL).unwrap();
        let cc = build_complex(&d, &TheorySpec::khovanov()).unwrap();
        let rep = twin_arrows_check(&cc, 2, 4).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn quantum_filtered_khovanov_has_one_page() {
        let d = parse_pd(TREFOIL).unwrap();
        let t = TheorySpec::khovanov().with_filtration(FiltrationRule::Quantum);
        let cc = build_complex(&d, &t).unwrap();
        let ss = leray_pages(&cc.complex, 6).unwrap();
        // d preserves q, so E_1 is already Kh
        assert_eq!(ss.stabilized_at, Some(1));
    }
}
