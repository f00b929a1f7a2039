use std::fmt;

use super::bits::BitVec;
use crate::error::{Error, Result};

/// Dense GF(2) matrix stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        F2Matrix {
            n_rows,
            n_cols,
            rows: vec![BitVec::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(n_cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == n_cols));
        F2Matrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        }
    }

    pub fn from_columns(n_rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.rows[i].set(j, b)
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.rows[i].flip(j)
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.n_rows);
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<BitVec> {
        self.transpose().rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.n_cols, self.n_rows);
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.n_cols);
        BitVec::from_indices(
            self.n_rows,
            (0..self.n_rows).filter(|&i| self.rows[i].dot(x)),
        )
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!(self.n_cols, rhs.n_rows, "dimension mismatch in product");
        let mut out = F2Matrix::zeros(self.n_rows, rhs.n_cols);
        for (i, r) in self.rows.iter().enumerate() {
            for k in r.ones() {
                out.rows[i].xor_assign(&rhs.rows[k]);
            }
        }
        out
    }

    pub fn add(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!((self.n_rows, self.n_cols), (rhs.n_rows, rhs.n_cols));
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&rhs.rows) {
            a.xor_assign(b);
        }
        out
    }

    /// GF(2) rank by Gaussian elimination on a copy of the rows.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows.clone())
    }

    pub fn nullity(&self) -> usize {
        self.n_cols - self.rank()
    }

    /// Reduced row-echelon form; returns the matrix and its pivot columns.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.n_cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        (F2Matrix::from_rows(self.n_cols, rows), pivots)
    }

    /// Some `x` with `self * x = b`, or `None` if `b` is not in the column space.
    /// Columns are taken in index order, so among several solutions the one
    /// supported on the earliest pivot columns is returned.
    pub fn solve_image_membership(&self, b: &BitVec) -> Result<Option<BitVec>> {
        if b.len() != self.n_rows {
            return Err(Error::Dimension(format!(
                "right-hand side has length {} but matrix has {} rows",
                b.len(),
                self.n_rows
            )));
        }
        let mut ech = Echelon::with_tags(self.n_rows, self.n_cols);
        for (j, c) in self.columns().into_iter().enumerate() {
            ech.insert(c, BitVec::unit(self.n_cols, j));
        }
        Ok(ech.express(b))
    }

    /// Basis of the right kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut ech = Echelon::with_tags(self.n_rows, self.n_cols);
        let mut ker = Vec::new();
        for (j, c) in self.columns().into_iter().enumerate() {
            if let Insert::Dependent(tag) = ech.insert(c, BitVec::unit(self.n_cols, j)) {
                ker.push(tag);
            }
        }
        ker
    }

    pub fn to_bit_strings(&self) -> Vec<String> {
        self.rows.iter().map(BitVec::to_bit_string).collect()
    }

    pub fn parse_bit_strings<S: AsRef<str>>(n_cols: usize, rows: &[S]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref().trim();
            if r.len() != n_cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n_cols}",
                    r.len()
                )));
            }
            out.push(
                BitVec::parse_bit_string(r)
                    .ok_or_else(|| Error::Parse(format!("row {i} is not a bit string: {r:?}")))?,
            );
        }
        Ok(F2Matrix::from_rows(n_cols, out))
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.n_rows, self.n_cols)?;
        for r in &self.rows {
            writeln!(f, "  {}", r.to_bit_string())?;
        }
        write!(f, "]")
    }
}

pub(crate) fn rank_of_rows(mut rows: Vec<BitVec>) -> usize {
    let Some(width) = rows.first().map(BitVec::len) else {
        return 0;
    };
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < width {
        // pick the row with a bit at `col`, scanning from the current rank
        let mut best: Option<(usize, usize)> = None;
        for (i, r) in rows.iter().enumerate().skip(rank) {
            if let Some(c) = r.next_one(col) {
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, i));
                    if c == col {
                        break;
                    }
                }
            }
        }
        let Some((c, p)) = best else { break };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for r in tail.iter_mut() {
            if r.get(c) {
                r.xor_assign_from(pivot, c);
            }
        }
        rank += 1;
        col = c + 1;
    }
    rank
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Debug, Clone)]
pub enum Insert {
    /// New pivot column.
    Pivot(usize),
    /// The vector lies in the span; carries the tag of the combination.
    Dependent(BitVec),
}

/// Incremental semi-echelon basis of a subspace of GF(2)^width, with optional
/// tag vectors that record which inserted vectors each row is built from.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    tag_width: usize,
    rows: Vec<BitVec>,
    tags: Vec<BitVec>,
    pivot_of_col: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl Echelon {
    pub fn new(width: usize) -> Self {
        Self::with_tags(width, 0)
    }

    pub fn with_tags(width: usize, tag_width: usize) -> Self {
        Echelon {
            width,
            tag_width,
            rows: Vec::new(),
            tags: Vec::new(),
            pivot_of_col: vec![NO_PIVOT; width],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduce `v` (and its tag) against the stored rows; afterwards `v` has no
    /// bit at any pivot column.
    pub fn reduce(&self, v: &mut BitVec, tag: &mut BitVec) {
        let mut cur = v.first_one();
        while let Some(i) = cur {
            let r = self.pivot_of_col[i];
            if r != NO_PIVOT {
                let r = r as usize;
                v.xor_assign_from(&self.rows[r], i);
                if self.tag_width > 0 {
                    tag.xor_assign(&self.tags[r]);
                }
            }
            cur = v.next_one(i + 1);
        }
    }

    pub fn insert(&mut self, mut v: BitVec, mut tag: BitVec) -> Insert {
        debug_assert_eq!(v.len(), self.width);
        self.reduce(&mut v, &mut tag);
        match v.first_one() {
            None => Insert::Dependent(tag),
            Some(p) => {
                self.pivot_of_col[p] = self.rows.len() as u32;
                self.rows.push(v);
                self.tags.push(tag);
                Insert::Pivot(p)
            }
        }
    }

    pub fn insert_untagged(&mut self, v: BitVec) -> bool {
        let t = BitVec::zeros(self.tag_width);
        matches!(self.insert(v, t), Insert::Pivot(_))
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut v = v.clone();
        let mut t = BitVec::zeros(self.tag_width);
        self.reduce(&mut v, &mut t);
        v.is_zero()
    }

    /// Tag of a combination of inserted vectors equal to `v`, if one exists.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let mut v = v.clone();
        let mut t = BitVec::zeros(self.tag_width);
        self.reduce(&mut v, &mut t);
        v.is_zero().then_some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> F2Matrix {
        F2Matrix::parse_bit_strings(rows[0].len(), rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2Matrix::identity(5).rank(), 5);
        assert_eq!(F2Matrix::zeros(4, 7).rank(), 0);
        assert_eq!(m(&["111", "111", "111"]).rank(), 1);
        assert_eq!(m(&["110", "011", "101"]).rank(), 2);
    }

    #[test]
    fn solve_examples() {
        let id = F2Matrix::identity(3);
        let e1 = BitVec::unit(3, 0);
        assert_eq!(id.solve_image_membership(&e1).unwrap(), Some(e1.clone()));

        let z = F2Matrix::zeros(2, 2);
        assert_eq!(z.solve_image_membership(&BitVec::unit(2, 1)).unwrap(), None);

        let a = m(&["11"]);
        let x = a.solve_image_membership(&BitVec::unit(1, 0)).unwrap().unwrap();
        assert_eq!(x, BitVec::unit(2, 0));
    }

    #[test]
    fn solve_dimension_error() {
        let a = F2Matrix::identity(2);
        assert!(a.solve_image_membership(&BitVec::zeros(3)).is_err());
    }

    #[test]
    fn rref_is_idempotent() {
        let a = m(&["1101", "0110", "1011", "0000"]);
        let (r, piv) = a.rref();
        let (r2, piv2) = r.rref();
        assert_eq!(r, r2);
        assert_eq!(piv, piv2);
        assert_eq!(piv.len(), a.rank());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&["1101", "0110", "1011"]);
        let ker = a.kernel();
        assert_eq!(ker.len(), a.nullity());
        for k in &ker {
            assert!(a.mul_vec(k).is_zero());
        }
    }
}
