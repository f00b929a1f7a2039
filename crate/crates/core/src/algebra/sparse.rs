use super::bits::BitVec;
use super::matrix::F2Matrix;

/// Column-sparse GF(2) matrix: column `j` lists the rows holding a one, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    n_rows: usize,
    cols: Vec<Vec<u32>>,
}

/// Reduce a list of indices to those occurring an odd number of times, sorted.
pub(crate) fn mod2_normalize(v: &mut Vec<u32>) {
    v.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        let mut j = i;
        while j < v.len() && v[j] == x {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            v[out] = x;
            out += 1;
        }
        i = j;
    }
    v.truncate(out);
}

/// Symmetric difference of two sorted index lists.
pub(crate) fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            cols: vec![Vec::new(); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            cols: (0..n as u32).map(|i| vec![i]).collect(),
        }
    }

    /// Build from columns given as arbitrary index lists; entries are reduced mod 2.
    pub fn from_columns(n_rows: usize, mut cols: Vec<Vec<u32>>) -> Self {
        for c in &mut cols {
            mod2_normalize(c);
            debug_assert!(c.last().is_none_or(|&r| (r as usize) < n_rows));
        }
        SparseMatrix { n_rows, cols }
    }

    pub fn from_dense(m: &F2Matrix) -> Self {
        let cols = m
            .columns()
            .into_iter()
            .map(|c| c.ones().map(|i| i as u32).collect())
            .collect();
        SparseMatrix {
            n_rows: m.n_rows(),
            cols,
        }
    }

    pub fn to_dense(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.n_rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                m.set(i as usize, j, true);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn col(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j].binary_search(&(i as u32)).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&i| (i as usize, j)))
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut acc: Vec<u32> = v.iter().flat_map(|&j| self.cols[j as usize].iter().copied()).collect();
        mod2_normalize(&mut acc);
        acc
    }

    pub fn apply_dense(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.n_rows);
        for j in v.ones() {
            for &i in &self.cols[j] {
                out.flip(i as usize);
            }
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n_cols(), rhs.n_rows, "dimension mismatch in composition");
        let cols = rhs.cols.iter().map(|c| self.apply(c)).collect();
        SparseMatrix {
            n_rows: self.n_rows,
            cols,
        }
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.n_rows, self.n_cols()), (rhs.n_rows, rhs.n_cols()));
        let cols = self.cols.iter().zip(&rhs.cols).map(|(a, b)| sym_diff(a, b)).collect();
        SparseMatrix {
            n_rows: self.n_rows,
            cols,
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.n_rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                cols[i as usize].push(j as u32);
            }
        }
        SparseMatrix {
            n_rows: self.cols.len(),
            cols,
        }
    }

    /// Submatrix on the given rows and columns (both as global index lists).
    pub fn submatrix(&self, rows: &[u32], cols: &[u32]) -> F2Matrix {
        let mut pos = std::collections::HashMap::with_capacity(rows.len());
        for (k, &r) in rows.iter().enumerate() {
            pos.insert(r, k);
        }
        let mut m = F2Matrix::zeros(rows.len(), cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in &self.cols[j as usize] {
                if let Some(&ii) = pos.get(i) {
                    m.set(ii, jj, true);
                }
            }
        }
        m
    }

    /// Matrix with rows and columns renumbered; entries whose row maps to `None` are dropped.
    pub fn reindex(
        &self,
        n_rows: usize,
        col_order: &[u32],
        row_map: impl Fn(u32) -> Option<u32>,
    ) -> SparseMatrix {
        let cols = col_order
            .iter()
            .map(|&j| {
                let mut c: Vec<u32> = self.cols[j as usize].iter().filter_map(|&i| row_map(i)).collect();
                c.sort_unstable();
                c
            })
            .collect();
        SparseMatrix { n_rows, cols }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_cancels_pairs() {
        let mut v = vec![3, 1, 3, 2, 1, 1];
        mod2_normalize(&mut v);
        assert_eq!(v, vec![1, 2]);
    }

    #[test]
    fn compose_matches_dense() {
        let a = SparseMatrix::from_columns(3, vec![vec![0, 1], vec![1, 2], vec![]]);
        let b = SparseMatrix::from_columns(2, vec![vec![0], vec![0, 1], vec![1]]);
        let sparse = b.compose(&a).to_dense();
        let dense = b.to_dense().mul(&a.to_dense());
        assert_eq!(sparse, dense);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let a = SparseMatrix::from_columns(4, vec![vec![0, 3], vec![2], vec![1, 2, 3]]);
        assert_eq!(a.transpose().transpose(), a);
    }
}
