//! GF(2) linear algebra and the Frobenius algebras behind the TQFT maps.

pub mod bits;
pub mod frobenius;
pub mod matrix;
pub mod sparse;

pub use bits::BitVec;
pub use frobenius::{FrobeniusAlgebraSpec, FrobeniusOp, Relation, Tensor};
pub use matrix::{Echelon, F2Matrix, Insert};
pub use sparse::SparseMatrix;

/// GF(2) rank of a dense matrix.
pub fn rank(a: &F2Matrix) -> usize {
    a.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = F2Matrix> {
        (1usize..24, 1usize..24).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    let rows = rows
                        .into_iter()
                        .map(|bits| BitVec::from_indices(c, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
                        .collect();
                    F2Matrix::from_rows(c, rows)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_plus_nullity_is_width(a in arb_matrix()) {
            let k = a.kernel();
            prop_assert_eq!(a.rank() + k.len(), a.n_cols());
            prop_assert!(a.rank() <= a.n_rows().min(a.n_cols()));
        }

        #[test]
        fn rank_is_transpose_invariant(a in arb_matrix()) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
            prop_assert_eq!(a.rank(), a.rref().1.len());
        }

        #[test]
        fn solutions_solve(a in arb_matrix(), seed in any::<u64>()) {
            let x = BitVec::from_indices(a.n_cols(), (0..a.n_cols()).filter(|i| seed >> (i % 64) & 1 == 1));
            let b = a.mul_vec(&x);
            let sol = a.solve_image_membership(&b).unwrap().expect("b is in the image");
            prop_assert_eq!(a.mul_vec(&sol), b);
        }

        #[test]
        fn sparse_roundtrip(a in arb_matrix()) {
            prop_assert_eq!(SparseMatrix::from_dense(&a).to_dense(), a);
        }
    }
}
