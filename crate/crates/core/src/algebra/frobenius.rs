//! The rank-two Frobenius algebras `F[X]/(r(X))` that drive every handle map.
//!
//! Basis elements are indexed `0 ↔ 1` (the `v+` generator) and `1 ↔ X`
//! (the `v-` generator). Elements of a tensor power `V^{⊗k}` are bit vectors
//! of length `2^k` whose index has the first tensor factor as its most
//! significant bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bits::BitVec;
use super::matrix::F2Matrix;
use crate::error::{Error, Result};

pub const ONE: u8 = 0;
pub const X: u8 = 1;

/// Quantum degree of a basis element.
pub fn degree(label: u8) -> i32 {
    if label == ONE {
        1
    } else {
        -1
    }
}

/// Supported degree-two relation polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// `r(X) = X²`: ordinary Khovanov homology.
    #[serde(rename = "X^2")]
    XSquared,
    /// `r(X) = X² + X`: the characteristic-two Bar-Natan deformation.
    #[serde(rename = "X^2+X")]
    XSquaredPlusX,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::XSquared => write!(f, "X^2"),
            Relation::XSquaredPlusX => write!(f, "X^2+X"),
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "X^2" | "X2" | "x^2" => Ok(Relation::XSquared),
            "X^2+X" | "X2+X" | "x^2+x" => Ok(Relation::XSquaredPlusX),
            _ => Err(Error::Parse(format!(
                "unsupported relation polynomial {s:?} (expected X^2 or X^2+X)"
            ))),
        }
    }
}

/// Structural operations of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrobeniusOp {
    Mult,
    Comult,
    Unit,
    Counit,
    Dot,
}

impl FrobeniusOp {
    /// (input arity, output arity)
    pub fn arity(self) -> (usize, usize) {
        match self {
            FrobeniusOp::Mult => (2, 1),
            FrobeniusOp::Comult => (1, 2),
            FrobeniusOp::Unit => (0, 1),
            FrobeniusOp::Counit => (1, 0),
            FrobeniusOp::Dot => (1, 1),
        }
    }
}

/// An element of `V^{⊗arity}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    arity: usize,
    coeffs: BitVec,
}

impl Tensor {
    pub fn zero(arity: usize) -> Self {
        Tensor {
            arity,
            coeffs: BitVec::zeros(1 << arity),
        }
    }

    /// A pure tensor of basis elements.
    pub fn basis(labels: &[u8]) -> Self {
        let mut t = Tensor::zero(labels.len());
        t.coeffs.set(pack(labels), true);
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coeffs(&self) -> &BitVec {
        &self.coeffs
    }

    pub fn add_basis(&mut self, labels: &[u8]) {
        assert_eq!(labels.len(), self.arity);
        self.coeffs.flip(pack(labels));
    }

    /// Basis terms, each as a list of labels.
    pub fn terms(&self) -> Vec<Vec<u8>> {
        self.coeffs.ones().map(|i| unpack(i, self.arity)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }
}

fn pack(labels: &[u8]) -> usize {
    labels.iter().fold(0, |acc, &l| (acc << 1) | l as usize)
}

fn unpack(mut idx: usize, arity: usize) -> Vec<u8> {
    let mut out = vec![0; arity];
    for k in (0..arity).rev() {
        out[k] = (idx & 1) as u8;
        idx >>= 1;
    }
    out
}

/// `F[X]/(r(X))` with its multiplication, comultiplication, unit and counit
/// tables. Comultiplication is derived as the dual of multiplication under
/// the pairing `ε∘m`, so every table is forced by `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusAlgebraSpec {
    relation: Relation,
    /// `mult[a][b]`: two-bit mask of `a·b` over the basis.
    mult: [[u8; 2]; 2],
    /// `comult[a]`: four-bit mask over `e_i ⊗ e_j` at bit `2i + j`.
    comult: [u8; 2],
    counit: [bool; 2],
}

impl FrobeniusAlgebraSpec {
    pub fn new(relation: Relation) -> Self {
        // X·X reduced modulo r
        let xx = match relation {
            Relation::XSquared => 0b00,
            Relation::XSquaredPlusX => 0b10,
        };
        let mult = [[0b01, 0b10], [0b10, xx]];
        let counit = [false, true];

        let pairing = |a: usize, b: usize| -> bool {
            let prod = mult[a][b];
            (0..2).filter(|&k| prod >> k & 1 == 1 && counit[k]).count() % 2 == 1
        };
        // 2x2 Gram matrix and its inverse over GF(2)
        let g = [[pairing(0, 0), pairing(0, 1)], [pairing(1, 0), pairing(1, 1)]];
        let det = (g[0][0] & g[1][1]) ^ (g[0][1] & g[1][0]);
        assert!(det, "pairing must be nondegenerate");
        let ginv = [[g[1][1], g[0][1]], [g[1][0], g[0][0]]];

        let mut comult = [0u8; 2];
        for (k, slot) in comult.iter_mut().enumerate() {
            // Δ(e_k) = Σ_i (e_k e_i) ⊗ e_i*,  e_i* = Σ_j ginv[i][j] e_j
            for (i, row) in ginv.iter().enumerate() {
                let left = mult[k][i];
                for a in 0..2 {
                    if left >> a & 1 == 0 {
                        continue;
                    }
                    for (j, &coef) in row.iter().enumerate() {
                        if coef {
                            *slot ^= 1 << (2 * a + j);
                        }
                    }
                }
            }
        }

        FrobeniusAlgebraSpec {
            relation,
            mult,
            comult,
            counit,
        }
    }

    pub fn khovanov() -> Self {
        Self::new(Relation::XSquared)
    }

    pub fn bar_natan() -> Self {
        Self::new(Relation::XSquaredPlusX)
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// `a·b` as a list of basis labels.
    #[inline]
    pub fn mult_terms(&self, a: u8, b: u8) -> impl Iterator<Item = u8> {
        let mask = self.mult[a as usize][b as usize];
        (0..2u8).filter(move |&k| mask >> k & 1 == 1)
    }

    /// `Δ(a)` as a list of label pairs.
    #[inline]
    pub fn comult_terms(&self, a: u8) -> impl Iterator<Item = (u8, u8)> {
        let mask = self.comult[a as usize];
        (0..4u8).filter(move |&k| mask >> k & 1 == 1).map(|k| (k >> 1, k & 1))
    }

    /// `X·a` as a list of basis labels.
    #[inline]
    pub fn dot_terms(&self, a: u8) -> impl Iterator<Item = u8> {
        self.mult_terms(X, a)
    }

    #[inline]
    pub fn counit(&self, a: u8) -> bool {
        self.counit[a as usize]
    }

    pub fn apply(&self, op: FrobeniusOp, input: &Tensor) -> Result<Tensor> {
        let (ins, outs) = op.arity();
        if input.arity != ins {
            return Err(Error::Arity {
                op: format!("{op:?}"),
                expected: ins,
                found: input.arity,
            });
        }
        let mut out = Tensor::zero(outs);
        for term in input.terms() {
            match op {
                FrobeniusOp::Mult => {
                    for c in self.mult_terms(term[0], term[1]) {
                        out.add_basis(&[c]);
                    }
                }
                FrobeniusOp::Comult => {
                    for (a, b) in self.comult_terms(term[0]) {
                        out.add_basis(&[a, b]);
                    }
                }
                FrobeniusOp::Unit => out.add_basis(&[ONE]),
                FrobeniusOp::Counit => {
                    if self.counit(term[0]) {
                        out.add_basis(&[]);
                    }
                }
                FrobeniusOp::Dot => {
                    for c in self.dot_terms(term[0]) {
                        out.add_basis(&[c]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ε∘m` on the basis `{1, X}`.
    pub fn pairing_matrix(&self) -> F2Matrix {
        let mut g = F2Matrix::zeros(2, 2);
        for a in 0..2u8 {
            for b in 0..2u8 {
                let v = self.mult_terms(a, b).filter(|&c| self.counit(c)).count() % 2 == 1;
                g.set(a as usize, b as usize, v);
            }
        }
        g
    }

    /// Matrix of a linear map `V^{⊗ins} → V^{⊗outs}` built from a closure on basis tensors.
    fn map_matrix(&self, ins: usize, outs: usize, f: impl Fn(&[u8]) -> Tensor) -> F2Matrix {
        let mut m = F2Matrix::zeros(1 << outs, 1 << ins);
        for j in 0..1usize << ins {
            let img = f(&unpack(j, ins));
            for i in img.coeffs.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    /// Checks `Δ∘m = (m⊗id)∘(id⊗Δ)` as maps `V⊗V → V⊗V`.
    pub fn frobenius_condition_holds(&self) -> bool {
        let lhs = self.map_matrix(2, 2, |t| {
            let mut out = Tensor::zero(2);
            for c in self.mult_terms(t[0], t[1]) {
                for (a, b) in self.comult_terms(c) {
                    out.add_basis(&[a, b]);
                }
            }
            out
        });
        let rhs = self.map_matrix(2, 2, |t| {
            let mut out = Tensor::zero(2);
            for (a, b) in self.comult_terms(t[1]) {
                for c in self.mult_terms(t[0], a) {
                    out.add_basis(&[c, b]);
                }
            }
            out
        });
        lhs == rhs
    }

    /// Matrix of the dot endomorphism on `V`.
    pub fn dot_matrix(&self) -> F2Matrix {
        self.map_matrix(1, 1, |t| {
            let mut out = Tensor::zero(1);
            for c in self.dot_terms(t[0]) {
                out.add_basis(&[c]);
            }
            out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kh() -> FrobeniusAlgebraSpec {
        FrobeniusAlgebraSpec::khovanov()
    }

    #[test]
    fn khovanov_tables() {
        let a = kh();
        let xx = a.apply(FrobeniusOp::Mult, &Tensor::basis(&[X, X])).unwrap();
        assert!(xx.is_zero());

        let d1 = a.apply(FrobeniusOp::Comult, &Tensor::basis(&[ONE])).unwrap();
        let mut expect = Tensor::basis(&[ONE, X]);
        expect.add_basis(&[X, ONE]);
        assert_eq!(d1, expect);

        let dx = a.apply(FrobeniusOp::Comult, &Tensor::basis(&[X])).unwrap();
        assert_eq!(dx, Tensor::basis(&[X, X]));

        let unit = a.apply(FrobeniusOp::Unit, &Tensor::basis(&[])).unwrap();
        assert_eq!(unit, Tensor::basis(&[ONE]));
        assert!(a.counit(X) && !a.counit(ONE));
    }

    #[test]
    fn bar_natan_tables() {
        let a = FrobeniusAlgebraSpec::bar_natan();
        let xx = a.apply(FrobeniusOp::Mult, &Tensor::basis(&[X, X])).unwrap();
        assert_eq!(xx, Tensor::basis(&[X]));
        let d1 = a.apply(FrobeniusOp::Comult, &Tensor::basis(&[ONE])).unwrap();
        let mut expect = Tensor::basis(&[ONE, X]);
        expect.add_basis(&[X, ONE]);
        expect.add_basis(&[ONE, ONE]);
        assert_eq!(d1, expect);
        let dx = a.apply(FrobeniusOp::Comult, &Tensor::basis(&[X])).unwrap();
        assert_eq!(dx, Tensor::basis(&[X, X]));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let a = kh();
        let err = a.apply(FrobeniusOp::Mult, &Tensor::basis(&[X])).unwrap_err();
        assert!(matches!(err, Error::Arity { expected: 2, found: 1, .. }));
        assert!(a.apply(FrobeniusOp::Unit, &Tensor::basis(&[X])).is_err());
    }

    #[test]
    fn frobenius_condition_and_pairing() {
        for rel in [Relation::XSquared, Relation::XSquaredPlusX] {
            let a = FrobeniusAlgebraSpec::new(rel);
            assert!(a.frobenius_condition_holds(), "{rel}");
            assert_eq!(a.pairing_matrix().rank(), 2, "{rel}");
        }
    }

    #[test]
    fn dot_squared_reduces_mod_relation() {
        let kh = kh();
        let d = kh.dot_matrix();
        assert!(d.mul(&d).is_zero());

        let bn = FrobeniusAlgebraSpec::bar_natan();
        let d = bn.dot_matrix();
        assert_eq!(d.mul(&d), d);
    }

    #[test]
    fn relation_parsing() {
        assert_eq!("X^2".parse::<Relation>().unwrap(), Relation::XSquared);
        assert_eq!("X^2 + X".parse::<Relation>().unwrap(), Relation::XSquaredPlusX);
        assert!("X^3".parse::<Relation>().is_err());
    }
}
