//! Unnormalized Jones polynomial by a direct state sum.
//!
//! This deliberately shares nothing with the cube code: circles are counted
//! with a private union-find over raw edge labels, so the graded Euler
//! characteristic of any homology computed elsewhere can be checked against it.

use std::collections::HashMap;

use crate::diagram::{PlanarDiagram, Sign};
use crate::error::{Error, Result};
use crate::poly::LaurentPoly;

/// Above this many crossings the state sum is refused.
pub const BRACKET_CAP: usize = 22;

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Circles in the smoothing where crossing `i` takes the 1-smoothing iff bit `i` of `state` is set.
fn loops(pairs: &[[usize; 4]], n_edges: usize, state: u64) -> usize {
    let mut p: Vec<usize> = (0..n_edges).collect();
    let mut count = n_edges;
    let mut join = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (x, y) = (find(p, a), find(p, b));
        if x != y {
            p[x] = y;
            count -= 1;
        }
    };
    for (i, &[a, b, c, d]) in pairs.iter().enumerate() {
        if state >> i & 1 == 0 {
            join(&mut p, a, b);
            join(&mut p, c, d);
        } else {
            join(&mut p, a, d);
            join(&mut p, b, c);
        }
    }
    count
}

/// `(−1)^{n₋} q^{n₊−2n₋} Σ_s (−q)^{|s|} (q+q⁻¹)^{r(s)}`, normalized so the unknot gives `q + q⁻¹`.
pub fn jones_unnormalized(d: &PlanarDiagram) -> Result<LaurentPoly> {
    let n = d.crossing_count();
    if n > BRACKET_CAP {
        return Err(Error::CrossingCap {
            crossings: n,
            cap: BRACKET_CAP,
        });
    }
    let mut index: HashMap<u32, usize> = HashMap::new();
    let mut id = |e: u32| {
        let k = index.len();
        *index.entry(e).or_insert(k)
    };
    let pairs: Vec<[usize; 4]> = d.crossings().iter().map(|x| x.0.map(&mut id)).collect();
    let n_edges = index.len();
    let free = d.free_loops().len();

    // counts[k][r]: states with k one-smoothings and r circles
    let mut counts: HashMap<(u32, usize), i64> = HashMap::new();
    for s in 0..1u64 << n {
        let r = loops(&pairs, n_edges, s) + free;
        *counts.entry((s.count_ones(), r)).or_default() += 1;
    }
    let circle = LaurentPoly::from_terms([(1, 1), (1, -1)]);
    let mut sum = LaurentPoly::zero();
    for (&(k, r), &c) in &counts {
        let sign = if k % 2 == 0 { c } else { -c };
        let term = &circle.pow(r as u32) * &LaurentPoly::monomial(sign, k as i32);
        sum = &sum + &term;
    }
    let minus = (0..n).filter(|&i| d.sign(i) == Sign::Negative).count() as i32;
    let plus = n as i32 - minus;
    let lead = if minus % 2 == 0 { 1 } else { -1 };
    Ok(&sum * &LaurentPoly::monomial(lead, plus - 2 * minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn unknot_and_unlink() {
        let circle = LaurentPoly::from_terms([(1, 1), (1, -1)]);
        assert_eq!(jones_unnormalized(&PlanarDiagram::unknot()).unwrap(), circle);
        let two = parse_pd("O(1) O(2)").unwrap();
        assert_eq!(jones_unnormalized(&two).unwrap(), circle.pow(2));
    }

    #[test]
    fn left_trefoil() {
        let t = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        // q^-1 + q^-3 + q^-5 − q^-9
        let want = LaurentPoly::from_terms([(1, -1), (1, -3), (1, -5), (-1, -9)]);
        assert_eq!(jones_unnormalized(&t).unwrap(), want);
    }

    #[test]
    fn reidemeister_one_kink() {
        let a = jones_unnormalized(&parse_pd("X(1,1,2,2)").unwrap()).unwrap();
        let b = jones_unnormalized(&parse_pd("X(1,2,2,1)").unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, jones_unnormalized(&PlanarDiagram::unknot()).unwrap());
    }

    #[test]
    fn mirror_inverts_q() {
        let f = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        let a = jones_unnormalized(&f).unwrap();
        let b = jones_unnormalized(&f.mirror()).unwrap();
        assert_eq!(a.invert(), b);
    }
}
