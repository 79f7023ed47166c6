//! Symmetric polynomials in the monomial-symmetric basis.
//!
//! A polynomial is a map from exponent multisets (stored as weakly
//! decreasing vectors, zeros allowed) to coefficients; the represented
//! function is `sum_e c_e m_e` where `m_e` sums the distinct
//! permutations of the exponent vector. Keys are multisets, so symmetry
//! holds by construction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPolynomial {
    n: usize,
    coeffs: BTreeMap<Vec<u32>, Rat>,
}

impl SymmetricPolynomial {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("no variables".into()));
        }
        Ok(SymmetricPolynomial {
            n,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets the coefficient of the multiset class of `exps` (any
    /// order). Zero coefficients are kept: a fitted polynomial reports
    /// its full basis, vanishing entries included.
    pub fn set(&mut self, mut exps: Vec<u32>, v: Rat) -> Result<()> {
        if exps.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "exponent vector {exps:?} has length {}, polynomial has {} variables",
                exps.len(),
                self.n
            )));
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        self.coeffs.insert(exps, v);
        Ok(())
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rat {
        let mut e = exps.to_vec();
        e.sort_unstable_by(|a, b| b.cmp(a));
        self.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.coeffs.iter()
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.n
            )));
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.coeffs {
            if !c.is_zero() {
                acc += &(c * &monomial_symmetric(e, point));
            }
        }
        Ok(acc)
    }
}

/// `m_e(point)`: the sum of `prod point_i^{s_i}` over all distinct
/// rearrangements `s` of `e`.
pub fn monomial_symmetric(e: &[u32], point: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for s in distinct_permutations(e) {
        let mut term = Rat::one();
        for (x, &p) in point.iter().zip(&s) {
            term *= &x.pow(i64::from(p)).expect("nonnegative power");
        }
        acc += &term;
    }
    acc
}

/// All distinct rearrangements of a multiset of exponents.
pub fn distinct_permutations(e: &[u32]) -> Vec<Vec<u32>> {
    let mut pool = e.to_vec();
    pool.sort_unstable();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(e.len());
    fn go(pool: &mut Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pool.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut last: Option<u32> = None;
        for i in 0..pool.len() {
            if last == Some(pool[i]) {
                continue;
            }
            last = Some(pool[i]);
            let v = pool.remove(i);
            cur.push(v);
            go(pool, cur, out);
            cur.pop();
            pool.insert(i, v);
        }
    }
    go(&mut pool, &mut cur, &mut out);
    out
}

/// Weakly decreasing length-`n` vectors of nonnegative integers with
/// the given sum, in lexicographically decreasing order.
pub fn exponent_multisets(n: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = rest.min(cap);
        for v in (0..=hi).rev() {
            // Remaining slots must be able to absorb the rest.
            if rest - v > v * (n - cur.len() - 1) as u32 {
                continue;
            }
            cur.push(v);
            go(n, rest - v, v, cur, out);
            cur.pop();
        }
    }
    go(n, total, total, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(
            exponent_multisets(3, 2),
            vec![vec![2, 0, 0], vec![1, 1, 0]]
        );
        assert_eq!(exponent_multisets(2, 3), vec![vec![3, 0], vec![2, 1]]);
        assert_eq!(exponent_multisets(1, 4), vec![vec![4]]);
        assert_eq!(exponent_multisets(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn distinct_permutation_counts() {
        assert_eq!(distinct_permutations(&[2, 0, 0]).len(), 3);
        assert_eq!(distinct_permutations(&[1, 1, 0]).len(), 3);
        assert_eq!(distinct_permutations(&[3, 2, 1]).len(), 6);
        assert_eq!(distinct_permutations(&[1, 1]).len(), 1);
    }

    #[test]
    fn evaluation_matches_hand_expansion() {
        // p = 2 m_{(2,0)} + m_{(1,1)} at (2, 3):
        // 2 (4 + 9) + 6 = 32.
        let mut p = SymmetricPolynomial::new(2).unwrap();
        p.set(vec![0, 2], q(2)).unwrap();
        p.set(vec![1, 1], q(1)).unwrap();
        assert_eq!(p.evaluate(&[q(2), q(3)]).unwrap(), q(32));
        // Symmetry of the evaluation.
        assert_eq!(p.evaluate(&[q(3), q(2)]).unwrap(), q(32));
        assert_eq!(p.coefficient(&[2, 0]), q(2));
        assert_eq!(p.coefficient(&[0, 1]), Rat::zero());
    }
}
