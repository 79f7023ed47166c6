//! Integer partitions.
//!
//! A [`Partition`] is a weakly decreasing sequence of positive parts. It
//! names a ramification profile over a branch point, a conjugacy class of a
//! symmetric group, or an exponent multiset, depending on the caller.

use std::fmt;

use crate::error::{Error, Result};
use crate::rat::{big_factorial, Rat};

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition from arbitrary part order; parts are sorted
    /// descending. Rejects zero parts and the empty list.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("empty partition".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput("partition with zero part".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product of the parts.
    pub fn product(&self) -> Rat {
        self.0
            .iter()
            .fold(Rat::one(), |acc, &p| acc * Rat::from_int(p as i64))
    }

    /// `prod_j m_j!` over the multiplicities of the distinct part values.
    pub fn automorphism_factor(&self) -> Rat {
        let mut acc = Rat::one();
        let mut run = 1u64;
        for w in self.0.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                acc = acc * Rat::from_biguint(big_factorial(run));
                run = 1;
            }
        }
        acc * Rat::from_biguint(big_factorial(run))
    }

    /// Multiplicity vector indexed by part value `1..=size`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let n = self.size() as usize;
        let mut m = vec![0u32; n + 1];
        for &p in &self.0 {
            m[p as usize] += 1;
        }
        m
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `d` in reverse lexicographic order, `(d)` first and
/// `(1,...,1)` last. Errors on `d == 0`.
pub fn partitions_of(d: u32) -> Result<Vec<Partition>> {
    if d == 0 {
        return Err(Error::InvalidInput("partitions of zero".into()));
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    gen(d, d, &mut cur, &mut out);
    Ok(out)
}

/// Partitions of `d` with exactly `n` parts, in reverse lexicographic order.
pub fn partitions_of_length(d: u32, n: usize) -> Result<Vec<Partition>> {
    Ok(partitions_of(d)?
        .into_iter()
        .filter(|p| p.len() == n)
        .collect())
}

fn gen(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        cur.push(p);
        gen(remaining - p, p, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_six() {
        let ps = partitions_of(6).unwrap();
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            shown,
            vec![
                "(6)",
                "(5,1)",
                "(4,2)",
                "(4,1,1)",
                "(3,3)",
                "(3,2,1)",
                "(3,1,1,1)",
                "(2,2,2)",
                "(2,2,1,1)",
                "(2,1,1,1,1)",
                "(1,1,1,1,1,1)"
            ]
        );
    }

    /// Independent count via the Euler recurrence
    /// p(n) = sum_{k>=1} (-1)^{k+1} [p(n - k(3k-1)/2) + p(n - k(3k+1)/2)].
    fn partition_count_oracle(nmax: u32) -> Vec<i64> {
        let nmax = nmax as usize;
        let mut p = vec![0i64; nmax + 1];
        p[0] = 1;
        for n in 1..=nmax {
            let mut acc = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                let g2 = k * (3 * k + 1) / 2;
                if g1 as usize > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * p[n - g1 as usize];
                if g2 as usize <= n {
                    acc += sign * p[n - g2 as usize];
                }
                k += 1;
            }
            p[n] = acc;
        }
        p
    }

    #[test]
    fn counts_match_euler_recurrence() {
        let oracle = partition_count_oracle(30);
        for d in 1..=30u32 {
            let got = partitions_of(d).unwrap().len() as i64;
            assert_eq!(got, oracle[d as usize], "p({d})");
        }
        assert_eq!(oracle[28], 3718);
    }

    #[test]
    fn length_filter() {
        let ps = partitions_of_length(6, 2).unwrap();
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["(5,1)", "(4,2)", "(3,3)"]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(partitions_of(0).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn automorphism_factor_counts_repeats() {
        let p = Partition::new(vec![2, 2, 1, 1, 1]).unwrap();
        assert_eq!(p.automorphism_factor(), Rat::from_int(12));
        let q = Partition::new(vec![3]).unwrap();
        assert_eq!(q.automorphism_factor(), Rat::one());
    }

    #[test]
    fn sorting_and_accessors() {
        let p = Partition::new(vec![1, 3, 2]).unwrap();
        assert_eq!(p.parts(), &[3, 2, 1]);
        assert_eq!(p.size(), 6);
        assert_eq!(p.product(), Rat::from_int(6));
        assert_eq!(p.multiplicities()[1..4], [1, 1, 1]);
    }
}
