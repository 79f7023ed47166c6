//! Correlators re-derived by solving the Virasoro constraints as a linear
//! system, independently of the recursion in [`crate::witten`].
//!
//! Every coefficient extraction of `L_n e^F = 0` for `n` between -1 and 3
//! is written down as an equation. Products of two correlators appear in
//! these equations, but whenever such a product involves a key of the
//! genus currently being solved, its partner factor is forced to lower
//! genus (already solved) or vanishes, so each genus is a linear system
//! in its own unknowns. Genus 0 is special: there both split factors can
//! be genus 0, yet always with strictly fewer points, so genus 0 is
//! solved point-count by point-count instead. The two base values are not
//! assumed: `<tau_0^3>_0` comes out of the `t_0^2` source term of `L_-1`
//! and `<tau_1>_1` out of the `1/16` constant of `L_0`.
//!
//! Coefficients are evaluated through odd double factorial closed forms
//! rather than the product formulas the recursion uses, so the two routes
//! share no coefficient code path.

use std::collections::{BTreeMap, HashMap};

use crate::coeffs::odd_double_factorial;
use crate::error::{Error, Result};
use crate::linalg::{solve_unique, LinearFailure};
use crate::rat::Rat;
use crate::witten::{dimension_consistent, gen_sorted_keys};

/// `A^n_k = (2k+2n+1)!! / (2^{n+1} (2k-1)!!)`.
fn a_coeff(level: i64, k: i64) -> Result<Rat> {
    Ok(odd_double_factorial(2 * k + 2 * level + 1)?
        / (Rat::from_int(2).pow(level + 1)? * odd_double_factorial(2 * k - 1)?))
}

/// `B^n_k = (2k+1)!! (2n-2k-1)!! / 2^{n+1}`.
fn b_coeff(level: i64, k: i64) -> Result<Rat> {
    Ok(odd_double_factorial(2 * k + 1)? * odd_double_factorial(2 * (level - k) - 1)?
        / Rat::from_int(2).pow(level + 1)?)
}

/// `scalar * prod_f <factor_f>`; at most two factors ever occur.
struct EqTerm {
    scalar: Rat,
    factors: Vec<(u32, Vec<u32>)>,
}

/// `sum_t term_t = rhs`.
struct SymbolicEq {
    terms: Vec<EqTerm>,
    rhs: Rat,
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// All constraint extractions whose leading key is `(g, d)`: the string
/// equation if an index 0 is present (with the `t_0^2` potential source
/// on `<tau_0^3>_0`), the dilaton equation if an index 1 is present (the
/// `1/16` constant equation on `<tau_1>_1`), and one level `e - 1`
/// equation for each distinct index `e` in 2..=4.
fn extraction_equations(g: u32, d: &[u32]) -> Result<Vec<SymbolicEq>> {
    let mut out = Vec::new();
    let n = d.len();
    let own = (g, d.to_vec());

    if d.contains(&0) {
        let pos = d.iter().position(|&x| x == 0).unwrap();
        let mut rest = d.to_vec();
        rest.remove(pos);
        let mut terms = vec![EqTerm {
            scalar: Rat::one(),
            factors: vec![own.clone()],
        }];
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut sub = rest.clone();
            sub[j] -= 1;
            terms.push(EqTerm {
                scalar: -Rat::one(),
                factors: vec![(g, sorted(sub))],
            });
        }
        let rhs = if g == 0 && d == [0, 0, 0] {
            Rat::one()
        } else {
            Rat::zero()
        };
        out.push(SymbolicEq { terms, rhs });
    }

    if d.contains(&1) {
        if g == 1 && d == [1] {
            out.push(SymbolicEq {
                terms: vec![EqTerm {
                    scalar: Rat::frac(3, 2),
                    factors: vec![own.clone()],
                }],
                rhs: Rat::frac(1, 16),
            });
        } else {
            let pos = d.iter().position(|&x| x == 1).unwrap();
            let mut rest = d.to_vec();
            rest.remove(pos);
            let euler = Rat::from_int(2 * g as i64 - 2 + (n as i64 - 1));
            out.push(SymbolicEq {
                terms: vec![
                    EqTerm {
                        scalar: Rat::one(),
                        factors: vec![own.clone()],
                    },
                    EqTerm {
                        scalar: -euler,
                        factors: vec![(g, rest)],
                    },
                ],
                rhs: Rat::zero(),
            });
        }
    }

    for e in 2u32..=4 {
        if !d.contains(&e) {
            continue;
        }
        let level = (e - 1) as i64;
        let pos = d.iter().position(|&x| x == e).unwrap();
        let mut rest = d.to_vec();
        rest.remove(pos);
        let mut terms = vec![EqTerm {
            scalar: a_coeff(level, 1)?,
            factors: vec![own.clone()],
        }];
        for j in 0..rest.len() {
            let mut sub = rest.clone();
            sub[j] += level as u32;
            terms.push(EqTerm {
                scalar: -a_coeff(level, rest[j] as i64)?,
                factors: vec![(g, sorted(sub))],
            });
        }
        for k in 0..level {
            let k2 = (level - 1 - k) as u32;
            let half_b = b_coeff(level, k)? * Rat::frac(1, 2);
            if g >= 1 {
                let mut sub = rest.clone();
                sub.push(k as u32);
                sub.push(k2);
                terms.push(EqTerm {
                    scalar: -half_b.clone(),
                    factors: vec![(g - 1, sorted(sub))],
                });
            }
            for mask in 0u32..(1 << rest.len()) {
                let mut left = vec![k as u32];
                let mut right = vec![k2];
                for (j, r) in rest.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        left.push(*r);
                    } else {
                        right.push(*r);
                    }
                }
                for g1 in 0..=g {
                    terms.push(EqTerm {
                        scalar: -half_b.clone(),
                        factors: vec![
                            (g1, sorted(left.clone())),
                            (g - g1, sorted(right.clone())),
                        ],
                    });
                }
            }
        }
        out.push(SymbolicEq {
            terms,
            rhs: Rat::zero(),
        });
    }

    Ok(out)
}

enum Resolved {
    Vanishes,
    Col(usize),
    Num(Rat),
}

/// Correlator table produced by the linear route.
pub struct LinearRoute {
    table: BTreeMap<(u32, Vec<u32>), Rat>,
    max_g: u32,
    max_dim: i64,
}

impl LinearRoute {
    /// Solves for every stable dimension-consistent key with genus at
    /// most `max_g` and moduli dimension at most `max_dim`.
    pub fn solve(max_g: u32, max_dim: i64) -> Result<Self> {
        let mut route = LinearRoute {
            table: BTreeMap::new(),
            max_g,
            max_dim,
        };
        for g in 0..=max_g {
            let nmax = max_dim - 3 * g as i64 + 3;
            if g == 0 {
                for n in 3..=nmax.max(2) {
                    let block = route.block_keys(g, n as usize, n as usize);
                    route.solve_block(block)?;
                }
            } else if nmax >= 1 {
                let block = route.block_keys(g, 1, nmax as usize);
                route.solve_block(block)?;
            }
        }
        Ok(route)
    }

    fn block_keys(&self, g: u32, nmin: usize, nmax: usize) -> Vec<(u32, Vec<u32>)> {
        let mut block = Vec::new();
        for n in nmin..=nmax {
            let dim = 3 * g as i64 - 3 + n as i64;
            if dim < 0 {
                continue;
            }
            let mut keys = Vec::new();
            gen_sorted_keys(n, 0, dim as u32, dim, &mut Vec::new(), &mut keys);
            block.extend(keys.into_iter().map(|d| (g, d)));
        }
        block
    }

    fn resolve(
        &self,
        index: &HashMap<(u32, Vec<u32>), usize>,
        key: &(u32, Vec<u32>),
    ) -> Result<Resolved> {
        let (g, d) = key;
        if d.is_empty() || (*g == 0 && d.len() <= 2) {
            return Ok(Resolved::Vanishes);
        }
        if !dimension_consistent(*g, d) {
            return Ok(Resolved::Vanishes);
        }
        if let Some(&i) = index.get(key) {
            return Ok(Resolved::Col(i));
        }
        if let Some(v) = self.table.get(key) {
            return Ok(Resolved::Num(v.clone()));
        }
        Err(Error::Integrity(format!(
            "equation references unsolved key g={g} d={d:?}"
        )))
    }

    fn solve_block(&mut self, block: Vec<(u32, Vec<u32>)>) -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let index: HashMap<(u32, Vec<u32>), usize> = block
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let ncols = block.len();
        let mut rows = Vec::new();
        for (g, d) in &block {
            for eq in extraction_equations(*g, d)? {
                let mut row = vec![Rat::zero(); ncols];
                let mut rhs = eq.rhs;
                for term in eq.terms {
                    let mut cols = Vec::new();
                    let mut num = term.scalar;
                    let mut vanished = false;
                    for f in &term.factors {
                        match self.resolve(&index, f)? {
                            Resolved::Vanishes => {
                                vanished = true;
                                break;
                            }
                            Resolved::Col(i) => cols.push(i),
                            Resolved::Num(v) => num *= &v,
                        }
                    }
                    if vanished {
                        continue;
                    }
                    match cols.len() {
                        0 => rhs -= &num,
                        1 => row[cols[0]] += &num,
                        _ => {
                            return Err(Error::Integrity(format!(
                                "quadratic coupling inside one genus at g={g} d={d:?}"
                            )))
                        }
                    }
                }
                rows.push((row, rhs));
            }
        }
        let solution = solve_unique(ncols, rows).map_err(|f| match f {
            LinearFailure::RankDeficient { pivots, cols } => Error::Integrity(format!(
                "constraints determine only {pivots} of {cols} keys in block starting at g={} d={:?}",
                block[0].0, block[0].1
            )),
            LinearFailure::Inconsistent { row } => Error::Integrity(format!(
                "constraint row {row} inconsistent in block starting at g={} d={:?}",
                block[0].0, block[0].1
            )),
        })?;
        for (key, v) in block.into_iter().zip(solution) {
            self.table.insert(key, v);
        }
        Ok(())
    }

    /// Exact value for a key inside the solved range; zero when the
    /// dimension constraint fails, input error outside the range.
    pub fn value(&self, g: u32, d: &[u32]) -> Result<Rat> {
        if d.is_empty() || (g == 0 && d.len() <= 2) {
            return Err(Error::InvalidInput(format!(
                "unstable surface (g, n) = ({g}, {})",
                d.len()
            )));
        }
        if !dimension_consistent(g, d) {
            return Ok(Rat::zero());
        }
        let dim = 3 * g as i64 - 3 + d.len() as i64;
        if g > self.max_g || dim > self.max_dim {
            return Err(Error::InvalidInput(format!(
                "key g={g} d={d:?} outside solved range (g <= {}, dim <= {})",
                self.max_g, self.max_dim
            )));
        }
        let key = (g, sorted(d.to_vec()));
        self.table
            .get(&key)
            .cloned()
            .ok_or_else(|| Error::Integrity(format!("missing solved key g={g} d={d:?}")))
    }

    pub fn keys(&self) -> impl Iterator<Item = &(u32, Vec<u32>)> {
        self.table.keys()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Replays every extraction equation against the solved table and
    /// demands a zero residual; returns how many equations were checked.
    pub fn verify_extractions(&self) -> Result<usize> {
        let empty: HashMap<(u32, Vec<u32>), usize> = HashMap::new();
        let mut checked = 0usize;
        for (g, d) in self.table.keys() {
            for eq in extraction_equations(*g, d)? {
                let mut residual = -eq.rhs;
                for term in eq.terms {
                    let mut num = term.scalar;
                    let mut vanished = false;
                    for f in &term.factors {
                        match self.resolve(&empty, f)? {
                            Resolved::Vanishes => {
                                vanished = true;
                                break;
                            }
                            Resolved::Num(v) => num *= &v,
                            Resolved::Col(_) => unreachable!("empty index"),
                        }
                    }
                    if !vanished {
                        residual += num;
                    }
                }
                if !residual.is_zero() {
                    return Err(Error::CheckFailed(format!(
                        "extraction residual {residual} at g={g} d={d:?}"
                    )));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}
