//! Hodge integrals from Hurwitz numbers.
//!
//! The single Hurwitz number divided by its combinatorial prefactor,
//!
//! ```text
//! P^g(alpha) = H^g_alpha / (r! prod alpha_i^{alpha_i} / alpha_i!),
//! ```
//!
//! is a symmetric polynomial in the parts of `alpha` whose homogeneous
//! components live in total degrees `2g-3+n` through `3g-3+n`, and
//! whose monomial-symmetric coefficients are signed Hodge integrals:
//! the coefficient of `m_a` equals `(-1)^k int psi_1^{a_1} ... psi_n^{a_n}
//! lambda_k` with `k = 3g-3+n - sum a_i`. Fitting the polynomial on an
//! oversampled grid therefore measures the integrals, the surplus rows
//! proving polynomiality along the way. The degree-`3g-3+n` layer
//! (`k = 0`) must reproduce the intersection numbers of the recursion
//! engine, and the `k = g` layer is proportional to multinomial
//! coefficients with a genus constant `c_g`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::HurwitzEngine;
use crate::linalg::{solve_unique, LinearFailure};
use crate::partition::Partition;
use crate::rat::Rat;
use crate::sympoly::{exponent_multisets, monomial_symmetric, SymmetricPolynomial};

pub fn stable(g: u32, n: usize) -> bool {
    n > 0 && 2 * i64::from(g) - 2 + n as i64 > 0
}

/// Homogeneous degrees a fitted `P^g` may occupy.
pub fn degree_band(g: u32, n: usize) -> (u32, u32) {
    let lo = 2 * g as i64 - 3 + n as i64;
    let hi = 3 * g as i64 - 3 + n as i64;
    (lo.max(0) as u32, hi.max(0) as u32)
}

/// `P^g(alpha)`: the single Hurwitz number with the exponential
/// prefactor removed, i.e. the value the Hodge-integral polynomial
/// takes at the parts of `alpha`.
pub fn normalized_single_hurwitz(
    engine: &mut HurwitzEngine,
    g: u32,
    alpha: &Partition,
) -> Result<Rat> {
    let n = alpha.len();
    if !stable(g, n) {
        return Err(Error::InvalidInput(format!(
            "(g, n) = ({g}, {n}) is unstable"
        )));
    }
    let d = alpha.size();
    let r = 2 * g + d + n as u32 - 2;
    let h = engine.single_hurwitz(g, alpha)?;
    let mut pre = Rat::factorial(u64::from(r));
    for &a in alpha.parts() {
        pre *= &(Rat::from_int(i64::from(a)).pow(i64::from(a))? / Rat::factorial(u64::from(a)));
    }
    Ok(h / pre)
}

/// All length-`n` partitions with parts in `1..=max_part`, the default
/// sampling grid.
pub fn grid_partitions(n: usize, max_part: u32) -> Result<Vec<Partition>> {
    if n == 0 || max_part == 0 {
        return Err(Error::InvalidInput("empty grid request".into()));
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(n);
    fn go(n: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if cur.len() == n {
            out.push(Partition::new(cur.clone()).expect("positive parts"));
            return;
        }
        for v in (1..=cap).rev() {
            cur.push(v);
            go(n, v, cur, out);
            cur.pop();
        }
    }
    go(n, max_part, &mut cur, &mut out);
    Ok(out)
}

/// Fits the banded symmetric polynomial through `P^g` on the grid.
///
/// The system must carry at least 20% more samples than unknowns; the
/// surplus rows are the polynomiality check, and any inconsistency
/// among them is reported as such rather than averaged away.
pub fn interpolate_hurwitz_polynomial(
    engine: &mut HurwitzEngine,
    g: u32,
    n: usize,
    grid: &[Partition],
) -> Result<SymmetricPolynomial> {
    if !stable(g, n) {
        return Err(Error::InvalidInput(format!(
            "(g, n) = ({g}, {n}) is unstable"
        )));
    }
    let (lo, hi) = degree_band(g, n);
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for total in lo..=hi {
        basis.extend(exponent_multisets(n, total));
    }
    let needed = basis.len() + basis.len().div_ceil(5);
    if grid.len() < needed {
        return Err(Error::DegenerateGrid(format!(
            "{} samples for {} unknowns; need at least {needed} for the 20% surplus",
            grid.len(),
            basis.len()
        )));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for alpha in grid {
        if alpha.len() != n {
            return Err(Error::InvalidInput(format!(
                "grid partition {alpha} does not have {n} parts"
            )));
        }
        let point: Vec<Rat> = alpha
            .parts()
            .iter()
            .map(|&p| Rat::from_int(i64::from(p)))
            .collect();
        let row: Vec<Rat> = basis.iter().map(|e| monomial_symmetric(e, &point)).collect();
        let rhs = normalized_single_hurwitz(engine, g, alpha)?;
        rows.push((row, rhs));
    }
    let solution = solve_unique(basis.len(), rows).map_err(|e| match e {
        LinearFailure::RankDeficient { pivots, cols } => Error::DegenerateGrid(format!(
            "grid spans only {pivots} of {cols} basis directions"
        )),
        LinearFailure::Inconsistent { row } => Error::PolynomialityViolation(format!(
            "validation residual at grid point {row} is nonzero"
        )),
    })?;
    let mut poly = SymmetricPolynomial::new(n)?;
    for (e, c) in basis.into_iter().zip(solution) {
        poly.set(e, c)?;
    }
    Ok(poly)
}

/// Signed Hodge integrals read off a fitted polynomial: the table maps
/// `(a_1 <= ... <= a_n, k)` to `int psi^a lambda_k`.
#[derive(Debug, Clone)]
pub struct HodgeIntegralTable {
    pub g: u32,
    pub n: usize,
    entries: BTreeMap<(Vec<u32>, u32), Rat>,
}

impl HodgeIntegralTable {
    pub fn get(&self, a: &[u32], k: u32) -> Option<&Rat> {
        let mut key = a.to_vec();
        key.sort_unstable();
        self.entries.get(&(key, k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<u32>, u32), &Rat)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rebuilds a table from stored entries, enforcing the same `(a, k)`
    /// lattice the extraction produces. Keys are sorted on the way in,
    /// duplicates are rejected.
    pub fn from_entries<I>(g: u32, n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((Vec<u32>, u32), Rat)>,
    {
        if !stable(g, n) {
            return Err(Error::InvalidInput(format!(
                "({g}, {n}) is outside the stable range"
            )));
        }
        let dim = 3 * g + n as u32 - 3;
        let mut map = BTreeMap::new();
        for ((mut a, k), v) in entries {
            if a.len() != n {
                return Err(Error::InvalidInput(format!(
                    "entry with {} exponents in a table for n = {n}",
                    a.len()
                )));
            }
            a.sort_unstable();
            let total: u32 = a.iter().sum();
            if k > g || total + k != dim {
                return Err(Error::Integrity(format!(
                    "entry ({a:?}, {k}) lies outside the (a, k) lattice of (g, n) = ({g}, {n})"
                )));
            }
            if map.insert((a.clone(), k), v).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry at ({a:?}, {k})"
                )));
            }
        }
        Ok(HodgeIntegralTable { g, n, entries: map })
    }
}

/// All `(a, k)` lattice points a fitted `(g, n)` table contains, with
/// `a` ascending within each key and the keys sorted.
pub fn lattice_keys(g: u32, n: usize) -> Result<Vec<(Vec<u32>, u32)>> {
    if !stable(g, n) {
        return Err(Error::InvalidInput(format!(
            "({g}, {n}) is outside the stable range"
        )));
    }
    let dim = 3 * g + n as u32 - 3;
    let (lo, hi) = degree_band(g, n);
    let mut keys = Vec::new();
    for total in lo..=hi {
        for mut a in exponent_multisets(n, total) {
            a.sort_unstable();
            keys.push((a, dim - total));
        }
    }
    keys.sort();
    Ok(keys)
}

pub fn extract_hodge_integrals(
    poly: &SymmetricPolynomial,
    g: u32,
    n: usize,
) -> Result<HodgeIntegralTable> {
    if poly.n() != n {
        return Err(Error::InvalidInput(format!(
            "polynomial in {} variables, table for n = {n}",
            poly.n()
        )));
    }
    let dim = 3 * g + n as u32 - 3;
    let mut entries = BTreeMap::new();
    for (e, c) in poly.iter() {
        let total: u32 = e.iter().sum();
        if total > dim || dim - total > g {
            return Err(Error::Integrity(format!(
                "coefficient at {e:?} lies outside the (a, k) lattice of (g, n) = ({g}, {n})"
            )));
        }
        let k = dim - total;
        let mut a = e.clone();
        a.sort_unstable();
        let v = if k % 2 == 1 { -c.clone() } else { c.clone() };
        entries.insert((a, k), v);
    }
    Ok(HodgeIntegralTable { g, n, entries })
}

/// Per-entry outcome of the top-lambda proportionality test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaGEntry {
    pub a: Vec<u32>,
    pub expected: Rat,
    pub actual: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaGCheck {
    pub c_g: Rat,
    pub entries: Vec<LambdaGEntry>,
    pub all_match: bool,
}

/// Verifies that the `k = g` entries are `multinomial(2g-3+n; a) c_g`
/// for a single constant `c_g`, read off the first entry.
pub fn check_lambda_g(table: &HodgeIntegralTable) -> Result<LambdaGCheck> {
    let g = table.g;
    let top: Vec<(&(Vec<u32>, u32), &Rat)> =
        table.iter().filter(|((_, k), _)| *k == g).collect();
    if top.is_empty() {
        return Err(Error::InvalidInput(format!(
            "table for (g, n) = ({g}, {}) has no k = {g} entries",
            table.n
        )));
    }
    let m = 2 * u64::from(g) + table.n as u64 - 3;
    let weight = |a: &[u32]| -> Result<Rat> {
        let parts: Vec<u64> = a.iter().map(|&x| u64::from(x)).collect();
        Rat::multinomial(m, &parts)
    };
    let ((a0, _), v0) = top[0];
    let c_g = v0.clone() / weight(a0)?;
    let mut entries = Vec::with_capacity(top.len());
    let mut all_match = true;
    for ((a, _), v) in top {
        let mut expected = weight(a)?;
        expected *= &c_g;
        let ok = expected == *v;
        all_match &= ok;
        entries.push(LambdaGEntry {
            a: a.clone(),
            expected,
            actual: v.clone(),
            ok,
        });
    }
    Ok(LambdaGCheck {
        c_g,
        entries,
        all_match,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReportEntry {
    a: Vec<u32>,
    k: u32,
    v: Rat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReportLambda {
    c_g: Rat,
    all_match: bool,
}

/// Canonical JSON report: the full table plus the lambda_g summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElsvReport {
    g: u32,
    n: usize,
    band: [u32; 2],
    entries: Vec<ReportEntry>,
    lambda_g: ReportLambda,
}

impl ElsvReport {
    pub fn build(table: &HodgeIntegralTable) -> Result<Self> {
        let check = check_lambda_g(table)?;
        let (lo, hi) = degree_band(table.g, table.n);
        Ok(ElsvReport {
            g: table.g,
            n: table.n,
            band: [lo, hi],
            entries: table
                .iter()
                .map(|((a, k), v)| ReportEntry {
                    a: a.clone(),
                    k: *k,
                    v: v.clone(),
                })
                .collect(),
            lambda_g: ReportLambda {
                c_g: check.c_g,
                all_match: check.all_match,
            },
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witten::CorrelatorEngine;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalized_values_pinned() {
        let mut eng = HurwitzEngine::new();
        assert_eq!(
            normalized_single_hurwitz(&mut eng, 1, &part(&[2])).unwrap(),
            Rat::frac(1, 24)
        );
        assert_eq!(
            normalized_single_hurwitz(&mut eng, 0, &part(&[1, 1, 1])).unwrap(),
            Rat::one()
        );
        assert_eq!(
            normalized_single_hurwitz(&mut eng, 1, &part(&[1])).unwrap(),
            Rat::zero()
        );
        assert!(matches!(
            normalized_single_hurwitz(&mut eng, 0, &part(&[2, 1])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn torus_one_point_polynomial() {
        // P(alpha) = alpha/24 - 1/24 on the (1,1) band [0,1].
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(1, 4).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 1, 1, &grid).unwrap();
        assert_eq!(poly.coefficient(&[1]), Rat::frac(1, 24));
        assert_eq!(poly.coefficient(&[0]), Rat::frac(-1, 24));
    }

    #[test]
    fn sphere_three_point_polynomial_is_constant() {
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(3, 3).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 0, 3, &grid).unwrap();
        assert_eq!(poly.iter().count(), 1);
        assert_eq!(poly.coefficient(&[0, 0, 0]), Rat::one());
    }

    #[test]
    fn torus_two_point_band() {
        // Band [1, 2], both layers occupied; the top layer repeats the
        // intersection numbers 1/24 and the k = 1 entry is int psi lambda_1.
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(2, 5).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 1, 2, &grid).unwrap();
        let mut degrees: Vec<u32> = poly
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| e.iter().sum())
            .collect();
        degrees.sort_unstable();
        degrees.dedup();
        assert_eq!(degrees, vec![1, 2]);
        let table = extract_hodge_integrals(&poly, 1, 2).unwrap();
        assert_eq!(table.get(&[2, 0], 0), Some(&Rat::frac(1, 24)));
        assert_eq!(table.get(&[1, 1], 0), Some(&Rat::frac(1, 24)));
        assert_eq!(table.get(&[1, 0], 1), Some(&Rat::frac(1, 24)));
    }

    #[test]
    fn hodge_integrals_for_torus_one_point() {
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(1, 4).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 1, 1, &grid).unwrap();
        let table = extract_hodge_integrals(&poly, 1, 1).unwrap();
        assert_eq!(table.get(&[1], 0), Some(&Rat::frac(1, 24)));
        assert_eq!(table.get(&[0], 1), Some(&Rat::frac(1, 24)));
        let check = check_lambda_g(&table).unwrap();
        assert_eq!(check.c_g, Rat::frac(1, 24));
        assert!(check.all_match);
    }

    #[test]
    fn genus_two_one_point_pipeline() {
        // Independent route to three classical integrals: psi^4 is the
        // recursion value 1/1152, psi^3 lambda_1 = 1/480, and
        // psi^2 lambda_2 = c_2 = 7/5760.
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(1, 7).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 2, 1, &grid).unwrap();
        let table = extract_hodge_integrals(&poly, 2, 1).unwrap();
        assert_eq!(table.get(&[4], 0), Some(&Rat::frac(1, 1152)));
        assert_eq!(table.get(&[3], 1), Some(&Rat::frac(1, 480)));
        assert_eq!(table.get(&[2], 2), Some(&Rat::frac(7, 5760)));
        let mut witten = CorrelatorEngine::new();
        assert_eq!(
            table.get(&[4], 0).cloned().unwrap(),
            witten.correlator(2, &[4]).unwrap()
        );
    }

    #[test]
    fn degenerate_grid_detected() {
        // Points on the diagonal cannot separate m_(2,0) from m_(1,1).
        let mut eng = HurwitzEngine::new();
        let grid: Vec<Partition> = (1..=6).map(|k| part(&[k, k])).collect();
        let err = interpolate_hurwitz_polynomial(&mut eng, 1, 2, &grid).unwrap_err();
        assert!(matches!(err, Error::DegenerateGrid(_)), "{err:?}");
        // Too few samples is also a grid failure.
        let grid = grid_partitions(2, 2).unwrap();
        let err = interpolate_hurwitz_polynomial(&mut eng, 1, 2, &grid).unwrap_err();
        assert!(matches!(err, Error::DegenerateGrid(_)), "{err:?}");
    }

    #[test]
    fn perturbed_table_flagged() {
        // The (1, 3) top layer has two entries, multinomial weights 1
        // and 2; corrupt the second and expect exactly it to be flagged.
        let mut entries = BTreeMap::new();
        entries.insert((vec![0, 0, 2], 1u32), Rat::frac(1, 24));
        entries.insert((vec![0, 1, 1], 1u32), Rat::frac(1, 7));
        let table = HodgeIntegralTable { g: 1, n: 3, entries };
        let check = check_lambda_g(&table).unwrap();
        assert_eq!(check.c_g, Rat::frac(1, 24));
        assert!(!check.all_match);
        let bad: Vec<&LambdaGEntry> = check.entries.iter().filter(|e| !e.ok).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].a, vec![0, 1, 1]);
        assert_eq!(bad[0].expected, Rat::frac(1, 12));
    }

    #[test]
    fn report_json_shape() {
        let mut eng = HurwitzEngine::new();
        let grid = grid_partitions(1, 4).unwrap();
        let poly = interpolate_hurwitz_polynomial(&mut eng, 1, 1, &grid).unwrap();
        let table = extract_hodge_integrals(&poly, 1, 1).unwrap();
        let json = ElsvReport::build(&table).unwrap().to_json().unwrap();
        assert_eq!(
            json,
            r#"{"g":1,"n":1,"band":[0,1],"entries":[{"a":[0],"k":1,"v":"1/24"},{"a":[1],"k":0,"v":"1/24"}],"lambda_g":{"c_g":"1/24","all_match":true}}"#
        );
    }
}
