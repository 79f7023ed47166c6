//! Intersection numbers of psi classes on moduli of stable curves.
//!
//! The engine computes the correlators `<tau_{d_1} ... tau_{d_n}>_g` by a
//! recursion read off from the Virasoro constraints: a correlator with an
//! entry of at least 2 is pulled down through the level `d_max - 1`
//! constraint, entries 0 and 1 fall to the string and dilaton equations,
//! and everything bottoms out at `<tau_0^3>_0` and `<tau_1>_1`. The two
//! base values are injectable so that a caller can study how a wrong seed
//! propagates into downstream identities.

use std::collections::HashMap;
use std::fmt::Write as FmtWrite;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coeffs::{virasoro_coefficient, CoeffFamily};
use crate::error::{Error, Result};
use crate::rat::{big_factorial, Rat};
use crate::series::{Family, TruncatedSeries, TruncationSpec};

/// One correlator value in interchange form. Lines of the JSONL store and
/// the payload of the `correlator` command both use this shape, with the
/// fields in exactly this order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelatorRecord {
    pub g: u32,
    pub d: Vec<u32>,
    pub v: Rat,
}

/// Memoizing correlator engine.
pub struct CorrelatorEngine {
    memo: HashMap<(u32, Vec<u32>), Rat>,
    base_sphere: Rat,
    base_torus: Rat,
}

impl Default for CorrelatorEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl CorrelatorEngine {
    pub fn new() -> Self {
        Self::with_bases(Rat::one(), Rat::frac(1, 24))
    }

    /// Engine whose two base correlators `<tau_0^3>_0` and `<tau_1>_1`
    /// take the given values instead of 1 and 1/24. Everything derived
    /// from the bases moves with them, which is what makes seed
    /// perturbation a meaningful falsification probe.
    pub fn with_bases(base_sphere: Rat, base_torus: Rat) -> Self {
        CorrelatorEngine {
            memo: HashMap::new(),
            base_sphere,
            base_torus,
        }
    }

    /// `<tau_{d_1} ... tau_{d_n}>_g`, zero whenever the degrees miss the
    /// dimension of the moduli space. Insertion order does not matter.
    /// The unstable `(g, n)` pairs have no moduli space to integrate
    /// over, so asking for them is an input error rather than a zero.
    pub fn correlator(&mut self, g: u32, d: &[u32]) -> Result<Rat> {
        if d.is_empty() || (g == 0 && d.len() <= 2) {
            return Err(Error::InvalidInput(format!(
                "unstable surface (g, n) = ({g}, {})",
                d.len()
            )));
        }
        let mut key = d.to_vec();
        key.sort_unstable();
        self.eval(g, key)
    }

    fn eval(&mut self, g: u32, key: Vec<u32>) -> Result<Rat> {
        if !dimension_consistent(g, &key) {
            return Ok(Rat::zero());
        }
        if let Some(v) = self.memo.get(&(g, key.clone())) {
            return Ok(v.clone());
        }
        let v = if g == 0 && key == [0, 0, 0] {
            self.base_sphere.clone()
        } else if g == 1 && key == [1] {
            self.base_torus.clone()
        } else if *key.last().unwrap() >= 2 {
            self.pull_max(g, &key)?
        } else if key[0] == 0 {
            self.string_step(g, &key)?
        } else {
            self.dilaton_step(g, &key)?
        };
        self.memo.insert((g, key), v.clone());
        Ok(v)
    }

    /// Level `d_max - 1` Virasoro step. `key` is sorted ascending with
    /// `key.last() >= 2`; that last entry is the one being pulled.
    fn pull_max(&mut self, g: u32, key: &[u32]) -> Result<Rat> {
        let m = *key.last().unwrap();
        let rest = &key[..key.len() - 1];
        let level = (m - 1) as i64;
        let lead = virasoro_coefficient(CoeffFamily::First, level, 1)?;
        let mut acc = Rat::zero();

        for j in 0..rest.len() {
            let mut sub = rest.to_vec();
            sub[j] += level as u32;
            let a = virasoro_coefficient(CoeffFamily::First, level, rest[j] as i64)?;
            acc += a * self.eval(g, sorted(sub))?;
        }

        for k in 0..level {
            let k2 = (level - 1 - k) as u32;
            let sign = if (k + 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
            let b = sign * virasoro_coefficient(CoeffFamily::Second, level, k)?;
            let mut inner = Rat::zero();
            if g >= 1 {
                let mut sub = rest.to_vec();
                sub.push(k as u32);
                sub.push(k2);
                inner += self.eval(g - 1, sorted(sub))?;
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
                    let va = self.eval(g1, sorted(left.clone()))?;
                    if va.is_zero() {
                        continue;
                    }
                    let vb = self.eval(g - g1, sorted(right.clone()))?;
                    inner += va * vb;
                }
            }
            acc += Rat::frac(1, 2) * b * inner;
        }
        Ok(acc / lead)
    }

    /// String equation: drop one `tau_0` and lower each remaining index
    /// in turn.
    fn string_step(&mut self, g: u32, key: &[u32]) -> Result<Rat> {
        let rest = &key[1..];
        let mut acc = Rat::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut sub = rest.to_vec();
            sub[j] -= 1;
            acc += self.eval(g, sorted(sub))?;
        }
        Ok(acc)
    }

    /// Dilaton equation: drop one `tau_1` against the Euler factor
    /// `2g - 2 + n` of what remains.
    fn dilaton_step(&mut self, g: u32, key: &[u32]) -> Result<Rat> {
        let rest = key[1..].to_vec();
        let factor = Rat::from_int(2 * g as i64 - 2 + rest.len() as i64);
        Ok(factor * self.eval(g, rest)?)
    }

    /// The free energy `F = sum <prod tau_{k}^{m_k}>_g / prod m_k! *
    /// h^{2g-2} prod t_k^{m_k}` over the requested truncation region.
    ///
    /// The window must reach down to `h = -2` where the genus 0 part
    /// lives; anything claiming a higher floor would misstate the support
    /// of the true series.
    pub fn f_truncated(&mut self, spec: TruncationSpec) -> Result<TruncatedSeries> {
        if spec.hmin > -2 {
            return Err(Error::ExactnessViolation(format!(
                "free energy support starts at h = -2, window floor {} is above it",
                spec.hmin
            )));
        }
        let mut f = TruncatedSeries::zero(Family::T, spec);
        let mut g = 0u32;
        while 2 * g as i64 - 2 <= spec.hmax {
            let h = 2 * g as i64 - 2;
            for n in 1..=spec.d as usize {
                let target = 3 * g as i64 - 3 + n as i64;
                if target < 0 {
                    continue;
                }
                let mut cur = Vec::with_capacity(n);
                let mut keys = Vec::new();
                gen_sorted_keys(n, 0, spec.k, target, &mut cur, &mut keys);
                for key in keys {
                    let value = self.eval(g, key.clone())?;
                    if value.is_zero() {
                        continue;
                    }
                    let mut exps = vec![0u32; spec.k as usize + 1];
                    for &e in &key {
                        exps[e as usize] += 1;
                    }
                    let mut denom = Rat::one();
                    for &m in exps.iter().filter(|&&m| m > 1) {
                        denom = denom * Rat::from_biguint(big_factorial(m as u64));
                    }
                    f.add_term(h, exps, value / denom)?;
                }
            }
            g += 1;
        }
        Ok(f)
    }

    /// Writes every memoized correlator as one JSONL line, sorted by key.
    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<_> = self.memo.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for ((g, d), v) in entries {
            let rec = CorrelatorRecord {
                g: *g,
                d: d.clone(),
                v: v.clone(),
            };
            writeln!(out, "{}", serde_json::to_string(&rec)?)
                .expect("string formatting cannot fail");
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Preloads memoized values from a JSONL store. Malformed lines,
    /// dimension-violating keys, and values conflicting with ones already
    /// present are integrity errors naming the offending line.
    pub fn load_jsonl(&mut self, path: &Path) -> Result<usize> {
        let text = fs::read_to_string(path)?;
        let mut loaded = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CorrelatorRecord =
                serde_json::from_str(line).map_err(|e| Error::CacheIntegrity {
                    line: line_no,
                    msg: format!("unparseable correlator record: {e}"),
                })?;
            if rec.d.is_empty() || !dimension_consistent(rec.g, &rec.d) {
                return Err(Error::CacheIntegrity {
                    line: line_no,
                    msg: format!("key g={} d={:?} violates the dimension constraint", rec.g, rec.d),
                });
            }
            let key = (rec.g, sorted(rec.d));
            if let Some(old) = self.memo.get(&key) {
                if *old != rec.v {
                    return Err(Error::CacheIntegrity {
                        line: line_no,
                        msg: format!(
                            "stored value {} conflicts with computed {}",
                            rec.v, old
                        ),
                    });
                }
            } else {
                self.memo.insert(key, rec.v);
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// `sum d_i == 3g - 3 + n`, the codimension condition for a nonzero
/// intersection number.
pub fn dimension_consistent(g: u32, d: &[u32]) -> bool {
    let dim = 3 * g as i64 - 3 + d.len() as i64;
    d.iter().map(|&x| x as i64).sum::<i64>() == dim
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Weakly increasing `n`-tuples with entries in `[min, max]` summing to
/// `target`, appended to `out`.
pub fn gen_sorted_keys(
    n: usize,
    min: u32,
    max: u32,
    target: i64,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if n == 0 {
        if target == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for e in min..=max {
        let e_i = e as i64;
        if e_i > target {
            break;
        }
        if target - e_i > (n as i64 - 1) * max as i64 {
            continue;
        }
        cur.push(e);
        gen_sorted_keys(n - 1, e, max, target - e_i, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    /// Genus 0 closed form `(n-3)! / prod d_i!` for `sum d_i = n - 3`,
    /// independent of the recursion.
    fn genus0_oracle(d: &[u32]) -> Rat {
        let n = d.len() as i64;
        let sum: i64 = d.iter().map(|&x| x as i64).sum();
        if n < 3 || sum != n - 3 {
            return Rat::zero();
        }
        let mut denom = Rat::one();
        for &x in d {
            denom = denom * Rat::from_biguint(big_factorial(x as u64));
        }
        Rat::from_biguint(big_factorial((n - 3) as u64)) / denom
    }

    #[test]
    fn base_values() {
        let mut e = CorrelatorEngine::new();
        assert_eq!(e.correlator(0, &[0, 0, 0]).unwrap(), Rat::one());
        assert_eq!(e.correlator(1, &[1]).unwrap(), Rat::frac(1, 24));
    }

    #[test]
    fn dimension_violations_vanish() {
        let mut e = CorrelatorEngine::new();
        assert_eq!(e.correlator(0, &[1, 0, 0]).unwrap(), Rat::zero());
        assert_eq!(e.correlator(1, &[0]).unwrap(), Rat::zero());
        assert_eq!(e.correlator(2, &[1, 1, 1]).unwrap(), Rat::zero());
    }

    #[test]
    fn unstable_surfaces_are_input_errors() {
        let mut e = CorrelatorEngine::new();
        assert!(e.correlator(0, &[]).is_err());
        assert!(e.correlator(1, &[]).is_err());
        assert!(e.correlator(0, &[0]).is_err());
        assert!(e.correlator(0, &[1, 0]).is_err());
    }

    #[test]
    fn genus0_matches_closed_form() {
        let mut e = CorrelatorEngine::new();
        for n in 3..=8usize {
            let mut keys = Vec::new();
            gen_sorted_keys(n, 0, n as u32, n as i64 - 3, &mut Vec::new(), &mut keys);
            assert!(!keys.is_empty());
            for key in keys {
                assert_eq!(
                    e.correlator(0, &key).unwrap(),
                    genus0_oracle(&key),
                    "g=0 d={key:?}"
                );
            }
        }
    }

    #[test]
    fn frozen_values() {
        let mut e = CorrelatorEngine::new();
        assert_eq!(e.correlator(0, &[2, 0, 0, 0, 0]).unwrap(), Rat::one());
        assert_eq!(e.correlator(2, &[4]).unwrap(), Rat::frac(1, 1152));
        assert_eq!(e.correlator(1, &[0, 2]).unwrap(), Rat::frac(1, 24));
        assert_eq!(e.correlator(1, &[1, 1]).unwrap(), Rat::frac(1, 24));
        assert_eq!(e.correlator(1, &[1, 1, 1]).unwrap(), Rat::frac(1, 12));
        assert_eq!(e.correlator(2, &[2, 3]).unwrap(), Rat::frac(29, 5760));
    }

    #[test]
    fn string_and_dilaton_shadow_the_level_route() {
        // Both keys have max >= 2 and go through the Virasoro pull, yet
        // must agree with what string and dilaton predict from <tau_4>_2.
        let mut e = CorrelatorEngine::new();
        let t4 = e.correlator(2, &[4]).unwrap();
        assert_eq!(e.correlator(2, &[0, 5]).unwrap(), t4);
        assert_eq!(
            e.correlator(2, &[1, 4]).unwrap(),
            Rat::from_int(3) * t4
        );
    }

    #[test]
    fn insertion_order_irrelevant() {
        let mut e = CorrelatorEngine::new();
        let a = e.correlator(1, &[2, 0, 1, 1]).unwrap();
        let b = e.correlator(1, &[1, 1, 0, 2]).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }

    #[test]
    fn perturbed_bases_propagate() {
        let mut e = CorrelatorEngine::with_bases(Rat::one(), Rat::frac(1, 24) + Rat::frac(1, 25));
        assert_eq!(
            e.correlator(1, &[1]).unwrap(),
            Rat::frac(1, 24) + Rat::frac(1, 25)
        );
        // Genus 0 does not see the torus base.
        assert_eq!(e.correlator(0, &[0, 0, 0, 1]).unwrap(), Rat::one());
        // Genus 1 values derived from the base move with it.
        let clean = CorrelatorEngine::new().correlator(1, &[0, 2]).unwrap();
        assert_ne!(e.correlator(1, &[0, 2]).unwrap(), clean);
    }

    #[test]
    fn free_energy_coefficients() {
        let mut e = CorrelatorEngine::new();
        let spec = TruncationSpec::new(3, 5, -2, 0).unwrap();
        let f = e.f_truncated(spec).unwrap();
        // <tau_0^3>_0 / 3!.
        assert_eq!(f.coeff(-2, &[3, 0, 0, 0]).unwrap(), Rat::frac(1, 6));
        // <tau_0^3 tau_1>_0 / 3! = 1/6.
        assert_eq!(f.coeff(-2, &[3, 1, 0, 0]).unwrap(), Rat::frac(1, 6));
        // tau_0^2 tau_1 misses the dimension, so its coefficient is 0.
        assert_eq!(f.coeff(-2, &[2, 1, 0, 0]).unwrap(), Rat::zero());
        // <tau_1>_1 at h = 0.
        assert_eq!(f.coeff(0, &[0, 1, 0, 0]).unwrap(), Rat::frac(1, 24));
        assert!(e
            .f_truncated(TruncationSpec::new(3, 5, -1, 0).unwrap())
            .is_err());
    }

    #[test]
    fn jsonl_roundtrip_and_integrity() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("store.jsonl");
        let mut e = CorrelatorEngine::new();
        e.correlator(2, &[4]).unwrap();
        e.save_jsonl(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let line = text.lines().find(|l| l.contains("\"g\":2")).unwrap();
        assert!(line.starts_with("{\"g\":2,\"d\":[4],\"v\":\"1/1152\"}"));

        let mut fresh = CorrelatorEngine::new();
        let loaded = fresh.load_jsonl(&path).unwrap();
        assert!(loaded > 0);
        assert_eq!(fresh.correlator(2, &[4]).unwrap(), Rat::frac(1, 1152));

        fs::write(&path, "{\"g\":1,\"d\":[2],\"v\":\"1/3\"}\n").unwrap();
        let mut bad = CorrelatorEngine::new();
        match bad.load_jsonl(&path) {
            Err(Error::CacheIntegrity { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected integrity error, got {other:?}"),
        }

        fs::write(&path, "{\"g\":2,\"d\":[4],\"v\":\"1/7\"}\n").unwrap();
        let mut conflicted = CorrelatorEngine::new();
        conflicted.correlator(2, &[4]).unwrap();
        assert!(matches!(
            conflicted.load_jsonl(&path),
            Err(Error::CacheIntegrity { line: 1, .. })
        ));
    }
}
