//! Truncated formal power series with certified exactness windows.
//!
//! A [`TruncatedSeries`] stores finitely many coefficients of a series in a
//! variable family and a formal parameter `h` (which may appear with
//! negative exponents). The attached [`TruncationSpec`] is a contract, not
//! a hint:
//!
//! * every stored or absent coefficient with total degree at most `D`,
//!   variables inside the family width, and `h` in `[hmin, hmax]` equals
//!   the coefficient of the underlying exact series, and
//! * the underlying series has no term with total degree at most `D` and
//!   variables inside the width whose `h` lies below `hmin`.
//!
//! Every operation derives the widest window for which it can certify both
//! properties of its result and fails with
//! [`Error::ExactnessViolation`](crate::Error::ExactnessViolation) when
//! that window is empty. Nothing is ever stored outside its own window, so
//! reading a coefficient inside the window is always exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Which indexed variable family the slots refer to.
///
/// `T` has width `K + 1` with slot `i` holding `t_i`; `P` has width `K`
/// with slot `i` holding `p_{i+1}` (there is no `p_0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    T,
    P,
}

impl Family {
    pub fn width(self, k: u32) -> usize {
        match self {
            Family::T => k as usize + 1,
            Family::P => k as usize,
        }
    }

    /// Human name of the variable in the given slot.
    pub fn var_name(self, slot: usize) -> String {
        match self {
            Family::T => format!("t_{slot}"),
            Family::P => format!("p_{}", slot + 1),
        }
    }
}

/// Certified truncation region; see the module documentation for the
/// contract it expresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSpec {
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(rename = "Hmin")]
    pub hmin: i64,
    #[serde(rename = "Hmax")]
    pub hmax: i64,
}

impl TruncationSpec {
    pub fn new(k: u32, d: u32, hmin: i64, hmax: i64) -> Result<Self> {
        if hmin > hmax {
            return Err(Error::ExactnessViolation(format!(
                "empty h window [{hmin}, {hmax}]"
            )));
        }
        Ok(TruncationSpec { k, d, hmin, hmax })
    }
}

fn degree(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

/// Sparse truncated series over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    family: Family,
    spec: TruncationSpec,
    terms: BTreeMap<(i64, Vec<u32>), Rat>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    h: i64,
    e: Vec<u32>,
    v: Rat,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    family: Family,
    spec: TruncationSpec,
    terms: Vec<TermRepr>,
}

impl TruncatedSeries {
    pub fn zero(family: Family, spec: TruncationSpec) -> Self {
        TruncatedSeries {
            family,
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn spec(&self) -> TruncationSpec {
        self.spec
    }

    pub fn width(&self) -> usize {
        self.family.width(self.spec.k)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, Vec<u32>), &Rat)> {
        self.terms.iter()
    }

    fn check_key(&self, exps: &[u32]) -> Result<()> {
        if exps.len() != self.width() {
            return Err(Error::InvalidInput(format!(
                "exponent vector has {} slots, series has {}",
                exps.len(),
                self.width()
            )));
        }
        if degree(exps) > self.spec.d {
            return Err(Error::ExactnessViolation(format!(
                "degree {} beyond certified bound {}",
                degree(exps),
                self.spec.d
            )));
        }
        Ok(())
    }

    /// Adds `v` to the coefficient of `h^h * prod vars^exps`. The key must
    /// lie inside the certified region.
    pub fn add_term(&mut self, h: i64, exps: Vec<u32>, v: Rat) -> Result<()> {
        self.check_key(&exps)?;
        if h < self.spec.hmin || h > self.spec.hmax {
            return Err(Error::ExactnessViolation(format!(
                "h = {h} outside window [{}, {}]",
                self.spec.hmin, self.spec.hmax
            )));
        }
        if v.is_zero() {
            return Ok(());
        }
        let key = (h, exps);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += &v;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// Exact coefficient lookup. `h` above the window or degree beyond `D`
    /// is refused; `h` below the window returns zero, which the support
    /// contract certifies.
    pub fn coeff(&self, h: i64, exps: &[u32]) -> Result<Rat> {
        self.check_key(exps)?;
        if h > self.spec.hmax {
            return Err(Error::ExactnessViolation(format!(
                "h = {h} above certified window bound {}",
                self.spec.hmax
            )));
        }
        if h < self.spec.hmin {
            return Ok(Rat::zero());
        }
        Ok(self
            .terms
            .get(&(h, exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero))
    }

    fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.family != other.family || self.spec.k != other.spec.k {
            return Err(Error::InvalidInput(format!(
                "incompatible series: {:?} width {} vs {:?} width {}",
                self.family,
                self.width(),
                other.family,
                other.width()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let spec = TruncationSpec::new(
            self.spec.k,
            self.spec.d.min(other.spec.d),
            self.spec.hmin.min(other.spec.hmin),
            self.spec.hmax.min(other.spec.hmax),
        )?;
        let mut out = TruncatedSeries::zero(self.family, spec);
        for ((h, e), v) in self.terms.iter().chain(other.terms.iter()) {
            if *h <= spec.hmax && degree(e) <= spec.d {
                out.add_term(*h, e.clone(), v.clone())?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(self.family, self.spec);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Product. The result window is
    /// `[hmin_a + hmin_b, min(hmax_a + hmin_b, hmax_b + hmin_a)]`: above
    /// that bound a coefficient would need factors beyond one operand's
    /// certified window.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let spec = TruncationSpec::new(
            self.spec.k,
            self.spec.d.min(other.spec.d),
            self.spec.hmin + other.spec.hmin,
            (self.spec.hmax + other.spec.hmin).min(other.spec.hmax + self.spec.hmin),
        )?;
        let mut out = TruncatedSeries::zero(self.family, spec);
        for ((ha, ea), va) in &self.terms {
            for ((hb, eb), vb) in &other.terms {
                let h = ha + hb;
                if h > spec.hmax {
                    continue;
                }
                if degree(ea) + degree(eb) > spec.d {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(h, e, va * vb)?;
            }
        }
        Ok(out)
    }

    /// Partial derivative in the given slot. Degree `D` coefficients of
    /// the derivative would need degree `D + 1` coefficients of the
    /// operand, so the certified degree drops by one.
    pub fn diff(&self, slot: usize) -> Result<Self> {
        if slot >= self.width() {
            return Err(Error::InvalidInput(format!(
                "no variable slot {slot} in width {}",
                self.width()
            )));
        }
        if self.spec.d == 0 {
            return Err(Error::ExactnessViolation(
                "cannot certify any derivative coefficient at degree bound 0".into(),
            ));
        }
        let spec = TruncationSpec::new(self.spec.k, self.spec.d - 1, self.spec.hmin, self.spec.hmax)?;
        let mut out = TruncatedSeries::zero(self.family, spec);
        for ((h, e), v) in &self.terms {
            let m = e[slot];
            if m == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[slot] = m - 1;
            out.add_term(*h, e2, v * &Rat::from_int(m as i64))?;
        }
        Ok(out)
    }

    /// Multiplies by `c * h^hshift * prod vars^mono`. The window shifts by
    /// `hshift`; product terms pushed past degree `D` are dropped, which
    /// the contract permits since it only speaks below `D`.
    pub fn mul_monomial(&self, hshift: i64, mono: &[u32], c: &Rat) -> Result<Self> {
        if mono.len() != self.width() {
            return Err(Error::InvalidInput(format!(
                "monomial has {} slots, series has {}",
                mono.len(),
                self.width()
            )));
        }
        let spec = TruncationSpec::new(
            self.spec.k,
            self.spec.d,
            self.spec.hmin + hshift,
            self.spec.hmax + hshift,
        )?;
        let mut out = TruncatedSeries::zero(self.family, spec);
        if c.is_zero() {
            return Ok(out);
        }
        for ((h, e), v) in &self.terms {
            if degree(e) + degree(mono) > spec.d {
                continue;
            }
            let e2: Vec<u32> = e.iter().zip(mono).map(|(a, b)| a + b).collect();
            out.add_term(h + hshift, e2, v * c)?;
        }
        Ok(out)
    }

    /// Re-certifies over a weaker spec: each bound may only move in the
    /// direction that claims less (`K`, `D`, `hmax` down, `hmin` down).
    pub fn restrict(&self, to: TruncationSpec) -> Result<Self> {
        if to.k > self.spec.k
            || to.d > self.spec.d
            || to.hmax > self.spec.hmax
            || to.hmin > self.spec.hmin
        {
            return Err(Error::ExactnessViolation(format!(
                "restriction {to:?} strengthens {:?}",
                self.spec
            )));
        }
        let width = self.family.width(to.k);
        let mut out = TruncatedSeries::zero(self.family, to);
        for ((h, e), v) in &self.terms {
            if *h > to.hmax || degree(e) > to.d {
                continue;
            }
            if e[width..].iter().any(|&x| x != 0) {
                continue;
            }
            out.add_term(*h, e[..width].to_vec(), v.clone())?;
        }
        Ok(out)
    }

    /// Formal exponential.
    ///
    /// Requires that no stored term is a pure power of `h` with `h <= 0`;
    /// a genuine constant term would make the result transcendental, and a
    /// negative pure `h` power would feed unbounded powers of itself into
    /// every window. Terms below `h = 0` must carry positive degree, so at
    /// most `D / mindeg` of them fit in any product of degree at most `D`;
    /// that caps how far products can descend in `h`, which both widens
    /// the result window downward and erodes the certified top by the same
    /// slack.
    pub fn exp(&self) -> Result<Self> {
        if self.spec.hmax < 0 {
            return Err(Error::InvalidInput(
                "exp needs a window reaching h = 0".into(),
            ));
        }
        let d = self.spec.d;
        let mut mindeg_neg: Option<u32> = None;
        for ((h, e), _) in &self.terms {
            let deg = degree(e);
            if deg == 0 && *h <= 0 {
                return Err(Error::InvalidInput(
                    "exp of a series with a pure h term at h <= 0".into(),
                ));
            }
            if *h < 0 {
                mindeg_neg = Some(mindeg_neg.map_or(deg, |m| m.min(deg)));
            }
        }
        let k_cap = match mindeg_neg {
            Some(m) => (d / m) as i64,
            None => 0,
        };
        let slack = k_cap * (-self.spec.hmin).max(0);
        let hmin_res = -slack;
        let hmax_res = self.spec.hmax - slack;
        let spec = TruncationSpec::new(self.spec.k, d, hmin_res, hmax_res)?;

        // Powers are accumulated on the internal window up to the operand
        // hmax: a term above it can descend by at most `slack` across the
        // remaining factors, so it can never re-enter the result window.
        let h_hi = self.spec.hmax;
        let width = self.width();
        let one_key = (0i64, vec![0u32; width]);
        let mut acc: BTreeMap<(i64, Vec<u32>), Rat> = BTreeMap::new();
        acc.insert(one_key.clone(), Rat::one());
        let mut p: BTreeMap<(i64, Vec<u32>), Rat> = BTreeMap::new();
        p.insert(one_key, Rat::one());
        let cap = d as i64 + h_hi + slack + 1;
        let mut k = 0i64;
        while !p.is_empty() {
            k += 1;
            if k > cap {
                return Err(Error::Integrity(format!(
                    "exp power iteration exceeded bound {cap}"
                )));
            }
            let inv_k = Rat::frac(1, k);
            let mut next: BTreeMap<(i64, Vec<u32>), Rat> = BTreeMap::new();
            for ((ha, ea), va) in &p {
                for ((hb, eb), vb) in &self.terms {
                    let h = ha + hb;
                    if h < hmin_res || h > h_hi {
                        continue;
                    }
                    if degree(ea) + degree(eb) > d {
                        continue;
                    }
                    let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                    let c = next.entry((h, e)).or_insert_with(Rat::zero);
                    *c += va * vb * inv_k.clone();
                }
            }
            next.retain(|_, v| !v.is_zero());
            for (key, v) in &next {
                let c = acc.entry(key.clone()).or_insert_with(Rat::zero);
                *c += v;
            }
            p = next;
        }

        let mut out = TruncatedSeries::zero(self.family, spec);
        for ((h, e), v) in acc {
            if h <= hmax_res && !v.is_zero() {
                out.add_term(h, e, v)?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = SeriesRepr {
            family: self.family,
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|((h, e), v)| TermRepr {
                    h: *h,
                    e: e.clone(),
                    v: v.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&repr)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: SeriesRepr = serde_json::from_str(s)?;
        let mut out = TruncatedSeries::zero(repr.family, repr.spec);
        if repr.spec.hmin > repr.spec.hmax {
            return Err(Error::ExactnessViolation(format!(
                "empty h window [{}, {}]",
                repr.spec.hmin, repr.spec.hmax
            )));
        }
        for t in repr.terms {
            if t.v.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "explicit zero term at h={} e={:?}",
                    t.h, t.e
                )));
            }
            if out.terms.contains_key(&(t.h, t.e.clone())) {
                return Err(Error::InvalidInput(format!(
                    "duplicate term at h={} e={:?}",
                    t.h, t.e
                )));
            }
            if t.h < repr.spec.hmin || t.h > repr.spec.hmax {
                return Err(Error::ExactnessViolation(format!(
                    "term at h = {} outside window [{}, {}]",
                    t.h, repr.spec.hmin, repr.spec.hmax
                )));
            }
            out.add_term(t.h, t.e, t.v)?;
        }
        Ok(out)
    }
}
