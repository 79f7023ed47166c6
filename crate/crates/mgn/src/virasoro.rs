//! Virasoro constraints on the tau function.
//!
//! The operators act on series in `t_0..t_K` with an auxiliary grading
//! variable `h` weighting genus `g` contributions by `h^(2g-2)`:
//!
//! ```text
//! L_-1 = -d_0 + (h^-2/2) t_0^2 + sum_{i>=0} t_{i+1} d_i
//! L_0  = -(3/2) d_1 + sum_{i>=0} ((2i+1)/2) t_i d_i + 1/16
//! L_n  = sum_{k>=0} A(n,k) (t_k - [k=1]) d_{n+k}
//!        + (h^2/2) sum_k (-1)^(k+1) S(n,k) d_k d_{n-1-k}
//! ```
//!
//! where `d_i` is the partial derivative in `t_i`, `A(n, k)` is
//! [`CoeffFamily::First`] and `S(n, k)` is [`CoeffFamily::Second`]. The
//! tau function of the intersection-number generating series satisfies
//! `L_n tau = 0` for every `n >= -1`, and the operators close into
//! `[L_m, L_n] = (m - n) L_{m+n}`.
//!
//! The lower limit of the quadratic sum in `L_n` is conventional: some
//! sources start it at `k = 1` rather than `k = 0`. Both are implemented
//! behind [`SecondSumRange`]; the commutator identity and the
//! annihilation of the Witten tau hold only for the `k = 0` form (the
//! `k = 0` summand produces, for example, the constant `1/8 = 2 * 1/16`
//! in `[L_1, L_-1] = 2 L_0`), so that is the default.
//!
//! # Truncation effects
//!
//! On a width-limited series the raising sum `sum_k A(n,k) t_k d_{n+k}`
//! loses its `k > K - n` summands, which touch exactly the monomials
//! containing a variable of index above `K - n`. [`virasoro_apply`]
//! therefore restricts the result of `L_n`, `n >= 1`, to variable index
//! `K - n`; inside that width the computed action agrees with the true
//! operator. `L_-1` and `L_0` move no coefficient toward lower variable
//! indices, so they keep the full width.

use crate::coeffs::{virasoro_coefficient, CoeffFamily};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::{Family, TruncatedSeries, TruncationSpec};
use crate::witten::CorrelatorEngine;

/// Lower limit convention for the quadratic-derivative sum in `L_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondSumRange {
    /// Sum from `k = 0`. Validated by the commutator identity and by
    /// `L_n tau = 0`; the shipped default.
    #[default]
    Standard,
    /// Sum from `k = 1`, a variant convention kept for comparison. It
    /// fails both validation identities whenever the `k = 0` summand is
    /// nonzero.
    FromOne,
}

fn unit_mono(width: usize, slot: usize, power: u32) -> Vec<u32> {
    let mut e = vec![0u32; width];
    e[slot] = power;
    e
}

/// Applies `L_n` for `n >= -1` to a t-family series.
///
/// For `n >= 1` the result is narrowed to variable index `K - n` (see
/// the module notes); `K < n + 1` leaves no certifiable slot and is
/// refused. The `h`-window and degree bound of the result follow from
/// the series operation rules: the potential term of `L_-1` lowers the
/// certified window top by 2, and every variant costs one degree (two
/// for the quadratic sum).
pub fn virasoro_apply(
    n: i64,
    tau: &TruncatedSeries,
    range: SecondSumRange,
) -> Result<TruncatedSeries> {
    if tau.family() != Family::T {
        return Err(Error::InvalidInput(
            "Virasoro operators act on t-family series".into(),
        ));
    }
    if n < -1 {
        return Err(Error::InvalidInput(format!(
            "no Virasoro operator below L_-1 (got n = {n})"
        )));
    }
    let k = tau.spec().k as usize;
    let w = tau.width();
    match n {
        -1 => {
            // -d_0 + (h^-2/2) t_0^2 + sum_{i=0}^{K-1} t_{i+1} d_i.
            // The discarded i >= K summands only reach monomials with a
            // variable beyond t_K, which the width already excludes.
            let mut acc = tau.diff(0)?.neg();
            acc = acc.add(&tau.mul_monomial(-2, &unit_mono(w, 0, 2), &Rat::frac(1, 2))?)?;
            for i in 0..k {
                let term = tau.diff(i)?.mul_monomial(0, &unit_mono(w, i + 1, 1), &Rat::one())?;
                acc = acc.add(&term)?;
            }
            Ok(acc)
        }
        0 => {
            if k < 1 {
                return Err(Error::ExactnessViolation(
                    "L_0 contains d_1; a width-1 series cannot certify its action".into(),
                ));
            }
            let mut acc = tau.diff(1)?.scale(&Rat::frac(-3, 2));
            for i in 0..=k {
                let c = Rat::frac(2 * i as i64 + 1, 2);
                let term = tau.diff(i)?.mul_monomial(0, &unit_mono(w, i, 1), &c)?;
                acc = acc.add(&term)?;
            }
            acc.add(&tau.scale(&Rat::frac(1, 16)))
        }
        _ => {
            let nu = n as usize;
            if k < nu + 1 {
                return Err(Error::ExactnessViolation(format!(
                    "L_{n} contains d_{}; the series stops at t_{k}",
                    nu + 1
                )));
            }
            // Raising sum over the summands that stay inside the width.
            let mut acc: Option<TruncatedSeries> = None;
            for j in 0..=(k - nu) {
                let a = virasoro_coefficient(CoeffFamily::First, n, j as i64)?;
                let term = tau.diff(nu + j)?.mul_monomial(0, &unit_mono(w, j, 1), &a)?;
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term)?,
                });
            }
            let mut acc = acc.expect("k - n >= 0 gives at least one summand");
            // The (t_1 - 1) shift contributes -A(n, 1) d_{n+1}.
            let a1 = virasoro_coefficient(CoeffFamily::First, n, 1)?;
            acc = acc.sub(&tau.diff(nu + 1)?.scale(&a1))?;
            let start = match range {
                SecondSumRange::Standard => 0,
                SecondSumRange::FromOne => 1,
            };
            for j in start..nu {
                let s = virasoro_coefficient(CoeffFamily::Second, n, j as i64)?;
                let signed = if j % 2 == 0 { -s } else { s };
                let c = signed * Rat::frac(1, 2);
                let term =
                    tau.diff(j)?
                        .diff(nu - 1 - j)?
                        .mul_monomial(2, &vec![0u32; w], &c)?;
                acc = acc.add(&term)?;
            }
            let spec = acc.spec();
            acc.restrict(TruncationSpec::new(
                (k - nu) as u32,
                spec.d,
                spec.hmin,
                spec.hmax,
            )?)
        }
    }
}

/// Builds the truncated tau function `tau = exp(F)` of the Witten free
/// energy, exact up to `h`-exponent `h_hi` for degrees up to `d` and
/// variable indices up to `k`.
///
/// Exponentiation spends window: powers of the `h^-2` genus-0 part push
/// content downward, so certifying `tau` up to `h_hi` needs `F` up to
/// `h_hi + 2 * floor(d / 3)`. This helper computes that margin and
/// builds `F` accordingly.
pub fn witten_tau(
    engine: &mut CorrelatorEngine,
    k: u32,
    d: u32,
    h_hi: i64,
) -> Result<TruncatedSeries> {
    let slack = 2 * (d as i64 / 3);
    let f = engine.f_truncated(TruncationSpec::new(k, d, -2, h_hi + slack)?)?;
    let tau = f.exp()?;
    if tau.spec().hmax < h_hi {
        return Err(Error::Integrity(format!(
            "tau window reached only h = {} of the requested {h_hi}",
            tau.spec().hmax
        )));
    }
    Ok(tau)
}

/// Evaluates `(L_m L_n - L_n L_m - (m - n) L_{m+n})` applied to `tau`
/// and returns the residual restricted to the region certified by all
/// three routes. For genuine Virasoro operators the residual is zero on
/// any input.
pub fn commutator_residual(
    m: i64,
    n: i64,
    tau: &TruncatedSeries,
    range: SecondSumRange,
) -> Result<TruncatedSeries> {
    let mn = virasoro_apply(m, &virasoro_apply(n, tau, range)?, range)?;
    let nm = virasoro_apply(n, &virasoro_apply(m, tau, range)?, range)?;
    let direct = virasoro_apply(m + n, tau, range)?.scale(&Rat::from_int(m - n));
    let k = mn
        .spec()
        .k
        .min(nm.spec().k)
        .min(direct.spec().k);
    let narrow = |s: &TruncatedSeries| -> Result<TruncatedSeries> {
        let sp = s.spec();
        s.restrict(TruncationSpec::new(k, sp.d, sp.hmin, sp.hmax)?)
    };
    narrow(&mn)?.sub(&narrow(&nm)?)?.sub(&narrow(&direct)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(k: u32, d: u32, hmin: i64, hmax: i64) -> TruncatedSeries {
        let spec = TruncationSpec::new(k, d, hmin, hmax).unwrap();
        let mut s = TruncatedSeries::zero(Family::T, spec);
        s.add_term(0, vec![0; (k + 1) as usize], Rat::one()).unwrap();
        s
    }

    #[test]
    fn lowering_operator_on_unit() {
        // L_-1 1 = (h^-2/2) t_0^2: the derivative terms all vanish.
        let out = virasoro_apply(-1, &one(2, 3, -2, 2), SecondSumRange::Standard).unwrap();
        assert_eq!(out.terms().count(), 1);
        assert_eq!(out.coeff(-2, &[2, 0, 0]).unwrap(), Rat::frac(1, 2));
    }

    #[test]
    fn scaling_operator_on_unit() {
        // L_0 1 = 1/16.
        let out = virasoro_apply(0, &one(2, 3, -2, 2), SecondSumRange::Standard).unwrap();
        assert_eq!(out.terms().count(), 1);
        assert_eq!(out.coeff(0, &[0, 0, 0]).unwrap(), Rat::frac(1, 16));
    }

    #[test]
    fn raising_operator_on_monomials() {
        // L_1 t_2 = A(1, 1) t_1 + (quadratic terms on a degree-1 input: none
        // reach it) and the delta shift -A(1, 1) d_2 kills nothing else;
        // check against a direct hand expansion:
        //   L_1 t_2 = A(1,1) t_1 * 1 ... with d_2 t_2 = 1 the raising sum
        //   gives A(1,1) t_1, the shift gives -A(1,1), and d d acting on a
        //   degree-1 monomial gives 0.
        let spec = TruncationSpec::new(4, 4, -4, 4).unwrap();
        let mut t2 = TruncatedSeries::zero(Family::T, spec);
        t2.add_term(0, vec![0, 0, 1, 0, 0], Rat::one()).unwrap();
        let out = virasoro_apply(1, &t2, SecondSumRange::Standard).unwrap();
        let a11 = virasoro_coefficient(CoeffFamily::First, 1, 1).unwrap();
        assert_eq!(out.spec().k, 3);
        assert_eq!(out.coeff(0, &[0, 1, 0, 0]).unwrap(), a11);
        assert_eq!(out.coeff(0, &[0, 0, 0, 0]).unwrap(), -a11);
        assert_eq!(out.terms().count(), 2);
    }

    #[test]
    fn quadratic_sum_constant() {
        // L_1 (h^-2 t_0^2 / 2) keeps only the k = 0 quadratic summand:
        // (h^2/2) * S-sign * d_0 d_0 of it = 1/8. This is the term the
        // FromOne convention drops.
        let spec = TruncationSpec::new(3, 4, -4, 4).unwrap();
        let mut s = TruncatedSeries::zero(Family::T, spec);
        s.add_term(-2, vec![2, 0, 0, 0], Rat::frac(1, 2)).unwrap();
        let std = virasoro_apply(1, &s, SecondSumRange::Standard).unwrap();
        assert_eq!(std.coeff(0, &[0, 0, 0]).unwrap(), Rat::frac(1, 8));
        let from_one = virasoro_apply(1, &s, SecondSumRange::FromOne).unwrap();
        assert!(from_one.is_empty());
    }

    #[test]
    fn commutator_of_raising_and_lowering() {
        // [L_1, L_-1] = 2 L_0 on the unit: the left side is exactly the
        // 1/8 from the quadratic k = 0 summand, the right is 2/16.
        let tau = one(6, 6, -8, 8);
        let r = commutator_residual(1, -1, &tau, SecondSumRange::Standard).unwrap();
        assert!(r.is_empty(), "residual {:?}", r.terms().collect::<Vec<_>>());
        let r = commutator_residual(1, -1, &tau, SecondSumRange::FromOne).unwrap();
        assert_eq!(r.coeff(0, &[0; 6]).unwrap(), Rat::frac(-1, 8));
    }

    #[test]
    fn commutator_sweep_on_low_monomials() {
        // All pairs m, n in {-1..2} on a few low monomials; the full
        // degree-4 sweep with m, n up to 3 runs in the acceptance suite.
        let spec = TruncationSpec::new(7, 6, -8, 8).unwrap();
        let monos: Vec<Vec<u32>> = vec![
            vec![0, 0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0, 0, 0],
            vec![1, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 2, 0, 1, 0, 0, 0, 0],
        ];
        for e in monos {
            let mut tau = TruncatedSeries::zero(Family::T, spec);
            tau.add_term(0, e.clone(), Rat::one()).unwrap();
            for m in -1..=2i64 {
                for n in -1..=2i64 {
                    if m == n || m + n < -1 {
                        continue;
                    }
                    let r = commutator_residual(m, n, &tau, SecondSumRange::Standard).unwrap();
                    assert!(
                        r.is_empty(),
                        "[L_{m}, L_{n}] broke on {e:?}: {:?}",
                        r.terms().collect::<Vec<_>>()
                    );
                }
            }
        }
    }

    #[test]
    fn witten_tau_is_annihilated() {
        // Small configuration: genus <= 1 content, K = 5, D = 4. The
        // acceptance suite runs the full K = 9, D = 6 version.
        let mut engine = CorrelatorEngine::new();
        let tau = witten_tau(&mut engine, 5, 4, 0).unwrap();
        assert_eq!(tau.coeff(0, &[0; 6]).unwrap(), Rat::one());
        for n in -1..=2i64 {
            let out = virasoro_apply(n, &tau, SecondSumRange::Standard).unwrap();
            assert!(
                out.is_empty(),
                "L_{n} tau != 0: {:?}",
                out.terms().collect::<Vec<_>>()
            );
        }
        // The variant range misses the quadratic k = 0 summand and fails.
        let out = virasoro_apply(1, &tau, SecondSumRange::FromOne).unwrap();
        assert!(!out.is_empty());
    }

    #[test]
    fn width_too_small_is_refused() {
        let err = virasoro_apply(3, &one(2, 3, -2, 2), SecondSumRange::Standard).unwrap_err();
        assert!(matches!(err, Error::ExactnessViolation(_)));
        let err = virasoro_apply(0, &one(0, 3, -2, 2), SecondSumRange::Standard).unwrap_err();
        assert!(matches!(err, Error::ExactnessViolation(_)));
    }
}
