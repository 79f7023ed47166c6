//! Residual checkers for the KdV equation and the first three KP
//! equations.
//!
//! Both checkers return `LHS - RHS` as a series; a vanishing residual
//! on the certified region is the verification. For the KdV form the
//! genus grading forces an `h^2` factor on the whole right-hand side
//! (the product terms pair genus `g_1 + g_2 = g - 1` pieces and the
//! fifth-derivative term drops one genus), so the implemented identity
//! is
//!
//! ```text
//! (2n+1) F_{t_n t_0 t_0} = h^2 [ F_{t_{n-1} t_0} F_{t_0^3}
//!                              + 2 F_{t_{n-1} t_0^2} F_{t_0^2}
//!                              + (1/4) F_{t_{n-1} t_0^4} ]
//! ```
//!
//! which is the unique grading-homogeneous completion of the ungraded
//! form; the genus-by-genus residual test confirms it.
//!
//! The KP residuals live in the `p`-family:
//!
//! ```text
//! r1 = F_{2,2} + (1/2) F_{1,1}^2 - F_{3,1} + (1/12) F_{1,1,1,1}
//! r2 = F_{3,2} + F_{1,1} F_{2,1} - F_{4,1} + (1/6) F_{2,1,1,1}
//! r3 = F_{4,2} + (1/2) F_{2,1}^2 + F_{1,1} F_{3,1} - F_{5,1}
//!      - (1/8) F_{1,1,1}^2 - (1/12) F_{1,1} F_{1,1,1,1}
//!      + (1/4) F_{3,1,1,1} - (1/120) F_{1,1,1,1,1,1}
//! ```
//!
//! with subscripts denoting `p_i`-derivatives.

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::{Family, TruncatedSeries, TruncationSpec};
use crate::witten::CorrelatorEngine;

/// KdV residual of index `n >= 1` for a t-family series. The degree
/// bound drops by 5 (the deepest derivative) and the certified window
/// top is limited by the product rule; callers needing the residual on
/// a target region must build `F` with matching margins, which
/// [`witten_kdv_residual`] does for the Witten series.
pub fn kdv_residual(f: &TruncatedSeries, n: u32) -> Result<TruncatedSeries> {
    if f.family() != Family::T {
        return Err(Error::InvalidInput("KdV equations live in the t-family".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("the KdV hierarchy index starts at n = 1".into()));
    }
    let nn = n as usize;
    let lhs = f
        .diff(nn)?
        .diff(0)?
        .diff(0)?
        .scale(&Rat::from_int(2 * n as i64 + 1));
    let f0 = f.diff(0)?;
    let f00 = f0.diff(0)?;
    let fm0 = f.diff(nn - 1)?.diff(0)?;
    let fm00 = fm0.diff(0)?;
    let rhs = fm0
        .mul(&f00.diff(0)?)?
        .add(&fm00.mul(&f00)?.scale(&Rat::from_int(2)))?
        .add(&fm00.diff(0)?.diff(0)?.scale(&Rat::frac(1, 4)))?;
    lhs.sub(&rhs.mul_monomial(2, &vec![0; f.width()], &Rat::one())?)
}

/// KdV residual of the Witten free energy, certified on the full
/// requested region: variable indices up to `k`, degree up to `d`,
/// genus up to `gmax`. Builds `F` internally with the degree margin the
/// fifth derivative consumes.
pub fn witten_kdv_residual(
    engine: &mut CorrelatorEngine,
    n: u32,
    k: u32,
    d: u32,
    gmax: u32,
) -> Result<TruncatedSeries> {
    let hmax = 2 * i64::from(gmax) - 2;
    let f = engine.f_truncated(TruncationSpec::new(k, d + 5, -2, hmax)?)?;
    let r = kdv_residual(&f, n)?;
    r.restrict(TruncationSpec::new(k, d, -2, hmax)?)
}

/// Residuals of the first three KP equations for a p-family series.
/// The third equation differentiates by `p_5`, so `K >= 5` is required.
pub fn kp_residuals(f: &TruncatedSeries) -> Result<[TruncatedSeries; 3]> {
    if f.family() != Family::P {
        return Err(Error::InvalidInput("KP equations live in the p-family".into()));
    }
    if f.spec().k < 5 {
        return Err(Error::InvalidInput(format!(
            "the third KP equation differentiates by p_5; K = {} is too small",
            f.spec().k
        )));
    }
    // dp(i) differentiates by p_i (slot i - 1).
    let dp = |s: &TruncatedSeries, i: usize| s.diff(i - 1);
    let f1 = dp(f, 1)?;
    let f11 = dp(&f1, 1)?;
    let f111 = dp(&f11, 1)?;
    let f1111 = dp(&f111, 1)?;
    let f21 = dp(&f1, 2)?;
    let f31 = dp(&f1, 3)?;
    let f41 = dp(&f1, 4)?;
    let f51 = dp(&f1, 5)?;
    let f22 = dp(&dp(f, 2)?, 2)?;
    let f32 = dp(&dp(f, 3)?, 2)?;
    let f42 = dp(&dp(f, 4)?, 2)?;
    let f2111 = dp(&dp(&f11, 1)?, 2)?;
    let f3111 = dp(&dp(&f11, 1)?, 3)?;
    let f111111 = dp(&dp(&f1111, 1)?, 1)?;

    let r1 = f22
        .add(&f11.mul(&f11)?.scale(&Rat::frac(1, 2)))?
        .sub(&f31)?
        .add(&f1111.scale(&Rat::frac(1, 12)))?;
    let r2 = f32
        .add(&f11.mul(&f21)?)?
        .sub(&f41)?
        .add(&f2111.scale(&Rat::frac(1, 6)))?;
    let r3 = f42
        .add(&f21.mul(&f21)?.scale(&Rat::frac(1, 2)))?
        .add(&f11.mul(&f31)?)?
        .sub(&f51)?
        .sub(&f111.mul(&f111)?.scale(&Rat::frac(1, 8)))?
        .sub(&f11.mul(&f1111)?.scale(&Rat::frac(1, 12)))?
        .add(&f3111.scale(&Rat::frac(1, 4)))?
        .sub(&f111111.scale(&Rat::frac(1, 120)))?;
    Ok([r1, r2, r3])
}
