//! Closed-form bounds on the amplification function `Post_k(ε)`.
//!
//! Two upper bounds bracket it from above: post-processing (`Post_k ≤ ε`) and
//! the large-budget asymptote `d·k·r_α(c)`. The symmetric two-corner pair
//! gives a lower bound that is evaluated in `d·k + 1` Hamming terms.
//!
//! For `k > 1` no Hoeffding-type bracket is exposed; the inequality
//! `ε ≥ Post_k(ε) ≥ Post_1(ε)` carries the single-sample bracket over.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::bern::{two_point_pushforward_ln, AmpParams};
use crate::error::{Error, Result};
use crate::renyi::{ln_one_minus_exp, r_alpha, r_alpha_inverse_ln};

/// Default width (nats) used when classifying regimes.
pub const DEFAULT_REGIME_DELTA: f64 = 0.05;

/// Finite stand-in for `ε = ∞`.
pub const LARGE_EPS_SENTINEL: f64 = 1e6;

/// Coarse position of `ε` relative to the two upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Regime {
    /// Amplification negligible: the lower bound tracks `ε`.
    I,
    /// Transition between the two upper bounds.
    II,
    /// The lower bound has reached the asymptote.
    III,
    Unknown,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
            Regime::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        match s {
            "I" => Some(Regime::I),
            "II" => Some(Regime::II),
            "III" => Some(Regime::III),
            "unknown" => Some(Regime::Unknown),
            _ => None,
        }
    }
}

/// All bounds at one budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsBundle {
    pub eps: f64,
    pub lower_two_point: f64,
    pub upper_ppi: f64,
    pub upper_asymptote: f64,
    pub exact: Option<f64>,
    pub gap_upper_lower: f64,
    pub regime_hint: Regime,
}

/// Single-sample bracket `r_α(p+K) ≤ R_α(Bern(P)‖Bern(Q)) ≤ r_α(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoeffdingBracket {
    pub p: f64,
    pub k_factor: f64,
    pub lower: f64,
    pub upper: f64,
}

impl HoeffdingBracket {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.lower - tol <= value && value <= self.upper + tol
    }
}

/// Post-processing bound.
pub fn ppi_upper(params: &AmpParams) -> f64 {
    params.eps()
}

/// `d·k·r_α(c)`, the limit of `Post_k(ε)` as `ε → ∞`.
pub fn asymptote_upper(params: &AmpParams) -> Result<f64> {
    params.require_interior()?;
    Ok(params.dk() as f64 * r_alpha(params.c(), params.alpha())?)
}

/// Divergence between the pushforwards of the symmetric pair with weight `e^{ln_p}`.
pub(crate) fn two_point_divergence_ln(ln_p: f64, params: &AmpParams) -> f64 {
    if ln_p == -LN_2 {
        return 0.0;
    }
    let (bp, bq) = two_point_pushforward_ln(ln_p, ln_one_minus_exp(ln_p), params);
    bp.renyi(&bq, params.alpha())
        .expect("two-point pushforwards share form and size")
}

/// Amplification of the symmetric pair whose own divergence equals `ε`.
pub fn two_point_lower(params: &AmpParams) -> Result<f64> {
    params.require_interior()?;
    let ln_p = r_alpha_inverse_ln(params.eps(), params.alpha())?;
    Ok(two_point_divergence_ln(ln_p, params))
}

/// `K = e^{-2(1/2-c)^2 d}`.
pub fn hoeffding_k_factor(c: f64, d: usize) -> f64 {
    (-2.0 * (0.5 - c).powi(2) * d as f64).exp()
}

/// Hoeffding bracket for the symmetric pair at weight `p`; single sample only.
pub fn hoeffding_bracket(params: &AmpParams, p: f64) -> Result<HoeffdingBracket> {
    params.require_interior()?;
    if params.k() != 1 {
        return Err(Error::Unsupported(format!(
            "Hoeffding bracket is stated for k = 1, got k = {}",
            params.k()
        )));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::usage("p", format!("must lie in (0, 1/2], got {p}")));
    }
    let k_factor = hoeffding_k_factor(params.c(), params.d());
    if p + k_factor > 0.5 {
        return Err(Error::BracketPrecondition { p, k_factor });
    }
    let a = params.alpha();
    Ok(HoeffdingBracket {
        p,
        k_factor,
        lower: r_alpha(p + k_factor, a)?,
        upper: r_alpha(p, a)?,
    })
}

pub fn classify_regime(eps: f64, lower: f64, asymptote: f64, delta: f64) -> Regime {
    if !lower.is_finite() || !asymptote.is_finite() || asymptote < lower - delta {
        Regime::Unknown
    } else if eps - lower <= delta {
        Regime::I
    } else if asymptote - lower <= delta {
        Regime::III
    } else {
        Regime::II
    }
}

pub fn bounds_report(params: &AmpParams, exact: Option<f64>) -> Result<BoundsBundle> {
    bounds_report_with(params, exact, DEFAULT_REGIME_DELTA)
}

pub fn bounds_report_with(params: &AmpParams, exact: Option<f64>, delta: f64) -> Result<BoundsBundle> {
    let lower = two_point_lower(params)?;
    let ppi = ppi_upper(params);
    let asym = asymptote_upper(params)?;
    Ok(BoundsBundle {
        eps: params.eps(),
        lower_two_point: lower,
        upper_ppi: ppi,
        upper_asymptote: asym,
        exact,
        gap_upper_lower: ppi.min(asym) - lower,
        regime_hint: classify_regime(params.eps(), lower, asym, delta),
    })
}
