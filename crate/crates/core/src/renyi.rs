//! Rényi divergence primitives over finite distributions.
//!
//! Every probability handled here lives in the log domain. A divergence of
//! order α is computed as `(1/(α-1)) · logsumexp_i [α·ln p_i + (1-α)·ln q_i]`,
//! so budgets like `e^{(α-1)ε}` never have to be materialized.

use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-domain tolerance on `Σ masses = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// Maximum bisection steps used by [`r_alpha_inverse_ln`].
const INVERSE_MAX_ITERS: usize = 200;

/// Order of a Rényi divergence, strictly greater than one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::usage("alpha", format!("must be finite and > 1, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `α - 1`, the scale between a divergence and its log-moment.
    #[inline]
    pub fn minus_one(self) -> f64 {
        self.0 - 1.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A nonnegative real stored as its natural logarithm. `-∞` represents zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogScalar(f64);

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar(f64::NEG_INFINITY);
    pub const ONE: LogScalar = LogScalar(0.0);

    /// Panics on negative or NaN input.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0, "LogScalar::from_linear on negative or NaN value {x}");
        LogScalar(x.ln())
    }

    #[inline]
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan());
        LogScalar(ln)
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn linear(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self^e` for a finite positive exponent.
    #[inline]
    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            LogScalar(self.0 * e)
        }
    }

    /// Sum of many scalars with a single max-shift.
    pub fn sum<I: IntoIterator<Item = LogScalar>>(iter: I) -> Self {
        let v: Vec<f64> = iter.into_iter().map(LogScalar::ln).collect();
        LogScalar(log_sum_exp(&v))
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        LogScalar(log_add_exp(self.0, rhs.0))
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        if self.is_zero() || rhs.is_zero() {
            LogScalar::ZERO
        } else {
            LogScalar(self.0 + rhs.0)
        }
    }
}

/// `ln Σ e^{v_i}` via max-shift. Empty input gives `-∞`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let s: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + s.ln()
}

/// Two-argument `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi.is_infinite() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 - e^x)` for `x ≤ 0`.
#[inline]
pub fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln C(n, j)` for `j = 0..=n`.
pub fn ln_binomial_row(n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    row.push(0.0);
    for j in 0..n {
        acc += ((n - j) as f64).ln() - ((j + 1) as f64).ln();
        row.push(acc);
    }
    // symmetric by construction; mirror to cancel drift
    for j in 0..=n / 2 {
        row[n - j] = row[j];
    }
    row
}

/// A probability vector over an ordered finite support, stored in log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MassVector {
    ln_masses: Vec<f64>,
}

impl MassVector {
    pub fn from_linear(masses: &[f64]) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::usage("masses", "empty support"));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::usage("masses", format!("mass {m} is not a finite nonnegative value")));
        }
        let total: f64 = masses.iter().sum();
        check_total(total)?;
        Ok(MassVector {
            ln_masses: masses.iter().map(|m| m.ln()).collect(),
        })
    }

    pub fn from_ln(ln_masses: Vec<f64>) -> Result<Self> {
        if ln_masses.is_empty() {
            return Err(Error::usage("masses", "empty support"));
        }
        if ln_masses.iter().any(|v| v.is_nan() || *v > NORM_TOL) {
            return Err(Error::usage("masses", "log-mass is NaN or exceeds 0"));
        }
        check_total(log_sum_exp(&ln_masses).exp())?;
        Ok(MassVector { ln_masses })
    }

    pub fn len(&self) -> usize {
        self.ln_masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_masses.is_empty()
    }

    pub fn ln_masses(&self) -> &[f64] {
        &self.ln_masses
    }

    pub fn mass(&self, i: usize) -> LogScalar {
        LogScalar(self.ln_masses[i])
    }

    pub fn to_linear(&self) -> Vec<f64> {
        self.ln_masses.iter().map(|v| v.exp()).collect()
    }
}

fn check_total(total: f64) -> Result<()> {
    if (total - 1.0).abs() > NORM_TOL {
        Err(Error::usage(
            "masses",
            format!("not normalized: total {total} differs from 1 by more than {NORM_TOL:e}"),
        ))
    } else {
        Ok(())
    }
}

/// Rényi divergence `R_α(P‖Q)` in nats. Returns `+∞` when `P` puts mass where `Q` has none.
pub fn renyi_divergence(p: &MassVector, q: &MassVector, a: Alpha) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::usage(
            "q",
            format!("support length {} does not match p's {}", q.len(), p.len()),
        ));
    }
    Ok(renyi_divergence_ln(p.ln_masses(), q.ln_masses(), a))
}

/// Unchecked divergence over log-mass slices of equal length.
pub fn renyi_divergence_ln(lp: &[f64], lq: &[f64], a: Alpha) -> f64 {
    debug_assert_eq!(lp.len(), lq.len());
    if lp == lq {
        return 0.0;
    }
    let moment = ln_renyi_moment(lp, lq, None, a);
    (moment / a.minus_one()).max(0.0)
}

/// `ln Σ_i w_i p_i^α q_i^{1-α}` with optional log-multiplicities `w`.
///
/// Terms with `p_i = 0` contribute nothing; `q_i = 0 < p_i` makes the sum `+∞`.
pub fn ln_renyi_moment(lp: &[f64], lq: &[f64], ln_mult: Option<&[f64]>, a: Alpha) -> f64 {
    let am1 = a.minus_one();
    let term = |i: usize| {
        let w = ln_mult.map_or(0.0, |m| m[i]);
        w + lp[i] + am1 * (lp[i] - lq[i])
    };
    let mut max = f64::NEG_INFINITY;
    for i in 0..lp.len() {
        if lp[i] == f64::NEG_INFINITY {
            continue;
        }
        if lq[i] == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        max = max.max(term(i));
    }
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = (0..lp.len())
        .filter(|&i| lp[i] > f64::NEG_INFINITY)
        .map(|i| (term(i) - max).exp())
        .sum();
    max + s.ln()
}

/// Binary symmetric divergence `r_α(p) = R_α((p, 1-p) ‖ (1-p, p))`.
pub fn r_alpha(p: f64, a: Alpha) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage("p", format!("must lie in [0, 1], got {p}")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(f64::INFINITY);
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    Ok(r_alpha_from_logs(p.ln(), (-p).ln_1p(), a))
}

/// `r_α` evaluated from `ln p` alone, valid for arbitrarily small `p`.
pub fn r_alpha_ln(ln_p: f64, a: Alpha) -> f64 {
    r_alpha_from_logs(ln_p, ln_one_minus_exp(ln_p), a)
}

fn r_alpha_from_logs(lp: f64, l1p: f64, a: Alpha) -> f64 {
    if lp == l1p {
        return 0.0;
    }
    if lp == f64::NEG_INFINITY || l1p == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let am1 = a.minus_one();
    let t1 = lp + am1 * (lp - l1p);
    let t2 = l1p + am1 * (l1p - lp);
    (log_add_exp(t1, t2) / am1).max(0.0)
}

/// `ln p` of the unique `p ∈ (0, 1/2]` with `r_α(p) = eps`.
///
/// Bisects over `ln p`, so budgets far beyond the range of a linear `p`
/// (e.g. the `10^6` asymptote sentinel) are still resolved. The returned
/// point is always on the side where `r_α(p) ≤ eps`.
pub fn r_alpha_inverse_ln(eps: f64, a: Alpha) -> Result<f64> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::usage("eps", format!("must be finite and >= 0, got {eps}")));
    }
    let mut hi = -LN_2;
    if eps == 0.0 {
        return Ok(hi);
    }
    // r_α(p) ≥ -ln p - (α/(α-1))·ln 2 on (0, 1/2], so this is past the root
    let mut lo = -(eps + 2.0 * LN_2 * a.value() / a.minus_one() + 1.0);
    for _ in 0..INVERSE_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if r_alpha_ln(mid, a) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Inverse of `r_α` on `(0, 1/2]`. Returns exactly `0.5` at `eps = 0`.
///
/// Fails when the root underflows a normal `f64`; use
/// [`r_alpha_inverse_ln`] for such budgets.
pub fn r_alpha_inverse(eps: f64, a: Alpha) -> Result<f64> {
    let ln_p = r_alpha_inverse_ln(eps, a)?;
    if ln_p == -LN_2 {
        return Ok(0.5);
    }
    let p = ln_p.exp();
    if p < f64::MIN_POSITIVE {
        return Err(Error::usage(
            "eps",
            format!("root of r_alpha at eps={eps} underflows; use r_alpha_inverse_ln"),
        ));
    }
    Ok(p)
}
