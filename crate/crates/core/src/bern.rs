//! Bernoulli pushforwards of parameter points, corner distributions and mixtures.
//!
//! `Bern_k(x)` draws `k` independent vectors in `{0,1}^d`, coordinate `i` being
//! one with probability `x_i`. Outcomes `(b_1, …, b_k)` are packed into an
//! integer with coordinate `i` of sample `j` at bit `j·d + i`.
//!
//! Corner index convention: bit `i_j = 0` puts coordinate `j` at `c`, bit
//! `i_j = 1` puts it at `1 - c`. Under it,
//! `Pr[Bern(z_i) = b] = c^{Δ(i,b)} (1-c)^{d-Δ(i,b)}` with `Δ` the Hamming distance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::renyi::{
    ln_binomial_row, ln_renyi_moment, log_add_exp, log_sum_exp, Alpha, LogScalar, MassVector,
};

/// Largest `d·k` for which full `2^{dk}` outcome tables are built.
pub const ENUMERATION_GUARD: usize = 24;

/// Coordinate slack allowed outside `[c, 1-c]`.
const BOX_SLACK: f64 = 1e-15;

/// The tuple `(c, α, ε, d, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmpParams {
    c: f64,
    alpha: Alpha,
    eps: f64,
    d: usize,
    k: usize,
}

impl AmpParams {
    /// Admits `c = 0`; solver and bound entry points additionally call
    /// [`AmpParams::require_interior`].
    pub fn new(c: f64, alpha: f64, eps: f64, d: usize, k: usize) -> Result<Self> {
        if !(c.is_finite() && (0.0..0.5).contains(&c)) {
            return Err(Error::usage("c", format!("must satisfy 0 <= c < 1/2, got {c}")));
        }
        let alpha = Alpha::new(alpha)?;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::usage("eps", format!("must be finite and >= 0, got {eps}")));
        }
        if d == 0 {
            return Err(Error::usage("d", "dimension must be positive"));
        }
        if k == 0 {
            return Err(Error::usage("k", "sample count must be positive"));
        }
        Ok(AmpParams { c, alpha, eps, d, k })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn dk(&self) -> usize {
        self.d * self.k
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        AmpParams::new(self.c, self.alpha.value(), eps, self.d, self.k)
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        AmpParams::new(self.c, self.alpha.value(), self.eps, self.d, k)
    }

    /// Fails when `c = 0`.
    pub fn require_interior(&self) -> Result<()> {
        if self.c > 0.0 {
            Ok(())
        } else {
            Err(Error::usage("c", "must be > 0 for bounds and exact computation"))
        }
    }
}

/// A parameter point `x ∈ [c, 1-c]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    coords: Vec<f64>,
}

impl ProductPoint {
    pub fn new(coords: Vec<f64>, c: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::usage("coords", "point must have at least one coordinate"));
        }
        for &x in &coords {
            if !(x.is_finite() && x >= c - BOX_SLACK && x <= 1.0 - c + BOX_SLACK && (0.0..=1.0).contains(&x)) {
                return Err(Error::usage("coords", format!("coordinate {x} outside [{c}, {}]", 1.0 - c)));
            }
        }
        Ok(ProductPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }
}

/// A finite mixture of parameter points, the output law of a mechanism.
#[derive(Debug, Clone)]
pub struct PointMixture {
    points: Vec<ProductPoint>,
    masses: MassVector,
}

impl PointMixture {
    pub fn new(points: Vec<ProductPoint>, masses: MassVector) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::usage("masses", "one mass per support point is required"));
        }
        let d = points[0].d();
        if points.iter().any(|p| p.d() != d) {
            return Err(Error::usage("points", "all support points must share dimension"));
        }
        Ok(PointMixture { points, masses })
    }

    pub fn points(&self) -> &[ProductPoint] {
        &self.points
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    pub fn d(&self) -> usize {
        self.points[0].d()
    }
}

/// A distribution over the `2^d` corners `{c, 1-c}^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerDist {
    d: usize,
    c: f64,
    masses: MassVector,
}

impl CornerDist {
    pub fn from_ln(d: usize, c: f64, ln_masses: Vec<f64>) -> Result<Self> {
        check_corner_dim(d)?;
        if ln_masses.len() != 1 << d {
            return Err(Error::usage("masses", format!("expected {} corner masses, got {}", 1usize << d, ln_masses.len())));
        }
        Ok(CornerDist {
            d,
            c,
            masses: MassVector::from_ln(ln_masses)?,
        })
    }

    pub fn from_linear(d: usize, c: f64, masses: &[f64]) -> Result<Self> {
        check_corner_dim(d)?;
        if masses.len() != 1 << d {
            return Err(Error::usage("masses", format!("expected {} corner masses, got {}", 1usize << d, masses.len())));
        }
        Ok(CornerDist {
            d,
            c,
            masses: MassVector::from_linear(masses)?,
        })
    }

    pub fn point_mass(d: usize, c: f64, index: usize) -> Result<Self> {
        check_corner_dim(d)?;
        if index >= 1 << d {
            return Err(Error::usage("index", format!("corner index {index} out of range")));
        }
        let mut ln = vec![f64::NEG_INFINITY; 1 << d];
        ln[index] = 0.0;
        CornerDist::from_ln(d, c, ln)
    }

    pub fn uniform(d: usize, c: f64) -> Result<Self> {
        check_corner_dim(d)?;
        let n = 1usize << d;
        CornerDist::from_ln(d, c, vec![-(n as f64).ln(); n])
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn masses(&self) -> &MassVector {
        &self.masses
    }
    pub fn ln_masses(&self) -> &[f64] {
        self.masses.ln_masses()
    }
    pub fn mass(&self, index: usize) -> LogScalar {
        self.masses.mass(index)
    }

    /// Coordinates of corner `index`.
    pub fn corner(&self, index: usize) -> Vec<f64> {
        (0..self.d)
            .map(|j| if (index >> j) & 1 == 0 { self.c } else { 1.0 - self.c })
            .collect()
    }
}

fn check_corner_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::usage("d", "dimension must be positive"));
    }
    if d > ENUMERATION_GUARD {
        return Err(Error::Capacity {
            guard: "corner dimension",
            limit: ENUMERATION_GUARD,
            value: d,
        });
    }
    Ok(())
}

/// Law of the released samples.
#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeDist {
    /// One log-mass per outcome in `{0,1}^{bits}`.
    Full { bits: usize, ln_masses: Vec<f64> },
    /// Per-outcome log-mass at each Hamming weight `j = 0..=bits`; weight `j`
    /// is shared by `C(bits, j)` outcomes.
    Hamming { bits: usize, ln_weights: Vec<f64> },
}

impl OutcomeDist {
    pub fn bits(&self) -> usize {
        match self {
            OutcomeDist::Full { bits, .. } | OutcomeDist::Hamming { bits, .. } => *bits,
        }
    }

    /// Log-probability of one packed outcome.
    pub fn ln_prob(&self, outcome: usize) -> f64 {
        match self {
            OutcomeDist::Full { ln_masses, .. } => ln_masses[outcome],
            OutcomeDist::Hamming { ln_weights, .. } => ln_weights[outcome.count_ones() as usize],
        }
    }

    /// Total mass in log domain; `0` for a normalized distribution.
    pub fn ln_total(&self) -> f64 {
        match self {
            OutcomeDist::Full { ln_masses, .. } => log_sum_exp(ln_masses),
            OutcomeDist::Hamming { bits, ln_weights } => {
                let binom = ln_binomial_row(*bits);
                let terms: Vec<f64> = ln_weights.iter().zip(&binom).map(|(w, b)| w + b).collect();
                log_sum_exp(&terms)
            }
        }
    }

    /// Expands a Hamming-form distribution to all `2^bits` outcomes.
    pub fn to_full(&self) -> Result<OutcomeDist> {
        match self {
            OutcomeDist::Full { .. } => Ok(self.clone()),
            OutcomeDist::Hamming { bits, ln_weights } => {
                check_enumeration(*bits)?;
                let ln_masses = (0..1usize << bits)
                    .map(|o| ln_weights[o.count_ones() as usize])
                    .collect();
                Ok(OutcomeDist::Full {
                    bits: *bits,
                    ln_masses,
                })
            }
        }
    }

    /// `R_α(self ‖ other)`; both must be the same form and size.
    pub fn renyi(&self, other: &OutcomeDist, a: Alpha) -> Result<f64> {
        match (self, other) {
            (OutcomeDist::Full { bits: b1, ln_masses: p }, OutcomeDist::Full { bits: b2, ln_masses: q }) if b1 == b2 => {
                Ok(crate::renyi::renyi_divergence_ln(p, q, a))
            }
            (OutcomeDist::Hamming { bits: b1, ln_weights: p }, OutcomeDist::Hamming { bits: b2, ln_weights: q })
                if b1 == b2 =>
            {
                if p == q {
                    return Ok(0.0);
                }
                let binom = ln_binomial_row(*b1);
                Ok((ln_renyi_moment(p, q, Some(&binom), a) / a.minus_one()).max(0.0))
            }
            _ => Err(Error::usage("other", "outcome distributions differ in form or size")),
        }
    }
}

fn check_enumeration(bits: usize) -> Result<()> {
    if bits > ENUMERATION_GUARD {
        Err(Error::Capacity {
            guard: "d*k enumeration",
            limit: ENUMERATION_GUARD,
            value: bits,
        })
    } else {
        Ok(())
    }
}

/// `count · ln_base` with `0 · (-∞) = 0`.
#[inline]
fn pow_ln(count: usize, ln_base: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_base
    }
}

/// Corner index repeated `k` times at stride `d`, aligned with outcome packing.
fn replicate(index: usize, d: usize, k: usize) -> usize {
    (0..k).fold(0usize, |acc, j| acc | (index << (j * d)))
}

/// Full law of `Bern_k(x)` for a single point.
pub fn bern_point_pushforward(x: &ProductPoint, k: usize) -> Result<OutcomeDist> {
    if k == 0 {
        return Err(Error::usage("k", "sample count must be positive"));
    }
    let d = x.d();
    let bits = d * k;
    check_enumeration(bits)?;
    let ln_one: Vec<f64> = x.coords().iter().map(|&v| v.ln()).collect();
    let ln_zero: Vec<f64> = x.coords().iter().map(|&v| (-v).ln_1p()).collect();
    let mut table = Vec::with_capacity(1 << bits);
    table.push(0.0f64);
    for t in 0..bits {
        let i = t % d;
        let len = table.len();
        for o in 0..len {
            let base = table[o];
            table[o] = base + ln_zero[i];
            table.push(base + ln_one[i]);
        }
        debug_assert_eq!(table.len(), 2 * len);
    }
    Ok(OutcomeDist::Full {
        bits,
        ln_masses: table,
    })
}

/// Full law of `Bern_k(P)` for a corner distribution.
pub fn bern_corner_pushforward(p: &CornerDist, k: usize) -> Result<OutcomeDist> {
    if k == 0 {
        return Err(Error::usage("k", "sample count must be positive"));
    }
    let d = p.d();
    let bits = d * k;
    check_enumeration(bits)?;
    let ln_c = p.c().ln();
    let ln_1c = (-p.c()).ln_1p();
    let support: Vec<(usize, f64)> = p
        .ln_masses()
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > f64::NEG_INFINITY)
        .map(|(i, &m)| (replicate(i, d, k), m))
        .collect();
    let mut terms = Vec::with_capacity(support.len());
    let ln_masses = (0..1usize << bits)
        .map(|o| {
            terms.clear();
            for &(rep, m) in &support {
                let diff = (o ^ rep).count_ones() as usize;
                terms.push(m + pow_ln(diff, ln_c) + pow_ln(bits - diff, ln_1c));
            }
            log_sum_exp(&terms)
        })
        .collect();
    Ok(OutcomeDist::Full { bits, ln_masses })
}

/// Full law of `Bern_k` applied to a point mixture.
pub fn bern_mixture_pushforward(mix: &PointMixture, k: usize) -> Result<OutcomeDist> {
    let parts = mix
        .points()
        .iter()
        .map(|x| bern_point_pushforward(x, k))
        .collect::<Result<Vec<_>>>()?;
    let bits = parts[0].bits();
    let weights = mix.masses().ln_masses();
    let mut terms = Vec::with_capacity(parts.len());
    let ln_masses = (0..1usize << bits)
        .map(|o| {
            terms.clear();
            for (part, &w) in parts.iter().zip(weights) {
                if w > f64::NEG_INFINITY {
                    terms.push(w + part.ln_prob(o));
                }
            }
            log_sum_exp(&terms)
        })
        .collect();
    Ok(OutcomeDist::Full { bits, ln_masses })
}

/// Hamming-form weights for the two-corner mixture `w·δ_{c^d} + (1-w)·δ_{(1-c)^d}`.
pub(crate) fn two_corner_weights(ln_w: f64, ln_1w: f64, c: f64, bits: usize) -> Vec<f64> {
    let ln_c = c.ln();
    let ln_1c = (-c).ln_1p();
    (0..=bits)
        .map(|j| {
            let at_c = pow_ln(j, ln_c) + pow_ln(bits - j, ln_1c);
            let at_1c = pow_ln(bits - j, ln_c) + pow_ln(j, ln_1c);
            log_add_exp(ln_w + at_c, ln_1w + at_1c)
        })
        .collect()
}

/// Hamming-form pushforwards `(P_j)`, `(Q_j)` of the symmetric pair
/// `P = p·δ_{c^d} + (1-p)·δ_{(1-c)^d}`, `Q = (1-p)·δ_{c^d} + p·δ_{(1-c)^d}`.
pub fn two_point_pushforward(p: f64, params: &AmpParams) -> Result<(OutcomeDist, OutcomeDist)> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::usage("p", format!("must lie in (0, 1/2], got {p}")));
    }
    params.require_interior()?;
    Ok(two_point_pushforward_ln(p.ln(), (-p).ln_1p(), params))
}

/// Same as [`two_point_pushforward`] from `ln p` and `ln(1-p)`.
pub fn two_point_pushforward_ln(ln_p: f64, ln_1p: f64, params: &AmpParams) -> (OutcomeDist, OutcomeDist) {
    let bits = params.dk();
    let pw = two_corner_weights(ln_p, ln_1p, params.c(), bits);
    let qw = two_corner_weights(ln_1p, ln_p, params.c(), bits);
    (
        OutcomeDist::Hamming { bits, ln_weights: pw },
        OutcomeDist::Hamming { bits, ln_weights: qw },
    )
}

/// Moves every point's mass onto the corners.
///
/// Coordinate `x_j` splits as `λ_j·c + (1-λ_j)·(1-c)` with
/// `λ_j = (1-c-x_j)/(1-2c)`; corner masses are products of these weights.
/// The result is a post-processing of the input, so divergences between two
/// reduced mixtures never grow. `Bern_1` is preserved exactly. For `k ≥ 2` it
/// is not: the `k` samples of an interior point share one bias, and no corner
/// mixture reproduces `x_j^2` (the mixture's second moment is larger).
pub fn corner_reduce(mix: &PointMixture, params: &AmpParams) -> Result<CornerDist> {
    params.require_interior()?;
    let c = params.c();
    let d = mix.d();
    if d != params.d() {
        return Err(Error::usage("points", format!("support dimension {d} does not match d={}", params.d())));
    }
    check_corner_dim(d)?;
    for x in mix.points() {
        ProductPoint::new(x.coords().to_vec(), c)?;
    }
    let n = 1usize << d;
    let splits: Vec<Vec<(f64, f64)>> = mix
        .points()
        .iter()
        .map(|x| {
            x.coords()
                .iter()
                .map(|&v| {
                    let lam = ((1.0 - c - v) / (1.0 - 2.0 * c)).clamp(0.0, 1.0);
                    (lam.ln(), (-lam).ln_1p())
                })
                .collect()
        })
        .collect();
    let weights = mix.masses().ln_masses();
    let mut terms = Vec::with_capacity(splits.len());
    let ln_masses = (0..n)
        .map(|i| {
            terms.clear();
            for (split, &w) in splits.iter().zip(weights) {
                let mut t = w;
                for (j, &(at_c, at_1c)) in split.iter().enumerate() {
                    t += if (i >> j) & 1 == 0 { at_c } else { at_1c };
                }
                terms.push(t);
            }
            log_sum_exp(&terms)
        })
        .collect();
    CornerDist::from_ln(d, c, ln_masses)
}

/// Precomputed likelihood table `ln Pr[outcome class | corner]` with class multiplicities.
///
/// The count form groups outcomes by the number of ones in each coordinate
/// across the `k` samples, giving `(k+1)^d` classes; at `d = 1` these are the
/// `k+1` Hamming weights.
#[derive(Debug, Clone)]
pub struct PushforwardKernel {
    /// support points (columns)
    corners: usize,
    ln_mult: Vec<f64>,
    ln_lik: Vec<f64>,
}

/// Largest table (classes × corners) a kernel may hold.
const KERNEL_GUARD: usize = 1 << 24;

impl PushforwardKernel {
    /// Count-form kernel over the `2^d` corners.
    pub fn counts(d: usize, c: f64, k: usize) -> Result<Self> {
        check_corner_dim(d)?;
        let corners: Vec<Vec<f64>> = (0..1usize << d)
            .map(|i| (0..d).map(|j| if (i >> j) & 1 == 0 { c } else { 1.0 - c }).collect())
            .collect();
        PushforwardKernel::for_points(&corners, k)
    }

    /// Count-form kernel over an arbitrary list of points in `[0,1]^d`.
    pub fn for_points(points: &[Vec<f64>], k: usize) -> Result<Self> {
        if points.is_empty() || k == 0 {
            return Err(Error::usage("points", "need at least one point and k >= 1"));
        }
        let d = points[0].len();
        let columns = points.len();
        let base = k + 1;
        let classes = base
            .checked_pow(d as u32)
            .filter(|&r| r.saturating_mul(columns) <= KERNEL_GUARD)
            .ok_or(Error::Capacity {
                guard: "pushforward kernel size",
                limit: KERNEL_GUARD,
                value: usize::MAX,
            })?;
        let logs: Vec<Vec<(f64, f64)>> = points
            .iter()
            .map(|x| x.iter().map(|&v| (v.ln(), (-v).ln_1p())).collect())
            .collect();
        let binom = ln_binomial_row(k);
        let mut ln_mult = Vec::with_capacity(classes);
        let mut ln_lik = Vec::with_capacity(classes * columns);
        let mut counts = vec![0usize; d];
        for class in 0..classes {
            let mut rest = class;
            for n in counts.iter_mut() {
                *n = rest % base;
                rest /= base;
            }
            ln_mult.push(counts.iter().map(|&n| binom[n]).sum());
            for x in &logs {
                let t: f64 = counts
                    .iter()
                    .zip(x)
                    .map(|(&n, &(l1, l0))| pow_ln(n, l1) + pow_ln(k - n, l0))
                    .sum();
                ln_lik.push(t);
            }
        }
        Ok(PushforwardKernel {
            corners: columns,
            ln_mult,
            ln_lik,
        })
    }

    pub fn classes(&self) -> usize {
        self.ln_mult.len()
    }

    /// Per-outcome log-probability in each class.
    pub fn push(&self, ln_corner_masses: &[f64]) -> Vec<f64> {
        debug_assert_eq!(ln_corner_masses.len(), self.corners);
        let mut terms = Vec::with_capacity(self.corners);
        self.ln_lik
            .chunks_exact(self.corners)
            .map(|row| {
                terms.clear();
                for (m, l) in ln_corner_masses.iter().zip(row) {
                    if *m > f64::NEG_INFINITY {
                        terms.push(m + l);
                    }
                }
                log_sum_exp(&terms)
            })
            .collect()
    }

    /// `R_α(Bern_k(P) ‖ Bern_k(Q))` for corner log-masses.
    pub fn divergence(&self, ln_p: &[f64], ln_q: &[f64], a: Alpha) -> f64 {
        if ln_p == ln_q {
            return 0.0;
        }
        let pp = self.push(ln_p);
        let qq = self.push(ln_q);
        (ln_renyi_moment(&pp, &qq, Some(&self.ln_mult), a) / a.minus_one()).max(0.0)
    }
}
