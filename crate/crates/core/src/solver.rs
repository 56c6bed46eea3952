//! Exact computation of `Post_k(ε)` over corner distributions.
//!
//! The search space is pairs `(P, Q)` of distributions on `{c, 1-c}^d` with
//! `R_α(P‖Q) ≤ ε` and `R_α(Q‖P) ≤ ε`; the objective is
//! `R_α(Bern_k(P) ‖ Bern_k(Q))`. Both constraints are evaluated as
//! `ln Σ_i p_i^α q_i^{1-α} ≤ (α-1)ε`.
//!
//! The objective is convex in `(P, Q)` and the feasible set is convex, so the
//! supremum sits on the boundary of the feasible set. Two searches exploit this:
//!
//! * **dense grid**: the two-corner family supported on `c^d` and `(1-c)^d`
//!   (all of `C_1` when `d = 1`). The mass `x` of `P` is gridded in logit
//!   space; for each `x` the feasible `y` form an interval whose endpoints are
//!   located exactly, and the best cell is refined by golden section.
//! * **multistart ascent**: every pair is `P = M + sD`, `Q = M - sD` for a
//!   midpoint `M` and a zero-sum direction `D`. Along a ray both constraints and
//!   the objective are nondecreasing in `s`, so each `(M, D)` is pushed to its
//!   feasible boundary `s*` and Nelder–Mead maximizes the boundary value.
//!
//! The symmetric two-point pair whose divergence equals `ε` is always a
//! candidate, so results never fall below the two-point lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bern::{bern_corner_pushforward, AmpParams, CornerDist, PushforwardKernel, ENUMERATION_GUARD};
use crate::bounds::two_point_lower;
use crate::error::{Error, Result};
use crate::optim::{golden_max, last_feasible, nelder_mead_min};
use crate::renyi::{ln_renyi_moment, log_sum_exp, softplus, Alpha};

/// Largest dimension accepted by [`exact_post`].
pub const SOLVER_D_GUARD: usize = 10;

/// Log-mass given to corners switched off in seeded starts.
const SEED_OFF_LOGIT: f64 = -30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    DenseGrid,
    MultistartAscent,
    Both,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::DenseGrid => "grid",
            Strategy::MultistartAscent => "multistart",
            Strategy::Both => "both",
        }
    }

    fn grid(self) -> bool {
        matches!(self, Strategy::DenseGrid | Strategy::Both)
    }

    fn multistart(self) -> bool {
        matches!(self, Strategy::MultistartAscent | Strategy::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Grid cells over the free mass of the two-corner family.
    pub grid_steps: usize,
    pub restarts: usize,
    /// Nelder–Mead iteration cap per restart.
    pub max_iters: usize,
    /// Relative slack on log-domain constraints, scaled by `max(1, (α-1)ε)`.
    pub feas_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
    /// Random feasible candidates drawn by the general-support oracle.
    pub oracle_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::Both,
            grid_steps: 400,
            restarts: 64,
            max_iters: 2000,
            feas_tol: 1e-9,
            value_tol: 1e-6,
            seed: 0x5eed,
            oracle_samples: 10_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_steps < 2 {
            return Err(Error::usage("grid_steps", "must be >= 2"));
        }
        if self.restarts < 1 {
            return Err(Error::usage("restarts", "must be >= 1"));
        }
        if self.max_iters < 1 {
            return Err(Error::usage("max_iters", "must be >= 1"));
        }
        if !(self.feas_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::usage("feas_tol", "tolerances must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    GridOnly,
    MaxIters,
    InfeasibleInput,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::GridOnly => "grid_only",
            SolverStatus::MaxIters => "max_iters",
            SolverStatus::InfeasibleInput => "infeasible_input",
        }
    }
}

/// Maximized divergence with its witness pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub value: f64,
    pub argmax_p: CornerDist,
    pub argmax_q: CornerDist,
    /// `(ln M(P‖Q) - (α-1)ε, ln M(Q‖P) - (α-1)ε) / max(1, (α-1)ε)`.
    pub feasibility_residuals: (f64, f64),
    pub status: SolverStatus,
    pub strategy_used: SolverConfig,
}

/// How `R_α(Bern_k(P)‖Bern_k(Q))` is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectivePath {
    /// Over all `2^{dk}` outcomes.
    Enumerated,
    /// Over per-coordinate one-counts, `(k+1)^d` classes; `k+1` Hamming weights at `d = 1`.
    Counts,
}

fn check_pair(p: &CornerDist, q: &CornerDist) -> Result<()> {
    if p.d() != q.d() || p.c() != q.c() {
        return Err(Error::usage("q", "corner distributions differ in d or c"));
    }
    Ok(())
}

/// `R_α(Bern_k(P)‖Bern_k(Q))` in nats via the count form.
pub fn objective_eval(p: &CornerDist, q: &CornerDist, params: &AmpParams) -> Result<f64> {
    objective_eval_with(p, q, params, ObjectivePath::Counts)
}

pub fn objective_eval_with(p: &CornerDist, q: &CornerDist, params: &AmpParams, path: ObjectivePath) -> Result<f64> {
    check_pair(p, q)?;
    if p.d() != params.d() {
        return Err(Error::usage("p", "dimension does not match params"));
    }
    if params.dk() > ENUMERATION_GUARD && p.d() > 1 {
        return Err(Error::Capacity {
            guard: "d*k enumeration",
            limit: ENUMERATION_GUARD,
            value: params.dk(),
        });
    }
    match path {
        ObjectivePath::Enumerated => {
            let bp = bern_corner_pushforward(p, params.k())?;
            let bq = bern_corner_pushforward(q, params.k())?;
            bp.renyi(&bq, params.alpha())
        }
        ObjectivePath::Counts => {
            let kern = PushforwardKernel::counts(p.d(), p.c(), params.k())?;
            Ok(kern.divergence(p.ln_masses(), q.ln_masses(), params.alpha()))
        }
    }
}

/// `(R_α(P‖Q), R_α(Q‖P))`; `+∞` entries are valid.
pub fn constraint_eval(p: &CornerDist, q: &CornerDist, a: Alpha) -> Result<(f64, f64)> {
    check_pair(p, q)?;
    let (lp, lq) = (p.ln_masses(), q.ln_masses());
    if lp == lq {
        return Ok((0.0, 0.0));
    }
    let scale = a.minus_one();
    let f = |m: f64| (m / scale).max(0.0);
    Ok((f(ln_renyi_moment(lp, lq, None, a)), f(ln_renyi_moment(lq, lp, None, a))))
}

/// Shared evaluation state for one instance.
struct Problem {
    kernel: PushforwardKernel,
    alpha: Alpha,
    budget: f64,
    n: usize,
}

impl Problem {
    fn new(kernel: PushforwardKernel, n: usize, params: &AmpParams) -> Self {
        Problem {
            kernel,
            alpha: params.alpha(),
            budget: params.alpha().minus_one() * params.eps(),
            n,
        }
    }

    fn moments(&self, lp: &[f64], lq: &[f64]) -> (f64, f64) {
        if lp == lq {
            return (0.0, 0.0);
        }
        (
            ln_renyi_moment(lp, lq, None, self.alpha),
            ln_renyi_moment(lq, lp, None, self.alpha),
        )
    }

    fn excess(&self, lp: &[f64], lq: &[f64]) -> f64 {
        let (a, b) = self.moments(lp, lq);
        a.max(b) - self.budget
    }

    fn objective(&self, lp: &[f64], lq: &[f64]) -> f64 {
        self.kernel.divergence(lp, lq, self.alpha)
    }

    fn residuals(&self, lp: &[f64], lq: &[f64]) -> (f64, f64) {
        let (a, b) = self.moments(lp, lq);
        let scale = self.budget.max(1.0);
        ((a - self.budget) / scale, (b - self.budget) / scale)
    }

    /// Corner log-masses of the two-corner family at logit `t`.
    fn family(&self, t: f64) -> Vec<f64> {
        let mut v = vec![f64::NEG_INFINITY; self.n];
        v[0] = -softplus(-t);
        v[self.n - 1] = -softplus(t);
        v
    }

    /// Largest `δ ≤ cap` keeping `(family(t), family(t + dir·δ))` feasible.
    fn reach(&self, t: f64, dir: f64, cap: f64) -> f64 {
        let lp = self.family(t);
        let g = |delta: f64| self.excess(&lp, &self.family(t + dir * delta));
        let mut hi = 1.0f64;
        while hi < cap && g(hi) <= 0.0 {
            hi *= 2.0;
        }
        let hi = hi.min(cap);
        let lo = if hi <= 1.0 { 0.0 } else { hi * 0.5 };
        last_feasible(g, lo, hi)
    }

    /// Largest `s` with the symmetric pair `(family(-s), family(s))` feasible.
    fn symmetric_reach(&self, cap: f64) -> f64 {
        let g = |s: f64| self.excess(&self.family(-s), &self.family(s));
        let mut hi = 1.0f64;
        while hi < cap && g(hi) <= 0.0 {
            hi *= 2.0;
        }
        let hi = hi.min(cap);
        let lo = if hi <= 1.0 { 0.0 } else { hi * 0.5 };
        last_feasible(g, lo, hi)
    }

    /// Linear-domain ray `P = M + sD`, `Q = M - sD` pushed to its feasible boundary.
    fn ray_boundary(&self, theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (m, dir) = decode(theta, self.n);
        let s_max = m
            .iter()
            .zip(&dir)
            .filter(|(_, d)| **d != 0.0)
            .map(|(mi, d)| mi / d.abs())
            .fold(f64::INFINITY, f64::min);
        let at = |s: f64| {
            let side = |sign: f64| {
                let mut v: Vec<f64> = m.iter().zip(&dir).map(|(mi, d)| (mi + sign * s * d).max(0.0).ln()).collect();
                // clamping at zero can leave the total a few ulps off
                let z = log_sum_exp(&v);
                v.iter_mut().for_each(|x| *x -= z);
                v
            };
            (side(1.0), side(-1.0))
        };
        if !s_max.is_finite() {
            return at(0.0);
        }
        let s = last_feasible(
            |s| {
                let (lp, lq) = at(s);
                self.excess(&lp, &lq)
            },
            0.0,
            s_max,
        );
        at(s)
    }
}

/// `θ = (a_1..a_{n-1}, b_0..b_{n-1})` to midpoint `softmax(0, a)` and direction `b - mean(b)`.
fn decode(theta: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut logits = Vec::with_capacity(n);
    logits.push(0.0);
    logits.extend_from_slice(&theta[..n - 1]);
    let z = log_sum_exp(&logits);
    let m: Vec<f64> = logits.iter().map(|l| (l - z).exp()).collect();
    let b = &theta[n - 1..];
    let mean = b.iter().sum::<f64>() / n as f64;
    let dir = b.iter().map(|v| v - mean).collect();
    (m, dir)
}

fn seed_theta(n: usize, spread: bool) -> Vec<f64> {
    let mut theta = vec![0.0; 2 * n - 1];
    if spread {
        for v in theta.iter_mut().take(n - 2) {
            *v = SEED_OFF_LOGIT;
        }
    }
    theta[n - 1] = 1.0;
    theta[2 * n - 2] = -1.0;
    theta
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let spread = [0.5, 2.0, 5.0][rng.random_range(0..3)];
    let mut theta = Vec::with_capacity(2 * n - 1);
    for _ in 0..n - 1 {
        let z: f64 = rng.sample(StandardNormal);
        theta.push(spread * z);
    }
    let sparse = rng.random_bool(0.5);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        theta.push(if sparse && rng.random_bool(0.5) { 0.0 } else { z });
    }
    theta
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    lp: Vec<f64>,
    lq: Vec<f64>,
    converged: bool,
}

/// Keeps the first strictly-best candidate, so ties resolve by position.
fn best_of<I: IntoIterator<Item = Candidate>>(iter: I) -> Option<Candidate> {
    iter.into_iter().fold(None, |acc: Option<Candidate>, c| match acc {
        Some(b) if b.value >= c.value => Some(b),
        _ if c.value.is_nan() => None,
        _ => Some(c),
    })
}

fn symmetric_candidate(pb: &Problem, cap: f64) -> Candidate {
    let s = pb.symmetric_reach(cap);
    let (lp, lq) = (pb.family(-s), pb.family(s));
    Candidate {
        value: pb.objective(&lp, &lq),
        lp,
        lq,
        converged: true,
    }
}

fn grid_candidate(pb: &Problem, eps: f64, steps: usize) -> Candidate {
    let half_width = eps + 40.0;
    let cap = 4.0 * half_width + 4.0 * eps + 100.0;
    let eval_at = |t: f64| -> Candidate {
        let lp = pb.family(t);
        let mut best: Option<Candidate> = None;
        for dir in [1.0, -1.0] {
            let lq = pb.family(t + dir * pb.reach(t, dir, cap));
            for (a, b) in [(&lp, &lq), (&lq, &lp)] {
                let c = Candidate {
                    value: pb.objective(a, b),
                    lp: a.clone(),
                    lq: b.clone(),
                    converged: true,
                };
                best = best_of(best.into_iter().chain(std::iter::once(c)));
            }
        }
        best.expect("at least one family candidate")
    };
    let ts: Vec<f64> = (0..steps)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / (steps - 1) as f64)
        .collect();
    let (ibest, grid_best) = ts
        .iter()
        .map(|&t| eval_at(t))
        .enumerate()
        .fold(None, |acc: Option<(usize, Candidate)>, (i, c)| match acc {
            Some((j, b)) if b.value >= c.value => Some((j, b)),
            _ => Some((i, c)),
        })
        .expect("grid is non-empty");
    let lo = ts[ibest.saturating_sub(1)];
    let hi = ts[(ibest + 1).min(steps - 1)];
    let (t_ref, _) = golden_max(|t| eval_at(t).value, lo, hi, 1e-13, 300);
    let refined = eval_at(t_ref);
    best_of([grid_best, refined]).expect("finite grid values")
}

struct MultistartOutcome {
    best: Candidate,
}

fn multistart(pb: &Problem, cfg: &SolverConfig) -> MultistartOutcome {
    let n = pb.n;
    let runs: Vec<Candidate> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let theta0 = match r {
                0 => seed_theta(n, true),
                1 => seed_theta(n, false),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(r as u64);
                    random_theta(&mut rng, n)
                }
            };
            polish(pb, &theta0, cfg.max_iters)
        })
        .collect();
    MultistartOutcome {
        best: best_of(runs).expect("at least one restart"),
    }
}

fn polish(pb: &Problem, theta0: &[f64], max_iters: usize) -> Candidate {
    let out = nelder_mead_min(
        |th| {
            let (lp, lq) = pb.ray_boundary(th);
            -pb.objective(&lp, &lq)
        },
        theta0,
        1.0,
        max_iters,
        1e-13,
    );
    let (lp, lq) = pb.ray_boundary(&out.x);
    Candidate {
        value: pb.objective(&lp, &lq),
        lp,
        lq,
        converged: out.converged,
    }
}

/// `Post_k(ε)` for range `[c, 1-c]^d`, with a witness pair.
pub fn exact_post(params: &AmpParams, cfg: &SolverConfig) -> Result<OptResult> {
    params.require_interior()?;
    cfg.validate()?;
    if params.d() > SOLVER_D_GUARD {
        return Err(Error::Capacity {
            guard: "solver dimension",
            limit: SOLVER_D_GUARD,
            value: params.d(),
        });
    }
    if params.dk() > ENUMERATION_GUARD {
        return Err(Error::Capacity {
            guard: "d*k enumeration",
            limit: ENUMERATION_GUARD,
            value: params.dk(),
        });
    }
    let (d, c) = (params.d(), params.c());
    let n = 1usize << d;
    let pb = Problem::new(PushforwardKernel::counts(d, c, params.k())?, n, params);

    if params.eps() == 0.0 {
        let u = CornerDist::uniform(d, c)?;
        return Ok(OptResult {
            value: 0.0,
            argmax_p: u.clone(),
            argmax_q: u,
            feasibility_residuals: (0.0, 0.0),
            status: SolverStatus::Converged,
            strategy_used: cfg.clone(),
        });
    }

    let mut candidates = vec![symmetric_candidate(&pb, 4.0 * params.eps() + 200.0)];
    if cfg.strategy.grid() {
        candidates.push(grid_candidate(&pb, params.eps(), cfg.grid_steps));
    }
    let mut ms_converged = true;
    if cfg.strategy.multistart() {
        let ms = multistart(&pb, cfg);
        ms_converged = ms.best.converged;
        candidates.push(ms.best);
    }
    let best = best_of(candidates).ok_or_else(|| Error::Unsupported("objective evaluated to NaN".into()))?;

    let status = match (cfg.strategy, d == 1) {
        (Strategy::DenseGrid, true) | (Strategy::Both, true) => SolverStatus::Converged,
        (Strategy::DenseGrid, false) => SolverStatus::GridOnly,
        (Strategy::Both, false) if !ms_converged => SolverStatus::GridOnly,
        (_, _) if ms_converged => SolverStatus::Converged,
        _ => SolverStatus::MaxIters,
    };

    let residuals = pb.residuals(&best.lp, &best.lq);
    Ok(OptResult {
        value: pb.objective(&best.lp, &best.lq),
        argmax_p: CornerDist::from_ln(d, c, best.lp)?,
        argmax_q: CornerDist::from_ln(d, c, best.lq)?,
        feasibility_residuals: residuals,
        status,
        strategy_used: cfg.clone(),
    })
}

/// Naive search over `P, Q` supported on `support_steps` evenly spaced points of
/// `[c, 1-c]` (`d = 1`). Serves as an oracle: by corner optimality it cannot
/// exceed [`exact_post`].
pub fn brute_force_post_general_support(params: &AmpParams, support_steps: usize, cfg: &SolverConfig) -> Result<f64> {
    params.require_interior()?;
    cfg.validate()?;
    if params.d() != 1 {
        return Err(Error::Capacity {
            guard: "oracle dimension",
            limit: 1,
            value: params.d(),
        });
    }
    if params.k() > 2 {
        return Err(Error::Capacity {
            guard: "oracle sample count",
            limit: 2,
            value: params.k(),
        });
    }
    if support_steps > 9 {
        return Err(Error::Capacity {
            guard: "oracle support size",
            limit: 9,
            value: support_steps,
        });
    }
    if support_steps < 2 {
        return Err(Error::usage("support_steps", "must be >= 2"));
    }
    if params.eps() == 0.0 {
        return Ok(0.0);
    }
    let c = params.c();
    let points: Vec<Vec<f64>> = (0..support_steps)
        .map(|m| vec![c + (1.0 - 2.0 * c) * m as f64 / (support_steps - 1) as f64])
        .collect();
    let pb = Problem::new(PushforwardKernel::for_points(&points, params.k())?, support_steps, params);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(cfg.oracle_samples + 2);
    scored.push((f64::NEG_INFINITY, seed_theta(support_steps, true)));
    for _ in 0..cfg.oracle_samples {
        let th = random_theta(&mut rng, support_steps);
        let (lp, lq) = pb.ray_boundary(&th);
        scored.push((pb.objective(&lp, &lq), th));
    }
    {
        let (lp, lq) = pb.ray_boundary(&scored[0].1);
        scored[0].0 = pb.objective(&lp, &lq);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&i, &j| scored[j].0.total_cmp(&scored[i].0).then(i.cmp(&j)));
    let polish_count = cfg.restarts.clamp(1, 16);
    let polished: Vec<Candidate> = order
        .iter()
        .take(polish_count)
        .map(|&i| polish(&pb, &scored[i].1, cfg.max_iters))
        .collect();
    let best_raw = scored[order[0]].0;
    let best_polished = best_of(polished).map_or(f64::NEG_INFINITY, |c| c.value);
    Ok(best_raw.max(best_polished))
}

/// `exact_post - two_point_lower`; a diagnostic for the equality conjecture.
pub fn conjecture_gap(params: &AmpParams, cfg: &SolverConfig) -> Result<f64> {
    let exact = exact_post(params, cfg)?;
    Ok(exact.value - two_point_lower(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::asymptote_upper;
    use crate::renyi::r_alpha;

    fn params(c: f64, alpha: f64, eps: f64, d: usize, k: usize) -> AmpParams {
        AmpParams::new(c, alpha, eps, d, k).unwrap()
    }

    fn quick() -> SolverConfig {
        SolverConfig {
            restarts: 8,
            max_iters: 600,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            grid_steps: 1,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            restarts: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            feas_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_budget_gives_zero() {
        let r = exact_post(&params(0.1, 5.0, 0.0, 2, 2), &quick()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmax_p, r.argmax_q);
    }

    #[test]
    fn large_budget_reaches_asymptote() {
        let p = params(0.1, 50.0, 1e6, 1, 1);
        let r = exact_post(&p, &quick()).unwrap();
        let asym = r_alpha(0.1, p.alpha()).unwrap();
        assert!((r.value - asym).abs() < 1e-3, "{} vs {}", r.value, asym);
    }

    #[test]
    fn far_below_budget_at_c_03() {
        let p = params(0.3, 50.0, 5.0, 1, 1);
        let r = exact_post(&p, &quick()).unwrap();
        assert!(r.value <= 0.8402 + 1e-3, "{}", r.value);
        assert!(r.value <= asymptote_upper(&p).unwrap() + 1e-9);
    }

    #[test]
    fn witness_reproduces_value_and_is_feasible() {
        for (d, k, eps) in [(1, 2, 0.7), (2, 1, 1.3), (2, 2, 0.4)] {
            let p = params(0.1, 5.0, eps, d, k);
            let cfg = quick();
            let r = exact_post(&p, &cfg).unwrap();
            let again = objective_eval_with(&r.argmax_p, &r.argmax_q, &p, ObjectivePath::Enumerated).unwrap();
            assert!((again - r.value).abs() < 1e-10);
            assert!(r.feasibility_residuals.0 <= cfg.feas_tol);
            assert!(r.feasibility_residuals.1 <= cfg.feas_tol);
            let (c1, c2) = constraint_eval(&r.argmax_p, &r.argmax_q, p.alpha()).unwrap();
            assert!(c1 <= eps * (1.0 + 1e-9) && c2 <= eps * (1.0 + 1e-9));
        }
    }

    #[test]
    fn guards() {
        let cfg = quick();
        assert!(matches!(
            exact_post(&params(0.1, 5.0, 1.0, 11, 1), &cfg),
            Err(Error::Capacity { limit: 10, .. })
        ));
        assert!(matches!(
            exact_post(&params(0.1, 5.0, 1.0, 5, 5), &cfg),
            Err(Error::Capacity { limit: 24, .. })
        ));
        assert!(exact_post(&params(0.0, 5.0, 1.0, 1, 1), &cfg).is_err());
        assert!(brute_force_post_general_support(&params(0.1, 5.0, 1.0, 1, 3), 5, &cfg).is_err());
        assert!(brute_force_post_general_support(&params(0.1, 5.0, 1.0, 1, 1), 10, &cfg).is_err());
        assert!(brute_force_post_general_support(&params(0.1, 5.0, 1.0, 2, 1), 5, &cfg).is_err());
    }

    #[test]
    fn constraint_examples() {
        let a = Alpha::new(3.0).unwrap();
        let u = CornerDist::uniform(2, 0.1).unwrap();
        assert_eq!(constraint_eval(&u, &u, a).unwrap(), (0.0, 0.0));
        let p0 = CornerDist::point_mass(1, 0.1, 0).unwrap();
        let p1 = CornerDist::point_mass(1, 0.1, 1).unwrap();
        assert_eq!(constraint_eval(&p0, &p1, a).unwrap(), (f64::INFINITY, f64::INFINITY));
        let p = CornerDist::from_linear(1, 0.1, &[0.2, 0.8]).unwrap();
        let q = CornerDist::from_linear(1, 0.1, &[0.8, 0.2]).unwrap();
        let (x, y) = constraint_eval(&p, &q, a).unwrap();
        let r = r_alpha(0.2, a).unwrap();
        assert!((x - r).abs() < 1e-12 && (y - r).abs() < 1e-12);
    }

    #[test]
    fn objective_paths_agree() {
        let p = params(0.2, 4.0, 1.0, 1, 3);
        let x = CornerDist::from_linear(1, 0.2, &[0.35, 0.65]).unwrap();
        let y = CornerDist::from_linear(1, 0.2, &[0.9, 0.1]).unwrap();
        let a = objective_eval_with(&x, &y, &p, ObjectivePath::Counts).unwrap();
        let b = objective_eval_with(&x, &y, &p, ObjectivePath::Enumerated).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert_eq!(objective_eval(&x, &x, &p).unwrap(), 0.0);
    }

    #[test]
    fn deterministic() {
        let p = params(0.1, 5.0, 0.8, 2, 1);
        let a = exact_post(&p, &quick()).unwrap();
        let b = exact_post(&p, &quick()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn oracle_on_corners_matches_exact() {
        let p = params(0.1, 2.0, 1.0, 1, 1);
        let cfg = SolverConfig {
            oracle_samples: 2000,
            ..quick()
        };
        let exact = exact_post(&p, &cfg).unwrap().value;
        let oracle = brute_force_post_general_support(&p, 2, &cfg).unwrap();
        assert!((oracle - exact).abs() <= cfg.value_tol, "{oracle} vs {exact}");
        assert_eq!(brute_force_post_general_support(&p.with_eps(0.0).unwrap(), 5, &cfg).unwrap(), 0.0);
    }
}
