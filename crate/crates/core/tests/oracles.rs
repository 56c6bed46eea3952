//! Worked examples checked against independently computed values.

use bernamp::bern::{bern_corner_pushforward, bern_point_pushforward, two_point_pushforward, ProductPoint};
use bernamp::bounds::{
    asymptote_upper, bounds_report, hoeffding_bracket, hoeffding_k_factor, ppi_upper, two_point_lower, Regime,
    LARGE_EPS_SENTINEL,
};
use bernamp::renyi::{log_sum_exp, r_alpha_inverse};
use bernamp::solver::{
    brute_force_post_general_support, conjecture_gap, constraint_eval, objective_eval, objective_eval_with,
    ObjectivePath,
};
use bernamp::sweep::{run_sweep, ExactPolicy, Preset, SweepSpec};
use bernamp::{exact_post, r_alpha, renyi_divergence, Alpha, AmpParams, CornerDist, MassVector, SolverConfig};

fn a(v: f64) -> Alpha {
    Alpha::new(v).unwrap()
}

fn params(c: f64, alpha: f64, eps: f64, d: usize, k: usize) -> AmpParams {
    AmpParams::new(c, alpha, eps, d, k).unwrap()
}

/// `(1/(α-1)) ln Σ p^α q^{1-α}` in plain linear arithmetic.
fn naive_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(x, y)| x.powf(alpha) * y.powf(1.0 - alpha)).sum();
    s.ln() / (alpha - 1.0)
}

#[test]
fn log_sum_exp_examples() {
    assert!((log_sum_exp(&[0.0, 0.0]) - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    assert_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + std::f64::consts::LN_2);
}

#[test]
fn binary_symmetric_divergence_matches_general_form() {
    for &alpha in &[1.5, 2.0, 7.0, 50.0] {
        for &p0 in &[0.01, 0.2, 0.37, 0.5] {
            let p = MassVector::from_linear(&[p0, 1.0 - p0]).unwrap();
            let q = MassVector::from_linear(&[1.0 - p0, p0]).unwrap();
            let general = renyi_divergence(&p, &q, a(alpha)).unwrap();
            let naive = naive_renyi(&[p0, 1.0 - p0], &[1.0 - p0, p0], alpha);
            assert!((general - r_alpha(p0, a(alpha)).unwrap()).abs() < 1e-12);
            assert!((general - naive).abs() < 1e-10);
        }
    }
}

#[test]
fn inverse_examples() {
    assert_eq!(r_alpha_inverse(0.0, a(50.0)).unwrap(), 0.5);
    assert!((r_alpha_inverse(4.59, a(50.0)).unwrap() - 0.01).abs() < 1e-3);
    for e in [0.1, 1.0, 5.0] {
        for alpha in [2.0, 50.0] {
            let p = r_alpha_inverse(e, a(alpha)).unwrap();
            assert!((r_alpha(p, a(alpha)).unwrap() - e).abs() < 1e-9);
        }
    }
}

#[test]
fn point_pushforward_examples() {
    let one = bern_point_pushforward(&ProductPoint::new(vec![1.0], 0.0).unwrap(), 1).unwrap();
    assert_eq!(one.ln_prob(1), 0.0);
    assert_eq!(one.ln_prob(0), f64::NEG_INFINITY);
    let at_c = bern_point_pushforward(&ProductPoint::new(vec![0.1], 0.1).unwrap(), 1).unwrap();
    assert!((at_c.ln_prob(1).exp() - 0.1).abs() < 1e-15);
    let fair = bern_point_pushforward(&ProductPoint::new(vec![0.5, 0.5], 0.1).unwrap(), 1).unwrap();
    for o in 0..4 {
        assert!((fair.ln_prob(o).exp() - 0.25).abs() < 1e-15);
    }
}

#[test]
fn corner_pushforward_examples() {
    let p = CornerDist::point_mass(1, 0.1, 0).unwrap();
    assert!((bern_corner_pushforward(&p, 1).unwrap().ln_prob(1).exp() - 0.1).abs() < 1e-15);
    let u = CornerDist::uniform(1, 0.1).unwrap();
    assert!((bern_corner_pushforward(&u, 1).unwrap().ln_prob(1).exp() - 0.5).abs() < 1e-15);
}

#[test]
fn two_point_hamming_form_matches_enumeration() {
    let pr = params(0.1, 2.0, 1.0, 2, 2);
    let (bp, bq) = two_point_pushforward(0.2, &pr).unwrap();
    let compact = bp.renyi(&bq, pr.alpha()).unwrap();
    // enumerate {0,1}^4 by hand
    let c: f64 = 0.1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for o in 0u32..16 {
        let w = o.count_ones() as i32;
        let lo = c.powi(w) * (1.0 - c).powi(4 - w);
        let hi = (1.0 - c).powi(w) * c.powi(4 - w);
        x.push(0.2 * lo + 0.8 * hi);
        y.push(0.8 * lo + 0.2 * hi);
    }
    assert!((compact - naive_renyi(&x, &y, 2.0)).abs() < 1e-10);
}

#[test]
fn two_point_limit_reaches_asymptote() {
    let pr = params(0.1, 5.0, 1.0, 2, 3);
    let (bp, bq) = two_point_pushforward(1e-14, &pr).unwrap();
    let v = bp.renyi(&bq, pr.alpha()).unwrap();
    let asym = asymptote_upper(&pr).unwrap();
    assert!((v - asym).abs() < 1e-6 * asym);
}

#[test]
fn bound_examples() {
    assert_eq!(ppi_upper(&params(0.1, 5.0, 5.0, 1, 1)), 5.0);
    let a03 = asymptote_upper(&params(0.3, 50.0, 1.0, 1, 1)).unwrap();
    let direct = (0.3f64.powi(50) * 0.7f64.powi(-49) + 0.7f64.powi(50) * 0.3f64.powi(-49)).ln() / 49.0;
    assert!((a03 - direct).abs() < 1e-12);
    let one = asymptote_upper(&params(0.2, 5.0, 1.0, 1, 1)).unwrap();
    assert!((asymptote_upper(&params(0.2, 5.0, 1.0, 2, 3)).unwrap() - 6.0 * one).abs() < 1e-12);
}

#[test]
fn lower_bound_matches_enumerated_pair() {
    let pr = params(0.1, 2.0, 1.0, 1, 1);
    let p = r_alpha_inverse(1.0, a(2.0)).unwrap();
    let c = 0.1;
    // outcome 1 has probability c at corner 0 and 1-c at corner 1
    let x = [p * (1.0 - c) + (1.0 - p) * c, p * c + (1.0 - p) * (1.0 - c)];
    let y = [x[1], x[0]];
    assert!((two_point_lower(&pr).unwrap() - naive_renyi(&x, &y, 2.0)).abs() < 1e-10);
    assert_eq!(two_point_lower(&pr.with_eps(0.0).unwrap()).unwrap(), 0.0);
}

#[test]
fn hoeffding_examples() {
    let c = 0.5 - (5.0f64).sqrt() / 10.0; // 2(1/2-c)^2 = 0.1, so d=200 makes the exponent 20
    assert!(hoeffding_k_factor(c, 200) < 1e-8);
    let pr = params(0.1, 50.0, 1.0, 200, 1);
    let k = hoeffding_k_factor(0.1, 200);
    assert!(k < 1e-8);
    for i in 1..=49 {
        let p = i as f64 / 100.0;
        let b = hoeffding_bracket(&pr, p).unwrap();
        assert!(b.lower >= 0.026 - 1e-3 && b.upper <= 4.59 + 1e-2, "{b:?}");
        assert!(b.upper - b.lower <= 1e-4);
    }
}

#[test]
fn report_gap_stays_below_one_and_a_half_on_paper_grids() {
    for preset in [Preset::PaperK1, Preset::PaperMultiK] {
        let mut spec = SweepSpec::preset(preset);
        spec.include_exact = ExactPolicy::Never;
        spec.eps_grid.steps = 200;
        let rows = run_sweep(&spec).unwrap();
        let worst = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
        assert!(worst <= 1.5, "{preset:?}: {worst}");
        for r in &rows {
            assert!(r.lower <= r.ppi.min(r.asymptote) + 1e-9);
        }
    }
}

#[test]
fn report_at_endpoints() {
    let z = bounds_report(&params(0.1, 50.0, 0.0, 1, 1), None).unwrap();
    assert_eq!((z.lower_two_point, z.upper_ppi, z.gap_upper_lower), (0.0, 0.0, 0.0));
    assert_eq!(z.regime_hint, Regime::I);
    let big = bounds_report(&params(0.1, 50.0, LARGE_EPS_SENTINEL, 1, 1), None).unwrap();
    assert_eq!(big.regime_hint, Regime::III);
}

#[test]
fn objective_examples() {
    let pr = params(0.25, 3.0, 1.0, 1, 3);
    let x = CornerDist::from_linear(1, 0.25, &[0.3, 0.7]).unwrap();
    let y = CornerDist::from_linear(1, 0.25, &[0.85, 0.15]).unwrap();
    assert_eq!(objective_eval(&x, &x, &pr).unwrap(), 0.0);
    let fast = objective_eval(&x, &y, &pr).unwrap();
    let full = objective_eval_with(&x, &y, &pr, ObjectivePath::Enumerated).unwrap();
    assert!((fast - full).abs() < 1e-12);

    let pr = params(0.1, 5.0, 1.0, 2, 2);
    let p = 0.3;
    let mut m = vec![0.0; 4];
    m[0] = p;
    m[3] = 1.0 - p;
    let pp = CornerDist::from_linear(2, 0.1, &m).unwrap();
    m[0] = 1.0 - p;
    m[3] = p;
    let qq = CornerDist::from_linear(2, 0.1, &m).unwrap();
    let (bp, bq) = two_point_pushforward(p, &pr).unwrap();
    let reference = bp.renyi(&bq, pr.alpha()).unwrap();
    assert!((objective_eval(&pp, &qq, &pr).unwrap() - reference).abs() < 1e-12);
    let (r1, r2) = constraint_eval(&pp, &qq, pr.alpha()).unwrap();
    let r = r_alpha(p, pr.alpha()).unwrap();
    assert!((r1 - r).abs() < 1e-12 && (r2 - r).abs() < 1e-12);
}

#[test]
fn exact_examples() {
    let cfg = SolverConfig::default();
    let z = exact_post(&params(0.1, 5.0, 0.0, 2, 1), &cfg).unwrap();
    assert_eq!(z.value, 0.0);
    assert_eq!(z.argmax_p, z.argmax_q);
    for &(c, alpha) in &[(0.1, 50.0), (0.3, 5.0)] {
        let v = exact_post(&params(c, alpha, LARGE_EPS_SENTINEL, 1, 1), &cfg).unwrap().value;
        assert!((v - r_alpha(c, a(alpha)).unwrap()).abs() < 1e-3);
    }
    let v = exact_post(&params(0.1, 50.0, 1e3, 1, 1), &cfg).unwrap().value;
    assert!((v - r_alpha(0.1, a(50.0)).unwrap()).abs() < 1e-3);
    let v = exact_post(&params(0.3, 50.0, 5.0, 1, 1), &cfg).unwrap().value;
    assert!(v <= 0.8402 + 1e-3);
}

#[test]
fn oracle_examples() {
    let cfg = SolverConfig {
        oracle_samples: 3000,
        ..SolverConfig::default()
    };
    let pr = params(0.1, 2.0, 1.0, 1, 1);
    let exact = exact_post(&pr, &cfg).unwrap().value;
    assert_eq!(brute_force_post_general_support(&pr.with_eps(0.0).unwrap(), 9, &cfg).unwrap(), 0.0);
    let corners = brute_force_post_general_support(&pr, 2, &cfg).unwrap();
    assert!((corners - exact).abs() <= cfg.value_tol);
    let nine = brute_force_post_general_support(&pr, 9, &cfg).unwrap();
    assert!(nine <= exact + 1e-6);
}

#[test]
fn conjecture_gap_examples() {
    let cfg = SolverConfig::default();
    let tol = cfg.value_tol;
    assert!(conjecture_gap(&params(0.1, 5.0, 0.0, 1, 1), &cfg).unwrap().abs() <= tol);
    let big = conjecture_gap(&params(0.1, 50.0, LARGE_EPS_SENTINEL, 1, 2), &cfg).unwrap();
    assert!(big.abs() <= 2e-3);
    for eps in [0.1, 0.7, 3.0] {
        assert!(conjecture_gap(&params(0.01, 5.0, eps, 1, 1), &cfg).unwrap() >= -tol);
    }
}
