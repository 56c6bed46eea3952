//! Small derivative-free optimization routines used by the solver.

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone)]
pub(crate) struct NmOutcome {
    pub x: Vec<f64>,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge `step`.
///
/// Converged when the spread of simplex values drops below
/// `ftol · (1 + |f_best|)`. Non-finite values are treated as `+∞`.
pub(crate) fn nelder_mead_min<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    ftol: f64,
) -> NmOutcome {
    let m = x0.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    simplex.push(x0.to_vec());
    for i in 0..m {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut converged = false;
    let mut centroid = vec![0.0; m];
    let mut trial = vec![0.0; m];
    let mut trial2 = vec![0.0; m];

    for _ in 0..max_iters {
        // order by value, ties by position for determinism
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[m];
        if best.is_finite() && (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..m] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / m as f64;
            }
        }
        let lerp = |out: &mut Vec<f64>, t: f64, worst: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(worst) {
                *o = c + t * (c - w);
            }
        };

        lerp(&mut trial, 1.0, &simplex[m]);
        let fr = eval(&trial);
        if fr < values[0] {
            lerp(&mut trial2, 2.0, &simplex[m]);
            let fe = eval(&trial2);
            if fe < fr {
                simplex[m].clone_from(&trial2);
                values[m] = fe;
            } else {
                simplex[m].clone_from(&trial);
                values[m] = fr;
            }
        } else if fr < values[m - 1] {
            simplex[m].clone_from(&trial);
            values[m] = fr;
        } else {
            let outside = fr < values[m];
            lerp(&mut trial2, if outside { 0.5 } else { -0.5 }, &simplex[m]);
            let fc = eval(&trial2);
            if fc < fr.min(values[m]) {
                simplex[m].clone_from(&trial2);
                values[m] = fc;
            } else {
                let anchor = simplex[0].clone();
                for i in 1..=m {
                    for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    values[i] = eval(&simplex[i]);
                }
            }
        }
    }

    let (ib, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("simplex is non-empty");
    NmOutcome {
        x: simplex[ib].clone(),
        converged,
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iters {
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Largest `s ∈ [lo, hi]` with `excess(s) ≤ 0`, for `excess` nondecreasing
/// and `excess(lo) ≤ 0`. Illinois false position with bisection fallback;
/// the returned point is always one where `excess` was observed `≤ 0`.
pub(crate) fn last_feasible<G: FnMut(f64) -> f64>(mut excess: G, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_hi = excess(hi);
    if g_hi <= 0.0 {
        return hi;
    }
    let mut g_lo = excess(lo);
    debug_assert!(g_lo <= 0.0 || g_lo.is_nan());
    let mut side = 0i8;
    for _ in 0..200 {
        let width = hi - lo;
        if width <= 1e-15 * hi.abs().max(lo.abs()).max(1e-300) {
            break;
        }
        let mut s = if g_hi.is_finite() && g_lo.is_finite() && g_hi > g_lo {
            lo + width * (-g_lo) / (g_hi - g_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !(s > lo && s < hi) || side.abs() >= 3 {
            s = 0.5 * (lo + hi);
            side = 0;
        }
        let g = excess(s);
        if g <= 0.0 {
            lo = s;
            g_lo = g;
            if side < 0 {
                g_hi *= 0.5;
            }
            side = if side < 0 { side - 1 } else { -1 };
        } else {
            hi = s;
            g_hi = g;
            if side > 0 {
                g_lo *= 0.5;
            }
            side = if side > 0 { side + 1 } else { 1 };
        }
    }
    lo
}
