//! Exact amplification with its witness pair, against the two-point lower bound.

use bernamp::bounds::two_point_lower;
use bernamp::solver::objective_eval;
use bernamp::{exact_post, AmpParams, SolverConfig};

fn main() -> bernamp::Result<()> {
    let cfg = SolverConfig::default();
    for (d, k, eps) in [(1, 1, 0.5), (1, 2, 2.0), (2, 1, 1.0), (2, 2, 3.0)] {
        let params = AmpParams::new(0.1, 50.0, eps, d, k)?;
        let r = exact_post(&params, &cfg)?;
        let lb = two_point_lower(&params)?;
        println!(
            "d={d} k={k} eps={eps}: Post={:.9} LB={lb:.9} status={} residuals=({:.1e}, {:.1e})",
            r.value,
            r.status.as_str(),
            r.feasibility_residuals.0,
            r.feasibility_residuals.1
        );
        println!("  P={:?}", r.argmax_p.masses().to_linear());
        println!("  Q={:?}", r.argmax_q.masses().to_linear());
        let again = objective_eval(&r.argmax_p, &r.argmax_q, &params)?;
        assert!((again - r.value).abs() < 1e-10);
    }
    Ok(())
}
