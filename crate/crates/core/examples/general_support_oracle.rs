//! Search over a 9-point support of [c, 1-c] never beats the corner optimum.

use bernamp::solver::brute_force_post_general_support;
use bernamp::{exact_post, AmpParams, SolverConfig};

fn main() -> bernamp::Result<()> {
    let cfg = SolverConfig {
        oracle_samples: 4000,
        ..SolverConfig::default()
    };
    for (c, alpha, eps, k) in [(0.1, 2.0, 1.0, 1), (0.3, 50.0, 0.5, 2)] {
        let params = AmpParams::new(c, alpha, eps, 1, k)?;
        let exact = exact_post(&params, &cfg)?.value;
        let oracle = brute_force_post_general_support(&params, 9, &cfg)?;
        println!("c={c} alpha={alpha} eps={eps} k={k}: corners {exact:.9}, 9-point support {oracle:.9}");
    }
    Ok(())
}
