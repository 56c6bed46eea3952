//! Lower bound, both upper bounds and the Hoeffding bracket at a few budgets.

use bernamp::bounds::{hoeffding_bracket, LARGE_EPS_SENTINEL};
use bernamp::{bounds_report, AmpParams};

fn main() -> bernamp::Result<()> {
    println!("{:>10} {:>10} {:>10} {:>10} {:>8}", "eps", "lower", "asymptote", "gap", "regime");
    for eps in [0.0, 0.1, 1.0, 3.0, 10.0, LARGE_EPS_SENTINEL] {
        let b = bounds_report(&AmpParams::new(0.1, 50.0, eps, 2, 1)?, None)?;
        println!(
            "{:>10.3e} {:>10.6} {:>10.6} {:>10.6} {:>8}",
            b.eps,
            b.lower_two_point,
            b.upper_asymptote,
            b.gap_upper_lower,
            b.regime_hint.as_str()
        );
    }

    let wide = AmpParams::new(0.1, 50.0, 1.0, 20, 1)?;
    let br = hoeffding_bracket(&wide, 0.3)?;
    println!("d=20 bracket at p=0.3: [{:.9}, {:.9}], K={:.3e}", br.lower, br.upper, br.k_factor);
    match hoeffding_bracket(&AmpParams::new(0.1, 50.0, 1.0, 2, 1)?, 0.3) {
        Err(e) => println!("d=2: {e}"),
        Ok(b) => println!("d=2: {b:?}"),
    }
    Ok(())
}
