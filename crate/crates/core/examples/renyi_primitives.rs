//! Rényi divergences, the binary symmetric divergence r_α and its inverse.

use bernamp::renyi::{log_sum_exp, r_alpha_inverse, r_alpha_inverse_ln};
use bernamp::{r_alpha, renyi_divergence, Alpha, MassVector};

fn main() -> bernamp::Result<()> {
    let a = Alpha::new(2.0)?;
    let p = MassVector::from_linear(&[0.3, 0.7])?;
    let q = MassVector::from_linear(&[0.7, 0.3])?;
    println!("R_2(p||q)      = {:.12}", renyi_divergence(&p, &q, a)?);
    println!("r_2(0.3)       = {:.12}", r_alpha(0.3, a)?);

    let a50 = Alpha::new(50.0)?;
    for p in [0.01, 0.1, 0.3, 0.49, 0.5] {
        println!("r_50({p:<4})     = {:.6}", r_alpha(p, a50)?);
    }

    for eps in [0.1, 1.0, 5.0] {
        println!("r_50^-1({eps:e}) = {:.12}", r_alpha_inverse(eps, a50)?);
    }
    // p itself underflows here, ln p does not
    println!("ln r_50^-1(1e6) = {:.6}", r_alpha_inverse_ln(1e6, a50)?);

    println!("lse(1000, 1000) = {}", log_sum_exp(&[1000.0, 1000.0]));
    Ok(())
}
