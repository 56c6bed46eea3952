//! Outcome laws of k Bernoulli samples from points, corners and mixtures.

use bernamp::bern::{
    bern_corner_pushforward, bern_mixture_pushforward, corner_reduce, two_point_pushforward, PointMixture,
    ProductPoint,
};
use bernamp::{AmpParams, CornerDist, MassVector};

fn main() -> bernamp::Result<()> {
    let c = 0.1;
    let params = AmpParams::new(c, 5.0, 1.0, 2, 2)?;

    // coordinate i of sample j sits at bit j*d + i
    let p = CornerDist::from_linear(2, c, &[0.4, 0.1, 0.2, 0.3])?;
    let out = bern_corner_pushforward(&p, 2)?;
    for o in 0..out.bits().pow(2).min(16) {
        println!("Pr[{o:04b}] = {:.6}", out.ln_prob(o).exp());
    }

    // the symmetric pair compresses to d*k + 1 Hamming weights
    let (bp, bq) = two_point_pushforward(0.2, &params)?;
    let compact = bp.renyi(&bq, params.alpha())?;
    let full = bp.to_full()?.renyi(&bq.to_full()?, params.alpha())?;
    println!("two-point divergence: hamming {compact:.12}, enumerated {full:.12}");

    let pts = vec![ProductPoint::new(vec![0.3, 0.8], c)?, ProductPoint::new(vec![0.5, 0.5], c)?];
    let mix = PointMixture::new(pts, MassVector::from_linear(&[0.6, 0.4])?)?;
    let reduced = corner_reduce(&mix, &params)?;
    println!("corner masses after reduction: {:?}", reduced.masses().to_linear());
    let a = bern_mixture_pushforward(&mix, 1)?;
    let b = bern_corner_pushforward(&reduced, 1)?;
    let err = (0..4).map(|o| (a.ln_prob(o).exp() - b.ln_prob(o).exp()).abs()).fold(0.0, f64::max);
    println!("single-sample law preserved to {err:.1e}");
    Ok(())
}
