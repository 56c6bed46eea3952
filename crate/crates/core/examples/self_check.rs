//! The fast self-test, then the same suite against a broken r_α.

use bernamp::validate::{run, run_with, Level};
use bernamp::{r_alpha, Alpha};

fn main() {
    let good = run(Level::Fast);
    for c in &good.checks {
        println!("{}", c.line());
    }
    println!("all passed: {}", good.all_passed());

    let negated = |p: f64, a: Alpha| -r_alpha(p, a).unwrap_or(f64::NAN);
    let bad = run_with(Level::Fast, &negated);
    let ids: Vec<_> = bad.failures().iter().map(|c| c.id).collect();
    println!("negated r_alpha fails: {ids:?}");
}
