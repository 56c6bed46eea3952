//! A small sweep written as CSV to standard output.

use bernamp::sweep::{regimes_ordered, run_sweep, write_csv, EpsGrid, EpsScale, ParamsGrid, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = SweepSpec::new(ParamsGrid {
        c: vec![0.3],
        alpha: vec![50.0],
        d: vec![1],
        k: vec![1, 2],
    });
    spec.eps_grid = EpsGrid {
        min: 0.05,
        max: 50.0,
        steps: 12,
        scale: EpsScale::Log,
    };
    spec.solver.restarts = 16;
    let rows = run_sweep(&spec)?;
    write_csv(std::io::stdout().lock(), &spec, &rows)?;
    eprintln!("regimes ordered along eps: {}", regimes_ordered(&rows));
    Ok(())
}
