// Widths in the sup-norm, and the single-ball rates that back every estimate.

use nwidth::width::{garnaev_gluskin, gluskin_single_ball, linf_estimate_with, pietsch_stesin};
use nwidth::{estimate, BallFamily, BallSpec, Error, EstimateOptions, LogBase, WidthQuery};

pub fn run_example() -> nwidth::Result<()> {
    let fam = BallFamily::new(8, vec![BallSpec::from_p(2.0, 1.0)?])?;
    for n in [2, 4, 7] {
        let query = WidthQuery::with_q(n, 8, f64::INFINITY)?;
        let e = estimate(&fam, &query, EstimateOptions::default())?;
        let two = linf_estimate_with(&fam, &query, LogBase::Two)?;
        println!("n = {n}: natural log {:.6}, log2 {:.6}", e.value, two.value);
    }
    let e = estimate(&fam, &WidthQuery::with_q(7, 8, f64::INFINITY)?, EstimateOptions::default())?;
    assert!((e.value - ((16.0f64 / 7.0).ln() / 7.0).sqrt()).abs() < 1e-14);

    // p < 2 against the sup-norm has no known order estimate.
    let l1 = BallFamily::new(8, vec![BallSpec::from_p(1.0, 1.0)?])?;
    let err = estimate(&l1, &WidthQuery::with_q(2, 8, f64::INFINITY)?, EstimateOptions::default()).unwrap_err();
    assert!(matches!(err, Error::UnsupportedRegime(_)));
    println!("l1 in l_inf: {err} (exit code {})", err.exit_code());

    println!("exact cube width in l1, N = 4, n = 2: {}", pietsch_stesin(0.0, 1.0, 2, 4)?);
    println!("l3 in l4, N = 64, n = 16: {}", gluskin_single_ball(1.0 / 3.0, 0.25, 16, 64)?);
    println!("l2 in l_inf, N = 1000, n = 500: {}", garnaev_gluskin(0.5, 500, 1000)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
