// Bracket the order estimate between certified bounds, and in dimension
// four or less compare against a grid search over subspaces.

use nwidth::oracle::{coordinate_bound, BruteForceConfig, SandwichConfig};
use nwidth::{brute_force_width, sandwich, BallFamily, BallSpec, WidthQuery};

pub fn run_example() -> nwidth::Result<()> {
    let fam = BallFamily::new(16, vec![BallSpec::from_p(4.0, 1.0)?, BallSpec::from_p(1.0, 2.0)?])?;
    let query = WidthQuery::with_q(4, 16, 2.0)?;
    let report = sandwich(&fam, &query, &SandwichConfig::default())?;
    println!(
        "{}: lower {:.4} <= phi {:.4}, upper {:.4} [{}]",
        report.case,
        report.lower,
        report.phi,
        report.upper,
        report.method_tags.join(", ")
    );
    assert!(report.lower <= report.upper);

    let coord = coordinate_bound(&fam, &query)?;
    println!("coordinate distance: flat {} cap {} exact {}", coord.flat.value, coord.holder_cap, coord.exact);

    // B_1^2 in the plane: the best line is a diagonal, at distance 1/sqrt(2).
    let disc = BallFamily::new(2, vec![BallSpec::from_p(1.0, 1.0)?])?;
    let bf = brute_force_width(&disc, &WidthQuery::with_q(1, 2, 2.0)?, &BruteForceConfig::default())?;
    println!("grid search: {:.5} (heuristic lower {:.5}) over {} subspaces", bf.upper, bf.lower, bf.subspaces_searched);
    assert!((bf.upper - 0.5f64.sqrt()).abs() < 0.01);

    let small = BallFamily::new(3, vec![BallSpec::from_p(f64::INFINITY, 1.0)?, BallSpec::from_p(1.0, 2.0)?])?;
    let cfg = SandwichConfig { use_brute_force: true, ..Default::default() };
    let r = sandwich(&small, &WidthQuery::with_q(1, 3, 2.0)?, &cfg)?;
    println!("N = 3: lower {:.4}, upper {:.4}, heuristic lower {:?}", r.lower, r.upper, r.heuristic_lower);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
