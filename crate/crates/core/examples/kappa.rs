// Crossover scales between pairs of balls and the `1 <= kappa <= N` check.

use nwidth::kappa::{kappa_identity, KappaMatrix};
use nwidth::{check_kappa_range, kappa_pair, BallFamily, BallSpec};

pub fn run_example() -> nwidth::Result<()> {
    let l4 = BallSpec::from_p(4.0, 1.0)?;
    let l1 = BallSpec::from_p(1.0, 2.0)?;

    // Flat vectors of support kappa are extremal for both balls at once.
    let k = kappa_pair(l4, l1);
    println!("kappa(l4, 2 l1) = {k}");
    assert!((k - 2f64.powf(4.0 / 3.0)).abs() < 1e-14);
    let check = kappa_identity(l4, l1, 1e-12);
    assert!(check.holds, "{} vs {}", check.lhs, check.rhs);

    let fam = BallFamily::new(16, vec![BallSpec::from_p(f64::INFINITY, 1.0)?, l4, l1])?;
    let matrix = KappaMatrix::new(&fam);
    for i in 0..matrix.len() {
        let row: Vec<String> = (0..matrix.len()).map(|j| format!("{:8.4}", matrix.get(i, j))).collect();
        println!("{}", row.join(" "));
    }
    assert!(check_kappa_range(&fam).is_empty());

    // With nu = 2 the l2 ball no longer constrains the family: kappa drops below 1.
    let loose = BallFamily::new(8, vec![l4, BallSpec::from_p(2.0, 0.5)?])?;
    let bad = check_kappa_range(&loose);
    println!("violations: {bad:?}");
    assert_eq!(bad.len(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
