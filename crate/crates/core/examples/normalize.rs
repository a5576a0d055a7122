// Replace radii by the smallest values that describe the same set and
// satisfy `1 <= kappa <= N` for every pair.

use nwidth::normalize::{nu_star, nu_star_star, WeightProfile};
use nwidth::{check_kappa_range, member, normalize_family, BallFamily, BallSpec};

pub fn run_example() -> nwidth::Result<()> {
    // ||x||_1 <= ||x||_2 sqrt(N) makes the radius 100 on l1 far too generous.
    let raw = BallFamily::new(10, vec![BallSpec::from_p(2.0, 1.0)?, BallSpec::from_p(1.0, 100.0)?])?;
    assert!(!check_kappa_range(&raw).is_empty());

    let profile = WeightProfile::from_family(&raw);
    let star = nu_star(&profile);
    let star_star = nu_star_star(&profile);
    for ((a, b), c) in profile.points().iter().zip(star.points()).zip(star_star.points()) {
        println!("1/p = {:<4} nu = {:<6} tail-min = {:<6} normalized = {}", a.0, a.1, b.1, c.1);
    }

    let fam = normalize_family(&raw);
    assert!(check_kappa_range(&fam).is_empty());
    assert!((fam.balls()[1].nu() - 10f64.sqrt()).abs() < 1e-14);

    // Same set: a point on the boundary of the l2 ball belongs to both.
    let x = [1.0 / 10f64.sqrt(); 10];
    assert_eq!(member(&x, &raw, 1e-12)?, member(&x, &fam, 1e-12)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
