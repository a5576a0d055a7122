// Build a family of weighted balls, test points against it, and find the
// largest q-norm of a flat vector inside it.

use nwidth::ball::{flat_sup_norm, vk_member, TruncatedOctahedron};
use nwidth::{lp_norm, member, BallFamily, BallSpec};

pub fn run_example() -> nwidth::Result<()> {
    // M = B_inf^6 ∩ 3 B_1^6: the cube clipped by a scaled cross-polytope.
    let fam = BallFamily::new(6, vec![BallSpec::from_p(f64::INFINITY, 1.0)?, BallSpec::from_p(1.0, 3.0)?])?;

    let inside = [1.0, -1.0, 0.5, 0.5, 0.0, 0.0];
    let outside = [1.0, 1.0, 1.0, 0.5, 0.0, 0.0];
    println!("||inside||_1 = {}", lp_norm(&inside, 1.0)?);
    assert!(member(&inside, &fam, 0.0)?);
    assert!(!member(&outside, &fam, 0.0)?);

    // Along the boundary direction u, M reaches exactly boundary_scale(u) * u.
    let u = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
    let t = fam.boundary_scale(&u)?;
    println!("boundary scale along {u:?}: {t}");
    assert!((t - 0.75).abs() < 1e-15);

    // Largest l2 norm of a flat vector supported on at most 4 coordinates.
    let flat = flat_sup_norm(&fam, 0.5, 4)?;
    println!("flat sup over 4 coordinates: {} using k = {}", flat.value, flat.k);
    assert_eq!(flat.k, 3);
    assert!((flat.value - 3f64.sqrt()).abs() < 1e-12);

    // Points with at most k coordinates of size one and the rest small lie in V_k.
    let v2 = TruncatedOctahedron::new(2, 6)?;
    assert!(vk_member(&[1.0, -0.5, 0.5, 0.0, 0.0, 0.0], &v2, 1e-12)?);
    assert!(!vk_member(&[1.0, 1.0, 0.5, 0.0, 0.0, 0.0], &v2, 1e-12)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
