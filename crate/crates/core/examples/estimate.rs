// Order estimates for finite q, with the regime tag and the balls that attain them.

use nwidth::width::finite_q_estimate;
use nwidth::{estimate, BallFamily, BallSpec, CaseTag, EstimateOptions, WidthQuery};

fn show(label: &str, fam: &BallFamily, query: &WidthQuery) -> nwidth::Result<nwidth::EstimateResult> {
    let r = finite_q_estimate(fam, query)?;
    let p = |i: usize| fam.balls()[i].p_label();
    println!(
        "{label}: {} value {} (alpha p = {}, beta p = {})",
        r.case,
        r.value,
        p(r.attaining.alpha),
        r.attaining.beta.map_or("-".into(), p)
    );
    if let Some(phi) = r.phi {
        println!("    phi1 = {}, phi2 = {}, phi3 = {}", phi.phi1, phi.phi2, phi.phi3);
    }
    Ok(r)
}

pub fn run_example() -> nwidth::Result<()> {
    let inf = f64::INFINITY;
    let q2 = WidthQuery::with_q(4, 16, 2.0)?;

    let cube_l4 = BallFamily::new(16, vec![BallSpec::from_p(inf, 1.0)?, BallSpec::from_p(4.0, 1.0)?])?;
    let r = show("cube and l4, q = 2", &cube_l4, &q2)?;
    assert_eq!((r.case, r.value), (CaseTag::Case1, 2.0));

    let l4_l1 = BallFamily::new(16, vec![BallSpec::from_p(4.0, 1.0)?, BallSpec::from_p(1.0, 2.0)?])?;
    let r = show("l4 and 2 l1, q = 2", &l4_l1, &q2)?;
    assert_eq!(r.case, CaseTag::Case3);
    assert!((r.value - 2f64.cbrt()).abs() < 1e-14);

    let cube_l1 = BallFamily::new(16, vec![BallSpec::from_p(inf, 1.0)?, BallSpec::from_p(1.0, 2.0)?])?;
    let r = show("cube and 2 l1, q = 4", &cube_l1, &WidthQuery::with_q(4, 16, 4.0)?)?;
    assert_eq!(r.case, CaseTag::Case5);
    assert!((r.value - 2f64.powf(0.25)).abs() < 1e-14);

    // Raw radii need normalizing first; estimate() does it on request.
    let raw = BallFamily::new(16, vec![BallSpec::from_p(2.0, 1.0)?, BallSpec::from_p(1.0, 100.0)?])?;
    assert!(finite_q_estimate(&raw, &q2).is_err());
    let opts = EstimateOptions { auto_normalize: true, ..Default::default() };
    let r = estimate(&raw, &q2, opts)?;
    println!("normalized raw family: {} value {}", r.case, r.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
