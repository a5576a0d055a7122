//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails. Built with `harness = false`.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use nwidth::kappa::{interpolation_radius, kappa_checked};
use nwidth::normalize::{nu_star_star, WeightProfile};
use nwidth::oracle::{BruteForceConfig, SandwichConfig};
use nwidth::width::{
    case1_term, euclidean_term, finite_q_estimate, gluskin_bracket, gluskin_single_ball, gluskin_term,
    interp_term, linf_estimate, pietsch_stesin,
};
use nwidth::{
    brute_force_width, check_kappa_range, coordinate_upper_bound, estimate, inscribed_lower_bound, lp_norm, member,
    normalize_family, sandwich, BallFamily, BallSpec, CaseTag, Error, EstimateOptions, WidthQuery,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_z(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..8) {
        0 => 0.0,
        1 => 1.0,
        2 => 0.5,
        _ => rng.random_range(0.0..1.0),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_formula_regression() -> Outcome {
    let pairs = [(f64::INFINITY, 1.0), (f64::INFINITY, 2.0), (4.0, 2.0), (2.0, 1.0), (2.0, 2.0)];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (p, q) in pairs {
        for dim in [4, 8, 16, 32] {
            let fam = BallFamily::new(dim, vec![BallSpec::from_p(p, 1.0).unwrap()]).unwrap();
            for n in 0..dim {
                let query = WidthQuery::with_q(n, dim, q).unwrap();
                let got = coordinate_upper_bound(&fam, &query).unwrap();
                let exact = ((dim - n) as f64).powf(1.0 / q - 1.0 / p);
                let e = rel_err(got, exact);
                ensure(e <= 1e-12, || format!("p={p} q={q} N={dim} n={n}: {got} vs {exact}"))?;
                worst = worst.max(e);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases, max rel err {worst:.1e}"))
}

fn boundary_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let (mut eq_q, mut eq_2) = (0, 0);
    for _ in 0..10_000 {
        let dim = rng.random_range(4..=256);
        let n = rng.random_range(0..=dim / 2);
        let q = if rng.random_bool(0.5) { rng.random_range(1.0..2.0) } else { rng.random_range(2.0..12.0) };
        let zq = 1.0 / q;
        let mut balls = vec![BallSpec::new(zq, log_uniform(&mut rng, 0.1, 10.0)).unwrap()];
        if zq < 0.5 {
            balls.push(BallSpec::new(0.5, log_uniform(&mut rng, 0.1, 10.0)).unwrap());
        }
        for _ in 0..rng.random_range(1..4) {
            balls.push(BallSpec::new(random_z(&mut rng), log_uniform(&mut rng, 0.1, 10.0)).unwrap());
        }
        let fam = normalize_family(&BallFamily::new(dim, balls).unwrap());
        let m = gluskin_bracket(n, dim, zq);
        let bs = fam.balls();
        for (i, a) in bs.iter().enumerate() {
            let others = bs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, b)| *b);
            if a.z() == zq {
                // interpolation into l_q, the l_q ball itself, and the single-ball rate all give nu
                for b in others {
                    let lhs = interp_term(*a, b, zq);
                    let e = rel_err(lhs, a.nu()).max(rel_err(case1_term(*a, dim, zq), a.nu()));
                    ensure(e <= 1e-12, || format!("p = q identity: {lhs} vs {}", a.nu()))?;
                    worst = worst.max(e);
                }
                if zq < 0.5 {
                    let e = rel_err(gluskin_term(*a, zq, m), a.nu());
                    ensure(e <= 1e-12, || "p = q Gluskin identity".into())?;
                    worst = worst.max(e);
                }
                eq_q += 1;
            } else if a.z() == 0.5 && zq < 0.5 {
                for b in others {
                    let lhs = gluskin_term(*a, zq, m);
                    let rhs = euclidean_term(*a, b, m);
                    let e = rel_err(lhs, rhs);
                    ensure(e <= 1e-12, || format!("p = 2 identity: {lhs} vs {rhs}"))?;
                    worst = worst.max(e);
                }
                eq_2 += 1;
            }
        }
    }
    ensure(eq_q > 1000 && eq_2 > 1000, || format!("too few boundary hits: {eq_q}, {eq_2}"))?;
    Ok(format!("{eq_q} p=q and {eq_2} p=2 indices, max rel err {worst:.1e}"))
}

fn kappa_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 100_000 {
        let (za, zb) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        if f64::abs(za - zb) < 0.02 {
            continue;
        }
        let a = BallSpec::new(za, log_uniform(&mut rng, 0.01, 100.0)).unwrap();
        let b = BallSpec::new(zb, log_uniform(&mut rng, 0.01, 100.0)).unwrap();
        let k = kappa_checked(a, b);
        let k_rev = kappa_checked(b, a);
        ensure(k.value.to_bits() == k_rev.value.to_bits(), || format!("asymmetric kappa for {a:?} {b:?}"))?;
        let lhs = a.nu() * k.value.powf(-a.z());
        let rhs = b.nu() * k.value.powf(-b.z());
        let e = rel_err(lhs, rhs);
        ensure(e <= 1e-12, || format!("{a:?} {b:?}: {lhs} vs {rhs}"))?;
        worst = worst.max(e);
        count += 1;
    }
    Ok(format!("{count} pairs, symmetric bit for bit, max rel err {worst:.1e}"))
}

/// Random direction with a random support size, so different balls become active.
fn sparse_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let k = (log_uniform(rng, 1.0, dim as f64 + 1.0) as usize).clamp(1, dim);
    let flat = rng.random_bool(0.5);
    let mut u = vec![0.0; dim];
    for _ in 0..k {
        let i = rng.random_range(0..dim);
        u[i] = if flat {
            if rng.random_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            StandardNormal.sample(rng)
        };
    }
    if u.iter().all(|&v| v == 0.0) {
        u[0] = 1.0;
    }
    u
}

fn normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0usize;
    for fam_idx in 0..200 {
        let dim = (log_uniform(&mut rng, 4.0, 257.0) as usize).clamp(4, 256);
        let k = rng.random_range(1..=6);
        let balls: Vec<BallSpec> = (0..k)
            .map(|_| BallSpec::new(random_z(&mut rng), log_uniform(&mut rng, 0.01, 100.0)).unwrap())
            .collect();
        let raw = BallFamily::new(dim, balls).unwrap();
        let out = normalize_family(&raw);
        let ln_n = (dim as f64).ln();

        let bs = out.balls();
        for (i, w) in bs.iter().enumerate() {
            for z in &bs[i + 1..] {
                let ratio = z.nu() / w.nu();
                let cap = ((z.z() - w.z()) * ln_n).exp();
                ensure(ratio >= 1.0 && ratio <= cap * (1.0 + 1e-12), || {
                    format!("family {fam_idx}: ratio {ratio} outside [1, {cap}]")
                })?;
            }
        }
        ensure(check_kappa_range(&out).is_empty(), || format!("family {fam_idx}: kappa range violated"))?;
        let again = normalize_family(&out);
        for (a, b) in out.balls().iter().zip(again.balls()) {
            ensure(rel_err(a.nu(), b.nu()) <= 1e-14, || format!("family {fam_idx}: not idempotent"))?;
        }
        let direct = nu_star_star(&WeightProfile::from_family(&raw));
        for (a, b) in out.balls().iter().zip(direct.points()) {
            ensure(a.nu() == b.1, || "normalize_family differs from the profile pass".into())?;
        }

        for s in 0..10_000 {
            let u = sparse_direction(&mut rng, dim);
            let t = raw.boundary_scale(&u).unwrap();
            let factor = match s % 3 {
                0 => 1.0 - 1e-6,
                1 => 1.0 + 1e-6,
                _ => rng.random_range(0.0..1.0),
            };
            let x: Vec<f64> = u.iter().map(|v| v * t * factor).collect();
            let a = member(&x, &raw, 1e-9).unwrap();
            let b = member(&x, &out, 1e-9).unwrap();
            ensure(a == b, || format!("family {fam_idx}: membership differs at scale {factor}"))?;
            ensure(a == (factor < 1.0), || format!("family {fam_idx}: boundary sample misplaced"))?;
            points += 1;
        }
    }
    Ok(format!("200 families, {points} points, zero mismatches"))
}

fn interpolation_inclusion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let dim = rng.random_range(2..=64);
        let mut zs = [random_z(&mut rng), random_z(&mut rng)];
        zs.sort_by(f64::total_cmp);
        let [za, zb] = zs;
        let zs_mid = rng.random_range(za..=zb);
        let kappa = log_uniform(&mut rng, 1.0, dim as f64);
        // x in B_{p_a} ∩ kappa^(z_b - z_a) B_{p_b}
        let u = sparse_direction(&mut rng, dim);
        let ua = lp_norm(&u, za).unwrap();
        let ub = lp_norm(&u, zb).unwrap();
        let t = (1.0 / ua).min(kappa.powf(zb - za) / ub) * rng.random_range(0.5..=1.0);
        let x: Vec<f64> = u.iter().map(|v| v * t).collect();
        let norm = lp_norm(&x, zs_mid).unwrap();
        let bound = interpolation_radius(kappa, za, zs_mid);
        ensure(norm <= bound * (1.0 + 1e-9), || format!("||x||_s = {norm} > {bound}"))?;
        worst = worst.max(norm / bound);
    }
    Ok(format!("10000 instances, max ||x||_s / bound = {worst:.6}"))
}

fn single_ball_consistency() -> Outcome {
    let ps = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0, f64::INFINITY, 2.5];
    let qs = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 1.25, 2.5, 6.0, 16.0];
    let sizes = [(0, 8), (1, 8), (4, 8), (2, 16), (5, 32), (16, 64), (3, 100), (50, 128), (1, 256), (100, 256)];
    let mut count = 0;
    for &p in &ps {
        for &q in &qs {
            for &(n, dim) in &sizes {
                let nu = 0.5 + count as f64 / 1000.0;
                let ball = BallSpec::from_p(p, nu).unwrap();
                let fam = BallFamily::single(dim, ball).unwrap();
                let query = WidthQuery::with_q(n, dim, q).unwrap();
                let r = finite_q_estimate(&fam, &query).unwrap();
                let (zp, zq) = (ball.z(), query.zq);
                let expected = if zp <= zq {
                    nu * (dim as f64).powf(zq - zp)
                } else {
                    nu * gluskin_single_ball(zp, zq, n, dim).unwrap()
                };
                ensure(r.value.to_bits() == expected.to_bits(), || {
                    format!("p={p} q={q} n={n} N={dim}: {} ({}) vs {expected}", r.value, r.case)
                })?;
                ensure(r.attained_term().to_bits() == r.value.to_bits(), || "attained term differs".into())?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} grid points bitwise equal"))
}

fn case1_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut draws = 0;
    let (mut lo_up, mut hi_up, mut lo_low, mut hi_low) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    while draws < 1000 {
        let dim = rng.random_range(2..=64);
        let n = rng.random_range(0..=dim / 2);
        let q = log_uniform(&mut rng, 1.0, 20.0);
        let zq = 1.0 / q;
        let balls: Vec<BallSpec> = (0..rng.random_range(1..=4))
            .map(|_| {
                let z = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..=zq) };
                BallSpec::new(z, log_uniform(&mut rng, 0.1, 10.0)).unwrap()
            })
            .collect();
        let fam = normalize_family(&BallFamily::new(dim, balls).unwrap());
        let query = WidthQuery::new(n, dim, zq).unwrap();
        let r = finite_q_estimate(&fam, &query).unwrap();
        ensure(r.case == CaseTag::Case1, || format!("expected Case1, got {}", r.case))?;
        let upper = coordinate_upper_bound(&fam, &query).unwrap();
        let lower = inscribed_lower_bound(&fam, &query).unwrap();
        let a = r.value / upper;
        let b = lower / r.value;
        let tol = 1e-12;
        ensure((1.0 - tol..=2.0 + tol).contains(&a), || format!("phi/upper = {a}"))?;
        ensure((0.5 - tol..=1.0 + tol).contains(&b), || format!("lower/phi = {b}"))?;
        (lo_up, hi_up, lo_low, hi_low) = (lo_up.min(a), hi_up.max(a), lo_low.min(b), hi_low.max(b));
        draws += 1;
    }
    Ok(format!("phi/upper in [{lo_up:.4}, {hi_up:.4}], lower/phi in [{lo_low:.4}, {hi_low:.4}]"))
}

fn brute_force_regression() -> Outcome {
    let cfg = BruteForceConfig::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (p, q) in [(f64::INFINITY, 1.0), (f64::INFINITY, 2.0), (4.0, 2.0), (2.0, 1.0), (2.0, 2.0), (f64::INFINITY, 4.0)] {
        for dim in 2..=4usize {
            for n in 1..=2usize.min(dim - 1) {
                let fam = BallFamily::single(dim, BallSpec::from_p(p, 1.0).unwrap()).unwrap();
                let query = WidthQuery::with_q(n, dim, q).unwrap();
                let bf = brute_force_width(&fam, &query, &cfg).unwrap();
                let exact = pietsch_stesin(1.0 / p, 1.0 / q, n, dim).unwrap();
                let e = rel_err(bf.upper, exact);
                ensure(e <= 0.02, || format!("p={p} q={q} N={dim} n={n}: {} vs {exact}", bf.upper))?;
                worst = worst.max(e);
                cases += 1;
            }
        }
    }
    let disc = BallFamily::single(2, BallSpec::from_p(1.0, 1.0).unwrap()).unwrap();
    let bf = brute_force_width(&disc, &WidthQuery::with_q(1, 2, 2.0).unwrap(), &cfg).unwrap();
    let e = (bf.upper - 0.5f64.sqrt()).abs();
    ensure(e <= 0.01, || format!("B_1^2 in l2: {}", bf.upper))?;

    // Mixed families: upper / phi stays bounded and does not drift with N.
    let families: [&[(f64, f64)]; 4] = [
        &[(f64::INFINITY, 1.0), (1.0, 2.0)],
        &[(4.0, 1.0), (1.0, 2.0)],
        &[(f64::INFINITY, 1.0), (3.0, 1.5), (1.0, 6.0)],
        &[(6.0, 1.0), (1.5, 3.0)],
    ];
    let mut all = Vec::new();
    let mut worst_step: f64 = 1.0;
    for spec in families {
        for q in [1.5, 2.0, 4.0] {
            let mut prev: Option<f64> = None;
            for dim in [8usize, 16, 32, 64] {
                let balls = spec.iter().map(|&(p, nu)| BallSpec::from_p(p, nu).unwrap()).collect();
                let fam = BallFamily::new(dim, balls).unwrap();
                let cfg = SandwichConfig {
                    estimate: EstimateOptions { auto_normalize: true, ..Default::default() },
                    ..Default::default()
                };
                let r = sandwich(&fam, &WidthQuery::with_q(dim / 4, dim, q).unwrap(), &cfg).unwrap();
                let ratio = r.upper_over_phi;
                if let Some(p) = prev {
                    let step = (ratio / p).max(p / ratio);
                    ensure(step <= 2.0, || format!("ratio jumps by {step} at N = {dim}"))?;
                    worst_step = worst_step.max(step);
                }
                prev = Some(ratio);
                all.push(ratio);
            }
        }
    }
    let (lo, hi) = all.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    ensure(hi / lo <= 16.0, || format!("upper/phi spread {lo}..{hi}"))?;
    Ok(format!(
        "{cases} exact widths, max rel err {worst:.4}; B_1^2 err {e:.4}; upper/phi in [{lo:.3}, {hi:.3}], max step {worst_step:.3}"
    ))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nwidth"))
}

fn linf_evaluator() -> Outcome {
    let inf = f64::INFINITY;
    let cases = [
        ((2.0, 1.0), 8, 2, 1.0),
        ((inf, 3.0), 100, 10, 3.0),
        ((2.0, 1.0), 8, 7, ((16.0f64 / 7.0).ln() / 7.0).sqrt()),
    ];
    for ((p, nu), dim, n, expected) in cases {
        let fam = BallFamily::single(dim, BallSpec::from_p(p, nu).unwrap()).unwrap();
        let r = linf_estimate(&fam, &WidthQuery::with_q(n, dim, inf).unwrap()).unwrap();
        ensure(rel_err(r.value, expected) <= 1e-12, || format!("p={p} N={dim} n={n}: {} vs {expected}", r.value))?;
    }
    let fam = BallFamily::single(8, BallSpec::from_p(1.5, 1.0).unwrap()).unwrap();
    let err = estimate(&fam, &WidthQuery::with_q(2, 8, inf).unwrap(), EstimateOptions::default()).unwrap_err();
    ensure(matches!(err, Error::UnsupportedRegime(_)), || format!("library error {err}"))?;
    let out = bin()
        .args(["estimate", "--N", "8", "--n", "2", "--q", "inf", "--config", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(br#"{"balls":[{"p":1.5,"nu":1}]}"#)?;
            child.wait_with_output()
        })
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(4), || format!("exit status {:?}", out.status))?;
    Ok("3 values within 1e-12; p = 1.5 rejected with exit code 4".into())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_path = dir.path().join("sweep.json");
    std::fs::write(
        &cfg_path,
        r#"{"command":"sweep","N":4,"balls":[{"p":"inf","nu":1},{"p":1,"nu":2}],"auto_normalize":true,
           "seed":11,"brute_force":true,"resolution":{"boundary_samples":150,"line_directions":90,"plane_directions":12,
                          "refine_top":2,"refine_sweeps":15},
           "sweep":{"N":[3,4,16],"n":[1,2],"q":[1,1.5,2,4],"sandwich":true}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..3 {
        let path = dir.path().join(format!("out{i}.csv"));
        let status = bin()
            .args(["sweep", "--config"])
            .arg(&cfg_path)
            .arg("--output")
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("run {i} failed: {status:?}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "outputs differ".into())?;
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    ensure(rows == 24, || format!("expected 24 rows, got {rows}"))?;
    ensure(
        String::from_utf8_lossy(&outputs[0]).contains("heuristic-lower:grid"),
        || "grid search did not run".into(),
    )?;
    Ok(format!("3 runs, {} bytes each, identical", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact-formula regression", exact_formula_regression),
        ("boundary identities", boundary_identities),
        ("kappa identity", kappa_identity),
        ("normalization", normalization),
        ("interpolation inclusion", interpolation_inclusion),
        ("single-ball consistency", single_ball_consistency),
        ("Case-1 sandwich", case1_sandwich),
        ("brute-force oracle", brute_force_regression),
        ("l_inf evaluator", linf_evaluator),
        ("CLI determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("{:>2}. {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {label} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {label} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
