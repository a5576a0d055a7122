//! Order estimates of `d_n(M, l_q^N)`.
//!
//! All values are order estimates returned with implied constant 1: the true width is
//! within factors depending only on `q` of the returned value. The exceptions are
//! [`pietsch_stesin`], which is an exact width, and the flat/inscribed bounds in
//! [`crate::oracle`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ball::{BallFamily, BallSpec};
use crate::error::{Error, Result};
use crate::kappa::{check_kappa_range, kappa_checked, kappa_pair};
use crate::normalize::normalize_family;

/// `(n, N, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthQuery {
    pub n: usize,
    pub dim: usize,
    pub zq: f64,
}

impl WidthQuery {
    pub fn new(n: usize, dim: usize, zq: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("ambient dimension N must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&zq) {
            return Err(Error::InvalidInput(format!("inverse exponent 1/q = {zq} outside [0, 1]")));
        }
        Ok(WidthQuery { n, dim, zq })
    }

    /// From `q` in `[1, inf]`.
    pub fn with_q(n: usize, dim: usize, q: f64) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidInput(format!("q must be >= 1 or 'inf', got {q}")));
        }
        Self::new(n, dim, if q.is_infinite() { 0.0 } else { 1.0 / q })
    }

    pub fn q(&self) -> f64 {
        if self.zq == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.zq
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    LInfty,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3 => "Case3",
            CaseTag::Case4 => "Case4",
            CaseTag::Case5 => "Case5",
            CaseTag::LInfty => "LInfty",
        };
        f.write_str(s)
    }
}

/// Index sets over `family.balls()`.
///
/// For `q <= 2` only the first two groups are populated (`p > q`, `p < q`); for `q > 2` the
/// three groups are `p > q`, `2 < p < q`, `p < 2`. The primed sets close the inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegimePartition {
    pub a1_strict: Vec<usize>,
    pub a2_strict: Vec<usize>,
    pub a3_strict: Vec<usize>,
    pub a1p: Vec<usize>,
    pub a2p: Vec<usize>,
    pub a3p: Vec<usize>,
}

pub fn partition(fam: &BallFamily, zq: f64) -> RegimePartition {
    let mut out = RegimePartition::default();
    let two_regime = zq >= 0.5;
    for (i, b) in fam.balls().iter().enumerate() {
        let z = b.z();
        if z < zq {
            out.a1_strict.push(i);
        }
        if z <= zq {
            out.a1p.push(i);
        }
        if two_regime {
            if z > zq {
                out.a2_strict.push(i);
            }
            if z >= zq {
                out.a2p.push(i);
            }
        } else {
            if z > zq && z < 0.5 {
                out.a2_strict.push(i);
            }
            if z >= zq && z <= 0.5 {
                out.a2p.push(i);
            }
            if z > 0.5 {
                out.a3_strict.push(i);
            }
            if z >= 0.5 {
                out.a3p.push(i);
            }
        }
    }
    out
}

/// `min(1, n^(-1/2) N^(1/q))`, equal to 1 for `n = 0`.
pub fn gluskin_bracket(n: usize, dim: usize, zq: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    ((n as f64).powf(-0.5) * (dim as f64).powf(zq)).min(1.0)
}

/// `(1/p - 1/q) / (1/2 - 1/q)`, the single-ball rate exponent for `q > 2`.
pub fn gluskin_exponent(zp: f64, zq: f64) -> f64 {
    (zp - zq) / (0.5 - zq)
}

/// `nu N^(1/q - 1/p)`.
pub fn case1_term(ball: BallSpec, dim: usize, zq: f64) -> f64 {
    ball.nu() * (dim as f64).powf(zq - ball.z())
}

/// `nu_a kappa_{a,b}^(z_s - z_a)`: the radius of the `l_s` ball containing the pair.
pub fn interp_term(a: BallSpec, b: BallSpec, zs: f64) -> f64 {
    a.nu() * kappa_pair(a, b).powf(zs - a.z())
}

/// `nu m^((1/p - 1/q)/(1/2 - 1/q))`.
pub fn gluskin_term(a: BallSpec, zq: f64, bracket: f64) -> f64 {
    a.nu() * bracket.powf(gluskin_exponent(a.z(), zq))
}

/// `nu_a kappa_{a,b}^(1/2 - z_a) m`.
pub fn euclidean_term(a: BallSpec, b: BallSpec, bracket: f64) -> f64 {
    interp_term(a, b, 0.5) * bracket
}

/// Which of the three competing expressions attains the five-regime minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiChoice {
    Phi1,
    Phi2,
    Phi3,
}

/// The three competing expressions; `+inf` for an empty index set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiBreakdown {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// Indices into `family.balls()` realizing the reported value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attaining {
    pub alpha: usize,
    pub beta: Option<usize>,
    pub via: Option<PhiChoice>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// Order estimate with implied constant 1.
    pub value: f64,
    pub case: CaseTag,
    pub phi: Option<PhiBreakdown>,
    pub attaining: Attaining,
    pub warnings: Vec<String>,
    /// The family the formulas were evaluated on (normalized when requested).
    pub family: BallFamily,
    pub query: WidthQuery,
    pub log_base: LogBase,
}

impl EstimateResult {
    /// Re-evaluates the closed form at the attaining indices.
    pub fn attained_term(&self) -> f64 {
        let balls = self.family.balls();
        let q = &self.query;
        let a = balls[self.attaining.alpha];
        let b = self.attaining.beta.map(|j| balls[j]);
        let bracket = gluskin_bracket(q.n, q.dim, q.zq);
        match (self.case, self.attaining.via) {
            (CaseTag::Case1, _) => case1_term(a, q.dim, q.zq),
            (CaseTag::Case2, _) => a.nu(),
            (CaseTag::Case3, _) => interp_term(a, b.expect("pair"), q.zq),
            (CaseTag::Case4, _) => a.nu() * bracket,
            (CaseTag::Case5, Some(PhiChoice::Phi1)) => interp_term(a, b.expect("pair"), q.zq),
            (CaseTag::Case5, Some(PhiChoice::Phi2)) => gluskin_term(a, q.zq, bracket),
            (CaseTag::Case5, _) => euclidean_term(a, b.expect("pair"), bracket),
            (CaseTag::LInfty, _) => a.nu() * linf_bracket(q.n, q.dim, self.log_base).powf(a.z()),
        }
    }
}

/// Minimum of `f` over `items`, first index on ties; `(+inf, None)` when empty.
fn argmin<T: Copy>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> f64) -> (f64, Option<T>) {
    let mut best = (f64::INFINITY, None);
    for it in items {
        let v = f(it);
        if best.1.is_none() || v < best.0 {
            best = (v, Some(it));
        }
    }
    best
}

fn pairs<'a>(left: &'a [usize], right: &'a [usize]) -> impl Iterator<Item = (usize, usize)> + 'a {
    left.iter().flat_map(move |&i| right.iter().map(move |&j| (i, j)))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn require_kappa_range(fam: &BallFamily) -> Result<()> {
    if let Some(v) = check_kappa_range(fam).into_iter().next() {
        let balls = fam.balls();
        return Err(Error::KappaRange {
            p_a: balls[v.i].p_label(),
            p_b: balls[v.j].p_label(),
            kappa: v.kappa,
            dim: fam.ambient_dim(),
        });
    }
    Ok(())
}

fn require_dim(fam: &BallFamily, query: &WidthQuery) -> Result<()> {
    if fam.ambient_dim() != query.dim {
        return Err(Error::InvalidInput(format!(
            "family dimension {} differs from query dimension {}",
            fam.ambient_dim(),
            query.dim
        )));
    }
    Ok(())
}

fn degenerate_pair_warnings(fam: &BallFamily) -> Vec<String> {
    let balls = fam.balls();
    let mut out = Vec::new();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let k = kappa_checked(balls[i], balls[j]);
            if k.degenerate {
                out.push(format!(
                    "degenerate pair {} / {}: exponents closer than 1e-12, kappa set to 1",
                    balls[i], balls[j]
                ));
            }
            if k.clamped {
                out.push(format!("kappa for {} / {} clamped to the float range", balls[i], balls[j]));
            }
        }
    }
    out
}

/// Finite-`q` dispatcher over the five regimes.
///
/// Requires `1 <= kappa <= N` for every pair and `n <= N/2`. When several regime
/// hypotheses hold at once the tag follows the priority Case1 > Case2 > Case3 for `q <= 2`
/// and Case1 > Case4 > Case5 for `q > 2`; the values agree on those overlaps.
pub fn finite_q_estimate(fam: &BallFamily, query: &WidthQuery) -> Result<EstimateResult> {
    require_dim(fam, query)?;
    if query.zq == 0.0 {
        return Err(Error::RedirectToLinf);
    }
    if 2 * query.n > query.dim {
        return Err(Error::Range(format!(
            "n = {} exceeds N/2 = {} (n>N/2)",
            query.n,
            query.dim as f64 / 2.0
        )));
    }
    require_kappa_range(fam)?;

    let balls = fam.balls();
    let zq = query.zq;
    let part = partition(fam, zq);
    let all = balls.len();
    let bracket = gluskin_bracket(query.n, query.dim, zq);
    let mut warnings = degenerate_pair_warnings(fam);

    let single = |case, (value, alpha): (f64, Option<usize>)| EstimateResult {
        value,
        case,
        phi: None,
        attaining: Attaining { alpha: alpha.expect("non-empty family"), beta: None, via: None },
        warnings: Vec::new(),
        family: fam.clone(),
        query: *query,
        log_base: LogBase::Natural,
    };

    let mut result = if part.a1p.len() == all {
        if part.a2p.len() == all || (zq < 0.5 && part.a3p.len() == all) {
            warnings.push("several regime hypotheses hold; tag fixed by priority".into());
        }
        single(
            CaseTag::Case1,
            argmin(0..all, |i| case1_term(balls[i], query.dim, zq)),
        )
    } else if zq >= 0.5 {
        if part.a2p.len() == all {
            single(CaseTag::Case2, argmin(0..all, |i| balls[i].nu()))
        } else {
            let (value, pair) = argmin(pairs(&part.a1p, &part.a2p), |(i, j)| {
                interp_term(balls[i], balls[j], zq)
            });
            let (alpha, beta) = pair.ok_or_else(|| Error::Internal("empty mixed partition".into()))?;
            EstimateResult {
                value,
                case: CaseTag::Case3,
                phi: None,
                attaining: Attaining { alpha, beta: Some(beta), via: None },
                warnings: Vec::new(),
                family: fam.clone(),
                query: *query,
                log_base: LogBase::Natural,
            }
        }
    } else if part.a3p.len() == all {
        single(CaseTag::Case4, argmin(0..all, |i| balls[i].nu() * bracket))
    } else {
        case5(fam, query, &part, bracket)?
    };
    result.warnings.splice(0..0, warnings);
    Ok(result)
}

fn case5(
    fam: &BallFamily,
    query: &WidthQuery,
    part: &RegimePartition,
    bracket: f64,
) -> Result<EstimateResult> {
    let balls = fam.balls();
    let zq = query.zq;
    let right1 = union(&part.a2p, &part.a3p);
    let left3 = union(&part.a1p, &part.a2p);
    let (phi1, p1) = argmin(pairs(&part.a1p, &right1), |(i, j)| interp_term(balls[i], balls[j], zq));
    let (phi2, p2) = argmin(part.a2p.iter().copied(), |i| gluskin_term(balls[i], zq, bracket));
    let (phi3, p3) = argmin(pairs(&left3, &part.a3p), |(i, j)| {
        euclidean_term(balls[i], balls[j], bracket)
    });

    let candidates = [
        (phi1, PhiChoice::Phi1, p1.map(|(a, b)| (a, Some(b)))),
        (phi2, PhiChoice::Phi2, p2.map(|a| (a, None))),
        (phi3, PhiChoice::Phi3, p3.map(|(a, b)| (a, Some(b)))),
    ];
    let mut best: Option<(f64, PhiChoice, (usize, Option<usize>))> = None;
    for (v, choice, idx) in candidates {
        let Some(idx) = idx else { continue };
        if best.is_none_or(|b| v < b.0) {
            best = Some((v, choice, idx));
        }
    }
    let (value, via, (alpha, beta)) =
        best.ok_or_else(|| Error::Internal("all three competing expressions are empty".into()))?;
    if !value.is_finite() {
        return Err(Error::Internal(format!("non-finite five-regime value {value}")));
    }
    Ok(EstimateResult {
        value,
        case: CaseTag::Case5,
        phi: Some(PhiBreakdown { phi1, phi2, phi3 }),
        attaining: Attaining { alpha, beta, via: Some(via) },
        warnings: Vec::new(),
        family: fam.clone(),
        query: *query,
        log_base: LogBase::Natural,
    })
}

/// Base of the logarithm in the `q = inf` rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// `min(1, log(2N/n) / n)`, equal to 1 for `n = 0`.
pub fn linf_bracket(n: usize, dim: usize, base: LogBase) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    (base.log(2.0 * dim as f64 / nf) / nf).min(1.0)
}

/// `q = inf` estimate: `min_a nu_a min(1, log(2N/n)/n)^(1/p_a)`, for `p_a >= 2`.
pub fn linf_estimate(fam: &BallFamily, query: &WidthQuery) -> Result<EstimateResult> {
    linf_estimate_with(fam, query, LogBase::Natural)
}

pub fn linf_estimate_with(
    fam: &BallFamily,
    query: &WidthQuery,
    base: LogBase,
) -> Result<EstimateResult> {
    require_dim(fam, query)?;
    if query.zq != 0.0 {
        return Err(Error::Domain("the l_inf estimator needs q = inf".into()));
    }
    if let Some(b) = fam.balls().iter().find(|b| b.z() > 0.5) {
        return Err(Error::UnsupportedRegime(format!(
            "q = inf with p = {} < 2 has no order estimate",
            b.p_label()
        )));
    }
    if query.n + 1 > query.dim {
        return Err(Error::Range(format!(
            "n = {} exceeds N - 1 = {} (n>N-1)",
            query.n,
            query.dim.saturating_sub(1)
        )));
    }
    require_kappa_range(fam)?;
    let bracket = linf_bracket(query.n, query.dim, base);
    let balls = fam.balls();
    let (value, alpha) = argmin(0..balls.len(), |i| balls[i].nu() * bracket.powf(balls[i].z()));
    let mut warnings = degenerate_pair_warnings(fam);
    if base != LogBase::Natural {
        warnings.push(format!("log base {base:?}"));
    }
    Ok(EstimateResult {
        value,
        case: CaseTag::LInfty,
        phi: None,
        attaining: Attaining { alpha: alpha.expect("non-empty family"), beta: None, via: None },
        warnings,
        family: fam.clone(),
        query: *query,
        log_base: base,
    })
}

/// Exact width `d_n(B_p^N, l_q^N) = (N - n)^(1/q - 1/p)` for `q <= p`.
pub fn pietsch_stesin(zp: f64, zq: f64, n: usize, dim: usize) -> Result<f64> {
    if zq < zp {
        return Err(Error::Domain(format!("requires q <= p, got 1/q = {zq} < 1/p = {zp}")));
    }
    if n > dim {
        return Err(Error::Range(format!("n = {n} exceeds N = {dim}")));
    }
    if n == dim {
        return Ok(0.0);
    }
    Ok(((dim - n) as f64).powf(zq - zp))
}

/// Single-ball rate for `p <= q < inf`, `n <= N/2`: 1 for `q <= 2`, otherwise
/// `min(1, n^(-1/2) N^(1/q))^lambda` with `lambda = min(1, (1/p - 1/q)/(1/2 - 1/q))`.
pub fn gluskin_single_ball(zp: f64, zq: f64, n: usize, dim: usize) -> Result<f64> {
    if zq == 0.0 {
        return Err(Error::Domain("q must be finite".into()));
    }
    if zp < zq {
        return Err(Error::Domain(format!("requires p <= q, got 1/p = {zp} < 1/q = {zq}")));
    }
    if 2 * n > dim {
        return Err(Error::Range(format!("n = {n} exceeds N/2 (n>N/2)")));
    }
    if zq >= 0.5 {
        return Ok(1.0);
    }
    let lambda = gluskin_exponent(zp, zq).min(1.0);
    Ok(gluskin_bracket(n, dim, zq).powf(lambda))
}

/// `q = inf` single-ball rate `min(1, (log(1 + N/n) / n)^(1/p))` for `p >= 2`.
pub fn garnaev_gluskin(zp: f64, n: usize, dim: usize) -> Result<f64> {
    garnaev_gluskin_with(zp, n, dim, LogBase::Natural)
}

pub fn garnaev_gluskin_with(zp: f64, n: usize, dim: usize, base: LogBase) -> Result<f64> {
    if zp > 0.5 {
        return Err(Error::UnsupportedRegime(format!("requires p >= 2, got 1/p = {zp}")));
    }
    if n + 1 > dim {
        return Err(Error::Range(format!("n = {n} exceeds N - 1 (n>N-1)")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    Ok((base.log(1.0 + dim as f64 / nf) / nf).powf(zp).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimateOptions {
    pub auto_normalize: bool,
    pub log_base: LogBase,
}

/// Normalizes when asked, then dispatches on `q`.
pub fn estimate(fam: &BallFamily, query: &WidthQuery, opts: EstimateOptions) -> Result<EstimateResult> {
    let family = if opts.auto_normalize {
        normalize_family(fam)
    } else {
        fam.clone()
    };
    let mut result = if query.zq == 0.0 {
        linf_estimate_with(&family, query, opts.log_base)?
    } else {
        finite_q_estimate(&family, query)?
    };
    if opts.auto_normalize && family != *fam {
        result.warnings.push("radii normalized before evaluation".into());
    }
    Ok(result)
}
