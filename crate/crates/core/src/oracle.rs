//! Desk-scale numerical bounds on `d_n(M, l_q^N)` that bracket the order estimates.
//!
//! Rigorous tools:
//!
//! * coordinate subspaces: the distance from `M` to the span of `n` coordinates is the sup
//!   of `||x||_q` over vectors of `M` supported on the other `N - n` coordinates. The flat
//!   family gives that sup from below; Hölder interpolation between pairs of balls gives it
//!   from above, and the two agree whenever every `p >= q` or every `p <= q`;
//! * inscribed bodies: `c B_p^N ⊆ M` with `p >= q` gives `d_n(M) >= c (N - n)^(1/q - 1/p)`.
//!
//! The grid search in [`brute_force_width`] is a heuristic: it samples the boundary of `M`
//! and searches a finite set of subspaces. Its lower value is labelled `heuristic-lower`
//! and never enters the rigorous part of a [`SandwichReport`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{flat_level, flat_sup_norm, lp_norm_unchecked, BallFamily, FlatSup};
use crate::error::{Error, Result};
use crate::width::{estimate, interp_term, CaseTag, EstimateOptions, WidthQuery};

/// Seed used when a configuration does not name one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Relative agreement at which the flat value is taken as the exact coordinate distance.
const EXACT_RTOL: f64 = 1e-12;

/// Distance from `M` to the best coordinate `n`-subspace, bracketed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateBound {
    /// Sup over flat vectors supported on `N - n` coordinates.
    pub flat: FlatSup,
    /// Hölder upper bound on the same sup.
    pub holder_cap: f64,
    /// `flat == holder_cap` up to rounding: the coordinate distance is known exactly.
    pub exact: bool,
}

impl CoordinateBound {
    /// A rigorous upper bound on the width.
    pub fn rigorous_upper(&self) -> f64 {
        self.holder_cap
    }
}

fn check_query(fam: &BallFamily, query: &WidthQuery) -> Result<()> {
    if fam.ambient_dim() != query.dim {
        return Err(Error::InvalidInput(format!(
            "family dimension {} differs from query dimension {}",
            fam.ambient_dim(),
            query.dim
        )));
    }
    if query.n > query.dim {
        return Err(Error::Range(format!("n = {} exceeds N = {}", query.n, query.dim)));
    }
    Ok(())
}

/// Upper bound on `sup ||x||_q` over `x ∈ M` supported on `m` coordinates.
pub fn holder_cap(fam: &BallFamily, zq: f64, m: usize) -> f64 {
    let balls = fam.balls();
    let mf = m as f64;
    let mut cap = f64::INFINITY;
    for (i, a) in balls.iter().enumerate() {
        if a.z() <= zq {
            cap = cap.min(a.nu() * mf.powf(zq - a.z()));
        }
        if a.z() >= zq {
            cap = cap.min(a.nu());
        }
        for b in &balls[i + 1..] {
            // sorted by z, so a.z < b.z here
            if a.z() <= zq && zq <= b.z() {
                cap = cap.min(interp_term(*a, *b, zq));
            }
        }
    }
    cap
}

pub fn coordinate_bound(fam: &BallFamily, query: &WidthQuery) -> Result<CoordinateBound> {
    check_query(fam, query)?;
    let m = query.dim - query.n;
    if m == 0 {
        return Ok(CoordinateBound {
            flat: FlatSup { value: 0.0, k: 0 },
            holder_cap: 0.0,
            exact: true,
        });
    }
    let flat = flat_sup_norm(fam, query.zq, m)?;
    let cap = holder_cap(fam, query.zq, m).max(flat.value);
    Ok(CoordinateBound {
        flat,
        holder_cap: cap,
        exact: flat.value >= cap * (1.0 - EXACT_RTOL),
    })
}

/// Flat-family value of the coordinate-subspace distance (see [`coordinate_bound`]).
pub fn coordinate_upper_bound(fam: &BallFamily, query: &WidthQuery) -> Result<f64> {
    Ok(coordinate_bound(fam, query)?.flat.value)
}

/// `c (N - n)^(1/q)` with `c = min_a nu_a N^(-1/p_a)` the largest inscribed cube.
pub fn inscribed_lower_bound(fam: &BallFamily, query: &WidthQuery) -> Result<f64> {
    check_query(fam, query)?;
    if query.n == query.dim {
        return Ok(0.0);
    }
    let c = flat_level(fam, query.dim);
    Ok(c * ((query.dim - query.n) as f64).powf(query.zq))
}

/// A rigorous lower bound with the tool that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub method: String,
}

/// Best of the inscribed-ball bounds `c_p B_p^N ⊆ M` over `p ∈ {inf, q} ∪ {p_a >= q}`,
/// plus the exact cross-polytope widths for `q ∈ {1, 2}`.
pub fn best_inscribed_lower_bound(fam: &BallFamily, query: &WidthQuery) -> Result<LowerBound> {
    check_query(fam, query)?;
    if query.n == query.dim {
        return Ok(LowerBound { value: 0.0, method: "trivial".into() });
    }
    let dim = query.dim as f64;
    let rest = (query.dim - query.n) as f64;
    let zq = query.zq;
    let mut zs: Vec<f64> = vec![0.0, zq];
    zs.extend(fam.balls().iter().map(|b| b.z()).filter(|&z| z <= zq));

    let mut best = LowerBound { value: 0.0, method: "none".into() };
    for zp in zs {
        // ||x||_{p_a} <= N^max(0, z_a - z_p) ||x||_p
        let c = fam
            .balls()
            .iter()
            .map(|b| b.nu() * dim.powf(-(b.z() - zp).max(0.0)))
            .fold(f64::INFINITY, f64::min);
        let v = c * rest.powf(zq - zp);
        if v > best.value {
            best = LowerBound {
                value: v,
                method: format!("inscribed-ball(p={})", crate::ball::format_exponent(zp)),
            };
        }
    }
    let min_nu = fam.balls().iter().map(|b| b.nu()).fold(f64::INFINITY, f64::min);
    let cross = if zq == 1.0 {
        Some(min_nu)
    } else if zq == 0.5 {
        Some(min_nu * (rest / dim).sqrt())
    } else {
        None
    };
    if let Some(v) = cross {
        if v > best.value {
            best = LowerBound { value: v, method: "inscribed-cross-polytope".into() };
        }
    }
    Ok(best)
}

/// Smallest `c` with `radius * V_k ⊆ c M`, from the flat vertices of `V_k`.
pub fn vk_inclusion_factor(fam: &BallFamily, radius: f64, k: usize) -> Result<f64> {
    if k == 0 || k > fam.ambient_dim() {
        return Err(Error::Range(format!("k = {k} outside [1, {}]", fam.ambient_dim())));
    }
    let kf = k as f64;
    Ok(fam
        .balls()
        .iter()
        .map(|b| radius * kf.powf(b.z()) / b.nu())
        .fold(0.0, f64::max))
}

pub fn vk_inclusion_holds(fam: &BallFamily, radius: f64, k: usize, factor: f64) -> Result<bool> {
    Ok(vk_inclusion_factor(fam, radius, k)? <= factor)
}

/// Resolution of the grid search. Every field is part of the reproducibility contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BruteForceConfig {
    /// Random boundary points of `M`, in addition to all flat vectors.
    pub boundary_samples: usize,
    /// Line directions for `n = 1` (and normals for `N = 3, n = 2`).
    pub line_directions: usize,
    /// Random directions combined pairwise into planes for `N = 4, n = 2`.
    pub plane_directions: usize,
    /// Best grid subspaces passed to local refinement.
    pub refine_top: usize,
    /// Pattern-search sweeps per refined subspace.
    pub refine_sweeps: usize,
    /// Random subspaces used to estimate the covering radius of the grid.
    pub probe_frames: usize,
    /// Set from the run seed, not from the resolution block.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig {
            boundary_samples: 1000,
            line_directions: 720,
            plane_directions: 60,
            refine_top: 4,
            refine_sweeps: 40,
            probe_frames: 64,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Sup-distance of the best subspace found; approaches the width from above as the
    /// resolution grows, up to boundary sampling error.
    pub upper: f64,
    /// Grid-certified value minus a covering-radius margin (`heuristic-lower`).
    pub lower: f64,
    /// Orthonormal frame of the best subspace.
    pub best_frame: Vec<Vec<f64>>,
    pub subspaces_searched: usize,
}

pub const BRUTE_FORCE_MAX_DIM: usize = 4;
pub const BRUTE_FORCE_MAX_N: usize = 2;

type Frame = Vec<Vec<f64>>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = dot(v, v).sqrt();
    (n > 1e-9).then(|| v.iter().map(|x| x / n).collect())
}

/// Gram-Schmidt; `None` when the vectors are (nearly) dependent.
fn orthonormalize(vecs: &[Vec<f64>]) -> Option<Frame> {
    let mut out: Frame = Vec::with_capacity(vecs.len());
    for v in vecs {
        let mut w = v.clone();
        for e in &out {
            let c = dot(&w, e);
            w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
        }
        out.push(normalized(&w)?);
    }
    Some(out)
}

/// Orthonormal basis of the complement of a unit vector.
fn complement(normal: &[f64]) -> Frame {
    let dim = normal.len();
    let mut out: Frame = Vec::new();
    for i in 0..dim {
        let mut w = vec![0.0; dim];
        w[i] = 1.0;
        let c = dot(&w, normal);
        w.iter_mut().zip(normal).for_each(|(wi, ni)| *wi -= c * ni);
        for e in &out {
            let c = dot(&w, e);
            w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
        }
        if let Some(e) = normalized(&w) {
            if dot(&w, &w) > 1e-6 {
                out.push(e);
            }
        }
        if out.len() + 1 == dim {
            break;
        }
    }
    out
}

fn projector(frame: &Frame, dim: usize) -> Vec<f64> {
    let mut p = vec![0.0; dim * dim];
    for e in frame {
        for i in 0..dim {
            for j in 0..dim {
                p[i * dim + j] += e[i] * e[j];
            }
        }
    }
    p
}

fn frobenius_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `||x - frame * y||_q` evaluated at coefficients `y`.
fn residual_norm(x: &[f64], frame: &Frame, y: &[f64], zq: f64, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend_from_slice(x);
    for (e, c) in frame.iter().zip(y) {
        buf.iter_mut().zip(e).for_each(|(r, ei)| *r -= c * ei);
    }
    lp_norm_unchecked(buf, zq)
}

/// `min_y ||x - frame * y||_q` for an orthonormal frame with at most two vectors.
fn distance(x: &[f64], frame: &Frame, zq: f64) -> f64 {
    let mut buf = Vec::with_capacity(x.len());
    match frame.len() {
        0 => lp_norm_unchecked(x, zq),
        _ if zq == 0.5 => {
            let mut r = x.to_vec();
            for e in frame {
                let c = dot(x, e);
                r.iter_mut().zip(e).for_each(|(ri, ei)| *ri -= c * ei);
            }
            dot(&r, &r).sqrt()
        }
        1 if zq == 1.0 => {
            // piecewise linear in t: the minimum sits at a breakpoint
            let d = &frame[0];
            let mut best = lp_norm_unchecked(x, 1.0);
            for (xi, di) in x.iter().zip(d) {
                if di.abs() > 1e-15 {
                    best = best.min(residual_norm(x, frame, &[xi / di], 1.0, &mut buf));
                }
            }
            best
        }
        2 if zq == 1.0 => l1_plane_distance(x, frame, &mut buf),
        1 => golden_line_distance(x, frame, zq, &mut buf),
        _ => irls_distance(x, frame, zq, &mut buf),
    }
}

fn l1_plane_distance(x: &[f64], frame: &Frame, buf: &mut Vec<f64>) -> f64 {
    let (a, b) = (&frame[0], &frame[1]);
    let mut best = lp_norm_unchecked(x, 1.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let det = a[i] * b[j] - a[j] * b[i];
            if det.abs() < 1e-12 {
                continue;
            }
            let s = (x[i] * b[j] - x[j] * b[i]) / det;
            let t = (a[i] * x[j] - a[j] * x[i]) / det;
            best = best.min(residual_norm(x, frame, &[s, t], 1.0, buf));
        }
    }
    for (k, e) in frame.iter().enumerate() {
        for (xi, ei) in x.iter().zip(e) {
            if ei.abs() > 1e-15 {
                let mut y = [0.0; 2];
                y[k] = xi / ei;
                best = best.min(residual_norm(x, frame, &y, 1.0, buf));
            }
        }
    }
    best
}

fn golden_line_distance(x: &[f64], frame: &Frame, zq: f64, buf: &mut Vec<f64>) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let d = &frame[0];
    // every coordinate term is monotone outside the range of the ratios x_i / d_i
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (xi, di) in x.iter().zip(d) {
        if di.abs() > 1e-15 {
            let t = xi / di;
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    if lo > hi {
        return lp_norm_unchecked(x, zq);
    }
    let f = |t: f64, buf: &mut Vec<f64>| residual_norm(x, frame, &[t], zq, buf);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut e = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fe) = (f(c, buf), f(e, buf));
    let tol = 1e-10 * (hi - lo).max(1e-12);
    while hi - lo > tol {
        if fc < fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c, buf);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + INV_PHI * (hi - lo);
            fe = f(e, buf);
        }
    }
    fc.min(fe)
}

/// Damped Newton iteration (reweighted least squares) with step halving; `1 < q < inf`, two directions.
fn irls_distance(x: &[f64], frame: &Frame, zq: f64, buf: &mut Vec<f64>) -> f64 {
    let q = 1.0 / zq;
    let dim = x.len();
    let objective = |y: &[f64], buf: &mut Vec<f64>| residual_norm(x, frame, y, zq, buf);
    let mut y: Vec<f64> = frame.iter().map(|e| dot(x, e)).collect();
    let mut fy = objective(&y, buf);
    let scale = lp_norm_unchecked(x, zq).max(1e-300);
    for _ in 0..200 {
        let mut r = x.to_vec();
        for (e, c) in frame.iter().zip(&y) {
            r.iter_mut().zip(e).for_each(|(ri, ei)| *ri -= c * ei);
        }
        let w: Vec<f64> = r
            .iter()
            .map(|ri| ri.abs().max(1e-9 * scale).powf(q - 2.0))
            .collect();
        // 2x2 normal equations
        let (a, b) = (&frame[0], &frame[1]);
        let mut m = [0.0; 3];
        let mut rhs = [0.0; 2];
        for i in 0..dim {
            m[0] += w[i] * a[i] * a[i];
            m[1] += w[i] * a[i] * b[i];
            m[2] += w[i] * b[i] * b[i];
            rhs[0] += w[i] * a[i] * x[i];
            rhs[1] += w[i] * b[i] * x[i];
        }
        let det = m[0] * m[2] - m[1] * m[1];
        if det.abs() < 1e-300 {
            break;
        }
        let target = [
            (rhs[0] * m[2] - rhs[1] * m[1]) / det,
            (m[0] * rhs[1] - m[1] * rhs[0]) / det,
        ];
        // the reweighted solve is a Newton step scaled by q - 1; damp it when q > 2
        let mut step = (1.0 / (q - 1.0)).min(1.0);
        let mut improved = false;
        while step > 1e-6 {
            let cand: Vec<f64> = y.iter().zip(&target).map(|(yi, ti)| yi + step * (ti - yi)).collect();
            let fc = objective(&cand, buf);
            if fc < fy {
                let gain = fy - fc;
                y = cand;
                fy = fc;
                improved = gain > 1e-14 * scale;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    fy
}

struct Sampler<'a> {
    fam: &'a BallFamily,
    dim: usize,
}

impl Sampler<'_> {
    /// All flat sign/support patterns on the boundary, plus random boundary points.
    fn boundary(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for pattern in sign_patterns(self.dim) {
            let k = pattern.iter().filter(|v| **v != 0.0).count();
            let t = flat_level(self.fam, k);
            out.push(pattern.iter().map(|v| v * t).collect());
        }
        while out.len() < count + 3usize.pow(self.dim as u32) - 1 {
            let u: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
            if let Some(u) = normalized(&u) {
                out.push(self.to_boundary(&u));
            }
        }
        out
    }

    fn to_boundary(&self, u: &[f64]) -> Vec<f64> {
        let t = self.fam.boundary_scale(u).expect("nonzero direction");
        u.iter().map(|v| v * t).collect()
    }
}

/// Nonzero vectors in `{-1, 0, 1}^dim`.
fn sign_patterns(dim: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(dim as u32);
    (1..total)
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let d = code % 3;
                    code /= 3;
                    d as f64 - 1.0
                })
                .collect::<Vec<f64>>()
        })
        .filter(|v| v.iter().any(|x| *x != 0.0))
        .collect()
}

/// Unit directions up to sign: sign patterns, then a dimension-specific grid.
fn line_directions(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = sign_patterns(dim)
        .into_iter()
        .filter(|v| v.iter().find(|x| **x != 0.0).is_some_and(|x| *x > 0.0))
        .filter_map(|v| normalized(&v))
        .collect();
    match dim {
        1 => {}
        2 => {
            for k in 0..count {
                let th = std::f64::consts::PI * k as f64 / count as f64;
                out.push(vec![th.cos(), th.sin()]);
            }
        }
        3 => {
            // golden-angle spiral on the upper hemisphere
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for k in 0..count {
                let zc = 1.0 - (k as f64 + 0.5) / count as f64;
                let r = (1.0 - zc * zc).sqrt();
                let th = golden * k as f64;
                out.push(vec![r * th.cos(), r * th.sin(), zc]);
            }
        }
        _ => {
            for _ in 0..count {
                let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
                if let Some(u) = normalized(&u) {
                    out.push(u);
                }
            }
        }
    }
    out
}

fn grid_frames(dim: usize, n: usize, cfg: &BruteForceConfig, rng: &mut ChaCha8Rng) -> Vec<Frame> {
    match n {
        0 => vec![Vec::new()],
        1 => line_directions(dim, cfg.line_directions, rng)
            .into_iter()
            .map(|d| vec![d])
            .collect(),
        _ if n + 1 == dim => line_directions(dim, cfg.line_directions, rng)
            .iter()
            .map(|normal| complement(normal))
            .collect(),
        _ => {
            let base = line_directions(dim, cfg.plane_directions, rng);
            let mut out = Vec::new();
            for i in 0..base.len() {
                for j in i + 1..base.len() {
                    if let Some(f) = orthonormalize(&[base[i].clone(), base[j].clone()]) {
                        out.push(f);
                    }
                }
            }
            out
        }
    }
}

/// Largest distance from `points` to the frame. Stops early, returning a value above
/// `cap`, once some point is farther than `cap`; `hint` is tried first and updated
/// to the index of the farthest point seen.
fn sup_distance_capped(points: &[Vec<f64>], frame: &Frame, zq: f64, cap: f64, hint: &mut usize) -> f64 {
    let first = distance(&points[*hint], frame, zq);
    if first > cap {
        return first;
    }
    let mut best = first;
    for (i, x) in points.iter().enumerate() {
        if i == *hint {
            continue;
        }
        let d = distance(x, frame, zq);
        if d > best {
            best = d;
            *hint = i;
            if d > cap {
                return d;
            }
        }
    }
    best
}

/// Exact sampled sup-distance of the `keep` best frames, in ascending order of
/// (score, index). Frames that cannot enter the top `keep` are abandoned early.
fn best_frames(points: &[Vec<f64>], frames: &[Frame], zq: f64, keep: usize) -> Vec<(f64, usize)> {
    let mut top: Vec<(f64, usize)> = Vec::with_capacity(keep + 1);
    let mut hint = 0;
    for (i, f) in frames.iter().enumerate() {
        let cap = if top.len() < keep { f64::INFINITY } else { top[keep - 1].0 };
        let v = sup_distance_capped(points, f, zq, cap, &mut hint);
        if v <= cap && (top.len() < keep || v < cap) {
            let at = top.partition_point(|&(s, _)| s <= v);
            top.insert(at, (v, i));
            top.truncate(keep);
        }
    }
    top
}

/// Pattern search over the frame entries, minimizing the sampled sup-distance.
fn refine_frame(points: &[Vec<f64>], start: &Frame, zq: f64, sweeps: usize) -> (Frame, f64) {
    let mut frame = start.clone();
    let mut hint = 0;
    let mut value = sup_distance_capped(points, &frame, zq, f64::INFINITY, &mut hint);
    let mut h = 0.05;
    for _ in 0..sweeps {
        let mut improved = false;
        for v in 0..frame.len() {
            for i in 0..frame[v].len() {
                for sign in [1.0, -1.0] {
                    let mut cand = frame.clone();
                    cand[v][i] += sign * h;
                    let Some(cand) = orthonormalize(&cand) else { continue };
                    let cv = sup_distance_capped(points, &cand, zq, value, &mut hint);
                    if cv < value {
                        frame = cand;
                        value = cv;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
            if h < 1e-5 {
                break;
            }
        }
    }
    (frame, value)
}

const ASCENT_ROUNDS: usize = 400;

/// Sampled sup-distance sharpened by local ascent along the boundary of `M`.
fn ascended_sup(sampler: &Sampler<'_>, points: &[Vec<f64>], frame: &Frame, zq: f64) -> f64 {
    let mut scored: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, x)| (distance(x, frame, zq), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    for &(start_value, idx) in scored.iter().take(8) {
        let Some(mut u) = normalized(&points[idx]) else { continue };
        let mut value = start_value;
        let mut h = 0.05;
        let mut rounds = 0;
        while h > 1e-7 && rounds < ASCENT_ROUNDS {
            rounds += 1;
            let mut improved = false;
            for i in 0..u.len() {
                for sign in [1.0, -1.0] {
                    let mut cand = u.clone();
                    cand[i] += sign * h;
                    let Some(cand) = normalized(&cand) else { continue };
                    let cv = distance(&sampler.to_boundary(&cand), frame, zq);
                    if cv > value * (1.0 + 1e-12) {
                        u = cand;
                        value = cv;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        best = f64::max(best, value);
    }
    best
}

/// Grid search over `n`-dimensional subspaces for `N <= 4`, `n <= 2`, `q < inf`.
///
/// Deterministic given the configuration: parallel evaluation is reduced in grid order.
pub fn brute_force_width(
    fam: &BallFamily,
    query: &WidthQuery,
    cfg: &BruteForceConfig,
) -> Result<BruteForceResult> {
    check_query(fam, query)?;
    if query.dim > BRUTE_FORCE_MAX_DIM || query.n > BRUTE_FORCE_MAX_N {
        return Err(Error::Range(format!(
            "grid search supports N <= {BRUTE_FORCE_MAX_DIM}, n <= {BRUTE_FORCE_MAX_N}; got N = {}, n = {}",
            query.dim, query.n
        )));
    }
    if query.zq == 0.0 {
        return Err(Error::Domain("grid search needs q < inf".into()));
    }
    let dim = query.dim;
    let zq = query.zq;
    if query.n >= dim {
        return Ok(BruteForceResult {
            upper: 0.0,
            lower: 0.0,
            best_frame: (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            subspaces_searched: 1,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sampler = Sampler { fam, dim };
    let points = sampler.boundary(cfg.boundary_samples, &mut rng);
    let frames = grid_frames(dim, query.n, cfg, &mut rng);

    let top = best_frames(&points, &frames, zq, cfg.refine_top.max(1));
    let grid_min = top[0].0;

    if query.n == 0 {
        let sup = ascended_sup(&sampler, &points, &frames[0], zq);
        return Ok(BruteForceResult {
            upper: sup,
            lower: grid_min.min(sup),
            best_frame: Vec::new(),
            subspaces_searched: 1,
        });
    }

    let refined: Vec<(Frame, f64)> = top
        .par_iter()
        .map(|&(_, i)| {
            let (frame, _) = refine_frame(&points, &frames[i], zq, cfg.refine_sweeps);
            let raw = ascended_sup(&sampler, &points, &frames[i], zq);
            let polished = ascended_sup(&sampler, &points, &frame, zq);
            if polished <= raw {
                (frame, polished)
            } else {
                (frames[i].clone(), raw)
            }
        })
        .collect();
    let (best_frame, upper) = refined
        .into_iter()
        .fold(None, |acc: Option<(Frame, f64)>, c| match acc {
            Some(a) if a.1 <= c.1 => Some(a),
            _ => Some(c),
        })
        .expect("at least one refined frame");

    // covering radius of the grid in projector distance, estimated from random probes
    let projectors: Vec<Vec<f64>> = frames.iter().map(|f| projector(f, dim)).collect();
    let probes: Vec<Vec<f64>> = (0..cfg.probe_frames)
        .filter_map(|_| {
            let vecs: Vec<Vec<f64>> = (0..query.n)
                .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            orthonormalize(&vecs).map(|f| projector(&f, dim))
        })
        .collect();
    let cover = probes
        .par_iter()
        .map(|p| projectors.iter().map(|g| frobenius_gap(p, g)).fold(f64::INFINITY, f64::min))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    let radius = points.iter().map(|x| lp_norm_unchecked(x, zq)).fold(0.0, f64::max);
    let lipschitz = 2.0 * (dim as f64).powf((zq - 0.5).abs()) * radius;
    let lower = (grid_min - lipschitz * cover).max(0.0).min(upper);

    Ok(BruteForceResult {
        upper,
        lower,
        best_frame,
        subspaces_searched: frames.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SandwichConfig {
    pub estimate: EstimateOptions,
    pub brute_force: BruteForceConfig,
    /// Run the grid search when the query is small enough.
    pub use_brute_force: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    /// Rigorous upper bound, or the grid-search value when smaller (tagged).
    pub upper: f64,
    /// Rigorous lower bound from inscribed bodies.
    pub lower: f64,
    pub phi: f64,
    pub case: CaseTag,
    pub upper_over_phi: f64,
    pub phi_over_lower: Option<f64>,
    /// Grid-search lower value, never folded into `lower`.
    pub heuristic_lower: Option<f64>,
    pub method_tags: Vec<String>,
}

pub fn sandwich(fam: &BallFamily, query: &WidthQuery, cfg: &SandwichConfig) -> Result<SandwichReport> {
    check_query(fam, query)?;
    let est = estimate(fam, query, cfg.estimate)?;
    let coord = coordinate_bound(fam, query)?;
    let mut tags = vec![if coord.exact {
        "upper:coordinate-flat-exact".to_string()
    } else {
        "upper:coordinate-holder".to_string()
    }];
    let mut upper = coord.rigorous_upper();

    let best = best_inscribed_lower_bound(fam, query)?;
    let cube = inscribed_lower_bound(fam, query)?;
    let (lower, method) = if cube >= best.value {
        (cube, "inscribed-cube".to_string())
    } else {
        (best.value, best.method)
    };
    tags.push(format!("lower:{method}"));

    let mut heuristic_lower = None;
    let brute_applicable = query.dim <= BRUTE_FORCE_MAX_DIM
        && query.n <= BRUTE_FORCE_MAX_N
        && query.zq > 0.0
        && query.n < query.dim;
    if cfg.use_brute_force && brute_applicable {
        let bf = brute_force_width(fam, query, &cfg.brute_force)?;
        heuristic_lower = Some(bf.lower);
        tags.push("heuristic-lower:grid".into());
        if bf.upper < upper {
            if bf.upper >= lower {
                upper = bf.upper;
                tags[0] = "upper:brute-force-grid".into();
            } else {
                tags.push("brute-force-below-rigorous-lower:ignored".into());
            }
        }
    }
    debug_assert!(lower <= upper, "lower {lower} > upper {upper}");
    Ok(SandwichReport {
        upper,
        lower,
        phi: est.value,
        case: est.case,
        upper_over_phi: upper / est.value,
        phi_over_lower: (lower > 0.0).then(|| est.value / lower),
        heuristic_lower,
        method_tags: tags,
    })
}
