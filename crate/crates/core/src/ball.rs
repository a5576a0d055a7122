//! Weighted lp balls, their finite intersections, and flat-vector extremal values.
//!
//! Exponents are carried as `z = 1/p`, so `p = inf` is the ordinary value `z = 0`
//! and exponent arithmetic is subtraction of `z`s.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this `p` the norm is accumulated on values rescaled by the max modulus.
const LARGE_P: f64 = 64.0;

/// One weighted ball `nu * B_p^N`, stored by inverse exponent `z = 1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    z: f64,
    nu: f64,
}

impl BallSpec {
    pub fn new(z: f64, nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidInput(format!(
                "inverse exponent z = {z} outside [0, 1]"
            )));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidInput(format!(
                "ball radius nu = {nu} must be positive and finite"
            )));
        }
        Ok(BallSpec { z, nu })
    }

    /// Builds a ball from `p` in `[1, inf]`.
    pub fn from_p(p: f64, nu: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidInput(format!("p = {p} must be >= 1 or inf")));
        }
        Self::new(if p.is_infinite() { 0.0 } else { 1.0 / p }, nu)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// The exponent `p = 1/z` (infinite for `z = 0`).
    pub fn p(&self) -> f64 {
        if self.z == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.z
        }
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.z, nu)
    }

    /// `p` rendered for reports: `inf` or the shortest decimal.
    pub fn p_label(&self) -> String {
        format_exponent(self.z)
    }
}

impl fmt::Display for BallSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, nu={})", self.p_label(), self.nu)
    }
}

/// Renders `1/z` as `inf` or a decimal, snapping values within 1e-12 of an integer.
pub fn format_exponent(z: f64) -> String {
    if z == 0.0 {
        return "inf".to_string();
    }
    let p = 1.0 / z;
    let r = p.round();
    if (p - r).abs() <= 1e-12 * p {
        format!("{r}")
    } else {
        format!("{p}")
    }
}

/// A finite intersection `M = ∩ nu_a B_{p_a}^N`, sorted ascending by `z` with distinct `z`s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    ambient_dim: usize,
    balls: Vec<BallSpec>,
}

impl BallFamily {
    /// Sorts the balls by `z` and collapses exact duplicates of `p` to the smallest radius.
    pub fn new(ambient_dim: usize, balls: Vec<BallSpec>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension N must be >= 1".into()));
        }
        if balls.is_empty() {
            return Err(Error::InvalidInput("family must be non-empty".into()));
        }
        let mut balls = balls;
        balls.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.nu.total_cmp(&b.nu)));
        balls.dedup_by(|later, kept| later.z == kept.z);
        Ok(BallFamily { ambient_dim, balls })
    }

    pub fn single(ambient_dim: usize, ball: BallSpec) -> Result<Self> {
        Self::new(ambient_dim, vec![ball])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn balls(&self) -> &[BallSpec] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Same balls in a different ambient dimension.
    pub fn with_dim(&self, ambient_dim: usize) -> Result<Self> {
        Self::new(ambient_dim, self.balls.clone())
    }

    /// Multiplies every radius by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let balls = self
            .balls
            .iter()
            .map(|b| b.with_nu(b.nu * c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.ambient_dim, balls)
    }

    /// Largest `t` with `t * u` in `M`; `u` must be nonzero.
    pub fn boundary_scale(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        let mut t = f64::INFINITY;
        for b in &self.balls {
            let norm = lp_norm(u, b.z)?;
            if norm == 0.0 {
                return Err(Error::InvalidInput("boundary_scale of the zero vector".into()));
            }
            t = t.min(b.nu / norm);
        }
        Ok(t)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim {
            return Err(Error::InvalidInput(format!(
                "vector has length {} but the family lives in dimension {}",
                x.len(),
                self.ambient_dim
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BallFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} {{", self.ambient_dim)?;
        for (i, b) in self.balls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

/// `||x||_p` with `p = 1/z`; `z = 0` is the max modulus.
pub fn lp_norm(x: &[f64], z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidInput(format!("inverse exponent z = {z} outside [0, 1]")));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite coordinate {bad}")));
    }
    Ok(lp_norm_unchecked(x, z))
}

pub(crate) fn lp_norm_unchecked(x: &[f64], z: f64) -> f64 {
    if z == 0.0 {
        return x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    if z == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if z == 0.5 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let p = 1.0 / z;
    if p > LARGE_P {
        let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let s: f64 = x.iter().map(|v| (v.abs() / max).powf(p)).sum();
        return max * (s.ln() * z).exp();
    }
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(z)
}

/// `x ∈ M`, with every radius inflated by the relative `slack`.
pub fn member(x: &[f64], fam: &BallFamily, slack: f64) -> Result<bool> {
    fam.check_dim(x)?;
    check_slack(slack)?;
    for b in &fam.balls {
        if lp_norm(x, b.z)? > b.nu * (1.0 + slack) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_slack(slack: f64) -> Result<()> {
    if !(slack.is_finite() && slack >= 0.0) {
        return Err(Error::InvalidInput(format!("slack = {slack} must be >= 0")));
    }
    Ok(())
}

/// `V_k`: the hull of all sign/permutation images of the 0/1 vector with `k` ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedOctahedron {
    k: usize,
    ambient_dim: usize,
}

impl TruncatedOctahedron {
    pub fn new(k: usize, ambient_dim: usize) -> Result<Self> {
        if k == 0 || k > ambient_dim {
            return Err(Error::InvalidInput(format!(
                "sparsity level k = {k} must lie in [1, {ambient_dim}]"
            )));
        }
        Ok(TruncatedOctahedron { k, ambient_dim })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
}

/// Membership in `V_k` through its description `{||x||_inf <= 1, ||x||_1 <= k}`.
pub fn vk_member(x: &[f64], vk: &TruncatedOctahedron, slack: f64) -> Result<bool> {
    if x.len() != vk.ambient_dim {
        return Err(Error::InvalidInput(format!(
            "vector has length {} but V_k lives in dimension {}",
            x.len(),
            vk.ambient_dim
        )));
    }
    check_slack(slack)?;
    let sup = lp_norm(x, 0.0)?;
    let l1 = lp_norm(x, 1.0)?;
    Ok(sup <= 1.0 + slack && l1 <= vk.k as f64 * (1.0 + slack))
}

/// Extremal value over the flat family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatSup {
    pub value: f64,
    /// Support size of the maximizing flat vector (smallest on ties).
    pub k: usize,
}

/// Largest `nu` multiple of a flat vector with `k` unit entries that stays in `M`.
pub fn flat_level(fam: &BallFamily, k: usize) -> f64 {
    let kf = k as f64;
    fam.balls
        .iter()
        .map(|b| b.nu * kf.powf(-b.z))
        .fold(f64::INFINITY, f64::min)
}

/// `max_{k <= m} k^{zq} * min_a nu_a k^{-z_a}`: the sup of `||x||_q` over vectors of
/// `M` supported on `m` coordinates whose nonzero entries share one modulus.
pub fn flat_sup_norm(fam: &BallFamily, zq: f64, m: usize) -> Result<FlatSup> {
    if m == 0 || m > fam.ambient_dim {
        return Err(Error::Range(format!(
            "support size m = {m} must lie in [1, {}]",
            fam.ambient_dim
        )));
    }
    if !(0.0..=1.0).contains(&zq) {
        return Err(Error::InvalidInput(format!("inverse exponent zq = {zq} outside [0, 1]")));
    }
    let mut best = FlatSup {
        value: f64::NEG_INFINITY,
        k: 0,
    };
    for k in 1..=m {
        let v = (k as f64).powf(zq) * flat_level(fam, k);
        if v > best.value {
            best = FlatSup { value: v, k };
        }
    }
    Ok(best)
}
