//! Pairwise exchange scales `kappa` between weighted balls.
//!
//! For balls `a`, `b` with `z_a != z_b`,
//! `kappa = (nu_b / nu_a)^(1 / (z_b - z_a))`, the support size at which the two
//! balls admit the same flat vectors: `nu_a kappa^-z_a = nu_b kappa^-z_b`.

use crate::ball::{BallFamily, BallSpec};

/// Exponent gaps below this are treated as equal exponents.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Relative tolerance used when testing `1 <= kappa <= N`.
pub const KAPPA_RANGE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    /// Exponents closer than [`DEGENERATE_GAP`] for distinct balls; value forced to 1.
    pub degenerate: bool,
    /// The true value was outside the finite positive range and has been clamped.
    pub clamped: bool,
}

fn canonical(a: BallSpec, b: BallSpec) -> (BallSpec, BallSpec) {
    let swap = match a.z().total_cmp(&b.z()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a.nu() > b.nu(),
    };
    if swap {
        (b, a)
    } else {
        (a, b)
    }
}

/// `kappa_{a,b}` with diagnostics. Symmetric in its arguments bit for bit.
pub fn kappa_checked(a: BallSpec, b: BallSpec) -> Kappa {
    let (lo, hi) = canonical(a, b);
    if lo == hi {
        return Kappa { value: 1.0, degenerate: false, clamped: false };
    }
    let gap = hi.z() - lo.z();
    if gap < DEGENERATE_GAP {
        return Kappa { value: 1.0, degenerate: true, clamped: false };
    }
    let ln_kappa = (hi.nu().ln() - lo.nu().ln()) / gap;
    let value = ln_kappa.exp();
    if value == f64::INFINITY {
        Kappa { value: f64::MAX, degenerate: false, clamped: true }
    } else if value < f64::MIN_POSITIVE {
        Kappa { value: f64::MIN_POSITIVE, degenerate: false, clamped: true }
    } else {
        Kappa { value, degenerate: false, clamped: false }
    }
}

pub fn kappa_pair(a: BallSpec, b: BallSpec) -> f64 {
    kappa_checked(a, b).value
}

/// Both sides of `nu_a kappa^-z_a = nu_b kappa^-z_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn kappa_identity(a: BallSpec, b: BallSpec, tol: f64) -> IdentityCheck {
    let kappa = kappa_pair(a, b);
    let lhs = a.nu() * kappa.powf(-a.z());
    let rhs = b.nu() * kappa.powf(-b.z());
    let holds = (lhs - rhs).abs() <= tol * lhs.max(rhs);
    IdentityCheck { holds, lhs, rhs }
}

pub fn kappa_identity_check(a: BallSpec, b: BallSpec, tol: f64) -> bool {
    kappa_identity(a, b, tol).holds
}

/// Radius of the `l_s` ball containing `B_{p_a} ∩ kappa^(z_b - z_a) B_{p_b}`
/// when `z_a <= z_s <= z_b`: `kappa^(z_s - z_a)`.
pub fn interpolation_radius(kappa: f64, z_a: f64, z_s: f64) -> f64 {
    kappa.powf(z_s - z_a)
}

/// Symmetric matrix of `kappa` over a family, indexed like `family.balls()`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaMatrix {
    values: Vec<Vec<f64>>,
    zs: Vec<f64>,
}

impl KappaMatrix {
    pub fn new(fam: &BallFamily) -> Self {
        let balls = fam.balls();
        let values = balls
            .iter()
            .map(|&a| balls.iter().map(|&b| kappa_pair(a, b)).collect())
            .collect();
        KappaMatrix {
            values,
            zs: balls.iter().map(|b| b.z()).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inverse exponents of the family this matrix was computed from.
    pub fn zs(&self) -> &[f64] {
        &self.zs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaViolation {
    pub i: usize,
    pub j: usize,
    pub kappa: f64,
}

/// Pairs `(i, j)`, `i < j`, with `kappa` outside `[1, N]`.
///
/// Evaluated as `0 <= ln nu_j - ln nu_i <= (z_j - z_i) ln N` (balls sorted by `z`), which
/// avoids dividing by small exponent gaps.
pub fn check_kappa_range(fam: &BallFamily) -> Vec<KappaViolation> {
    let balls = fam.balls();
    let ln_n = (fam.ambient_dim() as f64).ln();
    let mut out = Vec::new();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let (a, b) = (balls[i], balls[j]);
            let rise = b.nu().ln() - a.nu().ln();
            let cap = (b.z() - a.z()) * ln_n;
            let tol = KAPPA_RANGE_RTOL * rise.abs().max(cap).max(1.0);
            if rise < -tol || rise > cap + tol {
                out.push(KappaViolation { i, j, kappa: kappa_pair(a, b) });
            }
        }
    }
    out
}
