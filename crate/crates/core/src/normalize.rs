//! Reduction of arbitrary radii to a profile with `1 <= kappa <= N`, leaving `M` unchanged.
//!
//! The radii are viewed as a function `nu(z)` on the finite set of inverse exponents.
//! Two envelopes are taken in turn:
//!
//! * `nu_*(z) = min { nu(w) : w >= z }`, the largest nondecreasing minorant;
//! * `nu_**(z) = min { nu_*(w) N^(z - w) : w <= z }`, which caps the growth rate so that
//!   `1 <= nu_**(z) / nu_**(w) <= N^(z - w)` for `z >= w`.
//!
//! Every radius that drops is implied by the other balls, so the intersection is the same.

use crate::ball::{BallFamily, BallSpec};
use crate::error::{Error, Result};

/// A weight profile `z -> nu(z)` on a finite set, sorted ascending by `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    points: Vec<(f64, f64)>,
    ambient_dim: usize,
}

impl WeightProfile {
    pub fn new(ambient_dim: usize, points: Vec<(f64, f64)>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension N must be >= 1".into()));
        }
        let mut points = points;
        for &(z, nu) in &points {
            BallSpec::new(z, nu)?;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("profile inverse exponents must be distinct".into()));
        }
        Ok(WeightProfile { points, ambient_dim })
    }

    pub fn from_family(fam: &BallFamily) -> Self {
        WeightProfile {
            points: fam.balls().iter().map(|b| (b.z(), b.nu())).collect(),
            ambient_dim: fam.ambient_dim(),
        }
    }

    pub fn to_family(&self) -> Result<BallFamily> {
        let balls = self
            .points
            .iter()
            .map(|&(z, nu)| BallSpec::new(z, nu))
            .collect::<Result<Vec<_>>>()?;
        BallFamily::new(self.ambient_dim, balls)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn nus(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Tail minimum, one right-to-left pass.
pub fn nu_star(profile: &WeightProfile) -> WeightProfile {
    let mut points = profile.points.clone();
    let mut running = f64::INFINITY;
    for point in points.iter_mut().rev() {
        running = running.min(point.1);
        point.1 = running;
    }
    WeightProfile { points, ambient_dim: profile.ambient_dim }
}

/// Growth cap `min_{w <= z} nu_*(w) N^(z - w)`; the tail envelope is applied first.
pub fn nu_star_star(profile: &WeightProfile) -> WeightProfile {
    let star = nu_star(profile);
    let ln_n = (profile.ambient_dim as f64).ln();
    let points = star
        .points
        .iter()
        .enumerate()
        .map(|(i, &(z, _))| {
            let capped = star.points[..=i]
                .iter()
                .map(|&(w, nu_w)| nu_w * ((z - w) * ln_n).exp())
                .fold(f64::INFINITY, f64::min);
            (z, capped)
        })
        .collect();
    WeightProfile { points, ambient_dim: profile.ambient_dim }
}

pub fn normalize_family(fam: &BallFamily) -> BallFamily {
    let profile = nu_star_star(&WeightProfile::from_family(fam));
    // Both envelopes keep every radius positive and finite, and the z set is unchanged.
    profile
        .to_family()
        .expect("normalized profile stays a valid family")
}
