//! Order-sharp estimates of Kolmogorov n-widths for intersections of weighted
//! ℓp balls in ℝ^N, measured in ℓq.
//!
//! A family is a finite set of balls `ν·B_p^N`. The estimator returns a value Φ
//! with `d_n ≍ Φ` up to constants depending only on the exponents. Around it sit
//! the pieces needed to use and audit it:
//!
//! - [`ball`]: families, norms, membership and flat-vector sup-norms.
//! - [`kappa`]: crossover scales between pairs of balls and the `1 ≤ κ ≤ N` check.
//! - [`normalize`]: reduction of any family to an equivalent one passing that check.
//! - [`width`]: the case dispatch for finite `q`, the `q = ∞` estimator, and
//!   single-ball closed forms.
//! - [`oracle`]: certified upper and lower bounds plus a small-dimension grid search.
//! - [`cli`]: JSON configs, sweeps and CSV/JSON-lines output for the `nwidth` binary.
//!
//! ```
//! use nwidth::{BallFamily, BallSpec, WidthQuery, estimate, EstimateOptions};
//!
//! let fam = BallFamily::new(16, vec![
//!     BallSpec::from_p(4.0, 1.0)?,
//!     BallSpec::from_p(1.0, 2.0)?,
//! ])?;
//! let r = estimate(&fam, &WidthQuery::with_q(4, 16, 2.0)?, EstimateOptions::default())?;
//! assert_eq!(r.case, nwidth::CaseTag::Case3);
//! assert!((r.value - 2f64.cbrt()).abs() < 1e-12);
//! # Ok::<(), nwidth::Error>(())
//! ```

pub mod ball;
pub mod cli;
pub mod error;
pub mod kappa;
pub mod normalize;
pub mod oracle;
pub mod width;

pub use ball::{flat_sup_norm, lp_norm, member, BallFamily, BallSpec};
pub use error::{Error, Result};
pub use kappa::{check_kappa_range, kappa_pair};
pub use normalize::normalize_family;
pub use oracle::{brute_force_width, coordinate_upper_bound, inscribed_lower_bound, sandwich};
pub use width::{estimate, CaseTag, EstimateOptions, EstimateResult, LogBase, WidthQuery};
