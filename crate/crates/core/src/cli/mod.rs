//! Command dispatch behind the `nwidth` binary: configuration, sweeps, and tabular output.

mod config;
mod emit;

pub use config::{parse_config, BallEntry, Command, Exponent, Format, OutputSpec, RunConfig, SweepAxes};
pub use emit::{emit, format_float, write_table, Cell, Table, RECORD_HEADER};

use rayon::prelude::*;

use crate::ball::{format_exponent, BallFamily};
use crate::error::{Error, Result};
use crate::kappa::check_kappa_range;
use crate::normalize::{nu_star, normalize_family, WeightProfile};
use crate::oracle::{sandwich, SandwichConfig, SandwichReport};
use crate::width::{estimate, EstimateOptions, EstimateResult, WidthQuery};

/// One row of estimate, sandwich, or sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub n: usize,
    pub dim: usize,
    pub q: Exponent,
    pub estimate: Option<EstimateResult>,
    pub bounds: Option<SandwichReport>,
    pub warnings: Vec<String>,
}

impl Record {
    fn cells(&self) -> Vec<Cell> {
        let est = self.estimate.as_ref();
        let phi = est.and_then(|e| e.phi);
        let p_of = |idx: Option<usize>| match (est, idx) {
            (Some(e), Some(i)) => Cell::Text(e.family.balls()[i].p_label()),
            _ => Cell::Empty,
        };
        let mut warnings = self.warnings.clone();
        if let Some(e) = est {
            warnings.extend(e.warnings.iter().cloned());
        }
        if let Some(b) = &self.bounds {
            warnings.extend(b.method_tags.iter().cloned());
        }
        vec![
            Cell::Int(self.n as u64),
            Cell::Int(self.dim as u64),
            match self.q {
                Exponent::Finite(v) => Cell::Float(v),
                Exponent::Infinite => Cell::Text("inf".into()),
            },
            est.map_or(Cell::Empty, |e| Cell::Text(e.case.to_string())),
            Cell::opt_float(est.map(|e| e.value)),
            Cell::opt_float(phi.map(|p| p.phi1)),
            Cell::opt_float(phi.map(|p| p.phi2)),
            Cell::opt_float(phi.map(|p| p.phi3)),
            Cell::opt_float(self.bounds.as_ref().map(|b| b.upper)),
            Cell::opt_float(self.bounds.as_ref().map(|b| b.lower)),
            p_of(est.map(|e| e.attaining.alpha)),
            p_of(est.and_then(|e| e.attaining.beta)),
            Cell::Text(warnings.join("; ")),
        ]
    }
}

pub fn records_table(records: &[Record]) -> Table {
    let mut t = Table::new(&RECORD_HEADER);
    t.rows = records.iter().map(Record::cells).collect();
    t
}

fn options(cfg: &RunConfig) -> EstimateOptions {
    EstimateOptions { auto_normalize: cfg.auto_normalize, log_base: cfg.log_base }
}

fn sandwich_config(cfg: &RunConfig) -> SandwichConfig {
    SandwichConfig {
        estimate: options(cfg),
        brute_force: cfg.brute_force_config(),
        use_brute_force: cfg.brute_force,
    }
}

/// Why a grid point is outside the estimator's range, if it is.
fn skip_reason(query: &WidthQuery) -> Option<&'static str> {
    if query.zq == 0.0 {
        (query.n + 1 > query.dim).then_some("n>N-1")
    } else {
        (2 * query.n > query.dim).then_some("n>N/2")
    }
}

fn evaluate_point(cfg: &RunConfig, dim: usize, n: usize, q: Exponent, with_bounds: bool) -> Record {
    let mut record = Record { n, dim, q, estimate: None, bounds: None, warnings: Vec::new() };
    let outcome = (|| -> Result<()> {
        let query = WidthQuery::new(n, dim, q.inverse())?;
        if let Some(reason) = skip_reason(&query) {
            record.warnings.push(format!("skipped: {reason}"));
            return Ok(());
        }
        let fam = cfg.family(dim)?;
        record.estimate = Some(estimate(&fam, &query, options(cfg))?);
        if with_bounds {
            record.bounds = Some(sandwich(&fam, &query, &sandwich_config(cfg))?);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.warnings.push(format!("error: {e}"));
    }
    record
}

/// Evaluates every grid point, in parallel, returning rows in grid order
/// (`N` outermost, then `q`, then `n`). Per-point failures become rows with a reason.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<Record>> {
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "sweep axes are required for sweep"))?;
    let dims = axes.dim.clone().unwrap_or_else(|| vec![cfg.dim]);
    let qs = axes
        .q
        .clone()
        .or_else(|| cfg.q.map(|q| vec![q]))
        .ok_or_else(|| Error::config("sweep.q", "give sweep.q or a scalar q"))?;
    let ns = axes
        .n
        .clone()
        .or_else(|| cfg.n.map(|n| vec![n]))
        .ok_or_else(|| Error::config("sweep.n", "give sweep.n or a scalar n"))?;
    let mut grid = Vec::with_capacity(dims.len() * qs.len() * ns.len());
    for &d in &dims {
        for &q in &qs {
            grid.extend(ns.iter().map(|&n| (d, q, n)));
        }
    }
    Ok(grid
        .par_iter()
        .map(|&(d, q, n)| evaluate_point(cfg, d, n, q, axes.sandwich))
        .collect())
}

fn normalize_table(fam: &BallFamily) -> Table {
    let profile = WeightProfile::from_family(fam);
    let star = nu_star(&profile);
    let out = normalize_family(fam);
    let mut t = Table::new(&["p", "nu", "nu_star", "nu_star_star", "changed"]);
    for ((raw, s), n) in fam.balls().iter().zip(star.points()).zip(out.balls()) {
        t.rows.push(vec![
            Cell::Text(raw.p_label()),
            Cell::Float(raw.nu()),
            Cell::Float(s.1),
            Cell::Float(n.nu()),
            Cell::Text((n.nu() != raw.nu()).to_string()),
        ]);
    }
    t
}

fn check_table(fam: &BallFamily) -> Table {
    let mut t = Table::new(&["p_alpha", "p_beta", "kappa", "N"]);
    for v in check_kappa_range(fam) {
        t.rows.push(vec![
            Cell::Text(format_exponent(fam.balls()[v.i].z())),
            Cell::Text(format_exponent(fam.balls()[v.j].z())),
            Cell::Float(v.kappa),
            Cell::Int(fam.ambient_dim() as u64),
        ]);
    }
    t
}

/// Result of a run: the table to emit and run-level warnings for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub warnings: Vec<String>,
}

/// Executes a validated configuration. Errors carry the exit-code class of the failure.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let warnings = cfg.duplicate_warnings();
    let table = match cfg.command {
        Command::Normalize => normalize_table(&cfg.family(cfg.dim)?),
        Command::Check => check_table(&cfg.family(cfg.dim)?),
        Command::Estimate | Command::Sandwich => {
            let query = cfg.query()?;
            let fam = cfg.family(cfg.dim)?;
            let est = estimate(&fam, &query, options(cfg))?;
            let bounds = match cfg.command {
                Command::Sandwich => Some(sandwich(&fam, &query, &sandwich_config(cfg))?),
                _ => None,
            };
            let record = Record {
                n: query.n,
                dim: query.dim,
                q: cfg.q.expect("validated"),
                estimate: Some(est),
                bounds,
                warnings: Vec::new(),
            };
            records_table(&[record])
        }
        Command::Sweep => records_table(&run_sweep(cfg)?),
    };
    Ok(RunOutput { table, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn sweep_over_n_is_nonincreasing() {
        let c = cfg(r#"{"command":"sweep","N":64,"q":4,"balls":[{"p":3,"nu":1},{"p":1,"nu":2}],
                       "auto_normalize":true,"sweep":{"n":[1,2,4,8]}}"#);
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.len(), 4);
        let phis: Vec<f64> = rows.iter().map(|r| r.estimate.as_ref().unwrap().value).collect();
        assert!(phis.windows(2).all(|w| w[1] <= w[0]), "{phis:?}");
    }

    #[test]
    fn sweep_across_q_two() {
        let c = cfg(r#"{"command":"sweep","N":64,"n":4,"balls":[{"p":4,"nu":1},{"p":1,"nu":2}],
                       "auto_normalize":true,"sweep":{"q":[1.5,2,3,4]}}"#);
        let rows = run_sweep(&c).unwrap();
        let tags: Vec<String> = rows.iter().map(|r| r.estimate.as_ref().unwrap().case.to_string()).collect();
        assert_eq!(tags, ["Case3", "Case3", "Case5", "Case5"]);
    }

    #[test]
    fn sweep_skips_out_of_range_points() {
        let c = cfg(r#"{"command":"sweep","N":8,"q":2,"balls":[{"p":2,"nu":1}],"sweep":{"n":[2,5]}}"#);
        let rows = run_sweep(&c).unwrap();
        assert!(rows[0].estimate.is_some());
        assert!(rows[1].estimate.is_none());
        assert_eq!(rows[1].warnings, ["skipped: n>N/2"]);
    }

    #[test]
    fn precondition_error_has_exit_code_3() {
        let c = cfg(r#"{"command":"estimate","N":10,"n":2,"q":2,"balls":[{"p":2,"nu":1},{"p":1,"nu":100}]}"#);
        let err = run(&c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn normalize_and_check_tables() {
        let c = cfg(r#"{"command":"normalize","N":10,"balls":[{"p":2,"nu":1},{"p":1,"nu":100}]}"#);
        let t = run(&c).unwrap().table;
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1][0], Cell::Text("1".into()));
        let Cell::Float(v) = t.rows[1][3] else { panic!() };
        assert!((v - 10f64.sqrt()).abs() < 1e-14);

        let c = cfg(r#"{"command":"check","N":8,"balls":[{"p":4,"nu":1},{"p":2,"nu":2}]}"#);
        assert_eq!(run(&c).unwrap().table.rows.len(), 1);
    }
}
