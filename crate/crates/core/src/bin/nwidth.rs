use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nwidth::cli::{emit, parse_config, run, Format};
use nwidth::Error;

#[derive(Parser)]
#[command(name = "nwidth", version, about = "Kolmogorov width estimates for intersections of weighted lp balls")]
struct Args {
    #[command(subcommand)]
    command: Sub,

    /// JSON run configuration; `-` reads stdin.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    auto_normalize: Option<bool>,

    #[arg(long, global = true)]
    n: Option<usize>,

    /// Target exponent, a number ≥ 1 or `inf`.
    #[arg(long, global = true)]
    q: Option<String>,

    /// Ambient dimension.
    #[arg(long = "N", global = true)]
    dim: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Width estimate with case tag and attaining balls.
    Estimate,
    /// Normalized radii for the family.
    Normalize,
    /// Pairs violating 1 <= kappa <= N.
    Check,
    /// Estimate together with certified upper and lower bounds.
    Sandwich,
    /// Estimates over a grid of (N, q, n).
    Sweep,
}

impl Sub {
    fn name(self) -> &'static str {
        match self {
            Sub::Estimate => "estimate",
            Sub::Normalize => "normalize",
            Sub::Check => "check",
            Sub::Sandwich => "sandwich",
            Sub::Sweep => "sweep",
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Jsonl,
}

/// The config text and its parsed JSON; empty when no file is given.
fn read_config(path: &Option<PathBuf>) -> Result<(String, Value), Error> {
    let Some(path) = path else {
        return Ok((String::new(), json!({})));
    };
    let mut text = String::new();
    let io = |e: std::io::Error| Error::Config { path: path.display().to_string(), message: e.to_string() };
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
    } else {
        text = std::fs::read_to_string(path).map_err(io)?;
    }
    let doc = serde_json::from_str(&text).map_err(|e| Error::Config {
        path: format!("{} line {} column {}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    Ok((text, doc))
}

fn parse_q(s: &str) -> Result<Value, Error> {
    if s == "inf" {
        return Ok(json!("inf"));
    }
    s.parse::<f64>()
        .map(|v| json!(v))
        .map_err(|_| Error::Config { path: "--q".into(), message: format!("not a number or 'inf': {s}") })
}

fn main_inner(args: Args) -> Result<(), Error> {
    let (text, mut doc) = read_config(&args.config)?;
    let original = doc.clone();
    let obj = doc.as_object_mut().ok_or_else(|| Error::Config {
        path: "config".into(),
        message: "top level must be a JSON object".into(),
    })?;
    let name = args.command.name();
    match obj.get("command") {
        Some(Value::String(c)) if c != name => {
            return Err(Error::Config {
                path: "command".into(),
                message: format!("config says '{c}' but the subcommand is '{name}'"),
            })
        }
        _ => {
            obj.insert("command".into(), json!(name));
        }
    }
    if let Some(seed) = args.seed {
        obj.insert("seed".into(), json!(seed));
    }
    if let Some(flag) = args.auto_normalize {
        obj.insert("auto_normalize".into(), json!(flag));
    }
    if let Some(n) = args.n {
        obj.insert("n".into(), json!(n));
    }
    if let Some(q) = &args.q {
        obj.insert("q".into(), parse_q(q)?);
    }
    if let Some(dim) = args.dim {
        obj.insert("N".into(), json!(dim));
    }

    // parse the file itself when nothing was merged in, so errors carry its line numbers
    let cfg = if doc == original { parse_config(&text)? } else { parse_config(&doc.to_string())? };
    let out = run(&cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Jsonl) => Format::Jsonl,
        None => cfg.output.format,
    };
    let path = args.output.or(cfg.output.path);
    emit(&out.table, format, path.as_deref())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
